use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use std::path::{Path, PathBuf};

use elastodyn_cli::analysis;
use elastodyn_cli::config::{RunConfig, SchemeKind};
use elastodyn_cli::experiments::{builtin_test, TEST_IDS};
use elastodyn_cli::output;
use elastodyn_cli::runner;

#[derive(Parser)]
#[command(
    name = "elastodyn",
    about = "Finite-volume experiments for nonlinear elastodynamics with nonclassical shocks"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a built-in test or a config file; writes snapshot CSVs and a
    /// metadata JSON sidecar.
    Run {
        /// Built-in test id (one of 1, 2, 3a, 3b, 3c, 4, 4l, 5).
        #[arg(long, conflicts_with = "config")]
        test: Option<String>,
        /// TOML config file describing the run.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Override the scheme.
        #[arg(long)]
        scheme: Option<SchemeKind>,
        /// Override the cell count.
        #[arg(long)]
        cells: Option<usize>,
        /// Override the Courant number.
        #[arg(long)]
        cfl: Option<f64>,
        /// Override the sampling seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Print the effective config as TOML and exit without running.
        #[arg(long)]
        dump_config: bool,
    },
    /// Solve one Riemann problem and print the wave fan as JSON.
    Riemann {
        /// Left state as v,w.
        #[arg(long, allow_hyphen_values = true)]
        left: String,
        /// Right state as v,w.
        #[arg(long, allow_hyphen_values = true)]
        right: String,
        #[arg(long)]
        m: f64,
        #[arg(long)]
        beta: f64,
        /// Also evaluate the solution at the ray x/t = XI.
        #[arg(long, allow_hyphen_values = true)]
        sample: Option<f64>,
    },
    /// Run several schemes on one test and write aligned CSVs on the
    /// fixed lab grid.
    Compare {
        #[arg(long)]
        test: String,
        /// Comma-separated scheme list.
        #[arg(long, value_delimiter = ',', required = true)]
        schemes: Vec<SchemeKind>,
        #[arg(long)]
        cells: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Seeded sampling realizations of a test; writes a CSV histogram of
    /// the final shock structure.
    Histogram {
        #[arg(long, default_value = "5")]
        test: String,
        /// Number of realizations.
        #[arg(long, default_value_t = 100)]
        n: usize,
        /// Seeds run from seed-base to seed-base + n - 1.
        #[arg(long, default_value_t = 0)]
        seed_base: u64,
        /// Override the cell count.
        #[arg(long)]
        cells: Option<usize>,
        /// Override the final time (the canonical close-pair study uses 20).
        #[arg(long)]
        t_final: Option<f64>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

fn load_config(test: &Option<String>, config: &Option<PathBuf>) -> Result<RunConfig> {
    match (test, config) {
        (Some(id), None) => builtin_test(id),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("cannot read {}", path.display()))?;
            RunConfig::from_toml(&text)
        }
        _ => bail!("give exactly one of --test {TEST_IDS:?} or --config FILE"),
    }
}

fn parse_state(text: &str) -> Result<elastodyn::State> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        bail!("state must be v,w — got {text:?}");
    }
    Ok(elastodyn::State::new(parts[0].parse()?, parts[1].parse()?))
}

fn fan_to_json(
    p: &elastodyn::ModelParams,
    fan: &elastodyn::WaveFan,
    sample: Option<f64>,
) -> serde_json::Value {
    let state = |u: elastodyn::State| serde_json::json!({ "v": u.v, "w": u.w });
    let waves: Vec<serde_json::Value> = fan
        .waves
        .iter()
        .map(|wave| {
            serde_json::json!({
                "family": match wave.family {
                    elastodyn::Family::One => 1,
                    elastodyn::Family::Two => 2,
                },
                "kind": match wave.kind {
                    elastodyn::WaveKind::ClassicalShock => "classical-shock",
                    elastodyn::WaveKind::NonclassicalShock => "nonclassical-shock",
                    elastodyn::WaveKind::Rarefaction => "rarefaction",
                },
                "left": state(wave.left),
                "right": state(wave.right),
                "speed_lo": wave.speed_lo,
                "speed_hi": wave.speed_hi,
            })
        })
        .collect();
    let mut value = serde_json::json!({
        "left": state(fan.left_data),
        "right": state(fan.right_data),
        "middle": state(fan.middle),
        "max_abs_speed": fan.max_abs_speed(),
        "waves": waves,
    });
    if let Some(xi) = sample {
        let u = elastodyn::sample_fan(p, fan, xi);
        value["sample"] = serde_json::json!({ "xi": xi, "v": u.v, "w": u.w });
    }
    value
}

fn cmd_run(
    test: Option<String>,
    config: Option<PathBuf>,
    scheme: Option<SchemeKind>,
    cells: Option<usize>,
    cfl: Option<f64>,
    seed: Option<u64>,
    out: &Path,
    dump_config: bool,
) -> Result<()> {
    let mut cfg = load_config(&test, &config)?;
    if let Some(s) = scheme {
        cfg.scheme = s;
    }
    if let Some(n) = cells {
        cfg.n_cells = n;
    }
    if let Some(c) = cfl {
        cfg.cfl = c;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    if dump_config {
        print!("{}", cfg.to_toml()?);
        return Ok(());
    }
    let result = runner::run(&cfg)?;
    let paths = output::write_run(out, &result)?;
    for path in &paths {
        println!("wrote {}", path.display());
    }
    println!(
        "{}: {} steps to t = {}, wall {:.3}s",
        result.metadata.label, result.metadata.steps, cfg.t_final, result.metadata.wall_seconds
    );
    Ok(())
}

fn cmd_compare(
    test: &str,
    schemes: &[SchemeKind],
    cells: Option<usize>,
    seed: Option<u64>,
    out: &Path,
) -> Result<()> {
    let mut base = builtin_test(test)?;
    if let Some(n) = cells {
        base.n_cells = n;
    }
    if let Some(s) = seed {
        base.seed = s;
    }
    base.snapshot_times = vec![base.t_final];
    std::fs::create_dir_all(out)?;

    let lab_dx = (base.x_hi - base.x_lo) / base.n_cells as f64;
    let period = match base.boundary {
        elastodyn_cli::config::BoundaryKind::Periodic => Some(base.x_hi - base.x_lo),
        _ => None,
    };
    let mut fields: Vec<(SchemeKind, Vec<f64>, Vec<f64>)> = Vec::new();
    for &scheme in schemes {
        let mut cfg = base.clone();
        cfg.scheme = scheme;
        let result = runner::run(&cfg)?;
        let snap = result
            .snapshots
            .last()
            .ok_or_else(|| anyhow!("no final snapshot recorded"))?;
        let v = analysis::resample_to_fixed_grid(
            snap.left_edge,
            snap.dx,
            &snap.v,
            base.x_lo,
            lab_dx,
            base.n_cells,
            period,
        );
        let w = analysis::resample_to_fixed_grid(
            snap.left_edge,
            snap.dx,
            &snap.w,
            base.x_lo,
            lab_dx,
            base.n_cells,
            period,
        );
        let path = out.join(format!("{}_compare_{}.csv", base.label, scheme.as_str()));
        let aligned = runner::SnapshotData {
            time: snap.time,
            left_edge: base.x_lo,
            dx: lab_dx,
            x: (0..base.n_cells)
                .map(|j| base.x_lo + (j as f64 + 0.5) * lab_dx)
                .collect(),
            v,
            w,
        };
        output::write_snapshot_csv(&path, &aligned)?;
        println!("wrote {}", path.display());
        fields.push((scheme, aligned.v, aligned.w));
    }
    for i in 0..fields.len() {
        for k in i + 1..fields.len() {
            let (sa, va, wa) = &fields[i];
            let (sb, vb, wb) = &fields[k];
            let l1 = |a: &[f64], b: &[f64]| -> f64 {
                a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>() * lab_dx
            };
            println!(
                "L1({}, {}): v {:.6e}, w {:.6e}",
                sa.as_str(),
                sb.as_str(),
                l1(va, vb),
                l1(wa, wb)
            );
        }
    }
    Ok(())
}

fn cmd_histogram(
    test: &str,
    n: usize,
    seed_base: u64,
    cells: Option<usize>,
    t_final: Option<f64>,
    out: &Path,
) -> Result<()> {
    let mut base = builtin_test(test)?;
    if let Some(c) = cells {
        base.n_cells = c;
    }
    if let Some(t) = t_final {
        base.t_final = t;
        base.snapshot_times = vec![t];
    }
    base.validate()?;
    let study = analysis::histogram_study(&base, n, seed_base)?;
    std::fs::create_dir_all(out)?;
    let path = out.join(format!(
        "{}_histogram_n{}_seed{}.csv",
        base.label, n, seed_base
    ));
    analysis::write_histogram_csv(&path, &study)?;
    println!("wrote {}", path.display());
    println!(
        "close pairs (separation <= {}): {} of {}",
        analysis::CLOSE_PAIR_SEPARATION,
        study.two_close_count,
        n
    );
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Run {
            test,
            config,
            scheme,
            cells,
            cfl,
            seed,
            out,
            dump_config,
        } => cmd_run(test, config, scheme, cells, cfl, seed, &out, dump_config),
        Cmd::Riemann {
            left,
            right,
            m,
            beta,
            sample,
        } => {
            let p = elastodyn::ModelParams::new(m, beta)
                .map_err(|e| anyhow!("bad model parameters: {e:?}"))?;
            let fan = elastodyn::solve_riemann(&p, parse_state(&left)?, parse_state(&right)?)?;
            println!("{}", serde_json::to_string_pretty(&fan_to_json(&p, &fan, sample))?);
            Ok(())
        }
        Cmd::Compare {
            test,
            schemes,
            cells,
            seed,
            out,
        } => cmd_compare(&test, &schemes, cells, seed, &out),
        Cmd::Histogram {
            test,
            n,
            seed_base,
            cells,
            t_final,
            out,
        } => cmd_histogram(&test, n, seed_base, cells, t_final, &out),
    }
}
