//! Drives a configured run: builds the grid, steps the selected scheme,
//! clips steps to land exactly on snapshot times, and collects metadata.

use crate::config::{RunConfig, SchemeKind};
use anyhow::{anyhow, Result};
use elastodyn::{
    godunov_step, step, DetectionMode, FanCache, GlimmSimulator, ModelParams, SchemeConfig,
    UniformGrid,
};
use serde::{Deserialize, Serialize};
use std::time::Instant;

/// Grid contents at one output time.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SnapshotData {
    pub time: f64,
    pub left_edge: f64,
    pub dx: f64,
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    pub w: Vec<f64>,
}

impl SnapshotData {
    pub fn from_grid(grid: &UniformGrid) -> Self {
        let n = grid.n_cells();
        SnapshotData {
            time: grid.time(),
            left_edge: grid.left_edge(),
            dx: grid.dx(),
            x: (0..n).map(|j| grid.cell_center(j)).collect(),
            v: grid.v().to_vec(),
            w: grid.w().to_vec(),
        }
    }

    pub fn n_cells(&self) -> usize {
        self.x.len()
    }
}

/// Conserved totals at one instant; the series doubles as a drift check.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MassPoint {
    pub time: f64,
    pub step: u64,
    pub total_v: f64,
    pub total_w: f64,
}

/// Everything about a finished run that is not grid data.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Metadata {
    pub label: String,
    pub scheme: String,
    pub m: f64,
    pub beta: f64,
    pub cfl: f64,
    pub mesh_speed_margin: f64,
    pub mesh_sign_policy: String,
    pub boundary: String,
    pub x_lo: f64,
    pub x_hi: f64,
    pub n_cells: usize,
    pub t_final: f64,
    /// Sampling seed; present only when the scheme consumed one.
    pub seed: Option<u64>,
    pub steps: u64,
    pub dt_min: f64,
    pub dt_max: f64,
    pub wall_seconds: f64,
    pub snapshot_times: Vec<f64>,
    pub final_left_edge: f64,
    pub mass: Vec<MassPoint>,
}

pub struct RunOutput {
    pub config: RunConfig,
    pub snapshots: Vec<SnapshotData>,
    pub metadata: Metadata,
}

enum Engine {
    Rec {
        grid: UniformGrid,
        scheme: SchemeConfig,
    },
    Godunov {
        grid: UniformGrid,
        cfl: f64,
        cache: FanCache,
    },
    Glimm {
        sim: GlimmSimulator,
        cfl: f64,
    },
}

impl Engine {
    fn grid(&self) -> &UniformGrid {
        match self {
            Engine::Rec { grid, .. } => grid,
            Engine::Godunov { grid, .. } => grid,
            Engine::Glimm { sim, .. } => sim.grid(),
        }
    }

    fn advance(&mut self, p: &ModelParams, cap: Option<f64>) -> Result<f64> {
        let res = match self {
            Engine::Rec { grid, scheme } => step(grid, p, scheme, cap).map(|r| r.dt),
            Engine::Godunov { grid, cfl, cache } => godunov_step(grid, p, *cfl, cap, cache),
            Engine::Glimm { sim, cfl } => sim.step(p, *cfl, cap),
        };
        res.map_err(|e| {
            let grid = self.grid();
            let bad = (0..grid.n_cells())
                .find(|&j| !grid.state(j).v.is_finite() || !grid.state(j).w.is_finite());
            match bad {
                Some(j) => anyhow!("{e} (first non-finite cell: {j})"),
                None => anyhow!("{e}"),
            }
        })
    }

    fn into_grid(self) -> UniformGrid {
        match self {
            Engine::Rec { grid, .. } => grid,
            Engine::Godunov { grid, .. } => grid,
            Engine::Glimm { sim, .. } => sim.into_grid(),
        }
    }
}

/// Runs the configured experiment to `t_final`, recording a snapshot at
/// each requested time (steps are clipped so those times are hit exactly).
pub fn run(config: &RunConfig) -> Result<RunOutput> {
    config.validate()?;
    let p = config.params()?;
    let grid = config.build_grid()?;
    let start = Instant::now();

    let mut engine = match config.scheme {
        SchemeKind::RecNc | SchemeKind::RecNcc => {
            let detection = if config.scheme == SchemeKind::RecNc {
                DetectionMode::Nonclassical
            } else {
                DetectionMode::NonclassicalAndClassical
            };
            Engine::Rec {
                grid,
                scheme: SchemeConfig {
                    cfl: config.cfl,
                    mesh_speed_margin: config.mesh_speed_margin,
                    detection,
                    mesh_sign_policy: config.mesh_sign_policy.to_policy(),
                },
            }
        }
        SchemeKind::Godunov => Engine::Godunov {
            grid,
            cfl: config.cfl,
            cache: FanCache::new(),
        },
        SchemeKind::Glimm => Engine::Glimm {
            sim: GlimmSimulator::new(grid, config.seed),
            cfl: config.cfl,
        },
    };

    // Targets: the sorted snapshot times plus the final time, deduplicated.
    let mut targets = config.snapshot_times.clone();
    targets.push(config.t_final);
    targets.sort_by(f64::total_cmp);
    targets.dedup();

    let is_snapshot = |t: f64| config.snapshot_times.iter().any(|&s| s == t);

    let mut snapshots = Vec::new();
    let mut mass = Vec::new();
    let mut steps: u64 = 0;
    let mut dt_min = f64::INFINITY;
    let mut dt_max: f64 = 0.0;
    const MASS_EVERY: u64 = 500;

    {
        let g = engine.grid();
        mass.push(MassPoint {
            time: g.time(),
            step: 0,
            total_v: g.total_v(),
            total_w: g.total_w(),
        });
    }

    for &target in &targets {
        if is_snapshot(target) && engine.grid().time() == target {
            snapshots.push(SnapshotData::from_grid(engine.grid()));
            continue;
        }
        while engine.grid().time() < target {
            let cap = target - engine.grid().time();
            let t_before = engine.grid().time();
            let dt = engine.advance(&p, Some(cap)).map_err(|e| {
                anyhow!("step {} (t = {:.6e}) failed: {e}", steps + 1, t_before)
            })?;
            steps += 1;
            dt_min = dt_min.min(dt);
            dt_max = dt_max.max(dt);
            if steps % MASS_EVERY == 0 {
                let g = engine.grid();
                mass.push(MassPoint {
                    time: g.time(),
                    step: steps,
                    total_v: g.total_v(),
                    total_w: g.total_w(),
                });
            }
        }
        if is_snapshot(target) {
            snapshots.push(SnapshotData::from_grid(engine.grid()));
        }
    }

    let grid = engine.into_grid();
    mass.push(MassPoint {
        time: grid.time(),
        step: steps,
        total_v: grid.total_v(),
        total_w: grid.total_w(),
    });

    let metadata = Metadata {
        label: config.label.clone(),
        scheme: config.scheme.as_str().to_string(),
        m: config.m,
        beta: config.beta,
        cfl: config.cfl,
        mesh_speed_margin: config.mesh_speed_margin,
        mesh_sign_policy: format!("{:?}", config.mesh_sign_policy),
        boundary: format!("{:?}", config.boundary),
        x_lo: config.x_lo,
        x_hi: config.x_hi,
        n_cells: config.n_cells,
        t_final: config.t_final,
        seed: match config.scheme {
            SchemeKind::Glimm => Some(config.seed),
            _ => None,
        },
        steps,
        dt_min: if dt_min.is_finite() { dt_min } else { 0.0 },
        dt_max,
        wall_seconds: start.elapsed().as_secs_f64(),
        snapshot_times: config.snapshot_times.clone(),
        final_left_edge: grid.left_edge(),
        mass,
    };

    Ok(RunOutput {
        config: config.clone(),
        snapshots,
        metadata,
    })
}
