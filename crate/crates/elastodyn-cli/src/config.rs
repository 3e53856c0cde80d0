//! Run configuration: everything needed to reproduce an experiment from a
//! single flat config file.

use anyhow::{bail, Result};
use clap::ValueEnum;
use serde::{Deserialize, Serialize};

/// Which solver advances the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeKind {
    /// Moving-mesh scheme with discontinuous reconstruction of
    /// nonclassical shocks only.
    RecNc,
    /// Same scheme, also reconstructing classical shocks.
    RecNcc,
    /// Godunov averaging on a fixed mesh with the exact Riemann solver.
    Godunov,
    /// Glimm random sampling on a fixed mesh with the exact Riemann solver.
    Glimm,
}

impl SchemeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SchemeKind::RecNc => "rec-nc",
            SchemeKind::RecNcc => "rec-ncc",
            SchemeKind::Godunov => "godunov",
            SchemeKind::Glimm => "glimm",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryKind {
    Periodic,
    ConstantExtrapolation,
}

impl BoundaryKind {
    pub fn to_boundary(self) -> elastodyn::Boundary {
        match self {
            BoundaryKind::Periodic => elastodyn::Boundary::Periodic,
            BoundaryKind::ConstantExtrapolation => elastodyn::Boundary::ConstantExtrapolation,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum MeshPolicyKind {
    Alternate,
    FixedNegative,
    FixedPositive,
}

impl MeshPolicyKind {
    pub fn to_policy(self) -> elastodyn::MeshSignPolicy {
        match self {
            MeshPolicyKind::Alternate => elastodyn::MeshSignPolicy::Alternate,
            MeshPolicyKind::FixedNegative => elastodyn::MeshSignPolicy::FixedNegative,
            MeshPolicyKind::FixedPositive => elastodyn::MeshSignPolicy::FixedPositive,
        }
    }
}

/// Initial data shapes used by the built-in experiments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InitialData {
    /// Two constant states separated by a jump at `x_jump`.
    Riemann {
        left_v: f64,
        left_w: f64,
        right_v: f64,
        right_w: f64,
        x_jump: f64,
    },
    /// Piecewise-constant plateaus; `starts[k]` is where plateau k begins.
    /// On a periodic domain the last plateau wraps around to the first start.
    Plateaus {
        starts: Vec<f64>,
        v: Vec<f64>,
        w: Vec<f64>,
    },
    /// v = v_amp * sin(2 pi v_freq x), w = w_base + w_amp * cos(2 pi w_freq x).
    SineCosine {
        v_amp: f64,
        v_freq: f64,
        w_base: f64,
        w_amp: f64,
        w_freq: f64,
    },
}

/// Complete description of one run. Round-trips losslessly through TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Short name used in output file names.
    pub label: String,
    pub m: f64,
    pub beta: f64,
    pub scheme: SchemeKind,
    pub x_lo: f64,
    pub x_hi: f64,
    pub n_cells: usize,
    pub t_final: f64,
    /// Times at which the full grid is written out; the time stepper clips
    /// steps so each is hit exactly.
    pub snapshot_times: Vec<f64>,
    pub boundary: BoundaryKind,
    pub cfl: f64,
    pub mesh_speed_margin: f64,
    pub mesh_sign_policy: MeshPolicyKind,
    /// Sampling seed; only the Glimm scheme consumes it.
    pub seed: u64,
    pub initial: InitialData,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.m > 0.0) {
            bail!("m must be positive, got {}", self.m);
        }
        if !(self.beta >= 0.5 && self.beta <= 1.0) {
            bail!("beta must lie in [1/2, 1], got {}", self.beta);
        }
        if !(self.t_final > 0.0) {
            bail!("t_final must be positive, got {}", self.t_final);
        }
        if self.n_cells < 4 {
            bail!("need at least 4 cells, got {}", self.n_cells);
        }
        if !(self.x_hi > self.x_lo) {
            bail!("empty domain [{}, {}]", self.x_lo, self.x_hi);
        }
        if !(self.cfl > 0.0 && self.cfl < 1.0) {
            bail!("cfl must lie in (0, 1), got {}", self.cfl);
        }
        if !(self.mesh_speed_margin > 0.0) {
            bail!("mesh_speed_margin must be positive, got {}", self.mesh_speed_margin);
        }
        for &t in &self.snapshot_times {
            if !(t >= 0.0 && t <= self.t_final) {
                bail!("snapshot time {} outside [0, {}]", t, self.t_final);
            }
        }
        if let InitialData::Plateaus { starts, v, w } = &self.initial {
            if starts.is_empty() || starts.len() != v.len() || v.len() != w.len() {
                bail!("plateau arrays must be non-empty and of equal length");
            }
        }
        Ok(())
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn params(&self) -> Result<elastodyn::ModelParams> {
        elastodyn::ModelParams::new(self.m, self.beta)
            .map_err(|e| anyhow::anyhow!("bad model parameters: {e:?}"))
    }

    /// Builds the initial grid with exact cell averages of the initial data.
    pub fn build_grid(&self) -> Result<elastodyn::UniformGrid> {
        self.validate()?;
        let boundary = self.boundary.to_boundary();
        let grid = match &self.initial {
            InitialData::Riemann {
                left_v,
                left_w,
                right_v,
                right_w,
                x_jump,
            } => elastodyn::UniformGrid::from_riemann(
                self.x_lo,
                self.x_hi,
                self.n_cells,
                boundary,
                elastodyn::State::new(*left_v, *left_w),
                elastodyn::State::new(*right_v, *right_w),
                *x_jump,
            ),
            InitialData::Plateaus { starts, v, w } => {
                let states: Vec<(f64, elastodyn::State)> = starts
                    .iter()
                    .zip(v.iter().zip(w.iter()))
                    .map(|(&x, (&v, &w))| (x, elastodyn::State::new(v, w)))
                    .collect();
                elastodyn::UniformGrid::from_plateaus(
                    self.x_lo,
                    self.x_hi,
                    self.n_cells,
                    boundary,
                    &states,
                )
            }
            InitialData::SineCosine {
                v_amp,
                v_freq,
                w_base,
                w_amp,
                w_freq,
            } => {
                let (va, vf, wb, wa, wf) = (*v_amp, *v_freq, *w_base, *w_amp, *w_freq);
                let tau = core::f64::consts::TAU;
                elastodyn::UniformGrid::from_fn(
                    self.x_lo,
                    self.x_hi,
                    self.n_cells,
                    boundary,
                    |x| {
                        elastodyn::State::new(
                            va * (tau * vf * x).sin(),
                            wb + wa * (tau * wf * x).cos(),
                        )
                    },
                )
            }
        };
        Ok(grid)
    }
}
