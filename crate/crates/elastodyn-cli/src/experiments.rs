//! Built-in experiment presets.
//!
//! Each preset pins every parameter of a run so results are reproducible
//! from the test id alone. Domains for the jump problems are sized so no
//! wave reaches a boundary before the final time.

use crate::config::{
    BoundaryKind, InitialData, MeshPolicyKind, RunConfig, SchemeKind,
};
use anyhow::{bail, Result};

pub const TEST_IDS: [&str; 8] = ["1", "2", "3a", "3b", "3c", "4", "4l", "5"];

/// Returns the pinned configuration for a built-in test id.
///
/// Ids: `1` single kinetic shock, `2` four-wave interaction, `3a`/`3b`/`3c`
/// classical-plus-nonclassical pair at perturbation 0, 0.05, 0.1, `4`
/// smooth periodic data (short horizon), `4l` the same data on the long
/// horizon, `5` periodic plateaus run to t = 40.
pub fn builtin_test(id: &str) -> Result<RunConfig> {
    let cfg = match id {
        "1" => RunConfig {
            label: "test1".to_string(),
            m: 1.0,
            beta: 2.0 / 3.0,
            scheme: SchemeKind::RecNc,
            x_lo: -0.5,
            x_hi: 0.5,
            n_cells: 200,
            t_final: 0.038,
            snapshot_times: vec![0.038],
            boundary: BoundaryKind::ConstantExtrapolation,
            cfl: 0.45,
            mesh_speed_margin: 0.05,
            mesh_sign_policy: MeshPolicyKind::Alternate,
            seed: 0,
            initial: InitialData::Riemann {
                left_v: -10.0,
                left_w: -6.0,
                right_v: 110.0,
                right_w: 9.0,
                x_jump: 0.0,
            },
        },
        "2" => RunConfig {
            label: "test2".to_string(),
            m: 1.0,
            beta: 2.0 / 3.0,
            scheme: SchemeKind::RecNcc,
            x_lo: -1.0,
            x_hi: 1.0,
            n_cells: 200,
            t_final: 0.15,
            snapshot_times: vec![0.15],
            boundary: BoundaryKind::ConstantExtrapolation,
            cfl: 0.45,
            mesh_speed_margin: 0.05,
            mesh_sign_policy: MeshPolicyKind::Alternate,
            seed: 0,
            initial: InitialData::Riemann {
                left_v: 6.0,
                left_w: 1.0,
                right_v: -10.0,
                right_w: 2.0,
                x_jump: 0.0,
            },
        },
        "3a" | "3b" | "3c" => {
            let eps = match id {
                "3a" => 0.0,
                "3b" => 0.05,
                _ => 0.1,
            };
            // 600 cells per unit length; [-2, 1] keeps the left-moving pair
            // (speeds near -3) interior through t = 0.4.
            RunConfig {
                label: format!("test{id}"),
                m: 2.0,
                beta: 2.0 / 3.0,
                scheme: SchemeKind::RecNcc,
                x_lo: -2.0,
                x_hi: 1.0,
                n_cells: 1800,
                t_final: 0.4,
                snapshot_times: vec![0.4],
                boundary: BoundaryKind::ConstantExtrapolation,
                cfl: 0.45,
                mesh_speed_margin: 0.05,
                mesh_sign_policy: MeshPolicyKind::Alternate,
                seed: 0,
                initial: InitialData::Riemann {
                    left_v: 1.0,
                    left_w: 1.0 + eps,
                    right_v: -11.0,
                    right_w: -3.0,
                    x_jump: 0.0,
                },
            }
        }
        "4" | "4l" => {
            let long = id == "4l";
            RunConfig {
                label: format!("test{id}"),
                m: 1.0,
                beta: 0.95,
                scheme: SchemeKind::RecNc,
                x_lo: 0.0,
                x_hi: 1.0,
                n_cells: 1000,
                t_final: if long { 1.0 } else { 0.1 },
                snapshot_times: if long {
                    vec![0.015, 0.06, 0.1, 1.0]
                } else {
                    vec![0.015, 0.06, 0.1]
                },
                boundary: BoundaryKind::Periodic,
                cfl: 0.45,
                mesh_speed_margin: 0.05,
                mesh_sign_policy: MeshPolicyKind::Alternate,
                seed: 0,
                initial: InitialData::SineCosine {
                    v_amp: 3.0,
                    v_freq: 1.0,
                    w_base: 1.0,
                    w_amp: 3.0,
                    w_freq: 4.0,
                },
            }
        }
        "5" => RunConfig {
            label: "test5".to_string(),
            m: 0.05,
            beta: 1.0,
            scheme: SchemeKind::RecNc,
            x_lo: 0.0,
            x_hi: 1.0,
            n_cells: 2000,
            t_final: 40.0,
            snapshot_times: vec![20.0, 40.0],
            boundary: BoundaryKind::Periodic,
            cfl: 0.45,
            mesh_speed_margin: 0.05,
            mesh_sign_policy: MeshPolicyKind::Alternate,
            seed: 0,
            initial: InitialData::Plateaus {
                starts: vec![0.0, 0.3, 0.3 + 2.0 / 3.0],
                v: vec![0.3, 0.15, 0.1],
                w: vec![0.4, -0.2, 0.4],
            },
        },
        other => bail!("unknown test id {other:?}; known ids: {TEST_IDS:?}"),
    };
    cfg.validate().expect("builtin preset must validate");
    Ok(cfg)
}
