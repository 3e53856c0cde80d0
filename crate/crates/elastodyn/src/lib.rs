//! One-dimensional nonlinear elastodynamics with nonclassical shocks.
//!
//! The system is `v_t - stress(w)_x = 0`, `w_t - v_x = 0` with the cubic
//! stress `stress(w) = w^3 + m w`, `m > 0`. Because the stress is
//! non-convex, entropy-satisfying weak solutions are not unique: besides
//! the classical (Liu-admissible) shocks the system supports
//! undercompressive "nonclassical" shocks selected by a kinetic relation.
//!
//! This crate provides
//! * the algebra of the model ([`model`]): stress law, shock speeds,
//!   jump relations, kinetic companions, entropy dissipation;
//! * an exact Riemann solver honouring the kinetic relation ([`riemann`]);
//! * a finite-volume scheme on a translating mesh that represents detected
//!   shocks as sub-cell discontinuities and propagates isolated
//!   kinetic-compatible shocks exactly ([`scheme`]);
//! * Glimm (random choice) and Godunov reference schemes ([`reference`]).
//!
//! The crate is `no_std`-compatible (requires `alloc`); the `std` feature
//! (on by default) only switches the float math from `libm` to the
//! standard library intrinsics.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub(crate) mod math;
pub mod model;
pub mod reference;
pub mod riemann;
pub mod scheme;

pub use model::{Family, ModelParams, ShockClass, State};
pub use reference::{godunov_step, FanCache, GlimmSimulator, RngStream};
pub use riemann::{
    check_fan, sample_fan, solve_riemann, ElementaryWave, FanDefect, RiemannError, WaveFan,
    WaveKind,
};
pub use scheme::{
    detect, reconstruct, step, Boundary, Detection, DetectionMode, MeshSignPolicy, Reconstruction,
    SchemeConfig, StepReport, UniformGrid,
};
