//! Algebra of the cubic-stress elastodynamics model.
//!
//! All of the closed forms below rely on the stress being exactly
//! `w^3 + m w`: chord slopes reduce to the polynomial
//! `wl^2 + wl wr + wr^2 + m`, and the companion-strain maps (the strains
//! reachable through sonic, zero-dissipation or kinetic shocks) are
//! linear in `w`.

use crate::math;
use core::fmt;

/// `sqrt(3)` to full f64 precision.
const SQRT_3: f64 = 1.732_050_807_568_877_2;

/// A pointwise state: velocity `v` and strain (deformation gradient) `w`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct State {
    pub v: f64,
    pub w: f64,
}

impl State {
    pub const fn new(v: f64, w: f64) -> Self {
        State { v, w }
    }
}

/// Characteristic family. Family one carries negative speeds
/// (`-sound_speed`), family two positive ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    One,
    Two,
}

impl Family {
    /// Sign of the family's wave speeds: -1 for family one, +1 for two.
    #[inline]
    pub fn sign(self) -> f64 {
        match self {
            Family::One => -1.0,
            Family::Two => 1.0,
        }
    }

    pub fn mirror(self) -> Self {
        match self {
            Family::One => Family::Two,
            Family::Two => Family::One,
        }
    }
}

/// Admissibility of a strain jump, in the orientation of a family-one
/// (left-to-right) shock. See [`ModelParams::classify_shock`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShockClass {
    /// Satisfies the chord (Liu) criterion; selected by classical theory.
    LiuClassical,
    /// Dissipates entropy but violates the chord criterion;
    /// undercompressive, only admitted through the kinetic relation.
    Nonclassical,
    /// Produces entropy; never part of an admissible solution.
    NotEntropySatisfying,
}

/// Invalid model parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParamError {
    /// The linear modulus must be strictly positive (strict hyperbolicity).
    NonpositiveModulus(f64),
    /// The kinetic slope must lie in `[1/2, 1]`: below the classical
    /// (sonic) limit nothing is undercompressive, above the
    /// zero-dissipation limit entropy would be produced.
    KineticSlopeOutOfRange(f64),
}

impl fmt::Display for ParamError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ParamError::NonpositiveModulus(m) => {
                write!(f, "linear modulus must be > 0, got {m}")
            }
            ParamError::KineticSlopeOutOfRange(b) => {
                write!(f, "kinetic slope must lie in [0.5, 1], got {b}")
            }
        }
    }
}

impl core::error::Error for ParamError {}

/// The jump `(left, right)` does not satisfy the jump relations for the
/// requested family to the stated tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NotAShock {
    /// Largest scaled residual of the two jump relations.
    pub residual: f64,
}

impl fmt::Display for NotAShock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "states are not connected by a shock (jump-relation residual {:.3e})",
            self.residual
        )
    }
}

impl core::error::Error for NotAShock {}

/// Strain reachable from `w` through a right-sonic shock: the shock from
/// `w` to `sonic_companion(w)` moves exactly at the downstream sound
/// speed. Jumps beyond it stop being Liu-admissible.
#[inline]
pub fn sonic_companion(w: f64) -> f64 {
    -0.5 * w
}

/// Functional inverse of [`sonic_companion`]: the shock from `w` to
/// `sonic_companion_inverse(w)` is left-sonic. Jumps at least this large
/// are Liu-admissible again.
#[inline]
pub fn sonic_companion_inverse(w: f64) -> f64 {
    -2.0 * w
}

/// Strain whose shock from `w` dissipates no entropy at all; the farthest
/// strain an entropy-satisfying shock from `w` can reach.
#[inline]
pub fn zero_dissipation_companion(w: f64) -> f64 {
    -w
}

/// Threshold companion deciding between a single transonic shock and a
/// classical + nonclassical pair: the shock from `w` to
/// `composite_threshold(w, w2)` moves exactly as fast as the one from `w`
/// to `w2` (the chord slopes agree).
#[inline]
pub fn composite_threshold(w: f64, w2: f64) -> f64 {
    -w - w2
}

/// Model parameters: linear modulus `m` and kinetic slope `beta`.
///
/// The kinetic relation selects, for every admissible nonclassical shock,
/// the downstream strain `-beta * w` (family one; mirrored for family
/// two). `beta = 1/2` reproduces the classical solver, `beta = 1` the
/// dissipationless extreme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    m: f64,
    beta: f64,
    /// `sqrt(m)`, cached for the hot integral path.
    sqrt_m: f64,
    /// `m / (2 sqrt(3))`, the log coefficient of the sound-speed integral.
    c_log_coeff: f64,
}

impl ModelParams {
    pub fn new(m: f64, beta: f64) -> Result<Self, ParamError> {
        if !(m > 0.0) {
            return Err(ParamError::NonpositiveModulus(m));
        }
        if !(0.5..=1.0).contains(&beta) {
            return Err(ParamError::KineticSlopeOutOfRange(beta));
        }
        Ok(ModelParams { m, beta, sqrt_m: math::sqrt(m), c_log_coeff: m / (2.0 * SQRT_3) })
    }

    #[inline]
    pub fn m(&self) -> f64 {
        self.m
    }

    #[inline]
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Stress `w^3 + m w`.
    #[inline]
    pub fn stress(&self, w: f64) -> f64 {
        w * w * w + self.m * w
    }

    /// `stress'(w) = 3 w^2 + m`, always >= m > 0.
    #[inline]
    pub fn stress_derivative(&self, w: f64) -> f64 {
        3.0 * w * w + self.m
    }

    /// Sound speed `sqrt(stress'(w))`.
    #[inline]
    pub fn sound_speed(&self, w: f64) -> f64 {
        math::sqrt(self.stress_derivative(w))
    }

    /// Squared shock speed between strains `wl`, `wr`: the chord slope of
    /// the stress, which for the cubic law is the polynomial
    /// `wl^2 + wl wr + wr^2 + m`. Evaluating the polynomial instead of
    /// the difference quotient avoids cancellation and extends
    /// continuously to `wl == wr` (squared sound speed). The association
    /// below is bitwise symmetric under argument swap.
    #[inline]
    pub fn shock_speed_squared(&self, wl: f64, wr: f64) -> f64 {
        wl * wl + wr * wr + wl * wr + self.m
    }

    /// Positive shock-speed magnitude `s(wl, wr) >= sqrt(m)`. Family-one
    /// shocks travel at `-s`, family-two shocks at `+s`.
    #[inline]
    pub fn shock_speed(&self, wl: f64, wr: f64) -> f64 {
        math::sqrt(self.shock_speed_squared(wl, wr))
    }

    /// Velocity of the right state of a family-one shock with left state
    /// `(v_left, w_left)` and right strain `w_right`.
    #[inline]
    pub fn hugoniot_forward_v(&self, w_right: f64, v_left: f64, w_left: f64) -> f64 {
        v_left + self.shock_speed(w_left, w_right) * (w_right - w_left)
    }

    /// Velocity of the left state of a family-two shock with right state
    /// `(v_right, w_right)` and left strain `w_left`.
    #[inline]
    pub fn hugoniot_backward_v(&self, w_left: f64, v_right: f64, w_right: f64) -> f64 {
        v_right - self.shock_speed(w_left, w_right) * (w_left - w_right)
    }

    /// Downstream strain `-beta * w` selected by the kinetic relation for
    /// a nonclassical shock in either family (upstream side for family
    /// one, downstream for family two; the map is the same).
    #[inline]
    pub fn kinetic_companion(&self, w: f64) -> f64 {
        -self.beta * w
    }

    /// Functional inverse of [`Self::kinetic_companion`].
    #[inline]
    pub fn kinetic_companion_inverse(&self, w: f64) -> f64 {
        -w / self.beta
    }

    /// Mathematical entropy `v^2/2 + w^4/4 + m w^2/2` (total energy).
    #[inline]
    pub fn entropy(&self, u: State) -> f64 {
        0.5 * u.v * u.v + 0.25 * u.w * u.w * u.w * u.w + 0.5 * self.m * u.w * u.w
    }

    /// Entropy flux `-v * stress(w)` associated with [`Self::entropy`].
    #[inline]
    pub fn entropy_flux(&self, u: State) -> f64 {
        -u.v * self.stress(u.w)
    }

    /// Antiderivative of the sound speed, `C(w) = int_0^w sqrt(3z^2+m) dz`,
    /// in closed form. `v - C(w)` is constant across family-one
    /// rarefactions and `v + C(w)` across family-two ones.
    pub fn sound_speed_integral(&self, w: f64) -> f64 {
        // reflect to w >= 0: the log argument then has no cancellation
        // and C(0) lands on exactly zero
        if w < 0.0 {
            return -self.sound_speed_integral(-w);
        }
        let root = math::sqrt(3.0 * w * w + self.m);
        0.5 * w * root + self.c_log_coeff * math::ln((SQRT_3 * w + root) / self.sqrt_m)
    }

    /// Entropy dissipated across the shock `(left, right)` of the given
    /// family: `speed * [entropy] - [entropy flux]`, non-positive exactly
    /// for admissible jumps. Errors if the states violate the jump
    /// relations by more than `1e-9` (scaled).
    pub fn entropy_dissipation(
        &self,
        left: State,
        right: State,
        family: Family,
    ) -> Result<f64, NotAShock> {
        self.entropy_dissipation_with_tol(left, right, family, 1e-9)
    }

    /// [`Self::entropy_dissipation`] with a caller-chosen relative bound
    /// on the jump-relation residuals.
    pub fn entropy_dissipation_with_tol(
        &self,
        left: State,
        right: State,
        family: Family,
        tol: f64,
    ) -> Result<f64, NotAShock> {
        let speed = family.sign() * self.shock_speed(left.w, right.w);
        let sl = self.stress(left.w);
        let sr = self.stress(right.w);
        let r1 = speed * (left.v - right.v) - (sr - sl);
        let r2 = speed * (left.w - right.w) - (right.v - left.v);
        let scale = [sl, sr, left.v, right.v, speed * left.w, speed * right.w]
            .iter()
            .fold(1.0f64, |a, &t| a.max(math::abs(t)));
        let residual = math::abs(r1).max(math::abs(r2)) / scale;
        if residual > tol {
            return Err(NotAShock { residual });
        }
        Ok(speed * (self.entropy(left) - self.entropy(right))
            - (self.entropy_flux(left) - self.entropy_flux(right)))
    }

    /// Classify the strain jump `w_left -> w_right` of a family-one
    /// shock. For family two swap the arguments (mirror symmetry).
    ///
    /// For the cubic stress the chord criterion and the entropy
    /// inequality reduce to quadratic inequalities: the jump is Liu
    /// whenever the strains lie on the same side with growing magnitude,
    /// or the jump reaches at least the inverse sonic companion; it still
    /// dissipates entropy (nonclassical) until the zero-dissipation
    /// companion.
    pub fn classify_shock(&self, w_left: f64, w_right: f64) -> ShockClass {
        debug_assert!(w_left != w_right, "classification needs a genuine jump");
        let p = w_left * w_right;
        let ll = w_left * w_left;
        if p >= ll || p <= -2.0 * ll {
            ShockClass::LiuClassical
        } else if p <= -ll {
            ShockClass::Nonclassical
        } else {
            ShockClass::NotEntropySatisfying
        }
    }

    /// Physical flux `(-stress(w), -v)` of the conservation form.
    #[inline]
    pub fn physical_flux(&self, u: State) -> (f64, f64) {
        (-self.stress(u.w), -u.v)
    }
}
