//! Exact Riemann solver honouring the kinetic relation.
//!
//! The solution of a Riemann problem is a fan of at most four elementary
//! waves: a family-one group (moving left) and a family-two group (moving
//! right), each consisting of a rarefaction, a classical shock, a single
//! transonic classical shock, or a classical wave paired with a
//! nonclassical shock. The strain `w` of the middle state is the root of
//! a strictly monotone scalar equation and is found by bisection; both
//! wave groups are then rebuilt around it.
//!
//! Velocity along the family-one curve is strictly increasing in the
//! middle strain and strictly decreasing along the family-two curve,
//! which guarantees a unique intersection.

use crate::math;
use crate::model::{Family, ModelParams, ShockClass, State};
use alloc::vec::Vec;
use core::fmt;

/// Nature of an elementary wave in a fan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveKind {
    /// Liu-admissible shock (including the single transonic case).
    ClassicalShock,
    /// Undercompressive shock selected by the kinetic relation.
    NonclassicalShock,
    /// Self-similar smooth wave.
    Rarefaction,
}

/// One elementary wave. For shocks `speed_lo == speed_hi`; rarefactions
/// span the closed speed interval `[speed_lo, speed_hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementaryWave {
    pub family: Family,
    pub kind: WaveKind,
    pub left: State,
    pub right: State,
    pub speed_lo: f64,
    pub speed_hi: f64,
}

impl ElementaryWave {
    fn is_degenerate(&self) -> bool {
        self.left.v == self.right.v && self.left.w == self.right.w
    }
}

/// Complete self-similar solution of a Riemann problem.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFan {
    pub left_data: State,
    pub right_data: State,
    /// State between the family-one and family-two groups. Equals
    /// `left_data`/`right_data` when the corresponding group is empty.
    pub middle: State,
    /// Waves ordered by speed, family one first. Degenerate (zero-jump)
    /// waves are dropped.
    pub waves: Vec<ElementaryWave>,
}

impl WaveFan {
    /// Fastest absolute wave speed in the fan (0 for a constant state).
    pub fn max_abs_speed(&self) -> f64 {
        self.waves
            .iter()
            .fold(0.0f64, |a, w| a.max(math::abs(w.speed_lo)).max(math::abs(w.speed_hi)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RiemannError {
    /// The wave curves did not intersect inside `|w| <= 1e6`. With the
    /// cubic stress both curves are unbounded and monotone, so this
    /// indicates corrupt (non-finite) input data.
    NoIntersection { left: State, right: State },
}

impl fmt::Display for RiemannError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RiemannError::NoIntersection { left, right } => write!(
                f,
                "wave curves through ({}, {}) and ({}, {}) have no intersection in |w| <= 1e6",
                left.v, left.w, right.v, right.w
            ),
        }
    }
}

impl core::error::Error for RiemannError {}

/// Structure of a one-family wave group, anchored at the known state.
/// Family one anchors on the left, family two on the right; the
/// inequalities are identical in the anchor strain by mirror symmetry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum GroupCase {
    /// Zero jump.
    Nothing,
    /// Single Liu shock, strain magnitude growing on the same side.
    ClassicalShock,
    /// Strain magnitude shrinking on the same side.
    Rarefaction,
    /// Sign-changing jump short of the kinetic threshold: rarefaction to
    /// the kinetic companion, then a nonclassical shock.
    RarefactionNonclassical,
    /// Sign-changing jump past the threshold, classical leg faster than
    /// the kinetic one: classical then nonclassical shock.
    ClassicalNonclassical,
    /// Sign-changing jump past the threshold with the speed ordering
    /// reversed (or tied): one transonic classical shock.
    TransonicClassical,
}

pub(crate) fn group_case(p: &ModelParams, w_anchor: f64, w_far: f64) -> GroupCase {
    if w_far == w_anchor {
        return GroupCase::Nothing;
    }
    if w_anchor == 0.0 {
        // every jump from zero strain is Liu-admissible
        return GroupCase::ClassicalShock;
    }
    let prod = w_anchor * w_far;
    if prod > w_anchor * w_anchor {
        return GroupCase::ClassicalShock;
    }
    if prod >= 0.0 {
        return GroupCase::Rarefaction;
    }
    if prod > w_anchor * p.kinetic_companion_inverse(w_anchor) {
        return GroupCase::RarefactionNonclassical;
    }
    let wd = p.kinetic_companion(w_far);
    // composite only if the classical leg is strictly faster; ties
    // collapse to the single transonic shock
    if p.shock_speed_squared(w_anchor, wd) > p.shock_speed_squared(wd, w_far) {
        GroupCase::ClassicalNonclassical
    } else {
        GroupCase::TransonicClassical
    }
}

/// True when the sign-changing family-one jump `w_anchor -> w_far`
/// resolves with a nonclassical shock rather than a single transonic
/// classical one (same test for family two, anchored on the right).
pub(crate) fn transonic_resolves_nonclassical(p: &ModelParams, w_anchor: f64, w_far: f64) -> bool {
    matches!(
        group_case(p, w_anchor, w_far),
        GroupCase::RarefactionNonclassical | GroupCase::ClassicalNonclassical
    )
}

/// Velocity reached by the family-one wave group from `left` when the
/// middle strain is `w_mid`. Strictly increasing in `w_mid`.
pub fn forward_curve_v(p: &ModelParams, left: State, w_mid: f64) -> f64 {
    match group_case(p, left.w, w_mid) {
        GroupCase::Nothing => left.v,
        GroupCase::ClassicalShock | GroupCase::TransonicClassical => {
            p.hugoniot_forward_v(w_mid, left.v, left.w)
        }
        GroupCase::Rarefaction => {
            left.v + p.sound_speed_integral(w_mid) - p.sound_speed_integral(left.w)
        }
        GroupCase::RarefactionNonclassical => {
            let wd = p.kinetic_companion(w_mid);
            let vd = left.v + p.sound_speed_integral(wd) - p.sound_speed_integral(left.w);
            p.hugoniot_forward_v(w_mid, vd, wd)
        }
        GroupCase::ClassicalNonclassical => {
            let wd = p.kinetic_companion(w_mid);
            let vd = p.hugoniot_forward_v(wd, left.v, left.w);
            p.hugoniot_forward_v(w_mid, vd, wd)
        }
    }
}

/// Velocity reached by the family-two wave group from `right` when the
/// middle strain is `w_mid`. Strictly decreasing in `w_mid`; mirror image
/// of [`forward_curve_v`] under `v -> -v`.
pub fn backward_curve_v(p: &ModelParams, right: State, w_mid: f64) -> f64 {
    match group_case(p, right.w, w_mid) {
        GroupCase::Nothing => right.v,
        GroupCase::ClassicalShock | GroupCase::TransonicClassical => {
            p.hugoniot_backward_v(w_mid, right.v, right.w)
        }
        GroupCase::Rarefaction => {
            right.v + p.sound_speed_integral(right.w) - p.sound_speed_integral(w_mid)
        }
        GroupCase::RarefactionNonclassical => {
            let wd = p.kinetic_companion(w_mid);
            let vd = right.v + p.sound_speed_integral(right.w) - p.sound_speed_integral(wd);
            p.hugoniot_backward_v(w_mid, vd, wd)
        }
        GroupCase::ClassicalNonclassical => {
            let wd = p.kinetic_companion(w_mid);
            let vd = p.hugoniot_backward_v(wd, right.v, right.w);
            p.hugoniot_backward_v(w_mid, vd, wd)
        }
    }
}

/// Both wave curves anchored at fixed Riemann data, with every
/// anchor-only subexpression precomputed. A bisection solve evaluates the
/// curves dozens of times at varying middle strains, so hoisting the
/// anchor terms (two integrals, the classification thresholds) out of the
/// loop cuts most of the transcendental work. Each branch repeats the
/// arithmetic of [`forward_curve_v`]/[`backward_curve_v`] operation for
/// operation, so the values are bit-identical to the plain curves; a unit
/// test enforces this.
struct CurvePair<'a> {
    p: &'a ModelParams,
    left: State,
    right: State,
    /// `C(left.w)`.
    c_left: f64,
    /// `right.v + C(right.w)`, the fused anchor sum of the backward
    /// rarefaction branches.
    rv_plus_c_right: f64,
    /// `w_anchor * w_anchor` per side.
    lw2: f64,
    rw2: f64,
    /// `w_anchor * kinetic_companion_inverse(w_anchor)` per side.
    lthr: f64,
    rthr: f64,
}

impl<'a> CurvePair<'a> {
    fn new(p: &'a ModelParams, left: State, right: State) -> Self {
        CurvePair {
            p,
            left,
            right,
            c_left: p.sound_speed_integral(left.w),
            rv_plus_c_right: right.v + p.sound_speed_integral(right.w),
            lw2: left.w * left.w,
            rw2: right.w * right.w,
            lthr: left.w * p.kinetic_companion_inverse(left.w),
            rthr: right.w * p.kinetic_companion_inverse(right.w),
        }
    }

    /// [`group_case`] with the anchor products supplied from the cache.
    fn classify(&self, w_anchor: f64, anchor2: f64, thr: f64, w_far: f64) -> GroupCase {
        if w_far == w_anchor {
            return GroupCase::Nothing;
        }
        if w_anchor == 0.0 {
            return GroupCase::ClassicalShock;
        }
        let prod = w_anchor * w_far;
        if prod > anchor2 {
            return GroupCase::ClassicalShock;
        }
        if prod >= 0.0 {
            return GroupCase::Rarefaction;
        }
        if prod > thr {
            return GroupCase::RarefactionNonclassical;
        }
        let wd = self.p.kinetic_companion(w_far);
        if self.p.shock_speed_squared(w_anchor, wd) > self.p.shock_speed_squared(wd, w_far) {
            GroupCase::ClassicalNonclassical
        } else {
            GroupCase::TransonicClassical
        }
    }

    fn fwd(&self, w_mid: f64) -> f64 {
        let p = self.p;
        match self.classify(self.left.w, self.lw2, self.lthr, w_mid) {
            GroupCase::Nothing => self.left.v,
            GroupCase::ClassicalShock | GroupCase::TransonicClassical => {
                p.hugoniot_forward_v(w_mid, self.left.v, self.left.w)
            }
            GroupCase::Rarefaction => {
                self.left.v + p.sound_speed_integral(w_mid) - self.c_left
            }
            GroupCase::RarefactionNonclassical => {
                let wd = p.kinetic_companion(w_mid);
                let vd = self.left.v + p.sound_speed_integral(wd) - self.c_left;
                p.hugoniot_forward_v(w_mid, vd, wd)
            }
            GroupCase::ClassicalNonclassical => {
                let wd = p.kinetic_companion(w_mid);
                let vd = p.hugoniot_forward_v(wd, self.left.v, self.left.w);
                p.hugoniot_forward_v(w_mid, vd, wd)
            }
        }
    }

    fn bwd(&self, w_mid: f64) -> f64 {
        let p = self.p;
        match self.classify(self.right.w, self.rw2, self.rthr, w_mid) {
            GroupCase::Nothing => self.right.v,
            GroupCase::ClassicalShock | GroupCase::TransonicClassical => {
                p.hugoniot_backward_v(w_mid, self.right.v, self.right.w)
            }
            GroupCase::Rarefaction => self.rv_plus_c_right - p.sound_speed_integral(w_mid),
            GroupCase::RarefactionNonclassical => {
                let wd = p.kinetic_companion(w_mid);
                let vd = self.rv_plus_c_right - p.sound_speed_integral(wd);
                p.hugoniot_backward_v(w_mid, vd, wd)
            }
            GroupCase::ClassicalNonclassical => {
                let wd = p.kinetic_companion(w_mid);
                let vd = p.hugoniot_backward_v(wd, self.right.v, self.right.w);
                p.hugoniot_backward_v(w_mid, vd, wd)
            }
        }
    }

    /// `fwd(w) - bwd(w)` with the midpoint integral shared between the
    /// sides when both need it at the same strain.
    fn diff(&self, w_mid: f64) -> f64 {
        let p = self.p;
        let case_f = self.classify(self.left.w, self.lw2, self.lthr, w_mid);
        let case_b = self.classify(self.right.w, self.rw2, self.rthr, w_mid);
        let c_mid = if case_f == GroupCase::Rarefaction || case_b == GroupCase::Rarefaction {
            p.sound_speed_integral(w_mid)
        } else {
            0.0
        };
        let c_wd = if case_f == GroupCase::RarefactionNonclassical
            || case_b == GroupCase::RarefactionNonclassical
        {
            p.sound_speed_integral(p.kinetic_companion(w_mid))
        } else {
            0.0
        };
        let f = match case_f {
            GroupCase::Nothing => self.left.v,
            GroupCase::ClassicalShock | GroupCase::TransonicClassical => {
                p.hugoniot_forward_v(w_mid, self.left.v, self.left.w)
            }
            GroupCase::Rarefaction => self.left.v + c_mid - self.c_left,
            GroupCase::RarefactionNonclassical => {
                let wd = p.kinetic_companion(w_mid);
                let vd = self.left.v + c_wd - self.c_left;
                p.hugoniot_forward_v(w_mid, vd, wd)
            }
            GroupCase::ClassicalNonclassical => {
                let wd = p.kinetic_companion(w_mid);
                let vd = p.hugoniot_forward_v(wd, self.left.v, self.left.w);
                p.hugoniot_forward_v(w_mid, vd, wd)
            }
        };
        let b = match case_b {
            GroupCase::Nothing => self.right.v,
            GroupCase::ClassicalShock | GroupCase::TransonicClassical => {
                p.hugoniot_backward_v(w_mid, self.right.v, self.right.w)
            }
            GroupCase::Rarefaction => self.rv_plus_c_right - c_mid,
            GroupCase::RarefactionNonclassical => {
                let wd = p.kinetic_companion(w_mid);
                let vd = self.rv_plus_c_right - c_wd;
                p.hugoniot_backward_v(w_mid, vd, wd)
            }
            GroupCase::ClassicalNonclassical => {
                let wd = p.kinetic_companion(w_mid);
                let vd = p.hugoniot_backward_v(wd, self.right.v, self.right.w);
                p.hugoniot_backward_v(w_mid, vd, wd)
            }
        };
        f - b
    }
}

fn shock(family: Family, kind: WaveKind, p: &ModelParams, left: State, right: State) -> ElementaryWave {
    let s = family.sign() * p.shock_speed(left.w, right.w);
    ElementaryWave { family, kind, left, right, speed_lo: s, speed_hi: s }
}

/// Family-one wave group from `left` down to middle strain `w_mid`.
/// Returns the waves (ordered by speed) and the arrival state.
fn build_forward_waves(p: &ModelParams, left: State, w_mid: f64) -> (Vec<ElementaryWave>, State) {
    let mut waves = Vec::with_capacity(2);
    let arrive = match group_case(p, left.w, w_mid) {
        GroupCase::Nothing => left,
        GroupCase::ClassicalShock | GroupCase::TransonicClassical => {
            let m = State::new(p.hugoniot_forward_v(w_mid, left.v, left.w), w_mid);
            waves.push(shock(Family::One, WaveKind::ClassicalShock, p, left, m));
            m
        }
        GroupCase::Rarefaction => {
            let m = State::new(
                left.v + p.sound_speed_integral(w_mid) - p.sound_speed_integral(left.w),
                w_mid,
            );
            waves.push(ElementaryWave {
                family: Family::One,
                kind: WaveKind::Rarefaction,
                left,
                right: m,
                speed_lo: -p.sound_speed(left.w),
                speed_hi: -p.sound_speed(w_mid),
            });
            m
        }
        GroupCase::RarefactionNonclassical => {
            let wd = p.kinetic_companion(w_mid);
            let d = State::new(
                left.v + p.sound_speed_integral(wd) - p.sound_speed_integral(left.w),
                wd,
            );
            waves.push(ElementaryWave {
                family: Family::One,
                kind: WaveKind::Rarefaction,
                left,
                right: d,
                speed_lo: -p.sound_speed(left.w),
                speed_hi: -p.sound_speed(wd),
            });
            let m = State::new(p.hugoniot_forward_v(w_mid, d.v, d.w), w_mid);
            waves.push(shock(Family::One, WaveKind::NonclassicalShock, p, d, m));
            m
        }
        GroupCase::ClassicalNonclassical => {
            let wd = p.kinetic_companion(w_mid);
            let d = State::new(p.hugoniot_forward_v(wd, left.v, left.w), wd);
            waves.push(shock(Family::One, WaveKind::ClassicalShock, p, left, d));
            let m = State::new(p.hugoniot_forward_v(w_mid, d.v, d.w), w_mid);
            waves.push(shock(Family::One, WaveKind::NonclassicalShock, p, d, m));
            m
        }
    };
    waves.retain(|w| !w.is_degenerate());
    (waves, arrive)
}

/// Family-two wave group ending at `right`, rising from middle strain
/// `w_mid`. Returns the waves (ordered by speed) and the middle state.
fn build_backward_waves(p: &ModelParams, right: State, w_mid: f64) -> (Vec<ElementaryWave>, State) {
    let mut waves = Vec::with_capacity(2);
    let middle = match group_case(p, right.w, w_mid) {
        GroupCase::Nothing => right,
        GroupCase::ClassicalShock | GroupCase::TransonicClassical => {
            let m = State::new(p.hugoniot_backward_v(w_mid, right.v, right.w), w_mid);
            waves.push(shock(Family::Two, WaveKind::ClassicalShock, p, m, right));
            m
        }
        GroupCase::Rarefaction => {
            let m = State::new(
                right.v + p.sound_speed_integral(right.w) - p.sound_speed_integral(w_mid),
                w_mid,
            );
            waves.push(ElementaryWave {
                family: Family::Two,
                kind: WaveKind::Rarefaction,
                left: m,
                right,
                speed_lo: p.sound_speed(w_mid),
                speed_hi: p.sound_speed(right.w),
            });
            m
        }
        GroupCase::RarefactionNonclassical => {
            let wd = p.kinetic_companion(w_mid);
            let d = State::new(
                right.v + p.sound_speed_integral(right.w) - p.sound_speed_integral(wd),
                wd,
            );
            let m = State::new(p.hugoniot_backward_v(w_mid, d.v, d.w), w_mid);
            waves.push(shock(Family::Two, WaveKind::NonclassicalShock, p, m, d));
            waves.push(ElementaryWave {
                family: Family::Two,
                kind: WaveKind::Rarefaction,
                left: d,
                right,
                speed_lo: p.sound_speed(wd),
                speed_hi: p.sound_speed(right.w),
            });
            m
        }
        GroupCase::ClassicalNonclassical => {
            let wd = p.kinetic_companion(w_mid);
            let d = State::new(p.hugoniot_backward_v(wd, right.v, right.w), wd);
            let m = State::new(p.hugoniot_backward_v(w_mid, d.v, d.w), w_mid);
            waves.push(shock(Family::Two, WaveKind::NonclassicalShock, p, m, d));
            waves.push(shock(Family::Two, WaveKind::ClassicalShock, p, d, right));
            m
        }
    };
    waves.retain(|w| !w.is_degenerate());
    (waves, middle)
}

/// Force the chain of a wave group to start (family two) or end (family
/// one) exactly at a known state, absorbing the solver tolerance so that
/// the fan's outer states match the data bitwise.
fn pin_first_left(waves: &mut [ElementaryWave], s: State) {
    if let Some(w) = waves.first_mut() {
        w.left = s;
    }
}

fn pin_last_right(waves: &mut [ElementaryWave], s: State) {
    if let Some(w) = waves.last_mut() {
        w.right = s;
    }
}

/// Solve the Riemann problem with data `(left, right)`.
///
/// Pure one-group data (the other group degenerate) is recognised up
/// front, which keeps exact shock data exact: a jump already satisfying
/// the jump relations and the kinetic relation comes back as that single
/// shock with the input states untouched. General data goes through
/// bisection on the middle strain (tolerance `1e-13`).
pub fn solve_riemann(p: &ModelParams, left: State, right: State) -> Result<WaveFan, RiemannError> {
    if left == right {
        return Ok(WaveFan { left_data: left, right_data: right, middle: left, waves: Vec::new() });
    }

    let near = |a: f64, b: f64| math::abs(a - b) <= 1e-12 * math::abs(b).max(1.0);
    let curves = CurvePair::new(p, left, right);

    // pure family-one data: the forward curve already passes through `right`
    if near(curves.fwd(right.w), right.v) {
        let (mut waves, _) = build_forward_waves(p, left, right.w);
        pin_last_right(&mut waves, right);
        return Ok(WaveFan { left_data: left, right_data: right, middle: right, waves });
    }
    // pure family-two data
    if near(curves.bwd(left.w), left.v) {
        let (mut waves, _) = build_backward_waves(p, right, left.w);
        pin_first_left(&mut waves, left);
        return Ok(WaveFan { left_data: left, right_data: right, middle: left, waves });
    }

    let g = |w: f64| curves.diff(w);

    // bracket the root; g is strictly increasing and unbounded both ways
    let mut lo = left.w.min(right.w) - 1.0;
    let mut hi = left.w.max(right.w) + 1.0;
    let mut step = hi - lo;
    let mut glo = g(lo);
    while glo > 0.0 {
        lo -= step;
        step *= 2.0;
        if lo < -1e6 {
            return Err(RiemannError::NoIntersection { left, right });
        }
        glo = g(lo);
    }
    step = hi - lo;
    let mut ghi = g(hi);
    while ghi < 0.0 {
        hi += step;
        step *= 2.0;
        if hi > 1e6 {
            return Err(RiemannError::NoIntersection { left, right });
        }
        ghi = g(hi);
    }

    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // interval no longer splittable in f64
        }
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let w_mid = 0.5 * (lo + hi);

    let (mut waves1, middle) = build_forward_waves(p, left, w_mid);
    let (mut waves2, _) = build_backward_waves(p, right, w_mid);
    // stitch the groups at the forward-anchored middle state; the
    // backward-anchored value differs by at most the solve tolerance
    pin_last_right(&mut waves1, middle);
    pin_first_left(&mut waves2, middle);
    let mut waves = waves1;
    waves.append(&mut waves2);
    // when one group degenerates the fan must still end bitwise on the
    // data; for non-degenerate groups these are no-ops
    pin_first_left(&mut waves, left);
    pin_last_right(&mut waves, right);
    Ok(WaveFan { left_data: left, right_data: right, middle, waves })
}

/// State inside a rarefaction at ray `xi` (between `speed_lo` and
/// `speed_hi`): invert `|speed| = sound_speed(w)` on the proper branch
/// and recover `v` from the Riemann invariant.
fn rarefaction_state(p: &ModelParams, wave: &ElementaryWave, xi: f64) -> State {
    let c = wave.family.sign() * xi; // positive inside the wave
    let w2 = ((c * c - p.m()) / 3.0).max(0.0);
    let w = if wave.left.w + wave.right.w >= 0.0 { math::sqrt(w2) } else { -math::sqrt(w2) };
    let v = match wave.family {
        Family::One => {
            wave.left.v + p.sound_speed_integral(w) - p.sound_speed_integral(wave.left.w)
        }
        Family::Two => {
            wave.left.v + p.sound_speed_integral(wave.left.w) - p.sound_speed_integral(w)
        }
    };
    State::new(v, w)
}

/// Evaluate the self-similar solution at ray `xi = x / t`. At a
/// discontinuity the right limit is returned.
pub fn sample_fan(p: &ModelParams, fan: &WaveFan, xi: f64) -> State {
    let mut current = fan.left_data;
    for wave in &fan.waves {
        if xi < wave.speed_lo {
            return current;
        }
        if xi < wave.speed_hi {
            return rarefaction_state(p, wave, xi);
        }
        current = wave.right;
    }
    current
}

/// Defect reported by [`check_fan`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FanDefect {
    SpeedsOutOfOrder,
    BrokenAdjacency,
    FamilyOutOfOrder,
    JumpRelationViolated,
    InadmissibleShock,
    KineticRelationViolated,
    EntropyProduced,
    RarefactionInvariantViolated,
    RarefactionEdgeSpeedWrong,
}

impl fmt::Display for FanDefect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FanDefect::SpeedsOutOfOrder => "wave speeds out of order",
            FanDefect::BrokenAdjacency => "wave endpoints do not chain",
            FanDefect::FamilyOutOfOrder => "family-two wave precedes family-one",
            FanDefect::JumpRelationViolated => "shock violates the jump relations",
            FanDefect::InadmissibleShock => "classical shock fails the chord criterion",
            FanDefect::KineticRelationViolated => "nonclassical shock violates the kinetic relation",
            FanDefect::EntropyProduced => "shock produces entropy",
            FanDefect::RarefactionInvariantViolated => "rarefaction invariant drifts",
            FanDefect::RarefactionEdgeSpeedWrong => "rarefaction edge speed mismatch",
        };
        f.write_str(s)
    }
}

impl core::error::Error for FanDefect {}

/// Audit a fan against the model: speed ordering, endpoint chaining,
/// jump relations and admissibility of every shock, the kinetic relation
/// on nonclassical shocks, non-positive dissipation, and constancy of
/// the Riemann invariant along rarefactions. `tol` is a relative
/// tolerance (`1e-9` is appropriate for solver output).
pub fn check_fan(p: &ModelParams, fan: &WaveFan, tol: f64) -> Result<(), FanDefect> {
    let scale = [fan.left_data.v, fan.left_data.w, fan.right_data.v, fan.right_data.w, fan.middle.v]
        .iter()
        .fold(1.0f64, |a, &t| a.max(math::abs(t)));
    let close = |a: f64, b: f64| math::abs(a - b) <= tol * scale.max(math::abs(a)).max(math::abs(b));

    let mut prev_hi = f64::NEG_INFINITY;
    let mut prev_state = fan.left_data;
    let mut seen_family_two = false;
    for wave in &fan.waves {
        if wave.speed_lo > wave.speed_hi || wave.speed_lo < prev_hi - tol * scale {
            return Err(FanDefect::SpeedsOutOfOrder);
        }
        if !(close(wave.left.v, prev_state.v) && close(wave.left.w, prev_state.w)) {
            return Err(FanDefect::BrokenAdjacency);
        }
        match wave.family {
            Family::One => {
                if seen_family_two {
                    return Err(FanDefect::FamilyOutOfOrder);
                }
            }
            Family::Two => seen_family_two = true,
        }
        match wave.kind {
            WaveKind::Rarefaction => {
                let cl = wave.family.sign() * p.sound_speed(wave.left.w);
                let cr = wave.family.sign() * p.sound_speed(wave.right.w);
                if !(close(wave.speed_lo, cl) && close(wave.speed_hi, cr)) {
                    return Err(FanDefect::RarefactionEdgeSpeedWrong);
                }
                // family one keeps v - C(w), family two keeps v + C(w)
                let inv = |u: State| u.v + wave.family.sign() * p.sound_speed_integral(u.w);
                if !close(inv(wave.left), inv(wave.right)) {
                    return Err(FanDefect::RarefactionInvariantViolated);
                }
            }
            WaveKind::ClassicalShock | WaveKind::NonclassicalShock => {
                let d = match p.entropy_dissipation(wave.left, wave.right, wave.family) {
                    Ok(d) => d,
                    Err(_) => return Err(FanDefect::JumpRelationViolated),
                };
                let d_scale = p.shock_speed(wave.left.w, wave.right.w)
                    * (math::abs(p.entropy(wave.left)) + math::abs(p.entropy(wave.right)))
                    + math::abs(p.entropy_flux(wave.left))
                    + math::abs(p.entropy_flux(wave.right));
                if d > tol * d_scale.max(1.0) {
                    return Err(FanDefect::EntropyProduced);
                }
                let s = wave.family.sign() * p.shock_speed(wave.left.w, wave.right.w);
                if !close(wave.speed_lo, s) {
                    return Err(FanDefect::JumpRelationViolated);
                }
                // orient the strain jump like a family-one shock
                let (wu, wd) = match wave.family {
                    Family::One => (wave.left.w, wave.right.w),
                    Family::Two => (wave.right.w, wave.left.w),
                };
                match wave.kind {
                    WaveKind::ClassicalShock => {
                        if p.classify_shock(wu, wd) == ShockClass::NotEntropySatisfying {
                            return Err(FanDefect::InadmissibleShock);
                        }
                    }
                    WaveKind::NonclassicalShock => {
                        if p.classify_shock(wu, wd) == ShockClass::NotEntropySatisfying {
                            return Err(FanDefect::InadmissibleShock);
                        }
                        if !close(wu, p.kinetic_companion(wd)) {
                            return Err(FanDefect::KineticRelationViolated);
                        }
                    }
                    WaveKind::Rarefaction => unreachable!(),
                }
            }
        }
        prev_hi = wave.speed_hi;
        prev_state = wave.right;
    }
    if !(close(prev_state.v, fan.right_data.v) && close(prev_state.w, fan.right_data.w)) {
        return Err(FanDefect::BrokenAdjacency);
    }
    Ok(())
}
