//! Membership tests, boundary tracing, and bound formulas for the rate
//! region machinery built on top of the closed forms in [`crate::gaussian`]:
//!
//! * the single-layer inner region (each encoder sends one description,
//!   decoders estimate by conditional expectation),
//! * the joint-decoder region at a fixed joint distortion and its three-piece
//!   boundary,
//! * the exact characterization slices available when one side distortion is
//!   trivial or both side demands are mild,
//! * an entropy-power outer bound with its excess-sum-rate function λ,
//! * the symmetric equal-rate distortion tradeoff (inner curve and outer
//!   floors),
//! * the one-sided extreme case (unlimited rate for encoder 2), and
//! * the centralized-encoder multiple description region.
//!
//! Unless a function explicitly consumes the noise correlation (only
//! [`noisy_md_contains`] does, through the joint estimation floor), the
//! formulas here assume independent observation noises and reject problems
//! with nonzero correlation.
//!
//! All rates are in nats. Membership margins are signed slacks of the most
//! binding constraint: rate constraints contribute slacks in nats, distortion
//! constraints in variance units; a point is inside when the margin is at
//! least `-1e-7`.

use crate::error::{Error, Result};
use crate::gaussian::{
    d3_star_sumrate, derived_constants, rate_noisy, require_independent, DerivedConstants,
    GaussianProblem, RdPoint,
};
use crate::numerics::{golden_max, grid_refine_max, linspace, log_grid, mixtures, scalar_root};
use crate::scalar::Real;

/// Constraint slack below which a point is reported as outside a region.
pub const MEMBERSHIP_TOL: f64 = 1e-7;

/// Width to which golden-section refinement narrows search brackets.
const REFINE_TOL: f64 = 1e-10;

/// Endpoints and size of the default log grid over test-channel variances.
const GRID_LO: f64 = 1e-6;
const GRID_HI: f64 = 1e6;
const GRID_POINTS: usize = 512;

/// Rate cap substituted for infinite description rates during searches.
const RATE_CAP: f64 = 60.0;

/// Outcome of a region membership query.
#[derive(Debug, Clone, PartialEq)]
pub struct MembershipResult<T, W> {
    /// Whether the point lies in the region (margin ≥ -1e-7).
    pub contains: bool,
    /// Parameters achieving every constraint, when the point is inside.
    pub witness: Option<W>,
    /// Smallest signed constraint slack over the best parameters found.
    pub margin: T,
}

impl<T: Real, W> MembershipResult<T, W> {
    /// Builds a result from the best margin, keeping the witness only for
    /// contained points.
    fn from_margin(margin: T, witness: W) -> Self {
        let contains = margin >= -T::lit(MEMBERSHIP_TOL);
        MembershipResult { contains, witness: contains.then(|| witness), margin }
    }
}

/// Split rates (r_i1 toward the source, r_i2 toward the observation noise)
/// parametrizing the outer bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OuterParams<T> {
    /// Source-directed rate share of encoder 1.
    pub r11: T,
    /// Noise-directed rate share of encoder 1.
    pub r12: T,
    /// Source-directed rate share of encoder 2.
    pub r21: T,
    /// Noise-directed rate share of encoder 2.
    pub r22: T,
}

impl<T: Real> OuterParams<T> {
    /// Signed slacks of the two per-encoder split-rate constraints.
    pub fn split_slacks(&self, p: &GaussianProblem<T>) -> (T, T) {
        let x = p.sigma_x2;
        let s1 = T::half() * (x * (T::one() / x + noise_term(p.sigma_n1_2, self.r12))).ln()
            - self.r11;
        let s2 = T::half() * (x * (T::one() / x + noise_term(p.sigma_n2_2, self.r22))).ln()
            - self.r21;
        (s1, s2)
    }
}

/// Witness for outer-bound membership: the split rates together with the
/// crosstalk variance ζ and the excess sum rate λ they induce.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OuterWitness<T> {
    /// Split rates satisfying every outer-bound constraint.
    pub params: OuterParams<T>,
    /// Residual cross-description variance ζ at those split rates.
    pub zeta: T,
    /// Excess sum-rate penalty λ at those split rates.
    pub lambda_val: T,
    /// Interior maximizer of the auxiliary-noise sweep, when one exists.
    pub sigma_m2_hat: Option<T>,
}

/// Tag naming which boundary piece a traced point belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegmentLabel {
    /// Vertex curve where encoder 1 codes without binning.
    A,
    /// Timesharing segment on the minimal-sum-rate face.
    B,
    /// Vertex curve where encoder 2 codes without binning.
    C,
    /// Smooth tradeoff portion of a distortion boundary.
    Curve,
    /// Straight floor portion of a distortion boundary.
    Floor,
}

/// Ordered boundary samples with a per-point segment tag.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryPolyline<T> {
    /// Sampled (R₁, R₂) or (D₁, D₂) pairs, sorted by the first coordinate.
    pub points: Vec<(T, T)>,
    /// Segment tag of each point, aligned with `points`.
    pub labels: Vec<SegmentLabel>,
}

/// Where the supremum over the auxiliary noise variance σ_M² is attained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LambdaCase {
    /// Attained in the σ_M² → ∞ limit; the penalty vanishes.
    SupAtInfinity,
    /// Attained at an interior stationary point σ̂_M².
    SupInterior,
    /// Attained at σ_M² = 0.
    SupAtZero,
}

/// Excess sum-rate penalty value with its attaining case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaOuter<T> {
    /// Penalty λ in nats (≥ 0).
    pub value: T,
    /// Which endpoint or interior point attains the supremum.
    pub case: LambdaCase,
    /// Interior maximizer σ̂_M², present only in the interior case.
    pub sigma_m2_hat: Option<T>,
    /// True when a shifted distortion exceeded its ceiling and was clamped.
    pub clamped: bool,
}

/// Slack of `available ≥ needed` that stays well defined for infinite rates.
fn rate_slack<T: Real>(available: T, needed: T) -> T {
    if needed.is_infinite() {
        if available.is_infinite() {
            T::infinity()
        } else {
            T::neg_infinity()
        }
    } else {
        available - needed
    }
}

/// Smallest of three slacks.
fn min3<T: Real>(a: T, b: T, c: T) -> T {
    a.min(b).min(c)
}

/// The term (1 - e^{-2r})/n, with the noiseless-observation limit made
/// explicit: zero rate constrains nothing, positive rate removes the cap.
fn noise_term<T: Real>(n: T, r: T) -> T {
    if n == T::zero() {
        if r > T::zero() {
            T::infinity()
        } else {
            T::zero()
        }
    } else {
        (T::one() - (-T::lit(2.0) * r).exp()) / n
    }
}

/// Tests whether a point is achievable by the single-description scheme in
/// which each encoder quantizes its observation once and every decoder takes
/// conditional expectations.
///
/// The minimal admissible test variance at rate R_i is
/// (σ_X² + σ_N_i²)/(e^{2R_i} - 1); all three distortions are increasing in
/// the test variances, so checking the distortion constraints at the minima
/// decides membership exactly. The margin is the smallest distortion slack
/// (variance units); the witness is the minimal test-variance pair.
pub fn ippr_contains<T: Real>(
    p: &GaussianProblem<T>,
    point: &RdPoint<T>,
) -> Result<MembershipResult<T, (T, T)>> {
    require_independent(p, "single-description membership")?;
    let x = p.sigma_x2;
    let two = T::lit(2.0);
    let t1 = (x + p.sigma_n1_2) / ((two * point.r1).exp() - T::one());
    let t2 = (x + p.sigma_n2_2) / ((two * point.r2).exp() - T::one());
    let inv1 = T::one() / (p.sigma_n1_2 + t1);
    let inv2 = T::one() / (p.sigma_n2_2 + t2);
    let d1 = T::one() / (T::one() / x + inv1);
    let d2 = T::one() / (T::one() / x + inv2);
    let d3 = T::one() / (T::one() / x + inv1 + inv2);
    let margin = min3(point.d1 - d1, point.d2 - d2, point.d3 - d3);
    Ok(MembershipResult::from_margin(margin, (t1, t2)))
}

/// Single-description rate for one encoder at test variance `t`
/// (+∞ marks an absent description).
fn single_description_rate<T: Real>(p: &GaussianProblem<T>, enc: usize, t: T) -> Result<T> {
    if t.is_infinite() {
        return Ok(T::zero());
    }
    Ok(T::half() * ((p.sigma_x2 + p.noise_var(enc)? + t) / t).ln())
}

/// Boundary of the single-description scheme's rate region at joint
/// distortion `d3`, with both side distortions left trivial.
///
/// The first test variance sweeps a log grid; the second is pinned to the
/// joint-distortion equality. Where one description alone reaches `d3` the
/// trace starts at the corresponding axis point. Points are sorted by R₁.
pub fn ippr_boundary<T: Real>(
    p: &GaussianProblem<T>,
    d3: T,
    n_samples: usize,
) -> Result<BoundaryPolyline<T>> {
    require_independent(p, "single-description boundary")?;
    let c = derived_constants(p)?;
    if !(d3 > c.d3_min) {
        return Err(Error::InfeasibleDistortion(format!(
            "boundary degenerates at or below the joint floor {}",
            c.d3_min
        )));
    }
    if n_samples < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 samples, got {n_samples}"
        )));
    }
    if d3 >= p.sigma_x2 {
        return Ok(BoundaryPolyline {
            points: vec![(T::zero(), T::zero())],
            labels: vec![SegmentLabel::Curve],
        });
    }
    let x = p.sigma_x2;
    // Largest first variance still admitting a finite partner, and the
    // variance at which the first description alone reaches d3.
    let q2 = T::one() / d3 - T::one() / x - T::one() / p.sigma_n2_2;
    let hi = if q2 > T::zero() {
        (T::one() / q2 - p.sigma_n1_2) * (T::one() - T::lit(1e-9))
    } else {
        T::lit(GRID_HI)
    };
    let solo = T::one() / (T::one() / d3 - T::one() / x) - p.sigma_n1_2;
    let lo = if solo > T::lit(GRID_LO) { solo } else { T::lit(GRID_LO) };
    if !(lo < hi) {
        return Err(Error::InfeasibleDistortion(format!(
            "no admissible test variances at joint distortion {d3}"
        )));
    }
    let mut points = Vec::with_capacity(n_samples);
    for &t1 in log_grid(lo, hi, n_samples).iter() {
        let t2 = match joint_equality_partner(p, d3, t1) {
            Some(t2) => t2,
            None => continue,
        };
        points.push((
            single_description_rate(p, 1, t1)?,
            single_description_rate(p, 2, t2)?,
        ));
    }
    points.reverse();
    let labels = vec![SegmentLabel::Curve; points.len()];
    Ok(BoundaryPolyline { points, labels })
}

/// Conditional and joint rate floors of the single-layer scheme at fixed
/// test variances (+∞ marks an absent description): returns
/// (I(Y₁;W₁|W₂), I(Y₂;W₂|W₁), I(Y₁,Y₂;W₁,W₂)).
fn single_layer_bounds<T: Real>(p: &GaussianProblem<T>, t1: T, t2: T) -> (T, T, T) {
    let x = p.sigma_x2;
    let half = T::half();
    match (t1.is_finite(), t2.is_finite()) {
        (false, false) => (T::zero(), T::zero(), T::zero()),
        (true, false) => {
            let b = half * ((x + p.sigma_n1_2 + t1) / t1).ln();
            (b, T::zero(), b)
        }
        (false, true) => {
            let b = half * ((x + p.sigma_n2_2 + t2) / t2).ln();
            (T::zero(), b, b)
        }
        (true, true) => {
            let a1 = x + p.sigma_n1_2 + t1;
            let a2 = x + p.sigma_n2_2 + t2;
            let det = a1 * a2 - x * x;
            (
                half * (det / (t1 * a2)).ln(),
                half * (det / (t2 * a1)).ln(),
                half * (det / (t1 * t2)).ln(),
            )
        }
    }
}

/// Smallest second test variance meeting the joint distortion `d3` when the
/// first channel uses `t1`: +∞ when the first description already suffices,
/// `None` when even a noiseless second description cannot reach `d3`.
fn joint_equality_partner<T: Real>(p: &GaussianProblem<T>, d3: T, t1: T) -> Option<T> {
    let x = p.sigma_x2;
    let need = T::one() / d3 - T::one() / x - T::one() / (p.sigma_n1_2 + t1);
    if need <= T::zero() {
        return Some(T::infinity());
    }
    let total = T::one() / need;
    if total <= p.sigma_n2_2 {
        None
    } else {
        Some(total - p.sigma_n2_2)
    }
}

/// Same as [`joint_equality_partner`] with the encoder roles swapped.
fn joint_equality_partner_rev<T: Real>(p: &GaussianProblem<T>, d3: T, t2: T) -> Option<T> {
    let x = p.sigma_x2;
    let need = T::one() / d3 - T::one() / x - T::one() / (p.sigma_n2_2 + t2);
    if need <= T::zero() {
        return Some(T::infinity());
    }
    let total = T::one() / need;
    if total <= p.sigma_n1_2 {
        None
    } else {
        Some(total - p.sigma_n1_2)
    }
}

/// Tests whether (r1, r2) can deliver joint distortion `d3` when both side
/// distortions are left trivial.
///
/// Sweeps the first test variance over a log grid; the second is pinned to
/// the joint-distortion equality (interior pairs only relax distortion, not
/// the rate floors) or to +∞ where the first description already suffices.
/// The margin is the smallest rate slack in nats; the witness is the best
/// test-variance pair.
pub fn ceo_contains<T: Real>(
    p: &GaussianProblem<T>,
    r1: T,
    r2: T,
    d3: T,
) -> Result<MembershipResult<T, (T, T)>> {
    require_independent(p, "joint-decoder membership")?;
    for (name, r) in [("r1", r1), ("r2", r2)] {
        if !(r >= T::zero()) {
            return Err(Error::InvalidArgument(format!(
                "rate {name} must be nonnegative, got {r}"
            )));
        }
    }
    if !(d3 > T::zero()) {
        return Err(Error::InvalidArgument(format!("distortion must be positive, got {d3}")));
    }
    let c = derived_constants(p)?;
    if d3 < c.d3_min {
        return Err(Error::InfeasibleDistortion(format!(
            "joint distortion {d3} below the floor {}",
            c.d3_min
        )));
    }
    let x = p.sigma_x2;
    if d3 >= x {
        let inf = T::infinity();
        return Ok(MembershipResult::from_margin(r1.min(r2), (inf, inf)));
    }

    let margin_at = |t1: T| -> T {
        match joint_equality_partner(p, d3, t1) {
            None => T::neg_infinity(),
            Some(t2) => {
                let (b1, b2, bs) = single_layer_bounds(p, t1, t2);
                min3(r1 - b1, r2 - b2, r1 + r2 - bs)
            }
        }
    };

    let mut grid = log_grid(T::lit(GRID_LO), T::lit(GRID_HI), GRID_POINTS);
    // The switch point where the second description becomes unnecessary is a
    // kink of the margin; sample it exactly when it lies in range.
    let t1_switch = T::one() / (T::one() / d3 - T::one() / x) - p.sigma_n1_2;
    if t1_switch > T::lit(GRID_LO) && t1_switch < T::lit(GRID_HI) {
        grid.push(t1_switch);
        grid.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    }
    let (t1_best, mut best) = grid_refine_max(margin_at, &grid, 5, T::lit(REFINE_TOL))?;
    let mut witness = (t1_best, joint_equality_partner(p, d3, t1_best).unwrap_or(T::infinity()));

    // Absent first description, evaluated exactly rather than at the grid cap.
    let m_inf = margin_at(T::infinity());
    if m_inf > best {
        best = m_inf;
        witness =
            (T::infinity(), joint_equality_partner(p, d3, T::infinity()).unwrap_or(T::infinity()));
    }
    Ok(MembershipResult::from_margin(best, witness))
}

/// Rate corners of the single-layer region at fixed finite test variances:
/// the first corner lets encoder 1 code unconditionally, the second swaps the
/// roles. Both corners share the same sum rate.
pub fn ceo_vertices<T: Real>(
    p: &GaussianProblem<T>,
    t1: T,
    t2: T,
) -> Result<((T, T), (T, T))> {
    require_independent(p, "single-layer vertices")?;
    for (name, t) in [("t1", t1), ("t2", t2)] {
        if !(t > T::zero()) || !t.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "test variance {name} must be positive and finite, got {t}"
            )));
        }
    }
    Ok(vertices_at(p, t1, t2))
}

/// Vertex pair (E₁, E₂) without argument validation; used by the boundary
/// tracer where one variance may be infinite at a sweep endpoint.
fn vertices_at<T: Real>(p: &GaussianProblem<T>, t1: T, t2: T) -> ((T, T), (T, T)) {
    let half = T::half();
    let full1 = if t1.is_finite() {
        half * ((p.sigma_x2 + p.sigma_n1_2 + t1) / t1).ln()
    } else {
        T::zero()
    };
    let full2 = if t2.is_finite() {
        half * ((p.sigma_x2 + p.sigma_n2_2 + t2) / t2).ln()
    } else {
        T::zero()
    };
    let (cond1, cond2, _) = single_layer_bounds(p, t1, t2);
    ((full1, cond2), (cond1, full2))
}

/// Traces the lower-left boundary of the joint-decoder rate region at `d3`:
/// curve C (encoder 2 unconditional), segment B (minimal-sum-rate face), and
/// curve A (encoder 1 unconditional), each sampled with `n_samples` points
/// and sorted by R₁. Adjacent segments share their junction points exactly.
pub fn ceo_boundary<T: Real>(
    p: &GaussianProblem<T>,
    d3: T,
    n_samples: usize,
) -> Result<BoundaryPolyline<T>> {
    require_independent(p, "joint-decoder boundary")?;
    if n_samples < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 samples per segment, got {n_samples}"
        )));
    }
    let c = derived_constants(p)?;
    if !(d3 > c.d3_min) {
        return Err(Error::InfeasibleDistortion(format!(
            "boundary degenerates at or below the joint floor {}",
            c.d3_min
        )));
    }
    let x = p.sigma_x2;
    if !(d3 < x) {
        return Err(Error::InvalidArgument(format!(
            "joint distortion {d3} at or above the source variance has no boundary"
        )));
    }

    let inv_gap = T::one() / d3 - T::one() / x;
    let clamp = x * T::lit(1e-9);
    let t1_lo = (T::one() / inv_gap - p.sigma_n1_2).max(clamp);
    let t2_lo = (T::one() / inv_gap - p.sigma_n2_2).max(clamp);

    // Minimal joint sum rate along the joint-distortion equality curve.
    let neg_sum = |t1: T| -> T {
        match joint_equality_partner(p, d3, t1) {
            None => T::neg_infinity(),
            Some(t2) => -single_layer_bounds(p, t1, t2).2,
        }
    };
    let grid = log_grid(t1_lo, T::lit(GRID_HI).max(t1_lo * T::lit(10.0)), GRID_POINTS);
    let (tau1, _) = grid_refine_max(neg_sum, &grid, 5, T::lit(REFINE_TOL))?;
    let tau2 = joint_equality_partner(p, d3, tau1).ok_or_else(|| {
        Error::InvalidArgument("sum-rate search left the feasible equality curve".into())
    })?;
    let (f1, f2) = vertices_at(p, tau1, tau2);

    let mut points = Vec::with_capacity(3 * n_samples);
    let mut labels = Vec::with_capacity(3 * n_samples);

    // Curve C: encoder-2-unconditional vertices, R1 ascending with t2.
    for &t2 in log_grid(t2_lo, tau2, n_samples).iter() {
        let t1 = joint_equality_partner_rev(p, d3, t2).unwrap_or(T::infinity());
        points.push(vertices_at(p, t1, t2).1);
        labels.push(SegmentLabel::C);
    }
    // Segment B: timesharing across the minimal-sum-rate face.
    for pt in mixtures(f2, f1, n_samples) {
        points.push(pt);
        labels.push(SegmentLabel::B);
    }
    // Curve A: encoder-1-unconditional vertices, R1 ascending as t1 shrinks.
    for &t1 in log_grid(t1_lo, tau1, n_samples).iter().rev() {
        let t2 = joint_equality_partner(p, d3, t1).unwrap_or(T::infinity());
        points.push(vertices_at(p, t1, t2).0);
        labels.push(SegmentLabel::A);
    }
    Ok(BoundaryPolyline { points, labels })
}

/// Largest coarse test variances under which meeting both side distortions
/// still guarantees the joint decoder reaches `d3`; +∞ when a side is
/// unconstrained by the joint demand.
pub fn tilde_sigmas<T: Real>(p: &GaussianProblem<T>, d3: T) -> Result<(T, T)> {
    require_independent(p, "side-variance ceilings")?;
    let c = derived_constants(p)?;
    if d3 < c.d3_min {
        return Err(Error::InfeasibleDistortion(format!(
            "joint distortion {d3} below the floor {}",
            c.d3_min
        )));
    }
    let x = p.sigma_x2;
    if d3 > x {
        return Err(Error::InvalidArgument(format!(
            "joint distortion {d3} above the source variance {x}"
        )));
    }
    let (n1, n2) = (p.sigma_n1_2, p.sigma_n2_2);
    let cond = T::lit(2.0) / n1.max(n2) + T::one() / d3 - T::one() / c.d3_min;
    let per_encoder = |n_own: T, d_own_min: T, d_other_min: T, better: bool| -> T {
        if cond >= T::zero() {
            (n_own / c.d3_min - n_own / d3)
                / (T::one() / n_own - T::one() / d_other_min + T::one() / d3)
        } else if better {
            (n_own / d_own_min - n_own / d3) / (T::one() / d3 - T::one() / x)
        } else {
            T::infinity()
        }
    };
    Ok((
        per_encoder(n1, c.d1_min, c.d2_min, n1 < n2),
        per_encoder(n2, c.d2_min, c.d1_min, n2 < n1),
    ))
}

/// Side distortion reached through observation noise `n` at coarse test
/// variance `t`, written so `t = +∞` yields the source variance.
fn side_distortion_cap<T: Real>(x: T, n: T, t: T) -> T {
    x / (T::one() + x / (n + t))
}

/// Decides membership on the three slices where the region is known exactly.
///
/// Item 1 covers points with a trivial second side distortion and `d1` below
/// the ceiling induced by [`tilde_sigmas`]: membership is joint-decoder
/// membership plus the decoder-1 rate floor. Item 2 mirrors it. Item 3, with
/// both side distortions below their ceilings, reduces to the two rate
/// floors. Points outside the covered slices are rejected as not applicable.
pub fn partial_char_contains<T: Real>(
    p: &GaussianProblem<T>,
    point: &RdPoint<T>,
    item: u8,
) -> Result<MembershipResult<T, (T, T)>> {
    require_independent(p, "exact-slice membership")?;
    let c = derived_constants(p)?;
    let x = p.sigma_x2;
    let (t1_tilde, t2_tilde) = tilde_sigmas(p, point.d3)?;
    let ub1 = side_distortion_cap(x, p.sigma_n1_2, t1_tilde);
    let ub2 = side_distortion_cap(x, p.sigma_n2_2, t2_tilde);

    let check_range = |name: &str, d: T, lo: T, ub: T| -> Result<()> {
        if d < lo || d > ub {
            return Err(Error::NotApplicable(format!(
                "{name}={d} outside the covered range [{lo}, {ub}]"
            )));
        }
        Ok(())
    };
    let floor_slack = |enc: usize, d: T, r: T| -> T {
        match rate_noisy(p, enc, d) {
            Ok(clamped) => rate_slack(r, clamped.value),
            Err(_) => rate_slack(r, T::infinity()),
        }
    };

    match item {
        1 => {
            if point.d2 < x {
                return Err(Error::NotApplicable(format!(
                    "slice requires a trivial second side distortion, got d2={}",
                    point.d2
                )));
            }
            check_range("d1", point.d1, c.d1_min, ub1)?;
            let ceo = ceo_contains(p, point.r1, point.r2, point.d3)?;
            let margin = ceo.margin.min(floor_slack(1, point.d1, point.r1));
            Ok(MembershipResult::from_margin(
                margin,
                ceo.witness.unwrap_or((T::infinity(), T::infinity())),
            ))
        }
        2 => {
            if point.d1 < x {
                return Err(Error::NotApplicable(format!(
                    "slice requires a trivial first side distortion, got d1={}",
                    point.d1
                )));
            }
            check_range("d2", point.d2, c.d2_min, ub2)?;
            let ceo = ceo_contains(p, point.r1, point.r2, point.d3)?;
            let margin = ceo.margin.min(floor_slack(2, point.d2, point.r2));
            Ok(MembershipResult::from_margin(
                margin,
                ceo.witness.unwrap_or((T::infinity(), T::infinity())),
            ))
        }
        3 => {
            check_range("d1", point.d1, c.d1_min, ub1)?;
            check_range("d2", point.d2, c.d2_min, ub2)?;
            let margin =
                floor_slack(1, point.d1, point.r1).min(floor_slack(2, point.d2, point.r2));
            let mut res = MembershipResult::from_margin(margin, (T::nan(), T::nan()));
            res.witness = None;
            Ok(res)
        }
        other => Err(Error::InvalidArgument(format!(
            "characterization item must be 1, 2, or 3, got {other}"
        ))),
    }
}

/// Auxiliary-noise objective whose supremum over σ_M² is the excess
/// sum-rate penalty: ½ ln[(d_X+σ_M²)(ζ+σ_M²)/((d1+σ_M²)(d2+σ_M²))].
pub fn lambda_eta<T: Real>(sigma_m2: T, d1: T, d2: T, zeta: T, d_x: T) -> T {
    T::half()
        * ((d_x + sigma_m2) * (zeta + sigma_m2) / ((d1 + sigma_m2) * (d2 + sigma_m2))).ln()
}

/// Closed-form supremum of [`lambda_eta`] over σ_M² ∈ [0, ∞], assuming
/// arguments already clamped into 0 ≤ d_i ≤ d_X, ζ ≥ 0.
fn lambda_core<T: Real>(d_x: T, d1: T, d2: T, zeta: T) -> (T, LambdaCase, Option<T>) {
    let half = T::half();
    if zeta <= d1 + d2 - d_x {
        return (T::zero(), LambdaCase::SupAtInfinity, None);
    }
    if zeta == T::zero() && (d1 == T::zero() || d2 == T::zero()) {
        // Degenerate corner where the generic case formulas lose meaning:
        // the objective climbs toward σ_M² → 0 with a finite or infinite cap.
        let value = if d1 == T::zero() && d2 == T::zero() {
            T::infinity()
        } else {
            half * (d_x / d1.max(d2)).ln()
        };
        return (value, LambdaCase::SupAtZero, None);
    }
    let threshold = T::one() / (T::one() / d1 + T::one() / d2 - T::one() / d_x);
    if zeta >= threshold {
        return (half * (d_x * zeta / (d1 * d2)).ln(), LambdaCase::SupAtZero, None);
    }
    // Interior stationary point; the case conditions keep every radicand
    // nonnegative (ζ < threshold ≤ min(d1, d2) ≤ d_X).
    let root = ((d_x - d1) * (d_x - d2) * (d1 - zeta) * (d2 - zeta)).sqrt();
    let hat = (d1 * d2 - d_x * zeta + root) / (d_x + zeta - d1 - d2);
    let bracket = ((d_x - d1) * (d_x - d2)).sqrt() - ((d1 - zeta) * (d2 - zeta)).sqrt();
    let gap = d_x - zeta;
    let value = half * (gap * gap / (gap * gap - bracket * bracket)).ln();
    (value.max(T::zero()), LambdaCase::SupInterior, Some(hat))
}

/// Excess sum-rate penalty of the outer bound for shifted distortions
/// (d1, d2) and crosstalk variance ζ, maximized over the auxiliary noise.
///
/// Shifted distortions above the estimator variance carry no constraint and
/// are clamped (flagged in the result).
pub fn lambda_outer<T: Real>(
    c: &DerivedConstants<T>,
    d1: T,
    d2: T,
    zeta: T,
) -> Result<LambdaOuter<T>> {
    for (name, v) in [("d1", d1), ("d2", d2), ("zeta", zeta)] {
        if !(v >= T::zero()) {
            return Err(Error::InvalidArgument(format!(
                "{name} must be nonnegative, got {v}"
            )));
        }
    }
    let clamped = d1 > c.d_x || d2 > c.d_x;
    let (value, case, hat) = lambda_core(c.d_x, d1.min(c.d_x), d2.min(c.d_x), zeta);
    Ok(LambdaOuter { value, case, sigma_m2_hat: hat, clamped })
}

/// Tests a point against the entropy-power outer bound.
///
/// Infinite rates are capped at 60 nats. The noise-directed shares are fixed
/// to their maxima r_i2 = R_i - r_i1 (raising r_i2 loosens every constraint
/// it enters), leaving a 2-D search over the source-directed shares: an
/// inner golden-section pass over r11 under an outer refined grid over r21.
/// The margin mixes rate slacks (nats) with reciprocal-variance slacks from
/// the split-rate cap, which is harmless at the membership tolerance.
pub fn qout_contains<T: Real>(
    p: &GaussianProblem<T>,
    point: &RdPoint<T>,
) -> Result<MembershipResult<T, OuterWitness<T>>> {
    require_independent(p, "outer-bound membership")?;
    if p.sigma_n1_2 == T::zero() && p.sigma_n2_2 == T::zero() {
        return Err(Error::InvalidProblem(
            "outer bound needs at least one noisy observation".into(),
        ));
    }
    let c = derived_constants(p)?;
    let x = p.sigma_x2;
    let half = T::half();
    let tiny = T::lit(1e-300);

    let cap1 = point.r1.min(T::lit(RATE_CAP));
    let cap2 = point.r2.min(T::lit(RATE_CAP));
    let lo1 = (half * (x / point.d1).ln()).max(T::zero());
    let lo2 = (half * (x / point.d2).ln()).max(T::zero());
    if lo1 > cap1 || lo2 > cap2 {
        let margin = (cap1 - lo1).min(cap2 - lo2);
        return Ok(MembershipResult { contains: false, witness: None, margin });
    }

    // Shifted distortions for the penalty; demanding less than the joint
    // estimation floor drives the penalty to +∞ through the tiny clamp.
    let d1s = (point.d1 - c.d3_min).max(tiny).min(c.d_x);
    let d2s = (point.d2 - c.d3_min).max(tiny).min(c.d_x);
    // ζ carries the factors D_3,min/σ_N_i², finite even for one noiseless
    // observation when written through the closed form below.
    let s = x * p.sigma_n1_2 + x * p.sigma_n2_2 + p.sigma_n1_2 * p.sigma_n2_2;
    let ratio1 = x * p.sigma_n2_2 / s;
    let ratio2 = x * p.sigma_n1_2 / s;
    let c3 = half * (x / point.d3).ln();
    let two = T::lit(2.0);

    let margin_at = |r11: T, r21: T| -> T {
        let r12 = cap1 - r11;
        let r22 = cap2 - r21;
        let m_split1 =
            half * (x * (T::one() / x + noise_term(p.sigma_n1_2, r12))).ln() - r11;
        let m_split2 =
            half * (x * (T::one() / x + noise_term(p.sigma_n2_2, r22))).ln() - r21;
        let g = T::one() / x
            + noise_term(p.sigma_n1_2, r12)
            + noise_term(p.sigma_n2_2, r22);
        let m_d3 = half * (point.d3 * g).ln();
        let zeta = point.d3 * (ratio1 * (-two * r12).exp() + ratio2 * (-two * r22).exp());
        let (lambda_val, _, _) = lambda_core(c.d_x, d1s, d2s, zeta);
        let m_sum = rate_slack(r11 + r21, c3 + lambda_val);
        min3(m_split1, m_split2, m_d3).min(m_sum)
    };

    // Coarse pass: accept early when a comfortably interior witness exists.
    let tol = T::lit(MEMBERSHIP_TOL);
    let coarse1 = linspace(lo1, cap1, 17);
    let coarse2 = linspace(lo2, cap2, 17);
    let mut best = (T::neg_infinity(), lo1, lo2);
    for &a in &coarse1 {
        for &b in &coarse2 {
            let m = margin_at(a, b);
            if m > best.0 {
                best = (m, a, b);
            }
        }
    }
    if best.0 < T::lit(1e-3) {
        // Thorough pass: the margin is quasiconcave in r11 at fixed r21.
        let over_r21 = |r21: T| golden_max(|r11| margin_at(r11, r21), lo1, cap1, T::lit(REFINE_TOL)).1;
        let grid = linspace(lo2, cap2, 257);
        let (r21_best, m) = grid_refine_max(over_r21, &grid, 5, T::lit(REFINE_TOL))?;
        let (r11_best, m_inner) =
            golden_max(|r11| margin_at(r11, r21_best), lo1, cap1, T::lit(REFINE_TOL));
        if m_inner.max(m) > best.0 {
            best = (m_inner.max(m), r11_best, r21_best);
        }
    }

    let (margin, r11, r21) = best;
    let contains = margin >= -tol;
    let witness = contains.then(|| {
        let r12 = cap1 - r11;
        let r22 = cap2 - r21;
        let zeta = point.d3 * (ratio1 * (-two * r12).exp() + ratio2 * (-two * r22).exp());
        let (lambda_val, _, hat) = lambda_core(c.d_x, d1s, d2s, zeta);
        OuterWitness {
            params: OuterParams { r11, r12, r21, r22 },
            zeta,
            lambda_val,
            sigma_m2_hat: hat,
        }
    });
    Ok(MembershipResult { contains, witness, margin })
}

/// Closed-form floors of the outer bound for the symmetric equal-rate
/// distortion tradeoff.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OuterFloors<T> {
    /// Lower bound on D₁ + D₂.
    pub sum_floor: T,
    /// Lower bound on each D_i separately.
    pub individual_floor: T,
}

impl<T: Real> OuterFloors<T> {
    /// True when (d1, d2) satisfies both floors.
    pub fn contains(&self, d1: T, d2: T) -> bool {
        let tol = T::lit(MEMBERSHIP_TOL);
        d1 + d2 >= self.sum_floor - tol
            && d1 >= self.individual_floor - tol
            && d2 >= self.individual_floor - tol
    }
}

/// Outer-bound floors on the side distortions at equal rates (R, R) when the
/// joint decoder runs at its minimal distortion.
pub fn d12_outer<T: Real>(p: &GaussianProblem<T>, r: T) -> Result<OuterFloors<T>> {
    if !p.symmetric() {
        return Err(Error::InvalidArgument(
            "equal-rate distortion floors require equal noise variances".into(),
        ));
    }
    require_independent(p, "equal-rate distortion floors")?;
    if !(r > T::zero()) {
        return Err(Error::InvalidArgument(format!("rate must be positive, got {r}")));
    }
    let d3s = d3_star_sumrate(p, T::lit(2.0) * r)?;
    Ok(OuterFloors {
        sum_floor: d3s + p.sigma_x2,
        individual_floor: (p.sigma_x2 * d3s).sqrt(),
    })
}

/// Inner-bound boundary of the side-distortion tradeoff at equal rates
/// (R, R) with the joint decoder at its minimal distortion, sampled into a
/// polyline sorted by D₁. The two endpoints sit on the straight floors; the
/// interior is the strictly convex timesharing curve.
pub fn d12_inner_curve<T: Real>(
    p: &GaussianProblem<T>,
    r: T,
    n_samples: usize,
) -> Result<BoundaryPolyline<T>> {
    if !p.symmetric() {
        return Err(Error::InvalidArgument(
            "equal-rate distortion curve requires equal noise variances".into(),
        ));
    }
    require_independent(p, "equal-rate distortion curve")?;
    if !(r > T::zero()) {
        return Err(Error::InvalidArgument(format!("rate must be positive, got {r}")));
    }
    if n_samples < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 samples per branch, got {n_samples}"
        )));
    }
    let x = p.sigma_x2;
    let n = p.sigma_n1_2;
    let two = T::lit(2.0);
    let d3s = d3_star_sumrate(p, two * r)?;
    let k = two * d3s * x - x * n + d3s * n;
    let r_star = T::half() * (T::lit(4.0) * d3s * x * x / ((x + d3s) * k)).ln();
    if !(r_star <= r) {
        return Err(Error::InvalidArgument(format!(
            "refinement split rate {r_star} exceeds the description rate {r}"
        )));
    }
    let phi = |z: T| (k * (two * (two * r - z)).exp() - two * d3s * x) / (x - d3s);
    let phi_mirror = phi(two * r - r_star);

    let mut points = Vec::with_capacity(2 * n_samples - 1);
    // Left branch: timeshare a pure-refinement split at rate μ against the
    // opposite extreme point; D₁ ascends from φ(R) to the diagonal junction.
    for &mu in linspace(r, two * r - r_star, n_samples).iter() {
        let a = (r - mu) / (r_star - mu);
        let b = (r_star - r) / (r_star - mu);
        points.push((a * x + b * phi(mu), a * phi_mirror + b * x));
    }
    // Right branch: the mirrored family carries D₁ on to the opposite floor.
    for &mu in linspace(r_star, r, n_samples).iter().skip(1) {
        let a = (r - r_star) / (two * r - r_star - mu);
        let b = (r - mu) / (two * r - r_star - mu);
        points.push((a * x + b * phi_mirror, a * phi(two * r - mu) + b * x));
    }
    let last = points.len() - 1;
    let labels = (0..points.len())
        .map(|i| if i == 0 || i == last { SegmentLabel::Floor } else { SegmentLabel::Curve })
        .collect();
    Ok(BoundaryPolyline { points, labels })
}

/// Minimal rate for encoder 1 when encoder 2 has unlimited rate, as a
/// function of the decoder-1 and joint distortions. Demanding the joint
/// floor exactly returns +∞.
pub fn extreme_min_rate<T: Real>(p: &GaussianProblem<T>, d1: T, d3: T) -> Result<T> {
    require_independent(p, "one-sided extreme rate")?;
    let c = derived_constants(p)?;
    if d3 < c.d3_min {
        return Err(Error::InfeasibleDistortion(format!(
            "joint distortion {d3} below the floor {}",
            c.d3_min
        )));
    }
    let x = p.sigma_x2;
    if d1 < c.d1_min {
        return Err(Error::RateInfinite(format!(
            "side distortion {d1} below the single-observation floor {}",
            c.d1_min
        )));
    }
    if d1 > x {
        return Err(Error::InvalidArgument(format!(
            "side distortion {d1} above the source variance {x}"
        )));
    }
    let n2 = p.sigma_n2_2;
    if d3 > d1 * n2 / (d1 + n2) {
        return Ok(rate_noisy(p, 1, d1)?.value);
    }
    let n1 = p.sigma_n1_2;
    let s = x * n1 + x * n2 + n1 * n2;
    let num = x * x * n2 * n2;
    let den = (n2 + d1) * s * (d3 - c.d3_min);
    Ok(T::half() * (num / den).ln())
}

/// Tests a point against the multiple description region of the centralized
/// problem in which both encoders see both observations; the observation
/// noises shift every distortion by the joint estimation floor. The witness
/// carries the excess-sum-rate term and its case.
pub fn noisy_md_contains<T: Real>(
    p: &GaussianProblem<T>,
    point: &RdPoint<T>,
) -> Result<MembershipResult<T, LambdaOuter<T>>> {
    let c = derived_constants(p)?;
    let half = T::half();
    for (name, d) in [("d1", point.d1), ("d2", point.d2), ("d3", point.d3)] {
        if d < c.d3_min {
            return Err(Error::InfeasibleDistortion(format!(
                "{name}={d} below the joint estimation floor {}",
                c.d3_min
            )));
        }
    }
    let shift = |d: T| if d.is_infinite() { c.d_x } else { (d - c.d3_min).min(c.d_x) };
    let (d1, d2, d3) = (shift(point.d1), shift(point.d2), shift(point.d3));
    let floor = |d: T| {
        if d == T::zero() {
            T::infinity()
        } else {
            half * (c.d_x / d).ln()
        }
    };
    let (gamma, case, hat) = lambda_core(c.d_x, d1, d2, d3);
    let m1 = rate_slack(point.r1, floor(d1));
    let m2 = rate_slack(point.r2, floor(d2));
    let m_sum = rate_slack(point.r1 + point.r2, floor(d3) + gamma);
    let margin = min3(m1, m2, m_sum);
    Ok(MembershipResult::from_margin(
        margin,
        LambdaOuter { value: gamma, case, sigma_m2_hat: hat, clamped: false },
    ))
}

/// Parametric chord-region curves for symmetric problems: returns the
/// points ((x₁, y₁), (x₂, y₂)) traced at parameter `alpha` by the lower and
/// upper boundary curves.
fn omega_curves<T: Real>(p: &GaussianProblem<T>, alpha: T) -> ((T, T), (T, T)) {
    let x = p.sigma_x2;
    let n = p.sigma_n1_2;
    let half = T::half();
    let two = T::lit(2.0);
    let u = (T::one() - (-two * alpha).exp()) / n;
    let single = half * (T::one() / x + u).ln();
    let double = half * (T::one() / x + two * u).ln();
    let direct = single + half * x.ln() + alpha;
    let cross = double - single + alpha;
    ((direct, cross), (cross, direct))
}

/// Tests whether (r1, r2) lies between the two parametric boundary curves of
/// the equal-sum-rate chord region for a symmetric problem. The region is
/// closed; boundary points are contained.
pub fn omega_contains<T: Real>(p: &GaussianProblem<T>, r1: T, r2: T) -> Result<bool> {
    if !p.symmetric() {
        return Err(Error::InvalidArgument(
            "chord region requires equal noise variances".into(),
        ));
    }
    require_independent(p, "chord region")?;
    if p.sigma_n1_2 == T::zero() {
        return Err(Error::InvalidArgument(
            "chord region degenerates for noiseless observations".into(),
        ));
    }
    if r1 < T::zero() || r2 < T::zero() {
        return Ok(false);
    }
    // Both horizontal parametrizations start at 0 and increase strictly, so
    // the parameters can be recovered by bisection after bracketing.
    let invert = |horizontal: &dyn Fn(T) -> T| -> Result<T> {
        let mut hi = T::one();
        let mut guard = 0;
        while horizontal(hi) < r1 && guard < 200 {
            hi = hi * T::lit(2.0);
            guard += 1;
        }
        scalar_root(|a| horizontal(a) - r1, T::zero(), hi, T::lit(1e-12))
    };
    let a1 = invert(&|a| omega_curves(p, a).0 .0)?;
    let a2 = invert(&|a| omega_curves(p, a).1 .0)?;
    let lower = omega_curves(p, a1).0 .1;
    let upper = omega_curves(p, a2).1 .1;
    let slack = T::lit(1e-9);
    Ok(r2 >= lower - slack && r2 <= upper + slack)
}

/// Smallest joint distortion guaranteed achievable when both side decoders
/// operate exactly on their rate-distortion curves: (1/d1 + 1/d2 - 1/σ_X²)⁻¹.
pub fn corollary2_bound<T: Real>(p: &GaussianProblem<T>, d1: T, d2: T) -> Result<T> {
    for (name, d) in [("d1", d1), ("d2", d2)] {
        if !(d > T::zero()) {
            return Err(Error::InvalidArgument(format!(
                "distortion {name} must be positive, got {d}"
            )));
        }
    }
    Ok(T::one() / (T::one() / d1 + T::one() / d2 - T::one() / p.sigma_x2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::TestChannelParams;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn unit_problem() -> GaussianProblem<f64> {
        GaussianProblem::independent(1.0, 1.0, 1.0).unwrap()
    }

    fn point(r1: f64, r2: f64, d1: f64, d2: f64, d3: f64) -> RdPoint<f64> {
        RdPoint::new(r1, r2, d1, d2, d3).unwrap()
    }

    #[test]
    fn ippr_accepts_reference_point() {
        let p = unit_problem();
        let res = ippr_contains(&p, &point(1.0, 1.0, 0.568, 0.568, 0.397)).unwrap();
        assert!(res.contains);
        let (t1, t2) = res.witness.unwrap();
        assert_abs_diff_eq!(t1, 2.0 / (2.0_f64.exp() - 1.0), epsilon = 1e-15);
        assert_abs_diff_eq!(t1, 0.3130352854993312, epsilon = 1e-9);
        assert_abs_diff_eq!(t2, t1, epsilon = 1e-15);
    }

    #[test]
    fn ippr_zero_rate_point_is_free() {
        let p = unit_problem();
        let res = ippr_contains(&p, &point(0.0, 0.0, 1.0, 1.0, 1.0)).unwrap();
        assert!(res.contains);
        assert!(res.margin.abs() < 1e-12);
    }

    #[test]
    fn ippr_rejects_distortion_below_its_rate_curve() {
        let p = unit_problem();
        let res = ippr_contains(&p, &point(1.0, 1.0, 0.5, 1.0, 1.0)).unwrap();
        assert!(!res.contains);
    }

    #[test]
    fn ippr_symmetric_joint_threshold_matches_closed_form() {
        let p = unit_problem();
        let r = 0.5 * 7.0_f64.ln();
        assert!(ippr_contains(&p, &point(r, r, 1.0, 1.0, 0.4)).unwrap().contains);
        assert!(!ippr_contains(&p, &point(r - 1e-3, r, 1.0, 1.0, 0.4)).unwrap().contains);
    }

    #[test]
    fn ceo_accepts_vertex_and_rejects_below_sum() {
        let p = unit_problem();
        let r1 = 0.5 * 7.0_f64.ln();
        let r2 = 0.5 * (40.0 / 7.0_f64).ln();
        let res = ceo_contains(&p, r1, r2, 0.4).unwrap();
        assert!(res.contains);
        assert!(res.margin.abs() < 1e-7);

        let short = 0.5 * (0.5 * 40.0_f64.ln() - 0.05);
        assert!(!ceo_contains(&p, short, short, 0.4).unwrap().contains);
    }

    #[test]
    fn ceo_trivial_and_infeasible_demands() {
        let p = unit_problem();
        assert!(ceo_contains(&p, 0.0, 0.0, 1.0).unwrap().contains);
        assert!(ceo_contains(&p, 0.3, 0.1, 1.5).unwrap().contains);
        assert!(matches!(
            ceo_contains(&p, 1.0, 1.0, 0.3),
            Err(Error::InfeasibleDistortion(_))
        ));
    }

    #[test]
    fn ceo_one_sided_points_work() {
        let p = unit_problem();
        // Encoder 2 silent: need 1/d3 = 1/x + 1/(n1 + t1).
        let d3 = 0.6_f64;
        let t1 = 1.0 / (1.0 / d3 - 1.0) - 1.0;
        let r1 = 0.5 * ((2.0 + t1) / t1).ln();
        let res = ceo_contains(&p, r1, 0.0, d3).unwrap();
        assert!(res.contains, "margin {}", res.margin);
        assert!(!ceo_contains(&p, r1 - 1e-3, 0.0, d3).unwrap().contains);
    }

    #[test]
    fn ceo_matches_brute_two_dimensional_search() {
        let p = unit_problem();
        let d3 = 0.45;
        for &(r1, r2) in &[(0.9, 0.55), (1.1, 0.3), (0.7, 0.7), (1.6, 0.05)] {
            let fast = ceo_contains(&p, r1, r2, d3).unwrap();
            // Brute force over the feasible band: any pair at or below the
            // equality partner meets the joint distortion.
            let mut brute = f64::NEG_INFINITY;
            for &t1 in log_grid(1e-4, 1e4, 400).iter() {
                if let Some(t2_max) = joint_equality_partner(&p, d3, t1) {
                    for &t2 in log_grid(1e-6, t2_max.min(1e6), 60).iter() {
                        let (b1, b2, bs) = single_layer_bounds(&p, t1, t2);
                        brute = brute.max(min3(r1 - b1, r2 - b2, r1 + r2 - bs));
                    }
                    let (b1, b2, bs) = single_layer_bounds(&p, t1, t2_max);
                    brute = brute.max(min3(r1 - b1, r2 - b2, r1 + r2 - bs));
                }
            }
            // No feasible sample may beat the reported margin, and the
            // reported margin must be approached at brute-grid resolution.
            assert!(brute <= fast.margin + 1e-9, "brute {brute} > fast {}", fast.margin);
            assert!(fast.margin - brute < 5e-3, "fast {} >> brute {brute}", fast.margin);
            if brute > 1e-4 {
                assert!(fast.contains);
            } else if brute < -1e-2 {
                assert!(!fast.contains);
            }
        }
    }

    #[test]
    fn vertices_match_reference_values() {
        let p = unit_problem();
        let (e1, e2) = ceo_vertices(&p, 1.0 / 3.0, 1.0 / 3.0).unwrap();
        assert_abs_diff_eq!(e1.0, 0.5 * 7.0_f64.ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(e1.1, 0.5 * (40.0 / 7.0_f64).ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(e2.0, e1.1, epsilon = 1e-12);
        assert_abs_diff_eq!(e2.1, e1.0, epsilon = 1e-12);
    }

    #[test]
    fn vertices_reject_absent_descriptions() {
        let p = unit_problem();
        assert!(ceo_vertices(&p, 1.0 / 3.0, f64::INFINITY).is_err());
        assert!(ceo_vertices(&p, 0.0, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn vertex_sums_agree(
            x in 0.3f64..4.0,
            n1 in 0.2f64..3.0,
            n2 in 0.2f64..3.0,
            t1 in 0.05f64..20.0,
            t2 in 0.05f64..20.0,
        ) {
            let p = GaussianProblem::independent(x, n1, n2).unwrap();
            let (e1, e2) = ceo_vertices(&p, t1, t2).unwrap();
            prop_assert!((e1.0 + e1.1 - e2.0 - e2.1).abs() < 1e-9);
            let (_, _, bs) = single_layer_bounds(&p, t1, t2);
            prop_assert!((e1.0 + e1.1 - bs).abs() < 1e-9);
        }
    }

    #[test]
    fn boundary_minimum_sum_matches_closed_form() {
        let p = unit_problem();
        let b = ceo_boundary(&p, 0.4, 64).unwrap();
        let min_sum = b
            .points
            .iter()
            .map(|&(a, c)| a + c)
            .fold(f64::INFINITY, f64::min);
        assert_abs_diff_eq!(min_sum, 0.5 * 40.0_f64.ln(), epsilon = 1e-6);
    }

    #[test]
    fn boundary_segments_are_ordered_and_glued() {
        let p = unit_problem();
        let b = ceo_boundary(&p, 0.4, 32).unwrap();
        for w in b.points.windows(2) {
            assert!(w[1].0 >= w[0].0 - 1e-12);
        }
        let first_b = b.labels.iter().position(|&l| l == SegmentLabel::B).unwrap();
        let last_b = b.labels.iter().rposition(|&l| l == SegmentLabel::B).unwrap();
        assert_eq!(b.labels[first_b - 1], SegmentLabel::C);
        assert_eq!(b.labels[last_b + 1], SegmentLabel::A);
        let gap_left = (b.points[first_b].0 - b.points[first_b - 1].0).abs()
            + (b.points[first_b].1 - b.points[first_b - 1].1).abs();
        let gap_right = (b.points[last_b].0 - b.points[last_b + 1].0).abs()
            + (b.points[last_b].1 - b.points[last_b + 1].1).abs();
        assert!(gap_left < 1e-6, "gap {gap_left}");
        assert!(gap_right < 1e-6, "gap {gap_right}");
        // At 0.4 neither observation reaches the demand alone, so both tails
        // climb toward unbounded rates instead of touching the axes.
        assert!(b.points.first().unwrap().1 > 5.0);
        assert!(b.points.last().unwrap().0 > 5.0);

        // Above the single-observation floor 0.5 the tails hit the axes: a
        // silent peer leaves the whole demand to one description.
        let easy = ceo_boundary(&p, 0.55, 32).unwrap();
        let start = easy.points.first().unwrap();
        let end = easy.points.last().unwrap();
        assert_abs_diff_eq!(start.0, 0.0, epsilon = 1e-9);
        let t_alone = 1.0_f64 / (1.0 / 0.55 - 1.0) - 1.0;
        let r_alone = 0.5 * ((2.0 + t_alone) / t_alone).ln();
        assert_abs_diff_eq!(start.1, r_alone, epsilon = 1e-9);
        assert_abs_diff_eq!(end.1, 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(end.0, r_alone, epsilon = 1e-9);
    }

    #[test]
    fn boundary_vertex_points_reconstruct() {
        let p = unit_problem();
        let b = ceo_boundary(&p, 0.4, 16).unwrap();
        for (pt, label) in b.points.iter().zip(&b.labels) {
            match label {
                SegmentLabel::A => {
                    let t1 = 2.0 / ((2.0 * pt.0).exp() - 1.0);
                    if let Some(t2) = joint_equality_partner(&p, 0.4, t1) {
                        if t2.is_finite() {
                            let (e1, _) = ceo_vertices(&p, t1, t2).unwrap();
                            assert_abs_diff_eq!(e1.0, pt.0, epsilon = 1e-9);
                            assert_abs_diff_eq!(e1.1, pt.1, epsilon = 1e-9);
                        }
                    }
                }
                SegmentLabel::C => {
                    let t2 = 2.0 / ((2.0 * pt.1).exp() - 1.0);
                    if let Some(t1) = joint_equality_partner_rev(&p, 0.4, t2) {
                        if t1.is_finite() {
                            let (_, e2) = ceo_vertices(&p, t1, t2).unwrap();
                            assert_abs_diff_eq!(e2.0, pt.0, epsilon = 1e-9);
                            assert_abs_diff_eq!(e2.1, pt.1, epsilon = 1e-9);
                        }
                    }
                }
                _ => {}
            }
        }
    }

    #[test]
    fn boundary_rejects_degenerate_demands() {
        let p = unit_problem();
        assert!(ceo_boundary(&p, 1.0 / 3.0, 8).is_err());
        assert!(ceo_boundary(&p, 1.0, 8).is_err());
        assert!(ceo_boundary(&p, 0.2, 8).is_err());
    }

    #[test]
    fn tilde_sigmas_worked_example_and_edges() {
        let p = GaussianProblem::independent(1.0, 1.0, 4.0).unwrap();
        let (t1, t2): (f64, f64) = tilde_sigmas(&p, 0.9).unwrap();
        assert_abs_diff_eq!(t1, 8.0, epsilon = 1e-12);
        assert!(t2.is_infinite());

        let sym = unit_problem();
        let c = derived_constants(&sym).unwrap();
        let (a, b) = tilde_sigmas(&sym, c.d3_min).unwrap();
        assert_abs_diff_eq!(a, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(b, 0.0, epsilon = 1e-15);
        let (a, b) = tilde_sigmas(&sym, 0.5).unwrap();
        assert_abs_diff_eq!(a, b, epsilon = 1e-15);
    }

    #[test]
    fn partial_char_item3_boundary_holds() {
        let p = unit_problem();
        let d3 = 0.5;
        let (t1t, _) = tilde_sigmas(&p, d3).unwrap();
        let ub = side_distortion_cap(1.0, 1.0, t1t);
        let r_needed = rate_noisy(&p, 1, ub).unwrap().value;
        let res = partial_char_contains(&p, &point(r_needed, r_needed, ub, ub, d3), 3).unwrap();
        assert!(res.contains);
        assert!(res.margin.abs() < 1e-9);
        let res =
            partial_char_contains(&p, &point(r_needed - 0.01, r_needed, ub, ub, d3), 3).unwrap();
        assert!(!res.contains);
    }

    #[test]
    fn partial_char_item1_requires_joint_membership() {
        let p = unit_problem();
        let d3 = 0.4;
        let r1 = 0.5 * 7.0_f64.ln();
        let r2 = 0.5 * (40.0 / 7.0_f64).ln();
        // Decoder-1 demand matching the vertex side distortion 4/7.
        let d1 = 4.0 / 7.0;
        let res = partial_char_contains(&p, &point(r1, r2, d1, 1.0, d3), 1).unwrap();
        assert!(res.contains);
        let res = partial_char_contains(&p, &point(r1 - 0.01, r2, d1, 1.0, d3), 1).unwrap();
        assert!(!res.contains);
    }

    #[test]
    fn partial_char_rejects_uncovered_slices() {
        let p = unit_problem();
        assert!(matches!(
            partial_char_contains(&p, &point(1.0, 1.0, 0.6, 0.8, 0.5), 1),
            Err(Error::NotApplicable(_))
        ));
        assert!(matches!(
            partial_char_contains(&p, &point(1.0, 1.0, 0.45, 1.0, 0.5), 1),
            Err(Error::NotApplicable(_))
        ));
        assert!(matches!(
            partial_char_contains(&p, &point(1.0, 1.0, 0.6, 0.6, 0.5), 4),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn lambda_matches_reference_cases() {
        let c = DerivedConstants { d1_min: 0.0, d2_min: 0.0, d3_min: 0.0, d_x: 1.0 };
        let res = lambda_outer(&c, 0.6, 0.6, 0.5).unwrap();
        assert_abs_diff_eq!(res.value, 0.5 * (0.5 / 0.36_f64).ln(), epsilon = 1e-12);
        assert_eq!(res.case, LambdaCase::SupAtZero);

        let res = lambda_outer(&c, 0.6, 0.6, 0.3).unwrap();
        assert_abs_diff_eq!(res.value, 0.5 * (0.49 / 0.48_f64).ln(), epsilon = 1e-12);
        assert_eq!(res.case, LambdaCase::SupInterior);
        let hat = res.sigma_m2_hat.unwrap();
        assert_abs_diff_eq!(hat, 1.8, epsilon = 1e-12);
        assert_abs_diff_eq!(lambda_eta(hat, 0.6, 0.6, 0.3, 1.0), res.value, epsilon = 1e-12);

        let res = lambda_outer(&c, 0.6, 0.6, 0.1).unwrap();
        assert_eq!(res.value, 0.0);
        assert_eq!(res.case, LambdaCase::SupAtInfinity);

        let res = lambda_outer(&c, 1.4, 0.6, 0.2).unwrap();
        assert!(res.clamped);
    }

    #[test]
    fn lambda_degenerate_corners_are_finite_or_infinite_as_expected() {
        let c = DerivedConstants { d1_min: 0.0, d2_min: 0.0, d3_min: 0.0, d_x: 1.0 };
        let res = lambda_outer(&c, 0.0, 0.4, 0.0).unwrap();
        assert_abs_diff_eq!(res.value, 0.5 * (1.0 / 0.4_f64).ln(), epsilon = 1e-12);
        let res = lambda_outer(&c, 0.0, 0.4, 0.2).unwrap();
        assert!(res.value.is_infinite());
        let res = lambda_outer(&c, 0.0, 1.0, 0.0).unwrap();
        assert_eq!(res.value, 0.0);
    }

    proptest! {
        #[test]
        fn lambda_continuity_at_case_boundaries(
            d1 in 0.05f64..0.95,
            d2 in 0.05f64..0.95,
        ) {
            let c = DerivedConstants { d1_min: 0.0, d2_min: 0.0, d3_min: 0.0, d_x: 1.0 };
            let eps = 1e-9;
            let zb1 = d1 + d2 - 1.0;
            if zb1 > eps {
                let lo = lambda_outer(&c, d1, d2, zb1 - eps).unwrap().value;
                let hi = lambda_outer(&c, d1, d2, zb1 + eps).unwrap().value;
                prop_assert!((lo - hi).abs() < 1e-7);
            }
            let zb2 = 1.0 / (1.0 / d1 + 1.0 / d2 - 1.0);
            let lo = lambda_outer(&c, d1, d2, (zb2 - eps).max(0.0)).unwrap().value;
            let hi = lambda_outer(&c, d1, d2, zb2 + eps).unwrap().value;
            prop_assert!((lo - hi).abs() < 1e-7);
        }

        #[test]
        fn lambda_dominates_eta_samples(
            d1 in 0.05f64..0.95,
            d2 in 0.05f64..0.95,
            zeta in 0.0f64..1.2,
            s in 0.0f64..50.0,
        ) {
            let c = DerivedConstants { d1_min: 0.0, d2_min: 0.0, d3_min: 0.0, d_x: 1.0 };
            let lam = lambda_outer(&c, d1, d2, zeta).unwrap().value;
            let z = zeta.min(1.0 + 1e-12);
            let _ = z;
            prop_assert!(lam >= lambda_eta(s, d1.min(1.0), d2.min(1.0), zeta, 1.0) - 1e-9);
        }
    }

    #[test]
    fn qout_zero_rate_point_sits_on_the_boundary() {
        let p = unit_problem();
        let res = qout_contains(&p, &point(0.0, 0.0, 1.0, 1.0, 1.0)).unwrap();
        assert!(res.contains);
        assert!(res.margin.abs() < 1e-9, "margin {}", res.margin);
        let w = res.witness.unwrap();
        assert_abs_diff_eq!(w.params.r11, 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(w.lambda_val, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn qout_separates_the_joint_distortion_threshold() {
        let p = unit_problem();
        // At equal rates 0.5 the minimal joint distortion is ≈ 0.5081633.
        assert!(qout_contains(&p, &point(0.5, 0.5, 1.0, 1.0, 0.51)).unwrap().contains);
        assert!(!qout_contains(&p, &point(0.5, 0.5, 1.0, 1.0, 0.5081)).unwrap().contains);
        assert!(!qout_contains(&p, &point(0.5, 0.5, 1.0, 1.0, 0.40)).unwrap().contains);
    }

    #[test]
    fn qout_witness_respects_split_constraints() {
        let p = unit_problem();
        let res = qout_contains(&p, &point(0.9, 0.8, 0.7, 0.75, 0.5)).unwrap();
        assert!(res.contains);
        let w = res.witness.unwrap();
        let (s1, s2) = w.params.split_slacks(&p);
        assert!(s1 >= -1e-7 && s2 >= -1e-7);
        assert!(w.params.r11 + w.params.r12 <= 0.9 + 1e-9);
        assert!(w.params.r21 + w.params.r22 <= 0.8 + 1e-9);
    }

    #[test]
    fn qout_rejects_demands_below_the_joint_floor() {
        let p = unit_problem();
        let res = qout_contains(&p, &point(5.0, 5.0, 1.0, 1.0, 0.3)).unwrap();
        assert!(!res.contains);
    }

    #[test]
    fn corollary2_equality_point_is_tight_between_bounds() {
        let p = unit_problem();
        let d = 0.6;
        let bound = corollary2_bound(&p, d, d).unwrap();
        assert_abs_diff_eq!(bound, 3.0 / 7.0, epsilon = 1e-15);
        let r = rate_noisy(&p, 1, d).unwrap().value;
        assert_abs_diff_eq!(r, 0.5 * 5.0_f64.ln(), epsilon = 1e-12);
        let inner = ippr_contains(&p, &point(r, r, d, d, bound)).unwrap();
        assert!(inner.contains);
        assert!(inner.margin.abs() < 1e-9);
        let outer = qout_contains(&p, &point(r, r, d, d, bound - 1e-6)).unwrap();
        assert!(!outer.contains);
    }

    #[test]
    fn d12_outer_reference_floors() {
        let p = unit_problem();
        let f = d12_outer(&p, 0.5).unwrap();
        assert_abs_diff_eq!(f.sum_floor, 1.5081633158665269, epsilon = 1e-9);
        assert_abs_diff_eq!(f.individual_floor, 0.5081633158665269_f64.sqrt(), epsilon = 1e-9);
        assert!(f.contains(1.0, 1.0));
        assert!(!f.contains(0.70, 0.9));

        let big = d12_outer(&p, 30.0).unwrap();
        assert_abs_diff_eq!(big.individual_floor, (1.0_f64 / 3.0).sqrt(), epsilon = 1e-6);
        assert!(d12_outer(&GaussianProblem::independent(1.0, 1.0, 2.0).unwrap(), 0.5).is_err());
        assert!(d12_outer(&p, 0.0).is_err());
    }

    #[test]
    fn d12_inner_curve_shape_and_identities() {
        let p = unit_problem();
        let r = 0.5;
        let curve = d12_inner_curve(&p, r, 48).unwrap();
        let d3s = d3_star_sumrate(&p, 1.0).unwrap();
        let floor = 2.0 * d3s.sqrt() / (1.0 + d3s.sqrt());
        assert_abs_diff_eq!(floor, 0.8323593486272475, epsilon = 1e-9);

        let first = curve.points.first().unwrap();
        let last = curve.points.last().unwrap();
        assert_abs_diff_eq!(first.0, floor, epsilon = 1e-9);
        assert_abs_diff_eq!(first.1, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(last.0, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(last.1, floor, epsilon = 1e-9);
        assert_eq!(curve.labels.first(), Some(&SegmentLabel::Floor));
        assert_eq!(curve.labels.last(), Some(&SegmentLabel::Floor));
        assert!(curve.labels[1..curve.labels.len() - 1]
            .iter()
            .all(|&l| l == SegmentLabel::Curve));

        // Sorted by D1, symmetric under the coordinate swap.
        for w in curve.points.windows(2) {
            assert!(w[1].0 >= w[0].0 - 1e-12);
        }
        let n = curve.points.len();
        for i in 0..n {
            let (a, b) = curve.points[i];
            let (c, d) = curve.points[n - 1 - i];
            assert_abs_diff_eq!(a, d, epsilon = 1e-9);
            assert_abs_diff_eq!(b, c, epsilon = 1e-9);
        }

        // Inner curve lies inside the outer floors.
        let f = d12_outer(&p, r).unwrap();
        for &(a, b) in &curve.points {
            assert!(a + b >= f.sum_floor - 1e-9);
            assert!(a >= f.individual_floor - 1e-9);
        }
    }

    #[test]
    fn extreme_rate_reference_and_inverse() {
        let p = unit_problem();
        assert_abs_diff_eq!(
            extreme_min_rate(&p, 1.0, 0.34).unwrap(),
            0.5 * 25.0_f64.ln(),
            epsilon = 1e-12
        );
        // Above the case split it is the one-observation rate function.
        let r = extreme_min_rate(&p, 0.8, 0.45).unwrap();
        assert_abs_diff_eq!(r, rate_noisy(&p, 1, 0.8).unwrap().value, epsilon = 1e-15);
        // Joint floor demand needs unbounded rate.
        assert!(extreme_min_rate(&p, 1.0, 1.0 / 3.0).unwrap().is_infinite());
        assert!(matches!(
            extreme_min_rate(&p, 1.0, 0.2),
            Err(Error::InfeasibleDistortion(_))
        ));
        assert!(matches!(extreme_min_rate(&p, 0.4, 0.4), Err(Error::RateInfinite(_))));

        use crate::gaussian::d3_star_r1_inf;
        for &r1 in &[0.1, 0.7, 1.9] {
            let d3 = d3_star_r1_inf(&p, r1).unwrap();
            assert_abs_diff_eq!(extreme_min_rate(&p, 1.0, d3).unwrap(), r1, epsilon = 1e-9);
        }
    }

    #[test]
    fn noisy_md_reference_sum_floor() {
        // Constructed so the estimator variance is 1 and the joint floor 0.5.
        let p = GaussianProblem::independent(1.5, 1.5, 1.5).unwrap();
        let c = derived_constants(&p).unwrap();
        assert_abs_diff_eq!(c.d3_min, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(c.d_x, 1.0, epsilon = 1e-12);
        let floor = 0.5 * 2.0_f64.ln() + 0.5 * (0.5 / 0.36_f64).ln();
        let hi = point(floor / 2.0 + 1e-9, floor / 2.0 + 1e-9, 1.1, 1.1, 1.0);
        let lo = point(floor / 2.0 - 1e-6, floor / 2.0 - 1e-6, 1.1, 1.1, 1.0);
        assert!(noisy_md_contains(&p, &hi).unwrap().contains);
        assert!(!noisy_md_contains(&p, &lo).unwrap().contains);
        let w = noisy_md_contains(&p, &hi).unwrap().witness.unwrap();
        assert_eq!(w.case, LambdaCase::SupAtZero);
        assert_abs_diff_eq!(w.value, 0.5 * (0.5 / 0.36_f64).ln(), epsilon = 1e-12);
    }

    #[test]
    fn noisy_md_zero_excess_case_reduces_to_log_floors() {
        let p = GaussianProblem::independent(1.5, 1.5, 1.5).unwrap();
        // Shifted distortions d1 = d2 = 0.6, d3 = 0.15 < d1 + d2 - d_x, so
        // the sum floor is exactly ½ ln(d_x/d3) with no excess penalty.
        let half_sum = 0.25 * (1.0 / 0.15_f64).ln();
        let res =
            noisy_md_contains(&p, &point(half_sum, half_sum, 1.1, 1.1, 0.65)).unwrap();
        assert!(res.contains);
        assert!(res.margin.abs() < 1e-9);
        assert_eq!(res.witness.unwrap().case, LambdaCase::SupAtInfinity);
        let res =
            noisy_md_contains(&p, &point(half_sum - 1e-5, half_sum, 1.1, 1.1, 0.65)).unwrap();
        assert!(!res.contains);
        assert!(matches!(
            noisy_md_contains(&p, &point(1.0, 1.0, 0.4, 1.1, 0.7)),
            Err(Error::InfeasibleDistortion(_))
        ));
    }

    #[test]
    fn omega_diagonal_interior_and_degenerate_points() {
        let p = unit_problem();
        for &r in &[0.1, 1.0, 5.0] {
            assert!(omega_contains(&p, r, r).unwrap());
        }
        assert!(!omega_contains(&p, 3.0, 0.0).unwrap());
        assert!(!omega_contains(&p, -0.1, 0.2).unwrap());
        assert!(omega_contains(&p, 0.0, 0.0).unwrap());
        assert!(omega_contains(&GaussianProblem::independent(1.0, 1.0, 2.0).unwrap(), 1.0, 1.0)
            .is_err());
        assert!(omega_contains(&GaussianProblem::independent(1.0, 0.0, 0.0).unwrap(), 1.0, 1.0)
            .is_err());
    }

    #[test]
    fn omega_boundary_points_are_contained() {
        let p = unit_problem();
        for &alpha in &[0.05, 0.4, 1.3, 3.0] {
            let ((x1, y1), (x2, y2)) = omega_curves(&p, alpha);
            assert!(omega_contains(&p, x1, y1).unwrap());
            assert!(omega_contains(&p, x2, y2).unwrap());
            // Just below the lower curve or above the upper one is outside.
            assert!(!omega_contains(&p, x1, y1 - 1e-6).unwrap());
            assert!(!omega_contains(&p, x2, y2 + 1e-6).unwrap());
        }
    }

    #[test]
    fn single_description_boundary_matches_membership_and_reference_minimum() {
        let p = unit_problem();
        let b = ippr_boundary(&p, 0.4, 4097).unwrap();
        // Every traced point is a member with near-zero margin.
        for &(r1, r2) in b.points.iter().step_by(512) {
            let res =
                ippr_contains(&p, &point(r1, r2, f64::INFINITY, f64::INFINITY, 0.4)).unwrap();
            assert!(res.contains && res.margin.abs() < 1e-7, "margin {}", res.margin);
        }
        assert!(b.points.windows(2).all(|w| w[0].0 <= w[1].0), "sorted by r1");
        // Symmetric minimal sum rate: both descriptions at half the total.
        let min_sum = b
            .points
            .iter()
            .map(|&(r1, r2)| r1 + r2)
            .fold(f64::INFINITY, f64::min);
        assert_abs_diff_eq!(min_sum, 7.0_f64.ln(), epsilon = 1e-5);
        // A demand one observation meets alone starts at the rate axis.
        let b = ippr_boundary(&p, 0.6, 129).unwrap();
        let last = b.points.last().unwrap();
        assert!(last.1.abs() < 1e-12 && last.0 > 0.0, "axis endpoint {last:?}");
        // Trivial and infeasible demands.
        assert_eq!(ippr_boundary(&p, 1.5, 9).unwrap().points, vec![(0.0, 0.0)]);
        assert!(ippr_boundary(&p, 0.3, 9).is_err());
    }

    #[test]
    fn sampled_scheme_points_pass_the_outer_bound() {
        let p = unit_problem();
        use crate::gaussian::{qin_corner_rates, test_channel_point};
        for &(t11, t12, t21, t22) in &[
            (1.0, 0.5, 2.0, 0.25),
            (1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0),
            (5.0, 0.1, 0.8, 0.8),
            (f64::INFINITY, 2.0, 3.0, 0.7),
        ] {
            let t = TestChannelParams::new(t11, t12, t21, t22).unwrap();
            let (d1, d2, d3) = test_channel_point(&p, &t);
            let corners = qin_corner_rates(&p, &t).unwrap();
            for (r1, r2) in [corners.corner1, corners.corner2] {
                let res = qout_contains(&p, &point(r1, r2, d1, d2, d3)).unwrap();
                assert!(res.contains, "margin {} at t=({t11},{t12},{t21},{t22})", res.margin);
            }
        }
    }
}
