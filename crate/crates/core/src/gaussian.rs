//! Problem data and closed-form rate/distortion functions for remote coding
//! of a Gaussian source observed through two independent noisy channels.
//!
//! The model: a source X ~ N(0, σ_X²) is seen by two encoders as
//! Y_i = X + N_i with N_i ~ N(0, σ_N_i²). Each encoder builds a two-layer
//! description by adding test noise: a coarse layer U_i = Y_i + T_i1 decodable
//! from description i alone, and a refinement layer W_i = Y_i + T_i2 (with
//! σ²_{T_i1} ≥ σ²_{T_i2}) whose bin indices only the joint decoder resolves.
//! Setting a test variance to +∞ removes that layer entirely.
//!
//! All rates are in nats. Distortions are mean-square errors in the source
//! domain and live in (0, σ_X²] after clamping.

use crate::error::{Error, Result};
use crate::numerics::Clamped;
use crate::scalar::Real;

/// Source and observation-noise variances defining a problem instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianProblem<T> {
    /// Source variance σ_X² (> 0).
    pub sigma_x2: T,
    /// Observation-noise variance σ_N₁² (≥ 0).
    pub sigma_n1_2: T,
    /// Observation-noise variance σ_N₂² (≥ 0).
    pub sigma_n2_2: T,
    /// Correlation coefficient between the two observation noises, in [-1, 1].
    pub rho_n: T,
}

/// Distortion floors derived from a problem instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedConstants<T> {
    /// Best distortion from observation 1 alone: var(X | Y₁).
    pub d1_min: T,
    /// Best distortion from observation 2 alone: var(X | Y₂).
    pub d2_min: T,
    /// Best distortion from both observations: var(X | Y₁, Y₂).
    pub d3_min: T,
    /// Variance of the joint estimator E[X | Y₁, Y₂]: σ_X² - d3_min.
    pub d_x: T,
}

/// Test-channel variances (σ²_{T11}, σ²_{T12}, σ²_{T21}, σ²_{T22}) for the
/// two-layer scheme. Invariant: t_i1 ≥ t_i2 ≥ 0 per encoder; +∞ marks an
/// absent layer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestChannelParams<T> {
    /// Coarse-layer variance for encoder 1.
    pub t11: T,
    /// Refinement-layer variance for encoder 1.
    pub t12: T,
    /// Coarse-layer variance for encoder 2.
    pub t21: T,
    /// Refinement-layer variance for encoder 2.
    pub t22: T,
}

/// A rate-distortion operating point (R₁, R₂, D₁, D₂, D₃).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RdPoint<T> {
    /// Rate of description 1 in nats (≥ 0, +∞ allowed).
    pub r1: T,
    /// Rate of description 2 in nats (≥ 0, +∞ allowed).
    pub r2: T,
    /// Distortion at the decoder receiving description 1 alone.
    pub d1: T,
    /// Distortion at the decoder receiving description 2 alone.
    pub d2: T,
    /// Distortion at the decoder receiving both descriptions.
    pub d3: T,
}

/// Rate corners of the two-layer achievable region at fixed test channels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CornerRates<T> {
    /// Corner with encoder 1 binned against encoder 2's full description.
    pub corner1: (T, T),
    /// Corner with encoder 2 binned against encoder 1's full description.
    pub corner2: (T, T),
    /// Common sum rate of both corners.
    pub sum_rate: T,
}

impl<T: Real> GaussianProblem<T> {
    /// Validates and builds a problem instance.
    pub fn new(sigma_x2: T, sigma_n1_2: T, sigma_n2_2: T, rho_n: T) -> Result<Self> {
        if !(sigma_x2 > T::zero()) || !sigma_x2.is_finite() {
            return Err(Error::InvalidProblem(format!(
                "source variance must be positive and finite, got {sigma_x2}"
            )));
        }
        for (name, v) in [("noise variance 1", sigma_n1_2), ("noise variance 2", sigma_n2_2)] {
            if !(v >= T::zero()) || !v.is_finite() {
                return Err(Error::InvalidProblem(format!(
                    "{name} must be nonnegative and finite, got {v}"
                )));
            }
        }
        if !(rho_n >= -T::one() && rho_n <= T::one()) {
            return Err(Error::InvalidProblem(format!(
                "noise correlation must lie in [-1, 1], got {rho_n}"
            )));
        }
        Ok(GaussianProblem { sigma_x2, sigma_n1_2, sigma_n2_2, rho_n })
    }

    /// Convenience constructor for independent observation noises.
    pub fn independent(sigma_x2: T, sigma_n1_2: T, sigma_n2_2: T) -> Result<Self> {
        Self::new(sigma_x2, sigma_n1_2, sigma_n2_2, T::zero())
    }

    /// True when the two observation noises have equal variance.
    pub fn symmetric(&self) -> bool {
        self.sigma_n1_2 == self.sigma_n2_2
    }

    /// Noise variance of observation `enc` (1 or 2).
    pub fn noise_var(&self, enc: usize) -> Result<T> {
        match enc {
            1 => Ok(self.sigma_n1_2),
            2 => Ok(self.sigma_n2_2),
            _ => Err(Error::InvalidArgument(format!("encoder index must be 1 or 2, got {enc}"))),
        }
    }
}

impl<T: Real> TestChannelParams<T> {
    /// Validates the per-encoder layer ordering t_i1 ≥ t_i2 ≥ 0.
    pub fn new(t11: T, t12: T, t21: T, t22: T) -> Result<Self> {
        for (name, v) in [("t11", t11), ("t12", t12), ("t21", t21), ("t22", t22)] {
            if !(v >= T::zero()) {
                return Err(Error::InvalidArgument(format!(
                    "test variance {name} must be nonnegative, got {v}"
                )));
            }
        }
        if !(t11 >= t12) {
            return Err(Error::InvalidArgument(format!(
                "coarse layer must be noisier than refinement: t11={t11} < t12={t12}"
            )));
        }
        if !(t21 >= t22) {
            return Err(Error::InvalidArgument(format!(
                "coarse layer must be noisier than refinement: t21={t21} < t22={t22}"
            )));
        }
        Ok(TestChannelParams { t11, t12, t21, t22 })
    }
}

impl<T: Real> RdPoint<T> {
    /// Validates rates (≥ 0, +∞ allowed) and distortions (≥ 0, +∞ allowed).
    ///
    /// Zero distortion is representable (finite alphabets reach it exactly);
    /// continuous membership queries treat it as an infinite-rate demand.
    pub fn new(r1: T, r2: T, d1: T, d2: T, d3: T) -> Result<Self> {
        for (name, v) in [("r1", r1), ("r2", r2)] {
            if !(v >= T::zero()) {
                return Err(Error::InvalidArgument(format!(
                    "rate {name} must be nonnegative, got {v}"
                )));
            }
        }
        for (name, v) in [("d1", d1), ("d2", d2), ("d3", d3)] {
            if !(v >= T::zero()) {
                return Err(Error::InvalidArgument(format!(
                    "distortion {name} must be nonnegative, got {v}"
                )));
            }
        }
        Ok(RdPoint { r1, r2, d1, d2, d3 })
    }
}

/// Computes the distortion floors and estimator variance for a problem.
///
/// Perfectly correlated noises (ρ = ±1) are only meaningful with equal
/// variances: ρ = 1 leaves a single effective observation while ρ = -1 makes
/// the source recoverable exactly; unequal variances are rejected.
pub fn derived_constants<T: Real>(p: &GaussianProblem<T>) -> Result<DerivedConstants<T>> {
    let (x, n1, n2, rho) = (p.sigma_x2, p.sigma_n1_2, p.sigma_n2_2, p.rho_n);
    let d1_min = T::one() / (T::one() / x + T::one() / n1);
    let d2_min = T::one() / (T::one() / x + T::one() / n2);
    let d3_min = if n1 == T::zero() || n2 == T::zero() {
        T::zero()
    } else if rho.abs() == T::one() {
        if n1 != n2 {
            return Err(Error::InvalidProblem(
                "perfectly correlated noises require equal variances".into(),
            ));
        }
        if rho > T::zero() {
            T::one() / (T::one() / x + T::one() / n1)
        } else {
            // Opposite-sign noises cancel in Y1 + Y2, exposing X exactly.
            T::zero()
        }
    } else {
        let two = T::lit(2.0);
        let cross = (n1 * n2).sqrt();
        let q = (n1 + n2 - two * rho * cross) / ((T::one() - rho * rho) * n1 * n2);
        T::one() / (T::one() / x + q)
    };
    Ok(DerivedConstants { d1_min, d2_min, d3_min, d_x: x - d3_min })
}

/// Rate-distortion function R(D, σ_N²) for coding one noisy observation so a
/// decoder can estimate the source at mean-square distortion `d`.
///
/// Distortions above σ_X² clamp to rate zero (flagged); distortions at or
/// below var(X | Y_enc) are unreachable at any rate and error.
pub fn rate_noisy<T: Real>(p: &GaussianProblem<T>, enc: usize, d: T) -> Result<Clamped<T>> {
    let n = p.noise_var(enc)?;
    let x = p.sigma_x2;
    if !(d > T::zero()) {
        return Err(Error::InvalidArgument(format!("distortion must be positive, got {d}")));
    }
    if d >= x {
        return Ok(if d == x { Clamped::exact(T::zero()) } else { Clamped::at_boundary(T::zero()) });
    }
    let d_min = T::one() / (T::one() / x + T::one() / n);
    if d <= d_min {
        return Err(Error::RateInfinite(format!(
            "distortion {d} at or below the single-observation floor {d_min}"
        )));
    }
    let denom = (x + n) * (d - d_min);
    Ok(Clamped::exact(T::half() * (x * x / denom).ln()))
}

/// Distortion-rate function: inverse of [`rate_noisy`] in the rate argument.
pub fn distortion_rate_noisy<T: Real>(p: &GaussianProblem<T>, enc: usize, r: T) -> Result<T> {
    let n = p.noise_var(enc)?;
    let x = p.sigma_x2;
    if !(r >= T::zero()) {
        return Err(Error::InvalidArgument(format!("rate must be nonnegative, got {r}")));
    }
    let d_min = T::one() / (T::one() / x + T::one() / n);
    let two = T::lit(2.0);
    Ok(d_min + x * x / (x + n) * (-two * r).exp())
}

/// Rejects problems whose observation noises are correlated; the closed
/// forms downstream of this check assume independence.
pub(crate) fn require_independent<T: Real>(p: &GaussianProblem<T>, what: &str) -> Result<()> {
    if p.rho_n != T::zero() {
        return Err(Error::InvalidArgument(format!(
            "{what} assumes independent observation noises, got correlation {}",
            p.rho_n
        )));
    }
    Ok(())
}

/// Decoder distortions (D₁, D₂, D₃) reached by the two-layer scheme at the
/// given test-channel variances, with side decoders using the coarse layers
/// and the joint decoder using both refinement layers. Assumes independent
/// observation noises; the correlation field is ignored here.
pub fn test_channel_point<T: Real>(
    p: &GaussianProblem<T>,
    t: &TestChannelParams<T>,
) -> (T, T, T) {
    let x = p.sigma_x2;
    let d1 = T::one() / (T::one() / x + T::one() / (p.sigma_n1_2 + t.t11));
    let d2 = T::one() / (T::one() / x + T::one() / (p.sigma_n2_2 + t.t21));
    let d3 = T::one()
        / (T::one() / x
            + T::one() / (p.sigma_n1_2 + t.t12)
            + T::one() / (p.sigma_n2_2 + t.t22));
    (d1, d2, d3)
}

/// Minimal description rates of the two-layer scheme at fixed test channels.
///
/// The achievable rate region at fixed channels is a contra-polymatroid over
/// the binning order; this returns its two corners and the shared sum rate.
/// A refinement variance of zero would demand infinite rate and errors; an
/// absent encoder (t_i2 = +∞, forcing t_i1 = +∞) contributes zero rate.
pub fn qin_corner_rates<T: Real>(
    p: &GaussianProblem<T>,
    t: &TestChannelParams<T>,
) -> Result<CornerRates<T>> {
    require_independent(p, "the two-layer rate region")?;
    if t.t12 == T::zero() || t.t22 == T::zero() {
        return Err(Error::RateInfinite(
            "zero refinement test variance demands a lossless layer".into(),
        ));
    }
    let x = p.sigma_x2;
    // x holds the variance, so the fourth moment of the amplitude is x².
    let x4 = x * x;
    let u1 = x + p.sigma_n1_2 + t.t11;
    let w1 = x + p.sigma_n1_2 + t.t12;
    let u2 = x + p.sigma_n2_2 + t.t21;
    let w2 = x + p.sigma_n2_2 + t.t22;
    let absent1 = t.t12.is_infinite();
    let absent2 = t.t22.is_infinite();
    let half = T::half();

    // Each bound is I(Y_i; U_i) + conditional refinement terms, algebraically
    // collapsed to a single log ratio and arranged so +∞ layer variances
    // enter only through vanishing reciprocals.
    let r1_c1 = if absent1 {
        T::zero()
    } else {
        half * ((w1 - x4 / w2) / (t.t12 * (T::one() - x4 / (u1 * w2)))).ln()
    };
    let r2_c1 = if absent2 {
        T::zero()
    } else {
        half * ((w2 - x4 / u1) / (t.t22 * (T::one() - x4 / (u1 * u2)))).ln()
    };
    let r1_c2 = if absent1 {
        T::zero()
    } else {
        half * ((w1 - x4 / u2) / (t.t12 * (T::one() - x4 / (u1 * u2)))).ln()
    };
    let r2_c2 = if absent2 {
        T::zero()
    } else {
        half * ((w2 - x4 / w1) / (t.t22 * (T::one() - x4 / (u2 * w1)))).ln()
    };
    let sum_rate = match (absent1, absent2) {
        (true, true) => T::zero(),
        (true, false) => half * (w2 / t.t22).ln(),
        (false, true) => half * (w1 / t.t12).ln(),
        (false, false) => {
            half * ((w1 * w2 - x4) / (t.t12 * t.t22 * (T::one() - x4 / (u1 * u2)))).ln()
        }
    };
    Ok(CornerRates { corner1: (r1_c1, r2_c1), corner2: (r1_c2, r2_c2), sum_rate })
}

/// Minimum joint-decoder distortion D₃*(R₁, R₂) over all schemes with the
/// given total rate, for symmetric problems (it depends on R₁ + R₂ only).
pub fn d3_star_sumrate<T: Real>(p: &GaussianProblem<T>, r_sum: T) -> Result<T> {
    require_independent(p, "the minimal joint distortion")?;
    if !p.symmetric() {
        return Err(Error::InvalidArgument(
            "joint-decoder distortion at a sum rate requires equal noise variances".into(),
        ));
    }
    if !(r_sum >= T::zero()) {
        return Err(Error::InvalidArgument(format!("sum rate must be nonnegative, got {r_sum}")));
    }
    let x = p.sigma_x2;
    let n = p.sigma_n1_2;
    let two = T::lit(2.0);
    let e1 = (-r_sum).exp();
    let e2 = (-two * r_sum).exp();
    // x holds σ_X², so σ_X⁴ = x² and σ_X⁶ = x³.
    let x4 = x * x;
    let root = (x4 * e2 + two * x * n + n * n).sqrt();
    let num = two * x4 * n + x * n * n + two * x4 * x * e2 + two * x4 * e1 * root;
    let den = (two * x + n) * (two * x + n);
    Ok(num / den)
}

/// Minimum joint-decoder distortion when description 2 has unlimited rate,
/// as a function of R₁.
pub fn d3_star_r1_inf<T: Real>(p: &GaussianProblem<T>, r1: T) -> Result<T> {
    require_independent(p, "the unlimited-partner joint distortion")?;
    if !(r1 >= T::zero()) {
        return Err(Error::InvalidArgument(format!("rate must be nonnegative, got {r1}")));
    }
    let x = p.sigma_x2;
    let n1 = p.sigma_n1_2;
    let n2 = p.sigma_n2_2;
    let two = T::lit(2.0);
    let s = x * n1 + x * n2 + n1 * n2;
    let num = x * x * n2 * n2 * (-two * r1).exp() + x * n1 * n2 * (x + n2);
    Ok(num / ((x + n2) * s))
}
