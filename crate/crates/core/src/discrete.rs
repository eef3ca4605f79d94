//! Finite-alphabet counterpart of the Gaussian machinery: exact entropy
//! evaluation of the layered two-description inner bounds, the maximal
//! common part of two observations, and seeded heuristic searches over
//! auxiliary test channels.
//!
//! Everything works on explicit joint probability tensors. Evaluators are
//! exact up to floating point; the optimizers are random-restart descent
//! heuristics and claim no global optimality.

use crate::error::{Error, Result};
use crate::gaussian::RdPoint;
use crate::scalar::Real;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Normalization slack for pmf and conditional rows.
const PMF_TOL: f64 = 1e-12;

/// Cell cap for assembled joint tensors.
const CELL_CAP: usize = 100_000_000;

/// Number of independent optimizer restarts.
const RESTARTS: usize = 8;

/// Seed-derivation multiplier separating restart streams.
const RESTART_STRIDE: u64 = 0x9E37_79B9_7F4A_7C15;

/// Penalty weight turning distortion-excess constraints into a scalar cost.
const PENALTY: f64 = 50.0;

/// Slack under which a distortion constraint counts as satisfied.
const FEASIBILITY_TOL: f64 = 1e-9;

/// Dense joint pmf over a list of finite axes (row-major, first axis slowest).
#[derive(Debug, Clone, PartialEq)]
pub struct JointPmf<T> {
    /// Alphabet size per axis.
    pub dims: Vec<usize>,
    /// Probabilities, row-major.
    pub p: Vec<T>,
}

/// Advances a row-major multi-index; returns false after the last cell.
fn next_index(idx: &mut [usize], dims: &[usize]) -> bool {
    for ax in (0..dims.len()).rev() {
        idx[ax] += 1;
        if idx[ax] < dims[ax] {
            return true;
        }
        idx[ax] = 0;
    }
    false
}

impl<T: Real> JointPmf<T> {
    /// Validates shape, nonnegativity, and normalization within 1e-12.
    pub fn new(dims: Vec<usize>, p: Vec<T>) -> Result<Self> {
        if dims.is_empty() || dims.iter().any(|&d| d == 0) {
            return Err(Error::InvalidArgument("axes must be nonempty".into()));
        }
        let len: usize = dims.iter().product();
        if p.len() != len {
            return Err(Error::DimensionMismatch(format!(
                "pmf has {} entries, dims require {len}",
                p.len()
            )));
        }
        let mut sum = T::zero();
        for &v in &p {
            if !(v >= T::zero()) || !v.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "pmf entries must be finite and nonnegative, got {v}"
                )));
            }
            sum = sum + v;
        }
        if (sum - T::one()).abs() > T::lit(PMF_TOL) {
            return Err(Error::InvalidArgument(format!(
                "pmf must sum to 1 within {PMF_TOL}, got {sum}"
            )));
        }
        Ok(JointPmf { dims, p })
    }

    /// Marginal probabilities over the given axes, row-major in that order.
    fn marginal(&self, axes: &[usize]) -> Vec<T> {
        let out_len: usize = axes.iter().map(|&a| self.dims[a]).product();
        let mut out = vec![T::zero(); out_len];
        let mut idx = vec![0usize; self.dims.len()];
        for &v in &self.p {
            let mut oi = 0;
            for &a in axes {
                oi = oi * self.dims[a] + idx[a];
            }
            out[oi] = out[oi] + v;
            next_index(&mut idx, &self.dims);
        }
        out
    }

    /// Entropy (nats) of the marginal over the given axes.
    fn entropy(&self, axes: &[usize]) -> T {
        if axes.is_empty() {
            return T::zero();
        }
        let mut h = T::zero();
        for v in self.marginal(axes) {
            if v > T::zero() {
                h = h - v * v.ln();
            }
        }
        h
    }

    /// Mutual information I(A; B | C) in nats for disjoint axis sets.
    fn mi(&self, a: &[usize], b: &[usize], c: &[usize]) -> T {
        let join = |x: &[usize], y: &[usize]| -> Vec<usize> {
            let mut v: Vec<usize> = x.iter().chain(y).copied().collect();
            v.sort_unstable();
            v
        };
        let ac = join(a, c);
        let bc = join(b, c);
        let abc = join(&join(a, b), c);
        self.entropy(&ac) + self.entropy(&bc) - self.entropy(&abc) - self.entropy(c)
    }
}

/// Multiplies factor tables into a dense joint tensor over `dims`.
///
/// Each factor is (axes, table) with the table row-major over exactly those
/// axes in the given order; the joint cell is the product of all factors.
fn assemble<T: Real>(dims: &[usize], factors: &[(&[usize], &[T])]) -> Result<JointPmf<T>> {
    let len: usize = dims.iter().product();
    if len > CELL_CAP {
        return Err(Error::TensorTooLarge(len));
    }
    for (axes, table) in factors {
        let expect: usize = axes.iter().map(|&a| dims[a]).product();
        if table.len() != expect {
            return Err(Error::DimensionMismatch(format!(
                "factor over axes {axes:?} has {} entries, expected {expect}",
                table.len()
            )));
        }
    }
    let mut p = vec![T::zero(); len];
    let mut idx = vec![0usize; dims.len()];
    for cell in p.iter_mut() {
        let mut v = T::one();
        for (axes, table) in factors {
            let mut fi = 0;
            for &a in *axes {
                fi = fi * dims[a] + idx[a];
            }
            v = v * table[fi];
        }
        *cell = v;
        next_index(&mut idx, dims);
    }
    Ok(JointPmf { dims: dims.to_vec(), p })
}

/// Checks that a conditional table of `rows` rows of length `cols` is
/// nonnegative with each row summing to 1 within 1e-12.
fn check_rows<T: Real>(what: &str, table: &[T], rows: usize, cols: usize) -> Result<()> {
    if table.len() != rows * cols {
        return Err(Error::DimensionMismatch(format!(
            "{what} has {} entries, expected {rows}x{cols}",
            table.len()
        )));
    }
    for r in 0..rows {
        let mut sum = T::zero();
        for c in 0..cols {
            let v = table[r * cols + c];
            if !(v >= T::zero()) || !v.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "{what} row {r} has invalid entry {v}"
                )));
            }
            sum = sum + v;
        }
        if (sum - T::one()).abs() > T::lit(PMF_TOL) {
            return Err(Error::InvalidArgument(format!(
                "{what} row {r} sums to {sum}, not 1"
            )));
        }
    }
    Ok(())
}

/// Finite problem instance: hidden source, two observations, reconstruction
/// alphabet, and a bounded distortion measure.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteProblem<T> {
    /// Source alphabet size.
    pub x_card: usize,
    /// First observation alphabet size.
    pub y1_card: usize,
    /// Second observation alphabet size.
    pub y2_card: usize,
    /// Reconstruction alphabet size.
    pub xhat_card: usize,
    /// Joint pmf P(x, y1, y2), row-major.
    pub pmf: Vec<T>,
    /// Distortion d(x, xhat), row-major, finite and nonnegative.
    pub dist: Vec<T>,
}

impl<T: Real> DiscreteProblem<T> {
    /// Validates shapes, normalization, and distortion entries.
    pub fn new(
        x_card: usize,
        y1_card: usize,
        y2_card: usize,
        xhat_card: usize,
        pmf: Vec<T>,
        dist: Vec<T>,
    ) -> Result<Self> {
        let joint = JointPmf::new(vec![x_card, y1_card, y2_card], pmf)?;
        if dist.len() != x_card * xhat_card {
            return Err(Error::DimensionMismatch(format!(
                "distortion matrix has {} entries, expected {}",
                dist.len(),
                x_card * xhat_card
            )));
        }
        for &v in &dist {
            if !(v >= T::zero()) || !v.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "distortion entries must be finite and nonnegative, got {v}"
                )));
            }
        }
        Ok(DiscreteProblem {
            x_card,
            y1_card,
            y2_card,
            xhat_card,
            pmf: joint.p,
            dist,
        })
    }

    /// Joint pmf viewed as a three-axis tensor (X, Y1, Y2).
    fn joint(&self) -> JointPmf<T> {
        JointPmf {
            dims: vec![self.x_card, self.y1_card, self.y2_card],
            p: self.pmf.clone(),
        }
    }

    /// Distortion of the best constant reconstruction (zero-rate benchmark).
    pub fn d_max(&self) -> T {
        let px = self.joint().marginal(&[0]);
        let mut best = T::infinity();
        for xh in 0..self.xhat_card {
            let mut e = T::zero();
            for x in 0..self.x_card {
                e = e + px[x] * self.dist[x * self.xhat_card + xh];
            }
            best = best.min(e);
        }
        best
    }
}

/// Auxiliary two-layer test channels for both encoders, with optional
/// decoders (derived optimally when absent).
#[derive(Debug, Clone, PartialEq)]
pub struct AuxChannels<T> {
    /// First observation alphabet size.
    pub y1_card: usize,
    /// Second observation alphabet size.
    pub y2_card: usize,
    /// Coarse-layer alphabet size for encoder 1.
    pub u1_card: usize,
    /// Refinement-layer alphabet size for encoder 1.
    pub w1_card: usize,
    /// Coarse-layer alphabet size for encoder 2.
    pub u2_card: usize,
    /// Refinement-layer alphabet size for encoder 2.
    pub w2_card: usize,
    /// P(u1, w1 | y1), row-major over (y1; u1, w1).
    pub channel1: Vec<T>,
    /// P(u2, w2 | y2), row-major over (y2; u2, w2).
    pub channel2: Vec<T>,
    /// Side decoder 1 over u1 (None: derive optimally).
    pub decoder1: Option<Vec<usize>>,
    /// Side decoder 2 over u2 (None: derive optimally).
    pub decoder2: Option<Vec<usize>>,
    /// Joint decoder over (u1, w1, u2, w2) row-major (None: derive optimally).
    pub decoder3: Option<Vec<usize>>,
}

impl<T: Real> AuxChannels<T> {
    /// Validates conditional rows; decoders start unset.
    pub fn new(
        y1_card: usize,
        y2_card: usize,
        u1_card: usize,
        w1_card: usize,
        u2_card: usize,
        w2_card: usize,
        channel1: Vec<T>,
        channel2: Vec<T>,
    ) -> Result<Self> {
        if [y1_card, y2_card, u1_card, w1_card, u2_card, w2_card].contains(&0) {
            return Err(Error::InvalidArgument("alphabet sizes must be positive".into()));
        }
        check_rows("channel1", &channel1, y1_card, u1_card * w1_card)?;
        check_rows("channel2", &channel2, y2_card, u2_card * w2_card)?;
        Ok(AuxChannels {
            y1_card,
            y2_card,
            u1_card,
            w1_card,
            u2_card,
            w2_card,
            channel1,
            channel2,
            decoder1: None,
            decoder2: None,
            decoder3: None,
        })
    }

    /// Constant (rate-zero) channels: every auxiliary alphabet is a single
    /// letter.
    pub fn constant(y1_card: usize, y2_card: usize) -> Self {
        AuxChannels {
            y1_card,
            y2_card,
            u1_card: 1,
            w1_card: 1,
            u2_card: 1,
            w2_card: 1,
            channel1: vec![T::one(); y1_card],
            channel2: vec![T::one(); y2_card],
            decoder1: None,
            decoder2: None,
            decoder3: None,
        }
    }
}

/// Maximal common part of two observations: component count and the two
/// extraction maps. Ids are 1-based; letters of zero marginal probability
/// map to the sentinel 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommonPart {
    /// Number of jointly computable values.
    pub k: usize,
    /// Extraction map on the first alphabet.
    pub f: Vec<usize>,
    /// Extraction map on the second alphabet.
    pub g: Vec<usize>,
}

/// Evaluated two-layer operating point: both rate corners, the shared sum
/// rate and distortions, and the channels (with the decoders actually used).
#[derive(Debug, Clone, PartialEq)]
pub struct AchievablePoint<T> {
    /// Corner where encoder 1 refines last.
    pub corner1: RdPoint<T>,
    /// Corner where encoder 2 refines last.
    pub corner2: RdPoint<T>,
    /// Sum rate shared by both corners.
    pub sum_rate: T,
    /// Side and joint distortions shared by both corners.
    pub distortions: (T, T, T),
    /// Channels and decoders realizing the point.
    pub channels: AuxChannels<T>,
}

/// Auxiliary alphabet sizes for the two-layer search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AuxCards {
    /// Coarse alphabet of encoder 1.
    pub u1: usize,
    /// Refinement alphabet of encoder 1.
    pub w1: usize,
    /// Coarse alphabet of encoder 2.
    pub u2: usize,
    /// Refinement alphabet of encoder 2.
    pub w2: usize,
}

/// Rate bounds and distortions of a layered evaluator.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluatedBounds<T> {
    /// Minimal first description rate.
    pub r1_bound: T,
    /// Minimal second description rate.
    pub r2_bound: T,
    /// Minimal sum rate.
    pub sum_bound: T,
    /// Distortions (D1, D2, D3).
    pub distortions: (T, T, T),
}

/// Extracts the maximal common part of a two-axis joint pmf.
///
/// Builds the bipartite support graph and numbers its connected components
/// in order of their smallest first-alphabet member; any pair of maps that
/// agree almost surely must be constant on components, so the component
/// count is the maximum.
pub fn common_part<T: Real>(joint: &JointPmf<T>) -> Result<CommonPart> {
    if joint.dims.len() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "common part needs a two-axis pmf, got {} axes",
            joint.dims.len()
        )));
    }
    let (m, n) = (joint.dims[0], joint.dims[1]);
    // Union-find over y1 nodes [0, m) and y2 nodes [m, m + n).
    let mut parent: Vec<usize> = (0..m + n).collect();
    fn find(parent: &mut Vec<usize>, mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let mut any_edge = false;
    for y1 in 0..m {
        for y2 in 0..n {
            if joint.p[y1 * n + y2] > T::zero() {
                any_edge = true;
                let a = find(&mut parent, y1);
                let b = find(&mut parent, m + y2);
                parent[a] = b;
            }
        }
    }
    if !any_edge {
        return Err(Error::EmptyInput("pmf has empty support".into()));
    }
    let marg1 = joint.marginal(&[0]);
    let marg2 = joint.marginal(&[1]);
    let mut component_id = vec![0usize; m + n];
    let mut k = 0;
    let mut f = vec![0usize; m];
    for y1 in 0..m {
        if !(marg1[y1] > T::zero()) {
            continue;
        }
        let root = find(&mut parent, y1);
        if component_id[root] == 0 {
            k += 1;
            component_id[root] = k;
        }
        f[y1] = component_id[root];
    }
    let mut g = vec![0usize; n];
    for y2 in 0..n {
        if !(marg2[y2] > T::zero()) {
            continue;
        }
        let root = find(&mut parent, m + y2);
        g[y2] = component_id[root];
    }
    Ok(CommonPart { k, f, g })
}

/// Optimal deterministic decoder from the observation axes: for each joint
/// observation letter, the reconstruction minimizing posterior-weighted
/// distortion (ties to the lowest index). Returns the map and its expected
/// distortion.
fn derive_decoder<T: Real>(
    joint: &JointPmf<T>,
    obs_axes: &[usize],
    dist: &[T],
    x_card: usize,
    xhat_card: usize,
) -> (Vec<usize>, T) {
    let mut axes = vec![0usize];
    axes.extend_from_slice(obs_axes);
    let post = joint.marginal(&axes);
    let s_len = post.len() / x_card;
    let mut map = vec![0usize; s_len];
    let mut total = T::zero();
    for s in 0..s_len {
        let mut best_cost = T::infinity();
        let mut best_xh = 0usize;
        for xh in 0..xhat_card {
            let mut cost = T::zero();
            for x in 0..x_card {
                cost = cost + post[x * s_len + s] * dist[x * xhat_card + xh];
            }
            if cost < best_cost {
                best_cost = cost;
                best_xh = xh;
            }
        }
        map[s] = best_xh;
        total = total + best_cost;
    }
    (map, total)
}

/// Expected distortion of a supplied decoder map over the observation axes.
fn decoder_distortion<T: Real>(
    joint: &JointPmf<T>,
    obs_axes: &[usize],
    map: &[usize],
    dist: &[T],
    x_card: usize,
    xhat_card: usize,
) -> Result<T> {
    let mut axes = vec![0usize];
    axes.extend_from_slice(obs_axes);
    let post = joint.marginal(&axes);
    let s_len = post.len() / x_card;
    if map.len() != s_len {
        return Err(Error::DimensionMismatch(format!(
            "decoder has {} entries, expected {s_len}",
            map.len()
        )));
    }
    let mut total = T::zero();
    for (s, &xh) in map.iter().enumerate() {
        if xh >= xhat_card {
            return Err(Error::InvalidArgument(format!(
                "decoder output {xh} outside the reconstruction alphabet"
            )));
        }
        for x in 0..x_card {
            total = total + post[x * s_len + s] * dist[x * xhat_card + xh];
        }
    }
    Ok(total)
}

/// Clamps an entropy-difference rate: tiny negative rounding is zeroed,
/// anything materially negative indicates a logic error.
fn clamp_rate<T: Real>(r: T) -> T {
    debug_assert!(r > -T::lit(1e-9), "rate {r} below rounding tolerance");
    r.max(T::zero())
}

/// Evaluates the two-layer inner bound at fixed auxiliary channels: both
/// contra-polymatroid rate corners, the shared sum rate, and the decoder
/// distortions (optimal decoders derived when absent, ties to the lowest
/// index).
pub fn theorem1_evaluate<T: Real>(
    prob: &DiscreteProblem<T>,
    aux: &AuxChannels<T>,
) -> Result<AchievablePoint<T>> {
    if aux.y1_card != prob.y1_card || aux.y2_card != prob.y2_card {
        return Err(Error::DimensionMismatch(format!(
            "channels expect observation alphabets ({}, {}), problem has ({}, {})",
            aux.y1_card, aux.y2_card, prob.y1_card, prob.y2_card
        )));
    }
    check_rows("channel1", &aux.channel1, aux.y1_card, aux.u1_card * aux.w1_card)?;
    check_rows("channel2", &aux.channel2, aux.y2_card, aux.u2_card * aux.w2_card)?;
    // Axes: 0 X, 1 Y1, 2 Y2, 3 U1, 4 W1, 5 U2, 6 W2.
    let dims = [
        prob.x_card,
        prob.y1_card,
        prob.y2_card,
        aux.u1_card,
        aux.w1_card,
        aux.u2_card,
        aux.w2_card,
    ];
    let joint = assemble(
        &dims,
        &[
            (&[0, 1, 2][..], &prob.pmf[..]),
            (&[1, 3, 4][..], &aux.channel1[..]),
            (&[2, 5, 6][..], &aux.channel2[..]),
        ],
    )?;
    let base1 = joint.mi(&[1], &[3], &[]);
    let base2 = joint.mi(&[2], &[5], &[]);
    let refine1_full = joint.mi(&[1], &[4], &[3, 5, 6]);
    let refine2_mid = joint.mi(&[2], &[6], &[3, 5]);
    let refine1_mid = joint.mi(&[1], &[4], &[3, 5]);
    let refine2_full = joint.mi(&[2], &[6], &[3, 4, 5]);
    let joint_refine = joint.mi(&[1, 2], &[4, 6], &[3, 5]);

    let mut channels = aux.clone();
    let (d1, map1) = match &aux.decoder1 {
        Some(map) => (
            decoder_distortion(&joint, &[3], map, &prob.dist, prob.x_card, prob.xhat_card)?,
            map.clone(),
        ),
        None => {
            let (map, d) = derive_decoder(&joint, &[3], &prob.dist, prob.x_card, prob.xhat_card);
            (d, map)
        }
    };
    let (d2, map2) = match &aux.decoder2 {
        Some(map) => (
            decoder_distortion(&joint, &[5], map, &prob.dist, prob.x_card, prob.xhat_card)?,
            map.clone(),
        ),
        None => {
            let (map, d) = derive_decoder(&joint, &[5], &prob.dist, prob.x_card, prob.xhat_card);
            (d, map)
        }
    };
    let obs3 = [3usize, 4, 5, 6];
    let (d3, map3) = match &aux.decoder3 {
        Some(map) => (
            decoder_distortion(&joint, &obs3, map, &prob.dist, prob.x_card, prob.xhat_card)?,
            map.clone(),
        ),
        None => {
            let (map, d) = derive_decoder(&joint, &obs3, &prob.dist, prob.x_card, prob.xhat_card);
            (d, map)
        }
    };
    channels.decoder1 = Some(map1);
    channels.decoder2 = Some(map2);
    channels.decoder3 = Some(map3);

    let corner1 = RdPoint::new(
        clamp_rate(base1 + refine1_full),
        clamp_rate(base2 + refine2_mid),
        d1,
        d2,
        d3,
    )?;
    let corner2 = RdPoint::new(
        clamp_rate(base1 + refine1_mid),
        clamp_rate(base2 + refine2_full),
        d1,
        d2,
        d3,
    )?;
    Ok(AchievablePoint {
        corner1,
        corner2,
        sum_rate: clamp_rate(base1 + base2 + joint_refine),
        distortions: (d1, d2, d3),
        channels,
    })
}

/// Uniform draw in (0, 1].
fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    ((rng.next_u64() >> 11) + 1) as f64 * 2.0_f64.powi(-53)
}

/// One standard normal draw (Box-Muller, second value discarded).
fn normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1 = uniform(rng);
    let u2 = uniform(rng);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Fills a conditional table with unit-Dirichlet rows.
fn dirichlet_rows<T: Real>(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Vec<T> {
    let mut table = vec![T::zero(); rows * cols];
    for r in 0..rows {
        let mut sum = 0.0_f64;
        let mut draws = vec![0.0_f64; cols];
        for d in draws.iter_mut() {
            *d = -uniform(rng).ln();
            sum += *d;
        }
        for c in 0..cols {
            table[r * cols + c] = T::lit(draws[c] / sum);
        }
    }
    table
}

/// Peaked rows: mass 0.9 on `peak(r)`, the rest uniform.
fn peaked_rows<T: Real>(rows: usize, cols: usize, peak: impl Fn(usize) -> usize) -> Vec<T> {
    let spread = T::lit(0.1) / T::lit(cols as f64);
    let mut table = vec![spread; rows * cols];
    for r in 0..rows {
        let c = peak(r) % cols;
        table[r * cols + c] = table[r * cols + c] + T::lit(0.9);
    }
    table
}

/// Multiplies one random cell of a random row by a lognormal factor and
/// renormalizes that row.
fn perturb_row<T: Real>(rng: &mut ChaCha8Rng, table: &mut [T], rows: usize, cols: usize, scale: f64) {
    let r = (rng.next_u64() % rows as u64) as usize;
    let c = (rng.next_u64() % cols as u64) as usize;
    let factor = T::lit((scale * normal(rng)).exp());
    table[r * cols + c] = table[r * cols + c] * factor;
    let mut sum = T::zero();
    for j in 0..cols {
        sum = sum + table[r * cols + j];
    }
    if sum > T::zero() {
        for j in 0..cols {
            table[r * cols + j] = table[r * cols + j] / sum;
        }
    }
}

/// Default auxiliary alphabet sizes from the support-lemma bounds
/// (|U| = |Y|+4, |W| = |Y|^2+4|Y|+3), each capped at `card_cap`.
pub fn default_aux_cards<T: Real>(prob: &DiscreteProblem<T>, card_cap: usize) -> AuxCards {
    let u = |y: usize| (y + 4).min(card_cap).max(1);
    let w = |y: usize| (y * y + 4 * y + 3).min(card_cap).max(1);
    AuxCards {
        u1: u(prob.y1_card),
        w1: w(prob.y1_card),
        u2: u(prob.y2_card),
        w2: w(prob.y2_card),
    }
}

/// Embeds channels into larger auxiliary alphabets by giving the new letters
/// zero probability; the evaluated point is unchanged.
pub fn embed_channels<T: Real>(aux: &AuxChannels<T>, cards: AuxCards) -> Result<AuxChannels<T>> {
    if cards.u1 < aux.u1_card
        || cards.w1 < aux.w1_card
        || cards.u2 < aux.u2_card
        || cards.w2 < aux.w2_card
    {
        return Err(Error::InvalidArgument(
            "target alphabets must contain the current ones".into(),
        ));
    }
    let grow = |table: &[T], rows: usize, u_old: usize, w_old: usize, u_new: usize, w_new: usize| {
        let mut out = vec![T::zero(); rows * u_new * w_new];
        for r in 0..rows {
            for u in 0..u_old {
                for w in 0..w_old {
                    out[(r * u_new + u) * w_new + w] = table[(r * u_old + u) * w_old + w];
                }
            }
        }
        out
    };
    AuxChannels::new(
        aux.y1_card,
        aux.y2_card,
        cards.u1,
        cards.w1,
        cards.u2,
        cards.w2,
        grow(&aux.channel1, aux.y1_card, aux.u1_card, aux.w1_card, cards.u1, cards.w1),
        grow(&aux.channel2, aux.y2_card, aux.u2_card, aux.w2_card, cards.u2, cards.w2),
    )
}

/// Heuristic minimization of `weights . (R1, R2, D1, D2, D3)` over two-layer
/// channels at fixed auxiliary alphabet sizes, reading rates from the first
/// corner.
///
/// Random-restart descent: unit-Dirichlet initializations (restart 0 starts
/// peaked, or from `init` when given) refined by annealed multiplicative
/// single-cell perturbations. The budget counts evaluator calls, split
/// evenly across restarts; ties between restarts resolve to the lowest
/// index. Deterministic given the seed; no optimality claim.
pub fn theorem1_optimize_from<T: Real>(
    prob: &DiscreteProblem<T>,
    cards: AuxCards,
    weights: [T; 5],
    budget: usize,
    seed: u64,
    init: Option<&AuxChannels<T>>,
) -> Result<AchievablePoint<T>> {
    if budget == 0 {
        return Err(Error::InvalidArgument("optimizer budget must be positive".into()));
    }
    if [cards.u1, cards.w1, cards.u2, cards.w2].contains(&0) {
        return Err(Error::InvalidArgument("auxiliary alphabets must be nonempty".into()));
    }
    if let Some(ch) = init {
        if ch.u1_card != cards.u1
            || ch.w1_card != cards.w1
            || ch.u2_card != cards.u2
            || ch.w2_card != cards.w2
            || ch.y1_card != prob.y1_card
            || ch.y2_card != prob.y2_card
        {
            return Err(Error::DimensionMismatch(
                "initial channels must match the requested alphabets".into(),
            ));
        }
    }
    let score_of = |pt: &AchievablePoint<T>| -> T {
        weights[0] * pt.corner1.r1
            + weights[1] * pt.corner1.r2
            + weights[2] * pt.distortions.0
            + weights[3] * pt.distortions.1
            + weights[4] * pt.distortions.2
    };
    let cols1 = cards.u1 * cards.w1;
    let cols2 = cards.u2 * cards.w2;
    let mut best: Option<(T, usize, AuxChannels<T>)> = None;
    for restart in 0..RESTARTS {
        let share = budget / RESTARTS
            + usize::from(restart < budget % RESTARTS);
        if share == 0 {
            continue;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (restart as u64).wrapping_mul(RESTART_STRIDE));
        let mut aux = match (restart, init) {
            (0, Some(ch)) => ch.clone(),
            (0, None) => AuxChannels::new(
                prob.y1_card,
                prob.y2_card,
                cards.u1,
                cards.w1,
                cards.u2,
                cards.w2,
                peaked_rows(prob.y1_card, cols1, |y| (y % cards.u1) * cards.w1 + y % cards.w1),
                peaked_rows(prob.y2_card, cols2, |y| (y % cards.u2) * cards.w2 + y % cards.w2),
            )?,
            _ => AuxChannels::new(
                prob.y1_card,
                prob.y2_card,
                cards.u1,
                cards.w1,
                cards.u2,
                cards.w2,
                dirichlet_rows(&mut rng, prob.y1_card, cols1),
                dirichlet_rows(&mut rng, prob.y2_card, cols2),
            )?,
        };
        aux.decoder1 = None;
        aux.decoder2 = None;
        aux.decoder3 = None;
        let mut score = score_of(&theorem1_evaluate(prob, &aux)?);
        let mut used = 1usize;
        while used < share {
            let progress = used as f64 / share as f64;
            let scale = 0.5 * (0.01_f64 / 0.5).powf(progress);
            let trial_on_first = rng.next_u64() % 2 == 0;
            let mut trial = aux.clone();
            if trial_on_first {
                perturb_row(&mut rng, &mut trial.channel1, prob.y1_card, cols1, scale);
            } else {
                perturb_row(&mut rng, &mut trial.channel2, prob.y2_card, cols2, scale);
            }
            let trial_score = score_of(&theorem1_evaluate(prob, &trial)?);
            used += 1;
            if trial_score < score {
                score = trial_score;
                aux = trial;
            }
        }
        let better = match &best {
            None => true,
            Some((s, _, _)) => score < *s,
        };
        if better {
            best = Some((score, restart, aux));
        }
    }
    let (_, _, channels) = best.expect("positive budget ran at least one restart");
    theorem1_evaluate(prob, &channels)
}

/// [`theorem1_optimize_from`] without a warm start.
pub fn theorem1_optimize<T: Real>(
    prob: &DiscreteProblem<T>,
    cards: AuxCards,
    weights: [T; 5],
    budget: usize,
    seed: u64,
) -> Result<AchievablePoint<T>> {
    theorem1_optimize_from(prob, cards, weights, budget, seed, None)
}

/// Heuristic minimum single-description rate for reconstructing with and
/// without the second observation at the decoder: minimizes
/// I(Y1;U1) + I(Y1;W1|Y2,U1) subject to side distortion `d1_max` (decoder
/// sees U1) and informed distortion `d3_max` (decoder sees Y2, U1, W1).
///
/// Distortion constraints enter as penalties during the search; the result
/// is the best strictly feasible rate found. Feasibility is prechecked with
/// lossless channels. Deterministic given the seed; no optimality claim.
pub fn corollary1_min_rate<T: Real>(
    prob: &DiscreteProblem<T>,
    d1_max: T,
    d3_max: T,
    cards: (usize, usize),
    budget: usize,
    seed: u64,
) -> Result<T> {
    if budget == 0 {
        return Err(Error::InvalidArgument("optimizer budget must be positive".into()));
    }
    let (cu, cw) = cards;
    if cu == 0 || cw == 0 {
        return Err(Error::InvalidArgument("auxiliary alphabets must be nonempty".into()));
    }
    for (name, d) in [("d1_max", d1_max), ("d3_max", d3_max)] {
        if !(d >= T::zero()) || !d.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "{name} must be finite and nonnegative, got {d}"
            )));
        }
    }
    // Feasibility floor: a lossless description of Y1 leaves the decoders
    // with the full observation, so no channel beats these distortions.
    let base = prob.joint();
    let (_, d1_floor) = derive_decoder(&base, &[1], &prob.dist, prob.x_card, prob.xhat_card);
    let (_, d3_floor) = derive_decoder(&base, &[1, 2], &prob.dist, prob.x_card, prob.xhat_card);
    let slack = T::lit(FEASIBILITY_TOL);
    if d1_floor > d1_max + slack || d3_floor > d3_max + slack {
        return Err(Error::InfeasibleDistortion(format!(
            "demands ({d1_max}, {d3_max}) below the lossless floors ({d1_floor}, {d3_floor})"
        )));
    }
    // Axes: 0 X, 1 Y1, 2 Y2, 3 U1, 4 W1.
    let dims = [prob.x_card, prob.y1_card, prob.y2_card, cu, cw];
    let evaluate = |table: &[T]| -> Result<(T, T, T)> {
        let joint = assemble(
            &dims,
            &[(&[0, 1, 2][..], &prob.pmf[..]), (&[1, 3, 4][..], table)],
        )?;
        let rate = clamp_rate(joint.mi(&[1], &[3], &[]) + joint.mi(&[1], &[4], &[2, 3]));
        let (_, d1) = derive_decoder(&joint, &[3], &prob.dist, prob.x_card, prob.xhat_card);
        let (_, d3) = derive_decoder(&joint, &[2, 3, 4], &prob.dist, prob.x_card, prob.xhat_card);
        Ok((rate, d1, d3))
    };
    let penalized = |rate: T, d1: T, d3: T| -> T {
        rate + T::lit(PENALTY) * ((d1 - d1_max).max(T::zero()) + (d3 - d3_max).max(T::zero()))
    };
    let cols = cu * cw;
    let mut best_feasible: Option<T> = None;
    let record = |rate: T, d1: T, d3: T, best: &mut Option<T>| {
        if d1 <= d1_max + slack && d3 <= d3_max + slack {
            let better = best.map(|b| rate < b).unwrap_or(true);
            if better {
                *best = Some(rate);
            }
        }
    };
    // The zero-rate channel is always a candidate; descent starting from an
    // informative channel cannot reach exact rate zero in finite steps.
    let constant: Vec<T> = vec![T::one() / T::lit(cols as f64); prob.y1_card * cols];
    let (rate, d1, d3) = evaluate(&constant)?;
    record(rate, d1, d3, &mut best_feasible);
    let budget = budget - 1;
    for restart in 0..RESTARTS {
        let share = budget / RESTARTS + usize::from(restart < budget % RESTARTS);
        if share == 0 {
            continue;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (restart as u64).wrapping_mul(RESTART_STRIDE));
        let mut table: Vec<T> = if restart == 0 {
            peaked_rows(prob.y1_card, cols, |y| (y % cu) * cw + y % cw)
        } else {
            dirichlet_rows(&mut rng, prob.y1_card, cols)
        };
        let (rate, d1, d3) = evaluate(&table)?;
        record(rate, d1, d3, &mut best_feasible);
        let mut score = penalized(rate, d1, d3);
        let mut used = 1usize;
        while used < share {
            let progress = used as f64 / share as f64;
            let scale = 0.5 * (0.01_f64 / 0.5).powf(progress);
            let mut trial = table.clone();
            perturb_row(&mut rng, &mut trial, prob.y1_card, cols, scale);
            let (rate, d1, d3) = evaluate(&trial)?;
            used += 1;
            record(rate, d1, d3, &mut best_feasible);
            let trial_score = penalized(rate, d1, d3);
            if trial_score < score {
                score = trial_score;
                table = trial;
            }
        }
    }
    best_feasible.ok_or_else(|| {
        Error::InfeasibleDistortion(
            "no feasible channels found within the budget; try larger alphabets or budget".into(),
        )
    })
}

/// Single-observation instance for the two-description evaluator.
#[derive(Debug, Clone, PartialEq)]
pub struct MdProblem<T> {
    /// Source alphabet size.
    pub x_card: usize,
    /// Observation alphabet size.
    pub y_card: usize,
    /// Reconstruction alphabet size.
    pub xhat_card: usize,
    /// Joint pmf P(x, y), row-major.
    pub pmf: Vec<T>,
    /// Distortion d(x, xhat), row-major.
    pub dist: Vec<T>,
}

impl<T: Real> MdProblem<T> {
    /// Validates shapes, normalization, and distortion entries.
    pub fn new(
        x_card: usize,
        y_card: usize,
        xhat_card: usize,
        pmf: Vec<T>,
        dist: Vec<T>,
    ) -> Result<Self> {
        let joint = JointPmf::new(vec![x_card, y_card], pmf)?;
        if dist.len() != x_card * xhat_card {
            return Err(Error::DimensionMismatch(format!(
                "distortion matrix has {} entries, expected {}",
                dist.len(),
                x_card * xhat_card
            )));
        }
        for &v in &dist {
            if !(v >= T::zero()) || !v.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "distortion entries must be finite and nonnegative, got {v}"
                )));
            }
        }
        Ok(MdProblem { x_card, y_card, xhat_card, pmf: joint.p, dist })
    }
}

/// Joint conditional over a base layer and three reconstructions given the
/// observation.
#[derive(Debug, Clone, PartialEq)]
pub struct MdChannels<T> {
    /// Alphabet sizes of (base, first, second, joint) reconstructions.
    pub cards: [usize; 4],
    /// P(base, r1, r2, r3 | y), row-major over (y; base, r1, r2, r3).
    pub channel: Vec<T>,
}

impl<T: Real> MdChannels<T> {
    /// Validates conditional rows.
    pub fn new(y_card: usize, cards: [usize; 4], channel: Vec<T>) -> Result<Self> {
        if cards.contains(&0) {
            return Err(Error::InvalidArgument("alphabet sizes must be positive".into()));
        }
        check_rows("channel", &channel, y_card, cards.iter().product())?;
        Ok(MdChannels { cards, channel })
    }
}

/// Evaluates the two-description (one observation) inner bound at fixed
/// channels: individual rate bounds I(Y; base, R_i), the sum bound with the
/// base coded twice plus the side-reconstruction correlation and the joint
/// refinement, and the direct distortions of the three reconstructions.
///
/// With `require_independent_sides`, rejects channels whose base layer is
/// nonconstant or whose side reconstructions are dependent (the subclass
/// for which the sum bound is known tight on its rate slice).
pub fn theorem3_evaluate<T: Real>(
    prob: &MdProblem<T>,
    aux: &MdChannels<T>,
    require_independent_sides: bool,
) -> Result<EvaluatedBounds<T>> {
    for (i, name) in [(1usize, "first"), (2, "second"), (3, "joint")] {
        if aux.cards[i] != prob.xhat_card {
            return Err(Error::DimensionMismatch(format!(
                "{name} reconstruction alphabet {} must match the problem's {}",
                aux.cards[i], prob.xhat_card
            )));
        }
    }
    // Axes: 0 X, 1 Y, 2 base, 3 r1, 4 r2, 5 r3.
    let dims = [
        prob.x_card,
        prob.y_card,
        aux.cards[0],
        aux.cards[1],
        aux.cards[2],
        aux.cards[3],
    ];
    let joint = assemble(
        &dims,
        &[(&[0, 1][..], &prob.pmf[..]), (&[1, 2, 3, 4, 5][..], &aux.channel[..])],
    )?;
    if require_independent_sides {
        let base_entropy = joint.entropy(&[2]);
        let side_dependence = joint.mi(&[3], &[4], &[]);
        if base_entropy > T::lit(1e-9) || side_dependence > T::lit(1e-9) {
            return Err(Error::NotApplicable(format!(
                "restricted class needs a constant base (H = {base_entropy}) and \
                 independent side reconstructions (I = {side_dependence})"
            )));
        }
    }
    let r1_bound = clamp_rate(joint.mi(&[1], &[2, 3], &[]));
    let r2_bound = clamp_rate(joint.mi(&[1], &[2, 4], &[]));
    let sum_bound = clamp_rate(
        T::lit(2.0) * joint.mi(&[1], &[2], &[])
            + joint.mi(&[3], &[4], &[2])
            + joint.mi(&[1], &[3, 4, 5], &[2]),
    );
    let expected = |axis: usize| -> T {
        let marg = joint.marginal(&[0, axis]);
        let cols = dims[axis];
        let mut e = T::zero();
        for x in 0..prob.x_card {
            for xh in 0..cols {
                e = e + marg[x * cols + xh] * prob.dist[x * prob.xhat_card + xh];
            }
        }
        e
    };
    Ok(EvaluatedBounds {
        r1_bound,
        r2_bound,
        sum_bound,
        distortions: (expected(3), expected(4), expected(5)),
    })
}

/// Common-layer channels: a base triple drawn from the common part and a
/// refinement drawn from the triple.
#[derive(Debug, Clone, PartialEq)]
pub struct ZChannels<T> {
    /// Alphabet sizes of the four common-layer variables.
    pub cards: [usize; 4],
    /// P(c0, c1, c2 | z), row-major over (z; c0, c1, c2).
    pub base: Vec<T>,
    /// P(c3 | z, c0, c1, c2), row-major over (z, c0, c1, c2; c3).
    pub refine: Vec<T>,
}

impl<T: Real> ZChannels<T> {
    /// Validates conditional rows against the common-part cardinality.
    pub fn new(z_card: usize, cards: [usize; 4], base: Vec<T>, refine: Vec<T>) -> Result<Self> {
        if cards.contains(&0) || z_card == 0 {
            return Err(Error::InvalidArgument("alphabet sizes must be positive".into()));
        }
        check_rows("base", &base, z_card, cards[0] * cards[1] * cards[2])?;
        check_rows(
            "refine",
            &refine,
            z_card * cards[0] * cards[1] * cards[2],
            cards[3],
        )?;
        Ok(ZChannels { cards, base, refine })
    }

    /// All-constant common layer (contributes nothing).
    pub fn constant(z_card: usize) -> Self {
        ZChannels {
            cards: [1, 1, 1, 1],
            base: vec![T::one(); z_card],
            refine: vec![T::one(); z_card],
        }
    }
}

/// Per-encoder layered channels conditioned on the visible common-layer
/// variables.
#[derive(Debug, Clone, PartialEq)]
pub struct LayeredChannels<T> {
    /// Coarse alphabet of encoder 1.
    pub u1_card: usize,
    /// Refinement alphabet of encoder 1.
    pub w1_card: usize,
    /// Coarse alphabet of encoder 2.
    pub u2_card: usize,
    /// Refinement alphabet of encoder 2.
    pub w2_card: usize,
    /// P(u1 | y1, c0, c1), row-major over (y1, c0, c1; u1).
    pub u1: Vec<T>,
    /// P(w1 | y1, c0, c1, c2, c3, u1), row-major.
    pub w1: Vec<T>,
    /// P(u2 | y2, c0, c2), row-major over (y2, c0, c2; u2).
    pub u2: Vec<T>,
    /// P(w2 | y2, c0, c1, c2, c3, u2), row-major.
    pub w2: Vec<T>,
}

impl<T: Real> LayeredChannels<T> {
    /// Constant (rate-zero) distributed layer.
    pub fn constant(y1_card: usize, y2_card: usize, zc: &ZChannels<T>) -> Self {
        let [c0, c1, c2, c3] = zc.cards;
        LayeredChannels {
            u1_card: 1,
            w1_card: 1,
            u2_card: 1,
            w2_card: 1,
            u1: vec![T::one(); y1_card * c0 * c1],
            w1: vec![T::one(); y1_card * c0 * c1 * c2 * c3],
            u2: vec![T::one(); y2_card * c0 * c2],
            w2: vec![T::one(); y2_card * c0 * c1 * c2 * c3],
        }
    }
}

/// Evaluates the layered inner bound that codes the common part of the two
/// observations centrally (two-description style) underneath a distributed
/// two-layer refinement.
///
/// Returns the two description-rate bounds, the sum bound, and the optimal
/// decoder distortions, where decoder i sees its common-layer variables plus
/// its own descriptions. With a constant common layer this reduces exactly
/// to [`theorem1_evaluate`]; with a constant distributed layer and the
/// source Markov through the common part it reduces to
/// [`theorem3_evaluate`].
pub fn theorem4_evaluate<T: Real>(
    prob: &DiscreteProblem<T>,
    common: &CommonPart,
    zc: &ZChannels<T>,
    lc: &LayeredChannels<T>,
) -> Result<EvaluatedBounds<T>> {
    if common.f.len() != prob.y1_card || common.g.len() != prob.y2_card {
        return Err(Error::DimensionMismatch(format!(
            "common-part maps cover ({}, {}) letters, problem has ({}, {})",
            common.f.len(),
            common.g.len(),
            prob.y1_card,
            prob.y2_card
        )));
    }
    if common.k == 0 {
        return Err(Error::InvalidArgument("common part must have at least one value".into()));
    }
    // The maps must agree on the support and stay within 1..k.
    for y1 in 0..prob.y1_card {
        for y2 in 0..prob.y2_card {
            let mut mass = T::zero();
            for x in 0..prob.x_card {
                mass = mass + prob.pmf[(x * prob.y1_card + y1) * prob.y2_card + y2];
            }
            if mass > T::zero() {
                let (a, b) = (common.f[y1], common.g[y2]);
                if a == 0 || b == 0 || a != b || a > common.k {
                    return Err(Error::InvalidArgument(format!(
                        "common-part maps disagree on supported pair ({y1}, {y2})"
                    )));
                }
            }
        }
    }
    let [c0, c1, c2, c3] = zc.cards;
    check_rows("base", &zc.base, common.k, c0 * c1 * c2)?;
    check_rows("refine", &zc.refine, common.k * c0 * c1 * c2, c3)?;
    check_rows("u1", &lc.u1, prob.y1_card * c0 * c1, lc.u1_card)?;
    check_rows("w1", &lc.w1, prob.y1_card * c0 * c1 * c2 * c3 * lc.u1_card, lc.w1_card)?;
    check_rows("u2", &lc.u2, prob.y2_card * c0 * c2, lc.u2_card)?;
    check_rows("w2", &lc.w2, prob.y2_card * c0 * c1 * c2 * c3 * lc.u2_card, lc.w2_card)?;

    // Axes: 0 X, 1 Y1, 2 Y2, 3 Z, 4 C0, 5 C1, 6 C2, 7 C3,
    //       8 U1, 9 W1, 10 U2, 11 W2.
    let dims = [
        prob.x_card,
        prob.y1_card,
        prob.y2_card,
        common.k,
        c0,
        c1,
        c2,
        c3,
        lc.u1_card,
        lc.w1_card,
        lc.u2_card,
        lc.w2_card,
    ];
    // Indicator tying Z to the first observation's component.
    let mut zind = vec![T::zero(); prob.y1_card * common.k];
    for y1 in 0..prob.y1_card {
        if common.f[y1] >= 1 {
            zind[y1 * common.k + common.f[y1] - 1] = T::one();
        } else {
            // Zero-probability letter: any column keeps rows stochastic.
            zind[y1 * common.k] = T::one();
        }
    }
    let joint = assemble(
        &dims,
        &[
            (&[0, 1, 2][..], &prob.pmf[..]),
            (&[1, 3][..], &zind[..]),
            (&[3, 4, 5, 6][..], &zc.base[..]),
            (&[3, 4, 5, 6, 7][..], &zc.refine[..]),
            (&[1, 4, 5, 8][..], &lc.u1[..]),
            (&[1, 4, 5, 6, 7, 8, 9][..], &lc.w1[..]),
            (&[2, 4, 6, 10][..], &lc.u2[..]),
            (&[2, 4, 5, 6, 7, 10, 11][..], &lc.w2[..]),
        ],
    )?;
    let r1_bound = clamp_rate(
        joint.mi(&[1], &[4, 5, 8], &[]) + joint.mi(&[1], &[9], &[4, 5, 6, 7, 8, 10, 11]),
    );
    let r2_bound = clamp_rate(
        joint.mi(&[2], &[4, 6, 10], &[]) + joint.mi(&[2], &[11], &[4, 5, 6, 7, 8, 9, 10]),
    );
    // Sum bound: distributed coarse layers given their common-layer context,
    // the common layer coded two-description style, and the joint
    // distributed refinement. The common base is charged once per
    // description; the common refinements are charged once in total.
    let sum_bound = clamp_rate(
        joint.mi(&[1], &[8], &[4, 5])
            + joint.mi(&[2], &[10], &[4, 6])
            + T::lit(2.0) * joint.mi(&[3], &[4], &[])
            + joint.mi(&[5], &[6], &[4])
            + joint.mi(&[3], &[5, 6, 7], &[4])
            + joint.mi(&[1, 2], &[9, 11], &[4, 5, 6, 7, 8, 10]),
    );
    let (_, d1) = derive_decoder(&joint, &[4, 5, 8], &prob.dist, prob.x_card, prob.xhat_card);
    let (_, d2) = derive_decoder(&joint, &[4, 6, 10], &prob.dist, prob.x_card, prob.xhat_card);
    let (_, d3) = derive_decoder(
        &joint,
        &[4, 5, 6, 7, 8, 9, 10, 11],
        &prob.dist,
        prob.x_card,
        prob.xhat_card,
    );
    Ok(EvaluatedBounds { r1_bound, r2_bound, sum_bound, distortions: (d1, d2, d3) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// X = Y1 = Y2 uniform binary, Hamming distortion.
    fn shared_bit() -> DiscreteProblem<f64> {
        let mut pmf = vec![0.0; 8];
        pmf[0] = 0.5; // (0,0,0)
        pmf[7] = 0.5; // (1,1,1)
        DiscreteProblem::new(2, 2, 2, 2, pmf, vec![0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    fn binary_entropy(p: f64) -> f64 {
        if p <= 0.0 || p >= 1.0 {
            0.0
        } else {
            -p * p.ln() - (1.0 - p) * (1.0 - p).ln()
        }
    }

    #[test]
    fn common_part_reference_cases() {
        let diag = JointPmf::new(vec![2, 2], vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        let cp = common_part(&diag).unwrap();
        assert_eq!(cp.k, 2);
        assert_eq!(cp.f, vec![1, 2]);
        assert_eq!(cp.g, vec![1, 2]);

        let full = JointPmf::new(vec![2, 2], vec![0.25; 4]).unwrap();
        assert_eq!(common_part(&full).unwrap().k, 1);

        // Support {(0,0),(1,0),(2,1),(2,2)}.
        let p = 0.25;
        let sparse = JointPmf::new(
            vec![3, 3],
            vec![p, 0.0, 0.0, p, 0.0, 0.0, 0.0, p, p],
        )
        .unwrap();
        let cp = common_part(&sparse).unwrap();
        assert_eq!(cp.k, 2);
        assert_eq!(cp.f, vec![1, 1, 2]);
        assert_eq!(cp.g, vec![1, 2, 2]);

        let empty = JointPmf {
            dims: vec![2, 2],
            p: vec![0.0; 4],
        };
        assert!(common_part(&empty).is_err());
    }

    #[test]
    fn common_part_counts_blocks_and_ignores_permutations() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for blocks in 2..=5 {
            let m = 2 * blocks;
            let mut p = vec![0.0_f64; m * m];
            let mut total = 0.0;
            for b in 0..blocks {
                for dy1 in 0..2 {
                    for dy2 in 0..2 {
                        let v = uniform(&mut rng);
                        p[(2 * b + dy1) * m + (2 * b + dy2)] = v;
                        total += v;
                    }
                }
            }
            for v in p.iter_mut() {
                *v /= total;
            }
            let joint = JointPmf::new(vec![m, m], p.clone()).unwrap();
            assert_eq!(common_part(&joint).unwrap().k, blocks);

            // Permute both alphabets; the component count is unchanged.
            let perm: Vec<usize> = (0..m).map(|i| (i * 7 + 3) % m).collect();
            let mut q = vec![0.0_f64; m * m];
            for y1 in 0..m {
                for y2 in 0..m {
                    q[perm[y1] * m + perm[y2]] = p[y1 * m + y2];
                }
            }
            let joint = JointPmf::new(vec![m, m], q).unwrap();
            assert_eq!(common_part(&joint).unwrap().k, blocks);
        }
    }

    #[test]
    fn evaluate_constant_channels_gives_zero_rates_at_best_constant() {
        let prob = shared_bit();
        let aux = AuxChannels::constant(2, 2);
        let pt = theorem1_evaluate(&prob, &aux).unwrap();
        assert!(pt.sum_rate.abs() < 1e-12);
        assert!(pt.corner1.r1.abs() < 1e-12);
        assert!(pt.corner2.r2.abs() < 1e-12);
        let dm = prob.d_max();
        assert_abs_diff_eq!(pt.distortions.0, dm, epsilon = 1e-12);
        assert_abs_diff_eq!(pt.distortions.2, dm, epsilon = 1e-12);
    }

    #[test]
    fn evaluate_identity_channels_is_lossless() {
        let prob = shared_bit();
        // U_i = W_i = Y_i deterministically.
        let ident = |y_card: usize| -> Vec<f64> {
            let mut t = vec![0.0; y_card * y_card * y_card];
            for y in 0..y_card {
                t[(y * y_card + y) * y_card + y] = 1.0;
            }
            t
        };
        let aux = AuxChannels::new(2, 2, 2, 2, 2, 2, ident(2), ident(2)).unwrap();
        let pt = theorem1_evaluate(&prob, &aux).unwrap();
        assert_abs_diff_eq!(pt.sum_rate, 2.0 * 2.0_f64.ln(), epsilon = 1e-12);
        assert!(pt.distortions.0.abs() < 1e-12);
        assert!(pt.distortions.1.abs() < 1e-12);
        assert!(pt.distortions.2.abs() < 1e-12);
    }

    /// Random problem and channels over small alphabets.
    fn random_instance(rng: &mut ChaCha8Rng) -> (DiscreteProblem<f64>, AuxChannels<f64>) {
        let (x, y1, y2, xh) = (2usize, 2usize, 3usize, 2usize);
        let mut pmf = vec![0.0_f64; x * y1 * y2];
        let mut total = 0.0;
        for v in pmf.iter_mut() {
            *v = uniform(rng);
            total += *v;
        }
        for v in pmf.iter_mut() {
            *v /= total;
        }
        let mut dist = vec![0.0_f64; x * xh];
        for (i, v) in dist.iter_mut().enumerate() {
            *v = if i % (xh + 1) == 0 { 0.0 } else { 0.5 + uniform(rng) };
        }
        let prob = DiscreteProblem::new(x, y1, y2, xh, pmf, dist).unwrap();
        let aux = AuxChannels::new(
            y1,
            y2,
            2,
            2,
            2,
            2,
            dirichlet_rows(rng, y1, 4),
            dirichlet_rows(rng, y2, 4),
        )
        .unwrap();
        (prob, aux)
    }

    #[test]
    fn corner_sums_agree_and_rates_are_nonnegative() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..100 {
            let (prob, aux) = random_instance(&mut rng);
            let pt = theorem1_evaluate(&prob, &aux).unwrap();
            let s1 = pt.corner1.r1 + pt.corner1.r2;
            let s2 = pt.corner2.r1 + pt.corner2.r2;
            assert_abs_diff_eq!(s1, s2, epsilon = 1e-9);
            assert_abs_diff_eq!(s1, pt.sum_rate, epsilon = 1e-9);
            assert!(pt.corner1.r1 >= 0.0 && pt.corner2.r2 >= 0.0);
        }
    }

    #[test]
    fn derived_decoders_beat_supplied_ones() {
        let mut rng = ChaCha8Rng::seed_from_u64(78);
        for _ in 0..20 {
            let (prob, mut aux) = random_instance(&mut rng);
            let optimal = theorem1_evaluate(&prob, &aux).unwrap();
            aux.decoder1 = Some(vec![
                (rng.next_u64() % 2) as usize,
                (rng.next_u64() % 2) as usize,
            ]);
            let forced = theorem1_evaluate(&prob, &aux).unwrap();
            assert!(optimal.distortions.0 <= forced.distortions.0 + 1e-12);
        }
    }

    #[test]
    fn optimizer_is_deterministic_and_respects_budget() {
        let prob = shared_bit();
        let cards = AuxCards { u1: 1, w1: 2, u2: 1, w2: 1 };
        let weights = [1.0, 1.0, 0.0, 0.0, 2.0];
        assert!(theorem1_optimize(&prob, cards, weights, 0, 1).is_err());
        let a = theorem1_optimize(&prob, cards, weights, 400, 11).unwrap();
        let b = theorem1_optimize(&prob, cards, weights, 400, 11).unwrap();
        assert_eq!(a.sum_rate, b.sum_rate);
        assert_eq!(a.channels.channel1, b.channels.channel1);
        // Re-evaluating the reported channels reproduces the point.
        let re = theorem1_evaluate(&prob, &a.channels).unwrap();
        assert_abs_diff_eq!(re.sum_rate, a.sum_rate, epsilon = 1e-12);
        assert_abs_diff_eq!(re.distortions.2, a.distortions.2, epsilon = 1e-12);
    }

    #[test]
    fn optimizer_reaches_the_single_description_tradeoff() {
        let prob = shared_bit();
        let cards = AuxCards { u1: 1, w1: 2, u2: 1, w2: 1 };
        // Tangent weight pinning the joint distortion near 0.11.
        let mu = (0.89_f64 / 0.11).ln();
        let weights = [1.0, 1.0, 0.0, 0.0, mu];
        let pt = theorem1_optimize(&prob, cards, weights, 2000, 5).unwrap();
        let reference = 2.0_f64.ln() - binary_entropy(0.11);
        assert!(
            (pt.sum_rate - reference).abs() <= 0.02,
            "sum rate {} vs reference {reference}",
            pt.sum_rate
        );
        assert!((pt.distortions.2 - 0.11).abs() <= 0.02, "d3 {}", pt.distortions.2);
    }

    #[test]
    fn larger_alphabets_never_hurt_with_a_warm_start() {
        let prob = shared_bit();
        let weights = [1.0_f64, 1.0, 0.0, 0.0, 2.0];
        let small = AuxCards { u1: 1, w1: 2, u2: 1, w2: 1 };
        let big = AuxCards { u1: 2, w1: 3, u2: 1, w2: 2 };
        let base = theorem1_optimize(&prob, small, weights, 600, 3).unwrap();
        let embedded = embed_channels(&base.channels, big).unwrap();
        let refined =
            theorem1_optimize_from(&prob, big, weights, 600, 3, Some(&embedded)).unwrap();
        let score = |pt: &AchievablePoint<f64>| {
            pt.corner1.r1 + pt.corner1.r2 + 2.0 * pt.distortions.2
        };
        assert!(score(&refined) <= score(&base) + 1e-12);
        // The embedding itself evaluates identically.
        let re = theorem1_evaluate(&prob, &embedded).unwrap();
        assert_abs_diff_eq!(re.sum_rate, base.sum_rate, epsilon = 1e-12);
    }

    #[test]
    fn default_cards_follow_the_support_bounds() {
        let prob = shared_bit();
        let cards = default_aux_cards(&prob, 64);
        assert_eq!(cards.u1, 6);
        assert_eq!(cards.w1, 15);
        let capped = default_aux_cards(&prob, 4);
        assert_eq!(capped.w1, 4);
    }

    /// Y1 = X uniform binary, Y2 independent uniform binary.
    fn side_useless() -> DiscreteProblem<f64> {
        let mut pmf = vec![0.0; 8];
        for x in 0..2 {
            for y2 in 0..2 {
                pmf[(x * 2 + x) * 2 + y2] = 0.25;
            }
        }
        DiscreteProblem::new(2, 2, 2, 2, pmf, vec![0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    #[test]
    fn informed_rate_reference_cases() {
        let prob = side_useless();
        let dm = prob.d_max();
        assert_abs_diff_eq!(dm, 0.5, epsilon = 1e-12);
        // Loose demands cost nothing.
        let r = corollary1_min_rate(&prob, dm, dm, (2, 2), 200, 1).unwrap();
        assert!(r.abs() < 1e-9, "rate {r}");
        // Useless side observation: the informed demand reduces to ordinary
        // lossy coding of the observation.
        let r = corollary1_min_rate(&prob, 0.11, 0.11, (2, 1), 4000, 9).unwrap();
        let reference = 2.0_f64.ln() - binary_entropy(0.11);
        assert!((r - reference).abs() <= 0.02, "rate {r} vs {reference}");
        // Unreachable joint demand.
        assert!(matches!(
            corollary1_min_rate(&prob, 0.5, 0.0, (2, 2), 200, 1),
            Err(Error::InfeasibleDistortion(_))
        ));
    }

    #[test]
    fn informed_rate_is_zero_with_perfect_side_information() {
        // Y2 = X exactly; the informed decoder needs no description.
        let mut pmf = vec![0.0; 8];
        pmf[0 * 4 + 0 * 2 + 0] = 0.5;
        pmf[1 * 4 + 1 * 2 + 1] = 0.5;
        let prob = DiscreteProblem::new(2, 2, 2, 2, pmf, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        let r: f64 = corollary1_min_rate(&prob, prob.d_max(), 0.0, (2, 2), 200, 2).unwrap();
        assert!(r.abs() < 1e-9, "rate {r}");
    }

    /// Uniform four-letter source observed exactly.
    fn md_uniform4() -> MdProblem<f64> {
        let mut pmf = vec![0.0_f64; 16];
        for i in 0..4 {
            pmf[i * 4 + i] = 0.25;
        }
        let mut dist = vec![1.0_f64; 16];
        for i in 0..4 {
            dist[i * 4 + i] = 0.0;
        }
        MdProblem::new(4, 4, 4, pmf, dist).unwrap()
    }

    #[test]
    fn two_description_reference_cases() {
        let prob = md_uniform4();
        // Constant reconstructions at letter 0.
        let mut constant = vec![0.0_f64; 4 * 4 * 4 * 4 * 4];
        for y in 0..4 {
            constant[y * 256] = 1.0;
        }
        let aux = MdChannels::new(4, [4, 4, 4, 4], constant).unwrap();
        let out = theorem3_evaluate(&prob, &aux, false).unwrap();
        assert!(out.sum_bound.abs() < 1e-12);
        assert_abs_diff_eq!(out.distortions.0, 0.75, epsilon = 1e-12);

        // Both descriptions carry the observation exactly; base constant.
        let mut full = vec![0.0_f64; 4 * 1 * 4 * 4 * 4];
        for y in 0..4 {
            full[((y * 4 + y) * 4 + y) * 4 + y] = 1.0;
        }
        let aux = MdChannels::new(4, [1, 4, 4, 4], full).unwrap();
        let out = theorem3_evaluate(&prob, &aux, false).unwrap();
        let ln4 = 4.0_f64.ln();
        assert_abs_diff_eq!(out.r1_bound, ln4, epsilon = 1e-12);
        assert_abs_diff_eq!(out.sum_bound, 2.0 * ln4, epsilon = 1e-12);
        assert!(out.distortions.2.abs() < 1e-12);

        // The restricted class rejects correlated side reconstructions.
        assert!(matches!(
            theorem3_evaluate(&prob, &aux, true),
            Err(Error::NotApplicable(_))
        ));
        // A constant first description passes the restriction.
        let mut oneside = vec![0.0_f64; 4 * 1 * 4 * 4 * 4];
        for y in 0..4 {
            oneside[((y * 4) * 4 + y) * 4 + y] = 1.0;
        }
        let aux = MdChannels::new(4, [1, 4, 4, 4], oneside).unwrap();
        assert!(theorem3_evaluate(&prob, &aux, true).is_ok());
    }

    /// Binary symmetric channel as a row-stochastic table.
    fn bsc(flip: f64) -> Vec<f64> {
        vec![1.0 - flip, flip, flip, 1.0 - flip]
    }

    #[test]
    fn layered_evaluator_reduces_to_the_distributed_bound() {
        // Full-support observations: the common part is trivial.
        let pmf = vec![0.10, 0.15, 0.05, 0.20, 0.12, 0.08, 0.20, 0.10];
        let prob = DiscreteProblem::new(2, 2, 2, 2, pmf, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        let joint_obs = JointPmf {
            dims: vec![2, 2],
            p: prob.joint().marginal(&[1, 2]),
        };
        let cp = common_part(&joint_obs).unwrap();
        assert_eq!(cp.k, 1);

        let mut rng = ChaCha8Rng::seed_from_u64(55);
        let u1: Vec<f64> = dirichlet_rows(&mut rng, 2, 2);
        let w1: Vec<f64> = dirichlet_rows(&mut rng, 4, 2);
        let u2: Vec<f64> = dirichlet_rows(&mut rng, 2, 2);
        let w2: Vec<f64> = dirichlet_rows(&mut rng, 4, 2);
        let zc = ZChannels::constant(1);
        let lc = LayeredChannels {
            u1_card: 2,
            w1_card: 2,
            u2_card: 2,
            w2_card: 2,
            u1: u1.clone(),
            w1: w1.clone(),
            u2: u2.clone(),
            w2: w2.clone(),
        };
        let layered = theorem4_evaluate(&prob, &cp, &zc, &lc).unwrap();

        // The equivalent flat channels multiply the coarse and refinement
        // conditionals (w-tables are indexed by (y, u)).
        let flat = |u: &[f64], w: &[f64]| -> Vec<f64> {
            let mut t = vec![0.0_f64; 2 * 2 * 2];
            for y in 0..2 {
                for uu in 0..2 {
                    for ww in 0..2 {
                        t[(y * 2 + uu) * 2 + ww] = u[y * 2 + uu] * w[(y * 2 + uu) * 2 + ww];
                    }
                }
            }
            t
        };
        let aux = AuxChannels::new(2, 2, 2, 2, 2, 2, flat(&u1, &w1), flat(&u2, &w2)).unwrap();
        let pt = theorem1_evaluate(&prob, &aux).unwrap();
        assert_abs_diff_eq!(layered.r1_bound, pt.corner1.r1, epsilon = 1e-9);
        assert_abs_diff_eq!(layered.r2_bound, pt.corner2.r2, epsilon = 1e-9);
        assert_abs_diff_eq!(layered.sum_bound, pt.sum_rate, epsilon = 1e-9);
        assert_abs_diff_eq!(layered.distortions.0, pt.distortions.0, epsilon = 1e-9);
        assert_abs_diff_eq!(layered.distortions.2, pt.distortions.2, epsilon = 1e-9);
    }

    #[test]
    fn layered_evaluator_reduces_to_the_two_description_bound() {
        // X = Z, Y1 = Y2 = Z: the source is Markov through the common part.
        let mut pmf = vec![0.0_f64; 8];
        pmf[0] = 0.5; // (x per z) (0,0,0)
        pmf[7] = 0.5;
        let prob = DiscreteProblem::new(2, 2, 2, 2, pmf, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        let joint_obs = JointPmf {
            dims: vec![2, 2],
            p: prob.joint().marginal(&[1, 2]),
        };
        let cp = common_part(&joint_obs).unwrap();
        assert_eq!(cp.k, 2);

        // Base layer: constant c0, two noisy looks, exact refinement.
        let (a, b) = (0.15_f64, 0.3_f64);
        let mut base = vec![0.0_f64; 2 * 4];
        for z in 0..2 {
            for z1 in 0..2 {
                for z2 in 0..2 {
                    base[z * 4 + z1 * 2 + z2] = bsc(a)[z * 2 + z1] * bsc(b)[z * 2 + z2];
                }
            }
        }
        let mut refine = vec![0.0_f64; 2 * 4 * 2];
        for z in 0..2 {
            for ctx in 0..4 {
                refine[(z * 4 + ctx) * 2 + z] = 1.0;
            }
        }
        let zc = ZChannels::new(2, [1, 2, 2, 2], base, refine).unwrap();
        let lc = LayeredChannels::constant(2, 2, &zc);
        let layered = theorem4_evaluate(&prob, &cp, &zc, &lc).unwrap();

        // The same channels as a two-description evaluation on (X, Z).
        let md = MdProblem::new(
            2,
            2,
            2,
            vec![0.5, 0.0, 0.0, 0.5],
            vec![0.0, 1.0, 1.0, 0.0],
        )
        .unwrap();
        let mut channel = vec![0.0_f64; 2 * 1 * 2 * 2 * 2];
        for z in 0..2 {
            for z1 in 0..2 {
                for z2 in 0..2 {
                    channel[((z * 2 + z1) * 2 + z2) * 2 + z] =
                        bsc(a)[z * 2 + z1] * bsc(b)[z * 2 + z2];
                }
            }
        }
        let aux = MdChannels::new(2, [1, 2, 2, 2], channel).unwrap();
        let two = theorem3_evaluate(&md, &aux, false).unwrap();
        assert_abs_diff_eq!(layered.r1_bound, two.r1_bound, epsilon = 1e-9);
        assert_abs_diff_eq!(layered.r2_bound, two.r2_bound, epsilon = 1e-9);
        assert_abs_diff_eq!(layered.sum_bound, two.sum_bound, epsilon = 1e-9);
        assert_abs_diff_eq!(layered.distortions.0, two.distortions.0, epsilon = 1e-9);
        assert_abs_diff_eq!(layered.distortions.1, two.distortions.1, epsilon = 1e-9);
        assert_abs_diff_eq!(layered.distortions.2, two.distortions.2, epsilon = 1e-9);
    }
}
