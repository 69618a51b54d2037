//! Time-dependent coefficient functions.
//!
//! A [`Signal`] is an immutable expression tree evaluated pointwise in time.
//! Besides the usual algebra (constants, harmonics, sums, products) it carries
//! the specific shapes used by the bundled models: the compactly supported
//! [`spline_bump`], the train of bumps placed at the squares `n²`, the
//! plateau-hat family, the arctan transition blend and the dense-orbit
//! construction on the Lipschitz ball `P(k1, k2)`.
//!
//! The module also provides the compact-open distance [`cp_distance`] and the
//! sampled membership test [`membership_check`] for `P(k1, k2)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Half-width of the plateau of [`spline_bump`].
pub const BUMP_PLATEAU: f64 = 1.0;
/// Half-width of the support of [`spline_bump`].
pub const BUMP_SUPPORT: f64 = 1.2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SignalError {
    #[error("dense orbit needs at least one seed")]
    EmptySeeds,
    #[error("invalid bounds for P: k1 = {k1}, k2 = {k2} (both must be positive)")]
    InvalidParams { k1: f64, k2: f64 },
    #[error("seed {index} is not in P: {reason}")]
    SeedOutsideSpace { index: usize, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Wave {
    Sin,
    Cos,
}

/// Bounds defining the function space `P = { p : |p|∞ ≤ k1, Lip(p) ≤ k2 }`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PSpaceParams {
    pub k1: f64,
    pub k2: f64,
}

impl PSpaceParams {
    pub fn new(k1: f64, k2: f64) -> Result<Self, SignalError> {
        if k1 > 0.0 && k2 > 0.0 && k1.is_finite() && k2.is_finite() {
            Ok(Self { k1, k2 })
        } else {
            Err(SignalError::InvalidParams { k1, k2 })
        }
    }

    /// Length of the linear-interpolation gap between consecutive intervals
    /// of the dense orbit, `2 k1 / k2`.
    pub fn gap(&self) -> f64 {
        2.0 * self.k1 / self.k2
    }
}

impl Default for PSpaceParams {
    fn default() -> Self {
        Self { k1: 1.0, k2: 1.0 }
    }
}

/// Composable real function of time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Signal {
    Constant {
        value: f64,
    },
    /// `amplitude * wave(omega * t + phase)`.
    Harmonic {
        amplitude: f64,
        omega: f64,
        #[serde(default)]
        phase: f64,
        wave: Wave,
    },
    Sum {
        terms: Vec<Signal>,
    },
    Product {
        factors: Vec<Signal>,
    },
    /// `scale * signal(t) + offset`.
    ScaleAdd {
        signal: Box<Signal>,
        scale: f64,
        #[serde(default)]
        offset: f64,
    },
    /// C¹ cubic spline equal to 1 on `[-1, 1]` and 0 outside `[-1.2, 1.2]`.
    SplineBump,
    /// `sum_{n >= first, n <= last} bump(t - n²)`.
    BumpTrain {
        #[serde(default = "default_train_start")]
        first: u64,
        #[serde(default)]
        last: Option<u64>,
    },
    /// `max{-1, min{1, 1 - k/2 - t}, min{1, 1 - k/2 + t}}`.
    PlateauHat {
        k: f64,
    },
    /// `(base(t) - target)(1/2 - arctan(k t - 1/k)/π) + target`; equals `base` for `k = 0`.
    ArctanBlend {
        base: Box<Signal>,
        target: f64,
        k: f64,
    },
    /// `signal(t + by)`.
    Shift {
        signal: Box<Signal>,
        by: f64,
    },
    /// `1 + a exp(-c t²)`.
    GaussianFactor {
        a: f64,
        c: f64,
    },
    DenseOrbit(DenseOrbit),
}

fn default_train_start() -> u64 {
    2
}

impl Signal {
    pub fn constant(value: f64) -> Self {
        Signal::Constant { value }
    }

    pub fn sin(amplitude: f64, omega: f64) -> Self {
        Signal::Harmonic {
            amplitude,
            omega,
            phase: 0.0,
            wave: Wave::Sin,
        }
    }

    pub fn cos(amplitude: f64, omega: f64) -> Self {
        Signal::Harmonic {
            amplitude,
            omega,
            phase: 0.0,
            wave: Wave::Cos,
        }
    }

    pub fn sum(terms: Vec<Signal>) -> Self {
        Signal::Sum { terms }
    }

    pub fn product(factors: Vec<Signal>) -> Self {
        Signal::Product { factors }
    }

    pub fn scale_add(self, scale: f64, offset: f64) -> Self {
        Signal::ScaleAdd {
            signal: Box::new(self),
            scale,
            offset,
        }
    }

    /// The hunting forcing `b(t) = sum_{n >= 2} bump(t - n²)`.
    pub fn bump_train() -> Self {
        Signal::BumpTrain {
            first: 2,
            last: None,
        }
    }

    pub fn plateau_hat(k: f64) -> Self {
        Signal::PlateauHat { k }
    }

    pub fn arctan_blend(base: Signal, target: f64, k: f64) -> Self {
        Signal::ArctanBlend {
            base: Box::new(base),
            target,
            k,
        }
    }

    pub fn gaussian_factor(a: f64, c: f64) -> Self {
        Signal::GaussianFactor { a, c }
    }

    pub fn dense_orbit(seeds: Vec<Signal>, params: PSpaceParams) -> Result<Self, SignalError> {
        Ok(Signal::DenseOrbit(DenseOrbit::new(seeds, params)?))
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Signal::Constant { value } => *value,
            Signal::Harmonic {
                amplitude,
                omega,
                phase,
                wave,
            } => {
                let arg = omega * t + phase;
                amplitude
                    * match wave {
                        Wave::Sin => arg.sin(),
                        Wave::Cos => arg.cos(),
                    }
            }
            Signal::Sum { terms } => terms.iter().map(|s| s.eval(t)).sum(),
            Signal::Product { factors } => factors.iter().map(|s| s.eval(t)).product(),
            Signal::ScaleAdd {
                signal,
                scale,
                offset,
            } => scale * signal.eval(t) + offset,
            Signal::SplineBump => spline_bump(t),
            Signal::BumpTrain { first, last } => bump_train(t, *first, *last),
            Signal::PlateauHat { k } => plateau_hat(*k, t),
            Signal::ArctanBlend { base, target, k } => {
                let b = base.eval(t);
                if *k == 0.0 {
                    b
                } else {
                    (b - target) * (0.5 - (k * t - 1.0 / k).atan() / PI) + target
                }
            }
            Signal::Shift { signal, by } => signal.eval(t + by),
            Signal::GaussianFactor { a, c } => 1.0 + a * (-c * t * t).exp(),
            Signal::DenseOrbit(orbit) => orbit.eval(t),
        }
    }

    /// `eval(shift(p, s), t) == eval(p, t + s)`.
    pub fn shift(&self, s: f64) -> Signal {
        match self {
            Signal::Shift { signal, by } => Signal::Shift {
                signal: signal.clone(),
                by: by + s,
            },
            other => Signal::Shift {
                signal: Box::new(other.clone()),
                by: s,
            },
        }
    }

    /// Samples `[t0, t1]` with `samples_per_unit` points per time unit.
    pub fn sample(&self, t0: f64, t1: f64, samples_per_unit: usize) -> Vec<(f64, f64)> {
        uniform_grid(t0, t1, samples_per_unit)
            .into_iter()
            .map(|t| (t, self.eval(t)))
            .collect()
    }
}

impl Default for Signal {
    fn default() -> Self {
        Signal::constant(0.0)
    }
}

/// Hermite cubic weight on `[0, 1]`: value 1 with zero slope at 0, value 0
/// with zero slope at 1.
#[inline]
fn hermite_fall(s: f64) -> f64 {
    1.0 - s * s * (3.0 - 2.0 * s)
}

pub fn spline_bump(t: f64) -> f64 {
    let a = t.abs();
    if a <= BUMP_PLATEAU {
        1.0
    } else if a >= BUMP_SUPPORT {
        0.0
    } else {
        hermite_fall((a - BUMP_PLATEAU) / (BUMP_SUPPORT - BUMP_PLATEAU))
    }
}

fn bump_train(t: f64, first: u64, last: Option<u64>) -> f64 {
    // Only offsets n² within BUMP_SUPPORT of t contribute.
    let lo = t - BUMP_SUPPORT;
    let hi = t + BUMP_SUPPORT;
    if hi <= 0.0 {
        return 0.0;
    }
    let mut n = if lo <= 0.0 {
        0
    } else {
        lo.sqrt().floor() as u64
    };
    n = n.max(first);
    let mut total = 0.0;
    loop {
        if last.is_some_and(|l| n > l) {
            break;
        }
        let center = (n * n) as f64;
        if center >= hi {
            break;
        }
        total += spline_bump(t - center);
        n += 1;
    }
    total
}

fn plateau_hat(k: f64, t: f64) -> f64 {
    let top = 1.0 - k / 2.0;
    (-1.0f64)
        .max((1.0f64).min(top - t))
        .max((1.0f64).min(top + t))
}

/// Uniform grid of `[t0, t1]` with spacing `1/samples_per_unit` anchored at
/// integer multiples of the spacing, plus both endpoints.
pub fn uniform_grid(t0: f64, t1: f64, samples_per_unit: usize) -> Vec<f64> {
    let n = samples_per_unit.max(1) as f64;
    let mut out = vec![t0];
    let mut i = (t0 * n).floor() as i64 + 1;
    loop {
        let t = i as f64 / n;
        if t >= t1 {
            break;
        }
        if t > t0 {
            out.push(t);
        }
        i += 1;
    }
    if t1 > t0 {
        out.push(t1);
    }
    out
}

/// Function whose forward orbit under the time shift is dense in `P`.
///
/// The positive half-line is partitioned into blocks. Block 1 is the single
/// interval `[0, 2]` carrying seed 1; block `j >= 2` holds `j` intervals of
/// length `2j` carrying seeds `1..=j` (seed indices wrap around the list).
/// Consecutive intervals are separated by gaps of length `2 k1 / k2` filled by
/// linear interpolation, and the result is extended as an even function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DenseOrbit {
    seeds: Vec<Signal>,
    params: PSpaceParams,
}

/// One interval of the dense-orbit schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduledInterval {
    pub block: usize,
    /// Zero-based position inside the block.
    pub position: usize,
    /// Zero-based index into the seed list.
    pub seed: usize,
    pub start: f64,
    pub half_length: f64,
}

impl ScheduledInterval {
    pub fn end(&self) -> f64 {
        self.start + 2.0 * self.half_length
    }

    /// Shift `s` such that `q(t + s) = seed(t)` for `|t| <= half_length`.
    pub fn center(&self) -> f64 {
        self.start + self.half_length
    }
}

impl DenseOrbit {
    pub fn new(seeds: Vec<Signal>, params: PSpaceParams) -> Result<Self, SignalError> {
        if seeds.is_empty() {
            return Err(SignalError::EmptySeeds);
        }
        let params = PSpaceParams::new(params.k1, params.k2)?;
        Ok(Self { seeds, params })
    }

    pub fn seeds(&self) -> &[Signal] {
        &self.seeds
    }

    pub fn params(&self) -> PSpaceParams {
        self.params
    }

    fn seed_index(&self, position: usize) -> usize {
        position % self.seeds.len()
    }

    fn block_start(&self, block: usize) -> f64 {
        let gap = self.params.gap();
        // Block 1 is [0, 2]; block j >= 2 spans j(2j) + (j-1) gap.
        let mut start = 0.0;
        for j in 1..block {
            start += self.block_span(j) + gap;
        }
        start
    }

    fn block_span(&self, block: usize) -> f64 {
        if block == 1 {
            2.0
        } else {
            let j = block as f64;
            j * 2.0 * j + (j - 1.0) * self.params.gap()
        }
    }

    fn interval_in_block(
        &self,
        block: usize,
        position: usize,
        block_start: f64,
    ) -> ScheduledInterval {
        let half = if block == 1 { 1.0 } else { block as f64 };
        let start = block_start + position as f64 * (2.0 * half + self.params.gap());
        ScheduledInterval {
            block,
            position,
            seed: self.seed_index(position),
            start,
            half_length: half,
        }
    }

    /// Interval of block `block` whose seed is the `seed`-th (zero-based)
    /// list entry, if that block schedules it.
    pub fn occurrence(&self, seed: usize, block: usize) -> Option<ScheduledInterval> {
        if block == 0 || seed >= self.seeds.len() {
            return None;
        }
        let count = block;
        let start = self.block_start(block);
        (0..count)
            .map(|pos| self.interval_in_block(block, pos, start))
            .find(|iv| iv.seed == seed)
    }

    /// Intervals of the schedule up to and including `last_block`.
    pub fn schedule(&self, last_block: usize) -> Vec<ScheduledInterval> {
        let mut out = Vec::new();
        let mut start = 0.0;
        for block in 1..=last_block {
            for pos in 0..block {
                out.push(self.interval_in_block(block, pos, start));
            }
            start += self.block_span(block) + self.params.gap();
        }
        out
    }

    pub fn eval(&self, t: f64) -> f64 {
        let t = t.abs();
        let gap = self.params.gap();
        let mut block = 1usize;
        let mut start = 0.0;
        loop {
            let span = self.block_span(block);
            if t <= start + span {
                let half = if block == 1 { 1.0 } else { block as f64 };
                let period = 2.0 * half + gap;
                let offset = t - start;
                let pos = ((offset / period).floor() as usize).min(block - 1);
                let iv = self.interval_in_block(block, pos, start);
                if t <= iv.end() {
                    return self.seeds[iv.seed].eval(t - iv.center());
                }
                // Gap after a non-final interval of the block.
                let next = self.interval_in_block(block, pos + 1, start);
                return self.interpolate_gap(&iv, &next, t);
            }
            let next_start = start + span + gap;
            if t < next_start {
                let last = self.interval_in_block(block, block - 1, start);
                let next = self.interval_in_block(block + 1, 0, next_start);
                return self.interpolate_gap(&last, &next, t);
            }
            start = next_start;
            block += 1;
        }
    }

    fn interpolate_gap(&self, left: &ScheduledInterval, right: &ScheduledInterval, t: f64) -> f64 {
        let q_left = self.seeds[left.seed].eval(left.half_length);
        let q_right = self.seeds[right.seed].eval(-right.half_length);
        let w = (t - left.end()) / (right.start - left.end());
        q_left + (q_right - q_left) * w
    }
}

/// Depth-truncated compact-open distance together with its truncation bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CpDistance {
    pub value: f64,
    /// Upper bound `2^-depth` on the omitted tail of the series.
    pub tail_bound: f64,
}

/// `d(p, q) = sum_n 2^-n s_n / (1 + s_n)` with `s_n = sup_{[-n, n]} |p - q|`,
/// truncated at `depth` and sampled with `samples_per_unit` points per unit.
pub fn cp_distance(p: &Signal, q: &Signal, depth: usize, samples_per_unit: usize) -> CpDistance {
    let depth = depth.max(1);
    let g = samples_per_unit.max(1) as i64;
    let diff = |i: i64| {
        let t = i as f64 / g as f64;
        (p.eval(t) - q.eval(t)).abs()
    };
    let mut sup = diff(0);
    let mut value = 0.0;
    let mut weight = 1.0;
    for n in 1..=depth as i64 {
        for i in ((n - 1) * g + 1)..=(n * g) {
            sup = sup.max(diff(i)).max(diff(-i));
        }
        weight *= 0.5;
        value += weight * sup / (1.0 + sup);
    }
    CpDistance {
        value,
        tail_bound: weight,
    }
}

/// Relative slack allowed on sampled difference quotients.
pub const LIPSCHITZ_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MembershipReport {
    pub pass: bool,
    pub sup_norm: f64,
    pub sup_witness: f64,
    pub lipschitz: f64,
    pub lipschitz_witness: f64,
}

/// Sampled test of `|p| <= k1` and `Lip(p) <= k2` on `[t0, t1]`.
pub fn membership_check(
    p: &Signal,
    params: PSpaceParams,
    window: (f64, f64),
    samples_per_unit: usize,
) -> MembershipReport {
    let samples = p.sample(window.0, window.1, samples_per_unit);
    let mut sup_norm = 0.0;
    let mut sup_witness = window.0;
    let mut lipschitz = 0.0;
    let mut lipschitz_witness = window.0;
    for (i, &(t, v)) in samples.iter().enumerate() {
        if !v.is_finite() || v.abs() > sup_norm {
            sup_norm = if v.is_finite() {
                v.abs()
            } else {
                f64::INFINITY
            };
            sup_witness = t;
        }
        if i > 0 {
            let (tp, vp) = samples[i - 1];
            let q = ((v - vp) / (t - tp)).abs();
            if !q.is_finite() || q > lipschitz {
                lipschitz = q;
                lipschitz_witness = tp;
            }
        }
    }
    let pass = sup_norm <= params.k1 * (1.0 + LIPSCHITZ_SLACK)
        && lipschitz <= params.k2 * (1.0 + LIPSCHITZ_SLACK);
    MembershipReport {
        pass,
        sup_norm,
        sup_witness,
        lipschitz,
        lipschitz_witness,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn hermite_oracle() -> [f64; 4] {
        // Cubic c0 + c1 t + c2 t² + c3 t³ with Γ(1)=1, Γ'(1)=0, Γ(1.2)=0, Γ'(1.2)=0.
        let rows = |t: f64| ([1.0, t, t * t, t * t * t], [0.0, 1.0, 2.0 * t, 3.0 * t * t]);
        let (v1, d1) = rows(1.0);
        let (v2, d2) = rows(1.2);
        let m = nalgebra::Matrix4::from_rows(&[
            nalgebra::RowVector4::from_row_slice(&v1),
            nalgebra::RowVector4::from_row_slice(&d1),
            nalgebra::RowVector4::from_row_slice(&v2),
            nalgebra::RowVector4::from_row_slice(&d2),
        ]);
        let rhs = nalgebra::Vector4::new(1.0, 0.0, 0.0, 0.0);
        let c = m.lu().solve(&rhs).expect("hermite system is regular");
        [c[0], c[1], c[2], c[3]]
    }

    #[test]
    fn spline_bump_matches_hermite_system() {
        let c = hermite_oracle();
        let cubic = |t: f64| c[0] + c[1] * t + c[2] * t * t + c[3] * t * t * t;
        assert_abs_diff_eq!(cubic(1.1), 0.5, epsilon = 1e-9);
        for i in 0..=40 {
            let t = 1.0 + 0.2 * i as f64 / 40.0;
            assert_abs_diff_eq!(spline_bump(t), cubic(t), epsilon = 1e-9);
            assert_abs_diff_eq!(spline_bump(-t), cubic(t), epsilon = 1e-9);
        }
        assert_eq!(spline_bump(0.0), 1.0);
        assert_abs_diff_eq!(spline_bump(1.1), 0.5, epsilon = 1e-14);
        assert_eq!(spline_bump(1.3), 0.0);
    }

    #[test]
    fn spline_bump_is_c1_at_knots() {
        let h = 1e-7;
        for knot in [-1.2, -1.0, 1.0, 1.2] {
            let left = (spline_bump(knot) - spline_bump(knot - h)) / h;
            let right = (spline_bump(knot + h) - spline_bump(knot)) / h;
            assert!(
                (left - right).abs() < 1e-5,
                "knot {knot}: {left} vs {right}"
            );
        }
    }

    #[test]
    fn bump_train_values() {
        let b = Signal::bump_train();
        assert_eq!(b.eval(4.0), 1.0);
        assert_eq!(b.eval(0.0), 0.0);
        assert_eq!(b.eval(6.5), 0.0);
        assert_eq!(b.eval(1.0), 0.0);
        assert_eq!(b.eval(-9.0), 0.0);
        assert_eq!(b.eval(100.5), 1.0);
        assert_abs_diff_eq!(b.eval(10.1), 0.5, epsilon = 1e-12);
        let truncated = Signal::BumpTrain {
            first: 2,
            last: Some(3),
        };
        assert_eq!(truncated.eval(9.0), 1.0);
        assert_eq!(truncated.eval(16.0), 0.0);
    }

    #[test]
    fn shift_examples() {
        let p = Signal::sin(1.0, 1.0);
        assert_abs_diff_eq!(p.shift(PI).eval(0.0), 0.0, epsilon = 1e-15);
        let q = Signal::sum(vec![Signal::bump_train(), Signal::cos(0.3, 2.0)]);
        for i in -50..50 {
            let t = i as f64 * 0.37;
            assert_eq!(q.shift(0.0).eval(t), q.eval(t));
            assert_abs_diff_eq!(
                q.shift(1.5).shift(-0.25).eval(t),
                q.shift(1.25).eval(t),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn cp_distance_constants() {
        let one = Signal::constant(1.0);
        let d = cp_distance(&one, &Signal::constant(-1.0), 30, 4);
        assert_abs_diff_eq!(d.value, 2.0 / 3.0, epsilon = 2f64.powi(-30));
        let d = cp_distance(&Signal::constant(0.0), &one, 30, 4);
        assert_abs_diff_eq!(d.value, 0.5, epsilon = 2f64.powi(-30));
        assert_eq!(d.tail_bound, 2f64.powi(-30));
        let p = Signal::plateau_hat(3.0);
        assert_eq!(cp_distance(&p, &p, 20, 64).value, 0.0);
    }

    #[test]
    fn membership_examples() {
        let params = PSpaceParams::default();
        assert!(membership_check(&Signal::plateau_hat(1.0), params, (-10.0, 10.0), 64).pass);
        let r = membership_check(&Signal::constant(2.0), params, (-1.0, 1.0), 8);
        assert!(!r.pass);
        assert_eq!(r.sup_norm, 2.0);
        let r = membership_check(&Signal::sin(2.0, 1.0), params, (-10.0, 10.0), 64);
        assert!(!r.pass);
        assert!((r.sup_norm - 2.0).abs() < 1e-3);
    }

    #[test]
    fn plateau_hat_shape() {
        // k = 0 is the constant 1; large k has a -1 valley of half-width k/2 - 2.
        for i in -40..40 {
            let t = i as f64 * 0.25;
            assert_eq!(plateau_hat(0.0, t), 1.0);
        }
        assert_eq!(plateau_hat(10.0, 0.0), -1.0);
        assert_eq!(plateau_hat(10.0, 3.0), -1.0);
        assert_eq!(plateau_hat(10.0, 5.0), 1.0);
        assert_eq!(plateau_hat(1.0, 0.0), 0.5);
    }

    #[test]
    fn arctan_blend_limits() {
        let base = Signal::sin(1.0, 1.0 / 20.0);
        let blend = Signal::arctan_blend(base.clone(), 0.0, 0.5);
        assert!((blend.eval(-1e6) - base.eval(-1e6)).abs() < 1e-5);
        assert!(blend.eval(1e7).abs() < 1e-6);
        let k0 = Signal::arctan_blend(base.clone(), -1.0, 0.0);
        assert_eq!(k0.eval(3.0), base.eval(3.0));
    }

    #[test]
    fn dense_orbit_schedule_arithmetic() {
        let p1 = Signal::plateau_hat(1.0);
        let orbit = DenseOrbit::new(vec![p1.clone()], PSpaceParams::default()).unwrap();
        let iv = orbit.occurrence(0, 2).unwrap();
        assert_eq!((iv.start, iv.end()), (4.0, 8.0));
        let q = Signal::DenseOrbit(orbit);
        for i in -200..=200 {
            let t = i as f64 * 0.01;
            assert_abs_diff_eq!(q.eval(6.0 + t), p1.eval(t), epsilon = 1e-14);
        }
    }

    #[test]
    fn dense_orbit_matches_first_six_intervals() {
        // k = 2 k1 / k2 = 3 for k1 = 1.5, k2 = 1.
        let seeds = vec![
            Signal::constant(0.1),
            Signal::constant(0.2),
            Signal::constant(0.3),
        ];
        let orbit = DenseOrbit::new(seeds, PSpaceParams::new(1.5, 1.0).unwrap()).unwrap();
        let k = 3.0;
        let expected = [
            (0.0, 2.0, 0),
            (2.0 + k, 6.0 + k, 0),
            (6.0 + 2.0 * k, 10.0 + 2.0 * k, 1),
            (10.0 + 3.0 * k, 16.0 + 3.0 * k, 0),
            (16.0 + 4.0 * k, 22.0 + 4.0 * k, 1),
            (22.0 + 5.0 * k, 28.0 + 5.0 * k, 2),
        ];
        let sched = orbit.schedule(3);
        assert_eq!(sched.len(), 6);
        for (iv, (a, b, seed)) in sched.iter().zip(expected) {
            assert_abs_diff_eq!(iv.start, a, epsilon = 1e-12);
            assert_abs_diff_eq!(iv.end(), b, epsilon = 1e-12);
            assert_eq!(iv.seed, seed);
        }
    }

    #[test]
    fn dense_orbit_rejects_empty_seeds() {
        assert_eq!(
            DenseOrbit::new(vec![], PSpaceParams::default()),
            Err(SignalError::EmptySeeds)
        );
    }

    #[test]
    fn signal_round_trips_through_json() {
        let s = Signal::arctan_blend(
            Signal::sum(vec![Signal::sin(1.0, 0.05), Signal::bump_train()]),
            0.0,
            0.5,
        )
        .shift(2.0);
        let text = serde_json::to_string(&s).unwrap();
        let back: Signal = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
    }
}
