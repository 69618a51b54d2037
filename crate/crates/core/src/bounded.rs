//! Bounded solutions on a finite window.
//!
//! Extremal bounded solutions are obtained by pullback: a solution started
//! above (or below) every bounded solution at time `T₋ - S` is integrated to
//! the window, and `S` is doubled until the restriction to the window stops
//! changing. Repulsive solutions are always obtained in backward time.

use serde::Serialize;
use thiserror::Error;

use crate::integrate::{
    finite_time_lyapunov, solve, solve_on_grid, Escape, ScalarField, SolveError, SolveOptions,
    SolveStatus, Stepper,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundedError {
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("estimates live on different windows")]
    MismatchedWindows,
    #[error("lower and upper solutions are indistinguishable (gap {gap:e} below {threshold:e})")]
    Indistinguishable { gap: f64, threshold: f64 },
    #[error("estimate is not converged (residual {0:e})")]
    Unconverged(f64),
    #[error("reference solution escapes at t = {0}")]
    ReferenceEscapes(f64),
    #[error("no sign-definite region found for {0} bound")]
    NoCoercivity(&'static str),
    #[error("basin bisection failed at t = {0}: {1}")]
    Bisection(f64, String),
}

/// Uniformly sampled finite time window `[start, end]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Window {
    pub start: f64,
    pub end: f64,
    pub dt: f64,
}

impl Window {
    pub const DEFAULT_DT: f64 = 0.05;

    pub fn new(start: f64, end: f64) -> Self {
        Self::with_dt(start, end, Self::DEFAULT_DT)
    }

    pub fn with_dt(start: f64, end: f64, dt: f64) -> Self {
        assert!(
            start < end && dt > 0.0,
            "invalid window [{start}, {end}] / {dt}"
        );
        Self { start, end, dt }
    }

    pub fn length(&self) -> f64 {
        self.end - self.start
    }

    pub fn len(&self) -> usize {
        (self.length() / self.dt).round() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn time(&self, i: usize) -> f64 {
        if i + 1 == self.len() {
            self.end
        } else {
            self.start + i as f64 * self.dt
        }
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.time(i)).collect()
    }

    /// Last `fraction` of the window, on the same grid.
    pub fn tail(&self, fraction: f64) -> Window {
        let n = self.len();
        let skip = ((1.0 - fraction) * (n - 1) as f64).floor() as usize;
        Window {
            start: self.time(skip.min(n.saturating_sub(2))),
            end: self.end,
            dt: self.dt,
        }
    }

    fn same_grid(&self, other: &Window) -> bool {
        let eps = 1e-9 * self.length().abs().max(1.0);
        (self.start - other.start).abs() < eps
            && (self.end - other.end).abs() < eps
            && (self.dt - other.dt).abs() < 1e-12
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Lower,
    Middle,
    Upper,
}

/// Time direction in which an estimate was computed (its stable direction).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Forward,
    Backward,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HyperbolicKind {
    Attractive,
    Repulsive,
}

/// Finite-time dichotomy evidence for a bounded solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HyperbolicityCertificate {
    pub kind: HyperbolicKind,
    /// Time average of `hx` along the solution over the window.
    pub gamma_est: f64,
    pub gamma_min: f64,
    /// Worst measured exponential rate of the probes in the stable direction.
    pub probe_rate: f64,
    pub window: Window,
}

/// Outcome of [`certify`]; `certificate` is `None` when exponent and probes
/// do not agree on a kind.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certification {
    pub gamma_est: f64,
    pub probe_rate: Option<f64>,
    pub certificate: Option<HyperbolicityCertificate>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundedSolutionEstimate {
    pub role: Role,
    pub window: Window,
    pub values: Vec<f64>,
    /// Sup-norm change over the last pullback doubling.
    pub residual: f64,
    pub converged: bool,
    /// Pullback depth of the returned run.
    pub depth: f64,
    pub direction: Direction,
    pub certificate: Option<HyperbolicityCertificate>,
}

impl BoundedSolutionEstimate {
    pub fn times(&self) -> Vec<f64> {
        self.window.times()
    }

    pub fn samples(&self) -> Vec<(f64, f64)> {
        self.times()
            .into_iter()
            .zip(self.values.iter().copied())
            .collect()
    }

    pub fn first(&self) -> f64 {
        self.values[0]
    }

    pub fn last(&self) -> f64 {
        *self.values.last().expect("estimate has samples")
    }

    /// Linear interpolation of the samples (clamped to the window).
    pub fn value_at(&self, t: f64) -> f64 {
        let w = &self.window;
        let u = ((t - w.start) / w.dt).clamp(0.0, (self.values.len() - 1) as f64);
        let i = (u.floor() as usize).min(self.values.len().saturating_sub(2));
        if self.values.len() == 1 {
            return self.values[0];
        }
        let (t0, t1) = (w.time(i), w.time(i + 1));
        let s = ((t - t0) / (t1 - t0)).clamp(0.0, 1.0);
        self.values[i] + s * (self.values[i + 1] - self.values[i])
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b))
    }

    pub fn inf(&self) -> f64 {
        self.values.iter().fold(f64::INFINITY, |a, &b| a.min(b))
    }
}

/// Result of a pullback run: a bounded estimate, or the escape that proves
/// there is no bounded solution on the relevant side.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Pullback {
    Bounded(BoundedSolutionEstimate),
    Escapes { escape: Escape, depth: f64 },
}

impl Pullback {
    pub fn estimate(&self) -> Option<&BoundedSolutionEstimate> {
        match self {
            Pullback::Bounded(e) => Some(e),
            Pullback::Escapes { .. } => None,
        }
    }

    pub fn into_estimate(self) -> Option<BoundedSolutionEstimate> {
        match self {
            Pullback::Bounded(e) => Some(e),
            Pullback::Escapes { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LowerMode {
    /// Repulsive lower solution, pulled back in backward time.
    Backward,
    /// Attractive lower solution, pulled back forward from below.
    Forward,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MiddleMethod {
    BackwardPullback,
    BasinBisection,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundedOptions {
    /// Convergence tolerance (sup norm on the window).
    pub tol: f64,
    /// Integrator local tolerance; `None` means `tol / 10`.
    pub integ_tol: Option<f64>,
    pub x_guard: f64,
    pub max_doublings: u32,
    /// First pullback depth; `None` means the window length.
    pub initial_depth: Option<f64>,
    pub gamma_min: f64,
    pub rho_probe: f64,
    /// Separation counts as uniform when it reaches this multiple of `tol`.
    pub separation_factor: f64,
}

impl Default for BoundedOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            integ_tol: None,
            x_guard: 1e6,
            max_doublings: 12,
            initial_depth: None,
            gamma_min: 0.02,
            rho_probe: 1e-3,
            separation_factor: 50.0,
        }
    }
}

impl BoundedOptions {
    pub fn solve_options(&self) -> SolveOptions {
        SolveOptions {
            tol: self.integ_tol.unwrap_or(self.tol * 0.1),
            x_guard: self.x_guard,
            ..SolveOptions::default()
        }
    }

    pub fn accepts(&self, residual: f64) -> bool {
        residual < self.tol
    }

    pub fn separation_threshold(&self) -> f64 {
        self.separation_factor * self.tol
    }

    fn depth(&self, window: &Window, n: u32) -> f64 {
        self.initial_depth.unwrap_or(window.length()) * 2f64.powi(n as i32)
    }
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn pullback(
    field: &ScalarField,
    window: Window,
    x_start: f64,
    direction: Direction,
    role: Role,
    opts: &BoundedOptions,
) -> Result<Pullback, BoundedError> {
    let mut grid = window.times();
    if direction == Direction::Backward {
        grid.reverse();
    }
    let sopts = opts.solve_options();
    let mut previous: Option<Vec<f64>> = None;
    let mut residual = f64::INFINITY;
    let mut depth = 0.0;
    for n in 0..=opts.max_doublings {
        depth = opts.depth(&window, n);
        let (s, t_end) = match direction {
            Direction::Forward => (window.start - depth, window.end),
            Direction::Backward => (window.end + depth, window.start),
        };
        let run = solve_on_grid(field, s, x_start, t_end, &grid, sopts)?;
        if let SolveStatus::Blowup(escape) = run.status {
            return Ok(Pullback::Escapes { escape, depth });
        }
        let mut values = run.values;
        if direction == Direction::Backward {
            values.reverse();
        }
        if let Some(prev) = &previous {
            residual = sup_diff(prev, &values);
            if opts.accepts(residual) {
                return Ok(Pullback::Bounded(BoundedSolutionEstimate {
                    role,
                    window,
                    values,
                    residual,
                    converged: true,
                    depth,
                    direction,
                    certificate: None,
                }));
            }
        }
        previous = Some(values);
    }
    Ok(Pullback::Bounded(BoundedSolutionEstimate {
        role,
        window,
        values: previous.unwrap_or_default(),
        residual,
        converged: false,
        depth,
        direction,
        certificate: None,
    }))
}

/// Upper bounded solution, pulled back forward from `x_hi`.
pub fn upper_bounded(
    field: &ScalarField,
    window: Window,
    x_hi: f64,
    opts: &BoundedOptions,
) -> Result<Pullback, BoundedError> {
    pullback(field, window, x_hi, Direction::Forward, Role::Upper, opts)
}

/// Lower bounded solution from `x_lo`: backward for a repulsive lower
/// solution, forward for an attractive one.
pub fn lower_bounded(
    field: &ScalarField,
    window: Window,
    x_lo: f64,
    mode: LowerMode,
    opts: &BoundedOptions,
) -> Result<Pullback, BoundedError> {
    let dir = match mode {
        LowerMode::Backward => Direction::Backward,
        LowerMode::Forward => Direction::Forward,
    };
    pullback(field, window, x_lo, dir, Role::Lower, opts)
}

/// `inf_t |x1(t) - x2(t)|` over the common sample grid.
pub fn separation(
    a: &BoundedSolutionEstimate,
    b: &BoundedSolutionEstimate,
) -> Result<f64, BoundedError> {
    if !a.window.same_grid(&b.window) || a.values.len() != b.values.len() {
        return Err(BoundedError::MismatchedWindows);
    }
    Ok(a.values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| (x - y).abs())
        .fold(f64::INFINITY, f64::min))
}

/// Continues an attractive estimate forward past its window; returns the
/// samples on `[window.end, window.end + extra]` with the window's spacing.
fn extend_forward(
    field: &ScalarField,
    est: &BoundedSolutionEstimate,
    extra: f64,
    opts: &BoundedOptions,
) -> Result<Vec<f64>, BoundedError> {
    let w = est.window;
    let n = (extra / w.dt).ceil() as usize;
    let grid: Vec<f64> = (0..=n).map(|i| w.end + i as f64 * w.dt).collect();
    let t_end = *grid.last().unwrap();
    let run = solve_on_grid(field, w.end, est.last(), t_end, &grid, opts.solve_options())?;
    if let SolveStatus::Blowup(e) = run.status {
        return Err(BoundedError::ReferenceEscapes(e.time));
    }
    Ok(run.values)
}

/// Repulsive middle solution between an attractive lower and upper pair.
pub fn middle_bounded(
    field: &ScalarField,
    lower: &BoundedSolutionEstimate,
    upper: &BoundedSolutionEstimate,
    method: MiddleMethod,
    opts: &BoundedOptions,
) -> Result<BoundedSolutionEstimate, BoundedError> {
    let gap = separation(lower, upper)?;
    let threshold = 10.0 * opts.tol;
    if gap < threshold {
        return Err(BoundedError::Indistinguishable { gap, threshold });
    }
    match method {
        MiddleMethod::BackwardPullback => middle_by_pullback(field, lower, upper, opts),
        MiddleMethod::BasinBisection => middle_by_bisection(field, lower, upper, opts),
    }
}

fn middle_by_pullback(
    field: &ScalarField,
    lower: &BoundedSolutionEstimate,
    upper: &BoundedSolutionEstimate,
    opts: &BoundedOptions,
) -> Result<BoundedSolutionEstimate, BoundedError> {
    let window = lower.window;
    let sopts = opts.solve_options();
    let mut grid = window.times();
    grid.reverse();
    // Attractive references are carried forward incrementally to T₊ + S.
    let (mut t_ref, mut lo_ref, mut hi_ref) = (window.end, lower.last(), upper.last());
    let mut previous: Option<Vec<f64>> = None;
    let mut residual = f64::INFINITY;
    let mut depth = 0.0;
    for n in 0..=opts.max_doublings {
        depth = opts.depth(&window, n);
        let target = window.end + depth;
        for x in [&mut lo_ref, &mut hi_ref] {
            let traj = solve(field, t_ref, *x, target, sopts)?;
            if let Some(e) = traj.status.escape() {
                return Err(BoundedError::ReferenceEscapes(e.time));
            }
            *x = traj.final_state();
        }
        t_ref = target;
        let start = 0.5 * (lo_ref + hi_ref);
        let run = solve_on_grid(field, target, start, window.start, &grid, sopts)?;
        if let SolveStatus::Blowup(e) = run.status {
            return Err(BoundedError::ReferenceEscapes(e.time));
        }
        let mut values = run.values;
        values.reverse();
        if let Some(prev) = &previous {
            residual = sup_diff(prev, &values);
            if opts.accepts(residual) {
                return Ok(BoundedSolutionEstimate {
                    role: Role::Middle,
                    window,
                    values,
                    residual,
                    converged: true,
                    depth,
                    direction: Direction::Backward,
                    certificate: None,
                });
            }
        }
        previous = Some(values);
    }
    Ok(BoundedSolutionEstimate {
        role: Role::Middle,
        window,
        values: previous.unwrap_or_default(),
        residual,
        converged: false,
        depth,
        direction: Direction::Backward,
        certificate: None,
    })
}

/// Lower/upper references sampled on an extended grid, used to decide which
/// basin a forward solution falls into.
struct BasinReferences {
    start: f64,
    dt: f64,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl BasinReferences {
    fn end(&self) -> f64 {
        self.start + (self.lower.len() - 1) as f64 * self.dt
    }

    fn at(&self, t: f64) -> (f64, f64) {
        let u = ((t - self.start) / self.dt).clamp(0.0, (self.lower.len() - 1) as f64);
        let i = (u.floor() as usize).min(self.lower.len() - 2);
        let s = u - i as f64;
        let lerp = |v: &[f64]| v[i] + s * (v[i + 1] - v[i]);
        (lerp(&self.lower), lerp(&self.upper))
    }

    /// `Some(true)` if the forward solution from `(t0, x0)` reaches the upper
    /// basin, `Some(false)` for the lower one.
    fn approaches_upper(
        &self,
        field: &ScalarField,
        t0: f64,
        x0: f64,
        opts: &BoundedOptions,
    ) -> Result<bool, BoundedError> {
        let t_end = self.end();
        let mut stepper = Stepper::new(field, t0, x0, t_end, opts.solve_options())?;
        while let Some(step) = stepper.step()? {
            let t = step.t1();
            let x = step.x1();
            let (lo, hi) = self.at(t);
            let quarter = 0.25 * (hi - lo);
            if x >= hi - quarter {
                return Ok(true);
            }
            if x <= lo + quarter {
                return Ok(false);
            }
        }
        if let Some(SolveStatus::Blowup(e)) = stepper.status {
            return Ok(e.direction == crate::integrate::EscapeDirection::PlusInfinity);
        }
        let (lo, hi) = self.at(t_end);
        Ok(stepper.state() > 0.5 * (lo + hi))
    }
}

fn middle_by_bisection(
    field: &ScalarField,
    lower: &BoundedSolutionEstimate,
    upper: &BoundedSolutionEstimate,
    opts: &BoundedOptions,
) -> Result<BoundedSolutionEstimate, BoundedError> {
    let window = lower.window;
    let extra = window.length().max(200.0);
    let mut lo_vals = lower.values.clone();
    lo_vals.extend(
        extend_forward(field, lower, extra, opts)?
            .into_iter()
            .skip(1),
    );
    let mut hi_vals = upper.values.clone();
    hi_vals.extend(
        extend_forward(field, upper, extra, opts)?
            .into_iter()
            .skip(1),
    );
    let refs = BasinReferences {
        start: window.start,
        dt: window.dt,
        lower: lo_vals,
        upper: hi_vals,
    };
    let times = window.times();
    let reset_width = opts.tol;
    let min_width = (opts.tol * 1e-3).max(1e-13);
    let sopts = opts.solve_options();

    let bisect = |t: f64, mut a: f64, mut b: f64| -> Result<(f64, f64), BoundedError> {
        let upper_a = refs.approaches_upper(field, t, a, opts)?;
        let upper_b = refs.approaches_upper(field, t, b, opts)?;
        if upper_a || !upper_b {
            return Err(BoundedError::Bisection(
                t,
                format!("bracket [{a}, {b}] does not straddle"),
            ));
        }
        while b - a > min_width * (1.0 + a.abs()) {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            if refs.approaches_upper(field, t, m, opts)? {
                b = m;
            } else {
                a = m;
            }
        }
        Ok((a, b))
    };

    let mut values = Vec::with_capacity(times.len());
    let (l0, u0) = refs.at(window.start);
    let margin = 1e-3 * (u0 - l0);
    let (mut a, mut b) = bisect(window.start, l0 + margin, u0 - margin)?;
    let mut i = 0;
    while i < times.len() {
        values.push(0.5 * (a + b));
        if i + 1 == times.len() {
            break;
        }
        let grid = &times[i..];
        let ra = solve_on_grid(field, times[i], a, window.end, grid, sopts)?;
        let rb = solve_on_grid(field, times[i], b, window.end, grid, sopts)?;
        let mut j = i + 1;
        let usable = ra.values.len().min(rb.values.len());
        while j - i < usable {
            let (va, vb) = (ra.values[j - i], rb.values[j - i]);
            if vb - va > reset_width || vb <= va {
                break;
            }
            values.push(0.5 * (va + vb));
            j += 1;
        }
        if j == times.len() {
            break;
        }
        // Re-straddle at times[j] starting from the diverged pair.
        let (lj, uj) = refs.at(times[j]);
        let (mut na, mut nb) = (
            ra.values.get(j - i).copied().unwrap_or(lj + margin),
            rb.values.get(j - i).copied().unwrap_or(uj - margin),
        );
        if !(na < nb) || refs.approaches_upper(field, times[j], na, opts)? {
            na = lj + 1e-3 * (uj - lj);
        }
        if !refs.approaches_upper(field, times[j], nb, opts)? {
            nb = uj - 1e-3 * (uj - lj);
        }
        let (na, nb) = bisect(times[j], na, nb)?;
        a = na;
        b = nb;
        i = j;
    }
    Ok(BoundedSolutionEstimate {
        role: Role::Middle,
        window,
        values,
        residual: reset_width,
        converged: true,
        depth: 0.0,
        direction: Direction::Backward,
        certificate: None,
    })
}

/// Finite-time hyperbolicity check of an estimate.
pub fn certify(
    field: &ScalarField,
    est: &BoundedSolutionEstimate,
    opts: &BoundedOptions,
) -> Result<Certification, BoundedError> {
    if !est.converged {
        return Err(BoundedError::Unconverged(est.residual));
    }
    let w = est.window;
    let sopts = opts.solve_options();
    let (t_from, x_from, t_to) = match est.direction {
        Direction::Forward => (w.start, est.first(), w.end),
        Direction::Backward => (w.end, est.last(), w.start),
    };
    let reference = solve(field, t_from, x_from, t_to, sopts)?;
    if let Some(e) = reference.status.escape() {
        return Err(BoundedError::ReferenceEscapes(e.time));
    }
    let gamma_est = finite_time_lyapunov(field, &reference, w.start, w.end)?;
    let gamma_min = opts.gamma_min;
    let kind = if gamma_est <= -gamma_min {
        HyperbolicKind::Attractive
    } else if gamma_est >= gamma_min {
        HyperbolicKind::Repulsive
    } else {
        return Ok(Certification {
            gamma_est,
            probe_rate: None,
            certificate: None,
            note: format!(
                "|gamma_est| = {:.3e} below margin {gamma_min:e}",
                gamma_est.abs()
            ),
        });
    };
    // Probes decay in the stable direction: forward for attractive,
    // backward for repulsive.
    let (p_from, p_to) = match kind {
        HyperbolicKind::Attractive => (w.start, w.end),
        HyperbolicKind::Repulsive => (w.end, w.start),
    };
    let mut grid = w.times();
    if p_from > p_to {
        grid.reverse();
    }
    let x_base = est.value_at(p_from);
    let base = solve_on_grid(field, p_from, x_base, p_to, &grid, sopts)?;
    if let SolveStatus::Blowup(e) = base.status {
        return Err(BoundedError::ReferenceEscapes(e.time));
    }
    let rho = opts.rho_probe;
    // Decay is measured until the gap reaches the integration noise floor,
    // beyond which it carries no information.
    let scale = est.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let floor = (1e3 * sopts.tol * (1.0 + scale)).max(1e-6 * rho);
    let mut worst = f64::NEG_INFINITY;
    for sign in [1.0, -1.0] {
        let probe = solve_on_grid(field, p_from, x_base + sign * rho, p_to, &grid, sopts)?;
        let rate = if let SolveStatus::Blowup(_) = probe.status {
            f64::INFINITY
        } else {
            let mut rate = 0.0;
            for (i, (p, b)) in probe.values.iter().zip(&base.values).enumerate().skip(1) {
                let d = (p - b).abs().max(f64::MIN_POSITIVE);
                rate = (d / rho).ln() / (grid[i] - p_from).abs();
                if d < floor {
                    break;
                }
            }
            rate
        };
        worst = worst.max(rate);
    }
    let agrees = worst <= -0.5 * gamma_min;
    let certificate = agrees.then_some(HyperbolicityCertificate {
        kind,
        gamma_est,
        gamma_min,
        probe_rate: worst,
        window: w,
    });
    let note = if agrees {
        String::new()
    } else {
        format!("probe rate {worst:.3e} does not confirm {kind:?}")
    };
    Ok(Certification {
        gamma_est,
        probe_rate: Some(worst),
        certificate,
        note,
    })
}

/// Which sign `h` must have below the lower bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LowerSign {
    /// `h → -∞` as `x → -∞` (concave-type coercivity).
    Negative,
    /// `h → +∞` as `x → -∞` (cubic-type coercivity).
    Positive,
    /// Accept either, as long as it is constant.
    Any,
}

/// Bounds `(x_lo, x_hi)` outside of which `h` is sign-definite on the
/// window's time grid, widened by 10%.
pub fn auto_bounds(
    field: &ScalarField,
    window: &Window,
    lower_sign: LowerSign,
) -> Result<(f64, f64), BoundedError> {
    let step = (window.length() / 2000.0).max(window.dt);
    let n = (window.length() / step).ceil() as usize;
    let times: Vec<f64> = (0..=n).map(|i| window.start + i as f64 * step).collect();
    // Sign of `h` over the window at a fixed state, if definite.
    let sign_of = |x: f64| -> Option<f64> {
        let mut sign = 0.0;
        for &t in &times {
            let v = field.h(t, x);
            let s = if v > 0.0 {
                1.0
            } else if v < 0.0 {
                -1.0
            } else {
                return None;
            };
            if sign == 0.0 {
                sign = s;
            } else if s != sign {
                return None;
            }
        }
        Some(sign)
    };
    // Scan inward from large magnitudes: one octave at a time while the
    // magnitude is large, then finely so narrow sign dips are caught.
    const FINE_BELOW: f64 = 64.0;
    const FINE_RATIO: f64 = 1.02;
    let coarse: Vec<f64> = (6..40).rev().map(|i| 2f64.powi(i)).collect();
    let octave = [1.0, 0.8, 0.65, 0.55];
    // A sign change of `hx` between adjacent scan points can hide a thin
    // band of the opposite sign; test `h` at the critical point.
    let gap_free = |a: f64, b: f64, sign: f64| -> bool {
        times.iter().all(|&t| {
            let (da, db) = (field.hx(t, a), field.hx(t, b));
            if da * db >= 0.0 {
                return true;
            }
            let (mut lo, mut hi) = (a, b);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if field.hx(t, mid) * da > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            field.h(t, 0.5 * (lo + hi)) * sign > 0.0
        })
    };
    let scan = |side: f64, accept: &dyn Fn(f64) -> bool| -> Option<f64> {
        let sign_at = |x: f64| sign_of(side * x).filter(|&s| accept(s));
        let mut good = None;
        let mut fine_from = FINE_BELOW;
        for &x in &coarse {
            if !octave.iter().all(|&f| sign_at(x * f).is_some()) {
                fine_from = 2.0 * x;
                good = None;
                break;
            }
            good = Some(x * octave[octave.len() - 1]);
        }
        let mut x = fine_from;
        let mut prev: Option<(f64, f64)> = None;
        while x > 2f64.powi(-5) {
            let Some(s) = sign_at(x) else { break };
            if let Some((px, ps)) = prev {
                if ps != s || !gap_free(side * px, side * x, s) {
                    break;
                }
            }
            good = Some(x);
            prev = Some((x, s));
            x /= FINE_RATIO;
        }
        good.map(|x| side * x)
    };
    let hi = scan(1.0, &|s| s < 0.0).map(|x| 1.1 * x);
    let lo = scan(-1.0, &|s| match lower_sign {
        LowerSign::Negative => s < 0.0,
        LowerSign::Positive => s > 0.0,
        LowerSign::Any => true,
    })
    .map(|x| 1.1 * x);
    match (lo, hi) {
        (Some(l), Some(h)) => Ok((l, h)),
        (None, _) => Err(BoundedError::NoCoercivity("lower")),
        (_, None) => Err(BoundedError::NoCoercivity("upper")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad(c: f64) -> ScalarField {
        ScalarField::from_fns("quad", move |_, x| -x * x + c, |_, x| -2.0 * x)
    }

    fn cubic6() -> ScalarField {
        ScalarField::from_fns(
            "cubic6",
            |_, x| x * (1.0 - x) * (x - 2.0) / 6.0,
            |_, x| (-3.0 * x * x + 6.0 * x - 2.0) / 6.0,
        )
    }

    fn window() -> Window {
        Window::with_dt(-10.0, 10.0, 0.1)
    }

    fn opts() -> BoundedOptions {
        BoundedOptions {
            initial_depth: Some(20.0),
            ..Default::default()
        }
    }

    #[test]
    fn upper_of_quadratic_is_one() {
        let est = upper_bounded(&quad(1.0), window(), 3.0, &opts())
            .unwrap()
            .into_estimate()
            .unwrap();
        assert!(est.converged);
        assert!(est.values.iter().all(|v| (v - 1.0).abs() < 1e-7));
    }

    #[test]
    fn no_bounded_solution_without_equilibria() {
        let out = upper_bounded(&quad(-1.0), window(), 3.0, &opts()).unwrap();
        assert!(matches!(out, Pullback::Escapes { .. }));
    }

    #[test]
    fn repulsive_lower_of_quadratic() {
        let est = lower_bounded(&quad(1.0), window(), -3.0, LowerMode::Backward, &opts())
            .unwrap()
            .into_estimate()
            .unwrap();
        assert!(est.converged);
        assert!(est.values.iter().all(|v| (v + 1.0).abs() < 1e-7));
        let cert = certify(&quad(1.0), &est, &opts()).unwrap();
        assert_eq!(cert.certificate.unwrap().kind, HyperbolicKind::Repulsive);
        assert!((cert.gamma_est - 2.0).abs() < 1e-6);
    }

    #[test]
    fn cubic_lower_middle_upper() {
        let f = cubic6();
        let o = opts();
        let lower = lower_bounded(&f, window(), -1.0, LowerMode::Forward, &o)
            .unwrap()
            .into_estimate()
            .unwrap();
        let upper = upper_bounded(&f, window(), 3.0, &o)
            .unwrap()
            .into_estimate()
            .unwrap();
        assert!(lower.values.iter().all(|v| v.abs() < 1e-7));
        assert!(upper.values.iter().all(|v| (v - 2.0).abs() < 1e-7));
        let mid = middle_bounded(&f, &lower, &upper, MiddleMethod::BackwardPullback, &o).unwrap();
        assert!(mid.values.iter().all(|v| (v - 1.0).abs() < 1e-7));
        let cert = certify(&f, &mid, &o).unwrap().certificate.unwrap();
        assert_eq!(cert.kind, HyperbolicKind::Repulsive);
        assert!((cert.gamma_est - 1.0 / 6.0).abs() < 1e-6);
        let lc = certify(&f, &lower, &o).unwrap().certificate.unwrap();
        assert_eq!(lc.kind, HyperbolicKind::Attractive);
        assert!((lc.gamma_est + 1.0 / 3.0).abs() < 1e-6);
        assert!((separation(&lower, &upper).unwrap() - 2.0).abs() < 1e-7);
        assert_eq!(separation(&lower, &lower).unwrap(), 0.0);
    }

    #[test]
    fn bisection_middle_agrees_with_pullback() {
        let f = ScalarField::from_fns("odd", |_, x| -x * x * x + x, |_, x| -3.0 * x * x + 1.0);
        let o = opts();
        let lower = lower_bounded(&f, window(), -2.0, LowerMode::Forward, &o)
            .unwrap()
            .into_estimate()
            .unwrap();
        let upper = upper_bounded(&f, window(), 2.0, &o)
            .unwrap()
            .into_estimate()
            .unwrap();
        let a = middle_bounded(&f, &lower, &upper, MiddleMethod::BackwardPullback, &o).unwrap();
        let b = middle_bounded(&f, &lower, &upper, MiddleMethod::BasinBisection, &o).unwrap();
        assert!(a.values.iter().all(|v| v.abs() < 1e-7));
        let diff = sup_diff(&a.values, &b.values);
        assert!(diff < 10.0 * o.tol, "methods differ by {diff:e}");
    }

    #[test]
    fn attractive_decay_certificate() {
        let f = ScalarField::from_fns("decay", |_, x| -x, |_, _| -1.0);
        let est = upper_bounded(&f, window(), 2.0, &opts())
            .unwrap()
            .into_estimate()
            .unwrap();
        let cert = certify(&f, &est, &opts()).unwrap().certificate.unwrap();
        assert_eq!(cert.kind, HyperbolicKind::Attractive);
        assert!((cert.gamma_est + 1.0).abs() < 1e-9);
    }

    #[test]
    fn indistinguishable_pair_is_refused() {
        let f = quad(1.0);
        let est = upper_bounded(&f, window(), 3.0, &opts())
            .unwrap()
            .into_estimate()
            .unwrap();
        let err = middle_bounded(&f, &est, &est, MiddleMethod::BackwardPullback, &opts());
        assert!(matches!(err, Err(BoundedError::Indistinguishable { .. })));
    }

    #[test]
    fn mismatched_windows_are_rejected() {
        let f = quad(1.0);
        let a = upper_bounded(&f, window(), 3.0, &opts())
            .unwrap()
            .into_estimate()
            .unwrap();
        let b = upper_bounded(&f, Window::with_dt(-5.0, 5.0, 0.1), 3.0, &opts())
            .unwrap()
            .into_estimate()
            .unwrap();
        assert_eq!(separation(&a, &b), Err(BoundedError::MismatchedWindows));
    }

    #[test]
    fn coercivity_bounds() {
        let (lo, hi) = auto_bounds(&quad(1.0), &window(), LowerSign::Negative).unwrap();
        assert!(lo < -1.0 && hi > 1.0);
        let (lo, hi) = auto_bounds(&cubic6(), &window(), LowerSign::Positive).unwrap();
        assert!(lo < 0.0 && hi > 2.0);
    }

    #[test]
    fn window_grid() {
        let w = Window::with_dt(-1.0, 1.0, 0.25);
        assert_eq!(w.len(), 9);
        assert_eq!(w.times().last().copied(), Some(1.0));
        let tail = w.tail(0.25);
        assert!((tail.start - 0.5).abs() < 1e-12);
    }
}
