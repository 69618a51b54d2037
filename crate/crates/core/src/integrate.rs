//! Scalar nonautonomous initial-value solver.
//!
//! The stepper is the Dormand–Prince 5(4) pair with PI step-size control and
//! the standard fourth-order continuous extension. Integration runs forward or
//! backward in time and stops when `|x|` crosses a guard value, which is how
//! finite-time escape to `±∞` is reported.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

/// Law `h(t, x, λ)` of a parametric scalar equation `x' = h(t, x, λ)`.
pub trait Law: Send + Sync + fmt::Debug {
    fn value(&self, t: f64, x: f64, lambda: f64) -> f64;

    /// `∂h/∂x`.
    fn dx(&self, t: f64, x: f64, lambda: f64) -> f64;

    /// `∂²h/∂x²`, when the law provides it.
    fn dxx(&self, _t: f64, _x: f64, _lambda: f64) -> Option<f64> {
        None
    }

    fn name(&self) -> &str;
}

type LawFn = dyn Fn(f64, f64, f64) -> f64 + Send + Sync;

/// Law assembled from closures.
pub struct FnLaw {
    name: String,
    h: Box<LawFn>,
    hx: Box<LawFn>,
    hxx: Option<Box<LawFn>>,
}

impl FnLaw {
    pub fn new(
        name: impl Into<String>,
        h: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
        hx: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            h: Box::new(h),
            hx: Box::new(hx),
            hxx: None,
        }
    }

    pub fn with_dxx(mut self, hxx: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        self.hxx = Some(Box::new(hxx));
        self
    }
}

impl fmt::Debug for FnLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnLaw").field("name", &self.name).finish()
    }
}

impl Law for FnLaw {
    fn value(&self, t: f64, x: f64, lambda: f64) -> f64 {
        (self.h)(t, x, lambda)
    }

    fn dx(&self, t: f64, x: f64, lambda: f64) -> f64 {
        (self.hx)(t, x, lambda)
    }

    fn dxx(&self, t: f64, x: f64, lambda: f64) -> Option<f64> {
        self.hxx.as_ref().map(|f| f(t, x, lambda))
    }

    fn name(&self) -> &str {
        &self.name
    }
}

/// A law frozen at one parameter value, optionally time-shifted:
/// `x' = h(t + shift, x, λ)`.
#[derive(Clone, Debug)]
pub struct ScalarField {
    law: Arc<dyn Law>,
    lambda: f64,
    shift: f64,
}

impl ScalarField {
    pub fn new(law: Arc<dyn Law>, lambda: f64) -> Self {
        Self {
            law,
            lambda,
            shift: 0.0,
        }
    }

    /// Convenience constructor for a parameter-free closure pair.
    pub fn from_fns(
        name: &str,
        h: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        hx: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        let law = FnLaw::new(name, move |t, x, _| h(t, x), move |t, x, _| hx(t, x));
        Self::new(Arc::new(law), 0.0)
    }

    #[inline]
    pub fn h(&self, t: f64, x: f64) -> f64 {
        self.law.value(t + self.shift, x, self.lambda)
    }

    #[inline]
    pub fn hx(&self, t: f64, x: f64) -> f64 {
        self.law.dx(t + self.shift, x, self.lambda)
    }

    pub fn hxx(&self, t: f64, x: f64) -> Option<f64> {
        self.law.dxx(t + self.shift, x, self.lambda)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn time_shift(&self) -> f64 {
        self.shift
    }

    pub fn law(&self) -> &Arc<dyn Law> {
        &self.law
    }

    pub fn name(&self) -> &str {
        self.law.name()
    }

    pub fn with_lambda(&self, lambda: f64) -> Self {
        Self {
            lambda,
            ..self.clone()
        }
    }

    /// The field `(t, x) ↦ h(t + s, x)`.
    pub fn shifted(&self, s: f64) -> Self {
        Self {
            shift: self.shift + s,
            ..self.clone()
        }
    }

    /// Compares `hx` (and `hxx` when present) against central differences of
    /// `h` at the given points; returns the worst relative mismatch.
    pub fn derivative_mismatch(&self, points: &[(f64, f64)]) -> f64 {
        let mut worst: f64 = 0.0;
        for &(t, x) in points {
            let step = 1e-5 * x.abs().max(1.0);
            let fd = (self.h(t, x + step) - self.h(t, x - step)) / (2.0 * step);
            let an = self.hx(t, x);
            worst = worst.max((fd - an).abs() / an.abs().max(1.0));
            if let Some(an2) = self.hxx(t, x) {
                let fd2 = (self.hx(t, x + step) - self.hx(t, x - step)) / (2.0 * step);
                worst = worst.max((fd2 - an2).abs() / an2.abs().max(1.0));
            }
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EscapeDirection {
    PlusInfinity,
    MinusInfinity,
}

/// Recorded crossing of the blow-up guard.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Escape {
    pub direction: EscapeDirection,
    pub time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SolveStatus {
    Complete,
    Blowup(Escape),
}

impl SolveStatus {
    pub fn escape(&self) -> Option<Escape> {
        match self {
            SolveStatus::Complete => None,
            SolveStatus::Blowup(e) => Some(*e),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct SolveStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("step size {step:e} fell below the minimum {min:e} at t = {t}")]
    StepUnderflow { t: f64, step: f64, min: f64 },
    #[error("step budget of {0} exhausted")]
    StepBudget(usize),
    #[error("invalid solver input: {0}")]
    InvalidInput(String),
    #[error("interval [{a}, {b}] is outside the trajectory domain [{lo}, {hi}]")]
    OutsideDomain { a: f64, b: f64, lo: f64, hi: f64 },
}

/// Solver settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolveOptions {
    /// Per-step local error bound (mixed absolute/relative).
    pub tol: f64,
    /// `|x|` at which escape is declared.
    pub x_guard: f64,
    pub max_steps: usize,
    /// Upper bound on `|h|`. Forcing features narrower than this can be
    /// stepped over once the error estimate goes quiet.
    pub max_step: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            x_guard: 1e6,
            max_steps: 50_000_000,
            max_step: 1.0,
        }
    }
}

impl SolveOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

/// One accepted step with its continuous extension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub t0: f64,
    /// Signed step length.
    pub h: f64,
    coeffs: [f64; 5],
}

impl Step {
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    pub fn x0(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn x1(&self) -> f64 {
        self.coeffs[0] + self.coeffs[1]
    }

    /// Dense output at `t` (meant for `t` inside the step).
    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        let theta = (t - self.t0) / self.h;
        let theta1 = 1.0 - theta;
        let r = &self.coeffs;
        r[0] + theta * (r[1] + theta1 * (r[2] + theta * (r[3] + theta1 * r[4])))
    }

    fn contains(&self, t: f64) -> bool {
        let (lo, hi) = if self.h > 0.0 {
            (self.t0, self.t1())
        } else {
            (self.t1(), self.t0)
        };
        t >= lo && t <= hi
    }
}

// Dormand–Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const EXPO: f64 = 0.2 - BETA * 0.75;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

const STRETCH: f64 = 1.01;

/// Step-by-step driver; yields accepted steps until `t_end` or escape.
pub struct Stepper<'a> {
    field: &'a ScalarField,
    opts: SolveOptions,
    t: f64,
    x: f64,
    k1: f64,
    h: f64,
    t_end: f64,
    dir: f64,
    fac_old: f64,
    last_rejected: bool,
    stop: Option<f64>,
    pub stats: SolveStats,
    pub status: Option<SolveStatus>,
}

impl<'a> Stepper<'a> {
    pub fn new(
        field: &'a ScalarField,
        s: f64,
        x0: f64,
        t_end: f64,
        opts: SolveOptions,
    ) -> Result<Self, SolveError> {
        if !(opts.max_step > 0.0) {
            return Err(SolveError::InvalidInput(format!(
                "max_step must be positive, got {}",
                opts.max_step
            )));
        }
        if !(opts.tol > 0.0) {
            return Err(SolveError::InvalidInput(format!(
                "tol must be positive, got {}",
                opts.tol
            )));
        }
        if !s.is_finite() || !t_end.is_finite() || !x0.is_finite() {
            return Err(SolveError::InvalidInput("non-finite time or state".into()));
        }
        if !(opts.x_guard > x0.abs()) {
            return Err(SolveError::InvalidInput(format!(
                "x_guard {} must exceed |x0| = {}",
                opts.x_guard,
                x0.abs()
            )));
        }
        let dir = if t_end >= s { 1.0 } else { -1.0 };
        let span = (t_end - s).abs();
        let k1 = field.h(s, x0);
        let mut st = Self {
            field,
            opts,
            t: s,
            x: x0,
            k1,
            h: 0.0,
            t_end,
            dir,
            fac_old: 1e-4,
            last_rejected: false,
            stop: None,
            stats: SolveStats {
                evaluations: 1,
                ..Default::default()
            },
            status: if span == 0.0 {
                Some(SolveStatus::Complete)
            } else {
                None
            },
        };
        st.h = st.initial_step();
        Ok(st)
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn state(&self) -> f64 {
        self.x
    }

    /// Makes the next steps end exactly at `t` instead of stepping over it.
    pub fn set_stop(&mut self, t: Option<f64>) {
        self.stop = t;
    }

    fn scale(&self, a: f64, b: f64) -> f64 {
        self.opts.tol * (1.0 + a.abs().max(b.abs()))
    }

    fn initial_step(&mut self) -> f64 {
        let span = (self.t_end - self.t).abs();
        let sk = self.scale(self.x, self.x);
        let dnf = (self.k1 / sk).powi(2);
        let dny = (self.x / sk).powi(2);
        let mut h = if dnf <= 1e-10 || dny <= 1e-10 {
            1e-6
        } else {
            (dny / dnf).sqrt() * 0.01
        };
        h = h.min(span);
        let x1 = self.x + self.dir * h * self.k1;
        let f1 = self.field.h(self.t + self.dir * h, x1);
        self.stats.evaluations += 1;
        let der2 = ((f1 - self.k1) / sk).abs() / h;
        let der12 = der2.max(dnf.sqrt());
        let h1 = if der12 <= 1e-15 {
            (h * 1e-3).max(1e-6)
        } else {
            (0.01 / der12).powf(0.2)
        };
        (100.0 * h)
            .min(h1)
            .min(span)
            .min(self.opts.max_step)
            .max(self.h_min())
            * self.dir
    }

    /// Smallest step that still moves `t` by many ulps.
    fn h_min(&self) -> f64 {
        64.0 * f64::EPSILON * self.t.abs().max(1.0)
    }

    /// Advances by one accepted step; `Ok(None)` once finished.
    pub fn step(&mut self) -> Result<Option<Step>, SolveError> {
        if self.status.is_some() {
            return Ok(None);
        }
        let f = self.field;
        loop {
            if self.stats.accepted + self.stats.rejected >= self.opts.max_steps {
                return Err(SolveError::StepBudget(self.opts.max_steps));
            }
            let remaining = self.t_end - self.t;
            let proposal = self.h.clamp(-self.opts.max_step, self.opts.max_step);
            let mut h = proposal;
            // Steps within 1% of an end point are stretched onto it so no
            // sliver is left behind.
            let last = (h * self.dir) * STRETCH >= remaining * self.dir;
            let mut stop_hit = None;
            if last {
                h = remaining;
            } else if let Some(stop) = self.stop {
                let to_stop = (stop - self.t) * self.dir;
                if to_stop > 0.0 && h * self.dir * STRETCH >= to_stop {
                    h = stop - self.t;
                    stop_hit = Some(stop);
                }
            }
            let h_min = self.h_min();
            if h.abs() < h_min && !last {
                return Err(SolveError::StepUnderflow {
                    t: self.t,
                    step: h.abs(),
                    min: h_min,
                });
            }
            let (t, x, k1) = (self.t, self.x, self.k1);
            let k2 = f.h(t + C2 * h, x + h * A21 * k1);
            let k3 = f.h(t + C3 * h, x + h * (A31 * k1 + A32 * k2));
            let k4 = f.h(t + C4 * h, x + h * (A41 * k1 + A42 * k2 + A43 * k3));
            let k5 = f.h(
                t + C5 * h,
                x + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4),
            );
            let x6 = x + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5);
            let k6 = f.h(t + h, x6);
            let x_new = x + h * (A71 * k1 + A73 * k3 + A74 * k4 + A75 * k5 + A76 * k6);
            let t_new = if last {
                self.t_end
            } else {
                stop_hit.unwrap_or(t + h)
            };
            let k7 = f.h(t_new, x_new);
            self.stats.evaluations += 6;
            let err_raw = h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7);
            let err = (err_raw / self.scale(x, x_new)).abs();
            if !err.is_finite() || !x_new.is_finite() {
                self.stats.rejected += 1;
                self.h = h * FAC_MIN;
                self.last_rejected = true;
                continue;
            }
            let fac11 = err.powf(EXPO);
            if err <= 1.0 {
                let fac =
                    (fac11 / self.fac_old.powf(BETA) / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
                let mut h_next = h / fac;
                if self.last_rejected && h_next.abs() > h.abs() {
                    h_next = h;
                } else if stop_hit.is_some() && h_next.abs() < proposal.abs() {
                    h_next = proposal;
                }
                self.fac_old = err.max(1e-4);
                self.last_rejected = false;
                self.stats.accepted += 1;
                let diff = x_new - x;
                let bspl = h * k1 - diff;
                let coeffs = [
                    x,
                    diff,
                    bspl,
                    diff - h * k7 - bspl,
                    h * (D1 * k1 + D3 * k3 + D4 * k4 + D5 * k5 + D6 * k6 + D7 * k7),
                ];
                let step = Step {
                    t0: t,
                    h: t_new - t,
                    coeffs,
                };
                self.t = t_new;
                self.x = x_new;
                self.k1 = k7;
                self.h = h_next;
                if x_new.abs() >= self.opts.x_guard {
                    let time = guard_crossing(&step, self.opts.x_guard);
                    let direction = if x_new > 0.0 {
                        EscapeDirection::PlusInfinity
                    } else {
                        EscapeDirection::MinusInfinity
                    };
                    self.status = Some(SolveStatus::Blowup(Escape { direction, time }));
                } else if last {
                    self.status = Some(SolveStatus::Complete);
                }
                return Ok(Some(step));
            }
            self.stats.rejected += 1;
            self.last_rejected = true;
            self.h = h / (fac11 / SAFETY).min(1.0 / FAC_MIN);
        }
    }
}

fn guard_crossing(step: &Step, guard: f64) -> f64 {
    let (mut a, mut b) = (step.t0, step.t1());
    if step.x0().abs() >= guard {
        return a;
    }
    for _ in 0..80 {
        let m = 0.5 * (a + b);
        if step.eval(m).abs() >= guard {
            b = m;
        } else {
            a = m;
        }
    }
    0.5 * (a + b)
}

/// Numerical solution with dense output.
#[derive(Debug, Clone)]
pub struct Trajectory {
    steps: Vec<Step>,
    start: f64,
    x0: f64,
    pub status: SolveStatus,
    pub stats: SolveStats,
    pub tol: f64,
}

impl Trajectory {
    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    /// Last time reached (the escape time on blow-up).
    pub fn end(&self) -> f64 {
        match self.status {
            SolveStatus::Blowup(e) => e.time,
            SolveStatus::Complete => self.steps.last().map_or(self.start, |s| s.t1()),
        }
    }

    pub fn is_forward(&self) -> bool {
        self.end() >= self.start
    }

    /// `(lo, hi)` with `lo <= hi`.
    pub fn domain(&self) -> (f64, f64) {
        let (a, b) = (self.start, self.end());
        (a.min(b), a.max(b))
    }

    pub fn final_state(&self) -> f64 {
        self.steps.last().map_or(self.x0, |s| s.eval(self.end()))
    }

    /// Breakpoints `(t_i, x_i)` in integration order.
    pub fn breakpoints(&self) -> Vec<(f64, f64)> {
        std::iter::once((self.start, self.x0))
            .chain(self.steps.iter().map(|s| (s.t1(), s.x1())))
            .collect()
    }

    fn locate(&self, t: f64) -> Option<&Step> {
        if self.steps.is_empty() {
            return None;
        }
        let fwd = self.steps[0].h > 0.0;
        let idx = self
            .steps
            .partition_point(|s| if fwd { s.t1() < t } else { s.t1() > t });
        self.steps
            .get(idx.min(self.steps.len() - 1))
            .filter(|s| s.contains(t))
    }

    /// Dense-output value at `t`, `None` outside the domain.
    pub fn eval(&self, t: f64) -> Option<f64> {
        let (lo, hi) = self.domain();
        if t < lo || t > hi {
            return None;
        }
        if self.steps.is_empty() {
            return Some(self.x0);
        }
        self.locate(t).map(|s| s.eval(t))
    }

    /// Samples at `stride` spacing from the start, plus the end point.
    pub fn sample(&self, stride: f64) -> Vec<(f64, f64)> {
        let (lo, hi) = self.domain();
        let stride = stride.abs().max(1e-12);
        let n = ((hi - lo) / stride).floor() as usize;
        let sign = if self.is_forward() { 1.0 } else { -1.0 };
        let mut out: Vec<(f64, f64)> = (0..=n)
            .map(|i| self.start + sign * i as f64 * stride)
            .filter_map(|t| self.eval(t).map(|x| (t, x)))
            .collect();
        let end = self.end();
        if out.last().map_or(true, |&(t, _)| (t - end).abs() > 1e-12) {
            if let Some(x) = self.eval(end) {
                out.push((end, x));
            }
        }
        out
    }
}

/// Integrates `x' = h(t, x)` from `(s, x0)` to `t_end` (either direction).
pub fn solve(
    field: &ScalarField,
    s: f64,
    x0: f64,
    t_end: f64,
    opts: SolveOptions,
) -> Result<Trajectory, SolveError> {
    let mut stepper = Stepper::new(field, s, x0, t_end, opts)?;
    let mut steps = Vec::new();
    while let Some(step) = stepper.step()? {
        steps.push(step);
    }
    Ok(Trajectory {
        steps,
        start: s,
        x0,
        status: stepper.status.unwrap_or(SolveStatus::Complete),
        stats: stepper.stats,
        tol: opts.tol,
    })
}

/// Result of [`solve_on_grid`]: values at the grid points reached before
/// completion or escape.
#[derive(Debug, Clone)]
pub struct GridRun {
    pub values: Vec<f64>,
    pub status: SolveStatus,
    pub final_state: f64,
    pub stats: SolveStats,
}

/// Integrates from `(s, x0)` to `t_end`, keeping only the values at `grid`
/// (ordered in the integration direction, inside `[s, t_end]`).
pub fn solve_on_grid(
    field: &ScalarField,
    s: f64,
    x0: f64,
    t_end: f64,
    grid: &[f64],
    opts: SolveOptions,
) -> Result<GridRun, SolveError> {
    let mut stepper = Stepper::new(field, s, x0, t_end, opts)?;
    let fwd = t_end >= s;
    let mut values = Vec::with_capacity(grid.len());
    let mut next = 0;
    while next < grid.len() && grid[next] == s {
        values.push(x0);
        next += 1;
    }
    loop {
        stepper.set_stop(grid.get(next).copied());
        let Some(step) = stepper.step()? else { break };
        let reach = match stepper.status {
            Some(SolveStatus::Blowup(e)) => e.time,
            _ => step.t1(),
        };
        while next < grid.len() {
            let g = grid[next];
            let inside = if fwd { g <= reach } else { g >= reach };
            if !inside {
                break;
            }
            values.push(step.eval(g));
            next += 1;
        }
    }
    Ok(GridRun {
        values,
        status: stepper.status.unwrap_or(SolveStatus::Complete),
        final_state: stepper.state(),
        stats: stepper.stats,
    })
}

// Five-point Gauss–Legendre nodes and weights on [-1, 1].
const GL_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683,
    0.0,
    0.538_469_310_105_683,
    0.906_179_845_938_664,
];
const GL_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189,
    0.478_628_670_499_366,
    0.568_888_888_888_889,
    0.478_628_670_499_366,
    0.236_926_885_056_189,
];

/// Time average `(1/(b-a)) ∫_a^b hx(r, x(r)) dr` along `traj`, integrated
/// step by step over the trajectory's own mesh.
pub fn finite_time_lyapunov(
    field: &ScalarField,
    traj: &Trajectory,
    a: f64,
    b: f64,
) -> Result<f64, SolveError> {
    let (lo, hi) = traj.domain();
    let slack = 1e-12 * (hi - lo).abs().max(1.0);
    if !(a < b) || a < lo - slack || b > hi + slack {
        return Err(SolveError::OutsideDomain { a, b, lo, hi });
    }
    let mut total = 0.0;
    for step in traj.steps() {
        let (s0, s1) = if step.h > 0.0 {
            (step.t0, step.t1())
        } else {
            (step.t1(), step.t0)
        };
        let (u, v) = (s0.max(a), s1.min(b).min(hi));
        if v <= u {
            continue;
        }
        let mid = 0.5 * (u + v);
        let half = 0.5 * (v - u);
        total += half
            * GL_NODES
                .iter()
                .zip(GL_WEIGHTS)
                .map(|(&n, w)| {
                    let t = mid + half * n;
                    w * field.hx(t, step.eval(t))
                })
                .sum::<f64>();
    }
    if traj.steps().is_empty() {
        total = (b - a) * field.hx(a, traj.x0);
    }
    Ok(total / (b - a))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decay() -> ScalarField {
        ScalarField::from_fns("decay", |_, x| -x, |_, _| -1.0)
    }

    #[test]
    fn exponential_decay_closed_form() {
        let tol = 1e-8;
        let traj = solve(&decay(), 0.0, 1.0, 1.0, SolveOptions::with_tol(tol)).unwrap();
        assert_eq!(traj.status, SolveStatus::Complete);
        assert!((traj.final_state() - (-1.0f64).exp()).abs() < 10.0 * tol);
        for i in 0..=100 {
            let t = i as f64 / 100.0;
            assert!((traj.eval(t).unwrap() - (-t).exp()).abs() < 10.0 * tol);
        }
    }

    #[test]
    fn quadratic_blowup_time() {
        let field = ScalarField::from_fns("square", |_, x| x * x, |_, x| 2.0 * x);
        let traj = solve(&field, 0.0, 1.0, 2.0, SolveOptions::default()).unwrap();
        let esc = traj.status.escape().expect("escape");
        assert_eq!(esc.direction, EscapeDirection::PlusInfinity);
        assert!((esc.time - 1.0).abs() < 1e-3, "escape at {}", esc.time);
    }

    #[test]
    fn backward_integration() {
        let tol = 1e-9;
        let traj = solve(
            &decay(),
            1.0,
            (-1.0f64).exp(),
            -1.0,
            SolveOptions::with_tol(tol),
        )
        .unwrap();
        assert!(!traj.is_forward());
        assert!((traj.final_state() - 1.0f64.exp()).abs() < 100.0 * tol);
        assert!((traj.eval(0.0).unwrap() - 1.0).abs() < 100.0 * tol);
    }

    #[test]
    fn cubic_equilibrium_is_kept() {
        let field = ScalarField::from_fns(
            "cubic",
            |_, x| x * (1.0 - x) * (x - 2.0) / 6.0,
            |_, x| (-3.0 * x * x + 6.0 * x - 2.0) / 6.0,
        );
        let tol = 1e-8;
        let traj = solve(&field, 0.0, 2.0, 50.0, SolveOptions::with_tol(tol)).unwrap();
        for (_, x) in traj.sample(0.5) {
            assert!((x - 2.0).abs() < 10.0 * tol);
        }
    }

    #[test]
    fn lyapunov_examples() {
        let traj = solve(&decay(), 0.0, 3.0, 5.0, SolveOptions::default()).unwrap();
        let g = finite_time_lyapunov(&decay(), &traj, 0.5, 4.0).unwrap();
        assert!((g + 1.0).abs() < 1e-12);

        let logistic =
            ScalarField::from_fns("logistic", |_, x| x * (1.0 - x), |_, x| 1.0 - 2.0 * x);
        let traj = solve(&logistic, 0.0, 1.0, 10.0, SolveOptions::default()).unwrap();
        let g = finite_time_lyapunov(&logistic, &traj, 0.0, 10.0).unwrap();
        assert!((g + 1.0).abs() < 1e-8);

        let cubic = ScalarField::from_fns(
            "cubic",
            |_, x| x * (1.0 - x) * (x - 2.0) / 6.0,
            |_, x| (-3.0 * x * x + 6.0 * x - 2.0) / 6.0,
        );
        let traj = solve(&cubic, 0.0, 1.0, 10.0, SolveOptions::default()).unwrap();
        let g = finite_time_lyapunov(&cubic, &traj, 0.0, 10.0).unwrap();
        assert!((g - 1.0 / 6.0).abs() < 1e-8);

        assert!(matches!(
            finite_time_lyapunov(&cubic, &traj, 5.0, 20.0),
            Err(SolveError::OutsideDomain { .. })
        ));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(solve(&decay(), 0.0, 1.0, 1.0, SolveOptions::with_tol(0.0)).is_err());
        let opts = SolveOptions {
            x_guard: 0.5,
            ..SolveOptions::default()
        };
        assert!(solve(&decay(), 0.0, 1.0, 1.0, opts).is_err());
    }

    #[test]
    fn grid_run_matches_closed_form() {
        // x(t) = (sin t - cos t) / 2 + 0.8 e^{-t}
        let field = ScalarField::from_fns("forced", |t, x| -x + t.sin(), |_, _| -1.0);
        let grid: Vec<f64> = (0..=40).map(|i| i as f64 * 0.25).collect();
        let run = solve_on_grid(&field, 0.0, 0.3, 10.0, &grid, SolveOptions::default()).unwrap();
        assert_eq!(run.values.len(), grid.len());
        for (t, v) in grid.iter().zip(&run.values) {
            let exact = 0.5 * (t.sin() - t.cos()) + 0.8 * (-t).exp();
            assert!((exact - v).abs() < 1e-7);
        }
    }

    #[test]
    fn derivative_mismatch_detects_wrong_hx() {
        let good = ScalarField::from_fns("g", |t, x| x * x * t.cos(), |t, x| 2.0 * x * t.cos());
        let bad = ScalarField::from_fns("b", |t, x| x * x * t.cos(), |t, x| x * t.cos());
        let pts = [(0.1, 0.5), (1.0, -2.0), (3.0, 4.0)];
        assert!(good.derivative_mismatch(&pts) < 1e-5);
        assert!(bad.derivative_mismatch(&pts) > 1e-2);
    }
}
