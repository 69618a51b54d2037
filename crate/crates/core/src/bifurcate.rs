//! Saddle-node bifurcation values by bisection on solution-structure
//! predicates.
//!
//! The predicates are tri-state. Near a bifurcation the pullback runs stop
//! converging, certificates lose their margin and separations shrink below
//! threshold; those parameters are reported as [`Outcome::Undetermined`] and
//! the bisection narrows onto the undetermined zone from both sides.

use std::fmt;
use std::sync::Arc;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::bounded::{
    auto_bounds, certify, lower_bounded, middle_bounded, separation, upper_bounded, BoundedError,
    BoundedOptions, BoundedSolutionEstimate, HyperbolicKind, LowerMode, LowerSign, MiddleMethod,
    Pullback, Role, Window,
};
use crate::integrate::{Law, ScalarField};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BifurcateError {
    #[error("predicate is {lo} at λ = {lo_lambda} and {hi} at λ = {hi_lambda}; need yes at one end and no at the other ({lo_note}; {hi_note})")]
    NoSignChange {
        lo_lambda: f64,
        hi_lambda: f64,
        lo: Outcome,
        hi: Outcome,
        lo_note: String,
        hi_note: String,
    },
    #[error("seed λ = {lambda} does not have three separated solutions ({note})")]
    SeedRejected { lambda: f64, note: String },
    #[error("no loss of structure found on the {side} side within λ = {reached}")]
    NoBoundary { side: &'static str, reached: f64 },
    #[error("invalid λ range [{0}, {1}]")]
    InvalidRange(f64, f64),
}

/// Direction in which `h` moves as `λ` increases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Monotonicity {
    Increasing,
    Decreasing,
}

/// A one-parameter family `λ ↦ h(·, ·, λ)` with its declared monotonicity.
#[derive(Clone)]
pub struct ParametricFamily {
    name: String,
    law: Arc<dyn Law>,
    monotonicity: Monotonicity,
    range: (f64, f64),
    shift: f64,
}

impl fmt::Debug for ParametricFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ParametricFamily")
            .field("name", &self.name)
            .field("monotonicity", &self.monotonicity)
            .field("range", &self.range)
            .field("shift", &self.shift)
            .finish()
    }
}

impl ParametricFamily {
    pub fn new(
        name: impl Into<String>,
        law: Arc<dyn Law>,
        monotonicity: Monotonicity,
        range: (f64, f64),
    ) -> Self {
        Self {
            name: name.into(),
            law,
            monotonicity,
            range,
            shift: 0.0,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn law(&self) -> &Arc<dyn Law> {
        &self.law
    }

    pub fn monotonicity(&self) -> Monotonicity {
        self.monotonicity
    }

    pub fn range(&self) -> (f64, f64) {
        self.range
    }

    pub fn with_range(mut self, lo: f64, hi: f64) -> Self {
        self.range = (lo, hi);
        self
    }

    /// The family of time-shifted fields `h(t + s, x, λ)`.
    pub fn shifted(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.shift += s;
        out
    }

    pub fn field(&self, lambda: f64) -> ScalarField {
        ScalarField::new(self.law.clone(), lambda).shifted(self.shift)
    }

    /// Checks the declared monotonicity on sampled `(t, x)` points and
    /// `λ₁ < λ₂` pairs; returns the first violation.
    pub fn check_monotonicity(
        &self,
        points: &[(f64, f64)],
        pairs: &[(f64, f64)],
    ) -> Result<(), (f64, f64, f64, f64)> {
        for &(l1, l2) in pairs {
            let (l1, l2) = if l1 < l2 { (l1, l2) } else { (l2, l1) };
            let (f1, f2) = (self.field(l1), self.field(l2));
            for &(t, x) in points {
                let d = f2.h(t, x) - f1.h(t, x);
                let ok = match self.monotonicity {
                    Monotonicity::Increasing => d > 0.0,
                    Monotonicity::Decreasing => d < 0.0,
                };
                if !ok && l1 != l2 {
                    return Err((t, x, l1, l2));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Yes,
    No,
    Undetermined,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Yes => "yes",
            Outcome::No => "no",
            Outcome::Undetermined => "undetermined",
        })
    }
}

/// Settings shared by the structure predicates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PredicateOptions {
    pub window: Window,
    /// Second window checked on its own; the structure must be present on
    /// both. Used when it is decided far from the first window.
    pub tail: Option<Window>,
    pub bounded: BoundedOptions,
    /// Explicit starting values; derived from coercivity on the window when absent.
    pub x_lo: Option<f64>,
    pub x_hi: Option<f64>,
}

impl Default for PredicateOptions {
    fn default() -> Self {
        Self {
            window: Window::new(-40.0, 40.0),
            tail: None,
            bounded: BoundedOptions::default(),
            x_lo: None,
            x_hi: None,
        }
    }
}

impl PredicateOptions {
    pub fn with_window(mut self, window: Window) -> Self {
        self.window = window;
        self
    }

    pub fn with_tail(mut self, tail: Option<Window>) -> Self {
        self.tail = tail;
        self
    }

    pub fn with_bounds(mut self, x_lo: f64, x_hi: f64) -> Self {
        self.x_lo = Some(x_lo);
        self.x_hi = Some(x_hi);
        self
    }

    fn bounds(&self, field: &ScalarField, sign: LowerSign) -> Result<(f64, f64), BoundedError> {
        match (self.x_lo, self.x_hi) {
            (Some(lo), Some(hi)) => Ok((lo, hi)),
            (lo, hi) => {
                let (alo, ahi) = auto_bounds(field, &self.window, sign)?;
                Ok((lo.unwrap_or(alo), hi.unwrap_or(ahi)))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateSummary {
    pub role: Role,
    pub gamma_est: f64,
    pub kind: Option<HyperbolicKind>,
}

/// Result of one predicate evaluation, with the evidence behind it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assessment {
    pub outcome: Outcome,
    pub note: String,
    /// Smallest pairwise separation among the computed solutions.
    pub separation: Option<f64>,
    pub certificates: Vec<CertificateSummary>,
}

impl Assessment {
    fn new(outcome: Outcome, note: impl Into<String>) -> Self {
        Self {
            outcome,
            note: note.into(),
            separation: None,
            certificates: Vec::new(),
        }
    }

    fn undetermined(note: impl Into<String>) -> Self {
        Self::new(Outcome::Undetermined, note)
    }
}

fn estimate_or_verdict(
    run: Result<Pullback, BoundedError>,
    what: &str,
) -> Result<BoundedSolutionEstimate, Assessment> {
    match run {
        Ok(Pullback::Escapes { escape, depth }) => Err(Assessment::new(
            Outcome::No,
            format!(
                "{what} run escapes at t = {:.4} (depth {depth})",
                escape.time
            ),
        )),
        Ok(Pullback::Bounded(est)) if !est.converged => Err(Assessment::undetermined(format!(
            "{what} pullback unconverged (residual {:.2e})",
            est.residual
        ))),
        Ok(Pullback::Bounded(est)) => Ok(est),
        Err(e) => Err(Assessment::undetermined(format!("{what}: {e}"))),
    }
}

fn certify_all(
    field: &ScalarField,
    estimates: &[(&BoundedSolutionEstimate, HyperbolicKind)],
    gap: f64,
    opts: &BoundedOptions,
) -> (Vec<CertificateSummary>, Option<String>) {
    // Probes must stay inside the basin between neighbouring solutions.
    let mut local = *opts;
    local.rho_probe = opts.rho_probe.min(0.25 * gap);
    let mut summaries = Vec::new();
    let mut failure = None;
    for &(est, expected) in estimates {
        match certify(field, est, &local) {
            Ok(c) => {
                let kind = c.certificate.map(|k| k.kind);
                if kind != Some(expected) && failure.is_none() {
                    failure = Some(format!(
                        "{:?} solution not certified {expected:?} (gamma_est {:.3e}{})",
                        est.role,
                        c.gamma_est,
                        if c.note.is_empty() {
                            String::new()
                        } else {
                            format!("; {}", c.note)
                        }
                    ));
                }
                summaries.push(CertificateSummary {
                    role: est.role,
                    gamma_est: c.gamma_est,
                    kind,
                });
            }
            Err(e) => {
                if failure.is_none() {
                    failure = Some(format!("{:?}: {e}", est.role));
                }
            }
        }
    }
    (summaries, failure)
}

/// Runs `check` on the window and, unless that already says no, on the tail.
fn over_windows(
    opts: &PredicateOptions,
    check: impl Fn(&PredicateOptions) -> Assessment,
) -> Assessment {
    let first = check(opts);
    let Some(tail) = opts.tail else { return first };
    if first.outcome == Outcome::No {
        return first;
    }
    let mut second = check(&opts.with_window(tail).with_tail(None));
    second.note = format!("tail window: {}", second.note);
    match (first.outcome, second.outcome) {
        (_, Outcome::No) | (Outcome::Yes, Outcome::Undetermined) => second,
        (Outcome::Undetermined, _) => first,
        _ => {
            let mut out = first;
            out.separation = out.separation.zip(second.separation).map(|(a, b)| a.min(b));
            out.certificates.extend(second.certificates);
            out.note = format!("{}; {}", out.note, second.note);
            out
        }
    }
}

/// Whether the field has an attractive upper and a repulsive lower bounded
/// solution, uniformly separated on the window (concave setting).
pub fn has_two_separated(field: &ScalarField, opts: &PredicateOptions) -> Assessment {
    over_windows(opts, |o| two_separated_on(field, o))
}

fn two_separated_on(field: &ScalarField, opts: &PredicateOptions) -> Assessment {
    let (x_lo, x_hi) = match opts.bounds(field, LowerSign::Negative) {
        Ok(b) => b,
        Err(e) => return Assessment::undetermined(e.to_string()),
    };
    let bo = &opts.bounded;
    let upper = match estimate_or_verdict(upper_bounded(field, opts.window, x_hi, bo), "upper") {
        Ok(e) => e,
        Err(a) => return a,
    };
    let lower = match estimate_or_verdict(
        lower_bounded(field, opts.window, x_lo, LowerMode::Backward, bo),
        "lower",
    ) {
        Ok(e) => e,
        Err(a) => return a,
    };
    let gap = match separation(&lower, &upper) {
        Ok(g) => g,
        Err(e) => return Assessment::undetermined(e.to_string()),
    };
    let mut out = Assessment::undetermined("");
    out.separation = Some(gap);
    if lower.values.iter().zip(&upper.values).any(|(l, u)| l > u) {
        out.note = "lower and upper estimates cross".into();
        return out;
    }
    if gap < bo.separation_threshold() {
        out.note = format!("separation {gap:.3e} below threshold");
        return out;
    }
    let (certs, failure) = certify_all(
        field,
        &[
            (&upper, HyperbolicKind::Attractive),
            (&lower, HyperbolicKind::Repulsive),
        ],
        gap,
        bo,
    );
    out.certificates = certs;
    match failure {
        Some(note) => out.note = note,
        None => {
            out.outcome = Outcome::Yes;
            out.note = format!("separated by {gap:.3e}");
        }
    }
    out
}

/// Whether the field has three uniformly separated hyperbolic solutions
/// (attractive, repulsive, attractive) on the window (d-concave setting).
pub fn has_three_separated(field: &ScalarField, opts: &PredicateOptions) -> Assessment {
    over_windows(opts, |o| three_separated_on(field, o))
}

fn three_separated_on(field: &ScalarField, opts: &PredicateOptions) -> Assessment {
    let (x_lo, x_hi) = match opts.bounds(field, LowerSign::Positive) {
        Ok(b) => b,
        Err(e) => return Assessment::undetermined(e.to_string()),
    };
    let bo = &opts.bounded;
    let unexpected = |a: Assessment| Assessment::undetermined(a.note);
    let upper = match estimate_or_verdict(upper_bounded(field, opts.window, x_hi, bo), "upper") {
        Ok(e) => e,
        Err(a) if a.outcome == Outcome::No => return unexpected(a),
        Err(a) => return a,
    };
    let lower = match estimate_or_verdict(
        lower_bounded(field, opts.window, x_lo, LowerMode::Forward, bo),
        "lower",
    ) {
        Ok(e) => e,
        Err(a) if a.outcome == Outcome::No => return unexpected(a),
        Err(a) => return a,
    };
    let outer = match separation(&lower, &upper) {
        Ok(g) => g,
        Err(e) => return Assessment::undetermined(e.to_string()),
    };
    let threshold = bo.separation_threshold();
    if outer < threshold {
        let mut a = Assessment::new(
            Outcome::No,
            format!("lower and upper solutions merge (separation {outer:.3e})"),
        );
        a.separation = Some(outer);
        return a;
    }
    let middle = match middle_bounded(field, &lower, &upper, MiddleMethod::BackwardPullback, bo) {
        Ok(m) if m.converged => m,
        Ok(m) => {
            return Assessment::undetermined(format!(
                "middle pullback unconverged (residual {:.2e})",
                m.residual
            ))
        }
        Err(e) => return Assessment::undetermined(format!("middle: {e}")),
    };
    let gap = [
        separation(&lower, &middle).unwrap_or(0.0),
        separation(&middle, &upper).unwrap_or(0.0),
    ]
    .into_iter()
    .fold(outer, f64::min);
    let mut out = Assessment::undetermined("");
    out.separation = Some(gap);
    let ordered = lower
        .values
        .iter()
        .zip(&middle.values)
        .zip(&upper.values)
        .all(|((l, m), u)| l < m && m < u);
    if !ordered {
        out.note = "middle estimate leaves the band between lower and upper".into();
        return out;
    }
    if gap < threshold {
        out.note = format!("separation {gap:.3e} below threshold");
        return out;
    }
    let (certs, failure) = certify_all(
        field,
        &[
            (&lower, HyperbolicKind::Attractive),
            (&middle, HyperbolicKind::Repulsive),
            (&upper, HyperbolicKind::Attractive),
        ],
        gap,
        bo,
    );
    out.certificates = certs;
    match failure {
        Some(note) => out.note = note,
        None => {
            out.outcome = Outcome::Yes;
            out.note = format!("separated by {gap:.3e}");
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BifurcationKind {
    SingleSaddleNode,
    DoubleSaddleNode,
    Tipping,
}

/// One predicate evaluation made during a search.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeRecord {
    pub lambda: f64,
    pub outcome: Outcome,
    pub note: String,
    pub separation: Option<f64>,
}

/// A located parameter value.
///
/// `yes_point` and `no_point` are the closest probes on either side that
/// evaluated to yes and no; everything strictly between them was either
/// undetermined or not probed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LocatedValue {
    pub value: f64,
    pub half_width: f64,
    pub yes_point: f64,
    pub no_point: f64,
    /// Width of the sub-bracket in which every probe was undetermined.
    pub undetermined_width: f64,
    /// `half_width <= tol`.
    pub within_tol: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BifurcationResult {
    pub kind: BifurcationKind,
    /// `[λ̃]` for a single saddle-node or tipping value, `[λ̄₋, λ̄⁺]` for a
    /// double saddle-node.
    pub values: Vec<LocatedValue>,
    pub tol: f64,
    pub probes: Vec<ProbeRecord>,
}

impl BifurcationResult {
    pub fn value(&self) -> f64 {
        self.values[0].value
    }

    /// Full bracket width, the largest over located values.
    pub fn bracket_width(&self) -> f64 {
        self.values
            .iter()
            .map(|v| 2.0 * v.half_width)
            .fold(0.0, f64::max)
    }
}

/// Bisection between a yes and a no point that tolerates undetermined
/// probes: once one is hit, the yes edge and the no edge of the
/// undetermined zone are located separately.
pub fn locate_edge(
    eval: &mut dyn FnMut(f64) -> Outcome,
    yes: f64,
    no: f64,
    tol: f64,
) -> LocatedValue {
    let (mut y, mut n) = (yes, no);
    let mut inner: Option<(f64, f64)> = None;
    while (n - y).abs() > 2.0 * tol {
        let m = 0.5 * (y + n);
        match eval(m) {
            Outcome::Yes => y = m,
            Outcome::No => n = m,
            Outcome::Undetermined => {
                inner = Some((m, m));
                break;
            }
        }
    }
    if let Some((mut uy, mut un)) = inner {
        while (uy - y).abs() > tol {
            let m = 0.5 * (y + uy);
            if eval(m) == Outcome::Yes {
                y = m;
            } else {
                uy = m;
            }
        }
        while (n - un).abs() > tol {
            let m = 0.5 * (un + n);
            if eval(m) == Outcome::No {
                n = m;
            } else {
                un = m;
            }
        }
        inner = Some((uy, un));
    }
    let half_width = 0.5 * (n - y).abs();
    LocatedValue {
        value: 0.5 * (y + n),
        half_width,
        yes_point: y,
        no_point: n,
        undetermined_width: inner.map_or(0.0, |(a, b)| (b - a).abs()),
        within_tol: half_width <= tol,
    }
}

fn probe(
    records: &mut Vec<ProbeRecord>,
    lambda: f64,
    assess: impl Fn(f64) -> Assessment,
) -> Assessment {
    let a = assess(lambda);
    records.push(ProbeRecord {
        lambda,
        outcome: a.outcome,
        note: a.note.clone(),
        separation: a.separation,
    });
    a
}

/// Bisection driver shared by the saddle-node and tipping searches: checks
/// that the endpoints disagree, then locates the edge.
pub fn bisect_predicate(
    kind: BifurcationKind,
    lo: f64,
    hi: f64,
    tol: f64,
    assess: impl Fn(f64) -> Assessment,
) -> Result<BifurcationResult, BifurcateError> {
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(BifurcateError::InvalidRange(lo, hi));
    }
    let mut probes = Vec::new();
    let a_lo = probe(&mut probes, lo, &assess);
    let a_hi = probe(&mut probes, hi, &assess);
    let (yes, no) = match (a_lo.outcome, a_hi.outcome) {
        (Outcome::Yes, Outcome::No) => (lo, hi),
        (Outcome::No, Outcome::Yes) => (hi, lo),
        (lo_o, hi_o) => {
            return Err(BifurcateError::NoSignChange {
                lo_lambda: lo,
                hi_lambda: hi,
                lo: lo_o,
                hi: hi_o,
                lo_note: a_lo.note,
                hi_note: a_hi.note,
            })
        }
    };
    let value = locate_edge(
        &mut |l| probe(&mut probes, l, &assess).outcome,
        yes,
        no,
        tol,
    );
    Ok(BifurcationResult {
        kind,
        values: vec![value],
        tol,
        probes,
    })
}

/// Locates the saddle-node value `λ̃` of a concave-type family between
/// `lo` and `hi`.
pub fn find_saddle_node(
    family: &ParametricFamily,
    lo: f64,
    hi: f64,
    tol: f64,
    opts: &PredicateOptions,
) -> Result<BifurcationResult, BifurcateError> {
    bisect_predicate(BifurcationKind::SingleSaddleNode, lo, hi, tol, |l| {
        has_two_separated(&family.field(l), opts)
    })
}

/// Locates `(λ̄₋, λ̄⁺)` by expanding outward from a seed with three
/// separated solutions, then bisecting each side.
pub fn find_double_saddle_node(
    family: &ParametricFamily,
    seed: f64,
    radius: f64,
    tol: f64,
    opts: &PredicateOptions,
) -> Result<BifurcationResult, BifurcateError> {
    let assess = |l: f64| has_three_separated(&family.field(l), opts);
    let mut probes = Vec::new();
    let at_seed = probe(&mut probes, seed, assess);
    if at_seed.outcome != Outcome::Yes {
        return Err(BifurcateError::SeedRejected {
            lambda: seed,
            note: at_seed.note,
        });
    }
    let mut values = Vec::new();
    for (dir, side) in [(-1.0, "lower"), (1.0, "upper")] {
        let mut yes = seed;
        let mut no = None;
        let mut step = radius;
        let mut reached = seed;
        for _ in 0..40 {
            let l = seed + dir * step;
            reached = l;
            match probe(&mut probes, l, assess).outcome {
                Outcome::Yes => yes = l,
                Outcome::No => {
                    no = Some(l);
                    break;
                }
                Outcome::Undetermined => {}
            }
            step *= 2.0;
        }
        let no = no.ok_or(BifurcateError::NoBoundary { side, reached })?;
        values.push(locate_edge(
            &mut |l| probe(&mut probes, l, assess).outcome,
            yes,
            no,
            tol,
        ));
    }
    Ok(BifurcationResult {
        kind: BifurcationKind::DoubleSaddleNode,
        values,
        tol,
        probes,
    })
}

/// What to locate at each grid point of a curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum CurveTarget {
    /// Single saddle-node searched in `[lo, hi]`.
    Single { lo: f64, hi: f64 },
    /// Double saddle-node expanded from `seed` with initial `radius`.
    Double { seed: f64, radius: f64 },
}

/// How the predicate window follows `k` along a curve.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
#[serde(rename_all = "snake_case", tag = "rule")]
pub enum WindowRule {
    /// The predicate window as given, for every `k`.
    #[default]
    Fixed,
    /// Adds a tail window of the same length ending at `1/k² + reach/k`,
    /// past the switch of an arctan blend with rate `k`, where the signal
    /// has settled near its far-future limit.
    BlendTail { reach: f64 },
}

impl WindowRule {
    pub fn apply(&self, opts: PredicateOptions, k: f64) -> PredicateOptions {
        match *self {
            WindowRule::BlendTail { reach } if k > 0.0 => {
                let base = opts.window;
                let end = 1.0 / (k * k) + reach / k;
                if end <= base.end {
                    return opts;
                }
                let tail = Window::with_dt(end - base.length(), end, base.dt);
                opts.with_tail(Some(tail))
            }
            _ => opts,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveOptions {
    pub target: CurveTarget,
    pub tol: f64,
    pub warm_start: bool,
    /// Number of grid points re-solved cold when warm starting.
    pub cross_checks: usize,
    pub seed: u64,
    pub predicate: PredicateOptions,
    pub window_rule: WindowRule,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoint {
    pub k: f64,
    pub result: Option<BifurcationResult>,
    pub error: Option<String>,
}

impl CurvePoint {
    pub fn values(&self) -> Option<Vec<f64>> {
        self.result
            .as_ref()
            .map(|r| r.values.iter().map(|v| v.value).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossCheck {
    pub k: f64,
    pub warm: Vec<f64>,
    pub cold: Vec<f64>,
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveTable {
    pub points: Vec<CurvePoint>,
    pub cross_checks: Vec<CrossCheck>,
}

fn solve_point<F>(make: &F, k: f64, target: CurveTarget, opts: &CurveOptions) -> CurvePoint
where
    F: Fn(f64) -> ParametricFamily,
{
    let family = make(k);
    let predicate = opts.window_rule.apply(opts.predicate, k);
    let result = match target {
        CurveTarget::Single { lo, hi } => find_saddle_node(&family, lo, hi, opts.tol, &predicate),
        CurveTarget::Double { seed, radius } => {
            find_double_saddle_node(&family, seed, radius, opts.tol, &predicate)
        }
    };
    match result {
        Ok(r) => CurvePoint {
            k,
            result: Some(r),
            error: None,
        },
        Err(e) => CurvePoint {
            k,
            result: None,
            error: Some(e.to_string()),
        },
    }
}

/// Warm target for the next grid point: a tight bracket around the
/// previous value for single searches, the previous interval centre for
/// double ones.
fn warm_target(prev: &BifurcationResult, cold: CurveTarget, tol: f64) -> CurveTarget {
    match cold {
        CurveTarget::Single { lo, hi } => {
            let v = prev.values[0].value;
            let r = (64.0 * tol).max(4.0 * prev.values[0].half_width);
            CurveTarget::Single {
                lo: (v - r).max(lo),
                hi: (v + r).min(hi),
            }
        }
        CurveTarget::Double { radius, .. } => {
            let (a, b) = (prev.values[0].value, prev.values[1].value);
            CurveTarget::Double {
                seed: 0.5 * (a + b),
                radius: radius.min(0.25 * (b - a)).max(tol),
            }
        }
    }
}

fn warm_point<F>(
    make: &F,
    k: f64,
    prev: Option<&BifurcationResult>,
    opts: &CurveOptions,
) -> CurvePoint
where
    F: Fn(f64) -> ParametricFamily,
{
    let Some(prev) = prev else {
        return solve_point(make, k, opts.target, opts);
    };
    if let CurveTarget::Single { lo, hi } = opts.target {
        // Widen geometrically around the previous value until the bracket
        // straddles, falling back to the cold bracket.
        let v = prev.values[0].value;
        let mut r = (64.0 * opts.tol).max(4.0 * prev.values[0].half_width);
        while r < (hi - lo) {
            let t = CurveTarget::Single {
                lo: (v - r).max(lo),
                hi: (v + r).min(hi),
            };
            let p = solve_point(make, k, t, opts);
            if p.result.is_some() {
                return p;
            }
            r *= 8.0;
        }
        return solve_point(make, k, opts.target, opts);
    }
    let p = solve_point(make, k, warm_target(prev, opts.target, opts.tol), opts);
    if p.result.is_some() {
        p
    } else {
        solve_point(make, k, opts.target, opts)
    }
}

/// Locates the bifurcation value(s) at every `k` of the grid.
///
/// With warm starting the grid is swept in order, each search bracketed
/// around the previous value, and `cross_checks` randomly chosen points are
/// re-solved from the cold bracket. Without it the points run in parallel.
/// Per-point failures are recorded and the sweep continues.
pub fn trace_curve<F>(make: F, grid: &[f64], opts: &CurveOptions) -> CurveTable
where
    F: Fn(f64) -> ParametricFamily + Sync,
{
    if !opts.warm_start {
        let points = grid
            .par_iter()
            .map(|&k| solve_point(&make, k, opts.target, opts))
            .collect();
        return CurveTable {
            points,
            cross_checks: Vec::new(),
        };
    }
    let mut points: Vec<CurvePoint> = Vec::with_capacity(grid.len());
    for &k in grid {
        let prev = points.iter().rev().find_map(|p| p.result.as_ref());
        points.push(warm_point(&make, k, prev, opts));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let n = opts.cross_checks.min(grid.len());
    let mut picks = sample(&mut rng, grid.len(), n).into_vec();
    picks.sort_unstable();
    let cross_checks = picks
        .par_iter()
        .filter_map(|&i| {
            let warm = points[i].values()?;
            let cold = solve_point(&make, grid[i], opts.target, opts);
            let cold_vals = cold.values()?;
            let widths: Vec<f64> = points[i]
                .result
                .as_ref()
                .zip(cold.result.as_ref())
                .map(|(a, b)| {
                    a.values
                        .iter()
                        .zip(&b.values)
                        .map(|(x, y)| x.half_width + y.half_width)
                        .collect()
                })
                .unwrap_or_default();
            let agrees = warm
                .iter()
                .zip(&cold_vals)
                .zip(widths)
                .all(|((a, b), w)| (a - b).abs() <= w + 2.0 * opts.tol);
            Some(CrossCheck {
                k: grid[i],
                warm,
                cold: cold_vals,
                agrees,
            })
        })
        .collect();
    CurveTable {
        points,
        cross_checks,
    }
}
