//! Critical transitions: tracking versus tipping.
//!
//! A transition equation is followed from its locally pullback attractive
//! solution, anchored in the past, up to a horizon `T_f`. Over the final
//! stretch of the horizon the solution is compared in sup norm with a
//! tracked attractor of the future (limit) equation and with an optional
//! alternative state. Blow-up or capture by the alternative is tipping.

use serde::Serialize;
use thiserror::Error;

use crate::bifurcate::{
    bisect_predicate, Assessment, BifurcateError, BifurcationKind, BifurcationResult, Outcome,
    ParametricFamily,
};
use crate::bounded::{
    auto_bounds, lower_bounded, upper_bounded, BoundedError, BoundedOptions,
    BoundedSolutionEstimate, LowerMode, LowerSign, Pullback, Window,
};
use crate::integrate::{solve, Escape, EscapeDirection, ScalarField, SolveError};

/// Terminal distance under which a solution counts as captured by an
/// attractive alternative, regardless of the sup-norm test.
pub const TERMINAL_CAPTURE: f64 = 1e-4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransitionError {
    #[error(transparent)]
    Bounded(#[from] BoundedError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("{0} reference is not converged")]
    UnconvergedReference(&'static str),
    #[error("{0} reference window [{1}, {2}] does not cover the approach interval [{3}, {4}]")]
    ReferenceWindow(&'static str, f64, f64, f64, f64),
    #[error("no locally pullback attractive solution: {0}")]
    NoPastAttractor(String),
    #[error("future equation has no {0} reference: {1}")]
    MissingReference(&'static str, String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// The past attractor connects to the tracked future attractor.
    Tracking,
    /// Blow-up, or capture by the alternative state.
    Tipping,
    /// Neither: close to the unstable boundary case, or horizon too short.
    Boundary,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransitionVerdict {
    pub verdict: Verdict,
    pub horizon: f64,
    /// Interval over which approach is measured.
    pub approach: (f64, f64),
    /// Sup distance to the tracked reference on the approach interval.
    pub distance_tracked: Option<f64>,
    pub distance_alternative: Option<f64>,
    pub escape: Option<Escape>,
    /// State at the horizon (or at the escape time).
    pub terminal: f64,
}

/// Reference solutions of the future equation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttractorRefs {
    pub tracked: BoundedSolutionEstimate,
    pub alternative: Option<BoundedSolutionEstimate>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransitionSetup {
    /// Window on which the locally pullback attractive solution is
    /// computed; the forward run starts at its end.
    pub anchor: Window,
    pub horizon: f64,
    /// Sup-norm approach tolerance.
    pub tol: f64,
    /// Fraction of `[anchor.end, horizon]` at its end used for the approach test.
    pub approach_fraction: f64,
    pub bounded: BoundedOptions,
    /// Starting value of the past pullback; from coercivity when absent.
    pub x_hi: Option<f64>,
}

impl TransitionSetup {
    pub fn new(anchor: Window, horizon: f64) -> Self {
        Self {
            anchor,
            horizon,
            tol: 1e-3,
            approach_fraction: 0.1,
            bounded: BoundedOptions::default(),
            x_hi: None,
        }
    }

    pub fn approach(&self) -> (f64, f64) {
        let t0 = self.anchor.end;
        (
            self.horizon - self.approach_fraction * (self.horizon - t0),
            self.horizon,
        )
    }

    fn window_for_approach(&self, dt: f64) -> Window {
        let (a, b) = self.approach();
        Window::with_dt(a, b, dt)
    }
}

/// Forward run of the locally pullback attractive solution.
struct Followed {
    escape: Option<Escape>,
    terminal: f64,
    /// Samples on the approach interval (empty after an escape).
    samples: Vec<(f64, f64)>,
}

/// Locally pullback attractive solution on the anchor window, or the
/// escape showing that nothing bounded survives from the past.
fn past_attractor(
    field: &ScalarField,
    setup: &TransitionSetup,
) -> Result<Result<BoundedSolutionEstimate, Escape>, TransitionError> {
    let x_hi = match setup.x_hi {
        Some(x) => x,
        None => auto_bounds(field, &setup.anchor, LowerSign::Any)?.1,
    };
    match upper_bounded(field, setup.anchor, x_hi, &setup.bounded)? {
        Pullback::Bounded(e) if e.converged => Ok(Ok(e)),
        Pullback::Bounded(e) => Err(TransitionError::NoPastAttractor(format!(
            "pullback unconverged (residual {:.2e})",
            e.residual
        ))),
        Pullback::Escapes { escape, .. } => Ok(Err(escape)),
    }
}

fn follow(
    field: &ScalarField,
    setup: &TransitionSetup,
    dt: f64,
) -> Result<Followed, TransitionError> {
    let past = match past_attractor(field, setup)? {
        Ok(e) => e,
        // Nothing bounded survives from the past: the run is already lost.
        Err(escape) => {
            return Ok(Followed {
                escape: Some(escape),
                terminal: if escape.direction == EscapeDirection::PlusInfinity {
                    f64::INFINITY
                } else {
                    f64::NEG_INFINITY
                },
                samples: Vec::new(),
            })
        }
    };
    let traj = solve(
        field,
        setup.anchor.end,
        past.last(),
        setup.horizon,
        setup.bounded.solve_options(),
    )?;
    if let Some(e) = traj.status.escape() {
        return Ok(Followed {
            escape: Some(e),
            terminal: traj.final_state(),
            samples: Vec::new(),
        });
    }
    let samples = setup
        .window_for_approach(dt)
        .times()
        .into_iter()
        .filter_map(|t| traj.eval(t).map(|x| (t, x)))
        .collect();
    Ok(Followed {
        escape: None,
        terminal: traj.final_state(),
        samples,
    })
}

fn check_ref(
    name: &'static str,
    r: &BoundedSolutionEstimate,
    approach: (f64, f64),
) -> Result<(), TransitionError> {
    if !r.converged {
        return Err(TransitionError::UnconvergedReference(name));
    }
    let slack = 1e-9 * (1.0 + approach.1.abs());
    if r.window.start > approach.0 + slack || r.window.end < approach.1 - slack {
        return Err(TransitionError::ReferenceWindow(
            name,
            r.window.start,
            r.window.end,
            approach.0,
            approach.1,
        ));
    }
    Ok(())
}

fn sup_distance(samples: &[(f64, f64)], r: &BoundedSolutionEstimate) -> f64 {
    samples
        .iter()
        .map(|&(t, x)| (x - r.value_at(t)).abs())
        .fold(0.0, f64::max)
}

fn judge(
    followed: Followed,
    refs: Option<&AttractorRefs>,
    setup: &TransitionSetup,
) -> TransitionVerdict {
    let mut out = TransitionVerdict {
        verdict: Verdict::Boundary,
        horizon: setup.horizon,
        approach: setup.approach(),
        distance_tracked: None,
        distance_alternative: None,
        escape: followed.escape,
        terminal: followed.terminal,
    };
    if followed.escape.is_some() {
        out.verdict = Verdict::Tipping;
        return out;
    }
    let Some(refs) = refs else {
        return out;
    };
    let d_tr = sup_distance(&followed.samples, &refs.tracked);
    out.distance_tracked = Some(d_tr);
    let alt = refs.alternative.as_ref().map(|alt| {
        let d = sup_distance(&followed.samples, alt);
        let captured = (followed.terminal - alt.value_at(setup.horizon)).abs() < TERMINAL_CAPTURE
            && alt.certificate.is_some_and(|c| c.gamma_est < 0.0);
        (d, captured)
    });
    out.distance_alternative = alt.map(|(d, _)| d);
    out.verdict = if d_tr < setup.tol {
        Verdict::Tracking
    } else if alt.is_some_and(|(d, captured)| d < setup.tol || captured) {
        Verdict::Tipping
    } else {
        Verdict::Boundary
    };
    out
}

/// Classifies the outcome of the transition equation `field` against
/// future references.
pub fn classify(
    field: &ScalarField,
    refs: &AttractorRefs,
    setup: &TransitionSetup,
) -> Result<TransitionVerdict, TransitionError> {
    let approach = setup.approach();
    check_ref("tracked", &refs.tracked, approach)?;
    if let Some(alt) = &refs.alternative {
        check_ref("alternative", alt, approach)?;
    }
    let followed = follow(field, setup, refs.tracked.window.dt)?;
    Ok(judge(followed, Some(refs), setup))
}

/// The locally pullback attractive solution sampled from the anchor start
/// up to the horizon, or up to its escape.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttractivePath {
    pub lambda: f64,
    pub samples: Vec<(f64, f64)>,
    pub escape: Option<Escape>,
}

/// Samples the locally pullback attractive solution of `field` every `stride`.
pub fn attractive_path(
    field: &ScalarField,
    setup: &TransitionSetup,
    stride: f64,
) -> Result<AttractivePath, TransitionError> {
    let lambda = field.lambda();
    let past = match past_attractor(field, setup)? {
        Ok(e) => e,
        Err(escape) => {
            return Ok(AttractivePath {
                lambda,
                samples: Vec::new(),
                escape: Some(escape),
            })
        }
    };
    let a = setup.anchor;
    let n = (a.length() / stride).floor() as usize;
    let mut samples: Vec<(f64, f64)> = (0..n)
        .map(|i| a.start + i as f64 * stride)
        .map(|t| (t, past.value_at(t)))
        .collect();
    let traj = solve(
        field,
        a.end,
        past.last(),
        setup.horizon,
        setup.bounded.solve_options(),
    )?;
    samples.extend(traj.sample(stride));
    Ok(AttractivePath {
        lambda,
        samples,
        escape: traj.status.escape(),
    })
}

/// How the alternative state of the future equation is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Alternative {
    /// Tipping is blow-up only.
    None,
    /// The lower bounded solution of the future equation, pulled back from below.
    LowerAttractor,
}

/// A transition family together with the future family supplying the
/// references, for parameter searches.
#[derive(Debug, Clone)]
pub struct TransitionProblem {
    pub family: ParametricFamily,
    pub future: ParametricFamily,
    pub alternative: Alternative,
    pub setup: TransitionSetup,
    /// Sample spacing of the future references.
    pub reference_dt: f64,
}

impl TransitionProblem {
    pub fn new(family: ParametricFamily, future: ParametricFamily, setup: TransitionSetup) -> Self {
        Self {
            family,
            future,
            alternative: Alternative::None,
            setup,
            reference_dt: Window::DEFAULT_DT,
        }
    }

    pub fn with_alternative(mut self, alternative: Alternative) -> Self {
        self.alternative = alternative;
        self
    }

    pub fn with_horizon(&self, horizon: f64) -> Self {
        let mut out = self.clone();
        out.setup.horizon = horizon;
        out
    }

    /// References of the future equation at `λ` on the approach interval.
    pub fn refs(&self, lambda: f64) -> Result<AttractorRefs, TransitionError> {
        let field = self.future.field(lambda);
        let window = self.setup.window_for_approach(self.reference_dt);
        let sign = match self.alternative {
            Alternative::None => LowerSign::Negative,
            Alternative::LowerAttractor => LowerSign::Positive,
        };
        let (x_lo, x_hi) = auto_bounds(&field, &window, sign)?;
        let opts = &self.setup.bounded;
        let tracked = match upper_bounded(&field, window, x_hi, opts)? {
            Pullback::Bounded(e) => e,
            Pullback::Escapes { escape, .. } => {
                return Err(TransitionError::MissingReference(
                    "tracked",
                    format!("escapes at t = {}", escape.time),
                ))
            }
        };
        let alternative = match self.alternative {
            Alternative::None => None,
            Alternative::LowerAttractor => {
                match lower_bounded(&field, window, x_lo, LowerMode::Forward, opts)? {
                    Pullback::Bounded(mut e) => {
                        let cert = crate::bounded::certify(&field, &e, opts)?;
                        e.certificate = cert.certificate;
                        Some(e)
                    }
                    Pullback::Escapes { escape, .. } => {
                        return Err(TransitionError::MissingReference(
                            "alternative",
                            format!("escapes at t = {}", escape.time),
                        ))
                    }
                }
            }
        };
        Ok(AttractorRefs {
            tracked,
            alternative,
        })
    }

    pub fn path(&self, lambda: f64, stride: f64) -> Result<AttractivePath, TransitionError> {
        attractive_path(&self.family.field(lambda), &self.setup, stride)
    }

    /// Verdict at `λ`. A blow-up is tipping without consulting references.
    pub fn verdict(&self, lambda: f64) -> Result<TransitionVerdict, TransitionError> {
        let field = self.family.field(lambda);
        let followed = follow(&field, &self.setup, self.reference_dt)?;
        if followed.escape.is_some() {
            return Ok(judge(followed, None, &self.setup));
        }
        let refs = self.refs(lambda)?;
        let approach = self.setup.approach();
        check_ref("tracked", &refs.tracked, approach)?;
        if let Some(alt) = &refs.alternative {
            check_ref("alternative", alt, approach)?;
        }
        Ok(judge(followed, Some(&refs), &self.setup))
    }

    fn assess(&self, lambda: f64) -> Assessment {
        let (outcome, note) = match self.verdict(lambda) {
            Ok(v) => {
                let o = match v.verdict {
                    Verdict::Tracking => Outcome::Yes,
                    Verdict::Tipping => Outcome::No,
                    Verdict::Boundary => Outcome::Undetermined,
                };
                let note = match (v.escape, v.distance_tracked) {
                    (Some(e), _) => format!("escape at t = {:.4}", e.time),
                    (None, Some(d)) => format!(
                        "distance to tracked {d:.3e}, to alternative {}",
                        v.distance_alternative
                            .map_or("n/a".to_string(), |d| format!("{d:.3e}"))
                    ),
                    _ => String::new(),
                };
                (o, note)
            }
            Err(e) => (Outcome::Undetermined, e.to_string()),
        };
        Assessment {
            outcome,
            note,
            separation: None,
            certificates: Vec::new(),
        }
    }
}

/// Bisects the verdict between a tracking and a tipping parameter value.
/// Boundary verdicts narrow the bracket from both sides.
pub fn find_tipping(
    problem: &TransitionProblem,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<BifurcationResult, BifurcateError> {
    bisect_predicate(BifurcationKind::Tipping, lo, hi, tol, |l| problem.assess(l))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::bifurcate::Monotonicity;
    use crate::integrate::FnLaw;

    fn quadratic() -> ParametricFamily {
        let law = FnLaw::new("quadratic", |_, x, l| -x * x + l, |_, x, _| -2.0 * x);
        ParametricFamily::new(
            "quadratic",
            Arc::new(law),
            Monotonicity::Increasing,
            (-1.0, 1.0),
        )
    }

    fn setup() -> TransitionSetup {
        let mut s = TransitionSetup::new(Window::with_dt(-20.0, -10.0, 0.1), 40.0);
        s.x_hi = Some(3.0);
        s
    }

    #[test]
    fn autonomous_tipping_is_the_saddle_node() {
        let q = quadratic();
        let p = TransitionProblem::new(q.clone(), q, setup());
        assert_eq!(p.verdict(0.5).unwrap().verdict, Verdict::Tracking);
        assert_eq!(p.verdict(-0.5).unwrap().verdict, Verdict::Tipping);
        let r = find_tipping(&p, -0.5, 0.5, 1e-3).unwrap();
        assert!(
            r.value().abs() <= 1e-3 + r.values[0].half_width,
            "{:?}",
            r.values
        );
    }

    #[test]
    fn classify_against_explicit_refs() {
        let q = quadratic();
        let s = setup();
        let p = TransitionProblem::new(q.clone(), q.clone(), s);
        let refs = p.refs(1.0).unwrap();
        let v = classify(&q.field(1.0), &refs, &s).unwrap();
        assert_eq!(v.verdict, Verdict::Tracking);
        assert!(v.distance_tracked.unwrap() < 1e-6);
    }

    #[test]
    fn refs_must_cover_approach() {
        let q = quadratic();
        let s = setup();
        let p = TransitionProblem::new(q.clone(), q.clone(), s);
        let mut refs = p.refs(1.0).unwrap();
        refs.tracked.window = Window::with_dt(0.0, 10.0, 0.1);
        assert!(matches!(
            classify(&q.field(1.0), &refs, &s),
            Err(TransitionError::ReferenceWindow(..))
        ));
    }
}
