//! Ready-made runs behind each figure: the model presets together with the
//! windows, brackets and tolerances that reproduce them.
//!
//! | id | kind | what is computed |
//! |---|---|---|
//! | `fig1` | curve | `λ̃(p_k)` of the Holling model, plateau hats, `k = 0..40` |
//! | `fig2` | curve | `λ̃(p_k)` with the arctan blend of `sin(t/20)`, `k = 0` and `1, 1/2, .., 2⁻⁸` |
//! | `fig3` | transition | tipping value and attractive paths of the `sin(t)` blend, `k = 1/2` |
//! | `fig5` | curve | `λ̄₋(p_k·s)`, `λ̄⁺(p_k·s)` of the circuit, `s ∈ {0, -1.25}` |
//! | `fig6` | curve | `λ̄₋(p_k)`, `λ̄⁺(p_k)` of the circuit with the blended forcing |
//! | `sec42` | transition | critical hunting intensity of the d-concave population model |

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bifurcate::{
    trace_curve, BifurcateError, BifurcationResult, CurveOptions, CurveTable, CurveTarget,
    ParametricFamily, PredicateOptions, WindowRule,
};
use crate::bounded::Window;
use crate::models::{preset, ModelError};
use crate::transitions::{
    find_tipping, Alternative, AttractivePath, TransitionError, TransitionProblem, TransitionSetup,
    TransitionVerdict,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FigureId {
    Fig1,
    Fig2,
    Fig3,
    Fig5,
    Fig6,
    Sec42,
}

impl FigureId {
    pub const ALL: [FigureId; 6] = [
        FigureId::Fig1,
        FigureId::Fig2,
        FigureId::Fig3,
        FigureId::Fig5,
        FigureId::Fig6,
        FigureId::Sec42,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            FigureId::Fig1 => "fig1",
            FigureId::Fig2 => "fig2",
            FigureId::Fig3 => "fig3",
            FigureId::Fig5 => "fig5",
            FigureId::Fig6 => "fig6",
            FigureId::Sec42 => "sec42",
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FigureId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FigureId::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| {
                format!(
                    "unknown figure {s:?} (expected one of fig1, fig2, fig3, fig5, fig6, sec42)"
                )
            })
    }
}

/// `[1, 1/2, .., 2^-levels]`.
pub fn dyadic_grid(levels: u32) -> Vec<f64> {
    (0..=levels).map(|i| 0.5f64.powi(i as i32)).collect()
}

/// `lo, lo + step, ..` up to `hi` (inclusive, with rounding slack).
pub fn range_grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    assert!(step > 0.0 && hi >= lo, "invalid grid {lo}:{hi}:{step}");
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| lo + i as f64 * step).collect()
}

/// Pullback settings for figure sweeps: probes inside undetermined zones
/// never converge, so the number of depth doublings is capped.
fn sweep_predicate() -> PredicateOptions {
    let mut p = PredicateOptions::default();
    p.bounded.max_doublings = 6;
    p
}

/// A bifurcation curve over a grid of forcing indices `k`, one per shift.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveFigure {
    pub id: FigureId,
    pub preset: String,
    pub shifts: Vec<f64>,
    pub grid: Vec<f64>,
    pub options: CurveOptions,
}

/// One traced curve of a [`CurveFigure`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShiftCurve {
    pub s: f64,
    pub table: CurveTable,
}

impl CurveFigure {
    pub fn family(&self, k: f64, s: f64) -> Result<ParametricFamily, ModelError> {
        preset(&self.preset, k, s)?.build()
    }

    /// Traces the curve for every shift; shifts run in parallel.
    pub fn run(&self) -> Result<Vec<ShiftCurve>, ModelError> {
        // Surface parameter errors before the sweep starts.
        for &s in &self.shifts {
            for &k in &self.grid {
                self.family(k, s)?;
            }
        }
        Ok(self
            .shifts
            .par_iter()
            .map(|&s| ShiftCurve {
                s,
                table: trace_curve(
                    |k| self.family(k, s).expect("validated above"),
                    &self.grid,
                    &self.options,
                ),
            })
            .collect())
    }
}

/// A transition family with the bracket for its tipping value and the
/// parameter values whose attractive paths are sampled.
#[derive(Debug, Clone, Serialize)]
pub struct TransitionFigure {
    pub id: FigureId,
    pub preset: String,
    pub future_preset: String,
    pub k: f64,
    pub future_k: f64,
    #[serde(skip)]
    pub problem: TransitionProblem,
    pub setup: TransitionSetup,
    pub bracket: (f64, f64),
    pub tol: f64,
    pub lambdas: Vec<f64>,
    /// Sample spacing of the path dump.
    pub stride: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransitionRun {
    pub tipping: Result<BifurcationResult, String>,
    pub verdicts: Vec<(f64, Result<TransitionVerdict, String>)>,
    pub paths: Vec<Result<AttractivePath, String>>,
}

impl TransitionFigure {
    fn new(
        id: FigureId,
        (name, k): (&str, f64),
        (future, future_k): (&str, f64),
        setup: TransitionSetup,
        alternative: Alternative,
    ) -> Result<Self, ModelError> {
        let problem = TransitionProblem::new(
            preset(name, k, 0.0)?.build()?,
            preset(future, future_k, 0.0)?.build()?,
            setup,
        )
        .with_alternative(alternative);
        Ok(Self {
            id,
            preset: name.into(),
            future_preset: future.into(),
            k,
            future_k,
            problem,
            setup,
            bracket: (0.0, 0.0),
            tol: 1e-6,
            lambdas: Vec::new(),
            stride: 0.25,
        })
    }

    /// Rebuilds the problem after `setup` was edited.
    pub fn with_setup(mut self, setup: TransitionSetup) -> Self {
        self.setup = setup;
        self.problem.setup = setup;
        self
    }

    pub fn locate(&self) -> Result<BifurcationResult, BifurcateError> {
        find_tipping(&self.problem, self.bracket.0, self.bracket.1, self.tol)
    }

    /// Locates the tipping value, then classifies and samples every listed
    /// parameter value plus the located one.
    pub fn run(&self) -> TransitionRun {
        let tipping = self.locate();
        let mut lambdas = self.lambdas.clone();
        if let Ok(r) = &tipping {
            lambdas.push(r.value());
        }
        lambdas.sort_by(f64::total_cmp);
        let verdicts = lambdas
            .par_iter()
            .map(|&l| (l, self.problem.verdict(l).map_err(|e| e.to_string())))
            .collect();
        let paths = lambdas
            .par_iter()
            .map(|&l| {
                self.problem
                    .path(l, self.stride)
                    .map_err(|e: TransitionError| e.to_string())
            })
            .collect();
        TransitionRun {
            tipping: tipping.map_err(|e| e.to_string()),
            verdicts,
            paths,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Figure {
    Curve(CurveFigure),
    Transition(TransitionFigure),
}

pub fn curve_figure(id: FigureId) -> Option<CurveFigure> {
    let single = |lo, hi, tol| CurveOptions {
        target: CurveTarget::Single { lo, hi },
        tol,
        warm_start: true,
        cross_checks: 2,
        seed: 0,
        predicate: sweep_predicate(),
        window_rule: WindowRule::Fixed,
    };
    let double = CurveOptions {
        target: CurveTarget::Double {
            seed: -0.5,
            radius: 0.5,
        },
        ..single(0.0, 0.0, 1e-4)
    };
    // Past `1/k² + 200/k` the blended forcing is within 2e-3 of its limit.
    let tail = WindowRule::BlendTail { reach: 200.0 };
    let mut blend_grid = vec![0.0];
    blend_grid.extend(dyadic_grid(8));
    let fig = match id {
        FigureId::Fig1 => CurveFigure {
            id,
            preset: "fig1".into(),
            shifts: vec![0.0],
            grid: range_grid(0.0, 40.0, 1.0),
            options: single(0.0, 0.5, 1e-5),
        },
        FigureId::Fig2 => CurveFigure {
            id,
            preset: "fig2".into(),
            shifts: vec![0.0],
            grid: blend_grid,
            options: CurveOptions {
                window_rule: tail,
                ..single(0.05, 0.15, 1e-6)
            },
        },
        FigureId::Fig5 => CurveFigure {
            id,
            preset: "fig5".into(),
            shifts: vec![0.0, -1.25],
            grid: range_grid(0.0, 40.0, 1.0),
            options: double,
        },
        FigureId::Fig6 => CurveFigure {
            id,
            preset: "fig6".into(),
            shifts: vec![0.0],
            grid: blend_grid,
            options: CurveOptions {
                window_rule: tail,
                ..double
            },
        },
        FigureId::Fig3 | FigureId::Sec42 => return None,
    };
    Some(fig)
}

pub fn transition_figure(id: FigureId) -> Option<TransitionFigure> {
    let fig = match id {
        FigureId::Fig3 => {
            // The approach to the future attractor is slow next to the
            // tipping value; shorter horizons leave boundary verdicts.
            let setup = TransitionSetup::new(Window::new(-40.0, 0.0), 2000.0);
            let mut f = TransitionFigure::new(
                id,
                ("fig3", 0.5),
                ("fig3-future", 0.5),
                setup,
                Alternative::None,
            )
            .expect("bundled preset");
            f.bracket = (0.1185, 0.1195);
            f.lambdas = vec![0.1185, 0.1195];
            f
        }
        FigureId::Sec42 => {
            // Hunting starts near t = 2.8, so the anchor sees b = 0. The
            // future equation keeps the bumps from n = 14 (t = 196) on.
            let mut setup = TransitionSetup::new(Window::new(-20.0, 0.0), 400.0);
            setup.x_hi = Some(3.0);
            let mut f = TransitionFigure::new(
                id,
                ("sec42", 0.0),
                ("sec42-future", 14.0),
                setup,
                Alternative::LowerAttractor,
            )
            .expect("bundled preset");
            f.bracket = (0.1, 0.5);
            f.lambdas = vec![0.1, 0.2, 0.3, 0.34, 0.36, 0.4, 0.5];
            f
        }
        _ => return None,
    };
    Some(fig)
}

pub fn figure(id: FigureId) -> Figure {
    match curve_figure(id) {
        Some(c) => Figure::Curve(c),
        None => Figure::Transition(transition_figure(id).expect("every id has a figure")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip() {
        for id in FigureId::ALL {
            assert_eq!(id.as_str().parse::<FigureId>().unwrap(), id);
        }
        assert!("fig4".parse::<FigureId>().is_err());
    }

    #[test]
    fn grids() {
        assert_eq!(range_grid(0.0, 40.0, 1.0).len(), 41);
        assert_eq!(range_grid(0.0, 1.0, 0.1).len(), 11);
        let d = dyadic_grid(8);
        assert_eq!(d.len(), 9);
        assert_eq!(d[8], 1.0 / 256.0);
    }

    #[test]
    fn every_figure_builds() {
        for id in FigureId::ALL {
            match figure(id) {
                Figure::Curve(c) => {
                    for &s in &c.shifts {
                        c.family(c.grid[0], s).unwrap();
                    }
                }
                Figure::Transition(t) => assert!(t.bracket.0 < t.bracket.1),
            }
        }
    }

    #[test]
    fn blend_tail_window_reaches_the_limit() {
        let c = curve_figure(FigureId::Fig2).unwrap();
        let p = c
            .options
            .window_rule
            .apply(c.options.predicate, 1.0 / 256.0);
        let tail = p.tail.unwrap();
        assert_eq!(tail.end, 65536.0 + 200.0 * 256.0);
        assert_eq!(tail.length(), p.window.length());
        let unchanged = c.options.window_rule.apply(c.options.predicate, 0.0);
        assert!(unchanged.tail.is_none());
    }
}
