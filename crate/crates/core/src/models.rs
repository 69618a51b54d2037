//! The bundled equations and their figure presets.
//!
//! | id | law `h(t, x, λ)` | λ |
//! |---|---|---|
//! | `hunting-concave` | `x(1-x)/6 - b(t) x²/(1+x²) + λ` | additive |
//! | `hunting-dconcave` | `x(1-x)(x-2)/6 - λ b(t) x²/(1+x²)` | predation strength |
//! | `holling` | `r x(1 - x/K) + λ Γ x²/(b + x²) + p + a` | predation strength |
//! | `circuit` | `λ + E₀/R + ρ Q/C + 3βV₀ Q²/C² - β Q³/C³`, `C = C₀ + A p` | source offset |
//! | `quadratic-demo` | `-(x - c)² + λ` | additive |
//! | `cubic-demo` | `-x³ + b x² + c x + λ` | additive |
//! | `gaussian-cubic-demo` | `-x² + x³ exp(-t²) + p(t) + λ` | additive |

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bifurcate::{Monotonicity, ParametricFamily};
use crate::integrate::Law;
use crate::signals::Signal;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("{name} must be positively bounded below (sampled minimum {min})")]
    NotPositive { name: &'static str, min: f64 },
    #[error("{name} must be negatively bounded above (sampled maximum {max})")]
    NotNegative { name: &'static str, max: f64 },
    #[error("parameter {name} = {value} is out of range: {reason}")]
    Parameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("diode constants violate f(0) = 0: I0 + alpha V0 - beta V0^3 = {0:e}")]
    DiodeOffset(f64),
    #[error("unknown preset {0:?}")]
    UnknownPreset(String),
    #[error("unknown model {0:?}")]
    UnknownModel(String),
}

fn default_hunting() -> Signal {
    Signal::bump_train()
}

fn default_resistance() -> f64 {
    1.0
}

/// A model with its coefficients. Signals use the constructors of
/// [`crate::signals`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelSpec {
    #[serde(alias = "hunting_concave")]
    HuntingConcave {
        #[serde(default = "default_hunting")]
        b: Signal,
    },
    #[serde(alias = "hunting_dconcave")]
    HuntingDconcave {
        #[serde(default = "default_hunting")]
        b: Signal,
    },
    #[serde(alias = "holling_population")]
    Holling {
        r: Signal,
        #[serde(rename = "K")]
        k: Signal,
        gamma: Signal,
        b: Signal,
        p: Signal,
        a: f64,
    },
    #[serde(alias = "tunnel_circuit")]
    Circuit {
        e0: Signal,
        c0: Signal,
        p: Signal,
        amplitude: f64,
        #[serde(default = "default_resistance")]
        resistance: f64,
        alpha: f64,
        beta: f64,
        v0: f64,
        /// Diode offset current; derived from `f(0) = 0` when absent.
        #[serde(default)]
        i0: Option<f64>,
    },
    QuadraticDemo {
        #[serde(default)]
        center: f64,
    },
    CubicDemo {
        b: f64,
        c: f64,
    },
    GaussianCubicDemo {
        #[serde(default)]
        p: Signal,
    },
}

/// Time span on which positivity of coefficients is checked.
const CHECK_SPAN: (f64, f64) = (-500.0, 500.0);
const CHECK_SAMPLES_PER_UNIT: usize = 50;

fn sampled_extrema(s: &Signal) -> (f64, f64) {
    s.sample(CHECK_SPAN.0, CHECK_SPAN.1, CHECK_SAMPLES_PER_UNIT)
        .into_iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (_, v)| {
            (lo.min(v), hi.max(v))
        })
}

fn require_positive(name: &'static str, s: &Signal) -> Result<(), ModelError> {
    let (min, _) = sampled_extrema(s);
    if min > 0.0 {
        Ok(())
    } else {
        Err(ModelError::NotPositive { name, min })
    }
}

fn require_negative(name: &'static str, s: &Signal) -> Result<(), ModelError> {
    let (_, max) = sampled_extrema(s);
    if max < 0.0 {
        Ok(())
    } else {
        Err(ModelError::NotNegative { name, max })
    }
}

#[derive(Debug)]
struct HuntingConcave {
    b: Signal,
}

impl Law for HuntingConcave {
    fn value(&self, t: f64, x: f64, lambda: f64) -> f64 {
        let x2 = x * x;
        x * (1.0 - x) / 6.0 - self.b.eval(t) * x2 / (1.0 + x2) + lambda
    }

    fn dx(&self, t: f64, x: f64, _: f64) -> f64 {
        let d = 1.0 + x * x;
        (1.0 - 2.0 * x) / 6.0 - self.b.eval(t) * 2.0 * x / (d * d)
    }

    fn dxx(&self, t: f64, x: f64, _: f64) -> Option<f64> {
        let d = 1.0 + x * x;
        Some(-1.0 / 3.0 - self.b.eval(t) * 2.0 * (1.0 - 3.0 * x * x) / (d * d * d))
    }

    fn name(&self) -> &str {
        "hunting-concave"
    }
}

#[derive(Debug)]
struct HuntingDconcave {
    b: Signal,
}

impl Law for HuntingDconcave {
    fn value(&self, t: f64, x: f64, lambda: f64) -> f64 {
        let x2 = x * x;
        x * (1.0 - x) * (x - 2.0) / 6.0 - lambda * self.b.eval(t) * x2 / (1.0 + x2)
    }

    fn dx(&self, t: f64, x: f64, lambda: f64) -> f64 {
        let d = 1.0 + x * x;
        (-3.0 * x * x + 6.0 * x - 2.0) / 6.0 - lambda * self.b.eval(t) * 2.0 * x / (d * d)
    }

    fn dxx(&self, t: f64, x: f64, lambda: f64) -> Option<f64> {
        let d = 1.0 + x * x;
        Some(1.0 - x - lambda * self.b.eval(t) * 2.0 * (1.0 - 3.0 * x * x) / (d * d * d))
    }

    fn name(&self) -> &str {
        "hunting-dconcave"
    }
}

#[derive(Debug)]
struct Holling {
    r: Signal,
    k: Signal,
    gamma: Signal,
    b: Signal,
    p: Signal,
    a: f64,
}

impl Law for Holling {
    fn value(&self, t: f64, x: f64, lambda: f64) -> f64 {
        let (r, k, g, b) = (
            self.r.eval(t),
            self.k.eval(t),
            self.gamma.eval(t),
            self.b.eval(t),
        );
        let x2 = x * x;
        r * x * (1.0 - x / k) + lambda * g * x2 / (b + x2) + self.p.eval(t) + self.a
    }

    fn dx(&self, t: f64, x: f64, lambda: f64) -> f64 {
        let (r, k, g, b) = (
            self.r.eval(t),
            self.k.eval(t),
            self.gamma.eval(t),
            self.b.eval(t),
        );
        let d = b + x * x;
        r * (1.0 - 2.0 * x / k) + lambda * g * 2.0 * b * x / (d * d)
    }

    fn dxx(&self, t: f64, x: f64, lambda: f64) -> Option<f64> {
        let (r, k, g, b) = (
            self.r.eval(t),
            self.k.eval(t),
            self.gamma.eval(t),
            self.b.eval(t),
        );
        let d = b + x * x;
        Some(-2.0 * r / k + lambda * g * 2.0 * b * (b - 3.0 * x * x) / (d * d * d))
    }

    fn name(&self) -> &str {
        "holling"
    }
}

/// Charge equation of the tunnel-diode circuit in reduced polynomial form.
#[derive(Debug)]
struct Circuit {
    e0: Signal,
    c0: Signal,
    p: Signal,
    amplitude: f64,
    resistance: f64,
    rho: f64,
    beta: f64,
    v0: f64,
}

impl Circuit {
    fn capacitance(&self, t: f64) -> f64 {
        self.c0.eval(t) + self.amplitude * self.p.eval(t)
    }
}

impl Law for Circuit {
    fn value(&self, t: f64, q: f64, lambda: f64) -> f64 {
        let v = q / self.capacitance(t);
        lambda
            + self.e0.eval(t) / self.resistance
            + self.rho * v
            + 3.0 * self.beta * self.v0 * v * v
            - self.beta * v * v * v
    }

    fn dx(&self, t: f64, q: f64, _: f64) -> f64 {
        let c = self.capacitance(t);
        let v = q / c;
        (self.rho + 6.0 * self.beta * self.v0 * v - 3.0 * self.beta * v * v) / c
    }

    fn dxx(&self, t: f64, q: f64, _: f64) -> Option<f64> {
        let c = self.capacitance(t);
        Some((6.0 * self.beta * self.v0 - 6.0 * self.beta * q / c) / (c * c))
    }

    fn name(&self) -> &str {
        "circuit"
    }
}

#[derive(Debug)]
struct Quadratic {
    center: f64,
}

impl Law for Quadratic {
    fn value(&self, _: f64, x: f64, lambda: f64) -> f64 {
        let y = x - self.center;
        -y * y + lambda
    }

    fn dx(&self, _: f64, x: f64, _: f64) -> f64 {
        -2.0 * (x - self.center)
    }

    fn dxx(&self, _: f64, _: f64, _: f64) -> Option<f64> {
        Some(-2.0)
    }

    fn name(&self) -> &str {
        "quadratic-demo"
    }
}

#[derive(Debug)]
struct Cubic {
    b: f64,
    c: f64,
}

impl Law for Cubic {
    fn value(&self, _: f64, x: f64, lambda: f64) -> f64 {
        ((-x + self.b) * x + self.c) * x + lambda
    }

    fn dx(&self, _: f64, x: f64, _: f64) -> f64 {
        -3.0 * x * x + 2.0 * self.b * x + self.c
    }

    fn dxx(&self, _: f64, x: f64, _: f64) -> Option<f64> {
        Some(-6.0 * x + 2.0 * self.b)
    }

    fn name(&self) -> &str {
        "cubic-demo"
    }
}

#[derive(Debug)]
struct GaussianCubic {
    p: Signal,
}

impl Law for GaussianCubic {
    fn value(&self, t: f64, x: f64, lambda: f64) -> f64 {
        -x * x + x * x * x * (-t * t).exp() + self.p.eval(t) + lambda
    }

    fn dx(&self, t: f64, x: f64, _: f64) -> f64 {
        -2.0 * x + 3.0 * x * x * (-t * t).exp()
    }

    fn dxx(&self, t: f64, x: f64, _: f64) -> Option<f64> {
        Some(-2.0 + 6.0 * x * (-t * t).exp())
    }

    fn name(&self) -> &str {
        "gaussian-cubic-demo"
    }
}

/// Which derivative a concavity report inspects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConcavityOrder {
    /// `x ↦ hx` decreasing: concavity.
    First,
    /// `x ↦ hxx` decreasing: d-concavity.
    Second,
}

impl ModelSpec {
    pub fn id(&self) -> &'static str {
        match self {
            ModelSpec::HuntingConcave { .. } => "hunting-concave",
            ModelSpec::HuntingDconcave { .. } => "hunting-dconcave",
            ModelSpec::Holling { .. } => "holling",
            ModelSpec::Circuit { .. } => "circuit",
            ModelSpec::QuadraticDemo { .. } => "quadratic-demo",
            ModelSpec::CubicDemo { .. } => "cubic-demo",
            ModelSpec::GaussianCubicDemo { .. } => "gaussian-cubic-demo",
        }
    }

    /// Default instance of a model named by id; snake_case ids and the long
    /// names `holling-population` and `tunnel-circuit` are accepted too.
    pub fn default_for(name: &str) -> Result<Self, ModelError> {
        let spec = match name.replace('_', "-").as_str() {
            "hunting-concave" => Self::hunting_concave(),
            "hunting-dconcave" => Self::hunting_dconcave(),
            "holling" | "holling-population" => Self::holling(Signal::constant(0.0)),
            "circuit" | "tunnel-circuit" => Self::circuit(Signal::constant(0.0)),
            "quadratic-demo" => ModelSpec::QuadraticDemo { center: 0.0 },
            "cubic-demo" => ModelSpec::CubicDemo { b: 0.0, c: 1.0 },
            "gaussian-cubic-demo" => ModelSpec::GaussianCubicDemo {
                p: Signal::constant(0.0),
            },
            _ => return Err(ModelError::UnknownModel(name.to_string())),
        };
        Ok(spec)
    }

    /// The time-dependent forcing slot: `b` for hunting, `p` otherwise.
    pub fn forcing(&self) -> Option<&Signal> {
        match self {
            ModelSpec::HuntingConcave { b } | ModelSpec::HuntingDconcave { b } => Some(b),
            ModelSpec::Holling { p, .. }
            | ModelSpec::Circuit { p, .. }
            | ModelSpec::GaussianCubicDemo { p } => Some(p),
            ModelSpec::QuadraticDemo { .. } | ModelSpec::CubicDemo { .. } => None,
        }
    }

    /// The derivative whose monotonicity carries the structure of the model.
    pub fn concavity_order(&self) -> ConcavityOrder {
        match self {
            ModelSpec::HuntingDconcave { .. }
            | ModelSpec::Circuit { .. }
            | ModelSpec::CubicDemo { .. } => ConcavityOrder::Second,
            _ => ConcavityOrder::First,
        }
    }

    pub fn hunting_concave() -> Self {
        ModelSpec::HuntingConcave {
            b: default_hunting(),
        }
    }

    pub fn hunting_dconcave() -> Self {
        ModelSpec::HuntingDconcave {
            b: default_hunting(),
        }
    }

    /// Holling model with the quasiperiodic `r`, `K`, `b` shared by all
    /// population presets, `Γ = -160 - 16 sin(2πt)` and `a = -3`.
    pub fn holling(p: Signal) -> Self {
        use std::f64::consts::PI;
        let r = Signal::sum(vec![
            Signal::constant(0.95),
            Signal::sin(0.02, 2.0 * PI),
            Signal::sin(0.02, 0.1),
        ]);
        let k = Signal::sum(vec![
            Signal::constant(30.0),
            Signal::sin(3.2, 2.0 * PI),
            Signal::sin(1.0, 6.0 * PI),
            Signal::cos(0.4, 5.0 * 5f64.sqrt()),
            Signal::cos(0.4, 40.0),
        ]);
        let b = Signal::product(vec![Signal::cos(1.0, 40.0), Signal::cos(1.0, 40.0)])
            .scale_add(26.0, 400.0);
        ModelSpec::Holling {
            r,
            k,
            gamma: holling_gamma(),
            b,
            p,
            a: -3.0,
        }
    }

    /// Circuit with `E₀ = sin t + sin(√2 t)`, `C₀ = 1`, `R = 1`,
    /// `α = 19/3`, `β = 1`, `V₀ = 1/3`, `A = 0.2`.
    pub fn circuit(p: Signal) -> Self {
        ModelSpec::Circuit {
            e0: Signal::sum(vec![Signal::sin(1.0, 1.0), Signal::sin(1.0, 2f64.sqrt())]),
            c0: Signal::constant(1.0),
            p,
            amplitude: 0.2,
            resistance: 1.0,
            alpha: 19.0 / 3.0,
            beta: 1.0,
            v0: 1.0 / 3.0,
            i0: None,
        }
    }

    /// Validates the parameters and builds the family.
    pub fn build(&self) -> Result<ParametricFamily, ModelError> {
        let (law, mono, range): (Arc<dyn Law>, Monotonicity, (f64, f64)) = match self {
            ModelSpec::HuntingConcave { b } => (
                Arc::new(HuntingConcave { b: b.clone() }),
                Monotonicity::Increasing,
                (-1.0, 1.0),
            ),
            ModelSpec::HuntingDconcave { b } => (
                Arc::new(HuntingDconcave { b: b.clone() }),
                Monotonicity::Decreasing,
                (0.0, 2.0),
            ),
            ModelSpec::Holling {
                r,
                k,
                gamma,
                b,
                p,
                a,
            } => {
                require_positive("r", r)?;
                require_positive("K", k)?;
                require_positive("b", b)?;
                require_negative("gamma", gamma)?;
                (
                    Arc::new(Holling {
                        r: r.clone(),
                        k: k.clone(),
                        gamma: gamma.clone(),
                        b: b.clone(),
                        p: p.clone(),
                        a: *a,
                    }),
                    Monotonicity::Decreasing,
                    (0.0, 1.0),
                )
            }
            ModelSpec::Circuit {
                e0,
                c0,
                p,
                amplitude,
                resistance,
                alpha,
                beta,
                v0,
                i0,
            } => {
                for (name, value) in [
                    ("resistance", *resistance),
                    ("alpha", *alpha),
                    ("beta", *beta),
                ] {
                    if !(value > 0.0 && value.is_finite()) {
                        return Err(ModelError::Parameter {
                            name,
                            value,
                            reason: "must be positive",
                        });
                    }
                }
                if !(*amplitude >= 0.0) {
                    return Err(ModelError::Parameter {
                        name: "amplitude",
                        value: *amplitude,
                        reason: "must be nonnegative",
                    });
                }
                let i0 = i0.unwrap_or(beta * v0.powi(3) - alpha * v0);
                let offset = i0 + alpha * v0 - beta * v0.powi(3);
                if offset.abs() > 1e-12 * (1.0 + i0.abs()) {
                    return Err(ModelError::DiodeOffset(offset));
                }
                let c = Signal::sum(vec![c0.clone(), p.clone().scale_add(*amplitude, 0.0)]);
                require_positive("C", &c)?;
                (
                    Arc::new(Circuit {
                        e0: e0.clone(),
                        c0: c0.clone(),
                        p: p.clone(),
                        amplitude: *amplitude,
                        resistance: *resistance,
                        rho: alpha - 1.0 / resistance - 3.0 * beta * v0 * v0,
                        beta: *beta,
                        v0: *v0,
                    }),
                    Monotonicity::Increasing,
                    (-3.0, 3.0),
                )
            }
            ModelSpec::QuadraticDemo { center } => (
                Arc::new(Quadratic { center: *center }),
                Monotonicity::Increasing,
                (-1.0, 1.0),
            ),
            ModelSpec::CubicDemo { b, c } => (
                Arc::new(Cubic { b: *b, c: *c }),
                Monotonicity::Increasing,
                (-10.0, 10.0),
            ),
            ModelSpec::GaussianCubicDemo { p } => (
                Arc::new(GaussianCubic { p: p.clone() }),
                Monotonicity::Increasing,
                (-2.0, 2.0),
            ),
        };
        Ok(ParametricFamily::new(self.id(), law, mono, range))
    }

    /// `ρ = α - 1/R - 3βV₀²` of a circuit model.
    pub fn circuit_rho(&self) -> Option<f64> {
        match self {
            ModelSpec::Circuit {
                resistance,
                alpha,
                beta,
                v0,
                ..
            } => Some(alpha - 1.0 / resistance - 3.0 * beta * v0 * v0),
            _ => None,
        }
    }
}

fn holling_gamma() -> Signal {
    Signal::sin(-16.0, 2.0 * std::f64::consts::PI).scale_add(1.0, -160.0)
}

/// Holling model with the transient predation boost `Γ (1 + 2 exp(-10 t²))`.
fn holling_boosted(p: Signal) -> ModelSpec {
    let mut spec = ModelSpec::holling(p);
    if let ModelSpec::Holling { gamma, .. } = &mut spec {
        *gamma = Signal::product(vec![holling_gamma(), Signal::gaussian_factor(2.0, 10.0)]);
    }
    spec
}

/// Names accepted by [`preset`].
pub const PRESETS: &[&str] = &[
    "fig1",
    "fig2",
    "fig3",
    "fig3-future",
    "fig5",
    "fig6",
    "sec42",
    "sec42-future",
];

/// Figure presets. `k` selects the member of the forcing family and `s` is
/// a time shift of the forcing (used by `fig5`; `sec42-future` reads `k` as
/// the index of its first bump).
pub fn preset(name: &str, k: f64, s: f64) -> Result<ModelSpec, ModelError> {
    let spec = match name {
        // p_k(t) = max{-1, min{1, 1 - k/2 - t}, min{1, 1 - k/2 + t}}
        "fig1" => ModelSpec::holling(Signal::plateau_hat(k).shift(s)),
        "fig2" => holling_boosted(Signal::arctan_blend(
            Signal::sin(1.0, 1.0 / 20.0),
            2.0 * k - 1.0,
            k,
        )),
        "fig3" => holling_boosted(Signal::arctan_blend(
            Signal::sin(1.0, 1.0),
            2.0 * k - 1.0,
            k,
        )),
        // Limit equation as t → ∞ of fig3: Γ₊ and p₊ = 2k - 1.
        "fig3-future" => ModelSpec::holling(Signal::constant(2.0 * k - 1.0)),
        "fig5" => ModelSpec::circuit(Signal::plateau_hat(k).shift(s)),
        "fig6" => {
            let base = Signal::sin(1.0, 1.0 / 20.0).scale_add(0.5, 0.5);
            ModelSpec::circuit(Signal::arctan_blend(base, 2.0 * k - 1.0, k))
        }
        "sec42" => ModelSpec::hunting_dconcave(),
        // Bumps from n = k on only: the late part of the hunting schedule.
        "sec42-future" => ModelSpec::HuntingDconcave {
            b: Signal::BumpTrain {
                first: k.round().max(0.0) as u64,
                last: None,
            },
        },
        other => return Err(ModelError::UnknownPreset(other.to_string())),
    };
    Ok(spec)
}

/// Local shape of `x ↦ g(x)` on a grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    StrictlyDecreasing,
    /// Nonincreasing with flat stretches.
    Nonincreasing,
    Violated,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcavityRow {
    pub t: f64,
    /// Shape of `x ↦ hx`.
    pub first: Shape,
    /// Shape of `x ↦ hxx`, if the law provides it.
    pub second: Option<Shape>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcavityReport {
    pub model: String,
    pub lambda: f64,
    /// The order that matters for this model.
    pub order: ConcavityOrder,
    pub rows: Vec<ConcavityRow>,
}

impl ConcavityReport {
    /// Fraction of sampled times at which the relevant derivative is
    /// strictly decreasing.
    pub fn strict_fraction(&self) -> f64 {
        if self.rows.is_empty() {
            return 0.0;
        }
        let strict = self
            .rows
            .iter()
            .filter(|r| {
                let s = match self.order {
                    ConcavityOrder::First => Some(r.first),
                    ConcavityOrder::Second => r.second,
                };
                s == Some(Shape::StrictlyDecreasing)
            })
            .count();
        strict as f64 / self.rows.len() as f64
    }
}

fn shape_of(values: &[f64]) -> Shape {
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let eps = 1e-12 * (1.0 + scale);
    let mut strict = true;
    for w in values.windows(2) {
        let d = w[1] - w[0];
        if d > eps {
            return Shape::Violated;
        }
        if d > -eps {
            strict = false;
        }
    }
    if strict {
        Shape::StrictlyDecreasing
    } else {
        Shape::Nonincreasing
    }
}

/// Diagnostic for the concavity hypotheses: at each sampled time, whether
/// `hx` (and `hxx`) decrease along the sorted `x_grid`. Sampling cannot
/// prove the measure-theoretic conditions; it only flags where they fail.
pub fn concavity_report(
    spec: &ModelSpec,
    lambda: f64,
    t_grid: &[f64],
    x_grid: &[f64],
) -> Result<ConcavityReport, ModelError> {
    let family = spec.build()?;
    let field = family.field(lambda);
    let mut xs = x_grid.to_vec();
    xs.sort_by(f64::total_cmp);
    let rows = t_grid
        .iter()
        .map(|&t| {
            let hx: Vec<f64> = xs.iter().map(|&x| field.hx(t, x)).collect();
            let hxx: Option<Vec<f64>> = xs.iter().map(|&x| field.hxx(t, x)).collect();
            ConcavityRow {
                t,
                first: shape_of(&hx),
                second: hxx.as_deref().map(shape_of),
            }
        })
        .collect();
    Ok(ConcavityReport {
        model: spec.id().to_string(),
        lambda,
        order: spec.concavity_order(),
        rows,
    })
}
