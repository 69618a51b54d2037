//! Locating saddle-node values: a quadratic fold, the two folds of a cubic
//! compared with the discriminant, and the population model with a
//! nonautonomous predation term.
//!
//! cargo run --release --example saddle_node

use saddlenode::bifurcate::{
    find_double_saddle_node, find_saddle_node, has_two_separated, PredicateOptions,
};
use saddlenode::models::{preset, ModelSpec};

fn main() {
    // The undetermined zone next to a fold has width of order gamma_min²,
    // so tight tolerances call for a small gamma_min.
    let mut sharp = PredicateOptions::default();
    sharp.bounded.gamma_min = 1e-4;
    let quadratic = ModelSpec::QuadraticDemo { center: 0.0 }.build().unwrap();
    let r =
        find_saddle_node(&quadratic, -1.0, 1.0, 1e-9, &sharp).expect("bracket straddles the fold");
    println!(
        "-x² + λ: λ̃ = {:.2e} ± {:.1e} ({} probes)",
        r.value(),
        r.values[0].half_width,
        r.probes.len()
    );

    // -x³ + b x² + c x + λ has three roots between the two folds.
    let (b, c) = (0.5, 1.0);
    let cubic = ModelSpec::CubicDemo { b, c }.build().unwrap();
    let r =
        find_double_saddle_node(&cubic, 0.0, 0.2, 1e-6, &sharp).expect("seed has three solutions");
    let folds = discriminant_folds(b, c);
    println!(
        "cubic b = {b}, c = {c}: located ({:.6}, {:.6}), discriminant ({:.6}, {:.6})",
        r.values[0].value, r.values[1].value, folds.0, folds.1
    );

    // Holling model with constant forcing p = 1; λ scales the predation.
    let holling = preset("fig1", 0.0, 0.0).and_then(|s| s.build()).unwrap();
    let opts = PredicateOptions::default();
    for l in [0.1, 0.3] {
        let a = has_two_separated(&holling.field(l), &opts);
        println!(
            "Holling λ = {l}: two separated hyperbolic solutions = {} ({})",
            a.outcome, a.note
        );
    }
    let r = find_saddle_node(&holling, 0.1, 0.3, 1e-5, &opts).expect("bracket straddles");
    println!(
        "Holling λ̃ = {:.6} (bracket width {:.1e})",
        r.value(),
        r.bracket_width()
    );
}

/// Values of λ where h = hx = 0 has a solution, from the critical points of
/// the cubic.
fn discriminant_folds(b: f64, c: f64) -> (f64, f64) {
    let disc = (4.0 * b * b + 12.0 * c).sqrt();
    let crit = [(2.0 * b - disc) / 6.0, (2.0 * b + disc) / 6.0];
    let lam = |x: f64| x * x * x - b * x * x - c * x;
    let (l1, l2) = (lam(crit[0]), lam(crit[1]));
    (l1.min(l2), l1.max(l2))
}
