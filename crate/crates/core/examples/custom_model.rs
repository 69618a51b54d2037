//! Bringing your own equation: a closure-based law wrapped in a parametric
//! family, and a bundled model described by a JSON document.
//!
//! cargo run --release --example custom_model

use std::sync::Arc;

use saddlenode::bifurcate::{find_saddle_node, Monotonicity, ParametricFamily, PredicateOptions};
use saddlenode::integrate::FnLaw;
use saddlenode::models::ModelSpec;

fn main() {
    // x' = -x² + (1 + 0.5 sin t) x + λ is concave in x and increasing in λ.
    let law = FnLaw::new(
        "logistic-harvest",
        |t, x, l| -x * x + (1.0 + 0.5 * t.sin()) * x + l,
        |t, x, _| -2.0 * x + 1.0 + 0.5 * t.sin(),
    );
    let family = ParametricFamily::new(
        "logistic-harvest",
        Arc::new(law),
        Monotonicity::Increasing,
        (-1.0, 1.0),
    );
    let opts = PredicateOptions::default();
    let r = find_saddle_node(&family, -1.0, 1.0, 1e-5, &opts).expect("bracket straddles the fold");
    println!(
        "{}: λ̃ = {:.6} (bracket width {:.1e}, {} probes)",
        family.name(),
        r.value(),
        r.bracket_width(),
        r.probes.len()
    );

    // Bundled models can be described as data, e.g. in a config file.
    let json = r#"{"model": "cubic-demo", "b": 0.0, "c": 1.0}"#;
    let spec: ModelSpec = serde_json::from_str(json).expect("valid model document");
    let cubic = spec.build().expect("valid coefficients");
    println!(
        "{json} -> family {:?} over {:?}",
        cubic.name(),
        cubic.range()
    );
    println!("round trip: {}", serde_json::to_string(&spec).unwrap());
}
