//! Three hyperbolic bounded solutions of the tunnel-diode circuit, with
//! their certificates and mutual separations.
//!
//! cargo run --release --example bounded_solutions

use saddlenode::bounded::{
    auto_bounds, certify, lower_bounded, middle_bounded, separation, upper_bounded, BoundedOptions,
    LowerMode, LowerSign, MiddleMethod, Window,
};
use saddlenode::models::preset;

fn main() {
    let family = preset("fig5", 0.0, 0.0)
        .and_then(|s| s.build())
        .expect("bundled preset");
    let field = family.field(-0.5);
    let window = Window::new(-40.0, 40.0);
    let opts = BoundedOptions::default();
    let (x_lo, x_hi) =
        auto_bounds(&field, &window, LowerSign::Any).expect("cubic field is coercive");
    println!("start values: x_lo = {x_lo:.3}, x_hi = {x_hi:.3}");

    let upper = upper_bounded(&field, window, x_hi, &opts)
        .expect("pullback runs")
        .into_estimate()
        .expect("upper solution is bounded");
    let lower = lower_bounded(&field, window, x_lo, LowerMode::Forward, &opts)
        .expect("pullback runs")
        .into_estimate()
        .expect("lower solution is bounded");
    let middle = middle_bounded(
        &field,
        &lower,
        &upper,
        MiddleMethod::BackwardPullback,
        &opts,
    )
    .expect("middle found");

    for est in [&upper, &middle, &lower] {
        let c = certify(&field, est, &opts).expect("converged estimates can be certified");
        println!(
            "{:?}: range [{:.4}, {:.4}], residual {:.1e}, mean hx {:+.4}, kind {:?}",
            est.role,
            est.inf(),
            est.sup(),
            est.residual,
            c.gamma_est,
            c.certificate.map(|k| k.kind)
        );
    }
    println!(
        "separations: upper-middle {:.4}, middle-lower {:.4}",
        separation(&upper, &middle).unwrap(),
        separation(&middle, &lower).unwrap()
    );
    println!("\n{:>6} {:>9} {:>9} {:>9}", "t", "lower", "middle", "upper");
    for i in (0..window.len()).step_by(100) {
        println!(
            "{:>6.1} {:>9.4} {:>9.4} {:>9.4}",
            window.time(i),
            lower.values[i],
            middle.values[i],
            upper.values[i]
        );
    }
}
