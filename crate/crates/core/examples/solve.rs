//! Adaptive integration: a solution that blows up in finite time and the
//! finite-time Lyapunov exponent of one that settles on an attractor.
//!
//! cargo run --release --example solve

use saddlenode::integrate::{finite_time_lyapunov, solve, SolveOptions};
use saddlenode::models::ModelSpec;

fn main() {
    let family = ModelSpec::QuadraticDemo { center: 0.0 }
        .build()
        .expect("valid model");

    // x' = -x² - 1 from x(0) = 0 is x = -tan t, which escapes at t = π/2.
    let traj =
        solve(&family.field(-1.0), 0.0, 0.0, 3.0, SolveOptions::default()).expect("solver runs");
    let escape = traj.status.escape().expect("the solution blows up");
    println!(
        "lambda = -1: escape to {:?} at t = {:.9} (pi/2 = {:.9}), {} steps",
        escape.direction,
        escape.time,
        std::f64::consts::FRAC_PI_2,
        traj.stats.accepted
    );

    // x' = -x² + 1 is attracted to x = 1, where hx = -2.
    let field = family.field(1.0);
    let traj = solve(&field, 0.0, 0.0, 40.0, SolveOptions::with_tol(1e-10)).expect("solver runs");
    println!("lambda = 1: x(40) = {:.12}", traj.final_state());
    for (a, b) in [(0.0, 5.0), (20.0, 40.0)] {
        let gamma = finite_time_lyapunov(&field, &traj, a, b).expect("inside the trajectory");
        println!("  mean of hx over [{a}, {b}] = {gamma:.6}");
    }
    for (t, x) in traj.sample(5.0) {
        println!("  t = {t:>4}  x = {x:.10}");
    }
}
