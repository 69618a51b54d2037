//! Tracking versus tipping in the d-concave hunting model: verdicts at a
//! few hunting intensities, the critical value, and the attractive paths.
//!
//! cargo run --release --example tipping

use saddlenode::figures::{transition_figure, FigureId};
use saddlenode::transitions::find_tipping;

fn main() {
    let fig = transition_figure(FigureId::Sec42).expect("sec42 is a transition");
    for l in [0.2, 0.34, 0.36, 0.5] {
        let v = fig.problem.verdict(l).expect("references converge");
        println!(
            "λ = {l}: {:?} (distance to the upper attractor {:.2e}, state at t = {} is {:.4})",
            v.verdict,
            v.distance_tracked.unwrap_or(f64::NAN),
            v.horizon,
            v.terminal
        );
    }
    let r =
        find_tipping(&fig.problem, 0.3, 0.4, 1e-7).expect("bracket straddles the tipping value");
    println!(
        "critical intensity λ₀ = {:.7} ± {:.1e}",
        r.value(),
        r.values[0].half_width
    );

    for l in [0.34, 0.36] {
        let path = fig.problem.path(l, 50.0).expect("path integrates");
        let row: Vec<String> = path
            .samples
            .iter()
            .map(|(t, x)| format!("{t:.0}:{x:.3}"))
            .collect();
        println!("path λ = {l}: {}", row.join(" "));
    }
}
