//! A bifurcation curve `k ↦ λ̃(p_k)` of the population model, swept with
//! warm starts and a cold cross-check.
//!
//! cargo run --release --example bifurcation_curve -- [K_MAX]

use saddlenode::figures::{curve_figure, range_grid, FigureId};

fn main() {
    let k_max: f64 = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(8.0);
    let mut fig = curve_figure(FigureId::Fig1).expect("fig1 is a curve");
    fig.grid = range_grid(0.0, k_max, 4.0);
    fig.options.cross_checks = 1;
    let curves = fig.run().expect("preset parameters are valid");
    let table = &curves[0].table;
    println!("{:>4} {:>12} {:>10}", "k", "lambda", "width");
    for p in &table.points {
        match &p.result {
            Some(r) => println!(
                "{:>4} {:>12.7} {:>10.1e}",
                p.k,
                r.value(),
                r.bracket_width()
            ),
            None => println!("{:>4} failed: {}", p.k, p.error.as_deref().unwrap_or("")),
        }
    }
    for c in &table.cross_checks {
        println!(
            "cross-check at k = {}: warm {:?}, cold {:?}, agrees {}",
            c.k, c.warm, c.cold, c.agrees
        );
    }
}
