//! Reruns one bundled figure and prints its numbers.
//!
//! cargo run --release --example reproduce -- sec42
//!
//! Curve figures sweep dozens of parameter values and take minutes; the
//! transition figures (fig3, sec42) finish in seconds.

use saddlenode::figures::{figure, Figure, FigureId};

fn main() {
    let id: FigureId = match std::env::args()
        .nth(1)
        .unwrap_or_else(|| "sec42".into())
        .parse()
    {
        Ok(id) => id,
        Err(e) => {
            eprintln!("{e}; choose one of {:?}", FigureId::ALL.map(|f| f.as_str()));
            std::process::exit(2);
        }
    };
    match figure(id) {
        Figure::Curve(fig) => {
            for curve in fig.run().expect("preset parameters are valid") {
                println!("shift s = {}", curve.s);
                for p in &curve.table.points {
                    let values = p
                        .values()
                        .map(|v| format!("{v:.7?}"))
                        .unwrap_or_else(|| "failed".into());
                    println!("  k = {:<10} {values}", p.k);
                }
            }
        }
        Figure::Transition(fig) => {
            let run = fig.run();
            match &run.tipping {
                Ok(r) => println!(
                    "tipping value {:.8} (bracket width {:.1e})",
                    r.value(),
                    r.bracket_width()
                ),
                Err(e) => println!("tipping value not located: {e}"),
            }
            for (l, v) in &run.verdicts {
                match v {
                    Ok(v) => println!("  λ = {l:.8}: {:?}", v.verdict),
                    Err(e) => println!("  λ = {l:.8}: {e}"),
                }
            }
        }
    }
}
