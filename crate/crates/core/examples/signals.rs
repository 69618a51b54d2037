//! Forcing signals: evaluation, shifts, the compact-open distance, the
//! membership test and a function whose shifts come back near every seed.
//!
//! cargo run --release --example signals

use saddlenode::signals::{cp_distance, membership_check, DenseOrbit, PSpaceParams, Signal};

fn main() {
    let hat = Signal::plateau_hat(6.0);
    let blend = Signal::arctan_blend(Signal::sin(1.0, 1.0 / 20.0), 0.0, 0.5);
    let hunting = Signal::bump_train();
    println!(
        "{:>6} {:>10} {:>10} {:>10}",
        "t", "hat(6)", "blend", "bumps"
    );
    for t in [-8.0, -2.0, 0.0, 2.0, 4.0, 9.0, 50.0] {
        println!(
            "{t:>6} {:>10.4} {:>10.4} {:>10.4}",
            hat.eval(t),
            blend.eval(t),
            hunting.eval(t)
        );
    }

    // The hat functions sit in P = {|p| <= 1, Lip(p) <= 1}; sin(2t) does not.
    let params = PSpaceParams::default();
    for (name, s) in [("hat(6)", &hat), ("sin(2t)", &Signal::sin(1.0, 2.0))] {
        let r = membership_check(s, params, (-20.0, 20.0), 64);
        println!(
            "{name}: in P = {} (sup {:.3}, Lipschitz {:.3})",
            r.pass, r.sup_norm, r.lipschitz
        );
    }

    // Shifts of the dense orbit reproduce each seed on longer and longer
    // intervals, so the distance to the seed shrinks block by block.
    let seeds: Vec<Signal> = [0.0, 2.0, 4.0, 8.0, 16.0].map(Signal::plateau_hat).to_vec();
    let orbit = DenseOrbit::new(seeds.clone(), params).expect("seeds are valid");
    let q = Signal::DenseOrbit(orbit.clone());
    println!("\nseed  block  shift      d(q(. + s), seed)");
    for (i, seed) in seeds.iter().enumerate() {
        for block in [5, 10, 20] {
            let iv = orbit
                .occurrence(i, block)
                .expect("every block >= seed count schedules each seed");
            let d = cp_distance(&q.shift(iv.center()), seed, 10, 64);
            println!("{i:>4} {block:>6} {:>9.1}  {:.2e}", iv.center(), d.value);
        }
    }
}
