//! E_W on tensor products and on two copies, against the single-copy sums.

use entbound::measures::{e_w, multi_copy, Measure};
use entbound::sdp::SolverConfig;
use entbound::states::{max_entangled, random_state, rho_alpha, sigma_r};
use std::time::Instant;

fn main() {
    let cfg = SolverConfig::default();
    let pairs = [
        (
            "phi(2) x phi(2)",
            max_entangled(2).unwrap(),
            max_entangled(2).unwrap(),
        ),
        (
            "sigma_r(0.5) x rho_alpha(0.5)",
            sigma_r(0.5).unwrap(),
            rho_alpha(0.5).unwrap(),
        ),
        (
            "random 2x2 pair",
            random_state(2, 2, 3, 1).unwrap(),
            random_state(2, 2, 2, 2).unwrap(),
        ),
    ];
    for (name, a, b) in &pairs {
        let t = Instant::now();
        let joint = e_w(&a.tensor(b), &cfg).unwrap().value_log2;
        let sum = e_w(a, &cfg).unwrap().value_log2 + e_w(b, &cfg).unwrap().value_log2;
        println!(
            "{name:<32} joint {joint:.9}  sum {sum:.9}  diff {:.1e}  ({:.2?})",
            joint - sum,
            t.elapsed()
        );
    }

    // Two copies of a 3⊗3 state make 81-dimensional blocks; expect tens of
    // seconds in a release build.
    let rho = rho_alpha(0.5).unwrap();
    let t = Instant::now();
    let two = multi_copy(Measure::EW, &rho, 2, &cfg).unwrap();
    println!(
        "\nE_W(rho_alpha(0.5)^2) = {:.9}, 2 log2(3/2) = {:.9} ({:.2?})",
        two.value_log2,
        2.0 * 1.5f64.log2(),
        t.elapsed()
    );
}
