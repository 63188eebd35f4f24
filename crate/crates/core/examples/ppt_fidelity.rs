//! Best PPT fidelity with Φ(k) for real-valued k.

use entbound::measures::fidelity_ppt;
use entbound::sdp::SolverConfig;
use entbound::states::{max_entangled, rho_alpha, sigma_r};

fn main() {
    let cfg = SolverConfig::default();
    let ks = [1.0, 1.25, 1.5, 1.75, 2.0, 2.5, 3.0];
    let states = [
        ("phi(3)", max_entangled(3).unwrap()),
        ("rho_alpha(0.5)", rho_alpha(0.5).unwrap()),
        ("sigma_r(0.5)", sigma_r(0.5).unwrap()),
    ];
    print!("{:<16}", "k");
    for k in ks {
        print!("{k:>10}");
    }
    println!();
    for (name, rho) in &states {
        print!("{name:<16}");
        for k in ks {
            print!("{:>10.6}", fidelity_ppt(rho, k, &cfg).unwrap().value);
        }
        println!();
    }
    // rho_alpha(0.5) keeps unit fidelity up to k = 3/2, which is where its
    // one-copy deterministic rate log2(3/2) comes from.
}
