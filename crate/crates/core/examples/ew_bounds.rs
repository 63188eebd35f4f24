//! E_W from both sides of its SDP, next to the witness lower bound and the
//! log-negativity upper bound.

use entbound::matrix::{partial_transpose, trace_norm};
use entbound::measures::{e_w, log_negativity, npt_witness_bound, w_dual, w_primal};
use entbound::sdp::SolverConfig;
use entbound::states::{antisym_state, random_state, rho_alpha, sigma_r};

fn main() {
    let cfg = SolverConfig::default();
    let states = [
        ("rho_alpha(0.5)", rho_alpha(0.5).unwrap()),
        ("rho_alpha(0.2)", rho_alpha(0.2).unwrap()),
        ("sigma_r(0.3)", sigma_r(0.3).unwrap()),
        ("antisym", antisym_state()),
        ("random 2x3 rank 2", random_state(2, 3, 2, 11).unwrap()),
    ];
    println!(
        "{:<18} {:>10} {:>12} {:>12} {:>12} {:>8} {:>8}",
        "state", "witness", "W primal", "W dual", "|rho^TB|_1", "E_W", "E_N"
    );
    for (name, rho) in &states {
        let (wit, _) = npt_witness_bound(rho).unwrap();
        let p = w_primal(rho, &cfg).unwrap();
        let d = w_dual(rho, &cfg).unwrap();
        let tn = trace_norm(&partial_transpose(rho.rho(), rho.dims()).unwrap()).unwrap();
        let ew = e_w(rho, &cfg).unwrap().value_log2;
        let en = log_negativity(rho).unwrap().value_log2;
        println!(
            "{name:<18} {wit:>10.7} {:>12.9} {:>12.9} {tn:>12.9} {ew:>8.5} {en:>8.5}",
            p.value, d.value
        );
    }
    let alpha: f64 = 0.5;
    println!(
        "\nrho_alpha(0.5): E_W = log2(3/2) = {:.9}, E_N = log2(5/3) = {:.9}",
        1.5f64.log2(),
        (1.0 + 4.0 / 3.0 * (alpha * (1.0 - alpha)).sqrt()).log2()
    );
}
