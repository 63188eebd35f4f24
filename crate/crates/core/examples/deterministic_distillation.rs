//! One-copy PPT deterministic distillation rate. For pure states it equals
//! -log2 of the largest Schmidt weight; for mixed states only the support
//! matters.

use entbound::matrix::{hermitian_eig, BipartiteDims, BipartiteState};
use entbound::measures::{det_distill_one_copy, w0};
use entbound::sdp::SolverConfig;
use entbound::states::{random_pure_vector, random_state, rho_alpha, schmidt_coefficients};

fn main() {
    let cfg = SolverConfig::default();

    println!("pure states");
    for seed in 0..4 {
        let psi = random_pure_vector(2, 3, seed);
        let rho = BipartiteState::pure(&psi, BipartiteDims::new(2, 3).unwrap()).unwrap();
        let e0 = det_distill_one_copy(&rho, &cfg).unwrap().value_log2;
        let top = schmidt_coefficients(&psi, 2, 3)[0];
        println!(
            "  seed {seed}: e0 = {e0:.9}  -log2(s_max^2) = {:.9}",
            -(top * top).log2()
        );
    }

    let rho = rho_alpha(0.5).unwrap();
    let e0 = det_distill_one_copy(&rho, &cfg).unwrap();
    let z = w0(&rho, &cfg).unwrap();
    println!(
        "\nrho_alpha(0.5): e0 = {:.9} (log2 3/2 = {:.9}), zero-rate E_W = {:.9}",
        e0.value_log2,
        1.5f64.log2(),
        z.value_log2
    );

    // Same support, different weights.
    let rho = random_state(3, 3, 3, 21).unwrap();
    let spec = hermitian_eig(rho.rho()).unwrap();
    let flat = spec.projector(|l| l > 1e-9);
    let flat = BipartiteState::from_unnormalized(flat, rho.dims()).unwrap();
    println!(
        "\nrank-3 state: e0 = {:.9}, flattened spectrum: e0 = {:.9}",
        det_distill_one_copy(&rho, &cfg).unwrap().value_log2,
        det_distill_one_copy(&flat, &cfg).unwrap().value_log2
    );
}
