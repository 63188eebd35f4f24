//! Closed-form log-negativity of the named families and a few random states.

use entbound::measures::{log_negativity, PptClass};
use entbound::states::{
    antisym_state, max_entangled, random_separable, random_state, rho_alpha, sigma_r,
};

fn main() {
    let named = [
        ("phi(2)", max_entangled(2).unwrap()),
        ("phi(3)", max_entangled(3).unwrap()),
        ("rho_alpha(0.5)", rho_alpha(0.5).unwrap()),
        ("sigma_r(0.5)", sigma_r(0.5).unwrap()),
        ("antisym", antisym_state()),
        ("random 3x3 rank 4", random_state(3, 3, 4, 7).unwrap()),
        ("separable 3x3", random_separable(3, 3, 5, 7).unwrap()),
    ];
    println!("{:<20} {:>12} {:>10}", "state", "E_N [ebit]", "class");
    for (name, rho) in &named {
        let r = log_negativity(rho).unwrap();
        let class = match r.ppt {
            PptClass::Ppt => "ppt",
            PptClass::Boundary => "boundary",
            PptClass::Npt => "npt",
        };
        println!("{name:<20} {:>12.9} {class:>10}", r.value_log2);
    }
}
