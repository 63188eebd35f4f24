//! Average E_W after random local instruments never exceeds E_W before.

use entbound::measures::e_w;
use entbound::sdp::SolverConfig;
use entbound::states::{apply_local_channel, random_state, sigma_r, LocalKrausChannel};

fn main() {
    let cfg = SolverConfig::default();
    let cases = [
        (
            "sigma_r(0.5), product",
            sigma_r(0.5).unwrap(),
            LocalKrausChannel::random_product(2, 2, 2, 2, 1),
        ),
        (
            "sigma_r(0.5), one-way",
            sigma_r(0.5).unwrap(),
            LocalKrausChannel::random_one_way(2, 2, 2, 3, 2),
        ),
        (
            "random 2x2, one-way",
            random_state(2, 2, 2, 3).unwrap(),
            LocalKrausChannel::random_one_way(2, 2, 3, 2, 4),
        ),
    ];
    for (name, rho, ch) in &cases {
        let before = e_w(rho, &cfg).unwrap().value_log2;
        let ens = apply_local_channel(rho, ch).unwrap();
        let after = ens.average(|s| e_w(s, &cfg).map(|r| r.value_log2)).unwrap();
        println!(
            "{name:<24} {} outcomes  before {before:.6}  average after {after:.6}",
            ens.len()
        );
    }
}
