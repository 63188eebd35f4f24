//! E_W against E_N along sigma_r, the data behind the separation plot.
//! Pass a path to also write the CSV.

use entbound::cli::sweep::{cmd_sweep, SweepSpec};
use entbound::cli::{Family, MeasureSpec};
use entbound::sdp::SolverConfig;

fn main() {
    let spec = SweepSpec::new(
        Family::SigmaR,
        0.05,
        0.95,
        19,
        vec![MeasureSpec::Ew, MeasureSpec::En],
    )
    .unwrap();
    let csv = cmd_sweep(&spec, &SolverConfig::default()).unwrap();
    print!("{csv}");

    let gaps: Vec<f64> = csv
        .lines()
        .skip(1)
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
            v[2] - v[1]
        })
        .collect();
    let min = gaps.iter().copied().fold(f64::INFINITY, f64::min);
    println!("\nsmallest E_N - E_W on the grid: {min:.6}");

    if let Some(path) = std::env::args().nth(1) {
        std::fs::write(&path, &csv).unwrap();
        println!("wrote {path}");
    }
}
