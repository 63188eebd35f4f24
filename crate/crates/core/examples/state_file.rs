//! Writes a state document, loads it back and evaluates it the way
//! `entbound compute` does.

use entbound::cli::{cmd_compute, MeasureSpec, OutputFormat, StateFile};
use entbound::sdp::SolverConfig;
use entbound::states::rho_alpha;

fn main() {
    let doc = StateFile::from_state("rho_alpha(0.5)", &rho_alpha(0.5).unwrap()).to_json();
    let dir = std::env::temp_dir().join("entbound-example");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("rho.json");
    std::fs::write(&path, &doc).unwrap();
    println!("{}\n", path.display());

    let measures = MeasureSpec::parse_list("en,ew,e0,fgamma:k=1.5,witness").unwrap();
    let cfg = SolverConfig::default();
    print!(
        "{}",
        cmd_compute(&path, &measures, OutputFormat::Text, &cfg).unwrap()
    );
    println!();
    print!(
        "{}",
        cmd_compute(&path, &measures[..2], OutputFormat::Json, &cfg).unwrap()
    );
}
