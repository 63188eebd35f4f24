//! Self-consistency suites run by `entbound verify`: known values, strong
//! duality, additivity, monotonicity under local channels and the
//! witness ≤ W ≤ ‖ρ^{T_B}‖₁ sandwich, each on a small seeded corpus.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::cli::format_g;
use crate::error::MeasureError;
use crate::matrix::{partial_transpose, trace_norm, BipartiteState};
use crate::measures::{
    det_distill_one_copy, e_w, fidelity_ppt, log_negativity, npt_witness_bound, w_dual, w_primal,
};
use crate::sdp::SolverConfig;
use crate::states::{
    antisym_state, apply_local_channel, max_entangled, random_state, rho_alpha, LocalKrausChannel,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    KnownValues,
    Duality,
    Additivity,
    Monotonicity,
    Sandwich,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 6] = [
        "paper-values",
        "duality",
        "additivity",
        "monotonicity",
        "sandwich",
        "all",
    ];

    fn parts(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![
                Suite::KnownValues,
                Suite::Duality,
                Suite::Additivity,
                Suite::Monotonicity,
                Suite::Sandwich,
            ],
            s => vec![s],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Suite::KnownValues => "paper-values",
            Suite::Duality => "duality",
            Suite::Additivity => "additivity",
            Suite::Monotonicity => "monotonicity",
            Suite::Sandwich => "sandwich",
            Suite::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "paper-values" => Suite::KnownValues,
            "duality" => Suite::Duality,
            "additivity" => Suite::Additivity,
            "monotonicity" => Suite::Monotonicity,
            "sandwich" => Suite::Sandwich,
            "all" => Suite::All,
            _ => {
                return Err(format!(
                    "unknown suite `{s}` (expected one of {})",
                    Suite::NAMES.join(", ")
                ))
            }
        })
    }
}

#[derive(Debug, Clone)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    /// Deviation from the expected relation (0 when it holds with room).
    pub residual: f64,
    pub tolerance: f64,
    /// Set when a measure could not be evaluated.
    pub error: Option<String>,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.residual <= self.tolerance
    }
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed()).count()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let tag = if c.passed() { "PASS" } else { "FAIL" };
            let _ = write!(
                out,
                "{tag} {}/{} residual={} tol={}",
                c.suite,
                c.name,
                format_g(c.residual),
                format_g(c.tolerance)
            );
            if let Some(e) = &c.error {
                let _ = write!(out, " error={e}");
            }
            out.push('\n');
        }
        let _ = writeln!(
            out,
            "{}/{} checks passed",
            self.checks.len() - self.failures(),
            self.checks.len()
        );
        out
    }

    fn push(
        &mut self,
        suite: &'static str,
        name: impl Into<String>,
        tol: f64,
        r: Result<f64, MeasureError>,
    ) {
        let (residual, error) = match r {
            Ok(v) => (v, None),
            Err(e) => (f64::INFINITY, Some(e.to_string())),
        };
        self.checks.push(Check {
            suite,
            name: name.into(),
            residual,
            tolerance: tol,
            error,
        });
    }
}

/// Seeded mixed states over 2⊗2, 2⊗3 and 3⊗3 with varying rank.
pub fn corpus(count: usize, seed: u64) -> Vec<BipartiteState> {
    let shapes = [(2, 2), (2, 3), (3, 3)];
    (0..count)
        .map(|i| {
            let (a, b) = shapes[i % shapes.len()];
            let rank = 1 + (i / shapes.len()) % (a * b);
            random_state(a, b, rank, seed + i as u64).expect("rank within bounds")
        })
        .collect()
}

fn known_values(cfg: &SolverConfig, rep: &mut Report) {
    const S: &str = "paper-values";
    let rho = rho_alpha(0.5).expect("alpha in domain");
    let sigma3 = antisym_state();
    let three_halves = 1.5f64.log2();
    let five_thirds = (5.0f64 / 3.0).log2();
    rep.push(
        S,
        "ew(rho_alpha(0.5))=log2(3/2)",
        1e-5,
        e_w(&rho, cfg).map(|r| (r.value_log2 - three_halves).abs()),
    );
    rep.push(
        S,
        "en(rho_alpha(0.5))=log2(5/3)",
        1e-6,
        log_negativity(&rho).map(|r| (r.value_log2 - five_thirds).abs()),
    );
    rep.push(
        S,
        "e0(rho_alpha(0.5))=log2(3/2)",
        1e-5,
        det_distill_one_copy(&rho, cfg).map(|r| (r.value_log2 - three_halves).abs()),
    );
    rep.push(
        S,
        "fgamma(rho_alpha(0.5),1.5)=1",
        1e-6,
        fidelity_ppt(&rho, 1.5, cfg).map(|r| (r.value - 1.0).abs()),
    );
    rep.push(
        S,
        "ew(antisym)=log2(5/3)",
        1e-5,
        e_w(&sigma3, cfg).map(|r| (r.value_log2 - five_thirds).abs()),
    );
    rep.push(
        S,
        "en(antisym)=log2(5/3)",
        1e-6,
        log_negativity(&sigma3).map(|r| (r.value_log2 - five_thirds).abs()),
    );
    let phi2 = max_entangled(2).expect("d >= 2");
    rep.push(
        S,
        "ew(phi2)=1",
        1e-6,
        e_w(&phi2, cfg).map(|r| (r.value_log2 - 1.0).abs()),
    );
    let phi3 = max_entangled(3).expect("d >= 2");
    rep.push(
        S,
        "e0(phi3)=log2(3)",
        1e-6,
        det_distill_one_copy(&phi3, cfg).map(|r| (r.value_log2 - 3f64.log2()).abs()),
    );
}

fn duality(cfg: &SolverConfig, rep: &mut Report) {
    for (i, rho) in corpus(12, 1000).iter().enumerate() {
        let r = w_primal(rho, cfg).and_then(|p| Ok((p.value - w_dual(rho, cfg)?.value).abs()));
        rep.push("duality", format!("state-{i}-{}", rho.dims()), 1e-7, r);
    }
}

fn additivity(cfg: &SolverConfig, rep: &mut Report) {
    for i in 0..6u64 {
        let a = random_state(2, 2, 1 + (i as usize % 4), 2000 + 2 * i).expect("valid rank");
        let b = random_state(2, 2, 1 + ((i as usize + 2) % 4), 2001 + 2 * i).expect("valid rank");
        let r = (|| {
            let joint = e_w(&a.tensor(&b), cfg)?.value_log2;
            Ok((joint - e_w(&a, cfg)?.value_log2 - e_w(&b, cfg)?.value_log2).abs())
        })();
        rep.push("additivity", format!("pair-{i}"), 1e-5, r);
    }
    let phi = max_entangled(2).expect("d >= 2");
    rep.push(
        "additivity",
        "ew(phi2 x phi2)=2",
        1e-5,
        e_w(&phi.tensor(&phi), cfg).map(|r| (r.value_log2 - 2.0).abs()),
    );
}

fn monotonicity(cfg: &SolverConfig, rep: &mut Report) {
    for i in 0..6u64 {
        let rho = random_state(2, 2, 1 + (i as usize % 4), 3000 + i).expect("valid rank");
        let ch = if i % 2 == 0 {
            LocalKrausChannel::random_product(2, 2, 2, 2, 3100 + i)
        } else {
            LocalKrausChannel::random_one_way(2, 2, 2, 2, 3100 + i)
        };
        let r = (|| {
            let before = e_w(&rho, cfg)?.value_log2;
            let ens =
                apply_local_channel(&rho, &ch).map_err(|e| MeasureError::Domain(e.to_string()))?;
            let after = ens.average(|s| e_w(s, cfg).map(|r| r.value_log2))?;
            Ok((after - before).max(0.0))
        })();
        rep.push("monotonicity", format!("pair-{i}"), 1e-5, r);
    }
}

fn sandwich(cfg: &SolverConfig, rep: &mut Report) {
    for (i, rho) in corpus(12, 4000).iter().enumerate() {
        let r = (|| {
            let (wit, _) = npt_witness_bound(rho)?;
            let w = w_primal(rho, cfg)?.value;
            let tn = trace_norm(&partial_transpose(rho.rho(), rho.dims())?)?;
            Ok((1.0 - wit).max(wit - w).max(w - tn).max(0.0))
        })();
        rep.push("sandwich", format!("state-{i}-{}", rho.dims()), 1e-7, r);
    }
}

pub fn run_suite(suite: Suite, cfg: &SolverConfig) -> Report {
    let mut rep = Report::default();
    for part in suite.parts() {
        match part {
            Suite::KnownValues => known_values(cfg, &mut rep),
            Suite::Duality => duality(cfg, &mut rep),
            Suite::Additivity => additivity(cfg, &mut rep),
            Suite::Monotonicity => monotonicity(cfg, &mut rep),
            Suite::Sandwich => sandwich(cfg, &mut rep),
            Suite::All => unreachable!("expanded by parts"),
        }
    }
    rep
}
