use rayon::prelude::*;

use super::{format_g, CliError, Family, MeasureSpec};
use crate::matrix::BipartiteState;
use crate::sdp::SolverConfig;
use crate::states::{rho_alpha, sigma_r};

/// Grid points at a domain boundary move inward by this much.
pub const EDGE_CLIP: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub family: Family,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    pub measures: Vec<MeasureSpec>,
}

impl Family {
    /// Closed hull of the parameter domain.
    pub fn bounds(self) -> (f64, f64) {
        match self {
            Family::SigmaR => (0.0, 1.0),
            Family::RhoAlpha => (0.0, 0.5),
        }
    }

    /// Moves excluded endpoints inside the domain.
    pub fn clip(self, p: f64) -> f64 {
        match self {
            Family::SigmaR => p.clamp(EDGE_CLIP, 1.0 - EDGE_CLIP),
            Family::RhoAlpha => p.clamp(EDGE_CLIP, 0.5),
        }
    }

    pub fn state(self, p: f64) -> Result<BipartiteState, CliError> {
        let s = match self {
            Family::SigmaR => sigma_r(p),
            Family::RhoAlpha => rho_alpha(p),
        };
        s.map_err(|e| CliError::Usage(e.to_string()))
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::SigmaR => "sigma_r",
            Family::RhoAlpha => "rho_alpha",
        }
    }
}

impl SweepSpec {
    pub fn new(
        family: Family,
        from: f64,
        to: f64,
        steps: usize,
        measures: Vec<MeasureSpec>,
    ) -> Result<Self, CliError> {
        let (lo, hi) = family.bounds();
        if steps < 2 {
            return Err(CliError::Usage(format!(
                "--steps must be at least 2, got {steps}"
            )));
        }
        if !(from < to) {
            return Err(CliError::Usage(format!(
                "--from ({from}) must be smaller than --to ({to})"
            )));
        }
        if from < lo || to > hi {
            return Err(CliError::Usage(format!(
                "range [{from}, {to}] leaves the {} domain [{lo}, {hi}]",
                family.name()
            )));
        }
        if measures.is_empty() {
            return Err(CliError::Usage("no measures requested".into()));
        }
        Ok(Self {
            family,
            from,
            to,
            steps,
            measures,
        })
    }

    /// Evenly spaced parameters including both endpoints, clipped.
    pub fn grid(&self) -> Vec<f64> {
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                let p = if i + 1 == self.steps {
                    self.to
                } else {
                    self.from + (self.to - self.from) * i as f64 / last
                };
                self.family.clip(p)
            })
            .collect()
    }
}

/// Evaluates every grid point (in parallel) and renders the CSV table. Rows
/// follow the grid order; the first failing point aborts the sweep.
pub fn cmd_sweep(spec: &SweepSpec, cfg: &SolverConfig) -> Result<String, CliError> {
    let grid = spec.grid();
    let rows: Vec<Result<Vec<f64>, CliError>> = grid
        .par_iter()
        .map(|&p| {
            let rho = spec.family.state(p)?;
            spec.measures
                .iter()
                .map(|m| {
                    m.evaluate(&rho, cfg)
                        .map(|r| m.column_value(&r))
                        .map_err(|e| match CliError::from(e) {
                            CliError::Solver(d) => CliError::Solver(format!(
                                "{} at param {}: {d}",
                                m.name(),
                                format_g(p)
                            )),
                            other => other,
                        })
                })
                .collect()
        })
        .collect();

    let mut csv = String::from("param");
    for m in &spec.measures {
        csv.push(',');
        csv.push_str(&m.name());
    }
    csv.push('\n');
    for (p, row) in grid.iter().zip(rows) {
        let row = row?;
        csv.push_str(&format_g(*p));
        for v in row {
            csv.push(',');
            csv.push_str(&format_g(v));
        }
        csv.push('\n');
    }
    Ok(csv)
}
