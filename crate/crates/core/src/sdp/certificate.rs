use nalgebra::{DMatrix, DVector};

use super::model::{SdpProblem, Sense};
use super::SdpSolution;
use crate::matrix::HermitianMatrix;

/// Independent re-evaluation of an [`SdpSolution`].
///
/// Primal residuals are recomputed by evaluating every constraint at the
/// assignments; the dual side is rebuilt from the multipliers through the
/// adjoints of the constraint maps, with equality multipliers fitted by
/// least squares.
#[derive(Debug, Clone)]
pub struct CertificateReport {
    /// `(label, residual)` for every constraint: `max(0, −λ_min)` for matrix
    /// inequalities (including PSD variables), `|lhs − rhs|` for equalities.
    pub constraint_residuals: Vec<(String, f64)>,
    pub max_residual: f64,
    /// Largest Frobenius norm of the per-variable dual stationarity residual.
    pub dual_residual: f64,
    /// Most negative multiplier eigenvalue (0 when all are PSD).
    pub multiplier_infeasibility: f64,
    pub primal_value: f64,
    pub dual_value: f64,
    pub gap: f64,
}

impl CertificateReport {
    /// Labels of constraints whose residual exceeds `tol`.
    pub fn violations(&self, tol: f64) -> Vec<&str> {
        self.constraint_residuals
            .iter()
            .filter(|(_, r)| *r > tol)
            .map(|(l, _)| l.as_str())
            .collect()
    }

    pub fn is_certified(&self, feas_tol: f64, gap_tol: f64) -> bool {
        self.max_residual <= feas_tol
            && self.dual_residual <= feas_tol.max(1e-12) * 1e3
            && self.multiplier_infeasibility <= feas_tol
            && self.gap <= gap_tol * self.primal_value.abs().max(1.0)
    }
}

pub fn check_certificate(problem: &SdpProblem, solution: &SdpSolution) -> CertificateReport {
    let values = &solution.values;
    let ineqs = problem.all_inequalities();

    let mut constraint_residuals = Vec::with_capacity(ineqs.len() + problem.equalities.len());
    for q in &ineqs {
        let g = q.evaluate(values);
        let r = g
            .min_eigenvalue()
            .map(|l| (-l).max(0.0))
            .unwrap_or(f64::INFINITY);
        constraint_residuals.push((q.label.clone(), r));
    }
    for e in &problem.equalities {
        constraint_residuals.push((e.label.clone(), (e.lhs(values) - e.rhs).abs()));
    }
    let max_residual = constraint_residuals
        .iter()
        .map(|(_, r)| *r)
        .fold(0.0, f64::max);

    let sign = match problem.sense {
        Sense::Maximize => 1.0,
        Sense::Minimize => -1.0,
    };

    // Stationarity: sign·C_v + Σ_k adjoint_k(H_k) − Σ_e w_e A_{e,v} = 0.
    let mut stationarity: Vec<HermitianMatrix> = problem
        .variables
        .iter()
        .map(|v| HermitianMatrix::zeros(v.dim))
        .collect();
    for (var, c) in &problem.objective {
        let s = &mut stationarity[var.index()];
        *s = &*s + &c.scale(sign);
    }
    let mut multiplier_infeasibility = 0.0_f64;
    let mut dual_obj = 0.0;
    for (q, h) in ineqs.iter().zip(&solution.multipliers) {
        for t in &q.terms {
            let s = &mut stationarity[t.var.index()];
            *s = &*s + &t.adjoint(h);
        }
        dual_obj += q.constant.inner(h);
        let lmin = h.min_eigenvalue().unwrap_or(f64::NEG_INFINITY);
        multiplier_infeasibility = multiplier_infeasibility.max(-lmin);
    }

    let p = problem.equalities.len();
    if p > 0 {
        let mut gram = DMatrix::zeros(p, p);
        let mut rhs = DVector::zeros(p);
        for (e, eq_e) in problem.equalities.iter().enumerate() {
            for (var, a) in &eq_e.terms {
                rhs[e] += a.inner(&stationarity[var.index()]);
            }
            for (f, eq_f) in problem.equalities.iter().enumerate() {
                for (ve, ae) in &eq_e.terms {
                    for (vf, af) in &eq_f.terms {
                        if ve == vf {
                            gram[(e, f)] += ae.inner(af);
                        }
                    }
                }
            }
        }
        let w = gram
            .svd(true, true)
            .solve(&rhs, 1e-12)
            .unwrap_or_else(|_| DVector::zeros(p));
        for (e, eq) in problem.equalities.iter().enumerate() {
            for (var, a) in &eq.terms {
                let s = &mut stationarity[var.index()];
                *s = &*s - &a.scale(w[e]);
            }
            dual_obj += w[e] * eq.rhs;
        }
    }
    let dual_residual = stationarity
        .iter()
        .map(|s| s.frobenius_norm())
        .fold(0.0, f64::max);

    let primal_value = problem.objective_value(values);
    let dual_value = sign * dual_obj + problem.objective_constant;
    CertificateReport {
        constraint_residuals,
        max_residual,
        dual_residual,
        multiplier_infeasibility: multiplier_infeasibility.max(0.0),
        primal_value,
        dual_value,
        gap: (primal_value - dual_value).abs(),
    }
}
