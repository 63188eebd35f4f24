//! Small dense SDPs over Hermitian matrix variables.
//!
//! Problems are written with [`SdpProblem`] and solved by [`solve`], which
//! lowers them to a block-diagonal real symmetric standard form (through the
//! real embedding when any data are complex) and runs a primal-dual
//! interior-point method. [`check_certificate`] re-derives both objective
//! values and every residual from the returned primal assignments and dual
//! multipliers, independently of the solver internals.

mod certificate;
mod ipm;
mod model;
mod standard;

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::SdpError;
use crate::matrix::{c64, CMatrix, HermitianMatrix};

pub use certificate::{check_certificate, CertificateReport};
pub use ipm::IterateLog;
pub use model::{
    MapOp, MatrixInequality, ScalarEquality, SdpProblem, Sense, Term, VarId, VarKind, Variable,
};

use standard::{BlockPart, Entries, StdForm};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    NumericFailure,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Stop when `|primal − dual| ≤ gap_tol · max(1, |primal|)`.
    pub gap_tol: f64,
    /// Bound on every constraint residual at termination.
    pub feas_tol: f64,
    pub max_iterations: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            gap_tol: 1e-8,
            feas_tol: 1e-9,
            max_iterations: 200,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SdpError> {
        if !(self.gap_tol > 0.0 && self.feas_tol > 0.0 && self.max_iterations > 0) {
            return Err(SdpError::Model(format!(
                "invalid solver configuration {self:?}"
            )));
        }
        Ok(())
    }

    pub fn with_gap_tol(mut self, tol: f64) -> Self {
        self.gap_tol = tol;
        self
    }
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub status: SolveStatus,
    /// Objective of the problem as posed, evaluated at `assignments`.
    pub primal_value: f64,
    /// Value of the Lagrange dual at the returned multipliers.
    pub dual_value: f64,
    pub gap: f64,
    pub assignments: BTreeMap<String, HermitianMatrix>,
    /// Assignments indexed by [`VarId`].
    pub values: Vec<HermitianMatrix>,
    /// One positive semidefinite multiplier per matrix inequality: the
    /// explicit inequalities in insertion order, then one per PSD variable.
    pub multipliers: Vec<HermitianMatrix>,
    pub iterations: usize,
    pub history: Vec<IterateLog>,
}

impl SdpSolution {
    pub fn value(&self, var: VarId) -> &HermitianMatrix {
        &self.values[var.index()]
    }

    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }

    /// Midpoint of the primal and dual values.
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.primal_value + self.dual_value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Field {
    Real,
    Complex,
}

#[derive(Debug, Clone, Copy)]
enum CoordKind {
    Diag(usize),
    Re(usize, usize),
    Im(usize, usize),
}

#[derive(Debug, Clone, Copy)]
struct Coord {
    var: usize,
    kind: CoordKind,
}

fn coordinates(problem: &SdpProblem, field: Field) -> Vec<Coord> {
    let mut out = Vec::new();
    for (v, var) in problem.variables.iter().enumerate() {
        for i in 0..var.dim {
            out.push(Coord {
                var: v,
                kind: CoordKind::Diag(i),
            });
            for j in (i + 1)..var.dim {
                out.push(Coord {
                    var: v,
                    kind: CoordKind::Re(i, j),
                });
                if field == Field::Complex {
                    out.push(Coord {
                        var: v,
                        kind: CoordKind::Im(i, j),
                    });
                }
            }
        }
    }
    out
}

fn basis_matrix(dim: usize, kind: CoordKind) -> CMatrix {
    let mut m = CMatrix::zeros(dim, dim);
    match kind {
        CoordKind::Diag(i) => m[(i, i)] = c64(1.0, 0.0),
        CoordKind::Re(i, j) => {
            m[(i, j)] = c64(1.0, 0.0);
            m[(j, i)] = c64(1.0, 0.0);
        }
        CoordKind::Im(i, j) => {
            m[(i, j)] = c64(0.0, 1.0);
            m[(j, i)] = c64(0.0, -1.0);
        }
    }
    m
}

fn embed(m: &CMatrix, field: Field) -> DMatrix<f64> {
    let n = m.nrows();
    let mut out = match field {
        Field::Real => m.map(|z| z.re),
        Field::Complex => {
            let mut e = DMatrix::zeros(2 * n, 2 * n);
            for i in 0..n {
                for j in 0..n {
                    let z = m[(i, j)];
                    e[(i, j)] = z.re;
                    e[(i + n, j + n)] = z.re;
                    e[(i, j + n)] = -z.im;
                    e[(i + n, j)] = z.im;
                }
            }
            e
        }
    };
    standard::symmetrize(&mut out);
    out
}

fn de_embed(x: &DMatrix<f64>, field: Field) -> HermitianMatrix {
    match field {
        Field::Real => HermitianMatrix::hermitian_part(&x.map(|v| c64(v, 0.0))),
        Field::Complex => {
            let n = x.nrows() / 2;
            let m = CMatrix::from_fn(n, n, |i, j| {
                Complex64::new(x[(i, j)] + x[(i + n, j + n)], x[(i + n, j)] - x[(i, j + n)])
            });
            HermitianMatrix::hermitian_part(&m)
        }
    }
}

/// Result of lowering: the standard form plus the affine map from its `y`
/// back to Hermitian coordinates, `u = u0 + N·y`.
struct Lowered {
    field: Field,
    coords: Vec<Coord>,
    std: StdForm,
    u0: DVector<f64>,
    /// Columns: one per standard-form `y` entry. `None` means identity.
    null_basis: Option<DMatrix<f64>>,
    /// Coordinates (or reduced columns) pinned to zero because they appear
    /// in no constraint; maps `y` index to column of `null_basis`.
    kept: Vec<usize>,
    offset: f64,
    sign: f64,
}

enum LowerOutcome {
    Ready(Box<Lowered>),
    Trivial(SolveStatus),
}

fn lower(problem: &SdpProblem) -> Result<LowerOutcome, SdpError> {
    problem.validate()?;
    let field = if problem.is_real() {
        Field::Real
    } else {
        Field::Complex
    };
    let coords = coordinates(problem, field);
    let ineqs = problem.all_inequalities();
    let sign = match problem.sense {
        Sense::Maximize => 1.0,
        Sense::Minimize => -1.0,
    };
    let factor = if field == Field::Complex { 2 } else { 1 };
    let dims: Vec<usize> = ineqs.iter().map(|c| c.dim * factor).collect();
    let c: Vec<DMatrix<f64>> = ineqs
        .iter()
        .map(|q| embed(q.constant.as_matrix(), field))
        .collect();

    // Which (inequality, term) pairs touch each variable.
    let mut uses: Vec<Vec<(usize, usize)>> = vec![Vec::new(); problem.variables.len()];
    for (k, q) in ineqs.iter().enumerate() {
        for (t, term) in q.terms.iter().enumerate() {
            uses[term.var.index()].push((k, t));
        }
    }

    let mut a_full: Vec<Vec<BlockPart>> = Vec::with_capacity(coords.len());
    let mut obj = DVector::zeros(coords.len());
    let mut eq_rows = DMatrix::zeros(problem.equalities.len(), coords.len());
    for (ci, coord) in coords.iter().enumerate() {
        let dim = problem.variables[coord.var].dim;
        let basis = basis_matrix(dim, coord.kind);
        let basis_h = HermitianMatrix::hermitian_part(&basis);
        let mut parts: Vec<BlockPart> = Vec::new();
        let mut current: Option<(usize, CMatrix)> = None;
        for &(k, t) in &uses[coord.var] {
            let img = ineqs[k].terms[t].apply_raw(&basis);
            match &mut current {
                Some((ck, acc)) if *ck == k => *acc += img,
                _ => {
                    if let Some((ck, acc)) = current.take() {
                        push_part(&mut parts, ck, &acc, field);
                    }
                    current = Some((k, img));
                }
            }
        }
        if let Some((ck, acc)) = current.take() {
            push_part(&mut parts, ck, &acc, field);
        }
        a_full.push(parts);
        obj[ci] = problem
            .objective
            .iter()
            .filter(|(v, _)| v.index() == coord.var)
            .map(|(_, w)| w.inner(&basis_h))
            .sum();
        for (e, eq) in problem.equalities.iter().enumerate() {
            eq_rows[(e, ci)] = eq
                .terms
                .iter()
                .filter(|(v, _)| v.index() == coord.var)
                .map(|(_, w)| w.inner(&basis_h))
                .sum();
        }
    }
    let b_full = obj * sign;

    let (mut std, u0, null_basis, offset) = if problem.equalities.is_empty() {
        let n = coords.len();
        (
            StdForm {
                dims,
                c,
                a: a_full,
                b: b_full,
            },
            DVector::zeros(n),
            None,
            0.0,
        )
    } else {
        let g = DVector::from_iterator(
            problem.equalities.len(),
            problem.equalities.iter().map(|e| e.rhs),
        );
        match eliminate_equalities(&eq_rows, &g) {
            None => return Ok(LowerOutcome::Trivial(SolveStatus::Infeasible)),
            Some((u0, nb)) => {
                let reduced = reduce(&dims, &c, &a_full, &b_full, &u0, &nb);
                let offset = b_full.dot(&u0);
                (reduced, u0, Some(nb), offset)
            }
        }
    };

    // Directions that no constraint restricts: unbounded if the objective
    // moves along them, otherwise pinned at zero.
    let mut kept = Vec::new();
    let mut a_kept = Vec::new();
    let mut b_kept = Vec::new();
    for (j, parts) in std.a.drain(..).enumerate() {
        if parts.is_empty() {
            if std.b[j].abs() > 1e-14 {
                return Ok(LowerOutcome::Trivial(SolveStatus::Unbounded));
            }
        } else {
            kept.push(j);
            a_kept.push(parts);
            b_kept.push(std.b[j]);
        }
    }
    std.a = a_kept;
    std.b = DVector::from_vec(b_kept);

    Ok(LowerOutcome::Ready(Box::new(Lowered {
        field,
        coords,
        std,
        u0,
        null_basis,
        kept,
        offset,
        sign,
    })))
}

fn push_part(parts: &mut Vec<BlockPart>, block: usize, img: &CMatrix, field: Field) {
    // Standard form uses S = C − Σ y_i A_i, so A_i is minus the image.
    let a = -embed(img, field);
    if let Some(entries) = Entries::from_dense(a, 0.0) {
        parts.push(BlockPart { block, entries });
    }
}

/// Particular solution and orthonormal null-space basis of `E u = g`.
fn eliminate_equalities(
    e: &DMatrix<f64>,
    g: &DVector<f64>,
) -> Option<(DVector<f64>, DMatrix<f64>)> {
    let n = e.ncols();
    let svd = e.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let tol = 1e-12 * smax.max(1.0) * n.max(1) as f64;
    let u0 = svd.solve(g, tol).ok()?;
    if (e * &u0 - g).norm() > 1e-9 * (1.0 + g.norm()) {
        return None;
    }
    let vt = svd.v_t.as_ref()?;
    let mut proj = DMatrix::<f64>::identity(n, n);
    for (r, &s) in svd.singular_values.iter().enumerate() {
        if s > tol {
            let row = vt.row(r).transpose();
            proj -= &row * row.transpose();
        }
    }
    standard::symmetrize(&mut proj);
    let eig = proj.symmetric_eigen();
    let cols: Vec<usize> = (0..n).filter(|&i| eig.eigenvalues[i] > 0.5).collect();
    let nb = DMatrix::from_fn(n, cols.len(), |r, c| eig.eigenvectors[(r, cols[c])]);
    Some((u0, nb))
}

fn reduce(
    dims: &[usize],
    c: &[DMatrix<f64>],
    a: &[Vec<BlockPart>],
    b: &DVector<f64>,
    u0: &DVector<f64>,
    nb: &DMatrix<f64>,
) -> StdForm {
    let mut c_red: Vec<DMatrix<f64>> = c.to_vec();
    for (i, parts) in a.iter().enumerate() {
        if u0[i] != 0.0 {
            for p in parts {
                p.entries.add_scaled_to(&mut c_red[p.block], -u0[i]);
            }
        }
    }
    let mut a_red = Vec::with_capacity(nb.ncols());
    for j in 0..nb.ncols() {
        let mut blocks: Vec<Option<DMatrix<f64>>> = vec![None; dims.len()];
        for (i, parts) in a.iter().enumerate() {
            let w = nb[(i, j)];
            if w.abs() < 1e-15 {
                continue;
            }
            for p in parts {
                let blk = blocks[p.block]
                    .get_or_insert_with(|| DMatrix::zeros(dims[p.block], dims[p.block]));
                p.entries.add_scaled_to(blk, w);
            }
        }
        let parts = blocks
            .into_iter()
            .enumerate()
            .filter_map(|(k, m)| {
                m.and_then(|m| Entries::from_dense(m, 1e-15))
                    .map(|entries| BlockPart { block: k, entries })
            })
            .collect();
        a_red.push(parts);
    }
    StdForm {
        dims: dims.to_vec(),
        c: c_red,
        a: a_red,
        b: nb.transpose() * b,
    }
}

/// Solves `problem`. Model errors are returned as `Err`; solver outcomes,
/// including infeasibility, are reported through [`SdpSolution::status`].
pub fn solve(problem: &SdpProblem, config: &SolverConfig) -> Result<SdpSolution, SdpError> {
    config.validate()?;
    let low = match lower(problem)? {
        LowerOutcome::Ready(l) => l,
        LowerOutcome::Trivial(status) => return Ok(trivial_solution(problem, status)),
    };
    let const_shift = low.sign * problem.objective_constant;
    let out = ipm::run(&low.std, config, low.offset + const_shift);

    // y → u = u0 + N y over the kept columns.
    let mut reduced = DVector::zeros(
        low.null_basis
            .as_ref()
            .map_or(low.coords.len(), |n| n.ncols()),
    );
    for (yi, &col) in low.kept.iter().enumerate() {
        reduced[col] = out.y[yi];
    }
    let u = match &low.null_basis {
        Some(nb) => &low.u0 + nb * reduced,
        None => reduced,
    };
    let mut raw: Vec<CMatrix> = problem
        .variables
        .iter()
        .map(|v| CMatrix::zeros(v.dim, v.dim))
        .collect();
    for (ci, coord) in low.coords.iter().enumerate() {
        let m = &mut raw[coord.var];
        let val = u[ci];
        match coord.kind {
            CoordKind::Diag(i) => m[(i, i)] += c64(val, 0.0),
            CoordKind::Re(i, j) => {
                m[(i, j)] += c64(val, 0.0);
                m[(j, i)] += c64(val, 0.0);
            }
            CoordKind::Im(i, j) => {
                m[(i, j)] += c64(0.0, val);
                m[(j, i)] -= c64(0.0, val);
            }
        }
    }
    let values: Vec<HermitianMatrix> = raw.iter().map(HermitianMatrix::hermitian_part).collect();
    let multipliers: Vec<HermitianMatrix> = out.x.iter().map(|x| de_embed(x, low.field)).collect();

    let primal_value = problem.objective_value(&values);
    let upper = standard::blocks_dot(&low.std.c, &out.x);
    let dual_value = low.sign * (upper + low.offset) + problem.objective_constant;
    let assignments = problem
        .variables
        .iter()
        .zip(&values)
        .map(|(v, x)| (v.name.clone(), x.clone()))
        .collect();
    Ok(SdpSolution {
        status: out.status,
        primal_value,
        dual_value,
        gap: (primal_value - dual_value).abs(),
        assignments,
        values,
        multipliers,
        iterations: out.iterations,
        history: out.history,
    })
}

fn trivial_solution(problem: &SdpProblem, status: SolveStatus) -> SdpSolution {
    let values: Vec<HermitianMatrix> = problem
        .variables
        .iter()
        .map(|v| HermitianMatrix::zeros(v.dim))
        .collect();
    let multipliers = problem
        .all_inequalities()
        .iter()
        .map(|q| HermitianMatrix::zeros(q.dim))
        .collect();
    let (p, d) = match (status, problem.sense) {
        (SolveStatus::Unbounded, Sense::Maximize) | (SolveStatus::Infeasible, Sense::Minimize) => {
            (f64::INFINITY, f64::INFINITY)
        }
        _ => (f64::NEG_INFINITY, f64::NEG_INFINITY),
    };
    SdpSolution {
        status,
        primal_value: p,
        dual_value: d,
        gap: f64::NAN,
        assignments: problem
            .variables
            .iter()
            .zip(&values)
            .map(|(v, x)| (v.name.clone(), x.clone()))
            .collect(),
        values,
        multipliers,
        iterations: 0,
        history: Vec::new(),
    }
}

#[cfg(test)]
mod tests;
