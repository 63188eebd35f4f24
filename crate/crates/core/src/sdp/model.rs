//! Declarative SDP modeling with Hermitian matrix variables.
//!
//! A problem is a real-linear objective `Σ Re tr(C_v X_v) + c₀` together with
//! affine matrix inequalities `D + Σ terms ⪰ 0` and scalar equalities
//! `Σ Re tr(A_v X_v) = g`. Every term is a variable pushed through a chain of
//! Hermiticity-preserving linear maps.

use std::collections::HashSet;
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::SdpError;
use crate::matrix::{partial_transpose_raw, BipartiteDims, CMatrix, HermitianMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub(crate) usize);

impl VarId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Hermitian,
    HermitianPsd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone)]
pub struct Variable {
    pub name: String,
    pub dim: usize,
    pub kind: VarKind,
}

/// One stage of a linear map applied to a variable.
#[derive(Debug, Clone)]
pub enum MapOp {
    /// `X ↦ X^{T_B}`.
    PartialTranspose(BipartiteDims),
    /// `X ↦ V X V†` with `V` of shape `out × in`.
    Congruence(CMatrix),
    /// `X ↦ Re tr(W X) · 1_out`.
    TraceWith {
        weight: HermitianMatrix,
        out_dim: usize,
    },
}

impl MapOp {
    fn out_dim(&self, in_dim: usize) -> Result<usize, SdpError> {
        match self {
            MapOp::PartialTranspose(dims) => {
                if dims.total() != in_dim {
                    return Err(SdpError::Model(format!(
                        "partial transpose over {dims} applied to dimension {in_dim}"
                    )));
                }
                Ok(in_dim)
            }
            MapOp::Congruence(v) => {
                if v.ncols() != in_dim {
                    return Err(SdpError::Model(format!(
                        "congruence with {}x{} factor applied to dimension {in_dim}",
                        v.nrows(),
                        v.ncols()
                    )));
                }
                Ok(v.nrows())
            }
            MapOp::TraceWith { weight, out_dim } => {
                if weight.dim() != in_dim {
                    return Err(SdpError::Model(format!(
                        "trace weight of dimension {} applied to dimension {in_dim}",
                        weight.dim()
                    )));
                }
                Ok(*out_dim)
            }
        }
    }

    fn apply(&self, x: &CMatrix) -> CMatrix {
        match self {
            MapOp::PartialTranspose(dims) => partial_transpose_raw(x, *dims),
            MapOp::Congruence(v) => congruence_apply(v, x),
            MapOp::TraceWith { weight, out_dim } => {
                let h = HermitianMatrix::hermitian_part(x);
                let t = weight.inner(&h);
                CMatrix::identity(*out_dim, *out_dim).map(|z| z * t)
            }
        }
    }

    /// Adjoint with respect to `⟨A, B⟩ = Re tr(A B)`.
    fn adjoint(&self, y: &CMatrix) -> CMatrix {
        match self {
            MapOp::PartialTranspose(dims) => partial_transpose_raw(y, *dims),
            MapOp::Congruence(v) => v.adjoint() * y * v,
            MapOp::TraceWith { weight, .. } => {
                let t: f64 = (0..y.nrows()).map(|i| y[(i, i)].re).sum();
                weight.as_matrix().map(|z| z * t)
            }
        }
    }

    fn is_real(&self) -> bool {
        match self {
            MapOp::PartialTranspose(_) => true,
            MapOp::Congruence(v) => v.iter().all(|z| z.im == 0.0),
            MapOp::TraceWith { weight, .. } => weight.is_real(0.0),
        }
    }

    fn describe(&self) -> String {
        match self {
            MapOp::PartialTranspose(d) => format!("T_B[{d}]"),
            MapOp::Congruence(v) => format!("V·V†[{}x{}]", v.nrows(), v.ncols()),
            MapOp::TraceWith { weight, out_dim } => {
                format!("tr(W·)1[{}→{}]", weight.dim(), out_dim)
            }
        }
    }
}

/// `V X V†`, summing sparse outer products when `X` has few nonzeros
/// (the lowering applies maps to single basis matrices).
fn congruence_apply(v: &CMatrix, x: &CMatrix) -> CMatrix {
    let zero = Complex64::new(0.0, 0.0);
    let nnz: Vec<(usize, usize)> = (0..x.ncols())
        .flat_map(|j| (0..x.nrows()).map(move |i| (i, j)))
        .filter(|&(i, j)| x[(i, j)] != zero)
        .collect();
    if nnz.len() > x.nrows() {
        return v * x * v.adjoint();
    }
    let support =
        |j: usize| -> Vec<usize> { (0..v.nrows()).filter(|&p| v[(p, j)] != zero).collect() };
    let n = v.nrows();
    let mut out = CMatrix::zeros(n, n);
    for (i, j) in nnz {
        let w = x[(i, j)];
        let (rows, cols) = (support(i), support(j));
        for &q in &cols {
            let right = w * v[(q, j)].conj();
            for &p in &rows {
                out[(p, q)] += v[(p, i)] * right;
            }
        }
    }
    out
}

/// `coef · (op_k ∘ … ∘ op_1)(X_var)`.
#[derive(Debug, Clone)]
pub struct Term {
    pub var: VarId,
    pub coef: f64,
    pub ops: Vec<MapOp>,
}

impl Term {
    pub fn new(var: VarId) -> Self {
        Self {
            var,
            coef: 1.0,
            ops: Vec::new(),
        }
    }

    pub fn scaled(mut self, s: f64) -> Self {
        self.coef *= s;
        self
    }

    pub fn partial_transpose(mut self, dims: BipartiteDims) -> Self {
        self.ops.push(MapOp::PartialTranspose(dims));
        self
    }

    pub fn congruence(mut self, v: CMatrix) -> Self {
        self.ops.push(MapOp::Congruence(v));
        self
    }

    pub fn trace_with(mut self, weight: HermitianMatrix, out_dim: usize) -> Self {
        self.ops.push(MapOp::TraceWith { weight, out_dim });
        self
    }

    pub(crate) fn out_dim(&self, in_dim: usize) -> Result<usize, SdpError> {
        self.ops.iter().try_fold(in_dim, |d, op| op.out_dim(d))
    }

    pub(crate) fn apply_raw(&self, x: &CMatrix) -> CMatrix {
        let mut cur = self.ops.iter().fold(x.clone(), |acc, op| op.apply(&acc));
        cur.iter_mut().for_each(|z| *z *= self.coef);
        cur
    }

    pub fn apply(&self, x: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix::hermitian_part(&self.apply_raw(x.as_matrix()))
    }

    pub fn adjoint(&self, y: &HermitianMatrix) -> HermitianMatrix {
        let mut cur = self
            .ops
            .iter()
            .rev()
            .fold(y.as_matrix().clone(), |acc, op| op.adjoint(&acc));
        cur.iter_mut().for_each(|z| *z *= self.coef);
        HermitianMatrix::hermitian_part(&cur)
    }

    pub(crate) fn is_real(&self) -> bool {
        self.ops.iter().all(MapOp::is_real)
    }
}

/// `constant + Σ terms ⪰ 0`.
#[derive(Debug, Clone)]
pub struct MatrixInequality {
    pub label: String,
    pub dim: usize,
    pub constant: HermitianMatrix,
    pub terms: Vec<Term>,
}

impl MatrixInequality {
    pub fn new(label: impl Into<String>, dim: usize) -> Self {
        Self {
            label: label.into(),
            dim,
            constant: HermitianMatrix::zeros(dim),
            terms: Vec::new(),
        }
    }

    pub fn constant(mut self, c: HermitianMatrix) -> Self {
        self.constant = c;
        self
    }

    pub fn term(mut self, t: Term) -> Self {
        self.terms.push(t);
        self
    }

    pub fn evaluate(&self, values: &[HermitianMatrix]) -> HermitianMatrix {
        let mut acc = self.constant.as_matrix().clone();
        for t in &self.terms {
            acc += t.apply_raw(values[t.var.0].as_matrix());
        }
        HermitianMatrix::hermitian_part(&acc)
    }
}

/// `Σ Re tr(A_v X_v) = rhs`.
#[derive(Debug, Clone)]
pub struct ScalarEquality {
    pub label: String,
    pub terms: Vec<(VarId, HermitianMatrix)>,
    pub rhs: f64,
}

impl ScalarEquality {
    pub fn new(label: impl Into<String>, rhs: f64) -> Self {
        Self {
            label: label.into(),
            terms: Vec::new(),
            rhs,
        }
    }

    pub fn term(mut self, var: VarId, coef: HermitianMatrix) -> Self {
        self.terms.push((var, coef));
        self
    }

    pub fn lhs(&self, values: &[HermitianMatrix]) -> f64 {
        self.terms.iter().map(|(v, a)| a.inner(&values[v.0])).sum()
    }
}

#[derive(Debug, Clone)]
pub struct SdpProblem {
    pub sense: Sense,
    pub variables: Vec<Variable>,
    pub objective: Vec<(VarId, HermitianMatrix)>,
    pub objective_constant: f64,
    pub inequalities: Vec<MatrixInequality>,
    pub equalities: Vec<ScalarEquality>,
}

impl SdpProblem {
    pub fn new(sense: Sense) -> Self {
        Self {
            sense,
            variables: Vec::new(),
            objective: Vec::new(),
            objective_constant: 0.0,
            inequalities: Vec::new(),
            equalities: Vec::new(),
        }
    }

    pub fn add_variable(
        &mut self,
        name: impl Into<String>,
        dim: usize,
        kind: VarKind,
    ) -> Result<VarId, SdpError> {
        let name = name.into();
        if dim == 0 {
            return Err(SdpError::Model(format!("variable {name} has dimension 0")));
        }
        if self.variables.iter().any(|v| v.name == name) {
            return Err(SdpError::Model(format!("duplicate variable name {name}")));
        }
        self.variables.push(Variable { name, dim, kind });
        Ok(VarId(self.variables.len() - 1))
    }

    pub fn variable(&self, id: VarId) -> &Variable {
        &self.variables[id.0]
    }

    pub fn var_by_name(&self, name: &str) -> Option<VarId> {
        self.variables
            .iter()
            .position(|v| v.name == name)
            .map(VarId)
    }

    fn check_var(&self, id: VarId) -> Result<&Variable, SdpError> {
        self.variables
            .get(id.0)
            .ok_or_else(|| SdpError::Model(format!("unknown variable id {}", id.0)))
    }

    /// Adds `Re tr(coef · X_var)` to the objective.
    pub fn add_objective(&mut self, var: VarId, coef: HermitianMatrix) -> Result<(), SdpError> {
        let v = self.check_var(var)?;
        if v.dim != coef.dim() {
            return Err(SdpError::Model(format!(
                "objective coefficient of dimension {} for variable {} of dimension {}",
                coef.dim(),
                v.name,
                v.dim
            )));
        }
        self.objective.push((var, coef));
        Ok(())
    }

    pub fn set_objective_constant(&mut self, c: f64) {
        self.objective_constant = c;
    }

    pub fn add_inequality(&mut self, ineq: MatrixInequality) -> Result<usize, SdpError> {
        if ineq.constant.dim() != ineq.dim {
            return Err(SdpError::Model(format!(
                "constraint {}: constant of dimension {} in a {}-dimensional inequality",
                ineq.label,
                ineq.constant.dim(),
                ineq.dim
            )));
        }
        for t in &ineq.terms {
            let v = self.check_var(t.var)?;
            let out = t.out_dim(v.dim)?;
            if out != ineq.dim {
                return Err(SdpError::Model(format!(
                    "constraint {}: term in {} has dimension {out}, expected {}",
                    ineq.label, v.name, ineq.dim
                )));
            }
        }
        self.inequalities.push(ineq);
        Ok(self.inequalities.len() - 1)
    }

    pub fn add_equality(&mut self, eq: ScalarEquality) -> Result<usize, SdpError> {
        for (var, a) in &eq.terms {
            let v = self.check_var(*var)?;
            if v.dim != a.dim() {
                return Err(SdpError::Model(format!(
                    "equality {}: coefficient of dimension {} for variable {}",
                    eq.label,
                    a.dim(),
                    v.name
                )));
            }
        }
        self.equalities.push(eq);
        Ok(self.equalities.len() - 1)
    }

    pub fn objective_value(&self, values: &[HermitianMatrix]) -> f64 {
        self.objective_constant
            + self
                .objective
                .iter()
                .map(|(v, c)| c.inner(&values[v.0]))
                .sum::<f64>()
    }

    /// Matrix inequalities including the implicit `X ⪰ 0` of PSD variables,
    /// in the order the solver sees them: explicit ones first.
    pub(crate) fn all_inequalities(&self) -> Vec<MatrixInequality> {
        let mut out = self.inequalities.clone();
        for (i, v) in self.variables.iter().enumerate() {
            if v.kind == VarKind::HermitianPsd {
                out.push(
                    MatrixInequality::new(format!("psd:{}", v.name), v.dim)
                        .term(Term::new(VarId(i))),
                );
            }
        }
        out
    }

    /// True when all problem data are real, in which case a real symmetric
    /// optimum exists and the solver can skip the complex embedding.
    pub(crate) fn is_real(&self) -> bool {
        self.objective.iter().all(|(_, c)| c.is_real(0.0))
            && self
                .inequalities
                .iter()
                .all(|c| c.constant.is_real(0.0) && c.terms.iter().all(Term::is_real))
            && self
                .equalities
                .iter()
                .all(|e| e.terms.iter().all(|(_, a)| a.is_real(0.0)))
    }

    pub(crate) fn validate(&self) -> Result<(), SdpError> {
        let mut seen = HashSet::new();
        for v in &self.variables {
            if !seen.insert(v.name.as_str()) {
                return Err(SdpError::Model(format!(
                    "duplicate variable name {}",
                    v.name
                )));
            }
        }
        if self.variables.is_empty() {
            return Err(SdpError::Model("problem has no variables".into()));
        }
        Ok(())
    }

    /// Human-readable summary for bug reports. Not a stable format.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        let sense = match self.sense {
            Sense::Maximize => "maximize",
            Sense::Minimize => "minimize",
        };
        let _ = writeln!(s, "sdp {sense}");
        for v in &self.variables {
            let kind = match v.kind {
                VarKind::Hermitian => "hermitian",
                VarKind::HermitianPsd => "hermitian-psd",
            };
            let _ = writeln!(s, "  var {} dim={} kind={kind}", v.name, v.dim);
        }
        let _ = write!(s, "  objective const={:.6e}", self.objective_constant);
        for (var, c) in &self.objective {
            let _ = write!(s, " + tr(C[{}]·{})", c.dim(), self.variables[var.0].name);
        }
        let _ = writeln!(s);
        for c in &self.inequalities {
            let _ = write!(
                s,
                "  ineq {} dim={} const_norm={:.6e}",
                c.label,
                c.dim,
                c.constant.frobenius_norm()
            );
            for t in &c.terms {
                let chain: Vec<String> = t.ops.iter().map(MapOp::describe).collect();
                let _ = write!(
                    s,
                    " + {:.6e}*{}({})",
                    t.coef,
                    chain.join("∘"),
                    self.variables[t.var.0].name
                );
            }
            let _ = writeln!(s, " >= 0");
        }
        for e in &self.equalities {
            let names: Vec<&str> = e
                .terms
                .iter()
                .map(|(v, _)| self.variables[v.0].name.as_str())
                .collect();
            let _ = writeln!(
                s,
                "  eq {} vars=[{}] rhs={:.6e}",
                e.label,
                names.join(","),
                e.rhs
            );
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::c64;

    #[test]
    fn term_adjoint_matches_forward_map() {
        let dims = BipartiteDims::new(2, 2).unwrap();
        let v = CMatrix::from_fn(4, 3, |i, j| {
            c64((i + 2 * j) as f64 * 0.1, (i as f64 - j as f64) * 0.2)
        });
        let x = HermitianMatrix::hermitian_part(&CMatrix::from_fn(3, 3, |i, j| {
            c64((i * j) as f64, i as f64 - j as f64)
        }));
        let y = HermitianMatrix::hermitian_part(&CMatrix::from_fn(4, 4, |i, j| {
            c64(1.0 / (1 + i + j) as f64, (i as f64) * 0.3 - j as f64)
        }));
        let t = Term::new(VarId(0))
            .congruence(v)
            .partial_transpose(dims)
            .scaled(-2.5);
        let lhs = t.apply(&x).inner(&y);
        let rhs = x.inner(&t.adjoint(&y));
        assert!((lhs - rhs).abs() < 1e-12);

        let w = HermitianMatrix::from_diagonal(&[1.0, 2.0, 3.0]);
        let t = Term::new(VarId(0)).trace_with(w, 4);
        assert!((t.apply(&x).inner(&y) - x.inner(&t.adjoint(&y))).abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let mut p = SdpProblem::new(Sense::Maximize);
        let r = p.add_variable("R", 4, VarKind::Hermitian).unwrap();
        let bad = MatrixInequality::new("bad", 3).term(Term::new(r));
        assert!(p.add_inequality(bad).is_err());
        let bad_pt = MatrixInequality::new("pt", 4)
            .term(Term::new(r).partial_transpose(BipartiteDims::new(2, 3).unwrap()));
        assert!(p.add_inequality(bad_pt).is_err());
        assert!(p.add_variable("R", 2, VarKind::Hermitian).is_err());
        assert!(p.add_objective(r, HermitianMatrix::identity(2)).is_err());
    }

    #[test]
    fn dump_lists_everything() {
        let mut p = SdpProblem::new(Sense::Minimize);
        let t = p.add_variable("t", 1, VarKind::Hermitian).unwrap();
        p.add_objective(t, HermitianMatrix::identity(1)).unwrap();
        p.add_inequality(
            MatrixInequality::new("lower", 1)
                .constant(HermitianMatrix::identity(1).scale(-1.0))
                .term(Term::new(t)),
        )
        .unwrap();
        let d = p.dump();
        assert!(d.contains("minimize"));
        assert!(d.contains("var t dim=1"));
        assert!(d.contains("ineq lower"));
    }
}
