//! Entanglement quantities of a bipartite state: logarithmic negativity, the
//! W family (primal, dual, E_W), the PPT distillation fidelity, the NPPT
//! witness bound and the one-copy deterministic distillation rate.
//!
//! SDP-backed measures take a [`SolverConfig`] and fail with
//! [`MeasureError::Solver`] unless the solver reports an optimal point.

use serde::Serialize;

use crate::error::MeasureError;
use crate::matrix::{
    echelon_basis, hermitian_eig, kernel_basis, negative_projector, op_norm, partial_transpose,
    support_basis, support_projector, BipartiteDims, BipartiteState, CMatrix, HermitianMatrix,
    RANK_TOL,
};
use crate::sdp::{
    solve, MatrixInequality, SdpProblem, SdpSolution, Sense, SolverConfig, Term, VarId, VarKind,
};

/// `λ_min(ρ^{T_B})` below this classifies a state as NPPT.
pub const NPPT_THRESHOLD: f64 = -1e-8;
/// Eigenvalues above `−EIGEN_NOISE` count as zero when classifying.
pub const EIGEN_NOISE: f64 = 1e-13;
/// Largest primal/dual disagreement tolerated by [`e_w`].
pub const W_CONSISTENCY_TOL: f64 = 1e-6;
/// Additivity tolerance used by [`multi_copy`] for E_W.
pub const ADDITIVITY_TOL: f64 = 1e-5;
/// Largest total dimension `(d_A·d_B)^n` accepted by [`multi_copy`].
pub const MULTI_COPY_CAP: usize = 81;
pub const MAX_COPIES: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PptClass {
    Ppt,
    /// `λ_min(ρ^{T_B})` lies in `[NPPT_THRESHOLD, −EIGEN_NOISE)`.
    Boundary,
    Npt,
}

impl PptClass {
    pub fn of(rho: &BipartiteState) -> Result<Self, MeasureError> {
        let lmin = rho.partial_transpose().min_eigenvalue()?;
        Ok(if lmin < NPPT_THRESHOLD {
            PptClass::Npt
        } else if lmin < -EIGEN_NOISE {
            PptClass::Boundary
        } else {
            PptClass::Ppt
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MeasureResult {
    /// Linear-scale quantity: ‖ρ^{T_B}‖₁, W, F_Γ, W₀, or `1/μ*` for the
    /// deterministic rate.
    pub value: f64,
    /// `log₂(value)` in ebits.
    pub value_log2: f64,
    /// Objective values of the two sides of the SDP (equal to `value` for
    /// closed forms).
    pub primal_value: f64,
    pub dual_value: f64,
    pub gap: f64,
    /// Optimal operator (R, Q or X) when the measure produces one.
    #[serde(skip)]
    pub witness: Option<HermitianMatrix>,
    pub iterations: usize,
    pub ppt: PptClass,
}

impl MeasureResult {
    fn closed_form(value: f64, ppt: PptClass) -> Self {
        Self {
            value,
            value_log2: value.log2(),
            primal_value: value,
            dual_value: value,
            gap: 0.0,
            witness: None,
            iterations: 0,
            ppt,
        }
    }
}

fn require_optimal(measure: &'static str, sol: &SdpSolution) -> Result<(), MeasureError> {
    if sol.is_optimal() {
        Ok(())
    } else {
        Err(MeasureError::Solver {
            measure,
            status: sol.status,
            gap: sol.gap,
            iterations: sol.iterations,
        })
    }
}

/// `E_N = log₂ ‖ρ^{T_B}‖₁`, by eigendecomposition.
pub fn log_negativity(rho: &BipartiteState) -> Result<MeasureResult, MeasureError> {
    let pt = rho.partial_transpose();
    let spec = hermitian_eig(&pt)?;
    let norm: f64 = spec.eigenvalues.iter().map(|x| x.abs()).sum();
    let ppt = PptClass::of(rho)?;
    // Rounding can push the norm of a PPT state a hair below one.
    Ok(MeasureResult::closed_form(norm.max(1.0), ppt))
}

/// `W(ρ) = max Re tr(ρ^{T_B} R)` over `−1 ⪯ R ⪯ 1`, `R^{T_B} ⪰ 0`.
pub fn w_primal(rho: &BipartiteState, cfg: &SolverConfig) -> Result<MeasureResult, MeasureError> {
    let n = rho.dim();
    let dims = rho.dims();
    let mut p = SdpProblem::new(Sense::Maximize);
    let r = p.add_variable("R", n, VarKind::Hermitian)?;
    p.add_objective(r, rho.partial_transpose())?;
    p.add_inequality(
        MatrixInequality::new("R<=1", n)
            .constant(HermitianMatrix::identity(n))
            .term(Term::new(r).scaled(-1.0)),
    )?;
    p.add_inequality(
        MatrixInequality::new("R>=-1", n)
            .constant(HermitianMatrix::identity(n))
            .term(Term::new(r)),
    )?;
    p.add_inequality(
        MatrixInequality::new("R^TB>=0", n).term(Term::new(r).partial_transpose(dims)),
    )?;
    let sol = solve(&p, cfg)?;
    require_optimal("w_primal", &sol)?;
    let value = sol.primal_value;
    Ok(MeasureResult {
        value,
        value_log2: value.log2(),
        primal_value: sol.primal_value,
        dual_value: sol.dual_value,
        gap: sol.gap,
        witness: Some(sol.value(r).clone()),
        iterations: sol.iterations,
        ppt: PptClass::of(rho)?,
    })
}

/// `min ‖X^{T_B}‖₁` over `X ⪰ ρ`, written as `min tr(U + V)` with
/// `U, V ⪰ 0` and `(U − V)^{T_B} ⪰ ρ`. The witness is `X = (U − V)^{T_B}`.
pub fn w_dual(rho: &BipartiteState, cfg: &SolverConfig) -> Result<MeasureResult, MeasureError> {
    let n = rho.dim();
    let dims = rho.dims();
    let mut p = SdpProblem::new(Sense::Minimize);
    let u = p.add_variable("U", n, VarKind::HermitianPsd)?;
    let v = p.add_variable("V", n, VarKind::HermitianPsd)?;
    p.add_objective(u, HermitianMatrix::identity(n))?;
    p.add_objective(v, HermitianMatrix::identity(n))?;
    p.add_inequality(
        MatrixInequality::new("X>=rho", n)
            .constant(rho.rho().scale(-1.0))
            .term(Term::new(u).partial_transpose(dims))
            .term(Term::new(v).scaled(-1.0).partial_transpose(dims)),
    )?;
    let sol = solve(&p, cfg)?;
    require_optimal("w_dual", &sol)?;
    let x = partial_transpose(&(sol.value(u) - sol.value(v)), dims)?;
    let value = sol.primal_value;
    Ok(MeasureResult {
        value,
        value_log2: value.log2(),
        primal_value: sol.primal_value,
        dual_value: sol.dual_value,
        gap: sol.gap,
        witness: Some(x),
        iterations: sol.iterations,
        ppt: PptClass::of(rho)?,
    })
}

/// `E_W = log₂ W`, from the midpoint of the max-form and min-form values.
///
/// `primal_value` and `dual_value` are the optima of [`w_primal`] and
/// [`w_dual`]; `gap` is their distance. The witness is the primal `R`.
pub fn e_w(rho: &BipartiteState, cfg: &SolverConfig) -> Result<MeasureResult, MeasureError> {
    let lo = w_primal(rho, cfg)?;
    let hi = w_dual(rho, cfg)?;
    let (primal, dual) = (lo.primal_value, hi.primal_value);
    if (primal - dual).abs() > W_CONSISTENCY_TOL * primal.abs().max(1.0) {
        return Err(MeasureError::Inconsistent { primal, dual });
    }
    let value = (0.5 * (primal + dual)).max(1.0);
    Ok(MeasureResult {
        value,
        value_log2: value.log2(),
        primal_value: primal,
        dual_value: dual,
        gap: (primal - dual).abs(),
        witness: lo.witness,
        iterations: lo.iterations + hi.iterations,
        ppt: lo.ppt,
    })
}

/// `F_Γ(ρ, k) = max Re tr(ρ Q)` over `0 ⪯ Q ⪯ 1`, `−1/k ⪯ Q^{T_B} ⪯ 1/k`.
pub fn fidelity_ppt(
    rho: &BipartiteState,
    k: f64,
    cfg: &SolverConfig,
) -> Result<MeasureResult, MeasureError> {
    if !(k >= 1.0 && k.is_finite()) {
        return Err(MeasureError::Domain(format!(
            "fidelity requires k >= 1, got {k}"
        )));
    }
    let n = rho.dim();
    let dims = rho.dims();
    let inv_k = HermitianMatrix::identity(n).scale(1.0 / k);
    let mut p = SdpProblem::new(Sense::Maximize);
    let q = p.add_variable("Q", n, VarKind::HermitianPsd)?;
    p.add_objective(q, rho.rho().clone())?;
    p.add_inequality(
        MatrixInequality::new("Q<=1", n)
            .constant(HermitianMatrix::identity(n))
            .term(Term::new(q).scaled(-1.0)),
    )?;
    p.add_inequality(
        MatrixInequality::new("Q^TB<=1/k", n)
            .constant(inv_k.clone())
            .term(Term::new(q).scaled(-1.0).partial_transpose(dims)),
    )?;
    p.add_inequality(
        MatrixInequality::new("Q^TB>=-1/k", n)
            .constant(inv_k)
            .term(Term::new(q).partial_transpose(dims)),
    )?;
    let sol = solve(&p, cfg)?;
    require_optimal("fidelity_ppt", &sol)?;
    let value = sol.midpoint().clamp(0.0, 1.0);
    Ok(MeasureResult {
        value,
        value_log2: value.log2(),
        primal_value: sol.primal_value,
        dual_value: sol.dual_value,
        gap: sol.gap,
        witness: Some(sol.value(q).clone()),
        iterations: sol.iterations,
        ppt: PptClass::of(rho)?,
    })
}

/// Explicit feasible point `R = 1 − P₋ / max(λ, 1/2)` of the W primal,
/// where `P₋` projects onto the negative eigenspace of `ρ^{T_B}` and
/// `λ = ‖P₋^{T_B}‖_∞`. Returns `(Re tr(ρ^{T_B} R), R)`, a lower bound on W.
pub fn npt_witness_bound(rho: &BipartiteState) -> Result<(f64, HermitianMatrix), MeasureError> {
    let n = rho.dim();
    let pt = rho.partial_transpose();
    let neg = negative_projector(&pt)?;
    let lambda = op_norm(&partial_transpose(&neg, rho.dims())?)?;
    let r = &HermitianMatrix::identity(n) - &neg.scale(1.0 / lambda.max(0.5));
    Ok((pt.inner(&r), r))
}

/// Operators `R` with `P ⪯ R ⪯ 1`, `P` the support projector of ρ, are
/// exactly `P + B T B†` with `0 ⪯ T ⪯ (B†B)⁻¹`, where `B` is the echelon
/// basis of `ker ρ`. The sparse basis keeps the lifted constraints sparse.
struct SupportFace {
    proj: HermitianMatrix,
    support: CMatrix,
    basis: CMatrix,
    /// `(B†B)^{-1/2}`.
    gram_inv_sqrt: CMatrix,
}

impl SupportFace {
    fn of(rho: &BipartiteState) -> Result<Self, MeasureError> {
        let basis = echelon_basis(&kernel_basis(rho, RANK_TOL)?);
        let gram = HermitianMatrix::hermitian_part(&(basis.adjoint() * &basis));
        let gram_inv_sqrt = if basis.ncols() == 0 {
            CMatrix::zeros(0, 0)
        } else {
            hermitian_eig(&gram)?
                .reconstruct_with(|x| x.powf(-0.5))
                .into_matrix()
        };
        Ok(Self {
            proj: support_projector(rho, RANK_TOL)?,
            support: support_basis(rho, RANK_TOL)?,
            basis,
            gram_inv_sqrt,
        })
    }

    fn kernel_dim(&self) -> usize {
        self.basis.ncols()
    }

    /// `T ↦ (B T B†)^{T_B}`.
    fn lifted(&self, t: VarId, dims: BipartiteDims) -> Term {
        Term::new(t)
            .congruence(self.basis.clone())
            .partial_transpose(dims)
    }

    /// `x ↦ x · (B†B)⁻¹` for a 1×1 variable.
    fn scaled_gram_inverse(&self, x: VarId) -> Term {
        Term::new(x)
            .trace_with(HermitianMatrix::identity(1), self.kernel_dim())
            .congruence(self.gram_inv_sqrt.clone())
    }

    fn operator(&self, weight: f64, t: Option<&HermitianMatrix>) -> HermitianMatrix {
        let base = self.proj.scale(weight);
        match t {
            Some(t) => &base + &t.congruence(&self.basis),
            None => base,
        }
    }
}

/// One-copy PPT deterministic distillation rate
/// `max −log₂ ‖R^{T_B}‖_∞` over `P ⪯ R ⪯ 1`, with `P` the support projector.
///
/// Solved as `min μ` subject to `−μ ⪯ R^{T_B} ⪯ μ` over the strictly
/// feasible parametrization of [`SupportFace`]. `value` is `1/μ*` and the
/// witness is the optimal `R`.
pub fn det_distill_one_copy(
    rho: &BipartiteState,
    cfg: &SolverConfig,
) -> Result<MeasureResult, MeasureError> {
    let n = rho.dim();
    let dims = rho.dims();
    let ppt = PptClass::of(rho)?;
    let face = SupportFace::of(rho)?;
    let k = face.kernel_dim();
    if k == 0 {
        // Full support forces R = 1.
        let mut out = MeasureResult::closed_form(1.0, ppt);
        out.witness = Some(face.proj);
        return Ok(out);
    }
    let pt = partial_transpose(&face.proj, dims)?;
    let gram_inv = HermitianMatrix::hermitian_part(&(&face.gram_inv_sqrt * &face.gram_inv_sqrt));
    let mut p = SdpProblem::new(Sense::Minimize);
    let t = p.add_variable("T", k, VarKind::HermitianPsd)?;
    let mu = p.add_variable("mu", 1, VarKind::Hermitian)?;
    p.add_objective(mu, HermitianMatrix::identity(1))?;
    p.add_inequality(
        MatrixInequality::new("R<=1", k)
            .constant(gram_inv)
            .term(Term::new(t).scaled(-1.0)),
    )?;
    let mu_one = || Term::new(mu).trace_with(HermitianMatrix::identity(1), n);
    p.add_inequality(
        MatrixInequality::new("R^TB<=mu", n)
            .constant(pt.scale(-1.0))
            .term(mu_one())
            .term(face.lifted(t, dims).scaled(-1.0)),
    )?;
    p.add_inequality(
        MatrixInequality::new("R^TB>=-mu", n)
            .constant(pt)
            .term(mu_one())
            .term(face.lifted(t, dims)),
    )?;
    let sol = solve(&p, cfg)?;
    require_optimal("det_distill_one_copy", &sol)?;
    let mu_star = sol.midpoint().min(1.0);
    Ok(MeasureResult {
        value: 1.0 / mu_star,
        value_log2: -mu_star.log2(),
        primal_value: sol.primal_value,
        dual_value: sol.dual_value,
        gap: sol.gap,
        witness: Some(face.operator(1.0, Some(sol.value(t)))),
        iterations: sol.iterations,
        ppt,
    })
}

/// `W₀(ρ) = max Re tr(ρ R)` over `0 ⪯ R ⪯ tr(ρR)·1`, `−1 ⪯ R^{T_B} ⪯ 1`.
///
/// The feasible set has no interior point (`R ⪯ tr(ρR)·1` is tight on the
/// support of ρ), so the solver works on its minimal face
/// `R = s·P + B T B†` with `0 ⪯ T ⪯ s·(B†B)⁻¹`, where `s = tr(ρR)`. See
/// [`w0_literal`] for the problem as stated.
pub fn w0(rho: &BipartiteState, cfg: &SolverConfig) -> Result<MeasureResult, MeasureError> {
    let n = rho.dim();
    let dims = rho.dims();
    let ppt = PptClass::of(rho)?;
    let face = SupportFace::of(rho)?;
    let k = face.kernel_dim();

    let mut p = SdpProblem::new(Sense::Maximize);
    let s = p.add_variable("s", 1, VarKind::HermitianPsd)?;
    p.add_objective(s, HermitianMatrix::identity(1))?;
    // s·P^{T_B} as the image of s under s ↦ (S (s·1) S†)^{T_B}.
    let s_proj = || {
        Term::new(s)
            .trace_with(HermitianMatrix::identity(1), face.support.ncols())
            .congruence(face.support.clone())
            .partial_transpose(dims)
    };
    let mut upper = MatrixInequality::new("R^TB<=1", n)
        .constant(HermitianMatrix::identity(n))
        .term(s_proj().scaled(-1.0));
    let mut lower = MatrixInequality::new("R^TB>=-1", n)
        .constant(HermitianMatrix::identity(n))
        .term(s_proj());
    let mut t = None;
    if k > 0 {
        let tv = p.add_variable("T", k, VarKind::HermitianPsd)?;
        p.add_inequality(
            MatrixInequality::new("R<=tr(rho R)", k)
                .term(face.scaled_gram_inverse(s))
                .term(Term::new(tv).scaled(-1.0)),
        )?;
        upper = upper.term(face.lifted(tv, dims).scaled(-1.0));
        lower = lower.term(face.lifted(tv, dims));
        t = Some(tv);
    }
    p.add_inequality(upper)?;
    p.add_inequality(lower)?;
    let sol = solve(&p, cfg)?;
    require_optimal("w0", &sol)?;
    let s_val = sol.value(s).get(0, 0).re;
    let value = sol.midpoint().max(1.0);
    Ok(MeasureResult {
        value,
        value_log2: value.log2(),
        primal_value: sol.primal_value,
        dual_value: sol.dual_value,
        gap: sol.gap,
        witness: Some(face.operator(s_val, t.map(|tv| sol.value(tv)))),
        iterations: sol.iterations,
        ppt,
    })
}

/// [`w0`] exactly as stated, on the full operator `R`. Without a strictly
/// feasible point the interior-point iterates may stall short of the gap
/// tolerance, in which case this reports the solver status as an error.
pub fn w0_literal(rho: &BipartiteState, cfg: &SolverConfig) -> Result<MeasureResult, MeasureError> {
    let n = rho.dim();
    let dims = rho.dims();
    let mut p = SdpProblem::new(Sense::Maximize);
    let r = p.add_variable("R", n, VarKind::HermitianPsd)?;
    p.add_objective(r, rho.rho().clone())?;
    p.add_inequality(
        MatrixInequality::new("R<=tr(rho R)", n)
            .term(Term::new(r).trace_with(rho.rho().clone(), n))
            .term(Term::new(r).scaled(-1.0)),
    )?;
    p.add_inequality(
        MatrixInequality::new("R^TB<=1", n)
            .constant(HermitianMatrix::identity(n))
            .term(Term::new(r).scaled(-1.0).partial_transpose(dims)),
    )?;
    p.add_inequality(
        MatrixInequality::new("R^TB>=-1", n)
            .constant(HermitianMatrix::identity(n))
            .term(Term::new(r).partial_transpose(dims)),
    )?;
    let sol = solve(&p, cfg)?;
    require_optimal("w0_literal", &sol)?;
    let value = sol.midpoint();
    Ok(MeasureResult {
        value,
        value_log2: value.log2(),
        primal_value: sol.primal_value,
        dual_value: sol.dual_value,
        gap: sol.gap,
        witness: Some(sol.value(r).clone()),
        iterations: sol.iterations,
        ppt: PptClass::of(rho)?,
    })
}

/// Measures that [`multi_copy`] can evaluate on a tensor power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Measure {
    LogNegativity,
    EW,
    FidelityPpt(f64),
    DetDistill,
    W0,
}

impl Measure {
    pub fn evaluate(
        self,
        rho: &BipartiteState,
        cfg: &SolverConfig,
    ) -> Result<MeasureResult, MeasureError> {
        match self {
            Measure::LogNegativity => log_negativity(rho),
            Measure::EW => e_w(rho, cfg),
            Measure::FidelityPpt(k) => fidelity_ppt(rho, k, cfg),
            Measure::DetDistill => det_distill_one_copy(rho, cfg),
            Measure::W0 => w0(rho, cfg),
        }
    }
}

/// `ρ^{⊗n}` with subsystems regrouped as `(A₁…A_n)(B₁…B_n)`.
pub fn tensor_power(rho: &BipartiteState, n: usize) -> Result<BipartiteState, MeasureError> {
    if !(1..=MAX_COPIES).contains(&n) {
        return Err(MeasureError::Domain(format!(
            "copies must lie in 1..={MAX_COPIES}, got {n}"
        )));
    }
    let dim = rho.dim();
    let total = dim.checked_pow(n as u32).unwrap_or(usize::MAX);
    if total > MULTI_COPY_CAP {
        return Err(MeasureError::Capacity {
            dim,
            copies: n,
            cap: MULTI_COPY_CAP,
        });
    }
    let mut out = rho.clone();
    for _ in 1..n {
        out = out.tensor(rho);
    }
    Ok(out)
}

/// Evaluates `measure` on `ρ^{⊗n}`. For E_W the result is also checked
/// against `n · E_W(ρ)`.
pub fn multi_copy(
    measure: Measure,
    rho: &BipartiteState,
    n: usize,
    cfg: &SolverConfig,
) -> Result<MeasureResult, MeasureError> {
    let power = tensor_power(rho, n)?;
    let joint = measure.evaluate(&power, cfg)?;
    if measure == Measure::EW && n > 1 {
        let single = e_w(rho, cfg)?.value_log2;
        if (joint.value_log2 - n as f64 * single).abs() > ADDITIVITY_TOL {
            return Err(MeasureError::NotAdditive {
                joint: joint.value_log2,
                single,
                copies: n,
            });
        }
    }
    Ok(joint)
}
