//! Infeasible primal-dual path-following method with the HKM search
//! direction and Mehrotra predictor-corrector steps.

use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::cholesky::llt;
use faer::{Conj, Mat, Par};
use nalgebra::{Cholesky, DMatrix, DVector};

use super::standard::{blocks_dot, blocks_norm, symmetrize, Entries, StdForm};
use super::{SolveStatus, SolverConfig};

/// Progress record of one iteration, in standard-form quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterateLog {
    /// `⟨C, X⟩` (the upper bound side for the maximization form).
    pub upper: f64,
    /// `bᵀy` (the objective of the inequality-form problem).
    pub lower: f64,
    /// `‖b − A(X)‖₂`.
    pub multiplier_residual: f64,
    /// `‖C − S − Aᵀy‖_F`.
    pub lmi_residual: f64,
    /// `‖X‖_F + ‖y‖₂`, used to scale weak-duality slack.
    pub scale: f64,
    pub complementarity: f64,
}

pub(crate) struct IpmOutput {
    pub status: SolveStatus,
    pub y: DVector<f64>,
    pub x: Vec<DMatrix<f64>>,
    pub iterations: usize,
    pub history: Vec<IterateLog>,
}

const INFEAS_RATIO: f64 = 1e-8;
const INFEAS_MAGNITUDE: f64 = 1e6;

struct Iterate {
    x: Vec<DMatrix<f64>>,
    s: Vec<DMatrix<f64>>,
    y: DVector<f64>,
}

pub(crate) fn run(sf: &StdForm, cfg: &SolverConfig, offset: f64) -> IpmOutput {
    let m = sf.num_constraints();
    let total_dim: usize = sf.dims.iter().sum();
    let by_block = sf.block_index();
    let b_norm = sf.b.norm();

    let mut it = initial_point(sf, &by_block);
    let mut history = Vec::new();
    let mut stalls = 0usize;
    let mut gamma: f64 = 0.9;

    for iter in 0..cfg.max_iterations {
        let ax = sf.apply(&it.x);
        let rp = &sf.b - &ax;
        let aty = sf.apply_adjoint(&it.y);
        let rd: Vec<DMatrix<f64>> = (0..sf.dims.len())
            .map(|k| &sf.c[k] - &it.s[k] - &aty[k])
            .collect();
        let upper = blocks_dot(&sf.c, &it.x);
        let lower = sf.b.dot(&it.y);
        let xs = blocks_dot(&it.x, &it.s);
        let pinf = rp.norm();
        let dinf = blocks_norm(&rd);
        history.push(IterateLog {
            upper,
            lower,
            multiplier_residual: pinf,
            lmi_residual: dinf,
            scale: blocks_norm(&it.x) + it.y.norm(),
            complementarity: xs,
        });

        let scale = (lower + offset).abs().max(1.0);
        let converged = (upper - lower).abs() <= cfg.gap_tol * scale
            && xs <= cfg.gap_tol * scale
            && pinf <= cfg.feas_tol * (1.0 + b_norm)
            && dinf <= cfg.feas_tol;
        if converged {
            return finish(SolveStatus::Optimal, it, iter, history);
        }

        // Certificates of infeasibility along diverging iterates.
        if lower > 0.0 && it.y.amax() > INFEAS_MAGNITUDE {
            let ray: Vec<DMatrix<f64>> = (0..sf.dims.len()).map(|k| &aty[k] + &it.s[k]).collect();
            if blocks_norm(&ray) / lower < INFEAS_RATIO {
                return finish(SolveStatus::Unbounded, it, iter, history);
            }
        }
        let xtrace: f64 = it.x.iter().map(|x| x.trace()).sum();
        if upper < 0.0 && xtrace > INFEAS_MAGNITUDE && ax.norm() / (-upper) < INFEAS_RATIO {
            return finish(SolveStatus::Infeasible, it, iter, history);
        }

        let mu = xs / total_dim as f64;
        let sinv: Vec<DMatrix<f64>> = match it.s.iter().map(inverse_spd).collect::<Option<Vec<_>>>()
        {
            Some(v) => v,
            None => return finish(SolveStatus::NumericFailure, it, iter, history),
        };

        let schur = schur_complement(sf, &by_block, &it.x, &sinv, m);
        let chol = match factor(schur) {
            Some(c) => c,
            None => return finish(SolveStatus::NumericFailure, it, iter, history),
        };

        // X·R_d·S⁻¹ is shared by predictor and corrector.
        let x_rd_sinv: Vec<DMatrix<f64>> = (0..sf.dims.len())
            .map(|k| &it.x[k] * &rd[k] * &sinv[k])
            .collect();
        let a_sinv = sf.apply(&sinv);
        let a_x_rd_sinv = sf.apply(&x_rd_sinv);

        // Predictor (σ = 0).
        let (dx_a, ds_a, _) =
            direction(sf, &chol, &it, &rd, &sinv, &a_sinv, &a_x_rd_sinv, 0.0, None);
        let ap = max_step(&it.x, &dx_a).min(1.0);
        let ad = max_step(&it.s, &ds_a).min(1.0);
        let mut xs_aff = 0.0;
        for k in 0..sf.dims.len() {
            xs_aff += (&it.x[k] + &dx_a[k] * ap).dot(&(&it.s[k] + &ds_a[k] * ad));
        }
        let mu_aff = (xs_aff / total_dim as f64).max(0.0);
        let sigma = if mu > 0.0 {
            (mu_aff / mu).powi(3).clamp(0.0, 1.0)
        } else {
            0.0
        };

        // Corrector with the second-order term ΔX_aff·ΔS_aff.
        let corr: Vec<DMatrix<f64>> = (0..sf.dims.len()).map(|k| &dx_a[k] * &ds_a[k]).collect();
        let (dx, ds, dy) = direction(
            sf,
            &chol,
            &it,
            &rd,
            &sinv,
            &a_sinv,
            &a_x_rd_sinv,
            sigma * mu,
            Some(&corr),
        );

        let ap = (gamma * max_step(&it.x, &dx)).min(1.0);
        let ad = (gamma * max_step(&it.s, &ds)).min(1.0);
        for k in 0..sf.dims.len() {
            it.x[k] += &dx[k] * ap;
            it.s[k] += &ds[k] * ad;
            symmetrize(&mut it.x[k]);
            symmetrize(&mut it.s[k]);
        }
        it.y += &dy * ad;
        gamma = 0.9 + 0.09 * ap.min(ad);

        if ap < 1e-10 && ad < 1e-10 {
            stalls += 1;
            if stalls >= 5 {
                return finish(SolveStatus::NumericFailure, it, iter + 1, history);
            }
        } else {
            stalls = 0;
        }
    }
    let n = cfg.max_iterations;
    finish(SolveStatus::NumericFailure, it, n, history)
}

fn finish(
    status: SolveStatus,
    it: Iterate,
    iterations: usize,
    history: Vec<IterateLog>,
) -> IpmOutput {
    IpmOutput {
        status,
        y: it.y,
        x: it.x,
        iterations,
        history,
    }
}

fn initial_point(sf: &StdForm, by_block: &[Vec<(usize, usize)>]) -> Iterate {
    let nblocks = sf.dims.len();
    let mut x = Vec::with_capacity(nblocks);
    let mut s = Vec::with_capacity(nblocks);
    for k in 0..nblocks {
        let n = sf.dims[k] as f64;
        let mut xi = 10.0_f64.max(n.sqrt());
        let mut eta = 10.0_f64.max(n.sqrt()).max(sf.c[k].norm());
        for &(i, pi) in &by_block[k] {
            let an = sf.a[i][pi].entries.norm_sqr().sqrt();
            xi = xi.max(n * (1.0 + sf.b[i].abs()) / (1.0 + an));
            eta = eta.max(an);
        }
        x.push(DMatrix::identity(sf.dims[k], sf.dims[k]) * xi);
        s.push(DMatrix::identity(sf.dims[k], sf.dims[k]) * eta);
    }
    Iterate {
        x,
        s,
        y: DVector::zeros(sf.num_constraints()),
    }
}

/// Columns of `X A_j S⁻¹` gathered per pass over the constraint entries.
const SCHUR_BATCH: usize = 32;

/// `M_ij = ⟨A_i, X A_j S⁻¹⟩` on the upper triangle, mirrored.
///
/// Per block, the products `X A_j S⁻¹` are formed a batch at a time and
/// stored interleaved, so every constraint entry is read once per batch and
/// meets a contiguous run of batch values.
fn schur_complement(
    sf: &StdForm,
    by_block: &[Vec<(usize, usize)>],
    x: &[DMatrix<f64>],
    sinv: &[DMatrix<f64>],
    m: usize,
) -> DMatrix<f64> {
    let mut schur = DMatrix::zeros(m, m);
    for (k, touching) in by_block.iter().enumerate() {
        let n = sf.dims[k];
        let mut batch = vec![0.0; n * n * SCHUR_BATCH];
        let mut acc = [0.0; SCHUR_BATCH];
        for chunk in touching.chunks(SCHUR_BATCH) {
            let width = chunk.len();
            for (t, &(j, pj)) in chunk.iter().enumerate() {
                let g = sf.a[j][pj].entries.sandwich(&x[k], &sinv[k]);
                for (idx, v) in g.iter().enumerate() {
                    batch[idx * SCHUR_BATCH + t] = *v;
                }
            }
            let j_max = chunk[width - 1].0;
            for &(i, pi) in touching {
                if i > j_max {
                    break;
                }
                acc[..width].fill(0.0);
                let mut add = |idx: usize, v: f64| {
                    let row = &batch[idx * SCHUR_BATCH..idx * SCHUR_BATCH + width];
                    for (a, g) in acc[..width].iter_mut().zip(row) {
                        *a += v * g;
                    }
                };
                match &sf.a[i][pi].entries {
                    Entries::Sparse(e) => {
                        for &(r, c, v) in e {
                            add(r + c * n, v);
                        }
                    }
                    Entries::Dense(a) => {
                        for (idx, &v) in a.iter().enumerate() {
                            if v != 0.0 {
                                add(idx, v);
                            }
                        }
                    }
                }
                for (t, &(j, _)) in chunk.iter().enumerate() {
                    if i <= j {
                        schur[(i, j)] += acc[t];
                    }
                }
            }
        }
    }
    for j in 0..m {
        for i in (j + 1)..m {
            schur[(i, j)] = schur[(j, i)];
        }
    }
    schur
}

/// Cholesky factor of the Schur matrix (faer's blocked kernel, sequential).
struct SchurFactor {
    l: Mat<f64>,
}

impl SchurFactor {
    fn new(m: &DMatrix<f64>, shift: f64) -> Option<Self> {
        let n = m.nrows();
        let mut l = Mat::from_fn(
            n,
            n,
            |i, j| if i == j { m[(i, j)] + shift } else { m[(i, j)] },
        );
        let mut buf = MemBuffer::new(llt::factor::cholesky_in_place_scratch::<f64>(
            n,
            Par::Seq,
            Default::default(),
        ));
        llt::factor::cholesky_in_place(
            l.as_mut(),
            Default::default(),
            Par::Seq,
            MemStack::new(&mut buf),
            Default::default(),
        )
        .ok()?;
        Some(Self { l })
    }

    fn solve(&self, rhs: &DVector<f64>) -> DVector<f64> {
        let n = rhs.len();
        let mut x = Mat::from_fn(n, 1, |i, _| rhs[i]);
        let mut buf = MemBuffer::new(llt::solve::solve_in_place_scratch::<f64>(n, 1, Par::Seq));
        llt::solve::solve_in_place_with_conj(
            self.l.as_ref(),
            Conj::No,
            x.as_mut(),
            Par::Seq,
            MemStack::new(&mut buf),
        );
        DVector::from_fn(n, |i, _| x[(i, 0)])
    }
}

fn factor(schur: DMatrix<f64>) -> Option<SchurFactor> {
    let m = schur.nrows();
    let max_diag = (0..m)
        .map(|i| schur[(i, i)].abs())
        .fold(0.0, f64::max)
        .max(1e-300);
    if let Some(c) = SchurFactor::new(&schur, 0.0) {
        return Some(c);
    }
    let mut shift = 1e-14;
    while shift <= 1e-6 {
        if let Some(c) = SchurFactor::new(&schur, shift * max_diag) {
            return Some(c);
        }
        shift *= 100.0;
    }
    None
}

#[allow(clippy::too_many_arguments)]
fn direction(
    sf: &StdForm,
    chol: &SchurFactor,
    it: &Iterate,
    rd: &[DMatrix<f64>],
    sinv: &[DMatrix<f64>],
    a_sinv: &DVector<f64>,
    a_x_rd_sinv: &DVector<f64>,
    target: f64,
    corr: Option<&[DMatrix<f64>]>,
) -> (Vec<DMatrix<f64>>, Vec<DMatrix<f64>>, DVector<f64>) {
    // M Δy = b − σμ A(S⁻¹) + A(X R_d S⁻¹) + A(K S⁻¹)
    let mut rhs = &sf.b - a_sinv * target + a_x_rd_sinv;
    let k_sinv: Option<Vec<DMatrix<f64>>> =
        corr.map(|k| k.iter().zip(sinv).map(|(kk, si)| kk * si).collect());
    if let Some(ks) = &k_sinv {
        rhs += sf.apply(ks);
    }
    let mut dy = chol.solve(&rhs);
    let atdy = sf.apply_adjoint(&dy);
    let mut ds = Vec::with_capacity(sf.dims.len());
    let mut dx = Vec::with_capacity(sf.dims.len());
    for k in 0..sf.dims.len() {
        let dsk = &rd[k] - &atdy[k];
        // ΔX = σμ S⁻¹ − X − (X ΔS + K) S⁻¹, symmetrized.
        let mut dxk = &sinv[k] * target - &it.x[k] - &it.x[k] * &dsk * &sinv[k];
        if let Some(ks) = &k_sinv {
            dxk -= &ks[k];
        }
        symmetrize(&mut dxk);
        ds.push(dsk);
        dx.push(dxk);
    }

    // Near the boundary the terms of ΔX cancel badly and A(ΔX) drifts away
    // from b − A(X). Since A(ΔX) depends on Δy through M, the drift can be
    // fed back through the same factor.
    let rp = &sf.b - sf.apply(&it.x);
    let floor = 1e-14 * (1.0 + rp.norm());
    let mut last = f64::INFINITY;
    for _ in 0..REFINE_PASSES {
        let e = &rp - sf.apply(&dx);
        let en = e.norm();
        if en <= floor || en >= 0.5 * last {
            break;
        }
        last = en;
        let delta = chol.solve(&e);
        let at = sf.apply_adjoint(&delta);
        for k in 0..sf.dims.len() {
            let mut fix = &it.x[k] * &at[k] * &sinv[k];
            symmetrize(&mut fix);
            dx[k] += fix;
            ds[k] -= &at[k];
        }
        dy += delta;
    }
    (dx, ds, dy)
}

/// Refinement rounds on `A(ΔX) = b − A(X)` per search direction.
const REFINE_PASSES: usize = 3;

fn inverse_spd(s: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let mut inv = Cholesky::new(s.clone())?.inverse();
    symmetrize(&mut inv);
    Some(inv)
}

/// Largest `α` with `X + α ΔX ⪰ 0` for every block (∞ if unbounded).
fn max_step(x: &[DMatrix<f64>], dx: &[DMatrix<f64>]) -> f64 {
    let mut alpha = f64::INFINITY;
    for (xk, dxk) in x.iter().zip(dx) {
        let Some(chol) = Cholesky::new(xk.clone()) else {
            return 0.0;
        };
        let l = chol.l();
        let Some(t) = l.solve_lower_triangular(dxk) else {
            return 0.0;
        };
        let Some(mut w) = l.solve_lower_triangular(&t.transpose()) else {
            return 0.0;
        };
        symmetrize(&mut w);
        let lmin = w
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if lmin < 0.0 {
            alpha = alpha.min(-1.0 / lmin);
        }
    }
    alpha
}
