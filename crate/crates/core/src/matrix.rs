//! Dense complex linear algebra for operators on a bipartite space `A ⊗ B`.
//!
//! Composite basis index convention: `|a⟩_A |b⟩_B ↦ a·d_B + b` (row-major).
//! Every module in the crate relies on this ordering.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::MatrixError;

/// Dense complex matrix with no structural guarantee.
pub type CMatrix = DMatrix<Complex64>;
/// Dense complex column vector.
pub type CVector = DVector<Complex64>;

/// Maximum per-entry asymmetry `|m_ij − conj(m_ji)|` accepted at construction.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Relative eigenvalue cutoff used by the spectral projectors.
pub const RANK_TOL: f64 = 1e-9;
/// Trace tolerance for density operators.
pub const STATE_TRACE_TOL: f64 = 1e-8;
/// Smallest eigenvalue tolerated in a density operator.
pub const STATE_PSD_TOL: f64 = 1e-9;

const EIG_MAX_ITER: usize = 10_000;

#[inline]
pub(crate) fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// A square complex matrix certified Hermitian.
///
/// Construction rejects inputs whose asymmetry exceeds [`HERMITICITY_TOL`]
/// and otherwise stores the Hermitian part `(m + m†)/2`, so downstream
/// arithmetic never accumulates drift away from Hermiticity.
#[derive(Clone, PartialEq)]
pub struct HermitianMatrix {
    m: CMatrix,
}

impl HermitianMatrix {
    pub fn new(m: CMatrix) -> Result<Self, MatrixError> {
        if m.nrows() != m.ncols() {
            return Err(MatrixError::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        if m.nrows() == 0 {
            return Err(MatrixError::Empty);
        }
        let asym = max_asymmetry(&m);
        if asym > HERMITICITY_TOL {
            return Err(MatrixError::NotHermitian { asymmetry: asym });
        }
        Ok(Self::hermitian_part(&m))
    }

    /// Hermitian part `(m + m†)/2` of an arbitrary square matrix, without any
    /// tolerance check. Intended for results of trusted arithmetic.
    pub fn hermitian_part(m: &CMatrix) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "hermitian_part needs a square matrix");
        let n = m.nrows();
        let mut out = CMatrix::zeros(n, n);
        for j in 0..n {
            for i in 0..n {
                out[(i, j)] = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            }
        }
        Self { m: out }
    }

    pub fn from_real(m: &DMatrix<f64>) -> Result<Self, MatrixError> {
        Self::new(m.map(|x| c64(x, 0.0)))
    }

    pub fn identity(n: usize) -> Self {
        Self {
            m: CMatrix::identity(n, n),
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            m: CMatrix::zeros(n, n),
        }
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        let n = d.len();
        let mut m = CMatrix::zeros(n, n);
        for (i, &x) in d.iter().enumerate() {
            m[(i, i)] = c64(x, 0.0);
        }
        Self { m }
    }

    /// Rank-one operator `|v⟩⟨v|` (no normalization).
    pub fn outer(v: &CVector) -> Self {
        Self::hermitian_part(&(v * v.adjoint()))
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.m[(i, j)]
    }

    /// Real trace (the imaginary part vanishes for Hermitian matrices).
    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.m[(i, i)].re).sum()
    }

    /// `Re tr(self · other)`.
    pub fn inner(&self, other: &HermitianMatrix) -> f64 {
        assert_eq!(self.dim(), other.dim(), "inner product dimension mismatch");
        // tr(A B) = Σ_ij A_ij B_ji = Σ_ij A_ij conj(B_ij) for Hermitian B.
        self.m
            .iter()
            .zip(other.m.iter())
            .map(|(a, b)| (a * b.conj()).re)
            .sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// True when every imaginary part is at most `tol` in magnitude.
    pub fn is_real(&self, tol: f64) -> bool {
        self.m.iter().all(|z| z.im.abs() <= tol)
    }

    pub fn real_part(&self) -> DMatrix<f64> {
        self.m.map(|z| z.re)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            m: self.m.map(|z| z * s),
        }
    }

    /// Congruence `V · self · V†` for an arbitrary (possibly rectangular) `V`.
    pub fn congruence(&self, v: &CMatrix) -> Self {
        assert_eq!(v.ncols(), self.dim(), "congruence dimension mismatch");
        Self::hermitian_part(&(v * &self.m * v.adjoint()))
    }

    pub fn min_eigenvalue(&self) -> Result<f64, MatrixError> {
        Ok(*hermitian_eig(self)?.eigenvalues.last().expect("dim ≥ 1"))
    }

    pub fn max_eigenvalue(&self) -> Result<f64, MatrixError> {
        Ok(hermitian_eig(self)?.eigenvalues[0])
    }
}

impl fmt::Debug for HermitianMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HermitianMatrix({}x{}) ", self.dim(), self.dim())?;
        fmt::Display::fmt(&self.m, f)
    }
}

impl Add for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn add(self, rhs: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix {
            m: &self.m + &rhs.m,
        }
    }
}

impl Sub for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn sub(self, rhs: &HermitianMatrix) -> HermitianMatrix {
        HermitianMatrix {
            m: &self.m - &rhs.m,
        }
    }
}

impl Mul<f64> for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn mul(self, rhs: f64) -> HermitianMatrix {
        self.scale(rhs)
    }
}

impl Neg for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn neg(self) -> HermitianMatrix {
        self.scale(-1.0)
    }
}

fn max_asymmetry(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Local dimensions of a bipartite system `A ⊗ B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BipartiteDims {
    pub d_a: usize,
    pub d_b: usize,
}

impl BipartiteDims {
    pub fn new(d_a: usize, d_b: usize) -> Result<Self, MatrixError> {
        if d_a == 0 || d_b == 0 {
            return Err(MatrixError::InvalidDims {
                expected: 0,
                found: 0,
                detail: format!("local dimensions must be positive, got ({d_a}, {d_b})"),
            });
        }
        Ok(Self { d_a, d_b })
    }

    pub fn total(&self) -> usize {
        self.d_a * self.d_b
    }

    fn check(&self, dim: usize) -> Result<(), MatrixError> {
        if self.total() != dim {
            return Err(MatrixError::InvalidDims {
                expected: self.total(),
                found: dim,
                detail: format!(
                    "{}x{} does not match operator dimension {dim}",
                    self.d_a, self.d_b
                ),
            });
        }
        Ok(())
    }
}

impl fmt::Display for BipartiteDims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}⊗{}", self.d_a, self.d_b)
    }
}

/// A validated density operator on `A ⊗ B`.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteState {
    rho: HermitianMatrix,
    dims: BipartiteDims,
}

impl BipartiteState {
    /// Validates unit trace (within [`STATE_TRACE_TOL`]) and positivity
    /// (smallest eigenvalue ≥ −[`STATE_PSD_TOL`]).
    pub fn new(rho: HermitianMatrix, dims: BipartiteDims) -> Result<Self, MatrixError> {
        dims.check(rho.dim())?;
        let tr = rho.trace();
        if (tr - 1.0).abs() > STATE_TRACE_TOL {
            return Err(MatrixError::InvalidState {
                invariant: "trace",
                residual: (tr - 1.0).abs(),
            });
        }
        let lmin = rho.min_eigenvalue()?;
        if lmin < -STATE_PSD_TOL {
            return Err(MatrixError::InvalidState {
                invariant: "positivity",
                residual: -lmin,
            });
        }
        Ok(Self { rho, dims })
    }

    /// Normalizes a positive operator to unit trace before validation.
    pub fn from_unnormalized(m: HermitianMatrix, dims: BipartiteDims) -> Result<Self, MatrixError> {
        let tr = m.trace();
        if tr <= 0.0 {
            return Err(MatrixError::InvalidState {
                invariant: "trace",
                residual: (tr - 1.0).abs(),
            });
        }
        Self::new(m.scale(1.0 / tr), dims)
    }

    /// Pure state `|ψ⟩⟨ψ|/⟨ψ|ψ⟩`.
    pub fn pure(psi: &CVector, dims: BipartiteDims) -> Result<Self, MatrixError> {
        let norm = psi.norm();
        if norm == 0.0 {
            return Err(MatrixError::InvalidState {
                invariant: "norm",
                residual: 0.0,
            });
        }
        Self::new(HermitianMatrix::outer(&(psi / c64(norm, 0.0))), dims)
    }

    pub fn rho(&self) -> &HermitianMatrix {
        &self.rho
    }

    pub fn dims(&self) -> BipartiteDims {
        self.dims
    }

    pub fn dim(&self) -> usize {
        self.rho.dim()
    }

    /// `ρ^{T_B}`.
    pub fn partial_transpose(&self) -> HermitianMatrix {
        partial_transpose(&self.rho, self.dims).expect("dims validated at construction")
    }

    /// Tensor product `ρ ⊗ σ` with local spaces regrouped as `(A A')(B B')`.
    pub fn tensor(&self, other: &BipartiteState) -> BipartiteState {
        let joint = kron(&self.rho, &other.rho);
        let sub = [self.dims.d_a, self.dims.d_b, other.dims.d_a, other.dims.d_b];
        let regrouped = permute_subsystems(joint.as_matrix(), &sub, &[0, 2, 1, 3]);
        BipartiteState {
            rho: HermitianMatrix::hermitian_part(&regrouped),
            dims: BipartiteDims {
                d_a: self.dims.d_a * other.dims.d_a,
                d_b: self.dims.d_b * other.dims.d_b,
            },
        }
    }
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct Spectrum {
    /// Real eigenvalues sorted in descending order.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns, matching `eigenvalues`.
    pub eigenvectors: CMatrix,
}

impl Spectrum {
    /// `V · diag(f(λ)) · V†`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> HermitianMatrix {
        let n = self.eigenvalues.len();
        let mut scaled = self.eigenvectors.clone();
        for (j, &lam) in self.eigenvalues.iter().enumerate() {
            let s = f(lam);
            for i in 0..n {
                scaled[(i, j)] *= s;
            }
        }
        HermitianMatrix::hermitian_part(&(scaled * self.eigenvectors.adjoint()))
    }

    pub fn reconstruct(&self) -> HermitianMatrix {
        self.reconstruct_with(|x| x)
    }

    /// Projector onto the eigenvectors whose eigenvalue satisfies `keep`.
    pub fn projector(&self, keep: impl Fn(f64) -> bool) -> HermitianMatrix {
        self.reconstruct_with(|x| if keep(x) { 1.0 } else { 0.0 })
    }

    pub fn max_abs(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |acc, x| acc.max(x.abs()))
    }
}

/// `a ⊗ b`, entry `(i·dim(b)+k, j·dim(b)+l) = a_ij · b_kl`.
pub fn kron(a: &HermitianMatrix, b: &HermitianMatrix) -> HermitianMatrix {
    HermitianMatrix {
        m: a.m.kronecker(&b.m),
    }
}

/// Partial transpose on the `B` factor:
/// `out[(a,b),(c,d)] = m[(a,d),(c,b)]`.
pub fn partial_transpose(
    m: &HermitianMatrix,
    dims: BipartiteDims,
) -> Result<HermitianMatrix, MatrixError> {
    dims.check(m.dim())?;
    Ok(HermitianMatrix {
        m: partial_transpose_raw(&m.m, dims),
    })
}

pub(crate) fn partial_transpose_raw(m: &CMatrix, dims: BipartiteDims) -> CMatrix {
    let (da, db) = (dims.d_a, dims.d_b);
    let mut out = CMatrix::zeros(da * db, da * db);
    for a in 0..da {
        for b in 0..db {
            for c in 0..da {
                for d in 0..db {
                    out[(a * db + b, c * db + d)] = m[(a * db + d, c * db + b)];
                }
            }
        }
    }
    out
}

/// Reorders the tensor factors of an operator on `⊗_k H_k` (local dims
/// `sub`). Output factor `k` is input factor `perm[k]`.
pub fn permute_subsystems(m: &CMatrix, sub: &[usize], perm: &[usize]) -> CMatrix {
    let n: usize = sub.iter().product();
    assert_eq!(m.nrows(), n, "subsystem dims do not match matrix");
    assert_eq!(sub.len(), perm.len());
    let out_dims: Vec<usize> = perm.iter().map(|&p| sub[p]).collect();
    // Map an output flat index to the input flat index.
    let map: Vec<usize> = (0..n)
        .map(|flat| {
            let mut digits = vec![0usize; sub.len()];
            let mut rem = flat;
            for k in (0..sub.len()).rev() {
                digits[k] = rem % out_dims[k];
                rem /= out_dims[k];
            }
            let mut in_digits = vec![0usize; sub.len()];
            for (k, &p) in perm.iter().enumerate() {
                in_digits[p] = digits[k];
            }
            in_digits
                .iter()
                .zip(sub)
                .fold(0usize, |acc, (&d, &s)| acc * s + d)
        })
        .collect();
    CMatrix::from_fn(n, n, |i, j| m[(map[i], map[j])])
}

/// Hermitian eigen-decomposition with eigenvalues sorted descending.
pub fn hermitian_eig(m: &HermitianMatrix) -> Result<Spectrum, MatrixError> {
    let n = m.dim();
    let eig =
        m.m.clone()
            .try_symmetric_eigen(f64::EPSILON, EIG_MAX_ITER)
            .ok_or(MatrixError::EigenFailure { residual: f64::NAN })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    let spec = Spectrum {
        eigenvalues,
        eigenvectors,
    };
    let residual = (spec.reconstruct().as_matrix() - &m.m).norm();
    if !residual.is_finite() || residual > 1e-9 * m.frobenius_norm().max(1.0) {
        return Err(MatrixError::EigenFailure { residual });
    }
    Ok(spec)
}

/// `‖m‖₁ = Σ |λ_i|`.
pub fn trace_norm(m: &HermitianMatrix) -> Result<f64, MatrixError> {
    Ok(hermitian_eig(m)?.eigenvalues.iter().map(|x| x.abs()).sum())
}

/// `‖m‖_∞ = max |λ_i|`.
pub fn op_norm(m: &HermitianMatrix) -> Result<f64, MatrixError> {
    Ok(hermitian_eig(m)?.max_abs())
}

/// Projector onto `supp(ρ)`: eigenvectors with eigenvalue above
/// `rank_tol · λ_max`.
pub fn support_projector(
    rho: &BipartiteState,
    rank_tol: f64,
) -> Result<HermitianMatrix, MatrixError> {
    let spec = hermitian_eig(rho.rho())?;
    let cutoff = rank_tol * spec.eigenvalues[0].max(0.0);
    Ok(spec.projector(|x| x > cutoff))
}

/// Orthonormal basis (as columns) of `supp(ρ)`.
pub fn support_basis(rho: &BipartiteState, rank_tol: f64) -> Result<CMatrix, MatrixError> {
    let spec = hermitian_eig(rho.rho())?;
    let cutoff = rank_tol * spec.eigenvalues[0].max(0.0);
    let cols: Vec<usize> = (0..spec.eigenvalues.len())
        .filter(|&j| spec.eigenvalues[j] > cutoff)
        .collect();
    let n = rho.dim();
    Ok(CMatrix::from_fn(n, cols.len(), |r, c| {
        spec.eigenvectors[(r, cols[c])]
    }))
}

/// Orthonormal basis (as columns) of the kernel of `ρ`, i.e. the
/// complement of [`support_projector`].
pub fn kernel_basis(rho: &BipartiteState, rank_tol: f64) -> Result<CMatrix, MatrixError> {
    let spec = hermitian_eig(rho.rho())?;
    let cutoff = rank_tol * spec.eigenvalues[0].max(0.0);
    let cols: Vec<usize> = (0..spec.eigenvalues.len())
        .filter(|&j| spec.eigenvalues[j] <= cutoff)
        .collect();
    let n = rho.dim();
    Ok(CMatrix::from_fn(n, cols.len(), |r, c| {
        spec.eigenvectors[(r, cols[c])]
    }))
}

/// Basis of the column span of `k` in reduced echelon form: every column
/// has a 1 in its own pivot row and exact zeros in the other pivot rows, so
/// it carries at most `n − k + 1` nonzeros. Not orthonormal.
pub fn echelon_basis(k: &CMatrix) -> CMatrix {
    let (n, r) = k.shape();
    let mut m = k.transpose();
    let mut is_pivot = vec![false; n];
    let mut pivots = Vec::with_capacity(r);
    for row in 0..r {
        let col = (0..n)
            .filter(|&c| !is_pivot[c])
            .max_by(|&a, &b| m[(row, a)].norm().total_cmp(&m[(row, b)].norm()))
            .expect("more basis vectors than coordinates");
        is_pivot[col] = true;
        pivots.push(col);
        let inv = m[(row, col)].inv();
        for c in 0..n {
            m[(row, c)] *= inv;
        }
        for other in 0..r {
            if other != row {
                let f = m[(other, col)];
                if f != c64(0.0, 0.0) {
                    for c in 0..n {
                        let v = m[(row, c)];
                        m[(other, c)] -= f * v;
                    }
                }
            }
        }
    }
    for (row, &col) in pivots.iter().enumerate() {
        for other in 0..r {
            m[(other, col)] = if other == row {
                c64(1.0, 0.0)
            } else {
                c64(0.0, 0.0)
            };
        }
    }
    m.transpose()
}

/// Projector onto the eigenvectors with eigenvalue below `−RANK_TOL·max|λ|`.
/// Zero for positive semidefinite input.
pub fn negative_projector(m: &HermitianMatrix) -> Result<HermitianMatrix, MatrixError> {
    let spec = hermitian_eig(m)?;
    let cutoff = -RANK_TOL * spec.max_abs();
    Ok(spec.projector(|x| x < cutoff))
}

/// Real symmetric embedding `[[Re m, −Im m], [Im m, Re m]]` of dimension `2n`.
pub fn real_embedding(m: &HermitianMatrix) -> DMatrix<f64> {
    let n = m.dim();
    let mut out = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = m.m[(i, j)];
            out[(i, j)] = z.re;
            out[(i + n, j + n)] = z.re;
            out[(i, j + n)] = -z.im;
            out[(i + n, j)] = z.im;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(n: usize, seed: u64) -> HermitianMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = CMatrix::from_fn(n, n, |_, _| {
            c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        HermitianMatrix::hermitian_part(&g)
    }

    fn bell() -> HermitianMatrix {
        let mut m = CMatrix::zeros(4, 4);
        for &i in &[0, 3] {
            for &j in &[0, 3] {
                m[(i, j)] = c64(0.5, 0.0);
            }
        }
        HermitianMatrix::new(m).unwrap()
    }

    fn pauli_x() -> HermitianMatrix {
        HermitianMatrix::from_real(&DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0])).unwrap()
    }

    fn pauli_y() -> HermitianMatrix {
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[c64(0.0, 0.0), c64(0.0, -1.0), c64(0.0, 1.0), c64(0.0, 0.0)],
        );
        HermitianMatrix::new(m).unwrap()
    }

    #[test]
    fn construction_rejects_non_hermitian() {
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[c64(1.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0)],
        );
        assert!(matches!(
            HermitianMatrix::new(m),
            Err(MatrixError::NotHermitian { .. })
        ));
        let rect = CMatrix::zeros(2, 3);
        assert!(matches!(
            HermitianMatrix::new(rect),
            Err(MatrixError::NotSquare { .. })
        ));
    }

    #[test]
    fn construction_symmetrizes_tiny_asymmetry() {
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[c64(1.0, 0.0), c64(0.5, 1e-13), c64(0.5, 0.0), c64(1.0, 0.0)],
        );
        let h = HermitianMatrix::new(m).unwrap();
        assert_eq!(h.get(0, 1), h.get(1, 0).conj());
    }

    #[test]
    fn kron_examples() {
        let i2 = HermitianMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), HermitianMatrix::identity(4));
        let a = HermitianMatrix::from_diagonal(&[1.0, 0.0]);
        let b = HermitianMatrix::from_diagonal(&[0.0, 1.0]);
        assert_eq!(
            kron(&a, &b),
            HermitianMatrix::from_diagonal(&[0.0, 1.0, 0.0, 0.0])
        );
        let bb = kron(&bell(), &bell());
        assert_abs_diff_eq!(bb.trace(), 1.0, epsilon = 1e-14);
        let spec = hermitian_eig(&bb).unwrap();
        let rank = spec.eigenvalues.iter().filter(|&&x| x > 1e-9).count();
        assert_eq!(rank, 1);
    }

    #[test]
    fn kron_spectrum_is_pairwise_products() {
        for seed in 0..5 {
            let a = random_hermitian(2, seed);
            let b = random_hermitian(3, seed + 100);
            let ea = hermitian_eig(&a).unwrap().eigenvalues;
            let eb = hermitian_eig(&b).unwrap().eigenvalues;
            let mut expected: Vec<f64> = ea
                .iter()
                .flat_map(|x| eb.iter().map(move |y| x * y))
                .collect();
            expected.sort_by(|x, y| y.total_cmp(x));
            let got = hermitian_eig(&kron(&a, &b)).unwrap().eigenvalues;
            for (g, e) in got.iter().zip(&expected) {
                assert_abs_diff_eq!(g, e, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn partial_transpose_of_product_transposes_b() {
        let a = random_hermitian(2, 1);
        let b = random_hermitian(3, 2);
        let dims = BipartiteDims::new(2, 3).unwrap();
        let pt = partial_transpose(&kron(&a, &b), dims).unwrap();
        let bt = HermitianMatrix::hermitian_part(&b.as_matrix().transpose());
        let expected = kron(&a, &bt);
        assert!((pt.as_matrix() - expected.as_matrix()).norm() < 1e-14);
    }

    #[test]
    fn partial_transpose_bell_spectrum() {
        let dims = BipartiteDims::new(2, 2).unwrap();
        let pt = partial_transpose(&bell(), dims).unwrap();
        let ev = hermitian_eig(&pt).unwrap().eigenvalues;
        let expected = [0.5, 0.5, 0.5, -0.5];
        for (g, e) in ev.iter().zip(expected) {
            assert_abs_diff_eq!(*g, e, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(trace_norm(&pt).unwrap(), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn partial_transpose_dimension_mismatch() {
        let dims = BipartiteDims::new(2, 3).unwrap();
        assert!(matches!(
            partial_transpose(&HermitianMatrix::identity(4), dims),
            Err(MatrixError::InvalidDims { .. })
        ));
    }

    #[test]
    fn eig_examples() {
        let d = HermitianMatrix::from_diagonal(&[1.0, 3.0]);
        let s = hermitian_eig(&d).unwrap();
        assert_abs_diff_eq!(s.eigenvalues[0], 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.eigenvalues[1], 1.0, epsilon = 1e-14);
        let s = hermitian_eig(&pauli_x()).unwrap();
        assert_abs_diff_eq!(s.eigenvalues[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.eigenvalues[1], -1.0, epsilon = 1e-14);
    }

    #[test]
    fn eig_reconstruction_and_orthonormality() {
        let m = random_hermitian(9, 42);
        let s = hermitian_eig(&m).unwrap();
        assert!((s.reconstruct().as_matrix() - m.as_matrix()).norm() < 1e-9);
        let gram = s.eigenvectors.adjoint() * &s.eigenvectors;
        assert!((gram - CMatrix::identity(9, 9)).norm() < 1e-10);
        assert!(s.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn norms() {
        assert_abs_diff_eq!(
            trace_norm(&HermitianMatrix::from_diagonal(&[1.0, -1.0])).unwrap(),
            2.0
        );
        assert_abs_diff_eq!(trace_norm(&bell()).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            op_norm(&HermitianMatrix::from_diagonal(&[1.0, -3.0])).unwrap(),
            3.0
        );
        assert_abs_diff_eq!(
            op_norm(&HermitianMatrix::identity(5)).unwrap(),
            1.0,
            epsilon = 1e-14
        );
        let dims = BipartiteDims::new(3, 3).unwrap();
        let mut phi3 = CMatrix::zeros(9, 9);
        for i in 0..3 {
            for j in 0..3 {
                phi3[(4 * i, 4 * j)] = c64(1.0 / 3.0, 0.0);
            }
        }
        let pt = partial_transpose(&HermitianMatrix::new(phi3).unwrap(), dims).unwrap();
        assert_abs_diff_eq!(op_norm(&pt).unwrap(), 1.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn projectors() {
        let p = negative_projector(&HermitianMatrix::from_diagonal(&[1.0, -1.0])).unwrap();
        assert!(
            (p.as_matrix() - HermitianMatrix::from_diagonal(&[0.0, 1.0]).as_matrix()).norm()
                < 1e-12
        );
        let zero = negative_projector(&HermitianMatrix::identity(3)).unwrap();
        assert!(zero.frobenius_norm() < 1e-12);

        let dims = BipartiteDims::new(2, 2).unwrap();
        let pt = partial_transpose(&bell(), dims).unwrap();
        let pm = negative_projector(&pt).unwrap();
        assert_abs_diff_eq!(pm.trace(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(pm.inner(&pt), -0.5, epsilon = 1e-12);
        // Singlet (|01⟩ − |10⟩)/√2.
        let s = 0.5_f64;
        let singlet = HermitianMatrix::from_real(&DMatrix::from_row_slice(
            4,
            4,
            &[0., 0., 0., 0., 0., s, -s, 0., 0., -s, s, 0., 0., 0., 0., 0.],
        ))
        .unwrap();
        assert!((pm.as_matrix() - singlet.as_matrix()).norm() < 1e-10);
    }

    #[test]
    fn support_projector_examples() {
        let dims = BipartiteDims::new(2, 2).unwrap();
        let pure = BipartiteState::new(bell(), dims).unwrap();
        let p = support_projector(&pure, RANK_TOL).unwrap();
        assert!((p.as_matrix() - bell().as_matrix()).norm() < 1e-10);
        let mixed = BipartiteState::new(HermitianMatrix::identity(4).scale(0.25), dims).unwrap();
        let p = support_projector(&mixed, RANK_TOL).unwrap();
        assert!((p.as_matrix() - CMatrix::identity(4, 4)).norm() < 1e-10);
        assert_eq!(kernel_basis(&mixed, RANK_TOL).unwrap().ncols(), 0);
        assert_eq!(kernel_basis(&pure, RANK_TOL).unwrap().ncols(), 3);
        let k = kernel_basis(&pure, RANK_TOL).unwrap();
        let e = echelon_basis(&k);
        // Same span: projecting onto span(k) leaves e unchanged.
        assert!((&k * (k.adjoint() * &e) - &e).norm() < 1e-12);
        assert!(e.clone().svd(false, false).singular_values.min() > 1e-6);
        for col in e.column_iter() {
            assert!(col.iter().filter(|z| z.norm() > 0.0).count() <= 4 - 3 + 1);
        }
    }

    #[test]
    fn embedding_examples() {
        let x = pauli_x();
        let e = real_embedding(&x);
        let expected = DMatrix::from_row_slice(
            4,
            4,
            &[
                0., 1., 0., 0., 1., 0., 0., 0., 0., 0., 0., 1., 0., 0., 1., 0.,
            ],
        );
        assert_eq!(e, expected);
        let ey = real_embedding(&pauli_y());
        assert_eq!(ey, ey.transpose());
        let mut ev: Vec<f64> = ey.symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        for (g, e) in ev.iter().zip([1.0, 1.0, -1.0, -1.0]) {
            assert_abs_diff_eq!(*g, e, epsilon = 1e-12);
        }
    }

    #[test]
    fn embedding_doubles_spectrum() {
        let m = random_hermitian(5, 7);
        let orig = hermitian_eig(&m).unwrap().eigenvalues;
        let mut emb: Vec<f64> = real_embedding(&m)
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .collect();
        emb.sort_by(|a, b| b.total_cmp(a));
        for (k, lam) in orig.iter().enumerate() {
            assert_abs_diff_eq!(emb[2 * k], *lam, epsilon = 1e-10);
            assert_abs_diff_eq!(emb[2 * k + 1], *lam, epsilon = 1e-10);
        }
    }

    #[test]
    fn state_validation() {
        let dims = BipartiteDims::new(2, 2).unwrap();
        let bad_trace = HermitianMatrix::identity(4);
        assert!(matches!(
            BipartiteState::new(bad_trace, dims),
            Err(MatrixError::InvalidState {
                invariant: "trace",
                ..
            })
        ));
        let neg = HermitianMatrix::from_diagonal(&[0.6, 0.6, 0.1, -0.3]);
        assert!(matches!(
            BipartiteState::new(neg, dims),
            Err(MatrixError::InvalidState {
                invariant: "positivity",
                ..
            })
        ));
    }

    #[test]
    fn permute_swaps_factors() {
        let a = random_hermitian(2, 3);
        let b = random_hermitian(3, 4);
        let ab = kron(&a, &b);
        let ba = permute_subsystems(ab.as_matrix(), &[2, 3], &[1, 0]);
        assert!((ba - kron(&b, &a).as_matrix()).norm() < 1e-14);
    }

    #[test]
    fn tensor_regroups_local_spaces() {
        // A ⊗ B ⊗ A' ⊗ B' → (A A') ⊗ (B B'): partial transpose over (B B')
        // equals the tensor product of the individual partial transposes.
        let dims = BipartiteDims::new(2, 2).unwrap();
        let rho = BipartiteState::new(bell(), dims).unwrap();
        let two = rho.tensor(&rho);
        assert_eq!(two.dims(), BipartiteDims::new(4, 4).unwrap());
        let lhs = two.partial_transpose();
        let single = rho.partial_transpose();
        let rhs = HermitianMatrix::hermitian_part(&permute_subsystems(
            kron(&single, &single).as_matrix(),
            &[2, 2, 2, 2],
            &[0, 2, 1, 3],
        ));
        assert!((lhs.as_matrix() - rhs.as_matrix()).norm() < 1e-14);
        assert_abs_diff_eq!(trace_norm(&lhs).unwrap(), 4.0, epsilon = 1e-10);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn herm(n: usize) -> impl Strategy<Value = HermitianMatrix> {
            proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n).prop_map(move |v| {
                let g = CMatrix::from_iterator(n, n, v.into_iter().map(|(a, b)| c64(a, b)));
                HermitianMatrix::hermitian_part(&g)
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn partial_transpose_is_trace_preserving_involution(m in herm(6)) {
                let dims = BipartiteDims::new(2, 3).unwrap();
                let once = partial_transpose(&m, dims).unwrap();
                prop_assert!((once.trace() - m.trace()).abs() < 1e-12);
                let twice = partial_transpose(&once, dims).unwrap();
                prop_assert_eq!(twice, m);
            }

            #[test]
            fn embedding_preserves_psd(m in herm(4), shift in 0.0f64..3.0) {
                let shifted = &m + &HermitianMatrix::identity(4).scale(shift);
                let lmin = shifted.min_eigenvalue().unwrap();
                let emb = real_embedding(&shifted).symmetric_eigen();
                let emin = emb.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
                prop_assert!((lmin - emin).abs() < 1e-10);
                prop_assert_eq!(lmin >= 0.0, emin >= -1e-12 || lmin >= -1e-12);
            }

            #[test]
            fn support_projector_is_idempotent(m in herm(4)) {
                let psd = HermitianMatrix::hermitian_part(&(m.as_matrix() * m.as_matrix()));
                prop_assume!(psd.trace() > 1e-3);
                let dims = BipartiteDims::new(2, 2).unwrap();
                let rho = BipartiteState::from_unnormalized(psd, dims).unwrap();
                let p = support_projector(&rho, RANK_TOL).unwrap();
                let pp = HermitianMatrix::hermitian_part(&(p.as_matrix() * p.as_matrix()));
                prop_assert!((pp.as_matrix() - p.as_matrix()).norm() < 1e-10);
                let prp = rho.rho().congruence(p.as_matrix());
                prop_assert!((prp.as_matrix() - rho.rho().as_matrix()).norm() < 1e-8);
            }

            #[test]
            fn trace_norm_dominates_trace(m in herm(5)) {
                prop_assert!(trace_norm(&m).unwrap() + 1e-12 >= m.trace().abs());
            }
        }
    }
}
