//! Block-diagonal real symmetric standard form consumed by the interior-point
//! method:
//!
//! ```text
//! (P)  min ⟨C, X⟩   s.t. ⟨A_i, X⟩ = b_i,        X ⪰ 0
//! (D)  max bᵀy      s.t. S = C − Σ y_i A_i,     S ⪰ 0
//! ```

use nalgebra::{DMatrix, DVector};

/// Nonzero pattern of one constraint matrix restricted to one block. Sparse
/// entries list both triangles explicitly.
#[derive(Debug, Clone)]
pub(crate) enum Entries {
    Sparse(Vec<(usize, usize, f64)>),
    Dense(DMatrix<f64>),
}

impl Entries {
    /// Stores `m` sparsely when at most an eighth of it is nonzero.
    pub(crate) fn from_dense(m: DMatrix<f64>, zero_tol: f64) -> Option<Self> {
        let n = m.nrows();
        let nnz: Vec<(usize, usize, f64)> = (0..n)
            .flat_map(|j| (0..n).map(move |i| (i, j)))
            .filter_map(|(i, j)| {
                let v = m[(i, j)];
                (v.abs() > zero_tol).then_some((i, j, v))
            })
            .collect();
        if nnz.is_empty() {
            None
        } else if nnz.len() * 8 <= n * n {
            Some(Entries::Sparse(nnz))
        } else {
            Some(Entries::Dense(m))
        }
    }

    pub(crate) fn dot(&self, m: &DMatrix<f64>) -> f64 {
        match self {
            Entries::Sparse(e) => e.iter().map(|&(i, j, v)| v * m[(i, j)]).sum(),
            Entries::Dense(a) => a.dot(m),
        }
    }

    pub(crate) fn add_scaled_to(&self, m: &mut DMatrix<f64>, s: f64) {
        match self {
            Entries::Sparse(e) => {
                for &(i, j, v) in e {
                    m[(i, j)] += s * v;
                }
            }
            Entries::Dense(a) => *m += a * s,
        }
    }

    pub(crate) fn norm_sqr(&self) -> f64 {
        match self {
            Entries::Sparse(e) => e.iter().map(|&(_, _, v)| v * v).sum(),
            Entries::Dense(a) => a.norm_squared(),
        }
    }

    /// `X · A · S⁻¹`. Sparse `A` is restricted to its occupied rows `R` and
    /// columns `C`, giving `X[:, R] · A[R, C] · S⁻¹[C, :]`.
    pub(crate) fn sandwich(&self, x: &DMatrix<f64>, sinv: &DMatrix<f64>) -> DMatrix<f64> {
        let n = x.nrows();
        match self {
            Entries::Sparse(e) => {
                let mut rows: Vec<usize> = e.iter().map(|t| t.0).collect();
                let mut cols: Vec<usize> = e.iter().map(|t| t.1).collect();
                rows.sort_unstable();
                rows.dedup();
                cols.sort_unstable();
                cols.dedup();
                if 2 * rows.len().max(cols.len()) > n {
                    return x * self.to_dense(n) * sinv;
                }
                let mut local = DMatrix::zeros(rows.len(), cols.len());
                for &(r, c, v) in e {
                    let (Ok(ri), Ok(ci)) = (rows.binary_search(&r), cols.binary_search(&c)) else {
                        unreachable!()
                    };
                    local[(ri, ci)] += v;
                }
                let xr = x.select_columns(rows.iter());
                let sc = sinv.select_rows(cols.iter());
                xr * local * sc
            }
            Entries::Dense(a) => x * a * sinv,
        }
    }

    fn to_dense(&self, n: usize) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(n, n);
        self.add_scaled_to(&mut a, 1.0);
        a
    }
}

#[derive(Debug, Clone)]
pub(crate) struct BlockPart {
    pub block: usize,
    pub entries: Entries,
}

#[derive(Debug, Clone)]
pub(crate) struct StdForm {
    pub dims: Vec<usize>,
    pub c: Vec<DMatrix<f64>>,
    pub a: Vec<Vec<BlockPart>>,
    pub b: DVector<f64>,
}

impl StdForm {
    pub(crate) fn num_constraints(&self) -> usize {
        self.a.len()
    }

    pub(crate) fn zero_blocks(&self) -> Vec<DMatrix<f64>> {
        self.dims.iter().map(|&n| DMatrix::zeros(n, n)).collect()
    }

    /// `A(X)_i = ⟨A_i, X⟩`.
    pub(crate) fn apply(&self, x: &[DMatrix<f64>]) -> DVector<f64> {
        DVector::from_iterator(
            self.a.len(),
            self.a.iter().map(|parts| {
                parts
                    .iter()
                    .map(|p| p.entries.dot(&x[p.block]))
                    .sum::<f64>()
            }),
        )
    }

    /// `Aᵀ(y) = Σ y_i A_i`.
    pub(crate) fn apply_adjoint(&self, y: &DVector<f64>) -> Vec<DMatrix<f64>> {
        let mut out = self.zero_blocks();
        for (i, parts) in self.a.iter().enumerate() {
            if y[i] != 0.0 {
                for p in parts {
                    p.entries.add_scaled_to(&mut out[p.block], y[i]);
                }
            }
        }
        out
    }

    /// For each block, the (constraint, part) pairs touching it.
    pub(crate) fn block_index(&self) -> Vec<Vec<(usize, usize)>> {
        let mut idx = vec![Vec::new(); self.dims.len()];
        for (i, parts) in self.a.iter().enumerate() {
            for (pi, p) in parts.iter().enumerate() {
                idx[p.block].push((i, pi));
            }
        }
        idx
    }
}

pub(crate) fn blocks_dot(a: &[DMatrix<f64>], b: &[DMatrix<f64>]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.dot(y)).sum()
}

pub(crate) fn blocks_norm(a: &[DMatrix<f64>]) -> f64 {
    a.iter().map(|x| x.norm_squared()).sum::<f64>().sqrt()
}

pub(crate) fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}
