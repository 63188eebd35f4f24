//! Named bipartite states, seeded random corpora and local Kraus channels.
//!
//! Random generators use `ChaCha8Rng::seed_from_u64(seed)` with standard
//! normal draws (`rand_distr::StandardNormal`), which gives the same sequence
//! on every platform. Each call owns its generator.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{MatrixError, StateError};
use crate::matrix::{c64, kron, BipartiteDims, BipartiteState, CMatrix, CVector, HermitianMatrix};

/// Outcomes with probability below this are dropped from ensembles.
pub const ZERO_PROBABILITY: f64 = 1e-12;
const COMPLETENESS_TOL: f64 = 1e-10;

fn dims(d_a: usize, d_b: usize) -> BipartiteDims {
    BipartiteDims { d_a, d_b }
}

/// Basis ket `|i j⟩` on `d_a ⊗ d_b`.
pub fn ket(i: usize, j: usize, d_a: usize, d_b: usize) -> CVector {
    assert!(i < d_a && j < d_b);
    let mut v = CVector::zeros(d_a * d_b);
    v[i * d_b + j] = c64(1.0, 0.0);
    v
}

/// `Φ(d) = (1/d) Σ_ij |ii⟩⟨jj|`.
pub fn max_entangled(d: usize) -> Result<BipartiteState, StateError> {
    if d < 2 {
        return Err(StateError::Domain {
            name: "d",
            value: d as f64,
            domain: "d >= 2",
        });
    }
    let mut psi = CVector::zeros(d * d);
    for i in 0..d {
        psi[i * d + i] = c64(1.0, 0.0);
    }
    Ok(BipartiteState::pure(&psi, dims(d, d))?)
}

/// Two-qubit family `r|v₀⟩⟨v₀| + (1−r)|v₁⟩⟨v₁|` with
/// `|v₀⟩ = (|10⟩ − |11⟩)/√2` and `|v₁⟩ = (|00⟩ + |10⟩ + |11⟩)/√3`.
pub fn sigma_r(r: f64) -> Result<BipartiteState, StateError> {
    if !(r > 0.0 && r < 1.0) {
        return Err(StateError::Domain {
            name: "r",
            value: r,
            domain: "(0, 1)",
        });
    }
    let v0 = (ket(1, 0, 2, 2) - ket(1, 1, 2, 2)) / c64(2f64.sqrt(), 0.0);
    let v1 = (ket(0, 0, 2, 2) + ket(1, 0, 2, 2) + ket(1, 1, 2, 2)) / c64(3f64.sqrt(), 0.0);
    let rho = &HermitianMatrix::outer(&v0).scale(r) + &HermitianMatrix::outer(&v1).scale(1.0 - r);
    Ok(BipartiteState::new(rho, dims(2, 2))?)
}

/// The three vectors `√α|ij⟩ + √(1−α)|ji⟩` for `(i,j) ∈ {(0,1),(0,2),(1,2)}`.
pub fn rho_alpha_vectors(alpha: f64) -> [CVector; 3] {
    let (a, b) = (c64(alpha.sqrt(), 0.0), c64((1.0 - alpha).sqrt(), 0.0));
    [(0, 1), (0, 2), (1, 2)].map(|(i, j)| ket(i, j, 3, 3) * a + ket(j, i, 3, 3) * b)
}

/// 3⊗3 family `Σ_m |ψ_m⟩⟨ψ_m| / 3`, `0 < α ≤ 1/2`.
pub fn rho_alpha(alpha: f64) -> Result<BipartiteState, StateError> {
    if !(alpha > 0.0 && alpha <= 0.5) {
        return Err(StateError::Domain {
            name: "alpha",
            value: alpha,
            domain: "(0, 0.5]",
        });
    }
    let mut acc = HermitianMatrix::zeros(9);
    for psi in rho_alpha_vectors(alpha) {
        acc = &acc + &HermitianMatrix::outer(&psi);
    }
    Ok(BipartiteState::new(acc.scale(1.0 / 3.0), dims(3, 3))?)
}

/// Normalized projector onto the 3⊗3 antisymmetric subspace.
pub fn antisym_state() -> BipartiteState {
    let mut acc = HermitianMatrix::zeros(9);
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let v = (ket(i, j, 3, 3) - ket(j, i, 3, 3)) / c64(2f64.sqrt(), 0.0);
        acc = &acc + &HermitianMatrix::outer(&v);
    }
    BipartiteState::new(acc.scale(1.0 / 3.0), dims(3, 3))
        .expect("antisymmetric projector is a state")
}

fn gaussian_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c64(re, im)
    })
}

fn unit_vector(n: usize, rng: &mut ChaCha8Rng) -> CVector {
    let g = gaussian_matrix(n, 1, rng).column(0).into_owned();
    let norm = g.norm();
    g / c64(norm, 0.0)
}

/// Ginibre-distributed state `G G† / tr(G G†)` with `G` of shape
/// `(d_a·d_b) × rank`.
pub fn random_state(
    d_a: usize,
    d_b: usize,
    rank: usize,
    seed: u64,
) -> Result<BipartiteState, StateError> {
    let n = d_a * d_b;
    if rank == 0 || rank > n {
        return Err(StateError::Domain {
            name: "rank",
            value: rank as f64,
            domain: "1 <= rank <= d_a*d_b",
        });
    }
    let bd = BipartiteDims::new(d_a, d_b)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = gaussian_matrix(n, rank, &mut rng);
    let m = HermitianMatrix::hermitian_part(&(&g * g.adjoint()));
    Ok(BipartiteState::from_unnormalized(m, bd)?)
}

/// Haar-random unit vector on `d_a ⊗ d_b`.
pub fn random_pure_vector(d_a: usize, d_b: usize, seed: u64) -> CVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    unit_vector(d_a * d_b, &mut rng)
}

/// Convex mixture of `terms` random product pure states, always PPT.
pub fn random_separable(
    d_a: usize,
    d_b: usize,
    terms: usize,
    seed: u64,
) -> Result<BipartiteState, StateError> {
    if terms == 0 {
        return Err(StateError::Domain {
            name: "terms",
            value: 0.0,
            domain: "terms >= 1",
        });
    }
    let bd = BipartiteDims::new(d_a, d_b)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut acc = HermitianMatrix::zeros(d_a * d_b);
    let mut total = 0.0;
    for _ in 0..terms {
        // Exponential weights give a uniform point on the simplex.
        let u: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
        let w = -u.ln();
        let a = HermitianMatrix::outer(&unit_vector(d_a, &mut rng));
        let b = HermitianMatrix::outer(&unit_vector(d_b, &mut rng));
        acc = &acc + &kron(&a, &b).scale(w);
        total += w;
    }
    Ok(BipartiteState::new(acc.scale(1.0 / total), bd)?)
}

/// Random Kraus family `{K_i}` on `C^d` with `Σ K_i† K_i = 1`, cut from a
/// Haar-like isometry.
pub fn random_kraus(d: usize, outcomes: usize, rng: &mut ChaCha8Rng) -> Vec<CMatrix> {
    let g = gaussian_matrix(d * outcomes, d, rng);
    let q = g.qr().q();
    (0..outcomes)
        .map(|i| q.rows(i * d, d).into_owned())
        .collect()
}

/// Local instrument `ρ ↦ (K_a ⊗ K_b) ρ (K_a ⊗ K_b)†` over the listed
/// outcome pairs. Classical communication is expressed by the pairing: Bob's
/// Kraus operator may depend on Alice's outcome.
#[derive(Debug, Clone)]
pub struct LocalKrausChannel {
    kraus_a: Vec<CMatrix>,
    kraus_b: Vec<CMatrix>,
    pairing: Vec<(usize, usize)>,
}

impl LocalKrausChannel {
    /// Checks shapes, indices and joint completeness
    /// `Σ_(a,b) K_a†K_a ⊗ K_b†K_b = 1`.
    pub fn new(
        kraus_a: Vec<CMatrix>,
        kraus_b: Vec<CMatrix>,
        pairing: Vec<(usize, usize)>,
    ) -> Result<Self, StateError> {
        let (Some(first_a), Some(first_b)) = (kraus_a.first(), kraus_b.first()) else {
            return Err(StateError::Channel("empty Kraus family".into()));
        };
        let (da, db) = (first_a.nrows(), first_b.nrows());
        if kraus_a.iter().any(|k| k.shape() != (da, da))
            || kraus_b.iter().any(|k| k.shape() != (db, db))
        {
            return Err(StateError::Channel(
                "Kraus operators must be square with a common size per side".into(),
            ));
        }
        if pairing.is_empty() {
            return Err(StateError::Channel("no outcomes".into()));
        }
        if let Some(&(a, b)) = pairing
            .iter()
            .find(|&&(a, b)| a >= kraus_a.len() || b >= kraus_b.len())
        {
            return Err(StateError::Channel(format!(
                "outcome pair ({a}, {b}) indexes a missing Kraus operator"
            )));
        }
        let mut sum = CMatrix::zeros(da * db, da * db);
        for &(a, b) in &pairing {
            let ea = kraus_a[a].adjoint() * &kraus_a[a];
            let eb = kraus_b[b].adjoint() * &kraus_b[b];
            sum += ea.kronecker(&eb);
        }
        let defect = (sum - CMatrix::identity(da * db, da * db)).norm();
        if defect > COMPLETENESS_TOL {
            return Err(StateError::Channel(format!(
                "completeness violated by {defect:.3e}"
            )));
        }
        Ok(Self {
            kraus_a,
            kraus_b,
            pairing,
        })
    }

    /// Independent local instruments; every pair of outcomes occurs.
    pub fn product(kraus_a: Vec<CMatrix>, kraus_b: Vec<CMatrix>) -> Result<Self, StateError> {
        let pairing = (0..kraus_a.len())
            .flat_map(|a| (0..kraus_b.len()).map(move |b| (a, b)))
            .collect();
        Self::new(kraus_a, kraus_b, pairing)
    }

    /// Alice measures with `kraus_a`, announces outcome `a`, and Bob applies
    /// the instrument `conditional_b[a]`.
    pub fn one_way(
        kraus_a: Vec<CMatrix>,
        conditional_b: Vec<Vec<CMatrix>>,
    ) -> Result<Self, StateError> {
        if conditional_b.len() != kraus_a.len() {
            return Err(StateError::Channel(
                "one conditional instrument per Alice outcome required".into(),
            ));
        }
        let mut kraus_b = Vec::new();
        let mut pairing = Vec::new();
        for (a, family) in conditional_b.into_iter().enumerate() {
            for k in family {
                pairing.push((a, kraus_b.len()));
                kraus_b.push(k);
            }
        }
        Self::new(kraus_a, kraus_b, pairing)
    }

    pub fn identity(d_a: usize, d_b: usize) -> Self {
        Self::product(
            vec![CMatrix::identity(d_a, d_a)],
            vec![CMatrix::identity(d_b, d_b)],
        )
        .expect("identity channel is complete")
    }

    /// Random product instrument with the given outcome counts.
    pub fn random_product(
        d_a: usize,
        d_b: usize,
        outcomes_a: usize,
        outcomes_b: usize,
        seed: u64,
    ) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ka = random_kraus(d_a, outcomes_a, &mut rng);
        let kb = random_kraus(d_b, outcomes_b, &mut rng);
        Self::product(ka, kb).expect("isometry blocks are complete")
    }

    /// Random one-way LOCC instrument: Alice's random POVM followed by an
    /// outcome-dependent random instrument on Bob.
    pub fn random_one_way(
        d_a: usize,
        d_b: usize,
        outcomes_a: usize,
        outcomes_b: usize,
        seed: u64,
    ) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ka = random_kraus(d_a, outcomes_a, &mut rng);
        let cond = (0..outcomes_a)
            .map(|_| random_kraus(d_b, outcomes_b, &mut rng))
            .collect();
        Self::one_way(ka, cond).expect("isometry blocks are complete")
    }

    pub fn dims(&self) -> BipartiteDims {
        dims(self.kraus_a[0].nrows(), self.kraus_b[0].nrows())
    }

    pub fn outcomes(&self) -> &[(usize, usize)] {
        &self.pairing
    }

    pub fn kraus_pair(&self, outcome: usize) -> (&CMatrix, &CMatrix) {
        let (a, b) = self.pairing[outcome];
        (&self.kraus_a[a], &self.kraus_b[b])
    }
}

/// Probabilistic mixture of post-measurement states.
#[derive(Debug, Clone)]
pub struct StateEnsemble {
    members: Vec<(f64, BipartiteState)>,
}

impl StateEnsemble {
    pub fn new(members: Vec<(f64, BipartiteState)>) -> Result<Self, StateError> {
        if members.iter().any(|(p, _)| !(*p >= 0.0)) {
            return Err(StateError::Channel(
                "negative probability in ensemble".into(),
            ));
        }
        let total: f64 = members.iter().map(|(p, _)| p).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(StateError::Channel(format!(
                "ensemble probabilities sum to {total}"
            )));
        }
        Ok(Self { members })
    }

    pub fn members(&self) -> &[(f64, BipartiteState)] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn total_probability(&self) -> f64 {
        self.members.iter().map(|(p, _)| p).sum()
    }

    /// `Σ p_i f(ρ_i)`.
    pub fn average<E>(
        &self,
        mut f: impl FnMut(&BipartiteState) -> Result<f64, E>,
    ) -> Result<f64, E> {
        let mut acc = 0.0;
        for (p, s) in &self.members {
            acc += p * f(s)?;
        }
        Ok(acc)
    }
}

pub fn apply_local_channel(
    rho: &BipartiteState,
    ch: &LocalKrausChannel,
) -> Result<StateEnsemble, StateError> {
    if ch.dims() != rho.dims() {
        return Err(StateError::Matrix(MatrixError::InvalidDims {
            expected: rho.dim(),
            found: ch.dims().total(),
            detail: format!(
                "channel acts on {} but state lives on {}",
                ch.dims(),
                rho.dims()
            ),
        }));
    }
    let mut members = Vec::new();
    for outcome in 0..ch.outcomes().len() {
        let (ka, kb) = ch.kraus_pair(outcome);
        let k = ka.kronecker(kb);
        let out = HermitianMatrix::hermitian_part(&(&k * rho.rho().as_matrix() * k.adjoint()));
        let p = out.trace();
        if p < ZERO_PROBABILITY {
            continue;
        }
        members.push((p, BipartiteState::from_unnormalized(out, rho.dims())?));
    }
    StateEnsemble::new(members)
}

/// Schmidt coefficients (descending) of a pure state on `d_a ⊗ d_b`.
pub fn schmidt_coefficients(psi: &CVector, d_a: usize, d_b: usize) -> Vec<f64> {
    let coeff = CMatrix::from_fn(d_a, d_b, |i, j| psi[i * d_b + j]);
    let mut s: Vec<f64> = coeff.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Real symmetric helper used by tests and examples.
pub fn real_state(m: &DMatrix<f64>, d_a: usize, d_b: usize) -> Result<BipartiteState, StateError> {
    Ok(BipartiteState::new(
        HermitianMatrix::from_real(m)?,
        BipartiteDims::new(d_a, d_b)?,
    )?)
}
