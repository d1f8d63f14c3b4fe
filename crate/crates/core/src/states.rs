//! Three-party states on (ℂ^d)^⊗3: named states, the Acín canonical family,
//! biseparable and product compositions, the GHZ basis, Haar-random sampling
//! and the JSON state-file format.
//!
//! Basis ordering is big-endian with party A first: |ijk⟩ sits at index
//! `i·d² + j·d + k`.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{kron3, vector_dot_sigma, ComplexMatrix, C64, ONE, ZERO};
use crate::rng::{self, Rng};

pub const NORM_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Smallest eigenvalue tolerated in a density matrix.
pub const EIGEN_FLOOR: f64 = -1e-10;

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    Pure(Vec<C64>),
    Mixed(ComplexMatrix),
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    local_dim: usize,
    repr: Repr,
}

impl QuantumState {
    /// A pure state from amplitudes in basis order. The vector must already
    /// be normalised to 1e-12.
    pub fn from_amplitudes(local_dim: usize, amplitudes: Vec<C64>) -> Result<Self> {
        check_local_dim(local_dim)?;
        let expected = local_dim.pow(3);
        if amplitudes.len() != expected {
            return Err(Error::AmplitudeCount {
                local_dim,
                expected,
                found: amplitudes.len(),
            });
        }
        let norm = vec_norm(&amplitudes);
        if (norm - 1.0).abs() >= NORM_TOL {
            return Err(Error::Invariant(format!(
                "pure state norm is {norm}, expected 1 within {NORM_TOL:e}"
            )));
        }
        Ok(Self {
            local_dim,
            repr: Repr::Pure(amplitudes),
        })
    }

    /// A pure state from an arbitrary nonzero vector, rescaled to unit norm.
    pub fn normalized(local_dim: usize, mut amplitudes: Vec<C64>) -> Result<Self> {
        let norm = vec_norm(&amplitudes);
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Invariant("cannot normalise a zero vector".into()));
        }
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Self::from_amplitudes(local_dim, amplitudes)
    }

    /// A density matrix; checked for Hermiticity, unit trace and positivity.
    pub fn from_density(local_dim: usize, density: ComplexMatrix) -> Result<Self> {
        check_local_dim(local_dim)?;
        let n = local_dim.pow(3);
        if density.rows() != n || density.cols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: density.rows().max(density.cols()),
            });
        }
        let herm = density.hermiticity_residual();
        if herm >= HERMITIAN_TOL {
            return Err(Error::Invariant(format!(
                "density matrix is not Hermitian (residual {herm:e})"
            )));
        }
        let tr = density.trace().re;
        if (tr - 1.0).abs() >= TRACE_TOL {
            return Err(Error::Invariant(format!(
                "density matrix trace is {tr}, expected 1 within {TRACE_TOL:e}"
            )));
        }
        let min_eig = density.hermitian_eigenvalues()[0];
        if min_eig < EIGEN_FLOOR {
            return Err(Error::Invariant(format!(
                "density matrix has negative eigenvalue {min_eig:e}"
            )));
        }
        Ok(Self {
            local_dim,
            repr: Repr::Mixed(density),
        })
    }

    /// 𝟙/d³.
    pub fn maximally_mixed(local_dim: usize) -> Result<Self> {
        check_local_dim(local_dim)?;
        let n = local_dim.pow(3);
        Self::from_density(
            local_dim,
            ComplexMatrix::identity(n).scale_re(1.0 / n as f64),
        )
    }

    /// Computational basis state |index⟩.
    pub fn basis(local_dim: usize, index: usize) -> Result<Self> {
        check_local_dim(local_dim)?;
        let n = local_dim.pow(3);
        if index >= n {
            return Err(Error::Domain(format!("basis index {index} >= {n}")));
        }
        let mut amps = vec![ZERO; n];
        amps[index] = ONE;
        Self::from_amplitudes(local_dim, amps)
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    /// Dimension d³ of the full space.
    pub fn dim(&self) -> usize {
        self.local_dim.pow(3)
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.repr, Repr::Pure(_))
    }

    pub fn amplitudes(&self) -> Option<&[C64]> {
        match &self.repr {
            Repr::Pure(a) => Some(a),
            Repr::Mixed(_) => None,
        }
    }

    /// The density matrix, materialised for pure states.
    pub fn density(&self) -> ComplexMatrix {
        match &self.repr {
            Repr::Pure(a) => ComplexMatrix::outer(a),
            Repr::Mixed(m) => m.clone(),
        }
    }

    /// ⟨ψ|O|ψ⟩ for pure states, Tr[Oρ] for mixed ones.
    pub fn expectation(&self, op: &ComplexMatrix) -> C64 {
        assert_eq!(op.rows(), self.dim(), "operator does not act on this state");
        match &self.repr {
            Repr::Pure(a) => {
                let oa = op.mul_vec(a);
                a.iter().zip(&oa).map(|(x, y)| x.conj() * y).sum()
            }
            Repr::Mixed(rho) => {
                let n = self.dim();
                let mut acc = ZERO;
                for r in 0..n {
                    for k in 0..n {
                        acc += op.get(r, k) * rho.get(k, r);
                    }
                }
                acc
            }
        }
    }

    /// Convex combination p·a + (1−p)·b as a density matrix.
    pub fn mixture(p: f64, a: &QuantumState, b: &QuantumState) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain(format!("mixing weight {p} outside [0,1]")));
        }
        if a.local_dim != b.local_dim {
            return Err(Error::DimensionMismatch {
                expected: a.local_dim,
                found: b.local_dim,
            });
        }
        let rho = &a.density().scale_re(p) + &b.density().scale_re(1.0 - p);
        Self::from_density(a.local_dim, rho)
    }

    /// (U_A ⊗ U_B ⊗ U_C) applied to the state.
    pub fn apply_local(&self, unitaries: [&ComplexMatrix; 3]) -> Result<Self> {
        for u in unitaries {
            if u.rows() != self.local_dim || u.cols() != self.local_dim {
                return Err(Error::DimensionMismatch {
                    expected: self.local_dim,
                    found: u.rows(),
                });
            }
        }
        let u = kron3(unitaries[0], unitaries[1], unitaries[2]);
        let repr = match &self.repr {
            Repr::Pure(a) => Repr::Pure(u.mul_vec(a)),
            Repr::Mixed(rho) => Repr::Mixed(&(&u * rho) * &u.adjoint()),
        };
        Ok(Self {
            local_dim: self.local_dim,
            repr,
        })
    }

    /// |⟨a|b⟩|² for two pure states; None if either is mixed.
    pub fn overlap(&self, other: &QuantumState) -> Option<f64> {
        let (a, b) = (self.amplitudes()?, other.amplitudes()?);
        let ip: C64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
        Some(ip.norm_sqr())
    }
}

fn check_local_dim(d: usize) -> Result<()> {
    if d < 2 {
        Err(Error::LocalDimension(d))
    } else {
        Ok(())
    }
}

fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// d^{-1/2} Σ_j |jjj⟩.
pub fn make_ghz(d: usize) -> Result<QuantumState> {
    check_local_dim(d)?;
    let mut amps = vec![ZERO; d.pow(3)];
    let a = C64::new(1.0 / (d as f64).sqrt(), 0.0);
    for j in 0..d {
        amps[j * d * d + j * d + j] = a;
    }
    QuantumState::normalized(d, amps)
}

/// (|001⟩ + |010⟩ + |100⟩)/√3.
pub fn make_w() -> QuantumState {
    let a = C64::new(1.0 / 3f64.sqrt(), 0.0);
    let mut amps = vec![ZERO; 8];
    for i in [1, 2, 4] {
        amps[i] = a;
    }
    QuantumState::normalized(2, amps).expect("W state is normalisable")
}

/// Coordinates (λ₀..λ₄, φ) of the Acín canonical form
/// λ₀|000⟩ + λ₁e^{iφ}|100⟩ + λ₂|101⟩ + λ₃|110⟩ + λ₄|111⟩.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AcinParams {
    lambdas: [f64; 5],
    phi: f64,
}

impl AcinParams {
    pub fn new(lambdas: [f64; 5], phi: f64) -> Result<Self> {
        if lambdas.iter().any(|&l| l < 0.0 || !l.is_finite()) {
            return Err(Error::Invariant(format!(
                "Acín coefficients must be nonnegative, got {lambdas:?}"
            )));
        }
        let sum: f64 = lambdas.iter().map(|l| l * l).sum();
        if (sum - 1.0).abs() >= NORM_TOL {
            return Err(Error::Invariant(format!(
                "Acín coefficients satisfy Σλ² = {sum}, expected 1"
            )));
        }
        if !(0.0..=PI).contains(&phi) {
            return Err(Error::Invariant(format!("Acín phase {phi} outside [0, π]")));
        }
        Ok(Self { lambdas, phi })
    }

    /// The two-term slice cos β|000⟩ + sin β|111⟩ with λ₀λ₄ = `mu`.
    pub fn ghz_slice(mu: f64) -> Result<Self> {
        if !(0.0..=0.5).contains(&mu) {
            return Err(Error::Domain(format!("μ = {mu} outside [0, 1/2]")));
        }
        let beta = 0.5 * (2.0 * mu).asin();
        Self::schmidt(beta)
    }

    /// cos β|000⟩ + sin β|111⟩ for β ∈ [0, π/2].
    pub fn schmidt(beta: f64) -> Result<Self> {
        let (s, c) = beta.sin_cos();
        Self::new([c, 0.0, 0.0, 0.0, s], 0.0)
    }

    /// Random parameters: |Gaussian| coefficients normalised, φ uniform.
    pub fn random(rng: &mut Rng) -> Self {
        let mut l = [0.0f64; 5];
        for x in &mut l {
            let g: f64 = rng.sample(StandardNormal);
            *x = g.abs();
        }
        let n = l.iter().map(|x| x * x).sum::<f64>().sqrt();
        l.iter_mut().for_each(|x| *x /= n);
        let phi = rng.random_range(0.0..=PI);
        // Rounding can leave Σλ² a few ulps from 1; the constructor tolerates that.
        Self::new(l, phi).expect("normalised random parameters")
    }

    pub fn lambdas(&self) -> [f64; 5] {
        self.lambdas
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// μ = λ₀λ₄.
    pub fn mu(&self) -> f64 {
        self.lambdas[0] * self.lambdas[4]
    }

    /// Three-tangle on the canonical form, 4λ₀²λ₄².
    pub fn tau3(&self) -> f64 {
        4.0 * self.mu() * self.mu()
    }

    /// Same μ, with λ₁, λ₂, λ₃, φ replaced. The free weights are rescaled to
    /// fill the norm left over by λ₀, λ₄.
    pub fn with_free_part(&self, free: [f64; 3], phi: f64) -> Result<Self> {
        let l0 = self.lambdas[0];
        let l4 = self.lambdas[4];
        let room = 1.0 - l0 * l0 - l4 * l4;
        let fnorm = free.iter().map(|x| x * x).sum::<f64>().sqrt();
        let scale = if fnorm > 0.0 { room.max(0.0).sqrt() / fnorm } else { 0.0 };
        Self::new(
            [l0, free[0] * scale, free[1] * scale, free[2] * scale, l4],
            phi,
        )
    }
}

pub fn make_acin(p: &AcinParams) -> QuantumState {
    let [l0, l1, l2, l3, l4] = p.lambdas;
    let mut amps = vec![ZERO; 8];
    amps[0b000] = C64::new(l0, 0.0);
    amps[0b100] = C64::from_polar(l1, p.phi);
    amps[0b101] = C64::new(l2, 0.0);
    amps[0b110] = C64::new(l3, 0.0);
    amps[0b111] = C64::new(l4, 0.0);
    QuantumState::from_amplitudes(2, amps).expect("AcinParams are normalised")
}

/// (|ijk⟩ + sign·|ī j̄ k̄⟩)/√2.
pub fn make_ghz_basis_element(i: u8, j: u8, k: u8, positive: bool) -> Result<QuantumState> {
    if i > 1 || j > 1 || k > 1 {
        return Err(Error::Domain(format!("GHZ basis labels must be bits, got ({i},{j},{k})")));
    }
    let idx = (4 * i + 2 * j + k) as usize;
    let bar = 7 - idx;
    let s = 1.0 / 2f64.sqrt();
    let mut amps = vec![ZERO; 8];
    amps[idx] = C64::new(s, 0.0);
    amps[bar] = C64::new(if positive { s } else { -s }, 0.0);
    QuantumState::from_amplitudes(2, amps)
}

/// All eight GHZ-basis states with their labels.
pub fn ghz_basis() -> Vec<((u8, u8, u8, bool), QuantumState)> {
    let mut out = Vec::with_capacity(8);
    for j in 0..2u8 {
        for k in 0..2u8 {
            for positive in [true, false] {
                let label = (0, j, k, positive);
                out.push((label, make_ghz_basis_element(0, j, k, positive).unwrap()));
            }
        }
    }
    out
}

/// Which party is split off from the other two.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Cut {
    /// A | BC
    A,
    /// B | AC
    B,
    /// C | AB
    C,
}

impl Cut {
    pub const ALL: [Cut; 3] = [Cut::A, Cut::B, Cut::C];

    /// Splits the full qubit index (a,b,c) into (single index, pair index).
    fn split(self, a: usize, b: usize, c: usize) -> (usize, usize) {
        match self {
            Cut::A => (a, 2 * b + c),
            Cut::B => (b, 2 * a + c),
            Cut::C => (c, 2 * a + b),
        }
    }
}

/// ρ_single ⊗ ρ_pair arranged according to `cut`. Pure inputs give a pure
/// output; otherwise the result is a density matrix.
pub fn make_biseparable(cut: Cut, single: &QuantumOneOrTwo, pair: &QuantumOneOrTwo) -> Result<QuantumState> {
    if single.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: single.dim(),
        });
    }
    if pair.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: pair.dim(),
        });
    }
    let idx = |n: usize| (n >> 2 & 1, n >> 1 & 1, n & 1);
    match (single, pair) {
        (QuantumOneOrTwo::Pure(s), QuantumOneOrTwo::Pure(p)) => {
            let amps = (0..8)
                .map(|n| {
                    let (a, b, c) = idx(n);
                    let (x, yz) = cut.split(a, b, c);
                    s[x] * p[yz]
                })
                .collect();
            QuantumState::normalized(2, amps)
        }
        _ => {
            let (rs, rp) = (single.density(), pair.density());
            let mut rho = ComplexMatrix::zeros(8, 8);
            for r in 0..8 {
                let (a, b, c) = idx(r);
                let (x, yz) = cut.split(a, b, c);
                for col in 0..8 {
                    let (a2, b2, c2) = idx(col);
                    let (x2, yz2) = cut.split(a2, b2, c2);
                    rho.set(r, col, rs.get(x, x2) * rp.get(yz, yz2));
                }
            }
            QuantumState::from_density(2, rho)
        }
    }
}

/// A one- or two-qubit state used as a factor of a biseparable state.
#[derive(Debug, Clone, PartialEq)]
pub enum QuantumOneOrTwo {
    Pure(Vec<C64>),
    Mixed(ComplexMatrix),
}

impl QuantumOneOrTwo {
    pub fn dim(&self) -> usize {
        match self {
            Self::Pure(v) => v.len(),
            Self::Mixed(m) => m.rows(),
        }
    }

    pub fn density(&self) -> ComplexMatrix {
        match self {
            Self::Pure(v) => ComplexMatrix::outer(v),
            Self::Mixed(m) => m.clone(),
        }
    }

    pub fn ket0() -> Self {
        Self::Pure(vec![ONE, ZERO])
    }

    /// (|00⟩ + |11⟩)/√2.
    pub fn phi_plus() -> Self {
        let s = C64::new(1.0 / 2f64.sqrt(), 0.0);
        Self::Pure(vec![s, ZERO, ZERO, s])
    }

    /// Single-qubit state (𝟙 + r·σ)/2 for a Bloch vector with |r| ≤ 1.
    pub fn bloch(r: [f64; 3]) -> Result<Self> {
        let len = r.iter().map(|x| x * x).sum::<f64>().sqrt();
        if len > 1.0 + 1e-12 {
            return Err(Error::Domain(format!("Bloch vector length {len} > 1")));
        }
        let m = &ComplexMatrix::identity(2) + &vector_dot_sigma(&r);
        Ok(Self::Mixed(m.scale_re(0.5)))
    }
}

/// ρ_A ⊗ ρ_B ⊗ ρ_C.
pub fn make_product(a: &QuantumOneOrTwo, b: &QuantumOneOrTwo, c: &QuantumOneOrTwo) -> Result<QuantumState> {
    for f in [a, b, c] {
        if f.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: f.dim(),
            });
        }
    }
    if let (QuantumOneOrTwo::Pure(x), QuantumOneOrTwo::Pure(y), QuantumOneOrTwo::Pure(z)) = (a, b, c) {
        let mut amps = Vec::with_capacity(8);
        for xa in x {
            for yb in y {
                for zc in z {
                    amps.push(xa * yb * zc);
                }
            }
        }
        return QuantumState::normalized(2, amps);
    }
    QuantumState::from_density(2, kron3(&a.density(), &b.density(), &c.density()))
}

/// Standard complex Gaussian vector of length n (each component has
/// E|z|² = 1).
fn gaussian_vector(n: usize, rng: &mut Rng) -> Vec<C64> {
    let s = 1.0 / 2f64.sqrt();
    (0..n)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            C64::new(re * s, im * s)
        })
        .collect()
}

/// Haar-random unit vector in ℂ^n.
pub fn haar_vector(n: usize, rng: &mut Rng) -> Vec<C64> {
    let mut v = gaussian_vector(n, rng);
    let norm = vec_norm(&v);
    v.iter_mut().for_each(|z| *z /= norm);
    v
}

/// Haar-random pure state on (ℂ^d)^⊗3 drawn from `rng`.
pub fn haar_random_pure_with(d: usize, rng: &mut Rng) -> Result<QuantumState> {
    check_local_dim(d)?;
    QuantumState::normalized(d, haar_vector(d.pow(3), rng))
}

/// Haar-random pure state, deterministic in `seed`.
pub fn haar_random_pure(d: usize, seed: u64) -> Result<QuantumState> {
    haar_random_pure_with(d, &mut rng::seeded(seed))
}

/// Haar-random n×n unitary: Gram–Schmidt QR of a complex Gaussian matrix.
/// Gram–Schmidt leaves R with a positive real diagonal, which is the phase
/// normalisation that makes Q exactly Haar distributed.
pub fn haar_unitary(n: usize, rng: &mut Rng) -> ComplexMatrix {
    let mut cols: Vec<Vec<C64>> = (0..n).map(|_| gaussian_vector(n, rng)).collect();
    for k in 0..n {
        for j in 0..k {
            let (done, rest) = cols.split_at_mut(k);
            let q = &done[j];
            let proj: C64 = q.iter().zip(&rest[0]).map(|(a, b)| a.conj() * b).sum();
            rest[0].iter_mut().zip(q).for_each(|(v, qi)| *v -= proj * qi);
        }
        let norm = vec_norm(&cols[k]);
        cols[k].iter_mut().for_each(|z| *z /= norm);
    }
    let mut u = ComplexMatrix::zeros(n, n);
    for (c, col) in cols.iter().enumerate() {
        for (r, &z) in col.iter().enumerate() {
            u.set(r, c, z);
        }
    }
    u
}

/// Single-qubit state with Bloch vector uniform in the unit ball.
pub fn random_qubit_mixed(rng: &mut Rng) -> QuantumOneOrTwo {
    let g: [f64; 3] = [
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
    ];
    let len = g.iter().map(|x| x * x).sum::<f64>().sqrt();
    let radius = rng.random::<f64>().cbrt();
    let r = g.map(|x| x / len * radius);
    QuantumOneOrTwo::bloch(r).expect("radius ≤ 1")
}

/// On-disk layout of a state file (JSON).
#[derive(Debug, Serialize, Deserialize)]
pub struct StateFile {
    pub local_dim: usize,
    pub kind: StateKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<Vec<Vec<[f64; 2]>>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Pure,
    Mixed,
}

impl From<&QuantumState> for StateFile {
    fn from(s: &QuantumState) -> Self {
        let pair = |z: &C64| [z.re, z.im];
        match &s.repr {
            Repr::Pure(a) => StateFile {
                local_dim: s.local_dim,
                kind: StateKind::Pure,
                amplitudes: Some(a.iter().map(pair).collect()),
                density: None,
            },
            Repr::Mixed(m) => StateFile {
                local_dim: s.local_dim,
                kind: StateKind::Mixed,
                amplitudes: None,
                density: Some(
                    (0..m.rows())
                        .map(|r| (0..m.cols()).map(|c| pair(&m.get(r, c))).collect())
                        .collect(),
                ),
            },
        }
    }
}

impl TryFrom<StateFile> for QuantumState {
    type Error = Error;

    fn try_from(f: StateFile) -> Result<Self> {
        let z = |p: &[f64; 2]| C64::new(p[0], p[1]);
        match f.kind {
            StateKind::Pure => {
                let amps = f
                    .amplitudes
                    .ok_or_else(|| Error::Parse("pure state file lacks `amplitudes`".into()))?;
                QuantumState::from_amplitudes(f.local_dim, amps.iter().map(z).collect())
            }
            StateKind::Mixed => {
                let rows = f
                    .density
                    .ok_or_else(|| Error::Parse("mixed state file lacks `density`".into()))?;
                check_local_dim(f.local_dim)?;
                let n = f.local_dim.pow(3);
                if rows.len() != n {
                    return Err(Error::AmplitudeCount {
                        local_dim: f.local_dim,
                        expected: n,
                        found: rows.len(),
                    });
                }
                let rows: Vec<Vec<C64>> =
                    rows.iter().map(|r| r.iter().map(z).collect()).collect();
                QuantumState::from_density(f.local_dim, ComplexMatrix::from_rows(&rows)?)
            }
        }
    }
}

pub fn state_to_json(state: &QuantumState) -> Result<String> {
    Ok(serde_json::to_string_pretty(&StateFile::from(state))?)
}

pub fn state_from_json(text: &str) -> Result<QuantumState> {
    let file: StateFile = serde_json::from_str(text)?;
    QuantumState::try_from(file)
}

pub fn save_state(state: &QuantumState, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, state_to_json(state)?)?;
    Ok(())
}

pub fn load_state(path: impl AsRef<Path>) -> Result<QuantumState> {
    state_from_json(&fs::read_to_string(path)?)
}
