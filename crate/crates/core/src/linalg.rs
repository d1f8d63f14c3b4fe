//! Dense complex matrices on small spaces, spin observables, direction
//! frames and Heisenberg–Weyl operators.
//!
//! Every space handled here is at most 125-dimensional (three qudits with
//! d ≤ 5), so matrices are stored densely in row-major order and all products
//! are the naive triple loop.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Tolerance for algebraic identities between matrices (max-norm).
pub const ALGEBRA_TOL: f64 = 1e-12;
/// Tolerance on the norm of a direction vector.
pub const UNIT_TOL: f64 = 1e-12;
/// A frame counts as orthogonal when |n₁·n₂| is below this.
pub const ORTHO_TOL: f64 = 1e-10;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self.get(r, c);
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, ONE);
        }
        m
    }

    /// Builds a matrix from row-major entries. Fails if the entry count does
    /// not equal `rows * cols`.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch {
                    expected: c,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Self {
            rows: r,
            cols: c,
            data,
        })
    }

    pub fn diagonal(entries: &[C64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &z) in entries.iter().enumerate() {
            m.set(i, i, z);
        }
        m
    }

    /// Rank-one projector |v⟩⟨v|.
    pub fn outer(v: &[C64]) -> Self {
        let n = v.len();
        let mut m = Self::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                m.set(r, c, v[r] * v[c].conj());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, z: C64) {
        self.data[r * self.cols + c] = z;
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                m.set(c, r, self.get(r, c).conj());
            }
        }
        m
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::identity(self.rows);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.cols, "matrix-vector dimension mismatch");
        (0..self.rows)
            .map(|r| {
                let row = &self.data[r * self.cols..(r + 1) * self.cols];
                row.iter().zip(v).map(|(a, b)| a * b).sum()
            })
            .collect()
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// ‖self − other‖ in the entrywise max-norm.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.max_abs_diff(other) < tol
    }

    pub fn hermiticity_residual(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn unitarity_residual(&self) -> f64 {
        (&self.adjoint() * self).max_abs_diff(&Self::identity(self.cols))
    }

    pub fn is_hermitian(&self) -> bool {
        self.is_square() && self.hermiticity_residual() < ALGEBRA_TOL
    }

    pub fn is_unitary(&self) -> bool {
        self.is_square() && self.unitarity_residual() < ALGEBRA_TOL
    }

    /// Commutator [self, other].
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    pub fn anticommutator(&self, other: &Self) -> Self {
        &(self * other) + &(other * self)
    }

    /// Eigenvalues of a Hermitian matrix in ascending order.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let (mut vals, _) = self.hermitian_eigen();
        vals.sort_by(f64::total_cmp);
        vals
    }

    /// Eigen-decomposition of a Hermitian matrix; eigenvectors are returned
    /// as columns of the second element, paired with the eigenvalues.
    pub fn hermitian_eigen(&self) -> (Vec<f64>, Vec<Vec<C64>>) {
        assert!(self.is_square(), "eigensolve requires a square matrix");
        let m = DMatrix::from_row_slice(self.rows, self.cols, &self.data);
        let eig = m.symmetric_eigen();
        let vals = eig.eigenvalues.iter().copied().collect();
        let vecs = (0..self.cols)
            .map(|c| eig.eigenvectors.column(c).iter().copied().collect())
            .collect();
        (vals, vecs)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == ZERO {
                    continue;
                }
                for c in 0..rhs.cols {
                    out.data[r * rhs.cols + c] += a * rhs.get(k, c);
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Kronecker product a ⊗ b.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut out = ComplexMatrix::zeros(rows, cols);
    for ar in 0..a.rows {
        for ac in 0..a.cols {
            let z = a.get(ar, ac);
            if z == ZERO {
                continue;
            }
            for br in 0..b.rows {
                for bc in 0..b.cols {
                    out.set(ar * b.rows + br, ac * b.cols + bc, z * b.get(br, bc));
                }
            }
        }
    }
    out
}

pub fn kron3(a: &ComplexMatrix, b: &ComplexMatrix, c: &ComplexMatrix) -> ComplexMatrix {
    kron(&kron(a, b), c)
}

pub fn sigma_x() -> ComplexMatrix {
    ComplexMatrix {
        rows: 2,
        cols: 2,
        data: vec![ZERO, ONE, ONE, ZERO],
    }
}

pub fn sigma_y() -> ComplexMatrix {
    ComplexMatrix {
        rows: 2,
        cols: 2,
        data: vec![ZERO, -I, I, ZERO],
    }
}

pub fn sigma_z() -> ComplexMatrix {
    ComplexMatrix {
        rows: 2,
        cols: 2,
        data: vec![ONE, ZERO, ZERO, -ONE],
    }
}

/// The three Pauli matrices in (x, y, z) order.
pub fn paulis() -> [ComplexMatrix; 3] {
    [sigma_x(), sigma_y(), sigma_z()]
}

/// Real unit vector in ℝ³.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct Direction([f64; 3]);

impl Direction {
    pub const X: Direction = Direction([1.0, 0.0, 0.0]);
    pub const Y: Direction = Direction([0.0, 1.0, 0.0]);
    pub const Z: Direction = Direction([0.0, 0.0, 1.0]);

    /// Accepts `v` only if it has unit norm to within 1e-12.
    pub fn new(v: [f64; 3]) -> Result<Self> {
        let norm = norm3(&v);
        if (norm - 1.0).abs() >= UNIT_TOL || !norm.is_finite() {
            return Err(Error::NonUnitDirection { norm });
        }
        Ok(Self(v))
    }

    /// Rescales a nonzero vector to unit length.
    pub fn normalized(v: [f64; 3]) -> Result<Self> {
        let norm = norm3(&v);
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NonUnitDirection { norm });
        }
        Ok(Self([v[0] / norm, v[1] / norm, v[2] / norm]))
    }

    /// Polar angle θ from ẑ and azimuth φ.
    pub fn from_spherical(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Self([st * cp, st * sp, ct])
    }

    pub fn components(&self) -> [f64; 3] {
        self.0
    }

    pub fn dot(&self, other: &Direction) -> f64 {
        dot3(&self.0, &other.0)
    }

    pub fn cross(&self, other: &Direction) -> [f64; 3] {
        cross3(&self.0, &other.0)
    }
}

impl TryFrom<[f64; 3]> for Direction {
    type Error = Error;

    fn try_from(v: [f64; 3]) -> Result<Self> {
        Direction::new(v)
    }
}

impl From<Direction> for [f64; 3] {
    fn from(d: Direction) -> Self {
        d.0
    }
}

pub(crate) fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross3(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn norm3(v: &[f64; 3]) -> f64 {
    dot3(v, v).sqrt()
}

/// Ordered pair of measurement directions with c = n₁·n₂ and m = n₁×n₂.
///
/// Orthogonality is not enforced; see [`OrthoFrame::is_orthogonal`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrthoFrame {
    pub n1: Direction,
    pub n2: Direction,
    pub c: f64,
    pub m: [f64; 3],
}

impl OrthoFrame {
    pub fn new(n1: Direction, n2: Direction) -> Self {
        Self {
            n1,
            n2,
            c: n1.dot(&n2),
            m: n1.cross(&n2),
        }
    }

    pub fn xy() -> Self {
        Self::new(Direction::X, Direction::Y)
    }

    pub fn is_orthogonal(&self) -> bool {
        self.c.abs() < ORTHO_TOL
    }

    /// Largest disagreement between stored and recomputed c, m.
    pub fn consistency_residual(&self) -> f64 {
        let fresh = Self::new(self.n1, self.n2);
        let dm = (0..3)
            .map(|i| (fresh.m[i] - self.m[i]).abs())
            .fold(0.0, f64::max);
        dm.max((fresh.c - self.c).abs())
    }
}

/// σ_n = n_x σ_x + n_y σ_y + n_z σ_z.
pub fn spin_observable(n: &Direction) -> ComplexMatrix {
    vector_dot_sigma(&n.0)
}

/// v·σ for an arbitrary real 3-vector (not necessarily unit).
pub fn vector_dot_sigma(v: &[f64; 3]) -> ComplexMatrix {
    let [x, y, z] = *v;
    ComplexMatrix {
        rows: 2,
        cols: 2,
        data: vec![
            C64::new(z, 0.0),
            C64::new(x, -y),
            C64::new(x, y),
            C64::new(-z, 0.0),
        ],
    }
}

/// σ_{na} ⊗ σ_{nb} ⊗ σ_{nc}.
pub fn triple_observable(na: &Direction, nb: &Direction, nc: &Direction) -> ComplexMatrix {
    kron3(&spin_observable(na), &spin_observable(nb), &spin_observable(nc))
}

/// Shift operator X|j⟩ = |j+1 mod d⟩.
pub fn shift(d: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(d, d);
    for j in 0..d {
        m.set((j + 1) % d, j, ONE);
    }
    m
}

/// Primitive d-th root of unity ω = exp(2πi/d).
pub fn omega(d: usize) -> C64 {
    root_of_unity(d, 1)
}

/// ω^k for integer k, reduced modulo d before exponentiation.
pub fn root_of_unity(d: usize, k: i64) -> C64 {
    let k = k.rem_euclid(d as i64) as f64;
    C64::from_polar(1.0, 2.0 * PI * k / d as f64)
}

/// Clock operator Z|j⟩ = ω^j |j⟩.
pub fn clock(d: usize) -> ComplexMatrix {
    let diag: Vec<C64> = (0..d).map(|j| root_of_unity(d, j as i64)).collect();
    ComplexMatrix::diagonal(&diag)
}

/// Symplectic form ⟨(p₁,q₁),(p₂,q₂)⟩ = p₁q₂ − q₁p₂ mod d, in [0, d).
pub fn symplectic(d: usize, a: (usize, usize), b: (usize, usize)) -> usize {
    let d = d as i64;
    let v = a.0 as i64 * b.1 as i64 - a.1 as i64 * b.0 as i64;
    v.rem_euclid(d) as usize
}

/// Phase multiplying X^p Z^q in the Weyl operator.
///
/// Odd d: ω^{−pq·2⁻¹} with 2⁻¹ = (d+1)/2 the inverse of 2 mod d, which keeps
/// W(p)^d = 𝟙. Even d has no inverse of 2, so the half-angle root
/// τ^{−pq}, τ = exp(iπ/d), is used.
pub fn weyl_phase(d: usize, p: usize, q: usize) -> C64 {
    let pq = (p * q) as i64;
    if d % 2 == 1 {
        let inv2 = d.div_ceil(2) as i64;
        root_of_unity(d, -pq * inv2)
    } else {
        let k = pq.rem_euclid(2 * d as i64) as f64;
        C64::from_polar(1.0, -PI * k / d as f64)
    }
}

/// Heisenberg–Weyl operator W(p, q) = phase · X^p Z^q on ℂ^d.
pub fn weyl_operator(d: usize, p: usize, q: usize) -> Result<ComplexMatrix> {
    if d < 2 {
        return Err(Error::LocalDimension(d));
    }
    let (p, q) = (p % d, q % d);
    // X^p Z^q |j⟩ = ω^{qj} |j+p⟩
    let phase = weyl_phase(d, p, q);
    let mut m = ComplexMatrix::zeros(d, d);
    for j in 0..d {
        m.set((j + p) % d, j, phase * root_of_unity(d, (q * j) as i64));
    }
    Ok(m)
}
