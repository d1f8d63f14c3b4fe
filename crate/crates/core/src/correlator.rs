//! The four stabiliser-like observables of a direction frame
//!
//! ```text
//! O₁ = σ_{n₁} ⊗ σ_{n₂} ⊗ σ_{n₂}
//! O₂ = σ_{n₂} ⊗ σ_{n₁} ⊗ σ_{n₂}
//! O₃ = σ_{n₂} ⊗ σ_{n₂} ⊗ σ_{n₁}
//! O₄ = σ_{n₁} ⊗ σ_{n₁} ⊗ σ_{n₁}
//! ```
//!
//! their expectation values, and numerical residuals of the operator
//! identities they satisfy.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    kron3, paulis, spin_observable, triple_observable, vector_dot_sigma, ComplexMatrix,
    OrthoFrame, C64, I,
};
use crate::states::QuantumState;

/// Imaginary parts above this indicate a non-Hermitian operator slipped in.
pub const IMAG_RESIDUE_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct StabQuad {
    pub o1: ComplexMatrix,
    pub o2: ComplexMatrix,
    pub o3: ComplexMatrix,
    pub o4: ComplexMatrix,
    pub frame: OrthoFrame,
}

impl StabQuad {
    pub fn operators(&self) -> [&ComplexMatrix; 4] {
        [&self.o1, &self.o2, &self.o3, &self.o4]
    }
}

/// Expectations e_i = ⟨O_i⟩.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelatorQuad {
    pub e1: f64,
    pub e2: f64,
    pub e3: f64,
    pub e4: f64,
}

impl CorrelatorQuad {
    pub fn as_array(&self) -> [f64; 4] {
        [self.e1, self.e2, self.e3, self.e4]
    }

    /// e₄ − e₁e₂e₃.
    pub fn functional(&self) -> f64 {
        self.e4 - self.e1 * self.e2 * self.e3
    }

    /// e₄ − e₁ − e₂ − e₃.
    pub fn mermin(&self) -> f64 {
        self.e4 - self.e1 - self.e2 - self.e3
    }
}

pub fn build_quad(frame: &OrthoFrame) -> StabQuad {
    let (n1, n2) = (&frame.n1, &frame.n2);
    StabQuad {
        o1: triple_observable(n1, n2, n2),
        o2: triple_observable(n2, n1, n2),
        o3: triple_observable(n2, n2, n1),
        o4: triple_observable(n1, n1, n1),
        frame: *frame,
    }
}

/// Real expectation of a Hermitian operator; the imaginary part is checked
/// and then dropped.
pub fn real_expectation(state: &QuantumState, op: &ComplexMatrix) -> Result<f64> {
    let z = state.expectation(op);
    if z.im.abs() > IMAG_RESIDUE_TOL {
        return Err(Error::ImaginaryResidue { residue: z.im.abs() });
    }
    Ok(z.re)
}

pub fn expectations(quad: &StabQuad, state: &QuantumState) -> Result<CorrelatorQuad> {
    if state.local_dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: state.local_dim(),
        });
    }
    Ok(CorrelatorQuad {
        e1: real_expectation(state, &quad.o1)?,
        e2: real_expectation(state, &quad.o2)?,
        e3: real_expectation(state, &quad.o3)?,
        e4: real_expectation(state, &quad.o4)?,
    })
}

/// Max-norm residuals of the frame's operator identities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityReport {
    /// [O₁,O₂] − 2ic(m·σ ⊗ 𝟙 − 𝟙 ⊗ m·σ) ⊗ 𝟙
    pub commutator: f64,
    /// O₁O₂O₃ + O₄ − 2c σ_{n₁} ⊗ σ_{n₂} ⊗ σ_{n₁}
    pub triple_product: f64,
    /// σ_{n₂}σ_{n₁}σ_{n₂} − (2c σ_{n₂} − σ_{n₁})
    pub sandwich: f64,
    /// O₁O₂O₃O₄ + 𝟙; only expected to vanish for orthogonal frames.
    pub stabiliser: f64,
    /// Largest pairwise commutator ‖[O_i,O_j]‖; vanishes for orthogonal frames.
    pub max_pairwise_commutator: f64,
}

impl IdentityReport {
    /// The three frame-general identities.
    pub fn max_general(&self) -> f64 {
        self.commutator.max(self.triple_product).max(self.sandwich)
    }
}

pub fn verify_identities(frame: &OrthoFrame) -> IdentityReport {
    let quad = build_quad(frame);
    let c = frame.c;
    let id2 = ComplexMatrix::identity(2);
    let s1 = spin_observable(&frame.n1);
    let s2 = spin_observable(&frame.n2);
    let m_sigma = vector_dot_sigma(&frame.m);

    let comm = quad.o1.commutator(&quad.o2);
    let comm_rhs = (&kron3(&m_sigma, &id2, &id2) - &kron3(&id2, &m_sigma, &id2))
        .scale(I * C64::new(2.0 * c, 0.0));

    let o123 = &(&quad.o1 * &quad.o2) * &quad.o3;
    let triple_lhs = &o123 + &quad.o4;
    let triple_rhs = kron3(&s1, &s2, &s1).scale_re(2.0 * c);

    let sandwich_lhs = &(&s2 * &s1) * &s2;
    let sandwich_rhs = &s2.scale_re(2.0 * c) - &s1;

    let stab = &(&o123 * &quad.o4) + &ComplexMatrix::identity(8);

    let ops = quad.operators();
    let mut max_comm = 0.0f64;
    for i in 0..4 {
        for j in i + 1..4 {
            max_comm = max_comm.max(ops[i].commutator(ops[j]).max_abs());
        }
    }

    IdentityReport {
        commutator: comm.max_abs_diff(&comm_rhs),
        triple_product: triple_lhs.max_abs_diff(&triple_rhs),
        sandwich: sandwich_lhs.max_abs_diff(&sandwich_rhs),
        stabiliser: stab.max_abs(),
        max_pairwise_commutator: max_comm,
    }
}

/// Three-qubit Pauli correlation tensor T_ijk = ⟨σ_i ⊗ σ_j ⊗ σ_k⟩.
///
/// Every correlator of spin observables is multilinear in the directions,
/// ⟨σ_a ⊗ σ_b ⊗ σ_c⟩ = Σ a_i b_j c_k T_ijk, so a state reduces to these 27
/// numbers for the purpose of evaluating the functional.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationTensor {
    t: [[[f64; 3]; 3]; 3],
}

impl CorrelationTensor {
    pub fn from_state(state: &QuantumState) -> Result<Self> {
        if state.local_dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: state.local_dim(),
            });
        }
        let p = paulis();
        let mut t = [[[0.0; 3]; 3]; 3];
        for (i, pi) in p.iter().enumerate() {
            for (j, pj) in p.iter().enumerate() {
                for (k, pk) in p.iter().enumerate() {
                    t[i][j][k] = real_expectation(state, &kron3(pi, pj, pk))?;
                }
            }
        }
        Ok(Self { t })
    }

    pub fn component(&self, i: usize, j: usize, k: usize) -> f64 {
        self.t[i][j][k]
    }

    #[inline]
    pub fn correlator(&self, a: &[f64; 3], b: &[f64; 3], c: &[f64; 3]) -> f64 {
        let mut acc = 0.0;
        for (ai, slab) in a.iter().zip(&self.t) {
            let mut acc_i = 0.0;
            for (bj, row) in b.iter().zip(slab) {
                acc_i += bj * (row[0] * c[0] + row[1] * c[1] + row[2] * c[2]);
            }
            acc += ai * acc_i;
        }
        acc
    }

    /// (e₁, e₂, e₃, e₄) for the pair (n₁, n₂) given as raw vectors.
    #[inline]
    pub fn quad_raw(&self, n1: &[f64; 3], n2: &[f64; 3]) -> CorrelatorQuad {
        CorrelatorQuad {
            e1: self.correlator(n1, n2, n2),
            e2: self.correlator(n2, n1, n2),
            e3: self.correlator(n2, n2, n1),
            e4: self.correlator(n1, n1, n1),
        }
    }

    pub fn quad(&self, frame: &OrthoFrame) -> CorrelatorQuad {
        self.quad_raw(&frame.n1.components(), &frame.n2.components())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Direction;
    use crate::states::{make_ghz, make_w};

    fn assert_quad(q: CorrelatorQuad, want: [f64; 4]) {
        for (a, b) in q.as_array().iter().zip(&want) {
            assert!((a - b).abs() < 1e-12, "{q:?} vs {want:?}");
        }
    }

    #[test]
    fn xy_frame_o4_is_xxx() {
        let q = build_quad(&OrthoFrame::xy());
        let x = crate::linalg::sigma_x();
        assert_eq!(q.o4, kron3(&x, &x, &x));
    }

    #[test]
    fn xy_frame_stabiliser_relation() {
        let q = build_quad(&OrthoFrame::xy());
        let prod = &(&(&q.o1 * &q.o2) * &q.o3) * &q.o4;
        assert!(prod.approx_eq(&ComplexMatrix::identity(8).scale_re(-1.0), 1e-12));
    }

    #[test]
    fn degenerate_frame_collapses_operators() {
        let q = build_quad(&OrthoFrame::new(Direction::X, Direction::X));
        assert_eq!(q.o1, q.o4);
        assert_eq!(q.o2, q.o4);
        assert_eq!(q.o3, q.o4);
    }

    #[test]
    fn ghz_expectations_on_xy() {
        let e = expectations(&build_quad(&OrthoFrame::xy()), &make_ghz(2).unwrap()).unwrap();
        assert_quad(e, [-1.0, -1.0, -1.0, 1.0]);
    }

    #[test]
    fn w_expectations_on_xy_vanish() {
        let e = expectations(&build_quad(&OrthoFrame::xy()), &make_w()).unwrap();
        assert_quad(e, [0.0; 4]);
    }

    #[test]
    fn maximally_mixed_expectations_vanish() {
        let m = QuantumState::maximally_mixed(2).unwrap();
        let f = OrthoFrame::new(
            Direction::normalized([1.0, 2.0, 3.0]).unwrap(),
            Direction::normalized([-2.0, 0.5, 1.0]).unwrap(),
        );
        assert_quad(expectations(&build_quad(&f), &m).unwrap(), [0.0; 4]);
    }

    #[test]
    fn qutrit_state_rejected() {
        let g3 = make_ghz(3).unwrap();
        let r = expectations(&build_quad(&OrthoFrame::xy()), &g3);
        assert!(matches!(r, Err(Error::DimensionMismatch { expected: 2, found: 3 })));
    }

    #[test]
    fn non_hermitian_operator_flagged() {
        let g = make_ghz(2).unwrap();
        let mut op = ComplexMatrix::zeros(8, 8);
        op.set(0, 7, C64::new(0.0, 1.0));
        assert!(matches!(
            real_expectation(&g, &op),
            Err(Error::ImaginaryResidue { .. })
        ));
    }

    #[test]
    fn orthogonal_frame_triple_product_is_minus_o4() {
        let f = OrthoFrame::new(
            Direction::normalized([1.0, 1.0, 0.0]).unwrap(),
            Direction::normalized([0.0, 0.0, 1.0]).unwrap(),
        );
        let q = build_quad(&f);
        let prod = &(&q.o1 * &q.o2) * &q.o3;
        assert!(prod.approx_eq(&q.o4.scale_re(-1.0), 1e-12));
        let r = verify_identities(&f);
        assert!(r.stabiliser < 1e-12);
        assert!(r.max_pairwise_commutator < 1e-12);
    }

    #[test]
    fn parallel_frame_commutator_exactly_zero() {
        let n = Direction::normalized([0.2, -0.7, 0.4]).unwrap();
        let r = verify_identities(&OrthoFrame::new(n, n));
        assert_eq!(r.commutator, 0.0);
        assert_eq!(r.max_pairwise_commutator, 0.0);
    }

    #[test]
    fn tensor_matches_matrix_path() {
        let w = make_w();
        let t = CorrelationTensor::from_state(&w).unwrap();
        assert!((t.component(2, 2, 2) + 1.0).abs() < 1e-12);
        assert!((t.component(0, 0, 2) - 2.0 / 3.0).abs() < 1e-12);
        let f = OrthoFrame::new(
            Direction::normalized([0.3, 0.1, 0.9]).unwrap(),
            Direction::normalized([-0.5, 0.8, 0.2]).unwrap(),
        );
        let direct = expectations(&build_quad(&f), &w).unwrap();
        let fast = t.quad(&f);
        for (a, b) in direct.as_array().iter().zip(fast.as_array()) {
            assert!((a - b).abs() < 1e-14);
        }
    }
}
