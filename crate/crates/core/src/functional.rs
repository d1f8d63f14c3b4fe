//! The multiplicative GHZ functional
//!
//! ```text
//! I(n₁, n₂; ρ) = ⟨σ_{n₁}σ_{n₁}σ_{n₁}⟩ − ⟨σ_{n₁}σ_{n₂}σ_{n₂}⟩⟨σ_{n₂}σ_{n₁}σ_{n₂}⟩⟨σ_{n₂}σ_{n₂}σ_{n₁}⟩
//! ```
//!
//! together with its closed forms on canonical state families, the
//! deterministic local-hidden-variable enumeration, the linear Mermin
//! combination, and the three-qudit version built from Weyl operators.

use serde::Serialize;

use crate::correlator::{build_quad, expectations, CorrelatorQuad};
use crate::error::{Error, Result};
use crate::linalg::{
    kron3, root_of_unity, sigma_x, symplectic, weyl_operator, ComplexMatrix, OrthoFrame, C64,
};
use crate::states::{AcinParams, QuantumState};

/// Slack allowed on |I| ≤ 2 in numerical checks.
pub const BOUND_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FunctionalValue {
    pub value: f64,
    pub modulus: f64,
    pub frame: OrthoFrame,
    pub correlators: CorrelatorQuad,
}

/// I(n₁, n₂; ρ). The frame need not be orthogonal.
pub fn eval_i(state: &QuantumState, frame: &OrthoFrame) -> Result<FunctionalValue> {
    let correlators = expectations(&build_quad(frame), state)?;
    let value = correlators.functional();
    Ok(FunctionalValue {
        value,
        modulus: value.abs(),
        frame: *frame,
        correlators,
    })
}

/// Linear Mermin combination e₄ − e₁ − e₂ − e₃ over the frame's axes.
pub fn mermin_m3(state: &QuantumState, frame: &OrthoFrame) -> Result<f64> {
    Ok(expectations(&build_quad(frame), state)?.mermin())
}

/// Deterministic ±1 outcomes; index 0 is setting n₁, index 1 is n₂.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LhvAssignment {
    pub a: [i8; 2],
    pub b: [i8; 2],
    pub c: [i8; 2],
}

impl LhvAssignment {
    /// The `index`-th of the 64 assignments (bit set → −1).
    pub fn from_index(index: u8) -> Self {
        let s = |bit: u8| if index >> bit & 1 == 1 { -1 } else { 1 };
        Self {
            a: [s(0), s(1)],
            b: [s(2), s(3)],
            c: [s(4), s(5)],
        }
    }

    /// A(n₁)B(n₁)C(n₁).
    pub fn all_first(&self) -> i8 {
        self.a[0] * self.b[0] * self.c[0]
    }

    /// [A(n₁)B(n₂)C(n₂)][A(n₂)B(n₁)C(n₂)][A(n₂)B(n₂)C(n₁)].
    pub fn mixed_product(&self) -> i8 {
        let (a, b, c) = (self.a, self.b, self.c);
        (a[0] * b[1] * c[1]) * (a[1] * b[0] * c[1]) * (a[1] * b[1] * c[0])
    }

    pub fn functional(&self) -> i8 {
        self.all_first() - self.mixed_product()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LhvReport {
    pub assignments: usize,
    /// Distinct values of the deterministic functional, ascending.
    pub attained: Vec<i8>,
    /// Mixed product equals A(n₁)B(n₁)C(n₁) for every assignment.
    pub identity_holds: bool,
}

/// Enumerates all 2⁶ deterministic assignments.
pub fn lhv_oracle() -> LhvReport {
    let mut attained = Vec::new();
    let mut identity_holds = true;
    for idx in 0..64u8 {
        let asg = LhvAssignment::from_index(idx);
        identity_holds &= asg.mixed_product() == asg.all_first();
        let v = asg.functional();
        if !attained.contains(&v) {
            attained.push(v);
        }
    }
    attained.sort_unstable();
    LhvReport {
        assignments: 64,
        attained,
        identity_holds,
    }
}

/// I(x̂, ŷ) on the Acín form: 2μ(4μ² + 1), μ = λ₀λ₄.
pub fn acin_closed_form(p: &AcinParams) -> f64 {
    closed_form_in_mu(p.mu())
}

pub fn closed_form_in_mu(mu: f64) -> f64 {
    2.0 * mu * (4.0 * mu * mu + 1.0)
}

/// (⟨xxx⟩, ⟨xyy⟩, ⟨yxy⟩, ⟨yyx⟩) on the Acín form.
pub fn acin_correlators(p: &AcinParams) -> [f64; 4] {
    let two_mu = 2.0 * p.mu();
    [two_mu, -two_mu, -two_mu, -two_mu]
}

/// I(x̂, ŷ) on cos β|000⟩ + sin β|111⟩.
pub fn schmidt_subfamily_i(beta: f64) -> f64 {
    let s = (2.0 * beta).sin();
    s * s * s + s
}

/// √τ₃ (τ₃ + 1).
pub fn tau3_relation(tau3: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&tau3) {
        return Err(Error::Domain(format!("three-tangle {tau3} outside [0, 1]")));
    }
    Ok(tau3.sqrt() * (tau3 + 1.0))
}

/// I on the W state for an orthogonal frame with ẑ-projections a₃ = ẑ·n₁,
/// b₃ = ẑ·n₂: a₃(2 − 3a₃²) − a₃³(2/3 − 3b₃²)³.
pub fn w_reduced_i(a3: f64, b3: f64) -> Result<f64> {
    if a3 * a3 + b3 * b3 > 1.0 + 1e-12 {
        return Err(Error::Domain(format!(
            "no orthonormal frame has ẑ-projections ({a3}, {b3}): a₃² + b₃² > 1"
        )));
    }
    let g = 2.0 / 3.0 - 3.0 * b3 * b3;
    Ok(a3 * (2.0 - 3.0 * a3 * a3) - a3.powi(3) * g.powi(3))
}

/// Local unitary (𝟙 − iσ_x)/√2 on every qubit. It fixes σ_x and maps σ_z to
/// ±σ_y under conjugation, so the qubit Weyl pair (X, Z) applied to the
/// relabelled state reads the (σ_x, σ_y) correlators of the original.
pub fn relabel_y_to_z(state: &QuantumState) -> Result<QuantumState> {
    let s = 1.0 / 2f64.sqrt();
    let v = &ComplexMatrix::identity(2).scale_re(s) - &sigma_x().scale(C64::new(0.0, s));
    state.apply_local([&v, &v, &v])
}

/// Generator pair (g₁, g₂) ∈ ℤ_d² × ℤ_d² with its symplectic form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct QuditGenPair {
    pub d: usize,
    pub g1: (usize, usize),
    pub g2: (usize, usize),
    pub symplectic: usize,
}

impl QuditGenPair {
    pub fn new(d: usize, g1: (usize, usize), g2: (usize, usize)) -> Result<Self> {
        if d < 2 {
            return Err(Error::Generator(format!("local dimension {d} < 2")));
        }
        for (name, g) in [("g1", g1), ("g2", g2)] {
            if g.0 >= d || g.1 >= d {
                return Err(Error::Generator(format!(
                    "{name} = ({}, {}) has components outside 0..{d}",
                    g.0, g.1
                )));
            }
        }
        Ok(Self {
            d,
            g1,
            g2,
            symplectic: symplectic(d, g1, g2),
        })
    }

    /// The phase ω^{2⟨g₁,g₂⟩} in front of the product term.
    pub fn product_phase(&self) -> C64 {
        root_of_unity(self.d, 2 * self.symplectic as i64)
    }

    /// (G₁, G₂, G₃, G₄) with W(g₁) in the marked slot and W(g₂) elsewhere.
    pub fn operators(&self) -> [ComplexMatrix; 4] {
        let w1 = weyl_operator(self.d, self.g1.0, self.g1.1).expect("d ≥ 2");
        let w2 = weyl_operator(self.d, self.g2.0, self.g2.1).expect("d ≥ 2");
        [
            kron3(&w1, &w2, &w2),
            kron3(&w2, &w1, &w2),
            kron3(&w2, &w2, &w1),
            kron3(&w1, &w1, &w1),
        ]
    }

    /// ‖G₁G₂G₃ − ω^{2⟨g₁,g₂⟩} G₄‖ in the max-norm.
    pub fn identity_residual(&self) -> f64 {
        let [g1, g2, g3, g4] = self.operators();
        let lhs = &(&g1 * &g2) * &g3;
        lhs.max_abs_diff(&g4.scale(self.product_phase()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuditValue {
    pub value: C64,
    pub modulus: f64,
    pub pair: QuditGenPair,
    pub expectations: [C64; 4],
}

/// I_d = ⟨G₄⟩ − ω^{2⟨g₁,g₂⟩}⟨G₁⟩⟨G₂⟩⟨G₃⟩.
pub fn eval_id(state: &QuantumState, pair: &QuditGenPair) -> Result<QuditValue> {
    if state.local_dim() != pair.d {
        return Err(Error::DimensionMismatch {
            expected: pair.d,
            found: state.local_dim(),
        });
    }
    let ops = pair.operators();
    let e = [
        state.expectation(&ops[0]),
        state.expectation(&ops[1]),
        state.expectation(&ops[2]),
        state.expectation(&ops[3]),
    ];
    let value = e[3] - pair.product_phase() * e[0] * e[1] * e[2];
    Ok(QuditValue {
        value,
        modulus: value.norm(),
        pair: *pair,
        expectations: e,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuditScan {
    pub d: usize,
    pub pairs_scanned: usize,
    pub best: QuditValue,
    /// Number of pairs whose modulus is within 1e-9 of the best.
    pub best_multiplicity: usize,
    pub min_modulus: f64,
}

/// Every generator pair with ⟨g₁,g₂⟩ ≠ 0 mod d, evaluated on `state`.
pub fn qudit_scan(state: &QuantumState) -> Result<QuditScan> {
    let d = state.local_dim();
    let mut values = Vec::new();
    for a in 0..d * d {
        for b in 0..d * d {
            let pair = QuditGenPair::new(d, (a / d, a % d), (b / d, b % d))?;
            if pair.symplectic == 0 {
                continue;
            }
            values.push(eval_id(state, &pair)?);
        }
    }
    let best = *values
        .iter()
        .fold(None::<&QuditValue>, |acc, v| match acc {
            Some(b) if b.modulus >= v.modulus => Some(b),
            _ => Some(v),
        })
        .ok_or_else(|| Error::Generator("no non-commuting generator pairs".into()))?;
    let best_multiplicity = values
        .iter()
        .filter(|v| (v.modulus - best.modulus).abs() < 1e-9)
        .count();
    let min_modulus = values.iter().map(|v| v.modulus).fold(f64::INFINITY, f64::min);
    Ok(QuditScan {
        d,
        pairs_scanned: values.len(),
        best,
        best_multiplicity,
        min_modulus,
    })
}
