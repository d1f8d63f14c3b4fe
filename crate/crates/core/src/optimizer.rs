//! Maximisation of |I| over orthonormal frames.
//!
//! A frame is the image of (x̂, ŷ) under a rotation given by ZYZ Euler
//! angles, so every point of the unconstrained 3-dimensional search space is
//! a feasible orthonormal pair. Each restart runs Nelder–Mead from a
//! Haar-random rotation drawn from its own seeded stream; restarts run in
//! parallel and are merged in index order.

use std::f64::consts::PI;

use rand::Rng as _;
use rayon::prelude::*;
use serde::Serialize;

use crate::correlator::CorrelationTensor;
use crate::error::{Error, Result};
use crate::linalg::{Direction, OrthoFrame};
use crate::rng::{self, Rng};
use crate::states::{haar_unitary, QuantumState};

/// Default number of multistart restarts.
pub const DEFAULT_RESTARTS: usize = 300;
/// Two restarts count as agreeing when their optima differ by less than this.
pub const AGREEMENT_TOL: f64 = 1e-8;
/// Agreement among at least this many restarts is recorded as convergence evidence.
pub const AGREEMENT_COUNT: usize = 10;
/// Slack on convexity checks, absorbing optimiser under-estimation.
pub const CONVEXITY_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NelderMeadOptions {
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
    pub initial_step: f64,
    /// Stop once every vertex is within this distance (max-norm) of the best.
    pub diameter_tol: f64,
    pub max_iterations: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
            initial_step: 0.25,
            diameter_tol: 1e-10,
            max_iterations: 2000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NelderMeadOutcome {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Minimises `f` starting from `x0` with an axis-aligned initial simplex.
pub fn nelder_mead<F>(f: F, x0: &[f64], opts: &NelderMeadOptions) -> NelderMeadOutcome
where
    F: Fn(&[f64]) -> f64,
{
    let n = x0.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), f(x0)));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += opts.initial_step;
        let fx = f(&x);
        simplex.push((x, fx));
    }

    let lerp = |from: &[f64], to: &[f64], t: f64| -> Vec<f64> {
        from.iter().zip(to).map(|(a, b)| a + t * (b - a)).collect()
    };

    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iterations {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = &simplex[0].0;
        let diameter = simplex[1..]
            .iter()
            .flat_map(|(x, _)| x.iter().zip(best).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if diameter < opts.diameter_tol {
            converged = true;
            break;
        }
        iterations += 1;

        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            centroid.iter_mut().zip(x).for_each(|(c, v)| *c += v / n as f64);
        }
        let (worst, f_worst) = simplex[n].clone();
        let f_best = simplex[0].1;
        let f_second_worst = simplex[n - 1].1;

        // x_r = c + α(c − x_worst)
        let xr = lerp(&centroid, &worst, -opts.reflection);
        let fr = f(&xr);
        if fr < f_best {
            let xe = lerp(&centroid, &xr, opts.expansion);
            let fe = f(&xe);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < f_second_worst {
            simplex[n] = (xr, fr);
            continue;
        }
        let (xc, fc, accept) = if fr < f_worst {
            let xc = lerp(&centroid, &xr, opts.contraction);
            let fc = f(&xc);
            (xc, fc, fc <= fr)
        } else {
            let xc = lerp(&centroid, &worst, opts.contraction);
            let fc = f(&xc);
            (xc, fc, fc < f_worst)
        };
        if accept {
            simplex[n] = (xc, fc);
            continue;
        }
        let anchor = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let x = lerp(&anchor, &vertex.0, opts.shrink);
            let fx = f(&x);
            *vertex = (x, fx);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, fx) = simplex.swap_remove(0);
    NelderMeadOutcome {
        x,
        f: fx,
        iterations,
        converged,
    }
}

/// ZYZ Euler angles of a rotation R; the frame is (R x̂, R ŷ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrameAngles {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl FrameAngles {
    pub fn from_slice(x: &[f64]) -> Self {
        Self {
            alpha: x[0],
            beta: x[1],
            gamma: x[2],
        }
    }

    pub fn to_vec(self) -> Vec<f64> {
        vec![self.alpha, self.beta, self.gamma]
    }

    /// Haar-distributed rotation: α, γ uniform, cos β uniform.
    pub fn haar(rng: &mut Rng) -> Self {
        Self {
            alpha: rng.random_range(0.0..2.0 * PI),
            beta: (1.0 - 2.0 * rng.random::<f64>()).acos(),
            gamma: rng.random_range(0.0..2.0 * PI),
        }
    }

    /// First two columns of Rz(α) Ry(β) Rz(γ).
    pub fn axes(&self) -> ([f64; 3], [f64; 3]) {
        let (sa, ca) = self.alpha.sin_cos();
        let (sb, cb) = self.beta.sin_cos();
        let (sg, cg) = self.gamma.sin_cos();
        let n1 = [
            ca * cb * cg - sa * sg,
            sa * cb * cg + ca * sg,
            -sb * cg,
        ];
        let n2 = [
            -ca * cb * sg - sa * cg,
            -sa * cb * sg + ca * cg,
            sb * sg,
        ];
        (n1, n2)
    }

    pub fn frame(&self) -> OrthoFrame {
        let (n1, n2) = self.axes();
        OrthoFrame::new(
            Direction::new(n1).expect("rotation columns are unit"),
            Direction::new(n2).expect("rotation columns are unit"),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub seed: u64,
    pub nelder_mead: NelderMeadOptions,
}

impl OptimizerConfig {
    pub fn new(restarts: usize, seed: u64) -> Self {
        Self {
            restarts,
            seed,
            nelder_mead: NelderMeadOptions::default(),
        }
    }
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self::new(DEFAULT_RESTARTS, 0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizationResult {
    /// max |I| found.
    pub best_value: f64,
    pub best_frame: OrthoFrame,
    pub best_angles: FrameAngles,
    /// best_value / 2.
    pub e_ghz: f64,
    pub restarts: usize,
    pub seed: u64,
    pub iterations_total: usize,
    pub converged_restarts: usize,
    /// Restarts whose optimum lies within 1e-8 of the best.
    pub agreeing_restarts: usize,
}

impl OptimizationResult {
    pub fn convergence_evidence(&self) -> bool {
        self.agreeing_restarts >= AGREEMENT_COUNT
    }
}

/// One finished restart of a multistart run.
#[derive(Debug, Clone, PartialEq)]
pub struct RestartOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Maximises `objective` from `restarts` starting points, restart `i`
/// drawing its start from stream `i` of `seed`. The returned outcomes are in
/// restart order regardless of scheduling.
pub fn multistart_maximize<F, S>(
    objective: F,
    start: S,
    restarts: usize,
    seed: u64,
    opts: &NelderMeadOptions,
) -> Vec<RestartOutcome>
where
    F: Fn(&[f64]) -> f64 + Sync,
    S: Fn(&mut Rng) -> Vec<f64> + Sync,
{
    (0..restarts)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::stream(seed, i as u64);
            let x0 = start(&mut rng);
            let out = nelder_mead(|x| -objective(x), &x0, opts);
            RestartOutcome {
                x: out.x,
                value: -out.f,
                iterations: out.iterations,
                converged: out.converged,
            }
        })
        .collect()
}

/// Index of the first outcome attaining the largest value.
fn best_index(outcomes: &[RestartOutcome]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, o) in outcomes.iter().enumerate() {
        match best {
            Some(b) if outcomes[b].value >= o.value => {}
            _ => best = Some(i),
        }
    }
    best
}

/// sup over orthonormal frames of |I| on a precomputed correlation tensor.
pub fn maximize_tensor(tensor: &CorrelationTensor, config: &OptimizerConfig) -> Result<OptimizationResult> {
    if config.restarts == 0 {
        return Err(Error::Domain("at least one restart is required".into()));
    }
    let objective = |x: &[f64]| {
        let (n1, n2) = FrameAngles::from_slice(x).axes();
        tensor.quad_raw(&n1, &n2).functional().abs()
    };
    let outcomes = multistart_maximize(
        objective,
        |rng| FrameAngles::haar(rng).to_vec(),
        config.restarts,
        config.seed,
        &config.nelder_mead,
    );
    let best = &outcomes[best_index(&outcomes).expect("restarts > 0")];
    let angles = FrameAngles::from_slice(&best.x);
    Ok(OptimizationResult {
        best_value: best.value,
        best_frame: angles.frame(),
        best_angles: angles,
        e_ghz: best.value / 2.0,
        restarts: config.restarts,
        seed: config.seed,
        iterations_total: outcomes.iter().map(|o| o.iterations).sum(),
        converged_restarts: outcomes.iter().filter(|o| o.converged).count(),
        agreeing_restarts: outcomes
            .iter()
            .filter(|o| (best.value - o.value).abs() < AGREEMENT_TOL)
            .count(),
    })
}

/// sup over orthonormal frames of |I(n₁, n₂; ρ)|, with 𝓔_GHZ = sup/2.
pub fn maximize_i(state: &QuantumState, config: &OptimizerConfig) -> Result<OptimizationResult> {
    maximize_tensor(&CorrelationTensor::from_state(state)?, config)
}

/// 𝓔_GHZ(ρ) = ½ sup_{n₁⊥n₂} |I(n₁, n₂; ρ)|.
pub fn e_ghz(state: &QuantumState, config: &OptimizerConfig) -> Result<f64> {
    Ok(maximize_i(state, config)?.e_ghz)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MerminResult {
    pub best_value: f64,
    pub n1: Direction,
    pub n2: Direction,
    /// n₁·n₂ at the optimum.
    pub c: f64,
    pub restarts: usize,
    pub seed: u64,
}

fn spherical_start(rng: &mut Rng) -> [f64; 2] {
    [
        (1.0 - 2.0 * rng.random::<f64>()).acos(),
        rng.random_range(0.0..2.0 * PI),
    ]
}

/// max of M₃ = e₄ − e₁ − e₂ − e₃ over arbitrary (not necessarily orthogonal)
/// pairs of unit directions.
pub fn maximize_mermin(state: &QuantumState, config: &OptimizerConfig) -> Result<MerminResult> {
    let tensor = CorrelationTensor::from_state(state)?;
    let dirs = |x: &[f64]| {
        (
            Direction::from_spherical(x[0], x[1]).components(),
            Direction::from_spherical(x[2], x[3]).components(),
        )
    };
    let outcomes = multistart_maximize(
        |x| {
            let (n1, n2) = dirs(x);
            tensor.quad_raw(&n1, &n2).mermin()
        },
        |rng| {
            let a = spherical_start(rng);
            let b = spherical_start(rng);
            vec![a[0], a[1], b[0], b[1]]
        },
        config.restarts.max(1),
        config.seed,
        &config.nelder_mead,
    );
    let best = &outcomes[best_index(&outcomes).expect("restarts > 0")];
    let n1 = Direction::from_spherical(best.x[0], best.x[1]);
    let n2 = Direction::from_spherical(best.x[2], best.x[3]);
    Ok(MerminResult {
        best_value: best.value,
        n1,
        n2,
        c: n1.dot(&n2),
        restarts: config.restarts.max(1),
        seed: config.seed,
    })
}

/// max of M₃ restricted to orthonormal frames.
pub fn maximize_mermin_orthogonal(state: &QuantumState, config: &OptimizerConfig) -> Result<MerminResult> {
    let tensor = CorrelationTensor::from_state(state)?;
    let outcomes = multistart_maximize(
        |x| {
            let (n1, n2) = FrameAngles::from_slice(x).axes();
            tensor.quad_raw(&n1, &n2).mermin()
        },
        |rng| FrameAngles::haar(rng).to_vec(),
        config.restarts.max(1),
        config.seed,
        &config.nelder_mead,
    );
    let best = &outcomes[best_index(&outcomes).expect("restarts > 0")];
    let frame = FrameAngles::from_slice(&best.x).frame();
    Ok(MerminResult {
        best_value: best.value,
        n1: frame.n1,
        n2: frame.n2,
        c: frame.c,
        restarts: config.restarts.max(1),
        seed: config.seed,
    })
}

/// f(u, v) = u³(2/3 − 3v²)³ − u(2 − 3u²), the negative of I on the W state
/// in terms of the ẑ-projections u = ẑ·n₁, v = ẑ·n₂.
pub fn w_objective(u: f64, v: f64) -> f64 {
    u.powi(3) * (2.0 / 3.0 - 3.0 * v * v).powi(3) - u * (2.0 - 3.0 * u * u)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchMax {
    pub branch: &'static str,
    pub max_abs: f64,
    pub at: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WAnalyticMax {
    pub value: f64,
    /// Every candidate (u, v) attaining `value` to 1e-12.
    pub argmax: Vec<(f64, f64)>,
    pub branches: Vec<BranchMax>,
    /// Largest |f| on a uniform grid over the disk u² + v² ≤ 1.
    pub grid_max: f64,
}

/// Largest |g| on [lo, hi]: endpoints, supplied critical points, and a
/// 20 001-point grid refined by golden-section search around each local
/// grid maximum.
fn branch_max<G: Fn(f64) -> f64>(g: G, lo: f64, hi: f64, critical: &[f64]) -> (f64, f64) {
    let h = |x: f64| g(x).abs();
    let mut cands: Vec<f64> = vec![lo, hi];
    cands.extend(critical.iter().copied().filter(|x| (lo..=hi).contains(x)));
    const N: usize = 20_000;
    let step = (hi - lo) / N as f64;
    let grid: Vec<f64> = (0..=N).map(|i| lo + step * i as f64).collect();
    for i in 1..N {
        let (a, b, c) = (h(grid[i - 1]), h(grid[i]), h(grid[i + 1]));
        if b >= a && b >= c {
            cands.push(golden_max(&h, grid[i - 1], grid[i + 1]));
        }
    }
    cands
        .into_iter()
        .map(|x| (h(x), x))
        .fold((f64::NEG_INFINITY, lo), |acc, c| if c.0 > acc.0 { c } else { acc })
}

fn golden_max<H: Fn(f64) -> f64>(h: &H, mut a: f64, mut b: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    for _ in 0..100 {
        if h(c) > h(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - r * (b - a);
        d = a + r * (b - a);
    }
    0.5 * (a + b)
}

/// Maximum of |I| on the W state over orthonormal frames, from the
/// two-variable reduction: interior branches v = 0 and v² = 2/9 (where
/// ∂f/∂v vanishes), and the boundary u² + v² = 1.
pub fn w_analytic_max() -> WAnalyticMax {
    let mut branches = Vec::new();

    // v = 0: f = (89/27)u³ − 2u, critical at u² = 18/89
    let uc = (18.0f64 / 89.0).sqrt();
    let (m, u) = branch_max(|u| w_objective(u, 0.0), -1.0, 1.0, &[-uc, uc]);
    branches.push(BranchMax {
        branch: "v = 0",
        max_abs: m,
        at: (u, 0.0),
    });

    // v² = 2/9: f = −u(2 − 3u²) with u² ≤ 7/9, critical at u² = 2/9
    let v = (2.0f64 / 9.0).sqrt();
    let umax = (7.0f64 / 9.0).sqrt();
    let uc = (2.0f64 / 9.0).sqrt();
    let (m, u) = branch_max(|u| w_objective(u, v), -umax, umax, &[-uc, uc]);
    branches.push(BranchMax {
        branch: "v^2 = 2/9",
        max_abs: m,
        at: (u, v),
    });

    // u = 0: f vanishes identically
    branches.push(BranchMax {
        branch: "u = 0",
        max_abs: 0.0,
        at: (0.0, 0.0),
    });

    // boundary u² + v² = 1: f = u³(3u² − 7/3)³ − u(2 − 3u²)
    let (m, u) = branch_max(
        |u| w_objective(u, (1.0 - u * u).max(0.0).sqrt()),
        -1.0,
        1.0,
        &[],
    );
    branches.push(BranchMax {
        branch: "u^2 + v^2 = 1",
        max_abs: m,
        at: (u, (1.0 - u * u).max(0.0).sqrt()),
    });

    let value = branches.iter().map(|b| b.max_abs).fold(0.0, f64::max);
    let mut argmax: Vec<(f64, f64)> = Vec::new();
    for b in &branches {
        if (b.max_abs - value).abs() < 1e-12 {
            for cand in [b.at, (-b.at.0, b.at.1)] {
                let cand = (cand.0, cand.1.abs());
                if !argmax
                    .iter()
                    .any(|p| (p.0 - cand.0).abs() < 1e-9 && (p.1 - cand.1).abs() < 1e-9)
                {
                    argmax.push(cand);
                }
            }
        }
    }
    argmax.sort_by(|a, b| a.0.total_cmp(&b.0));

    let n = 400;
    let mut grid_max = 0.0f64;
    for i in 0..=n {
        let u = -1.0 + 2.0 * i as f64 / n as f64;
        for j in 0..=n {
            let v = -1.0 + 2.0 * j as f64 / n as f64;
            if u * u + v * v <= 1.0 {
                grid_max = grid_max.max(w_objective(u, v).abs());
            }
        }
    }

    WAnalyticMax {
        value,
        argmax,
        branches,
        grid_max,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexityRow {
    pub p: f64,
    /// 𝓔_GHZ(pρ₁ + (1−p)ρ₂)
    pub mixture: f64,
    /// p𝓔_GHZ(ρ₁) + (1−p)𝓔_GHZ(ρ₂)
    pub chord: f64,
    /// mixture − chord; positive values exceed the chord.
    pub violation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexityReport {
    pub e_first: f64,
    pub e_second: f64,
    pub rows: Vec<ConvexityRow>,
    pub max_violation: f64,
    pub tolerance: f64,
    /// max_violation exceeds the tolerance.
    pub breached: bool,
}

/// Compares 𝓔_GHZ along the segment pρ₁ + (1−p)ρ₂ with the chord.
pub fn convexity_probe(
    rho1: &QuantumState,
    rho2: &QuantumState,
    p_grid: &[f64],
    config: &OptimizerConfig,
) -> Result<ConvexityReport> {
    let e_first = e_ghz(rho1, config)?;
    let e_second = e_ghz(rho2, config)?;
    let mut rows = Vec::with_capacity(p_grid.len());
    for &p in p_grid {
        let mix = QuantumState::mixture(p, rho1, rho2)?;
        let mixture = e_ghz(&mix, config)?;
        let chord = p * e_first + (1.0 - p) * e_second;
        rows.push(ConvexityRow {
            p,
            mixture,
            chord,
            violation: mixture - chord,
        });
    }
    let max_violation = rows.iter().map(|r| r.violation).fold(f64::NEG_INFINITY, f64::max);
    Ok(ConvexityReport {
        e_first,
        e_second,
        rows,
        max_violation,
        tolerance: CONVEXITY_TOL,
        breached: max_violation > CONVEXITY_TOL,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LuInvarianceReport {
    pub baseline: f64,
    pub values: Vec<f64>,
    pub max_deviation: f64,
}

/// Recomputes 𝓔_GHZ after `trials` independent Haar local unitaries
/// U_A ⊗ U_B ⊗ U_C.
pub fn lu_invariance_check(
    state: &QuantumState,
    seed: u64,
    trials: usize,
    config: &OptimizerConfig,
) -> Result<LuInvarianceReport> {
    let baseline = e_ghz(state, config)?;
    let mut rng = rng::seeded(seed);
    let mut values = Vec::with_capacity(trials);
    for _ in 0..trials {
        let us: Vec<_> = (0..3).map(|_| haar_unitary(2, &mut rng)).collect();
        let rotated = state.apply_local([&us[0], &us[1], &us[2]])?;
        values.push(e_ghz(&rotated, config)?);
    }
    let max_deviation = values
        .iter()
        .map(|v| (v - baseline).abs())
        .fold(0.0, f64::max);
    Ok(LuInvarianceReport {
        baseline,
        values,
        max_deviation,
    })
}
