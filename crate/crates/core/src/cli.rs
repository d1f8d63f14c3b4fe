//! Command-line front end. Each subcommand renders its result to a string so
//! the binary only has to decide where to write it.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::functional::{
    closed_form_in_mu, eval_i, eval_id, qudit_scan, relabel_y_to_z, QuditGenPair,
};
use crate::linalg::{Direction, OrthoFrame};
use crate::optimizer::{maximize_i, OptimizationResult, OptimizerConfig, DEFAULT_RESTARTS};
use crate::rng;
use crate::states::{
    haar_random_pure_with, load_state, make_acin, make_biseparable, make_ghz, make_w, AcinParams,
    Cut, QuantumOneOrTwo, QuantumState,
};

pub const SEED_ENV: &str = "GHZMETER_SEED";
/// Significant digits in table and CSV output.
pub const SIG_DIGITS: usize = 9;
/// Margin below the algebraic bound 2 required of random states.
pub const RANDOM_MARGIN: f64 = 1e-3;
pub const NAMED_STATES: [&str; 5] = ["ghz", "w", "bisep", "product", "mixed"];

#[derive(Debug, Parser)]
#[command(name = "ghzmeter", version, about = "GHZ correlation functional and GHZ-type entanglement indicator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate I(n1, n2) for an explicit pair of directions
    Eval(EvalArgs),
    /// Maximise |I| over orthonormal frames (E_GHZ = sup|I| / 2)
    Optimize(OptimizeArgs),
    /// Closed form vs direct evaluation of |I(x, y)| along mu = l0*l4
    ScanMu(ScanMuArgs),
    /// sup|I| for the GHZ, W, biseparable and product benchmark states
    BenchStates(BenchArgs),
    /// sup|I| for Haar-random pure states
    Random(RandomArgs),
    /// Three-qudit functional built from Heisenberg-Weyl operators
    Qudit(QuditArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Table,
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// Write to this file instead of stdout
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SeedArgs {
    #[arg(long, default_value_t = DEFAULT_RESTARTS)]
    pub restarts: usize,
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    /// ghz | w | bisep | product | mixed | acin:l0,l1,l2,l3,l4,phi | file:PATH
    #[arg(long)]
    pub state: StateSpec,
    /// First direction as x,y,z (rescaled to unit length)
    #[arg(long, allow_hyphen_values = true)]
    pub n1: Vector3,
    #[arg(long, allow_hyphen_values = true)]
    pub n2: Vector3,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct OptimizeArgs {
    #[arg(long)]
    pub state: StateSpec,
    #[command(flatten)]
    pub search: SeedArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ScanMuArgs {
    /// Grid points on [0, 1/2], at least 2
    #[arg(long, default_value_t = 51)]
    pub steps: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub search: SeedArgs,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct RandomArgs {
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    /// Restarts per sample (below the optimize default)
    #[arg(long, default_value_t = 30)]
    pub restarts: usize,
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct QuditArgs {
    #[arg(long, default_value_t = 3)]
    pub d: usize,
    /// Generator g1 as p,q
    #[arg(long, default_value = "1,0")]
    pub g1: GenSpec,
    #[arg(long, default_value = "0,1")]
    pub g2: GenSpec,
    /// ghz | mixed | file:PATH
    #[arg(long, default_value = "ghz")]
    pub state: StateSpec,
    /// Scan every generator pair with nonzero symplectic form
    #[arg(long)]
    pub exhaustive: bool,
    /// d = 2 only: conjugate the state so that Z reads the sigma_y correlators
    #[arg(long)]
    pub relabel_yz: bool,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    Named(String),
    Acin(AcinParams),
    File(PathBuf),
}

impl FromStr for StateSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if NAMED_STATES.contains(&s) {
            return Ok(Self::Named(s.to_string()));
        }
        if let Some(rest) = s.strip_prefix("acin:") {
            let v = parse_floats(rest)?;
            if v.len() != 6 {
                return Err(format!("acin needs 6 numbers l0,l1,l2,l3,l4,phi; got {}", v.len()));
            }
            let p = AcinParams::new([v[0], v[1], v[2], v[3], v[4]], v[5]).map_err(|e| e.to_string())?;
            return Ok(Self::Acin(p));
        }
        if let Some(path) = s.strip_prefix("file:") {
            return Ok(Self::File(PathBuf::from(path)));
        }
        Err(format!(
            "unknown state '{s}'; valid names: {}, or acin:l0,l1,l2,l3,l4,phi, or file:PATH",
            NAMED_STATES.join(", ")
        ))
    }
}

impl StateSpec {
    pub fn label(&self) -> String {
        match self {
            Self::Named(n) => n.clone(),
            Self::Acin(p) => {
                let l = p.lambdas();
                format!("acin({},{},{},{},{},{})", l[0], l[1], l[2], l[3], l[4], p.phi())
            }
            Self::File(p) => p.display().to_string(),
        }
    }

    /// Builds the state on (ℂ^d)^⊗3.
    pub fn build(&self, d: usize) -> Result<QuantumState> {
        let state = match self {
            Self::Named(n) => match (n.as_str(), d) {
                ("ghz", _) => make_ghz(d)?,
                ("mixed", _) => QuantumState::maximally_mixed(d)?,
                ("w", 2) => make_w(),
                ("bisep", 2) => named_bisep(),
                ("product", 2) => QuantumState::basis(2, 0)?,
                (other, _) => {
                    return Err(Error::Parse(format!(
                        "state '{other}' is only defined for qubits (d = 2), not d = {d}"
                    )))
                }
            },
            Self::Acin(p) if d == 2 => make_acin(p),
            Self::Acin(_) => {
                return Err(Error::Parse(format!("Acín states are qubit states, not d = {d}")))
            }
            Self::File(path) => load_state(path)?,
        };
        if state.local_dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: state.local_dim(),
            });
        }
        Ok(state)
    }
}

/// |0⟩_A ⊗ |Φ⁺⟩_BC.
pub fn named_bisep() -> QuantumState {
    make_biseparable(Cut::A, &QuantumOneOrTwo::ket0(), &QuantumOneOrTwo::phi_plus())
        .expect("fixed factors have the right dimensions")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vector3(pub [f64; 3]);

impl FromStr for Vector3 {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let v = parse_floats(s)?;
        if v.len() != 3 {
            return Err(format!("expected three comma-separated numbers, got {}", v.len()));
        }
        Ok(Self([v[0], v[1], v[2]]))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenSpec(pub (usize, usize));

impl FromStr for GenSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 2 {
            return Err(format!("expected p,q; got '{s}'"));
        }
        let p = parts[0].parse::<usize>().map_err(|e| format!("'{}': {e}", parts[0]))?;
        let q = parts[1].parse::<usize>().map_err(|e| format!("'{}': {e}", parts[1]))?;
        Ok(Self((p, q)))
    }
}

fn parse_floats(s: &str) -> std::result::Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<f64>().map_err(|e| format!("'{t}': {e}"))
        })
        .collect()
}

/// Formats `x` with `SIG_DIGITS` significant digits.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{:.*}", SIG_DIGITS - 1, x);
    }
    let mag = x.abs().log10().floor() as i32;
    let decimals = (SIG_DIGITS as i32 - 1 - mag).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Rows of cells with a header, rendered as aligned text or CSV.
#[derive(Debug, Clone, Default)]
struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    fn csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        out
    }

    fn text(&self) -> String {
        let mut widths: Vec<usize> = self.header.iter().map(|h| h.chars().count()).collect();
        for r in &self.rows {
            for (w, c) in widths.iter_mut().zip(r) {
                *w = (*w).max(c.chars().count());
            }
        }
        let line = |cells: &[String]| {
            let padded: Vec<String> = cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:>w$}"))
                .collect();
            padded.join("  ").trim_end().to_string() + "\n"
        };
        let mut out = line(&self.header);
        for r in &self.rows {
            out.push_str(&line(r));
        }
        out
    }

    fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.csv(),
            _ => self.text(),
        }
    }
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn vec_cells(v: [f64; 3]) -> Vec<String> {
    v.iter().map(|x| fmt_sig(*x)).collect()
}

#[derive(Debug, Serialize)]
pub struct EvalReport {
    pub state: String,
    pub n1: [f64; 3],
    pub n2: [f64; 3],
    pub c: f64,
    pub e1: f64,
    pub e2: f64,
    pub e3: f64,
    pub e4: f64,
    pub value: f64,
    pub modulus: f64,
}

pub fn cmd_eval(args: &EvalArgs) -> Result<String> {
    let state = args.state.build(2)?;
    let n1 = Direction::normalized(args.n1.0)
        .map_err(|_| Error::Parse("--n1 must be a nonzero vector".into()))?;
    let n2 = Direction::normalized(args.n2.0)
        .map_err(|_| Error::Parse("--n2 must be a nonzero vector".into()))?;
    let frame = OrthoFrame::new(n1, n2);
    let v = eval_i(&state, &frame)?;
    let report = EvalReport {
        state: args.state.label(),
        n1: n1.components(),
        n2: n2.components(),
        c: frame.c,
        e1: v.correlators.e1,
        e2: v.correlators.e2,
        e3: v.correlators.e3,
        e4: v.correlators.e4,
        value: v.value,
        modulus: v.modulus,
    };
    match args.out.format.unwrap_or(OutputFormat::Table) {
        OutputFormat::Json => json(&report),
        OutputFormat::Csv => {
            let mut t = Table::new(&[
                "state", "n1x", "n1y", "n1z", "n2x", "n2y", "n2z", "c", "e1", "e2", "e3", "e4", "I", "abs_I",
            ]);
            let mut row = vec![report.state.clone()];
            row.extend(vec_cells(report.n1));
            row.extend(vec_cells(report.n2));
            row.extend(
                [report.c, report.e1, report.e2, report.e3, report.e4, report.value, report.modulus]
                    .iter()
                    .map(|x| fmt_sig(*x)),
            );
            t.push(row);
            Ok(t.csv())
        }
        OutputFormat::Table => {
            let mut t = Table::new(&["quantity", "value"]);
            t.push(vec!["state".into(), report.state.clone()]);
            t.push(vec!["n1".into(), vec_cells(report.n1).join(", ")]);
            t.push(vec!["n2".into(), vec_cells(report.n2).join(", ")]);
            for (k, x) in [
                ("n1.n2", report.c),
                ("e1", report.e1),
                ("e2", report.e2),
                ("e3", report.e3),
                ("e4", report.e4),
                ("I", report.value),
                ("|I|", report.modulus),
            ] {
                t.push(vec![k.into(), fmt_sig(x)]);
            }
            Ok(t.text())
        }
    }
}

#[derive(Debug, Serialize)]
pub struct OptimizeReport {
    pub state: String,
    #[serde(flatten)]
    pub result: OptimizationResult,
    pub convergence_evidence: bool,
}

pub fn cmd_optimize(args: &OptimizeArgs) -> Result<String> {
    let state = args.state.build(2)?;
    let config = OptimizerConfig::new(args.search.restarts, args.search.seed);
    let result = maximize_i(&state, &config)?;
    let report = OptimizeReport {
        state: args.state.label(),
        convergence_evidence: result.convergence_evidence(),
        result,
    };
    let r = &report.result;
    match args.out.format.unwrap_or(OutputFormat::Table) {
        OutputFormat::Json => json(&report),
        OutputFormat::Csv => {
            let mut t = Table::new(&[
                "state", "best_value", "e_ghz", "n1x", "n1y", "n1z", "n2x", "n2y", "n2z", "restarts", "seed",
                "iterations_total", "converged_restarts", "agreeing_restarts",
            ]);
            let mut row = vec![report.state.clone(), fmt_sig(r.best_value), fmt_sig(r.e_ghz)];
            row.extend(vec_cells(r.best_frame.n1.components()));
            row.extend(vec_cells(r.best_frame.n2.components()));
            row.extend(
                [r.restarts, r.seed as usize, r.iterations_total, r.converged_restarts, r.agreeing_restarts]
                    .iter()
                    .map(|x| x.to_string()),
            );
            t.push(row);
            Ok(t.csv())
        }
        OutputFormat::Table => {
            let mut t = Table::new(&["quantity", "value"]);
            t.push(vec!["state".into(), report.state.clone()]);
            t.push(vec!["sup|I|".into(), fmt_sig(r.best_value)]);
            t.push(vec!["E_GHZ".into(), fmt_sig(r.e_ghz)]);
            t.push(vec!["n1".into(), vec_cells(r.best_frame.n1.components()).join(", ")]);
            t.push(vec!["n2".into(), vec_cells(r.best_frame.n2.components()).join(", ")]);
            t.push(vec!["restarts".into(), r.restarts.to_string()]);
            t.push(vec!["seed".into(), r.seed.to_string()]);
            t.push(vec!["iterations".into(), r.iterations_total.to_string()]);
            t.push(vec!["converged restarts".into(), r.converged_restarts.to_string()]);
            t.push(vec!["restarts within 1e-8".into(), r.agreeing_restarts.to_string()]);
            Ok(t.text())
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MuRow {
    pub mu: f64,
    pub closed_form: f64,
    pub direct: f64,
    pub abs_diff: f64,
}

/// |I(x̂, ŷ)| along μ ∈ [0, 1/2]: closed form next to a direct evaluation on
/// cos β|000⟩ + sin β|111⟩ with λ₀λ₄ = μ.
pub fn scan_mu(steps: usize) -> Result<Vec<MuRow>> {
    if steps < 2 {
        return Err(Error::Domain(format!("--steps must be at least 2, got {steps}")));
    }
    (0..steps)
        .map(|i| {
            let mu = 0.5 * i as f64 / (steps - 1) as f64;
            let closed_form = closed_form_in_mu(mu).abs();
            let state = make_acin(&AcinParams::ghz_slice(mu)?);
            let direct = eval_i(&state, &OrthoFrame::xy())?.modulus;
            Ok(MuRow {
                mu,
                closed_form,
                direct,
                abs_diff: (closed_form - direct).abs(),
            })
        })
        .collect()
}

pub fn cmd_scan_mu(args: &ScanMuArgs) -> Result<String> {
    let rows = scan_mu(args.steps)?;
    match args.out.format.unwrap_or(OutputFormat::Csv) {
        OutputFormat::Json => json(&rows),
        f => {
            let mut t = Table::new(&["mu", "closed_form", "direct", "abs_diff"]);
            for r in &rows {
                t.push(vec![fmt_sig(r.mu), fmt_sig(r.closed_form), fmt_sig(r.direct), format!("{:.3e}", r.abs_diff)]);
            }
            Ok(t.render(f))
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FigureRow {
    pub label: String,
    pub value: f64,
    pub expected: f64,
    pub e_ghz: f64,
    pub restarts: usize,
    pub seed: u64,
}

pub fn bench_states(config: &OptimizerConfig) -> Result<Vec<FigureRow>> {
    let cases: [(&str, QuantumState, f64); 4] = [
        ("ghz", make_ghz(2)?, 2.0),
        ("w", make_w(), 35.0 / 27.0),
        ("bisep", named_bisep(), 1.0),
        ("product", QuantumState::basis(2, 0)?, 1.0),
    ];
    cases
        .into_iter()
        .map(|(label, state, expected)| {
            let r = maximize_i(&state, config)?;
            Ok(FigureRow {
                label: label.to_string(),
                value: r.best_value,
                expected,
                e_ghz: r.e_ghz,
                restarts: config.restarts,
                seed: config.seed,
            })
        })
        .collect()
}

pub fn cmd_bench_states(args: &BenchArgs) -> Result<String> {
    let config = OptimizerConfig::new(args.search.restarts, args.search.seed);
    let rows = bench_states(&config)?;
    match args.out.format.unwrap_or(OutputFormat::Table) {
        OutputFormat::Json => json(&rows),
        f => {
            let mut t = Table::new(&["label", "sup_abs_I", "expected", "abs_error", "e_ghz", "restarts", "seed"]);
            for r in &rows {
                t.push(vec![
                    r.label.clone(),
                    fmt_sig(r.value),
                    fmt_sig(r.expected),
                    format!("{:.3e}", (r.value - r.expected).abs()),
                    fmt_sig(r.e_ghz),
                    r.restarts.to_string(),
                    r.seed.to_string(),
                ]);
            }
            Ok(t.render(f))
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RandomSample {
    pub index: usize,
    pub value: f64,
    pub e_ghz: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RandomSummary {
    pub samples: usize,
    pub restarts_per_sample: usize,
    /// Restarts are below the default of 300.
    pub reduced_restarts: bool,
    pub seed: u64,
    pub min: f64,
    pub q05: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub q95: f64,
    pub max: f64,
    pub mean: f64,
    /// Every sample satisfies sup|I| < 2 − 1e-3.
    pub all_below_bound: bool,
    pub values: Vec<RandomSample>,
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Sample `i` is drawn from stream `i` of `seed`; its optimiser uses seed
/// `seed + 1 + i`.
pub fn random_states(samples: usize, restarts: usize, seed: u64) -> Result<RandomSummary> {
    if samples == 0 {
        return Err(Error::Domain("--samples must be at least 1".into()));
    }
    let mut values = Vec::with_capacity(samples);
    for i in 0..samples {
        let state = haar_random_pure_with(2, &mut rng::stream(seed, i as u64))?;
        let config = OptimizerConfig::new(restarts, seed.wrapping_add(1 + i as u64));
        let r = maximize_i(&state, &config)?;
        values.push(RandomSample {
            index: i,
            value: r.best_value,
            e_ghz: r.e_ghz,
        });
    }
    let mut sorted: Vec<f64> = values.iter().map(|s| s.value).collect();
    sorted.sort_by(f64::total_cmp);
    let max = *sorted.last().expect("samples > 0");
    Ok(RandomSummary {
        samples,
        restarts_per_sample: restarts,
        reduced_restarts: restarts < DEFAULT_RESTARTS,
        seed,
        min: sorted[0],
        q05: quantile(&sorted, 0.05),
        q25: quantile(&sorted, 0.25),
        median: quantile(&sorted, 0.5),
        q75: quantile(&sorted, 0.75),
        q95: quantile(&sorted, 0.95),
        max,
        mean: sorted.iter().sum::<f64>() / samples as f64,
        all_below_bound: max < 2.0 - RANDOM_MARGIN,
        values,
    })
}

pub fn cmd_random(args: &RandomArgs) -> Result<String> {
    let s = random_states(args.samples, args.restarts, args.seed)?;
    match args.out.format.unwrap_or(OutputFormat::Table) {
        OutputFormat::Json => json(&s),
        OutputFormat::Csv => {
            let mut t = Table::new(&["index", "sup_abs_I", "e_ghz", "restarts", "seed"]);
            for v in &s.values {
                t.push(vec![
                    v.index.to_string(),
                    fmt_sig(v.value),
                    fmt_sig(v.e_ghz),
                    s.restarts_per_sample.to_string(),
                    s.seed.to_string(),
                ]);
            }
            Ok(t.csv())
        }
        OutputFormat::Table => {
            let mut out = String::new();
            let _ = writeln!(
                out,
                "{} Haar-random pure states, {} restarts each{}, seed {}",
                s.samples,
                s.restarts_per_sample,
                if s.reduced_restarts { " (reduced)" } else { "" },
                s.seed
            );
            let mut t = Table::new(&["statistic", "sup|I|"]);
            for (k, x) in [
                ("min", s.min),
                ("q05", s.q05),
                ("q25", s.q25),
                ("median", s.median),
                ("q75", s.q75),
                ("q95", s.q95),
                ("max", s.max),
                ("mean", s.mean),
            ] {
                t.push(vec![k.into(), fmt_sig(x)]);
            }
            out.push_str(&t.text());
            let _ = writeln!(
                out,
                "all below 2 - {RANDOM_MARGIN:e}: {}",
                if s.all_below_bound { "yes" } else { "NO" }
            );
            Ok(out)
        }
    }
}

#[derive(Debug, Serialize)]
pub struct QuditReport {
    pub state: String,
    pub d: usize,
    pub g1: (usize, usize),
    pub g2: (usize, usize),
    pub symplectic: usize,
    pub re: f64,
    pub im: f64,
    pub modulus: f64,
    /// ‖G₁G₂G₃ − ω^{2⟨g₁,g₂⟩}G₄‖_max
    pub identity_residual: f64,
    pub relabelled: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scan: Option<QuditScanSummary>,
}

#[derive(Debug, Serialize)]
pub struct QuditScanSummary {
    pub pairs_scanned: usize,
    pub best_modulus: f64,
    pub best_g1: (usize, usize),
    pub best_g2: (usize, usize),
    pub best_multiplicity: usize,
    pub min_modulus: f64,
}

pub fn cmd_qudit(args: &QuditArgs) -> Result<String> {
    let pair = QuditGenPair::new(args.d, args.g1.0, args.g2.0)?;
    let mut state = args.state.build(args.d)?;
    if args.relabel_yz {
        if args.d != 2 {
            return Err(Error::Parse("--relabel-yz applies to d = 2 only".into()));
        }
        state = relabel_y_to_z(&state)?;
    }
    let v = eval_id(&state, &pair)?;
    let scan = if args.exhaustive {
        let s = qudit_scan(&state)?;
        Some(QuditScanSummary {
            pairs_scanned: s.pairs_scanned,
            best_modulus: s.best.modulus,
            best_g1: s.best.pair.g1,
            best_g2: s.best.pair.g2,
            best_multiplicity: s.best_multiplicity,
            min_modulus: s.min_modulus,
        })
    } else {
        None
    };
    let report = QuditReport {
        state: args.state.label(),
        d: args.d,
        g1: pair.g1,
        g2: pair.g2,
        symplectic: pair.symplectic,
        re: v.value.re,
        im: v.value.im,
        modulus: v.modulus,
        identity_residual: pair.identity_residual(),
        relabelled: args.relabel_yz,
        scan,
    };
    let pair_str = |g: (usize, usize)| format!("({},{})", g.0, g.1);
    match args.out.format.unwrap_or(OutputFormat::Table) {
        OutputFormat::Json => json(&report),
        f => {
            let mut t = Table::new(&["quantity", "value"]);
            t.push(vec!["state".into(), report.state.clone()]);
            t.push(vec!["d".into(), report.d.to_string()]);
            t.push(vec!["g1".into(), pair_str(report.g1)]);
            t.push(vec!["g2".into(), pair_str(report.g2)]);
            t.push(vec!["symplectic".into(), report.symplectic.to_string()]);
            t.push(vec!["Re I_d".into(), fmt_sig(report.re)]);
            t.push(vec!["Im I_d".into(), fmt_sig(report.im)]);
            t.push(vec!["|I_d|".into(), fmt_sig(report.modulus)]);
            t.push(vec!["G1G2G3 residual".into(), format!("{:.3e}", report.identity_residual)]);
            if let Some(s) = &report.scan {
                t.push(vec!["scan pairs".into(), s.pairs_scanned.to_string()]);
                t.push(vec!["scan max |I_d|".into(), fmt_sig(s.best_modulus)]);
                t.push(vec!["scan argmax".into(), format!("{} {}", pair_str(s.best_g1), pair_str(s.best_g2))]);
                t.push(vec!["scan argmax count".into(), s.best_multiplicity.to_string()]);
                t.push(vec!["scan min |I_d|".into(), fmt_sig(s.min_modulus)]);
            }
            Ok(t.render(f))
        }
    }
}

impl Command {
    pub fn output_path(&self) -> Option<&PathBuf> {
        match self {
            Self::Eval(a) => a.out.output.as_ref(),
            Self::Optimize(a) => a.out.output.as_ref(),
            Self::ScanMu(a) => a.out.output.as_ref(),
            Self::BenchStates(a) => a.out.output.as_ref(),
            Self::Random(a) => a.out.output.as_ref(),
            Self::Qudit(a) => a.out.output.as_ref(),
        }
    }
}

/// Runs a parsed command and returns the rendered output.
pub fn run(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::Eval(a) => cmd_eval(a),
        Command::Optimize(a) => cmd_optimize(a),
        Command::ScanMu(a) => cmd_scan_mu(a),
        Command::BenchStates(a) => cmd_bench_states(a),
        Command::Random(a) => cmd_random(a),
        Command::Qudit(a) => cmd_qudit(a),
    }
}

/// Parses `args` (without the program name) and runs the command.
pub fn run_args<I, S>(args: I) -> Result<String>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let argv = std::iter::once(std::ffi::OsString::from("ghzmeter")).chain(args.into_iter().map(Into::into));
    let cli = Cli::try_parse_from(argv).map_err(|e| Error::Parse(e.to_string()))?;
    run(&cli)
}
