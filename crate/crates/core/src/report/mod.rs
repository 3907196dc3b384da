//! Config-driven orchestration and report assembly for the command-line runner.

mod config;
mod export;

pub use config::{AnalysisConfig, Command, Entry, MeasureSpec, SweepKind};
pub use export::{export_plot_data, write_atomic, write_outputs, PlotExport, PlotSeries};

use std::f64::consts::FRAC_PI_2;
use std::time::Instant;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::funcalc::{hinf_ratio, hinf_ratio_from_spectrum, CalculusReport};
use crate::measures::{Carrier, Measure, Point, Symbol};
use crate::norms::{Certificate, Exponent, NormEstimate, NormOptions, NormTag};
use crate::operators::{convolution_operator, operator_norm, ritt_constants, ritt_from_spectrum, sectorial_constant, spectrum, LinearOperator, RittReport, SectorialReport, Verdict};
use crate::representations::{transference_trials, TrialRecord};
use crate::stolz::{bar_constant, minimal_stolz_angle, AngleReport, BarReport};
use crate::tensor::{
    kconvexity_sweep, pisier_expression_norm, random_reversible_chain, regular_norm_lower, rota_dilation, subordination_chain_check,
    DilationResiduals, ProbeRow, SubordinationTable,
};
use crate::{Error, Result, C64, Mat, VERSION};

/// Measure as `{carrier, atoms: [[point, re, im], ...]}`; points are coordinate lists or integers.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeasureRecord {
    pub carrier: serde_json::Value,
    pub atoms: Vec<(serde_json::Value, f64, f64)>,
}

impl MeasureRecord {
    pub fn of(m: &Measure) -> Self {
        let carrier = match m.carrier() {
            Carrier::Group(g) => serde_json::json!(g.factors()),
            Carrier::Integers => serde_json::json!("Z"),
        };
        let atoms = m
            .atoms()
            .map(|(p, w)| {
                let point = match p {
                    Point::Element(e) => serde_json::json!(e.0),
                    Point::Integer(k) => serde_json::json!(k),
                };
                (point, w.re, w.im)
            })
            .collect();
        MeasureRecord { carrier, atoms }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeasureAnalysis {
    pub measure: MeasureRecord,
    pub renormalized: bool,
    pub symbol: Symbol,
    pub bar: BarReport,
    pub angle: AngleReport,
    pub ritt: RittReport,
    pub calculus: Vec<CalculusReport>,
    pub boundary_note: Option<String>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OperatorAnalysis {
    pub dim: usize,
    pub space: NormTag,
    pub spectrum: Vec<C64>,
    pub norm: NormEstimate,
    pub ritt: RittReport,
    pub sectorial: Option<SectorialReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransferenceSummary {
    pub order: usize,
    pub trials: usize,
    pub max_dim: usize,
    pub p: Exponent,
    pub holds_all: bool,
    pub min_slack: f64,
    pub records: Vec<TrialRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainAnalysis {
    pub eta: MeasureRecord,
    pub table: SubordinationTable,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainResiduals {
    pub index: usize,
    pub states: usize,
    pub support: usize,
    pub residuals: DilationResiduals,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PisierRow {
    pub index: usize,
    pub legs: usize,
    pub value: f64,
    pub certificate: Certificate,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DilationAnalysis {
    pub chains: Vec<ChainResiduals>,
    pub max_residual: f64,
    pub all_hold: bool,
    pub pisier: Vec<PisierRow>,
    /// Chain/leg pairs above the dense size used for the projection expression.
    pub pisier_skipped: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepAnalysis {
    pub kind: SweepKind,
    pub rows: Vec<ProbeRow>,
    pub reference_norm: Option<NormEstimate>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Results {
    AnalyzeMeasure(Box<MeasureAnalysis>),
    AnalyzeOperator(Box<OperatorAnalysis>),
    Transference(TransferenceSummary),
    TensorChain(ChainAnalysis),
    Dilation(DilationAnalysis),
    Sweep(SweepAnalysis),
}

/// Wall-clock phases, kept out of the report so reports stay byte-identical.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Timings {
    pub phases: Vec<(String, f64)>,
    pub total_seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub toolkit: &'static str,
    pub version: &'static str,
    pub command: Command,
    pub seed: Option<u64>,
    pub config: AnalysisConfig,
    pub results: Results,
    #[serde(skip)]
    pub timings: Timings,
}

impl Report {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

struct Clock {
    start: Instant,
    last: Instant,
    phases: Vec<(String, f64)>,
}

impl Clock {
    fn new() -> Self {
        let now = Instant::now();
        Clock { start: now, last: now, phases: Vec::new() }
    }

    fn lap(&mut self, name: &str) {
        let now = Instant::now();
        self.phases.push((name.to_string(), (now - self.last).as_secs_f64()));
        self.last = now;
    }

    fn finish(self) -> Timings {
        Timings { total_seconds: self.start.elapsed().as_secs_f64(), phases: self.phases }
    }
}

/// Validates the config and runs the command.
pub fn run(config: &AnalysisConfig) -> Result<Report> {
    config.validate()?;
    let mut clock = Clock::new();
    let results = match config.command {
        Command::AnalyzeMeasure => Results::AnalyzeMeasure(Box::new(analyze_measure(config, &mut clock)?)),
        Command::AnalyzeOperator => Results::AnalyzeOperator(Box::new(analyze_operator(config, &mut clock)?)),
        Command::Transference => Results::Transference(transference(config, &mut clock)?),
        Command::TensorChain => Results::TensorChain(tensor_chain(config, &mut clock)?),
        Command::Dilation => Results::Dilation(dilation(config, &mut clock)?),
        Command::Sweep => Results::Sweep(sweep(config, &mut clock)?),
    };
    Ok(Report {
        toolkit: "rittkit",
        version: VERSION,
        command: config.command,
        seed: config.seed,
        config: config.clone(),
        results,
        timings: clock.finish(),
    })
}

/// Stolz angles strictly between the minimal angle and `pi/2`.
fn default_gammas(gamma_star: f64) -> Vec<f64> {
    (1..=3).map(|k| gamma_star + (FRAC_PI_2 - gamma_star) * k as f64 / 4.0).collect()
}

fn analyze_measure(config: &AnalysisConfig, clock: &mut Clock) -> Result<MeasureAnalysis> {
    let nu = config.probability_measure()?;
    let mut notes = Vec::new();
    let symbol = nu.fourier_symbol(config.grid.or(match nu.measure().carrier() {
        Carrier::Integers => Some(config.grid_or_default()),
        Carrier::Group(_) => None,
    }))?;
    clock.lap("symbol");
    let bar = bar_constant(&symbol)?;
    let angle = minimal_stolz_angle(&symbol)?;
    clock.lap("geometry");
    let op = match nu.measure().group() {
        Some(g) => Some(convolution_operator(nu.measure(), g, &NormTag::l2(g.order()))?),
        None => None,
    };
    let ritt = match &op {
        Some(t) => ritt_constants(t, config.nmax)?,
        None => {
            let mut r = ritt_from_spectrum(&symbol.values, config.nmax)?;
            if r.verdict == Verdict::RittCertified {
                r.verdict = Verdict::RittNumerical;
            }
            r.c1_certificate = symbol.certificate();
            r.notes.push(format!(
                "convolution on l2(Z) analyzed through its symbol on {} torus points; the per-point suprema are exact, values between grid points are not bounded",
                symbol.values.len()
            ));
            r
        }
    };
    clock.lap("ritt");
    let gammas = match (&config.gammas, angle.gamma_star) {
        (Some(g), _) => g.clone(),
        (None, Some(gs)) if gs < FRAC_PI_2 => default_gammas(gs),
        (None, _) => {
            notes.push("no Stolz angle contains the symbol; calculus grid skipped".into());
            Vec::new()
        }
    };
    let family = config.family();
    let mut calculus = Vec::with_capacity(gammas.len());
    for gamma in gammas {
        let r = match &op {
            Some(t) => hinf_ratio(t, gamma, &family, config.seed()),
            None => hinf_ratio_from_spectrum(&symbol.values, gamma, &family, config.seed()),
        };
        match r {
            Ok(r) => calculus.push(r),
            Err(Error::Precondition(msg)) => notes.push(format!("gamma = {gamma:?} skipped: {msg}")),
            Err(e) => return Err(e),
        }
    }
    clock.lap("calculus");
    let boundary_note = boundary_note(angle.gamma_star);
    Ok(MeasureAnalysis {
        measure: MeasureRecord::of(nu.measure()),
        renormalized: nu.was_renormalized(),
        symbol,
        bar,
        angle,
        ritt,
        calculus,
        boundary_note,
        notes,
    })
}

pub(crate) fn boundary_note(gamma_star: Option<f64>) -> Option<String> {
    match gamma_star {
        None => Some("no Stolz boundary: the symbol touches the unit circle away from 1".into()),
        Some(g) if g == 0.0 => Some("degenerate boundary: minimal angle 0, the symbol lies on [0, 1]".into()),
        Some(_) => None,
    }
}

fn analyze_operator(config: &AnalysisConfig, clock: &mut Clock) -> Result<OperatorAnalysis> {
    let m = config.matrix()?;
    let space = config.space.clone().unwrap_or_else(|| NormTag::l2(m.nrows()));
    let t = LinearOperator::new(m, space.clone())?;
    let spec = spectrum(&t)?;
    let norm = operator_norm(&t)?;
    clock.lap("spectrum");
    let ritt = ritt_constants(&t, config.nmax)?;
    clock.lap("ritt");
    let sectorial = match config.sectorial_alpha {
        Some(alpha) => Some(sectorial_constant(&t.complement(), alpha)?),
        None => None,
    };
    clock.lap("sectorial");
    Ok(OperatorAnalysis { dim: t.dim(), space, spectrum: spec, norm, ritt, sectorial })
}

fn transference(config: &AnalysisConfig, clock: &mut Clock) -> Result<TransferenceSummary> {
    let g = config.group()?;
    let (trials, max_dim) = (config.trials.unwrap_or(1), config.max_dim.unwrap_or(1));
    let p = config.p.unwrap_or(Exponent::TWO);
    let records = transference_trials(config.seed(), trials, g.order(), max_dim, p)?;
    clock.lap("trials");
    Ok(TransferenceSummary {
        order: g.order(),
        trials,
        max_dim,
        p,
        holds_all: records.iter().all(|r| r.holds),
        min_slack: records.iter().map(|r| r.rhs - r.lhs).fold(f64::INFINITY, f64::min),
        records,
    })
}

fn tensor_chain(config: &AnalysisConfig, clock: &mut Clock) -> Result<ChainAnalysis> {
    let g = config.group()?;
    let eta = config.probability_measure()?;
    let table = subordination_chain_check(
        &eta,
        &g,
        config.p.unwrap_or(Exponent::TWO),
        config.q.unwrap_or(Exponent::TWO),
        config.m.unwrap_or(1),
        config.nmax,
    )?;
    clock.lap("chain");
    Ok(ChainAnalysis { eta: MeasureRecord::of(eta.measure()), table })
}

const PISIER_MAX_DIM: u128 = 512;

fn dilation(config: &AnalysisConfig, clock: &mut Clock) -> Result<DilationAnalysis> {
    let mut inputs: Vec<(DMatrix<f64>, Vec<f64>)> = Vec::new();
    if config.matrix.is_some() {
        let m = config.matrix()?;
        let p = DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)].re);
        inputs.push((p.clone(), stationary_law(&p)?));
    }
    let max_states = config.max_states.unwrap_or(8);
    let sparsity = config.sparsity.unwrap_or(0.3);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed());
    for _ in 0..config.chains.unwrap_or(0) {
        let n = rng.random_range(1..=max_states);
        inputs.push(random_reversible_chain(&mut rng, n, sparsity)?);
    }
    let triples = inputs.par_iter().map(|(p, pi)| rota_dilation(p, pi)).collect::<Result<Vec<_>>>()?;
    clock.lap("dilation");
    let chains: Vec<ChainResiduals> = triples
        .iter()
        .enumerate()
        .map(|(index, t)| ChainResiduals {
            index,
            states: t.base_measure.len(),
            support: t.support.len(),
            residuals: t.residuals,
            holds: t.residuals.holds(1e-11),
        })
        .collect();
    let legs = config.legs.clone().unwrap_or_else(|| vec![1, 2]);
    let (p, q, m) = (config.p.unwrap_or(Exponent::TWO), config.q.unwrap_or(Exponent::TWO), config.m.unwrap_or(1));
    let jobs: Vec<(usize, usize)> = (0..triples.len()).flat_map(|i| legs.iter().map(move |&l| (i, l))).collect();
    let fits = |i: usize, l: usize| (triples[i].support.len() as u128).saturating_pow(l as u32).saturating_mul(m as u128) <= PISIER_MAX_DIM;
    let pisier = jobs
        .iter()
        .filter(|&&(i, l)| fits(i, l))
        .map(|&(index, l)| {
            let t = &triples[index];
            let r = pisier_expression_norm(&t.e, &t.path_measure, l, p, q, m)?;
            Ok(PisierRow { index, legs: l, value: r.value, certificate: r.certificate })
        })
        .collect::<Result<Vec<_>>>()?;
    let pisier_skipped = jobs.len() - pisier.len();
    clock.lap("pisier");
    Ok(DilationAnalysis {
        max_residual: chains.iter().map(|c| c.residuals.max_residual()).fold(0.0, f64::max),
        all_hold: chains.iter().all(|c| c.holds),
        chains,
        pisier,
        pisier_skipped,
    })
}

/// Stationary law from a reversible chain via `pi_y / pi_x = P(x, y) / P(y, x)`
/// along a spanning tree of the transition graph.
fn stationary_law(p: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = p.nrows();
    if p.ncols() != n {
        return Err(Error::validation("matrix", "must be square"));
    }
    let mut pi = vec![f64::NAN; n];
    pi[0] = 1.0;
    let mut stack = vec![0];
    while let Some(x) = stack.pop() {
        for y in 0..n {
            if pi[y].is_nan() && p[(x, y)] > 0.0 {
                if p[(y, x)] <= 0.0 {
                    return Err(Error::Precondition(format!("P({x},{y}) > 0 but P({y},{x}) = 0: not reversible")));
                }
                pi[y] = pi[x] * p[(x, y)] / p[(y, x)];
                stack.push(y);
            }
        }
    }
    if pi.iter().any(|v| v.is_nan()) {
        return Err(Error::Precondition("the chain is not irreducible; give one communicating class".into()));
    }
    let total: f64 = pi.iter().sum();
    Ok(pi.iter().map(|v| v / total).collect())
}

fn sweep(config: &AnalysisConfig, clock: &mut Clock) -> Result<SweepAnalysis> {
    let opts = NormOptions { restarts: config.restarts.unwrap_or(32), max_iter: 200, seed: config.seed() };
    let kind = config.sweep.ok_or_else(|| Error::validation("sweep", "required by sweep"))?;
    let out = match kind {
        SweepKind::RegularNorm => {
            let p = config.p.unwrap_or(Exponent::TWO);
            let t = if config.measure.is_some() {
                let nu = config.probability_measure()?;
                let g = config.group()?;
                convolution_operator(nu.measure(), &g, &NormTag::Lp { p, dim: g.order() })?
            } else {
                let m: Mat = config.matrix()?;
                let dim = m.nrows();
                LinearOperator::new(m, NormTag::Lp { p, dim })?
            };
            let reference = operator_norm(&t)?;
            let rows = regular_norm_lower(&t, config.nmax, &opts)?;
            SweepAnalysis { kind, rows, reference_norm: Some(reference) }
        }
        SweepKind::Kconvexity => {
            let q = config.q.unwrap_or(Exponent::ONE);
            let ms = config.ms.clone().unwrap_or_default();
            let rows = kconvexity_sweep(q, &ms, config.vars.unwrap_or(4), &opts)?;
            SweepAnalysis { kind, rows, reference_norm: None }
        }
    };
    clock.lap("sweep");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(json: &str) -> AnalysisConfig {
        AnalysisConfig::from_json(json).unwrap()
    }

    fn small_family() -> &'static str {
        r#""family":{"monomials":4,"phi":4,"cesaro":2,"random_draws":8,"max_degree":6,"refinements":0}"#
    }

    #[test]
    fn coin_report() {
        let r = run(&cfg(&format!(r#"{{"command":"analyze-measure","group":[2],"measure":{{"weights":[0.5,0.5]}},"seed":1,{}}}"#, small_family()))).unwrap();
        let Results::AnalyzeMeasure(a) = &r.results else { panic!() };
        assert_eq!(a.bar.constant, Some(1.0));
        assert_eq!(a.angle.gamma_star, Some(0.0));
        assert!(a.ritt.tail_certified && a.ritt.c1_certificate.is_exact());
        assert!(a.boundary_note.is_some());
        assert_eq!(a.calculus.len(), 3);
    }

    #[test]
    fn shift_report() {
        let r = run(&cfg(r#"{"command":"analyze-measure","group":[4],"measure":{"weights":[0,1,0,0]},"seed":1}"#)).unwrap();
        let Results::AnalyzeMeasure(a) = &r.results else { panic!() };
        assert_eq!(a.ritt.verdict, Verdict::NotRitt);
        assert_eq!(a.ritt.witness, Some(C64::new(0.0, 1.0)));
        assert!(a.calculus.is_empty());
        assert!(!a.bar.holds);
    }

    #[test]
    fn integer_measure_report() {
        let r = run(&cfg(&format!(
            r#"{{"command":"analyze-measure","measure":{{"atoms":[[-1,0.25],[0,0.5],[1,0.25]]}},"grid":256,"nmax":32,"seed":2,{}}}"#,
            small_family()
        )))
        .unwrap();
        let Results::AnalyzeMeasure(a) = &r.results else { panic!() };
        assert_eq!(a.symbol.values.len(), 256);
        assert_eq!(a.ritt.verdict, Verdict::RittNumerical);
        assert!(a.ritt.c1 <= 1.0 + 1e-12);
    }

    #[test]
    fn invalid_grid_rejected() {
        let c = cfg(r#"{"command":"analyze-measure","measure":{"atoms":[[0,1.0]]},"grid":10,"seed":1}"#);
        assert!(matches!(run(&c), Err(Error::Validation { field, .. }) if field == "grid"));
    }

    #[test]
    fn stationary_law_of_explicit_chain() {
        let p = DMatrix::from_row_slice(3, 3, &[0.5, 0.5, 0.0, 0.25, 0.5, 0.25, 0.0, 0.5, 0.5]);
        let pi = stationary_law(&p).unwrap();
        let expected = [0.25, 0.5, 0.25];
        assert!(pi.iter().zip(expected).all(|(a, b)| (a - b).abs() < 1e-15));
        let r = run(&cfg(r#"{"command":"dilation","matrix":[[0.5,0.5,0],[0.25,0.5,0.25],[0,0.5,0.5]],"legs":[1,2]}"#)).unwrap();
        let Results::Dilation(d) = &r.results else { panic!() };
        assert!(d.all_hold);
        assert_eq!(d.pisier.len(), 2);
    }

    #[test]
    fn sweeps() {
        let r = run(&cfg(r#"{"command":"sweep","sweep":"regular-norm","group":[2],"measure":{"weights":[0.5,0.5]},"p":3,"nmax":3,"seed":4}"#)).unwrap();
        let Results::Sweep(s) = &r.results else { panic!() };
        let norm = s.reference_norm.unwrap().value;
        assert!(s.rows.iter().all(|row| (row.value - norm).abs() < 1e-6));
        let r = run(&cfg(r#"{"command":"sweep","sweep":"kconvexity","q":1,"ms":[1,2,4],"vars":3,"seed":4}"#)).unwrap();
        let Results::Sweep(s) = &r.results else { panic!() };
        assert_eq!(s.rows[0].value, 1.0);
        assert!(s.rows.windows(2).all(|w| w[1].value >= w[0].value));
    }
}
