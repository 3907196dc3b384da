use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::funcalc::FamilySpec;
use crate::group::FiniteAbelianGroup;
use crate::measures::{ProbabilityMeasure, DEFAULT_GRID, MAX_GRID, MIN_GRID};
use crate::norms::{Exponent, NormTag};
use crate::{Error, Result, C64, Mat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    AnalyzeMeasure,
    AnalyzeOperator,
    Transference,
    TensorChain,
    Dilation,
    Sweep,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::AnalyzeMeasure => "analyze-measure",
            Command::AnalyzeOperator => "analyze-operator",
            Command::Transference => "transference",
            Command::TensorChain => "tensor-chain",
            Command::Dilation => "dilation",
            Command::Sweep => "sweep",
        }
    }
}

/// Probability weights in group index order, or integer atoms `[k, w]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atoms: Option<Vec<(i64, f64)>>,
}

/// A real number or a `[re, im]` pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

impl Entry {
    pub fn value(self) -> C64 {
        match self {
            Entry::Real(x) => C64::new(x, 0.0),
            Entry::Complex([re, im]) => C64::new(re, im),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepKind {
    RegularNorm,
    Kconvexity,
}

fn default_nmax() -> usize {
    64
}

/// One analysis request. Fields not used by the command must be absent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Cyclic orders, e.g. `[4]` or `[2, 3]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<MeasureSpec>,
    /// Torus grid size `M` for measures on the integers.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[serde(default = "default_nmax")]
    pub nmax: usize,
    /// Stolz angles for the calculus grid; derived from the minimal angle when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gammas: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilySpec>,
    /// Operator matrix, row by row.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<Entry>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<NormTag>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sectorial_alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Exponent>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Exponent>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chains: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_states: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sparsity: Option<f64>,
    /// Leg counts for the commuting-projection expression.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub legs: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ms: Option<Vec<usize>>,
    /// Rademacher variables `N`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vars: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restarts: Option<usize>,
}

fn bad(field: &str, msg: impl Into<String>) -> Error {
    Error::validation(field, msg)
}

fn require<'a, T>(v: &'a Option<T>, field: &str, command: Command) -> Result<&'a T> {
    v.as_ref().ok_or_else(|| bad(field, format!("required by {}", command.name())))
}

fn forbid<T>(v: &Option<T>, field: &str, command: Command) -> Result<()> {
    if v.is_some() {
        return Err(bad(field, format!("not used by {}", command.name())));
    }
    Ok(())
}

fn in_range(field: &str, v: usize, lo: usize, hi: usize) -> Result<()> {
    if v < lo || v > hi {
        return Err(bad(field, format!("{v} is outside [{lo}, {hi}]")));
    }
    Ok(())
}

pub const MAX_NMAX: usize = 100_000;
pub const MAX_TRIALS: usize = 10_000;
pub const MAX_CHAIN_LEGS: usize = 6;
/// Largest state count whose dense path space (`states^2` points) stays under the guard.
pub const MAX_CHAIN_STATES: usize = 31;

impl AnalysisConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| bad("config", e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
        Self::from_json(&text)
    }

    pub fn with_seed(mut self, seed: Option<u64>) -> Self {
        if seed.is_some() {
            self.seed = seed;
        }
        self
    }

    pub fn group(&self) -> Result<FiniteAbelianGroup> {
        let factors = require(&self.group, "group", self.command)?;
        FiniteAbelianGroup::new(factors.clone()).map_err(|e| bad("group", e.to_string()))
    }

    pub fn family(&self) -> FamilySpec {
        self.family.unwrap_or_default()
    }

    /// Whether the command draws random instances.
    pub fn randomized(&self) -> bool {
        match self.command {
            Command::AnalyzeMeasure => self.family().random_draws > 0,
            Command::Transference | Command::Sweep => true,
            Command::Dilation => self.chains.unwrap_or(0) > 0,
            Command::AnalyzeOperator | Command::TensorChain => false,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    /// The measure as a probability measure on the configured group, or on the
    /// integers when `atoms` is given.
    pub fn probability_measure(&self) -> Result<ProbabilityMeasure> {
        let spec = require(&self.measure, "measure", self.command)?;
        match (&spec.weights, &spec.atoms) {
            (Some(w), None) => {
                let g = self.group()?;
                if w.len() != g.order() {
                    return Err(bad("measure.weights", format!("{} weights for a group of order {}", w.len(), g.order())));
                }
                ProbabilityMeasure::from_group_weights(&g, w).map_err(|e| bad("measure.weights", e.to_string()))
            }
            (None, Some(a)) => {
                if self.group.is_some() {
                    return Err(bad("group", "integer atoms are carried by Z; remove the group"));
                }
                ProbabilityMeasure::on_integers(a).map_err(|e| bad("measure.atoms", e.to_string()))
            }
            _ => Err(bad("measure", "give exactly one of weights or atoms")),
        }
    }

    pub fn matrix(&self) -> Result<Mat> {
        let rows = require(&self.matrix, "matrix", self.command)?;
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(bad("matrix", "must be a nonempty square array"));
        }
        Ok(Mat::from_fn(n, n, |i, j| rows[i][j].value()))
    }

    /// Checks every field the command uses and rejects the rest.
    pub fn validate(&self) -> Result<()> {
        let c = self.command;
        in_range("nmax", self.nmax, 1, MAX_NMAX)?;
        if let Some(grid) = self.grid {
            in_range("grid", grid, MIN_GRID, MAX_GRID)?;
        }
        if let Some(alpha) = self.sectorial_alpha {
            if !(alpha > 0.0 && alpha < std::f64::consts::PI) {
                return Err(bad("sectorial_alpha", format!("{alpha} is outside (0, pi)")));
            }
        }
        if let Some(gammas) = &self.gammas {
            if let Some(g) = gammas.iter().find(|g| !(**g > 0.0 && **g < std::f64::consts::FRAC_PI_2)) {
                return Err(bad("gammas", format!("{g} is outside (0, pi/2)")));
            }
        }
        if let Some(f) = &self.family {
            if f.max_degree == 0 || f.max_degree > 256 {
                return Err(bad("family.max_degree", "must lie in [1, 256]"));
            }
            if f.refinements > 4 {
                return Err(bad("family.refinements", "must be <= 4"));
            }
            if f.monomials > 4096 || f.phi > 4096 || f.cesaro > 4096 || f.random_draws > 100_000 {
                return Err(bad("family", "family sizes are capped at 4096 (random draws at 100000)"));
            }
        }
        if self.randomized() && self.seed.is_none() {
            return Err(bad("seed", format!("{} is randomized and needs a seed", c.name())));
        }
        match c {
            Command::AnalyzeMeasure => {
                let nu = self.probability_measure()?;
                if nu.measure().group().is_some() {
                    forbid(&self.grid, "grid", c)?;
                }
                forbid(&self.matrix, "matrix", c)?;
            }
            Command::AnalyzeOperator => {
                let m = self.matrix()?;
                if let Some(space) = &self.space {
                    space.validate().map_err(|e| bad("space", e.to_string()))?;
                    if space.dim() != m.nrows() {
                        return Err(bad("space", format!("dimension {} does not match the {}x{} matrix", space.dim(), m.nrows(), m.nrows())));
                    }
                }
                forbid(&self.measure, "measure", c)?;
            }
            Command::Transference => {
                let g = self.group()?;
                if g.rank() != 1 {
                    return Err(bad("group", "transference trials run on a cyclic group"));
                }
                in_range("trials", *require(&self.trials, "trials", c)?, 1, MAX_TRIALS)?;
                in_range("max_dim", *require(&self.max_dim, "max_dim", c)?, 1, 32)?;
            }
            Command::TensorChain => {
                let eta = self.probability_measure()?;
                if eta.measure().group().is_none() {
                    return Err(bad("measure", "the chain needs a measure on a finite group"));
                }
                if !eta.is_symmetric() {
                    return Err(bad("measure.weights", "eta must be symmetric"));
                }
                in_range("nmax", self.nmax, 1, MAX_CHAIN_LEGS)?;
                if let Some(m) = self.m {
                    in_range("m", m, 1, 64)?;
                }
            }
            Command::Dilation => {
                let chains = self.chains.unwrap_or(0);
                in_range("chains", chains, 0, MAX_TRIALS)?;
                in_range("max_states", self.max_states.unwrap_or(8), 1, MAX_CHAIN_STATES)?;
                if let Some(s) = self.sparsity {
                    if !(0.0..1.0).contains(&s) {
                        return Err(bad("sparsity", format!("{s} is outside [0, 1)")));
                    }
                }
                if let Some(legs) = &self.legs {
                    if let Some(l) = legs.iter().find(|l| **l == 0 || **l > MAX_CHAIN_LEGS) {
                        return Err(bad("legs", format!("{l} is outside [1, {MAX_CHAIN_LEGS}]")));
                    }
                }
                if chains == 0 && self.matrix.is_none() {
                    return Err(bad("chains", "give chains > 0 or an explicit matrix"));
                }
                if self.matrix.is_some() {
                    let m = self.matrix()?;
                    if m.iter().any(|z| z.im != 0.0) {
                        return Err(bad("matrix", "a Markov matrix must be real"));
                    }
                }
            }
            Command::Sweep => match require(&self.sweep, "sweep", c)? {
                SweepKind::RegularNorm => {
                    if self.matrix.is_none() && self.measure.is_none() {
                        return Err(bad("matrix", "regular-norm sweeps need a matrix or a measure"));
                    }
                    if self.measure.is_some() {
                        let nu = self.probability_measure()?;
                        if nu.measure().group().is_none() {
                            return Err(bad("measure", "the sweep needs a measure on a finite group"));
                        }
                    } else {
                        self.matrix()?;
                    }
                    in_range("nmax", self.nmax, 1, 256)?;
                }
                SweepKind::Kconvexity => {
                    let ms = require(&self.ms, "ms", c)?;
                    if ms.is_empty() || ms.windows(2).any(|w| w[0] >= w[1]) || ms[0] == 0 {
                        return Err(bad("ms", "must be a nonempty strictly increasing list of positive sizes"));
                    }
                    in_range("vars", *require(&self.vars, "vars", c)?, 1, 12)?;
                }
            },
        }
        if let Some(r) = self.restarts {
            in_range("restarts", r, 0, 4096)?;
        }
        Ok(())
    }

    pub fn grid_or_default(&self) -> usize {
        self.grid.unwrap_or(DEFAULT_GRID)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_validates() {
        let c = AnalysisConfig::from_json(r#"{"command":"analyze-measure","group":[2],"measure":{"weights":[0.5,0.5]},"seed":1}"#).unwrap();
        c.validate().unwrap();
        assert_eq!(c.nmax, 64);
        let bad_grid = AnalysisConfig::from_json(r#"{"command":"analyze-measure","measure":{"atoms":[[0,0.5],[1,0.5]]},"grid":10,"seed":1}"#).unwrap();
        assert!(matches!(bad_grid.validate(), Err(Error::Validation { field, .. }) if field == "grid"));
        let unknown = AnalysisConfig::from_json(r#"{"command":"sweep","bogus":1}"#);
        assert!(unknown.is_err());
    }

    #[test]
    fn seed_required_for_random_commands() {
        let c = AnalysisConfig::from_json(r#"{"command":"transference","group":[8],"trials":5,"max_dim":3}"#).unwrap();
        assert!(matches!(c.validate(), Err(Error::Validation { field, .. }) if field == "seed"));
        c.with_seed(Some(3)).validate().unwrap();
    }

    #[test]
    fn complex_entries() {
        let c = AnalysisConfig::from_json(r#"{"command":"analyze-operator","matrix":[[0,[0,1]],[1,0.5]]}"#).unwrap();
        let m = c.matrix().unwrap();
        assert_eq!(m[(0, 1)], C64::new(0.0, 1.0));
        assert_eq!(m[(1, 1)], C64::new(0.5, 0.0));
    }

    #[test]
    fn asymmetric_eta_rejected() {
        let c = AnalysisConfig::from_json(r#"{"command":"tensor-chain","group":[3],"measure":{"weights":[0.5,0.5,0]},"nmax":2}"#).unwrap();
        assert!(matches!(c.validate(), Err(Error::Validation { field, .. }) if field == "measure.weights"));
    }
}
