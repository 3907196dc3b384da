//! Vector-valued extensions `T (x) I_X` on mixed-norm spaces, the tensor
//! interchange identity, Rota dilation of reversible chains, the commuting
//! projection expression and regular-norm / K-convexity probes.

mod interchange;
mod pisier;
mod probes;
mod rota;

pub use interchange::{interchange_identity_check, lemma_lem_check, random_family, InterchangeReport, LemmaRecord, MeasureFamily};
pub use pisier::{pisier_expression_norm, subordination_chain_check, ChainRow, PisierReport, SubordinationTable};
pub use probes::{kconvexity_lower, kconvexity_sweep, regular_norm_lower, ProbeRow};
pub use rota::{chain_of_measure, random_reversible_chain, rota_dilation, DilationResiduals, DilationTriple};

use serde::{Deserialize, Serialize};

use crate::linalg::{guard_dense, identity, kron, MAX_DENSE_ENTRIES};
use crate::norms::{Exponent, NormTag};
use crate::operators::LinearOperator;
use crate::{Error, Result};

/// `L^p(leg_1 x ... x leg_k; l^q_m)` with counting measure on the legs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixedSpace {
    pub p: Exponent,
    pub legs: Vec<usize>,
    pub q: Exponent,
    pub m: usize,
}

impl MixedSpace {
    pub fn new(p: Exponent, legs: Vec<usize>, q: Exponent, m: usize) -> Result<Self> {
        let s = MixedSpace { p, legs, q, m };
        s.guard()?;
        Ok(s)
    }

    pub fn outer(&self) -> u128 {
        self.legs.iter().fold(1u128, |acc, &l| acc.saturating_mul(l as u128))
    }

    pub fn total_dim(&self) -> u128 {
        self.outer().saturating_mul(self.m as u128)
    }

    /// Vector length at most `10^6`.
    pub fn guard(&self) -> Result<()> {
        if self.m == 0 || self.legs.iter().any(|&l| l == 0) {
            return Err(Error::validation("space", "leg sizes and m must be >= 1"));
        }
        let required = self.total_dim();
        if required > MAX_DENSE_ENTRIES {
            return Err(Error::Guard { what: "mixed space dimension".into(), required, limit: MAX_DENSE_ENTRIES });
        }
        Ok(())
    }

    pub fn tag(&self) -> Result<NormTag> {
        self.guard()?;
        Ok(NormTag::Mixed { p: self.p, outer: self.outer() as usize, q: self.q, inner: self.m })
    }
}

/// `T (x) I_m` on `L^p(...; l^q_m)`; `T` itself when `m = 1`.
pub fn tensor_extend(t: &LinearOperator, q: Exponent, m: usize) -> Result<LinearOperator> {
    if m == 0 {
        return Err(Error::validation("inner", "m must be >= 1"));
    }
    if m == 1 {
        return Ok(t.clone());
    }
    guard_dense("tensor extension", (t.dim() as u128).saturating_mul(m as u128))?;
    let space = t.space().with_inner(q, m)?;
    let matrix = kron(t.matrix(), &identity(m));
    let ev = t.circulant_eigenvalues().map(|ev| ev.iter().flat_map(|&z| std::iter::repeat_n(z, m)).collect::<Vec<_>>());
    let op = LinearOperator::new(matrix, space)?;
    Ok(match ev {
        Some(ev) => LinearOperator::circulant(op.matrix().clone(), op.space().clone(), ev),
        None => op,
    })
}
