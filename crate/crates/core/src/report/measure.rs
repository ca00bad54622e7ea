//! Every measure for a single state, as one JSON record.

use serde::Serialize;

use super::LoadedState;
use crate::coherence::{c_l1, c_re, superadditivity_gap, uncertainty_gap};
use crate::correlations::{
    deficit_oneway, discord, entanglement_of_pure_operator, tradeoff_coherence_loss,
    tradeoff_fixed, CorrelationReport,
};
use crate::entropy::{information_function, mutual_information, von_neumann};
use crate::error::{Error, Result};
use crate::measopt::{MeasurementBasis, Minimum, OptimizerConfig};
use crate::qstate::BipartiteState;

#[derive(Debug, Clone, Serialize)]
pub struct MeasureRecord {
    pub label: Option<String>,
    pub dim: usize,
    pub units: &'static str,
    /// `"computational"` or `"file"`.
    pub basis: &'static str,
    pub entropy: f64,
    pub information: f64,
    pub c_re: f64,
    pub c_l1: f64,
    pub uncertainty_gap: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bipartite: Option<BipartiteRecord>,
    pub converged: bool,
}

/// Quantities of a bipartite state; coherences use computational bases.
#[derive(Debug, Clone, Serialize)]
pub struct BipartiteRecord {
    pub dims: [usize; 2],
    pub entropy_a: f64,
    pub entropy_b: f64,
    pub coherence_a: f64,
    pub coherence_b: f64,
    pub c_l1_a: f64,
    pub c_l1_b: f64,
    pub mutual_information: f64,
    pub superadditivity_gap: f64,
    /// Present only for pure states.
    pub entanglement: Option<f64>,
    pub tradeoff1_residual: f64,
    pub tradeoff3_residual: f64,
    /// Optimized discord and deficit with the coherence bookkeeping.
    #[serde(flatten)]
    pub thm2: CorrelationReport,
}

fn best_so_far(r: Result<Minimum>) -> Result<Minimum> {
    match r {
        Err(Error::OptimizerConvergence(m)) => Ok(*m),
        other => other,
    }
}

fn bipartite_record(s: &BipartiteState, cfg: &OptimizerConfig) -> Result<BipartiteRecord> {
    let (da, db) = s.dims();
    let (ba, bb) = (
        MeasurementBasis::computational(da),
        MeasurementBasis::computational(db),
    );
    let (rho_a, rho_b) = (s.reduced_a(), s.reduced_b());
    let (dmin, fmin) = rayon::join(|| discord(s, cfg), || deficit_oneway(s, cfg));
    let (dmin, fmin) = (best_so_far(dmin)?, best_so_far(fmin)?);
    let thm2 = CorrelationReport::from_minima(s, &dmin, &fmin)?;
    Ok(BipartiteRecord {
        dims: [da, db],
        entropy_a: von_neumann(&rho_a)?,
        entropy_b: von_neumann(&rho_b)?,
        coherence_a: c_re(&rho_a, &ba)?.value,
        coherence_b: c_re(&rho_b, &bb)?.value,
        c_l1_a: c_l1(&rho_a, &ba)?.value,
        c_l1_b: c_l1(&rho_b, &bb)?.value,
        mutual_information: mutual_information(s)?,
        superadditivity_gap: superadditivity_gap(s, &ba, &bb)?,
        entanglement: entanglement_of_pure_operator(s).ok(),
        tradeoff1_residual: tradeoff_fixed(s, &ba)?,
        tradeoff3_residual: tradeoff_coherence_loss(s, &ba, &bb)?,
        thm2,
    })
}

/// Evaluates every measure. A non-converged optimization still yields a
/// record, with `converged` false and the best values found.
pub fn measure(
    state: &LoadedState,
    label: Option<String>,
    basis: Option<&MeasurementBasis>,
    cfg: &OptimizerConfig,
) -> Result<MeasureRecord> {
    let op = state.op();
    let d = op.dim();
    let computational = MeasurementBasis::computational(d);
    let chosen = basis.unwrap_or(&computational);
    let bipartite = match state {
        LoadedState::Bipartite(s) => Some(bipartite_record(s, cfg)?),
        LoadedState::Single(_) => None,
    };
    let converged = bipartite.as_ref().is_none_or(|b| b.thm2.converged);
    Ok(MeasureRecord {
        label,
        dim: d,
        units: "bits",
        basis: if basis.is_some() {
            "file"
        } else {
            "computational"
        },
        entropy: von_neumann(op)?,
        information: information_function(op)?,
        c_re: c_re(op, chosen)?.value,
        c_l1: c_l1(op, chosen)?.value,
        uncertainty_gap: uncertainty_gap(op, chosen)?,
        bipartite,
        converged,
    })
}
