//! Correlations revealed by rank-1 projective measurements on subsystem A.
//!
//! For a fixed measurement `Π` on A the post-measurement state is
//! `ρ̃ = Σ_i (Π_i ⊗ I) ρ (Π_i ⊗ I)`. The discord-like quantity is the drop in
//! mutual information `I(ρ) − I(ρ̃)`, the deficit-like quantity is the entropy
//! increase `S(ρ̃) − S(ρ)`. Their difference is exactly the relative entropy
//! of coherence of `ρ_A` in the measured basis.

use serde::Serialize;

use crate::coherence::c_re;
use crate::entropy::{clamp_bits, mutual_information, shannon, von_neumann};
use crate::error::{Error, Result};
use crate::measopt::{
    minimize, MeasurementBasis, Minimum, OptimizerConfig, OptimizerMeta, ParamVector,
};
use crate::qstate::{BipartiteState, CMatrix, DensityOperator, PureState, Spectrum};

/// Branches with probability at or below this carry no conditional state and
/// contribute nothing to entropy sums.
pub const BRANCH_TOL: f64 = 1e-12;
const OFF_BLOCK_TOL: f64 = 1e-8;
const PURITY_TOL: f64 = 1e-8;

fn check_basis_a(s: &BipartiteState, basis_a: &MeasurementBasis) -> Result<()> {
    let da = s.dims().0;
    if basis_a.dim() != da {
        return Err(Error::DimensionMismatch {
            expected: da,
            actual: basis_a.dim(),
        });
    }
    Ok(())
}

/// Unnormalized conditional blocks `(<v_i| ⊗ I) ρ (|v_i> ⊗ I)`; block `i` has
/// trace `p_i`.
fn conditional_blocks(s: &BipartiteState, basis_a: &MeasurementBasis) -> Vec<CMatrix> {
    let (da, db) = s.dims();
    let v = basis_a.vectors();
    (0..da)
        .map(|i| {
            CMatrix::from_fn(db, db, |b, b2| {
                let mut acc = num_complex::Complex64::new(0.0, 0.0);
                for a in 0..da {
                    let va = v[(a, i)].conj();
                    for a2 in 0..da {
                        acc += va * s.element(a, b, a2, b2) * v[(a2, i)];
                    }
                }
                acc
            })
        })
        .collect()
}

/// `Σ_i (Π_i ⊗ I) ρ (Π_i ⊗ I)` for the projectors of `basis_a`.
pub fn measure_local(s: &BipartiteState, basis_a: &MeasurementBasis) -> Result<BipartiteState> {
    check_basis_a(s, basis_a)?;
    let (da, db) = s.dims();
    let v = basis_a.vectors();
    let blocks = conditional_blocks(s, basis_a);
    let mut out = CMatrix::zeros(da * db, da * db);
    for (i, block) in blocks.iter().enumerate() {
        let col = v.column(i);
        let projector = col * col.adjoint();
        out += projector.kronecker(block);
    }
    BipartiteState::new(DensityOperator::from_trusted(out), (da, db))
}

/// `ρ̃ = Σ_i p_i |i><i| ⊗ ρ_i^B`.
#[derive(Debug, Clone)]
pub struct ClassicalQuantumDecomposition {
    pub probs: Vec<f64>,
    /// `None` for branches with `p_i <= BRANCH_TOL`.
    pub conditionals: Vec<Option<DensityOperator>>,
}

impl ClassicalQuantumDecomposition {
    /// Rebuilds `Σ_i p_i |v_i><v_i| ⊗ ρ_i^B`.
    pub fn reassemble(&self, basis_a: &MeasurementBasis) -> CMatrix {
        let v = basis_a.vectors();
        let db = self
            .conditionals
            .iter()
            .flatten()
            .map(|c| c.dim())
            .next()
            .unwrap_or(1);
        let da = basis_a.dim();
        let mut out = CMatrix::zeros(da * db, da * db);
        for (i, (p, cond)) in self.probs.iter().zip(&self.conditionals).enumerate() {
            if let Some(cond) = cond {
                let col = v.column(i);
                out += (col * col.adjoint()).kronecker(cond.matrix()).scale(*p);
            }
        }
        out
    }
}

/// Splits a post-measurement state into outcome probabilities and
/// conditional states of B.
pub fn cq_decompose(
    post: &BipartiteState,
    basis_a: &MeasurementBasis,
) -> Result<ClassicalQuantumDecomposition> {
    check_basis_a(post, basis_a)?;
    let (da, db) = post.dims();
    let w = basis_a.product(&MeasurementBasis::computational(db));
    let coords = post.op().in_basis(&w)?;
    let mut mass = 0.0;
    for r in 0..da * db {
        for c in 0..da * db {
            if r / db != c / db {
                mass += coords[(r, c)].norm();
            }
        }
    }
    if mass > OFF_BLOCK_TOL {
        return Err(Error::NotBlockDiagonal { mass });
    }
    let mut probs = Vec::with_capacity(da);
    let mut conditionals = Vec::with_capacity(da);
    for i in 0..da {
        let block = coords.view((i * db, i * db), (db, db)).into_owned();
        let p = block.trace().re;
        probs.push(p.max(0.0));
        conditionals.push(if p > BRANCH_TOL {
            Some(DensityOperator::from_trusted(block.unscale(p)))
        } else {
            None
        });
    }
    Ok(ClassicalQuantumDecomposition {
        probs,
        conditionals,
    })
}

/// Mutual information of the post-measurement state.
pub fn gain(s: &BipartiteState, basis_a: &MeasurementBasis) -> Result<f64> {
    mutual_information(&measure_local(s, basis_a)?)
}

/// `I(ρ) − I(ρ̃)`.
pub fn discord_given(s: &BipartiteState, basis_a: &MeasurementBasis) -> Result<f64> {
    let before = mutual_information(s)?;
    let after = gain(s, basis_a)?;
    Ok(clamp_bits(before - after))
}

/// `S(ρ̃) − S(ρ)`.
pub fn deficit_given(s: &BipartiteState, basis_a: &MeasurementBasis) -> Result<f64> {
    let post = measure_local(s, basis_a)?;
    Ok(clamp_bits(von_neumann(post.op())? - von_neumann(s.op())?))
}

/// Measurement-dependent entropies evaluated blockwise, for the optimizer.
///
/// `ρ̃` is block diagonal in `{|v_i>} ⊗ {|b>}`, so `S(ρ̃)` is the entropy of
/// the union of the block spectra and `S(ρ̃_A) = H(p)`.
struct MeasurementObjective<'a> {
    state: &'a BipartiteState,
    entropy_a: f64,
    entropy_ab: f64,
}

impl<'a> MeasurementObjective<'a> {
    fn new(state: &'a BipartiteState) -> Result<Self> {
        Ok(MeasurementObjective {
            state,
            entropy_a: von_neumann(&state.reduced_a())?,
            entropy_ab: von_neumann(state.op())?,
        })
    }

    /// `(H(p), S(ρ̃))`.
    fn post_entropies(&self, basis_a: &MeasurementBasis) -> Result<(f64, f64)> {
        let blocks = conditional_blocks(self.state, basis_a);
        let probs: Vec<f64> = blocks.iter().map(|b| b.trace().re).collect();
        let mut joint = 0.0;
        for (block, &p) in blocks.iter().zip(&probs) {
            if p <= BRANCH_TOL {
                continue;
            }
            let spectrum = Spectrum::of_hermitian(&((block + block.adjoint()).scale(0.5)))?;
            joint -= spectrum
                .clamped()
                .iter()
                .filter(|&&x| x > 0.0)
                .map(|&x| x * x.log2())
                .sum::<f64>();
        }
        Ok((shannon(&probs), joint))
    }

    fn discord(&self, p: &ParamVector) -> f64 {
        match self.post_entropies(&p.to_basis()) {
            Ok((h, joint)) => self.entropy_a - self.entropy_ab - h + joint,
            Err(_) => f64::INFINITY,
        }
    }

    fn deficit(&self, p: &ParamVector) -> f64 {
        match self.post_entropies(&p.to_basis()) {
            Ok((_, joint)) => joint - self.entropy_ab,
            Err(_) => f64::INFINITY,
        }
    }
}

fn clamp_minimum(mut m: Minimum) -> Minimum {
    m.value = clamp_bits(m.value);
    m
}

fn clamp_result(r: Result<Minimum>) -> Result<Minimum> {
    match r {
        Ok(m) => Ok(clamp_minimum(m)),
        Err(Error::OptimizerConvergence(m)) => {
            Err(Error::OptimizerConvergence(Box::new(clamp_minimum(*m))))
        }
        Err(e) => Err(e),
    }
}

/// One-way discord: `discord_given` minimized over projective measurements on A.
pub fn discord(s: &BipartiteState, cfg: &OptimizerConfig) -> Result<Minimum> {
    let objective = MeasurementObjective::new(s)?;
    clamp_result(minimize(|p| objective.discord(p), s.dims().0, cfg))
}

/// One-way deficit: `deficit_given` minimized over projective measurements on A.
pub fn deficit_oneway(s: &BipartiteState, cfg: &OptimizerConfig) -> Result<Minimum> {
    let objective = MeasurementObjective::new(s)?;
    clamp_result(minimize(|p| objective.deficit(p), s.dims().0, cfg))
}

/// Entanglement of a pure bipartite state: the entropy of its A marginal.
pub fn entanglement_pure(psi: &PureState, dims: (usize, usize)) -> Result<f64> {
    von_neumann(&BipartiteState::from_pure(psi, dims)?.reduced_a())
}

/// As [`entanglement_pure`] for a state given as an operator; rejects mixed input.
pub fn entanglement_of_pure_operator(s: &BipartiteState) -> Result<f64> {
    let violation = (s.op().purity() - 1.0).abs();
    if violation > PURITY_TOL {
        return Err(Error::NotPure { violation });
    }
    von_neumann(&s.reduced_a())
}

/// `δ(ρ|Π) + C_RE(ρ_A in Π) − Δ(ρ|Π)`; zero up to round-off.
pub fn tradeoff_fixed(s: &BipartiteState, basis_a: &MeasurementBasis) -> Result<f64> {
    let delta = discord_given(s, basis_a)?;
    let coherence = c_re(&s.reduced_a(), basis_a)?.value;
    let deficit = deficit_given(s, basis_a)?;
    Ok(delta + coherence - deficit)
}

/// `C_RE(ρ) − C_RE(ρ̃) − Δ(ρ|Π)` in the product basis; zero up to round-off
/// because `ρ` and `ρ̃` dephase to the same state.
pub fn tradeoff_coherence_loss(
    s: &BipartiteState,
    basis_a: &MeasurementBasis,
    basis_b: &MeasurementBasis,
) -> Result<f64> {
    let (_, db) = s.dims();
    if basis_b.dim() != db {
        return Err(Error::DimensionMismatch {
            expected: db,
            actual: basis_b.dim(),
        });
    }
    let post = measure_local(s, basis_a)?;
    let product = basis_a.product(basis_b);
    let before = c_re(s.op(), &product)?.value;
    let after = c_re(post.op(), &product)?.value;
    Ok(before - after - deficit_given(s, basis_a)?)
}

/// Optimized discord and deficit with the coherence of `ρ_A` in the candidate
/// bases. The equality `δ + C_RE(ρ_A) = Δ` is reported, not asserted.
#[derive(Debug, Clone, Serialize)]
pub struct CorrelationReport {
    pub discord: f64,
    pub deficit: f64,
    /// `C_RE(ρ_A)` in the computational basis.
    pub coherence_a_reference: f64,
    pub coherence_a_discord_basis: f64,
    pub coherence_a_deficit_basis: f64,
    pub discord_basis: ParamVector,
    pub deficit_basis: ParamVector,
    /// `discord + coherence_a_reference − deficit`.
    pub residual_thm2: f64,
    /// `discord + coherence_a_discord_basis − deficit`; nonnegative up to
    /// optimizer error.
    pub chain_upper_slack: f64,
    /// `deficit − discord − coherence_a_deficit_basis`; nonnegative up to
    /// optimizer error.
    pub chain_lower_slack: f64,
    pub discord_meta: OptimizerMeta,
    pub deficit_meta: OptimizerMeta,
    pub converged: bool,
}

impl CorrelationReport {
    pub fn from_minima(s: &BipartiteState, discord: &Minimum, deficit: &Minimum) -> Result<Self> {
        let rho_a = s.reduced_a();
        let da = s.dims().0;
        let reference = c_re(&rho_a, &MeasurementBasis::computational(da))?.value;
        let at_discord = c_re(&rho_a, &discord.argmin.to_basis())?.value;
        let at_deficit = c_re(&rho_a, &deficit.argmin.to_basis())?.value;
        Ok(CorrelationReport {
            discord: discord.value,
            deficit: deficit.value,
            coherence_a_reference: reference,
            coherence_a_discord_basis: at_discord,
            coherence_a_deficit_basis: at_deficit,
            discord_basis: discord.argmin.canonical(),
            deficit_basis: deficit.argmin.canonical(),
            residual_thm2: discord.value + reference - deficit.value,
            chain_upper_slack: discord.value + at_discord - deficit.value,
            chain_lower_slack: deficit.value - discord.value - at_deficit,
            discord_meta: discord.meta.clone(),
            deficit_meta: deficit.meta.clone(),
            converged: discord.meta.converged && deficit.meta.converged,
        })
    }
}

/// Runs both optimizations (concurrently) and assembles the report.
pub fn tradeoff_thm2(s: &BipartiteState, cfg: &OptimizerConfig) -> Result<CorrelationReport> {
    let (d, f) = rayon::join(|| discord(s, cfg), || deficit_oneway(s, cfg));
    CorrelationReport::from_minima(s, &d?, &f?)
}
