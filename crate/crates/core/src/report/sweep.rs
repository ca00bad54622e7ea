//! Monte Carlo verification sweeps.
//!
//! Sample `k` of a sweep with seed `s` draws everything it needs from
//! `sampler::rng(s + k)`, so rows do not depend on evaluation order.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{ReportError, StateFile};
use crate::coherence::{c_re, superadditivity_gap, uncertainty_gap};
use crate::correlations::{
    deficit_given, deficit_oneway, discord, discord_given, entanglement_pure, measure_local,
    tradeoff_coherence_loss, CorrelationReport,
};
use crate::entropy::{shannon, von_neumann};
use crate::error::{Error, Result};
use crate::measopt::{MeasurementBasis, Minimum, OptimizerConfig, OptimizerMeta};
use crate::qstate::{BipartiteState, DensityOperator};
use crate::sampler::{self, SampleRng};

/// Samples with optimized discord at or below this are excluded from the
/// coherence–correlation equality count.
pub const THM2_MIN_DISCORD: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    Uncertainty,
    BoundChain,
    Superadd,
    Thm1Pure,
    Tradeoff1,
    Thm2,
    Tradeoff3,
    Ordering,
}

impl Check {
    pub const ALL: [Check; 8] = [
        Check::Uncertainty,
        Check::BoundChain,
        Check::Superadd,
        Check::Thm1Pure,
        Check::Tradeoff1,
        Check::Thm2,
        Check::Tradeoff3,
        Check::Ordering,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Uncertainty => "uncertainty",
            Check::BoundChain => "bound-chain",
            Check::Superadd => "superadd",
            Check::Thm1Pure => "thm1-pure",
            Check::Tradeoff1 => "tradeoff1",
            Check::Thm2 => "thm2",
            Check::Tradeoff3 => "tradeoff3",
            Check::Ordering => "ordering",
        }
    }

    pub fn default_tol(self) -> f64 {
        match self {
            Check::Uncertainty | Check::BoundChain | Check::Superadd | Check::Thm1Pure => 1e-9,
            Check::Tradeoff1 | Check::Tradeoff3 => 1e-8,
            Check::Ordering => 1e-6,
            Check::Thm2 => 1e-4,
        }
    }

    /// Check-specific CSV columns, between `residual` and `violation`.
    pub fn columns(self) -> &'static [&'static str] {
        match self {
            Check::Uncertainty => &["entropy", "c_re", "gap"],
            Check::BoundChain => &[
                "c_re",
                "entropy_diag",
                "log_d",
                "purity",
                "equality_consistent",
            ],
            Check::Superadd => &["c_re_ab", "c_re_a", "c_re_b"],
            Check::Thm1Pure => &["entanglement", "c_re_a", "log_d_a"],
            Check::Tradeoff1 => &["discord_given", "c_re_a", "deficit_given"],
            Check::Tradeoff3 => &["c_re_ab", "c_re_post", "deficit_given"],
            Check::Ordering => &["discord", "deficit", "converged"],
            Check::Thm2 => &[
                "discord",
                "deficit",
                "c_re_a_reference",
                "c_re_a_discord_basis",
                "c_re_a_deficit_basis",
                "chain_upper_slack",
                "chain_lower_slack",
                "qualifies",
                "converged",
            ],
        }
    }

    fn is_bipartite(self) -> bool {
        !matches!(self, Check::Uncertainty | Check::BoundChain)
    }

    fn is_two_sided(self) -> bool {
        matches!(self, Check::Tradeoff1 | Check::Tradeoff3 | Check::Thm2)
    }

    /// Whether violations make the sweep fail. The `thm2` equality is only reported.
    pub fn asserts(self) -> bool {
        self != Check::Thm2
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Check {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Check::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Check::ALL.iter().map(|c| c.name()).collect();
                format!("unknown check '{s}'; expected one of {}", names.join(", "))
            })
    }
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub check: Check,
    pub samples: usize,
    /// `[d]` or `[d_A, d_B]`.
    pub dims: Vec<usize>,
    pub seed: u64,
    pub tol: f64,
    pub optimizer: OptimizerConfig,
}

impl SweepConfig {
    pub fn new(check: Check, samples: usize, dims: Vec<usize>, seed: u64) -> Self {
        SweepConfig {
            check,
            samples,
            dims,
            seed,
            tol: check.default_tol(),
            optimizer: OptimizerConfig::default(),
        }
    }

    fn bipartite_dims(&self) -> std::result::Result<(usize, usize), ReportError> {
        match self.dims.as_slice() {
            [da, db] if *da > 0 && *db > 0 => Ok((*da, *db)),
            _ => Err(ReportError::BadArgs(format!(
                "check {} needs --dims dA dB",
                self.check
            ))),
        }
    }

    fn total_dim(&self) -> std::result::Result<usize, ReportError> {
        match self.dims.as_slice() {
            [d] if *d > 0 => Ok(*d),
            [da, db] if *da > 0 && *db > 0 => Ok(da * db),
            _ => Err(ReportError::BadArgs(
                "--dims takes one or two positive integers".into(),
            )),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SampleRow {
    pub sample_index: usize,
    pub seed: u64,
    pub residual: f64,
    /// Values for [`Check::columns`]; flags are 0 or 1.
    pub values: Vec<f64>,
    pub violation: bool,
    /// Optimizer metadata, discord first, for optimizing checks.
    pub optimizer: Vec<OptimizerMeta>,
    /// Kept only for `thm2` samples that break the equality.
    pub counterexample: Option<StateFile>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct OptimizerAggregate {
    pub runs: usize,
    pub not_converged: usize,
    pub mean_evaluations: f64,
    pub max_evaluations: usize,
    pub max_sweeps: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub check: Check,
    pub samples: usize,
    pub seed: u64,
    pub dims: Vec<usize>,
    pub tol: f64,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub violations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimizer: Option<OptimizerAggregate>,
    /// bound-chain: samples where `C_RE = S(ρ_diag)` disagrees with purity.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub equality_mismatches: Option<usize>,
    /// thm2: samples with discord above the cut.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub qualifying: Option<usize>,
    /// thm2: samples with either chain slack below `-tol`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chain_violations: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub counterexamples: Vec<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub config: SweepConfig,
    pub rows: Vec<SampleRow>,
    pub summary: Summary,
}

impl VerificationReport {
    /// True when the check asserts and nothing was violated.
    pub fn passed(&self) -> bool {
        !self.config.check.asserts()
            || (self.summary.violations == 0 && self.summary.equality_mismatches.unwrap_or(0) == 0)
    }
}

fn flag(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

fn mixed_state(d: usize, rng: &mut SampleRng) -> Result<DensityOperator> {
    let rank = rng.random_range(1..=d);
    sampler::ginibre_density_with(d, rank, rng)
}

fn bipartite_mixed(dims: (usize, usize), rng: &mut SampleRng) -> Result<BipartiteState> {
    BipartiteState::new(mixed_state(dims.0 * dims.1, rng)?, dims)
}

fn random_basis(d: usize, rng: &mut SampleRng) -> Result<MeasurementBasis> {
    MeasurementBasis::new(sampler::random_unitary_with(d, rng))
}

fn settle(r: Result<Minimum>) -> Result<Minimum> {
    match r {
        Err(Error::OptimizerConvergence(m)) => Ok(*m),
        other => other,
    }
}

struct Evaluated {
    residual: f64,
    values: Vec<f64>,
    optimizer: Vec<OptimizerMeta>,
    state: Option<BipartiteState>,
}

fn evaluate(cfg: &SweepConfig, seed: u64) -> Result<Evaluated> {
    let mut rng = sampler::rng(seed);
    let plain = |residual, values| Evaluated {
        residual,
        values,
        optimizer: vec![],
        state: None,
    };
    let dims = cfg.bipartite_dims().ok();
    Ok(match cfg.check {
        Check::Uncertainty => {
            let d = cfg.total_dim().expect("validated");
            let rho = mixed_state(d, &mut rng)?;
            let comp = MeasurementBasis::computational(d);
            let gap = uncertainty_gap(&rho, &comp)?;
            plain(gap, vec![von_neumann(&rho)?, c_re(&rho, &comp)?.value, gap])
        }
        Check::BoundChain => {
            let d = cfg.total_dim().expect("validated");
            let rho = mixed_state(d, &mut rng)?;
            let comp = MeasurementBasis::computational(d);
            let c = c_re(&rho, &comp)?.value;
            let s_diag = shannon(&rho.populations(&comp)?);
            let log_d = (d as f64).log2();
            let purity = rho.purity();
            let consistent = ((s_diag - c).abs() <= 1e-9) == ((purity - 1.0).abs() <= 1e-8);
            plain(
                (s_diag - c).min(log_d - s_diag),
                vec![c, s_diag, log_d, purity, flag(consistent)],
            )
        }
        Check::Superadd => {
            let (da, db) = dims.expect("validated");
            let s = bipartite_mixed((da, db), &mut rng)?;
            let (ba, bb) = (
                MeasurementBasis::computational(da),
                MeasurementBasis::computational(db),
            );
            let gap = superadditivity_gap(&s, &ba, &bb)?;
            let values = vec![
                c_re(s.op(), &ba.product(&bb))?.value,
                c_re(&s.reduced_a(), &ba)?.value,
                c_re(&s.reduced_b(), &bb)?.value,
            ];
            plain(gap, values)
        }
        Check::Thm1Pure => {
            let (da, db) = dims.expect("validated");
            let psi = sampler::haar_pure_with(da * db, &mut rng);
            let e = entanglement_pure(&psi, (da, db))?;
            let s = BipartiteState::from_pure(&psi, (da, db))?;
            let c = c_re(&s.reduced_a(), &MeasurementBasis::computational(da))?.value;
            let log_da = (da as f64).log2();
            plain(log_da - e - c, vec![e, c, log_da])
        }
        Check::Tradeoff1 => {
            let (da, db) = dims.expect("validated");
            let s = bipartite_mixed((da, db), &mut rng)?;
            let basis = random_basis(da, &mut rng)?;
            let delta = discord_given(&s, &basis)?;
            let c = c_re(&s.reduced_a(), &basis)?.value;
            let big_delta = deficit_given(&s, &basis)?;
            plain(delta + c - big_delta, vec![delta, c, big_delta])
        }
        Check::Tradeoff3 => {
            let (da, db) = dims.expect("validated");
            let s = bipartite_mixed((da, db), &mut rng)?;
            let ba = random_basis(da, &mut rng)?;
            let bb = random_basis(db, &mut rng)?;
            let product = ba.product(&bb);
            let post = measure_local(&s, &ba)?;
            let residual = tradeoff_coherence_loss(&s, &ba, &bb)?;
            let values = vec![
                c_re(s.op(), &product)?.value,
                c_re(post.op(), &product)?.value,
                deficit_given(&s, &ba)?,
            ];
            plain(residual, values)
        }
        Check::Ordering | Check::Thm2 => {
            let (da, db) = dims.expect("validated");
            let s = bipartite_mixed((da, db), &mut rng)?;
            let opt = OptimizerConfig {
                seed,
                ..cfg.optimizer
            };
            let dmin = settle(discord(&s, &opt))?;
            let fmin = settle(deficit_oneway(&s, &opt))?;
            let converged = dmin.meta.converged && fmin.meta.converged;
            let optimizer = vec![dmin.meta.clone(), fmin.meta.clone()];
            if cfg.check == Check::Ordering {
                Evaluated {
                    residual: fmin.value - dmin.value,
                    values: vec![dmin.value, fmin.value, flag(converged)],
                    optimizer,
                    state: None,
                }
            } else {
                let r = CorrelationReport::from_minima(&s, &dmin, &fmin)?;
                Evaluated {
                    residual: r.residual_thm2,
                    values: vec![
                        r.discord,
                        r.deficit,
                        r.coherence_a_reference,
                        r.coherence_a_discord_basis,
                        r.coherence_a_deficit_basis,
                        r.chain_upper_slack,
                        r.chain_lower_slack,
                        flag(r.discord > THM2_MIN_DISCORD),
                        flag(converged),
                    ],
                    optimizer,
                    state: Some(s),
                }
            }
        }
    })
}

fn is_violation(check: Check, tol: f64, residual: f64, values: &[f64]) -> bool {
    match check {
        Check::Thm2 => values[7] == 1.0 && residual.abs() > tol,
        c if c.is_two_sided() => residual.abs() > tol,
        _ => residual < -tol,
    }
}

/// Runs the sweep. Samples are evaluated in parallel and returned in order.
pub fn run_sweep(cfg: &SweepConfig) -> std::result::Result<VerificationReport, ReportError> {
    if cfg.samples == 0 {
        return Err(ReportError::BadArgs("--samples must be positive".into()));
    }
    #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN must fail too
    if !(cfg.tol >= 0.0) {
        return Err(ReportError::BadArgs("--tol must be nonnegative".into()));
    }
    if cfg.check.is_bipartite() {
        cfg.bipartite_dims()?;
    } else {
        cfg.total_dim()?;
    }
    cfg.optimizer.validate()?;

    let rows: Vec<SampleRow> = (0..cfg.samples)
        .into_par_iter()
        .map(|k| {
            let seed = cfg.seed.wrapping_add(k as u64);
            let e = evaluate(cfg, seed)?;
            let violation = is_violation(cfg.check, cfg.tol, e.residual, &e.values);
            let counterexample = match (&e.state, violation) {
                (Some(s), true) => Some(StateFile::from_bipartite(
                    s,
                    Some(format!("{} sample {k} seed {seed}", cfg.check)),
                )),
                _ => None,
            };
            Ok(SampleRow {
                sample_index: k,
                seed,
                residual: e.residual,
                values: e.values,
                violation,
                optimizer: e.optimizer,
                counterexample,
            })
        })
        .collect::<Result<_>>()?;

    let summary = summarize(cfg, &rows);
    Ok(VerificationReport {
        config: cfg.clone(),
        rows,
        summary,
    })
}

fn summarize(cfg: &SweepConfig, rows: &[SampleRow]) -> Summary {
    let residuals = rows.iter().map(|r| r.residual);
    let min = residuals.clone().fold(f64::INFINITY, f64::min);
    let max = residuals.clone().fold(f64::NEG_INFINITY, f64::max);
    let mean = residuals.sum::<f64>() / rows.len() as f64;

    let metas: Vec<&OptimizerMeta> = rows.iter().flat_map(|r| &r.optimizer).collect();
    let optimizer = (!metas.is_empty()).then(|| OptimizerAggregate {
        runs: metas.len(),
        not_converged: metas.iter().filter(|m| !m.converged).count(),
        mean_evaluations: metas.iter().map(|m| m.evaluations as f64).sum::<f64>()
            / metas.len() as f64,
        max_evaluations: metas.iter().map(|m| m.evaluations).max().unwrap_or(0),
        max_sweeps: metas.iter().map(|m| m.sweeps).max().unwrap_or(0),
    });

    let (mut equality_mismatches, mut qualifying, mut chain_violations) = (None, None, None);
    match cfg.check {
        Check::BoundChain => {
            equality_mismatches = Some(rows.iter().filter(|r| r.values[4] != 1.0).count());
        }
        Check::Thm2 => {
            qualifying = Some(rows.iter().filter(|r| r.values[7] == 1.0).count());
            chain_violations = Some(
                rows.iter()
                    .filter(|r| r.values[5] < -cfg.tol || r.values[6] < -cfg.tol)
                    .count(),
            );
        }
        _ => {}
    }

    Summary {
        check: cfg.check,
        samples: rows.len(),
        seed: cfg.seed,
        dims: cfg.dims.clone(),
        tol: cfg.tol,
        min,
        max,
        mean,
        violations: rows.iter().filter(|r| r.violation).count(),
        optimizer,
        equality_mismatches,
        qualifying,
        chain_violations,
        counterexamples: vec![],
    }
}

fn header(check: Check) -> Vec<&'static str> {
    let mut h = vec!["sample_index", "seed", "residual"];
    h.extend_from_slice(check.columns());
    h.push("violation");
    h
}

/// RFC 4180 CSV, one row per sample.
pub fn write_csv<W: Write>(
    report: &VerificationReport,
    out: W,
) -> std::result::Result<(), ReportError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header(report.config.check))?;
    for row in &report.rows {
        let mut record = vec![
            row.sample_index.to_string(),
            row.seed.to_string(),
            row.residual.to_string(),
        ];
        record.extend(row.values.iter().map(|v| v.to_string()));
        record.push(row.violation.to_string());
        w.write_record(&record)?;
    }
    w.flush().map_err(|source| ReportError::Io {
        path: PathBuf::from("<csv>"),
        source,
    })?;
    Ok(())
}

/// JSON array of row objects keyed like the CSV header.
pub fn write_json<W: Write>(
    report: &VerificationReport,
    mut out: W,
) -> std::result::Result<(), ReportError> {
    let names = header(report.config.check);
    let rows: Vec<serde_json::Map<String, serde_json::Value>> = report
        .rows
        .iter()
        .map(|row| {
            let mut m = serde_json::Map::new();
            m.insert(names[0].into(), row.sample_index.into());
            m.insert(names[1].into(), row.seed.into());
            m.insert(names[2].into(), row.residual.into());
            for (name, v) in names[3..].iter().zip(&row.values) {
                m.insert((*name).into(), (*v).into());
            }
            m.insert("violation".into(), row.violation.into());
            m
        })
        .collect();
    serde_json::to_writer_pretty(&mut out, &rows)?;
    writeln!(out).map_err(|source| ReportError::Io {
        path: PathBuf::from("<json>"),
        source,
    })?;
    Ok(())
}

/// Writes every retained counterexample to `dir/sample_<k>.json` and records
/// the paths in the summary.
pub fn dump_counterexamples(
    report: &mut VerificationReport,
    dir: &Path,
) -> std::result::Result<Vec<PathBuf>, ReportError> {
    let mut paths = vec![];
    for row in &report.rows {
        if let Some(file) = &row.counterexample {
            if paths.is_empty() {
                std::fs::create_dir_all(dir).map_err(|source| ReportError::Io {
                    path: dir.into(),
                    source,
                })?;
            }
            let path = dir.join(format!("sample_{}.json", row.sample_index));
            file.save(&path)?;
            paths.push(path);
        }
    }
    report.summary.counterexamples = paths.clone();
    Ok(paths)
}

pub fn summary_json(report: &VerificationReport) -> String {
    serde_json::to_string_pretty(&report.summary).expect("summary always serializes")
}
