//! Partial correlations (exact and sample), regression coefficients, and
//! the sample-complexity recovery experiment for data-driven sparse
//! decompositions.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::lattice::{sparse_decomposition, Decomposition};
use crate::oracles::{CovarianceSpec, SampleMatrix};
use crate::varset::VarSet;
use crate::{COND_LIMIT, DEFAULT_TOL_CI};

/// Where a partial correlation came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CorrelationSource {
    Exact,
    Sample,
}

/// A partial correlation `rho(i,j|S)`, clamped to `[-1, 1]`.
#[derive(Debug, Clone, serde::Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PartialCorrelation {
    pub value: f64,
    pub i: usize,
    pub j: usize,
    pub s: VarSet,
    pub source: CorrelationSource,
    pub n: Option<usize>,
}

fn clamp_rho(x: f64) -> f64 {
    x.clamp(-1.0, 1.0)
}

/// Population partial correlation via the conditional covariance
/// (Schur complement): `Omega = Sigma_{ij,ij} - Sigma_{ij,S}
/// Sigma_{S,S}^{-1} Sigma_{S,ij}` and `rho = Omega_12 /
/// sqrt(Omega_11 Omega_22)`.
pub fn partial_correlation(
    spec: &CovarianceSpec,
    i: usize,
    j: usize,
    s: VarSet,
) -> Result<PartialCorrelation> {
    spec.ground().check_node(i)?;
    spec.ground().check_node(j)?;
    spec.ground().check_set(s)?;
    if i == j || s.contains(i) || s.contains(j) {
        return Err(Error::InvalidArgument(format!(
            "partial correlation needs distinct i={i}, j={j} outside S={s:?}"
        )));
    }
    let pair = VarSet::singleton(i).union(VarSet::singleton(j));
    let omega = spec.conditional_cross_covariance(pair, pair, s)?;
    // rows/cols of `omega` are ordered by ascending node index
    let (pi, pj) = if i < j { (0, 1) } else { (1, 0) };
    let (vii, vjj, vij) = (omega[(pi, pi)], omega[(pj, pj)], omega[(pi, pj)]);
    if vii <= 0.0 || vjj <= 0.0 {
        return Err(Error::NumericDegeneracy(format!(
            "non-positive conditional variance for rho({i},{j}|{s:?})"
        )));
    }
    Ok(PartialCorrelation {
        value: clamp_rho(vij / (vii * vjj).sqrt()),
        i,
        j,
        s,
        source: CorrelationSource::Exact,
        n: None,
    })
}

/// Sample partial correlation: the correlation between the least-squares
/// residuals of columns `i` and `j` regressed on columns `S`. Columns
/// are centered, so no intercept is fitted.
pub fn sample_partial_correlation(
    data: &SampleMatrix,
    i: usize,
    j: usize,
    s: VarSet,
) -> Result<PartialCorrelation> {
    data.ground().check_node(i)?;
    data.ground().check_node(j)?;
    data.ground().check_set(s)?;
    if i == j || s.contains(i) || s.contains(j) {
        return Err(Error::InvalidArgument(format!(
            "partial correlation needs distinct i={i}, j={j} outside S={s:?}"
        )));
    }
    let n = data.n();
    if n < s.len() + 3 {
        return Err(Error::InsufficientSamples(format!(
            "n = {n} observations cannot condition on {} variables (need n >= |S| + 3)",
            s.len()
        )));
    }
    let (rii, rij, rjj) = data.residual_products(i, j, s)?;
    let scale = data.centered().column(i).norm_squared().max(data.centered().column(j).norm_squared());
    if rii <= 1e-12 * scale.max(1e-300) || rjj <= 1e-12 * scale.max(1e-300) {
        return Err(Error::NumericDegeneracy(format!(
            "zero residual variance for rho({i},{j}|{s:?})"
        )));
    }
    Ok(PartialCorrelation {
        value: clamp_rho(rij / (rii * rjj).sqrt()),
        i,
        j,
        s,
        source: CorrelationSource::Sample,
        n: Some(n),
    })
}

/// Regression coefficients `beta_j(S) = Sigma_{S,S}^{-1} Sigma_{S,j}`,
/// indexed by `S` in ascending node order. Solves the linear system
/// rather than forming an inverse.
pub fn regression_coefficients(spec: &CovarianceSpec, j: usize, s: VarSet) -> Result<Vec<f64>> {
    spec.ground().check_node(j)?;
    spec.ground().check_set(s)?;
    if s.contains(j) {
        return Err(Error::InvalidArgument(format!("node {j} may not appear in S")));
    }
    if s.is_empty() {
        return Ok(Vec::new());
    }
    let idx: Vec<usize> = s.to_vec();
    let sigma = spec.covariance();
    let sss = DMatrix::from_fn(idx.len(), idx.len(), |a, b| sigma[(idx[a], idx[b])]);
    let eig = sss.clone().symmetric_eigen();
    let lmax = eig.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lmin = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if lmin <= 0.0 || lmax / lmin > COND_LIMIT {
        return Err(Error::NumericDegeneracy(format!(
            "regressor covariance is ill-conditioned (cond {:.3e})",
            if lmin <= 0.0 { f64::INFINITY } else { lmax / lmin }
        )));
    }
    let chol = sss
        .cholesky()
        .ok_or_else(|| Error::NumericDegeneracy("regressor covariance not PD".into()))?;
    let rhs = DMatrix::from_fn(idx.len(), 1, |a, _| sigma[(idx[a], j)]);
    let beta = chol.solve(&rhs);
    Ok(beta.column(0).iter().copied().collect())
}

/// The support of `beta_j(S)` at the CI tolerance: entries with
/// `|beta| > tol` mapped back to node indices.
pub fn regression_support(spec: &CovarianceSpec, j: usize, s: VarSet, tol: f64) -> Result<VarSet> {
    let beta = regression_coefficients(spec, j, s)?;
    Ok(s.iter()
        .zip(beta)
        .filter(|(_, b)| b.abs() > tol)
        .map(|(i, _)| i)
        .collect())
}

/// Extremes of the partial-correlation signal over all triples
/// `(i, j, S)` with `|S| <= t`.
#[derive(Debug, Clone, serde::Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SignalStrengths {
    /// Minimum nonzero `|rho|`; `+inf` when every partial correlation
    /// within reach is zero (see `has_nonzero`).
    pub alpha: f64,
    pub has_nonzero: bool,
    /// Maximum `|rho|`.
    pub zeta: f64,
    pub triples_checked: u64,
}

/// Exhaustively computes the signal strengths; "zero" means
/// `|rho| <= DEFAULT_TOL_CI`. Guarded to at most 10^7 triples.
pub fn signal_strengths(spec: &CovarianceSpec, t: usize) -> Result<SignalStrengths> {
    let d = spec.dim();
    if t + 2 > d {
        return Err(Error::InvalidArgument(format!(
            "order t = {t} too large for d = {d} (need t <= d - 2)"
        )));
    }
    let mut count: u64 = 0;
    let pairs = (d * (d - 1) / 2) as u64;
    let mut subsets: u64 = 0;
    let mut binom: u64 = 1;
    for s in 0..=t {
        if s > 0 {
            binom = binom * (d as u64 - 2 - (s as u64 - 1)) / s as u64;
        }
        subsets += binom;
    }
    if pairs.saturating_mul(subsets) > 10_000_000 {
        return Err(Error::TooLarge(format!(
            "{} triples exceed the exhaustive guard; use signal_strengths_sampled",
            pairs * subsets
        )));
    }
    let mut alpha = f64::INFINITY;
    let mut zeta: f64 = 0.0;
    for i in 0..d {
        for j in i + 1..d {
            let rest = spec.ground().all().without(i).without(j);
            for s in rest.subsets_up_to_size(t) {
                let rho = partial_correlation(spec, i, j, s)?.value.abs();
                count += 1;
                zeta = zeta.max(rho);
                if rho > DEFAULT_TOL_CI {
                    alpha = alpha.min(rho);
                }
            }
        }
    }
    Ok(SignalStrengths {
        alpha,
        has_nonzero: alpha.is_finite(),
        zeta,
        triples_checked: count,
    })
}

/// Monte-Carlo estimate of the signal strengths over uniformly random
/// triples, for models too large for the exhaustive sweep.
pub fn signal_strengths_sampled(
    spec: &CovarianceSpec,
    t: usize,
    samples: u64,
    seed: u64,
) -> Result<SignalStrengths> {
    use rand::Rng;
    let d = spec.dim();
    if t + 2 > d {
        return Err(Error::InvalidArgument(format!(
            "order t = {t} too large for d = {d} (need t <= d - 2)"
        )));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut alpha = f64::INFINITY;
    let mut zeta: f64 = 0.0;
    for _ in 0..samples {
        let i = rng.random_range(0..d);
        let j = loop {
            let j = rng.random_range(0..d);
            if j != i {
                break j;
            }
        };
        let rest = spec.ground().all().without(i).without(j).to_vec();
        let size = rng.random_range(0..=t.min(rest.len()));
        let mut s = VarSet::EMPTY;
        while s.len() < size {
            s = s.with(rest[rng.random_range(0..rest.len())]);
        }
        let rho = partial_correlation(spec, i, j, s)?.value.abs();
        zeta = zeta.max(rho);
        if rho > DEFAULT_TOL_CI {
            alpha = alpha.min(rho);
        }
    }
    Ok(SignalStrengths {
        alpha,
        has_nonzero: alpha.is_finite(),
        zeta,
        triples_checked: samples,
    })
}

/// Configuration of the sparse-decomposition recovery experiment.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub spec: CovarianceSpec,
    pub j: usize,
    /// Sparse order `t`.
    pub t: usize,
    /// Sample size per trial.
    pub n: usize,
    /// Threshold for the sample oracle; defaults to `alpha / 2`.
    pub tau: Option<f64>,
    pub trials: usize,
    pub seed: u64,
}

impl ExperimentConfig {
    fn validate(&self) -> Result<()> {
        self.spec.ground().check_node(self.j)?;
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be >= 1".into()));
        }
        if self.n < 3 {
            return Err(Error::InvalidArgument("need n >= 3".into()));
        }
        if self.t > 4 + self.n / 2 {
            return Err(Error::InvalidArgument(format!(
                "order t = {} exceeds 4 + n/2 = {}",
                self.t,
                4 + self.n / 2
            )));
        }
        if let Some(tau) = self.tau {
            if tau <= 0.0 {
                return Err(Error::InvalidArgument("tau must be positive".into()));
            }
        }
        Ok(())
    }
}

/// One trial's outcome.
#[derive(Debug, Clone, serde::Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TrialOutcome {
    pub exact_match: bool,
    pub lattices_found: usize,
    /// Decomposition-inconsistency observed (noisy oracle produced
    /// overlapping lattices); counted as a non-match.
    pub inconsistent: bool,
}

/// Aggregate outcome of [`run_recovery_experiment`].
#[derive(Debug, Clone, serde::Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ExperimentReport {
    pub recovery_rate: f64,
    pub per_trial: Vec<TrialOutcome>,
    pub alpha: f64,
    pub zeta: f64,
    pub tau: f64,
    pub n: usize,
    pub t: usize,
    pub trials: usize,
    /// `n * alpha^2`, to compare against the `log n + t log d` scale.
    pub n_alpha_sq: f64,
    pub log_terms: f64,
    pub population_lattices: usize,
}

/// Draws `n` rows from `N(0, Sigma)`, seeded.
pub fn sample_gaussian(spec: &CovarianceSpec, n: usize, seed: u64) -> DMatrix<f64> {
    let d = spec.dim();
    let chol = spec
        .covariance()
        .clone()
        .cholesky()
        .expect("spec covariance is PD by construction");
    let l = chol.l();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let z = DMatrix::from_fn(n, d, |_, _| -> f64 { StandardNormal.sample(&mut rng) });
    z * l.transpose()
}

/// Runs the recovery experiment: computes the population sparse
/// decomposition from the exact oracle, then for each seeded trial draws
/// a sample, runs the data-driven sparse decomposition with threshold
/// `tau`, and compares the two as sets of `(m, M)` pairs. A trial whose
/// decomposition fails with an inconsistency counts as a non-match; the
/// experiment itself never aborts on such trials.
pub fn run_recovery_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let exact = config.spec.exact_oracle();
    let population = sparse_decomposition(&exact, config.j, config.t)?;
    let target = lattice_set(&population);

    let signals = signal_strengths(&config.spec, config.t.min(config.spec.dim() - 2))?;
    let tau = match config.tau {
        Some(tau) => tau,
        None => {
            if !signals.has_nonzero {
                return Err(Error::InvalidArgument(
                    "cannot default tau = alpha/2: no nonzero partial correlations; supply tau".into(),
                ));
            }
            signals.alpha / 2.0
        }
    };

    let mut per_trial = Vec::with_capacity(config.trials);
    for trial in 0..config.trials {
        let data = sample_gaussian(&config.spec, config.n, config.seed.wrapping_add(trial as u64));
        let matrix = SampleMatrix::new(data)?;
        let oracle = matrix.oracle(tau)?;
        match sparse_decomposition(&oracle, config.j, config.t) {
            Ok(dec) => {
                let found = lattice_set(&dec);
                per_trial.push(TrialOutcome {
                    exact_match: found == target,
                    lattices_found: dec.lattices().len(),
                    inconsistent: false,
                });
            }
            Err(Error::DecompositionInconsistency(..)) | Err(Error::LatticeInconsistency(..)) => {
                per_trial.push(TrialOutcome {
                    exact_match: false,
                    lattices_found: 0,
                    inconsistent: true,
                });
            }
            Err(e) => return Err(e),
        }
    }

    let matches = per_trial.iter().filter(|t| t.exact_match).count();
    let d = config.spec.dim() as f64;
    Ok(ExperimentReport {
        recovery_rate: matches as f64 / config.trials as f64,
        per_trial,
        alpha: signals.alpha,
        zeta: signals.zeta,
        tau,
        n: config.n,
        t: config.t,
        trials: config.trials,
        n_alpha_sq: if signals.has_nonzero {
            config.n as f64 * signals.alpha * signals.alpha
        } else {
            f64::INFINITY
        },
        log_terms: (config.n as f64).ln() + config.t as f64 * d.ln(),
        population_lattices: target.len(),
    })
}

fn lattice_set(dec: &Decomposition) -> std::collections::BTreeSet<(VarSet, VarSet)> {
    dec.lattices()
        .iter()
        .map(|l| (l.minimum(), l.maximum()))
        .collect()
}
