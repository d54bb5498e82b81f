//! Monte Carlo verification harness.
//!
//! Measures estimator risks over seeded replications and checks them against
//! the analytic quantities they are supposed to track: the bias/variance
//! decomposition of the projection estimator, the oracle behavior of the
//! penalized selection, the long-run rate in the horizon, the discrete
//! approximation asymptotics, and the regularized origin estimator.
//!
//! Every experiment is driven by an [`ExperimentConfig`] whose master seed
//! fixes all replication streams; replications run in parallel but reduce in
//! replication order, so outputs are bit-identical across runs and thread
//! counts.

use crate::discrete::{poisson_integral_approx, IntegrandSpec};
use crate::error::{Error, Result};
use crate::projection::{
    l2_distance_sq, orthogonal_projection, variance_components, DensitySpec, LinearModel,
    ReferenceMeasure,
};
use crate::quad::integrate;
use crate::rng::RngStream;
use crate::selection::{select_sizes, ModelCollection, PenaltyForm};
use crate::sim::{
    jumps_to_increments, simulate_gamma_jumps, simulate_gamma_skeleton, simulate_vg_difference,
    simulate_vg_timechange, vg_to_gamma_pair, GammaParams, Jump, JumpSet, VgParams,
};
use rand::Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Ground-truth process driving a Monte Carlo experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum ProcessSpec {
    Gamma(GammaParams),
    VarianceGamma(VgParams),
    /// Compound Poisson with a piecewise-constant Levy density (finite
    /// activity). Serves as a truth that is exactly representable in a
    /// histogram model.
    Histogram { cutpoints: Vec<f64>, values: Vec<f64> },
}

impl ProcessSpec {
    /// Lebesgue Levy density of the process.
    pub fn levy_density(&self, x: f64) -> f64 {
        match self {
            ProcessSpec::Gamma(p) => p.levy_density(x),
            ProcessSpec::VarianceGamma(p) => p.levy_density(x),
            ProcessSpec::Histogram { cutpoints, values } => {
                if x < cutpoints[0] || x > *cutpoints.last().unwrap() {
                    return 0.0;
                }
                let i = cutpoints.partition_point(|&c| c <= x).min(values.len()) - 1;
                values[i.min(values.len() - 1)]
            }
        }
    }
}

/// Which measure the experiment estimates under (serializable subset of
/// [`ReferenceMeasure`]).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MeasureKind {
    Lebesgue,
    InverseSquare,
}

impl MeasureKind {
    pub fn to_measure(self) -> ReferenceMeasure {
        match self {
            MeasureKind::Lebesgue => ReferenceMeasure::Lebesgue,
            MeasureKind::InverseSquare => ReferenceMeasure::InverseSquare,
        }
    }
}

/// Family of candidate models.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum CollectionSpec {
    /// Regular histograms of dimension `1..=m_max`.
    Regular { m_max: usize },
    /// Regularized histograms on regular cutpoints of `[0, b]`, dimensions
    /// `1..=m_max`; forces the inverse-square measure.
    Regularized { m_max: usize },
}

/// Data route: exact jumps or a discrete skeleton.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub enum SimMode {
    Jumps { n_terms: usize },
    Skeleton { n_steps: usize },
}

/// Full description of one Monte Carlo experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub process: ProcessSpec,
    pub window: (f64, f64),
    pub measure: MeasureKind,
    pub collection: CollectionSpec,
    pub penalty: PenaltyForm,
    pub horizon: f64,
    pub replications: usize,
    pub sim: SimMode,
    pub master_seed: u64,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replications < 2 {
            return Err(Error::invalid("need at least 2 replications for standard errors"));
        }
        if !(self.horizon > 0.0) {
            return Err(Error::invalid("horizon must be positive"));
        }
        self.penalty.validate()
    }

    /// Truth density relative to the configured measure (`s = d nu / d eta`).
    pub fn truth(&self) -> DensitySpec {
        let process = self.process.clone();
        match self.measure {
            MeasureKind::Lebesgue => {
                let spec = DensitySpec::from_fn(move |x| process.levy_density(x));
                match &self.process {
                    ProcessSpec::Histogram { cutpoints, values } => {
                        let (c, v) = (cutpoints.clone(), values.clone());
                        spec.with_eta_mass_antiderivative(move |x| piecewise_cumulative(&c, &v, x))
                    }
                    _ => spec,
                }
            }
            MeasureKind::InverseSquare => {
                DensitySpec::from_fn(move |x| x * x * process.levy_density(x))
            }
        }
    }

    pub fn build_collection(&self) -> Result<ModelCollection> {
        match self.collection {
            CollectionSpec::Regular { m_max } => ModelCollection::regular_histograms(
                self.window,
                self.measure.to_measure(),
                m_max,
            ),
            CollectionSpec::Regularized { m_max } => {
                if self.measure != MeasureKind::InverseSquare || self.window.0 != 0.0 {
                    return Err(Error::invalid(
                        "the regularized family requires the inverse-square measure on a [0, b] window",
                    ));
                }
                ModelCollection::regularized_histograms(self.window.1, m_max)
            }
        }
    }

    /// Sizes observed in replication `r`: jump sizes or skeleton increments.
    pub fn simulate_sizes(&self, r: u64) -> Result<Vec<f64>> {
        let stream = RngStream::new(self.master_seed, r);
        match (&self.process, self.sim) {
            (ProcessSpec::Gamma(p), SimMode::Jumps { n_terms }) => Ok(
                simulate_gamma_jumps(p, self.horizon, n_terms, stream)?
                    .jumps
                    .iter()
                    .map(|j| j.size)
                    .collect(),
            ),
            (ProcessSpec::Gamma(p), SimMode::Skeleton { n_steps }) => {
                Ok(simulate_gamma_skeleton(p, self.horizon, n_steps, stream)?.increments)
            }
            (ProcessSpec::VarianceGamma(p), SimMode::Jumps { n_terms }) => Ok(
                simulate_vg_difference(p, self.horizon, n_terms, stream)?
                    .jumps
                    .iter()
                    .map(|j| j.size)
                    .collect(),
            ),
            (ProcessSpec::VarianceGamma(p), SimMode::Skeleton { n_steps }) => {
                Ok(simulate_vg_timechange(p, self.horizon, n_steps, stream)?.increments)
            }
            (ProcessSpec::Histogram { cutpoints, values }, SimMode::Jumps { .. }) => Ok(
                simulate_histogram_jumps(cutpoints, values, self.horizon, stream)?
                    .jumps
                    .iter()
                    .map(|j| j.size)
                    .collect(),
            ),
            (ProcessSpec::Histogram { cutpoints, values }, SimMode::Skeleton { n_steps }) => {
                let jumps = simulate_histogram_jumps(cutpoints, values, self.horizon, stream)?;
                Ok(jumps_to_increments(&jumps, n_steps)?.increments)
            }
        }
    }
}

fn piecewise_cumulative(cutpoints: &[f64], values: &[f64], x: f64) -> f64 {
    let mut acc = 0.0;
    for (i, w) in cutpoints.windows(2).enumerate() {
        if x <= w[0] {
            break;
        }
        acc += values[i] * (x.min(w[1]) - w[0]);
    }
    acc
}

/// Compound Poisson sample from a piecewise-constant Levy density.
pub fn simulate_histogram_jumps(
    cutpoints: &[f64],
    values: &[f64],
    horizon: f64,
    stream: RngStream,
) -> Result<JumpSet> {
    if cutpoints.len() != values.len() + 1 || values.iter().any(|&v| v < 0.0) {
        return Err(Error::invalid("histogram process needs n+1 cutpoints and nonnegative values"));
    }
    let masses: Vec<f64> = cutpoints
        .windows(2)
        .zip(values)
        .map(|(w, v)| v * (w[1] - w[0]))
        .collect();
    let total: f64 = masses.iter().sum();
    let mut rng = stream.rng();
    let n = if total > 0.0 {
        Poisson::new(total * horizon)
            .map_err(|e| Error::invalid(format!("poisson rate: {e}")))?
            .sample(&mut rng) as usize
    } else {
        0
    };
    let mut jumps = Vec::with_capacity(n);
    for _ in 0..n {
        let mut u: f64 = rng.gen::<f64>() * total;
        let mut bin = 0;
        while bin + 1 < masses.len() && u > masses[bin] {
            u -= masses[bin];
            bin += 1;
        }
        let (lo, hi) = (cutpoints[bin], cutpoints[bin + 1]);
        let mut size = lo + rng.gen::<f64>() * (hi - lo);
        while size == 0.0 {
            size = lo + rng.gen::<f64>() * (hi - lo);
        }
        let time = rng.gen::<f64>() * horizon;
        jumps.push(Jump { time, size });
    }
    JumpSet::new(horizon, jumps)
}

/// Per-model Monte Carlo risk summary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelRisk {
    pub dim: usize,
    /// `||s - s_perp||^2` by quadrature.
    pub bias_sq: f64,
    /// `(1/T) sum_i int phi_i^2 s deta`.
    pub var_analytic: f64,
    /// MC mean of `chi^2 = sum_i (betahat_i - beta_i)^2`.
    pub var_mc: f64,
    /// MC mean of the quadrature risk `||s - shat||^2`.
    pub risk_mc: f64,
    pub risk_se: f64,
}

/// Monte Carlo risk table for a model family plus the penalized selector.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RiskTable {
    pub models: Vec<ModelRisk>,
    pub ppe_risk_mc: f64,
    pub ppe_risk_se: f64,
    pub replications: usize,
    pub failed_replications: usize,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum RiskScope {
    Full,
    PpeOnly,
}

fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

struct RepOutcome {
    per_model: Vec<(f64, f64)>, // (chi_sq, quadrature risk)
    ppe_risk: f64,
}

fn mc_risk_scoped(config: &ExperimentConfig, scope: RiskScope) -> Result<RiskTable> {
    config.validate()?;
    let truth = config.truth();
    let collection = config.build_collection()?;
    let models: Vec<&LinearModel> = collection.models().iter().map(|m| m.as_ref()).collect();

    // replication-independent per-model quantities
    let mut proj = Vec::with_capacity(models.len());
    let mut bias_sq = Vec::with_capacity(models.len());
    let mut var_analytic = Vec::with_capacity(models.len());
    for m in &models {
        let beta = orthogonal_projection(&truth, m)?;
        bias_sq.push(l2_distance_sq(&beta, &truth, m)?);
        var_analytic.push(variance_components(&truth, m)?.iter().sum::<f64>() / config.horizon);
        proj.push(beta);
    }

    let outcomes: Vec<Result<RepOutcome>> = (0..config.replications as u64)
        .into_par_iter()
        .map(|r| -> Result<RepOutcome> {
            let sizes = config.simulate_sizes(r)?;
            let mut per_model = Vec::new();
            if scope == RiskScope::Full {
                per_model.reserve(models.len());
                for (k, m) in models.iter().enumerate() {
                    let beta_hat =
                        crate::projection::project_sizes(sizes.iter(), config.horizon, m);
                    let chi_sq: f64 = beta_hat
                        .iter()
                        .zip(&proj[k])
                        .map(|(bh, b)| (bh - b) * (bh - b))
                        .sum();
                    let risk = l2_distance_sq(&beta_hat, &truth, m)?;
                    let tol = 1e-8f64.max(4e-10 * m.dim() as f64);
                    if (risk - bias_sq[k] - chi_sq).abs() > tol {
                        return Err(Error::NumericFailure(format!(
                            "risk decomposition violated for dim {}: {} vs {} + {}",
                            m.dim(),
                            risk,
                            bias_sq[k],
                            chi_sq
                        )));
                    }
                    per_model.push((chi_sq, risk));
                }
            }
            let selection = select_sizes(&sizes, config.horizon, &collection, &config.penalty)?;
            let chosen = selection.chosen_index;
            let ppe_risk =
                l2_distance_sq(&selection.estimate.coefficients, &truth, &models[chosen])?;
            Ok(RepOutcome { per_model, ppe_risk })
        })
        .collect();

    let mut ok = Vec::with_capacity(outcomes.len());
    let mut failed = 0usize;
    for o in outcomes {
        match o {
            Ok(v) => ok.push(v),
            Err(_) => failed += 1,
        }
    }
    if ok.len() < 2 {
        return Err(Error::NumericFailure(format!(
            "too many failed replications: {failed} of {}",
            config.replications
        )));
    }

    let mut rows = Vec::with_capacity(models.len());
    if scope == RiskScope::Full {
        for (k, m) in models.iter().enumerate() {
            let chis: Vec<f64> = ok.iter().map(|o| o.per_model[k].0).collect();
            let risks: Vec<f64> = ok.iter().map(|o| o.per_model[k].1).collect();
            let (var_mc, _) = mean_se(&chis);
            let (risk_mc, risk_se) = mean_se(&risks);
            rows.push(ModelRisk {
                dim: m.dim(),
                bias_sq: bias_sq[k],
                var_analytic: var_analytic[k],
                var_mc,
                risk_mc,
                risk_se,
            });
        }
    }
    let ppe: Vec<f64> = ok.iter().map(|o| o.ppe_risk).collect();
    let (ppe_risk_mc, ppe_risk_se) = mean_se(&ppe);
    Ok(RiskTable {
        models: rows,
        ppe_risk_mc,
        ppe_risk_se,
        replications: ok.len(),
        failed_replications: failed,
    })
}

/// Monte Carlo risks for every model in the family and for the penalized
/// projection estimator; asserts the Pythagorean risk decomposition on every
/// replication.
pub fn mc_risk(config: &ExperimentConfig) -> Result<RiskTable> {
    mc_risk_scoped(config, RiskScope::Full)
}

/// One row of the rate experiment.
#[derive(Debug, Clone, Serialize)]
pub struct RatePoint {
    pub horizon: f64,
    pub risk_mc: f64,
    pub risk_se: f64,
}

/// Log-log slope report for the PPE risk against the horizon.
#[derive(Debug, Clone, Serialize)]
pub struct RateReport {
    pub points: Vec<RatePoint>,
    pub slope: f64,
    pub slope_se: f64,
    pub intercept: f64,
}

/// Ordinary least squares of `y` on `x`: returns (slope, intercept, slope SE).
pub fn ols_line(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    let n = xs.len();
    if n < 3 || n != ys.len() {
        return Err(Error::invalid("OLS needs at least 3 paired points"));
    }
    let nf = n as f64;
    let xm = xs.iter().sum::<f64>() / nf;
    let ym = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - xm) * (x - xm)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateGrid("zero x-variance".to_string()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let rss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - intercept - slope * x;
            r * r
        })
        .sum();
    let se = (rss / (nf - 2.0) / sxx).sqrt();
    Ok((slope, intercept, se))
}

/// Run the PPE risk at each horizon of a geometric grid, scaling the model
/// family (`m_max = floor(T (b-a))`) and the simulation effort with `T`,
/// and fit the log-log slope.
pub fn rate_experiment(config: &ExperimentConfig, t_grid: &[f64]) -> Result<RateReport> {
    if t_grid.len() < 4 {
        return Err(Error::invalid("rate experiment needs at least 4 horizons"));
    }
    if !t_grid.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::invalid("horizons must be increasing"));
    }
    let r0 = t_grid[1] / t_grid[0];
    if !t_grid.windows(2).all(|w| (w[1] / w[0] / r0 - 1.0).abs() < 1e-6) {
        return Err(Error::invalid("horizon grid must be geometric"));
    }

    let (a, b) = config.window;
    let mut points = Vec::with_capacity(t_grid.len());
    for (k, &t) in t_grid.iter().enumerate() {
        let scale = t / config.horizon;
        let mut c = config.clone();
        c.horizon = t;
        c.collection = match config.collection {
            CollectionSpec::Regular { .. } => {
                CollectionSpec::Regular { m_max: ((t * (b - a)).floor() as usize).max(1) }
            }
            CollectionSpec::Regularized { .. } => {
                CollectionSpec::Regularized { m_max: ((t * b).floor() as usize).max(1) }
            }
        };
        c.sim = match config.sim {
            SimMode::Jumps { n_terms } => {
                SimMode::Jumps { n_terms: ((n_terms as f64 * scale).ceil() as usize).max(1) }
            }
            SimMode::Skeleton { n_steps } => {
                SimMode::Skeleton { n_steps: ((n_steps as f64 * scale).ceil() as usize).max(1) }
            }
        };
        // disjoint replication streams across horizons
        c.master_seed = config.master_seed.wrapping_add(k as u64);
        let table = mc_risk_scoped(&c, RiskScope::PpeOnly)?;
        points.push(RatePoint { horizon: t, risk_mc: table.ppe_risk_mc, risk_se: table.ppe_risk_se });
    }

    let xs: Vec<f64> = points.iter().map(|p| p.horizon.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.risk_mc.ln()).collect();
    let (slope, intercept, slope_se) = ols_line(&xs, &ys)?;
    Ok(RateReport { points, slope, slope_se, intercept })
}

/// One row of the discrete-approximation sweep.
#[derive(Debug, Clone, Serialize)]
pub struct BiasRow {
    pub n: usize,
    pub mc_mean: f64,
    pub target_mean: f64,
    pub mc_var: f64,
    pub target_var: f64,
}

/// Monte Carlo mean and variance of `I_n(f)` across a grid of sampling
/// resolutions, with the quadrature targets `T int f dnu` and
/// `T int f^2 dnu`.
pub fn approx_bias_sweep(
    process: &ProcessSpec,
    f: &IntegrandSpec,
    horizon: f64,
    n_grid: &[usize],
    replications: usize,
    master_seed: u64,
) -> Result<Vec<BiasRow>> {
    if !n_grid.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::invalid("n grid must be increasing"));
    }
    let (lo, hi) = f.support;
    let lo = lo.max(1e-12);
    let target_mean = horizon * integrate(|x| f.eval(x) * process.levy_density(x), lo, hi, 1e-10)?;
    let target_var = horizon
        * integrate(
            |x| {
                let v = f.eval(x);
                v * v * process.levy_density(x)
            },
            lo,
            hi,
            1e-10,
        )?;

    let mut rows = Vec::with_capacity(n_grid.len());
    for (which, &n) in n_grid.iter().enumerate() {
        let vals: Vec<f64> = (0..replications as u64)
            .into_par_iter()
            .map(|r| -> Result<f64> {
                let stream = RngStream::new(master_seed, (which as u64) << 32 | r);
                let series = match process {
                    ProcessSpec::Gamma(p) => simulate_gamma_skeleton(p, horizon, n, stream)?,
                    ProcessSpec::VarianceGamma(p) => simulate_vg_timechange(p, horizon, n, stream)?,
                    ProcessSpec::Histogram { cutpoints, values } => jumps_to_increments(
                        &simulate_histogram_jumps(cutpoints, values, horizon, stream)?,
                        n,
                    )?,
                };
                Ok(poisson_integral_approx(&series, f))
            })
            .collect::<Result<Vec<f64>>>()?;
        let (mc_mean, _) = mean_se(&vals);
        let mean = mc_mean;
        let mc_var =
            vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (vals.len() as f64 - 1.0);
        rows.push(BiasRow { n, mc_mean, target_mean, mc_var, target_var });
    }
    Ok(rows)
}

/// One row of the regularized-origin check.
#[derive(Debug, Clone, Serialize)]
pub struct AlphaRow {
    pub x1: f64,
    pub mc_mean: f64,
    pub mc_var: f64,
    /// The limiting variance `alpha / (2T)`.
    pub var_limit: f64,
}

/// Sampling behavior of the origin estimator
/// `alphahat = (1/(T x1)) sum_{0 < jump < x1} jump` across a grid of first
/// cutpoints. Uses the jump series; `n_terms` must reach well below the
/// smallest `x1`.
pub fn regularized_alpha_check(
    params: &GammaParams,
    horizon: f64,
    x1_grid: &[f64],
    replications: usize,
    n_terms: usize,
    master_seed: u64,
) -> Result<Vec<AlphaRow>> {
    if x1_grid.is_empty() || x1_grid.iter().any(|&x| !(x > 0.0 && x < params.beta)) {
        return Err(Error::invalid("x1 grid must lie in (0, beta)"));
    }
    let estimates: Vec<Vec<f64>> = (0..replications as u64)
        .into_par_iter()
        .map(|r| -> Result<Vec<f64>> {
            let jumps =
                simulate_gamma_jumps(params, horizon, n_terms, RngStream::new(master_seed, r))?;
            Ok(x1_grid
                .iter()
                .map(|&x1| {
                    jumps
                        .jumps
                        .iter()
                        .filter(|j| j.size > 0.0 && j.size < x1)
                        .map(|j| j.size)
                        .sum::<f64>()
                        / (horizon * x1)
                })
                .collect())
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(x1_grid
        .iter()
        .enumerate()
        .map(|(k, &x1)| {
            let vals: Vec<f64> = estimates.iter().map(|e| e[k]).collect();
            let (mc_mean, _) = mean_se(&vals);
            let mc_var = vals.iter().map(|v| (v - mc_mean) * (v - mc_mean)).sum::<f64>()
                / (vals.len() as f64 - 1.0);
            AlphaRow { x1, mc_mean, mc_var, var_limit: params.alpha / (2.0 * horizon) }
        })
        .collect())
}

/// Convenience: MC mean and SE of the per-replication estimator coefficients
/// against the orthogonal projection (used by the unbiasedness checks).
pub fn coefficient_unbiasedness(
    config: &ExperimentConfig,
    model: &LinearModel,
) -> Result<Vec<(f64, f64, f64)>> {
    config.validate()?;
    let truth = config.truth();
    let targets = orthogonal_projection(&truth, model)?;
    let coeffs: Vec<Vec<f64>> = (0..config.replications as u64)
        .into_par_iter()
        .map(|r| -> Result<Vec<f64>> {
            let sizes = config.simulate_sizes(r)?;
            Ok(crate::projection::project_sizes(sizes.iter(), config.horizon, model))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((0..model.dim())
        .map(|i| {
            let vals: Vec<f64> = coeffs.iter().map(|c| c[i]).collect();
            let (mean, se) = mean_se(&vals);
            (mean, se, targets[i])
        })
        .collect())
}

/// The default benchmark: Gamma(1, 1) jumps on `[0, 365]`, window
/// `[0.1, 1]`, regular histograms up to `floor(T (b-a))`, penalty `B` with
/// `c = 2`.
pub fn benchmark_config(master_seed: u64, replications: usize) -> ExperimentConfig {
    ExperimentConfig {
        process: ProcessSpec::Gamma(GammaParams { alpha: 1.0, beta: 1.0 }),
        window: (0.1, 1.0),
        measure: MeasureKind::Lebesgue,
        collection: CollectionSpec::Regular { m_max: 328 },
        penalty: PenaltyForm::B { c: 2.0 },
        horizon: 365.0,
        replications,
        sim: SimMode::Jumps { n_terms: 2000 },
        master_seed,
    }
}

/// Variance Gamma helper reused by the harness: Lebesgue density restricted
/// to one tail for tail-window experiments.
pub fn vg_tail_density(params: &VgParams, positive: bool) -> DensitySpec {
    let (alpha, bp, bm) = vg_to_gamma_pair(params);
    if positive {
        DensitySpec::from_fn(move |x| if x > 0.0 { alpha / x * (-x / bp).exp() } else { 0.0 })
    } else {
        DensitySpec::from_fn(move |x| if x < 0.0 { alpha / (-x) * (x / bm).exp() } else { 0.0 })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projection::BasisKind;

    fn piecewise_config(replications: usize) -> ExperimentConfig {
        ExperimentConfig {
            process: ProcessSpec::Histogram {
                cutpoints: vec![0.1, 0.4, 0.7, 1.0],
                values: vec![2.0, 5.0, 1.0],
            },
            window: (0.1, 1.0),
            measure: MeasureKind::Lebesgue,
            collection: CollectionSpec::Regular { m_max: 6 },
            penalty: PenaltyForm::B { c: 2.0 },
            horizon: 80.0,
            replications,
            sim: SimMode::Jumps { n_terms: 0 },
            master_seed: 424242,
        }
    }

    #[test]
    fn representable_truth_has_zero_bias_and_variance_matching_risk() {
        // the 3-bin truth lives inside the m = 3 and m = 6 models
        let cfg = piecewise_config(400);
        let table = mc_risk(&cfg).unwrap();
        assert_eq!(table.failed_replications, 0);
        for row in &table.models {
            if row.dim == 3 || row.dim == 6 {
                assert!(row.bias_sq < 1e-10, "dim {} bias {}", row.dim, row.bias_sq);
                let rel = (row.risk_mc - row.var_analytic).abs() / row.var_analytic;
                assert!(rel < 0.2, "dim {}: risk {} vs var {}", row.dim, row.risk_mc, row.var_analytic);
                let relv = (row.var_mc - row.var_analytic).abs() / row.var_analytic;
                assert!(relv < 0.2, "dim {}: var_mc {} vs var {}", row.dim, row.var_mc, row.var_analytic);
            }
        }
    }

    #[test]
    fn risk_respects_the_bias_lower_bound() {
        let cfg = piecewise_config(120);
        let table = mc_risk(&cfg).unwrap();
        for row in &table.models {
            assert!(row.risk_mc >= row.bias_sq - 3.0 * row.risk_se, "dim {}", row.dim);
        }
    }

    #[test]
    fn risk_table_is_bit_reproducible() {
        let cfg = piecewise_config(60);
        let a = mc_risk(&cfg).unwrap();
        let b = mc_risk(&cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn vhat_is_unbiased_for_its_integral() {
        // MC mean of Vhat matches int sum phi_i^2 s deta within 3 SE
        let cfg = piecewise_config(300);
        let truth = cfg.truth();
        let model = crate::projection::build_model(
            cfg.window,
            ReferenceMeasure::Lebesgue,
            BasisKind::RegularHistogram(4),
        )
        .unwrap();
        let target: f64 = variance_components(&truth, &model).unwrap().iter().sum();
        let vals: Vec<f64> = (0..cfg.replications as u64)
            .map(|r| {
                let sizes = cfg.simulate_sizes(r).unwrap();
                crate::projection::vhat_sizes(sizes.iter(), cfg.horizon, &model) // == Vhat
            })
            .collect();
        let (mean, se) = mean_se(&vals);
        assert!((mean - target).abs() <= 3.0 * se, "mean {mean} target {target} se {se}");
    }

    #[test]
    fn ols_shift_moves_intercept_not_slope() {
        let xs: Vec<f64> = (0..6).map(|k| (100.0 * 2f64.powi(k)).ln()).collect();
        let ys: Vec<f64> = xs.iter().map(|x| -0.8 * x + 0.3).collect();
        let (s, i, _) = ols_line(&xs, &ys).unwrap();
        let shifted: Vec<f64> = ys.iter().map(|y| y + 2f64.sqrt().ln()).collect();
        let (s2, i2, _) = ols_line(&xs, &shifted).unwrap();
        assert!((s - s2).abs() < 1e-12);
        assert!((i2 - i - 2f64.sqrt().ln()).abs() < 1e-12);
        assert!((s + 0.8).abs() < 1e-12);
    }

    #[test]
    fn rate_slope_is_minus_one_for_representable_truth() {
        // truth constant on the window: the bias is zero in every model, so
        // the PPE risk is pure variance and scales like 1/T
        let cfg = ExperimentConfig {
            process: ProcessSpec::Histogram { cutpoints: vec![0.1, 1.0], values: vec![3.0] },
            window: (0.1, 1.0),
            measure: MeasureKind::Lebesgue,
            collection: CollectionSpec::Regular { m_max: 1 },
            penalty: PenaltyForm::B { c: 2.0 },
            horizon: 50.0,
            replications: 250,
            sim: SimMode::Jumps { n_terms: 0 },
            master_seed: 777,
        };
        let report = rate_experiment(&cfg, &[50.0, 100.0, 200.0, 400.0]).unwrap();
        assert!(
            report.slope > -1.2 && report.slope < -0.8,
            "slope {} (se {})",
            report.slope,
            report.slope_se
        );
    }

    #[test]
    fn rate_grid_validation() {
        let cfg = piecewise_config(10);
        assert!(rate_experiment(&cfg, &[1.0, 2.0, 4.0]).is_err());
        assert!(rate_experiment(&cfg, &[1.0, 2.0, 4.0, 7.0]).is_err());
    }

    #[test]
    fn bias_sweep_zero_integrand_is_all_zeros() {
        let f = IntegrandSpec::new(|_| 0.0, (0.5, 1.0), crate::discrete::Admissibility::SupportedAwayFromOrigin);
        let rows = approx_bias_sweep(
            &ProcessSpec::Gamma(GammaParams { alpha: 1.0, beta: 1.0 }),
            &f,
            10.0,
            &[8, 16],
            20,
            5,
        )
        .unwrap();
        for row in rows {
            assert_eq!(row.mc_mean, 0.0);
            assert_eq!(row.target_mean, 0.0);
            assert_eq!(row.mc_var, 0.0);
        }
    }

    #[test]
    fn alpha_check_scales_linearly_in_activity() {
        let horizon = 200.0;
        let x1 = 0.02;
        let mut means = Vec::new();
        for &alpha in &[1.0f64, 2.0] {
            let params = GammaParams::new(alpha, 1.0).unwrap();
            let rows =
                regularized_alpha_check(&params, horizon, &[x1], 250, 4000, 31).unwrap();
            means.push((rows[0].mc_mean, rows[0].mc_var));
        }
        let se = ((means[0].1 + means[1].1) / 250.0).sqrt();
        assert!((means[1].0 - 2.0 * means[0].0).abs() <= 4.0 * se.max(2.0 * (means[0].1 / 250.0).sqrt()));
    }
}
