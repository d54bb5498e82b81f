//! Penalized model selection.
//!
//! Given a collection of linear models sharing a window and measure, the
//! penalized projection estimator picks the model minimizing
//! `score(m) = gamma(shat_m) + pen(m)`. By the minimizer property of the
//! contrast, `gamma(shat_m) = -sum_i beta_i^2` identically, and the score is
//! computed through that identity so the decomposition is exact.
//!
//! Three penalty shapes are supported, each implemented at its lower bound:
//!
//! * `A`: `c * D_m * N / T^2 + c' * d_m / T`, `N` the number of jumps in the
//!   window;
//! * `B`: `c * Vhat_m / T`;
//! * `C`: `c * Vhat_m / T + c' * D_m / T + c'' * d_m / T`.
//!
//! Models with `D_m <= T` are admissible. Selection requires a nonempty
//! admissible subset and errors otherwise; [`restrict_admissible`] filters a
//! collection down to `M_T` when the risk guarantees are wanted.

use crate::error::{Error, Result};
use crate::projection::{project_sizes, vhat_sizes, LinearModel, ProjectionEstimate};
use crate::sim::JumpSet;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Penalty structure and its constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PenaltyForm {
    /// `c * D_m * N / T^2 + c' * d_m / T`
    A { c: f64, c1: f64 },
    /// `c * Vhat_m / T`
    B { c: f64 },
    /// `c * Vhat_m / T + c' * D_m / T + c'' * d_m / T`
    C { c: f64, c1: f64, c2: f64 },
}

impl PenaltyForm {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            PenaltyForm::A { c, c1 } => c > 1.0 && c1 > 0.0,
            PenaltyForm::B { c } => c > 1.0,
            PenaltyForm::C { c, c1, c2 } => c > 1.0 && c1 > 0.0 && c2 > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!("penalty constants out of range: {self:?} (need c > 1, others > 0)")))
        }
    }
}

/// Penalty value for one model, computed from the raw ingredients.
pub(crate) fn penalty_from_stats(
    form: &PenaltyForm,
    horizon: f64,
    model: &LinearModel,
    n_in_window: f64,
    vhat: f64,
) -> f64 {
    let t = horizon;
    let d = model.dim() as f64;
    let big_d = model.sup_constant();
    match *form {
        PenaltyForm::A { c, c1 } => c * big_d * n_in_window / (t * t) + c1 * d / t,
        PenaltyForm::B { c } => c * vhat / t,
        PenaltyForm::C { c, c1, c2 } => c * vhat / t + c1 * big_d / t + c2 * d / t,
    }
}

/// Penalty for a model given the observed jumps.
pub fn penalty(form: &PenaltyForm, jumps: &JumpSet, model: &LinearModel) -> Result<f64> {
    form.validate()?;
    if !(jumps.horizon > 0.0) {
        return Err(Error::invalid("horizon must be positive"));
    }
    let n_in_window = jumps
        .jumps
        .iter()
        .filter(|j| model.bin_index(j.size).is_some())
        .count() as f64;
    let v = vhat_sizes(jumps.jumps.iter().map(|j| &j.size), jumps.horizon, model);
    Ok(penalty_from_stats(form, jumps.horizon, model, n_in_window, v))
}

/// An ordered list of candidate models sharing window and measure.
#[derive(Debug, Clone)]
pub struct ModelCollection {
    models: Vec<Arc<LinearModel>>,
}

impl ModelCollection {
    pub fn new(models: Vec<LinearModel>) -> Result<Self> {
        if models.is_empty() {
            return Err(Error::invalid("model collection must be nonempty"));
        }
        let w = models[0].window();
        if models.iter().any(|m| m.window() != w) {
            return Err(Error::invalid("all models in a collection must share the window"));
        }
        Ok(ModelCollection { models: models.into_iter().map(Arc::new).collect() })
    }

    /// Regular histograms of dimension `1..=m_max` (one model per dimension).
    pub fn regular_histograms(
        window: (f64, f64),
        measure: crate::projection::ReferenceMeasure,
        m_max: usize,
    ) -> Result<Self> {
        let models = (1..=m_max)
            .map(|m| {
                crate::projection::build_model(
                    window,
                    measure.clone(),
                    crate::projection::BasisKind::RegularHistogram(m),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(models)
    }

    /// Regularized histograms on regular cutpoints of `[0, b]` with
    /// `1..=m_max` pieces beyond nothing: dimension `m` uses cutpoints
    /// `{0, b/m, ..., b}`.
    pub fn regularized_histograms(b: f64, m_max: usize) -> Result<Self> {
        let models = (1..=m_max)
            .map(|m| {
                let cuts: Vec<f64> = (0..=m)
                    .map(|i| if i == m { b } else { b * i as f64 / m as f64 })
                    .collect();
                crate::projection::build_model(
                    (0.0, b),
                    crate::projection::ReferenceMeasure::InverseSquare,
                    crate::projection::BasisKind::RegularizedHistogram(cuts),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(models)
    }

    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }

    pub fn models(&self) -> &[Arc<LinearModel>] {
        &self.models
    }
}

/// Indices of the admissible models (`D_m <= T`), order preserved.
pub fn admissible(collection: &ModelCollection, horizon: f64) -> Result<Vec<usize>> {
    if !(horizon > 0.0) {
        return Err(Error::invalid("horizon must be positive"));
    }
    let idx: Vec<usize> = collection
        .models
        .iter()
        .enumerate()
        .filter(|(_, m)| m.sup_constant() <= horizon)
        .map(|(i, _)| i)
        .collect();
    if idx.is_empty() {
        let min_d = collection
            .models
            .iter()
            .map(|m| m.sup_constant())
            .fold(f64::INFINITY, f64::min);
        return Err(Error::EmptyAdmissible(format!(
            "no model satisfies D_m <= T = {horizon}; smallest D_m is {min_d}"
        )));
    }
    Ok(idx)
}

/// One row of the per-model selection table.
#[derive(Debug, Clone, Serialize)]
pub struct ModelScore {
    /// Index into the collection.
    pub index: usize,
    pub dim: usize,
    pub sup_constant: f64,
    /// Contrast of the projection estimator, `-sum_i beta_i^2`.
    pub contrast: f64,
    pub penalty: f64,
    pub score: f64,
    pub chosen: bool,
}

/// Outcome of penalized selection over a collection.
#[derive(Debug, Clone)]
pub struct SelectionResult {
    pub chosen_index: usize,
    pub estimate: ProjectionEstimate,
    pub table: Vec<ModelScore>,
    /// Non-fatal caveats (e.g. discrete data on a basis outside the
    /// convergence proposition's scope).
    pub warnings: Vec<String>,
}

/// Shared engine: penalized selection over sizes (jump sizes or increments).
///
/// The admissibility gate `D_m <= T` backs the risk guarantees and must
/// intersect the collection (otherwise this errors), but scoring covers the
/// collection as given; compose with [`admissible`] to restrict to `M_T`.
pub(crate) fn select_sizes(
    sizes: &[f64],
    horizon: f64,
    collection: &ModelCollection,
    form: &PenaltyForm,
) -> Result<SelectionResult> {
    form.validate()?;
    if !(horizon > 0.0) {
        return Err(Error::invalid("horizon must be positive"));
    }
    admissible(collection, horizon)?;

    let mut table = Vec::with_capacity(collection.models.len());
    let mut coeffs: Vec<Vec<f64>> = Vec::with_capacity(collection.models.len());
    for i in 0..collection.models.len() {
        let model = &collection.models[i];
        let beta = project_sizes(sizes.iter(), horizon, model);
        let n_in_window = sizes.iter().filter(|&&x| model.bin_index(x).is_some()).count() as f64;
        let v = vhat_sizes(sizes.iter(), horizon, model);
        // exact minimizer value of the contrast over the model
        let contrast = -beta.iter().map(|b| b * b).sum::<f64>();
        let pen = penalty_from_stats(form, horizon, model, n_in_window, v);
        let score = contrast + pen;
        if !score.is_finite() {
            return Err(Error::NumericFailure(format!(
                "non-finite selection score for model index {i}"
            )));
        }
        table.push(ModelScore {
            index: i,
            dim: model.dim(),
            sup_constant: model.sup_constant(),
            contrast,
            penalty: pen,
            score,
            chosen: false,
        });
        coeffs.push(beta);
    }

    // minimize score; ties broken by smaller dimension, then smaller index
    let mut best = 0;
    for k in 1..table.len() {
        let a = &table[k];
        let b = &table[best];
        let better = a.score < b.score
            || (a.score == b.score && (a.dim < b.dim || (a.dim == b.dim && a.index < b.index)));
        if better {
            best = k;
        }
    }
    table[best].chosen = true;
    let chosen_index = table[best].index;
    let estimate = ProjectionEstimate {
        model: collection.models[chosen_index].clone(),
        coefficients: coeffs.swap_remove(best),
        horizon,
    };
    Ok(SelectionResult { chosen_index, estimate, table, warnings: Vec::new() })
}

/// Penalized projection estimator over a model collection.
///
/// Errors with `EmptyAdmissible` when no model satisfies `D_m <= T`;
/// restrict the collection with [`admissible`] first to select over `M_T`
/// only.
pub fn select(
    jumps: &JumpSet,
    collection: &ModelCollection,
    form: &PenaltyForm,
) -> Result<SelectionResult> {
    let sizes: Vec<f64> = jumps.jumps.iter().map(|j| j.size).collect();
    select_sizes(&sizes, jumps.horizon, collection, form)
}

/// Restrict a collection to its admissible sub-collection (`D_m <= T`).
pub fn restrict_admissible(collection: &ModelCollection, horizon: f64) -> Result<ModelCollection> {
    let idx = admissible(collection, horizon)?;
    Ok(ModelCollection { models: idx.into_iter().map(|i| collection.models[i].clone()).collect() })
}
