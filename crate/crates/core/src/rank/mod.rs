// SPDX-License-Identifier: Apache-2.0

//! The prestige engine.
//!
//! 1. Edge weights `w_ji` from a registered [`EdgeWeighting`] strategy.
//! 2. Capped coefficients `Coef_ji` ([`compute_coefficients`]).
//! 3. The fixed point
//!    `v_i = (1-d-e)/N + e·Art_i/ΣArt + (d/D)·Σ_j Coef_ji·v_j`, where
//!    `D = Σ_i Σ_j Coef_ji·v_j` is the mass actually distributed in that
//!    iteration, so prestige held by dangling journals (and any capped-off
//!    share) is handed out in proportion to what each journal receives.
//! 4. `SJR2_i = v_i / (Art_i / ΣArt)`.

mod coef;
mod iterate;
pub mod weighting;

use thiserror::Error;

pub use coef::{compute_coefficients, CoefMatrix};
pub use iterate::{
    compute_sjr2, iterate_psjr2, iterate_psjr2_observed, psjr2d, IterationState, PrestigeVector,
    ScoreVector,
};
pub use weighting::{
    CosineWeighting, EdgeWeighting, UniformWeighting, WeightingInput, WeightingRegistry,
};

use crate::cocite::{CocitationMatrix, EdgeWeights};
use crate::ingest::{
    build_art_vector, build_citation_matrix, ArtVector, CitationMatrix, IngestError,
};
use crate::model::{Dataset, ModelError, Params};

#[derive(Debug, Error)]
pub enum RankError {
    #[error(transparent)]
    Params(#[from] ModelError),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error("network has no journals")]
    Empty,
    #[error("vector length {found} does not match {expected} journals")]
    LengthMismatch { expected: usize, found: usize },
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NotConverged {
        iterations: usize,
        residual: f64,
        partial: Box<PrestigeVector>,
    },
    #[error("unknown weighting `{name}` (known: {known})")]
    UnknownWeighting { name: String, known: String },
}

/// Every intermediate of one engine run.
#[derive(Debug, Clone)]
pub struct Sjr2Run {
    pub params: Params,
    pub cmat: CitationMatrix,
    pub art: ArtVector,
    pub weights: EdgeWeights,
    pub coef: CoefMatrix,
    /// Check `prestige.converged`: a run that hit `max_iters` still returns
    /// its last vector.
    pub prestige: PrestigeVector,
    pub scores: ScoreVector,
}

impl Sjr2Run {
    /// `(d/D)·Coef_ji·v_j` for every coefficient, at the returned vector.
    pub fn flows(&self) -> Vec<(usize, usize, f64)> {
        let v = &self.prestige.values;
        let distributed = psjr2d(&self.coef, v);
        if distributed <= 0.0 {
            return Vec::new();
        }
        let scale = self.params.d / distributed;
        self.coef
            .iter()
            .map(|(j, i, c)| (j, i, scale * c * v[j]))
            .collect()
    }
}

/// Runs the engine end to end on `ds`.
///
/// `cocitation` is reused by strategies that need it; pass `None` to let
/// them build their own.
pub fn run_sjr2(
    ds: &Dataset,
    p: &Params,
    weighting: &dyn EdgeWeighting,
    cocitation: Option<&CocitationMatrix>,
) -> Result<Sjr2Run, RankError> {
    p.validate()?;
    if ds.journals.is_empty() {
        return Err(RankError::Empty);
    }
    let art = build_art_vector(&ds.journals, p)?;
    let cmat = build_citation_matrix(&ds.documents, &ds.journals, p);
    let weights = weighting.edge_weights(&WeightingInput {
        docs: &ds.documents,
        cmat: &cmat,
        params: p,
        cocitation,
    });
    let coef = compute_coefficients(&cmat, &weights, p, weighting.name());
    let prestige = match iterate_psjr2(&coef, &art, p) {
        Ok(v) => v,
        Err(RankError::NotConverged { partial, .. }) => *partial,
        Err(e) => return Err(e),
    };
    let scores = compute_sjr2(&prestige, &art);
    Ok(Sjr2Run {
        params: p.clone(),
        cmat,
        art,
        weights,
        coef,
        prestige,
        scores,
    })
}
