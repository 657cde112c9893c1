// SPDX-License-Identifier: Apache-2.0

//! Edge weighting strategies for the transfer coefficients.
//!
//! A strategy turns the citation matrix (and, if it wants, the citing
//! documents) into one weight per citation edge. Strategies are registered
//! by name so the CLI can pick one at runtime.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::cocite::{build_cocitation, cosines_for_edges, CocitationMatrix, EdgeWeights};
use crate::ingest::CitationMatrix;
use crate::model::{CitingDocument, Params};

use super::RankError;

/// Everything a weighting strategy may look at.
pub struct WeightingInput<'a> {
    pub docs: &'a [CitingDocument],
    pub cmat: &'a CitationMatrix,
    pub params: &'a Params,
    /// Reused when already built by the caller.
    pub cocitation: Option<&'a CocitationMatrix>,
}

pub trait EdgeWeighting: Send + Sync {
    fn name(&self) -> &'static str;

    fn description(&self) -> &'static str;

    fn edge_weights(&self, input: &WeightingInput<'_>) -> EdgeWeights;
}

/// `w_ji = Cos_ji`, the cosine between the two cocitation profiles.
#[derive(Debug, Default, Clone, Copy)]
pub struct CosineWeighting;

impl EdgeWeighting for CosineWeighting {
    fn name(&self) -> &'static str {
        "cosine"
    }

    fn description(&self) -> &'static str {
        "cocitation-profile cosine between citing and cited journal"
    }

    fn edge_weights(&self, input: &WeightingInput<'_>) -> EdgeWeights {
        match input.cocitation {
            Some(cocit) => cosines_for_edges(cocit, input.cmat),
            None => {
                let cocit = build_cocitation(input.docs, input.cmat.n(), input.params);
                cosines_for_edges(&cocit, input.cmat)
            }
        }
    }
}

/// `w_ji = 1`: plain reference shares (the cosine switched off).
#[derive(Debug, Default, Clone, Copy)]
pub struct UniformWeighting;

impl EdgeWeighting for UniformWeighting {
    fn name(&self) -> &'static str {
        "uniform"
    }

    fn description(&self) -> &'static str {
        "every citation weighs 1 (cosine disabled)"
    }

    fn edge_weights(&self, input: &WeightingInput<'_>) -> EdgeWeights {
        EdgeWeights::uniform(input.cmat)
    }
}

#[derive(Clone)]
pub struct WeightingRegistry {
    strategies: BTreeMap<&'static str, Arc<dyn EdgeWeighting>>,
}

impl Default for WeightingRegistry {
    fn default() -> Self {
        let mut r = Self::empty();
        r.register(CosineWeighting);
        r.register(UniformWeighting);
        r
    }
}

impl WeightingRegistry {
    pub fn empty() -> Self {
        Self {
            strategies: BTreeMap::new(),
        }
    }

    pub fn register<W: EdgeWeighting + 'static>(&mut self, strategy: W) {
        self.strategies.insert(strategy.name(), Arc::new(strategy));
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn EdgeWeighting>, RankError> {
        self.strategies
            .get(name)
            .cloned()
            .ok_or_else(|| RankError::UnknownWeighting {
                name: name.to_string(),
                known: self.names().join(", "),
            })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.strategies.keys().copied().collect()
    }

    /// Strategy matching `params.use_cosine`.
    pub fn for_params(&self, params: &Params) -> Result<Arc<dyn EdgeWeighting>, RankError> {
        self.get(params.weighting_name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_registered() {
        let r = WeightingRegistry::default();
        assert_eq!(r.names(), vec!["cosine", "uniform"]);
        assert_eq!(r.for_params(&Params::default()).unwrap().name(), "cosine");
        let off = Params {
            use_cosine: false,
            ..Params::default()
        };
        assert_eq!(r.for_params(&off).unwrap().name(), "uniform");
        assert!(matches!(
            r.get("pagerank"),
            Err(RankError::UnknownWeighting { .. })
        ));
    }
}
