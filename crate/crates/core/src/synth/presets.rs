// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;
use std::sync::Arc;

use super::{BlockConfig, SynthConfig, SynthError};

/// A named, seedable synthetic configuration.
pub trait SynthPreset: Send + Sync {
    fn name(&self) -> &'static str;

    fn description(&self) -> &'static str;

    fn config(&self, seed: u64) -> SynthConfig;
}

fn block(area: &str, subject_name: &str, journals: usize, refs: f64, within: f64) -> BlockConfig {
    BlockConfig {
        area_code: area.into(),
        subject_code: None,
        subject_name: Some(subject_name.into()),
        journal_count: journals,
        art_per_journal_range: (20, 120),
        refs_per_doc_mean: refs,
        within_block_prob: within,
    }
}

/// Two fields with a 3:1 contrast in references per document.
#[derive(Debug, Default, Clone, Copy)]
pub struct TwoFieldPreset;

impl SynthPreset for TwoFieldPreset {
    fn name(&self) -> &'static str {
        "two-field"
    }

    fn description(&self) -> &'static str {
        "two 250-journal fields, citation density 3:1, mostly within-field citing"
    }

    fn config(&self, seed: u64) -> SynthConfig {
        SynthConfig {
            blocks: vec![
                block("1312", "Dense field", 250, 30.0, 0.9),
                block("2002", "Sparse field", 250, 10.0, 0.9),
            ],
            cross_block_mixing: 0.0,
            dangling_fraction: 0.05,
            year: 2008,
            window: 3,
            seed,
            allow_self_citation: true,
        }
    }
}

/// Symmetric control: two identical fields.
#[derive(Debug, Default, Clone, Copy)]
pub struct UniformPreset;

impl SynthPreset for UniformPreset {
    fn name(&self) -> &'static str {
        "uniform"
    }

    fn description(&self) -> &'static str {
        "two identical 250-journal fields, same citation density"
    }

    fn config(&self, seed: u64) -> SynthConfig {
        SynthConfig {
            blocks: vec![
                block("1312", "Field A", 250, 20.0, 0.9),
                block("2002", "Field B", 250, 20.0, 0.9),
            ],
            cross_block_mixing: 0.0,
            dangling_fraction: 0.05,
            year: 2008,
            window: 3,
            seed,
            allow_self_citation: true,
        }
    }
}

/// 50,000 journals in ten fields, about five million reference events.
#[derive(Debug, Default, Clone, Copy)]
pub struct ScalePreset;

impl SynthPreset for ScalePreset {
    fn name(&self) -> &'static str {
        "scale-50k"
    }

    fn description(&self) -> &'static str {
        "ten 5,000-journal fields, ~500k citing documents, ~5M reference events"
    }

    fn config(&self, seed: u64) -> SynthConfig {
        let blocks = (0..10)
            .map(|k| BlockConfig {
                area_code: format!("{}01", 11 + k * 2),
                subject_code: None,
                subject_name: Some(format!("Field {k}")),
                journal_count: 5_000,
                art_per_journal_range: (6, 54),
                refs_per_doc_mean: 10.0,
                within_block_prob: 0.8,
            })
            .collect();
        SynthConfig {
            blocks,
            cross_block_mixing: 0.0,
            dangling_fraction: 0.0,
            year: 2008,
            window: 3,
            seed,
            allow_self_citation: true,
        }
    }
}

#[derive(Clone)]
pub struct PresetRegistry {
    presets: BTreeMap<&'static str, Arc<dyn SynthPreset>>,
}

impl Default for PresetRegistry {
    fn default() -> Self {
        let mut r = Self {
            presets: BTreeMap::new(),
        };
        r.register(TwoFieldPreset);
        r.register(UniformPreset);
        r.register(ScalePreset);
        r
    }
}

impl PresetRegistry {
    pub fn register<P: SynthPreset + 'static>(&mut self, preset: P) {
        self.presets.insert(preset.name(), Arc::new(preset));
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn SynthPreset>, SynthError> {
        self.presets
            .get(name)
            .cloned()
            .ok_or_else(|| SynthError::UnknownPreset {
                name: name.to_string(),
                known: self.names().join(", "),
            })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.presets.keys().copied().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Arc<dyn SynthPreset>> {
        self.presets.values()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_are_valid_and_registered() {
        let r = PresetRegistry::default();
        assert_eq!(r.names(), vec!["scale-50k", "two-field", "uniform"]);
        for p in r.iter() {
            p.config(1).validate().unwrap();
        }
        let tf = r.get("two-field").unwrap().config(3);
        assert_eq!(
            tf.blocks[0].refs_per_doc_mean,
            3.0 * tf.blocks[1].refs_per_doc_mean
        );
        assert!(matches!(
            r.get("nope"),
            Err(SynthError::UnknownPreset { .. })
        ));
    }
}
