// SPDX-License-Identifier: Apache-2.0

//! Seeded block-structured citation networks.
//!
//! Randomness comes from ChaCha8 ([`RNG_ALGORITHM`]) with one stream per
//! generation phase. Every structural decision is made on raw 64-bit
//! integers (bounded draws by rejection, probabilities compared against
//! 53-bit thresholds), so a configuration reproduces the same dataset on any
//! platform.

mod presets;

use std::collections::BTreeMap;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use presets::{PresetRegistry, ScalePreset, SynthPreset, TwoFieldPreset, UniformPreset};

use crate::model::{
    default_parent, CitingDocument, Dataset, Journal, JournalId, JournalTable, Ref, SubjectScheme,
};

pub const RNG_ALGORITHM: &str = "ChaCha8 (rand_chacha 0.3, seed_from_u64, stream per phase)";

#[derive(Debug, Error, PartialEq)]
pub enum SynthError {
    #[error("invalid synthetic configuration: {0}")]
    Config(String),
    #[error("unknown preset `{name}` (known: {known})")]
    UnknownPreset { name: String, known: String },
    #[error("cannot read configuration: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockConfig {
    /// Specific area assigned to every journal of the block.
    pub area_code: String,
    /// Parent subject area; defaults to the code's two-digit prefix + `00`.
    #[serde(default)]
    pub subject_code: Option<String>,
    #[serde(default)]
    pub subject_name: Option<String>,
    pub journal_count: usize,
    /// Inclusive range of windowed citable documents per journal.
    pub art_per_journal_range: (u64, u64),
    pub refs_per_doc_mean: f64,
    pub within_block_prob: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub blocks: Vec<BlockConfig>,
    #[serde(default)]
    pub cross_block_mixing: f64,
    #[serde(default)]
    pub dangling_fraction: f64,
    pub year: i32,
    pub window: u32,
    pub seed: u64,
    #[serde(default = "default_true")]
    pub allow_self_citation: bool,
}

fn default_true() -> bool {
    true
}

impl SynthConfig {
    pub fn from_toml(text: &str) -> Result<Self, SynthError> {
        toml::from_str(text).map_err(|e| SynthError::Parse(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |m: String| Err(SynthError::Config(m));
        if self.blocks.is_empty() {
            return bad("at least one block is required".into());
        }
        if self.window < 1 {
            return bad("window must be >= 1".into());
        }
        for (name, p) in [
            ("cross_block_mixing", self.cross_block_mixing),
            ("dangling_fraction", self.dangling_fraction),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name} must lie in [0, 1]"));
            }
        }
        for (k, b) in self.blocks.iter().enumerate() {
            if b.journal_count < 1 {
                return bad(format!("block {k}: journal_count must be >= 1"));
            }
            let (lo, hi) = b.art_per_journal_range;
            if lo < 1 || lo > hi {
                return bad(format!(
                    "block {k}: art_per_journal_range must satisfy 1 <= lo <= hi"
                ));
            }
            if b.refs_per_doc_mean.is_nan() || b.refs_per_doc_mean <= 0.0 {
                return bad(format!("block {k}: refs_per_doc_mean must be > 0"));
            }
            if !(0.0..=1.0).contains(&b.within_block_prob) {
                return bad(format!("block {k}: within_block_prob must lie in [0, 1]"));
            }
            let only_within = b.within_block_prob >= 1.0 && self.cross_block_mixing == 0.0;
            let only_others = self.blocks.len() == 1 || only_within;
            if b.journal_count == 1 && !self.allow_self_citation && only_others && only_within {
                return bad(format!(
                    "block {k}: a single journal citing only its own block needs self-citation"
                ));
            }
            if self.blocks.len() == 1 && b.journal_count == 1 && !self.allow_self_citation {
                return bad("a one-journal network needs self-citation".into());
            }
        }
        Ok(())
    }
}

fn bounded(rng: &mut ChaCha8Rng, n: u64) -> u64 {
    debug_assert!(n > 0);
    let zone = u64::MAX - (u64::MAX % n);
    loop {
        let x = rng.next_u64();
        if x < zone {
            return x % n;
        }
    }
}

fn chance(rng: &mut ChaCha8Rng, p: f64) -> bool {
    let threshold = (p.clamp(0.0, 1.0) * (1u64 << 53) as f64) as u64;
    (rng.next_u64() >> 11) < threshold
}

/// Weighted sampler over a fixed set of journals.
struct Cumulative {
    members: Vec<u32>,
    cum: Vec<u64>,
}

impl Cumulative {
    fn new(members: Vec<u32>, weight: &[u64]) -> Self {
        let mut acc = 0;
        let cum = members
            .iter()
            .map(|&m| {
                acc += weight[m as usize];
                acc
            })
            .collect();
        Self { members, cum }
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> u32 {
        let total = *self.cum.last().expect("non-empty sampler");
        let x = bounded(rng, total);
        self.members[self.cum.partition_point(|&c| c <= x)]
    }
}

const PHASE_JOURNALS: u64 = 0;
const PHASE_DOCUMENTS: u64 = 1;

/// Generates a dataset; the same configuration always yields the same output.
pub fn generate(cfg: &SynthConfig) -> Result<Dataset, SynthError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(PHASE_JOURNALS);

    let mut scheme = SubjectScheme::new();
    let mut table = JournalTable::new();
    let mut block_of = Vec::new();
    let mut weight = Vec::new();
    let mut dangling = Vec::new();
    let mut year_docs = Vec::new();
    let w = cfg.window as u64;
    for (b, block) in cfg.blocks.iter().enumerate() {
        let subject = block
            .subject_code
            .clone()
            .unwrap_or_else(|| default_parent(&block.area_code));
        let name = block
            .subject_name
            .clone()
            .unwrap_or_else(|| format!("Block {b}"));
        scheme
            .insert(&block.area_code, &subject, &name)
            .map_err(|e| SynthError::Config(e.to_string()))?;
        let (lo, hi) = block.art_per_journal_range;
        for k in 0..block.journal_count {
            let art = lo + bounded(&mut rng, hi - lo + 1);
            let quality = 1 + bounded(&mut rng, 8);
            let is_dangling = chance(&mut rng, cfg.dangling_fraction);
            let mut counts = BTreeMap::new();
            for (off, year) in (cfg.year - cfg.window as i32..cfg.year).enumerate() {
                let extra = u64::from((off as u64) < art % w);
                counts.insert(year, art / w + extra);
            }
            let current = ((art + w / 2) / w).max(1);
            counts.insert(cfg.year, current);
            table
                .push(Journal {
                    id: JournalId::new(format!("S{b}-{k:05}")).expect("non-empty"),
                    title: format!("Synthetic journal {b}-{k}"),
                    specific_areas: [block.area_code.clone()].into(),
                    citable_docs_by_year: counts,
                    ranked: true,
                })
                .map_err(|e| SynthError::Config(e.to_string()))?;
            block_of.push(b);
            weight.push(art * quality);
            dangling.push(is_dangling);
            year_docs.push(current);
        }
    }

    let n = table.len();
    let all = Cumulative::new((0..n as u32).collect(), &weight);
    let per_block: Vec<Cumulative> = (0..cfg.blocks.len())
        .map(|b| {
            Cumulative::new(
                (0..n as u32)
                    .filter(|&j| block_of[j as usize] == b)
                    .collect(),
                &weight,
            )
        })
        .collect();

    rng.set_stream(PHASE_DOCUMENTS);
    rng.set_word_pos(0);
    let window_start = cfg.year - cfg.window as i32;
    let mut documents = Vec::new();
    let mut grouped: BTreeMap<(u32, i32), u32> = BTreeMap::new();
    for j in 0..n {
        if dangling[j] {
            continue;
        }
        let block = &cfg.blocks[block_of[j]];
        let mean = (block.refs_per_doc_mean.round() as u64).max(1);
        for _ in 0..year_docs[j] {
            let refs = 1 + bounded(&mut rng, 2 * mean - 1);
            grouped.clear();
            for _ in 0..refs {
                let target = loop {
                    let t = if chance(&mut rng, cfg.cross_block_mixing) {
                        all.draw(&mut rng)
                    } else if cfg.blocks.len() == 1 || chance(&mut rng, block.within_block_prob) {
                        per_block[block_of[j]].draw(&mut rng)
                    } else {
                        loop {
                            let t = all.draw(&mut rng);
                            if block_of[t as usize] != block_of[j] {
                                break t;
                            }
                        }
                    };
                    if cfg.allow_self_citation || t as usize != j {
                        break t;
                    }
                };
                let year = window_start + bounded(&mut rng, w) as i32;
                *grouped.entry((target, year)).or_default() += 1;
            }
            documents.push(CitingDocument {
                source: j as u32,
                year: cfg.year,
                refs: grouped
                    .iter()
                    .map(|(&(cited, year), &n)| Ref { cited, year, n })
                    .collect(),
            });
        }
    }

    Ok(Dataset {
        journals: table,
        documents,
        scheme,
        unknown_ids: Vec::new(),
    })
}
