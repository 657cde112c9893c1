// SPDX-License-Identifier: Apache-2.0

//! Journal prestige over citation networks.
//!
//! The engine weights each citation by the cosine between the cocitation
//! profiles of the citing and cited journal, caps every transfer, recycles
//! the prestige of dangling journals through the distributed-mass divisor,
//! and finally divides each journal's prestige share by its share of
//! citable documents. Around it sit ingest of the file formats, a JIF(3y)
//! baseline, the statistical comparisons used to characterise the
//! indicator, and a seeded generator of synthetic networks.

pub mod analyze;
pub mod baselines;
pub mod cocite;
pub mod format;
pub mod ingest;
pub mod model;
pub mod rank;
pub mod synth;

pub use model::{Dataset, Journal, JournalId, JournalTable, Params, SubjectScheme};
pub use rank::{run_sjr2, Sjr2Run};
