// SPDX-License-Identifier: Apache-2.0

//! Citation-count baselines: windowed citations and JIF(3y).
//!
//! Unlike the citation matrix, the counts here include references from
//! unranked source journals.

use serde::Serialize;

use crate::ingest::{ArtVector, CitationMatrix};
use crate::model::{CitingDocument, Params};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BaselineTable {
    pub citations_3y: Vec<u64>,
    /// `citations_3y / Art`; `None` where `Art = 0`.
    pub jif3y: Vec<Option<f64>>,
}

/// Ratio of windowed citations to windowed citable documents.
pub fn jif(citations: u64, art: u64) -> Option<f64> {
    (art > 0).then(|| citations as f64 / art as f64)
}

pub fn compute_jif3y(docs: &[CitingDocument], art: &ArtVector, p: &Params) -> BaselineTable {
    let n = art.len();
    let mut citations_3y = vec![0u64; n];
    for doc in docs.iter().filter(|d| d.year == p.year) {
        for r in &doc.refs {
            if p.in_window(r.year) && (r.cited as usize) < n {
                citations_3y[r.cited as usize] += r.n as u64;
            }
        }
    }
    let jif3y = citations_3y
        .iter()
        .zip(art.values())
        .map(|(&c, &a)| jif(c, a))
        .collect();
    BaselineTable {
        citations_3y,
        jif3y,
    }
}

/// Citations that reach a journal through the citation matrix (ranked sources).
pub fn considered_citations(cmat: &CitationMatrix) -> Vec<u64> {
    cmat.received()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Ref;

    #[test]
    fn ratio_arithmetic() {
        assert!((jif(647, 36).unwrap() - 17.97).abs() < 0.005);
        assert!((jif(72, 10).unwrap() - 7.2).abs() < 0.005);
        assert_eq!(jif(0, 12), Some(0.0));
        assert_eq!(jif(5, 0), None);
    }

    #[test]
    fn counts_every_year_y_document() {
        let art = ArtVector::from_counts(vec![10, 0, 4]).unwrap();
        let docs = vec![
            CitingDocument {
                source: 1,
                year: 2008,
                refs: vec![
                    Ref {
                        cited: 0,
                        year: 2006,
                        n: 3,
                    },
                    Ref {
                        cited: 1,
                        year: 2007,
                        n: 1,
                    },
                    Ref {
                        cited: 2,
                        year: 2004,
                        n: 9,
                    },
                ],
            },
            CitingDocument {
                source: 0,
                year: 2007,
                refs: vec![Ref {
                    cited: 2,
                    year: 2006,
                    n: 9,
                }],
            },
        ];
        let t = compute_jif3y(&docs, &art, &Params::default());
        assert_eq!(t.citations_3y, vec![3, 1, 0]);
        assert_eq!(t.jif3y, vec![Some(0.3), None, Some(0.0)]);
    }
}
