// SPDX-License-Identifier: Apache-2.0

use serde::Serialize;

use super::stats::{mean_sd, pearson, spearman};
use crate::model::{AreaAttribution, AreaLevel};

/// Minimum number of journals for a per-area correlation.
pub const MIN_AREA_JOURNALS: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairCorrelation {
    pub left: String,
    pub right: String,
    pub n: usize,
    pub pearson: Option<f64>,
    pub spearman: Option<f64>,
}

/// Mean and standard deviation of per-area correlations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AreaCorrelationSummary {
    pub left: String,
    pub right: String,
    pub level: AreaLevel,
    pub areas: usize,
    pub pearson: Option<(f64, f64)>,
    pub spearman: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationTable {
    pub overall: Vec<PairCorrelation>,
    pub by_area: Vec<AreaCorrelationSummary>,
}

fn paired(
    a: &[Option<f64>],
    b: &[Option<f64>],
    keep: impl Fn(usize) -> bool,
) -> (Vec<f64>, Vec<f64>) {
    a.iter()
        .zip(b)
        .enumerate()
        .filter(|&(i, _)| keep(i))
        .filter_map(|(_, (x, y))| Some(((*x)?, (*y)?)))
        .unzip()
}

/// Overall and per-area Pearson/Spearman for every pair of indicators.
///
/// Per-area values are simple (unweighted) means over areas with at least
/// [`MIN_AREA_JOURNALS`] journals and non-degenerate data.
pub fn correlation_table(
    indicators: &[(String, Vec<Option<f64>>)],
    attribution: &AreaAttribution,
) -> CorrelationTable {
    let mut overall = Vec::new();
    let mut by_area = Vec::new();
    for a in 0..indicators.len() {
        for b in a + 1..indicators.len() {
            let (ln, lv) = &indicators[a];
            let (rn, rv) = &indicators[b];
            let (x, y) = paired(lv, rv, |_| true);
            overall.push(PairCorrelation {
                left: ln.clone(),
                right: rn.clone(),
                n: x.len(),
                pearson: pearson(&x, &y).ok(),
                spearman: spearman(&x, &y).ok(),
            });
            for level in [AreaLevel::Subject, AreaLevel::Specific] {
                let (codes, membership) = attribution.level(level);
                let mut ps = Vec::new();
                let mut ss = Vec::new();
                for area in 0..codes.len() {
                    let member =
                        |i: usize| membership[i].iter().any(|&(k, w)| k == area && w > 0.0);
                    let (x, y) = paired(lv, rv, member);
                    if x.len() < MIN_AREA_JOURNALS {
                        continue;
                    }
                    if let Ok(r) = pearson(&x, &y) {
                        ps.push(r);
                    }
                    if let Ok(r) = spearman(&x, &y) {
                        ss.push(r);
                    }
                }
                by_area.push(AreaCorrelationSummary {
                    left: ln.clone(),
                    right: rn.clone(),
                    level,
                    areas: ps.len().max(ss.len()),
                    pearson: mean_sd(&ps),
                    spearman: mean_sd(&ss),
                });
            }
        }
    }
    CorrelationTable { overall, by_area }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Journal, JournalId, JournalTable, SubjectScheme};

    #[test]
    fn pairs_skip_undefined_values() {
        let mut t = JournalTable::new();
        for k in 0..5 {
            t.push(Journal {
                id: JournalId::new(format!("J{k}")).unwrap(),
                title: String::new(),
                specific_areas: [if k < 4 { "1301" } else { "2001" }.to_string()].into(),
                citable_docs_by_year: Default::default(),
                ranked: true,
            })
            .unwrap();
        }
        let attr = AreaAttribution::build(&t, &SubjectScheme::from_code_prefixes(["1301", "2001"]));
        let ind = vec![
            (
                "a".to_string(),
                vec![Some(1.0), Some(2.0), Some(3.0), None, Some(5.0)],
            ),
            (
                "b".to_string(),
                vec![Some(2.0), Some(4.0), Some(6.0), Some(1.0), Some(10.0)],
            ),
        ];
        let table = correlation_table(&ind, &attr);
        assert_eq!(table.overall.len(), 1);
        assert_eq!(table.overall[0].n, 4);
        assert!((table.overall[0].pearson.unwrap() - 1.0).abs() < 1e-12);
        let subj = &table.by_area[0];
        assert_eq!(subj.level, AreaLevel::Subject);
        // Only 1300 has three complete journals.
        assert_eq!(subj.areas, 1);
        let (m, sd) = subj.spearman.unwrap();
        assert!((m - 1.0).abs() < 1e-12);
        assert_eq!(sd, 0.0);
    }
}
