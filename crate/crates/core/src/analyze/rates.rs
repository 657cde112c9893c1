// SPDX-License-Identifier: Apache-2.0

use serde::Serialize;

use crate::model::{AreaAttribution, AreaLevel};

/// Per-journal mass of one indicator, e.g. its prestige share or citations.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorMass {
    pub name: String,
    pub mass: Vec<f64>,
}

impl IndicatorMass {
    pub fn new(name: impl Into<String>, mass: Vec<f64>) -> Self {
        Self {
            name: name.into(),
            mass,
        }
    }

    /// Mass of a per-document indicator: `score_i · Art_i`, zero when undefined.
    pub fn from_scores(name: impl Into<String>, scores: &[Option<f64>], art: &[u64]) -> Self {
        let mass = scores
            .iter()
            .zip(art)
            .map(|(s, &a)| s.map_or(0.0, |s| s * a as f64))
            .collect();
        Self::new(name, mass)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AreaRateRow {
    pub code: String,
    pub art_share: f64,
    /// One rate per indicator; `None` when the indicator has no mass at all.
    pub rates: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AreaRateTable {
    pub level: AreaLevel,
    pub indicators: Vec<String>,
    pub rows: Vec<AreaRateRow>,
    /// Areas left out because they hold no citable documents.
    pub omitted: Vec<String>,
}

impl AreaRateTable {
    /// Rates of indicator `k`, optionally skipping one area code.
    pub fn column(&self, k: usize, skip: Option<&str>) -> Vec<f64> {
        self.rows
            .iter()
            .filter(|r| Some(r.code.as_str()) != skip)
            .filter_map(|r| r.rates[k])
            .collect()
    }
}

/// `rate(A) = (indicator mass share of A) / (citable-document share of A)`.
///
/// Shares are taken over journals attributed to at least one area, with
/// fractional membership.
pub fn area_rates(
    indicators: &[IndicatorMass],
    art: &[u64],
    attribution: &AreaAttribution,
    level: AreaLevel,
) -> AreaRateTable {
    let (codes, membership) = attribution.level(level);
    let n_areas = codes.len();
    let mut area_art = vec![0.0; n_areas];
    let mut total_art = 0.0;
    for (i, m) in membership.iter().enumerate() {
        if m.is_empty() {
            continue;
        }
        total_art += art[i] as f64;
        for &(a, w) in m {
            area_art[a] += w * art[i] as f64;
        }
    }
    let mut area_mass = vec![vec![0.0; n_areas]; indicators.len()];
    let mut total_mass = vec![0.0; indicators.len()];
    for (k, ind) in indicators.iter().enumerate() {
        for (i, m) in membership.iter().enumerate() {
            if m.is_empty() {
                continue;
            }
            total_mass[k] += ind.mass[i];
            for &(a, w) in m {
                area_mass[k][a] += w * ind.mass[i];
            }
        }
    }
    let mut rows = Vec::new();
    let mut omitted = Vec::new();
    for (a, code) in codes.iter().enumerate() {
        if area_art[a] <= 0.0 {
            omitted.push(code.clone());
            continue;
        }
        let art_share = area_art[a] / total_art;
        let rates = (0..indicators.len())
            .map(|k| (total_mass[k] > 0.0).then(|| area_mass[k][a] / total_mass[k] / art_share))
            .collect();
        rows.push(AreaRateRow {
            code: code.clone(),
            art_share,
            rates,
        });
    }
    AreaRateTable {
        level,
        indicators: indicators.iter().map(|i| i.name.clone()).collect(),
        rows,
        omitted,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Journal, JournalId, JournalTable, SubjectScheme};

    fn attribution(areas: &[&[&str]]) -> AreaAttribution {
        let mut t = JournalTable::new();
        let mut codes = Vec::new();
        for (k, a) in areas.iter().enumerate() {
            codes.extend(a.iter().copied());
            t.push(Journal {
                id: JournalId::new(format!("J{k}")).unwrap(),
                title: String::new(),
                specific_areas: a.iter().map(|s| s.to_string()).collect(),
                citable_docs_by_year: Default::default(),
                ranked: true,
            })
            .unwrap();
        }
        AreaAttribution::build(&t, &SubjectScheme::from_code_prefixes(codes))
    }

    #[test]
    fn single_area_rate_is_one() {
        let attr = attribution(&[&["1301"], &["1302"]]);
        let ind = IndicatorMass::new("x", vec![0.9, 0.1]);
        let t = area_rates(&[ind], &[3, 7], &attr, AreaLevel::Subject);
        assert_eq!(t.rows.len(), 1);
        assert!((t.rows[0].rates[0].unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn all_mass_in_one_of_two_equal_areas() {
        let attr = attribution(&[&["1301"], &["2001"]]);
        let ind = IndicatorMass::new("x", vec![1.0, 0.0]);
        let t = area_rates(&[ind], &[5, 5], &attr, AreaLevel::Subject);
        assert_eq!(t.column(0, None), vec![2.0, 0.0]);
    }

    #[test]
    fn fractional_membership_hand_computation() {
        // J0 in {1301, 2001} (half each), J1 in 1301, J2 in 2001.
        // Art 10, 30, 60 -> area art 1300: 5+30 = 35, 2000: 5+60 = 65.
        // Mass 0.5, 0.3, 0.2 -> 1300: 0.25+0.3 = 0.55, 2000: 0.25+0.2 = 0.45.
        let attr = attribution(&[&["1301", "2001"], &["1301"], &["2001"]]);
        let ind = IndicatorMass::new("x", vec![0.5, 0.3, 0.2]);
        let t = area_rates(&[ind], &[10, 30, 60], &attr, AreaLevel::Subject);
        let r = t.column(0, None);
        assert!((r[0] - 0.55 / 0.35).abs() < 1e-12);
        assert!((r[1] - 0.45 / 0.65).abs() < 1e-12);
        assert!((t.rows[0].art_share - 0.35).abs() < 1e-15);
    }

    #[test]
    fn zero_art_area_is_omitted() {
        let attr = attribution(&[&["1301"], &["2001"]]);
        let ind = IndicatorMass::new("x", vec![0.5, 0.5]);
        let t = area_rates(&[ind], &[5, 0], &attr, AreaLevel::Subject);
        assert_eq!(t.omitted, vec!["2000"]);
        assert_eq!(t.rows.len(), 1);
    }

    #[test]
    fn score_mass_is_score_times_art() {
        let m = IndicatorMass::from_scores("jif", &[Some(2.0), None], &[3, 4]);
        assert_eq!(m.mass, vec![6.0, 0.0]);
    }
}
