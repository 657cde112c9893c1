// SPDX-License-Identifier: Apache-2.0

//! Statistical characterisation of the indicator against its baselines:
//! correlations, per-area rates and their deviation from unity, log-law
//! fits of the value-vs-rank curve, and prestige flows between areas.

pub mod correlations;
pub mod flows;
pub mod rates;
pub mod report;
pub mod stats;

use std::io::Read;

use serde::Serialize;
use thiserror::Error;

pub use correlations::{correlation_table, CorrelationTable};
pub use flows::{flow_matrix, within_flows, EdgeFlow, FlowMatrix, WithinFlowTable, WithinShares};
pub use rates::{area_rates, AreaRateTable, IndicatorMass};
pub use stats::{log_fit, msd_unity, pearson, rank_normalize, spearman, LogFit};

use crate::baselines::{compute_jif3y, BaselineTable};
use crate::cocite::build_cocitation;
use crate::model::{AreaAttribution, AreaLevel, Dataset, Params, SubjectScheme};
use crate::rank::{run_sjr2, RankError, Sjr2Run, WeightingRegistry};

#[derive(Debug, Error, PartialEq)]
pub enum AnalyzeError {
    #[error("sequences differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least 2 values, got {0}")]
    TooShort(usize),
    #[error("correlation undefined: zero variance")]
    ZeroVariance,
    #[error("rates file line {line}: {message}")]
    RatesFile { line: usize, message: String },
}

pub const SJR2: &str = "SJR2";
pub const JIF3Y: &str = "JIF(3y)";

/// An externally supplied per-journal indicator (e.g. SNIP).
#[derive(Debug, Clone, PartialEq)]
pub struct ExternalScores {
    pub name: String,
    pub values: Vec<Option<f64>>,
}

/// Mean squared deviation from unity per level and indicator.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeviationRow {
    pub level: String,
    pub areas: usize,
    pub msd: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeviationTable {
    pub indicators: Vec<String>,
    pub excluded_general: bool,
    pub rows: Vec<DeviationRow>,
}

fn is_general_area(code: &str, level: AreaLevel, scheme: &SubjectScheme) -> bool {
    match level {
        AreaLevel::Subject => scheme.is_general(code),
        AreaLevel::Specific => scheme
            .subject_of(code)
            .is_some_and(|s| scheme.is_general(s)),
    }
}

pub fn deviations(
    tables: &[&AreaRateTable],
    scheme: &SubjectScheme,
    exclude_general: bool,
) -> DeviationTable {
    let indicators = tables
        .first()
        .map(|t| t.indicators.clone())
        .unwrap_or_default();
    let rows = tables
        .iter()
        .map(|t| {
            let keep: Vec<_> = t
                .rows
                .iter()
                .filter(|r| !(exclude_general && is_general_area(&r.code, t.level, scheme)))
                .collect();
            let msd = (0..t.indicators.len())
                .map(|k| {
                    let col: Vec<f64> = keep.iter().filter_map(|r| r.rates[k]).collect();
                    msd_unity(&col)
                })
                .collect();
            DeviationRow {
                level: t.level.to_string(),
                areas: keep.len(),
                msd,
            }
        })
        .collect();
    DeviationTable {
        indicators,
        excluded_general: exclude_general,
        rows,
    }
}

/// Precomputed per-area rates, one row per area.
#[derive(Debug, Clone, PartialEq)]
pub struct RatesInput {
    pub indicators: Vec<String>,
    /// `(area code, area name, rates)`.
    pub rows: Vec<(String, String, Vec<f64>)>,
}

/// Reads a rates table: tab- or comma-separated, header
/// `area_code[,area_name],<indicator>...`, `#` lines ignored.
pub fn parse_rates<R: Read>(mut input: R) -> Result<RatesInput, AnalyzeError> {
    let mut text = String::new();
    input
        .read_to_string(&mut text)
        .map_err(|e| AnalyzeError::RatesFile {
            line: 0,
            message: e.to_string(),
        })?;
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'));
    let (_, header) = lines.next().ok_or(AnalyzeError::RatesFile {
        line: 0,
        message: "missing header".into(),
    })?;
    let sep = if header.contains('\t') { '\t' } else { ',' };
    let cols: Vec<&str> = header.split(sep).map(str::trim).collect();
    if cols.first() != Some(&"area_code") {
        return Err(AnalyzeError::RatesFile {
            line: 1,
            message: "first column must be area_code".into(),
        });
    }
    let has_name = cols.get(1) == Some(&"area_name");
    let first_value = if has_name { 2 } else { 1 };
    let indicators: Vec<String> = cols[first_value..].iter().map(|s| s.to_string()).collect();
    let mut rows = Vec::new();
    for (k, line) in lines {
        let fields: Vec<&str> = line.split(sep).map(str::trim).collect();
        if fields.len() != cols.len() {
            return Err(AnalyzeError::RatesFile {
                line: k + 1,
                message: format!("expected {} fields, found {}", cols.len(), fields.len()),
            });
        }
        let values = fields[first_value..]
            .iter()
            .map(|f| {
                f.parse::<f64>().map_err(|_| AnalyzeError::RatesFile {
                    line: k + 1,
                    message: format!("not a number: `{f}`"),
                })
            })
            .collect::<Result<Vec<f64>, _>>()?;
        let name = if has_name {
            fields[1].to_string()
        } else {
            String::new()
        };
        rows.push((fields[0].to_string(), name, values));
    }
    Ok(RatesInput { indicators, rows })
}

impl RatesInput {
    /// Deviation from unity per indicator, optionally skipping the General area.
    pub fn deviations(&self, general_code: &str, exclude_general: bool) -> DeviationTable {
        let keep: Vec<_> = self
            .rows
            .iter()
            .filter(|(code, name, _)| {
                !(exclude_general && (code == general_code || name.eq_ignore_ascii_case("general")))
            })
            .collect();
        let msd = (0..self.indicators.len())
            .map(|k| msd_unity(&keep.iter().map(|r| r.2[k]).collect::<Vec<_>>()))
            .collect();
        DeviationTable {
            indicators: self.indicators.clone(),
            excluded_general: exclude_general,
            rows: vec![DeviationRow {
                level: "input".into(),
                areas: keep.len(),
                msd,
            }],
        }
    }
}

/// Fit of one indicator's normalised value-vs-rank curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndicatorFit {
    pub indicator: String,
    pub fit: Option<LogFit>,
    pub series: Vec<f64>,
}

/// Flow tables for one flow kind.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowReport {
    pub kind: String,
    pub matrix: FlowMatrix,
    pub within: Vec<WithinFlowTable>,
}

pub const FLOW_CITATION: &str = "citation";
pub const FLOW_SJR2_NO_COSINE: &str = "sjr2_without_cosine";
pub const FLOW_SJR2: &str = "sjr2";

/// Everything the `analyze` command reports.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub with_cosine: Sjr2Run,
    pub without_cosine: Sjr2Run,
    pub baselines: BaselineTable,
    pub indicators: Vec<(String, Vec<Option<f64>>)>,
    pub correlations: CorrelationTable,
    pub rates: Vec<AreaRateTable>,
    pub deviations: DeviationTable,
    pub fits: Vec<IndicatorFit>,
    pub flows: Vec<FlowReport>,
}

/// Runs the engine with and without the cosine and derives every table.
pub fn analyze_dataset(
    ds: &Dataset,
    p: &Params,
    external: &[ExternalScores],
    exclude_general: bool,
) -> Result<Analysis, RankError> {
    let registry = WeightingRegistry::default();
    let cocit = build_cocitation(&ds.documents, ds.num_journals(), p);
    let with_cosine = run_sjr2(ds, p, registry.get("cosine")?.as_ref(), Some(&cocit))?;
    let without_cosine = run_sjr2(ds, p, registry.get("uniform")?.as_ref(), None)?;
    let art = with_cosine.art.values();
    let baselines = compute_jif3y(&ds.documents, &with_cosine.art, p);
    let attribution = AreaAttribution::build(&ds.journals, &ds.scheme);

    let mut indicators = vec![
        (SJR2.to_string(), with_cosine.scores.values.clone()),
        (JIF3Y.to_string(), baselines.jif3y.clone()),
    ];
    let mut masses = vec![
        IndicatorMass::new(SJR2, with_cosine.prestige.values.clone()),
        IndicatorMass::new(
            JIF3Y,
            baselines.citations_3y.iter().map(|&c| c as f64).collect(),
        ),
    ];
    for ext in external {
        masses.push(IndicatorMass::from_scores(&ext.name, &ext.values, art));
        indicators.push((ext.name.clone(), ext.values.clone()));
    }

    let correlations = correlation_table(&indicators, &attribution);
    let rates: Vec<AreaRateTable> = [AreaLevel::Subject, AreaLevel::Specific]
        .into_iter()
        .map(|level| area_rates(&masses, art, &attribution, level))
        .collect();
    let deviations = deviations(
        &rates.iter().collect::<Vec<_>>(),
        &ds.scheme,
        exclude_general,
    );

    let fits = indicators
        .iter()
        .map(|(name, values)| {
            let defined: Vec<f64> = values.iter().flatten().copied().collect();
            let series = rank_normalize(&defined);
            IndicatorFit {
                indicator: name.clone(),
                fit: log_fit(&series).ok(),
                series,
            }
        })
        .collect();

    let citation_edges: Vec<EdgeFlow> = with_cosine
        .cmat
        .iter()
        .map(|(j, i, c)| (j, i, c as f64))
        .collect();
    let flows = [
        (FLOW_CITATION, citation_edges),
        (FLOW_SJR2_NO_COSINE, without_cosine.flows()),
        (FLOW_SJR2, with_cosine.flows()),
    ]
    .into_iter()
    .map(|(kind, edges)| FlowReport {
        kind: kind.to_string(),
        matrix: flow_matrix(&edges, &attribution, AreaLevel::Subject),
        within: [AreaLevel::Subject, AreaLevel::Specific]
            .into_iter()
            .map(|level| within_flows(kind, &edges, &attribution, art, level))
            .collect(),
    })
    .collect();

    Ok(Analysis {
        with_cosine,
        without_cosine,
        baselines,
        indicators,
        correlations,
        rates,
        deviations,
        fits,
        flows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rates_file_with_general_excluded() {
        let src = "area_code\tarea_name\tA\tB\n1000\tGeneral\t4.0\t3.0\n1100\tX\t0.5\t1.0\n1200\tY\t1.5\t1.0\n";
        let input = parse_rates(src.as_bytes()).unwrap();
        let d = input.deviations("1000", true);
        assert_eq!(d.rows[0].areas, 2);
        assert_eq!(d.rows[0].msd, vec![Some(0.25), Some(0.0)]);
        let d = input.deviations("1000", false);
        assert_eq!(d.rows[0].areas, 3);
    }

    #[test]
    fn rates_file_errors() {
        assert!(parse_rates("code,A\n".as_bytes()).is_err());
        assert!(matches!(
            parse_rates("area_code,A\n1100,x\n".as_bytes()),
            Err(AnalyzeError::RatesFile { line: 2, .. })
        ));
    }
}
