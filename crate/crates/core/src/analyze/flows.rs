// SPDX-License-Identifier: Apache-2.0

//! Area-level aggregation of per-edge flows (raw citations or prestige).

use serde::Serialize;

use crate::model::{AreaAttribution, AreaLevel};

/// Directed per-edge flow: `(citing, cited, amount)`.
pub type EdgeFlow = (usize, usize, f64);

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowMatrix {
    pub level: AreaLevel,
    pub codes: Vec<String>,
    /// `values[a][b]`: flow from area `a` to area `b`.
    pub values: Vec<Vec<f64>>,
    /// Flow whose sender or receiver has no area.
    pub unattributed: f64,
}

impl FlowMatrix {
    pub fn total(&self) -> f64 {
        self.values.iter().flatten().sum()
    }
}

pub fn flow_matrix(
    edges: &[EdgeFlow],
    attribution: &AreaAttribution,
    level: AreaLevel,
) -> FlowMatrix {
    let (codes, membership) = attribution.level(level);
    let mut values = vec![vec![0.0; codes.len()]; codes.len()];
    let mut unattributed = 0.0;
    for &(j, i, f) in edges {
        let (from, to) = (&membership[j], &membership[i]);
        if from.is_empty() || to.is_empty() {
            unattributed += f;
            continue;
        }
        for &(a, wa) in from {
            for &(b, wb) in to {
                values[a][b] += f * wa * wb;
            }
        }
    }
    FlowMatrix {
        level,
        codes: codes.to_vec(),
        values,
        unattributed,
    }
}

/// Percentages of a flow total that stay within the same journal, specific
/// area and subject area.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct WithinShares {
    pub self_pct: f64,
    pub specific_pct: f64,
    pub subject_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WithinFlowRow {
    pub code: String,
    /// Citable documents attributed to the area (weight for averages).
    pub art: f64,
    pub received: Option<WithinShares>,
    pub sent: Option<WithinShares>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WithinFlowTable {
    pub kind: String,
    pub level: AreaLevel,
    pub rows: Vec<WithinFlowRow>,
    /// Citable-document-weighted means over areas.
    pub avg_received: Option<WithinShares>,
    pub avg_sent: Option<WithinShares>,
}

impl WithinFlowTable {
    pub fn row(&self, code: &str) -> Option<&WithinFlowRow> {
        self.rows.iter().find(|r| r.code == code)
    }
}

/// Fraction of `x`'s membership that lies in areas `y` belongs to.
fn overlap(x: &[(usize, f64)], y: &[(usize, f64)]) -> f64 {
    let (mut a, mut b) = (0, 0);
    let mut acc = 0.0;
    while a < x.len() && b < y.len() {
        match x[a].0.cmp(&y[b].0) {
            std::cmp::Ordering::Less => a += 1,
            std::cmp::Ordering::Greater => b += 1,
            std::cmp::Ordering::Equal => {
                acc += x[a].1;
                a += 1;
                b += 1;
            }
        }
    }
    acc
}

#[derive(Clone, Copy, Default)]
struct Acc {
    total: f64,
    same_journal: f64,
    same_specific: f64,
    same_subject: f64,
}

impl Acc {
    fn add(&mut self, f: f64, same_journal: bool, specific: f64, subject: f64) {
        self.total += f;
        if same_journal {
            self.same_journal += f;
        }
        self.same_specific += f * specific;
        self.same_subject += f * subject;
    }

    fn shares(&self) -> Option<WithinShares> {
        (self.total > 0.0).then(|| WithinShares {
            self_pct: 100.0 * self.same_journal / self.total,
            specific_pct: 100.0 * self.same_specific / self.total,
            subject_pct: 100.0 * self.same_subject / self.total,
        })
    }
}

fn weighted_average<'a>(
    items: impl Iterator<Item = (f64, Option<&'a WithinShares>)>,
) -> Option<WithinShares> {
    let mut w_total = 0.0;
    let mut acc = WithinShares::default();
    for (w, s) in items {
        if let Some(s) = s {
            w_total += w;
            acc.self_pct += w * s.self_pct;
            acc.specific_pct += w * s.specific_pct;
            acc.subject_pct += w * s.subject_pct;
        }
    }
    (w_total > 0.0).then(|| WithinShares {
        self_pct: acc.self_pct / w_total,
        specific_pct: acc.specific_pct / w_total,
        subject_pct: acc.subject_pct / w_total,
    })
}

/// Per-area shares of received and sent flow that stay inside the journal,
/// its specific areas, and its subject areas.
///
/// For a received edge `j → i` the "same area" weight is the fraction of
/// `j`'s membership inside `i`'s areas; each area's totals use the fractional
/// membership of the receiving (or, for sent flow, the sending) journal.
pub fn within_flows(
    kind: &str,
    edges: &[EdgeFlow],
    attribution: &AreaAttribution,
    art: &[u64],
    level: AreaLevel,
) -> WithinFlowTable {
    let (codes, membership) = attribution.level(level);
    let mut received = vec![Acc::default(); codes.len()];
    let mut sent = vec![Acc::default(); codes.len()];
    for &(j, i, f) in edges {
        let same = i == j;
        let spec_in = overlap(&attribution.specific[j], &attribution.specific[i]);
        let subj_in = overlap(&attribution.subject[j], &attribution.subject[i]);
        for &(b, w) in &membership[i] {
            received[b].add(w * f, same, spec_in, subj_in);
        }
        let spec_out = overlap(&attribution.specific[i], &attribution.specific[j]);
        let subj_out = overlap(&attribution.subject[i], &attribution.subject[j]);
        for &(a, w) in &membership[j] {
            sent[a].add(w * f, same, spec_out, subj_out);
        }
    }
    let mut area_art = vec![0.0; codes.len()];
    for (i, m) in membership.iter().enumerate() {
        for &(a, w) in m {
            area_art[a] += w * art[i] as f64;
        }
    }
    let rows: Vec<WithinFlowRow> = codes
        .iter()
        .enumerate()
        .map(|(a, code)| WithinFlowRow {
            code: code.clone(),
            art: area_art[a],
            received: received[a].shares(),
            sent: sent[a].shares(),
        })
        .collect();
    let avg_received = weighted_average(rows.iter().map(|r| (r.art, r.received.as_ref())));
    let avg_sent = weighted_average(rows.iter().map(|r| (r.art, r.sent.as_ref())));
    WithinFlowTable {
        kind: kind.to_string(),
        level,
        rows,
        avg_received,
        avg_sent,
    }
}
