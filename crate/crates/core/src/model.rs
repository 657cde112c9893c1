// SPDX-License-Identifier: Apache-2.0

//! Domain types shared by every stage of the pipeline.
//!
//! Journals are addressed by their position in the [`JournalTable`]
//! (a dense `u32` index) once ingest has resolved identifiers, so the
//! numeric kernels never touch strings.

use std::borrow::Borrow;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Opaque, stable journal identifier.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct JournalId(String);

impl JournalId {
    pub fn new(id: impl Into<String>) -> Result<Self, ModelError> {
        let id = id.into();
        if id.trim().is_empty() {
            return Err(ModelError::EmptyId);
        }
        Ok(Self(id))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for JournalId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Borrow<str> for JournalId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("journal id must not be empty")]
    EmptyId,
    #[error("duplicate journal id `{0}`")]
    DuplicateId(JournalId),
    #[error("negative citable-document count for {id} in {year}")]
    NegativeCount { id: JournalId, year: i32 },
    #[error("ranked journal {0} has no specific areas")]
    RankedWithoutAreas(JournalId),
    #[error("specific area `{code}` has no parent subject area")]
    UnmappedArea { code: String },
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Journal {
    pub id: JournalId,
    pub title: String,
    pub specific_areas: BTreeSet<String>,
    pub citable_docs_by_year: BTreeMap<i32, u64>,
    /// Eligible to emit prestige (its references enter the citation matrix).
    pub ranked: bool,
}

impl Journal {
    /// Citable documents published in `[year - window, year - 1]`.
    pub fn art(&self, year: i32, window: u32) -> u64 {
        let lo = year - window as i32;
        self.citable_docs_by_year
            .range(lo..year)
            .map(|(_, &c)| c)
            .sum()
    }

    /// Subject areas the journal belongs to under `scheme`.
    pub fn areas<'a>(&self, scheme: &'a SubjectScheme) -> BTreeSet<&'a str> {
        self.specific_areas
            .iter()
            .filter_map(|s| scheme.subject_of(s))
            .collect()
    }
}

/// Journal table with an id index. Order of insertion fixes the dense index.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct JournalTable {
    journals: Vec<Journal>,
    index: HashMap<JournalId, u32>,
}

impl JournalTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, journal: Journal) -> Result<u32, ModelError> {
        if self.index.contains_key(&journal.id) {
            return Err(ModelError::DuplicateId(journal.id));
        }
        let idx = self.journals.len() as u32;
        self.index.insert(journal.id.clone(), idx);
        self.journals.push(journal);
        Ok(idx)
    }

    pub fn index_of(&self, id: &str) -> Option<u32> {
        self.index.get(id).copied()
    }

    pub fn get(&self, idx: u32) -> Option<&Journal> {
        self.journals.get(idx as usize)
    }

    pub fn len(&self) -> usize {
        self.journals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.journals.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Journal> {
        self.journals.iter()
    }

    pub fn as_slice(&self) -> &[Journal] {
        &self.journals
    }
}

impl<'a> IntoIterator for &'a JournalTable {
    type Item = &'a Journal;
    type IntoIter = std::slice::Iter<'a, Journal>;

    fn into_iter(self) -> Self::IntoIter {
        self.journals.iter()
    }
}

/// Two-level classification: specific areas grouped into subject areas.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubjectScheme {
    parents: BTreeMap<String, String>,
    subject_names: BTreeMap<String, String>,
    general: String,
}

pub const GENERAL_CODE: &str = "1000";

impl Default for SubjectScheme {
    fn default() -> Self {
        let mut subject_names = BTreeMap::new();
        subject_names.insert(GENERAL_CODE.to_string(), "General".to_string());
        Self {
            parents: BTreeMap::new(),
            subject_names,
            general: GENERAL_CODE.to_string(),
        }
    }
}

impl SubjectScheme {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers `specific` under `subject`. A repeated specific code with a
    /// different parent is an error.
    pub fn insert(
        &mut self,
        specific: &str,
        subject: &str,
        subject_name: &str,
    ) -> Result<(), ModelError> {
        if let Some(prev) = self.parents.get(specific) {
            if prev != subject {
                return Err(ModelError::UnmappedArea {
                    code: specific.to_string(),
                });
            }
        }
        self.parents
            .insert(specific.to_string(), subject.to_string());
        let name = self.subject_names.entry(subject.to_string()).or_default();
        if name.is_empty() {
            *name = subject_name.to_string();
        }
        Ok(())
    }

    /// Scheme for four-digit codes where `XXYY` belongs to `XX00`.
    pub fn from_code_prefixes<'a>(codes: impl IntoIterator<Item = &'a str>) -> Self {
        let mut scheme = Self::new();
        for code in codes {
            let subject = default_parent(code);
            scheme
                .insert(code, &subject, "")
                .expect("prefix parent is a function of the code");
        }
        scheme
    }

    pub fn subject_of(&self, specific: &str) -> Option<&str> {
        self.parents.get(specific).map(String::as_str)
    }

    pub fn subject_name(&self, subject: &str) -> Option<&str> {
        self.subject_names
            .get(subject)
            .map(String::as_str)
            .filter(|n| !n.is_empty())
    }

    pub fn general(&self) -> &str {
        &self.general
    }

    pub fn is_general(&self, subject: &str) -> bool {
        subject == self.general
    }

    pub fn subjects(&self) -> impl Iterator<Item = &str> {
        self.subject_names.keys().map(String::as_str)
    }

    pub fn specifics(&self) -> impl Iterator<Item = (&str, &str)> {
        self.parents.iter().map(|(s, p)| (s.as_str(), p.as_str()))
    }
}

/// `XXYY` → `XX00`; anything else is its own parent.
pub fn default_parent(code: &str) -> String {
    if code.len() == 4 && code.bytes().all(|b| b.is_ascii_digit()) {
        format!("{}00", &code[..2])
    } else {
        code.to_string()
    }
}

/// Computation parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub d: f64,
    pub e: f64,
    pub year: i32,
    pub window: u32,
    pub cap_share: f64,
    pub cap_per_citation: f64,
    pub use_cosine: bool,
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            d: 0.9,
            e: 0.0999,
            year: 2008,
            window: 3,
            cap_share: 0.5,
            cap_per_citation: 0.1,
            use_cosine: true,
            tol: 1e-10,
            max_iters: 200,
        }
    }
}

impl Params {
    pub fn for_year(year: i32) -> Self {
        Self {
            year,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |m: &str| Err(ModelError::InvalidParams(m.to_string()));
        if !(self.d > 0.0 && self.d < 1.0) {
            return bad("d must lie in (0, 1)");
        }
        if !(self.e > 0.0 && self.e < 1.0) {
            return bad("e must lie in (0, 1)");
        }
        if self.d + self.e >= 1.0 {
            return bad("d + e must be < 1");
        }
        if self.window < 1 {
            return bad("window must be >= 1");
        }
        if !(self.cap_share > 0.0 && self.cap_share <= 1.0) {
            return bad("cap_share must lie in (0, 1]");
        }
        if self.cap_per_citation.is_nan() || self.cap_per_citation <= 0.0 {
            return bad("cap_per_citation must be > 0");
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return bad("tol must be > 0");
        }
        if self.max_iters == 0 {
            return bad("max_iters must be >= 1");
        }
        Ok(())
    }

    /// First year of the citation window.
    pub fn window_start(&self) -> i32 {
        self.year - self.window as i32
    }

    pub fn in_window(&self, cited_year: i32) -> bool {
        cited_year >= self.window_start() && cited_year < self.year
    }

    /// Registry name of the edge weighting implied by `use_cosine`.
    pub fn weighting_name(&self) -> &'static str {
        if self.use_cosine {
            "cosine"
        } else {
            "uniform"
        }
    }
}

/// One reference group inside a citing document.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ref {
    pub cited: u32,
    pub year: i32,
    pub n: u32,
}

/// A year-`year` document of journal `source` with its in-database references.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CitingDocument {
    pub source: u32,
    pub year: i32,
    pub refs: Vec<Ref>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IdRole {
    Source,
    Cited,
}

/// A reference to a journal id not present in the table, dropped at ingest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnknownId {
    /// 1-based record (line) number in the citations stream.
    pub record: usize,
    pub id: String,
    pub role: IdRole,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Dataset {
    pub journals: JournalTable,
    pub documents: Vec<CitingDocument>,
    pub scheme: SubjectScheme,
    /// Identifiers dropped while parsing the citation stream.
    pub unknown_ids: Vec<UnknownId>,
}

impl Dataset {
    pub fn num_journals(&self) -> usize {
        self.journals.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum FatalFlag {
    NoJournals,
    NoCitableDocuments,
    InvalidParams(String),
}

impl fmt::Display for FatalFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FatalFlag::NoJournals => f.write_str("no journals"),
            FatalFlag::NoCitableDocuments => f.write_str("no citable documents in window"),
            FatalFlag::InvalidParams(m) => write!(f, "invalid parameters: {m}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub journals: usize,
    pub documents: usize,
    pub unknown_ids: Vec<UnknownId>,
    pub documents_out_of_year: usize,
    pub refs_out_of_window: usize,
    pub zero_art_journals: Vec<JournalId>,
    pub dangling_ranked: usize,
    pub ranked_without_areas: Vec<JournalId>,
    pub unmapped_areas: Vec<String>,
    pub fatal: Vec<FatalFlag>,
}

impl ValidationReport {
    pub fn is_fatal(&self) -> bool {
        !self.fatal.is_empty()
    }
}

/// Inspects a dataset against `p` without modifying it.
pub fn validate_dataset(ds: &Dataset, p: &Params) -> ValidationReport {
    let n = ds.journals.len();
    let mut report = ValidationReport {
        journals: n,
        documents: ds.documents.len(),
        unknown_ids: ds.unknown_ids.clone(),
        ..Default::default()
    };
    if let Err(ModelError::InvalidParams(m)) = p.validate() {
        report.fatal.push(FatalFlag::InvalidParams(m));
    }
    if n == 0 {
        report.fatal.push(FatalFlag::NoJournals);
    }

    let mut emits = vec![false; n];
    for (k, doc) in ds.documents.iter().enumerate() {
        if doc.source as usize >= n {
            report.unknown_ids.push(UnknownId {
                record: k + 1,
                id: format!("#{}", doc.source),
                role: IdRole::Source,
            });
            continue;
        }
        if doc.year != p.year {
            report.documents_out_of_year += 1;
            continue;
        }
        for r in &doc.refs {
            if r.cited as usize >= n {
                report.unknown_ids.push(UnknownId {
                    record: k + 1,
                    id: format!("#{}", r.cited),
                    role: IdRole::Cited,
                });
            } else if !p.in_window(r.year) {
                report.refs_out_of_window += 1;
            } else {
                emits[doc.source as usize] = true;
            }
        }
    }

    let mut total_art = 0u64;
    let mut unmapped = BTreeSet::new();
    for (k, j) in ds.journals.iter().enumerate() {
        let art = j.art(p.year, p.window);
        total_art += art;
        if art == 0 {
            report.zero_art_journals.push(j.id.clone());
        }
        if j.ranked {
            if !emits[k] {
                report.dangling_ranked += 1;
            }
            if j.specific_areas.is_empty() {
                report.ranked_without_areas.push(j.id.clone());
            }
        }
        for code in &j.specific_areas {
            if ds.scheme.subject_of(code).is_none() {
                unmapped.insert(code.clone());
            }
        }
    }
    report.unmapped_areas = unmapped.into_iter().collect();
    if n > 0 && total_art == 0 {
        report.fatal.push(FatalFlag::NoCitableDocuments);
    }
    report
}

/// `(area index, weight)` pairs, sorted by index.
pub type AreaWeights = Vec<(usize, f64)>;

/// Fractional membership of every journal in specific and subject areas.
///
/// A journal with `k` specific areas gives weight `1/k` to each; its subject
/// weights are the sums of its specific weights per parent, so membership
/// nests.
#[derive(Debug, Clone)]
pub struct AreaAttribution {
    pub specific_codes: Vec<String>,
    pub subject_codes: Vec<String>,
    /// Per journal, specific-area weights.
    pub specific: Vec<AreaWeights>,
    /// Per journal, subject-area weights.
    pub subject: Vec<AreaWeights>,
    /// Parent subject index for each specific area.
    pub parent: Vec<usize>,
}

impl AreaAttribution {
    pub fn build(table: &JournalTable, scheme: &SubjectScheme) -> Self {
        let mut spec_set = BTreeSet::new();
        for j in table {
            for code in &j.specific_areas {
                if scheme.subject_of(code).is_some() {
                    spec_set.insert(code.as_str());
                }
            }
        }
        let specific_codes: Vec<String> = spec_set.iter().map(|s| s.to_string()).collect();
        let subj_set: BTreeSet<&str> = spec_set
            .iter()
            .filter_map(|s| scheme.subject_of(s))
            .collect();
        let subject_codes: Vec<String> = subj_set.iter().map(|s| s.to_string()).collect();
        let spec_pos: HashMap<&str, usize> = specific_codes
            .iter()
            .enumerate()
            .map(|(k, s)| (s.as_str(), k))
            .collect();
        let subj_pos: HashMap<&str, usize> = subject_codes
            .iter()
            .enumerate()
            .map(|(k, s)| (s.as_str(), k))
            .collect();
        let parent = specific_codes
            .iter()
            .map(|s| subj_pos[scheme.subject_of(s).expect("filtered above")])
            .collect();

        let mut specific = Vec::with_capacity(table.len());
        let mut subject = Vec::with_capacity(table.len());
        for j in table {
            let codes: Vec<&str> = j
                .specific_areas
                .iter()
                .map(String::as_str)
                .filter(|c| spec_pos.contains_key(c))
                .collect();
            if codes.is_empty() {
                specific.push(Vec::new());
                subject.push(Vec::new());
                continue;
            }
            let w = 1.0 / codes.len() as f64;
            let mut sp: Vec<(usize, f64)> = codes.iter().map(|c| (spec_pos[c], w)).collect();
            sp.sort_by_key(|&(k, _)| k);
            let mut sb: BTreeMap<usize, f64> = BTreeMap::new();
            for c in &codes {
                *sb.entry(subj_pos[scheme.subject_of(c).unwrap()])
                    .or_default() += w;
            }
            specific.push(sp);
            subject.push(sb.into_iter().collect());
        }
        Self {
            specific_codes,
            subject_codes,
            specific,
            subject,
            parent,
        }
    }

    pub fn level(&self, level: AreaLevel) -> (&[String], &[AreaWeights]) {
        match level {
            AreaLevel::Subject => (&self.subject_codes, &self.subject),
            AreaLevel::Specific => (&self.specific_codes, &self.specific),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AreaLevel {
    Subject,
    Specific,
}

impl fmt::Display for AreaLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AreaLevel::Subject => f.write_str("subject"),
            AreaLevel::Specific => f.write_str("specific"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn journal(id: &str, areas: &[&str], counts: &[(i32, u64)], ranked: bool) -> Journal {
        Journal {
            id: JournalId::new(id).unwrap(),
            title: id.to_string(),
            specific_areas: areas.iter().map(|s| s.to_string()).collect(),
            citable_docs_by_year: counts.iter().copied().collect(),
            ranked,
        }
    }

    fn three_journal_dataset() -> Dataset {
        let mut table = JournalTable::new();
        table
            .push(journal("A", &["1301"], &[(2006, 10)], true))
            .unwrap();
        table
            .push(journal("B", &["1301"], &[(2007, 10)], true))
            .unwrap();
        table
            .push(journal("C", &["2002"], &[(2005, 10)], true))
            .unwrap();
        let docs = vec![
            CitingDocument {
                source: 0,
                year: 2008,
                refs: vec![Ref {
                    cited: 1,
                    year: 2006,
                    n: 1,
                }],
            },
            CitingDocument {
                source: 1,
                year: 2008,
                refs: vec![Ref {
                    cited: 0,
                    year: 2007,
                    n: 2,
                }],
            },
            // C only cites outside the window: dangling.
            CitingDocument {
                source: 2,
                year: 2008,
                refs: vec![Ref {
                    cited: 0,
                    year: 2001,
                    n: 1,
                }],
            },
        ];
        Dataset {
            scheme: SubjectScheme::from_code_prefixes(["1301", "2002"]),
            journals: table,
            documents: docs,
            unknown_ids: vec![],
        }
    }

    #[test]
    fn art_window_excludes_publication_year() {
        let j = journal("J1", &["1300"], &[(2005, 40), (2006, 50), (2007, 30)], true);
        assert_eq!(j.art(2008, 3), 120);
        let j = journal("J2", &["1300"], &[(2008, 99)], true);
        assert_eq!(j.art(2008, 3), 0);
    }

    #[test]
    fn default_params_are_valid() {
        Params::default().validate().unwrap();
        let p = Params {
            d: 0.95,
            e: 0.1,
            ..Params::default()
        };
        assert!(p.validate().is_err());
        let p = Params {
            window: 0,
            ..Params::default()
        };
        assert!(p.validate().is_err());
    }

    #[test]
    fn duplicate_ids_rejected() {
        let mut t = JournalTable::new();
        t.push(journal("J1", &[], &[], false)).unwrap();
        let err = t.push(journal("J1", &[], &[], false)).unwrap_err();
        assert_eq!(err, ModelError::DuplicateId(JournalId::new("J1").unwrap()));
    }

    #[test]
    fn empty_dataset_is_fatal() {
        let report = validate_dataset(&Dataset::default(), &Params::default());
        assert_eq!(report.fatal, vec![FatalFlag::NoJournals]);
        assert_eq!(report.documents, 0);
        assert_eq!(report.dangling_ranked, 0);
        assert!(report.unknown_ids.is_empty());
    }

    #[test]
    fn dangling_count_on_fixture() {
        let ds = three_journal_dataset();
        let before = ds.clone();
        let report = validate_dataset(&ds, &Params::default());
        assert_eq!(report.dangling_ranked, 1);
        assert_eq!(report.refs_out_of_window, 1);
        assert!(!report.is_fatal());
        assert_eq!(ds, before);
        assert_eq!(report, validate_dataset(&ds, &Params::default()));
    }

    #[test]
    fn unknown_ids_are_reported() {
        let mut ds = three_journal_dataset();
        ds.unknown_ids.push(UnknownId {
            record: 1,
            id: "X".into(),
            role: IdRole::Cited,
        });
        let report = validate_dataset(&ds, &Params::default());
        assert_eq!(report.unknown_ids.len(), 1);
        assert_eq!(report.unknown_ids[0].id, "X");
    }

    #[test]
    fn attribution_nests_subject_over_specific() {
        let mut t = JournalTable::new();
        t.push(journal("A", &["1301", "1302", "2001"], &[], true))
            .unwrap();
        let scheme = SubjectScheme::from_code_prefixes(["1301", "1302", "2001"]);
        let attr = AreaAttribution::build(&t, &scheme);
        assert_eq!(attr.subject_codes, vec!["1300", "2000"]);
        let subj = &attr.subject[0];
        assert!((subj[0].1 - 2.0 / 3.0).abs() < 1e-15);
        assert!((subj[1].1 - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(attr.specific[0].len(), 3);
    }
}
