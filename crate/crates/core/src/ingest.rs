// SPDX-License-Identifier: Apache-2.0

//! Readers and writers for the three input files, plus the windowed
//! aggregates (citation matrix, citable-document vector) built from them.
//!
//! * journals: CSV `id,title,specific_areas,citable_by_year,ranked`
//! * citations: JSON Lines `{"src":..,"year":..,"refs":[{"j":..,"y":..,"n":..}]}`
//! * scheme: CSV `specific_code,subject_code,subject_name`

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use crate::model::{CitingDocument, Ref};
use crate::model::{
    Dataset, IdRole, Journal, JournalId, JournalTable, ModelError, Params, SubjectScheme, UnknownId,
};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("io error: {0}")]
    Io(#[from] io::Error),
    #[error("journals file line {line}: {message}")]
    MalformedJournal { line: u64, message: String },
    #[error("duplicate journal id `{0}`")]
    DuplicateId(String),
    #[error("scheme file line {line}: {message}")]
    MalformedScheme { line: u64, message: String },
    #[error("citations record {record}: {message}")]
    MalformedRecord { record: usize, message: String },
    #[error("no citable documents in window")]
    NoCitableDocuments,
}

const JOURNAL_HEADER: [&str; 5] = ["id", "title", "specific_areas", "citable_by_year", "ranked"];

fn csv_reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(input)
}

/// Parses the journals CSV.
pub fn parse_journals<R: Read>(input: R) -> Result<JournalTable, IngestError> {
    let mut rdr = csv_reader(input);
    let header_line = rdr.position().line();
    let headers = rdr.headers().map_err(|e| IngestError::MalformedJournal {
        line: header_line.max(1),
        message: e.to_string(),
    })?;
    if !headers.is_empty() && headers.iter().ne(JOURNAL_HEADER.iter().copied()) {
        return Err(IngestError::MalformedJournal {
            line: 1,
            message: format!("expected header `{}`", JOURNAL_HEADER.join(",")),
        });
    }
    let mut table = JournalTable::new();
    let mut record = csv::StringRecord::new();
    loop {
        let line = rdr.position().line();
        let more = rdr
            .read_record(&mut record)
            .map_err(|e| IngestError::MalformedJournal {
                line: e.position().map_or(line, |p| p.line()),
                message: e.to_string(),
            })?;
        if !more {
            break;
        }
        let line = record.position().map_or(line, |p| p.line());
        let journal = journal_from_record(&record)
            .map_err(|message| IngestError::MalformedJournal { line, message })?;
        table.push(journal).map_err(|e| match e {
            ModelError::DuplicateId(id) => IngestError::DuplicateId(id.to_string()),
            other => IngestError::MalformedJournal {
                line,
                message: other.to_string(),
            },
        })?;
    }
    Ok(table)
}

fn journal_from_record(rec: &csv::StringRecord) -> Result<Journal, String> {
    if rec.len() != 5 {
        return Err(format!("expected 5 fields, found {}", rec.len()));
    }
    let id = JournalId::new(&rec[0]).map_err(|e| e.to_string())?;
    let specific_areas: BTreeSet<String> = rec[2]
        .split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect();
    let mut citable_docs_by_year = BTreeMap::new();
    for item in rec[3].split(';').map(str::trim).filter(|s| !s.is_empty()) {
        let (y, c) = item
            .split_once(':')
            .ok_or_else(|| format!("bad year:count item `{item}`"))?;
        let y: i32 = y.trim().parse().map_err(|_| format!("bad year `{y}`"))?;
        let c: u64 = c
            .trim()
            .parse()
            .map_err(|_| format!("bad citable count `{c}` (must be a non-negative integer)"))?;
        if citable_docs_by_year.insert(y, c).is_some() {
            return Err(format!("year {y} listed twice"));
        }
    }
    let ranked = match &rec[4] {
        "true" => true,
        "false" => false,
        other => return Err(format!("ranked must be true|false, got `{other}`")),
    };
    if ranked && specific_areas.is_empty() {
        return Err(ModelError::RankedWithoutAreas(id).to_string());
    }
    Ok(Journal {
        id,
        title: rec[1].to_string(),
        specific_areas,
        citable_docs_by_year,
        ranked,
    })
}

pub fn write_journals<W: Write>(out: W, table: &JournalTable) -> Result<(), IngestError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(JOURNAL_HEADER).map_err(csv_io)?;
    for j in table {
        let areas = j
            .specific_areas
            .iter()
            .cloned()
            .collect::<Vec<_>>()
            .join(";");
        let counts = j
            .citable_docs_by_year
            .iter()
            .map(|(y, c)| format!("{y}:{c}"))
            .collect::<Vec<_>>()
            .join(";");
        w.write_record([
            j.id.as_str(),
            &j.title,
            &areas,
            &counts,
            if j.ranked { "true" } else { "false" },
        ])
        .map_err(csv_io)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_io(e: csv::Error) -> IngestError {
    IngestError::Io(io::Error::other(e))
}

/// Parses the subject scheme CSV. The General code (`1000`) is always present.
pub fn parse_scheme<R: Read>(input: R) -> Result<SubjectScheme, IngestError> {
    let mut rdr = csv_reader(input);
    let mut scheme = SubjectScheme::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| IngestError::MalformedScheme {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != 3 {
            return Err(IngestError::MalformedScheme {
                line,
                message: format!("expected 3 fields, found {}", rec.len()),
            });
        }
        if rec[0].is_empty() || rec[1].is_empty() {
            return Err(IngestError::MalformedScheme {
                line,
                message: "empty code".into(),
            });
        }
        scheme
            .insert(&rec[0], &rec[1], &rec[2])
            .map_err(|e| IngestError::MalformedScheme {
                line,
                message: e.to_string(),
            })?;
    }
    Ok(scheme)
}

pub fn write_scheme<W: Write>(out: W, scheme: &SubjectScheme) -> Result<(), IngestError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["specific_code", "subject_code", "subject_name"])
        .map_err(csv_io)?;
    for (spec, subj) in scheme.specifics() {
        w.write_record([spec, subj, scheme.subject_name(subj).unwrap_or("")])
            .map_err(csv_io)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Deserialize, Serialize)]
struct RawDoc<'a> {
    #[serde(borrow)]
    src: std::borrow::Cow<'a, str>,
    year: i32,
    #[serde(borrow, default)]
    refs: Vec<RawRef<'a>>,
}

#[derive(Deserialize, Serialize)]
struct RawRef<'a> {
    #[serde(borrow)]
    j: std::borrow::Cow<'a, str>,
    y: i32,
    n: u32,
}

/// Documents and the identifiers that could not be resolved.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParsedCitations {
    pub documents: Vec<CitingDocument>,
    pub unknown_ids: Vec<UnknownId>,
}

/// Streams the citations JSONL. Documents from unknown sources and refs to
/// unknown journals are dropped and recorded.
pub fn parse_citations<R: BufRead>(
    mut input: R,
    table: &JournalTable,
) -> Result<ParsedCitations, IngestError> {
    let mut out = ParsedCitations::default();
    let mut line = String::new();
    let mut record = 0usize;
    loop {
        line.clear();
        if input.read_line(&mut line)? == 0 {
            break;
        }
        record += 1;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        let raw: RawDoc = serde_json::from_str(text).map_err(|e| IngestError::MalformedRecord {
            record,
            message: e.to_string(),
        })?;
        let Some(source) = table.index_of(&raw.src) else {
            out.unknown_ids.push(UnknownId {
                record,
                id: raw.src.into_owned(),
                role: IdRole::Source,
            });
            continue;
        };
        let mut refs = Vec::with_capacity(raw.refs.len());
        for r in raw.refs {
            if r.n == 0 {
                return Err(IngestError::MalformedRecord {
                    record,
                    message: "reference count n must be >= 1".into(),
                });
            }
            match table.index_of(&r.j) {
                Some(cited) => refs.push(Ref {
                    cited,
                    year: r.y,
                    n: r.n,
                }),
                None => out.unknown_ids.push(UnknownId {
                    record,
                    id: r.j.into_owned(),
                    role: IdRole::Cited,
                }),
            }
        }
        out.documents.push(CitingDocument {
            source,
            year: raw.year,
            refs,
        });
    }
    Ok(out)
}

pub fn write_citations<W: Write>(
    mut out: W,
    docs: &[CitingDocument],
    table: &JournalTable,
) -> Result<(), IngestError> {
    let id = |k: u32| table.get(k).map(|j| j.id.as_str()).unwrap_or("");
    for doc in docs {
        let raw = RawDoc {
            src: id(doc.source).into(),
            year: doc.year,
            refs: doc
                .refs
                .iter()
                .map(|r| RawRef {
                    j: id(r.cited).into(),
                    y: r.year,
                    n: r.n,
                })
                .collect(),
        };
        serde_json::to_writer(&mut out, &raw).map_err(|e| IngestError::Io(e.into()))?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// Reads the three files into a [`Dataset`]. Without a scheme file, codes
/// are grouped by their two-digit prefix.
pub fn load_dataset(
    journals: &Path,
    citations: &Path,
    scheme: Option<&Path>,
) -> Result<Dataset, IngestError> {
    let table = parse_journals(BufReader::new(File::open(journals)?))?;
    let parsed = parse_citations(BufReader::new(File::open(citations)?), &table)?;
    let scheme = match scheme {
        Some(p) => parse_scheme(BufReader::new(File::open(p)?))?,
        None => SubjectScheme::from_code_prefixes(
            table
                .iter()
                .flat_map(|j| j.specific_areas.iter().map(String::as_str)),
        ),
    };
    Ok(Dataset {
        journals: table,
        documents: parsed.documents,
        scheme,
        unknown_ids: parsed.unknown_ids,
    })
}

/// Sparse `J×J` reference counts in compressed-row form; row = citing journal.
#[derive(Debug, Clone, PartialEq)]
pub struct CitationMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    counts: Vec<u64>,
}

impl CitationMatrix {
    /// Builds from `(citing, cited, count)` triples; duplicates are summed.
    pub fn from_triples(n: usize, mut triples: Vec<(u32, u32, u64)>) -> Self {
        triples.par_sort_unstable_by_key(|&(j, i, _)| (j, i));
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::with_capacity(triples.len());
        let mut counts: Vec<u64> = Vec::with_capacity(triples.len());
        let mut last: Option<(u32, u32)> = None;
        for (j, i, c) in triples {
            if c == 0 {
                continue;
            }
            if last == Some((j, i)) {
                *counts.last_mut().unwrap() += c;
            } else {
                cols.push(i);
                counts.push(c);
                row_ptr[j as usize + 1] += 1;
                last = Some((j, i));
            }
        }
        for k in 0..n {
            row_ptr[k + 1] += row_ptr[k];
        }
        Self {
            n,
            row_ptr,
            cols,
            counts,
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self::from_triples(n, Vec::new())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    /// Offsets into the flat entry arrays for row `j`.
    pub fn row_range(&self, j: usize) -> std::ops::Range<usize> {
        self.row_ptr[j]..self.row_ptr[j + 1]
    }

    pub fn row(&self, j: usize) -> (&[u32], &[u64]) {
        let r = self.row_range(j);
        (&self.cols[r.clone()], &self.counts[r])
    }

    pub fn cols(&self) -> &[u32] {
        &self.cols
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn get(&self, j: usize, i: usize) -> u64 {
        let (cols, counts) = self.row(j);
        cols.binary_search(&(i as u32))
            .map(|k| counts[k])
            .unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// `(citing, cited, count)` in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        (0..self.n).flat_map(move |j| {
            self.row_range(j)
                .map(move |k| (j, self.cols[k] as usize, self.counts[k]))
        })
    }

    /// Column sums: references each journal receives through the matrix.
    pub fn received(&self) -> Vec<u64> {
        let mut out = vec![0u64; self.n];
        for (&i, &c) in self.cols.iter().zip(&self.counts) {
            out[i as usize] += c;
        }
        out
    }
}

/// `C_ji` = windowed references from ranked journal `j`'s year-`Y` documents
/// to journal `i`.
pub fn build_citation_matrix(
    docs: &[CitingDocument],
    table: &JournalTable,
    p: &Params,
) -> CitationMatrix {
    let n = table.len();
    let triples: Vec<(u32, u32, u64)> = docs
        .par_iter()
        .filter(|d| d.year == p.year && table.get(d.source).is_some_and(|j| j.ranked))
        .flat_map_iter(|d| {
            d.refs
                .iter()
                .filter(|r| p.in_window(r.year) && (r.cited as usize) < n)
                .map(move |r| (d.source, r.cited, r.n as u64))
        })
        .collect();
    CitationMatrix::from_triples(n, triples)
}

/// Citable documents per journal in the window.
#[derive(Debug, Clone, PartialEq)]
pub struct ArtVector {
    values: Vec<u64>,
    total: u64,
}

impl ArtVector {
    pub fn from_counts(values: Vec<u64>) -> Result<Self, IngestError> {
        let total = values.iter().sum();
        if total == 0 {
            return Err(IngestError::NoCitableDocuments);
        }
        Ok(Self { values, total })
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn get(&self, i: usize) -> u64 {
        self.values[i]
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `Art_i / ΣArt`.
    pub fn share(&self, i: usize) -> f64 {
        self.values[i] as f64 / self.total as f64
    }
}

pub fn build_art_vector(table: &JournalTable, p: &Params) -> Result<ArtVector, IngestError> {
    ArtVector::from_counts(table.iter().map(|j| j.art(p.year, p.window)).collect())
}
