// SPDX-License-Identifier: Apache-2.0

//! Journal cocitation counts and cosines between cocitation profiles.
//!
//! `Cocit_ih` counts the year-`Y` documents whose in-window references
//! include both `i` and `h`; a document contributes at most 1 per pair. The
//! diagonal is never stored. The cosine between `i` and `j` drops the two
//! components `i` and `j` from both profiles, and all sums are carried out in
//! exact integer arithmetic, so `cosine(i, j)` and `cosine(j, i)` agree bit
//! for bit.

use rayon::prelude::*;
use thiserror::Error;

use crate::ingest::CitationMatrix;
use crate::model::{CitingDocument, Params};

#[derive(Debug, Error, PartialEq)]
pub enum CociteError {
    #[error("cosine requires two distinct journals, got {0} twice")]
    SameJournal(usize),
    #[error("journal index {0} out of range")]
    OutOfRange(usize),
}

/// Symmetric sparse cocitation matrix without diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct CocitationMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    counts: Vec<u32>,
    sq_norms: Vec<u64>,
}

impl CocitationMatrix {
    /// Builds from upper-triangle pair keys `(a << 32) | b`, `a < b`, one key
    /// per co-occurrence.
    fn from_pair_keys(n: usize, mut keys: Vec<u64>) -> Self {
        keys.par_sort_unstable();
        // Run-length encode into (a, b, count).
        let mut pairs: Vec<(u32, u32, u32)> = Vec::new();
        let mut degree = vec![0usize; n + 1];
        let mut k = 0;
        while k < keys.len() {
            let key = keys[k];
            let mut run = 1;
            while k + run < keys.len() && keys[k + run] == key {
                run += 1;
            }
            let (a, b) = ((key >> 32) as u32, key as u32);
            pairs.push((a, b, run as u32));
            degree[a as usize + 1] += 1;
            degree[b as usize + 1] += 1;
            k += run;
        }
        drop(keys);
        for k in 0..n {
            degree[k + 1] += degree[k];
        }
        let row_ptr = degree;
        let nnz = row_ptr[n];
        let mut cols = vec![0u32; nnz];
        let mut counts = vec![0u32; nnz];
        let mut fill = row_ptr.clone();
        // Pairs are sorted by (a, b); filling both halves in that order keeps
        // every row sorted by column.
        for &(a, b, c) in &pairs {
            let (a, b) = (a as usize, b as usize);
            cols[fill[a]] = b as u32;
            counts[fill[a]] = c;
            fill[a] += 1;
            cols[fill[b]] = a as u32;
            counts[fill[b]] = c;
            fill[b] += 1;
        }
        let sq_norms = (0..n)
            .map(|i| {
                counts[row_ptr[i]..row_ptr[i + 1]]
                    .iter()
                    .map(|&c| c as u64 * c as u64)
                    .sum()
            })
            .collect();
        Self {
            n,
            row_ptr,
            cols,
            counts,
            sq_norms,
        }
    }

    /// From explicit symmetric entries `(i, h, count)` with `i != h`; each
    /// unordered pair given once.
    pub fn from_pairs(n: usize, pairs: &[(usize, usize, u32)]) -> Self {
        let mut keys = Vec::new();
        for &(i, h, c) in pairs {
            assert_ne!(i, h, "diagonal cocitation is not stored");
            let (a, b) = if i < h { (i, h) } else { (h, i) };
            let key = ((a as u64) << 32) | b as u64;
            keys.extend(std::iter::repeat_n(key, c as usize));
        }
        Self::from_pair_keys(n, keys)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Stored off-diagonal entries (each unordered pair counted twice).
    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    pub fn row(&self, i: usize) -> (&[u32], &[u32]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.cols[r.clone()], &self.counts[r])
    }

    pub fn get(&self, i: usize, h: usize) -> u32 {
        if i == h {
            return 0;
        }
        let (cols, counts) = self.row(i);
        cols.binary_search(&(h as u32))
            .map(|k| counts[k])
            .unwrap_or(0)
    }

    /// `Σ_h Cocit_ih²` over the full stored row.
    pub fn sq_norm(&self, i: usize) -> u64 {
        self.sq_norms[i]
    }

    /// `(i, h, count)` for `i < h`.
    pub fn upper_entries(&self) -> impl Iterator<Item = (usize, usize, u32)> + '_ {
        (0..self.n).flat_map(move |i| {
            let (cols, counts) = self.row(i);
            cols.iter()
                .zip(counts)
                .filter(move |(&h, _)| h as usize > i)
                .map(move |(&h, &c)| (i, h as usize, c))
        })
    }
}

/// Distinct journals cited in-window by a year-`Y` document, sorted.
fn cited_set(doc: &CitingDocument, n: usize, p: &Params, buf: &mut Vec<u32>) {
    buf.clear();
    buf.extend(
        doc.refs
            .iter()
            .filter(|r| p.in_window(r.year) && (r.cited as usize) < n)
            .map(|r| r.cited),
    );
    buf.sort_unstable();
    buf.dedup();
}

/// Cocitation over every year-`Y` document, ranked source or not.
pub fn build_cocitation(docs: &[CitingDocument], n: usize, p: &Params) -> CocitationMatrix {
    let keys: Vec<u64> = docs
        .par_iter()
        .filter(|d| d.year == p.year)
        .map_init(Vec::new, |buf, d| {
            cited_set(d, n, p, buf);
            let mut out = Vec::with_capacity(buf.len() * buf.len().saturating_sub(1) / 2);
            for (x, &a) in buf.iter().enumerate() {
                for &b in &buf[x + 1..] {
                    out.push(((a as u64) << 32) | b as u64);
                }
            }
            out
        })
        .flatten_iter()
        .collect();
    CocitationMatrix::from_pair_keys(n, keys)
}

fn cosine_from_parts(dot: u64, sq_i: u64, sq_j: u64) -> f64 {
    if dot == 0 || sq_i == 0 || sq_j == 0 {
        return 0.0;
    }
    let c = dot as f64 / ((sq_i as f64).sqrt() * (sq_j as f64).sqrt());
    c.min(1.0)
}

/// Cosine between the cocitation profiles of `i` and `j`, leaving out the
/// components `i` and `j`. An all-zero truncated profile gives 0.
pub fn cosine(cocit: &CocitationMatrix, i: usize, j: usize) -> Result<f64, CociteError> {
    if i == j {
        return Err(CociteError::SameJournal(i));
    }
    for k in [i, j] {
        if k >= cocit.n {
            return Err(CociteError::OutOfRange(k));
        }
    }
    let (ci, vi) = cocit.row(i);
    let (cj, vj) = cocit.row(j);
    let (mut a, mut b) = (0, 0);
    let mut dot = 0u64;
    let mut sq_i = 0u64;
    let mut sq_j = 0u64;
    let (iu, ju) = (i as u32, j as u32);
    // Sorted merge; the stored rows never contain their own index, and the
    // other journal's column is skipped explicitly.
    while a < ci.len() || b < cj.len() {
        let ha = ci.get(a).copied().unwrap_or(u32::MAX);
        let hb = cj.get(b).copied().unwrap_or(u32::MAX);
        let h = ha.min(hb);
        let x = if ha == h { vi[a] as u64 } else { 0 };
        let y = if hb == h { vj[b] as u64 } else { 0 };
        if h != iu && h != ju {
            dot += x * y;
            sq_i += x * x;
            sq_j += y * y;
        }
        if ha == h {
            a += 1;
        }
        if hb == h {
            b += 1;
        }
    }
    Ok(cosine_from_parts(dot, sq_i, sq_j))
}

/// Weights aligned one-to-one with the stored entries of a [`CitationMatrix`].
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeWeights {
    values: Vec<f64>,
}

/// Cosine per citation edge `(j, i)` with `C_ji > 0`.
pub type CosineMap = EdgeWeights;

impl EdgeWeights {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn uniform(cmat: &CitationMatrix) -> Self {
        Self {
            values: vec![1.0; cmat.nnz()],
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Weight of edge `(j, i)`, `None` when `C_ji = 0`.
    pub fn get(&self, cmat: &CitationMatrix, j: usize, i: usize) -> Option<f64> {
        let r = cmat.row_range(j);
        cmat.cols()[r.clone()]
            .binary_search(&(i as u32))
            .ok()
            .map(|k| self.values[r.start + k])
    }

    /// `(j, i, weight)` in the matrix's row-major order.
    pub fn iter<'a>(
        &'a self,
        cmat: &'a CitationMatrix,
    ) -> impl Iterator<Item = (usize, usize, f64)> + 'a {
        cmat.iter()
            .zip(&self.values)
            .map(|((j, i, _), &w)| (j, i, w))
    }
}

/// Cosines for exactly the citation edges of `cmat`.
///
/// Self-citation edges `(j, j)` get 1: a profile is parallel to itself.
pub fn cosines_for_edges(cocit: &CocitationMatrix, cmat: &CitationMatrix) -> CosineMap {
    let n = cmat.n();
    assert_eq!(n, cocit.n(), "matrices must cover the same journals");
    let per_row: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map_init(
            || vec![0u32; n],
            |dense, j| {
                let (targets, _) = cmat.row(j);
                if targets.is_empty() {
                    return Vec::new();
                }
                let (hj, cj) = cocit.row(j);
                for (&h, &c) in hj.iter().zip(cj) {
                    dense[h as usize] = c;
                }
                let out = targets
                    .iter()
                    .map(|&i| {
                        let i = i as usize;
                        if i == j {
                            return 1.0;
                        }
                        // Row i holds no entry for i and dense[j] is 0, so the
                        // gathered dot product already omits components i, j.
                        let (hi, ci) = cocit.row(i);
                        let dot: u64 = hi
                            .iter()
                            .zip(ci)
                            .map(|(&h, &c)| c as u64 * dense[h as usize] as u64)
                            .sum();
                        let mutual = dense[i] as u64;
                        cosine_from_parts(
                            dot,
                            cocit.sq_norm(j) - mutual * mutual,
                            cocit.sq_norm(i) - mutual * mutual,
                        )
                    })
                    .collect();
                for &h in hj {
                    dense[h as usize] = 0;
                }
                out
            },
        )
        .collect();
    EdgeWeights::new(per_row.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Ref;

    fn doc(cited: &[u32]) -> CitingDocument {
        CitingDocument {
            source: 0,
            year: 2008,
            refs: cited
                .iter()
                .map(|&c| Ref {
                    cited: c,
                    year: 2006,
                    n: 1,
                })
                .collect(),
        }
    }

    #[test]
    fn one_document_three_journals() {
        let m = build_cocitation(&[doc(&[0, 1, 2])], 3, &Params::default());
        assert_eq!(m.get(0, 1), 1);
        assert_eq!(m.get(0, 2), 1);
        assert_eq!(m.get(1, 2), 1);
        assert_eq!(m.get(2, 1), 1);
        assert_eq!(m.get(1, 1), 0);
    }

    #[test]
    fn single_cited_journal_gives_no_pairs() {
        let m = build_cocitation(&[doc(&[0, 0, 0])], 3, &Params::default());
        assert_eq!(m.nnz(), 0);
    }

    #[test]
    fn multiplicity_and_window_are_binary_and_filtered() {
        let mut d = doc(&[0, 1, 1]);
        d.refs[1].n = 5;
        d.refs.push(Ref {
            cited: 2,
            year: 2001,
            n: 1,
        });
        let m = build_cocitation(&[d], 3, &Params::default());
        assert_eq!(m.get(0, 1), 1);
        assert_eq!(m.get(0, 2), 0);
    }

    #[test]
    fn hand_tabulated_pairs() {
        // 6 documents over journals A..D (0..3).
        let docs = vec![
            doc(&[0, 1]),
            doc(&[0, 1, 2]),
            doc(&[1, 2]),
            doc(&[2, 3]),
            doc(&[0, 3]),
            doc(&[0, 1, 3]),
        ];
        let m = build_cocitation(&docs, 4, &Params::default());
        let expected = [
            ((0, 1), 3),
            ((0, 2), 1),
            ((0, 3), 2),
            ((1, 2), 2),
            ((1, 3), 1),
            ((2, 3), 1),
        ];
        for ((a, b), c) in expected {
            assert_eq!(m.get(a, b), c, "pair {a},{b}");
            assert_eq!(m.get(b, a), c, "pair {b},{a}");
        }
    }

    #[test]
    fn cosine_fixture_values() {
        // Journals A=0, B=1, C=2, D=3: row_A = (B:2, C:1), row_D = (B:1, C:2).
        let m = CocitationMatrix::from_pairs(4, &[(0, 1, 2), (0, 2, 1), (3, 1, 1), (3, 2, 2)]);
        assert!((cosine(&m, 0, 3).unwrap() - 0.8).abs() < 1e-15);
        assert_eq!(cosine(&m, 0, 3).unwrap(), cosine(&m, 3, 0).unwrap());
        assert_eq!(cosine(&m, 1, 1), Err(CociteError::SameJournal(1)));
    }

    #[test]
    fn parallel_and_orthogonal_profiles() {
        let m = CocitationMatrix::from_pairs(4, &[(0, 2, 3), (1, 2, 3), (0, 3, 1), (1, 3, 1)]);
        assert!((cosine(&m, 0, 1).unwrap() - 1.0).abs() < 1e-15);
        let m = CocitationMatrix::from_pairs(4, &[(0, 2, 3), (1, 3, 1)]);
        assert_eq!(cosine(&m, 0, 1).unwrap(), 0.0);
    }

    #[test]
    fn mutual_component_is_excluded() {
        let base = [(0, 2, 2), (1, 2, 1), (0, 3, 1), (1, 3, 3)];
        let a = CocitationMatrix::from_pairs(4, &base);
        let mut with_mutual = base.to_vec();
        with_mutual.push((0, 1, 40));
        let b = CocitationMatrix::from_pairs(4, &with_mutual);
        assert_eq!(cosine(&a, 0, 1).unwrap(), cosine(&b, 0, 1).unwrap());
    }

    #[test]
    fn zero_profile_gives_zero() {
        let m = CocitationMatrix::from_pairs(3, &[(0, 1, 4)]);
        // Dropping components 0 and 1 leaves both profiles empty.
        assert_eq!(cosine(&m, 0, 1).unwrap(), 0.0);
    }

    #[test]
    fn edge_cosines_cover_exactly_the_support() {
        let m = CocitationMatrix::from_pairs(4, &[(0, 1, 2), (0, 2, 1), (3, 1, 1), (3, 2, 2)]);
        let c = CitationMatrix::from_triples(4, vec![(0, 3, 1), (3, 0, 2), (1, 1, 5)]);
        let map = cosines_for_edges(&m, &c);
        assert_eq!(map.len(), 3);
        assert!((map.get(&c, 0, 3).unwrap() - 0.8).abs() < 1e-15);
        assert_eq!(map.get(&c, 0, 3), map.get(&c, 3, 0));
        assert_eq!(map.get(&c, 1, 1), Some(1.0));
        assert_eq!(map.get(&c, 0, 1), None);
        assert!(cosines_for_edges(&m, &CitationMatrix::zeros(4)).is_empty());
    }
}
