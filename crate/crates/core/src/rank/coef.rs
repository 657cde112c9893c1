// SPDX-License-Identifier: Apache-2.0

use rayon::prelude::*;

use crate::cocite::EdgeWeights;
use crate::ingest::CitationMatrix;
use crate::model::Params;

/// Capped transfer coefficients `Coef_ji`, stored by citing row and also
/// transposed by cited column for the pull-style product.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
    values: Vec<f64>,
    in_ptr: Vec<usize>,
    in_src: Vec<u32>,
    in_values: Vec<f64>,
    row_sums: Vec<f64>,
    weighting: String,
}

impl CoefMatrix {
    /// Builds from row-major `(citing, cited, coef)` entries.
    pub fn from_entries(n: usize, entries: Vec<(u32, u32, f64)>, weighting: &str) -> Self {
        let mut row_ptr = vec![0usize; n + 1];
        for &(j, _, _) in &entries {
            row_ptr[j as usize + 1] += 1;
        }
        for k in 0..n {
            row_ptr[k + 1] += row_ptr[k];
        }
        let mut in_ptr = vec![0usize; n + 1];
        for &(_, i, _) in &entries {
            in_ptr[i as usize + 1] += 1;
        }
        for k in 0..n {
            in_ptr[k + 1] += in_ptr[k];
        }
        let mut sorted = entries;
        sorted.sort_by_key(|&(j, i, _)| (j, i));
        let cols = sorted.iter().map(|e| e.1).collect();
        let values: Vec<f64> = sorted.iter().map(|e| e.2).collect();
        // Transpose: scanning rows in order leaves each column's sources ascending.
        let mut fill = in_ptr.clone();
        let mut in_src = vec![0u32; sorted.len()];
        let mut in_values = vec![0f64; sorted.len()];
        for &(j, i, v) in &sorted {
            let slot = fill[i as usize];
            in_src[slot] = j;
            in_values[slot] = v;
            fill[i as usize] += 1;
        }
        let row_sums = (0..n)
            .map(|j| values[row_ptr[j]..row_ptr[j + 1]].iter().sum())
            .collect();
        Self {
            n,
            row_ptr,
            cols,
            values,
            in_ptr,
            in_src,
            in_values,
            row_sums,
            weighting: weighting.to_string(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Name of the edge weighting the coefficients were built with.
    pub fn weighting(&self) -> &str {
        &self.weighting
    }

    pub fn uses_cosine(&self) -> bool {
        self.weighting == "cosine"
    }

    pub fn row(&self, j: usize) -> (&[u32], &[f64]) {
        let r = self.row_ptr[j]..self.row_ptr[j + 1];
        (&self.cols[r.clone()], &self.values[r])
    }

    /// Sources citing `i` and their coefficients, sources ascending.
    pub fn column(&self, i: usize) -> (&[u32], &[f64]) {
        let r = self.in_ptr[i]..self.in_ptr[i + 1];
        (&self.in_src[r.clone()], &self.in_values[r])
    }

    pub fn get(&self, j: usize, i: usize) -> f64 {
        let (cols, vals) = self.row(j);
        cols.binary_search(&(i as u32))
            .map(|k| vals[k])
            .unwrap_or(0.0)
    }

    pub fn row_sum(&self, j: usize) -> f64 {
        self.row_sums[j]
    }

    pub fn row_sums(&self) -> &[f64] {
        &self.row_sums
    }

    /// Journals without any outgoing coefficient.
    pub fn is_dangling(&self, j: usize) -> bool {
        self.row_ptr[j] == self.row_ptr[j + 1]
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |j| {
            (self.row_ptr[j]..self.row_ptr[j + 1])
                .map(move |k| (j, self.cols[k] as usize, self.values[k]))
        })
    }
}

/// `Coef_ji = min(w_ji·C_ji / Σ_h w_jh·C_jh, cap_share, cap_per_citation·C_ji)`.
///
/// Capped-off mass is not redistributed within the row. Rows whose weighted
/// total is zero stay empty.
pub fn compute_coefficients(
    cmat: &CitationMatrix,
    weights: &EdgeWeights,
    p: &Params,
    weighting: &str,
) -> CoefMatrix {
    assert_eq!(
        weights.len(),
        cmat.nnz(),
        "weights must align with citation edges"
    );
    let w = weights.values();
    let rows: Vec<Vec<(u32, u32, f64)>> = (0..cmat.n())
        .into_par_iter()
        .map(|j| {
            let range = cmat.row_range(j);
            let cols = &cmat.cols()[range.clone()];
            let counts = &cmat.counts()[range.clone()];
            let ws = &w[range];
            let denom: f64 = counts.iter().zip(ws).map(|(&c, &w)| w * c as f64).sum();
            if denom <= 0.0 {
                return Vec::new();
            }
            cols.iter()
                .zip(counts)
                .zip(ws)
                .filter(|(_, &w)| w > 0.0)
                .map(|((&i, &c), &w)| {
                    let raw = w * c as f64 / denom;
                    let coef = raw.min(p.cap_share).min(p.cap_per_citation * c as f64);
                    (j as u32, i, coef)
                })
                .collect()
        })
        .collect();
    CoefMatrix::from_entries(cmat.n(), rows.into_iter().flatten().collect(), weighting)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coef_for(triples: Vec<(u32, u32, u64)>, weights: Vec<f64>) -> CoefMatrix {
        let c = CitationMatrix::from_triples(3, triples);
        compute_coefficients(&c, &EdgeWeights::new(weights), &Params::default(), "cosine")
    }

    #[test]
    fn share_cap_binds() {
        let m = coef_for(vec![(0, 1, 20)], vec![1.0]);
        assert_eq!(m.get(0, 1), 0.5);
    }

    #[test]
    fn per_citation_cap_binds() {
        let m = coef_for(vec![(0, 1, 3)], vec![1.0]);
        assert_eq!(m.get(0, 1), 0.1 * 3.0);
    }

    #[test]
    fn cosine_weighted_shares_then_caps() {
        // j=0 cites i=1 (C=6, Cos=0.5) and k=2 (C=5, Cos=1.0): raw 3/8 and 5/8.
        let m = coef_for(vec![(0, 1, 6), (0, 2, 5)], vec![0.5, 1.0]);
        assert!((m.get(0, 1) - 0.375).abs() < 1e-15);
        assert_eq!(m.get(0, 2), 0.5);
        assert!((m.row_sum(0) - 0.875).abs() < 1e-15);
    }

    #[test]
    fn zero_cosine_rows_dangle() {
        let m = coef_for(vec![(0, 1, 6), (0, 2, 2), (1, 0, 4)], vec![0.0, 0.0, 1.0]);
        assert!(m.is_dangling(0));
        assert!(!m.is_dangling(1));
        assert!(m.is_dangling(2));
        assert_eq!(m.nnz(), 1);
    }

    #[test]
    fn transpose_matches_rows() {
        let m = coef_for(
            vec![(0, 1, 6), (0, 2, 2), (1, 2, 9), (2, 0, 1), (2, 2, 3)],
            vec![1.0; 5],
        );
        for i in 0..3 {
            let (src, vals) = m.column(i);
            for (&j, &v) in src.iter().zip(vals) {
                assert_eq!(m.get(j as usize, i), v);
            }
        }
        assert_eq!(m.iter().count(), 5);
    }
}
