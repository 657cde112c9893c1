// SPDX-License-Identifier: Apache-2.0

use rayon::prelude::*;
use serde::Serialize;

use crate::ingest::ArtVector;
use crate::model::Params;

use super::{CoefMatrix, RankError};

/// Block length for reductions. Partial sums are formed per block and then
/// combined left to right, so the result does not depend on the thread count.
const REDUCE_BLOCK: usize = 4096;

pub(crate) fn ordered_sum<F>(n: usize, term: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    let partials: Vec<f64> = (0..n.div_ceil(REDUCE_BLOCK))
        .into_par_iter()
        .map(|b| {
            let lo = b * REDUCE_BLOCK;
            let hi = (lo + REDUCE_BLOCK).min(n);
            (lo..hi).map(&term).sum::<f64>()
        })
        .collect();
    partials.iter().sum()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrestigeVector {
    pub values: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// L1 norm of the last update.
    pub residual: f64,
    /// Set when no coefficient existed and the citation mass followed the
    /// citable-document shares instead.
    pub all_dangling_fallback: bool,
}

impl PrestigeVector {
    pub fn uniform(n: usize) -> Self {
        Self {
            values: vec![1.0 / n as f64; n],
            iterations: 0,
            converged: false,
            residual: f64::INFINITY,
            all_dangling_fallback: false,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sum(&self) -> f64 {
        ordered_sum(self.values.len(), |i| self.values[i])
    }
}

/// Per-iteration snapshot handed to observers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationState<'a> {
    pub iteration: usize,
    pub values: &'a [f64],
    pub mass: f64,
    pub residual: f64,
    pub distributed: f64,
}

/// Prestige distributed by the coefficients: `Σ_i Σ_j Coef_ji·v_j`.
///
/// Zero when no coefficient exists.
pub fn psjr2d(coef: &CoefMatrix, v: &[f64]) -> f64 {
    assert_eq!(coef.n(), v.len());
    let sums = coef.row_sums();
    ordered_sum(v.len(), |j| sums[j] * v[j])
}

pub fn iterate_psjr2(
    coef: &CoefMatrix,
    art: &ArtVector,
    p: &Params,
) -> Result<PrestigeVector, RankError> {
    iterate_psjr2_observed(coef, art, p, |_| {})
}

/// Runs the fixed-point iteration, calling `observer` after every update.
pub fn iterate_psjr2_observed<F>(
    coef: &CoefMatrix,
    art: &ArtVector,
    p: &Params,
    mut observer: F,
) -> Result<PrestigeVector, RankError>
where
    F: FnMut(&IterationState<'_>),
{
    p.validate()?;
    let n = coef.n();
    if n == 0 {
        return Err(RankError::Empty);
    }
    if art.len() != n {
        return Err(RankError::LengthMismatch {
            expected: n,
            found: art.len(),
        });
    }
    let uniform = (1.0 - p.d - p.e) / n as f64;
    let base: Vec<f64> = (0..n).map(|i| uniform + p.e * art.share(i)).collect();

    let mut state = PrestigeVector::uniform(n);
    let mut next = vec![0.0; n];
    for iteration in 1..=p.max_iters {
        let v = &state.values;
        let distributed = psjr2d(coef, v);
        if distributed > 0.0 {
            let scale = p.d / distributed;
            next.par_iter_mut().enumerate().for_each(|(i, out)| {
                let (src, vals) = coef.column(i);
                let inflow: f64 = src.iter().zip(vals).map(|(&j, &c)| c * v[j as usize]).sum();
                *out = base[i] + scale * inflow;
            });
        } else {
            state.all_dangling_fallback = true;
            next.par_iter_mut()
                .enumerate()
                .for_each(|(i, out)| *out = base[i] + p.d * art.share(i));
        }
        let residual = ordered_sum(n, |i| (next[i] - v[i]).abs());
        let mass = ordered_sum(n, |i| next[i]);
        std::mem::swap(&mut state.values, &mut next);
        state.iterations = iteration;
        state.residual = residual;
        observer(&IterationState {
            iteration,
            values: &state.values,
            mass,
            residual,
            distributed,
        });
        if residual < p.tol {
            state.converged = true;
            return Ok(state);
        }
    }
    Err(RankError::NotConverged {
        iterations: state.iterations,
        residual: state.residual,
        partial: Box::new(state),
    })
}

/// Size-independent scores `SJR2_i = PSJR2_i · ΣArt / Art_i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreVector {
    /// `None` for journals without citable documents in the window.
    pub values: Vec<Option<f64>>,
    pub unscored: Vec<usize>,
}

impl ScoreVector {
    pub fn get(&self, i: usize) -> Option<f64> {
        self.values[i]
    }

    /// `Σ_i SJR2_i · Art_i / ΣArt` over scored journals.
    pub fn weighted_mean(&self, art: &ArtVector) -> f64 {
        ordered_sum(self.values.len(), |i| {
            self.values[i].map_or(0.0, |s| s * art.share(i))
        })
    }
}

pub fn compute_sjr2(v: &PrestigeVector, art: &ArtVector) -> ScoreVector {
    let total = art.total() as f64;
    let mut unscored = Vec::new();
    let values = v
        .values
        .iter()
        .enumerate()
        .map(|(i, &x)| match art.get(i) {
            0 => {
                unscored.push(i);
                None
            }
            a => Some(x * total / a as f64),
        })
        .collect();
    ScoreVector { values, unscored }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn art(values: &[u64]) -> ArtVector {
        ArtVector::from_counts(values.to_vec()).unwrap()
    }

    #[test]
    fn psjr2d_edge_cases() {
        let empty = CoefMatrix::from_entries(3, vec![], "uniform");
        assert_eq!(psjr2d(&empty, &[0.2, 0.3, 0.5]), 0.0);
        let stochastic =
            CoefMatrix::from_entries(2, vec![(0, 1, 0.5), (0, 0, 0.5), (1, 0, 1.0)], "uniform");
        assert_eq!(psjr2d(&stochastic, &[0.25, 0.75]), 1.0);
    }

    #[test]
    fn psjr2d_matches_dense_double_sum() {
        let entries = vec![
            (0, 1, 0.5),
            (0, 2, 0.3),
            (1, 2, 0.1),
            (2, 0, 0.5),
            (2, 2, 0.2),
        ];
        let m = CoefMatrix::from_entries(3, entries.clone(), "uniform");
        let v = [0.2, 0.5, 0.3];
        let mut dense = [[0.0; 3]; 3];
        for (j, i, c) in entries {
            dense[j as usize][i as usize] = c;
        }
        let expected: f64 = dense
            .iter()
            .zip(&v)
            .map(|(row, vj)| row.iter().sum::<f64>() * vj)
            .sum();
        // 0.2*0.8 + 0.5*0.1 + 0.3*0.7 = 0.42
        assert!((psjr2d(&m, &v) - 0.42).abs() < 1e-15);
        assert!((psjr2d(&m, &v) - expected).abs() < 1e-15);
    }

    #[test]
    fn no_citations_falls_back_to_art_shares() {
        let coef = CoefMatrix::from_entries(4, vec![], "uniform");
        let v = iterate_psjr2(&coef, &art(&[5, 5, 5, 5]), &Params::default()).unwrap();
        assert!(v.all_dangling_fallback);
        assert!(v.converged);
        for x in v.values {
            assert!((x - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn symmetric_network_is_uniform() {
        let n = 5u32;
        let mut entries = Vec::new();
        for j in 0..n {
            for i in 0..n {
                if i != j {
                    entries.push((j, i, 0.1));
                }
            }
        }
        let coef = CoefMatrix::from_entries(n as usize, entries, "cosine");
        let a = art(&[7; 5]);
        let v = iterate_psjr2(&coef, &a, &Params::default()).unwrap();
        for &x in &v.values {
            assert!((x - 0.2).abs() < 1e-14);
        }
        let s = compute_sjr2(&v, &a);
        for x in s.values {
            assert!((x.unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn non_convergence_reports_residual() {
        let coef = CoefMatrix::from_entries(2, vec![(0, 1, 0.5), (1, 0, 0.1)], "uniform");
        let p = Params {
            max_iters: 1,
            ..Params::default()
        };
        match iterate_psjr2(&coef, &art(&[1, 9]), &p) {
            Err(RankError::NotConverged {
                iterations,
                residual,
                partial,
            }) => {
                assert_eq!(iterations, 1);
                assert!(residual > 0.0);
                assert!(!partial.converged);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let coef = CoefMatrix::from_entries(2, vec![], "uniform");
        assert!(matches!(
            iterate_psjr2(&coef, &art(&[1, 1, 1]), &Params::default()),
            Err(RankError::LengthMismatch { .. })
        ));
        let empty = CoefMatrix::from_entries(0, vec![], "uniform");
        assert!(matches!(
            iterate_psjr2(&empty, &art(&[1]), &Params::default()),
            Err(RankError::Empty)
        ));
    }

    #[test]
    fn sjr2_definition_arithmetic() {
        // Art shares 0.01 and 0.025 of 1000 documents.
        let mut counts = vec![10, 25];
        counts.push(965);
        let a = art(&counts);
        let v = PrestigeVector {
            values: vec![0.02, 0.02, 0.96],
            ..PrestigeVector::uniform(3)
        };
        let s = compute_sjr2(&v, &a);
        assert!((s.get(0).unwrap() - 2.0).abs() < 1e-12);
        assert!((s.get(1).unwrap() - 0.8).abs() < 1e-12);
    }

    #[test]
    fn zero_art_journals_are_unscored() {
        let a = art(&[0, 4]);
        let v = PrestigeVector {
            values: vec![0.3, 0.7],
            ..PrestigeVector::uniform(2)
        };
        let s = compute_sjr2(&v, &a);
        assert_eq!(s.get(0), None);
        assert_eq!(s.unscored, vec![0]);
        assert!((s.get(1).unwrap() - 0.7).abs() < 1e-15);
    }
}
