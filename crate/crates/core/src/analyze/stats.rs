// SPDX-License-Identifier: Apache-2.0

use serde::Serialize;

use super::AnalyzeError;

fn check_pair(x: &[f64], y: &[f64]) -> Result<(), AnalyzeError> {
    if x.len() != y.len() {
        return Err(AnalyzeError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(AnalyzeError::TooShort(x.len()));
    }
    Ok(())
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Product-moment correlation.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64, AnalyzeError> {
    check_pair(x, y)?;
    let (mx, my) = (mean(x), mean(y));
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(AnalyzeError::ZeroVariance);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// 1-based ranks, ties sharing the average of the positions they span.
pub fn average_ranks(x: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; x.len()];
    let mut k = 0;
    while k < order.len() {
        let mut end = k + 1;
        while end < order.len() && x[order[end]] == x[order[k]] {
            end += 1;
        }
        let avg = (k + 1 + end) as f64 / 2.0;
        for &idx in &order[k..end] {
            ranks[idx] = avg;
        }
        k = end;
    }
    ranks
}

/// Rank correlation: Pearson over average-tie ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64, AnalyzeError> {
    check_pair(x, y)?;
    pearson(&average_ranks(x), &average_ranks(y))
}

/// Mean of `(rate - 1)²`; `None` for an empty input.
pub fn msd_unity(rates: &[f64]) -> Option<f64> {
    if rates.is_empty() {
        return None;
    }
    Some(rates.iter().map(|r| (r - 1.0) * (r - 1.0)).sum::<f64>() / rates.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub n: usize,
}

impl LogFit {
    /// `y = a ln(x) + b`, with the given number of significant digits.
    pub fn formula(&self, digits: usize) -> String {
        let a = crate::format::fmt_sig(self.slope, digits);
        let b = self.intercept;
        let sign = if b < 0.0 { '-' } else { '+' };
        format!(
            "y = {a} ln(x) {sign} {}",
            crate::format::fmt_sig(b.abs(), digits)
        )
    }

    pub fn r_squared_label(&self, digits: usize) -> String {
        format!("R² = {}", crate::format::fmt_sig(self.r_squared, digits))
    }
}

/// Least-squares fit of `value = a·ln(rank) + b` over ranks `1..=n`.
///
/// Constant input yields slope 0 and R² 0.
pub fn log_fit(values: &[f64]) -> Result<LogFit, AnalyzeError> {
    let n = values.len();
    if n < 2 {
        return Err(AnalyzeError::TooShort(n));
    }
    let xs: Vec<f64> = (1..=n).map(|k| (k as f64).ln()).collect();
    let (mx, my) = (mean(&xs), mean(values));
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (&x, &y) in xs.iter().zip(values) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    let constant = values.iter().all(|&y| y == values[0]);
    let slope = if constant { 0.0 } else { sxy / sxx };
    let intercept = if constant { values[0] } else { my - slope * mx };
    let r_squared = if constant || syy == 0.0 {
        0.0
    } else {
        let ss_res: f64 = xs
            .iter()
            .zip(values)
            .map(|(&x, &y)| {
                let e = y - (slope * x + intercept);
                e * e
            })
            .sum();
        1.0 - ss_res / syy
    };
    Ok(LogFit {
        slope,
        intercept,
        r_squared,
        n,
    })
}

/// Scores sorted descending and divided by their maximum.
pub fn rank_normalize(scores: &[f64]) -> Vec<f64> {
    let mut sorted: Vec<f64> = scores.iter().copied().filter(|x| x.is_finite()).collect();
    sorted.sort_by(|a, b| b.total_cmp(a));
    match sorted.first().copied() {
        Some(max) if max > 0.0 => sorted.iter().map(|x| x / max).collect(),
        _ => sorted,
    }
}

/// Mean and sample standard deviation.
pub fn mean_sd(values: &[f64]) -> Option<(f64, f64)> {
    match values.len() {
        0 => None,
        1 => Some((values[0], 0.0)),
        n => {
            let m = mean(values);
            let var = values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1) as f64;
            Some((m, var.sqrt()))
        }
    }
}
