// SPDX-License-Identifier: Apache-2.0

//! Decimal text output with a fixed number of significant digits, and the
//! per-journal scores CSV.

use std::io::{self, Write};

use crate::baselines::BaselineTable;
use crate::model::{JournalTable, Params};
use crate::rank::Sjr2Run;

pub const DEFAULT_SIGNIFICANT_DIGITS: usize = 6;

/// `%g`-style formatting: fixed notation for moderate exponents, scientific
/// otherwise, trailing zeros trimmed.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    // Exponent after rounding to `digits` significant digits.
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        return format!("{}e{}", trim_zeros(mantissa), exp);
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{:.*}", decimals, x)).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `key=value` pairs describing a parameter set, in a fixed order.
pub fn params_header(p: &Params) -> Vec<(String, String)> {
    [
        ("year", p.year.to_string()),
        ("window", p.window.to_string()),
        ("d", p.d.to_string()),
        ("e", p.e.to_string()),
        ("cap_share", p.cap_share.to_string()),
        ("cap_per_citation", p.cap_per_citation.to_string()),
        ("weighting", p.weighting_name().to_string()),
        ("tol", format!("{:e}", p.tol)),
        ("max_iters", p.max_iters.to_string()),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect()
}

/// Writes `journal_id,psjr2,sjr2,art,citations_3y,jif3y` rows behind `#`
/// comment lines carrying the parameters and convergence state.
pub fn write_scores<W: Write>(
    w: &mut W,
    journals: &JournalTable,
    run: &Sjr2Run,
    baselines: &BaselineTable,
    digits: usize,
) -> io::Result<()> {
    let mut meta = params_header(&run.params);
    meta.push((
        "weighting_strategy".into(),
        run.coef.weighting().to_string(),
    ));
    meta.push(("converged".into(), run.prestige.converged.to_string()));
    meta.push(("iterations".into(), run.prestige.iterations.to_string()));
    meta.push(("residual".into(), format!("{:e}", run.prestige.residual)));
    if run.prestige.all_dangling_fallback {
        meta.push(("all_dangling_fallback".into(), "true".into()));
    }
    for (k, v) in &meta {
        writeln!(w, "# {k}={v}")?;
    }
    writeln!(w, "journal_id,psjr2,sjr2,art,citations_3y,jif3y")?;
    let opt = |x: Option<f64>| x.map_or_else(String::new, |v| fmt_sig(v, digits));
    for (i, j) in journals.iter().enumerate() {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            csv_field(j.id.as_str()),
            fmt_sig(run.prestige.values[i], digits),
            opt(run.scores.get(i)),
            run.art.get(i),
            baselines.citations_3y[i],
            opt(baselines.jif3y[i])
        )?;
    }
    Ok(())
}

fn csv_field(s: &str) -> std::borrow::Cow<'_, str> {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\"")).into()
    } else {
        s.into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(fmt_sig(0.0, 6), "0");
        assert_eq!(fmt_sig(1.0, 6), "1");
        assert_eq!(fmt_sig(17.97222222, 6), "17.9722");
        assert_eq!(fmt_sig(-0.017, 4), "-0.017");
        assert_eq!(fmt_sig(0.1535, 4), "0.1535");
        assert_eq!(fmt_sig(2.347e-5, 4), "2.347e-5");
        assert_eq!(fmt_sig(1234567.0, 6), "1.23457e6");
        assert_eq!(fmt_sig(9.9999996, 6), "10");
        assert_eq!(fmt_sig(0.000123456789, 3), "0.000123");
    }
}
