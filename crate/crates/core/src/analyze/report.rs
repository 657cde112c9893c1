// SPDX-License-Identifier: Apache-2.0

//! TSV renderings of the analysis tables. Every file starts with `#`
//! comment lines carrying the run metadata.

use std::io::{self, Write};

use super::{
    AreaRateTable, CorrelationTable, DeviationTable, FlowReport, IndicatorFit, WithinShares,
};
use crate::format::fmt_sig;
use crate::model::SubjectScheme;

pub fn write_header<W: Write>(w: &mut W, meta: &[(String, String)]) -> io::Result<()> {
    for (k, v) in meta {
        writeln!(w, "# {k}={v}")?;
    }
    Ok(())
}

fn opt(x: Option<f64>, digits: usize) -> String {
    x.map_or_else(|| "NA".to_string(), |v| fmt_sig(v, digits))
}

pub fn write_correlations<W: Write>(
    w: &mut W,
    table: &CorrelationTable,
    digits: usize,
) -> io::Result<()> {
    writeln!(w, "scope\tpair\tstatistic\tvalue\tsd\tn")?;
    for c in &table.overall {
        let pair = format!("{}/{}", c.left, c.right);
        writeln!(
            w,
            "global\t{pair}\tpearson\t{}\t\t{}",
            opt(c.pearson, digits),
            c.n
        )?;
        writeln!(
            w,
            "global\t{pair}\tspearman\t{}\t\t{}",
            opt(c.spearman, digits),
            c.n
        )?;
    }
    for s in &table.by_area {
        let pair = format!("{}/{}", s.left, s.right);
        for (stat, v) in [("pearson", s.pearson), ("spearman", s.spearman)] {
            writeln!(
                w,
                "{}\t{pair}\t{stat}\t{}\t{}\t{}",
                s.level,
                opt(v.map(|x| x.0), digits),
                opt(v.map(|x| x.1), digits),
                s.areas
            )?;
        }
    }
    Ok(())
}

pub fn write_rates<W: Write>(
    w: &mut W,
    tables: &[AreaRateTable],
    scheme: &SubjectScheme,
    digits: usize,
) -> io::Result<()> {
    let Some(first) = tables.first() else {
        return Ok(());
    };
    writeln!(
        w,
        "level\tarea_code\tarea_name\tart_share\t{}",
        first.indicators.join("\t")
    )?;
    for t in tables {
        for r in &t.rows {
            let name = scheme.subject_name(&r.code).unwrap_or("");
            let rates: Vec<String> = r.rates.iter().map(|&x| opt(x, digits)).collect();
            writeln!(
                w,
                "{}\t{}\t{}\t{}\t{}",
                t.level,
                r.code,
                name,
                fmt_sig(r.art_share, digits),
                rates.join("\t")
            )?;
        }
        for code in &t.omitted {
            writeln!(w, "# omitted {} area {code}: no citable documents", t.level)?;
        }
    }
    Ok(())
}

pub fn write_deviations<W: Write>(
    w: &mut W,
    table: &DeviationTable,
    digits: usize,
) -> io::Result<()> {
    writeln!(w, "# excluded_general={}", table.excluded_general)?;
    writeln!(w, "level\tareas\t{}", table.indicators.join("\t"))?;
    for r in &table.rows {
        let vals: Vec<String> = r.msd.iter().map(|&x| opt(x, digits)).collect();
        writeln!(w, "{}\t{}\t{}", r.level, r.areas, vals.join("\t"))?;
    }
    Ok(())
}

pub fn write_flow_matrix<W: Write>(
    w: &mut W,
    flows: &[FlowReport],
    digits: usize,
) -> io::Result<()> {
    writeln!(w, "kind\tlevel\tfrom\tto\tflow")?;
    for f in flows {
        let m = &f.matrix;
        for (a, from) in m.codes.iter().enumerate() {
            for (b, to) in m.codes.iter().enumerate() {
                writeln!(
                    w,
                    "{}\t{}\t{from}\t{to}\t{}",
                    f.kind,
                    m.level,
                    fmt_sig(m.values[a][b], digits)
                )?;
            }
        }
        if m.unattributed > 0.0 {
            writeln!(
                w,
                "# {} unattributed={}",
                f.kind,
                fmt_sig(m.unattributed, digits)
            )?;
        }
    }
    Ok(())
}

fn shares_cols(s: Option<WithinShares>, digits: usize) -> String {
    match s {
        Some(s) => format!(
            "{}\t{}\t{}",
            fmt_sig(s.self_pct, digits),
            fmt_sig(s.specific_pct, digits),
            fmt_sig(s.subject_pct, digits)
        ),
        None => "NA\tNA\tNA".into(),
    }
}

/// Per-area within-flow percentages followed by the document-weighted
/// averages (area code `*`).
pub fn write_within_flows<W: Write>(
    w: &mut W,
    flows: &[FlowReport],
    digits: usize,
) -> io::Result<()> {
    writeln!(
        w,
        "kind\tlevel\tarea_code\tdirection\tpct_self\tpct_same_specific\tpct_same_subject"
    )?;
    for f in flows {
        for t in &f.within {
            for r in &t.rows {
                for (dir, s) in [("received", r.received), ("sent", r.sent)] {
                    writeln!(
                        w,
                        "{}\t{}\t{}\t{dir}\t{}",
                        f.kind,
                        t.level,
                        r.code,
                        shares_cols(s, digits)
                    )?;
                }
            }
            for (dir, s) in [("received", t.avg_received), ("sent", t.avg_sent)] {
                writeln!(
                    w,
                    "{}\t{}\t*\t{dir}\t{}",
                    f.kind,
                    t.level,
                    shares_cols(s, digits)
                )?;
            }
        }
    }
    Ok(())
}

pub fn write_fits<W: Write>(w: &mut W, fits: &[IndicatorFit], digits: usize) -> io::Result<()> {
    writeln!(
        w,
        "indicator\tn\tslope\tintercept\tr_squared\tformula\tr_squared_label"
    )?;
    for f in fits {
        match &f.fit {
            Some(fit) => writeln!(
                w,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                f.indicator,
                fit.n,
                fmt_sig(fit.slope, digits),
                fmt_sig(fit.intercept, digits),
                fmt_sig(fit.r_squared, digits),
                fit.formula(digits),
                fit.r_squared_label(digits)
            )?,
            None => writeln!(w, "{}\t{}\tNA\tNA\tNA\t\t", f.indicator, f.series.len())?,
        }
    }
    Ok(())
}

pub fn write_series<W: Write>(w: &mut W, fit: &IndicatorFit, digits: usize) -> io::Result<()> {
    writeln!(w, "rank\tnormalized_value")?;
    for (k, v) in fit.series.iter().enumerate() {
        writeln!(w, "{}\t{}", k + 1, fmt_sig(*v, digits))?;
    }
    Ok(())
}
