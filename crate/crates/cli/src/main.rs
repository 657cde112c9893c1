// SPDX-License-Identifier: Apache-2.0

//! `prestige-rank`: validate, compute, analyze, synthesize and debug journal
//! prestige datasets.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 non-convergence.

mod manifest;

use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use prestige_core::analyze::{self, report, ExternalScores};
use prestige_core::baselines::compute_jif3y;
use prestige_core::cocite::{build_cocitation, cosines_for_edges};
use prestige_core::format::{params_header, write_scores, DEFAULT_SIGNIFICANT_DIGITS};
use prestige_core::ingest::{
    build_citation_matrix, load_dataset, write_citations, write_journals, write_scheme,
};
use prestige_core::model::{validate_dataset, Dataset, Params, GENERAL_CODE};
use prestige_core::rank::{run_sjr2, WeightingRegistry};
use prestige_core::synth::{generate, PresetRegistry, SynthConfig, RNG_ALGORITHM};

use manifest::{digest_file, RunManifest, Timing};

#[derive(Parser, Debug)]
#[command(
    name = "prestige-rank",
    version,
    about = "Cosine-weighted journal prestige indicators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a dataset and print a JSON report.
    Validate {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        year: i32,
        #[arg(long, default_value_t = 3)]
        window: u32,
    },
    /// Compute per-journal scores and a run manifest.
    Compute {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        params: ParamArgs,
        /// Score CSV path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Manifest path; defaults to `<out>.manifest.json` when --out is set.
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_SIGNIFICANT_DIGITS)]
        precision: usize,
        /// Leave timings out of the manifest so reruns are byte-identical.
        #[arg(long)]
        deterministic: bool,
    },
    /// Write correlation, rate, deviation, flow and fit tables.
    Analyze {
        #[command(flatten)]
        data: OptionalDataArgs,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        out_dir: PathBuf,
        /// Leave the General area (code 1000) out of deviation summaries.
        #[arg(long)]
        exclude_general: bool,
        /// CSV `journal_id,<indicator>...` with external per-journal scores.
        #[arg(long)]
        extra_scores: Option<PathBuf>,
        /// Per-area rates table; only deviations are computed from it.
        #[arg(long, conflicts_with_all = ["journals", "citations", "extra_scores"])]
        rates: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_SIGNIFICANT_DIGITS)]
        precision: usize,
    },
    /// Generate a synthetic dataset.
    Synth {
        #[arg(long, conflicts_with = "config", required_unless_present_any = ["config", "list_presets"])]
        preset: Option<String>,
        /// TOML configuration file.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides the preset or configuration seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        cross_block_mixing: Option<f64>,
        #[arg(long)]
        dangling_fraction: Option<f64>,
        #[arg(long, required_unless_present = "list_presets")]
        out_dir: Option<PathBuf>,
        #[arg(long)]
        list_presets: bool,
    },
    /// Write cocitation counts and edge cosines as TSV.
    DumpCocit {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        year: i32,
        #[arg(long, default_value_t = 3)]
        window: u32,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SIGNIFICANT_DIGITS)]
        precision: usize,
    },
}

#[derive(Args, Debug)]
struct DataArgs {
    #[arg(long)]
    journals: PathBuf,
    #[arg(long)]
    citations: PathBuf,
    /// Subject scheme CSV; codes are grouped by two-digit prefix when omitted.
    #[arg(long)]
    scheme: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct OptionalDataArgs {
    #[arg(long, required_unless_present = "rates", requires = "citations")]
    journals: Option<PathBuf>,
    #[arg(long, requires = "journals")]
    citations: Option<PathBuf>,
    #[arg(long)]
    scheme: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ParamArgs {
    /// Citing year Y.
    #[arg(long)]
    year: Option<i32>,
    #[arg(long, default_value_t = Params::default().window)]
    window: u32,
    #[arg(long, default_value_t = Params::default().d)]
    d: f64,
    #[arg(long, default_value_t = Params::default().e)]
    e: f64,
    #[arg(long, default_value_t = Params::default().cap_share)]
    cap_share: f64,
    #[arg(long, default_value_t = Params::default().cap_per_citation)]
    cap_per_citation: f64,
    /// Weight references by plain shares instead of cocitation cosines.
    #[arg(long, conflicts_with = "weighting")]
    no_cosine: bool,
    /// Edge weighting strategy by registry name.
    #[arg(long)]
    weighting: Option<String>,
    #[arg(long, default_value_t = Params::default().tol)]
    tol: f64,
    #[arg(long, default_value_t = Params::default().max_iters)]
    max_iters: usize,
}

impl ParamArgs {
    fn weighting_name(&self) -> String {
        match (&self.weighting, self.no_cosine) {
            (Some(name), _) => name.clone(),
            (None, true) => "uniform".into(),
            (None, false) => "cosine".into(),
        }
    }

    fn params(&self) -> Result<Params, Failure> {
        let year = self
            .year
            .ok_or_else(|| Failure::Usage(anyhow!("--year is required")))?;
        let p = Params {
            d: self.d,
            e: self.e,
            year,
            window: self.window,
            cap_share: self.cap_share,
            cap_per_citation: self.cap_per_citation,
            use_cosine: self.weighting_name() == "cosine",
            tol: self.tol,
            max_iters: self.max_iters,
        };
        p.validate().map_err(|e| Failure::Usage(e.into()))?;
        Ok(p)
    }
}

#[derive(Debug)]
enum Failure {
    Usage(anyhow::Error),
    Data(anyhow::Error),
    NotConverged(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Data(_) => 2,
            Failure::NotConverged(_) => 3,
        }
    }
}

type Outcome = Result<(), Failure>;

fn data_err(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Data(e.into())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if let Err(f) = configure_threads().and_then(|()| run(cli.command)) {
        match &f {
            Failure::Usage(e) => eprintln!("error: {e:#}"),
            Failure::Data(e) => eprintln!("data error: {e:#}"),
            Failure::NotConverged(m) => eprintln!("warning: {m}"),
        }
        return ExitCode::from(f.code());
    }
    ExitCode::SUCCESS
}

fn configure_threads() -> Outcome {
    let Ok(raw) = std::env::var("PRESTIGE_RANK_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        Failure::Usage(anyhow!(
            "PRESTIGE_RANK_THREADS must be a positive integer, got `{raw}`"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Usage(e.into()))
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Validate { data, year, window } => validate(&data, year, window),
        Command::Compute {
            data,
            params,
            out,
            manifest,
            precision,
            deterministic,
        } => compute(
            &data,
            &params,
            out.as_deref(),
            manifest,
            precision,
            deterministic,
        ),
        Command::Analyze {
            data,
            params,
            out_dir,
            exclude_general,
            extra_scores,
            rates,
            precision,
        } => match rates {
            Some(rates) => analyze_rates(&rates, &out_dir, exclude_general, precision),
            None => analyze(
                &data,
                &params,
                &out_dir,
                exclude_general,
                extra_scores.as_deref(),
                precision,
            ),
        },
        Command::Synth {
            preset,
            config,
            seed,
            cross_block_mixing,
            dangling_fraction,
            out_dir,
            list_presets,
        } => {
            if list_presets {
                for p in PresetRegistry::default().iter() {
                    println!("{}\t{}", p.name(), p.description());
                }
                return Ok(());
            }
            let mut cfg = match (preset, config) {
                (Some(name), _) => {
                    let preset = PresetRegistry::default()
                        .get(&name)
                        .map_err(|e| Failure::Usage(e.into()))?;
                    preset.config(seed.unwrap_or(0))
                }
                (None, Some(path)) => {
                    let text = fs::read_to_string(&path)
                        .with_context(|| format!("reading {}", path.display()))
                        .map_err(Failure::Usage)?;
                    SynthConfig::from_toml(&text).map_err(|e| Failure::Usage(e.into()))?
                }
                (None, None) => unreachable!("clap requires --preset or --config"),
            };
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(m) = cross_block_mixing {
                cfg.cross_block_mixing = m;
            }
            if let Some(f) = dangling_fraction {
                cfg.dangling_fraction = f;
            }
            synth(&cfg, &out_dir.expect("clap requires --out-dir"))
        }
        Command::DumpCocit {
            data,
            year,
            window,
            out_dir,
            precision,
        } => dump_cocit(&data, year, window, &out_dir, precision),
    }
}

fn load(journals: &Path, citations: &Path, scheme: Option<&Path>) -> Result<Dataset, Failure> {
    let ds = load_dataset(journals, citations, scheme).map_err(data_err)?;
    if !ds.unknown_ids.is_empty() {
        eprintln!(
            "warning: {} unknown journal id(s) dropped (first: `{}` in record {})",
            ds.unknown_ids.len(),
            ds.unknown_ids[0].id,
            ds.unknown_ids[0].record
        );
    }
    Ok(ds)
}

fn check_params(p: &Params) -> Outcome {
    p.validate().map_err(|e| Failure::Usage(e.into()))
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .with_context(|| format!("creating {}", path.display()))
        .map_err(Failure::Data)
}

fn io_err(e: io::Error) -> Failure {
    Failure::Data(e.into())
}

fn validate(data: &DataArgs, year: i32, window: u32) -> Outcome {
    let p = Params {
        window,
        ..Params::for_year(year)
    };
    check_params(&p)?;
    let ds = load(&data.journals, &data.citations, data.scheme.as_deref())?;
    let report = validate_dataset(&ds, &p);
    let stdout = io::stdout();
    let mut out = stdout.lock();
    serde_json::to_writer_pretty(&mut out, &report).map_err(data_err)?;
    writeln!(out).map_err(io_err)?;
    if report.is_fatal() {
        let flags: Vec<String> = report.fatal.iter().map(ToString::to_string).collect();
        return Err(Failure::Data(anyhow!("fatal: {}", flags.join("; "))));
    }
    Ok(())
}

fn compute(
    data: &DataArgs,
    args: &ParamArgs,
    out: Option<&Path>,
    manifest_path: Option<PathBuf>,
    precision: usize,
    deterministic: bool,
) -> Outcome {
    let p = args.params()?;
    let registry = WeightingRegistry::default();
    let strategy = registry
        .get(&args.weighting_name())
        .map_err(|e| Failure::Usage(e.into()))?;

    let start = Instant::now();
    let ds = load(&data.journals, &data.citations, data.scheme.as_deref())?;
    let report = validate_dataset(&ds, &p);
    if report.is_fatal() {
        let flags: Vec<String> = report.fatal.iter().map(ToString::to_string).collect();
        return Err(Failure::Data(anyhow!("fatal: {}", flags.join("; "))));
    }
    let ingest = start.elapsed();
    let run = run_sjr2(&ds, &p, strategy.as_ref(), None).map_err(data_err)?;
    let baselines = compute_jif3y(&ds.documents, &run.art, &p);
    let rank = start.elapsed() - ingest;

    match out {
        Some(path) => {
            let mut w = create(path)?;
            write_scores(&mut w, &ds.journals, &run, &baselines, precision).map_err(io_err)?;
            w.flush().map_err(io_err)?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            write_scores(&mut w, &ds.journals, &run, &baselines, precision).map_err(io_err)?;
        }
    }

    let manifest_path = manifest_path.or_else(|| {
        out.map(|o| {
            let mut s = o.as_os_str().to_owned();
            s.push(".manifest.json");
            PathBuf::from(s)
        })
    });
    if let Some(path) = manifest_path {
        let mut inputs = vec![digest_file(&data.journals), digest_file(&data.citations)];
        if let Some(s) = &data.scheme {
            inputs.push(digest_file(s));
        }
        let manifest = RunManifest {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            params: p.clone(),
            weighting: strategy.name().into(),
            inputs: inputs
                .into_iter()
                .collect::<Result<_, _>>()
                .map_err(io_err)?,
            journals: ds.journals.len(),
            documents: ds.documents.len(),
            unscored: run.scores.unscored.len(),
            converged: run.prestige.converged,
            iterations: run.prestige.iterations,
            residual: run.prestige.residual,
            all_dangling_fallback: run.prestige.all_dangling_fallback,
            timing: (!deterministic).then(|| Timing {
                ingest_ms: ingest.as_secs_f64() * 1e3,
                rank_ms: rank.as_secs_f64() * 1e3,
                total_ms: start.elapsed().as_secs_f64() * 1e3,
            }),
        };
        let mut w = create(&path)?;
        serde_json::to_writer_pretty(&mut w, &manifest).map_err(data_err)?;
        writeln!(w).map_err(io_err)?;
        w.flush().map_err(io_err)?;
    }

    if !run.prestige.converged {
        return Err(Failure::NotConverged(format!(
            "no convergence after {} iterations (residual {:e}); scores written with converged=false",
            run.prestige.iterations, run.prestige.residual
        )));
    }
    Ok(())
}

/// Reads `journal_id,<name>...`; empty cells are undefined values.
fn read_extra_scores(path: &Path, ds: &Dataset) -> Result<Vec<ExternalScores>, Failure> {
    let file = File::open(path)
        .with_context(|| format!("opening {}", path.display()))
        .map_err(Failure::Data)?;
    let mut lines = BufReader::new(file).lines().enumerate().filter(|(_, l)| {
        l.as_ref()
            .map_or(true, |l| !l.trim().is_empty() && !l.starts_with('#'))
    });
    let (_, header) = lines
        .next()
        .ok_or_else(|| Failure::Data(anyhow!("{}: missing header", path.display())))?;
    let header = header.map_err(io_err)?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    if cols.first() != Some(&"journal_id") || cols.len() < 2 {
        return Err(Failure::Data(anyhow!(
            "{}: header must be `journal_id,<indicator>...`",
            path.display()
        )));
    }
    let mut out: Vec<ExternalScores> = cols[1..]
        .iter()
        .map(|name| ExternalScores {
            name: name.to_string(),
            values: vec![None; ds.journals.len()],
        })
        .collect();
    let mut unknown = 0usize;
    for (k, line) in lines {
        let line = line.map_err(io_err)?;
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != cols.len() {
            return Err(Failure::Data(anyhow!(
                "{}:{}: expected {} fields, found {}",
                path.display(),
                k + 1,
                cols.len(),
                fields.len()
            )));
        }
        let Some(idx) = ds.journals.index_of(fields[0]) else {
            unknown += 1;
            continue;
        };
        for (c, f) in fields[1..].iter().enumerate() {
            if f.is_empty() || f.eq_ignore_ascii_case("na") {
                continue;
            }
            let v: f64 = f.parse().map_err(|_| {
                Failure::Data(anyhow!("{}:{}: not a number: `{f}`", path.display(), k + 1))
            })?;
            out[c].values[idx as usize] = Some(v);
        }
    }
    if unknown > 0 {
        eprintln!(
            "warning: {unknown} row(s) in {} name unknown journals",
            path.display()
        );
    }
    Ok(out)
}

fn write_table(
    dir: &Path,
    name: &str,
    meta: &[(String, String)],
    body: impl FnOnce(&mut BufWriter<File>) -> io::Result<()>,
) -> Outcome {
    let mut w = create(&dir.join(name))?;
    report::write_header(&mut w, meta).map_err(io_err)?;
    body(&mut w).map_err(io_err)?;
    w.flush().map_err(io_err)
}

fn series_file_name(indicator: &str) -> String {
    let slug: String = indicator
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() {
                c.to_ascii_lowercase()
            } else {
                '_'
            }
        })
        .collect();
    format!("series_{}.tsv", slug.trim_matches('_'))
}

fn analyze(
    data: &OptionalDataArgs,
    args: &ParamArgs,
    out_dir: &Path,
    exclude_general: bool,
    extra: Option<&Path>,
    digits: usize,
) -> Outcome {
    let p = args.params()?;
    let (Some(journals), Some(citations)) = (&data.journals, &data.citations) else {
        return Err(Failure::Usage(anyhow!(
            "--journals and --citations are required"
        )));
    };
    let ds = load(journals, citations, data.scheme.as_deref())?;
    let report = validate_dataset(&ds, &p);
    if report.is_fatal() {
        let flags: Vec<String> = report.fatal.iter().map(ToString::to_string).collect();
        return Err(Failure::Data(anyhow!("fatal: {}", flags.join("; "))));
    }
    let external = match extra {
        Some(path) => read_extra_scores(path, &ds)?,
        None => Vec::new(),
    };
    let a = analyze::analyze_dataset(&ds, &p, &external, exclude_general).map_err(data_err)?;
    fs::create_dir_all(out_dir)
        .with_context(|| format!("creating {}", out_dir.display()))
        .map_err(Failure::Data)?;

    let mut meta = params_header(&p);
    meta.retain(|(k, _)| k != "weighting");
    meta.push((
        "converged_cosine".into(),
        a.with_cosine.prestige.converged.to_string(),
    ));
    meta.push((
        "converged_uniform".into(),
        a.without_cosine.prestige.converged.to_string(),
    ));
    meta.push(("exclude_general".into(), exclude_general.to_string()));

    write_table(out_dir, "correlations.tsv", &meta, |w| {
        report::write_correlations(w, &a.correlations, digits)
    })?;
    write_table(out_dir, "rates.tsv", &meta, |w| {
        report::write_rates(w, &a.rates, &ds.scheme, digits)
    })?;
    write_table(out_dir, "deviations.tsv", &meta, |w| {
        report::write_deviations(w, &a.deviations, digits)
    })?;
    write_table(out_dir, "flows.tsv", &meta, |w| {
        report::write_flow_matrix(w, &a.flows, digits)
    })?;
    write_table(out_dir, "within_flows.tsv", &meta, |w| {
        report::write_within_flows(w, &a.flows, digits)
    })?;
    write_table(out_dir, "fits.tsv", &meta, |w| {
        report::write_fits(w, &a.fits, digits)
    })?;
    for fit in &a.fits {
        let mut m = meta.clone();
        m.push(("indicator".into(), fit.indicator.clone()));
        write_table(out_dir, &series_file_name(&fit.indicator), &m, |w| {
            report::write_series(w, fit, digits)
        })?;
    }

    for (label, run) in [("cosine", &a.with_cosine), ("uniform", &a.without_cosine)] {
        if !run.prestige.converged {
            return Err(Failure::NotConverged(format!(
                "{label} run did not converge after {} iterations (residual {:e})",
                run.prestige.iterations, run.prestige.residual
            )));
        }
    }
    Ok(())
}

fn analyze_rates(path: &Path, out_dir: &Path, exclude_general: bool, digits: usize) -> Outcome {
    let file = File::open(path)
        .with_context(|| format!("opening {}", path.display()))
        .map_err(Failure::Data)?;
    let input = analyze::parse_rates(file).map_err(data_err)?;
    let table = input.deviations(GENERAL_CODE, exclude_general);
    fs::create_dir_all(out_dir)
        .with_context(|| format!("creating {}", out_dir.display()))
        .map_err(Failure::Data)?;
    let meta = vec![("rates_file".to_string(), path.display().to_string())];
    write_table(out_dir, "deviations.tsv", &meta, |w| {
        report::write_deviations(w, &table, digits)
    })
}

fn synth(cfg: &SynthConfig, out_dir: &Path) -> Outcome {
    let ds = generate(cfg).map_err(|e| Failure::Usage(e.into()))?;
    fs::create_dir_all(out_dir)
        .with_context(|| format!("creating {}", out_dir.display()))
        .map_err(Failure::Data)?;
    write_journals(create(&out_dir.join("journals.csv"))?, &ds.journals).map_err(data_err)?;
    write_citations(
        create(&out_dir.join("citations.jsonl"))?,
        &ds.documents,
        &ds.journals,
    )
    .map_err(data_err)?;
    write_scheme(create(&out_dir.join("scheme.csv"))?, &ds.scheme).map_err(data_err)?;
    let mut w = create(&out_dir.join("synth.toml"))?;
    writeln!(w, "# rng = {RNG_ALGORITHM}").map_err(io_err)?;
    writeln!(
        w,
        "# generator = {} {}",
        env!("CARGO_PKG_NAME"),
        env!("CARGO_PKG_VERSION")
    )
    .map_err(io_err)?;
    w.write_all(cfg.to_toml().as_bytes()).map_err(io_err)?;
    w.flush().map_err(io_err)?;
    eprintln!(
        "wrote {} journals and {} citing documents to {}",
        ds.journals.len(),
        ds.documents.len(),
        out_dir.display()
    );
    Ok(())
}

fn dump_cocit(data: &DataArgs, year: i32, window: u32, out_dir: &Path, digits: usize) -> Outcome {
    let p = Params {
        window,
        ..Params::for_year(year)
    };
    check_params(&p)?;
    let ds = load(&data.journals, &data.citations, data.scheme.as_deref())?;
    let cocit = build_cocitation(&ds.documents, ds.num_journals(), &p);
    let cmat = build_citation_matrix(&ds.documents, &ds.journals, &p);
    let cosines = cosines_for_edges(&cocit, &cmat);
    fs::create_dir_all(out_dir)
        .with_context(|| format!("creating {}", out_dir.display()))
        .map_err(Failure::Data)?;
    let id = |k: usize| ds.journals.as_slice()[k].id.as_str();
    let meta = params_header(&p);
    write_table(out_dir, "cocit.tsv", &meta, |w| {
        writeln!(w, "i\tj\tcocit")?;
        for (i, j, c) in cocit.upper_entries() {
            writeln!(w, "{}\t{}\t{c}", id(i), id(j))?;
        }
        Ok(())
    })?;
    write_table(out_dir, "cosine.tsv", &meta, |w| {
        writeln!(w, "j\ti\tcosine")?;
        for (j, i, c) in cosines.iter(&cmat) {
            writeln!(
                w,
                "{}\t{}\t{}",
                id(j),
                id(i),
                prestige_core::format::fmt_sig(c, digits)
            )?;
        }
        Ok(())
    })
}
