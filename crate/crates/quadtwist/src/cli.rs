//! Command-line front end.

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::arith::FundamentalDiscriminant;
use crate::central::{
    self, fit_exponent, read_csv, resolved_twist, scan_family, smoothed_moment_with, write_csv, AfeParams, DiscSet,
    Family, MomentOptions, ScanOptions, Smoothed,
};
use crate::error::{Error, Result};
use crate::fewalk::{self, WalkResult};
use crate::lseries::{CoeffSource, LSeriesSpec};
use crate::mds::{self, Tags, Variant};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Jsonl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    Gl1Primes,
    Gl2Weights,
    Gl3Sym2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Discs {
    Positive,
    Negative,
    Both,
}

impl From<Discs> for DiscSet {
    fn from(d: Discs) -> Self {
        match d {
            Discs::Positive => DiscSet::Positive,
            Discs::Negative => DiscSet::Negative,
            Discs::Both => DiscSet::Both,
        }
    }
}

/// Which L-series to work with.
#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SpecArgs {
    /// riemann-zeta, quadratic-char:Q, delta-weight-12, cusp-weight:K or sym2-of:<GL(2) generator>.
    #[arg(long, default_value = "riemann-zeta")]
    pub spec: String,
    /// Read coefficients "n,re[,im]" from a file instead of --spec.
    #[arg(long)]
    pub coeff_file: Option<PathBuf>,
    /// Gamma shifts for a coefficient file.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub kappas: Vec<f64>,
    /// Gamma shifts for twists by negative d (default: same as --kappas).
    #[arg(long, value_delimiter = ',')]
    pub kappas_odd: Option<Vec<f64>>,
    /// Level of a coefficient-file series.
    #[arg(long, default_value_t = 1)]
    pub level: u64,
    /// Root number of a coefficient-file series; estimated when absent.
    #[arg(long)]
    pub epsilon: Option<f64>,
}

impl SpecArgs {
    pub fn build(&self) -> Result<LSeriesSpec> {
        let Some(path) = &self.coeff_file else {
            return LSeriesSpec::from_descriptor(&self.spec);
        };
        let re = |v: &[f64]| v.iter().map(|&k| Complex64::new(k, 0.0)).collect::<Vec<_>>();
        let odd = self.kappas_odd.clone().unwrap_or_else(|| self.kappas.clone());
        LSeriesSpec::custom(
            &path.display().to_string(),
            self.level,
            re(&self.kappas),
            re(&odd),
            CoeffSource::File(path.clone()),
            self.epsilon.map(|e| Complex64::new(e, 0.0)),
            true,
        )
    }
}

fn parse_tags(text: &str) -> Result<Vec<Tags>> {
    if text == "all" {
        return Ok(Tags::all());
    }
    let parts: Vec<&str> = text.split(',').collect();
    let bad = || Error::Config(format!("tags must be \"all\" or \"A1L1,A2L2\", got {text:?}"));
    if parts.len() != 2 {
        return Err(bad());
    }
    let a: i64 = parts[0].trim().parse().map_err(|_| bad())?;
    let b: i64 = parts[1].trim().parse().map_err(|_| bad())?;
    Ok(vec![Tags::from_labels(a, b).map_err(|e| Error::Config(e.to_string()))?])
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// L(s, π⊗χ_d) from the smoothed approximate functional equation.
    Lvalue {
        #[command(flatten)]
        spec: SpecArgs,
        /// Fundamental discriminant of the twist.
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        d: i64,
        #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
        sigma: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        t: f64,
    },
    /// First d with L(1/2, π⊗χ_d) ≠ 0 for each member of a family.
    Scan {
        #[arg(long, value_enum, default_value = "gl1-primes")]
        family: FamilyKind,
        /// Largest prime conductor for gl1-primes.
        #[arg(long, default_value_t = 300)]
        nmax: u64,
        /// Weights for the GL(2) and GL(3) families.
        #[arg(long, value_delimiter = ',', default_value = "12,16,18,20,22,26")]
        weights: Vec<u32>,
        #[arg(long, default_value_t = 1e-4)]
        threshold: f64,
        /// Largest |d| tried.
        #[arg(long, default_value_t = 1000)]
        bound: u64,
        #[arg(long)]
        include_ramified: bool,
        /// Write 0 in the ms column so that output is reproducible.
        #[arg(long)]
        no_timing: bool,
    },
    /// Fits log|d_min| against log N from a scan CSV.
    Fit {
        /// Scan CSV to read.
        #[arg(long)]
        input: PathBuf,
        /// Where to write the "logN,logdmin" data for plotting.
        #[arg(long)]
        data: Option<PathBuf>,
    },
    /// Checks that the d- and n-expansions of the double series agree.
    MdsVerify {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, default_value_t = 500)]
        cutoff: usize,
        /// "all" or a pair "A1L1,A2L2" with labels in {1,-1,2,-2}.
        #[arg(long, default_value = "all", allow_hyphen_values = true)]
        tags: String,
        /// Keep d and n divisible by the conductor q of π = χ_q.
        #[arg(long)]
        ramified: bool,
    },
    /// Correction polynomials P and Q̂ at one prime.
    SolveCorrections {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 4)]
        max_index: usize,
        /// Local character values; all four pairs when absent.
        #[arg(long, allow_hyphen_values = true)]
        chi1: Option<i8>,
        #[arg(long, allow_hyphen_values = true)]
        chi2: Option<i8>,
        #[arg(long)]
        ramified: bool,
    },
    /// Composes the functional equations until the argument returns.
    Fewalk {
        #[arg(long, default_value_t = 2)]
        r: u32,
        #[arg(long, default_value_t = 50)]
        max_depth: usize,
        /// Evaluate this word (letters a/b) instead of searching.
        #[arg(long)]
        word: Option<String>,
        /// Also print the completed functional equation of Z(1/2, w).
        #[arg(long)]
        record: bool,
        #[arg(long)]
        psi_quadratic: bool,
    },
    /// Smoothed first moment ℐ(X) over the twists.
    Moment {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, value_delimiter = ',', default_value = "25,50,100,200")]
        x: Vec<f64>,
        #[arg(long, value_enum, default_value = "positive")]
        discs: Discs,
        #[arg(long, default_value_t = 1_000_000)]
        bound: u64,
    },
    /// Order and size of the pole at w = 1 from the moment growth.
    Residue {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, default_value = "1,1", allow_hyphen_values = true)]
        tags: String,
    },
    /// Conductor of π⊗χ_d.
    Conductor {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        d: Vec<i64>,
    },
}

/// Everything a run depends on; round-trips through --dump-config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub output: Option<PathBuf>,
    pub format: Format,
}

#[derive(Debug, Parser)]
#[command(name = "quadtwist", version, about = "Quadratic twists of L-series: central values, scans, double Dirichlet series")]
pub struct Cli {
    /// Print the resolved configuration as JSON and exit.
    #[arg(long, global = true)]
    pub dump_config: bool,
    /// Run the configuration stored in a JSON file, ignoring the subcommand.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write results here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv", global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Option<Command>,
}

impl Cli {
    pub fn into_config(self) -> Result<RunConfig> {
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            return serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())));
        }
        let command = self
            .command
            .ok_or_else(|| Error::Config("a subcommand or --config is required".into()))?;
        Ok(RunConfig {
            command,
            output: self.output,
            format: self.format,
        })
    }
}

/// Rows of text cells under a header; written as CSV or JSON lines.
struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    fn write(&self, fmt: Format, out: &mut dyn Write) -> Result<()> {
        match fmt {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                let io = |e: csv::Error| Error::Io(io::Error::other(e));
                w.write_record(&self.header).map_err(io)?;
                for r in &self.rows {
                    w.write_record(r).map_err(io)?;
                }
                w.flush()?;
            }
            Format::Jsonl => {
                for r in &self.rows {
                    let mut obj = serde_json::Map::new();
                    for (k, v) in self.header.iter().zip(r) {
                        let val = match v.parse::<f64>() {
                            Ok(x) if x.is_finite() => serde_json::json!(x),
                            _ => serde_json::json!(v),
                        };
                        obj.insert(k.to_string(), val);
                    }
                    writeln!(out, "{}", serde_json::Value::Object(obj))?;
                }
            }
        }
        Ok(())
    }
}

fn json_line<T: Serialize>(out: &mut dyn Write, v: &T) -> Result<()> {
    let s = serde_json::to_string(v).map_err(|e| Error::Numeric(e.to_string()))?;
    writeln!(out, "{s}")?;
    Ok(())
}

fn f(x: f64) -> String {
    format!("{x:.15e}")
}

/// Executes one configured run, writing results to `out`.
pub fn run(cfg: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let fmt = cfg.format;
    match &cfg.command {
        Command::Lvalue { spec, d, sigma, t } => {
            let spec = spec.build()?;
            let fd = FundamentalDiscriminant::new(*d)?;
            let s = Complex64::new(*sigma, *t);
            let params = AfeParams::default();
            let v = if s == Complex64::new(0.5, 0.0) {
                central::central_value_with(&spec, &fd, params)?
            } else {
                let tw = resolved_twist(&spec, &fd, params)?;
                Smoothed::new(&tw, params)?.l_value(s)?
            };
            let mut tab = Table::new(&["spec", "d", "sigma", "t", "re", "im"]);
            tab.push(vec![spec.name.clone(), d.to_string(), sigma.to_string(), t.to_string(), f(v.re), f(v.im)]);
            tab.write(fmt, out)
        }
        Command::Scan {
            family,
            nmax,
            weights,
            threshold,
            bound,
            include_ramified,
            no_timing,
        } => {
            let fam = match family {
                FamilyKind::Gl1Primes => Family::Gl1Primes { nmax: *nmax },
                FamilyKind::Gl2Weights => Family::Gl2Weights { weights: weights.clone() },
                FamilyKind::Gl3Sym2 => Family::Gl3Sym2 { weights: weights.clone() },
            };
            let opts = ScanOptions {
                threshold: *threshold,
                bound: *bound,
                include_ramified: *include_ramified,
                timing: !no_timing,
                ..Default::default()
            };
            let recs = scan_family(&fam, &opts);
            match fmt {
                Format::Csv => write_csv(&recs, out),
                Format::Jsonl => recs.iter().try_for_each(|r| json_line(out, r)),
            }
        }
        Command::Fit { input, data } => {
            let file = File::open(input).map_err(|e| Error::Config(format!("{}: {e}", input.display())))?;
            let recs = read_csv(file, &input.display().to_string())?;
            let (slope, resid) = fit_exponent(&recs)?;
            let pts: Vec<(f64, f64)> = recs
                .iter()
                .filter_map(|r| r.d_min.map(|d| (r.param.ln(), (d.unsigned_abs() as f64).ln())))
                .collect();
            let n = pts.len() as f64;
            let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
            let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
            let intercept = my - slope * mx;
            if let Some(path) = data {
                write_fit_data(path, &pts, slope, intercept)?;
            }
            let mut tab = Table::new(&["theta_hat", "intercept", "residual", "rows"]);
            tab.push(vec![f(slope), f(intercept), f(resid), pts.len().to_string()]);
            tab.write(fmt, out)
        }
        Command::MdsVerify {
            spec,
            cutoff,
            tags,
            ramified,
        } => {
            let spec = spec.build()?;
            let variant = if *ramified { Variant::RamifiedGl1 } else { Variant::Unramified };
            let mut tab = Table::new(&[
                "spec",
                "a1l1",
                "a2l2",
                "cutoff",
                "exact",
                "checked",
                "mismatches",
                "max_discrepancy",
                "first_failure",
            ]);
            let mut failed = Vec::new();
            for t in parse_tags(tags)? {
                let rep = mds::interchange_check(&spec, t, *cutoff, variant)?;
                let first = rep.first_failure.map_or("-".to_string(), |(d, n)| format!("{d}:{n}"));
                if !rep.passed() {
                    failed.push(format!("({},{})", t.n_char.label(), t.d_char.label()));
                }
                tab.push(vec![
                    spec.name.clone(),
                    t.n_char.label().to_string(),
                    t.d_char.label().to_string(),
                    cutoff.to_string(),
                    rep.exact.to_string(),
                    rep.checked.to_string(),
                    rep.mismatches.to_string(),
                    format!("{:.3e}", rep.max_discrepancy),
                    first,
                ]);
            }
            tab.write(fmt, out)?;
            if failed.is_empty() {
                Ok(())
            } else {
                Err(Error::Domain(format!("interchange identity fails for tags {}", failed.join(" "))))
            }
        }
        Command::SolveCorrections {
            spec,
            p,
            max_index,
            chi1,
            chi2,
            ramified,
        } => {
            let spec = spec.build()?;
            let variant = if *ramified { Variant::RamifiedGl1 } else { Variant::Unramified };
            let c1: Vec<i8> = chi1.map_or(vec![1, -1], |c| vec![c]);
            let c2: Vec<i8> = chi2.map_or(vec![1, -1], |c| vec![c]);
            let mut fams = Vec::new();
            for &a in &c1 {
                for &b in &c2 {
                    fams.push(mds::solve_corrections(&spec, *p, a, b, *max_index, variant)?);
                }
            }
            match fmt {
                Format::Csv => out.write_all(mds::write_corrections(&fams).as_bytes())?,
                Format::Jsonl => fams.iter().try_for_each(|fam| json_line(out, fam))?,
            }
            Ok(())
        }
        Command::Fewalk {
            r,
            max_depth,
            word,
            record,
            psi_quadratic,
        } => {
            let prefixes = match word {
                Some(w) => {
                    let moves = fewalk::parse_word(w)?;
                    (1..=moves.len()).map(|k| fewalk::word_step(*r, &moves[..k])).collect()
                }
                None => match fewalk::walk_to_return(*r, *max_depth) {
                    WalkResult::Returned { prefixes, .. } => prefixes,
                    WalkResult::NoReturn { depth } => {
                        writeln!(out, "no return within depth {depth} for r = {r}")?;
                        return Ok(());
                    }
                },
            };
            let rows = fewalk::step_rows(*r, &prefixes);
            let last = prefixes.last().cloned().unwrap_or_else(fewalk::AffineStep::identity);
            let half = fewalk::specialize_half(&last);
            let theta = half.theta.as_ref().map_or("none".to_string(), |t| t.to_string());
            match fmt {
                Format::Csv => {
                    let mut tab = Table::new(&["len", "word", "map", "exponent"]);
                    for row in &rows {
                        tab.push(vec![row.len.to_string(), row.word.clone(), row.map.clone(), row.exponent.clone()]);
                    }
                    tab.write(fmt, out)?;
                    writeln!(
                        out,
                        "# s = 1/2: w -> {}, exponent {}, theta = {theta}",
                        half.w_image, half.exponent
                    )?;
                }
                Format::Jsonl => {
                    rows.iter().try_for_each(|row| json_line(out, row))?;
                    json_line(
                        out,
                        &serde_json::json!({
                            "w_image": half.w_image.to_string(),
                            "exponent_at_half": half.exponent.to_string(),
                            "theta": theta,
                        }),
                    )?;
                }
            }
            if *record {
                let rec = fewalk::funct_eq_record(*r, *psi_quadratic)?;
                json_line(out, &rec)?;
            }
            Ok(())
        }
        Command::Moment { spec, x, discs, bound } => {
            let spec = spec.build()?;
            let opts = MomentOptions {
                discs: (*discs).into(),
                ..Default::default()
            };
            let mut tab = Table::new(&["x", "moment", "ratio"]);
            for &xv in x {
                let m = smoothed_moment_with(&spec, xv, *bound, &opts, |d| {
                    central::central_value_with(&spec, d, opts.params)
                })?;
                tab.push(vec![xv.to_string(), f(m), f(m / xv)]);
            }
            tab.write(fmt, out)
        }
        Command::Residue { spec, tags } => {
            let spec = spec.build()?;
            let tags = parse_tags(tags)?;
            let mut tab = Table::new(&[
                "spec",
                "a1l1",
                "a2l2",
                "order",
                "kappa",
                "kappa_se",
                "kappa_log",
                "kappa_log_se",
                "nonzero",
                "inconclusive",
            ]);
            for t in tags {
                let est = mds::residue_estimate(&spec, t)?;
                tab.push(vec![
                    spec.name.clone(),
                    t.n_char.label().to_string(),
                    t.d_char.label().to_string(),
                    est.order.to_string(),
                    f(est.kappa),
                    f(est.kappa_se),
                    f(est.kappa_log),
                    f(est.kappa_log_se),
                    est.nonzero.to_string(),
                    est.inconclusive.unwrap_or_default(),
                ]);
            }
            tab.write(fmt, out)
        }
        Command::Conductor { spec, d } => {
            let spec = spec.build()?;
            let mut tab = Table::new(&["spec", "d", "conductor"]);
            for &dv in d {
                let fd = FundamentalDiscriminant::new(dv)?;
                tab.push(vec![spec.name.clone(), dv.to_string(), spec.twisted_conductor(&fd)?.to_string()]);
            }
            tab.write(fmt, out)
        }
    }
}

fn write_fit_data(path: &Path, pts: &[(f64, f64)], slope: f64, intercept: f64) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "# fit: logdmin = {slope:.12} * logN + {intercept:.12}")?;
    writeln!(w, "logN,logdmin")?;
    for (x, y) in pts {
        writeln!(w, "{x:.12},{y:.12}")?;
    }
    w.flush()?;
    Ok(())
}

/// Caps the global thread pool from QUADTWIST_THREADS.
pub fn init_threads() -> Result<()> {
    let Ok(v) = std::env::var("QUADTWIST_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::Config(format!("QUADTWIST_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Config(e.to_string()))
}

/// Parses the command line, runs it and returns the process exit status.
pub fn main_entry() -> i32 {
    let cli = Cli::parse();
    let dump = cli.dump_config;
    let result = (|| -> Result<()> {
        init_threads()?;
        let cfg = cli.into_config()?;
        if dump {
            let s = serde_json::to_string_pretty(&cfg).map_err(|e| Error::Config(e.to_string()))?;
            println!("{s}");
            return Ok(());
        }
        match &cfg.output {
            Some(path) => {
                let mut w = BufWriter::new(File::create(path)?);
                run(&cfg, &mut w)?;
                w.flush()?;
                Ok(())
            }
            None => {
                let stdout = io::stdout();
                let mut lock = stdout.lock();
                run(&cfg, &mut lock)
            }
        }
    })();
    match result {
        Ok(()) => 0,
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            eprintln!("error[{}]: {msg}", e.exit_code());
            e.exit_code()
        }
    }
}
