//! First nonvanishing twist and the exponent fit over families.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::time::Instant;

use super::{central_value_with, AfeParams};
use crate::arith::{self, fundamental_discriminants, FundamentalDiscriminant};
use crate::error::{Error, Result};
use crate::lseries::{archimedean_conductor, LSeriesSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanOptions {
    pub threshold: f64,
    pub bound: u64,
    /// Also test d sharing a prime with the level.
    pub include_ramified: bool,
    pub params: AfeParams,
    /// Record wall time; off gives byte-reproducible output.
    pub timing: bool,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            threshold: 1e-4,
            bound: 1000,
            include_ramified: false,
            params: AfeParams::default(),
            timing: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    /// Level or archimedean conductor of the family member.
    pub param: f64,
    pub d_min: Option<i64>,
    /// |L(1/2, π⊗χ_{d_min})|, or the largest value seen when none passed.
    pub value: f64,
    pub tested: usize,
    pub ms: u128,
    /// Failure for this member, if any.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScanOutcome {
    Found(ScanRecord),
    NoneBelowBound(ScanRecord),
}

impl ScanOutcome {
    pub fn record(&self) -> &ScanRecord {
        match self {
            ScanOutcome::Found(r) | ScanOutcome::NoneBelowBound(r) => r,
        }
    }
}

fn eligible(spec: &LSeriesSpec, d: &FundamentalDiscriminant, include_ramified: bool) -> bool {
    include_ramified || arith::gcd(spec.level, d.conductor()) == 1
}

/// Walks the fundamental discriminants in enumeration order and returns the
/// first d with |L(1/2, π⊗χ_d)| above the threshold at both the normal and
/// the doubled n-cutoff.
pub fn first_nonvanishing(spec: &LSeriesSpec, threshold: f64, bound: u64) -> Result<ScanOutcome> {
    let opts = ScanOptions {
        threshold,
        bound,
        ..ScanOptions::default()
    };
    first_nonvanishing_with(spec, spec.level as f64, &opts)
}

pub fn first_nonvanishing_with(spec: &LSeriesSpec, param: f64, opts: &ScanOptions) -> Result<ScanOutcome> {
    if !(opts.threshold > 0.0) {
        return Err(Error::Config("threshold must be positive".into()));
    }
    let start = Instant::now();
    let ds: Vec<FundamentalDiscriminant> = fundamental_discriminants(opts.bound)
        .into_iter()
        .filter(|d| eligible(spec, d, opts.include_ramified))
        .collect();
    let threads = rayon::current_num_threads().max(1);
    let batch = 4 * threads;
    let mut tested = 0usize;
    let mut best = 0.0f64;
    let doubled = AfeParams {
        cutoff_scale: 2.0 * opts.params.cutoff_scale,
        ..opts.params
    };
    for chunk in ds.chunks(batch) {
        let vals: Vec<Result<f64>> = chunk
            .par_iter()
            .map(|d| Ok(central_value_with(spec, d, opts.params)?.norm()))
            .collect();
        for (d, v) in chunk.iter().zip(vals) {
            let v = v?;
            tested += 1;
            best = best.max(v);
            if v > opts.threshold {
                let again = central_value_with(spec, d, doubled)?.norm();
                if again > opts.threshold {
                    let ms = if opts.timing { start.elapsed().as_millis() } else { 0 };
                    return Ok(ScanOutcome::Found(ScanRecord {
                        param,
                        d_min: Some(d.d()),
                        value: v,
                        tested,
                        ms,
                        error: None,
                    }));
                }
            }
        }
    }
    let ms = if opts.timing { start.elapsed().as_millis() } else { 0 };
    Ok(ScanOutcome::NoneBelowBound(ScanRecord {
        param,
        d_min: None,
        value: best,
        tested,
        ms,
        error: None,
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// χ_q for every prime q ≤ nmax (q = 2 is reported as a failed row).
    Gl1Primes { nmax: u64 },
    /// Level-one eigenforms of the listed weights.
    Gl2Weights { weights: Vec<u32> },
    /// Symmetric squares of level-one eigenforms of the listed weights.
    Gl3Sym2 { weights: Vec<u32> },
}

impl Family {
    /// (param, spec or failure) per member, in order.
    fn members(&self) -> Vec<(f64, Result<LSeriesSpec>)> {
        match self {
            Family::Gl1Primes { nmax } => arith::primes_up_to(*nmax as usize)
                .into_iter()
                .map(|q| {
                    let spec = if q == 2 {
                        Err(Error::Domain("no quadratic character of conductor 2".into()))
                    } else {
                        LSeriesSpec::quadratic_char(q as i64)
                    };
                    (q as f64, spec)
                })
                .collect(),
            Family::Gl2Weights { weights } => weights
                .iter()
                .map(|&k| {
                    let spec = LSeriesSpec::cusp_form(k);
                    let param = spec.as_ref().map_or(f64::NAN, archimedean_conductor);
                    (param, spec)
                })
                .collect(),
            Family::Gl3Sym2 { weights } => weights
                .iter()
                .map(|&k| {
                    let spec = LSeriesSpec::sym2_cusp(k);
                    let param = spec.as_ref().map_or(f64::NAN, archimedean_conductor);
                    (param, spec)
                })
                .collect(),
        }
    }
}

/// One record per family member; failures are kept in their row.
pub fn scan_family(family: &Family, opts: &ScanOptions) -> Vec<ScanRecord> {
    family
        .members()
        .into_iter()
        .map(|(param, spec)| {
            let fail = |e: Error| ScanRecord {
                param,
                d_min: None,
                value: f64::NAN,
                tested: 0,
                ms: 0,
                error: Some(e.to_string()),
            };
            match spec {
                Err(e) => fail(e),
                Ok(spec) => match first_nonvanishing_with(&spec, param, opts) {
                    Ok(out) => out.record().clone(),
                    Err(e) => fail(e),
                },
            }
        })
        .collect()
}

pub const CSV_HEADER: &str = "param,d_min,l_value,tested,ms";

pub fn write_csv<W: Write>(records: &[ScanRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(CSV_HEADER.split(',')).map_err(io)?;
    for r in records {
        let d = match (&r.error, r.d_min) {
            (Some(_), _) => "ERROR".to_string(),
            (None, Some(d)) => d.to_string(),
            (None, None) => "NONE".to_string(),
        };
        w.write_record([
            format!("{}", r.param),
            d,
            format!("{:.12e}", r.value),
            r.tested.to_string(),
            r.ms.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: std::io::Read>(input: R, label: &str) -> Result<Vec<ScanRecord>> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
    let headers = rdr
        .headers()
        .map_err(|e| Error::Config(format!("{label}: {e}")))?
        .clone();
    if headers.iter().collect::<Vec<_>>().join(",") != CSV_HEADER {
        return Err(Error::Config(format!("{label}: expected header {CSV_HEADER}")));
    }
    let mut out = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let line = i + 2;
        let row = row.map_err(|e| Error::Parse {
            path: label.into(),
            line,
            msg: e.to_string(),
        })?;
        let bad = |msg: &str| Error::Parse {
            path: label.into(),
            line,
            msg: msg.into(),
        };
        let param: f64 = row[0].parse().map_err(|_| bad("bad param"))?;
        let (d_min, error) = match &row[1] {
            "NONE" => (None, None),
            "ERROR" => (None, Some("failed".to_string())),
            s => (Some(s.parse::<i64>().map_err(|_| bad("bad d_min"))?), None),
        };
        out.push(ScanRecord {
            param,
            d_min,
            value: row[2].parse().unwrap_or(f64::NAN),
            tested: row[3].parse().map_err(|_| bad("bad tested"))?,
            ms: row[4].parse().map_err(|_| bad("bad ms"))?,
            error,
        });
    }
    Ok(out)
}

/// Least-squares slope of log|d_min| against log(param), with the residual
/// norm of the fit.
pub fn fit_exponent(records: &[ScanRecord]) -> Result<(f64, f64)> {
    let pts: Vec<(f64, f64)> = records
        .iter()
        .filter_map(|r| r.d_min.map(|d| (r.param.ln(), (d.unsigned_abs() as f64).ln())))
        .filter(|(x, _)| x.is_finite())
        .collect();
    if pts.len() < 3 {
        return Err(Error::Domain(format!("need ≥ 3 rows with d_min found, have {}", pts.len())));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Domain("all rows share one parameter; slope undefined".into()));
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let resid = pts
        .iter()
        .map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2))
        .sum::<f64>()
        .sqrt();
    Ok((slope, resid))
}
