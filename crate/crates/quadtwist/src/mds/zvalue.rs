//! Truncated evaluation of Z(s, w) in its region of absolute convergence.
//!
//! The d-expansion sums rows Σ_n b(d, n) n^{−s} = χ(d₀) L^S(s, π⊗χ) P_d(s),
//! which needs Re w > 1; the n-expansion sums columns
//! χ(n₀) L^S(w, χ̃_n) Q̂_n(w), which needs Re s > 1. When both hold the
//! remaining strip is filled from the other expansion minus the box
//! already counted.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::global::Setup;
use super::local::Variant;
use super::{elementary_from_complete, Tags};
use crate::arith::{self, FundamentalDiscriminant};
use crate::central::{resolved_twist, AfeParams, Smoothed};
use crate::error::{Error, Result};
use crate::lseries::{LSeriesSpec, Twist};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZSide {
    /// Sum over d first; needs Re w > 1.
    D,
    /// Sum over n first; needs Re s > 1.
    N,
    /// D when Re w > 1, otherwise N.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZOptions {
    /// Largest d (and n) kept in the truncated sums.
    pub cutoff: usize,
    pub side: ZSide,
    pub variant: Variant,
    pub params: AfeParams,
}

impl Default for ZOptions {
    fn default() -> Self {
        Self {
            cutoff: 200,
            side: ZSide::Auto,
            variant: Variant::Unramified,
            params: AfeParams::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZValue {
    pub value: Complex64,
    /// Heuristic size of the discarded tail.
    pub tail: f64,
    pub side: ZSide,
    /// The complementary expansion was used for the strip beyond the cutoff.
    pub hybrid: bool,
}

/// Z(s, w) with default options.
pub fn z_value(spec: &LSeriesSpec, tags: Tags, s: Complex64, w: Complex64, cutoff: usize) -> Result<Complex64> {
    let opts = ZOptions {
        cutoff,
        ..Default::default()
    };
    Ok(z_value_with(spec, tags, s, w, &opts)?.value)
}

fn tail_sum(x: f64, sigma: f64) -> f64 {
    x.powf(1.0 - sigma) / (sigma - 1.0)
}

fn pow_neg(m: u64, s: Complex64) -> Complex64 {
    (-s * (m as f64).ln()).exp()
}

fn poly_at(p: u64, poly: &[Complex64], s: Complex64) -> Complex64 {
    let x = pow_neg(p, s);
    poly.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * x + a)
}

/// Π_{p∈S} L_p(s)^{−1} for the twist.
fn removed_factors(tw: &Twist, primes: &[u64], s: Complex64) -> Result<Complex64> {
    let r = tw.degree();
    let mut out = Complex64::new(1.0, 0.0);
    for &p in primes {
        let top = (p as usize).pow(r as u32);
        let c = tw.coeffs(top)?;
        let h: Vec<Complex64> = (0..=r).map(|j| c[(p as usize).pow(j as u32)]).collect();
        let e = elementary_from_complete(&h);
        let x = pow_neg(p, s);
        let mut f = Complex64::new(0.0, 0.0);
        let mut xp = Complex64::new(1.0, 0.0);
        for (i, ei) in e.iter().enumerate() {
            f += if i % 2 == 0 { ei * xp } else { -ei * xp };
            xp *= x;
        }
        out *= f;
    }
    Ok(out)
}

fn partial_l(tw: &Twist, primes: &[u64], s: Complex64, params: AfeParams) -> Result<Complex64> {
    let l = Smoothed::new(tw, params)?.l_value(s)?;
    Ok(l * removed_factors(tw, primes, s)?)
}

fn disc_of(m: i64) -> Result<FundamentalDiscriminant> {
    let (k, _) = arith::squarefree_decompose(m.unsigned_abs())?;
    FundamentalDiscriminant::from_squarefree(k as i64 * m.signum())
}

/// Σ_n b(d, n) n^{−s}.
fn row_value(st: &Setup<Complex64>, spec: &LSeriesSpec, d: u64, s: Complex64, params: AfeParams) -> Result<Complex64> {
    let (d0, _) = arith::squarefree_decompose(d)?;
    let fd = disc_of(d0 as i64 * st.tags.n_char.label())?;
    let tw = resolved_twist(spec, &fd, params)?;
    let mut v = partial_l(&tw, &st.excluded, s, params)?;
    for (p, poly) in st.p_factors(d) {
        v *= poly_at(p, &poly, s);
    }
    Ok(v * st.tags.d_char.eval(d0 as i64) as f64)
}

/// Σ_d b(d, n) d^{−w}.
fn column_value(st: &Setup<Complex64>, n: u64, w: Complex64, params: AfeParams) -> Result<Complex64> {
    let (n0, _) = arith::squarefree_decompose(n)?;
    let star = if n0 % 4 == 1 { n0 as i64 } else { -(n0 as i64) };
    let fd = disc_of(star * st.tags.d_char.label())?;
    let tw = LSeriesSpec::riemann_zeta().twist(&fd)?;
    let mut v = partial_l(&tw, &st.excluded, w, params)?;
    for (p, poly) in st.q_factors(n) {
        v *= poly_at(p, &poly, w);
    }
    Ok(v * st.tags.n_char.eval(n0 as i64) as f64)
}

pub fn z_value_with(spec: &LSeriesSpec, tags: Tags, s: Complex64, w: Complex64, opts: &ZOptions) -> Result<ZValue> {
    let d_ok = w.re > 1.0;
    let n_ok = s.re > 1.0;
    let side = match opts.side {
        ZSide::Auto if d_ok => ZSide::D,
        ZSide::Auto if n_ok => ZSide::N,
        ZSide::D if d_ok => ZSide::D,
        ZSide::N if n_ok => ZSide::N,
        _ => {
            return Err(Error::Domain(format!(
                "Z(s, w) at s = {s}, w = {w} is outside the region of absolute convergence on the requested side"
            )))
        }
    };
    let st = Setup::<Complex64>::new(spec, tags, opts.cutoff, opts.variant)?;
    let idx: Vec<u64> = (1..=opts.cutoff as u64).filter(|&m| st.admissible(m)).collect();
    let x = opts.cutoff as f64;
    let params = opts.params;
    // s_out goes with the variable summed first
    let (inner_ok, s_out, s_in) = match side {
        ZSide::D => (n_ok, w, s),
        _ => (d_ok, s, w),
    };
    let lines: Vec<Result<(u64, Complex64)>> = idx
        .par_iter()
        .map(|&m| {
            let v = match side {
                ZSide::D => row_value(&st, spec, m, s, params)?,
                _ => column_value(&st, m, w, params)?,
            };
            Ok((m, v))
        })
        .collect();
    let mut value = Complex64::new(0.0, 0.0);
    let mut biggest = 0.0f64;
    for l in lines {
        let (m, v) = l?;
        biggest = biggest.max(v.norm());
        value += v * pow_neg(m, s_out);
    }
    if !inner_ok {
        return Ok(ZValue {
            value,
            tail: biggest * tail_sum(x, s_out.re),
            side,
            hybrid: false,
        });
    }
    // strip beyond the cutoff, taken along the other variable
    let strip: Vec<Result<(Complex64, f64)>> = idx
        .par_iter()
        .map(|&m| {
            let (full, box_line) = match side {
                ZSide::D => (column_value(&st, m, w, params)?, st.column(m)),
                _ => (row_value(&st, spec, m, s, params)?, st.row(m)),
            };
            let counted: Complex64 = idx.iter().map(|&k| box_line[k as usize] * pow_neg(k, s_out)).sum();
            let big = box_line.iter().map(|z| z.norm()).fold(0.0, f64::max);
            Ok(((full - counted) * pow_neg(m, s_in), big))
        })
        .collect();
    let mut k = 0.0f64;
    for r in strip {
        let (v, big) = r?;
        value += v;
        k = k.max(big);
    }
    Ok(ZValue {
        value,
        tail: k * tail_sum(x, w.re) * tail_sum(x, s.re),
        side,
        hybrid: true,
    })
}
