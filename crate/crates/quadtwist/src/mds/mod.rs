//! Double Dirichlet series Z(s, w) = Σ_{d,n} b(d, n) d^{−w} n^{−s} built from
//! quadratic twists, with the correction polynomials that make its two
//! iterated expansions agree.

mod field;
mod global;
mod local;
mod residue;
mod zvalue;

use num_complex::Complex64;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

use crate::arith::{self, kronecker_raw, AuxChar};
use crate::error::{Error, Result};
use crate::lseries::LSeriesSpec;

pub use field::Field;
pub use global::{build_coefficients, interchange_check, InterchangeReport, MdsCoefficients};
pub use local::{fe_defect, solve_local, LocalProblem, LocalSolution, Variant};
pub use residue::{residue_estimate, residue_estimate_with, ResidueEstimate, ResidueOptions};
pub use zvalue::{z_value, z_value_with, ZOptions, ZSide, ZValue};

/// The pair of auxiliary characters (χ_{a₁ℓ₁}, χ_{a₂ℓ₂}) twisting the n- and
/// d-variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Tags {
    pub n_char: AuxChar,
    pub d_char: AuxChar,
}

impl Tags {
    pub fn trivial() -> Self {
        Self::from_labels(1, 1).expect("valid labels")
    }

    pub fn from_labels(a1l1: i64, a2l2: i64) -> Result<Self> {
        Ok(Self {
            n_char: AuxChar::from_label(a1l1)?,
            d_char: AuxChar::from_label(a2l2)?,
        })
    }

    /// All sixteen tag pairs.
    pub fn all() -> Vec<Tags> {
        let mut out = Vec::new();
        for a in AuxChar::ALL {
            for b in AuxChar::ALL {
                out.push(Tags { n_char: a, d_char: b });
            }
        }
        out
    }
}

/// Σ_k a_k p^{−ks}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirichletPolynomial {
    pub p: u64,
    pub coeffs: Vec<Complex64>,
}

impl DirichletPolynomial {
    pub fn one(p: u64) -> Self {
        Self {
            p,
            coeffs: vec![Complex64::new(1.0, 0.0)],
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, s: Complex64) -> Complex64 {
        let x = (-s * (self.p as f64).ln()).exp();
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * x + a)
    }

    /// max_m |a_{2k−m} − p^{k−m} a_m|, zero iff P(1−s) = p^{(2s−1)k} P(s).
    pub fn fe_defect(&self) -> f64 {
        fe_defect(self.p, &self.coeffs)
    }

    /// |P(1−s) − p^{(2s−1)k}P(s)| at one point.
    pub fn fe_residual_at(&self, s: Complex64) -> f64 {
        let k = self.degree() as f64 / 2.0;
        let lhs = self.eval(1.0 - s);
        let rhs = ((2.0 * s - 1.0) * k * (self.p as f64).ln()).exp() * self.eval(s);
        (lhs - rhs).norm()
    }
}

fn check_odd_prime(p: u64, what: &str) -> Result<()> {
    if p < 3 || !arith::is_prime(p) {
        return Err(Error::Domain(format!("{what} must be an odd prime, got {p}")));
    }
    Ok(())
}

/// 1 − χ_q(p) p^{−s} + p^{1−2s}: the correction at d = q·p².
pub fn correction_poly_prime(q: u64, p: u64) -> Result<DirichletPolynomial> {
    check_odd_prime(q, "q")?;
    check_odd_prime(p, "p")?;
    if q % 4 != 1 || p == q {
        return Err(Error::Domain(format!("need q ≡ 1 mod 4 and p ≠ q, got q = {q}, p = {p}")));
    }
    let chi = kronecker_raw(q as i128, p as i128) as f64;
    Ok(DirichletPolynomial {
        p,
        coeffs: vec![1.0, -chi, p as f64].into_iter().map(|x| Complex64::new(x, 0.0)).collect(),
    })
}

/// c(p^j) for j < count, continued past the degree by the Hecke recursion.
pub fn local_coeffs(spec: &LSeriesSpec, p: u64, count: usize) -> Result<Vec<Complex64>> {
    if let Some(disc) = spec.is_gl1_quadratic() {
        let chi = kronecker_raw(disc as i128, p as i128) as f64;
        return Ok((0..count).map(|j| Complex64::new(chi.powi(j as i32), 0.0)).collect());
    }
    let r = spec.degree();
    let top = (p as usize).checked_pow(r as u32).ok_or_else(|| {
        Error::Domain(format!("p^{r} overflows for p = {p}"))
    })?;
    let c = spec.coeffs(top)?;
    let mut h: Vec<Complex64> = (0..=r).map(|j| c[(p as usize).pow(j as u32)]).collect();
    let e = elementary_from_complete(&h);
    while h.len() < count {
        let j = h.len();
        let next = (1..=r)
            .map(|i| if i % 2 == 1 { e[i] * h[j - i] } else { -e[i] * h[j - i] })
            .sum();
        h.push(next);
    }
    h.truncate(count);
    Ok(h)
}

/// e_0..e_r from h_0..h_r via Σ_i (−1)^i e_i h_{j−i} = 0.
pub(crate) fn elementary_from_complete(h: &[Complex64]) -> Vec<Complex64> {
    let r = h.len() - 1;
    let mut e = vec![Complex64::new(1.0, 0.0)];
    for j in 1..=r {
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, ei) in e.iter().enumerate() {
            let term = ei * h[j - i];
            acc += if i % 2 == 0 { term } else { -term };
        }
        // (−1)^j e_j = −acc
        e.push(if j % 2 == 0 { -acc } else { acc });
    }
    e
}

/// P and Q̂ at one prime for one pair of local character values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrectionFamily {
    pub p: u64,
    pub chi1: i8,
    pub chi2: i8,
    pub variant: Variant,
    /// Solved in exact rational arithmetic.
    pub exact: bool,
    /// P_a for a = 0..=max_index.
    pub p_polys: Vec<DirichletPolynomial>,
    /// Q̂_b = c(p^b)·Q_b for b = 0..=max_index.
    pub q_polys: Vec<DirichletPolynomial>,
}

pub(crate) fn check_variant(spec: &LSeriesSpec, p: u64, variant: Variant) -> Result<()> {
    check_odd_prime(p, "p")?;
    match variant {
        Variant::Unramified => {
            if spec.level.is_multiple_of(p) {
                return Err(Error::Domain(format!("p = {p} divides the level {}", spec.level)));
            }
        }
        Variant::RamifiedGl1 => match spec.is_gl1_quadratic() {
            Some(q) if q as u64 == p && p % 4 == 1 => {}
            _ => {
                return Err(Error::Domain(format!(
                    "ramified correction needs π = χ_q with q = p ≡ 1 mod 4, got {} at p = {p}",
                    spec.name
                )))
            }
        },
    }
    Ok(())
}

pub(crate) fn local_problem<F: Field>(
    spec: &LSeriesSpec,
    p: u64,
    chi1: i8,
    chi2: i8,
    variant: Variant,
    count: usize,
) -> Result<LocalProblem<F>> {
    let c = match variant {
        Variant::Unramified => local_coeffs(spec, p, count)?
            .into_iter()
            .map(F::from_complex)
            .collect::<Result<Vec<F>>>()?,
        Variant::RamifiedGl1 => (0..count).map(|j| if j == 0 { F::one() } else { F::zero() }).collect(),
    };
    Ok(LocalProblem {
        p,
        degree: spec.degree(),
        c,
        chi1,
        chi2,
        variant,
    })
}

/// Whether the coefficient arithmetic for `spec` can be exact.
pub(crate) fn exact_source(spec: &LSeriesSpec) -> bool {
    spec.is_gl1_quadratic().is_some()
}

/// Local correction polynomials at p up to index p^max_index.
pub fn solve_corrections(
    spec: &LSeriesSpec,
    p: u64,
    chi1: i8,
    chi2: i8,
    max_index: usize,
    variant: Variant,
) -> Result<CorrectionFamily> {
    check_variant(spec, p, variant)?;
    if !(chi1 == 1 || chi1 == -1) || !(chi2 == 1 || chi2 == -1) {
        return Err(Error::Domain(format!("local character values must be ±1, got {chi1}, {chi2}")));
    }
    let count = 8 * spec.degree() * (max_index + 4) + 16;
    let (exact, p_polys, q_polys) = if exact_source(spec) {
        let pb = local_problem::<BigRational>(spec, p, chi1, chi2, variant, count)?;
        let sol = solve_local(&pb, max_index, max_index)?;
        (true, to_complex(&sol.p_polys), to_complex(&sol.q_polys))
    } else {
        let pb = local_problem::<Complex64>(spec, p, chi1, chi2, variant, count)?;
        let sol = solve_local(&pb, max_index, max_index)?;
        (false, sol.p_polys, sol.q_polys)
    };
    let wrap = |v: Vec<Vec<Complex64>>| {
        v.into_iter()
            .map(|coeffs| DirichletPolynomial { p, coeffs })
            .collect()
    };
    Ok(CorrectionFamily {
        p,
        chi1,
        chi2,
        variant,
        exact,
        p_polys: wrap(p_polys),
        q_polys: wrap(q_polys),
    })
}

fn to_complex<F: Field>(v: &[Vec<F>]) -> Vec<Vec<Complex64>> {
    v.iter().map(|p| p.iter().map(|x| x.to_complex()).collect()).collect()
}

/// Text lines `p,k,side,j,re,im`, one `#` header per family.
pub fn write_corrections(families: &[CorrectionFamily]) -> String {
    let mut out = String::from("# p,k,side,j,re,im\n");
    for fam in families {
        let _ = writeln!(
            out,
            "# chi1={} chi2={} variant={:?} exact={}",
            fam.chi1, fam.chi2, fam.variant, fam.exact
        );
        for (side, polys) in [("P", &fam.p_polys), ("Q", &fam.q_polys)] {
            for (k, poly) in polys.iter().enumerate() {
                for (j, a) in poly.coeffs.iter().enumerate() {
                    let _ = writeln!(out, "{},{},{},{},{},{}", fam.p, k, side, j, a.re, a.im);
                }
            }
        }
    }
    out
}

/// One parsed serialization line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrectionLine {
    pub p: u64,
    pub k: usize,
    pub side: char,
    pub j: usize,
    pub value: Complex64,
}

pub fn parse_corrections(text: &str, label: &str) -> Result<Vec<CorrectionLine>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |msg: &str| Error::Parse {
            path: label.to_string(),
            line: i + 1,
            msg: msg.to_string(),
        };
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 6 {
            return Err(bad("expected 6 comma-separated fields"));
        }
        let side = match f[2] {
            "P" => 'P',
            "Q" => 'Q',
            _ => return Err(bad("side must be P or Q")),
        };
        let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad(&format!("bad number {s:?}")));
        let int = |s: &str| s.trim().parse::<usize>().map_err(|_| bad(&format!("bad index {s:?}")));
        out.push(CorrectionLine {
            p: int(f[0])? as u64,
            k: int(f[1])?,
            side,
            j: int(f[3])?,
            value: Complex64::new(num(f[4])?, num(f[5])?),
        });
    }
    Ok(out)
}
