//! Coefficients b(d, n) expanded along d (twisted L-series times P) and
//! along n (quadratic L-series times Q̂), and their comparison.

use num_complex::Complex64;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

use super::field::Field;
use super::local::{solve_local, LocalSolution, Variant};
use super::{check_variant, exact_source, local_problem, Tags};
use crate::arith::{self, kronecker_raw};
use crate::error::{Error, Result};
use crate::lseries::LSeriesSpec;

fn jac(a: i64, n: u64) -> i8 {
    kronecker_raw(a as i128, n as i128)
}

fn chi_index(v: i8) -> usize {
    usize::from(v < 0)
}

/// Everything needed to expand b(d, n) for d, n ≤ cutoff.
pub(crate) struct Setup<F> {
    pub cutoff: usize,
    pub tags: Tags,
    /// Prime of π = χ_q whose ramified d are kept.
    pub ramified: Option<u64>,
    /// Primes removed from both d and n: 2 and the level (less `ramified`).
    pub excluded: Vec<u64>,
    pub c: Vec<F>,
    /// Local solutions for local character value +1 and −1.
    sols: HashMap<u64, [LocalSolution<F>; 2]>,
}

impl<F: Field> Setup<F> {
    pub fn new(spec: &LSeriesSpec, tags: Tags, cutoff: usize, variant: Variant) -> Result<Self> {
        if cutoff < 1 {
            return Err(Error::Domain("cutoff must be at least 1".into()));
        }
        let ramified = match variant {
            Variant::Unramified => None,
            Variant::RamifiedGl1 => {
                let q = spec.is_gl1_quadratic().unwrap_or(0).unsigned_abs();
                check_variant(spec, q, variant)?;
                Some(q)
            }
        };
        let mut excluded = vec![2];
        for (p, _) in arith::factorize(spec.level) {
            if p != 2 && Some(p) != ramified {
                excluded.push(p);
            }
        }
        let raw = spec.coeffs(cutoff)?;
        if raw.len() <= cutoff {
            return Err(Error::Domain(format!(
                "{} has coefficients only up to {}, need {cutoff}",
                spec.name,
                raw.len().saturating_sub(1)
            )));
        }
        let c = raw[..=cutoff].iter().map(|&z| F::from_complex(z)).collect::<Result<Vec<F>>>()?;
        let primes: Vec<u64> = arith::primes_up_to(cutoff)
            .into_iter()
            .filter(|p| !excluded.contains(p))
            .collect();
        let jobs: Vec<(u64, Variant, usize)> = primes
            .iter()
            .filter_map(|&p| {
                let need = (cutoff as f64).log(p as f64).floor() as usize;
                let need = need + usize::from((p as usize).pow(need as u32 + 1) <= cutoff);
                if Some(p) == ramified {
                    Some((p, Variant::RamifiedGl1, need.max(1)))
                } else if need >= 2 {
                    Some((p, Variant::Unramified, need))
                } else {
                    None
                }
            })
            .collect();
        let solved: Vec<Result<(u64, [LocalSolution<F>; 2])>> = jobs
            .par_iter()
            .map(|&(p, var, need)| {
                let count = 8 * spec.degree() * (need + 4) + 16;
                let mut pair = Vec::with_capacity(2);
                for chi in [1i8, -1] {
                    let pb = local_problem::<F>(spec, p, chi, chi, var, count)?;
                    pair.push(solve_local(&pb, need, need)?);
                }
                let [a, b]: [LocalSolution<F>; 2] = pair.try_into().expect("two solutions");
                Ok((p, [a, b]))
            })
            .collect();
        let mut sols = HashMap::new();
        for r in solved {
            let (p, pair) = r?;
            sols.insert(p, pair);
        }
        Ok(Self {
            cutoff,
            tags,
            ramified,
            excluded,
            c,
            sols,
        })
    }

    pub fn admissible(&self, m: u64) -> bool {
        m >= 1 && self.excluded.iter().all(|p| !m.is_multiple_of(*p))
    }

    /// (p, P_a) for the primes where P_a is not 1.
    pub fn p_factors(&self, d: u64) -> Vec<(u64, Vec<F>)> {
        let (d0, _) = arith::squarefree_decompose(d).expect("d ≥ 1");
        let mut out = Vec::new();
        for (p, a) in arith::factorize(d) {
            let a = a as usize;
            let Some(pair) = self.sols.get(&p) else { continue };
            if a < 2 && Some(p) != self.ramified {
                continue;
            }
            let rest = d0 / p.pow((a % 2) as u32);
            let chi1 = self.tags.n_char.eval(p as i64) * jac(rest as i64, p);
            out.push((p, pair[chi_index(chi1)].p_polys[a].clone()));
        }
        out
    }

    /// (p, Q̂_b) for every p | n.
    pub fn q_factors(&self, n: u64) -> Vec<(u64, Vec<F>)> {
        let (n0, _) = arith::squarefree_decompose(n).expect("n ≥ 1");
        let mut out = Vec::new();
        for (p, b) in arith::factorize(n) {
            let b = b as usize;
            let poly = match self.sols.get(&p) {
                Some(pair) if b >= 2 || Some(p) == self.ramified => {
                    let rest = n0 / p.pow((b % 2) as u32);
                    let chi2 = self.tags.d_char.eval(p as i64) * jac(p as i64, rest);
                    pair[chi_index(chi2)].q_polys[b].clone()
                }
                _ if b == 1 => vec![self.c[p as usize].clone()],
                _ => unreachable!("prime powers up to the cutoff are solved"),
            };
            out.push((p, poly));
        }
        out
    }

    /// Coefficient of m^{−s} in the twisted L-series of the d-row.
    pub fn psi(&self, d0: u64, m: u64) -> F {
        if !self.admissible(m) {
            return F::zero();
        }
        let chi = self.tags.n_char.eval(m as i64);
        match self.ramified {
            Some(q) if d0.is_multiple_of(q) => F::from_i64((jac((d0 / q) as i64, m) * chi) as i64),
            _ => self.c[m as usize].clone() * F::from_i64((jac(d0 as i64, m) * chi) as i64),
        }
    }

    /// b(d, ·) from the d-expansion.
    pub fn row(&self, d: u64) -> Vec<F> {
        let n_max = self.cutoff;
        let mut out = vec![F::zero(); n_max + 1];
        if !self.admissible(d) {
            return out;
        }
        let (d0, _) = arith::squarefree_decompose(d).expect("d ≥ 1");
        let support = expand(&self.p_factors(d), n_max as u64);
        let psi: Vec<F> = (0..=n_max as u64).map(|m| if m == 0 { F::zero() } else { self.psi(d0, m) }).collect();
        let lead = F::from_i64(self.tags.d_char.eval(d0 as i64) as i64);
        for (k, pk) in support {
            let pk = lead.clone() * pk;
            for m in 1..=n_max / k as usize {
                if !psi[m].is_zero_exact() {
                    let n = m * k as usize;
                    out[n] = out[n].clone() + psi[m].clone() * pk.clone();
                }
            }
        }
        out
    }

    /// b′(·, n) from the n-expansion.
    pub fn column(&self, n: u64) -> Vec<F> {
        let d_max = self.cutoff;
        let mut out = vec![F::zero(); d_max + 1];
        if !self.admissible(n) {
            return out;
        }
        let (n0, _) = arith::squarefree_decompose(n).expect("n ≥ 1");
        let support = expand(&self.q_factors(n), d_max as u64);
        let lead = F::from_i64(self.tags.n_char.eval(n0 as i64) as i64);
        let chi: Vec<i8> = (0..=d_max as u64)
            .map(|j| {
                if j == 0 || !self.admissible(j) {
                    0
                } else {
                    jac(j as i64, n0) * self.tags.d_char.eval(j as i64)
                }
            })
            .collect();
        for (e, qe) in support {
            let qe = lead.clone() * qe;
            for j in 1..=d_max / e as usize {
                if chi[j] != 0 {
                    let d = j * e as usize;
                    out[d] = out[d].clone() + F::from_i64(chi[j] as i64) * qe.clone();
                }
            }
        }
        out
    }
}

/// Multiplies per-prime polynomials into (index, coefficient) pairs with
/// index ≤ bound.
pub(crate) fn expand<F: Field>(factors: &[(u64, Vec<F>)], bound: u64) -> Vec<(u64, F)> {
    let mut cur = vec![(1u64, F::one())];
    for (p, poly) in factors {
        let mut next = Vec::new();
        for (k, v) in &cur {
            let mut pk = *k;
            for coef in poly {
                if pk > bound {
                    break;
                }
                if !coef.is_zero_exact() {
                    next.push((pk, v.clone() * coef.clone()));
                }
                pk = pk.saturating_mul(*p);
            }
        }
        cur = next;
    }
    cur
}

/// b(d, n) for 1 ≤ d, n ≤ cutoff.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MdsCoefficients {
    pub cutoff: usize,
    pub tags: Tags,
    pub variant: Variant,
    /// Values were computed in exact rational arithmetic.
    pub exact: bool,
    /// values[d][n]; row and column 0 are unused.
    pub values: Vec<Vec<Complex64>>,
}

impl MdsCoefficients {
    pub fn get(&self, d: usize, n: usize) -> Complex64 {
        self.values[d][n]
    }
}

/// Expands every twisted L-series and correction polynomial into b(d, n).
pub fn build_coefficients(spec: &LSeriesSpec, tags: Tags, cutoff: usize, variant: Variant) -> Result<MdsCoefficients> {
    fn go<F: Field>(spec: &LSeriesSpec, tags: Tags, cutoff: usize, variant: Variant) -> Result<Vec<Vec<Complex64>>> {
        let st = Setup::<F>::new(spec, tags, cutoff, variant)?;
        Ok((0..=cutoff as u64)
            .into_par_iter()
            .map(|d| {
                if d == 0 {
                    vec![Complex64::new(0.0, 0.0); cutoff + 1]
                } else {
                    st.row(d).iter().map(|x| x.to_complex()).collect()
                }
            })
            .collect())
    }
    let exact = exact_source(spec);
    let values = if exact {
        go::<BigRational>(spec, tags, cutoff, variant)?
    } else {
        go::<Complex64>(spec, tags, cutoff, variant)?
    };
    Ok(MdsCoefficients {
        cutoff,
        tags,
        variant,
        exact,
        values,
    })
}

/// Relative tolerance for float coefficient sources.
pub const FLOAT_MATCH: f64 = 1e-12;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InterchangeReport {
    pub spec: String,
    pub tags: Tags,
    pub cutoff: usize,
    pub variant: Variant,
    pub exact: bool,
    /// Pairs with d, n ≤ cutoff both coprime to the excluded primes.
    pub checked: usize,
    pub mismatches: usize,
    /// max |b − b′| / max(1, |b|), zero when exact and equal.
    pub max_discrepancy: f64,
    pub first_failure: Option<(u64, u64)>,
    /// The same restricted to squarefree, mutually coprime d and n.
    pub checked_squarefree: usize,
    pub mismatches_squarefree: usize,
}

impl InterchangeReport {
    pub fn passed(&self) -> bool {
        self.mismatches == 0
    }
}

/// Builds b from the d-side and b′ from the n-side and compares them.
pub fn interchange_check(spec: &LSeriesSpec, tags: Tags, cutoff: usize, variant: Variant) -> Result<InterchangeReport> {
    let mut rep = if exact_source(spec) {
        compare::<BigRational>(spec, tags, cutoff, variant)?
    } else {
        compare::<Complex64>(spec, tags, cutoff, variant)?
    };
    rep.spec = spec.name.clone();
    Ok(rep)
}

fn compare<F: Field>(spec: &LSeriesSpec, tags: Tags, cutoff: usize, variant: Variant) -> Result<InterchangeReport> {
    let st = Setup::<F>::new(spec, tags, cutoff, variant)?;
    let idx: Vec<u64> = (1..=cutoff as u64).filter(|&m| st.admissible(m)).collect();
    let rows: HashMap<u64, Vec<F>> = idx.par_iter().map(|&d| (d, st.row(d))).collect();
    let cols: Vec<(u64, Vec<F>)> = idx.par_iter().map(|&n| (n, st.column(n))).collect();
    let sqf: Vec<bool> = (0..=cutoff as u64).map(|m| m > 0 && arith::is_squarefree(m)).collect();
    let mut rep = InterchangeReport {
        spec: String::new(),
        tags,
        cutoff,
        variant,
        exact: F::EXACT,
        checked: 0,
        mismatches: 0,
        max_discrepancy: 0.0,
        first_failure: None,
        checked_squarefree: 0,
        mismatches_squarefree: 0,
    };
    for (n, col) in &cols {
        for &d in &idx {
            let b = &rows[&d][*n as usize];
            let b2 = &col[d as usize];
            let diff = (b.clone() - b2.clone()).magnitude();
            let (err, bad) = if F::EXACT {
                (diff, b != b2)
            } else {
                let rel = diff / b.magnitude().max(1.0);
                (rel, rel > FLOAT_MATCH)
            };
            let plain = sqf[d as usize] && sqf[*n as usize] && arith::gcd(d, *n) == 1;
            rep.checked += 1;
            rep.checked_squarefree += usize::from(plain);
            rep.max_discrepancy = rep.max_discrepancy.max(err);
            if bad {
                rep.mismatches += 1;
                rep.mismatches_squarefree += usize::from(plain);
                let cand = (d, *n);
                if rep.first_failure.is_none_or(|f| cand < f) {
                    rep.first_failure = Some(cand);
                }
            }
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles;

    fn one(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn first_row_and_column() {
        let c5 = LSeriesSpec::quadratic_char(5).unwrap();
        for tags in Tags::all() {
            let b = build_coefficients(&c5, tags, 60, Variant::Unramified).unwrap();
            for n in (1..=60u64).filter(|n| n % 2 == 1 && n % 5 != 0) {
                let want = oracles::kronecker_oracle(5, n) * oracles::kronecker_oracle(tags.n_char.discriminant(), n);
                assert_eq!(b.get(1, n as usize), one(want as f64), "n = {n}");
            }
        }
        let z = LSeriesSpec::riemann_zeta();
        let tags = Tags::from_labels(1, -2).unwrap();
        let b = build_coefficients(&z, tags, 60, Variant::Unramified).unwrap();
        for d in [1u64, 3, 15, 35, 39] {
            let want = oracles::kronecker_oracle(-8, d);
            assert_eq!(b.get(d as usize, 1), one(want as f64), "d = {d}");
        }
        assert_eq!(b.get(4, 3), one(0.0));
    }

    // b(5, 3) = χ₅(3)·χ_{a₁ℓ₁}(3)·χ_{a₂ℓ₂}(5) for ζ
    #[test]
    fn direct_entry() {
        let z = LSeriesSpec::riemann_zeta();
        for tags in Tags::all() {
            let b = build_coefficients(&z, tags, 20, Variant::Unramified).unwrap();
            let k = |d: i64, n: u64| oracles::kronecker_oracle(d, n);
            let want = k(5, 3) * k(tags.n_char.discriminant(), 3) * k(tags.d_char.discriminant(), 5);
            assert_eq!(b.get(5, 3), one(want as f64));
        }
    }

    #[test]
    fn shared_prime_kills_both_sides() {
        let c5 = LSeriesSpec::quadratic_char(5).unwrap();
        let z = LSeriesSpec::riemann_zeta();
        let st = Setup::<BigRational>::new(&z, Tags::trivial(), 60, Variant::Unramified).unwrap();
        assert!(st.row(3)[21].is_zero_exact());
        assert!(st.column(21)[3].is_zero_exact());
        let st = Setup::<BigRational>::new(&c5, Tags::trivial(), 60, Variant::Unramified).unwrap();
        assert!(st.row(5).iter().all(|x| x.is_zero_exact()));
    }

    #[test]
    fn interchange_gl1_small() {
        for spec in [LSeriesSpec::riemann_zeta(), LSeriesSpec::quadratic_char(5).unwrap()] {
            for tags in Tags::all() {
                let rep = interchange_check(&spec, tags, 120, Variant::Unramified).unwrap();
                assert!(rep.passed(), "{rep:?}");
                assert!(rep.checked > 1000);
            }
        }
    }

    // d = 9 rows: the solved P restores equality; with P = 1 it fails
    #[test]
    fn square_rows_need_corrections() {
        let z = LSeriesSpec::riemann_zeta();
        let st = Setup::<BigRational>::new(&z, Tags::trivial(), 100, Variant::Unramified).unwrap();
        let cols: Vec<Vec<BigRational>> = (0..=100u64).map(|n| if n == 0 { vec![] } else { st.column(n) }).collect();
        let row = st.row(9);
        for n in (1..=100u64).filter(|&n| st.admissible(n)) {
            assert_eq!(row[n as usize], cols[n as usize][9], "n = {n}");
        }
        let naive: Vec<BigRational> = (0..=100u64).map(|m| if m == 0 { Field::zero() } else { st.psi(1, m) }).collect();
        let differs = (1..=100u64).filter(|&n| st.admissible(n)).any(|n| naive[n as usize] != cols[n as usize][9]);
        assert!(differs);
    }

    #[test]
    fn interchange_delta_small() {
        let delta = LSeriesSpec::delta();
        for tags in [Tags::trivial(), Tags::from_labels(-2, -1).unwrap()] {
            let rep = interchange_check(&delta, tags, 150, Variant::Unramified).unwrap();
            assert!(rep.passed(), "{rep:?}");
            assert!(!rep.exact);
        }
    }

    #[test]
    fn interchange_ramified() {
        let c5 = LSeriesSpec::quadratic_char(5).unwrap();
        for tags in Tags::all() {
            let rep = interchange_check(&c5, tags, 150, Variant::RamifiedGl1).unwrap();
            assert!(rep.passed(), "{rep:?}");
        }
    }
}
