//! Local correction polynomials at one prime, found as the unique solution
//! of the interchange identity plus the functional equations.
//!
//! At p, a is the exponent of p in d and b its exponent in n. P_a is a
//! polynomial in p^{−s}, Q̂_b = c(p^b)·Q_b a polynomial in p^{−w}. The
//! coefficient of p^{−aw−bs} is computed both ways:
//!
//!   d-side  χ₂^{a mod 2} Σ_{i≤b} c_a(b−i) χ₁^{b−i} π_i(a)
//!   n-side  χ₁^{b mod 2} · { Σ_{t≤a} χ₂^{a−t} θ_t(b)   b even
//!                          { θ_a(b)                     b odd
//!
//! where χ₁, χ₂ are the values at p of the characters carried by the rest
//! of d and of n, and c_a is the local series of π twisted at p (trivial
//! when p divides the squarefree part of d).

use serde::{Deserialize, Serialize};

use super::field::{pow, sign, Field};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// p does not divide the level.
    Unramified,
    /// p is the conductor of a GL(1) quadratic π; ramified d are kept.
    RamifiedGl1,
}

#[derive(Debug, Clone)]
pub struct LocalProblem<F> {
    pub p: u64,
    pub degree: usize,
    /// c(p^j) of π, j = 0, 1, ...
    pub c: Vec<F>,
    pub chi1: i8,
    pub chi2: i8,
    pub variant: Variant,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalSolution<F> {
    pub p: u64,
    pub chi1: i8,
    pub chi2: i8,
    /// P_a by a; coefficient i multiplies p^{−is}.
    pub p_polys: Vec<Vec<F>>,
    /// Q̂_b by b; coefficient t multiplies p^{−tw}.
    pub q_polys: Vec<Vec<F>>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Side {
    P,
    Q,
}

impl<F: Field> LocalProblem<F> {
    fn p_degree(&self, a: usize) -> usize {
        match self.variant {
            Variant::Unramified => 2 * self.degree * (a / 2),
            Variant::RamifiedGl1 => 2 * a.div_ceil(2),
        }
    }

    fn q_degree(&self, b: usize) -> usize {
        2 * (b / 2)
    }

    /// Coefficient j of the local series multiplying P_a on the d-side.
    fn c_for(&self, a: usize, j: usize) -> F {
        let odd = a % 2 == 1;
        match (self.variant, odd) {
            (Variant::Unramified, false) => self.c[j].clone(),
            (Variant::RamifiedGl1, true) => F::one(),
            _ => {
                if j == 0 {
                    F::one()
                } else {
                    F::zero()
                }
            }
        }
    }

    fn fixed(&self, side: Side, idx: usize, i: usize) -> Option<F> {
        match (self.variant, side) {
            (Variant::Unramified, Side::P) if idx < 2 => Some(F::one()),
            (Variant::Unramified, Side::Q) if idx == 0 => Some(F::one()),
            (Variant::Unramified, Side::Q) if idx == 1 => Some(self.c[1].clone()),
            (_, Side::P) if i == 0 => Some(F::one()),
            _ => None,
        }
    }
}

struct Layout<F> {
    /// (side, index, coefficient) per unknown.
    unknowns: Vec<(Side, usize, usize)>,
    /// For each polynomial coefficient: fixed value or unknown slot.
    p_slots: Vec<Vec<Slot<F>>>,
    q_slots: Vec<Vec<Slot<F>>>,
}

#[derive(Clone)]
enum Slot<F> {
    Fixed(F),
    Unknown(usize),
}

fn layout<F: Field>(pb: &LocalProblem<F>, amax: usize, bmax: usize) -> Layout<F> {
    let mut unknowns = Vec::new();
    let mut make = |side: Side, idx: usize, deg: usize| -> Vec<Slot<F>> {
        (0..=deg)
            .map(|i| match pb.fixed(side, idx, i) {
                Some(v) => Slot::Fixed(v),
                None => {
                    unknowns.push((side, idx, i));
                    Slot::Unknown(unknowns.len() - 1)
                }
            })
            .collect()
    };
    let p_slots = (0..=amax).map(|a| make(Side::P, a, pb.p_degree(a))).collect();
    let q_slots = (0..=bmax).map(|b| make(Side::Q, b, pb.q_degree(b))).collect();
    Layout {
        unknowns,
        p_slots,
        q_slots,
    }
}

/// Accumulates coef·slot into a row; fixed slots go to the right-hand side.
fn push<F: Field>(row: &mut [F], slot: &Slot<F>, coef: F, scale: &[F]) {
    let n = row.len() - 1;
    match slot {
        Slot::Fixed(v) => row[n] = row[n].clone() - coef * v.clone(),
        Slot::Unknown(k) => row[*k] = row[*k].clone() + coef * scale[*k].clone(),
    }
}

fn solve_sized<F: Field>(pb: &LocalProblem<F>, amax: usize, bmax: usize) -> Result<(Layout<F>, Vec<Option<F>>)> {
    if pb.c.len() <= bmax {
        return Err(Error::Solver {
            degree: bmax,
            msg: format!("need c(p^j) up to j = {bmax}"),
        });
    }
    let lay = layout(pb, amax, bmax);
    let n = lay.unknowns.len();
    let scale: Vec<F> = lay.unknowns.iter().map(|&(_, _, i)| F::half_power(pb.p, i)).collect();
    let x1: F = sign(pb.chi1);
    let x2: F = sign(pb.chi2);
    let mut rows: Vec<Vec<F>> = Vec::new();
    let get = |v: &Vec<Slot<F>>, i: usize| v.get(i).cloned();
    for a in 0..=amax {
        for b in 0..=bmax {
            let mut row = vec![F::zero(); n + 1];
            // d-side minus n-side
            let lead = pow(&x2, a % 2);
            for i in 0..=b {
                if let Some(slot) = get(&lay.p_slots[a], i) {
                    let coef = lead.clone() * pb.c_for(a, b - i) * pow(&x1, b - i);
                    push(&mut row, &slot, coef, &scale);
                }
            }
            let lead = -pow(&x1, b % 2);
            if b % 2 == 0 {
                for t in 0..=a {
                    if let Some(slot) = get(&lay.q_slots[b], t) {
                        push(&mut row, &slot, lead.clone() * pow(&x2, a - t), &scale);
                    }
                }
            } else if let Some(slot) = get(&lay.q_slots[b], a) {
                push(&mut row, &slot, lead.clone(), &scale);
            }
            rows.push(row);
        }
    }
    // functional equations: coefficient 2K−m equals p^{K−m} times coefficient m
    let p = F::from_i64(pb.p as i64);
    for slots in lay.p_slots.iter().chain(lay.q_slots.iter()) {
        let deg = slots.len() - 1;
        let k = deg / 2;
        for m in 0..k {
            let mut row = vec![F::zero(); n + 1];
            push(&mut row, &slots[deg - m], F::one(), &scale);
            push(&mut row, &slots[m], -pow(&p, k - m), &scale);
            rows.push(row);
        }
    }
    let sol = eliminate(rows, n, amax.max(bmax))?;
    Ok((lay, sol))
}

/// Gauss–Jordan elimination; returns the value of each unknown that the
/// system pins down.
fn eliminate<F: Field>(mut rows: Vec<Vec<F>>, n: usize, degree: usize) -> Result<Vec<Option<F>>> {
    if !F::EXACT {
        for row in rows.iter_mut() {
            let m = row.iter().map(|x| x.magnitude()).fold(0.0, f64::max);
            if m > 0.0 {
                let inv = F::from_complex(num_complex::Complex64::new(1.0 / m, 0.0))?;
                for x in row.iter_mut() {
                    *x = x.clone() * inv.clone();
                }
            }
        }
    }
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..n {
        let best = (r..rows.len())
            .filter(|&i| !rows[i][col].negligible(1.0))
            .max_by(|&i, &j| rows[i][col].magnitude().total_cmp(&rows[j][col].magnitude()));
        let Some(best) = best else { continue };
        rows.swap(r, best);
        let inv = rows[r][col].inv();
        for x in rows[r].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        let prow = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[col].is_zero_exact() {
                continue;
            }
            let f = row[col].clone();
            for (x, y) in row.iter_mut().zip(prow.iter()) {
                *x = x.clone() - f.clone() * y.clone();
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    for row in &rows[r..] {
        if !row[n].negligible(1.0) {
            return Err(Error::Solver {
                degree,
                msg: format!("interchange equations are inconsistent (residual {:.2e})", row[n].magnitude()),
            });
        }
    }
    let mut out = vec![None; n];
    let is_pivot: Vec<bool> = (0..n).map(|c| pivots.contains(&c)).collect();
    for (i, &col) in pivots.iter().enumerate() {
        let free_clear = (0..n).all(|c| is_pivot[c] || rows[i][c].negligible(1.0));
        if free_clear {
            out[col] = Some(rows[i][n].clone());
        }
    }
    Ok(out)
}

/// Solves for P_a, a ≤ need_a, and Q̂_b, b ≤ need_b, enlarging the system
/// until they are determined.
pub fn solve_local<F: Field>(pb: &LocalProblem<F>, need_a: usize, need_b: usize) -> Result<LocalSolution<F>> {
    let mut amax = need_a.max(2) + 1;
    let mut bmax = need_b.max(pb.p_degree(amax)) + 1;
    for _ in 0..4 {
        if pb.c.len() <= bmax {
            return Err(Error::Solver {
                degree: bmax,
                msg: format!("local series of π known only to p^{}", pb.c.len() - 1),
            });
        }
        let (lay, sol) = solve_sized(pb, amax, bmax)?;
        let scale = |i: usize| F::half_power(pb.p, i);
        let read = |slots: &Vec<Slot<F>>| -> Option<Vec<F>> {
            slots
                .iter()
                .enumerate()
                .map(|(i, s)| match s {
                    Slot::Fixed(v) => Some(v.clone()),
                    Slot::Unknown(k) => sol[*k].clone().map(|u| u * scale(i)),
                })
                .collect()
        };
        let ps: Vec<Option<Vec<F>>> = lay.p_slots[..=need_a].iter().map(read).collect();
        let qs: Vec<Option<Vec<F>>> = lay.q_slots[..=need_b].iter().map(read).collect();
        let missing = ps
            .iter()
            .position(|x| x.is_none())
            .or_else(|| qs.iter().position(|x| x.is_none()));
        match missing {
            None => {
                return Ok(LocalSolution {
                    p: pb.p,
                    chi1: pb.chi1,
                    chi2: pb.chi2,
                    p_polys: ps.into_iter().map(Option::unwrap).collect(),
                    q_polys: qs.into_iter().map(Option::unwrap).collect(),
                })
            }
            Some(deg) if amax > 4 * need_a.max(need_b) + 8 => {
                return Err(Error::Solver {
                    degree: deg,
                    msg: "correction polynomial not determined by the interchange equations".into(),
                })
            }
            Some(_) => {
                amax += 2;
                bmax = (bmax + 2).max(pb.p_degree(amax) + 1);
            }
        }
    }
    Err(Error::Solver {
        degree: amax,
        msg: "correction polynomials not determined after enlarging the system".into(),
    })
}

/// Largest |π_{2K−m} − p^{K−m}π_m| over the polynomial.
pub fn fe_defect<F: Field>(p: u64, poly: &[F]) -> f64 {
    let deg = poly.len() - 1;
    let k = deg / 2;
    let pf = F::from_i64(p as i64);
    (0..=deg)
        .take(k)
        .map(|m| (poly[deg - m].clone() - pow(&pf, k - m) * poly[m].clone()).magnitude())
        .fold(0.0, f64::max)
}
