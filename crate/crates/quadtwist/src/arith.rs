//! Integer and quadratic-character arithmetic.
//!
//! Everything here is exact. The Kronecker symbol uses the binary reduction
//! (strip twos, flip by reciprocity, reduce) so that enumerating millions of
//! twists never factors anything.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// (2|n) for odd n, indexed by n mod 8.
const TWO_TABLE: [i8; 8] = [0, 1, 0, -1, 0, -1, 0, 1];

/// Kronecker symbol (a|n).
pub fn kronecker(a: i64, n: i64) -> Result<i8> {
    if a == 0 && n == 0 {
        return Err(Error::Domain("kronecker(0, 0) is undefined".into()));
    }
    Ok(kronecker_raw(a as i128, n as i128))
}

/// Kronecker symbol without the (0, 0) check; returns 0 there.
pub(crate) fn kronecker_raw(mut a: i128, mut b: i128) -> i8 {
    if b == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    if a & 1 == 0 && b & 1 == 0 {
        return 0;
    }
    let v = b.trailing_zeros();
    b >>= v;
    let mut k: i8 = if v & 1 == 0 { 1 } else { TWO_TABLE[(a & 7) as usize] };
    if b < 0 {
        b = -b;
        if a < 0 {
            k = -k;
        }
    }
    // b is odd and positive from here on.
    loop {
        if a == 0 {
            return if b == 1 { k } else { 0 };
        }
        let v = a.trailing_zeros();
        a >>= v;
        if v & 1 == 1 {
            k *= TWO_TABLE[(b & 7) as usize];
        }
        if a & b & 2 != 0 {
            k = -k;
        }
        let r = a.abs();
        a = b % r;
        b = r;
    }
}

pub fn is_squarefree(m: u64) -> bool {
    if m == 0 {
        return false;
    }
    let mut m = m;
    let mut p = 2u64;
    while p * p <= m {
        if m.is_multiple_of(p) {
            m /= p;
            if m.is_multiple_of(p) {
                return false;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    true
}

/// Writes m = m0·m1² with m0 squarefree.
pub fn squarefree_decompose(m: u64) -> Result<(u64, u64)> {
    if m == 0 {
        return Err(Error::Domain("squarefree_decompose needs m >= 1".into()));
    }
    let mut m0 = 1u64;
    let mut m1 = 1u64;
    for (p, e) in factorize(m) {
        m1 *= p.pow(e / 2);
        if e % 2 == 1 {
            m0 *= p;
        }
    }
    Ok((m0, m1))
}

/// Prime factorization by trial division, primes ascending.
pub fn factorize(mut m: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= m {
        if m.is_multiple_of(p) {
            let mut e = 0;
            while m.is_multiple_of(p) {
                m /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        out.push((m, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n).len() == 1 && factorize(n)[0].1 == 1
}

/// Sieve of Eratosthenes: all primes ≤ n.
pub fn primes_up_to(n: usize) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let mut comp = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !comp[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                comp[j] = true;
                j += i;
            }
        }
    }
    out
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// p-adic valuation and the p-free part of m (m ≠ 0).
pub fn valuation(mut m: u64, p: u64) -> (u32, u64) {
    let mut v = 0;
    while m.is_multiple_of(p) {
        m /= p;
        v += 1;
    }
    (v, m)
}

pub fn is_fundamental_discriminant(d: i64) -> Result<bool> {
    if d == 0 {
        return Err(Error::Domain("0 is not a discriminant".into()));
    }
    Ok(fundamental_check(d))
}

fn fundamental_check(d: i64) -> bool {
    let r = d.rem_euclid(4);
    if r == 1 {
        return is_squarefree(d.unsigned_abs());
    }
    if r == 0 {
        let m = d / 4;
        let mr = m.rem_euclid(4);
        return (mr == 2 || mr == 3) && is_squarefree(m.unsigned_abs());
    }
    false
}

/// A fundamental discriminant together with its squarefree kernel and the
/// conductor of the attached character.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FundamentalDiscriminant {
    d: i64,
    d0: i64,
    d1: u64,
    conductor: u64,
}

impl FundamentalDiscriminant {
    pub fn new(d: i64) -> Result<Self> {
        if !is_fundamental_discriminant(d)? {
            return Err(Error::Domain(format!("{d} is not a fundamental discriminant")));
        }
        let d0 = if d.rem_euclid(4) == 1 { d } else { d / 4 };
        Ok(Self {
            d,
            d0,
            d1: 1,
            conductor: d.unsigned_abs(),
        })
    }

    /// Discriminant of Q(√m) for a squarefree m ≠ 0: m or 4m.
    pub fn from_squarefree(m: i64) -> Result<Self> {
        if m == 0 || !is_squarefree(m.unsigned_abs()) {
            return Err(Error::Domain(format!("{m} is not squarefree")));
        }
        if m.rem_euclid(4) == 1 {
            Self::new(m)
        } else {
            Self::new(4 * m)
        }
    }

    pub fn d(&self) -> i64 {
        self.d
    }
    /// Squarefree kernel: d = d0 or d = 4·d0.
    pub fn d0(&self) -> i64 {
        self.d0
    }
    pub fn d1(&self) -> u64 {
        self.d1
    }
    pub fn conductor(&self) -> u64 {
        self.conductor
    }
    pub fn is_trivial(&self) -> bool {
        self.d == 1
    }
    pub fn chi(&self, n: i64) -> i8 {
        kronecker_raw(self.d as i128, n as i128)
    }
}

impl std::fmt::Display for FundamentalDiscriminant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.d)
    }
}

/// Fundamental discriminants with |d| ≤ bound, by |d| ascending, positive first.
pub fn fundamental_discriminants(bound: u64) -> Vec<FundamentalDiscriminant> {
    let mut out = Vec::new();
    for a in 1..=bound as i64 {
        for d in [a, -a] {
            if fundamental_check(d) {
                out.push(FundamentalDiscriminant::new(d).expect("checked"));
            }
        }
    }
    out
}

/// Σ_{a mod D} χ_d(a) e^{2πia/D}, unnormalized.
pub fn gauss_sum(d: &FundamentalDiscriminant) -> Complex64 {
    let q = d.conductor();
    if q == 1 {
        return Complex64::new(1.0, 0.0);
    }
    (1..q)
        .map(|a| {
            let c = d.chi(a as i64) as f64;
            Complex64::from_polar(c, 2.0 * PI * a as f64 / q as f64)
        })
        .sum()
}

/// One of the four characters of conductor dividing 8: discriminant
/// 1, −4, 8, −8 for sign·ell = 1, −1, 2, −2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AuxChar {
    pub sign: i8,
    pub ell: u8,
}

impl AuxChar {
    pub const ALL: [AuxChar; 4] = [
        AuxChar { sign: 1, ell: 1 },
        AuxChar { sign: -1, ell: 1 },
        AuxChar { sign: 1, ell: 2 },
        AuxChar { sign: -1, ell: 2 },
    ];

    pub fn new(sign: i8, ell: u8) -> Result<Self> {
        if !(sign == 1 || sign == -1) || !(ell == 1 || ell == 2) {
            return Err(Error::Domain(format!("bad auxiliary character ({sign}, {ell})")));
        }
        Ok(Self { sign, ell })
    }

    /// Parses the product a·ℓ ∈ {1, −1, 2, −2}.
    pub fn from_label(al: i64) -> Result<Self> {
        match al {
            1 => Self::new(1, 1),
            -1 => Self::new(-1, 1),
            2 => Self::new(1, 2),
            -2 => Self::new(-1, 2),
            _ => Err(Error::Domain(format!("auxiliary label {al} not in {{1,-1,2,-2}}"))),
        }
    }

    pub fn label(&self) -> i64 {
        self.sign as i64 * self.ell as i64
    }

    pub fn discriminant(&self) -> i64 {
        match (self.sign, self.ell) {
            (1, 1) => 1,
            (-1, 1) => -4,
            (1, 2) => 8,
            _ => -8,
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.label() == 1
    }

    pub fn eval(&self, n: i64) -> i8 {
        kronecker_raw(self.discriminant() as i128, n as i128)
    }
}

pub fn aux_char_eval(chi: AuxChar, n: i64) -> i8 {
    chi.eval(n)
}
