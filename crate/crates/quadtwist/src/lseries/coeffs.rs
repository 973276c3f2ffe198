//! Dirichlet coefficients for the built-in test objects and for files.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

use crate::arith::{kronecker_raw, primes_up_to};
use crate::error::{Error, Result};

/// Weights with a one-dimensional space of level-one cusp forms.
pub const CUSP_WEIGHTS: [u32; 6] = [12, 16, 18, 20, 22, 26];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Generator {
    RiemannZeta,
    /// Kronecker character of the given fundamental discriminant.
    QuadraticChar(i64),
    /// The level-one Hecke eigenform of weight k (k = 12 is Δ).
    CuspWeight(u32),
    /// Symmetric square of a level-one eigenform.
    Sym2Of(Box<Generator>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CoeffSource {
    Inline(Vec<Complex64>),
    File(PathBuf),
    Generator(Generator),
}

impl Generator {
    pub fn name(&self) -> String {
        match self {
            Generator::RiemannZeta => "riemann-zeta".into(),
            Generator::QuadraticChar(q) => format!("quadratic-char:{q}"),
            Generator::CuspWeight(12) => "delta-weight-12".into(),
            Generator::CuspWeight(k) => format!("cusp-weight:{k}"),
            Generator::Sym2Of(g) => format!("sym2-of:{}", g.name()),
        }
    }

    pub fn is_multiplicative(&self) -> bool {
        true
    }
}

/// c(0..=cutoff) with c(0) = 0.
pub fn coeffs(source: &CoeffSource, cutoff: usize) -> Result<Vec<Complex64>> {
    match source {
        CoeffSource::Inline(v) => {
            if v.len() < cutoff {
                return Err(Error::Domain(format!(
                    "inline source has {} coefficients, {cutoff} requested",
                    v.len()
                )));
            }
            let mut out = Vec::with_capacity(cutoff + 1);
            out.push(Complex64::new(0.0, 0.0));
            out.extend_from_slice(&v[..cutoff]);
            Ok(out)
        }
        CoeffSource::File(path) => {
            let v = read_coeff_file(path)?;
            if v.len() < cutoff {
                return Err(Error::Domain(format!(
                    "{} has {} coefficients, {cutoff} requested",
                    path.display(),
                    v.len()
                )));
            }
            let mut out = vec![Complex64::new(0.0, 0.0)];
            out.extend_from_slice(&v[..cutoff]);
            Ok(out)
        }
        CoeffSource::Generator(g) => generate(g, cutoff),
    }
}

pub fn generate(g: &Generator, cutoff: usize) -> Result<Vec<Complex64>> {
    let real = |v: Vec<f64>| v.into_iter().map(|x| Complex64::new(x, 0.0)).collect();
    match g {
        Generator::RiemannZeta => {
            let mut v = vec![1.0; cutoff + 1];
            v[0] = 0.0;
            Ok(real(v))
        }
        Generator::QuadraticChar(q) => Ok(real(
            (0..=cutoff)
                .map(|n| if n == 0 { 0.0 } else { kronecker_raw(*q as i128, n as i128) as f64 })
                .collect(),
        )),
        Generator::CuspWeight(k) => {
            let lam = cusp_hecke_at_primes(*k, cutoff)?;
            Ok(real(multiplicative_from_local(cutoff, |p, e| {
                hecke_power(lam[p], e)
            })))
        }
        Generator::Sym2Of(inner) => {
            let Generator::CuspWeight(k) = **inner else {
                return Err(Error::Domain(
                    "sym2-of needs a level-one GL(2) generator (cusp-weight)".into(),
                ));
            };
            let lam = cusp_hecke_at_primes(k, cutoff)?;
            Ok(real(multiplicative_from_local(cutoff, |p, e| {
                sym2_power(lam[p], e)
            })))
        }
    }
}

/// λ(p^e) from λ(p) for trivial central character.
fn hecke_power(lp: f64, e: u32) -> f64 {
    let (mut prev, mut cur) = (1.0, lp);
    if e == 0 {
        return 1.0;
    }
    for _ in 1..e {
        let next = lp * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Coefficient of X^e in 1/((1−α²X)(1−X)(1−β²X)), αβ = 1, α+β = λ.
fn sym2_power(lp: f64, e: u32) -> f64 {
    let t = lp * lp - 1.0;
    let mut a = vec![1.0f64];
    for j in 1..=e as usize {
        let a1 = a[j - 1];
        let a2 = if j >= 2 { a[j - 2] } else { 0.0 };
        let a3 = if j >= 3 { a[j - 3] } else { 0.0 };
        a.push(t * a1 - t * a2 + a3);
    }
    a[e as usize]
}

/// Fills a multiplicative sequence from its values at prime powers.
/// `local(p, e)` receives p as an index.
fn multiplicative_from_local(cutoff: usize, local: impl Fn(usize, u32) -> f64) -> Vec<f64> {
    let mut spf = vec![0usize; cutoff + 1];
    for i in 2..=cutoff {
        if spf[i] == 0 {
            let mut j = i;
            while j <= cutoff {
                if spf[j] == 0 {
                    spf[j] = i;
                }
                j += i;
            }
        }
    }
    let mut c = vec![0.0; cutoff + 1];
    if cutoff >= 1 {
        c[1] = 1.0;
    }
    for n in 2..=cutoff {
        let p = spf[n];
        let mut m = n;
        let mut e = 0;
        while m % p == 0 {
            m /= p;
            e += 1;
        }
        c[n] = local(p, e) * c[m];
    }
    c
}

/// τ(1..=m) exactly, from Δ = q·Π(1−qⁿ)²⁴ = q·(Σ(−1)^k(2k+1)q^{k(k+1)/2})⁸.
pub fn ramanujan_tau(m: usize) -> Vec<i128> {
    let len = m; // coefficients of Π(1−qⁿ)²⁴ up to q^{m−1}
    let mut jac: Vec<(usize, i128)> = Vec::new();
    let mut k = 0usize;
    while k * (k + 1) / 2 < len {
        let sign = if k.is_multiple_of(2) { 1 } else { -1 };
        jac.push((k * (k + 1) / 2, sign * (2 * k as i128 + 1)));
        k += 1;
    }
    let mut acc = vec![0i128; len];
    if len > 0 {
        acc[0] = 1;
    }
    for _ in 0..8 {
        let mut next = vec![0i128; len];
        for (i, &a) in acc.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for &(e, b) in &jac {
                if i + e >= len {
                    break;
                }
                next[i + e] += a * b;
            }
        }
        acc = next;
    }
    let mut tau = vec![0i128; m + 1];
    tau[1..=m].copy_from_slice(&acc[..m]);
    tau
}

/// Normalized Hecke eigenvalues λ(p) = a(p)/p^{(k−1)/2}, indexed by p.
fn cusp_hecke_at_primes(k: u32, cutoff: usize) -> Result<Vec<f64>> {
    if !CUSP_WEIGHTS.contains(&k) {
        return Err(Error::Domain(format!(
            "no built-in level-one eigenform of weight {k} (have {CUSP_WEIGHTS:?})"
        )));
    }
    let tau = ramanujan_tau(cutoff.max(1));
    let mut lam = vec![0.0; cutoff + 1];
    let primes = primes_up_to(cutoff);
    let norm = |a: f64, p: usize| a / (p as f64).powf((k as f64 - 1.0) / 2.0);
    if k == 12 {
        for &p in &primes {
            let p = p as usize;
            lam[p] = norm(tau[p] as f64, p);
        }
        return Ok(lam);
    }
    // f = Δ·E_{k−12}; E_j = 1 + c_j Σ σ_{j−1}(n) qⁿ.
    let (cj, j): (i64, u32) = match k - 12 {
        4 => (240, 4),
        6 => (-504, 6),
        8 => (480, 8),
        10 => (-264, 10),
        14 => (-24, 14),
        _ => unreachable!(),
    };
    // a(p) = Σ τ(i)e(p − i) is huge with heavy cancellation, so it is
    // computed modulo several 31-bit primes and rebuilt by CRT.
    let pmax = primes.last().copied().unwrap_or(2) as f64;
    let bits = 2.0 + (k as f64 - 1.0) / 2.0 * pmax.log2() + 16.0;
    let moduli = crt_moduli((bits / 30.0).ceil() as usize);
    let mut residues = vec![Vec::with_capacity(moduli.len()); primes.len()];
    for &m in &moduli {
        let tau_m: Vec<u64> = tau.iter().map(|&t| t.rem_euclid(m as i128) as u64).collect();
        let cj_m = (cj as i128).rem_euclid(m as i128) as u64;
        let mut eis = vec![0u64; cutoff + 1];
        eis[0] = 1;
        for d in 1..=cutoff {
            let pw = pow_mod(d as u64 % m, j - 1, m) * cj_m % m;
            let mut n = d;
            while n <= cutoff {
                eis[n] = (eis[n] + pw) % m;
                n += d;
            }
        }
        for (slot, &p) in residues.iter_mut().zip(&primes) {
            let p = p as usize;
            let acc: u128 = (1..=p).map(|i| tau_m[i] as u128 * eis[p - i] as u128).sum();
            slot.push((acc % m as u128) as u64);
        }
    }
    for (res, &p) in residues.iter().zip(&primes) {
        let a = crt_signed(res, &moduli);
        // a(p) ~ p^{(k−1)/2}; the conversion keeps ~16 significant digits.
        let af = a.to_f64().unwrap_or(f64::NAN);
        lam[p as usize] = norm(af, p as usize);
    }
    Ok(lam)
}

fn pow_mod(mut b: u64, mut e: u32, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

/// The `count` largest primes below 2³¹.
fn crt_moduli(count: usize) -> Vec<u64> {
    let is_prime = |n: u64| (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d));
    let mut out = Vec::with_capacity(count);
    let mut n = (1u64 << 31) - 1;
    while out.len() < count {
        if is_prime(n) {
            out.push(n);
        }
        n -= 2;
    }
    out
}

/// The integer of least absolute value with the given residues.
fn crt_signed(res: &[u64], moduli: &[u64]) -> BigInt {
    let mut x = BigInt::zero();
    let mut big_m = BigInt::from(1u8);
    for (&r, &m) in res.iter().zip(moduli) {
        // x ≡ r (mod m) while keeping x mod big_m
        let xm = (&x % m).to_u64().unwrap_or(0);
        let mm = (&big_m % m).to_u64().unwrap_or(0);
        let t = (r + m - xm) % m * pow_mod(mm, (m - 2) as u32, m) % m;
        x += &big_m * t;
        big_m *= m;
    }
    if &x * 2 > big_m {
        x -= big_m;
    }
    x
}

/// Reads "n,c_re[,c_im]" lines (1-based, consecutive n, n = 1 first).
pub fn read_coeff_file(path: &Path) -> Result<Vec<Complex64>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    parse_coeff_text(&text, &path.display().to_string())
}

pub fn parse_coeff_text(text: &str, label: &str) -> Result<Vec<Complex64>> {
    let err = |line: usize, msg: String| Error::Parse {
        path: label.to_string(),
        line,
        msg,
    };
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() < 2 || fields.len() > 3 {
            return Err(err(lineno, format!("expected n,c_re[,c_im], got {line:?}")));
        }
        let n: usize = fields[0]
            .parse()
            .map_err(|_| err(lineno, format!("bad index {:?}", fields[0])))?;
        let re: f64 = fields[1]
            .parse()
            .map_err(|_| err(lineno, format!("bad real part {:?}", fields[1])))?;
        let im: f64 = match fields.get(2) {
            Some(s) => s.parse().map_err(|_| err(lineno, format!("bad imaginary part {s:?}")))?,
            None => 0.0,
        };
        if n != out.len() + 1 {
            return Err(err(lineno, format!("expected n = {}, got {n}", out.len() + 1)));
        }
        if n == 1 && ((re - 1.0).abs() > 1e-12 || im.abs() > 1e-12) {
            return Err(err(lineno, "c(1) must be 1".into()));
        }
        out.push(Complex64::new(re, im));
    }
    if out.is_empty() {
        return Err(err(0, "no coefficients (the n = 1 line is mandatory)".into()));
    }
    Ok(out)
}

/// Largest |c(mn) − c(m)c(n)| over coprime m, n with mn ≤ len.
pub fn multiplicativity_defect(c: &[Complex64], upto: usize) -> f64 {
    let top = upto.min(c.len() - 1);
    let mut worst: f64 = 0.0;
    for m in 2..=top {
        for n in 2..=top / m {
            if crate::arith::gcd(m as u64, n as u64) == 1 {
                worst = worst.max((c[m * n] - c[m] * c[n]).norm());
            }
        }
    }
    worst
}
