#![allow(dead_code)]

pub mod oracles;

/// Table of χ_D(a) for 0 ≤ a < |D|, extended multiplicatively from the
/// Euler-criterion values at primes.
pub fn char_table(disc: i64) -> Vec<i8> {
    let m = disc.unsigned_abs() as usize;
    let mut spf = vec![0usize; m.max(2)];
    for i in 2..m {
        if spf[i] == 0 {
            let mut j = i;
            while j < m {
                if spf[j] == 0 {
                    spf[j] = i;
                }
                j += i;
            }
        }
    }
    let mut t = vec![0i8; m.max(2)];
    if m >= 2 {
        t[1] = 1;
    }
    for a in 2..m {
        let p = spf[a];
        let at_p = if a == p {
            oracles::kronecker_oracle(disc, p as u64) as i8
        } else {
            t[p]
        };
        t[a] = at_p * t[a / p];
    }
    t
}

/// L(s, χ_D) for real s through the Hurwitz zeta function.
pub fn dirichlet_l(s: f64, disc: i64) -> f64 {
    if disc == 1 {
        return oracles::zeta_eta(s);
    }
    let q = disc.unsigned_abs();
    let t = char_table(disc);
    let mut sum = 0.0;
    for a in 1..q {
        let c = t[a as usize];
        if c != 0 {
            sum += c as f64 * oracles::hurwitz(s, a as f64 / q as f64);
        }
    }
    sum * (q as f64).powf(-s)
}

/// The fundamental discriminant whose character is the primitive
/// character attached to the squarefree kernel of m.
pub fn primitive_disc(m: i64) -> i64 {
    let sign = m.signum();
    let mut n = m.unsigned_abs();
    let mut k = 1u64;
    let mut p = 2u64;
    while p * p <= n {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        if e % 2 == 1 {
            k *= p;
        }
        p += 1;
    }
    k *= n;
    let k = sign * k as i64;
    if k.rem_euclid(4) == 1 {
        k
    } else {
        4 * k
    }
}

pub fn odd_primes_up_to(n: u64) -> Vec<u64> {
    (3..=n).filter(|&p| (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0)).collect()
}

/// Fundamental discriminants with 0 < |d| ≤ bound, by definition.
pub fn fundamental_discs(bound: i64) -> Vec<i64> {
    let sqfree = |m: i64| {
        let m = m.unsigned_abs();
        (2..).take_while(|d| d * d <= m).all(|d| !m.is_multiple_of(d * d))
    };
    let mut out = Vec::new();
    for d in -bound..=bound {
        if d == 0 {
            continue;
        }
        let ok = if d.rem_euclid(4) == 1 {
            sqfree(d)
        } else if d % 4 == 0 {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && sqfree(m)
        } else {
            false
        };
        if ok {
            out.push(d);
        }
    }
    out
}
