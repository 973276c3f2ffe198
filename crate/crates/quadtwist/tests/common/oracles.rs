//! Reference values computed by methods that share no code with the crate.

use std::f64::consts::PI;

/// ζ(s) for real s ≠ 1 from the alternating series with Borwein's
/// acceleration: ζ(s) = η(s)/(1 − 2^{1−s}).
pub fn zeta_eta(s: f64) -> f64 {
    let n = 60usize;
    // d_k = n Σ_{i≤k} (n+i−1)! 4^i / ((n−i)! (2i)!)
    let mut d = vec![0.0f64; n + 1];
    let mut t = 1.0 / n as f64;
    let mut acc = t;
    d[0] = n as f64 * acc;
    for i in 1..=n {
        let fi = i as f64;
        let nf = n as f64;
        t *= (nf + fi - 1.0) * 4.0 * (nf - fi + 1.0) / ((2.0 * fi) * (2.0 * fi - 1.0));
        acc += t;
        d[i] = nf * acc;
    }
    let mut sum = 0.0;
    for k in 0..n {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * (d[k] - d[n]) / ((k + 1) as f64).powf(s);
    }
    let eta = -sum / d[n];
    eta / (1.0 - 2f64.powf(1.0 - s))
}

/// Hurwitz ζ(s, a) by Euler–Maclaurin, real s ≠ 1, a > 0.
pub fn hurwitz(s: f64, a: f64) -> f64 {
    let n = 12usize;
    let mut sum = 0.0;
    for k in 0..n {
        sum += (k as f64 + a).powf(-s);
    }
    let x = n as f64 + a;
    sum += x.powf(1.0 - s) / (s - 1.0) + 0.5 * x.powf(-s);
    // B_{2j}/(2j)!
    let b = [
        1.0 / 6.0 / 2.0,
        -1.0 / 30.0 / 24.0,
        1.0 / 42.0 / 720.0,
        -1.0 / 30.0 / 40320.0,
        5.0 / 66.0 / 3628800.0,
        -691.0 / 2730.0 / 479001600.0,
        7.0 / 6.0 / 87178291200.0,
    ];
    let mut rising = s; // s(s+1)...(s+2j−2)
    let mut pw = x.powf(-s - 1.0);
    for (j, bj) in b.iter().enumerate() {
        sum += bj * rising * pw;
        let k = (2 * j) as f64;
        rising *= (s + k + 1.0) * (s + k + 2.0);
        pw /= x * x;
    }
    sum
}

/// Kronecker (d|n) for n ≥ 1 from factorization and Euler's criterion.
pub fn kronecker_oracle(d: i64, n: u64) -> i64 {
    let mut n = n;
    let mut out = 1i64;
    while n.is_multiple_of(2) {
        n /= 2;
        out *= match d.rem_euclid(8) {
            1 | 7 => 1,
            3 | 5 => -1,
            _ => 0,
        };
    }
    let mut p = 3u64;
    while n > 1 {
        if p * p > n {
            p = n;
        }
        while n.is_multiple_of(p) {
            n /= p;
            let a = d.rem_euclid(p as i64) as u64;
            let mut r = 1u64;
            let mut b = a;
            let mut e = (p - 1) / 2;
            while e > 0 {
                if e & 1 == 1 {
                    r = (r as u128 * b as u128 % p as u128) as u64;
                }
                b = (b as u128 * b as u128 % p as u128) as u64;
                e >>= 1;
            }
            out *= if a == 0 {
                0
            } else if r == 1 {
                1
            } else {
                -1
            };
        }
        p += 2;
    }
    out
}

/// L(s, χ_d) for a fundamental discriminant d ≠ 1 via Hurwitz zeta.
pub fn dirichlet_l_hurwitz(s: f64, d: i64) -> f64 {
    if d == 1 {
        return zeta_eta(s);
    }
    let q = d.unsigned_abs();
    let mut sum = 0.0;
    for a in 1..q {
        let c = kronecker_oracle(d, a);
        if c != 0 {
            sum += c as f64 * hurwitz(s, a as f64 / q as f64);
        }
    }
    sum * (q as f64).powf(-s)
}

/// Γ(x) for x > 0 by Stirling after an upward shift.
pub fn gamma_real(x: f64) -> f64 {
    let mut shift = 1.0;
    let mut w = x;
    while w < 40.0 {
        shift *= w;
        w += 1.0;
    }
    let ln = (w - 0.5) * w.ln() - w + 0.5 * (2.0 * PI).ln() + 1.0 / (12.0 * w)
        - 1.0 / (360.0 * w.powi(3))
        + 1.0 / (1260.0 * w.powi(5));
    ln.exp() / shift
}

/// Upper incomplete Γ(a, x): series for small x, Lentz continued fraction
/// otherwise.
pub fn upper_gamma(a: f64, x: f64) -> f64 {
    if x < a + 1.0 {
        // γ(a,x) = x^a e^{−x} Σ x^k / (a(a+1)...(a+k))
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut k = 1.0;
        while term.abs() > 1e-17 * sum.abs() {
            term *= x / (a + k);
            sum += term;
            k += 1.0;
        }
        gamma_real(a) - sum * x.powf(a) * (-x).exp()
    } else {
        let tiny = 1e-300;
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..500 {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let del = d * c;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        h * x.powf(a) * (-x).exp()
    }
}

/// K₀(x) = ∫₀^∞ e^{−x cosh t} dt by the trapezoid rule.
pub fn bessel_k0(x: f64) -> f64 {
    let h = 0.01f64;
    let mut sum = 0.5 * (-x).exp();
    let mut t = h;
    loop {
        let v = (-x * t.cosh()).exp();
        sum += v;
        if v < 1e-300 || t > 50.0 {
            break;
        }
        t += h;
    }
    sum * h
}
