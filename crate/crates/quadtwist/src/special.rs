//! Complex log-gamma and a few helpers shared by the numerical modules.

use num_complex::Complex64;
use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// log Γ(z) on the principal-ish branch (imaginary part is only meaningful
/// modulo 2π; callers exponentiate).
pub fn ln_gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // Γ(z)Γ(1−z) = π / sin(πz)
        let s = ln_sin_pi(z);
        return Complex64::new(PI.ln(), 0.0) - s - ln_gamma(Complex64::new(1.0, 0.0) - z);
    }
    let z = z - 1.0;
    let mut acc = Complex64::new(LANCZOS[0], 0.0);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + acc.ln()
}

/// log sin(πz), stable for large |Im z|.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    let i = Complex64::i();
    if z.im.abs() < 20.0 {
        return (z * PI).sin().ln();
    }
    // sin(πz) = (e^{iπz} − e^{−iπz}) / 2i; factor out the dominant exponential.
    if z.im > 0.0 {
        let small = (2.0 * i * PI * z).exp();
        -i * PI * z + (1.0 - small).ln() - (-2.0 * i).ln()
    } else {
        let small = (-2.0 * i * PI * z).exp();
        i * PI * z + (1.0 - small).ln() - (2.0 * i).ln()
    }
}

pub fn gamma(z: Complex64) -> Complex64 {
    ln_gamma(z).exp()
}

/// Distance from z to the nearest pole of Γ (a non-positive integer).
pub fn gamma_pole_distance(z: Complex64) -> f64 {
    if z.re > 0.5 {
        return f64::INFINITY;
    }
    let k = z.re.round().min(0.0);
    (z - k).norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    // Stirling series after shifting z up by recurrence; shares nothing with
    // the Lanczos path.
    fn stirling_ln_gamma(z: Complex64) -> Complex64 {
        let mut shift = Complex64::new(0.0, 0.0);
        let mut w = z;
        while w.norm() < 30.0 {
            shift += w.ln();
            w += 1.0;
        }
        let b = [1.0 / 12.0, -1.0 / 360.0, 1.0 / 1260.0, -1.0 / 1680.0, 1.0 / 1188.0];
        let mut series = Complex64::new(0.0, 0.0);
        let w2 = w * w;
        let mut pw = w;
        for c in b {
            series += c / pw;
            pw *= w2;
        }
        (w - 0.5) * w.ln() - w + 0.5 * (2.0 * PI).ln() + series - shift
    }

    #[test]
    fn real_values() {
        let c = |x: f64| Complex64::new(x, 0.0);
        assert!((gamma(c(0.5)).re - PI.sqrt()).abs() < 1e-14);
        assert!((gamma(c(5.0)).re - 24.0).abs() < 1e-11);
        assert!((gamma(c(-0.5)).re + 2.0 * PI.sqrt()).abs() < 1e-13);
        assert!((gamma(c(1.5)).re - 0.5 * PI.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn against_stirling() {
        for &re in &[-3.7, -0.3, 0.25, 0.5, 1.0, 2.2, 6.5, 13.0] {
            for &im in &[-60.0, -11.0, -1.5, 0.3, 4.0, 25.0, 80.0] {
                let z = Complex64::new(re, im);
                let a = gamma(z);
                let lb = stirling_ln_gamma(z);
                let b = lb.exp();
                // exponentiating amplifies the absolute error of the log
                let tol = 1e-13 * lb.norm().max(1.0);
                assert!((a - b).norm() <= tol * b.norm(), "z={z} {a} {b}");
            }
        }
    }

    #[test]
    fn pole_distance() {
        assert!(gamma_pole_distance(Complex64::new(-2.0, 0.0)) < 1e-15);
        assert!((gamma_pole_distance(Complex64::new(-0.25, 0.0)) - 0.25).abs() < 1e-15);
        assert!(gamma_pole_distance(Complex64::new(3.0, 0.0)).is_infinite());
    }
}
