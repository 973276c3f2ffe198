//! Smoothed evaluation of twisted L-values, root numbers, the first
//! nonvanishing twist scanner and the smoothed first moment.
//!
//! For a test function g and any s,
//!
//!   Λ(s)g(s) = Σ c(n) n^{-s} F₁(n) + ε Σ c̃(n) n^{s-1} F₂(n) − Σ_ρ res_ρ g(ρ)/(ρ−s)
//!
//! with F₁, F₂ inverse Mellin integrals over a vertical line. The integrals
//! are done by the trapezoid rule, which converges geometrically for these
//! analytic integrands.

mod moment;
mod scan;
mod weight;

pub use moment::{smoothed_moment, smoothed_moment_with, DiscSet, MomentOptions};
pub use scan::{
    first_nonvanishing, first_nonvanishing_with, fit_exponent, read_csv, scan_family, write_csv, Family,
    ScanOptions, ScanOutcome, ScanRecord, CSV_HEADER,
};
pub use weight::{afe_weight, SmoothingWeight, WeightKind, WeightTable};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::arith::FundamentalDiscriminant;
use crate::error::{Error, Result};
use crate::lseries::{ln_gamma_factor, LSeriesSpec, Twist};

/// Quadrature and truncation knobs for the smoothed sums.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AfeParams {
    /// Re z of the integration line.
    pub line: f64,
    /// Trapezoid step in Im z.
    pub step: f64,
    /// Gaussian mollifier width A in g(w) = exp((w − 1/2)²/A²).
    pub mollifier: f64,
    /// Relative size below which terms and nodes are dropped.
    pub tol: f64,
    /// Multiplies the automatically chosen n-cutoff.
    pub cutoff_scale: f64,
}

impl Default for AfeParams {
    fn default() -> Self {
        Self {
            line: 1.2,
            step: 0.1,
            mollifier: 12.0,
            tol: 1e-15,
            cutoff_scale: 1.0,
        }
    }
}

/// g(w) = exp((w − 1/2)²/a² + b(w − 1/2)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestFn {
    pub a: f64,
    pub b: f64,
}

impl TestFn {
    pub fn ln(&self, w: Complex64) -> Complex64 {
        let x = w - 0.5;
        x * x / (self.a * self.a) + self.b * x
    }
}

/// The three pieces of L(s) = a + ε·b − r, all divided by Q^{s/2}γ(s)g(s).
#[derive(Debug, Clone, Copy)]
pub struct Parts {
    pub a: Complex64,
    pub b: Complex64,
    pub r: Complex64,
    /// n-cutoffs used on the two sides.
    pub n1: usize,
    pub n2: usize,
}

impl Parts {
    pub fn value(&self, eps: Complex64) -> Complex64 {
        self.a + eps * self.b - self.r
    }
}

struct Nodes {
    /// Im z of the first node; nodes are t0 + k·step.
    t0: f64,
    step: f64,
    line: f64,
    w: Vec<Complex64>,
    /// Σ|w_k|, sets the rounding floor of `eval`.
    mass: f64,
}

impl Nodes {
    /// Size below which `eval(n)` is rounding noise.
    fn floor(&self, n: usize) -> f64 {
        64.0 * f64::EPSILON * self.mass * (self.step / (2.0 * PI)) * (n as f64).powf(-self.line)
    }

    /// (step/2π)·n^{−line}·Σ_k w_k n^{−i t_k}.
    fn eval(&self, n: usize) -> Complex64 {
        let ln = (n as f64).ln();
        let rot = Complex64::from_polar(1.0, -self.step * ln);
        let mut acc = Complex64::new(0.0, 0.0);
        let mut cis = Complex64::from_polar(1.0, -self.t0 * ln);
        for (k, wk) in self.w.iter().enumerate() {
            if k % 128 == 0 {
                let t = self.t0 + k as f64 * self.step;
                cis = Complex64::from_polar(1.0, -t * ln);
            }
            acc += wk * cis;
            cis *= rot;
        }
        acc * (self.step / (2.0 * PI)) * (n as f64).powf(-self.line)
    }
}

/// Evaluator bound to one twist.
pub struct Smoothed<'a> {
    tw: &'a Twist,
    params: AfeParams,
    dual_kappas: Vec<Complex64>,
    q: f64,
}

impl<'a> Smoothed<'a> {
    pub fn new(tw: &'a Twist, params: AfeParams) -> Result<Self> {
        if tw.conductor == 0 {
            return Err(Error::Domain("zero conductor".into()));
        }
        Ok(Self {
            tw,
            params,
            dual_kappas: tw.dual_kappas(),
            q: tw.conductor as f64,
        })
    }

    /// Builds node weights for F₁ (z-integral) or F₂ (u-integral), already
    /// divided by Q^{s/2}γ(s)g(s).
    fn nodes(&self, s: Complex64, g: TestFn, dual: bool) -> Result<Nodes> {
        let p = &self.params;
        // Each n-sum needs its line inside the region of absolute
        // convergence, so move it right as s leaves the critical strip.
        let c = if dual {
            p.line + (s.re - 0.5).max(0.0)
        } else {
            p.line + (0.5 - s.re).max(0.0)
        };
        let lq = self.q.ln();
        let norm = ln_gamma_factor(s, &self.tw.kappas)? + g.ln(s) + s * lq / 2.0;
        let integrand = |t: f64| -> Result<Complex64> {
            let z = Complex64::new(c, t);
            let ln = if !dual {
                (s + z) * lq / 2.0 + ln_gamma_factor(s + z, &self.tw.kappas)? + g.ln(s + z)
            } else {
                let w = 1.0 - s + z;
                w * lq / 2.0 + ln_gamma_factor(w, &self.dual_kappas)? + g.ln(s - z)
            };
            Ok((ln - norm).exp() / z)
        };
        // Walk outward until the integrand is negligible on both sides.
        let mut pos = vec![integrand(0.0)?];
        let mut neg = Vec::new();
        let mut peak = pos[0].norm();
        let limit = 20_000usize;
        for side in [1.0f64, -1.0] {
            let mut k = 1usize;
            let mut quiet = 0;
            loop {
                let v = integrand(side * k as f64 * p.step)?;
                peak = peak.max(v.norm());
                if side > 0.0 {
                    pos.push(v);
                } else {
                    neg.push(v);
                }
                if v.norm() < p.tol * 1e-3 * peak {
                    quiet += 1;
                    if quiet >= 8 {
                        break;
                    }
                } else {
                    quiet = 0;
                }
                k += 1;
                if k > limit {
                    return Err(Error::Numeric(format!(
                        "Mellin integrand still at {:.1e} of its peak at |Im z| = {:.0}",
                        v.norm() / peak,
                        k as f64 * p.step
                    )));
                }
            }
        }
        let t0 = -(neg.len() as f64) * p.step;
        neg.reverse();
        neg.extend(pos);
        let mass = neg.iter().map(|w| w.norm()).sum();
        Ok(Nodes {
            t0,
            step: p.step,
            line: c,
            w: neg,
            mass,
        })
    }

    /// Smallest n beyond which |F(m)|·m^{expo}·log-weight stays below tol.
    fn cutoff(&self, nodes: &Nodes, expo: f64, scale: f64) -> Result<usize> {
        let r = self.tw.degree() as i32;
        let size = |n: usize| {
            let nf = n as f64;
            let f = nodes.eval(n).norm();
            if f < nodes.floor(n) {
                // the weight has decayed into rounding noise
                return 0.0;
            }
            f * nf.powf(expo + 1.0) * (1.0 + nf.ln()).powi(r - 1)
        };
        let thresh = self.params.tol * scale.max(1e-300);
        let root = self.q.sqrt().max(1.0);
        let mut j = -8i32;
        let mut quiet = 0;
        loop {
            let n = ((root * 2f64.powf(j as f64 / 4.0)).ceil() as usize).max(1);
            if size(n) < thresh {
                quiet += 1;
                if quiet >= 3 {
                    let n = (n as f64 * self.params.cutoff_scale).ceil() as usize;
                    return Ok(n.max(1));
                }
            } else {
                quiet = 0;
            }
            j += 1;
            if j > 160 || n > 50_000_000 {
                return Err(Error::Numeric(format!("no n-cutoff found below {n}")));
            }
        }
    }

    pub fn parts(&self, s: Complex64, g: TestFn) -> Result<Parts> {
        let n1nodes = self.nodes(s, g, false)?;
        let n2nodes = self.nodes(s, g, true)?;
        let scale = n1nodes.eval(1).norm().max(n2nodes.eval(1).norm());
        let n1 = self.cutoff(&n1nodes, -s.re, scale)?;
        let n2 = self.cutoff(&n2nodes, s.re - 1.0, scale)?;
        let c = self.tw.coeffs(n1.max(n2))?;
        let selfdual = self.tw.selfdual();
        let a: Complex64 = (1..=n1)
            .into_par_iter()
            .map(|n| {
                if c[n] == Complex64::new(0.0, 0.0) {
                    return Complex64::new(0.0, 0.0);
                }
                c[n] * Complex64::from(n as f64).powc(-s) * n1nodes.eval(n)
            })
            .collect::<Vec<_>>()
            .into_iter()
            .sum();
        let b: Complex64 = (1..=n2)
            .into_par_iter()
            .map(|n| {
                if c[n] == Complex64::new(0.0, 0.0) {
                    return Complex64::new(0.0, 0.0);
                }
                let cn = if selfdual { c[n] } else { c[n].conj() };
                cn * Complex64::from(n as f64).powc(s - 1.0) * n2nodes.eval(n)
            })
            .collect::<Vec<_>>()
            .into_iter()
            .sum();
        let mut r = Complex64::new(0.0, 0.0);
        if !self.tw.poles.is_empty() {
            let lq = self.q.ln();
            let norm = (ln_gamma_factor(s, &self.tw.kappas)? + g.ln(s) + s * lq / 2.0).exp();
            for &(rho, res) in &self.tw.poles {
                let gap = rho - s;
                if gap.norm() < 1e-12 {
                    return Err(Error::Domain(format!("s = {s} is a pole")));
                }
                r += res * g.ln(rho).exp() / gap;
            }
            r /= norm;
        }
        Ok(Parts { a, b, r, n1, n2 })
    }

    fn epsilon(&self) -> Result<Complex64> {
        self.tw
            .epsilon
            .ok_or_else(|| Error::Domain("root number unknown for this twist".into()))
    }

    /// L(s) with the known root number and test function g.
    pub fn l_value_with(&self, s: Complex64, g: TestFn) -> Result<Complex64> {
        Ok(self.parts(s, g)?.value(self.epsilon()?))
    }

    /// L(s); uses an asymmetric test function so that the two sides of the
    /// functional equation are not trivially interchanged.
    pub fn l_value(&self, s: Complex64) -> Result<Complex64> {
        self.l_value_with(
            s,
            TestFn {
                a: self.params.mollifier,
                b: 1.0,
            },
        )
    }

    /// Λ(s) = Q^{s/2} γ(s) L(s).
    pub fn lambda(&self, s: Complex64) -> Result<Complex64> {
        let l = self.l_value(s)?;
        let f = (s * self.q.ln() / 2.0 + ln_gamma_factor(s, &self.tw.kappas)?).exp();
        Ok(l * f)
    }
}

/// L(1/2, π⊗χ_d).
pub fn central_value(spec: &LSeriesSpec, d: &FundamentalDiscriminant) -> Result<Complex64> {
    central_value_with(spec, d, AfeParams::default())
}

pub fn central_value_with(
    spec: &LSeriesSpec,
    d: &FundamentalDiscriminant,
    params: AfeParams,
) -> Result<Complex64> {
    let tw = resolved_twist(spec, d, params)?;
    let ev = Smoothed::new(&tw, params)?;
    let g = TestFn {
        a: params.mollifier,
        b: 0.0,
    };
    ev.l_value_with(Complex64::new(0.5, 0.0), g)
}

/// π⊗χ_d with its root number filled in, estimated when no closed rule applies.
pub fn resolved_twist(spec: &LSeriesSpec, d: &FundamentalDiscriminant, params: AfeParams) -> Result<Twist> {
    let mut tw = spec.twist(d)?;
    if tw.epsilon.is_none() {
        let est = root_number_estimate_twist(&tw, params)?;
        if !est.reliable {
            return Err(Error::Numeric(format!(
                "root number of {} ⊗ χ_{d} could not be estimated (|ε̂| = {:.3})",
                spec.name,
                est.raw.norm()
            )));
        }
        tw.epsilon = Some(est.value);
    }
    Ok(tw)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootNumberEstimate {
    /// Unit-circle projection (rounded to ±1 for self-dual twists).
    pub value: Complex64,
    /// Average of the raw per-δ solutions.
    pub raw: Complex64,
    pub reliable: bool,
}

/// Estimates ε(π⊗χ_d) from the requirement that L(1/2+δ) not depend on the
/// test function, for δ ∈ {0.1, 0.2}.
pub fn root_number_estimate(spec: &LSeriesSpec, d: &FundamentalDiscriminant) -> Result<RootNumberEstimate> {
    let tw = spec.twist(d)?;
    root_number_estimate_twist(&tw, AfeParams::default())
}

pub fn root_number_estimate_twist(tw: &Twist, params: AfeParams) -> Result<RootNumberEstimate> {
    let ev = Smoothed::new(tw, params)?;
    let g1 = TestFn {
        a: params.mollifier,
        b: 0.0,
    };
    let g2 = TestFn {
        a: params.mollifier,
        b: 1.0,
    };
    let mut sum = Complex64::new(0.0, 0.0);
    let deltas = [0.1, 0.2];
    for &delta in &deltas {
        let s = Complex64::new(0.5 + delta, 0.0);
        let p1 = ev.parts(s, g1)?;
        let p2 = ev.parts(s, g2)?;
        let den = p1.b - p2.b;
        if den.norm() < 1e-12 * (p1.b.norm() + p2.b.norm()).max(1e-300) {
            return Err(Error::Numeric("root-number system is degenerate".into()));
        }
        sum += ((p2.a - p2.r) - (p1.a - p1.r)) / den;
    }
    let raw = sum / deltas.len() as f64;
    let reliable = (raw.norm() - 1.0).abs() <= 0.05;
    let value = if tw.selfdual() {
        Complex64::new(raw.re.signum(), 0.0)
    } else {
        raw / raw.norm()
    };
    Ok(RootNumberEstimate { value, raw, reliable })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::fundamental_discriminants;

    use crate::oracles;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn zeta_half() {
        let z = LSeriesSpec::riemann_zeta();
        let v = central_value(&z, &FundamentalDiscriminant::new(1).unwrap()).unwrap();
        let want = oracles::zeta_eta(0.5);
        assert!((v.re - want).abs() < 1e-10, "{v} vs {want}");
        assert!(v.im.abs() < 1e-12);
    }

    #[test]
    fn chi5_half() {
        let s = LSeriesSpec::quadratic_char(5).unwrap();
        let v = central_value(&s, &FundamentalDiscriminant::new(1).unwrap()).unwrap();
        let want = oracles::dirichlet_l_hurwitz(0.5, 5);
        assert!((v.re - want).abs() < 1e-10, "{v} vs {want}");
    }

    #[test]
    fn gl1_twists_small() {
        let s = LSeriesSpec::quadratic_char(5).unwrap();
        for d in fundamental_discriminants(40) {
            if d.d() % 5 == 0 {
                continue;
            }
            let v = central_value(&s, &d).unwrap();
            let want = oracles::dirichlet_l_hurwitz(0.5, 5 * d.d());
            assert!((v.re - want).abs() < 1e-9, "d={d}: {v} vs {want}");
        }
    }

    #[test]
    fn zeta_off_center() {
        let z = LSeriesSpec::riemann_zeta();
        let tw = Twist::untwisted(&z).unwrap();
        let ev = Smoothed::new(&tw, AfeParams::default()).unwrap();
        for &x in &[0.3, 0.75, 2.0, 3.0] {
            let v = ev.l_value(c(x)).unwrap();
            let want = oracles::zeta_eta(x);
            assert!((v.re - want).abs() < 1e-10 * want.abs().max(1.0), "s={x}: {v} vs {want}");
        }
    }

    #[test]
    fn delta_odd_twists_vanish() {
        let dl = LSeriesSpec::delta();
        for d in [-3i64, -4, -7] {
            let v = central_value(&dl, &FundamentalDiscriminant::new(d).unwrap()).unwrap();
            assert!(v.norm() < 1e-10, "d={d}: {v}");
        }
        let v = central_value(&dl, &FundamentalDiscriminant::new(1).unwrap()).unwrap();
        assert!(v.re > 0.1);
    }

    #[test]
    fn root_numbers() {
        let one = FundamentalDiscriminant::new(1).unwrap();
        for (spec, want) in [
            (LSeriesSpec::quadratic_char(5).unwrap(), 1.0),
            (LSeriesSpec::quadratic_char(-4).unwrap(), 1.0),
            (LSeriesSpec::delta(), 1.0),
        ] {
            let e = root_number_estimate(&spec, &one).unwrap();
            assert!(e.reliable, "{} raw {}", spec.name, e.raw);
            assert!((e.raw - c(want)).norm() < 1e-6, "{} raw {}", spec.name, e.raw);
        }
        let e = root_number_estimate(&LSeriesSpec::delta(), &FundamentalDiscriminant::new(-3).unwrap()).unwrap();
        assert!((e.raw + 1.0).norm() < 1e-6);
    }

    #[test]
    fn sym2_twist_root_numbers_are_units() {
        let s2 = LSeriesSpec::sym2_cusp(12).unwrap();
        for d in [1i64, -3, -4, 5, -7, 8] {
            let tw = s2.twist(&FundamentalDiscriminant::new(d).unwrap()).unwrap();
            let e = root_number_estimate_twist(&tw, AfeParams::default()).unwrap();
            assert!((e.raw.norm() - 1.0).abs() < 1e-6, "d={d} raw {}", e.raw);
        }
    }

    #[test]
    fn afe_halves_swap() {
        // self-dual, ε = +1: the two sums coincide at the centre
        let dl = LSeriesSpec::delta();
        let tw = dl.twist(&FundamentalDiscriminant::new(5).unwrap()).unwrap();
        let ev = Smoothed::new(&tw, AfeParams::default()).unwrap();
        let p = ev.parts(c(0.5), TestFn { a: 12.0, b: 0.0 }).unwrap();
        assert!((p.a - p.b).norm() < 1e-12 * p.a.norm());
    }
}
