//! Inverse-Mellin smoothing weights V(y).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::lseries::{ln_gamma_factor, LSeriesSpec};
use crate::special::ln_gamma;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WeightKind {
    /// V(y) = (1/2πi)∫ γ(1/2+u)/γ(1/2) · e^{u²/A²} · y^{−u} du/u.
    Afe {
        kappas: Vec<Complex64>,
        mollifier: Option<f64>,
    },
    /// V(y) = (1/2πi)∫ G_r(w)/G_r(1) · y^{−w} dw with
    /// G₁ = G₊G₊,π, G₂ = G₊²G₊,π, G₃ = G₊²G₊(2w−1/2)G₊,π².
    GammaRatio { degree: usize, kappas: Vec<Complex64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothingWeight {
    pub kind: WeightKind,
    /// Re of the integration line near y = 1; larger y move it right.
    pub line: f64,
    pub step: f64,
}

/// log G₊(w) = log(π^{−w/2} Γ(w/2)).
fn ln_g_plus(w: Complex64) -> Complex64 {
    -w * PI.ln() / 2.0 + ln_gamma(w / 2.0)
}

impl SmoothingWeight {
    pub fn afe(spec: &LSeriesSpec) -> Self {
        Self {
            kind: WeightKind::Afe {
                kappas: spec.kappas.clone(),
                mollifier: Some(12.0),
            },
            line: 1.2,
            step: 0.1,
        }
    }

    pub fn gamma_ratio(spec: &LSeriesSpec) -> Self {
        Self {
            kind: WeightKind::GammaRatio {
                degree: spec.degree,
                kappas: spec.kappas.clone(),
            },
            line: 2.0,
            step: 0.1,
        }
    }

    /// log of the Mellin-side integrand without the y^{−u} factor.
    pub fn ln_kernel(&self, u: Complex64) -> Result<Complex64> {
        match &self.kind {
            WeightKind::Afe { kappas, mollifier } => {
                let half = Complex64::new(0.5, 0.0);
                let mut v = ln_gamma_factor(half + u, kappas)? - ln_gamma_factor(half, kappas)? - u.ln();
                if let Some(a) = mollifier {
                    v += u * u / (a * a);
                }
                Ok(v)
            }
            WeightKind::GammaRatio { degree, kappas } => {
                let one = Complex64::new(1.0, 0.0);
                Ok(ln_g_ratio(*degree, kappas, u)? - ln_g_ratio(*degree, kappas, one)?)
            }
        }
    }

    /// Rightmost singularity of the kernel.
    fn rightmost_pole(&self) -> f64 {
        match self.kind {
            WeightKind::Afe { .. } => 0.0,
            WeightKind::GammaRatio { degree: 3, .. } => 0.25,
            WeightKind::GammaRatio { .. } => 0.0,
        }
    }

    /// Integration line for V(y), the residue picked up if the line was
    /// moved left of u = 0, and a trapezoid step fine enough for y. None
    /// when V(y) underflows.
    fn contour(&self, y: f64) -> Result<Option<(f64, f64, f64)>> {
        let (line, offset, dist) = if y < 1.0 {
            match self.kind {
                // past the pole at u = 0, whose residue is 1; the Γ poles
                // start at u = −1/2
                WeightKind::Afe { .. } => (-0.25, 1.0, 0.25),
                // Rounding is amplified by y^{−c}, so hug the pole as y → 0.
                WeightKind::GammaRatio { .. } => {
                    let dist = (10.0 / y.ln().abs()).min(0.5);
                    let c = self.line.min(self.rightmost_pole() + dist);
                    (c, 0.0, c - self.rightmost_pole())
                }
            }
        } else {
            let Some(c) = self.saddle(y)? else {
                return Ok(None);
            };
            (c, 0.0, c - self.rightmost_pole())
        };
        // The trapezoid rule at step h errs by about exp(−dist·(2π/h − |ln y|)),
        // and the check runs at 2h.
        let h = self.step.min(PI / (y.ln().abs() + 35.0 / dist));
        Ok(Some((line, offset, h)))
    }

    /// Minimizer of |kernel(c)|·y^{−c}, which is convex in c; on that line
    /// V(y) comes out to relative accuracy. None once the bound on V is
    /// below the smallest double.
    fn saddle(&self, y: f64) -> Result<Option<f64>> {
        let ly = y.ln();
        let phi = |c: f64| -> Result<f64> { Ok(self.ln_kernel(Complex64::new(c, 0.0))?.re - c * ly) };
        let (mut lo, mut hi) = (self.line, self.line + 1.0);
        while phi(hi)? < phi(hi - 0.5)? {
            if phi(hi)? < -760.0 {
                return Ok(None);
            }
            lo = hi - 0.5;
            hi *= 2.0;
            if hi > 1e5 {
                return Err(Error::Numeric(format!("no saddle for V({y})")));
            }
        }
        for _ in 0..60 {
            let a = lo + (hi - lo) / 3.0;
            let b = hi - (hi - lo) / 3.0;
            if phi(a)? < phi(b)? {
                hi = b;
            } else {
                lo = a;
            }
        }
        Ok(Some((lo + hi) / 2.0))
    }
}

fn ln_g_ratio(degree: usize, kappas: &[Complex64], w: Complex64) -> Result<Complex64> {
    let gpi = ln_gamma_factor(w, kappas)?;
    let gp = ln_g_plus(w);
    Ok(match degree {
        1 => gp + gpi,
        2 => 2.0 * gp + gpi,
        3 => 2.0 * gp + ln_g_plus(2.0 * w - 0.5) + 2.0 * gpi,
        r => return Err(Error::Domain(format!("no moment weight for degree {r}"))),
    })
}

/// Node weights on one vertical line, reusable across many y.
pub struct WeightTable {
    line: f64,
    step: f64,
    t0: f64,
    /// Node weights divided by exp(ln_scale).
    w: Vec<Complex64>,
    ln_scale: f64,
}

impl WeightTable {
    pub fn new(weight: &SmoothingWeight, line: f64, step: f64) -> Result<Self> {
        let ln_scale = weight.ln_kernel(Complex64::new(line, 0.0))?.re;
        let f = |t: f64| -> Result<Complex64> { Ok((weight.ln_kernel(Complex64::new(line, t))? - ln_scale).exp()) };
        let mut pos = vec![f(0.0)?];
        let mut neg = Vec::new();
        let mut peak = pos[0].norm();
        for side in [1.0f64, -1.0] {
            let mut k = 1usize;
            let mut quiet = 0;
            loop {
                let v = f(side * k as f64 * step)?;
                peak = peak.max(v.norm());
                if side > 0.0 {
                    pos.push(v)
                } else {
                    neg.push(v)
                }
                if v.norm() < 1e-19 * peak {
                    quiet += 1;
                    if quiet >= 8 {
                        break;
                    }
                } else {
                    quiet = 0;
                }
                k += 1;
                if k > 50_000 {
                    return Err(Error::Numeric("smoothing kernel does not decay on the line".into()));
                }
            }
        }
        let t0 = -(neg.len() as f64) * step;
        neg.reverse();
        neg.extend(pos);
        Ok(Self {
            line,
            step,
            t0,
            w: neg,
            ln_scale,
        })
    }

    pub fn eval(&self, y: f64) -> f64 {
        let ly = y.ln();
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, wk) in self.w.iter().enumerate() {
            let t = self.t0 + k as f64 * self.step;
            acc += wk * Complex64::from_polar(1.0, -t * ly);
        }
        (acc * (self.step / (2.0 * PI)) * (self.ln_scale - self.line * ly).exp()).re
    }
}

/// V(y) by trapezoid quadrature, checked against the half-step rule.
pub fn afe_weight(y: f64, w: &SmoothingWeight) -> Result<f64> {
    if !(y > 0.0) || !y.is_finite() {
        return Err(Error::Domain(format!("afe_weight needs y > 0, got {y}")));
    }
    let Some((line, offset, h)) = w.contour(y)? else {
        return Ok(0.0);
    };
    let coarse = offset + WeightTable::new(w, line, 2.0 * h)?.eval(y);
    let fine = offset + WeightTable::new(w, line, h)?.eval(y);
    let err = (coarse - fine).abs();
    if err > 1e-8 * fine.abs() && err > 1e-300 {
        return Err(Error::Numeric(format!(
            "V({y}) quadrature not converged: {fine:.3e} ± {err:.1e}"
        )));
    }
    Ok(fine)
}
