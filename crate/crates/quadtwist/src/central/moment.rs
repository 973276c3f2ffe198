//! Smoothed first moment Σ_d L(1/2, π⊗χ_d) V(|d|/X).

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{central_value_with, AfeParams, SmoothingWeight, WeightTable};
use crate::arith::{self, fundamental_discriminants, FundamentalDiscriminant};
use crate::error::{Error, Result};
use crate::lseries::LSeriesSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiscSet {
    Positive,
    Negative,
    Both,
}

impl DiscSet {
    fn contains(self, d: i64) -> bool {
        match self {
            DiscSet::Positive => d > 0,
            DiscSet::Negative => d < 0,
            DiscSet::Both => true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentOptions {
    pub discs: DiscSet,
    pub include_ramified: bool,
    /// d-terms stop once V(|d|/X) falls below this.
    pub tail: f64,
    pub params: AfeParams,
}

impl Default for MomentOptions {
    fn default() -> Self {
        Self {
            discs: DiscSet::Positive,
            include_ramified: false,
            tail: 1e-10,
            params: AfeParams::default(),
        }
    }
}

/// Smallest y ≥ 1 past which V stays below `tail` on a geometric grid.
fn weight_cutoff(tab: &WeightTable, tail: f64) -> f64 {
    let mut y = 1.0;
    let mut quiet = 0;
    let mut first_quiet = y;
    while y < 1e6 {
        if tab.eval(y).abs() < tail {
            if quiet == 0 {
                first_quiet = y;
            }
            quiet += 1;
            if quiet >= 6 {
                return first_quiet;
            }
        } else {
            quiet = 0;
        }
        y *= 1.1;
    }
    y
}

/// ℐ(X) for the family of twists of `spec`, with |d| ≤ bound.
pub fn smoothed_moment(spec: &LSeriesSpec, x: f64, bound: u64) -> Result<f64> {
    smoothed_moment_with(spec, x, bound, &MomentOptions::default(), |d| {
        central_value_with(spec, d, AfeParams::default())
    })
}

/// ℐ(X) with the central values supplied by `value`.
pub fn smoothed_moment_with<F>(spec: &LSeriesSpec, x: f64, bound: u64, opts: &MomentOptions, value: F) -> Result<f64>
where
    F: Fn(&FundamentalDiscriminant) -> Result<Complex64> + Sync,
{
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("moment needs X > 0, got {x}")));
    }
    let w = SmoothingWeight::gamma_ratio(spec);
    let tab = WeightTable::new(&w, w.line, w.step)?;
    let ymax = weight_cutoff(&tab, opts.tail);
    let dmax = ((ymax * x).floor() as u64).min(bound);
    let ds: Vec<FundamentalDiscriminant> = fundamental_discriminants(dmax)
        .into_iter()
        .filter(|d| opts.discs.contains(d.d()))
        .filter(|d| opts.include_ramified || arith::gcd(spec.level, d.conductor()) == 1)
        .collect();
    let terms: Vec<Result<f64>> = ds
        .par_iter()
        .map(|d| {
            let v = value(d)?;
            Ok(v.re * tab.eval(d.conductor() as f64 / x))
        })
        .collect();
    let mut total = 0.0;
    for t in terms {
        total += t?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_x_keeps_only_d_one() {
        let z = LSeriesSpec::riemann_zeta();
        let w = SmoothingWeight::gamma_ratio(&z);
        let tab = WeightTable::new(&w, w.line, w.step).unwrap();
        let x = 0.05;
        let got = smoothed_moment(&z, x, 1000).unwrap();
        let one = FundamentalDiscriminant::new(1).unwrap();
        let want = central_value_with(&z, &one, AfeParams::default()).unwrap().re * tab.eval(1.0 / x);
        assert!((got - want).abs() < 1e-12, "{got} {want}");
    }

    #[test]
    fn truncation_is_stable() {
        let z = LSeriesSpec::riemann_zeta();
        let a = smoothed_moment(&z, 10.0, 10_000).unwrap();
        let opts = MomentOptions { tail: 1e-20, ..Default::default() };
        let b = smoothed_moment_with(&z, 10.0, 10_000, &opts, |d| central_value_with(&z, d, AfeParams::default())).unwrap();
        assert!((a - b).abs() < 1e-6, "{a} {b}");
    }

    #[test]
    fn zero_values_give_zero() {
        let z = LSeriesSpec::riemann_zeta();
        let v = smoothed_moment_with(&z, 20.0, 1000, &MomentOptions::default(), |_| Ok(Complex64::new(0.0, 0.0))).unwrap();
        assert_eq!(v, 0.0);
        assert!(smoothed_moment(&z, 0.0, 10).is_err());
    }
}
