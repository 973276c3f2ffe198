//! Pole of Z at w = 1 read off from the growth of the smoothed first moment.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::Tags;
use crate::arith::{self, FundamentalDiscriminant};
use crate::central::{central_value_with, smoothed_moment_with, AfeParams, DiscSet, MomentOptions};
use crate::error::{Error, Result};
use crate::lseries::LSeriesSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidueOptions {
    pub xs: Vec<f64>,
    pub discs: DiscSet,
    pub include_ramified: bool,
    /// Hard bound on |d| on top of the weight cutoff.
    pub bound: u64,
    pub params: AfeParams,
}

impl Default for ResidueOptions {
    fn default() -> Self {
        Self {
            xs: vec![25.0, 50.0, 100.0, 200.0],
            discs: DiscSet::Positive,
            include_ramified: false,
            bound: 1_000_000,
            params: AfeParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidueEstimate {
    /// 1 for ℐ/X → κ, 2 when a κ_log·log X term is significant.
    pub order: u32,
    pub kappa: f64,
    pub kappa_se: f64,
    pub kappa_log: f64,
    pub kappa_log_se: f64,
    /// Coefficient of X^{−1/4} for degree 3.
    pub kappa_quarter: Option<f64>,
    /// Coefficient of the highest-order term and its standard error.
    pub leading: f64,
    pub leading_se: f64,
    /// Leading coefficient differs from zero by more than three standard errors.
    pub nonzero: bool,
    pub xs: Vec<f64>,
    /// ℐ(X)/X at each X.
    pub ratios: Vec<f64>,
    pub inconclusive: Option<String>,
}

/// Fits ℐ(X)/X over the default X values for the family
/// d ↦ χ_{a₂ℓ₂}(d) L(1/2, π⊗χ_d χ_{a₁ℓ₁}).
pub fn residue_estimate(spec: &LSeriesSpec, tags: Tags) -> Result<ResidueEstimate> {
    let opts = ResidueOptions::default();
    let params = opts.params;
    residue_estimate_with(spec, &opts, |d| {
        let lead = tags.d_char.eval(d.d());
        if lead == 0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let m = d.d0() * tags.n_char.label();
        let (k, _) = arith::squarefree_decompose(m.unsigned_abs())?;
        let fd = FundamentalDiscriminant::from_squarefree(k as i64 * m.signum())?;
        Ok(central_value_with(spec, &fd, params)? * lead as f64)
    })
}

/// As [`residue_estimate`] with the central values supplied by `value`.
pub fn residue_estimate_with<F>(spec: &LSeriesSpec, opts: &ResidueOptions, value: F) -> Result<ResidueEstimate>
where
    F: Fn(&FundamentalDiscriminant) -> Result<Complex64> + Sync,
{
    let mopts = MomentOptions {
        discs: opts.discs,
        include_ramified: opts.include_ramified,
        params: opts.params,
        ..Default::default()
    };
    let mut ratios = Vec::with_capacity(opts.xs.len());
    for &x in &opts.xs {
        ratios.push(smoothed_moment_with(spec, x, opts.bound, &mopts, &value)? / x);
    }
    fit_residue(&opts.xs, &ratios, spec.degree())
}

/// Least squares of y on the given columns; returns coefficients, standard
/// errors and the residual rms.
fn least_squares(cols: &[Vec<f64>], y: &[f64]) -> Option<(Vec<f64>, Vec<f64>, f64)> {
    let k = cols.len();
    let n = y.len();
    if n < k {
        return None;
    }
    let mut a = vec![vec![0.0; 2 * k]; k];
    for i in 0..k {
        for j in 0..k {
            a[i][j] = (0..n).map(|t| cols[i][t] * cols[j][t]).sum();
        }
        a[i][k + i] = 1.0;
    }
    // invert the normal matrix by Gauss–Jordan
    for c in 0..k {
        let piv = (c..k).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[piv][c].abs() < 1e-300 {
            return None;
        }
        a.swap(c, piv);
        let inv = 1.0 / a[c][c];
        for v in a[c].iter_mut() {
            *v *= inv;
        }
        let prow = a[c].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i != c {
                let f = row[c];
                for (v, p) in row.iter_mut().zip(&prow) {
                    *v -= f * p;
                }
            }
        }
    }
    let xty: Vec<f64> = (0..k).map(|i| (0..n).map(|t| cols[i][t] * y[t]).sum()).collect();
    let beta: Vec<f64> = (0..k).map(|i| (0..k).map(|j| a[i][k + j] * xty[j]).sum()).collect();
    let rss: f64 = (0..n)
        .map(|t| {
            let fit: f64 = (0..k).map(|i| beta[i] * cols[i][t]).sum();
            (y[t] - fit).powi(2)
        })
        .sum();
    let dof = n - k;
    let s2 = if dof > 0 { rss / dof as f64 } else { f64::NAN };
    let se = (0..k).map(|i| (s2 * a[i][k + i]).sqrt()).collect();
    Some((beta, se, (rss / n as f64).sqrt()))
}

/// Chooses between a constant and a κ + κ_log·log X model for ℐ(X)/X.
pub fn fit_residue(xs: &[f64], ratios: &[f64], degree: usize) -> Result<ResidueEstimate> {
    if xs.len() != ratios.len() || xs.is_empty() {
        return Err(Error::Domain("need one ratio per X".into()));
    }
    if xs.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::Domain("X values must be positive".into()));
    }
    let ones = vec![1.0; xs.len()];
    let logs: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let quarter: Vec<f64> = xs.iter().map(|x| x.powf(-0.25)).collect();
    let extra = degree == 3;
    let mut inconclusive = None;
    if ratios.iter().any(|r| !r.is_finite()) {
        inconclusive = Some("non-finite moment values".to_string());
    }

    let mut cols = vec![ones.clone(), logs];
    if extra {
        cols.push(quarter.clone());
    }
    let full = least_squares(&cols, ratios);
    let log_term = full.as_ref().map(|(b, se, _)| (b[1], se[1]));
    let use_log = matches!(log_term, Some((b, se)) if b.abs() > 3.0 * se);

    let (beta, se, rms, order) = if use_log {
        let (b, s, r) = full.expect("checked");
        (b, s, r, 2)
    } else {
        let mut cols = vec![ones];
        if extra {
            cols.push(quarter);
        }
        let (b, s, r) = least_squares(&cols, ratios).ok_or_else(|| Error::Numeric("singular residue fit".into()))?;
        // re-index as (κ, κ_log = 0, κ′)
        let mut b2 = vec![b[0], 0.0];
        let mut s2 = vec![s[0], 0.0];
        if extra {
            b2.push(b[1]);
            s2.push(s[1]);
        }
        (b2, s2, r, 1)
    };
    let (leading, leading_se) = if order == 2 { (beta[1], se[1]) } else { (beta[0], se[0]) };
    if inconclusive.is_none() {
        let scale = ratios.iter().fold(0.0f64, |m, r| m.max(r.abs()));
        if leading_se.is_nan() {
            inconclusive = Some("too few X values for the fitted model".into());
        } else if scale > 0.0 && rms > 0.2 * scale {
            inconclusive = Some(format!("fit residual {rms:.3e} is large against |ℐ/X| ≤ {scale:.3e}"));
        }
    }
    Ok(ResidueEstimate {
        order,
        kappa: beta[0],
        kappa_se: se[0],
        kappa_log: beta[1],
        kappa_log_se: se[1],
        kappa_quarter: if extra { Some(beta[2]) } else { None },
        leading,
        leading_se,
        nonzero: leading.abs() > 3.0 * leading_se,
        xs: xs.to_vec(),
        ratios: ratios.to_vec(),
        inconclusive,
    })
}
