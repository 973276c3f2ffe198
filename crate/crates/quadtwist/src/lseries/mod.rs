//! L-series data: coefficients, Gamma factors, conductors and twists.
//!
//! Everything is in the analytic normalization, with the functional equation
//! relating s and 1 − s.

pub mod coeffs;
pub mod conductor;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::{Arc, RwLock};

use crate::arith::{self, FundamentalDiscriminant};
use crate::error::{Error, Result};
use crate::special::{gamma_pole_distance, ln_gamma};

pub use coeffs::{CoeffSource, Generator, CUSP_WEIGHTS};
pub use conductor::{local_ramified_conductor, LocalKind, LocalRepType};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CharOrder {
    Trivial,
    Quadratic,
    Other,
}

/// Central character ψ of π.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CentralChar {
    pub conductor: u64,
    pub order: CharOrder,
}

impl CentralChar {
    pub const TRIVIAL: CentralChar = CentralChar {
        conductor: 1,
        order: CharOrder::Trivial,
    };
}

/// How the root number of π⊗χ_d is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TwistRootRule {
    /// Always +1 (primitive quadratic Dirichlet characters).
    One,
    /// ε(π)·sign(d), the rule for level-one GL(2) forms.
    SignOfD,
    /// No closed rule; estimate numerically.
    Estimate,
}

#[derive(Default)]
struct CoeffCache {
    data: RwLock<Option<Arc<Vec<Complex64>>>>,
}

impl std::fmt::Debug for CoeffCache {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("CoeffCache")
    }
}

#[derive(Debug, Clone)]
pub struct LSeriesSpec {
    pub name: String,
    pub degree: usize,
    pub level: u64,
    /// Γ shifts of π and of its twists by χ_d with d > 0.
    pub kappas: Vec<Complex64>,
    /// Γ shifts of twists by χ_d with d < 0.
    pub kappas_odd: Vec<Complex64>,
    pub source: CoeffSource,
    pub psi: CentralChar,
    /// Root number of π itself, if known.
    pub epsilon: Option<Complex64>,
    pub twist_root: TwistRootRule,
    pub selfdual: bool,
    /// Poles of Λ(s, π) as (location, residue); only ζ has any here.
    pub poles: Vec<(Complex64, Complex64)>,
    pub local: Vec<LocalRepType>,
    cache: Arc<CoeffCache>,
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

impl LSeriesSpec {
    pub fn riemann_zeta() -> Self {
        Self::from_parts(
            "riemann-zeta",
            1,
            1,
            vec![real(0.0)],
            vec![real(1.0)],
            CoeffSource::Generator(Generator::RiemannZeta),
            CentralChar::TRIVIAL,
            Some(real(1.0)),
            TwistRootRule::One,
            vec![(real(1.0), real(1.0)), (real(0.0), real(-1.0))],
        )
    }

    /// χ_q for an odd prime q (taken as the character of conductor q) or for
    /// any fundamental discriminant q.
    pub fn quadratic_char(q: i64) -> Result<Self> {
        let disc = if arith::is_fundamental_discriminant(q)? {
            q
        } else if q > 2 && arith::is_prime(q as u64) {
            if q % 4 == 1 {
                q
            } else {
                -q
            }
        } else {
            return Err(Error::Domain(format!(
                "quadratic-char needs an odd prime or a fundamental discriminant, got {q}"
            )));
        };
        let fd = FundamentalDiscriminant::new(disc)?;
        let level = fd.conductor();
        let parity = if disc > 0 { 0.0 } else { 1.0 };
        let mut local = Vec::new();
        for (p, e) in arith::factorize(level) {
            local.push(LocalRepType {
                prime: p,
                kind: LocalKind::Character { a: e },
            });
        }
        let mut spec = Self::from_parts(
            &format!("quadratic-char:{disc}"),
            1,
            level,
            vec![real(parity)],
            vec![real(1.0 - parity)],
            CoeffSource::Generator(Generator::QuadraticChar(disc)),
            CentralChar {
                conductor: level,
                order: if disc == 1 {
                    CharOrder::Trivial
                } else {
                    CharOrder::Quadratic
                },
            },
            Some(real(1.0)),
            TwistRootRule::One,
            vec![],
        );
        spec.local = local;
        if disc == 1 {
            return Ok(Self::riemann_zeta());
        }
        Ok(spec)
    }

    /// The level-one eigenform of weight k.
    pub fn cusp_form(k: u32) -> Result<Self> {
        if !CUSP_WEIGHTS.contains(&k) {
            return Err(Error::Domain(format!(
                "no built-in level-one eigenform of weight {k} (have {CUSP_WEIGHTS:?})"
            )));
        }
        let kf = k as f64;
        let kap = vec![real((kf - 1.0) / 2.0), real((kf + 1.0) / 2.0)];
        let eps = if (k / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
        let name = if k == 12 {
            "delta-weight-12".to_string()
        } else {
            format!("cusp-weight:{k}")
        };
        Ok(Self::from_parts(
            &name,
            2,
            1,
            kap.clone(),
            kap,
            CoeffSource::Generator(Generator::CuspWeight(k)),
            CentralChar::TRIVIAL,
            Some(real(eps)),
            TwistRootRule::SignOfD,
            vec![],
        ))
    }

    pub fn delta() -> Self {
        Self::cusp_form(12).expect("weight 12 is built in")
    }

    /// Symmetric square of the level-one weight-k eigenform.
    pub fn sym2_cusp(k: u32) -> Result<Self> {
        Self::cusp_form(k)?;
        let kf = k as f64;
        Ok(Self::from_parts(
            &format!("sym2-of:{}", Generator::CuspWeight(k).name()),
            3,
            1,
            vec![real(1.0), real(kf - 1.0), real(kf)],
            vec![real(0.0), real(kf - 1.0), real(kf)],
            CoeffSource::Generator(Generator::Sym2Of(Box::new(Generator::CuspWeight(k)))),
            CentralChar::TRIVIAL,
            Some(real(1.0)),
            TwistRootRule::Estimate,
            vec![],
        ))
    }

    /// A user-supplied entire L-series. Twists of odd sign get the standard
    /// parity shift of the first `parity_shifted` kappas (0 ↔ 1).
    #[allow(clippy::too_many_arguments)]
    pub fn custom(
        name: &str,
        level: u64,
        kappas: Vec<Complex64>,
        kappas_odd: Vec<Complex64>,
        source: CoeffSource,
        epsilon: Option<Complex64>,
        selfdual: bool,
    ) -> Result<Self> {
        if kappas.is_empty() || kappas.len() > 3 || kappas_odd.len() != kappas.len() {
            return Err(Error::Config("degree must be 1, 2 or 3 with matching odd kappas".into()));
        }
        if kappas.iter().chain(&kappas_odd).any(|k| k.re < 0.0) {
            return Err(Error::Config("Gamma shifts need Re κ ≥ 0".into()));
        }
        if let Some(e) = epsilon {
            if (e.norm() - 1.0).abs() > 1e-9 {
                return Err(Error::Config(format!("root number {e} is not on the unit circle")));
            }
        }
        let mut spec = Self::from_parts(
            name,
            kappas.len(),
            level,
            kappas,
            kappas_odd,
            source,
            CentralChar::TRIVIAL,
            epsilon,
            TwistRootRule::Estimate,
            vec![],
        );
        spec.selfdual = selfdual;
        Ok(spec)
    }

    #[allow(clippy::too_many_arguments)]
    fn from_parts(
        name: &str,
        degree: usize,
        level: u64,
        kappas: Vec<Complex64>,
        kappas_odd: Vec<Complex64>,
        source: CoeffSource,
        psi: CentralChar,
        epsilon: Option<Complex64>,
        twist_root: TwistRootRule,
        poles: Vec<(Complex64, Complex64)>,
    ) -> Self {
        Self {
            name: name.to_string(),
            degree,
            level,
            kappas,
            kappas_odd,
            source,
            psi,
            epsilon,
            twist_root,
            selfdual: true,
            poles,
            local: Vec::new(),
            cache: Arc::new(CoeffCache::default()),
        }
    }

    /// Parses "riemann-zeta", "quadratic-char:Q", "delta-weight-12",
    /// "cusp-weight:K", "sym2-of:<gl2 generator>".
    pub fn from_descriptor(desc: &str) -> Result<Self> {
        let desc = desc.trim();
        let (head, arg) = match desc.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (desc, None),
        };
        let need_int = |a: Option<&str>| -> Result<i64> {
            a.ok_or_else(|| Error::Config(format!("{desc}: missing parameter")))?
                .parse::<i64>()
                .map_err(|_| Error::Config(format!("{desc}: bad integer parameter")))
        };
        match head {
            "riemann-zeta" | "zeta" => Ok(Self::riemann_zeta()),
            "quadratic-char" => Self::quadratic_char(need_int(arg)?),
            "delta-weight-12" | "delta" => Ok(Self::delta()),
            "cusp-weight" => Self::cusp_form(need_int(arg)? as u32),
            "sym2-of" => {
                let inner = arg.ok_or_else(|| Error::Config("sym2-of needs an inner generator".into()))?;
                let inner = Self::from_descriptor(inner)?;
                match inner.source {
                    CoeffSource::Generator(Generator::CuspWeight(k)) => Self::sym2_cusp(k),
                    _ => Err(Error::Config("sym2-of needs a level-one GL(2) generator".into())),
                }
            }
            _ => Err(Error::Config(format!("unknown generator {desc:?}"))),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// c(0..=cutoff), computed once and shared.
    pub fn coeffs(&self, cutoff: usize) -> Result<Arc<Vec<Complex64>>> {
        if let Some(v) = self.cache.data.read().expect("cache lock").as_ref() {
            if v.len() > cutoff {
                return Ok(v.clone());
            }
        }
        let mut guard = self.cache.data.write().expect("cache lock");
        if let Some(v) = guard.as_ref() {
            if v.len() > cutoff {
                return Ok(v.clone());
            }
        }
        let old = guard.as_ref().map_or(0, |v| v.len());
        let target = match self.source {
            CoeffSource::Generator(_) => cutoff.max(2 * old).max(64),
            _ => cutoff,
        };
        let v = Arc::new(coeffs::coeffs(&self.source, target)?);
        if v[1] != real(1.0) {
            return Err(Error::Config(format!("{}: c(1) must be 1", self.name)));
        }
        *guard = Some(v.clone());
        Ok(v)
    }

    pub fn kappas_for(&self, d: &FundamentalDiscriminant) -> &[Complex64] {
        if d.d() > 0 {
            &self.kappas
        } else {
            &self.kappas_odd
        }
    }

    pub fn is_gl1_quadratic(&self) -> Option<i64> {
        match self.source {
            CoeffSource::Generator(Generator::RiemannZeta) => Some(1),
            CoeffSource::Generator(Generator::QuadraticChar(q)) => Some(q),
            _ => None,
        }
    }

    /// The twist π⊗χ_d as a standalone L-series.
    pub fn twist(&self, d: &FundamentalDiscriminant) -> Result<Twist> {
        if let Some(q) = self.is_gl1_quadratic() {
            // χ_q·χ_d agrees with a single primitive character away from the
            // common primes; ramified shared primes simply drop out.
            let m = squarefree_kernel(q * d.d());
            if m == 1 {
                let z = Self::riemann_zeta();
                return Ok(Twist::new(z, None, vec![real(0.0)], 1, Some(real(1.0)), true));
            }
            let disc = FundamentalDiscriminant::from_squarefree(m)?;
            let prim = Self::quadratic_char(disc.d())?;
            let kap = prim.kappas.clone();
            return Ok(Twist::new(prim, None, kap, disc.conductor() as u128, Some(real(1.0)), false));
        }
        let conductor = self.twisted_conductor(d)?;
        let eps = self.twist_epsilon(d);
        let kap = self.kappas_for(d).to_vec();
        Ok(Twist::new(self.clone(), Some(*d), kap, conductor, eps, false))
    }

    pub fn twisted_conductor(&self, d: &FundamentalDiscriminant) -> Result<u128> {
        conductor::twisted_conductor_raw(self.degree as u32, self.level, &self.local, d)
    }

    /// Root number of π⊗χ_d when a closed rule applies.
    pub fn twist_epsilon(&self, d: &FundamentalDiscriminant) -> Option<Complex64> {
        if d.is_trivial() {
            return self.epsilon;
        }
        match self.twist_root {
            TwistRootRule::One => Some(real(1.0)),
            TwistRootRule::SignOfD => self.epsilon.map(|e| e * d.d().signum() as f64),
            TwistRootRule::Estimate => None,
        }
    }
}

fn squarefree_kernel(m: i64) -> i64 {
    let (m0, _) = arith::squarefree_decompose(m.unsigned_abs()).expect("nonzero");
    m0 as i64 * m.signum()
}

/// π⊗χ_d packaged for evaluation.
#[derive(Debug, Clone)]
pub struct Twist {
    pub base: LSeriesSpec,
    /// Character multiplied into the base coefficients, if any.
    pub chi: Option<FundamentalDiscriminant>,
    pub kappas: Vec<Complex64>,
    pub conductor: u128,
    pub epsilon: Option<Complex64>,
    /// Poles of Λ as (location, residue).
    pub poles: Vec<(Complex64, Complex64)>,
}

impl Twist {
    fn new(
        base: LSeriesSpec,
        chi: Option<FundamentalDiscriminant>,
        kappas: Vec<Complex64>,
        conductor: u128,
        epsilon: Option<Complex64>,
        keep_poles: bool,
    ) -> Self {
        let poles = if keep_poles || chi.is_none_or(|c| c.is_trivial()) {
            base.poles.clone()
        } else {
            vec![]
        };
        Self {
            base,
            chi,
            kappas,
            conductor,
            epsilon,
            poles,
        }
    }

    /// The untwisted series as a Twist (d = 1).
    pub fn untwisted(spec: &LSeriesSpec) -> Result<Self> {
        spec.twist(&FundamentalDiscriminant::new(1)?)
    }

    pub fn degree(&self) -> usize {
        self.kappas.len()
    }

    pub fn selfdual(&self) -> bool {
        self.base.selfdual
    }

    pub fn dual_kappas(&self) -> Vec<Complex64> {
        self.kappas.iter().map(|k| k.conj()).collect()
    }

    /// Twisted coefficients c(n)χ_d(n) for n ≤ cutoff.
    pub fn coeffs(&self, cutoff: usize) -> Result<Vec<Complex64>> {
        let base = self.base.coeffs(cutoff)?;
        let mut out = base[..=cutoff].to_vec();
        if let Some(chi) = self.chi {
            if !chi.is_trivial() {
                for (n, c) in out.iter_mut().enumerate().skip(1) {
                    *c *= chi.chi(n as i64) as f64;
                }
            }
        }
        Ok(out)
    }

    /// 𝔮 of the twist.
    pub fn archimedean_conductor(&self) -> f64 {
        self.kappas.iter().map(|k| 3.0 + k.norm()).product()
    }
}

/// G(s) = π^{−rs/2} Π Γ((s+κ_j)/2) for the given shifts.
pub fn gamma_factor_kappas(s: Complex64, kappas: &[Complex64]) -> Result<Complex64> {
    Ok(ln_gamma_factor(s, kappas)?.exp())
}

/// log G(s); pole proximity below 1e−12 is an error.
pub fn ln_gamma_factor(s: Complex64, kappas: &[Complex64]) -> Result<Complex64> {
    let r = kappas.len() as f64;
    let mut acc = -r * s * PI.ln() / 2.0;
    for k in kappas {
        let z = (s + k) / 2.0;
        if gamma_pole_distance(z) < 1e-12 {
            return Err(Error::Domain(format!("Γ pole at argument {z} (s = {s})")));
        }
        acc += ln_gamma(z);
    }
    Ok(acc)
}

pub fn gamma_factor(s: Complex64, spec: &LSeriesSpec) -> Result<Complex64> {
    gamma_factor_kappas(s, &spec.kappas)
}

/// 𝔮 = Π (3 + |κ_j|).
pub fn archimedean_conductor(spec: &LSeriesSpec) -> f64 {
    spec.kappas.iter().map(|k| 3.0 + k.norm()).product()
}

pub fn twisted_conductor(spec: &LSeriesSpec, d: &FundamentalDiscriminant) -> Result<u128> {
    spec.twisted_conductor(d)
}

/// Bound on Σ_{n>m} d_r(n) n^{−σ} for σ > 1.
fn dirichlet_tail_bound(r: usize, sigma: f64, m: usize) -> f64 {
    let m = m as f64;
    let lg = m.ln();
    let mut fact = 1.0;
    let mut term = 0.0;
    // ∫_m^∞ (log x)^{r−1}/(r−1)! x^{−σ} dx, bounded termwise.
    for j in 0..r {
        if j > 0 {
            fact *= j as f64;
        }
        term += lg.powi(j as i32) / fact / (sigma - 1.0).powi((r - j) as i32);
    }
    term * m.powf(1.0 - sigma)
}

/// Λ(s, π) = N^{s/2} G(s) L(s, π). Uses the truncated Dirichlet series when
/// Re s > 1 and the smoothed two-sided sum otherwise.
pub fn completed_l(s: Complex64, spec: &LSeriesSpec, cutoff: usize) -> Result<Complex64> {
    let gamma = gamma_factor(s, spec)?;
    let npow = Complex64::from(spec.level as f64).powc(s / 2.0);
    if s.re > 1.0 {
        let bound = dirichlet_tail_bound(spec.degree, s.re, cutoff);
        if bound > 1e-10 {
            return Err(Error::Numeric(format!(
                "cutoff {cutoff} leaves a tail bound of {bound:.2e} at Re s = {}",
                s.re
            )));
        }
        let c = spec.coeffs(cutoff)?;
        let sum: Complex64 = (1..=cutoff)
            .map(|n| c[n] * Complex64::from(n as f64).powc(-s))
            .sum();
        return Ok(npow * gamma * sum);
    }
    let tw = Twist::untwisted(spec)?;
    let eval = crate::central::Smoothed::new(&tw, crate::central::AfeParams::default())?;
    eval.lambda(s)
}
