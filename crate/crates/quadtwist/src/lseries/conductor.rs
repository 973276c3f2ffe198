//! Conductors of twists, unramified and ramified.

use serde::{Deserialize, Serialize};

use crate::arith::{factorize, valuation, FundamentalDiscriminant};
use crate::error::{Error, Result};

/// Local discrete-series data at a prime dividing the level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum LocalKind {
    /// A character of conductor exponent `a` (a GL(1) block).
    Character { a: u32 },
    /// Steinberg on GL(t), t = 2 or 3.
    Steinberg { t: u32 },
    /// St(ν) on GL(t) with ν of conductor exponent `nu_exponent`.
    /// `nu_quadratic` marks ν as quadratic, so a quadratic twist of the
    /// same exponent cancels it.
    TwistedSteinberg { t: u32, nu_exponent: u32, nu_quadratic: bool },
    /// Attached to λ on an unramified degree-t extension; `a` is the
    /// exponent of 𝔠(λ) read over Q_p.
    SupercuspidalUnramified { a: u32, t: u32 },
    /// Attached to λ of 𝔠(λ) = ϖ^j on a ramified degree-t extension with
    /// discriminant p^x.
    SupercuspidalRamified { j: u32, x: u32, t: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalRepType {
    pub prime: u64,
    #[serde(flatten)]
    pub kind: LocalKind,
}

impl LocalKind {
    pub fn degree(&self) -> u32 {
        match *self {
            LocalKind::Character { .. } => 1,
            LocalKind::Steinberg { t }
            | LocalKind::TwistedSteinberg { t, .. }
            | LocalKind::SupercuspidalUnramified { t, .. }
            | LocalKind::SupercuspidalRamified { t, .. } => t,
        }
    }

    /// Conductor exponent of the block itself (untwisted).
    pub fn own_exponent(&self) -> u32 {
        match *self {
            LocalKind::Character { a } => a,
            LocalKind::Steinberg { .. } => 1,
            LocalKind::TwistedSteinberg { nu_exponent, .. } => nu_exponent.max(1),
            LocalKind::SupercuspidalUnramified { a, .. } => a,
            LocalKind::SupercuspidalRamified { j, x, .. } => j + x,
        }
    }
}

/// Conductor exponent of η⊗χ for a block η at p and χ of exponent b.
pub fn local_ramified_conductor(t: &LocalRepType, b: u32) -> Result<u32> {
    let p = t.prime;
    let check_degree = |deg: u32| {
        if deg as u64 >= p {
            Err(Error::Domain(format!(
                "supercuspidal degree {deg} must be below the residue characteristic {p}"
            )))
        } else {
            Ok(())
        }
    };
    Ok(match t.kind {
        // Upper bound; exact unless the two exponents coincide and cancel.
        LocalKind::Character { a } => a.max(b),
        LocalKind::Steinberg { .. } => {
            if b >= 1 {
                b
            } else {
                1
            }
        }
        LocalKind::TwistedSteinberg {
            nu_exponent,
            nu_quadratic,
            ..
        } => {
            let nu_chi = if nu_quadratic && nu_exponent == b {
                0
            } else {
                nu_exponent.max(b)
            };
            nu_chi.max(1)
        }
        LocalKind::SupercuspidalUnramified { a, t } => {
            check_degree(t)?;
            a.max(t * b)
        }
        LocalKind::SupercuspidalRamified { j, x, t } => {
            check_degree(t)?;
            x + j.max(b)
        }
    })
}

/// Conductor of π⊗χ_d for π of degree r and level N.
///
/// Primes of N not dividing d keep their exponent, primes of D not dividing
/// N contribute r·b, and shared primes go through the local blocks listed in
/// `local`; any degree not covered by a block is an unramified character.
pub fn twisted_conductor_raw(
    degree: u32,
    level: u64,
    local: &[LocalRepType],
    d: &FundamentalDiscriminant,
) -> Result<u128> {
    let big_d = d.conductor();
    let mut out: u128 = 1;
    let pow = |p: u64, e: u32| -> u128 { (p as u128).pow(e) };
    for (p, e) in factorize(level) {
        let (b, _) = valuation(big_d, p);
        if b == 0 {
            out *= pow(p, e);
            continue;
        }
        let blocks: Vec<&LocalRepType> = local.iter().filter(|t| t.prime == p).collect();
        if blocks.is_empty() {
            return Err(Error::Domain(format!(
                "ramified data required at p = {p} (level {level}, d = {d})"
            )));
        }
        let covered: u32 = blocks.iter().map(|t| t.kind.degree()).sum();
        if covered > degree {
            return Err(Error::Config(format!(
                "local blocks at p = {p} have total degree {covered} > {degree}"
            )));
        }
        let mut exp = (degree - covered) * b;
        for t in blocks {
            exp += local_ramified_conductor(t, b)?;
        }
        out *= pow(p, exp);
    }
    for (p, b) in factorize(big_d) {
        if !level.is_multiple_of(p) {
            out *= pow(p, degree * b);
        }
    }
    Ok(out)
}
