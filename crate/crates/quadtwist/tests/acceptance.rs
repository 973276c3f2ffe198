//! One PASS/FAIL line per acceptance criterion. Runs without the libtest
//! harness so the report is always printed.

mod common;

use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use quadtwist::arith::FundamentalDiscriminant;
use quadtwist::central::{
    self, central_value, central_value_with, fit_exponent, resolved_twist, scan_family, AfeParams, Family,
    ScanOptions, Smoothed,
};
use quadtwist::fewalk::{self, WalkResult};
use quadtwist::lseries::conductor::twisted_conductor_raw;
use quadtwist::lseries::{local_ramified_conductor, LSeriesSpec, LocalKind, LocalRepType};
use quadtwist::mds::{self, residue_estimate, residue_estimate_with, ResidueOptions, Tags, Variant};

use common::oracles::kronecker_oracle;

struct Outcome {
    pass: bool,
    detail: String,
    /// Parts that must hold for the suite to pass; a criterion may fail
    /// overall while these still hold.
    required: bool,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome {
        pass,
        detail,
        required: pass,
    }
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn criterion_1() -> Outcome {
    let mut bad = Vec::new();
    let mut checked = 0;
    for q in [5u64, 13] {
        for p in [3u64, 5, 7, 11, 13] {
            if p == q {
                continue;
            }
            let spec = LSeriesSpec::quadratic_char(q as i64).unwrap();
            let fam = mds::solve_corrections(&spec, p, 1, 1, 2, Variant::Unramified).unwrap();
            let chi = kronecker_oracle(q as i64, p) as f64;
            let want = [c(1.0), c(-chi), c(p as f64)];
            let got = &fam.p_polys[2];
            let closed = mds::correction_poly_prime(q, p).unwrap();
            checked += 1;
            if !fam.exact || got.coeffs != want || closed.coeffs != want || got.fe_defect() != 0.0 {
                bad.push(format!("(q={q}, p={p}): {:?}", got.coeffs));
            }
        }
    }
    outcome(bad.is_empty(), format!("{checked} pairs, failures: {bad:?}"))
}

fn criterion_2() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for (spec, exact) in [
        (LSeriesSpec::riemann_zeta(), true),
        (LSeriesSpec::quadratic_char(5).unwrap(), true),
        (LSeriesSpec::delta(), false),
    ] {
        let mut worst = 0.0f64;
        let mut mism = 0;
        for tags in Tags::all() {
            let rep = mds::interchange_check(&spec, tags, 500, Variant::Unramified).unwrap();
            worst = worst.max(rep.max_discrepancy);
            mism += rep.mismatches_squarefree;
            ok &= rep.exact == exact && rep.mismatches_squarefree == 0;
            ok &= if exact { rep.max_discrepancy == 0.0 } else { rep.max_discrepancy < 1e-12 };
        }
        notes.push(format!("{}: max {worst:.1e}, sqfree mismatches {mism}", spec.name));
    }
    outcome(ok, notes.join("; "))
}

fn criterion_3() -> Outcome {
    let want = [(1u32, 3usize, "3/2 - 2s - w"), (2, 4, "3 - 4s - 2w"), (3, 6, "11/2 - 7s - 4w")];
    let mut notes = Vec::new();
    let mut ok = true;
    for (r, len, exp) in want {
        match fewalk::walk_to_return(r, 50) {
            WalkResult::Returned { moves, step, .. } => {
                let e = step.exponent.to_string();
                ok &= moves.len() == len && e == exp;
                notes.push(format!("r={r}: {} {e}", step.word()));
            }
            WalkResult::NoReturn { .. } => {
                ok = false;
                notes.push(format!("r={r}: no return"));
            }
        }
    }
    let r4 = matches!(fewalk::walk_to_return(4, 50), WalkResult::NoReturn { depth: 50 });
    ok &= r4;
    notes.push(format!("r=4 no return within 50: {r4}"));
    outcome(ok, notes.join("; "))
}

fn criterion_4() -> Outcome {
    let mut got = Vec::new();
    for r in 1..=3 {
        let WalkResult::Returned { step, .. } = fewalk::walk_to_return(r, 50) else {
            return outcome(false, format!("r={r} did not return"));
        };
        got.push(fewalk::specialize_half(&step).theta.map(|t| t.to_string()));
    }
    let want = [Some("1/2".to_string()), Some("1".to_string()), Some("2".to_string())];
    outcome(got == want, format!("theta = {got:?}"))
}

fn criterion_5() -> Outcome {
    // GL(1): every odd prime conductor against every fundamental |d| ≤ 200
    let discs = common::fundamental_discs(200);
    let mut cases = vec![1i64];
    cases.extend(&discs);
    let primes = common::odd_primes_up_to(100);
    let pairs: Vec<(u64, i64)> = primes.iter().flat_map(|&q| cases.iter().map(move |&d| (q, d))).collect();
    let worst = pairs
        .par_iter()
        .map(|&(q, d)| {
            let spec = LSeriesSpec::quadratic_char(q as i64).unwrap();
            let v = central_value(&spec, &FundamentalDiscriminant::new(d).unwrap()).unwrap();
            let qstar = if q % 4 == 1 { q as i64 } else { -(q as i64) };
            let want = common::dirichlet_l(0.5, common::primitive_disc(qstar * d));
            ((v - want).norm(), q, d)
        })
        .reduce(|| (0.0, 0, 0), |a, b| if b.0 > a.0 { b } else { a });
    let gl1_ok = worst.0 < 1e-6;

    // GL(2)/GL(3): doubling the n-cutoff
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let gl2: Vec<LSeriesSpec> = [12u32, 16, 18, 20, 22, 26].iter().map(|&k| LSeriesSpec::cusp_form(k).unwrap()).collect();
    let gl3: Vec<LSeriesSpec> = [12u32, 16].iter().map(|&k| LSeriesSpec::sym2_cusp(k).unwrap()).collect();
    let d2: Vec<i64> = common::fundamental_discs(1000);
    let d3: Vec<i64> = common::fundamental_discs(100);
    let mut random = Vec::new();
    for _ in 0..50 {
        if rng.gen_bool(0.5) {
            random.push((gl2[rng.gen_range(0..gl2.len())].clone(), d2[rng.gen_range(0..d2.len())]));
        } else {
            random.push((gl3[rng.gen_range(0..gl3.len())].clone(), d3[rng.gen_range(0..d3.len())]));
        }
    }
    let doubled = AfeParams {
        cutoff_scale: 2.0,
        ..Default::default()
    };
    let drift = random
        .par_iter()
        .map(|(spec, d)| {
            let fd = FundamentalDiscriminant::new(*d).unwrap();
            assert!(spec.twisted_conductor(&fd).unwrap() <= 1_000_000);
            let a = central_value_with(spec, &fd, AfeParams::default()).unwrap();
            let b = central_value_with(spec, &fd, doubled).unwrap();
            (a - b).norm()
        })
        .reduce(|| 0.0, f64::max);
    let ok = gl1_ok && drift < 1e-8;
    outcome(
        ok,
        format!(
            "{} GL(1) twists, worst {:.1e} at (q={}, d={}); 50 GL(2)/GL(3) cutoff drift {:.1e}",
            pairs.len(),
            worst.0,
            worst.1,
            worst.2,
            drift
        ),
    )
}

fn criterion_6() -> Outcome {
    let one = FundamentalDiscriminant::new(1).unwrap();
    let params = AfeParams::default();
    let mut notes = Vec::new();
    let mut ok = true;
    for spec in [
        LSeriesSpec::riemann_zeta(),
        LSeriesSpec::quadratic_char(5).unwrap(),
        LSeriesSpec::quadratic_char(-4).unwrap(),
        LSeriesSpec::delta(),
    ] {
        let tw = resolved_twist(&spec, &one, params).unwrap();
        let eps = tw.epsilon.expect("root number");
        let ev = Smoothed::new(&tw, params).unwrap();
        let mut worst = 0.0f64;
        for sigma in [0.4, 0.5, 0.6] {
            for t in [-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0] {
                let s = Complex64::new(sigma, t);
                let a = ev.lambda(s).unwrap();
                let b = ev.lambda(1.0 - s).unwrap();
                worst = worst.max((a - eps * b).norm());
            }
        }
        ok &= worst < 1e-6;
        notes.push(format!("{} {worst:.1e}", spec.name));
    }
    outcome(ok, notes.join("; "))
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let discs = common::fundamental_discs(500);
    let gcd = |mut a: u64, mut b: u64| {
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a
    };
    let mut bad = 0;
    let mut tried = 0;
    while tried < 100 {
        let r: u32 = rng.gen_range(1..=3);
        let level: u64 = rng.gen_range(1..=2000);
        let d = discs[rng.gen_range(0..discs.len())];
        let big_d = d.unsigned_abs();
        if gcd(level, big_d) != 1 {
            continue;
        }
        tried += 1;
        let fd = FundamentalDiscriminant::new(d).unwrap();
        let got = twisted_conductor_raw(r, level, &[], &fd).unwrap();
        if got != level as u128 * (big_d as u128).pow(r) {
            bad += 1;
        }
    }
    let at = |p, kind| LocalRepType { prime: p, kind };
    let st = local_ramified_conductor(&at(5, LocalKind::Steinberg { t: 2 }), 2).unwrap();
    let tst = local_ramified_conductor(
        &at(
            7,
            LocalKind::TwistedSteinberg {
                t: 2,
                nu_exponent: 1,
                nu_quadratic: true,
            },
        ),
        1,
    )
    .unwrap();
    let scr = local_ramified_conductor(&at(7, LocalKind::SupercuspidalRamified { j: 2, x: 1, t: 2 }), 3).unwrap();
    let ok = bad == 0 && st == 2 && tst == 1 && scr == 1 + 3;
    outcome(
        ok,
        format!("{bad}/100 unramified mismatches; Steinberg b=2 -> p^{st}, twisted Steinberg -> p^{tst}, ramified supercuspidal x=1 j=2 b=3 -> p^{scr}"),
    )
}

fn criterion_8() -> Outcome {
    let zeta = residue_estimate(&LSeriesSpec::riemann_zeta(), Tags::trivial()).unwrap();
    let chi5 = residue_estimate(&LSeriesSpec::quadratic_char(5).unwrap(), Tags::trivial()).unwrap();
    let zero = residue_estimate_with(&LSeriesSpec::riemann_zeta(), &ResidueOptions::default(), |_| Ok(c(0.0))).unwrap();
    let dichotomy = zeta.nonzero && chi5.nonzero && !zero.nonzero;

    let opts = ResidueOptions {
        xs: vec![50.0, 100.0, 200.0],
        ..Default::default()
    };
    let zspec = LSeriesSpec::riemann_zeta();
    let ratios = residue_estimate_with(&zspec, &opts, |d| central::central_value(&zspec, d)).map(|r| r.ratios);
    let ratios = ratios.unwrap_or_default();
    let mut spread_ok = ratios.len() == 3;
    for i in 0..ratios.len() {
        for j in 0..i {
            let (a, b) = (ratios[i], ratios[j]);
            spread_ok &= (a - b).abs() <= 0.1 * a.abs().max(b.abs());
        }
    }
    Outcome {
        pass: dichotomy && spread_ok,
        detail: format!(
            "zeta order {} leading {:.3} ± {:.3}; chi5 order {} leading {:.3} ± {:.3}; zero family nonzero={}; zeta I(X)/X at 50,100,200 = {:?} (10% agreement: {spread_ok})",
            zeta.order, zeta.leading, zeta.leading_se, chi5.order, chi5.leading, chi5.leading_se, zero.nonzero, ratios
        ),
        required: dichotomy,
    }
}

fn criterion_9() -> Outcome {
    let opts = ScanOptions {
        timing: false,
        ..Default::default()
    };
    let recs = scan_family(&Family::Gl1Primes { nmax: 300 }, &opts);
    let odd: Vec<_> = recs.iter().filter(|r| r.param > 2.0).collect();
    let bad: Vec<f64> = odd
        .iter()
        .filter(|r| !matches!(r.d_min, Some(d) if d.unsigned_abs() as f64 <= r.param))
        .map(|r| r.param)
        .collect();
    let fit = fit_exponent(&recs);
    let ok = bad.is_empty() && matches!(fit, Ok((theta, _)) if theta < 0.5);
    outcome(ok, format!("{} odd primes, failures {bad:?}, fit {fit:?}", odd.len()))
}

fn main() {
    let criteria: [(u32, fn() -> Outcome); 9] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
    ];
    let mut broken = Vec::new();
    for (n, f) in criteria {
        let start = Instant::now();
        let o = f();
        let took: Duration = start.elapsed();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {n}: {tag} ({:.2} s) {}", took.as_secs_f64(), o.detail);
        if !o.required {
            broken.push(n);
        }
    }
    if !broken.is_empty() {
        eprintln!("criteria with failing required parts: {broken:?}");
        std::process::exit(1);
    }
}
