//! The group generated by the two functional equations of Z(s, w), tracked
//! symbolically over exact rationals together with the power of the level
//! each step contributes.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;
use std::fmt;

use crate::error::{Error, Result};

pub type Q = BigRational;

fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// c_s·s + c_w·w + c_0.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Form {
    pub s: Q,
    pub w: Q,
    pub c: Q,
}

impl Form {
    pub fn new(s: Q, w: Q, c: Q) -> Self {
        Self { s, w, c }
    }
    pub fn zero() -> Self {
        Self::new(Q::zero(), Q::zero(), Q::zero())
    }
    pub fn var_s() -> Self {
        Self::new(Q::one(), Q::zero(), Q::zero())
    }
    pub fn var_w() -> Self {
        Self::new(Q::zero(), Q::one(), Q::zero())
    }
    pub fn constant(c: Q) -> Self {
        Self::new(Q::zero(), Q::zero(), c)
    }
    fn add(&self, o: &Form) -> Form {
        Form::new(&self.s + &o.s, &self.w + &o.w, &self.c + &o.c)
    }
    fn scale(&self, k: &Q) -> Form {
        Form::new(&self.s * k, &self.w * k, &self.c * k)
    }
    /// This form with s and w replaced by the given forms.
    pub fn substitute(&self, s: &Form, w: &Form) -> Form {
        s.scale(&self.s).add(&w.scale(&self.w)).add(&Form::constant(self.c.clone()))
    }
    pub fn is_zero(&self) -> bool {
        self.s.is_zero() && self.w.is_zero() && self.c.is_zero()
    }
}

fn fmt_coef(f: &mut fmt::Formatter<'_>, first: &mut bool, k: &Q, var: &str) -> fmt::Result {
    if k.is_zero() {
        return Ok(());
    }
    let neg = k.is_negative();
    let a = k.abs();
    if *first {
        if neg {
            write!(f, "-")?;
        }
    } else {
        write!(f, " {} ", if neg { "-" } else { "+" })?;
    }
    *first = false;
    if var.is_empty() {
        write!(f, "{a}")
    } else if a.is_one() {
        write!(f, "{var}")
    } else {
        write!(f, "{a}{var}")
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        fmt_coef(f, &mut first, &self.c, "")?;
        fmt_coef(f, &mut first, &self.s, "s")?;
        fmt_coef(f, &mut first, &self.w, "w")?;
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Move {
    Alpha,
    Beta,
}

impl Move {
    pub fn letter(self) -> char {
        match self {
            Move::Alpha => 'α',
            Move::Beta => 'β',
        }
    }
}

/// Opaque bookkeeping attached to a step; no values are claimed for them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Marker {
    /// The w-functional equation passes through ψ of conductor N.
    PsiTwist,
    /// Normalized Gauss sums from twisting by χ_d.
    GaussSum,
    /// A dyadic factor δ_i from the characters mod 8.
    Dyadic(u8),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TrailEntry {
    pub mv: Move,
    pub markers: Vec<Marker>,
}

/// An affine map on (s, w) with the accumulated exponent of N.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineStep {
    /// Image of s.
    pub s: Form,
    /// Image of w.
    pub w: Form,
    pub exponent: Form,
    pub trail: Vec<TrailEntry>,
}

impl AffineStep {
    pub fn identity() -> Self {
        Self {
            s: Form::var_s(),
            w: Form::var_w(),
            exponent: Form::zero(),
            trail: Vec::new(),
        }
    }

    /// Applies `next` after `self`.
    pub fn then(&self, next: &AffineStep) -> AffineStep {
        let exponent = self.exponent.add(&next.exponent.substitute(&self.s, &self.w));
        let mut trail = self.trail.clone();
        trail.extend(next.trail.iter().cloned());
        AffineStep {
            s: next.s.substitute(&self.s, &self.w),
            w: next.w.substitute(&self.s, &self.w),
            exponent,
            trail,
        }
    }

    pub fn same_map(&self, other: &AffineStep) -> bool {
        self.s == other.s && self.w == other.w
    }

    pub fn word(&self) -> String {
        self.trail.iter().map(|t| t.mv.letter()).collect()
    }

    pub fn map_string(&self) -> String {
        format!("({}, {})", self.s, self.w)
    }
}

/// α: (s, w) ↦ (1 − s, w + r(s − 1/2)), contributing N^{1/2 − s}.
pub fn alpha(r: u32) -> AffineStep {
    let rq = q(r as i64, 1);
    AffineStep {
        s: Form::new(q(-1, 1), Q::zero(), Q::one()),
        w: Form::new(rq.clone(), Q::one(), -rq * q(1, 2)),
        exponent: Form::new(q(-1, 1), Q::zero(), q(1, 2)),
        trail: vec![TrailEntry {
            mv: Move::Alpha,
            markers: vec![Marker::GaussSum],
        }],
    }
}

/// β: (s, w) ↦ (s + w − 1/2, 1 − w); level-free unless it acts through ψ,
/// in which case it contributes N^{1/2 − w}.
pub fn beta(through_psi: bool) -> AffineStep {
    let exponent = if through_psi {
        Form::new(Q::zero(), q(-1, 1), q(1, 2))
    } else {
        Form::zero()
    };
    let mut markers = vec![Marker::Dyadic(1)];
    if through_psi {
        markers.push(Marker::PsiTwist);
    }
    AffineStep {
        s: Form::new(Q::one(), Q::one(), q(-1, 2)),
        w: Form::new(Q::zero(), q(-1, 1), Q::one()),
        exponent,
        trail: vec![TrailEntry { mv: Move::Beta, markers }],
    }
}

pub fn compose(steps: &[AffineStep]) -> AffineStep {
    steps.iter().fold(AffineStep::identity(), |acc, st| acc.then(st))
}

/// The word with β steps alternating level-free, ψ-bearing, level-free, ...
pub fn word_step(r: u32, moves: &[Move]) -> AffineStep {
    let mut betas = 0;
    let steps: Vec<AffineStep> = moves
        .iter()
        .map(|m| match m {
            Move::Alpha => alpha(r),
            Move::Beta => {
                betas += 1;
                beta(betas % 2 == 0)
            }
        })
        .collect();
    compose(&steps)
}

pub fn parse_word(text: &str) -> Result<Vec<Move>> {
    text.chars()
        .filter(|c| !c.is_whitespace() && *c != ',')
        .map(|c| match c {
            'a' | 'A' | 'α' => Ok(Move::Alpha),
            'b' | 'B' | 'β' => Ok(Move::Beta),
            _ => Err(Error::Config(format!("word letters must be a/b (α/β), got {c:?}"))),
        })
        .collect()
}

/// (1 − s, 1 − w) or (1 − w, 1 − s).
pub fn is_return(st: &AffineStep) -> bool {
    let one_minus = |v: Form| Form::new(-v.s, -v.w, Q::one());
    let a = one_minus(Form::var_s());
    let b = one_minus(Form::var_w());
    (st.s == a && st.w == b) || (st.s == b && st.w == a)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WalkResult {
    Returned {
        moves: Vec<Move>,
        step: AffineStep,
        /// Composition after each prefix, lengths 1..=len.
        prefixes: Vec<AffineStep>,
    },
    NoReturn {
        depth: usize,
    },
}

/// Shortest nonempty word returning to (1 − s, 1 − w) or (1 − w, 1 − s).
/// Repeated letters cancel, so only alternating words are searched, by
/// length and β-first at each length.
pub fn walk_to_return(r: u32, max_depth: usize) -> WalkResult {
    // queue entries: (moves, running step, β count)
    let mut queue: VecDeque<(Vec<Move>, AffineStep, usize)> = VecDeque::new();
    let start = AffineStep::identity();
    queue.push_back((vec![Move::Beta], start.then(&beta(false)), 1));
    queue.push_back((vec![Move::Alpha], start.then(&alpha(r)), 0));
    while let Some((moves, st, betas)) = queue.pop_front() {
        if is_return(&st) {
            let prefixes = (1..=moves.len()).map(|k| word_step(r, &moves[..k])).collect();
            return WalkResult::Returned { moves, step: st, prefixes };
        }
        if moves.len() >= max_depth {
            continue;
        }
        let (next, nb) = match moves.last() {
            Some(Move::Alpha) => (st.then(&beta(betas % 2 == 1)), betas + 1),
            _ => (st.then(&alpha(r)), betas),
        };
        let mv = if nb > betas { Move::Beta } else { Move::Alpha };
        let mut m2 = moves;
        m2.push(mv);
        queue.push_back((m2, next, nb));
    }
    WalkResult::NoReturn { depth: max_depth }
}

/// The s = 1/2 slice of a step: w ↦ image, and the exponent as a form in w.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfSlice {
    pub s_image: Form,
    pub w_image: Form,
    pub exponent: Form,
    /// θ when the exponent equals θ(1 − 2w).
    pub theta: Option<Q>,
}

pub fn specialize_half(st: &AffineStep) -> HalfSlice {
    let half = Form::constant(q(1, 2));
    let w = Form::var_w();
    let e = st.exponent.substitute(&half, &w);
    let theta = if e.w == -(&e.c * q(2, 1)) && !e.c.is_zero() {
        Some(e.c.clone())
    } else {
        None
    };
    HalfSlice {
        s_image: st.s.substitute(&half, &w),
        w_image: st.w.substitute(&half, &w),
        exponent: e,
        theta,
    }
}

/// One Gamma factor kind with its multiplicity on each side.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GammaKind {
    pub kind: String,
    pub power: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelTag {
    pub name: String,
    /// Exponent as a form in w.
    pub exponent: String,
    /// What the tag equals when ψ is quadratic, if determined.
    pub quadratic_value: Option<String>,
}

/// The completed functional equation of Z(1/2, w) for one degree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeRecord {
    pub r: u32,
    pub gamma: Vec<GammaKind>,
    pub level: Vec<LevelTag>,
    /// Level factor after the quadratic-ψ identifications.
    pub collapsed_level: Option<String>,
    pub poles: Vec<String>,
    pub convexity: String,
    /// θ with N^{θw} ↔ N^{θ(1−w)}, from the closure word.
    pub theta: String,
    pub opaque: Vec<String>,
    pub notes: Vec<String>,
}

fn half_minus_w() -> String {
    Form::new(Q::zero(), q(-1, 1), q(1, 2)).to_string()
}

pub fn funct_eq_record(r: u32, psi_quadratic: bool) -> Result<FeRecord> {
    let g = |kind: &str, power| GammaKind {
        kind: kind.to_string(),
        power,
    };
    let tag = |name: &str, exponent: String, quad: Option<&str>| LevelTag {
        name: name.to_string(),
        exponent,
        quadratic_value: if psi_quadratic { quad.map(str::to_string) } else { None },
    };
    let hw = half_minus_w();
    let (gamma, level, convexity) = match r {
        1 => (
            vec![g("G+", 1), g("G+,pi", 1)],
            vec![tag("N", hw.clone(), None)],
            "N^{1/4 + alpha_1 + eps}".to_string(),
        ),
        2 => (
            vec![g("G+", 2), g("G+,pi", 1)],
            vec![tag("N", hw.clone(), None), tag("N'", hw.clone(), None)],
            "(N N')^{1/4 + alpha_2 + eps}".to_string(),
        ),
        3 => (
            vec![g("G+", 2), g("G+(2w-1/2)", 1), g("G+,pi", 2)],
            vec![
                tag("N", hw.clone(), None),
                tag("N'", hw.clone(), Some("divisor of N")),
                tag("N''", hw.clone(), Some("N")),
                tag("N'''", hw.clone(), Some("1")),
                tag("N''''", Form::new(Q::zero(), q(-1, 1), Q::zero()).to_string(), None),
            ],
            "(N N'^2 N'' N''')^{1/4 + alpha_3 + eps}".to_string(),
        ),
        _ => {
            return Err(Error::Domain(format!(
                "the functional equations close up only for r ≤ 3, got r = {r}"
            )))
        }
    };
    let mut poles = vec!["0".to_string(), "1".to_string()];
    if r == 3 {
        poles.extend(["1/4".to_string(), "3/4".to_string()]);
    }
    let theta = match walk_to_return(r, 50) {
        WalkResult::Returned { step, .. } => specialize_half(&step)
            .theta
            .map(|t| t.to_string())
            .unwrap_or_else(|| "none".into()),
        WalkResult::NoReturn { .. } => "none".into(),
    };
    let collapsed_level = (psi_quadratic && r == 3).then(|| format!("(N^2 N')^{{{hw}}} (N'''')^{{-w}}"));
    let mut opaque = vec![format!("C_{r}")];
    opaque.extend((1..=5).map(|i| format!("delta_{i}")));
    let mut notes = Vec::new();
    if r == 1 {
        notes.push("extra symmetry: the completed series is nearly symmetric under s <-> w".to_string());
    }
    Ok(FeRecord {
        r,
        gamma,
        level,
        collapsed_level,
        poles,
        convexity,
        theta,
        opaque,
        notes,
    })
}

/// One row of a walk report, with all rationals rendered as text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepRow {
    pub r: u32,
    pub len: usize,
    pub word: String,
    pub map: String,
    pub exponent: String,
    pub markers: Vec<Marker>,
}

pub fn step_rows(r: u32, prefixes: &[AffineStep]) -> Vec<StepRow> {
    prefixes
        .iter()
        .map(|st| StepRow {
            r,
            len: st.trail.len(),
            word: st.word(),
            map: st.map_string(),
            exponent: st.exponent.to_string(),
            markers: st.trail.last().map(|t| t.markers.clone()).unwrap_or_default(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn form(s: (i64, i64), w: (i64, i64), c: (i64, i64)) -> Form {
        Form::new(q(s.0, s.1), q(w.0, w.1), q(c.0, c.1))
    }

    #[test]
    fn involutions() {
        for r in 1..=5 {
            let aa = compose(&[alpha(r), alpha(r)]);
            assert!(aa.same_map(&AffineStep::identity()) && aa.exponent.is_zero());
            for psi in [false, true] {
                let bb = compose(&[beta(psi), beta(psi)]);
                assert!(bb.same_map(&AffineStep::identity()) && bb.exponent.is_zero());
            }
        }
    }

    #[test]
    fn alpha_r2_image() {
        let a = alpha(2);
        assert_eq!(a.s, form((-1, 1), (0, 1), (1, 1)));
        assert_eq!(a.w, form((2, 1), (1, 1), (-1, 1)));
    }

    #[test]
    fn closure_words() {
        use Move::*;
        let cases = [
            (1, vec![Beta, Alpha, Beta], ((0, 1), (-1, 1), (1, 1)), ((-1, 1), (0, 1), (1, 1)), ((-2, 1), (-1, 1), (3, 2))),
            (2, vec![Beta, Alpha, Beta, Alpha], ((-1, 1), (0, 1), (1, 1)), ((0, 1), (-1, 1), (1, 1)), ((-4, 1), (-2, 1), (3, 1))),
            (
                3,
                vec![Beta, Alpha, Beta, Alpha, Beta, Alpha],
                ((-1, 1), (0, 1), (1, 1)),
                ((0, 1), (-1, 1), (1, 1)),
                ((-7, 1), (-4, 1), (11, 2)),
            ),
        ];
        for (r, moves, s, w, e) in cases {
            let st = word_step(r, &moves);
            assert_eq!(st.s, form(s.0, s.1, s.2), "r = {r}");
            assert_eq!(st.w, form(w.0, w.1, w.2), "r = {r}");
            assert_eq!(st.exponent, form(e.0, e.1, e.2), "r = {r}");
        }
    }

    #[test]
    fn walker_lengths() {
        for (r, len) in [(1u32, 3usize), (2, 4), (3, 6)] {
            match walk_to_return(r, 50) {
                WalkResult::Returned { moves, prefixes, .. } => {
                    assert_eq!(moves.len(), len);
                    assert_eq!(moves[0], Move::Beta);
                    assert_eq!(prefixes.len(), len);
                }
                other => panic!("r = {r}: {other:?}"),
            }
        }
        assert_eq!(walk_to_return(4, 50), WalkResult::NoReturn { depth: 50 });
    }

    #[test]
    fn r3_chain_prefixes() {
        let WalkResult::Returned { prefixes, .. } = walk_to_return(3, 50) else {
            panic!("no return")
        };
        let want = [
            (2, form((-1, 1), (-1, 1), (3, 2)), form((3, 1), (2, 1), (-2, 1))),
            (3, form((2, 1), (1, 1), (-1, 1)), form((-3, 1), (-2, 1), (3, 1))),
            (4, form((-2, 1), (-1, 1), (2, 1)), form((3, 1), (1, 1), (-3, 2))),
            (5, form((1, 1), (0, 1), (0, 1)), form((-3, 1), (-1, 1), (5, 2))),
        ];
        for (len, s, w) in want {
            assert_eq!(prefixes[len - 1].s, s, "len {len}");
            assert_eq!(prefixes[len - 1].w, w, "len {len}");
        }
    }

    #[test]
    fn theta_values() {
        for (r, t) in [(1u32, q(1, 2)), (2, q(1, 1)), (3, q(2, 1))] {
            let WalkResult::Returned { step, .. } = walk_to_return(r, 50) else {
                panic!()
            };
            assert_eq!(specialize_half(&step).theta, Some(t));
        }
    }

    #[test]
    fn display_forms() {
        assert_eq!(form((-7, 1), (-4, 1), (11, 2)).to_string(), "11/2 - 7s - 4w");
        assert_eq!(Form::zero().to_string(), "0");
        assert_eq!(form((0, 1), (1, 1), (0, 1)).to_string(), "w");
    }

    #[test]
    fn records() {
        let r2 = funct_eq_record(2, false).unwrap();
        assert_eq!(r2.level.len(), 2);
        assert!(r2.level.iter().all(|t| t.exponent == "1/2 - w"));
        assert_eq!(funct_eq_record(1, false).unwrap().poles, vec!["0", "1"]);
        let r3 = funct_eq_record(3, true).unwrap();
        assert_eq!(r3.poles, vec!["0", "1", "1/4", "3/4"]);
        assert_eq!(r3.level[4].exponent, "-w");
        assert_eq!(r3.level[2].quadratic_value.as_deref(), Some("N"));
        assert_eq!(r3.level[3].quadratic_value.as_deref(), Some("1"));
        assert_eq!(r3.theta, "2");
        assert!(funct_eq_record(4, false).is_err());
    }

    #[test]
    fn parse() {
        assert_eq!(parse_word("βαβ").unwrap(), parse_word("bab").unwrap());
        assert!(parse_word("bxb").is_err());
    }
}
