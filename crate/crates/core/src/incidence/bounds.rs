//! Comparator bounds and exact hypothesis predicates.
//!
//! Every inequality between sizes is decided on exact integers. Relations of
//! the form `X << Y` are read as `X <= c * Y` for an explicit rational `c`.

use num::{BigInt, BigRational, One, Signed};
use serde::Serialize;

use crate::plane::Instance;

/// Explicit constant for `<<`; defaults to 1.
pub type LlConstant = BigRational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// Best known bound for the `(m, n)` regime.
    Table1,
    /// `mn/p + sqrt(p) sqrt(mn)`.
    Vinh,
    /// `min(sqrt(m) n + m, m sqrt(n) + n)`.
    Combinatorial,
}

impl std::str::FromStr for BoundKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "table1" => Ok(BoundKind::Table1),
            "vinh" => Ok(BoundKind::Vinh),
            "combinatorial" | "comb" => Ok(BoundKind::Combinatorial),
            other => Err(format!("unknown bound '{other}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReferenceBound {
    pub regime: &'static str,
    pub value: f64,
}

fn big(v: u64) -> BigInt {
    BigInt::from(v)
}

fn pow(v: u64, e: u32) -> BigInt {
    num::pow(big(v), e as usize)
}

/// Row of the regime table selected by the relative sizes of `m` and `n`.
/// Boundaries are decided exactly: `n^2 < m`, `n^8 < m^7`, `n^7 <= m^8`,
/// `n < m^2`.
pub fn table1_regime(m: u64, n: u64) -> (&'static str, f64) {
    let (mf, nf) = (m as f64, n as f64);
    if pow(n, 2) < big(m) {
        ("n < m^{1/2}", mf)
    } else if pow(n, 8) < pow(m, 7) {
        ("m^{1/2} < n < m^{7/8}", mf.sqrt() * nf)
    } else if pow(n, 7) <= pow(m, 8) {
        ("m^{7/8} < n < m^{8/7}", main_term(m, n))
    } else if big(n) < pow(m, 2) {
        ("m^{8/7} < n < m^2", mf * nf.sqrt())
    } else {
        ("m^2 < n", nf)
    }
}

/// `(mn)^{11/15}`.
pub fn main_term(m: u64, n: u64) -> f64 {
    (m as f64 * n as f64).powf(11.0 / 15.0)
}

pub fn reference_bound(m: u64, n: u64, p: u64, which: BoundKind) -> ReferenceBound {
    let (mf, nf, pf) = (m as f64, n as f64, p as f64);
    match which {
        BoundKind::Table1 => {
            let (regime, value) = table1_regime(m, n);
            ReferenceBound { regime, value }
        }
        BoundKind::Vinh => ReferenceBound {
            regime: "vinh",
            value: mf * nf / pf + pf.sqrt() * (mf * nf).sqrt(),
        },
        BoundKind::Combinatorial => ReferenceBound {
            regime: "combinatorial",
            value: (mf.sqrt() * nf + mf).min(mf * nf.sqrt() + nf),
        },
    }
}

/// `I <= min(sqrt(m) n + m, m sqrt(n) + n)`, decided exactly.
pub fn combinatorial_bound_holds(incidences: u64, m: u64, n: u64) -> bool {
    // I <= sqrt(a) b + a  <=>  I <= a  or  (I - a)^2 <= a b^2
    let side = |a: u64, b: u64| {
        incidences <= a || pow(incidences - a, 2) <= big(a) * pow(b, 2)
    };
    side(m, n) && side(n, m)
}

/// `a^{3/4} b^{1/2} n^{3/4} + n`.
pub fn cartesian_bound(a: u64, b: u64, n: u64) -> f64 {
    let (a, b, n) = (a as f64, b as f64, n as f64);
    a.powf(0.75) * b.sqrt() * n.powf(0.75) + n
}

/// `r^{1/2} s + k s`.
pub fn point_plane_bound(r: u64, s: u64, k: u64) -> f64 {
    let (r, s, k) = (r as f64, s as f64, k as f64);
    r.sqrt() * s + k * s
}

/// Sizes entering one of the three incidence bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "theorem", rename_all = "snake_case")]
pub enum Theorem {
    /// `m` points and `n` lines.
    PointLine { m: u64, n: u64 },
    /// Points `A x B` with `|A| = a`, `|B| = b`, and `n` lines.
    Cartesian { a: u64, b: u64, n: u64 },
    /// `r` points and `s` planes in F_p^3.
    PointPlane { r: u64, s: u64 },
}

impl Theorem {
    pub fn id(&self) -> &'static str {
        match self {
            Theorem::PointLine { .. } => "point_line",
            Theorem::Cartesian { .. } => "cartesian",
            Theorem::PointPlane { .. } => "point_plane",
        }
    }
}

pub type Sizes = Theorem;

pub fn sizes_of(inst: &Instance) -> Sizes {
    Theorem::PointLine {
        m: inst.m() as u64,
        n: inst.n() as u64,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Condition {
    pub name: String,
    /// Exact decimal value of the left side.
    pub left: String,
    /// Exact decimal value of the right side, including the constant.
    pub right: String,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HypothesisReport {
    pub theorem: &'static str,
    pub conditions: Vec<Condition>,
    pub overall: bool,
    /// The constant `c` used for `<<`, as `num/den`.
    pub constant: String,
}

impl HypothesisReport {
    pub fn condition(&self, name: &str) -> Option<&Condition> {
        self.conditions.iter().find(|c| c.name == name)
    }
}

fn strict(name: &str, left: BigInt, right: BigInt) -> Condition {
    Condition {
        name: name.to_string(),
        pass: left < right,
        left: left.to_string(),
        right: right.to_string(),
    }
}

fn at_most(name: &str, left: BigInt, right: BigInt) -> Condition {
    Condition {
        name: name.to_string(),
        pass: left <= right,
        left: left.to_string(),
        right: right.to_string(),
    }
}

/// `left <= c * right`; the right side is reported as `c * right`, exactly
/// when it is an integer and as a fraction otherwise.
pub(crate) fn ll(name: &str, left: BigInt, right: BigInt, c: &LlConstant) -> Condition {
    let scaled = BigRational::from_integer(right) * c;
    Condition {
        name: name.to_string(),
        pass: BigRational::from_integer(left.clone()) <= scaled,
        left: left.to_string(),
        right: if scaled.is_integer() {
            scaled.to_integer().to_string()
        } else {
            scaled.to_string()
        },
    }
}

/// Evaluates each hypothesis of the chosen bound over characteristic `p`.
/// A nonpositive constant is replaced by 1.
pub fn check_hypotheses(theorem: Theorem, p: u64, c: &LlConstant) -> HypothesisReport {
    let c = if c.is_positive() { c.clone() } else { BigRational::one() };
    let conditions = match theorem {
        Theorem::PointLine { m, n } => vec![
            strict("m^(7/8) < n", pow(m, 7), pow(n, 8)),
            strict("n < m^(8/7)", pow(n, 7), pow(m, 8)),
            ll("m^-2 n^13 << p^15", pow(n, 13), pow(p, 15) * pow(m, 2), &c),
        ],
        Theorem::Cartesian { a, b, n } => vec![
            at_most("a <= b", big(a), big(b)),
            at_most("a b^2 <= n^3", big(a) * pow(b, 2), pow(n, 3)),
            ll("a n << p^2", big(a) * big(n), pow(p, 2), &c),
        ],
        Theorem::PointPlane { r, s } => vec![
            at_most("r <= s", big(r), big(s)),
            ll("r << p^2", big(r), pow(p, 2), &c),
        ],
    };
    HypothesisReport {
        theorem: theorem.id(),
        overall: conditions.iter().all(|c| c.pass),
        conditions,
        constant: c.to_string(),
    }
}

/// Four significant digits, for reporting comparator values.
pub fn sig4(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    let digits = 3 - v.abs().log10().floor() as i32;
    let scale = 10f64.powi(digits);
    (v * scale).round() / scale
}
