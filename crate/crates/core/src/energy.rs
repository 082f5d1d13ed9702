//! Line energy, its point-plane reformulation, the Cauchy-Schwarz bridge, and
//! sum-product style set computations.

use std::collections::{BTreeSet, HashMap};

use num::BigInt;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{PrimeModulus, Scalar};
use crate::incidence::{count_incidences, ll_condition, Condition, Engine, LlConstant, PlaneInstance3D};
use crate::plane::{AffineLine, AffinePoint, Instance};

/// `E = sum of mult(v)^2` over the values `v = x s + t`, `x` in `A`,
/// `y = s x + t` in `L`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EnergyCount {
    pub value: u64,
    /// `(v, mult(v))`, increasing in `v`.
    pub multiplicities: Vec<(u32, u64)>,
}

fn dedup_scalars(a: &[Scalar]) -> Vec<Scalar> {
    a.iter().copied().collect::<BTreeSet<_>>().into_iter().collect()
}

/// `(slope, intercept)` pairs of a vertical-free line set, deduplicated.
fn dual_points(lines: &[AffineLine]) -> Result<Vec<(Scalar, Scalar)>> {
    let mut out = lines
        .iter()
        .map(|l| match *l {
            AffineLine::NonVertical { slope, intercept } => Ok((slope, intercept)),
            AffineLine::Vertical { .. } => Err(Error::VerticalLinePresent),
        })
        .collect::<Result<Vec<_>>>()?;
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

fn common_modulus(a: &[Scalar], lines: &[(Scalar, Scalar)]) -> Result<Option<PrimeModulus>> {
    let m = a.first().map(|s| s.modulus()).or(lines.first().map(|l| l.0.modulus()));
    if let Some(m) = m {
        if a.iter().any(|s| s.modulus() != m) || lines.iter().any(|l| l.0.modulus() != m) {
            return Err(Error::ModulusMismatch);
        }
    }
    Ok(m)
}

pub fn line_energy(a: &[Scalar], lines: &[AffineLine]) -> Result<EnergyCount> {
    let duals = dual_points(lines)?;
    let a = dedup_scalars(a);
    common_modulus(&a, &duals)?;
    let mut mult: HashMap<u32, u64> = HashMap::new();
    for &x in &a {
        for &(s, t) in &duals {
            *mult.entry((x * s + t).value()).or_default() += 1;
        }
    }
    let mut multiplicities: Vec<(u32, u64)> = mult.into_iter().collect();
    multiplicities.sort_unstable();
    Ok(EnergyCount {
        value: multiplicities.iter().map(|&(_, c)| c * c).sum(),
        multiplicities,
    })
}

/// Points `R = {(x, s', t')}` and, for each `(x', s, t)`, the plane
/// `s X - x' S' - T' + t = 0`. A point lies on a plane exactly when
/// `x s + t = x' s' + t'`, so the incidence count equals the line energy.
pub fn energy_reduction(a: &[Scalar], lines: &[AffineLine]) -> Result<PlaneInstance3D> {
    let duals = dual_points(lines)?;
    let a = dedup_scalars(a);
    let m = match common_modulus(&a, &duals)? {
        Some(m) => m,
        None => return Err(Error::EmptyInput),
    };
    let points: Vec<[u32; 3]> = a
        .iter()
        .flat_map(|x| duals.iter().map(move |(s, t)| [x.value(), s.value(), t.value()]))
        .collect();
    let planes: Vec<[u32; 4]> = a
        .iter()
        .flat_map(|x| {
            duals
                .iter()
                .map(move |(s, t)| [s.value(), m.neg(x.value()), m.neg(1), t.value()])
        })
        .collect();
    PlaneInstance3D::new(m, points, planes)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CsBridge {
    /// `I(A x B, L)`.
    pub incidences: u64,
    pub b: u64,
    pub energy: u64,
    /// `I^2`.
    pub lhs: u128,
    /// `|B| E`.
    pub rhs: u128,
    pub holds: bool,
}

/// Checks `I(A x B, L)^2 <= |B| E`.
pub fn cs_bridge_check(a: &[Scalar], b: &[Scalar], lines: &[AffineLine]) -> Result<CsBridge> {
    let energy = line_energy(a, lines)?.value;
    let a = dedup_scalars(a);
    let b = dedup_scalars(b);
    let incidences = match a.first().or(b.first()).map(|s| s.modulus()) {
        Some(m) if !a.is_empty() && !b.is_empty() => {
            let points = a.iter().flat_map(|&x| b.iter().map(move |&y| AffinePoint { x, y }));
            count_incidences(&Instance::new(m, points, lines.iter().copied())?, Engine::Auto)
        }
        _ => 0,
    };
    let lhs = incidences as u128 * incidences as u128;
    let rhs = b.len() as u128 * energy as u128;
    Ok(CsBridge {
        incidences,
        b: b.len() as u64,
        energy,
        lhs,
        rhs,
        holds: lhs <= rhs,
    })
}

/// Set expressions over F_p.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ArithExpr {
    /// `A + A`
    SumSet,
    /// `A * A`
    ProductSet,
    /// `A * (A + 1)`
    ShiftedProduct,
    /// `A + B C`
    APlusBC,
    /// `A (B + C)`
    ATimesBPlusC,
    /// `{a^2 + a b}`
    XSquaredPlusXY,
}

impl ArithExpr {
    pub fn label(&self) -> &'static str {
        match self {
            ArithExpr::SumSet => "A+A",
            ArithExpr::ProductSet => "A*A",
            ArithExpr::ShiftedProduct => "A*(A+1)",
            ArithExpr::APlusBC => "A+BC",
            ArithExpr::ATimesBPlusC => "A(B+C)",
            ArithExpr::XSquaredPlusXY => "x^2+xy",
        }
    }
}

fn pairwise(x: &[Scalar], y: &[Scalar], f: impl Fn(Scalar, Scalar) -> Scalar) -> BTreeSet<Scalar> {
    x.iter().flat_map(|&a| y.iter().map(move |&b| (a, b))).map(|(a, b)| f(a, b)).collect()
}

/// The image set of `expr`; `b` and `c` are ignored when not used.
pub fn arithmetic_image(expr: ArithExpr, a: &[Scalar], b: &[Scalar], c: &[Scalar]) -> Result<Vec<Scalar>> {
    let needs_b = matches!(expr, ArithExpr::APlusBC | ArithExpr::ATimesBPlusC | ArithExpr::XSquaredPlusXY);
    let needs_c = matches!(expr, ArithExpr::APlusBC | ArithExpr::ATimesBPlusC);
    if a.is_empty() || (needs_b && b.is_empty()) || (needs_c && c.is_empty()) {
        return Err(Error::EmptyInput);
    }
    let m = a[0].modulus();
    let used = a.iter().chain(if needs_b { b } else { &[] }).chain(if needs_c { c } else { &[] });
    if used.into_iter().any(|s| s.modulus() != m) {
        return Err(Error::ModulusMismatch);
    }
    let (a, b, c) = (dedup_scalars(a), dedup_scalars(b), dedup_scalars(c));
    let out = match expr {
        ArithExpr::SumSet => pairwise(&a, &a, |x, y| x + y),
        ArithExpr::ProductSet => pairwise(&a, &a, |x, y| x * y),
        ArithExpr::ShiftedProduct => pairwise(&a, &a, |x, y| x * (y + m.one())),
        ArithExpr::APlusBC => {
            let bc: Vec<Scalar> = pairwise(&b, &c, |x, y| x * y).into_iter().collect();
            pairwise(&a, &bc, |x, y| x + y)
        }
        ArithExpr::ATimesBPlusC => {
            let bpc: Vec<Scalar> = pairwise(&b, &c, |x, y| x + y).into_iter().collect();
            pairwise(&a, &bpc, |x, y| x * y)
        }
        ArithExpr::XSquaredPlusXY => pairwise(&a, &b, |x, y| x * x + x * y),
    };
    Ok(out.into_iter().collect())
}

/// Which growth statement a report is measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Corollary {
    /// `max(|A+A|, |A*A|)` against `|A|^{6/5}`, assuming `|A| << p^{5/8}`.
    SumProduct,
    /// `|A*(A+1)|` against `|A|^{6/5}`, assuming `|A| << p^{5/8}`.
    ShiftedProduct,
    /// `|A+BC|` and `|A(B+C)|` against `(|A||B||C|)^{1/2}`, assuming
    /// `|A||B||C| << p^2` and no set equal to `{0}`.
    ThreeVariable,
    /// `|f(A,B)|`, `f = x^2 + xy`, against `min(|A|^{1/2}|B|^{3/4}, |B|^2)`,
    /// assuming `|A|^2 |B| << p^2` and `A != {0}`.
    Expander,
}

impl std::str::FromStr for Corollary {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "sum-product" | "sum_product" => Ok(Corollary::SumProduct),
            "shifted-product" | "shifted_product" => Ok(Corollary::ShiftedProduct),
            "three-variable" | "three_variable" => Ok(Corollary::ThreeVariable),
            "expander" => Ok(Corollary::Expander),
            other => Err(format!("unknown family '{other}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SumProdReport {
    pub corollary: Corollary,
    /// `|A|, |B|, |C|` after deduplication (0 when unused).
    pub input_sizes: [u64; 3],
    /// Exact image sizes keyed by expression label.
    pub image_sizes: Vec<(&'static str, u64)>,
    pub m_min: Option<u64>,
    pub m_max: Option<u64>,
    pub main_term: f64,
    /// Each image size divided by the main term.
    pub ratios: Vec<(&'static str, f64)>,
    pub condition: Condition,
    /// Set when the inputs fall under an exclusion of the statement; sizes
    /// are still exact.
    pub excluded: Option<String>,
}

fn is_zero_set(s: &[Scalar]) -> bool {
    !s.is_empty() && s.iter().all(|v| v.is_zero())
}

pub fn sumproduct_report(
    corollary: Corollary,
    a: &[Scalar],
    b: &[Scalar],
    c: &[Scalar],
    constant: &LlConstant,
) -> Result<SumProdReport> {
    if a.is_empty() {
        return Err(Error::EmptyInput);
    }
    let p = a[0].modulus().p64();
    let (a, b, c) = (dedup_scalars(a), dedup_scalars(b), dedup_scalars(c));
    let (na, nb, nc) = (a.len() as u64, b.len() as u64, c.len() as u64);
    let big = |v: u64| BigInt::from(v);
    let mut excluded = None;
    let size = |e: ArithExpr| arithmetic_image(e, &a, &b, &c).map(|s| (e.label(), s.len() as u64));

    let (images, main_term, condition, input_sizes) = match corollary {
        Corollary::SumProduct | Corollary::ShiftedProduct => {
            let images = if corollary == Corollary::SumProduct {
                vec![size(ArithExpr::SumSet)?, size(ArithExpr::ProductSet)?]
            } else {
                vec![size(ArithExpr::ShiftedProduct)?]
            };
            let cond = ll_condition("|A| << p^(5/8)", num::pow(big(na), 8), num::pow(big(p), 5), constant);
            (images, (na as f64).powf(1.2), cond, [na, 0, 0])
        }
        Corollary::ThreeVariable => {
            if b.is_empty() || c.is_empty() {
                return Err(Error::EmptyInput);
            }
            if is_zero_set(&a) || is_zero_set(&b) || is_zero_set(&c) {
                excluded = Some("a set equals {0}".to_string());
            }
            let images = vec![size(ArithExpr::APlusBC)?, size(ArithExpr::ATimesBPlusC)?];
            let cond = ll_condition("|A||B||C| << p^2", big(na) * big(nb) * big(nc), num::pow(big(p), 2), constant);
            (images, ((na * nb * nc) as f64).sqrt(), cond, [na, nb, nc])
        }
        Corollary::Expander => {
            if b.is_empty() {
                return Err(Error::EmptyInput);
            }
            if is_zero_set(&a) {
                return Err(Error::DegenerateInput("A equals {0}".into()));
            }
            let images = vec![size(ArithExpr::XSquaredPlusXY)?];
            let cond = ll_condition("|A|^2|B| << p^2", big(na) * big(na) * big(nb), num::pow(big(p), 2), constant);
            let term = ((na as f64).sqrt() * (nb as f64).powf(0.75)).min((nb * nb) as f64);
            (images, term, cond, [na, nb, 0])
        }
    };
    let (m_min, m_max) = if corollary == Corollary::SumProduct {
        (
            images.iter().map(|x| x.1).min(),
            images.iter().map(|x| x.1).max(),
        )
    } else {
        (None, None)
    };
    let ratios = images.iter().map(|&(l, s)| (l, s as f64 / main_term)).collect();
    Ok(SumProdReport {
        corollary,
        input_sizes,
        image_sizes: images,
        m_min,
        m_max,
        main_term,
        ratios,
        condition,
        excluded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::incidence::count_point_plane;
    use crate::rng::SplitMix64;
    use num::{BigRational, One};

    fn f(p: u64) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    fn set(m: PrimeModulus, v: &[u64]) -> Vec<Scalar> {
        v.iter().map(|&x| m.scalar(x)).collect()
    }

    fn brute_energy(a: &[Scalar], lines: &[AffineLine]) -> u64 {
        let d: Vec<(Scalar, Scalar)> = lines.iter().map(|l| match *l {
            AffineLine::NonVertical { slope, intercept } => (slope, intercept),
            _ => unreachable!(),
        }).collect();
        let mut e = 0;
        for &x in a {
            for &(s, t) in &d {
                for &x2 in a {
                    for &(s2, t2) in &d {
                        e += (x * s + t == x2 * s2 + t2) as u64;
                    }
                }
            }
        }
        e
    }

    #[test]
    fn energy_examples() {
        let m = f(5);
        let lines = [AffineLine::from_ints(m, 0, 0), AffineLine::from_ints(m, 1, 0)];
        let e = line_energy(&set(m, &[0, 1]), &lines).unwrap();
        assert_eq!(e.value, 10);
        assert_eq!(e.multiplicities, vec![(0, 3), (1, 1)]);
        assert_eq!(line_energy(&set(m, &[0]), &lines[..1]).unwrap().value, 1);
        assert_eq!(line_energy(&set(m, &[0, 1, 2]), &lines[1..]).unwrap().value, 3);
        assert_eq!(
            line_energy(&set(m, &[0]), &[AffineLine::vertical(m.scalar(1))]),
            Err(Error::VerticalLinePresent)
        );
    }

    #[test]
    fn reduction_examples() {
        let m = f(5);
        let lines = [AffineLine::from_ints(m, 0, 0), AffineLine::from_ints(m, 1, 0)];
        let r = energy_reduction(&set(m, &[0, 1]), &lines).unwrap();
        assert_eq!((r.r(), r.s()), (4, 4));
        assert_eq!(count_point_plane(&r), 10);
        let r = energy_reduction(&set(m, &[0]), &lines[..1]).unwrap();
        assert_eq!((r.r(), r.s(), count_point_plane(&r)), (1, 1, 1));
    }

    #[test]
    fn energy_matches_oracles_on_random_inputs() {
        let mut rng = SplitMix64::new(77);
        for _ in 0..60 {
            let m = f([5u64, 7, 11, 13][rng.below(4) as usize]);
            let p = m.p64();
            let a: Vec<Scalar> = (0..1 + rng.below(6)).map(|_| m.scalar(rng.below(p))).collect();
            let lines: Vec<AffineLine> = (0..1 + rng.below(8))
                .map(|_| AffineLine::from_ints(m, rng.below(p) as i64, rng.below(p) as i64))
                .collect();
            let e = line_energy(&a, &lines).unwrap();
            let (ua, ul) = (dedup_scalars(&a), {
                let mut l = lines.clone();
                l.sort_unstable();
                l.dedup();
                l
            });
            assert_eq!(e.value, brute_energy(&ua, &ul));
            assert!(e.value >= (ua.len() * ul.len()) as u64);
            let red = energy_reduction(&a, &lines).unwrap();
            assert_eq!(count_point_plane(&red), e.value);
            let b: Vec<Scalar> = (0..rng.below(6)).map(|_| m.scalar(rng.below(p))).collect();
            assert!(cs_bridge_check(&a, &b, &lines).unwrap().holds);
        }
    }

    #[test]
    fn cs_bridge_examples() {
        let m = f(5);
        let lines = [AffineLine::from_ints(m, 0, 0), AffineLine::from_ints(m, 1, 0)];
        let r = cs_bridge_check(&set(m, &[0, 1]), &set(m, &[0, 1]), &lines).unwrap();
        assert_eq!((r.incidences, r.lhs, r.rhs, r.holds), (4, 16, 20, true));
        let r = cs_bridge_check(&set(m, &[0, 1]), &[], &lines).unwrap();
        assert_eq!((r.incidences, r.holds), (0, true));
    }

    #[test]
    fn image_examples() {
        let m = f(7);
        let a = set(m, &[1, 2]);
        assert_eq!(arithmetic_image(ArithExpr::SumSet, &a, &[], &[]).unwrap(), set(m, &[2, 3, 4]));
        assert_eq!(arithmetic_image(ArithExpr::ProductSet, &a, &[], &[]).unwrap(), set(m, &[1, 2, 4]));
        assert_eq!(arithmetic_image(ArithExpr::ShiftedProduct, &a, &[], &[]).unwrap(), set(m, &[2, 3, 4, 6]));
        assert_eq!(
            arithmetic_image(ArithExpr::XSquaredPlusXY, &a, &set(m, &[0, 1]), &[]).unwrap(),
            set(m, &[1, 2, 4, 6])
        );
        assert_eq!(
            arithmetic_image(ArithExpr::APlusBC, &set(m, &[0]), &set(m, &[1]), &set(m, &[1, 2])).unwrap(),
            set(m, &[1, 2])
        );
        assert_eq!(arithmetic_image(ArithExpr::SumSet, &[], &[], &[]), Err(Error::EmptyInput));
    }

    #[test]
    fn progressions() {
        let m = f(101);
        let ap = set(m, &[3, 7, 11, 15, 19]);
        assert_eq!(arithmetic_image(ArithExpr::SumSet, &ap, &[], &[]).unwrap().len(), 9);
        let gp = set(m, &[1, 2, 4, 8, 16]);
        assert_eq!(arithmetic_image(ArithExpr::ProductSet, &gp, &[], &[]).unwrap().len(), 9);
    }

    #[test]
    fn report_examples() {
        let m = f(31);
        let one = BigRational::one();
        let r = sumproduct_report(Corollary::SumProduct, &set(m, &[1, 2, 4]), &[], &[], &one).unwrap();
        assert_eq!(r.image_sizes, vec![("A+A", 6), ("A*A", 5)]);
        assert_eq!((r.m_min, r.m_max), (Some(5), Some(6)));
        assert!(r.condition.pass);

        let m7 = f(7);
        let r = sumproduct_report(Corollary::ThreeVariable, &set(m7, &[0]), &set(m7, &[1]), &set(m7, &[1, 2]), &one).unwrap();
        assert_eq!(r.image_sizes[0], ("A+BC", 2));
        assert!(r.excluded.is_some());
        let r = sumproduct_report(Corollary::ThreeVariable, &set(m7, &[0, 1]), &set(m7, &[1]), &set(m7, &[1, 2]), &one).unwrap();
        assert_eq!(r.image_sizes[0], ("A+BC", 3));
        assert!(r.excluded.is_none());
        assert_eq!(
            sumproduct_report(Corollary::Expander, &set(m7, &[0]), &set(m7, &[1, 2]), &[], &one).unwrap_err(),
            Error::DegenerateInput("A equals {0}".into())
        );
    }
}
