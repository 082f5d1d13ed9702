//! Instance generators.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{PrimeModulus, Scalar};
use crate::plane::{line_through, AffineLine, AffinePoint, Instance};
use crate::rng::SplitMix64;

/// Points `{1..a} x {1..2ac}` and lines `y = s x + t` with `s` in `1..=c`,
/// `t` in `1..=ac`. Each line meets the point set in exactly `a` points, so
/// `m = 2a^2 c`, `n = a c^2` and `I = a^2 c^2`.
pub fn elekes_construction(a: u64, c: u64, p: u64) -> Result<Instance> {
    if a == 0 || c == 0 {
        return Err(Error::InvalidParameter("a and c must be positive".into()));
    }
    let m = PrimeModulus::new(p)?;
    if 2 * a * c >= p {
        return Err(Error::CharacteristicTooSmall { a, c, p });
    }
    let points = (1..=a).flat_map(|i| (1..=2 * a * c).map(move |j| AffinePoint::from_ints(m, i as i64, j as i64)));
    let lines = (1..=c).flat_map(|s| (1..=a * c).map(move |t| AffineLine::from_ints(m, s as i64, t as i64)));
    Instance::new(m, points, lines)
}

/// All `p^2` points and all `p^2 + p` lines.
pub fn full_plane(m: PrimeModulus) -> Instance {
    let points = m.elements().flat_map(|x| m.elements().map(move |y| AffinePoint { x, y }));
    let lines = m
        .elements()
        .flat_map(|s| m.elements().map(move |t| AffineLine::NonVertical { slope: s, intercept: t }))
        .chain(m.elements().map(AffineLine::vertical));
    Instance::new(m, points, lines).expect("single modulus")
}

/// How the lines of a Cartesian instance are chosen.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LineFamily {
    Explicit(Vec<AffineLine>),
    /// Every line through at least two points of `A x B`.
    AllSpanned,
    /// `y = s x + t` for `s` in `1..=c` and `t` in `1..=|A| c`.
    Elekes { c: u64 },
}

/// Points `A x B` with the given lines.
pub fn cartesian_instance(a_set: &[Scalar], b_set: &[Scalar], lines: &LineFamily) -> Result<Instance> {
    let m = a_set
        .first()
        .or(b_set.first())
        .map(|s| s.modulus())
        .ok_or(Error::EmptyInput)?;
    if a_set.is_empty() || b_set.is_empty() {
        return Err(Error::EmptyInput);
    }
    if a_set.iter().chain(b_set).any(|s| s.modulus() != m) {
        return Err(Error::ModulusMismatch);
    }
    let points: Vec<AffinePoint> = a_set
        .iter()
        .flat_map(|&x| b_set.iter().map(move |&y| AffinePoint { x, y }))
        .collect();
    let lines: Vec<AffineLine> = match lines {
        LineFamily::Explicit(ls) => ls.clone(),
        LineFamily::AllSpanned => spanned_lines(&points).into_iter().collect(),
        LineFamily::Elekes { c } => {
            let a = a_set.iter().collect::<BTreeSet<_>>().len() as u64;
            (1..=*c)
                .flat_map(|s| (1..=a * c).map(move |t| AffineLine::from_ints(m, s as i64, t as i64)))
                .collect()
        }
    };
    Instance::new(m, points, lines)
}

fn spanned_lines(points: &[AffinePoint]) -> BTreeSet<AffineLine> {
    let mut out = BTreeSet::new();
    for (i, q) in points.iter().enumerate() {
        for r in &points[i + 1..] {
            if q != r {
                out.insert(line_through(q, r).expect("distinct points"));
            }
        }
    }
    out
}

/// `m` distinct points and `n` distinct lines drawn without replacement.
///
/// Points are drawn first as indices in `[0, p^2)`, index `i` giving
/// `(i / p, i % p)`. Lines are then drawn from `[0, p^2 + p)` on the same
/// stream: `i < p^2` gives `y = (i / p) x + (i % p)`, otherwise `x = i - p^2`.
/// Both draws use Floyd's algorithm on [`SplitMix64`] seeded with `seed`.
pub fn random_instance(m: PrimeModulus, points: u64, lines: u64, seed: u64) -> Result<Instance> {
    let p = m.p64();
    for (requested, available) in [(points, p * p), (lines, p * p + p)] {
        if requested > available {
            return Err(Error::TooManyRequested { requested, available });
        }
    }
    let mut rng = SplitMix64::new(seed);
    let pts = rng
        .sample_distinct(p * p, points)
        .into_iter()
        .map(|i| AffinePoint {
            x: m.scalar(i / p),
            y: m.scalar(i % p),
        })
        .collect::<Vec<_>>();
    let ls = rng
        .sample_distinct(p * p + p, lines)
        .into_iter()
        .map(|i| {
            if i < p * p {
                AffineLine::NonVertical {
                    slope: m.scalar(i / p),
                    intercept: m.scalar(i % p),
                }
            } else {
                AffineLine::vertical(m.scalar(i - p * p))
            }
        })
        .collect::<Vec<_>>();
    Instance::new(m, pts, ls)
}

/// Lines through `vertex` with the given slopes, plus the vertical line when
/// asked. Sorted and deduplicated.
pub fn pencil(vertex: &AffinePoint, slopes: &[Scalar], include_vertical: bool) -> Vec<AffineLine> {
    let mut out: BTreeSet<AffineLine> = slopes
        .iter()
        .map(|&s| AffineLine::NonVertical {
            slope: s,
            intercept: vertex.y - s * vertex.x,
        })
        .collect();
    if include_vertical {
        out.insert(AffineLine::vertical(vertex.x));
    }
    out.into_iter().collect()
}

/// A named instance family with its parameters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum GeneratorSpec {
    Elekes { a: u64, c: u64, p: u64 },
    FullPlane { p: u64 },
    Random { p: u64, m: u64, n: u64, seed: u64 },
}

impl GeneratorSpec {
    pub fn family(&self) -> &'static str {
        match self {
            GeneratorSpec::Elekes { .. } => "elekes",
            GeneratorSpec::FullPlane { .. } => "full_plane",
            GeneratorSpec::Random { .. } => "random",
        }
    }

    pub fn generate(&self) -> Result<Instance> {
        match *self {
            GeneratorSpec::Elekes { a, c, p } => elekes_construction(a, c, p),
            GeneratorSpec::FullPlane { p } => Ok(full_plane(PrimeModulus::new(p)?)),
            GeneratorSpec::Random { p, m, n, seed } => random_instance(PrimeModulus::new(p)?, m, n, seed),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::incidence::{count_incidences, richness_histograms, Engine};

    fn f(p: u64) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    #[test]
    fn elekes_examples() {
        let e = elekes_construction(2, 1, 7).unwrap();
        assert_eq!((e.m(), e.n(), count_incidences(&e, Engine::Naive)), (8, 2, 4));
        let e = elekes_construction(3, 2, 31).unwrap();
        assert_eq!((e.m(), e.n(), count_incidences(&e, Engine::Naive)), (36, 12, 36));
        assert_eq!(
            elekes_construction(2, 2, 7),
            Err(Error::CharacteristicTooSmall { a: 2, c: 2, p: 7 })
        );
    }

    #[test]
    fn elekes_lines_hold_a_points() {
        for a in 1..=8u64 {
            for c in 1..=4u64 {
                let p = crate::field::next_prime(2 * a * c + 1);
                let e = elekes_construction(a, c, p).unwrap();
                assert_eq!(e.m() as u64, 2 * a * a * c);
                assert_eq!(e.n() as u64, a * c * c);
                let h = richness_histograms(&e);
                assert!(h.per_line.iter().all(|&(_, k)| k == a), "a={a} c={c}");
                assert_eq!(h.total, a * a * c * c);
            }
        }
    }

    #[test]
    fn full_plane_sizes() {
        let fp = full_plane(f(3));
        assert_eq!((fp.m(), fp.n()), (9, 12));
        let fp = full_plane(f(5));
        assert_eq!((fp.m(), fp.n()), (25, 30));
        assert!(PrimeModulus::new(2).is_err());
    }

    #[test]
    fn cartesian_examples() {
        let m5 = f(5);
        let ab = [m5.scalar(0), m5.scalar(1)];
        let inst = cartesian_instance(&ab, &ab, &LineFamily::Explicit(vec![AffineLine::from_ints(m5, 1, 0)])).unwrap();
        assert_eq!((inst.m(), inst.n(), count_incidences(&inst, Engine::Naive)), (4, 1, 2));

        let m11 = f(11);
        let a: Vec<Scalar> = (0..5).map(|v| m11.scalar(v)).collect();
        let horizontals = (0..5).map(|t| AffineLine::from_ints(m11, 0, t)).collect();
        let inst = cartesian_instance(&a, &a, &LineFamily::Explicit(horizontals)).unwrap();
        assert_eq!(count_incidences(&inst, Engine::Naive), 25);

        let m7 = f(7);
        let a: Vec<Scalar> = [1, 2].map(|v| m7.scalar(v)).to_vec();
        let b: Vec<Scalar> = (1..=4).map(|v| m7.scalar(v)).collect();
        let inst = cartesian_instance(&a, &b, &LineFamily::Elekes { c: 1 }).unwrap();
        assert_eq!(inst, elekes_construction(2, 1, 7).unwrap());

        let spanned = cartesian_instance(&a, &b, &LineFamily::AllSpanned).unwrap();
        assert!(richness_histograms(&spanned).per_line.iter().all(|&(_, k)| k >= 2));
        assert_eq!(cartesian_instance(&[], &b, &LineFamily::AllSpanned), Err(Error::EmptyInput));
    }

    #[test]
    fn random_examples() {
        let m = f(7);
        let r = random_instance(m, 3, 2, 42).unwrap();
        assert_eq!((r.m(), r.n()), (3, 2));
        assert_eq!(random_instance(m, 3, 2, 42).unwrap(), r);
        assert_eq!(
            random_instance(m, 50, 1, 0),
            Err(Error::TooManyRequested { requested: 50, available: 49 })
        );
        let all = random_instance(m, 49, 56, 1).unwrap();
        assert_eq!(all, full_plane(m));
    }

    #[test]
    fn pencil_examples() {
        let m = f(5);
        let o = AffinePoint::from_ints(m, 0, 0);
        assert_eq!(
            pencil(&o, &[m.scalar(1), m.scalar(2)], false),
            vec![AffineLine::from_ints(m, 1, 0), AffineLine::from_ints(m, 2, 0)]
        );
        let v = AffinePoint::from_ints(m, 3, 4);
        let all: Vec<Scalar> = m.elements().collect();
        let full = pencil(&v, &all, true);
        assert_eq!(full.len(), 6);
        assert!(full.iter().all(|l| l.contains(&v).unwrap()));
        let other = pencil(&o, &all, true);
        let shared = full.iter().filter(|l| other.contains(l)).count();
        assert_eq!(shared, 1);
    }
}
