//! Points, canonical lines and instances in the affine plane F_p^2.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::{PrimeModulus, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffinePoint {
    pub x: Scalar,
    pub y: Scalar,
}

impl AffinePoint {
    pub fn new(x: Scalar, y: Scalar) -> Result<Self> {
        if x.modulus() != y.modulus() {
            return Err(Error::ModulusMismatch);
        }
        Ok(AffinePoint { x, y })
    }

    /// Build from integer coordinates, reducing them mod p.
    pub fn from_ints(modulus: PrimeModulus, x: i64, y: i64) -> Self {
        AffinePoint {
            x: modulus.scalar_i64(x),
            y: modulus.scalar_i64(y),
        }
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.x.modulus()
    }

    pub fn coords(&self) -> (u32, u32) {
        (self.x.value(), self.y.value())
    }

    pub fn translate(&self, dx: Scalar, dy: Scalar) -> AffinePoint {
        AffinePoint {
            x: self.x + dx,
            y: self.y + dy,
        }
    }
}

impl fmt::Display for AffinePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Serialize for AffinePoint {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        [self.x.value(), self.y.value()].serialize(serializer)
    }
}

/// A line in canonical form. Variant order gives the tie-breaking order
/// `(is_vertical, slope, intercept)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind")]
pub enum AffineLine {
    /// `y = slope * x + intercept`
    #[serde(rename = "sl")]
    NonVertical {
        #[serde(rename = "s")]
        slope: Scalar,
        #[serde(rename = "t")]
        intercept: Scalar,
    },
    /// `x = x0`
    #[serde(rename = "v")]
    Vertical {
        #[serde(rename = "x")]
        x: Scalar,
    },
}

impl AffineLine {
    pub fn non_vertical(slope: Scalar, intercept: Scalar) -> Result<Self> {
        if slope.modulus() != intercept.modulus() {
            return Err(Error::ModulusMismatch);
        }
        Ok(AffineLine::NonVertical { slope, intercept })
    }

    pub fn vertical(x: Scalar) -> Self {
        AffineLine::Vertical { x }
    }

    pub fn from_ints(modulus: PrimeModulus, slope: i64, intercept: i64) -> Self {
        AffineLine::NonVertical {
            slope: modulus.scalar_i64(slope),
            intercept: modulus.scalar_i64(intercept),
        }
    }

    pub fn modulus(&self) -> PrimeModulus {
        match self {
            AffineLine::NonVertical { slope, .. } => slope.modulus(),
            AffineLine::Vertical { x } => x.modulus(),
        }
    }

    pub fn is_vertical(&self) -> bool {
        matches!(self, AffineLine::Vertical { .. })
    }

    pub fn slope(&self) -> Option<Scalar> {
        match self {
            AffineLine::NonVertical { slope, .. } => Some(*slope),
            AffineLine::Vertical { .. } => None,
        }
    }

    pub fn contains(&self, q: &AffinePoint) -> Result<bool> {
        if self.modulus() != q.modulus() {
            return Err(Error::ModulusMismatch);
        }
        Ok(self.contains_unchecked(q))
    }

    #[inline]
    pub(crate) fn contains_unchecked(&self, q: &AffinePoint) -> bool {
        match *self {
            AffineLine::NonVertical { slope, intercept } => q.y == slope * q.x + intercept,
            AffineLine::Vertical { x } => q.x == x,
        }
    }

    /// Homogeneous coefficients `(u, v, w)` with `u x + v y + w = 0`.
    pub fn homogeneous(&self) -> [u32; 3] {
        let m = self.modulus();
        match *self {
            AffineLine::NonVertical { slope, intercept } => {
                [slope.value(), m.neg(1), intercept.value()]
            }
            AffineLine::Vertical { x } => [1, 0, m.neg(x.value())],
        }
    }

    /// Inverse of [`AffineLine::homogeneous`]; `None` for the line at infinity.
    pub fn from_homogeneous(m: PrimeModulus, [u, v, w]: [u32; 3]) -> Option<Self> {
        if v != 0 {
            let nv = m.inv(m.neg(v)).ok()?;
            Some(AffineLine::NonVertical {
                slope: m.scalar(m.mul(u, nv) as u64),
                intercept: m.scalar(m.mul(w, nv) as u64),
            })
        } else if u != 0 {
            let iu = m.inv(u).ok()?;
            Some(AffineLine::Vertical {
                x: m.scalar(m.neg(m.mul(w, iu)) as u64),
            })
        } else {
            None
        }
    }

    /// All `p` points of the line, ordered by the free coordinate.
    pub fn points(&self) -> impl Iterator<Item = AffinePoint> + '_ {
        let m = self.modulus();
        m.elements().map(move |u| match *self {
            AffineLine::NonVertical { slope, intercept } => AffinePoint {
                x: u,
                y: slope * u + intercept,
            },
            AffineLine::Vertical { x } => AffinePoint { x, y: u },
        })
    }
}

impl fmt::Display for AffineLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AffineLine::NonVertical { slope, intercept } => write!(f, "y = {slope}x + {intercept}"),
            AffineLine::Vertical { x } => write!(f, "x = {x}"),
        }
    }
}

pub fn incident(q: &AffinePoint, line: &AffineLine) -> Result<bool> {
    line.contains(q)
}

/// The unique line through two distinct points.
pub fn line_through(q: &AffinePoint, r: &AffinePoint) -> Result<AffineLine> {
    if q.modulus() != r.modulus() {
        return Err(Error::ModulusMismatch);
    }
    if q == r {
        return Err(Error::CoincidentPoints);
    }
    if q.x == r.x {
        return Ok(AffineLine::Vertical { x: q.x });
    }
    let slope = (r.y - q.y) * (r.x - q.x).inv()?;
    Ok(AffineLine::NonVertical {
        slope,
        intercept: q.y - slope * q.x,
    })
}

/// A deduplicated pair (P, L) over one prime field. Points and lines are kept
/// sorted, so structural equality is set equality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    modulus: PrimeModulus,
    points: Vec<AffinePoint>,
    lines: Vec<AffineLine>,
}

impl Instance {
    pub fn new(
        modulus: PrimeModulus,
        points: impl IntoIterator<Item = AffinePoint>,
        lines: impl IntoIterator<Item = AffineLine>,
    ) -> Result<Self> {
        Self::with_duplicate_count(modulus, points, lines).map(|(inst, _)| inst)
    }

    /// Like [`Instance::new`], also reporting how many duplicates were dropped.
    pub fn with_duplicate_count(
        modulus: PrimeModulus,
        points: impl IntoIterator<Item = AffinePoint>,
        lines: impl IntoIterator<Item = AffineLine>,
    ) -> Result<(Self, usize)> {
        let mut points: Vec<AffinePoint> = points.into_iter().collect();
        let mut lines: Vec<AffineLine> = lines.into_iter().collect();
        if points.iter().any(|q| q.modulus() != modulus)
            || lines.iter().any(|l| l.modulus() != modulus)
        {
            return Err(Error::ModulusMismatch);
        }
        let before = points.len() + lines.len();
        points.sort_unstable();
        points.dedup();
        lines.sort_unstable();
        lines.dedup();
        let dups = before - points.len() - lines.len();
        Ok((
            Instance {
                modulus,
                points,
                lines,
            },
            dups,
        ))
    }

    pub fn empty(modulus: PrimeModulus) -> Self {
        Instance {
            modulus,
            points: Vec::new(),
            lines: Vec::new(),
        }
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    pub fn points(&self) -> &[AffinePoint] {
        &self.points
    }

    pub fn lines(&self) -> &[AffineLine] {
        &self.lines
    }

    pub fn m(&self) -> usize {
        self.points.len()
    }

    pub fn n(&self) -> usize {
        self.lines.len()
    }

    pub fn has_vertical_lines(&self) -> bool {
        self.lines.iter().any(AffineLine::is_vertical)
    }

    pub fn with_points(&self, points: impl IntoIterator<Item = AffinePoint>) -> Result<Instance> {
        Instance::new(self.modulus, points, self.lines.iter().copied())
    }

    pub fn with_lines(&self, lines: impl IntoIterator<Item = AffineLine>) -> Result<Instance> {
        Instance::new(self.modulus, self.points.iter().copied(), lines)
    }

    /// Distinct x-coordinates of the point set, increasing.
    pub fn x_support(&self) -> Vec<Scalar> {
        let s: BTreeSet<Scalar> = self.points.iter().map(|q| q.x).collect();
        s.into_iter().collect()
    }

    pub fn y_support(&self) -> Vec<Scalar> {
        let s: BTreeSet<Scalar> = self.points.iter().map(|q| q.y).collect();
        s.into_iter().collect()
    }

    /// Distinct slopes of the non-vertical lines, increasing.
    pub fn slope_classes(&self) -> Vec<Scalar> {
        let s: BTreeSet<Scalar> = self.lines.iter().filter_map(AffineLine::slope).collect();
        s.into_iter().collect()
    }
}

/// Affine duality exchanging points and non-vertical lines.
///
/// The line `y = c x + d` becomes the point `(c, -d)` and the point `(a, b)`
/// becomes the line `y = a x - b`. Incidence is preserved
/// (`b = c a + d  <=>  -d = a c - b`) and applying the map twice returns the
/// original instance.
pub fn dualize(inst: &Instance) -> Result<Instance> {
    if inst.has_vertical_lines() {
        return Err(Error::VerticalLinePresent);
    }
    let points = inst.lines().iter().map(|l| match *l {
        AffineLine::NonVertical { slope, intercept } => AffinePoint {
            x: slope,
            y: -intercept,
        },
        AffineLine::Vertical { .. } => unreachable!("checked above"),
    });
    let lines = inst.points().iter().map(|q| AffineLine::NonVertical {
        slope: q.x,
        intercept: -q.y,
    });
    Instance::new(inst.modulus(), points, lines)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::incidence::{count_incidences, Engine};

    fn f(p: u64) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    #[test]
    fn incidence_examples() {
        let m5 = f(5);
        let m7 = f(7);
        assert!(incident(&AffinePoint::from_ints(m5, 1, 3), &AffineLine::from_ints(m5, 2, 1)).unwrap());
        assert!(!incident(&AffinePoint::from_ints(m7, 0, 0), &AffineLine::from_ints(m7, 1, 1)).unwrap());
        assert!(incident(&AffinePoint::from_ints(m7, 2, 5), &AffineLine::vertical(m7.scalar(2))).unwrap());
        assert_eq!(
            incident(&AffinePoint::from_ints(m5, 0, 0), &AffineLine::from_ints(m7, 0, 0)),
            Err(Error::ModulusMismatch)
        );
    }

    #[test]
    fn line_through_examples() {
        let m5 = f(5);
        let m7 = f(7);
        assert_eq!(
            line_through(&AffinePoint::from_ints(m5, 0, 0), &AffinePoint::from_ints(m5, 1, 2)).unwrap(),
            AffineLine::from_ints(m5, 2, 0)
        );
        assert_eq!(
            line_through(&AffinePoint::from_ints(m7, 3, 1), &AffinePoint::from_ints(m7, 3, 4)).unwrap(),
            AffineLine::vertical(m7.scalar(3))
        );
        let q = AffinePoint::from_ints(m7, 1, 1);
        assert_eq!(line_through(&q, &q), Err(Error::CoincidentPoints));
    }

    #[test]
    fn line_through_contains_both_points_exhaustive() {
        let m = f(7);
        let pts: Vec<_> = (0..7).flat_map(|x| (0..7).map(move |y| AffinePoint::from_ints(m, x, y))).collect();
        for q in &pts {
            for r in &pts {
                if q != r {
                    let l = line_through(q, r).unwrap();
                    assert!(l.contains(q).unwrap() && l.contains(r).unwrap());
                }
            }
        }
    }

    #[test]
    fn homogeneous_round_trip() {
        let m = f(11);
        for l in [AffineLine::from_ints(m, 3, 7), AffineLine::vertical(m.scalar(4)), AffineLine::from_ints(m, 0, 0)] {
            assert_eq!(AffineLine::from_homogeneous(m, l.homogeneous()), Some(l));
            assert_eq!(l.points().count(), 11);
            assert!(l.points().all(|q| l.contains(&q).unwrap()));
        }
        assert_eq!(AffineLine::from_homogeneous(m, [0, 0, 1]), None);
    }

    #[test]
    fn instance_deduplicates_and_sorts() {
        let m = f(7);
        let q = AffinePoint::from_ints(m, 1, 2);
        let (inst, dups) = Instance::with_duplicate_count(
            m,
            [q, q, AffinePoint::from_ints(m, 0, 5)],
            [AffineLine::vertical(m.scalar(1)), AffineLine::from_ints(m, 3, 3)],
        )
        .unwrap();
        assert_eq!(dups, 1);
        assert_eq!(inst.m(), 2);
        assert_eq!(inst.points()[0], AffinePoint::from_ints(m, 0, 5));
        assert!(!inst.lines()[0].is_vertical());
        assert_eq!(
            Instance::new(m, [AffinePoint::from_ints(f(5), 0, 0)], []),
            Err(Error::ModulusMismatch)
        );
    }

    #[test]
    fn dualize_examples() {
        let m = f(7);
        let inst = Instance::new(m, [AffinePoint::from_ints(m, 1, 3)], [AffineLine::from_ints(m, 2, 1)]).unwrap();
        let dual = dualize(&inst).unwrap();
        assert_eq!(dual.points(), &[AffinePoint::from_ints(m, 2, -1)]);
        assert_eq!(dual.lines(), &[AffineLine::from_ints(m, 1, -3)]);
        assert!(dual.lines()[0].contains(&dual.points()[0]).unwrap());
        assert_eq!(dualize(&dual).unwrap(), inst);
        assert_eq!(count_incidences(&dual, Engine::Naive), 1);

        let empty = Instance::empty(m);
        assert_eq!(dualize(&empty).unwrap(), empty);

        let vert = Instance::new(m, [], [AffineLine::vertical(m.scalar(0))]).unwrap();
        assert_eq!(dualize(&vert), Err(Error::VerticalLinePresent));
    }
}
