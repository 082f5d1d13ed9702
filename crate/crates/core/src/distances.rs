//! Squared distances, pinned distance sets, isotropic and bisector lines,
//! isosceles triples, and the lines determined by a point set.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::Scalar;
use crate::incidence::{count_incidences, Engine};
use crate::plane::{line_through, AffineLine, AffinePoint, Instance};

/// `(q_x - r_x)^2 + (q_y - r_y)^2`.
pub fn distance(q: &AffinePoint, r: &AffinePoint) -> Result<Scalar> {
    if q.modulus() != r.modulus() {
        return Err(Error::ModulusMismatch);
    }
    Ok(dist(q, r))
}

fn dist(q: &AffinePoint, r: &AffinePoint) -> Scalar {
    let (dx, dy) = (q.x - r.x, q.y - r.y);
    dx * dx + dy * dy
}

fn sorted_points(points: &[AffinePoint]) -> Vec<AffinePoint> {
    points.iter().copied().collect::<BTreeSet<_>>().into_iter().collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DistanceReport {
    /// All distances, including 0.
    pub all: Vec<Scalar>,
    /// `(q, distances from q)` for every `q`, in point order.
    pub pinned: Vec<(AffinePoint, Vec<Scalar>)>,
    /// A pin with the most distances; the smallest such point.
    pub best_pin: AffinePoint,
    pub max_pinned: usize,
    /// Every distance is 0.
    pub degenerate: bool,
}

pub fn distance_sets(points: &[AffinePoint]) -> Result<DistanceReport> {
    let pts = sorted_points(points);
    if pts.is_empty() {
        return Err(Error::EmptyInput);
    }
    let m = pts[0].modulus();
    if pts.iter().any(|q| q.modulus() != m) {
        return Err(Error::ModulusMismatch);
    }
    let mut all = BTreeSet::new();
    let mut pinned = Vec::with_capacity(pts.len());
    for q in &pts {
        let ds: BTreeSet<Scalar> = pts.iter().map(|r| dist(q, r)).collect();
        all.extend(ds.iter().copied());
        pinned.push((*q, ds.into_iter().collect::<Vec<_>>()));
    }
    let (best_pin, max_pinned) = pinned
        .iter()
        .fold((pts[0], 0), |(bq, bn), (q, ds)| if ds.len() > bn { (*q, ds.len()) } else { (bq, bn) });
    Ok(DistanceReport {
        degenerate: all.len() == 1,
        all: all.into_iter().collect(),
        pinned,
        best_pin,
        max_pinned,
    })
}

/// The two lines through `r` with slopes `i` and `-i`, `i^2 = -1`, the
/// smaller root first. `None` when `p = 3 mod 4`.
pub fn isotropic_lines(r: &AffinePoint) -> Option<(AffineLine, AffineLine)> {
    let m = r.modulus();
    let i = (-m.one()).sqrt()?;
    let through = |s: Scalar| AffineLine::NonVertical {
        slope: s,
        intercept: r.y - s * r.x,
    };
    Some((through(i), through(-i)))
}

/// The perpendicular bisector of `r` and `s`: all `q` with
/// `d(q, r) = d(q, s)`. `None` when `d(r, s) = 0`.
pub fn bisector(r: &AffinePoint, s: &AffinePoint) -> Option<AffineLine> {
    if dist(r, s).is_zero() {
        return None;
    }
    let m = r.modulus();
    let (sx, sy) = (s.x - r.x, s.y - r.y);
    let two = m.scalar(2);
    // 2 s'.(q - r) = |s'|^2 with s' = s - r
    let u = two * sx;
    let v = two * sy;
    let w = -(sx * sx + sy * sy + u * r.x + v * r.y);
    AffineLine::from_homogeneous(m, [u.value(), v.value(), w.value()])
}

/// Bisectors of `r` with every `s` in `points` at nonzero distance,
/// deduplicated.
pub fn bisector_instance(points: &[AffinePoint], r: &AffinePoint) -> Result<Vec<AffineLine>> {
    if !points.contains(r) {
        return Err(Error::InvalidParameter(format!("{r} is not in the point set")));
    }
    if points.iter().any(|q| q.modulus() != r.modulus()) {
        return Err(Error::ModulusMismatch);
    }
    let lines: BTreeSet<AffineLine> = points.iter().filter_map(|s| bisector(r, s)).collect();
    Ok(lines.into_iter().collect())
}

/// `I(P, L_r)` for the bisector lines of `r`.
pub fn bisector_incidences(points: &[AffinePoint], r: &AffinePoint) -> Result<u64> {
    let lines = bisector_instance(points, r)?;
    let inst = Instance::new(r.modulus(), points.iter().copied(), lines)?;
    Ok(count_incidences(&inst, Engine::Auto))
}

/// Ordered triples `(q, r, s)`, `r != s`, with `d(q, r) = d(q, s) != 0`.
pub fn isosceles_triples(points: &[AffinePoint]) -> u64 {
    let pts = sorted_points(points);
    let mut total = 0u64;
    let mut by_dist: HashMap<Scalar, u64> = HashMap::new();
    for q in &pts {
        by_dist.clear();
        for r in &pts {
            let d = dist(q, r);
            if !d.is_zero() {
                *by_dist.entry(d).or_default() += 1;
            }
        }
        total += by_dist.values().map(|&c| c * (c - 1)).sum::<u64>();
    }
    total
}

/// Determined lines whose point count lies in `[2^j, 2^{j+1})`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DyadicClass {
    pub j: u32,
    pub lines: usize,
    /// Sum of `C(k, 2)` over the class.
    pub pairs: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BeckReport {
    /// `(line, number of points on it)`, in line order.
    pub lines: Vec<(AffineLine, usize)>,
    pub classes: Vec<DyadicClass>,
    /// Sum of `C(k, 2)` over all determined lines.
    pub covered_pairs: u64,
    /// `C(m, 2)`.
    pub total_pairs: u64,
}

impl BeckReport {
    pub fn pairs_balance(&self) -> bool {
        self.covered_pairs == self.total_pairs
    }
}

pub fn determined_lines(points: &[AffinePoint]) -> Result<BeckReport> {
    let pts = sorted_points(points);
    if pts.len() < 2 {
        return Err(Error::TooFewPoints);
    }
    let mut on_line: BTreeMap<AffineLine, BTreeSet<AffinePoint>> = BTreeMap::new();
    for (i, q) in pts.iter().enumerate() {
        for r in &pts[i + 1..] {
            let set = on_line.entry(line_through(q, r)?).or_default();
            set.insert(*q);
            set.insert(*r);
        }
    }
    let pairs = |k: usize| (k * (k - 1) / 2) as u64;
    let lines: Vec<(AffineLine, usize)> = on_line.into_iter().map(|(l, s)| (l, s.len())).collect();
    let mut classes: BTreeMap<u32, DyadicClass> = BTreeMap::new();
    for &(_, k) in &lines {
        let j = usize::BITS - 1 - k.leading_zeros();
        let c = classes.entry(j).or_insert(DyadicClass { j, lines: 0, pairs: 0 });
        c.lines += 1;
        c.pairs += pairs(k);
    }
    Ok(BeckReport {
        covered_pairs: lines.iter().map(|&(_, k)| pairs(k)).sum(),
        total_pairs: pairs(pts.len()),
        lines,
        classes: classes.into_values().collect(),
    })
}
