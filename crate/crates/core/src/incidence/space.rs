//! Points and planes in F_p^3.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::PrimeModulus;

pub type Point3 = [u32; 3];
/// Coefficients `[a, b, c, d]` of `a x + b y + c z + d = 0`.
pub type Plane3 = [u32; 4];

/// Deduplicated points and planes over one prime field. Plane coefficients
/// are scaled so the first nonzero of `(a, b, c)` is 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlaneInstance3D {
    modulus: PrimeModulus,
    points: Vec<Point3>,
    planes: Vec<Plane3>,
}

impl PlaneInstance3D {
    pub fn new(
        modulus: PrimeModulus,
        points: impl IntoIterator<Item = Point3>,
        planes: impl IntoIterator<Item = Plane3>,
    ) -> Result<Self> {
        let mut pts: Vec<Point3> = points
            .into_iter()
            .map(|q| q.map(|v| modulus.reduce_u64(v as u64)))
            .collect();
        let mut pls = planes
            .into_iter()
            .map(|pl| canonical_plane(modulus, pl))
            .collect::<Result<Vec<_>>>()?;
        pts.sort_unstable();
        pts.dedup();
        pls.sort_unstable();
        pls.dedup();
        Ok(PlaneInstance3D {
            modulus,
            points: pts,
            planes: pls,
        })
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    pub fn points(&self) -> &[Point3] {
        &self.points
    }

    pub fn planes(&self) -> &[Plane3] {
        &self.planes
    }

    /// Number of points.
    pub fn r(&self) -> usize {
        self.points.len()
    }

    /// Number of planes.
    pub fn s(&self) -> usize {
        self.planes.len()
    }
}

fn canonical_plane(m: PrimeModulus, pl: Plane3) -> Result<Plane3> {
    let pl = pl.map(|v| m.reduce_u64(v as u64));
    let lead = pl[..3]
        .iter()
        .copied()
        .find(|&v| v != 0)
        .ok_or_else(|| Error::InvalidParameter("plane normal (a, b, c) is zero".into()))?;
    let inv = m.inv(lead)?;
    Ok(pl.map(|v| m.mul(v, inv)))
}

pub(crate) fn on_plane(m: PrimeModulus, q: &Point3, pl: &Plane3) -> bool {
    let lhs = m.add(
        m.add(m.mul(pl[0], q[0]), m.mul(pl[1], q[1])),
        m.add(m.mul(pl[2], q[2]), pl[3]),
    );
    lhs == 0
}

/// Exact number of (point, plane) incidences.
pub fn count_point_plane(inst: &PlaneInstance3D) -> u64 {
    let m = inst.modulus;
    inst.planes
        .iter()
        .map(|pl| inst.points.iter().filter(|q| on_plane(m, q, pl)).count() as u64)
        .sum()
}

/// Largest number of points on one line; 0 for an empty set.
pub fn max_collinear_3d(m: PrimeModulus, points: &[Point3]) -> usize {
    let mut pts = points.to_vec();
    pts.sort_unstable();
    pts.dedup();
    if pts.len() <= 2 {
        return pts.len();
    }
    let mut best = 2;
    let mut directions: HashMap<Point3, usize> = HashMap::new();
    for (i, a) in pts.iter().enumerate() {
        directions.clear();
        for b in &pts[i + 1..] {
            let d = [m.sub(b[0], a[0]), m.sub(b[1], a[1]), m.sub(b[2], a[2])];
            let lead = d.iter().copied().find(|&v| v != 0).expect("points are distinct");
            let inv = m.inv(lead).expect("nonzero");
            *directions.entry(d.map(|v| m.mul(v, inv))).or_default() += 1;
        }
        if let Some(&k) = directions.values().max() {
            best = best.max(k + 1);
        }
    }
    best
}
