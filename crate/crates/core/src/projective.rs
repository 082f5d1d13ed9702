//! The projective closure of F_p^2 and invertible projective maps.
//!
//! An affine point `(x, y)` embeds as `[x : y : 1]`. The line at infinity is
//! `z = 0`; on it, `[1 : 0 : 0]` is the common point of all horizontal lines
//! and `[0 : 1 : 0]` the common point of all vertical lines.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::PrimeModulus;
use crate::plane::{line_through, AffineLine, AffinePoint, Instance};

/// Homogeneous coordinates scaled so the first nonzero entry is 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjPoint {
    coords: [u32; 3],
}

impl ProjPoint {
    pub fn new(m: PrimeModulus, raw: [u32; 3]) -> Option<Self> {
        canonical(m, raw).map(|coords| ProjPoint { coords })
    }

    pub fn from_affine(q: &AffinePoint) -> Self {
        ProjPoint {
            coords: [q.x.value(), q.y.value(), 1],
        }
    }

    pub fn coords(&self) -> [u32; 3] {
        self.coords
    }

    pub fn is_at_infinity(&self) -> bool {
        self.coords[2] == 0
    }

    /// The affine point, or `None` when on the line at infinity.
    pub fn to_affine(&self, m: PrimeModulus) -> Option<AffinePoint> {
        let [a, b, c] = self.coords;
        if c == 0 {
            return None;
        }
        let ic = m.inv(c).ok()?;
        Some(AffinePoint {
            x: m.scalar(m.mul(a, ic) as u64),
            y: m.scalar(m.mul(b, ic) as u64),
        })
    }
}

/// Point at infinity shared by all horizontal lines.
pub const ALPHA: ProjPoint = ProjPoint { coords: [1, 0, 0] };
/// Point at infinity shared by all vertical lines.
pub const BETA: ProjPoint = ProjPoint { coords: [0, 1, 0] };
/// Coefficients of the line at infinity, `z = 0`.
pub const LINE_AT_INFINITY: [u32; 3] = [0, 0, 1];

fn canonical(m: PrimeModulus, raw: [u32; 3]) -> Option<[u32; 3]> {
    let lead = raw.iter().copied().find(|&v| v != 0)?;
    let inv = m.inv(lead).ok()?;
    Some(raw.map(|v| m.mul(v, inv)))
}

/// Whether two homogeneous triples are proportional.
pub fn proportional(m: PrimeModulus, a: [u32; 3], b: [u32; 3]) -> bool {
    canonical(m, a) == canonical(m, b)
}

/// An invertible 3x3 matrix over F_p acting on homogeneous coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProjMap {
    modulus: PrimeModulus,
    rows: [[u32; 3]; 3],
}

impl ProjMap {
    pub fn from_rows(modulus: PrimeModulus, rows: [[u32; 3]; 3]) -> Result<Self> {
        let rows = rows.map(|r| r.map(|v| modulus.reduce_u64(v as u64)));
        let map = ProjMap { modulus, rows };
        if map.det() == 0 {
            return Err(Error::SingularMap);
        }
        Ok(map)
    }

    pub fn identity(modulus: PrimeModulus) -> Self {
        ProjMap {
            modulus,
            rows: [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
        }
    }

    /// `(x, y) -> (x + dx, y + dy)`.
    pub fn translation(modulus: PrimeModulus, dx: u32, dy: u32) -> Self {
        ProjMap {
            modulus,
            rows: [
                [1, 0, modulus.reduce_u64(dx as u64)],
                [0, 1, modulus.reduce_u64(dy as u64)],
                [0, 0, 1],
            ],
        }
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    pub fn rows(&self) -> [[u32; 3]; 3] {
        self.rows
    }

    pub fn det(&self) -> u32 {
        let m = self.modulus;
        let r = &self.rows;
        let minor = |a: usize, b: usize, c: usize, d: usize| {
            m.sub(m.mul(r[1][a], r[2][b]), m.mul(r[1][c], r[2][d]))
        };
        let t0 = m.mul(r[0][0], minor(1, 2, 2, 1));
        let t1 = m.mul(r[0][1], minor(0, 2, 2, 0));
        let t2 = m.mul(r[0][2], minor(0, 1, 1, 0));
        m.add(m.sub(t0, t1), t2)
    }

    pub fn inverse(&self) -> ProjMap {
        let m = self.modulus;
        let r = &self.rows;
        let inv_det = m.inv(self.det()).expect("ProjMap is invertible by construction");
        let mut out = [[0u32; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                // adjugate entry (i, j) is the cofactor of (j, i)
                let (r0, r1) = ((j + 1) % 3, (j + 2) % 3);
                let (c0, c1) = ((i + 1) % 3, (i + 2) % 3);
                let cof = m.sub(m.mul(r[r0][c0], r[r1][c1]), m.mul(r[r0][c1], r[r1][c0]));
                *entry = m.mul(cof, inv_det);
            }
        }
        ProjMap { modulus: m, rows: out }
    }

    pub fn transpose(&self) -> ProjMap {
        let r = &self.rows;
        ProjMap {
            modulus: self.modulus,
            rows: [
                [r[0][0], r[1][0], r[2][0]],
                [r[0][1], r[1][1], r[2][1]],
                [r[0][2], r[1][2], r[2][2]],
            ],
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &ProjMap) -> ProjMap {
        let m = self.modulus;
        let mut out = [[0u32; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = (0..3).fold(0, |acc, k| m.add(acc, m.mul(self.rows[i][k], other.rows[k][j])));
            }
        }
        ProjMap { modulus: m, rows: out }
    }

    pub fn apply_raw(&self, v: [u32; 3]) -> [u32; 3] {
        let m = self.modulus;
        self.rows.map(|row| (0..3).fold(0, |acc, k| m.add(acc, m.mul(row[k], v[k]))))
    }

    pub fn apply_proj(&self, q: &ProjPoint) -> ProjPoint {
        ProjPoint::new(self.modulus, self.apply_raw(q.coords)).expect("invertible map sends nonzero to nonzero")
    }

    pub fn apply_point(&self, q: &AffinePoint) -> Result<AffinePoint> {
        self.apply_proj(&ProjPoint::from_affine(q))
            .to_affine(self.modulus)
            .ok_or(Error::PointSentToInfinity(*q))
    }

    /// Lines transform by the inverse transpose.
    pub fn apply_line_raw(&self, coeffs: [u32; 3]) -> [u32; 3] {
        self.inverse().transpose().apply_raw(coeffs)
    }

    pub fn apply_line(&self, line: &AffineLine) -> Result<AffineLine> {
        let image = self.apply_line_raw(line.homogeneous());
        AffineLine::from_homogeneous(self.modulus, image).ok_or(Error::LineSentToInfinity)
    }

    /// Homogeneous coefficients of the line sent to the line at infinity.
    pub fn preimage_of_infinity(&self) -> [u32; 3] {
        self.transpose().apply_raw(LINE_AT_INFINITY)
    }
}

impl fmt::Display for ProjMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.rows)
    }
}

/// The lexicographically smallest affine point off `line`.
fn first_point_off(m: PrimeModulus, line: &AffineLine) -> AffinePoint {
    m.elements()
        .flat_map(|x| m.elements().map(move |y| AffinePoint { x, y }))
        .find(|q| !line.contains_unchecked(q))
        .expect("a line never covers the whole plane")
}

/// A map sending `q` to `[1:0:0]`, `r` to `[0:1:0]` and the lexicographically
/// smallest point off the line `qr` to `[0:0:1]`. The preimage of the line at
/// infinity is then exactly the line `qr`: lines through `q` become horizontal
/// and lines through `r` become vertical.
pub fn projective_map_from_pair(q: &AffinePoint, r: &AffinePoint) -> Result<ProjMap> {
    let line = line_through(q, r)?;
    let m = q.modulus();
    let w = first_point_off(m, &line);
    let (qc, rc, wc) = (
        ProjPoint::from_affine(q).coords(),
        ProjPoint::from_affine(r).coords(),
        ProjPoint::from_affine(&w).coords(),
    );
    // Columns are the three source points; its inverse is the normalizing map.
    let frame = ProjMap::from_rows(
        m,
        [[qc[0], rc[0], wc[0]], [qc[1], rc[1], wc[1]], [qc[2], rc[2], wc[2]]],
    )?;
    Ok(frame.inverse())
}

/// Image of an instance under `map`. Fails if a point lands at infinity or a
/// line becomes the line at infinity.
pub fn apply_map(map: &ProjMap, inst: &Instance) -> Result<Instance> {
    let points = inst
        .points()
        .iter()
        .map(|q| map.apply_point(q))
        .collect::<Result<Vec<_>>>()?;
    let lines = inst
        .lines()
        .iter()
        .map(|l| map.apply_line(l))
        .collect::<Result<Vec<_>>>()?;
    Instance::new(inst.modulus(), points, lines)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::full_plane;
    use crate::incidence::{count_incidences, Engine};
    use crate::rng::SplitMix64;

    fn f(p: u64) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    pub(crate) fn random_map(m: PrimeModulus, rng: &mut SplitMix64) -> ProjMap {
        loop {
            let mut rows = [[0u32; 3]; 3];
            for row in rows.iter_mut() {
                for v in row.iter_mut() {
                    *v = rng.below(m.p64()) as u32;
                }
            }
            if let Ok(map) = ProjMap::from_rows(m, rows) {
                return map;
            }
        }
    }

    #[test]
    fn pair_map_defining_property() {
        let m = f(5);
        let q = AffinePoint::from_ints(m, 0, 0);
        let r = AffinePoint::from_ints(m, 1, 0);
        let map = projective_map_from_pair(&q, &r).unwrap();
        assert_ne!(map.det(), 0);
        assert_eq!(map.apply_proj(&ProjPoint::from_affine(&q)), ALPHA);
        assert_eq!(map.apply_proj(&ProjPoint::from_affine(&r)), BETA);
        assert_eq!(projective_map_from_pair(&q, &q), Err(Error::CoincidentPoints));
    }

    #[test]
    fn pair_map_preimage_of_infinity_is_qr() {
        let mut rng = SplitMix64::new(11);
        for p in [5u64, 7, 13, 101] {
            let m = f(p);
            for _ in 0..50 {
                let q = AffinePoint::from_ints(m, rng.below(p) as i64, rng.below(p) as i64);
                let r = AffinePoint::from_ints(m, rng.below(p) as i64, rng.below(p) as i64);
                if q == r {
                    continue;
                }
                let map = projective_map_from_pair(&q, &r).unwrap();
                let pre = map.preimage_of_infinity();
                assert!(proportional(m, pre, line_through(&q, &r).unwrap().homogeneous()));
                assert!(proportional(m, map.inverse().apply_raw(ALPHA.coords()), ProjPoint::from_affine(&q).coords()));
            }
        }
    }

    #[test]
    fn pencils_become_axis_parallel() {
        let m = f(7);
        let q = AffinePoint::from_ints(m, 2, 3);
        let r = AffinePoint::from_ints(m, 5, 1);
        let map = projective_map_from_pair(&q, &r).unwrap();
        let qr = line_through(&q, &r).unwrap();
        for target in full_plane(m).points() {
            if target == &q || target == &r {
                continue;
            }
            let lq = line_through(&q, target).unwrap();
            let lr = line_through(&r, target).unwrap();
            if lq == qr {
                continue;
            }
            assert_eq!(map.apply_line(&lq).unwrap().slope().map(|s| s.value()), Some(0));
            assert!(map.apply_line(&lr).unwrap().is_vertical());
        }
        assert_eq!(map.apply_line(&qr), Err(Error::LineSentToInfinity));
    }

    #[test]
    fn identity_and_translation() {
        let m = f(5);
        let plane = full_plane(m);
        assert_eq!(apply_map(&ProjMap::identity(m), &plane).unwrap(), plane);
        let moved = apply_map(&ProjMap::translation(m, 2, 3), &plane).unwrap();
        assert_eq!(count_incidences(&moved, Engine::Naive), 150);
        assert_eq!(moved, plane);
    }

    #[test]
    fn inverse_and_compose() {
        let mut rng = SplitMix64::new(3);
        let m = f(101);
        for _ in 0..20 {
            let a = random_map(m, &mut rng);
            assert_eq!(a.compose(&a.inverse()), ProjMap::identity(m));
        }
        assert_eq!(ProjMap::from_rows(m, [[1, 2, 3], [2, 4, 6], [0, 0, 1]]), Err(Error::SingularMap));
    }

    #[test]
    fn point_sent_to_infinity_is_reported() {
        let m = f(7);
        let q = AffinePoint::from_ints(m, 0, 0);
        let r = AffinePoint::from_ints(m, 1, 1);
        let map = projective_map_from_pair(&q, &r).unwrap();
        let on_line = AffinePoint::from_ints(m, 3, 3);
        let inst = Instance::new(m, [on_line], []).unwrap();
        assert_eq!(apply_map(&map, &inst), Err(Error::PointSentToInfinity(on_line)));
    }
}
