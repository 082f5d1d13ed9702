//! Richness partition, two-pencil grid extraction, the covering loop,
//! projective normalization of grids, and certificate verification.
//!
//! Thresholds are exact rationals. Ties between points are broken by the
//! lexicographic order on `(x, y)`, between lines by
//! `(is_vertical, slope, intercept)`.

use std::collections::{BTreeSet, HashSet};

use num::{BigInt, BigRational, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::Scalar;
use crate::incidence::{richness_histograms, RichnessHistogram};
use crate::plane::{line_through, AffineLine, AffinePoint, Instance};
use crate::projective::{projective_map_from_pair, ProjMap};

fn ser_ratio<S: Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

fn ratio(v: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn pow2(e: u32) -> BigRational {
    ratio(1u64 << e)
}

/// Constants for the partition and the covering loop.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverParams {
    #[serde(serialize_with = "ser_ratio")]
    pub c1: BigRational,
    #[serde(serialize_with = "ser_ratio")]
    pub c2: BigRational,
    #[serde(serialize_with = "ser_ratio")]
    pub stop_fraction: BigRational,
}

impl CoverParams {
    /// `c1 = 2^-11`, `c2 = 2^15`, stop at `2^-15 m`. At desk scale these make
    /// every precondition fail.
    pub fn standard() -> Self {
        CoverParams {
            c1: pow2(11).recip(),
            c2: pow2(15),
            stop_fraction: pow2(15).recip(),
        }
    }

    /// `c1 = 1/2`, `c2 = 2`, stop at `m / 4`.
    pub fn desk() -> Self {
        CoverParams {
            c1: BigRational::new(1.into(), 2.into()),
            c2: ratio(2),
            stop_fraction: BigRational::new(1.into(), 4.into()),
        }
    }
}

impl Default for CoverParams {
    fn default() -> Self {
        CoverParams::standard()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RichnessPartition {
    /// `I / m`.
    #[serde(serialize_with = "ser_ratio")]
    pub k: BigRational,
    #[serde(serialize_with = "ser_ratio")]
    pub dearth_threshold: BigRational,
    #[serde(serialize_with = "ser_ratio")]
    pub excess_threshold: BigRational,
    /// Degree at most `c_dearth K`.
    pub d: Vec<AffinePoint>,
    /// Degree at least `c_excess K` (and not in `d`).
    pub e: Vec<AffinePoint>,
    /// The rest.
    pub a: Vec<AffinePoint>,
}

pub fn richness_partition(
    inst: &Instance,
    c_dearth: &BigRational,
    c_excess: &BigRational,
) -> Result<RichnessPartition> {
    if inst.m() == 0 {
        return Err(Error::EmptyInstance);
    }
    if c_dearth >= c_excess {
        return Err(Error::InvalidParameter("c_dearth must be below c_excess".into()));
    }
    let h = richness_histograms(inst);
    let k = BigRational::new(BigInt::from(h.total), BigInt::from(inst.m()));
    let lo = c_dearth * &k;
    let hi = c_excess * &k;
    let (mut d, mut e, mut a) = (Vec::new(), Vec::new(), Vec::new());
    for &(q, deg) in &h.per_point {
        let deg = ratio(deg);
        if deg <= lo {
            d.push(q);
        } else if deg >= hi {
            e.push(q);
        } else {
            a.push(q);
        }
    }
    Ok(RichnessPartition {
        k,
        dearth_threshold: lo,
        excess_threshold: hi,
        d,
        e,
        a,
    })
}

/// Intermediate sets of one extraction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExtractionTrace {
    /// `I(P, L)` for the working point set.
    pub incidences: u64,
    /// Lines with at least `I / (2n)` points.
    pub l1: Vec<AffineLine>,
    /// Points joined to `p1` by a line of `L`.
    pub q: Vec<AffinePoint>,
    /// Lines with at least `I(Q, L) / (2n)` points of `Q`.
    pub l2: Vec<AffineLine>,
}

/// Whether the three size conditions that force a large grid held.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Preconditions {
    pub k_vs_lines: bool,
    pub k_vs_c1: bool,
    pub k_cubed: bool,
    /// `c1^4 K^4 m / (2^9 n^2)`.
    #[serde(serialize_with = "ser_ratio")]
    pub size_bound: BigRational,
}

impl Preconditions {
    /// `K >= 4n / (c1 m)`, `K >= 8 / c1`, `K^3 >= 2^6 n^2 / (c1^3 m)`.
    pub fn evaluate(k: &BigRational, c1: &BigRational, m: usize, n: usize) -> Self {
        let (mr, nr) = (ratio(m as u64), ratio(n as u64));
        let c1_cubed = c1 * c1 * c1;
        let k_vs_lines = m > 0 && *k >= ratio(4) * &nr / (c1 * &mr);
        let k_vs_c1 = *k >= ratio(8) / c1;
        let k_cubed = m > 0 && k * k * k >= pow2(6) * &nr * &nr / (&c1_cubed * &mr);
        let size_bound = if n == 0 {
            BigRational::zero()
        } else {
            &c1_cubed * c1 * k * k * k * k * &mr / (pow2(9) * &nr * &nr)
        };
        Preconditions {
            k_vs_lines,
            k_vs_c1,
            k_cubed,
            size_bound,
        }
    }

    pub fn all(&self) -> bool {
        self.k_vs_lines && self.k_vs_c1 && self.k_cubed
    }
}

/// A point set covered by two pencils of lines of `L`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PencilGrid {
    pub p1: AffinePoint,
    pub q1: AffinePoint,
    pub g: Vec<AffinePoint>,
    /// Lines of `L` through `p1` covering `g`.
    pub pencil_p1: Vec<AffineLine>,
    /// Lines of `L` through `q1` covering `g`.
    pub pencil_q1: Vec<AffineLine>,
    pub trace: ExtractionTrace,
    #[serde(serialize_with = "ser_ratio")]
    pub k: BigRational,
    pub preconditions: Preconditions,
}

/// Largest degree wins; among equal degrees the smallest point. Returns `None`
/// if no candidate has positive degree.
fn richest(candidates: &[AffinePoint], h: &RichnessHistogram) -> Option<AffinePoint> {
    let mut best: Option<(u64, AffinePoint)> = None;
    for q in candidates {
        let d = h.point_degree(q).unwrap_or(0);
        if d > 0 && best.map_or(true, |(bd, _)| d > bd) {
            best = Some((d, *q));
        }
    }
    best.map(|(_, q)| q)
}

fn lines_at_least(h: &RichnessHistogram, num: u64, den: u64) -> Vec<AffineLine> {
    // richness >= num / den
    h.per_line
        .iter()
        .filter(|&&(_, r)| r as u128 * den as u128 >= num as u128)
        .map(|&(l, _)| l)
        .collect()
}

/// Extracts `p1`, `q1` and a grid `G` off the line `p1 q1` from `points`
/// against the full line set `lines`.
///
/// `k` is the richness scale used for the preconditions and the size bound;
/// it defaults to `I / |points|`.
pub fn two_pencil_extract(
    points: &[AffinePoint],
    lines: &[AffineLine],
    c1: &BigRational,
    k: Option<&BigRational>,
) -> Result<PencilGrid> {
    let modulus = points
        .first()
        .map(|q| q.modulus())
        .ok_or(Error::NoIncidences)?;
    let inst = Instance::new(modulus, points.iter().copied(), lines.iter().copied())?;
    let (m, n) = (inst.m(), inst.n());
    let h = richness_histograms(&inst);
    if h.total == 0 {
        return Err(Error::NoIncidences);
    }
    let k = k
        .cloned()
        .unwrap_or_else(|| BigRational::new(BigInt::from(h.total), BigInt::from(m)));

    let l1 = lines_at_least(&h, h.total, 2 * n as u64);
    let h1 = richness_histograms(&inst.with_lines(l1.iter().copied())?);
    let p1 = richest(inst.points(), &h1).ok_or(Error::EmptyGrid)?;

    let line_set: HashSet<AffineLine> = inst.lines().iter().copied().collect();
    let q: Vec<AffinePoint> = inst
        .points()
        .iter()
        .filter(|&&r| r != p1 && line_set.contains(&line_through(&p1, &r).expect("distinct")))
        .copied()
        .collect();
    let hq = richness_histograms(&inst.with_points(q.iter().copied())?);
    let l2 = lines_at_least(&hq, hq.total, 2 * n as u64);
    let h2 = richness_histograms(&Instance::new(modulus, q.iter().copied(), l2.iter().copied())?);
    let q1 = richest(&q, &h2).ok_or(Error::EmptyGrid)?;

    let base = line_through(&p1, &q1)?;
    let l2_set: HashSet<AffineLine> = l2.iter().copied().collect();
    let g: Vec<AffinePoint> = q
        .iter()
        .filter(|&&r| r != q1 && !base.contains_unchecked(&r))
        .filter(|&&r| l2_set.contains(&line_through(&q1, &r).expect("distinct")))
        .copied()
        .collect();
    if g.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let pencil = |apex: &AffinePoint| -> Vec<AffineLine> {
        g.iter()
            .map(|r| line_through(apex, r).expect("apex is off the grid"))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    };
    Ok(PencilGrid {
        p1,
        q1,
        pencil_p1: pencil(&p1),
        pencil_q1: pencil(&q1),
        preconditions: Preconditions::evaluate(&k, c1, m, n),
        k,
        trace: ExtractionTrace {
            incidences: h.total,
            l1,
            q,
            l2,
        },
        g,
    })
}

/// One step of the covering loop.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverStep {
    /// `|A_i|` before this step.
    pub remaining: usize,
    pub grid: PencilGrid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// The remaining set fell to the stop fraction.
    Small,
    EmptyGrid,
    NoIncidences,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GridCertificate {
    pub params: CoverParams,
    pub p: u32,
    pub m: usize,
    pub n: usize,
    pub partition: RichnessPartition,
    pub steps: Vec<CoverStep>,
    pub leftover: Vec<AffinePoint>,
    pub stop: StopReason,
}

impl GridCertificate {
    /// Number of grids.
    pub fn s(&self) -> usize {
        self.steps.len()
    }
}

/// Partitions by richness, then repeatedly extracts grids from the regular
/// set `A` until at most `stop_fraction * m` points remain or extraction
/// comes back empty.
pub fn grid_cover(inst: &Instance, params: &CoverParams) -> Result<GridCertificate> {
    let partition = richness_partition(inst, &params.c1, &params.c2)?;
    let m = inst.m();
    let limit = &params.stop_fraction * ratio(m as u64);
    let mut remaining: Vec<AffinePoint> = partition.a.clone();
    let mut steps = Vec::new();
    let stop = loop {
        if ratio(remaining.len() as u64) <= limit {
            break StopReason::Small;
        }
        match two_pencil_extract(&remaining, inst.lines(), &params.c1, Some(&partition.k)) {
            Ok(grid) => {
                let taken: HashSet<AffinePoint> = grid.g.iter().copied().collect();
                let before = remaining.len();
                remaining.retain(|q| !taken.contains(q));
                steps.push(CoverStep {
                    remaining: before,
                    grid,
                });
            }
            Err(Error::EmptyGrid) => break StopReason::EmptyGrid,
            Err(Error::NoIncidences) => break StopReason::NoIncidences,
            Err(e) => return Err(e),
        }
    };
    Ok(GridCertificate {
        params: params.clone(),
        p: inst.modulus().get(),
        m,
        n: inst.n(),
        partition,
        steps,
        leftover: remaining,
        stop,
    })
}

/// A grid after the projective map sending `p1` to `[1:0:0]` and `q1` to
/// `[0:1:0]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedGrid {
    pub map: ProjMap,
    pub h: Vec<AffinePoint>,
    pub x: Vec<Scalar>,
    pub y: Vec<Scalar>,
    /// Images of the lines other than `p1 q1`.
    pub lines: Vec<AffineLine>,
    /// Whether `p1 q1` was among the input lines and was dropped.
    pub dropped_base: bool,
}

/// Maps the grid so that the pencil through `p1` becomes horizontal and the
/// pencil through `q1` vertical. `H` then sits inside `X x Y` with
/// `|Y| <= |pencil_p1|` and `|X| <= |pencil_q1|`.
pub fn normalize_grid(g: &PencilGrid, lines: &[AffineLine]) -> Result<NormalizedGrid> {
    if g.g.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let map = projective_map_from_pair(&g.p1, &g.q1)?;
    let base = line_through(&g.p1, &g.q1)?;
    let h = g
        .g
        .iter()
        .map(|q| map.apply_point(q))
        .collect::<Result<BTreeSet<_>>>()?;
    let mut mapped = Vec::with_capacity(lines.len());
    let mut dropped_base = false;
    for l in lines {
        if *l == base {
            dropped_base = true;
            continue;
        }
        mapped.push(map.apply_line(l)?);
    }
    mapped.sort_unstable();
    mapped.dedup();
    let x: BTreeSet<Scalar> = h.iter().map(|q| q.x).collect();
    let y: BTreeSet<Scalar> = h.iter().map(|q| q.y).collect();
    Ok(NormalizedGrid {
        map,
        h: h.into_iter().collect(),
        x: x.into_iter().collect(),
        y: y.into_iter().collect(),
        lines: mapped,
        dropped_base,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub check: &'static str,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub checked_steps: usize,
    pub violations: Vec<Violation>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, check: &str) -> bool {
        self.violations.iter().any(|v| v.check == check)
    }
}

/// Rechecks a certificate against its instance without trusting how it was
/// produced.
pub fn verify_certificate(inst: &Instance, cert: &GridCertificate) -> VerificationReport {
    let mut violations = Vec::new();
    let mut flag = |check: &'static str, detail: String| violations.push(Violation { check, detail });

    let line_set: HashSet<AffineLine> = inst.lines().iter().copied().collect();
    let regular: HashSet<AffinePoint> = cert.partition.a.iter().copied().collect();
    let mut seen: HashSet<AffinePoint> = HashSet::new();
    let c2k = &cert.params.c2 * &cert.partition.k;

    for (i, step) in cert.steps.iter().enumerate() {
        let g = &step.grid;
        let base = match line_through(&g.p1, &g.q1) {
            Ok(l) => Some(l),
            Err(_) => {
                flag("coverage", format!("grid {i}: p1 and q1 coincide"));
                None
            }
        };
        for q in &g.g {
            if !seen.insert(*q) {
                flag("disjoint", format!("grid {i}: {q} already covered"));
            }
            if !regular.contains(q) {
                flag("subset", format!("grid {i}: {q} is not in the regular set"));
            }
            if base.map_or(false, |b| b.contains_unchecked(q)) {
                flag("coverage", format!("grid {i}: {q} lies on the line p1 q1"));
            }
            for (apex, pencil, name) in [(&g.p1, &g.pencil_p1, "p1"), (&g.q1, &g.pencil_q1, "q1")] {
                if !pencil.iter().any(|l| l.contains_unchecked(q) && l.contains_unchecked(apex)) {
                    flag("coverage", format!("grid {i}: {q} is on no listed line through {name}"));
                }
            }
        }
        for (apex, pencil, name) in [(&g.p1, &g.pencil_p1, "p1"), (&g.q1, &g.pencil_q1, "q1")] {
            if pencil.iter().any(|l| !line_set.contains(l) || !l.contains_unchecked(apex)) {
                flag("coverage", format!("grid {i}: pencil through {name} has a foreign line"));
            }
            if ratio(pencil.len() as u64) > c2k {
                flag("pencil_size", format!("grid {i}: {} lines through {name} exceed c2 K", pencil.len()));
            }
        }
        let pre = Preconditions::evaluate(&cert.partition.k, &cert.params.c1, step.remaining, cert.n);
        if pre.all() && ratio(g.g.len() as u64) < pre.size_bound {
            flag("size_bound", format!("grid {i}: |G| = {} below {}", g.g.len(), pre.size_bound));
        }
    }

    // Leftover plus grids must reproduce A, and D, E, A must reproduce P.
    let leftover: HashSet<AffinePoint> = cert.leftover.iter().copied().collect();
    if leftover.len() != cert.leftover.len() || leftover.iter().any(|q| seen.contains(q)) {
        flag("disjoint", "leftover repeats or meets a grid".into());
    }
    let covered_a: usize = cert.steps.iter().map(|s| s.grid.g.len()).sum::<usize>() + cert.leftover.len();
    if covered_a != cert.partition.a.len() || leftover.iter().any(|q| !regular.contains(q)) {
        flag(
            "partition",
            format!("grids and leftover hold {covered_a} points, A has {}", cert.partition.a.len()),
        );
    }
    let mut all: Vec<AffinePoint> = cert
        .partition
        .d
        .iter()
        .chain(&cert.partition.e)
        .chain(&cert.partition.a)
        .copied()
        .collect();
    all.sort_unstable();
    if all != inst.points() {
        flag("partition", "D, E and A do not partition P".into());
    }
    if let Some(min) = cert.steps.iter().map(|s| s.grid.g.len()).min() {
        if min > 0 && cert.s() > cert.m / min {
            flag("step_count", format!("{} steps exceed m / min |G| = {}", cert.s(), cert.m / min));
        }
    }
    VerificationReport {
        checked_steps: cert.steps.len(),
        violations,
    }
}
