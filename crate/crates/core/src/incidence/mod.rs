//! Exact incidence counting in F_p^2 and F_p^3, richness histograms, and the
//! comparator bounds and hypothesis checks used in reports.

mod bounds;
mod kernel;
mod space;

use std::collections::{HashMap, HashSet};

use serde::Serialize;

use crate::plane::{AffineLine, AffinePoint, Instance};
use kernel::SlopeConst;

pub use bounds::{
    cartesian_bound, check_hypotheses, combinatorial_bound_holds, main_term, point_plane_bound,
    reference_bound, sig4, sizes_of, table1_regime, BoundKind, Condition, HypothesisReport, LlConstant, ReferenceBound,
    Sizes, Theorem,
};
pub(crate) use bounds::ll as ll_condition;
pub use space::{count_point_plane, max_collinear_3d, PlaneInstance3D, Point3, Plane3};

/// Counting engine selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    /// Test every (point, line) pair.
    Naive,
    /// Index lines by slope and probe every point against each slope class.
    HashJoin,
    /// Pick the cheapest strategy by the cost model.
    #[default]
    Auto,
}

impl std::str::FromStr for Engine {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "naive" => Ok(Engine::Naive),
            "hash_join" | "hash-join" => Ok(Engine::HashJoin),
            "auto" => Ok(Engine::Auto),
            other => Err(format!("unknown engine '{other}'")),
        }
    }
}

/// The concrete algorithm an engine resolves to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// `m * n` pair tests.
    Naive,
    /// For each line and each x in the point x-support, probe the point set:
    /// `n * |X|` lookups.
    XProbe,
    /// For each slope class and each point, probe the intercept index:
    /// `m * (|slopes| + 1)` lookups.
    SlopeProbe,
}

/// Cost estimates `(naive, x-probe, slope-probe)` for an instance.
pub fn strategy_costs(inst: &Instance) -> [u128; 3] {
    let (m, n) = (inst.m() as u128, inst.n() as u128);
    let xs = inst.x_support().len() as u128;
    let slopes = inst.slope_classes().len() as u128;
    [m * n, n * xs, m * (slopes + 1)]
}

/// Cheapest strategy; ties prefer slope-probe, then x-probe.
pub fn choose_strategy(inst: &Instance) -> Strategy {
    let [naive, xprobe, slope] = strategy_costs(inst);
    if slope <= xprobe && slope <= naive {
        Strategy::SlopeProbe
    } else if xprobe <= naive {
        Strategy::XProbe
    } else {
        Strategy::Naive
    }
}

pub fn resolve(engine: Engine, inst: &Instance) -> Strategy {
    match engine {
        Engine::Naive => Strategy::Naive,
        Engine::HashJoin => Strategy::SlopeProbe,
        Engine::Auto => choose_strategy(inst),
    }
}

/// Exact `I(P, L)`. All engines return identical counts.
pub fn count_incidences(inst: &Instance, engine: Engine) -> u64 {
    count_with(inst, resolve(engine, inst))
}

pub fn count_with(inst: &Instance, strategy: Strategy) -> u64 {
    match strategy {
        Strategy::Naive => count_naive(inst),
        Strategy::XProbe => count_xprobe(inst),
        Strategy::SlopeProbe => count_slope_probe(inst),
    }
}

fn count_naive(inst: &Instance) -> u64 {
    let p = inst.modulus().p64();
    let mut total = 0u64;
    for line in inst.lines() {
        match *line {
            AffineLine::NonVertical { slope, intercept } => {
                let (s, t) = (slope.value() as u64, intercept.value() as u64);
                for q in inst.points() {
                    total += ((s * q.x.value() as u64 + t) % p == q.y.value() as u64) as u64;
                }
            }
            AffineLine::Vertical { x } => {
                total += inst.points().iter().filter(|q| q.x == x).count() as u64;
            }
        }
    }
    total
}

fn count_xprobe(inst: &Instance) -> u64 {
    let mut total = 0u64;
    visit_xprobe(inst, |_, _| total += 1);
    total
}

fn vertical_hits(inst: &Instance) -> u64 {
    let verticals: HashSet<u32> = inst
        .lines()
        .iter()
        .filter_map(|l| match l {
            AffineLine::Vertical { x } => Some(x.value()),
            _ => None,
        })
        .collect();
    if verticals.is_empty() {
        return 0;
    }
    inst.points().iter().filter(|q| verticals.contains(&q.x.value())).count() as u64
}

/// Lines grouped by slope: `(slope, sorted intercepts)`, slopes increasing.
fn slope_groups(inst: &Instance) -> Vec<(u32, Vec<u32>)> {
    let mut groups: Vec<(u32, Vec<u32>)> = Vec::new();
    // Lines are sorted by (is_vertical, slope, intercept).
    for line in inst.lines() {
        if let AffineLine::NonVertical { slope, intercept } = line {
            match groups.last_mut() {
                Some((s, ts)) if *s == slope.value() => ts.push(intercept.value()),
                _ => groups.push((slope.value(), vec![intercept.value()])),
            }
        }
    }
    groups
}

const CHUNK: usize = 2048;
const SMALL_GROUP: usize = 8;
/// Largest slope gap bridged by the multiples table.
const MAX_STEP: usize = 32;

fn count_slope_probe(inst: &Instance) -> u64 {
    let p = inst.modulus().get();
    let xs: Vec<u32> = inst.points().iter().map(|q| q.x.value()).collect();
    let ys: Vec<u32> = inst.points().iter().map(|q| q.y.value()).collect();
    let by_slope = slope_groups(inst);
    let groups: Vec<(u32, SlopeConst, &[u32], Option<HashSet<u32>>)> = by_slope
        .iter()
        .map(|(s, ts)| {
            let index = (ts.len() > SMALL_GROUP).then(|| ts.iter().copied().collect());
            (*s, SlopeConst::new(*s, p), ts.as_slice(), index)
        })
        .collect();
    let mut total = vertical_hits(inst);
    let mut keys = vec![0u32; CHUNK];
    // Blocking over points keeps the keys and the multiples table cache
    // resident while every slope passes over them.
    for start in (0..xs.len()).step_by(CHUNK) {
        let end = (start + CHUNK).min(xs.len());
        let (cx, cy) = (&xs[start..end], &ys[start..end]);
        let len = cx.len();
        let mult = kernel::multiples(cx, MAX_STEP, p);
        let keys = &mut keys[..len];
        let mut prev: Option<u32> = None;
        for (s, c, ts, index) in &groups {
            let probe: &[u32] = if index.is_some() { &[] } else { ts };
            let gap = prev.map_or(usize::MAX, |q| (s - q) as usize);
            total += if gap <= MAX_STEP {
                kernel::step_count(keys, &mult[(gap - 1) * len..gap * len], probe, p)
            } else {
                kernel::fill_count(cx, cy, *c, probe, p, keys)
            } as u64;
            if let Some(set) = index {
                total += keys.iter().filter(|k| set.contains(k)).count() as u64;
            }
            prev = Some(*s);
        }
    }
    total
}

/// Calls `visit(point_index, line_index)` for every incidence, indices into
/// `inst.points()` and `inst.lines()`.
pub fn for_each_incidence(inst: &Instance, strategy: Strategy, mut visit: impl FnMut(usize, usize)) {
    match strategy {
        Strategy::Naive => {
            for (li, line) in inst.lines().iter().enumerate() {
                for (pi, q) in inst.points().iter().enumerate() {
                    if line.contains_unchecked(q) {
                        visit(pi, li);
                    }
                }
            }
        }
        Strategy::XProbe => visit_xprobe(inst, visit),
        Strategy::SlopeProbe => {
            let line_index: HashMap<AffineLine, usize> =
                inst.lines().iter().enumerate().map(|(i, l)| (*l, i)).collect();
            let slopes = inst.slope_classes();
            for (pi, q) in inst.points().iter().enumerate() {
                for s in &slopes {
                    let line = AffineLine::NonVertical {
                        slope: *s,
                        intercept: q.y - *s * q.x,
                    };
                    if let Some(&li) = line_index.get(&line) {
                        visit(pi, li);
                    }
                }
                if let Some(&li) = line_index.get(&AffineLine::Vertical { x: q.x }) {
                    visit(pi, li);
                }
            }
        }
    }
}

fn visit_xprobe(inst: &Instance, mut visit: impl FnMut(usize, usize)) {
    let point_index: HashMap<AffinePoint, usize> =
        inst.points().iter().enumerate().map(|(i, q)| (*q, i)).collect();
    let mut by_x: HashMap<u32, Vec<usize>> = HashMap::new();
    for (i, q) in inst.points().iter().enumerate() {
        by_x.entry(q.x.value()).or_default().push(i);
    }
    let xs = inst.x_support();
    for (li, line) in inst.lines().iter().enumerate() {
        match *line {
            AffineLine::NonVertical { slope, intercept } => {
                for &x in &xs {
                    let q = AffinePoint {
                        x,
                        y: slope * x + intercept,
                    };
                    if let Some(&pi) = point_index.get(&q) {
                        visit(pi, li);
                    }
                }
            }
            AffineLine::Vertical { x } => {
                if let Some(ids) = by_x.get(&x.value()) {
                    for &pi in ids {
                        visit(pi, li);
                    }
                }
            }
        }
    }
}

/// Point degrees and line richness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RichnessHistogram {
    pub per_point: Vec<(AffinePoint, u64)>,
    pub per_line: Vec<(AffineLine, u64)>,
    pub total: u64,
}

impl RichnessHistogram {
    pub fn point_degree(&self, q: &AffinePoint) -> Option<u64> {
        self.per_point
            .binary_search_by(|(r, _)| r.cmp(q))
            .ok()
            .map(|i| self.per_point[i].1)
    }

    pub fn line_richness(&self, l: &AffineLine) -> Option<u64> {
        self.per_line
            .binary_search_by(|(r, _)| r.cmp(l))
            .ok()
            .map(|i| self.per_line[i].1)
    }
}

/// Exact degree tables; entries follow the instance's sorted order.
pub fn richness_histograms(inst: &Instance) -> RichnessHistogram {
    let mut pd = vec![0u64; inst.m()];
    let mut ld = vec![0u64; inst.n()];
    let mut total = 0;
    for_each_incidence(inst, choose_strategy(inst), |pi, li| {
        pd[pi] += 1;
        ld[li] += 1;
        total += 1;
    });
    RichnessHistogram {
        per_point: inst.points().iter().copied().zip(pd).collect(),
        per_line: inst.lines().iter().copied().zip(ld).collect(),
        total,
    }
}
