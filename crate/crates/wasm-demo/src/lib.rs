//! Browser bindings. Each operation returns a JSON scene for `www/index.html`
//! to draw; the plain Rust functions are what the native tests call.

use incidence_core::constructions::{elekes_construction, full_plane, random_instance};
use incidence_core::cover::{grid_cover, normalize_grid, verify_certificate, CoverParams};
use incidence_core::energy::{arithmetic_image, ArithExpr};
use incidence_core::incidence::{count_with, for_each_incidence, resolve, Strategy};
use incidence_core::{AffineLine, AffinePoint, Engine, Instance, PrimeModulus, Scalar};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Largest prime the page will draw cell by cell.
pub const MAX_DRAW_P: u64 = 127;

#[derive(Serialize)]
pub struct IncidenceScene {
    pub p: u32,
    pub points: Vec<AffinePoint>,
    pub lines: Vec<AffineLine>,
    /// Lines of the instance through each point, in point order.
    pub degree: Vec<u32>,
    pub incidences: u64,
    pub strategy: Strategy,
}

#[derive(Serialize)]
pub struct CoverGrid {
    pub remaining: usize,
    pub p1: AffinePoint,
    pub q1: AffinePoint,
    pub g: Vec<AffinePoint>,
    pub h: Vec<AffinePoint>,
    pub x: Vec<Scalar>,
    pub y: Vec<Scalar>,
}

#[derive(Serialize)]
pub struct CoverScene {
    pub p: u32,
    pub points: Vec<AffinePoint>,
    pub dearth: Vec<AffinePoint>,
    pub excess: Vec<AffinePoint>,
    pub grids: Vec<CoverGrid>,
    pub leftover: Vec<AffinePoint>,
    pub stop: String,
    pub verified: bool,
}

#[derive(Serialize)]
pub struct SumProductScene {
    pub p: u32,
    pub a: Vec<Scalar>,
    pub sum: Vec<Scalar>,
    pub product: Vec<Scalar>,
}

fn drawable(p: u64) -> Result<PrimeModulus, String> {
    if p > MAX_DRAW_P {
        return Err(format!("p must be at most {MAX_DRAW_P} to draw"));
    }
    PrimeModulus::new(p).map_err(|e| e.to_string())
}

fn build(family: &str, p: u64, a: u64, c: u64, m: u64, n: u64, seed: u64) -> Result<Instance, String> {
    let modulus = drawable(p)?;
    let inst = match family {
        "elekes" => elekes_construction(a, c, p),
        "full_plane" => Ok(full_plane(modulus)),
        "random" => random_instance(modulus, m, n, seed),
        other => return Err(format!("unknown family '{other}'")),
    };
    inst.map_err(|e| e.to_string())
}

/// Builds an instance and counts its incidences with `engine`.
#[allow(clippy::too_many_arguments)]
pub fn incidence_scene(
    family: &str,
    p: u64,
    a: u64,
    c: u64,
    m: u64,
    n: u64,
    seed: u64,
    engine: &str,
) -> Result<String, String> {
    let inst = build(family, p, a, c, m, n, seed)?;
    let engine: Engine = engine.parse()?;
    let strategy = resolve(engine, &inst);
    let mut degree = vec![0u32; inst.m()];
    for_each_incidence(&inst, strategy, |i, _| degree[i] += 1);
    let scene = IncidenceScene {
        p: inst.modulus().get(),
        points: inst.points().to_vec(),
        lines: inst.lines().to_vec(),
        degree,
        incidences: count_with(&inst, strategy),
        strategy,
    };
    serde_json::to_string(&scene).map_err(|e| e.to_string())
}

/// Runs the grid cover on a random instance and normalizes every grid.
pub fn cover_scene(p: u64, m: u64, n: u64, seed: u64, desk: bool) -> Result<String, String> {
    let inst = build("random", p, 0, 0, m, n, seed)?;
    let params = if desk { CoverParams::desk() } else { CoverParams::standard() };
    let cert = grid_cover(&inst, &params).map_err(|e| e.to_string())?;
    let verified = verify_certificate(&inst, &cert).passed();
    let grids = cert
        .steps
        .iter()
        .map(|step| {
            let norm = normalize_grid(&step.grid, inst.lines()).map_err(|e| e.to_string())?;
            Ok(CoverGrid {
                remaining: step.remaining,
                p1: step.grid.p1,
                q1: step.grid.q1,
                g: step.grid.g.clone(),
                h: norm.h,
                x: norm.x,
                y: norm.y,
            })
        })
        .collect::<Result<Vec<_>, String>>()?;
    let stop = serde_json::to_value(cert.stop).map_err(|e| e.to_string())?;
    let scene = CoverScene {
        p: inst.modulus().get(),
        points: inst.points().to_vec(),
        dearth: cert.partition.d.clone(),
        excess: cert.partition.e.clone(),
        grids,
        leftover: cert.leftover,
        stop: stop.as_str().unwrap_or_default().to_string(),
        verified,
    };
    serde_json::to_string(&scene).map_err(|e| e.to_string())
}

/// `A + A` and `A * A` for a comma or space separated list of residues.
pub fn sum_product_scene(p: u64, a: &str) -> Result<String, String> {
    let modulus = drawable(p)?;
    let a = a
        .split(|ch: char| ch == ',' || ch.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<i64>().map(|v| modulus.scalar_i64(v)).map_err(|_| format!("bad element '{s}'")))
        .collect::<Result<Vec<_>, _>>()?;
    let image = |expr| arithmetic_image(expr, &a, &[], &[]).map_err(|e| e.to_string());
    let scene = SumProductScene {
        p: modulus.get(),
        sum: image(ArithExpr::SumSet)?,
        product: image(ArithExpr::ProductSet)?,
        a: {
            let mut a = a.clone();
            a.sort_unstable();
            a.dedup();
            a
        },
    };
    serde_json::to_string(&scene).map_err(|e| e.to_string())
}

#[wasm_bindgen(js_name = incidenceScene)]
#[allow(clippy::too_many_arguments)]
pub fn incidence_scene_js(
    family: &str,
    p: u32,
    a: u32,
    c: u32,
    m: u32,
    n: u32,
    seed: u32,
    engine: &str,
) -> Result<String, JsError> {
    incidence_scene(family, p.into(), a.into(), c.into(), m.into(), n.into(), seed.into(), engine)
        .map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = coverScene)]
pub fn cover_scene_js(p: u32, m: u32, n: u32, seed: u32, desk: bool) -> Result<String, JsError> {
    cover_scene(p.into(), m.into(), n.into(), seed.into(), desk).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = sumProductScene)]
pub fn sum_product_scene_js(p: u32, a: &str) -> Result<String, JsError> {
    sum_product_scene(p.into(), a).map_err(|e| JsError::new(&e))
}
