//! Least-squares fits on log-log data.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::harness::sweep::SweepRecord;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    /// Coefficient of determination; 1 when the data has no spread in `y`.
    pub r2: f64,
    pub n: usize,
}

/// Fits `ln y = slope ln x + intercept`.
pub fn fit_exponent(data: &[(f64, f64)]) -> Result<FitResult> {
    if data.len() < 2 {
        return Err(Error::InsufficientData(data.len()));
    }
    if let Some(&bad) = data.iter().flat_map(|(x, y)| [x, y]).find(|v| !(**v > 0.0) || !v.is_finite()) {
        return Err(Error::NonPositiveValue(bad));
    }
    let pts: Vec<(f64, f64)> = data.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateInput("all x values are equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = pts.iter().map(|p| (p.1 - slope * p.0 - intercept).powi(2)).sum();
    let r2 = if syy == 0.0 { 1.0 } else { 1.0 - sse / syy };
    Ok(FitResult {
        slope,
        intercept,
        r2,
        n: pts.len(),
    })
}

/// Pairs `(x_field, y_field)` from the records that have both, then fits.
pub fn fit_records(records: &[SweepRecord], x_field: &str, y_field: &str) -> Result<(FitResult, Vec<(f64, f64)>)> {
    for f in [x_field, y_field] {
        if !KNOWN.contains(&f) {
            return Err(Error::InvalidParameter(format!("unknown field '{f}'")));
        }
    }
    let data: Vec<(f64, f64)> = records
        .iter()
        .filter_map(|r| Some((r.field(x_field)?, r.field(y_field)?)))
        .collect();
    Ok((fit_exponent(&data)?, data))
}

const KNOWN: [&str; 13] = [
    "p", "m", "n", "a", "b", "I", "E", "k", "bound_table1", "bound_comb", "bound_vinh", "ratio_main", "mn",
];

/// Log-log scatter of `data` with the fitted line.
pub fn fit_svg(data: &[(f64, f64)], fit: &FitResult, x_label: &str, y_label: &str) -> String {
    let (w, h, pad) = (480.0, 360.0, 48.0);
    let logs: Vec<(f64, f64)> = data.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let span = |it: &mut dyn Iterator<Item = f64>| {
        let v: Vec<f64> = it.collect();
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if hi > lo { (lo, hi) } else { (lo - 1.0, lo + 1.0) }
    };
    let (x0, x1) = span(&mut logs.iter().map(|p| p.0));
    let (y0, y1) = span(&mut logs.iter().map(|p| p.1).chain([fit.slope * x0 + fit.intercept, fit.slope * x1 + fit.intercept]));
    let sx = |v: f64| pad + (v - x0) / (x1 - x0) * (w - 2.0 * pad);
    let sy = |v: f64| h - pad - (v - y0) / (y1 - y0) * (h - 2.0 * pad);

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<path d="M{pad} {pad} V{} H{}" fill="none" stroke="black"/>"#,
        h - pad,
        w - pad
    );
    let _ = writeln!(
        s,
        r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="crimson"/>"#,
        sx(x0),
        sy(fit.slope * x0 + fit.intercept),
        sx(x1),
        sy(fit.slope * x1 + fit.intercept)
    );
    for &(lx, ly) in &logs {
        let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="steelblue"/>"#, sx(lx), sy(ly));
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">ln {x_label}</text>"#,
        w / 2.0,
        h - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text x="14" y="{}" font-size="12" transform="rotate(-90 14 {})" text-anchor="middle">ln {y_label}</text>"#,
        h / 2.0,
        h / 2.0
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="12">slope {:.4}, r2 {:.4}, n {}</text>"#,
        pad + 8.0,
        pad - 12.0,
        fit.slope,
        fit.r2,
        fit.n
    );
    s.push_str("</svg>\n");
    s
}
