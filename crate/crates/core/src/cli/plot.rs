//! Self-contained SVG violin plots of per-cell metrics.

use std::fmt::Write as _;

use crate::evaluation::{Metric, MetricTable};
use crate::metamodels::{FeatureSetting, RegressorKind};
use crate::stats::{quantile_sorted, sample_sd, sorted};
use crate::{Error, Result};

const PANEL_WIDTH: f64 = 320.0;
const PANEL_HEIGHT: f64 = 300.0;
const MARGIN: f64 = 50.0;
const GRID: usize = 64;

/// Silverman's rule of thumb, `0.9 min(sd, IQR / 1.34) n^(-1/5)`, falling
/// back to whichever spread is positive.
pub fn silverman_bandwidth(values: &[f64]) -> f64 {
    let s = sorted(values);
    let sd = sample_sd(&s);
    let iqr = quantile_sorted(&s, 0.75) - quantile_sorted(&s, 0.25);
    let spread = match (sd > 0.0, iqr > 0.0) {
        (true, true) => sd.min(iqr / 1.34),
        (true, false) => sd,
        (false, true) => iqr / 1.34,
        (false, false) => 0.0,
    };
    0.9 * spread * (values.len() as f64).powf(-0.2)
}

fn gaussian_kde(values: &[f64], bw: f64, at: f64) -> f64 {
    let norm = 1.0 / (values.len() as f64 * bw * (2.0 * std::f64::consts::PI).sqrt());
    values.iter().map(|v| (-0.5 * ((at - v) / bw).powi(2)).exp()).sum::<f64>() * norm
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// One panel per inducer, one violin per setting; the white bar marks the median.
pub fn violin_svg(table: &MetricTable, metric: Metric) -> Result<String> {
    let value = |r: &crate::evaluation::MetricRow| match metric {
        Metric::Rmse => Some(r.rmse),
        Metric::R2 => r.r2,
    };
    let all: Vec<f64> = table.rows.iter().filter_map(value).collect();
    if all.is_empty() {
        return Err(Error::EmptyData);
    }
    let mut inducers: Vec<RegressorKind> = Vec::new();
    let mut settings: Vec<FeatureSetting> = Vec::new();
    for r in &table.rows {
        if !inducers.contains(&r.inducer) {
            inducers.push(r.inducer);
        }
        if !settings.contains(&r.setting) {
            settings.push(r.setting);
        }
    }
    let lo = all.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = all.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = if hi > lo { (lo, hi) } else { (lo - 0.5, hi + 0.5) };
    let pad = 0.05 * (hi - lo);
    let (lo, hi) = (lo - pad, hi + pad);
    let y_of = |v: f64| MARGIN + PANEL_HEIGHT * (1.0 - (v - lo) / (hi - lo));
    let width = MARGIN + inducers.len() as f64 * (PANEL_WIDTH + MARGIN);
    let height = PANEL_HEIGHT + 2.0 * MARGIN + 20.0;
    let palette = ["#4c72b0", "#dd8452", "#55a868", "#c44e52"];

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif" font-size="12">"##
    );
    let _ = writeln!(svg, r##"<rect width="100%" height="100%" fill="white"/>"##);
    let label = match metric {
        Metric::Rmse => "RMSE",
        Metric::R2 => "R²",
    };
    let _ = writeln!(svg, r##"<text x="{:.1}" y="20" text-anchor="middle" font-size="14">{label}</text>"##, width / 2.0);
    for (p, inducer) in inducers.iter().enumerate() {
        let x0 = MARGIN + p as f64 * (PANEL_WIDTH + MARGIN);
        let _ = writeln!(
            svg,
            r##"<g class="panel"><rect x="{x0:.1}" y="{MARGIN:.1}" width="{PANEL_WIDTH:.1}" height="{PANEL_HEIGHT:.1}" fill="none" stroke="#888"/>"##
        );
        let _ = writeln!(
            svg,
            r##"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"##,
            x0 + PANEL_WIDTH / 2.0,
            MARGIN - 8.0,
            escape(&inducer.as_str().to_uppercase())
        );
        for tick in 0..=4 {
            let v = lo + (hi - lo) * tick as f64 / 4.0;
            let _ = writeln!(
                svg,
                r##"<text x="{:.1}" y="{:.1}" text-anchor="end" font-size="10">{v:.3}</text>"##,
                x0 - 4.0,
                y_of(v) + 3.0
            );
        }
        let slot = PANEL_WIDTH / settings.len() as f64;
        for (s, setting) in settings.iter().enumerate() {
            let values: Vec<f64> = table
                .rows
                .iter()
                .filter(|r| r.inducer == *inducer && r.setting == *setting)
                .filter_map(value)
                .collect();
            let cx = x0 + slot * (s as f64 + 0.5);
            let _ = writeln!(
                svg,
                r##"<text x="{cx:.1}" y="{:.1}" text-anchor="middle">{}</text>"##,
                MARGIN + PANEL_HEIGHT + 16.0,
                escape(setting.as_str())
            );
            if values.is_empty() {
                continue;
            }
            let s_sorted = sorted(&values);
            let (vmin, vmax) = (s_sorted[0], s_sorted[s_sorted.len() - 1]);
            let half = 0.4 * slot;
            let bw = silverman_bandwidth(&values);
            let mut path = String::new();
            if bw > 0.0 && vmax > vmin {
                let grid: Vec<f64> = (0..=GRID).map(|g| vmin + (vmax - vmin) * g as f64 / GRID as f64).collect();
                let dens: Vec<f64> = grid.iter().map(|&v| gaussian_kde(&values, bw, v)).collect();
                let peak = dens.iter().copied().fold(0.0, f64::max).max(f64::MIN_POSITIVE);
                for (g, (&v, &d)) in grid.iter().zip(&dens).enumerate() {
                    let cmd = if g == 0 { 'M' } else { 'L' };
                    let _ = write!(path, "{cmd}{:.2},{:.2} ", cx + half * d / peak, y_of(v));
                }
                for (&v, &d) in grid.iter().zip(&dens).rev() {
                    let _ = write!(path, "L{:.2},{:.2} ", cx - half * d / peak, y_of(v));
                }
                path.push('Z');
            } else {
                let y = y_of(vmin);
                let _ = write!(path, "M{:.2},{:.2} L{:.2},{:.2} Z", cx - half, y, cx + half, y);
            }
            let _ = writeln!(
                svg,
                r##"<path class="violin" d="{path}" fill="{}" fill-opacity="0.7" stroke="#333"/>"##,
                palette[s % palette.len()]
            );
            let median = quantile_sorted(&s_sorted, 0.5);
            let _ = writeln!(
                svg,
                r##"<line class="median" x1="{:.2}" x2="{:.2}" y1="{:.2}" y2="{:.2}" stroke="white" stroke-width="3"/>"##,
                cx - half * 0.3,
                cx + half * 0.3,
                y_of(median),
                y_of(median)
            );
        }
        svg.push_str("</g>\n");
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn silverman_known_value() {
        // sd = sqrt(2.5), iqr = 2 -> min(1.581, 1.493) = 1.493
        let bw = silverman_bandwidth(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        let expected = 0.9 * (2.0 / 1.34) * 5f64.powf(-0.2);
        assert!((bw - expected).abs() < 1e-12);
    }

    #[test]
    fn kde_integrates_to_one() {
        let v = [0.0, 0.3, 1.0];
        let bw = 0.4;
        let step = 0.001;
        let total: f64 = (0..10_000).map(|i| gaussian_kde(&v, bw, -4.0 + i as f64 * step) * step).sum();
        assert!((total - 1.0).abs() < 1e-3);
    }
}
