//! Standalone SVG charts.

use std::fmt::Write;

use dasim_core::egt::BasinReport;
use dasim_core::market::GameLog;

const W: f64 = 640.0;
const H: f64 = 360.0;
const LEFT: f64 = 56.0;
const RIGHT: f64 = 16.0;
const TOP: f64 = 16.0;
const BOTTOM: f64 = 40.0;

/// Transaction price against transaction index, with `p0` dashed and a
/// vertical rule at each day boundary.
pub fn emit_svg_price_series(log: &GameLog, p0: Option<f64>) -> String {
    let prices: Vec<(u32, f64)> = log.transactions().map(|t| (t.time.day, t.price)).collect();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in prices.iter().map(|p| p.1).chain(p0) {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() {
        lo = log.config.min_price;
        hi = log.config.max_price;
    }
    let pad = ((hi - lo) * 0.1).max(1.0);
    let (lo, hi) = (lo - pad, hi + pad);
    let n = prices.len().max(1) as f64;
    let x = |i: f64| LEFT + (W - LEFT - RIGHT) * (i + 0.5) / n;
    let y = |p: f64| TOP + (H - TOP - BOTTOM) * (hi - p) / (hi - lo);

    let mut s = String::new();
    header(&mut s, W, H);
    let (x0, x1, y0, y1) = (LEFT, W - RIGHT, TOP, H - BOTTOM);
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<path d="M{x0:.2},{y0:.2} L{x0:.2},{y1:.2} L{x1:.2},{y1:.2}" fill="none" stroke="black"/>"#
    );
    for k in 0..=4 {
        let p = lo + (hi - lo) * k as f64 / 4.0;
        let yy = y(p);
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="end">{p:.1}</text>"#,
            x0 - 6.0,
            yy + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">transaction</text>"#,
        (x0 + x1) / 2.0,
        H - 8.0
    );
    let _ = writeln!(
        s,
        r#"<text x="14" y="{:.2}" font-size="12" text-anchor="middle" transform="rotate(-90 14 {:.2})">price</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    );
    for i in 1..prices.len() {
        if prices[i].0 != prices[i - 1].0 {
            let xx = (x(i as f64 - 1.0) + x(i as f64)) / 2.0;
            let _ = writeln!(
                s,
                r##"<line x1="{xx:.2}" y1="{y0:.2}" x2="{xx:.2}" y2="{y1:.2}" stroke="#999999"/>"##
            );
        }
    }
    if let Some(p) = p0 {
        let yy = y(p);
        let _ = writeln!(
            s,
            r#"<line x1="{x0:.2}" y1="{yy:.2}" x2="{x1:.2}" y2="{yy:.2}" stroke="black" stroke-dasharray="6,4"/>"#
        );
    }
    if prices.len() > 1 {
        let pts: Vec<String> = prices
            .iter()
            .enumerate()
            .map(|(i, &(_, p))| format!("{:.2},{:.2}", x(i as f64), y(p)))
            .collect();
        let _ = writeln!(
            s,
            r##"<polyline points="{}" fill="none" stroke="#1f77b4"/>"##,
            pts.join(" ")
        );
    }
    for (i, &(_, p)) in prices.iter().enumerate() {
        let _ = writeln!(
            s,
            r##"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="#1f77b4"/>"##,
            x(i as f64),
            y(p)
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Replicator trajectories on the 2-simplex with attractors sized by basin.
/// Only meaningful for three strategies.
pub fn emit_svg_simplex(report: &BasinReport, labels: &[String]) -> String {
    let size = 480.0;
    let margin = 40.0;
    let side = size - 2.0 * margin;
    let height = side * 3f64.sqrt() / 2.0;
    // vertex 0 at the top, 1 bottom left, 2 bottom right
    let v = [
        (size / 2.0, margin),
        (margin, margin + height),
        (size - margin, margin + height),
    ];
    let at = |x: &[f64]| -> (f64, f64) {
        let px = x[0] * v[0].0 + x[1] * v[1].0 + x[2] * v[2].0;
        let py = x[0] * v[0].1 + x[1] * v[1].1 + x[2] * v[2].1;
        (px, py)
    };
    let total_h = margin * 2.0 + height;
    let mut s = String::new();
    header(&mut s, size, total_h);
    let _ = writeln!(
        s,
        r#"<rect x="0" y="0" width="{size}" height="{total_h:.2}" fill="white"/>"#
    );
    let _ = writeln!(
        s,
        r#"<polygon points="{:.2},{:.2} {:.2},{:.2} {:.2},{:.2}" fill="none" stroke="black"/>"#,
        v[0].0, v[0].1, v[1].0, v[1].1, v[2].0, v[2].1
    );
    let offsets = [(0.0, -10.0), (-6.0, 18.0), (6.0, 18.0)];
    for ((label, p), o) in labels.iter().zip(v).zip(offsets) {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-size="13" text-anchor="middle">{}</text>"#,
            p.0 + o.0,
            p.1 + o.1,
            escape(label)
        );
    }
    for flow in &report.flows {
        if flow.trajectory.len() < 2 {
            continue;
        }
        let pts: Vec<String> = flow
            .trajectory
            .iter()
            .map(|x| {
                let (px, py) = at(x);
                format!("{px:.2},{py:.2}")
            })
            .collect();
        let _ = writeln!(
            s,
            r##"<polyline points="{}" fill="none" stroke="#888888" stroke-width="0.6"/>"##,
            pts.join(" ")
        );
        let (sx, sy) = at(&flow.start);
        let _ = writeln!(s, r##"<circle cx="{sx:.2}" cy="{sy:.2}" r="1.2" fill="#888888"/>"##);
    }
    for a in &report.attractors {
        let (px, py) = at(&a.mixture);
        let r = 3.0 + 9.0 * a.basin.sqrt();
        let fill = if a.nash.is_nash { "black" } else { "white" };
        let _ = writeln!(
            s,
            r#"<circle cx="{px:.2}" cy="{py:.2}" r="{r:.2}" fill="{fill}" stroke="black"/>"#
        );
    }
    s.push_str("</svg>\n");
    s
}

fn header(s: &mut String, w: f64, h: f64) {
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.2} {h:.2}">"#
    );
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
