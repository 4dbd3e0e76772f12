//! Native SVG scatter plots with marginal histograms.
//!
//! Trials are binned on the plot grid; a marker's area is proportional to
//! the number of trials in its bin. Output is a pure function of the input,
//! so figures can be compared byte for byte.

use std::collections::BTreeMap;
use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 500.0;
/// Main panel `[left, top, right, bottom]`.
const PANEL: [f64; 4] = [150.0, 120.0, 620.0, 440.0];
/// Depth of the marginal histogram bands.
const BAND: f64 = 80.0;
const MARKER_BINS: usize = 40;
const HIST_BINS: usize = 24;

#[derive(Clone, Debug, PartialEq)]
pub struct Axis {
    pub label: String,
    pub log: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
    pub censored: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Plot {
    pub title: String,
    pub x: Axis,
    pub y: Axis,
    pub points: Vec<Point>,
    /// Labelled overlay curve in data coordinates.
    pub curve: Option<(String, Vec<(f64, f64)>)>,
}

struct Scale {
    log: bool,
    lo: f64,
    hi: f64,
}

impl Scale {
    fn fit(log: bool, values: impl Iterator<Item = f64>) -> Self {
        let t: Vec<f64> = values.filter_map(|v| transform(log, v)).collect();
        let (mut lo, mut hi) = t
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        if t.is_empty() {
            (lo, hi) = (0.0, 1.0);
        } else if log {
            lo = lo.floor();
            hi = hi.ceil();
        } else {
            let pad = 0.05 * (hi - lo);
            lo -= pad;
            hi += pad;
        }
        if hi - lo < 1e-12 {
            lo -= 0.5;
            hi += 0.5;
        }
        Self { log, lo, hi }
    }

    /// Position in `[0, 1]` of a data value, if it can be drawn.
    fn unit(&self, v: f64) -> Option<f64> {
        transform(self.log, v).map(|t| (t - self.lo) / (self.hi - self.lo))
    }

    fn ticks(&self) -> Vec<(f64, String)> {
        if self.log {
            let span = (self.hi - self.lo).round() as i64;
            let step = (span / 6 + 1).max(1);
            (self.lo.round() as i64..=self.hi.round() as i64)
                .filter(|k| (k - self.lo.round() as i64) % step == 0)
                .map(|k| ((k as f64 - self.lo) / (self.hi - self.lo), format!("1e{k}")))
                .collect()
        } else {
            (0..=4)
                .map(|i| {
                    let u = i as f64 / 4.0;
                    (u, format!("{:.3}", self.lo + u * (self.hi - self.lo)))
                })
                .collect()
        }
    }
}

fn transform(log: bool, v: f64) -> Option<f64> {
    match (log, v.is_finite()) {
        (_, false) => None,
        (true, _) if v <= 0.0 => None,
        (true, _) => Some(v.log10()),
        (false, _) => Some(v),
    }
}

fn bin(u: f64, n: usize) -> usize {
    ((u * n as f64) as usize).min(n - 1)
}

fn px(u: f64) -> f64 {
    PANEL[0] + u * (PANEL[2] - PANEL[0])
}

fn py(u: f64) -> f64 {
    PANEL[3] - u * (PANEL[3] - PANEL[1])
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn render(plot: &Plot) -> String {
    // axes span the overlay curve too, so it is never clipped away
    let curve = plot.curve.as_ref().map_or(&[][..], |(_, c)| c.as_slice());
    let sx = Scale::fit(plot.x.log, plot.points.iter().map(|p| p.x).chain(curve.iter().map(|c| c.0)));
    let sy = Scale::fit(plot.y.log, plot.points.iter().map(|p| p.y).chain(curve.iter().map(|c| c.1)));
    let drawable: Vec<(f64, f64, bool)> = plot
        .points
        .iter()
        .filter_map(|p| Some((sx.unit(p.x)?, sy.unit(p.y)?, p.censored)))
        .collect();

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="18" text-anchor="middle" font-size="13">{}</text>"#,
        WIDTH / 2.0,
        escape(&plot.title)
    );

    // marginal histograms: x above the panel, y to its left
    let mut hx = [0u64; HIST_BINS];
    let mut hy = [0u64; HIST_BINS];
    for &(u, v, _) in &drawable {
        hx[bin(u, HIST_BINS)] += 1;
        hy[bin(v, HIST_BINS)] += 1;
    }
    let peak = hx.iter().chain(&hy).copied().max().unwrap_or(0).max(1) as f64;
    let w = (PANEL[2] - PANEL[0]) / HIST_BINS as f64;
    let h = (PANEL[3] - PANEL[1]) / HIST_BINS as f64;
    let _ = writeln!(s, r##"<g fill="#9bb7d4" stroke="none">"##);
    for (i, &c) in hx.iter().enumerate().filter(|(_, &c)| c > 0) {
        let len = BAND * c as f64 / peak;
        let _ = writeln!(
            s,
            r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}"/>"#,
            PANEL[0] + i as f64 * w,
            PANEL[1] - 10.0 - len,
            w,
            len
        );
    }
    for (i, &c) in hy.iter().enumerate().filter(|(_, &c)| c > 0) {
        let len = BAND * c as f64 / peak;
        let _ = writeln!(
            s,
            r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}"/>"#,
            PANEL[0] - 60.0 - len,
            PANEL[3] - (i + 1) as f64 * h,
            len,
            h
        );
    }
    let _ = writeln!(s, "</g>");

    // panel, ticks and labels
    let _ = writeln!(
        s,
        r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
        PANEL[0],
        PANEL[1],
        PANEL[2] - PANEL[0],
        PANEL[3] - PANEL[1]
    );
    for (u, label) in sx.ticks() {
        let x = px(u);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{label}</text>"#,
            PANEL[3],
            PANEL[3] + 5.0,
            PANEL[3] + 18.0
        );
    }
    for (u, label) in sy.ticks() {
        let y = py(u);
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{label}</text>"#,
            PANEL[0] - 5.0,
            PANEL[0],
            PANEL[0] - 8.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        (PANEL[0] + PANEL[2]) / 2.0,
        PANEL[3] + 36.0,
        escape(&plot.x.label)
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" transform="rotate(-90 {:.2} {:.2})">{}</text>"#,
        PANEL[0] - 48.0,
        (PANEL[1] + PANEL[3]) / 2.0,
        PANEL[0] - 48.0,
        (PANEL[1] + PANEL[3]) / 2.0,
        escape(&plot.y.label)
    );

    // markers, area ∝ trials per bin; censored trials hollow
    let mut bins: BTreeMap<(usize, usize, bool), u64> = BTreeMap::new();
    for &(u, v, c) in &drawable {
        *bins.entry((bin(u, MARKER_BINS), bin(v, MARKER_BINS), c)).or_default() += 1;
    }
    let _ = writeln!(s, r##"<g stroke="#1f4e79" fill-opacity="0.6">"##);
    for ((i, j, censored), n) in &bins {
        let fill = if *censored { "none" } else { "#1f4e79" };
        let _ = writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{:.2}" r="{:.2}" fill="{fill}"/>"#,
            px((*i as f64 + 0.5) / MARKER_BINS as f64),
            py((*j as f64 + 0.5) / MARKER_BINS as f64),
            2.0 * (*n as f64).sqrt()
        );
    }
    let _ = writeln!(s, "</g>");

    if let Some((label, pts)) = &plot.curve {
        let path: Vec<String> = pts
            .iter()
            .filter_map(|&(x, y)| {
                let (u, v) = (sx.unit(x)?, sy.unit(y)?);
                ((0.0..=1.0).contains(&u) && (0.0..=1.0).contains(&v)).then(|| format!("{:.2},{:.2}", px(u), py(v)))
            })
            .collect();
        if path.len() >= 2 {
            let _ = writeln!(
                s,
                r##"<polyline points="{}" fill="none" stroke="#c0392b" stroke-width="1.5"/>"##,
                path.join(" ")
            );
        }
        let _ = writeln!(
            s,
            r##"<text x="{:.2}" y="{:.2}" text-anchor="end" fill="#c0392b">{}</text>"##,
            PANEL[2] - 6.0,
            PANEL[1] + 16.0,
            escape(label)
        );
    }

    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{} trials; marker area ∝ trials per bin</text>"#,
        WIDTH - 20.0,
        HEIGHT - 12.0,
        plot.points.len()
    );
    s.push_str("</svg>\n");
    s
}
