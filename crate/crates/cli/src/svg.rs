//! Minimal self-contained SVG 1.1 line and scatter plots.

use std::fmt::Write as _;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_L: f64 = 78.0;
const MARGIN_R: f64 = 24.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 56.0;
const PALETTE: [&str; 6] = [
    "#1f5fa8", "#c0392b", "#2e8b57", "#8e44ad", "#d68910", "#555555",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Style {
    Line,
    Dashed,
    Markers,
}

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub style: Style,
    pub points: Vec<(f64, f64)>,
    /// Palette slot; defaults to the series position.
    pub color: Option<usize>,
}

impl Series {
    pub fn new(label: impl Into<String>, style: Style, points: Vec<(f64, f64)>) -> Self {
        Self {
            label: label.into(),
            style,
            points,
            color: None,
        }
    }

    pub fn colored(mut self, slot: usize) -> Self {
        self.color = Some(slot);
        self
    }
}

#[derive(Debug, Clone, Default)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    /// Plots `log10 y`; non-positive values are dropped.
    pub log_y: bool,
    /// Fixed y window; otherwise fitted to the data.
    pub y_range: Option<(f64, f64)>,
    pub series: Vec<Series>,
}

impl Plot {
    pub fn new(title: &str, x_label: &str, y_label: &str) -> Self {
        Self {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            ..Default::default()
        }
    }

    pub fn with(mut self, s: Series) -> Self {
        self.series.push(s);
        self
    }

    fn transformed(&self) -> Vec<Vec<(f64, f64)>> {
        self.series
            .iter()
            .map(|s| {
                s.points
                    .iter()
                    .filter(|(x, y)| x.is_finite() && y.is_finite() && (!self.log_y || *y > 0.0))
                    .map(|&(x, y)| (x, if self.log_y { y.log10() } else { y }))
                    .collect()
            })
            .collect()
    }

    pub fn render(&self) -> String {
        let data = self.transformed();
        let all = data.iter().flatten();
        let (mut x0, mut x1, mut y0, mut y1) = (
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
        );
        for &(x, y) in all {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if let Some((a, b)) = self.y_range {
            (y0, y1) = if self.log_y {
                (a.log10(), b.log10())
            } else {
                (a, b)
            };
        }
        if !x0.is_finite() {
            (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
        }
        let pad = |a: f64, b: f64| {
            if b - a > 0.0 {
                (a, b)
            } else {
                (a - 0.5, b + 0.5)
            }
        };
        let (x0, x1) = pad(x0, x1);
        let (y0, y1) = pad(y0, y1);
        let (pw, ph) = (WIDTH - MARGIN_L - MARGIN_R, HEIGHT - MARGIN_T - MARGIN_B);
        let sx = |x: f64| MARGIN_L + (x - x0) / (x1 - x0) * pw;
        let sy = |y: f64| MARGIN_T + (1.0 - (y.clamp(y0, y1) - y0) / (y1 - y0)) * ph;

        let mut out = String::new();
        writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
        writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="Helvetica, Arial, sans-serif" font-size="12">"#
        )
        .unwrap();
        writeln!(
            out,
            r##"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>"##
        )
        .unwrap();
        writeln!(
            out,
            r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
            WIDTH / 2.0,
            esc(&self.title)
        )
        .unwrap();
        writeln!(
            out,
            r##"<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{pw}" height="{ph}" fill="none" stroke="#333333"/>"##
        )
        .unwrap();
        for t in ticks(x0, x1) {
            let x = sx(t);
            writeln!(
                out,
                r##"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="#333333"/>"##,
                MARGIN_T + ph,
                MARGIN_T + ph + 5.0
            )
            .unwrap();
            writeln!(
                out,
                r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
                MARGIN_T + ph + 18.0,
                tick_label(t, false)
            )
            .unwrap();
        }
        for t in ticks(y0, y1) {
            let y = sy(t);
            writeln!(
                out,
                r##"<line x1="{:.2}" y1="{y:.2}" x2="{MARGIN_L}" y2="{y:.2}" stroke="#333333"/>"##,
                MARGIN_L - 5.0
            )
            .unwrap();
            writeln!(
                out,
                r##"<line x1="{MARGIN_L}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#e4e4e4"/>"##,
                MARGIN_L + pw
            )
            .unwrap();
            writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
                MARGIN_L - 8.0,
                y + 4.0,
                tick_label(t, self.log_y)
            )
            .unwrap();
        }
        writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            MARGIN_L + pw / 2.0,
            HEIGHT - 14.0,
            esc(&self.x_label)
        )
        .unwrap();
        writeln!(
            out,
            r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
            MARGIN_T + ph / 2.0,
            MARGIN_T + ph / 2.0,
            esc(&self.y_label)
        )
        .unwrap();

        let mut legend = 0;
        for (i, (s, pts)) in self.series.iter().zip(&data).enumerate() {
            let color = PALETTE[s.color.unwrap_or(i) % PALETTE.len()];
            match s.style {
                Style::Line | Style::Dashed => {
                    let dash = if s.style == Style::Dashed {
                        r#" stroke-dasharray="6 4""#
                    } else {
                        ""
                    };
                    for run in clip_runs(pts, y0, y1).iter().filter(|r| r.len() > 1) {
                        let coords: Vec<String> = run
                            .iter()
                            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                            .collect();
                        writeln!(
                            out,
                            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.6"{dash}/>"#,
                            coords.join(" ")
                        )
                        .unwrap();
                    }
                }
                Style::Markers => {
                    for &(x, y) in pts.iter().filter(|(_, y)| *y >= y0 && *y <= y1) {
                        writeln!(
                            out,
                            r#"<circle cx="{:.2}" cy="{:.2}" r="3.2" fill="{color}"/>"#,
                            sx(x),
                            sy(y)
                        )
                        .unwrap();
                    }
                }
            }
            if s.label.is_empty() {
                continue;
            }
            let ly = MARGIN_T + 16.0 + 16.0 * legend as f64;
            legend += 1;
            let lx = MARGIN_L + pw - 170.0;
            writeln!(
                out,
                r#"<rect x="{lx:.2}" y="{:.2}" width="12" height="4" fill="{color}"/>"#,
                ly - 6.0
            )
            .unwrap();
            writeln!(
                out,
                r#"<text x="{:.2}" y="{ly:.2}">{}</text>"#,
                lx + 18.0,
                esc(&s.label)
            )
            .unwrap();
        }
        out.push_str("</svg>\n");
        out
    }
}

/// Splits a polyline into runs inside `y0 <= y <= y1`, cutting segments
/// exactly at the window edges.
fn clip_runs(pts: &[(f64, f64)], y0: f64, y1: f64) -> Vec<Vec<(f64, f64)>> {
    let inside = |y: f64| y >= y0 && y <= y1;
    let mut runs: Vec<Vec<(f64, f64)>> = Vec::new();
    let mut cur: Vec<(f64, f64)> = Vec::new();
    for (i, &(x, y)) in pts.iter().enumerate() {
        if i > 0 {
            let (xa, ya) = pts[i - 1];
            // Parameters where the segment meets each edge, in order.
            let mut cuts: Vec<f64> = [y0, y1]
                .iter()
                .filter(|&&e| (ya - e) * (y - e) < 0.0)
                .map(|&e| (e - ya) / (y - ya))
                .collect();
            cuts.sort_by(f64::total_cmp);
            for t in cuts {
                let p = (xa + t * (x - xa), ya + t * (y - ya));
                cur.push(p);
                let mid = ya + (t + 1e-9) * (y - ya);
                if !inside(mid) {
                    runs.push(std::mem::take(&mut cur));
                }
            }
        }
        if inside(y) {
            cur.push((x, y));
        }
    }
    runs.push(cur);
    runs
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Round tick positions covering `[a, b]`.
fn ticks(a: f64, b: f64) -> Vec<f64> {
    let raw = (b - a) / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (a / step).ceil() as i64;
    let last = (b / step).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

fn tick_label(t: f64, log: bool) -> String {
    let t = if t.abs() < 1e-12 { 0.0 } else { t };
    if log {
        format!("1e{}", t.round() as i64)
    } else if t.abs() >= 1e4 || (t != 0.0 && t.abs() < 1e-2) {
        format!("{t:.1e}")
    } else {
        let s = format!("{t:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_owned()
    }
}
