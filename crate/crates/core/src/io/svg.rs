//! Minimal standalone SVG line/marker plots.

use std::fmt::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Marker {
    Dot,
    Bullet,
    Star,
}

enum Style {
    Line,
    Markers(Marker),
}

struct Series {
    label: String,
    color: String,
    style: Style,
    points: Vec<(f64, f64)>,
}

pub struct Plot {
    title: String,
    x_label: String,
    y_label: String,
    series: Vec<Series>,
}

const W: f64 = 760.0;
const H: f64 = 460.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;

impl Plot {
    pub fn new(title: &str, x_label: &str, y_label: &str) -> Self {
        Plot {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            series: Vec::new(),
        }
    }

    pub fn line(&mut self, label: &str, color: &str, points: Vec<(f64, f64)>) {
        self.push(label, color, Style::Line, points);
    }

    pub fn markers(&mut self, label: &str, color: &str, marker: Marker, points: Vec<(f64, f64)>) {
        self.push(label, color, Style::Markers(marker), points);
    }

    fn push(&mut self, label: &str, color: &str, style: Style, points: Vec<(f64, f64)>) {
        let points = points.into_iter().filter(|(x, y)| x.is_finite() && y.is_finite()).collect();
        self.series.push(Series {
            label: label.into(),
            color: color.into(),
            style,
            points,
        });
    }

    fn bounds(&self) -> (f64, f64, f64, f64) {
        let pts = self.series.iter().flat_map(|s| &s.points);
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for &(x, y) in pts {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if !x0.is_finite() {
            return (0.0, 1.0, 0.0, 1.0);
        }
        if x1 <= x0 {
            x1 = x0 + 1.0;
        }
        if y1 <= y0 {
            y1 = y0 + 1.0;
        }
        let pad = 0.05 * (y1 - y0);
        (x0, x1, y0 - pad, y1 + pad)
    }

    pub fn render(&self) -> String {
        let (x0, x1, y0, y1) = self.bounds();
        let pw = W - LEFT - RIGHT;
        let ph = H - TOP - BOTTOM;
        let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
        let sy = |y: f64| TOP + (y1 - y) / (y1 - y0) * ph;
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
        let _ = writeln!(s, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#, LEFT + pw / 2.0, esc(&self.title));
        let _ = writeln!(s, r##"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="#444"/>"##);
        for i in 0..=5 {
            let t = i as f64 / 5.0;
            let (xv, yv) = (x0 + t * (x1 - x0), y0 + t * (y1 - y0));
            let (px, py) = (sx(xv), sy(yv));
            let _ = writeln!(
                s,
                r##"<line x1="{px:.1}" y1="{TOP}" x2="{px:.1}" y2="{}" stroke="#ddd"/><text x="{px:.1}" y="{}" text-anchor="middle">{}</text>"##,
                TOP + ph,
                TOP + ph + 16.0,
                tick(xv)
            );
            let _ = writeln!(
                s,
                r##"<line x1="{LEFT}" y1="{py:.1}" x2="{}" y2="{py:.1}" stroke="#ddd"/><text x="{}" y="{:.1}" text-anchor="end">{}</text>"##,
                LEFT + pw,
                LEFT - 6.0,
                py + 4.0,
                tick(yv)
            );
        }
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, LEFT + pw / 2.0, H - 12.0, esc(&self.x_label));
        let _ = writeln!(
            s,
            r#"<text x="16" y="{0}" text-anchor="middle" transform="rotate(-90 16 {0})">{1}</text>"#,
            TOP + ph / 2.0,
            esc(&self.y_label)
        );
        for (i, series) in self.series.iter().enumerate() {
            let c = &series.color;
            match series.style {
                Style::Line => {
                    let d: Vec<String> = series.points.iter().map(|&(x, y)| format!("{:.1},{:.1}", sx(x), sy(y))).collect();
                    let _ = writeln!(s, r#"<polyline fill="none" stroke="{c}" stroke-width="1.5" points="{}"/>"#, d.join(" "));
                }
                Style::Markers(m) => {
                    for &(x, y) in &series.points {
                        let _ = writeln!(s, "{}", marker(m, sx(x), sy(y), c));
                    }
                }
            }
            let ly = TOP + 14.0 + 18.0 * i as f64;
            let lx = W - RIGHT + 12.0;
            match series.style {
                Style::Line => {
                    let _ = writeln!(s, r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{c}" stroke-width="2"/>"#, lx + 18.0);
                }
                Style::Markers(m) => {
                    let _ = writeln!(s, "{}", marker(m, lx + 9.0, ly, c));
                }
            }
            let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, lx + 24.0, ly + 4.0, esc(&series.label));
        }
        s.push_str("</svg>\n");
        s
    }
}

fn marker(m: Marker, x: f64, y: f64, c: &str) -> String {
    match m {
        Marker::Dot => format!(r#"<circle cx="{x:.1}" cy="{y:.1}" r="1.8" fill="{c}"/>"#),
        Marker::Bullet => format!(r#"<circle cx="{x:.1}" cy="{y:.1}" r="3.2" fill="{c}"/>"#),
        Marker::Star => {
            let pts: Vec<String> = (0..10)
                .map(|i| {
                    let r = if i % 2 == 0 { 4.5 } else { 1.9 };
                    let a = std::f64::consts::PI * (i as f64 / 5.0 - 0.5);
                    format!("{:.1},{:.1}", x + r * a.cos(), y + r * a.sin())
                })
                .collect();
            format!(r#"<polygon points="{}" fill="{c}"/>"#, pts.join(" "))
        }
    }
}

fn tick(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e4 || v.abs() < 1e-2) {
        format!("{v:.1e}")
    } else {
        format!("{v:.2}")
    }
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_well_formed_document() {
        let mut p = Plot::new("t <1>", "x", "y");
        p.line("a", "black", vec![(0.0, 1.0), (1.0, 2.0), (2.0, f64::NEG_INFINITY)]);
        p.markers("b", "red", Marker::Star, vec![(0.5, 1.5)]);
        let s = p.render();
        assert!(s.starts_with("<svg") && s.trim_end().ends_with("</svg>"));
        assert!(s.contains("t &lt;1&gt;"));
        assert!(!s.contains("NaN") && !s.contains("inf"));
    }
}
