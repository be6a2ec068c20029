//! Self-contained SVG line plots.

use std::fmt::Write;

const WIDTH: f64 = 900.0;
const HEIGHT: f64 = 540.0;
const LEFT: f64 = 90.0;
const RIGHT: f64 = 200.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 70.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct ErrorBars {
    pub label: String,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub sigmas: Vec<f64>,
}

#[derive(Debug, Clone, Default)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    pub bars: Option<ErrorBars>,
    /// Vertical marker lines `(x, label)`.
    pub markers: Vec<(f64, String)>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Tick positions on a 1-2-5 ladder covering `[lo, hi]`.
pub fn ticks(lo: f64, hi: f64, target: usize) -> (Vec<f64>, f64) {
    let span = (hi - lo).max(f64::MIN_POSITIVE);
    let raw = span / target.max(1) as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    ((first..=last).map(|k| k as f64 * step).collect(), step)
}

fn tick_label(v: f64, step: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if (1e-3..1e5).contains(&a) {
        let digits = (-step.log10().floor()).max(0.0) as usize;
        format!("{v:.digits$}")
    } else {
        let digits = ((a.log10().floor() - step.log10().floor()).max(0.0) as usize).min(6);
        format!("{v:.digits$e}")
    }
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-300 {
        let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.05 };
        return (lo - pad, hi + pad);
    }
    (lo, hi)
}

impl Plot {
    pub fn render(&self) -> String {
        let mut xs: Vec<f64> = self.series.iter().flat_map(|s| s.xs.iter().copied()).collect();
        let mut ys: Vec<f64> = self.series.iter().flat_map(|s| s.ys.iter().copied()).collect();
        if let Some(b) = &self.bars {
            xs.extend(&b.xs);
            ys.extend(b.ys.iter().zip(&b.sigmas).flat_map(|(y, s)| [y - s, y + s]));
        }
        xs.extend(self.markers.iter().map(|m| m.0));
        let (x0, x1) = range(xs.into_iter());
        let (y0, y1) = range(ys.into_iter());
        let pad = 0.04 * (y1 - y0);
        let (y0, y1) = (y0 - pad, y1 + pad);

        let pw = WIDTH - LEFT - RIGHT;
        let ph = HEIGHT - TOP - BOTTOM;
        let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
        let sy = |y: f64| TOP + (1.0 - (y - y0) / (y1 - y0)) * ph;

        let mut out = String::new();
        let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        let _ = writeln!(out, r#"<text x="{}" y="28" text-anchor="middle" font-size="16">{}</text>"#, LEFT + pw / 2.0, escape(&self.title));

        let (xt, xstep) = ticks(x0, x1, 6);
        for x in xt {
            let px = sx(x);
            let _ = writeln!(out, r##"<line x1="{px:.2}" y1="{TOP}" x2="{px:.2}" y2="{:.2}" stroke="#e6e6e6"/>"##, TOP + ph);
            let _ = writeln!(out, r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, TOP + ph + 18.0, tick_label(x, xstep));
        }
        let (yt, ystep) = ticks(y0, y1, 6);
        for y in yt {
            let py = sy(y);
            let _ = writeln!(out, r##"<line x1="{LEFT}" y1="{py:.2}" x2="{:.2}" y2="{py:.2}" stroke="#e6e6e6"/>"##, LEFT + pw);
            let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, LEFT - 6.0, py + 4.0, tick_label(y, ystep));
        }
        let _ = writeln!(out, r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#);
        let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, LEFT + pw / 2.0, HEIGHT - 20.0, escape(&self.x_label));
        let _ = writeln!(
            out,
            r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">{}</text>"#,
            TOP + ph / 2.0,
            TOP + ph / 2.0,
            escape(&self.y_label)
        );

        for (i, s) in self.series.iter().enumerate() {
            let colour = PALETTE[i % PALETTE.len()];
            let mut path = String::new();
            for (x, y) in s.xs.iter().zip(&s.ys).filter(|(x, y)| x.is_finite() && y.is_finite()) {
                let _ = write!(path, "{:.2},{:.2} ", sx(*x), sy(*y));
            }
            let _ = writeln!(out, r#"<polyline fill="none" stroke="{colour}" stroke-width="1.2" points="{}"/>"#, path.trim_end());
            let ly = TOP + 10.0 + 18.0 * i as f64;
            let lx = LEFT + pw + 12.0;
            let _ = writeln!(out, r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{colour}" stroke-width="2"/>"#, lx + 20.0);
            let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}">{}</text>"#, lx + 26.0, ly + 4.0, escape(&s.label));
        }

        if let Some(b) = &self.bars {
            let _ = writeln!(out, r#"<g stroke="black" fill="black">"#);
            for ((x, y), s) in b.xs.iter().zip(&b.ys).zip(&b.sigmas) {
                let px = sx(*x);
                let _ = writeln!(out, r#"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}"/>"#, sy(y - s), sy(y + s));
                let _ = writeln!(out, r#"<circle cx="{px:.2}" cy="{:.2}" r="2.5"/>"#, sy(*y));
            }
            let _ = writeln!(out, "</g>");
            let ly = TOP + 10.0 + 18.0 * self.series.len() as f64;
            let _ = writeln!(out, r#"<circle cx="{:.2}" cy="{ly:.2}" r="3"/>"#, LEFT + pw + 22.0);
            let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}">{}</text>"#, LEFT + pw + 38.0, ly + 4.0, escape(&b.label));
        }

        for (x, label) in &self.markers {
            let px = sx(*x);
            let _ = writeln!(out, r##"<line x1="{px:.2}" y1="{TOP}" x2="{px:.2}" y2="{:.2}" stroke="#555" stroke-dasharray="5,4"/>"##, TOP + ph);
            let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}">{}</text>"#, px + 4.0, TOP + 14.0, escape(label));
        }
        out.push_str("</svg>\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ticks_follow_ladder() {
        let (t, step) = ticks(0.0, 1.0, 5);
        assert_eq!(step, 0.2);
        assert_eq!(t.len(), 6);
        let (t, step) = ticks(0.0, 8.5e-5, 6);
        assert!((step - 2e-5).abs() < 1e-20);
        assert_eq!(t.len(), 5);
    }

    #[test]
    fn labels_are_escaped() {
        let plot = Plot {
            title: "a < b & c".into(),
            series: vec![Series { label: "p".into(), xs: vec![0.0, 1.0], ys: vec![0.0, 1.0] }],
            ..Plot::default()
        };
        let svg = plot.render();
        assert!(svg.contains("a &lt; b &amp; c"));
        assert!(svg.starts_with("<?xml"));
    }
}
