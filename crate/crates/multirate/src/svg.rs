//! Minimal self-contained SVG line and band plots.

use std::fmt::Write;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Line {
    pub label: String,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub dashed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Band {
    pub xs: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub opacity: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub lines: Vec<Line>,
    pub bands: Vec<Band>,
    /// Vertical markers `(x, label)`.
    pub markers: Vec<(f64, String)>,
}

impl Plot {
    pub fn new(title: impl Into<String>, x_label: impl Into<String>, y_label: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            ..Self::default()
        }
    }

    pub fn line(mut self, label: impl Into<String>, xs: &[f64], ys: &[f64]) -> Self {
        self.lines.push(Line {
            label: label.into(),
            xs: xs.to_vec(),
            ys: ys.to_vec(),
            dashed: false,
        });
        self
    }

    pub fn dashed(mut self, label: impl Into<String>, xs: &[f64], ys: &[f64]) -> Self {
        self.lines.push(Line {
            label: label.into(),
            xs: xs.to_vec(),
            ys: ys.to_vec(),
            dashed: true,
        });
        self
    }

    pub fn band(mut self, xs: &[f64], lower: &[f64], upper: &[f64], opacity: f64) -> Self {
        self.bands.push(Band {
            xs: xs.to_vec(),
            lower: lower.to_vec(),
            upper: upper.to_vec(),
            opacity,
        });
        self
    }

    pub fn marker(mut self, x: f64, label: impl Into<String>) -> Self {
        self.markers.push((x, label.into()));
        self
    }

    fn bounds(&self) -> (f64, f64, f64, f64) {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for l in &self.lines {
            for (x, y) in l.xs.iter().zip(&l.ys) {
                if x.is_finite() && y.is_finite() {
                    xs.push(*x);
                    ys.push(*y);
                }
            }
        }
        for b in &self.bands {
            xs.extend(b.xs.iter().copied().filter(|v| v.is_finite()));
            ys.extend(b.lower.iter().chain(&b.upper).copied().filter(|v| v.is_finite()));
        }
        let lo = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let (mut x0, mut x1, mut y0, mut y1) = (lo(&xs), hi(&xs), lo(&ys), hi(&ys));
        if !(x0.is_finite() && x1.is_finite()) {
            (x0, x1) = (0.0, 1.0);
        }
        if !(y0.is_finite() && y1.is_finite()) {
            (y0, y1) = (0.0, 1.0);
        }
        if x1 <= x0 {
            x1 = x0 + 1.0;
        }
        if y1 <= y0 {
            y0 -= 0.5;
            y1 += 0.5;
        }
        let pad = 0.05 * (y1 - y0);
        (x0, x1, y0 - pad, y1 + pad)
    }

    /// Draws the panel into `out` inside the box `(left, top, width, height)`.
    fn draw(&self, out: &mut String, left: f64, top: f64, width: f64, height: f64) {
        let (ml, mr, mt, mb) = (56.0, 12.0, 26.0, 40.0);
        let (pw, ph) = (width - ml - mr, height - mt - mb);
        let (x0, x1, y0, y1) = self.bounds();
        let sx = |x: f64| left + ml + (x - x0) / (x1 - x0) * pw;
        let sy = |y: f64| top + mt + (y1 - y) / (y1 - y0) * ph;

        let _ = writeln!(
            out,
            r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="#444"/>"##,
            left + ml,
            top + mt,
            pw,
            ph
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="13" text-anchor="middle">{}</text>"#,
            left + ml + pw / 2.0,
            top + 17.0,
            escape(&self.title)
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="middle">{}</text>"#,
            left + ml + pw / 2.0,
            top + height - 6.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="middle" transform="rotate(-90 {:.2} {:.2})">{}</text>"#,
            left + 14.0,
            top + mt + ph / 2.0,
            left + 14.0,
            top + mt + ph / 2.0,
            escape(&self.y_label)
        );
        for k in 0..=4 {
            let fx = x0 + (x1 - x0) * k as f64 / 4.0;
            let fy = y0 + (y1 - y0) * k as f64 / 4.0;
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}" font-size="9" text-anchor="middle">{}</text>"#,
                sx(fx),
                top + mt + ph + 13.0,
                tick(fx)
            );
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}" font-size="9" text-anchor="end">{}</text>"#,
                left + ml - 4.0,
                sy(fy) + 3.0,
                tick(fy)
            );
        }
        for b in &self.bands {
            let mut pts = String::new();
            for (x, y) in b.xs.iter().zip(&b.upper) {
                let _ = write!(pts, "{:.2},{:.2} ", sx(*x), sy(*y));
            }
            for (x, y) in b.xs.iter().zip(&b.lower).rev() {
                let _ = write!(pts, "{:.2},{:.2} ", sx(*x), sy(*y));
            }
            let _ = writeln!(
                out,
                r##"<polygon points="{}" fill="#1f77b4" fill-opacity="{:.2}" stroke="none"/>"##,
                pts.trim_end(),
                b.opacity
            );
        }
        for (i, l) in self.lines.iter().enumerate() {
            let colour = PALETTE[i % PALETTE.len()];
            // break the polyline at missing values
            let mut segments: Vec<Vec<(f64, f64)>> = vec![Vec::new()];
            for (x, y) in l.xs.iter().zip(&l.ys) {
                if x.is_finite() && y.is_finite() {
                    segments.last_mut().expect("non-empty").push((sx(*x), sy(*y)));
                } else if !segments.last().expect("non-empty").is_empty() {
                    segments.push(Vec::new());
                }
            }
            let dash = if l.dashed { r#" stroke-dasharray="5,3""# } else { "" };
            for seg in segments.iter().filter(|s| !s.is_empty()) {
                let pts: Vec<String> = seg.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
                let _ = writeln!(
                    out,
                    r#"<polyline points="{}" fill="none" stroke="{colour}" stroke-width="1.4"{dash}/>"#,
                    pts.join(" ")
                );
            }
            if !l.label.is_empty() {
                let ly = top + mt + 12.0 + 12.0 * i as f64;
                let lx = left + ml + pw - 130.0;
                let _ = writeln!(
                    out,
                    r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{colour}" stroke-width="2"{dash}/>"#,
                    lx,
                    ly - 3.0,
                    lx + 16.0,
                    ly - 3.0
                );
                let _ = writeln!(
                    out,
                    r#"<text x="{:.2}" y="{:.2}" font-size="9">{}</text>"#,
                    lx + 20.0,
                    ly,
                    escape(&l.label)
                );
            }
        }
        for (x, label) in &self.markers {
            if *x >= x0 && *x <= x1 {
                let _ = writeln!(
                    out,
                    r##"<line x1="{0:.2}" y1="{1:.2}" x2="{0:.2}" y2="{2:.2}" stroke="#000" stroke-dasharray="2,2"/>"##,
                    sx(*x),
                    top + mt,
                    top + mt + ph
                );
                let _ = writeln!(
                    out,
                    r#"<text x="{:.2}" y="{:.2}" font-size="9">{}</text>"#,
                    sx(*x) + 3.0,
                    top + mt + ph - 4.0,
                    escape(label)
                );
            }
        }
    }

    pub fn render(&self, width: f64, height: f64) -> String {
        render_grid(std::slice::from_ref(self), 1, width, height)
    }
}

/// Panels laid out row-major in a `cols`-wide grid, each `width × height`.
pub fn render_grid(plots: &[Plot], cols: usize, width: f64, height: f64) -> String {
    let cols = cols.max(1);
    let rows = plots.len().div_ceil(cols).max(1);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.0}" height="{:.0}" viewBox="0 0 {:.0} {:.0}" font-family="sans-serif">"#,
        width * cols as f64,
        height * rows as f64,
        width * cols as f64,
        height * rows as f64
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (i, p) in plots.iter().enumerate() {
        let (r, c) = (i / cols, i % cols);
        p.draw(&mut out, c as f64 * width, r as f64 * height, width, height);
    }
    out.push_str("</svg>\n");
    out
}

fn tick(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e4 || v.abs() < 1e-2) {
        format!("{v:.1e}")
    } else {
        format!("{v:.3}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_deterministically() {
        let xs = [0.0, 0.25, 0.5];
        let p = Plot::new("t", "x", "y")
            .band(&xs, &[0.0, 0.1, 0.0], &[1.0, 1.2, 1.0], 0.2)
            .line("mean", &xs, &[0.5, f64::NAN, 0.6])
            .marker(0.25, "true");
        let a = p.render(400.0, 300.0);
        assert_eq!(a, p.render(400.0, 300.0));
        assert!(a.starts_with("<svg"));
        assert!(a.contains("<polygon"));
        assert_eq!(render_grid(&[p.clone(), p], 3, 200.0, 150.0).matches("<rect x=").count(), 2);
    }
}
