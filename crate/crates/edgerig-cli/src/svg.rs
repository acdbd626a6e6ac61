//! Scatter plot of normalized point deviations with the rigidity bands.

use std::f64::consts::PI;
use std::fmt::Write;

pub struct Scatter {
    pub title: String,
    pub eps: f64,
    pub k_max: usize,
    /// `(k, (mu(x_k) - k) / log k)`
    pub points: Vec<(f64, f64)>,
}

const W: f64 = 720.0;
const H: f64 = 420.0;
const PAD: f64 = 50.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

impl Scatter {
    pub fn render(&self) -> String {
        let edge = 1.0 / PI + self.eps;
        let y_max = self.points.iter().map(|p| p.1.abs()).fold(edge * 1.5, f64::max);
        let x_max = self.k_max.max(2) as f64;
        let sx = |k: f64| PAD + (k - 1.0) / (x_max - 1.0).max(1.0) * (W - 2.0 * PAD);
        let sy = |v: f64| H / 2.0 - v / y_max * (H / 2.0 - PAD);
        let mut s = String::new();
        let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
        let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
        let _ = writeln!(s, r#"<title>{}</title>"#, escape(&self.title));
        let _ = writeln!(s, r#"<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>"#);
        // band |deviation| <= 1/pi
        let (b_top, b_bot) = (sy(1.0 / PI), sy(-1.0 / PI));
        let _ = writeln!(
            s,
            r#"<path class="band" d="M {:.2} {:.2} L {:.2} {:.2} L {:.2} {:.2} L {:.2} {:.2} Z" fill="steelblue" fill-opacity="0.25" stroke="none"/>"#,
            sx(1.0), b_top, sx(x_max), b_top, sx(x_max), b_bot, sx(1.0), b_bot
        );
        for sign in [1.0, -1.0] {
            let y = sy(sign * edge);
            let _ = writeln!(
                s,
                r#"<path class="envelope" d="M {:.2} {y:.2} L {:.2} {y:.2}" stroke="darkorange" stroke-width="1.5" fill="none"/>"#,
                sx(1.0),
                sx(x_max)
            );
        }
        let _ = writeln!(s, r#"<line x1="{PAD}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black"/>"#, sy(0.0), W - PAD, sy(0.0));
        let _ = writeln!(s, r#"<line x1="{PAD}" y1="{PAD}" x2="{PAD}" y2="{:.2}" stroke="black"/>"#, H - PAD);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-size="12">k</text>"#, W - PAD + 8.0, sy(0.0) + 4.0);
        let _ = writeln!(s, r#"<text x="8" y="{:.2}" font-size="12">(mu(x_k)-k)/log k</text>"#, PAD - 20.0);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-size="11">1</text>"#, sx(1.0) - 3.0, H - PAD + 16.0);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" font-size="11">{}</text>"#, sx(x_max) - 8.0, H - PAD + 16.0, self.k_max);
        let _ = writeln!(s, r#"<g class="points" fill="black">"#);
        for &(k, v) in &self.points {
            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="2"/>"#, sx(k), sy(v));
        }
        let _ = writeln!(s, "</g>");
        let _ = writeln!(s, "</svg>");
        s
    }
}
