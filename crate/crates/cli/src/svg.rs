//! Minimal SVG emitter: rectangles, circles and text in data coordinates,
//! no scripting, deterministic output.

use std::fmt::Write as _;

pub struct Document {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
    body: String,
}

impl Document {
    /// Canvas covering the data ranges; the y axis points upward.
    pub fn new(x_range: (f64, f64), y_range: (f64, f64)) -> Self {
        Self {
            x_min: x_range.0,
            x_max: x_range.1,
            y_min: y_range.0,
            y_max: y_range.1,
            body: String::new(),
        }
    }

    fn fy(&self, y: f64) -> f64 {
        // SVG y grows downward
        self.y_max + self.y_min - y
    }

    pub fn rect(&mut self, x: f64, y_lo: f64, w: f64, y_hi: f64, fill: &str) {
        let _ = writeln!(
            self.body,
            r#"  <rect x="{:.6}" y="{:.6}" width="{:.6}" height="{:.6}" fill="{fill}"/>"#,
            x,
            self.fy(y_hi),
            w,
            (y_hi - y_lo).max(0.0),
        );
    }

    pub fn circle(&mut self, x: f64, y: f64, r: f64, fill: &str) {
        let _ = writeln!(
            self.body,
            r#"  <circle cx="{:.6}" cy="{:.6}" r="{:.6}" fill="{fill}"/>"#,
            x,
            self.fy(y),
            r
        );
    }

    pub fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, width: f64, stroke: &str) {
        let _ = writeln!(
            self.body,
            r#"  <line x1="{:.6}" y1="{:.6}" x2="{:.6}" y2="{:.6}" stroke="{stroke}" stroke-width="{:.6}"/>"#,
            x1,
            self.fy(y1),
            x2,
            self.fy(y2),
            width
        );
    }

    pub fn render(&self) -> String {
        let pad_x = 0.03 * (self.x_max - self.x_min).max(1e-12);
        let pad_y = 0.03 * (self.y_max - self.y_min).max(1e-12);
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{:.6} {:.6} {:.6} {:.6}\">\n{}</svg>\n",
            self.x_min - pad_x,
            self.y_min - pad_y,
            (self.x_max - self.x_min) + 2.0 * pad_x,
            (self.y_max - self.y_min) + 2.0 * pad_y,
            self.body
        )
    }
}
