//! Minimal SVG 1.1 writer: polylines, markers and text inside plot frames.

use std::fmt::Write;

/// Coordinates are written with three decimals so output is stable and small.
fn num(v: f64) -> String {
    let s = format!("{v:.3}");
    if s == "-0.000" {
        "0.000".to_string()
    } else {
        s
    }
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// Stroke style of a line.
#[derive(Debug, Clone, Copy)]
pub struct Stroke<'a> {
    pub color: &'a str,
    pub width: f64,
    pub dashed: bool,
}

impl<'a> Stroke<'a> {
    pub fn solid(color: &'a str, width: f64) -> Self {
        Stroke {
            color,
            width,
            dashed: false,
        }
    }

    pub fn dashed(color: &'a str, width: f64) -> Self {
        Stroke {
            color,
            width,
            dashed: true,
        }
    }

    fn attrs(&self) -> String {
        let mut s = format!(
            "fill=\"none\" stroke=\"{}\" stroke-width=\"{}\"",
            escape(self.color),
            num(self.width)
        );
        if self.dashed {
            s.push_str(" stroke-dasharray=\"4 3\"");
        }
        s
    }
}

/// An SVG document of fixed pixel size. Elements are appended in paint order.
#[derive(Debug, Clone)]
pub struct Document {
    width: f64,
    height: f64,
    body: String,
}

impl Document {
    pub fn new(width: f64, height: f64) -> Self {
        Document {
            width,
            height,
            body: String::new(),
        }
    }

    pub fn polyline(&mut self, points: &[(f64, f64)], stroke: Stroke) {
        if points.len() < 2 {
            return;
        }
        let pts: Vec<String> = points
            .iter()
            .map(|&(x, y)| format!("{},{}", num(x), num(y)))
            .collect();
        let _ = writeln!(
            self.body,
            "<polyline points=\"{}\" {}/>",
            pts.join(" "),
            stroke.attrs()
        );
    }

    pub fn circle(&mut self, (x, y): (f64, f64), r: f64, fill: &str) {
        let _ = writeln!(
            self.body,
            "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{}\" stroke=\"black\" stroke-width=\"0.5\"/>",
            num(x),
            num(y),
            num(r),
            escape(fill)
        );
    }

    /// Square marker of half-size `r` centred on the point.
    pub fn square(&mut self, (x, y): (f64, f64), r: f64, fill: &str) {
        let _ = writeln!(
            self.body,
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\" stroke=\"black\" stroke-width=\"0.5\"/>",
            num(x - r),
            num(y - r),
            num(2.0 * r),
            num(2.0 * r),
            escape(fill)
        );
    }

    pub fn rect(&mut self, (x, y): (f64, f64), (w, h): (f64, f64), stroke: Stroke) {
        let _ = writeln!(
            self.body,
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" {}/>",
            num(x),
            num(y),
            num(w),
            num(h),
            stroke.attrs()
        );
    }

    /// Text anchored by `anchor` (`start`, `middle` or `end`).
    pub fn text(&mut self, (x, y): (f64, f64), size: f64, anchor: &str, text: &str) {
        let _ = writeln!(
            self.body,
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"{}\" text-anchor=\"{}\">{}</text>",
            num(x),
            num(y),
            num(size),
            anchor,
            escape(text)
        );
    }

    pub fn finish(&self) -> String {
        let mut out = String::new();
        out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n");
        out.push_str(
            "<!DOCTYPE svg PUBLIC \"-//W3C//DTD SVG 1.1//EN\" \
             \"http://www.w3.org/Graphics/SVG/1.1/DTD/svg11.dtd\">\n",
        );
        let _ = writeln!(
            out,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">",
            w = num(self.width),
            h = num(self.height)
        );
        let _ = writeln!(
            out,
            "<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"white\"/>",
            num(self.width),
            num(self.height)
        );
        out.push_str(&self.body);
        out.push_str("</svg>\n");
        out
    }
}

/// A plot area mapping data ranges onto a pixel rectangle, y pointing up.
#[derive(Debug, Clone, Copy)]
pub struct Frame {
    pub left: f64,
    pub top: f64,
    pub width: f64,
    pub height: f64,
    pub x: (f64, f64),
    pub y: (f64, f64),
}

impl Frame {
    pub fn map(&self, (x, y): (f64, f64)) -> (f64, f64) {
        let u = (x - self.x.0) / (self.x.1 - self.x.0);
        let v = (y - self.y.0) / (self.y.1 - self.y.0);
        (
            self.left + u * self.width,
            self.top + (1.0 - v) * self.height,
        )
    }

    pub fn contains(&self, (x, y): (f64, f64)) -> bool {
        let (xl, xh) = (self.x.0.min(self.x.1), self.x.0.max(self.x.1));
        let (yl, yh) = (self.y.0.min(self.y.1), self.y.0.max(self.y.1));
        x >= xl && x <= xh && y >= yl && y <= yh
    }

    /// Draws `points` in data units, split wherever they leave the frame or
    /// jump by more than `max_jump` in either coordinate (wrapped angles).
    pub fn polyline(
        &self,
        doc: &mut Document,
        points: &[(f64, f64)],
        max_jump: f64,
        stroke: Stroke,
    ) {
        let mut run: Vec<(f64, f64)> = Vec::new();
        let mut prev: Option<(f64, f64)> = None;
        for &p in points {
            let inside = self.contains(p) && p.0.is_finite() && p.1.is_finite();
            let jump =
                prev.is_some_and(|q| (p.0 - q.0).abs() > max_jump || (p.1 - q.1).abs() > max_jump);
            if !inside || jump {
                doc.polyline(&run, stroke);
                run.clear();
            }
            if inside {
                run.push(self.map(p));
            }
            prev = Some(p);
        }
        doc.polyline(&run, stroke);
    }

    /// Box, end-point tick labels and axis titles.
    pub fn axes(&self, doc: &mut Document, x_title: &str, y_title: &str, title: &str) {
        doc.rect(
            (self.left, self.top),
            (self.width, self.height),
            Stroke::solid("black", 1.0),
        );
        let bottom = self.top + self.height;
        let right = self.left + self.width;
        doc.text((self.left, bottom + 14.0), 11.0, "start", &tick(self.x.0));
        doc.text((right, bottom + 14.0), 11.0, "end", &tick(self.x.1));
        doc.text((self.left - 4.0, bottom), 11.0, "end", &tick(self.y.0));
        doc.text(
            (self.left - 4.0, self.top + 10.0),
            11.0,
            "end",
            &tick(self.y.1),
        );
        doc.text(
            (self.left + self.width / 2.0, bottom + 28.0),
            12.0,
            "middle",
            x_title,
        );
        doc.text(
            (self.left - 4.0, self.top + self.height / 2.0),
            12.0,
            "end",
            y_title,
        );
        doc.text(
            (self.left + self.width / 2.0, self.top - 8.0),
            13.0,
            "middle",
            title,
        );
    }
}

fn tick(v: f64) -> String {
    let s = format!("{v:.2}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// Colour of level `k` out of `n`, from dark blue to orange.
pub fn ramp(k: usize, n: usize) -> String {
    let t = if n <= 1 {
        0.0
    } else {
        k as f64 / (n - 1) as f64
    };
    let lerp = |a: f64, b: f64| (a + t * (b - a)).round() as u8;
    format!(
        "#{:02x}{:02x}{:02x}",
        lerp(30.0, 230.0),
        lerp(60.0, 120.0),
        lerp(150.0, 20.0)
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame() -> Frame {
        Frame {
            left: 10.0,
            top: 20.0,
            width: 100.0,
            height: 50.0,
            x: (0.0, 2.0),
            y: (-1.0, 1.0),
        }
    }

    #[test]
    fn frame_maps_corners_with_y_up() {
        let f = frame();
        assert_eq!(f.map((0.0, -1.0)), (10.0, 70.0));
        assert_eq!(f.map((2.0, 1.0)), (110.0, 20.0));
    }

    #[test]
    fn polylines_split_on_jumps_and_exits() {
        let f = frame();
        let mut doc = Document::new(200.0, 100.0);
        let pts = [
            (0.1, 0.0),
            (0.2, 0.1),
            (1.8, 0.2),
            (1.9, 0.3),
            (1.95, 5.0),
            (1.9, 0.4),
        ];
        f.polyline(&mut doc, &pts, 1.0, Stroke::solid("black", 1.0));
        // (0.1..0.2), (1.8..1.9); the lone point after the exit is dropped
        assert_eq!(doc.body.matches("<polyline").count(), 2);
    }

    #[test]
    fn text_is_escaped() {
        let mut doc = Document::new(10.0, 10.0);
        doc.text((0.0, 0.0), 10.0, "start", "a<b & \"c\"");
        assert!(doc.body.contains("a&lt;b &amp; &quot;c&quot;"));
    }

    #[test]
    fn document_is_well_formed_svg11() {
        let mut doc = Document::new(120.0, 80.0);
        let f = frame();
        f.axes(&mut doc, "x", "y", "t <1>");
        doc.circle((5.0, 5.0), 2.0, "red");
        doc.square((8.0, 8.0), 2.0, "blue");
        doc.polyline(&[(0.0, 0.0), (1.0, -0.0)], Stroke::dashed("#123456", 0.5));
        let svg = doc.finish();
        let tree = roxmltree::Document::parse_with_options(
            &svg,
            roxmltree::ParsingOptions {
                allow_dtd: true,
                ..Default::default()
            },
        )
        .unwrap();
        let root = tree.root_element();
        assert_eq!(root.tag_name().name(), "svg");
        assert_eq!(
            root.tag_name().namespace(),
            Some("http://www.w3.org/2000/svg")
        );
        assert_eq!(root.attribute("version"), Some("1.1"));
        assert!(!svg.contains("-0.000"));
    }

    #[test]
    fn ramp_spans_the_palette() {
        assert_eq!(ramp(0, 5), "#1e3c96");
        assert_eq!(ramp(4, 5), "#e67814");
        assert_eq!(ramp(0, 1), ramp(0, 5));
    }
}
