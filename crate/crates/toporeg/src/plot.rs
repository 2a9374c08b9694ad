//! Standalone SVG renderings: embedding scatter plots, persistence diagrams
//! and loss curves.
//!
//! Output is plain text built from the inputs alone, so identical inputs give
//! identical files. The first line after the XML prolog is a generator
//! comment carrying the crate version.

use std::fmt::Write;

use toporeg_core::geometry::Point;
use toporeg_core::{PersistenceDiagram, TraceRow};

const WIDTH: f64 = 480.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 48.0;
const PALETTE: [&str; 8] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"];

/// Maps data coordinates onto the plot area.
struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn fit(xs: impl Iterator<Item = f64> + Clone, ys: impl Iterator<Item = f64> + Clone) -> Frame {
        Frame { x: padded_range(xs), y: padded_range(ys) }
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN - (y - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - 2.0 * MARGIN)
    }
}

fn padded_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    let pad = if hi > lo { 0.05 * (hi - lo) } else { 0.5 };
    (lo - pad, hi + pad)
}

/// Rounds pixel positions so the text stays short and stable.
fn r(v: f64) -> String {
    format!("{:.2}", v)
}

fn header(title: &str) -> String {
    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(s, "<!-- toporeg {} -->", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(s, "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">");
    let _ = writeln!(s, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">{}</text>",
        WIDTH / 2.0,
        escape(title)
    );
    s
}

fn axes(s: &mut String, frame: &Frame, xlabel: &str, ylabel: &str) {
    let _ = writeln!(
        s,
        "<rect x=\"{m}\" y=\"{m}\" width=\"{w}\" height=\"{h}\" fill=\"none\" stroke=\"#444\"/>",
        m = MARGIN,
        w = WIDTH - 2.0 * MARGIN,
        h = HEIGHT - 2.0 * MARGIN
    );
    for (k, (value, px)) in [(frame.x.0, MARGIN), (frame.x.1, WIDTH - MARGIN)].into_iter().enumerate() {
        let anchor = if k == 0 { "start" } else { "end" };
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"{anchor}\" font-family=\"sans-serif\" font-size=\"10\">{}</text>",
            r(px),
            r(HEIGHT - MARGIN + 14.0),
            tick(value)
        );
    }
    for (value, py) in [(frame.y.0, HEIGHT - MARGIN), (frame.y.1, MARGIN + 10.0)] {
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">{}</text>",
            r(MARGIN - 4.0),
            r(py),
            tick(value)
        );
    }
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">{}</text>",
        WIDTH / 2.0,
        HEIGHT - 12.0,
        escape(xlabel)
    );
    let _ = writeln!(
        s,
        "<text x=\"14\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 14 {})\">{}</text>",
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(ylabel)
    );
}

fn tick(v: f64) -> String {
    format!("{v:.3}")
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Scatter plot of an embedding, colored by `labels` when given.
pub fn scatter_svg(title: &str, points: &[Point], labels: Option<&[usize]>) -> String {
    let frame = Frame::fit(points.iter().map(|p| p[0]), points.iter().map(|p| p[1]));
    let mut s = header(title);
    axes(&mut s, &frame, "x", "y");
    for (k, p) in points.iter().enumerate() {
        let color = labels.map_or(PALETTE[0], |l| PALETTE[l[k] % PALETTE.len()]);
        let _ = writeln!(s, "<circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"{color}\" fill-opacity=\"0.8\"/>", r(frame.px(p[0])), r(frame.py(p[1])));
    }
    s.push_str("</svg>\n");
    s
}

/// Birth-death diagram. Essential classes are drawn as triangles on a line
/// above the largest finite death.
pub fn diagram_svg(title: &str, diagrams: &[PersistenceDiagram]) -> String {
    let finite = || diagrams.iter().flat_map(|d| d.pairs.iter()).filter(|p| p.death.is_finite());
    let top = finite().map(|p| p.death).fold(0.0f64, f64::max).max(diagrams.iter().flat_map(|d| d.pairs.iter()).map(|p| p.birth).fold(0.0, f64::max));
    let inf_line = if top > 0.0 { top * 1.1 } else { 1.0 };
    let frame = Frame::fit([0.0, inf_line].into_iter(), [0.0, inf_line].into_iter());
    let mut s = header(title);
    axes(&mut s, &frame, "birth", "death");
    let _ = writeln!(
        s,
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>",
        r(frame.px(0.0)),
        r(frame.py(0.0)),
        r(frame.px(inf_line)),
        r(frame.py(inf_line))
    );
    let _ = writeln!(
        s,
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#bbb\"/>",
        r(frame.px(0.0)),
        r(frame.py(inf_line)),
        r(frame.px(inf_line)),
        r(frame.py(inf_line))
    );
    for d in diagrams {
        let color = PALETTE[d.dimension % PALETTE.len()];
        for p in &d.pairs {
            let (x, y) = (frame.px(p.birth), frame.py(if p.death.is_finite() { p.death } else { inf_line }));
            if p.death.is_finite() {
                let _ = writeln!(s, "<circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"{color}\"/>", r(x), r(y));
            } else {
                let _ = writeln!(
                    s,
                    "<polygon points=\"{},{} {},{} {},{}\" fill=\"{color}\"/>",
                    r(x),
                    r(y - 4.0),
                    r(x - 4.0),
                    r(y + 3.0),
                    r(x + 4.0),
                    r(y + 3.0)
                );
            }
        }
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" fill=\"{color}\">H{}</text>",
            r(WIDTH - MARGIN - 30.0),
            r(HEIGHT - MARGIN - 10.0 - 14.0 * d.dimension as f64),
            d.dimension
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Loss curves of a trace: embedding, topological and total loss against
/// epoch.
pub fn trace_svg(title: &str, rows: &[TraceRow]) -> String {
    type Series = (&'static str, fn(&TraceRow) -> f64);
    let series: [Series; 3] = [("emb_loss", |r| r.emb_loss), ("topo_loss", |r| r.topo_loss), ("total_loss", |r| r.total_loss)];
    let frame = Frame::fit(rows.iter().map(|r| r.epoch as f64), rows.iter().flat_map(|r| [r.emb_loss, r.topo_loss, r.total_loss]));
    let mut s = header(title);
    axes(&mut s, &frame, "epoch", "loss");
    for (k, (name, get)) in series.iter().enumerate() {
        let color = PALETTE[k];
        let path: Vec<String> = rows
            .iter()
            .enumerate()
            .map(|(i, row)| format!("{}{} {}", if i == 0 { 'M' } else { 'L' }, r(frame.px(row.epoch as f64)), r(frame.py(get(row)))))
            .collect();
        if !path.is_empty() {
            let _ = writeln!(s, "<path d=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>", path.join(" "));
        }
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" fill=\"{color}\">{name}</text>",
            r(MARGIN + 8.0),
            r(MARGIN + 16.0 + 14.0 * k as f64)
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use toporeg_core::PersistencePair;

    #[test]
    fn scatter_has_one_marker_per_point() {
        let svg = scatter_svg("e", &[[0.0, 0.0], [1.0, 2.0], [3.0, -1.0]], Some(&[0, 1, 1]));
        assert_eq!(svg.matches("<circle").count(), 3);
        assert_eq!(svg.matches(PALETTE[1]).count(), 2);
        assert!(svg.ends_with("</svg>\n"));
    }

    #[test]
    fn essential_pairs_are_triangles() {
        let pair = |death: f64, ds: Option<usize>| PersistencePair { dimension: 0, birth: 0.0, death, birth_simplex: 0, death_simplex: ds };
        let d = PersistenceDiagram { dimension: 0, pairs: vec![pair(f64::INFINITY, None), pair(0.25, Some(3))] };
        let svg = diagram_svg("d", &[d]);
        assert_eq!(svg.matches("<polygon").count(), 1);
        assert_eq!(svg.matches("<circle").count(), 1);
    }

    #[test]
    fn titles_are_escaped() {
        assert!(trace_svg("a<b", &[]).contains("a&lt;b"));
    }
}
