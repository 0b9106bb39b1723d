//! SVG 1.1 output for the planar net of a chain code.
//!
//! The plane's y axis points up, so the SVG is flipped vertically. Output is
//! byte-stable: element order follows the dual path and every element
//! writes its attributes in a fixed order.

use std::fmt::Write;

use crate::chaincode::{layout_squares, ChainCode};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RenderOptions {
    /// Pixels per unit; values below 1 are treated as 1.
    pub scale: u32,
    pub show_dual: bool,
    pub margin: u32,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions { scale: 32, show_dual: false, margin: 16 }
    }
}

const START_FILL: &str = "#9ecae1";
const FILL: &str = "#ffffff";
const OVERLAP_FILL: &str = "#e34a33";

/// One `<rect>` per square of the net in path order, the start square
/// filled distinctly, squares that repeat an earlier center filled as
/// overlaps, and shared edges drawn as thick lines.
pub fn render_svg(code: &ChainCode, opts: &RenderOptions) -> String {
    let scale = opts.scale.max(1);
    let net = layout_squares(code, scale);
    let s = f64::from(scale);
    let half = s / 2.0;
    let m = f64::from(opts.margin);

    let xs = net.squares.iter().map(|q| q.center.0);
    let ys = net.squares.iter().map(|q| q.center.1);
    let min_x = xs.clone().fold(f64::INFINITY, f64::min) - half;
    let max_x = xs.fold(f64::NEG_INFINITY, f64::max) + half;
    let min_y = ys.clone().fold(f64::INFINITY, f64::min) - half;
    let max_y = ys.fold(f64::NEG_INFINITY, f64::max) + half;
    let width = max_x - min_x + 2.0 * m;
    let height = max_y - min_y + 2.0 * m;
    let px = |x: f64| x - min_x + m;
    let py = |y: f64| max_y - y + m;

    let overlapping: Vec<bool> = {
        let mut v = vec![false; net.squares.len()];
        for &(_, j) in &net.overlaps {
            v[j] = true;
        }
        v
    };

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">",
        num(width),
        num(height),
        num(width),
        num(height)
    );
    let _ = writeln!(out, "<g stroke=\"#000000\" stroke-width=\"1\">");
    for (i, q) in net.squares.iter().enumerate() {
        let fill = if overlapping[i] {
            OVERLAP_FILL
        } else if i == 0 {
            START_FILL
        } else {
            FILL
        };
        let _ = writeln!(
            out,
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>",
            num(px(q.center.0 - half)),
            num(py(q.center.1 + half)),
            num(s),
            num(s),
            fill
        );
    }
    out.push_str("</g>\n");
    let _ = writeln!(out, "<g stroke=\"#000000\" stroke-width=\"3\">");
    for &((ax, ay), (bx, by)) in &net.attachments {
        let _ = writeln!(
            out,
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>",
            num(px(ax)),
            num(py(ay)),
            num(px(bx)),
            num(py(by))
        );
    }
    out.push_str("</g>\n");
    if opts.show_dual {
        let pts: Vec<String> = net
            .squares
            .iter()
            .map(|q| format!("{},{}", num(px(q.center.0)), num(py(q.center.1))))
            .collect();
        let _ = writeln!(
            out,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"1\"/>",
            pts.join(" ")
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Shortest decimal form; integral values print without a fraction.
fn num(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v}")
}
