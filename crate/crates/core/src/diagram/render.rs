//! DOT and SVG output.

use std::fmt::Write;

use super::{Diagram, Generator, LayeredForm};
use crate::types::Ty;

// ---------------------------------------------------------------------------
// DOT
// ---------------------------------------------------------------------------

struct Dot {
    out: String,
    next: usize,
}

/// Where a wire currently comes from: a node and an optional port label.
#[derive(Clone)]
struct Source {
    node: String,
    object: String,
}

impl Dot {
    fn node(&mut self, indent: &str, attrs: &str) -> String {
        let id = format!("n{}", self.next);
        self.next += 1;
        let _ = writeln!(self.out, "{indent}{id} [{attrs}];");
        id
    }

    fn edge(&mut self, indent: &str, from: &Source, to: &str) {
        let _ = writeln!(self.out, "{indent}{} -> {to} [label=\"{}\"];", from.node, escape(&from.object));
    }

    fn cluster(&mut self, indent: &str, attrs: &str) -> String {
        let id = self.next;
        self.next += 1;
        let _ = writeln!(self.out, "{indent}subgraph cluster_{id} {{");
        let _ = writeln!(self.out, "{indent}  {attrs}");
        format!("{indent}  ")
    }

    fn close(&mut self, indent: &str) {
        let _ = writeln!(self.out, "{}}}", &indent[..indent.len() - 2]);
    }

    /// Draws `form` with its inputs fed by `wires`, returning the outputs.
    fn form(&mut self, form: &LayeredForm, mut wires: Vec<Source>, indent: &str) -> Vec<Source> {
        for layer in &form.layers {
            let off = layer.left.len();
            let din = layer.generator.dom().len();
            let ins: Vec<Source> = wires[off..off + din].to_vec();
            let cod = layer.generator.cod();
            let outs = match &layer.generator {
                Generator::Box { name, fillings, .. } => {
                    let id = self.node(indent, &format!("label=\"{}\", shape=box", escape(name)));
                    for s in &ins {
                        self.edge(indent, s, &id);
                    }
                    for (k, f) in fillings.iter().enumerate() {
                        let inner = self.cluster(indent, &format!("label=\"{} hole {k}\"; style=solid;", escape(name)));
                        let srcs = self.boundary(&f.dom, &inner);
                        let outs = self.form(f, srcs, &inner);
                        self.sink(&outs, &inner);
                        self.close(&inner);
                    }
                    sources(&id, &cod)
                }
                Generator::Spider { .. } | Generator::Cup { .. } | Generator::Cap { .. } => {
                    let id = self.node(indent, "label=\"\", shape=point");
                    for s in &ins {
                        self.edge(indent, s, &id);
                    }
                    sources(&id, &cod)
                }
                Generator::Swap { .. } => vec![ins[1].clone(), ins[0].clone()],
                Generator::Cut { inner } => {
                    let body = self.cluster(indent, "label=\"cut\"; style=\"rounded,dashed\";");
                    let outs = self.form(inner, ins, &body);
                    self.close(&body);
                    outs
                }
            };
            wires.splice(off..off + din, outs);
        }
        wires
    }

    fn boundary(&mut self, ty: &Ty, indent: &str) -> Vec<Source> {
        ty.0.iter()
            .map(|o| Source { node: self.node(indent, "label=\"\", shape=none, width=0, height=0"), object: o.clone() })
            .collect()
    }

    fn sink(&mut self, wires: &[Source], indent: &str) {
        for w in wires {
            let id = self.node(indent, "label=\"\", shape=none, width=0, height=0");
            self.edge(indent, w, &id);
        }
    }
}

fn sources(node: &str, cod: &Ty) -> Vec<Source> {
    cod.0.iter().map(|o| Source { node: node.to_string(), object: o.clone() }).collect()
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz source: boxes are nodes, wires are edges labelled by their
/// object, cuts and holes are clusters.
pub fn to_dot(d: &Diagram) -> String {
    let mut dot = Dot { out: String::from("digraph diagram {\n  rankdir=TB;\n"), next: 0 };
    let form = LayeredForm::of(d);
    let inputs = dot.boundary(&form.dom, "  ");
    let outs = dot.form(&form, inputs, "  ");
    dot.sink(&outs, "  ");
    dot.out.push_str("}\n");
    dot.out
}

// ---------------------------------------------------------------------------
// SVG
// ---------------------------------------------------------------------------

const ROW: f64 = 30.0;
const GAP: f64 = 20.0;
const BOX_W: f64 = 60.0;
const PAD: f64 = 12.0;

/// A laid-out piece of diagram in local coordinates, wires entering on the
/// left and leaving on the right.
struct Block {
    w: f64,
    h: f64,
    ins: Vec<f64>,
    outs: Vec<f64>,
    svg: String,
}

fn fmt(x: f64) -> String {
    format!("{x:.1}")
}

fn line(svg: &mut String, x1: f64, y1: f64, x2: f64, y2: f64) {
    let _ = writeln!(svg, r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#, fmt(x1), fmt(y1), fmt(x2), fmt(y2));
}

fn spread(n: usize, h: f64) -> Vec<f64> {
    (0..n).map(|i| h * (i as f64 + 0.5) / n as f64).collect()
}

fn text_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn generator_block(g: &Generator) -> Block {
    let (din, dout) = (g.dom().len(), g.cod().len());
    let rows = din.max(dout).max(1) as f64;
    match g {
        Generator::Box { name, fillings, .. } => {
            let inner: Vec<Block> = fillings.iter().map(layout).collect();
            let w = inner.iter().map(|b| b.w + 2.0 * PAD).fold(BOX_W, f64::max);
            let fill_h: f64 = inner.iter().map(|b| b.h + PAD).sum();
            let h = (rows * ROW).max(fill_h + ROW);
            let mut svg = String::new();
            let _ = writeln!(svg, r#"<rect x="0" y="0" width="{}" height="{}" fill="white" stroke="black"/>"#, fmt(w), fmt(h));
            let _ = writeln!(svg, r#"<text x="{}" y="16" text-anchor="middle" font-size="12">{}</text>"#, fmt(w / 2.0), text_escape(name));
            let mut y = ROW;
            for b in inner {
                let x = (w - b.w) / 2.0;
                let _ = writeln!(
                    svg,
                    r#"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="gray" stroke-dasharray="3,2"/>"#,
                    fmt(x - 4.0),
                    fmt(y - 4.0),
                    fmt(b.w + 8.0),
                    fmt(b.h + 8.0)
                );
                let _ = writeln!(svg, r#"<g transform="translate({},{})">{}</g>"#, fmt(x), fmt(y), b.svg);
                y += b.h + PAD;
            }
            Block { w, h, ins: spread(din, h), outs: spread(dout, h), svg }
        }
        Generator::Spider { .. } | Generator::Cup { .. } | Generator::Cap { .. } => {
            let (w, h) = (GAP, rows * ROW);
            let (ins, outs) = (spread(din, h), spread(dout, h));
            let (cx, cy) = (w / 2.0, h / 2.0);
            let mut svg = String::new();
            for y in &ins {
                line(&mut svg, 0.0, *y, cx, cy);
            }
            for y in &outs {
                line(&mut svg, cx, cy, w, *y);
            }
            let _ = writeln!(svg, r#"<circle cx="{}" cy="{}" r="3" fill="black"/>"#, fmt(cx), fmt(cy));
            Block { w, h, ins, outs, svg }
        }
        Generator::Swap { .. } => {
            let (w, h) = (GAP, 2.0 * ROW);
            let ys = spread(2, h);
            let mut svg = String::new();
            line(&mut svg, 0.0, ys[0], w, ys[1]);
            line(&mut svg, 0.0, ys[1], w, ys[0]);
            Block { w, h, ins: ys.clone(), outs: ys, svg }
        }
        Generator::Cut { inner } => {
            let b = layout(inner);
            let (w, h) = (b.w * 1.2 + 2.0 * PAD, b.h * 1.2 + 2.0 * PAD);
            let (x0, y0) = ((w - b.w) / 2.0, (h - b.h) / 2.0);
            let mut svg = String::new();
            let _ = writeln!(
                svg,
                r#"<ellipse cx="{}" cy="{}" rx="{}" ry="{}" fill="none" stroke="black" stroke-dasharray="6,3"/>"#,
                fmt(w / 2.0),
                fmt(h / 2.0),
                fmt(w / 2.0),
                fmt(h / 2.0)
            );
            for y in &b.ins {
                line(&mut svg, 0.0, y + y0, x0, y + y0);
            }
            for y in &b.outs {
                line(&mut svg, x0 + b.w, y + y0, w, y + y0);
            }
            let _ = writeln!(svg, r#"<g transform="translate({},{})">{}</g>"#, fmt(x0), fmt(y0), b.svg);
            Block { w, h, ins: b.ins.iter().map(|y| y + y0).collect(), outs: b.outs.iter().map(|y| y + y0).collect(), svg }
        }
    }
}

/// One column per layer; wires passing a layer are drawn straight, wires
/// between columns as segments.
fn layout(form: &LayeredForm) -> Block {
    let mut columns = Vec::new();
    for layer in &form.layers {
        let g = generator_block(&layer.generator);
        let (l, r) = (layer.left.len() as f64, layer.right.len() as f64);
        let top = l * ROW;
        let h = top + g.h + r * ROW;
        let rows = |n: usize, base: f64| (0..n).map(move |i| base + ROW * (i as f64 + 0.5));
        let mut ins: Vec<f64> = rows(layer.left.len(), 0.0).collect();
        let mut outs = ins.clone();
        ins.extend(g.ins.iter().map(|y| y + top));
        outs.extend(g.outs.iter().map(|y| y + top));
        let right: Vec<f64> = rows(layer.right.len(), top + g.h).collect();
        ins.extend(&right);
        outs.extend(&right);
        columns.push((g, top, h, ins, outs, layer.left.len(), layer.right.len()));
    }
    let h = columns.iter().map(|c| c.2).fold(form.dom.len().max(1) as f64 * ROW, f64::max);
    let mut svg = String::new();
    let mut x = 0.0;
    let dom_ys = spread(form.dom.len(), h);
    let mut prev = dom_ys.clone();
    for (g, top, _, ins, outs, nl, nr) in columns {
        // connecting segments
        for (a, b) in prev.iter().zip(&ins) {
            line(&mut svg, x, *a, x + GAP, *b);
        }
        x += GAP;
        for y in ins.iter().take(nl).chain(ins.iter().skip(ins.len() - nr)) {
            line(&mut svg, x, *y, x + g.w, *y);
        }
        let _ = writeln!(svg, r#"<g transform="translate({},{})">{}</g>"#, fmt(x), fmt(top), g.svg);
        x += g.w;
        prev = outs;
    }
    let outs = if form.layers.is_empty() {
        prev
    } else {
        let ends = spread(prev.len(), h);
        for (a, b) in prev.iter().zip(&ends) {
            line(&mut svg, x, *a, x + GAP, *b);
        }
        x += GAP;
        ends
    };
    if form.layers.is_empty() {
        for y in &dom_ys {
            line(&mut svg, 0.0, *y, GAP, *y);
        }
        x = GAP;
    }
    Block { w: x, h, ins: dom_ys, outs, svg }
}

/// Standalone SVG: wires run left to right, one column per layer, cuts
/// are dashed ovals and boxes with holes frame their fillings.
pub fn to_svg(d: &Diagram) -> String {
    let form = LayeredForm::of(d);
    let b = layout(&form);
    let margin = 30.0;
    let (w, h) = (b.w + 2.0 * margin, b.h + 2.0 * margin);
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n",
        fmt(w),
        fmt(h),
        fmt(w),
        fmt(h)
    );
    let _ = writeln!(svg, r#"<g transform="translate({},{})" font-family="sans-serif">"#, fmt(margin), fmt(margin));
    for (y, o) in b.ins.iter().zip(&form.dom.0) {
        let _ = writeln!(svg, r#"<text x="-4" y="{}" text-anchor="end" font-size="10">{}</text>"#, fmt(y + 3.0), text_escape(o));
    }
    for (y, o) in b.outs.iter().zip(&form.cod().0) {
        let _ = writeln!(svg, r#"<text x="{}" y="{}" font-size="10">{}</text>"#, fmt(b.w + 4.0), fmt(y + 3.0), text_escape(o));
    }
    svg.push_str(&b.svg);
    svg.push_str("</g>\n</svg>\n");
    svg
}
