//! Canonical codes for planar isotopy classes.
//!
//! A diagram is read as a plane graph: one vertex per generator, one vertex
//! for the frame carrying the boundary, one edge per wire. Every vertex has
//! distinguishable ports, so the component containing the frame is encoded
//! by a traversal from the frame. Components that do not touch the frame
//! float: they are encoded up to their choice of root and attached to the
//! face of the graph that surrounds them.

use std::collections::BTreeMap;

use super::{Generator, LayeredForm};

type Dart = (usize, usize);

struct Vertex {
    label: String,
    inputs: usize,
    /// Ports in clockwise order around the vertex.
    rotation: Vec<usize>,
    /// Other end of the wire at each port.
    twin: Vec<Dart>,
}

struct Plane {
    vertices: Vec<Vertex>,
    /// Wires crossing the top of each layer, left to right, as source darts.
    heights: Vec<Vec<Dart>>,
    /// Vertex and offset of each layer's generator.
    layers: Vec<(usize, usize)>,
}

fn label(g: &Generator) -> String {
    match g {
        Generator::Box { name, dom, cod, fillings } => {
            let inner: Vec<String> = fillings.iter().map(code).collect();
            format!("box{name:?}{:?}{:?}{inner:?}", dom.0, cod.0)
        }
        Generator::Spider { legs_in, legs_out, object } => format!("spider{legs_in},{legs_out}{object:?}"),
        Generator::Cup { object } => format!("cup{object:?}"),
        Generator::Cap { object } => format!("cap{object:?}"),
        Generator::Swap { left, right } => format!("swap{left:?}{right:?}"),
        Generator::Cut { inner } => format!("cut{:?}", code(inner)),
    }
}

impl Plane {
    fn of(form: &LayeredForm) -> Plane {
        let (m, n) = (form.dom.len(), form.cod().len());
        // frame: ports 0..m are the inputs, m..m + n the outputs
        let frame_rotation = (m..m + n).chain((0..m).rev()).collect();
        let mut vertices = vec![Vertex {
            label: format!("frame{:?}{:?}", form.dom.0, form.cod().0),
            inputs: m,
            rotation: frame_rotation,
            twin: vec![(0, 0); m + n],
        }];
        let mut wires: Vec<Dart> = (0..m).map(|k| (0, k)).collect();
        let mut heights = Vec::new();
        let mut layers = Vec::new();
        for layer in &form.layers {
            heights.push(wires.clone());
            let g = &layer.generator;
            let (din, dout) = (g.dom().len(), g.cod().len());
            let v = vertices.len();
            vertices.push(Vertex {
                label: label(g),
                inputs: din,
                rotation: (0..din).chain((din..din + dout).rev()).collect(),
                twin: vec![(0, 0); din + dout],
            });
            let off = layer.left.len();
            for (k, &src) in wires[off..off + din].iter().enumerate() {
                vertices[src.0].twin[src.1] = (v, k);
                vertices[v].twin[k] = src;
            }
            wires.splice(off..off + din, (0..dout).map(|k| (v, din + k)));
            layers.push((v, off));
        }
        for (k, &src) in wires.iter().enumerate() {
            vertices[src.0].twin[src.1] = (0, m + k);
            vertices[0].twin[m + k] = src;
        }
        heights.push(wires);
        Plane { vertices, heights, layers }
    }

    /// Next dart around a face: cross the wire, then turn clockwise.
    fn next(&self, d: Dart) -> Dart {
        let (w, q) = self.vertices[d.0].twin[d.1];
        let rot = &self.vertices[w].rotation;
        let i = rot.iter().position(|p| *p == q).expect("port in rotation");
        (w, rot[(i + 1) % rot.len()])
    }

    fn components(&self) -> Vec<usize> {
        let mut comp = vec![usize::MAX; self.vertices.len()];
        for start in 0..self.vertices.len() {
            if comp[start] != usize::MAX {
                continue;
            }
            let mut stack = vec![start];
            comp[start] = start;
            while let Some(v) = stack.pop() {
                for &(w, _) in &self.vertices[v].twin {
                    if comp[w] == usize::MAX {
                        comp[w] = start;
                        stack.push(w);
                    }
                }
            }
        }
        comp
    }

    /// Face index of every dart.
    fn faces(&self) -> BTreeMap<Dart, usize> {
        let mut face = BTreeMap::new();
        let mut count = 0;
        for v in 0..self.vertices.len() {
            for p in 0..self.vertices[v].twin.len() {
                if face.contains_key(&(v, p)) {
                    continue;
                }
                let mut d = (v, p);
                while !face.contains_key(&d) {
                    face.insert(d, count);
                    d = self.next(d);
                }
                count += 1;
            }
        }
        face
    }

    /// Canonical code of the component of `root`: vertices numbered in
    /// breadth-first order over ports, each written as its label and the
    /// number and port at the end of each of its wires. Also returns the
    /// number of every vertex reached.
    fn traverse(&self, root: usize) -> (String, BTreeMap<usize, usize>) {
        let mut num = BTreeMap::from([(root, 0)]);
        let mut order = vec![root];
        let mut out = String::new();
        let mut i = 0;
        while i < order.len() {
            let v = order[i];
            out.push_str(&self.vertices[v].label);
            out.push('[');
            for &(w, q) in &self.vertices[v].twin {
                let next = num.len();
                let k = *num.entry(w).or_insert_with(|| {
                    order.push(w);
                    next
                });
                out.push_str(&format!("{k}.{q},"));
            }
            out.push(']');
            i += 1;
        }
        (out, num)
    }
}

/// Code of `form` that two diagrams share exactly when they are planar
/// isotopic, with cut bodies and fillings compared the same way.
pub(crate) fn code(form: &LayeredForm) -> String {
    let plane = Plane::of(form);
    let comp = plane.components();
    let face = plane.faces();

    // face of the component `k` around the generator of layer `l`, if it
    // encloses that point
    let roots: Vec<usize> = (0..plane.vertices.len()).filter(|&v| comp[v] == v).collect();
    let outer: BTreeMap<usize, Option<usize>> = roots
        .iter()
        .map(|&k| {
            let leftmost = plane.heights.iter().flatten().find(|d| comp[d.0] == k).copied();
            // west side of a wire with nothing of `k` to its left
            (k, leftmost.map(|d| face[&plane.vertices[d.0].twin[d.1]]))
        })
        .collect();
    let locate = |k: usize, l: usize| -> Option<usize> {
        let (v, off) = plane.layers[l];
        let din = plane.vertices[v].inputs;
        let wires = &plane.heights[l];
        let left = wires[..off].iter().rev().find(|d| comp[d.0] == k);
        let right = wires[off + din..].iter().find(|d| comp[d.0] == k);
        let f = match (left, right) {
            (Some(d), _) => Some(face[d]),
            (None, Some(d)) => Some(face[&plane.vertices[d.0].twin[d.1]]),
            (None, None) if k == 0 => plane.vertices[0].rotation.first().map(|p| face[&(0, *p)]),
            (None, None) => None,
        };
        if k != 0 && f == outer[&k] {
            None
        } else {
            f
        }
    };

    // first layer of each floating component
    let mut first_layer: BTreeMap<usize, usize> = BTreeMap::new();
    for (l, (v, _)) in plane.layers.iter().enumerate() {
        first_layer.entry(comp[*v]).or_insert(l);
    }
    let floating: Vec<usize> = roots.iter().copied().filter(|&k| k != 0).collect();
    let enclosers: BTreeMap<usize, Vec<(usize, Option<usize>)>> = floating
        .iter()
        .map(|&c| {
            let l = first_layer[&c];
            let list = roots
                .iter()
                .filter(|&&k| k != c)
                .filter_map(|&k| match locate(k, l) {
                    Some(f) => Some((k, Some(f))),
                    None if k == 0 => Some((0, None)),
                    None => None,
                })
                .collect();
            (c, list)
        })
        .collect();
    // children per (component, face); the innermost encloser is the one
    // that is itself enclosed the most
    let mut children: BTreeMap<(usize, Option<usize>), Vec<usize>> = BTreeMap::new();
    for &c in &floating {
        let parent = enclosers[&c]
            .iter()
            .max_by_key(|(k, _)| if *k == 0 { 0 } else { enclosers[k].len() })
            .copied()
            .expect("the frame encloses everything");
        children.entry(parent).or_default().push(c);
    }

    fn full(
        plane: &Plane,
        comp: &[usize],
        face: &BTreeMap<Dart, usize>,
        children: &BTreeMap<(usize, Option<usize>), Vec<usize>>,
        k: usize,
        root: usize,
    ) -> String {
        let (mut out, num) = plane.traverse(root);
        // faces named by their smallest dart under this numbering
        let mut names: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
        for (&(v, p), &f) in face.iter().filter(|((v, _), _)| comp[*v] == k) {
            let name = (num[&v], p);
            names.entry(f).and_modify(|n| *n = (*n).min(name)).or_insert(name);
        }
        let mut attached: Vec<((usize, usize), Vec<String>)> = Vec::new();
        for ((owner, f), cs) in children.range((k, None)..=(k, Some(usize::MAX))) {
            debug_assert_eq!(*owner, k);
            let name = f.map_or((usize::MAX, 0), |f| names[&f]);
            let mut codes: Vec<String> = cs.iter().map(|&c| floating_code(plane, comp, face, children, c)).collect();
            codes.sort();
            attached.push((name, codes));
        }
        attached.sort();
        for (name, codes) in attached {
            out.push_str(&format!("{{{}.{}:{}}}", name.0, name.1, codes.join("|")));
        }
        out
    }

    fn floating_code(
        plane: &Plane,
        comp: &[usize],
        face: &BTreeMap<Dart, usize>,
        children: &BTreeMap<(usize, Option<usize>), Vec<usize>>,
        c: usize,
    ) -> String {
        (0..plane.vertices.len())
            .filter(|&v| comp[v] == c)
            .map(|v| full(plane, comp, face, children, c, v))
            .min()
            .expect("a component has a vertex")
    }

    full(&plane, &comp, &face, &children, 0, 0)
}

#[cfg(test)]
mod tests {
    use crate::diagram::{compose, equal, tensor, Diagram};
    use crate::types::Ty;

    fn g(name: &str, dom: &[&str], cod: &[&str]) -> Diagram {
        Diagram::generator(name, Ty::of(dom), Ty::of(cod))
    }

    fn seq(ds: &[Diagram]) -> Diagram {
        ds[1..].iter().fold(ds[0].clone(), |acc, d| compose(&acc, d).unwrap())
    }

    #[test]
    fn wires_keep_their_order() {
        let (f, h) = (g("f", &["A"], &["A"]), g("h", &["A"], &["A"]));
        assert!(!equal(&tensor(&f, &h), &tensor(&h, &f)));
        assert!(equal(&tensor(&f, &h), &seq(&[tensor(&f, &Diagram::id(Ty::of(&["A"]))), tensor(&Diagram::id(Ty::of(&["A"])), &h)])));
    }

    #[test]
    fn scalars_float_past_states() {
        let s = g("s", &[], &[]);
        let x = g("x", &[], &["A"]);
        let e = g("e", &["A"], &[]);
        assert!(equal(&tensor(&s, &x), &tensor(&x, &s)));
        assert!(equal(&tensor(&e, &x), &seq(&[e.clone(), x.clone()])));
        assert!(equal(&tensor(&e, &x), &tensor(&x, &e)));
    }

    #[test]
    fn scalars_do_not_cross_wires() {
        let s = g("s", &[], &[]);
        let a = Diagram::id(Ty::of(&["A"]));
        assert!(!equal(&tensor(&s, &a), &tensor(&a, &s)));
    }

    #[test]
    fn a_bubble_inside_a_loop_stays_there() {
        let s = g("s", &[], &[]);
        let a = Diagram::id(Ty::of(&["A"]));
        let inside = seq(&[Diagram::cap("A"), tensor(&tensor(&a, &s), &a), Diagram::cup("A")]);
        let outside = tensor(&s, &seq(&[Diagram::cap("A"), Diagram::cup("A")]));
        assert!(!equal(&inside, &outside));
        let left = seq(&[Diagram::cap("A"), tensor(&s, &tensor(&a, &a)), Diagram::cup("A")]);
        assert!(equal(&left, &outside));
    }

    #[test]
    fn nested_bodies_are_compared_up_to_isotopy() {
        let s = g("s", &[], &[]);
        let x = g("x", &[], &["A"]);
        assert!(equal(&Diagram::cut(tensor(&s, &x)), &Diagram::cut(tensor(&x, &s))));
        assert!(!equal(&Diagram::cut(s.clone()), &tensor(&Diagram::cut(Diagram::id(Ty::of(&[]))), &s)));
    }
}
