use crate::diagram::{assemble, interchange, Diagram, Generator, LayeredForm, Slot};

/// Merges spiders on the same object that are joined by a wire in the same
/// cut region, and erases spiders with one leg in and one leg out.
pub fn spider_fuse(d: &Diagram) -> Diagram {
    fuse_form(&LayeredForm::of(d)).to_diagram()
}

fn fuse_form(f: &LayeredForm) -> LayeredForm {
    let mut slots: Vec<Slot> = f
        .layers
        .iter()
        .cloned()
        .map(|mut l| {
            l.generator = match l.generator {
                Generator::Cut { inner } => Generator::Cut { inner: fuse_form(&inner) },
                Generator::Box { name, dom, cod, fillings } => {
                    Generator::Box { name, dom, cod, fillings: fillings.iter().map(fuse_form).collect() }
                }
                g => g,
            };
            Slot::of(l)
        })
        .collect();
    while fuse_once(&mut slots) {}
    slots.retain(|s| !matches!(s.generator, Generator::Spider { legs_in: 1, legs_out: 1, .. }));
    assemble(f.dom.clone(), slots)
}

fn spider_object(s: &Slot) -> Option<&str> {
    match &s.generator {
        Generator::Spider { object, .. } => Some(object),
        _ => None,
    }
}

/// Spider replacing `a` followed immediately by `b`, if an output of `a`
/// is an input of `b`.
fn merged(a: &Slot, b: &Slot) -> Option<Slot> {
    let object = spider_object(a)?;
    if spider_object(b) != Some(object) {
        return None;
    }
    let (a_end, b_end) = (a.off + a.dout, b.off + b.din);
    if a.off.max(b.off) >= a_end.min(b_end) {
        return None;
    }
    let legs_in = a.off.saturating_sub(b.off) + a.din + b_end.saturating_sub(a_end);
    let legs_out = b.off.saturating_sub(a.off) + b.dout + a_end.saturating_sub(b_end);
    Some(Slot {
        off: a.off.min(b.off),
        din: legs_in,
        dout: legs_out,
        generator: Generator::Spider { legs_in, legs_out, object: object.to_string() },
    })
}

/// Slides one spider towards a connected spider and merges the two.
fn fuse_once(slots: &mut Vec<Slot>) -> bool {
    for j in 0..slots.len() {
        if spider_object(&slots[j]).is_none() {
            continue;
        }
        // upwards
        let mut moving = slots[j].clone();
        let mut passed = Vec::new();
        for i in (0..j).rev() {
            match interchange(&slots[i], &moving) {
                Some((nb, na)) => {
                    moving.off = nb;
                    passed.push((i, na));
                }
                None => {
                    if let Some(m) = merged(&slots[i], &moving) {
                        for (k, na) in passed {
                            slots[k].off = na;
                        }
                        slots[i] = m;
                        slots.remove(j);
                        return true;
                    }
                    break;
                }
            }
        }
        // downwards
        let mut moving = slots[j].clone();
        let mut passed = Vec::new();
        for i in j + 1..slots.len() {
            match interchange(&moving, &slots[i]) {
                Some((nb, na)) => {
                    moving.off = na;
                    passed.push((i, nb));
                }
                None => {
                    if let Some(m) = merged(&moving, &slots[i]) {
                        for (k, nb) in passed {
                            slots[k].off = nb;
                        }
                        slots[i] = m;
                        slots.remove(j);
                        return true;
                    }
                    break;
                }
            }
        }
    }
    false
}

/// Rewrites `cut(cut(x))` to `x` wherever the outer cut holds nothing but
/// the inner one.
pub fn double_cut_elim(d: &Diagram) -> Diagram {
    match d {
        Diagram::Cut { inner } => {
            let form = LayeredForm::of(inner);
            if let [layer] = form.layers.as_slice() {
                if let Generator::Cut { inner: body } = &layer.generator {
                    if layer.left.is_empty() && layer.right.is_empty() {
                        return double_cut_elim(&body.to_diagram());
                    }
                }
            }
            Diagram::cut(double_cut_elim(inner))
        }
        Diagram::Compose { first, second } => {
            Diagram::Compose { first: Box::new(double_cut_elim(first)), second: Box::new(double_cut_elim(second)) }
        }
        Diagram::Tensor { top, bottom } => {
            Diagram::Tensor { top: Box::new(double_cut_elim(top)), bottom: Box::new(double_cut_elim(bottom)) }
        }
        Diagram::Box { name, dom, cod, fillings } => Diagram::Box {
            name: name.clone(),
            dom: dom.clone(),
            cod: cod.clone(),
            fillings: fillings.iter().map(double_cut_elim).collect(),
        },
        other => other.clone(),
    }
}
