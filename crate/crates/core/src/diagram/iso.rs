use std::collections::{BTreeMap, HashMap};

use super::{Diagram, SpiderId};

/// Interns colour signatures so both diagrams share one colour space.
#[derive(Default)]
struct Interner(HashMap<Vec<u64>, u64>);

impl Interner {
    fn id(&mut self, sig: Vec<u64>) -> u64 {
        let next = self.0.len() as u64;
        *self.0.entry(sig).or_insert(next)
    }
}

struct Coloured<'a> {
    d: &'a Diagram,
    spiders: Vec<SpiderId>,
    index: BTreeMap<SpiderId, usize>,
    /// Per H-box: (label colour, neighbour indices).
    boxes: Vec<(u64, Vec<usize>)>,
    colour: Vec<u64>,
}

impl<'a> Coloured<'a> {
    fn new(d: &'a Diagram, labels: &mut Interner) -> Self {
        let spiders: Vec<SpiderId> = d.spiders.iter().copied().collect();
        let index: BTreeMap<SpiderId, usize> = spiders.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let boxes = d
            .hboxes
            .values()
            .map(|b| {
                let (t, x, y) = b.label.key();
                let c = labels.id(vec![u64::from(t), x, y, b.neighbors.len() as u64]);
                (c, b.neighbors.iter().map(|s| index[s]).collect())
            })
            .collect();
        Coloured {
            d,
            spiders,
            index,
            boxes,
            colour: Vec::new(),
        }
    }

    fn initial(&mut self, it: &mut Interner) {
        self.colour = self
            .spiders
            .iter()
            .map(|s| {
                let mut sig = vec![u64::MAX];
                for (i, x) in self.d.inputs.iter().enumerate() {
                    if x == s {
                        sig.push(i as u64);
                    }
                }
                sig.push(u64::MAX - 1);
                for (i, x) in self.d.outputs.iter().enumerate() {
                    if x == s {
                        sig.push(i as u64);
                    }
                }
                it.id(sig)
            })
            .collect();
    }

    fn refine(&mut self, it: &mut Interner) {
        let box_colour: Vec<u64> = self
            .boxes
            .iter()
            .map(|(c, ns)| {
                let mut sig: Vec<u64> = ns.iter().map(|&i| self.colour[i]).collect();
                sig.sort_unstable();
                sig.insert(0, *c);
                it.id(sig)
            })
            .collect();
        let mut incident: Vec<Vec<u64>> = vec![Vec::new(); self.spiders.len()];
        for (b, (_, ns)) in self.boxes.iter().enumerate() {
            for &i in ns {
                incident[i].push(box_colour[b]);
            }
        }
        self.colour = incident
            .into_iter()
            .enumerate()
            .map(|(i, mut sig)| {
                sig.sort_unstable();
                sig.insert(0, self.colour[i]);
                it.id(sig)
            })
            .collect();
    }

    fn classes(&self) -> usize {
        let mut c = self.colour.clone();
        c.sort_unstable();
        c.dedup();
        c.len()
    }

    /// Sorted box descriptions under a spider relabelling.
    fn box_multiset(&self, map: &[usize]) -> Vec<(u64, Vec<usize>)> {
        let mut out: Vec<(u64, Vec<usize>)> = self
            .boxes
            .iter()
            .map(|(c, ns)| {
                let mut m: Vec<usize> = ns.iter().map(|&i| map[i]).collect();
                m.sort_unstable();
                (*c, m)
            })
            .collect();
        out.sort();
        out
    }
}

/// Structural equality up to renaming spiders and H-boxes: labels, neighbour
/// sets, boundary lists and the scalar must all correspond.
pub fn iso_equal(a: &Diagram, b: &Diagram) -> bool {
    if a.spiders.len() != b.spiders.len()
        || a.hboxes.len() != b.hboxes.len()
        || a.inputs.len() != b.inputs.len()
        || a.outputs.len() != b.outputs.len()
        || a.scalar != b.scalar
    {
        return false;
    }
    let mut labels = Interner::default();
    let mut ca = Coloured::new(a, &mut labels);
    let mut cb = Coloured::new(b, &mut labels);
    let mut it = Interner::default();
    ca.initial(&mut it);
    cb.initial(&mut it);
    loop {
        let before = (ca.classes(), cb.classes());
        ca.refine(&mut it);
        cb.refine(&mut it);
        let mut x = ca.colour.clone();
        let mut y = cb.colour.clone();
        x.sort_unstable();
        y.sort_unstable();
        if x != y {
            return false;
        }
        if (ca.classes(), cb.classes()) == before {
            break;
        }
    }
    let target = cb.box_multiset(&(0..cb.spiders.len()).collect::<Vec<_>>());
    let mut map = vec![usize::MAX; ca.spiders.len()];
    let mut used = vec![false; cb.spiders.len()];
    let mut order: Vec<usize> = (0..ca.spiders.len()).collect();
    let class_size = |c: u64| ca.colour.iter().filter(|&&x| x == c).count();
    order.sort_by_key(|&i| (class_size(ca.colour[i]), i));
    let ok = search(&ca, &cb, &order, 0, &mut map, &mut used, &target);
    ok && boundary_consistent(&ca, &cb, &map)
}

fn boundary_consistent(ca: &Coloured, cb: &Coloured, map: &[usize]) -> bool {
    let img = |s: &SpiderId| cb.spiders[map[ca.index[s]]];
    ca.d.inputs.iter().map(img).eq(cb.d.inputs.iter().copied())
        && ca.d.outputs.iter().map(img).eq(cb.d.outputs.iter().copied())
}

fn search(
    ca: &Coloured,
    cb: &Coloured,
    order: &[usize],
    depth: usize,
    map: &mut Vec<usize>,
    used: &mut Vec<bool>,
    target: &[(u64, Vec<usize>)],
) -> bool {
    if depth == order.len() {
        return ca.box_multiset(map) == target;
    }
    let i = order[depth];
    for j in 0..cb.spiders.len() {
        if used[j] || cb.colour[j] != ca.colour[i] {
            continue;
        }
        map[i] = j;
        used[j] = true;
        if partial_ok(ca, cb, map, i) && search(ca, cb, order, depth + 1, map, used, target) {
            return true;
        }
        used[j] = false;
        map[i] = usize::MAX;
    }
    false
}

/// Every box of `a` touching `i` whose spiders are all mapped must have an
/// image box in `b`.
fn partial_ok(ca: &Coloured, cb: &Coloured, map: &[usize], i: usize) -> bool {
    for (c, ns) in &ca.boxes {
        if !ns.contains(&i) || ns.iter().any(|&k| map[k] == usize::MAX) {
            continue;
        }
        let mut img: Vec<usize> = ns.iter().map(|&k| map[k]).collect();
        img.sort_unstable();
        if !cb.boxes.iter().any(|(cc, nb)| cc == c && *nb == img) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::HLabel;

    fn cnot() -> Diagram {
        let mut d = Diagram::new();
        for _ in 0..4 {
            d.add_spider();
        }
        d.add_hbox(HLabel::minus_one(), [1, 2]);
        d.add_hbox(HLabel::minus_one(), [0, 2]);
        d.add_hbox(HLabel::minus_one(), [2, 3]);
        d.inputs = vec![0, 1];
        d.outputs = vec![0, 3];
        d
    }

    fn shuffled(d: &Diagram, perm: &[usize]) -> Diagram {
        let mut e = Diagram::new();
        e.spiders = d.spiders.iter().map(|&s| perm[s] + 10).collect();
        for b in d.hboxes.values().rev() {
            e.add_hbox(b.label, b.neighbors.iter().map(|&s| perm[s] + 10));
        }
        e.inputs = d.inputs.iter().map(|&s| perm[s] + 10).collect();
        e.outputs = d.outputs.iter().map(|&s| perm[s] + 10).collect();
        e.scalar = d.scalar.clone();
        e
    }

    #[test]
    fn shuffled_ids_are_isomorphic() {
        let d = cnot();
        assert!(iso_equal(&d, &shuffled(&d, &[3, 1, 0, 2])));
    }

    #[test]
    fn label_change_breaks_isomorphism() {
        let d = cnot();
        let mut e = d.clone();
        e.hboxes.get_mut(&0).unwrap().label = HLabel::phase(1, 4);
        assert!(!iso_equal(&d, &e));
    }

    #[test]
    fn boundary_order_matters() {
        let d = cnot();
        let mut e = d.clone();
        e.inputs.swap(0, 1);
        assert!(!iso_equal(&d, &e));
    }

    #[test]
    fn symmetric_interior_needs_search() {
        // A 6-cycle of interior spiders vs two triangles: same local colours.
        let ring = |edges: &[(usize, usize)]| {
            let mut d = Diagram::new();
            for _ in 0..6 {
                d.add_spider();
            }
            for &(a, b) in edges {
                d.add_hbox(HLabel::minus_one(), [a, b]);
            }
            d
        };
        let hex = ring(&[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)]);
        let tri = ring(&[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]);
        assert!(!iso_equal(&hex, &tri));
        let hex2 = ring(&[(0, 2), (2, 4), (4, 1), (1, 3), (3, 5), (5, 0)]);
        assert!(iso_equal(&hex, &hex2));
    }
}
