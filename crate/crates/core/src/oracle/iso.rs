use std::collections::BTreeMap;

use crate::net::{Net, PlaceId, TransId};

/// Label-preserving bijection between two nets that maps flow onto flow and
/// the initial marking onto the initial marking.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LabeledIso {
    pub places: BTreeMap<PlaceId, PlaceId>,
    pub transitions: BTreeMap<TransId, TransId>,
}

/// Searches for a label-preserving isomorphism between `a` and `b`.
pub fn isomorphic(a: &Net, b: &Net) -> Option<LabeledIso> {
    isomorphic_colored(a, &BTreeMap::new(), b, &BTreeMap::new())
}

/// As [`isomorphic`], additionally requiring places to keep their colour.
/// Places without an entry have the empty colour.
pub fn isomorphic_colored(
    a: &Net,
    ca: &BTreeMap<PlaceId, String>,
    b: &Net,
    cb: &BTreeMap<PlaceId, String>,
) -> Option<LabeledIso> {
    if a.place_count() != b.place_count() || a.transition_count() != b.transition_count() {
        return None;
    }
    let ga = Graph::new(a, ca);
    let gb = Graph::new(b, cb);
    let (col_a, col_b) = refine(&ga, &gb);
    let mut hist_a = col_a.clone();
    let mut hist_b = col_b.clone();
    hist_a.sort_unstable();
    hist_b.sort_unstable();
    if hist_a != hist_b {
        return None;
    }
    let mut search = Search {
        a: &ga,
        b: &gb,
        col_a: &col_a,
        col_b: &col_b,
        fwd: vec![None; ga.len()],
        bwd: vec![None; gb.len()],
        order: order(&ga, &col_a),
    };
    if !search.extend(0) {
        return None;
    }
    let mut iso = LabeledIso::default();
    for (x, y) in search.fwd.iter().enumerate() {
        let y = y.expect("complete assignment");
        match (&ga.ids[x], &gb.ids[y]) {
            (Node::Place(p), Node::Place(q)) => {
                iso.places.insert(p.clone(), q.clone());
            }
            (Node::Trans(t), Node::Trans(u)) => {
                iso.transitions.insert(t.clone(), u.clone());
            }
            _ => unreachable!("colours separate places from transitions"),
        }
    }
    Some(iso)
}

enum Node {
    Place(PlaceId),
    Trans(TransId),
}

struct Graph {
    ids: Vec<Node>,
    seed: Vec<(bool, String, bool, String)>,
    out: Vec<Vec<usize>>,
    inn: Vec<Vec<usize>>,
}

impl Graph {
    fn new(net: &Net, colors: &BTreeMap<PlaceId, String>) -> Self {
        let mut ids = Vec::new();
        let mut seed = Vec::new();
        let mut index = BTreeMap::new();
        for p in net.places() {
            index.insert(p.0.clone(), ids.len());
            let label = net.place_label(p.as_str()).unwrap().0.clone();
            let marked = net.initial_marking().contains(p);
            let color = colors.get(p).cloned().unwrap_or_default();
            seed.push((false, label, marked, color));
            ids.push(Node::Place(p.clone()));
        }
        let n_places = ids.len();
        for (t, tr) in net.transitions() {
            seed.push((true, tr.label.0.clone(), false, String::new()));
            ids.push(Node::Trans(t.clone()));
        }
        let mut out = vec![Vec::new(); ids.len()];
        let mut inn = vec![Vec::new(); ids.len()];
        for (k, (_, tr)) in net.transitions().enumerate() {
            let t = n_places + k;
            for p in &tr.pre {
                out[index[&p.0]].push(t);
                inn[t].push(index[&p.0]);
            }
            for p in &tr.post {
                out[t].push(index[&p.0]);
                inn[index[&p.0]].push(t);
            }
        }
        Graph {
            ids,
            seed,
            out,
            inn,
        }
    }

    fn len(&self) -> usize {
        self.ids.len()
    }
}

/// Joint colour refinement of both graphs until the partition is stable.
fn refine(a: &Graph, b: &Graph) -> (Vec<usize>, Vec<usize>) {
    let mut seeds = BTreeMap::new();
    for s in a.seed.iter().chain(&b.seed) {
        let n = seeds.len();
        seeds.entry(s.clone()).or_insert(n);
    }
    let mut ca: Vec<usize> = a.seed.iter().map(|s| seeds[s]).collect();
    let mut cb: Vec<usize> = b.seed.iter().map(|s| seeds[s]).collect();
    let mut classes = seeds.len();
    loop {
        let mut keys = BTreeMap::new();
        let signature = |g: &Graph, c: &[usize], x: usize| {
            let mut o: Vec<usize> = g.out[x].iter().map(|&y| c[y]).collect();
            let mut i: Vec<usize> = g.inn[x].iter().map(|&y| c[y]).collect();
            o.sort_unstable();
            i.sort_unstable();
            (c[x], o, i)
        };
        let sa: Vec<_> = (0..a.len()).map(|x| signature(a, &ca, x)).collect();
        let sb: Vec<_> = (0..b.len()).map(|x| signature(b, &cb, x)).collect();
        for s in sa.iter().chain(&sb) {
            let n = keys.len();
            keys.entry(s.clone()).or_insert(n);
        }
        ca = sa.iter().map(|s| keys[s]).collect();
        cb = sb.iter().map(|s| keys[s]).collect();
        if keys.len() == classes {
            return (ca, cb);
        }
        classes = keys.len();
    }
}

/// Visit order: each next node has as many already-placed neighbours as
/// possible, ties broken by smaller colour class.
fn order(g: &Graph, col: &[usize]) -> Vec<usize> {
    let mut class_size: BTreeMap<usize, usize> = BTreeMap::new();
    for &c in col {
        *class_size.entry(c).or_default() += 1;
    }
    let mut placed = vec![false; g.len()];
    let mut links = vec![0usize; g.len()];
    let mut out = Vec::with_capacity(g.len());
    for _ in 0..g.len() {
        let x = (0..g.len())
            .filter(|&x| !placed[x])
            .min_by_key(|&x| (std::cmp::Reverse(links[x]), class_size[&col[x]], x))
            .unwrap();
        placed[x] = true;
        out.push(x);
        for &y in g.out[x].iter().chain(&g.inn[x]) {
            links[y] += 1;
        }
    }
    out
}

struct Search<'a> {
    a: &'a Graph,
    b: &'a Graph,
    col_a: &'a [usize],
    col_b: &'a [usize],
    fwd: Vec<Option<usize>>,
    bwd: Vec<Option<usize>>,
    order: Vec<usize>,
}

impl Search<'_> {
    fn extend(&mut self, depth: usize) -> bool {
        let Some(&x) = self.order.get(depth) else {
            return true;
        };
        for y in 0..self.b.len() {
            if self.col_b[y] != self.col_a[x] || self.bwd[y].is_some() || !self.consistent(x, y) {
                continue;
            }
            self.fwd[x] = Some(y);
            self.bwd[y] = Some(x);
            if self.extend(depth + 1) {
                return true;
            }
            self.fwd[x] = None;
            self.bwd[y] = None;
        }
        false
    }

    fn consistent(&self, x: usize, y: usize) -> bool {
        let adj = |na: &[Vec<usize>], nb: &[Vec<usize>]| {
            na[x]
                .iter()
                .all(|&z| self.fwd[z].is_none_or(|w| nb[y].contains(&w)))
                && nb[y]
                    .iter()
                    .all(|&w| self.bwd[w].is_none_or(|z| na[x].contains(&z)))
        };
        adj(&self.a.out, &self.b.out) && adj(&self.a.inn, &self.b.inn)
    }
}
