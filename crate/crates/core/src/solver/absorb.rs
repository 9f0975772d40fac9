//! (S,O)-absorbing paths and absorbing gadgets.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::bipartite_matching;
use crate::error::{Error, Result};
use crate::hypergraph::{Color, OneKGraph, Point};
use crate::sequential::{validate, SeqPath, SeqWalk};

/// A path P together with the point set S and color set O it should absorb.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AbsorptionQuery {
    pub path: SeqWalk,
    pub points: Vec<Point>,
    pub colors: Vec<Color>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AbsorbStatus {
    Found,
    Absent,
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AbsorbOutcome {
    pub status: AbsorbStatus,
    pub path: Option<SeqWalk>,
    pub nodes: u64,
}

fn check_query(g: &OneKGraph, q: &AbsorptionQuery) -> Result<()> {
    let k = g.k();
    SeqPath::new(q.path.clone())?;
    if !validate(g, &q.path)?.is_valid() {
        return Err(Error::Precondition("P is not a sequentially path of G".into()));
    }
    if q.path.points.len() < k {
        return Err(Error::Precondition("P needs at least k points".into()));
    }
    if !q.points.len().is_multiple_of(k) || q.points.len() != q.colors.len() {
        return Err(Error::Precondition("need |S| ≡ 0 mod k and |O| = |S|".into()));
    }
    let pts: BTreeSet<Point> = q.path.points.iter().copied().collect();
    let cols: BTreeSet<Color> = q.path.colors.iter().copied().collect();
    let s: BTreeSet<Point> = q.points.iter().copied().collect();
    let o: BTreeSet<Color> = q.colors.iter().copied().collect();
    if s.len() != q.points.len() || o.len() != q.colors.len() {
        return Err(Error::Precondition("S and O must not repeat elements".into()));
    }
    if !s.is_disjoint(&pts) || !o.is_disjoint(&cols) {
        return Err(Error::Precondition("S must avoid I(P) and O must avoid C(P)".into()));
    }
    if s.iter().any(|&v| v >= g.n()) || o.iter().any(|&c| c >= g.colors()) {
        return Err(Error::Precondition("S or O out of range".into()));
    }
    Ok(())
}

struct AbsorbSearch<'a> {
    g: &'a OneKGraph,
    k: usize,
    len: usize,
    pool: Vec<Point>,
    palette: Vec<Color>,
    end: Vec<Point>,
    order: Vec<Point>,
    used: Vec<bool>,
    windows: Vec<u64>,
    cache: HashMap<Vec<Point>, u64>,
    nodes: u64,
    budget: u64,
    exhausted: bool,
}

impl AbsorbSearch<'_> {
    fn colors_of(&mut self, window: &[Point]) -> u64 {
        let mut key = window.to_vec();
        key.sort_unstable();
        if let Some(&m) = self.cache.get(&key) {
            return m;
        }
        let m = self
            .palette
            .iter()
            .enumerate()
            .filter(|(_, &c)| self.g.contains(c, &key))
            .fold(0u64, |m, (i, _)| m | 1 << i);
        self.cache.insert(key, m);
        m
    }

    /// Pushes the window ending at the last placed point; false when it has no color.
    fn push_window(&mut self) -> bool {
        let j = self.order.len();
        if j < self.k {
            return true;
        }
        let w = self.order[j - self.k..].to_vec();
        let m = self.colors_of(&w);
        if m == 0 {
            return false;
        }
        self.windows.push(m);
        bipartite_matching(&self.windows).0 == self.windows.len()
    }

    fn finish(&mut self) -> Option<SeqWalk> {
        let base = self.windows.len();
        let mut ok = true;
        let placed = self.order.len();
        for p in self.end.clone() {
            self.order.push(p);
            let j = self.order.len();
            let w = self.order[j - self.k..].to_vec();
            let m = self.colors_of(&w);
            if m == 0 {
                ok = false;
                break;
            }
            self.windows.push(m);
        }
        let mut out = None;
        if ok {
            let (size, partner) = bipartite_matching(&self.windows);
            if size == self.windows.len() {
                let colors = partner.into_iter().map(|c| self.palette[c.unwrap()]).collect();
                out = Some(SeqWalk::open(colors, self.order.clone()));
            }
        }
        self.order.truncate(placed);
        self.windows.truncate(base);
        out
    }

    fn extend(&mut self) -> Option<SeqWalk> {
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
            return None;
        }
        if self.order.len() + self.end.len() == self.len {
            return self.finish();
        }
        for i in 0..self.pool.len() {
            if self.used[i] {
                continue;
            }
            let v = self.pool[i];
            self.used[i] = true;
            self.order.push(v);
            let base = self.windows.len();
            if self.push_window() {
                if let Some(w) = self.extend() {
                    return Some(w);
                }
            }
            self.windows.truncate(base);
            self.order.pop();
            self.used[i] = false;
            if self.exhausted {
                return None;
            }
        }
        None
    }
}

/// Searches for P' with the end tuples of P, I(P') = I(P) ∪ S and
/// C(P') = C(P) ∪ O. Exhaustive unless the node budget runs out.
pub fn check_absorbing_path(g: &OneKGraph, q: &AbsorptionQuery, budget: u64) -> Result<AbsorbOutcome> {
    check_query(g, q)?;
    if q.points.is_empty() {
        return Ok(AbsorbOutcome { status: AbsorbStatus::Found, path: Some(q.path.clone()), nodes: 0 });
    }
    let k = g.k();
    let p = &q.path.points;
    let start = p[..k - 1].to_vec();
    let end = p[p.len() - (k - 1)..].to_vec();
    if start.iter().any(|x| end.contains(x)) {
        return Ok(AbsorbOutcome { status: AbsorbStatus::Absent, path: None, nodes: 0 });
    }
    let pool: Vec<Point> = p
        .iter()
        .chain(&q.points)
        .copied()
        .filter(|x| !start.contains(x) && !end.contains(x))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let palette: Vec<Color> =
        q.path.colors.iter().chain(&q.colors).copied().collect::<BTreeSet<_>>().into_iter().collect();
    if palette.len() > 64 {
        return Err(Error::InvalidParameter("at most 64 colors can be absorbed over".into()));
    }
    let mut search = AbsorbSearch {
        g,
        k,
        len: p.len() + q.points.len(),
        used: vec![false; pool.len()],
        pool,
        palette,
        end,
        order: start,
        windows: Vec::new(),
        cache: HashMap::new(),
        nodes: 0,
        budget,
        exhausted: false,
    };
    let found = search.extend();
    let status = match (&found, search.exhausted) {
        (Some(_), _) => AbsorbStatus::Found,
        (None, true) => AbsorbStatus::BudgetExhausted,
        (None, false) => AbsorbStatus::Absent,
    };
    if let Some(w) = &found {
        if !validate(g, w)?.is_valid() || SeqPath::new(w.clone()).is_err() {
            return Err(Error::Hypothesis("absorbing witness failed replay".into()));
        }
    }
    Ok(AbsorbOutcome { status, path: found, nodes: search.nodes })
}

/// The named constituents of an absorbing gadget; primed parts carry a `_prime` suffix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AbsorbingGadget {
    pub a: Vec<Point>,
    pub b: Vec<Point>,
    pub e: Vec<Point>,
    pub p: Vec<Vec<Point>>,
    pub q: Vec<Vec<Point>>,
    pub c: Vec<Color>,
    pub c_i: Vec<Vec<Color>>,
    pub a_prime: Vec<Point>,
    pub b_prime: Vec<Point>,
    pub e_prime: Vec<Point>,
    pub p_prime: Vec<Vec<Point>>,
    pub q_prime: Vec<Vec<Point>>,
    pub c_prime: Vec<Color>,
    pub c_i_prime: Vec<Vec<Color>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GadgetClause {
    pub clause: usize,
    pub holds: bool,
    /// 1-based indices i for the per-index clauses.
    pub failed_indices: Vec<usize>,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GadgetReport {
    pub clauses: Vec<GadgetClause>,
}

impl GadgetReport {
    pub fn holds(&self) -> bool {
        self.clauses.iter().all(|c| c.holds)
    }
}

impl AbsorbingGadget {
    fn check_shapes(&self, k: usize, t: &[Point], o: &[Color]) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameter(format!("malformed gadget: {what}")));
        for (name, tuple) in [
            ("A", &self.a),
            ("B", &self.b),
            ("E", &self.e),
            ("A'", &self.a_prime),
            ("B'", &self.b_prime),
            ("E'", &self.e_prime),
        ] {
            if tuple.len() != k {
                return bad(&format!("{name} must have {k} points"));
            }
        }
        for (name, list) in [("P", &self.p), ("Q", &self.q), ("P'", &self.p_prime), ("Q'", &self.q_prime)] {
            if list.len() != k || list.iter().any(|x| x.len() != k - 1) {
                return bad(&format!("{name}_i must be {k} tuples of {} points", k - 1));
            }
        }
        if self.c.len() != k + 1 || self.c_prime.len() != k + 1 {
            return bad(&format!("C and C' must have {} colors", k + 1));
        }
        for (name, list) in [("C", &self.c_i), ("C'", &self.c_i_prime)] {
            if list.len() != k || list.iter().any(|x| x.len() != k) {
                return bad(&format!("{name}_i must be {k} tuples of {k} colors"));
            }
        }
        if t.len() != k || o.len() != k {
            return bad(&format!("T and O must have {k} elements"));
        }
        Ok(())
    }

    fn point_parts(&self) -> Vec<(String, &Vec<Point>)> {
        let mut parts: Vec<(String, &Vec<Point>)> =
            vec![("A".into(), &self.a), ("B".into(), &self.b), ("E".into(), &self.e)];
        for i in 0..self.p.len() {
            parts.push((format!("P_{}", i + 1), &self.p[i]));
            parts.push((format!("Q_{}", i + 1), &self.q[i]));
        }
        parts.extend([
            ("A'".to_string(), &self.a_prime),
            ("B'".to_string(), &self.b_prime),
            ("E'".to_string(), &self.e_prime),
        ]);
        for i in 0..self.p_prime.len() {
            parts.push((format!("P'_{}", i + 1), &self.p_prime[i]));
            parts.push((format!("Q'_{}", i + 1), &self.q_prime[i]));
        }
        parts
    }

    fn color_parts(&self) -> Vec<(String, &Vec<Color>)> {
        let mut parts: Vec<(String, &Vec<Color>)> = vec![("C".into(), &self.c)];
        for (i, ci) in self.c_i.iter().enumerate() {
            parts.push((format!("C_{}", i + 1), ci));
        }
        parts.push(("C'".into(), &self.c_prime));
        for (i, ci) in self.c_i_prime.iter().enumerate() {
            parts.push((format!("C'_{}", i + 1), ci));
        }
        parts
    }

    /// All point tuples a path through P_i x Q_i uses.
    fn spine(p: &[Point], mid: Point, q: &[Point]) -> Vec<Point> {
        let mut v = p.to_vec();
        v.push(mid);
        v.extend_from_slice(q);
        v
    }
}

fn is_path(g: &OneKGraph, colors: Vec<Color>, points: Vec<Point>) -> std::result::Result<(), String> {
    let w = SeqWalk::open(colors, points);
    w.check_shape(g.k()).map_err(|e| e.to_string())?;
    SeqPath::new(w.clone()).map_err(|e| e.to_string())?;
    match validate(g, &w).map_err(|e| e.to_string())?.is_valid() {
        true => Ok(()),
        false => Err(format!("{:?} / {:?} is not a path of G", w.colors, w.points)),
    }
}

/// Clause-by-clause check of an absorbing gadget for (T, O).
///
/// Each C_i has k colors (a path on 2k-1 points has k windows). The
/// recolored variant of clause (4) puts o_i in the first position, replacing c_{i,1}.
pub fn verify_absorbing_gadget(
    g: &OneKGraph,
    f: &AbsorbingGadget,
    t: &[Point],
    o: &[Color],
) -> Result<GadgetReport> {
    let k = g.k();
    f.check_shapes(k, t, o)?;
    let mut clauses = Vec::new();

    // (1) disjointness
    let mut failures = Vec::new();
    let points = f.point_parts();
    let mut owner: HashMap<Point, String> = HashMap::new();
    for (name, tuple) in &points {
        for &v in tuple.iter() {
            if let Some(prev) = owner.insert(v, name.clone()) {
                failures.push(format!("point {v} in both {prev} and {name}"));
            }
        }
    }
    for &v in t {
        if let Some(prev) = owner.get(&v) {
            failures.push(format!("point {v} of T lies in {prev}"));
        }
    }
    let mut cowner: HashMap<Color, String> = HashMap::new();
    for (name, tuple) in f.color_parts() {
        for &c in tuple {
            if let Some(prev) = cowner.insert(c, name.clone()) {
                failures.push(format!("color {c} in both {prev} and {name}"));
            }
        }
    }
    for &c in o {
        if let Some(prev) = cowner.get(&c) {
            failures.push(format!("color {c} of O lies in {prev}"));
        }
    }
    clauses.push(GadgetClause { clause: 1, holds: failures.is_empty(), failed_indices: vec![], failures });

    // (2) shapes of C_i, already enforced
    clauses.push(GadgetClause { clause: 2, holds: true, failed_indices: vec![], failures: vec![] });

    // (3) the three base paths
    let mut failures = Vec::new();
    let ae: Vec<Point> = f.a.iter().chain(&f.e).copied().collect();
    let ae2: Vec<Point> = f.a_prime.iter().chain(&f.e_prime).copied().collect();
    let abe2: Vec<Point> = f.a_prime.iter().chain(&f.b_prime).chain(&f.e_prime).copied().collect();
    let mut c_ext = f.c_prime.clone();
    c_ext.extend(f.c_i.iter().map(|ci| ci[0]));
    for (label, colors, pts) in [
        ("(C, AE)", f.c.clone(), ae),
        ("(C', A'E')", f.c_prime.clone(), ae2),
        ("(C'(c_{1,1}..c_{k,1}), A'B'E')", c_ext, abe2),
    ] {
        if let Err(msg) = is_path(g, colors, pts) {
            failures.push(format!("{label}: {msg}"));
        }
    }
    clauses.push(GadgetClause { clause: 3, holds: failures.is_empty(), failed_indices: vec![], failures });

    // (4) both colorings of P_i b_i Q_i
    let mut failures = Vec::new();
    let mut idx = Vec::new();
    for i in 0..k {
        let spine = AbsorbingGadget::spine(&f.p[i], f.b[i], &f.q[i]);
        let mut swapped = f.c_i[i].clone();
        swapped[0] = o[i];
        let mut bad = false;
        for (label, colors) in [("C_i", f.c_i[i].clone()), ("o_i-recolored", swapped)] {
            if let Err(msg) = is_path(g, colors, spine.clone()) {
                failures.push(format!("i={} {label}: {msg}", i + 1));
                bad = true;
            }
        }
        if bad {
            idx.push(i + 1);
        }
    }
    clauses.push(GadgetClause { clause: 4, holds: failures.is_empty(), failed_indices: idx, failures });

    // (5) P'_i b'_i Q'_i and P'_i t_i Q'_i
    let mut failures = Vec::new();
    let mut idx = Vec::new();
    for i in 0..k {
        let mut bad = false;
        for (label, mid) in [("b'_i", f.b_prime[i]), ("t_i", t[i])] {
            let spine = AbsorbingGadget::spine(&f.p_prime[i], mid, &f.q_prime[i]);
            if let Err(msg) = is_path(g, f.c_i_prime[i].clone(), spine) {
                failures.push(format!("i={} {label}: {msg}", i + 1));
                bad = true;
            }
        }
        if bad {
            idx.push(i + 1);
        }
    }
    clauses.push(GadgetClause { clause: 5, holds: failures.is_empty(), failed_indices: idx, failures });

    Ok(GadgetReport { clauses })
}

/// A gadget realized in a graph made of exactly the edges its paths need,
/// plus the path P that threads all of its pieces together.
#[derive(Debug, Clone)]
pub struct GadgetInstance {
    pub graph: OneKGraph,
    pub gadget: AbsorbingGadget,
    pub t: Vec<Point>,
    pub o: Vec<Color>,
    /// P: (C,AE), (C_i,P_i b_i Q_i), (C',A'E'), (C'_i,P'_i b'_i Q'_i) joined by fresh seam colors.
    pub path: SeqWalk,
    /// P' after absorbing (T, O).
    pub absorbed: SeqWalk,
}

/// Pieces joined directly, each seam getting k-1 fresh colors.
fn thread(pieces: &[(Vec<Color>, Vec<Point>)], seams: &[Vec<Color>]) -> SeqWalk {
    let mut colors = pieces[0].0.clone();
    let mut points = pieces[0].1.clone();
    for (piece, seam) in pieces[1..].iter().zip(seams) {
        colors.extend_from_slice(seam);
        colors.extend_from_slice(&piece.0);
        points.extend_from_slice(&piece.1);
    }
    SeqWalk::open(colors, points)
}

/// Labels points and colors consecutively and builds the smallest graph
/// containing the gadget and both threaded paths.
pub fn gadget_absorption_instance(k: usize) -> Result<GadgetInstance> {
    if k < 2 {
        return Err(Error::InvalidParameter("gadgets need k ≥ 2".into()));
    }
    let mut next_point = 0;
    let mut take = |m: usize| {
        let v: Vec<Point> = (next_point..next_point + m).collect();
        next_point += m;
        v
    };
    let (a, b, e) = (take(k), take(k), take(k));
    let mut p = Vec::new();
    let mut q = Vec::new();
    for _ in 0..k {
        p.push(take(k - 1));
        q.push(take(k - 1));
    }
    let (a_prime, b_prime, e_prime) = (take(k), take(k), take(k));
    let mut p_prime = Vec::new();
    let mut q_prime = Vec::new();
    for _ in 0..k {
        p_prime.push(take(k - 1));
        q_prime.push(take(k - 1));
    }
    let t = take(k);
    let n = t[k - 1] + 1;

    let mut next_color = 0;
    let mut take_c = |m: usize| {
        let v: Vec<Color> = (next_color..next_color + m).collect();
        next_color += m;
        v
    };
    let c = take_c(k + 1);
    let c_i: Vec<Vec<Color>> = (0..k).map(|_| take_c(k)).collect();
    let c_prime = take_c(k + 1);
    let c_i_prime: Vec<Vec<Color>> = (0..k).map(|_| take_c(k)).collect();
    let o = take_c(k);
    let seams: Vec<Vec<Color>> = (0..2 * k + 1).map(|_| take_c(k - 1)).collect();
    let colors = next_color;

    let gadget = AbsorbingGadget {
        a,
        b,
        e,
        p,
        q,
        c,
        c_i,
        a_prime,
        b_prime,
        e_prime,
        p_prime,
        q_prime,
        c_prime,
        c_i_prime,
    };
    let f = &gadget;
    let cat = |parts: &[&[Point]]| parts.concat();
    let mut before = vec![(f.c.clone(), cat(&[&f.a, &f.e]))];
    let mut after = before.clone();
    for i in 0..k {
        let spine = AbsorbingGadget::spine(&f.p[i], f.b[i], &f.q[i]);
        before.push((f.c_i[i].clone(), spine.clone()));
        let mut swapped = f.c_i[i].clone();
        swapped[0] = o[i];
        after.push((swapped, spine));
    }
    before.push((f.c_prime.clone(), cat(&[&f.a_prime, &f.e_prime])));
    let mut c_ext = f.c_prime.clone();
    c_ext.extend(f.c_i.iter().map(|ci| ci[0]));
    after.push((c_ext, cat(&[&f.a_prime, &f.b_prime, &f.e_prime])));
    for i in 0..k {
        before.push((f.c_i_prime[i].clone(), AbsorbingGadget::spine(&f.p_prime[i], f.b_prime[i], &f.q_prime[i])));
        after.push((f.c_i_prime[i].clone(), AbsorbingGadget::spine(&f.p_prime[i], t[i], &f.q_prime[i])));
    }
    let path = thread(&before, &seams);
    let absorbed = thread(&after, &seams);

    let mut edges = Vec::new();
    for w in [&path, &absorbed] {
        for i in 0..w.colors.len() {
            edges.push((w.colors[i], w.window(i, k)));
        }
    }
    let graph = OneKGraph::new(colors, n, k, edges)?;
    Ok(GadgetInstance { graph, gadget, t, o, path, absorbed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_gadget_counts() {
        let inst = gadget_absorption_instance(3).unwrap();
        let f = &inst.gadget;
        let points: usize = f.point_parts().iter().map(|(_, t)| t.len()).sum();
        let colors: usize = f.color_parts().iter().map(|(_, c)| c.len()).sum();
        assert_eq!(points, 4 * 9 + 2 * 3);
        assert_eq!(colors, 2 * 9 + 2 * 3 + 2);
        let rep = verify_absorbing_gadget(&inst.graph, f, &inst.t, &inst.o).unwrap();
        assert!(rep.holds(), "{rep:?}");
    }

    #[test]
    fn empty_absorption_is_identity() {
        let inst = gadget_absorption_instance(3).unwrap();
        let q = AbsorptionQuery { path: inst.path.clone(), points: vec![], colors: vec![] };
        let out = check_absorbing_path(&inst.graph, &q, 1000).unwrap();
        assert_eq!(out.path.as_ref(), Some(&inst.path));
    }

    #[test]
    fn gadget_absorbs_t_and_o() {
        let inst = gadget_absorption_instance(3).unwrap();
        let q = AbsorptionQuery { path: inst.path.clone(), points: inst.t.clone(), colors: inst.o.clone() };
        let out = check_absorbing_path(&inst.graph, &q, 1_000_000).unwrap();
        assert_eq!(out.status, AbsorbStatus::Found);
        let w = out.path.unwrap();
        assert_eq!(w.points.len(), inst.path.points.len() + 3);
    }

    #[test]
    fn isolated_points_are_not_absorbed() {
        let inst = gadget_absorption_instance(2).unwrap();
        let g = &inst.graph;
        let kept = g.edges().filter(|(_, e)| !e.iter().any(|v| inst.t.contains(v)));
        let blocked = OneKGraph::new(g.colors(), g.n(), 2, kept.map(|(c, e)| (c, e.to_vec()))).unwrap();
        let q = AbsorptionQuery { path: inst.path.clone(), points: inst.t.clone(), colors: inst.o.clone() };
        let out = check_absorbing_path(&blocked, &q, 1_000_000).unwrap();
        assert_eq!(out.status, AbsorbStatus::Absent);
    }
}
