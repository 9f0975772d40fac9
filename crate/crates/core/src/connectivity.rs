//! Tight components, switchers, arcs and the constructive walk builders that
//! turn a vicinity into explicit sequentially walks.

use std::collections::{HashMap, VecDeque};

use itertools::Itertools;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hypergraph::{Color, KGraph, OneKGraph, Point};
use crate::sequential::{join_at_tuple, juxtapose, shorten_walk, validate, SeqWalk, WalkCheck};
use crate::vicinity::Vicinity;

#[derive(Debug, Clone)]
pub(crate) struct DisjointSet {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSet {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[x] != root {
            let next = self.parent[x];
            self.parent[x] = root;
            x = next;
        }
        root
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.rank[a] < self.rank[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        if self.rank[a] == self.rank[b] {
            self.rank[a] += 1;
        }
    }
}

/// Partition of the edge set into tight components.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TightComponentDecomposition {
    /// Edge indices (into the host's canonical edge list), ordered by smallest edge.
    pub components: Vec<Vec<usize>>,
    pub sizes: Vec<usize>,
}

impl TightComponentDecomposition {
    pub fn component_graph(&self, host: &KGraph, idx: usize) -> KGraph {
        let edges = self.components[idx]
            .iter()
            .map(|&e| host.edges()[e].clone())
            .collect();
        KGraph::from_sorted_unchecked(host.n(), host.k(), edges)
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }
}

/// Edges sharing k-1 vertices are merged; for 2-graphs these are the
/// connected components of the edge set.
pub fn tight_components(g: &KGraph) -> TightComponentDecomposition {
    let edges = g.edges();
    let mut dsu = DisjointSet::new(edges.len());
    let mut first_owner: HashMap<Vec<Point>, usize> = HashMap::new();
    for (i, e) in edges.iter().enumerate() {
        for face in e.iter().copied().combinations(g.k() - 1) {
            match first_owner.get(&face) {
                Some(&j) => dsu.union(i, j),
                None => {
                    first_owner.insert(face, i);
                }
            }
        }
    }
    let mut by_root: HashMap<usize, Vec<usize>> = HashMap::new();
    for i in 0..edges.len() {
        by_root.entry(dsu.find(i)).or_default().push(i);
    }
    let mut components: Vec<Vec<usize>> = by_root.into_values().collect();
    components.sort_by_key(|c| c[0]);
    let sizes = components.iter().map(Vec::len).collect();
    TightComponentDecomposition { components, sizes }
}

/// Nonempty with a single tight component.
pub fn is_tightly_connected(g: &KGraph) -> bool {
    !g.is_empty() && tight_components(g).len() == 1
}

/// Whether the color class `color` of `h` is sequentially tightly connected.
///
/// Windows of a one-color sequentially walk are exactly the windows of a
/// tight walk in the link k-graph of `{color}`, so this is tight
/// connectivity of that link. A color without edges is reported as not
/// connected.
pub fn is_seq_tightly_connected(h: &OneKGraph, color: Color) -> Result<bool> {
    Ok(is_tightly_connected(&h.link(color, &[])?))
}

/// Every k consecutive points form an edge (cyclically when `closed`).
pub fn is_tight_walk(g: &KGraph, points: &[Point], closed: bool) -> bool {
    let k = g.k();
    let len = points.len();
    if len == 0 {
        return true;
    }
    let windows = if closed { len } else { (len + 1).saturating_sub(k) };
    (0..windows).all(|i| {
        let w: Vec<Point> = (0..k).map(|j| points[(i + j) % len]).collect();
        g.contains_unordered(&w)
    })
}

/// Edges `ab` of a 2-graph whose ends share a neighbour, in canonical order.
pub fn find_switchers(g: &KGraph) -> Vec<[Point; 2]> {
    let adj = g.adjacency();
    g.edges()
        .iter()
        .filter(|e| common_neighbor(&adj, e[0], e[1]).is_some())
        .map(|e| [e[0], e[1]])
        .collect()
}

fn common_neighbor(adj: &[Vec<Point>], a: Point, b: Point) -> Option<Point> {
    let (mut i, mut j) = (0, 0);
    let (na, nb) = (&adj[a], &adj[b]);
    while i < na.len() && j < nb.len() {
        match na[i].cmp(&nb[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return Some(na[i]),
        }
    }
    None
}

fn bfs_parents(adj: &[Vec<Point>], start: Point) -> Vec<Option<Point>> {
    let mut parent = vec![None; adj.len()];
    parent[start] = Some(start);
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if parent[v].is_none() {
                parent[v] = Some(u);
                queue.push_back(v);
            }
        }
    }
    parent
}

/// Shortest vertex path `from ..= to`.
fn bfs_path(adj: &[Vec<Point>], from: Point, to: Point) -> Option<Vec<Point>> {
    let parent = bfs_parents(adj, from);
    parent[to]?;
    let mut path = vec![to];
    let mut cur = to;
    while cur != from {
        cur = parent[cur].unwrap();
        path.push(cur);
    }
    path.reverse();
    Some(path)
}

fn is_bipartite_from(adj: &[Vec<Point>], start: Point) -> bool {
    let mut side = vec![None; adj.len()];
    side[start] = Some(false);
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        let su = side[u].unwrap();
        for &v in &adj[u] {
            match side[v] {
                None => {
                    side[v] = Some(!su);
                    queue.push_back(v);
                }
                Some(sv) if sv == su => return false,
                _ => {}
            }
        }
    }
    true
}

/// Closed tight walk of odd length through `start` in a 2-graph: walk to the
/// nearest triangle, go around it, walk back. Returned without repeating
/// `start` at the end.
pub fn odd_closed_tight_walk(g: &KGraph, start: Point) -> Result<Vec<Point>> {
    if g.k() != 2 {
        return Err(Error::InvalidParameter("odd closed walks are built in 2-graphs".into()));
    }
    if start >= g.n() {
        return Err(Error::VertexOutOfRange { vertex: start, n: g.n() });
    }
    let adj = g.adjacency();
    if adj[start].is_empty() {
        return Err(Error::Precondition(format!("vertex {start} is isolated")));
    }
    if is_bipartite_from(&adj, start) {
        return Err(Error::Precondition(
            "component is bipartite: no closed walk of odd length exists".into(),
        ));
    }
    let parent = bfs_parents(&adj, start);
    // nearest vertex (BFS order) lying on a triangle
    let mut order: Vec<Point> = Vec::new();
    let mut queue = VecDeque::from([start]);
    let mut seen = vec![false; g.n()];
    seen[start] = true;
    while let Some(u) = queue.pop_front() {
        order.push(u);
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    let hit = order.iter().find_map(|&x| {
        adj[x]
            .iter()
            .find_map(|&y| common_neighbor(&adj, x, y).map(|z| (x, y, z)))
    });
    let Some((x, y, z)) = hit else {
        return Err(Error::Precondition(
            "component has no switcher (no triangle to switch parity)".into(),
        ));
    };
    let mut path = vec![x];
    let mut cur = x;
    while cur != start {
        cur = parent[cur].unwrap();
        path.push(cur);
    }
    path.reverse(); // start ..= x
    let mut walk = path.clone();
    walk.push(y);
    walk.push(z);
    // back from x to start, excluding start itself
    walk.extend(path.iter().rev().take(path.len() - 1));
    Ok(walk)
}

/// A walk joining one directed edge to another.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct StrongWitness {
    pub from: (Point, Point),
    pub to: (Point, Point),
    pub walk: Vec<Point>,
}

/// For every ordered pair of directed edges of a tightly connected 2-graph with
/// a switcher `ab`, a tight walk from the first to the second. Each walk goes
/// to `(a, b)`, reverses along `a b a`, and comes back out.
pub fn check_strong_connectivity(g: &KGraph) -> Result<Vec<StrongWitness>> {
    if g.k() != 2 {
        return Err(Error::InvalidParameter("strong connectivity is checked on 2-graphs".into()));
    }
    if !is_tightly_connected(g) {
        return Err(Error::Precondition("graph is not tightly connected".into()));
    }
    let Some([a, b]) = find_switchers(g).first().copied() else {
        return Err(Error::Precondition("graph has no switcher".into()));
    };
    let adj = g.adjacency();
    let parent = bfs_parents(&adj, a);
    let path_to_a = |v: Point| -> Vec<Point> {
        let mut p = vec![v];
        let mut cur = v;
        while cur != a {
            cur = parent[cur].unwrap();
            p.push(cur);
        }
        p
    };
    let directed: Vec<(Point, Point)> = g
        .edges()
        .iter()
        .flat_map(|e| [(e[0], e[1]), (e[1], e[0])])
        .collect();
    // walk from (u, v) ending in (a, b)
    let into_switcher = |(u, v): (Point, Point)| -> Vec<Point> {
        let mut w = vec![u];
        w.extend(path_to_a(v));
        w.push(b);
        w
    };
    let mut out = Vec::with_capacity(directed.len() * directed.len());
    for &d1 in &directed {
        let head = into_switcher(d1);
        for &d2 in &directed {
            // walk from (b, a) ending in d2: reverse of a walk from (y, x) into (a, b)
            let mut tail = into_switcher((d2.1, d2.0));
            tail.reverse();
            let mut walk = head.clone();
            walk.push(a); // ... a b a
            walk.extend_from_slice(&tail[2..]);
            out.push(StrongWitness {
                from: d1,
                to: d2,
                walk,
            });
        }
    }
    Ok(out)
}

/// A (1,k+1)-tuple `(i, v_1, …, v_{k+1})` joining two vicinity sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Arc {
    pub color: Color,
    pub points: Vec<Point>,
}

/// Exhaustive search for an arc: over sets S = {v_1, …, v_{k-2}} in the
/// vicinity's domain, the dropped point v_1, oriented edges (v_{k-1}, v_k) of
/// C_S, and extensions v_{k+1} along C_{S'} with S' = {v_2, …, v_{k-1}}.
/// Returns the first arc in that canonical order.
pub fn find_arc(vic: &Vicinity) -> Option<Arc> {
    for (s1, c1) in vic.iter() {
        for &v1 in s1 {
            let rest: Vec<Point> = s1.iter().copied().filter(|&x| x != v1).collect();
            for e in c1.edges() {
                for (vk1, vk) in [(e[0], e[1]), (e[1], e[0])] {
                    let mut s2 = rest.clone();
                    s2.push(vk1);
                    s2.sort_unstable();
                    let Some(c2) = vic.get(&s2) else { continue };
                    let adj_vk = c2.edges().iter().filter_map(|f| {
                        if f[0] == vk {
                            Some(f[1])
                        } else if f[1] == vk {
                            Some(f[0])
                        } else {
                            None
                        }
                    });
                    for vlast in adj_vk {
                        if vlast == v1 {
                            continue;
                        }
                        let mut points = vec![v1];
                        points.extend(&rest);
                        points.extend([vk1, vk, vlast]);
                        return Some(Arc {
                            color: vic.color(),
                            points,
                        });
                    }
                }
            }
        }
    }
    None
}

fn sorted(xs: &[Point]) -> Vec<Point> {
    let mut v = xs.to_vec();
    v.sort_unstable();
    v
}

/// Counters describing how a general walk was assembled.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BuildStats {
    /// Recursion levels of the coordinate-replacement induction.
    pub depth: usize,
    pub one_coordinate_calls: usize,
    pub same_set_calls: usize,
}

struct Builder<'a> {
    h: &'a OneKGraph,
    vic: &'a Vicinity,
    stats: BuildStats,
}

impl<'a> Builder<'a> {
    fn k(&self) -> usize {
        self.h.k()
    }

    fn c_set(&self, s: &[Point]) -> Result<&'a KGraph> {
        let key = sorted(s);
        let c = self.vic.get(&key).ok_or_else(|| {
            Error::Hypothesis(format!("{key:?} is not in the vicinity's domain"))
        })?;
        if !is_tightly_connected(c) {
            return Err(Error::Hypothesis(format!(
                "C_{key:?} is not tightly connected (V1)"
            )));
        }
        Ok(c)
    }

    /// Tight walk in C_S with an even number of points from d1 to d2.
    fn even_walk(&self, c: &KGraph, d1: (Point, Point), d2: (Point, Point)) -> Result<Vec<Point>> {
        for d in [d1, d2] {
            if !c.contains_unordered(&[d.0, d.1]) {
                return Err(Error::Hypothesis(format!("{d:?} is not an edge of C_S")));
            }
        }
        if d1 == d2 {
            return Ok(vec![d1.0, d1.1]);
        }
        let adj = c.adjacency();
        let path = bfs_path(&adj, d1.1, d2.0)
            .ok_or_else(|| Error::Hypothesis("C_S is not connected".into()))?;
        let mut walk = vec![d1.0];
        walk.extend(&path);
        walk.push(d2.1);
        if walk.len() % 2 == 1 {
            // splice an odd closed walk at d1.1 to flip parity
            let odd = odd_closed_tight_walk(c, d1.1).map_err(|e| match e {
                Error::Precondition(m) => Error::Hypothesis(format!("C_S: {m} (V3)")),
                other => other,
            })?;
            let mut flipped = vec![d1.0];
            flipped.extend(odd);
            flipped.extend(&walk[1..]);
            walk = flipped;
        }
        Ok(walk)
    }

    fn same_set(&mut self, s: &[Point], d1: (Point, Point), d2: (Point, Point)) -> Result<SeqWalk> {
        self.stats.same_set_calls += 1;
        let c = self.c_set(s)?;
        let even = self.even_walk(c, d1, d2)?;
        let mut points = Vec::with_capacity(even.len() / 2 * self.k());
        for pair in even.chunks(2) {
            points.extend_from_slice(s);
            points.extend_from_slice(pair);
        }
        let colors = vec![self.vic.color(); points.len() + 1 - self.k()];
        Ok(SeqWalk::open(colors, points))
    }

    fn one_coordinate(
        &mut self,
        s: &[Point],
        t: &[Point],
        d1: (Point, Point),
        d2: (Point, Point),
    ) -> Result<SeqWalk> {
        self.stats.one_coordinate_calls += 1;
        let cs = self.c_set(s)?;
        let ct = self.c_set(t)?;
        let shared = cs.first_common_edge(ct).ok_or_else(|| {
            Error::Hypothesis(format!("C_{:?} and C_{:?} share no edge (V2)", sorted(s), sorted(t)))
        })?;
        let d3 = (shared[0], shared[1]);
        let w1 = self.same_set(s, d1, d3)?;
        let w2 = self.same_set(t, d3, d2)?;
        Ok(juxtapose(&w1, &w2, self.k(), self.vic.color()))
    }

    fn general(
        &mut self,
        s: &[Point],
        t: &[Point],
        d1: (Point, Point),
        d2: (Point, Point),
        level: usize,
    ) -> Result<SeqWalk> {
        self.stats.depth = self.stats.depth.max(level);
        let diffs: Vec<usize> = (0..s.len()).filter(|&j| s[j] != t[j]).collect();
        match diffs.len() {
            0 => return self.same_set(s, d1, d2),
            1 => return self.one_coordinate(s, t, d1, d2),
            _ => {}
        }
        let cs = self.c_set(s)?;
        let ct = self.c_set(t)?;
        let shared = cs.first_common_edge(ct).ok_or_else(|| {
            Error::Hypothesis(format!("C_{:?} and C_{:?} share no edge (V2)", sorted(s), sorted(t)))
        })?;
        let p = shared[0];
        let r = diffs[0];
        let mut s2 = s.to_vec();
        s2[r] = p;
        let mut t2 = t.to_vec();
        t2[r] = p;
        let first_edge = |g: &KGraph| g.edges().first().map(|e| (e[0], e[1]));
        let d1b = first_edge(self.c_set(&s2)?).ok_or_else(|| Error::Hypothesis("empty C_S".into()))?;
        let d2b = first_edge(self.c_set(&t2)?).ok_or_else(|| Error::Hypothesis("empty C_T".into()))?;
        let w1 = self.one_coordinate(s, &s2, d1, d1b)?;
        let w2 = self.general(&s2, &t2, d1b, d2b, level + 1)?;
        let w3 = self.one_coordinate(&t2, t, d2b, d2)?;
        let k = self.k();
        join_at_tuple(&join_at_tuple(&w1, &w2, k)?, &w3, k)
    }

    fn checked(&self, w: SeqWalk) -> Result<SeqWalk> {
        match validate(self.h, &w)? {
            WalkCheck::Valid => Ok(w),
            WalkCheck::InvalidWindow(i) => Err(Error::Hypothesis(format!(
                "assembled walk leaves the generated graph at window {i}"
            ))),
        }
    }
}

fn check_tuple_args(h: &OneKGraph, vic: &Vicinity, tuples: &[&[Point]]) -> Result<()> {
    if h.k() < 3 {
        return Err(Error::InvalidParameter("walk builders need k ≥ 3".into()));
    }
    if h.k() != vic.k() {
        return Err(Error::InvalidParameter("vicinity and graph uniformity differ".into()));
    }
    for t in tuples {
        if t.len() != h.k() - 2 {
            return Err(Error::InvalidParameter(format!(
                "expected a ({})-tuple of points, got {t:?}",
                h.k() - 2
            )));
        }
    }
    Ok(())
}

/// Walk of length 0 mod k from `S·D1` to `S·D2`, both directed edges of C_S.
pub fn build_walk_same_set(
    h: &OneKGraph,
    vic: &Vicinity,
    s: &[Point],
    d1: (Point, Point),
    d2: (Point, Point),
) -> Result<SeqWalk> {
    check_tuple_args(h, vic, &[s])?;
    let mut b = Builder { h, vic, stats: BuildStats::default() };
    let w = b.same_set(s, d1, d2)?;
    b.checked(w)
}

/// Walk of length 0 mod k from `S·D1` to `T·D2` where S, T differ in one coordinate.
pub fn build_walk_one_coordinate(
    h: &OneKGraph,
    vic: &Vicinity,
    s: &[Point],
    t: &[Point],
    d1: (Point, Point),
    d2: (Point, Point),
) -> Result<SeqWalk> {
    check_tuple_args(h, vic, &[s, t])?;
    let diffs = s.iter().zip(t).filter(|(a, b)| a != b).count();
    if diffs != 1 {
        return Err(Error::InvalidParameter(format!(
            "tuples differ in {diffs} coordinates, expected 1"
        )));
    }
    let mut b = Builder { h, vic, stats: BuildStats::default() };
    let w = b.one_coordinate(s, t, d1, d2)?;
    b.checked(w)
}

/// Walk of length 0 mod k from `S·D1` to `T·D2` for arbitrary tuples, by
/// replacing differing coordinates one at a time.
pub fn build_walk_general(
    h: &OneKGraph,
    vic: &Vicinity,
    s: &[Point],
    t: &[Point],
    d1: (Point, Point),
    d2: (Point, Point),
) -> Result<(SeqWalk, BuildStats)> {
    check_tuple_args(h, vic, &[s, t])?;
    let mut b = Builder { h, vic, stats: BuildStats::default() };
    let w = b.general(s, t, d1, d2, 1)?;
    let w = b.checked(w)?;
    Ok((w, b.stats))
}

/// Closed walk of length 1 mod k with the arc it was built from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ClosedWalkWitness {
    pub arc: Arc,
    pub walk: SeqWalk,
}

/// From an arc `(i, v_1, …, v_{k+1})`: a walk of length 0 mod k from
/// `(v_2, …, v_{k+1})` to `(v_1, …, v_k)`, shortened, then closed by `v_{k+1}`.
pub fn closed_walk_one_mod_k(h: &OneKGraph, vic: &Vicinity) -> Result<ClosedWalkWitness> {
    let k = h.k();
    check_tuple_args(h, vic, &[])?;
    let arc = find_arc(vic).ok_or_else(|| {
        Error::Hypothesis(format!("vicinity of color {} admits no arc (V3)", vic.color()))
    })?;
    let v = &arc.points;
    let start_set = &v[1..k - 1];
    let start_edge = (v[k - 1], v[k]);
    let end_set = &v[..k - 2];
    let end_edge = (v[k - 2], v[k - 1]);
    let (w, _) = build_walk_general(h, vic, start_set, end_set, start_edge, end_edge)?;
    let w = shorten_walk(h, &w)?;
    let mut points = w.points.clone();
    points.push(v[k]);
    points.truncate(points.len() - k);
    let closed = SeqWalk::closed(vec![vic.color(); points.len()], points);
    match validate(h, &closed)? {
        WalkCheck::Valid => Ok(ClosedWalkWitness { arc, walk: closed }),
        WalkCheck::InvalidWindow(i) => Err(Error::Hypothesis(format!(
            "closing the walk failed at window {i}"
        ))),
    }
}

/// Closed walk of length ≡ `residue` (mod k) in color class `color`, found by
/// search over directed windows; independent of any vicinity.
pub fn find_closed_walk_with_residue(
    h: &OneKGraph,
    color: Color,
    residue: usize,
) -> Result<Option<SeqWalk>> {
    let k = h.k();
    let link = h.link(color, &[])?;
    // states: ordered k-tuples of edges
    let mut states: Vec<Vec<Point>> = Vec::new();
    for e in link.edges() {
        for p in e.iter().copied().permutations(k) {
            states.push(p);
        }
    }
    states.sort();
    let index: HashMap<&[Point], usize> =
        states.iter().enumerate().map(|(i, s)| (s.as_slice(), i)).collect();
    let succ: Vec<Vec<usize>> = states
        .iter()
        .map(|s| {
            (0..h.n())
                .filter_map(|y| {
                    let mut next = s[1..].to_vec();
                    next.push(y);
                    index.get(next.as_slice()).copied()
                })
                .collect()
        })
        .collect();
    let mut graph = petgraph::graph::DiGraph::<(), ()>::new();
    let nodes: Vec<_> = (0..states.len()).map(|_| graph.add_node(())).collect();
    for (u, list) in succ.iter().enumerate() {
        for &v in list {
            graph.add_edge(nodes[u], nodes[v], ());
        }
    }
    let residue = residue % k;
    let mut sccs = petgraph::algo::tarjan_scc(&graph);
    sccs.iter_mut().for_each(|c| c.sort());
    sccs.sort();
    for scc in sccs {
        let root = scc[0].index();
        // BFS over (state, steps mod k), starting one step out of the root
        let mut prev: HashMap<(usize, usize), Option<(usize, usize)>> = HashMap::new();
        let mut queue = VecDeque::new();
        let mut found = None;
        for &v in &succ[root] {
            let key = (v, 1 % k);
            if prev.insert(key, None).is_none() {
                queue.push_back(key);
            }
        }
        if prev.contains_key(&(root, residue)) {
            found = Some((root, residue));
        }
        'bfs: while let Some((u, r)) = queue.pop_front() {
            if found.is_some() {
                break;
            }
            for &v in &succ[u] {
                let key = (v, (r + 1) % k);
                if prev.contains_key(&key) {
                    continue;
                }
                prev.insert(key, Some((u, r)));
                if key == (root, residue) {
                    found = Some(key);
                    break 'bfs;
                }
                queue.push_back(key);
            }
        }
        let Some(end) = found else { continue };
        // reconstruct state sequence root -> ... -> root
        let mut seq = vec![end.0];
        let mut cur = end;
        while let Some(p) = prev[&cur] {
            seq.push(p.0);
            cur = p;
        }
        seq.push(root);
        seq.reverse(); // root, s1, ..., root
        // one new point per step; the closed walk is the first point of each state
        let points: Vec<Point> = seq[..seq.len() - 1].iter().map(|&s| states[s][0]).collect();
        let walk = SeqWalk::closed(vec![color; points.len()], points);
        debug_assert!(validate(h, &walk).map(|c| c.is_valid()).unwrap_or(false));
        return Ok(Some(walk));
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph2(n: usize, edges: &[[Point; 2]]) -> KGraph {
        KGraph::new(n, 2, edges.iter().map(|e| e.to_vec())).unwrap()
    }

    #[test]
    fn components_examples() {
        let tri = graph2(3, &[[0, 1], [1, 2], [0, 2]]);
        let d = tight_components(&tri);
        assert_eq!(d.sizes, vec![3]);
        let two = graph2(4, &[[0, 1], [2, 3]]);
        assert_eq!(tight_components(&two).sizes, vec![1, 1]);
    }

    #[test]
    fn switcher_examples() {
        let tri = graph2(3, &[[0, 1], [1, 2], [0, 2]]);
        assert_eq!(find_switchers(&tri).len(), 3);
        let path = graph2(3, &[[0, 1], [1, 2]]);
        assert!(find_switchers(&path).is_empty());
    }

    #[test]
    fn odd_walk_examples() {
        let tri = graph2(3, &[[0, 1], [1, 2], [0, 2]]);
        let w = odd_closed_tight_walk(&tri, 0).unwrap();
        assert_eq!(w.len(), 3);
        assert!(is_tight_walk(&tri, &w, true));

        let pendant = graph2(6, &[[0, 1], [1, 2], [0, 2], [2, 3], [3, 4], [4, 5]]);
        let w = odd_closed_tight_walk(&pendant, 5).unwrap();
        assert_eq!(w[0], 5);
        assert_eq!(w.len() % 2, 1);
        assert!(is_tight_walk(&pendant, &w, true));

        let square = graph2(4, &[[0, 1], [1, 2], [2, 3], [0, 3]]);
        let err = odd_closed_tight_walk(&square, 0).unwrap_err();
        assert!(err.to_string().contains("bipartite"));
    }

    #[test]
    fn strong_connectivity_triangle() {
        let tri = graph2(3, &[[0, 1], [1, 2], [0, 2]]);
        let ws = check_strong_connectivity(&tri).unwrap();
        assert_eq!(ws.len(), 36);
        for w in &ws {
            assert!(is_tight_walk(&tri, &w.walk, false));
            assert_eq!((w.walk[0], w.walk[1]), w.from);
            let l = w.walk.len();
            assert_eq!((w.walk[l - 2], w.walk[l - 1]), w.to);
        }
        let ab_to_ba = ws.iter().find(|w| w.from == (0, 1) && w.to == (1, 0)).unwrap();
        assert!(ab_to_ba.walk.windows(3).any(|t| t == [0, 1, 0]));
        let single = graph2(2, &[[0, 1]]);
        assert!(matches!(check_strong_connectivity(&single), Err(Error::Precondition(_))));
    }

    #[test]
    fn seq_tight_connectivity() {
        let g = OneKGraph::new(1, 6, 3, vec![(0, vec![0, 1, 2])]).unwrap();
        assert!(is_seq_tightly_connected(&g, 0).unwrap());
        let g = OneKGraph::new(1, 6, 3, vec![(0, vec![0, 1, 2]), (0, vec![3, 4, 5])]).unwrap();
        assert!(!is_seq_tightly_connected(&g, 0).unwrap());
    }

    #[test]
    fn residue_search_on_complete_color() {
        let g = OneKGraph::complete(1, 5, 3);
        let w = find_closed_walk_with_residue(&g, 0, 1).unwrap().unwrap();
        assert_eq!(w.len() % 3, 1);
        assert!(validate(&g, &w).unwrap().is_valid());
        // a single edge only closes up with length 0 mod 3
        let one = OneKGraph::new(1, 5, 3, vec![(0, vec![0, 1, 2])]).unwrap();
        assert!(find_closed_walk_with_residue(&one, 0, 1).unwrap().is_none());
        let w0 = find_closed_walk_with_residue(&one, 0, 0).unwrap().unwrap();
        assert_eq!(w0.len(), 3);
    }
}
