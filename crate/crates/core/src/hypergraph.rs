//! Uniform hypergraphs, graph systems and the auxiliary (1,k)-graph encoding.
//!
//! Points are `0..n`; colors are `0..colors` and live in their own namespace.
//! A (1,k)-graph edge is stored as `(color, sorted points)`, never as a flat set.

use std::collections::{BTreeMap, HashMap};

use itertools::Itertools;
use num::{One, Zero};

use serde::Serialize;

use crate::arith::{binomial, fraction_string, ratio, ser_ratio, to_f64, Ratio};
use crate::error::{Error, Result};

pub type Point = usize;
pub type Color = usize;

/// Validates and canonicalizes (sorts) a vertex set.
pub(crate) fn canonical_set(points: &[Point], n: usize, size: usize) -> Result<Vec<Point>> {
    if points.len() != size {
        return Err(Error::WrongUniformity {
            expected: size,
            got: points.len(),
        });
    }
    let mut sorted = points.to_vec();
    sorted.sort_unstable();
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            return Err(Error::RepeatedVertex(w[0]));
        }
    }
    if let Some(&v) = sorted.iter().find(|&&v| v >= n) {
        return Err(Error::VertexOutOfRange { vertex: v, n });
    }
    Ok(sorted)
}

fn check_subset(points: &[Point], n: usize) -> Result<Vec<Point>> {
    canonical_set(points, n, points.len())
}

/// True when sorted `small` is a subset of sorted `large`.
pub(crate) fn is_subset(small: &[Point], large: &[Point]) -> bool {
    let mut it = large.iter();
    small.iter().all(|x| it.by_ref().any(|y| y == x))
}

pub(crate) fn set_minus(large: &[Point], small: &[Point]) -> Vec<Point> {
    large.iter().copied().filter(|x| !small.contains(x)).collect()
}

/// Degree of a d-set (or (1,d)-set) with its relative value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DegreeReport {
    pub color: Option<Color>,
    pub subset: Vec<Point>,
    pub degree: u64,
    #[serde(serialize_with = "ser_ratio")]
    pub relative: Ratio,
}

impl DegreeReport {
    fn new(color: Option<Color>, subset: Vec<Point>, degree: u64, n: usize, k: usize) -> Self {
        let d = subset.len();
        let den = binomial(n - d, k - d);
        let relative = if den == 0 {
            Ratio::zero()
        } else {
            ratio(degree as u128, den)
        };
        Self {
            color,
            subset,
            degree,
            relative,
        }
    }

    pub fn relative_f64(&self) -> f64 {
        to_f64(&self.relative)
    }
}

/// A k-uniform hypergraph on points `0..n` with canonically ordered edges.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct KGraph {
    n: usize,
    k: usize,
    edges: Vec<Vec<Point>>,
}

impl KGraph {
    pub fn new<I>(n: usize, k: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = Vec<Point>>,
    {
        if k == 0 {
            return Err(Error::InvalidParameter("uniformity must be positive".into()));
        }
        let mut canon = Vec::new();
        for e in edges {
            canon.push(canonical_set(&e, n, k)?);
        }
        canon.sort();
        canon.dedup();
        Ok(Self { n, k, edges: canon })
    }

    pub fn empty(n: usize, k: usize) -> Self {
        Self {
            n,
            k,
            edges: Vec::new(),
        }
    }

    pub fn complete(n: usize, k: usize) -> Self {
        Self {
            n,
            k,
            edges: (0..n).combinations(k).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn edges(&self) -> &[Vec<Point>] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Membership test for a sorted edge.
    pub fn contains(&self, sorted_edge: &[Point]) -> bool {
        self.edges
            .binary_search_by(|e| e.as_slice().cmp(sorted_edge))
            .is_ok()
    }

    /// Membership test for an edge given in any order.
    pub fn contains_unordered(&self, edge: &[Point]) -> bool {
        let mut e = edge.to_vec();
        e.sort_unstable();
        self.contains(&e)
    }

    pub fn edge_density(&self) -> Ratio {
        let total = binomial(self.n, self.k);
        if total == 0 {
            Ratio::zero()
        } else {
            ratio(self.edges.len() as u128, total)
        }
    }

    pub fn degree(&self, subset: &[Point]) -> Result<DegreeReport> {
        let s = check_subset(subset, self.n)?;
        if s.len() >= self.k {
            return Err(Error::InvalidParameter(format!(
                "degree of a {}-set in a {}-graph",
                s.len(),
                self.k
            )));
        }
        let deg = self.edges.iter().filter(|e| is_subset(&s, e)).count() as u64;
        Ok(DegreeReport::new(None, s, deg, self.n, self.k))
    }

    /// Degrees of all d-subsets contained in some edge.
    pub fn degree_table(&self, d: usize) -> HashMap<Vec<Point>, u64> {
        let mut table = HashMap::new();
        for e in &self.edges {
            for s in e.iter().copied().combinations(d) {
                *table.entry(s).or_insert(0) += 1;
            }
        }
        table
    }

    /// Minimum degree over all d-subsets; first minimizer in lexicographic order.
    pub fn min_degree(&self, d: usize) -> Result<DegreeReport> {
        if d == 0 || d >= self.k {
            return Err(Error::InvalidParameter(format!(
                "d = {d} not in [1, {}]",
                self.k - 1
            )));
        }
        let table = self.degree_table(d);
        let best = (0..self.n)
            .combinations(d)
            .map(|s| {
                let deg = table.get(&s).copied().unwrap_or(0);
                (deg, s)
            })
            .min_by_key(|(deg, _)| *deg);
        let (deg, s) = best.unwrap_or((0, (0..d).collect()));
        Ok(DegreeReport::new(None, s, deg, self.n, self.k))
    }

    /// Link of a vertex set: the `(k - |S|)`-graph `{X : X ∪ S ∈ E}`.
    pub fn link(&self, subset: &[Point]) -> Result<KGraph> {
        let s = check_subset(subset, self.n)?;
        if s.len() >= self.k {
            return Err(Error::InvalidParameter("link of a set of size ≥ k".into()));
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| is_subset(&s, e))
            .map(|e| set_minus(e, &s))
            .collect();
        Ok(KGraph {
            n: self.n,
            k: self.k - s.len(),
            edges: sorted_dedup(edges),
        })
    }

    pub fn vertex_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for e in &self.edges {
            for &v in e {
                deg[v] += 1;
            }
        }
        deg
    }

    pub fn non_isolated(&self) -> Vec<Point> {
        self.vertex_degrees()
            .iter()
            .enumerate()
            .filter(|(_, &d)| d > 0)
            .map(|(v, _)| v)
            .collect()
    }

    /// Adjacency lists; meaningful for 2-graphs.
    pub fn adjacency(&self) -> Vec<Vec<Point>> {
        let mut adj = vec![Vec::new(); self.n];
        for e in &self.edges {
            for &a in e {
                for &b in e {
                    if a != b {
                        adj[a].push(b);
                    }
                }
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }

    /// Shared edges (sorted-merge intersection).
    pub fn common_edges(&self, other: &KGraph) -> Vec<Vec<Point>> {
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < self.edges.len() && j < other.edges.len() {
            match self.edges[i].cmp(&other.edges[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    out.push(self.edges[i].clone());
                    i += 1;
                    j += 1;
                }
            }
        }
        out
    }

    pub fn first_common_edge(&self, other: &KGraph) -> Option<Vec<Point>> {
        let (mut i, mut j) = (0, 0);
        while i < self.edges.len() && j < other.edges.len() {
            match self.edges[i].cmp(&other.edges[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return Some(self.edges[i].clone()),
            }
        }
        None
    }

    /// Edges avoiding `v`.
    pub fn without_vertex(&self, v: Point) -> KGraph {
        KGraph {
            n: self.n,
            k: self.k,
            edges: self
                .edges
                .iter()
                .filter(|e| !e.contains(&v))
                .cloned()
                .collect(),
        }
    }

    pub(crate) fn from_sorted_unchecked(n: usize, k: usize, edges: Vec<Vec<Point>>) -> Self {
        debug_assert!(edges.windows(2).all(|w| w[0] < w[1]));
        Self { n, k, edges }
    }
}

/// n k-graphs on a common point set `0..n`; index = color.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphSystem {
    n: usize,
    k: usize,
    graphs: Vec<KGraph>,
}

impl GraphSystem {
    pub fn new(graphs: Vec<KGraph>) -> Result<Self> {
        let n = graphs.len();
        let k = graphs.first().map(|g| g.k()).unwrap_or(0);
        for (c, g) in graphs.iter().enumerate() {
            if g.n() != n {
                return Err(Error::Instance(format!(
                    "graph {c} has {} points, system has {n} colors",
                    g.n()
                )));
            }
            if g.k() != k {
                return Err(Error::Instance(format!(
                    "graph {c} is {}-uniform, expected {k}",
                    g.k()
                )));
            }
        }
        Ok(Self { n, k, graphs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn graphs(&self) -> &[KGraph] {
        &self.graphs
    }

    pub fn graph(&self, color: Color) -> &KGraph {
        &self.graphs[color]
    }

    /// Minimum over colors of the per-graph minimum d-degree.
    pub fn min_degree(&self, d: usize) -> Result<(Color, DegreeReport)> {
        let mut best: Option<(Color, DegreeReport)> = None;
        for (c, g) in self.graphs.iter().enumerate() {
            let r = g.min_degree(d)?;
            if best.as_ref().is_none_or(|(_, b)| r.degree < b.degree) {
                best = Some((c, r));
            }
        }
        best.ok_or_else(|| Error::Instance("empty system".into()))
    }
}

/// A (1,k)-graph: every edge is one color together with k points.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OneKGraph {
    colors: usize,
    n: usize,
    k: usize,
    /// Sorted by (points, color).
    edges: Vec<(Vec<Point>, Color)>,
}

impl OneKGraph {
    pub fn new<I>(colors: usize, n: usize, k: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Color, Vec<Point>)>,
    {
        let mut canon = Vec::new();
        for (c, e) in edges {
            if c >= colors {
                return Err(Error::ColorOutOfRange { color: c, count: colors });
            }
            canon.push((canonical_set(&e, n, k)?, c));
        }
        canon.sort();
        canon.dedup();
        Ok(Self {
            colors,
            n,
            k,
            edges: canon,
        })
    }

    pub fn empty(colors: usize, n: usize, k: usize) -> Self {
        Self {
            colors,
            n,
            k,
            edges: Vec::new(),
        }
    }

    /// Every color with every k-set of points.
    pub fn complete(colors: usize, n: usize, k: usize) -> Self {
        let mut edges = Vec::new();
        for e in (0..n).combinations(k) {
            for c in 0..colors {
                edges.push((e.clone(), c));
            }
        }
        Self {
            colors,
            n,
            k,
            edges,
        }
    }

    pub(crate) fn from_sorted_unchecked(
        colors: usize,
        n: usize,
        k: usize,
        edges: Vec<(Vec<Point>, Color)>,
    ) -> Self {
        Self {
            colors,
            n,
            k,
            edges,
        }
    }

    pub fn colors(&self) -> usize {
        self.colors
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Edges as `(color, points)` in canonical order (points, then color).
    pub fn edges(&self) -> impl Iterator<Item = (Color, &[Point])> + '_ {
        self.edges.iter().map(|(e, c)| (*c, e.as_slice()))
    }

    pub fn contains(&self, color: Color, sorted_points: &[Point]) -> bool {
        self.edges
            .binary_search_by(|(e, c)| (e.as_slice(), *c).cmp(&(sorted_points, color)))
            .is_ok()
    }

    pub fn contains_unordered(&self, color: Color, points: &[Point]) -> bool {
        let mut e = points.to_vec();
        e.sort_unstable();
        self.contains(color, &e)
    }

    fn check_color(&self, color: Color) -> Result<()> {
        if color >= self.colors {
            Err(Error::ColorOutOfRange {
                color,
                count: self.colors,
            })
        } else {
            Ok(())
        }
    }

    /// Degree of the (1,d)-set `{color} ∪ points`.
    pub fn degree(&self, color: Color, points: &[Point]) -> Result<DegreeReport> {
        self.check_color(color)?;
        let s = check_subset(points, self.n)?;
        if s.len() >= self.k {
            return Err(Error::InvalidParameter(format!(
                "degree of a (1,{})-set in a (1,{})-graph",
                s.len(),
                self.k
            )));
        }
        let deg = self
            .edges
            .iter()
            .filter(|(e, c)| *c == color && is_subset(&s, e))
            .count() as u64;
        Ok(DegreeReport::new(Some(color), s, deg, self.n, self.k))
    }

    /// Degrees of every (1,d)-set contained in an edge.
    pub fn degree_table(&self, d: usize) -> HashMap<(Color, Vec<Point>), u64> {
        let mut table = HashMap::new();
        for (e, c) in &self.edges {
            for s in e.iter().copied().combinations(d) {
                *table.entry((*c, s)).or_insert(0) += 1;
            }
        }
        table
    }

    /// Minimum over all (1,d)-sets, ordered by points then color.
    pub fn min_degree(&self, d: usize) -> Result<DegreeReport> {
        if d == 0 || d >= self.k {
            return Err(Error::InvalidParameter(format!(
                "d = {d} not in [1, {}]",
                self.k - 1
            )));
        }
        let table = self.degree_table(d);
        let mut best: Option<(u64, Color, Vec<Point>)> = None;
        for s in (0..self.n).combinations(d) {
            for c in 0..self.colors {
                let deg = table.get(&(c, s.clone())).copied().unwrap_or(0);
                if best.as_ref().is_none_or(|(b, _, _)| deg < *b) {
                    best = Some((deg, c, s.clone()));
                }
            }
        }
        let (deg, c, s) = best.unwrap_or((0, 0, (0..d).collect()));
        Ok(DegreeReport::new(Some(c), s, deg, self.n, self.k))
    }

    /// The shadow at level j: every (1,j)-subset of every edge, once.
    pub fn shadow(&self, j: usize) -> Result<OneKGraph> {
        if j > self.k {
            return Err(Error::InvalidParameter(format!(
                "shadow level {j} exceeds uniformity {}",
                self.k
            )));
        }
        let mut edges: Vec<(Vec<Point>, Color)> = self
            .edges
            .iter()
            .flat_map(|(e, c)| e.iter().copied().combinations(j).map(move |s| (s, *c)))
            .collect();
        edges.sort();
        edges.dedup();
        Ok(OneKGraph {
            colors: self.colors,
            n: self.n,
            k: j,
            edges,
        })
    }

    /// Link (k-ℓ)-graph of the (1,ℓ)-set `{color} ∪ points`.
    pub fn link(&self, color: Color, points: &[Point]) -> Result<KGraph> {
        self.check_color(color)?;
        let s = check_subset(points, self.n)?;
        if s.len() >= self.k {
            return Err(Error::InvalidParameter(format!(
                "link of a (1,{})-set in a (1,{})-graph",
                s.len(),
                self.k
            )));
        }
        let edges: Vec<Vec<Point>> = self
            .edges
            .iter()
            .filter(|(e, c)| *c == color && is_subset(&s, e))
            .map(|(e, _)| set_minus(e, &s))
            .collect();
        Ok(KGraph::from_sorted_unchecked(
            self.n,
            self.k - s.len(),
            sorted_dedup(edges),
        ))
    }

    /// Link of a set containing two colors is rejected.
    pub fn link_of_colors(&self, colors: &[Color], points: &[Point]) -> Result<KGraph> {
        match colors {
            [c] => self.link(*c, points),
            _ => Err(Error::InvalidParameter(format!(
                "a link set must contain exactly one color, got {}",
                colors.len()
            ))),
        }
    }

    /// Sub-(1,k)-graph on the colors accepted by `keep` (same namespaces).
    pub fn restrict_colors<F: Fn(Color) -> bool>(&self, keep: F) -> OneKGraph {
        OneKGraph {
            colors: self.colors,
            n: self.n,
            k: self.k,
            edges: self
                .edges
                .iter()
                .filter(|(_, c)| keep(*c))
                .cloned()
                .collect(),
        }
    }

    pub fn colors_in_use(&self) -> Vec<Color> {
        let mut cs: Vec<Color> = self.edges.iter().map(|(_, c)| *c).collect();
        cs.sort_unstable();
        cs.dedup();
        cs
    }

    /// Union with another (1,k)-graph on the same namespaces.
    pub fn union(&self, other: &OneKGraph) -> Result<OneKGraph> {
        if (self.colors, self.n, self.k) != (other.colors, other.n, other.k) {
            return Err(Error::InvalidParameter("union of incompatible (1,k)-graphs".into()));
        }
        let mut edges = self.edges.clone();
        edges.extend(other.edges.iter().cloned());
        Ok(OneKGraph {
            colors: self.colors,
            n: self.n,
            k: self.k,
            edges: sorted_dedup(edges),
        })
    }

    /// Edge set difference.
    pub fn minus(&self, other: &OneKGraph) -> OneKGraph {
        OneKGraph {
            colors: self.colors,
            n: self.n,
            k: self.k,
            edges: self
                .edges
                .iter()
                .filter(|(e, c)| !other.contains(*c, e))
                .cloned()
                .collect(),
        }
    }

    pub fn is_subgraph_of(&self, other: &OneKGraph) -> bool {
        self.edges.iter().all(|(e, c)| other.contains(*c, e))
    }

    /// Flattens to a (k+1)-graph on `n + colors` vertices; color c becomes vertex `n + c`.
    pub fn as_uniform(&self) -> KGraph {
        let edges = self
            .edges
            .iter()
            .map(|(e, c)| {
                let mut f = e.clone();
                f.push(self.n + c);
                f
            })
            .collect();
        KGraph::from_sorted_unchecked(self.n + self.colors, self.k + 1, sorted_dedup(edges))
    }
}

pub(crate) fn sorted_dedup<T: Ord>(mut v: Vec<T>) -> Vec<T> {
    v.sort();
    v.dedup();
    v
}

/// Edges `(i, e)` for every `e ∈ E(H_i)`.
pub fn system_to_onek(sys: &GraphSystem) -> OneKGraph {
    let mut edges = Vec::new();
    for (c, g) in sys.graphs().iter().enumerate() {
        for e in g.edges() {
            edges.push((e.clone(), c));
        }
    }
    OneKGraph::from_sorted_unchecked(sys.n(), sys.n(), sys.k(), sorted_dedup(edges))
}

/// Inverse of [`system_to_onek`] for square (1,k)-graphs.
pub fn onek_to_system(g: &OneKGraph) -> Result<GraphSystem> {
    if g.colors() != g.n() {
        return Err(Error::InvalidParameter(
            "a graph system needs as many colors as points".into(),
        ));
    }
    let mut per_color = vec![Vec::new(); g.colors()];
    for (c, e) in g.edges() {
        per_color[c].push(e.to_vec());
    }
    let graphs = per_color
        .into_iter()
        .map(|edges| KGraph::from_sorted_unchecked(g.n(), g.k(), sorted_dedup(edges)))
        .collect();
    GraphSystem::new(graphs)
}

/// One level j of the perturbed-degree check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PerturbedLevel {
    pub j: usize,
    /// Shadow (1,j)-sets whose relative degree is below δ.
    pub p1_violations: Vec<(Color, Vec<Point>, Ratio)>,
    /// Density of the complement of the j-th shadow.
    pub p2_density: Ratio,
    pub p2_holds: bool,
    /// (1,j-1)-sets of the previous shadow with relative degree ≥ α in the complement.
    pub p3_violations: Vec<(Color, Vec<Point>, Ratio)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PerturbedDegreeReport {
    pub alpha: Ratio,
    pub delta: Ratio,
    pub colors: Vec<Color>,
    pub levels: Vec<PerturbedLevel>,
}

impl PerturbedDegreeReport {
    pub fn holds(&self) -> bool {
        self.levels
            .iter()
            .all(|l| l.p1_violations.is_empty() && l.p2_holds && l.p3_violations.is_empty())
    }

    pub fn summary(&self) -> String {
        let parts: Vec<String> = self
            .levels
            .iter()
            .map(|l| {
                format!(
                    "j={}: P1 {} violations, P2 density {}, P3 {} violations",
                    l.j,
                    l.p1_violations.len(),
                    fraction_string(&l.p2_density),
                    l.p3_violations.len()
                )
            })
            .collect();
        parts.join("; ")
    }
}

/// Checks P1-P3 for every level j in [k-2], over all colors of the namespace.
pub fn check_perturbed_degree(r: &OneKGraph, alpha: &Ratio, delta: &Ratio) -> PerturbedDegreeReport {
    let colors: Vec<Color> = (0..r.colors()).collect();
    check_perturbed_degree_for(r, &colors, alpha, delta)
}

/// Checks P1-P3 with (1,j)-sets restricted to the given colors.
pub fn check_perturbed_degree_for(
    r: &OneKGraph,
    colors: &[Color],
    alpha: &Ratio,
    delta: &Ratio,
) -> PerturbedDegreeReport {
    let (n, k) = (r.n(), r.k());
    let in_scope: Vec<bool> = (0..r.colors()).map(|c| colors.contains(&c)).collect();
    let mut levels = Vec::new();
    for j in 1..k.saturating_sub(1) {
        // Degrees of shadow (1,j)-sets, keyed in canonical order.
        let table: BTreeMap<(Color, Vec<Point>), u64> = r
            .edges
            .iter()
            .filter(|(_, c)| in_scope[*c])
            .flat_map(|(e, c)| e.iter().copied().combinations(j).map(move |s| (*c, s)))
            .fold(BTreeMap::new(), |mut m, key| {
                *m.entry(key).or_insert(0) += 1;
                m
            });
        let p1_den = binomial(n - j, k - j);
        let p1_violations = table
            .iter()
            .filter_map(|((c, s), &deg)| {
                let rel = ratio(deg as u128, p1_den);
                (rel < *delta).then(|| (*c, s.clone(), rel))
            })
            .collect();

        let total = colors.len() as u128 * binomial(n, j);
        let missing = total - table.len() as u128;
        let p2_density = if total == 0 {
            Ratio::zero()
        } else {
            ratio(missing, total)
        };
        let p2_holds = p2_density <= *alpha;

        // Previous shadow level: (1,j-1)-sets inside some edge.
        let previous: Vec<(Color, Vec<Point>)> = r
            .edges
            .iter()
            .filter(|(_, c)| in_scope[*c])
            .flat_map(|(e, c)| e.iter().copied().combinations(j - 1).map(move |s| (*c, s)))
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect();
        let p3_den = (n - (j - 1)) as u128;
        let mut p3_violations = Vec::new();
        for (c, t) in previous {
            let mut absent = 0u128;
            for v in 0..n {
                if t.contains(&v) {
                    continue;
                }
                let mut ext = t.clone();
                ext.push(v);
                ext.sort_unstable();
                if !table.contains_key(&(c, ext)) {
                    absent += 1;
                }
            }
            let rel = ratio(absent, p3_den);
            if rel >= *alpha {
                p3_violations.push((c, t, rel));
            }
        }
        levels.push(PerturbedLevel {
            j,
            p1_violations,
            p2_density,
            p2_holds,
            p3_violations,
        });
    }
    PerturbedDegreeReport {
        alpha: alpha.clone(),
        delta: delta.clone(),
        colors: colors.to_vec(),
        levels,
    }
}

/// Relative (1,k-2)-degree minimum of a single color class, over all (1,k-2)-sets.
pub fn min_relative_codegree(r: &OneKGraph, color: Color) -> Ratio {
    let d = r.k().saturating_sub(2);
    if d == 0 {
        let total = binomial(r.n(), r.k());
        let count = r.edges().filter(|(c, _)| *c == color).count() as u128;
        return if total == 0 { Ratio::one() } else { ratio(count, total) };
    }
    let sub = r.restrict_colors(|c| c == color);
    let table = sub.degree_table(d);
    let den = binomial(r.n() - d, r.k() - d);
    (0..r.n())
        .combinations(d)
        .map(|s| ratio(table.get(&(color, s)).copied().unwrap_or(0) as u128, den))
        .min()
        .unwrap_or_else(Ratio::one)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_in_complete_graph() {
        let h = KGraph::complete(6, 3);
        let r = h.degree(&[0]).unwrap();
        assert_eq!(r.degree, 10);
        assert_eq!(r.relative, Ratio::one());
    }

    #[test]
    fn degree_single_edge() {
        let h = KGraph::new(5, 3, vec![vec![2, 0, 1]]).unwrap();
        let r = h.degree(&[1, 0]).unwrap();
        assert_eq!(r.degree, 1);
        assert_eq!(r.relative, ratio(1, 3));
        let empty = KGraph::empty(5, 3);
        assert_eq!(empty.degree(&[4]).unwrap().degree, 0);
        assert!(empty.degree(&[4]).unwrap().relative.is_zero());
    }

    #[test]
    fn degree_errors() {
        let h = KGraph::complete(5, 3);
        assert_eq!(
            h.degree(&[7]),
            Err(Error::VertexOutOfRange { vertex: 7, n: 5 })
        );
        assert!(h.degree(&[0, 1, 2]).is_err());
        assert!(KGraph::new(5, 3, vec![vec![0, 0, 1]]).is_err());
        assert!(KGraph::new(5, 3, vec![vec![0, 1]]).is_err());
    }

    #[test]
    fn min_degree_examples() {
        let k5 = KGraph::complete(5, 3);
        assert_eq!(k5.min_degree(1).unwrap().relative, Ratio::one());
        let minus = KGraph::new(
            5,
            3,
            k5.edges().iter().filter(|e| **e != vec![0, 1, 2]).cloned(),
        )
        .unwrap();
        let r = minus.min_degree(2).unwrap();
        assert_eq!(r.degree, 2);
        assert_eq!(r.subset, vec![0, 1]);
    }

    #[test]
    fn shadow_of_single_edge() {
        let g = OneKGraph::new(2, 4, 3, vec![(1, vec![0, 1, 2])]).unwrap();
        let sh = g.shadow(2).unwrap();
        let edges: Vec<(Color, Vec<Point>)> = sh.edges().map(|(c, e)| (c, e.to_vec())).collect();
        assert_eq!(edges, vec![(1, vec![0, 1]), (1, vec![0, 2]), (1, vec![1, 2])]);
        assert!(OneKGraph::empty(2, 4, 3).shadow(1).unwrap().is_empty());
    }

    #[test]
    fn link_examples() {
        let g = OneKGraph::new(1, 4, 3, (0..4).combinations(3).map(|e| (0, e))).unwrap();
        let l = g.link(0, &[0]).unwrap();
        assert_eq!(l.k(), 2);
        assert_eq!(l.edges(), &[vec![1, 2], vec![1, 3], vec![2, 3]]);
        let l1 = g.link(0, &[0, 1]).unwrap();
        assert_eq!(l1.k(), 1);
        assert_eq!(l1.edges(), &[vec![2], vec![3]]);
        assert!(g.link_of_colors(&[0, 0], &[0]).is_err());
    }

    #[test]
    fn system_conversion() {
        let empty = GraphSystem::new(vec![KGraph::empty(4, 3); 4]).unwrap();
        assert!(system_to_onek(&empty).is_empty());
        let mut graphs = vec![KGraph::empty(4, 3); 4];
        graphs[1] = KGraph::new(4, 3, vec![vec![0, 1, 2]]).unwrap();
        let sys = GraphSystem::new(graphs).unwrap();
        let g = system_to_onek(&sys);
        assert_eq!(g.edge_count(), 1);
        assert!(g.contains(1, &[0, 1, 2]));
        assert_eq!(onek_to_system(&g).unwrap(), sys);
        let complete = GraphSystem::new(vec![KGraph::complete(5, 3); 5]).unwrap();
        assert_eq!(system_to_onek(&complete).edge_count(), 50);
    }

    #[test]
    fn perturbed_degree_complete_and_empty() {
        let complete = OneKGraph::complete(4, 7, 3);
        let rep = check_perturbed_degree(&complete, &ratio(1, 100), &Ratio::one());
        assert!(rep.holds());
        assert_eq!(rep.levels.len(), 1);
        assert!(rep.levels[0].p2_density.is_zero());

        let empty = OneKGraph::empty(4, 7, 3);
        let rep = check_perturbed_degree(&empty, &ratio(1, 100), &ratio(1, 2));
        assert!(!rep.holds());
        assert_eq!(rep.levels[0].p2_density, Ratio::one());
    }
}
