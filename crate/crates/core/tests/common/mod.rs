//! Independent oracles shared by the integration tests. Nothing here calls
//! the search or matching code it is used to check.

#![allow(dead_code)]

use itertools::Itertools;
use rainbow_core::hypergraph::{GraphSystem, KGraph, OneKGraph, Point};
use rainbow_core::sequential::SeqWalk;

/// Edge test by linear scan, independent of the graph's own lookup.
pub fn has_edge(g: &KGraph, points: &[Point]) -> bool {
    let mut s = points.to_vec();
    s.sort_unstable();
    g.edges().contains(&s)
}

/// Does some anchored cyclic order admit a color bijection? Orders fix point
/// 0 first; bijections are enumerated window by window.
pub fn brute_force_rainbow(sys: &GraphSystem) -> bool {
    let (n, k) = (sys.n(), sys.k());
    for rest in (1..n).permutations(n - 1) {
        let mut order = vec![0];
        order.extend(rest);
        let admissible: Vec<Vec<usize>> = (0..n)
            .map(|i| {
                let w: Vec<Point> = (0..k).map(|j| order[(i + j) % n]).collect();
                (0..n).filter(|&c| has_edge(sys.graph(c), &w)).collect()
            })
            .collect();
        if admissible.iter().any(|a| a.is_empty()) {
            continue;
        }
        fn assign(i: usize, adm: &[Vec<usize>], used: &mut [bool]) -> bool {
            if i == adm.len() {
                return true;
            }
            for &c in &adm[i] {
                if !used[c] {
                    used[c] = true;
                    if assign(i + 1, adm, used) {
                        return true;
                    }
                    used[c] = false;
                }
            }
            false
        }
        if assign(0, &admissible, &mut vec![false; n]) {
            return true;
        }
    }
    false
}

/// Replays a claimed rainbow Hamilton cycle window by window.
pub fn replay_hamilton(sys: &GraphSystem, w: &SeqWalk) -> bool {
    let (n, k) = (sys.n(), sys.k());
    if !w.closed || w.points.len() != n || w.colors.len() != n {
        return false;
    }
    let mut p = w.points.clone();
    p.sort_unstable();
    let mut c = w.colors.clone();
    c.sort_unstable();
    if p != (0..n).collect::<Vec<_>>() || c != (0..n).collect::<Vec<_>>() {
        return false;
    }
    (0..n).all(|i| {
        let win: Vec<Point> = (0..k).map(|j| w.points[(i + j) % n]).collect();
        has_edge(sys.graph(w.colors[i]), &win)
    })
}

/// Replays a (1,k)-walk against the graph's edge list.
pub fn replay_walk(g: &OneKGraph, w: &SeqWalk) -> bool {
    let k = g.k();
    let len = w.points.len();
    let windows = if w.closed { len } else { (len + 1).saturating_sub(k) };
    if w.colors.len() != windows {
        return false;
    }
    (0..windows).all(|i| {
        let mut win: Vec<Point> = (0..k).map(|j| w.points[(i + j) % len]).collect();
        win.sort_unstable();
        g.edges().any(|(c, e)| c == w.colors[i] && e == win.as_slice())
    })
}

/// Maximum integral matching of a 2-graph by exhaustive recursion.
pub fn matching_number(g: &KGraph) -> usize {
    fn go(edges: &[Vec<Point>], used: &mut Vec<bool>, from: usize) -> usize {
        let mut best = 0;
        for i in from..edges.len() {
            let (a, b) = (edges[i][0], edges[i][1]);
            if used[a] || used[b] {
                continue;
            }
            used[a] = true;
            used[b] = true;
            best = best.max(1 + go(edges, used, i + 1));
            used[a] = false;
            used[b] = false;
        }
        best
    }
    go(g.edges(), &mut vec![false; g.n()], 0)
}

/// Consecutive pairs are edges; for closed walks the pair wrapping around too.
pub fn is_graph_walk(g: &KGraph, points: &[Point], closed: bool) -> bool {
    let len = points.len();
    let steps = if closed { len } else { len.saturating_sub(1) };
    len >= 2 && (0..steps).all(|i| has_edge(g, &[points[i], points[(i + 1) % len]]))
}

/// Every 2-graph on `n` labelled vertices, in bitmask order.
pub fn all_graphs(n: usize) -> impl Iterator<Item = KGraph> {
    let pairs: Vec<Vec<Point>> = (0..n).combinations(2).collect();
    (0u64..1 << pairs.len()).map(move |mask| {
        let edges = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, e)| e.clone());
        KGraph::new(n, 2, edges).unwrap()
    })
}

/// Connected edge set: the 2-graph reading of tight connectivity.
pub fn edges_connected(g: &KGraph) -> bool {
    let edges = g.edges();
    if edges.is_empty() {
        return false;
    }
    let mut seen = vec![false; edges.len()];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(i) = stack.pop() {
        for j in 0..edges.len() {
            if !seen[j] && edges[j].iter().any(|v| edges[i].contains(v)) {
                seen[j] = true;
                stack.push(j);
            }
        }
    }
    seen.iter().all(|&s| s)
}

pub fn has_triangle(g: &KGraph) -> bool {
    (0..g.n()).combinations(3).any(|t| {
        has_edge(g, &[t[0], t[1]]) && has_edge(g, &[t[0], t[2]]) && has_edge(g, &[t[1], t[2]])
    })
}
