//! Instance generators and the X-trap checker.

use std::collections::HashMap;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{check_unit_interval, ratio, to_f64, Ratio};
use crate::error::{Error, Result};
use crate::hypergraph::{GraphSystem, KGraph, Point};

pub fn complete_system(n: usize, k: usize) -> Result<GraphSystem> {
    if k == 0 || n < k {
        return Err(Error::InvalidParameter(format!("complete system needs 1 ≤ k ≤ n, got n={n}, k={k}")));
    }
    GraphSystem::new((0..n).map(|_| KGraph::complete(n, k)).collect())
}

/// Relative (k-2)-degree floor of a graph; for k = 2 this is the edge density.
fn min_rel_codegree(g: &KGraph) -> Ratio {
    let d = g.k() - 2;
    if d == 0 {
        return g.edge_density();
    }
    g.min_degree(d).map(|r| r.relative).unwrap_or_default()
}

fn sample_color(n: usize, k: usize, target: &Ratio, seed: u64, color: usize) -> Result<KGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(color as u64);
    let p = to_f64(target);
    let edges: Vec<Vec<Point>> = (0..n).combinations(k).filter(|_| rng.gen_bool(p)).collect();
    let g = KGraph::new(n, k, edges)?;
    if p == 0.0 {
        return Ok(g);
    }
    repair(g, target)
}

/// Adds edges through the current minimum-degree (k-2)-set until the
/// floor reaches `target`. Each step takes the non-edge covering the most
/// minimum-degree sets, first in canonical order on ties.
fn repair(g: KGraph, target: &Ratio) -> Result<KGraph> {
    let (n, k) = (g.n(), g.k());
    let d = k - 2;
    let den = crate::arith::binomial(n - d, 2);
    let mut edges: std::collections::BTreeSet<Vec<Point>> = g.edges().iter().cloned().collect();
    let mut deg: HashMap<Vec<Point>, u64> = (0..n).combinations(d).map(|s| (s, 0)).collect();
    for e in &edges {
        for s in e.iter().copied().combinations(d) {
            *deg.get_mut(&s).unwrap() += 1;
        }
    }
    loop {
        let (low, s) = deg
            .iter()
            .map(|(s, &v)| (v, s.clone()))
            .min()
            .unwrap_or((den as u64, Vec::new()));
        if ratio(low as u128, den) >= *target {
            break;
        }
        let rest: Vec<Point> = (0..n).filter(|v| !s.contains(v)).collect();
        let best = rest
            .iter()
            .copied()
            .combinations(2)
            .map(|pair| {
                let mut e = s.clone();
                e.extend(pair);
                e.sort_unstable();
                e
            })
            .filter(|e| !edges.contains(e))
            .map(|e| {
                let gain = e.iter().copied().combinations(d).filter(|t| deg[t] == low).count();
                (std::cmp::Reverse(gain), e)
            })
            .min();
        let Some((_, e)) = best else {
            return Err(Error::InvalidParameter("degree target unreachable".into()));
        };
        for t in e.iter().copied().combinations(d) {
            *deg.get_mut(&t).unwrap() += 1;
        }
        edges.insert(e);
    }
    KGraph::new(n, k, edges)
}

/// Independent edge sampling at rate `target` per color, then degree repair.
/// Colors use separate ChaCha streams of one seed, so `jobs` never changes the output.
pub fn random_system(n: usize, k: usize, target: &Ratio, seed: u64) -> Result<GraphSystem> {
    random_system_jobs(n, k, target, seed, 1)
}

pub fn random_system_jobs(n: usize, k: usize, target: &Ratio, seed: u64, jobs: usize) -> Result<GraphSystem> {
    check_unit_interval("target", target)?;
    if k < 2 || n < k {
        return Err(Error::InvalidParameter(format!("random system needs 2 ≤ k ≤ n, got n={n}, k={k}")));
    }
    let graphs: Result<Vec<KGraph>> = if jobs > 1 {
        (0..n).into_par_iter().map(|c| sample_color(n, k, target, seed, c)).collect()
    } else {
        (0..n).map(|c| sample_color(n, k, target, seed, c)).collect()
    };
    GraphSystem::new(graphs?)
}

/// Minimum relative (k-2)-degree over all colors.
pub fn achieved_degree(sys: &GraphSystem) -> Ratio {
    sys.graphs().iter().map(min_rel_codegree).min().unwrap_or_default()
}

/// The 3-graph system where every color has the edges e with |X ∩ e| ≠ 2,
/// X = {0..x_size-1}. Requires 3·x_size < n.
pub fn xy_obstruction(n: usize, x_size: usize) -> Result<GraphSystem> {
    if 3 * x_size >= n {
        return Err(Error::InvalidParameter(format!("|X| = {x_size} must be below n/3 = {n}/3")));
    }
    xy_obstruction_unchecked(n, x_size)
}

/// As [`xy_obstruction`] without the size bound.
pub fn xy_obstruction_unchecked(n: usize, x_size: usize) -> Result<GraphSystem> {
    if n < 3 || x_size > n {
        return Err(Error::InvalidParameter(format!("bad X/Y parameters n={n}, |X|={x_size}")));
    }
    let g = KGraph::new(
        n,
        3,
        (0..n).combinations(3).filter(|e| e.iter().filter(|&&v| v < x_size).count() != 2),
    )?;
    GraphSystem::new(vec![g; n])
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct XTrapReport {
    pub holds: bool,
    pub paths_checked: u64,
    pub escaping_path: Option<Vec<Point>>,
}

/// Enumerates tight paths of the union graph that start with a pair inside
/// X. Every path leaving X has a prefix ending at its first outside point,
/// so exploring paths within X is exhaustive.
pub fn check_x_trap(sys: &GraphSystem, x: &[Point]) -> Result<XTrapReport> {
    if sys.k() != 3 {
        return Err(Error::WrongUniformity { expected: 3, got: sys.k() });
    }
    let n = sys.n();
    if let Some(&v) = x.iter().find(|&&v| v >= n) {
        return Err(Error::VertexOutOfRange { vertex: v, n });
    }
    let mut union = vec![false; n * n * n];
    for g in sys.graphs() {
        for e in g.edges() {
            for p in e.iter().permutations(3) {
                union[(p[0] * n + p[1]) * n + p[2]] = true;
            }
        }
    }
    let in_x: Vec<bool> = (0..n).map(|v| x.contains(&v)).collect();
    struct Dfs<'a> {
        n: usize,
        union: &'a [bool],
        in_x: &'a [bool],
        path: Vec<Point>,
        on: Vec<bool>,
        count: u64,
    }
    impl Dfs<'_> {
        fn go(&mut self) -> Option<Vec<Point>> {
            self.count += 1;
            let l = self.path.len();
            let (a, b) = (self.path[l - 2], self.path[l - 1]);
            for c in 0..self.n {
                if self.on[c] || !self.union[(a * self.n + b) * self.n + c] {
                    continue;
                }
                self.path.push(c);
                if !self.in_x[c] {
                    return Some(self.path.clone());
                }
                self.on[c] = true;
                let found = self.go();
                self.on[c] = false;
                self.path.pop();
                if found.is_some() {
                    return found;
                }
            }
            None
        }
    }
    let mut dfs = Dfs { n, union: &union, in_x: &in_x, path: Vec::new(), on: vec![false; n], count: 0 };
    let mut xs: Vec<Point> = x.to_vec();
    xs.sort_unstable();
    xs.dedup();
    for pair in xs.iter().copied().permutations(2) {
        let (a, b) = (pair[0], pair[1]);
        dfs.path = vec![a, b];
        dfs.on[a] = true;
        dfs.on[b] = true;
        let found = dfs.go();
        dfs.on[a] = false;
        dfs.on[b] = false;
        if let Some(p) = found {
            return Ok(XTrapReport { holds: false, paths_checked: dfs.count, escaping_path: Some(p) });
        }
    }
    Ok(XTrapReport { holds: true, paths_checked: dfs.count, escaping_path: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;

    #[test]
    fn complete_counts() {
        let s = complete_system(5, 3).unwrap();
        assert_eq!(s.graphs().len(), 5);
        assert!(s.graphs().iter().all(|g| g.edge_count() == 10));
        assert_eq!(complete_system(3, 3).unwrap().graph(0).edge_count(), 1);
    }

    #[test]
    fn random_extremes() {
        let full = random_system(6, 3, &int(1), 7).unwrap();
        assert!(full.graphs().iter().all(|g| g.edge_count() == 20));
        let none = random_system(6, 3, &int(0), 7).unwrap();
        assert!(none.graphs().iter().all(|g| g.is_empty()));
    }

    #[test]
    fn random_meets_target_and_is_deterministic() {
        let t = ratio(5, 9);
        let a = random_system(8, 3, &t, 3).unwrap();
        assert!(achieved_degree(&a) >= t);
        assert_eq!(a, random_system(8, 3, &t, 3).unwrap());
        assert_eq!(a, random_system_jobs(8, 3, &t, 3, 4).unwrap());
    }

    #[test]
    fn xy_edges() {
        let s = xy_obstruction(9, 2).unwrap();
        assert!(!s.graph(0).contains(&[0, 1, 5]));
        assert!(xy_obstruction(12, 3).unwrap().graph(0).contains(&[0, 1, 2]));
        assert!(xy_obstruction(9, 3).is_err());
    }

    #[test]
    fn traps() {
        assert!(check_x_trap(&xy_obstruction(12, 3).unwrap(), &[0, 1, 2]).unwrap().holds);
        let r = check_x_trap(&complete_system(5, 3).unwrap(), &[0, 1]).unwrap();
        assert!(!r.holds);
        assert_eq!(r.escaping_path.unwrap().len(), 3);
    }
}
