//! (k-2)-vicinities: per-color families of 2-graphs C_S inside the links
//! L(S), their construction, and the V1-V6 conditions.

use std::collections::BTreeMap;

use itertools::Itertools;
use num::{One, Zero};
use serde::Serialize;

use crate::arith::{binomial, fraction_string, int, ratio, ser_ratio, to_f64, Ratio};
use crate::connectivity::{find_arc, find_switchers, tight_components, Arc};
use crate::error::{Error, Result};
use crate::hypergraph::{
    check_perturbed_degree_for, Color, KGraph, OneKGraph, PerturbedDegreeReport, Point,
};
use crate::matching::{max_fractional_matching, uniform_weights};

/// The family {C_S} for one color, keyed by the point part of S.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vicinity {
    color: Color,
    n: usize,
    k: usize,
    assignment: BTreeMap<Vec<Point>, KGraph>,
}

impl Vicinity {
    pub fn new(color: Color, n: usize, k: usize) -> Result<Self> {
        if k < 3 {
            return Err(Error::InvalidParameter("vicinities need k ≥ 3".into()));
        }
        Ok(Self { color, n, k, assignment: BTreeMap::new() })
    }

    pub fn color(&self) -> Color {
        self.color
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Sets C_S; `s` must be a sorted (k-2)-set and `c` a 2-graph on the same points.
    pub fn insert(&mut self, s: Vec<Point>, c: KGraph) -> Result<()> {
        if s.len() != self.k - 2 || s.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(format!(
                "{s:?} is not a sorted {}-set",
                self.k - 2
            )));
        }
        if c.k() != 2 || c.n() != self.n {
            return Err(Error::InvalidParameter("C_S must be a 2-graph on the point set".into()));
        }
        self.assignment.insert(s, c);
        Ok(())
    }

    pub fn get(&self, s: &[Point]) -> Option<&KGraph> {
        self.assignment.get(s)
    }

    pub fn get_mut(&mut self, s: &[Point]) -> Option<&mut KGraph> {
        self.assignment.get_mut(s)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<Point>, &KGraph)> {
        self.assignment.iter()
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    /// The (1,k)-graph with edges `{color} ∪ S ∪ A` for `A ∈ C_S`.
    pub fn generated(&self, colors: usize) -> Result<OneKGraph> {
        let edges = self.assignment.iter().flat_map(|(s, c)| {
            c.edges().iter().map(move |a| {
                let mut e = s.clone();
                e.extend_from_slice(a);
                (self.color, e)
            })
        });
        OneKGraph::new(colors, self.n, self.k, edges)
    }
}

/// (k-2)-sets of points that together with `color` lie in an edge of `r`.
pub fn shadow_sets(r: &OneKGraph, color: Color) -> Vec<Vec<Point>> {
    let mut sets: Vec<Vec<Point>> = r
        .edges()
        .filter(|(c, _)| *c == color)
        .flat_map(|(_, e)| e.iter().copied().combinations(r.k() - 2))
        .collect();
    sets.sort();
    sets.dedup();
    sets
}

/// C_S is the largest tight component of L(S), ties going to the component
/// with the smallest edge.
pub fn build_max_vicinity(r: &OneKGraph) -> Result<Vec<Vicinity>> {
    (0..r.colors()).map(|c| build_max_vicinity_for(r, c)).collect()
}

pub fn build_max_vicinity_for(r: &OneKGraph, color: Color) -> Result<Vicinity> {
    let mut vic = Vicinity::new(color, r.n(), r.k())?;
    for s in shadow_sets(r, color) {
        let link = r.link(color, &s)?;
        let comps = tight_components(&link);
        let mut best: Option<usize> = None;
        for (i, &size) in comps.sizes.iter().enumerate() {
            if best.is_none_or(|b| size > comps.sizes[b]) {
                best = Some(i);
            }
        }
        let c = match best {
            Some(i) => comps.component_graph(&link, i),
            None => KGraph::empty(r.n(), 2),
        };
        vic.insert(s, c)?;
    }
    Ok(vic)
}

/// A certificate attached to a V-condition, positive or negative.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case", rename_all_fields = "camelCase")]
pub enum Witness {
    Components {
        color: Color,
        set: Vec<Point>,
        components: usize,
        edges: usize,
    },
    SharedEdge {
        color: Color,
        set: Vec<Point>,
        other_color: Color,
        other_set: Vec<Point>,
        edge: Option<Vec<Point>>,
    },
    Switcher {
        color: Color,
        set: Vec<Point>,
        edge: Option<[Point; 2]>,
    },
    Arc {
        color: Color,
        points: Option<Vec<Point>>,
    },
    Matching {
        color: Color,
        set: Vec<Point>,
        #[serde(serialize_with = "ser_ratio")]
        density: Ratio,
        #[serde(serialize_with = "ser_ratio")]
        threshold: Ratio,
        weights: Vec<(Vec<Point>, String)>,
    },
    Density {
        color: Color,
        set: Vec<Point>,
        #[serde(serialize_with = "ser_ratio")]
        density: Ratio,
        #[serde(serialize_with = "ser_ratio")]
        threshold: Ratio,
    },
}

/// Outcome of one clause: the first failure in canonical order, or an example certificate.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Clause {
    pub holds: bool,
    pub checked: usize,
    pub failure: Option<Witness>,
    pub example: Option<Witness>,
}

impl Clause {
    fn new() -> Self {
        Self { holds: true, checked: 0, failure: None, example: None }
    }

    fn record(&mut self, ok: bool, witness: impl FnOnce() -> Witness) {
        self.checked += 1;
        if ok {
            if self.example.is_none() {
                self.example = Some(witness());
            }
        } else if self.holds {
            self.holds = false;
            self.failure = Some(witness());
        }
    }
}

/// Which variant of the arc-existence hypothesis held for a color.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ArcHypothesis {
    pub color: Color,
    /// Smallest edge density of any C_S of the color.
    #[serde(serialize_with = "ser_ratio")]
    pub min_density: Ratio,
    /// min_density + sqrt(min_density).
    pub density_plus_root: f64,
    pub exceeds_one: bool,
    pub arc_found: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct VicinityReport {
    #[serde(serialize_with = "ser_ratio")]
    pub gamma: Ratio,
    #[serde(serialize_with = "ser_ratio")]
    pub delta: Ratio,
    pub v1: Clause,
    pub v2: Clause,
    pub v3: Clause,
    pub v4: Clause,
    pub v5: Clause,
    pub v6: Clause,
    pub arc_hypotheses: Vec<ArcHypothesis>,
}

impl VicinityReport {
    pub fn holds(&self) -> bool {
        self.clauses().iter().all(|c| c.holds)
    }

    pub fn clauses(&self) -> [&Clause; 6] {
        [&self.v1, &self.v2, &self.v3, &self.v4, &self.v5, &self.v6]
    }
}

/// Threshold of the fractional-matching clause: (1 + 1/k)(1/(k+1) + γ).
pub fn matching_threshold(k: usize, gamma: &Ratio) -> Ratio {
    let k = k as i64;
    (int(1) + ratio(1, k as u128)) * (ratio(1, (k + 1) as u128) + gamma)
}

/// Threshold of the density clause: 1 - δ + γ.
pub fn density_threshold(gamma: &Ratio, delta: &Ratio) -> Ratio {
    Ratio::one() - delta + gamma
}

/// Edge bitset of a 2-graph on n points.
fn edge_bits(c: &KGraph) -> Vec<u64> {
    let n = c.n();
    let mut bits = vec![0u64; (n * n).div_ceil(64).max(1)];
    for e in c.edges() {
        let idx = e[0] * n + e[1];
        bits[idx / 64] |= 1 << (idx % 64);
    }
    bits
}

fn first_shared(a: &[u64], b: &[u64], n: usize) -> Option<Vec<Point>> {
    a.iter().zip(b).enumerate().find_map(|(w, (x, y))| {
        let both = x & y;
        (both != 0).then(|| {
            let idx = w * 64 + both.trailing_zeros() as usize;
            vec![idx / n, idx % n]
        })
    })
}

/// Evaluates V1-V6 for a family built on `r`.
pub fn verify_vicinity(
    r: &OneKGraph,
    family: &[Vicinity],
    gamma: &Ratio,
    delta: &Ratio,
) -> Result<VicinityReport> {
    let (n, k) = (r.n(), r.k());
    for vic in family {
        if vic.k() != k || vic.n() != n {
            return Err(Error::Precondition("vicinity built for a different graph".into()));
        }
        for (s, c) in vic.iter() {
            let link = r.link(vic.color(), s)?;
            if let Some(e) = c.edges().iter().find(|e| !link.contains(e)) {
                return Err(Error::Precondition(format!(
                    "C_{s:?} of color {} has edge {e:?} outside the link",
                    vic.color()
                )));
            }
        }
    }
    let m_threshold = matching_threshold(k, gamma);
    let d_threshold = density_threshold(gamma, delta);
    let pairs_total = binomial(n, 2);
    let weights = uniform_weights(n);

    let mut v1 = Clause::new();
    let mut v3 = Clause::new();
    let mut v4 = Clause::new();
    let mut v5 = Clause::new();
    let mut arc_hypotheses = Vec::new();
    for vic in family {
        let color = vic.color();
        let mut min_density: Option<Ratio> = None;
        for (s, c) in vic.iter() {
            let comps = tight_components(c);
            v1.record(comps.len() == 1 && !c.is_empty(), || Witness::Components {
                color,
                set: s.clone(),
                components: comps.len(),
                edges: c.edge_count(),
            });
            let sw = find_switchers(c).first().copied();
            v3.record(sw.is_some(), || Witness::Switcher { color, set: s.clone(), edge: sw });

            let fm = max_fractional_matching(c, &weights)?;
            let density = fm.density();
            let ok = density >= m_threshold;
            v4.record(ok, || Witness::Matching {
                color,
                set: s.clone(),
                density: density.clone(),
                threshold: m_threshold.clone(),
                weights: fm.weight_strings(),
            });

            let dens = if pairs_total == 0 {
                Ratio::zero()
            } else {
                ratio(c.edge_count() as u128, pairs_total)
            };
            v5.record(dens >= d_threshold, || Witness::Density {
                color,
                set: s.clone(),
                density: dens.clone(),
                threshold: d_threshold.clone(),
            });
            if min_density.as_ref().is_none_or(|m| dens < *m) {
                min_density = Some(dens);
            }
        }
        let arc: Option<Arc> = find_arc(vic);
        let found = arc.is_some();
        v3.record(found, || Witness::Arc { color, points: arc.map(|a| a.points) });
        let min_density = min_density.unwrap_or_else(Ratio::zero);
        let md = to_f64(&min_density);
        arc_hypotheses.push(ArcHypothesis {
            color,
            density_plus_root: md + md.sqrt(),
            exceeds_one: md + md.sqrt() > 1.0,
            min_density,
            arc_found: found,
        });
    }

    // V2 within a color, V6 across colors, both by bitset intersection.
    let flat: Vec<(Color, &Vec<Point>, Vec<u64>)> = family
        .iter()
        .flat_map(|vic| vic.iter().map(move |(s, c)| (vic.color(), s, edge_bits(c))))
        .collect();
    let mut v2 = Clause::new();
    let mut v6 = Clause::new();
    for (a, (ca, sa, ba)) in flat.iter().enumerate() {
        for (cb, sb, bb) in &flat[a..] {
            let shared = first_shared(ba, bb, n);
            let witness = || Witness::SharedEdge {
                color: *ca,
                set: (*sa).clone(),
                other_color: *cb,
                other_set: (*sb).clone(),
                edge: shared.clone(),
            };
            if ca == cb {
                v2.record(shared.is_some(), witness);
            } else {
                v6.record(shared.is_some(), witness);
            }
        }
    }

    Ok(VicinityReport {
        gamma: gamma.clone(),
        delta: delta.clone(),
        v1,
        v2,
        v3,
        v4,
        v5,
        v6,
        arc_hypotheses,
    })
}

/// Covered-vertex count against the Lovász form of Kruskal-Katona.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct KruskalKatonaReport {
    pub edges: usize,
    pub covered: usize,
    /// Positive root x of x(x-1)/2 = e.
    pub x: f64,
    /// covered ≥ x, decided exactly as covered·(covered-1) ≥ 2e.
    pub lovasz_holds: bool,
    /// Equality in the Lovász bound.
    pub tight: bool,
    /// (sqrt(density) - ε)·n when ε is supplied.
    pub approx_bound: Option<f64>,
    pub approx_holds: Option<bool>,
}

pub fn kruskal_katona_shadow(g: &KGraph, epsilon: Option<&Ratio>) -> Result<KruskalKatonaReport> {
    if g.k() != 2 {
        return Err(Error::InvalidParameter("Kruskal-Katona check expects a 2-graph".into()));
    }
    let e = g.edge_count();
    let covered = g.non_isolated().len();
    let x = (1.0 + (1.0 + 8.0 * e as f64).sqrt()) / 2.0;
    let lhs = covered as u128 * (covered as u128).saturating_sub(1);
    let lovasz_holds = e == 0 || lhs >= 2 * e as u128;
    let tight = e > 0 && lhs == 2 * e as u128;
    let (approx_bound, approx_holds) = match epsilon {
        Some(eps) => {
            let total = binomial(g.n(), 2);
            let density = if total == 0 { 0.0 } else { e as f64 / total as f64 };
            let bound = (density.sqrt() - to_f64(eps)) * g.n() as f64;
            (Some(bound), Some(covered as f64 >= bound))
        }
        None => (None, None),
    };
    Ok(KruskalKatonaReport { edges: e, covered, x, lovasz_holds, tight, approx_bound, approx_holds })
}

/// Result of pruning a perturbed color class.
#[derive(Debug, Clone)]
pub struct CleanupOutcome {
    pub graph: OneKGraph,
    pub removed: usize,
    pub rounds: usize,
    pub success: bool,
    pub reason: Option<String>,
    pub report: PerturbedDegreeReport,
}

/// Starts from `r_i` minus the perturbed edges `perturbed` and repeatedly
/// deletes every edge through a tuple violating P1 or P3, until the
/// perturbed-degree check passes at (α, δ-α) or nothing more can be done.
pub fn cleanup_perturbed(
    r_i: &OneKGraph,
    perturbed: &OneKGraph,
    alpha: &Ratio,
    delta: &Ratio,
) -> Result<CleanupOutcome> {
    if !perturbed.is_subgraph_of(r_i) {
        return Err(Error::Precondition("perturbed edges are not a subgraph of R_i".into()));
    }
    let target = delta - alpha;
    let colors = r_i.colors_in_use();
    let mut graph = r_i.minus(perturbed);
    let mut rounds = 0;
    loop {
        let report = check_perturbed_degree_for(&graph, &colors, alpha, &target);
        let finish = |graph: OneKGraph, success: bool, reason: Option<String>, report| {
            let removed = r_i.edge_count() - graph.edge_count();
            Ok(CleanupOutcome { graph, removed, rounds, success, reason, report })
        };
        if report.holds() {
            return finish(graph, true, None, report);
        }
        if graph.is_empty() {
            return finish(graph, false, Some("every edge was pruned".into()), report);
        }
        let bad: Vec<(Color, Vec<Point>)> = report
            .levels
            .iter()
            .flat_map(|l| l.p1_violations.iter().chain(&l.p3_violations))
            .map(|(c, s, _)| (*c, s.clone()))
            .collect();
        if bad.is_empty() {
            let reason = format!(
                "only the complement-density condition fails ({}); pruning cannot repair it",
                report.summary()
            );
            return finish(graph, false, Some(reason), report);
        }
        let kept: Vec<(Color, Vec<Point>)> = graph
            .edges()
            .filter(|(c, e)| {
                !bad.iter()
                    .any(|(bc, s)| bc == c && crate::hypergraph::is_subset(s, e))
            })
            .map(|(c, e)| (c, e.to_vec()))
            .collect();
        graph = OneKGraph::new(graph.colors(), graph.n(), graph.k(), kept)?;
        rounds += 1;
        log::debug!("cleanup round {rounds}: {} edges left", graph.edge_count());
    }
}

/// Human-readable one-liner per clause.
pub fn describe(report: &VicinityReport) -> String {
    let names = ["V1", "V2", "V3", "V4", "V5", "V6"];
    names
        .iter()
        .zip(report.clauses())
        .map(|(n, c)| format!("{n}:{}", if c.holds { "ok" } else { "FAIL" }))
        .join(" ")
        + &format!(" (γ={}, δ={})", fraction_string(&report.gamma), fraction_string(&report.delta))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete_r(t: usize) -> OneKGraph {
        OneKGraph::complete(t, t, 3)
    }

    #[test]
    fn thresholds_for_k3() {
        let delta = ratio(5, 9);
        let gamma = Ratio::zero();
        assert_eq!(density_threshold(&gamma, &delta), ratio(4, 9));
        assert_eq!(matching_threshold(3, &gamma), ratio(1, 3));
    }

    #[test]
    fn max_vicinity_picks_largest_component() {
        // link of {0} (color 0): triangle on 1,2,3 and edge 4,5
        let edges = vec![
            (0, vec![0, 1, 2]),
            (0, vec![0, 2, 3]),
            (0, vec![0, 1, 3]),
            (0, vec![0, 4, 5]),
        ];
        let r = OneKGraph::new(1, 6, 3, edges).unwrap();
        let vic = build_max_vicinity_for(&r, 0).unwrap();
        let c = vic.get(&[0]).unwrap();
        assert_eq!(c.edges(), &[vec![1, 2], vec![1, 3], vec![2, 3]]);
    }

    #[test]
    fn complete_instance_small() {
        let r = complete_r(8);
        let fam = build_max_vicinity(&r).unwrap();
        let rep = verify_vicinity(&r, &fam, &ratio(1, 100), &ratio(5, 9)).unwrap();
        assert!(rep.holds(), "{}", describe(&rep));
    }

    #[test]
    fn disjoint_sets_fail_v2() {
        let mut vic = Vicinity::new(0, 6, 3).unwrap();
        vic.insert(vec![0], KGraph::new(6, 2, vec![vec![1, 2]]).unwrap()).unwrap();
        vic.insert(vec![5], KGraph::new(6, 2, vec![vec![3, 4]]).unwrap()).unwrap();
        let r = OneKGraph::new(1, 6, 3, vec![(0, vec![0, 1, 2]), (0, vec![3, 4, 5])]).unwrap();
        let rep = verify_vicinity(&r, &[vic], &Ratio::zero(), &ratio(5, 9)).unwrap();
        assert!(!rep.v2.holds);
        match rep.v2.failure.unwrap() {
            Witness::SharedEdge { set, other_set, edge, .. } => {
                assert_eq!((set, other_set, edge), (vec![0], vec![5], None));
            }
            other => panic!("unexpected witness {other:?}"),
        }
    }

    #[test]
    fn kruskal_katona_examples() {
        let k4 = KGraph::complete(4, 2);
        let rep = kruskal_katona_shadow(&k4, None).unwrap();
        assert_eq!(rep.covered, 4);
        assert!(rep.lovasz_holds && rep.tight);
        let single = KGraph::new(5, 2, vec![vec![0, 1]]).unwrap();
        let rep = kruskal_katona_shadow(&single, None).unwrap();
        assert!(rep.lovasz_holds && rep.tight);
        assert_eq!(rep.covered, 2);
    }

    #[test]
    fn cleanup_trivial_and_failing() {
        let r = OneKGraph::complete(1, 6, 3).restrict_colors(|c| c == 0);
        let none = OneKGraph::empty(1, 6, 3);
        let out = cleanup_perturbed(&r, &none, &ratio(1, 10), &ratio(1, 2)).unwrap();
        assert!(out.success);
        assert_eq!(out.removed, 0);
        let out = cleanup_perturbed(&r, &r, &ratio(1, 10), &ratio(1, 2)).unwrap();
        assert!(!out.success);
    }
}
