//! Exact search for rainbow tight Hamilton cycles and the finite absorbing
//! structures.

mod absorb;
mod probe;

pub use absorb::{
    check_absorbing_path, gadget_absorption_instance, verify_absorbing_gadget, AbsorbOutcome,
    AbsorbStatus, AbsorbingGadget, AbsorptionQuery, GadgetInstance, GadgetReport,
};
pub use probe::{threshold_probe, ProbeRow, ProbeTable};

use std::collections::HashMap;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hypergraph::{GraphSystem, Point};
use crate::sequential::{SeqCycle, SeqWalk};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Pruning {
    None,
    Hall,
    HallDegree,
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub time_limit: Option<Duration>,
    pub node_limit: Option<u64>,
    pub seed: u64,
    pub pruning: Pruning,
    /// Run the window/color matching check every `hall_every` placed windows.
    pub hall_every: usize,
    /// Canonical candidate order; only exact runs may report absence.
    pub exact: bool,
    /// Parallel subtrees below the first point choice when > 1.
    pub jobs: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            time_limit: None,
            node_limit: None,
            seed: 0,
            pruning: Pruning::HallDegree,
            hall_every: 1,
            exact: true,
            jobs: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchStatus {
    Found,
    Absent,
    Exhausted,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SearchOutcome {
    pub status: SearchStatus,
    pub cycle: Option<SeqWalk>,
    pub nodes: u64,
    pub millis: u128,
}

/// Maximum bipartite matching of `left` (bitmask of admissible right
/// vertices each) into 64 right vertices. Returns the right partner per left vertex.
pub(crate) fn bipartite_matching(left: &[u64]) -> (usize, Vec<Option<usize>>) {
    fn augment(u: usize, left: &[u64], seen: &mut u64, owner: &mut [Option<usize>; 64]) -> bool {
        let mut cand = left[u] & !*seen;
        while cand != 0 {
            let c = cand.trailing_zeros() as usize;
            cand &= cand - 1;
            *seen |= 1 << c;
            if owner[c].is_none_or(|w| augment(w, left, seen, owner)) {
                owner[c] = Some(u);
                return true;
            }
        }
        false
    }
    let mut owner = [None; 64];
    let mut size = 0;
    for u in 0..left.len() {
        let mut seen = 0u64;
        if augment(u, left, &mut seen, &mut owner) {
            size += 1;
        }
    }
    let mut partner = vec![None; left.len()];
    for (c, o) in owner.iter().enumerate() {
        if let Some(u) = o {
            partner[*u] = Some(c);
        }
    }
    (size, partner)
}

fn mask_of(points: impl IntoIterator<Item = Point>) -> u64 {
    points.into_iter().fold(0, |m, p| m | 1 << p)
}

/// Shared state between parallel subtrees.
struct Budget {
    start: Instant,
    time_limit: Option<Duration>,
    node_limit: Option<u64>,
    nodes: AtomicU64,
    stop: AtomicBool,
    aborted: AtomicBool,
}

impl Budget {
    fn tick(&self) -> bool {
        let nodes = self.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        if self.stop.load(Ordering::Relaxed) {
            return false;
        }
        let over_nodes = self.node_limit.is_some_and(|l| nodes > l);
        let over_time = nodes.is_multiple_of(1024) && self.time_limit.is_some_and(|l| self.start.elapsed() > l);
        if over_nodes || over_time {
            self.aborted.store(true, Ordering::Relaxed);
            self.stop.store(true, Ordering::Relaxed);
            return false;
        }
        true
    }
}

struct Search<'a> {
    n: usize,
    k: usize,
    edge_colors: &'a HashMap<u64, u64>,
    /// Edge masks (any color) through each point.
    incident: &'a [Vec<u64>],
    candidates: &'a [Point],
    cfg: &'a SearchConfig,
    budget: &'a Budget,
    order: Vec<Point>,
    used: u64,
    windows: Vec<u64>,
}

impl<'a> Search<'a> {
    fn window_colors(&self, start: usize) -> u64 {
        let m = mask_of((0..self.k).map(|j| self.order[(start + j) % self.n]));
        self.edge_colors.get(&m).copied().unwrap_or(0)
    }

    fn hall_ok(&self) -> bool {
        bipartite_matching(&self.windows).0 == self.windows.len()
    }

    fn degree_ok(&self) -> bool {
        let j = self.order.len();
        let ends = mask_of(self.order[..(self.k - 1).min(j)].iter().copied())
            | mask_of(self.order[j.saturating_sub(self.k - 1)..].iter().copied());
        let all = if self.n == 64 { u64::MAX } else { (1u64 << self.n) - 1 };
        let free = !self.used & all;
        let allowed = free | ends;
        (0..self.n)
            .filter(|&u| free >> u & 1 == 1)
            .all(|u| self.incident[u].iter().any(|&e| e & !allowed == 0))
    }

    fn prune(&self) -> bool {
        match self.cfg.pruning {
            Pruning::None => false,
            Pruning::Hall | Pruning::HallDegree => {
                let every = self.cfg.hall_every.max(1);
                if !self.windows.is_empty() && self.windows.len().is_multiple_of(every) && !self.hall_ok() {
                    return true;
                }
                self.cfg.pruning == Pruning::HallDegree && !self.degree_ok()
            }
        }
    }

    fn close(&mut self) -> Option<SeqWalk> {
        let (n, k) = (self.n, self.k);
        if n >= 3 && self.order[n - 1] < self.order[1] {
            return None;
        }
        let base = self.windows.len();
        for start in n - k + 1..n {
            let m = self.window_colors(start);
            if m == 0 {
                self.windows.truncate(base);
                return None;
            }
            self.windows.push(m);
        }
        let (size, partner) = bipartite_matching(&self.windows);
        let result = (size == n).then(|| {
            let colors = partner.into_iter().map(|c| c.expect("perfect matching")).collect();
            SeqWalk::closed(colors, self.order.clone())
        });
        self.windows.truncate(base);
        result
    }

    fn extend(&mut self) -> Option<SeqWalk> {
        if !self.budget.tick() {
            return None;
        }
        let j = self.order.len();
        if j == self.n {
            return self.close();
        }
        for &v in self.candidates {
            if self.used >> v & 1 == 1 {
                continue;
            }
            if j == self.n - 1 && self.n >= 3 && v < self.order[1] {
                continue;
            }
            self.order.push(v);
            self.used |= 1 << v;
            let mut pushed = false;
            let mut dead = false;
            if j + 1 >= self.k {
                let m = self.window_colors(j + 1 - self.k);
                if m == 0 {
                    dead = true;
                } else {
                    self.windows.push(m);
                    pushed = true;
                }
            }
            if !dead && !self.prune() {
                if let Some(found) = self.extend() {
                    return Some(found);
                }
            }
            if pushed {
                self.windows.pop();
            }
            self.used &= !(1 << v);
            self.order.pop();
            if self.budget.stop.load(Ordering::Relaxed) {
                return None;
            }
        }
        None
    }
}

/// Backtracking over cyclic point orders starting at point 0 (with
/// `p_1 < p_{n-1}` fixing the reflection), windows carrying their admissible
/// colors, and a window/color matching deciding the color assignment.
pub fn find_rainbow_hamilton(sys: &GraphSystem, cfg: &SearchConfig) -> Result<SearchOutcome> {
    let (n, k) = (sys.n(), sys.k());
    if n < k + 1 {
        return Err(Error::InvalidParameter(format!("need n ≥ k + 1 (n = {n}, k = {k})")));
    }
    if n > 64 {
        return Err(Error::InvalidParameter("the solver handles at most 64 points".into()));
    }
    let budget = Budget {
        start: Instant::now(),
        time_limit: cfg.time_limit,
        node_limit: cfg.node_limit,
        nodes: AtomicU64::new(0),
        stop: AtomicBool::new(false),
        aborted: AtomicBool::new(false),
    };
    let mut edge_colors: HashMap<u64, u64> = HashMap::new();
    let mut incident = vec![Vec::new(); n];
    for (c, g) in sys.graphs().iter().enumerate() {
        for e in g.edges() {
            let m = mask_of(e.iter().copied());
            let slot = edge_colors.entry(m).or_insert(0);
            if *slot == 0 {
                for &v in e {
                    incident[v].push(m);
                }
            }
            *slot |= 1 << c;
        }
    }
    let mut candidates: Vec<Point> = (1..n).collect();
    if !cfg.exact {
        candidates.shuffle(&mut ChaCha8Rng::seed_from_u64(cfg.seed));
    }
    let usable_colors = sys.graphs().iter().filter(|g| !g.is_empty()).count();

    let make = |order: Vec<Point>| Search {
        n,
        k,
        edge_colors: &edge_colors,
        incident: &incident,
        candidates: &candidates,
        cfg,
        budget: &budget,
        used: mask_of(order.iter().copied()),
        order,
        windows: Vec::new(),
    };

    let found = if usable_colors < n {
        None
    } else if cfg.jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.jobs)
            .build()
            .map_err(|e| Error::InvalidParameter(e.to_string()))?;
        pool.install(|| {
            candidates.par_iter().find_map_first(|&p1| {
                let mut s = make(vec![0, p1]);
                if k == 2 {
                    let m = s.window_colors(0);
                    if m == 0 {
                        return None;
                    }
                    s.windows.push(m);
                }
                s.extend()
            })
        })
    } else {
        make(vec![0]).extend()
    };
    if let Some(w) = &found {
        budget.stop.store(true, Ordering::Relaxed);
        debug_assert!(verify_hamilton(sys, w));
    }
    let status = match (&found, budget.aborted.load(Ordering::Relaxed)) {
        (Some(_), _) => SearchStatus::Found,
        (None, false) if cfg.exact => SearchStatus::Absent,
        _ => SearchStatus::Exhausted,
    };
    Ok(SearchOutcome {
        status,
        cycle: found,
        nodes: budget.nodes.load(Ordering::Relaxed),
        millis: budget.start.elapsed().as_millis(),
    })
}

/// Independent replay: n closed windows, each an edge of its color's graph,
/// colors a permutation of the color set, points a permutation of V.
pub fn verify_hamilton(sys: &GraphSystem, cycle: &SeqWalk) -> bool {
    let n = sys.n();
    let k = sys.k();
    if !cycle.closed || cycle.points.len() != n || cycle.colors.len() != n {
        return false;
    }
    let mut seen_p = vec![false; n];
    let mut seen_c = vec![false; n];
    for (&p, &c) in cycle.points.iter().zip(&cycle.colors) {
        if p >= n || c >= n || seen_p[p] || seen_c[c] {
            return false;
        }
        seen_p[p] = true;
        seen_c[c] = true;
    }
    (0..n).all(|i| {
        let window: Vec<Point> = (0..k).map(|j| cycle.points[(i + j) % n]).collect();
        sys.graph(cycle.colors[i]).contains_unordered(&window)
    }) && SeqCycle::new(cycle.clone()).is_ok()
}
