//! Generated graphs, the F1-F5 framework conditions and the staged pipeline
//! from a (1,k)-graph to a verified framework.

use num::One;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{binomial, int, ratio, ser_ratio, Ratio};
use crate::connectivity::{
    closed_walk_one_mod_k, find_arc, find_closed_walk_with_residue, find_switchers,
    is_seq_tightly_connected, is_tightly_connected,
};
use crate::error::{Error, Result};
use crate::hypergraph::{min_relative_codegree, Color, OneKGraph, Point};
use crate::matching::{color_block_graph, is_robustly_matchable, RobustOptions, RobustReport};
use crate::sequential::{validate, SeqWalk};
use crate::vicinity::{
    build_max_vicinity, cleanup_perturbed, verify_vicinity, CleanupOutcome, Vicinity,
    VicinityReport,
};

/// The subgraph of R generated by a vicinity.
pub fn generate_from_vicinity(r: &OneKGraph, vic: &Vicinity) -> Result<OneKGraph> {
    let h = vic.generated(r.colors())?;
    if !h.is_subgraph_of(r) {
        return Err(Error::Precondition(format!(
            "vicinity of color {} is not built on this graph",
            vic.color()
        )));
    }
    Ok(h)
}

/// Union of the generated graphs of a family.
pub fn generate_family(r: &OneKGraph, family: &[Vicinity]) -> Result<OneKGraph> {
    family.iter().try_fold(OneKGraph::empty(r.colors(), r.n(), r.k()), |acc, vic| {
        acc.union(&generate_from_vicinity(r, vic)?)
    })
}

/// Color blocks `[t(i-1)/k, ti/k)` for i = 1..k.
pub fn default_windows(colors: usize, k: usize) -> Result<Vec<Vec<Color>>> {
    if k == 0 || !colors.is_multiple_of(k) {
        return Err(Error::InvalidParameter(format!(
            "window partition needs k | t (t = {colors}, k = {k})"
        )));
    }
    let w = colors / k;
    Ok((0..k).map(|i| (i * w..(i + 1) * w).collect()).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ColorFlag {
    pub color: Color,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ClosedWalkEntry {
    pub color: Color,
    pub walk: Option<SeqWalk>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct WindowEntry {
    pub colors: Vec<Color>,
    pub report: RobustReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DegreeCount {
    pub color: Color,
    /// Points v with relative (1,1)-degree of {color, v} at least the threshold.
    pub count: usize,
    #[serde(serialize_with = "ser_ratio")]
    pub required: Ratio,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LinkPair {
    pub color: Color,
    pub other: Color,
    pub edge: Option<Vec<Point>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FrameworkReport {
    #[serde(serialize_with = "ser_ratio")]
    pub alpha: Ratio,
    #[serde(serialize_with = "ser_ratio")]
    pub gamma: Ratio,
    #[serde(serialize_with = "ser_ratio")]
    pub delta: Ratio,
    pub f1: Vec<ColorFlag>,
    pub f2: Vec<ClosedWalkEntry>,
    pub f3: Vec<WindowEntry>,
    pub f4: Vec<DegreeCount>,
    /// Failing pairs only; all pairs pass when empty.
    pub f5_failures: Vec<LinkPair>,
    pub f5_checked: usize,
}

impl FrameworkReport {
    pub fn f1_holds(&self) -> bool {
        self.f1.iter().all(|f| f.holds)
    }
    pub fn f2_holds(&self) -> bool {
        self.f2.iter().all(|f| f.walk.is_some())
    }
    pub fn f3_holds(&self) -> bool {
        self.f3.iter().all(|w| w.report.holds)
    }
    pub fn f4_holds(&self) -> bool {
        self.f4.iter().all(|d| d.holds)
    }
    pub fn f5_holds(&self) -> bool {
        self.f5_failures.is_empty()
    }
    pub fn holds(&self) -> bool {
        self.flags().iter().all(|&f| f)
    }
    pub fn flags(&self) -> [bool; 5] {
        [self.f1_holds(), self.f2_holds(), self.f3_holds(), self.f4_holds(), self.f5_holds()]
    }
}

#[derive(Debug, Clone, Default)]
pub struct FrameworkOptions {
    /// Defaults to the k equal color blocks.
    pub windows: Option<Vec<Vec<Color>>>,
    pub robust: RobustOptions,
}

/// Evaluates F1-F5 on `h`.
pub fn verify_framework(
    h: &OneKGraph,
    alpha: &Ratio,
    gamma: &Ratio,
    delta: &Ratio,
    opts: &FrameworkOptions,
) -> Result<FrameworkReport> {
    let (t, n, k) = (h.colors(), h.n(), h.k());
    let windows = match &opts.windows {
        Some(w) => w.clone(),
        None => default_windows(t, k)?,
    };
    let colors: Vec<Color> = (0..t).collect();

    let f1 = colors
        .par_iter()
        .map(|&c| Ok(ColorFlag { color: c, holds: is_seq_tightly_connected(h, c)? }))
        .collect::<Result<Vec<_>>>()?;

    let f2 = colors
        .par_iter()
        .map(|&c| Ok(ClosedWalkEntry { color: c, walk: find_closed_walk_with_residue(h, c, 1)? }))
        .collect::<Result<Vec<_>>>()?;

    let f3 = windows
        .iter()
        .map(|w| {
            let g = color_block_graph(h, w);
            Ok(WindowEntry { colors: w.clone(), report: is_robustly_matchable(&g, gamma, &opts.robust)? })
        })
        .collect::<Result<Vec<_>>>()?;

    let threshold = Ratio::one() - delta + gamma;
    let den = binomial(n - 1, k - 1);
    let required = (Ratio::one() - alpha) * int(n as i64);
    let f4 = colors
        .iter()
        .map(|&c| {
            let mut deg = vec![0u128; n];
            for (_, e) in h.edges().filter(|(ec, _)| *ec == c) {
                for &v in e {
                    deg[v] += 1;
                }
            }
            let count = deg.iter().filter(|&&d| ratio(d, den) >= threshold).count();
            let holds = int(count as i64) >= required;
            DegreeCount { color: c, count, required: required.clone(), holds }
        })
        .collect();

    let links = colors
        .iter()
        .map(|&c| h.link(c, &[]))
        .collect::<Result<Vec<_>>>()?;
    let mut f5_failures = Vec::new();
    let mut f5_checked = 0;
    for i in 0..t {
        for j in i + 1..t {
            f5_checked += 1;
            if links[i].first_common_edge(&links[j]).is_none() {
                f5_failures.push(LinkPair { color: i, other: j, edge: None });
            }
        }
    }

    Ok(FrameworkReport {
        alpha: alpha.clone(),
        gamma: gamma.clone(),
        delta: delta.clone(),
        f1,
        f2,
        f3,
        f4,
        f5_failures,
        f5_checked,
    })
}

/// Per-color status of the first three V-clauses, evaluated directly.
pub fn color_v123(vic: &Vicinity) -> bool {
    let connected = vic.iter().all(|(_, c)| is_tightly_connected(c));
    let switchers = vic.iter().all(|(_, c)| !find_switchers(c).is_empty());
    let pairwise = vic
        .iter()
        .enumerate()
        .all(|(a, (_, c))| vic.iter().skip(a).all(|(_, d)| c.first_common_edge(d).is_some()));
    !vic.is_empty() && connected && switchers && pairwise && find_arc(vic).is_some()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Implication {
    pub name: String,
    pub premise: bool,
    pub conclusion: bool,
    pub holds: bool,
    pub detail: Option<String>,
}

impl Implication {
    fn new(name: impl Into<String>, premise: bool, conclusion: bool, detail: Option<String>) -> Self {
        Self { name: name.into(), premise, conclusion, holds: !premise || conclusion, detail }
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CleanupSummary {
    pub color: Color,
    pub removed: usize,
    pub rounds: usize,
    pub success: bool,
    pub reason: Option<String>,
}

impl From<&CleanupOutcome> for CleanupSummary {
    fn from(o: &CleanupOutcome) -> Self {
        let color = o.graph.colors_in_use().first().copied().unwrap_or(0);
        Self { color, removed: o.removed, rounds: o.rounds, success: o.success, reason: o.reason.clone() }
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PipelineReport {
    pub cleanup: Vec<CleanupSummary>,
    pub vicinity: VicinityReport,
    pub generated_edges: usize,
    pub framework: FrameworkReport,
    /// Closed walks built from arcs, for colors meeting V1-V3.
    pub constructed_walks: Vec<ClosedWalkEntry>,
    pub implications: Vec<Implication>,
}

impl PipelineReport {
    pub fn implications_hold(&self) -> bool {
        self.implications.iter().all(|i| i.holds)
    }
}

/// cleanup → maximal vicinities → V-check → generated graph → F-check, with
/// the V ⟹ F implications asserted on the instance.
pub fn pipeline_vicinity_to_framework(
    r: &OneKGraph,
    perturbed: Option<&OneKGraph>,
    alpha: &Ratio,
    gamma: &Ratio,
    delta: &Ratio,
    opts: &FrameworkOptions,
) -> Result<(Vec<Vicinity>, PipelineReport)> {
    let (t, n, k) = (r.colors(), r.n(), r.k());
    let empty = OneKGraph::empty(t, n, k);
    let perturbed = perturbed.unwrap_or(&empty);

    let mut cleaned = OneKGraph::empty(t, n, k);
    let mut cleanup = Vec::new();
    for c in 0..t {
        let r_c = r.restrict_colors(|x| x == c);
        let i_c = perturbed.restrict_colors(|x| x == c);
        if r_c.is_empty() {
            continue;
        }
        let floor = min_relative_codegree(&r_c, c);
        let outcome = cleanup_perturbed(&r_c, &i_c, alpha, &floor)?;
        let mut summary = CleanupSummary::from(&outcome);
        summary.color = c;
        cleanup.push(summary);
        cleaned = cleaned.union(&outcome.graph)?;
    }

    log::debug!("pipeline: cleanup kept {} edges", cleaned.edge_count());
    let family = build_max_vicinity(&cleaned)?;
    let vicinity = verify_vicinity(&cleaned, &family, gamma, delta)?;
    let h = generate_family(&cleaned, &family)?;
    log::debug!("pipeline: generated {} edges", h.edge_count());
    let framework = verify_framework(&h, alpha, gamma, delta, opts)?;
    log::debug!("pipeline: framework checked");

    let mut implications = Vec::new();
    let mut constructed_walks = Vec::new();
    for vic in &family {
        let c = vic.color();
        let premise = color_v123(vic);
        if !premise {
            continue;
        }
        let h_c = h.restrict_colors(|x| x == c);
        let (walk, detail) = match closed_walk_one_mod_k(&h_c, vic) {
            Ok(w) => {
                let ok = w.walk.len() % k == 1 && validate(&h, &w.walk)?.is_valid();
                (ok.then_some(w.walk), None)
            }
            Err(e) => (None, Some(e.to_string())),
        };
        let f1 = framework.f1[c].holds;
        implications.push(Implication::new(
            format!("V1-V3 ⟹ F1 (color {c})"),
            true,
            f1,
            None,
        ));
        implications.push(Implication::new(
            format!("V1-V3 ⟹ F2 (color {c})"),
            true,
            walk.is_some(),
            detail,
        ));
        constructed_walks.push(ClosedWalkEntry { color: c, walk });
    }
    implications.push(Implication::new(
        "V4 ⟹ F3",
        vicinity.v4.holds && !family.iter().all(Vicinity::is_empty),
        framework.f3_holds(),
        None,
    ));
    if k == 3 {
        implications.push(Implication::new("V5 ⟹ F4", vicinity.v5.holds, framework.f4_holds(), None));
    }
    implications.push(Implication::new("V6 ⟹ F5", vicinity.v6.holds && vicinity.v2.holds, framework.f5_holds(), None));

    let generated_edges = h.edge_count();
    Ok((
        family,
        PipelineReport { cleanup, vicinity, generated_edges, framework, constructed_walks, implications },
    ))
}
