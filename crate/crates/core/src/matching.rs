//! Fractional matchings, b-fractional matchings and robust matchability.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{fraction_string, int, ratio, ser_ratio, ser_ratios, Ratio};
use crate::error::{Error, Result};
use crate::hypergraph::{Color, KGraph, OneKGraph, Point};
use crate::lp::{solve, Constraint, LinearProgram, LpOutcome, Relation, Scalar};

/// Instances with at most this many edges are solved in exact arithmetic.
pub const EXACT_EDGE_LIMIT: usize = 200;
/// Robust matchability enumerates every hypercube corner up to this many vertices.
pub const EXHAUSTIVE_VERTEX_LIMIT: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Arithmetic {
    #[default]
    Auto,
    Exact,
    Float,
}

impl Arithmetic {
    fn exact_for(self, edges: usize) -> bool {
        match self {
            Arithmetic::Auto => edges <= EXACT_EDGE_LIMIT,
            Arithmetic::Exact => true,
            Arithmetic::Float => false,
        }
    }
}

/// Edge weights of a fractional matching in a k-graph.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FractionalMatching {
    pub n: usize,
    pub k: usize,
    pub edges: Vec<Vec<Point>>,
    #[serde(serialize_with = "ser_ratios")]
    pub weights: Vec<Ratio>,
    /// Whether the weights came from exact arithmetic.
    pub exact: bool,
}

impl FractionalMatching {
    pub fn zero(g: &KGraph) -> Self {
        Self {
            n: g.n(),
            k: g.k(),
            edges: g.edges().to_vec(),
            weights: vec![Ratio::zero(); g.edge_count()],
            exact: true,
        }
    }

    pub fn size(&self) -> Ratio {
        self.weights.iter().fold(Ratio::zero(), |a, w| a + w)
    }

    /// Size divided by the number of vertices of the host.
    pub fn density(&self) -> Ratio {
        if self.n == 0 {
            return Ratio::zero();
        }
        self.size() / int(self.n as i64)
    }

    pub fn loads(&self) -> Vec<Ratio> {
        let mut loads = vec![Ratio::zero(); self.n];
        for (e, w) in self.edges.iter().zip(&self.weights) {
            for &v in e {
                loads[v] += w;
            }
        }
        loads
    }

    /// All weights in [0, 1] and every load within `b` (up to float tolerance when inexact).
    pub fn respects(&self, b: &[Ratio]) -> bool {
        let slack = if self.exact { Ratio::zero() } else { ratio(1, 1_000_000_000) };
        self.weights
            .iter()
            .all(|w| *w >= -slack.clone() && *w <= Ratio::one() + &slack)
            && self.loads().iter().zip(b).all(|(l, bv)| *l <= bv + &slack)
    }

    pub fn weight_strings(&self) -> Vec<(Vec<Point>, String)> {
        self.edges
            .iter()
            .zip(&self.weights)
            .filter(|(_, w)| !w.is_zero())
            .map(|(e, w)| (e.clone(), fraction_string(w)))
            .collect()
    }
}

pub fn matching_density(m: &FractionalMatching) -> Ratio {
    m.density()
}

pub fn uniform_weights(n: usize) -> Vec<Ratio> {
    vec![Ratio::one(); n]
}

type CacheKey = (usize, usize, Vec<Vec<Point>>, Vec<Ratio>, bool);

fn cache() -> &'static Mutex<HashMap<CacheKey, FractionalMatching>> {
    static CACHE: OnceLock<Mutex<HashMap<CacheKey, FractionalMatching>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

const CACHE_LIMIT: usize = 4096;

fn load_rows<T: Scalar>(g: &KGraph, b: &[Ratio], relation: Relation, divisor: &Ratio) -> Vec<Constraint<T>> {
    let mut rows: Vec<Vec<(usize, T)>> = vec![Vec::new(); g.n()];
    for (j, e) in g.edges().iter().enumerate() {
        for &v in e {
            rows[v].push((j, T::unit()));
        }
    }
    rows.into_iter()
        .zip(b)
        .map(|(coeffs, bv)| Constraint { coeffs, relation, rhs: T::from_ratio(&(bv / divisor)) })
        .collect()
}

fn solve_max<T: Scalar>(g: &KGraph, b: &[Ratio]) -> Vec<Ratio> {
    let lp = LinearProgram {
        vars: g.edge_count(),
        objective: vec![T::unit(); g.edge_count()],
        constraints: load_rows::<T>(g, b, Relation::Le, &Ratio::one()),
    };
    match solve(&lp) {
        LpOutcome::Optimal { x, .. } => x.iter().map(Scalar::to_ratio).collect(),
        // w = 0 is always feasible and the objective is bounded by the loads
        other => unreachable!("fractional matching LP returned {other:?}"),
    }
}

fn check_weights(g: &KGraph, b: &[Ratio]) -> Result<()> {
    if b.len() != g.n() {
        return Err(Error::InvalidParameter(format!(
            "weighting has {} entries for {} vertices",
            b.len(),
            g.n()
        )));
    }
    if let Some(v) = b.iter().position(|x| *x < Ratio::zero() || *x > Ratio::one()) {
        return Err(Error::InvalidParameter(format!("b({v}) outside [0, 1]")));
    }
    Ok(())
}

/// Maximum b-fractional matching: maximize Σ w(e) subject to Σ_{e∋v} w(e) ≤ b(v).
pub fn max_fractional_matching(g: &KGraph, b: &[Ratio]) -> Result<FractionalMatching> {
    max_fractional_matching_with(g, b, Arithmetic::Auto)
}

pub fn max_fractional_matching_with(
    g: &KGraph,
    b: &[Ratio],
    arithmetic: Arithmetic,
) -> Result<FractionalMatching> {
    check_weights(g, b)?;
    let exact = arithmetic.exact_for(g.edge_count());
    let key: CacheKey = (g.n(), g.k(), g.edges().to_vec(), b.to_vec(), exact);
    if let Some(hit) = cache().lock().unwrap().get(&key) {
        return Ok(hit.clone());
    }
    let weights = if g.is_empty() {
        Vec::new()
    } else if exact {
        solve_max::<Ratio>(g, b)
    } else {
        solve_max::<f64>(g, b)
    };
    let m = FractionalMatching { n: g.n(), k: g.k(), edges: g.edges().to_vec(), weights, exact };
    let mut c = cache().lock().unwrap();
    if c.len() >= CACHE_LIMIT {
        c.clear();
    }
    c.insert(key, m.clone());
    Ok(m)
}

/// Feasibility of Σ_{e∋v} w(e) = b(v)/divisor for all v.
fn equality_feasible(g: &KGraph, b: &[Ratio], divisor: &Ratio, exact: bool) -> bool {
    fn run<T: Scalar>(g: &KGraph, b: &[Ratio], divisor: &Ratio) -> bool {
        let lp = LinearProgram {
            vars: g.edge_count(),
            objective: vec![T::nil(); g.edge_count()],
            constraints: load_rows::<T>(g, b, Relation::Eq, divisor),
        };
        matches!(solve(&lp), LpOutcome::Optimal { .. })
    }
    if exact {
        run::<Ratio>(g, b, divisor)
    } else {
        run::<f64>(g, b, divisor)
    }
}

/// Which reading of robust matchability decides the verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RobustForm {
    /// A b-fractional matching with loads ≤ b(v) and size ≥ Σb / (divisor · uniformity).
    Size,
    /// Loads exactly b(v) / divisor at every vertex.
    Equality,
}

#[derive(Debug, Clone)]
pub struct RobustOptions {
    pub form: RobustForm,
    /// Defaults to uniformity − 1.
    pub divisor: Option<usize>,
    pub arithmetic: Arithmetic,
    pub samples: usize,
    pub seed: u64,
    /// Also evaluate the other form, for information.
    pub report_both: bool,
}

impl Default for RobustOptions {
    fn default() -> Self {
        Self {
            form: RobustForm::Size,
            divisor: None,
            arithmetic: Arithmetic::Auto,
            samples: 64,
            seed: 0,
            report_both: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RobustReport {
    pub form: RobustForm,
    pub holds: bool,
    #[serde(serialize_with = "ser_ratio")]
    pub gamma: Ratio,
    pub divisor: usize,
    /// Every corner of [1-γ, 1]^V was examined.
    pub exhaustive: bool,
    pub corners_checked: usize,
    /// First failing corner in canonical order (vertices set to 1-γ).
    pub counterexample: Option<Vec<Point>>,
    /// Verdict of the other form when requested.
    pub other_form_holds: Option<bool>,
}

/// Whether the reading `form` holds at the corner where `low` vertices take 1-γ.
fn corner_ok(g: &KGraph, low: &[bool], gamma: &Ratio, divisor: &Ratio, form: RobustForm, arithmetic: Arithmetic) -> bool {
    let b: Vec<Ratio> = low
        .iter()
        .map(|&l| if l { Ratio::one() - gamma } else { Ratio::one() })
        .collect();
    let exact = arithmetic.exact_for(g.edge_count());
    match form {
        RobustForm::Equality => equality_feasible(g, &b, divisor, exact),
        RobustForm::Size => {
            let total = b.iter().fold(Ratio::zero(), |a, x| a + x);
            let target = total / (divisor * int(g.k() as i64));
            if exact && float_certifies(g, &b, &target) {
                return true;
            }
            let m = max_fractional_matching_with(g, &b, arithmetic).expect("weights in range");
            let size = m.size();
            if m.exact {
                size >= target
            } else {
                crate::arith::to_f64(&size) >= crate::arith::to_f64(&target) - crate::lp::FLOAT_TOLERANCE
            }
        }
    }
}

/// Solves in floating point, then checks exactly that the rounded weights,
/// scaled down until every load fits under b, still reach `target`. A false
/// answer proves nothing.
fn float_certifies(g: &KGraph, b: &[Ratio], target: &Ratio) -> bool {
    if g.is_empty() {
        return target.is_zero();
    }
    let w: Vec<Ratio> = solve_max::<f64>(g, b).into_iter().map(|x| x.max(Ratio::zero())).collect();
    let mut load = vec![Ratio::zero(); g.n()];
    for (e, x) in g.edges().iter().zip(&w) {
        for &v in e {
            load[v] += x;
        }
    }
    let mut scale = Ratio::one();
    for (l, cap) in load.iter().zip(b) {
        if l > cap {
            if cap.is_zero() {
                return false;
            }
            scale = scale.max(l / cap);
        }
    }
    let size = w.iter().fold(Ratio::zero(), |a, x| a + x) / scale;
    size >= *target
}

fn corners(n: usize, samples: usize, seed: u64) -> (Vec<Vec<bool>>, bool) {
    if n <= EXHAUSTIVE_VERTEX_LIMIT {
        let all = (0..1u64 << n)
            .map(|mask| (0..n).map(|v| mask >> v & 1 == 1).collect())
            .collect();
        return (all, true);
    }
    let mut out = vec![vec![false; n], vec![true; n]];
    for v in 0..n {
        let mut one_low = vec![false; n];
        one_low[v] = true;
        out.push(one_low);
        let mut one_high = vec![true; n];
        one_high[v] = false;
        out.push(one_high);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        out.push((0..n).map(|_| rng.gen_bool(0.5)).collect());
    }
    (out, false)
}

/// γ-robust matchability, decided at the corners of [1-γ, 1]^V.
///
/// Under both readings the set of admissible b is convex (an LP value is
/// concave in its right-hand side), so the corners decide the whole cube.
/// Above `EXHAUSTIVE_VERTEX_LIMIT` vertices only sampled corners are checked
/// and the report says so.
pub fn is_robustly_matchable(g: &KGraph, gamma: &Ratio, opts: &RobustOptions) -> Result<RobustReport> {
    crate::arith::check_unit_interval("gamma", gamma)?;
    let divisor = opts.divisor.unwrap_or(g.k().saturating_sub(1));
    if divisor == 0 {
        return Err(Error::InvalidParameter("divisor must be positive".into()));
    }
    let div = int(divisor as i64);
    let n = g.n();
    let (cands, exhaustive) = if gamma.is_zero() {
        (vec![vec![false; n]], true)
    } else {
        corners(n, opts.samples, opts.seed)
    };
    let evaluate = |form: RobustForm| -> (bool, usize, Option<Vec<Point>>) {
        let first_bad = cands
            .par_iter()
            .position_first(|low| !corner_ok(g, low, gamma, &div, form, opts.arithmetic));
        match first_bad {
            None => (true, cands.len(), None),
            Some(i) => {
                let low = cands[i].iter().enumerate().filter(|(_, &l)| l).map(|(v, _)| v).collect();
                (false, i + 1, Some(low))
            }
        }
    };
    let (holds, corners_checked, counterexample) = evaluate(opts.form);
    let other_form_holds = opts.report_both.then(|| {
        let other = match opts.form {
            RobustForm::Size => RobustForm::Equality,
            RobustForm::Equality => RobustForm::Size,
        };
        evaluate(other).0
    });
    Ok(RobustReport {
        form: opts.form,
        holds,
        gamma: gamma.clone(),
        divisor,
        exhaustive,
        corners_checked,
        counterexample,
        other_form_holds,
    })
}

/// A fractional matching of the (k+1)-uniform encoding of a (1,k)-graph,
/// with colors as vertices `n..n+colors`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LiftedMatching {
    pub matching: FractionalMatching,
    #[serde(serialize_with = "ser_ratios")]
    pub color_loads: Vec<Ratio>,
    #[serde(serialize_with = "ser_ratio")]
    pub size: Ratio,
}

/// Combines per-color matchings w_c of the links L({c}), each of size m,
/// into w(c ∪ e) = w_c(e) / n. The result has size m·colors/n.
pub fn lift_link_matchings(
    r: &OneKGraph,
    per_color: &[FractionalMatching],
    b: &[Ratio],
) -> Result<LiftedMatching> {
    let (n, k, colors) = (r.n(), r.k(), r.colors());
    if per_color.len() != colors {
        return Err(Error::InvalidParameter(format!(
            "{} matchings for {colors} colors",
            per_color.len()
        )));
    }
    if colors * k != n {
        return Err(Error::Precondition(format!(
            "lifting needs n/k colors (got {colors} colors, n = {n}, k = {k})"
        )));
    }
    if b.len() != n {
        return Err(Error::InvalidParameter("weighting must cover the points".into()));
    }
    let m = per_color.first().map(FractionalMatching::size).unwrap_or_else(Ratio::zero);
    for (c, w) in per_color.iter().enumerate() {
        if w.n != n || w.k != k {
            return Err(Error::InvalidParameter(format!("matching of color {c} has the wrong shape")));
        }
        if !w.respects(b) {
            return Err(Error::Precondition(format!("matching of color {c} violates its loads")));
        }
        if w.size() != m {
            return Err(Error::Precondition("per-color matchings differ in size".into()));
        }
        if let Some(e) = w.edges.iter().zip(&w.weights).find(|(e, x)| !x.is_zero() && !r.contains(c, e)) {
            return Err(Error::Precondition(format!("{:?} is not in the link of color {c}", e.0)));
        }
    }
    if m > ratio(n as u128, k as u128) {
        return Err(Error::Precondition("matching size exceeds n/k".into()));
    }
    let scale = int(n as i64);
    let mut edges = Vec::new();
    let mut weights = Vec::new();
    let mut color_loads = vec![Ratio::zero(); colors];
    for (c, w) in per_color.iter().enumerate() {
        for (e, x) in w.edges.iter().zip(&w.weights) {
            if x.is_zero() {
                continue;
            }
            let mut f = e.clone();
            f.push(n + c);
            let lifted = x / &scale;
            color_loads[c] += &lifted;
            edges.push(f);
            weights.push(lifted);
        }
    }
    let matching = FractionalMatching { n: n + colors, k: k + 1, edges, weights, exact: true };
    let size = matching.size();
    let mut full_b = b.to_vec();
    full_b.extend(std::iter::repeat_n(Ratio::one(), colors));
    if !matching.respects(&full_b) {
        return Err(Error::Hypothesis("lifted matching violates a load".into()));
    }
    Ok(LiftedMatching { matching, color_loads, size })
}

/// Outcome of matching after discarding isolated vertices.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct IsolatedReduction {
    pub matching: FractionalMatching,
    pub isolated: Vec<Point>,
    /// Non-isolated vertices whose link has no b-matching of size m.
    pub weak_links: Vec<Point>,
    pub meets_target: bool,
}

/// Strips isolated vertices, checks that all but an α-fraction of the rest
/// have link b-matchings of size `m`, solves on the stripped graph and
/// re-attaches the isolated vertices with zero load.
pub fn remove_isolated_then_match(
    g: &KGraph,
    b: &[Ratio],
    m: &Ratio,
    alpha: &Ratio,
) -> Result<IsolatedReduction> {
    check_weights(g, b)?;
    let present = g.non_isolated();
    let isolated: Vec<Point> = (0..g.n()).filter(|v| present.binary_search(v).is_err()).collect();
    let mut weak_links = Vec::new();
    for &v in &present {
        let link = g.link(&[v])?;
        let size = max_fractional_matching(&link, b)?.size();
        if size < *m {
            weak_links.push(v);
        }
    }
    if ratio(weak_links.len() as u128, g.n().max(1) as u128) > *alpha {
        return Err(Error::Hypothesis(format!(
            "{} vertices have link matchings below the target",
            weak_links.len()
        )));
    }
    let index: HashMap<Point, usize> = present.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let stripped = KGraph::new(
        present.len(),
        g.k(),
        g.edges().iter().map(|e| e.iter().map(|v| index[v]).collect::<Vec<_>>()),
    )?;
    let sb: Vec<Ratio> = present.iter().map(|&v| b[v].clone()).collect();
    let inner = max_fractional_matching(&stripped, &sb)?;
    let matching = FractionalMatching {
        n: g.n(),
        k: g.k(),
        edges: g.edges().to_vec(),
        weights: inner.weights,
        exact: inner.exact,
    };
    let meets_target = matching.size() >= *m;
    Ok(IsolatedReduction { matching, isolated, weak_links, meets_target })
}

/// H[W ∪ V] as a (k+1)-uniform graph: points keep their labels, the colors of
/// `colors` become vertices `n, n+1, …` in the given order.
pub fn color_block_graph(r: &OneKGraph, colors: &[Color]) -> KGraph {
    let n = r.n();
    let pos: HashMap<Color, usize> = colors.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let edges: Vec<Vec<Point>> = r
        .edges()
        .filter_map(|(c, e)| {
            pos.get(&c).map(|&i| {
                let mut f = e.to_vec();
                f.push(n + i);
                f
            })
        })
        .collect();
    KGraph::new(n + colors.len(), r.k() + 1, edges).expect("valid by construction")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_and_k4() {
        let tri = KGraph::complete(3, 2);
        let m = max_fractional_matching(&tri, &uniform_weights(3)).unwrap();
        assert_eq!(m.size(), ratio(3, 2));
        assert!(m.weights.iter().all(|w| *w == ratio(1, 2)));
        assert_eq!(m.density(), ratio(1, 2));
        let k4 = KGraph::complete(4, 2);
        let m = max_fractional_matching(&k4, &uniform_weights(4)).unwrap();
        assert_eq!(m.size(), int(2));
    }

    #[test]
    fn single_edge_not_robust() {
        let g = KGraph::new(3, 3, vec![vec![0, 1, 2]]).unwrap();
        let opts = RobustOptions { form: RobustForm::Equality, ..Default::default() };
        let rep = is_robustly_matchable(&g, &ratio(1, 10), &opts).unwrap();
        assert!(!rep.holds);
        assert!(rep.exhaustive);
        let rep0 = is_robustly_matchable(&g, &Ratio::zero(), &opts).unwrap();
        assert_eq!(rep0.corners_checked, 1);
    }

    #[test]
    fn float_and_exact_agree() {
        let g = KGraph::complete(6, 3);
        let b = uniform_weights(6);
        let e = max_fractional_matching_with(&g, &b, Arithmetic::Exact).unwrap();
        let f = max_fractional_matching_with(&g, &b, Arithmetic::Float).unwrap();
        assert_eq!(e.size(), int(2));
        assert!((crate::arith::to_f64(&f.size()) - 2.0).abs() < 1e-9);
    }

    #[test]
    fn isolated_vertices_do_not_change_value() {
        let g = KGraph::new(6, 2, vec![vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap();
        let red = remove_isolated_then_match(&g, &uniform_weights(6), &ratio(1, 2), &Ratio::zero()).unwrap();
        assert_eq!(red.isolated, vec![3, 4, 5]);
        assert_eq!(red.matching.size(), ratio(3, 2));
        assert!(red.meets_target);
    }

    #[test]
    fn float_screen_never_overrules_exact() {
        use itertools::Itertools;
        let all: Vec<Vec<Point>> = (0..6).combinations(3).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..40 {
            let g = KGraph::new(6, 3, all.iter().filter(|_| rng.gen_bool(0.4)).cloned()).unwrap();
            let b: Vec<Ratio> = (0..6).map(|_| if rng.gen_bool(0.5) { ratio(9, 10) } else { Ratio::one() }).collect();
            let exact = max_fractional_matching_with(&g, &b, Arithmetic::Exact).unwrap().size();
            for target in [ratio(1, 2), ratio(1, 1), ratio(3, 2), exact.clone()] {
                if float_certifies(&g, &b, &target) {
                    assert!(exact >= target);
                }
            }
            assert!(float_certifies(&g, &b, &(exact.clone() - ratio(1, 1000))));
        }
    }
}
