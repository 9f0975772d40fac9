//! Sequentially walks, paths and cycles in (1,k)-graphs.
//!
//! A walk is an ordered point list plus one color per window of k consecutive
//! points. Length is the number of points. Closed walks do not repeat their
//! first points at the end; windows wrap around instead.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{Color, OneKGraph, Point};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeqWalk {
    pub colors: Vec<Color>,
    pub points: Vec<Point>,
    #[serde(default)]
    pub closed: bool,
}

/// Outcome of replaying a walk against its host graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WalkCheck {
    Valid,
    /// First window (index into `colors`) that is not an edge of the host.
    InvalidWindow(usize),
}

impl WalkCheck {
    pub fn is_valid(&self) -> bool {
        matches!(self, WalkCheck::Valid)
    }
}

pub(crate) fn expected_colors(len: usize, k: usize, closed: bool) -> usize {
    if closed {
        len
    } else {
        (len + 1).saturating_sub(k)
    }
}

impl SeqWalk {
    pub fn open(colors: Vec<Color>, points: Vec<Point>) -> Self {
        Self {
            colors,
            points,
            closed: false,
        }
    }

    pub fn closed(colors: Vec<Color>, points: Vec<Point>) -> Self {
        Self {
            colors,
            points,
            closed: true,
        }
    }

    pub fn empty() -> Self {
        Self::open(Vec::new(), Vec::new())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Checks the color/point count relation for uniformity `k`.
    pub fn check_shape(&self, k: usize) -> Result<()> {
        let want = expected_colors(self.points.len(), k, self.closed);
        if self.colors.len() != want {
            return Err(Error::MalformedWalk(format!(
                "{} points need {want} colors for k = {k}, found {}",
                self.points.len(),
                self.colors.len()
            )));
        }
        Ok(())
    }

    /// Points of window `i` in walk order.
    pub fn window(&self, i: usize, k: usize) -> Vec<Point> {
        let len = self.points.len();
        (0..k).map(|j| self.points[(i + j) % len]).collect()
    }

    pub fn window_count(&self) -> usize {
        self.colors.len()
    }

    /// First k points (with the first color), when the walk has a window.
    pub fn start_tuple(&self, k: usize) -> Option<(Color, Vec<Point>)> {
        (!self.colors.is_empty()).then(|| (self.colors[0], self.points[..k].to_vec()))
    }

    /// Last k points (with the last color) of an open walk.
    pub fn end_tuple(&self, k: usize) -> Option<(Color, Vec<Point>)> {
        (!self.colors.is_empty() && !self.closed).then(|| {
            (
                *self.colors.last().unwrap(),
                self.points[self.points.len() - k..].to_vec(),
            )
        })
    }

    pub fn is_rainbow(&self) -> bool {
        is_rainbow(self)
    }

    /// Rotation-invariant comparison of closed walks (colors rotate with points).
    pub fn same_cycle(&self, other: &SeqWalk) -> bool {
        if self.closed != other.closed || self.points.len() != other.points.len() {
            return false;
        }
        if !self.closed {
            return self == other;
        }
        let len = self.points.len();
        if len == 0 {
            return true;
        }
        (0..len).any(|r| {
            (0..len).all(|i| {
                self.points[(i + r) % len] == other.points[i]
                    && self.colors[(i + r) % len] == other.colors[i]
            })
        })
    }
}

/// Replays every window against `g` (cyclically for closed walks).
pub fn validate(g: &OneKGraph, w: &SeqWalk) -> Result<WalkCheck> {
    let k = g.k();
    w.check_shape(k)?;
    if let Some(&v) = w.points.iter().find(|&&v| v >= g.n()) {
        return Err(Error::VertexOutOfRange { vertex: v, n: g.n() });
    }
    for (i, &c) in w.colors.iter().enumerate() {
        if !g.contains_unordered(c, &w.window(i, k)) {
            return Ok(WalkCheck::InvalidWindow(i));
        }
    }
    Ok(WalkCheck::Valid)
}

pub fn is_rainbow(w: &SeqWalk) -> bool {
    let mut seen = std::collections::HashSet::new();
    w.colors.iter().all(|c| seen.insert(*c))
}

fn all_distinct(xs: &[usize]) -> bool {
    let mut seen = std::collections::HashSet::new();
    xs.iter().all(|x| seen.insert(*x))
}

/// A walk with pairwise distinct points and colors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeqPath(SeqWalk);

impl SeqPath {
    pub fn new(walk: SeqWalk) -> Result<Self> {
        if walk.closed {
            return Err(Error::MalformedWalk("a path is not closed".into()));
        }
        if !all_distinct(&walk.points) || !all_distinct(&walk.colors) {
            return Err(Error::MalformedWalk(
                "a path needs distinct points and distinct colors".into(),
            ));
        }
        Ok(Self(walk))
    }

    pub fn walk(&self) -> &SeqWalk {
        &self.0
    }

    pub fn into_walk(self) -> SeqWalk {
        self.0
    }
}

/// A closed walk with pairwise distinct points and colors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeqCycle(SeqWalk);

impl SeqCycle {
    pub fn new(walk: SeqWalk) -> Result<Self> {
        if !walk.closed {
            return Err(Error::MalformedWalk("a cycle must be closed".into()));
        }
        if !all_distinct(&walk.points) || !all_distinct(&walk.colors) {
            return Err(Error::MalformedWalk(
                "a cycle needs distinct points and distinct colors".into(),
            ));
        }
        Ok(Self(walk))
    }

    pub fn walk(&self) -> &SeqWalk {
        &self.0
    }

    pub fn into_walk(self) -> SeqWalk {
        self.0
    }

    /// Spans all n points with n colors.
    pub fn is_hamilton(&self, n: usize) -> bool {
        self.0.points.len() == n && self.0.colors.len() == n
    }
}

/// Joins two open walks overlapping on a shared (k-1)-tuple.
pub fn concatenate(w1: &SeqWalk, w2: &SeqWalk, k: usize) -> Result<SeqWalk> {
    if w1.closed || w2.closed {
        return Err(Error::Precondition("cannot concatenate closed walks".into()));
    }
    let overlap = k - 1;
    if w1.points.len() < overlap || w2.points.len() < overlap {
        return Err(Error::Precondition(format!(
            "both walks need at least {overlap} points"
        )));
    }
    let tail = &w1.points[w1.points.len() - overlap..];
    let head = &w2.points[..overlap];
    if tail != head {
        return Err(Error::Precondition(format!(
            "terminal tuple {tail:?} differs from initial tuple {head:?}"
        )));
    }
    let mut points = w1.points.clone();
    points.extend_from_slice(&w2.points[overlap..]);
    let mut colors = w1.colors.clone();
    colors.extend_from_slice(&w2.colors);
    Ok(SeqWalk::open(colors, points))
}

/// Joins a walk ending in k-tuple X with one starting in X (the tuple appears once).
pub fn join_at_tuple(w1: &SeqWalk, w2: &SeqWalk, k: usize) -> Result<SeqWalk> {
    if w2.points.len() < k || w2.colors.is_empty() {
        return Err(Error::Precondition("second walk has no window".into()));
    }
    let rest = SeqWalk::open(w2.colors[1..].to_vec(), w2.points[1..].to_vec());
    let end = &w1.points[w1.points.len().saturating_sub(k)..];
    if end != &w2.points[..k] {
        return Err(Error::Precondition(format!(
            "terminal tuple {end:?} differs from initial tuple {:?}",
            &w2.points[..k]
        )));
    }
    concatenate(w1, &rest, k)
}

/// Places `w2` directly after `w1`; the k-1 windows across the seam get `seam_color`.
pub fn juxtapose(w1: &SeqWalk, w2: &SeqWalk, k: usize, seam_color: Color) -> SeqWalk {
    let mut points = w1.points.clone();
    points.extend_from_slice(&w2.points);
    let mut colors = w1.colors.clone();
    let seam = expected_colors(points.len(), k, false)
        .saturating_sub(w1.colors.len() + w2.colors.len());
    colors.extend(std::iter::repeat_n(seam_color, seam));
    colors.extend_from_slice(&w2.colors);
    SeqWalk::open(colors, points)
}

/// Splices out stretches between repeated (color, k-tuple) windows whose
/// distance is divisible by k, leftmost first, until no such pair is left.
///
/// Endpoints (first and last (1,k)-tuples) and the length modulo k are kept;
/// at the fixpoint every (1,k)-tuple occurs at most k times.
pub fn shorten_walk(g: &OneKGraph, w: &SeqWalk) -> Result<SeqWalk> {
    if w.closed {
        return Err(Error::Precondition("shorten_walk expects an open walk".into()));
    }
    if let WalkCheck::InvalidWindow(i) = validate(g, w)? {
        return Err(Error::Precondition(format!("input walk invalid at window {i}")));
    }
    let k = g.k();
    let mut cur = w.clone();
    loop {
        let Some((p, q)) = leftmost_splice(&cur, k) else {
            return Ok(cur);
        };
        cur.points.drain(p..q);
        cur.colors.drain(p..q);
    }
}

fn leftmost_splice(w: &SeqWalk, k: usize) -> Option<(usize, usize)> {
    let mut positions: HashMap<(Color, &[Point]), Vec<usize>> = HashMap::new();
    for (i, &c) in w.colors.iter().enumerate() {
        positions.entry((c, &w.points[i..i + k])).or_default().push(i);
    }
    for (p, &c) in w.colors.iter().enumerate() {
        let list = &positions[&(c, &w.points[p..p + k])];
        if let Some(&q) = list.iter().rev().find(|&&q| q > p && (q - p) % k == 0) {
            return Some((p, q));
        }
    }
    None
}

/// All rotations `(v_i, …, v_k, v_1, …, v_{i-1})` in order.
pub fn cyclic_shifts<T: Clone>(tuple: &[T]) -> Vec<Vec<T>> {
    (0..tuple.len())
        .map(|i| {
            let mut t = tuple[i..].to_vec();
            t.extend_from_slice(&tuple[..i]);
            t
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn host() -> OneKGraph {
        OneKGraph::new(2, 4, 3, vec![(0, vec![0, 1, 2]), (1, vec![1, 2, 3])]).unwrap()
    }

    #[test]
    fn validate_examples() {
        let g = host();
        let w = SeqWalk::open(vec![0, 1], vec![0, 1, 2, 3]);
        assert_eq!(validate(&g, &w).unwrap(), WalkCheck::Valid);
        let g2 = OneKGraph::new(2, 4, 3, vec![(0, vec![0, 1, 2])]).unwrap();
        assert_eq!(validate(&g2, &w).unwrap(), WalkCheck::InvalidWindow(1));
        assert_eq!(validate(&g, &SeqWalk::empty()).unwrap(), WalkCheck::Valid);
        let bad = SeqWalk::open(vec![0], vec![0, 1, 2, 3]);
        assert!(matches!(validate(&g, &bad), Err(Error::MalformedWalk(_))));
    }

    #[test]
    fn closed_windows_wrap() {
        let g = OneKGraph::complete(3, 3, 3);
        let w = SeqWalk::closed(vec![0, 1, 2], vec![0, 1, 2]);
        assert!(validate(&g, &w).unwrap().is_valid());
        let rot = SeqWalk::closed(vec![1, 2, 0], vec![1, 2, 0]);
        assert!(w.same_cycle(&rot));
        assert_ne!(w, rot);
    }

    #[test]
    fn rainbow_examples() {
        assert!(is_rainbow(&SeqWalk::open(vec![1, 2, 3], vec![])));
        assert!(!is_rainbow(&SeqWalk::open(vec![1, 2, 1], vec![])));
        assert!(is_rainbow(&SeqWalk::empty()));
    }

    #[test]
    fn concatenate_examples() {
        let w1 = SeqWalk::open(vec![7], vec![0, 1, 2]);
        let w2 = SeqWalk::open(vec![8], vec![1, 2, 3]);
        let w = concatenate(&w1, &w2, 3).unwrap();
        assert_eq!(w, SeqWalk::open(vec![7, 8], vec![0, 1, 2, 3]));
        let w3 = SeqWalk::open(vec![8], vec![2, 1, 3]);
        assert!(concatenate(&w1, &w3, 3).is_err());
    }

    #[test]
    fn join_and_juxtapose() {
        let w1 = SeqWalk::open(vec![0, 0], vec![0, 1, 2, 3]);
        let w2 = SeqWalk::open(vec![0, 0], vec![1, 2, 3, 4]);
        let j = join_at_tuple(&w1, &w2, 3).unwrap();
        assert_eq!(j.points, vec![0, 1, 2, 3, 4]);
        assert_eq!(j.colors.len(), 3);
        let x = juxtapose(&w1, &w2, 3, 5);
        assert_eq!(x.points.len(), 8);
        assert_eq!(x.colors, vec![0, 0, 5, 5, 0, 0]);
    }

    #[test]
    fn shorten_splices_repetition() {
        let g = OneKGraph::complete(1, 4, 3);
        // window (0,1,2) at positions 0 and 3
        let w = SeqWalk::open(vec![0; 5], vec![0, 1, 2, 0, 1, 2, 3]);
        let s = shorten_walk(&g, &w).unwrap();
        assert_eq!(s.points, vec![0, 1, 2, 3]);
        assert_eq!(s.len() % 3, w.len() % 3);
        let minimal = SeqWalk::open(vec![0, 0], vec![0, 1, 2, 3]);
        assert_eq!(shorten_walk(&g, &minimal).unwrap(), minimal);
        let invalid = SeqWalk::open(vec![0], vec![0, 0, 1]);
        assert!(shorten_walk(&g, &invalid).is_err());
    }

    #[test]
    fn shifts() {
        assert_eq!(
            cyclic_shifts(&[1, 2, 3]),
            vec![vec![1, 2, 3], vec![2, 3, 1], vec![3, 1, 2]]
        );
        assert_eq!(cyclic_shifts(&[5]), vec![vec![5]]);
    }

    #[test]
    fn path_and_cycle_refinements() {
        assert!(SeqPath::new(SeqWalk::open(vec![0, 1], vec![0, 1, 2, 3])).is_ok());
        assert!(SeqPath::new(SeqWalk::open(vec![0, 0], vec![0, 1, 2, 3])).is_err());
        let c = SeqCycle::new(SeqWalk::closed(vec![0, 1, 2], vec![2, 0, 1])).unwrap();
        assert!(c.is_hamilton(3));
        assert!(SeqCycle::new(SeqWalk::closed(vec![0, 1, 2], vec![2, 2, 1])).is_err());
    }
}
