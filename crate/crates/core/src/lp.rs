//! Dense two-phase simplex over exact rationals or floats.

use std::fmt::Debug;

use num::{Signed, Zero};

use crate::arith::{from_f64, Ratio};

/// Field operations the simplex needs; `f64` compares with a tolerance.
pub trait Scalar: Clone + Debug + PartialOrd {
    fn nil() -> Self;
    fn unit() -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn is_positive(&self) -> bool;
    fn is_negative(&self) -> bool;
    fn is_zero_value(&self) -> bool {
        !self.is_positive() && !self.is_negative()
    }
    fn from_ratio(r: &Ratio) -> Self;
    fn to_ratio(&self) -> Ratio;
}

impl Scalar for Ratio {
    fn nil() -> Self {
        Zero::zero()
    }
    fn unit() -> Self {
        num::One::one()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn is_positive(&self) -> bool {
        Signed::is_positive(self)
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn from_ratio(r: &Ratio) -> Self {
        r.clone()
    }
    fn to_ratio(&self) -> Ratio {
        self.clone()
    }
}

pub const FLOAT_TOLERANCE: f64 = 1e-9;

impl Scalar for f64 {
    fn nil() -> Self {
        0.0
    }
    fn unit() -> Self {
        1.0
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn is_positive(&self) -> bool {
        *self > FLOAT_TOLERANCE
    }
    fn is_negative(&self) -> bool {
        *self < -FLOAT_TOLERANCE
    }
    fn from_ratio(r: &Ratio) -> Self {
        crate::arith::to_f64(r)
    }
    fn to_ratio(&self) -> Ratio {
        from_f64(*self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone)]
pub struct Constraint<T> {
    /// Sparse row: (variable, coefficient).
    pub coeffs: Vec<(usize, T)>,
    pub relation: Relation,
    pub rhs: T,
}

/// Maximize `objective · x` subject to the constraints and `x ≥ 0`.
#[derive(Debug, Clone)]
pub struct LinearProgram<T> {
    pub vars: usize,
    pub objective: Vec<T>,
    pub constraints: Vec<Constraint<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome<T> {
    Optimal { value: T, x: Vec<T> },
    Infeasible,
    Unbounded,
}

struct Tableau<T> {
    /// rows[i] has `cols + 1` entries, the last being the right-hand side.
    rows: Vec<Vec<T>>,
    basis: Vec<usize>,
    cols: usize,
}

impl<T: Scalar> Tableau<T> {
    fn pivot(&mut self, obj: &mut [T], r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            *v = v.div(&p);
        }
        let pivot_row = self.rows[r].clone();
        let eliminate = |row: &mut [T]| {
            let f = row[c].clone();
            if f.is_zero_value() {
                row[c] = T::nil();
                return;
            }
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero_value() {
                    *v = v.sub(&f.mul(pv));
                }
            }
            row[c] = T::nil();
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(obj);
        self.basis[r] = c;
    }

    /// Maximizes with the reduced-cost row `obj` (entries c_j - z_j, last
    /// entry minus the current value). Dantzig's rule, falling back to
    /// Bland's rule after a run of degenerate pivots.
    fn optimize(&mut self, obj: &mut [T], allowed: &[bool]) -> bool {
        let m = self.rows.len();
        let mut degenerate_run = 0usize;
        loop {
            let bland = degenerate_run > m + 10;
            let mut enter: Option<usize> = None;
            for j in 0..self.cols {
                if !allowed[j] || !obj[j].is_positive() {
                    continue;
                }
                match enter {
                    None => enter = Some(j),
                    Some(e) if !bland && obj[j] > obj[e] => enter = Some(j),
                    _ => {}
                }
                if bland {
                    break;
                }
            }
            let Some(c) = enter else { return true };
            let mut leave: Option<(usize, T)> = None;
            for i in 0..m {
                let a = &self.rows[i][c];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rows[i][self.cols].div(a);
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => {
                        let d = ratio.sub(lr);
                        d.is_negative() || (d.is_zero_value() && self.basis[i] < self.basis[*li])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((r, ratio)) = leave else { return false };
            if ratio.is_zero_value() {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            self.pivot(obj, r, c);
        }
    }
}

pub fn solve<T: Scalar>(lp: &LinearProgram<T>) -> LpOutcome<T> {
    let n = lp.vars;
    let m = lp.constraints.len();
    // normalize to non-negative right-hand sides
    let mut rows: Vec<(Vec<T>, Relation, T)> = Vec::with_capacity(m);
    for c in &lp.constraints {
        let mut dense = vec![T::nil(); n];
        for (j, v) in &c.coeffs {
            dense[*j] = dense[*j].add(v);
        }
        if c.rhs.is_negative() {
            let neg = |x: &T| T::nil().sub(x);
            let rel = match c.relation {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
            rows.push((dense.iter().map(neg).collect(), rel, neg(&c.rhs)));
        } else {
            rows.push((dense, c.relation, c.rhs.clone()));
        }
    }
    let slack_count = rows.iter().filter(|r| r.1 != Relation::Eq).count();
    let art_count = rows.iter().filter(|r| r.1 != Relation::Le).count();
    let cols = n + slack_count + art_count;
    let mut tab = Tableau { rows: Vec::with_capacity(m), basis: vec![0; m], cols };
    let mut is_art = vec![false; cols];
    let (mut next_slack, mut next_art) = (n, n + slack_count);
    for (i, (dense, rel, rhs)) in rows.into_iter().enumerate() {
        let mut row = dense;
        row.resize(cols + 1, T::nil());
        row[cols] = rhs;
        match rel {
            Relation::Le => {
                row[next_slack] = T::unit();
                tab.basis[i] = next_slack;
                next_slack += 1;
            }
            Relation::Ge => {
                row[next_slack] = T::nil().sub(&T::unit());
                next_slack += 1;
                row[next_art] = T::unit();
                is_art[next_art] = true;
                tab.basis[i] = next_art;
                next_art += 1;
            }
            Relation::Eq => {
                row[next_art] = T::unit();
                is_art[next_art] = true;
                tab.basis[i] = next_art;
                next_art += 1;
            }
        }
        tab.rows.push(row);
    }

    // phase 1: maximize -(sum of artificials)
    if art_count > 0 {
        let mut obj = vec![T::nil(); cols + 1];
        for (i, row) in tab.rows.iter().enumerate() {
            if is_art[tab.basis[i]] {
                for j in 0..=cols {
                    if j == cols || !is_art[j] {
                        obj[j] = obj[j].add(&row[j]);
                    }
                }
            }
        }
        let allowed = vec![true; cols];
        tab.optimize(&mut obj, &allowed);
        // obj[cols] holds the sum of artificial values
        if obj[cols].is_positive() {
            return LpOutcome::Infeasible;
        }
        // drive zero-valued artificials out of the basis, dropping redundant rows
        let mut i = 0;
        while i < tab.rows.len() {
            if is_art[tab.basis[i]] {
                match (0..cols).find(|&j| !is_art[j] && !tab.rows[i][j].is_zero_value()) {
                    Some(j) => {
                        tab.pivot(&mut obj, i, j);
                        i += 1;
                    }
                    None => {
                        tab.rows.remove(i);
                        tab.basis.remove(i);
                    }
                }
            } else {
                i += 1;
            }
        }
    }

    // phase 2
    let mut obj = vec![T::nil(); cols + 1];
    for (j, c) in lp.objective.iter().enumerate() {
        obj[j] = c.clone();
    }
    for (i, row) in tab.rows.iter().enumerate() {
        let cb = obj[tab.basis[i]].clone();
        if cb.is_zero_value() {
            continue;
        }
        for j in 0..=cols {
            obj[j] = obj[j].sub(&cb.mul(&row[j]));
        }
    }
    let allowed: Vec<bool> = is_art.iter().map(|a| !a).collect();
    if !tab.optimize(&mut obj, &allowed) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![T::nil(); n];
    for (i, &b) in tab.basis.iter().enumerate() {
        if b < n {
            x[b] = tab.rows[i][cols].clone();
        }
    }
    let value = lp
        .objective
        .iter()
        .zip(&x)
        .fold(T::nil(), |acc, (c, v)| acc.add(&c.mul(v)));
    LpOutcome::Optimal { value, x }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ratio;

    fn le<T>(coeffs: Vec<(usize, T)>, rhs: T) -> Constraint<T> {
        Constraint { coeffs, relation: Relation::Le, rhs }
    }

    #[test]
    fn textbook_max() {
        // max 3x + 5y, x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 -> 36 at (2, 6)
        let lp = LinearProgram {
            vars: 2,
            objective: vec![3.0, 5.0],
            constraints: vec![
                le(vec![(0, 1.0)], 4.0),
                le(vec![(1, 2.0)], 12.0),
                le(vec![(0, 3.0), (1, 2.0)], 18.0),
            ],
        };
        match solve(&lp) {
            LpOutcome::Optimal { value, x } => {
                assert!((value - 36.0).abs() < 1e-9);
                assert!((x[0] - 2.0).abs() < 1e-9 && (x[1] - 6.0).abs() < 1e-9);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn equality_and_infeasible() {
        let r = |a, b| ratio(a, b);
        // x + y = 1, x - y = 0 (as x = y), max x -> 1/2
        let lp = LinearProgram {
            vars: 2,
            objective: vec![r(1, 1), r(0, 1)],
            constraints: vec![
                Constraint { coeffs: vec![(0, r(1, 1)), (1, r(1, 1))], relation: Relation::Eq, rhs: r(1, 1) },
                Constraint {
                    coeffs: vec![(0, r(1, 1)), (1, -r(1, 1))],
                    relation: Relation::Eq,
                    rhs: r(0, 1),
                },
            ],
        };
        assert_eq!(
            solve(&lp),
            LpOutcome::Optimal { value: r(1, 2), x: vec![r(1, 2), r(1, 2)] }
        );
        let bad = LinearProgram {
            vars: 1,
            objective: vec![r(1, 1)],
            constraints: vec![
                le(vec![(0, r(1, 1))], r(1, 1)),
                Constraint { coeffs: vec![(0, r(1, 1))], relation: Relation::Ge, rhs: r(2, 1) },
            ],
        };
        assert_eq!(solve(&bad), LpOutcome::Infeasible);
        let unbounded = LinearProgram { vars: 1, objective: vec![r(1, 1)], constraints: vec![] };
        assert_eq!(solve(&unbounded), LpOutcome::Unbounded);
    }
}
