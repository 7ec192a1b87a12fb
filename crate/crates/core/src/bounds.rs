//! Closed forms and upper bounds on tree thinness, and the almost-leaves
//! construction.

use std::fmt::Write as _;

use thiserror::Error;

use crate::layout::ConsistentSolution;
use crate::tree::{diameter, Tree};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundsError {
    #[error("closed form for complete m-ary trees needs m >= 3, got {0}")]
    Branching(usize),
    #[error("tree has {0} almost-leaves, the construction needs at least 2")]
    TooFewAlmostLeaves(usize),
}

/// Thinness of the complete `m`-ary tree of height `h`, `m >= 3`.
pub fn closed_form_mary(m: usize, h: usize) -> Result<usize, BoundsError> {
    if m < 3 {
        return Err(BoundsError::Branching(m));
    }
    Ok((h + 1).div_ceil(2))
}

/// Thinness of the complete binary tree of height `h`.
pub fn closed_form_binary(h: usize) -> usize {
    (h + 1).div_ceil(3)
}

pub fn count_leaves(t: &Tree) -> usize {
    (0..t.len()).filter(|&v| t.is_leaf(v)).count()
}

fn is_almost_leaf(t: &Tree, v: usize) -> bool {
    !t.is_leaf(v) && t.neighbors(v).filter(|&u| !t.is_leaf(u)).count() <= 1
}

/// Non-leaves with at most one non-leaf neighbor.
pub fn count_almost_leaves(t: &Tree) -> usize {
    (0..t.len()).filter(|&v| is_almost_leaf(t, v)).count()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundEntry {
    pub name: &'static str,
    pub bound: usize,
    pub measured: usize,
    pub satisfied: bool,
}

/// Upper bounds evaluated against a measured thinness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundReport {
    pub entries: Vec<BoundEntry>,
}

impl BoundReport {
    pub fn all_satisfied(&self) -> bool {
        self.entries.iter().all(|e| e.satisfied)
    }

    pub fn get(&self, name: &str) -> Option<&BoundEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    /// CSV with header `bound,value,measured,satisfied`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("bound,value,measured,satisfied\n");
        for e in &self.entries {
            writeln!(s, "{},{},{},{}", e.name, e.bound, e.measured, e.satisfied).unwrap();
        }
        s
    }
}

/// Largest `k` with `3^k <= x`.
fn floor_log3(x: u128) -> usize {
    let mut k = 0;
    let mut p: u128 = 3;
    while p <= x {
        k += 1;
        p *= 3;
    }
    k
}

/// Checks `k` against every bound that applies to `t`.
///
/// Bounds reported as the largest thinness they allow:
/// `log3`: `3^k <= n + 2`; `leaves`: `2 * leaves >= 3^(k-1) + 3` (n >= 2);
/// `diameter`: `ceil((d+1)/4)`; `diameter_deg3`: `ceil((d+3)/6)` when the
/// maximum degree is at most 3; `almost_leaves`: `t - 1` when `t >= 2`.
pub fn check_bounds(t: &Tree, k: usize) -> BoundReport {
    let n = t.len();
    let mut entries = Vec::new();
    let mut push = |name, bound: usize| {
        entries.push(BoundEntry { name, bound, measured: k, satisfied: k <= bound });
    };

    push("log3", floor_log3(n as u128 + 2));

    if n >= 2 {
        // largest k with 3^(k-1) + 3 <= 2 * leaves
        let leaves = count_leaves(t) as u128;
        let bound = if 2 * leaves >= 4 { floor_log3(2 * leaves - 3) + 1 } else { 0 };
        push("leaves", bound);
    }

    let d = diameter(t);
    push("diameter", (d + 1).div_ceil(4));
    if t.max_degree() <= 3 {
        push("diameter_deg3", (d + 3).div_ceil(6));
    }

    let al = count_almost_leaves(t);
    if al >= 2 {
        push("almost_leaves", al - 1);
    }
    BoundReport { entries }
}

/// The almost-leaves construction: a consistent solution with at most
/// `t - 1` classes, `t` the number of almost-leaves.
pub fn almost_leaves_solution(t: &Tree) -> Result<ConsistentSolution, BoundsError> {
    let n = t.len();
    let al = count_almost_leaves(t);
    if al < 2 {
        return Err(BoundsError::TooFewAlmostLeaves(al));
    }
    // T' is T without its leaves; its leaves are the almost-leaves.
    let inner = |v: usize| !t.is_leaf(v);
    let inner_degree = |v: usize| t.neighbors(v).filter(|&u| inner(u)).count();
    let root = (0..n).find(|&v| inner(v) && inner_degree(v) == 1).expect("T' has a leaf");

    // Post-order over T' rooted at `root`, children in adjacency order.
    let mut parent = vec![usize::MAX; n];
    let mut post = Vec::new();
    let mut stack = vec![(root, 0usize)];
    parent[root] = root;
    while let Some(&(v, next)) = stack.last() {
        match t.neighbors(v).enumerate().skip(next).find(|&(_, u)| inner(u) && parent[u] == usize::MAX) {
            Some((i, u)) => {
                stack.last_mut().unwrap().1 = i + 1;
                parent[u] = v;
                stack.push((u, 0));
            }
            None => {
                post.push(v);
                stack.pop();
            }
        }
    }

    let mut classes = vec![0usize; n];
    let mut opened = 0;
    for &v in &post {
        let first_child = t.neighbors(v).find(|&u| inner(u) && parent[u] == v);
        classes[v] = match first_child {
            Some(c) => classes[c],
            None => {
                opened += 1;
                opened
            }
        };
    }

    let mut order = Vec::with_capacity(n);
    for &v in &post {
        for leaf in t.neighbors(v).filter(|&u| t.is_leaf(u)) {
            order.push(leaf);
            classes[leaf] = classes[v];
        }
        order.push(v);
    }
    Ok(ConsistentSolution { order, classes })
}
