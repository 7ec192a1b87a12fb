//! Optimal consistent solutions.
//!
//! [`consistent_solution`] picks a path `P` whose closed neighborhood leaves
//! only components of smaller thinness, solves those recursively and puts
//! everything together with the path layout of [`solution_given_path`]:
//! for each path vertex `x`, each off-path neighbor `v` of `x` goes first,
//! then the solutions of the components hanging from `v`, then `x`. Vertices
//! of `N[P]` get the class equal to the thinness of the tree being laid out.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;
use thiserror::Error;

use crate::engine::{Critical, InfoTable};
use crate::tree::{root_at, Path, RootedTree, Tree, TreeError};

/// A vertex order plus a class per vertex (classes numbered from 1).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConsistentSolution {
    /// Vertices from smallest to largest.
    pub order: Vec<usize>,
    /// `classes[v]` is the class of vertex `v`.
    pub classes: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LayoutError {
    #[error("no solution given for the component containing vertex {0}")]
    MissingComponent(usize),
    #[error("component solutions do not cover the tree: {0}")]
    BadComponents(String),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error("table does not match the tree: {0}")]
    TableMismatch(String),
    #[error("cannot parse solution: {0}")]
    Parse(String),
    #[error("internal invariant failed: {0}")]
    Invariant(String),
}

impl ConsistentSolution {
    /// Number of distinct classes.
    pub fn class_count(&self) -> usize {
        let mut c = self.classes.clone();
        c.sort_unstable();
        c.dedup();
        c.len()
    }

    pub fn max_class(&self) -> usize {
        self.classes.iter().copied().max().unwrap_or(0)
    }

    /// Two lines: `order: ...` and `classes: ...`.
    pub fn to_text(&self) -> String {
        let mut s = String::from("order:");
        for v in &self.order {
            write!(s, " {v}").unwrap();
        }
        s.push_str("\nclasses:");
        for c in &self.classes {
            write!(s, " {c}").unwrap();
        }
        s.push('\n');
        s
    }

    pub fn parse_text(text: &str) -> Result<Self, LayoutError> {
        let mut order = None;
        let mut classes = None;
        for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let (key, rest) = line
                .split_once(':')
                .ok_or_else(|| LayoutError::Parse(format!("line {}: expected `order:` or `classes:`", i + 1)))?;
            let values: Result<Vec<usize>, _> = rest.split_whitespace().map(str::parse).collect();
            let values = values.map_err(|e| LayoutError::Parse(format!("line {}: {e}", i + 1)))?;
            let slot = match key.trim() {
                "order" => &mut order,
                "classes" => &mut classes,
                other => return Err(LayoutError::Parse(format!("line {}: unknown key {other:?}", i + 1))),
            };
            if slot.replace(values).is_some() {
                return Err(LayoutError::Parse(format!("line {}: duplicate {:?}", i + 1, key.trim())));
            }
        }
        match (order, classes) {
            (Some(order), Some(classes)) => Ok(ConsistentSolution { order, classes }),
            _ => Err(LayoutError::Parse("need both `order:` and `classes:` lines".into())),
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("solution serializes")
    }

    pub fn from_json_line(line: &str) -> Result<Self, LayoutError> {
        serde_json::from_str(line).map_err(|e| LayoutError::Parse(e.to_string()))
    }

    /// Reads either the text or the JSON form.
    pub fn parse_any(text: &str) -> Result<Self, LayoutError> {
        if text.trim_start().starts_with('{') {
            Self::from_json_line(text.trim())
        } else {
            Self::parse_text(text)
        }
    }
}

/// Solution of one component of `T - N[P]`, in local ids `0..vertices.len()`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentSolution {
    /// Local id to original id.
    pub vertices: Vec<usize>,
    pub solution: ConsistentSolution,
}

/// Lays out `t` around path `p` given solutions of the components of
/// `t - N[p]`. Uses one class more than the largest class among them.
pub fn solution_given_path(
    t: &Tree,
    p: &Path,
    sub_solutions: &[ComponentSolution],
) -> Result<ConsistentSolution, LayoutError> {
    let n = t.len();
    let path = Path::new(t, p.vertices().to_vec())?;
    let mut on_path = vec![false; n];
    let mut near = vec![false; n];
    for &x in path.vertices() {
        on_path[x] = true;
        near[x] = true;
        for y in t.neighbors(x) {
            near[y] = true;
        }
    }

    let mut comp_of = vec![usize::MAX; n];
    for (i, c) in sub_solutions.iter().enumerate() {
        if c.solution.order.len() != c.vertices.len() || c.solution.classes.len() != c.vertices.len() {
            return Err(LayoutError::BadComponents(format!("solution {i} has the wrong size")));
        }
        for &v in &c.vertices {
            if v >= n || near[v] || comp_of[v] != usize::MAX {
                return Err(LayoutError::BadComponents(format!("vertex {v} in solution {i}")));
            }
            comp_of[v] = i;
        }
    }
    let k = sub_solutions.iter().map(|c| c.solution.max_class()).max().unwrap_or(0);

    let mut order = Vec::with_capacity(n);
    let mut classes = vec![0; n];
    let mut used = vec![false; sub_solutions.len()];
    for &x in path.vertices() {
        for v in t.neighbors(x) {
            if on_path[v] {
                continue;
            }
            order.push(v);
            classes[v] = k + 1;
            for u in t.neighbors(v) {
                if u == x {
                    continue;
                }
                let i = comp_of[u];
                if i == usize::MAX {
                    return Err(LayoutError::MissingComponent(u));
                }
                if std::mem::replace(&mut used[i], true) {
                    return Err(LayoutError::BadComponents(format!("solution {i} reached twice")));
                }
                let c = &sub_solutions[i];
                for &local in &c.solution.order {
                    let orig = c.vertices[local];
                    order.push(orig);
                    classes[orig] = c.solution.classes[local];
                }
            }
        }
        order.push(x);
        classes[x] = k + 1;
    }
    if order.len() != n {
        return Err(LayoutError::BadComponents(format!(
            "laid out {} of {n} vertices; some component is not a component of T - N[P]",
            order.len()
        )));
    }
    Ok(ConsistentSolution { order, classes })
}

struct PathPlan {
    vertices: Vec<usize>,
    critical: Option<usize>,
    k: usize,
}

/// Path construction over the unplaced part of the tree (`stamp == 0`).
struct Planner<'a> {
    rooted: &'a RootedTree,
    table: &'a InfoTable,
    stamp: &'a [u32],
}

impl Planner<'_> {
    fn alive(&self, v: usize) -> bool {
        self.stamp[v] == 0
    }

    fn child_k_neighbors(&self, y: usize, k: usize) -> SmallVec<[usize; 3]> {
        let rt = self.rooted;
        rt.children(y)
            .iter()
            .copied()
            .filter(|&c| {
                self.alive(c) && rt.children(c).iter().any(|&g| self.alive(g) && self.table.get(g).thinness() == k)
            })
            .collect()
    }

    /// Follows the unique child k-neighbor down from `start`.
    fn arm(&self, start: usize, k: usize) -> Result<Vec<usize>, LayoutError> {
        let mut out = vec![start];
        let mut cur = start;
        loop {
            let next = self.child_k_neighbors(cur, k);
            match next.len() {
                0 => return Ok(out),
                1 => {
                    cur = next[0];
                    out.push(cur);
                }
                _ => {
                    return Err(LayoutError::Invariant(format!(
                        "vertex {cur} has several child {k}-neighbors but is not critical"
                    )))
                }
            }
        }
    }

    fn plan(&self, r: usize) -> Result<PathPlan, LayoutError> {
        let info = self.table.get(r);
        let k = info.thinness();
        match info.critical() {
            Critical::Nil => Ok(PathPlan { vertices: self.arm(r, k)?, critical: None, k }),
            Critical::Vertex(x) => {
                let arms = self.child_k_neighbors(x, k);
                if arms.len() != 2 {
                    return Err(LayoutError::Invariant(format!(
                        "critical vertex {x} has {} child {k}-neighbors",
                        arms.len()
                    )));
                }
                let mut vertices = self.arm(arms[0], k)?;
                vertices.reverse();
                vertices.push(x);
                vertices.extend(self.arm(arms[1], k)?);
                Ok(PathPlan { vertices, critical: Some(x), k })
            }
        }
    }
}

fn check_table(rooted: &RootedTree, table: &InfoTable) -> Result<(), LayoutError> {
    if table.len() != rooted.len() {
        return Err(LayoutError::TableMismatch(format!(
            "table has {} entries for {} vertices",
            table.len(),
            rooted.len()
        )));
    }
    if table.root() != rooted.root() {
        return Err(LayoutError::TableMismatch(format!(
            "table is rooted at {}, tree at {}",
            table.root(),
            rooted.root()
        )));
    }
    Ok(())
}

/// The path chosen for the whole tree: down from the root along child
/// k-neighbors, or through the root's critical vertex.
pub fn build_path(rooted: &RootedTree, table: &InfoTable) -> Result<Path, LayoutError> {
    check_table(rooted, table)?;
    let stamp = vec![0; rooted.len()];
    let plan = Planner { rooted, table, stamp: &stamp }.plan(rooted.root())?;
    Ok(Path::new(rooted.tree(), plan.vertices)?)
}

struct Builder<'a> {
    rooted: &'a RootedTree,
    table: InfoTable,
    stamp: Vec<u32>,
    on_path: Vec<bool>,
    next_stamp: u32,
    order: Vec<usize>,
    classes: Vec<usize>,
}

impl Builder<'_> {
    fn solve(&mut self, r: usize) -> Result<(), LayoutError> {
        let rt = self.rooted;
        let plan = Planner { rooted: rt, table: &self.table, stamp: &self.stamp }.plan(r)?;
        let k = plan.k;

        // The component above the critical vertex's parent is not a complete
        // rooted subtree; behead its ancestors' lists so they describe it.
        let mut upper = None;
        if let Some(x) = plan.critical.filter(|&x| x != r) {
            let p = rt.parent(x).expect("non-root vertex has a parent");
            if p != r {
                let h = rt.parent(p).expect("non-root vertex has a parent");
                upper = Some(h);
                let mut y = h;
                loop {
                    if self.table.get(y).len() < 2 {
                        return Err(LayoutError::Invariant(format!("list of {y} too short to behead")));
                    }
                    self.table.get_mut(y).behead();
                    if y == r {
                        break;
                    }
                    y = rt.parent(y).expect("ancestor chain reaches the component root");
                }
            }
        }

        self.next_stamp += 1;
        let s = self.next_stamp;
        for &x in &plan.vertices {
            self.stamp[x] = s;
            self.on_path[x] = true;
        }
        let tree = rt.tree();
        for &x in &plan.vertices {
            for y in tree.neighbors(x) {
                if self.stamp[y] == 0 {
                    self.stamp[y] = s;
                }
            }
        }

        for &x in &plan.vertices {
            for v in tree.neighbors(x) {
                if self.on_path[v] || self.stamp[v] != s {
                    continue;
                }
                self.order.push(v);
                self.classes[v] = k;
                for u in tree.neighbors(v) {
                    if u == x || self.stamp[u] != 0 {
                        continue;
                    }
                    let root = if upper == Some(u) { r } else { u };
                    debug_assert!(root == r || rt.parent(u) == Some(v));
                    self.solve(root)?;
                }
            }
            self.order.push(x);
            self.classes[x] = k;
        }
        Ok(())
    }
}

/// A consistent solution for `t` with exactly `thin(t)` classes.
///
/// `table` must come from [`compute_thinness`](crate::engine::compute_thinness)
/// with the same root; it is consumed because the construction edits it.
pub fn consistent_solution(t: &Tree, root: usize, table: InfoTable) -> Result<ConsistentSolution, LayoutError> {
    let rooted = root_at(t, root)?;
    consistent_solution_rooted(&rooted, table)
}

pub fn consistent_solution_rooted(rooted: &RootedTree, table: InfoTable) -> Result<ConsistentSolution, LayoutError> {
    check_table(rooted, &table)?;
    let n = rooted.len();
    let mut b = Builder {
        rooted,
        table,
        stamp: vec![0; n],
        on_path: vec![false; n],
        next_stamp: 0,
        order: Vec::with_capacity(n),
        classes: vec![0; n],
    };
    b.solve(rooted.root())?;
    if b.order.len() != n {
        return Err(LayoutError::Invariant(format!("placed {} of {n} vertices", b.order.len())));
    }
    Ok(ConsistentSolution { order: b.order, classes: b.classes })
}
