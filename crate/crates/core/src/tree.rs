//! Trees over dense vertex ids, rooted views, dangling trees and generators.

use std::collections::VecDeque;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Hard ceiling on the number of vertices any generator will build.
pub const MAX_GENERATED_VERTICES: usize = 1 << 26;

/// Largest number of vertices a [`Tree`] can hold.
pub const MAX_VERTICES: usize = u32::MAX as usize;

/// Largest `n` accepted by [`enumerate_labeled_trees`] unless a cap is given.
pub const DEFAULT_ENUMERATION_CAP: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("vertex {vertex} out of range for a tree on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("({0}, {1}) is not an edge")]
    NotAnEdge(usize, usize),
    #[error("requested tree has {requested} vertices, limit is {limit}")]
    SizeLimit { requested: u128, limit: usize },
    #[error("labeled tree enumeration is capped at n = {cap}, got n = {n}")]
    EnumerationCap { n: usize, cap: usize },
    #[error("{0}")]
    Invalid(String),
}

/// Reason an edge list fails to describe a tree, with the offending edge index.
#[derive(Debug, Clone, PartialEq, Eq)]
enum EdgeFault {
    OutOfRange(usize),
    SelfLoop,
    Duplicate,
    Cycle,
}

impl EdgeFault {
    fn describe(&self, u: usize, v: usize, n: usize) -> String {
        match self {
            EdgeFault::OutOfRange(x) => format!("vertex {x} out of range 0..{n}"),
            EdgeFault::SelfLoop => format!("self-loop on vertex {u}"),
            EdgeFault::Duplicate => format!("duplicate edge ({u}, {v})"),
            EdgeFault::Cycle => format!("edge ({u}, {v}) closes a cycle"),
        }
    }
}

/// Undirected tree on vertices `0..n`, stored as compressed adjacency.
///
/// Neighbor order is the order in which edges were supplied; every traversal
/// in the crate follows it, which makes all outputs deterministic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tree {
    offsets: Vec<u32>,
    targets: Vec<u32>,
}

/// Neighbors of one vertex, in adjacency order.
#[derive(Debug, Clone)]
pub struct Neighbors<'a>(std::slice::Iter<'a, u32>);

impl<'a> Neighbors<'a> {
    /// The remaining neighbors as raw ids.
    pub fn as_slice(&self) -> &'a [u32] {
        self.0.as_slice()
    }
}

impl Iterator for Neighbors<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        self.0.next().map(|&v| v as usize)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        self.0.size_hint()
    }
}

impl DoubleEndedIterator for Neighbors<'_> {
    fn next_back(&mut self) -> Option<usize> {
        self.0.next_back().map(|&v| v as usize)
    }
}

impl ExactSizeIterator for Neighbors<'_> {}

impl Tree {
    /// The tree with a single vertex.
    pub fn single() -> Self {
        Tree { offsets: vec![0, 0], targets: Vec::new() }
    }

    /// Builds a tree from an edge list, rejecting anything that is not a tree.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, TreeError> {
        if n == 0 {
            return Err(TreeError::Invalid("a tree needs at least one vertex".into()));
        }
        if n > MAX_VERTICES {
            return Err(TreeError::SizeLimit { requested: n as u128, limit: MAX_VERTICES });
        }
        let mut dsu = Dsu::new(n);
        let mut seen = std::collections::HashSet::with_capacity(edges.len());
        for (i, &(u, v)) in edges.iter().enumerate() {
            if let Err(fault) = check_edge(&mut dsu, &mut seen, n, u, v) {
                return Err(TreeError::Invalid(format!("edge #{i}: {}", fault.describe(u, v, n))));
            }
        }
        if edges.len() != n - 1 {
            return Err(TreeError::Invalid(format!("expected {} edges for {n} vertices, got {}", n - 1, edges.len())));
        }
        Ok(Self::from_valid_edges(n, edges))
    }

    fn from_valid_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut degree = vec![0usize; n];
        for &(u, v) in edges {
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut offsets: Vec<u32> = Vec::with_capacity(n + 1);
        offsets.push(0);
        for &d in &degree {
            offsets.push(offsets.last().unwrap() + d as u32);
        }
        let mut fill: Vec<usize> = offsets[..n].iter().map(|&o| o as usize).collect();
        let mut targets = vec![0u32; 2 * edges.len()];
        for &(u, v) in edges {
            targets[fill[u]] = v as u32;
            fill[u] += 1;
            targets[fill[v]] = u as u32;
            fill[v] += 1;
        }
        Tree { offsets, targets }
    }

    pub fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Always false: a tree has at least one vertex.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn neighbors(&self, v: usize) -> Neighbors<'_> {
        Neighbors(self.targets[self.offsets[v] as usize..self.offsets[v + 1] as usize].iter())
    }

    pub fn degree(&self, v: usize) -> usize {
        (self.offsets[v + 1] - self.offsets[v]) as usize
    }

    pub fn max_degree(&self) -> usize {
        (0..self.len()).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.len() && v < self.len() && {
            // scan the shorter list
            let (a, b) = if self.degree(u) <= self.degree(v) { (u, v) } else { (v, u) };
            self.neighbors(a).as_slice().contains(&(b as u32))
        }
    }

    /// Edges `(u, v)` with `u < v`, each listed once, ordered by `u` then adjacency order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for u in 0..self.len() {
            for v in self.neighbors(u) {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn is_leaf(&self, v: usize) -> bool {
        self.degree(v) == 1
    }

    pub fn to_edge_list(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{}", self.len()).unwrap();
        for (u, v) in self.edges() {
            writeln!(s, "{u} {v}").unwrap();
        }
        s
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph tree {\n");
        for v in 0..self.len() {
            writeln!(s, "  {v} [label=\"{v}\"];").unwrap();
        }
        for (u, v) in self.edges() {
            writeln!(s, "  {u} -- {v};").unwrap();
        }
        s.push_str("}\n");
        s
    }

    /// Vertices of the component of `self - S` containing `start`, where `S`
    /// is given by `blocked`, in BFS order.
    pub(crate) fn component_from(&self, start: usize, blocked: impl Fn(usize) -> bool) -> Vec<usize> {
        let mut seen = vec![false; self.len()];
        let mut out = vec![start];
        seen[start] = true;
        let mut head = 0;
        while head < out.len() {
            let x = out[head];
            head += 1;
            for y in self.neighbors(x) {
                if !seen[y] && !blocked(y) {
                    seen[y] = true;
                    out.push(y);
                }
            }
        }
        out
    }

    /// Subtree induced by `vertices` (which must induce a connected subgraph),
    /// relabeled to `0..len` in the given order. Returns the tree and the map
    /// from new ids to old ids.
    pub fn induced(&self, vertices: &[usize]) -> Result<(Tree, Vec<usize>), TreeError> {
        let mut local = vec![usize::MAX; self.len()];
        for (i, &v) in vertices.iter().enumerate() {
            if v >= self.len() {
                return Err(TreeError::VertexOutOfRange { vertex: v, n: self.len() });
            }
            if local[v] != usize::MAX {
                return Err(TreeError::Invalid(format!("vertex {v} listed twice")));
            }
            local[v] = i;
        }
        let mut edges = Vec::with_capacity(vertices.len().saturating_sub(1));
        for &v in vertices {
            for w in self.neighbors(v) {
                if local[w] != usize::MAX && local[v] < local[w] {
                    edges.push((local[v], local[w]));
                }
            }
        }
        // stable by the source's adjacency order of the lower-ranked endpoint
        let t = Tree::from_edges(vertices.len(), &edges)
            .map_err(|_| TreeError::Invalid("vertex set does not induce a subtree".into()))?;
        Ok((t, vertices.to_vec()))
    }
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }
}

fn check_edge(
    dsu: &mut Dsu,
    seen: &mut std::collections::HashSet<(usize, usize)>,
    n: usize,
    u: usize,
    v: usize,
) -> Result<(), EdgeFault> {
    if u >= n {
        return Err(EdgeFault::OutOfRange(u));
    }
    if v >= n {
        return Err(EdgeFault::OutOfRange(v));
    }
    if u == v {
        return Err(EdgeFault::SelfLoop);
    }
    if !seen.insert((u.min(v), u.max(v))) {
        return Err(EdgeFault::Duplicate);
    }
    let (a, b) = (dsu.find(u), dsu.find(v));
    if a == b {
        return Err(EdgeFault::Cycle);
    }
    dsu.parent[a] = b;
    Ok(())
}

/// Parses the edge-list format: first line `n`, then `n - 1` lines `u v`.
///
/// Blank lines are ignored. Errors name the first offending (1-based) line.
pub fn parse_edge_list(text: &str) -> Result<Tree, TreeError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());

    let (first_line, header) =
        lines.next().ok_or(TreeError::Parse { line: 1, reason: "empty input, expected vertex count".into() })?;
    let n: usize = header.parse().map_err(|_| TreeError::Parse {
        line: first_line,
        reason: format!("expected vertex count, found {header:?}"),
    })?;
    if n == 0 {
        return Err(TreeError::Parse { line: first_line, reason: "vertex count must be at least 1".into() });
    }

    let mut dsu = Dsu::new(n);
    let mut seen = std::collections::HashSet::new();
    let mut edges = Vec::with_capacity(n - 1);
    let mut last_line = first_line;
    for (line, content) in lines {
        last_line = line;
        if edges.len() == n - 1 {
            return Err(TreeError::Parse {
                line,
                reason: format!("too many edges, a tree on {n} vertices has {}", n - 1),
            });
        }
        let mut it = content.split_whitespace();
        let parse_id = |tok: Option<&str>| -> Result<usize, TreeError> {
            let tok = tok.ok_or(TreeError::Parse { line, reason: "expected two vertex ids".into() })?;
            tok.parse().map_err(|_| TreeError::Parse { line, reason: format!("invalid vertex id {tok:?}") })
        };
        let u = parse_id(it.next())?;
        let v = parse_id(it.next())?;
        if it.next().is_some() {
            return Err(TreeError::Parse { line, reason: "expected exactly two vertex ids".into() });
        }
        check_edge(&mut dsu, &mut seen, n, u, v).map_err(|f| TreeError::Parse { line, reason: f.describe(u, v, n) })?;
        edges.push((u, v));
    }
    if edges.len() != n - 1 {
        return Err(TreeError::Parse {
            line: last_line + 1,
            reason: format!("expected {} edges, found {} (graph is disconnected)", n - 1, edges.len()),
        });
    }
    Ok(Tree::from_valid_edges(n, &edges))
}

/// A tree with a distinguished root and parent/children arrays.
#[derive(Debug, Clone)]
pub struct RootedTree {
    tree: Tree,
    root: usize,
    parent: Vec<Option<usize>>,
    child_offsets: Vec<usize>,
    children: Vec<usize>,
    bfs: Vec<usize>,
    depth: Vec<usize>,
}

impl RootedTree {
    pub fn tree(&self) -> &Tree {
        &self.tree
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn len(&self) -> usize {
        self.tree.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    /// Children in adjacency order.
    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[self.child_offsets[v]..self.child_offsets[v + 1]]
    }

    pub fn depth(&self, v: usize) -> usize {
        self.depth[v]
    }

    /// Vertices in BFS order from the root; reversing it gives a bottom-up order.
    pub fn bfs_order(&self) -> &[usize] {
        &self.bfs
    }

    pub fn height(&self) -> usize {
        self.depth.iter().copied().max().unwrap_or(0)
    }

    /// Vertices of the complete rooted subtree at `v`, in BFS order.
    pub fn subtree_vertices(&self, v: usize) -> Vec<usize> {
        let mut out = vec![v];
        let mut head = 0;
        while head < out.len() {
            let x = out[head];
            head += 1;
            out.extend_from_slice(self.children(x));
        }
        out
    }
}

pub fn root_at(t: &Tree, r: usize) -> Result<RootedTree, TreeError> {
    let n = t.len();
    if r >= n {
        return Err(TreeError::VertexOutOfRange { vertex: r, n });
    }
    let mut parent = vec![None; n];
    let mut depth = vec![0usize; n];
    let mut visited = vec![false; n];
    let mut bfs = Vec::with_capacity(n);
    bfs.push(r);
    visited[r] = true;
    let mut head = 0;
    while head < bfs.len() {
        let x = bfs[head];
        head += 1;
        for y in t.neighbors(x) {
            if !visited[y] {
                visited[y] = true;
                parent[y] = Some(x);
                depth[y] = depth[x] + 1;
                bfs.push(y);
            }
        }
    }
    let mut child_offsets = Vec::with_capacity(n + 1);
    let mut children = Vec::with_capacity(n.saturating_sub(1));
    child_offsets.push(0);
    for v in 0..n {
        children.extend(t.neighbors(v).filter(|&y| parent[v] != Some(y)));
        child_offsets.push(children.len());
    }
    Ok(RootedTree { tree: t.clone(), root: r, parent, child_offsets, children, bfs, depth })
}

/// A simple path given by its vertex sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path(Vec<usize>);

impl Path {
    /// Validates that `vertices` is a simple nonempty path in `t`.
    pub fn new(t: &Tree, vertices: Vec<usize>) -> Result<Self, TreeError> {
        if vertices.is_empty() {
            return Err(TreeError::Invalid("a path has at least one vertex".into()));
        }
        let mut seen = vec![false; t.len()];
        for &v in &vertices {
            if v >= t.len() {
                return Err(TreeError::VertexOutOfRange { vertex: v, n: t.len() });
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(TreeError::Invalid(format!("vertex {v} repeats on the path")));
            }
        }
        for w in vertices.windows(2) {
            if !t.has_edge(w[0], w[1]) {
                return Err(TreeError::NotAnEdge(w[0], w[1]));
            }
        }
        Ok(Path(vertices))
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// The dangling tree from `v` in `u`: the component of `t - (v, u)` containing `u`.
///
/// Returns a relabeled copy (BFS order from `u`, so `u` becomes 0) and the map
/// from new ids to original ids.
pub fn dangling(t: &Tree, v: usize, u: usize) -> Result<(Tree, Vec<usize>), TreeError> {
    if !t.has_edge(v, u) {
        return Err(TreeError::NotAnEdge(v, u));
    }
    let vertices = t.component_from(u, |x| x == v);
    t.induced(&vertices)
}

fn check_size(requested: u128) -> Result<usize, TreeError> {
    if requested > MAX_GENERATED_VERTICES as u128 {
        Err(TreeError::SizeLimit { requested, limit: MAX_GENERATED_VERTICES })
    } else {
        Ok(requested as usize)
    }
}

/// Complete `m`-ary tree of height `h`, root 0, ids in level order.
pub fn gen_complete_mary(m: usize, h: usize) -> Result<Tree, TreeError> {
    if m < 2 {
        return Err(TreeError::Invalid(format!("branching factor must be at least 2, got {m}")));
    }
    let mut total: u128 = 0;
    let mut level: u128 = 1;
    for _ in 0..=h {
        total = total.saturating_add(level);
        level = level.saturating_mul(m as u128);
        if total > MAX_GENERATED_VERTICES as u128 {
            break;
        }
    }
    let n = check_size(total)?;
    let edges: Vec<_> = (1..n).map(|c| ((c - 1) / m, c)).collect();
    Ok(Tree::from_valid_edges(n, &edges))
}

/// The smallest tree of thinness `k`: a center with three arms, each arm a
/// vertex adjacent to the root of a copy of the smallest tree of thinness `k - 1`.
pub fn gen_smallest_tree(k: usize) -> Result<Tree, TreeError> {
    if k == 0 {
        return Err(TreeError::Invalid("thinness target must be at least 1".into()));
    }
    let requested = 3u128.checked_pow(k as u32).map_or(u128::MAX, |p| p - 2);
    let n = check_size(requested)?;
    let mut edges = Vec::with_capacity(n - 1);
    let mut next = 1;
    build_smallest(k, 0, &mut next, &mut edges);
    debug_assert_eq!(next, n);
    Ok(Tree::from_valid_edges(n, &edges))
}

fn build_smallest(k: usize, center: usize, next: &mut usize, edges: &mut Vec<(usize, usize)>) {
    if k == 1 {
        return;
    }
    for _ in 0..3 {
        let arm = *next;
        let sub_root = arm + 1;
        *next += 2;
        edges.push((center, arm));
        edges.push((arm, sub_root));
        build_smallest(k - 1, sub_root, next, edges);
    }
}

pub fn gen_path(n: usize) -> Result<Tree, TreeError> {
    let n = check_size(n as u128)?;
    if n == 0 {
        return Err(TreeError::Invalid("a tree needs at least one vertex".into()));
    }
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    Ok(Tree::from_valid_edges(n, &edges))
}

/// Star with center 0 and `leaves` leaves.
pub fn gen_star(leaves: usize) -> Result<Tree, TreeError> {
    let n = check_size(leaves as u128 + 1)?;
    let edges: Vec<_> = (1..n).map(|i| (0, i)).collect();
    Ok(Tree::from_valid_edges(n, &edges))
}

/// Spider: center 0 with one leg (a path) per entry of `legs`.
pub fn gen_spider(legs: &[usize]) -> Result<Tree, TreeError> {
    let n = check_size(1 + legs.iter().map(|&l| l as u128).sum::<u128>())?;
    let mut edges = Vec::with_capacity(n - 1);
    let mut next = 1;
    for &len in legs {
        let mut prev = 0;
        for _ in 0..len {
            edges.push((prev, next));
            prev = next;
            next += 1;
        }
    }
    Ok(Tree::from_valid_edges(n, &edges))
}

/// Decodes a Prüfer sequence over `0..n` (`n = seq.len() + 2`) in linear time.
pub fn decode_prufer(seq: &[usize]) -> Result<Tree, TreeError> {
    let n = seq.len() + 2;
    if let Some(&bad) = seq.iter().find(|&&x| x >= n) {
        return Err(TreeError::VertexOutOfRange { vertex: bad, n });
    }
    Ok(Tree::from_valid_edges(n, &prufer_edges(seq)))
}

fn prufer_edges(seq: &[usize]) -> Vec<(usize, usize)> {
    let n = seq.len() + 2;
    let mut degree = vec![1usize; n];
    for &x in seq {
        degree[x] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    let mut ptr = 0;
    while degree[ptr] != 1 {
        ptr += 1;
    }
    let mut leaf = ptr;
    for &x in seq {
        edges.push((leaf, x));
        degree[x] -= 1;
        if degree[x] == 1 && x < ptr {
            leaf = x;
        } else {
            ptr += 1;
            while degree[ptr] != 1 {
                ptr += 1;
            }
            leaf = ptr;
        }
    }
    edges.push((leaf, n - 1));
    edges
}

/// Uniformly random labeled tree on `n` vertices, deterministic per seed.
pub fn gen_random_tree(n: usize, seed: u64) -> Result<Tree, TreeError> {
    let n = check_size(n as u128)?;
    match n {
        0 => Err(TreeError::Invalid("a tree needs at least one vertex".into())),
        1 => Ok(Tree::single()),
        2 => Ok(Tree::from_valid_edges(2, &[(0, 1)])),
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let seq: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
            decode_prufer(&seq)
        }
    }
}

/// Iterator over all `n^(n-2)` labeled trees on `n` vertices.
pub struct LabeledTrees {
    n: usize,
    seq: Vec<usize>,
    done: bool,
}

impl Iterator for LabeledTrees {
    type Item = Tree;

    fn next(&mut self) -> Option<Tree> {
        if self.done {
            return None;
        }
        let tree = match self.n {
            1 => Tree::single(),
            2 => Tree::from_valid_edges(2, &[(0, 1)]),
            n => Tree::from_valid_edges(n, &prufer_edges(&self.seq)),
        };
        // advance the odometer
        self.done = true;
        for digit in self.seq.iter_mut().rev() {
            *digit += 1;
            if *digit < self.n {
                self.done = false;
                break;
            }
            *digit = 0;
        }
        Some(tree)
    }
}

pub fn enumerate_labeled_trees(n: usize) -> Result<LabeledTrees, TreeError> {
    enumerate_labeled_trees_capped(n, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_labeled_trees_capped(n: usize, cap: usize) -> Result<LabeledTrees, TreeError> {
    if n == 0 {
        return Err(TreeError::Invalid("a tree needs at least one vertex".into()));
    }
    if n > cap {
        return Err(TreeError::EnumerationCap { n, cap });
    }
    Ok(LabeledTrees { n, seq: vec![0; n.saturating_sub(2)], done: false })
}

fn bfs_farthest(t: &Tree, start: usize) -> (usize, usize) {
    let mut dist = vec![usize::MAX; t.len()];
    let mut queue = VecDeque::from([start]);
    dist[start] = 0;
    let mut far = (start, 0);
    while let Some(x) = queue.pop_front() {
        if dist[x] > far.1 {
            far = (x, dist[x]);
        }
        for y in t.neighbors(x) {
            if dist[y] == usize::MAX {
                dist[y] = dist[x] + 1;
                queue.push_back(y);
            }
        }
    }
    far
}

/// Number of edges on a longest path.
pub fn diameter(t: &Tree) -> usize {
    let (a, _) = bfs_farthest(t, 0);
    bfs_farthest(t, a).1
}
