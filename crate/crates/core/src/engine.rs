//! Bottom-up thinness computation with critical vertex lists.
//!
//! Every complete rooted subtree gets a [`SubtreeInfo`]: its thinness list and
//! critical vertex list. A vertex's entry is derived from its children's and
//! grandchildren's entries by [`compute_lists`], which walks the decision tree
//! below and, in the one recursive branch, edits the caller's entries in place
//! and restores them afterwards.
//!
//! ```text
//! leaf?                                   -> (nil), (1)
//! k = max child thinness
//! >= 3 child k-neighbors?                 -> (nil), (k+1)
//! no thin-k child with a critical vertex? -> (r or nil), (k)
//! two or more thin-k children?            -> (nil), (k+1)
//! critical vertex x is that child v?      -> (v), (k)
//! thin(T_r minus rooted(parent(x))) >= k? -> (nil), (k+1)
//! otherwise                               -> x :: sub, k :: sub
//! ```

use std::fmt;

use smallvec::SmallVec;

use crate::tree::{RootedTree, Tree, TreeError};

/// Head of a critical vertex list: a vertex, or the `nil` marker.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Critical {
    Vertex(usize),
    Nil,
}

impl Critical {
    pub fn vertex(self) -> Option<usize> {
        match self {
            Critical::Vertex(v) => Some(v),
            Critical::Nil => None,
        }
    }

    pub fn is_nil(self) -> bool {
        self == Critical::Nil
    }
}

impl fmt::Display for Critical {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Critical::Vertex(v) => write!(f, "{v}"),
            Critical::Nil => f.write_str("nil"),
        }
    }
}

const NIL: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Slot {
    crit: u32,
    thin: u32,
}

impl Slot {
    fn new(crit: Critical, thin: usize) -> Self {
        let crit = match crit {
            Critical::Vertex(v) => u32::try_from(v).expect("vertex id exceeds u32"),
            Critical::Nil => NIL,
        };
        Slot { crit, thin: thin as u32 }
    }

    fn critical(self) -> Critical {
        if self.crit == NIL {
            Critical::Nil
        } else {
            Critical::Vertex(self.crit as usize)
        }
    }
}

/// Critical vertex list and thinness list of one rooted subtree.
///
/// Element `i` describes the subtree left after cutting away the parents of
/// the first `i` critical vertices. Stored tail-first so that prepending and
/// beheading are O(1).
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct SubtreeInfo {
    rev: SmallVec<[Slot; 2]>,
}

impl SubtreeInfo {
    pub fn single(crit: Critical, thin: usize) -> Self {
        let mut rev = SmallVec::new();
        rev.push(Slot::new(crit, thin));
        SubtreeInfo { rev }
    }

    pub fn leaf() -> Self {
        Self::single(Critical::Nil, 1)
    }

    /// Builds lists given head-first. Panics if the lengths differ.
    pub fn from_lists(crit_list: &[Critical], thin_list: &[usize]) -> Self {
        assert_eq!(crit_list.len(), thin_list.len(), "list lengths differ");
        let rev = crit_list.iter().zip(thin_list).rev().map(|(&c, &t)| Slot::new(c, t)).collect();
        SubtreeInfo { rev }
    }

    pub fn len(&self) -> usize {
        self.rev.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rev.is_empty()
    }

    /// Thinness of the whole subtree. Panics on an empty info.
    pub fn thinness(&self) -> usize {
        self.head().1
    }

    pub fn critical(&self) -> Critical {
        self.head().0
    }

    pub fn head(&self) -> (Critical, usize) {
        let s = self.rev.last().expect("empty SubtreeInfo");
        (s.critical(), s.thin as usize)
    }

    pub fn crit_list(&self) -> Vec<Critical> {
        self.rev.iter().rev().map(|s| s.critical()).collect()
    }

    pub fn thin_list(&self) -> Vec<usize> {
        self.rev.iter().rev().map(|s| s.thin as usize).collect()
    }

    /// Removes and returns the head pair.
    pub fn behead(&mut self) -> (Critical, usize) {
        let s = self.rev.pop().expect("behead on empty SubtreeInfo");
        (s.critical(), s.thin as usize)
    }

    /// Puts a pair back at the head (inverse of [`behead`](Self::behead)).
    pub fn prepend(&mut self, crit: Critical, thin: usize) {
        self.rev.push(Slot::new(crit, thin));
    }

    fn relabel(&mut self, map: &[u32]) {
        for s in self.rev.iter_mut().filter(|s| s.crit != NIL) {
            s.crit = map[s.crit as usize];
        }
    }

    /// Checks the list invariants: nonempty, strictly decreasing thinness,
    /// `nil` only in last position.
    pub fn is_well_formed(&self) -> bool {
        let thin = self.thin_list();
        let crit = self.crit_list();
        !thin.is_empty()
            && thin.windows(2).all(|w| w[0] > w[1])
            && *thin.last().unwrap() >= 1
            && crit[..crit.len() - 1].iter().all(|c| !c.is_nil())
    }
}

/// One child or grandchild record passed to [`compute_lists`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InfoEntry {
    pub info: SubtreeInfo,
    vertex: u32,
    removed: bool,
}

impl InfoEntry {
    pub fn new(vertex: usize, info: SubtreeInfo) -> Self {
        let vertex = u32::try_from(vertex).expect("vertex id exceeds u32");
        InfoEntry { info, vertex, removed: false }
    }

    pub fn vertex(&self) -> usize {
        self.vertex as usize
    }
}

/// A vertex of an ambient rooted tree, for parent/children lookups.
#[derive(Debug, Clone, Copy)]
pub struct SubtreeHandle<'a> {
    pub tree: &'a RootedTree,
    pub vertex: usize,
}

impl<'a> SubtreeHandle<'a> {
    pub fn new(tree: &'a RootedTree, vertex: usize) -> Self {
        SubtreeHandle { tree, vertex }
    }

    pub fn parent(&self) -> Option<usize> {
        self.tree.parent(self.vertex)
    }

    pub fn children(&self) -> &'a [usize] {
        self.tree.children(self.vertex)
    }
}

/// Per-vertex [`SubtreeInfo`] for every complete rooted subtree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InfoTable {
    root: usize,
    /// vertex id -> slot in `entries`
    slot: Vec<u32>,
    entries: Vec<InfoEntry>,
}

impl InfoTable {
    pub fn root(&self) -> usize {
        self.root
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, v: usize) -> &SubtreeInfo {
        &self.entries[self.slot[v] as usize].info
    }

    pub fn get_mut(&mut self, v: usize) -> &mut SubtreeInfo {
        &mut self.entries[self.slot[v] as usize].info
    }

    /// CSV with header `vertex,thin_list,crit_list`; lists are `;`-joined.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("vertex,thin_list,crit_list\n");
        for v in 0..self.len() {
            let info = self.get(v);
            let thin: Vec<String> = info.thin_list().iter().map(ToString::to_string).collect();
            let crit: Vec<String> = info.crit_list().iter().map(ToString::to_string).collect();
            out.push_str(&format!("{v},{},{}\n", thin.join(";"), crit.join(";")));
        }
        out
    }
}

/// Children of `r` (in `child_info` order) that are `k`-neighbors of `r`,
/// i.e. have a child whose subtree has thinness `k`.
pub fn child_k_neighbors(
    r: SubtreeHandle<'_>,
    k: usize,
    child_info: &[InfoEntry],
    gchild_info: &[InfoEntry],
) -> Vec<usize> {
    let mut hits: Vec<usize> = gchild_info
        .iter()
        .filter(|g| !g.removed && g.info.thinness() == k)
        .filter_map(|g| r.tree.parent(g.vertex()))
        .collect();
    hits.sort_unstable();
    hits.dedup();
    child_info.iter().filter(|c| !c.removed && hits.binary_search(&c.vertex()).is_ok()).map(|c| c.vertex()).collect()
}

/// Parent lookups for [`lists`].
trait Ambient {
    fn parent(&self, v: usize) -> Option<usize>;
}

impl Ambient for RootedTree {
    fn parent(&self, v: usize) -> Option<usize> {
        RootedTree::parent(self, v)
    }
}

/// The tree relabeled by BFS position, so that the children of every vertex,
/// and its grandchildren, occupy contiguous index ranges. Critical vertices
/// are recorded as positions and mapped back once the table is complete.
struct BfsLayout {
    vertex_at: Vec<u32>,
    parent: Vec<u32>,
    /// children of position `p` are `first_child[p]..first_child[p + 1]`
    first_child: Vec<u32>,
}

impl BfsLayout {
    fn new(t: &Tree, root: usize) -> Self {
        let n = t.len();
        let mut vertex_at = Vec::with_capacity(n);
        let mut parent = Vec::with_capacity(n);
        let mut first_child = Vec::with_capacity(n + 1);
        vertex_at.push(root as u32);
        parent.push(u32::MAX);
        // Adjacency lookups for a block of queued vertices are issued together
        // so that their cache misses overlap.
        const BLOCK: usize = 1024;
        let mut adj: Vec<&[u32]> = Vec::with_capacity(BLOCK);
        let mut p = 0;
        while p < n {
            let end = (p + BLOCK).min(vertex_at.len());
            adj.clear();
            adj.extend(vertex_at[p..end].iter().map(|&v| t.neighbors(v as usize).as_slice()));
            // touch each list once up front so the loads are in flight together
            let touched = adj.iter().fold(0u32, |acc, nbrs| acc ^ nbrs.first().copied().unwrap_or(0));
            std::hint::black_box(touched);
            for (i, nbrs) in adj.iter().enumerate() {
                let q = p + i;
                let up = match parent[q] {
                    u32::MAX => u32::MAX,
                    r => vertex_at[r as usize],
                };
                first_child.push(vertex_at.len() as u32);
                for &u in nbrs.iter() {
                    if u != up {
                        vertex_at.push(u);
                        parent.push(q as u32);
                    }
                }
            }
            p = end;
        }
        first_child.push(n as u32);
        BfsLayout { vertex_at, parent, first_child }
    }
}

impl Ambient for BfsLayout {
    fn parent(&self, v: usize) -> Option<usize> {
        match self.parent[v] {
            u32::MAX => None,
            p => Some(p as usize),
        }
    }
}

/// Number of distinct parents among active grandchild entries of thinness
/// `k`, saturating at 3.
fn count_k_neighbors(ambient: &impl Ambient, k: usize, gchild_info: &[InfoEntry]) -> usize {
    let mut seen = [usize::MAX; 3];
    let mut count = 0;
    for g in gchild_info.iter().filter(|g| !g.removed) {
        if g.info.thinness() != k {
            continue;
        }
        let p = ambient.parent(g.vertex()).expect("grandchild without parent");
        if !seen[..count].contains(&p) {
            seen[count] = p;
            count += 1;
            if count == 3 {
                break;
            }
        }
    }
    count
}

/// Lists for the subtree rooted at `r`, from its children's and
/// grandchildren's entries. Entries may be edited during the call but are
/// restored before it returns.
pub fn compute_lists(
    ambient: &RootedTree,
    r: usize,
    child_info: &mut [InfoEntry],
    gchild_info: &mut [InfoEntry],
) -> SubtreeInfo {
    let mut depth = 0;
    lists(ambient, r, child_info, gchild_info, 0, &mut depth)
}

/// [`compute_lists`] that also reports the deepest recursion reached.
pub fn compute_lists_traced(
    ambient: &RootedTree,
    r: usize,
    child_info: &mut [InfoEntry],
    gchild_info: &mut [InfoEntry],
) -> (SubtreeInfo, usize) {
    let mut depth = 0;
    let info = lists(ambient, r, child_info, gchild_info, 0, &mut depth);
    (info, depth)
}

fn lists(
    ambient: &impl Ambient,
    r: usize,
    ch: &mut [InfoEntry],
    gch: &mut [InfoEntry],
    depth: usize,
    max_depth: &mut usize,
) -> SubtreeInfo {
    *max_depth = (*max_depth).max(depth);

    let Some(k) = ch.iter().filter(|c| !c.removed).map(|c| c.info.thinness()).max() else {
        return SubtreeInfo::leaf();
    };

    let neighbors = count_k_neighbors(ambient, k, gch);
    if neighbors >= 3 {
        return SubtreeInfo::single(Critical::Nil, k + 1);
    }

    let mut thin_k = ch.iter().enumerate().filter(|(_, c)| !c.removed && c.info.thinness() == k);
    let with_crit = thin_k.clone().find(|(_, c)| !c.info.critical().is_nil()).map(|(i, _)| i);
    let Some(vi) = with_crit else {
        let crit = if neighbors == 2 { Critical::Vertex(r) } else { Critical::Nil };
        return SubtreeInfo::single(crit, k);
    };
    if thin_k.nth(1).is_some() {
        return SubtreeInfo::single(Critical::Nil, k + 1);
    }

    let v = ch[vi].vertex();
    let x = ch[vi].info.critical().vertex().unwrap();
    if x == v {
        return SubtreeInfo::single(Critical::Vertex(x), k);
    }
    let w = ambient.parent(x).expect("critical vertex below r has a parent");

    // Cut rooted(w) out of the child and grandchild entries.
    let mut removed: SmallVec<[usize; 8]> = SmallVec::new();
    let mut beheaded_g = None;
    let mut beheaded_v = None;
    if w == v {
        ch[vi].removed = true;
        for (i, g) in gch.iter_mut().enumerate() {
            if !g.removed && ambient.parent(g.vertex()) == Some(v) {
                g.removed = true;
                removed.push(i);
            }
        }
    } else {
        beheaded_v = Some(ch[vi].info.behead());
        let gi = gch
            .iter()
            .position(|g| {
                !g.removed
                    && ambient.parent(g.vertex()) == Some(v)
                    && g.info.thinness() == k
                    && !g.info.critical().is_nil()
            })
            .expect("thin-k child of v holding the critical vertex");
        if w == gch[gi].vertex() {
            gch[gi].removed = true;
            removed.push(gi);
        } else {
            beheaded_g = Some((gi, gch[gi].info.behead()));
        }
    }

    let mut sub = lists(ambient, r, ch, gch, depth + 1, max_depth);

    if let Some((c, t)) = beheaded_v {
        ch[vi].info.prepend(c, t);
    } else {
        ch[vi].removed = false;
    }
    if let Some((gi, (c, t))) = beheaded_g {
        gch[gi].info.prepend(c, t);
    }
    for i in removed {
        gch[i].removed = false;
    }

    if sub.thinness() >= k {
        SubtreeInfo::single(Critical::Nil, k + 1)
    } else {
        sub.prepend(Critical::Vertex(x), k);
        sub
    }
}

/// Result of the bottom-up driver.
#[derive(Debug, Clone)]
pub struct EngineRun {
    pub thinness: usize,
    pub table: InfoTable,
    /// Deepest recursion of the critical-vertex branch over all vertices.
    pub max_recursion_depth: usize,
}

/// Runs the list computation on every vertex bottom-up.
///
/// Works on a BFS relabeling where each vertex's child and grandchild entries
/// are two adjacent slices of one array, so no entry is ever copied.
pub fn compute_table(t: &Tree, root: usize) -> Result<EngineRun, TreeError> {
    let n = t.len();
    if root >= n {
        return Err(TreeError::VertexOutOfRange { vertex: root, n });
    }
    let layout = BfsLayout::new(t, root);
    let mut entries: Vec<InfoEntry> = (0..n).map(|p| InfoEntry::new(p, SubtreeInfo::default())).collect();
    let mut max_depth = 0;
    for p in (0..n).rev() {
        let c0 = layout.first_child[p] as usize;
        let c1 = layout.first_child[p + 1] as usize;
        let g0 = layout.first_child[c0] as usize;
        let g1 = if c1 > c0 { layout.first_child[c1] as usize } else { g0 };
        let (head, gch) = entries.split_at_mut(g0);
        let mut depth = 0;
        let info = lists(&layout, p, &mut head[c0..c1], &mut gch[..g1 - g0], 0, &mut depth);
        max_depth = max_depth.max(depth);
        entries[p].info = info;
    }
    let mut slot = vec![0u32; n];
    for (p, e) in entries.iter_mut().enumerate() {
        e.info.relabel(&layout.vertex_at);
        slot[layout.vertex_at[p] as usize] = p as u32;
    }
    let thinness = entries[0].info.thinness();
    Ok(EngineRun { thinness, table: InfoTable { root, slot, entries }, max_recursion_depth: max_depth })
}

/// Thinness of `t` and the table of all complete rooted subtrees under `root`.
pub fn compute_thinness(t: &Tree, root: usize) -> Result<(usize, InfoTable), TreeError> {
    let run = compute_table(t, root)?;
    Ok((run.thinness, run.table))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{gen_complete_mary, gen_path, gen_random_tree, gen_smallest_tree, gen_spider, root_at};

    fn entries(rooted: &RootedTree, table: &InfoTable, vs: &[usize]) -> Vec<InfoEntry> {
        let _ = rooted;
        vs.iter().map(|&v| InfoEntry::new(v, table.get(v).clone())).collect()
    }

    fn grandchildren(rooted: &RootedTree, r: usize) -> Vec<usize> {
        rooted.children(r).iter().flat_map(|&c| rooted.children(c).iter().copied()).collect()
    }

    #[test]
    fn leaf_case() {
        let t = Tree::single();
        let rooted = root_at(&t, 0).unwrap();
        let info = compute_lists(&rooted, 0, &mut [], &mut []);
        assert_eq!(info.crit_list(), vec![Critical::Nil]);
        assert_eq!(info.thin_list(), vec![1]);
    }

    #[test]
    fn smallest_two_center_is_saturated() {
        let t = gen_smallest_tree(2).unwrap();
        let rooted = root_at(&t, 0).unwrap();
        let table = compute_table(&t, 0).unwrap().table;
        let mut ch = entries(&rooted, &table, rooted.children(0));
        let mut gch = entries(&rooted, &table, &grandchildren(&rooted, 0));
        let info = compute_lists(&rooted, 0, &mut ch, &mut gch);
        assert_eq!((info.crit_list(), info.thin_list()), (vec![Critical::Nil], vec![2]));

        let handle = SubtreeHandle::new(&rooted, 0);
        assert_eq!(child_k_neighbors(handle, 1, &ch, &gch), rooted.children(0).to_vec());
    }

    #[test]
    fn two_leg_spider_root_is_critical() {
        let t = gen_spider(&[2, 2]).unwrap();
        let rooted = root_at(&t, 0).unwrap();
        let table = compute_table(&t, 0).unwrap().table;
        let mut ch = entries(&rooted, &table, rooted.children(0));
        let mut gch = entries(&rooted, &table, &grandchildren(&rooted, 0));
        let info = compute_lists(&rooted, 0, &mut ch, &mut gch);
        assert_eq!((info.crit_list(), info.thin_list()), (vec![Critical::Vertex(0)], vec![1]));
        let handle = SubtreeHandle::new(&rooted, 0);
        assert_eq!(child_k_neighbors(handle, 1, &ch, &gch), vec![1, 3]);
    }

    #[test]
    fn child_k_neighbors_of_leaf() {
        let t = gen_path(2).unwrap();
        let rooted = root_at(&t, 0).unwrap();
        for k in 1..4 {
            assert!(child_k_neighbors(SubtreeHandle::new(&rooted, 1), k, &[], &[]).is_empty());
        }
    }

    #[test]
    fn critical_vertex_at_or_below_the_child() {
        // spider (2,2,1) rooted at the tip of the short leg: the center is
        // critical and is the child of the root.
        let t = gen_spider(&[2, 2, 1]).unwrap();
        let tip = 5;
        let (k, table) = compute_thinness(&t, tip).unwrap();
        assert_eq!(k, 1);
        assert_eq!(table.get(tip).crit_list(), vec![Critical::Vertex(0)]);

        // Third leg of length 2: x's parent is a 1-neighbor, so thinness goes up.
        let t = gen_spider(&[2, 2, 2]).unwrap();
        let (k, table) = compute_thinness(&t, 6).unwrap();
        assert_eq!(k, 2);
        assert_eq!(table.get(6).crit_list(), vec![Critical::Nil]);

        // A longer third leg keeps the saturated center.
        let t = gen_spider(&[2, 2, 3]).unwrap();
        let (_, table) = compute_thinness(&t, 7).unwrap();
        assert_eq!(table.get(7).thin_list()[0], 2);
        let t = gen_spider(&[1, 1, 3]).unwrap();
        let (k, table) = compute_thinness(&t, 5).unwrap();
        assert_eq!(k, 1);
        assert_eq!(table.get(5).crit_list(), vec![Critical::Nil]);
    }

    #[test]
    fn critical_chain_lists() {
        // x = 0 with children a = 1, b = 2; each hangs a copy of smallest(2)
        // by its center. Above x: w = 3, root r = 4.
        let copy = gen_smallest_tree(2).unwrap().edges();
        let mut edges = vec![(0, 1), (0, 2), (0, 3), (3, 4)];
        for (base, arm) in [(5, 1), (12, 2)] {
            edges.push((arm, base));
            edges.extend(copy.iter().map(|&(u, v)| (u + base, v + base)));
        }
        let t = Tree::from_edges(19, &edges).unwrap();
        let (k, table) = compute_thinness(&t, 4).unwrap();
        assert_eq!(k, 2);
        assert_eq!(table.get(4).crit_list(), vec![Critical::Vertex(0), Critical::Nil]);
        assert_eq!(table.get(4).thin_list(), vec![2, 1]);
        assert_eq!(table.get(3).crit_list(), vec![Critical::Vertex(0)]);

        // One more vertex above the root makes the cut-off part a path of two.
        let mut longer = edges.clone();
        longer.push((4, 19));
        let t = Tree::from_edges(20, &longer).unwrap();
        let (_, table) = compute_thinness(&t, 19).unwrap();
        assert_eq!(table.get(19).thin_list(), vec![2, 1]);
        assert_eq!(table.get(19).crit_list(), vec![Critical::Vertex(0), Critical::Nil]);
    }

    #[test]
    fn engine_examples() {
        let (k, _) = compute_thinness(&gen_path(1000).unwrap(), 0).unwrap();
        assert_eq!(k, 1);
        let (k, _) = compute_thinness(&gen_path(1000).unwrap(), 500).unwrap();
        assert_eq!(k, 1);
        let (k, _) = compute_thinness(&gen_complete_mary(2, 8).unwrap(), 0).unwrap();
        assert_eq!(k, 3);
        let (k, _) = compute_thinness(&gen_complete_mary(3, 5).unwrap(), 0).unwrap();
        assert_eq!(k, 3);
    }

    #[test]
    fn compute_lists_restores_entries() {
        for seed in 0..50 {
            let t = gen_random_tree(80, seed).unwrap();
            let rooted = root_at(&t, 0).unwrap();
            let table = compute_table(&t, 0).unwrap().table;
            for r in 0..t.len() {
                let ch0 = entries(&rooted, &table, rooted.children(r));
                let gch0 = entries(&rooted, &table, &grandchildren(&rooted, r));
                let (mut ch, mut gch) = (ch0.clone(), gch0.clone());
                let info = compute_lists(&rooted, r, &mut ch, &mut gch);
                assert_eq!(ch, ch0);
                assert_eq!(gch, gch0);
                assert_eq!(&info, table.get(r));
            }
        }
    }

    #[test]
    fn table_csv() {
        let (_, table) = compute_thinness(&gen_path(3).unwrap(), 1).unwrap();
        assert_eq!(table.to_csv(), "vertex,thin_list,crit_list\n0,1,nil\n1,1,nil\n2,1,nil\n");
    }
}
