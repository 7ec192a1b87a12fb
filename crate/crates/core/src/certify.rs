//! Independent checks: consistency of a solution, the auxiliary graph of an
//! order, per-order optimal partitions, and two brute-force thinness oracles.

use std::collections::HashMap;
use std::fmt;

use smallvec::SmallVec;
use thiserror::Error;

use crate::layout::ConsistentSolution;
use crate::tree::Tree;

/// Size limits for the expensive oracles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Largest `n` for [`thinness_by_order_enumeration`].
    pub enumeration: usize,
    /// Largest `n` for [`thinness_by_characterization`] and [`k_neighborhood`].
    pub characterization: usize,
    /// Largest `n` for [`build_aux_graph`] and [`min_classes_for_order`].
    pub order: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { enumeration: 9, characterization: 300, order: 2000 }
    }
}

impl Caps {
    /// Parses overrides such as `enum=10,char=300,order=4000` on top of the defaults.
    pub fn parse(spec: &str) -> Result<Caps, CertifyError> {
        let mut caps = Caps::default();
        for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| CertifyError::Malformed(format!("cap {part:?} is not key=value")))?;
            let value: usize = value
                .trim()
                .parse()
                .ok()
                .filter(|&v| v >= 1)
                .ok_or_else(|| CertifyError::Malformed(format!("cap {part:?} needs a positive integer")))?;
            match key.trim() {
                "enum" | "enumeration" => caps.enumeration = value,
                "char" | "characterization" => caps.characterization = value,
                "order" => caps.order = value,
                other => return Err(CertifyError::Malformed(format!("unknown cap {other:?}"))),
            }
        }
        Ok(caps)
    }

    /// Defaults, overridden by `THINLAB_CAPS` if set.
    pub fn from_env() -> Result<Caps, CertifyError> {
        match std::env::var("THINLAB_CAPS") {
            Ok(spec) => Caps::parse(&spec),
            Err(_) => Ok(Caps::default()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertifyError {
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("{what} is capped at n = {cap}, got n = {n}")]
    CapExceeded { what: &'static str, n: usize, cap: usize },
    #[error("internal invariant failed: {0}")]
    Invariant(String),
}

fn check_cap(what: &'static str, n: usize, cap: usize) -> Result<(), CertifyError> {
    if n > cap {
        Err(CertifyError::CapExceeded { what, n, cap })
    } else {
        Ok(())
    }
}

/// A triple `u ≺ v ≺ w` with `u`, `v` in one class, `u ~ w` and `v ≁ w`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Violation {
    pub u: usize,
    pub v: usize,
    pub w: usize,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "violation u={} v={} w={}", self.u, self.v, self.w)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Inconsistency {
    #[error("{0}")]
    Violation(Violation),
    #[error("malformed solution: {0}")]
    Malformed(String),
}

/// Position of each vertex in `order`, or an error if it is not a permutation.
fn positions(n: usize, order: &[usize]) -> Result<Vec<usize>, String> {
    if order.len() != n {
        return Err(format!("order has {} entries for {n} vertices", order.len()));
    }
    let mut pos = vec![usize::MAX; n];
    for (i, &v) in order.iter().enumerate() {
        if v >= n {
            return Err(format!("vertex {v} out of range"));
        }
        if pos[v] != usize::MAX {
            return Err(format!("vertex {v} appears twice in the order"));
        }
        pos[v] = i;
    }
    Ok(pos)
}

/// Checks that `sol` is a consistent solution for `t`.
///
/// On failure returns the violation with the smallest `(pos w, pos v, pos u)`.
pub fn check_consistent(t: &Tree, sol: &ConsistentSolution) -> Result<(), Inconsistency> {
    let n = t.len();
    let pos = positions(n, &sol.order).map_err(Inconsistency::Malformed)?;
    if sol.classes.len() != n {
        return Err(Inconsistency::Malformed(format!("{} class labels for {n} vertices", sol.classes.len())));
    }
    if let Some(v) = sol.classes.iter().position(|&c| c == 0) {
        return Err(Inconsistency::Malformed(format!("vertex {v} has class 0")));
    }

    // Dense class ids and per-class member positions, ascending.
    let mut dense: HashMap<usize, usize> = HashMap::new();
    let cls: Vec<usize> = sol
        .classes
        .iter()
        .map(|&c| {
            let next = dense.len();
            *dense.entry(c).or_insert(next)
        })
        .collect();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); dense.len()];
    for (p, &v) in sol.order.iter().enumerate() {
        members[cls[v]].push(p);
    }

    let mut stamp = vec![usize::MAX; n];
    let mut earliest: Vec<(usize, usize)> = Vec::new();
    for (j, &w) in sol.order.iter().enumerate() {
        for y in t.neighbors(w) {
            stamp[y] = j;
        }
        // earliest predecessor neighbor per class
        earliest.clear();
        for y in t.neighbors(w) {
            if pos[y] < j {
                match earliest.iter_mut().find(|(c, _)| *c == cls[y]) {
                    Some(e) => e.1 = e.1.min(pos[y]),
                    None => earliest.push((cls[y], pos[y])),
                }
            }
        }
        let mut best: Option<(usize, usize)> = None;
        for &(c, a) in &earliest {
            let list = &members[c];
            let start = list.partition_point(|&p| p <= a);
            for &p in &list[start..] {
                if p >= j {
                    break;
                }
                if stamp[sol.order[p]] != j {
                    if best.is_none_or(|(bv, _)| p < bv) {
                        best = Some((p, a));
                    }
                    break;
                }
            }
        }
        if let Some((pv, pu)) = best {
            return Err(Inconsistency::Violation(Violation { u: sol.order[pu], v: sol.order[pv], w }));
        }
    }
    Ok(())
}

/// Dense row-major bit matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
struct BitRows {
    words: usize,
    bits: Vec<u64>,
}

impl BitRows {
    fn new(n: usize) -> Self {
        let words = n.div_ceil(64);
        BitRows { words, bits: vec![0; words * n] }
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words..(i + 1) * self.words]
    }

    fn row_mut(&mut self, i: usize) -> &mut [u64] {
        &mut self.bits[i * self.words..(i + 1) * self.words]
    }

    fn get(&self, i: usize, j: usize) -> bool {
        self.row(i)[j / 64] >> (j % 64) & 1 == 1
    }

    fn set(&mut self, i: usize, j: usize) {
        self.row_mut(i)[j / 64] |= 1 << (j % 64);
    }
}

fn iter_bits(row: &[u64]) -> impl Iterator<Item = usize> + '_ {
    row.iter().enumerate().flat_map(|(wi, &word)| {
        let mut w = word;
        std::iter::from_fn(move || {
            if w == 0 {
                return None;
            }
            let b = w.trailing_zeros() as usize;
            w &= w - 1;
            Some(wi * 64 + b)
        })
    })
}

/// The graph `G_≺` of an order: `v ≺ w` are adjacent iff some `z` after `w`
/// is adjacent to `v` and not to `w`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuxGraph {
    order: Vec<usize>,
    pos: Vec<usize>,
    // adjacency in position space
    adj: BitRows,
}

impl AuxGraph {
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj.get(self.pos[a], self.pos[b])
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = iter_bits(self.adj.row(self.pos[v])).map(|p| self.order[p]).collect();
        out.sort_unstable();
        out
    }

    /// Edges `(a, b)` with `a ≺ b`, sorted by positions.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.len() {
            for j in iter_bits(self.adj.row(i)).filter(|&j| j > i) {
                out.push((self.order[i], self.order[j]));
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.adj.bits.iter().map(|w| w.count_ones() as usize).sum::<usize>() / 2
    }
}

pub fn build_aux_graph(t: &Tree, order: &[usize]) -> Result<AuxGraph, CertifyError> {
    build_aux_graph_capped(t, order, &Caps::default())
}

pub fn build_aux_graph_capped(t: &Tree, order: &[usize], caps: &Caps) -> Result<AuxGraph, CertifyError> {
    let n = t.len();
    check_cap("auxiliary graph", n, caps.order)?;
    let pos = positions(n, order).map_err(CertifyError::Malformed)?;
    let mut adj = BitRows::new(n);
    let mut near = vec![usize::MAX; n];
    for (j, &z) in order.iter().enumerate() {
        for y in t.neighbors(z) {
            near[pos[y]] = j;
        }
        for v in t.neighbors(z) {
            let i = pos[v];
            if i >= j {
                continue;
            }
            for w in i + 1..j {
                if near[w] != j {
                    adj.set(i, w);
                    adj.set(w, i);
                }
            }
        }
    }
    Ok(AuxGraph { order: order.to_vec(), pos, adj })
}

/// Minimum number of classes consistent with `order`, and one such partition
/// (classes indexed by vertex, numbered from 1).
pub fn min_classes_for_order(t: &Tree, order: &[usize]) -> Result<(usize, Vec<usize>), CertifyError> {
    min_classes_for_order_capped(t, order, &Caps::default())
}

pub fn min_classes_for_order_capped(
    t: &Tree,
    order: &[usize],
    caps: &Caps,
) -> Result<(usize, Vec<usize>), CertifyError> {
    let n = t.len();
    if n <= 64 {
        positions(n, order).map_err(CertifyError::Malformed)?;
        let kernel = OrderKernel::new(t);
        let mut pos_classes = [0u8; 64];
        let k = kernel.min_classes(order, &mut pos_classes)?;
        let mut classes = vec![0; n];
        for (p, &v) in order.iter().enumerate() {
            classes[v] = pos_classes[p] as usize;
        }
        return Ok((k, classes));
    }
    min_classes_general(t, order, caps)
}

/// Chain partition of the non-edges of `G_≺` by bipartite matching.
fn min_classes_general(t: &Tree, order: &[usize], caps: &Caps) -> Result<(usize, Vec<usize>), CertifyError> {
    let n = t.len();
    let g = build_aux_graph_capped(t, order, caps)?;
    let words = g.adj.words;

    // succ(i): later positions that may share a class with i
    let mut succ = BitRows::new(n);
    for i in 0..n {
        let row = succ.row_mut(i);
        for j in i + 1..n {
            row[j / 64] |= 1 << (j % 64);
        }
        for (s, a) in row.iter_mut().zip(g.adj.row(i)) {
            *s &= !a;
        }
    }
    for i in 0..n {
        for j in iter_bits(succ.row(i)).collect::<Vec<_>>() {
            let (ri, rj) = (succ.row(i), succ.row(j));
            if rj.iter().zip(ri).any(|(b, a)| b & !a != 0) {
                return Err(CertifyError::Invariant(format!(
                    "non-edges of the auxiliary graph are not transitive at positions {i} < {j}"
                )));
            }
        }
    }

    let mut matched_left = vec![usize::MAX; n];
    let mut matched_right = vec![usize::MAX; n];
    let mut visited = vec![0u64; words];
    for i in 0..n {
        visited.iter_mut().for_each(|w| *w = 0);
        augment(i, &succ, &mut visited, &mut matched_left, &mut matched_right);
    }
    let (k, pos_classes) = chains_from_matching(n, &matched_left, &matched_right);
    let mut classes = vec![0; n];
    for (p, &v) in order.iter().enumerate() {
        classes[v] = pos_classes[p];
    }
    Ok((k, classes))
}

fn augment(i: usize, succ: &BitRows, visited: &mut [u64], left: &mut [usize], right: &mut [usize]) -> bool {
    let words = succ.words;
    for wi in 0..words {
        loop {
            let avail = succ.row(i)[wi] & !visited[wi];
            if avail == 0 {
                break;
            }
            let j = wi * 64 + avail.trailing_zeros() as usize;
            visited[wi] |= 1 << (j % 64);
            if right[j] == usize::MAX || augment(right[j], succ, visited, left, right) {
                left[i] = j;
                right[j] = i;
                return true;
            }
        }
    }
    false
}

/// Chain classes numbered by chain head position, starting at 1.
fn chains_from_matching(n: usize, left: &[usize], right: &[usize]) -> (usize, Vec<usize>) {
    let mut class = vec![0; n];
    let mut k = 0;
    for head in 0..n {
        if right[head] != usize::MAX {
            continue;
        }
        k += 1;
        let mut p = head;
        loop {
            class[p] = k;
            match left[p] {
                usize::MAX => break,
                next => p = next,
            }
        }
    }
    (k, class)
}

/// Fixed-tree kernel for `n <= 64`: all per-order work on `u64` masks, in
/// position space.
#[derive(Debug, Clone)]
pub struct OrderKernel {
    n: usize,
    nbr: [u64; 64],
}

#[inline]
fn between(a: usize, b: usize) -> u64 {
    // bits strictly between a and b (a < b)
    let upto_b = if b >= 64 { u64::MAX } else { (1u64 << b) - 1 };
    upto_b & !((2u64 << a).wrapping_sub(1))
}

impl OrderKernel {
    /// Panics if `t` has more than 64 vertices.
    pub fn new(t: &Tree) -> Self {
        assert!(t.len() <= 64, "OrderKernel supports at most 64 vertices");
        let mut nbr = [0u64; 64];
        for v in 0..t.len() {
            for u in t.neighbors(v) {
                nbr[v] |= 1 << u;
            }
        }
        OrderKernel { n: t.len(), nbr }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Tree adjacency permuted into position space.
    #[inline]
    fn position_adjacency(&self, order: &[usize], adj: &mut [u64; 64]) {
        let mut pos = [0u8; 64];
        for (p, &v) in order.iter().enumerate() {
            pos[v] = p as u8;
        }
        for (p, &v) in order.iter().enumerate() {
            let mut m = self.nbr[v];
            let mut out = 0u64;
            while m != 0 {
                let u = m.trailing_zeros() as usize;
                m &= m - 1;
                out |= 1 << pos[u];
            }
            adj[p] = out;
        }
    }

    /// Upper rows of `G_≺`: `upper[i]` holds later positions adjacent to `i`.
    #[inline]
    fn upper_rows(&self, adj: &[u64; 64], upper: &mut [u64; 64]) {
        upper[..self.n].fill(0);
        for j in 0..self.n {
            let mut earlier = adj[j] & ((1u64 << j) - 1);
            while earlier != 0 {
                let i = earlier.trailing_zeros() as usize;
                earlier &= earlier - 1;
                upper[i] |= between(i, j) & !adj[j];
            }
        }
    }

    /// True iff a single class is consistent with `order`.
    pub fn is_single_class_consistent(&self, order: &[usize]) -> bool {
        let mut adj = [0u64; 64];
        self.position_adjacency(order, &mut adj);
        for j in 0..self.n {
            let earlier = adj[j] & ((1u64 << j) - 1);
            if earlier != 0 {
                let i = earlier.trailing_zeros() as usize;
                if between(i, j) & !adj[j] != 0 {
                    return false;
                }
            }
        }
        true
    }

    /// Minimum class count for `order`; writes 1-based classes by position.
    pub fn min_classes(&self, order: &[usize], classes: &mut [u8; 64]) -> Result<usize, CertifyError> {
        let n = self.n;
        let mut adj = [0u64; 64];
        let mut upper = [0u64; 64];
        self.position_adjacency(order, &mut adj);
        self.upper_rows(&adj, &mut upper);

        let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let mut succ = [0u64; 64];
        for i in 0..n {
            succ[i] = full & !((2u64 << i).wrapping_sub(1)) & !upper[i];
        }
        for i in 0..n {
            let mut m = succ[i];
            while m != 0 {
                let j = m.trailing_zeros() as usize;
                m &= m - 1;
                if succ[j] & !succ[i] != 0 {
                    return Err(CertifyError::Invariant(format!(
                        "non-edges of the auxiliary graph are not transitive at positions {i} < {j}"
                    )));
                }
            }
        }

        let mut left = [u8::MAX; 64];
        let mut right = [u8::MAX; 64];
        for i in 0..n {
            let mut visited = 0u64;
            small_augment(i, &succ, &mut visited, &mut left, &mut right);
        }
        let mut k = 0u8;
        for head in 0..n {
            if right[head] != u8::MAX {
                continue;
            }
            k += 1;
            let mut p = head;
            loop {
                classes[p] = k;
                match left[p] {
                    u8::MAX => break,
                    next => p = next as usize,
                }
            }
        }
        Ok(k as usize)
    }

    /// Consistency of a partition given by position.
    pub fn is_consistent(&self, order: &[usize], classes_by_pos: &[u8]) -> bool {
        let n = self.n;
        let mut adj = [0u64; 64];
        self.position_adjacency(order, &mut adj);
        let mut class_mask = [0u64; 65];
        for p in 0..n {
            class_mask[classes_by_pos[p] as usize] |= 1 << p;
        }
        for j in 0..n {
            let mut earlier = adj[j] & ((1u64 << j) - 1);
            while earlier != 0 {
                let i = earlier.trailing_zeros() as usize;
                let same = class_mask[classes_by_pos[i] as usize];
                // i is the earliest predecessor neighbor in its class
                earlier &= !same;
                if same & between(i, j) & !adj[j] != 0 {
                    return false;
                }
            }
        }
        true
    }
}

fn small_augment(i: usize, succ: &[u64; 64], visited: &mut u64, left: &mut [u8; 64], right: &mut [u8; 64]) -> bool {
    loop {
        let avail = succ[i] & !*visited;
        if avail == 0 {
            return false;
        }
        let j = avail.trailing_zeros() as usize;
        *visited |= 1 << j;
        if right[j] == u8::MAX || small_augment(right[j] as usize, succ, visited, left, right) {
            left[i] = j as u8;
            right[j] = i as u8;
            return true;
        }
    }
}

/// Calls `visit` on every permutation of `items` in place (Heap's algorithm).
/// Stops early when `visit` returns false.
pub fn for_each_permutation(items: &mut [usize], mut visit: impl FnMut(&[usize]) -> bool) {
    let n = items.len();
    if !visit(items) {
        return;
    }
    let mut c = vec![0usize; n];
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                items.swap(0, i);
            } else {
                items.swap(c[i], i);
            }
            if !visit(items) {
                return;
            }
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Thinness as the minimum over all `n!` orders of the per-order optimum.
pub fn thinness_by_order_enumeration(t: &Tree) -> Result<usize, CertifyError> {
    thinness_by_order_enumeration_capped(t, &Caps::default())
}

pub fn thinness_by_order_enumeration_capped(t: &Tree, caps: &Caps) -> Result<usize, CertifyError> {
    let n = t.len();
    check_cap("order enumeration", n, caps.enumeration.min(64))?;
    let kernel = OrderKernel::new(t);
    let mut order: Vec<usize> = (0..n).collect();
    let mut best = usize::MAX;
    let mut err = None;
    let mut scratch = [0u8; 64];
    for_each_permutation(&mut order, |ord| {
        if best == 2 {
            // only an interval order can improve on 2
            if kernel.is_single_class_consistent(ord) {
                best = 1;
            }
        } else {
            match kernel.min_classes(ord, &mut scratch) {
                Ok(k) => best = best.min(k),
                Err(e) => {
                    err = Some(e);
                    return false;
                }
            }
        }
        best > 1
    });
    match err {
        Some(e) => Err(e),
        None => Ok(best),
    }
}

/// Outcome of sweeping every order of a small tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrderSweep {
    pub orders: u64,
    /// Minimum of the per-order optimum over all orders.
    pub minimum: usize,
    /// Orders whose optimal partition failed the consistency check.
    pub inconsistent: u64,
}

/// Computes the per-order optimum for every order and checks each returned
/// partition for consistency. No early exit.
pub fn sweep_all_orders(t: &Tree, caps: &Caps) -> Result<OrderSweep, CertifyError> {
    let n = t.len();
    check_cap("order enumeration", n, caps.enumeration.min(64))?;
    let kernel = OrderKernel::new(t);
    let mut order: Vec<usize> = (0..n).collect();
    let mut sweep = OrderSweep { orders: 0, minimum: usize::MAX, inconsistent: 0 };
    let mut err = None;
    let mut classes = [0u8; 64];
    for_each_permutation(&mut order, |ord| match kernel.min_classes(ord, &mut classes) {
        Ok(k) => {
            sweep.orders += 1;
            sweep.minimum = sweep.minimum.min(k);
            if !kernel.is_consistent(ord, &classes) {
                sweep.inconsistent += 1;
            }
            true
        }
        Err(e) => {
            err = Some(e);
            false
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(sweep),
    }
}

type Set = SmallVec<[u64; 2]>;

/// Recursive thinness via the saturation characterization, memoized on
/// vertex sets.
struct Characterizer<'a> {
    t: &'a Tree,
    words: usize,
    memo: HashMap<(Set, usize), bool>,
}

impl<'a> Characterizer<'a> {
    fn new(t: &'a Tree) -> Self {
        Characterizer { t, words: t.len().div_ceil(64), memo: HashMap::new() }
    }

    fn full(&self) -> Set {
        let mut s: Set = SmallVec::from_elem(0, self.words);
        for v in 0..self.t.len() {
            s[v / 64] |= 1 << (v % 64);
        }
        s
    }

    fn contains(s: &Set, v: usize) -> bool {
        s[v / 64] >> (v % 64) & 1 == 1
    }

    /// Component of `set` minus `v` that contains `u`.
    fn dangling(&self, set: &Set, v: usize, u: usize) -> Set {
        let mut out: Set = SmallVec::from_elem(0, self.words);
        out[u / 64] |= 1 << (u % 64);
        let mut stack = vec![u];
        while let Some(x) = stack.pop() {
            for y in self.t.neighbors(x) {
                if y != v && Self::contains(set, y) && !Self::contains(&out, y) {
                    out[y / 64] |= 1 << (y % 64);
                    stack.push(y);
                }
            }
        }
        out
    }

    fn members(set: &Set) -> Vec<usize> {
        iter_bits(set).collect()
    }

    /// thin(set) >= k, for a connected nonempty set.
    fn thin_at_least(&mut self, set: &Set, k: usize) -> bool {
        if k <= 1 {
            return true;
        }
        if let Some(&hit) = self.memo.get(&(set.clone(), k)) {
            return hit;
        }
        let hit = Self::members(set).into_iter().any(|x| self.is_saturated(set, &[x], k - 1));
        self.memo.insert((set.clone(), k), hit);
        hit
    }

    fn is_k_neighbor(&mut self, set: &Set, in_x: &dyn Fn(usize) -> bool, v: usize, k: usize) -> bool {
        let t = self.t;
        for u in t.neighbors(v) {
            if in_x(u) || !Self::contains(set, u) {
                continue;
            }
            if k <= 1 {
                return true;
            }
            let d = self.dangling(set, v, u);
            if self.thin_at_least(&d, k) {
                return true;
            }
        }
        false
    }

    fn k_neighborhood(&mut self, set: &Set, xs: &[usize], k: usize) -> Vec<usize> {
        let t = self.t;
        let in_x = |y: usize| xs.contains(&y);
        let mut candidates: Vec<usize> =
            xs.iter().flat_map(|&x| t.neighbors(x)).filter(|&v| !in_x(v) && Self::contains(set, v)).collect();
        candidates.sort_unstable();
        candidates.dedup();
        candidates.into_iter().filter(|&v| self.is_k_neighbor(set, &in_x, v, k)).collect()
    }

    fn is_saturated(&mut self, set: &Set, xs: &[usize], k: usize) -> bool {
        let t = self.t;
        let in_x = |y: usize| xs.contains(&y);
        let mut count = 0;
        for &x in xs {
            for v in t.neighbors(x) {
                if in_x(v) || !Self::contains(set, v) {
                    continue;
                }
                if self.is_k_neighbor(set, &in_x, v, k) {
                    count += 1;
                    if count >= 3 {
                        return true;
                    }
                }
            }
        }
        false
    }

    fn thinness(&mut self) -> usize {
        let full = self.full();
        let mut k = 1;
        while self.thin_at_least(&full, k + 1) {
            k += 1;
        }
        k
    }
}

/// Thinness via the characterization: the least `k` with no vertex having
/// three or more `k`-neighbors.
pub fn thinness_by_characterization(t: &Tree) -> Result<usize, CertifyError> {
    thinness_by_characterization_capped(t, &Caps::default())
}

pub fn thinness_by_characterization_capped(t: &Tree, caps: &Caps) -> Result<usize, CertifyError> {
    check_cap("characterization oracle", t.len(), caps.characterization)?;
    Ok(Characterizer::new(t).thinness())
}

/// Vertices `v` adjacent to `x_set` (and outside it) that have a neighbor
/// `u` outside `x_set` with `thin(dangling(v, u)) >= k`. Sorted ascending.
pub fn k_neighborhood(t: &Tree, x_set: &[usize], k: usize) -> Result<Vec<usize>, CertifyError> {
    k_neighborhood_capped(t, x_set, k, &Caps::default())
}

pub fn k_neighborhood_capped(t: &Tree, x_set: &[usize], k: usize, caps: &Caps) -> Result<Vec<usize>, CertifyError> {
    check_cap("characterization oracle", t.len(), caps.characterization)?;
    if x_set.is_empty() {
        return Err(CertifyError::Malformed("empty vertex set".into()));
    }
    if let Some(&v) = x_set.iter().find(|&&v| v >= t.len()) {
        return Err(CertifyError::Malformed(format!("vertex {v} out of range")));
    }
    let mut c = Characterizer::new(t);
    let full = c.full();
    Ok(c.k_neighborhood(&full, x_set, k))
}
