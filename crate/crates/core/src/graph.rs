//! Decomposable graphs, perfect clique orderings and the Hasse tree of a
//! homogeneous graph.
//!
//! Vertex labels are 1-based at the API boundary (`DecomposableGraph::new`,
//! chordless-cycle witnesses) and 0-based everywhere else.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{difference, intersection, is_subset, union};

/// Default cap on the number of cliques for perfect-order enumeration.
pub const MAX_ENUMERATION_CLIQUES: usize = 8;

/// A connected chordal graph together with its canonical perfect ordering.
#[derive(Debug, Clone)]
pub struct DecomposableGraph {
    n: usize,
    adj: Vec<Vec<bool>>,
    edges: Vec<(usize, usize)>,
    canonical: CliqueOrdering,
}

impl PartialEq for DecomposableGraph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.edges == other.edges
    }
}

impl DecomposableGraph {
    /// Builds the graph on vertices `1..=n` from 1-based edges.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::MalformedInput("graph has no vertices".into()));
        }
        let mut adj = vec![vec![false; n]; n];
        let mut list = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a == 0 || b == 0 || a > n || b > n {
                return Err(Error::MalformedInput(format!(
                    "edge ({a}, {b}) has a label outside 1..={n}"
                )));
            }
            if a == b {
                return Err(Error::MalformedInput(format!("self-loop at vertex {a}")));
            }
            let (i, j) = (a.min(b) - 1, a.max(b) - 1);
            if adj[i][j] {
                return Err(Error::MalformedInput(format!("duplicate edge ({a}, {b})")));
            }
            adj[i][j] = true;
            adj[j][i] = true;
            list.push((i, j));
        }
        list.sort_unstable();
        if !connected(&adj) {
            return Err(Error::NotConnected);
        }
        let order = mcs_order(&adj);
        if let Some(cycle) = non_chordal_witness(&adj, &order) {
            return Err(Error::NotChordal { cycle });
        }
        let canonical = mcs_cliques(&adj, &order)?;
        Ok(DecomposableGraph { n, adj, edges: list, canonical })
    }

    /// The complete graph on `n` vertices.
    pub fn complete(n: usize) -> Result<Self> {
        let mut edges = Vec::new();
        for i in 1..=n {
            for j in (i + 1)..=n {
                edges.push((i, j));
            }
        }
        Self::new(n, &edges)
    }

    /// The path `1 - 2 - ... - n`.
    pub fn path(n: usize) -> Result<Self> {
        let edges: Vec<_> = (1..n).map(|i| (i, i + 1)).collect();
        Self::new(n, &edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Edges `(i, j)` with `i < j`, 0-based, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// 1-based edge list, as accepted by `new`.
    pub fn labeled_edges(&self) -> Vec<(usize, usize)> {
        self.edges.iter().map(|&(i, j)| (i + 1, j + 1)).collect()
    }

    /// Adjacency test; `i == j` counts as adjacent (the diagonal belongs to E).
    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        i == j || self.adj[i][j]
    }

    pub fn neighbours(&self, i: usize) -> Vec<usize> {
        (0..self.n).filter(|&j| self.adj[i][j]).collect()
    }

    /// Closed neighbourhood `{i} ∪ nb(i)`, sorted.
    pub fn closed_neighbourhood(&self, i: usize) -> Vec<usize> {
        (0..self.n).filter(|&j| j == i || self.adj[i][j]).collect()
    }

    pub fn is_complete(&self) -> bool {
        self.canonical.k() == 1
    }

    /// Canonical perfect ordering (maximum cardinality search, lowest label first).
    pub fn canonical(&self) -> &CliqueOrdering {
        &self.canonical
    }
}

/// Returns the canonical perfect ordering of `g`.
pub fn decompose(g: &DecomposableGraph) -> CliqueOrdering {
    g.canonical.clone()
}

/// A separator that occurs in the ordering, with its multiplicity ν(S).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistinctSeparator {
    pub vertices: Vec<usize>,
    pub multiplicity: usize,
}

/// A perfect ordering of the cliques.
///
/// Cliques and distinct separators carry canonical ids so that shape
/// parameters, which are indexed canonically, can be read in any order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliqueOrdering {
    cliques: Vec<Vec<usize>>,
    clique_ids: Vec<usize>,
    separators: Vec<Vec<usize>>,
    separator_ids: Vec<Option<usize>>,
    distinct: Vec<DistinctSeparator>,
}

impl CliqueOrdering {
    /// Number of cliques `k`.
    pub fn k(&self) -> usize {
        self.cliques.len()
    }

    /// Clique at position `j` (0-based position).
    pub fn clique(&self, j: usize) -> &[usize] {
        &self.cliques[j]
    }

    pub fn cliques(&self) -> &[Vec<usize>] {
        &self.cliques
    }

    /// Canonical clique id of the clique at position `j`.
    pub fn clique_id(&self, j: usize) -> usize {
        self.clique_ids[j]
    }

    pub fn clique_ids(&self) -> &[usize] {
        &self.clique_ids
    }

    /// `S_j = C_j ∩ H_{j-1}`; empty for `j = 0`.
    pub fn separator(&self, j: usize) -> &[usize] {
        &self.separators[j]
    }

    /// Canonical id of the distinct separator at position `j ≥ 1`.
    pub fn separator_id(&self, j: usize) -> Option<usize> {
        self.separator_ids[j]
    }

    /// Distinct separators in canonical order.
    pub fn distinct_separators(&self) -> &[DistinctSeparator] {
        &self.distinct
    }

    /// `H_j = C_0 ∪ ... ∪ C_j`.
    pub fn history(&self, j: usize) -> Vec<usize> {
        self.cliques[..=j].iter().fold(Vec::new(), |h, c| union(&h, c))
    }

    /// `R_j = C_j \ S_j`.
    pub fn residual(&self, j: usize) -> Vec<usize> {
        difference(&self.cliques[j], &self.separators[j])
    }

    /// Positions `j` with `S_j = S` for the distinct separator `id`, i.e. J(P, S).
    pub fn occurrences(&self, id: usize) -> Vec<usize> {
        (1..self.k()).filter(|&j| self.separator_ids[j] == Some(id)).collect()
    }

    pub fn multiplicity(&self, id: usize) -> usize {
        self.distinct[id].multiplicity
    }

    /// Rebuilds the ordering with the cliques permuted; `perm[j]` is the
    /// position in `self` of the clique placed at `j`. Fails unless the
    /// permutation is perfect.
    pub fn reorder(&self, perm: &[usize]) -> Result<CliqueOrdering> {
        let k = self.k();
        let mut seen = vec![false; k];
        if perm.len() != k || perm.iter().any(|&p| p >= k || core::mem::replace(&mut seen[p], true)) {
            return Err(Error::MalformedInput("not a permutation of the cliques".into()));
        }
        let cliques: Vec<Vec<usize>> = perm.iter().map(|&p| self.cliques[p].clone()).collect();
        if !is_perfect(&cliques) {
            return Err(Error::MalformedInput("ordering is not perfect".into()));
        }
        let clique_ids = perm.iter().map(|&p| self.clique_ids[p]).collect();
        let mut separators = vec![Vec::new()];
        let mut separator_ids = vec![None];
        let mut h = cliques[0].clone();
        for c in &cliques[1..] {
            let s = intersection(c, &h);
            let id = self
                .distinct
                .iter()
                .position(|d| d.vertices == s)
                .ok_or_else(|| Error::InternalInconsistency(format!("separator {s:?} is not minimal")))?;
            separators.push(s);
            separator_ids.push(Some(id));
            h = union(&h, c);
        }
        let out = CliqueOrdering {
            cliques,
            clique_ids,
            separators,
            separator_ids,
            distinct: self.distinct.clone(),
        };
        for id in 0..out.distinct.len() {
            if out.occurrences(id).len() != out.distinct[id].multiplicity {
                return Err(Error::InternalInconsistency("separator multiplicity changed".into()));
            }
        }
        Ok(out)
    }

    /// Key that determines the sets A_P and B_P and the normalising constants:
    /// the first separator, the cliques that share it (including C_1), and the
    /// clique sets J(P, S) of the other separators.
    pub fn shape_key(&self) -> (Option<usize>, Vec<Vec<usize>>) {
        let first = if self.k() > 1 { self.separator_ids[1] } else { None };
        let mut sets = Vec::new();
        for id in 0..self.distinct.len() {
            let mut ids: Vec<usize> = self.occurrences(id).iter().map(|&j| self.clique_ids[j]).collect();
            if Some(id) == first {
                ids.push(self.clique_ids[0]);
            }
            ids.sort_unstable();
            sets.push(ids);
        }
        (first, sets)
    }
}

fn is_perfect(cliques: &[Vec<usize>]) -> bool {
    let mut h: Vec<usize> = cliques[0].clone();
    for (j, c) in cliques.iter().enumerate().skip(1) {
        let s = intersection(c, &h);
        if s.is_empty() || !cliques[..j].iter().any(|prev| is_subset(&s, prev)) {
            return false;
        }
        h = union(&h, c);
    }
    true
}

/// All perfect orderings of the cliques of `g`, in lexicographic order of
/// canonical clique ids (the canonical ordering comes first).
pub fn enumerate_perfect_orders(g: &DecomposableGraph, limit: usize) -> Result<Vec<CliqueOrdering>> {
    let canon = &g.canonical;
    let k = canon.k();
    if k > limit {
        return Err(Error::TooManyCliques { k, limit });
    }
    let mut out = Vec::new();
    let mut perm = Vec::with_capacity(k);
    let mut used = vec![false; k];
    extend_perfect(canon, &mut perm, &mut used, &mut out)?;
    Ok(out)
}

fn extend_perfect(
    canon: &CliqueOrdering,
    perm: &mut Vec<usize>,
    used: &mut [bool],
    out: &mut Vec<CliqueOrdering>,
) -> Result<()> {
    let k = canon.k();
    if perm.len() == k {
        out.push(canon.reorder(perm)?);
        return Ok(());
    }
    let h = perm.iter().fold(Vec::new(), |h, &p| union(&h, &canon.cliques[p]));
    for c in 0..k {
        if used[c] {
            continue;
        }
        if !perm.is_empty() {
            let s = intersection(&canon.cliques[c], &h);
            if s.is_empty() || !perm.iter().any(|&p| is_subset(&s, &canon.cliques[p])) {
                continue;
            }
        }
        used[c] = true;
        perm.push(c);
        extend_perfect(canon, perm, used, out)?;
        perm.pop();
        used[c] = false;
    }
    Ok(())
}

/// Keeps the first ordering of each `shape_key` class.
pub fn distinct_shape_orders(orders: &[CliqueOrdering]) -> Vec<CliqueOrdering> {
    let mut seen = BTreeMap::new();
    let mut out = Vec::new();
    for o in orders {
        if seen.insert(o.shape_key(), ()).is_none() {
            out.push(o.clone());
        }
    }
    out
}

fn connected(adj: &[Vec<bool>]) -> bool {
    let n = adj.len();
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(v) = queue.pop_front() {
        for w in 0..n {
            if adj[v][w] && !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Maximum cardinality search; ties go to the lowest label.
fn mcs_order(adj: &[Vec<bool>]) -> Vec<usize> {
    let n = adj.len();
    let mut weight = vec![0usize; n];
    let mut done = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| !done[v])
            .fold(None, |best: Option<usize>, v| match best {
                Some(b) if weight[b] >= weight[v] => Some(b),
                _ => Some(v),
            })
            .expect("unvisited vertex");
        done[v] = true;
        order.push(v);
        for w in 0..n {
            if adj[v][w] && !done[w] {
                weight[w] += 1;
            }
        }
    }
    order
}

/// `None` when the MCS order is a perfect elimination order (the graph is
/// chordal); otherwise a chordless cycle of length ≥ 4, 1-based.
fn non_chordal_witness(adj: &[Vec<bool>], order: &[usize]) -> Option<Vec<usize>> {
    let n = adj.len();
    let mut pos = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let chordal = order.iter().all(|&v| {
        let earlier: Vec<usize> = (0..n).filter(|&w| adj[v][w] && pos[w] < pos[v]).collect();
        earlier.iter().enumerate().all(|(a, &x)| earlier[a + 1..].iter().all(|&y| adj[x][y]))
    });
    if chordal {
        return None;
    }
    // Every chordless cycle has a vertex v with non-adjacent cycle neighbours
    // u, w whose remaining arc avoids N[v]; search for such a configuration.
    for v in 0..n {
        let nb: Vec<usize> = (0..n).filter(|&w| adj[v][w]).collect();
        for (a, &u) in nb.iter().enumerate() {
            for &w in &nb[a + 1..] {
                if adj[u][w] {
                    continue;
                }
                let blocked: Vec<bool> = (0..n).map(|x| x == v || (adj[v][x] && x != u && x != w)).collect();
                if let Some(path) = shortest_path(adj, u, w, &blocked) {
                    let mut cycle = vec![v + 1];
                    cycle.extend(path.iter().map(|x| x + 1));
                    return Some(cycle);
                }
            }
        }
    }
    Some(Vec::new())
}

fn shortest_path(adj: &[Vec<bool>], from: usize, to: usize, blocked: &[bool]) -> Option<Vec<usize>> {
    let n = adj.len();
    let mut prev = vec![usize::MAX; n];
    let mut queue = VecDeque::from([from]);
    prev[from] = from;
    while let Some(v) = queue.pop_front() {
        if v == to {
            let mut path = vec![to];
            let mut x = to;
            while x != from {
                x = prev[x];
                path.push(x);
            }
            path.reverse();
            return Some(path);
        }
        for w in 0..n {
            if adj[v][w] && !blocked[w] && prev[w] == usize::MAX {
                prev[w] = v;
                queue.push_back(w);
            }
        }
    }
    None
}

/// Cliques of a chordal graph read off its MCS order; they come out in a
/// perfect order and each new clique's separator is its earlier neighbourhood.
fn mcs_cliques(adj: &[Vec<bool>], order: &[usize]) -> Result<CliqueOrdering> {
    let n = adj.len();
    let mut numbered = vec![false; n];
    let mut cliques: Vec<Vec<usize>> = Vec::new();
    let mut separators: Vec<Vec<usize>> = Vec::new();
    let mut prev_card: Option<usize> = None;
    for &v in order {
        let earlier: Vec<usize> = (0..n).filter(|&w| adj[v][w] && numbered[w]).collect();
        let card = earlier.len();
        match prev_card {
            Some(p) if card > p => {
                let c = cliques.last_mut().expect("current clique");
                c.push(v);
                c.sort_unstable();
            }
            _ => {
                let mut c = earlier.clone();
                c.push(v);
                c.sort_unstable();
                cliques.push(c);
                separators.push(earlier);
            }
        }
        numbered[v] = true;
        prev_card = Some(card);
    }
    let mut distinct: Vec<DistinctSeparator> = Vec::new();
    let mut separator_ids = vec![None];
    for s in &separators[1..] {
        let id = match distinct.iter().position(|d| &d.vertices == s) {
            Some(id) => {
                distinct[id].multiplicity += 1;
                id
            }
            None => {
                distinct.push(DistinctSeparator { vertices: s.clone(), multiplicity: 1 });
                distinct.len() - 1
            }
        };
        separator_ids.push(Some(id));
    }
    let k = cliques.len();
    let ord = CliqueOrdering {
        clique_ids: (0..k).collect(),
        cliques,
        separators,
        separator_ids,
        distinct,
    };
    if !is_perfect(&ord.cliques) && k > 1 {
        return Err(Error::InternalInconsistency("MCS cliques are not in perfect order".into()));
    }
    Ok(ord)
}

/// Result of the homogeneity test.
#[derive(Debug, Clone, PartialEq)]
pub enum Homogeneity {
    Homogeneous(HasseTree),
    /// Not homogeneous; carries an induced path `a - b - c - d`, 0-based.
    NotHomogeneous { induced_path: [usize; 4] },
}

/// What a Hasse-tree node stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeRole {
    /// An endpoint; the union of its ancestors' classes is the clique with
    /// this canonical id.
    Clique(usize),
    /// An internal node; the union of its ancestors' classes is the distinct
    /// separator with this canonical id, of multiplicity `nu`.
    Separator { id: usize, nu: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct HasseNode {
    /// The equivalence class `[u]`, sorted.
    pub vertices: Vec<usize>,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    pub role: NodeRole,
}

/// Hasse diagram of the vertex preorder of a homogeneous graph. Node 0 is
/// the root; a node's parent always has a smaller index.
#[derive(Debug, Clone, PartialEq)]
pub struct HasseTree {
    pub nodes: Vec<HasseNode>,
}

impl HasseTree {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `n_u = |[u]|`.
    pub fn weight(&self, u: usize) -> usize {
        self.nodes[u].vertices.len()
    }

    /// Strict ancestors of `u`, root first.
    pub fn ancestors(&self, u: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut x = self.nodes[u].parent;
        while let Some(p) = x {
            out.push(p);
            x = self.nodes[p].parent;
        }
        out.reverse();
        out
    }

    /// Strict descendants of `u`.
    pub fn descendants(&self, u: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = self.nodes[u].children.clone();
        while let Some(v) = stack.pop() {
            out.push(v);
            stack.extend(self.nodes[v].children.iter().copied());
        }
        out.sort_unstable();
        out
    }

    /// `Σ_{v ≺ u} n_v`.
    pub fn ancestor_weight(&self, u: usize) -> usize {
        self.ancestors(u).iter().map(|&v| self.weight(v)).sum()
    }

    /// `Σ_{v ≻ u} n_v`.
    pub fn descendant_weight(&self, u: usize) -> usize {
        self.descendants(u).iter().map(|&v| self.weight(v)).sum()
    }

    /// `m_u = Σ_{v ⪯ u} n_v`.
    pub fn m(&self, u: usize) -> usize {
        self.ancestor_weight(u) + self.weight(u)
    }

    /// Vertices of `u` and all its ancestors, sorted.
    pub fn upper_set(&self, u: usize) -> Vec<usize> {
        let mut out = self.nodes[u].vertices.clone();
        for a in self.ancestors(u) {
            out.extend(self.nodes[a].vertices.iter().copied());
        }
        out.sort_unstable();
        out
    }
}

/// Decides homogeneity two ways (the arrow relation and an induced-path
/// scan) and builds the Hasse tree when the graph is homogeneous.
pub fn homogeneous_structure(g: &DecomposableGraph) -> Result<Homogeneity> {
    let n = g.n();
    let nbh: Vec<Vec<usize>> = (0..n).map(|i| g.closed_neighbourhood(i)).collect();
    let arrow = |i: usize, j: usize| is_subset(&nbh[j], &nbh[i]);
    let by_arrows = g.edges().iter().all(|&(i, j)| arrow(i, j) || arrow(j, i));
    let path = induced_path4(g);
    if by_arrows != path.is_none() {
        return Err(Error::InternalInconsistency(
            "arrow test and induced-path scan disagree on homogeneity".into(),
        ));
    }
    if let Some(p) = path {
        return Ok(Homogeneity::NotHomogeneous { induced_path: p });
    }

    // Classes of vertices with equal closed neighbourhoods, ordered so that
    // larger neighbourhoods (closer to the root) come first.
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for v in 0..n {
        match classes.iter_mut().find(|c| nbh[c[0]] == nbh[v]) {
            Some(c) => c.push(v),
            None => classes.push(vec![v]),
        }
    }
    classes.sort_by(|a, b| nbh[b[0]].len().cmp(&nbh[a[0]].len()).then(a[0].cmp(&b[0])));
    let m = classes.len();
    let below = |u: usize, v: usize| u != v && arrow(classes[u][0], classes[v][0]);
    if (1..m).any(|v| !below(0, v)) {
        return Err(Error::InternalInconsistency("Hasse diagram has no root".into()));
    }
    let mut parent = vec![None; m];
    for v in 1..m {
        let anc: Vec<usize> = (0..m).filter(|&u| below(u, v)).collect();
        for (a, &x) in anc.iter().enumerate() {
            if anc[a + 1..].iter().any(|&y| !below(x, y) && !below(y, x)) {
                return Err(Error::InternalInconsistency("ancestors do not form a chain".into()));
            }
        }
        let p = anc
            .iter()
            .copied()
            .find(|&x| anc.iter().all(|&y| y == x || below(y, x)))
            .ok_or_else(|| Error::InternalInconsistency("no immediate predecessor".into()))?;
        parent[v] = Some(p);
    }
    let mut children = vec![Vec::new(); m];
    for v in 1..m {
        children[parent[v].unwrap()].push(v);
    }

    let canon = g.canonical();
    let mut roles = Vec::with_capacity(m);
    let mut tree = HasseTree { nodes: Vec::new() };
    for u in 0..m {
        tree.nodes.push(HasseNode {
            vertices: classes[u].clone(),
            parent: parent[u],
            children: children[u].clone(),
            role: NodeRole::Clique(0),
        });
    }
    let mut cliques_seen = vec![false; canon.k()];
    let mut seps_seen = vec![false; canon.distinct_separators().len()];
    for u in 0..m {
        let set = tree.upper_set(u);
        let role = if children[u].is_empty() {
            let id = canon
                .cliques()
                .iter()
                .position(|c| *c == set)
                .ok_or_else(|| Error::InternalInconsistency(format!("endpoint {set:?} is not a clique")))?;
            cliques_seen[id] = true;
            NodeRole::Clique(id)
        } else {
            let nu = children[u].len() - 1;
            let id = canon
                .distinct_separators()
                .iter()
                .position(|d| d.vertices == set && d.multiplicity == nu)
                .ok_or_else(|| Error::InternalInconsistency(format!("internal node {set:?} is not a separator")))?;
            seps_seen[id] = true;
            NodeRole::Separator { id, nu }
        };
        roles.push(role);
    }
    if cliques_seen.iter().chain(seps_seen.iter()).any(|s| !s) {
        return Err(Error::InternalInconsistency("Hasse tree misses a clique or separator".into()));
    }
    for (node, role) in tree.nodes.iter_mut().zip(roles) {
        node.role = role;
    }
    Ok(Homogeneity::Homogeneous(tree))
}

fn induced_path4(g: &DecomposableGraph) -> Option<[usize; 4]> {
    let n = g.n();
    for &(x, y) in g.edges() {
        for (b, c) in [(x, y), (y, x)] {
            for a in 0..n {
                if a == c || !g.adj[b][a] || g.adj[c][a] {
                    continue;
                }
                for d in 0..n {
                    if d == b || d == a || !g.adj[c][d] || g.adj[b][d] || g.adj[a][d] {
                        continue;
                    }
                    return Some([a, b, c, d]);
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn g0() -> DecomposableGraph {
        DecomposableGraph::new(6, &[(1, 2), (1, 3), (2, 3), (1, 4), (2, 4), (1, 5), (2, 5), (1, 6)]).unwrap()
    }

    fn fig1() -> DecomposableGraph {
        let cliques: [&[usize]; 4] = [&[1, 2, 3, 7], &[1, 2, 4], &[1, 2, 5], &[1, 6]];
        let mut edges = Vec::new();
        for c in cliques {
            for (a, &i) in c.iter().enumerate() {
                for &j in &c[a + 1..] {
                    if !edges.contains(&(i, j)) {
                        edges.push((i, j));
                    }
                }
            }
        }
        DecomposableGraph::new(7, &edges).unwrap()
    }

    #[test]
    fn a4_decomposition() {
        let g = DecomposableGraph::path(4).unwrap();
        let o = decompose(&g);
        assert_eq!(o.cliques(), &[vec![0, 1], vec![1, 2], vec![2, 3]]);
        assert_eq!(o.separator(1), &[1]);
        assert_eq!(o.separator(2), &[2]);
        assert_eq!(o.distinct_separators().len(), 2);
        assert_eq!(o.history(1), vec![0, 1, 2]);
        assert_eq!(o.residual(2), vec![3]);
    }

    #[test]
    fn g0_decomposition() {
        let o = decompose(&g0());
        assert_eq!(o.cliques(), &[vec![0, 1, 2], vec![0, 1, 3], vec![0, 1, 4], vec![0, 5]]);
        let d = o.distinct_separators();
        assert_eq!(d[0], DistinctSeparator { vertices: vec![0, 1], multiplicity: 2 });
        assert_eq!(d[1], DistinctSeparator { vertices: vec![0], multiplicity: 1 });
        assert_eq!(o.occurrences(0), vec![1, 2]);
    }

    #[test]
    fn perfect_order_counts() {
        let a4 = DecomposableGraph::path(4).unwrap();
        assert_eq!(enumerate_perfect_orders(&a4, 8).unwrap().len(), 4);
        assert_eq!(enumerate_perfect_orders(&g0(), 8).unwrap().len(), 24);
        let k3 = DecomposableGraph::complete(3).unwrap();
        assert_eq!(enumerate_perfect_orders(&k3, 8).unwrap().len(), 1);
        let orders = enumerate_perfect_orders(&a4, 8).unwrap();
        assert_eq!(orders[0], decompose(&a4));
        assert_eq!(distinct_shape_orders(&orders).len(), 2);
    }

    #[test]
    fn enumeration_cap() {
        let star = DecomposableGraph::new(10, &(2..=10).map(|i| (1, i)).collect::<Vec<_>>()).unwrap();
        assert_eq!(
            enumerate_perfect_orders(&star, 8),
            Err(Error::TooManyCliques { k: 9, limit: 8 })
        );
    }

    #[test]
    fn rejects_bad_graphs() {
        let c4 = DecomposableGraph::new(4, &[(1, 2), (2, 3), (3, 4), (4, 1)]);
        match c4 {
            Err(Error::NotChordal { cycle }) => {
                assert_eq!(cycle.len(), 4);
                let mut s = cycle.clone();
                s.sort_unstable();
                assert_eq!(s, vec![1, 2, 3, 4]);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(DecomposableGraph::new(3, &[(1, 2)]), Err(Error::NotConnected));
        assert!(matches!(DecomposableGraph::new(2, &[(1, 2), (2, 1)]), Err(Error::MalformedInput(_))));
        assert!(matches!(DecomposableGraph::new(2, &[(1, 3)]), Err(Error::MalformedInput(_))));
        assert!(matches!(DecomposableGraph::new(2, &[(2, 2)]), Err(Error::MalformedInput(_))));
    }

    #[test]
    fn hasse_tree_of_fig1() {
        let Homogeneity::Homogeneous(t) = homogeneous_structure(&fig1()).unwrap() else {
            panic!("fig1 graph is homogeneous")
        };
        let classes: Vec<Vec<usize>> = t.nodes.iter().map(|n| n.vertices.clone()).collect();
        assert_eq!(classes, vec![vec![0], vec![1], vec![2, 6], vec![3], vec![4], vec![5]]);
        let root = &t.nodes[0];
        assert_eq!(root.children, vec![1, 5]);
        assert_eq!(t.nodes[1].children, vec![2, 3, 4]);
        assert!(matches!(t.nodes[1].role, NodeRole::Separator { nu: 2, .. }));
        assert!(matches!(t.nodes[0].role, NodeRole::Separator { nu: 1, .. }));
        assert_eq!(t.m(2), 4);
        assert_eq!(t.descendant_weight(0), 6);
    }

    #[test]
    fn a4_is_not_homogeneous() {
        let g = DecomposableGraph::path(4).unwrap();
        let Homogeneity::NotHomogeneous { induced_path } = homogeneous_structure(&g).unwrap() else {
            panic!("A4 is not homogeneous")
        };
        assert!(induced_path == [0, 1, 2, 3] || induced_path == [3, 2, 1, 0]);
    }

    #[test]
    fn complete_graph_tree_is_a_single_clique() {
        let Homogeneity::Homogeneous(t) = homogeneous_structure(&DecomposableGraph::complete(3).unwrap()).unwrap()
        else {
            panic!()
        };
        assert_eq!(t.len(), 1);
        assert_eq!(t.nodes[0].role, NodeRole::Clique(0));
    }
}
