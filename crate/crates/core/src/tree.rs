//! Finite rooted directed trees truncated at a generation depth.
//!
//! Vertex ids are assigned breadth-first, so the root is always `0` and each
//! generation `{|v| = n}` occupies a contiguous id range. Vertices at the
//! maximal depth `D` form the boundary: unless the tree is declared finite
//! (its boundary vertices are genuine leaves), whatever lies below them has
//! been cut off.

use std::collections::hash_map::DefaultHasher;
use std::collections::VecDeque;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub usize);

impl VertexId {
    pub const ROOT: VertexId = VertexId(0);

    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Debug)]
pub struct DirectedTree {
    parent: Vec<Option<VertexId>>,
    children: Vec<Vec<VertexId>>,
    depth: Vec<usize>,
    generations: Vec<Range<usize>>,
    labels: Vec<Option<String>>,
    finite: bool,
    fingerprint: u64,
}

/// Output of [`DirectedTree::from_edges`]: the tree plus the map from input
/// vertex positions to the breadth-first ids.
#[derive(Clone, Debug)]
pub struct BuiltTree {
    pub tree: DirectedTree,
    pub id_of_input: Vec<VertexId>,
}

impl DirectedTree {
    /// Builds a tree from `n` input vertices and `(parent, child)` edges given
    /// in input positions. Child order follows edge order.
    ///
    /// `finite` declares that vertices without children are genuine leaves
    /// rather than truncation artifacts.
    pub fn from_edges(
        n: usize,
        edges: &[(usize, usize)],
        labels: Vec<Option<String>>,
        finite: bool,
    ) -> Result<BuiltTree> {
        if n == 0 {
            return Err(Error::EmptyTree);
        }
        if labels.len() != n {
            return Err(Error::Spec(format!(
                "{} labels given for {} vertices",
                labels.len(),
                n
            )));
        }
        let mut in_parent: Vec<Option<usize>> = vec![None; n];
        let mut in_children: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(p, c) in edges {
            if p >= n || c >= n {
                return Err(Error::EdgeOutOfRange(p, c, n));
            }
            if p == c {
                return Err(Error::Cycle(p));
            }
            if let Some(first) = in_parent[c] {
                return Err(Error::MultipleParents {
                    child: c,
                    first,
                    second: p,
                });
            }
            in_parent[c] = Some(p);
            in_children[p].push(c);
        }

        let roots: Vec<usize> = (0..n).filter(|&v| in_parent[v].is_none()).collect();
        let root = match roots.as_slice() {
            // Every vertex has a parent: following parents must loop.
            [] => return Err(Error::Cycle(0)),
            [r] => *r,
            [_, second, ..] => return Err(Error::Disconnected(*second)),
        };

        let mut id_of_input = vec![usize::MAX; n];
        let mut order = Vec::with_capacity(n);
        let mut queue = VecDeque::from([root]);
        id_of_input[root] = 0;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &c in &in_children[v] {
                id_of_input[c] = order.len() + queue.len();
                queue.push_back(c);
            }
        }
        if order.len() != n {
            // A single root but unreachable vertices: they sit on a cycle.
            let stray = (0..n).find(|&v| id_of_input[v] == usize::MAX).unwrap();
            return Err(Error::Cycle(stray));
        }

        let mut parent = vec![None; n];
        let mut children = vec![Vec::new(); n];
        let mut depth = vec![0usize; n];
        let mut new_labels = vec![None; n];
        for (new, &old) in order.iter().enumerate() {
            if let Some(p) = in_parent[old] {
                let pid = id_of_input[p];
                parent[new] = Some(VertexId(pid));
                depth[new] = depth[pid] + 1;
            }
            children[new] = in_children[old]
                .iter()
                .map(|&c| VertexId(id_of_input[c]))
                .collect();
            new_labels[new] = labels[old].clone();
        }

        let max_depth = *depth.iter().max().unwrap();
        let mut generations = Vec::with_capacity(max_depth + 1);
        let mut start = 0;
        for g in 0..=max_depth {
            let end = start + depth[start..].iter().take_while(|&&d| d == g).count();
            generations.push(start..end);
            start = end;
        }
        debug_assert_eq!(start, n);

        let mut hasher = DefaultHasher::new();
        parent.hash(&mut hasher);
        finite.hash(&mut hasher);
        let tree = DirectedTree {
            parent,
            children,
            depth,
            generations,
            labels: new_labels,
            finite,
            fingerprint: hasher.finish(),
        };
        Ok(BuiltTree {
            tree,
            id_of_input: id_of_input.into_iter().map(VertexId).collect(),
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.parent.len()
    }

    pub fn root(&self) -> VertexId {
        VertexId::ROOT
    }

    /// Truncation depth `D`.
    pub fn max_depth(&self) -> usize {
        self.generations.len() - 1
    }

    /// True when childless vertices are genuine leaves, so the truncation is
    /// the whole tree and no computation is horizon-limited.
    pub fn is_finite(&self) -> bool {
        self.finite
    }

    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn check(&self, v: VertexId) -> Result<()> {
        if v.0 < self.n_vertices() {
            Ok(())
        } else {
            Err(Error::InvalidVertex(v.0))
        }
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.n_vertices()).map(VertexId)
    }

    pub fn parent(&self, v: VertexId) -> Option<VertexId> {
        self.parent[v.0]
    }

    pub fn children(&self, v: VertexId) -> &[VertexId] {
        &self.children[v.0]
    }

    pub fn depth(&self, v: VertexId) -> usize {
        self.depth[v.0]
    }

    pub fn label(&self, v: VertexId) -> Option<&str> {
        self.labels[v.0].as_deref()
    }

    /// Label if present, id otherwise.
    pub fn display(&self, v: VertexId) -> String {
        self.label(v)
            .map(str::to_owned)
            .unwrap_or_else(|| v.to_string())
    }

    pub fn find_label(&self, label: &str) -> Option<VertexId> {
        self.labels
            .iter()
            .position(|l| l.as_deref() == Some(label))
            .map(VertexId)
    }

    pub fn n_generations(&self) -> usize {
        self.generations.len()
    }

    /// Id range of generation `n`; empty beyond the truncation.
    pub fn generation_range(&self, n: usize) -> Range<usize> {
        self.generations.get(n).cloned().unwrap_or(0..0)
    }

    pub fn generation(&self, n: usize) -> impl Iterator<Item = VertexId> {
        self.generation_range(n).map(VertexId)
    }

    pub fn generation_sizes(&self) -> Vec<usize> {
        self.generations.iter().map(|r| r.len()).collect()
    }

    /// Vertices strictly above the truncation boundary.
    pub fn is_interior(&self, v: VertexId) -> bool {
        self.depth[v.0] < self.max_depth()
    }

    /// `par^k(v)`, if it exists.
    pub fn ancestor(&self, v: VertexId, k: usize) -> Option<VertexId> {
        let mut cur = v;
        for _ in 0..k {
            cur = self.parent[cur.0]?;
        }
        Some(cur)
    }

    /// `Chi<n>(u) = { v : par^n(v) = u }` in id order.
    pub fn children_n(&self, u: VertexId, n: usize) -> Result<Vec<VertexId>> {
        self.check(u)?;
        let mut frontier = vec![u];
        for _ in 0..n {
            frontier = frontier
                .iter()
                .flat_map(|&w| self.children(w).iter().copied())
                .collect();
            if frontier.is_empty() {
                break;
            }
        }
        frontier.sort_unstable();
        Ok(frontier)
    }

    /// `Des(u)`: `u` and everything below it within the truncation, id order.
    pub fn descendants(&self, u: VertexId) -> Result<Vec<VertexId>> {
        self.check(u)?;
        let mut out = vec![u];
        let mut i = 0;
        while i < out.len() {
            let w = out[i];
            out.extend_from_slice(self.children(w));
            i += 1;
        }
        out.sort_unstable();
        Ok(out)
    }

    pub fn is_descendant(&self, u: VertexId, v: VertexId) -> bool {
        let (du, dv) = (self.depth[u.0], self.depth[v.0]);
        dv >= du && self.ancestor(v, dv - du) == Some(u)
    }

    /// Every maximal root-anchored chain. A chain is flagged as leaf-terminated
    /// when it stops above the boundary, or at the boundary of a finite tree.
    pub fn enumerate_paths(&self) -> Vec<PathSelector> {
        let mut paths = Vec::new();
        let mut stack = vec![vec![VertexId::ROOT]];
        while let Some(chain) = stack.pop() {
            let last = *chain.last().unwrap();
            let kids = self.children(last);
            if kids.is_empty() {
                let leaf_terminated = self.finite || self.depth(last) < self.max_depth();
                paths.push(PathSelector {
                    vertices: chain,
                    leaf_terminated,
                });
            } else {
                for &c in kids.iter().rev() {
                    let mut next = chain.clone();
                    next.push(c);
                    stack.push(next);
                }
            }
        }
        paths
    }
}

/// A root-anchored chain: `vertices[k]` is the selected vertex at depth `k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathSelector {
    pub vertices: Vec<VertexId>,
    pub leaf_terminated: bool,
}

impl PathSelector {
    /// Follows `choices[k]` (an index into the child list) at depth `k` until
    /// the choices run out or a childless vertex is reached.
    pub fn from_child_choices(tree: &DirectedTree, choices: &[usize]) -> Result<Self> {
        let mut vertices = vec![VertexId::ROOT];
        for (k, &i) in choices.iter().enumerate() {
            let cur = *vertices.last().unwrap();
            let kids = tree.children(cur);
            let next = kids.get(i).ok_or_else(|| {
                Error::InvalidPath(format!(
                    "vertex {} at depth {k} has {} children, choice {i} requested",
                    tree.display(cur),
                    kids.len()
                ))
            })?;
            vertices.push(*next);
        }
        let last = *vertices.last().unwrap();
        let leaf_terminated = tree.children(last).is_empty()
            && (tree.is_finite() || tree.depth(last) < tree.max_depth());
        Ok(Self {
            vertices,
            leaf_terminated,
        })
    }

    pub fn validate(&self, tree: &DirectedTree) -> Result<()> {
        match self.vertices.first() {
            Some(&VertexId::ROOT) => {}
            _ => return Err(Error::InvalidPath("path does not start at the root".into())),
        }
        for w in self.vertices.windows(2) {
            tree.check(w[1])?;
            if tree.parent(w[1]) != Some(w[0]) {
                return Err(Error::InvalidPath(format!(
                    "{} is not a child of {}",
                    tree.display(w[1]),
                    tree.display(w[0])
                )));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn end(&self) -> VertexId {
        *self.vertices.last().unwrap()
    }
}
