//! Planar binary trees with level-ordered internal nodes.
//!
//! Node `k` (0-based) is created at level `k+1` by splitting the `n_k`-th
//! open edge, counted left to right. The preorder code is the Tamari
//! representative of the shape.

use std::fmt;

use crate::combinatorics::seq::{LevelSeq, TamariSeq};
use crate::error::{inconsistency, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Slot {
    Root,
    Left(usize),
    Right(usize),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Node {
    pub left: Option<usize>,
    pub right: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryTree {
    root: Option<usize>,
    nodes: Vec<Node>,
}

impl BinaryTree {
    pub fn from_level_seq(seq: &LevelSeq) -> BinaryTree {
        let mut nodes = vec![Node::default(); seq.len()];
        let mut root = None;
        let mut open = vec![Slot::Root];
        for (k, &n) in seq.entries().iter().enumerate() {
            let slot = open.remove(n - 1);
            match slot {
                Slot::Root => root = Some(k),
                Slot::Left(p) => nodes[p].left = Some(k),
                Slot::Right(p) => nodes[p].right = Some(k),
            }
            open.insert(n - 1, Slot::Right(k));
            open.insert(n - 1, Slot::Left(k));
        }
        BinaryTree { root, nodes }
    }

    pub fn from_tamari(seq: &TamariSeq) -> BinaryTree {
        Self::from_level_seq(&seq.as_level())
    }

    /// Left comb: every internal node is the left child of the previous one.
    pub fn left_comb(r: usize) -> BinaryTree {
        Self::from_level_seq(&LevelSeq::min(r))
    }

    pub fn internal_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn root(&self) -> Option<usize> {
        self.root
    }

    pub fn node(&self, k: usize) -> Node {
        self.nodes[k]
    }

    pub fn preorder(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack: Vec<usize> = self.root.into_iter().collect();
        while let Some(v) = stack.pop() {
            out.push(v);
            if let Some(r) = self.nodes[v].right {
                stack.push(r);
            }
            if let Some(l) = self.nodes[v].left {
                stack.push(l);
            }
        }
        out
    }

    /// Position codes obtained by growing the tree in the given node order.
    /// Errors when a node appears before its parent.
    pub fn encode(&self, order: &[usize]) -> Result<LevelSeq> {
        let mut parent: Vec<Option<Slot>> = vec![None; self.nodes.len()];
        if let Some(r) = self.root {
            parent[r] = Some(Slot::Root);
        }
        for (k, n) in self.nodes.iter().enumerate() {
            if let Some(l) = n.left {
                parent[l] = Some(Slot::Left(k));
            }
            if let Some(r) = n.right {
                parent[r] = Some(Slot::Right(k));
            }
        }
        let mut open = vec![Slot::Root];
        let mut code = Vec::with_capacity(order.len());
        for &k in order {
            let want = parent[k].ok_or_else(|| crate::Error::Inconsistency(format!("node {k} detached")))?;
            let Some(pos) = open.iter().position(|s| *s == want) else {
                return inconsistency(format!("node {k} placed before its parent"));
            };
            open.remove(pos);
            open.insert(pos, Slot::Right(k));
            open.insert(pos, Slot::Left(k));
            code.push(pos + 1);
        }
        LevelSeq::new(code)
    }

    /// Level code under the intrinsic node order.
    pub fn level_code(&self) -> Result<LevelSeq> {
        let order: Vec<usize> = (0..self.nodes.len()).collect();
        self.encode(&order)
    }

    pub fn tamari_code(&self) -> TamariSeq {
        let code = self.encode(&self.preorder()).expect("preorder respects parents");
        code.to_tamari().expect("preorder codes are nondecreasing")
    }

    pub fn same_shape(&self, other: &BinaryTree) -> bool {
        self.tamari_code() == other.tamari_code()
    }

    /// Number of leaves below each node.
    fn leaf_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.nodes.len()];
        for &v in self.preorder().iter().rev() {
            let n = self.nodes[v];
            counts[v] = n.left.map_or(1, |l| counts[l]) + n.right.map_or(1, |r| counts[r]);
        }
        counts
    }

    /// `(i, j, k)` for every node: its leaves are lines `i..k−1`, the right
    /// subtree starts at line `j`. Lines are numbered from 1.
    pub fn triples(&self) -> Vec<(usize, usize, usize)> {
        let counts = self.leaf_counts();
        let mut out = vec![(0, 0, 0); self.nodes.len()];
        let mut stack: Vec<(usize, usize)> = self.root.map(|r| (r, 1)).into_iter().collect();
        while let Some((v, first)) = stack.pop() {
            let n = self.nodes[v];
            let left = n.left.map_or(1, |l| counts[l]);
            out[v] = (first, first + left, first + counts[v]);
            if let Some(l) = n.left {
                stack.push((l, first));
            }
            if let Some(r) = n.right {
                stack.push((r, first + left));
            }
        }
        out
    }

    /// All trees one right rotation away, as `(pivot, result)`.
    pub fn right_rotations(&self) -> Vec<(usize, BinaryTree)> {
        let mut out = Vec::new();
        for v in 0..self.nodes.len() {
            if let Some(u) = self.nodes[v].left {
                let mut t = self.clone();
                let beta = t.nodes[u].right;
                t.nodes[v].left = beta;
                t.nodes[u].right = Some(v);
                t.replace_child(v, u);
                out.push((v, t));
            }
        }
        out
    }

    fn replace_child(&mut self, old: usize, new: usize) {
        if self.root == Some(old) {
            self.root = Some(new);
            return;
        }
        for n in &mut self.nodes {
            if n.left == Some(old) {
                n.left = Some(new);
                return;
            }
            if n.right == Some(old) {
                n.right = Some(new);
                return;
            }
        }
    }
}

impl fmt::Display for BinaryTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(t: &BinaryTree, v: Option<usize>, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match v {
                None => write!(f, "."),
                Some(k) => {
                    write!(f, "(")?;
                    go(t, t.nodes[k].left, f)?;
                    write!(f, " ")?;
                    go(t, t.nodes[k].right, f)?;
                    write!(f, ")")
                }
            }
        }
        go(self, self.root, f)
    }
}

/// Maps a level sequence to the Tamari code of its tree shape.
pub fn collapse(seq: &LevelSeq) -> TamariSeq {
    BinaryTree::from_level_seq(seq).tamari_code()
}
