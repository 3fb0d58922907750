//! Binary trees on `1..=m` labeled in in-order.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::Permutation;
use crate::arith::{int, HCone, RationalVector};

/// Children are indexed by `label - 1`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BinaryTree {
    root: Option<usize>,
    left: Vec<Option<usize>>,
    right: Vec<Option<usize>>,
}

impl BinaryTree {
    pub fn len(&self) -> usize {
        self.left.len()
    }

    pub fn is_empty(&self) -> bool {
        self.root.is_none()
    }

    pub fn root(&self) -> Option<usize> {
        self.root
    }

    pub fn left(&self, label: usize) -> Option<usize> {
        self.left[label - 1]
    }

    pub fn right(&self, label: usize) -> Option<usize> {
        self.right[label - 1]
    }

    pub fn in_order(&self) -> Vec<usize> {
        fn walk(t: &BinaryTree, node: Option<usize>, out: &mut Vec<usize>) {
            if let Some(v) = node {
                walk(t, t.left(v), out);
                out.push(v);
                walk(t, t.right(v), out);
            }
        }
        let mut out = Vec::with_capacity(self.len());
        walk(self, self.root, &mut out);
        out
    }

    pub fn preorder(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.len());
        let mut stack: Vec<usize> = self.root.into_iter().collect();
        while let Some(v) = stack.pop() {
            out.push(v);
            stack.extend(self.right(v));
            stack.extend(self.left(v));
        }
        out
    }

    /// `(parent, child)` pairs in preorder of the child.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.preorder()
            .into_iter()
            .flat_map(|v| {
                self.left(v)
                    .into_iter()
                    .chain(self.right(v))
                    .map(move |c| (v, c))
            })
            .collect()
    }
}

/// Bracket form, e.g. `(1)2(3)` for the tree with root 2.
impl fmt::Display for BinaryTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn walk(t: &BinaryTree, v: usize, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            if let Some(l) = t.left(v) {
                write!(f, "(")?;
                walk(t, l, f)?;
                write!(f, ")")?;
            }
            write!(f, "{v}")?;
            if let Some(r) = t.right(v) {
                write!(f, "(")?;
                walk(t, r, f)?;
                write!(f, ")")?;
            }
            Ok(())
        }
        match self.root {
            Some(r) => walk(self, r, f),
            None => Ok(()),
        }
    }
}

/// Binary search tree obtained by inserting `pi_1, pi_2, ...` in order.
pub fn tree_of_permutation(pi: &Permutation) -> BinaryTree {
    let m = pi.len();
    let mut tree = BinaryTree {
        root: None,
        left: vec![None; m],
        right: vec![None; m],
    };
    for &a in pi.word() {
        let Some(mut node) = tree.root else {
            tree.root = Some(a);
            continue;
        };
        loop {
            let slot = if a < node {
                &mut tree.left[node - 1]
            } else {
                &mut tree.right[node - 1]
            };
            match *slot {
                Some(next) => node = next,
                None => {
                    *slot = Some(a);
                    break;
                }
            }
        }
    }
    tree
}

/// `{x : x_child >= x_parent for every edge}`, with the ranking point of the
/// preorder word as witness.
pub fn cone_of_tree(tree: &BinaryTree) -> HCone {
    let m = tree.len();
    let rows: Vec<RationalVector> = tree
        .edges()
        .into_iter()
        .map(|(parent, child)| {
            let mut row = vec![int(0); m];
            row[child - 1] = int(1);
            row[parent - 1] = int(-1);
            row
        })
        .collect();
    let witness = Permutation(tree.preorder()).ranking_point();
    HCone {
        dim: m,
        rows,
        witness: Some(witness),
    }
}
