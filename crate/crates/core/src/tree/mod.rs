//! Tree shapes and everything computed directly from them.
//!
//! An [`AvlTree`] is a binary tree shape stored as a pre-order arena: the
//! root is node 0, a node's left child (if any) immediately follows it, and
//! its right child follows the whole left subtree. Two shapes are equal
//! exactly when their arenas are equal.
//!
//! Shapes are not required to be balanced; level-order bitmaps and the text
//! format describe arbitrary binary trees. [`AvlTree::validate`] checks the
//! balance condition for the tree's [`TreeClass`].

mod bitmap;
mod count;
mod enumerate;
mod sample;
mod stats;
mod text;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use bitmap::{from_bitmap, read_lob, to_bitmap, write_lob, LevelOrderBitmap};
pub use count::{count_by_size_height, max_nodes, min_nodes, CountTable};
pub use enumerate::{enumerate_all, enumerate_all_with_limit, EXHAUSTIVE_LIMIT};
pub use sample::{sample_uniform, Sampler, SAMPLER_LIMIT};
pub use stats::{classify, compute_stats, NodeClass, TreeStats};
pub use text::{from_text, to_text};

pub type NodeId = u32;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Node {
    pub left: Option<NodeId>,
    pub right: Option<NodeId>,
}

impl Node {
    pub fn is_leaf(&self) -> bool {
        self.left.is_none() && self.right.is_none()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TreeClass {
    #[default]
    Avl,
    /// Left-leaning AVL: additionally, no node's right subtree is taller
    /// than its left subtree.
    Llavl,
}

impl TreeClass {
    pub fn as_str(self) -> &'static str {
        match self {
            TreeClass::Avl => "avl",
            TreeClass::Llavl => "llavl",
        }
    }
}

impl fmt::Display for TreeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for TreeClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "avl" => Ok(TreeClass::Avl),
            "llavl" => Ok(TreeClass::Llavl),
            other => Err(Error::format(format!("unknown tree class {other:?}"))),
        }
    }
}

/// Relative heights of a node's two subtrees.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Balance {
    Balanced,
    /// Left subtree one taller.
    Left,
    /// Right subtree one taller.
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BalanceRule {
    /// Subtree heights differ by more than one.
    HeightDifference,
    /// Right subtree taller than the left in a left-leaning tree.
    LeftLeaning,
}

/// The first node, in pre-order, that breaks the balance condition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Violation {
    pub node: NodeId,
    pub left_height: i32,
    pub right_height: i32,
    pub rule: BalanceRule,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match self.rule {
            BalanceRule::HeightDifference => "subtree heights differ by more than one",
            BalanceRule::LeftLeaning => "right subtree taller than left",
        };
        write!(
            f,
            "node {} (pre-order): {what} (left {}, right {})",
            self.node, self.left_height, self.right_height
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AvlTree {
    nodes: Vec<Node>,
    class: TreeClass,
}

impl AvlTree {
    pub fn single(class: TreeClass) -> Self {
        Self { nodes: vec![Node::default()], class }
    }

    /// A new root over copies of `left` and `right`. The class is `class`,
    /// regardless of the classes of the parts.
    pub fn join(left: Option<&AvlTree>, right: Option<&AvlTree>, class: TreeClass) -> Self {
        let ln = left.map_or(0, |t| t.len());
        let rn = right.map_or(0, |t| t.len());
        let mut nodes = Vec::with_capacity(1 + ln + rn);
        nodes.push(Node {
            left: left.map(|_| 1),
            right: right.map(|_| (1 + ln) as NodeId),
        });
        for (part, offset) in [(left, 1), (right, 1 + ln)] {
            if let Some(t) = part {
                let shift = |c: Option<NodeId>| c.map(|c| c + offset as NodeId);
                nodes.extend(t.nodes.iter().map(|n| Node { left: shift(n.left), right: shift(n.right) }));
            }
        }
        Self { nodes, class }
    }

    /// Builds a tree from arbitrary node records, checking that they form a
    /// single rooted binary tree, and relabels the nodes in pre-order.
    pub fn from_nodes(nodes: &[Node], root: NodeId, class: TreeClass) -> Result<Self> {
        let n = nodes.len();
        if n == 0 {
            return Err(Error::Structure("a tree has at least one node".into()));
        }
        if n > NodeId::MAX as usize {
            return Err(Error::Resource(format!("{n} nodes exceed the node id range")));
        }
        if root as usize >= n {
            return Err(Error::Structure(format!("root {root} out of range")));
        }
        let mut has_parent = vec![false; n];
        for (i, node) in nodes.iter().enumerate() {
            for c in [node.left, node.right].into_iter().flatten() {
                let c = c as usize;
                if c >= n {
                    return Err(Error::Structure(format!("node {i} points to missing node {c}")));
                }
                if has_parent[c] {
                    return Err(Error::Structure(format!("node {c} has more than one parent")));
                }
                if c == root as usize {
                    return Err(Error::Structure(format!("root {root} is the child of node {i}")));
                }
                has_parent[c] = true;
            }
        }
        // With one parent per non-root node, a cycle would leave nodes
        // unreachable from the root.
        let mut out = Vec::with_capacity(n);
        let mut stack = vec![(root, None::<(usize, bool)>)];
        while let Some((id, parent)) = stack.pop() {
            let new_id = out.len();
            out.push(Node::default());
            if let Some((p, is_left)) = parent {
                let slot: &mut Node = &mut out[p];
                if is_left {
                    slot.left = Some(new_id as NodeId);
                } else {
                    slot.right = Some(new_id as NodeId);
                }
            }
            let node = nodes[id as usize];
            if let Some(r) = node.right {
                stack.push((r, Some((new_id, false))));
            }
            if let Some(l) = node.left {
                stack.push((l, Some((new_id, true))));
            }
        }
        if out.len() != n {
            return Err(Error::Structure(format!(
                "{} of {n} nodes are not reachable from the root",
                n - out.len()
            )));
        }
        Ok(Self { nodes: out, class })
    }

    /// Caller guarantees `nodes` is a pre-order arena.
    pub(crate) fn from_preorder(nodes: Vec<Node>, class: TreeClass) -> Self {
        debug_assert!(!nodes.is_empty());
        Self { nodes, class }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> Node {
        self.nodes[id as usize]
    }

    pub fn root(&self) -> NodeId {
        0
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    /// Always false; a tree has at least one node.
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn class(&self) -> TreeClass {
        self.class
    }

    pub fn with_class(mut self, class: TreeClass) -> Self {
        self.class = class;
        self
    }

    /// Height of every subtree, indexed by node id. Leaves have height 0.
    pub fn heights(&self) -> Vec<i32> {
        let mut h = vec![0i32; self.nodes.len()];
        // Children follow their parent in pre-order.
        for i in (0..self.nodes.len()).rev() {
            let n = self.nodes[i];
            let hl = n.left.map_or(-1, |c| h[c as usize]);
            let hr = n.right.map_or(-1, |c| h[c as usize]);
            h[i] = 1 + hl.max(hr);
        }
        h
    }

    pub fn height(&self) -> i32 {
        self.heights()[0]
    }

    /// Parent of every node; `None` for the root.
    pub fn parents(&self) -> Vec<Option<NodeId>> {
        let mut p = vec![None; self.nodes.len()];
        for (i, n) in self.nodes.iter().enumerate() {
            for c in [n.left, n.right].into_iter().flatten() {
                p[c as usize] = Some(i as NodeId);
            }
        }
        p
    }

    pub fn validate(&self) -> std::result::Result<(), Violation> {
        let h = self.heights();
        for (i, n) in self.nodes.iter().enumerate() {
            let hl = n.left.map_or(-1, |c| h[c as usize]);
            let hr = n.right.map_or(-1, |c| h[c as usize]);
            let rule = if (hl - hr).abs() > 1 {
                Some(BalanceRule::HeightDifference)
            } else if self.class == TreeClass::Llavl && hr > hl {
                Some(BalanceRule::LeftLeaning)
            } else {
                None
            };
            if let Some(rule) = rule {
                return Err(Violation { node: i as NodeId, left_height: hl, right_height: hr, rule });
            }
        }
        Ok(())
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_ok()
    }

    /// Returns the tree if it satisfies its class's balance condition.
    pub fn validated(self) -> Result<Self> {
        self.validate().map_err(Error::Balance)?;
        Ok(self)
    }

    /// Balance symbol of every node, from its children's heights.
    pub fn balances(&self) -> Vec<Balance> {
        let h = self.heights();
        self.nodes
            .iter()
            .map(|n| {
                let hl = n.left.map_or(-1, |c| h[c as usize]);
                let hr = n.right.map_or(-1, |c| h[c as usize]);
                match hl.cmp(&hr) {
                    std::cmp::Ordering::Equal => Balance::Balanced,
                    std::cmp::Ordering::Greater => Balance::Left,
                    std::cmp::Ordering::Less => Balance::Right,
                }
            })
            .collect()
    }

    /// Standard AVL height ceiling, 1.4405 log2(n + 2) - 0.3277.
    pub fn height_ceiling(n: usize) -> f64 {
        1.4405 * ((n + 2) as f64).log2() - 0.3277
    }
}

impl fmt::Display for AvlTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&to_text(self))
    }
}
