//! Node classification and the counters that drive model selection.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::AvlTree;

/// Classification of a node by the height of its subtree (its depth).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NodeClass {
    /// A leaf.
    Depth0,
    /// Depth 1 with two leaf children.
    Depth1Balanced,
    /// Depth 1 with a single left leaf child.
    Depth1Left,
    /// Depth 1 with a single right leaf child.
    Depth1Right,
    /// Depth 2 with subtree heights 1 and 0.
    Depth2Unbalanced,
    /// Everything else.
    Upper,
}

/// Exact node counters of a tree.
///
/// `a` counts leaves, `b1`/`b2` unbalanced/balanced depth-1 nodes, `c`
/// unbalanced depth-2 nodes and `d` the remaining upper nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TreeStats {
    pub n: u64,
    pub height: u32,
    pub a: u64,
    pub b1: u64,
    pub b2: u64,
    pub c: u64,
    pub d: u64,
}

impl TreeStats {
    pub fn b(&self) -> u64 {
        self.b1 + self.b2
    }

    pub fn alpha(&self) -> Ratio<u64> {
        Ratio::new(self.a, self.n)
    }

    pub fn beta(&self) -> Ratio<u64> {
        Ratio::new(self.b(), self.n)
    }

    /// Share of balanced nodes among depth-1 nodes; `None` without any.
    pub fn beta2(&self) -> Option<Ratio<u64>> {
        (self.b() > 0).then(|| Ratio::new(self.b2, self.b()))
    }

    pub fn gamma(&self) -> Ratio<u64> {
        Ratio::new(self.c, self.n)
    }

    /// `alpha >= 0.4`, compared exactly as `5a >= 2n`.
    pub fn leaf_heavy(&self) -> bool {
        5 * self.a >= 2 * self.n
    }
}

pub fn classify(tree: &AvlTree) -> Vec<NodeClass> {
    let h = tree.heights();
    tree.nodes()
        .iter()
        .enumerate()
        .map(|(i, node)| {
            let hl = node.left.map_or(-1, |c| h[c as usize]);
            let hr = node.right.map_or(-1, |c| h[c as usize]);
            match (h[i], hl.cmp(&hr)) {
                (0, _) => NodeClass::Depth0,
                (1, std::cmp::Ordering::Equal) => NodeClass::Depth1Balanced,
                (1, std::cmp::Ordering::Greater) => NodeClass::Depth1Left,
                (1, std::cmp::Ordering::Less) => NodeClass::Depth1Right,
                (2, ord) if ord != std::cmp::Ordering::Equal => NodeClass::Depth2Unbalanced,
                _ => NodeClass::Upper,
            }
        })
        .collect()
}

pub fn compute_stats(tree: &AvlTree) -> TreeStats {
    let mut s = TreeStats { n: tree.len() as u64, height: tree.height() as u32, a: 0, b1: 0, b2: 0, c: 0, d: 0 };
    for class in classify(tree) {
        match class {
            NodeClass::Depth0 => s.a += 1,
            NodeClass::Depth1Balanced => s.b2 += 1,
            NodeClass::Depth1Left | NodeClass::Depth1Right => s.b1 += 1,
            NodeClass::Depth2Unbalanced => s.c += 1,
            NodeClass::Upper => s.d += 1,
        }
    }
    s
}
