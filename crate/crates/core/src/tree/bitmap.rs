//! Level-order bitmaps of extended binary trees, and the `.lob` container.
//!
//! Every missing child is replaced by an external node; a level-order walk of
//! the result writes 1 for each original node and 0 for each external one,
//! giving exactly `2n + 1` bits. With positions numbered from 1, the children
//! of the node at position `x` sit at `2 * rank(x)` and `2 * rank(x) + 1`,
//! where `rank(x)` counts the ones in positions `1..=x`.

use std::collections::VecDeque;

use super::{AvlTree, Node, NodeId, TreeClass};
use crate::bits::{BitWriter, Bits};
use crate::error::{Error, Result};

pub fn to_bitmap(tree: &AvlTree) -> Bits {
    let mut w = BitWriter::new();
    let mut queue = VecDeque::from([Some(tree.root())]);
    while let Some(slot) = queue.pop_front() {
        match slot {
            Some(id) => {
                w.push(true);
                let n = tree.node(id);
                queue.push_back(n.left);
                queue.push_back(n.right);
            }
            None => w.push(false),
        }
    }
    w.finish()
}

/// Rebuilds a tree from its level-order bitmap. With `check_balance`, the
/// shape must also satisfy the balance condition of `class`.
pub fn from_bitmap(bits: &Bits, class: TreeClass, check_balance: bool) -> Result<AvlTree> {
    let len = bits.len();
    if len == 0 || len.is_multiple_of(2) {
        return Err(Error::format(format!("bitmap length {len} is not of the form 2n + 1")));
    }
    if !bits.get(0) {
        return Err(Error::format("bitmap describes the empty tree"));
    }
    let n = (len - 1) / 2;
    if bits.count_ones() != n {
        return Err(Error::format(format!("bitmap of length {len} must hold exactly {n} ones")));
    }
    // node id of each 1-position, in level order
    let mut node_at = vec![None::<NodeId>; len + 1];
    let mut nodes: Vec<Node> = Vec::with_capacity(n);
    let mut rank = 0usize;
    for x in 1..=len {
        if !bits.get(x - 1) {
            continue;
        }
        rank += 1;
        let id = match node_at[x] {
            Some(id) => id,
            None if x == 1 => {
                nodes.push(Node::default());
                0
            }
            None => return Err(Error::format(format!("position {x} is not the child of any node"))),
        };
        let (l, r) = (2 * rank, 2 * rank + 1);
        if l <= x {
            return Err(Error::format(format!("position {x}: children would precede their parent")));
        }
        debug_assert!(r <= len);
        for (pos, is_left) in [(l, true), (r, false)] {
            if bits.get(pos - 1) {
                let child = nodes.len() as NodeId;
                nodes.push(Node::default());
                node_at[pos] = Some(child);
                let parent = &mut nodes[id as usize];
                if is_left {
                    parent.left = Some(child);
                } else {
                    parent.right = Some(child);
                }
            }
        }
    }
    let tree = AvlTree::from_nodes(&nodes, 0, class)?;
    if check_balance {
        tree.validated()
    } else {
        Ok(tree)
    }
}

/// Read-only navigation over a level-order bitmap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelOrderBitmap {
    bits: Bits,
}

impl LevelOrderBitmap {
    pub fn new(tree: &AvlTree) -> Self {
        Self { bits: to_bitmap(tree) }
    }

    pub fn bits(&self) -> &Bits {
        &self.bits
    }

    pub fn node_count(&self) -> usize {
        (self.bits.len() - 1) / 2
    }

    /// Whether 1-based position `x` holds an original node.
    pub fn is_node(&self, x: usize) -> bool {
        x >= 1 && x <= self.bits.len() && self.bits.get(x - 1)
    }

    /// Positions of the left and right child slots of the node at `x`.
    pub fn children(&self, x: usize) -> Option<(usize, usize)> {
        self.is_node(x).then(|| {
            let r = self.bits.rank1(x);
            (2 * r, 2 * r + 1)
        })
    }
}

/// `.lob` layout: node count as little-endian u64, then the bitmap packed
/// MSB-first.
pub fn write_lob(tree: &AvlTree) -> Vec<u8> {
    let bits = to_bitmap(tree);
    let mut out = Vec::with_capacity(8 + bits.as_bytes().len());
    out.extend_from_slice(&(tree.len() as u64).to_le_bytes());
    out.extend_from_slice(bits.as_bytes());
    out
}

pub fn read_lob(bytes: &[u8], class: TreeClass, check_balance: bool) -> Result<AvlTree> {
    let header: [u8; 8] = bytes
        .get(..8)
        .and_then(|h| h.try_into().ok())
        .ok_or_else(|| Error::format("lob file shorter than its 8-byte header"))?;
    let n = u64::from_le_bytes(header);
    let len = n
        .checked_mul(2)
        .and_then(|v| v.checked_add(1))
        .filter(|&v| v <= (u32::MAX as u64) * 2)
        .ok_or_else(|| Error::format(format!("node count {n} out of range")))? as usize;
    let body = bytes[8..].to_vec();
    let bits = Bits::from_bytes(body, len)?;
    from_bitmap(&bits, class, check_balance)
}
