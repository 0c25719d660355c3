//! Parenthesised text form: `tree := "." | "(" tree tree ")"`.
//!
//! `.` is an empty subtree, so a single node is `(..)`. Whitespace is
//! ignored when parsing and never emitted.

use super::{AvlTree, Node, NodeId, TreeClass};
use crate::error::{Error, Result};

pub fn to_text(tree: &AvlTree) -> String {
    let mut out = String::with_capacity(3 * tree.len() + 1);
    enum Step {
        Open(Option<NodeId>),
        Close,
    }
    let mut stack = vec![Step::Open(Some(tree.root()))];
    while let Some(step) = stack.pop() {
        match step {
            Step::Open(None) => out.push('.'),
            Step::Open(Some(id)) => {
                let n = tree.node(id);
                out.push('(');
                stack.push(Step::Close);
                stack.push(Step::Open(n.right));
                stack.push(Step::Open(n.left));
            }
            Step::Close => out.push(')'),
        }
    }
    out
}

/// Parses the shape only; call [`AvlTree::validated`] to enforce balance.
pub fn from_text(s: &str, class: TreeClass) -> Result<AvlTree> {
    let mut nodes: Vec<Node> = Vec::new();
    // (node, number of children slots already filled)
    let mut stack: Vec<(usize, u8)> = Vec::new();
    let mut done = false;
    for (pos, c) in s.char_indices().filter(|(_, c)| !c.is_whitespace()) {
        let err = |msg: &str| Error::format(format!("tree text, offset {pos}: {msg}"));
        if done {
            return Err(err("trailing characters after the tree"));
        }
        match c {
            '(' => {
                let id = nodes.len();
                if id >= NodeId::MAX as usize {
                    return Err(Error::Resource("too many nodes".into()));
                }
                nodes.push(Node::default());
                if let Some((parent, slot)) = stack.last_mut() {
                    let p = &mut nodes[*parent];
                    match slot {
                        0 => p.left = Some(id as NodeId),
                        1 => p.right = Some(id as NodeId),
                        _ => return Err(err("node has more than two children")),
                    }
                    *slot += 1;
                }
                stack.push((id, 0));
            }
            '.' => match stack.last_mut() {
                Some((_, slot)) if *slot < 2 => *slot += 1,
                Some(_) => return Err(err("node has more than two children")),
                None => return Err(err("the empty tree is not a valid tree")),
            },
            ')' => match stack.pop() {
                Some((_, 2)) => done = stack.is_empty(),
                Some(_) => return Err(err("node closed before both children were given")),
                None => return Err(err("unbalanced ')'")),
            },
            other => return Err(err(&format!("unexpected character {other:?}"))),
        }
    }
    if !done {
        return Err(Error::format("tree text ended before the tree was complete"));
    }
    Ok(AvlTree::from_preorder(nodes, class))
}
