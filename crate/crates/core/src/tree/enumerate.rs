//! Exhaustive enumeration of balanced shapes in a canonical order.

use super::{AvlTree, TreeClass};
use crate::error::{Error, Result};

/// Default ceiling on `n` for [`enumerate_all`].
pub const EXHAUSTIVE_LIMIT: usize = 16;

pub fn enumerate_all(n: usize, class: TreeClass) -> Result<std::vec::IntoIter<AvlTree>> {
    enumerate_all_with_limit(n, class, EXHAUSTIVE_LIMIT)
}

/// Every valid shape with `n` nodes exactly once, ordered by height, then
/// left subtree size, then the left subtree's own order, then the right's.
pub fn enumerate_all_with_limit(
    n: usize,
    class: TreeClass,
    limit: usize,
) -> Result<std::vec::IntoIter<AvlTree>> {
    if n == 0 {
        return Err(Error::format("trees have at least one node"));
    }
    if n > limit {
        return Err(Error::Resource(format!("exhaustive enumeration of n = {n} exceeds the limit {limit}")));
    }
    let mut by_size = shapes_up_to(n, class);
    let trees = std::mem::take(&mut by_size[n]);
    Ok(trees.into_iter().map(|(t, _)| t).collect::<Vec<_>>().into_iter())
}

/// `by_size[m]` lists (tree, height) for every shape of size `m`; the empty
/// shape is represented by size 0 and height -1 and never materialised.
fn shapes_up_to(n: usize, class: TreeClass) -> Vec<Vec<(AvlTree, i32)>> {
    let mut by_size: Vec<Vec<(AvlTree, i32)>> = vec![Vec::new(); n + 1];
    for m in 1..=n {
        let mut found = Vec::new();
        let max_h = (m - 1) as i32;
        for h in 0..=max_h {
            for left_size in 0..m {
                let right_size = m - 1 - left_size;
                for (left, hl) in subtrees(&by_size, left_size) {
                    for (right, hr) in subtrees(&by_size, right_size) {
                        if hl.max(hr) + 1 != h || (hl - hr).abs() > 1 {
                            continue;
                        }
                        if class == TreeClass::Llavl && hr > hl {
                            continue;
                        }
                        found.push((AvlTree::join(left, right, class), h));
                    }
                }
            }
        }
        by_size[m] = found;
    }
    by_size
}

fn subtrees(by_size: &[Vec<(AvlTree, i32)>], size: usize) -> Vec<(Option<&AvlTree>, i32)> {
    if size == 0 {
        vec![(None, -1)]
    } else {
        by_size[size].iter().map(|(t, h)| (Some(t), *h)).collect()
    }
}
