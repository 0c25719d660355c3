//! Exact counts of shapes by size and height.
//!
//! `c(n, h)` satisfies
//!
//! ```text
//! c(n, h) = sum over i + j = n - 1 of
//!           c(i, h-1) c(j, h-1) + c(i, h-1) c(j, h-2) [+ c(i, h-2) c(j, h-1)]
//! ```
//!
//! where the bracketed term (right subtree taller) is dropped for left-leaning
//! trees and `c(0, -1) = 1` stands for the empty subtree.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::TreeClass;
use crate::error::{Error, Result};
use crate::par::{self, Execution};

/// Minimum node count of a balanced tree of height `h`: N(h) = N(h-1) +
/// N(h-2) + 1, N(-1) = 0, N(0) = 1.
pub fn min_nodes(h: i32) -> u64 {
    let (mut prev, mut cur) = (0u64, 1u64);
    if h < 0 {
        return 0;
    }
    for _ in 0..h {
        let next = cur.saturating_add(prev).saturating_add(1);
        prev = cur;
        cur = next;
    }
    cur
}

/// Maximum node count of a binary tree of height `h`.
pub fn max_nodes(h: i32) -> u64 {
    if h < 0 {
        0
    } else if h >= 63 {
        u64::MAX
    } else {
        (1u64 << (h + 1)) - 1
    }
}

/// Largest height possible for a balanced tree with `n` nodes.
pub(crate) fn max_height(n: u64) -> i32 {
    let mut h = 0;
    while min_nodes(h + 1) <= n {
        h += 1;
    }
    h
}

/// Dense slice of one height's counts over sizes `start..start + vals.len()`.
#[derive(Clone, Debug)]
pub(crate) struct Row<T> {
    pub start: usize,
    pub vals: Vec<T>,
}

impl<T> Row<T> {
    pub fn end(&self) -> usize {
        self.start + self.vals.len()
    }

    pub fn get(&self, n: usize) -> Option<&T> {
        n.checked_sub(self.start).and_then(|i| self.vals.get(i))
    }
}

/// Sizes (lo, hi) inclusive that height `h >= 0` can occupy, capped at `n_max`.
pub(crate) fn row_span(h: i32, n_max: usize) -> Option<(usize, usize)> {
    let lo = min_nodes(h) as usize;
    let hi = max_nodes(h).min(n_max as u64) as usize;
    (lo <= hi).then_some((lo, hi))
}

/// For each `n` in `lo..=hi`, the ranges of left sizes `i` for which both
/// `left.get(i)` and `right.get(n - 1 - i)` can be non-zero.
pub(crate) fn split_range<A, B>(left: &Row<A>, right: &Row<B>, n: usize) -> std::ops::Range<usize> {
    if n == 0 || left.vals.is_empty() || right.vals.is_empty() {
        return 0..0;
    }
    let m = n - 1;
    // i in [left.start, left.end) and m - i in [right.start, right.end)
    let lo = left.start.max((m + 1).saturating_sub(right.end()));
    let hi = left.end().min(if m >= right.start { m - right.start + 1 } else { 0 });
    lo..hi.max(lo)
}

#[derive(Clone, Debug)]
pub struct CountTable {
    class: TreeClass,
    n_max: usize,
    /// `rows[h + 1]` holds height `h`, starting at height -1.
    rows: Vec<Row<BigUint>>,
}

/// Exact `c(n, h)` for all `n <= n_max`.
pub fn count_by_size_height(n_max: usize, class: TreeClass) -> Result<CountTable> {
    CountTable::build(n_max, class, Execution::default())
}

impl CountTable {
    /// Ceiling on `n_max`; the table costs O(n_max^2) big-integer products.
    pub const LIMIT: usize = 10_000;

    pub fn build(n_max: usize, class: TreeClass, exec: Execution) -> Result<Self> {
        Self::build_to_height(n_max, i32::MAX, class, exec)
    }

    /// Rows for heights up to `h_cap` only. [`CountTable::total`] then
    /// misses taller shapes, but every row that is present is exact.
    pub fn build_to_height(n_max: usize, h_cap: i32, class: TreeClass, exec: Execution) -> Result<Self> {
        if n_max == 0 {
            return Err(Error::format("n_max must be at least 1"));
        }
        if n_max > Self::LIMIT {
            return Err(Error::Resource(format!("exact counts up to {n_max} exceed the limit {}", Self::LIMIT)));
        }
        let h_max = max_height(n_max as u64).min(h_cap);
        let mut rows: Vec<Row<BigUint>> = vec![Row { start: 0, vals: vec![BigUint::one()] }];
        for h in 0..=h_max {
            let (lo, hi) = row_span(h, n_max).expect("height within range");
            let empty = Row { start: 0, vals: Vec::new() };
            let tall = &rows[h as usize];
            let short = if h == 0 { &empty } else { &rows[h as usize - 1] };
            let vals = par::map_range(lo..hi + 1, exec, |n| {
                let mut sum = BigUint::zero();
                for i in split_range(tall, tall, n) {
                    sum += tall.get(i).unwrap() * tall.get(n - 1 - i).unwrap();
                }
                let mut cross = BigUint::zero();
                for i in split_range(tall, short, n) {
                    cross += tall.get(i).unwrap() * short.get(n - 1 - i).unwrap();
                }
                if class == TreeClass::Avl {
                    // The right-taller term equals the left-taller one by symmetry.
                    cross <<= 1;
                }
                sum + cross
            });
            rows.push(Row { start: lo, vals });
        }
        Ok(Self { class, n_max, rows })
    }

    pub fn class(&self) -> TreeClass {
        self.class
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Largest height with a row in the table.
    pub fn max_height(&self) -> i32 {
        self.rows.len() as i32 - 2
    }

    /// `c(n, h)`; zero outside the table.
    pub fn get(&self, n: usize, h: i32) -> BigUint {
        self.row(h).and_then(|r| r.get(n)).cloned().unwrap_or_default()
    }

    /// Total number of shapes with `n` nodes.
    pub fn total(&self, n: usize) -> BigUint {
        (0..=self.max_height()).map(|h| self.get(n, h)).sum()
    }

    /// Counting polynomial of height `h`: coefficient `n` is `c(n, h)`.
    pub fn height_polynomial(&self, h: i32) -> Vec<BigUint> {
        match self.row(h) {
            None => Vec::new(),
            Some(r) => {
                let mut v = vec![BigUint::zero(); r.start];
                v.extend(r.vals.iter().cloned());
                while v.last().is_some_and(|c| c.is_zero()) {
                    v.pop();
                }
                v
            }
        }
    }

    fn row(&self, h: i32) -> Option<&Row<BigUint>> {
        if h < -1 {
            None
        } else {
            self.rows.get((h + 1) as usize)
        }
    }
}
