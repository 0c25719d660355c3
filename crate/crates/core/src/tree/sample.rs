//! Uniform random shapes of a given size, by the recursive method.
//!
//! The sampler keeps `c(n, h) * rho^n` in `f64` for every height and every
//! size up to its capacity, where `rho` sits just below the class's growth
//! constant so the scaled values stay near 1. Every term in the recurrence is
//! non-negative, so the table carries only rounding-level relative error;
//! entries below [`FLOOR`] are dropped, which removes configurations whose
//! probability is below that level.
//!
//! Sampling a shape with `m` nodes and height `h` picks one of the height
//! cases (balanced, left taller, right taller) and the left subtree size
//! with probability proportional to the product of the subtree counts, then
//! recurses.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::count::{max_height, row_span, split_range, Row};
use super::{AvlTree, Node, NodeId, TreeClass};
use crate::error::{Error, Result};
use crate::par::{self, Execution};

/// Default capacity ceiling; building a table costs O(n_max^2) flops.
pub const SAMPLER_LIMIT: usize = 200_000;

const FLOOR: f64 = 1e-150;

#[derive(Clone, Debug)]
pub struct Sampler {
    class: TreeClass,
    n_max: usize,
    /// `rows[h + 1]` holds height `h`, from height -1.
    rows: Vec<Row<f64>>,
}

/// One uniform shape with `n` nodes. Builds a table sized for `n`; reuse a
/// [`Sampler`] when drawing many trees.
pub fn sample_uniform(n: usize, seed: u64, class: TreeClass) -> Result<AvlTree> {
    Sampler::new(class, n)?.sample(n, seed)
}

impl Sampler {
    pub fn new(class: TreeClass, n_max: usize) -> Result<Self> {
        Self::build(class, n_max, Execution::default())
    }

    pub fn build(class: TreeClass, n_max: usize, exec: Execution) -> Result<Self> {
        if n_max == 0 {
            return Err(Error::format("sampler capacity must be at least 1"));
        }
        if n_max > SAMPLER_LIMIT {
            return Err(Error::Resource(format!("sampler capacity {n_max} exceeds the limit {SAMPLER_LIMIT}")));
        }
        let rho = tilt(class);
        let cross_weight = match class {
            TreeClass::Avl => 2.0,
            TreeClass::Llavl => 1.0,
        };
        let mut rows: Vec<Row<f64>> = vec![Row { start: 0, vals: vec![1.0] }];
        for h in 0..=max_height(n_max as u64) {
            let (lo, hi) = row_span(h, n_max).expect("height within range");
            let empty = Row { start: 0, vals: Vec::new() };
            let tall = &rows[h as usize];
            let short = if h == 0 { &empty } else { &rows[h as usize - 1] };
            let tall_rev: Vec<f64> = tall.vals.iter().rev().copied().collect();
            let short_rev: Vec<f64> = short.vals.iter().rev().copied().collect();
            let vals = par::map_range(lo..hi + 1, exec, |n| {
                let same = convolve_at(tall, tall, &tall_rev, n);
                let cross = convolve_at(tall, short, &short_rev, n);
                let v = rho * (same + cross_weight * cross);
                if v < FLOOR {
                    0.0
                } else {
                    v
                }
            });
            rows.push(trim(Row { start: lo, vals }));
        }
        Ok(Self { class, n_max, rows })
    }

    pub fn class(&self) -> TreeClass {
        self.class
    }

    pub fn capacity(&self) -> usize {
        self.n_max
    }

    /// Draws one shape with `n` nodes; deterministic in `seed`.
    pub fn sample(&self, n: usize, seed: u64) -> Result<AvlTree> {
        self.sample_with(n, &mut ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn sample_with<R: Rng>(&self, n: usize, rng: &mut R) -> Result<AvlTree> {
        if n == 0 {
            return Err(Error::format("trees have at least one node"));
        }
        if n > self.n_max {
            return Err(Error::Resource(format!("n = {n} exceeds the sampler capacity {}", self.n_max)));
        }
        let weights: Vec<f64> = (0..self.rows.len() - 1).map(|h| self.weight(n, h as i32)).collect();
        let h = pick(&weights, rng.gen::<f64>()) as i32;
        let mut nodes = Vec::with_capacity(n);
        self.grow(n, h, rng, &mut nodes);
        debug_assert_eq!(nodes.len(), n);
        Ok(AvlTree::from_preorder(nodes, self.class))
    }

    /// Probability of height `h` among shapes of size `n`, as the table sees it.
    pub fn height_distribution(&self, n: usize) -> Vec<f64> {
        let w: Vec<f64> = (0..self.rows.len() - 1).map(|h| self.weight(n, h as i32)).collect();
        let total: f64 = w.iter().sum();
        w.into_iter().map(|x| x / total).collect()
    }

    fn row(&self, h: i32) -> &Row<f64> {
        &self.rows[(h + 1) as usize]
    }

    fn weight(&self, n: usize, h: i32) -> f64 {
        self.row(h).get(n).copied().unwrap_or(0.0)
    }

    fn grow<R: Rng>(&self, m: usize, h: i32, rng: &mut R, nodes: &mut Vec<Node>) -> NodeId {
        let id = nodes.len();
        nodes.push(Node::default());
        if h == 0 {
            debug_assert_eq!(m, 1);
            return id as NodeId;
        }
        // (left height, right height) per case.
        let cases: &[(i32, i32)] = match self.class {
            TreeClass::Avl => &[(h - 1, h - 1), (h - 1, h - 2), (h - 2, h - 1)],
            TreeClass::Llavl => &[(h - 1, h - 1), (h - 1, h - 2)],
        };
        let case_weight = |&(hl, hr): &(i32, i32)| -> f64 {
            let (l, r) = (self.row(hl), self.row(hr));
            split_range(l, r, m).map(|i| l.get(i).unwrap() * r.get(m - 1 - i).unwrap()).sum()
        };
        let totals: Vec<f64> = cases.iter().map(case_weight).collect();
        let (hl, hr) = cases[pick(&totals, rng.gen::<f64>())];
        let (l, r) = (self.row(hl), self.row(hr));
        let range = split_range(l, r, m);
        let split: Vec<f64> = range.clone().map(|i| l.get(i).unwrap() * r.get(m - 1 - i).unwrap()).collect();
        let left_size = range.start + pick(&split, rng.gen::<f64>());
        let right_size = m - 1 - left_size;
        if left_size > 0 {
            let c = self.grow(left_size, hl, rng, nodes);
            nodes[id].left = Some(c);
        }
        if right_size > 0 {
            let c = self.grow(right_size, hr, rng, nodes);
            nodes[id].right = Some(c);
        }
        id as NodeId
    }
}

/// Slightly below the growth constant of each class.
fn tilt(class: TreeClass) -> f64 {
    match class {
        TreeClass::Avl => 0.5219,
        TreeClass::Llavl => 0.6741,
    }
}

/// Index drawn with probability proportional to `weights`, given `u` in [0, 1).
fn pick(weights: &[f64], u: f64) -> usize {
    let total: f64 = weights.iter().sum();
    debug_assert!(total > 0.0, "no configuration has positive weight");
    let mut target = u * total;
    let mut last_positive = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            if target < w {
                return i;
            }
            target -= w;
            last_positive = i;
        }
    }
    last_positive
}

/// `sum_i left[i] * right[n - 1 - i]`, with `right_rev` the reversed values
/// of `right` so the inner loop walks both slices forwards.
fn convolve_at(left: &Row<f64>, right: &Row<f64>, right_rev: &[f64], n: usize) -> f64 {
    let range = split_range(left, right, n);
    if range.is_empty() {
        return 0.0;
    }
    let m = n - 1;
    let a = &left.vals[range.start - left.start..range.end - left.start];
    // right size m - i sits at reversed index (right.end - 1) - (m - i).
    let rb = range.start + right.end() - 1 - m;
    dot(a, &right_rev[rb..rb + a.len()])
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0f64; 4];
    let ca = a.chunks_exact(4);
    let cb = b.chunks_exact(4);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for k in 0..4 {
            acc[k] += x[k] * y[k];
        }
    }
    let tail: f64 = ra.iter().zip(rb).map(|(x, y)| x * y).sum();
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

fn trim(row: Row<f64>) -> Row<f64> {
    let first = row.vals.iter().position(|&v| v > 0.0);
    let last = row.vals.iter().rposition(|&v| v > 0.0);
    match (first, last) {
        (Some(f), Some(l)) => Row { start: row.start + f, vals: row.vals[f..=l].to_vec() },
        _ => Row { start: row.start, vals: Vec::new() },
    }
}
