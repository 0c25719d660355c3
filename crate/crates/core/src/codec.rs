//! Balance-symbol encoding of tree shapes.
//!
//! Every node of depth at least one contributes one symbol describing which
//! of its subtrees is taller, written in pre-order through the range coder.
//! Leaves cost nothing: the depth of every node follows from the height of
//! the tree and the symbols of its ancestors. Depth-1 nodes may use a model
//! skewed by the counters stored in the header; all other nodes use a
//! uniform model.
//!
//! Container layout (`.avlc`): the bytes `AVLC`, a version byte, a class
//! byte, the Elias-delta header fields packed MSB-first and padded to a byte
//! boundary, then the coder payload up to the end of the file.

use serde::Serialize;

use crate::bits::{elias_delta_len, BitReader, BitWriter};
use crate::coder::{RangeDecoder, RangeEncoder, SymbolModel, MAX_TOTAL};
use crate::error::{Error, Result};
use crate::tree::{compute_stats, max_nodes, min_nodes, AvlTree, Balance, Node, NodeId, TreeClass, TreeStats};

pub const MAGIC: &[u8; 4] = b"AVLC";
pub const VERSION: u8 = 1;

/// Counters stored ahead of the payload. Both sides derive the symbol models
/// from these alone.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Header {
    pub class: TreeClass,
    pub height: u32,
    pub n: u64,
    pub a: u64,
    pub b: u64,
    pub b2: u64,
}

impl Header {
    pub fn from_stats(class: TreeClass, s: &TreeStats) -> Self {
        Self { class, height: s.height, n: s.n, a: s.a, b: s.b(), b2: s.b2 }
    }

    pub fn b1(&self) -> u64 {
        self.b - self.b2
    }

    /// `alpha >= 0.4`, compared exactly.
    pub fn leaf_heavy(&self) -> bool {
        5 * self.a >= 2 * self.n
    }

    /// Checks that some tree of this class could carry these counters.
    pub fn check(&self) -> Result<()> {
        let fail = |what: &str| Err(Error::integrity(format!("header {what}: {self:?}")));
        if self.n == 0 || self.a == 0 {
            return fail("describes an empty tree");
        }
        if self.a > self.n || self.b2 > self.b || self.a.checked_add(self.b).is_none_or(|s| s > self.n) {
            return fail("counters exceed the node count");
        }
        let h = self.height as i32;
        if self.height > 90 || min_nodes(h) > self.n || max_nodes(h) < self.n {
            return fail("height is impossible for the node count");
        }
        Ok(())
    }

    /// Elias-delta coded size of the fields, in bits.
    pub fn bit_len(&self) -> usize {
        self.fields().iter().map(|&v| elias_delta_len(v)).sum()
    }

    // Zero-able fields are shifted by one, Elias-delta codes start at 1.
    fn fields(&self) -> [u64; 5] {
        [self.height as u64 + 1, self.n, self.a, self.b + 1, self.b2 + 1]
    }

    fn write(&self, w: &mut BitWriter) {
        for v in self.fields() {
            w.push_elias_delta(v);
        }
    }

    fn read(class: TreeClass, r: &mut BitReader<'_>) -> Result<Self> {
        let mut f = [0u64; 5];
        for v in &mut f {
            *v = r.read_elias_delta()?;
        }
        let height = u32::try_from(f[0] - 1).map_err(|_| Error::format("height field out of range"))?;
        Ok(Self { class, height, n: f[1], a: f[2], b: f[3] - 1, b2: f[4] - 1 })
    }
}

/// Symbol models selected from a header.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelPlan {
    class: TreeClass,
    upper: SymbolModel,
    depth1: SymbolModel,
}

impl ModelPlan {
    pub fn new(h: &Header) -> Self {
        let (upper, depth1) = match h.class {
            TreeClass::Avl => {
                let uniform = SymbolModel::uniform(3).unwrap();
                let depth1 = if h.leaf_heavy() {
                    uniform.clone()
                } else {
                    scaled_model(&[2 * h.b2 + 1, h.b1() + 1, h.b1() + 1])
                };
                (uniform, depth1)
            }
            TreeClass::Llavl => {
                let uniform = SymbolModel::uniform(2).unwrap();
                let depth1 = if h.leaf_heavy() { uniform.clone() } else { scaled_model(&[h.b2 + 1, h.b1() + 1]) };
                (uniform, depth1)
            }
        };
        Self { class: h.class, upper, depth1 }
    }

    pub fn model(&self, depth: u32) -> &SymbolModel {
        if depth == 1 {
            &self.depth1
        } else {
            &self.upper
        }
    }

    /// Whether depth-1 nodes use the uniform model.
    pub fn depth1_uniform(&self) -> bool {
        self.depth1 == self.upper
    }

    fn symbol(&self, b: Balance) -> Result<usize> {
        match (b, self.class) {
            (Balance::Balanced, _) => Ok(0),
            (Balance::Left, _) => Ok(1),
            (Balance::Right, TreeClass::Avl) => Ok(2),
            (Balance::Right, TreeClass::Llavl) => Err(Error::integrity("right-leaning node in a left-leaning tree")),
        }
    }

    fn balance(symbol: usize) -> Balance {
        match symbol {
            0 => Balance::Balanced,
            1 => Balance::Left,
            _ => Balance::Right,
        }
    }
}

/// Divides frequencies down until they fit the coder's precision budget,
/// keeping every frequency positive.
fn scaled_model(freqs: &[u64]) -> SymbolModel {
    let total: u64 = freqs.iter().sum();
    let k = total.div_ceil(MAX_TOTAL as u64 / 2).max(1);
    let scaled: Vec<u32> = freqs.iter().map(|&f| (f / k).max(1) as u32).collect();
    SymbolModel::new(&scaled).expect("scaled frequencies fit the model limits")
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Accounting {
    pub n: u64,
    /// Elias-delta header fields only; the 48-bit container prefix and the
    /// alignment padding are excluded.
    pub header_bits: u64,
    pub payload_bits: u64,
    /// Information content of the symbols under the models used.
    pub ideal_bits: f64,
    pub bits_per_node: f64,
    pub predicted_bound: f64,
}

impl Accounting {
    pub fn total_bits(&self) -> u64 {
        self.header_bits + self.payload_bits
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EncodedTree {
    pub header: Header,
    pub payload: Vec<u8>,
    pub accounting: Accounting,
}

impl EncodedTree {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = BitWriter::new();
        self.header.write(&mut w);
        w.align();
        let mut out = Vec::with_capacity(6 + w.len() / 8 + self.payload.len());
        out.extend_from_slice(MAGIC);
        out.push(VERSION);
        out.push(match self.header.class {
            TreeClass::Avl => 0,
            TreeClass::Llavl => 1,
        });
        out.extend_from_slice(w.finish().as_bytes());
        out.extend_from_slice(&self.payload);
        out
    }

    /// Parses a container. The accounting is recomputed from the header and
    /// the payload length; its ideal bit count is unknown and set to zero.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 6 || &bytes[..4] != MAGIC {
            return Err(Error::format("not an AVLC file"));
        }
        if bytes[4] != VERSION {
            return Err(Error::format(format!("unsupported AVLC version {}", bytes[4])));
        }
        let class = match bytes[5] {
            0 => TreeClass::Avl,
            1 => TreeClass::Llavl,
            c => return Err(Error::format(format!("unknown class byte {c}"))),
        };
        let mut r = BitReader::new(&bytes[6..]);
        let header = Header::read(class, &mut r)?;
        r.align();
        let payload = bytes[6 + r.position() / 8..].to_vec();
        let header_bits = header.bit_len() as u64;
        let payload_bits = payload.len() as u64 * 8;
        let accounting = Accounting {
            n: header.n,
            header_bits,
            payload_bits,
            ideal_bits: 0.0,
            bits_per_node: (header_bits + payload_bits) as f64 / header.n.max(1) as f64,
            predicted_bound: predicted_bound_for(&header),
        };
        Ok(Self { header, payload, accounting })
    }
}

pub fn encode(tree: &AvlTree) -> Result<EncodedTree> {
    tree.validate().map_err(Error::Balance)?;
    let stats = compute_stats(tree);
    let header = Header::from_stats(tree.class(), &stats);
    let plan = ModelPlan::new(&header);
    let heights = tree.heights();
    let mut enc = RangeEncoder::new();
    for (&h, b) in heights.iter().zip(tree.balances()) {
        if h >= 1 {
            enc.encode(plan.model(h as u32), plan.symbol(b)?);
        }
    }
    let ideal_bits = enc.ideal_bits();
    let payload = enc.finish();
    let header_bits = header.bit_len() as u64;
    let payload_bits = payload.len() as u64 * 8;
    let accounting = Accounting {
        n: stats.n,
        header_bits,
        payload_bits,
        ideal_bits,
        bits_per_node: (header_bits + payload_bits) as f64 / stats.n as f64,
        predicted_bound: predicted_bound(tree.class(), &stats),
    };
    Ok(EncodedTree { header, payload, accounting })
}

pub fn measure(tree: &AvlTree) -> Result<Accounting> {
    Ok(encode(tree)?.accounting)
}

pub fn decode(enc: &EncodedTree) -> Result<AvlTree> {
    decode_parts(&enc.header, &enc.payload)
}

pub fn decode_bytes(bytes: &[u8]) -> Result<AvlTree> {
    decode(&EncodedTree::from_bytes(bytes)?)
}

/// Rebuilds the tree in pre-order, propagating depths down from the height.
pub fn decode_parts(header: &Header, payload: &[u8]) -> Result<AvlTree> {
    header.check()?;
    let plan = ModelPlan::new(header);
    let n = header.n as usize;
    let mut dec = RangeDecoder::new(payload);
    let mut nodes: Vec<Node> = Vec::with_capacity(n.min(1 << 20));
    // (parent slot, depth)
    let mut stack: Vec<(Option<(NodeId, bool)>, i32)> = vec![(None, header.height as i32)];
    while let Some((parent, depth)) = stack.pop() {
        if nodes.len() == n {
            return Err(Error::integrity(format!("payload describes more than {n} nodes")));
        }
        let id = nodes.len() as NodeId;
        nodes.push(Node::default());
        if let Some((p, is_left)) = parent {
            let p = &mut nodes[p as usize];
            if is_left {
                p.left = Some(id);
            } else {
                p.right = Some(id);
            }
        }
        if depth == 0 {
            continue;
        }
        let symbol = dec.decode(plan.model(depth as u32))?;
        let (dl, dr) = match ModelPlan::balance(symbol) {
            Balance::Balanced => (depth - 1, depth - 1),
            Balance::Left => (depth - 1, depth - 2),
            Balance::Right => (depth - 2, depth - 1),
        };
        if dr >= 0 {
            stack.push((Some((id, false)), dr));
        }
        if dl >= 0 {
            stack.push((Some((id, true)), dl));
        }
    }
    if nodes.len() != n {
        return Err(Error::integrity(format!("payload describes {} nodes, header says {n}", nodes.len())));
    }
    let tree = AvlTree::from_preorder(nodes, header.class);
    let found = Header::from_stats(header.class, &compute_stats(&tree));
    if found != *header {
        return Err(Error::integrity(format!("decoded counters {found:?} disagree with header {header:?}")));
    }
    Ok(tree)
}

/// `x log2(1/x)` with the convention `0 log(1/0) = 0`.
fn xlog_inv(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * x.log2()
    }
}

/// Cost per depth-1 node under the skewed model with balanced share `beta2`.
pub fn depth1_cost(class: TreeClass, beta2: f64) -> f64 {
    match class {
        TreeClass::Avl => xlog_inv(beta2) + xlog_inv(1.0 - beta2) + (1.0 - beta2),
        TreeClass::Llavl => xlog_inv(beta2) + xlog_inv(1.0 - beta2),
    }
}

fn upper_cost(class: TreeClass) -> f64 {
    match class {
        TreeClass::Avl => 3f64.log2(),
        TreeClass::Llavl => 1.0,
    }
}

/// Analytic payload bound in bits for a tree with these counters.
pub fn predicted_bound(class: TreeClass, s: &TreeStats) -> f64 {
    predicted_bound_for(&Header::from_stats(class, s))
}

fn predicted_bound_for(h: &Header) -> f64 {
    let upper = upper_cost(h.class);
    let inner = (h.n - h.a) as f64;
    if h.leaf_heavy() || h.b == 0 {
        return inner * upper;
    }
    let x = depth1_cost(h.class, h.b2 as f64 / h.b as f64);
    h.b as f64 * x + (inner - h.b as f64) * upper
}

/// Worst case of the bound per node over leaf shares below 0.4, with the
/// fewest depth-1 nodes (`b = a/3`) and the largest balanced share the
/// leaf count allows. Returns `(alpha, bits per node)` at the maximum.
pub fn worst_case_rate(class: TreeClass) -> (f64, f64) {
    let upper = upper_cost(class);
    let rate = |alpha: f64| {
        let beta2 = ((3.0 * alpha - 1.0) / (1.0 - alpha)).clamp(0.0, 1.0);
        alpha * depth1_cost(class, beta2) / 3.0 + (1.0 - 4.0 * alpha / 3.0) * upper
    };
    // The rate is unimodal on [1/3, 0.4]; golden-section search.
    let (mut lo, mut hi) = (1.0 / 3.0, 0.4);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let m1 = hi - g * (hi - lo);
        let m2 = lo + g * (hi - lo);
        if rate(m1) < rate(m2) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    let alpha = (lo + hi) / 2.0;
    (alpha, rate(alpha).max(rate(0.4)))
}
