//! The polar transform and exact successive-cancellation posteriors with
//! non-uniform input priors.
//!
//! The transform is x = u * G^{tensor k} over GF(2) in natural order, no
//! bit-reversal permutation. The SC engine computes exact posteriors
//! P(U_i | u^{i-1}, Y^n) (and P(U_i | u^{i-1}) when no channel is attached)
//! by the two-branch recursion; per-level rescaling keeps the weights in
//! range at large n.

use crate::channel::{BinaryInputDMC, ChannelSample};
use crate::error::{Error, Result};

/// Block-length parameters: n = 2^k.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PolarParams {
    pub k: u32,
    pub n: usize,
}

impl PolarParams {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || !n.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "block length {n} is not a power of two"
            )));
        }
        Ok(Self {
            k: n.trailing_zeros(),
            n,
        })
    }
}

/// x -> x * G^{tensor k} over GF(2). Self-inverse.
pub fn polar_transform(x: &[u8]) -> Vec<u8> {
    assert!(
        !x.is_empty() && x.len().is_power_of_two(),
        "polar_transform requires a power-of-two length, got {}",
        x.len()
    );
    let mut out = x.to_vec();
    transform_in_place(&mut out);
    out
}

fn transform_in_place(bits: &mut [u8]) {
    let n = bits.len();
    // G^{tensor k} = [[G', 0], [G', G']]: first half <- (a xor b) G', second <- b G'.
    let mut size = n;
    while size > 1 {
        let half = size / 2;
        for chunk in bits.chunks_mut(size) {
            for j in 0..half {
                chunk[j] ^= chunk[j + half];
            }
        }
        size = half;
    }
}

/// Posterior of the next undecided bit under successive cancellation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScPosterior {
    pub index: usize,
    pub p0: f64,
    pub p1: f64,
}

impl ScPosterior {
    /// Hard decision; ties break toward 0.
    pub fn argmax(&self) -> u8 {
        if self.p1 > self.p0 {
            1
        } else {
            0
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Node {
    /// Bits committed in this node's own u-domain.
    pos: usize,
    /// Decided first bit of the current pair, valid when pos is odd.
    pending: u8,
    /// Unnormalized weights of this node's next undecided bit.
    cur0: f64,
    cur1: f64,
}

/// Exact SC recursion over a block, consumed bit by bit.
///
/// Node (level l, branch t) covers leaf positions j with j mod 2^l == t; its
/// children are (l+1, t) over the even sub-sequence and (l+1, t + 2^l) over
/// the odd one. This matches the natural-order transform: the pair
/// (u_{2r}, u_{2r+1}) feeds (u_{2r} ^ u_{2r+1}) to child 0 and u_{2r+1} to
/// child 1.
#[derive(Debug, Clone)]
pub struct ScEngine {
    k: u32,
    n: usize,
    nodes: Vec<Node>,
    decided: usize,
}

impl ScEngine {
    /// Builds an engine from per-leaf weights over the x-domain bit:
    /// leaf j carries (w(x_j = 0), w(x_j = 1)).
    pub fn from_leaf_weights(leaves: &[(f64, f64)]) -> Result<Self> {
        let params = PolarParams::new(leaves.len())?;
        let n = params.n;
        let mut nodes = vec![
            Node {
                pos: 0,
                pending: 0,
                cur0: 0.0,
                cur1: 0.0,
            };
            2 * n - 1
        ];
        for (t, &(w0, w1)) in leaves.iter().enumerate() {
            let idx = n - 1 + t;
            let (c0, c1) = rescale(w0, w1);
            nodes[idx].cur0 = c0;
            nodes[idx].cur1 = c1;
        }
        let mut engine = Self {
            k: params.k,
            n,
            nodes,
            decided: 0,
        };
        // Initialize internal nodes bottom-up with the pair-sum combine.
        for l in (0..params.k).rev() {
            for t in 0..(1usize << l) {
                engine.refresh_even(l, t);
            }
        }
        Ok(engine)
    }

    /// Source-only engine: leaf weight is the input prior, no observations.
    pub fn for_source(prior_one: f64, n: usize) -> Result<Self> {
        Self::from_leaf_weights(&vec![(1.0 - prior_one, prior_one); n])
    }

    /// Channel engine: leaf j carries prior(b) * P(y_j | b).
    pub fn for_channel(
        prior_one: f64,
        channel: &BinaryInputDMC,
        outputs: &ChannelSample,
    ) -> Result<Self> {
        let leaves: Vec<(f64, f64)> = outputs
            .output_symbols
            .iter()
            .map(|&y| {
                (
                    (1.0 - prior_one) * channel.likelihood(y, 0),
                    prior_one * channel.likelihood(y, 1),
                )
            })
            .collect();
        Self::from_leaf_weights(&leaves)
    }

    pub fn block_length(&self) -> usize {
        self.n
    }

    pub fn decided(&self) -> usize {
        self.decided
    }

    /// Posterior of the next undecided bit given all committed bits.
    pub fn next_posterior(&self) -> ScPosterior {
        assert!(self.decided < self.n, "all bits already decided");
        let root = &self.nodes[0];
        let sum = root.cur0 + root.cur1;
        let (p0, p1) = if sum > 0.0 {
            (root.cur0 / sum, root.cur1 / sum)
        } else {
            (0.5, 0.5)
        };
        ScPosterior {
            index: self.decided,
            p0,
            p1,
        }
    }

    /// Commits the next bit and propagates the decision down the tree.
    pub fn commit(&mut self, bit: u8) {
        assert!(self.decided < self.n, "all bits already decided");
        self.commit_node(0, 0, bit);
        self.decided += 1;
    }

    fn node_index(&self, l: u32, t: usize) -> usize {
        ((1usize << l) - 1) + t
    }

    fn commit_node(&mut self, l: u32, t: usize, bit: u8) {
        let idx = self.node_index(l, t);
        if l == self.k {
            self.nodes[idx].pos = 1;
            return;
        }
        let size = self.n >> l;
        let pos = self.nodes[idx].pos;
        if pos % 2 == 0 {
            self.nodes[idx].pending = bit;
            self.nodes[idx].pos = pos + 1;
            self.refresh_odd(l, t);
        } else {
            let a = self.nodes[idx].pending;
            self.commit_node(l + 1, t, a ^ bit);
            self.commit_node(l + 1, t + (1 << l), bit);
            self.nodes[idx].pos = pos + 1;
            if pos + 1 < size {
                self.refresh_even(l, t);
            }
        }
    }

    fn child_weights(&self, l: u32, t: usize) -> ((f64, f64), (f64, f64)) {
        let c0 = &self.nodes[self.node_index(l + 1, t)];
        let c1 = &self.nodes[self.node_index(l + 1, t + (1 << l))];
        ((c0.cur0, c0.cur1), (c1.cur0, c1.cur1))
    }

    /// w(a) = sum_b W0(a ^ b) W1(b), next pair not yet started.
    fn refresh_even(&mut self, l: u32, t: usize) {
        let ((x0, x1), (y0, y1)) = self.child_weights(l, t);
        let (w0, w1) = rescale(x0 * y0 + x1 * y1, x1 * y0 + x0 * y1);
        let idx = self.node_index(l, t);
        self.nodes[idx].cur0 = w0;
        self.nodes[idx].cur1 = w1;
    }

    /// w(b) = W0(a ^ b) W1(b), with a = pending first bit of the pair.
    fn refresh_odd(&mut self, l: u32, t: usize) {
        let ((x0, x1), (y0, y1)) = self.child_weights(l, t);
        let idx = self.node_index(l, t);
        let a = self.nodes[idx].pending;
        let c0 = [x0, x1];
        let (w0, w1) = rescale(c0[a as usize] * y0, c0[(a ^ 1) as usize] * y1);
        self.nodes[idx].cur0 = w0;
        self.nodes[idx].cur1 = w1;
    }

    /// Runs the engine along a known u-vector, returning the posterior seen
    /// at each index just before that bit was committed.
    pub fn run_with_prefix(mut self, u: &[u8]) -> Vec<ScPosterior> {
        assert_eq!(u.len(), self.n);
        let mut out = Vec::with_capacity(self.n);
        for &bit in u {
            out.push(self.next_posterior());
            self.commit(bit);
        }
        out
    }
}

fn rescale(w0: f64, w1: f64) -> (f64, f64) {
    let m = w0.max(w1);
    if m > 0.0 {
        (w0 / m, w1 / m)
    } else {
        (w0, w1)
    }
}

/// One-shot posterior of the next bit after a decided prefix.
///
/// With `channel`/`outputs` absent this computes P(U_i | u^{i-1}), the
/// quantity behind the deterministic-frozen fill map.
pub fn sc_posteriors(
    prior_one: f64,
    channel: Option<&BinaryInputDMC>,
    outputs: Option<&ChannelSample>,
    n: usize,
    decided_prefix: &[u8],
) -> Result<ScPosterior> {
    let mut engine = match (channel, outputs) {
        (Some(ch), Some(obs)) => {
            if obs.output_symbols.len() != n {
                return Err(Error::Mismatch(format!(
                    "outputs length {} != block length {n}",
                    obs.output_symbols.len()
                )));
            }
            ScEngine::for_channel(prior_one, ch, obs)?
        }
        (None, None) => ScEngine::for_source(prior_one, n)?,
        _ => {
            return Err(Error::Mismatch(
                "channel and outputs must be both present or both absent".into(),
            ))
        }
    };
    if decided_prefix.len() >= engine.block_length() {
        return Err(Error::Mismatch(format!(
            "prefix length {} leaves no undecided bit in block of {}",
            decided_prefix.len(),
            engine.block_length()
        )));
    }
    for &b in decided_prefix {
        engine.commit(b);
    }
    Ok(engine.next_posterior())
}

/// Exact joint law of (U^n, Y^n) for tiny n, used as an oracle.
///
/// u is packed with u_0 as the most significant bit; y is the base-K integer
/// with y_0 most significant.
#[derive(Debug, Clone)]
pub struct JointTable {
    pub n: usize,
    pub k_out: usize,
    /// p[u * K^n + y]
    pub p: Vec<f64>,
    /// u-marginal
    pub p_u: Vec<f64>,
}

/// Default entry budget for exact enumeration tables.
pub const DEFAULT_TABLE_BUDGET: u128 = 1 << 26;

pub fn build_joint_table(
    prior_one: f64,
    channel: &BinaryInputDMC,
    n: usize,
    budget: u128,
) -> Result<JointTable> {
    PolarParams::new(n)?;
    if n > 8 {
        return Err(Error::BudgetExceeded {
            required: n as u128,
            budget: 8,
        });
    }
    let k_out = channel.output_alphabet_size();
    let y_card = (k_out as u128).pow(n as u32);
    let required = (1u128 << n) * y_card;
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    let y_card = y_card as usize;
    let mut p = vec![0.0; (1 << n) * y_card];
    let mut p_u = vec![0.0; 1 << n];
    let prior = [1.0 - prior_one, prior_one];
    for u in 0..(1usize << n) {
        let u_bits: Vec<u8> = (0..n).map(|j| ((u >> (n - 1 - j)) & 1) as u8).collect();
        let v_bits = polar_transform(&u_bits);
        let pu: f64 = v_bits.iter().map(|&v| prior[v as usize]).product();
        p_u[u] = pu;
        if pu == 0.0 {
            continue;
        }
        for y in 0..y_card {
            let mut py = 1.0;
            let mut rem = y;
            // y_0 is the most significant base-K digit
            for j in (0..n).rev() {
                let sym = rem % k_out;
                rem /= k_out;
                py *= channel.likelihood(sym, v_bits[j]);
                if py == 0.0 {
                    break;
                }
            }
            p[u * y_card + y] = pu * py;
        }
    }
    Ok(JointTable {
        n,
        k_out,
        p,
        p_u,
    })
}

impl JointTable {
    fn y_card(&self) -> usize {
        self.k_out.pow(self.n as u32)
    }

    pub fn entry(&self, u: usize, y: usize) -> f64 {
        self.p[u * self.y_card() + y]
    }

    /// Z(U_i | U^{i-1}) by direct enumeration, i zero-based.
    pub fn z_source(&self, i: usize) -> f64 {
        let n = self.n;
        let mut acc = vec![0.0; 1 << (i + 1)];
        for (u, &pu) in self.p_u.iter().enumerate() {
            acc[u >> (n - 1 - i)] += pu;
        }
        let mut z = 0.0;
        for prefix in 0..(1usize << i) {
            z += (acc[prefix << 1] * acc[(prefix << 1) | 1]).sqrt();
        }
        (2.0 * z).min(1.0)
    }

    /// Z(U_i | U^{i-1}, Y^n) by direct enumeration, i zero-based.
    pub fn z_given_y(&self, i: usize) -> f64 {
        let n = self.n;
        let y_card = self.y_card();
        let mut acc = vec![0.0; (1 << (i + 1)) * y_card];
        for u in 0..(1usize << n) {
            let key = u >> (n - 1 - i);
            let base = u * y_card;
            let dst = key * y_card;
            for y in 0..y_card {
                acc[dst + y] += self.p[base + y];
            }
        }
        let mut z = 0.0;
        for prefix in 0..(1usize << i) {
            let b0 = (prefix << 1) * y_card;
            let b1 = ((prefix << 1) | 1) * y_card;
            for y in 0..y_card {
                z += (acc[b0 + y] * acc[b1 + y]).sqrt();
            }
        }
        (2.0 * z).min(1.0)
    }

    /// Bayes posterior of U_i given an explicit prefix and output vector.
    pub fn posterior_next(&self, prefix: &[u8], y_syms: &[usize]) -> (f64, f64) {
        let n = self.n;
        let i = prefix.len();
        assert!(i < n && y_syms.len() == n);
        let mut y = 0usize;
        for &s in y_syms {
            y = y * self.k_out + s;
        }
        let mut w = [0.0f64; 2];
        for u in 0..(1usize << n) {
            let mut matches = true;
            for (j, &b) in prefix.iter().enumerate() {
                if ((u >> (n - 1 - j)) & 1) as u8 != b {
                    matches = false;
                    break;
                }
            }
            if matches {
                w[(u >> (n - 1 - i)) & 1] += self.entry(u, y);
            }
        }
        let sum = w[0] + w[1];
        if sum > 0.0 {
            (w[0] / sum, w[1] / sum)
        } else {
            (0.5, 0.5)
        }
    }

    pub fn total_mass(&self) -> f64 {
        self.p.iter().sum()
    }
}
