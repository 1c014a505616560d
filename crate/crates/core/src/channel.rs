//! Binary-input discrete memoryless channels and the wiretap channel pair.
//!
//! Channels are dense finite-alphabet stochastic matrices: row = input bit,
//! column = output symbol index. The wiretap pair bundles the main channel
//! (Alice -> Bob, output Y), the eavesdropper channel (Alice -> Eve, output Z),
//! the input prior on V, and an optional channel-prefixing map P_{X|V}.

use crate::error::{Error, Result};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Tolerance for stochastic-row validation.
pub const ROW_SUM_TOL: f64 = 1e-12;

/// Output symbol index of the erasure in channels built by [`make_bec`].
pub const BEC_ERASURE: usize = 2;

/// A binary-input DMC as a 2 x K stochastic matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinaryInputDMC {
    transition: [Vec<f64>; 2],
}

impl BinaryInputDMC {
    pub fn new(row0: Vec<f64>, row1: Vec<f64>) -> Result<Self> {
        if row0.is_empty() || row0.len() != row1.len() {
            return Err(Error::InvalidParameter(format!(
                "transition rows must be non-empty and equal length, got {} and {}",
                row0.len(),
                row1.len()
            )));
        }
        for row in [&row0, &row1] {
            let mut sum = 0.0;
            for &p in row.iter() {
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::InvalidParameter(format!(
                        "transition probability {p} outside [0, 1]"
                    )));
                }
                sum += p;
            }
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::InvalidParameter(format!(
                    "transition row sums to {sum}, expected 1"
                )));
            }
        }
        Ok(Self {
            transition: [row0, row1],
        })
    }

    pub fn output_alphabet_size(&self) -> usize {
        self.transition[0].len()
    }

    /// P(output = symbol | input = bit).
    pub fn likelihood(&self, symbol: usize, input: u8) -> f64 {
        assert!(input <= 1, "input bit must be 0 or 1");
        assert!(
            symbol < self.output_alphabet_size(),
            "output symbol {symbol} out of range (K = {})",
            self.output_alphabet_size()
        );
        self.transition[input as usize][symbol]
    }

    pub fn row(&self, input: u8) -> &[f64] {
        &self.transition[input as usize]
    }

    /// Output marginal under P(V = 1) = prior_one.
    pub fn output_marginal(&self, prior_one: f64) -> Vec<f64> {
        let k = self.output_alphabet_size();
        (0..k)
            .map(|y| (1.0 - prior_one) * self.transition[0][y] + prior_one * self.transition[1][y])
            .collect()
    }

    /// I(V;Y) in bits for input prior P(V = 1) = prior_one.
    pub fn mutual_information(&self, prior_one: f64) -> f64 {
        let marg = self.output_marginal(prior_one);
        let mut mi = 0.0;
        for (v, pv) in [(0usize, 1.0 - prior_one), (1usize, prior_one)] {
            if pv == 0.0 {
                continue;
            }
            for (y, &m) in marg.iter().enumerate() {
                let w = self.transition[v][y];
                if w > 0.0 {
                    mi += pv * w * (w / m).log2();
                }
            }
        }
        mi
    }
}

/// BEC(epsilon) with output alphabet {0, 1, erasure}.
pub fn make_bec(epsilon: f64) -> Result<BinaryInputDMC> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::InvalidParameter(format!(
            "BEC erasure probability {epsilon} outside [0, 1]"
        )));
    }
    BinaryInputDMC::new(
        vec![1.0 - epsilon, 0.0, epsilon],
        vec![0.0, 1.0 - epsilon, epsilon],
    )
}

/// BSC(p) with crossover probability p in [0, 1/2].
pub fn make_bsc(p: f64) -> Result<BinaryInputDMC> {
    if !(0.0..=0.5).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "BSC crossover probability {p} outside [0, 1/2]"
        )));
    }
    BinaryInputDMC::new(vec![1.0 - p, p], vec![p, 1.0 - p])
}

/// The wiretap pair with input prior and optional channel prefixing V -> X.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WiretapSystem {
    pub prior_v: f64,
    /// Optional 2x2 stochastic prefix P_{X|V}; rows indexed by v.
    pub prefix: Option<[[f64; 2]; 2]>,
    pub main: BinaryInputDMC,
    pub eve: BinaryInputDMC,
}

impl WiretapSystem {
    pub fn new(
        prior_v: f64,
        prefix: Option<[[f64; 2]; 2]>,
        main: BinaryInputDMC,
        eve: BinaryInputDMC,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&prior_v) {
            return Err(Error::InvalidParameter(format!(
                "prior_v {prior_v} outside [0, 1]"
            )));
        }
        if let Some(p) = prefix {
            validate_prefix(&p)?;
        }
        Ok(Self {
            prior_v,
            prefix,
            main,
            eve,
        })
    }

    /// Effective channels over V: composes the prefix when present, otherwise
    /// returns clones of the declared channels.
    pub fn effective_channels(&self) -> (BinaryInputDMC, BinaryInputDMC) {
        match self.prefix {
            Some(_) => compose_prefix(self).expect("prefix validated at construction"),
            None => (self.main.clone(), self.eve.clone()),
        }
    }
}

fn validate_prefix(prefix: &[[f64; 2]; 2]) -> Result<()> {
    for row in prefix {
        let sum: f64 = row.iter().sum();
        if row.iter().any(|&p| !(0.0..=1.0).contains(&p)) || (sum - 1.0).abs() > ROW_SUM_TOL {
            return Err(Error::InvalidParameter(
                "prefix P_{X|V} is not a stochastic matrix".into(),
            ));
        }
    }
    Ok(())
}

/// Composes the prefix map into both channels: P'(y|v) = sum_x P_{X|V}(x|v) P(y|x).
pub fn compose_prefix(system: &WiretapSystem) -> Result<(BinaryInputDMC, BinaryInputDMC)> {
    let prefix = system
        .prefix
        .ok_or_else(|| Error::InvalidParameter("compose_prefix requires a prefix".into()))?;
    validate_prefix(&prefix)?;
    let compose = |ch: &BinaryInputDMC| -> Result<BinaryInputDMC> {
        let k = ch.output_alphabet_size();
        let mut rows = [vec![0.0; k], vec![0.0; k]];
        for v in 0..2 {
            for y in 0..k {
                rows[v][y] = prefix[v][0] * ch.likelihood(y, 0) + prefix[v][1] * ch.likelihood(y, 1);
            }
        }
        let [r0, r1] = rows;
        BinaryInputDMC::new(r0, r1)
    };
    Ok((compose(&system.main)?, compose(&system.eve)?))
}

/// One channel realization: inputs and the observed output symbol indices.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSample {
    pub input_bits: Vec<u8>,
    pub output_symbols: Vec<usize>,
}

/// Draws i.i.d. outputs, one per input bit, from the channel's rows.
pub fn sample_outputs<R: Rng>(
    channel: &BinaryInputDMC,
    inputs: &[u8],
    rng: &mut R,
) -> ChannelSample {
    let outputs = inputs
        .iter()
        .map(|&b| {
            let row = channel.row(b);
            let u: f64 = rng.gen();
            let mut acc = 0.0;
            for (y, &p) in row.iter().enumerate() {
                acc += p;
                if u < acc {
                    return y;
                }
            }
            row.len() - 1
        })
        .collect();
    ChannelSample {
        input_bits: inputs.to_vec(),
        output_symbols: outputs,
    }
}

/// Binary entropy in bits, with h2(0) = h2(1) = 0.
pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}
