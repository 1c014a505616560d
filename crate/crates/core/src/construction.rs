//! Reliability profiles, index partitioning, and the m-block chain schedule.
//!
//! Profiles carry the per-index Bhattacharyya triples (source, Bob, Eve)
//! computed by one of three methods: the exact erasure recursion (BEC,
//! uniform prior), full enumeration (tiny n), or Monte Carlo estimation
//! along true SC paths.

use crate::channel::{BinaryInputDMC, WiretapSystem};
use crate::error::{Error, Result};
use crate::polar::{build_joint_table, polar_transform, PolarParams, ScEngine, DEFAULT_TABLE_BUDGET};
use crate::{analysis::TheoreticalRates, channel::sample_outputs};
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdMode {
    /// Threshold sets at delta_n = 2^{-n^beta}, the definitional semantics.
    DeltaN,
    /// Rank-cutoff sets sized to hit a requested secret rate; usable at
    /// desk-scale n where delta_n thresholds empty out S.
    RateTarget,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstructionParams {
    pub mode: ThresholdMode,
    /// beta in (0, 1/2); delta_n = 2^{-n^beta}.
    pub beta: f64,
    /// Requested |S|/n in rate_target mode.
    pub target_secret_rate: f64,
    /// z cutoff separating "good" indices in rate_target mode.
    pub reliability_threshold: f64,
    pub mc_samples: usize,
}

/// delta_n = 2^{-n^beta}.
pub fn delta_n(n: usize, beta: f64) -> f64 {
    2f64.powf(-(n as f64).powf(beta))
}

impl ConstructionParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta < 0.5) {
            return Err(Error::InvalidParameter(format!(
                "beta {} outside (0, 1/2)",
                self.beta
            )));
        }
        if self.mc_samples == 0 {
            return Err(Error::InvalidParameter("mc_samples must be >= 1".into()));
        }
        if !(self.target_secret_rate > 0.0 && self.target_secret_rate < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "target_secret_rate {} outside (0, 1)",
                self.target_secret_rate
            )));
        }
        if !(self.reliability_threshold > 0.0 && self.reliability_threshold < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "reliability_threshold {} outside (0, 1)",
                self.reliability_threshold
            )));
        }
        Ok(())
    }
}

impl Default for ConstructionParams {
    fn default() -> Self {
        Self {
            mode: ThresholdMode::DeltaN,
            beta: 0.3,
            target_secret_rate: 0.15,
            reliability_threshold: 1e-4,
            mc_samples: 10_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileMethod {
    ExactBec,
    MonteCarlo,
    BruteForce,
    ExactSc,
}

/// Per-index Bhattacharyya triples: Z(U_i|U^{i-1}), Z(U_i|U^{i-1},Y^n),
/// Z(U_i|U^{i-1},Z^n).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityProfile {
    pub n: usize,
    pub method: ProfileMethod,
    pub z_source: Vec<f64>,
    pub z_bob: Vec<f64>,
    pub z_eve: Vec<f64>,
    /// Standard errors per index (Monte Carlo only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stderr: Option<ProfileStderr>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileStderr {
    pub z_source: Vec<f64>,
    pub z_bob: Vec<f64>,
    pub z_eve: Vec<f64>,
}

/// Z(T|V) = 2 sum_v P(v) sqrt(P(0|v) P(1|v)) from an explicit joint
/// distribution: joint[v] = (P(T=0, V=v), P(T=1, V=v)).
pub fn bhattacharyya_from_joint(joint: &[(f64, f64)]) -> Result<f64> {
    let mut z = 0.0;
    let mut mass = 0.0;
    for &(p0, p1) in joint {
        if p0 < 0.0 || p1 < 0.0 {
            return Err(Error::InvalidParameter(
                "joint distribution has negative entries".into(),
            ));
        }
        mass += p0 + p1;
        // Zero-probability v contributes 0: 2 sqrt(P(0,v) P(1,v)) already does.
        z += 2.0 * (p0 * p1).sqrt();
    }
    if (mass - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "joint distribution mass {mass} != 1"
        )));
    }
    Ok(z.min(1.0))
}

fn bec_epsilon(ch: &BinaryInputDMC) -> Option<f64> {
    if ch.output_alphabet_size() != 3 {
        return None;
    }
    let eps = ch.likelihood(2, 0);
    let ok = (ch.likelihood(2, 1) - eps).abs() < 1e-15
        && (ch.likelihood(0, 0) - (1.0 - eps)).abs() < 1e-15
        && ch.likelihood(1, 0) == 0.0
        && ch.likelihood(0, 1) == 0.0
        && (ch.likelihood(1, 1) - (1.0 - eps)).abs() < 1e-15;
    ok.then_some(eps)
}

/// Synthetic-channel erasure probability for index i: apply the erasure
/// recursion along the bits of i from most to least significant, minus
/// branch (2e - e^2) for 0, plus branch (e^2) for 1. For the BEC under a
/// uniform prior this equals Z exactly.
pub fn bec_synthetic_z(epsilon: f64, n: usize, index: usize) -> f64 {
    let k = n.trailing_zeros();
    let mut z = epsilon;
    for b in (0..k).rev() {
        z = if (index >> b) & 1 == 1 {
            z * z
        } else {
            2.0 * z - z * z
        };
    }
    z
}

/// Exact profile via the erasure recursion. Requires a uniform prior, no
/// prefix, and both channels BEC.
pub fn profile_exact_bec(system: &WiretapSystem, n: usize) -> Result<ReliabilityProfile> {
    PolarParams::new(n)?;
    if system.prior_v != 0.5 || system.prefix.is_some() {
        return Err(Error::InvalidParameter(
            "profile_exact_bec requires a uniform prior and no prefix".into(),
        ));
    }
    let (main, eve) = system.effective_channels();
    let eps_y = bec_epsilon(&main)
        .ok_or_else(|| Error::InvalidParameter("main channel is not a BEC".into()))?;
    let eps_z = bec_epsilon(&eve)
        .ok_or_else(|| Error::InvalidParameter("eavesdropper channel is not a BEC".into()))?;
    Ok(ReliabilityProfile {
        n,
        method: ProfileMethod::ExactBec,
        z_source: vec![1.0; n],
        z_bob: (0..n).map(|i| bec_synthetic_z(eps_y, n, i)).collect(),
        z_eve: (0..n).map(|i| bec_synthetic_z(eps_z, n, i)).collect(),
        stderr: None,
    })
}

/// Exact profile by full enumeration of the joint tables; n <= 8.
pub fn profile_brute_force(
    system: &WiretapSystem,
    n: usize,
    budget: u128,
) -> Result<ReliabilityProfile> {
    let (main, eve) = system.effective_channels();
    let bob_table = build_joint_table(system.prior_v, &main, n, budget)?;
    let eve_table = build_joint_table(system.prior_v, &eve, n, budget)?;
    Ok(ReliabilityProfile {
        n,
        method: ProfileMethod::BruteForce,
        z_source: (0..n).map(|i| bob_table.z_source(i)).collect(),
        z_bob: (0..n).map(|i| bob_table.z_given_y(i)).collect(),
        z_eve: (0..n).map(|i| eve_table.z_given_y(i)).collect(),
        stderr: None,
    })
}

/// Exact profile by enumerating outputs and prefix paths through the SC
/// recursion: Z_i = sum_y P(y) sum_{u^{i-1}} P(u^{i-1}|y) 2 sqrt(p0 p1).
/// Algebraically independent of the joint-table marginalization route.
pub fn profile_exact_sc(system: &WiretapSystem, n: usize, budget: u128) -> Result<ReliabilityProfile> {
    PolarParams::new(n)?;
    if n > 8 {
        return Err(Error::BudgetExceeded {
            required: n as u128,
            budget: 8,
        });
    }
    let (main, eve) = system.effective_channels();
    let prior = system.prior_v;
    let z_source = sc_enumerate_source(prior, n);
    let z_bob = sc_enumerate_channel(prior, &main, n, budget)?;
    let z_eve = sc_enumerate_channel(prior, &eve, n, budget)?;
    Ok(ReliabilityProfile {
        n,
        method: ProfileMethod::ExactSc,
        z_source,
        z_bob,
        z_eve,
        stderr: None,
    })
}

fn sc_walk(engine: ScEngine, weight: f64, acc: &mut [f64]) {
    if weight == 0.0 {
        return;
    }
    let i = engine.decided();
    let post = engine.next_posterior();
    acc[i] += weight * 2.0 * (post.p0 * post.p1).sqrt();
    if i + 1 == engine.block_length() {
        return;
    }
    if post.p0 > 0.0 {
        let mut e = engine.clone();
        e.commit(0);
        sc_walk(e, weight * post.p0, acc);
    }
    if post.p1 > 0.0 {
        let mut e = engine;
        e.commit(1);
        sc_walk(e, weight * post.p1, acc);
    }
}

fn sc_enumerate_source(prior: f64, n: usize) -> Vec<f64> {
    let mut acc = vec![0.0; n];
    let engine = ScEngine::for_source(prior, n).expect("n validated");
    sc_walk(engine, 1.0, &mut acc);
    acc.iter().map(|z| z.min(1.0)).collect()
}

fn sc_enumerate_channel(
    prior: f64,
    channel: &BinaryInputDMC,
    n: usize,
    budget: u128,
) -> Result<Vec<f64>> {
    let k_out = channel.output_alphabet_size();
    let y_card = (k_out as u128).pow(n as u32);
    let required = y_card * (1u128 << n);
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    let marg = channel.output_marginal(prior);
    let mut acc = vec![0.0; n];
    let mut syms = vec![0usize; n];
    loop {
        // P(y^n) factorizes over positions since V is i.i.d.
        let py: f64 = syms.iter().map(|&s| marg[s]).product();
        if py > 0.0 {
            let obs = crate::channel::ChannelSample {
                input_bits: vec![0; n],
                output_symbols: syms.clone(),
            };
            let engine = ScEngine::for_channel(prior, channel, &obs)?;
            sc_walk(engine, py, &mut acc);
        }
        // next output vector
        let mut j = n;
        while j > 0 {
            j -= 1;
            syms[j] += 1;
            if syms[j] < k_out {
                break;
            }
            syms[j] = 0;
            if j == 0 {
                return Ok(acc.iter().map(|z| z.min(1.0)).collect());
            }
        }
    }
}

/// Monte Carlo profile: averages the per-index statistic 2 sqrt(p0 p1) over
/// sampled (v^n, y^n, z^n) triples, running SC along the true u-path.
pub fn profile_monte_carlo<R: Rng>(
    system: &WiretapSystem,
    n: usize,
    params: &ConstructionParams,
    rng: &mut R,
) -> Result<ReliabilityProfile> {
    PolarParams::new(n)?;
    params.validate()?;
    let (main, eve) = system.effective_channels();
    let prior = system.prior_v;
    let samples = params.mc_samples;
    let mut sums = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    let mut sq_sums = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    for _ in 0..samples {
        let v: Vec<u8> = (0..n)
            .map(|_| u8::from(rng.gen::<f64>() < prior))
            .collect();
        let u = polar_transform(&v);
        let y = sample_outputs(&main, &v, rng);
        let z = sample_outputs(&eve, &v, rng);
        let engines = [
            ScEngine::for_source(prior, n)?,
            ScEngine::for_channel(prior, &main, &y)?,
            ScEngine::for_channel(prior, &eve, &z)?,
        ];
        for (which, engine) in engines.into_iter().enumerate() {
            for (i, post) in engine.run_with_prefix(&u).into_iter().enumerate() {
                let stat = 2.0 * (post.p0 * post.p1).sqrt();
                sums[which][i] += stat;
                sq_sums[which][i] += stat * stat;
            }
        }
    }
    let m = samples as f64;
    let finish = |sum: &[f64]| -> Vec<f64> { sum.iter().map(|s| (s / m).min(1.0)).collect() };
    let se = |sum: &[f64], sq: &[f64]| -> Vec<f64> {
        sum.iter()
            .zip(sq)
            .map(|(&s, &q)| {
                let mean = s / m;
                let var = (q / m - mean * mean).max(0.0);
                (var / m).sqrt()
            })
            .collect()
    };
    Ok(ReliabilityProfile {
        n,
        method: ProfileMethod::MonteCarlo,
        z_source: finish(&sums[0]),
        z_bob: finish(&sums[1]),
        z_eve: finish(&sums[2]),
        stderr: Some(ProfileStderr {
            z_source: se(&sums[0], &sq_sums[0]),
            z_bob: se(&sums[1], &sq_sums[1]),
            z_eve: se(&sums[2], &sq_sums[2]),
        }),
    })
}

/// The paper's index sets plus the chaining choice C and the secret set S.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexPartition {
    pub n: usize,
    pub h_v: Vec<usize>,
    pub l_v: Vec<usize>,
    pub l_vy: Vec<usize>,
    pub l_vz: Vec<usize>,
    /// G_{Y and Z}: good for both decoders.
    pub g_and: Vec<usize>,
    /// G_{Y \ Z}: good for Bob only.
    pub g_bob: Vec<usize>,
    /// G_{Z \ Y}: good for Eve only.
    pub g_eve: Vec<usize>,
    /// B_{Y and Z}: bad for both (or source-determined).
    pub b_and: Vec<usize>,
    /// Deterministic frozen set = complement of H_V.
    pub f_d: Vec<usize>,
    /// Chained subset of g_bob, |c_chain| = |g_eve|.
    pub c_chain: Vec<usize>,
    /// Secret set: g_bob \ c_chain.
    pub s: Vec<usize>,
}

impl IndexPartition {
    pub fn i_y(&self) -> Vec<usize> {
        sorted_union(&self.g_and, &self.g_bob)
    }

    pub fn i_z(&self) -> Vec<usize> {
        sorted_union(&self.g_and, &self.g_eve)
    }

    /// F_r^Y = H_V \ L_{V|Y}.
    pub fn f_r_y(&self) -> Vec<usize> {
        sorted_difference(&self.h_v, &self.l_vy)
    }

    /// F_r^Z = H_V \ L_{V|Z}.
    pub fn f_r_z(&self) -> Vec<usize> {
        sorted_difference(&self.h_v, &self.l_vz)
    }

    /// Checks the set-algebra invariants.
    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        let mut cover = vec![0u8; n];
        for set in [&self.g_and, &self.g_bob, &self.g_eve, &self.b_and] {
            for &i in set.iter() {
                if i >= n {
                    return Err(Error::Mismatch(format!("index {i} out of range")));
                }
                cover[i] += 1;
            }
        }
        if cover.iter().any(|&c| c != 1) {
            return Err(Error::Mismatch(
                "G/B sets do not partition [n]".into(),
            ));
        }
        if self.c_chain.len() != self.g_eve.len() {
            return Err(Error::Mismatch("|C_chain| != |G_eve|".into()));
        }
        if !is_subset(&self.c_chain, &self.g_bob) {
            return Err(Error::Mismatch("C_chain not a subset of G_bob".into()));
        }
        let expected_s = sorted_difference(&self.g_bob, &self.c_chain);
        if expected_s != self.s {
            return Err(Error::Mismatch("S != G_bob \\ C_chain".into()));
        }
        let fd_expected: Vec<usize> = (0..n).filter(|i| !self.h_v.contains(i)).collect();
        if fd_expected != self.f_d {
            return Err(Error::Mismatch("F_d != complement of H_V".into()));
        }
        if self.g_eve.iter().any(|i| self.f_d.contains(i)) {
            return Err(Error::Mismatch("G_eve intersects F_d".into()));
        }
        Ok(())
    }
}

fn sorted_union(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = a.iter().chain(b).copied().collect();
    out.sort_unstable();
    out.dedup();
    out
}

fn sorted_difference(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().filter(|i| !b.contains(i)).copied().collect()
}

fn is_subset(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|i| b.contains(i))
}

/// Picks C_{Y\Z} as the |G_eve| indices of G_bob with the largest z_eve
/// (most confusing to Eve), ties toward the smaller index.
fn choose_chain_set(g_bob: &[usize], g_eve_len: usize, z_eve: &[f64]) -> Vec<usize> {
    let mut ranked: Vec<usize> = g_bob.to_vec();
    ranked.sort_by(|&a, &b| {
        z_eve[b]
            .partial_cmp(&z_eve[a])
            .unwrap()
            .then(a.cmp(&b))
    });
    let mut chain: Vec<usize> = ranked.into_iter().take(g_eve_len).collect();
    chain.sort_unstable();
    chain
}

/// Partitions [n] into the paper's sets from a reliability profile.
pub fn partition_indices(
    profile: &ReliabilityProfile,
    params: &ConstructionParams,
) -> Result<IndexPartition> {
    params.validate()?;
    let n = profile.n;
    if profile.z_source.len() != n || profile.z_bob.len() != n || profile.z_eve.len() != n {
        return Err(Error::Mismatch("profile vector lengths disagree".into()));
    }
    let (h_v, l_v, l_vy, l_vz) = match params.mode {
        ThresholdMode::DeltaN => {
            let delta = delta_n(n, params.beta);
            let h_v: Vec<usize> = (0..n).filter(|&i| profile.z_source[i] >= 1.0 - delta).collect();
            let l_v: Vec<usize> = (0..n).filter(|&i| profile.z_source[i] <= delta).collect();
            let l_vy: Vec<usize> = (0..n).filter(|&i| profile.z_bob[i] <= delta).collect();
            let l_vz: Vec<usize> = (0..n).filter(|&i| profile.z_eve[i] <= delta).collect();
            (h_v, l_v, l_vy, l_vz)
        }
        ThresholdMode::RateTarget => {
            // Rank-mode analogue: H_V splits at 1/2, good sets at the
            // reliability threshold; S is then trimmed to the target size.
            let h_v: Vec<usize> = (0..n).filter(|&i| profile.z_source[i] >= 0.5).collect();
            let l_v: Vec<usize> = (0..n).filter(|&i| profile.z_source[i] < 0.5).collect();
            let theta = params.reliability_threshold;
            let l_vy: Vec<usize> = (0..n).filter(|&i| profile.z_bob[i] <= theta).collect();
            let l_vz: Vec<usize> = (0..n).filter(|&i| profile.z_eve[i] <= theta).collect();
            (h_v, l_v, l_vy, l_vz)
        }
    };
    let in_set = |set: &[usize], i: usize| set.binary_search(&i).is_ok();
    let mut g_and = Vec::new();
    let mut g_bob = Vec::new();
    let mut g_eve = Vec::new();
    let mut b_and = Vec::new();
    for i in 0..n {
        let h = in_set(&h_v, i);
        let ly = in_set(&l_vy, i);
        let lz = in_set(&l_vz, i);
        match (h, ly, lz) {
            (true, true, true) => g_and.push(i),
            (true, true, false) => g_bob.push(i),
            (true, false, true) => g_eve.push(i),
            _ => b_and.push(i),
        }
    }
    if g_bob.len() <= g_eve.len() {
        return Err(Error::NonPositiveSecrecy {
            g_bob: g_bob.len(),
            g_eve: g_eve.len(),
        });
    }
    let c_chain = choose_chain_set(&g_bob, g_eve.len(), &profile.z_eve);
    let mut s = sorted_difference(&g_bob, &c_chain);
    let mut l_vy = l_vy;
    if params.mode == ThresholdMode::RateTarget {
        let target = ((params.target_secret_rate * n as f64).round() as usize).max(1);
        if s.len() < target {
            return Err(Error::InvalidParameter(format!(
                "target secret rate unattainable: |S| = {} < target {target}",
                s.len()
            )));
        }
        // Keep the most Bob-reliable indices; demote the rest to the frozen
        // side (they leave L_{V|Y} so the set algebra stays consistent).
        let mut ranked = s.clone();
        ranked.sort_by(|&a, &b| {
            profile.z_bob[a]
                .partial_cmp(&profile.z_bob[b])
                .unwrap()
                .then(a.cmp(&b))
        });
        let demoted: Vec<usize> = ranked.split_off(target);
        ranked.sort_unstable();
        s = ranked;
        for i in demoted {
            let pos = g_bob.iter().position(|&j| j == i).unwrap();
            g_bob.remove(pos);
            b_and.push(i);
            let pos = l_vy.iter().position(|&j| j == i).unwrap();
            l_vy.remove(pos);
        }
        b_and.sort_unstable();
    }
    let f_d: Vec<usize> = (0..n).filter(|i| !in_set(&h_v, *i)).collect();
    let partition = IndexPartition {
        n,
        h_v,
        l_v,
        l_vy,
        l_vz,
        g_and,
        g_bob,
        g_eve,
        b_and,
        f_d,
        c_chain,
        s,
    };
    partition.validate()?;
    Ok(partition)
}

/// Role of a (block, index) position in the m-chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Secret,
    Confusion,
    /// Repeats the linked C_{Y\Z} position of the previous block.
    ChainCopy,
    FrozenShared,
    FrozenDet,
}

/// The m-block schedule: per-position roles plus the chain links.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainSchedule {
    pub n: usize,
    pub m: usize,
    pub partition: IndexPartition,
    /// roles[block][index]
    pub roles: Vec<Vec<Role>>,
    /// Positional pairing of sorted C_chain with sorted G_eve; link r ties
    /// (block j, links[r].0) to (block j+1, links[r].1) for every 1 <= j < m.
    pub links: Vec<(usize, usize)>,
}

impl ChainSchedule {
    pub fn secret_bits_per_block(&self) -> usize {
        self.partition.s.len()
    }

    pub fn total_secret_bits(&self) -> usize {
        self.m * self.partition.s.len()
    }

    /// Confusion positions in canonical order: per block 1..m, G_and
    /// ascending, then C_chain ascending for blocks 1..m-1.
    pub fn confusion_positions(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for block in 0..self.m {
            for &i in &self.partition.g_and {
                out.push((block, i));
            }
            if block + 1 < self.m {
                for &i in &self.partition.c_chain {
                    out.push((block, i));
                }
            }
        }
        out
    }

    pub fn total_confusion_bits(&self) -> usize {
        self.m * self.partition.g_and.len() + (self.m - 1) * self.partition.c_chain.len()
    }

    /// Content hash over a compact binary encoding of the schedule.
    pub fn content_hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut hasher = Sha256::new();
        hasher.update((self.n as u64).to_le_bytes());
        hasher.update((self.m as u64).to_le_bytes());
        for row in &self.roles {
            let bytes: Vec<u8> = row
                .iter()
                .map(|r| match r {
                    Role::Secret => 0u8,
                    Role::Confusion => 1,
                    Role::ChainCopy => 2,
                    Role::FrozenShared => 3,
                    Role::FrozenDet => 4,
                })
                .collect();
            hasher.update(&bytes);
        }
        for &(src, dst) in &self.links {
            hasher.update((src as u64).to_le_bytes());
            hasher.update((dst as u64).to_le_bytes());
        }
        let digest = hasher.finalize();
        let mut out = String::with_capacity(64);
        for b in digest {
            out.push_str(&format!("{b:02x}"));
        }
        out
    }
}

/// Builds the role map and links for an m-chain over a valid partition.
pub fn build_chain_schedule(partition: &IndexPartition, m: usize) -> Result<ChainSchedule> {
    if m < 2 {
        return Err(Error::InvalidParameter(format!("m = {m} must be >= 2")));
    }
    partition.validate()?;
    let n = partition.n;
    let mut roles = Vec::with_capacity(m);
    for block in 0..m {
        let mut row = vec![Role::FrozenShared; n];
        for &i in &partition.f_d {
            row[i] = Role::FrozenDet;
        }
        for &i in &partition.s {
            row[i] = Role::Secret;
        }
        for &i in &partition.g_and {
            row[i] = Role::Confusion;
        }
        for &i in &partition.c_chain {
            // C_{Y\Z} carries confusion except in the final block, where it
            // is frozen shared-random.
            row[i] = if block + 1 < m {
                Role::Confusion
            } else {
                Role::FrozenShared
            };
        }
        for &i in &partition.g_eve {
            // G_{Z\Y} is frozen shared-random in the first block and a
            // chained copy afterwards.
            row[i] = if block == 0 {
                Role::FrozenShared
            } else {
                Role::ChainCopy
            };
        }
        roles.push(row);
    }
    let links: Vec<(usize, usize)> = partition
        .c_chain
        .iter()
        .copied()
        .zip(partition.g_eve.iter().copied())
        .collect();
    Ok(ChainSchedule {
        n,
        m,
        partition: partition.clone(),
        roles,
        links,
    })
}

/// Rate accounting for a schedule, with the analytic mutual informations.
pub fn schedule_rates(
    schedule: &ChainSchedule,
    profile: &ReliabilityProfile,
    system: &WiretapSystem,
) -> TheoreticalRates {
    let n = schedule.n as f64;
    let m = schedule.m as f64;
    let (main, eve) = system.effective_channels();
    let mi_bob = main.mutual_information(system.prior_v);
    let mi_eve = eve.mutual_information(system.prior_v);
    let secret_rate = schedule.partition.s.len() as f64 / n;
    let confusion_rate = (m * schedule.partition.g_and.len() as f64
        + (m - 1.0) * schedule.partition.c_chain.len() as f64)
        / (m * n);
    let frozen_positions: usize = schedule
        .roles
        .iter()
        .flatten()
        .filter(|r| matches!(r, Role::FrozenShared | Role::FrozenDet))
        .count();
    TheoreticalRates {
        mi_bob,
        mi_eve,
        analytic_gap: mi_bob - mi_eve,
        secret_rate,
        confusion_rate,
        frozen_fraction: frozen_positions as f64 / (m * n),
        gap_to_analytic: secret_rate - (mi_bob - mi_eve),
        pe_bound: crate::analysis::pe_upper_bound(profile, &schedule.partition, schedule.m),
    }
}

/// Convenience default-budget wrapper used by callers that do not manage
/// budgets themselves.
pub fn profile_brute_force_default(system: &WiretapSystem, n: usize) -> Result<ReliabilityProfile> {
    profile_brute_force(system, n, DEFAULT_TABLE_BUDGET)
}
