//! Reliability and secrecy measurement: FER simulation, the analytic error
//! bound, exact tiny-scale leakage, Monte Carlo leakage, and the Fano-style
//! equivocation bound. All entropies and mutual informations are in bits.

use crate::channel::{binary_entropy, sample_outputs, ChannelSample, WiretapSystem};
use crate::codec::{
    decode_bob, decode_eve_confusion, encode, encode_with_confusion, FdFillMode, SecretMessage,
    SharedRandomness,
};
use crate::construction::{ChainSchedule, IndexPartition, ReliabilityProfile};
use crate::error::{Error, Result};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::time::Instant;

/// Analytic rate summary for a schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoreticalRates {
    pub mi_bob: f64,
    pub mi_eve: f64,
    pub analytic_gap: f64,
    pub secret_rate: f64,
    pub confusion_rate: f64,
    pub frozen_fraction: f64,
    /// secret_rate - (I(V;Y) - I(V;Z)).
    pub gap_to_analytic: f64,
    pub pe_bound: f64,
}

/// Frame-error-rate simulation result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FerReport {
    pub trials: usize,
    pub frame_errors: usize,
    pub fer: f64,
    /// Histogram over blocks of where the first erroneous bit fell.
    pub first_error_blocks: Vec<usize>,
    /// Not serialized into report files so reruns stay byte-identical.
    #[serde(skip)]
    pub wall_time_secs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LeakageMethod {
    Exact,
    MonteCarlo,
}

/// Leakage measurement or bound decomposition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeakageReport {
    pub method: LeakageMethod,
    /// I(W_s; Z^{mn}) / (mn). For `bound_only` reports this is the
    /// right-hand side of the equivocation inequality, not a measurement.
    pub leakage_bits_per_channel_use: f64,
    /// H(W_s | Z^{mn}) / (mn).
    pub equivocation_rate: f64,
    pub h_secret_bits: f64,
    pub block_length: usize,
    pub blocks: usize,
    pub shared_seeds: Vec<u64>,
    /// Set when only the inequality's bound components are reported.
    pub bound_only: bool,
    pub bound_mi_eve: Option<f64>,
    pub bound_fano_per_use: Option<f64>,
    pub bound_h_confusion_per_use: Option<f64>,
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha12Rng {
    // splitmix64 over (seed, trial) so trial streams are independent and
    // insensitive to the thread layout.
    let mut x = seed ^ trial.wrapping_mul(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^= x >> 31;
    ChaCha12Rng::seed_from_u64(x)
}

/// Outcome of one simulated trial: error flag plus first-error block.
type TrialOutcome = (bool, Option<usize>);

fn run_trials<F>(trials: usize, threads: usize, m: usize, per_trial: F) -> Result<FerReport>
where
    F: Fn(u64) -> Result<TrialOutcome> + Sync,
{
    let start = Instant::now();
    let threads = threads.max(1).min(trials.max(1));
    let chunk = trials.div_ceil(threads);
    let outcomes: Vec<Result<Vec<TrialOutcome>>> = std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for w in 0..threads {
            let lo = w * chunk;
            let hi = ((w + 1) * chunk).min(trials);
            let per_trial = &per_trial;
            handles.push(scope.spawn(move || {
                (lo..hi).map(|t| per_trial(t as u64)).collect::<Result<Vec<_>>>()
            }));
        }
        handles
            .into_iter()
            .map(|h| h.join().expect("trial worker panicked"))
            .collect()
    });
    let mut frame_errors = 0usize;
    let mut first_error_blocks = vec![0usize; m];
    for chunk in outcomes {
        for (err, first_block) in chunk? {
            if err {
                frame_errors += 1;
                if let Some(b) = first_block {
                    first_error_blocks[b] += 1;
                }
            }
        }
    }
    Ok(FerReport {
        trials,
        frame_errors,
        fer: frame_errors as f64 / trials.max(1) as f64,
        first_error_blocks,
        wall_time_secs: start.elapsed().as_secs_f64(),
    })
}

/// Bob frame-error-rate: fresh secret and randomness per trial, a frame
/// error is any wrong secret bit. Deterministic given the seed.
pub fn simulate_fer(
    schedule: &ChainSchedule,
    system: &WiretapSystem,
    trials: usize,
    seed: u64,
    threads: usize,
) -> Result<FerReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    let (main, _) = system.effective_channels();
    let s_len = schedule.partition.s.len();
    run_trials(trials, threads, schedule.m, |t| {
        let mut rng = trial_rng(seed, t);
        let secret = SecretMessage::random(schedule, &mut rng);
        let shared = SharedRandomness::generate(schedule, rng.gen());
        let frame = encode(schedule, system, &secret, &shared, &mut rng)?;
        let received: Vec<ChannelSample> = frame
            .x_blocks
            .iter()
            .map(|x| sample_outputs(&main, x, &mut rng))
            .collect();
        let out = decode_bob(schedule, system, &received, &shared)?;
        let first_bad = secret
            .bits
            .iter()
            .zip(&out.secret_estimate)
            .position(|(a, b)| a != b);
        Ok((first_bad.is_some(), first_bad.map(|i| i / s_len.max(1))))
    })
}

/// Eve confusion-message frame-error-rate under the genie-aided backward
/// decoder (the empirical premise of the Fano step).
pub fn simulate_confusion_fer(
    schedule: &ChainSchedule,
    system: &WiretapSystem,
    trials: usize,
    seed: u64,
    threads: usize,
) -> Result<FerReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    let (_, eve) = system.effective_channels();
    run_trials(trials, threads, schedule.m, |t| {
        let mut rng = trial_rng(seed, t);
        let secret = SecretMessage::random(schedule, &mut rng);
        let shared = SharedRandomness::generate(schedule, rng.gen());
        let frame = encode(schedule, system, &secret, &shared, &mut rng)?;
        let received: Vec<ChannelSample> = frame
            .x_blocks
            .iter()
            .map(|x| sample_outputs(&eve, x, &mut rng))
            .collect();
        let out = decode_eve_confusion(schedule, system, &received, &shared, &secret)?;
        let err = frame.confusion_bits != out.confusion_estimate;
        Ok((err, if err { Some(0) } else { None }))
    })
}

/// Upper bound on Bob's m-chain block error probability:
/// (m-1) sum_{C_{Y\Z}} Z(U_i|U^{i-1},Y^n) + m sum_{G_{Y^Z} u S} Z(U_i|U^{i-1},Y^n).
pub fn pe_upper_bound(profile: &ReliabilityProfile, partition: &IndexPartition, m: usize) -> f64 {
    let chain_sum: f64 = partition.c_chain.iter().map(|&i| profile.z_bob[i]).sum();
    let info_sum: f64 = partition
        .g_and
        .iter()
        .chain(partition.s.iter())
        .map(|&i| profile.z_bob[i])
        .sum();
    ((m as f64 - 1.0) * chain_sum + m as f64 * info_sum).max(0.0)
}

/// Fano bound on H(W~_s | W_s, Z^{mn}): h2(P_e) + P_e * mn * I(V;Z).
pub fn eve_fano_bound(confusion_fer: f64, m: usize, n: usize, mi_eve: f64) -> f64 {
    binary_entropy(confusion_fer) + confusion_fer * (m * n) as f64 * mi_eve
}

fn pow_u128_sat(base: u128, exp: u32) -> u128 {
    base.checked_pow(exp).unwrap_or(u128::MAX)
}

/// Per-(secret value) conditional distributions over the z alphabet for one
/// enumerable sub-schedule (a block subset with no external chain links).
struct EnumeratedLeakage {
    mutual_information: f64,
    conditional_entropy: f64,
    secret_bits: usize,
}

fn bits_of(value: usize, width: usize) -> Vec<u8> {
    (0..width).map(|j| ((value >> (width - 1 - j)) & 1) as u8).collect()
}

/// Exact per-block enumeration; `blocks` selects which blocks' z-outputs are
/// modeled jointly (all of them when chain links couple the blocks).
fn enumerate_leakage(
    schedule: &ChainSchedule,
    system: &WiretapSystem,
    shared: &SharedRandomness,
    blocks: std::ops::Range<usize>,
    budget: u128,
) -> Result<EnumeratedLeakage> {
    let (_, eve) = system.effective_channels();
    let k_out = eve.output_alphabet_size();
    let n = schedule.n;
    let s_len = schedule.partition.s.len();
    let total_s = schedule.total_secret_bits();
    let conf_positions = schedule.confusion_positions();
    // Confusion bits that influence the selected blocks. With no links a
    // block is influenced only by its own confusion positions.
    let conf_in: Vec<usize> = conf_positions
        .iter()
        .enumerate()
        .filter(|(_, (b, _))| blocks.contains(b))
        .map(|(pos, _)| pos)
        .collect();
    let secret_bit_range: Vec<usize> = blocks
        .clone()
        .flat_map(|b| (b * s_len)..((b + 1) * s_len))
        .collect();
    let sym_count = (blocks.len() * n) as u32;
    let z_card = pow_u128_sat(k_out as u128, sym_count);
    let required = pow_u128_sat(2, (secret_bit_range.len() + conf_in.len()) as u32)
        .saturating_mul(z_card);
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    let z_card = z_card as usize;
    let n_secret = secret_bit_range.len();
    let n_conf = conf_in.len();
    let mut cond = vec![vec![0.0f64; z_card]; 1 << n_secret];
    let mut rng = ChaCha12Rng::seed_from_u64(0); // unused: argmax fd fill
    for w in 0..(1usize << n_secret) {
        let w_bits = bits_of(w, n_secret);
        for c in 0..(1usize << n_conf) {
            let c_bits = bits_of(c, n_conf);
            // Assemble full secret/confusion vectors; bits outside the
            // selected blocks are irrelevant to these z-outputs.
            let mut secret = vec![0u8; total_s];
            for (slot, &bit_idx) in secret_bit_range.iter().enumerate() {
                secret[bit_idx] = w_bits[slot];
            }
            let mut confusion = vec![0u8; conf_positions.len()];
            for (slot, &pos) in conf_in.iter().enumerate() {
                confusion[pos] = c_bits[slot];
            }
            let frame = encode_with_confusion(
                schedule,
                system,
                &SecretMessage { bits: secret },
                &confusion,
                shared,
                FdFillMode::Argmax,
                &mut rng,
            )?;
            // Product distribution over the selected blocks' z symbols.
            let mut dist = vec![1.0f64];
            for b in blocks.clone() {
                for &x in &frame.x_blocks[b] {
                    let row = eve.row(x);
                    let mut next = vec![0.0; dist.len() * k_out];
                    for (idx, &p) in dist.iter().enumerate() {
                        if p == 0.0 {
                            continue;
                        }
                        for (sym, &q) in row.iter().enumerate() {
                            next[idx * k_out + sym] = p * q;
                        }
                    }
                    dist = next;
                }
            }
            let weight = 1.0 / (1u64 << n_conf) as f64;
            for (z, &p) in dist.iter().enumerate() {
                if p > 0.0 {
                    cond[w][z] += weight * p;
                }
            }
        }
    }
    let pw = 1.0 / (1u64 << n_secret) as f64;
    let mut pz = vec![0.0f64; z_card];
    for row in &cond {
        for (z, &p) in row.iter().enumerate() {
            pz[z] += pw * p;
        }
    }
    let mut mi = 0.0;
    let mut h_cond = 0.0;
    for row in &cond {
        for (z, &p) in row.iter().enumerate() {
            if p > 0.0 {
                mi += pw * p * (p / pz[z]).log2();
                h_cond -= pw * p * ((pw * p) / pz[z]).log2();
            }
        }
    }
    Ok(EnumeratedLeakage {
        mutual_information: mi,
        conditional_entropy: h_cond,
        secret_bits: n_secret,
    })
}

/// Default shared-randomness seeds conditioned on during leakage
/// enumeration; the most leaky of the three is reported.
pub const LEAKAGE_SHARED_SEEDS: [u64; 3] = [1, 2, 3];

/// Exact I(W_s; Z^{mn}) by full enumeration of secret bits, confusion bits,
/// and eavesdropper outputs, conditioned on fixed shared randomness.
///
/// When the schedule has no chain links the blocks decouple and are
/// enumerated independently; otherwise the whole chain is enumerated
/// jointly, subject to the budget.
pub fn exact_leakage_tiny(
    schedule: &ChainSchedule,
    system: &WiretapSystem,
    shared_seeds: &[u64],
    budget: u128,
) -> Result<LeakageReport> {
    if shared_seeds.is_empty() {
        return Err(Error::InvalidParameter("need at least one shared seed".into()));
    }
    let mn = schedule.m * schedule.n;
    let mut worst: Option<(f64, f64, usize)> = None;
    for &seed in shared_seeds {
        let shared = SharedRandomness::generate(schedule, seed);
        let (mi, h_cond, s_bits) = if schedule.links.is_empty() {
            let mut mi = 0.0;
            let mut h_cond = 0.0;
            let mut s_bits = 0usize;
            for b in 0..schedule.m {
                let e = enumerate_leakage(schedule, system, &shared, b..b + 1, budget)?;
                mi += e.mutual_information;
                h_cond += e.conditional_entropy;
                s_bits += e.secret_bits;
            }
            (mi, h_cond, s_bits)
        } else {
            let e = enumerate_leakage(schedule, system, &shared, 0..schedule.m, budget)?;
            (e.mutual_information, e.conditional_entropy, e.secret_bits)
        };
        if worst.map_or(true, |(w_mi, _, _)| mi > w_mi) {
            worst = Some((mi, h_cond, s_bits));
        }
    }
    let (mi, h_cond, s_bits) = worst.unwrap();
    Ok(LeakageReport {
        method: LeakageMethod::Exact,
        leakage_bits_per_channel_use: mi / mn as f64,
        equivocation_rate: h_cond / mn as f64,
        h_secret_bits: s_bits as f64,
        block_length: schedule.n,
        blocks: schedule.m,
        shared_seeds: shared_seeds.to_vec(),
        bound_only: false,
        bound_mi_eve: None,
        bound_fano_per_use: None,
        bound_h_confusion_per_use: None,
    })
}

/// Alphabet limit under which the plug-in estimator is used.
const PLUGIN_Z_CARD_LIMIT: u128 = 1 << 24;
const PLUGIN_SECRET_BITS_LIMIT: usize = 20;

/// Monte Carlo leakage: a plug-in mutual-information estimate from sampled
/// (W_s, Z^{mn}) pairs on enumerable instances. At scale it reports the
/// three components of the equivocation inequality instead, never a
/// pretend measurement: I(V;Z), the Fano term over mn, and H(W~_s)/mn.
pub fn estimate_leakage_mc(
    schedule: &ChainSchedule,
    system: &WiretapSystem,
    samples: usize,
    seed: u64,
    threads: usize,
) -> Result<LeakageReport> {
    if samples == 0 {
        return Err(Error::InvalidParameter("samples must be >= 1".into()));
    }
    let (_, eve) = system.effective_channels();
    let mn = schedule.m * schedule.n;
    let k_out = eve.output_alphabet_size();
    let z_card = pow_u128_sat(k_out as u128, mn as u32);
    let s_total = schedule.total_secret_bits();
    if z_card <= PLUGIN_Z_CARD_LIMIT && s_total <= PLUGIN_SECRET_BITS_LIMIT {
        return plugin_leakage(schedule, system, &eve, samples, seed);
    }
    // Bound decomposition path.
    let mi_eve = eve.mutual_information(system.prior_v);
    let fer = simulate_confusion_fer(schedule, system, samples, seed, threads)?;
    let fano = eve_fano_bound(fer.fer, schedule.m, schedule.n, mi_eve);
    let h_conf = schedule.total_confusion_bits() as f64;
    let combined = mi_eve + fano / mn as f64 - h_conf / mn as f64;
    Ok(LeakageReport {
        method: LeakageMethod::MonteCarlo,
        leakage_bits_per_channel_use: combined,
        equivocation_rate: (s_total as f64 / mn as f64 - combined).max(0.0),
        h_secret_bits: s_total as f64,
        block_length: schedule.n,
        blocks: schedule.m,
        shared_seeds: vec![LEAKAGE_SHARED_SEEDS[0]],
        bound_only: true,
        bound_mi_eve: Some(mi_eve),
        bound_fano_per_use: Some(fano / mn as f64),
        bound_h_confusion_per_use: Some(h_conf / mn as f64),
    })
}

fn plugin_leakage(
    schedule: &ChainSchedule,
    system: &WiretapSystem,
    eve: &crate::channel::BinaryInputDMC,
    samples: usize,
    seed: u64,
) -> Result<LeakageReport> {
    let mn = schedule.m * schedule.n;
    let k_out = eve.output_alphabet_size();
    // Shared randomness is held fixed, matching the conditioning of the
    // exact enumerator.
    let shared = SharedRandomness::generate(schedule, LEAKAGE_SHARED_SEEDS[0]);
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut joint: BTreeMap<(u64, u64), u64> = BTreeMap::new();
    let mut w_marg: BTreeMap<u64, u64> = BTreeMap::new();
    let mut z_marg: BTreeMap<u64, u64> = BTreeMap::new();
    for _ in 0..samples {
        let secret = SecretMessage::random(schedule, &mut rng);
        let frame = encode(schedule, system, &secret, &shared, &mut rng)?;
        let mut w_key = 0u64;
        for &b in &secret.bits {
            w_key = (w_key << 1) | b as u64;
        }
        let mut z_key = 0u64;
        for block in &frame.x_blocks {
            let obs = sample_outputs(eve, block, &mut rng);
            for &sym in &obs.output_symbols {
                z_key = z_key * k_out as u64 + sym as u64;
            }
        }
        *joint.entry((w_key, z_key)).or_insert(0) += 1;
        *w_marg.entry(w_key).or_insert(0) += 1;
        *z_marg.entry(z_key).or_insert(0) += 1;
    }
    let total = samples as f64;
    let mut mi = 0.0;
    for (&(w, z), &c) in &joint {
        let p = c as f64 / total;
        let pw = w_marg[&w] as f64 / total;
        let pz = z_marg[&z] as f64 / total;
        mi += p * (p / (pw * pz)).log2();
    }
    // Miller-Madow correction for the plug-in estimator's upward bias.
    let correction = (joint.len() as f64 - w_marg.len() as f64 - z_marg.len() as f64 + 1.0)
        / (2.0 * total * std::f64::consts::LN_2);
    mi = (mi - correction).max(0.0);
    let h_secret = schedule.total_secret_bits() as f64;
    Ok(LeakageReport {
        method: LeakageMethod::MonteCarlo,
        leakage_bits_per_channel_use: mi / mn as f64,
        equivocation_rate: (h_secret - mi) / mn as f64,
        h_secret_bits: h_secret,
        block_length: schedule.n,
        blocks: schedule.m,
        shared_seeds: vec![shared.seed],
        bound_only: false,
        bound_mi_eve: None,
        bound_fano_per_use: None,
        bound_h_confusion_per_use: None,
    })
}

/// Analytic rate report: mutual informations by direct summation, schedule
/// rates, and the error bound.
pub fn rates_report(
    system: &WiretapSystem,
    schedule: &ChainSchedule,
    profile: &ReliabilityProfile,
) -> TheoreticalRates {
    crate::construction::schedule_rates(schedule, profile, system)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::make_bec;
    use crate::construction::{
        build_chain_schedule, partition_indices, profile_exact_bec, ConstructionParams,
        IndexPartition, ProfileMethod, Role,
    };

    fn bec_system(eps_main: f64, eps_eve: f64) -> WiretapSystem {
        WiretapSystem::new(0.5, None, make_bec(eps_main).unwrap(), make_bec(eps_eve).unwrap())
            .unwrap()
    }

    /// n = 4 schedule with one chained pair (see codec tests).
    fn synthetic_schedule(m: usize) -> ChainSchedule {
        let profile = ReliabilityProfile {
            n: 4,
            method: ProfileMethod::BruteForce,
            z_source: vec![1.0; 4],
            z_bob: vec![0.0, 0.0, 0.0, 0.9],
            z_eve: vec![0.9, 0.9, 0.9, 0.0],
            stderr: None,
        };
        let partition = partition_indices(&profile, &ConstructionParams::default()).unwrap();
        build_chain_schedule(&partition, m).unwrap()
    }

    fn acceptance_tiny_schedule(n: usize) -> (ChainSchedule, WiretapSystem) {
        let system = bec_system(0.25, 0.75);
        let profile = profile_exact_bec(&system, n).unwrap();
        let partition = partition_indices(&profile, &ConstructionParams::default()).unwrap();
        (build_chain_schedule(&partition, 2).unwrap(), system)
    }

    #[test]
    fn pe_bound_zero_profile() {
        let schedule = synthetic_schedule(2);
        let profile = ReliabilityProfile {
            n: 4,
            method: ProfileMethod::BruteForce,
            z_source: vec![1.0; 4],
            z_bob: vec![0.0; 4],
            z_eve: vec![0.0; 4],
            stderr: None,
        };
        assert_eq!(pe_upper_bound(&profile, &schedule.partition, 3), 0.0);
    }

    #[test]
    fn pe_bound_formula() {
        // C_chain = {0}, S = {1,2}, G_and = {} in the synthetic partition.
        let schedule = synthetic_schedule(2);
        let profile = ReliabilityProfile {
            n: 4,
            method: ProfileMethod::BruteForce,
            z_source: vec![1.0; 4],
            z_bob: vec![0.01, 0.02, 0.04, 0.9],
            z_eve: vec![0.9, 0.9, 0.9, 0.0],
            stderr: None,
        };
        let m = 3;
        let expected = 2.0 * 0.01 + 3.0 * (0.02 + 0.04);
        assert!((pe_upper_bound(&profile, &schedule.partition, m) - expected).abs() < 1e-12);
        // m = 1 reduces to the single-block information-set sum.
        let single = pe_upper_bound(&profile, &schedule.partition, 1);
        assert!((single - (0.02 + 0.04)).abs() < 1e-12);
    }

    #[test]
    fn fano_bound_values_and_monotonicity() {
        assert_eq!(eve_fano_bound(0.0, 4, 256, 0.5), 0.0);
        // h2(1/2) + 0.5 * mn * mi with mn * mi = 100.
        let v = eve_fano_bound(0.5, 10, 20, 0.5);
        assert!((v - 51.0).abs() < 1e-12);
        let mut prev = -1.0;
        for k in 0..=50 {
            let fer = k as f64 / 100.0;
            let b = eve_fano_bound(fer, 4, 64, 0.3);
            assert!(b >= prev);
            prev = b;
        }
    }

    #[test]
    fn noiseless_fer_is_zero_and_reproducible() {
        let schedule = synthetic_schedule(3);
        let system = bec_system(0.0, 0.0);
        let a = simulate_fer(&schedule, &system, 50, 7, 1).unwrap();
        assert_eq!(a.frame_errors, 0);
        assert_eq!(a.fer, 0.0);
        let eve = simulate_confusion_fer(&schedule, &system, 50, 7, 1).unwrap();
        assert_eq!(eve.frame_errors, 0);
    }

    #[test]
    fn fer_independent_of_thread_layout() {
        let schedule = synthetic_schedule(2);
        let system = bec_system(0.2, 0.4);
        let a = simulate_fer(&schedule, &system, 200, 11, 1).unwrap();
        let b = simulate_fer(&schedule, &system, 200, 11, 4).unwrap();
        assert_eq!(a.frame_errors, b.frame_errors);
        assert_eq!(a.first_error_blocks, b.first_error_blocks);
        let c = simulate_fer(&schedule, &system, 200, 12, 1).unwrap();
        assert!(c.frame_errors != a.frame_errors || c.first_error_blocks != a.first_error_blocks);
    }

    #[test]
    fn exact_leakage_blind_eavesdropper_is_zero() {
        let (schedule, _) = acceptance_tiny_schedule(4);
        let system = bec_system(0.25, 1.0);
        let report =
            exact_leakage_tiny(&schedule, &system, &LEAKAGE_SHARED_SEEDS, 1 << 26).unwrap();
        assert!(report.leakage_bits_per_channel_use.abs() < 1e-12);
        // Identity: equivocation + leakage accounts for all of H(W_s).
        let mn = (schedule.m * schedule.n) as f64;
        let total = (report.equivocation_rate + report.leakage_bits_per_channel_use) * mn;
        assert!((total - report.h_secret_bits).abs() < 1e-9);
    }

    #[test]
    fn exact_leakage_identity_on_noisy_instance() {
        let (schedule, system) = acceptance_tiny_schedule(4);
        let report =
            exact_leakage_tiny(&schedule, &system, &LEAKAGE_SHARED_SEEDS, 1 << 26).unwrap();
        let mn = (schedule.m * schedule.n) as f64;
        let total = (report.equivocation_rate + report.leakage_bits_per_channel_use) * mn;
        assert!((total - report.h_secret_bits).abs() < 1e-9);
        assert!(report.leakage_bits_per_channel_use >= 0.0);
        assert!(
            report.leakage_bits_per_channel_use <= report.h_secret_bits / mn + 1e-9,
            "leakage cannot exceed the secret entropy"
        );
    }

    #[test]
    fn exact_leakage_empty_secret() {
        // S empty: G_bob = C_chain, so the frame carries no secret bits.
        let partition = IndexPartition {
            n: 4,
            h_v: vec![0, 1, 2, 3],
            l_v: vec![],
            l_vy: vec![0, 1],
            l_vz: vec![0, 2],
            g_and: vec![0],
            g_bob: vec![1],
            g_eve: vec![2],
            b_and: vec![3],
            f_d: vec![],
            c_chain: vec![1],
            s: vec![],
        };
        let schedule = build_chain_schedule(&partition, 2).unwrap();
        let system = bec_system(0.25, 0.5);
        let report =
            exact_leakage_tiny(&schedule, &system, &LEAKAGE_SHARED_SEEDS, 1 << 26).unwrap();
        assert_eq!(report.h_secret_bits, 0.0);
        assert_eq!(report.leakage_bits_per_channel_use, 0.0);
        assert_eq!(report.equivocation_rate, 0.0);
    }

    #[test]
    fn exact_leakage_budget_enforced() {
        let (schedule, system) = acceptance_tiny_schedule(4);
        match exact_leakage_tiny(&schedule, &system, &[1], 10) {
            Err(Error::BudgetExceeded { required, budget }) => {
                assert!(required > budget);
            }
            other => panic!("expected BudgetExceeded, got {other:?}"),
        }
    }

    #[test]
    fn mc_leakage_tracks_exact_oracle() {
        let (schedule, system) = acceptance_tiny_schedule(4);
        let exact =
            exact_leakage_tiny(&schedule, &system, &LEAKAGE_SHARED_SEEDS, 1 << 26).unwrap();
        let mc = estimate_leakage_mc(&schedule, &system, 20_000, 3, 1).unwrap();
        assert_eq!(mc.method, LeakageMethod::MonteCarlo);
        assert!(!mc.bound_only);
        let diff = (mc.leakage_bits_per_channel_use - exact.leakage_bits_per_channel_use).abs();
        assert!(diff < 0.03, "plug-in {} vs exact {}", mc.leakage_bits_per_channel_use,
            exact.leakage_bits_per_channel_use);
    }

    #[test]
    fn bound_combination_dominates_exact_leakage() {
        let (schedule, system) = acceptance_tiny_schedule(4);
        let exact =
            exact_leakage_tiny(&schedule, &system, &LEAKAGE_SHARED_SEEDS, 1 << 26).unwrap();
        let (_, eve) = system.effective_channels();
        let mi_eve = eve.mutual_information(system.prior_v);
        let fer = simulate_confusion_fer(&schedule, &system, 2000, 5, 1).unwrap();
        let mn = (schedule.m * schedule.n) as f64;
        let combined = mi_eve + eve_fano_bound(fer.fer, schedule.m, schedule.n, mi_eve) / mn
            - schedule.total_confusion_bits() as f64 / mn;
        assert!(
            combined + 1e-9 >= exact.leakage_bits_per_channel_use,
            "combined bound {combined} below exact leakage {}",
            exact.leakage_bits_per_channel_use
        );
    }

    #[test]
    fn rates_report_matches_channel_mi() {
        let (schedule, system) = acceptance_tiny_schedule(4);
        let profile = profile_exact_bec(&system, 4).unwrap();
        let rates = rates_report(&system, &schedule, &profile);
        assert!((rates.mi_bob - 0.75).abs() < 1e-12);
        assert!((rates.mi_eve - 0.25).abs() < 1e-12);
        assert!((rates.analytic_gap - 0.5).abs() < 1e-12);
        assert_eq!(rates.secret_rate, schedule.partition.s.len() as f64 / 4.0);
        let frozen = schedule
            .roles
            .iter()
            .flatten()
            .filter(|r| matches!(r, Role::FrozenShared | Role::FrozenDet))
            .count();
        assert_eq!(rates.frozen_fraction, frozen as f64 / 8.0);
    }
}
