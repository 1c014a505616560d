//! Batch front end: parses experiment configs, orchestrates
//! construct → simulate → analyze pipelines, caches construction artifacts,
//! and emits reports. Exit codes: 0 success, 2 config error,
//! 3 non-positive secrecy rate, 4 enumeration budget exceeded.

pub mod artifacts;
pub mod config;

use crate::analysis::{
    estimate_leakage_mc, exact_leakage_tiny, rates_report, simulate_confusion_fer, simulate_fer,
    FerReport,
};
use crate::channel::WiretapSystem;
use crate::construction::{
    build_chain_schedule, partition_indices, profile_brute_force, profile_exact_bec,
    profile_exact_sc, profile_monte_carlo, ChainSchedule, ReliabilityProfile,
};
use crate::error::{Error, Result};
use crate::polar::DEFAULT_TABLE_BUDGET;
use artifacts::{read_artifact, write_artifact};
use clap::{Parser, Subcommand};
use config::{ExperimentConfig, LeakageMode, ProfileChoice};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(name = "wtpolar", about = "Polar coding toolkit for the general wiretap channel")]
struct Cli {
    /// Experiment config (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the config's simulation seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the config's worker thread count.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory for artifacts and reports.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the reliability profile, index partition, and chain schedule.
    Construct,
    /// Simulate Bob and confusion-decoder frame error rates.
    Simulate,
    /// Measure or bound the secret-message leakage to the eavesdropper.
    Leakage,
    /// Report analytic rates for the constructed schedule.
    Rates,
    /// Run built-in sanity checks.
    Selftest,
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::InvalidParameter(_) | Error::Mismatch(_) => 2,
        Error::NonPositiveSecrecy { .. } => 3,
        Error::BudgetExceeded { .. } => 4,
        Error::Io(_) => 1,
    }
}

/// Entry point for the `wtpolar` binary; returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version as "errors" with exit code 0.
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cli: &Cli) -> Result<()> {
    if matches!(cli.command, Command::Selftest) {
        return cmd_selftest();
    }
    let path = cli
        .config
        .as_deref()
        .ok_or_else(|| Error::Config("--config is required for this subcommand".into()))?;
    let cfg = ExperimentConfig::load(path)?;
    let seed = cli.seed.unwrap_or(cfg.simulation.seed);
    let threads = cli.threads.unwrap_or(cfg.simulation.threads);
    match cli.command {
        Command::Construct => cmd_construct(&cfg, &cli.out, seed),
        Command::Simulate => cmd_simulate(&cfg, &cli.out, seed, threads),
        Command::Leakage => cmd_leakage(&cfg, &cli.out, seed, threads),
        Command::Rates => cmd_rates(&cfg, &cli.out, seed),
        Command::Selftest => unreachable!(),
    }
}

fn build_profile(
    cfg: &ExperimentConfig,
    system: &WiretapSystem,
    seed: u64,
) -> Result<ReliabilityProfile> {
    let n = cfg.code.n;
    let choice = match cfg.construction.profile {
        ProfileChoice::Auto => {
            let plain_bec = cfg.system.main.is_bec()
                && cfg.system.eve.is_bec()
                && cfg.system.prior_v == 0.5
                && cfg.system.prefix.is_none();
            if plain_bec {
                ProfileChoice::ExactBec
            } else if n <= 8 {
                ProfileChoice::BruteForce
            } else {
                ProfileChoice::MonteCarlo
            }
        }
        other => other,
    };
    match choice {
        ProfileChoice::ExactBec => profile_exact_bec(system, n),
        ProfileChoice::BruteForce => profile_brute_force(system, n, DEFAULT_TABLE_BUDGET),
        ProfileChoice::ExactSc => profile_exact_sc(system, n, DEFAULT_TABLE_BUDGET),
        ProfileChoice::MonteCarlo => {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            profile_monte_carlo(system, n, &cfg.construction.params(), &mut rng)
        }
        ProfileChoice::Auto => unreachable!(),
    }
}

fn report_write(name: &str, cache_hit: bool) {
    if cache_hit {
        println!("{name}: cache hit (unchanged)");
    } else {
        println!("{name}: written");
    }
}

fn cmd_construct(cfg: &ExperimentConfig, out: &Path, seed: u64) -> Result<()> {
    let system = cfg.build_system()?;
    let profile = build_profile(cfg, &system, seed)?;
    let partition = partition_indices(&profile, &cfg.construction.params())?;
    let schedule = build_chain_schedule(&partition, cfg.code.m)?;
    let chash = cfg.construction_hash();
    report_write(
        "profile.json",
        write_artifact(&out.join("profile.json"), &chash, seed, &profile)?,
    );
    report_write(
        "partition.json",
        write_artifact(&out.join("partition.json"), &chash, seed, &partition)?,
    );
    report_write(
        "schedule.json",
        write_artifact(&out.join("schedule.json"), &chash, seed, &schedule)?,
    );
    println!(
        "construct: n={} m={} |S|={} |G_bob|={} |G_eve|={}{}",
        schedule.n,
        cfg.code.m,
        partition.s.len(),
        partition.g_bob.len(),
        partition.g_eve.len(),
        if partition.g_eve.is_empty() {
            " (G_eve empty)"
        } else {
            ""
        }
    );
    Ok(())
}

fn load_schedule(cfg: &ExperimentConfig, out: &Path) -> Result<ChainSchedule> {
    let chash = cfg.construction_hash();
    let artifact: artifacts::Artifact<ChainSchedule> =
        read_artifact(&out.join("schedule.json"), &chash)?;
    Ok(artifact.payload)
}

fn load_profile(cfg: &ExperimentConfig, out: &Path) -> Result<ReliabilityProfile> {
    let chash = cfg.construction_hash();
    let artifact: artifacts::Artifact<ReliabilityProfile> =
        read_artifact(&out.join("profile.json"), &chash)?;
    Ok(artifact.payload)
}

pub fn fer_csv(
    config_hash: &str,
    seed: u64,
    n: usize,
    m: usize,
    rows: &[(&str, &FerReport)],
) -> String {
    let mut csv = String::new();
    csv.push_str(&format!("# config_hash={config_hash}\n# seed={seed}\n"));
    csv.push_str("n,m,role,trials,frame_errors,fer,first_error_blocks\n");
    for (role, report) in rows {
        let hist: Vec<String> = report
            .first_error_blocks
            .iter()
            .map(|c| c.to_string())
            .collect();
        csv.push_str(&format!(
            "{n},{m},{role},{},{},{},{}\n",
            report.trials,
            report.frame_errors,
            report.fer,
            hist.join(";")
        ));
    }
    csv
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<bool> {
    if let Ok(existing) = std::fs::read(path) {
        if existing == bytes {
            return Ok(true);
        }
    }
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, bytes)?;
    Ok(false)
}

fn cmd_simulate(cfg: &ExperimentConfig, out: &Path, seed: u64, threads: usize) -> Result<()> {
    let system = cfg.build_system()?;
    let schedule = load_schedule(cfg, out)?;
    let trials = cfg.simulation.trials;
    let bob = simulate_fer(&schedule, &system, trials, seed, threads)?;
    let eve = simulate_confusion_fer(&schedule, &system, trials, seed ^ 0x45564543, threads)?;
    let csv = fer_csv(
        &cfg.config_hash(),
        seed,
        schedule.n,
        schedule.m,
        &[("bob", &bob), ("eve_confusion", &eve)],
    );
    report_write("fer.csv", write_bytes(&out.join("fer.csv"), csv.as_bytes())?);
    println!(
        "simulate: bob fer={} ({}/{} in {:.1}s), eve_confusion fer={} ({}/{})",
        bob.fer, bob.frame_errors, bob.trials, bob.wall_time_secs, eve.fer, eve.frame_errors,
        eve.trials
    );
    Ok(())
}

/// Table cells needed by the exact leakage enumerator for this schedule.
pub fn exact_leakage_cells(schedule: &ChainSchedule, system: &WiretapSystem) -> u128 {
    let (_, eve) = system.effective_channels();
    let k = eve.output_alphabet_size() as u128;
    let pow = |b: u128, e: u32| b.checked_pow(e).unwrap_or(u128::MAX);
    if schedule.links.is_empty() {
        // Blocks decouple; the per-block subproblems are enumerated
        // separately, so the binding cost is the largest one.
        let s_len = schedule.partition.s.len();
        let conf = schedule.partition.g_and.len();
        pow(2, (s_len + conf) as u32).saturating_mul(pow(k, schedule.n as u32))
    } else {
        let bits = schedule.total_secret_bits() + schedule.total_confusion_bits();
        pow(2, bits as u32).saturating_mul(pow(k, (schedule.m * schedule.n) as u32))
    }
}

fn cmd_leakage(cfg: &ExperimentConfig, out: &Path, seed: u64, threads: usize) -> Result<()> {
    let system = cfg.build_system()?;
    let schedule = load_schedule(cfg, out)?;
    let budget = cfg.leakage.budget as u128;
    let mode = match cfg.leakage.mode {
        LeakageMode::Auto => {
            if exact_leakage_cells(&schedule, &system) <= budget {
                LeakageMode::Exact
            } else {
                LeakageMode::MonteCarlo
            }
        }
        m => m,
    };
    let report = match mode {
        LeakageMode::Exact => {
            exact_leakage_tiny(&schedule, &system, &cfg.leakage.shared_seeds, budget)?
        }
        LeakageMode::MonteCarlo => {
            estimate_leakage_mc(&schedule, &system, cfg.leakage.samples, seed, threads)?
        }
        LeakageMode::Auto => unreachable!(),
    };
    report_write(
        "leakage.json",
        write_artifact(&out.join("leakage.json"), &cfg.config_hash(), seed, &report)?,
    );
    println!(
        "leakage: method={:?} leakage={} bits/use equivocation={} bits/use{}",
        report.method,
        report.leakage_bits_per_channel_use,
        report.equivocation_rate,
        if report.bound_only { " (bound only)" } else { "" }
    );
    Ok(())
}

fn cmd_rates(cfg: &ExperimentConfig, out: &Path, seed: u64) -> Result<()> {
    let system = cfg.build_system()?;
    let schedule = load_schedule(cfg, out)?;
    let profile = load_profile(cfg, out)?;
    let rates = rates_report(&system, &schedule, &profile);
    report_write(
        "rates.json",
        write_artifact(&out.join("rates.json"), &cfg.config_hash(), seed, &rates)?,
    );
    println!(
        "rates: secret={} confusion={} analytic_gap={} pe_bound={}",
        rates.secret_rate, rates.confusion_rate, rates.analytic_gap, rates.pe_bound
    );
    Ok(())
}

fn cmd_selftest() -> Result<()> {
    use crate::channel::make_bec;
    use crate::codec::{decode_bob, encode, SecretMessage, SharedRandomness};
    use crate::polar::polar_transform;
    use rand::Rng;

    // Transform involution on random vectors.
    let mut rng = ChaCha12Rng::seed_from_u64(7);
    for _ in 0..100 {
        let v: Vec<u8> = (0..64).map(|_| rng.gen_range(0..2) as u8).collect();
        if polar_transform(&polar_transform(&v)) != v {
            return Err(Error::Mismatch("transform involution failed".into()));
        }
    }
    println!("selftest: transform involution ok");

    // Exact BEC recursion vs brute-force enumeration.
    let system = WiretapSystem::new(0.5, None, make_bec(0.3)?, make_bec(0.6)?)?;
    let exact = profile_exact_bec(&system, 4)?;
    let brute = profile_brute_force(&system, 4, DEFAULT_TABLE_BUDGET)?;
    for i in 0..4 {
        if (exact.z_bob[i] - brute.z_bob[i]).abs() > 1e-9
            || (exact.z_eve[i] - brute.z_eve[i]).abs() > 1e-9
        {
            return Err(Error::Mismatch("profile oracle disagreement".into()));
        }
    }
    println!("selftest: construction oracles agree");

    // Noiseless end-to-end roundtrip.
    let noiseless = WiretapSystem::new(0.5, None, make_bec(0.0)?, make_bec(0.6)?)?;
    let profile = profile_exact_bec(&noiseless, 8)?;
    let params = crate::construction::ConstructionParams {
        mode: crate::construction::ThresholdMode::RateTarget,
        target_secret_rate: 0.125,
        ..Default::default()
    };
    let partition = partition_indices(&profile, &params)?;
    let schedule = build_chain_schedule(&partition, 2)?;
    let secret = SecretMessage::random(&schedule, &mut rng);
    let shared = SharedRandomness::generate(&schedule, 11);
    let frame = encode(&schedule, &noiseless, &secret, &shared, &mut rng)?;
    let received: Vec<_> = frame
        .x_blocks
        .iter()
        .map(|x| crate::channel::sample_outputs(&noiseless.effective_channels().0, x, &mut rng))
        .collect();
    let decoded = decode_bob(&schedule, &noiseless, &received, &shared)?;
    if decoded.secret_estimate != secret.bits {
        return Err(Error::Mismatch("noiseless roundtrip failed".into()));
    }
    println!("selftest: noiseless roundtrip ok");
    println!("selftest: all checks passed");
    Ok(())
}
