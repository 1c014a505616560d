//! Polar coding toolkit for the general (possibly non-degraded,
//! non-symmetric) wiretap channel: channel models, successive-cancellation
//! machinery over non-uniform inputs, index-set construction, the chained
//! multi-block encoder/decoders, and reliability/leakage analysis.

pub mod analysis;
pub mod channel;
pub mod cli;
pub mod codec;
pub mod construction;
pub mod error;
pub mod polar;

pub use analysis::{
    estimate_leakage_mc, exact_leakage_tiny, eve_fano_bound, pe_upper_bound, rates_report,
    simulate_confusion_fer, simulate_fer, FerReport, LeakageMethod, LeakageReport,
    TheoreticalRates, LEAKAGE_SHARED_SEEDS,
};
pub use channel::{
    binary_entropy, compose_prefix, make_bec, make_bsc, sample_outputs, BinaryInputDMC,
    ChannelSample, WiretapSystem, BEC_ERASURE,
};
pub use codec::{
    decode_bob, decode_eve_confusion, encode, encode_with_confusion, fd_fill, frame_io,
    ChainFrame, DecoderOutput, FdFillMode, SecretMessage, SharedRandomness,
};
pub use construction::{
    bhattacharyya_from_joint, build_chain_schedule, delta_n, partition_indices,
    profile_brute_force, profile_exact_bec, profile_exact_sc, profile_monte_carlo,
    schedule_rates, ChainSchedule, ConstructionParams, IndexPartition, ProfileMethod,
    ReliabilityProfile, Role, ThresholdMode,
};
pub use error::{Error, Result};
pub use polar::{
    build_joint_table, polar_transform, sc_posteriors, JointTable, PolarParams, ScEngine,
    ScPosterior, DEFAULT_TABLE_BUDGET,
};
