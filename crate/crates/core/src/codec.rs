//! Encoding and decoding over an m-chain schedule: the encoder, Bob's
//! forward decoder, and Eve's backward confusion decoder (the genie-aided
//! decoder behind the Fano step, which is handed the secret).

use crate::channel::{ChannelSample, WiretapSystem};
use crate::construction::{ChainSchedule, Role};
use crate::error::{Error, Result};
use crate::polar::{polar_transform, ScEngine, ScPosterior};
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rand::SeedableRng;

/// Secret payload, block-major: block j's S positions in ascending index
/// order occupy bits [j*|S| .. (j+1)*|S|).
#[derive(Debug, Clone, PartialEq)]
pub struct SecretMessage {
    pub bits: Vec<u8>,
}

impl SecretMessage {
    pub fn random<R: Rng>(schedule: &ChainSchedule, rng: &mut R) -> Self {
        let bits = (0..schedule.total_secret_bits())
            .map(|_| rng.gen_range(0..2) as u8)
            .collect();
        Self { bits }
    }
}

/// Seeded pseudorandom bits covering every frozen_shared position, known to
/// the encoder and both decoders. Excluded from leakage accounting.
#[derive(Debug, Clone, PartialEq)]
pub struct SharedRandomness {
    pub seed: u64,
    schedule_hash: String,
    bits: Vec<Vec<u8>>,
}

impl SharedRandomness {
    /// Regenerates the full stream from the seed; positions are drawn in
    /// block-major, index-ascending order over the frozen_shared roles.
    pub fn generate(schedule: &ChainSchedule, seed: u64) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let mut bits = vec![vec![0u8; schedule.n]; schedule.m];
        for (block, row) in schedule.roles.iter().enumerate() {
            for (i, role) in row.iter().enumerate() {
                if *role == Role::FrozenShared {
                    bits[block][i] = rng.gen_range(0..2) as u8;
                }
            }
        }
        Self {
            seed,
            schedule_hash: schedule.content_hash(),
            bits,
        }
    }

    pub fn bit(&self, block: usize, index: usize) -> u8 {
        self.bits[block][index]
    }

    fn check(&self, schedule: &ChainSchedule) -> Result<()> {
        if self.schedule_hash != schedule.content_hash() {
            return Err(Error::Mismatch(
                "shared randomness was generated for a different schedule".into(),
            ));
        }
        Ok(())
    }
}

/// One transmitted m-chain: u-domain and x-domain bits plus the confusion
/// payload (the message W~_s of the equivocation analysis).
#[derive(Debug, Clone, PartialEq)]
pub struct ChainFrame {
    pub u_blocks: Vec<Vec<u8>>,
    pub x_blocks: Vec<Vec<u8>>,
    /// Confusion bits in canonical order (see
    /// [`ChainSchedule::confusion_positions`]).
    pub confusion_bits: Vec<u8>,
}

/// Decoder result: hard decisions only.
#[derive(Debug, Clone, PartialEq)]
pub struct DecoderOutput {
    pub secret_estimate: Vec<u8>,
    pub confusion_estimate: Vec<u8>,
    pub u_blocks: Vec<Vec<u8>>,
}

/// How deterministic-frozen positions are filled from the source posterior.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdFillMode {
    Argmax,
    Sample,
}

/// The frozen-set fill map: argmax of P(U_i | u^{i-1}) (ties toward 0), or
/// a draw from it in sample mode.
pub fn fd_fill<R: Rng>(mode: FdFillMode, posterior: &ScPosterior, rng: &mut R) -> u8 {
    match mode {
        FdFillMode::Argmax => posterior.argmax(),
        FdFillMode::Sample => u8::from(rng.gen::<f64>() < posterior.p1),
    }
}

fn check_secret(schedule: &ChainSchedule, secret: &SecretMessage) -> Result<()> {
    if secret.bits.len() != schedule.total_secret_bits() {
        return Err(Error::Mismatch(format!(
            "secret length {} != m * |S| = {}",
            secret.bits.len(),
            schedule.total_secret_bits()
        )));
    }
    Ok(())
}

/// Encodes with explicit confusion bits (canonical order). Deterministic
/// when `fd_mode` is argmax; used directly by the exact leakage enumerator.
pub fn encode_with_confusion<R: Rng>(
    schedule: &ChainSchedule,
    system: &WiretapSystem,
    secret: &SecretMessage,
    confusion: &[u8],
    shared: &SharedRandomness,
    fd_mode: FdFillMode,
    rng: &mut R,
) -> Result<ChainFrame> {
    check_secret(schedule, secret)?;
    shared.check(schedule)?;
    if confusion.len() != schedule.total_confusion_bits() {
        return Err(Error::Mismatch(format!(
            "confusion length {} != {}",
            confusion.len(),
            schedule.total_confusion_bits()
        )));
    }
    let (n, m) = (schedule.n, schedule.m);
    let s_len = schedule.partition.s.len();
    let has_fd = !schedule.partition.f_d.is_empty();
    // (block, index) -> position in the canonical confusion order.
    let mut conf_index = vec![vec![usize::MAX; n]; m];
    for (pos, (block, i)) in schedule.confusion_positions().into_iter().enumerate() {
        conf_index[block][i] = pos;
    }
    let mut s_rank = vec![usize::MAX; n];
    for (rank, &i) in schedule.partition.s.iter().enumerate() {
        s_rank[i] = rank;
    }
    let mut link_src = vec![usize::MAX; n];
    for &(src, dst) in &schedule.links {
        link_src[dst] = src;
    }

    let mut u_blocks: Vec<Vec<u8>> = Vec::with_capacity(m);
    let mut x_blocks: Vec<Vec<u8>> = Vec::with_capacity(m);
    for block in 0..m {
        let mut u = vec![0u8; n];
        let mut source = if has_fd {
            Some(ScEngine::for_source(system.prior_v, n)?)
        } else {
            None
        };
        for i in 0..n {
            let bit = match schedule.roles[block][i] {
                Role::Secret => secret.bits[block * s_len + s_rank[i]],
                Role::Confusion => confusion[conf_index[block][i]],
                Role::ChainCopy => u_blocks[block - 1][link_src[i]],
                Role::FrozenShared => shared.bit(block, i),
                Role::FrozenDet => {
                    let engine = source.as_ref().expect("F_d implies a source engine");
                    fd_fill(fd_mode, &engine.next_posterior(), rng)
                }
            };
            u[i] = bit;
            if let Some(engine) = source.as_mut() {
                engine.commit(bit);
            }
        }
        x_blocks.push(polar_transform(&u));
        u_blocks.push(u);
    }
    Ok(ChainFrame {
        u_blocks,
        x_blocks,
        confusion_bits: confusion.to_vec(),
    })
}

/// Full encoding procedure: secret bits into S, fresh local-random confusion
/// bits, chained copies, shared-random frozen bits, and the F_d fill map.
pub fn encode<R: Rng>(
    schedule: &ChainSchedule,
    system: &WiretapSystem,
    secret: &SecretMessage,
    shared: &SharedRandomness,
    local_rng: &mut R,
) -> Result<ChainFrame> {
    let confusion: Vec<u8> = (0..schedule.total_confusion_bits())
        .map(|_| local_rng.gen_range(0..2) as u8)
        .collect();
    encode_with_confusion(
        schedule,
        system,
        secret,
        &confusion,
        shared,
        FdFillMode::Argmax,
        local_rng,
    )
}

/// Bob's forward decoder over the main-channel observations.
pub fn decode_bob(
    schedule: &ChainSchedule,
    system: &WiretapSystem,
    received: &[ChannelSample],
    shared: &SharedRandomness,
) -> Result<DecoderOutput> {
    shared.check(schedule)?;
    let (n, m) = (schedule.n, schedule.m);
    if received.len() != m || received.iter().any(|s| s.output_symbols.len() != n) {
        return Err(Error::Mismatch(format!(
            "expected {m} blocks of {n} main-channel outputs"
        )));
    }
    let (main, _) = system.effective_channels();
    let has_fd = !schedule.partition.f_d.is_empty();
    let mut link_src = vec![usize::MAX; n];
    for &(src, dst) in &schedule.links {
        link_src[dst] = src;
    }
    let mut u_blocks: Vec<Vec<u8>> = Vec::with_capacity(m);
    for block in 0..m {
        let mut engine = ScEngine::for_channel(system.prior_v, &main, &received[block])?;
        let mut source = if has_fd {
            Some(ScEngine::for_source(system.prior_v, n)?)
        } else {
            None
        };
        let mut u = vec![0u8; n];
        for i in 0..n {
            let bit = match schedule.roles[block][i] {
                Role::FrozenShared => shared.bit(block, i),
                Role::FrozenDet => source
                    .as_ref()
                    .expect("F_d implies a source engine")
                    .next_posterior()
                    .argmax(),
                Role::ChainCopy => u_blocks[block - 1][link_src[i]],
                Role::Secret | Role::Confusion => engine.next_posterior().argmax(),
            };
            u[i] = bit;
            engine.commit(bit);
            if let Some(src) = source.as_mut() {
                src.commit(bit);
            }
        }
        u_blocks.push(u);
    }
    Ok(gather_output(schedule, u_blocks))
}

/// Eve's genie-aided backward decoder: given the secret and the shared
/// randomness, recovers the confusion message from the eavesdropper
/// observations, processing blocks m down to 1.
///
/// Within each block: S and frozen positions are pinned; C_{Y\Z} positions
/// of blocks < m are pinned from the already-decoded chained copy in the
/// next block; G_{Y^Z} and the chained-copy (G_{Z\Y}) positions are decoded
/// by argmax over Z^n.
pub fn decode_eve_confusion(
    schedule: &ChainSchedule,
    system: &WiretapSystem,
    received: &[ChannelSample],
    shared: &SharedRandomness,
    secret: &SecretMessage,
) -> Result<DecoderOutput> {
    shared.check(schedule)?;
    check_secret(schedule, secret)?;
    let (n, m) = (schedule.n, schedule.m);
    if received.len() != m || received.iter().any(|s| s.output_symbols.len() != n) {
        return Err(Error::Mismatch(format!(
            "expected {m} blocks of {n} eavesdropper outputs"
        )));
    }
    let (_, eve) = system.effective_channels();
    let has_fd = !schedule.partition.f_d.is_empty();
    let s_len = schedule.partition.s.len();
    let mut s_rank = vec![usize::MAX; n];
    for (rank, &i) in schedule.partition.s.iter().enumerate() {
        s_rank[i] = rank;
    }
    let mut link_dst = vec![usize::MAX; n];
    for &(src, dst) in &schedule.links {
        link_dst[src] = dst;
    }
    let in_c_chain: Vec<bool> = {
        let mut v = vec![false; n];
        for &i in &schedule.partition.c_chain {
            v[i] = true;
        }
        v
    };
    let mut u_blocks: Vec<Vec<u8>> = vec![Vec::new(); m];
    for block in (0..m).rev() {
        let mut engine = ScEngine::for_channel(system.prior_v, &eve, &received[block])?;
        let mut source = if has_fd {
            Some(ScEngine::for_source(system.prior_v, n)?)
        } else {
            None
        };
        let mut u = vec![0u8; n];
        for i in 0..n {
            let role = schedule.roles[block][i];
            let bit = match role {
                Role::Secret => secret.bits[block * s_len + s_rank[i]],
                Role::FrozenShared => shared.bit(block, i),
                Role::FrozenDet => source
                    .as_ref()
                    .expect("F_d implies a source engine")
                    .next_posterior()
                    .argmax(),
                Role::Confusion if in_c_chain[i] && block + 1 < m => {
                    // Chained: already recovered as the copy in block+1.
                    u_blocks[block + 1][link_dst[i]]
                }
                // G_{Y^Z} confusion and G_{Z\Y} copies are Eve-good.
                Role::Confusion | Role::ChainCopy => engine.next_posterior().argmax(),
            };
            u[i] = bit;
            engine.commit(bit);
            if let Some(src) = source.as_mut() {
                src.commit(bit);
            }
        }
        u_blocks[block] = u;
    }
    Ok(gather_output(schedule, u_blocks))
}

fn gather_output(schedule: &ChainSchedule, u_blocks: Vec<Vec<u8>>) -> DecoderOutput {
    let s_len = schedule.partition.s.len();
    let mut secret_estimate = Vec::with_capacity(schedule.m * s_len);
    for block in 0..schedule.m {
        for &i in &schedule.partition.s {
            secret_estimate.push(u_blocks[block][i]);
        }
    }
    let confusion_estimate = schedule
        .confusion_positions()
        .into_iter()
        .map(|(block, i)| u_blocks[block][i])
        .collect();
    DecoderOutput {
        secret_estimate,
        confusion_estimate,
        u_blocks,
    }
}

/// Flat binary frame layout: magic, version, n, m, schedule hash, then the
/// u bits and x bits block-major, one byte per bit.
pub mod frame_io {
    use super::ChainFrame;
    use crate::construction::ChainSchedule;
    use crate::error::{Error, Result};
    use std::io::{Read, Write};

    const MAGIC: &[u8; 4] = b"WTPF";
    const VERSION: u8 = 1;

    pub fn write_frame<W: Write>(
        out: &mut W,
        schedule: &ChainSchedule,
        frame: &ChainFrame,
    ) -> Result<()> {
        out.write_all(MAGIC)?;
        out.write_all(&[VERSION])?;
        out.write_all(&(schedule.n as u32).to_le_bytes())?;
        out.write_all(&(schedule.m as u32).to_le_bytes())?;
        let hash = schedule.content_hash();
        out.write_all(hash.as_bytes())?;
        for blocks in [&frame.u_blocks, &frame.x_blocks] {
            for block in blocks.iter() {
                out.write_all(block)?;
            }
        }
        Ok(())
    }

    /// Reads a frame, verifying header fields against the schedule.
    pub fn read_frame<R: Read>(input: &mut R, schedule: &ChainSchedule) -> Result<ChainFrame> {
        let mut head = [0u8; 4 + 1 + 4 + 4];
        input.read_exact(&mut head)?;
        if &head[0..4] != MAGIC || head[4] != VERSION {
            return Err(Error::Mismatch("bad frame magic or version".into()));
        }
        let n = u32::from_le_bytes(head[5..9].try_into().unwrap()) as usize;
        let m = u32::from_le_bytes(head[9..13].try_into().unwrap()) as usize;
        if n != schedule.n || m != schedule.m {
            return Err(Error::Mismatch(format!(
                "frame is {m}x{n}, schedule is {}x{}",
                schedule.m, schedule.n
            )));
        }
        let mut hash = vec![0u8; 64];
        input.read_exact(&mut hash)?;
        if hash != schedule.content_hash().as_bytes() {
            return Err(Error::Mismatch("frame schedule hash mismatch".into()));
        }
        let mut read_blocks = || -> Result<Vec<Vec<u8>>> {
            let mut blocks = Vec::with_capacity(m);
            for _ in 0..m {
                let mut block = vec![0u8; n];
                input.read_exact(&mut block)?;
                if block.iter().any(|&b| b > 1) {
                    return Err(Error::Mismatch("frame contains non-bit bytes".into()));
                }
                blocks.push(block);
            }
            Ok(blocks)
        };
        let u_blocks = read_blocks()?;
        let x_blocks = read_blocks()?;
        let confusion_bits = schedule
            .confusion_positions()
            .into_iter()
            .map(|(block, i)| u_blocks[block][i])
            .collect();
        Ok(ChainFrame {
            u_blocks,
            x_blocks,
            confusion_bits,
        })
    }
}
