//! Functional-corruptibility measurement.
//!
//! Exhaustive error tables enumerate every (input sequence, key
//! sequence) pair of a locked circuit and compare the functional-phase
//! outputs against the original circuit; Monte-Carlo estimation samples
//! the same space uniformly. Closed-form predictions cover both lock
//! modes.

use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::bits::BitSequence;
use crate::lock::{LockConfig, LockMode, LockedCircuit};
use crate::netlist::{Circuit, Simulator};

/// Enumerating more than this many (input, key) bits is refused.
pub const ENUMERATION_BOUND_BITS: usize = 24;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("(kappa + b) * |I| = {0} exceeds the {ENUMERATION_BOUND_BITS}-bit enumeration bound")]
    EnumerationBound(usize),
    #[error("samples must be at least 1")]
    NoSamples,
    #[error("simulation failed: {0}")]
    Simulate(String),
}

/// Exhaustive error matrix over all input and key sequences.
///
/// Row index is the big-endian unsigned value of the input sequence,
/// column index the value of the key sequence.
#[derive(Clone, Debug)]
pub struct ErrorTable {
    pub depth: usize,
    pub kappa: usize,
    pub input_width: usize,
    /// Row-major bit matrix, one bit per (input, key) pair.
    matrix: Vec<bool>,
    pub rows: usize,
    pub cols: usize,
    pub error_count: u64,
}

impl ErrorTable {
    pub fn entry(&self, input_value: u128, key_value: u128) -> bool {
        self.matrix[input_value as usize * self.cols + key_value as usize]
    }

    /// Number of error-free entries.
    pub fn error_free_count(&self) -> u64 {
        (self.rows as u64) * (self.cols as u64) - self.error_count
    }

    /// Exact functional corruptibility: errors over all pairs.
    pub fn fc(&self) -> f64 {
        self.error_count as f64 / (self.rows as f64 * self.cols as f64)
    }

    /// Portable bitmap (P1) rendering, one pixel per entry: rows are
    /// input sequences, columns are key sequences, `1` marks an error.
    pub fn write_pbm<W: Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(w, "P1")?;
        writeln!(w, "{} {}", self.cols, self.rows)?;
        for r in 0..self.rows {
            let row: Vec<&str> = (0..self.cols)
                .map(|c| {
                    if self.matrix[r * self.cols + c] {
                        "1"
                    } else {
                        "0"
                    }
                })
                .collect();
            writeln!(w, "{}", row.join(" "))?;
        }
        Ok(())
    }

    /// CSV rendering with key values as header and input values as row
    /// labels.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> io::Result<()> {
        let header: Vec<String> = (0..self.cols).map(|c| c.to_string()).collect();
        writeln!(w, "input\\key,{}", header.join(","))?;
        for r in 0..self.rows {
            let row: Vec<&str> = (0..self.cols)
                .map(|c| {
                    if self.matrix[r * self.cols + c] {
                        "1"
                    } else {
                        "0"
                    }
                })
                .collect();
            writeln!(w, "{},{}", r, row.join(","))?;
        }
        Ok(())
    }
}

/// Builds the exhaustive error table of `locked` against `oracle` at
/// functional depth `b`.
pub fn build_error_table(
    locked: &LockedCircuit,
    oracle: &Circuit,
    b: usize,
) -> Result<ErrorTable, EvalError> {
    let cfg = &locked.config;
    let width = cfg.input_width();
    let kappa = cfg.kappa();
    let total_bits = (kappa + b) * width;
    if total_bits > ENUMERATION_BOUND_BITS {
        return Err(EvalError::EnumerationBound(total_bits));
    }
    let rows = 1usize << (b * width);
    let cols = 1usize << (kappa * width);
    let mut matrix = vec![false; rows * cols];
    let mut error_count = 0u64;

    let locked_sim = Simulator::new(&locked.circuit);
    let oracle_sim = Simulator::new(oracle);

    // Oracle responses depend only on the input sequence; compute once
    // per row.
    let mut oracle_out = Vec::with_capacity(rows);
    for iv in 0..rows {
        let i = BitSequence::from_unsigned(iv as u128, b, width).expect("in range");
        let out = oracle_sim
            .run(&i, b)
            .map_err(|e| EvalError::Simulate(e.to_string()))?;
        oracle_out.push(out);
    }

    for kv in 0..cols {
        let k = BitSequence::from_unsigned(kv as u128, kappa, width).expect("in range");
        for iv in 0..rows {
            let i = BitSequence::from_unsigned(iv as u128, b, width).expect("in range");
            let total = k.concat(&i);
            let out = locked_sim
                .run(&total, kappa + b)
                .map_err(|e| EvalError::Simulate(e.to_string()))?;
            let functional = out.range(kappa + 1, kappa + b).expect("depth >= 1");
            if functional != oracle_out[iv] {
                matrix[iv * cols + kv] = true;
                error_count += 1;
            }
        }
    }

    Ok(ErrorTable {
        depth: b,
        kappa,
        input_width: width,
        matrix,
        rows,
        cols,
        error_count,
    })
}

/// How `estimate_fc` draws its pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SampleMode {
    /// Uniform independent draws of (input, key).
    Random,
    /// Census over the whole space; `samples` is ignored and the
    /// estimate is exact.
    Exhaustive,
}

#[derive(Clone, Debug, Serialize)]
pub struct DepthFc {
    pub depth: usize,
    pub fc: f64,
}

/// A Monte-Carlo (or census) estimate of functional corruptibility.
#[derive(Clone, Debug, Serialize)]
pub struct FcEstimate {
    pub estimate: f64,
    pub samples: u64,
    /// `sqrt(p (1 - p) / n)`; zero in census mode.
    pub std_error: f64,
    /// Estimates per functional depth, when a sweep was requested.
    pub per_depth: Vec<DepthFc>,
}

fn fc_at_depth(
    locked: &LockedCircuit,
    oracle: &Circuit,
    b: usize,
    samples: u64,
    mode: SampleMode,
    rng: &mut ChaCha8Rng,
) -> Result<(f64, u64), EvalError> {
    let cfg = &locked.config;
    let width = cfg.input_width();
    let kappa = cfg.kappa();
    let locked_sim = Simulator::new(&locked.circuit);
    let oracle_sim = Simulator::new(oracle);
    let run_pair = |i: &BitSequence, k: &BitSequence| -> Result<bool, EvalError> {
        let reference = oracle_sim
            .run(i, b)
            .map_err(|e| EvalError::Simulate(e.to_string()))?;
        let total = k.concat(i);
        let out = locked_sim
            .run(&total, kappa + b)
            .map_err(|e| EvalError::Simulate(e.to_string()))?;
        Ok(out.range(kappa + 1, kappa + b).expect("b >= 1") != reference)
    };
    match mode {
        SampleMode::Exhaustive => {
            let total_bits = (kappa + b) * width;
            if total_bits > ENUMERATION_BOUND_BITS {
                return Err(EvalError::EnumerationBound(total_bits));
            }
            let rows = 1u64 << (b * width);
            let cols = 1u64 << (kappa * width);
            let mut errors = 0u64;
            for kv in 0..cols {
                let k = BitSequence::from_unsigned(kv as u128, kappa, width).expect("in range");
                for iv in 0..rows {
                    let i = BitSequence::from_unsigned(iv as u128, b, width).expect("in range");
                    if run_pair(&i, &k)? {
                        errors += 1;
                    }
                }
            }
            Ok((errors as f64 / (rows as f64 * cols as f64), rows * cols))
        }
        SampleMode::Random => {
            if samples == 0 {
                return Err(EvalError::NoSamples);
            }
            let mut errors = 0u64;
            for _ in 0..samples {
                let ibits: Vec<bool> = (0..b * width).map(|_| rng.gen()).collect();
                let kbits: Vec<bool> = (0..kappa * width).map(|_| rng.gen()).collect();
                let i = BitSequence::new(ibits, width).expect("width divides");
                let k = BitSequence::new(kbits, width).expect("width divides");
                if run_pair(&i, &k)? {
                    errors += 1;
                }
            }
            Ok((errors as f64 / samples as f64, samples))
        }
    }
}

/// Estimates FC at functional depth `b` from uniform (input, key)
/// samples; deterministic under `rng_seed`.
pub fn estimate_fc(
    locked: &LockedCircuit,
    oracle: &Circuit,
    b: usize,
    samples: u64,
    mode: SampleMode,
    rng_seed: u64,
) -> Result<FcEstimate, EvalError> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let (p, n) = fc_at_depth(locked, oracle, b, samples, mode, &mut rng)?;
    let std_error = match mode {
        SampleMode::Exhaustive => 0.0,
        SampleMode::Random => (p * (1.0 - p) / n as f64).sqrt(),
    };
    Ok(FcEstimate {
        estimate: p,
        samples: n,
        std_error,
        per_depth: vec![DepthFc { depth: b, fc: p }],
    })
}

/// Sweeps depths `kappa_s ..= kappa_s + 5` and reports the mean
/// estimate across depths alongside the per-depth values.
pub fn estimate_fc_depth_profile(
    locked: &LockedCircuit,
    oracle: &Circuit,
    samples: u64,
    rng_seed: u64,
) -> Result<FcEstimate, EvalError> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let start = locked.config.kappa_s;
    let mut per_depth = Vec::new();
    let mut total_n = 0u64;
    for b in start..=start + 5 {
        let (p, n) = fc_at_depth(locked, oracle, b, samples, SampleMode::Random, &mut rng)?;
        per_depth.push(DepthFc { depth: b, fc: p });
        total_n += n;
    }
    let mean = per_depth.iter().map(|d| d.fc).sum::<f64>() / per_depth.len() as f64;
    let std_error = (mean * (1.0 - mean) / total_n as f64).sqrt();
    Ok(FcEstimate {
        estimate: mean,
        samples: total_n,
        std_error,
        per_depth,
    })
}

/// Closed-form FC prediction: `alpha * (1 - 2^-(kappa_f |I|))` for the
/// tuned scheme, `2^-(kappa |I|)` for the baseline.
pub fn predict_fc(cfg: &LockConfig, input_width: usize) -> f64 {
    match cfg.mode {
        LockMode::TriLock => {
            let nf = (1u128 << (cfg.kappa_f * input_width)) as f64;
            cfg.alpha * (1.0 - 1.0 / nf)
        }
        LockMode::NaiveBaseline => {
            let nk = (cfg.kappa() * input_width) as f64;
            0.5f64.powf(nk)
        }
    }
}

/// The FC ceiling when every selectable pair carries an error:
/// `1 - 2^-(kappa_f |I|)`.
pub fn max_fc(cfg: &LockConfig, input_width: usize) -> f64 {
    match cfg.mode {
        LockMode::TriLock => {
            let nf = (1u128 << (cfg.kappa_f * input_width)) as f64;
            1.0 - 1.0 / nf
        }
        LockMode::NaiveBaseline => predict_fc(cfg, input_width),
    }
}

/// Half-width of the deviation allowed between measured FC and the
/// closed-form target: the floor discretization of the threshold plus
/// the prefix point-function mass.
pub fn fc_discretization_band(cfg: &LockConfig, input_width: usize) -> f64 {
    let ns = (1u128 << (cfg.kappa_s * input_width)) as f64;
    let nf = (1u128 << (cfg.kappa_f * input_width)) as f64;
    (1.0 + 1.0 / ns) / nf + 1.0 / ns
}

/// Structural overhead proxies: percentage increases in gate and
/// flip-flop counts.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct OverheadProxy {
    pub gate_pct: f64,
    pub ff_pct: f64,
}

pub fn overhead_proxy(original: &Circuit, locked: &Circuit) -> OverheadProxy {
    let pct = |before: usize, after: usize| -> f64 {
        if before == 0 {
            return 0.0;
        }
        100.0 * (after as f64 - before as f64) / before as f64
    };
    OverheadProxy {
        gate_pct: pct(original.gate_count(), locked.gate_count()),
        ff_pct: pct(original.ff_count(), locked.ff_count()),
    }
}
