//! The locking transformation and its closed-form error predictors.
//!
//! A locked circuit consumes a key sequence on its primary inputs
//! during cycles `1..=kappa`, holding the original registers stalled,
//! then runs the original logic. An error generator raises a sticky
//! error flag for wrong keys according to the scheme's error function;
//! output and state error handlers invert a configurable number of
//! primary outputs and original register inputs while the flag is set.
//!
//! Two error functions are available:
//!
//! - the point-function baseline: an error fires iff the key is wrong
//!   and the functional inputs replay the whole key;
//! - the split scheme: a prefix point function over the first `kappa_s`
//!   key cycles guarantees the SAT-resilience floor, and a suffix
//!   comparator against a threshold adds tunable corruption on keys
//!   whose suffix is not the designated error-free word.

mod transform;

pub use transform::lock;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::bits::BitSequence;
use crate::netlist::{Circuit, RegisterTag};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LockMode {
    TriLock,
    NaiveBaseline,
}

impl LockMode {
    pub fn name(self) -> &'static str {
        match self {
            LockMode::TriLock => "TriLock",
            LockMode::NaiveBaseline => "NaiveBaseline",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "TriLock" => Some(LockMode::TriLock),
            "NaiveBaseline" => Some(LockMode::NaiveBaseline),
            _ => None,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum LockError {
    #[error("kappa_s must be at least 1")]
    KappaSZero,
    #[error("TriLock mode requires kappa_f >= 1")]
    KappaFZero,
    #[error("NaiveBaseline mode requires kappa_f = 0")]
    KappaFNonZeroNaive,
    #[error("alpha must lie strictly between 0 and 1, got {0}")]
    AlphaOutOfRange(f64),
    #[error("k* must span {want} cycles, got {got}")]
    KStarCycles { want: usize, got: usize },
    #[error("k** must span {want} cycles, got {got}")]
    KDoubleStarCycles { want: usize, got: usize },
    #[error("key cycle width {got} does not match circuit input count {want}")]
    KeyWidth { want: usize, got: usize },
    #[error("k** must differ from the last kappa_f cycles of k*")]
    KDoubleStarEqualsKStarSuffix,
    #[error("po_invert_count must be at least 1")]
    NoOutputHandler,
    #[error("po_invert_count {got} exceeds output count {have}")]
    TooManyOutputs { got: usize, have: usize },
    #[error("ff_invert_count {got} exceeds original register count {have}")]
    TooManyRegisters { got: usize, have: usize },
    #[error("suffix width kappa_f * |I| = {0} exceeds 120 bits")]
    SuffixTooWide(usize),
    #[error("threshold override {got} exceeds maximum suffix value {max}")]
    ThresholdTooLarge { got: u128, max: u128 },
    #[error("sequence length mismatch: {0}")]
    LengthMismatch(String),
    #[error("circuit invariant violated during locking: {0}")]
    Circuit(#[from] crate::netlist::CircuitError),
}

/// All parameters of the locking transformation.
#[derive(Clone, Debug, PartialEq)]
pub struct LockConfig {
    /// Key cycles devoted to SAT hardening (prefix point function).
    pub kappa_s: usize,
    /// Key cycles devoted to corruptibility tuning (0 in baseline mode).
    pub kappa_f: usize,
    /// Fraction of the suffix space selected for extra errors.
    pub alpha: f64,
    /// The correct key sequence, `kappa` cycles of `|I|` bits.
    pub k_star: BitSequence,
    /// The designated error-free suffix, `kappa_f` cycles.
    pub k_double_star: BitSequence,
    /// Primary outputs driven by the output error handler.
    pub po_invert_count: usize,
    /// Original registers driven by the state error handler.
    pub ff_invert_count: usize,
    pub mode: LockMode,
    /// Diagnostic override for the suffix threshold; `Some(2^(kappa_f*|I|) - 1)`
    /// selects every non-`k**` suffix (the maximum-corruption variant).
    pub threshold_override: Option<u128>,
}

impl LockConfig {
    /// A baseline-mode configuration (`kappa = kappa_s`, no suffix logic).
    pub fn naive(kappa: usize, k_star: BitSequence) -> Self {
        let width = k_star.cycle_width();
        LockConfig {
            kappa_s: kappa,
            kappa_f: 0,
            alpha: 0.5,
            k_star,
            k_double_star: BitSequence::zeros(0, width),
            po_invert_count: 1,
            ff_invert_count: 0,
            mode: LockMode::NaiveBaseline,
            threshold_override: None,
        }
    }

    pub fn kappa(&self) -> usize {
        self.kappa_s + self.kappa_f
    }

    /// Cycle width shared by keys and inputs.
    pub fn input_width(&self) -> usize {
        self.k_star.cycle_width()
    }

    /// Width of the tuning suffix in bits.
    pub fn suffix_bits(&self) -> usize {
        self.kappa_f * self.input_width()
    }

    /// The error-selection threshold: suffixes with unsigned value at
    /// most this are corrupted. `floor(alpha * (2^suffix_bits - 1))`
    /// unless overridden.
    pub fn threshold(&self) -> u128 {
        if let Some(t) = self.threshold_override {
            return t;
        }
        let max = (1u128 << self.suffix_bits()) - 1;
        (self.alpha * max as f64).floor() as u128
    }

    /// The last `kappa_f` cycles of `k*`.
    pub fn k_star_suffix(&self) -> BitSequence {
        if self.kappa_f == 0 {
            return BitSequence::zeros(0, self.input_width());
        }
        self.k_star
            .range(self.kappa_s + 1, self.kappa())
            .expect("validated k*")
    }

    /// Checks internal consistency and, when a circuit is given, the
    /// fit against its input/output/register counts.
    pub fn validate(&self, circuit: Option<&Circuit>) -> Result<(), LockError> {
        if self.kappa_s == 0 {
            return Err(LockError::KappaSZero);
        }
        match self.mode {
            LockMode::TriLock if self.kappa_f == 0 => return Err(LockError::KappaFZero),
            LockMode::NaiveBaseline if self.kappa_f != 0 => {
                return Err(LockError::KappaFNonZeroNaive)
            }
            _ => {}
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(LockError::AlphaOutOfRange(self.alpha));
        }
        if self.k_star.cycles() != self.kappa() {
            return Err(LockError::KStarCycles {
                want: self.kappa(),
                got: self.k_star.cycles(),
            });
        }
        if self.k_double_star.cycles() != self.kappa_f {
            return Err(LockError::KDoubleStarCycles {
                want: self.kappa_f,
                got: self.k_double_star.cycles(),
            });
        }
        if self.k_double_star.cycle_width() != self.input_width() {
            return Err(LockError::KeyWidth {
                want: self.input_width(),
                got: self.k_double_star.cycle_width(),
            });
        }
        if self.mode == LockMode::TriLock {
            if self.suffix_bits() > 120 {
                return Err(LockError::SuffixTooWide(self.suffix_bits()));
            }
            if self.k_double_star == self.k_star_suffix() {
                return Err(LockError::KDoubleStarEqualsKStarSuffix);
            }
            let max = (1u128 << self.suffix_bits()) - 1;
            if let Some(t) = self.threshold_override {
                if t > max {
                    return Err(LockError::ThresholdTooLarge { got: t, max });
                }
            }
        }
        if self.po_invert_count == 0 {
            return Err(LockError::NoOutputHandler);
        }
        if let Some(c) = circuit {
            if self.input_width() != c.input_count() {
                return Err(LockError::KeyWidth {
                    want: c.input_count(),
                    got: self.input_width(),
                });
            }
            if self.po_invert_count > c.output_count() {
                return Err(LockError::TooManyOutputs {
                    got: self.po_invert_count,
                    have: c.output_count(),
                });
            }
            if self.ff_invert_count > c.ff_count() {
                return Err(LockError::TooManyRegisters {
                    got: self.ff_invert_count,
                    have: c.ff_count(),
                });
            }
        }
        Ok(())
    }
}

/// Output nets of the sticky error flags.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlagNets {
    pub error_s: String,
    /// Absent in baseline mode.
    pub error_f: Option<String>,
}

/// A circuit produced by [`lock`], together with its parameters.
#[derive(Clone, Debug)]
pub struct LockedCircuit {
    pub circuit: Circuit,
    pub config: LockConfig,
    pub flag_nets: FlagNets,
}

impl LockedCircuit {
    /// Simulates key entry followed by the functional phase and returns
    /// only the functional-phase outputs (`inputs.cycles()` cycles).
    pub fn simulate_functional(
        &self,
        key: &BitSequence,
        inputs: &BitSequence,
    ) -> Result<BitSequence, LockError> {
        if key.cycles() != self.config.kappa() {
            return Err(LockError::LengthMismatch(format!(
                "key spans {} cycles, expected {}",
                key.cycles(),
                self.config.kappa()
            )));
        }
        let total = key.concat(inputs);
        let out = self
            .circuit
            .simulate(&total, total.cycles())
            .map_err(|e| LockError::LengthMismatch(e.to_string()))?;
        out.range(self.config.kappa() + 1, total.cycles())
            .map_err(|e| LockError::LengthMismatch(e.to_string()))
    }

    /// Registers added by the transformation, by output net name.
    pub fn extra_registers(&self) -> Vec<String> {
        self.circuit
            .flipflops()
            .iter()
            .zip(self.circuit.register_tags())
            .filter(|(_, t)| t.is_lock_inserted())
            .map(|(ff, _)| ff.output.clone())
            .collect()
    }
}

fn check_pair(i: &BitSequence, k: &BitSequence, cfg: &LockConfig) -> Result<(), LockError> {
    let width = cfg.input_width();
    if i.cycle_width() != width || k.cycle_width() != width {
        return Err(LockError::LengthMismatch(format!(
            "cycle width mismatch: i={}, k={}, |I|={}",
            i.cycle_width(),
            k.cycle_width(),
            width
        )));
    }
    if k.cycles() != cfg.kappa() {
        return Err(LockError::LengthMismatch(format!(
            "key spans {} cycles, expected {}",
            k.cycles(),
            cfg.kappa()
        )));
    }
    if i.cycles() < cfg.kappa_s {
        return Err(LockError::LengthMismatch(format!(
            "input spans {} cycles, needs at least kappa_s = {}",
            i.cycles(),
            cfg.kappa_s
        )));
    }
    Ok(())
}

/// Prefix point-function error: fires iff the key is wrong and its
/// first `kappa_s` cycles equal the first `kappa_s` functional input
/// cycles.
pub fn predict_error_s(
    i: &BitSequence,
    k: &BitSequence,
    cfg: &LockConfig,
) -> Result<bool, LockError> {
    check_pair(i, k, cfg)?;
    let ks = cfg.kappa_s;
    Ok(*k != cfg.k_star && k.range(1, ks).expect("checked") == i.range(1, ks).expect("checked"))
}

/// Suffix-tuned error: fires iff the key is wrong, its suffix differs
/// from `k**`, and the suffix value is at most the threshold.
pub fn predict_error_f(k: &BitSequence, cfg: &LockConfig) -> Result<bool, LockError> {
    if cfg.mode != LockMode::TriLock {
        return Ok(false);
    }
    if k.cycles() != cfg.kappa() || k.cycle_width() != cfg.input_width() {
        return Err(LockError::LengthMismatch(format!(
            "key {}x{} does not match kappa={} |I|={}",
            k.cycles(),
            k.cycle_width(),
            cfg.kappa(),
            cfg.input_width()
        )));
    }
    let suffix = k
        .range(cfg.kappa() - cfg.kappa_f + 1, cfg.kappa())
        .expect("checked");
    Ok(suffix != cfg.k_double_star && *k != cfg.k_star && suffix.to_unsigned() <= cfg.threshold())
}

/// The combined error function: disjunction of the prefix and suffix
/// predictors.
pub fn predict_error_sf(
    i: &BitSequence,
    k: &BitSequence,
    cfg: &LockConfig,
) -> Result<bool, LockError> {
    Ok(predict_error_s(i, k, cfg)? || predict_error_f(k, cfg)?)
}

/// Baseline point-function error: fires iff the key is wrong and the
/// functional inputs replay the full key.
pub fn predict_error_naive(
    i: &BitSequence,
    k: &BitSequence,
    cfg: &LockConfig,
) -> Result<bool, LockError> {
    let kappa = cfg.kappa();
    if i.cycles() < kappa {
        return Err(LockError::LengthMismatch(format!(
            "input spans {} cycles, needs at least kappa = {kappa}",
            i.cycles()
        )));
    }
    check_pair(i, k, cfg)?;
    Ok(*k != cfg.k_star && i.range(1, kappa).expect("checked") == *k)
}

/// Dispatches on the configured mode.
pub fn predict_error(
    i: &BitSequence,
    k: &BitSequence,
    cfg: &LockConfig,
) -> Result<bool, LockError> {
    match cfg.mode {
        LockMode::TriLock => predict_error_sf(i, k, cfg),
        LockMode::NaiveBaseline => predict_error_naive(i, k, cfg),
    }
}

#[derive(Debug, Error)]
pub enum MetadataError {
    #[error("line {0}: expected `key = value`")]
    BadLine(usize),
    #[error("missing field `{0}`")]
    Missing(&'static str),
    #[error("field `{field}`: {msg}")]
    BadValue { field: String, msg: String },
}

/// Sidecar metadata written next to a locked `.bench` file.
#[derive(Clone, Debug, PartialEq)]
pub struct LockMetadata {
    pub name: String,
    pub config: LockConfig,
    pub flag_nets: FlagNets,
    pub seed: u64,
    pub register_tags: BTreeMap<String, RegisterTag>,
}

impl LockMetadata {
    pub fn from_locked(locked: &LockedCircuit, seed: u64) -> Self {
        let register_tags = locked
            .circuit
            .flipflops()
            .iter()
            .zip(locked.circuit.register_tags())
            .map(|(ff, &t)| (ff.output.clone(), t))
            .collect();
        LockMetadata {
            name: locked.circuit.name().to_string(),
            config: locked.config.clone(),
            flag_nets: locked.flag_nets.clone(),
            seed,
            register_tags,
        }
    }

    /// Line-oriented `key = value` rendering; keys and the error-free
    /// word are grouped per cycle.
    pub fn to_string_lossless(&self) -> String {
        let cfg = &self.config;
        let mut s = String::new();
        s.push_str("schema = 1\n");
        s.push_str(&format!("name = {}\n", self.name));
        s.push_str(&format!("mode = {}\n", cfg.mode.name()));
        s.push_str(&format!("kappa_s = {}\n", cfg.kappa_s));
        s.push_str(&format!("kappa_f = {}\n", cfg.kappa_f));
        s.push_str(&format!("alpha = {}\n", cfg.alpha));
        s.push_str(&format!("threshold = {}\n", cfg.threshold()));
        s.push_str(&format!("k_star = {}\n", cfg.k_star.to_grouped_string()));
        if cfg.kappa_f > 0 {
            s.push_str(&format!(
                "k_double_star = {}\n",
                cfg.k_double_star.to_grouped_string()
            ));
        }
        s.push_str(&format!("po_invert_count = {}\n", cfg.po_invert_count));
        s.push_str(&format!("ff_invert_count = {}\n", cfg.ff_invert_count));
        s.push_str(&format!("seed = {}\n", self.seed));
        s.push_str(&format!("flag_es = {}\n", self.flag_nets.error_s));
        if let Some(ef) = &self.flag_nets.error_f {
            s.push_str(&format!("flag_ef = {ef}\n"));
        }
        for (reg, tag) in &self.register_tags {
            s.push_str(&format!("tag.{reg} = {}\n", tag.name()));
        }
        s
    }

    pub fn parse(text: &str, input_width: usize) -> Result<Self, MetadataError> {
        let mut fields: BTreeMap<String, String> = BTreeMap::new();
        let mut register_tags = BTreeMap::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or(MetadataError::BadLine(idx + 1))?;
            let (key, value) = (key.trim(), value.trim());
            if let Some(reg) = key.strip_prefix("tag.") {
                let tag = RegisterTag::from_name(value).ok_or_else(|| MetadataError::BadValue {
                    field: key.to_string(),
                    msg: format!("unknown tag `{value}`"),
                })?;
                register_tags.insert(reg.to_string(), tag);
            } else {
                fields.insert(key.to_string(), value.to_string());
            }
        }
        let get = |f: &'static str| fields.get(f).ok_or(MetadataError::Missing(f));
        let parse_num = |f: &'static str| -> Result<usize, MetadataError> {
            get(f)?.parse().map_err(|_| MetadataError::BadValue {
                field: f.to_string(),
                msg: "not an integer".to_string(),
            })
        };
        let mode = LockMode::from_name(get("mode")?).ok_or_else(|| MetadataError::BadValue {
            field: "mode".to_string(),
            msg: "unknown mode".to_string(),
        })?;
        let kappa_s = parse_num("kappa_s")?;
        let kappa_f = parse_num("kappa_f")?;
        let alpha: f64 = get("alpha")?.parse().map_err(|_| MetadataError::BadValue {
            field: "alpha".to_string(),
            msg: "not a number".to_string(),
        })?;
        let bits = |f: &'static str, cycles: usize| -> Result<BitSequence, MetadataError> {
            let text = get(f)?;
            let seq = BitSequence::from_bit_str(text, input_width).map_err(|e| {
                MetadataError::BadValue {
                    field: f.to_string(),
                    msg: e.to_string(),
                }
            })?;
            if seq.cycles() != cycles {
                return Err(MetadataError::BadValue {
                    field: f.to_string(),
                    msg: format!("expected {cycles} cycles, got {}", seq.cycles()),
                });
            }
            Ok(seq)
        };
        let k_star = bits("k_star", kappa_s + kappa_f)?;
        let k_double_star = if kappa_f > 0 {
            bits("k_double_star", kappa_f)?
        } else {
            BitSequence::zeros(0, input_width)
        };
        let mut config = LockConfig {
            kappa_s,
            kappa_f,
            alpha,
            k_star,
            k_double_star,
            po_invert_count: parse_num("po_invert_count")?,
            ff_invert_count: parse_num("ff_invert_count")?,
            mode,
            threshold_override: None,
        };
        // A recorded threshold that disagrees with the recomputed one
        // was an explicit override; keep it effective.
        if let Some(t) = fields.get("threshold") {
            let t: u128 = t.parse().map_err(|_| MetadataError::BadValue {
                field: "threshold".to_string(),
                msg: "not an integer".to_string(),
            })?;
            if mode == LockMode::TriLock && t != config.threshold() {
                config.threshold_override = Some(t);
            }
        }
        let seed: u64 = get("seed")?.parse().map_err(|_| MetadataError::BadValue {
            field: "seed".to_string(),
            msg: "not an integer".to_string(),
        })?;
        Ok(LockMetadata {
            name: get("name")?.clone(),
            config,
            flag_nets: FlagNets {
                error_s: get("flag_es")?.clone(),
                error_f: fields.get("flag_ef").cloned(),
            },
            seed,
            register_tags,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The toy parameter set used throughout: |I|=2, kappa_s=2,
    /// kappa_f=1, k* = 10 01 01, k** = 11, alpha = 0.6.
    pub fn toy_config() -> LockConfig {
        LockConfig {
            kappa_s: 2,
            kappa_f: 1,
            alpha: 0.6,
            k_star: BitSequence::from_bit_str("100101", 2).unwrap(),
            k_double_star: BitSequence::from_bit_str("11", 2).unwrap(),
            po_invert_count: 1,
            ff_invert_count: 0,
            mode: LockMode::TriLock,
            threshold_override: None,
        }
    }

    #[test]
    fn toy_threshold_is_one() {
        // floor(0.6 * (2^2 - 1)) = floor(1.8) = 1.
        assert_eq!(toy_config().threshold(), 1);
    }

    #[test]
    fn error_s_fires_on_matching_prefix_of_wrong_key() {
        let cfg = toy_config();
        let i = BitSequence::from_bit_str("1001", 2).unwrap();
        let k = BitSequence::from_bit_str("100111", 2).unwrap();
        assert!(predict_error_s(&i, &k, &cfg).unwrap());
        // The correct key never errs.
        assert!(!predict_error_s(&i, &cfg.k_star.clone(), &cfg).unwrap());
        // Prefix mismatch never errs.
        let i0 = BitSequence::from_bit_str("0000", 2).unwrap();
        assert!(!predict_error_s(&i0, &k, &cfg).unwrap());
    }

    #[test]
    fn error_f_follows_suffix_threshold() {
        let cfg = toy_config();
        // Suffix 00 has value 0 <= 1, differs from k** and from k*.
        let k = BitSequence::from_bit_str("000000", 2).unwrap();
        assert!(predict_error_f(&k, &cfg).unwrap());
        // Suffix equal to k** is excluded.
        let k = BitSequence::from_bit_str("000011", 2).unwrap();
        assert!(!predict_error_f(&k, &cfg).unwrap());
        // k* itself is excluded.
        assert!(!predict_error_f(&cfg.k_star.clone(), &cfg).unwrap());
        // Suffix above threshold is not selected: 10 has value 2 > 1.
        let k = BitSequence::from_bit_str("000010", 2).unwrap();
        assert!(!predict_error_f(&k, &cfg).unwrap());
    }

    #[test]
    fn error_f_matches_hand_enumeration() {
        // Independent oracle: enumerate all keys and evaluate the set
        // membership conditions directly from their definitions.
        let cfg = toy_config();
        let threshold = 1u128; // floor(0.6 * 3)
        for kv in 0..64u128 {
            let k = BitSequence::from_unsigned(kv, 3, 2).unwrap();
            let suffix_val = kv & 0b11;
            let in_p_b = suffix_val != 0b11 && k != cfg.k_star;
            let selected = suffix_val <= threshold;
            let expected = in_p_b && selected;
            assert_eq!(predict_error_f(&k, &cfg).unwrap(), expected, "key {kv:06b}");
        }
    }

    #[test]
    fn error_sf_is_the_disjunction() {
        let cfg = toy_config();
        let i = BitSequence::from_bit_str("1001", 2).unwrap();
        let k_s = BitSequence::from_bit_str("100111", 2).unwrap();
        let k_f = BitSequence::from_bit_str("000000", 2).unwrap();
        assert!(predict_error_sf(&i, &k_s, &cfg).unwrap());
        assert!(predict_error_sf(&i, &k_f, &cfg).unwrap());
        assert!(!predict_error_sf(&i, &cfg.k_star.clone(), &cfg).unwrap());
    }

    #[test]
    fn naive_error_is_a_point_function() {
        let k_star = BitSequence::from_bit_str("1001", 2).unwrap();
        let cfg = LockConfig::naive(2, k_star.clone());
        // k = i prefix and k wrong: fires.
        let k = BitSequence::from_bit_str("0110", 2).unwrap();
        let i = BitSequence::from_bit_str("0110", 2).unwrap();
        assert!(predict_error_naive(&i, &k, &cfg).unwrap());
        assert!(!predict_error_naive(&i, &k_star, &cfg).unwrap());
        // Error count over the full table: (2^(kappa|I|) - 1) * 2^((b-kappa)|I|).
        let mut count = 0;
        for iv in 0..16u128 {
            for kv in 0..16u128 {
                let i = BitSequence::from_unsigned(iv, 2, 2).unwrap();
                let k = BitSequence::from_unsigned(kv, 2, 2).unwrap();
                if predict_error_naive(&i, &k, &cfg).unwrap() {
                    count += 1;
                }
            }
        }
        assert_eq!(count, 15);
    }

    #[test]
    fn config_validation_catches_bad_kdstar() {
        let mut cfg = toy_config();
        cfg.k_double_star = cfg.k_star_suffix();
        assert_eq!(
            cfg.validate(None),
            Err(LockError::KDoubleStarEqualsKStarSuffix)
        );
    }

    #[test]
    fn config_validation_checks_alpha() {
        let mut cfg = toy_config();
        cfg.alpha = 1.0;
        assert!(matches!(
            cfg.validate(None),
            Err(LockError::AlphaOutOfRange(_))
        ));
        cfg.alpha = 0.0;
        assert!(matches!(
            cfg.validate(None),
            Err(LockError::AlphaOutOfRange(_))
        ));
    }

    #[test]
    fn metadata_round_trips_through_text() {
        let cfg = toy_config();
        let meta = LockMetadata {
            name: "toy2".to_string(),
            config: cfg,
            flag_nets: FlagNets {
                error_s: "lk_es".to_string(),
                error_f: Some("lk_ef".to_string()),
            },
            seed: 42,
            register_tags: BTreeMap::from([
                ("s".to_string(), RegisterTag::Original),
                ("lk_wk".to_string(), RegisterTag::Extra),
            ]),
        };
        let text = meta.to_string_lossless();
        let back = LockMetadata::parse(&text, 2).unwrap();
        assert_eq!(meta, back);
    }
}
