//! C ABI for the sequential logic locking toolkit.
//!
//! Conventions:
//!
//! - Handles (`TrilockCircuit`, `TrilockLocked`) are opaque; free them
//!   with the matching `_free` function.
//! - Every fallible call returns a [`TrilockStatus`]; on failure a
//!   human-readable message is available from `trilock_last_error`
//!   until the next call on the same thread.
//! - Strings returned through `char **` out-parameters are owned by
//!   the caller and must be released with `trilock_string_free`.
//! - Key and input sequences cross the boundary as `0`/`1` strings
//!   grouped per cycle (separators space, `.`, `,`, `_` are ignored).

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Duration;

use trilock::attack;
use trilock::bits::BitSequence;
use trilock::eval;
use trilock::lock::{LockConfig, LockMetadata, LockMode, LockedCircuit};
use trilock::netlist::{parse_bench, write_bench, Circuit, RegisterTag};
use trilock::reencode;
use trilock::sat::{SatBackend, SolverLimits};
use trilock::unroll::UnrolledCircuit;

/// Result codes shared by all fallible functions.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TrilockStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    InvalidConfig = 4,
    LockFailed = 5,
    AttackFailed = 6,
    EvalFailed = 7,
    InternalError = 8,
}

/// Attack outcome mirrored into the C ABI.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TrilockAttackStatus {
    KeyRecovered = 0,
    TimedOut = 1,
    ExhaustedDepth = 2,
}

/// Key verification verdict.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TrilockVerdict {
    Equivalent = 0,
    BoundedEquivalent = 1,
    Counterexample = 2,
}

/// An immutable gate-level sequential circuit.
pub struct TrilockCircuit {
    inner: Circuit,
}

/// A locked circuit together with its locking parameters.
pub struct TrilockLocked {
    inner: LockedCircuit,
    seed: u64,
}

/// Structural counts of a circuit.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct TrilockCircuitInfo {
    pub inputs: u32,
    pub outputs: u32,
    pub gates: u32,
    pub flipflops: u32,
}

/// Locking parameters; zero/null fields take their defaults.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct TrilockLockOptions {
    /// Key cycles devoted to SAT hardening (at least 1).
    pub kappa_s: u32,
    /// Key cycles devoted to corruptibility tuning (0 selects the
    /// baseline point-function mode).
    pub kappa_f: u32,
    /// Error-selection fraction in (0, 1).
    pub alpha: f64,
    /// Correct key bits grouped per cycle; null derives one from `seed`.
    pub k_star: *const c_char,
    /// Error-free suffix bits; null derives one from `seed`.
    pub k_double_star: *const c_char,
    /// Primary outputs driven by the output error handler (minimum 1).
    pub po_invert: u32,
    /// Original registers driven by the state error handler.
    pub ff_invert: u32,
    /// Register pairs to re-encode after locking.
    pub reencode_pairs: u32,
    pub seed: u64,
}

/// SAT attack outcome summary.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct TrilockAttackSummary {
    pub status: TrilockAttackStatus,
    pub n_dip: u64,
    pub depth_used: u32,
    pub sat_queries: u64,
    pub wall_time_s: f64,
    pub bounded_verification: bool,
}

/// SCC-level removal-resilience metrics.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct TrilockSccReport {
    pub o_sccs: u32,
    pub e_sccs: u32,
    pub m_sccs: u32,
    /// Percentage of registers inside mixed SCCs.
    pub p_m: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(msg).expect("nul-free");
    });
}

/// The last error message recorded on this thread. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn trilock_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// The crate version as a static string; do not free.
#[no_mangle]
pub extern "C" fn trilock_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must have been returned by a `trilock_*` function and not freed
/// before.
#[no_mangle]
pub unsafe extern "C" fn trilock_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

fn guard<F: FnOnce() -> TrilockStatus>(f: F) -> TrilockStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            TrilockStatus::InternalError
        }
    }
}

unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, TrilockStatus> {
    if ptr.is_null() {
        set_error("null string argument");
        return Err(TrilockStatus::NullPointer);
    }
    CStr::from_ptr(ptr).to_str().map_err(|e| {
        set_error(format!("invalid utf-8: {e}"));
        TrilockStatus::InvalidUtf8
    })
}

fn give_string(out: *mut *mut c_char, text: String) -> TrilockStatus {
    let c = match CString::new(text) {
        Ok(c) => c,
        Err(e) => {
            set_error(format!("string contains nul: {e}"));
            return TrilockStatus::InternalError;
        }
    };
    unsafe { *out = c.into_raw() };
    TrilockStatus::Ok
}

/// Parses `.bench` text into a circuit handle.
///
/// # Safety
/// `bench_text` must be a valid NUL-terminated string and `out` a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn trilock_circuit_parse(
    bench_text: *const c_char,
    out: *mut *mut TrilockCircuit,
) -> TrilockStatus {
    guard(|| {
        if out.is_null() {
            set_error("null out pointer");
            return TrilockStatus::NullPointer;
        }
        let text = match read_str(bench_text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match parse_bench(text) {
            Ok(circuit) => {
                *out = Box::into_raw(Box::new(TrilockCircuit { inner: circuit }));
                TrilockStatus::Ok
            }
            Err(e) => {
                set_error(e.to_string());
                TrilockStatus::ParseError
            }
        }
    })
}

/// Serializes a circuit back to `.bench` text.
///
/// # Safety
/// `circuit` must be a live handle, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn trilock_circuit_write(
    circuit: *const TrilockCircuit,
    out: *mut *mut c_char,
) -> TrilockStatus {
    guard(|| {
        let Some(c) = circuit.as_ref() else {
            set_error("null circuit");
            return TrilockStatus::NullPointer;
        };
        if out.is_null() {
            set_error("null out pointer");
            return TrilockStatus::NullPointer;
        }
        give_string(out, write_bench(&c.inner))
    })
}

/// Fills `info` with the circuit's structural counts.
///
/// # Safety
/// Both pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn trilock_circuit_info(
    circuit: *const TrilockCircuit,
    info: *mut TrilockCircuitInfo,
) -> TrilockStatus {
    guard(|| {
        let (Some(c), Some(info)) = (circuit.as_ref(), info.as_mut()) else {
            set_error("null pointer");
            return TrilockStatus::NullPointer;
        };
        *info = TrilockCircuitInfo {
            inputs: c.inner.input_count() as u32,
            outputs: c.inner.output_count() as u32,
            gates: c.inner.gate_count() as u32,
            flipflops: c.inner.ff_count() as u32,
        };
        TrilockStatus::Ok
    })
}

/// # Safety
/// `circuit` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn trilock_circuit_free(circuit: *mut TrilockCircuit) {
    if !circuit.is_null() {
        drop(Box::from_raw(circuit));
    }
}

unsafe fn build_config(
    circuit: &Circuit,
    opts: &TrilockLockOptions,
) -> Result<LockConfig, TrilockStatus> {
    use rand::Rng;
    let width = circuit.input_count();
    let naive = opts.kappa_f == 0;
    let kappa_s = opts.kappa_s as usize;
    let kappa_f = opts.kappa_f as usize;
    let kappa = kappa_s + kappa_f;
    let mut rng = rand_chacha_rng(opts.seed);
    let parse_seq = |ptr: *const c_char, cycles: usize| -> Result<BitSequence, TrilockStatus> {
        let text = read_str(ptr)?;
        let seq = BitSequence::from_bit_str(text, width).map_err(|e| {
            set_error(e.to_string());
            TrilockStatus::InvalidConfig
        })?;
        if seq.cycles() != cycles {
            set_error(format!(
                "expected {cycles} cycles of {width} bits, got {}",
                seq.cycles()
            ));
            return Err(TrilockStatus::InvalidConfig);
        }
        Ok(seq)
    };
    let k_star = if opts.k_star.is_null() {
        BitSequence::new((0..kappa * width).map(|_| rng.gen()).collect(), width)
            .expect("width divides")
    } else {
        parse_seq(opts.k_star, kappa)?
    };
    let k_double_star = if naive {
        BitSequence::zeros(0, width)
    } else if opts.k_double_star.is_null() {
        let suffix = k_star.range(kappa_s + 1, kappa).map_err(|e| {
            set_error(e.to_string());
            TrilockStatus::InvalidConfig
        })?;
        let mut bits: Vec<bool> = (0..kappa_f * width).map(|_| rng.gen()).collect();
        if BitSequence::new(bits.clone(), width).expect("width divides") == suffix {
            let last = bits.len() - 1;
            bits[last] = !bits[last];
        }
        BitSequence::new(bits, width).expect("width divides")
    } else {
        parse_seq(opts.k_double_star, kappa_f)?
    };
    Ok(LockConfig {
        kappa_s,
        kappa_f,
        alpha: if opts.alpha > 0.0 { opts.alpha } else { 0.6 },
        k_star,
        k_double_star,
        po_invert_count: opts.po_invert.max(1) as usize,
        ff_invert_count: opts.ff_invert as usize,
        mode: if naive {
            LockMode::NaiveBaseline
        } else {
            LockMode::TriLock
        },
        threshold_override: None,
    })
}

fn rand_chacha_rng(seed: u64) -> impl rand::Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0x6b65795f)
}

/// Locks a circuit; `opts.reencode_pairs > 0` also applies state
/// re-encoding.
///
/// # Safety
/// `circuit` and `opts` must be valid, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn trilock_lock(
    circuit: *const TrilockCircuit,
    opts: *const TrilockLockOptions,
    out: *mut *mut TrilockLocked,
) -> TrilockStatus {
    guard(|| {
        let (Some(c), Some(opts)) = (circuit.as_ref(), opts.as_ref()) else {
            set_error("null pointer");
            return TrilockStatus::NullPointer;
        };
        if out.is_null() {
            set_error("null out pointer");
            return TrilockStatus::NullPointer;
        }
        let cfg = match build_config(&c.inner, opts) {
            Ok(cfg) => cfg,
            Err(status) => return status,
        };
        let mut locked = match trilock::lock::lock(&c.inner, &cfg, opts.seed) {
            Ok(l) => l,
            Err(e) => {
                set_error(e.to_string());
                return TrilockStatus::LockFailed;
            }
        };
        if opts.reencode_pairs > 0 {
            let plan = reencode::select_pairs(&locked, opts.reencode_pairs as usize);
            locked = match reencode::insert_encoder_decoder(&locked, &plan) {
                Ok(l) => l,
                Err(e) => {
                    set_error(e.to_string());
                    return TrilockStatus::LockFailed;
                }
            };
        }
        *out = Box::into_raw(Box::new(TrilockLocked {
            inner: locked,
            seed: opts.seed,
        }));
        TrilockStatus::Ok
    })
}

/// Rebuilds a locked-circuit handle from `.bench` text plus its
/// metadata sidecar (as written by `trilock_locked_metadata`).
///
/// # Safety
/// String arguments must be valid NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn trilock_locked_from_parts(
    bench_text: *const c_char,
    metadata_text: *const c_char,
    out: *mut *mut TrilockLocked,
) -> TrilockStatus {
    guard(|| {
        if out.is_null() {
            set_error("null out pointer");
            return TrilockStatus::NullPointer;
        }
        let bench = match read_str(bench_text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let meta = match read_str(metadata_text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let circuit = match parse_bench(bench) {
            Ok(c) => c,
            Err(e) => {
                set_error(e.to_string());
                return TrilockStatus::ParseError;
            }
        };
        let metadata = match LockMetadata::parse(meta, circuit.input_count()) {
            Ok(m) => m,
            Err(e) => {
                set_error(e.to_string());
                return TrilockStatus::InvalidConfig;
            }
        };
        let tags: Vec<RegisterTag> = circuit
            .flipflops()
            .iter()
            .map(|ff| {
                metadata
                    .register_tags
                    .get(&ff.output)
                    .copied()
                    .unwrap_or(RegisterTag::Original)
            })
            .collect();
        let circuit = match circuit.with_register_tags(tags) {
            Ok(c) => c,
            Err(e) => {
                set_error(e.to_string());
                return TrilockStatus::InvalidConfig;
            }
        };
        *out = Box::into_raw(Box::new(TrilockLocked {
            inner: LockedCircuit {
                circuit,
                config: metadata.config.clone(),
                flag_nets: metadata.flag_nets.clone(),
            },
            seed: metadata.seed,
        }));
        TrilockStatus::Ok
    })
}

/// The locked netlist as `.bench` text.
///
/// # Safety
/// `locked` must be a live handle, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn trilock_locked_bench(
    locked: *const TrilockLocked,
    out: *mut *mut c_char,
) -> TrilockStatus {
    guard(|| {
        let Some(l) = locked.as_ref() else {
            set_error("null locked handle");
            return TrilockStatus::NullPointer;
        };
        if out.is_null() {
            set_error("null out pointer");
            return TrilockStatus::NullPointer;
        }
        give_string(out, write_bench(&l.inner.circuit))
    })
}

/// The metadata sidecar text for a locked circuit.
///
/// # Safety
/// `locked` must be a live handle, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn trilock_locked_metadata(
    locked: *const TrilockLocked,
    out: *mut *mut c_char,
) -> TrilockStatus {
    guard(|| {
        let Some(l) = locked.as_ref() else {
            set_error("null locked handle");
            return TrilockStatus::NullPointer;
        };
        if out.is_null() {
            set_error("null out pointer");
            return TrilockStatus::NullPointer;
        }
        let meta = LockMetadata::from_locked(&l.inner, l.seed);
        give_string(out, meta.to_string_lossless())
    })
}

/// The correct key, grouped per cycle.
///
/// # Safety
/// `locked` must be a live handle, `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn trilock_locked_key(
    locked: *const TrilockLocked,
    out: *mut *mut c_char,
) -> TrilockStatus {
    guard(|| {
        let Some(l) = locked.as_ref() else {
            set_error("null locked handle");
            return TrilockStatus::NullPointer;
        };
        if out.is_null() {
            set_error("null out pointer");
            return TrilockStatus::NullPointer;
        }
        give_string(out, l.inner.config.k_star.to_grouped_string())
    })
}

/// # Safety
/// `locked` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn trilock_locked_free(locked: *mut TrilockLocked) {
    if !locked.is_null() {
        drop(Box::from_raw(locked));
    }
}

/// Runs the iterative-deepening SAT attack on a bare locked netlist
/// against a black-box oracle.
///
/// `bstar = 0` starts at depth 1; `timeout_s <= 0` means no budget.
/// On `KEY_RECOVERED`, `out_key` (when non-null) receives the key.
///
/// # Safety
/// Handles must be live; `summary` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn trilock_attack(
    locked_netlist: *const TrilockCircuit,
    kappa: u32,
    oracle: *const TrilockCircuit,
    b_max: u32,
    bstar: u32,
    timeout_s: f64,
    summary: *mut TrilockAttackSummary,
    out_key: *mut *mut c_char,
) -> TrilockStatus {
    guard(|| {
        let (Some(l), Some(o), Some(summary)) =
            (locked_netlist.as_ref(), oracle.as_ref(), summary.as_mut())
        else {
            set_error("null pointer");
            return TrilockStatus::NullPointer;
        };
        let backend = SatBackend::Embedded {
            limits: SolverLimits {
                max_conflicts: None,
                timeout: (timeout_s > 0.0).then(|| Duration::from_secs_f64(timeout_s)),
            },
        };
        let result = match attack::sequential_attack(
            &l.inner,
            kappa as usize,
            &o.inner,
            b_max.max(1) as usize,
            &backend,
            (bstar > 0).then_some(bstar as usize),
        ) {
            Ok(r) => r,
            Err(e) => {
                set_error(e.to_string());
                return TrilockStatus::AttackFailed;
            }
        };
        *summary = TrilockAttackSummary {
            status: match result.status {
                attack::AttackStatus::KeyRecovered => TrilockAttackStatus::KeyRecovered,
                attack::AttackStatus::TimedOut => TrilockAttackStatus::TimedOut,
                attack::AttackStatus::ExhaustedDepth => TrilockAttackStatus::ExhaustedDepth,
            },
            n_dip: result.n_dip,
            depth_used: result.depth_used as u32,
            sat_queries: result.sat_queries,
            wall_time_s: result.wall_time.as_secs_f64(),
            bounded_verification: result.bounded_verification,
        };
        if let (Some(key), false) = (result.key, out_key.is_null()) {
            return give_string(out_key, key.to_grouped_string());
        }
        TrilockStatus::Ok
    })
}

/// Checks a candidate key against the oracle. `out_depth` receives the
/// counterexample depth (or the bounded-proof depth).
///
/// # Safety
/// Handles and out-pointers must be valid; `key_text` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn trilock_verify_key(
    locked_netlist: *const TrilockCircuit,
    kappa: u32,
    oracle: *const TrilockCircuit,
    key_text: *const c_char,
    verdict: *mut TrilockVerdict,
    out_depth: *mut u32,
) -> TrilockStatus {
    guard(|| {
        let (Some(l), Some(o), Some(verdict)) =
            (locked_netlist.as_ref(), oracle.as_ref(), verdict.as_mut())
        else {
            set_error("null pointer");
            return TrilockStatus::NullPointer;
        };
        let key_str = match read_str(key_text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let key = match BitSequence::from_bit_str(key_str, l.inner.input_count()) {
            Ok(k) => k,
            Err(e) => {
                set_error(e.to_string());
                return TrilockStatus::InvalidConfig;
            }
        };
        match attack::verify_key(
            &l.inner,
            kappa as usize,
            &o.inner,
            &key,
            &SatBackend::default(),
            None,
        ) {
            Ok(outcome) => {
                let (v, d) = match outcome {
                    attack::VerifyOutcome::Equivalent => (TrilockVerdict::Equivalent, 0),
                    attack::VerifyOutcome::BoundedEquivalent { depth } => {
                        (TrilockVerdict::BoundedEquivalent, depth as u32)
                    }
                    attack::VerifyOutcome::Counterexample { depth, .. } => {
                        (TrilockVerdict::Counterexample, depth as u32)
                    }
                };
                *verdict = v;
                if let Some(out_depth) = out_depth.as_mut() {
                    *out_depth = d;
                }
                TrilockStatus::Ok
            }
            Err(e) => {
                set_error(e.to_string());
                TrilockStatus::AttackFailed
            }
        }
    })
}

/// Measures functional corruptibility. `depth = 0` uses `kappa_s`;
/// `samples = 0` runs the exhaustive census (subject to the
/// enumeration bound).
///
/// # Safety
/// Handles and out-pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn trilock_eval_fc(
    locked: *const TrilockLocked,
    oracle: *const TrilockCircuit,
    depth: u32,
    samples: u64,
    seed: u64,
    out_fc: *mut f64,
    out_std_error: *mut f64,
) -> TrilockStatus {
    guard(|| {
        let (Some(l), Some(o), Some(out_fc)) = (locked.as_ref(), oracle.as_ref(), out_fc.as_mut())
        else {
            set_error("null pointer");
            return TrilockStatus::NullPointer;
        };
        let b = if depth == 0 {
            l.inner.config.kappa_s
        } else {
            depth as usize
        };
        let (mode, n) = if samples == 0 {
            (eval::SampleMode::Exhaustive, 0)
        } else {
            (eval::SampleMode::Random, samples)
        };
        match eval::estimate_fc(&l.inner, &o.inner, b, n, mode, seed) {
            Ok(est) => {
                *out_fc = est.estimate;
                if let Some(se) = out_std_error.as_mut() {
                    *se = est.std_error;
                }
                TrilockStatus::Ok
            }
            Err(e) => {
                set_error(e.to_string());
                TrilockStatus::EvalFailed
            }
        }
    })
}

/// Closed-form corruptibility prediction for the locked configuration.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn trilock_predict_fc(
    locked: *const TrilockLocked,
    out_fc: *mut f64,
) -> TrilockStatus {
    guard(|| {
        let (Some(l), Some(out_fc)) = (locked.as_ref(), out_fc.as_mut()) else {
            set_error("null pointer");
            return TrilockStatus::NullPointer;
        };
        *out_fc = eval::predict_fc(&l.inner.config, l.inner.circuit.input_count());
        TrilockStatus::Ok
    })
}

/// Closed-form SAT-resilience prediction, as a double (values grow
/// beyond 64-bit range quickly).
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn trilock_predict_ndip(
    locked: *const TrilockLocked,
    out_ndip: *mut f64,
) -> TrilockStatus {
    guard(|| {
        let (Some(l), Some(out_ndip)) = (locked.as_ref(), out_ndip.as_mut()) else {
            set_error("null pointer");
            return TrilockStatus::NullPointer;
        };
        *out_ndip = attack::predict_ndip(&l.inner.config, l.inner.circuit.input_count()) as f64;
        TrilockStatus::Ok
    })
}

/// SCC metrics of the locked netlist (uses the register tags carried by
/// the handle).
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn trilock_scc_report(
    locked: *const TrilockLocked,
    out: *mut TrilockSccReport,
) -> TrilockStatus {
    guard(|| {
        let (Some(l), Some(out)) = (locked.as_ref(), out.as_mut()) else {
            set_error("null pointer");
            return TrilockStatus::NullPointer;
        };
        let report = reencode::scc_metrics(&l.inner.circuit);
        *out = TrilockSccReport {
            o_sccs: report.o as u32,
            e_sccs: report.e as u32,
            m_sccs: report.m as u32,
            p_m: report.p_m,
        };
        TrilockStatus::Ok
    })
}

/// Tseitin CNF of the `(kappa + b)`-unrolled circuit in DIMACS form,
/// with a comment block mapping variables to (net, frame).
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn trilock_export_dimacs(
    circuit: *const TrilockCircuit,
    b: u32,
    kappa: u32,
    out: *mut *mut c_char,
) -> TrilockStatus {
    guard(|| {
        let Some(c) = circuit.as_ref() else {
            set_error("null circuit");
            return TrilockStatus::NullPointer;
        };
        if out.is_null() || b == 0 {
            set_error(if out.is_null() {
                "null out pointer"
            } else {
                "depth must be at least 1"
            });
            return TrilockStatus::NullPointer;
        }
        let unrolled = UnrolledCircuit::unroll(&c.inner, b as usize, kappa as usize);
        give_string(out, unrolled.to_cnf().to_dimacs_string())
    })
}
