//! Oracle-guided SAT key recovery and key verification.
//!
//! The attack unrolls the locked netlist over `kappa + b` frames, treats
//! the first `kappa` frames' inputs as key variables, and runs the
//! classic distinguishing-input loop: a miter over two key copies
//! (constrained to agree with all recorded oracle responses) whose
//! functional outputs must differ somewhere. Each satisfying model
//! yields a distinguishing input; querying the black-box oracle and
//! pinning both copies to the response rules out every key that
//! disagrees. On UNSAT any remaining key is equivalent up to depth `b`.
//!
//! The attacker sees only the locked netlist and the public key length
//! `kappa`; it never reads locking metadata.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::bits::BitSequence;
use crate::lock::LockedCircuit;
use crate::netlist::{Circuit, Simulator};
use crate::sat::{SatBackend, SatError, SatSession, SolveOutcome};
use crate::unroll::UnrolledCircuit;

#[derive(Debug, Error)]
pub enum AttackError {
    #[error("locked and oracle circuits disagree on interface: {0}")]
    InterfaceMismatch(String),
    #[error("simulation failed: {0}")]
    Simulate(String),
    #[error(transparent)]
    Sat(#[from] SatError),
    #[error("solver returned unknown during key verification")]
    VerifyBudget,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum AttackStatus {
    KeyRecovered,
    TimedOut,
    ExhaustedDepth,
}

/// One distinguishing-input iteration, for trace export.
#[derive(Clone, Debug, Serialize)]
pub struct DipRecord {
    /// Functional input bits, grouped per cycle.
    pub input: String,
    /// Oracle output bits, grouped per cycle.
    pub oracle_output: String,
    /// Cumulative constraint-set size after recording this response.
    pub constraint_clauses: u64,
}

#[derive(Clone, Debug)]
pub struct AttackResult {
    pub status: AttackStatus,
    /// Recovered key; present only when `status` is `KeyRecovered`.
    pub key: Option<BitSequence>,
    /// Distinguishing-input iterations performed.
    pub n_dip: u64,
    /// Unrolling depth of the final (or interrupted) run.
    pub depth_used: usize,
    pub sat_queries: u64,
    pub wall_time: Duration,
    /// Verification verdict detail for sequential runs: true when the
    /// equivalence check was bounded rather than exhaustive.
    pub bounded_verification: bool,
    pub trace: Vec<DipRecord>,
}

/// Closed-form SAT-resilience prediction: `2^(kappa_s |I|)` for the
/// tuned scheme, `2^(kappa |I|) - 1` for the baseline. Saturates at
/// `u128::MAX`.
pub fn predict_ndip(cfg: &crate::lock::LockConfig, input_width: usize) -> u128 {
    let shift = |cycles: usize| -> u128 {
        let bits = cycles * input_width;
        if bits >= 128 {
            u128::MAX
        } else {
            1u128 << bits
        }
    };
    match cfg.mode {
        crate::lock::LockMode::TriLock => shift(cfg.kappa_s),
        crate::lock::LockMode::NaiveBaseline => shift(cfg.kappa()).saturating_sub(1),
    }
}

/// The CNF of one unrolled locked circuit, positioned for repeated
/// instantiation with shared key/input variables.
struct Template {
    var_count: usize,
    clauses: Vec<Vec<i32>>,
    key_vars: Vec<i32>,
    input_vars: Vec<i32>,
    output_vars: Vec<i32>,
}

impl Template {
    fn build(locked: &Circuit, kappa: usize, b: usize) -> Self {
        let unrolled = UnrolledCircuit::unroll(locked, b, kappa);
        let cnf = unrolled.to_cnf();
        let to_lit = |v: usize| (v + 1) as i32;
        Template {
            var_count: cnf.variable_count(),
            clauses: cnf.clauses().to_vec(),
            key_vars: unrolled
                .key_input_vars()
                .iter()
                .map(|&v| to_lit(v))
                .collect(),
            input_vars: unrolled
                .functional_input_vars()
                .iter()
                .map(|&v| to_lit(v))
                .collect(),
            output_vars: unrolled
                .functional_output_vars()
                .iter()
                .map(|&v| to_lit(v))
                .collect(),
        }
    }
}

/// Session wrapper tracking variable allocation and clause count.
struct Builder {
    session: SatSession,
    next_var: i32,
    clauses_added: u64,
}

struct Instance {
    inputs: Vec<i32>,
    outputs: Vec<i32>,
}

impl Builder {
    fn new(backend: &SatBackend) -> Self {
        Builder {
            session: SatSession::new(backend),
            next_var: 1,
            clauses_added: 0,
        }
    }

    fn fresh_block(&mut self, n: usize) -> Vec<i32> {
        let start = self.next_var;
        self.next_var += n as i32;
        self.session.ensure_vars((self.next_var - 1) as usize);
        (start..self.next_var).collect()
    }

    fn add_clause(&mut self, lits: &[i32]) {
        self.clauses_added += 1;
        self.session.add_clause(lits);
    }

    /// Adds a full copy of the template. Key variables map onto
    /// `keys`; input variables map onto `inputs` when given, else onto
    /// fresh variables. All internal variables are fresh.
    fn instantiate(&mut self, tpl: &Template, keys: &[i32], inputs: Option<&[i32]>) -> Instance {
        debug_assert_eq!(keys.len(), tpl.key_vars.len());
        let mut map: Vec<i32> = vec![0; tpl.var_count + 1];
        for (t, &s) in tpl.key_vars.iter().zip(keys) {
            map[*t as usize] = s;
        }
        let input_block: Vec<i32> = match inputs {
            Some(shared) => {
                debug_assert_eq!(shared.len(), tpl.input_vars.len());
                shared.to_vec()
            }
            None => self.fresh_block(tpl.input_vars.len()),
        };
        for (t, &s) in tpl.input_vars.iter().zip(&input_block) {
            map[*t as usize] = s;
        }
        for slot in map.iter_mut().skip(1) {
            if *slot == 0 {
                let v = self.next_var;
                self.next_var += 1;
                *slot = v;
            }
        }
        self.session.ensure_vars((self.next_var - 1) as usize);
        for clause in &tpl.clauses {
            let mapped: Vec<i32> = clause
                .iter()
                .map(|&l| {
                    let v = map[l.unsigned_abs() as usize];
                    if l > 0 {
                        v
                    } else {
                        -v
                    }
                })
                .collect();
            self.add_clause(&mapped);
        }
        Instance {
            inputs: input_block,
            outputs: tpl.output_vars.iter().map(|&t| map[t as usize]).collect(),
        }
    }

    /// Forces `var = bit` for each pair.
    fn pin(&mut self, vars: &[i32], bits: &[bool]) {
        debug_assert_eq!(vars.len(), bits.len());
        for (&v, &b) in vars.iter().zip(bits) {
            self.add_clause(&[if b { v } else { -v }]);
        }
    }
}

fn bits_from_model(model: &[bool], vars: &[i32]) -> Vec<bool> {
    vars.iter().map(|&v| model[(v - 1) as usize]).collect()
}

/// The distinguishing-input loop on the `(kappa + b)`-unrolled locked
/// netlist against a black-box `oracle`.
///
/// On `KeyRecovered` the returned key is equivalent to the true key up
/// to depth `b` (certified by the final UNSAT miter); deeper
/// verification is the caller's concern.
pub fn comb_sat_attack(
    locked: &Circuit,
    kappa: usize,
    oracle: &Circuit,
    b: usize,
    backend: &SatBackend,
) -> Result<AttackResult, AttackError> {
    let start = Instant::now();
    if locked.input_count() != oracle.input_count()
        || locked.output_count() != oracle.output_count()
    {
        return Err(AttackError::InterfaceMismatch(format!(
            "locked {}x{}, oracle {}x{}",
            locked.input_count(),
            locked.output_count(),
            oracle.input_count(),
            oracle.output_count()
        )));
    }
    let width = locked.input_count();
    let deadline = backend.limits().timeout.map(|t| start + t);
    let oracle_sim = Simulator::new(oracle);
    let tpl = Template::build(locked, kappa, b);

    let mut miter = Builder::new(backend);
    let k1 = miter.fresh_block(tpl.key_vars.len());
    let k2 = miter.fresh_block(tpl.key_vars.len());
    let shared_inputs = miter.fresh_block(tpl.input_vars.len());
    let copy_a = miter.instantiate(&tpl, &k1, Some(&shared_inputs));
    let copy_b = miter.instantiate(&tpl, &k2, Some(&shared_inputs));

    // Outputs must differ on at least one functional-frame bit.
    let mut diff_lits = Vec::with_capacity(copy_a.outputs.len());
    for (&a, &bv) in copy_a.outputs.iter().zip(&copy_b.outputs) {
        let d = miter.fresh_block(1)[0];
        miter.add_clause(&[-d, a, bv]);
        miter.add_clause(&[-d, -a, -bv]);
        miter.add_clause(&[d, -a, bv]);
        miter.add_clause(&[d, a, -bv]);
        diff_lits.push(d);
    }
    miter.add_clause(&diff_lits);

    let mut n_dip = 0u64;
    let mut trace: Vec<DipRecord> = Vec::new();
    let mut recorded: Vec<(BitSequence, BitSequence)> = Vec::new();

    let timed_out = |builder: &Builder, n_dip, trace: &[DipRecord]| AttackResult {
        status: AttackStatus::TimedOut,
        key: None,
        n_dip,
        depth_used: b,
        sat_queries: builder.session.queries(),
        wall_time: start.elapsed(),
        bounded_verification: false,
        trace: trace.to_vec(),
    };

    loop {
        if let Some(d) = deadline {
            if Instant::now() >= d {
                return Ok(timed_out(&miter, n_dip, &trace));
            }
        }
        match miter.session.solve()? {
            SolveOutcome::Unknown => return Ok(timed_out(&miter, n_dip, &trace)),
            SolveOutcome::Sat(model) => {
                let dip_bits = bits_from_model(&model, &shared_inputs);
                let dip = BitSequence::new(dip_bits.clone(), width).expect("width divides");
                let response = oracle_sim
                    .run(&dip, b)
                    .map_err(|e| AttackError::Simulate(e.to_string()))?;
                n_dip += 1;
                // Pin a fresh copy per key half to the oracle response.
                for keys in [&k1, &k2] {
                    let inst = miter.instantiate(&tpl, keys, None);
                    miter.pin(&inst.inputs, &dip_bits);
                    miter.pin(&inst.outputs, response.as_slice());
                }
                trace.push(DipRecord {
                    input: dip.to_grouped_string(),
                    oracle_output: response.to_grouped_string(),
                    constraint_clauses: miter.clauses_added,
                });
                recorded.push((dip, response));
            }
            SolveOutcome::Unsat => break,
        }
    }

    // Every key consistent with the recorded responses is depth-b
    // equivalent; extract one.
    let mut extract = Builder::new(backend);
    let key_vars = extract.fresh_block(tpl.key_vars.len());
    for (dip, response) in &recorded {
        let inst = extract.instantiate(&tpl, &key_vars, None);
        extract.pin(&inst.inputs, dip.as_slice());
        extract.pin(&inst.outputs, response.as_slice());
    }
    if recorded.is_empty() {
        // Constrain nothing but make the variables known to the solver.
        extract.instantiate(&tpl, &key_vars, None);
    }
    let key = match extract.session.solve()? {
        SolveOutcome::Sat(model) => {
            BitSequence::new(bits_from_model(&model, &key_vars), width).expect("width divides")
        }
        SolveOutcome::Unknown => return Ok(timed_out(&extract, n_dip, &trace)),
        SolveOutcome::Unsat => {
            // The true key is always consistent with oracle responses.
            unreachable!("consistency formula cannot be unsatisfiable");
        }
    };

    Ok(AttackResult {
        status: AttackStatus::KeyRecovered,
        key: Some(key),
        n_dip,
        depth_used: b,
        sat_queries: miter.session.queries() + extract.session.queries(),
        wall_time: start.elapsed(),
        bounded_verification: false,
        trace,
    })
}

/// Verdict of a key equivalence check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VerifyOutcome {
    /// Proven equivalent by exhaustive product-machine reachability.
    Equivalent,
    /// No counterexample up to the stated functional depth; deeper
    /// behavior unchecked.
    BoundedEquivalent { depth: usize },
    /// Outputs diverge at this functional depth under this input.
    Counterexample { depth: usize, input: BitSequence },
}

/// State-bit budget below which verification is exhaustive.
pub const EXHAUSTIVE_STATE_BITS: usize = 24;

/// Default bounded-check depth beyond the key prefix.
pub const BOUNDED_DEPTH_MARGIN: usize = 32;

/// Checks a candidate key against the oracle.
///
/// When the product machine (locked + oracle registers) fits in
/// [`EXHAUSTIVE_STATE_BITS`] state bits, runs exhaustive breadth-first
/// reachability from the post-key-entry product state and compares all
/// outputs on every reachable state under every input value. Otherwise
/// falls back to a bounded SAT equivalence check of depth
/// `kappa + BOUNDED_DEPTH_MARGIN` (or `bounded_depth` if given).
pub fn verify_key(
    locked: &Circuit,
    kappa: usize,
    oracle: &Circuit,
    key: &BitSequence,
    backend: &SatBackend,
    bounded_depth: Option<usize>,
) -> Result<VerifyOutcome, AttackError> {
    let width = locked.input_count();
    if key.cycle_width() != width || key.cycles() != kappa {
        return Err(AttackError::InterfaceMismatch(format!(
            "key {}x{} vs kappa {kappa}, |I| {width}",
            key.cycles(),
            key.cycle_width()
        )));
    }
    if locked.input_count() != oracle.input_count()
        || locked.output_count() != oracle.output_count()
    {
        return Err(AttackError::InterfaceMismatch(
            "input/output counts differ".to_string(),
        ));
    }
    let state_bits = locked.ff_count() + oracle.ff_count();
    if state_bits <= EXHAUSTIVE_STATE_BITS {
        verify_exhaustive(locked, kappa, oracle, key)
    } else {
        let depth = bounded_depth.unwrap_or(kappa + BOUNDED_DEPTH_MARGIN);
        verify_bounded(locked, kappa, oracle, key, depth, backend)
    }
}

fn pack(bits: &[bool]) -> u64 {
    bits.iter().fold(0u64, |acc, &b| (acc << 1) | u64::from(b))
}

fn unpack(mut value: u64, n: usize) -> Vec<bool> {
    let mut bits = vec![false; n];
    for i in (0..n).rev() {
        bits[i] = value & 1 == 1;
        value >>= 1;
    }
    bits
}

fn verify_exhaustive(
    locked: &Circuit,
    kappa: usize,
    oracle: &Circuit,
    key: &BitSequence,
) -> Result<VerifyOutcome, AttackError> {
    let width = locked.input_count();
    let locked_sim = Simulator::new(locked);
    let oracle_sim = Simulator::new(oracle);
    let mut scratch = Vec::new();
    let mut out_l = vec![false; locked.output_count()];
    let mut out_o = vec![false; oracle.output_count()];

    // Drive the key home; the oracle stays at reset.
    let mut state_l = vec![false; locked.ff_count()];
    for n in 1..=kappa {
        locked_sim.step(&mut state_l, key.cycle(n), &mut out_l, &mut scratch);
    }
    let state_o = vec![false; oracle.ff_count()];

    let obits = oracle.ff_count();
    let pack_pair = |l: &[bool], o: &[bool]| {
        let low_mask = if obits == 0 { 0 } else { pack(o) };
        (pack(l) << obits) | low_mask
    };

    let start_pair = pack_pair(&state_l, &state_o);
    // Predecessor map for counterexample reconstruction:
    // state -> (previous state, input value applied there).
    let mut parent: HashMap<u64, (u64, u64)> = HashMap::new();
    let mut visited: HashMap<u64, usize> = HashMap::new();
    visited.insert(start_pair, 0);
    let mut frontier = vec![start_pair];
    let input_space = 1u64 << width;
    let obits_mask = if obits == 0 { 0 } else { (1u64 << obits) - 1 };

    while !frontier.is_empty() {
        let mut next_frontier = Vec::new();
        for &pair in &frontier {
            let depth_here = visited[&pair];
            let sl = unpack(pair >> obits, locked.ff_count());
            let so_base = unpack(pair & obits_mask, obits);
            for iv in 0..input_space {
                let inputs = unpack(iv, width);
                let mut sl2 = sl.clone();
                let mut so2 = so_base.clone();
                locked_sim.step(&mut sl2, &inputs, &mut out_l, &mut scratch);
                oracle_sim.step(&mut so2, &inputs, &mut out_o, &mut scratch);
                if out_l != out_o {
                    // Reconstruct the input sequence along the path.
                    let mut seq: Vec<u64> = vec![iv];
                    let mut cur = pair;
                    while cur != start_pair {
                        let (prev, step_iv) = parent[&cur];
                        seq.push(step_iv);
                        cur = prev;
                    }
                    seq.reverse();
                    let mut bits = Vec::with_capacity(seq.len() * width);
                    for v in &seq {
                        bits.extend(unpack(*v, width));
                    }
                    return Ok(VerifyOutcome::Counterexample {
                        depth: depth_here + 1,
                        input: BitSequence::new(bits, width).expect("width divides"),
                    });
                }
                let next_pair = pack_pair(&sl2, &so2);
                if let std::collections::hash_map::Entry::Vacant(e) = visited.entry(next_pair) {
                    e.insert(depth_here + 1);
                    parent.insert(next_pair, (pair, iv));
                    next_frontier.push(next_pair);
                }
            }
        }
        frontier = next_frontier;
    }
    Ok(VerifyOutcome::Equivalent)
}

fn verify_bounded(
    locked: &Circuit,
    kappa: usize,
    oracle: &Circuit,
    key: &BitSequence,
    depth: usize,
    backend: &SatBackend,
) -> Result<VerifyOutcome, AttackError> {
    let width = locked.input_count();
    let tpl_locked = Template::build(locked, kappa, depth);
    let tpl_oracle = Template::build(oracle, 0, depth);

    let mut b = Builder::new(backend);
    let key_vars = b.fresh_block(tpl_locked.key_vars.len());
    b.pin(&key_vars, key.as_slice());
    let shared_inputs = b.fresh_block(tpl_locked.input_vars.len());
    let li = b.instantiate(&tpl_locked, &key_vars, Some(&shared_inputs));
    let oi = b.instantiate(&tpl_oracle, &[], Some(&shared_inputs));

    let mut diff_lits = Vec::with_capacity(li.outputs.len());
    for (&x, &y) in li.outputs.iter().zip(&oi.outputs) {
        let d = b.fresh_block(1)[0];
        b.add_clause(&[-d, x, y]);
        b.add_clause(&[-d, -x, -y]);
        b.add_clause(&[d, -x, y]);
        b.add_clause(&[d, x, -y]);
        diff_lits.push(d);
    }
    b.add_clause(&diff_lits);

    match b.session.solve()? {
        SolveOutcome::Unsat => Ok(VerifyOutcome::BoundedEquivalent { depth }),
        SolveOutcome::Unknown => Err(AttackError::VerifyBudget),
        SolveOutcome::Sat(model) => {
            let inputs = bits_from_model(&model, &shared_inputs);
            let outs_l = bits_from_model(&model, &li.outputs);
            let outs_o = bits_from_model(&model, &oi.outputs);
            let per_frame = locked.output_count();
            let first_diff = outs_l
                .iter()
                .zip(&outs_o)
                .position(|(a, c)| a != c)
                .expect("miter forces a difference")
                / per_frame
                + 1;
            Ok(VerifyOutcome::Counterexample {
                depth: first_diff,
                input: BitSequence::new(inputs, width).expect("width divides"),
            })
        }
    }
}

/// Iterative-deepening attack with key verification.
///
/// Starts at `known_bstar` (or depth 1), runs the distinguishing-input
/// loop at each depth, verifies the candidate with [`verify_key`], and
/// deepens on a counterexample until `b_max`.
pub fn sequential_attack(
    locked: &Circuit,
    kappa: usize,
    oracle: &Circuit,
    b_max: usize,
    backend: &SatBackend,
    known_bstar: Option<usize>,
) -> Result<AttackResult, AttackError> {
    let start = Instant::now();
    let mut n_dip = 0u64;
    let mut sat_queries = 0u64;
    let mut trace = Vec::new();
    let mut b = known_bstar.unwrap_or(1).max(1);
    while b <= b_max {
        let mut result = comb_sat_attack(locked, kappa, oracle, b, backend)?;
        n_dip += result.n_dip;
        sat_queries += result.sat_queries;
        trace.append(&mut result.trace);
        match result.status {
            AttackStatus::TimedOut => {
                return Ok(AttackResult {
                    status: AttackStatus::TimedOut,
                    key: None,
                    n_dip,
                    depth_used: b,
                    sat_queries,
                    wall_time: start.elapsed(),
                    bounded_verification: false,
                    trace,
                });
            }
            AttackStatus::KeyRecovered => {
                let key = result.key.expect("recovered");
                match verify_key(locked, kappa, oracle, &key, backend, None)? {
                    VerifyOutcome::Equivalent => {
                        return Ok(AttackResult {
                            status: AttackStatus::KeyRecovered,
                            key: Some(key),
                            n_dip,
                            depth_used: b,
                            sat_queries,
                            wall_time: start.elapsed(),
                            bounded_verification: false,
                            trace,
                        });
                    }
                    VerifyOutcome::BoundedEquivalent { .. } => {
                        return Ok(AttackResult {
                            status: AttackStatus::KeyRecovered,
                            key: Some(key),
                            n_dip,
                            depth_used: b,
                            sat_queries,
                            wall_time: start.elapsed(),
                            bounded_verification: true,
                            trace,
                        });
                    }
                    VerifyOutcome::Counterexample { .. } => {
                        b += 1;
                    }
                }
            }
            AttackStatus::ExhaustedDepth => unreachable!("single-depth run"),
        }
    }
    Ok(AttackResult {
        status: AttackStatus::ExhaustedDepth,
        key: None,
        n_dip,
        depth_used: b_max,
        sat_queries,
        wall_time: start.elapsed(),
        bounded_verification: false,
        trace,
    })
}

/// Attack entry point for a [`LockedCircuit`] value: only the netlist
/// and the public key length cross the threat-model boundary.
pub fn attack_locked(
    locked: &LockedCircuit,
    oracle: &Circuit,
    b: usize,
    backend: &SatBackend,
) -> Result<AttackResult, AttackError> {
    comb_sat_attack(&locked.circuit, locked.config.kappa(), oracle, b, backend)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lock::{lock, LockConfig, LockMode};
    use crate::netlist::parse_bench;
    use crate::samples::TOY2;
    use crate::sat::SolverLimits;

    fn toy_config() -> LockConfig {
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
    fn naive_baseline_needs_one_dip_per_wrong_key() {
        let c = parse_bench(TOY2).unwrap();
        let k_star = BitSequence::from_bit_str("1001", 2).unwrap();
        let cfg = LockConfig::naive(2, k_star.clone());
        let locked = lock(&c, &cfg, 1).unwrap();
        let result = attack_locked(&locked, &c, 2, &SatBackend::default()).unwrap();
        assert_eq!(result.status, AttackStatus::KeyRecovered);
        assert_eq!(result.n_dip, 15);
        assert_eq!(result.key.unwrap(), k_star);
    }

    #[test]
    fn tuned_scheme_meets_the_resilience_floor() {
        let c = parse_bench(TOY2).unwrap();
        let cfg = toy_config();
        let locked = lock(&c, &cfg, 1).unwrap();
        let result = attack_locked(&locked, &c, 2, &SatBackend::default()).unwrap();
        assert_eq!(result.status, AttackStatus::KeyRecovered);
        assert!(
            result.n_dip >= 16,
            "n_dip {} below 2^(kappa_s |I|) = 16",
            result.n_dip
        );
        // The recovered key must be the correct one: every wrong key is
        // distinguishable at this depth.
        assert_eq!(result.key.unwrap(), cfg.k_star);
    }

    #[test]
    fn shallow_attack_may_recover_a_wrong_key() {
        let c = parse_bench(TOY2).unwrap();
        let cfg = toy_config();
        let locked = lock(&c, &cfg, 1).unwrap();
        // Depth 1 < kappa_s: prefix errors are invisible, so the
        // candidate need not be correct; verification catches it.
        let result = attack_locked(&locked, &c, 1, &SatBackend::default()).unwrap();
        assert_eq!(result.status, AttackStatus::KeyRecovered);
        let key = result.key.unwrap();
        let verdict =
            verify_key(&locked.circuit, 3, &c, &key, &SatBackend::default(), None).unwrap();
        if key != cfg.k_star {
            assert!(matches!(verdict, VerifyOutcome::Counterexample { .. }));
        }
    }

    #[test]
    fn sequential_attack_deepens_until_verification_passes() {
        let c = parse_bench(TOY2).unwrap();
        let cfg = toy_config();
        let locked = lock(&c, &cfg, 1).unwrap();
        let result = sequential_attack(
            &locked.circuit,
            cfg.kappa(),
            &c,
            4,
            &SatBackend::default(),
            None,
        )
        .unwrap();
        assert_eq!(result.status, AttackStatus::KeyRecovered);
        assert_eq!(result.key.unwrap(), cfg.k_star);
        assert!(result.depth_used >= 2);
    }

    #[test]
    fn sequential_attack_with_depth_hint_takes_one_round() {
        let c = parse_bench(TOY2).unwrap();
        let cfg = toy_config();
        let locked = lock(&c, &cfg, 1).unwrap();
        let result = sequential_attack(
            &locked.circuit,
            cfg.kappa(),
            &c,
            4,
            &SatBackend::default(),
            Some(cfg.kappa_s),
        )
        .unwrap();
        assert_eq!(result.status, AttackStatus::KeyRecovered);
        assert_eq!(result.depth_used, cfg.kappa_s);
    }

    #[test]
    fn depth_cap_below_bstar_exhausts() {
        let c = parse_bench(TOY2).unwrap();
        let cfg = toy_config();
        let locked = lock(&c, &cfg, 1).unwrap();
        let result = sequential_attack(
            &locked.circuit,
            cfg.kappa(),
            &c,
            cfg.kappa_s - 1,
            &SatBackend::default(),
            None,
        )
        .unwrap();
        assert_eq!(result.status, AttackStatus::ExhaustedDepth);
        assert!(result.key.is_none());
    }

    #[test]
    fn verify_key_accepts_the_correct_key_exhaustively() {
        let c = parse_bench(TOY2).unwrap();
        let cfg = toy_config();
        let locked = lock(&c, &cfg, 1).unwrap();
        let verdict = verify_key(
            &locked.circuit,
            cfg.kappa(),
            &c,
            &cfg.k_star,
            &SatBackend::default(),
            None,
        )
        .unwrap();
        assert_eq!(verdict, VerifyOutcome::Equivalent);
    }

    #[test]
    fn verify_key_finds_depth_one_counterexample_for_suffix_error() {
        let c = parse_bench(TOY2).unwrap();
        let cfg = toy_config();
        let locked = lock(&c, &cfg, 1).unwrap();
        // Flip the last key bit: the suffix becomes 00, value 0, which
        // is under the threshold and differs from k**, so the suffix
        // error fires from functional cycle 1.
        let mut bits = cfg.k_star.as_slice().to_vec();
        let last = bits.len() - 1;
        bits[last] = !bits[last];
        let bad = BitSequence::new(bits, 2).unwrap();
        let verdict = verify_key(
            &locked.circuit,
            cfg.kappa(),
            &c,
            &bad,
            &SatBackend::default(),
            None,
        )
        .unwrap();
        match verdict {
            VerifyOutcome::Counterexample { depth, .. } => assert_eq!(depth, 1),
            other => panic!("expected counterexample, got {other:?}"),
        }
    }

    #[test]
    fn bounded_verification_reports_its_depth() {
        let c = parse_bench(TOY2).unwrap();
        let cfg = toy_config();
        let locked = lock(&c, &cfg, 1).unwrap();
        let verdict = verify_bounded(
            &locked.circuit,
            cfg.kappa(),
            &c,
            &cfg.k_star,
            cfg.kappa() + 8,
            &SatBackend::default(),
        )
        .unwrap();
        assert_eq!(
            verdict,
            VerifyOutcome::BoundedEquivalent {
                depth: cfg.kappa() + 8
            }
        );
    }

    #[test]
    fn predictions_scale_exponentially() {
        let mk = |kappa_s: usize, width: usize| LockConfig {
            kappa_s,
            kappa_f: 1,
            alpha: 0.6,
            k_star: BitSequence::zeros(kappa_s + 1, width),
            k_double_star: {
                let mut bits = vec![false; width];
                bits[width - 1] = true;
                BitSequence::new(bits, width).unwrap()
            },
            po_invert_count: 1,
            ff_invert_count: 0,
            mode: LockMode::TriLock,
            threshold_override: None,
        };
        assert_eq!(predict_ndip(&mk(1, 13), 13), 8192);
        assert_eq!(predict_ndip(&mk(2, 5), 5), 1024);
        assert_eq!(predict_ndip(&mk(1, 11), 11), 2048);
        assert_eq!(predict_ndip(&mk(1, 19), 19), 524288);
        let naive = LockConfig::naive(2, BitSequence::zeros(2, 2));
        assert_eq!(predict_ndip(&naive, 2), 15);
    }

    #[test]
    fn timeout_budget_reports_timed_out() {
        let c = parse_bench(TOY2).unwrap();
        let cfg = toy_config();
        let locked = lock(&c, &cfg, 1).unwrap();
        let backend = SatBackend::Embedded {
            limits: SolverLimits {
                max_conflicts: None,
                timeout: Some(Duration::from_nanos(1)),
            },
        };
        let result = attack_locked(&locked, &c, 2, &backend).unwrap();
        assert_eq!(result.status, AttackStatus::TimedOut);
        assert!(result.key.is_none());
    }

    #[test]
    fn recovered_key_survives_fresh_random_sequences() {
        use rand::{Rng, SeedableRng};
        let c = parse_bench(TOY2).unwrap();
        let cfg = toy_config();
        let locked = lock(&c, &cfg, 1).unwrap();
        let result = attack_locked(&locked, &c, 2, &SatBackend::default()).unwrap();
        let key = result.key.unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(777);
        for _ in 0..1000 {
            let cycles = 8;
            let bits: Vec<bool> = (0..cycles * 2).map(|_| rng.gen()).collect();
            let i = BitSequence::new(bits, 2).unwrap();
            let reference = c.simulate(&i, cycles).unwrap();
            let functional = locked.simulate_functional(&key, &i).unwrap();
            assert_eq!(reference, functional);
        }
    }

    #[test]
    fn trace_records_one_entry_per_dip() {
        let c = parse_bench(TOY2).unwrap();
        let cfg = LockConfig::naive(2, BitSequence::from_bit_str("1001", 2).unwrap());
        let locked = lock(&c, &cfg, 1).unwrap();
        let result = attack_locked(&locked, &c, 2, &SatBackend::default()).unwrap();
        assert_eq!(result.trace.len(), result.n_dip as usize);
        let mut last = 0;
        for rec in &result.trace {
            assert!(rec.constraint_clauses > last);
            last = rec.constraint_clauses;
        }
    }
}
