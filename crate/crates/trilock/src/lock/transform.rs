//! Netlist-level construction of the locked circuit.
//!
//! Added machinery, all built from the `.bench` gate alphabet:
//!
//! - a saturating mode counter of `ceil(log2(kappa + 2))` bits counting
//!   `0..=kappa+1`, which distinguishes key-entry cycles from the
//!   functional phase;
//! - `kappa_s * |I|` key-prefix registers loaded during the first
//!   `kappa_s` entry cycles and drained one slice per functional cycle
//!   for the prefix comparison;
//! - sticky flags: wrong-key, suffix-differs-from-`k**`, and a
//!   streamed most-significant-first magnitude comparison of the
//!   suffix against the hardwired threshold;
//! - the sticky `E^S`/`E^F` flags and the output/state error handlers.
//!
//! Original registers are stalled through feedback multiplexers during
//! key entry, so functional cycle 1 of the locked design aligns with
//! cycle 1 of the original.

use std::collections::HashSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::netlist::builder::NetBuilder;
use crate::netlist::{Circuit, FlipFlop, RegisterTag};

use super::{FlagNets, LockConfig, LockError, LockMode, LockedCircuit};

fn ceil_log2(n: usize) -> usize {
    debug_assert!(n >= 1);
    (usize::BITS - (n - 1).leading_zeros()) as usize
}

/// `value` as a `width`-bit vector, most significant first.
fn const_bits(value: u128, width: usize) -> Vec<bool> {
    (0..width)
        .map(|i| (value >> (width - 1 - i)) & 1 == 1)
        .collect()
}

/// Applies the locking transformation to `original`.
///
/// `rng_seed` deterministically selects which original registers
/// receive the state-handler inversion; outputs are taken in
/// declaration order.
pub fn lock(
    original: &Circuit,
    cfg: &LockConfig,
    rng_seed: u64,
) -> Result<LockedCircuit, LockError> {
    cfg.validate(Some(original))?;
    let width = original.input_count();
    let kappa = cfg.kappa();
    let kappa_s = cfg.kappa_s;
    let inputs: Vec<String> = original.inputs().to_vec();

    let mut b = NetBuilder::new(original);
    // (output net, D net) of every added register, filled in as the
    // control logic is built.
    let mut extra_ffs: Vec<(String, String)> = Vec::new();

    // Mode counter: ceil(log2(kappa + 2)) bits counting 0..=kappa+1,
    // saturating. During cycle c the counter reads c - 1.
    let cnt_bits = ceil_log2(kappa + 2);
    let cnt: Vec<String> = (0..cnt_bits).map(|i| b.fresh(&format!("cnt{i}"))).collect();
    let cnt_msb: Vec<String> = cnt.iter().rev().cloned().collect();

    // Incremented value with ripple carry (carry-in 1).
    let mut inc = vec![b.not(&cnt[0])];
    let mut carry = cnt[0].clone();
    for i in 1..cnt_bits {
        inc.push(b.xor2(&cnt[i], &carry, "inc"));
        if i + 1 < cnt_bits {
            carry = b.and(vec![cnt[i].clone(), carry], "cy");
        }
    }
    let saturated = b.eq_const(&cnt_msb, &const_bits((kappa + 1) as u128, cnt_bits), "sat");
    for i in 0..cnt_bits {
        let next = b.mux(&saturated, &cnt[i], &inc[i], "cntn");
        extra_ffs.push((cnt[i].clone(), next));
    }

    // Phase signals.
    let key_phase = b
        .lt_const(&cnt_msb, &const_bits(kappa as u128, cnt_bits), "keyp")
        .expect("kappa >= 1");
    let func_phase = b.not(&key_phase);
    let shift_in = b
        .lt_const(&cnt_msb, &const_bits(kappa_s as u128, cnt_bits), "shin")
        .expect("kappa_s >= 1");
    let func_first = b.eq_const(&cnt_msb, &const_bits(kappa as u128, cnt_bits), "ffirst");
    let nshift_in = b.not(&shift_in);
    let hold_phase = b.and(vec![key_phase.clone(), nshift_in], "hold");

    // Entry-cycle selectors: sel[c-1] is high during entry cycle c.
    let sel: Vec<String> = (0..kappa)
        .map(|c| b.eq_const(&cnt_msb, &const_bits(c as u128, cnt_bits), "sel"))
        .collect();

    // Wrong-key flag: sticky OR of per-cycle mismatches against the
    // hardwired k* slices.
    let wk = b.fresh("wk");
    let mut wk_terms = vec![wk.clone()];
    for c in 1..=kappa {
        let slice: Vec<bool> = cfg.k_star.cycle(c).to_vec();
        let eq = b.eq_const(&inputs, &slice, "kseq");
        let neq = b.not(&eq);
        wk_terms.push(b.and(vec![sel[c - 1].clone(), neq], "wkt"));
    }
    let wk_next = b.or(wk_terms, "wkn");
    extra_ffs.push((wk.clone(), wk_next.clone()));

    // Key-prefix shift register: kappa_s slices of |I| bits. Loaded
    // front-to-back during the first kappa_s entry cycles, held for the
    // rest of key entry, drained one slice per functional cycle.
    let kp: Vec<Vec<String>> = (0..kappa_s)
        .map(|j| (0..width).map(|i| b.fresh(&format!("kp{j}_{i}"))).collect())
        .collect();
    let shift_active = b.or(vec![shift_in.clone(), func_phase.clone()], "shact");
    for j in 0..kappa_s {
        for i in 0..width {
            let next = if j + 1 < kappa_s {
                b.mux(
                    &shift_active,
                    &kp[j + 1][i].clone(),
                    &kp[j][i].clone(),
                    "kpn",
                )
            } else {
                // Tail slice: take inputs while loading, hold during the
                // suffix entry cycles, drain to 0 in the functional phase.
                let load = b.and(vec![shift_in.clone(), inputs[i].clone()], "kpl");
                let hold = b.and(vec![hold_phase.clone(), kp[j][i].clone()], "kph");
                b.or(vec![load, hold], "kpn")
            };
            extra_ffs.push((kp[j][i].clone(), next));
        }
    }

    // Head-slice comparison feeding the prefix match.
    let eq_now = b.eq_nets(&inputs, &kp[0], "eqnow");

    // Running conjunction of per-cycle prefix matches (2+ cycle case).
    let running_match = if kappa_s >= 2 {
        let a = b.fresh("pmrun");
        let armed = b.or(vec![func_first.clone(), a.clone()], "pma");
        let next = b.and(vec![func_phase.clone(), eq_now.clone(), armed], "pmn");
        extra_ffs.push((a.clone(), next));
        Some(a)
    } else {
        None
    };

    // One-hot window marking functional cycle kappa_s.
    let mut window_last = func_first.clone();
    for j in 2..=kappa_s {
        let w = b.fresh(&format!("win{j}"));
        extra_ffs.push((w.clone(), window_last.clone()));
        window_last = w;
    }

    let prefix_match_live = match &running_match {
        Some(a) => b.and(vec![a.clone(), eq_now.clone()], "pml"),
        None => eq_now.clone(),
    };

    // E^S flag: latches wrong-key AND full prefix match at functional
    // cycle kappa_s; the live net drives the handlers the same cycle.
    let es = b.fresh("es");
    let es_fire = b.and(
        vec![window_last.clone(), wk.clone(), prefix_match_live],
        "esf",
    );
    let es_live = b.or(vec![es.clone(), es_fire], "esl");
    extra_ffs.push((es.clone(), es_live.clone()));

    // Suffix machinery (tuning mode only).
    let mut flag_ef: Option<String> = None;
    let mut err_terms = vec![es_live.clone()];
    if cfg.mode == LockMode::TriLock {
        let kappa_f = cfg.kappa_f;
        // Suffix-differs-from-k** sticky flag.
        let sn = b.fresh("sn");
        let mut sn_terms = vec![sn.clone()];
        for j in 1..=kappa_f {
            let slice: Vec<bool> = cfg.k_double_star.cycle(j).to_vec();
            let eq = b.eq_const(&inputs, &slice, "kdeq");
            let neq = b.not(&eq);
            sn_terms.push(b.and(vec![sel[kappa_s + j - 1].clone(), neq], "snt"));
        }
        let sn_next = b.or(sn_terms, "snn");
        extra_ffs.push((sn.clone(), sn_next.clone()));

        // Streamed magnitude comparison of the suffix against the
        // threshold, most significant slice first: (lt, gt) stick at
        // the first deciding slice.
        let threshold = cfg.threshold();
        let tbits = const_bits(threshold, cfg.suffix_bits());
        let lt = b.fresh("slt");
        let gt = b.fresh("sgt");
        let nlt = b.not(&lt);
        let ngt = b.not(&gt);
        let undecided = b.and(vec![nlt, ngt], "und");
        let mut lt_terms = vec![lt.clone()];
        let mut gt_terms = vec![gt.clone()];
        for j in 1..=kappa_f {
            let slice = &tbits[(j - 1) * width..j * width];
            if let Some(g) = b.gt_const(&inputs, slice, "sgtj") {
                let t = b.and(vec![sel[kappa_s + j - 1].clone(), g], "sgtt");
                gt_terms.push(b.and(vec![undecided.clone(), t], "sgtu"));
            }
            if let Some(l) = b.lt_const(&inputs, slice, "sltj") {
                let t = b.and(vec![sel[kappa_s + j - 1].clone(), l], "sltt");
                lt_terms.push(b.and(vec![undecided.clone(), t], "sltu"));
            }
        }
        let lt_next = b.or(lt_terms, "sltn");
        let gt_next = b.or(gt_terms, "sgtn");
        extra_ffs.push((lt.clone(), lt_next));
        extra_ffs.push((gt.clone(), gt_next.clone()));

        // E^F latches at the end of the last entry cycle from the
        // next-state nets, so it is asserted from functional cycle 1.
        let ef = b.fresh("ef");
        let arm = {
            let lt_arm = b
                .lt_const(
                    &cnt_msb,
                    &const_bits((kappa - 1) as u128, cnt_bits),
                    "efarm",
                )
                .expect("kappa - 1 >= 1 in tuning mode");
            b.not(&lt_arm)
        };
        let suffix_le = b.not(&gt_next);
        let fire = b.and(vec![arm, wk_next, sn_next, suffix_le], "eff");
        let ef_next = b.or(vec![ef.clone(), fire], "efn");
        extra_ffs.push((ef.clone(), ef_next));
        err_terms.push(ef.clone());
        flag_ef = Some(ef);
    }
    let err = b.or(err_terms, "err");

    // State error handler targets, chosen deterministically from the seed.
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut targets: Vec<usize> =
        rand::seq::index::sample(&mut rng, original.ff_count(), cfg.ff_invert_count).into_vec();
    targets.sort_unstable();
    let target_set: HashSet<usize> = targets.into_iter().collect();

    // Original registers: stall during key entry, then optionally pass
    // through the state error handler.
    let mut flipflops = Vec::with_capacity(original.ff_count() + extra_ffs.len());
    for (idx, ff) in original.flipflops().iter().enumerate() {
        let stalled = b.mux(&key_phase, &ff.output, &ff.input, "stall");
        let d = if target_set.contains(&idx) {
            b.xor2(&stalled, &err, "sherr")
        } else {
            stalled
        };
        flipflops.push(FlipFlop {
            output: ff.output.clone(),
            input: d,
        });
    }

    // Output error handler on the first po_invert_count outputs.
    let mut outputs = original.outputs().to_vec();
    for o in outputs.iter_mut().take(cfg.po_invert_count) {
        *o = b.xor2(o, &err, "po");
    }

    let mut register_tags = vec![RegisterTag::Original; original.ff_count()];
    for (q, d) in extra_ffs {
        flipflops.push(FlipFlop {
            output: q,
            input: d,
        });
        register_tags.push(RegisterTag::Extra);
    }

    let mut gates = original.gates().to_vec();
    gates.extend(b.gates);

    let circuit = Circuit::new(
        format!("{}_locked", original.name()),
        inputs,
        outputs,
        gates,
        flipflops,
        register_tags,
    )?;

    Ok(LockedCircuit {
        circuit,
        config: cfg.clone(),
        flag_nets: FlagNets {
            error_s: es,
            error_f: flag_ef,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::BitSequence;
    use crate::lock::predict_error;
    use crate::netlist::parse_bench;
    use crate::samples::{TOY2, TOY3};

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
    fn correct_key_is_transparent_on_all_inputs() {
        let c = parse_bench(TOY2).unwrap();
        let cfg = toy_config();
        let locked = lock(&c, &cfg, 1).unwrap();
        let b = 2;
        for iv in 0..16u128 {
            let i = BitSequence::from_unsigned(iv, b, 2).unwrap();
            let reference = c.simulate(&i, b).unwrap();
            let functional = locked.simulate_functional(&cfg.k_star, &i).unwrap();
            assert_eq!(reference, functional, "input {iv:04b}");
        }
    }

    #[test]
    fn hardware_errors_equal_predictor_on_full_toy_table() {
        let c = parse_bench(TOY2).unwrap();
        let cfg = toy_config();
        let locked = lock(&c, &cfg, 1).unwrap();
        let b = 2;
        for kv in 0..64u128 {
            let k = BitSequence::from_unsigned(kv, 3, 2).unwrap();
            for iv in 0..16u128 {
                let i = BitSequence::from_unsigned(iv, b, 2).unwrap();
                let reference = c.simulate(&i, b).unwrap();
                let functional = locked.simulate_functional(&k, &i).unwrap();
                let hw_error = reference != functional;
                let predicted = predict_error(&i, &k, &cfg).unwrap();
                assert_eq!(hw_error, predicted, "key {kv:06b} input {iv:04b}");
            }
        }
    }

    #[test]
    fn naive_mode_matches_its_predictor() {
        let c = parse_bench(TOY2).unwrap();
        let cfg = LockConfig::naive(2, BitSequence::from_bit_str("1001", 2).unwrap());
        let locked = lock(&c, &cfg, 1).unwrap();
        let b = 2;
        for kv in 0..16u128 {
            let k = BitSequence::from_unsigned(kv, 2, 2).unwrap();
            for iv in 0..16u128 {
                let i = BitSequence::from_unsigned(iv, b, 2).unwrap();
                let reference = c.simulate(&i, b).unwrap();
                let functional = locked.simulate_functional(&k, &i).unwrap();
                let predicted = predict_error(&i, &k, &cfg).unwrap();
                assert_eq!(reference != functional, predicted, "k={kv:04b} i={iv:04b}");
            }
        }
    }

    #[test]
    fn added_registers_are_tagged_extra_with_expected_count() {
        let c = parse_bench(TOY2).unwrap();
        let cfg = toy_config();
        let locked = lock(&c, &cfg, 1).unwrap();
        let extra: Vec<_> = locked.extra_registers();
        // kappa_s*|I| prefix + counter + window + running-match + six
        // flag bits (wk, sn, lt, gt, es, ef).
        let cnt_bits = ceil_log2(cfg.kappa() + 2);
        let expected = cfg.kappa_s * 2 + cnt_bits + (cfg.kappa_s - 1) + 1 + 6;
        assert_eq!(extra.len(), expected);
        assert_eq!(
            locked.circuit.ff_count(),
            c.ff_count() + extra.len(),
            "original registers keep their tags"
        );
    }

    #[test]
    fn state_handler_targets_follow_seed_deterministically() {
        let c = parse_bench(TOY3).unwrap();
        let cfg = LockConfig {
            kappa_s: 1,
            kappa_f: 1,
            alpha: 0.5,
            k_star: BitSequence::from_bit_str("101 010", 3).unwrap(),
            k_double_star: BitSequence::from_bit_str("111", 3).unwrap(),
            po_invert_count: 1,
            ff_invert_count: 1,
            mode: LockMode::TriLock,
            threshold_override: None,
        };
        cfg.validate(Some(&c)).unwrap();
        let a = lock(&c, &cfg, 7).unwrap();
        let b2 = lock(&c, &cfg, 7).unwrap();
        assert_eq!(a.circuit, b2.circuit);
    }

    #[test]
    fn state_handler_is_extra_corruption_not_the_indicator() {
        // With a state handler active the error table must still match
        // the predictor exactly: the unconditional PO inversion fixes
        // the onset cycle.
        let c = parse_bench(TOY2).unwrap();
        let mut cfg = toy_config();
        cfg.ff_invert_count = 1;
        let locked = lock(&c, &cfg, 3).unwrap();
        for kv in 0..64u128 {
            let k = BitSequence::from_unsigned(kv, 3, 2).unwrap();
            for iv in 0..16u128 {
                let i = BitSequence::from_unsigned(iv, 2, 2).unwrap();
                let reference = c.simulate(&i, 2).unwrap();
                let functional = locked.simulate_functional(&k, &i).unwrap();
                let predicted = predict_error(&i, &k, &cfg).unwrap();
                assert_eq!(reference != functional, predicted, "k={kv:06b} i={iv:04b}");
            }
        }
    }

    #[test]
    fn multi_cycle_suffix_comparator_is_exact() {
        // kappa_f = 2 streams the threshold comparison across two
        // suffix cycles; threshold 5 = 01 01 exercises both slices.
        let c = parse_bench(TOY2).unwrap();
        let cfg = LockConfig {
            kappa_s: 2,
            kappa_f: 2,
            alpha: 0.37,
            k_star: BitSequence::from_bit_str("10 01 01 10", 2).unwrap(),
            k_double_star: BitSequence::from_bit_str("11 00", 2).unwrap(),
            po_invert_count: 2,
            ff_invert_count: 1,
            mode: LockMode::TriLock,
            threshold_override: None,
        };
        assert_eq!(cfg.threshold(), 5);
        let locked = lock(&c, &cfg, 5).unwrap();
        for kv in 0..(1u128 << 8) {
            let k = BitSequence::from_unsigned(kv, 4, 2).unwrap();
            for iv in 0..(1u128 << 4) {
                let i = BitSequence::from_unsigned(iv, 2, 2).unwrap();
                let reference = c.simulate(&i, 2).unwrap();
                let functional = locked.simulate_functional(&k, &i).unwrap();
                let predicted = predict_error(&i, &k, &cfg).unwrap();
                assert_eq!(reference != functional, predicted, "k={kv:08b} i={iv:04b}");
            }
        }
    }

    #[test]
    fn single_cycle_key_uses_the_smallest_counter() {
        let c = parse_bench(TOY2).unwrap();
        let cfg = LockConfig::naive(1, BitSequence::from_bit_str("10", 2).unwrap());
        let locked = lock(&c, &cfg, 1).unwrap();
        for kv in 0..4u128 {
            let k = BitSequence::from_unsigned(kv, 1, 2).unwrap();
            for iv in 0..16u128 {
                let i = BitSequence::from_unsigned(iv, 2, 2).unwrap();
                let reference = c.simulate(&i, 2).unwrap();
                let functional = locked.simulate_functional(&k, &i).unwrap();
                assert_eq!(
                    reference != functional,
                    predict_error(&i, &k, &cfg).unwrap()
                );
            }
        }
    }

    #[test]
    fn rejects_undersized_circuits() {
        let c = parse_bench(TOY2).unwrap();
        let mut cfg = toy_config();
        cfg.po_invert_count = 3;
        assert_eq!(
            lock(&c, &cfg, 0).unwrap_err(),
            LockError::TooManyOutputs { got: 3, have: 2 }
        );
        let mut cfg = toy_config();
        cfg.ff_invert_count = 2;
        assert_eq!(
            lock(&c, &cfg, 0).unwrap_err(),
            LockError::TooManyRegisters { got: 2, have: 1 }
        );
    }
}
