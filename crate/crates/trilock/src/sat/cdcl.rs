//! Embedded conflict-driven clause-learning SAT solver.
//!
//! Two-watched-literal propagation, 1UIP conflict analysis, VSIDS-like
//! activity scoring with a lazy heap, phase saving, and Luby restarts.
//! Decisions break activity ties by lowest variable index, so runs are
//! deterministic. Incremental use is supported: clauses may be added
//! between `solve` calls.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::{Duration, Instant};

const UNDEF_CLAUSE: u32 = u32::MAX;

/// Internal literal: `var << 1 | negated`.
type ILit = u32;

fn ilit(var: u32, negated: bool) -> ILit {
    var << 1 | u32::from(negated)
}

fn ilit_var(l: ILit) -> u32 {
    l >> 1
}

fn ilit_neg(l: ILit) -> ILit {
    l ^ 1
}

fn ilit_from_dimacs(l: i32) -> ILit {
    debug_assert!(l != 0);
    ilit(l.unsigned_abs() - 1, l < 0)
}

fn lit_value(assigns: &[Value], l: ILit) -> Value {
    match assigns[ilit_var(l) as usize] {
        Value::Undef => Value::Undef,
        Value::True => {
            if l & 1 == 0 {
                Value::True
            } else {
                Value::False
            }
        }
        Value::False => {
            if l & 1 == 0 {
                Value::False
            } else {
                Value::True
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Value {
    Undef,
    True,
    False,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SolveOutcome {
    /// Total assignment indexed by variable.
    Sat(Vec<bool>),
    Unsat,
    /// Budget exhausted before a verdict.
    Unknown,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Budget {
    pub max_conflicts: Option<u64>,
    pub timeout: Option<Duration>,
}

struct HeapEntry {
    activity: f64,
    var: u32,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for HeapEntry {}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Max activity first; ties favor the lowest variable index.
        self.activity
            .total_cmp(&other.activity)
            .then_with(|| other.var.cmp(&self.var))
    }
}

pub struct CdclSolver {
    clauses: Vec<Vec<ILit>>,
    watches: Vec<Vec<u32>>,
    assigns: Vec<Value>,
    phase: Vec<bool>,
    level: Vec<u32>,
    reason: Vec<u32>,
    activity: Vec<f64>,
    order: BinaryHeap<HeapEntry>,
    trail: Vec<ILit>,
    trail_lim: Vec<usize>,
    propagate_head: usize,
    var_inc: f64,
    seen: Vec<bool>,
    /// Formula already proven unsatisfiable at level 0.
    unsat: bool,
    pub conflicts: u64,
    pub decisions: u64,
    pub propagations: u64,
}

impl Default for CdclSolver {
    fn default() -> Self {
        Self::new()
    }
}

impl CdclSolver {
    pub fn new() -> Self {
        CdclSolver {
            clauses: Vec::new(),
            watches: Vec::new(),
            assigns: Vec::new(),
            phase: Vec::new(),
            level: Vec::new(),
            reason: Vec::new(),
            activity: Vec::new(),
            order: BinaryHeap::new(),
            trail: Vec::new(),
            trail_lim: Vec::new(),
            propagate_head: 0,
            var_inc: 1.0,
            seen: Vec::new(),
            unsat: false,
            conflicts: 0,
            decisions: 0,
            propagations: 0,
        }
    }

    pub fn var_count(&self) -> usize {
        self.assigns.len()
    }

    /// Grows the variable set to at least `n` variables.
    pub fn ensure_vars(&mut self, n: usize) {
        while self.assigns.len() < n {
            let v = self.assigns.len() as u32;
            self.assigns.push(Value::Undef);
            self.phase.push(false);
            self.level.push(0);
            self.reason.push(UNDEF_CLAUSE);
            self.activity.push(0.0);
            self.seen.push(false);
            self.watches.push(Vec::new());
            self.watches.push(Vec::new());
            self.order.push(HeapEntry {
                activity: 0.0,
                var: v,
            });
        }
    }

    fn value_lit(&self, l: ILit) -> Value {
        lit_value(&self.assigns, l)
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    /// Adds a clause in DIMACS convention. Must be called at decision
    /// level 0 (between `solve` calls is fine).
    pub fn add_clause(&mut self, lits: &[i32]) {
        debug_assert_eq!(self.decision_level(), 0);
        if self.unsat {
            return;
        }
        let max_var = lits.iter().map(|l| l.unsigned_abs() as usize).max();
        if let Some(m) = max_var {
            self.ensure_vars(m);
        }
        // Dedup and drop tautologies / falsified-at-level-0 literals.
        let mut c: Vec<ILit> = Vec::with_capacity(lits.len());
        for &dl in lits {
            let l = ilit_from_dimacs(dl);
            match self.value_lit(l) {
                Value::True => return, // satisfied at level 0
                Value::False => continue,
                Value::Undef => {
                    if c.contains(&ilit_neg(l)) {
                        return; // tautology
                    }
                    if !c.contains(&l) {
                        c.push(l);
                    }
                }
            }
        }
        match c.len() {
            0 => self.unsat = true,
            1 => {
                self.enqueue(c[0], UNDEF_CLAUSE);
                if self.propagate().is_some() {
                    self.unsat = true;
                }
            }
            _ => {
                let idx = self.clauses.len() as u32;
                self.watches[c[0] as usize].push(idx);
                self.watches[c[1] as usize].push(idx);
                self.clauses.push(c);
            }
        }
    }

    fn enqueue(&mut self, l: ILit, reason: u32) {
        let v = ilit_var(l) as usize;
        debug_assert_eq!(self.assigns[v], Value::Undef);
        self.assigns[v] = if l & 1 == 0 {
            Value::True
        } else {
            Value::False
        };
        self.phase[v] = l & 1 == 0;
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    /// Unit propagation; returns a conflicting clause index if any.
    fn propagate(&mut self) -> Option<u32> {
        while self.propagate_head < self.trail.len() {
            let p = self.trail[self.propagate_head];
            self.propagate_head += 1;
            self.propagations += 1;
            let false_lit = ilit_neg(p);
            let mut i = 0;
            let mut watch_list = std::mem::take(&mut self.watches[false_lit as usize]);
            while i < watch_list.len() {
                let ci = watch_list[i];
                let clause = &mut self.clauses[ci as usize];
                // Normalize: the false literal sits at position 1.
                if clause[0] == false_lit {
                    clause.swap(0, 1);
                }
                debug_assert_eq!(clause[1], false_lit);
                let first = clause[0];
                if lit_value(&self.assigns, first) == Value::True {
                    i += 1;
                    continue;
                }
                // Look for a replacement watch.
                let mut replacement = None;
                for k in 2..clause.len() {
                    if lit_value(&self.assigns, clause[k]) != Value::False {
                        clause.swap(1, k);
                        replacement = Some(clause[1]);
                        break;
                    }
                }
                if let Some(new_watch) = replacement {
                    self.watches[new_watch as usize].push(ci);
                    watch_list.swap_remove(i);
                    continue;
                }
                if lit_value(&self.assigns, first) == Value::False {
                    // Conflict: restore the watch list.
                    self.watches[false_lit as usize] = watch_list;
                    return Some(ci);
                }
                self.enqueue(first, ci);
                i += 1;
            }
            self.watches[false_lit as usize] = watch_list;
        }
        None
    }

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
            // Stale heap entries would compare against rescaled values;
            // rebuild to keep the order deterministic.
            self.order = (0..self.assigns.len() as u32)
                .map(|var| HeapEntry {
                    activity: self.activity[var as usize],
                    var,
                })
                .collect();
            return;
        }
        self.order.push(HeapEntry {
            activity: self.activity[v],
            var: v as u32,
        });
    }

    /// 1UIP conflict analysis. Returns the learned clause (asserting
    /// literal first) and the backjump level.
    fn analyze(&mut self, conflict: u32) -> (Vec<ILit>, u32) {
        let mut learned: Vec<ILit> = vec![0]; // slot 0 for the asserting literal
        let mut counter = 0usize;
        let mut p: Option<ILit> = None;
        let mut index = self.trail.len();
        let mut clause_idx = conflict;
        loop {
            let clause = &self.clauses[clause_idx as usize];
            let start = usize::from(p.is_some());
            let lits: Vec<ILit> = clause[start..].to_vec();
            for q in lits {
                let v = ilit_var(q) as usize;
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    self.bump_var(v);
                    if self.level[v] == self.decision_level() {
                        counter += 1;
                    } else {
                        learned.push(q);
                    }
                }
            }
            // Walk the trail backwards to the next marked literal.
            loop {
                index -= 1;
                let l = self.trail[index];
                if self.seen[ilit_var(l) as usize] {
                    p = Some(l);
                    break;
                }
            }
            let pv = ilit_var(p.expect("marked literal")) as usize;
            self.seen[pv] = false;
            counter -= 1;
            if counter == 0 {
                learned[0] = ilit_neg(p.expect("uip"));
                break;
            }
            clause_idx = self.reason[pv];
            debug_assert_ne!(clause_idx, UNDEF_CLAUSE);
        }
        for &l in &learned[1..] {
            self.seen[ilit_var(l) as usize] = false;
        }
        // Backjump to the second-highest level in the learned clause.
        let backjump = learned[1..]
            .iter()
            .map(|&l| self.level[ilit_var(l) as usize])
            .max()
            .unwrap_or(0);
        // Put a literal of the backjump level into the watch slot 1.
        if learned.len() > 1 {
            let pos = learned[1..]
                .iter()
                .position(|&l| self.level[ilit_var(l) as usize] == backjump)
                .expect("literal at backjump level")
                + 1;
            learned.swap(1, pos);
        }
        (learned, backjump)
    }

    fn cancel_until(&mut self, level: u32) {
        while self.decision_level() > level {
            let lim = self.trail_lim.pop().expect("non-root level");
            for &l in &self.trail[lim..] {
                let v = ilit_var(l) as usize;
                self.assigns[v] = Value::Undef;
                self.reason[v] = UNDEF_CLAUSE;
                self.order.push(HeapEntry {
                    activity: self.activity[v],
                    var: ilit_var(l),
                });
            }
            self.trail.truncate(lim);
        }
        self.propagate_head = self.propagate_head.min(self.trail.len());
    }

    fn pick_branch_var(&mut self) -> Option<u32> {
        while let Some(e) = self.order.pop() {
            if self.assigns[e.var as usize] == Value::Undef {
                return Some(e.var);
            }
        }
        None
    }

    fn luby(x: u64) -> u64 {
        // Luby sequence: 1 1 2 1 1 2 4 ...
        let mut size: u64 = 1;
        let mut seq: u32 = 0;
        while size < x + 1 {
            seq += 1;
            size = 2 * size + 1;
        }
        let mut x = x;
        while size - 1 != x {
            size = (size - 1) >> 1;
            seq -= 1;
            x %= size;
        }
        1u64 << seq
    }

    /// Solves the current formula under the given budget.
    pub fn solve(&mut self, budget: Budget) -> SolveOutcome {
        if self.unsat {
            return SolveOutcome::Unsat;
        }
        self.cancel_until(0);
        if self.propagate().is_some() {
            self.unsat = true;
            return SolveOutcome::Unsat;
        }
        let start = Instant::now();
        let conflict_cap = budget.max_conflicts.map(|c| self.conflicts + c);
        let mut restart_round = 0u64;
        let mut restart_budget = 100 * Self::luby(restart_round);
        let mut conflicts_this_round = 0u64;
        loop {
            if let Some(ci) = self.propagate() {
                self.conflicts += 1;
                conflicts_this_round += 1;
                if self.decision_level() == 0 {
                    self.unsat = true;
                    return SolveOutcome::Unsat;
                }
                let (learned, backjump) = self.analyze(ci);
                self.cancel_until(backjump);
                let asserting = learned[0];
                if learned.len() == 1 {
                    self.enqueue(asserting, UNDEF_CLAUSE);
                } else {
                    let idx = self.clauses.len() as u32;
                    self.watches[learned[0] as usize].push(idx);
                    self.watches[learned[1] as usize].push(idx);
                    self.clauses.push(learned);
                    self.enqueue(asserting, idx);
                }
                self.var_inc /= 0.95;
                if let Some(cap) = conflict_cap {
                    if self.conflicts >= cap {
                        self.cancel_until(0);
                        return SolveOutcome::Unknown;
                    }
                }
                if self.conflicts.is_multiple_of(2048) {
                    if let Some(t) = budget.timeout {
                        if start.elapsed() >= t {
                            self.cancel_until(0);
                            return SolveOutcome::Unknown;
                        }
                    }
                }
                if conflicts_this_round >= restart_budget {
                    restart_round += 1;
                    restart_budget = 100 * Self::luby(restart_round);
                    conflicts_this_round = 0;
                    self.cancel_until(0);
                }
            } else {
                match self.pick_branch_var() {
                    None => {
                        let model = self.assigns.iter().map(|&v| v == Value::True).collect();
                        // Leave level 0 so clauses can be added next.
                        self.cancel_until(0);
                        return SolveOutcome::Sat(model);
                    }
                    Some(v) => {
                        self.decisions += 1;
                        if self.decisions.is_multiple_of(4096) {
                            if let Some(t) = budget.timeout {
                                if start.elapsed() >= t {
                                    self.cancel_until(0);
                                    return SolveOutcome::Unknown;
                                }
                            }
                        }
                        self.trail_lim.push(self.trail.len());
                        let lit = ilit(v, !self.phase[v as usize]);
                        self.enqueue(lit, UNDEF_CLAUSE);
                    }
                }
            }
        }
    }
}
