//! Gate-level sequential netlist IR and cycle-accurate simulation.
//!
//! A [`Circuit`] is a validated netlist: every net is defined exactly
//! once (primary input, gate output, or flip-flop output), every fan-in
//! resolves, and the combinational portion is acyclic. All flip-flops
//! reset to logic 0; gates evaluate in topological order within a cycle
//! and flip-flops update simultaneously at the cycle boundary.

mod bench;
pub(crate) mod builder;

pub use bench::{parse_bench, write_bench, BenchParseError};

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::bits::BitSequence;

/// Gate alphabet of the `.bench` format.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateKind {
    And,
    Or,
    Nand,
    Nor,
    Xor,
    Xnor,
    Not,
    Buf,
}

impl GateKind {
    pub fn name(self) -> &'static str {
        match self {
            GateKind::And => "AND",
            GateKind::Or => "OR",
            GateKind::Nand => "NAND",
            GateKind::Nor => "NOR",
            GateKind::Xor => "XOR",
            GateKind::Xnor => "XNOR",
            GateKind::Not => "NOT",
            GateKind::Buf => "BUF",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name.to_ascii_uppercase().as_str() {
            "AND" => Some(GateKind::And),
            "OR" => Some(GateKind::Or),
            "NAND" => Some(GateKind::Nand),
            "NOR" => Some(GateKind::Nor),
            "XOR" => Some(GateKind::Xor),
            "XNOR" => Some(GateKind::Xnor),
            "NOT" => Some(GateKind::Not),
            "BUF" => Some(GateKind::Buf),
            _ => None,
        }
    }

    /// Evaluates the gate over its fan-in values. XOR is n-ary parity,
    /// XNOR its complement.
    pub fn eval(self, fanin: impl IntoIterator<Item = bool>) -> bool {
        let mut it = fanin.into_iter();
        match self {
            GateKind::And => it.all(|b| b),
            GateKind::Or => it.any(|b| b),
            GateKind::Nand => !it.all(|b| b),
            GateKind::Nor => !it.any(|b| b),
            GateKind::Xor => it.fold(false, |acc, b| acc ^ b),
            GateKind::Xnor => !it.fold(false, |acc, b| acc ^ b),
            GateKind::Not => !it.next().expect("NOT takes one fan-in"),
            GateKind::Buf => it.next().expect("BUF takes one fan-in"),
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gate {
    pub output: String,
    pub kind: GateKind,
    pub fanin: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlipFlop {
    /// Q net driven by this register.
    pub output: String,
    /// D net sampled at each cycle boundary.
    pub input: String,
}

/// Provenance of a register relative to the locking transformation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RegisterTag {
    Original,
    Extra,
    Encoded,
}

impl RegisterTag {
    pub fn name(self) -> &'static str {
        match self {
            RegisterTag::Original => "Original",
            RegisterTag::Extra => "Extra",
            RegisterTag::Encoded => "Encoded",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "Original" => Some(RegisterTag::Original),
            "Extra" => Some(RegisterTag::Extra),
            "Encoded" => Some(RegisterTag::Encoded),
            _ => None,
        }
    }

    /// Encoded registers are locking-inserted, so they count as Extra
    /// when classifying SCCs.
    pub fn is_lock_inserted(self) -> bool {
        matches!(self, RegisterTag::Extra | RegisterTag::Encoded)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CircuitError {
    #[error("net `{0}` is defined more than once")]
    DuplicateNet(String),
    #[error("net `{0}` is referenced but never defined")]
    UndefinedNet(String),
    #[error("combinational cycle through gate output `{0}`")]
    CombinationalCycle(String),
    #[error("gate `{output}`: {kind} takes exactly one fan-in, got {got}")]
    UnaryArity {
        output: String,
        kind: GateKind,
        got: usize,
    },
    #[error("gate `{output}`: {kind} takes at least two fan-ins, got {got}")]
    BinaryArity {
        output: String,
        kind: GateKind,
        got: usize,
    },
    #[error("circuit has no primary inputs")]
    NoInputs,
    #[error("circuit has no primary outputs")]
    NoOutputs,
    #[error("duplicate primary output `{0}`")]
    DuplicateOutput(String),
    #[error("{tags} register tags given for {flipflops} flip-flops")]
    TagCountMismatch { tags: usize, flipflops: usize },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SimulateError {
    #[error("input sequence has cycle width {got}, circuit has {want} inputs")]
    WidthMismatch { got: usize, want: usize },
    #[error("input sequence provides {got} cycles, {want} requested")]
    CycleMismatch { got: usize, want: usize },
}

/// How a net is driven.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NetDriver {
    Input(usize),
    GateOutput(usize),
    FlipFlopOutput(usize),
}

/// A validated gate-level sequential circuit.
///
/// Construction via [`Circuit::new`] checks all structural invariants;
/// the value is immutable afterwards.
#[derive(Clone, Debug)]
pub struct Circuit {
    name: String,
    inputs: Vec<String>,
    outputs: Vec<String>,
    gates: Vec<Gate>,
    flipflops: Vec<FlipFlop>,
    register_tags: Vec<RegisterTag>,
    /// net name -> driver, for O(1) lookups.
    drivers: HashMap<String, NetDriver>,
    /// Gate indices in topological evaluation order.
    topo_order: Vec<usize>,
}

impl PartialEq for Circuit {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.inputs == other.inputs
            && self.outputs == other.outputs
            && self.gates == other.gates
            && self.flipflops == other.flipflops
            && self.register_tags == other.register_tags
    }
}

impl Eq for Circuit {}

impl Circuit {
    /// Validates and builds a circuit. Register tags are given per
    /// flip-flop, in flip-flop order; pass an empty vector to default
    /// everything to `Original`.
    pub fn new(
        name: impl Into<String>,
        inputs: Vec<String>,
        outputs: Vec<String>,
        gates: Vec<Gate>,
        flipflops: Vec<FlipFlop>,
        register_tags: Vec<RegisterTag>,
    ) -> Result<Self, CircuitError> {
        let register_tags = if register_tags.is_empty() {
            vec![RegisterTag::Original; flipflops.len()]
        } else {
            if register_tags.len() != flipflops.len() {
                return Err(CircuitError::TagCountMismatch {
                    tags: register_tags.len(),
                    flipflops: flipflops.len(),
                });
            }
            register_tags
        };

        let mut drivers = HashMap::new();
        for (i, n) in inputs.iter().enumerate() {
            if drivers.insert(n.clone(), NetDriver::Input(i)).is_some() {
                return Err(CircuitError::DuplicateNet(n.clone()));
            }
        }
        for (i, g) in gates.iter().enumerate() {
            if drivers
                .insert(g.output.clone(), NetDriver::GateOutput(i))
                .is_some()
            {
                return Err(CircuitError::DuplicateNet(g.output.clone()));
            }
        }
        for (i, ff) in flipflops.iter().enumerate() {
            if drivers
                .insert(ff.output.clone(), NetDriver::FlipFlopOutput(i))
                .is_some()
            {
                return Err(CircuitError::DuplicateNet(ff.output.clone()));
            }
        }

        for g in &gates {
            let arity = g.fanin.len();
            match g.kind {
                GateKind::Not | GateKind::Buf if arity != 1 => {
                    return Err(CircuitError::UnaryArity {
                        output: g.output.clone(),
                        kind: g.kind,
                        got: arity,
                    })
                }
                GateKind::Not | GateKind::Buf => {}
                _ if arity < 2 => {
                    return Err(CircuitError::BinaryArity {
                        output: g.output.clone(),
                        kind: g.kind,
                        got: arity,
                    })
                }
                _ => {}
            }
            for f in &g.fanin {
                if !drivers.contains_key(f) {
                    return Err(CircuitError::UndefinedNet(f.clone()));
                }
            }
        }
        for ff in &flipflops {
            if !drivers.contains_key(&ff.input) {
                return Err(CircuitError::UndefinedNet(ff.input.clone()));
            }
        }
        let mut seen_outputs = HashMap::new();
        for o in &outputs {
            if !drivers.contains_key(o) {
                return Err(CircuitError::UndefinedNet(o.clone()));
            }
            if seen_outputs.insert(o.clone(), ()).is_some() {
                return Err(CircuitError::DuplicateOutput(o.clone()));
            }
        }
        if inputs.is_empty() {
            return Err(CircuitError::NoInputs);
        }
        if outputs.is_empty() {
            return Err(CircuitError::NoOutputs);
        }

        let topo_order = topo_sort_gates(&gates, &drivers)?;

        Ok(Self {
            name: name.into(),
            inputs,
            outputs,
            gates,
            flipflops,
            register_tags,
            drivers,
            topo_order,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[String] {
        &self.outputs
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn flipflops(&self) -> &[FlipFlop] {
        &self.flipflops
    }

    pub fn input_count(&self) -> usize {
        self.inputs.len()
    }

    pub fn output_count(&self) -> usize {
        self.outputs.len()
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    pub fn ff_count(&self) -> usize {
        self.flipflops.len()
    }

    pub fn driver(&self, net: &str) -> Option<NetDriver> {
        self.drivers.get(net).copied()
    }

    /// Gate indices in a valid topological evaluation order.
    pub fn topo_order(&self) -> &[usize] {
        &self.topo_order
    }

    pub fn register_tag(&self, ff_index: usize) -> RegisterTag {
        self.register_tags[ff_index]
    }

    pub fn register_tags(&self) -> &[RegisterTag] {
        &self.register_tags
    }

    pub fn tag_of(&self, ff_output: &str) -> Option<RegisterTag> {
        match self.drivers.get(ff_output) {
            Some(NetDriver::FlipFlopOutput(i)) => Some(self.register_tags[*i]),
            _ => None,
        }
    }

    /// The same circuit with register tags replaced (one per flip-flop,
    /// in flip-flop order). Tags are sidecar data, so `.bench` round
    /// trips lose them; this reattaches them.
    pub fn with_register_tags(&self, tags: Vec<RegisterTag>) -> Result<Circuit, CircuitError> {
        if tags.len() != self.flipflops.len() {
            return Err(CircuitError::TagCountMismatch {
                tags: tags.len(),
                flipflops: self.flipflops.len(),
            });
        }
        let mut c = self.clone();
        c.register_tags = tags;
        Ok(c)
    }

    /// Simulates `cycles` clock cycles from the all-zero reset state.
    ///
    /// The input sequence must provide exactly `|I|` bits per cycle for
    /// exactly `cycles` cycles; the result carries `|O|` bits per cycle.
    pub fn simulate(
        &self,
        input_sequence: &BitSequence,
        cycles: usize,
    ) -> Result<BitSequence, SimulateError> {
        Simulator::new(self).run(input_sequence, cycles)
    }
}

fn topo_sort_gates(
    gates: &[Gate],
    drivers: &HashMap<String, NetDriver>,
) -> Result<Vec<usize>, CircuitError> {
    // Kahn's algorithm over gate-to-gate dependencies; inputs and
    // flip-flop outputs are sources.
    let mut indegree = vec![0usize; gates.len()];
    let mut dependents: Vec<Vec<usize>> = vec![Vec::new(); gates.len()];
    for (i, g) in gates.iter().enumerate() {
        for f in &g.fanin {
            if let Some(NetDriver::GateOutput(j)) = drivers.get(f) {
                indegree[i] += 1;
                dependents[*j].push(i);
            }
        }
    }
    let mut ready: Vec<usize> = (0..gates.len()).filter(|&i| indegree[i] == 0).collect();
    // Deterministic order: process lowest index first.
    ready.sort_unstable_by(|a, b| b.cmp(a));
    let mut order = Vec::with_capacity(gates.len());
    while let Some(i) = ready.pop() {
        order.push(i);
        for &j in &dependents[i] {
            indegree[j] -= 1;
            if indegree[j] == 0 {
                // Insert keeping the stack sorted descending so pops
                // stay in ascending index order.
                let pos = ready.partition_point(|&k| k > j);
                ready.insert(pos, j);
            }
        }
    }
    if order.len() != gates.len() {
        let stuck = (0..gates.len())
            .find(|&i| indegree[i] > 0)
            .expect("cycle implies a stuck gate");
        return Err(CircuitError::CombinationalCycle(
            gates[stuck].output.clone(),
        ));
    }
    Ok(order)
}

/// Index-compiled simulator for repeated runs over one circuit.
///
/// Net values live in a single flat buffer: inputs, then gate outputs,
/// then flip-flop outputs.
pub struct Simulator {
    input_count: usize,
    net_count: usize,
    /// (kind, output slot, fan-in slots) in topological order.
    ops: Vec<(GateKind, usize, Vec<usize>)>,
    output_slots: Vec<usize>,
    /// Net slot feeding each flip-flop's D pin.
    ff_d_slots: Vec<usize>,
    /// Net slot of each flip-flop's Q output.
    ff_q_slots: Vec<usize>,
}

impl Simulator {
    pub fn new(circuit: &Circuit) -> Self {
        let slot = |net: &str| -> usize {
            match circuit.driver(net).expect("validated circuit") {
                NetDriver::Input(i) => i,
                NetDriver::GateOutput(i) => circuit.input_count() + i,
                NetDriver::FlipFlopOutput(i) => circuit.input_count() + circuit.gate_count() + i,
            }
        };
        let ops = circuit
            .topo_order()
            .iter()
            .map(|&gi| {
                let g = &circuit.gates()[gi];
                (
                    g.kind,
                    circuit.input_count() + gi,
                    g.fanin.iter().map(|f| slot(f)).collect(),
                )
            })
            .collect();
        Simulator {
            input_count: circuit.input_count(),
            net_count: circuit.input_count() + circuit.gate_count() + circuit.ff_count(),
            ops,
            output_slots: circuit.outputs().iter().map(|o| slot(o)).collect(),
            ff_d_slots: circuit
                .flipflops()
                .iter()
                .map(|ff| slot(&ff.input))
                .collect(),
            ff_q_slots: (0..circuit.ff_count())
                .map(|i| circuit.input_count() + circuit.gate_count() + i)
                .collect(),
        }
    }

    pub fn ff_count(&self) -> usize {
        self.ff_d_slots.len()
    }

    pub fn input_count(&self) -> usize {
        self.input_count
    }

    pub fn output_count(&self) -> usize {
        self.output_slots.len()
    }

    /// Evaluates one clock cycle: reads `state` (current flip-flop
    /// values) and `inputs`, writes outputs into `outputs` and the next
    /// flip-flop values back into `state`.
    pub fn step(
        &self,
        state: &mut [bool],
        inputs: &[bool],
        outputs: &mut [bool],
        scratch: &mut Vec<bool>,
    ) {
        debug_assert_eq!(state.len(), self.ff_d_slots.len());
        debug_assert_eq!(inputs.len(), self.input_count);
        scratch.clear();
        scratch.resize(self.net_count, false);
        scratch[..self.input_count].copy_from_slice(inputs);
        for (i, &q) in self.ff_q_slots.iter().enumerate() {
            scratch[q] = state[i];
        }
        for (kind, out, fanin) in &self.ops {
            scratch[*out] = kind.eval(fanin.iter().map(|&s| scratch[s]));
        }
        for (o, &s) in outputs.iter_mut().zip(&self.output_slots) {
            *o = scratch[s];
        }
        for (i, &d) in self.ff_d_slots.iter().enumerate() {
            state[i] = scratch[d];
        }
    }

    pub fn run(
        &self,
        input_sequence: &BitSequence,
        cycles: usize,
    ) -> Result<BitSequence, SimulateError> {
        if input_sequence.cycle_width() != self.input_count {
            return Err(SimulateError::WidthMismatch {
                got: input_sequence.cycle_width(),
                want: self.input_count,
            });
        }
        if input_sequence.cycles() != cycles {
            return Err(SimulateError::CycleMismatch {
                got: input_sequence.cycles(),
                want: cycles,
            });
        }
        let mut state = vec![false; self.ff_count()];
        let mut outputs = vec![false; self.output_slots.len()];
        let mut scratch = Vec::new();
        let mut all = Vec::with_capacity(cycles * self.output_slots.len());
        for n in 1..=cycles {
            self.step(
                &mut state,
                input_sequence.cycle(n),
                &mut outputs,
                &mut scratch,
            );
            all.extend_from_slice(&outputs);
        }
        Ok(BitSequence::new(all, self.output_slots.len()).expect("output width divides evenly"))
    }
}
