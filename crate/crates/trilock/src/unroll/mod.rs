//! Combinational unrolling of sequential circuits.
//!
//! `unroll(c, b, kappa)` replicates the combinational logic of `c` over
//! `kappa + b` frames. Frame 1 state nets are tied to constant 0 (the
//! known-reset attack model); frame `n` state nets are driven by frame
//! `n - 1`'s next-state logic. Frames `1..=kappa` carry key bits, the
//! remaining `b` frames carry functional inputs.

mod cnf;

pub use cnf::{CnfFormula, VarOrigin};

use crate::netlist::{Circuit, GateKind, NetDriver};

/// Variable index inside an unrolled circuit (0-based, dense).
pub type UVar = usize;

#[derive(Clone, Debug)]
pub enum USource {
    /// Constant logic 0 (frame-1 state nets).
    Zero,
    /// Frame input: `inputs_per_frame[frame][pos]`.
    Input,
    /// Output of an unrolled gate.
    Gate { kind: GateKind, fanin: Vec<UVar> },
}

/// A `kappa + b`-frame combinational expansion of a sequential circuit.
#[derive(Clone, Debug)]
pub struct UnrolledCircuit {
    base: Circuit,
    frames: usize,
    key_frame_count: usize,
    /// Per-variable definition, in evaluation (topological) order.
    sources: Vec<USource>,
    /// `(net name, frame)` for every variable, for diagnostics and the
    /// DIMACS comment block.
    labels: Vec<(String, usize)>,
    inputs_per_frame: Vec<Vec<UVar>>,
    outputs_per_frame: Vec<Vec<UVar>>,
}

impl UnrolledCircuit {
    /// Unrolls `c` over `kappa + b` frames. `kappa > 0` marks the first
    /// `kappa` frames as key frames (meaningful for locked circuits).
    pub fn unroll(c: &Circuit, b: usize, kappa: usize) -> Self {
        assert!(b >= 1, "unrolling depth must be at least 1");
        let frames = kappa + b;
        let mut sources: Vec<USource> = Vec::new();
        let mut labels: Vec<(String, usize)> = Vec::new();
        let mut inputs_per_frame = Vec::with_capacity(frames);
        let mut outputs_per_frame = Vec::with_capacity(frames);

        // Shared constant-0 variable for frame-1 state nets.
        let zero: UVar = if c.ff_count() > 0 {
            sources.push(USource::Zero);
            labels.push(("0".to_string(), 0));
            0
        } else {
            usize::MAX
        };

        // Q-net variable of each flip-flop in the frame being built.
        let mut state_vars: Vec<UVar> = vec![zero; c.ff_count()];

        for frame in 1..=frames {
            let mut frame_inputs = Vec::with_capacity(c.input_count());
            for name in c.inputs() {
                let v = sources.len();
                sources.push(USource::Input);
                labels.push((name.clone(), frame));
                frame_inputs.push(v);
            }

            // Per-frame variable of each gate output (indexed by gate).
            let mut gate_vars: Vec<UVar> = vec![usize::MAX; c.gate_count()];
            let resolve = |net: &str,
                           gate_vars: &[UVar],
                           frame_inputs: &[UVar],
                           state_vars: &[UVar]|
             -> UVar {
                match c.driver(net).expect("validated circuit") {
                    NetDriver::Input(i) => frame_inputs[i],
                    NetDriver::GateOutput(i) => gate_vars[i],
                    NetDriver::FlipFlopOutput(i) => state_vars[i],
                }
            };

            for &gi in c.topo_order() {
                let g = &c.gates()[gi];
                let fanin = g
                    .fanin
                    .iter()
                    .map(|f| resolve(f, &gate_vars, &frame_inputs, &state_vars))
                    .collect();
                let v = sources.len();
                sources.push(USource::Gate {
                    kind: g.kind,
                    fanin,
                });
                labels.push((g.output.clone(), frame));
                gate_vars[gi] = v;
            }

            outputs_per_frame.push(
                c.outputs()
                    .iter()
                    .map(|o| resolve(o, &gate_vars, &frame_inputs, &state_vars))
                    .collect(),
            );

            // Next frame's state nets are this frame's D nets.
            state_vars = c
                .flipflops()
                .iter()
                .map(|ff| resolve(&ff.input, &gate_vars, &frame_inputs, &state_vars))
                .collect();

            inputs_per_frame.push(frame_inputs);
        }

        UnrolledCircuit {
            base: c.clone(),
            frames,
            key_frame_count: kappa,
            sources,
            labels,
            inputs_per_frame,
            outputs_per_frame,
        }
    }

    pub fn base(&self) -> &Circuit {
        &self.base
    }

    /// Total frame count, `kappa + b`.
    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn key_frame_count(&self) -> usize {
        self.key_frame_count
    }

    /// Functional depth `b`.
    pub fn functional_frames(&self) -> usize {
        self.frames - self.key_frame_count
    }

    pub fn var_count(&self) -> usize {
        self.sources.len()
    }

    pub fn inputs_per_frame(&self) -> &[Vec<UVar>] {
        &self.inputs_per_frame
    }

    pub fn outputs_per_frame(&self) -> &[Vec<UVar>] {
        &self.outputs_per_frame
    }

    /// Input variables of key frames `1..=kappa`, flattened in time order.
    pub fn key_input_vars(&self) -> Vec<UVar> {
        self.inputs_per_frame[..self.key_frame_count]
            .iter()
            .flatten()
            .copied()
            .collect()
    }

    /// Input variables of the functional frames, flattened in time order.
    pub fn functional_input_vars(&self) -> Vec<UVar> {
        self.inputs_per_frame[self.key_frame_count..]
            .iter()
            .flatten()
            .copied()
            .collect()
    }

    /// Output variables of the functional frames, flattened in time order.
    pub fn functional_output_vars(&self) -> Vec<UVar> {
        self.outputs_per_frame[self.key_frame_count..]
            .iter()
            .flatten()
            .copied()
            .collect()
    }

    pub fn label(&self, v: UVar) -> (&str, usize) {
        let (name, frame) = &self.labels[v];
        (name, *frame)
    }

    /// Evaluates every variable given all per-frame inputs concatenated
    /// in time order (`frames * |I|` bits).
    pub fn eval_all(&self, frame_inputs: &[bool]) -> Vec<bool> {
        let width = self.base.input_count();
        assert_eq!(frame_inputs.len(), self.frames * width, "input length");
        let mut values = vec![false; self.sources.len()];
        let mut next_input = 0usize;
        for (v, src) in self.sources.iter().enumerate() {
            values[v] = match src {
                USource::Zero => false,
                USource::Input => {
                    let b = frame_inputs[next_input];
                    next_input += 1;
                    b
                }
                USource::Gate { kind, fanin } => kind.eval(fanin.iter().map(|&f| values[f])),
            };
        }
        values
    }

    /// Evaluates the unrolled circuit and returns the per-frame outputs
    /// concatenated in time order (`frames * |O|` bits).
    pub fn eval_outputs(&self, frame_inputs: &[bool]) -> Vec<bool> {
        let values = self.eval_all(frame_inputs);
        self.outputs_per_frame
            .iter()
            .flatten()
            .map(|&v| values[v])
            .collect()
    }

    /// Tseitin encoding of the whole unrolled circuit.
    pub fn to_cnf(&self) -> CnfFormula {
        cnf::encode(self)
    }

    pub(crate) fn sources(&self) -> &[USource] {
        &self.sources
    }
}
