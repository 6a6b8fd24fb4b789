//! Tseitin encoding of unrolled circuits and DIMACS export.
//!
//! Standard per-gate clauses, no structural hashing: variable numbering
//! follows the unrolled evaluation order, so attack traces are
//! reproducible. DIMACS variable `v + 1` corresponds to unrolled
//! variable `v`.

use std::io::{self, Write};

use crate::netlist::GateKind;

use super::{USource, UnrolledCircuit};

/// DIMACS-style literal: positive/negative 1-based variable index.
pub type Lit = i32;

/// Where a CNF variable came from, for the DIMACS comment block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VarOrigin {
    ConstZero,
    Net {
        name: String,
        frame: usize,
    },
    /// Auxiliary variable introduced for an n-ary XOR/XNOR chain.
    Aux,
}

#[derive(Clone, Debug, Default)]
pub struct CnfFormula {
    variable_count: usize,
    clauses: Vec<Vec<Lit>>,
    origins: Vec<VarOrigin>,
}

impl CnfFormula {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn variable_count(&self) -> usize {
        self.variable_count
    }

    pub fn clauses(&self) -> &[Vec<Lit>] {
        &self.clauses
    }

    pub fn origins(&self) -> &[VarOrigin] {
        &self.origins
    }

    pub fn fresh_var(&mut self, origin: VarOrigin) -> Lit {
        self.variable_count += 1;
        self.origins.push(origin);
        self.variable_count as Lit
    }

    pub fn add_clause(&mut self, lits: impl Into<Vec<Lit>>) {
        let lits = lits.into();
        debug_assert!(!lits.is_empty(), "empty clause");
        debug_assert!(lits
            .iter()
            .all(|&l| l != 0 && l.unsigned_abs() as usize <= self.variable_count));
        self.clauses.push(lits);
    }

    /// `p cnf V C` followed by zero-terminated clauses, preceded by a
    /// comment block mapping variables to `(net, frame)`.
    pub fn write_dimacs<W: Write>(&self, w: &mut W) -> io::Result<()> {
        for (i, origin) in self.origins.iter().enumerate() {
            match origin {
                VarOrigin::ConstZero => writeln!(w, "c var {} = const0", i + 1)?,
                VarOrigin::Net { name, frame } => {
                    writeln!(w, "c var {} = {}@{}", i + 1, name, frame)?
                }
                VarOrigin::Aux => writeln!(w, "c var {} = aux", i + 1)?,
            }
        }
        writeln!(w, "p cnf {} {}", self.variable_count, self.clauses.len())?;
        for clause in &self.clauses {
            for lit in clause {
                write!(w, "{lit} ")?;
            }
            writeln!(w, "0")?;
        }
        Ok(())
    }

    pub fn to_dimacs_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_dimacs(&mut buf).expect("in-memory write");
        String::from_utf8(buf).expect("ascii")
    }
}

/// Emits the constraint `out <-> kind(fanin...)` for one gate.
pub fn encode_gate(cnf: &mut CnfFormula, kind: GateKind, out: Lit, fanin: &[Lit]) {
    match kind {
        GateKind::And => encode_and(cnf, out, fanin),
        GateKind::Nand => encode_and(cnf, -out, fanin),
        GateKind::Or => encode_or(cnf, out, fanin),
        GateKind::Nor => encode_or(cnf, -out, fanin),
        GateKind::Buf => {
            cnf.add_clause(vec![-out, fanin[0]]);
            cnf.add_clause(vec![out, -fanin[0]]);
        }
        GateKind::Not => {
            cnf.add_clause(vec![-out, -fanin[0]]);
            cnf.add_clause(vec![out, fanin[0]]);
        }
        GateKind::Xor => encode_parity(cnf, out, fanin),
        GateKind::Xnor => encode_parity(cnf, -out, fanin),
    }
}

fn encode_and(cnf: &mut CnfFormula, out: Lit, fanin: &[Lit]) {
    let mut last = Vec::with_capacity(fanin.len() + 1);
    for &f in fanin {
        cnf.add_clause(vec![-out, f]);
        last.push(-f);
    }
    last.push(out);
    cnf.add_clause(last);
}

fn encode_or(cnf: &mut CnfFormula, out: Lit, fanin: &[Lit]) {
    let mut last = Vec::with_capacity(fanin.len() + 1);
    for &f in fanin {
        cnf.add_clause(vec![out, -f]);
        last.push(f);
    }
    last.push(-out);
    cnf.add_clause(last);
}

fn encode_xor2(cnf: &mut CnfFormula, out: Lit, a: Lit, b: Lit) {
    cnf.add_clause(vec![-out, a, b]);
    cnf.add_clause(vec![-out, -a, -b]);
    cnf.add_clause(vec![out, -a, b]);
    cnf.add_clause(vec![out, a, -b]);
}

/// `out <-> parity(fanin...)`, chaining auxiliaries for arity > 2.
fn encode_parity(cnf: &mut CnfFormula, out: Lit, fanin: &[Lit]) {
    match fanin {
        [a] => {
            cnf.add_clause(vec![-out, *a]);
            cnf.add_clause(vec![out, -*a]);
        }
        [a, b] => encode_xor2(cnf, out, *a, *b),
        _ => {
            let mut acc = fanin[0];
            for (i, &f) in fanin[1..].iter().enumerate() {
                let t = if i + 2 == fanin.len() {
                    out
                } else {
                    cnf.fresh_var(VarOrigin::Aux)
                };
                encode_xor2(cnf, t, acc, f);
                acc = t;
            }
        }
    }
}

/// Tseitin transform of the whole unrolled circuit. The first
/// `u.var_count()` CNF variables correspond 1:1 (shifted by one) to the
/// unrolled variables; XOR chains may append auxiliaries after them.
pub fn encode(u: &UnrolledCircuit) -> CnfFormula {
    let mut cnf = CnfFormula::new();
    for v in 0..u.var_count() {
        let (name, frame) = u.label(v);
        let origin = match u.sources()[v] {
            USource::Zero => VarOrigin::ConstZero,
            _ => VarOrigin::Net {
                name: name.to_string(),
                frame,
            },
        };
        cnf.fresh_var(origin);
    }
    for (v, src) in u.sources().iter().enumerate() {
        let out = (v + 1) as Lit;
        match src {
            USource::Zero => cnf.add_clause(vec![-out]),
            USource::Input => {}
            USource::Gate { kind, fanin } => {
                let lits: Vec<Lit> = fanin.iter().map(|&f| (f + 1) as Lit).collect();
                encode_gate(&mut cnf, *kind, out, &lits);
            }
        }
    }
    cnf
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::parse_bench;
    use crate::samples::S27;
    use crate::unroll::UnrolledCircuit;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Brute-force checker: every total assignment either satisfies all
    /// clauses or not.
    fn satisfies(cnf: &CnfFormula, assignment: &[bool]) -> bool {
        cnf.clauses().iter().all(|cl| {
            cl.iter().any(|&l| {
                let v = l.unsigned_abs() as usize - 1;
                if l > 0 {
                    assignment[v]
                } else {
                    !assignment[v]
                }
            })
        })
    }

    #[test]
    fn single_and_gate_uses_standard_three_clauses() {
        let c = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(o)\no = AND(a, b)").unwrap();
        let u = UnrolledCircuit::unroll(&c, 1, 0);
        let cnf = u.to_cnf();
        assert_eq!(cnf.clauses().len(), 3);
        // The unique satisfying extensions match the AND truth table.
        for a in [false, true] {
            for b in [false, true] {
                let assignment = vec![a, b, a && b];
                assert!(satisfies(&cnf, &assignment));
                let wrong = vec![a, b, !(a && b)];
                assert!(!satisfies(&cnf, &wrong));
            }
        }
    }

    #[test]
    fn xor_chain_matches_truth_table_enumeration() {
        let c = parse_bench(
            "INPUT(a)\nINPUT(b)\nINPUT(c)\nINPUT(d)\nOUTPUT(o)\n\
             x1 = XOR(a, b)\nx2 = XOR(x1, c)\nx3 = XOR(x2, d)\no = BUF(x3)",
        )
        .unwrap();
        let u = UnrolledCircuit::unroll(&c, 1, 0);
        let cnf = u.to_cnf();
        // Exhaustive 16-row check: for each input row the unique
        // satisfying assignment carries the simulated values.
        for row in 0u32..16 {
            let inputs: Vec<bool> = (0..4).map(|i| (row >> (3 - i)) & 1 == 1).collect();
            let values = u.eval_all(&inputs);
            assert!(satisfies(&cnf, &values));
            let parity = inputs.iter().fold(false, |acc, &b| acc ^ b);
            assert_eq!(values[u.functional_output_vars()[0]], parity);
        }
    }

    #[test]
    fn s27_unrolled_models_match_simulation() {
        let c = parse_bench(S27).unwrap();
        let u = UnrolledCircuit::unroll(&c, 2, 0);
        let cnf = u.to_cnf();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let inputs: Vec<bool> = (0..2 * c.input_count()).map(|_| rng.gen()).collect();
            let values = u.eval_all(&inputs);
            assert!(
                satisfies(&cnf, &values),
                "simulated values must satisfy CNF"
            );
        }
    }

    #[test]
    fn dimacs_header_and_comments() {
        let c = parse_bench("INPUT(a)\nOUTPUT(o)\no = NOT(a)").unwrap();
        let u = UnrolledCircuit::unroll(&c, 1, 0);
        let text = u.to_cnf().to_dimacs_string();
        assert!(text.contains("p cnf 2 2"));
        assert!(text.contains("c var 1 = a@1"));
        assert!(text.contains("c var 2 = o@1"));
        assert!(text.trim_end().ends_with("0"));
    }
}
