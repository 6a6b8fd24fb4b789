//! Incremental gate-network construction with unique net naming.

use std::collections::HashSet;

use super::{Circuit, Gate, GateKind};

/// Allocates fresh `lk_`-prefixed net names against an existing circuit
/// and accumulates gates.
pub(crate) struct NetBuilder {
    used: HashSet<String>,
    pub(crate) gates: Vec<Gate>,
    counter: usize,
}

impl NetBuilder {
    pub(crate) fn new(c: &Circuit) -> Self {
        let mut used = HashSet::new();
        used.extend(c.inputs().iter().cloned());
        used.extend(c.gates().iter().map(|g| g.output.clone()));
        used.extend(c.flipflops().iter().map(|ff| ff.output.clone()));
        NetBuilder {
            used,
            gates: Vec::new(),
            counter: 0,
        }
    }

    pub(crate) fn fresh(&mut self, hint: &str) -> String {
        let base = format!("lk_{hint}");
        if self.used.insert(base.clone()) {
            return base;
        }
        loop {
            self.counter += 1;
            let name = format!("{base}_{}", self.counter);
            if self.used.insert(name.clone()) {
                return name;
            }
        }
    }

    pub(crate) fn emit(&mut self, kind: GateKind, fanin: Vec<String>, hint: &str) -> String {
        let output = self.fresh(hint);
        self.gates.push(Gate {
            output: output.clone(),
            kind,
            fanin,
        });
        output
    }

    /// Emits a gate whose output takes an exact name (reusing a name
    /// the caller has just freed is allowed).
    pub(crate) fn emit_named(&mut self, output: String, kind: GateKind, fanin: Vec<String>) {
        self.used.insert(output.clone());
        self.gates.push(Gate {
            output,
            kind,
            fanin,
        });
    }

    pub(crate) fn not(&mut self, a: &str) -> String {
        self.emit(GateKind::Not, vec![a.to_string()], "n")
    }

    /// n-ary AND; a single operand passes through without a gate.
    pub(crate) fn and(&mut self, xs: Vec<String>, hint: &str) -> String {
        assert!(!xs.is_empty());
        if xs.len() == 1 {
            return xs.into_iter().next().expect("one element");
        }
        self.emit(GateKind::And, xs, hint)
    }

    pub(crate) fn or(&mut self, xs: Vec<String>, hint: &str) -> String {
        assert!(!xs.is_empty());
        if xs.len() == 1 {
            return xs.into_iter().next().expect("one element");
        }
        self.emit(GateKind::Or, xs, hint)
    }

    pub(crate) fn xor2(&mut self, a: &str, b: &str, hint: &str) -> String {
        self.emit(GateKind::Xor, vec![a.to_string(), b.to_string()], hint)
    }

    pub(crate) fn xnor2(&mut self, a: &str, b: &str, hint: &str) -> String {
        self.emit(GateKind::Xnor, vec![a.to_string(), b.to_string()], hint)
    }

    /// `sel ? a : b`.
    pub(crate) fn mux(&mut self, sel: &str, a: &str, b: &str, hint: &str) -> String {
        let nsel = self.not(sel);
        let ta = self.and(vec![sel.to_string(), a.to_string()], "mt");
        let tb = self.and(vec![nsel, b.to_string()], "mf");
        self.or(vec![ta, tb], hint)
    }

    /// Literal equal to `bit` when `value` is 1, else its inversion.
    fn const_literal(&mut self, bit: &str, value: bool) -> String {
        if value {
            bit.to_string()
        } else {
            self.not(bit)
        }
    }

    /// `bits == value`, bits given most significant first.
    pub(crate) fn eq_const(&mut self, bits_msb: &[String], value: &[bool], hint: &str) -> String {
        debug_assert_eq!(bits_msb.len(), value.len());
        let lits: Vec<String> = bits_msb
            .iter()
            .zip(value)
            .map(|(b, &v)| {
                let b = b.clone();
                self.const_literal(&b, v)
            })
            .collect();
        self.and(lits, hint)
    }

    /// `unsigned(bits) < value`; `None` means constant false.
    pub(crate) fn lt_const(
        &mut self,
        bits_msb: &[String],
        value: &[bool],
        hint: &str,
    ) -> Option<String> {
        let mut terms = Vec::new();
        let mut prefix_eq: Vec<String> = Vec::new();
        for (b, &v) in bits_msb.iter().zip(value) {
            if v {
                let mut t = prefix_eq.clone();
                t.push(self.not(b));
                terms.push(self.and(t, "ltt"));
            }
            let eq_lit = self.const_literal(b, v);
            prefix_eq.push(eq_lit);
        }
        if terms.is_empty() {
            None
        } else {
            Some(self.or(terms, hint))
        }
    }

    /// `unsigned(bits) > value`; `None` means constant false.
    pub(crate) fn gt_const(
        &mut self,
        bits_msb: &[String],
        value: &[bool],
        hint: &str,
    ) -> Option<String> {
        let mut terms = Vec::new();
        let mut prefix_eq: Vec<String> = Vec::new();
        for (b, &v) in bits_msb.iter().zip(value) {
            if !v {
                let mut t = prefix_eq.clone();
                t.push(b.clone());
                terms.push(self.and(t, "gtt"));
            }
            let eq_lit = self.const_literal(b, v);
            prefix_eq.push(eq_lit);
        }
        if terms.is_empty() {
            None
        } else {
            Some(self.or(terms, hint))
        }
    }

    /// Bitwise equality of two net vectors.
    pub(crate) fn eq_nets(&mut self, a: &[String], b: &[String], hint: &str) -> String {
        debug_assert_eq!(a.len(), b.len());
        let eqs: Vec<String> = a
            .iter()
            .zip(b)
            .map(|(x, y)| self.xnor2(x, y, "beq"))
            .collect();
        self.and(eqs, hint)
    }
}
