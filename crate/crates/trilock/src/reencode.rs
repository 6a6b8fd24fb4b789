//! Register connection graph analysis and state re-encoding.
//!
//! The register connection graph (RCG) has one node per flip-flop and a
//! directed edge wherever a purely combinational path leads from one
//! register's output to another's input. Strongly connected components
//! are classified by the provenance of their members: O (original
//! only), E (locking-inserted only), or M (mixed).
//!
//! Re-encoding greedily picks pairs of registers from the largest
//! O-SCC and E-SCC, replaces each pair with four arithmetic-encoded
//! registers (sum/carry and difference/sign), and reconstructs the
//! original next-state values in a decoder. Every decoder output
//! depends on all four encoded registers and every encoded register on
//! both replaced next-state nets, so the two source components merge
//! into one mixed SCC while the circuit's behavior is unchanged.

use std::collections::{BTreeMap, HashSet};

use serde::Serialize;
use thiserror::Error;

use crate::netlist::builder::NetBuilder;
use crate::netlist::{Circuit, FlipFlop, GateKind, NetDriver, RegisterTag};

use crate::lock::LockedCircuit;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReencodeError {
    #[error("register `{0}` not found")]
    UnknownRegister(String),
    #[error("register `{0}` is already encoded")]
    AlreadyEncoded(String),
    #[error("register `{0}` appears in two pairs")]
    DuplicateRegister(String),
    #[error("circuit invariant violated during re-encoding: {0}")]
    Circuit(#[from] crate::netlist::CircuitError),
}

/// Directed graph over registers; node indices follow flip-flop
/// declaration order.
#[derive(Clone, Debug)]
pub struct RegisterConnectionGraph {
    names: Vec<String>,
    tags: Vec<RegisterTag>,
    /// Sorted adjacency (successors) per node.
    succ: Vec<Vec<usize>>,
}

impl RegisterConnectionGraph {
    pub fn node_count(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, node: usize) -> &str {
        &self.names[node]
    }

    pub fn tag(&self, node: usize) -> RegisterTag {
        self.tags[node]
    }

    pub fn successors(&self, node: usize) -> &[usize] {
        &self.succ[node]
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.succ[from].binary_search(&to).is_ok()
    }

    /// Total degree (in + out) of a node.
    pub fn degree(&self, node: usize) -> usize {
        let out = self.succ[node].len();
        let inn = self
            .succ
            .iter()
            .filter(|adj| adj.binary_search(&node).is_ok())
            .count();
        out + inn
    }

    pub fn node_by_name(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    fn add_bidirectional(&mut self, a: usize, b: usize) {
        for (from, to) in [(a, b), (b, a)] {
            if let Err(pos) = self.succ[from].binary_search(&to) {
                self.succ[from].insert(pos, to);
            }
        }
    }
}

/// Builds the RCG by combinational forward reachability from each
/// register output.
pub fn build_rcg(c: &Circuit) -> RegisterConnectionGraph {
    let names: Vec<String> = c.flipflops().iter().map(|ff| ff.output.clone()).collect();
    let tags = c.register_tags().to_vec();

    // Net -> gates consuming it.
    let mut fanouts: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (gi, g) in c.gates().iter().enumerate() {
        for f in &g.fanin {
            fanouts.entry(f.as_str()).or_default().push(gi);
        }
    }

    let mut succ: Vec<Vec<usize>> = Vec::with_capacity(names.len());
    for ff in c.flipflops() {
        // BFS over nets reachable through combinational gates only.
        let mut reached: HashSet<&str> = HashSet::new();
        let mut queue: Vec<&str> = vec![ff.output.as_str()];
        reached.insert(ff.output.as_str());
        while let Some(net) = queue.pop() {
            if let Some(gates) = fanouts.get(net) {
                for &gi in gates {
                    let out = c.gates()[gi].output.as_str();
                    if reached.insert(out) {
                        queue.push(out);
                    }
                }
            }
        }
        let mut adj: Vec<usize> = c
            .flipflops()
            .iter()
            .enumerate()
            .filter(|(_, other)| reached.contains(other.input.as_str()))
            .map(|(i, _)| i)
            .collect();
        adj.sort_unstable();
        succ.push(adj);
    }

    RegisterConnectionGraph { names, tags, succ }
}

/// SCC class by member provenance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SccClass {
    Original,
    Extra,
    Mixed,
}

#[derive(Clone, Debug)]
pub struct SccPartition {
    /// Each SCC as a sorted list of node indices.
    pub sccs: Vec<Vec<usize>>,
    pub classes: Vec<SccClass>,
}

impl SccPartition {
    pub fn count_of(&self, class: SccClass) -> usize {
        self.classes.iter().filter(|&&c| c == class).count()
    }

    /// Indices of SCCs with the given class.
    fn of_class(&self, class: SccClass) -> Vec<usize> {
        (0..self.sccs.len())
            .filter(|&i| self.classes[i] == class)
            .collect()
    }
}

/// Iterative Tarjan over the RCG; SCCs are maximal and classified by
/// the register tags of their members.
pub fn run_scc(g: &RegisterConnectionGraph) -> SccPartition {
    let n = g.node_count();
    const UNVISITED: usize = usize::MAX;
    let mut index = vec![UNVISITED; n];
    let mut lowlink = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut next_index = 0usize;
    let mut sccs: Vec<Vec<usize>> = Vec::new();

    // Explicit DFS frames: (node, next successor position).
    let mut frames: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if index[root] != UNVISITED {
            continue;
        }
        frames.push((root, 0));
        index[root] = next_index;
        lowlink[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut pos)) = frames.last_mut() {
            if *pos < g.successors(v).len() {
                let w = g.successors(v)[*pos];
                *pos += 1;
                if index[w] == UNVISITED {
                    index[w] = next_index;
                    lowlink[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    frames.push((w, 0));
                } else if on_stack[w] {
                    lowlink[v] = lowlink[v].min(index[w]);
                }
            } else {
                frames.pop();
                if let Some(&mut (parent, _)) = frames.last_mut() {
                    lowlink[parent] = lowlink[parent].min(lowlink[v]);
                }
                if lowlink[v] == index[v] {
                    let mut scc = Vec::new();
                    loop {
                        let w = stack.pop().expect("root on stack");
                        on_stack[w] = false;
                        scc.push(w);
                        if w == v {
                            break;
                        }
                    }
                    scc.sort_unstable();
                    sccs.push(scc);
                }
            }
        }
    }

    let classes = sccs
        .iter()
        .map(|scc| {
            let mut any_original = false;
            let mut any_extra = false;
            for &node in scc {
                if g.tag(node).is_lock_inserted() {
                    any_extra = true;
                } else {
                    any_original = true;
                }
            }
            match (any_original, any_extra) {
                (true, false) => SccClass::Original,
                (false, true) => SccClass::Extra,
                _ => SccClass::Mixed,
            }
        })
        .collect();

    SccPartition { sccs, classes }
}

/// An ordered list of register pairs to re-encode; at most `budget`
/// pairs and no register in two pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReencodePlan {
    pub pairs: Vec<(String, String)>,
    pub budget: usize,
}

impl ReencodePlan {
    /// Line-oriented rendering: one `r1 r2` pair per line.
    pub fn to_pair_list(&self) -> String {
        self.pairs
            .iter()
            .map(|(a, b)| format!("{a} {b}\n"))
            .collect()
    }

    pub fn parse_pair_list(text: &str, budget: usize) -> Option<Self> {
        let mut pairs = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.split_whitespace();
            let a = it.next()?;
            let b = it.next()?;
            if it.next().is_some() {
                return None;
            }
            pairs.push((a.to_string(), b.to_string()));
        }
        Some(ReencodePlan { pairs, budget })
    }
}

/// Largest SCC among `candidates`: most nodes, ties broken by the
/// smallest lexicographic member name.
fn largest_scc(
    g: &RegisterConnectionGraph,
    partition: &SccPartition,
    candidates: &[usize],
) -> Option<usize> {
    candidates.iter().copied().min_by(|&a, &b| {
        let (sa, sb) = (&partition.sccs[a], &partition.sccs[b]);
        sb.len().cmp(&sa.len()).then_with(|| {
            let na = sa.iter().map(|&n| g.name(n)).min().expect("non-empty");
            let nb = sb.iter().map(|&n| g.name(n)).min().expect("non-empty");
            na.cmp(nb)
        })
    })
}

/// Picks the pair of nodes, one from each SCC, connected by the most
/// direct RCG edges (0-2); ties prefer the larger total degree, then
/// name order. Nodes in `taken` are excluded.
/// Ranking key: direct edge count, total degree, then name order.
type PairRank = (usize, usize, String, String);

fn max_edge_pair(
    g: &RegisterConnectionGraph,
    scc1: &[usize],
    scc2: &[usize],
    taken: &HashSet<usize>,
) -> Option<(usize, usize)> {
    let mut best: Option<((usize, usize), PairRank)> = None;
    for &a in scc1 {
        if taken.contains(&a) {
            continue;
        }
        for &b in scc2 {
            if taken.contains(&b) || a == b {
                continue;
            }
            let edges = usize::from(g.has_edge(a, b)) + usize::from(g.has_edge(b, a));
            let degree = g.degree(a) + g.degree(b);
            let key = (edges, degree, g.name(a).to_string(), g.name(b).to_string());
            let better = match &best {
                None => true,
                Some((_, cur)) => {
                    (key.0, key.1).cmp(&(cur.0, cur.1)).is_gt()
                        || ((key.0, key.1) == (cur.0, cur.1)
                            && (key.2.as_str(), key.3.as_str()) < (cur.2.as_str(), cur.3.as_str()))
                }
            };
            if better {
                best = Some(((a, b), key));
            }
        }
    }
    best.map(|(pair, _)| pair)
}

/// Greedy register-pair selection.
///
/// While original-only and locking-only SCCs remain and the budget
/// allows, pair the largest O-SCC with the largest E-SCC; once one
/// class runs out, pair the survivor's largest SCC with the largest
/// mixed SCC. After each pick the graph is updated with a bidirectional
/// edge, modeling the post-re-encoding merge, and SCCs are recomputed.
pub fn select_pairs(locked: &LockedCircuit, budget: usize) -> ReencodePlan {
    select_pairs_on(&locked.circuit, budget)
}

/// As [`select_pairs`], for any circuit with register tags.
pub fn select_pairs_on(c: &Circuit, budget: usize) -> ReencodePlan {
    let mut g = build_rcg(c);
    let mut pairs = Vec::new();
    let mut taken: HashSet<usize> = HashSet::new();
    while pairs.len() < budget {
        let partition = run_scc(&g);
        let originals = partition.of_class(SccClass::Original);
        let extras = partition.of_class(SccClass::Extra);
        let mixed = partition.of_class(SccClass::Mixed);
        if originals.is_empty() && extras.is_empty() {
            break;
        }
        let (scc_o, scc_e) = if !originals.is_empty() && !extras.is_empty() {
            (
                largest_scc(&g, &partition, &originals).expect("non-empty"),
                largest_scc(&g, &partition, &extras).expect("non-empty"),
            )
        } else if extras.is_empty() {
            let Some(m) = largest_scc(&g, &partition, &mixed) else {
                break;
            };
            (
                largest_scc(&g, &partition, &originals).expect("non-empty"),
                m,
            )
        } else {
            let Some(m) = largest_scc(&g, &partition, &mixed) else {
                break;
            };
            (m, largest_scc(&g, &partition, &extras).expect("non-empty"))
        };
        let Some((r1, r2)) =
            max_edge_pair(&g, &partition.sccs[scc_o], &partition.sccs[scc_e], &taken)
        else {
            break;
        };
        taken.insert(r1);
        taken.insert(r2);
        pairs.push((g.name(r1).to_string(), g.name(r2).to_string()));
        g.add_bidirectional(r1, r2);
    }
    ReencodePlan { pairs, budget }
}

/// Replaces each planned register pair with four arithmetic-encoded
/// registers plus encoder/decoder logic. Behavior is preserved: the
/// decoder reconstructs both original next-state values, and all
/// encoded registers reset to 0, which decodes to the all-zero state.
pub fn insert_encoder_decoder(
    locked: &LockedCircuit,
    plan: &ReencodePlan,
) -> Result<LockedCircuit, ReencodeError> {
    let mut circuit = locked.circuit.clone();
    let mut seen: HashSet<String> = HashSet::new();
    for (r1, r2) in &plan.pairs {
        for r in [r1, r2] {
            if !seen.insert(r.clone()) {
                return Err(ReencodeError::DuplicateRegister(r.clone()));
            }
        }
        circuit = encode_pair(&circuit, r1, r2)?;
    }
    Ok(LockedCircuit {
        circuit,
        config: locked.config.clone(),
        flag_nets: locked.flag_nets.clone(),
    })
}

fn encode_pair(c: &Circuit, r1: &str, r2: &str) -> Result<Circuit, ReencodeError> {
    let find = |name: &str| -> Result<usize, ReencodeError> {
        match c.driver(name) {
            Some(NetDriver::FlipFlopOutput(i)) => {
                if c.register_tag(i) == RegisterTag::Encoded {
                    Err(ReencodeError::AlreadyEncoded(name.to_string()))
                } else {
                    Ok(i)
                }
            }
            _ => Err(ReencodeError::UnknownRegister(name.to_string())),
        }
    };
    let i1 = find(r1)?;
    let i2 = find(r2)?;
    debug_assert_ne!(i1, i2);
    let s1 = c.flipflops()[i1].input.clone();
    let s2 = c.flipflops()[i2].input.clone();

    let mut b = NetBuilder::new(c);

    // Encoder: e1 = s1 + s2 as (carry, sum), e2 = s1 - s2 as
    // (sign, difference) in two's complement. The difference bit equals
    // the sum bit, so one XOR feeds both registers.
    let sum = b.xor2(&s1, &s2, "enc_sum");
    let carry = b.and(vec![s1.clone(), s2.clone()], "enc_carry");
    let ns1 = b.not(&s1);
    let sign = b.and(vec![ns1, s2.clone()], "enc_sign");
    let e1_0 = b.fresh("re_a0");
    let e1_1 = b.fresh("re_a1");
    let e2_0 = b.fresh("re_b0");
    let e2_1 = b.fresh("re_b1");

    // Decoder: s1' = bit 1 of (e1 + e2 mod 4), s2' = bit 1 of
    // (e1 - e2 mod 4); both take over the replaced output nets, so all
    // former fanouts reconnect unchanged.
    let add_carry = b.and(vec![e1_0.clone(), e2_0.clone()], "dec_c");
    b.emit_named(
        r1.to_string(),
        GateKind::Xor,
        vec![e1_1.clone(), e2_1.clone(), add_carry],
    );
    let nb0 = b.not(&e1_0);
    let borrow = b.and(vec![nb0, e2_0.clone()], "dec_b");
    b.emit_named(
        r2.to_string(),
        GateKind::Xor,
        vec![e1_1.clone(), e2_1.clone(), borrow],
    );

    let mut flipflops = Vec::with_capacity(c.ff_count() + 2);
    let mut tags = Vec::with_capacity(c.ff_count() + 2);
    for (i, ff) in c.flipflops().iter().enumerate() {
        if i == i1 || i == i2 {
            continue;
        }
        flipflops.push(ff.clone());
        tags.push(c.register_tag(i));
    }
    for (q, d) in [
        (e1_0, sum.clone()),
        (e1_1, carry),
        (e2_0, sum),
        (e2_1, sign),
    ] {
        flipflops.push(FlipFlop {
            output: q,
            input: d,
        });
        tags.push(RegisterTag::Encoded);
    }

    let mut gates = c.gates().to_vec();
    gates.extend(b.gates);

    Ok(Circuit::new(
        c.name().to_string(),
        c.inputs().to_vec(),
        c.outputs().to_vec(),
        gates,
        flipflops,
        tags,
    )?)
}

/// SCC-level removal-resilience metrics.
#[derive(Clone, Debug, Serialize)]
pub struct SccReport {
    #[serde(rename = "O")]
    pub o: usize,
    #[serde(rename = "E")]
    pub e: usize,
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "P_M")]
    pub p_m: f64,
    pub scc_sizes: Vec<usize>,
}

/// Counts O-/E-/M-SCCs and the percentage of registers inside mixed
/// SCCs.
pub fn scc_metrics(c: &Circuit) -> SccReport {
    let g = build_rcg(c);
    let partition = run_scc(&g);
    let total: usize = c.ff_count();
    let in_mixed: usize = partition
        .sccs
        .iter()
        .zip(&partition.classes)
        .filter(|(_, &cls)| cls == SccClass::Mixed)
        .map(|(scc, _)| scc.len())
        .sum();
    let mut scc_sizes: Vec<usize> = partition.sccs.iter().map(|s| s.len()).collect();
    scc_sizes.sort_unstable_by(|a, b| b.cmp(a));
    SccReport {
        o: partition.count_of(SccClass::Original),
        e: partition.count_of(SccClass::Extra),
        m: partition.count_of(SccClass::Mixed),
        p_m: if total == 0 {
            0.0
        } else {
            100.0 * in_mixed as f64 / total as f64
        },
        scc_sizes,
    }
}
