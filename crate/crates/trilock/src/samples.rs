//! Small benchmark circuits shipped with the toolkit.
//!
//! `S27` is the ISCAS'89 s27 netlist. The toy circuits are minimal
//! sequential designs used for exhaustive analyses: every (input, key)
//! pair of a locked toy fits in an enumerable error table.

/// ISCAS'89 s27: 4 inputs, 1 output, 3 flip-flops, 10 gates.
pub const S27: &str = "\
# name: s27
INPUT(G0)
INPUT(G1)
INPUT(G2)
INPUT(G3)
OUTPUT(G17)
G5 = DFF(G10)
G6 = DFF(G11)
G7 = DFF(G13)
G14 = NOT(G0)
G17 = NOT(G11)
G8 = AND(G14, G6)
G15 = OR(G12, G8)
G16 = OR(G3, G8)
G9 = NAND(G16, G15)
G10 = NOR(G14, G11)
G11 = NOR(G5, G9)
G12 = NOR(G1, G7)
G13 = NAND(G2, G12)
";

/// 2-input, 2-output toy with one state register.
pub const TOY2: &str = "\
# name: toy2
INPUT(a)
INPUT(b)
OUTPUT(o1)
OUTPUT(o2)
s = DFF(ns)
ns = XOR(a, s)
o1 = AND(b, s)
o2 = OR(a, ns)
";

/// 3-input, 2-output toy with two state registers.
pub const TOY3: &str = "\
# name: toy3
INPUT(a)
INPUT(b)
INPUT(c)
OUTPUT(o1)
OUTPUT(o2)
s0 = DFF(ns0)
s1 = DFF(ns1)
ns0 = XOR(a, s1)
ns1 = AND(b, s0)
t = OR(c, s0)
o1 = XOR(t, s1)
o2 = NAND(a, t)
";

/// 1-input delay line: output is the previous cycle's input.
pub const DELAY1: &str = "\
# name: delay1
INPUT(a)
OUTPUT(o)
q = DFF(a)
o = BUF(q)
";
