//! Sequential logic locking toolkit.
//!
//! The crate covers the full pipeline around a key-sequence locking
//! scheme with a tunable error generator:
//!
//! - [`netlist`]: `.bench` parsing/serialization and cycle-accurate
//!   simulation of gate-level sequential circuits.
//! - [`unroll`]: depth-`b` combinational unrolling and Tseitin CNF
//!   encoding (DIMACS export).
//! - [`lock`]: the locking transformation — key-capture FSM, error
//!   generator, and output/state error handlers — plus closed-form
//!   error predictors.
//! - [`reencode`]: register connection graph, SCC analysis, greedy
//!   register-pair selection, and encoder/decoder insertion that merges
//!   original and locking registers into mixed SCCs.
//! - [`attack`]: oracle-guided SAT key recovery over unrolled circuits,
//!   key verification by product-machine reachability, and resilience
//!   prediction.
//! - [`eval`]: exhaustive error tables, Monte-Carlo functional
//!   corruptibility, closed-form FC prediction, and structural overhead
//!   proxies.
//! - [`sat`]: an embedded CDCL solver and an external DIMACS backend.
//! - [`cli`]: the `trilock` command-line front end.

pub mod attack;
pub mod bits;
pub mod cli;
pub mod eval;
pub mod lock;
pub mod netlist;
pub mod reencode;
pub mod samples;
pub mod sat;
pub mod unroll;

pub use bits::BitSequence;
pub use netlist::{parse_bench, write_bench, Circuit};
