//! SAT solving backends.
//!
//! The embedded CDCL solver handles desk-scale instances and supports
//! incremental clause addition, which the attack loop relies on. The
//! external backend shells out to any DIMACS-conformant solver that
//! prints SAT-competition style `s`/`v` lines.

mod cdcl;

pub use cdcl::{Budget, CdclSolver, SolveOutcome};

use std::io::Write;
use std::process::Command;
use std::time::Duration;

use thiserror::Error;

use crate::unroll::CnfFormula;

/// Conflict and wall-clock budgets for one solver call.
#[derive(Clone, Copy, Debug, Default)]
pub struct SolverLimits {
    pub max_conflicts: Option<u64>,
    pub timeout: Option<Duration>,
}

impl SolverLimits {
    fn budget(&self) -> Budget {
        Budget {
            max_conflicts: self.max_conflicts,
            timeout: self.timeout,
        }
    }
}

/// Which solver executes the queries.
#[derive(Clone, Debug)]
pub enum SatBackend {
    Embedded {
        limits: SolverLimits,
    },
    /// Runs `command <cnf-file>` and parses `s SATISFIABLE` /
    /// `s UNSATISFIABLE` plus `v` model lines from stdout.
    ExternalDimacs {
        command: String,
        limits: SolverLimits,
    },
}

impl Default for SatBackend {
    fn default() -> Self {
        SatBackend::Embedded {
            limits: SolverLimits::default(),
        }
    }
}

impl SatBackend {
    pub fn limits(&self) -> SolverLimits {
        match self {
            SatBackend::Embedded { limits } => *limits,
            SatBackend::ExternalDimacs { limits, .. } => *limits,
        }
    }
}

#[derive(Debug, Error)]
pub enum SatError {
    #[error("failed to run external solver `{command}`: {source}")]
    Spawn {
        command: String,
        source: std::io::Error,
    },
    #[error("external solver produced unparseable output: {0}")]
    BadOutput(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// A live incremental SAT session: clauses accumulate across `solve`
/// calls. The external backend replays the full formula per call.
pub enum SatSession {
    Embedded {
        solver: CdclSolver,
        limits: SolverLimits,
        queries: u64,
    },
    External {
        command: String,
        limits: SolverLimits,
        var_count: usize,
        clauses: Vec<Vec<i32>>,
        queries: u64,
    },
}

impl SatSession {
    pub fn new(backend: &SatBackend) -> Self {
        match backend {
            SatBackend::Embedded { limits } => SatSession::Embedded {
                solver: CdclSolver::new(),
                limits: *limits,
                queries: 0,
            },
            SatBackend::ExternalDimacs { command, limits } => SatSession::External {
                command: command.clone(),
                limits: *limits,
                var_count: 0,
                clauses: Vec::new(),
                queries: 0,
            },
        }
    }

    pub fn ensure_vars(&mut self, n: usize) {
        match self {
            SatSession::Embedded { solver, .. } => solver.ensure_vars(n),
            SatSession::External { var_count, .. } => *var_count = (*var_count).max(n),
        }
    }

    pub fn add_clause(&mut self, lits: &[i32]) {
        match self {
            SatSession::Embedded { solver, .. } => solver.add_clause(lits),
            SatSession::External {
                var_count, clauses, ..
            } => {
                for &l in lits {
                    *var_count = (*var_count).max(l.unsigned_abs() as usize);
                }
                clauses.push(lits.to_vec());
            }
        }
    }

    pub fn queries(&self) -> u64 {
        match self {
            SatSession::Embedded { queries, .. } => *queries,
            SatSession::External { queries, .. } => *queries,
        }
    }

    pub fn solve(&mut self) -> Result<SolveOutcome, SatError> {
        match self {
            SatSession::Embedded {
                solver,
                limits,
                queries,
            } => {
                *queries += 1;
                Ok(solver.solve(limits.budget()))
            }
            SatSession::External {
                command,
                limits,
                var_count,
                clauses,
                queries,
            } => {
                *queries += 1;
                let mut text = format!("p cnf {} {}\n", var_count, clauses.len());
                for c in clauses.iter() {
                    for l in c {
                        text.push_str(&l.to_string());
                        text.push(' ');
                    }
                    text.push_str("0\n");
                }
                run_external(command, &text, *var_count, *limits)
            }
        }
    }
}

/// One-shot solve of a formula built by the unroller.
pub fn solve_formula(backend: &SatBackend, cnf: &CnfFormula) -> Result<SolveOutcome, SatError> {
    let mut session = SatSession::new(backend);
    session.ensure_vars(cnf.variable_count());
    for clause in cnf.clauses() {
        session.add_clause(clause);
    }
    session.solve()
}

// Budgets are not forwarded: there is no portable flag convention
// across DIMACS solvers, so external runs go unbudgeted.
fn run_external(
    command: &str,
    dimacs: &str,
    var_count: usize,
    _limits: SolverLimits,
) -> Result<SolveOutcome, SatError> {
    let dir = std::env::temp_dir();
    let path = dir.join(format!(
        "trilock-{}-{}.cnf",
        std::process::id(),
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_nanos())
            .unwrap_or(0)
    ));
    {
        let mut f = std::fs::File::create(&path)?;
        f.write_all(dimacs.as_bytes())?;
    }
    let mut parts = command.split_whitespace();
    let program = parts.next().unwrap_or(command);
    let output = Command::new(program)
        .args(parts)
        .arg(&path)
        .output()
        .map_err(|source| SatError::Spawn {
            command: command.to_string(),
            source,
        });
    let _ = std::fs::remove_file(&path);
    let output = output?;
    let stdout = String::from_utf8_lossy(&output.stdout);
    parse_solver_output(&stdout, var_count)
}

/// Parses SAT-competition output: an `s` status line and `v` model lines.
fn parse_solver_output(stdout: &str, var_count: usize) -> Result<SolveOutcome, SatError> {
    let mut status: Option<&str> = None;
    let mut model = vec![false; var_count];
    let mut saw_model = false;
    for line in stdout.lines() {
        let line = line.trim();
        if let Some(rest) = line.strip_prefix("s ") {
            status = Some(rest.trim());
        } else if let Some(rest) = line.strip_prefix("v ") {
            saw_model = true;
            for tok in rest.split_whitespace() {
                let l: i64 = tok
                    .parse()
                    .map_err(|_| SatError::BadOutput(format!("bad literal `{tok}`")))?;
                if l == 0 {
                    continue;
                }
                let v = l.unsigned_abs() as usize - 1;
                if v < var_count {
                    model[v] = l > 0;
                }
            }
        }
    }
    match status {
        Some("SATISFIABLE") => {
            if !saw_model {
                return Err(SatError::BadOutput(
                    "SATISFIABLE without a v model line".to_string(),
                ));
            }
            Ok(SolveOutcome::Sat(model))
        }
        Some("UNSATISFIABLE") => Ok(SolveOutcome::Unsat),
        Some("UNKNOWN") | Some("INDETERMINATE") => Ok(SolveOutcome::Unknown),
        other => Err(SatError::BadOutput(format!(
            "missing or unrecognized status line: {other:?}"
        ))),
    }
}
