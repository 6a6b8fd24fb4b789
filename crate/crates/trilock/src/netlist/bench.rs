//! `.bench` netlist reader and writer.
//!
//! Grammar: `#` starts a comment to end of line; `INPUT(<id>)`;
//! `OUTPUT(<id>)`; `<id> = <KIND>(<id>{, <id>})`; `<id> = DFF(<id>)`;
//! identifiers match `[A-Za-z0-9_.]+`; whitespace-insensitive around
//! tokens; one statement per line. Unknown gate kinds are an error.

use std::fmt::Write as _;

use thiserror::Error;

use super::{Circuit, CircuitError, FlipFlop, Gate, GateKind};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BenchParseError {
    #[error("line {line}, column {col}: {msg}")]
    Syntax {
        line: usize,
        col: usize,
        msg: String,
    },
    #[error(transparent)]
    Invalid(#[from] CircuitError),
}

fn syntax(line: usize, col: usize, msg: impl Into<String>) -> BenchParseError {
    BenchParseError::Syntax {
        line,
        col,
        msg: msg.into(),
    }
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '.'
}

struct LineScanner<'a> {
    text: &'a str,
    line_no: usize,
    pos: usize,
}

impl<'a> LineScanner<'a> {
    fn new(text: &'a str, line_no: usize) -> Self {
        Self {
            text,
            line_no,
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn col(&self) -> usize {
        self.pos + 1
    }

    fn expect(&mut self, c: char) -> Result<(), BenchParseError> {
        self.skip_ws();
        match self.peek() {
            Some(got) if got == c => {
                self.pos += c.len_utf8();
                Ok(())
            }
            Some(got) => Err(syntax(
                self.line_no,
                self.col(),
                format!("expected `{c}`, found `{got}`"),
            )),
            None => Err(syntax(
                self.line_no,
                self.col(),
                format!("expected `{c}`, found end of line"),
            )),
        }
    }

    fn ident(&mut self) -> Result<&'a str, BenchParseError> {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.peek() {
            if is_ident_char(c) {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
        if self.pos == start {
            return Err(syntax(self.line_no, self.col(), "expected an identifier"));
        }
        Ok(&self.text[start..self.pos])
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.text.len()
    }
}

/// Parses `.bench` text into a validated [`Circuit`].
///
/// A leading `# name: <id>` comment, when present, names the circuit;
/// otherwise the name defaults to `circuit`.
pub fn parse_bench(text: &str) -> Result<Circuit, BenchParseError> {
    let mut name = String::from("circuit");
    let mut inputs = Vec::new();
    let mut outputs = Vec::new();
    let mut gates = Vec::new();
    let mut flipflops = Vec::new();

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw_line.find('#') {
            Some(h) => {
                let comment = raw_line[h + 1..].trim();
                if let Some(n) = comment.strip_prefix("name:") {
                    let n = n.trim();
                    if !n.is_empty() && n.chars().all(is_ident_char) {
                        name = n.to_string();
                    }
                }
                &raw_line[..h]
            }
            None => raw_line,
        };
        let mut sc = LineScanner::new(line, line_no);
        if sc.at_end() {
            continue;
        }
        let first = sc.ident()?;
        sc.skip_ws();
        match (first, sc.peek()) {
            ("INPUT", Some('(')) => {
                sc.expect('(')?;
                let id = sc.ident()?;
                sc.expect(')')?;
                inputs.push(id.to_string());
            }
            ("OUTPUT", Some('(')) => {
                sc.expect('(')?;
                let id = sc.ident()?;
                sc.expect(')')?;
                outputs.push(id.to_string());
            }
            (out, _) => {
                sc.expect('=')?;
                let kind_name = sc.ident()?;
                sc.expect('(')?;
                let mut fanin = vec![sc.ident()?.to_string()];
                loop {
                    sc.skip_ws();
                    match sc.peek() {
                        Some(',') => {
                            sc.expect(',')?;
                            fanin.push(sc.ident()?.to_string());
                        }
                        Some(')') => break,
                        _ => {
                            return Err(syntax(line_no, sc.col(), "expected `,` or `)`"));
                        }
                    }
                }
                sc.expect(')')?;
                if kind_name.eq_ignore_ascii_case("DFF") {
                    if fanin.len() != 1 {
                        return Err(syntax(
                            line_no,
                            sc.col(),
                            format!("DFF takes exactly one fan-in, got {}", fanin.len()),
                        ));
                    }
                    flipflops.push(FlipFlop {
                        output: out.to_string(),
                        input: fanin.pop().expect("one fan-in"),
                    });
                } else if let Some(kind) = GateKind::from_name(kind_name) {
                    gates.push(Gate {
                        output: out.to_string(),
                        kind,
                        fanin,
                    });
                } else {
                    return Err(syntax(
                        line_no,
                        sc.col(),
                        format!("unknown gate kind `{kind_name}`"),
                    ));
                }
            }
        }
        if !sc.at_end() {
            return Err(syntax(line_no, sc.col(), "trailing characters"));
        }
    }

    Ok(Circuit::new(
        name,
        inputs,
        outputs,
        gates,
        flipflops,
        vec![],
    )?)
}

/// Serializes a circuit so that `parse_bench(write_bench(c)) == c`.
pub fn write_bench(c: &Circuit) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# name: {}", c.name());
    for i in c.inputs() {
        let _ = writeln!(s, "INPUT({i})");
    }
    for o in c.outputs() {
        let _ = writeln!(s, "OUTPUT({o})");
    }
    for ff in c.flipflops() {
        let _ = writeln!(s, "{} = DFF({})", ff.output, ff.input);
    }
    for g in c.gates() {
        let _ = writeln!(s, "{} = {}({})", g.output, g.kind, g.fanin.join(", "));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::RegisterTag;
    use crate::samples::S27;

    #[test]
    fn minimal_file_parses() {
        let c = parse_bench("INPUT(a)\nOUTPUT(o)\no = NOT(a)").unwrap();
        assert_eq!(c.input_count(), 1);
        assert_eq!(c.output_count(), 1);
        assert_eq!(c.gate_count(), 1);
        assert_eq!(c.ff_count(), 0);
    }

    #[test]
    fn s27_counts_match_published_benchmark() {
        let c = parse_bench(S27).unwrap();
        assert_eq!(c.name(), "s27");
        assert_eq!(c.input_count(), 4);
        assert_eq!(c.output_count(), 1);
        assert_eq!(c.ff_count(), 3);
        assert_eq!(c.gate_count(), 10);
        assert!(c
            .register_tags()
            .iter()
            .all(|&t| t == RegisterTag::Original));
    }

    #[test]
    fn undefined_net_is_an_error() {
        let err = parse_bench("OUTPUT(o)\no = NOT(a)").unwrap_err();
        assert_eq!(
            err,
            BenchParseError::Invalid(CircuitError::UndefinedNet("a".into()))
        );
    }

    #[test]
    fn unknown_kind_fails_loud() {
        let err = parse_bench("INPUT(a)\nOUTPUT(o)\no = MAJ3(a, a, a)").unwrap_err();
        assert!(matches!(err, BenchParseError::Syntax { line: 3, .. }));
    }

    #[test]
    fn syntax_error_reports_position() {
        let err = parse_bench("INPUT(a\n").unwrap_err();
        match err {
            BenchParseError::Syntax { line, col, .. } => {
                assert_eq!(line, 1);
                assert_eq!(col, 8);
            }
            other => panic!("unexpected: {other}"),
        }
    }

    #[test]
    fn comments_and_whitespace_are_ignored() {
        let c = parse_bench("  # header\nINPUT( a )  # in\nOUTPUT(o)\n\no = BUF( a )\n").unwrap();
        assert_eq!(c.gates()[0].fanin, vec!["a".to_string()]);
    }

    #[test]
    fn round_trip_minimal() {
        let c = parse_bench("INPUT(a)\nOUTPUT(o)\no = NOT(a)").unwrap();
        let again = parse_bench(&write_bench(&c)).unwrap();
        assert_eq!(c, again);
    }

    #[test]
    fn round_trip_s27() {
        let c = parse_bench(S27).unwrap();
        let again = parse_bench(&write_bench(&c)).unwrap();
        assert_eq!(c, again);
    }

    #[test]
    fn duplicate_definition_is_reported() {
        let err = parse_bench("INPUT(a)\nINPUT(a)\nOUTPUT(a)").unwrap_err();
        assert_eq!(
            err,
            BenchParseError::Invalid(CircuitError::DuplicateNet("a".into()))
        );
    }
}
