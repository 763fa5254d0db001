//! Flat problem text.
//!
//! ```text
//! # comment (also after any line)
//! states <n> inputs <m>
//! <x> <u> <y1> [<y2> ...] : <cost>     one line per hyperarc
//! terminal <x> <value>                 states without a line get +inf
//! ```
//!
//! Indices are 0-based. Costs accept `inf`; `-inf` and NaN are rejected.
//! Several lines for the same `(x, u)` add heads. Every `(x, u)` pair needs at
//! least one head.

use std::io::Write;

use crate::hypergraph::{DiscreteProblem, ProblemBuilder};
use crate::scalar::{format_cost, parse_cost, Scalar};

use super::{syntax, FormatError};

fn strip(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

fn index(tok: &str, line: usize, what: &str) -> Result<usize, FormatError> {
    tok.parse().map_err(|_| syntax(line, format!("bad {what} `{tok}`")))
}

/// Parses the flat format into a builder; strictness is checked by
/// [`ProblemBuilder::build`].
pub fn parse_problem<T: Scalar>(text: &str) -> Result<ProblemBuilder<T>, FormatError> {
    let mut builder: Option<ProblemBuilder<T>> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let s = strip(raw);
        if s.is_empty() {
            continue;
        }
        let toks: Vec<&str> = s.split_whitespace().collect();
        let Some(b) = builder.as_mut() else {
            match toks.as_slice() {
                ["states", n, "inputs", m] => {
                    builder = Some(ProblemBuilder::new(index(n, line, "state count")?, index(m, line, "input count")?));
                    continue;
                }
                _ => return Err(syntax(line, "expected header `states <n> inputs <m>`")),
            }
        };
        if toks[0] == "terminal" {
            let [_, x, v] = toks.as_slice() else {
                return Err(syntax(line, "expected `terminal <x> <value>`"));
            };
            let v = parse_cost::<T>(v).ok_or_else(|| syntax(line, format!("bad terminal value `{v}`")))?;
            b.terminal(index(x, line, "state")?, v).map_err(|e| syntax(line, e.to_string()))?;
            continue;
        }
        let (lhs, cost) = s.split_once(':').ok_or_else(|| syntax(line, "missing `: <cost>`"))?;
        let cost = parse_cost::<T>(cost).ok_or_else(|| syntax(line, format!("bad cost `{}`", cost.trim())))?;
        let ids = lhs
            .split_whitespace()
            .map(|t| index(t, line, "index"))
            .collect::<Result<Vec<_>, _>>()?;
        if ids.len() < 2 {
            return Err(syntax(line, "expected `<x> <u> <y1> ... : <cost>`"));
        }
        b.arc(ids[0], ids[1], &ids[2..], cost).map_err(|e| syntax(line, e.to_string()))?;
    }
    builder.ok_or_else(|| syntax(0, "empty problem file"))
}

/// Parses and builds.
pub fn read_problem<T: Scalar>(text: &str) -> Result<DiscreteProblem<T>, FormatError> {
    Ok(parse_problem(text)?.build()?)
}

/// Writes one line per `(x, u, cost)` group, then the finite terminal costs.
pub fn write_problem<T: Scalar, W: Write>(problem: &DiscreteProblem<T>, mut out: W) -> std::io::Result<()> {
    writeln!(out, "states {} inputs {}", problem.n_states(), problem.n_inputs())?;
    let mut groups: Vec<(T, Vec<u32>)> = Vec::new();
    for (x, u, heads, costs) in problem.rows() {
        groups.clear();
        for (&y, &g) in heads.iter().zip(costs) {
            match groups.iter_mut().find(|(c, _)| *c == g) {
                Some((_, ys)) => ys.push(y),
                None => groups.push((g, vec![y])),
            }
        }
        for (g, ys) in &groups {
            write!(out, "{x} {u}")?;
            for y in ys {
                write!(out, " {y}")?;
            }
            writeln!(out, " : {}", format_cost(*g))?;
        }
    }
    for (x, &v) in problem.terminal_costs().iter().enumerate() {
        if v != T::infinity() {
            writeln!(out, "terminal {x} {}", format_cost(v))?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOY: &str = "# two states\nstates 2 inputs 1\n0 0 1 : 1.5\n1 0 1 : inf # absorbing\nterminal 1 0\n";

    #[test]
    fn parses_and_round_trips() {
        let p = read_problem::<f64>(TOY).unwrap();
        assert_eq!(p.image(0, 0), (&[1u32][..], &[1.5][..]));
        assert_eq!(p.terminal_costs(), &[f64::INFINITY, 0.0]);
        let mut buf = Vec::new();
        write_problem(&p, &mut buf).unwrap();
        let q = read_problem::<f64>(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(format!("{p:?}"), format!("{q:?}"));
    }

    #[test]
    fn errors_name_the_line() {
        let e = read_problem::<f64>("states 2 inputs 1\n0 0 1 : -inf\n").unwrap_err();
        assert!(e.to_string().starts_with("line 2"), "{e}");
        let e = read_problem::<f64>("states 2 inputs 1\n0 0 5 : 1\n").unwrap_err();
        assert!(e.to_string().contains("line 2"), "{e}");
        assert!(read_problem::<f64>("0 0 1 : 1\n").is_err());
    }

    #[test]
    fn missing_image_is_a_strictness_error() {
        let e = read_problem::<f64>("states 2 inputs 1\n0 0 1 : 1\n1 0 : 2\n").unwrap_err();
        assert!(matches!(e, FormatError::Problem(crate::hypergraph::ProblemError::EmptyImage { state: 1, input: 0 })));
    }
}
