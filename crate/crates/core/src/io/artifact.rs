//! Value and controller artifacts.
//!
//! Text values: `grid <hash>`, `states <n>`, then `<x> <value>` per state.
//! Text controller: `grid <hash>`, `states <n> inputs <m>`, then `<x> <u>` or
//! `<x> all` (hand over) per state.
//!
//! Binary (little-endian): magic `SYMOPTVC`, version byte, 32 raw hash bytes
//! (all zero without a grid), `n_states` as u64, `n_inputs` as u32, `n` f64
//! values, `n` u32 input-set codes (`u32::MAX` = hand over).

use std::io::{Read, Write};

use sha2::{Digest, Sha256};

use crate::abstraction::GridCover;
use crate::hypergraph::{ControllerMap, InputSet, ValueMap};
use crate::scalar::{format_cost, parse_cost};

use super::{syntax, FormatError};

pub const BINARY_MAGIC: &[u8; 8] = b"SYMOPTVC";
pub const BINARY_VERSION: u8 = 1;
/// Hash recorded for problems that do not come from a grid.
pub const NO_GRID: &str = "none";

/// Hex SHA-256 of the grid description.
pub fn grid_hash(cover: &GridCover<f64>) -> String {
    hex::encode(Sha256::digest(cover.describe().as_bytes()))
}

/// Solver output tied to the grid it was computed on.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub grid: String,
    pub values: ValueMap<f64>,
    pub controller: ControllerMap,
}

impl Artifact {
    pub fn check_grid(&self, expected: &str) -> Result<(), FormatError> {
        if self.grid != expected {
            return Err(FormatError::GridMismatch { expected: expected.into(), found: self.grid.clone() });
        }
        Ok(())
    }
}

pub fn write_values_text<W: Write>(grid: &str, values: &ValueMap<f64>, mut out: W) -> std::io::Result<()> {
    writeln!(out, "grid {grid}")?;
    writeln!(out, "states {}", values.len())?;
    for (x, v) in values.0.iter().enumerate() {
        writeln!(out, "{x} {}", format_cost(*v))?;
    }
    Ok(())
}

pub fn write_controller_text<W: Write>(grid: &str, mu: &ControllerMap, mut out: W) -> std::io::Result<()> {
    writeln!(out, "grid {grid}")?;
    writeln!(out, "states {} inputs {}", mu.len(), mu.n_inputs)?;
    for (x, c) in mu.choices.iter().enumerate() {
        match c {
            InputSet::All => writeln!(out, "{x} all")?,
            InputSet::One(u) => writeln!(out, "{x} {u}")?,
        }
    }
    Ok(())
}

struct Lines<'a> {
    it: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Self { it: text.lines().enumerate() }
    }

    fn next(&mut self) -> Option<(usize, Vec<&'a str>)> {
        for (i, l) in self.it.by_ref() {
            let l = l.split('#').next().unwrap_or("").trim();
            if !l.is_empty() {
                return Some((i + 1, l.split_whitespace().collect()));
            }
        }
        None
    }

    fn expect(&mut self, what: &str) -> Result<(usize, Vec<&'a str>), FormatError> {
        self.next().ok_or_else(|| syntax(0, format!("unexpected end of file, expected {what}")))
    }
}

fn header_grid(lines: &mut Lines<'_>) -> Result<String, FormatError> {
    let (line, t) = lines.expect("`grid <hash>`")?;
    match t.as_slice() {
        ["grid", h] => Ok(h.to_string()),
        _ => Err(syntax(line, "expected `grid <hash>`")),
    }
}

fn num(tok: &str, line: usize) -> Result<usize, FormatError> {
    tok.parse().map_err(|_| syntax(line, format!("bad number `{tok}`")))
}

/// Rows must list every state once, in order.
fn row_index(tok: &str, line: usize, expected: usize) -> Result<(), FormatError> {
    if num(tok, line)? != expected {
        return Err(syntax(line, format!("expected state {expected}")));
    }
    Ok(())
}

pub fn read_values_text(text: &str) -> Result<(String, ValueMap<f64>), FormatError> {
    let mut lines = Lines::new(text);
    let grid = header_grid(&mut lines)?;
    let (line, t) = lines.expect("`states <n>`")?;
    let n = match t.as_slice() {
        ["states", n] => num(n, line)?,
        _ => return Err(syntax(line, "expected `states <n>`")),
    };
    let mut values = Vec::with_capacity(n);
    for x in 0..n {
        let (line, t) = lines.expect("a value row")?;
        let [i, v] = t.as_slice() else {
            return Err(syntax(line, "expected `<x> <value>`"));
        };
        row_index(i, line, x)?;
        // Values of diverged runs may be -inf, which parse_cost rejects.
        let v = if *v == "-inf" { f64::NEG_INFINITY } else { parse_cost(v).ok_or_else(|| syntax(line, "bad value"))? };
        values.push(v);
    }
    if let Some((line, _)) = lines.next() {
        return Err(syntax(line, "trailing data"));
    }
    Ok((grid, ValueMap(values)))
}

pub fn read_controller_text(text: &str) -> Result<(String, ControllerMap), FormatError> {
    let mut lines = Lines::new(text);
    let grid = header_grid(&mut lines)?;
    let (line, t) = lines.expect("`states <n> inputs <m>`")?;
    let (n, m) = match t.as_slice() {
        ["states", n, "inputs", m] => (num(n, line)?, num(m, line)?),
        _ => return Err(syntax(line, "expected `states <n> inputs <m>`")),
    };
    let mut choices = Vec::with_capacity(n);
    for x in 0..n {
        let (line, t) = lines.expect("a controller row")?;
        let [i, c] = t.as_slice() else {
            return Err(syntax(line, "expected `<x> <u>` or `<x> all`"));
        };
        row_index(i, line, x)?;
        choices.push(if *c == "all" {
            InputSet::All
        } else {
            let u = num(c, line)?;
            if u >= m {
                return Err(syntax(line, format!("input {u} out of range")));
            }
            InputSet::One(u as u32)
        });
    }
    if let Some((line, _)) = lines.next() {
        return Err(syntax(line, "trailing data"));
    }
    Ok((grid, ControllerMap { n_inputs: m, choices }))
}

fn hash_bytes(grid: &str) -> Result<[u8; 32], FormatError> {
    let mut out = [0u8; 32];
    if grid != NO_GRID {
        hex::decode_to_slice(grid, &mut out).map_err(|_| syntax(0, format!("grid hash `{grid}` is not 64 hex digits")))?;
    }
    Ok(out)
}

pub fn write_binary<W: Write>(a: &Artifact, mut out: W) -> Result<(), FormatError> {
    let n = a.values.len();
    if a.controller.len() != n {
        return Err(syntax(0, "value and controller lengths differ"));
    }
    out.write_all(BINARY_MAGIC)?;
    out.write_all(&[BINARY_VERSION])?;
    out.write_all(&hash_bytes(&a.grid)?)?;
    out.write_all(&(n as u64).to_le_bytes())?;
    out.write_all(&(a.controller.n_inputs as u32).to_le_bytes())?;
    let mut buf = Vec::with_capacity(n * 12);
    for v in &a.values.0 {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    for c in &a.controller.choices {
        buf.extend_from_slice(&c.encode().to_le_bytes());
    }
    out.write_all(&buf)?;
    Ok(())
}

pub fn read_binary<R: Read>(mut r: R) -> Result<Artifact, FormatError> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    let bad = |msg: &str| syntax(0, format!("binary artifact: {msg}"));
    let head = 8 + 1 + 32 + 8 + 4;
    if bytes.len() < head || &bytes[..8] != BINARY_MAGIC {
        return Err(bad("missing magic header"));
    }
    if bytes[8] != BINARY_VERSION {
        return Err(bad(&format!("unsupported version {}", bytes[8])));
    }
    let hash = &bytes[9..41];
    let grid = if hash.iter().all(|&b| b == 0) { NO_GRID.to_string() } else { hex::encode(hash) };
    let n = u64::from_le_bytes(bytes[41..49].try_into().unwrap()) as usize;
    let m = u32::from_le_bytes(bytes[49..53].try_into().unwrap()) as usize;
    if n.checked_mul(12).and_then(|b| b.checked_add(head)) != Some(bytes.len()) {
        return Err(bad("length does not match the state count"));
    }
    let body = &bytes[head..];
    let values = body[..8 * n].chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    let mut choices = Vec::with_capacity(n);
    for c in body[8 * n..].chunks_exact(4) {
        let s = InputSet::decode(u32::from_le_bytes(c.try_into().unwrap()));
        if let InputSet::One(u) = s {
            if u as usize >= m {
                return Err(bad(&format!("input {u} out of range")));
            }
        }
        choices.push(s);
    }
    Ok(Artifact { grid, values: ValueMap(values), controller: ControllerMap { n_inputs: m, choices } })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Artifact {
        Artifact {
            grid: NO_GRID.into(),
            values: ValueMap(vec![1.0, f64::INFINITY, -0.5]),
            controller: ControllerMap { n_inputs: 2, choices: vec![InputSet::One(1), InputSet::All, InputSet::One(0)] },
        }
    }

    #[test]
    fn text_round_trip() {
        let a = sample();
        let mut v = Vec::new();
        let mut c = Vec::new();
        write_values_text(&a.grid, &a.values, &mut v).unwrap();
        write_controller_text(&a.grid, &a.controller, &mut c).unwrap();
        assert_eq!(String::from_utf8(v.clone()).unwrap(), "grid none\nstates 3\n0 1.0\n1 inf\n2 -0.5\n");
        let (g, values) = read_values_text(std::str::from_utf8(&v).unwrap()).unwrap();
        let (_, mu) = read_controller_text(std::str::from_utf8(&c).unwrap()).unwrap();
        assert_eq!(Artifact { grid: g, values, controller: mu }, a);
    }

    #[test]
    fn binary_layout() {
        let mut a = sample();
        a.grid = "ab".repeat(32);
        let mut buf = Vec::new();
        write_binary(&a, &mut buf).unwrap();
        assert_eq!(buf.len(), 53 + 3 * 12);
        assert_eq!(&buf[..8], b"SYMOPTVC");
        assert_eq!(buf[8], 1);
        assert_eq!(u64::from_le_bytes(buf[41..49].try_into().unwrap()), 3);
        assert_eq!(read_binary(&buf[..]).unwrap(), a);
        assert!(read_binary(&buf[..buf.len() - 1]).is_err());
    }

    #[test]
    fn grid_mismatch_reports_both_hashes() {
        let e = sample().check_grid("abc").unwrap_err().to_string();
        assert!(e.contains("none") && e.contains("abc"), "{e}");
    }
}
