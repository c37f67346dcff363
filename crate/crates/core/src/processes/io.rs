//! Text serialization of processes.
//!
//! ```text
//! causalthermo-process 1
//! kind: vector
//! past: S_I=2 Q_I=2
//! slot: A A_I=2 A_O=2
//! slot: B B_I=2 B_O=2
//! future: S_O=2 Q_O=2
//! dim: 256
//! entries: 16
//! 0 0 1.0 0.0
//! ...
//! ```
//!
//! Only non-zero entries are written; vectors use column 0. Numbers use the
//! shortest decimal form that parses back to the same `f64`.

use super::structure::{Process, ProcessMatrix, ProcessStructure, ProcessVector, SlotSpec};
use crate::error::{Error, Result};
use crate::tensor::{ComplexMatrix, Subsystem, C64, ZERO};
use std::fmt::Write as _;

const MAGIC: &str = "causalthermo-process 1";

fn systems(list: &[Subsystem]) -> String {
    list.iter()
        .map(|s| format!("{}={}", s.label, s.dim))
        .collect::<Vec<_>>()
        .join(" ")
}

fn header(out: &mut String, kind: &str, st: &ProcessStructure, entries: usize) {
    let _ = writeln!(out, "{MAGIC}");
    let _ = writeln!(out, "kind: {kind}");
    let _ = writeln!(out, "past: {}", systems(st.past()));
    for s in st.slots() {
        let _ = writeln!(
            out,
            "slot: {} {}",
            s.label,
            systems(&[s.input.clone(), s.output.clone()])
        );
    }
    let _ = writeln!(out, "future: {}", systems(st.future()));
    let _ = writeln!(out, "dim: {}", st.dim());
    let _ = writeln!(out, "entries: {entries}");
}

fn entry(out: &mut String, r: usize, c: usize, z: C64) {
    let _ = writeln!(out, "{r} {c} {:?} {:?}", z.re, z.im);
}

pub fn write_process(process: &Process) -> String {
    let mut out = String::new();
    match process {
        Process::Matrix(w) => {
            let m = w.matrix();
            let n = m.cols();
            let nz: Vec<(usize, C64)> = m
                .data()
                .iter()
                .enumerate()
                .filter(|(_, z)| **z != ZERO)
                .map(|(i, z)| (i, *z))
                .collect();
            header(&mut out, "matrix", w.structure(), nz.len());
            for (i, z) in nz {
                entry(&mut out, i / n, i % n, z);
            }
        }
        Process::Vector(w) => {
            let terms = w.terms();
            header(&mut out, "vector", w.structure(), terms.len());
            for (i, z) in terms {
                entry(&mut out, i, 0, z);
            }
        }
    }
    out
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_system(line: usize, tok: &str) -> Result<Subsystem> {
    let (label, dim) = tok
        .split_once('=')
        .ok_or_else(|| perr(line, format!("expected LABEL=DIM, got `{tok}`")))?;
    let dim: usize = dim
        .parse()
        .map_err(|_| perr(line, format!("bad dimension `{dim}`")))?;
    if label.is_empty() || dim == 0 {
        return Err(perr(line, format!("bad system `{tok}`")));
    }
    Ok(Subsystem::new(label, dim))
}

fn parse_systems(line: usize, rest: &str) -> Result<Vec<Subsystem>> {
    rest.split_whitespace().map(|t| parse_system(line, t)).collect()
}

fn parse_count(line: usize, rest: &str) -> Result<usize> {
    rest.trim()
        .parse()
        .map_err(|_| perr(line, format!("bad count `{}`", rest.trim())))
}

fn parse_f64(line: usize, tok: &str) -> Result<f64> {
    let v: f64 = tok
        .parse()
        .map_err(|_| perr(line, format!("bad number `{tok}`")))?;
    if !v.is_finite() {
        return Err(perr(line, format!("non-finite number `{tok}`")));
    }
    Ok(v)
}

/// Parses the output of [`write_process`]. Blank lines and lines starting
/// with `#` are ignored.
pub fn parse_process(text: &str) -> Result<Process> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (ln, first) = lines.next().ok_or_else(|| perr(0, "empty input"))?;
    if first != MAGIC {
        return Err(perr(ln, format!("expected `{MAGIC}`")));
    }
    let mut kind = None;
    let mut past = None;
    let mut slots = Vec::new();
    let mut future = None;
    let mut dim = None;
    let mut entries = None;
    let mut last = ln;
    for (ln, l) in lines.by_ref() {
        last = ln;
        let (key, rest) = l
            .split_once(':')
            .ok_or_else(|| perr(ln, format!("expected `key: value`, got `{l}`")))?;
        match key {
            "kind" => match rest.trim() {
                "matrix" | "vector" => kind = Some(rest.trim().to_string()),
                other => return Err(perr(ln, format!("unknown kind `{other}`"))),
            },
            "past" => past = Some(parse_systems(ln, rest)?),
            "future" => future = Some(parse_systems(ln, rest)?),
            "slot" => {
                let toks: Vec<&str> = rest.split_whitespace().collect();
                if toks.len() != 3 {
                    return Err(perr(ln, "expected `slot: LABEL IN=DIM OUT=DIM`"));
                }
                let spec = SlotSpec::new(toks[0], parse_system(ln, toks[1])?, parse_system(ln, toks[2])?)
                    .map_err(|e| perr(ln, e.to_string()))?;
                slots.push(spec);
            }
            "dim" => dim = Some(parse_count(ln, rest)?),
            "entries" => {
                entries = Some(parse_count(ln, rest)?);
                break;
            }
            other => return Err(perr(ln, format!("unknown key `{other}`"))),
        }
    }
    let missing = |what: &str| perr(last, format!("missing `{what}` header"));
    let kind = kind.ok_or_else(|| missing("kind"))?;
    let past = past.ok_or_else(|| missing("past"))?;
    let future = future.ok_or_else(|| missing("future"))?;
    let dim = dim.ok_or_else(|| missing("dim"))?;
    let entries = entries.ok_or_else(|| missing("entries"))?;
    let structure = ProcessStructure::new(past, slots, future).map_err(|e| perr(last, e.to_string()))?;
    if structure.dim() != dim {
        return Err(perr(
            last,
            format!("dim {dim} does not match layout dimension {}", structure.dim()),
        ));
    }
    let is_vector = kind == "vector";
    let mut data = vec![ZERO; if is_vector { dim } else { dim * dim }];
    let mut count = 0;
    for (ln, l) in lines {
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() != 4 {
            return Err(perr(ln, "expected `row col re im`"));
        }
        let r: usize = toks[0].parse().map_err(|_| perr(ln, "bad row index"))?;
        let c: usize = toks[1].parse().map_err(|_| perr(ln, "bad column index"))?;
        let z = C64::new(parse_f64(ln, toks[2])?, parse_f64(ln, toks[3])?);
        let cols = if is_vector { 1 } else { dim };
        if r >= dim || c >= cols {
            return Err(perr(ln, format!("index ({r}, {c}) out of range")));
        }
        data[r * cols + c] = z;
        count += 1;
        last = ln;
    }
    if count != entries {
        return Err(perr(last, format!("expected {entries} entries, found {count}")));
    }
    Ok(if is_vector {
        ProcessVector::new(structure, data)?.into()
    } else {
        ProcessMatrix::new(structure, ComplexMatrix::new(dim, dim, data)?)?.into()
    })
}
