//! CSV rendering and parsing.

use crate::error::CliError;
use crate::sweep::SweepRow;
use serde::Deserialize;
use std::io::{Read, Write};

pub const HEADER: [&str; 11] = [
    "process", "r", "delta_rho", "figure", "value", "prob_0", "prob_1", "m", "phi", "x", "chi",
];

/// Fixed-point rendering with 12 significant digits.
pub fn format_sig(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let mag = v.abs().log10().floor() as i32;
    let decimals = (11 - mag).max(0) as usize;
    let s = format!("{v:.decimals$}");
    // rounding may carry into a new leading digit
    let digits = s.chars().filter(char::is_ascii_digit).skip_while(|&c| c == '0').count();
    if digits > 12 && decimals > 0 {
        format!("{v:.prec$}", prec = decimals - 1)
    } else {
        s
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(format_sig).unwrap_or_default()
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for row in rows {
        let p = row.params.map(|p| p.to_array());
        let param = |i: usize| opt(p.map(|a| a[i]));
        w.write_record([
            row.process.clone(),
            format_sig(row.r),
            opt(row.delta_rho),
            row.figure.to_string(),
            format_sig(row.value),
            format_sig(row.probabilities[0]),
            format_sig(row.probabilities[1]),
            param(0),
            param(1),
            param(2),
            param(3),
        ])?;
    }
    w.flush().map_err(|e| CliError::Input(format!("writing csv: {e}")))?;
    Ok(())
}

pub fn to_csv_string(rows: &[SweepRow]) -> Result<String, CliError> {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

/// A row read back from CSV.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct CsvRow {
    pub process: String,
    pub r: f64,
    pub delta_rho: Option<f64>,
    pub figure: String,
    pub value: f64,
    pub prob_0: f64,
    pub prob_1: f64,
    pub m: Option<f64>,
    pub phi: Option<f64>,
    pub x: Option<f64>,
    pub chi: Option<f64>,
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<CsvRow>, CliError> {
    let mut rd = csv::Reader::from_reader(input);
    let header = rd.headers()?.clone();
    if header.iter().ne(HEADER) {
        return Err(CliError::Input(format!(
            "unexpected header `{}`",
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    rd.deserialize().map(|r| r.map_err(CliError::from)).collect()
}
