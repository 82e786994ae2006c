//! Line-oriented input files.
//!
//! Each line is stripped of `#` comments and split on `;` into chunks.
//! A chunk is one of:
//!
//! - a header: every token is a `key=value` pair with keys `p`, `m`, `N`
//! - `seq c1 c2 ...`: one sequence row of base-10 residues; the window
//!   covers exactly what is written, the sequence may continue past it
//! - `series c@e ...`: one exact component as sparse monomials, `c`
//!   a residue and `e` the integer exponent of z; no entries means an
//!   exact zero
//! - `cf: <text>`: a structure in the canonical serialization; the rest
//!   of the physical line is taken whole since the payload itself uses
//!   `;` separators
//!
//! Residue checks against the field happen once the characteristic is
//! known, so header order does not matter.

use mcf_core::synthesis::MultiSeqPrefix;
use mcf_core::{Error, PrimeField, SeriesVec, TruncSeries};

/// A parsed file, before any field validation.
#[derive(Default, Debug)]
pub struct RawInput {
    pub p: Option<u64>,
    pub m: Option<usize>,
    pub n: Option<i64>,
    /// (source line, residues) per `seq` row.
    pub seq_rows: Vec<(usize, Vec<u64>)>,
    /// (source line, (exponent, residue) entries) per `series` row.
    pub series_rows: Vec<(usize, Vec<(i64, u64)>)>,
    pub cf_text: Option<String>,
}

impl RawInput {
    /// Number of component rows of either kind.
    pub fn rows(&self) -> usize {
        self.seq_rows.len() + self.series_rows.len()
    }
}

fn parse_err(line: usize, msg: impl AsRef<str>) -> Error {
    Error::Parse(format!("line {line}: {}", msg.as_ref()))
}

pub fn parse_input(text: &str) -> Result<RawInput, Error> {
    let mut raw = RawInput::default();
    for (idx, full_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = full_line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("cf:") {
            if raw.cf_text.is_some() {
                return Err(parse_err(line_no, "second cf payload"));
            }
            raw.cf_text = Some(rest.trim().to_string());
            continue;
        }
        for chunk in line.split(';') {
            let tokens: Vec<&str> = chunk.split_whitespace().collect();
            let Some(&first) = tokens.first() else {
                continue;
            };
            if first.contains('=') {
                for token in &tokens {
                    let Some((key, value)) = token.split_once('=') else {
                        return Err(parse_err(
                            line_no,
                            format!("expected key=value in a header, got \"{token}\""),
                        ));
                    };
                    match key {
                        "p" => {
                            let v = value.parse::<u64>().map_err(|_| {
                                parse_err(line_no, format!("bad characteristic \"{value}\""))
                            })?;
                            if raw.p.replace(v).is_some() {
                                return Err(parse_err(line_no, "p given twice"));
                            }
                        }
                        "m" => {
                            let v = value.parse::<usize>().map_err(|_| {
                                parse_err(line_no, format!("bad dimension \"{value}\""))
                            })?;
                            if raw.m.replace(v).is_some() {
                                return Err(parse_err(line_no, "m given twice"));
                            }
                        }
                        "N" => {
                            let v = value.parse::<i64>().map_err(|_| {
                                parse_err(line_no, format!("bad precision \"{value}\""))
                            })?;
                            if v < 1 {
                                return Err(parse_err(line_no, "N must be at least 1"));
                            }
                            if raw.n.replace(v).is_some() {
                                return Err(parse_err(line_no, "N given twice"));
                            }
                        }
                        other => {
                            return Err(parse_err(
                                line_no,
                                format!("unknown header key \"{other}\""),
                            ));
                        }
                    }
                }
            } else if first == "seq" {
                if tokens.len() == 1 {
                    return Err(parse_err(line_no, "seq row needs at least one symbol"));
                }
                let mut row = Vec::with_capacity(tokens.len() - 1);
                for token in &tokens[1..] {
                    let v = token.parse::<u64>().map_err(|_| {
                        parse_err(line_no, format!("symbol \"{token}\" is not a residue"))
                    })?;
                    row.push(v);
                }
                raw.seq_rows.push((line_no, row));
            } else if first == "series" {
                let mut row = Vec::with_capacity(tokens.len() - 1);
                for token in &tokens[1..] {
                    let Some((c, e)) = token.split_once('@') else {
                        return Err(parse_err(
                            line_no,
                            format!("expected coefficient@exponent, got \"{token}\""),
                        ));
                    };
                    let c = c.parse::<u64>().map_err(|_| {
                        parse_err(line_no, format!("symbol \"{c}\" is not a residue"))
                    })?;
                    let e = e.parse::<i64>().map_err(|_| {
                        parse_err(line_no, format!("bad exponent \"{e}\""))
                    })?;
                    row.push((e, c));
                }
                raw.series_rows.push((line_no, row));
            } else {
                return Err(parse_err(line_no, format!("unknown directive \"{first}\"")));
            }
        }
    }
    Ok(raw)
}

fn check_residue(value: u64, field: PrimeField, line: usize) -> Result<(), Error> {
    if value >= field.p() {
        return Err(parse_err(
            line,
            format!("symbol \"{value}\" is not a residue mod {}", field.p()),
        ));
    }
    Ok(())
}

/// Builds the component vector: `seq` rows become windows, `series` rows
/// exact components. The two kinds cannot be mixed in one file.
pub fn build_series(raw: &RawInput, field: PrimeField) -> Result<SeriesVec, Error> {
    if !raw.seq_rows.is_empty() && !raw.series_rows.is_empty() {
        return Err(Error::Parse(
            "cannot mix seq and series rows in one input".into(),
        ));
    }
    let mut entries = Vec::with_capacity(raw.rows());
    for (line, row) in &raw.seq_rows {
        for &v in row {
            check_residue(v, field, *line)?;
        }
        entries.push(TruncSeries::from_prefix(field, row));
    }
    for (line, row) in &raw.series_rows {
        for &(_, c) in row {
            check_residue(c, field, *line)?;
        }
        let depth = row.iter().map(|&(e, _)| -e).max().unwrap_or(0).max(0) as usize;
        entries.push(TruncSeries::from_monomials(field, row, depth, true)?);
    }
    SeriesVec::new(entries)
}

/// Builds the rectangular multisequence from `seq` rows.
pub fn build_prefix(raw: &RawInput, field: PrimeField) -> Result<MultiSeqPrefix, Error> {
    if !raw.series_rows.is_empty() {
        return Err(Error::Parse(
            "sequence synthesis reads seq rows, not series rows".into(),
        ));
    }
    for (line, row) in &raw.seq_rows {
        for &v in row {
            check_residue(v, field, *line)?;
        }
    }
    MultiSeqPrefix::new(
        field,
        raw.seq_rows.iter().map(|(_, row)| row.clone()).collect(),
    )
}
