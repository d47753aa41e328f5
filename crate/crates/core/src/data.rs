//! Instrument CSV ingestion and the bundled market dataset.
//!
//! Schema: a header line `name,eps,price`, then one instrument per line.
//! Names may contain spaces but not commas, `eps` is a signed decimal and
//! `price` a positive decimal with at most two fraction digits. LF and CRLF
//! line endings are accepted; decimal commas are not.

use std::fmt::Write as _;
use std::fs::File;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::portfolio::{Instrument, PortfolioInstance, DEFAULT_BUDGET};

pub const CSV_HEADER: &str = "name,eps,price";

const BUNDLED_CSV: &str = include_str!("../data/table1.csv");

/// Number of distinct companies in the bundled dataset.
pub const BUNDLED_COUNT: usize = 71;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowIssue {
    /// 1-based line number in the input.
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetReport {
    pub rows_read: usize,
    pub duplicates: Vec<RowIssue>,
    pub rejected: Vec<RowIssue>,
    pub final_count: usize,
}

/// True for `[+-]digits[.digits]`, with at most `max_fraction` digits after
/// the point when given.
fn is_plain_decimal(s: &str, max_fraction: Option<usize>) -> bool {
    let unsigned = s.strip_prefix(['-', '+']).unwrap_or(s);
    let (int, frac) = match unsigned.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (unsigned, None),
    };
    let digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
    if !digits(int) {
        return false;
    }
    match frac {
        None => true,
        Some(f) => digits(f) && max_fraction.is_none_or(|m| f.len() <= m),
    }
}

fn parse_row(line: &str) -> std::result::Result<Instrument, String> {
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() != 3 {
        return Err(format!("expected 3 fields, found {}", fields.len()));
    }
    let (name, eps, price) = (fields[0], fields[1], fields[2]);
    if name.trim().is_empty() {
        return Err("empty name".into());
    }
    if !is_plain_decimal(eps, None) {
        return Err(format!("eps {eps:?} is not a decimal number"));
    }
    if !is_plain_decimal(price, Some(2)) {
        return Err(format!(
            "price {price:?} is not a decimal with at most 2 fraction digits"
        ));
    }
    let eps: f64 = eps
        .parse()
        .map_err(|_| format!("eps {eps:?} is not a number"))?;
    let price: f64 = price
        .parse()
        .map_err(|_| format!("price {price:?} is not a number"))?;
    if price.is_nan() || price <= 0.0 {
        return Err(format!("price {price} is not positive"));
    }
    Ok(Instrument::new(name, eps, price))
}

/// Parses instrument CSV text. Exact repeats are dropped, rows that reuse a
/// name with different numbers are rejected, and all other malformed rows are
/// rejected with a reason. Only an empty result is fatal.
pub fn parse_csv(text: &str) -> Result<(Vec<Instrument>, DatasetReport)> {
    let mut report = DatasetReport::default();
    let mut accepted: Vec<Instrument> = Vec::new();

    for (idx, raw) in text.split('\n').enumerate() {
        let line_no = idx + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if idx == 0 {
            let header = line.strip_prefix('\u{feff}').unwrap_or(line);
            if header == CSV_HEADER {
                continue;
            }
            report.rows_read += 1;
            report.rejected.push(RowIssue {
                line: line_no,
                reason: format!("missing header {CSV_HEADER:?}"),
            });
            continue;
        }
        if line.is_empty() {
            continue;
        }
        report.rows_read += 1;
        match parse_row(line) {
            Err(reason) => report.rejected.push(RowIssue {
                line: line_no,
                reason,
            }),
            Ok(inst) => match accepted.iter().find(|a| a.name == inst.name) {
                None => accepted.push(inst),
                Some(prev) if prev.eps == inst.eps && prev.price == inst.price => {
                    report.duplicates.push(RowIssue {
                        line: line_no,
                        reason: format!("exact repeat of {:?}", inst.name),
                    })
                }
                Some(_) => report.rejected.push(RowIssue {
                    line: line_no,
                    reason: format!("{:?} already listed with different numbers", inst.name),
                }),
            },
        }
    }

    report.final_count = accepted.len();
    if accepted.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok((accepted, report))
}

pub fn load_csv<R: Read>(mut reader: R) -> Result<(Vec<Instrument>, DatasetReport)> {
    let mut text = String::new();
    reader
        .read_to_string(&mut text)
        .map_err(|e| Error::Io(e.to_string()))?;
    parse_csv(&text)
}

pub fn load_csv_path(path: impl AsRef<Path>) -> Result<(Vec<Instrument>, DatasetReport)> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    load_csv(file)
}

/// Writes instruments back out in the CSV schema, prices with two decimals.
pub fn to_csv(instruments: &[Instrument]) -> String {
    let mut out = String::with_capacity(32 * (instruments.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for i in instruments {
        let _ = writeln!(out, "{},{},{:.2}", i.name, i.eps, i.price);
    }
    out
}

/// The bundled market dataset with a budget of 100000.
pub fn bundled_dataset() -> (PortfolioInstance, DatasetReport) {
    let (instruments, report) = parse_csv(BUNDLED_CSV).expect("bundled dataset parses");
    let instance =
        PortfolioInstance::new(instruments, DEFAULT_BUDGET).expect("bundled dataset is valid");
    (instance, report)
}
