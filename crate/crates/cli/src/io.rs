//! Input parsing for the command-line tool. Every diagnostic carries the
//! line number it refers to.

use std::io::Read;
use std::path::Path;

use tdg_core::calibration::monotone_c_table;
use tdg_core::{CTable, IndexSet, PValueVector};

use crate::CliError;

pub fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))
}

pub fn read_stdin() -> Result<String, CliError> {
    let mut text = String::new();
    std::io::stdin()
        .read_to_string(&mut text)
        .map_err(|e| CliError::Io(format!("cannot read standard input: {e}")))?;
    Ok(text)
}

/// p-values from CSV with header `id,p`. Ids may come in any order but must
/// cover `1..=m` exactly once.
pub fn parse_pvalues(text: &str) -> Result<PValueVector<f64>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| CliError::Validation(format!("line 1: {e}")))?
        .clone();
    if headers.len() != 2 || &headers[0] != "id" || &headers[1] != "p" {
        return Err(CliError::Validation(
            "line 1: expected header 'id,p'".to_string(),
        ));
    }
    let mut rows: Vec<(usize, f64, u64)> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::Validation(format!("malformed CSV: {e}")))?;
        let line = record.position().map_or(0, |p| p.line());
        let id: usize = record[0]
            .parse()
            .map_err(|_| CliError::Validation(format!("line {line}: bad id '{}'", &record[0])))?;
        let p: f64 = record[1].parse().map_err(|_| {
            CliError::Validation(format!("line {line}: bad p-value '{}'", &record[1]))
        })?;
        if !(0.0..=1.0).contains(&p) {
            return Err(CliError::Validation(format!(
                "line {line}: p-value {p} outside [0, 1]"
            )));
        }
        rows.push((id, p, line));
    }
    let m = rows.len();
    let mut values = vec![f64::NAN; m];
    for &(id, p, line) in &rows {
        if id == 0 || id > m {
            return Err(CliError::Validation(format!(
                "line {line}: id {id} outside 1..={m}; ids must be 1..m"
            )));
        }
        if !values[id - 1].is_nan() {
            return Err(CliError::Validation(format!("line {line}: duplicate id {id}")));
        }
        values[id - 1] = p;
    }
    PValueVector::new(values).map_err(|e| CliError::Validation(e.to_string()))
}

/// One query set per line: whitespace-separated ids and ranges `a-b`. Blank
/// lines are the empty set; lines starting with `#` are skipped.
pub fn parse_queries(text: &str, m: usize) -> Result<Vec<IndexSet>, CliError> {
    let mut out = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.starts_with('#') {
            continue;
        }
        let mut ids = Vec::new();
        for token in line.split_whitespace() {
            let bad = || CliError::Validation(format!("line {}: bad id or range '{token}'", no + 1));
            match token.split_once('-') {
                Some((a, b)) => {
                    let a: usize = a.parse().map_err(|_| bad())?;
                    let b: usize = b.parse().map_err(|_| bad())?;
                    if a > b {
                        return Err(bad());
                    }
                    ids.extend(a..=b);
                }
                None => ids.push(token.parse().map_err(|_| bad())?),
            }
        }
        if let Some(&id) = ids.iter().find(|&&id| id == 0 || id > m) {
            return Err(CliError::Validation(format!(
                "line {}: unknown id {id} (family is 1..={m})",
                no + 1
            )));
        }
        out.push(IndexSet::new(ids));
    }
    Ok(out)
}

/// `c_m` table from CSV with columns `m` and `c_m` (other columns ignored),
/// as written by the `calibrate` command.
pub fn parse_c_table(text: &str) -> Result<CTable<f64>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| CliError::Validation(format!("line 1: {e}")))?
        .clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::Validation(format!("line 1: missing column '{name}'")))
    };
    let (mi, ci) = (column("m")?, column("c_m")?);
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::Validation(format!("malformed CSV: {e}")))?;
        let line = record.position().map_or(0, |p| p.line());
        let m: usize = record
            .get(mi)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| CliError::Validation(format!("line {line}: bad m")))?;
        let c: f64 = record
            .get(ci)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| CliError::Validation(format!("line {line}: bad c_m")))?;
        rows.push((m, c));
    }
    monotone_c_table(rows).map_err(|e| CliError::Validation(e.to_string()))
}

/// Comma-separated list such as `1,2,10`.
pub fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>, CliError> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| CliError::Validation(format!("bad {what} '{}'", t.trim())))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pvalues_any_order() {
        let p = parse_pvalues("id,p\n2,0.2\n1,0.01\n3,0.9\n").unwrap();
        assert_eq!(p.values(), &[0.01, 0.2, 0.9]);
    }

    #[test]
    fn pvalue_diagnostics_carry_line_numbers() {
        let err = parse_pvalues("id,p\n1,0.1\n2,1.5\n").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
        let err = parse_pvalues("id,p\n1,0.1\n1,0.2\n").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
        let err = parse_pvalues("id,p\n1,abc\n").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        assert!(parse_pvalues("p,id\n1,0.1\n").is_err());
    }

    #[test]
    fn queries_with_ranges() {
        let q = parse_queries("1 3-5\n\n# note\n2\n", 6).unwrap();
        assert_eq!(q, vec![IndexSet::new([1, 3, 4, 5]), IndexSet::empty(), IndexSet::new([2])]);
        let err = parse_queries("1\n7\n", 6).unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        assert!(parse_queries("5-3\n", 6).is_err());
    }

    #[test]
    fn c_table_from_calibration_csv() {
        let t = parse_c_table("m,c_m,se\n1,0.95,0.001\n2,1.38,0.002\n").unwrap();
        assert_eq!(t.entries(), &[(1, 0.95), (2, 1.38)]);
        assert!(parse_c_table("n,c\n1,2\n").is_err());
    }
}
