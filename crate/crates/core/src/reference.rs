//! Reference Bell-expression values for the sixteen Bell products, kept as
//! a data file (`data/table3.csv`) rather than code.

use crate::error::{Error, Result};
use crate::states::FourQubitProductLabel;

/// Raw contents of the reference table.
pub const TABLE3_CSV: &str = include_str!("../data/table3.csv");

/// `values[state - 1][expression - 1]` for states in canonical order.
pub type ValueTable = [[i32; 16]; 16];

fn parse_err(detail: String) -> Error {
    Error::Parse {
        what: "reference table",
        detail,
    }
}

/// Parses a reference table; `#` lines are comments, the first other line is
/// the header. Rows may appear in any order.
pub fn parse_table(text: &str) -> Result<ValueTable> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines.next().ok_or_else(|| parse_err("empty table".into()))?;
    if header.split(',').count() != 18 {
        return Err(parse_err(format!("header has wrong width: {header}")));
    }
    let mut table = [[0; 16]; 16];
    let mut seen = [false; 16];
    for line in lines {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 18 {
            return Err(parse_err(format!("row has {} fields: {line}", fields.len())));
        }
        let label: FourQubitProductLabel = format!("{},{}", fields[0], fields[1]).parse()?;
        let row = label.index() - 1;
        if std::mem::replace(&mut seen[row], true) {
            return Err(parse_err(format!("duplicate row {}", label.code())));
        }
        for (k, f) in fields[2..].iter().enumerate() {
            table[row][k] = f
                .parse()
                .map_err(|e| parse_err(format!("{f:?} in row {}: {e}", label.code())))?;
        }
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(parse_err(format!("missing row for state {}", missing + 1)));
    }
    Ok(table)
}

/// The embedded reference table.
pub fn table3() -> Result<ValueTable> {
    parse_table(TABLE3_CSV)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_table_parses() {
        let t = table3().unwrap();
        for (k, row) in t.iter().enumerate() {
            assert_eq!(row[k], 9, "diagonal entry {k}");
            assert!(row.iter().all(|v| [9, 1, -3].contains(v)));
            assert_eq!(row.iter().filter(|&&v| v == 9).count(), 1);
        }
        assert_eq!(t[0], [9, 1, 1, -3, 1, 1, 1, -3, 1, 1, 1, -3, -3, -3, -3, 1]);
    }

    #[test]
    fn rejects_malformed_tables() {
        let body: Vec<&str> = TABLE3_CSV.lines().collect();
        let truncated = body[..body.len() - 1].join("\n");
        assert!(parse_table(&truncated).is_err());
        let dup = format!("{}\n{}", TABLE3_CSV.trim_end(), body[4]);
        assert!(parse_table(&dup).is_err());
        assert!(parse_table("").is_err());
    }
}
