//! Z-score CSV reader.

use std::path::Path;

use empnull::{Error, Result, Sample64};

/// Reads one column of z-scores. A first row reading `z` is a header; every
/// other row must hold a single finite number.
pub fn read_z_scores(path: &Path) -> Result<Sample64> {
    let file = std::fs::File::open(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    parse_z_scores(file)
}

pub fn parse_z_scores(reader: impl std::io::Read) -> Result<Sample64> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut values = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        let line = record.position().map_or(i as u64 + 1, |p| p.line());
        if record.len() != 1 {
            return Err(Error::InvalidInput(format!(
                "line {line}: expected one column, found {}",
                record.len()
            )));
        }
        let field = &record[0];
        if i == 0 && field.eq_ignore_ascii_case("z") {
            continue;
        }
        let x: f64 = field
            .parse()
            .map_err(|_| Error::InvalidInput(format!("line {line}: cannot parse {field:?} as a number")))?;
        if !x.is_finite() {
            return Err(Error::InvalidInput(format!("line {line}: value {field:?} is not finite")));
        }
        values.push(x);
    }
    if values.is_empty() {
        return Err(Error::InvalidInput("input contains no z-scores".into()));
    }
    Sample64::new(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_is_optional() {
        let a = parse_z_scores("z\n1.5\n-0.25\n".as_bytes()).unwrap();
        let b = parse_z_scores("1.5\n-0.25".as_bytes()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.values(), [1.5, -0.25]);
    }

    #[test]
    fn errors_name_the_line() {
        let e = parse_z_scores("z\n0.1\nabc\n".as_bytes()).unwrap_err().to_string();
        assert!(e.contains("line 3"), "{e}");
        let e = parse_z_scores("0.1\n0.2,0.3\n".as_bytes()).unwrap_err().to_string();
        assert!(e.contains("line 2"), "{e}");
        let e = parse_z_scores("1\nNaN\n".as_bytes()).unwrap_err().to_string();
        assert!(e.contains("line 2"), "{e}");
    }

    #[test]
    fn empty_inputs_are_rejected() {
        assert!(parse_z_scores("".as_bytes()).is_err());
        assert!(parse_z_scores("z\n".as_bytes()).is_err());
    }
}
