//! Minimal CSV emission with a fixed float format.

use std::fs;
use std::path::Path;

use crate::error::Result;

/// A row type with a fixed column order.
pub trait CsvRecord {
    fn header() -> &'static [&'static str];
    fn fields(&self) -> Vec<String>;
}

/// Six significant digits, trailing zeros dropped; scientific notation
/// outside `[1e-5, 1e6)`.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..6).contains(&exp) {
        trim_zeros(format!("{x:.*}", (5 - exp) as usize))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn opt_float(x: Option<f64>) -> String {
    x.map(format_float).unwrap_or_default()
}

pub fn opt_int<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn escape(field: &str) -> String {
    if field.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

fn join(fields: impl IntoIterator<Item = String>) -> String {
    let mut line = fields
        .into_iter()
        .map(|f| escape(&f))
        .collect::<Vec<_>>()
        .join(",");
    line.push('\n');
    line
}

pub fn to_csv_string<R: CsvRecord>(records: &[R]) -> String {
    let mut out = join(R::header().iter().map(|h| h.to_string()));
    for r in records {
        out.push_str(&join(r.fields()));
    }
    out
}

pub fn write_csv<R: CsvRecord>(records: &[R], path: &Path) -> Result<()> {
    fs::write(path, to_csv_string(records))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Row(f64, &'static str);

    impl CsvRecord for Row {
        fn header() -> &'static [&'static str] {
            &["x", "label"]
        }
        fn fields(&self) -> Vec<String> {
            vec![format_float(self.0), self.1.to_string()]
        }
    }

    #[test]
    fn floats() {
        let cases = [
            (0.0, "0"),
            (0.3, "0.3"),
            (19.371_431_2, "19.3714"),
            (2.0, "2"),
            (-1.5, "-1.5"),
            (1e-7, "1e-7"),
            (123_456_789.0, "1.23457e8"),
            (999_999.6, "1e6"),
            (0.000_123_456_78, "0.000123457"),
            (f64::NAN, "nan"),
        ];
        for (x, want) in cases {
            assert_eq!(format_float(x), want, "{x}");
        }
    }

    #[test]
    fn header_only_and_one_row() {
        assert_eq!(to_csv_string::<Row>(&[]), "x,label\n");
        let s = to_csv_string(&[Row(0.5, "a,b")]);
        assert_eq!(s, "x,label\n0.5,\"a,b\"\n");
        assert_eq!(s.lines().count(), 2);
    }

    #[test]
    fn writes_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rows.csv");
        write_csv(&[Row(1.0, "z")], &path).unwrap();
        assert_eq!(fs::read_to_string(path).unwrap(), "x,label\n1,z\n");
    }
}
