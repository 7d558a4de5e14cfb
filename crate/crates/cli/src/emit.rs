//! Deterministic text output: floats fixed to 17 significant digits so that
//! identical configurations produce byte-identical JSON and CSV.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

/// 17 significant digits in exponent form; valid as a JSON number.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn json_field_f64(key: &str, x: f64) -> String {
    format!("\"{key}\": {}", fmt_f64(x))
}

pub fn json_field_str(key: &str, s: &str) -> String {
    let escaped: String = s
        .chars()
        .flat_map(|c| match c {
            '"' => vec!['\\', '"'],
            '\\' => vec!['\\', '\\'],
            c => vec![c],
        })
        .collect();
    format!("\"{key}\": \"{escaped}\"")
}

pub fn json_object(fields: &[String]) -> String {
    format!("{{{}}}", fields.join(", "))
}

/// Write to the given path, or stdout when absent.
pub fn write_output(out: Option<&Path>, content: &str) -> io::Result<()> {
    match out {
        Some(path) => fs::write(path, content),
        None => io::stdout().write_all(content.as_bytes()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_f64(-0.5), "-5.0000000000000000e-1");
        let s = fmt_f64(std::f64::consts::PI);
        assert!(s.starts_with("3.14159265358979"));
    }

    #[test]
    fn json_escaping() {
        assert_eq!(json_field_str("k", "a\"b"), "\"k\": \"a\\\"b\"");
    }
}
