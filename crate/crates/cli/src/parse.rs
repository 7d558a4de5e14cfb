//! Input parsing: complex numbers in `a+bi` form and lattice pairs.

use num_complex::Complex64;

/// Parse `a+bi` with optional whitespace. Accepts pure reals (`1.5`), pure
/// imaginaries (`i`, `-2i`, `0.5i`) and exponent notation (`1e-3+2.5e-1i`).
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err("empty complex literal".to_string());
    }
    if !compact.ends_with('i') && !compact.ends_with('I') {
        return compact
            .parse::<f64>()
            .map(|re| Complex64::new(re, 0.0))
            .map_err(|_| format!("cannot parse '{s}' as a real number"));
    }
    let body = &compact[..compact.len() - 1];
    // Split at the last sign that is neither leading nor part of an exponent.
    let bytes = body.as_bytes();
    let mut split = None;
    for k in (1..bytes.len()).rev() {
        let c = bytes[k] as char;
        if (c == '+' || c == '-') && !matches!(bytes[k - 1] as char, 'e' | 'E') {
            split = Some(k);
            break;
        }
    }
    let (re_str, im_str) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("", body),
    };
    let re = if re_str.is_empty() {
        0.0
    } else {
        re_str
            .parse::<f64>()
            .map_err(|_| format!("cannot parse real part of '{s}'"))?
    };
    let im = match im_str {
        "" | "+" => 1.0,
        "-" => -1.0,
        _ => im_str
            .parse::<f64>()
            .map_err(|_| format!("cannot parse imaginary part of '{s}'"))?,
    };
    Ok(Complex64::new(re, im))
}

/// Parse a lattice pair `omega1,omega2`.
pub fn parse_lattice(s: &str) -> Result<(Complex64, Complex64), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("lattice must be 'omega1,omega2', got '{s}'"));
    }
    Ok((parse_complex(parts[0])?, parse_complex(parts[1])?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        assert_eq!(parse_complex("i").unwrap(), Complex64::new(0.0, 1.0));
        assert_eq!(parse_complex("-i").unwrap(), Complex64::new(0.0, -1.0));
        assert_eq!(parse_complex("2i").unwrap(), Complex64::new(0.0, 2.0));
        assert_eq!(parse_complex("1.5").unwrap(), Complex64::new(1.5, 0.0));
        assert_eq!(parse_complex("1+2i").unwrap(), Complex64::new(1.0, 2.0));
        assert_eq!(parse_complex("0.5 - 0.8i").unwrap(), Complex64::new(0.5, -0.8));
        assert_eq!(parse_complex("1e-3+2.5e-1i").unwrap(), Complex64::new(1e-3, 0.25));
        assert_eq!(parse_complex("-1.5-2i").unwrap(), Complex64::new(-1.5, -2.0));
        assert!(parse_complex("pi").is_err());
        assert!(parse_complex("").is_err());
    }

    #[test]
    fn lattice_pairs() {
        let (a, b) = parse_lattice("i,1").unwrap();
        assert_eq!(a, Complex64::new(0.0, 1.0));
        assert_eq!(b, Complex64::new(1.0, 0.0));
        assert!(parse_lattice("i").is_err());
    }
}
