//! Locale-free decimal output with 17 significant digits, enough to round-trip any
//! double. Trailing zeros are dropped; magnitudes outside `[1e-5, 1e17)` switch to
//! scientific notation.

pub fn format(v: f64) -> String {
    if v.is_nan() {
        return "NaN".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf" } else { "-inf" }.into();
    }
    if v == 0.0 {
        return if v.is_sign_negative() { "-0.0" } else { "0.0" }.into();
    }
    let sci = format!("{:.16e}", v.abs());
    let (mantissa, exp) = sci.split_once('e').expect("exponent in {:e} output");
    let exp: i32 = exp.parse().expect("integer exponent");
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    let sign = if v < 0.0 { "-" } else { "" };

    if (-5..17).contains(&exp) {
        let (int, frac) = if exp >= 0 {
            let split = exp as usize + 1;
            (digits[..split].to_string(), digits[split..].to_string())
        } else {
            ("0".to_string(), "0".repeat((-exp - 1) as usize) + &digits)
        };
        format!("{sign}{int}.{}", trim(&frac))
    } else {
        format!("{sign}{}.{}e{exp}", &digits[..1], trim(&digits[1..]))
    }
}

fn trim(frac: &str) -> &str {
    let t = frac.trim_end_matches('0');
    if t.is_empty() {
        "0"
    } else {
        t
    }
}

#[cfg(test)]
mod tests {
    use super::format;

    #[test]
    fn positional() {
        assert_eq!(format(1.0), "1.0");
        assert_eq!(format(0.5), "0.5");
        assert_eq!(format(0.2), "0.20000000000000001");
        assert_eq!(format(128.0), "128.0");
        assert_eq!(format(-2.25), "-2.25");
        assert_eq!(format(1.5e-5), "0.000015");
        assert_eq!(format(0.0), "0.0");
    }

    #[test]
    fn scientific() {
        assert_eq!(format(1e-300), "1.0e-300");
        assert_eq!(format(-2.5e-300), "-2.5e-300");
        assert_eq!(format(1.0 / 3.0 * 1e-10), "3.3333333333333335e-11");
        assert_eq!(format(1e17), "1.0e17");
    }

    #[test]
    fn round_trips() {
        for v in [0.1, 1.0 / 3.0, 2.0f64.sqrt(), 1e-7 / 3.0, 123456.789, 5e-324, f64::MAX] {
            assert_eq!(format(v).parse::<f64>().unwrap(), v);
        }
    }
}
