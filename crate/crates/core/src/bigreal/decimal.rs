//! Decimal text at the I/O boundary.

use super::dyadic::Dyadic;
use super::{BigRealError, Result};
use rug::Integer;

/// A validated decimal literal: `sign * digits / 10^frac_len`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct DecimalLiteral {
    pub negative: bool,
    pub digits: Integer,
    pub frac_len: u32,
    pub total_len: u32,
}

/// Strips typographic noise from a constant: whitespace, backslash line
/// continuations and a trailing ellipsis (`...` or `…`).
pub fn clean_decimal_text(text: &str) -> String {
    let mut s: String = text
        .chars()
        .filter(|c| !c.is_whitespace() && *c != '\\')
        .collect();
    for tail in ["...", "…"] {
        if let Some(stripped) = s.strip_suffix(tail) {
            s = stripped.to_string();
        }
    }
    s
}

pub(crate) fn parse_literal(text: &str) -> Result<DecimalLiteral> {
    let cleaned = clean_decimal_text(text);
    let err = |reason| BigRealError::Parse {
        text: truncate_for_error(text),
        reason,
    };
    let (negative, body) = match cleaned.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, cleaned.strip_prefix('+').unwrap_or(&cleaned)),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err("no digits"));
    }
    if !int_part.bytes().all(|b| b.is_ascii_digit()) || !frac_part.bytes().all(|b| b.is_ascii_digit())
    {
        return Err(err("unexpected character"));
    }
    let all: String = [int_part, frac_part].concat();
    let digits: Integer = if all.is_empty() {
        Integer::new()
    } else {
        all.parse().map_err(|_| err("unparsable digits"))?
    };
    Ok(DecimalLiteral {
        negative,
        digits,
        frac_len: frac_part.len() as u32,
        total_len: all.trim_start_matches('0').len().max(1) as u32,
    })
}

fn truncate_for_error(text: &str) -> String {
    if text.chars().count() > 40 {
        let head: String = text.chars().take(37).collect();
        format!("{head}...")
    } else {
        text.to_string()
    }
}

/// `x` rounded to nearest with `frac_digits` decimals (ties away from zero).
pub fn format_fixed(x: &Dyadic, frac_digits: u32) -> String {
    let scale = Integer::from(Integer::u_pow_u(10, frac_digits));
    let negative = x.signum().is_lt();
    let mag = if negative { x.neg() } else { x.clone() };
    // round(|x| * 10^f) = floor(|x| * 10^f * 2 + 1) / 2
    let scaled = mag.mul_exact(&Dyadic::from_integer(scale));
    let twice_plus_one = scaled.mul_pow2(1).add_exact(&Dyadic::from(1));
    let rounded: Integer = twice_plus_one.floor() >> 1u32;
    let mut s = rounded.to_string();
    if frac_digits > 0 {
        let f = frac_digits as usize;
        if s.len() <= f {
            s = format!("{}{}", "0".repeat(f + 1 - s.len()), s);
        }
        s.insert(s.len() - f, '.');
    }
    if negative && rounded != 0 {
        s.insert(0, '-');
    }
    s
}

/// Number of decimal digits in `|n|` (1 for zero).
pub(crate) fn decimal_digits(n: &Integer) -> usize {
    if *n == 0 {
        return 1;
    }
    let approx = n.significant_bits() as f64 * std::f64::consts::LOG10_2;
    let guess = approx.floor() as u32;
    let abs = Integer::from(n.abs_ref());
    let mut d = guess.max(1);
    while Integer::from(Integer::u_pow_u(10, d)) <= abs {
        d += 1;
    }
    while d > 1 && Integer::from(Integer::u_pow_u(10, d - 1)) > abs {
        d -= 1;
    }
    d as usize
}

pub(crate) fn pow10(k: u32) -> Integer {
    Integer::from(Integer::u_pow_u(10, k))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cleans_continuations() {
        assert_eq!(clean_decimal_text("43. 80\\\n46 ..."), "43.8046");
        assert_eq!(clean_decimal_text("1.9287800…"), "1.9287800");
    }

    #[test]
    fn literal_fields() {
        let l = parse_literal("-0.0250").unwrap();
        assert!(l.negative);
        assert_eq!(l.digits, 250);
        assert_eq!(l.frac_len, 4);
        assert!(parse_literal("1.2.3").is_err());
        assert!(parse_literal("").is_err());
        assert!(parse_literal("12a").is_err());
        assert_eq!(parse_literal("7").unwrap().frac_len, 0);
    }

    #[test]
    fn fixed_formatting_rounds_to_nearest() {
        let x = Dyadic::new(Integer::from(11), -3); // 1.375
        assert_eq!(format_fixed(&x, 2), "1.38");
        assert_eq!(format_fixed(&x, 0), "1");
        assert_eq!(format_fixed(&x.neg(), 1), "-1.4");
        assert_eq!(format_fixed(&Dyadic::new(Integer::from(1), -4), 2), "0.06");
    }

    #[test]
    fn digit_counts() {
        assert_eq!(decimal_digits(&Integer::from(0)), 1);
        assert_eq!(decimal_digits(&Integer::from(999)), 3);
        assert_eq!(decimal_digits(&Integer::from(1000)), 4);
        assert_eq!(decimal_digits(&pow10(761)), 762);
    }
}
