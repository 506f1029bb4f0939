//! Exact decimals with two fractional digits.

use core::fmt;
use core::str::FromStr;

/// A decimal number stored as an integer count of hundredths.
///
/// Workloads, desired workloads and the real-valued GC parameters all use
/// this representation so comparisons in the evaluator and the encoders are
/// exact integer arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Fixed(i64);

pub const SCALE: i64 = 100;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FixedParseError {
    #[error("empty decimal")]
    Empty,
    #[error("invalid decimal digit in {0:?}")]
    InvalidDigit(alloc::string::String),
    #[error("more than two fractional digits in {0:?}")]
    TooPrecise(alloc::string::String),
    #[error("decimal out of range: {0:?}")]
    Overflow(alloc::string::String),
}

impl Fixed {
    pub const ZERO: Fixed = Fixed(0);
    pub const ONE: Fixed = Fixed(SCALE);

    pub const fn from_hundredths(h: i64) -> Self {
        Fixed(h)
    }

    pub const fn from_int(v: i64) -> Self {
        Fixed(v * SCALE)
    }

    pub const fn hundredths(self) -> i64 {
        self.0
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / SCALE as f64
    }
}

impl core::ops::Add for Fixed {
    type Output = Fixed;
    fn add(self, rhs: Fixed) -> Fixed {
        Fixed(self.0 + rhs.0)
    }
}

impl core::iter::Sum for Fixed {
    fn sum<I: Iterator<Item = Fixed>>(iter: I) -> Fixed {
        iter.fold(Fixed::ZERO, |a, b| a + b)
    }
}

impl FromStr for Fixed {
    type Err = FixedParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        use alloc::string::ToString;
        let t = s.trim();
        if t.is_empty() {
            return Err(FixedParseError::Empty);
        }
        let (neg, body) = match t.as_bytes()[0] {
            b'-' => (true, &t[1..]),
            b'+' => (false, &t[1..]),
            _ => (false, t),
        };
        let (int_part, frac_part) = match body.split_once('.') {
            Some((i, f)) => (i, f),
            None => (body, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(FixedParseError::InvalidDigit(s.to_string()));
        }
        let all_digits = |p: &str| p.bytes().all(|b| b.is_ascii_digit());
        if !all_digits(int_part) || !all_digits(frac_part) {
            return Err(FixedParseError::InvalidDigit(s.to_string()));
        }
        // trailing zeros beyond two digits are harmless ("0.500")
        let frac_trimmed = frac_part.trim_end_matches('0');
        if frac_trimmed.len() > 2 {
            return Err(FixedParseError::TooPrecise(s.to_string()));
        }
        let overflow = || FixedParseError::Overflow(s.to_string());
        let mut value: i64 = 0;
        for b in int_part.bytes() {
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add(i64::from(b - b'0')))
                .ok_or_else(overflow)?;
        }
        value = value.checked_mul(SCALE).ok_or_else(overflow)?;
        let mut frac = 0i64;
        for (k, b) in frac_trimmed.bytes().enumerate() {
            frac += i64::from(b - b'0') * if k == 0 { 10 } else { 1 };
        }
        value = value.checked_add(frac).ok_or_else(overflow)?;
        Ok(Fixed(if neg { -value } else { value }))
    }
}

impl fmt::Display for Fixed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let abs = self.0.unsigned_abs();
        let int = abs / SCALE as u64;
        let frac = abs % SCALE as u64;
        if frac == 0 {
            write!(f, "{sign}{int}")
        } else if frac % 10 == 0 {
            write!(f, "{sign}{int}.{}", frac / 10)
        } else {
            write!(f, "{sign}{int}.{frac:02}")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn parses_paper_style_values() {
        assert_eq!("9".parse::<Fixed>().unwrap(), Fixed::from_hundredths(900));
        assert_eq!("0.3".parse::<Fixed>().unwrap(), Fixed::from_hundredths(30));
        assert_eq!("7.5".parse::<Fixed>().unwrap(), Fixed::from_hundredths(750));
        assert_eq!("0.500".parse::<Fixed>().unwrap(), Fixed::from_hundredths(50));
        assert_eq!("-1.25".parse::<Fixed>().unwrap(), Fixed::from_hundredths(-125));
        assert_eq!(".5".parse::<Fixed>().unwrap(), Fixed::from_hundredths(50));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!("".parse::<Fixed>(), Err(FixedParseError::Empty)));
        assert!(matches!("1.234".parse::<Fixed>(), Err(FixedParseError::TooPrecise(_))));
        assert!(matches!("1e3".parse::<Fixed>(), Err(FixedParseError::InvalidDigit(_))));
        assert!(matches!(".".parse::<Fixed>(), Err(FixedParseError::InvalidDigit(_))));
        assert!("99999999999999999999".parse::<Fixed>().is_err());
    }

    #[test]
    fn display_is_canonical() {
        assert_eq!(Fixed::from_hundredths(900).to_string(), "9");
        assert_eq!(Fixed::from_hundredths(750).to_string(), "7.5");
        assert_eq!(Fixed::from_hundredths(5).to_string(), "0.05");
        assert_eq!(Fixed::from_hundredths(-30).to_string(), "-0.3");
    }

    proptest::proptest! {
        #[test]
        fn display_parse_roundtrip(h in -10_000_000i64..10_000_000) {
            let f = Fixed::from_hundredths(h);
            proptest::prop_assert_eq!(f.to_string().parse::<Fixed>().unwrap(), f);
        }
    }
}
