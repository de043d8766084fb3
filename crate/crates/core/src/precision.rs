//! Extended-precision scalars and the handful of special functions the
//! quadrature engine needs.
//!
//! Every value is an MPFR float whose precision is fixed by a
//! [`PrecisionContext`]: arithmetic runs at `digits + guard` decimal digits,
//! results are reported at `digits`.

use gmp_mpfr_sys::mpfr;
use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Integer};

use crate::error::{Error, Result};

/// Arbitrary-precision real used throughout the crate.
pub type ExtReal = Float;

/// Smallest accepted reporting precision.
pub const MIN_DIGITS: u32 = 10;

thread_local! {
    static WIDE_EXPONENTS: () = {
        // SAFETY: both bounds come from MPFR itself and are always accepted.
        unsafe {
            mpfr::set_emax(mpfr::get_emax_max());
            mpfr::set_emin(mpfr::get_emin_min());
        }
    };
}

/// MPFR's default exponent range is ±2^30 bits; open it to the widest the
/// build supports (±2^62 on 64-bit targets). The range is per thread.
fn widen_exponent_range() {
    WIDE_EXPONENTS.with(|_| ());
}

/// Working decimal precision plus guard digits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrecisionContext {
    digits: u32,
    guard: u32,
}

impl PrecisionContext {
    pub const DEFAULT_GUARD: u32 = 20;

    pub fn new(digits: u32) -> Result<Self> {
        Self::with_guard(digits, Self::DEFAULT_GUARD)
    }

    pub fn with_guard(digits: u32, guard: u32) -> Result<Self> {
        if digits < MIN_DIGITS {
            return Err(Error::Domain(format!(
                "digits must be at least {MIN_DIGITS}, got {digits}"
            )));
        }
        widen_exponent_range();
        Ok(Self { digits, guard })
    }

    /// Reported decimal digits.
    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn guard(&self) -> u32 {
        self.guard
    }

    /// Decimal digits carried internally.
    pub fn working_digits(&self) -> u32 {
        self.digits + self.guard
    }

    /// Binary precision matching `working_digits`.
    pub fn bits(&self) -> u32 {
        widen_exponent_range();
        // log2(10) = 3.3219..., plus a few bits so that `working_digits`
        // decimal digits always survive a round trip.
        ((self.working_digits() as f64) * std::f64::consts::LOG2_10).ceil() as u32 + 4
    }

    /// Same reporting precision, different guard.
    pub fn regarded(&self, guard: u32) -> Self {
        Self {
            digits: self.digits,
            guard,
        }
    }

    pub fn zero(&self) -> ExtReal {
        Float::new(self.bits())
    }

    pub fn one(&self) -> ExtReal {
        self.int(1)
    }

    pub fn int(&self, v: i64) -> ExtReal {
        Float::with_val(self.bits(), v)
    }

    /// Converts an existing value to this context's precision.
    pub fn lift<T>(&self, v: T) -> ExtReal
    where
        Float: rug::Assign<T>,
    {
        Float::with_val(self.bits(), v)
    }

    /// Parses a decimal string (`"-1.25"`, `"3e-7"`, ...) at working precision.
    pub fn parse(&self, s: &str) -> Result<ExtReal> {
        let t = s.trim();
        if !is_decimal_literal(t) {
            return Err(Error::Parse(format!("not a decimal number: {s:?}")));
        }
        let parsed = Float::parse(t).map_err(|e| Error::Parse(format!("{s:?}: {e}")))?;
        Ok(Float::with_val(self.bits(), parsed))
    }

    /// `10^e` at working precision.
    pub fn pow10(&self, e: i64) -> ExtReal {
        let ten = self.int(10);
        ten.pow(e as i32)
    }

    /// `10^(-digits + shift)`, the tolerance scale used by every certificate.
    pub fn tol(&self, shift: i64) -> ExtReal {
        self.pow10(-(self.digits as i64) + shift)
    }

    /// `10^(-(digits + guard) + shift)`, relative to working precision.
    pub fn working_tol(&self, shift: i64) -> ExtReal {
        self.pow10(-(self.working_digits() as i64) + shift)
    }

    pub fn pi(&self) -> ExtReal {
        Float::with_val(self.bits(), Constant::Pi)
    }

    /// Canonical decimal serialization with `digits` significant digits.
    pub fn format(&self, v: &ExtReal) -> String {
        format_sci(v, self.digits as usize)
    }
}

/// Scientific decimal string `[-]d.ddd…e<exp>` with `sig` significant digits.
///
/// Zero is written `0.000…e0`. Non-finite values are written as MPFR prints them.
pub fn format_sci(v: &ExtReal, sig: usize) -> String {
    let sig = sig.max(1);
    if v.is_zero() {
        let mut s = String::from("0");
        if sig > 1 {
            s.push('.');
            s.extend(std::iter::repeat_n('0', sig - 1));
        }
        s.push_str("e0");
        return s;
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let (neg, mantissa, exp) = v.to_sign_string_exp(10, Some(sig));
    // `mantissa` is the digit string of 0.ddd × 10^exp
    let exp = exp.unwrap_or(0) - 1;
    let mut s = String::with_capacity(sig + 8);
    if neg {
        s.push('-');
    }
    s.push_str(&mantissa[..1]);
    if mantissa.len() > 1 {
        s.push('.');
        s.push_str(&mantissa[1..]);
    }
    s.push('e');
    s.push_str(&exp.to_string());
    s
}

/// Fixed-point decimal string with exactly `frac` digits after the point,
/// rounded to nearest, ties away from zero.
pub fn format_fixed(v: &ExtReal, frac: usize) -> String {
    let scale = Integer::from(Integer::u_pow_u(10, frac as u32));
    let scaled = Float::with_val(v.prec() + 64, v * &scale);
    let rounded = scaled
        .round()
        .to_integer()
        .unwrap_or_else(|| Integer::from(0));
    let neg = rounded < 0;
    let digits = rounded.abs().to_string();
    let digits = if digits.len() <= frac {
        format!("{}{}", "0".repeat(frac + 1 - digits.len()), digits)
    } else {
        digits
    };
    let (int_part, frac_part) = digits.split_at(digits.len() - frac);
    let mut s = String::new();
    if neg {
        s.push('-');
    }
    s.push_str(int_part);
    if frac > 0 {
        s.push('.');
        s.push_str(frac_part);
    }
    s
}

/// Accepts `[+-]digits[.digits][(e|E)[+-]digits]` with at least one mantissa digit.
pub fn is_decimal_literal(s: &str) -> bool {
    let b = s.as_bytes();
    let mut i = 0;
    if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
        i += 1;
    }
    let mut mantissa_digits = 0;
    while i < b.len() && b[i].is_ascii_digit() {
        i += 1;
        mantissa_digits += 1;
    }
    if i < b.len() && b[i] == b'.' {
        i += 1;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
            mantissa_digits += 1;
        }
    }
    if mantissa_digits == 0 {
        return false;
    }
    if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
        i += 1;
        if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
            i += 1;
        }
        let start = i;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        if i == start {
            return false;
        }
    }
    i == b.len()
}

/// Γ(x) for x > 0.
///
/// Positive integers return the factorial exactly, widening the precision when
/// working precision cannot hold it. Half-integers use `(2k)!/(4^k k!)·√π`;
/// everything else goes through MPFR's gamma at working precision.
pub fn gamma(x: &ExtReal, ctx: &PrecisionContext) -> Result<ExtReal> {
    if x.is_nan() || *x <= 0 {
        return Err(Error::Domain(format!(
            "gamma requires a positive argument, got {}",
            format_sci(x, 20)
        )));
    }
    let bits = ctx.bits();
    if x.is_integer() {
        if let Some(n) = x.to_u32_saturating() {
            if n < 100_000 {
                let f = Integer::from(Integer::factorial(n - 1));
                let prec = bits.max(f.significant_bits());
                return Ok(Float::with_val(prec, f));
            }
        }
    }
    let twice = Float::with_val(bits, x * 2u32);
    if twice.is_integer() {
        if let Some(m) = twice.to_u32_saturating() {
            // x = k + 1/2  ⇒  Γ(x) = (2k)! / (4^k k!) · √π
            if m < 200_000 {
                let k = (m - 1) / 2;
                let num = Integer::from(Integer::factorial(2 * k));
                let den =
                    Integer::from(Integer::u_pow_u(4, k)) * Integer::from(Integer::factorial(k));
                let sqrt_pi = ctx.pi().sqrt();
                let mut g = Float::with_val(bits, &num);
                g /= Float::with_val(bits, &den);
                return Ok(g * sqrt_pi);
            }
        }
    }
    Ok(Float::with_val(bits, x).gamma())
}

/// e^{-x}
pub fn exp_neg(x: &ExtReal, ctx: &PrecisionContext) -> ExtReal {
    let mut v = Float::with_val(ctx.bits(), x);
    v = -v;
    v.exp()
}

/// cos(x)
pub fn cos_fn(x: &ExtReal, ctx: &PrecisionContext) -> ExtReal {
    Float::with_val(ctx.bits(), x).cos()
}

/// Number of leading agreeing decimal digits, capped at `cap`: `-log10(|a-b|/|b|)`.
pub fn agreeing_digits(a: &ExtReal, b: &ExtReal, cap: f64) -> f64 {
    let diff = Float::with_val(a.prec().max(b.prec()), a - b).abs();
    if diff.is_zero() {
        return cap;
    }
    let scale = if b.is_zero() {
        Float::with_val(a.prec(), 1)
    } else {
        Float::with_val(b.prec(), b.abs_ref())
    };
    let rel = diff / scale;
    (-rel.log10().to_f64()).min(cap)
}

/// |a - b| / max(|b|, tiny) at the precision of the inputs.
pub fn rel_err(a: &ExtReal, b: &ExtReal) -> ExtReal {
    let prec = a.prec().max(b.prec());
    let diff = Float::with_val(prec, a - b).abs();
    if b.is_zero() {
        return diff;
    }
    diff / Float::with_val(prec, b.abs_ref())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(d: u32) -> PrecisionContext {
        PrecisionContext::new(d).unwrap()
    }

    #[test]
    fn rejects_low_digits() {
        assert!(PrecisionContext::new(9).is_err());
        assert!(PrecisionContext::new(10).is_ok());
    }

    #[test]
    fn gamma_small_values() {
        let c = ctx(20);
        assert_eq!(
            c.format(&gamma(&c.int(1), &c).unwrap()),
            "1.0000000000000000000e0"
        );
        assert_eq!(
            c.format(&gamma(&c.int(3), &c).unwrap()),
            "2.0000000000000000000e0"
        );
        let half = c.parse("0.5").unwrap();
        assert_eq!(
            format_fixed(&gamma(&half, &c).unwrap(), 20),
            "1.77245385090551602730"
        );
    }

    #[test]
    fn gamma_half_integer_matches_mpfr() {
        let c = ctx(60);
        for s in ["1.5", "2.5", "7.5", "30.5"] {
            let x = c.parse(s).unwrap();
            let fast = gamma(&x, &c).unwrap();
            let slow = Float::with_val(c.bits(), &x).gamma();
            assert!(rel_err(&fast, &slow) < c.tol(0), "{s}");
        }
    }

    #[test]
    fn gamma_domain_error() {
        let c = ctx(20);
        assert!(matches!(gamma(&c.int(0), &c), Err(Error::Domain(_))));
        assert!(matches!(
            gamma(&c.parse("-2.5").unwrap(), &c),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn elementary_functions() {
        let c = ctx(20);
        assert_eq!(c.format(&exp_neg(&c.zero(), &c)), "1.0000000000000000000e0");
        assert_eq!(c.format(&cos_fn(&c.zero(), &c)), "1.0000000000000000000e0");
        assert_eq!(
            format_fixed(&exp_neg(&c.one(), &c), 20),
            "0.36787944117144232160"
        );
    }

    #[test]
    fn sci_format_shapes() {
        let c = ctx(10);
        assert_eq!(c.format(&c.int(4)), "4.000000000e0");
        assert_eq!(c.format(&c.zero()), "0.000000000e0");
        assert_eq!(c.format(&c.parse("-0.375").unwrap()), "-3.750000000e-1");
        assert_eq!(c.format(&c.parse("123456").unwrap()), "1.234560000e5");
    }

    #[test]
    fn fixed_format_rounding() {
        let c = ctx(20);
        assert_eq!(format_fixed(&c.parse("0.125").unwrap(), 2), "0.13");
        assert_eq!(format_fixed(&c.parse("-2.5e-3").unwrap(), 4), "-0.0025");
        assert_eq!(
            format_fixed(&c.parse("485.084405640258073488").unwrap(), 3),
            "485.084"
        );
        assert_eq!(format_fixed(&c.int(7), 0), "7");
    }

    #[test]
    fn decimal_literals() {
        for ok in ["1", "-1.5", "+.5", "3.", "2e10", "2.5E-3"] {
            assert!(is_decimal_literal(ok), "{ok}");
        }
        for bad in ["", "-", ".", "e5", "1e", "1.2.3", "0x10", "nan", "1 "] {
            assert!(!is_decimal_literal(bad), "{bad}");
        }
        assert!(ctx(10).parse("abc").is_err());
    }
}
