//! Number formatting: every float is printed with 12 significant digits.

use num_complex::Complex64;

pub const SIGNIFICANT: usize = 12;

/// Shortest of fixed or scientific notation carrying [`SIGNIFICANT`]
/// significant digits, with trailing zeros removed.
pub fn sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", SIGNIFICANT - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..SIGNIFICANT as i32).contains(&exp) {
        let decimals = (SIGNIFICANT as i32 - 1 - exp).max(0) as usize;
        trim(&format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}", trim(mantissa), exp)
    }
}

fn trim(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// `x` rounded to [`SIGNIFICANT`] digits, for JSON output.
pub fn round(x: f64) -> f64 {
    sig(x).parse().unwrap_or(x)
}

pub fn complex(z: Complex64) -> String {
    let sign = if z.im < 0.0 { '-' } else { '+' };
    format!("{} {sign} {}i", sig(z.re), sig(z.im.abs()))
}

/// `[re, im]` rounded for JSON output.
pub fn complex_pair(z: Complex64) -> [f64; 2] {
    [round(z.re), round(z.im)]
}
