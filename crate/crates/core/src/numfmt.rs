//! Fixed-precision number formatting shared by the JSON and CSV outputs.

/// Significant digits kept in serialized results.
pub const SIGNIFICANT_DIGITS: usize = 12;

/// Rounds `x` to `digits` significant decimal digits.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", digits.saturating_sub(1), x)
        .parse()
        .expect("formatted float parses")
}

/// `x` rounded to [`SIGNIFICANT_DIGITS`] digits, printed in shortest form.
pub fn format_sig(x: f64) -> String {
    let rounded = round_sig(x, SIGNIFICANT_DIGITS);
    // Avoid "-0" in fixtures.
    if rounded == 0.0 {
        return "0".to_string();
    }
    rounded.to_string()
}
