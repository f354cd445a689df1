//! Fixed-precision number formatting for CSV and console output.

/// Formats `v` with six significant digits, keeping trailing zeros
/// (`1.00000`, `0.951500`, `1.23457e-7`). Fixed notation is used for
/// decimal exponents in `-5..6`, scientific otherwise.
pub fn sig6(v: f64) -> String {
    if !v.is_finite() {
        return format!("{v}");
    }
    if v == 0.0 {
        return "0.00000".to_string();
    }
    // Round first so a carry (9.999996 -> 10.0000) lands in the exponent.
    let sci = format!("{v:.5e}");
    let exp: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    if (-5..6).contains(&exp) {
        let decimals = (5 - exp) as usize;
        format!("{v:.decimals$}")
    } else {
        sci
    }
}
