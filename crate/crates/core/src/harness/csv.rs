//! Deterministic CSV formatting: header row, comma separators, decimal dot,
//! floats at 10 significant digits in scientific form. Byte-identical output
//! for identical inputs is part of the contract.

/// 10 significant digits, scientific notation, locale-independent.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    format!("{x:.9e}")
}

pub fn fmt_opt_f64(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

pub fn fmt_opt_usize(x: Option<usize>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}
