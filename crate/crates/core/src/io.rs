//! Plain-text table helpers shared by the export formats.

use std::fmt::Write as _;

use num_complex::Complex64;

/// Format with 17 significant digits, enough for a bit-exact round trip.
pub fn fmt_f64(value: f64) -> String {
    format!("{value:.16e}")
}

/// Comma-separated row of floats.
pub fn csv_row(values: &[f64]) -> String {
    let mut row = String::with_capacity(24 * values.len());
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            row.push(',');
        }
        row.push_str(&fmt_f64(*v));
    }
    row
}

/// `<x>,re,im,power` table for a complex series, with `#`-prefixed header
/// lines taken from `header`.
pub fn complex_table(header: &[String], x_label: &str, xs: &[f64], values: &[Complex64]) -> String {
    let mut out = String::with_capacity(96 * values.len());
    for h in header {
        let _ = writeln!(out, "# {h}");
    }
    let _ = writeln!(out, "{x_label},re,im,power");
    for (x, v) in xs.iter().zip(values) {
        let _ = writeln!(out, "{}", csv_row(&[*x, v.re, v.im, v.norm_sqr()]));
    }
    out
}
