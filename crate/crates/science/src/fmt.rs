//! Repeatable rendering of numbers in report blocks.

/// Shortest decimal string that round-trips to `value`, always carrying a
/// fractional part (`30` renders as `30.0`).
pub fn real(value: f64) -> String {
    let s = format!("{value}");
    if value.is_finite() && !s.contains(['.', 'e', 'E']) {
        format!("{s}.0")
    } else {
        s
    }
}

/// `"lo to hi"` range text used by the primer report.
pub fn range(lo: &str, hi: &str) -> String {
    format!("{lo} to {hi}")
}
