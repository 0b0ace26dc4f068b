//! Plain-text number formatting shared by the CSV writers.

/// Shortest decimal that round-trips to the same `f64`, in exponent form
/// outside `[1e-4, 1e15)`.
pub fn format_float(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let a = x.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}
