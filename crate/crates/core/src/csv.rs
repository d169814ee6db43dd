//! Number formatting shared by every CSV the crate emits.

/// Shortest representation that parses back to the same `f64`, with a
/// `.` decimal separator regardless of locale.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

#[cfg(test)]
mod tests {
    use super::fmt_f64;

    #[test]
    fn round_trips() {
        for x in [0.0, 1.0, -2.5, 1e-20, 6.02214076e23, std::f64::consts::PI, 0.1 + 0.2] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_f64(1.0), "1.0");
    }
}
