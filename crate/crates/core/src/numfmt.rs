//! Number formatting shared by CSV output and the CLI.

/// Formats `v` with 17 significant digits, which round-trips every finite `f64`.
///
/// Positional notation is used for magnitudes in `[1e-5, 1e16)`, scientific otherwise.
pub fn sig17(v: f64) -> String {
    if !v.is_finite() {
        return format!("{v}");
    }
    if v == 0.0 {
        return if v.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let mag = v.abs();
    if !(1e-5..1e16).contains(&mag) {
        return format!("{v:.16e}");
    }
    let exponent = mag.log10().floor() as i32;
    let decimals = (16 - exponent).max(0) as usize;
    let s = format!("{v:.decimals$}");
    trim_zeros(s)
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    t.to_string()
}
