//! Fixed-format numeric output shared by every text artifact.

/// Formats `v` with 9 significant digits, `%g`-style: plain notation for
/// moderate exponents, scientific otherwise, trailing zeros removed.
pub fn sig9(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return if v.is_nan() { "nan".into() } else if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{v:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        trim(format!("{v:.decimals$}"))
    } else {
        format!("{}e{}", trim(mantissa.to_string()), exp)
    }
}

fn trim(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    if t == "-0" {
        "0".into()
    } else {
        t.to_string()
    }
}

/// Rounds to 9 significant digits so JSON output is as stable as CSV output.
pub fn round9(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    sig9(v).parse().unwrap_or(v)
}
