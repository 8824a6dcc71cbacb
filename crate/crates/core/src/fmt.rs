//! Number formatting for CSV and key=value output.

/// Formats `v` with 17 significant digits, like C's `%.17g`.
///
/// ```
/// use tongue_lab::fmt::g17;
/// assert_eq!(g17(0.5), "0.5");
/// assert_eq!(g17(-0.1), "-0.10000000000000001");
/// assert_eq!(g17(1e-7), "9.9999999999999995e-8");
/// assert_eq!(g17(0.0), "0");
/// ```
pub fn g17(v: f64) -> String {
    if !v.is_finite() {
        return format!("{v}");
    }
    if v == 0.0 {
        return if v.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.16e}", v);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, v))
    } else {
        format!("{}e{}", trim_zeros(mantissa.to_string()), exp)
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    t.to_string()
}
