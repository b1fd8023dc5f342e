//! Small numeric helpers shared across modules.

/// Pairwise summation; error grows like O(log n) instead of O(n).
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const BASE: usize = 32;
    if xs.len() <= BASE {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// `|x|^p` with the common cases kept exact.
#[inline]
pub fn abs_pow(x: f64, p: f64) -> f64 {
    let a = x.abs();
    if p == 1.0 {
        a
    } else if p == 2.0 {
        a * a
    } else if a == 0.0 {
        0.0
    } else {
        a.powf(p)
    }
}

/// `x^(1/p)` for `x >= 0`.
#[inline]
pub fn root(x: f64, p: f64) -> f64 {
    if p == 1.0 {
        x
    } else if p == 2.0 {
        x.sqrt()
    } else {
        x.powf(1.0 / p)
    }
}

/// `2^e` for real `e`.
#[inline]
pub fn pow2(e: f64) -> f64 {
    e.exp2()
}

/// Render a number with `digits` significant digits.
///
/// Fixed notation for moderate magnitudes, scientific otherwise. `inf`/`nan` print as such.
pub fn format_sig(v: f64, digits: usize) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, v);
    let (mant, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if !(-5..15).contains(&exp) {
        return sci;
    }
    let neg = mant.starts_with('-');
    let ds: String = mant.chars().filter(|c| c.is_ascii_digit()).collect();
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    if exp >= 0 {
        let int_len = exp as usize + 1;
        if ds.len() <= int_len {
            out.push_str(&ds);
            out.extend(std::iter::repeat_n('0', int_len - ds.len()));
        } else {
            out.push_str(&ds[..int_len]);
            out.push('.');
            out.push_str(&ds[int_len..]);
        }
    } else {
        out.push_str("0.");
        out.extend(std::iter::repeat_n('0', (-exp - 1) as usize));
        out.push_str(&ds);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_naive_on_small_input() {
        let xs: Vec<f64> = (1..=1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&xs), 500_500.0);
    }

    #[test]
    fn sig_digits() {
        assert_eq!(format_sig(1.0, 15), "1.00000000000000");
        assert_eq!(format_sig(0.25, 3), "0.250");
        assert_eq!(format_sig(-1234.5, 6), "-1234.50");
        assert_eq!(format_sig(f64::INFINITY, 15), "inf");
        assert_eq!(format_sig(1e-9, 3), "1.00e-9");
        assert_eq!(format_sig(9.9999999, 3), "10.0");
    }
}
