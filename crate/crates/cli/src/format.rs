/// Decimal with `digits` significant digits; scientific notation outside `[1e-5, 1e15)`.
pub fn sig(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let exponent = x.abs().log10().floor() as i32;
    if !(-5..15).contains(&exponent) {
        return format!("{:.*e}", digits - 1, x);
    }
    let decimals = (digits as i32 - 1 - exponent).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Nine significant digits, the precision used in every CSV.
pub fn csv_num(x: f64) -> String {
    sig(x, 9)
}

pub fn csv_row(values: &[f64]) -> String {
    values.iter().map(|v| csv_num(*v)).collect::<Vec<_>>().join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(csv_num(0.0756123456789), "0.0756123457");
        assert_eq!(csv_num(0.2), "0.200000000");
        assert_eq!(csv_num(88.5), "88.5000000");
        assert_eq!(csv_num(0.0), "0");
        assert_eq!(csv_num(1.23456789012e-7), "1.23456789e-7");
        assert_eq!(csv_num(-0.5), "-0.500000000");
        assert_eq!(csv_num(f64::NAN), "NaN");
    }

    #[test]
    fn rows_join_with_commas() {
        assert_eq!(csv_row(&[0.0, 0.5]), "0,0.500000000");
    }
}
