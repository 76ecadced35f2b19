//! Engineering-notation formatting for printed values.

/// `value` with a mantissa in [1, 1000) and an exponent that is a multiple
/// of three, followed by `unit`. The exponent is omitted when it is zero.
pub fn eng(value: f64, unit: &str) -> String {
    let number = eng_number(value);
    if unit.is_empty() {
        number
    } else {
        format!("{number} {unit}")
    }
}

pub fn eng_number(value: f64) -> String {
    if value == 0.0 || !value.is_finite() {
        return format!("{value}");
    }
    // let the standard formatter do the rounding to 4 significant digits
    let sci = format!("{value:.3e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let mantissa: f64 = mantissa.parse().expect("mantissa");
    let exp: i32 = exp.parse().expect("exponent");
    let shift = exp.rem_euclid(3);
    let exp = exp - shift;
    let mantissa = mantissa * 10f64.powi(shift);
    let digits = (3 - shift) as usize;
    if exp == 0 {
        format!("{mantissa:.digits$}")
    } else {
        format!("{mantissa:.digits$}e{exp}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn groups_of_three() {
        assert_eq!(eng(23_070.0, "Hz"), "23.07e3 Hz");
        assert_eq!(eng(2.254e-19, "m/√Hz"), "225.4e-21 m/√Hz");
        assert_eq!(eng(-0.0137, ""), "-13.70e-3");
        assert_eq!(eng(1.0, "N"), "1.000 N");
        assert_eq!(eng(999.99, ""), "1.000e3");
        assert_eq!(eng(0.0, "W"), "0 W");
    }
}
