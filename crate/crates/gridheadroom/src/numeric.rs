//! Compensated summation and deterministic number formatting.
//!
//! All aggregates in this crate are accumulated with [`NeumaierSum`] in a
//! fixed order, so results are bit-identical no matter how the surrounding
//! work is parallelised.

/// Kahan summation with Neumaier's improvement: the compensation term also
/// absorbs error when the addend is larger than the running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl std::iter::FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = NeumaierSum::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

/// Compensated sum of a slice, in slice order.
pub fn sum(values: &[f64]) -> f64 {
    values.iter().copied().collect::<NeumaierSum>().total()
}

/// Compensated mean of a slice; 0 for an empty slice.
pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        0.0
    } else {
        sum(values) / values.len() as f64
    }
}

/// Format `x` with a fixed number of significant digits, in plain decimal
/// notation. Used for every derived numeric output so that reruns are
/// byte-identical.
pub fn format_sig(x: f64, digits: usize) -> String {
    assert!(digits >= 1);
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".to_owned()
        } else if x > 0.0 {
            "inf".to_owned()
        } else {
            "-inf".to_owned()
        };
    }
    if x == 0.0 {
        return format!("{:.*}", digits - 1, 0.0);
    }
    // {:.*e} normalises to one digit before the point, rounding to the
    // requested precision, so string surgery on it is exact.
    let exp_form = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = exp_form
        .split_once('e')
        .expect("exponential format always contains 'e'");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    let negative = mantissa.starts_with('-');
    let digit_run: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    debug_assert_eq!(digit_run.len(), digits);

    let mut out = String::new();
    if negative {
        out.push('-');
    }
    let d = digits as i32;
    if exp >= d - 1 {
        out.push_str(&digit_run);
        for _ in 0..(exp - (d - 1)) {
            out.push('0');
        }
    } else if exp >= 0 {
        let point = (exp + 1) as usize;
        out.push_str(&digit_run[..point]);
        out.push('.');
        out.push_str(&digit_run[point..]);
    } else {
        out.push_str("0.");
        for _ in 0..(-exp - 1) {
            out.push('0');
        }
        out.push_str(&digit_run);
    }
    out
}

/// Round to six significant digits, the precision every exported number is
/// written with. Serialising the rounded value reproduces the same text.
pub fn round_sig6(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    format_sig(x, 6)
        .parse()
        .expect("format_sig emits valid f64")
}

/// Shortest decimal representation that parses back to the same bits, padded
/// to at least `min_decimals` fractional digits.
pub fn format_roundtrip(x: f64, min_decimals: usize) -> String {
    let mut s = format!("{x}");
    match s.find('.') {
        None => {
            s.push('.');
            for _ in 0..min_decimals {
                s.push('0');
            }
        }
        Some(dot) => {
            let frac = s.len() - dot - 1;
            for _ in frac..min_decimals {
                s.push('0');
            }
        }
    }
    s
}
