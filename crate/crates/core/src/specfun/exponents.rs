//! Exact critical exponents as rationals.

use crate::{Result, RmlError};
use num_rational::Rational64;

/// p_d = (2d − 2)/(d + 1).
pub fn p_d(d: i64) -> Result<Rational64> {
    if d < 2 {
        return Err(RmlError::Domain(format!("p_d needs d >= 2, got {d}")));
    }
    Ok(Rational64::new(2 * d - 2, d + 1))
}

/// q_d = 2 + 4/(d − 3), defined for d ≥ 4.
pub fn q_d(d: i64) -> Result<Rational64> {
    if d < 4 {
        return Err(RmlError::Domain(format!("q_d needs d >= 4, got {d}")));
    }
    Ok(Rational64::from_integer(2) + Rational64::new(4, d - 3))
}

/// α(q) = d(1/2 − 1/q) − 1/2.
pub fn alpha(d: i64, q: Rational64) -> Result<Rational64> {
    if q <= Rational64::from_integer(0) {
        return Err(RmlError::Domain("alpha needs q > 0".into()));
    }
    let half = Rational64::new(1, 2);
    Ok(Rational64::from_integer(d) * (half - q.recip()) - half)
}

/// Floating versions for numerical code.
pub fn p_d_f64(d: usize) -> f64 {
    (2.0 * d as f64 - 2.0) / (d as f64 + 1.0)
}

pub fn q_d_f64(d: usize) -> f64 {
    2.0 + 4.0 / (d as f64 - 3.0)
}

pub fn alpha_f64(d: usize, q: f64) -> f64 {
    d as f64 * (0.5 - 1.0 / q) - 0.5
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anchors() {
        assert_eq!(p_d(4).unwrap(), Rational64::new(6, 5));
        assert_eq!(p_d(5).unwrap(), Rational64::new(4, 3));
        assert_eq!(q_d(4).unwrap(), Rational64::from_integer(6));
        assert_eq!(alpha(4, Rational64::from_integer(6)).unwrap(), Rational64::new(5, 6));
        assert!(q_d(3).is_err());
    }
}
