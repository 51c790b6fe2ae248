//! Exact nonnegative-integer polynomials used for Poincare and Morse
//! counting series. Coefficients are big integers; the coefficient of t^i
//! sits at index i.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

/// Polynomial with nonnegative big-integer coefficients. The zero polynomial
/// has an empty coefficient vector; otherwise the trailing coefficient is
/// nonzero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PolyRepr", into = "PolyRepr")]
pub struct IntPolynomial {
    coeffs: Vec<BigUint>,
}

/// JSON form: decimal strings, index = degree.
#[derive(Serialize, Deserialize)]
struct PolyRepr {
    coeffs: Vec<String>,
}

impl TryFrom<PolyRepr> for IntPolynomial {
    type Error = String;

    fn try_from(repr: PolyRepr) -> Result<IntPolynomial, String> {
        let coeffs = repr
            .coeffs
            .iter()
            .map(|s| s.parse::<BigUint>().map_err(|e| e.to_string()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(IntPolynomial::from_coeffs(coeffs))
    }
}

impl From<IntPolynomial> for PolyRepr {
    fn from(p: IntPolynomial) -> PolyRepr {
        PolyRepr {
            coeffs: p.coeffs.iter().map(|c| c.to_string()).collect(),
        }
    }
}

impl IntPolynomial {
    pub fn zero() -> IntPolynomial {
        IntPolynomial { coeffs: Vec::new() }
    }

    pub fn one() -> IntPolynomial {
        IntPolynomial {
            coeffs: vec![BigUint::from(1u32)],
        }
    }

    /// Builds from coefficients, trimming trailing zeros.
    pub fn from_coeffs(mut coeffs: Vec<BigUint>) -> IntPolynomial {
        while coeffs.last().is_some_and(|c| c == &BigUint::ZERO) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn from_u64_coeffs(coeffs: &[u64]) -> IntPolynomial {
        Self::from_coeffs(coeffs.iter().map(|&c| BigUint::from(c)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Coefficient of t^i (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> BigUint {
        self.coeffs.get(i).cloned().unwrap_or(BigUint::ZERO)
    }

    pub fn coeffs(&self) -> &[BigUint] {
        &self.coeffs
    }

    pub fn add(&self, other: &IntPolynomial) -> IntPolynomial {
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len).map(|i| self.coeff(i) + other.coeff(i)).collect();
        IntPolynomial::from_coeffs(coeffs)
    }

    /// t^k * p.
    pub fn shifted(&self, k: usize) -> IntPolynomial {
        if self.is_zero() {
            return IntPolynomial::zero();
        }
        let mut coeffs = vec![BigUint::ZERO; k];
        coeffs.extend(self.coeffs.iter().cloned());
        IntPolynomial { coeffs }
    }

    /// (1 + t^k) * p.
    pub fn times_one_plus_tk(&self, k: usize) -> IntPolynomial {
        self.add(&self.shifted(k))
    }

    /// Coefficientwise `self >= other`.
    pub fn dominates(&self, other: &IntPolynomial) -> bool {
        let len = self.coeffs.len().max(other.coeffs.len());
        (0..len).all(|i| self.coeff(i) >= other.coeff(i))
    }
}

impl std::fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c == &BigUint::ZERO {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (i, c == &BigUint::from(1u32)) {
                (0, _) => write!(f, "{c}")?,
                (1, true) => write!(f, "t")?,
                (1, false) => write!(f, "{c}t")?,
                (_, true) => write!(f, "t^{i}")?,
                (_, false) => write!(f, "{c}t^{i}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trailing_zeros_are_trimmed() {
        let p = IntPolynomial::from_u64_coeffs(&[1, 0, 2, 0, 0]);
        assert_eq!(p.degree(), Some(2));
        assert_eq!(p.coeff(4), BigUint::ZERO);
    }

    #[test]
    fn shift_and_add() {
        let p = IntPolynomial::from_u64_coeffs(&[1, 1]);
        let q = p.times_one_plus_tk(2);
        assert_eq!(q, IntPolynomial::from_u64_coeffs(&[1, 1, 1, 1]));
        assert_eq!(q.to_string(), "1 + t + t^2 + t^3");
    }

    #[test]
    fn domination_is_coefficientwise() {
        let p = IntPolynomial::from_u64_coeffs(&[2, 3, 1]);
        let q = IntPolynomial::from_u64_coeffs(&[1, 3]);
        assert!(p.dominates(&q));
        assert!(!q.dominates(&p));
        assert!(p.dominates(&IntPolynomial::zero()));
    }

    #[test]
    fn json_uses_decimal_strings() {
        let p = IntPolynomial::from_u64_coeffs(&[1, 0, 5]);
        let text = serde_json::to_string(&p).unwrap();
        assert_eq!(text, r#"{"coeffs":["1","0","5"]}"#);
        let back: IntPolynomial = serde_json::from_str(&text).unwrap();
        assert_eq!(back, p);
    }
}
