//! Grid vectors: elements of the pivot space `H` (and, via the pivot
//! pairing, of every member space and its dual).

use std::ops::{Add, Index, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A vector of grid values. Entries are always finite: construction and
/// deserialisation reject NaN and infinities, and all arithmetic here
/// preserves finiteness for finite inputs of matching dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct HVector(Vec<f64>);

impl HVector {
    /// Wrap grid values, rejecting non-finite entries and zero length.
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::invalid("grid vector", "must have at least one entry"));
        }
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite { context: "grid vector entry" });
        }
        Ok(HVector(entries))
    }

    /// The zero vector of dimension `d`.
    pub fn zeros(d: usize) -> Self {
        HVector(vec![0.0; d])
    }

    /// Coordinate indicator `δ_j` of dimension `d`.
    pub fn indicator(d: usize, j: usize) -> Self {
        let mut v = vec![0.0; d];
        v[j] = 1.0;
        HVector(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    /// `self * c`.
    pub fn scale(&self, c: f64) -> HVector {
        HVector(self.0.iter().map(|x| x * c).collect())
    }

    /// `self + c * other`; panics on dimension mismatch (callers validate
    /// dimensions once at construction).
    pub fn axpy(&self, c: f64, other: &HVector) -> HVector {
        assert_eq!(self.dim(), other.dim(), "grid vector dimension mismatch");
        HVector(self.0.iter().zip(&other.0).map(|(a, b)| a + c * b).collect())
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0.0)
    }
}

impl TryFrom<Vec<f64>> for HVector {
    type Error = Error;
    fn try_from(entries: Vec<f64>) -> Result<Self> {
        HVector::new(entries)
    }
}

impl From<HVector> for Vec<f64> {
    fn from(v: HVector) -> Vec<f64> {
        v.0
    }
}

impl Index<usize> for HVector {
    type Output = f64;
    fn index(&self, j: usize) -> &f64 {
        &self.0[j]
    }
}

impl Add for &HVector {
    type Output = HVector;
    fn add(self, other: &HVector) -> HVector {
        self.axpy(1.0, other)
    }
}

impl Sub for &HVector {
    type Output = HVector;
    fn sub(self, other: &HVector) -> HVector {
        self.axpy(-1.0, other)
    }
}

impl Mul<f64> for &HVector {
    type Output = HVector;
    fn mul(self, c: f64) -> HVector {
        self.scale(c)
    }
}

impl Neg for &HVector {
    type Output = HVector;
    fn neg(self) -> HVector {
        self.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite_entries() {
        assert!(HVector::new(vec![1.0, f64::NAN]).is_err());
        assert!(HVector::new(vec![f64::INFINITY]).is_err());
        assert!(HVector::new(vec![]).is_err());
    }

    #[test]
    fn arithmetic_is_coordinatewise() {
        let x = HVector::new(vec![1.0, 2.0]).unwrap();
        let y = HVector::new(vec![3.0, -4.0]).unwrap();
        assert_eq!((&x + &y).as_slice(), &[4.0, -2.0]);
        assert_eq!((&x - &y).as_slice(), &[-2.0, 6.0]);
        assert_eq!((&x * 2.0).as_slice(), &[2.0, 4.0]);
        assert_eq!(x.axpy(2.0, &y).as_slice(), &[7.0, -6.0]);
    }

    #[test]
    fn serde_round_trip_is_a_plain_array() {
        let x = HVector::new(vec![1.5, -2.0]).unwrap();
        let json = serde_json::to_string(&x).unwrap();
        assert_eq!(json, "[1.5,-2.0]");
        let back: HVector = serde_json::from_str(&json).unwrap();
        assert_eq!(back, x);
        assert!(serde_json::from_str::<HVector>("[1.0,null]").is_err());
    }
}
