//! Linear functions of the payment table.

use std::ops::{Add, Neg, Sub};

use num_traits::Zero;

use crate::exact::{self, Q};

/// Coefficients of a linear function over a fixed set of variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinearForm(Vec<Q>);

impl LinearForm {
    pub fn zeros(len: usize) -> LinearForm {
        LinearForm(vec![Q::zero(); len])
    }

    pub fn from_coeffs(coeffs: Vec<Q>) -> LinearForm {
        LinearForm(coeffs)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.0
    }

    pub fn into_coeffs(self) -> Vec<Q> {
        self.0
    }

    pub fn add_at(&mut self, index: usize, value: &Q) {
        self.0[index] += value;
    }

    pub fn add_scaled(&mut self, weight: &Q, other: &LinearForm) {
        debug_assert_eq!(self.0.len(), other.0.len());
        if weight.is_zero() {
            return;
        }
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            if !b.is_zero() {
                *a += weight * b;
            }
        }
    }

    pub fn scaled(&self, weight: &Q) -> LinearForm {
        LinearForm(self.0.iter().map(|c| c * weight).collect())
    }

    /// Value at the point `x`.
    pub fn eval(&self, x: &[Q]) -> Q {
        exact::dot(&self.0, x)
    }
}

impl Add for &LinearForm {
    type Output = LinearForm;

    fn add(self, rhs: &LinearForm) -> LinearForm {
        LinearForm(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &LinearForm {
    type Output = LinearForm;

    fn sub(self, rhs: &LinearForm) -> LinearForm {
        LinearForm(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &LinearForm {
    type Output = LinearForm;

    fn neg(self) -> LinearForm {
        LinearForm(self.0.iter().map(|a| -a).collect())
    }
}
