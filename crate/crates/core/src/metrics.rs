//! Regression quality metrics: MSE, coefficient of determination, Pearson
//! correlation.
//!
//! All statistics use numerically stable two-pass formulas (means first,
//! centered sums second).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{count, Real};

fn check_paired<T>(y: &[T], y_hat: &[T]) -> Result<()> {
    if y.len() != y_hat.len() {
        return Err(Error::LengthMismatch {
            left: y.len(),
            right: y_hat.len(),
        });
    }
    if y.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(())
}

fn mean<T: Real>(xs: &[T]) -> T {
    xs.iter().copied().sum::<T>() / count(xs.len())
}

/// Mean squared error between targets `y` and predictions `y_hat`.
pub fn mse<T: Real>(y: &[T], y_hat: &[T]) -> Result<T> {
    check_paired(y, y_hat)?;
    let sum = y
        .iter()
        .zip(y_hat)
        .map(|(&a, &b)| {
            let d = a - b;
            d * d
        })
        .sum::<T>();
    Ok(sum / count(y.len()))
}

/// Coefficient of determination
/// `R^2 = 1 - sum (y - y_hat)^2 / sum (y - mean(y))^2`.
///
/// Fails with [`Error::ZeroVariance`] when all targets are equal.
pub fn r_squared<T: Real>(y: &[T], y_hat: &[T]) -> Result<T> {
    check_paired(y, y_hat)?;
    let y_bar = mean(y);
    let ss_res = y
        .iter()
        .zip(y_hat)
        .map(|(&a, &b)| {
            let d = a - b;
            d * d
        })
        .sum::<T>();
    let ss_tot = y
        .iter()
        .map(|&a| {
            let d = a - y_bar;
            d * d
        })
        .sum::<T>();
    if ss_tot == T::zero() {
        return Err(Error::ZeroVariance);
    }
    Ok(T::one() - ss_res / ss_tot)
}

/// Pearson correlation coefficient of two sequences.
///
/// Fails with [`Error::ConstantInput`] when either sequence is constant.
pub fn pearson<T: Real>(a: &[T], b: &[T]) -> Result<T> {
    check_paired(a, b)?;
    let a_bar = mean(a);
    let b_bar = mean(b);
    let mut cov = T::zero();
    let mut var_a = T::zero();
    let mut var_b = T::zero();
    for (&x, &y) in a.iter().zip(b) {
        let da = x - a_bar;
        let db = y - b_bar;
        cov += da * db;
        var_a += da * da;
        var_b += db * db;
    }
    if var_a == T::zero() || var_b == T::zero() {
        return Err(Error::ConstantInput);
    }
    Ok(cov / (var_a * var_b).sqrt())
}

/// Bundle of the evaluation metrics for one method on one test slice.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport<T> {
    pub mse: T,
    pub r2: T,
    pub one_minus_r2: T,
    pub pearson: T,
    /// Number of evaluated pairs.
    pub k_test: usize,
}

impl<T: Real> EvalReport<T> {
    /// Computes every metric over the paired sequences.
    pub fn new(y: &[T], y_hat: &[T]) -> Result<Self> {
        let mse = mse(y, y_hat)?;
        let r2 = r_squared(y, y_hat)?;
        let pearson = pearson(y, y_hat)?;
        Ok(Self {
            mse,
            r2,
            one_minus_r2: T::one() - r2,
            pearson,
            k_test: y.len(),
        })
    }
}
