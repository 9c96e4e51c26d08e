//! Foreground-weighted squared error between two tensors.

use alloc::format;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Dense row-major `f64` tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl Tensor {
    pub fn new(shape: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        let expected = shape.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d));
        if expected != Some(data.len()) {
            return Err(Error::Shape(format!("shape {shape:?} does not hold {} elements", data.len())));
        }
        Ok(Self { shape, data })
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }
}

/// `mean(r²) + gamma · mean((r ⊙ mask)²)` with `r = pred − target`.
///
/// The mask must be binary. Both means run over every element.
pub fn region_weighted_mse(pred: &Tensor, target: &Tensor, mask: &Tensor, gamma: f64) -> Result<f64> {
    if pred.shape != target.shape || pred.shape != mask.shape {
        return Err(Error::Shape(format!(
            "pred {:?}, target {:?} and mask {:?} must share a shape",
            pred.shape, target.shape, mask.shape
        )));
    }
    if !(gamma >= 0.0) || !gamma.is_finite() {
        return Err(Error::Config(format!("gamma {gamma} must be finite and non-negative")));
    }
    if mask.data.iter().any(|&m| m != 0.0 && m != 1.0) {
        return Err(Error::Shape("mask must contain only 0 and 1".into()));
    }
    let n = pred.data.len();
    if n == 0 {
        return Err(Error::Shape("tensors are empty".into()));
    }
    let (mut plain, mut masked) = (0.0, 0.0);
    for ((p, t), m) in pred.data.iter().zip(&target.data).zip(&mask.data) {
        let r = p - t;
        plain += r * r;
        masked += (r * m) * (r * m);
    }
    Ok(plain / n as f64 + gamma * masked / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn t(shape: &[usize], data: &[f64]) -> Tensor {
        Tensor::new(shape.to_vec(), data.to_vec()).unwrap()
    }

    #[test]
    fn gamma_zero_is_mse() {
        let p = t(&[2, 2], &[1., 2., 3., 4.]);
        let y = t(&[2, 2], &[0., 2., 5., 4.]);
        let m = t(&[2, 2], &[1., 0., 0., 1.]);
        assert_eq!(region_weighted_mse(&p, &y, &m, 0.0).unwrap(), (1.0 + 4.0) / 4.0);
        // only the first residual is masked
        assert_eq!(region_weighted_mse(&p, &y, &m, 2.0).unwrap(), 1.25 + 2.0 * 0.25);
    }

    #[test]
    fn identical_tensors_give_zero() {
        let p = t(&[3], &[1., -2., 0.5]);
        let m = t(&[3], &[1., 1., 0.]);
        assert_eq!(region_weighted_mse(&p, &p, &m, 7.0).unwrap(), 0.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        let a = t(&[2], &[1., 2.]);
        let b = t(&[1, 2], &[1., 2.]);
        assert!(matches!(region_weighted_mse(&a, &b, &a, 1.0), Err(Error::Shape(_))));
        let half = t(&[2], &[0.5, 1.0]);
        assert!(matches!(region_weighted_mse(&a, &a, &half, 1.0), Err(Error::Shape(_))));
        assert!(Tensor::new(vec![2, 3], vec![0.0; 5]).is_err());
        assert!(region_weighted_mse(&a, &a, &t(&[2], &[0., 1.]), -1.0).is_err());
    }
}
