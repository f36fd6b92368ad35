use super::Tensor;
use crate::error::{RdhError, Result};

pub fn leaky_relu(x: &Tensor, slope: f32) -> Tensor {
    let mut out = x.clone();
    leaky_relu_inplace(&mut out, slope);
    out
}

pub fn leaky_relu_inplace(x: &mut Tensor, slope: f32) {
    for v in x.data_mut() {
        if *v <= 0.0 {
            *v *= slope;
        }
    }
}

/// Gradient through the activation; `pre` is the activation's input.
pub fn leaky_relu_backward(pre: &Tensor, grad_out: &Tensor, slope: f32) -> Result<Tensor> {
    if pre.shape() != grad_out.shape() {
        return Err(RdhError::ShapeMismatch(format!(
            "activation {:?} vs gradient {:?}",
            pre.shape(),
            grad_out.shape()
        )));
    }
    let data = pre
        .data()
        .iter()
        .zip(grad_out.data())
        .map(|(&x, &g)| if x > 0.0 { g } else { g * slope })
        .collect();
    Tensor::new(pre.shape().to_vec(), data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_on_positive() {
        let x = Tensor::new(vec![1, 1, 4], vec![0.5, 1.0, 2.0, 300.0]).unwrap();
        assert_eq!(leaky_relu(&x, 0.01), x);
    }

    #[test]
    fn negative_slope() {
        let x = Tensor::new(vec![1], vec![-1.0]).unwrap();
        assert_eq!(leaky_relu(&x, 0.01).data(), &[-0.01]);
    }

    #[test]
    fn backward_masks() {
        let x = Tensor::new(vec![3], vec![-2.0, 0.0, 3.0]).unwrap();
        let g = Tensor::new(vec![3], vec![1.0, 1.0, 1.0]).unwrap();
        let gi = leaky_relu_backward(&x, &g, 0.1).unwrap();
        assert_eq!(gi.data(), &[0.1, 0.1, 1.0]);
        assert!(leaky_relu_backward(&x, &Tensor::zeros(vec![2]), 0.1).is_err());
    }
}
