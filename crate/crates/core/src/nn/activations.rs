//! Elementwise activations. Gradients are computed from the activation
//! *output*, which every caller already keeps in its cache.

use ndarray::{Array, Dimension};

use super::Scalar;

pub fn leaky_relu<F: Scalar, D: Dimension>(x: &Array<F, D>, slope: F) -> Array<F, D> {
    x.mapv(|v| if v > F::zero() { v } else { v * slope })
}

/// d/dx leaky_relu, recovered from the output y (sign(y) == sign(x) for slope > 0).
pub fn leaky_relu_grad<F: Scalar, D: Dimension>(
    y: &Array<F, D>,
    gy: &Array<F, D>,
    slope: F,
) -> Array<F, D> {
    let mut gx = gy.clone();
    gx.zip_mut_with(y, |g, &v| {
        if v <= F::zero() {
            *g *= slope;
        }
    });
    gx
}

pub fn tanh<F: Scalar, D: Dimension>(x: &Array<F, D>) -> Array<F, D> {
    x.mapv(|v| v.tanh())
}

/// d/dx tanh from the output: 1 - y^2.
pub fn tanh_grad<F: Scalar, D: Dimension>(y: &Array<F, D>, gy: &Array<F, D>) -> Array<F, D> {
    let mut gx = gy.clone();
    gx.zip_mut_with(y, |g, &v| *g *= F::one() - v * v);
    gx
}

pub fn sigmoid<F: Scalar>(x: F) -> F {
    if x >= F::zero() {
        F::one() / (F::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (F::one() + e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::arr1;

    #[test]
    fn leaky_relu_kink() {
        let x = arr1(&[-2.0f64, 0.0, 3.0]);
        let y = leaky_relu(&x, 0.2);
        assert_eq!(y, arr1(&[-0.4, 0.0, 3.0]));
        let g = leaky_relu_grad(&y, &arr1(&[1.0, 1.0, 1.0]), 0.2);
        assert_eq!(g, arr1(&[0.2, 0.2, 1.0]));
    }

    #[test]
    fn sigmoid_is_stable_at_extremes() {
        assert!(sigmoid(-800.0f64) >= 0.0);
        assert!(sigmoid(800.0f64) <= 1.0);
        assert!((sigmoid(0.0f64) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn tanh_grad_matches_finite_difference() {
        let x = arr1(&[-1.5f64, -0.2, 0.0, 0.7, 2.0]);
        let y = tanh(&x);
        let g = tanh_grad(&y, &arr1(&[1.0; 5]));
        let h = 1e-6;
        for i in 0..5 {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[i] += h;
            xm[i] -= h;
            let fd = (xp[i].tanh() - xm[i].tanh()) / (2.0 * h);
            assert!((g[i] - fd).abs() < 1e-9, "i={i} {} vs {}", g[i], fd);
        }
    }
}
