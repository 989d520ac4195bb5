//! Fully connected layer, y = x W^T + b.

use ndarray::{Array1, Array2};
use rand::Rng;

use super::{fill_normal, Scalar};

#[derive(Debug, Clone)]
pub struct Dense<F> {
    /// (out, in)
    pub w: Array2<F>,
    pub b: Array1<F>,
}

#[derive(Debug, Clone)]
pub struct DenseGrads<F> {
    pub w: Array2<F>,
    pub b: Array1<F>,
}

pub struct DenseCache<F> {
    x: Array2<F>,
}

impl<F: Scalar> Dense<F> {
    pub fn new<R: Rng>(in_dim: usize, out_dim: usize, init_std: f64, rng: &mut R) -> Self {
        let mut w = Array2::zeros((out_dim, in_dim));
        fill_normal(w.as_slice_mut().unwrap(), init_std, rng);
        Dense {
            w,
            b: Array1::zeros(out_dim),
        }
    }

    pub fn in_dim(&self) -> usize {
        self.w.ncols()
    }

    pub fn out_dim(&self) -> usize {
        self.w.nrows()
    }

    pub fn forward(&self, x: &Array2<F>) -> (Array2<F>, DenseCache<F>) {
        debug_assert_eq!(x.ncols(), self.in_dim());
        let y = x.dot(&self.w.t()) + &self.b;
        (y, DenseCache { x: x.clone() })
    }

    /// Propagate `gy` to the input; accumulate parameter gradients into
    /// `grads` when given (None skips the weight GEMM for frozen passes).
    pub fn backward(
        &self,
        cache: &DenseCache<F>,
        gy: &Array2<F>,
        grads: Option<&mut DenseGrads<F>>,
    ) -> Array2<F> {
        if let Some(g) = grads {
            g.w += &gy.t().dot(&cache.x);
            g.b += &gy.sum_axis(ndarray::Axis(0));
        }
        gy.dot(&self.w)
    }

    pub fn zero_grads(&self) -> DenseGrads<F> {
        DenseGrads {
            w: Array2::zeros(self.w.raw_dim()),
            b: Array1::zeros(self.b.raw_dim()),
        }
    }
}
