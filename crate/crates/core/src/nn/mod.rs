//! Differentiable building blocks: dense, strided conv, transpose conv,
//! batch norm, activations, Adam.
//!
//! Layers hold parameters only. `forward` returns the output plus a per-call
//! cache, and `backward` consumes that cache, so one layer can appear several
//! times in a step's computation graph (the decoder runs on both z_e and z_g,
//! the encoder on both x and the generated images) without caches clobbering
//! each other. Parameter gradients accumulate into separate mirror structs.
//!
//! Everything is generic over [`Scalar`] so training runs at f32 (matching the
//! checkpoint wire format) while gradient tests instantiate f64.

pub mod activations;
pub mod adam;
pub mod batchnorm;
pub mod conv;
pub mod deconv;
pub mod dense;

use ndarray::LinalgScalar;
use num_traits::{Float, FromPrimitive, NumAssign};
use rand::Rng;

pub use activations::{leaky_relu, leaky_relu_grad, sigmoid, tanh, tanh_grad};
pub use adam::AdamState;
pub use batchnorm::BatchNorm2d;
pub use conv::Conv2d;
pub use deconv::ConvTranspose2d;
pub use dense::Dense;

/// Element type for all tensors; implemented for `f32` and `f64`.
pub trait Scalar:
    LinalgScalar
    + Float
    + NumAssign
    + FromPrimitive
    + std::iter::Sum
    + std::fmt::Debug
    + std::fmt::Display
    + Send
    + Sync
    + 'static
{
    fn from_f64(v: f64) -> Self;
    fn to_f64(self) -> f64;
}

impl Scalar for f32 {
    fn from_f64(v: f64) -> Self {
        v as f32
    }
    fn to_f64(self) -> f64 {
        self as f64
    }
}

impl Scalar for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }
    fn to_f64(self) -> f64 {
        self
    }
}

/// Forward-pass mode. Train uses per-batch normalization statistics and
/// updates running averages; Eval is a pure function of (params, input).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Train,
    Eval,
}

/// Draw one standard-normal value (Box-Muller, both uniforms drawn even
/// though only one output is used, to keep the stream position simple).
pub fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Fill a slice with N(0, std) draws in order.
pub fn fill_normal<F: Scalar, R: Rng>(slice: &mut [F], std: f64, rng: &mut R) {
    for v in slice.iter_mut() {
        *v = F::from_f64(standard_normal(rng) * std);
    }
}
