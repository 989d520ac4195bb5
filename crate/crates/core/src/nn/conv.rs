//! Strided 2-D convolution via im2col + GEMM.
//!
//! `im2col`/`col2im` are shared with the transpose convolution, which is the
//! adjoint map over the same patch geometry.

use ndarray::{Array1, Array2, Array4};
use rand::Rng;

use super::{fill_normal, Scalar};

/// Output spatial size of a convolution over `input` with the given geometry.
pub fn conv_out_size(input: usize, kernel: usize, stride: usize, pad: usize) -> usize {
    (input + 2 * pad - kernel) / stride + 1
}

/// Unfold patches: (B, C, H, W) -> (B*OH*OW, C*k*k), rows ordered by
/// (batch, oh, ow), columns by (channel, kh, kw). Out-of-bounds taps are zero.
pub fn im2col<F: Scalar>(x: &Array4<F>, k: usize, stride: usize, pad: usize) -> Array2<F> {
    let (b, c, h, w) = x.dim();
    let oh = conv_out_size(h, k, stride, pad);
    let ow = conv_out_size(w, k, stride, pad);
    let kk = c * k * k;
    let xs = x.as_slice().expect("input must be standard layout");
    let mut cols = vec![F::zero(); b * oh * ow * kk];

    for bi in 0..b {
        for ohi in 0..oh {
            for owi in 0..ow {
                let row = ((bi * oh + ohi) * ow + owi) * kk;
                for ci in 0..c {
                    let plane = (bi * c + ci) * h * w;
                    for kh in 0..k {
                        let ih = (ohi * stride + kh) as isize - pad as isize;
                        let dst = row + (ci * k + kh) * k;
                        if ih < 0 || ih >= h as isize {
                            continue; // row stays zero
                        }
                        let src = plane + ih as usize * w;
                        for kw in 0..k {
                            let iw = (owi * stride + kw) as isize - pad as isize;
                            if iw >= 0 && iw < w as isize {
                                cols[dst + kw] = xs[src + iw as usize];
                            }
                        }
                    }
                }
            }
        }
    }
    Array2::from_shape_vec((b * oh * ow, kk), cols).unwrap()
}

/// Adjoint of [`im2col`]: scatter-add patch columns back into an image of
/// shape `(b, c, h, w)` under the same geometry.
pub fn col2im<F: Scalar>(
    cols: &Array2<F>,
    shape: (usize, usize, usize, usize),
    k: usize,
    stride: usize,
    pad: usize,
) -> Array4<F> {
    let (b, c, h, w) = shape;
    let oh = conv_out_size(h, k, stride, pad);
    let ow = conv_out_size(w, k, stride, pad);
    let kk = c * k * k;
    debug_assert_eq!(cols.dim(), (b * oh * ow, kk));
    let cs = cols.as_slice().expect("cols must be standard layout");
    let mut out = vec![F::zero(); b * c * h * w];

    for bi in 0..b {
        for ohi in 0..oh {
            for owi in 0..ow {
                let row = ((bi * oh + ohi) * ow + owi) * kk;
                for ci in 0..c {
                    let plane = (bi * c + ci) * h * w;
                    for kh in 0..k {
                        let ih = (ohi * stride + kh) as isize - pad as isize;
                        if ih < 0 || ih >= h as isize {
                            continue;
                        }
                        let src = row + (ci * k + kh) * k;
                        let dst = plane + ih as usize * w;
                        for kw in 0..k {
                            let iw = (owi * stride + kw) as isize - pad as isize;
                            if iw >= 0 && iw < w as isize {
                                out[dst + iw as usize] += cs[src + kw];
                            }
                        }
                    }
                }
            }
        }
    }
    Array4::from_shape_vec(shape, out).unwrap()
}

#[derive(Debug, Clone)]
pub struct Conv2d<F> {
    /// (out_c, in_c, k, k)
    pub w: Array4<F>,
    pub b: Array1<F>,
    pub stride: usize,
    pub pad: usize,
}

#[derive(Debug, Clone)]
pub struct Conv2dGrads<F> {
    pub w: Array4<F>,
    pub b: Array1<F>,
}

pub struct Conv2dCache<F> {
    cols: Array2<F>,
    x_shape: (usize, usize, usize, usize),
}

impl<F: Scalar> Conv2d<F> {
    pub fn new<R: Rng>(
        in_c: usize,
        out_c: usize,
        k: usize,
        stride: usize,
        pad: usize,
        init_std: f64,
        rng: &mut R,
    ) -> Self {
        let mut w = Array4::zeros((out_c, in_c, k, k));
        fill_normal(w.as_slice_mut().unwrap(), init_std, rng);
        Conv2d {
            w,
            b: Array1::zeros(out_c),
            stride,
            pad,
        }
    }

    pub fn out_shape(&self, x: &Array4<F>) -> (usize, usize, usize, usize) {
        let (b, _, h, w) = x.dim();
        let (oc, _, k, _) = self.w.dim();
        (
            b,
            oc,
            conv_out_size(h, k, self.stride, self.pad),
            conv_out_size(w, k, self.stride, self.pad),
        )
    }

    pub fn forward(&self, x: &Array4<F>) -> (Array4<F>, Conv2dCache<F>) {
        let (oc, ic, k, _) = self.w.dim();
        debug_assert_eq!(x.dim().1, ic);
        let (b, _, oh, ow) = self.out_shape(x);
        let cols = im2col(x, k, self.stride, self.pad);
        let w2 = self.w.view().into_shape_with_order((oc, ic * k * k)).unwrap();
        let mut y2 = cols.dot(&w2.t());
        y2 += &self.b;
        let y = y2
            .into_shape_with_order((b, oh, ow, oc))
            .unwrap()
            .permuted_axes([0, 3, 1, 2]);
        (
            y.as_standard_layout().to_owned(),
            Conv2dCache {
                cols,
                x_shape: x.dim(),
            },
        )
    }

    pub fn backward(
        &self,
        cache: &Conv2dCache<F>,
        gy: &Array4<F>,
        grads: Option<&mut Conv2dGrads<F>>,
    ) -> Array4<F> {
        let (oc, ic, k, _) = self.w.dim();
        let (b, _, oh, ow) = gy.dim();
        let gy2 = gy
            .view()
            .permuted_axes([0, 2, 3, 1])
            .as_standard_layout()
            .into_shape_with_order((b * oh * ow, oc))
            .unwrap()
            .to_owned();
        let w2 = self.w.view().into_shape_with_order((oc, ic * k * k)).unwrap();
        if let Some(g) = grads {
            let gw2 = gy2.t().dot(&cache.cols);
            g.w += &gw2.into_shape_with_order((oc, ic, k, k)).unwrap();
            g.b += &gy2.sum_axis(ndarray::Axis(0));
        }
        let dcols = gy2.dot(&w2);
        col2im(&dcols, cache.x_shape, k, self.stride, self.pad)
    }

    pub fn zero_grads(&self) -> Conv2dGrads<F> {
        Conv2dGrads {
            w: Array4::zeros(self.w.raw_dim()),
            b: Array1::zeros(self.b.raw_dim()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng as _, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    /// Direct convolution loop, the independent oracle for the GEMM path.
    fn conv_naive(x: &Array4<f64>, w: &Array4<f64>, b: &Array1<f64>, s: usize, p: usize) -> Array4<f64> {
        let (bn, ic, h, wd) = x.dim();
        let (oc, _, k, _) = w.dim();
        let oh = conv_out_size(h, k, s, p);
        let ow = conv_out_size(wd, k, s, p);
        let mut y = Array4::zeros((bn, oc, oh, ow));
        for bi in 0..bn {
            for o in 0..oc {
                for i in 0..oh {
                    for j in 0..ow {
                        let mut acc = b[o];
                        for c in 0..ic {
                            for kh in 0..k {
                                for kw in 0..k {
                                    let ih = (i * s + kh) as isize - p as isize;
                                    let iw = (j * s + kw) as isize - p as isize;
                                    if ih >= 0 && iw >= 0 && (ih as usize) < h && (iw as usize) < wd
                                    {
                                        acc += x[(bi, c, ih as usize, iw as usize)]
                                            * w[(o, c, kh, kw)];
                                    }
                                }
                            }
                        }
                        y[(bi, o, i, j)] = acc;
                    }
                }
            }
        }
        y
    }

    #[test]
    fn gemm_conv_matches_naive() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        for (k, s, p, h) in [(4, 2, 1, 28), (3, 2, 1, 7), (3, 1, 1, 5)] {
            let layer = Conv2d::<f64>::new(3, 5, k, s, p, 0.5, &mut rng);
            let mut x = Array4::zeros((2, 3, h, h));
            fill_normal(x.as_slice_mut().unwrap(), 1.0, &mut rng);
            let (y, _) = layer.forward(&x);
            let y_ref = conv_naive(&x, &layer.w, &layer.b, s, p);
            let max_err = (&y - &y_ref).iter().fold(0.0f64, |m, v| m.max(v.abs()));
            assert!(max_err < 1e-12, "k{k} s{s} p{p}: {max_err}");
        }
    }

    #[test]
    fn spatial_plan_for_28px_input() {
        assert_eq!(conv_out_size(28, 4, 2, 1), 14);
        assert_eq!(conv_out_size(14, 4, 2, 1), 7);
        assert_eq!(conv_out_size(7, 3, 2, 1), 4);
    }

    #[test]
    fn backward_matches_finite_difference() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let layer = Conv2d::<f64>::new(2, 3, 3, 2, 1, 0.5, &mut rng);
        let mut x = Array4::zeros((2, 2, 7, 7));
        fill_normal(x.as_slice_mut().unwrap(), 1.0, &mut rng);
        let mut probe = Array4::zeros(layer.out_shape(&x));
        fill_normal(probe.as_slice_mut().unwrap(), 1.0, &mut rng);
        let f = |l: &Conv2d<f64>, x: &Array4<f64>| (l.forward(x).0 * &probe).sum();

        let (_, cache) = layer.forward(&x);
        let mut grads = layer.zero_grads();
        let gx = layer.backward(&cache, &probe, Some(&mut grads));

        let h = 1e-6;
        let mut rng2 = ChaCha12Rng::seed_from_u64(5);
        for _ in 0..20 {
            let idx = (
                rng2.gen_range(0..3),
                rng2.gen_range(0..2),
                rng2.gen_range(0..3),
                rng2.gen_range(0..3),
            );
            let mut lp = layer.clone();
            let mut lm = layer.clone();
            lp.w[idx] += h;
            lm.w[idx] -= h;
            let fd = (f(&lp, &x) - f(&lm, &x)) / (2.0 * h);
            assert!((grads.w[idx] - fd).abs() < 1e-7, "w{idx:?}");
        }
        for _ in 0..20 {
            let idx = (
                rng2.gen_range(0..2),
                rng2.gen_range(0..2),
                rng2.gen_range(0..7),
                rng2.gen_range(0..7),
            );
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[idx] += h;
            xm[idx] -= h;
            let fd = (f(&layer, &xp) - f(&layer, &xm)) / (2.0 * h);
            assert!((gx[idx] - fd).abs() < 1e-7, "x{idx:?}");
        }
        use rand::Rng as _;
    }
}
