//! Size-agnostic convolutional regressor mapping circuit descriptors (and
//! optionally noisy magnetization data) to the exact mean magnetization.
//!
//! The network is a stack of same-size convolutions with replicate (edge
//! clamp) padding and ReLU, a single global average pooling layer placed
//! after the last convolution, and a small dense head with a linear scalar
//! output. Because pooling collapses all spatial axes, one set of weights
//! accepts any section size `N` (and any depth `P` for the two-dimensional
//! variant), which is what lets a model trained on small circuits evaluate
//! larger ones.
//!
//! Replicate padding rather than zero padding keeps a spatially constant
//! input exactly constant through every convolution, so the pooled features —
//! and therefore the prediction — do not depend on `N` for such inputs. Zero
//! padding would leak a size-dependent edge contribution into the pooled
//! average.
//!
//! Internally a batch of feature maps is stored as a `(batch·spatial, C)`
//! matrix plus a [`MapDims`] layout tag; convolutions are evaluated as
//! `im2col` gathers followed by one matrix product per layer.

mod adam;
mod input;
mod io;
mod train;

pub use adam::{AdamParams, AdamState};
pub use input::{build_input, InputKind, InputTensor};
pub use io::{load_model, save_model, MODEL_MAGIC, MODEL_VERSION};
pub use train::{predict_batch, train, TrainHistory, TrainParams};

use ndarray::{Array1, Array2, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuits::Config;
use crate::error::{Error, Result};
use crate::scalar::{count, lit, Real};

/// One convolution layer of an architecture description.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvSpec {
    pub out_channels: usize,
    /// Kernel extent per spatial axis; must be odd so that same-size output
    /// is well defined.
    pub kernel: usize,
}

/// Architecture description: enough to rebuild a model skeleton from a file.
///
/// `config` fixes the dimensionality (one spatial axis for [`Config::A`], two
/// for [`Config::B`]); `inputs` fixes the channel count.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArchSpec {
    pub config: Config,
    pub inputs: InputKind,
    pub convs: Vec<ConvSpec>,
    /// Width of the dense layer between pooling and the scalar output.
    pub hidden: usize,
}

impl ArchSpec {
    /// Default architecture for the given circuit configuration and input
    /// kind: four convolutions (widths 64,64,64,64 for one-dimensional
    /// inputs, 32,64,64,64 for two-dimensional ones, kernel 3), global
    /// average pooling, dense 64 → 1.
    pub fn default_for(config: Config, inputs: InputKind) -> Self {
        let widths: &[usize] = match config {
            Config::A => &[64, 64, 64, 64],
            Config::B => &[32, 64, 64, 64],
        };
        let convs = widths
            .iter()
            .map(|&w| ConvSpec {
                out_channels: w,
                kernel: 3,
            })
            .collect();
        ArchSpec {
            config,
            inputs,
            convs,
            hidden: 64,
        }
    }

    /// Number of input channels implied by the input kind.
    pub fn in_channels(&self) -> usize {
        self.inputs.channels()
    }

    /// Spatial axes of the feature maps: 1 for config A, 2 for config B.
    pub fn spatial_axes(&self) -> usize {
        match self.config {
            Config::A => 1,
            Config::B => 2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.convs.is_empty() {
            return Err(Error::InvalidParameter(
                "architecture needs at least one convolution layer".into(),
            ));
        }
        for conv in &self.convs {
            if conv.out_channels == 0 {
                return Err(Error::InvalidParameter(
                    "convolution width must be at least 1".into(),
                ));
            }
            if conv.kernel == 0 || conv.kernel % 2 == 0 {
                return Err(Error::InvalidParameter(format!(
                    "kernel extent must be odd and positive, got {}",
                    conv.kernel
                )));
            }
        }
        if self.hidden == 0 {
            return Err(Error::InvalidParameter(
                "dense head width must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
struct ConvLayer<T> {
    /// Shape `(kernel^d · c_in, c_out)`; row order is kernel-offset major,
    /// input-channel minor, matching the `im2col` column layout.
    weight: Array2<T>,
    bias: Array1<T>,
}

#[derive(Clone, Debug, PartialEq)]
struct DenseLayer<T> {
    /// Shape `(c_in, c_out)`.
    weight: Array2<T>,
    bias: Array1<T>,
}

/// Convolutional regressor with fixed architecture and learned weights.
#[derive(Clone, Debug, PartialEq)]
pub struct CnnModel<T> {
    arch: ArchSpec,
    /// Seed the initial weights were drawn from; kept for provenance.
    seed: u64,
    convs: Vec<ConvLayer<T>>,
    hidden: DenseLayer<T>,
    out: DenseLayer<T>,
}

/// Loss gradients with respect to every model parameter, in model layout.
#[derive(Clone, Debug, PartialEq)]
pub struct Gradients<T> {
    convs: Vec<(Array2<T>, Array1<T>)>,
    hidden: (Array2<T>, Array1<T>),
    out: (Array2<T>, Array1<T>),
}

impl<T: Real> Gradients<T> {
    /// Flattens all gradients in model parameter order.
    pub fn to_flat(&self) -> Vec<T> {
        let mut flat = Vec::with_capacity(self.param_count());
        for (w, b) in &self.convs {
            flat.extend(w.iter().copied());
            flat.extend(b.iter().copied());
        }
        for (w, b) in [&self.hidden, &self.out] {
            flat.extend(w.iter().copied());
            flat.extend(b.iter().copied());
        }
        flat
    }
}

/// Spatial layout of a rectangular batch of feature maps stored as a
/// `(batch·n·p, channels)` matrix. `p` is fixed to 1 for config A.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct MapDims {
    pub batch: usize,
    pub n: usize,
    pub p: usize,
}

impl MapDims {
    pub(crate) fn rows(&self) -> usize {
        self.batch * self.n * self.p
    }

    pub(crate) fn spatial(&self) -> usize {
        self.n * self.p
    }
}

/// Gathers convolution windows with replicate padding into a
/// `(rows, c_in·kernel^d)` matrix. Column blocks are kernel-offset major with
/// the `c_in` channels contiguous inside each block.
fn im2col<T: Real>(map: &Array2<T>, dims: MapDims, kernel: usize, two_d: bool) -> Array2<T> {
    let c_in = map.ncols();
    let taps = if two_d { kernel * kernel } else { kernel };
    let width = c_in * taps;
    let mut cols = Array2::<T>::zeros((dims.rows(), width));
    let src = map.as_slice().expect("feature maps are standard layout");
    let dst = cols.as_slice_mut().expect("fresh array is standard layout");
    let half = kernel / 2;
    let (n, p) = (dims.n, dims.p);
    for b in 0..dims.batch {
        let base = b * n * p;
        for i in 0..n {
            for j in 0..p {
                let row = base + i * p + j;
                let out0 = row * width;
                for di in 0..kernel {
                    let ci = (i + di).saturating_sub(half).min(n - 1);
                    if two_d {
                        for dj in 0..kernel {
                            let cj = (j + dj).saturating_sub(half).min(p - 1);
                            let tap = di * kernel + dj;
                            let s0 = (base + ci * p + cj) * c_in;
                            let d0 = out0 + tap * c_in;
                            dst[d0..d0 + c_in].copy_from_slice(&src[s0..s0 + c_in]);
                        }
                    } else {
                        let s0 = (base + ci * p + j) * c_in;
                        let d0 = out0 + di * c_in;
                        dst[d0..d0 + c_in].copy_from_slice(&src[s0..s0 + c_in]);
                    }
                }
            }
        }
    }
    cols
}

/// Adjoint of [`im2col`]: scatter-adds window gradients back onto the source
/// feature map, including the clamped border positions.
fn fold_cols<T: Real>(dcols: &Array2<T>, dims: MapDims, kernel: usize, two_d: bool) -> Array2<T> {
    let taps = if two_d { kernel * kernel } else { kernel };
    let width = dcols.ncols();
    let c_in = width / taps;
    let mut dmap = Array2::<T>::zeros((dims.rows(), c_in));
    let src = dcols.as_slice().expect("gradient columns are standard layout");
    let dst = dmap.as_slice_mut().expect("fresh array is standard layout");
    let half = kernel / 2;
    let (n, p) = (dims.n, dims.p);
    for b in 0..dims.batch {
        let base = b * n * p;
        for i in 0..n {
            for j in 0..p {
                let row = base + i * p + j;
                let in0 = row * width;
                for di in 0..kernel {
                    let ci = (i + di).saturating_sub(half).min(n - 1);
                    if two_d {
                        for dj in 0..kernel {
                            let cj = (j + dj).saturating_sub(half).min(p - 1);
                            let tap = di * kernel + dj;
                            let d0 = (base + ci * p + cj) * c_in;
                            let s0 = in0 + tap * c_in;
                            for c in 0..c_in {
                                dst[d0 + c] += src[s0 + c];
                            }
                        }
                    } else {
                        let d0 = (base + ci * p + j) * c_in;
                        let s0 = in0 + di * c_in;
                        for c in 0..c_in {
                            dst[d0 + c] += src[s0 + c];
                        }
                    }
                }
            }
        }
    }
    dmap
}

/// Mean over all spatial positions of every sample: `(rows, c)` → `(batch, c)`.
pub(crate) fn global_avg_pool<T: Real>(map: &Array2<T>, dims: MapDims) -> Array2<T> {
    let c = map.ncols();
    let spatial = dims.spatial();
    let mut pooled = Array2::<T>::zeros((dims.batch, c));
    let src = map.as_slice().expect("feature maps are standard layout");
    let dst = pooled.as_slice_mut().expect("fresh array is standard layout");
    for r in 0..dims.rows() {
        let b = r / spatial;
        for cc in 0..c {
            dst[b * c + cc] += src[r * c + cc];
        }
    }
    let inv = T::one() / count::<T>(spatial);
    pooled.mapv_inplace(|v| v * inv);
    pooled
}

/// Everything the backward pass needs from one forward evaluation.
pub(crate) struct ForwardPass<T> {
    /// `maps[0]` is the input; `maps[l+1]` the post-ReLU output of conv `l`.
    maps: Vec<Array2<T>>,
    dims: MapDims,
    pooled: Array2<T>,
    /// Post-ReLU dense hidden activations, `(batch, hidden)`.
    hidden_act: Array2<T>,
    /// Scalar predictions, `(batch,)`.
    pub(crate) output: Array1<T>,
}

fn relu_inplace<T: Real>(a: &mut Array2<T>) {
    let zero = T::zero();
    a.mapv_inplace(|v| if v > zero { v } else { zero });
}

/// Ensures row-major contiguous storage; `dot` may return column-major
/// results when one operand is a transposed view.
fn into_standard<T: Real>(a: Array2<T>) -> Array2<T> {
    if a.is_standard_layout() {
        a
    } else {
        let dim = a.raw_dim();
        Array2::from_shape_vec(dim, a.iter().copied().collect())
            .expect("element count matches shape")
    }
}

impl<T: Real> CnnModel<T> {
    /// Builds a model with He-uniform random weights and zero biases drawn
    /// from a dedicated stream seeded by `seed`.
    pub fn new(arch: ArchSpec, seed: u64) -> Result<Self> {
        arch.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let taps_of = |k: usize| match arch.config {
            Config::A => k,
            Config::B => k * k,
        };
        let mut c_in = arch.in_channels();
        let mut convs = Vec::with_capacity(arch.convs.len());
        for spec in &arch.convs {
            let fan_in = taps_of(spec.kernel) * c_in;
            convs.push(ConvLayer {
                weight: he_uniform((fan_in, spec.out_channels), fan_in, &mut rng),
                bias: Array1::zeros(spec.out_channels),
            });
            c_in = spec.out_channels;
        }
        let hidden = DenseLayer {
            weight: he_uniform((c_in, arch.hidden), c_in, &mut rng),
            bias: Array1::zeros(arch.hidden),
        };
        let out = DenseLayer {
            weight: he_uniform((arch.hidden, 1), arch.hidden, &mut rng),
            bias: Array1::zeros(1),
        };
        Ok(CnnModel {
            arch,
            seed,
            convs,
            hidden,
            out,
        })
    }

    pub fn arch(&self) -> &ArchSpec {
        &self.arch
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Total number of learnable parameters.
    pub fn param_count(&self) -> usize {
        let mut n = 0;
        for l in &self.convs {
            n += l.weight.len() + l.bias.len();
        }
        n += self.hidden.weight.len() + self.hidden.bias.len();
        n += self.out.weight.len() + self.out.bias.len();
        n
    }

    /// Flattens all parameters (convolutions in order, each weight then
    /// bias, then the two dense layers).
    pub fn to_flat(&self) -> Vec<T> {
        let mut flat = Vec::with_capacity(self.param_count());
        for l in &self.convs {
            flat.extend(l.weight.iter().copied());
            flat.extend(l.bias.iter().copied());
        }
        for l in [&self.hidden, &self.out] {
            flat.extend(l.weight.iter().copied());
            flat.extend(l.bias.iter().copied());
        }
        flat
    }

    /// Overwrites all parameters from a flat vector in [`Self::to_flat`]
    /// order.
    pub fn load_flat(&mut self, flat: &[T]) -> Result<()> {
        if flat.len() != self.param_count() {
            return Err(Error::LengthMismatch {
                left: flat.len(),
                right: self.param_count(),
            });
        }
        let mut offset = 0;
        self.for_each_param_slice_mut(|slice| {
            slice.copy_from_slice(&flat[offset..offset + slice.len()]);
            offset += slice.len();
        });
        Ok(())
    }

    /// Visits every parameter array as a mutable slice, in flat order.
    pub(crate) fn for_each_param_slice_mut(&mut self, mut f: impl FnMut(&mut [T])) {
        for l in &mut self.convs {
            f(l.weight.as_slice_mut().expect("standard layout"));
            f(l.bias.as_slice_mut().expect("standard layout"));
        }
        for l in [&mut self.hidden, &mut self.out] {
            f(l.weight.as_slice_mut().expect("standard layout"));
            f(l.bias.as_slice_mut().expect("standard layout"));
        }
    }

    fn two_d(&self) -> bool {
        matches!(self.arch.config, Config::B)
    }

    /// Runs the network on a batch stored as a flat `(rows, c)` map.
    pub(crate) fn forward_internal(&self, input: Array2<T>, dims: MapDims) -> Result<ForwardPass<T>> {
        if input.ncols() != self.arch.in_channels() {
            return Err(Error::ChannelMismatch {
                got: input.ncols(),
                expected: self.arch.in_channels(),
            });
        }
        if input.nrows() != dims.rows() || dims.batch == 0 || dims.spatial() == 0 {
            return Err(Error::LengthMismatch {
                left: input.nrows(),
                right: dims.rows(),
            });
        }
        let two_d = self.two_d();
        let mut maps = Vec::with_capacity(self.convs.len() + 1);
        maps.push(input);
        for (layer, spec) in self.convs.iter().zip(&self.arch.convs) {
            let cols = im2col(maps.last().expect("nonempty"), dims, spec.kernel, two_d);
            let mut out = into_standard(cols.dot(&layer.weight));
            out += &layer.bias;
            relu_inplace(&mut out);
            maps.push(out);
        }
        let pooled = global_avg_pool(maps.last().expect("nonempty"), dims);
        let mut hidden_act = pooled.dot(&self.hidden.weight);
        hidden_act += &self.hidden.bias;
        relu_inplace(&mut hidden_act);
        let mut y = hidden_act.dot(&self.out.weight);
        y += &self.out.bias;
        let output = y.column(0).to_owned();
        Ok(ForwardPass {
            maps,
            dims,
            pooled,
            hidden_act,
            output,
        })
    }

    /// Backpropagates `d loss / d output` through a cached forward pass.
    pub(crate) fn backward_internal(&self, pass: &ForwardPass<T>, dout: &Array1<T>) -> Gradients<T> {
        let zero = T::zero();
        let dims = pass.dims;
        let two_d = self.two_d();
        // Output layer.
        let dy = dout.view().insert_axis(Axis(1)).to_owned(); // (batch, 1)
        let d_out_w = pass.hidden_act.t().dot(&dy);
        let d_out_b = dy.sum_axis(Axis(0));
        // Hidden dense layer.
        let mut dh = dy.dot(&self.out.weight.t());
        dh.zip_mut_with(&pass.hidden_act, |d, &a| {
            if a <= zero {
                *d = zero;
            }
        });
        let d_hid_w = pass.pooled.t().dot(&dh);
        let d_hid_b = dh.sum_axis(Axis(0));
        // Pooling.
        let dpooled = into_standard(dh.dot(&self.hidden.weight.t())); // (batch, c_last)
        let spatial = dims.spatial();
        let inv = T::one() / count::<T>(spatial);
        let c_last = dpooled.ncols();
        let mut dmap = Array2::<T>::zeros((dims.rows(), c_last));
        {
            let src = dpooled.as_slice().expect("standard layout");
            let dst = dmap.as_slice_mut().expect("standard layout");
            for r in 0..dims.rows() {
                let b = r / spatial;
                for cc in 0..c_last {
                    dst[r * c_last + cc] = src[b * c_last + cc] * inv;
                }
            }
        }
        // Convolutions, last to first.
        let mut conv_grads: Vec<(Array2<T>, Array1<T>)> = Vec::with_capacity(self.convs.len());
        for l in (0..self.convs.len()).rev() {
            dmap.zip_mut_with(&pass.maps[l + 1], |d, &a| {
                if a <= zero {
                    *d = zero;
                }
            });
            let kernel = self.arch.convs[l].kernel;
            let cols = im2col(&pass.maps[l], dims, kernel, two_d);
            let d_w = cols.t().dot(&dmap);
            let d_b = dmap.sum_axis(Axis(0));
            if l > 0 {
                let dcols = into_standard(dmap.dot(&self.convs[l].weight.t()));
                dmap = fold_cols(&dcols, dims, kernel, two_d);
            }
            conv_grads.push((d_w, d_b));
        }
        conv_grads.reverse();
        Gradients {
            convs: conv_grads,
            hidden: (d_hid_w, d_hid_b),
            out: (d_out_w, d_out_b),
        }
    }
}

impl<T: Real> Gradients<T> {
    /// Total number of gradient entries; matches the owning model.
    pub fn param_count(&self) -> usize {
        let mut n = 0;
        for (w, b) in &self.convs {
            n += w.len() + b.len();
        }
        n += self.hidden.0.len() + self.hidden.1.len();
        n += self.out.0.len() + self.out.1.len();
        n
    }
}

fn he_uniform<T: Real, R: Rng>(shape: (usize, usize), fan_in: usize, rng: &mut R) -> Array2<T> {
    let limit = (6.0 / fan_in as f64).sqrt();
    Array2::from_shape_simple_fn(shape, || lit::<T>(rng.gen_range(-limit..limit)))
}

/// Evaluates the model on a single input tensor.
pub fn forward<T: Real>(model: &CnnModel<T>, input: &InputTensor<T>) -> Result<T> {
    let (map, n, p) = input::tensor_map(input, model.arch.config)?;
    let dims = MapDims { batch: 1, n, p };
    let pass = model.forward_internal(map, dims)?;
    let y = pass.output[0];
    if !y.is_finite() {
        return Err(Error::NonFinitePrediction);
    }
    Ok(y)
}

/// Squared-error loss `(forward(input) − target)²` and its exact gradients
/// with respect to every model parameter.
pub fn gradients<T: Real>(
    model: &CnnModel<T>,
    input: &InputTensor<T>,
    target: T,
) -> Result<(T, Gradients<T>)> {
    let (map, n, p) = input::tensor_map(input, model.arch.config)?;
    let dims = MapDims { batch: 1, n, p };
    let pass = model.forward_internal(map, dims)?;
    let residual = pass.output[0] - target;
    let loss = residual * residual;
    let dout = Array1::from_vec(vec![residual + residual]);
    let grads = model.backward_internal(&pass, &dout);
    Ok((loss, grads))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array3;

    fn tiny_arch(config: Config, inputs: InputKind) -> ArchSpec {
        ArchSpec {
            config,
            inputs,
            convs: vec![
                ConvSpec {
                    out_channels: 5,
                    kernel: 3,
                },
                ConvSpec {
                    out_channels: 4,
                    kernel: 3,
                },
            ],
            hidden: 6,
        }
    }

    fn constant_tensor_a(n: usize, c: usize, value: f64) -> InputTensor<f64> {
        InputTensor::A(Array2::from_elem((n, c), value))
    }

    #[test]
    fn default_archs_match_declared_widths() {
        let a = ArchSpec::default_for(Config::A, InputKind::Hybrid);
        assert_eq!(
            a.convs.iter().map(|c| c.out_channels).collect::<Vec<_>>(),
            vec![64, 64, 64, 64]
        );
        let b = ArchSpec::default_for(Config::B, InputKind::Classical);
        assert_eq!(
            b.convs.iter().map(|c| c.out_channels).collect::<Vec<_>>(),
            vec![32, 64, 64, 64]
        );
        assert_eq!(a.in_channels(), 3);
        assert_eq!(b.in_channels(), 2);
        assert!(a.validate().is_ok());
        assert!(b.validate().is_ok());
    }

    #[test]
    fn arch_validation_rejects_even_kernel_and_empty_stack() {
        let mut arch = tiny_arch(Config::A, InputKind::Hybrid);
        arch.convs[0].kernel = 2;
        assert!(matches!(
            arch.validate(),
            Err(Error::InvalidParameter(_))
        ));
        let empty = ArchSpec {
            config: Config::A,
            inputs: InputKind::Hybrid,
            convs: vec![],
            hidden: 4,
        };
        assert!(empty.validate().is_err());
    }

    #[test]
    fn init_is_seed_deterministic_and_he_bounded() {
        let arch = tiny_arch(Config::A, InputKind::Hybrid);
        let m1 = CnnModel::<f64>::new(arch.clone(), 9).unwrap();
        let m2 = CnnModel::<f64>::new(arch.clone(), 9).unwrap();
        let m3 = CnnModel::<f64>::new(arch, 10).unwrap();
        assert_eq!(m1.to_flat(), m2.to_flat());
        assert_ne!(m1.to_flat(), m3.to_flat());
        // First conv: fan_in = 3 channels x kernel 3.
        let limit = (6.0f64 / 9.0).sqrt();
        for &w in m1.convs[0].weight.iter() {
            assert!(w.abs() <= limit);
        }
        assert!(m1.convs[0].bias.iter().all(|&b| b == 0.0));
    }

    #[test]
    fn zero_weights_give_zero_output() {
        let arch = tiny_arch(Config::A, InputKind::Hybrid);
        let mut model = CnnModel::<f64>::new(arch, 1).unwrap();
        let zeros = vec![0.0; model.param_count()];
        model.load_flat(&zeros).unwrap();
        let input = constant_tensor_a(4, 3, 0.7);
        assert_eq!(forward(&model, &input).unwrap(), 0.0);
    }

    #[test]
    fn constant_input_output_is_size_independent() {
        let arch = tiny_arch(Config::A, InputKind::Hybrid);
        let model = CnnModel::<f64>::new(arch, 5).unwrap();
        let y6 = forward(&model, &constant_tensor_a(6, 3, 0.3)).unwrap();
        let y12 = forward(&model, &constant_tensor_a(12, 3, 0.3)).unwrap();
        assert!((y6 - y12).abs() < 1e-10, "{y6} vs {y12}");

        let arch2 = tiny_arch(Config::B, InputKind::Hybrid);
        let model2 = CnnModel::<f64>::new(arch2, 5).unwrap();
        let t_small = InputTensor::B(Array3::from_elem((5, 4, 3), 0.2));
        let t_large = InputTensor::B(Array3::from_elem((11, 9, 3), 0.2));
        let ys = forward(&model2, &t_small).unwrap();
        let yl = forward(&model2, &t_large).unwrap();
        assert!((ys - yl).abs() < 1e-10, "{ys} vs {yl}");
    }

    #[test]
    fn forward_accepts_all_target_sizes() {
        let model =
            CnnModel::<f64>::new(tiny_arch(Config::A, InputKind::Hybrid), 2).unwrap();
        for n in 1..=16 {
            let y = forward(&model, &constant_tensor_a(n, 3, 0.1)).unwrap();
            assert!(y.is_finite());
        }
        let model2 =
            CnnModel::<f64>::new(tiny_arch(Config::B, InputKind::Classical), 2).unwrap();
        for &(n, p) in &[(2usize, 1usize), (6, 1), (6, 20), (16, 20), (3, 8)] {
            let t = InputTensor::B(Array3::from_elem((n, p, 2), 0.4));
            assert!(forward(&model2, &t).unwrap().is_finite());
        }
    }

    #[test]
    fn channel_and_config_mismatches_are_rejected() {
        let model =
            CnnModel::<f64>::new(tiny_arch(Config::A, InputKind::Hybrid), 3).unwrap();
        let two_channel = constant_tensor_a(4, 2, 0.5);
        assert!(matches!(
            forward(&model, &two_channel),
            Err(Error::ChannelMismatch { got: 2, expected: 3 })
        ));
        let b_tensor = InputTensor::B(Array3::from_elem((4, 3, 3), 0.5));
        assert!(matches!(
            forward(&model, &b_tensor),
            Err(Error::ConfigMismatch { .. })
        ));
    }

    #[test]
    fn pooling_is_permutation_invariant() {
        let dims = MapDims {
            batch: 2,
            n: 3,
            p: 2,
        };
        let map = Array2::from_shape_fn((dims.rows(), 4), |(r, c)| (r * 7 + c) as f64 * 0.1);
        let pooled = global_avg_pool(&map, dims);
        // Permute the spatial rows inside each sample and pool again.
        let mut permuted = map.clone();
        let perm = [4usize, 0, 3, 1, 5, 2];
        for (dst, &srcr) in perm.iter().enumerate() {
            for b in 0..dims.batch {
                let off = b * dims.spatial();
                for c in 0..4 {
                    permuted[(off + dst, c)] = map[(off + srcr, c)];
                }
            }
        }
        let pooled_perm = global_avg_pool(&permuted, dims);
        for (a, b) in pooled.iter().zip(pooled_perm.iter()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_residual_gives_zero_gradients() {
        let model =
            CnnModel::<f64>::new(tiny_arch(Config::A, InputKind::Hybrid), 11).unwrap();
        let input = constant_tensor_a(5, 3, 0.25);
        let y = forward(&model, &input).unwrap();
        let (loss, grads) = gradients(&model, &input, y).unwrap();
        assert_eq!(loss, 0.0);
        assert!(grads.to_flat().iter().all(|&g| g == 0.0));
    }

    #[test]
    fn doubling_the_residual_doubles_every_gradient() {
        let model =
            CnnModel::<f64>::new(tiny_arch(Config::A, InputKind::Hybrid), 12).unwrap();
        let input = constant_tensor_a(5, 3, 0.25);
        let y = forward(&model, &input).unwrap();
        let (_, g1) = gradients(&model, &input, y - 0.05).unwrap();
        let (_, g2) = gradients(&model, &input, y - 0.10).unwrap();
        let f1 = g1.to_flat();
        let f2 = g2.to_flat();
        assert_eq!(f1.len(), f2.len());
        for (a, b) in f1.iter().zip(f2.iter()) {
            assert!((2.0 * a - b).abs() <= 1e-12 * (1.0 + b.abs()), "{a} {b}");
        }
    }

    #[test]
    fn load_flat_checks_length() {
        let mut model =
            CnnModel::<f64>::new(tiny_arch(Config::A, InputKind::Classical), 4).unwrap();
        let short = vec![0.0; model.param_count() - 1];
        assert!(matches!(
            model.load_flat(&short),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn flat_round_trip_preserves_model() {
        let arch = tiny_arch(Config::B, InputKind::Hybrid);
        let model = CnnModel::<f64>::new(arch.clone(), 21).unwrap();
        let flat = model.to_flat();
        assert_eq!(flat.len(), model.param_count());
        let mut other = CnnModel::<f64>::new(arch, 22).unwrap();
        other.load_flat(&flat).unwrap();
        assert_eq!(other.to_flat(), flat);
        let t = InputTensor::B(Array3::from_elem((4, 3, 3), 0.3));
        assert_eq!(
            forward(&model, &t).unwrap(),
            forward(&other, &t).unwrap()
        );
    }
}
