use serde::{Deserialize, Serialize};

use super::EmbedError;
use crate::matrix::Matrix;
use crate::rng::SplitMix64;
use crate::scalar::Real;
use crate::tensor_file::{TensorData, TensorEntry, TensorFile};

/// Where a parameter block came from; recorded in run manifests.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Seeded { seed: u64 },
    Loaded { file: String },
}

/// Fully connected layer `y = W x + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct Linear<T> {
    /// `out × in`.
    pub weight: Matrix<T>,
    pub bias: Vec<T>,
}

impl<T: Real> Linear<T> {
    pub fn in_dim(&self) -> usize {
        self.weight.cols()
    }

    pub fn out_dim(&self) -> usize {
        self.weight.rows()
    }

    pub fn forward(&self, x: &[T]) -> Vec<T> {
        let mut y = self.weight.mul_vec(x);
        for (v, b) in y.iter_mut().zip(&self.bias) {
            *v = *v + *b;
        }
        y
    }

    /// Xavier-uniform weights drawn row-major from `rng`, zero bias.
    pub fn seeded(in_dim: usize, out_dim: usize, rng: &mut SplitMix64) -> Self {
        let a = (6.0 / (in_dim + out_dim) as f64).sqrt();
        let data = (0..in_dim * out_dim).map(|_| T::lit(rng.symmetric(a))).collect();
        Self { weight: Matrix::from_vec(out_dim, in_dim, data), bias: vec![T::zero(); out_dim] }
    }
}

/// `0.5 x (1 + erf(x / √2))`.
pub fn gelu<T: Real>(x: T) -> T {
    let half = T::lit(0.5);
    half * x * (T::one() + (x * T::FRAC_1_SQRT_2()).erf())
}

/// Multi-layer perceptron with GELU between layers and identity output.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpParams<T> {
    pub layers: Vec<Linear<T>>,
    pub provenance: Provenance,
}

impl<T: Real> MlpParams<T> {
    /// Seeded parameters for layer widths `dims` (input first). Every
    /// weight comes from one splitmix64 stream seeded with `seed`, layer by
    /// layer in row-major order.
    pub fn seeded(dims: &[usize], seed: u64) -> Result<Self, EmbedError> {
        if dims.len() < 2 || dims.contains(&0) {
            return Err(EmbedError::BadShape(format!("MLP needs at least two non-zero widths, got {dims:?}")));
        }
        let mut rng = SplitMix64::new(seed);
        let layers = dims.windows(2).map(|w| Linear::seeded(w[0], w[1], &mut rng)).collect();
        Ok(Self { layers, provenance: Provenance::Seeded { seed } })
    }

    /// Validates adjacent layer widths and finiteness.
    pub fn from_layers(layers: Vec<Linear<T>>, provenance: Provenance) -> Result<Self, EmbedError> {
        if layers.is_empty() {
            return Err(EmbedError::BadShape("MLP has no layers".into()));
        }
        for (i, l) in layers.iter().enumerate() {
            if l.bias.len() != l.out_dim() {
                return Err(EmbedError::BadShape(format!("layer {i}: bias length {} != {}", l.bias.len(), l.out_dim())));
            }
            if !l.weight.is_finite() || l.bias.iter().any(|b| !b.is_finite()) {
                return Err(EmbedError::NonFinite(format!("layer {i}")));
            }
        }
        for (i, w) in layers.windows(2).enumerate() {
            if w[0].out_dim() != w[1].in_dim() {
                return Err(EmbedError::BadShape(format!(
                    "layer {i} outputs {} but layer {} expects {}",
                    w[0].out_dim(),
                    i + 1,
                    w[1].in_dim()
                )));
            }
        }
        Ok(Self { layers, provenance })
    }

    pub fn in_dim(&self) -> usize {
        self.layers[0].in_dim()
    }

    pub fn out_dim(&self) -> usize {
        self.layers.last().expect("non-empty").out_dim()
    }

    pub fn dims(&self) -> Vec<usize> {
        std::iter::once(self.in_dim()).chain(self.layers.iter().map(|l| l.out_dim())).collect()
    }

    pub fn forward(&self, x: &[T]) -> Result<Vec<T>, EmbedError> {
        if x.len() != self.in_dim() {
            return Err(EmbedError::DimMismatch { expected: self.in_dim(), actual: x.len() });
        }
        let mut h = x.to_vec();
        let last = self.layers.len() - 1;
        for (i, layer) in self.layers.iter().enumerate() {
            h = layer.forward(&h);
            if i < last {
                h.iter_mut().for_each(|v| *v = gelu(*v));
            }
        }
        Ok(h)
    }

    /// Named entries `{prefix}.{i}.weight` (`out × in`) and `{prefix}.{i}.bias`.
    pub fn to_entries(&self, prefix: &str) -> Vec<TensorEntry> {
        let mut out = Vec::new();
        for (i, l) in self.layers.iter().enumerate() {
            let w: Vec<f64> = l.weight.as_slice().iter().map(|v| v.to_f64_lossy()).collect();
            let b: Vec<f64> = l.bias.iter().map(|v| v.to_f64_lossy()).collect();
            out.push(TensorEntry::new(
                format!("{prefix}.{i}.weight"),
                vec![l.out_dim() as u32, l.in_dim() as u32],
                TensorData::F64(w),
            ));
            out.push(TensorEntry::new(format!("{prefix}.{i}.bias"), vec![l.out_dim() as u32], TensorData::F64(b)));
        }
        out
    }

    pub fn from_tensor_file(file: &TensorFile, prefix: &str, origin: &str) -> Result<Self, EmbedError> {
        let mut layers = Vec::new();
        for i in 0.. {
            let Some(w) = file.get(&format!("{prefix}.{i}.weight")) else {
                break;
            };
            let b = file
                .get(&format!("{prefix}.{i}.bias"))
                .ok_or_else(|| EmbedError::MissingTensor(format!("{prefix}.{i}.bias")))?;
            let [rows, cols] = w.dims[..] else {
                return Err(EmbedError::BadShape(format!("{prefix}.{i}.weight must be rank 2")));
            };
            if b.dims != [rows] {
                return Err(EmbedError::BadShape(format!("{prefix}.{i}.bias must have shape [{rows}]")));
            }
            let weight = Matrix::from_vec(rows as usize, cols as usize, w.data.to_f64().into_iter().map(T::lit).collect());
            let bias = b.data.to_f64().into_iter().map(T::lit).collect();
            layers.push(Linear { weight, bias });
        }
        if layers.is_empty() {
            return Err(EmbedError::MissingTensor(format!("{prefix}.0.weight")));
        }
        Self::from_layers(layers, Provenance::Loaded { file: origin.to_string() })
    }
}
