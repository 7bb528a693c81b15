//! NeRF-style sinusoidal embedding with octave frequencies.

use crate::scalar::Real;

/// Frequencies `2^0 π … 2^(L−1) π`; each scalar expands to `2L` values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct FourierSpec {
    pub num_frequencies: usize,
}

impl FourierSpec {
    pub const DEFAULT_FREQUENCIES: usize = 8;

    pub fn new(num_frequencies: usize) -> Self {
        assert!(num_frequencies >= 1, "Fourier embedding needs at least one frequency");
        Self { num_frequencies }
    }

    pub fn dim_per_scalar(&self) -> usize {
        2 * self.num_frequencies
    }

    pub fn output_dim(&self, n: usize) -> usize {
        n * self.dim_per_scalar()
    }
}

impl Default for FourierSpec {
    fn default() -> Self {
        Self::new(Self::DEFAULT_FREQUENCIES)
    }
}

/// `[sin(2^0 π x), cos(2^0 π x), …, sin(2^(L−1) π x), cos(2^(L−1) π x)]` per
/// scalar, concatenated in input order.
pub fn fourier_embed<T: Real>(x: &[T], spec: &FourierSpec) -> Vec<T> {
    let mut out = Vec::with_capacity(spec.output_dim(x.len()));
    fourier_embed_into(x, spec, &mut out);
    out
}

pub fn fourier_embed_into<T: Real>(x: &[T], spec: &FourierSpec, out: &mut Vec<T>) {
    for &v in x {
        let mut freq = T::PI();
        for _ in 0..spec.num_frequencies {
            let (s, c) = (freq * v).sin_cos();
            out.push(s);
            out.push(c);
            freq = freq + freq;
        }
    }
}
