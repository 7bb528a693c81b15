use rayon::prelude::*;

use super::FusionError;
use crate::matrix::Matrix;
use crate::rng::SplitMix64;
use crate::scalar::{dot, Real};

/// Single-head projection weights; `Q = W_Q x` per token.
#[derive(Debug, Clone, PartialEq)]
pub struct AttentionParams<T> {
    pub w_q: Matrix<T>,
    pub w_k: Matrix<T>,
    pub w_v: Matrix<T>,
}

/// How reductions over keys are accumulated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Summation {
    /// Key order, fastest.
    #[default]
    Sequential,
    /// Terms sorted by value before summing, which makes the output
    /// bit-identical under any permutation of the keys.
    Sorted,
}

impl<T: Real> AttentionParams<T> {
    pub fn new(w_q: Matrix<T>, w_k: Matrix<T>, w_v: Matrix<T>) -> Result<Self, FusionError> {
        let d = w_q.rows();
        for (name, m) in [("W_Q", &w_q), ("W_K", &w_k), ("W_V", &w_v)] {
            if m.rows() != d || m.cols() != d {
                return Err(FusionError::BadParams(format!("{name} must be {d}×{d}")));
            }
            if !m.is_finite() {
                return Err(FusionError::BadParams(format!("{name} has non-finite entries")));
            }
        }
        Ok(Self { w_q, w_k, w_v })
    }

    /// Xavier-uniform projections drawn in the order W_Q, W_K, W_V.
    pub fn seeded(d: usize, seed: u64) -> Self {
        let mut rng = SplitMix64::new(seed);
        let a = (6.0 / (2 * d) as f64).sqrt();
        let mut draw = || Matrix::from_vec(d, d, (0..d * d).map(|_| T::lit(rng.symmetric(a))).collect());
        let w_q = draw();
        let w_k = draw();
        let w_v = draw();
        Self { w_q, w_k, w_v }
    }

    pub fn d_model(&self) -> usize {
        self.w_q.rows()
    }

    pub fn scale(&self) -> T {
        T::one() / T::lit(self.d_model() as f64).sqrt()
    }
}

fn check_dims<T: Real>(x: &Matrix<T>, d: usize, what: &'static str) -> Result<(), FusionError> {
    if x.cols() != d {
        return Err(FusionError::DimMismatch { what, expected: d, actual: x.cols() });
    }
    Ok(())
}

fn sorted_sum<T: Real>(terms: &mut [T]) -> T {
    terms.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    terms.iter().fold(T::zero(), |acc, v| acc + *v)
}

/// Softmax weights of one query row against all keys (max-subtracted).
fn row_weights<T: Real>(q: &[T], k: &Matrix<T>, scale: T, summation: Summation) -> Vec<T> {
    let logits: Vec<T> = (0..k.rows()).map(|j| dot(q, k.row(j)) * scale).collect();
    let max = logits.iter().fold(T::neg_infinity(), |m, v| m.max(*v));
    let mut exps: Vec<T> = logits.iter().map(|l| (*l - max).exp()).collect();
    let z = match summation {
        Summation::Sequential => exps.iter().fold(T::zero(), |acc, v| acc + *v),
        Summation::Sorted => sorted_sum(&mut exps.clone()),
    };
    exps.iter_mut().for_each(|e| *e = *e / z);
    exps
}

fn projected<T: Real>(queries: &Matrix<T>, kv: &Matrix<T>, p: &AttentionParams<T>) -> Result<[Matrix<T>; 3], FusionError> {
    let d = p.d_model();
    check_dims(queries, d, "queries")?;
    check_dims(kv, d, "keys/values")?;
    if kv.rows() == 0 {
        return Err(FusionError::EmptyKeys);
    }
    Ok([p.w_q.apply_rows(queries), p.w_k.apply_rows(kv), p.w_v.apply_rows(kv)])
}

/// Row-stochastic `softmax(Q Kᵀ / √d)` (n × m).
pub fn attention_weights<T: Real>(
    queries: &Matrix<T>,
    keys_values: &Matrix<T>,
    params: &AttentionParams<T>,
    summation: Summation,
) -> Result<Matrix<T>, FusionError> {
    let [q, k, _] = projected(queries, keys_values, params)?;
    let scale = params.scale();
    let rows: Vec<T> = (0..q.rows()).into_par_iter().flat_map_iter(|i| row_weights(q.row(i), &k, scale, summation)).collect();
    Ok(Matrix::from_vec(q.rows(), k.rows(), rows))
}

pub fn cross_attention<T: Real>(
    queries: &Matrix<T>,
    keys_values: &Matrix<T>,
    params: &AttentionParams<T>,
) -> Result<Matrix<T>, FusionError> {
    cross_attention_with(queries, keys_values, params, Summation::Sequential)
}

/// `softmax(Q Kᵀ · scale) V` with each query row computed independently,
/// so results do not depend on how rows are scheduled.
pub fn cross_attention_with<T: Real>(
    queries: &Matrix<T>,
    keys_values: &Matrix<T>,
    params: &AttentionParams<T>,
    summation: Summation,
) -> Result<Matrix<T>, FusionError> {
    let [q, k, v] = projected(queries, keys_values, params)?;
    let scale = params.scale();
    let d = params.d_model();
    let m = k.rows();
    let mut out = vec![T::zero(); q.rows() * d];
    out.par_chunks_mut(d.max(1)).enumerate().for_each(|(i, row)| {
        let w = row_weights(q.row(i), &k, scale, summation);
        match summation {
            Summation::Sequential => {
                for (j, wj) in w.iter().enumerate() {
                    for (o, vj) in row.iter_mut().zip(v.row(j)) {
                        *o = *o + *wj * *vj;
                    }
                }
            }
            Summation::Sorted => {
                let mut terms = vec![T::zero(); m];
                for (c, o) in row.iter_mut().enumerate() {
                    for j in 0..m {
                        terms[j] = w[j] * v.get(j, c);
                    }
                    *o = sorted_sum(&mut terms);
                }
            }
        }
    });
    Ok(Matrix::from_vec(q.rows(), d, out))
}

/// `h_map_proj + CrossAttn(h_box_proj, h_coor)`; with no boxes the map
/// tokens pass through unchanged.
pub fn fuse_vehicle<T: Real>(
    h_map_proj: &Matrix<T>,
    h_box_proj: &Matrix<T>,
    h_coor: &Matrix<T>,
    params: &AttentionParams<T>,
) -> Result<Matrix<T>, FusionError> {
    let d = params.d_model();
    check_dims(h_map_proj, d, "h_map_proj")?;
    check_dims(h_box_proj, d, "h_box_proj")?;
    if h_map_proj.rows() != h_box_proj.rows() {
        return Err(FusionError::DimMismatch { what: "token count", expected: h_map_proj.rows(), actual: h_box_proj.rows() });
    }
    if h_coor.rows() == 0 {
        return Ok(h_map_proj.clone());
    }
    let attended = cross_attention(h_box_proj, h_coor, params)?;
    Ok(h_map_proj.add(&attended))
}

/// `CrossAttn(cat(h_vehicle, h_c), h_world)`; `n + V` output tokens.
pub fn fuse_condition<T: Real>(
    h_vehicle: &Matrix<T>,
    h_c: &Matrix<T>,
    h_world: &Matrix<T>,
    params: &AttentionParams<T>,
) -> Result<Matrix<T>, FusionError> {
    let d = params.d_model();
    check_dims(h_vehicle, d, "h_vehicle")?;
    check_dims(h_c, d, "h_c")?;
    cross_attention(&h_vehicle.vstack(h_c), h_world, params)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random(rows: usize, cols: usize, rng: &mut SplitMix64) -> Matrix<f64> {
        Matrix::from_vec(rows, cols, (0..rows * cols).map(|_| rng.symmetric(1.0)).collect())
    }

    #[test]
    fn singleton_key_returns_projected_value() {
        let mut rng = SplitMix64::new(1);
        let p = AttentionParams::<f64>::seeded(4, 2);
        let q = random(3, 4, &mut rng);
        let kv = random(1, 4, &mut rng);
        let out = cross_attention(&q, &kv, &p).unwrap();
        let v0 = p.w_v.mul_vec(kv.row(0));
        for i in 0..3 {
            for (a, b) in out.row(i).iter().zip(&v0) {
                assert!((a - b).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn empty_keys_rejected() {
        let p = AttentionParams::<f64>::seeded(4, 2);
        let q = Matrix::zeros(2, 4);
        assert_eq!(cross_attention(&q, &Matrix::zeros(0, 4), &p), Err(FusionError::EmptyKeys));
        assert!(matches!(cross_attention(&q, &Matrix::zeros(2, 3), &p), Err(FusionError::DimMismatch { .. })));
    }

    #[test]
    fn vehicle_fusion_without_boxes_is_passthrough() {
        let mut rng = SplitMix64::new(5);
        let p = AttentionParams::<f64>::seeded(4, 2);
        let map = random(6, 4, &mut rng);
        let boxes = random(6, 4, &mut rng);
        assert_eq!(fuse_vehicle(&map, &boxes, &Matrix::zeros(0, 4), &p).unwrap(), map);
    }

    #[test]
    fn condition_fusion_token_count() {
        let mut rng = SplitMix64::new(6);
        let p = AttentionParams::<f64>::seeded(4, 3);
        let out = fuse_condition(&random(5, 4, &mut rng), &random(2, 4, &mut rng), &random(7, 4, &mut rng), &p).unwrap();
        assert_eq!((out.rows(), out.cols()), (7, 4));
    }

    #[test]
    fn params_must_be_square() {
        let m = Matrix::<f64>::zeros(3, 3);
        assert!(AttentionParams::new(m.clone(), Matrix::zeros(3, 2), m).is_err());
    }
}
