use super::FusionError;
use crate::embed::Linear;
use crate::matrix::Matrix;
use crate::raster::RgbImage;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridLayout {
    PerView,
    /// `views` grids concatenated along width, in camera order.
    Inflated { views: usize },
}

/// Dense `[t][row][col][channel]` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TokenGrid<T> {
    pub t: usize,
    pub h: usize,
    pub w: usize,
    pub c: usize,
    pub layout: GridLayout,
    pub data: Vec<T>,
}

impl<T: Real> TokenGrid<T> {
    pub fn new(t: usize, h: usize, w: usize, c: usize, data: Vec<T>) -> Result<Self, FusionError> {
        if data.len() != t * h * w * c {
            return Err(FusionError::DimMismatch { what: "grid data", expected: t * h * w * c, actual: data.len() });
        }
        Ok(Self { t, h, w, c, layout: GridLayout::PerView, data })
    }

    pub fn zeros(t: usize, h: usize, w: usize, c: usize) -> Self {
        Self { t, h, w, c, layout: GridLayout::PerView, data: vec![T::zero(); t * h * w * c] }
    }

    fn index(&self, t: usize, row: usize, col: usize, ch: usize) -> usize {
        ((t * self.h + row) * self.w + col) * self.c + ch
    }

    pub fn get(&self, t: usize, row: usize, col: usize, ch: usize) -> T {
        self.data[self.index(t, row, col, ch)]
    }

    pub fn set(&mut self, t: usize, row: usize, col: usize, ch: usize, v: T) {
        let i = self.index(t, row, col, ch);
        self.data[i] = v;
    }

    fn cell(&self, t: usize, row: usize, col: usize) -> &[T] {
        let i = self.index(t, row, col, 0);
        &self.data[i..i + self.c]
    }

    /// One time slice as a single-frame grid.
    pub fn frame(&self, t: usize) -> TokenGrid<T> {
        let n = self.h * self.w * self.c;
        TokenGrid { t: 1, layout: self.layout, data: self.data[t * n..(t + 1) * n].to_vec(), ..*self }
    }
}

/// `v × (t, h, w, c)` → `(t, h, w·v, c)`, views side by side along width.
pub fn inflate_views<T: Real>(grids: &[TokenGrid<T>]) -> Result<TokenGrid<T>, FusionError> {
    let first = grids.first().ok_or(FusionError::DimMismatch { what: "view count", expected: 1, actual: 0 })?;
    let (t, h, w, c) = (first.t, first.h, first.w, first.c);
    for g in grids {
        if (g.t, g.h, g.w, g.c) != (t, h, w, c) {
            return Err(FusionError::DimMismatch { what: "view grid shape", expected: t * h * w * c, actual: g.t * g.h * g.w * g.c });
        }
        if g.layout != GridLayout::PerView {
            return Err(FusionError::BadParams("grid is already inflated".into()));
        }
    }
    let v = grids.len();
    let mut data = Vec::with_capacity(v * first.data.len());
    for ti in 0..t {
        for row in 0..h {
            for g in grids {
                let start = g.index(ti, row, 0, 0);
                data.extend_from_slice(&g.data[start..start + w * c]);
            }
        }
    }
    Ok(TokenGrid { t, h, w: w * v, c, layout: GridLayout::Inflated { views: v }, data })
}

pub fn deinflate_views<T: Real>(grid: &TokenGrid<T>) -> Result<Vec<TokenGrid<T>>, FusionError> {
    let GridLayout::Inflated { views } = grid.layout else {
        return Err(FusionError::BadParams("grid is not inflated".into()));
    };
    if views == 0 || grid.w % views != 0 {
        return Err(FusionError::DimMismatch { what: "inflated width", expected: views, actual: grid.w });
    }
    let w = grid.w / views;
    let mut out: Vec<TokenGrid<T>> = (0..views).map(|_| TokenGrid::zeros(grid.t, grid.h, w, grid.c)).collect();
    for (v, g) in out.iter_mut().enumerate() {
        g.data.clear();
        for ti in 0..grid.t {
            for row in 0..grid.h {
                let start = grid.index(ti, row, v * w, 0);
                g.data.extend_from_slice(&grid.data[start..start + w * grid.c]);
            }
        }
    }
    Ok(out)
}

/// Mean of each `factor × factor` block, channels scaled to [0, 1]; a
/// stand-in for the 8× spatial reduction of a video autoencoder.
pub fn pool_image<T: Real>(image: &RgbImage, factor: usize) -> TokenGrid<T> {
    let (w, h) = (image.width as usize / factor, image.height as usize / factor);
    let mut grid = TokenGrid::zeros(1, h, w, 3);
    let norm = 1.0 / (255.0 * (factor * factor) as f64);
    let mut acc = vec![[0u32; 3]; w];
    for row in 0..h {
        acc.iter_mut().for_each(|a| *a = [0; 3]);
        for y in row * factor..(row + 1) * factor {
            let line = &image.data[y * image.width as usize * 3..];
            for (col, a) in acc.iter_mut().enumerate() {
                for x in col * factor..(col + 1) * factor {
                    for ch in 0..3 {
                        a[ch] += line[x * 3 + ch] as u32;
                    }
                }
            }
        }
        for (col, a) in acc.iter().enumerate() {
            for ch in 0..3 {
                grid.set(0, row, col, ch, T::lit(a[ch] as f64 * norm));
            }
        }
    }
    grid
}

/// Non-overlapping `patch × patch` tokens of frame `t`, row-major over
/// patches, each flattened `[row][col][channel]`. Partial patches at the
/// border are zero padded.
pub fn patchify<T: Real>(grid: &TokenGrid<T>, t: usize, patch: usize) -> Matrix<T> {
    let (ph, pw) = (grid.h.div_ceil(patch), grid.w.div_ceil(patch));
    let dim = patch * patch * grid.c;
    let mut data = Vec::with_capacity(ph * pw * dim);
    for pr in 0..ph {
        for pc in 0..pw {
            for dr in 0..patch {
                for dc in 0..patch {
                    let (row, col) = (pr * patch + dr, pc * patch + dc);
                    if row < grid.h && col < grid.w {
                        data.extend_from_slice(grid.cell(t, row, col));
                    } else {
                        data.extend(std::iter::repeat_n(T::zero(), grid.c));
                    }
                }
            }
        }
    }
    Matrix::from_vec(ph * pw, dim, data)
}

/// Applies a linear patch embedder to every token row.
pub fn embed_tokens<T: Real>(tokens: &Matrix<T>, embedder: &Linear<T>) -> Result<Matrix<T>, FusionError> {
    if tokens.cols() != embedder.in_dim() {
        return Err(FusionError::DimMismatch { what: "patch embedder input", expected: embedder.in_dim(), actual: tokens.cols() });
    }
    let mut out = embedder.weight.apply_rows(tokens);
    for r in 0..out.rows() {
        for (v, b) in out.row_mut(r).iter_mut().zip(&embedder.bias) {
            *v = *v + *b;
        }
    }
    Ok(out)
}
