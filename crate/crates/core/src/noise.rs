//! DDPM forward-process utilities: β and ᾱ tables, forward noising and the
//! clean-first-frame training mask.

use thiserror::Error;

use crate::rng::SplitMix64;
use crate::scalar::Real;

pub const DEFAULT_STEPS: usize = 1000;
pub const DEFAULT_BETA_START: f64 = 1e-4;
pub const DEFAULT_BETA_END: f64 = 2e-2;

#[derive(Debug, Error, PartialEq)]
pub enum NoiseError {
    #[error("invalid schedule range: {0}")]
    InvalidRange(String),
    #[error("timestep {t} outside 1..={steps}")]
    StepOutOfRange { t: usize, steps: usize },
    #[error("shape mismatch: z0 has {z0} elements, eps has {eps}")]
    ShapeMismatch { z0: usize, eps: usize },
}

/// `ᾱ_t = Π_{i≤t} (1 − β_i)` for timesteps `t = 1..=steps`, stored 0-based.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSchedule<T> {
    betas: Vec<T>,
    alpha_bars: Vec<T>,
}

impl<T: Real> NoiseSchedule<T> {
    pub fn from_betas(betas: Vec<T>) -> Result<Self, NoiseError> {
        if betas.is_empty() {
            return Err(NoiseError::InvalidRange("at least one step is required".into()));
        }
        if let Some(b) = betas.iter().find(|b| !(**b > T::zero() && **b < T::one())) {
            return Err(NoiseError::InvalidRange(format!("beta {b} not in (0, 1)")));
        }
        let mut alpha_bars = Vec::with_capacity(betas.len());
        let mut acc = T::one();
        for b in &betas {
            acc = acc * (T::one() - *b);
            alpha_bars.push(acc);
        }
        Ok(Self { betas, alpha_bars })
    }

    pub fn steps(&self) -> usize {
        self.betas.len()
    }

    pub fn betas(&self) -> &[T] {
        &self.betas
    }

    pub fn alpha_bars(&self) -> &[T] {
        &self.alpha_bars
    }

    /// β at 1-based timestep `t`.
    pub fn beta(&self, t: usize) -> Result<T, NoiseError> {
        self.check(t).map(|i| self.betas[i])
    }

    /// ᾱ at 1-based timestep `t`.
    pub fn alpha_bar(&self, t: usize) -> Result<T, NoiseError> {
        self.check(t).map(|i| self.alpha_bars[i])
    }

    fn check(&self, t: usize) -> Result<usize, NoiseError> {
        if t == 0 || t > self.steps() {
            return Err(NoiseError::StepOutOfRange { t, steps: self.steps() });
        }
        Ok(t - 1)
    }

    /// `t,beta,alpha_bar` rows with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,beta,alpha_bar\n");
        for (i, (b, a)) in self.betas.iter().zip(&self.alpha_bars).enumerate() {
            out.push_str(&format!("{},{},{}\n", i + 1, b, a));
        }
        out
    }
}

/// Betas linearly spaced from `beta_start` to `beta_end` inclusive.
pub fn linear_schedule<T: Real>(steps: usize, beta_start: f64, beta_end: f64) -> Result<NoiseSchedule<T>, NoiseError> {
    if steps == 0 {
        return Err(NoiseError::InvalidRange("steps must be at least 1".into()));
    }
    if !(0.0 < beta_start && beta_start <= beta_end && beta_end < 1.0) {
        return Err(NoiseError::InvalidRange(format!("need 0 < {beta_start} <= {beta_end} < 1")));
    }
    let betas = (0..steps)
        .map(|i| {
            let frac = if steps == 1 { 0.0 } else { i as f64 / (steps - 1) as f64 };
            T::lit(beta_start + (beta_end - beta_start) * frac)
        })
        .collect();
    NoiseSchedule::from_betas(betas)
}

/// `√ᾱ_t · z0 + √(1 − ᾱ_t) · eps`, element-wise.
pub fn add_noise<T: Real>(z0: &[T], t: usize, eps: &[T], sched: &NoiseSchedule<T>) -> Result<Vec<T>, NoiseError> {
    if z0.len() != eps.len() {
        return Err(NoiseError::ShapeMismatch { z0: z0.len(), eps: eps.len() });
    }
    let ab = sched.alpha_bar(t)?;
    let (signal, noise) = (ab.sqrt(), (T::one() - ab).sqrt());
    Ok(z0.iter().zip(eps).map(|(z, e)| signal * *z + noise * *e).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameNoise {
    Noised,
    /// Kept clean as an image condition, at timestep 0.
    Clean,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameMask {
    pub frames: Vec<FrameNoise>,
    pub timesteps: Vec<usize>,
}

impl FrameMask {
    pub fn first_frame_clean(&self) -> bool {
        self.frames.first() == Some(&FrameNoise::Clean)
    }
}

/// With probability `p_clean_first` frame 0 is left un-noised at timestep
/// 0. The remaining frames share one timestep drawn uniformly from
/// `1..=steps`. The first draw decides the mask, the second the timestep.
pub fn sample_frame_mask(frames: usize, p_clean_first: f64, seed: u64, steps: usize) -> FrameMask {
    assert!((0.0..=1.0).contains(&p_clean_first), "probability out of range");
    assert!(steps >= 1, "schedule needs at least one step");
    let mut rng = SplitMix64::new(seed);
    let clean = rng.bernoulli(p_clean_first);
    let t = rng.range_inclusive(1, steps as u64) as usize;
    let mut mask = FrameMask { frames: vec![FrameNoise::Noised; frames], timesteps: vec![t; frames] };
    if clean && frames > 0 {
        mask.frames[0] = FrameNoise::Clean;
        mask.timesteps[0] = 0;
    }
    mask
}
