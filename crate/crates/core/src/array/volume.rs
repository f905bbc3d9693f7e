//! Surface and enclosed volumes.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use super::cubature::integrate_over;
use super::region::clip_for;
use super::{Region, SphericalArray, WarpMode};
use crate::error::{domain, Error, Result};
use crate::rng::Stream;
use crate::special::{gamma, unit_ball_volume, unit_sphere_volume, Estimate, QuadratureSpec};

/// Samples per Monte Carlo chunk; chunk `c` reads Philox stream `c`.
pub const MC_CHUNK: usize = 1 << 16;

/// Closed form for `Vol(𝒜_k^{n-1}(R))`:
///
/// ```text
/// π^{(2n-k)/2} Γ(k/(2k-2))^{n-k}
/// ------------------------------------------------------------------ R^{n-1}
/// 2^{n-k-2} (k-1)^{n-k} (n-k) Γ((n-k)/2) Γ(k/2) Γ((2k-1)/(2k-2))^{n-k}
/// ```
///
/// which is the factorized form with the Gamma expression for `M_k` and the
/// ball and sphere volume formulas substituted. The factor `n - k` comes from
/// `Vol(B^m) = 2π^{m/2}/(m Γ(m/2))`; it is invisible for the equizonal
/// ovaloids, where `n - k = 1`.
pub fn total_volume_closed_form(n: usize, k: usize, r: f64) -> Result<f64> {
    super::check_nk(n, k)?;
    let (nf, kf) = (n as f64, k as f64);
    let d = 2.0 * kf - 2.0;
    let base = (n - k) as i32;
    let lead = PI.powf((2.0 * nf - kf) / 2.0) / (2f64.powi(base - 2) * (kf - 1.0).powi(base) * (nf - kf));
    let ratio = gamma(kf / d)?.powi(base)
        / (gamma((nf - kf) / 2.0)? * gamma(kf / 2.0)? * gamma((2.0 * kf - 1.0) / d)?.powi(base));
    Ok(lead * ratio * r.powi(n as i32 - 1))
}

/// `Vol(S^{k-1}(1))·Vol(B^{n-k}(M_k))·R^{n-1}`.
pub fn factorized_total_volume(n: usize, k: usize, m_k: f64, r: f64) -> f64 {
    unit_sphere_volume(k) * unit_ball_volume(n - k) * m_k.powi((n - k) as i32) * r.powi(n as i32 - 1)
}

/// Surface volume of the equizonal ovaloid `𝒜_{n-1}^{n-1}(R)`.
pub fn equizonal_surface_volume(n: usize, r: f64) -> Result<f64> {
    if n < 3 {
        return Err(domain("equizonal ovaloids need n ≥ 3"));
    }
    let nf = n as f64;
    let g = gamma((nf - 1.0) / (2.0 * nf - 4.0))?
        / (gamma((nf - 1.0) / 2.0)? * gamma((2.0 * nf - 3.0) / (2.0 * nf - 4.0))?);
    Ok(2.0 * PI.powf(nf / 2.0) / (nf - 2.0) * g * r.powi(n as i32 - 1))
}

/// Volume enclosed by the equizonal ovaloid `𝒜_{n-1}^{n-1}(R)`.
pub fn equizonal_enclosed_volume(n: usize, r: f64) -> Result<f64> {
    if n < 3 {
        return Err(domain("equizonal ovaloids need n ≥ 3"));
    }
    let nf = n as f64;
    let g = gamma((nf - 1.0) / (nf - 2.0))? / (gamma((nf - 1.0) / 2.0)? * gamma((3.0 * nf - 4.0) / (2.0 * nf - 4.0))?);
    Ok(2.0 * PI.powf(nf / 2.0) / ((nf - 1.0) * (nf - 2.0)) * g * r.powi(n as i32))
}

#[derive(Debug, Clone, Serialize)]
pub struct TotalVolume {
    pub numeric: Estimate,
    /// Gamma-function closed form, for `𝒜_k^{n-1}(R)` only.
    pub closed_form: Option<f64>,
    /// `Vol(S^{k-1}(1))·Vol(B^{n-k}(M_k))·R^{n-1}`, for `𝒜_k^{n-1}(R)` only.
    pub factorized: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EnclosedVolume {
    /// `∫_Ω Vol(B^k(f))` by quadrature.
    pub value: f64,
    pub error: f64,
    pub mc_value: f64,
    pub mc_std_error: f64,
    pub mc_samples: usize,
    /// Closed form, for the equizonal ovaloids only.
    pub closed_form: Option<f64>,
}

impl SphericalArray {
    /// `Vol(π⁻¹(U ∩ Ω))`: the surface density integrated over `U ∩ Ω`.
    pub fn patch_volume(&self, u: &Region, spec: &QuadratureSpec) -> Result<Estimate> {
        let clip = clip_for(&self.base, Some(u))?;
        integrate_over(&clip, &|x: &[f64]| self.surface_density(x), spec)
    }

    /// `∫_{U ∩ Ω} f^p` (or over all of `Ω` without a region).
    pub fn warping_moment(&self, u: Option<&Region>, power: i32, spec: &QuadratureSpec) -> Result<Estimate> {
        let clip = clip_for(&self.base, u)?;
        integrate_over(&clip, &|x: &[f64]| Ok(self.warping(x)?.powi(power)), spec)
    }

    pub fn total_volume(&self, spec: &QuadratureSpec) -> Result<TotalVolume> {
        let clip = clip_for(&self.base, None)?;
        let numeric = integrate_over(&clip, &|x: &[f64]| self.surface_density(x), spec)?;
        let (closed_form, factorized) = if self.canonical {
            (
                Some(total_volume_closed_form(self.n, self.k, self.r_scale)?),
                Some(factorized_total_volume(self.n, self.k, self.scaling.m_k(), self.r_scale)),
            )
        } else {
            (None, None)
        };
        Ok(TotalVolume { numeric, closed_form, factorized })
    }

    /// Volume of `{‖x′‖ ≤ f(x″)}`, by quadrature with a Monte Carlo cross-check.
    pub fn enclosed_volume(&self, samples: usize, seed: u64, spec: &QuadratureSpec) -> Result<EnclosedVolume> {
        if !matches!(self.mode, WarpMode::Archimedean | WarpMode::Cylinder) {
            return Err(Error::Unsupported(format!("enclosed volume of a {} array", self.mode.name())));
        }
        let quad = self.warping_moment(None, self.k as i32, spec)?;
        let vk = unit_ball_volume(self.k);
        let (mc_value, mc_std_error) = self.enclosed_monte_carlo(samples, seed)?;
        let closed_form = if self.canonical && self.k == self.n - 1 {
            Some(equizonal_enclosed_volume(self.n, self.r_scale)?)
        } else {
            None
        };
        Ok(EnclosedVolume {
            value: vk * quad.value,
            error: vk * quad.error,
            mc_value,
            mc_std_error,
            mc_samples: samples,
            closed_form,
        })
    }

    // Hit-or-miss in the box [-R, R]^k × bbox(Ω).
    fn enclosed_monte_carlo(&self, samples: usize, seed: u64) -> Result<(f64, f64)> {
        if samples == 0 {
            return Ok((f64::NAN, f64::NAN));
        }
        let (lo, hi) = self.base.bounding_box();
        let r = self.r_scale;
        let box_volume = (2.0 * r).powi(self.k as i32) * lo.iter().zip(&hi).map(|(a, b)| b - a).product::<f64>();
        let chunks = samples.div_ceil(MC_CHUNK);
        let counts: Vec<Result<u64>> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut rng = Stream::new(seed, c as u64);
                let count = MC_CHUNK.min(samples - c * MC_CHUNK);
                let mut hits = 0u64;
                let mut fiber = vec![0.0; self.k];
                let mut base = vec![0.0; lo.len()];
                for _ in 0..count {
                    for v in fiber.iter_mut() {
                        *v = rng.uniform_in(-r, r);
                    }
                    for (i, v) in base.iter_mut().enumerate() {
                        *v = rng.uniform_in(lo[i], hi[i]);
                    }
                    if !self.base.contains(&base) {
                        continue;
                    }
                    let rho2: f64 = fiber.iter().map(|v| v * v).sum();
                    if rho2 > r * r {
                        continue;
                    }
                    let f = self.warping(&base)?;
                    if rho2 <= f * f {
                        hits += 1;
                    }
                }
                Ok(hits)
            })
            .collect();
        let mut hits = 0u64;
        for c in counts {
            hits += c?;
        }
        let p = hits as f64 / samples as f64;
        Ok((p * box_volume, box_volume * (p * (1.0 - p) / samples as f64).sqrt()))
    }
}
