//! Spherical arrays `H = Ω^{n-k} ×_f S^{k-1} ⊂ R^n`.
//!
//! A point of `R^n` is stored as `[x′, x″]`: the `k` fiber coordinates first,
//! then the `n - k` base coordinates. `H` is the set `‖x′‖ = f(x″)`.
//!
//! The Archimedean array `𝒜_k^{n-1}(R)` has base `B^{n-k}(R·M_k)` and warping
//! `f(x″) = R·f_k(ω(x″)/R)`; it is the similarity image of the unit array, so
//! its projection constant is `Vol(S^{k-1}(1))·R^{k-1}`.

mod cubature;
mod planar;
mod region;
mod volume;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::base::{dist, BaseDomain, Shape};
use crate::error::{domain, Error, Result};
use crate::scaling::ScalingFunction;
use crate::special::{unit_sphere_volume, QuadratureSpec};

pub use region::Region;
pub use volume::{
    equizonal_enclosed_volume, equizonal_surface_volume, factorized_total_volume, total_volume_closed_form,
    EnclosedVolume, TotalVolume,
};

/// Boundary offset for the surface integrand, relative to the inradius.
pub const BOUNDARY_OFFSET_FACTOR: f64 = 1e-6;

/// A user-supplied warping function.
pub trait Warp: Send + Sync {
    /// Fiber radius `f(x″)`.
    fn value(&self, x: &[f64]) -> Result<f64>;
    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>>;
    fn name(&self) -> String;
}

/// Warpings that make no use of the APP.
#[derive(Clone)]
pub enum CustomWarp {
    /// `f(x″) = R·(1 - ‖x″/R‖²/2)`.
    Paraboloid,
    /// `f = R·f_k(ω/R)` over any admissible base, with no special treatment of
    /// the singular set.
    DistanceComposite,
    User(Arc<dyn Warp>),
}

impl fmt::Debug for CustomWarp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl CustomWarp {
    pub fn name(&self) -> String {
        match self {
            CustomWarp::Paraboloid => "paraboloid".into(),
            CustomWarp::DistanceComposite => "distance_composite".into(),
            CustomWarp::User(w) => format!("user:{}", w.name()),
        }
    }
}

#[derive(Debug, Clone)]
pub enum WarpMode {
    /// `f = R·f_k ∘ (ω/R)`.
    Archimedean,
    /// `f ≡ R`.
    Cylinder,
    Custom(CustomWarp),
}

impl WarpMode {
    pub fn name(&self) -> String {
        match self {
            WarpMode::Archimedean => "archimedean".into(),
            WarpMode::Cylinder => "cylinder".into(),
            WarpMode::Custom(c) => format!("custom:{}", c.name()),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "archimedean" => Ok(WarpMode::Archimedean),
            "cylinder" => Ok(WarpMode::Cylinder),
            "custom:paraboloid" => Ok(WarpMode::Custom(CustomWarp::Paraboloid)),
            "custom:distance_composite" => Ok(WarpMode::Custom(CustomWarp::DistanceComposite)),
            other => Err(Error::Parse(format!("unknown warp mode {other:?}"))),
        }
    }

    fn uses_scaling(&self) -> bool {
        matches!(self, WarpMode::Archimedean | WarpMode::Custom(CustomWarp::DistanceComposite))
    }
}

/// Serializable description of an array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrayDescription {
    pub n: usize,
    pub k: usize,
    pub r: f64,
    pub base: Shape,
    pub warp_mode: String,
}

#[derive(Debug, Clone)]
pub struct SphericalArray {
    n: usize,
    k: usize,
    base: BaseDomain,
    scaling: Arc<ScalingFunction>,
    r_scale: f64,
    mode: WarpMode,
    // base is B(c, R·M_k) and the mode is Archimedean
    canonical: bool,
    boundary_offset: f64,
}

impl SphericalArray {
    pub fn new(
        base: BaseDomain,
        k: usize,
        scaling: Arc<ScalingFunction>,
        r_scale: f64,
        mode: WarpMode,
    ) -> Result<Self> {
        let n = base.dim() + k;
        if k < 2 {
            return Err(domain(format!("codimension k must be at least 2, got {k}")));
        }
        if scaling.k() != k {
            return Err(domain(format!("scaling function has k = {}, array needs {k}", scaling.k())));
        }
        if !(r_scale > 0.0 && r_scale.is_finite()) {
            return Err(domain(format!("scale R must be positive, got {r_scale}")));
        }
        let limit = r_scale * scaling.m_k();
        if mode.uses_scaling() && base.inradius() > limit * (1.0 + 1e-12) {
            return Err(domain(format!(
                "base inradius {} exceeds R·M_k = {limit}; f_k ∘ ω is undefined there",
                base.inradius()
            )));
        }
        let canonical =
            matches!(mode, WarpMode::Archimedean) && base.is_ball() && (base.inradius() - limit).abs() <= 1e-14 * limit;
        let boundary_offset = BOUNDARY_OFFSET_FACTOR * base.inradius();
        Ok(Self { n, k, base, scaling, r_scale, mode, canonical, boundary_offset })
    }

    /// Builds `𝒜_k^{n-1}(R)`.
    pub fn archimedean(n: usize, k: usize, r: f64) -> Result<Self> {
        Self::archimedean_with(n, k, r, &QuadratureSpec::default())
    }

    pub fn archimedean_with(n: usize, k: usize, r: f64, spec: &QuadratureSpec) -> Result<Self> {
        check_nk(n, k)?;
        let scaling = Arc::new(ScalingFunction::new(k, spec)?);
        Self::archimedean_from(n, scaling, r)
    }

    /// `𝒜_k^{n-1}(R)` reusing an existing scaling function.
    pub fn archimedean_from(n: usize, scaling: Arc<ScalingFunction>, r: f64) -> Result<Self> {
        let k = scaling.k();
        check_nk(n, k)?;
        if !(r > 0.0 && r.is_finite()) {
            return Err(domain(format!("scale R must be positive, got {r}")));
        }
        let base = BaseDomain::centered_ball(n - k, r * scaling.m_k())?;
        Self::new(base, k, scaling, r, WarpMode::Archimedean)
    }

    /// The cylinder `Ω × S^{k-1}(R)`.
    pub fn cylinder(base: BaseDomain, k: usize, r: f64) -> Result<Self> {
        let scaling = Arc::new(ScalingFunction::new(k, &QuadratureSpec::default())?);
        Self::new(base, k, scaling, r, WarpMode::Cylinder)
    }

    pub fn from_description(desc: &ArrayDescription, spec: &QuadratureSpec) -> Result<Self> {
        let base = BaseDomain::from_shape(&desc.base)?;
        if base.dim() + desc.k != desc.n {
            return Err(domain(format!("base dimension {} + k {} != n {}", base.dim(), desc.k, desc.n)));
        }
        let scaling = Arc::new(ScalingFunction::new(desc.k, spec)?);
        Self::new(base, desc.k, scaling, desc.r, WarpMode::parse(&desc.warp_mode)?)
    }

    pub fn description(&self) -> ArrayDescription {
        ArrayDescription {
            n: self.n,
            k: self.k,
            r: self.r_scale,
            base: self.base.shape().clone(),
            warp_mode: self.mode.name(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn base(&self) -> &BaseDomain {
        &self.base
    }

    pub fn scaling(&self) -> &ScalingFunction {
        &self.scaling
    }

    pub fn scaling_arc(&self) -> Arc<ScalingFunction> {
        Arc::clone(&self.scaling)
    }

    pub fn r_scale(&self) -> f64 {
        self.r_scale
    }

    pub fn mode(&self) -> &WarpMode {
        &self.mode
    }

    /// Whether this is `𝒜_k^{n-1}(R)` itself (ball base of radius `R·M_k`).
    pub fn is_canonical(&self) -> bool {
        self.canonical
    }

    /// Whether `f` tends to zero at `∂Ω` (the f_k ∘ ω warpings), so the fibers
    /// close up over the rim.
    pub fn vanishes_on_boundary(&self) -> bool {
        self.mode.uses_scaling()
    }

    /// Width of the boundary layer where the surface integrand is replaced by
    /// its limit.
    pub fn boundary_offset(&self) -> f64 {
        self.boundary_offset
    }

    /// The APP constant `Vol(S^{k-1}(1))·R^{k-1}` of an Archimedean array.
    pub fn app_constant(&self) -> f64 {
        unit_sphere_volume(self.k) * self.r_scale.powi(self.k as i32 - 1)
    }

    /// Splits a point of `R^n` into fiber and base parts.
    pub fn split<'a>(&self, x: &'a [f64]) -> Result<(&'a [f64], &'a [f64])> {
        if x.len() != self.n {
            return Err(domain(format!("expected a point of R^{}, got dimension {}", self.n, x.len())));
        }
        Ok(x.split_at(self.k))
    }

    // Distance from the centre scaled to the unit array, when the series path applies.
    fn series_offset(&self, x: &[f64]) -> Option<f64> {
        if !self.canonical {
            return None;
        }
        let u = dist(x, &self.base.center()) / self.r_scale;
        (u <= self.scaling.series_radius_guard()).then_some(u)
    }

    fn check_inside(&self, x: &[f64]) -> Result<f64> {
        self.base.distance_to_boundary(x)
    }

    /// Fiber radius `f(x″)`.
    pub fn warping(&self, x: &[f64]) -> Result<f64> {
        let w = self.check_inside(x)?;
        match &self.mode {
            WarpMode::Cylinder => Ok(self.r_scale),
            WarpMode::Archimedean => {
                if let Some(u) = self.series_offset(x) {
                    return Ok(self.r_scale * self.scaling.series_value(u));
                }
                self.composite(w)
            }
            WarpMode::Custom(CustomWarp::DistanceComposite) => self.composite(w),
            WarpMode::Custom(CustomWarp::Paraboloid) => {
                let s = x.iter().map(|v| v * v).sum::<f64>() / (self.r_scale * self.r_scale);
                Ok(self.r_scale * (1.0 - 0.5 * s))
            }
            WarpMode::Custom(CustomWarp::User(u)) => u.value(x),
        }
    }

    fn composite(&self, w: f64) -> Result<f64> {
        let t = (w / self.r_scale).min(self.scaling.m_k());
        Ok(self.r_scale * self.scaling.f(t)?)
    }

    /// `∇f(x″)` for interior points outside the singular band.
    pub fn warping_gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.gradient_impl(x, true)
    }

    /// `∇f(x″)` without the singular-band check; on `Σ` one of the one-sided
    /// gradients is returned.
    pub fn warping_gradient_unchecked(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.gradient_impl(x, false)
    }

    fn gradient_impl(&self, x: &[f64], check_band: bool) -> Result<Vec<f64>> {
        let w = self.check_inside(x)?;
        match &self.mode {
            WarpMode::Cylinder => Ok(vec![0.0; x.len()]),
            WarpMode::Archimedean => {
                if let Some(u) = self.series_offset(x) {
                    // d/dx of R·S(‖x - c‖/R) = S'(u)/u · (x - c)/R, with S'(u)/u even in u
                    let ratio = self.scaling.series_derivative_ratio(u);
                    let c = self.base.center();
                    return Ok(x.iter().zip(&c).map(|(xi, ci)| ratio * (xi - ci) / self.r_scale).collect());
                }
                self.composite_gradient(x, w, check_band)
            }
            WarpMode::Custom(CustomWarp::DistanceComposite) => self.composite_gradient(x, w, check_band),
            WarpMode::Custom(CustomWarp::Paraboloid) => Ok(x.iter().map(|v| -v / self.r_scale).collect()),
            WarpMode::Custom(CustomWarp::User(u)) => u.gradient(x),
        }
    }

    fn composite_gradient(&self, x: &[f64], w: f64, check_band: bool) -> Result<Vec<f64>> {
        if w <= 0.0 {
            return Err(Error::Boundary);
        }
        let grad_omega = if check_band { self.base.omega_gradient(x)? } else { self.base.omega_gradient_unchecked(x) };
        let t = (w / self.r_scale).min(self.scaling.m_k());
        let slope = self.scaling.f_prime(t)?;
        Ok(grad_omega.into_iter().map(|g| slope * g).collect())
    }

    /// `g^{k-1}·√(1 + ‖∇g‖²) - 1` with `g = f/R` on the unit array (where
    /// `∇g` equals `∇f`). Zero exactly when the APP density condition holds.
    pub fn app_residual(&self, x: &[f64]) -> Result<f64> {
        let f = self.warping(x)?;
        let grad = self.warping_gradient(x)?;
        let g = f / self.r_scale;
        let norm2: f64 = grad.iter().map(|v| v * v).sum();
        Ok(g.powi(self.k as i32 - 1) * (1.0 + norm2).sqrt() - 1.0)
    }

    /// The surface-volume density over the base:
    /// `Vol(S^{k-1}(1))·f^{k-1}·√(1 + ‖∇f‖²)`.
    ///
    /// For f_k ∘ ω warpings, points within the boundary offset of `∂Ω` get the
    /// limit value `Vol(S^{k-1}(1))·R^{k-1}`; there the product is `0·∞` in
    /// floating point though finite analytically.
    pub fn surface_density(&self, x: &[f64]) -> Result<f64> {
        let w = self.check_inside(x)?;
        if self.mode.uses_scaling() && w <= self.boundary_offset {
            return Ok(self.app_constant());
        }
        let (f, norm2) = match &self.mode {
            WarpMode::Archimedean | WarpMode::Custom(CustomWarp::DistanceComposite)
                if self.series_offset(x).is_none() =>
            {
                // ‖∇ω‖ = 1 off Σ, so ‖∇f‖ = f_k′(ω/R)
                let t = (w / self.r_scale).min(self.scaling.m_k());
                let (g, slope) = self.scaling.f_with_prime(t)?;
                (self.r_scale * g, slope * slope)
            }
            _ => {
                let grad = self.warping_gradient_unchecked(x)?;
                (self.warping(x)?, grad.iter().map(|v| v * v).sum())
            }
        };
        Ok(unit_sphere_volume(self.k) * f.powi(self.k as i32 - 1) * (1.0 + norm2).sqrt())
    }

    /// `‖x′‖² - f(x″)²`: zero on `H`, negative inside.
    pub fn implicit_eval(&self, x: &[f64]) -> Result<f64> {
        let (fiber, base) = self.split(x)?;
        let f = self.warping(base)?;
        Ok(fiber.iter().map(|v| v * v).sum::<f64>() - f * f)
    }

    /// `f_k⁻¹(‖x′‖/R) - ω̃(x″)/R`, the form of the surface equation that stays
    /// differentiable at the rim where `f` vanishes.
    pub fn boundary_form_eval(&self, x: &[f64]) -> Result<f64> {
        if !self.mode.uses_scaling() {
            return Err(Error::Unsupported(format!(
                "boundary form needs an f_k ∘ ω warping, not {}",
                self.mode.name()
            )));
        }
        let (fiber, base) = self.split(x)?;
        let rho = fiber.iter().map(|v| v * v).sum::<f64>().sqrt();
        if rho > self.r_scale * (1.0 + 4.0 * f64::EPSILON) {
            return Err(domain(format!("fiber radius {rho} exceeds R = {}", self.r_scale)));
        }
        let y = (rho / self.r_scale).min(1.0);
        Ok(self.scaling.f_inverse(y)? - self.base.signed_distance(base)? / self.r_scale)
    }
}

fn check_nk(n: usize, k: usize) -> Result<()> {
    if n < 3 {
        return Err(domain(format!("ambient dimension n must be at least 3, got {n}")));
    }
    if k < 2 || k > n - 1 {
        return Err(domain(format!("codimension k must satisfy 2 ≤ k ≤ n - 1 = {}, got {k}", n - 1)));
    }
    Ok(())
}
