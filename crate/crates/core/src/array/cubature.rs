//! Integration over a convex set `C = U ∩ Ω` by nested one-dimensional
//! quadrature on exact slices.
//!
//! Each level integrates over the exact extent of the current slice along one
//! axis, split at every abscissa where the slice changes shape. Slice measures
//! behave like `√(t - t₀)` at those abscissae, so every piece is integrated
//! with both endpoints flagged.

use std::cell::RefCell;

use super::planar::{crossing_abscissae, quadratic_roots, Convex2};
use crate::error::{Error, Result};
use crate::special::{integrate, Endpoints, Estimate, NeumaierSum, QuadratureSpec};

#[derive(Debug, Clone)]
pub(crate) struct SolidBall {
    pub center: Vec<f64>,
    pub radius: f64,
}

/// A convex integration domain.
#[derive(Debug, Clone)]
pub(crate) enum Clip {
    Empty,
    Interval(f64, f64),
    Planar(Vec<Convex2>),
    /// Intersection of up to two balls, or one ball and one box, in dimension ≥ 3.
    Solid {
        dim: usize,
        balls: Vec<SolidBall>,
        bbox: Option<(Vec<f64>, Vec<f64>)>,
    },
}

/// Inner levels run this much tighter than the outermost one, so their
/// residual error looks smooth to the enclosing rule, down to a floor set by
/// rounding.
const INNER_TOLERANCE_FACTOR: f64 = 1e-2;
const INNER_REL_TOL_FLOOR: f64 = 1e-13;

fn inner_spec(spec: &QuadratureSpec) -> QuadratureSpec {
    let factor = (INNER_REL_TOL_FLOOR / spec.rel_tol).clamp(INNER_TOLERANCE_FACTOR, 1.0);
    spec.scaled(factor)
}

struct Ctx<'a, F> {
    f: &'a F,
    spec: QuadratureSpec,
    inner_spec: QuadratureSpec,
    failure: RefCell<Option<Error>>,
}

impl<'a, F: Fn(&[f64]) -> Result<f64>> Ctx<'a, F> {
    fn stash(&self, e: Error) -> f64 {
        self.failure.borrow_mut().get_or_insert(e);
        f64::NAN
    }

    fn eval(&self, x: &[f64]) -> f64 {
        match (self.f)(x) {
            Ok(v) => v,
            Err(e) => self.stash(e),
        }
    }

    // Inner levels keep the best estimate when the tolerance is out of reach;
    // the enclosing level's error estimate absorbs the difference.
    fn inner<G: Fn(f64) -> f64>(&self, g: G, breaks: &[f64]) -> f64 {
        let mut sum = NeumaierSum::new();
        for w in breaks.windows(2) {
            match integrate(&g, w[0], w[1], &self.inner_spec, Endpoints::BOTH) {
                Ok(e) => sum.add(e.value),
                Err(Error::Quadrature { estimate, .. }) => sum.add(estimate),
                Err(e) => return self.stash(e),
            }
        }
        sum.value()
    }

    fn outer<G: Fn(f64) -> f64>(&self, g: G, breaks: &[f64]) -> Result<Estimate> {
        let mut value = NeumaierSum::new();
        let mut error = NeumaierSum::new();
        let mut evaluations = 0;
        let mut converged = true;
        for w in breaks.windows(2) {
            let r = integrate(&g, w[0], w[1], &self.spec, Endpoints::BOTH);
            if let Some(e) = self.failure.borrow_mut().take() {
                return Err(e);
            }
            match r {
                Ok(e) => {
                    value.add(e.value);
                    error.add(e.error);
                    evaluations += e.evaluations;
                }
                Err(Error::Quadrature { estimate, error: err }) => {
                    converged = false;
                    value.add(estimate);
                    error.add(err);
                }
                Err(e) => return Err(e),
            }
        }
        let est = Estimate { value: value.value(), error: error.value(), evaluations };
        if converged {
            Ok(est)
        } else {
            Err(Error::Quadrature { estimate: est.value, error: est.error })
        }
    }

    fn run<G: Fn(f64) -> f64>(&self, g: G, breaks: &[f64], top: bool) -> Result<Estimate> {
        if top {
            self.outer(g, breaks)
        } else {
            Ok(Estimate { value: self.inner(g, breaks), error: 0.0, evaluations: 0 })
        }
    }
}

/// Sorted breakpoints inside `[lo, hi]`, including both ends.
fn breakpoints(lo: f64, hi: f64, mut cands: Vec<f64>) -> Vec<f64> {
    let tiny = 1e-13 * (hi - lo).abs().max(lo.abs().max(hi.abs()) * 1e-3);
    cands.retain(|t| t.is_finite() && *t > lo + tiny && *t < hi - tiny);
    cands.push(lo);
    cands.push(hi);
    cands.sort_by(f64::total_cmp);
    cands.dedup_by(|a, b| (*a - *b).abs() <= tiny);
    cands
}

/// `∫_C f`.
pub(crate) fn integrate_over<F>(clip: &Clip, f: &F, spec: &QuadratureSpec) -> Result<Estimate>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    spec.validate()?;
    let ctx = Ctx { f, spec: *spec, inner_spec: inner_spec(spec), failure: RefCell::new(None) };
    match clip {
        Clip::Empty => Ok(Estimate::ZERO),
        Clip::Interval(lo, hi) => {
            if hi <= lo {
                return Ok(Estimate::ZERO);
            }
            ctx.outer(|t| ctx.eval(&[t]), &[*lo, *hi])
        }
        Clip::Planar(sets) => planar(&ctx, sets),
        Clip::Solid { dim, balls, bbox } => {
            if balls.len() + usize::from(bbox.is_some()) > 2 || (balls.len() == 2 && bbox.is_some()) {
                return Err(Error::Unsupported("solid clip of more than two sets".into()));
            }
            solid_level(&ctx, *dim, balls, bbox.as_ref(), &[], true)
        }
    }
}

fn chord_all(sets: &[Convex2], x: f64, slack: f64) -> Option<(f64, f64)> {
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for s in sets {
        let (a, b) = s.chord(x)?;
        lo = lo.max(a);
        hi = hi.min(b);
    }
    if hi >= lo {
        Some((lo, hi))
    } else if hi >= lo - slack {
        Some((lo, lo))
    } else {
        None
    }
}

/// Extent of the planar intersection along x and the abscissae where its
/// chords change formula.
pub(crate) fn planar_extent(sets: &[Convex2]) -> Option<Vec<f64>> {
    let mut cands: Vec<f64> = sets.iter().flat_map(|s| s.critical_x()).collect();
    for i in 0..sets.len() {
        for j in i + 1..sets.len() {
            cands.extend(crossing_abscissae(&sets[i], &sets[j]));
        }
    }
    let span = cands.iter().fold(0.0f64, |m, c| m.max(c.abs())).max(1e-300);
    let slack = 1e-12 * span;
    let feasible: Vec<f64> = cands.iter().copied().filter(|&t| chord_all(sets, t, slack).is_some()).collect();
    let lo = feasible.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = feasible.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (hi > lo).then(|| breakpoints(lo, hi, cands))
}

fn planar<F: Fn(&[f64]) -> Result<f64>>(ctx: &Ctx<'_, F>, sets: &[Convex2]) -> Result<Estimate> {
    let Some(breaks) = planar_extent(sets) else {
        return Ok(Estimate::ZERO);
    };
    let slack = 1e-12 * breaks.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let g = |x: f64| match chord_all(sets, x, slack) {
        Some((y0, y1)) if y1 > y0 => ctx.inner(|y| ctx.eval(&[x, y]), &[y0, y1]),
        _ => 0.0,
    };
    ctx.outer(g, &breaks)
}

/// Squared slice radius of a ball after fixing the leading coordinates.
fn slice_radius2(b: &SolidBall, prefix: &[f64]) -> f64 {
    b.radius * b.radius - prefix.iter().zip(&b.center).map(|(x, c)| (x - c) * (x - c)).sum::<f64>()
}

fn solid_level<F: Fn(&[f64]) -> Result<f64>>(
    ctx: &Ctx<'_, F>,
    dim: usize,
    balls: &[SolidBall],
    bbox: Option<&(Vec<f64>, Vec<f64>)>,
    prefix: &[f64],
    top: bool,
) -> Result<Estimate> {
    let j = prefix.len();
    let scale2 = balls.iter().map(|b| b.radius * b.radius).fold(0.0, f64::max);
    let mut rho2 = Vec::with_capacity(balls.len());
    for b in balls {
        let r2 = slice_radius2(b, prefix);
        if r2 < -1e-12 * scale2 {
            return Ok(Estimate::ZERO);
        }
        rho2.push(r2.max(0.0));
    }
    let with = |t: f64| {
        let mut p = prefix.to_vec();
        p.push(t);
        p
    };
    if j + 1 == dim {
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        for (b, r2) in balls.iter().zip(&rho2) {
            lo = lo.max(b.center[j] - r2.sqrt());
            hi = hi.min(b.center[j] + r2.sqrt());
        }
        if let Some((blo, bhi)) = bbox {
            lo = lo.max(blo[j]);
            hi = hi.min(bhi[j]);
        }
        if !(hi > lo) {
            return Ok(Estimate::ZERO);
        }
        return ctx.run(|t| ctx.eval(&with(t)), &[lo, hi], top);
    }
    let Some(breaks) = axis_extent(j, dim, balls, &rho2, bbox) else {
        return Ok(Estimate::ZERO);
    };
    let g = |t: f64| match solid_level(ctx, dim, balls, bbox, &with(t), false) {
        Ok(e) => e.value,
        Err(e) => ctx.stash(e),
    };
    ctx.run(g, &breaks, top)
}

/// Extent along axis `j` of the slice with the leading coordinates fixed,
/// together with the abscissae where the sub-slice changes shape.
fn axis_extent(
    j: usize,
    dim: usize,
    balls: &[SolidBall],
    rho2: &[f64],
    bbox: Option<&(Vec<f64>, Vec<f64>)>,
) -> Option<Vec<f64>> {
    match (balls, bbox) {
        ([], Some((lo, hi))) => (hi[j] > lo[j]).then(|| vec![lo[j], hi[j]]),
        ([b], None) => {
            let r = rho2[0].sqrt();
            (r > 0.0).then(|| vec![b.center[j] - r, b.center[j] + r])
        }
        ([b], Some((lo, hi))) => ball_box_extent(j, dim, b, rho2[0], lo, hi),
        ([a, b], None) => ball_ball_extent(j, dim, a, rho2[0], b, rho2[1]),
        _ => None,
    }
}

fn ball_box_extent(j: usize, dim: usize, b: &SolidBall, rho2: f64, lo: &[f64], hi: &[f64]) -> Option<Vec<f64>> {
    let c = &b.center;
    let rest = j + 1..dim;
    let gap2: f64 = rest.clone().map(|i| (c[i] - c[i].clamp(lo[i], hi[i])).powi(2)).sum();
    if gap2 > rho2 {
        return None;
    }
    let half = (rho2 - gap2).sqrt();
    let (elo, ehi) = ((c[j] - half).max(lo[j]), (c[j] + half).min(hi[j]));
    if !(ehi > elo) {
        return None;
    }
    let mut cands = vec![lo[j], hi[j]];
    let r = rho2.sqrt();
    cands.extend([c[j] - r, c[j] + r]);
    // every face of the remaining box (each coordinate free, at lo, or at hi)
    // whose foot point from the centre lies on the face
    let m = dim - j - 1;
    for code in 0..3usize.pow(m as u32) {
        let mut code_left = code;
        let mut d2 = 0.0;
        let mut valid = true;
        for i in rest.clone() {
            match code_left % 3 {
                0 => valid &= c[i] >= lo[i] && c[i] <= hi[i],
                1 => d2 += (c[i] - lo[i]).powi(2),
                _ => d2 += (c[i] - hi[i]).powi(2),
            }
            code_left /= 3;
        }
        if valid && d2 <= rho2 {
            let s = (rho2 - d2).sqrt();
            cands.extend([c[j] - s, c[j] + s]);
        }
    }
    Some(breakpoints(elo, ehi, cands))
}

fn ball_ball_extent(j: usize, dim: usize, a: &SolidBall, ra2: f64, b: &SolidBall, rb2: f64) -> Option<Vec<f64>> {
    let (ca, cb) = (a.center[j], b.center[j]);
    let d2: f64 = (j + 1..dim).map(|i| (a.center[i] - b.center[i]).powi(2)).sum();
    let d = d2.sqrt();
    let scale2 = ra2.max(rb2).max(1e-300);
    let slice = |r2: f64, c: f64, t: f64| r2 - (t - c) * (t - c);
    let feasible = |t: f64| {
        let (sa, sb) = (slice(ra2, ca, t), slice(rb2, cb, t));
        sa >= -1e-12 * scale2
            && sb >= -1e-12 * scale2
            && sa.max(0.0).sqrt() + sb.max(0.0).sqrt() >= d - 1e-12 * scale2.sqrt()
    };
    let (ra, rb) = (ra2.sqrt(), rb2.sqrt());
    let mut cands = vec![ca - ra, ca + ra, cb - rb, cb + rb];
    // slices touch (ρ_A + ρ_B = D) or nest (|ρ_A - ρ_B| = D); with
    // L(t) = ρ_A(t)² - ρ_B(t)² = α + β t these are (L ∓ D²)² = 4 D² ρ_{B,A}(t)²
    let alpha = ra2 - rb2 - ca * ca + cb * cb;
    let beta = 2.0 * (ca - cb);
    let qa = beta * beta + 4.0 * d2;
    cands.extend(quadratic_roots(
        qa,
        2.0 * beta * (alpha - d2) - 8.0 * d2 * cb,
        (alpha - d2).powi(2) - 4.0 * d2 * (rb2 - cb * cb),
    ));
    cands.extend(quadratic_roots(
        qa,
        2.0 * beta * (alpha + d2) - 8.0 * d2 * ca,
        (alpha + d2).powi(2) - 4.0 * d2 * (ra2 - ca * ca),
    ));
    let ok: Vec<f64> = cands.iter().copied().filter(|&t| feasible(t)).collect();
    let lo = ok.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ok.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (hi > lo).then(|| breakpoints(lo, hi, cands))
}
