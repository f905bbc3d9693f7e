//! Convex base domains and their distance-to-boundary functions.
//!
//! For a convex domain `Ω`, `ω(x) = dist(x, ∂Ω)` solves `‖∇ω‖ = 1` away from
//! the singular set `Σ` (the medial axis), where it fails to be differentiable.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::special::unit_ball_volume;

/// Default half-width of the exclusion band around `Σ`, relative to the inradius.
pub const SINGULAR_BAND_FACTOR: f64 = 1e-3;

/// Largest polygon accepted by the constructors.
pub const MAX_POLYGON_VERTICES: usize = 64;

/// Geometric description of a base domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Shape {
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    /// Axis-aligned ellipse in the plane.
    Ellipse {
        center: [f64; 2],
        semi_axes: [f64; 2],
    },
    /// Strictly convex polygon, counterclockwise.
    Polygon {
        vertices: Vec<[f64; 2]>,
    },
}

#[derive(Debug, Clone)]
enum Geometry {
    Ball { center: Vec<f64>, radius: f64 },
    Ellipse(EllipseGeom),
    Polygon(PolygonGeom),
}

/// A convex region `Ω ⊂ R^dim`.
#[derive(Debug, Clone)]
pub struct BaseDomain {
    dim: usize,
    shape: Shape,
    geom: Geometry,
    inradius: f64,
    singular_band: f64,
}

impl BaseDomain {
    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        if center.is_empty() {
            return Err(domain("ball needs dimension at least 1"));
        }
        if !(radius > 0.0 && radius.is_finite()) || center.iter().any(|c| !c.is_finite()) {
            return Err(domain(format!("ball radius must be positive and finite, got {radius}")));
        }
        let dim = center.len();
        Ok(Self::assemble(
            dim,
            Shape::Ball { center: center.clone(), radius },
            Geometry::Ball { center, radius },
            radius,
        ))
    }

    /// Ball of the given radius centred at the origin.
    pub fn centered_ball(dim: usize, radius: f64) -> Result<Self> {
        Self::ball(vec![0.0; dim], radius)
    }

    pub fn ellipse(center: [f64; 2], semi_axes: [f64; 2]) -> Result<Self> {
        if !semi_axes.iter().all(|&a| a > 0.0 && a.is_finite()) || !center.iter().all(|c| c.is_finite()) {
            return Err(domain("ellipse semi-axes must be positive and finite"));
        }
        let geom = EllipseGeom::new(center, semi_axes);
        let inradius = geom.b;
        Ok(Self::assemble(2, Shape::Ellipse { center, semi_axes }, Geometry::Ellipse(geom), inradius))
    }

    pub fn polygon(vertices: Vec<[f64; 2]>) -> Result<Self> {
        let geom = PolygonGeom::new(&vertices)?;
        let inradius = geom.inradius;
        Ok(Self::assemble(2, Shape::Polygon { vertices }, Geometry::Polygon(geom), inradius))
    }

    /// Regular polygon with the given number of sides and inradius, centred at
    /// the origin with its first edge at the bottom.
    pub fn regular_polygon(sides: usize, inradius: f64) -> Result<Self> {
        if sides < 3 {
            return Err(domain("regular polygon needs at least 3 sides"));
        }
        let circum = inradius / (PI / sides as f64).cos();
        let vertices = (0..sides)
            .map(|i| {
                let a = -PI / 2.0 - PI / sides as f64 + 2.0 * PI * i as f64 / sides as f64;
                [circum * a.cos(), circum * a.sin()]
            })
            .collect();
        Self::polygon(vertices)
    }

    /// Loads polygon vertices from `x,y` rows. A non-numeric first row is
    /// treated as a header.
    pub fn polygon_from_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_path(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let mut vertices = Vec::new();
        for (row, record) in reader.records().enumerate() {
            let record = record.map_err(|e| Error::Parse(e.to_string()))?;
            if record.len() != 2 {
                return Err(Error::Parse(format!("row {}: expected 2 fields, got {}", row + 1, record.len())));
            }
            let parsed: std::result::Result<Vec<f64>, _> = record.iter().map(|s| s.parse::<f64>()).collect();
            match parsed {
                Ok(v) => vertices.push([v[0], v[1]]),
                Err(_) if row == 0 => continue,
                Err(e) => return Err(Error::Parse(format!("row {}: {e}", row + 1))),
            }
        }
        Self::polygon(vertices)
    }

    pub fn from_shape(shape: &Shape) -> Result<Self> {
        match shape {
            Shape::Ball { center, radius } => Self::ball(center.clone(), *radius),
            Shape::Ellipse { center, semi_axes } => Self::ellipse(*center, *semi_axes),
            Shape::Polygon { vertices } => Self::polygon(vertices.clone()),
        }
    }

    fn assemble(dim: usize, shape: Shape, geom: Geometry, inradius: f64) -> Self {
        Self { dim, shape, geom, inradius, singular_band: SINGULAR_BAND_FACTOR * inradius }
    }

    /// Replaces the exclusion band around the singular set.
    pub fn with_singular_band(mut self, band: f64) -> Result<Self> {
        if !(band >= 0.0 && band.is_finite()) {
            return Err(domain("singular band must be nonnegative"));
        }
        self.singular_band = band;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    /// Maximum of `ω` over the domain.
    pub fn inradius(&self) -> f64 {
        self.inradius
    }

    pub fn singular_band(&self) -> f64 {
        self.singular_band
    }

    pub fn is_ball(&self) -> bool {
        matches!(self.geom, Geometry::Ball { .. })
    }

    /// A point where `ω` attains the inradius.
    pub fn center(&self) -> Vec<f64> {
        match &self.geom {
            Geometry::Ball { center, .. } => center.clone(),
            Geometry::Ellipse(e) => e.center.to_vec(),
            Geometry::Polygon(p) => p.incenter.to_vec(),
        }
    }

    /// Axis-aligned bounding box `(lo, hi)`.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        match &self.geom {
            Geometry::Ball { center, radius } => {
                (center.iter().map(|c| c - radius).collect(), center.iter().map(|c| c + radius).collect())
            }
            Geometry::Ellipse(e) => {
                let (ax, ay) = if e.swapped { (e.b, e.a) } else { (e.a, e.b) };
                (vec![e.center[0] - ax, e.center[1] - ay], vec![e.center[0] + ax, e.center[1] + ay])
            }
            Geometry::Polygon(p) => {
                let mut lo = vec![f64::INFINITY; 2];
                let mut hi = vec![f64::NEG_INFINITY; 2];
                for v in &p.vertices {
                    for i in 0..2 {
                        lo[i] = lo[i].min(v[i]);
                        hi[i] = hi[i].max(v[i]);
                    }
                }
                (lo, hi)
            }
        }
    }

    /// Exact `dim`-volume.
    pub fn volume(&self) -> f64 {
        match &self.geom {
            Geometry::Ball { radius, .. } => unit_ball_volume(self.dim) * radius.powi(self.dim as i32),
            Geometry::Ellipse(e) => PI * e.a * e.b,
            Geometry::Polygon(p) => p.area,
        }
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(domain(format!("expected a point of dimension {}, got {}", self.dim, x.len())));
        }
        if x.iter().any(|c| !c.is_finite()) {
            return Err(domain("point has non-finite coordinates"));
        }
        Ok(())
    }

    // Points this far outside still count as boundary points.
    fn boundary_slack(&self) -> f64 {
        8.0 * f64::EPSILON * (self.inradius + self.center().iter().fold(0.0f64, |m, c| m.max(c.abs())))
    }

    /// `ω̃(x)`: distance to `∂Ω`, positive inside and negative outside.
    pub fn signed_distance(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        Ok(match &self.geom {
            Geometry::Ball { center, radius } => radius - dist(x, center),
            Geometry::Ellipse(e) => e.signed_distance([x[0], x[1]]),
            Geometry::Polygon(p) => p.signed_distance([x[0], x[1]]),
        })
    }

    /// `ω(x) = dist(x, ∂Ω)` for `x` in the closed domain.
    pub fn distance_to_boundary(&self, x: &[f64]) -> Result<f64> {
        let sd = self.signed_distance(x)?;
        if sd < -self.boundary_slack() {
            return Err(Error::OutsideBase(sd));
        }
        Ok(sd.max(0.0))
    }

    /// Whether `x` lies in the closed domain.
    pub fn contains(&self, x: &[f64]) -> bool {
        self.signed_distance(x).map(|d| d >= -self.boundary_slack()).unwrap_or(false)
    }

    /// Distance from `x` to the singular set `Σ` of `ω`.
    pub fn singular_set_distance(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        Ok(match &self.geom {
            Geometry::Ball { center, .. } => dist(x, center),
            Geometry::Ellipse(e) => e.medial_distance([x[0], x[1]]),
            Geometry::Polygon(p) => p.medial_distance([x[0], x[1]]),
        })
    }

    /// The medial axis as a list of segments (empty for balls, whose singular
    /// set is the centre).
    pub fn medial_axis(&self) -> Vec<([f64; 2], [f64; 2])> {
        match &self.geom {
            Geometry::Ball { .. } => Vec::new(),
            Geometry::Ellipse(e) => vec![e.medial_segment()],
            Geometry::Polygon(p) => p.skeleton.clone(),
        }
    }

    /// `∇ω(x)`, a unit vector, for interior `x` outside the singular band.
    pub fn omega_gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        let w = self.distance_to_boundary(x)?;
        if w <= 0.0 {
            return Err(Error::Boundary);
        }
        let s = self.singular_set_distance(x)?;
        if s <= self.singular_band {
            return Err(Error::SingularSet { distance: s, band: self.singular_band });
        }
        Ok(self.omega_gradient_unchecked(x))
    }

    /// `∇ω(x)` without the singular-band check. On `Σ` this returns one of the
    /// one-sided gradients; at a ball centre it returns an arbitrary unit vector.
    pub fn omega_gradient_unchecked(&self, x: &[f64]) -> Vec<f64> {
        match &self.geom {
            Geometry::Ball { center, .. } => {
                let r = dist(x, center);
                if r == 0.0 {
                    let mut e = vec![0.0; self.dim];
                    e[0] = -1.0;
                    return e;
                }
                center.iter().zip(x).map(|(c, xi)| (c - xi) / r).collect()
            }
            Geometry::Ellipse(e) => e.gradient([x[0], x[1]]).to_vec(),
            Geometry::Polygon(p) => p.gradient([x[0], x[1]]).to_vec(),
        }
    }
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn point_segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    let t = if len2 > 0.0 { (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / len2).clamp(0.0, 1.0) } else { 0.0 };
    (p[0] - a[0] - t * d[0]).hypot(p[1] - a[1] - t * d[1])
}

// ---------------------------------------------------------------------------
// Ellipse

#[derive(Debug, Clone)]
struct EllipseGeom {
    center: [f64; 2],
    // local frame: a ≥ b, major axis along local x
    a: f64,
    b: f64,
    // whether the major axis is the global y axis
    swapped: bool,
}

impl EllipseGeom {
    fn new(center: [f64; 2], semi_axes: [f64; 2]) -> Self {
        let swapped = semi_axes[1] > semi_axes[0];
        let (a, b) = if swapped { (semi_axes[1], semi_axes[0]) } else { (semi_axes[0], semi_axes[1]) };
        Self { center, a, b, swapped }
    }

    fn to_local(&self, x: [f64; 2]) -> [f64; 2] {
        let d = [x[0] - self.center[0], x[1] - self.center[1]];
        if self.swapped {
            [d[1], d[0]]
        } else {
            d
        }
    }

    fn vec_to_global(&self, v: [f64; 2]) -> [f64; 2] {
        if self.swapped {
            [v[1], v[0]]
        } else {
            v
        }
    }

    fn medial_segment(&self) -> ([f64; 2], [f64; 2]) {
        let e = (self.a * self.a - self.b * self.b) / self.a;
        let p = self.vec_to_global([e, 0.0]);
        let c = self.center;
        ([c[0] - p[0], c[1] - p[1]], [c[0] + p[0], c[1] + p[1]])
    }

    /// Nearest boundary point to a local point in the closed first quadrant.
    fn nearest_first_quadrant(&self, y: [f64; 2]) -> [f64; 2] {
        let (a, b) = (self.a, self.b);
        if y[1] == 0.0 {
            let e = (a * a - b * b) / a;
            if y[0] < e {
                let x0 = a * a * y[0] / (a * a - b * b);
                let r = (1.0 - (x0 / a).powi(2)).max(0.0);
                // inside the focal segment two nearest points are mirror images
                return [x0, b * r.sqrt()];
            }
            return [a, 0.0];
        }
        if y[0] == 0.0 {
            return [0.0, b];
        }
        // Root of F(t) = (a y0/(t+a²))² + (b y1/(t+b²))² - 1, which is decreasing
        // on t > -b²; the nearest point is (a² y0/(t+a²), b² y1/(t+b²)).
        let f = |t: f64| {
            let r0 = a * y[0] / (t + a * a);
            let r1 = b * y[1] / (t + b * b);
            (r0 * r0 + r1 * r1 - 1.0, -2.0 * (r0 * r0 / (t + a * a) + r1 * r1 / (t + b * b)))
        };
        let mut lo = -b * b + b * y[1];
        let mut hi = -b * b + (a * a * y[0] * y[0] + b * b * y[1] * y[1]).sqrt();
        let mut t = 0.0f64.clamp(lo, hi);
        for _ in 0..200 {
            let (v, d) = f(t);
            if v == 0.0 {
                break;
            }
            if v > 0.0 {
                lo = t;
            } else {
                hi = t;
            }
            let mut next = t - v / d;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            let done = (next - t).abs() <= 1e-15 * (t.abs() + b * b) || hi - lo <= 1e-15 * (a * a);
            t = next;
            if done {
                break;
            }
        }
        [a * a * y[0] / (t + a * a), b * b * y[1] / (t + b * b)]
    }

    // Nearest boundary point in local coordinates, with the quadrant signs.
    fn nearest_local(&self, y: [f64; 2]) -> [f64; 2] {
        let q = self.nearest_first_quadrant([y[0].abs(), y[1].abs()]);
        [q[0].copysign(y[0]), q[1].copysign(y[1])]
    }

    fn inside(&self, y: [f64; 2]) -> bool {
        (y[0] / self.a).powi(2) + (y[1] / self.b).powi(2) <= 1.0
    }

    fn signed_distance(&self, x: [f64; 2]) -> f64 {
        let y = self.to_local(x);
        let inside = self.inside(y);
        let d = if inside {
            let p = self.nearest_local(y);
            (y[0] - p[0]).hypot(y[1] - p[1])
        } else {
            self.outside_distance(y)
        };
        if inside {
            d
        } else {
            -d
        }
    }

    fn outside_distance(&self, y: [f64; 2]) -> f64 {
        // same root problem, now with t > 0
        let (a, b) = (self.a, self.b);
        let z = [y[0].abs(), y[1].abs()];
        let f = |t: f64| (a * z[0] / (t + a * a)).powi(2) + (b * z[1] / (t + b * b)).powi(2) - 1.0;
        let mut lo = 0.0;
        let mut hi = (a * a * z[0] * z[0] + b * b * z[1] * z[1]).sqrt();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if f(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let t = 0.5 * (lo + hi);
        let p = [a * a * z[0] / (t + a * a), b * b * z[1] / (t + b * b)];
        (z[0] - p[0]).hypot(z[1] - p[1])
    }

    fn gradient(&self, x: [f64; 2]) -> [f64; 2] {
        let y = self.to_local(x);
        let p = self.nearest_local(y);
        // inward normal at the nearest boundary point
        let n = [-p[0] / (self.a * self.a), -p[1] / (self.b * self.b)];
        let len = n[0].hypot(n[1]);
        self.vec_to_global([n[0] / len, n[1] / len])
    }

    fn medial_distance(&self, x: [f64; 2]) -> f64 {
        let y = self.to_local(x);
        let e = (self.a * self.a - self.b * self.b) / self.a;
        point_segment_distance(y, [-e, 0.0], [e, 0.0])
    }
}

// ---------------------------------------------------------------------------
// Polygon

#[derive(Debug, Clone)]
struct PolygonGeom {
    vertices: Vec<[f64; 2]>,
    // per edge i (from vertex i to i+1): inward unit normal and offset with
    // n·p - c = signed distance to the edge line
    normals: Vec<[f64; 2]>,
    offsets: Vec<f64>,
    area: f64,
    inradius: f64,
    incenter: [f64; 2],
    skeleton: Vec<([f64; 2], [f64; 2])>,
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

impl PolygonGeom {
    fn new(vertices: &[[f64; 2]]) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(domain(format!("polygon needs at least 3 vertices, got {n}")));
        }
        if n > MAX_POLYGON_VERTICES {
            return Err(domain(format!("polygon has {n} vertices; at most {MAX_POLYGON_VERTICES} supported")));
        }
        if vertices.iter().flatten().any(|c| !c.is_finite()) {
            return Err(domain("polygon vertices must be finite"));
        }
        let scale = vertices.iter().flatten().fold(0.0f64, |m, c| m.max(c.abs())).max(f64::MIN_POSITIVE);
        let mut turning = 0.0;
        for i in 0..n {
            let (p, q, r) = (vertices[i], vertices[(i + 1) % n], vertices[(i + 2) % n]);
            let c = cross(p, q, r);
            if !(c > 1e-12 * scale * scale) {
                return Err(domain(format!(
                    "polygon must be strictly convex and counterclockwise (vertex {} fails)",
                    (i + 1) % n
                )));
            }
            let d1 = [q[0] - p[0], q[1] - p[1]];
            let d2 = [r[0] - q[0], r[1] - q[1]];
            turning += (d1[0] * d2[1] - d1[1] * d2[0]).atan2(d1[0] * d2[0] + d1[1] * d2[1]);
        }
        if (turning - 2.0 * PI).abs() > 1e-6 {
            return Err(domain("polygon boundary winds more than once"));
        }
        let mut normals = Vec::with_capacity(n);
        let mut offsets = Vec::with_capacity(n);
        let mut area = 0.0;
        for i in 0..n {
            let (p, q) = (vertices[i], vertices[(i + 1) % n]);
            let d = [q[0] - p[0], q[1] - p[1]];
            let len = d[0].hypot(d[1]);
            let nrm = [-d[1] / len, d[0] / len];
            normals.push(nrm);
            offsets.push(nrm[0] * p[0] + nrm[1] * p[1]);
            area += p[0] * q[1] - p[1] * q[0];
        }
        let mut geom = Self {
            vertices: vertices.to_vec(),
            normals,
            offsets,
            area: 0.5 * area,
            inradius: 0.0,
            incenter: [0.0; 2],
            skeleton: Vec::new(),
        };
        geom.build_skeleton()?;
        Ok(geom)
    }

    fn line_distance(&self, i: usize, p: [f64; 2]) -> f64 {
        self.normals[i][0] * p[0] + self.normals[i][1] * p[1] - self.offsets[i]
    }

    // Point equidistant (distance t) from the three edge lines, or None when
    // the lines have no common offset point.
    fn concurrence(&self, e: [usize; 3]) -> Option<([f64; 2], f64)> {
        // rows: n_x p_x + n_y p_y - t = c
        let m = nalgebra::Matrix3::from_fn(|r, c| match c {
            0 => self.normals[e[r]][0],
            1 => self.normals[e[r]][1],
            _ => -1.0,
        });
        let rhs = nalgebra::Vector3::from_fn(|r, _| self.offsets[e[r]]);
        let sol = m.lu().solve(&rhs)?;
        sol.iter().all(|v| v.is_finite()).then(|| ([sol[0], sol[1]], sol[2]))
    }

    /// Straight skeleton by successive edge collapse. For a convex polygon the
    /// skeleton coincides with the medial axis; the last collapse time is the
    /// inradius.
    fn build_skeleton(&mut self) -> Result<()> {
        let n = self.vertices.len();
        // active[j] = (edge index, start point of the vertex between this edge and the next)
        let mut active: Vec<(usize, [f64; 2])> = (0..n).map(|i| (i, self.vertices[(i + 1) % n])).collect();
        let mut now = 0.0f64;
        let mut skeleton = Vec::new();
        while active.len() > 3 {
            let m = active.len();
            let mut best: Option<(usize, [f64; 2], f64)> = None;
            for j in 0..m {
                let e = [active[(j + m - 1) % m].0, active[j].0, active[(j + 1) % m].0];
                let Some((p, t)) = self.concurrence(e) else { continue };
                if t < now - 1e-12 * (1.0 + now) {
                    continue;
                }
                if best.is_none_or(|(_, _, bt)| t < bt) {
                    best = Some((j, p, t));
                }
            }
            let (j, p, t) =
                best.ok_or_else(|| Error::Construction("straight skeleton has no collapse event".into()))?;
            let prev = (j + m - 1) % m;
            // the two vertices bounding edge j meet at p
            skeleton.push((active[prev].1, p));
            skeleton.push((active[j].1, p));
            active[prev].1 = p;
            active.remove(j);
            now = t.max(now);
        }
        let e = [active[0].0, active[1].0, active[2].0];
        let (p, t) =
            self.concurrence(e).ok_or_else(|| Error::Construction("degenerate final skeleton triangle".into()))?;
        for (_, start) in &active {
            skeleton.push((*start, p));
        }
        if !(t > 0.0) {
            return Err(Error::Construction("polygon has nonpositive inradius".into()));
        }
        // simultaneous events leave slivers of rounding length
        skeleton.retain(|(a, b)| (a[0] - b[0]).hypot(a[1] - b[1]) > 1e-12 * t);
        self.inradius = t;
        self.incenter = p;
        self.skeleton = skeleton;
        Ok(())
    }

    fn inside(&self, p: [f64; 2]) -> bool {
        (0..self.vertices.len()).all(|i| self.line_distance(i, p) >= 0.0)
    }

    fn signed_distance(&self, p: [f64; 2]) -> f64 {
        let n = self.vertices.len();
        if self.inside(p) {
            (0..n).map(|i| self.line_distance(i, p)).fold(f64::INFINITY, f64::min)
        } else {
            -(0..n)
                .map(|i| point_segment_distance(p, self.vertices[i], self.vertices[(i + 1) % n]))
                .fold(f64::INFINITY, f64::min)
        }
    }

    fn gradient(&self, p: [f64; 2]) -> [f64; 2] {
        let i = (0..self.vertices.len())
            .min_by(|&i, &j| self.line_distance(i, p).total_cmp(&self.line_distance(j, p)))
            .expect("polygon has edges");
        self.normals[i]
    }

    fn medial_distance(&self, p: [f64; 2]) -> f64 {
        self.skeleton.iter().map(|(a, b)| point_segment_distance(p, *a, *b)).fold(f64::INFINITY, f64::min)
    }
}
