//! Profile curves and triangle meshes of three-dimensional realizations.
//!
//! Vertices follow the `[x′, x″]` layout: for `n = 3, k = 2` a vertex is
//! `(f cos θ, f sin θ, x″)`, and a graph slice of an array with a planar base
//! is `(x₁, x″₁, x″₂)`. Triangles are oriented with outward normals.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::io::{self, Write};

use crate::array::SphericalArray;
use crate::error::{domain, Result};
use crate::numfmt::{format_17, format_g};
use crate::scaling::ScalingFunction;

/// Significant digits of vertex coordinates in OBJ output.
pub const OBJ_DIGITS: usize = 9;

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<[f64; 3]>,
    pub triangles: Vec<[usize; 3]>,
    pub closed: bool,
}

impl Mesh {
    pub fn area(&self) -> f64 {
        mesh_area(self)
    }

    /// Whether every triangle index refers to a vertex.
    pub fn indices_valid(&self) -> bool {
        self.triangles.iter().flatten().all(|&i| i < self.vertices.len())
    }

    /// Every undirected edge belongs to exactly two triangles.
    pub fn is_watertight(&self) -> bool {
        self.indices_valid() && self.undirected_edges().values().all(|&c| c == 2)
    }

    /// No directed edge occurs twice, so neighbouring triangles agree on
    /// orientation.
    pub fn is_consistently_oriented(&self) -> bool {
        let mut seen = HashMap::new();
        for t in &self.triangles {
            for e in 0..3 {
                if seen.insert((t[e], t[(e + 1) % 3]), ()).is_some() {
                    return false;
                }
            }
        }
        true
    }

    /// `V - E + F`.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.undirected_edges().len() as i64 + self.triangles.len() as i64
    }

    /// Volume enclosed by a closed, outward-oriented mesh (divergence theorem).
    pub fn signed_volume(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| {
                let [a, b, c] = t.map(|i| self.vertices[i]);
                dot(a, cross(b, c)) / 6.0
            })
            .sum()
    }

    fn undirected_edges(&self) -> HashMap<(usize, usize), u32> {
        let mut edges = HashMap::new();
        for t in &self.triangles {
            for e in 0..3 {
                let (a, b) = (t[e], t[(e + 1) % 3]);
                *edges.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        edges
    }

    /// Wavefront OBJ: `v` then `f` records, 1-based indices, LF endings and
    /// 9 significant digits.
    pub fn write_obj<W: Write>(&self, mut w: W) -> io::Result<()> {
        for v in &self.vertices {
            writeln!(
                w,
                "v {} {} {}",
                format_g(v[0], OBJ_DIGITS),
                format_g(v[1], OBJ_DIGITS),
                format_g(v[2], OBJ_DIGITS)
            )?;
        }
        for t in &self.triangles {
            writeln!(w, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1)?;
        }
        Ok(())
    }

    pub fn to_obj_string(&self) -> String {
        let mut out = Vec::new();
        self.write_obj(&mut out).expect("writing to memory");
        String::from_utf8(out).expect("ASCII")
    }
}

/// Sum of triangle areas.
pub fn mesh_area(m: &Mesh) -> f64 {
    m.triangles
        .iter()
        .map(|t| {
            let [a, b, c] = t.map(|i| m.vertices[i]);
            0.5 * norm(cross(sub(b, a), sub(c, a)))
        })
        .sum()
}

/// `(x, f_k(x))` at `samples` Chebyshev-spaced abscissae of `[0, M_k]`.
pub fn profile_curve(s: &ScalingFunction, samples: usize) -> Result<Vec<(f64, f64)>> {
    if samples < 2 {
        return Err(domain(format!("a profile needs at least 2 samples, got {samples}")));
    }
    let m = s.m_k();
    let last = samples - 1;
    (0..samples)
        .map(|i| {
            if i == 0 {
                return Ok((0.0, 0.0));
            }
            if i == last {
                return Ok((m, 1.0));
            }
            let x = 0.5 * m * (1.0 - (PI * i as f64 / last as f64).cos());
            Ok((x, s.f(x)?))
        })
        .collect()
}

/// CSV with header `x,f` and 17 significant digits.
pub fn profile_csv(points: &[(f64, f64)]) -> String {
    let mut out = String::from("x,f\n");
    for (x, y) in points {
        out.push_str(&format_17(*x));
        out.push(',');
        out.push_str(&format_17(*y));
        out.push('\n');
    }
    out
}

enum Layer {
    Point(usize),
    Ring(usize),
}

/// Surface of revolution `{(f(t) cos θ, f(t) sin θ, t)}` of an array with
/// `n = 3`.
///
/// Axial nodes are Chebyshev points of the base interval, so they cluster
/// at the poles where `f′` blows up. Where `f` vanishes at an end the surface
/// closes with a triangle fan around the pole; otherwise a flat cap closes it.
pub fn revolve_mesh(h: &SphericalArray, res_axial: usize, res_angular: usize) -> Result<Mesh> {
    if h.n() != 3 || h.k() != 2 {
        return Err(domain(format!("revolve_mesh needs n = 3 and k = 2, got n = {}, k = {}", h.n(), h.k())));
    }
    if res_axial < 2 || res_angular < 3 {
        return Err(domain("revolve_mesh needs res_axial ≥ 2 and res_angular ≥ 3"));
    }
    let (lo, hi) = h.base().bounding_box();
    let (c, rho) = (0.5 * (lo[0] + hi[0]), 0.5 * (hi[0] - lo[0]));
    let angles: Vec<(f64, f64)> =
        (0..res_angular).map(|j| (2.0 * PI * j as f64 / res_angular as f64).sin_cos()).map(|(s, c)| (c, s)).collect();

    let mut vertices = Vec::new();
    let mut layers = Vec::new();
    for i in 0..=res_axial {
        let t = match i {
            0 => lo[0],
            _ if i == res_axial => hi[0],
            _ => c - rho * (PI * i as f64 / res_axial as f64).cos(),
        };
        let end = i == 0 || i == res_axial;
        let f = if end && h.vanishes_on_boundary() { 0.0 } else { h.warping(&[t])? };
        if i == 0 {
            layers.push(Layer::Point(vertices.len()));
            vertices.push([0.0, 0.0, t]);
        }
        if !(end && f == 0.0) {
            layers.push(Layer::Ring(vertices.len()));
            vertices.extend(angles.iter().map(|(ca, sa)| [f * ca, f * sa, t]));
        }
        if i == res_axial {
            layers.push(Layer::Point(vertices.len()));
            vertices.push([0.0, 0.0, t]);
        }
    }

    let m = res_angular;
    let mut triangles = Vec::new();
    for pair in layers.windows(2) {
        match (&pair[0], &pair[1]) {
            (Layer::Point(p), Layer::Ring(a)) => {
                triangles.extend((0..m).map(|j| [*p, a + (j + 1) % m, a + j]));
            }
            (Layer::Ring(a), Layer::Point(q)) => {
                triangles.extend((0..m).map(|j| [*q, a + j, a + (j + 1) % m]));
            }
            (Layer::Ring(a), Layer::Ring(b)) => {
                for j in 0..m {
                    let jn = (j + 1) % m;
                    triangles.push([a + j, a + jn, b + jn]);
                    triangles.push([a + j, b + jn, b + j]);
                }
            }
            (Layer::Point(_), Layer::Point(_)) => unreachable!("at least one interior ring"),
        }
    }
    Ok(Mesh { vertices, triangles, closed: true })
}

/// The slice `x₂ = ⋯ = x_k = 0` of an array with a planar base: the two
/// sheets `x₁ = ±f(x″)`, joined along the rim.
///
/// The base is swept in polar coordinates about its centre with `res` radial
/// steps at radii `ρ(θ)·sin(πi/2res)` and `4·res` directions. Where `f`
/// vanishes on `∂Ω` the sheets share their rim vertices; otherwise a vertical
/// wall joins them.
pub fn graph_slice_mesh(h: &SphericalArray, res: usize) -> Result<Mesh> {
    if h.n() - h.k() != 2 {
        return Err(domain(format!("graph_slice_mesh needs a planar base, got dimension {}", h.n() - h.k())));
    }
    if res < 2 {
        return Err(domain("graph_slice_mesh needs res ≥ 2"));
    }
    let base = h.base();
    let center = base.center();
    let m = 4 * res;
    let reach: Vec<(f64, f64, f64)> = (0..m)
        .map(|j| {
            let (s, c) = (2.0 * PI * j as f64 / m as f64).sin_cos();
            Ok((c, s, boundary_reach(h, &center, [c, s])?))
        })
        .collect::<Result<_>>()?;
    let shared_rim = h.vanishes_on_boundary();

    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    // sheet[s][i] is the first vertex of ring i (ring 0 is the centre point)
    let mut sheets = [Vec::new(), Vec::new()];
    let f0 = h.warping(&center)?;
    let rim_f: Vec<f64> = if shared_rim {
        vec![0.0; m]
    } else {
        reach.iter().map(|(c, s, r)| h.warping(&[center[0] + r * c, center[1] + r * s])).collect::<Result<_>>()?
    };
    let mut rim = Vec::new();
    for (side, sign) in [(0usize, 1.0f64), (1, -1.0)] {
        sheets[side].push(vertices.len());
        vertices.push([sign * f0, center[0], center[1]]);
        for i in 1..res {
            sheets[side].push(vertices.len());
            let t = (0.5 * PI * i as f64 / res as f64).sin();
            for (c, s, r) in &reach {
                let p = [center[0] + t * r * c, center[1] + t * r * s];
                vertices.push([sign * h.warping(&p)?, p[0], p[1]]);
            }
        }
        if side == 0 || !shared_rim {
            rim.push(vertices.len());
            for (j, (c, s, r)) in reach.iter().enumerate() {
                vertices.push([sign * rim_f[j], center[0] + r * c, center[1] + r * s]);
            }
        }
        sheets[side].push(*rim.last().expect("rim ring"));
    }

    for (side, sheet) in sheets.iter().enumerate() {
        // top sheet counter-clockwise in the base plane, bottom clockwise
        let orient = |t: [usize; 3]| if side == 0 { t } else { [t[0], t[2], t[1]] };
        let (p, a) = (sheet[0], sheet[1]);
        triangles.extend((0..m).map(|j| orient([p, a + j, a + (j + 1) % m])));
        for w in sheet[1..].windows(2) {
            let (a, b) = (w[0], w[1]);
            for j in 0..m {
                let jn = (j + 1) % m;
                triangles.push(orient([a + j, b + j, b + jn]));
                triangles.push(orient([a + j, b + jn, a + jn]));
            }
        }
    }
    if !shared_rim {
        let (t, b) = (rim[0], rim[1]);
        for j in 0..m {
            let jn = (j + 1) % m;
            triangles.push([t + j, b + j, b + jn]);
            triangles.push([t + j, b + jn, t + jn]);
        }
    }
    Ok(Mesh { vertices, triangles, closed: true })
}

// Distance from `center` to `∂Ω` along the unit direction `dir`.
fn boundary_reach(h: &SphericalArray, center: &[f64], dir: [f64; 2]) -> Result<f64> {
    let base = h.base();
    if base.is_ball() {
        let (lo, hi) = base.bounding_box();
        return Ok(0.5 * (hi[0] - lo[0]));
    }
    let (lo, hi) = base.bounding_box();
    let mut outside = (hi[0] - lo[0]) + (hi[1] - lo[1]);
    let mut inside = 0.0;
    let at = |t: f64| [center[0] + t * dir[0], center[1] + t * dir[1]];
    for _ in 0..200 {
        let mid = 0.5 * (inside + outside);
        if mid <= inside || mid >= outside {
            break;
        }
        if base.contains(&at(mid)) {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    Ok(inside)
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}
