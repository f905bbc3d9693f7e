//! Planar convex sets: vertical chords, boundary crossings and exact areas.

use std::f64::consts::PI;

#[derive(Debug, Clone)]
pub(crate) enum Convex2 {
    /// Counterclockwise vertices.
    Polygon(Vec<[f64; 2]>),
    Disk {
        c: [f64; 2],
        r: f64,
    },
    /// Axis-aligned, with semi-axes `ax` along x and `ay` along y.
    Ellipse {
        c: [f64; 2],
        ax: f64,
        ay: f64,
    },
}

const SAMPLES: usize = 4096;

fn relaxed_sqrt(s2: f64, scale2: f64) -> Option<f64> {
    if s2 >= 0.0 {
        Some(s2.sqrt())
    } else if s2 > -1e-12 * scale2 {
        Some(0.0)
    } else {
        None
    }
}

impl Convex2 {
    pub(crate) fn rect(lo: [f64; 2], hi: [f64; 2]) -> Self {
        Convex2::Polygon(vec![lo, [hi[0], lo[1]], hi, [lo[0], hi[1]]])
    }

    fn scale(&self) -> f64 {
        match self {
            Convex2::Polygon(v) => {
                let (lo, hi) = self.x_range();
                let (ylo, yhi) =
                    v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p[1]), b.max(p[1])));
                (hi - lo).max(yhi - ylo)
            }
            Convex2::Disk { r, .. } => 2.0 * r,
            Convex2::Ellipse { ax, ay, .. } => 2.0 * ax.max(*ay),
        }
    }

    pub(crate) fn x_range(&self) -> (f64, f64) {
        match self {
            Convex2::Polygon(v) => {
                v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p[0]), b.max(p[0])))
            }
            Convex2::Disk { c, r } => (c[0] - r, c[0] + r),
            Convex2::Ellipse { c, ax, .. } => (c[0] - ax, c[0] + ax),
        }
    }

    /// The set `{y : (x, y) ∈ self}`, with a little slack at tangencies.
    pub(crate) fn chord(&self, x: f64) -> Option<(f64, f64)> {
        match self {
            Convex2::Disk { c, r } => {
                let dx = x - c[0];
                relaxed_sqrt(r * r - dx * dx, r * r).map(|s| (c[1] - s, c[1] + s))
            }
            Convex2::Ellipse { c, ax, ay } => {
                let u = (x - c[0]) / ax;
                relaxed_sqrt(1.0 - u * u, 1.0).map(|s| (c[1] - ay * s, c[1] + ay * s))
            }
            Convex2::Polygon(v) => {
                let (lo, hi) = self.x_range();
                let slack = 1e-12 * self.scale();
                if x < lo - slack || x > hi + slack {
                    return None;
                }
                let x = x.clamp(lo, hi);
                let mut ymin = f64::INFINITY;
                let mut ymax = f64::NEG_INFINITY;
                let n = v.len();
                for i in 0..n {
                    let (a, b) = (v[i], v[(i + 1) % n]);
                    if x < a[0].min(b[0]) || x > a[0].max(b[0]) {
                        continue;
                    }
                    if a[0] == b[0] {
                        ymin = ymin.min(a[1].min(b[1]));
                        ymax = ymax.max(a[1].max(b[1]));
                    } else {
                        let t = (x - a[0]) / (b[0] - a[0]);
                        let y = a[1] + t * (b[1] - a[1]);
                        ymin = ymin.min(y);
                        ymax = ymax.max(y);
                    }
                }
                (ymin <= ymax).then_some((ymin, ymax))
            }
        }
    }

    /// Abscissae where the chord endpoints change formula.
    pub(crate) fn critical_x(&self) -> Vec<f64> {
        let (lo, hi) = self.x_range();
        let mut out = vec![lo, hi];
        if let Convex2::Polygon(v) = self {
            out.extend(v.iter().map(|p| p[0]));
        }
        out
    }

    /// Implicit function, negative inside (smooth shapes only).
    fn implicit(&self, p: [f64; 2]) -> f64 {
        match self {
            Convex2::Disk { c, r } => ((p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2)) / (r * r) - 1.0,
            Convex2::Ellipse { c, ax, ay } => ((p[0] - c[0]) / ax).powi(2) + ((p[1] - c[1]) / ay).powi(2) - 1.0,
            Convex2::Polygon(_) => unreachable!("polygons have no smooth implicit form"),
        }
    }

    fn boundary_point(&self, theta: f64) -> [f64; 2] {
        match self {
            Convex2::Disk { c, r } => [c[0] + r * theta.cos(), c[1] + r * theta.sin()],
            Convex2::Ellipse { c, ax, ay } => [c[0] + ax * theta.cos(), c[1] + ay * theta.sin()],
            Convex2::Polygon(_) => unreachable!("polygons are handled edge by edge"),
        }
    }

    /// Parameters `t ∈ [0, 1]` where the segment `a + t (b - a)` crosses the boundary.
    fn segment_crossings(&self, a: [f64; 2], b: [f64; 2]) -> Vec<f64> {
        match self {
            Convex2::Disk { c, r } => {
                unit_circle_crossings([(a[0] - c[0]) / r, (a[1] - c[1]) / r], [(b[0] - c[0]) / r, (b[1] - c[1]) / r])
            }
            Convex2::Ellipse { c, ax, ay } => unit_circle_crossings(
                [(a[0] - c[0]) / ax, (a[1] - c[1]) / ay],
                [(b[0] - c[0]) / ax, (b[1] - c[1]) / ay],
            ),
            Convex2::Polygon(v) => {
                let n = v.len();
                (0..n).filter_map(|i| segment_segment(a, b, v[i], v[(i + 1) % n])).collect()
            }
        }
    }
}

fn unit_circle_crossings(a: [f64; 2], b: [f64; 2]) -> Vec<f64> {
    let d = [b[0] - a[0], b[1] - a[1]];
    let qa = d[0] * d[0] + d[1] * d[1];
    let qb = 2.0 * (a[0] * d[0] + a[1] * d[1]);
    let qc = a[0] * a[0] + a[1] * a[1] - 1.0;
    quadratic_roots(qa, qb, qc).into_iter().filter(|t| (0.0..=1.0).contains(t)).collect()
}

/// Real roots of `a t² + b t + c`, using the cancellation-free form.
pub(crate) fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    if a == 0.0 {
        return if b != 0.0 { vec![-c / b] } else { Vec::new() };
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Vec::new();
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    if q == 0.0 {
        return vec![0.0];
    }
    vec![q / a, c / q]
}

fn segment_segment(a: [f64; 2], b: [f64; 2], p: [f64; 2], q: [f64; 2]) -> Option<f64> {
    let r = [b[0] - a[0], b[1] - a[1]];
    let s = [q[0] - p[0], q[1] - p[1]];
    let den = r[0] * s[1] - r[1] * s[0];
    if den == 0.0 {
        return None;
    }
    let w = [p[0] - a[0], p[1] - a[1]];
    let t = (w[0] * s[1] - w[1] * s[0]) / den;
    let u = (w[0] * r[1] - w[1] * r[0]) / den;
    ((0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u)).then_some(t)
}

/// Abscissae of the points where the two boundaries cross.
pub(crate) fn crossing_abscissae(a: &Convex2, b: &Convex2) -> Vec<f64> {
    match (a, b) {
        (Convex2::Polygon(v), other) | (other, Convex2::Polygon(v)) => {
            let n = v.len();
            let mut out = Vec::new();
            for i in 0..n {
                let (p, q) = (v[i], v[(i + 1) % n]);
                for t in other.segment_crossings(p, q) {
                    out.push(p[0] + t * (q[0] - p[0]));
                }
            }
            out
        }
        (Convex2::Disk { c: c1, r: r1 }, Convex2::Disk { c: c2, r: r2 }) => {
            let d = (c2[0] - c1[0]).hypot(c2[1] - c1[1]);
            if d == 0.0 || d > r1 + r2 || d < (r1 - r2).abs() {
                return Vec::new();
            }
            let along = (d * d + r1 * r1 - r2 * r2) / (2.0 * d);
            let h = (r1 * r1 - along * along).max(0.0).sqrt();
            let e = [(c2[0] - c1[0]) / d, (c2[1] - c1[1]) / d];
            let m = [c1[0] + along * e[0], c1[1] + along * e[1]];
            vec![m[0] - h * e[1], m[0] + h * e[1]]
        }
        (smooth_a, smooth_b) => {
            // no convenient closed form: bracket sign changes along a's boundary
            let g = |theta: f64| smooth_b.implicit(smooth_a.boundary_point(theta));
            let mut out = Vec::new();
            let step = 2.0 * PI / SAMPLES as f64;
            let mut prev = g(0.0);
            for i in 1..=SAMPLES {
                let (mut lo, mut hi) = (step * (i - 1) as f64, step * i as f64);
                let cur = g(hi);
                if prev == 0.0 {
                    out.push(smooth_a.boundary_point(lo)[0]);
                } else if prev * cur < 0.0 {
                    let mut glo = prev;
                    for _ in 0..80 {
                        let mid = 0.5 * (lo + hi);
                        let gm = g(mid);
                        if gm * glo <= 0.0 {
                            hi = mid;
                        } else {
                            lo = mid;
                            glo = gm;
                        }
                    }
                    out.push(smooth_a.boundary_point(0.5 * (lo + hi))[0]);
                }
                prev = cur;
            }
            out
        }
    }
}

pub(crate) fn polygon_area(v: &[[f64; 2]]) -> f64 {
    let n = v.len();
    0.5 * (0..n).map(|i| v[i][0] * v[(i + 1) % n][1] - v[i][1] * v[(i + 1) % n][0]).sum::<f64>()
}

/// Intersection of a polygon with a convex counterclockwise polygon
/// (Sutherland-Hodgman).
pub(crate) fn clip_polygon(subject: &[[f64; 2]], clip: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut out = subject.to_vec();
    let n = clip.len();
    for i in 0..n {
        if out.is_empty() {
            break;
        }
        let (a, b) = (clip[i], clip[(i + 1) % n]);
        let side = |p: [f64; 2]| (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
        let input = std::mem::take(&mut out);
        let m = input.len();
        for j in 0..m {
            let (p, q) = (input[j], input[(j + 1) % m]);
            let (sp, sq) = (side(p), side(q));
            if sp >= 0.0 {
                out.push(p);
            }
            if (sp >= 0.0) != (sq >= 0.0) {
                let t = sp / (sp - sq);
                out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
            }
        }
    }
    out
}

/// Exact area of a counterclockwise polygon intersected with a disk.
pub(crate) fn polygon_disk_area(poly: &[[f64; 2]], c: [f64; 2], r: f64) -> f64 {
    let n = poly.len();
    let rel: Vec<[f64; 2]> = poly.iter().map(|p| [p[0] - c[0], p[1] - c[1]]).collect();
    (0..n).map(|i| triangle_disk_area(rel[i], rel[(i + 1) % n], r)).sum()
}

// Signed area of the triangle (0, a, b) intersected with the disk of radius r
// about the origin.
fn triangle_disk_area(a: [f64; 2], b: [f64; 2], r: f64) -> f64 {
    let mut ts = vec![0.0];
    let mut crossings = unit_circle_crossings([a[0] / r, a[1] / r], [b[0] / r, b[1] / r]);
    crossings.sort_by(f64::total_cmp);
    ts.extend(crossings.into_iter().filter(|&t| t > 0.0 && t < 1.0));
    ts.push(1.0);
    let at = |t: f64| [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
    let mut area = 0.0;
    for w in ts.windows(2) {
        let (p, q) = (at(w[0]), at(w[1]));
        let m = at(0.5 * (w[0] + w[1]));
        let cross = p[0] * q[1] - p[1] * q[0];
        if m[0] * m[0] + m[1] * m[1] <= r * r {
            area += 0.5 * cross;
        } else {
            let dot = p[0] * q[0] + p[1] * q[1];
            area += 0.5 * r * r * cross.atan2(dot);
        }
    }
    area
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disk_in_square_and_square_in_disk() {
        let sq = Convex2::rect([-1.0, -1.0], [1.0, 1.0]);
        let Convex2::Polygon(v) = &sq else { unreachable!() };
        assert!((polygon_disk_area(v, [0.0, 0.0], 0.5) - PI * 0.25).abs() < 1e-15);
        assert!((polygon_disk_area(v, [0.0, 0.0], 2.0) - 4.0).abs() < 1e-14);
        // half disk
        let half = Convex2::rect([0.0, -2.0], [2.0, 2.0]);
        let Convex2::Polygon(h) = &half else { unreachable!() };
        assert!((polygon_disk_area(h, [0.0, 0.0], 1.0) - PI / 2.0).abs() < 1e-14);
        // quarter circle corner: disk radius 1 at the square corner
        assert!((polygon_disk_area(v, [1.0, 1.0], 1.0) - PI / 4.0).abs() < 1e-14);
    }

    #[test]
    fn clipping() {
        let a = [[0.0, 0.0], [2.0, 0.0], [2.0, 2.0], [0.0, 2.0]];
        let b = [[1.0, 1.0], [3.0, 1.0], [3.0, 3.0], [1.0, 3.0]];
        assert!((polygon_area(&clip_polygon(&a, &b)) - 1.0).abs() < 1e-15);
        let far = [[5.0, 5.0], [6.0, 5.0], [6.0, 6.0]];
        assert!(polygon_area(&clip_polygon(&a, &far)).abs() < 1e-15);
    }

    #[test]
    fn chords() {
        let d = Convex2::Disk { c: [1.0, 1.0], r: 1.0 };
        assert_eq!(d.chord(1.0), Some((0.0, 2.0)));
        assert_eq!(d.chord(2.0), Some((1.0, 1.0)));
        assert!(d.chord(2.1).is_none());
        let t = Convex2::Polygon(vec![[0.0, 0.0], [2.0, 0.0], [0.0, 2.0]]);
        assert_eq!(t.chord(1.0), Some((0.0, 1.0)));
        assert_eq!(t.chord(0.0), Some((0.0, 2.0)));
    }

    #[test]
    fn crossings() {
        let a = Convex2::Disk { c: [0.0, 0.0], r: 1.0 };
        let b = Convex2::Disk { c: [1.0, 0.0], r: 1.0 };
        let xs = crossing_abscissae(&a, &b);
        assert!(xs.iter().all(|x| (x - 0.5).abs() < 1e-15) && xs.len() == 2);
        let e = Convex2::Ellipse { c: [0.0, 0.0], ax: 2.0, ay: 0.5 };
        let mut xs = crossing_abscissae(&a, &e);
        xs.sort_by(f64::total_cmp);
        // x² + y² = 1 and x²/4 + 4y² = 1 give x² = 4/5
        let x0 = (0.8f64).sqrt();
        assert_eq!(xs.len(), 4);
        assert!((xs[0] + x0).abs() < 1e-12 && (xs[3] - x0).abs() < 1e-12);
        let sq = Convex2::rect([-0.5, -2.0], [0.5, 2.0]);
        assert_eq!(crossing_abscissae(&sq, &a).len(), 4);
    }
}
