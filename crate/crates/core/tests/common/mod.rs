//! Oracles shared by the integration tests.

#![allow(dead_code)]

use archimedean::scaling::ScalingFunction;

/// Fornberg's weights: `w[d][i]` approximates the `d`-th derivative at zero
/// from the values at `nodes[i]`.
pub fn fornberg(nodes: &[f64], max_order: usize) -> Vec<Vec<f64>> {
    let n = nodes.len();
    let mut c = vec![vec![0.0; n]; max_order + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    for i in 1..n {
        let mut c2 = 1.0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            for d in (0..=max_order.min(i)).rev() {
                let prev = if d > 0 { c[d - 1][i - 1] } else { 0.0 };
                c[d][i] = c1 * (d as f64 * prev - nodes[i - 1] * c[d][i - 1]) / c2;
            }
            for d in (0..=max_order.min(i)).rev() {
                let prev = if d > 0 { c[d - 1][j] } else { 0.0 };
                c[d][j] = (nodes[i] * c[d][j] - d as f64 * prev) / c3;
            }
        }
        c1 = c2;
    }
    c
}

/// Richardson extrapolation of `est(h)` over `h = big, big/2, …` (`levels`
/// values) for an error expansion in powers `h^p, h^{p+1}, …`.
pub fn richardson(est: impl Fn(f64) -> f64, big: f64, levels: usize, p: usize) -> f64 {
    let mut t: Vec<f64> = (0..levels).map(|l| est(big / 2f64.powi(l as i32))).collect();
    for lev in 0..levels - 1 {
        let f = 2f64.powi((p + lev) as i32);
        t = t.windows(2).map(|w| (f * w[1] - w[0]) / (f - 1.0)).collect();
    }
    t[0]
}

/// `g^{(j)}(0)/j!` from `points` equispaced samples on `[0, h]`.
pub fn one_sided_coefficient(g: &dyn Fn(f64) -> f64, j: usize, points: usize, h: f64) -> f64 {
    let nodes: Vec<f64> = (0..points).map(|i| i as f64 * h / (points - 1) as f64).collect();
    let w = fornberg(&nodes, j);
    let d: f64 = nodes.iter().zip(&w[j]).map(|(x, c)| c * g(*x)).sum();
    d / (1..=j).map(|i| i as f64).product::<f64>()
}

/// Richardson-extrapolated one-sided Taylor coefficient of order `j`.
pub fn richardson_coefficient(g: &dyn Fn(f64) -> f64, j: usize, points: usize, big: f64, levels: usize) -> f64 {
    richardson(|h| one_sided_coefficient(g, j, points, h), big, levels, points - j)
}

/// Central-difference derivative of `g` at `x`, Richardson-extrapolated over
/// four halvings of `h`.
pub fn central_derivative(g: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    let est = |h: f64| (g(x + h) - g(x - h)) / (2.0 * h);
    let mut t: Vec<f64> = (0..4).map(|l| est(h / 2f64.powi(l))).collect();
    for lev in 0..3 {
        let f = 4f64.powi(lev + 1);
        t = t.windows(2).map(|w| (f * w[1] - w[0]) / (f - 1.0)).collect();
    }
    t[0]
}

/// Finite-difference view of the expansion of `f_k` about `M_k`, computed
/// from the root-finding route only.
pub struct TaylorProbe {
    /// Relative errors of `c_1, c_2, c_3` (orders 2, 4, 6).
    pub even_relative: Vec<f64>,
    /// `|f_k^{(j)}(M_k)|·M_k^j/j!` estimates for `j = 1, 3, 5`.
    pub odd_scaled: Vec<f64>,
}

pub fn taylor_probe(s: &ScalingFunction) -> TaylorProbe {
    let m = s.m_k();
    let coeffs = s.taylor_at_mk(6).unwrap();
    // in v = (x - M_k)²/M_k² an even profile is a smooth function of v
    let in_v = |v: f64| s.f_by_root(m - m * v.sqrt()).unwrap();
    let even_relative = (1..=3)
        .map(|j| {
            let want = coeffs[j] * m.powi(2 * j as i32);
            let got = richardson_coefficient(&in_v, j, 6, 0.1, 3);
            ((got - want) / want).abs()
        })
        .collect();
    // subtracting an even polynomial leaves the odd derivatives unchanged and
    // removes the bulk of the truncation error of the wide stencil
    let even = s.taylor_at_mk(64).unwrap();
    let odd_part = |u: f64| {
        let v = (m * u).powi(2);
        s.f_by_root(m - m * u).unwrap() - even.iter().rev().fold(0.0, |a, c| a * v + c)
    };
    let odd_scaled = [1, 3, 5].iter().map(|&j| richardson_coefficient(&odd_part, j, 8, 0.7, 2).abs()).collect();
    TaylorProbe { even_relative, odd_scaled }
}
