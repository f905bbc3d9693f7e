use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::sum::NeumaierSum;
use crate::error::{domain, Error, Result};

/// Tolerances and limits for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Maximum number of bisections applied to any initial panel.
    pub max_depth: u32,
    /// Number of Kronrod nodes in the base rule: 7 (G3-K7), 15 (G7-K15) or
    /// 21 (G10-K21).
    pub rule_order: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { rel_tol: 1e-12, abs_tol: 1e-14, max_depth: 60, rule_order: 15 }
    }
}

impl QuadratureSpec {
    pub fn new(rel_tol: f64, abs_tol: f64, max_depth: u32, rule_order: usize) -> Result<Self> {
        let spec = Self { rel_tol, abs_tol, max_depth, rule_order };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) {
            return Err(domain("quadrature tolerances must be strictly positive"));
        }
        if self.max_depth < 1 {
            return Err(domain("quadrature max depth must be at least 1"));
        }
        if ![7, 15, 21].contains(&self.rule_order) {
            return Err(domain(format!("unsupported Kronrod rule order {}", self.rule_order)));
        }
        Ok(())
    }

    /// Same limits with both tolerances multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self { rel_tol: self.rel_tol * factor, abs_tol: self.abs_tol * factor, ..*self }
    }
}

/// Which endpoints of the integration interval carry an integrable singularity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Endpoints {
    pub left: bool,
    pub right: bool,
}

impl Endpoints {
    pub const NONE: Endpoints = Endpoints { left: false, right: false };
    pub const LEFT: Endpoints = Endpoints { left: true, right: false };
    pub const RIGHT: Endpoints = Endpoints { left: false, right: true };
    pub const BOTH: Endpoints = Endpoints { left: true, right: true };
}

/// An integral value with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

impl Estimate {
    pub const ZERO: Estimate = Estimate { value: 0.0, error: 0.0, evaluations: 0 };
}

// QUADPACK qk15 abscissae and weights.
const XGK15: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK15: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG7: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

// Gauss-Kronrod 3-7 abscissae and weights.
const XGK7: [f64; 4] = [
    0.960_491_268_708_020_283_423_507_092_629_080,
    0.774_596_669_241_483_377_035_853_079_956_480,
    0.434_243_749_346_802_558_002_071_502_844_628,
    0.0,
];
const WGK7: [f64; 4] = [
    0.104_656_226_026_467_265_193_823_857_192_073,
    0.268_488_089_868_333_440_728_569_280_666_710,
    0.401_397_414_775_962_222_905_051_818_618_432,
    0.450_916_538_658_474_142_345_110_087_045_571,
];
const WG3: [f64; 2] = [0.555_555_555_555_555_555_555_555_555_555_556, 0.888_888_888_888_888_888_888_888_888_888_889];

// QUADPACK qk21 abscissae and weights.
const XGK21: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
const WGK21: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_539_250_110,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];
const WG10: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

struct Rule {
    xgk: &'static [f64],
    wgk: &'static [f64],
    wg: &'static [f64],
    // whether the centre node is also a Gauss node (odd Gauss order)
    center_is_gauss: bool,
}

const K7: Rule = Rule { xgk: &XGK7, wgk: &WGK7, wg: &WG3, center_is_gauss: true };
const K15: Rule = Rule { xgk: &XGK15, wgk: &WGK15, wg: &WG7, center_is_gauss: true };
const K21: Rule = Rule { xgk: &XGK21, wgk: &WGK21, wg: &WG10, center_is_gauss: false };

struct PanelResult {
    value: f64,
    error: f64,
}

fn rescale_error(err: f64, resabs: f64, resasc: f64) -> f64 {
    let mut e = err.abs();
    if resasc != 0.0 && e != 0.0 {
        let scale = (200.0 * e / resasc).powf(1.5);
        e = if scale < 1.0 { resasc * scale } else { resasc };
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        e = e.max(50.0 * f64::EPSILON * resabs);
    }
    e
}

fn apply_rule<F: Fn(f64) -> f64>(rule: &Rule, f: &F, lo: f64, hi: f64) -> Result<PanelResult> {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let n = rule.xgk.len();
    let fc = f(center);
    if !fc.is_finite() {
        return Err(domain(format!("integrand is not finite at {center}")));
    }
    let mut res_k = fc * rule.wgk[n - 1];
    let mut res_g = if rule.center_is_gauss { fc * rule.wg[rule.wg.len() - 1] } else { 0.0 };
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0f64; 10];
    let mut fv2 = [0.0f64; 10];
    for j in 0..n - 1 {
        let dx = half * rule.xgk[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        if !f1.is_finite() || !f2.is_finite() {
            return Err(domain(format!("integrand is not finite near {}", center - dx)));
        }
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += rule.wgk[j] * (f1 + f2);
        res_abs += rule.wgk[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += rule.wg[j / 2] * (f1 + f2);
        }
    }
    let mean = res_k * 0.5;
    let mut res_asc = rule.wgk[n - 1] * (fc - mean).abs();
    for j in 0..n - 1 {
        res_asc += rule.wgk[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let h = half.abs();
    Ok(PanelResult { value: res_k * half, error: rescale_error((res_k - res_g) * half, res_abs * h, res_asc * h) })
}

#[derive(Debug)]
struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
    depth: u32,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

const MAX_PANELS: usize = 50_000;

/// Globally adaptive Gauss-Kronrod integration of `f` over the panels delimited
/// by `breaks` (sorted, at least two entries).
fn adaptive<F: Fn(f64) -> f64>(f: &F, breaks: &[f64], spec: &QuadratureSpec) -> Result<Estimate> {
    spec.validate()?;
    let rule = match spec.rule_order {
        7 => &K7,
        21 => &K21,
        _ => &K15,
    };
    let evals_per_panel = rule.xgk.len() * 2 - 1;
    let mut heap = BinaryHeap::new();
    let mut value = 0.0;
    let mut error = 0.0;
    let mut evaluations = 0;
    for w in breaks.windows(2) {
        if w[1] == w[0] {
            continue;
        }
        let r = apply_rule(rule, f, w[0], w[1])?;
        evaluations += evals_per_panel;
        value += r.value;
        error += r.error;
        heap.push(Panel { lo: w[0], hi: w[1], value: r.value, error: r.error, depth: 0 });
    }
    let mut frozen: Vec<Panel> = Vec::new();
    loop {
        let tol = spec.abs_tol.max(spec.rel_tol * value.abs());
        if error <= tol {
            break;
        }
        let Some(worst) = heap.pop() else {
            break;
        };
        if worst.depth >= spec.max_depth || heap.len() + frozen.len() >= MAX_PANELS {
            frozen.push(worst);
            continue;
        }
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            frozen.push(worst);
            continue;
        }
        let left = apply_rule(rule, f, worst.lo, mid)?;
        let right = apply_rule(rule, f, mid, worst.hi)?;
        evaluations += 2 * evals_per_panel;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        let depth = worst.depth + 1;
        heap.push(Panel { lo: worst.lo, hi: mid, value: left.value, error: left.error, depth });
        heap.push(Panel { lo: mid, hi: worst.hi, value: right.value, error: right.error, depth });
    }
    // re-sum in a fixed order so the result does not depend on heap history
    let mut panels: Vec<Panel> = heap.into_vec();
    panels.extend(frozen);
    panels.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    let value: NeumaierSum = panels.iter().map(|p| p.value).collect();
    let error: NeumaierSum = panels.iter().map(|p| p.error).collect();
    let est = Estimate { value: value.value(), error: error.value(), evaluations };
    let tol = spec.abs_tol.max(spec.rel_tol * est.value.abs());
    if est.error <= tol {
        Ok(est)
    } else {
        Err(Error::Quadrature { estimate: est.value, error: est.error })
    }
}

/// Integrates `f` over `[a, b]`.
///
/// Endpoints flagged in `singular` are treated with a quadratic substitution
/// (`x = a + (b - a) s²` at the left end, the mirror image at the right end),
/// which turns an inverse-square-root singularity into a smooth integrand. The
/// flags are never inferred: an unflagged singular endpoint is simply an
/// integrand the rule has to resolve by bisection.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
    singular: Endpoints,
) -> Result<Estimate> {
    if !a.is_finite() || !b.is_finite() {
        return Err(domain("integration limits must be finite"));
    }
    if a == b {
        spec.validate()?;
        return Ok(Estimate::ZERO);
    }
    if a > b {
        let flipped = Endpoints { left: singular.right, right: singular.left };
        let r = integrate(f, b, a, spec, flipped)?;
        return Ok(Estimate { value: -r.value, ..r });
    }
    let w = b - a;
    match (singular.left, singular.right) {
        (false, false) => adaptive(&f, &[a, b], spec),
        (true, false) => adaptive(&|s: f64| f(a + w * s * s) * 2.0 * w * s, &[0.0, 1.0], spec),
        (false, true) => adaptive(&|s: f64| f(b - w * s * s) * 2.0 * w * s, &[0.0, 1.0], spec),
        (true, true) => {
            // x = a + w·p(u) with p(u) = 3u² - 2u³, so x - a and b - x both
            // vanish quadratically; p(u) + p(1 - u) = 1 lets each half be
            // measured from its own endpoint
            let p = |u: f64| u * u * (3.0 - 2.0 * u);
            let g = move |u: f64| {
                let x = if u <= 0.5 { a + w * p(u) } else { b - w * p(1.0 - u) };
                f(x) * 6.0 * w * u * (1.0 - u)
            };
            adaptive(&g, &[0.0, 1.0], spec)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn weights_sum_to_two() {
        let k15: f64 = 2.0 * WGK15[..7].iter().sum::<f64>() + WGK15[7];
        let g7: f64 = 2.0 * WG7[..3].iter().sum::<f64>() + WG7[3];
        let k21: f64 = 2.0 * WGK21[..10].iter().sum::<f64>() + WGK21[10];
        let g10: f64 = 2.0 * WG10.iter().sum::<f64>();
        for s in [k15, g7, k21, g10] {
            assert!((s - 2.0).abs() < 1e-15, "{s}");
        }
    }

    #[test]
    fn rules_are_exact_on_polynomials() {
        // K15 integrates degree 22, G7 degree 13; K21 degree 31, G10 degree 19
        for (rule, kdeg, gdeg) in [(&K15, 22, 13), (&K21, 31, 19)] {
            for deg in 0..=kdeg {
                let f = |x: f64| x.powi(deg);
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                let r = apply_rule(rule, &f, -1.0, 1.0).unwrap();
                assert!((r.value - exact).abs() < 1e-14, "deg {deg}");
                if deg <= gdeg {
                    // the Gauss part is exact too, so the error estimate collapses to roundoff
                    assert!(r.error < 1e-13, "deg {deg}: {}", r.error);
                }
            }
        }
    }

    #[test]
    fn simple_integrals() {
        let r = integrate(|t| t, 0.0, 1.0, &spec(), Endpoints::NONE).unwrap();
        assert!((r.value - 0.5).abs() < 1e-15);
        let r = integrate(|t: f64| t.sin(), 1.0, 0.0, &spec(), Endpoints::NONE).unwrap();
        assert!((r.value + (1.0 - 1f64.cos())).abs() < 1e-14);
        let r = integrate(|t| t, 2.0, 2.0, &spec(), Endpoints::NONE).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn inverse_sqrt_singularity() {
        // ∫₀¹ t/√(1-t²) dt = 1
        let r = integrate(|t: f64| t / (1.0 - t * t).sqrt(), 0.0, 1.0, &spec(), Endpoints::RIGHT).unwrap();
        assert!((r.value - 1.0).abs() < 1e-13, "{:?}", r);
        // ∫₀¹ 1/√(t(1-t)) dt = π
        let r = integrate(|t: f64| 1.0 / (t * (1.0 - t)).sqrt(), 0.0, 1.0, &spec(), Endpoints::BOTH).unwrap();
        assert!((r.value - std::f64::consts::PI).abs() < 1e-13, "{:?}", r);
        let r = integrate(|t: f64| 1.0 / t.sqrt(), 0.0, 4.0, &spec(), Endpoints::LEFT).unwrap();
        assert!((r.value - 4.0).abs() < 1e-13);
    }

    #[test]
    fn order_21_rule() {
        let exact = ((6.0f64).exp() - 1.0) / 3.0;
        for order in [7, 21] {
            let s = QuadratureSpec { rule_order: order, ..spec() };
            let r = integrate(|t: f64| (3.0 * t).exp(), 0.0, 2.0, &s, Endpoints::NONE).unwrap();
            assert!(((r.value - exact) / exact).abs() < 1e-13, "order {order}");
        }
        // G3-K7 integrates quintics exactly in its Gauss part
        let s = QuadratureSpec { rule_order: 7, ..spec() };
        let r = integrate(|t: f64| t.powi(5) - t, -1.0, 2.0, &s, Endpoints::NONE).unwrap();
        assert!((r.value - (64.0 - 1.0) / 6.0 + 1.5).abs() < 1e-13);
        assert!(QuadratureSpec::new(1e-10, 1e-14, 10, 9).is_err());
    }

    #[test]
    fn reports_failure_with_estimate() {
        let s = QuadratureSpec { max_depth: 2, ..spec() };
        let f = |t: f64| 1.0 / (t - 1.0 / 3.0).abs().sqrt();
        let err = integrate(f, -1.0, 1.0, &s, Endpoints::NONE).unwrap_err();
        match err {
            Error::Quadrature { estimate, error } => {
                assert!(estimate.is_finite() && error > 0.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn spec_validation() {
        assert!(QuadratureSpec::new(0.0, 1e-14, 60, 15).is_err());
        assert!(QuadratureSpec::new(1e-12, -1.0, 60, 15).is_err());
        assert!(QuadratureSpec::new(1e-12, 1e-14, 0, 15).is_err());
        assert!(QuadratureSpec::new(1e-12, 1e-14, 60, 11).is_err());
        assert!(QuadratureSpec::new(1e-12, 1e-14, 60, 21).is_ok());
    }
}
