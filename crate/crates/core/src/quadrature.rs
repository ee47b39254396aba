//! Quadrature rules: Gauss–Legendre node generation, fixed-order tensor rules, and a
//! globally adaptive Gauss–Kronrod (10/21) integrator for real or complex integrands.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Values that can be integrated: real or complex scalars.
pub trait QuadValue:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn zero() -> Self;
    fn magnitude(self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

const CACHED_RULES: usize = 1025;

static RULES: [OnceLock<(Vec<f64>, Vec<f64>)>; CACHED_RULES] =
    [const { OnceLock::new() }; CACHED_RULES];

/// Memoised [`gauss_legendre`] for `n < 1025`.
pub fn gauss_legendre_rule(n: usize) -> (&'static [f64], &'static [f64]) {
    assert!(
        n > 0 && n < CACHED_RULES,
        "gauss_legendre_rule: unsupported order {n}"
    );
    let (x, w) = RULES[n].get_or_init(|| gauss_legendre(n));
    (x, w)
}

/// Gauss–Legendre nodes and weights on [-1, 1], nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "gauss_legendre: need at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// A Gauss–Legendre rule mapped onto `[a, b]`.
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn new(n: usize, a: f64, b: f64) -> Self {
        let (x, w) = gauss_legendre(n);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        GaussRule {
            nodes: x.iter().map(|t| mid + half * t).collect(),
            weights: w.iter().map(|wi| wi * half).collect(),
        }
    }

    pub fn integrate<T: QuadValue>(&self, mut f: impl FnMut(f64) -> T) -> T {
        let terms: Vec<T> = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| f(x) * w)
            .collect();
        pairwise_sum(&terms)
    }
}

/// Pairwise (cascade) summation; the reduction order depends only on the length.
pub fn pairwise_sum<T: QuadValue>(values: &[T]) -> T {
    match values.len() {
        0 => T::zero(),
        1 => values[0],
        n if n <= 8 => values[1..].iter().fold(values[0], |acc, &v| acc + v),
        n => {
            let (lo, hi) = values.split_at(n / 2);
            pairwise_sum(lo) + pairwise_sum(hi)
        }
    }
}

/// Adaptive Gauss–Legendre on `[a, b]`: an `n`-point panel is accepted when it agrees with
/// the sum over its two halves to `rel_tol` (relative to the running scale), otherwise it
/// is bisected.
pub fn adaptive_gauss_legendre<T: QuadValue>(
    f: &impl Fn(f64) -> T,
    a: f64,
    b: f64,
    n: usize,
    rel_tol: f64,
    max_depth: usize,
) -> T {
    let (x, w) = gauss_legendre_rule(n);
    let panel = |lo: f64, hi: f64| -> T {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        x.iter().zip(w).fold(T::zero(), |acc, (&t, &wi)| {
            acc + f(mid + half * t) * (wi * half)
        })
    };
    fn recurse<T: QuadValue>(
        panel: &impl Fn(f64, f64) -> T,
        lo: f64,
        hi: f64,
        whole: T,
        rel_tol: f64,
        depth: usize,
    ) -> T {
        let mid = 0.5 * (lo + hi);
        let left = panel(lo, mid);
        let right = panel(mid, hi);
        let split = left + right;
        let diff = (split - whole).magnitude();
        if depth == 0 || diff <= rel_tol * split.magnitude() || diff == 0.0 {
            split
        } else {
            recurse(panel, lo, mid, left, rel_tol, depth - 1)
                + recurse(panel, mid, hi, right, rel_tol, depth - 1)
        }
    }
    let whole = panel(a, b);
    recurse(&panel, a, b, whole, rel_tol, max_depth)
}

const XGK: [f64; 11] = [
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
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_580_632_380_062,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

struct Panel<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
}

fn gk21<T: QuadValue>(f: &mut impl FnMut(f64) -> T, a: f64, b: f64) -> Panel<T> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut gauss = T::zero();
    let mut kronrod = fc * WGK[10];
    let mut res_abs = fc.magnitude() * WGK[10];
    let mut fv1 = [T::zero(); 10];
    let mut fv2 = [T::zero(); 10];
    for j in 0..10 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod = kronrod + (f1 + f2) * WGK[j];
        res_abs += WGK[j] * (f1.magnitude() + f2.magnitude());
        if j % 2 == 1 {
            gauss = gauss + (f1 + f2) * WG[j / 2];
        }
    }
    let mean = kronrod * 0.5;
    let mut res_asc = WGK[10] * (fc - mean).magnitude();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).magnitude() + (fv2[j] - mean).magnitude());
    }
    let abs_half = half.abs();
    res_abs *= abs_half;
    res_asc *= abs_half;
    let mut err = ((kronrod - gauss) * half).magnitude();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    Panel {
        a,
        b,
        value: kronrod * half,
        error: err,
    }
}

struct ByError(usize, f64);

impl PartialEq for ByError {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for ByError {}
impl PartialOrd for ByError {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for ByError {
    fn cmp(&self, other: &Self) -> Ordering {
        self.1
            .total_cmp(&other.1)
            .then_with(|| other.0.cmp(&self.0))
    }
}

/// Accuracy request for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Tolerance {
    pub fn relative(rel: f64) -> Self {
        Tolerance {
            abs: 0.0,
            rel,
            max_intervals: 4000,
        }
    }

    pub fn with_abs(mut self, abs: f64) -> Self {
        self.abs = abs;
        self
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
    pub intervals: usize,
    pub evaluations: usize,
}

/// Globally adaptive Gauss–Kronrod 10/21 quadrature over the union of `segments`.
///
/// The panel with the largest error estimate is bisected until the summed error meets
/// `max(tol.abs, tol.rel * |I|)`. Segment endpoints act as breakpoints, so integrable
/// kinks placed there never need to be resolved by subdivision.
pub fn integrate<T: QuadValue>(
    mut f: impl FnMut(f64) -> T,
    segments: &[(f64, f64)],
    tol: Tolerance,
    context: &str,
) -> Result<Estimate<T>> {
    let mut panels: Vec<Panel<T>> = Vec::with_capacity(segments.len() * 4);
    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    for &(a, b) in segments {
        if b == a {
            continue;
        }
        let p = gk21(&mut f, a, b);
        evaluations += 21;
        heap.push(ByError(panels.len(), p.error));
        panels.push(p);
    }
    let total = |panels: &[Panel<T>]| -> (T, f64) {
        let mut order: Vec<usize> = (0..panels.len()).collect();
        order.sort_by(|&i, &j| panels[i].a.total_cmp(&panels[j].a));
        let values: Vec<T> = order.iter().map(|&i| panels[i].value).collect();
        let err = order.iter().map(|&i| panels[i].error).sum();
        (pairwise_sum(&values), err)
    };
    let mut running_err: f64 = panels.iter().map(|p| p.error).sum();
    let mut running_val = panels.iter().fold(T::zero(), |acc, p| acc + p.value);
    let fail = |panels: &[Panel<T>], evaluations| {
        let (value, error) = total(panels);
        Error::NonConvergence {
            context: context.to_string(),
            estimate: value.magnitude(),
            error,
            intervals: panels.len(),
            evaluations,
        }
    };
    loop {
        if !(running_val.magnitude().is_finite() && running_err.is_finite()) {
            return Err(fail(&panels, evaluations));
        }
        let target = tol.abs.max(tol.rel * running_val.magnitude());
        if running_err <= target {
            break;
        }
        if panels.len() >= tol.max_intervals {
            let (value, error) = total(&panels);
            if error <= tol.abs.max(tol.rel * value.magnitude()) {
                break;
            }
            return Err(fail(&panels, evaluations));
        }
        let Some(ByError(idx, _)) = heap.pop() else {
            break;
        };
        let (a, b) = (panels[idx].a, panels[idx].b);
        let mid = 0.5 * (a + b);
        if !(mid > a.min(b) && mid < a.max(b)) || (b - a).abs() < 1e-13 * a.abs().max(b.abs()) {
            // Cannot refine further; the panel stays with its current estimate.
            continue;
        }
        let left = gk21(&mut f, a, mid);
        let right = gk21(&mut f, mid, b);
        evaluations += 42;
        running_err += left.error + right.error - panels[idx].error;
        running_val = running_val + left.value + right.value - panels[idx].value;
        panels[idx] = left;
        heap.push(ByError(idx, panels[idx].error));
        heap.push(ByError(panels.len(), right.error));
        panels.push(right);
        if heap.is_empty() {
            break;
        }
    }
    let (value, error) = total(&panels);
    Ok(Estimate {
        value,
        error,
        intervals: panels.len(),
        evaluations,
    })
}
