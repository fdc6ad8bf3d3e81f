//! Globally adaptive 15/31-point Gauss–Kronrod integration.
//!
//! Panels sit in a max-heap keyed on their error estimate; the worst panel is
//! bisected until the summed error meets the target or the panel budget runs
//! out. The integral may be split into several segments, each with its own
//! change of variables, that share one error budget.

#![allow(clippy::excessive_precision)] // nodes and weights kept at full published precision

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

const XK: [f64; 16] = [
    0.0,
    0.101_142_066_918_717_499_027_074_231_447_392,
    0.201_194_093_997_434_522_300_628_303_394_596,
    0.299_180_007_153_168_812_166_780_024_266_389,
    0.394_151_347_077_563_369_897_207_370_981_045,
    0.485_081_863_640_239_680_693_655_740_232_351,
    0.570_972_172_608_538_847_537_226_737_253_911,
    0.650_996_741_297_416_970_533_735_895_313_275,
    0.724_417_731_360_170_047_416_186_054_613_938,
    0.790_418_501_442_465_932_967_649_294_817_947,
    0.848_206_583_410_427_216_200_648_320_774_217,
    0.897_264_532_344_081_900_882_509_656_454_496,
    0.937_273_392_400_705_904_307_758_947_710_209,
    0.967_739_075_679_139_134_257_347_978_784_337,
    0.987_992_518_020_485_428_489_565_718_586_613,
    0.998_002_298_693_397_060_285_172_840_152_271,
];

const WK: [f64; 16] = [
    0.101_330_007_014_791_549_017_374_792_767_491,
    0.100_769_845_523_875_595_044_946_662_617_57,
    0.099_173_598_721_791_959_332_393_173_484_602,
    0.096_642_726_983_623_678_505_179_907_627_589,
    0.093_126_598_170_825_321_225_486_872_747_345,
    0.088_564_443_056_211_770_647_275_443_693_775,
    0.083_080_502_823_133_021_038_289_247_286_102,
    0.076_849_680_757_720_378_894_432_777_482_659,
    0.069_854_121_318_728_258_709_520_077_099_146,
    0.062_009_567_800_670_640_285_139_230_960_803,
    0.053_481_524_690_928_087_265_343_147_239_430,
    0.044_589_751_324_764_876_608_227_299_373_279,
    0.035_346_360_791_375_846_222_037_948_478_359,
    0.025_460_847_326_715_320_186_874_001_019_654,
    0.015_007_947_329_316_122_538_374_763_075_806,
    0.005_377_479_872_923_348_987_792_051_430_127,
];

// Gauss weights for the even-indexed Kronrod nodes (0, 2, ..., 14).
const WG: [f64; 8] = [
    0.202_578_241_925_561_272_880_620_199_967_519,
    0.198_431_485_327_111_576_456_118_326_443_839,
    0.186_161_000_015_562_211_026_800_561_866_423,
    0.166_269_205_816_993_933_553_200_860_481_209,
    0.139_570_677_926_154_314_447_804_794_511_028,
    0.107_159_220_467_171_935_011_869_546_685_869,
    0.070_366_047_488_108_124_709_267_416_450_667,
    0.030_753_241_996_117_268_354_628_393_577_204,
];

pub(crate) const EVALS_PER_PANEL: usize = 31;

/// Kronrod estimate, `|K − G|`, and the rounding floor `50ε ∫|f|` on `[a, b]`.
pub(crate) fn gk31<F: Fn(f64) -> Complex64 + ?Sized>(f: &F, a: f64, b: f64) -> (Complex64, f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WK[0];
    let mut g = fc * WG[0];
    let mut kabs = fc.norm() * WK[0];
    for i in 1..16 {
        let dx = h * XK[i];
        let (fl, fr) = (f(c - dx), f(c + dx));
        let s = fl + fr;
        k += s * WK[i];
        kabs += (fl.norm() + fr.norm()) * WK[i];
        if i % 2 == 0 {
            g += s * WG[i / 2];
        }
    }
    let h = h.abs();
    (k * h, ((k - g) * h).norm(), 50.0 * f64::EPSILON * kabs * h)
}

/// One independently mapped piece of the integration range.
pub(crate) struct Segment<'a> {
    pub f: Box<dyn Fn(f64) -> Complex64 + 'a>,
    /// Sorted initial panel boundaries (at least two).
    pub breaks: Vec<f64>,
    /// Relative conditioning of evaluating `f`; an oscillatory kernel with
    /// phase up to `φ` loses about `φ·ε` to rounding.
    pub cond: f64,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Outcome {
    pub value: Complex64,
    pub error: f64,
    pub target: f64,
    pub panels: usize,
    pub evaluations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    seg: usize,
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
    floor: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
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

pub(crate) fn adaptive(segments: &[Segment<'_>], rel: f64, abs: f64, max_panels: usize) -> Outcome {
    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    for (seg, s) in segments.iter().enumerate() {
        for w in s.breaks.windows(2) {
            let (value, error, floor) = gk31(&*s.f, w[0], w[1]);
            let floor = floor * s.cond;
            evaluations += EVALS_PER_PANEL;
            heap.push(Panel { seg, a: w[0], b: w[1], value, error, floor });
        }
    }

    let sums = |heap: &BinaryHeap<Panel>| {
        heap.iter().fold((Complex64::new(0.0, 0.0), 0.0, 0.0), |(v, e, r), p| (v + p.value, e + p.error, r + p.floor))
    };
    // Once the summed error is down at the rounding floor, further bisection
    // cannot improve it.
    let (mut total, mut err, mut floor) = sums(&heap);
    let mut converged = false;
    let mut iter = 0usize;
    loop {
        let target = abs.max(rel * total.norm()).max(floor);
        if err <= target {
            converged = true;
            break;
        }
        if heap.len() >= max_panels {
            break;
        }
        let worst = match heap.pop() {
            Some(p) => p,
            None => break,
        };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b || !worst.error.is_finite() {
            heap.push(worst);
            break;
        }
        let seg = &segments[worst.seg];
        let (lv, le, lf) = gk31(&*seg.f, worst.a, mid);
        let (rv, re, rf) = gk31(&*seg.f, mid, worst.b);
        let (lf, rf) = (lf * seg.cond, rf * seg.cond);
        evaluations += 2 * EVALS_PER_PANEL;
        total += lv + rv - worst.value;
        err += le + re - worst.error;
        floor += lf + rf - worst.floor;
        heap.push(Panel { seg: worst.seg, a: worst.a, b: mid, value: lv, error: le, floor: lf });
        heap.push(Panel { seg: worst.seg, a: mid, b: worst.b, value: rv, error: re, floor: rf });
        iter += 1;
        if iter.is_multiple_of(512) {
            (total, err, floor) = sums(&heap);
        }
    }
    let (value, error, floor) = sums(&heap);
    let target = abs.max(rel * value.norm()).max(floor);
    Outcome { value, error, target, panels: heap.len(), evaluations, converged: converged || error <= target }
}
