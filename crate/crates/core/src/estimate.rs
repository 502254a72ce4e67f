//! Predictors, residual planes, memoryless entropy and bitrate arithmetic.
//!
//! Boundary rules shared by both predictors: the first pixel is predicted by
//! the middle of the sample range, the rest of the first row by its left
//! neighbor and the rest of the first column by its upper neighbor.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codec;
use crate::denoise::{denoise_plane_all_weights, FilterSpec};
use crate::descriptor::SlotChoice;
use crate::error::{Error, Result};
use crate::plane::{ColorImage, Plane, RGB_ROLES};

/// Prediction residuals (`actual − predicted`) of a plane. Bounds are
/// `[min − max, max − min]` of the source plane.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidualPlane(Plane);

impl ResidualPlane {
    pub fn plane(&self) -> &Plane {
        &self.0
    }

    pub fn into_plane(self) -> Plane {
        self.0
    }
}

/// Middle of the sample range, `(min + max + 1) / 2` truncated toward zero.
pub fn mid_range(p: &Plane) -> i32 {
    (p.min_value() + p.max_value() + 1) / 2
}

/// `⌊(a + b) / 2⌋`.
#[inline]
pub fn avg_prediction(left: i32, above: i32) -> i32 {
    (left + above).div_euclid(2)
}

/// Median edge detector: picks `min(a, b)` or `max(a, b)` when the upper-left
/// neighbor suggests an edge, otherwise the planar estimate `a + b − c`.
#[inline]
pub fn med_prediction(left: i32, above: i32, above_left: i32) -> i32 {
    let (lo, hi) = if left < above {
        (left, above)
    } else {
        (above, left)
    };
    if above_left >= hi {
        lo
    } else if above_left <= lo {
        hi
    } else {
        left + above - above_left
    }
}

fn residuals(p: &Plane, mut interior: impl FnMut(i32, i32, i32) -> i32) -> ResidualPlane {
    let (w, h) = (p.width(), p.height());
    let s = p.samples();
    let mut out = Vec::with_capacity(s.len());
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            let pred = match (x, y) {
                (0, 0) => mid_range(p),
                (_, 0) => s[i - 1] as i32,
                (0, _) => s[i - w] as i32,
                _ => interior(s[i - 1] as i32, s[i - w] as i32, s[i - w - 1] as i32),
            };
            out.push((s[i] as i32 - pred) as i16);
        }
    }
    let span = p.max_value() - p.min_value();
    ResidualPlane(Plane::from_parts_unchecked(w, h, -span, span, out))
}

/// Residuals of the AVG predictor, `⌊(left + above) / 2⌋`.
pub fn predict_avg(p: &Plane) -> ResidualPlane {
    residuals(p, |a, b, _| avg_prediction(a, b))
}

/// Residuals of the MED predictor.
pub fn predict_med(p: &Plane) -> ResidualPlane {
    residuals(p, med_prediction)
}

/// Empirical memoryless entropy `−Σ p_i log2 p_i` of the sample histogram,
/// in bits per pixel.
///
/// Evaluated as `log2 n − (1/n) Σ c log2 c` over the sorted nonzero counts,
/// so equal histograms give bit-identical results whatever values they sit on.
pub fn entropy_h0(p: &Plane) -> f64 {
    let lo = p.min_value();
    let mut hist = vec![0u64; (p.max_value() - lo + 1) as usize];
    for &s in p.samples() {
        hist[(s as i32 - lo) as usize] += 1;
    }
    let mut counts: Vec<u64> = hist.into_iter().filter(|&c| c > 0).collect();
    counts.sort_unstable();
    let n = p.len() as f64;
    let weighted: f64 = counts.iter().map(|&c| c as f64 * (c as f64).log2()).sum();
    (n.log2() - weighted / n).max(0.0)
}

/// Bitrate `8e/s` in bits per pixel for `e` bytes over `s` pixels.
pub fn bitrate(compressed_bytes: usize, pixel_count: usize) -> Result<f64> {
    if pixel_count == 0 {
        return Err(Error::InvalidArgument(
            "bitrate needs at least one pixel".into(),
        ));
    }
    Ok(8.0 * compressed_bytes as f64 / pixel_count as f64)
}

/// Which chrominance slot an option competes for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Slot {
    Dg,
    Db,
}

/// Estimator values for one option of one slot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptionEstimate {
    pub option: SlotChoice,
    /// H0 of the component itself.
    pub h0: f64,
    /// H0 of the AVG residual.
    pub h0_avg: f64,
    /// H0 of the MED residual.
    pub h0_med: f64,
    /// Internal-codec bitrate, when requested.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub codec_bpp: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlotReport {
    pub slot: Slot,
    pub options: Vec<OptionEstimate>,
}

impl SlotReport {
    pub fn get(&self, option: SlotChoice) -> Option<&OptionEstimate> {
        self.options.iter().find(|o| o.option == option)
    }
}

/// Per-slot table of estimator values over the untransformed, RDgDb and
/// eleven RDLS options.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub dg: SlotReport,
    pub db: SlotReport,
}

impl EstimateReport {
    pub fn slot(&self, slot: Slot) -> &SlotReport {
        match slot {
            Slot::Dg => &self.dg,
            Slot::Db => &self.db,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EstimateOptions {
    /// Also run the internal coder on every option.
    pub codec: bool,
}

/// The 13 options of a slot in canonical order: untransformed, RDgDb, then
/// RDLS with w = 1, 2, ..., 1024.
pub fn slot_options() -> Vec<SlotChoice> {
    let mut v = vec![SlotChoice::Untransformed, SlotChoice::Difference];
    v.extend(FilterSpec::all().map(SlotChoice::Denoised));
    v
}

/// `minuend − subtrahend` as a chrominance plane.
pub(crate) fn difference(minuend: &Plane, subtrahend: &Plane) -> Plane {
    let samples = minuend
        .samples()
        .iter()
        .zip(subtrahend.samples())
        .map(|(&a, &b)| a - b)
        .collect();
    Plane::from_parts_unchecked(minuend.width(), minuend.height(), -255, 255, samples)
}

/// Candidate planes of one slot, in [`slot_options`] order. `source` is the
/// plane the chrominance is computed from (R for Dg, G for Db); `target` is
/// the plane being replaced (G for Dg, B for Db).
pub fn slot_candidates(source: &Plane, target: &Plane) -> Vec<(SlotChoice, Plane)> {
    let mut out = vec![
        (SlotChoice::Untransformed, target.clone()),
        (SlotChoice::Difference, difference(source, target)),
    ];
    for (f, d) in FilterSpec::all().zip(denoise_plane_all_weights(source)) {
        out.push((SlotChoice::Denoised(f), difference(&d, target)));
    }
    out
}

pub fn estimate_plane(option: SlotChoice, p: &Plane, opts: EstimateOptions) -> OptionEstimate {
    OptionEstimate {
        option,
        h0: entropy_h0(p),
        h0_avg: entropy_h0(predict_avg(p).plane()),
        h0_med: entropy_h0(predict_med(p).plane()),
        codec_bpp: opts.codec.then(|| codec::measure_bitrate(p)),
    }
}

fn estimate_slot(slot: Slot, source: &Plane, target: &Plane, opts: EstimateOptions) -> SlotReport {
    let options = slot_candidates(source, target)
        .into_par_iter()
        .map(|(option, p)| estimate_plane(option, &p, opts))
        .collect();
    SlotReport { slot, options }
}

/// Evaluates all options for both chrominance slots of an RGB image.
pub fn estimate_options(img: &ColorImage) -> Result<EstimateReport> {
    estimate_options_with(img, EstimateOptions::default())
}

pub fn estimate_options_with(img: &ColorImage, opts: EstimateOptions) -> Result<EstimateReport> {
    img.expect_roles(RGB_ROLES)?;
    let [r, g, b] = img.planes();
    let (dg, db) = rayon::join(
        || estimate_slot(Slot::Dg, r, g, opts),
        || estimate_slot(Slot::Db, g, b, opts),
    );
    Ok(EstimateReport { dg, db })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transforms::{rdgdb_forward, rdls_rdgdb_forward};
    use proptest::prelude::*;
    use std::collections::BTreeMap;

    fn plane(w: usize, h: usize, v: &[i32]) -> Plane {
        Plane::from_i32(w, h, 0, 255, v).unwrap()
    }

    /// Sort-and-count entropy, independent of the histogram path.
    fn brute_entropy(samples: &[i16]) -> f64 {
        let mut counts = BTreeMap::new();
        for &s in samples {
            *counts.entry(s).or_insert(0usize) += 1;
        }
        let n = samples.len() as f64;
        -counts
            .values()
            .map(|&c| {
                let p = c as f64 / n;
                p * p.log2()
            })
            .sum::<f64>()
    }

    #[test]
    fn avg_examples() {
        assert_eq!(avg_prediction(10, 20), 15);
        assert_eq!(avg_prediction(10, 21), 15);
        assert_eq!(avg_prediction(-3, 0), -2);
        // 2x2 with left=10, above=21 at (1,1)
        let p = plane(2, 2, &[0, 21, 10, 15]);
        assert_eq!(predict_avg(&p).plane().get(1, 1), 0);
    }

    #[test]
    fn med_examples() {
        assert_eq!(med_prediction(7, 7, 7), 7);
        assert_eq!(med_prediction(10, 20, 5), 20);
        assert_eq!(med_prediction(10, 20, 15), 15);
        assert_eq!(med_prediction(10, 20, 25), 10);
    }

    #[test]
    fn boundary_rules() {
        let p = plane(3, 2, &[100, 110, 90, 120, 0, 0]);
        let r = predict_med(&p);
        let s = r.plane().samples();
        assert_eq!(s[0], 100 - 128);
        assert_eq!(s[1], 10);
        assert_eq!(s[2], -20);
        assert_eq!(s[3], 20);
        assert_eq!(r.plane().bounds(), (-255, 255));
        let c = Plane::from_i32(1, 1, -255, 255, &[3]).unwrap();
        assert_eq!(predict_avg(&c).plane().get(0, 0), 3);
        assert_eq!(predict_avg(&c).plane().bounds(), (-510, 510));
    }

    #[test]
    fn constant_residuals_vanish_off_origin() {
        let p = Plane::constant(6, 5, 0, 255, 42).unwrap();
        for r in [predict_avg(&p), predict_med(&p)] {
            let s = r.plane().samples();
            assert_eq!(s[0], 42 - 128);
            assert!(s[1..].iter().all(|&v| v == 0));
        }
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy_h0(&Plane::constant(4, 4, 0, 255, 9).unwrap()), 0.0);
        let uniform = Plane::from_fn(256, 2, 0, 255, |x, _| x as i32).unwrap();
        assert!((entropy_h0(&uniform) - 8.0).abs() < 1e-12);
        let half = plane(4, 1, &[0, 1, 0, 1]);
        assert!((entropy_h0(&half) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bitrate_examples() {
        assert_eq!(bitrate(1000, 1000).unwrap(), 8.0);
        assert_eq!(bitrate(0, 100).unwrap(), 0.0);
        assert_eq!(bitrate(375, 1000).unwrap(), 3.0);
        assert_eq!(bitrate(16, 1000).unwrap(), 0.128);
        assert!(bitrate(1, 0).is_err());
    }

    #[test]
    fn constant_image_estimates() {
        let img = ColorImage::from_rgb_fn(8, 8, |_, _| [50, 60, 70]).unwrap();
        let rep = estimate_options(&img).unwrap();
        for slot in [&rep.dg, &rep.db] {
            assert_eq!(slot.options.len(), 13);
            for o in &slot.options {
                assert_eq!(o.h0, 0.0);
                // only the origin pixel carries a nonzero residual
                let mut one_off = vec![0i16; 64];
                one_off[0] = 1;
                let expected = brute_entropy(&one_off);
                assert!((o.h0_med - expected).abs() < 1e-12);
                assert!((o.h0_avg - expected).abs() < 1e-12);
            }
        }
    }

    fn arb_rgb() -> impl Strategy<Value = ColorImage> {
        (1usize..10, 1usize..10).prop_flat_map(|(w, h)| {
            proptest::collection::vec(any::<[u8; 3]>(), w * h)
                .prop_map(move |px| ColorImage::from_rgb_fn(w, h, |x, y| px[y * w + x]).unwrap())
        })
    }

    proptest! {
        #[test]
        fn entropy_matches_brute_force(
            v in proptest::collection::vec(-255i32..=255, 1..400),
        ) {
            let p = Plane::from_i32(v.len(), 1, -255, 255, &v).unwrap();
            prop_assert!((entropy_h0(&p) - brute_entropy(p.samples())).abs() < 1e-12);
        }

        #[test]
        fn entropy_is_permutation_invariant(
            v in proptest::collection::vec(0i32..=255, 2..200), seed in any::<u64>(),
        ) {
            let mut shuffled = v.clone();
            let n = shuffled.len();
            let mut s = seed;
            for i in (1..n).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                shuffled.swap(i, (s >> 33) as usize % (i + 1));
            }
            let a = Plane::from_i32(n, 1, 0, 255, &v).unwrap();
            let b = Plane::from_i32(n, 1, 0, 255, &shuffled).unwrap();
            prop_assert_eq!(entropy_h0(&a), entropy_h0(&b));
        }

        #[test]
        fn report_entries_match_composed_definitions(img in arb_rgb(), k in 0u8..11) {
            let rep = estimate_options(&img).unwrap();
            let plain = rdgdb_forward(&img).unwrap();
            let f = FilterSpec::from_log2(k).unwrap();
            let rdls = rdls_rdgdb_forward(&img, f, f).unwrap();
            let dg = rep.dg.get(SlotChoice::Difference).unwrap();
            prop_assert_eq!(dg.h0_med, entropy_h0(predict_med(plain.plane(1)).plane()));
            let db = rep.db.get(SlotChoice::Difference).unwrap();
            prop_assert_eq!(db.h0_avg, entropy_h0(predict_avg(plain.plane(2)).plane()));
            let ddg = rep.dg.get(SlotChoice::Denoised(f)).unwrap();
            prop_assert_eq!(ddg.h0_med, entropy_h0(predict_med(rdls.plane(1)).plane()));
            let ddb = rep.db.get(SlotChoice::Denoised(f)).unwrap();
            prop_assert_eq!(ddb.h0, entropy_h0(rdls.plane(2)));
            let g = rep.dg.get(SlotChoice::Untransformed).unwrap();
            prop_assert_eq!(g.h0, entropy_h0(img.plane(1)));
        }
    }
}
