//! RDgDb, RCT and RDLS-RDgDb expressed as lifting sequences.
//!
//! The difference family keeps R and runs, in this order:
//!
//! 1. `C3 ← C2' − C3` (Db slot; `C2'` is G, denoised or not)
//! 2. `C2 ← C1' − C2` (Dg slot; `C1'` is R, denoised or not)
//! 3. `C1 ← C1`
//!
//! Step 1 always sees the untransformed G, whatever the Dg slot does. On
//! constant planes denoising is the identity, so RDLS-RDgDb and RDgDb agree
//! exactly with no sign change: `dDb = G − B = Db`, `dDg = R − G = Dg`.

use crate::denoise::FilterSpec;
use crate::descriptor::{SlotChoice, TransformDescriptor};
use crate::error::Result;
use crate::lifting::{apply_forward, apply_inverse, Combine, LiftSequence, LiftStep, Mixer};
use crate::plane::{ColorImage, Role, RGB_ROLES};

/// Lifting sequence for a member of the difference family.
pub fn difference_sequence(dg: SlotChoice, db: SlotChoice) -> Result<LiftSequence> {
    let desc = TransformDescriptor::Differences { dg, db };
    let mut steps = Vec::with_capacity(3);
    if db != SlotChoice::Untransformed {
        steps.push(LiftStep::new(
            2,
            Combine::NegatedDifference,
            Mixer::copy(1),
            [None, db.filter(), None],
            Role::B,
            db.db_role(),
        )?);
    }
    if dg != SlotChoice::Untransformed {
        steps.push(LiftStep::new(
            1,
            Combine::NegatedDifference,
            Mixer::copy(0),
            [dg.filter(), None, None],
            Role::G,
            dg.dg_role(),
        )?);
    }
    steps.push(LiftStep::keep(0, Role::R)?);
    LiftSequence::new(desc.to_string(), RGB_ROLES, steps)
}

/// RCT lifting sequence. It runs in place, so its output planes are ordered
/// `(Cv, Y, Cu)`; [`rct_forward`] reorders them.
pub fn rct_sequence() -> Result<LiftSequence> {
    let steps = vec![
        LiftStep::new(
            2,
            Combine::Add,
            Mixer::new([0, -1, 0], 1)?,
            [None; 3],
            Role::B,
            Role::Cu,
        )?,
        LiftStep::new(
            0,
            Combine::Add,
            Mixer::new([0, -1, 0], 1)?,
            [None; 3],
            Role::R,
            Role::Cv,
        )?,
        LiftStep::new(
            1,
            Combine::Add,
            Mixer::new([1, 0, 1], 4)?,
            [None; 3],
            Role::G,
            Role::Y,
        )?,
    ];
    LiftSequence::new("RCT", RGB_ROLES, steps)
}

/// `(R, G, B) → (R, Dg, Db)` with `Db = G − B`, `Dg = R − G`.
pub fn rdgdb_forward(img: &ColorImage) -> Result<ColorImage> {
    forward(img, &TransformDescriptor::rdgdb())
}

pub fn rdgdb_inverse(img: &ColorImage) -> Result<ColorImage> {
    inverse(img, &TransformDescriptor::rdgdb())
}

/// `(R, G, B) → (Y, Cu, Cv)` with `Cu = B − G`, `Cv = R − G`,
/// `Y = G + ⌊(Cu + Cv)/4⌋`.
pub fn rct_forward(img: &ColorImage) -> Result<ColorImage> {
    forward(img, &TransformDescriptor::Rct)
}

pub fn rct_inverse(img: &ColorImage) -> Result<ColorImage> {
    inverse(img, &TransformDescriptor::Rct)
}

/// `(R, G, B) → (R, dDg, dDb)` with `dDb = G^d − B` (filter `w_db`) computed
/// first, then `dDg = R^d − G` (filter `w_dg`).
pub fn rdls_rdgdb_forward(
    img: &ColorImage,
    w_db: FilterSpec,
    w_dg: FilterSpec,
) -> Result<ColorImage> {
    forward(img, &TransformDescriptor::rdls_rdgdb(w_db, w_dg))
}

/// Restores G from `R^d − dDg`, then B from `G^d − dDb`. The filters must be
/// the ones used in the forward transform.
pub fn rdls_rdgdb_inverse(
    img: &ColorImage,
    w_db: FilterSpec,
    w_dg: FilterSpec,
) -> Result<ColorImage> {
    inverse(img, &TransformDescriptor::rdls_rdgdb(w_db, w_dg))
}

/// Applies the transform described by `desc` to an RGB image.
pub fn forward(img: &ColorImage, desc: &TransformDescriptor) -> Result<ColorImage> {
    match *desc {
        TransformDescriptor::Rct => {
            let ([cv, y, cu], _) = apply_forward(img, &rct_sequence()?)?.into_parts();
            ColorImage::new([y, cu, cv], [Role::Y, Role::Cu, Role::Cv])
        }
        TransformDescriptor::Differences { dg, db } => {
            apply_forward(img, &difference_sequence(dg, db)?)
        }
    }
}

/// Inverts `desc`; out-of-range reconstructions are rejected, never clamped.
pub fn inverse(img: &ColorImage, desc: &TransformDescriptor) -> Result<ColorImage> {
    match *desc {
        TransformDescriptor::Rct => {
            img.expect_roles([Role::Y, Role::Cu, Role::Cv])?;
            let ([y, cu, cv], _) = img.clone().into_parts();
            let lifted = ColorImage::new([cv, y, cu], [Role::Cv, Role::Y, Role::Cu])?;
            apply_inverse(&lifted, &rct_sequence()?)
        }
        TransformDescriptor::Differences { dg, db } => {
            apply_inverse(img, &difference_sequence(dg, db)?)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::lifting::op_count;
    use crate::plane::Plane;
    use proptest::prelude::*;

    fn px(r: u8, g: u8, b: u8) -> ColorImage {
        ColorImage::from_rgb_fn(1, 1, |_, _| [r, g, b]).unwrap()
    }

    fn pixel(img: &ColorImage) -> [i32; 3] {
        [
            img.plane(0).get(0, 0),
            img.plane(1).get(0, 0),
            img.plane(2).get(0, 0),
        ]
    }

    fn image(roles: [Role; 3], v: [i32; 3]) -> ColorImage {
        let planes = [0, 1, 2].map(|i| {
            let (lo, hi) = roles[i].bounds();
            Plane::from_i32(1, 1, lo, hi, &[v[i]]).unwrap()
        });
        ColorImage::new(planes, roles).unwrap()
    }

    fn w(n: u32) -> FilterSpec {
        FilterSpec::new(n).unwrap()
    }

    #[test]
    fn rdgdb_examples() {
        let out = rdgdb_forward(&px(100, 80, 60)).unwrap();
        assert_eq!(out.roles(), [Role::R, Role::Dg, Role::Db]);
        assert_eq!(pixel(&out), [100, 20, 20]);
        assert_eq!(pixel(&rdgdb_forward(&px(9, 9, 9)).unwrap()), [9, 0, 0]);
        assert_eq!(
            pixel(&rdgdb_forward(&px(0, 255, 0)).unwrap()),
            [0, -255, 255]
        );
    }

    #[test]
    fn rdgdb_inverse_examples() {
        let rdgdb = [Role::R, Role::Dg, Role::Db];
        assert_eq!(
            pixel(&rdgdb_inverse(&image(rdgdb, [100, 20, 20])).unwrap()),
            [100, 80, 60]
        );
        assert_eq!(
            pixel(&rdgdb_inverse(&image(rdgdb, [9, 0, 0])).unwrap()),
            [9, 9, 9]
        );
        assert_eq!(
            pixel(&rdgdb_inverse(&image(rdgdb, [0, -255, 255])).unwrap()),
            [0, 255, 0]
        );
    }

    #[test]
    fn rdgdb_inverse_rejects_invalid() {
        // G = R − Dg = 0 − 1 < 0
        let err = rdgdb_inverse(&image([Role::R, Role::Dg, Role::Db], [0, 1, 0])).unwrap_err();
        assert!(err.to_string().contains("not a valid RDgDb image"), "{err}");
    }

    #[test]
    fn rct_examples() {
        let out = rct_forward(&px(4, 0, 0)).unwrap();
        assert_eq!(out.roles(), [Role::Y, Role::Cu, Role::Cv]);
        assert_eq!(pixel(&out), [1, 0, 4]);
        assert_eq!(pixel(&rct_forward(&px(77, 77, 77)).unwrap()), [77, 0, 0]);
        assert_eq!(
            pixel(&rct_forward(&px(255, 0, 255)).unwrap()),
            [127, 255, 255]
        );
        // floor toward −∞: Cu = −1, Cv = −1, Y = 1 + ⌊−2/4⌋ = 0
        assert_eq!(pixel(&rct_forward(&px(0, 1, 0)).unwrap()), [0, -1, -1]);
    }

    #[test]
    fn rct_inverse_examples() {
        let ycc = [Role::Y, Role::Cu, Role::Cv];
        assert_eq!(
            pixel(&rct_inverse(&image(ycc, [1, 0, 4])).unwrap()),
            [4, 0, 0]
        );
        assert_eq!(
            pixel(&rct_inverse(&image(ycc, [33, 0, 0])).unwrap()),
            [33, 33, 33]
        );
        let err = rct_inverse(&image(ycc, [0, 255, 255])).unwrap_err();
        assert!(err.to_string().contains("not a valid RCT image"), "{err}");
    }

    fn figure_image() -> ColorImage {
        let g = [
            70, 75, 80, 90, 85, 80, 90, 95, 60, 100, 80, 85, 70, 75, 80, 90,
        ];
        ColorImage::from_rgb_fn(4, 4, |x, y| {
            let i = y * 4 + x;
            [120, g[i], if (x, y) == (1, 1) { 75 } else { 70 }]
        })
        .unwrap()
    }

    #[test]
    fn rdls_figure_pixel() {
        let img = figure_image();
        let fwd = rdls_rdgdb_forward(&img, w(1), w(1)).unwrap();
        assert_eq!(fwd.roles(), [Role::R, Role::DDg, Role::DDb]);
        assert_eq!(fwd.plane(2).get(1, 1), 5);
        let inv = rdls_rdgdb_inverse(&fwd, w(1), w(1)).unwrap();
        assert_eq!(inv.plane(2).get(1, 1), 75);
        assert_eq!(inv, img);
    }

    #[test]
    fn rdls_equals_rdgdb_on_constants() {
        let img = ColorImage::from_rgb_fn(5, 3, |_, _| [200, 13, 90]).unwrap();
        let plain = rdgdb_forward(&img).unwrap();
        for a in FilterSpec::all() {
            for b in FilterSpec::all() {
                let rdls = rdls_rdgdb_forward(&img, a, b).unwrap();
                assert_eq!(rdls.planes(), plain.planes());
                assert_eq!(rdls_rdgdb_inverse(&rdls, a, b).unwrap(), img);
            }
        }
    }

    #[test]
    fn rdls_inverse_with_wrong_weights_is_detected_or_differs() {
        let img = figure_image();
        let fwd = rdls_rdgdb_forward(&img, w(1), w(1)).unwrap();
        match rdls_rdgdb_inverse(&fwd, w(1024), w(1024)) {
            Err(Error::InvalidTransformed { transform, .. }) => {
                assert!(transform.contains("RDLS-RDgDb"))
            }
            Err(other) => panic!("unexpected {other}"),
            Ok(back) => assert_ne!(back, img),
        }
    }

    #[test]
    fn rdgdb_costs_two_subtractions_per_pixel() {
        let seq = difference_sequence(SlotChoice::Difference, SlotChoice::Difference).unwrap();
        assert_eq!(seq.ops_per_pixel(), 2);
        let img = ColorImage::from_rgb_fn(7, 5, |x, y| [x as u8, y as u8, 3]).unwrap();
        op_count::take();
        rdgdb_forward(&img).unwrap();
        if let Some(ops) = op_count::take() {
            assert_eq!(ops, 2 * 35);
        }
    }

    #[test]
    fn rdls_step_order_uses_untransformed_g() {
        // dDb must come from the original G even though the Dg step rewrites it
        let img =
            ColorImage::from_rgb_fn(3, 3, |x, y| [(x * 50) as u8, (y * 40 + 10) as u8, 7]).unwrap();
        let f = w(4);
        let fwd = rdls_rdgdb_forward(&img, f, f).unwrap();
        let gd = crate::denoise::denoise_plane(img.plane(1), f);
        for i in 0..9 {
            assert_eq!(fwd.plane(2).samples()[i] as i32, gd.samples()[i] as i32 - 7);
        }
    }

    fn arb_rgb() -> impl Strategy<Value = ColorImage> {
        (1usize..12, 1usize..12).prop_flat_map(|(w, h)| {
            proptest::collection::vec(any::<[u8; 3]>(), w * h)
                .prop_map(move |px| ColorImage::from_rgb_fn(w, h, |x, y| px[y * w + x]).unwrap())
        })
    }

    proptest! {
        #[test]
        fn all_transforms_round_trip(img in arb_rgb(), a in 0u8..11, b in 0u8..11) {
            let fa = FilterSpec::from_log2(a).unwrap();
            let fb = FilterSpec::from_log2(b).unwrap();
            prop_assert_eq!(&rdgdb_inverse(&rdgdb_forward(&img).unwrap()).unwrap(), &img);
            prop_assert_eq!(&rct_inverse(&rct_forward(&img).unwrap()).unwrap(), &img);
            let fwd = rdls_rdgdb_forward(&img, fa, fb).unwrap();
            prop_assert_eq!(&rdls_rdgdb_inverse(&fwd, fa, fb).unwrap(), &img);
        }

        #[test]
        fn rdgdb_matches_pixel_formulas(img in arb_rgb()) {
            let out = rdgdb_forward(&img).unwrap();
            for i in 0..img.pixel_count() {
                let [r, g, b] = [0, 1, 2].map(|c| img.plane(c).samples()[i] as i32);
                prop_assert_eq!(out.plane(1).samples()[i] as i32, r - g);
                prop_assert_eq!(out.plane(2).samples()[i] as i32, g - b);
            }
        }

        #[test]
        fn rct_matches_pixel_formulas(img in arb_rgb()) {
            let out = rct_forward(&img).unwrap();
            for i in 0..img.pixel_count() {
                let [r, g, b] = [0, 1, 2].map(|c| img.plane(c).samples()[i] as i32);
                let (cu, cv) = (b - g, r - g);
                let y = g + ((cu + cv) as f64 / 4.0).floor() as i32;
                prop_assert_eq!(out.plane(0).samples()[i] as i32, y);
                prop_assert_eq!(out.plane(1).samples()[i] as i32, cu);
                prop_assert_eq!(out.plane(2).samples()[i] as i32, cv);
            }
        }

        #[test]
        fn weak_denoising_stays_close_to_rdgdb(img in arb_rgb()) {
            let f = FilterSpec::new(1024).unwrap();
            let rdls = rdls_rdgdb_forward(&img, f, f).unwrap();
            let plain = rdgdb_forward(&img).unwrap();
            for c in 1..3 {
                for (a, b) in rdls.plane(c).samples().iter().zip(plain.plane(c).samples()) {
                    prop_assert!((*a as i32 - *b as i32).abs() <= 2);
                }
            }
        }
    }
}
