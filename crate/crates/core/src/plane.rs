//! Image components and three-component color images.
//!
//! Samples are stored as `i16`, which covers every range the transforms and
//! predictors produce (untransformed 8-bit data, `[-255, 255]` chrominance and
//! the `[-510, 510]` residuals of chrominance). Arithmetic is done in `i32`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One image component: dimensions, inclusive sample bounds, row-major samples.
///
/// Planes are immutable once built; every constructor checks that all samples
/// are within bounds.
#[derive(Clone, PartialEq, Eq)]
pub struct Plane {
    width: usize,
    height: usize,
    min_value: i32,
    max_value: i32,
    samples: Vec<i16>,
}

impl Plane {
    pub fn new(
        width: usize,
        height: usize,
        min_value: i32,
        max_value: i32,
        samples: Vec<i16>,
    ) -> Result<Self> {
        check_shape(width, height, min_value, max_value, samples.len())?;
        if let Some((index, &value)) = samples
            .iter()
            .enumerate()
            .find(|(_, &s)| (s as i32) < min_value || (s as i32) > max_value)
        {
            return Err(Error::SampleOutOfBounds {
                index,
                value: value as i32,
                min: min_value,
                max: max_value,
            });
        }
        Ok(Plane {
            width,
            height,
            min_value,
            max_value,
            samples,
        })
    }

    /// Builds a plane from `i32` samples, rejecting anything outside the bounds.
    pub fn from_i32(
        width: usize,
        height: usize,
        min_value: i32,
        max_value: i32,
        samples: &[i32],
    ) -> Result<Self> {
        check_shape(width, height, min_value, max_value, samples.len())?;
        let mut out = Vec::with_capacity(samples.len());
        for (index, &value) in samples.iter().enumerate() {
            if value < min_value || value > max_value {
                return Err(Error::SampleOutOfBounds {
                    index,
                    value,
                    min: min_value,
                    max: max_value,
                });
            }
            out.push(value as i16);
        }
        Ok(Plane {
            width,
            height,
            min_value,
            max_value,
            samples: out,
        })
    }

    /// A plane with every sample equal to `value`.
    pub fn constant(
        width: usize,
        height: usize,
        min_value: i32,
        max_value: i32,
        value: i32,
    ) -> Result<Self> {
        check_shape(width, height, min_value, max_value, width * height)?;
        if value < min_value || value > max_value {
            return Err(Error::SampleOutOfBounds {
                index: 0,
                value,
                min: min_value,
                max: max_value,
            });
        }
        Ok(Plane {
            width,
            height,
            min_value,
            max_value,
            samples: vec![value as i16; width * height],
        })
    }

    /// Builds a plane by evaluating `f(x, y)` for every pixel.
    pub fn from_fn(
        width: usize,
        height: usize,
        min_value: i32,
        max_value: i32,
        mut f: impl FnMut(usize, usize) -> i32,
    ) -> Result<Self> {
        let mut samples = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                samples.push(f(x, y));
            }
        }
        Plane::from_i32(width, height, min_value, max_value, &samples)
    }

    /// Caller guarantees shape and bounds; checked in debug builds only.
    pub(crate) fn from_parts_unchecked(
        width: usize,
        height: usize,
        min_value: i32,
        max_value: i32,
        samples: Vec<i16>,
    ) -> Self {
        debug_assert_eq!(samples.len(), width * height);
        debug_assert!(samples
            .iter()
            .all(|&s| (s as i32) >= min_value && (s as i32) <= max_value));
        Plane {
            width,
            height,
            min_value,
            max_value,
            samples,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    /// Always false for a constructed plane; present for API symmetry.
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn min_value(&self) -> i32 {
        self.min_value
    }

    pub fn max_value(&self) -> i32 {
        self.max_value
    }

    pub fn bounds(&self) -> (i32, i32) {
        (self.min_value, self.max_value)
    }

    pub fn samples(&self) -> &[i16] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<i16> {
        self.samples
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> i32 {
        self.samples[y * self.width + x] as i32
    }

    pub fn row(&self, y: usize) -> &[i16] {
        &self.samples[y * self.width..(y + 1) * self.width]
    }

    pub fn same_size(&self, other: &Plane) -> bool {
        self.width == other.width && self.height == other.height
    }

    /// Same samples under different bounds; fails if a sample falls outside them.
    pub fn with_bounds(&self, min_value: i32, max_value: i32) -> Result<Plane> {
        Plane::new(
            self.width,
            self.height,
            min_value,
            max_value,
            self.samples.clone(),
        )
    }
}

fn check_shape(width: usize, height: usize, min: i32, max: i32, len: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidDimensions { width, height });
    }
    if min > max || min < i16::MIN as i32 || max > i16::MAX as i32 {
        return Err(Error::InvalidBounds { min, max });
    }
    let expected = width
        .checked_mul(height)
        .ok_or(Error::InvalidDimensions { width, height })?;
    if len != expected {
        return Err(Error::DimensionMismatch {
            width,
            height,
            expected,
            actual: len,
        });
    }
    Ok(())
}

impl fmt::Debug for Plane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Plane")
            .field("width", &self.width)
            .field("height", &self.height)
            .field("bounds", &(self.min_value, self.max_value))
            .finish_non_exhaustive()
    }
}

/// True iff dimensions, bounds and every sample agree.
pub fn plane_equal(a: &Plane, b: &Plane) -> bool {
    a == b
}

/// Role of a component within a (possibly transformed) color image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Role {
    R,
    G,
    B,
    Dg,
    Db,
    #[serde(rename = "dDg")]
    DDg,
    #[serde(rename = "dDb")]
    DDb,
    Y,
    Cu,
    Cv,
}

impl Role {
    pub const ALL: [Role; 10] = [
        Role::R,
        Role::G,
        Role::B,
        Role::Dg,
        Role::Db,
        Role::DDg,
        Role::DDb,
        Role::Y,
        Role::Cu,
        Role::Cv,
    ];

    /// Canonical sample bounds for a component in this role.
    pub fn bounds(self) -> (i32, i32) {
        match self {
            Role::R | Role::G | Role::B | Role::Y => (0, 255),
            Role::Dg | Role::Db | Role::DDg | Role::DDb | Role::Cu | Role::Cv => (-255, 255),
        }
    }

    pub fn tag(self) -> u8 {
        Role::ALL.iter().position(|&r| r == self).unwrap() as u8
    }

    pub fn from_tag(tag: u8) -> Option<Role> {
        Role::ALL.get(tag as usize).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Role::R => "R",
            Role::G => "G",
            Role::B => "B",
            Role::Dg => "Dg",
            Role::Db => "Db",
            Role::DDg => "dDg",
            Role::DDb => "dDb",
            Role::Y => "Y",
            Role::Cu => "Cu",
            Role::Cv => "Cv",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub const RGB_ROLES: [Role; 3] = [Role::R, Role::G, Role::B];

/// Three equally sized planes with role labels.
///
/// Role sets are restricted to states reachable by the supported transforms:
/// `R` first with `{G, Dg, dDg}` second and `{B, Db, dDb}` third, or the
/// three RCT components in any order.
/// Each plane carries the canonical bounds of its role.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorImage {
    planes: [Plane; 3],
    roles: [Role; 3],
}

impl ColorImage {
    pub fn new(planes: [Plane; 3], roles: [Role; 3]) -> Result<Self> {
        if !planes[0].same_size(&planes[1]) || !planes[0].same_size(&planes[2]) {
            return Err(Error::PlaneSizeMismatch);
        }
        if !roles_consistent(roles) {
            return Err(Error::InconsistentRoles(roles));
        }
        for (plane, role) in planes.iter().zip(roles) {
            let (min, max) = role.bounds();
            if plane.bounds() != (min, max) {
                return Err(Error::InvalidBounds {
                    min: plane.min_value(),
                    max: plane.max_value(),
                });
            }
        }
        Ok(ColorImage { planes, roles })
    }

    pub fn rgb(r: Plane, g: Plane, b: Plane) -> Result<Self> {
        ColorImage::new([r, g, b], RGB_ROLES)
    }

    /// Builds an RGB image from a per-pixel callback.
    pub fn from_rgb_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> [u8; 3],
    ) -> Result<Self> {
        let n = width * height;
        let mut c = [
            Vec::with_capacity(n),
            Vec::with_capacity(n),
            Vec::with_capacity(n),
        ];
        for y in 0..height {
            for x in 0..width {
                let px = f(x, y);
                for i in 0..3 {
                    c[i].push(px[i] as i16);
                }
            }
        }
        let [r, g, b] = c;
        ColorImage::rgb(
            Plane::new(width, height, 0, 255, r)?,
            Plane::new(width, height, 0, 255, g)?,
            Plane::new(width, height, 0, 255, b)?,
        )
    }

    pub fn width(&self) -> usize {
        self.planes[0].width()
    }

    pub fn height(&self) -> usize {
        self.planes[0].height()
    }

    pub fn pixel_count(&self) -> usize {
        self.planes[0].len()
    }

    pub fn planes(&self) -> &[Plane; 3] {
        &self.planes
    }

    pub fn plane(&self, index: usize) -> &Plane {
        &self.planes[index]
    }

    pub fn roles(&self) -> [Role; 3] {
        self.roles
    }

    pub fn is_rgb(&self) -> bool {
        self.roles == RGB_ROLES
    }

    pub fn into_parts(self) -> ([Plane; 3], [Role; 3]) {
        (self.planes, self.roles)
    }

    pub(crate) fn expect_roles(&self, expected: [Role; 3]) -> Result<()> {
        if self.roles != expected {
            return Err(Error::RoleMismatch {
                expected,
                found: self.roles,
            });
        }
        Ok(())
    }
}

fn roles_consistent(roles: [Role; 3]) -> bool {
    use Role::*;
    // RCT planes appear in lifting order (Cv, Y, Cu) while the engine runs
    let mut sorted = roles;
    sorted.sort_by_key(|r| r.tag());
    if sorted == [Y, Cu, Cv] {
        return true;
    }
    roles[0] == R && matches!(roles[1], G | Dg | DDg) && matches!(roles[2], B | Db | DDb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn minimal_plane() {
        let p = Plane::from_i32(1, 1, 0, 255, &[7]).unwrap();
        assert_eq!(p.get(0, 0), 7);
        assert_eq!(p.len(), 1);
    }

    #[test]
    fn bounds_endpoints_accepted() {
        let p = Plane::from_i32(2, 2, 0, 255, &[0, 255, 128, 64]).unwrap();
        assert_eq!(p.samples(), &[0, 255, 128, 64]);
    }

    #[test]
    fn out_of_bounds_reports_index_and_value() {
        let err = Plane::from_i32(2, 2, 0, 255, &[-1, 0, 0, 0]).unwrap_err();
        match err {
            Error::SampleOutOfBounds { index, value, .. } => {
                assert_eq!((index, value), (0, -1));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(err_msg(Plane::from_i32(2, 2, 0, 255, &[0, 0, 0, 256])).contains("index 3"));
    }

    #[test]
    fn dimension_mismatch_rejected() {
        assert!(matches!(
            Plane::from_i32(2, 2, 0, 255, &[1, 2, 3]),
            Err(Error::DimensionMismatch {
                expected: 4,
                actual: 3,
                ..
            })
        ));
        assert!(matches!(
            Plane::from_i32(0, 2, 0, 255, &[]),
            Err(Error::InvalidDimensions { .. })
        ));
    }

    #[test]
    fn equality() {
        let p = Plane::from_i32(2, 2, 0, 255, &[0, 255, 128, 64]).unwrap();
        assert!(plane_equal(&p, &p));
        let q = Plane::from_i32(2, 2, 0, 255, &[0, 255, 128, 65]).unwrap();
        assert!(!plane_equal(&p, &q));
        let a = Plane::from_i32(1, 1, 0, 255, &[3]).unwrap();
        let b = Plane::from_i32(2, 1, 0, 255, &[3, 3]).unwrap();
        assert!(!plane_equal(&a, &b));
        let c = Plane::from_i32(1, 1, -255, 255, &[3]).unwrap();
        assert!(!plane_equal(&a, &c));
    }

    #[test]
    fn color_image_rejects_unknown_role_sets() {
        let p = || Plane::constant(2, 2, 0, 255, 1).unwrap();
        assert!(ColorImage::new([p(), p(), p()], [Role::G, Role::R, Role::B]).is_err());
        assert!(ColorImage::rgb(p(), p(), Plane::constant(3, 2, 0, 255, 1).unwrap()).is_err());
        // chrominance role with 8-bit bounds
        assert!(ColorImage::new([p(), p(), p()], [Role::R, Role::Dg, Role::B]).is_err());
        let c = Plane::constant(2, 2, -255, 255, 0).unwrap();
        assert!(ColorImage::new([p(), c, p()], [Role::R, Role::DDg, Role::B]).is_ok());
    }

    #[test]
    fn role_tags_round_trip() {
        for r in Role::ALL {
            assert_eq!(Role::from_tag(r.tag()), Some(r));
        }
        assert_eq!(Role::from_tag(10), None);
    }

    fn err_msg<T: fmt::Debug>(r: Result<T>) -> String {
        r.unwrap_err().to_string()
    }

    proptest! {
        #[test]
        fn construction_accepts_exactly_in_bounds(
            w in 1usize..6, h in 1usize..6,
            lo in -300i32..100, span in 0i32..400,
            raw in proptest::collection::vec(-400i32..400, 36),
        ) {
            let hi = lo + span;
            let samples = &raw[..w * h];
            let ok = samples.iter().all(|&s| s >= lo && s <= hi);
            let res = Plane::from_i32(w, h, lo, hi, samples);
            prop_assert_eq!(res.is_ok(), ok);
            if let Err(Error::SampleOutOfBounds { index, value, .. }) = res {
                prop_assert_eq!(value, samples[index]);
                prop_assert!(samples[..index].iter().all(|&s| s >= lo && s <= hi));
            }
        }

        #[test]
        fn plane_equal_is_equivalence(
            a in proptest::collection::vec(0i32..3, 4),
            b in proptest::collection::vec(0i32..3, 4),
            c in proptest::collection::vec(0i32..3, 4),
        ) {
            let pa = Plane::from_i32(2, 2, 0, 2, &a).unwrap();
            let pb = Plane::from_i32(2, 2, 0, 2, &b).unwrap();
            let pc = Plane::from_i32(2, 2, 0, 2, &c).unwrap();
            prop_assert!(plane_equal(&pa, &pa));
            prop_assert_eq!(plane_equal(&pa, &pb), plane_equal(&pb, &pa));
            if plane_equal(&pa, &pb) && plane_equal(&pb, &pc) {
                prop_assert!(plane_equal(&pa, &pc));
            }
        }
    }
}
