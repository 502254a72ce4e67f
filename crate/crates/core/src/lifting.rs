//! Reversible lifting steps, optionally with denoised mixer arguments, executed
//! step by step: each step runs over every pixel before the next one starts.
//!
//! A step updates one target plane as `target ← target ⊕ f(others)`, where `f`
//! reads only the other planes (possibly through a denoising filter). Because
//! the non-target planes are in the same state during the inverse step, the
//! inverse recomputes exactly the same `f` and undoes `⊕`.

use crate::denoise::{denoise_plane, FilterSpec};
use crate::error::{Error, Result};
use crate::plane::{ColorImage, Plane, Role};

/// The reversible operation `⊕` of a lifting step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Combine {
    /// `a ⊕ b = b − a`; its own inverse.
    NegatedDifference,
    /// `a ⊕ b = a + b`, undone by `c ⊗ b = c − b`.
    Add,
    /// `a ⊕ b = a`; a relabeling step with no arithmetic.
    Keep,
}

impl Combine {
    #[inline]
    fn forward(self, a: i32, b: i32) -> i32 {
        match self {
            Combine::NegatedDifference => b - a,
            Combine::Add => a + b,
            Combine::Keep => a,
        }
    }

    #[inline]
    fn inverse(self, c: i32, b: i32) -> i32 {
        match self {
            Combine::NegatedDifference => b - c,
            Combine::Add => c - b,
            Combine::Keep => c,
        }
    }
}

/// Linear mixer `f = ⌊Σ coeffs[i]·C_i / divisor⌋` over the non-target planes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mixer {
    coeffs: [i32; 3],
    divisor: i32,
}

impl Mixer {
    pub fn new(coeffs: [i32; 3], divisor: i32) -> Result<Self> {
        if divisor <= 0 {
            return Err(Error::InvalidArgument(format!(
                "mixer divisor must be positive, got {divisor}"
            )));
        }
        Ok(Mixer { coeffs, divisor })
    }

    /// `f = C_source`.
    pub fn copy(source: usize) -> Self {
        let mut coeffs = [0; 3];
        coeffs[source] = 1;
        Mixer { coeffs, divisor: 1 }
    }

    pub fn zero() -> Self {
        Mixer {
            coeffs: [0; 3],
            divisor: 1,
        }
    }

    pub fn coeffs(&self) -> [i32; 3] {
        self.coeffs
    }

    fn ops(&self) -> u64 {
        let terms = self.coeffs.iter().filter(|&&c| c != 0).count() as u64;
        let mults = self.coeffs.iter().filter(|&&c| c.abs() > 1).count() as u64;
        terms.saturating_sub(1) + mults + (self.divisor != 1) as u64
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftStep {
    target: usize,
    combine: Combine,
    mixer: Mixer,
    denoise: [Option<FilterSpec>; 3],
    input_role: Role,
    output_role: Role,
}

impl LiftStep {
    /// A lifting step on plane `target`. `denoise[i]` optionally filters plane
    /// `i` before the mixer reads it. The target's sample bounds before and
    /// after the step are those of `input_role` and `output_role`.
    pub fn new(
        target: usize,
        combine: Combine,
        mixer: Mixer,
        denoise: [Option<FilterSpec>; 3],
        input_role: Role,
        output_role: Role,
    ) -> Result<Self> {
        if target >= 3 {
            return Err(Error::InvalidArgument(format!(
                "target plane {target} out of range"
            )));
        }
        if mixer.coeffs[target] != 0 || denoise[target].is_some() {
            return Err(Error::InvalidArgument(
                "lifting step mixer must not read its target plane".into(),
            ));
        }
        if combine == Combine::Keep && input_role != output_role {
            return Err(Error::InvalidArgument(
                "a keep step cannot change roles".into(),
            ));
        }
        Ok(LiftStep {
            target,
            combine,
            mixer,
            denoise,
            input_role,
            output_role,
        })
    }

    /// `plane[target]` relabeled with no computation.
    pub fn keep(target: usize, role: Role) -> Result<Self> {
        LiftStep::new(target, Combine::Keep, Mixer::zero(), [None; 3], role, role)
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn combine(&self) -> Combine {
        self.combine
    }

    pub fn denoise_specs(&self) -> [Option<FilterSpec>; 3] {
        self.denoise
    }

    /// Integer operations per pixel, excluding denoising.
    pub fn ops_per_pixel(&self) -> u64 {
        match self.combine {
            Combine::Keep => 0,
            _ => 1 + self.mixer.ops(),
        }
    }

    /// Mixer input planes for this step, denoised where requested. The
    /// denoised copies live only for the duration of the step.
    fn sources<'a>(
        &self,
        planes: &'a [Plane; 3],
        scratch: &'a mut [Option<Plane>; 3],
    ) -> [Option<&'a [i16]>; 3] {
        for i in 0..3 {
            if self.mixer.coeffs[i] != 0 {
                if let Some(f) = self.denoise[i] {
                    scratch[i] = Some(denoise_plane(&planes[i], f));
                }
            }
        }
        let mut out: [Option<&[i16]>; 3] = [None; 3];
        for (i, slot) in out.iter_mut().enumerate() {
            if self.mixer.coeffs[i] != 0 {
                *slot = Some(match &scratch[i] {
                    Some(d) => d.samples(),
                    None => planes[i].samples(),
                });
            }
        }
        out
    }

    #[inline]
    fn mix(&self, sources: &[Option<&[i16]>; 3], i: usize) -> i32 {
        let mut acc = 0i32;
        for (src, &c) in sources.iter().zip(&self.mixer.coeffs) {
            if let Some(s) = src {
                acc += c * s[i] as i32;
            }
        }
        if self.mixer.divisor != 1 {
            acc = acc.div_euclid(self.mixer.divisor);
        }
        acc
    }

    fn run(&self, planes: &mut [Plane; 3], forward: bool) -> std::result::Result<(), (usize, i32)> {
        if self.combine == Combine::Keep {
            return Ok(());
        }
        let (min, max) = if forward {
            self.output_role.bounds()
        } else {
            self.input_role.bounds()
        };
        let mut scratch: [Option<Plane>; 3] = [None, None, None];
        let current = &planes[self.target];
        let (w, h) = (current.width(), current.height());
        let out = {
            let sources = self.sources(planes, &mut scratch);
            let target = planes[self.target].samples();
            let mut out = Vec::with_capacity(target.len());
            for (i, &a) in target.iter().enumerate() {
                let b = self.mix(&sources, i);
                let c = if forward {
                    self.combine.forward(a as i32, b)
                } else {
                    self.combine.inverse(a as i32, b)
                };
                if c < min || c > max {
                    return Err((i, c));
                }
                out.push(c as i16);
            }
            out
        };
        op_count::add(self.ops_per_pixel() * out.len() as u64);
        planes[self.target] = Plane::from_parts_unchecked(w, h, min, max, out);
        Ok(())
    }
}

/// An ordered list of lifting steps transforming images with `input_roles`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftSequence {
    name: String,
    input_roles: [Role; 3],
    steps: Vec<LiftStep>,
}

impl LiftSequence {
    /// Checks that every step's input role matches the role the target plane
    /// holds at that point of the sequence.
    pub fn new(
        name: impl Into<String>,
        input_roles: [Role; 3],
        steps: Vec<LiftStep>,
    ) -> Result<Self> {
        let mut roles = input_roles;
        for (i, step) in steps.iter().enumerate() {
            if roles[step.target] != step.input_role {
                return Err(Error::InvalidArgument(format!(
                    "step {i} expects {} in plane {}, sequence has {}",
                    step.input_role, step.target, roles[step.target]
                )));
            }
            roles[step.target] = step.output_role;
        }
        Ok(LiftSequence {
            name: name.into(),
            input_roles,
            steps,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn steps(&self) -> &[LiftStep] {
        &self.steps
    }

    pub fn input_roles(&self) -> [Role; 3] {
        self.input_roles
    }

    pub fn output_roles(&self) -> [Role; 3] {
        let mut roles = self.input_roles;
        for step in &self.steps {
            roles[step.target] = step.output_role;
        }
        roles
    }

    pub fn ops_per_pixel(&self) -> u64 {
        self.steps.iter().map(LiftStep::ops_per_pixel).sum()
    }
}

/// Runs `seq` forward over `img`.
pub fn apply_forward(img: &ColorImage, seq: &LiftSequence) -> Result<ColorImage> {
    img.expect_roles(seq.input_roles)?;
    let (mut planes, mut roles) = img.clone().into_parts();
    for (n, step) in seq.steps.iter().enumerate() {
        step.run(&mut planes, true).map_err(|(_, value)| {
            let (min, max) = step.output_role.bounds();
            Error::StepBounds {
                step: n,
                value,
                min,
                max,
            }
        })?;
        roles[step.target] = step.output_role;
    }
    ColorImage::new(planes, roles)
}

/// Undoes `seq`, running the inverse steps in reverse order.
pub fn apply_inverse(img: &ColorImage, seq: &LiftSequence) -> Result<ColorImage> {
    img.expect_roles(seq.output_roles())?;
    let (mut planes, mut roles) = img.clone().into_parts();
    for step in seq.steps.iter().rev() {
        step.run(&mut planes, false).map_err(|(index, value)| {
            let (min, max) = step.input_role.bounds();
            Error::InvalidTransformed {
                transform: seq.name.clone(),
                index,
                value,
                min,
                max,
            }
        })?;
        roles[step.target] = step.input_role;
    }
    ColorImage::new(planes, roles)
}

/// Count of integer operations executed by lifting steps on this thread.
/// Only tracked in debug builds.
pub mod op_count {
    #[cfg(debug_assertions)]
    thread_local! {
        static OPS: std::cell::Cell<u64> = const { std::cell::Cell::new(0) };
    }

    #[inline]
    pub(crate) fn add(_n: u64) {
        #[cfg(debug_assertions)]
        OPS.with(|c| c.set(c.get() + _n));
    }

    /// Returns the current count and resets it to zero.
    pub fn take() -> Option<u64> {
        #[cfg(debug_assertions)]
        {
            Some(OPS.with(|c| c.replace(0)))
        }
        #[cfg(not(debug_assertions))]
        {
            None
        }
    }
}
