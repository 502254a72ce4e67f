//! File I/O and dataset preparation: binary PPM/PGM, the planar format for
//! transformed images, Bayer RGGB conversion, 3× reduction and seeded
//! Gaussian noise.

use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::denoise::{round_div, FilterSpec};
use crate::descriptor::{SlotChoice, TransformDescriptor, TransformKind};
use crate::error::{Error, Result};
use crate::plane::{ColorImage, Plane, Role, RGB_ROLES};

// ---------------------------------------------------------------------------
// PNM

struct PnmHeader {
    magic: [u8; 2],
    width: usize,
    height: usize,
    data_offset: usize,
}

fn parse_pnm_header(bytes: &[u8], format: &'static str) -> Result<PnmHeader> {
    if bytes.len() < 2 {
        return Err(Error::format(format, "file too short"));
    }
    let magic = [bytes[0], bytes[1]];
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for field in fields.iter_mut() {
        // whitespace and comments
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while !matches!(bytes.get(pos), Some(b'\n') | Some(b'\r') | None) {
                        pos += 1;
                    }
                }
                Some(_) => break,
                None => return Err(Error::format(format, "truncated header")),
            }
        }
        let start = pos;
        while matches!(bytes.get(pos), Some(b) if b.is_ascii_digit()) {
            pos += 1;
        }
        if start == pos {
            return Err(Error::format(
                format,
                format!("expected a number at byte {start}"),
            ));
        }
        let text = std::str::from_utf8(&bytes[start..pos]).unwrap();
        *field = text
            .parse()
            .map_err(|_| Error::format(format, format!("number {text} too large")))?;
    }
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => return Err(Error::format(format, "missing whitespace after maxval")),
    }
    let [width, height, maxval] = fields;
    if maxval != 255 {
        return Err(Error::format(
            format,
            format!("maxval {maxval} unsupported, only 8-bit (255) files are accepted"),
        ));
    }
    if width == 0 || height == 0 {
        return Err(Error::format(
            format,
            format!("invalid dimensions {width}x{height}"),
        ));
    }
    Ok(PnmHeader {
        magic,
        width,
        height,
        data_offset: pos,
    })
}

fn pnm_data<'a>(
    bytes: &'a [u8],
    h: &PnmHeader,
    channels: usize,
    format: &'static str,
) -> Result<&'a [u8]> {
    let need = h
        .width
        .checked_mul(h.height)
        .and_then(|n| n.checked_mul(channels))
        .ok_or_else(|| Error::format(format, "dimensions overflow"))?;
    let data = &bytes[h.data_offset..];
    if data.len() < need {
        return Err(Error::format(
            format,
            format!(
                "truncated data: expected {need} bytes, found {}",
                data.len()
            ),
        ));
    }
    Ok(&data[..need])
}

/// Parses a binary P6 PPM with maxval 255.
pub fn decode_ppm(bytes: &[u8]) -> Result<ColorImage> {
    let h = parse_pnm_header(bytes, "PPM")?;
    if &h.magic != b"P6" {
        return Err(Error::format("PPM", "not a binary P6 file"));
    }
    let data = pnm_data(bytes, &h, 3, "PPM")?;
    ColorImage::from_rgb_fn(h.width, h.height, |x, y| {
        let i = 3 * (y * h.width + x);
        [data[i], data[i + 1], data[i + 2]]
    })
}

pub fn encode_ppm(img: &ColorImage) -> Result<Vec<u8>> {
    img.expect_roles(RGB_ROLES)?;
    let mut out = format!("P6\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    let [r, g, b] = img.planes();
    out.reserve(3 * img.pixel_count());
    for i in 0..img.pixel_count() {
        out.extend([
            r.samples()[i] as u8,
            g.samples()[i] as u8,
            b.samples()[i] as u8,
        ]);
    }
    Ok(out)
}

pub fn read_ppm(path: impl AsRef<Path>) -> Result<ColorImage> {
    decode_ppm(&fs::read(path)?)
}

pub fn write_ppm(img: &ColorImage, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, encode_ppm(img)?)?;
    Ok(())
}

/// Parses a binary P5 PGM with maxval 255 into a `[0, 255]` plane.
pub fn decode_pgm(bytes: &[u8]) -> Result<Plane> {
    let h = parse_pnm_header(bytes, "PGM")?;
    if &h.magic != b"P5" {
        return Err(Error::format("PGM", "not a binary P5 file"));
    }
    let data = pnm_data(bytes, &h, 1, "PGM")?;
    Plane::new(
        h.width,
        h.height,
        0,
        255,
        data.iter().map(|&b| b as i16).collect(),
    )
}

pub fn encode_pgm(p: &Plane) -> Result<Vec<u8>> {
    if p.bounds() != (0, 255) {
        return Err(Error::format("PGM", "only [0, 255] planes can be written"));
    }
    let mut out = format!("P5\n{} {}\n255\n", p.width(), p.height()).into_bytes();
    out.extend(p.samples().iter().map(|&s| s as u8));
    Ok(out)
}

pub fn read_pgm(path: impl AsRef<Path>) -> Result<Plane> {
    decode_pgm(&fs::read(path)?)
}

pub fn write_pgm(p: &Plane, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, encode_pgm(p)?)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Planar transformed-image format

pub const PLANAR_MAGIC: &[u8; 5] = b"RDLS1";
pub const PLANAR_VERSION: u8 = 1;
const PLANAR_FIXED: usize = 5 + 1 + 1 + 2 + 4;
const PLANE_HEADER: usize = 1 + 4 + 4 + 2 + 2;

fn kind_code(kind: TransformKind) -> u8 {
    match kind {
        TransformKind::Identity => 0,
        TransformKind::RdgDb => 1,
        TransformKind::Rct => 2,
        TransformKind::RdlsRdgDb => 3,
        TransformKind::Mixed => 4,
    }
}

fn choice_code(c: SlotChoice) -> (u8, u16) {
    match c {
        SlotChoice::Untransformed => (0, 0),
        SlotChoice::Difference => (1, 0),
        SlotChoice::Denoised(f) => (2, f.center_weight() as u16),
    }
}

fn choice_from_code(code: u8, weight: u16, offset: usize) -> Result<SlotChoice> {
    let bad = |reason: String| Error::Corrupt { offset, reason };
    match (code, weight) {
        (0, 0) => Ok(SlotChoice::Untransformed),
        (1, 0) => Ok(SlotChoice::Difference),
        (2, w) => Ok(SlotChoice::Denoised(
            FilterSpec::new(w as u32).map_err(|e| bad(e.to_string()))?,
        )),
        _ => Err(bad(format!(
            "invalid slot code {code} with weight {weight}"
        ))),
    }
}

/// Serializes the descriptor part shared by the planar and compressed formats:
/// kind, Dg slot code, Db slot code, w_dg (u16), w_db (u16).
pub(crate) fn encode_descriptor(desc: &TransformDescriptor, out: &mut Vec<u8>) {
    let ((dg_code, w_dg), (db_code, w_db)) = match *desc {
        TransformDescriptor::Rct => ((0, 0), (0, 0)),
        TransformDescriptor::Differences { dg, db } => (choice_code(dg), choice_code(db)),
    };
    out.push(kind_code(desc.kind()));
    out.push(dg_code);
    out.push(db_code);
    out.extend_from_slice(&w_dg.to_le_bytes());
    out.extend_from_slice(&w_db.to_le_bytes());
}

pub(crate) const DESCRIPTOR_LEN: usize = 7;

pub(crate) fn decode_descriptor(bytes: &[u8], offset: usize) -> Result<TransformDescriptor> {
    let b = &bytes[offset..offset + DESCRIPTOR_LEN];
    let w_dg = u16::from_le_bytes([b[3], b[4]]);
    let w_db = u16::from_le_bytes([b[5], b[6]]);
    let desc = if b[0] == kind_code(TransformKind::Rct) {
        if b[1..].iter().any(|&v| v != 0) {
            return Err(Error::Corrupt {
                offset,
                reason: "RCT descriptor carries slot data".into(),
            });
        }
        TransformDescriptor::Rct
    } else {
        TransformDescriptor::Differences {
            dg: choice_from_code(b[1], w_dg, offset + 1)?,
            db: choice_from_code(b[2], w_db, offset + 2)?,
        }
    };
    if kind_code(desc.kind()) != b[0] {
        return Err(Error::Corrupt {
            offset,
            reason: format!("transform kind {} does not match slot codes", b[0]),
        });
    }
    Ok(desc)
}

/// Serializes a transformed image with its descriptor. Layout:
///
/// ```text
/// "RDLS1" | version u8 | kind u8 | dg code u8 | db code u8 | w_dg u16 | w_db u16
/// 3 × (role u8 | width u32 | height u32 | min i16 | max i16)
/// 3 × width·height samples, i16, row-major, plane after plane
/// ```
pub fn encode_planar(img: &ColorImage, desc: &TransformDescriptor) -> Result<Vec<u8>> {
    if img.roles() != desc.output_roles() {
        return Err(Error::RoleMismatch {
            expected: desc.output_roles(),
            found: img.roles(),
        });
    }
    let mut out = Vec::with_capacity(PLANAR_FIXED + 3 * PLANE_HEADER + 6 * img.pixel_count());
    out.extend_from_slice(PLANAR_MAGIC);
    out.push(PLANAR_VERSION);
    encode_descriptor(desc, &mut out);
    for (p, role) in img.planes().iter().zip(img.roles()) {
        out.push(role.tag());
        out.extend_from_slice(&(p.width() as u32).to_le_bytes());
        out.extend_from_slice(&(p.height() as u32).to_le_bytes());
        out.extend_from_slice(&(p.min_value() as i16).to_le_bytes());
        out.extend_from_slice(&(p.max_value() as i16).to_le_bytes());
    }
    for p in img.planes() {
        for s in p.samples() {
            out.extend_from_slice(&s.to_le_bytes());
        }
    }
    Ok(out)
}

pub fn decode_planar(bytes: &[u8]) -> Result<(ColorImage, TransformDescriptor)> {
    let header_len = PLANAR_FIXED + 3 * PLANE_HEADER;
    if bytes.len() < header_len {
        return Err(Error::Truncated {
            offset: bytes.len(),
        });
    }
    if &bytes[..5] != PLANAR_MAGIC {
        return Err(Error::Corrupt {
            offset: 0,
            reason: "bad magic".into(),
        });
    }
    if bytes[5] != PLANAR_VERSION {
        return Err(Error::Corrupt {
            offset: 5,
            reason: format!("unsupported version {}", bytes[5]),
        });
    }
    let desc = decode_descriptor(bytes, 6)?;

    let mut heads = Vec::with_capacity(3);
    for i in 0..3 {
        let o = PLANAR_FIXED + i * PLANE_HEADER;
        let role = Role::from_tag(bytes[o]).ok_or(Error::Corrupt {
            offset: o,
            reason: format!("unknown role tag {}", bytes[o]),
        })?;
        let w = u32::from_le_bytes(bytes[o + 1..o + 5].try_into().unwrap()) as usize;
        let h = u32::from_le_bytes(bytes[o + 5..o + 9].try_into().unwrap()) as usize;
        let min = i16::from_le_bytes([bytes[o + 9], bytes[o + 10]]) as i32;
        let max = i16::from_le_bytes([bytes[o + 11], bytes[o + 12]]) as i32;
        heads.push((role, w, h, min, max, o));
    }
    let roles = [heads[0].0, heads[1].0, heads[2].0];
    if roles != desc.output_roles() {
        return Err(Error::Corrupt {
            offset: PLANAR_FIXED,
            reason: format!("roles {roles:?} do not match descriptor {desc}"),
        });
    }

    let mut pos = header_len;
    let mut planes = Vec::with_capacity(3);
    for &(role, w, h, min, max, o) in &heads {
        if (min, max) != role.bounds() {
            return Err(Error::Corrupt {
                offset: o + 9,
                reason: format!("bounds [{min}, {max}] invalid for {role}"),
            });
        }
        let n = w.checked_mul(h).filter(|&n| n > 0).ok_or(Error::Corrupt {
            offset: o + 1,
            reason: format!("invalid dimensions {w}x{h}"),
        })?;
        let end = n
            .checked_mul(2)
            .and_then(|b| b.checked_add(pos))
            .ok_or(Error::Truncated {
                offset: bytes.len(),
            })?;
        if end > bytes.len() {
            return Err(Error::Truncated {
                offset: bytes.len(),
            });
        }
        let samples = bytes[pos..end]
            .chunks_exact(2)
            .map(|c| i16::from_le_bytes([c[0], c[1]]))
            .collect();
        let plane = Plane::new(w, h, min, max, samples).map_err(|e| Error::Corrupt {
            offset: pos,
            reason: e.to_string(),
        })?;
        planes.push(plane);
        pos = end;
    }
    if pos != bytes.len() {
        return Err(Error::Corrupt {
            offset: pos,
            reason: format!("{} trailing bytes", bytes.len() - pos),
        });
    }
    let [a, b, c]: [Plane; 3] = planes.try_into().unwrap();
    let img = ColorImage::new([a, b, c], roles).map_err(|e| Error::Corrupt {
        offset: PLANAR_FIXED,
        reason: e.to_string(),
    })?;
    Ok((img, desc))
}

pub fn write_planar(
    img: &ColorImage,
    desc: &TransformDescriptor,
    path: impl AsRef<Path>,
) -> Result<()> {
    fs::write(path, encode_planar(img, desc)?)?;
    Ok(())
}

pub fn read_planar(path: impl AsRef<Path>) -> Result<(ColorImage, TransformDescriptor)> {
    decode_planar(&fs::read(path)?)
}

// ---------------------------------------------------------------------------
// Dataset preparation

/// Converts an RGGB Bayer mosaic into an RGB image of half the resolution.
/// R and B come straight from their subpixels; G is the rounded mean of the
/// two green subpixels (ties away from zero).
pub fn bayer_rggb_to_rgb(mosaic: &Plane) -> Result<ColorImage> {
    let (w, h) = (mosaic.width(), mosaic.height());
    if w % 2 != 0 || h % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "Bayer mosaic dimensions must be even, got {w}x{h}"
        )));
    }
    if mosaic.min_value() < 0 || mosaic.max_value() > 255 {
        return Err(Error::InvalidArgument(
            "Bayer mosaic must hold 8-bit samples".into(),
        ));
    }
    ColorImage::from_rgb_fn(w / 2, h / 2, |x, y| {
        let (sx, sy) = (2 * x, 2 * y);
        let r = mosaic.get(sx, sy);
        let g = round_div(mosaic.get(sx + 1, sy) + mosaic.get(sx, sy + 1), 2);
        let b = mosaic.get(sx + 1, sy + 1);
        [r as u8, g as u8, b as u8]
    })
}

/// Averages each 3×3 block into one pixel (ties away from zero). Rows and
/// columns beyond the last full block are dropped.
pub fn reduce3x(img: &ColorImage) -> Result<ColorImage> {
    let (w, h) = (img.width() / 3, img.height() / 3);
    if w == 0 || h == 0 {
        return Err(Error::InvalidArgument(format!(
            "{}x{} image is too small to reduce",
            img.width(),
            img.height()
        )));
    }
    let reduce = |p: &Plane| -> Result<Plane> {
        Plane::from_fn(w, h, p.min_value(), p.max_value(), |x, y| {
            let mut sum = 0;
            for dy in 0..3 {
                for dx in 0..3 {
                    sum += p.get(3 * x + dx, 3 * y + dy);
                }
            }
            round_div(sum, 9)
        })
    };
    let [a, b, c] = img.planes();
    ColorImage::new([reduce(a)?, reduce(b)?, reduce(c)?], img.roles())
}

/// Adds independent Gaussian noise to each component of an RGB image.
///
/// Component `i` draws from ChaCha8 seeded with `seed` on stream `i`.
/// Standard normal pairs come from Box-Muller on two uniforms,
/// `u1 = 1 − U` in `(0, 1]` and `u2 = U` in `[0, 1)`, each `U` being a 53-bit
/// `f64`: `sqrt(−2 ln u1)·cos(2π u2)` then `sqrt(−2 ln u1)·sin(2π u2)`, used in
/// pixel order. Values are rounded half away from zero and clamped to
/// `[0, 255]`. A zero sigma leaves its component untouched.
pub fn add_awgn(img: &ColorImage, sigmas: [f64; 3], seed: u64) -> Result<ColorImage> {
    img.expect_roles(RGB_ROLES)?;
    if let Some(s) = sigmas.iter().find(|s| !(s.is_finite() && **s >= 0.0)) {
        return Err(Error::InvalidArgument(format!(
            "noise sigma {s} must be non-negative"
        )));
    }
    let noisy = |i: usize| -> Plane {
        let p = img.plane(i);
        let sigma = sigmas[i];
        if sigma == 0.0 {
            return p.clone();
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let mut normals = GaussianPairs::default();
        let samples = p
            .samples()
            .iter()
            .map(|&s| {
                let v = s as f64 + sigma * normals.next(&mut rng);
                v.round().clamp(0.0, 255.0) as i16
            })
            .collect();
        Plane::from_parts_unchecked(p.width(), p.height(), 0, 255, samples)
    };
    ColorImage::rgb(noisy(0), noisy(1), noisy(2))
}

#[derive(Default)]
struct GaussianPairs {
    spare: Option<f64>,
}

impl GaussianPairs {
    fn next(&mut self, rng: &mut ChaCha8Rng) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = 1.0 - rng.random::<f64>();
        let u2 = rng.random::<f64>();
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = std::f64::consts::TAU * u2;
        self.spare = Some(radius * angle.sin());
        radius * angle.cos()
    }
}
