//! Compressed color images: a transform descriptor followed by three coded
//! planes.
//!
//! ```text
//! offset  size  field
//! 0       4     magic "RDLZ"
//! 4       1     version (1)
//! 5       7     descriptor (kind, Dg code, Db code, w_dg u16, w_db u16)
//! 12      12    byte length of each coded plane (3 × u32)
//! 24      4     CRC-32 of bytes 0..24
//! 28      ...   three RDLC plane streams
//! ```

use crate::codec::{self, CodedPlane};
use crate::descriptor::TransformDescriptor;
use crate::error::{Error, Result};
use crate::estimate::bitrate;
use crate::imageio::{decode_descriptor, encode_descriptor, DESCRIPTOR_LEN};
use crate::plane::{ColorImage, Plane, RGB_ROLES};
use crate::transforms;

pub const MAGIC: &[u8; 4] = b"RDLZ";
pub const VERSION: u8 = 1;
const LENGTHS_AT: usize = 5 + DESCRIPTOR_LEN;
const CRC_AT: usize = LENGTHS_AT + 12;
pub const HEADER_LEN: usize = CRC_AT + 4;

/// Result of compressing an RGB image.
#[derive(Debug, Clone)]
pub struct Compressed {
    pub descriptor: TransformDescriptor,
    pub bytes: Vec<u8>,
    /// Coded size of each transformed plane, header included.
    pub plane_bytes: [usize; 3],
}

impl Compressed {
    /// Sum of the three per-plane bitrates.
    pub fn total_bpp(&self, pixel_count: usize) -> f64 {
        self.plane_bytes
            .iter()
            .map(|&b| bitrate(b, pixel_count).unwrap_or(f64::NAN))
            .sum()
    }
}

/// Transforms `img` with `desc` and codes the three resulting planes.
pub fn compress(img: &ColorImage, desc: &TransformDescriptor) -> Result<Compressed> {
    img.expect_roles(RGB_ROLES)?;
    let t = transforms::forward(img, desc)?;
    let coded: Vec<Vec<u8>> = t
        .planes()
        .iter()
        .map(|p| codec::encode_plane(p).to_bytes())
        .collect();

    let mut out = Vec::with_capacity(HEADER_LEN + coded.iter().map(Vec::len).sum::<usize>());
    out.extend_from_slice(MAGIC);
    out.push(VERSION);
    encode_descriptor(desc, &mut out);
    for c in &coded {
        out.extend_from_slice(&(c.len() as u32).to_le_bytes());
    }
    let crc = crc32fast::hash(&out);
    out.extend_from_slice(&crc.to_le_bytes());
    for c in &coded {
        out.extend_from_slice(c);
    }
    Ok(Compressed {
        descriptor: *desc,
        bytes: out,
        plane_bytes: [coded[0].len(), coded[1].len(), coded[2].len()],
    })
}

fn shift(e: Error, base: usize) -> Error {
    match e {
        Error::Truncated { offset } => Error::Truncated {
            offset: offset + base,
        },
        Error::Corrupt { offset, reason } => Error::Corrupt {
            offset: offset + base,
            reason,
        },
        other => other,
    }
}

/// Decodes a compressed image back to RGB, returning it with its descriptor.
pub fn decompress(bytes: &[u8]) -> Result<(ColorImage, TransformDescriptor)> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Truncated {
            offset: bytes.len(),
        });
    }
    if &bytes[..4] != MAGIC {
        return Err(Error::Corrupt {
            offset: 0,
            reason: "bad magic".into(),
        });
    }
    let stored = u32::from_le_bytes(bytes[CRC_AT..HEADER_LEN].try_into().unwrap());
    if crc32fast::hash(&bytes[..CRC_AT]) != stored {
        return Err(Error::Corrupt {
            offset: CRC_AT,
            reason: "header checksum mismatch".into(),
        });
    }
    if bytes[4] != VERSION {
        return Err(Error::Corrupt {
            offset: 4,
            reason: format!("unsupported version {}", bytes[4]),
        });
    }
    let desc = decode_descriptor(bytes, 5)?;
    let roles = desc.output_roles();

    let mut pos = HEADER_LEN;
    let mut planes: Vec<Plane> = Vec::with_capacity(3);
    for (i, role) in roles.iter().enumerate() {
        let o = LENGTHS_AT + 4 * i;
        let len = u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap()) as usize;
        let end = pos
            .checked_add(len)
            .filter(|&e| e <= bytes.len())
            .ok_or(Error::Truncated {
                offset: bytes.len(),
            })?;
        let plane = CodedPlane::from_bytes(&bytes[pos..end])
            .and_then(|c| codec::decode_plane(&c))
            .map_err(|e| shift(e, pos))?;
        if plane.bounds() != role.bounds() {
            return Err(Error::Corrupt {
                offset: pos,
                reason: format!("plane bounds {:?} do not fit role {role}", plane.bounds()),
            });
        }
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
    let t = ColorImage::new([a, b, c], roles).map_err(|e| Error::Corrupt {
        offset: HEADER_LEN,
        reason: e.to_string(),
    })?;
    Ok((transforms::inverse(&t, &desc)?, desc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::denoise::FilterSpec;
    use crate::synth;

    fn descriptors() -> Vec<TransformDescriptor> {
        let w = |n| FilterSpec::new(n).unwrap();
        vec![
            TransformDescriptor::identity(),
            TransformDescriptor::rdgdb(),
            TransformDescriptor::rct(),
            TransformDescriptor::rdls_rdgdb(w(2), w(1)),
        ]
    }

    #[test]
    fn round_trip_every_transform() {
        let img = synth::noisy_scene(37, 29, 4, 6.0).unwrap();
        for desc in descriptors() {
            let c = compress(&img, &desc).unwrap();
            let (back, d) = decompress(&c.bytes).unwrap();
            assert_eq!(back, img, "{desc}");
            assert_eq!(d, desc);
            assert_eq!(
                c.bytes.len(),
                HEADER_LEN + c.plane_bytes.iter().sum::<usize>()
            );
        }
    }

    #[test]
    fn constant_image_is_cheap() {
        let img = ColorImage::from_rgb_fn(256, 256, |_, _| [90, 120, 200]).unwrap();
        let c = compress(&img, &TransformDescriptor::rdgdb()).unwrap();
        assert!(c.total_bpp(img.pixel_count()) < 0.5);
    }

    #[test]
    fn every_byte_corruption_detected() {
        let img = synth::noisy_scene(12, 9, 2, 10.0).unwrap();
        let c = compress(
            &img,
            &TransformDescriptor::rdls_rdgdb(
                FilterSpec::new(4).unwrap(),
                FilterSpec::new(8).unwrap(),
            ),
        )
        .unwrap();
        for i in 0..c.bytes.len() {
            for flip in [0x01u8, 0x80, 0xff] {
                let mut bad = c.bytes.clone();
                bad[i] ^= flip;
                assert!(decompress(&bad).is_err(), "byte {i} flip {flip:#x}");
            }
        }
        for cut in 0..c.bytes.len() {
            assert!(decompress(&c.bytes[..cut]).is_err());
        }
    }

    #[test]
    fn auto_selection_is_close_to_rdgdb_or_better() {
        use crate::select::{select_transform, Metric};
        let (mut auto, mut plain) = (0.0, 0.0);
        for (i, sigma) in [0.0, 5.0, 20.0, 80.0].into_iter().enumerate() {
            let img = synth::noisy_scene(64, 64, 50 + i as u64, sigma).unwrap();
            let n = img.pixel_count();
            let desc = select_transform(&img, Metric::H0Med).unwrap().descriptor();
            auto += compress(&img, &desc).unwrap().total_bpp(n);
            plain += compress(&img, &TransformDescriptor::rdgdb())
                .unwrap()
                .total_bpp(n);
        }
        assert!(auto <= plain * 1.01, "auto {auto} rdgdb {plain}");
    }
}
