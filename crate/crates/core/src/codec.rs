//! Internal lossless plane coder: MED prediction, zigzag mapping and
//! Golomb-Rice codes with a per-row adaptive parameter.
//!
//! This is a measuring instrument for comparing transforms, not an
//! implementation of any standard codec.
//!
//! Stream layout (all integers little-endian):
//!
//! ```text
//! offset  size  field
//! 0       4     magic "RDLC"
//! 4       1     version (1)
//! 5       4     width  (u32)
//! 9       4     height (u32)
//! 13      2     min sample value (i16)
//! 15      2     max sample value (i16)
//! 17      4     CRC-32 of bytes 5..17 followed by the samples as i16 LE
//! 21      ...   payload
//! ```
//!
//! Payload bits are written most-significant-bit first. Each row starts with
//! a flag bit: `1` means every residual in the row is zero and nothing else
//! follows for the row; `0` is followed by one code per pixel. A code for the
//! zigzag value `z` with parameter `k` is `q = z >> k` zero bits, a one bit,
//! then the low `k` bits of `z`. When `q` reaches [`ESCAPE_ZEROS`], the escape
//! run of zeros is followed by `z` in `escape_bits` raw bits instead.
//! Trailing bits of the last byte are zero.

use crate::error::{Error, Result};
use crate::estimate::{bitrate, med_prediction, mid_range};
use crate::plane::Plane;

pub const MAGIC: &[u8; 4] = b"RDLC";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 21;

/// Unary run length that switches to a raw escape code.
pub const ESCAPE_ZEROS: u32 = 24;
const MAX_K: u32 = 14;
const STATS_LIMIT: u64 = 1024;
const MAX_PIXELS: usize = 1 << 30;

/// Header fields plus the coded payload of one plane.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodedPlane {
    pub width: u32,
    pub height: u32,
    pub min_value: i16,
    pub max_value: i16,
    pub checksum: u32,
    pub payload: Vec<u8>,
}

impl CodedPlane {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + self.payload.len());
        out.extend_from_slice(MAGIC);
        out.push(VERSION);
        out.extend_from_slice(&self.header_fields());
        out.extend_from_slice(&self.checksum.to_le_bytes());
        out.extend_from_slice(&self.payload);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN {
            return Err(Error::Truncated {
                offset: bytes.len(),
            });
        }
        if &bytes[0..4] != MAGIC {
            return Err(Error::Corrupt {
                offset: 0,
                reason: "bad magic".into(),
            });
        }
        if bytes[4] != VERSION {
            return Err(Error::Corrupt {
                offset: 4,
                reason: format!("unsupported version {}", bytes[4]),
            });
        }
        let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
        let i16_at = |o: usize| i16::from_le_bytes(bytes[o..o + 2].try_into().unwrap());
        Ok(CodedPlane {
            width: u32_at(5),
            height: u32_at(9),
            min_value: i16_at(13),
            max_value: i16_at(15),
            checksum: u32_at(17),
            payload: bytes[HEADER_LEN..].to_vec(),
        })
    }

    /// Total encoded size in bytes, header included.
    pub fn byte_len(&self) -> usize {
        HEADER_LEN + self.payload.len()
    }

    fn header_fields(&self) -> [u8; 12] {
        let mut h = [0u8; 12];
        h[0..4].copy_from_slice(&self.width.to_le_bytes());
        h[4..8].copy_from_slice(&self.height.to_le_bytes());
        h[8..10].copy_from_slice(&self.min_value.to_le_bytes());
        h[10..12].copy_from_slice(&self.max_value.to_le_bytes());
        h
    }
}

fn checksum(fields: &[u8; 12], samples: &[i16]) -> u32 {
    let mut h = crc32fast::Hasher::new();
    h.update(fields);
    for s in samples {
        h.update(&s.to_le_bytes());
    }
    h.finalize()
}

#[inline]
fn zigzag(v: i32) -> u32 {
    ((v << 1) ^ (v >> 31)) as u32
}

#[inline]
fn unzigzag(z: u32) -> i32 {
    (z >> 1) as i32 ^ -((z & 1) as i32)
}

/// Running mean of zigzag magnitudes, updated once per row.
struct RowStats {
    sum: u64,
    count: u64,
}

impl RowStats {
    fn new(min: i32, max: i32) -> Self {
        let range = (max - min + 1) as u64;
        RowStats {
            sum: ((range + 32) / 64).max(2),
            count: 1,
        }
    }

    /// Smallest `k` with `count · 2^k ≥ sum`.
    fn k(&self) -> u32 {
        let mut k = 0;
        while k < MAX_K && (self.count << k) < self.sum {
            k += 1;
        }
        k
    }

    fn update(&mut self, row_sum: u64, row_len: u64) {
        self.sum += row_sum;
        self.count += row_len;
        while self.count >= STATS_LIMIT {
            self.sum = self.sum.div_ceil(2);
            self.count = self.count.div_ceil(2);
        }
    }
}

fn escape_bits(min: i32, max: i32) -> u32 {
    let largest = 2 * (max - min) as u32;
    32 - largest.leading_zeros().min(31)
}

struct BitWriter {
    bytes: Vec<u8>,
    acc: u64,
    nbits: u32,
}

impl BitWriter {
    fn new() -> Self {
        BitWriter {
            bytes: Vec::new(),
            acc: 0,
            nbits: 0,
        }
    }

    #[inline]
    fn put(&mut self, value: u32, bits: u32) {
        debug_assert!(bits <= 32);
        if bits == 0 {
            return;
        }
        self.acc = (self.acc << bits) | (value as u64 & ((1u64 << bits) - 1));
        self.nbits += bits;
        while self.nbits >= 8 {
            self.nbits -= 8;
            self.bytes.push((self.acc >> self.nbits) as u8);
        }
    }

    fn zeros(&mut self, mut n: u32) {
        while n > 0 {
            let step = n.min(32);
            self.put(0, step);
            n -= step;
        }
    }

    fn finish(mut self) -> Vec<u8> {
        if self.nbits > 0 {
            let pad = 8 - self.nbits;
            self.put(0, pad);
        }
        self.bytes
    }
}

struct BitReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> BitReader<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        BitReader { bytes, pos: 0 }
    }

    fn byte_offset(&self) -> usize {
        HEADER_LEN + self.pos / 8
    }

    #[inline]
    fn bit(&mut self) -> Result<u32> {
        let byte = self.pos / 8;
        let b = *self.bytes.get(byte).ok_or(Error::Truncated {
            offset: HEADER_LEN + byte,
        })?;
        let bit = (b >> (7 - (self.pos % 8))) & 1;
        self.pos += 1;
        Ok(bit as u32)
    }

    fn bits(&mut self, n: u32) -> Result<u32> {
        let mut v = 0;
        for _ in 0..n {
            v = (v << 1) | self.bit()?;
        }
        Ok(v)
    }
}

/// MED prediction for sample `i` given the samples before it in raster order.
#[inline]
fn predict(samples: &[i16], width: usize, i: usize, mid: i32) -> i32 {
    let (x, y) = (i % width, i / width);
    match (x, y) {
        (0, 0) => mid,
        (_, 0) => samples[i - 1] as i32,
        (0, _) => samples[i - width] as i32,
        _ => med_prediction(
            samples[i - 1] as i32,
            samples[i - width] as i32,
            samples[i - width - 1] as i32,
        ),
    }
}

pub fn encode_plane(p: &Plane) -> CodedPlane {
    let (w, h) = (p.width(), p.height());
    let (min, max) = p.bounds();
    let mid = mid_range(p);
    let esc = escape_bits(min, max);
    let s = p.samples();

    let mut coded = CodedPlane {
        width: w as u32,
        height: h as u32,
        min_value: min as i16,
        max_value: max as i16,
        checksum: 0,
        payload: Vec::new(),
    };
    coded.checksum = checksum(&coded.header_fields(), s);

    let mut out = BitWriter::new();
    let mut stats = RowStats::new(min, max);
    let mut row = Vec::with_capacity(w);
    for y in 0..h {
        row.clear();
        row.extend((0..w).map(|x| {
            let i = y * w + x;
            zigzag(s[i] as i32 - predict(s, w, i, mid))
        }));
        if row.iter().all(|&z| z == 0) {
            out.put(1, 1);
            stats.update(0, w as u64);
            continue;
        }
        out.put(0, 1);
        let k = stats.k();
        let mut row_sum = 0u64;
        for &z in &row {
            row_sum += z as u64;
            let q = z >> k;
            if q < ESCAPE_ZEROS {
                out.zeros(q);
                out.put(1, 1);
                out.put(z, k);
            } else {
                out.zeros(ESCAPE_ZEROS);
                out.put(z, esc);
            }
        }
        stats.update(row_sum, w as u64);
    }
    coded.payload = out.finish();
    coded
}

pub fn decode_plane(c: &CodedPlane) -> Result<Plane> {
    let (w, h) = (c.width as usize, c.height as usize);
    let (min, max) = (c.min_value as i32, c.max_value as i32);
    if w == 0 || h == 0 {
        return Err(Error::Corrupt {
            offset: 5,
            reason: format!("invalid dimensions {w}x{h}"),
        });
    }
    if min > max {
        return Err(Error::Corrupt {
            offset: 13,
            reason: format!("invalid bounds [{min}, {max}]"),
        });
    }
    let n = w.checked_mul(h).ok_or(Error::Corrupt {
        offset: 5,
        reason: "dimensions overflow".into(),
    })?;
    if n > MAX_PIXELS {
        return Err(Error::Corrupt {
            offset: 5,
            reason: format!("{w}x{h} exceeds the supported plane size"),
        });
    }
    // every row costs at least one bit
    if c.payload.len() * 8 < h {
        return Err(Error::Truncated {
            offset: HEADER_LEN + c.payload.len(),
        });
    }
    let mid = (min + max + 1) / 2;
    let esc = escape_bits(min, max);
    let mut r = BitReader::new(&c.payload);
    let mut stats = RowStats::new(min, max);
    let mut s: Vec<i16> = Vec::with_capacity(n.min(c.payload.len() * 8 + w));

    for y in 0..h {
        let all_zero = r.bit()? == 1;
        let k = stats.k();
        let mut row_sum = 0u64;
        for x in 0..w {
            let i = y * w + x;
            let z = if all_zero {
                0
            } else {
                let mut q = 0;
                while q < ESCAPE_ZEROS && r.bit()? == 0 {
                    q += 1;
                }
                if q == ESCAPE_ZEROS {
                    r.bits(esc)?
                } else {
                    (q << k) | r.bits(k)?
                }
            };
            row_sum += z as u64;
            let v = predict(&s, w, i, mid) + unzigzag(z);
            if v < min || v > max {
                return Err(Error::Corrupt {
                    offset: r.byte_offset(),
                    reason: format!("decoded sample {v} outside [{min}, {max}]"),
                });
            }
            s.push(v as i16);
        }
        stats.update(row_sum, w as u64);
    }

    let used = r.pos.div_ceil(8);
    if used != c.payload.len() {
        return Err(Error::Corrupt {
            offset: HEADER_LEN + used,
            reason: format!("{} trailing bytes", c.payload.len() - used),
        });
    }
    if !r.pos.is_multiple_of(8) && r.bits((8 - r.pos % 8) as u32)? != 0 {
        return Err(Error::Corrupt {
            offset: HEADER_LEN + used - 1,
            reason: "nonzero padding bits".into(),
        });
    }
    if checksum(&c.header_fields(), &s) != c.checksum {
        return Err(Error::Corrupt {
            offset: 17,
            reason: "checksum mismatch".into(),
        });
    }
    Ok(Plane::from_parts_unchecked(w, h, min, max, s))
}

/// Parses and decodes a complete coded-plane stream.
pub fn decode_bytes(bytes: &[u8]) -> Result<Plane> {
    decode_plane(&CodedPlane::from_bytes(bytes)?)
}

/// `8e/s` for the coded size of `p`, header included.
pub fn measure_bitrate(p: &Plane) -> f64 {
    bitrate(encode_plane(p).byte_len(), p.len()).expect("planes are never empty")
}
