//! `ISF3` volumes: the 4-byte magic, then `dx`, `dy`, `dz` as little-endian
//! `u32` and `maxval` as little-endian `u16`, then `dx*dy*dz` little-endian
//! `u16` samples in x-fastest order.

use crate::error::{domain, IsfError, Result};
use crate::lattice::Lattice;
use crate::metrics::LabelMap;
use crate::scalar::Scalar;

pub const VOLUME_MAGIC: &[u8; 4] = b"ISF3";
const HEADER_LEN: usize = 4 + 3 * 4 + 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VolumeHeader {
    pub dims: [usize; 3],
    pub maxval: u16,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Volume {
    pub header: VolumeHeader,
    pub samples: Vec<u16>,
}

impl Volume {
    pub fn new(dims: [usize; 3], maxval: u16, samples: Vec<u16>) -> Result<Self> {
        if dims.iter().any(|&d| d == 0 || d > u32::MAX as usize) {
            return domain(format!("invalid volume extents {dims:?}"));
        }
        if maxval == 0 {
            return domain("maxval must be positive");
        }
        if samples.len() != dims.iter().product::<usize>() {
            return domain("sample count does not match the extents");
        }
        if samples.iter().any(|&s| s > maxval) {
            return domain("sample exceeds maxval");
        }
        Ok(Self { header: VolumeHeader { dims, maxval }, samples })
    }

    /// Label volume; `maxval` is the largest label (at least 1).
    pub fn from_labels(labels: &LabelMap) -> Result<Self> {
        if labels.max_label() > u16::MAX as u32 {
            return domain(format!("label {} does not fit in 16 bits", labels.max_label()));
        }
        let samples = labels.labels().iter().map(|&l| l as u16).collect();
        Self::new(labels.dims(), labels.max_label().max(1) as u16, samples)
    }

    pub fn to_lattice<T: Scalar>(&self) -> Result<Lattice<T>> {
        Lattice::from_gray(self.header.dims, true, &self.samples, self.header.maxval)
    }

    pub fn to_labels(&self) -> Result<LabelMap> {
        LabelMap::new(self.header.dims, self.samples.iter().map(|&s| s as u32).collect())
    }
}

fn parse_err<T>(offset: usize, message: impl Into<String>) -> Result<T> {
    Err(IsfError::Parse { offset, message: message.into() })
}

pub fn read_volume(bytes: &[u8]) -> Result<Volume> {
    if bytes.len() < 4 || &bytes[..4] != VOLUME_MAGIC {
        return parse_err(0, "expected magic ISF3");
    }
    if bytes.len() < HEADER_LEN {
        return parse_err(bytes.len(), "truncated header");
    }
    let word = |at: usize| u32::from_le_bytes(bytes[at..at + 4].try_into().expect("4 bytes")) as usize;
    let dims = [word(4), word(8), word(12)];
    for (axis, &d) in dims.iter().enumerate() {
        if d == 0 {
            return parse_err(4 + 4 * axis, "zero extent");
        }
    }
    let maxval = u16::from_le_bytes([bytes[16], bytes[17]]);
    if maxval == 0 {
        return parse_err(16, "maxval must be positive");
    }
    let count = dims[0]
        .checked_mul(dims[1])
        .and_then(|v| v.checked_mul(dims[2]))
        .filter(|v| *v <= usize::MAX / 2);
    let Some(count) = count else {
        return parse_err(4, "extents overflow");
    };
    let payload = &bytes[HEADER_LEN..];
    if payload.len() != 2 * count {
        return parse_err(
            bytes.len().min(HEADER_LEN + 2 * count),
            format!("payload holds {} bytes, header implies {}", payload.len(), 2 * count),
        );
    }
    let samples: Vec<u16> = payload.chunks_exact(2).map(|c| u16::from_le_bytes([c[0], c[1]])).collect();
    if let Some(i) = samples.iter().position(|&s| s > maxval) {
        return parse_err(HEADER_LEN + 2 * i, format!("sample exceeds maxval {maxval}"));
    }
    Volume::new(dims, maxval, samples)
}

pub fn read_volume_lattice<T: Scalar>(bytes: &[u8]) -> Result<Lattice<T>> {
    read_volume(bytes)?.to_lattice()
}

pub fn write_volume(volume: &Volume) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + 2 * volume.samples.len());
    out.extend_from_slice(VOLUME_MAGIC);
    for d in volume.header.dims {
        out.extend_from_slice(&(d as u32).to_le_bytes());
    }
    out.extend_from_slice(&volume.header.maxval.to_le_bytes());
    for &s in &volume.samples {
        out.extend_from_slice(&s.to_le_bytes());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_black_voxel() {
        let v = Volume::new([1, 1, 1], 255, vec![0]).unwrap();
        let l: Lattice<f64> = read_volume_lattice(&write_volume(&v)).unwrap();
        assert_eq!(l.color(0), &[0.0, 0.0, 0.0]);
        assert!(l.is_3d());
    }

    #[test]
    fn all_maxval_is_full_lightness() {
        let v = Volume::new([2, 2, 2], 4095, vec![4095; 8]).unwrap();
        let l: Lattice<f64> = v.to_lattice().unwrap();
        assert!(l.colors().iter().all(|c| c[0] == 100.0));
    }

    #[test]
    fn header_layout() {
        let v = Volume::new([2, 1, 1], 300, vec![1, 300]).unwrap();
        let b = write_volume(&v);
        assert_eq!(&b[..4], b"ISF3");
        assert_eq!(&b[4..8], &[2, 0, 0, 0]);
        assert_eq!(&b[16..18], &300u16.to_le_bytes());
        assert_eq!(&b[18..], &[1, 0, 0x2c, 0x01]);
    }

    #[test]
    fn malformed_volumes() {
        let good = write_volume(&Volume::new([2, 2, 1], 9, vec![0, 1, 2, 3]).unwrap());
        let mut short = good.clone();
        short.pop();
        let mut long = good.clone();
        long.push(0);
        let mut bad_magic = good.clone();
        bad_magic[3] = b'2';
        let mut big_sample = good.clone();
        big_sample[18] = 10;
        for b in [short, long, bad_magic, big_sample, good[..10].to_vec()] {
            assert!(matches!(read_volume(&b), Err(IsfError::Parse { .. })));
        }
    }

    proptest! {
        #[test]
        fn write_read_identity(samples in proptest::collection::vec(0u16..=1000, 512)) {
            let v = Volume::new([8, 8, 8], 1000, samples).unwrap();
            let bytes = write_volume(&v);
            let back = read_volume(&bytes).unwrap();
            prop_assert_eq!(&back, &v);
            prop_assert_eq!(write_volume(&back), bytes);
        }
    }
}
