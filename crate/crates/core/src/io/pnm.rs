use crate::color::rgb_to_lab;
use crate::error::{domain, IsfError, Result};
use crate::lattice::Lattice;
use crate::metrics::LabelMap;
use crate::scalar::Scalar;

/// Superpixel boundary color in overlays.
pub const CYAN: [u8; 3] = [0, 255, 255];
/// Ground-truth boundary color in overlays.
pub const MAGENTA: [u8; 3] = [255, 0, 255];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PnmKind {
    /// Binary graymap.
    P5,
    /// Binary pixmap.
    P6,
}

impl PnmKind {
    pub fn channels(self) -> usize {
        match self {
            PnmKind::P5 => 1,
            PnmKind::P6 => 3,
        }
    }
}

/// Decoded binary PNM: samples in x-fastest order, channel-interleaved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PnmImage {
    pub kind: PnmKind,
    pub width: usize,
    pub height: usize,
    pub maxval: u16,
    pub samples: Vec<u16>,
}

impl PnmImage {
    pub fn new(kind: PnmKind, width: usize, height: usize, maxval: u16, samples: Vec<u16>) -> Result<Self> {
        if width == 0 || height == 0 {
            return domain("image extents must be positive");
        }
        if maxval == 0 {
            return domain("maxval must be positive");
        }
        if samples.len() != width * height * kind.channels() {
            return domain("sample count does not match the header");
        }
        if samples.iter().any(|&s| s > maxval) {
            return domain("sample exceeds maxval");
        }
        Ok(Self { kind, width, height, maxval, samples })
    }

    pub fn pixels(&self) -> usize {
        self.width * self.height
    }

    /// RGB triple of a pixel; graymaps are replicated.
    pub fn rgb(&self, i: usize) -> [u16; 3] {
        match self.kind {
            PnmKind::P5 => [self.samples[i]; 3],
            PnmKind::P6 => [self.samples[3 * i], self.samples[3 * i + 1], self.samples[3 * i + 2]],
        }
    }

    /// Lab lattice: pixmaps through sRGB conversion (rescaled to 8 bits when
    /// `maxval != 255`), graymaps onto lightness.
    pub fn to_lattice<T: Scalar>(&self) -> Result<Lattice<T>> {
        let dims = [self.width, self.height, 1];
        match self.kind {
            PnmKind::P5 => Lattice::from_gray(dims, false, &self.samples, self.maxval),
            PnmKind::P6 => {
                let to8 = |v: u16| -> u8 {
                    if self.maxval == 255 {
                        v as u8
                    } else {
                        ((v as f64) * 255.0 / self.maxval as f64).round() as u8
                    }
                };
                let colors = self
                    .samples
                    .chunks_exact(3)
                    .map(|p| rgb_to_lab(to8(p[0]), to8(p[1]), to8(p[2])))
                    .collect();
                Lattice::from_lab(dims, false, colors, 3)
            }
        }
    }

    /// Graymap samples taken verbatim as labels.
    pub fn to_labels(&self) -> Result<LabelMap> {
        if self.kind != PnmKind::P5 {
            return domain("label maps must be P5 graymaps");
        }
        LabelMap::new([self.width, self.height, 1], self.samples.iter().map(|&s| s as u32).collect())
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(IsfError::Parse { offset: self.pos, message: message.into() })
    }

    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.error(format!("expected {what}"));
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii digits");
        match text.parse::<usize>() {
            Ok(v) => Ok(v),
            Err(_) => Err(IsfError::Parse { offset: start, message: format!("{what} out of range") }),
        }
    }
}

/// Parses a binary P5/P6 file. 16-bit samples are big-endian.
pub fn read_pnm(bytes: &[u8]) -> Result<PnmImage> {
    let mut cur = Cursor { bytes, pos: 0 };
    let kind = match bytes.get(..2) {
        Some(b"P5") => PnmKind::P5,
        Some(b"P6") => PnmKind::P6,
        _ => return cur.error("expected magic P5 or P6"),
    };
    cur.pos = 2;
    if !bytes.get(2).is_some_and(|b| b.is_ascii_whitespace() || *b == b'#') {
        return cur.error("expected whitespace after magic");
    }
    cur.skip_space_and_comments();
    let width_at = cur.pos;
    let width = cur.number("width")?;
    let height = cur.number("height")?;
    cur.skip_space_and_comments();
    let maxval_at = cur.pos;
    let maxval = cur.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(IsfError::Parse { offset: width_at, message: "zero image extent".into() });
    }
    if maxval == 0 || maxval > 65535 {
        return Err(IsfError::Parse { offset: maxval_at, message: format!("maxval {maxval} outside 1..=65535") });
    }
    if !bytes.get(cur.pos).is_some_and(u8::is_ascii_whitespace) {
        return cur.error("expected a single whitespace byte before the raster");
    }
    cur.pos += 1;
    let wide = maxval > 255;
    let count = width
        .checked_mul(height)
        .and_then(|p| p.checked_mul(kind.channels()))
        .ok_or_else(|| IsfError::Parse { offset: maxval_at, message: "image too large".into() })?;
    let need = count * if wide { 2 } else { 1 };
    let payload = &bytes[cur.pos..];
    if payload.len() < need {
        return Err(IsfError::Parse {
            offset: bytes.len(),
            message: format!("truncated raster: need {need} bytes, found {}", payload.len()),
        });
    }
    let samples: Vec<u16> = if wide {
        payload[..need].chunks_exact(2).map(|c| u16::from_be_bytes([c[0], c[1]])).collect()
    } else {
        payload[..need].iter().map(|&b| b as u16).collect()
    };
    if let Some(i) = samples.iter().position(|&s| s as usize > maxval) {
        let offset = cur.pos + i * if wide { 2 } else { 1 };
        return Err(IsfError::Parse { offset, message: format!("sample exceeds maxval {maxval}") });
    }
    PnmImage::new(kind, width, height, maxval as u16, samples)
}

pub fn read_pnm_lattice<T: Scalar>(bytes: &[u8]) -> Result<Lattice<T>> {
    read_pnm(bytes)?.to_lattice()
}

pub fn read_pnm_labels(bytes: &[u8]) -> Result<LabelMap> {
    read_pnm(bytes)?.to_labels()
}

/// Encodes with the canonical header `P5\n<w> <h>\n<maxval>\n`.
pub fn write_pnm(image: &PnmImage) -> Vec<u8> {
    let magic = match image.kind {
        PnmKind::P5 => "P5",
        PnmKind::P6 => "P6",
    };
    let mut out = format!("{magic}\n{} {}\n{}\n", image.width, image.height, image.maxval).into_bytes();
    if image.maxval > 255 {
        out.reserve(image.samples.len() * 2);
        for &s in &image.samples {
            out.extend_from_slice(&s.to_be_bytes());
        }
    } else {
        out.extend(image.samples.iter().map(|&s| s as u8));
    }
    out
}

/// Labels as a 16-bit P5 graymap.
pub fn write_labels(labels: &LabelMap) -> Result<Vec<u8>> {
    let [w, h, d] = labels.dims();
    if d != 1 {
        return domain("PNM label maps are 2D; use the volume format for 3D");
    }
    if labels.max_label() > u16::MAX as u32 {
        return domain(format!("label {} does not fit in 16 bits", labels.max_label()));
    }
    let samples = labels.labels().iter().map(|&l| l as u16).collect();
    Ok(write_pnm(&PnmImage::new(PnmKind::P5, w, h, u16::MAX, samples)?))
}

/// Binary mask as an 8-bit P5 graymap, 255 on set sites.
pub fn write_mask(width: usize, height: usize, mask: &[bool]) -> Result<Vec<u8>> {
    let samples = mask.iter().map(|&m| if m { 255 } else { 0 }).collect();
    Ok(write_pnm(&PnmImage::new(PnmKind::P5, width, height, 255, samples)?))
}

/// P6 overlay: ground-truth boundaries magenta, then superpixel boundaries
/// cyan on top, so magenta marks ground-truth boundary sites that no
/// superpixel boundary covers.
pub fn write_overlay(image: &PnmImage, labels: &LabelMap, gt: Option<&LabelMap>) -> Result<Vec<u8>> {
    let dims = [image.width, image.height, 1];
    if labels.dims() != dims {
        return Err(IsfError::DimensionMismatch { left: dims, right: labels.dims() });
    }
    let scale = |c: [u8; 3]| -> [u16; 3] {
        c.map(|v| if v == 255 { image.maxval } else { v as u16 })
    };
    let mut rgb: Vec<[u16; 3]> = (0..image.pixels()).map(|i| image.rgb(i)).collect();
    if let Some(gt) = gt {
        if gt.dims() != dims {
            return Err(IsfError::DimensionMismatch { left: dims, right: gt.dims() });
        }
        for (p, &e) in rgb.iter_mut().zip(&gt.boundary_mask()) {
            if e {
                *p = scale(MAGENTA);
            }
        }
    }
    for (p, &e) in rgb.iter_mut().zip(&labels.boundary_mask()) {
        if e {
            *p = scale(CYAN);
        }
    }
    let samples = rgb.into_iter().flatten().collect();
    Ok(write_pnm(&PnmImage::new(PnmKind::P6, image.width, image.height, image.maxval, samples)?))
}
