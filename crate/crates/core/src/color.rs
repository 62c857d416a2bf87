//! sRGB (D65) to CIE L*a*b* conversion and the grayscale mapping.

use crate::scalar::Scalar;

// Linear sRGB -> XYZ, D65.
const RGB_TO_XYZ: [[f64; 3]; 3] = [
    [0.4124564, 0.3575761, 0.1804375],
    [0.2126729, 0.7151522, 0.0721750],
    [0.0193339, 0.1191920, 0.9503041],
];

#[inline]
fn srgb_to_linear<T: Scalar>(channel: u8) -> T {
    let c = T::of(channel as f64 / 255.0);
    if c <= T::of(0.04045) {
        c / T::of(12.92)
    } else {
        ((c + T::of(0.055)) / T::of(1.055)).powf(T::of(2.4))
    }
}

#[inline]
fn lab_f<T: Scalar>(t: T) -> T {
    let delta = 6.0 / 29.0;
    if t > T::of(delta * delta * delta) {
        t.cbrt()
    } else {
        t / T::of(3.0 * delta * delta) + T::of(4.0 / 29.0)
    }
}

/// Converts an 8-bit sRGB triple to L*a*b*.
///
/// The reference white is the XYZ image of sRGB white under the matrix
/// above, so `(255, 255, 255)` lands on `(100, 0, 0)` up to rounding.
pub fn rgb_to_lab<T: Scalar>(r: u8, g: u8, b: u8) -> [T; 3] {
    let rgb: [T; 3] = [srgb_to_linear(r), srgb_to_linear(g), srgb_to_linear(b)];
    let mut xyz = [T::zero(); 3];
    for (row, out) in RGB_TO_XYZ.iter().zip(xyz.iter_mut()) {
        let white = T::of(row.iter().sum());
        *out = (T::of(row[0]) * rgb[0] + T::of(row[1]) * rgb[1] + T::of(row[2]) * rgb[2]) / white;
    }
    let fx = lab_f(xyz[0]);
    let fy = lab_f(xyz[1]);
    let fz = lab_f(xyz[2]);
    [
        T::of(116.0) * fy - T::of(16.0),
        T::of(500.0) * (fx - fy),
        T::of(200.0) * (fy - fz),
    ]
}

/// Maps a grayscale intensity onto lightness: `(100 * v / maxval, 0, 0)`.
pub fn to_grayscale_lab<T: Scalar>(intensity: u16, maxval: u16) -> [T; 3] {
    [
        T::of(100.0) * T::of(intensity as f64) / T::of(maxval as f64),
        T::zero(),
        T::zero(),
    ]
}
