//! Pixel/voxel domain: extents, x-fastest site indexing, per-site Lab colors
//! and the 4-/6-neighbour adjacency relations.

use crate::color::{rgb_to_lab, to_grayscale_lab};
use crate::error::{domain, Result};
use crate::scalar::Scalar;

/// Site coordinate `[x, y, z]`; `z == 0` on 2D lattices.
///
/// The derived ordering is the lexicographic order used for every
/// deterministic tie-break in the crate.
pub type Coord = [usize; 3];

/// Rectangular 2D or 3D lattice holding one Lab triple per site.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice<T = f64> {
    dims: [usize; 3],
    ndim: usize,
    colors: Vec<[T; 3]>,
    channels: u8,
}

impl<T: Scalar> Lattice<T> {
    /// Builds a lattice from Lab colors in x-fastest order.
    ///
    /// `dims[2] == 1` with `three_d == false` gives a 2D lattice.
    pub fn from_lab(dims: [usize; 3], three_d: bool, colors: Vec<[T; 3]>, channels: u8) -> Result<Self> {
        if dims.contains(&0) {
            return domain(format!("lattice extents must be positive, got {dims:?}"));
        }
        if !three_d && dims[2] != 1 {
            return domain("a 2D lattice must have dims[2] == 1");
        }
        let n = dims[0] * dims[1] * dims[2];
        if colors.len() != n {
            return domain(format!("expected {n} colors, got {}", colors.len()));
        }
        if channels != 1 && channels != 3 {
            return domain(format!("channel count must be 1 or 3, got {channels}"));
        }
        if let Some(c) = colors.iter().find(|c| !c.iter().all(|v| v.is_finite())) {
            return domain(format!("non-finite color {c:?}"));
        }
        Ok(Self { dims, ndim: if three_d { 3 } else { 2 }, colors, channels })
    }

    pub fn from_lab_2d(width: usize, height: usize, colors: Vec<[T; 3]>) -> Result<Self> {
        Self::from_lab([width, height, 1], false, colors, 3)
    }

    /// 8-bit sRGB triples in x-fastest order.
    pub fn from_rgb8(width: usize, height: usize, rgb: &[[u8; 3]]) -> Result<Self> {
        let colors = rgb.iter().map(|p| rgb_to_lab(p[0], p[1], p[2])).collect();
        Self::from_lab([width, height, 1], false, colors, 3)
    }

    /// Grayscale intensities in `[0, maxval]`, mapped onto lightness.
    pub fn from_gray(dims: [usize; 3], three_d: bool, values: &[u16], maxval: u16) -> Result<Self> {
        if maxval == 0 {
            return domain("maxval must be positive");
        }
        if let Some(v) = values.iter().find(|&&v| v > maxval) {
            return domain(format!("sample {v} exceeds maxval {maxval}"));
        }
        let colors = values.iter().map(|&v| to_grayscale_lab(v, maxval)).collect();
        Self::from_lab(dims, three_d, colors, 1)
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn ndim(&self) -> usize {
        self.ndim
    }

    pub fn is_3d(&self) -> bool {
        self.ndim == 3
    }

    pub fn channels(&self) -> u8 {
        self.channels
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn colors(&self) -> &[[T; 3]] {
        &self.colors
    }

    #[inline]
    pub fn color(&self, index: usize) -> &[T; 3] {
        &self.colors[index]
    }

    pub fn contains(&self, c: Coord) -> bool {
        c[0] < self.dims[0] && c[1] < self.dims[1] && c[2] < self.dims[2]
    }

    #[inline]
    pub fn index(&self, c: Coord) -> usize {
        c[0] + self.dims[0] * (c[1] + self.dims[1] * c[2])
    }

    #[inline]
    pub fn coord(&self, index: usize) -> Coord {
        index_to_coord(self.dims, index)
    }

    pub fn checked_index(&self, c: Coord) -> Result<usize> {
        if self.contains(c) {
            Ok(self.index(c))
        } else {
            domain(format!("site {c:?} outside lattice {:?}", self.dims))
        }
    }

    /// The adjacency relation matching the lattice dimensionality.
    pub fn adjacency(&self) -> Adjacency {
        Adjacency::for_ndim(self.ndim)
    }

    /// In-bounds neighbours of `site` with their step lengths, in offset order.
    pub fn neighbors(&self, site: Coord, adj: &Adjacency) -> Result<Vec<(Coord, f64)>> {
        let idx = self.checked_index(site)?;
        let mut out = Vec::with_capacity(adj.len());
        adj.for_each_neighbor(self.dims, idx, |n, step| out.push((self.coord(n), step)));
        Ok(out)
    }
}

#[inline]
pub(crate) fn index_to_coord(dims: [usize; 3], index: usize) -> Coord {
    let x = index % dims[0];
    let rest = index / dims[0];
    [x, rest % dims[1], rest / dims[1]]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AdjacencyKind {
    Four2d,
    Six3d,
}

/// Symmetric neighbour relation given as coordinate offsets.
#[derive(Debug, Clone, PartialEq)]
pub struct Adjacency {
    kind: AdjacencyKind,
    offsets: Vec<[isize; 3]>,
    steps: Vec<f64>,
}

impl Adjacency {
    pub fn new(kind: AdjacencyKind) -> Self {
        let offsets: Vec<[isize; 3]> = match kind {
            AdjacencyKind::Four2d => vec![[-1, 0, 0], [1, 0, 0], [0, -1, 0], [0, 1, 0]],
            AdjacencyKind::Six3d => vec![
                [-1, 0, 0],
                [1, 0, 0],
                [0, -1, 0],
                [0, 1, 0],
                [0, 0, -1],
                [0, 0, 1],
            ],
        };
        let steps = offsets
            .iter()
            .map(|o| o.iter().map(|&d| (d * d) as f64).sum::<f64>().sqrt())
            .collect();
        Self { kind, offsets, steps }
    }

    pub fn for_ndim(ndim: usize) -> Self {
        if ndim == 3 {
            Self::new(AdjacencyKind::Six3d)
        } else {
            Self::new(AdjacencyKind::Four2d)
        }
    }

    pub fn kind(&self) -> AdjacencyKind {
        self.kind
    }

    pub fn offsets(&self) -> &[[isize; 3]] {
        &self.offsets
    }

    pub fn steps(&self) -> &[f64] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    /// Visits the in-bounds neighbours of the site at `index`.
    #[inline]
    pub fn for_each_neighbor(&self, dims: [usize; 3], index: usize, mut f: impl FnMut(usize, f64)) {
        let c = index_to_coord(dims, index);
        let strides = [1isize, dims[0] as isize, (dims[0] * dims[1]) as isize];
        for (o, &step) in self.offsets.iter().zip(&self.steps) {
            let mut delta = 0isize;
            let mut inside = true;
            for axis in 0..3 {
                let v = c[axis] as isize + o[axis];
                if v < 0 || v >= dims[axis] as isize {
                    inside = false;
                    break;
                }
                delta += o[axis] * strides[axis];
            }
            if inside {
                f((index as isize + delta) as usize, step);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat(dims: [usize; 3], three_d: bool) -> Lattice<f64> {
        let n = dims.iter().product();
        Lattice::from_lab(dims, three_d, vec![[50.0, 0.0, 0.0]; n], 3).unwrap()
    }

    #[test]
    fn interior_site_has_four_unit_neighbors() {
        let l = flat([3, 3, 1], false);
        let n = l.neighbors([1, 1, 0], &l.adjacency()).unwrap();
        assert_eq!(n.len(), 4);
        assert!(n.iter().all(|&(_, s)| s == 1.0));
    }

    #[test]
    fn corner_is_clipped() {
        let l = flat([3, 3, 1], false);
        let n = l.neighbors([0, 0, 0], &l.adjacency()).unwrap();
        let coords: Vec<Coord> = n.iter().map(|p| p.0).collect();
        assert_eq!(coords, vec![[1, 0, 0], [0, 1, 0]]);
    }

    #[test]
    fn interior_voxel_has_six_neighbors() {
        let l = flat([3, 3, 3], true);
        assert_eq!(l.neighbors([1, 1, 1], &l.adjacency()).unwrap().len(), 6);
    }

    #[test]
    fn out_of_bounds_site_is_rejected() {
        let l = flat([3, 3, 1], false);
        assert!(l.neighbors([3, 0, 0], &l.adjacency()).is_err());
    }

    #[test]
    fn offsets_are_symmetric() {
        for kind in [AdjacencyKind::Four2d, AdjacencyKind::Six3d] {
            let adj = Adjacency::new(kind);
            for o in adj.offsets() {
                assert!(adj.offsets().contains(&[-o[0], -o[1], -o[2]]));
            }
        }
        assert_eq!(Adjacency::new(AdjacencyKind::Four2d).len(), 4);
        assert_eq!(Adjacency::new(AdjacencyKind::Six3d).len(), 6);
    }

    #[test]
    fn neighbor_relation_is_symmetric_and_counts_match() {
        for (dims, three_d) in [([5, 4, 1], false), ([4, 3, 5], true)] {
            let l = flat(dims, three_d);
            let adj = l.adjacency();
            for i in 0..l.len() {
                let c = l.coord(i);
                let ns = l.neighbors(c, &adj).unwrap();
                let interior = (0..l.ndim()).all(|a| c[a] > 0 && c[a] + 1 < dims[a]);
                if interior {
                    assert_eq!(ns.len(), adj.len());
                } else {
                    assert!(ns.len() < adj.len());
                }
                for (n, _) in ns {
                    let back = l.neighbors(n, &adj).unwrap();
                    assert!(back.iter().any(|p| p.0 == c));
                }
            }
        }
    }

    #[test]
    fn index_coord_roundtrip_exhaustive() {
        let l = flat([7, 5, 3], true);
        for i in 0..l.len() {
            assert_eq!(l.index(l.coord(i)), i);
        }
    }

    #[test]
    fn rejects_bad_construction() {
        assert!(Lattice::<f64>::from_lab([2, 2, 1], false, vec![[0.0; 3]; 3], 3).is_err());
        assert!(Lattice::<f64>::from_lab([0, 2, 1], false, vec![], 3).is_err());
        assert!(Lattice::<f64>::from_lab([2, 2, 2], false, vec![[0.0; 3]; 8], 3).is_err());
        assert!(Lattice::<f64>::from_gray([2, 1, 1], false, &[0, 300], 255).is_err());
    }

    proptest::proptest! {
        #[test]
        fn index_coord_roundtrip_random(dx in 1usize..300, dy in 1usize..300, dz in 1usize..40, seed in 0usize..1_000_000) {
            let dims = [dx, dy, dz];
            let n = dx * dy * dz;
            let i = seed % n;
            let c = index_to_coord(dims, i);
            proptest::prop_assert_eq!(c[0] + dx * (c[1] + dy * c[2]), i);
        }
    }
}
