//! Gradient image and regional minima.
//!
//! The gradient of a site is the largest Lab distance to any of its
//! neighbours, linearly quantized against the image-wide maximum. Regional
//! minima are maximal connected plateaus with no strictly lower neighbour.

use crate::error::{domain, Result};
use crate::lattice::{index_to_coord, Adjacency, Coord, Lattice};
use crate::scalar::{dist3, Scalar};

/// Default number of quantization levels.
pub const DEFAULT_LEVELS: u32 = 256;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradientMap {
    dims: [usize; 3],
    values: Vec<u32>,
    maxval: u32,
}

impl GradientMap {
    pub fn new(dims: [usize; 3], values: Vec<u32>, maxval: u32) -> Result<Self> {
        if maxval == 0 {
            return domain("gradient maxval must be positive");
        }
        if values.len() != dims.iter().product::<usize>() {
            return domain("gradient values do not match dims");
        }
        if values.iter().any(|&v| v > maxval) {
            return domain("gradient value above maxval");
        }
        Ok(Self { dims, values, maxval })
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    #[inline]
    pub fn value(&self, index: usize) -> u32 {
        self.values[index]
    }

    pub fn maxval(&self) -> u32 {
        self.maxval
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Max-neighbour Lab distance, quantized to `[0, levels - 1]`.
pub fn gradient_map<T: Scalar>(lattice: &Lattice<T>, adj: &Adjacency, levels: u32) -> Result<GradientMap> {
    if levels < 2 {
        return domain(format!("gradient needs at least 2 levels, got {levels}"));
    }
    let dims = lattice.dims();
    let raw: Vec<f64> = (0..lattice.len())
        .map(|i| {
            let c = lattice.color(i);
            let mut best = 0.0f64;
            adj.for_each_neighbor(dims, i, |n, _| {
                best = best.max(dist3(c, lattice.color(n)).as_f64());
            });
            best
        })
        .collect();
    let top = raw.iter().cloned().fold(0.0f64, f64::max);
    let maxval = levels - 1;
    let values = if top > 0.0 {
        raw.iter()
            .map(|&v| ((v / top) * maxval as f64).round().min(maxval as f64) as u32)
            .collect()
    } else {
        vec![0; raw.len()]
    };
    GradientMap::new(dims, values, maxval)
}

/// Regional minima of a gradient map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinimaSet {
    dims: [usize; 3],
    /// Member site indices per plateau, ascending.
    components: Vec<Vec<usize>>,
    /// Lexicographically smallest coordinate per plateau.
    representatives: Vec<Coord>,
}

impl MinimaSet {
    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    pub fn representatives(&self) -> &[Coord] {
        &self.representatives
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }
}

/// Finds every maximal equal-valued connected plateau with no strictly
/// lower neighbour. Components are returned in scan order of their first site.
pub fn regional_minima(grad: &GradientMap, adj: &Adjacency) -> MinimaSet {
    let dims = grad.dims();
    let n = grad.len();
    let mut seen = vec![false; n];
    let mut components = Vec::new();
    let mut representatives = Vec::new();
    let mut stack = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let level = grad.value(start);
        let mut members = vec![start];
        let mut is_minimum = true;
        seen[start] = true;
        stack.push(start);
        while let Some(s) = stack.pop() {
            adj.for_each_neighbor(dims, s, |t, _| {
                let v = grad.value(t);
                if v < level {
                    is_minimum = false;
                } else if v == level && !seen[t] {
                    seen[t] = true;
                    members.push(t);
                    stack.push(t);
                }
            });
        }
        if is_minimum {
            members.sort_unstable();
            let rep = members.iter().map(|&i| index_to_coord(dims, i)).min().expect("non-empty plateau");
            representatives.push(rep);
            components.push(members);
        }
    }
    MinimaSet { dims, components, representatives }
}

/// Representative of the regional minimum nearest to `site`.
///
/// Distance to a minimum is the Euclidean distance to its nearest member;
/// ties go to the lexicographically smallest representative.
pub fn closest_minimum(site: Coord, minima: &MinimaSet) -> Result<Coord> {
    if minima.is_empty() {
        return domain("closest_minimum on an empty minima set");
    }
    let dims = minima.dims;
    let sq = |a: Coord, b: Coord| -> usize { (0..3).map(|k| a[k].abs_diff(b[k]).pow(2)).sum() };
    let mut best: Option<(usize, Coord)> = None;
    for (members, &rep) in minima.components.iter().zip(&minima.representatives) {
        let d = members
            .iter()
            .map(|&m| sq(index_to_coord(dims, m), site))
            .min()
            .expect("non-empty component");
        let better = match best {
            None => true,
            Some((bd, brep)) => d < bd || (d == bd && rep < brep),
        };
        if better {
            best = Some((d, rep));
        }
    }
    Ok(best.expect("non-empty minima").1)
}
