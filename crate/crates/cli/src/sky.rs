//! Sky extraction: merge superpixels whose mean colors are within a Lab
//! threshold over the region adjacency graph, then keep the largest merged
//! region that touches the top image row.

use isf_core::{LabelMap, Lattice, Result, Scalar};
use isf_core::error::IsfError;

struct DisjointSet {
    parent: Vec<usize>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    // The smaller root wins so the representative is deterministic.
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// Mean Lab color per label, indexed by label.
pub fn mean_colors<T: Scalar>(lattice: &Lattice<T>, labels: &LabelMap) -> Vec<[f64; 3]> {
    let k = labels.max_label() as usize;
    let mut sum = vec![[0.0f64; 3]; k + 1];
    let mut count = vec![0usize; k + 1];
    for (i, &l) in labels.labels().iter().enumerate() {
        let c = lattice.color(i);
        for a in 0..3 {
            sum[l as usize][a] += c[a].as_f64();
        }
        count[l as usize] += 1;
    }
    sum.iter()
        .zip(&count)
        .map(|(s, &n)| if n == 0 { [0.0; 3] } else { s.map(|v| v / n as f64) })
        .collect()
}

/// Sky mask for a 2D segmentation; always non-empty since the top row is
/// covered by some region.
pub fn sky_mask<T: Scalar>(lattice: &Lattice<T>, labels: &LabelMap, threshold: f64) -> Result<Vec<bool>> {
    if lattice.is_3d() || labels.is_3d() {
        return Err(IsfError::Unsupported("sky extraction needs a 2D image".into()));
    }
    if lattice.dims() != labels.dims() {
        return Err(IsfError::DimensionMismatch { left: lattice.dims(), right: labels.dims() });
    }
    let [w, h, _] = labels.dims();
    let means = mean_colors(lattice, labels);
    let dist = |a: usize, b: usize| {
        let (x, y) = (means[a], means[b]);
        ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2) + (x[2] - y[2]).powi(2)).sqrt()
    };
    let l = labels.labels();
    let mut sets = DisjointSet::new(means.len());
    for y in 0..h {
        for x in 0..w {
            let a = l[x + w * y] as usize;
            for (nx, ny) in [(x + 1, y), (x, y + 1)] {
                if nx < w && ny < h {
                    let b = l[nx + w * ny] as usize;
                    if a != b && dist(a, b) <= threshold {
                        sets.union(a, b);
                    }
                }
            }
        }
    }
    let region: Vec<usize> = l.iter().map(|&s| sets.find(s as usize)).collect();
    let mut size = vec![0usize; means.len()];
    for &r in &region {
        size[r] += 1;
    }
    // Candidates in top-row order; strictly larger wins, so ties keep the leftmost.
    let mut best: Option<usize> = None;
    for &r in &region[..w] {
        if best.is_none_or(|b| size[r] > size[b]) {
            best = Some(r);
        }
    }
    let sky = best.expect("top row is non-empty");
    Ok(region.iter().map(|&r| r == sky).collect())
}
