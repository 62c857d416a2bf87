//! Segmentation quality measures: boundary recall, undersegmentation error,
//! Dice overlap and majority object labeling.

use crate::error::{domain, IsfError, Result};
use crate::lattice::{index_to_coord, Adjacency};
use std::collections::{BTreeMap, HashMap};

/// Per-site labels over a lattice, x-fastest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMap {
    dims: [usize; 3],
    labels: Vec<u32>,
}

impl LabelMap {
    pub fn new(dims: [usize; 3], labels: Vec<u32>) -> Result<Self> {
        if dims.contains(&0) {
            return domain(format!("label map extents must be positive, got {dims:?}"));
        }
        if labels.len() != dims.iter().product::<usize>() {
            return domain(format!("expected {} labels, got {}", dims.iter().product::<usize>(), labels.len()));
        }
        Ok(Self { dims, labels })
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn max_label(&self) -> u32 {
        self.labels.iter().copied().max().unwrap_or(0)
    }

    pub fn is_3d(&self) -> bool {
        self.dims[2] > 1
    }

    pub fn adjacency(&self) -> Adjacency {
        Adjacency::for_ndim(if self.is_3d() { 3 } else { 2 })
    }

    /// Sites with an adjacent site of a different label.
    pub fn boundary_mask(&self) -> Vec<bool> {
        let adj = self.adjacency();
        (0..self.len())
            .map(|i| {
                let mut edge = false;
                adj.for_each_neighbor(self.dims, i, |n, _| edge |= self.labels[n] != self.labels[i]);
                edge
            })
            .collect()
    }

    /// Mask of sites carrying `label`.
    pub fn mask(&self, label: u32) -> Vec<bool> {
        self.labels.iter().map(|&l| l == label).collect()
    }
}

fn check_dims(a: &LabelMap, b: &LabelMap) -> Result<()> {
    if a.dims != b.dims {
        return Err(IsfError::DimensionMismatch { left: a.dims, right: b.dims });
    }
    Ok(())
}

/// Fraction of ground-truth boundary sites with a superpixel boundary site
/// within Chebyshev distance `radius`. 1.0 when the ground truth has no
/// boundary.
pub fn boundary_recall(labels: &LabelMap, gt: &LabelMap, radius: usize) -> Result<f64> {
    check_dims(labels, gt)?;
    let dims = labels.dims;
    let sp_edge = labels.boundary_mask();
    let gt_edge = gt.boundary_mask();
    let r = radius as isize;
    let rz = if labels.is_3d() { r } else { 0 };
    let (mut total, mut hit) = (0usize, 0usize);
    for (i, _) in gt_edge.iter().enumerate().filter(|(_, &e)| e) {
        total += 1;
        let c = index_to_coord(dims, i);
        let range = |v: usize, r: isize, d: usize| {
            (v as isize - r).max(0) as usize..=((v as isize + r).min(d as isize - 1)) as usize
        };
        let found = range(c[2], rz, dims[2]).any(|z| {
            range(c[1], r, dims[1]).any(|y| range(c[0], r, dims[0]).any(|x| sp_edge[x + dims[0] * (y + dims[1] * z)]))
        });
        if found {
            hit += 1;
        }
    }
    Ok(if total == 0 { 1.0 } else { hit as f64 / total as f64 })
}

/// `(1/N) * sum over superpixels P of min(|P ∩ G*|, |P \ G*|)`, where `G*`
/// is the ground-truth segment overlapping `P` the most (smallest label on
/// ties).
pub fn undersegmentation_error(labels: &LabelMap, gt: &LabelMap) -> Result<f64> {
    check_dims(labels, gt)?;
    let mut overlap: HashMap<u32, BTreeMap<u32, usize>> = HashMap::new();
    for (&s, &g) in labels.labels.iter().zip(&gt.labels) {
        *overlap.entry(s).or_default().entry(g).or_default() += 1;
    }
    let leak: usize = overlap
        .values()
        .map(|per_gt| {
            let size: usize = per_gt.values().sum();
            // max_by_key keeps the last maximum; iterate in reverse so the
            // smallest label wins ties.
            let inside = per_gt.iter().rev().max_by_key(|(_, &c)| c).map_or(0, |(_, &c)| c);
            inside.min(size - inside)
        })
        .sum();
    Ok(leak as f64 / labels.len() as f64)
}

/// `2|A ∩ B| / (|A| + |B|)`, 1.0 when both masks are empty.
pub fn dice(a: &[bool], b: &[bool]) -> Result<f64> {
    if a.len() != b.len() {
        return domain(format!("mask lengths differ: {} vs {}", a.len(), b.len()));
    }
    let (mut na, mut nb, mut both) = (0usize, 0usize, 0usize);
    for (&x, &y) in a.iter().zip(b) {
        na += x as usize;
        nb += y as usize;
        both += (x && y) as usize;
    }
    Ok(if na + nb == 0 { 1.0 } else { 2.0 * both as f64 / (na + nb) as f64 })
}

/// Assigns each supervoxel the object holding strictly more than half of
/// its sites, background (0) otherwise.
pub fn majority_object_labels(supervoxels: &LabelMap, objects: &LabelMap) -> Result<LabelMap> {
    check_dims(supervoxels, objects)?;
    let mut tally: HashMap<u32, HashMap<u32, usize>> = HashMap::new();
    let mut sizes: HashMap<u32, usize> = HashMap::new();
    for (&s, &o) in supervoxels.labels.iter().zip(&objects.labels) {
        *sizes.entry(s).or_default() += 1;
        if o != 0 {
            *tally.entry(s).or_default().entry(o).or_default() += 1;
        }
    }
    let winner: HashMap<u32, u32> = tally
        .iter()
        .filter_map(|(&s, per)| {
            let size = sizes[&s];
            per.iter().find(|(_, &c)| 2 * c > size).map(|(&o, _)| (s, o))
        })
        .collect();
    let out = supervoxels.labels.iter().map(|s| winner.get(s).copied().unwrap_or(0)).collect();
    LabelMap::new(supervoxels.dims, out)
}

/// Mean Dice over the non-zero ground-truth objects between each object and
/// the majority labeling of the superpixels. 1.0 when there are no objects.
pub fn object_dice(labels: &LabelMap, gt: &LabelMap) -> Result<f64> {
    let assigned = majority_object_labels(labels, gt)?;
    let mut objects: Vec<u32> = gt.labels.iter().copied().filter(|&o| o != 0).collect();
    objects.sort_unstable();
    objects.dedup();
    if objects.is_empty() {
        return Ok(1.0);
    }
    let mut sum = 0.0;
    for &o in &objects {
        sum += dice(&assigned.mask(o), &gt.mask(o))?;
    }
    Ok(sum / objects.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricResult {
    pub br: f64,
    pub ue: f64,
    pub dice: f64,
    pub superpixels: usize,
}

pub fn evaluate(labels: &LabelMap, gt: &LabelMap, br_radius: usize) -> Result<MetricResult> {
    let mut distinct: Vec<u32> = labels.labels.clone();
    distinct.sort_unstable();
    distinct.dedup();
    Ok(MetricResult {
        br: boundary_recall(labels, gt, br_radius)?,
        ue: undersegmentation_error(labels, gt)?,
        dice: object_dice(labels, gt)?,
        superpixels: distinct.len(),
    })
}

/// Mean isoperimetric quotient `4 pi A / P^2` over the labels of a 2D map;
/// the perimeter counts unit edges to other labels and to the image border.
pub fn mean_compactness(labels: &LabelMap) -> Result<f64> {
    if labels.is_3d() {
        return Err(IsfError::Unsupported("compactness is measured on 2D maps".into()));
    }
    let [w, h, _] = labels.dims;
    let mut area: BTreeMap<u32, usize> = BTreeMap::new();
    let mut perimeter: BTreeMap<u32, usize> = BTreeMap::new();
    for y in 0..h {
        for x in 0..w {
            let l = labels.labels[x + w * y];
            *area.entry(l).or_default() += 1;
            let mut edges = 0;
            for (dx, dy) in [(-1isize, 0isize), (1, 0), (0, -1), (0, 1)] {
                let (nx, ny) = (x as isize + dx, y as isize + dy);
                let outside = nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize;
                if outside || labels.labels[nx as usize + w * ny as usize] != l {
                    edges += 1;
                }
            }
            *perimeter.entry(l).or_default() += edges;
        }
    }
    let q: f64 = area
        .iter()
        .map(|(l, &a)| 4.0 * std::f64::consts::PI * a as f64 / (perimeter[l] as f64).powi(2))
        .sum();
    Ok(q / area.len() as f64)
}
