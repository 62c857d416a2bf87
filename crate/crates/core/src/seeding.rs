//! Seed selection (grid, mixed quad-tree, regional minima) and the
//! per-iteration seed recomputation.

use crate::error::{domain, IsfError, Result};
use crate::forest::ForestState;
use crate::gradient::{closest_minimum, GradientMap, MinimaSet};
use crate::lattice::{Coord, Lattice};
use crate::scalar::{dist3, Scalar};
use std::collections::HashSet;

/// Ordered seeds; seed `j` (0-based) carries label `j + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedSet<T = f64> {
    seeds: Vec<Coord>,
    ref_colors: Vec<[T; 3]>,
}

impl<T: Scalar> SeedSet<T> {
    /// Validates bounds, distinctness and matching lengths.
    pub fn new(lattice: &Lattice<T>, seeds: Vec<Coord>, ref_colors: Vec<[T; 3]>) -> Result<Self> {
        if seeds.is_empty() {
            return domain("seed set must not be empty");
        }
        if seeds.len() != ref_colors.len() {
            return domain("seed and reference color counts differ");
        }
        let mut seen = HashSet::with_capacity(seeds.len());
        for &s in &seeds {
            lattice.checked_index(s)?;
            if !seen.insert(s) {
                return domain(format!("duplicate seed {s:?}"));
            }
        }
        Ok(Self { seeds, ref_colors })
    }

    /// Seeds whose reference colors are their own site colors.
    pub fn at_sites(lattice: &Lattice<T>, seeds: Vec<Coord>) -> Result<Self> {
        for &s in &seeds {
            lattice.checked_index(s)?;
        }
        let colors = seeds.iter().map(|&s| *lattice.color(lattice.index(s))).collect();
        Self::new(lattice, seeds, colors)
    }

    pub fn seeds(&self) -> &[Coord] {
        &self.seeds
    }

    pub fn ref_colors(&self) -> &[[T; 3]] {
        &self.ref_colors
    }

    pub fn len(&self) -> usize {
        self.seeds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seeds.is_empty()
    }

    /// Label of the seed at position `j`.
    pub fn label(&self, j: usize) -> u32 {
        j as u32 + 1
    }
}

/// Largest integer spacing `s` with `s^ndim * k <= n`, at least 1.
fn grid_spacing(n: usize, k: usize, ndim: usize) -> usize {
    let mut s = 1usize;
    while (s + 1).pow(ndim as u32) * k <= n {
        s += 1;
    }
    s
}

/// Cell centers of a regular grid over a box, in x-fastest scan order.
fn grid_cells(origin: Coord, extent: [usize; 3], ndim: usize, spacing: usize) -> Vec<Coord> {
    let mut per_axis: Vec<Vec<usize>> = Vec::with_capacity(3);
    for axis in 0..3 {
        let len = extent[axis];
        let cells = if axis < ndim { (len / spacing).max(1) } else { 1 };
        per_axis.push(
            (0..cells)
                .map(|i| {
                    let lo = i * len / cells;
                    let hi = (i + 1) * len / cells;
                    origin[axis] + (lo + hi) / 2
                })
                .collect(),
        );
    }
    let mut out = Vec::with_capacity(per_axis.iter().map(Vec::len).product());
    for &z in &per_axis[2] {
        for &y in &per_axis[1] {
            for &x in &per_axis[0] {
                out.push([x, y, z]);
            }
        }
    }
    out
}

/// Regular grid sampling with spacing `floor((N/k)^(1/d))`.
///
/// Cells beyond `k` in scan order are dropped, so the result never exceeds
/// `k` but may fall short of it when the extents divide poorly.
pub fn grid_sample<T: Scalar>(lattice: &Lattice<T>, k: usize) -> Result<SeedSet<T>> {
    let n = lattice.len();
    if k == 0 || k > n {
        return domain(format!("grid sampling needs 1 <= k <= {n}, got {k}"));
    }
    let spacing = grid_spacing(n, k, lattice.ndim());
    let mut cells = grid_cells([0, 0, 0], lattice.dims(), lattice.ndim(), spacing);
    cells.truncate(k);
    SeedSet::at_sites(lattice, cells)
}

/// Normalized Shannon entropy of a histogram, using the number of occupied
/// bins as the level count. A single occupied bin gives 0.
pub fn nse(histogram: &[usize]) -> Result<f64> {
    let total: usize = histogram.iter().sum();
    if total == 0 {
        return domain("entropy of an empty histogram");
    }
    let occupied = histogram.iter().filter(|&&c| c > 0).count();
    if occupied <= 1 {
        return Ok(0.0);
    }
    let total = total as f64;
    let h: f64 = histogram
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / total;
            -p * p.log2()
        })
        .sum();
    Ok((h / (occupied as f64).log2()).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Quadrant {
    pub origin: [usize; 2],
    pub extent: [usize; 2],
    pub nse: f64,
}

impl Quadrant {
    pub fn area(&self) -> usize {
        self.extent[0] * self.extent[1]
    }
}

/// Two-level quad-tree over lightness entropy.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadTreeStats {
    pub first_level: Vec<Quadrant>,
    /// Which first-level quadrants were subdivided.
    pub split: Vec<bool>,
    pub mu: f64,
    pub sigma: f64,
    /// Leaves in scan order: unsplit first-level quadrants, or the children
    /// of split ones in place of their parent.
    pub leaves: Vec<Quadrant>,
}

fn lightness_bin<T: Scalar>(l: T) -> usize {
    (l.as_f64() / 100.0 * 255.0).round().clamp(0.0, 255.0) as usize
}

fn quadrant_nse<T: Scalar>(lattice: &Lattice<T>, origin: [usize; 2], extent: [usize; 2]) -> f64 {
    let mut hist = [0usize; 256];
    for y in origin[1]..origin[1] + extent[1] {
        for x in origin[0]..origin[0] + extent[0] {
            hist[lightness_bin(lattice.color(lattice.index([x, y, 0]))[0])] += 1;
        }
    }
    nse(&hist).unwrap_or(0.0)
}

fn split_box(origin: [usize; 2], extent: [usize; 2]) -> Vec<([usize; 2], [usize; 2])> {
    let w0 = extent[0] / 2;
    let h0 = extent[1] / 2;
    let xs = [(origin[0], w0), (origin[0] + w0, extent[0] - w0)];
    let ys = [(origin[1], h0), (origin[1] + h0, extent[1] - h0)];
    let mut out = Vec::with_capacity(4);
    for &(y, h) in &ys {
        for &(x, w) in &xs {
            if w > 0 && h > 0 {
                out.push(([x, y], [w, h]));
            }
        }
    }
    out
}

/// Builds the two-level quad-tree. A first-level quadrant splits when
/// `|NSE(Q) - mean| > std` over the first-level values.
pub fn quad_tree_stats<T: Scalar>(lattice: &Lattice<T>) -> Result<QuadTreeStats> {
    if lattice.is_3d() {
        return Err(IsfError::Unsupported("mixed sampling is defined for 2D images only".into()));
    }
    let d = lattice.dims();
    let first_level: Vec<Quadrant> = split_box([0, 0], [d[0], d[1]])
        .into_iter()
        .map(|(origin, extent)| Quadrant { origin, extent, nse: quadrant_nse(lattice, origin, extent) })
        .collect();
    let count = first_level.len() as f64;
    let mu = first_level.iter().map(|q| q.nse).sum::<f64>() / count;
    let sigma = (first_level.iter().map(|q| (q.nse - mu).powi(2)).sum::<f64>() / count).sqrt();
    let mut split = Vec::with_capacity(first_level.len());
    let mut leaves = Vec::new();
    for q in &first_level {
        let s = (q.nse - mu).abs() > sigma;
        split.push(s);
        if s {
            leaves.extend(split_box(q.origin, q.extent).into_iter().map(|(origin, extent)| Quadrant {
                origin,
                extent,
                nse: quadrant_nse(lattice, origin, extent),
            }));
        } else {
            leaves.push(q.clone());
        }
    }
    Ok(QuadTreeStats { first_level, split, mu, sigma, leaves })
}

/// Splits `k` seeds across leaves proportionally to `weights`.
///
/// Largest-remainder rounding makes the total exactly `k`; every leaf gets
/// at least one seed when `k >= leaves`; no leaf gets more than its capacity.
/// An all-zero weight vector falls back to equal shares.
pub fn allocate_seeds(weights: &[f64], capacities: &[usize], k: usize) -> Result<Vec<usize>> {
    let leaves = weights.len();
    if leaves == 0 || capacities.len() != leaves {
        return domain("allocation needs one capacity per non-empty weight list");
    }
    if k > capacities.iter().sum::<usize>() {
        return domain("more seeds requested than sites available");
    }
    let sum: f64 = weights.iter().sum();
    let w: Vec<f64> = if sum > 0.0 { weights.to_vec() } else { vec![1.0; leaves] };
    let total: f64 = w.iter().sum();
    let quotas: Vec<f64> = w.iter().map(|&x| k as f64 * x / total).collect();
    let mut alloc: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let mut rest = k - alloc.iter().sum::<usize>();
    let mut order: Vec<usize> = (0..leaves).collect();
    order.sort_by(|&a, &b| {
        let fa = quotas[a] - quotas[a].floor();
        let fb = quotas[b] - quotas[b].floor();
        fb.partial_cmp(&fa).unwrap().then(a.cmp(&b))
    });
    for &i in order.iter().cycle() {
        if rest == 0 {
            break;
        }
        alloc[i] += 1;
        rest -= 1;
    }

    if k >= leaves {
        while let Some(empty) = (0..leaves).find(|&i| alloc[i] == 0 && capacities[i] > 0) {
            let donor = (0..leaves)
                .filter(|&i| alloc[i] > 1)
                .max_by(|&a, &b| alloc[a].cmp(&alloc[b]).then(b.cmp(&a)))
                .expect("some leaf holds more than one seed");
            alloc[donor] -= 1;
            alloc[empty] += 1;
        }
    }

    while let Some(over) = (0..leaves).find(|&i| alloc[i] > capacities[i]) {
        let excess = alloc[over] - capacities[over];
        alloc[over] = capacities[over];
        for _ in 0..excess {
            let target = (0..leaves)
                .filter(|&i| alloc[i] < capacities[i])
                .max_by(|&a, &b| w[a].partial_cmp(&w[b]).unwrap().then(b.cmp(&a)))
                .expect("capacity remains");
            alloc[target] += 1;
        }
    }
    Ok(alloc)
}

/// Exactly `count` grid-spread sites inside a leaf box.
fn fill_leaf(origin: [usize; 2], extent: [usize; 2], count: usize) -> Vec<Coord> {
    if count == 0 {
        return Vec::new();
    }
    let area = extent[0] * extent[1];
    let mut spacing = grid_spacing(area, count, 2);
    let cells = loop {
        let cells = grid_cells([origin[0], origin[1], 0], [extent[0], extent[1], 1], 2, spacing);
        if cells.len() >= count || spacing == 1 {
            break cells;
        }
        spacing -= 1;
    };
    let total = cells.len();
    (0..count).map(|i| cells[i * total / count]).collect()
}

/// Mixed sampling: entropy-weighted seed allocation over a two-level
/// quad-tree, with local grid sampling inside each leaf.
pub fn mixed_sample<T: Scalar>(lattice: &Lattice<T>, k: usize) -> Result<SeedSet<T>> {
    if lattice.is_3d() {
        return Err(IsfError::Unsupported("mixed sampling is defined for 2D images only".into()));
    }
    let n = lattice.len();
    if k < 4 || k > n {
        return domain(format!("mixed sampling needs 4 <= k <= {n}, got {k}"));
    }
    let tree = quad_tree_stats(lattice)?;
    let weights: Vec<f64> = tree.leaves.iter().map(|q| q.nse).collect();
    let caps: Vec<usize> = tree.leaves.iter().map(Quadrant::area).collect();
    let alloc = allocate_seeds(&weights, &caps, k)?;
    let seeds: Vec<Coord> = tree
        .leaves
        .iter()
        .zip(&alloc)
        .flat_map(|(q, &c)| fill_leaf(q.origin, q.extent, c))
        .collect();
    SeedSet::at_sites(lattice, seeds)
}

/// Grid seeds moved onto their closest regional minimum; seeds landing on
/// the same minimum collapse to one, so the result may hold fewer than `k`.
pub fn regmin_seeds<T: Scalar>(
    lattice: &Lattice<T>,
    k: usize,
    grad: &GradientMap,
    minima: &MinimaSet,
) -> Result<SeedSet<T>> {
    if grad.dims() != lattice.dims() || minima.dims() != lattice.dims() {
        return Err(IsfError::DimensionMismatch { left: lattice.dims(), right: grad.dims() });
    }
    let grid = grid_sample(lattice, k)?;
    let mut seen = HashSet::new();
    let mut seeds = Vec::with_capacity(grid.len());
    for &s in grid.seeds() {
        let m = closest_minimum(s, minima)?;
        if seen.insert(m) {
            seeds.push(m);
        }
    }
    SeedSet::at_sites(lattice, seeds)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RecomputePolicy {
    /// Member whose color is closest to the superpixel's mean color.
    ColorMedoid,
    /// Member closest to the superpixel's geometric center.
    CenterMedoid,
}

/// Per-superpixel statistics gathered during recomputation.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedUpdateStats<T = f64> {
    pub mean_color: [T; 3],
    pub center: [T; 3],
    /// Mean color distance of members to the current seed.
    pub mu_c: T,
    /// Mean spatial distance of members to the current seed.
    pub mu_s: T,
    pub candidate: Coord,
    pub replaced: bool,
}

fn position<T: Scalar>(c: Coord) -> [T; 3] {
    [T::of_usize(c[0]), T::of_usize(c[1]), T::of_usize(c[2])]
}

/// Recomputes seeds from a completed forest; see [`recompute_seeds_with_stats`].
pub fn recompute_seeds<T: Scalar>(
    forest: &ForestState<T>,
    lattice: &Lattice<T>,
    prev: &SeedSet<T>,
    policy: RecomputePolicy,
) -> Result<SeedSet<T>> {
    recompute_seeds_with_stats(forest, lattice, prev, policy).map(|(s, _)| s)
}

/// For each superpixel, picks the medoid candidate under `policy` and moves
/// the seed there only when the candidate is farther than `sqrt(mu_c)` in
/// color or `sqrt(mu_s)` in space from the current seed. Reference colors
/// become the superpixel mean colors.
pub fn recompute_seeds_with_stats<T: Scalar>(
    forest: &ForestState<T>,
    lattice: &Lattice<T>,
    prev: &SeedSet<T>,
    policy: RecomputePolicy,
) -> Result<(SeedSet<T>, Vec<SeedUpdateStats<T>>)> {
    let k = prev.len();
    let labels = forest.labels();
    if labels.len() != lattice.len() {
        return Err(IsfError::Consistency("forest and lattice sizes differ".into()));
    }
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (i, &l) in labels.iter().enumerate() {
        if l == 0 || l as usize > k {
            return Err(IsfError::Consistency(format!("site {i} carries label {l} outside 1..={k}")));
        }
        members[l as usize - 1].push(i);
    }
    let mut seeds = Vec::with_capacity(k);
    let mut colors = Vec::with_capacity(k);
    let mut stats = Vec::with_capacity(k);
    for (j, sites) in members.iter().enumerate() {
        if sites.is_empty() {
            return Err(IsfError::Consistency(format!("label {} has no sites", j + 1)));
        }
        let seed = prev.seeds()[j];
        let seed_idx = lattice.index(seed);
        if labels[seed_idx] as usize != j + 1 {
            return Err(IsfError::Consistency(format!("seed {seed:?} lies outside superpixel {}", j + 1)));
        }
        let count = T::of_usize(sites.len());
        let mut mean = [T::zero(); 3];
        let mut center = [T::zero(); 3];
        for &i in sites {
            let c = lattice.color(i);
            let p: [T; 3] = position(lattice.coord(i));
            for a in 0..3 {
                mean[a] = mean[a] + c[a];
                center[a] = center[a] + p[a];
            }
        }
        for a in 0..3 {
            mean[a] = mean[a] / count;
            center[a] = center[a] / count;
        }
        let seed_color = *lattice.color(seed_idx);
        let seed_pos: [T; 3] = position(seed);
        let mut sum_c = T::zero();
        let mut sum_s = T::zero();
        let mut candidate: Option<(T, Coord)> = None;
        for &i in sites {
            let c = lattice.color(i);
            let coord = lattice.coord(i);
            let p: [T; 3] = position(coord);
            sum_c = sum_c + dist3(c, &seed_color);
            sum_s = sum_s + dist3(&p, &seed_pos);
            let score = match policy {
                RecomputePolicy::ColorMedoid => dist3(c, &mean),
                RecomputePolicy::CenterMedoid => dist3(&p, &center),
            };
            let better = match candidate {
                None => true,
                Some((best, bc)) => score < best || (score == best && coord < bc),
            };
            if better {
                candidate = Some((score, coord));
            }
        }
        let mu_c = sum_c / count;
        let mu_s = sum_s / count;
        let cand = candidate.expect("non-empty superpixel").1;
        let cand_idx = lattice.index(cand);
        let color_jump = dist3(lattice.color(cand_idx), &seed_color);
        let space_jump = dist3(&position::<T>(cand), &seed_pos);
        let replaced = color_jump > mu_c.sqrt() || space_jump > mu_s.sqrt();
        seeds.push(if replaced { cand } else { seed });
        colors.push(mean);
        stats.push(SeedUpdateStats { mean_color: mean, center, mu_c, mu_s, candidate: cand, replaced });
    }
    Ok((SeedSet::new(lattice, seeds, colors)?, stats))
}
