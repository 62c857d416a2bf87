//! Priority queues for the forest pass.
//!
//! All queues order by `(cost, stamp)`, where the stamp is a counter bumped
//! on every insertion or cost decrease. Equal costs therefore leave the
//! queue first-in-first-out, and the implementations below produce
//! identical extraction orders.

use crate::scalar::Scalar;
use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

pub trait ForestQueue<T> {
    /// Inserts `site`, or lowers its cost if it is already queued.
    fn push(&mut self, site: usize, cost: T);
    /// Removes the site with minimum `(cost, stamp)`.
    fn pop(&mut self) -> Option<usize>;
    fn is_empty(&self) -> bool;
}

#[derive(Debug, Clone, Copy)]
struct Entry<T> {
    cost: T,
    stamp: u64,
    site: usize,
}

impl<T: Scalar> Entry<T> {
    #[inline]
    fn key_cmp(&self, other: &Self) -> Ordering {
        self.cost
            .partial_cmp(&other.cost)
            .unwrap_or(Ordering::Equal)
            .then(self.stamp.cmp(&other.stamp))
    }
}

impl<T: Scalar> PartialEq for Entry<T> {
    fn eq(&self, other: &Self) -> bool {
        self.key_cmp(other) == Ordering::Equal
    }
}

impl<T: Scalar> Eq for Entry<T> {}

impl<T: Scalar> PartialOrd for Entry<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Scalar> Ord for Entry<T> {
    // Reversed: BinaryHeap is a max-heap.
    fn cmp(&self, other: &Self) -> Ordering {
        other.key_cmp(self)
    }
}

const POPPED: u64 = u64::MAX;

/// Binary heap with lazy deletion: a cost decrease pushes a fresh entry and
/// stale ones are skipped on extraction.
#[derive(Debug)]
pub struct LazyHeapQueue<T> {
    heap: BinaryHeap<Entry<T>>,
    live: Vec<u64>,
    next_stamp: u64,
    len: usize,
}

impl<T: Scalar> LazyHeapQueue<T> {
    pub fn new(sites: usize) -> Self {
        Self { heap: BinaryHeap::new(), live: vec![POPPED; sites], next_stamp: 0, len: 0 }
    }
}

impl<T: Scalar> ForestQueue<T> for LazyHeapQueue<T> {
    fn push(&mut self, site: usize, cost: T) {
        if self.live[site] == POPPED {
            self.len += 1;
        }
        let stamp = self.next_stamp;
        self.next_stamp += 1;
        self.live[site] = stamp;
        self.heap.push(Entry { cost, stamp, site });
    }

    fn pop(&mut self) -> Option<usize> {
        while let Some(e) = self.heap.pop() {
            if self.live[e.site] == e.stamp {
                self.live[e.site] = POPPED;
                self.len -= 1;
                return Some(e.site);
            }
        }
        None
    }

    fn is_empty(&self) -> bool {
        self.len == 0
    }
}

/// Binary heap with a position index and in-place decrease-key.
#[derive(Debug)]
pub struct IndexedHeapQueue<T> {
    heap: Vec<Entry<T>>,
    pos: Vec<usize>,
    next_stamp: u64,
}

const ABSENT: usize = usize::MAX;

impl<T: Scalar> IndexedHeapQueue<T> {
    pub fn new(sites: usize) -> Self {
        Self { heap: Vec::new(), pos: vec![ABSENT; sites], next_stamp: 0 }
    }

    #[inline]
    fn less(&self, a: usize, b: usize) -> bool {
        self.heap[a].key_cmp(&self.heap[b]) == Ordering::Less
    }

    fn swap(&mut self, a: usize, b: usize) {
        self.heap.swap(a, b);
        self.pos[self.heap[a].site] = a;
        self.pos[self.heap[b].site] = b;
    }

    fn sift_up(&mut self, mut i: usize) {
        while i > 0 {
            let parent = (i - 1) / 2;
            if !self.less(i, parent) {
                break;
            }
            self.swap(i, parent);
            i = parent;
        }
    }

    fn sift_down(&mut self, mut i: usize) {
        let n = self.heap.len();
        loop {
            let l = 2 * i + 1;
            let r = l + 1;
            let mut m = i;
            if l < n && self.less(l, m) {
                m = l;
            }
            if r < n && self.less(r, m) {
                m = r;
            }
            if m == i {
                break;
            }
            self.swap(i, m);
            i = m;
        }
    }
}

impl<T: Scalar> ForestQueue<T> for IndexedHeapQueue<T> {
    fn push(&mut self, site: usize, cost: T) {
        let stamp = self.next_stamp;
        self.next_stamp += 1;
        let i = match self.pos[site] {
            ABSENT => {
                self.heap.push(Entry { cost, stamp, site });
                let i = self.heap.len() - 1;
                self.pos[site] = i;
                i
            }
            i => {
                debug_assert!(cost <= self.heap[i].cost, "decrease-key must not raise a cost");
                self.heap[i].cost = cost;
                self.heap[i].stamp = stamp;
                i
            }
        };
        self.sift_up(i);
    }

    fn pop(&mut self) -> Option<usize> {
        if self.heap.is_empty() {
            return None;
        }
        let last = self.heap.len() - 1;
        self.swap(0, last);
        let e = self.heap.pop().expect("non-empty heap");
        self.pos[e.site] = ABSENT;
        if !self.heap.is_empty() {
            self.sift_down(0);
        }
        Some(e.site)
    }

    fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }
}

/// Bucket queue for integer costs in `[0, maxval]`.
///
/// Extraction is monotone: costs pushed after a pop must not fall below
/// the popped cost, which holds for non-decreasing path costs.
#[derive(Debug)]
pub struct BucketQueue {
    buckets: Vec<VecDeque<(usize, u64)>>,
    live: Vec<u64>,
    current: usize,
    next_stamp: u64,
    len: usize,
}

impl BucketQueue {
    pub fn new(sites: usize, maxval: u32) -> Self {
        Self {
            buckets: vec![VecDeque::new(); maxval as usize + 1],
            live: vec![POPPED; sites],
            current: 0,
            next_stamp: 0,
            len: 0,
        }
    }
}

impl<T: Scalar> ForestQueue<T> for BucketQueue {
    fn push(&mut self, site: usize, cost: T) {
        let b = cost.to_usize().expect("bucket queue needs non-negative integer costs");
        debug_assert!(b >= self.current, "bucket queue requires monotone costs");
        if self.live[site] == POPPED {
            self.len += 1;
        }
        let stamp = self.next_stamp;
        self.next_stamp += 1;
        self.live[site] = stamp;
        self.buckets[b].push_back((site, stamp));
    }

    fn pop(&mut self) -> Option<usize> {
        if self.len == 0 {
            return None;
        }
        while self.current < self.buckets.len() {
            while let Some((site, stamp)) = self.buckets[self.current].pop_front() {
                if self.live[site] == stamp {
                    self.live[site] = POPPED;
                    self.len -= 1;
                    return Some(site);
                }
            }
            self.current += 1;
        }
        None
    }

    fn is_empty(&self) -> bool {
        self.len == 0
    }
}

/// Radix heap over the bit patterns of non-negative costs, with lazy
/// deletion.
///
/// Like [`BucketQueue`] it needs monotone extraction: pushed costs must not
/// fall below the last popped cost. Bucket `i > 0` holds entries whose key
/// first differs from the last popped key at bit `i - 1`; every bucket keeps
/// its entries in stamp order, so equal costs still leave first-in-first-out.
#[derive(Debug)]
pub struct RadixQueue {
    buckets: Vec<Vec<(u64, u64, usize)>>,
    head: usize,
    last: u64,
    live: Vec<u64>,
    next_stamp: u64,
    len: usize,
}

impl RadixQueue {
    pub fn new(sites: usize) -> Self {
        Self { buckets: vec![Vec::new(); 65], head: 0, last: 0, live: vec![POPPED; sites], next_stamp: 0, len: 0 }
    }

    #[inline]
    fn bucket(&self, key: u64) -> usize {
        (64 - (key ^ self.last).leading_zeros()) as usize
    }

    /// Moves the live entries of the first non-empty bucket down, keyed
    /// against their minimum. Returns `false` when nothing is left.
    fn refill(&mut self) -> bool {
        self.buckets[0].clear();
        self.head = 0;
        loop {
            let Some(i) = (1..self.buckets.len()).find(|&i| !self.buckets[i].is_empty()) else {
                return false;
            };
            let mut entries = std::mem::take(&mut self.buckets[i]);
            entries.retain(|&(_, stamp, site)| self.live[site] == stamp);
            let Some(min) = entries.iter().map(|e| e.0).min() else {
                self.buckets[i] = entries;
                continue;
            };
            self.last = min;
            for &e in &entries {
                let b = self.bucket(e.0);
                self.buckets[b].push(e);
            }
            entries.clear();
            self.buckets[i] = entries;
            return true;
        }
    }
}

impl<T: Scalar> ForestQueue<T> for RadixQueue {
    fn push(&mut self, site: usize, cost: T) {
        let key = cost.order_bits();
        debug_assert!(key >= self.last, "radix queue requires monotone costs");
        if self.live[site] == POPPED {
            self.len += 1;
        }
        let stamp = self.next_stamp;
        self.next_stamp += 1;
        self.live[site] = stamp;
        let b = self.bucket(key);
        self.buckets[b].push((key, stamp, site));
    }

    fn pop(&mut self) -> Option<usize> {
        if self.len == 0 {
            return None;
        }
        loop {
            while let Some(&(_, stamp, site)) = self.buckets[0].get(self.head) {
                self.head += 1;
                if self.live[site] == stamp {
                    self.live[site] = POPPED;
                    self.len -= 1;
                    return Some(site);
                }
            }
            if !self.refill() {
                return None;
            }
        }
    }

    fn is_empty(&self) -> bool {
        self.len == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn drain<Q: ForestQueue<f64>>(q: &mut Q) -> Vec<usize> {
        std::iter::from_fn(|| q.pop()).collect()
    }

    #[test]
    fn fifo_among_equal_costs() {
        let mut q = LazyHeapQueue::<f64>::new(4);
        for s in [2, 0, 3, 1] {
            q.push(s, 1.0);
        }
        assert_eq!(drain(&mut q), vec![2, 0, 3, 1]);
    }

    #[test]
    fn decrease_key_counts_as_fresh_insertion() {
        let mut a = LazyHeapQueue::<f64>::new(3);
        let mut b = IndexedHeapQueue::<f64>::new(3);
        let mut c = BucketQueue::new(3, 9);
        let mut d = RadixQueue::new(3);
        for q in [&mut a as &mut dyn ForestQueue<f64>, &mut b, &mut c, &mut d] {
            q.push(0, 5.0);
            q.push(1, 3.0);
            q.push(2, 5.0);
            q.push(0, 3.0);
            assert!(!q.is_empty());
        }
        assert_eq!(drain(&mut a), vec![1, 0, 2]);
        assert_eq!(drain(&mut b), vec![1, 0, 2]);
        assert_eq!(drain(&mut c), vec![1, 0, 2]);
        assert_eq!(drain(&mut d), vec![1, 0, 2]);
        assert!(ForestQueue::<f64>::is_empty(&c));
    }

    // Random monotone workloads: interleave pops with pushes at or above the
    // last popped key, including decreases of queued sites.
    #[test]
    fn implementations_agree_on_monotone_workloads() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let n = 40;
            let mut lazy = LazyHeapQueue::<f64>::new(n);
            let mut indexed = IndexedHeapQueue::<f64>::new(n);
            let mut bucket = BucketQueue::new(n, 64);
            let mut radix = RadixQueue::new(n);
            let mut cost = vec![f64::INFINITY; n];
            let mut done = vec![false; n];
            let mut floor = 0u32;
            let (mut oa, mut ob, mut oc) = (vec![], vec![], vec![]);
            for _ in 0..200 {
                if rng.gen_bool(0.6) {
                    let s = rng.gen_range(0..n);
                    let c = (floor + rng.gen_range(0..6)).min(64) as f64;
                    if !done[s] && c < cost[s] {
                        cost[s] = c;
                        lazy.push(s, c);
                        indexed.push(s, c);
                        ForestQueue::<f64>::push(&mut bucket, s, c);
                        radix.push(s, c);
                    }
                } else {
                    let a = lazy.pop();
                    let b = indexed.pop();
                    let c = ForestQueue::<f64>::pop(&mut bucket);
                    assert_eq!(a, b);
                    assert_eq!(a, c);
                    assert_eq!(a, ForestQueue::<f64>::pop(&mut radix));
                    if let Some(s) = a {
                        done[s] = true;
                        floor = cost[s] as u32;
                        oa.push(s);
                        ob.push(s);
                        oc.push(s);
                    }
                }
            }
            oa.extend(drain(&mut lazy));
            ob.extend(drain(&mut indexed));
            oc.extend(std::iter::from_fn(|| ForestQueue::<f64>::pop(&mut bucket)));
            let od: Vec<usize> = std::iter::from_fn(|| ForestQueue::<f64>::pop(&mut radix)).collect();
            assert_eq!(oa, ob);
            assert_eq!(oa, oc);
            assert_eq!(oa[oa.len() - od.len()..], od[..]);
        }
    }

    // Real-valued monotone workloads spanning many binades, for the heaps
    // and the radix queue.
    #[test]
    fn radix_matches_heaps_on_real_costs() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let n = 60;
            let mut lazy = LazyHeapQueue::<f64>::new(n);
            let mut indexed = IndexedHeapQueue::<f64>::new(n);
            let mut radix = RadixQueue::new(n);
            let mut cost = vec![f64::INFINITY; n];
            let mut done = vec![false; n];
            let mut floor = 0.0f64;
            for _ in 0..400 {
                if rng.gen_bool(0.6) {
                    let s = rng.gen_range(0..n);
                    let c = match rng.gen_range(0..4) {
                        0 => floor,
                        1 => floor + 1.0,
                        _ => floor + rng.gen_range(0.0..1e3f64).powi(rng.gen_range(1..6)),
                    };
                    if !done[s] && c < cost[s] {
                        cost[s] = c;
                        lazy.push(s, c);
                        indexed.push(s, c);
                        ForestQueue::<f64>::push(&mut radix, s, c);
                    }
                } else {
                    let a = lazy.pop();
                    assert_eq!(a, indexed.pop());
                    assert_eq!(a, ForestQueue::<f64>::pop(&mut radix));
                    if let Some(s) = a {
                        done[s] = true;
                        floor = cost[s];
                    }
                }
            }
            let rest: Vec<usize> = drain(&mut lazy);
            assert_eq!(rest, std::iter::from_fn(|| ForestQueue::<f64>::pop(&mut radix)).collect::<Vec<_>>());
        }
    }
}
