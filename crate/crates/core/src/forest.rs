//! A single seeded image-foresting pass, forest verification and the
//! cost functional.

use crate::connectivity::{reference_colors, CostVariant, PathCostSpec};
use crate::error::{domain, IsfError, Result};
use crate::lattice::{Adjacency, Lattice};
use crate::queue::{BucketQueue, ForestQueue, IndexedHeapQueue, LazyHeapQueue, RadixQueue};
use crate::scalar::Scalar;
use crate::seeding::SeedSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeState {
    /// Never queued.
    White,
    /// Queued.
    Gray,
    /// Removed from the queue; its cost is final.
    Black,
}

/// Cost, predecessor, root, label and queue-state maps of one pass.
#[derive(Debug, Clone, PartialEq)]
pub struct ForestState<T = f64> {
    dims: [usize; 3],
    cost: Vec<T>,
    predecessor: Vec<Option<usize>>,
    root: Vec<usize>,
    label: Vec<u32>,
    state: Vec<NodeState>,
}

impl<T: Scalar> ForestState<T> {
    fn reset(dims: [usize; 3]) -> Self {
        let n = dims.iter().product();
        Self {
            dims,
            cost: vec![T::infinity(); n],
            predecessor: vec![None; n],
            root: (0..n).collect(),
            label: vec![0; n],
            state: vec![NodeState::White; n],
        }
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.cost.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cost.is_empty()
    }

    pub fn costs(&self) -> &[T] {
        &self.cost
    }

    pub fn predecessors(&self) -> &[Option<usize>] {
        &self.predecessor
    }

    pub fn roots(&self) -> &[usize] {
        &self.root
    }

    pub fn labels(&self) -> &[u32] {
        &self.label
    }

    pub fn states(&self) -> &[NodeState] {
        &self.state
    }

    /// Mutable label access, for building negative controls.
    pub fn labels_mut(&mut self) -> &mut [u32] {
        &mut self.label
    }

    pub fn costs_mut(&mut self) -> &mut [T] {
        &mut self.cost
    }

    pub fn predecessors_mut(&mut self) -> &mut [Option<usize>] {
        &mut self.predecessor
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum QueueKind {
    /// Bucket queue for the gradient cost, radix queue otherwise.
    #[default]
    Auto,
    LazyHeap,
    IndexedHeap,
    Bucket,
    Radix,
}

/// Runs one pass with the default queue.
pub fn ift_pass<T: Scalar>(
    lattice: &Lattice<T>,
    adj: &Adjacency,
    seeds: &SeedSet<T>,
    spec: &PathCostSpec<T>,
) -> Result<ForestState<T>> {
    ift_pass_with(lattice, adj, seeds, spec, QueueKind::Auto, None)
}

/// Runs one pass with an explicit queue; when `order` is given, sites are
/// appended to it as they leave the queue.
pub fn ift_pass_with<T: Scalar>(
    lattice: &Lattice<T>,
    adj: &Adjacency,
    seeds: &SeedSet<T>,
    spec: &PathCostSpec<T>,
    queue: QueueKind,
    order: Option<&mut Vec<usize>>,
) -> Result<ForestState<T>> {
    if let Some(g) = spec.gradient() {
        if g.dims() != lattice.dims() {
            return Err(IsfError::DimensionMismatch { left: lattice.dims(), right: g.dims() });
        }
    }
    let n = lattice.len();
    let kind = match queue {
        QueueKind::Auto if spec.variant() == CostVariant::GradientMax => QueueKind::Bucket,
        QueueKind::Auto => QueueKind::Radix,
        QueueKind::Bucket if spec.variant() != CostVariant::GradientMax => {
            return domain("the bucket queue only serves integer gradient costs");
        }
        other => other,
    };
    match kind {
        QueueKind::Bucket => {
            let maxval = spec.gradient().map_or(0, |g| g.maxval());
            run_pass(lattice, adj, seeds, spec, BucketQueue::new(n, maxval), order)
        }
        QueueKind::IndexedHeap => run_pass(lattice, adj, seeds, spec, IndexedHeapQueue::new(n), order),
        QueueKind::Radix => run_pass(lattice, adj, seeds, spec, RadixQueue::new(n), order),
        _ => run_pass(lattice, adj, seeds, spec, LazyHeapQueue::new(n), order),
    }
}

fn run_pass<T: Scalar, Q: ForestQueue<T>>(
    lattice: &Lattice<T>,
    adj: &Adjacency,
    seeds: &SeedSet<T>,
    spec: &PathCostSpec<T>,
    mut queue: Q,
    mut order: Option<&mut Vec<usize>>,
) -> Result<ForestState<T>> {
    let dims = lattice.dims();
    let mut f = ForestState::reset(dims);
    let refs = reference_colors(lattice, seeds, spec);

    for (j, &s) in seeds.seeds().iter().enumerate() {
        let i = lattice.checked_index(s)?;
        f.cost[i] = T::zero();
        f.label[i] = seeds.label(j);
        queue.push(i, T::zero());
        f.state[i] = NodeState::Gray;
    }

    let steps: Vec<T> = adj.steps().iter().map(|&s| T::of(s)).collect();
    let unit_steps = steps.iter().all(|&s| s == T::one());
    let one = T::one();

    while let Some(s) = queue.pop() {
        f.state[s] = NodeState::Black;
        if let Some(o) = order.as_deref_mut() {
            o.push(s);
        }
        let cost_s = f.cost[s];
        let label_s = f.label[s];
        let root_s = f.root[s];
        let ref_color = &refs[label_s as usize - 1];
        adj.for_each_neighbor(dims, s, |t, step| {
            if f.state[t] == NodeState::Black {
                return;
            }
            let step = if unit_steps { one } else { T::of(step) };
            let c = spec.extend_unchecked(cost_s, lattice.color(t), ref_color, step, spec.gradient_at(t));
            if c < f.cost[t] {
                f.predecessor[t] = Some(s);
                f.root[t] = root_s;
                f.cost[t] = c;
                f.label[t] = label_s;
                queue.push(t, c);
                f.state[t] = NodeState::Gray;
            }
        });
    }
    Ok(f)
}

/// Sum of all path costs.
pub fn functional<T: Scalar>(forest: &ForestState<T>) -> Result<T> {
    let mut sum = T::zero();
    for (i, &c) in forest.cost.iter().enumerate() {
        if !c.is_finite() {
            return Err(IsfError::Consistency(format!("site {i} was never reached")));
        }
        sum = sum + c;
    }
    Ok(sum)
}

/// Outcome of [`verify_forest`]; every flag is `true` on a valid forest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForestReport {
    pub acyclic: bool,
    pub labels_consistent: bool,
    pub connected: bool,
    pub boundary_protected: bool,
    pub roots_agree: bool,
    pub violations: Vec<String>,
}

impl ForestReport {
    pub fn is_ok(&self) -> bool {
        self.acyclic && self.labels_consistent && self.connected && self.boundary_protected && self.roots_agree
    }
}

const MAX_MESSAGES: usize = 16;

fn note(messages: &mut Vec<String>, msg: impl FnOnce() -> String) {
    if messages.len() < MAX_MESSAGES {
        messages.push(msg());
    }
}

/// Number of connected components per label under `adj` (index `label - 1`).
/// Labels outside `1..=k` are ignored.
pub fn label_components(labels: &[u32], dims: [usize; 3], adj: &Adjacency, k: usize) -> Vec<usize> {
    let mut components = vec![0usize; k];
    let mut seen = vec![false; labels.len()];
    let mut stack = Vec::new();
    for start in 0..labels.len() {
        let l = labels[start];
        if seen[start] || l == 0 || l as usize > k {
            continue;
        }
        components[l as usize - 1] += 1;
        seen[start] = true;
        stack.push(start);
        while let Some(s) = stack.pop() {
            adj.for_each_neighbor(dims, s, |t, _| {
                if !seen[t] && labels[t] == l {
                    seen[t] = true;
                    stack.push(t);
                }
            });
        }
    }
    components
}

/// Checks the structural guarantees of a completed pass: acyclic
/// predecessors, label consistency, one connected component per label,
/// boundary protection of every cross-label arc (relative tolerance
/// `tolerance`), and root/seed agreement.
pub fn verify_forest<T: Scalar>(
    forest: &ForestState<T>,
    lattice: &Lattice<T>,
    adj: &Adjacency,
    seeds: &SeedSet<T>,
    spec: &PathCostSpec<T>,
    tolerance: f64,
) -> ForestReport {
    let n = lattice.len();
    let k = seeds.len();
    let mut msgs = Vec::new();
    if forest.len() != n || forest.dims != lattice.dims() {
        return ForestReport {
            acyclic: false,
            labels_consistent: false,
            connected: false,
            boundary_protected: false,
            roots_agree: false,
            violations: vec!["forest and lattice dims differ".into()],
        };
    }

    // (a) acyclic, and each chain ends at the recorded root.
    let mut acyclic = true;
    let mut mark = vec![0u8; n]; // 0 unvisited, 1 on current chain, 2 verified
    let mut chain = Vec::new();
    for start in 0..n {
        if mark[start] == 2 {
            continue;
        }
        chain.clear();
        let mut cur = start;
        let mut cyclic = false;
        loop {
            if mark[cur] == 2 {
                break;
            }
            if mark[cur] == 1 {
                cyclic = true;
                break;
            }
            mark[cur] = 1;
            chain.push(cur);
            match forest.predecessor[cur] {
                Some(p) if p < n => cur = p,
                Some(p) => {
                    cyclic = true;
                    note(&mut msgs, || format!("site {cur} has out-of-range predecessor {p}"));
                    break;
                }
                None => break,
            }
        }
        if cyclic {
            acyclic = false;
            note(&mut msgs, || format!("predecessor cycle reached from site {start}"));
        }
        for &c in &chain {
            mark[c] = 2;
        }
    }
    if acyclic {
        for t in 0..n {
            let mut cur = t;
            while let Some(p) = forest.predecessor[cur] {
                cur = p;
            }
            if forest.root[t] != cur {
                acyclic = false;
                note(&mut msgs, || format!("site {t}: root {} but chain ends at {cur}", forest.root[t]));
            }
        }
    }

    // (b) labels agree along predecessor arcs.
    let mut labels_consistent = true;
    for t in 0..n {
        if let Some(p) = forest.predecessor[t] {
            if p < n && forest.label[p] != forest.label[t] {
                labels_consistent = false;
                note(&mut msgs, || format!("site {t} label {} differs from predecessor {p}", forest.label[t]));
            }
        }
    }

    // (c) every site labeled in 1..=k, black and finite; one component per label.
    let mut connected = true;
    for t in 0..n {
        let l = forest.label[t];
        if l == 0 || l as usize > k || forest.state[t] != NodeState::Black || !forest.cost[t].is_finite() {
            connected = false;
            note(&mut msgs, || format!("site {t} incomplete: label {l}, state {:?}", forest.state[t]));
        }
    }
    for (j, &c) in label_components(&forest.label, lattice.dims(), adj, k).iter().enumerate() {
        if c != 1 {
            connected = false;
            note(&mut msgs, || format!("label {} has {c} connected components", j + 1));
        }
    }

    // (d) boundary protection.
    let mut boundary_protected = true;
    let refs = reference_colors(lattice, seeds, spec);
    let dims = lattice.dims();
    for t in 0..n {
        let lt = forest.label[t];
        adj.for_each_neighbor(dims, t, |s, step| {
            let ls = forest.label[s];
            if ls == lt || ls == 0 || ls as usize > k || !forest.cost[s].is_finite() {
                return;
            }
            let rhs = spec.extend_unchecked(
                forest.cost[s],
                lattice.color(t),
                &refs[ls as usize - 1],
                T::of(step),
                spec.gradient_at(t),
            );
            let (lhs, rhs) = (forest.cost[t].as_f64(), rhs.as_f64());
            if lhs > rhs + tolerance * rhs.abs().max(1.0) {
                boundary_protected = false;
                note(&mut msgs, || format!("site {t} cost {lhs} exceeds extension {rhs} from site {s}"));
            }
        });
    }

    // (e) roots are exactly the seeds, with matching labels.
    let mut roots_agree = true;
    let mut seed_label = vec![0u32; n];
    for (j, &s) in seeds.seeds().iter().enumerate() {
        let i = lattice.index(s);
        seed_label[i] = seeds.label(j);
        if forest.root[i] != i || forest.predecessor[i].is_some() || forest.cost[i] != T::zero() || forest.label[i] != seeds.label(j) {
            roots_agree = false;
            note(&mut msgs, || format!("seed {s:?} is not a zero-cost root with label {}", j + 1));
        }
    }
    for t in 0..n {
        let r = forest.root[t];
        if r >= n || seed_label[r] == 0 || seed_label[r] != forest.label[t] {
            roots_agree = false;
            note(&mut msgs, || format!("site {t} has root {r} that is not a seed of its label"));
        }
    }

    ForestReport { acyclic, labels_consistent, connected, boundary_protected, roots_agree, violations: msgs }
}
