//! The iterative loop: initial seeding per method, repeated forest passes
//! and seed recomputation in between.

use crate::connectivity::{PathCostSpec, DEFAULT_ALPHA, DEFAULT_BETA};
use crate::error::{domain, IsfError, Result};
use crate::forest::{functional, ift_pass_with, ForestState, QueueKind};
use crate::gradient::{gradient_map, regional_minima, DEFAULT_LEVELS};
use crate::lattice::{Adjacency, Coord, Lattice};
use crate::metrics::LabelMap;
use crate::scalar::Scalar;
use crate::seeding::{grid_sample, mixed_sample, recompute_seeds, regmin_seeds, RecomputePolicy, SeedSet};
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

pub const DEFAULT_MAX_ITERS: usize = 10;

/// The five method presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    GridRoot,
    MixRoot,
    GridMean,
    MixMean,
    Regmin,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::GridRoot, Method::MixRoot, Method::GridMean, Method::MixMean, Method::Regmin];

    pub fn name(self) -> &'static str {
        match self {
            Method::GridRoot => "grid-root",
            Method::MixRoot => "mix-root",
            Method::GridMean => "grid-mean",
            Method::MixMean => "mix-mean",
            Method::Regmin => "regmin",
        }
    }

    pub fn uses_mixed_sampling(self) -> bool {
        matches!(self, Method::MixRoot | Method::MixMean)
    }

    /// Recomputation policy, `None` for the single-pass gradient method.
    pub fn policy(self) -> Option<RecomputePolicy> {
        match self {
            Method::GridRoot | Method::MixRoot => Some(RecomputePolicy::ColorMedoid),
            Method::GridMean | Method::MixMean => Some(RecomputePolicy::CenterMedoid),
            Method::Regmin => None,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = IsfError;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| IsfError::Domain(format!("unknown method '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IsfConfig {
    pub method: Method,
    /// Requested number of superpixels.
    pub k: usize,
    pub alpha: f64,
    pub beta: f64,
    pub max_iters: usize,
    /// Quantization levels of the gradient used by [`Method::Regmin`].
    pub gradient_levels: u32,
    pub queue: QueueKind,
}

impl IsfConfig {
    pub fn new(method: Method, k: usize) -> Self {
        Self {
            method,
            k,
            alpha: DEFAULT_ALPHA,
            beta: DEFAULT_BETA,
            max_iters: DEFAULT_MAX_ITERS,
            gradient_levels: DEFAULT_LEVELS,
            queue: QueueKind::Auto,
        }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = beta;
        self
    }

    pub fn with_iters(mut self, iters: usize) -> Self {
        self.max_iters = iters;
        self
    }

    pub fn with_queue(mut self, queue: QueueKind) -> Self {
        self.queue = queue;
        self
    }

    /// Passes actually run: always one for the gradient method.
    pub fn effective_iters(&self) -> usize {
        if self.method == Method::Regmin {
            1
        } else {
            self.max_iters
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return domain("k must be positive");
        }
        if self.max_iters == 0 {
            return domain("max_iters must be at least 1");
        }
        if self.gradient_levels < 2 {
            return domain("gradient needs at least 2 levels");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct IsfDiagnostics {
    /// Sum of path costs after each pass.
    pub functional: Vec<f64>,
    /// Seeds used by each pass.
    pub seeds: Vec<Vec<Coord>>,
    /// Sites whose label differs from the previous pass (all sites for the first).
    pub changed_sites: Vec<usize>,
    pub seconds: Vec<f64>,
}

impl IsfDiagnostics {
    pub fn iterations(&self) -> usize {
        self.functional.len()
    }

    /// Pass indices whose functional rose above the previous pass.
    pub fn functional_increases(&self) -> Vec<usize> {
        self.functional
            .windows(2)
            .enumerate()
            .filter(|(_, w)| w[1] > w[0])
            .map(|(i, _)| i + 1)
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct IsfOutput<T = f64> {
    pub labels: LabelMap,
    /// Seeds of the final pass.
    pub seeds: SeedSet<T>,
    /// Forest of the final pass.
    pub forest: ForestState<T>,
    pub spec: PathCostSpec<T>,
    pub diagnostics: IsfDiagnostics,
}

impl<T> IsfOutput<T> {
    pub fn superpixels(&self) -> usize {
        self.labels.max_label() as usize
    }
}

/// What an observer sees after each pass.
pub struct PassView<'a, T> {
    pub iteration: usize,
    pub lattice: &'a Lattice<T>,
    pub adjacency: &'a Adjacency,
    pub seeds: &'a SeedSet<T>,
    pub spec: &'a PathCostSpec<T>,
    pub forest: &'a ForestState<T>,
}

pub fn isf_run<T: Scalar>(lattice: &Lattice<T>, config: &IsfConfig) -> Result<IsfOutput<T>> {
    isf_run_observed(lattice, config, |_| {})
}

/// Runs the method and calls `observer` after every pass.
pub fn isf_run_observed<T: Scalar>(
    lattice: &Lattice<T>,
    config: &IsfConfig,
    mut observer: impl FnMut(&PassView<'_, T>),
) -> Result<IsfOutput<T>> {
    config.validate()?;
    let adj = lattice.adjacency();
    let (mut seeds, spec) = match config.method {
        Method::Regmin => {
            let grad = gradient_map(lattice, &adj, config.gradient_levels)?;
            let minima = regional_minima(&grad, &adj);
            (regmin_seeds(lattice, config.k, &grad, &minima)?, PathCostSpec::f3(grad)?)
        }
        m => {
            let seeds = if m.uses_mixed_sampling() {
                mixed_sample(lattice, config.k)?
            } else {
                grid_sample(lattice, config.k)?
            };
            let spec = match m.policy() {
                Some(RecomputePolicy::ColorMedoid) => PathCostSpec::f1(config.alpha, config.beta)?,
                _ => PathCostSpec::f2(config.alpha, config.beta)?,
            };
            (seeds, spec)
        }
    };

    let iters = config.effective_iters();
    let mut diagnostics = IsfDiagnostics::default();
    let mut previous: Option<Vec<u32>> = None;
    let mut forest = None;
    for iteration in 0..iters {
        if let (Some(policy), Some(f)) = (config.method.policy(), forest.as_ref()) {
            seeds = recompute_seeds(f, lattice, &seeds, policy)?;
        }
        let start = Instant::now();
        let f = ift_pass_with(lattice, &adj, &seeds, &spec, config.queue, None)?;
        diagnostics.seconds.push(start.elapsed().as_secs_f64());
        diagnostics.functional.push(functional(&f)?.as_f64());
        diagnostics.seeds.push(seeds.seeds().to_vec());
        diagnostics.changed_sites.push(match &previous {
            Some(p) => p.iter().zip(f.labels()).filter(|(a, b)| a != b).count(),
            None => lattice.len(),
        });
        observer(&PassView { iteration, lattice, adjacency: &adj, seeds: &seeds, spec: &spec, forest: &f });
        previous = Some(f.labels().to_vec());
        forest = Some(f);
    }
    let forest = forest.expect("at least one pass");
    let labels = LabelMap::new(lattice.dims(), forest.labels().to_vec())?;
    Ok(IsfOutput { labels, seeds, forest, spec, diagnostics })
}
