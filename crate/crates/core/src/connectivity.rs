//! Path-cost functions: trivial-path initialization and the three
//! extension rules (root color, mean color, gradient maximum).

use crate::error::{domain, IsfError, Result};
use crate::gradient::GradientMap;
use crate::lattice::{Coord, Lattice};
use crate::scalar::{dist3, Scalar};
use crate::seeding::SeedSet;

/// Default exponent on the color term.
pub const DEFAULT_BETA: f64 = 12.0;
pub const DEFAULT_ALPHA: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CostVariant {
    /// Additive, color term against the root seed's own color.
    RootColor,
    /// Additive, color term against the superpixel mean color.
    MeanColor,
    /// Maximum gradient along the path.
    GradientMax,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathCostSpec<T = f64> {
    variant: CostVariant,
    alpha: T,
    beta: T,
    /// Set when `beta` is a small integer so the hot loop can use `powi`.
    beta_int: Option<i32>,
    gradient: Option<GradientMap>,
}

impl<T: Scalar> PathCostSpec<T> {
    pub fn new(variant: CostVariant, alpha: f64, beta: f64, gradient: Option<GradientMap>) -> Result<Self> {
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return domain(format!("alpha must be finite and >= 0, got {alpha}"));
        }
        if !(beta >= 1.0 && beta.is_finite()) {
            return domain(format!("beta must be finite and >= 1, got {beta}"));
        }
        if variant == CostVariant::GradientMax && gradient.is_none() {
            return domain("the gradient-max cost needs a gradient map");
        }
        let beta_int = (beta.fract() == 0.0 && beta <= 64.0).then_some(beta as i32);
        Ok(Self { variant, alpha: T::of(alpha), beta: T::of(beta), beta_int, gradient })
    }

    pub fn f1(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(CostVariant::RootColor, alpha, beta, None)
    }

    pub fn f2(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(CostVariant::MeanColor, alpha, beta, None)
    }

    pub fn f3(gradient: GradientMap) -> Result<Self> {
        Self::new(CostVariant::GradientMax, 0.0, 1.0, Some(gradient))
    }

    pub fn variant(&self) -> CostVariant {
        self.variant
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    pub fn gradient(&self) -> Option<&GradientMap> {
        self.gradient.as_ref()
    }

    /// Gradient value at a site, 0 when no gradient is attached.
    #[inline]
    pub fn gradient_at(&self, index: usize) -> u32 {
        self.gradient.as_ref().map_or(0, |g| g.value(index))
    }

    /// Extension without the finiteness check. `cost_s` must be finite.
    #[inline]
    pub fn extend_unchecked(&self, cost_s: T, color_t: &[T; 3], ref_color: &[T; 3], step: T, grad_t: u32) -> T {
        match self.variant {
            CostVariant::RootColor | CostVariant::MeanColor => {
                let w = dist3(color_t, ref_color) * self.alpha;
                let color_term = match self.beta_int {
                    Some(b) => w.powi(b),
                    None => w.powf(self.beta),
                };
                cost_s + color_term + step
            }
            CostVariant::GradientMax => cost_s.max(T::of(grad_t as f64)),
        }
    }

    /// Cost of extending a path of cost `cost_s` by one arc into a site with
    /// color `color_t` and gradient `grad_t`.
    ///
    /// The caller resolves `ref_color` from the path root: the seed's own
    /// color for [`CostVariant::RootColor`], its mean color for
    /// [`CostVariant::MeanColor`]. It is ignored by the gradient variant.
    pub fn extend_cost(&self, cost_s: T, color_t: &[T; 3], ref_color: &[T; 3], step: T, grad_t: u32) -> Result<T> {
        if !cost_s.is_finite() {
            return Err(IsfError::Domain("cannot extend an unreached (infinite cost) path".into()));
        }
        Ok(self.extend_unchecked(cost_s, color_t, ref_color, step, grad_t))
    }
}

/// Cost of the one-site path at `site`: zero on seeds, infinite elsewhere.
pub fn trivial_cost<T: Scalar>(site: Coord, seeds: Option<&SeedSet<T>>) -> T {
    match seeds {
        Some(s) if s.seeds().contains(&site) => T::zero(),
        _ => T::infinity(),
    }
}

/// Reference color per label (index `label - 1`) under `spec`.
pub fn reference_colors<T: Scalar>(lattice: &Lattice<T>, seeds: &SeedSet<T>, spec: &PathCostSpec<T>) -> Vec<[T; 3]> {
    match spec.variant() {
        CostVariant::MeanColor => seeds.ref_colors().to_vec(),
        CostVariant::RootColor | CostVariant::GradientMax => {
            seeds.seeds().iter().map(|&s| *lattice.color(lattice.index(s))).collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn trivial_path_rule() {
        let l = Lattice::<f64>::from_lab_2d(3, 1, vec![[0.0; 3]; 3]).unwrap();
        let s = SeedSet::at_sites(&l, vec![[1, 0, 0]]).unwrap();
        assert_eq!(trivial_cost([1, 0, 0], Some(&s)), 0.0);
        assert_eq!(trivial_cost([0, 0, 0], Some(&s)), f64::INFINITY);
        assert_eq!(trivial_cost::<f64>([1, 0, 0], None), f64::INFINITY);
    }

    #[test]
    fn root_color_example() {
        let spec = PathCostSpec::<f64>::f1(0.5, 12.0).unwrap();
        let c = spec.extend_cost(10.0, &[2.0, 0.0, 0.0], &[0.0, 0.0, 0.0], 1.0, 0).unwrap();
        assert_eq!(c, 12.0);
    }

    #[test]
    fn zero_alpha_is_spatial_geodesic() {
        for spec in [PathCostSpec::<f64>::f1(0.0, 12.0).unwrap(), PathCostSpec::f2(0.0, 3.5).unwrap()] {
            let c = spec.extend_cost(7.0, &[80.0, 5.0, -3.0], &[1.0, 0.0, 0.0], 1.0, 0).unwrap();
            assert_eq!(c, 8.0);
        }
    }

    #[test]
    fn gradient_max_semantics() {
        let g = GradientMap::new([1, 1, 1], vec![0], 255).unwrap();
        let spec = PathCostSpec::<f64>::f3(g).unwrap();
        let z = [0.0; 3];
        assert_eq!(spec.extend_cost(5.0, &z, &z, 1.0, 3).unwrap(), 5.0);
        assert_eq!(spec.extend_cost(2.0, &z, &z, 1.0, 7).unwrap(), 7.0);
    }

    #[test]
    fn infinite_input_rejected() {
        let spec = PathCostSpec::<f64>::f1(0.5, 12.0).unwrap();
        let z = [0.0; 3];
        assert!(spec.extend_cost(f64::INFINITY, &z, &z, 1.0, 0).is_err());
    }

    #[test]
    fn parameter_validation() {
        assert!(PathCostSpec::<f64>::f1(-0.1, 12.0).is_err());
        assert!(PathCostSpec::<f64>::f1(0.1, 0.5).is_err());
        assert!(PathCostSpec::<f64>::new(CostVariant::GradientMax, 0.0, 1.0, None).is_err());
    }

    #[test]
    fn path_fold_of_gradient_max_is_max_excluding_origin() {
        let g = GradientMap::new([5, 1, 1], vec![9, 2, 6, 1, 4], 255).unwrap();
        let spec = PathCostSpec::<f64>::f3(g.clone()).unwrap();
        let z = [0.0; 3];
        let mut c = 0.0;
        for t in 1..5 {
            c = spec.extend_cost(c, &z, &z, 1.0, g.value(t)).unwrap();
        }
        assert_eq!(c, 6.0);
    }

    #[test]
    fn identical_colors_reduce_to_path_length() {
        let spec = PathCostSpec::<f64>::f2(0.5, 12.0).unwrap();
        let col = [40.0, 3.0, 2.0];
        let mut c = 0.0;
        for _ in 0..17 {
            c = spec.extend_cost(c, &col, &col, 1.0, 0).unwrap();
        }
        assert_eq!(c, 17.0);
    }

    proptest! {
        #[test]
        fn extension_is_monotone(
            cost in 0.0f64..1e6,
            l in 0.0f64..100.0, a in -80.0f64..80.0, b in -80.0f64..80.0,
            rl in 0.0f64..100.0,
            alpha in 0.0f64..2.0, beta in 1.0f64..14.0,
            grad in 0u32..256,
        ) {
            let g = GradientMap::new([1, 1, 1], vec![0], 255).unwrap();
            for spec in [
                PathCostSpec::<f64>::f1(alpha, beta).unwrap(),
                PathCostSpec::f2(alpha, beta).unwrap(),
                PathCostSpec::f3(g.clone()).unwrap(),
            ] {
                let c = spec.extend_cost(cost, &[l, a, b], &[rl, 0.0, 0.0], 1.0, grad).unwrap();
                prop_assert!(c >= cost && c.is_finite());
            }
        }

        #[test]
        fn alpha_scaling_rescales_color_term(d in 0.1f64..50.0, alpha in 0.01f64..1.0, c in 1.1f64..3.0, beta in 1.0f64..12.0) {
            let term = |a: f64| {
                let spec = PathCostSpec::<f64>::f1(a, beta).unwrap();
                spec.extend_cost(0.0, &[d, 0.0, 0.0], &[0.0; 3], 0.0, 0).unwrap()
            };
            assert_relative_eq!(term(alpha * c), term(alpha) * c.powf(beta), max_relative = 1e-9);
        }
    }
}
