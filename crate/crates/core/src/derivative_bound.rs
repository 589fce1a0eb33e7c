//! Zeros of higher derivatives inside a disk that holds all but one zero.
//!
//! If a closed disk `D` contains `n - 1` zeros of a degree-`n` polynomial `p`
//! and is centered at their mean, then `D` contains at least
//! `floor((n - 2k + 1) / 2)` zeros of `p^(k)`. This module checks that claim
//! on concrete instances together with the algebra behind it.

use num_complex::Complex;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::poly::{binomial_scalar, Polynomial};
use crate::regions::{convex_hull, hull_distance, Disk};
use crate::rootfind::{find_roots, RootOptions, RootSet};
use crate::scalar::{to_f64, Scalar};

/// `max(0, floor((n - 2k + 1) / 2))` for `1 <= k <= n - 1`.
pub fn theorem2_bound(n: usize, k: usize) -> Result<usize> {
    if k == 0 || k >= n {
        return Err(Error::InvalidInput(format!(
            "derivative order k = {k} must satisfy 1 <= k <= n - 1 = {}",
            n.saturating_sub(1)
        )));
    }
    let numerator = n as i64 - 2 * k as i64 + 1;
    Ok(if numerator <= 0 { 0 } else { (numerator / 2) as usize })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Theorem2Instance<T> {
    /// The `n - 1` zeros assumed to lie in the disk.
    pub inner: Vec<Complex<T>>,
    /// The remaining zero, anywhere.
    pub outer: Complex<T>,
    pub disk: Disk<T>,
}

impl<T: Scalar> Theorem2Instance<T> {
    /// Degree of the full polynomial.
    pub fn degree(&self) -> usize {
        self.inner.len() + 1
    }

    pub fn zeros(&self) -> Vec<Complex<T>> {
        let mut all = self.inner.clone();
        all.push(self.outer);
        all
    }

    pub fn polynomial(&self) -> Polynomial<T> {
        Polynomial::from_roots(&self.zeros())
    }

    /// Checks the center-is-mean and containment requirements.
    pub fn validate(&self, tol: T) -> Result<()> {
        if self.inner.len() < 2 {
            return Err(Error::InvalidInstance(format!(
                "need at least two inner zeros (n >= 3), got {}",
                self.inner.len()
            )));
        }
        let mean = self.inner.iter().copied().sum::<Complex<T>>() / T::from_usize(self.inner.len());
        let scale = T::one() + self.disk.center.norm() + self.disk.radius;
        let offset = (mean - self.disk.center).norm();
        if offset > T::lit(1e-12) * scale {
            return Err(Error::InvalidInstance(format!(
                "disk center is {:e} away from the mean of the inner zeros",
                to_f64(offset)
            )));
        }
        if let Some(z) = self.inner.iter().find(|&&z| !self.disk.contains(z, tol)) {
            return Err(Error::InvalidInstance(format!(
                "inner zero ({}, {}) lies outside the disk by {:e}",
                z.re,
                z.im,
                to_f64((*z - self.disk.center).norm() - self.disk.radius)
            )));
        }
        Ok(())
    }

    /// Same instance under `z -> rotation * z + shift`, `|rotation| = 1`.
    pub fn transformed(&self, rotation: Complex<T>, shift: Complex<T>) -> Self {
        let map = |z: Complex<T>| rotation * z + shift;
        Theorem2Instance {
            inner: self.inner.iter().map(|&z| map(z)).collect(),
            outer: map(self.outer),
            disk: Disk {
                center: map(self.disk.center),
                radius: self.disk.radius,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Theorem2Options<T> {
    pub roots: RootOptions<T>,
    pub membership_tol: T,
}

impl<T: Scalar> Default for Theorem2Options<T> {
    fn default() -> Self {
        Theorem2Options {
            roots: RootOptions::default(),
            membership_tol: T::membership_tol(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Theorem2Report<T> {
    pub n: usize,
    pub k: usize,
    pub bound: usize,
    /// The bound is zero, so the claim holds trivially.
    pub vacuous: bool,
    pub derivative_roots: RootSet<T>,
    pub count_in_disk: usize,
    pub satisfied: bool,
    /// `|mean(p) - mean(p^(k))| / (1 + |mean(p)|)`.
    pub mean_residual: T,
    /// Largest `|z_n + (n/k)(w - z_n) - c| - radius` over derivative zeros `w`
    /// outside the disk, where `z_n` is the outer zero; `None` when every zero
    /// is inside. Nonpositive (up to tolerance) is expected.
    pub outside_excess: Option<T>,
}

impl<T: Scalar> Theorem2Report<T> {
    /// Soft structural check: zeros outside the disk have the form
    /// `z_n + (k/n)(y - z_n)` with `y` in it.
    pub fn outside_structure_ok(&self, tol: T) -> bool {
        self.outside_excess
            .map_or(true, |e| e <= tol * (T::one() + self.derivative_roots.max_root_norm()))
    }
}

pub fn check_theorem2<T: Scalar>(
    inst: &Theorem2Instance<T>,
    k: usize,
    opts: &Theorem2Options<T>,
) -> Result<Theorem2Report<T>> {
    inst.validate(opts.membership_tol)?;
    let n = inst.degree();
    let bound = theorem2_bound(n, k).map_err(|e| Error::InvalidInstance(e.to_string()))?;
    let p = inst.polynomial();
    let derivative = p.derivative(k);
    let derivative_roots = find_roots(&derivative, &opts.roots)?;

    let region = inst.disk.to_region();
    let count_in_disk = derivative_roots.count_in(&region, opts.membership_tol);

    let mean = p.mean_of_roots()?;
    let mean_residual = (mean - derivative.mean_of_roots()?).norm() / (T::one() + mean.norm());

    let stretch = T::from_usize(n) / T::from_usize(k);
    let outside_excess = derivative_roots
        .clusters
        .iter()
        .filter(|c| !region.contains(c.representative, opts.membership_tol))
        .map(|c| {
            let preimage = inst.outer + (c.representative - inst.outer) * stretch;
            (preimage - inst.disk.center).norm() - inst.disk.radius
        })
        .fold(None, |acc: Option<T>, e| Some(acc.map_or(e, |a| a.max(e))));

    Ok(Theorem2Report {
        n,
        k,
        bound,
        vacuous: bound == 0,
        derivative_roots,
        count_in_disk,
        satisfied: count_in_disk >= bound,
        mean_residual,
        outside_excess,
    })
}

/// `k! C(n-1, k) z (z - y)^(n-k-1) + k! C(n-1, k-1) (z - y)^(n-k)`, expanded.
pub fn kth_derivative_closed_form<T: Scalar>(n: usize, k: usize, y: Complex<T>) -> Result<Polynomial<T>> {
    if k == 0 || k >= n {
        return Err(Error::InvalidInput(format!("need 1 <= k <= n - 1, got n = {n}, k = {k}")));
    }
    let k_factorial = (1..=k).fold(T::one(), |acc, j| acc * T::from_usize(j));
    let first = Polynomial::from_roots(&[vec![Complex::zero()], vec![y; n - k - 1]].concat())
        .scale(Complex::from(k_factorial * binomial_scalar::<T>(n - 1, k)?));
    let second = Polynomial::from_roots(&vec![y; n - k])
        .scale(Complex::from(k_factorial * binomial_scalar::<T>(n - 1, k - 1)?));
    Ok(&first + &second)
}

/// Largest coefficient gap between the `k`-th derivative of `z (z - y)^(n-1)`
/// and its closed form, relative to the largest coefficient.
pub fn kth_derivative_identity<T: Scalar>(n: usize, k: usize, y: Complex<T>) -> Result<T> {
    let closed = kth_derivative_closed_form(n, k, y)?;
    let p = Polynomial::from_roots(&[vec![Complex::zero()], vec![y; n - 1]].concat());
    let direct = p.derivative(k);
    let len = direct.coeffs().len().max(closed.coeffs().len());
    let gap = (0..len)
        .map(|i| (direct.coeff(i) - closed.coeff(i)).norm())
        .fold(T::zero(), T::max);
    let scale = direct.max_abs_coeff().max(closed.max_abs_coeff());
    Ok(if gap.is_zero() { gap } else { gap / scale })
}

/// Zeros of the closed form: `y` with multiplicity `n - k - 1` and `(k/n) y`.
pub fn factorization_roots<T: Scalar>(n: usize, k: usize, y: Complex<T>) -> Result<Vec<Complex<T>>> {
    if k == 0 || k >= n {
        return Err(Error::InvalidInput(format!("need 1 <= k <= n - 1, got n = {n}, k = {k}")));
    }
    let mut roots = vec![y; n - k - 1];
    roots.push(y * (T::from_usize(k) / T::from_usize(n)));
    Ok(roots)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussLucasReport<T> {
    pub holds: bool,
    /// Largest distance from a critical point to the hull of the zeros.
    pub max_distance: T,
    pub zeros: Vec<Complex<T>>,
    pub critical_points: Vec<Complex<T>>,
}

pub fn gauss_lucas_report<T: Scalar>(
    p: &Polynomial<T>,
    tol: T,
    opts: &RootOptions<T>,
) -> Result<GaussLucasReport<T>> {
    if p.degree().map_or(true, |d| d < 2) {
        return Err(Error::InvalidDegree("Gauss-Lucas check needs degree at least 2".into()));
    }
    let zeros = find_roots(p, opts)?.roots;
    let critical_points = find_roots(&p.derivative(1), opts)?.roots;
    let hull = convex_hull(&zeros);
    let max_distance = critical_points
        .iter()
        .map(|&z| hull_distance(&hull, z))
        .fold(T::zero(), T::max);
    Ok(GaussLucasReport {
        holds: max_distance <= tol,
        max_distance,
        zeros,
        critical_points,
    })
}

/// Every zero of `p'` lies within `tol` of the convex hull of the zeros of `p`.
pub fn gauss_lucas_check<T: Scalar>(p: &Polynomial<T>, tol: T) -> Result<bool> {
    Ok(gauss_lucas_report(p, tol, &RootOptions::default())?.holds)
}

fn sample_in_disk<R: Rng>(rng: &mut R, radius: f64) -> Complex<f64> {
    let r = radius * rng.gen::<f64>().sqrt();
    Complex::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
}

/// Largest fraction of the radius used for sampled inner zeros.
const INNER_FILL: f64 = 0.999;

/// Random instance with `n - 1` zeros in a disk of the given radius whose mean
/// is the center, plus one zero at distance at least `outer_distance` from it.
pub fn generate_theorem2_instance<T: Scalar>(
    n: usize,
    seed: u64,
    radius: T,
    outer_distance: T,
) -> Result<Theorem2Instance<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    generate_theorem2_instance_with(n, &mut rng, radius, outer_distance)
}

pub fn generate_theorem2_instance_with<T: Scalar, R: Rng>(
    n: usize,
    rng: &mut R,
    radius: T,
    outer_distance: T,
) -> Result<Theorem2Instance<T>> {
    if n < 3 {
        return Err(Error::InvalidInput(format!("need n >= 3, got {n}")));
    }
    let radius_f = to_f64(radius);
    let outer_f = to_f64(outer_distance);
    if !(radius_f > 0.0 && radius_f.is_finite() && outer_f > 0.0 && outer_f.is_finite()) {
        return Err(Error::InvalidInput("radius and outer distance must be positive".into()));
    }
    let center = Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * radius_f;
    let mut offsets: Vec<Complex<f64>> = (0..n - 1).map(|_| sample_in_disk(rng, radius_f)).collect();
    let mean = offsets.iter().sum::<Complex<f64>>() / (n - 1) as f64;
    for z in offsets.iter_mut() {
        *z -= mean;
    }
    let reach = offsets.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let limit = INNER_FILL * radius_f;
    if reach > limit {
        let shrink = limit / reach;
        for z in offsets.iter_mut() {
            *z *= shrink;
        }
    }
    // exact zero mean for the two-point case
    if n == 3 {
        offsets[1] = -offsets[0];
    }
    let outer_offset = Complex::from_polar(
        outer_f * (1.0 + 0.1 * rng.gen::<f64>()),
        rng.gen_range(0.0..std::f64::consts::TAU),
    );
    let lift = |z: Complex<f64>| Complex::new(T::lit(z.re), T::lit(z.im));
    Ok(Theorem2Instance {
        inner: offsets.iter().map(|&z| lift(center + z)).collect(),
        outer: lift(center + outer_offset),
        disk: Disk {
            center: lift(center),
            radius,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::matching_distance;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn bound_examples() {
        assert_eq!(theorem2_bound(5, 1).unwrap(), 2);
        assert_eq!(theorem2_bound(4, 2).unwrap(), 0);
        assert_eq!(theorem2_bound(3, 1).unwrap(), 1);
        assert_eq!(theorem2_bound(10, 9).unwrap(), 0);
        assert!(theorem2_bound(5, 0).is_err());
        assert!(theorem2_bound(5, 5).is_err());
    }

    #[test]
    fn worked_instance() {
        let inst = Theorem2Instance {
            inner: vec![c(-1.0, 0.0), c(1.0, 0.0)],
            outer: c(10.0, 0.0),
            disk: Disk::new(c(0.0, 0.0), 1.0).unwrap(),
        };
        let report = check_theorem2(&inst, 1, &Theorem2Options::default()).unwrap();
        // p' = 3z^2 - 20z - 1, roots (20 +- sqrt(412)) / 6
        let s = 412f64.sqrt();
        let expected = [c((20.0 - s) / 6.0, 0.0), c((20.0 + s) / 6.0, 0.0)];
        assert!(matching_distance(&report.derivative_roots.roots, &expected).unwrap() < 1e-13);
        assert_eq!(report.bound, 1);
        assert_eq!(report.count_in_disk, 1);
        assert!(report.satisfied);
        assert!(report.mean_residual <= 1e-15);
        assert!(report.outside_structure_ok(1e-9));
    }

    #[test]
    fn outer_inside_disk_counts_everything() {
        let inner = vec![c(-0.5, 0.2), c(0.5, -0.2), c(0.1, 0.4), c(-0.1, -0.4)];
        let inst = Theorem2Instance {
            inner,
            outer: c(0.3, 0.3),
            disk: Disk::new(c(0.0, 0.0), 0.9).unwrap(),
        };
        for k in 1..5 {
            let report = check_theorem2(&inst, k, &Theorem2Options::default()).unwrap();
            assert_eq!(report.count_in_disk, 5 - k);
            assert!(report.satisfied);
        }
    }

    #[test]
    fn vacuous_bound_is_satisfied() {
        let inst = generate_theorem2_instance(6, 3, 1.0, 50.0).unwrap();
        let report = check_theorem2(&inst, 3, &Theorem2Options::default()).unwrap();
        assert_eq!(report.bound, 0);
        assert!(report.vacuous);
        assert!(report.satisfied);
    }

    #[test]
    fn invalid_instances_rejected() {
        let inst = Theorem2Instance {
            inner: vec![c(-1.0, 0.0), c(1.2, 0.0)],
            outer: c(10.0, 0.0),
            disk: Disk::new(c(0.0, 0.0), 1.0).unwrap(),
        };
        assert!(matches!(
            check_theorem2(&inst, 1, &Theorem2Options::default()),
            Err(Error::InvalidInstance(_))
        ));
        let inst = Theorem2Instance {
            inner: vec![c(-2.0, 0.0), c(2.0, 0.0)],
            outer: c(10.0, 0.0),
            disk: Disk::new(c(0.0, 0.0), 1.0).unwrap(),
        };
        assert!(check_theorem2(&inst, 1, &Theorem2Options::default()).is_err());
        let ok = generate_theorem2_instance(4, 1, 1.0, 3.0).unwrap();
        assert!(matches!(
            check_theorem2(&ok, 4, &Theorem2Options::default()),
            Err(Error::InvalidInstance(_))
        ));
    }

    #[test]
    fn identity_examples() {
        // p' of z (z - 1)^2 is (z - 1)(3z - 1) = 3z^2 - 4z + 1
        let closed = kth_derivative_closed_form(3, 1, c(1.0, 0.0)).unwrap();
        assert_eq!(closed, Polynomial::from_real(&[1.0, -4.0, 3.0]));
        assert_eq!(kth_derivative_identity(3, 1, c(1.0, 0.0)).unwrap(), 0.0);
        for n in 2..=12 {
            for k in 1..n {
                assert_eq!(kth_derivative_identity(n, k, c(0.0, 0.0)).unwrap(), 0.0);
                let closed = kth_derivative_closed_form(n, k, c(0.0, 0.0)).unwrap();
                let falling: f64 = ((n - k + 1)..=n).map(|j| j as f64).product();
                assert_eq!(closed, Polynomial::monomial(c(falling, 0.0), n - k));
            }
        }
    }

    #[test]
    fn factorization_examples() {
        let roots = factorization_roots(3, 1, c(1.0, 0.0)).unwrap();
        assert_eq!(roots, vec![c(1.0, 0.0), c(1.0 / 3.0, 0.0)]);
        assert_eq!(factorization_roots(5, 2, c(0.0, 0.0)).unwrap(), vec![c(0.0, 0.0); 3]);
        assert_eq!(
            factorization_roots(4, 2, c(0.0, 2.0)).unwrap(),
            vec![c(0.0, 2.0), c(0.0, 1.0)]
        );
    }

    #[test]
    fn factorization_matches_root_finder() {
        let y = c(0.6, -0.8);
        for n in 2..=8 {
            for k in 1..n {
                let closed = kth_derivative_closed_form(n, k, y).unwrap();
                let found = find_roots(&closed, &RootOptions::default()).unwrap();
                let predicted = factorization_roots(n, k, y).unwrap();
                let expanded: Vec<Complex64> = found
                    .clusters
                    .iter()
                    .flat_map(|c| vec![c.representative; c.multiplicity])
                    .collect();
                assert!(matching_distance(&expanded, &predicted).unwrap() < 1e-10, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn gauss_lucas_examples() {
        assert!(gauss_lucas_check(&Polynomial::from_real(&[-1.0, 0.0, 1.0]), 1e-12).unwrap());
        assert!(gauss_lucas_check(&Polynomial::from_real(&[-1.0, 0.0, 0.0, 1.0]), 1e-12).unwrap());
        assert!(gauss_lucas_check(&Polynomial::from_real(&[1.0, 1.0]), 1e-7).is_err());
    }

    #[test]
    fn generator_examples() {
        for seed in 0..50 {
            let inst = generate_theorem2_instance(7, seed, 2.0, 5.0).unwrap();
            inst.validate(1e-9).unwrap();
            assert!((inst.outer - inst.disk.center).norm() >= 5.0);
        }
        let inst = generate_theorem2_instance(3, 9, 1.0, 4.0).unwrap();
        let (a, b) = (inst.inner[0] - inst.disk.center, inst.inner[1] - inst.disk.center);
        assert!((a + b).norm() < 1e-15);
        assert_eq!(
            generate_theorem2_instance(9, 77, 1.5, 2.0).unwrap(),
            generate_theorem2_instance::<f64>(9, 77, 1.5, 2.0).unwrap()
        );
        assert!(generate_theorem2_instance(2, 1, 1.0, 1.0).is_err());
    }

    #[test]
    fn report_invariant_under_rigid_motions() {
        let opts = Theorem2Options::default();
        for seed in 0..40 {
            let inst = generate_theorem2_instance(8, seed, 1.0, 1.5).unwrap();
            let angle = seed as f64 * 0.731;
            let moved = inst.transformed(Complex64::from_polar(1.0, angle), c(3.0 - seed as f64 * 0.1, -2.0));
            for k in 1..8 {
                let a = check_theorem2(&inst, k, &opts).unwrap();
                let b = check_theorem2(&moved, k, &opts).unwrap();
                assert_eq!(a.bound, b.bound);
                assert_eq!(a.count_in_disk, b.count_in_disk, "seed {seed} k {k}");
            }
        }
    }

    proptest! {
        #[test]
        fn closed_form_identity(n in 2usize..=20, k_frac in 0.0f64..1.0, re in -1.0f64..1.0, im in -1.0f64..1.0) {
            let k = 1 + ((n - 1) as f64 * k_frac) as usize;
            let k = k.min(n - 1);
            prop_assert!(kth_derivative_identity(n, k, c(re, im)).unwrap() <= 1e-11);
        }

        #[test]
        fn theorem2_holds(n in 3usize..=15, seed in any::<u64>(), radius in 0.1f64..5.0, dist in 0.5f64..100.0, k_frac in 0.0f64..1.0) {
            let k = (1 + ((n - 1) as f64 * k_frac) as usize).min(n - 1);
            let inst = generate_theorem2_instance(n, seed, radius, dist * radius).unwrap();
            let report = check_theorem2(&inst, k, &Theorem2Options::default()).unwrap();
            prop_assert!(report.satisfied);
            prop_assert!(report.mean_residual <= 1e-12);
        }

        #[test]
        fn gauss_lucas_random(coeffs in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 3..=16)) {
            let p = Polynomial::new(coeffs.into_iter().map(|(re, im)| c(re, im)).collect());
            prop_assume!(p.degree().unwrap_or(0) >= 2);
            prop_assert!(gauss_lucas_check(&p, 1e-7).unwrap());
        }
    }
}
