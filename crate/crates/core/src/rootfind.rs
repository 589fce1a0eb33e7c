//! All-roots solver: Aberth–Ehrlich simultaneous iteration, a terminal Newton
//! polish, and clustering of nearly coincident roots into multiplicities.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::regions::CircularRegion;
use crate::scalar::{to_c64, to_f64, Scalar};

/// Phase offset of the initial circle, chosen irrational to avoid symmetric stalls.
const INITIAL_PHASE: f64 = 0.4;
/// Fraction of the Cauchy bound used as the initial circle radius.
const INITIAL_RADIUS: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootOptions<T> {
    pub tol: T,
    pub max_iter: usize,
    /// Roots closer than `cluster_radius * (1 + |z|)` are always merged.
    pub cluster_radius: T,
}

impl<T: Scalar> Default for RootOptions<T> {
    fn default() -> Self {
        RootOptions {
            tol: T::root_tol(),
            max_iter: 200,
            cluster_radius: T::lit(1e-6),
        }
    }
}

impl<T: Scalar> RootOptions<T> {
    pub fn with_tol(tol: T) -> Self {
        RootOptions {
            tol,
            ..Self::default()
        }
    }
}

/// A group of numerically coincident roots.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cluster<T> {
    pub representative: Complex<T>,
    pub multiplicity: usize,
    /// Relative residual of the representative as a zero of the `(multiplicity - 1)`-th derivative.
    pub residual: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RootSet<T> {
    /// One entry per root counting multiplicity, sorted by real then imaginary part.
    pub roots: Vec<Complex<T>>,
    /// `|p(r)| / sum |a_k| |r|^k` for each root.
    pub residuals: Vec<T>,
    pub clusters: Vec<Cluster<T>>,
    /// Tolerance the producing call converged to.
    pub tol: T,
    pub iterations: usize,
}

impl<T: Scalar> RootSet<T> {
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    /// Number of roots in the region, counted by cluster with multiplicity.
    pub fn count_in(&self, region: &CircularRegion<T>, tol: T) -> usize {
        self.clusters
            .iter()
            .filter(|c| region.contains(c.representative, tol))
            .map(|c| c.multiplicity)
            .sum()
    }

    pub fn max_root_norm(&self) -> T {
        self.roots.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    pub fn max_residual(&self) -> T {
        self.residuals.iter().copied().fold(T::zero(), T::max)
    }
}

/// `1 + max_{k<n} |a_k| / |a_n|`; every root has modulus below this.
pub fn cauchy_bound<T: Scalar>(p: &Polynomial<T>) -> Result<T> {
    let n = match p.degree() {
        Some(n) if n >= 1 => n,
        _ => {
            return Err(Error::InvalidDegree(
                "Cauchy bound needs degree at least 1".into(),
            ))
        }
    };
    let lead = p.coeffs()[n].norm();
    let ratio = p.coeffs()[..n]
        .iter()
        .map(|c| c.norm() / lead)
        .fold(T::zero(), T::max);
    Ok(T::one() + ratio)
}

/// Relative backward error of `z` as a root of `p`.
pub fn relative_residual<T: Scalar>(p: &Polynomial<T>, z: Complex<T>) -> T {
    let scale = p.abs_eval(z);
    if scale.is_zero() {
        T::zero()
    } else {
        p.eval(z).norm() / scale
    }
}

pub fn find_roots_default<T: Scalar>(p: &Polynomial<T>) -> Result<RootSet<T>> {
    find_roots(p, &RootOptions::default())
}

/// All complex zeros of `p`, counting multiplicity.
///
/// Exact zeros at the origin are factored out before iterating. A root stops
/// moving once its Aberth correction is below `tol * (1 + |z|)` or its value is
/// at the rounding level of the evaluation, the latter being the only reachable
/// criterion inside a multiple-root cluster.
pub fn find_roots<T: Scalar>(p: &Polynomial<T>, opts: &RootOptions<T>) -> Result<RootSet<T>> {
    let degree = match p.degree() {
        Some(n) if n >= 1 => n,
        _ => {
            return Err(Error::InvalidDegree(
                "root finding needs degree at least 1".into(),
            ))
        }
    };
    if !(opts.tol > T::zero()) {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }

    let zeros_at_origin = p.coeffs().iter().take_while(|c| c.is_zero()).count();
    let cofactor = Polynomial::new(p.coeffs()[zeros_at_origin..].to_vec());

    let mut roots = vec![Complex::zero(); zeros_at_origin];
    let (found, iterations) = match cofactor.degree().unwrap_or(0) {
        0 => (Vec::new(), 0),
        1 => {
            let c = cofactor.coeffs();
            (vec![-c[0] / c[1]], 0)
        }
        _ => aberth(&cofactor, opts)?,
    };
    roots.extend(found.into_iter().map(|z| polish(&cofactor, z)));
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    debug_assert_eq!(roots.len(), degree);

    let residuals = roots.iter().map(|&z| relative_residual(p, z)).collect();
    let clusters = cluster_roots(p, &roots, opts.cluster_radius);
    Ok(RootSet {
        roots,
        residuals,
        clusters,
        tol: opts.tol,
        iterations,
    })
}

/// `2 max |a_{n-k} / a_n|^(1/k)` (last term halved): tracks the root scale
/// even when the Cauchy bound is dominated by one huge coefficient ratio.
fn fujiwara_bound<T: Scalar>(p: &Polynomial<T>) -> T {
    let n = p.degree().expect("nonconstant");
    let lead = p.coeffs()[n].norm();
    let bound = (1..=n)
        .map(|k| {
            let mut ratio = p.coeffs()[n - k].norm() / lead;
            if k == n {
                ratio = ratio / T::lit(2.0);
            }
            ratio.powf(T::one() / T::from_usize(k))
        })
        .fold(T::zero(), T::max);
    let bound = T::lit(2.0) * bound;
    if bound > T::zero() && bound.is_finite() {
        bound
    } else {
        T::one()
    }
}

fn aberth<T: Scalar>(p: &Polynomial<T>, opts: &RootOptions<T>) -> Result<(Vec<Complex<T>>, usize)> {
    let n = p.degree().expect("nonconstant");
    let radius = T::lit(INITIAL_RADIUS) * fujiwara_bound(p);
    let phase = T::lit(INITIAL_PHASE);
    let two_pi = T::TAU();
    let mut z: Vec<Complex<T>> = (0..n)
        .map(|j| {
            let angle = two_pi * T::from_usize(j) / T::from_usize(n) + phase;
            Complex::from_polar(radius, angle)
        })
        .collect();
    let mut done = vec![false; n];
    let rounding = T::epsilon() * T::from_usize(4 * (n + 1));

    let mut max_correction = T::infinity();
    for iteration in 1..=opts.max_iter {
        max_correction = T::zero();
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (value, slope) = p.eval_with_derivative(z[i]);
            if value.norm() <= rounding * p.abs_eval(z[i]) {
                done[i] = true;
                continue;
            }
            let repulsion: Complex<T> = (0..n)
                .filter(|&j| j != i)
                .map(|j| z[i] - z[j])
                .filter(|d| !d.is_zero())
                .map(|d| d.inv())
                .sum();
            let denom = slope - value * repulsion;
            let step = if denom.is_zero() {
                // stationary point of the Aberth map: nudge off it
                Complex::new(opts.tol, opts.tol) * (T::one() + z[i].norm())
            } else {
                value / denom
            };
            z[i] = z[i] - step;
            let correction = step.norm() / (T::one() + z[i].norm());
            if correction <= opts.tol {
                done[i] = true;
            }
            max_correction = max_correction.max(correction);
        }
        if done.iter().all(|&d| d) {
            return Ok((z, iteration));
        }
    }
    let residuals = z.iter().map(|&r| to_f64(relative_residual(p, r))).collect();
    Err(Error::NonConvergence {
        iterations: opts.max_iter,
        max_correction: to_f64(max_correction),
        roots: z.into_iter().map(to_c64).collect(),
        residuals,
    })
}

/// One Newton step, kept only if it does not increase `|p|`.
fn polish<T: Scalar>(p: &Polynomial<T>, z: Complex<T>) -> Complex<T> {
    let (value, slope) = p.eval_with_derivative(z);
    if value.is_zero() || slope.is_zero() {
        return z;
    }
    let candidate = z - value / slope;
    if p.eval(candidate).norm() <= value.norm() {
        candidate
    } else {
        z
    }
}

/// Merges roots whose inclusion disks overlap.
///
/// Each root carries the Weierstrass inclusion radius `n |p(z_i)| / |a_n prod (z_i - z_j)|`;
/// connected components of the union of these disks hold as many true roots as
/// disks, so overlapping disks are one multiple root at working precision.
fn cluster_roots<T: Scalar>(p: &Polynomial<T>, roots: &[Complex<T>], radius: T) -> Vec<Cluster<T>> {
    let n = roots.len();
    let lead = p.leading().expect("nonzero polynomial");
    let inclusion: Vec<T> = (0..n)
        .map(|i| {
            let value = p.eval(roots[i]);
            if value.is_zero() {
                return T::zero();
            }
            let prod = (0..n)
                .filter(|&j| j != i)
                .fold(lead, |acc, j| acc * (roots[i] - roots[j]));
            if prod.is_zero() {
                T::infinity()
            } else {
                T::from_usize(n) * value.norm() / prod.norm()
            }
        })
        .collect();

    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let gap = (roots[i] - roots[j]).norm();
            let near = radius * (T::one() + roots[i].norm().max(roots[j].norm()));
            if gap <= near.max(inclusion[i] + inclusion[j]) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }

    let mut groups: Vec<(usize, Complex<T>, usize)> = Vec::new();
    for i in 0..n {
        let root = find(&mut parent, i);
        match groups.iter_mut().find(|g| g.0 == root) {
            Some(g) => {
                g.1 = g.1 + roots[i];
                g.2 += 1;
            }
            None => groups.push((root, roots[i], 1)),
        }
    }
    groups
        .into_iter()
        .map(|(root, sum, count)| {
            let centroid = sum / T::from_usize(count);
            let spread = (0..n)
                .filter(|&i| find(&mut parent, i) == root)
                .map(|i| (roots[i] - centroid).norm())
                .fold(T::zero(), T::max);
            refine_cluster(p, centroid, count, spread)
        })
        .collect()
}

/// A zero of multiplicity `m` is a simple zero of `p^(m-1)`; Newton on that
/// derivative recovers it to working precision, which the spread-out members
/// of the cluster do not.
fn refine_cluster<T: Scalar>(p: &Polynomial<T>, centroid: Complex<T>, m: usize, spread: T) -> Cluster<T> {
    let target = p.derivative(m - 1);
    let mut z = centroid;
    if m > 1 {
        let reach = spread + spread + T::epsilon() * (T::one() + centroid.norm());
        for _ in 0..8 {
            let (value, slope) = target.eval_with_derivative(z);
            if value.is_zero() || slope.is_zero() {
                break;
            }
            let next = z - value / slope;
            if (next - centroid).norm() > reach || target.eval(next).norm() >= value.norm() {
                break;
            }
            z = next;
        }
    }
    Cluster {
        representative: z,
        multiplicity: m,
        residual: relative_residual(&target, z),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::matching_distance;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn one_far_root_among_small_ones() {
        // coefficient ratios near 1e13 used to overflow the first iterations
        let mut roots: Vec<Complex64> = (0..13)
            .map(|j| Complex64::from_polar(1.0 + 0.3 * j as f64, 0.7 * j as f64) + c(0.0, 3.0))
            .collect();
        roots.push(c(-24522.7, -23794.1));
        let p = Polynomial::from_roots(&roots).scale(c(15.0, 0.0));
        let found = find_roots_default(&p).unwrap();
        let d = matching_distance(&found.roots, &roots).unwrap();
        assert!(d < 1e-6, "{d}");
    }

    #[test]
    fn cauchy_bound_examples() {
        assert_eq!(cauchy_bound(&Polynomial::from_real(&[-1.0, 0.0, 1.0])).unwrap(), 2.0);
        assert_eq!(cauchy_bound(&Polynomial::monomial(c(1.0, 0.0), 7)).unwrap(), 1.0);
        assert_eq!(
            cauchy_bound(&Polynomial::from_real(&[10.0, -1.0, -10.0, 1.0])).unwrap(),
            11.0
        );
        assert!(cauchy_bound(&Polynomial::<f64>::zero()).is_err());
    }

    #[test]
    fn cube_roots_of_unity() {
        let p = Polynomial::from_real(&[-1.0, 0.0, 0.0, 1.0]);
        let rs = find_roots_default(&p).unwrap();
        let h = 3f64.sqrt() / 2.0;
        let expected = [c(1.0, 0.0), c(-0.5, h), c(-0.5, -h)];
        assert!(matching_distance(&rs.roots, &expected).unwrap() < 1e-14);
        assert_eq!(rs.clusters.len(), 3);
        assert!(rs.max_residual() <= rs.tol);
    }

    #[test]
    fn triple_root_forms_one_cluster() {
        // (z - 2)^3 expanded by hand
        let p = Polynomial::from_real(&[-8.0, 12.0, -6.0, 1.0]);
        let rs = find_roots_default(&p).unwrap();
        assert_eq!(rs.len(), 3);
        assert_eq!(rs.clusters.len(), 1);
        assert_eq!(rs.clusters[0].multiplicity, 3);
        assert!((rs.clusters[0].representative - c(2.0, 0.0)).norm() < 1e-12);
        assert!(rs.max_residual() <= rs.tol);
    }

    #[test]
    fn quadratic_formula_oracle() {
        let p = Polynomial::from_real(&[2.0, -6.0, 3.0]);
        let rs = find_roots_default(&p).unwrap();
        let d = (36.0f64 - 24.0).sqrt();
        let expected = [c((6.0 - d) / 6.0, 0.0), c((6.0 + d) / 6.0, 0.0)];
        assert!(matching_distance(&rs.roots, &expected).unwrap() < 1e-14);
        assert!((expected[1].re - (1.0 + 1.0 / 3f64.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn zeros_at_origin_are_exact() {
        let p = Polynomial::from_real(&[0.0, 0.0, -1.0, 1.0]);
        let rs = find_roots_default(&p).unwrap();
        assert_eq!(rs.roots.iter().filter(|z| z.is_zero()).count(), 2);
        assert_eq!(rs.clusters.len(), 2);
        let zn = Polynomial::monomial(c(1.0, 0.0), 5);
        let rs = find_roots_default(&zn).unwrap();
        assert_eq!(rs.clusters.len(), 1);
        assert_eq!((rs.clusters[0].representative, rs.clusters[0].multiplicity), (c(0.0, 0.0), 5));
    }

    #[test]
    fn symmetric_binomial_does_not_stall() {
        // z^n - c with roots on a circle
        for n in 2..=20 {
            let mut coeffs = vec![c(0.0, 0.0); n + 1];
            coeffs[0] = c(-3.0, 0.0);
            coeffs[n] = c(1.0, 0.0);
            let rs = find_roots_default(&Polynomial::new(coeffs)).unwrap();
            let r = 3f64.powf(1.0 / n as f64);
            for z in &rs.roots {
                assert!((z.norm() - r).abs() < 1e-12);
            }
            assert_eq!(rs.clusters.len(), n);
        }
    }

    #[test]
    fn constants_are_rejected() {
        assert!(matches!(
            find_roots_default(&Polynomial::constant(c(2.0, 0.0))),
            Err(Error::InvalidDegree(_))
        ));
    }

    #[test]
    fn iteration_cap_reports_best_effort() {
        let p = Polynomial::from_roots(&[c(1.0, 0.5), c(-2.0, 0.1), c(0.3, -1.0), c(4.0, 0.0)]);
        let opts = RootOptions { max_iter: 1, ..RootOptions::default() };
        match find_roots(&p, &opts) {
            Err(Error::NonConvergence { roots, residuals, .. }) => {
                assert_eq!(roots.len(), 4);
                assert_eq!(residuals.len(), 4);
            }
            other => panic!("expected NonConvergence, got {other:?}"),
        }
    }

    #[test]
    fn works_in_single_precision() {
        let p = Polynomial::<f32>::from_real(&[2.0, -3.0, 1.0]);
        let rs = find_roots_default(&p).unwrap();
        assert!((rs.roots[0].re - 1.0).abs() < 1e-5);
        assert!((rs.roots[1].re - 2.0).abs() < 1e-5);
    }
}
