//! The apolarity functional `A(a, b)` and the Grace-theorem witness search.

use num_complex::Complex;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::poly::{binomial_scalar, Polynomial, N_MAX};
use crate::regions::CircularRegion;
use crate::rootfind::{find_roots, Cluster, RootOptions, RootSet};
use crate::scalar::{to_c64, to_f64, Scalar};

fn check_frame<T: Scalar>(a: &Polynomial<T>, b: &Polynomial<T>, n: usize) -> Result<()> {
    if n > N_MAX {
        return Err(Error::DegreeTooLarge {
            degree: n,
            max: N_MAX,
        });
    }
    for (name, p) in [("a", a), ("b", b)] {
        if p.degree().is_some_and(|d| d > n) {
            return Err(Error::InvalidInput(format!(
                "{name} has degree {} above the frame {n}",
                p.degree().unwrap_or(0)
            )));
        }
    }
    Ok(())
}

/// `sum_k (-1)^k a_k b_{n-k} / C(n, k)` with both polynomials read as degree-`n` forms.
pub fn apolarity_functional<T: Scalar>(
    a: &Polynomial<T>,
    b: &Polynomial<T>,
    n: usize,
) -> Result<Complex<T>> {
    check_frame(a, b, n)?;
    let mut sum = Complex::zero();
    for k in 0..=n {
        let term = a.coeff(k) * b.coeff(n - k) / binomial_scalar::<T>(n, k)?;
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    Ok(sum)
}

/// `sum_k |a_k| |b_{n-k}| / C(n, k)`, the magnitude scale of the functional.
pub fn apolarity_scale<T: Scalar>(a: &Polynomial<T>, b: &Polynomial<T>, n: usize) -> Result<T> {
    check_frame(a, b, n)?;
    let mut sum = T::zero();
    for k in 0..=n {
        sum += a.coeff(k).norm() * b.coeff(n - k).norm() / binomial_scalar::<T>(n, k)?;
    }
    Ok(sum)
}

/// `|A(a, b)|` relative to its own scale; zero when both vanish.
pub fn relative_apolarity<T: Scalar>(a: &Polynomial<T>, b: &Polynomial<T>, n: usize) -> Result<T> {
    let value = apolarity_functional(a, b, n)?.norm();
    let scale = apolarity_scale(a, b, n)?;
    if value.is_zero() {
        Ok(T::zero())
    } else {
        Ok(value / scale)
    }
}

pub fn is_apolar<T: Scalar>(a: &Polynomial<T>, b: &Polynomial<T>, n: usize, rtol: T) -> Result<bool> {
    Ok(relative_apolarity(a, b, n)? <= rtol)
}

/// A polynomial `b` of degree at most `n` apolar to `a`, with every coefficient
/// drawn uniformly from the unit box except one solved for.
pub fn make_apolar<T: Scalar>(a: &Polynomial<T>, n: usize, seed: u64) -> Result<Polynomial<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    make_apolar_with(a, n, &mut rng)
}

pub fn make_apolar_with<T: Scalar, R: Rng>(
    a: &Polynomial<T>,
    n: usize,
    rng: &mut R,
) -> Result<Polynomial<T>> {
    if a.is_zero() {
        return Err(Error::InvalidInput("cannot pair with the zero polynomial".into()));
    }
    check_frame(a, a, n)?;
    // b_j is paired with (-1)^{n-j} a_{n-j} / C(n, j)
    let mut weights = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let w = a.coeff(n - j) / binomial_scalar::<T>(n, j)?;
        weights.push(if (n - j) % 2 == 0 { w } else { -w });
    }
    let solved = (0..=n)
        .max_by(|&i, &j| weights[i].norm().total_cmp(&weights[j].norm()))
        .expect("n + 1 candidates");

    let mut coeffs: Vec<Complex<T>> = (0..=n)
        .map(|_| {
            let re: f64 = rng.gen_range(-1.0..1.0);
            let im: f64 = rng.gen_range(-1.0..1.0);
            Complex::new(T::lit(re), T::lit(im))
        })
        .collect();
    coeffs[solved] = Complex::zero();
    let rest: Complex<T> = (0..=n).map(|j| weights[j] * coeffs[j]).sum();
    coeffs[solved] = -rest / weights[solved];
    Ok(Polynomial::new(coeffs))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraceOptions<T> {
    pub roots: RootOptions<T>,
    pub membership_tol: T,
    pub apolar_rtol: T,
}

impl<T: Scalar> Default for GraceOptions<T> {
    fn default() -> Self {
        GraceOptions {
            roots: RootOptions::default(),
            membership_tol: T::membership_tol(),
            apolar_rtol: T::membership_tol(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraceWitness<T> {
    pub point: Complex<T>,
    pub residual: T,
    pub a_roots: RootSet<T>,
    pub b_roots: RootSet<T>,
}

/// Preferred zero inside `region`, by cluster: smallest residual, then
/// smallest modulus.
pub(crate) fn pick_in_region<T: Scalar>(
    roots: &RootSet<T>,
    region: &CircularRegion<T>,
    tol: T,
) -> Option<Cluster<T>> {
    roots
        .clusters
        .iter()
        .filter(|c| region.contains(c.representative, tol))
        .min_by(|a, b| {
            a.residual
                .total_cmp(&b.residual)
                .then(a.representative.norm().total_cmp(&b.representative.norm()))
        })
        .copied()
}

pub(crate) fn representatives<T: Scalar>(roots: &RootSet<T>) -> Vec<Complex<T>> {
    roots.clusters.iter().map(|c| c.representative).collect()
}

/// Worst root outside `region`, as a hypothesis-violation error.
pub(crate) fn require_inside<T: Scalar>(
    roots: &[Complex<T>],
    region: &CircularRegion<T>,
    tol: T,
    what: &str,
) -> Result<()> {
    let worst = roots
        .iter()
        .filter(|&&z| !region.contains(z, tol))
        .max_by(|x, y| region.signed_distance(**x).total_cmp(&region.signed_distance(**y)));
    match worst {
        None => Ok(()),
        Some(&z) => Err(Error::HypothesisViolated {
            reason: format!("{what} not contained in the {} region", region.kind_name()),
            offending: Some(to_c64(z)),
            signed_distance: Some(to_f64(region.signed_distance(z))),
        }),
    }
}

/// A zero of `b` inside `region`, given that `a` and `b` are apolar of degree
/// `n` and every zero of `a` lies in `region`.
pub fn grace_witness<T: Scalar>(
    a: &Polynomial<T>,
    b: &Polynomial<T>,
    n: usize,
    region: &CircularRegion<T>,
    opts: &GraceOptions<T>,
) -> Result<GraceWitness<T>> {
    check_frame(a, b, n)?;
    if n == 0 || a.degree() != Some(n) || b.degree() != Some(n) {
        return Err(Error::InvalidInput(format!(
            "both polynomials must have exact degree {n} (got {:?} and {:?})",
            a.degree(),
            b.degree()
        )));
    }
    let rel = relative_apolarity(a, b, n)?;
    if rel > opts.apolar_rtol {
        return Err(Error::hypothesis(format!(
            "pair is not apolar: relative |A(a,b)| = {:e}",
            to_f64(rel)
        )));
    }
    let a_roots = find_roots(a, &opts.roots)?;
    require_inside(&representatives(&a_roots), region, opts.membership_tol, "zero of a")?;

    let b_roots = find_roots(b, &opts.roots)?;
    match pick_in_region(&b_roots, region, opts.membership_tol) {
        Some(chosen) => Ok(GraceWitness {
            point: chosen.representative,
            residual: chosen.residual,
            a_roots,
            b_roots,
        }),
        None => {
            let nearest = b_roots
                .roots
                .iter()
                .map(|&z| region.signed_distance(z))
                .fold(T::infinity(), T::min);
            Err(Error::TheoremViolation(format!(
                "no zero of b lies in the region; nearest signed distance {:e}",
                to_f64(nearest)
            )))
        }
    }
}
