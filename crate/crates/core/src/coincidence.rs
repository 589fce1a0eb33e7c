//! Symmetric multiaffine polynomials in the elementary-symmetric basis, and
//! coincidence solving: given points `w`, find `z` in a region with
//! `p(w_1, ..., w_n) = p(z, ..., z)`.
//!
//! Two hypotheses are supported. The classical one asks for the points
//! themselves to lie in the region (total degree `n`, or any degree when the
//! region is convex). The extended one only asks for the zeros of
//! `q^(n-m)` to lie in the region, where `q = prod (z - w_i)` and `m` is the
//! total degree; it holds for disk exteriors as well.

use num_complex::Complex;
use num_traits::Zero;

use crate::apolarity::{pick_in_region, relative_apolarity, require_inside};
use crate::error::{Error, Result};
use crate::poly::{binomial_scalar, elementary_symmetric_all, Polynomial, N_MAX};
use crate::regions::CircularRegion;
use crate::rootfind::{find_roots, RootOptions, RootSet};
use crate::scalar::{to_f64, Scalar};

/// `p(z_1, ..., z_n) = sum_{k=0}^{m} E_k e_k(z_1, ..., z_n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMultiaffine<T> {
    n: usize,
    coeffs: Vec<Complex<T>>,
}

impl<T: Scalar> SymmetricMultiaffine<T> {
    /// Infers the total degree `m` from the last coefficient above the trim threshold.
    pub fn new(n: usize, coeffs: Vec<Complex<T>>) -> Result<Self> {
        let trimmed = Polynomial::new(coeffs).canonical().into_coeffs();
        let m = trimmed.len().saturating_sub(1);
        Self::with_degree(n, trimmed, m)
    }

    /// Keeps an explicit total degree `m`, padding with zeros as needed.
    pub fn with_degree(n: usize, mut coeffs: Vec<Complex<T>>, m: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("need at least one variable".into()));
        }
        if n > N_MAX {
            return Err(Error::DegreeTooLarge {
                degree: n,
                max: N_MAX,
            });
        }
        if m > n {
            return Err(Error::InvalidInput(format!(
                "total degree {m} exceeds the number of variables {n}"
            )));
        }
        if coeffs.len() > m + 1 && coeffs[m + 1..].iter().any(|c| !c.is_zero()) {
            return Err(Error::InvalidInput(format!(
                "nonzero coefficients beyond the declared degree {m}"
            )));
        }
        if coeffs.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::InvalidInput("non-finite coefficient".into()));
        }
        coeffs.resize(m + 1, Complex::zero());
        Ok(SymmetricMultiaffine { n, coeffs })
    }

    /// The single elementary symmetric polynomial `e_k` in `n` variables.
    pub fn elementary(n: usize, k: usize) -> Result<Self> {
        let mut coeffs = vec![Complex::zero(); k + 1];
        coeffs[k] = Complex::new(T::one(), T::zero());
        Self::with_degree(n, coeffs, k)
    }

    /// Number of variables.
    pub fn arity(&self) -> usize {
        self.n
    }

    /// Total degree `m`.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn evaluate(&self, w: &[Complex<T>]) -> Result<Complex<T>> {
        if w.len() != self.n {
            return Err(Error::InvalidInput(format!(
                "expected {} points, got {}",
                self.n,
                w.len()
            )));
        }
        let e = elementary_symmetric_all(w);
        Ok(self.coeffs.iter().zip(&e).map(|(&ek, &e)| ek * e).sum())
    }

    /// `r(z) = p(z, ..., z)`, whose coefficients are `E_k C(n, k)`.
    pub fn diagonal(&self) -> Result<Polynomial<T>> {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, &ek)| binomial_scalar::<T>(self.n, k).map(|b| ek * b))
            .collect::<Result<Vec<_>>>()?;
        Ok(Polynomial::new(coeffs))
    }

    /// Same polynomial minus the constant `value`.
    pub fn shifted(&self, value: Complex<T>) -> Self {
        let mut out = self.clone();
        out.coeffs[0] -= value;
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoincidenceOptions<T> {
    pub roots: RootOptions<T>,
    pub membership_tol: T,
}

impl<T: Scalar> Default for CoincidenceOptions<T> {
    fn default() -> Self {
        CoincidenceOptions {
            roots: RootOptions::default(),
            membership_tol: T::membership_tol(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Theorem1Hypothesis<T> {
    pub holds: bool,
    /// `q^(n-m)` for `q = prod (z - w_i)`.
    pub derivative: Polynomial<T>,
    pub derivative_roots: RootSet<T>,
    /// Worst root outside the region and its signed distance, when the hypothesis fails.
    pub offending: Option<(Complex<T>, T)>,
}

/// Checks whether every zero of `q^(n-m)` lies in `region`.
pub fn theorem1_hypothesis<T: Scalar>(
    w: &[Complex<T>],
    m: usize,
    region: &CircularRegion<T>,
    opts: &CoincidenceOptions<T>,
) -> Result<Theorem1Hypothesis<T>> {
    let n = w.len();
    if m == 0 || m > n {
        return Err(Error::InvalidInput(format!(
            "need 1 <= m <= n, got m = {m}, n = {n}"
        )));
    }
    let derivative = Polynomial::from_roots(w).derivative(n - m);
    let derivative_roots = find_roots(&derivative, &opts.roots)?;
    let offending = derivative_roots
        .clusters
        .iter()
        .map(|c| c.representative)
        .filter(|&z| !region.contains(z, opts.membership_tol))
        .map(|z| (z, region.signed_distance(z)))
        .max_by(|a, b| a.1.total_cmp(&b.1));
    Ok(Theorem1Hypothesis {
        holds: offending.is_none(),
        derivative,
        derivative_roots,
        offending,
    })
}

/// Zeros of `p(z, ..., z) - p(w_1, ..., w_n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalSolution<T> {
    /// `p(w_1, ..., w_n)`.
    pub value: Complex<T>,
    pub equation: Polynomial<T>,
    /// `None` when the equation vanishes identically, so every `z` solves it.
    pub roots: Option<RootSet<T>>,
}

pub fn solve_diagonal<T: Scalar>(
    p: &SymmetricMultiaffine<T>,
    w: &[Complex<T>],
    opts: &RootOptions<T>,
) -> Result<DiagonalSolution<T>> {
    let value = p.evaluate(w)?;
    let diagonal = p.diagonal()?;
    // drop cancellation noise relative to the diagonal itself, not the difference
    let cutoff = T::trim_tol() * diagonal.max_abs_coeff().max(value.norm());
    let mut coeffs: Vec<Complex<T>> = (0..=p.degree()).map(|k| diagonal.coeff(k)).collect();
    coeffs[0] -= value;
    while coeffs.last().is_some_and(|c| c.norm() <= cutoff) {
        coeffs.pop();
    }
    let equation = Polynomial::new(coeffs);
    let roots = match equation.degree() {
        None => None,
        Some(0) => return Err(Error::DegenerateDiagonal),
        Some(_) => Some(find_roots(&equation, opts)?),
    };
    Ok(DiagonalSolution {
        value,
        equation,
        roots,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoincidenceWitness<T> {
    pub point: Complex<T>,
    /// `p(w_1, ..., w_n)`.
    pub value: Complex<T>,
    pub residual: T,
    /// The equation holds identically; `point` is just some point of the region.
    pub degenerate: bool,
}

fn select_witness<T: Scalar>(
    solution: DiagonalSolution<T>,
    region: &CircularRegion<T>,
    tol: T,
) -> Result<CoincidenceWitness<T>> {
    let Some(roots) = solution.roots else {
        return Ok(CoincidenceWitness {
            point: region.interior_point(),
            value: solution.value,
            residual: T::zero(),
            degenerate: true,
        });
    };
    match pick_in_region(&roots, region, tol) {
        Some(chosen) => Ok(CoincidenceWitness {
            point: chosen.representative,
            value: solution.value,
            residual: chosen.residual,
            degenerate: false,
        }),
        None => {
            let nearest = roots
                .roots
                .iter()
                .map(|&z| region.signed_distance(z))
                .fold(T::infinity(), T::min);
            Err(Error::TheoremViolation(format!(
                "no solution of the diagonal equation lies in the region; nearest signed distance {:e}",
                to_f64(nearest)
            )))
        }
    }
}

fn constant_witness<T: Scalar>(
    p: &SymmetricMultiaffine<T>,
    region: &CircularRegion<T>,
) -> CoincidenceWitness<T> {
    CoincidenceWitness {
        point: region.interior_point(),
        value: p.coeffs()[0],
        residual: T::zero(),
        degenerate: true,
    }
}

/// Witness under the extended hypothesis on the zeros of `q^(n-m)`.
pub fn coincidence_witness<T: Scalar>(
    p: &SymmetricMultiaffine<T>,
    w: &[Complex<T>],
    region: &CircularRegion<T>,
    opts: &CoincidenceOptions<T>,
) -> Result<CoincidenceWitness<T>> {
    p.evaluate(w)?;
    if p.degree() == 0 {
        return Ok(constant_witness(p, region));
    }
    let hypothesis = theorem1_hypothesis(w, p.degree(), region, opts)?;
    if let Some((z, d)) = hypothesis.offending {
        return Err(Error::HypothesisViolated {
            reason: format!(
                "zero of q^(n-m) not contained in the {} region",
                region.kind_name()
            ),
            offending: Some(crate::scalar::to_c64(z)),
            signed_distance: Some(to_f64(d)),
        });
    }
    let solution = solve_diagonal(p, w, &opts.roots)?;
    select_witness(solution, region, opts.membership_tol)
}

/// Witness under the classical hypothesis: the points themselves lie in the
/// region, and either `m = n` or the region is convex.
pub fn classic_coincidence_witness<T: Scalar>(
    p: &SymmetricMultiaffine<T>,
    w: &[Complex<T>],
    region: &CircularRegion<T>,
    opts: &CoincidenceOptions<T>,
) -> Result<CoincidenceWitness<T>> {
    p.evaluate(w)?;
    require_inside(w, region, opts.membership_tol, "point")?;
    if p.degree() < p.arity() && !region.is_convex() {
        return Err(Error::hypothesis(format!(
            "total degree {} is below the arity {} and the region is not convex",
            p.degree(),
            p.arity()
        )));
    }
    if p.degree() == 0 {
        return Ok(constant_witness(p, region));
    }
    let solution = solve_diagonal(p, w, &opts.roots)?;
    select_witness(solution, region, opts.membership_tol)
}

/// `|A(q^(n-m), r)|` at frame `m`, relative to its scale, where `r` is the
/// diagonal of `p` shifted so that `p(w_1, ..., w_n) = 0`. Vanishes identically.
pub fn theorem1_apolarity_residual<T: Scalar>(
    p: &SymmetricMultiaffine<T>,
    w: &[Complex<T>],
) -> Result<T> {
    let value = p.evaluate(w)?;
    let normalized = p.shifted(value);
    let m = p.degree();
    let derivative = Polynomial::from_roots(w).derivative(p.arity() - m);
    relative_apolarity(&derivative, &normalized.diagonal()?, m)
}
