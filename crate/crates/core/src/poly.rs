//! Dense complex polynomials with ascending coefficients.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{is_finite, Scalar};

/// Largest degree for which binomial-weighted operations are supported.
/// Every `C(n, k)` with `n <= N_MAX` fits exactly in an `i128`.
pub const N_MAX: usize = 60;

/// A complex polynomial stored as `coeffs[k] * z^k`.
///
/// The coefficient vector never ends in an exact zero; the zero polynomial has
/// no coefficients at all.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial<T> {
    coeffs: Vec<Complex<T>>,
}

impl<T: Scalar> Polynomial<T> {
    /// Builds a polynomial, dropping trailing exact zeros.
    pub fn new(coeffs: Vec<Complex<T>>) -> Self {
        debug_assert!(coeffs.iter().all(is_finite), "non-finite coefficient");
        let mut p = Polynomial { coeffs };
        p.trim_exact();
        p
    }

    /// Like [`Polynomial::new`] but rejects NaN or infinite coefficients.
    pub fn try_new(coeffs: Vec<Complex<T>>) -> Result<Self> {
        if let Some(k) = coeffs.iter().position(|c| !is_finite(c)) {
            return Err(Error::InvalidInput(format!("coefficient {k} is not finite")));
        }
        Ok(Self::new(coeffs))
    }

    pub fn from_real(coeffs: &[T]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex::new(c, T::zero())).collect())
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: Complex<T>) -> Self {
        Self::new(vec![c])
    }

    /// `c * z^k`
    pub fn monomial(c: Complex<T>, k: usize) -> Self {
        let mut coeffs = vec![Complex::zero(); k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    /// Monic polynomial whose zeros are exactly `roots`, counting multiplicity.
    pub fn from_roots(roots: &[Complex<T>]) -> Self {
        let mut coeffs = Vec::with_capacity(roots.len() + 1);
        coeffs.push(Complex::one());
        for &r in roots {
            // multiply by (z - r) in place
            coeffs.push(Complex::zero());
            for k in (1..coeffs.len()).rev() {
                let lower = coeffs[k - 1];
                coeffs[k] = lower - r * coeffs[k];
            }
            coeffs[0] = -r * coeffs[0];
        }
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex<T>> {
        self.coeffs
    }

    /// Coefficient of `z^k`, zero past the end.
    pub fn coeff(&self, k: usize) -> Complex<T> {
        self.coeffs.get(k).copied().unwrap_or_else(Complex::zero)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> Option<Complex<T>> {
        self.coeffs.last().copied()
    }

    /// Largest coefficient modulus, zero for the zero polynomial.
    pub fn max_abs_coeff(&self) -> T {
        self.coeffs.iter().map(|c| c.norm()).fold(T::zero(), T::max)
    }

    fn trim_exact(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    /// Drops trailing coefficients with modulus `<= rel * max|coeff|`.
    pub fn trimmed(mut self, rel: T) -> Self {
        let cutoff = rel * self.max_abs_coeff();
        while self.coeffs.last().is_some_and(|c| c.norm() <= cutoff) {
            self.coeffs.pop();
        }
        self
    }

    /// Trims with the scalar's default cancellation threshold.
    pub fn canonical(self) -> Self {
        self.trimmed(T::trim_tol())
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Complex<T>) -> Complex<T> {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex::zero(), |acc, &c| acc * z + c)
    }

    /// Value and first derivative in one Horner sweep.
    pub fn eval_with_derivative(&self, z: Complex<T>) -> (Complex<T>, Complex<T>) {
        let mut value = Complex::zero();
        let mut slope = Complex::zero();
        for &c in self.coeffs.iter().rev() {
            slope = slope * z + value;
            value = value * z + c;
        }
        (value, slope)
    }

    /// `sum |a_k| |z|^k`, the natural scale of `|p(z)|` under coefficient rounding.
    pub fn abs_eval(&self, z: Complex<T>) -> T {
        let r = z.norm();
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| acc * r + c.norm())
    }

    /// The `order`-fold formal derivative.
    pub fn derivative(&self, order: usize) -> Self {
        if order == 0 {
            return self.clone();
        }
        if order >= self.coeffs.len() {
            return Self::zero();
        }
        let coeffs = (order..self.coeffs.len())
            .map(|k| {
                // k (k-1) ... (k-order+1)
                let falling = ((k + 1 - order)..=k).fold(T::one(), |acc, j| acc * T::from_usize(j));
                self.coeffs[k] * falling
            })
            .collect();
        Self::new(coeffs)
    }

    pub fn scale(&self, factor: Complex<T>) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * factor).collect()).canonical()
    }

    /// Arithmetic mean of the zeros, read off the top two coefficients.
    pub fn mean_of_roots(&self) -> Result<Complex<T>> {
        let n = match self.degree() {
            Some(n) if n >= 1 => n,
            _ => {
                return Err(Error::InvalidDegree(
                    "mean of roots needs degree at least 1".into(),
                ))
            }
        };
        Ok(-self.coeffs[n - 1] / (self.coeffs[n] * T::from_usize(n)))
    }
}

impl<T: Scalar> Add for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn add(self, rhs: &Polynomial<T>) -> Polynomial<T> {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..len).map(|k| self.coeff(k) + rhs.coeff(k)).collect();
        Polynomial::new(coeffs).canonical()
    }
}

impl<T: Scalar> Sub for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn sub(self, rhs: &Polynomial<T>) -> Polynomial<T> {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..len).map(|k| self.coeff(k) - rhs.coeff(k)).collect();
        Polynomial::new(coeffs).canonical()
    }
}

impl<T: Scalar> Mul for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn mul(self, rhs: &Polynomial<T>) -> Polynomial<T> {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut coeffs = vec![Complex::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Polynomial::new(coeffs)
    }
}

impl<T: Scalar> Neg for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn neg(self) -> Polynomial<T> {
        Polynomial::new(self.coeffs.iter().map(|&c| -c).collect())
    }
}

/// `e_k` of the points via the incremental recurrence `e_k(w + x) = e_k(w) + x e_{k-1}(w)`.
pub fn elementary_symmetric<T: Scalar>(points: &[Complex<T>], k: usize) -> Result<Complex<T>> {
    if k > points.len() {
        return Err(Error::InvalidIndex {
            index: k,
            max: points.len(),
        });
    }
    Ok(elementary_symmetric_all(points)[k])
}

/// All of `e_0, ..., e_n` for the given points.
pub fn elementary_symmetric_all<T: Scalar>(points: &[Complex<T>]) -> Vec<Complex<T>> {
    let mut e = vec![Complex::zero(); points.len() + 1];
    e[0] = Complex::one();
    for (count, &x) in points.iter().enumerate() {
        for k in (1..=count + 1).rev() {
            let prev = e[k - 1];
            e[k] += x * prev;
        }
    }
    e
}

/// Exact `C(n, k)` for `n <= N_MAX`.
pub fn binomial(n: usize, k: usize) -> Result<i128> {
    if n > N_MAX {
        return Err(Error::DegreeTooLarge {
            degree: n,
            max: N_MAX,
        });
    }
    if k > n {
        return Err(Error::InvalidIndex { index: k, max: n });
    }
    let k = k.min(n - k);
    let mut acc: i128 = 1;
    for i in 0..k {
        // exact: acc * (n - i) is divisible by i + 1 at every step
        acc = acc * (n - i) as i128 / (i + 1) as i128;
    }
    Ok(acc)
}

/// `C(n, k)` rounded once into the scalar type.
pub fn binomial_scalar<T: Scalar>(n: usize, k: usize) -> Result<T> {
    binomial(n, k).map(|c| T::from(c).expect("binomial fits the scalar type"))
}
