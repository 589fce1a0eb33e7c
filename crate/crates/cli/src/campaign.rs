//! Deterministic randomized campaigns over the verified properties.
//!
//! Trial `i` of a campaign draws everything from a generator seeded with a
//! 64-bit mix of `(seed, i)`, so trials are independent, reproducible, and can
//! run in any order; the report is assembled by trial index.

use std::time::Instant;

use polygeom::{
    apolarity_functional, apolarity_scale, check_theorem2, classic_coincidence_witness,
    coincidence_witness, factorization_roots, find_roots, gauss_lucas_report,
    generate_theorem2_instance_with, grace_witness, kth_derivative_closed_form,
    kth_derivative_identity, make_apolar_with, matching_distance, smallest_enclosing_disk,
    theorem1_apolarity_residual, CircularRegion64, CoincidenceOptions, Complex64, Error,
    GraceOptions, Polynomial64, RootOptions, RootSet64, SymmetricMultiaffine64, Theorem2Options,
    N_MAX,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::json::{
    from_c, from_cs, to_c, to_cs, MultiaffineJson, RegionJson, Theorem2InstanceJson, C, SCHEMA,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Property {
    Grace,
    WalshClassic,
    Theorem1Convex,
    Theorem1Exterior,
    Theorem2,
    ApolarityIdentity,
    DerivativeIdentity,
    GaussLucas,
}

impl Property {
    pub const ALL: [Property; 8] = [
        Property::Grace,
        Property::WalshClassic,
        Property::Theorem1Convex,
        Property::Theorem1Exterior,
        Property::Theorem2,
        Property::ApolarityIdentity,
        Property::DerivativeIdentity,
        Property::GaussLucas,
    ];

    /// Default `(min, max)` size parameter of generated instances.
    pub fn default_n_range(self) -> (usize, usize) {
        match self {
            Property::Grace
            | Property::WalshClassic
            | Property::Theorem1Convex
            | Property::Theorem1Exterior => (1, 12),
            Property::Theorem2 => (3, 15),
            Property::ApolarityIdentity => (1, 20),
            Property::DerivativeIdentity => (2, 20),
            Property::GaussLucas => (2, 15),
        }
    }

    fn min_n(self) -> usize {
        match self {
            Property::Theorem2 => 3,
            Property::DerivativeIdentity | Property::GaussLucas => 2,
            _ => 1,
        }
    }

    /// Name of the tolerance that decides pass or fail.
    pub fn governing_tolerance(self) -> &'static str {
        match self {
            Property::Grace
            | Property::WalshClassic
            | Property::Theorem1Convex
            | Property::Theorem1Exterior
            | Property::Theorem2 => "membership_tol",
            Property::ApolarityIdentity => "identity_tol",
            Property::DerivativeIdentity => "derivative_identity_tol",
            Property::GaussLucas => "gauss_lucas_tol",
        }
    }
}

/// Fixed instances substituted for every generated trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Fixture {
    /// `p = z1 + z2` at `w = (-1, 1)` over the closed exterior of the unit disk.
    Counterexample,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub root_tol: f64,
    pub max_iter: usize,
    pub membership_tol: f64,
    pub apolar_rtol: f64,
    pub identity_tol: f64,
    pub derivative_identity_tol: f64,
    pub factorization_tol: f64,
    pub gauss_lucas_tol: f64,
    pub mean_tol: f64,
    /// Soft check on where derivative zeros outside the disk may sit.
    pub structure_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            root_tol: 1e-12,
            max_iter: 200,
            membership_tol: 1e-9,
            apolar_rtol: 1e-9,
            identity_tol: 1e-10,
            derivative_identity_tol: 1e-11,
            factorization_tol: 1e-8,
            gauss_lucas_tol: 1e-7,
            mean_tol: 1e-12,
            structure_tol: 1e-6,
        }
    }
}

impl Tolerances {
    fn root_options(&self, relax: bool) -> RootOptions<f64> {
        RootOptions {
            tol: if relax { self.root_tol * 10.0 } else { self.root_tol },
            max_iter: self.max_iter,
            ..RootOptions::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub property: Property,
    pub trials: usize,
    pub seed: u64,
    pub n_range: (usize, usize),
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixture: Option<Fixture>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

impl CampaignConfig {
    pub fn new(property: Property, trials: usize, seed: u64) -> Self {
        CampaignConfig {
            property,
            trials,
            seed,
            n_range: property.default_n_range(),
            fixture: None,
            tolerances: Tolerances::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.n_range;
        if self.trials == 0 {
            return Err(CliError::InvalidInput("trials must be at least 1".into()));
        }
        if lo < self.property.min_n() || hi > N_MAX || lo > hi {
            return Err(CliError::InvalidInput(format!(
                "n range ({lo}, {hi}) must lie within [{}, {N_MAX}] and be ordered",
                self.property.min_n()
            )));
        }
        if self.fixture.is_some() && self.property != Property::WalshClassic {
            return Err(CliError::InvalidInput(
                "the counterexample fixture applies to walsh_classic only".into(),
            ));
        }
        let t = &self.tolerances;
        let positive = [
            t.root_tol,
            t.membership_tol,
            t.apolar_rtol,
            t.identity_tol,
            t.derivative_identity_tol,
            t.factorization_tol,
            t.gauss_lucas_tol,
            t.mean_tol,
            t.structure_tol,
        ];
        if positive.iter().any(|x| !(x.is_finite() && *x > 0.0)) || t.max_iter == 0 {
            return Err(CliError::InvalidInput("tolerances must be positive".into()));
        }
        Ok(())
    }
}

/// One generated trial, self-contained for replay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "property", rename_all = "snake_case")]
pub enum Instance {
    Grace {
        n: usize,
        a: Vec<C>,
        b: Vec<C>,
        region: RegionJson,
    },
    WalshClassic(CoincidenceInstance),
    Theorem1Convex(CoincidenceInstance),
    Theorem1Exterior(CoincidenceInstance),
    Theorem2 {
        instance: Theorem2InstanceJson,
        k: usize,
    },
    ApolarityIdentity {
        n: usize,
        a: Vec<C>,
        a2: Vec<C>,
        b: Vec<C>,
        alpha: C,
        point: C,
    },
    DerivativeIdentity {
        n: usize,
        k: usize,
        y: C,
    },
    GaussLucas {
        coeffs: Vec<C>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoincidenceInstance {
    pub multiaffine: MultiaffineJson,
    pub points: Vec<C>,
    pub region: RegionJson,
}

impl Instance {
    pub fn property(&self) -> Property {
        match self {
            Instance::Grace { .. } => Property::Grace,
            Instance::WalshClassic(_) => Property::WalshClassic,
            Instance::Theorem1Convex(_) => Property::Theorem1Convex,
            Instance::Theorem1Exterior(_) => Property::Theorem1Exterior,
            Instance::Theorem2 { .. } => Property::Theorem2,
            Instance::ApolarityIdentity { .. } => Property::ApolarityIdentity,
            Instance::DerivativeIdentity { .. } => Property::DerivativeIdentity,
            Instance::GaussLucas { .. } => Property::GaussLucas,
        }
    }

    /// Counterexample for non-convex regions: `e_1` in two
    /// variables at `(-1, 1)`, region the closed exterior of the unit disk.
    pub fn counterexample() -> Self {
        let p = SymmetricMultiaffine64::elementary(2, 1).expect("valid");
        let region = CircularRegion64::exterior(Complex64::new(0.0, 0.0), 1.0, true).expect("valid");
        Instance::WalshClassic(CoincidenceInstance {
            multiaffine: MultiaffineJson::from_multiaffine(&p),
            points: vec![[-1.0, 0.0], [1.0, 0.0]],
            region: RegionJson::from_region(&region),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    /// The instance does not meet the theorem's hypothesis; nothing to check.
    HypothesisViolation,
    Fail,
    /// Numerical trouble or malformed input, not a theorem violation.
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
    /// The root tolerance had to be relaxed tenfold.
    #[serde(default)]
    pub relaxed: bool,
}

impl Evaluation {
    fn pass() -> Self {
        Evaluation {
            verdict: Verdict::Pass,
            diagnostic: None,
            warning: None,
            relaxed: false,
        }
    }

    fn fail(diagnostic: String) -> Self {
        Evaluation {
            verdict: Verdict::Fail,
            diagnostic: Some(diagnostic),
            ..Self::pass()
        }
    }

    fn from_error(e: &Error) -> Self {
        let verdict = match e {
            Error::HypothesisViolated { .. } => Verdict::HypothesisViolation,
            Error::TheoremViolation(_) => Verdict::Fail,
            _ => Verdict::Error,
        };
        Evaluation {
            verdict,
            diagnostic: Some(e.to_string()),
            ..Self::pass()
        }
    }
}

fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generator seed of trial `index` in a campaign seeded with `seed`.
pub fn trial_seed(seed: u64, index: usize) -> u64 {
    mix64(seed ^ mix64(index as u64))
}

fn unit_box<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

fn in_disk<R: Rng>(rng: &mut R, center: Complex64, radius: f64) -> Complex64 {
    center + Complex64::from_polar(radius * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..std::f64::consts::TAU))
}

fn nonzero<R: Rng>(rng: &mut R) -> Complex64 {
    loop {
        let z = unit_box(rng);
        if z.norm() >= 0.1 {
            return z;
        }
    }
}

fn random_coeffs<R: Rng>(rng: &mut R, len: usize) -> Vec<Complex64> {
    let mut cs: Vec<Complex64> = (0..len).map(|_| unit_box(rng)).collect();
    if let Some(last) = cs.last_mut() {
        *last = nonzero(rng);
    }
    cs
}

/// Root finding with one tenfold-relaxed retry on non-convergence.
fn roots_with_retry(p: &Polynomial64, tol: &Tolerances) -> polygeom::Result<(RootSet64, bool)> {
    match find_roots(p, &tol.root_options(false)) {
        Err(Error::NonConvergence { .. }) => Ok((find_roots(p, &tol.root_options(true))?, true)),
        other => other.map(|r| (r, false)),
    }
}

fn random_multiaffine<R: Rng>(rng: &mut R, n: usize, m: usize) -> SymmetricMultiaffine64 {
    SymmetricMultiaffine64::with_degree(n, random_coeffs(rng, m + 1), m).expect("m <= n")
}

fn coincidence_instance(p: &SymmetricMultiaffine64, w: &[Complex64], region: &CircularRegion64) -> CoincidenceInstance {
    CoincidenceInstance {
        multiaffine: MultiaffineJson::from_multiaffine(p),
        points: to_cs(w),
        region: RegionJson::from_region(region),
    }
}

/// Generates the instance for one trial.
pub fn generate_instance(
    config: &CampaignConfig,
    seed: u64,
) -> polygeom::Result<Instance> {
    if config.fixture == Some(Fixture::Counterexample) {
        return Ok(Instance::counterexample());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = config.n_range;
    let lo = lo.max(config.property.min_n());
    let n = rng.gen_range(lo..=hi.max(lo));
    let tol = &config.tolerances;
    let rng = &mut rng;
    Ok(match config.property {
        Property::Grace => {
            let (region, roots) = if rng.gen_bool(0.5) {
                let radius = 10f64.powf(rng.gen_range(-1.0..0.5));
                // a small disk far from the origin makes the expanded
                // coefficients too ill-conditioned to recover the zeros
                let center = unit_box(rng) * (2.0 * radius);
                let roots: Vec<Complex64> = (0..n).map(|_| in_disk(rng, center, radius)).collect();
                (CircularRegion64::disk(center, radius, true)?, roots)
            } else {
                let direction = Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));
                let offset = rng.gen_range(-2.0..2.0);
                let roots = (0..n)
                    .map(|_| {
                        let z = direction * offset + unit_box(rng) * 3.0;
                        let excess = (z * direction.conj()).re - offset;
                        if excess > 0.0 {
                            z - direction * (2.0 * excess)
                        } else {
                            z
                        }
                    })
                    .collect();
                (CircularRegion64::half_plane(direction, offset, true)?, roots)
            };
            let a = Polynomial64::from_roots(&roots).scale(nonzero(rng));
            let b = make_apolar_with(&a, n, rng)?;
            Instance::Grace {
                n,
                a: to_cs(a.coeffs()),
                b: to_cs(b.coeffs()),
                region: RegionJson::from_region(&region),
            }
        }
        Property::WalshClassic => {
            let p = random_multiaffine(rng, n, n);
            let scale = rng.gen_range(0.5..2.0);
            let w: Vec<Complex64> = (0..n).map(|_| unit_box(rng) * scale).collect();
            let region = smallest_enclosing_disk(&w)?.inflated(1e-9).to_region();
            Instance::WalshClassic(coincidence_instance(&p, &w, &region))
        }
        Property::Theorem1Convex | Property::Theorem1Exterior => {
            let m = rng.gen_range(1..=n);
            let p = random_multiaffine(rng, n, m);
            let w: Vec<Complex64> = (0..n).map(|_| unit_box(rng)).collect();
            let d = Polynomial64::from_roots(&w).derivative(n - m);
            let (roots, _) = roots_with_retry(&d, tol)?;
            let zs: Vec<Complex64> = roots.clusters.iter().map(|c| c.representative).collect();
            let region = if config.property == Property::Theorem1Convex {
                convex_region_around(rng, &zs)?
            } else {
                exterior_region_around(rng, &zs)?
            };
            let inst = coincidence_instance(&p, &w, &region);
            if config.property == Property::Theorem1Convex {
                Instance::Theorem1Convex(inst)
            } else {
                Instance::Theorem1Exterior(inst)
            }
        }
        Property::Theorem2 => {
            let k = rng.gen_range(1..n);
            let radius = 10f64.powf(rng.gen_range(-1.0..0.7));
            let outer_distance = match rng.gen_range(0..4) {
                0 => radius * rng.gen_range(0.05..0.9),
                1 => radius * (1.0 + 10f64.powf(rng.gen_range(-6.0..-2.0))),
                2 => radius * rng.gen_range(1.1..5.0),
                _ => radius * 10f64.powf(rng.gen_range(1.0..4.0)),
            };
            let inst = generate_theorem2_instance_with(n, rng, radius, outer_distance)?;
            Instance::Theorem2 {
                instance: Theorem2InstanceJson::from_instance(&inst),
                k,
            }
        }
        Property::ApolarityIdentity => {
            let mut coeffs = || to_cs(&(0..=n).map(|_| unit_box(rng)).collect::<Vec<_>>());
            let (a, a2, b) = (coeffs(), coeffs(), coeffs());
            Instance::ApolarityIdentity {
                n,
                a,
                a2,
                b,
                alpha: to_c(unit_box(rng)),
                point: to_c(unit_box(rng)),
            }
        }
        Property::DerivativeIdentity => {
            let k = rng.gen_range(1..n);
            Instance::DerivativeIdentity {
                n,
                k,
                y: to_c(unit_box(rng)),
            }
        }
        Property::GaussLucas => Instance::GaussLucas {
            coeffs: to_cs(&random_coeffs(rng, n + 1)),
        },
    })
}

/// Either the inflated enclosing disk of `zs` or a half-plane containing them.
fn convex_region_around<R: Rng>(rng: &mut R, zs: &[Complex64]) -> polygeom::Result<CircularRegion64> {
    if rng.gen_bool(0.5) {
        return Ok(smallest_enclosing_disk(zs)?.inflated(1e-9).to_region());
    }
    let direction = Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));
    let reach = zs
        .iter()
        .map(|z| (z * direction.conj()).re)
        .fold(f64::NEG_INFINITY, f64::max);
    let scale = 1.0 + zs.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let slack = if rng.gen_bool(0.5) {
        1e-9 * scale
    } else {
        rng.gen_range(0.0..1.0)
    };
    CircularRegion64::half_plane(direction, reach + slack, true)
}

/// Closed exterior of a disk whose center sits among `zs` and whose radius is
/// at most the distance to the nearest of them.
fn exterior_region_around<R: Rng>(rng: &mut R, zs: &[Complex64]) -> polygeom::Result<CircularRegion64> {
    let (mut lo, mut hi) = (zs[0], zs[0]);
    for z in zs {
        lo = Complex64::new(lo.re.min(z.re), lo.im.min(z.im));
        hi = Complex64::new(hi.re.max(z.re), hi.im.max(z.im));
    }
    let pad = (hi - lo).norm() * 0.2 + 0.1;
    let nearest = |c: Complex64| zs.iter().map(|z| (z - c).norm()).fold(f64::INFINITY, f64::min);
    let mut center = lo;
    let mut gap = 0.0;
    for _ in 0..100 {
        center = Complex64::new(
            rng.gen_range(lo.re - pad..hi.re + pad),
            rng.gen_range(lo.im - pad..hi.im + pad),
        );
        gap = nearest(center);
        if gap > 1e-3 * pad {
            break;
        }
    }
    let radius = if rng.gen_bool(0.5) { gap / 2.0 } else { gap * 0.999 };
    CircularRegion64::exterior(center, radius, true)
}

fn scaled_gap(lhs: Complex64, rhs: Complex64, scale: f64) -> f64 {
    let gap = (lhs - rhs).norm();
    if gap == 0.0 {
        0.0
    } else {
        gap / scale
    }
}

fn check_coincidence(
    inst: &CoincidenceInstance,
    property: Property,
    tol: &Tolerances,
    relax: bool,
) -> polygeom::Result<Evaluation> {
    let p = inst
        .multiaffine
        .to_multiaffine()
        .map_err(|e| Error::InvalidInput(e.to_string()))?;
    let w = from_cs(&inst.points);
    let region = inst
        .region
        .to_region()
        .map_err(|e| Error::InvalidInput(e.to_string()))?;
    let opts = CoincidenceOptions {
        roots: tol.root_options(relax),
        membership_tol: tol.membership_tol,
    };
    let witness = if property == Property::WalshClassic {
        classic_coincidence_witness(&p, &w, &region, &opts)?
    } else {
        coincidence_witness(&p, &w, &region, &opts)?
    };
    if !witness.degenerate {
        let diagonal = p.diagonal()?;
        let scale = diagonal.abs_eval(witness.point) + witness.value.norm();
        let gap = scaled_gap(diagonal.eval(witness.point), witness.value, scale.max(f64::MIN_POSITIVE));
        if gap > 1e-8 {
            return Ok(Evaluation::fail(format!(
                "witness does not solve the diagonal equation (relative gap {gap:e})"
            )));
        }
    }
    if property != Property::WalshClassic {
        let residual = theorem1_apolarity_residual(&p, &w)?;
        if residual > tol.identity_tol {
            return Ok(Evaluation::fail(format!(
                "apolarity residual of q^(n-m) and the normalized diagonal is {residual:e}"
            )));
        }
    }
    Ok(Evaluation::pass())
}

fn check_apolarity_identities(
    n: usize,
    a: &Polynomial64,
    a2: &Polynomial64,
    b: &Polynomial64,
    alpha: Complex64,
    point: Complex64,
    tol: &Tolerances,
) -> polygeom::Result<Evaluation> {
    let mut failures = Vec::new();
    let combined = &a.scale(alpha) + a2;
    let scale = apolarity_scale(a, b, n)? * alpha.norm() + apolarity_scale(a2, b, n)?;
    let lhs = apolarity_functional(&combined, b, n)?;
    let rhs = apolarity_functional(a, b, n)? * alpha + apolarity_functional(a2, b, n)?;
    let gap = scaled_gap(lhs, rhs, scale);
    if gap > tol.identity_tol {
        failures.push(format!("linearity in the first slot: {gap:e}"));
    }
    let lhs = apolarity_functional(b, &combined, n)?;
    let rhs = apolarity_functional(b, a, n)? * alpha + apolarity_functional(b, a2, n)?;
    let gap = scaled_gap(lhs, rhs, scale);
    if gap > tol.identity_tol {
        failures.push(format!("linearity in the second slot: {gap:e}"));
    }
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let gap = scaled_gap(
        apolarity_functional(b, a, n)?,
        apolarity_functional(a, b, n)? * sign,
        apolarity_scale(a, b, n)?,
    );
    if gap > tol.identity_tol {
        failures.push(format!("transposition: {gap:e}"));
    }
    let power = Polynomial64::from_roots(&vec![point; n]);
    let gap = scaled_gap(
        apolarity_functional(&power, b, n)?,
        b.eval(point) * sign,
        b.abs_eval(point).max(f64::MIN_POSITIVE),
    );
    if gap > tol.identity_tol {
        failures.push(format!("point evaluation: {gap:e}"));
    }
    Ok(if failures.is_empty() {
        Evaluation::pass()
    } else {
        Evaluation::fail(failures.join("; "))
    })
}

/// Highest multiplicity for which the root finder is compared against the
/// factored form; beyond it the rounded closed form has genuinely spread zeros.
const MAX_CHECKED_MULTIPLICITY: usize = 6;

fn check_derivative_identity(n: usize, k: usize, y: Complex64, tol: &Tolerances, relax: bool) -> polygeom::Result<Evaluation> {
    let residual = kth_derivative_identity(n, k, y)?;
    if residual > tol.derivative_identity_tol {
        return Ok(Evaluation::fail(format!("closed-form residual {residual:e}")));
    }
    let closed = kth_derivative_closed_form(n, k, y)?;
    let predicted = factorization_roots(n, k, y)?;
    // coefficient route: lead * prod (z - root) reproduces the closed form
    let lead = closed.leading().expect("nonzero closed form");
    let rebuilt = Polynomial64::from_roots(&predicted).scale(lead);
    let scale = closed.max_abs_coeff();
    let gap = (0..=n - k)
        .map(|i| (rebuilt.coeff(i) - closed.coeff(i)).norm())
        .fold(0.0, f64::max)
        / scale;
    if gap > tol.factorization_tol {
        return Ok(Evaluation::fail(format!("factored form differs by {gap:e}")));
    }
    if n - k - 1 <= MAX_CHECKED_MULTIPLICITY {
        let found = find_roots(&closed, &tol.root_options(relax))?;
        let expanded: Vec<Complex64> = found
            .clusters
            .iter()
            .flat_map(|c| vec![c.representative; c.multiplicity])
            .collect();
        let distance = matching_distance(&expanded, &predicted).unwrap_or(f64::INFINITY);
        if distance > tol.factorization_tol * (1.0 + y.norm()) {
            return Ok(Evaluation::fail(format!(
                "root finder disagrees with the factored zeros by {distance:e}"
            )));
        }
    }
    Ok(Evaluation::pass())
}

fn evaluate_once(instance: &Instance, tol: &Tolerances, relax: bool) -> polygeom::Result<Evaluation> {
    let to_poly = |cs: &[C]| Polynomial64::try_new(from_cs(cs));
    let invalid = |e: CliError| Error::InvalidInput(e.to_string());
    match instance {
        Instance::Grace { n, a, b, region } => {
            let region = region.to_region().map_err(invalid)?;
            let opts = GraceOptions {
                roots: tol.root_options(relax),
                membership_tol: tol.membership_tol,
                apolar_rtol: tol.apolar_rtol,
            };
            grace_witness(&to_poly(a)?, &to_poly(b)?, *n, &region, &opts)?;
            Ok(Evaluation::pass())
        }
        Instance::WalshClassic(inst) => check_coincidence(inst, Property::WalshClassic, tol, relax),
        Instance::Theorem1Convex(inst) => check_coincidence(inst, Property::Theorem1Convex, tol, relax),
        Instance::Theorem1Exterior(inst) => {
            check_coincidence(inst, Property::Theorem1Exterior, tol, relax)
        }
        Instance::Theorem2 { instance, k } => {
            let inst = instance.to_instance().map_err(invalid)?;
            let opts = Theorem2Options {
                roots: tol.root_options(relax),
                membership_tol: tol.membership_tol,
            };
            let report = check_theorem2(&inst, *k, &opts)?;
            let mut eval = if !report.satisfied {
                Evaluation::fail(format!(
                    "disk holds {} zeros of the derivative, bound is {}",
                    report.count_in_disk, report.bound
                ))
            } else if report.mean_residual > tol.mean_tol {
                Evaluation::fail(format!("mean residual {:e}", report.mean_residual))
            } else {
                Evaluation::pass()
            };
            if !report.outside_structure_ok(tol.structure_tol) {
                eval.warning = Some(format!(
                    "derivative zero outside the disk misses the contracted disk by {:e}",
                    report.outside_excess.unwrap_or(f64::NAN)
                ));
            }
            Ok(eval)
        }
        Instance::ApolarityIdentity {
            n,
            a,
            a2,
            b,
            alpha,
            point,
        } => check_apolarity_identities(
            *n,
            &to_poly(a)?,
            &to_poly(a2)?,
            &to_poly(b)?,
            from_c(*alpha),
            from_c(*point),
            tol,
        ),
        Instance::DerivativeIdentity { n, k, y } => {
            check_derivative_identity(*n, *k, from_c(*y), tol, relax)
        }
        Instance::GaussLucas { coeffs } => {
            let report = gauss_lucas_report(&to_poly(coeffs)?, tol.gauss_lucas_tol, &tol.root_options(relax))?;
            Ok(if report.holds {
                Evaluation::pass()
            } else {
                Evaluation::fail(format!(
                    "critical point {:e} away from the hull of the zeros",
                    report.max_distance
                ))
            })
        }
    }
}

/// Runs one instance; a non-converging root solve is retried once with the
/// root tolerance relaxed tenfold before the trial counts as errored.
pub fn evaluate(instance: &Instance, tol: &Tolerances) -> Evaluation {
    match evaluate_once(instance, tol, false) {
        Ok(eval) => eval,
        Err(Error::NonConvergence { .. }) => match evaluate_once(instance, tol, true) {
            Ok(eval) => Evaluation {
                relaxed: true,
                ..eval
            },
            Err(e) => Evaluation {
                relaxed: true,
                ..Evaluation::from_error(&e)
            },
        },
        Err(e) => Evaluation::from_error(&e),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureRecord {
    pub trial: usize,
    pub trial_seed: u64,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance: Option<Instance>,
    pub diagnostic: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub schema: String,
    pub config: CampaignConfig,
    /// Includes trials whose hypothesis did not hold.
    pub passed: usize,
    pub failed: usize,
    pub errored: usize,
    pub hypothesis_violations: usize,
    pub relaxed_retries: usize,
    pub soft_warnings: usize,
    pub failures: Vec<FailureRecord>,
    /// Seconds; left out of the JSON unless requested, since it is not reproducible.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time: Option<f64>,
}

impl CampaignReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0 && self.errored == 0
    }
}

struct TrialResult {
    seed: u64,
    instance: Option<Instance>,
    eval: Evaluation,
}

fn run_trial(config: &CampaignConfig, index: usize) -> TrialResult {
    let seed = trial_seed(config.seed, index);
    match generate_instance(config, seed) {
        Ok(instance) => {
            let eval = evaluate(&instance, &config.tolerances);
            TrialResult {
                seed,
                instance: Some(instance),
                eval,
            }
        }
        Err(e) => TrialResult {
            seed,
            instance: None,
            eval: Evaluation {
                diagnostic: Some(format!("instance generation failed: {e}")),
                ..Evaluation::from_error(&e)
            },
        },
    }
}

/// Executes the campaign on `jobs` worker threads (`0` picks the machine default).
/// The report does not depend on `jobs`.
pub fn run_campaign(config: &CampaignConfig, jobs: usize) -> Result<CampaignReport> {
    config.validate()?;
    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::InvalidInput(format!("thread pool: {e}")))?;
    let results: Vec<TrialResult> = pool.install(|| {
        (0..config.trials)
            .into_par_iter()
            .map(|i| run_trial(config, i))
            .collect()
    });

    let mut report = CampaignReport {
        schema: SCHEMA.to_string(),
        config: config.clone(),
        passed: 0,
        failed: 0,
        errored: 0,
        hypothesis_violations: 0,
        relaxed_retries: 0,
        soft_warnings: 0,
        failures: Vec::new(),
        wall_time: None,
    };
    for (trial, result) in results.into_iter().enumerate() {
        let eval = result.eval;
        report.relaxed_retries += usize::from(eval.relaxed);
        report.soft_warnings += usize::from(eval.warning.is_some());
        match eval.verdict {
            Verdict::Pass => report.passed += 1,
            Verdict::HypothesisViolation => {
                report.passed += 1;
                report.hypothesis_violations += 1;
            }
            Verdict::Fail | Verdict::Error => {
                if eval.verdict == Verdict::Fail {
                    report.failed += 1;
                } else {
                    report.errored += 1;
                }
                report.failures.push(FailureRecord {
                    trial,
                    trial_seed: result.seed,
                    verdict: eval.verdict,
                    instance: result.instance,
                    diagnostic: eval.diagnostic.unwrap_or_default(),
                });
            }
        }
    }
    report.wall_time = Some(start.elapsed().as_secs_f64());
    Ok(report)
}
