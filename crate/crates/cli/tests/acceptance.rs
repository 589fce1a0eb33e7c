//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails. Tolerances and trial counts are pinned here.

use std::time::{Duration, Instant};

use polygeom::{
    classic_coincidence_witness, find_roots_default, kth_derivative_identity, matching_distance,
    solve_diagonal, theorem1_apolarity_residual, CircularRegion64, CoincidenceOptions, Complex64,
    Error, Polynomial64, SymmetricMultiaffine64,
};
use polygeom_cli::campaign::{
    evaluate, generate_instance, run_campaign, trial_seed, CampaignConfig, CampaignReport,
    Instance, Property, Verdict,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_240_601;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn unit_box(rng: &mut ChaCha8Rng) -> Complex64 {
    c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

fn within(elapsed: Duration, limit_secs: f64) -> bool {
    elapsed.as_secs_f64() < limit_secs
}

fn campaign(property: Property, trials: usize) -> CampaignReport {
    let mut report = run_campaign(&CampaignConfig::new(property, trials, SEED), 0).expect("valid config");
    report.wall_time = None;
    report
}

fn clean(r: &CampaignReport) -> bool {
    r.failed == 0 && r.errored == 0 && r.hypothesis_violations == 0
}

fn summary(r: &CampaignReport) -> String {
    format!(
        "{} trials: {} passed, {} failed, {} errored, {} hypothesis violations",
        r.config.trials, r.passed, r.failed, r.errored, r.hypothesis_violations
    )
}

fn counterexample() -> Outcome {
    let start = Instant::now();
    let p = SymmetricMultiaffine64::elementary(2, 1).unwrap();
    let w = [c(-1.0, 0.0), c(1.0, 0.0)];
    let opts = CoincidenceOptions::default();
    let exterior = CircularRegion64::exterior(c(0.0, 0.0), 1.0, true).unwrap();
    let disk = CircularRegion64::disk(c(0.0, 0.0), 1.0, true).unwrap();

    let violated = matches!(
        classic_coincidence_witness(&p, &w, &exterior, &opts),
        Err(Error::HypothesisViolated { .. })
    );
    let solutions = solve_diagonal(&p, &w, &opts.roots).unwrap().roots.unwrap().roots;
    let none_in_s = solutions.iter().all(|z| !exterior.contains(*z, 1e-9));
    let witness = classic_coincidence_witness(&p, &w, &disk, &opts).unwrap();
    let replayed = evaluate(&Instance::counterexample(), &Default::default()).verdict;
    let elapsed = start.elapsed();
    outcome(
        violated
            && none_in_s
            && witness.point.norm() <= 1e-10
            && replayed == Verdict::HypothesisViolation
            && within(elapsed, 1.0),
        format!(
            "exterior: hypothesis violated = {violated}, solutions {solutions:?} outside S = {none_in_s}; \
             unit disk witness |z| = {:e}; {:.3} s",
            witness.point.norm(),
            elapsed.as_secs_f64()
        ),
    )
}

fn apolarity_residuals() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst: f64 = 0.0;
    let mut full_degree = 0;
    for trial in 0..10_000 {
        let n = rng.gen_range(1..=12);
        let m = if trial % 4 == 0 { n } else { rng.gen_range(1..=n) };
        full_degree += usize::from(m == n);
        let mut coeffs: Vec<Complex64> = (0..=m).map(|_| unit_box(&mut rng)).collect();
        coeffs[m] += c(1.0, 0.0);
        let p = SymmetricMultiaffine64::with_degree(n, coeffs, m).unwrap();
        let w: Vec<Complex64> = (0..n).map(|_| unit_box(&mut rng) * 2.0).collect();
        worst = worst.max(theorem1_apolarity_residual(&p, &w).unwrap());
    }
    let elapsed = start.elapsed();
    outcome(
        worst <= 1e-10 && full_degree > 0 && within(elapsed, 60.0),
        format!(
            "10000 instances ({full_degree} with m = n), max relative residual {worst:e}; {:.3} s",
            elapsed.as_secs_f64()
        ),
    )
}

fn witness_existence() -> Outcome {
    let start = Instant::now();
    let convex = campaign(Property::Theorem1Convex, 10_000);
    let exterior = campaign(Property::Theorem1Exterior, 10_000);
    let elapsed = start.elapsed();
    outcome(
        clean(&convex) && clean(&exterior) && within(elapsed, 120.0),
        format!(
            "disk/half-plane {}; exterior {}; {:.3} s",
            summary(&convex),
            summary(&exterior),
            elapsed.as_secs_f64()
        ),
    )
}

fn derivative_bound() -> Outcome {
    let start = Instant::now();
    let config = CampaignConfig::new(Property::Theorem2, 1, SEED);
    let (mut checks, mut bad) = (0, Vec::new());
    for trial in 0..10_000 {
        let Instance::Theorem2 { instance, .. } = generate_instance(&config, trial_seed(SEED, trial)).unwrap() else {
            unreachable!()
        };
        let n = instance.inner.len() + 1;
        for k in 1..n {
            let inst = Instance::Theorem2 {
                instance: instance.clone(),
                k,
            };
            checks += 1;
            let eval = evaluate(&inst, &config.tolerances);
            if eval.verdict != Verdict::Pass {
                bad.push((trial, k, eval.verdict, eval.diagnostic));
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        bad.is_empty() && within(elapsed, 120.0),
        format!(
            "10000 instances, {checks} (instance, k) reports, {} not passing {:?}; {:.3} s",
            bad.len(),
            bad.first(),
            elapsed.as_secs_f64()
        ),
    )
}

fn closed_form() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 5);
    let (mut worst, mut count): (f64, usize) = (0.0, 0);
    for n in 2..=20 {
        for k in 1..n {
            for _ in 0..10 {
                let y = unit_box(&mut rng) * 3.0;
                worst = worst.max(kth_derivative_identity(n, k, y).unwrap());
                count += 1;
            }
        }
    }
    outcome(worst <= 1e-11, format!("{count} cases, max relative residual {worst:e}"))
}

fn grace() -> Outcome {
    let r = campaign(Property::Grace, 10_000);
    outcome(clean(&r), summary(&r))
}

fn apolarity_algebra() -> Outcome {
    let r = campaign(Property::ApolarityIdentity, 1_000);
    outcome(clean(&r), summary(&r))
}

fn root_finder() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 8);
    let (mut sum_err, mut prod_err, mut trip_err): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for _ in 0..1_000 {
        let n = rng.gen_range(1..=20);
        let mut coeffs: Vec<Complex64> = (0..=n).map(|_| unit_box(&mut rng)).collect();
        coeffs[n] += c(0.5, 0.0);
        let p = Polynomial64::new(coeffs);
        let rs = find_roots_default(&p).unwrap();
        let lead = p.coeffs()[n];
        let sum: Complex64 = rs.roots.iter().sum();
        let sum_scale: f64 = rs.roots.iter().map(|z| z.norm()).sum();
        sum_err = sum_err.max((sum + p.coeffs()[n - 1] / lead).norm() / sum_scale.max(1e-300));
        let prod: Complex64 = rs.roots.iter().product();
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let expected = p.coeffs()[0] / lead * sign;
        prod_err = prod_err.max((prod - expected).norm() / expected.norm().max(prod.norm()).max(1e-300));

        // round trip from well-separated zeros in the unit box
        let mut zeros: Vec<Complex64> = Vec::new();
        while zeros.len() < n {
            let z = unit_box(&mut rng);
            if zeros.iter().all(|w| (w - z).norm() >= 0.05) {
                zeros.push(z);
            }
        }
        let found = find_roots_default(&Polynomial64::from_roots(&zeros)).unwrap();
        trip_err = trip_err.max(matching_distance(&found.roots, &zeros).unwrap());
    }
    outcome(
        sum_err <= 1e-8 && prod_err <= 1e-8 && trip_err <= 1e-7,
        format!("1000 polynomials: Vieta sum {sum_err:e}, product {prod_err:e}, round trip {trip_err:e}"),
    )
}

fn gauss_lucas() -> Outcome {
    let r = campaign(Property::GaussLucas, 1_000);
    outcome(clean(&r), summary(&r))
}

fn determinism() -> Outcome {
    let mut mismatched = Vec::new();
    for property in Property::ALL {
        let config = CampaignConfig::new(property, 300, SEED);
        let mut texts = Vec::new();
        for jobs in [1, 2, 7] {
            let mut report = run_campaign(&config, jobs).unwrap();
            report.wall_time = None;
            texts.push(serde_json::to_string_pretty(&report).unwrap());
        }
        if texts.iter().any(|t| t != &texts[0]) {
            mismatched.push(property);
        }
    }
    // a report with failure records, so instance payloads are compared too
    let mut config = CampaignConfig::new(Property::ApolarityIdentity, 200, SEED);
    config.tolerances.identity_tol = 1e-300;
    let with_failures: Vec<String> = [1, 4]
        .iter()
        .map(|&jobs| {
            let mut r = run_campaign(&config, jobs).unwrap();
            r.wall_time = None;
            serde_json::to_string_pretty(&r).unwrap()
        })
        .collect();
    let records = run_campaign(&config, 1).unwrap().failures.len();
    outcome(
        mismatched.is_empty() && with_failures[0] == with_failures[1] && records > 0,
        format!(
            "8 properties at jobs 1/2/7, mismatches {mismatched:?}; report with {records} failure records identical at jobs 1/4: {}",
            with_failures[0] == with_failures[1]
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("counterexample reproduced", counterexample),
        ("apolarity identity residuals", apolarity_residuals),
        ("coincidence witness existence", witness_existence),
        ("derivative zero count bound", derivative_bound),
        ("derivative closed form", closed_form),
        ("grace property", grace),
        ("apolarity algebra", apolarity_algebra),
        ("root-finder soundness", root_finder),
        ("gauss-lucas suite", gauss_lucas),
        ("campaign determinism", determinism),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        failures += usize::from(!o.pass);
        println!(
            "criterion {:>2} {}: {name}: {}",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
}
