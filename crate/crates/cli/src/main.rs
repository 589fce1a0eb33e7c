use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use polygeom::{
    apolarity_functional, check_theorem2, classic_coincidence_witness, coincidence_witness,
    find_roots, generate_theorem2_instance, grace_witness, is_apolar, relative_apolarity,
    solve_diagonal, theorem1_apolarity_residual, theorem1_hypothesis, CircularRegion64,
    CoincidenceOptions, Complex64, Error, GraceOptions, Polynomial64, RootOptions, Theorem2Options,
};
use polygeom_cli::campaign::{
    generate_instance, run_campaign, trial_seed, CampaignConfig, Fixture, Property, Tolerances,
    Verdict,
};
use polygeom_cli::error::{CliError, Result};
use polygeom_cli::json::{
    read_json, tagged, to_c, to_cs, to_pretty, write_text, MultiaffineJson, PointsJson, PolyJson,
    RegionJson, RootSetJson, Theorem2InstanceJson, SCHEMA,
};
use polygeom_cli::replay::{apply_override, load_instance, replay};
use polygeom_cli::svg::{emit_svg, PointSet};
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "polygeom", version, about = "Zeros of complex polynomials: apolarity, coincidence, derivative bounds")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Root-finder tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Seed for generated instances and campaigns.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Also write the JSON output to this file.
    #[arg(long, global = true)]
    json_out: Option<PathBuf>,
    /// Write an SVG figure of the relevant zeros and regions.
    #[arg(long, global = true)]
    svg_out: Option<PathBuf>,
    /// Worker threads for campaigns (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Zeros of a polynomial.
    Roots {
        #[arg(long)]
        poly: PathBuf,
        #[arg(long)]
        max_iter: Option<usize>,
    },
    /// Apolarity pairing of two polynomials at degree frame n.
    Apolar {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        n: usize,
        /// Relative threshold for calling the pair apolar.
        #[arg(long, default_value_t = 1e-9)]
        rtol: f64,
    },
    /// Zero of b in a region holding all zeros of a, for an apolar pair.
    Grace {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        region: PathBuf,
        /// Degree frame; defaults to the degree of a.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Point of a region where the diagonal takes the value p(w_1, ..., w_n).
    Coincidence {
        #[arg(long)]
        multiaffine: PathBuf,
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        region: PathBuf,
        /// Require the points themselves to lie in the region.
        #[arg(long)]
        classic: bool,
    },
    /// Apolarity residual between q^(n-m) and the normalized diagonal.
    Theorem1 {
        #[arg(long)]
        multiaffine: PathBuf,
        #[arg(long)]
        points: PathBuf,
        /// Also check the hypothesis and find a witness in this region.
        #[arg(long)]
        region: Option<PathBuf>,
    },
    /// Count zeros of the k-th derivative in the disk, or generate an instance.
    Theorem2 {
        #[arg(long, required_unless_present = "generate")]
        instance: Option<PathBuf>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        generate: bool,
        #[arg(long, required_if_eq("generate", "true"))]
        n: Option<usize>,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long, default_value_t = 2.0)]
        outer_distance: f64,
    },
    /// Randomized campaign over one property.
    Fuzz {
        #[arg(long, value_enum)]
        property: Property,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long)]
        n_min: Option<usize>,
        #[arg(long)]
        n_max: Option<usize>,
        #[arg(long, value_enum)]
        fixture: Option<Fixture>,
        /// Tolerance override, `name=value`; repeatable.
        #[arg(long = "tolerance", value_name = "NAME=VALUE")]
        tolerances: Vec<String>,
        /// Include wall time in the JSON report.
        #[arg(long)]
        timing: bool,
        /// Print the instance of this trial instead of running the campaign.
        #[arg(long, value_name = "TRIAL")]
        emit_instance: Option<usize>,
    },
    /// Re-run one recorded trial.
    Replay {
        /// Instance, failure record, or campaign report.
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum)]
        property: Option<Property>,
        /// Failure record to take from a campaign report.
        #[arg(long, default_value_t = 0)]
        index: usize,
        #[arg(long = "tolerance", value_name = "NAME=VALUE")]
        tolerances: Vec<String>,
    },
    /// SVG figure of polynomial zeros, point sets, and regions.
    Plot {
        /// Plots the zeros and critical points.
        #[arg(long)]
        poly: Vec<PathBuf>,
        #[arg(long)]
        points: Vec<PathBuf>,
        #[arg(long)]
        region: Vec<PathBuf>,
    },
}

/// A command's JSON output and exit code.
struct Outcome {
    value: Value,
    code: u8,
    svg: Option<(Vec<PointSet>, Vec<CircularRegion64>)>,
}

impl Outcome {
    fn ok(value: Value) -> Self {
        Outcome {
            value,
            code: 0,
            svg: None,
        }
    }

    fn with_svg(mut self, sets: Vec<PointSet>, regions: Vec<CircularRegion64>) -> Self {
        self.svg = Some((sets, regions));
        self
    }
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("serializable")
}

fn read_poly(path: &Path) -> Result<Polynomial64> {
    read_json::<PolyJson>(path)?.to_poly()
}

fn read_region(path: &Path) -> Result<CircularRegion64> {
    read_json::<RegionJson>(path)?.to_region()
}

fn root_options(global: &Global, max_iter: Option<usize>) -> Result<RootOptions<f64>> {
    let mut opts = RootOptions::default();
    if let Some(tol) = global.tol {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(CliError::InvalidInput("--tol must be positive".into()));
        }
        opts.tol = tol;
    }
    if let Some(m) = max_iter {
        opts.max_iter = m;
    }
    Ok(opts)
}

/// Hypothesis and theorem failures become a status in the JSON output.
fn status_outcome(e: Error, mut body: Value) -> Result<Outcome> {
    let (status, code) = match &e {
        Error::HypothesisViolated { .. } => ("hypothesis_violated", 2),
        Error::TheoremViolation(_) => ("theorem_violation", 1),
        _ => return Err(e.into()),
    };
    body["status"] = json!(status);
    body["diagnostic"] = json!(e.to_string());
    if let Error::HypothesisViolated {
        offending,
        signed_distance,
        ..
    } = &e
    {
        if let Some(z) = offending {
            body["offending"] = json!(to_c(*z));
        }
        if let Some(d) = signed_distance {
            body["signed_distance"] = json!(d);
        }
    }
    Ok(Outcome {
        value: body,
        code,
        svg: None,
    })
}

fn tolerances_from(base: Tolerances, global: &Global, overrides: &[String]) -> Result<Tolerances> {
    let mut t = base;
    if let Some(tol) = global.tol {
        t.root_tol = tol;
    }
    for spec in overrides {
        apply_override(&mut t, spec)?;
    }
    Ok(t)
}

fn run(cli: &Cli) -> Result<Outcome> {
    let global = &cli.global;
    match &cli.command {
        Command::Roots { poly, max_iter } => {
            let p = read_poly(poly)?;
            let roots = find_roots(&p, &root_options(global, *max_iter)?)?;
            let sets = vec![PointSet::new("zeros", roots.roots.clone())];
            Ok(Outcome::ok(to_value(&tagged(RootSetJson::from_roots(&roots)))).with_svg(sets, vec![]))
        }
        Command::Apolar { a, b, n, rtol } => {
            let (a, b) = (read_poly(a)?, read_poly(b)?);
            let value = apolarity_functional(&a, &b, *n)?;
            Ok(Outcome::ok(json!({
                "schema": SCHEMA,
                "value": to_c(value),
                "relative": relative_apolarity(&a, &b, *n)?,
                "apolar": is_apolar(&a, &b, *n, *rtol)?,
            })))
        }
        Command::Grace { a, b, region, n } => {
            let (a, b) = (read_poly(a)?, read_poly(b)?);
            let region = read_region(region)?;
            let n = n.or(a.degree()).unwrap_or(0);
            let opts = GraceOptions {
                roots: root_options(global, None)?,
                ..GraceOptions::default()
            };
            match grace_witness(&a, &b, n, &region, &opts) {
                Ok(w) => {
                    let sets = vec![
                        PointSet::new("zeros of a", w.a_roots.roots.clone()),
                        PointSet::new("zeros of b", w.b_roots.roots.clone()),
                    ];
                    Ok(Outcome::ok(json!({
                        "schema": SCHEMA,
                        "status": "ok",
                        "point": to_c(w.point),
                        "residual": w.residual,
                        "a_roots": RootSetJson::from_roots(&w.a_roots),
                        "b_roots": RootSetJson::from_roots(&w.b_roots),
                    }))
                    .with_svg(sets, vec![region]))
                }
                Err(e) => status_outcome(e, json!({"schema": SCHEMA})),
            }
        }
        Command::Coincidence {
            multiaffine,
            points,
            region,
            classic,
        } => coincidence(global, multiaffine, points, Some(region), *classic, false),
        Command::Theorem1 {
            multiaffine,
            points,
            region,
        } => coincidence(global, multiaffine, points, region.as_deref(), false, true),
        Command::Theorem2 {
            instance,
            k,
            generate,
            n,
            radius,
            outer_distance,
        } => {
            let inst = if *generate {
                let n = n.expect("required by clap");
                generate_theorem2_instance(n, global.seed.unwrap_or(0), *radius, *outer_distance)?
            } else {
                let path = instance.as_ref().expect("required by clap");
                let inst = read_json::<Theorem2InstanceJson>(path)?.to_instance()?;
                inst.validate(1e-12)?;
                inst
            };
            let Some(k) = k else {
                if !*generate {
                    return Err(CliError::InvalidInput("--k is required to check an instance".into()));
                }
                let sets = vec![PointSet::new("zeros", inst.zeros())];
                return Ok(Outcome::ok(to_value(&tagged(Theorem2InstanceJson::from_instance(&inst))))
                    .with_svg(sets, vec![inst.disk.to_region()]));
            };
            let opts = Theorem2Options {
                roots: root_options(global, None)?,
                ..Theorem2Options::default()
            };
            let report = check_theorem2(&inst, *k, &opts)?;
            let sets = vec![
                PointSet::new("zeros", inst.zeros()),
                PointSet::new(format!("zeros of derivative {k}"), report.derivative_roots.roots.clone()),
            ];
            let code = if report.satisfied { 0 } else { 1 };
            let value = json!({
                "schema": SCHEMA,
                "instance": Theorem2InstanceJson::from_instance(&inst),
                "n": report.n,
                "k": report.k,
                "bound": report.bound,
                "vacuous": report.vacuous,
                "derivative_roots": RootSetJson::from_roots(&report.derivative_roots),
                "count_in_disk": report.count_in_disk,
                "satisfied": report.satisfied,
                "mean_residual": report.mean_residual,
                "outside_excess": report.outside_excess,
            });
            Ok(Outcome {
                value,
                code,
                svg: Some((sets, vec![inst.disk.to_region()])),
            })
        }
        Command::Fuzz {
            property,
            trials,
            n_min,
            n_max,
            fixture,
            tolerances,
            timing,
            emit_instance,
        } => {
            let mut config = CampaignConfig::new(*property, *trials, global.seed.unwrap_or(0));
            let (lo, hi) = property.default_n_range();
            config.n_range = (n_min.unwrap_or(lo), n_max.unwrap_or(hi));
            config.fixture = *fixture;
            config.tolerances = tolerances_from(Tolerances::default(), global, tolerances)?;
            if let Some(trial) = emit_instance {
                config.validate()?;
                let seed = trial_seed(config.seed, *trial);
                let instance = generate_instance(&config, seed)?;
                return Ok(Outcome::ok(json!({
                    "schema": SCHEMA,
                    "trial": trial,
                    "trial_seed": seed,
                    "instance": instance,
                    "tolerances": config.tolerances,
                })));
            }
            let mut report = run_campaign(&config, global.jobs)?;
            if let Some(t) = report.wall_time {
                eprintln!(
                    "{} trials in {t:.3} s: {} passed, {} failed, {} errored",
                    config.trials, report.passed, report.failed, report.errored
                );
            }
            if !*timing {
                report.wall_time = None;
            }
            let code = if report.failed > 0 {
                1
            } else if report.errored > 0 {
                3
            } else {
                0
            };
            Ok(Outcome {
                value: to_value(&report),
                code,
                svg: None,
            })
        }
        Command::Replay {
            instance,
            property,
            index,
            tolerances,
        } => {
            let doc: Value = read_json(instance)?;
            let (inst, recorded) = load_instance(doc, *index)?;
            let tol = tolerances_from(recorded.unwrap_or_default(), global, tolerances)?;
            let out = replay(&inst, *property, tol)?;
            let code = match out.verdict {
                Verdict::Pass | Verdict::HypothesisViolation => 0,
                Verdict::Fail => 1,
                Verdict::Error => 3,
            };
            Ok(Outcome {
                value: to_value(&out),
                code,
                svg: None,
            })
        }
        Command::Plot {
            poly,
            points,
            region,
        } => {
            if global.svg_out.is_none() {
                return Err(CliError::InvalidInput("plot needs --svg-out".into()));
            }
            let opts = root_options(global, None)?;
            let mut sets = Vec::new();
            for path in poly {
                let p = read_poly(path)?;
                let name = path.display();
                sets.push(PointSet::new(format!("zeros of {name}"), find_roots(&p, &opts)?.roots));
                if p.degree().is_some_and(|d| d >= 2) {
                    let crit = find_roots(&p.derivative(1), &opts)?.roots;
                    sets.push(PointSet::new(format!("critical points of {name}"), crit));
                }
            }
            for path in points {
                let pts = read_json::<PointsJson>(path)?.to_points()?;
                sets.push(PointSet::new(path.display().to_string(), pts));
            }
            let regions = region.iter().map(|p| read_region(p)).collect::<Result<Vec<_>>>()?;
            let summary = json!({
                "schema": SCHEMA,
                "point_sets": sets.iter().map(|s| json!({"label": s.label, "points": to_cs(&s.points)})).collect::<Vec<_>>(),
                "regions": regions.iter().map(RegionJson::from_region).collect::<Vec<_>>(),
            });
            Ok(Outcome::ok(summary).with_svg(sets, regions))
        }
    }
}

fn coincidence(
    global: &Global,
    multiaffine: &Path,
    points: &Path,
    region: Option<&Path>,
    classic: bool,
    residual_only: bool,
) -> Result<Outcome> {
    let p = read_json::<MultiaffineJson>(multiaffine)?.to_multiaffine()?;
    let w = read_json::<PointsJson>(points)?.to_points()?;
    let value = p.evaluate(&w)?;
    let opts = CoincidenceOptions {
        roots: root_options(global, None)?,
        ..CoincidenceOptions::default()
    };
    let mut body = json!({
        "schema": SCHEMA,
        "n": p.arity(),
        "m": p.degree(),
        "value": to_c(value),
    });
    if residual_only {
        body["apolarity_residual"] = json!(theorem1_apolarity_residual(&p, &w)?);
    }
    let Some(region_path) = region else {
        return Ok(Outcome::ok(body));
    };
    let region = read_region(region_path)?;
    let mut sets = vec![PointSet::new("w", w.clone())];
    if classic {
        let outside: Vec<_> = w
            .iter()
            .filter(|z| !region.contains(**z, opts.membership_tol))
            .map(|z| to_c(*z))
            .collect();
        body["hypothesis"] = json!({"kind": "classic", "holds": outside.is_empty(), "points_outside": outside});
    } else if p.degree() > 0 {
        let h = theorem1_hypothesis(&w, p.degree(), &region, &opts)?;
        body["hypothesis"] = json!({
            "kind": "derivative",
            "holds": h.holds,
            "derivative_roots": RootSetJson::from_roots(&h.derivative_roots),
            "offending": h.offending.map(|(z, d)| json!({"point": to_c(z), "signed_distance": d})),
        });
        sets.push(PointSet::new(format!("zeros of q^({})", p.arity() - p.degree()), h.derivative_roots.roots));
    }
    // every solution of the diagonal equation, whether or not it is in the region
    let solution = solve_diagonal(&p, &w, &opts.roots);
    match &solution {
        Ok(sol) => {
            let zs: Vec<Complex64> = sol.roots.as_ref().map(|r| r.roots.clone()).unwrap_or_default();
            body["solutions"] = json!(zs
                .iter()
                .map(|z| json!({
                    "point": to_c(*z),
                    "in_region": region.contains(*z, opts.membership_tol),
                    "signed_distance": region.signed_distance(*z),
                }))
                .collect::<Vec<_>>());
            body["identically_satisfied"] = json!(sol.roots.is_none());
            sets.push(PointSet::new("solutions", zs));
        }
        Err(Error::DegenerateDiagonal) => {
            body["solutions"] = json!([]);
        }
        Err(_) => {}
    }
    let witness = if classic {
        classic_coincidence_witness(&p, &w, &region, &opts)
    } else {
        coincidence_witness(&p, &w, &region, &opts)
    };
    let outcome = match witness {
        Ok(wit) => {
            body["status"] = json!("ok");
            body["witness"] = json!({
                "point": to_c(wit.point),
                "residual": wit.residual,
                "degenerate": wit.degenerate,
            });
            Outcome::ok(body)
        }
        Err(e) => status_outcome(e, body)?,
    };
    Ok(outcome.with_svg(sets, vec![region]))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|outcome| {
        let text = to_pretty(&outcome.value)?;
        println!("{text}");
        if let Some(path) = &cli.global.json_out {
            write_text(path, &format!("{text}\n"))?;
        }
        if let (Some(path), Some((sets, regions))) = (&cli.global.svg_out, &outcome.svg) {
            emit_svg(sets, regions, path)?;
        }
        Ok(outcome.code)
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("polygeom: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
