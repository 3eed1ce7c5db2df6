//! Command-line front end: named function corpus, reconstruction pipeline,
//! coefficient-file persistence, grid evaluation, and oracle comparison.
//!
//! Exit codes: 0 success, 1 usage/input error, 2 classification failure,
//! 3 pipeline failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use circlechain::catalog::{self, CatalogEntry};
use circlechain::classify::{classify_all, ClassifyError};
use circlechain::evalcore::{limit_to_circle, BoundaryLimit, RhoLadder};
use circlechain::files::{CoefficientFile, FileProvenance};
use circlechain::reconstruct::{
    reconstruct, uniform_probes, verify_roundtrip, ReconstructOptions,
};
use circlechain::sections::QuadratureConfig;
use circlechain::{DiskPoint, SingularityRecord};

#[derive(Parser)]
#[command(
    name = "circlechain",
    about = "Reconstruct real functions on the circle as truncated inner analytic functions",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// List the function catalog.
    List,
    /// Classify the singular points of a catalog function.
    Analyze {
        /// Catalog function name.
        name: String,
        /// Classification search bound.
        #[arg(long, default_value_t = 4)]
        nmax: usize,
        /// Also write the table as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Run the reconstruction pipeline and write coefficient files.
    Reconstruct {
        name: String,
        /// Truncation order K.
        #[arg(long, default_value_t = 256)]
        order: usize,
        /// Subtract detected delta components.
        #[arg(long)]
        reduce: bool,
        /// Reconstruct the lift-th derivative of the function instead.
        #[arg(long, default_value_t = 0)]
        lift: usize,
        /// Output coefficient file (default: <name>.coeffs).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Output for the reduced coefficients when --reduce is set
        /// (default: <name>.reduced.coeffs).
        #[arg(long)]
        reduced_out: Option<PathBuf>,
        /// Number of probe angles for the residual summary.
        #[arg(long, default_value_t = 64)]
        probes: usize,
        /// Minimum probe distance from singular points (radians).
        #[arg(long, default_value_t = 0.3)]
        probe_min_dist: f64,
    },
    /// Evaluate a coefficient file on a (rho, theta) grid as CSV.
    Eval {
        file: PathBuf,
        /// Comma-separated list of radii in [0, 1).
        #[arg(long, value_delimiter = ',', default_value = "0.5,0.9,0.99")]
        rho: Vec<f64>,
        /// Number of uniformly spaced angles.
        #[arg(long, default_value_t = 16)]
        theta_count: usize,
        /// Output CSV path (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Walk a coefficient file along the integral-differential chain.
    Chain {
        file: PathBuf,
        /// Steps: positive = angular derivatives, negative = primitives.
        #[arg(long, allow_hyphen_values = true)]
        steps: i64,
        /// Output file (default: <file>.chain.coeffs).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reconstruct a catalog function and report residuals vs its oracle.
    Compare {
        name: String,
        #[arg(long, default_value_t = 256)]
        order: usize,
        #[arg(long)]
        reduce: bool,
        /// Write per-coefficient residuals as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

/// Error carrying the process exit code.
struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn usage(msg: impl Into<String>) -> Self {
        Self { code: 1, msg: msg.into() }
    }
    fn classify(msg: impl Into<String>) -> Self {
        Self { code: 2, msg: msg.into() }
    }
    fn pipeline(msg: impl Into<String>) -> Self {
        Self { code: 3, msg: msg.into() }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // help/version requests are successes, everything else is usage
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn lookup(name: &str) -> Result<CatalogEntry<f64>, Failure> {
    catalog::find::<f64>(name).ok_or_else(|| {
        Failure::usage(format!(
            "unknown function `{name}`; run `circlechain list` for the catalog"
        ))
    })
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.cmd {
        Cmd::List => cmd_list(),
        Cmd::Analyze { name, nmax, csv } => cmd_analyze(&name, nmax, csv.as_deref()),
        Cmd::Reconstruct {
            name,
            order,
            reduce,
            lift,
            out,
            reduced_out,
            probes,
            probe_min_dist,
        } => cmd_reconstruct(&name, order, reduce, lift, out, reduced_out, probes, probe_min_dist),
        Cmd::Eval { file, rho, theta_count, out } => cmd_eval(&file, &rho, theta_count, out.as_deref()),
        Cmd::Chain { file, steps, out } => cmd_chain(&file, steps, out),
        Cmd::Compare { name, order, reduce, csv } => cmd_compare(&name, order, reduce, csv.as_deref()),
    }
}

fn cmd_list() -> Result<(), Failure> {
    println!("{:<14} {:<10} description", "name", "oracle");
    for e in catalog::entries::<f64>() {
        let oracle = match (&e.oracle, e.piecewise().is_some()) {
            (Some(o), _) => match o.provenance {
                catalog::Provenance::ClosedForm => "closed",
                catalog::Provenance::PiecewiseExact => "piecewise",
            },
            (None, true) => "piecewise",
            (None, false) => "-",
        };
        println!("{:<14} {:<10} {}", e.name, oracle, e.description);
    }
    Ok(())
}

fn record_row(r: &SingularityRecord<f64>) -> String {
    let fmt_opt = |v: Option<f64>| match v {
        Some(x) => format!("{x:.6e}"),
        None => "-".to_string(),
    };
    format!(
        "{:.10e},{},{},{},{},{},{},{}",
        r.location,
        r.kind.label(),
        r.degree,
        fmt_opt(r.evidence.p_hat),
        r.evidence.log_type,
        fmt_opt(r.evidence.left_limit),
        fmt_opt(r.evidence.right_limit),
        r.evidence
            .integrations
            .map(|n| n.to_string())
            .unwrap_or_else(|| "-".to_string()),
    )
}

fn cmd_analyze(name: &str, nmax: usize, csv: Option<&Path>) -> Result<(), Failure> {
    let entry = lookup(name)?;
    let sf = entry.build();
    let records = classify_all(&sf, nmax).map_err(|e| match e {
        ClassifyError::NotASingularPoint(_) => Failure::usage(e.to_string()),
        other => Failure::classify(other.to_string()),
    })?;
    println!("function: {name}");
    println!(
        "{:<16} {:<16} {:<7} {:<10} {:<9} {}",
        "point", "kind", "degree", "p_hat", "log_type", "lateral limits"
    );
    for r in &records {
        let laterals = match (r.evidence.left_limit, r.evidence.right_limit) {
            (Some(l), Some(rr)) => format!("{l:.4e} | {rr:.4e}"),
            (Some(l), None) => format!("{l:.4e} | divergent"),
            (None, Some(rr)) => format!("divergent | {rr:.4e}"),
            (None, None) => "divergent | divergent".to_string(),
        };
        println!(
            "{:<16.8} {:<16} {:<7} {:<10} {:<9} {}",
            r.location,
            r.kind.label(),
            r.degree,
            r.evidence
                .p_hat
                .map(|p| format!("{p:.3}"))
                .unwrap_or_else(|| "-".to_string()),
            r.evidence.log_type,
            laterals
        );
    }
    if let Some(path) = csv {
        let mut text =
            String::from("point,kind,degree,p_hat,log_type,left_limit,right_limit,integrations\n");
        for r in &records {
            text.push_str(&record_row(r));
            text.push('\n');
        }
        std::fs::write(path, text).map_err(|e| Failure::usage(e.to_string()))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_reconstruct(
    name: &str,
    order: usize,
    reduce: bool,
    lift: usize,
    out: Option<PathBuf>,
    reduced_out: Option<PathBuf>,
    probes: usize,
    probe_min_dist: f64,
) -> Result<(), Failure> {
    let entry = lookup(name)?;
    let sf = entry.build();
    let qc = QuadratureConfig::default();
    let opts = ReconstructOptions { reduce, lift, ..Default::default() };
    let res = reconstruct(&sf, order, &qc, &opts).map_err(|e| Failure::pipeline(e.to_string()))?;

    let ladder = RhoLadder::adapted_to_order(order);
    let probe_angles = uniform_probes(&sf, probes, probe_min_dist);
    let report = verify_roundtrip(&res, &sf, &probe_angles, &ladder);

    println!("function {name}");
    println!("n_used {}", res.n_used);
    println!("lift {}", res.lift);
    println!("alpha0 {:.16e}", res.alpha0);
    println!("alpha0_reduced {:.16e}", res.alpha0_reduced);
    println!("theta0 {:.16e}", res.diagnostics.theta0);
    println!("deltas_removed {}", res.deltas_removed.len());
    for d in &res.deltas_removed {
        println!(
            "delta location {:.16e} order {} amplitude {:.16e}",
            d.location, d.order, d.amplitude
        );
    }
    println!("roundtrip_max {:.16e}", report.max_abs);
    println!("roundtrip_mean {:.16e}", report.mean_abs);
    println!("roundtrip_probes {}", report.probes_used);

    let provenance = FileProvenance {
        source: Some(name.to_string()),
        n_used: Some(res.n_used),
        lift: Some(res.lift),
        reduced: Some(false),
        alpha0: Some(res.alpha0),
        deltas: res.deltas_removed.clone(),
        chain: vec![],
        notes: vec![],
    };
    let out = out.unwrap_or_else(|| PathBuf::from(format!("{name}.coeffs")));
    CoefficientFile::from_taylor(&res.tc_full, Some(provenance.clone()))
        .write(&out)
        .map_err(|e| Failure::usage(e.to_string()))?;
    println!("wrote {}", out.display());
    if reduce {
        let reduced_out =
            reduced_out.unwrap_or_else(|| PathBuf::from(format!("{name}.reduced.coeffs")));
        let mut p = provenance;
        p.reduced = Some(true);
        p.alpha0 = Some(res.alpha0_reduced);
        CoefficientFile::from_taylor(&res.tc_reduced, Some(p))
            .write(&reduced_out)
            .map_err(|e| Failure::usage(e.to_string()))?;
        println!("wrote {}", reduced_out.display());
    }
    Ok(())
}

/// Worker cap from `CIRCLECHAIN_THREADS` (0 or unset = all available).
fn worker_count() -> usize {
    let available = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    match std::env::var("CIRCLECHAIN_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        Some(0) | None => available,
        Some(n) => n.min(available.max(n)),
    }
}

/// Index-stable parallel map: output order is independent of scheduling.
fn parallel_map<T, R, F>(items: &[T], workers: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    let n = items.len();
    if n == 0 {
        return Vec::new();
    }
    let workers = workers.clamp(1, n);
    let chunk = n.div_ceil(workers);
    let mut out: Vec<Option<R>> = Vec::with_capacity(n);
    out.resize_with(n, || None);
    std::thread::scope(|scope| {
        for (islice, oslice) in items.chunks(chunk).zip(out.chunks_mut(chunk)) {
            scope.spawn(|| {
                for (item, slot) in islice.iter().zip(oslice.iter_mut()) {
                    *slot = Some(f(item));
                }
            });
        }
    });
    out.into_iter().map(|o| o.expect("all slots filled")).collect()
}

fn cmd_eval(
    file: &Path,
    rho: &[f64],
    theta_count: usize,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let cf = CoefficientFile::<f64>::read(file).map_err(|e| Failure::usage(e.to_string()))?;
    let tc = cf.to_taylor().map_err(|e| Failure::usage(e.to_string()))?;
    if theta_count == 0 {
        return Err(Failure::usage("theta_count must be positive"));
    }
    for &r in rho {
        if !(0.0..1.0).contains(&r) {
            return Err(Failure::usage(format!("rho {r} outside [0, 1)")));
        }
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    let thetas: Vec<f64> = (0..theta_count)
        .map(|m| -std::f64::consts::PI + two_pi * ((m as f64 + 0.5) / theta_count as f64))
        .collect();
    let ladder = RhoLadder::adapted_to_order(tc.order());
    let boundary = parallel_map(&thetas, worker_count(), |&theta| {
        limit_to_circle(&tc, theta, &ladder)
    });

    let mut csv = String::from("rho,theta,re,im,boundary\n");
    for &r in rho {
        for (i, &theta) in thetas.iter().enumerate() {
            let pt = DiskPoint::new(r, theta).expect("validated radius");
            let w = circlechain::evalcore::eval_inner(&tc, pt);
            let b = match boundary[i] {
                BoundaryLimit::Value { value, .. } => format!("{value:.16e}"),
                BoundaryLimit::Divergent => "divergent".to_string(),
            };
            csv.push_str(&format!("{r:.16e},{theta:.16e},{:.16e},{:.16e},{b}\n", w.re, w.im));
        }
    }
    match out {
        Some(path) => {
            std::fs::write(path, csv).map_err(|e| Failure::usage(e.to_string()))?;
            println!("wrote {}", path.display());
        }
        None => print!("{csv}"),
    }
    Ok(())
}

fn cmd_chain(file: &Path, steps: i64, out: Option<PathBuf>) -> Result<(), Failure> {
    let cf = CoefficientFile::<f64>::read(file).map_err(|e| Failure::usage(e.to_string()))?;
    let tc = cf.to_taylor().map_err(|e| Failure::usage(e.to_string()))?;
    let walked = if steps >= 0 {
        tc.angular_derivative(steps as u32)
    } else {
        tc.angular_primitive((-steps) as u32)
    };
    let mut provenance = cf.provenance.unwrap_or_default();
    provenance.chain.push(steps);
    let out = out.unwrap_or_else(|| {
        let mut p = file.to_path_buf();
        p.set_extension("chain.coeffs");
        p
    });
    CoefficientFile::from_taylor(&walked, Some(provenance))
        .write(&out)
        .map_err(|e| Failure::usage(e.to_string()))?;
    println!("walked {steps} step(s); wrote {}", out.display());
    Ok(())
}

fn cmd_compare(name: &str, order: usize, reduce: bool, csv: Option<&Path>) -> Result<(), Failure> {
    let entry = lookup(name)?;
    let sf = entry.build();
    let qc = QuadratureConfig::default();
    let opts = ReconstructOptions { reduce, ..Default::default() };
    let res = reconstruct(&sf, order, &qc, &opts).map_err(|e| Failure::pipeline(e.to_string()))?;
    let got = res
        .tc_full
        .to_fourier()
        .map_err(|e| Failure::pipeline(e.to_string()))?;

    let oracle_fc = match (&entry.oracle, entry.piecewise()) {
        (Some(o), _) => Some((o.fourier(order), o.alpha0)),
        (None, Some(pp)) => {
            let fc = pp.fourier_exact(order);
            let a0 = fc.alpha0;
            Some((fc, Some(a0)))
        }
        (None, None) => None,
    };

    println!("function {name}");
    println!("n_used {}", res.n_used);
    println!("alpha0 {:.16e}", res.alpha0);
    match oracle_fc {
        Some((oracle, oracle_a0)) => {
            let kmax = (order / 4).max(1);
            let mut max_a = 0.0f64;
            let mut max_b = 0.0f64;
            for k in 1..=kmax {
                max_a = max_a.max((got.alpha[k - 1] - oracle.alpha[k - 1]).abs());
                max_b = max_b.max((got.beta[k - 1] - oracle.beta[k - 1]).abs());
            }
            println!("oracle_kmax {kmax}");
            println!("max_alpha_residual {max_a:.16e}");
            println!("max_beta_residual {max_b:.16e}");
            if let Some(a0) = oracle_a0 {
                println!("alpha0_residual {:.16e}", (res.alpha0 - a0).abs());
            }
            if let Some(path) = csv {
                let mut text = String::from("k,alpha,beta,alpha_oracle,beta_oracle\n");
                for k in 1..=kmax {
                    text.push_str(&format!(
                        "{k},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                        got.alpha[k - 1],
                        got.beta[k - 1],
                        oracle.alpha[k - 1],
                        oracle.beta[k - 1]
                    ));
                }
                std::fs::write(path, text).map_err(|e| Failure::usage(e.to_string()))?;
                println!("wrote {}", path.display());
            }
        }
        None => println!("no oracle data for {name}"),
    }
    let ladder = RhoLadder::adapted_to_order(order);
    let probes = uniform_probes(&sf, 64, 0.3);
    let report = verify_roundtrip(&res, &sf, &probes, &ladder);
    println!("roundtrip_max {:.16e}", report.max_abs);
    println!("roundtrip_mean {:.16e}", report.mean_abs);
    Ok(())
}
