mod error;
mod plot;
mod rundir;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use dlab_core::construction::{certifiable_starts, family_report};
use dlab_core::minpoints::{enumerate_with, read_csv_points, EnumerationOptions};
use dlab_core::model::{load_target, parse_rational, CoordSpec, NumberText, TargetConfig};
use dlab_core::presets;
use dlab_core::rigorous::DEFAULT_PRECISION_CAP;
use dlab_core::spectra::{frontier, frontier_csv, lambda_csv, lambda_n, liouville_preset};
use dlab_core::subspaces::schmidt_fuzz;
use dlab_core::transference::{
    check_sandwich, estimate_exponents, exponent_csv, fit_power_constants, mm_lhs, product_chain,
    verify_extremal_sequence, ExtremalParams, SandwichOptions, TransferenceProfile,
};
use num_rational::BigRational;
use serde_json::json;

use error::CliError;
use rundir::{to_pretty, RunDir, POINTS, TARGET};

/// Environment variable overriding the precision cap in bits.
const CAP_ENV: &str = "DLAB_PRECISION_CAP";

#[derive(Parser)]
#[command(name = "dlab", version, about = "Minimal points, heights and exponent checks for simultaneous approximation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate minimal points up to a norm bound into a run directory.
    Enumerate {
        /// Target configuration (JSON).
        #[arg(long, conflicts_with = "preset")]
        config: Option<PathBuf>,
        /// Built-in target: sqrt2, cubic, sqrt2-even, sqrt2-sqrt3.
        #[arg(long)]
        preset: Option<String>,
        #[arg(long)]
        xmax: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Estimate the ordinary and uniform exponents of a run.
    Exponents {
        #[arg(long)]
        run: PathBuf,
        /// Fraction of entries forming the tail window.
        #[arg(long, default_value = "1/2")]
        tail: String,
    },
    /// Build the subspace family starting at index i0 and check its identities.
    Construct {
        #[arg(long)]
        run: PathBuf,
        #[arg(long)]
        i0: usize,
    },
    /// Check a profile psi <= L(X; S) <= phi against a run.
    Transfer {
        #[arg(long)]
        run: PathBuf,
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        beta: String,
        /// Upper constant; fitted from the data when omitted.
        #[arg(long)]
        a: Option<String>,
        /// Lower constant; fitted from the data when omitted.
        #[arg(long)]
        b: Option<String>,
        #[arg(long, value_enum, default_value_t = FamilyArg::Power)]
        family: FamilyArg,
        #[arg(long, default_value_t = 0.0)]
        sigma: f64,
        #[arg(long, default_value_t = 0.0)]
        rho: f64,
        #[arg(long, default_value_t = 200)]
        grid: usize,
        #[arg(long)]
        x_min: Option<f64>,
    },
    /// Check the four conditions on an extremal sequence (default: the run's minimal points).
    Extremal {
        #[arg(long)]
        run: PathBuf,
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        beta: String,
        #[arg(long)]
        eps: String,
        #[arg(long = "C")]
        c: String,
        /// CSV with x_0.. columns; defaults to the run's minimal points.
        #[arg(long)]
        points: Option<PathBuf>,
    },
    /// The boundary lambda(lambda_hat) of the exponent region, as CSV.
    Frontier {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 101)]
        grid: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The positive root of x + (n-1)x^2 + ... + (n-1)^(n-1) x^n = 1.
    LambdaN {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "1/1000000000000000")]
        tol: String,
        /// Print the CSV table for 2..=n instead.
        #[arg(long)]
        table: bool,
    },
    /// Random pairs of rational subspaces against the height inequality.
    SchmidtFuzz {
        /// Largest ambient dimension; pairs are drawn in dimensions 2..=dim.
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Enumerate (1, theta, ..., theta^(n-1), extra) and report the scaling of L(X).
    Liouville {
        /// Minimal polynomial of theta, lowest degree first, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        minpoly: String,
        /// Isolating interval "lo,hi".
        #[arg(long, allow_hyphen_values = true)]
        interval: String,
        /// Last coordinate: a decimal literal or a rational p/q.
        #[arg(long, allow_hyphen_values = true)]
        extra: String,
        #[arg(long)]
        xmax: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Draw the envelope staircase of a run or the exponent boundary as SVG.
    Plot {
        #[arg(long)]
        run: Option<PathBuf>,
        #[arg(long, value_enum)]
        what: PlotWhat,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-hash every file listed in a run manifest.
    Verify {
        #[arg(long)]
        run: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Power,
    PowerLog,
}

#[derive(Clone, Copy, ValueEnum)]
enum PlotWhat {
    Envelope,
    Frontier,
}

fn cap() -> Result<u64, CliError> {
    match std::env::var(CAP_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| CliError::usage(format!("{CAP_ENV} must be a bit count, got {v:?}"))),
        Err(_) => Ok(DEFAULT_PRECISION_CAP),
    }
}

fn rational(s: &str) -> Result<BigRational, CliError> {
    Ok(parse_rational(s)?)
}

fn print_json(v: &impl serde::Serialize) -> Result<(), CliError> {
    print!("{}", to_pretty(v)?);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let body = json!({ "error": e });
            eprintln!("{}", serde_json::to_string(&body).unwrap_or_else(|_| e.to_string()));
            ExitCode::from(2)
        }
    }
}

fn dispatch(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Enumerate { config, preset, xmax, out, threads } => {
            let doc = match (config, preset) {
                (Some(path), None) => std::fs::read_to_string(&path)
                    .map_err(|e| CliError::io(format!("{}: {e}", path.display())))?,
                (None, Some(name)) => presets::document(&name)
                    .ok_or_else(|| CliError::usage(format!("unknown preset {name:?}; known: {:?}", presets::NAMES)))?
                    .to_string(),
                _ => return Err(CliError::usage("give exactly one of --config or --preset")),
            };
            enumerate(&doc, &xmax, &out, threads, "enumerate", json!({ "xmax": xmax, "threads": threads }))
                .map(|_| ())
        }
        Command::Exponents { run, tail } => exponents(&run, &tail),
        Command::Construct { run, i0 } => construct(&run, i0),
        Command::Transfer { run, alpha, beta, a, b, family, sigma, rho, grid, x_min } => {
            transfer(&run, &alpha, &beta, a.as_deref(), b.as_deref(), family, sigma, rho, grid, x_min)
        }
        Command::Extremal { run, alpha, beta, eps, c, points } => extremal(&run, &alpha, &beta, &eps, &c, points),
        Command::Frontier { n, grid, out } => {
            let csv = frontier_csv(n, grid)?;
            match out {
                Some(dir) => write_loose(&dir, &format!("frontier_n{n}.csv"), &csv),
                None => {
                    print!("{csv}");
                    Ok(())
                }
            }
        }
        Command::LambdaN { n, tol, table } => {
            if table {
                print!("{}", lambda_csv(n)?);
            } else {
                let l = lambda_n(n, &rational(&tol)?)?;
                println!("{:.15}", l.value);
            }
            Ok(())
        }
        Command::SchmidtFuzz { dim, count, seed, out } => {
            if !(2..=8).contains(&dim) {
                return Err(CliError::usage("--dim must lie in 2..=8"));
            }
            let dims: Vec<usize> = (2..=dim).collect();
            let report = schmidt_fuzz(&dims, count, seed);
            let text = to_pretty(&report)?;
            match out {
                Some(dir) => write_loose(&dir, "schmidt_fuzz.json", &text),
                None => {
                    print!("{text}");
                    Ok(())
                }
            }
        }
        Command::Liouville { minpoly, interval, extra, xmax, out, threads } => {
            liouville(&minpoly, &interval, &extra, &xmax, &out, threads)
        }
        Command::Plot { run, what, n, out } => plot_cmd(run, what, n, out),
        Command::Verify { run } => {
            let rows = rundir::verify(&run)?;
            let bad: Vec<&String> = rows.iter().filter(|r| !r.1).map(|r| &r.0).collect();
            if bad.is_empty() {
                println!("{} files verified", rows.len());
                Ok(())
            } else {
                Err(CliError { kind: "HashMismatch".into(), message: format!("changed or missing: {bad:?}") })
            }
        }
    }
}

/// A file outside any run: written as is, with a manifest next to it.
fn write_loose(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    let mut rd = match RunDir::open(dir) {
        Ok(r) => r,
        Err(_) => RunDir::create(dir, "tables", json!({}))?,
    };
    rd.write(name, contents)?;
    rd.save()?;
    println!("wrote {}", dir.join(name).display());
    Ok(())
}

fn enumerate(
    doc: &str,
    xmax: &str,
    out: &Path,
    threads: usize,
    command: &str,
    parameters: serde_json::Value,
) -> Result<RunDir, CliError> {
    let (xi, set) = load_target(doc)?;
    let x_max = rational(xmax)?;
    let opts = EnumerationOptions { cap: cap()?, threads: threads.max(1), ..Default::default() };
    let seq = enumerate_with(&xi, &set, &x_max, &opts)?;
    let target: serde_json::Value =
        serde_json::from_str(doc).map_err(|e| CliError::schema(e.to_string()))?;
    let mut rd = RunDir::create(out, command, parameters)?;
    rd.set("x_max", json!(x_max.to_string()));
    rd.set("n", json!(xi.n()));
    rd.set("entries", json!(seq.len()));
    rd.set("precision_cap", json!(opts.cap));
    rd.write(TARGET, &to_pretty(&target)?)?;
    rd.write(POINTS, &seq.to_csv_string())?;
    rd.save()?;
    println!("{} minimal points up to X = {} written to {}", seq.len(), x_max, out.display());
    Ok(rd)
}

fn exponents(run: &Path, tail: &str) -> Result<(), CliError> {
    let mut rd = RunDir::open(run)?;
    let seq = rd.sequence(cap()?)?;
    let est = estimate_exponents(&seq, &rational(tail)?)?;
    let mm = mm_lhs(est.lambda_hat, est.lambda, seq.n()).ok();
    let report = json!({ "n": seq.n(), "tail_fraction": tail, "estimate": est, "mm_lhs": mm });
    rd.write("exponents.json", &to_pretty(&report)?)?;
    rd.write("exponents.csv", &exponent_csv(&seq))?;
    rd.record_step("exponents", json!({ "tail": tail }), &["exponents.json", "exponents.csv"]);
    rd.save()?;
    print_json(&json!({ "lambda": est.lambda, "lambda_hat": est.lambda_hat, "mm_lhs": mm }))
}

fn construct(run: &Path, i0: usize) -> Result<(), CliError> {
    let mut rd = RunDir::open(run)?;
    let seq = rd.sequence(cap()?)?;
    let rep = family_report(&seq, i0)?;
    let name = format!("family_i0_{i0}.json");
    rd.write(&name, &to_pretty(&rep)?)?;
    rd.record_step(&format!("construct_i0_{i0}"), json!({ "i0": i0 }), &[&name]);
    rd.save()?;
    print_json(&json!({
        "i0": i0,
        "indices": rep.indices,
        "identities_pass": rep.identities.all_pass(),
        "s_table_decreasing": rep.identities.s_table_decreasing,
        "height_product_ratio": rep.height_product.ratio,
    }))
}

#[allow(clippy::too_many_arguments)]
fn transfer(
    run: &Path,
    alpha: &str,
    beta: &str,
    a: Option<&str>,
    b: Option<&str>,
    family: FamilyArg,
    sigma: f64,
    rho: f64,
    grid: usize,
    x_min: Option<f64>,
) -> Result<(), CliError> {
    let mut rd = RunDir::open(run)?;
    let seq = rd.sequence(cap()?)?;
    let (alpha_q, beta_q) = (rational(alpha)?, rational(beta)?);
    let (a_q, b_q, fitted) = match (a, b) {
        (Some(a), Some(b)) => (rational(a)?, rational(b)?, false),
        (None, None) => {
            if !matches!(family, FamilyArg::Power) {
                return Err(CliError::usage("constants can only be fitted for the power family"));
            }
            let (a, b) = fit_power_constants(&seq, &alpha_q, &beta_q, x_min)?;
            (a, b, true)
        }
        _ => return Err(CliError::usage("give both --a and --b, or neither")),
    };
    let n = seq.n();
    let profile = match family {
        FamilyArg::Power => TransferenceProfile::power(n, a_q, b_q, alpha_q, beta_q)?,
        FamilyArg::PowerLog => TransferenceProfile::power_log(n, a_q, b_q, alpha_q, beta_q, sigma, rho)?,
    };
    let opts = SandwichOptions { grid_points: grid, x_min };
    let rep = check_sandwich(&seq, &profile, &opts)?;
    let chains: Vec<_> = if n >= 2 {
        certifiable_starts(&seq, seq.len())
            .into_iter()
            .filter(|&i0| seq.entries[i0].norm_f64() >= rep.x_min)
            .filter_map(|i0| product_chain(&seq, &profile, i0, rep.x_min).ok())
            .collect()
    } else {
        Vec::new()
    };
    let report = json!({ "constants_fitted": fitted, "sandwich": rep, "chains": chains });
    rd.write("transfer.json", &to_pretty(&report)?)?;
    rd.record_step(
        "transfer",
        json!({ "alpha": alpha, "beta": beta, "a": a, "b": b, "grid": grid, "x_min": x_min }),
        &["transfer.json"],
    );
    rd.save()?;
    print_json(&json!({
        "a": rep.profile.a.to_string(),
        "b": rep.profile.b.to_string(),
        "epsilon": rep.epsilon,
        "delta": rep.delta,
        "c_empirical": rep.c_empirical,
        "step_bounds_pass": rep.step_bounds_pass,
        "chains_hold": chains.iter().all(|c| c.holds),
    }))
}

fn extremal(run: &Path, alpha: &str, beta: &str, eps: &str, c: &str, points: Option<PathBuf>) -> Result<(), CliError> {
    let mut rd = RunDir::open(run)?;
    let seq = rd.sequence(cap()?)?;
    let pts = match &points {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::io(format!("{}: {e}", p.display())))?;
            read_csv_points(&text)?
        }
        None => seq.points(),
    };
    let params = ExtremalParams { alpha: rational(alpha)?, beta: rational(beta)?, eps: rational(eps)?, c: rational(c)? };
    let rep = verify_extremal_sequence(&pts, &seq, &params)?;
    rd.write("extremal.json", &to_pretty(&rep)?)?;
    rd.record_step(
        "extremal",
        json!({ "alpha": alpha, "beta": beta, "eps": eps, "C": c, "points": points.map(|p| p.display().to_string()) }),
        &["extremal.json"],
    );
    rd.save()?;
    use dlab_core::transference::Verdict::*;
    let counts: Vec<_> = (1..=4)
        .map(|w| json!({ "pass": rep.count(w, Pass), "fail": rep.count(w, Fail), "undecided": rep.count(w, Undecided) }))
        .collect();
    print_json(&json!({
        "eps_threshold": rep.eps_threshold,
        "eps_within_threshold": rep.eps_within_threshold,
        "conditions": { "i": counts[0], "ii": counts[1], "iii": counts[2], "iv": counts[3] },
    }))
}

fn split_pair(s: &str) -> Result<(String, String), CliError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [a, b] => Ok((a.to_string(), b.to_string())),
        _ => Err(CliError::usage(format!("expected \"lo,hi\", got {s:?}"))),
    }
}

fn liouville(minpoly: &str, interval: &str, extra: &str, xmax: &str, out: &Path, threads: usize) -> Result<(), CliError> {
    let coeffs: Vec<NumberText> = minpoly.split(',').map(|c| NumberText::Text(c.trim().to_string())).collect();
    let degree = coeffs.len().saturating_sub(1);
    if degree < 2 {
        return Err(CliError::usage("theta needs a minimal polynomial of degree >= 2"));
    }
    let (lo, hi) = split_pair(interval)?;
    let theta = CoordSpec::Algebraic { minpoly: coeffs, interval: [NumberText::Text(lo), NumberText::Text(hi)] };
    let extra_spec = if extra.contains('/') {
        CoordSpec::Rational { value: NumberText::Text(extra.to_string()) }
    } else {
        CoordSpec::Decimal { value: extra.to_string() }
    };
    let mut coords = vec![CoordSpec::Rational { value: NumberText::Int(1) }, theta.clone()];
    for _ in 2..degree {
        let prev = coords.last().cloned().expect("nonempty");
        coords.push(CoordSpec::Expr { op: "*".into(), args: vec![prev, theta.clone()] });
    }
    coords.push(extra_spec.clone());
    let cfg = TargetConfig { n: degree, coords, set: dlab_core::model::SetSpec::Full, independence: None };
    let doc = serde_json::to_string(&cfg).map_err(|e| CliError::schema(e.to_string()))?;
    let x_max = rational(xmax)?;
    let opts = EnumerationOptions { cap: cap()?, threads: threads.max(1), ..Default::default() };
    let (report, seq) = liouville_preset(&theta.build()?, degree, &extra_spec.build()?, &x_max, &opts)?;
    let params = json!({ "minpoly": minpoly, "interval": interval, "extra": extra, "xmax": xmax, "threads": threads });
    let mut rd = RunDir::create(out, "liouville", params)?;
    rd.set("x_max", json!(x_max.to_string()));
    rd.set("n", json!(degree));
    rd.set("entries", json!(seq.len()));
    rd.set("precision_cap", json!(opts.cap));
    let target: serde_json::Value = serde_json::from_str(&doc).map_err(|e| CliError::schema(e.to_string()))?;
    rd.write(TARGET, &to_pretty(&target)?)?;
    rd.write(POINTS, &seq.to_csv_string())?;
    rd.write("liouville.json", &to_pretty(&report)?)?;
    rd.save()?;
    print_json(&report)
}

fn plot_cmd(run: Option<PathBuf>, what: PlotWhat, n: Option<usize>, out: Option<PathBuf>) -> Result<(), CliError> {
    match what {
        PlotWhat::Envelope => {
            let run = run.ok_or_else(|| CliError::usage("--what envelope needs --run"))?;
            let mut rd = RunDir::open(&run)?;
            let seq = rd.sequence(cap()?)?;
            let ln10 = std::f64::consts::LN_10;
            let lx: Vec<f64> = seq.entries.iter().map(|e| e.ln_norm() / ln10).collect();
            let ll: Vec<f64> = seq.entries.iter().map(|e| -e.ln_l() / ln10).collect();
            let x_max = log10_rational(&seq.exhausted_up_to);
            let chart = plot::Chart {
                title: "L(X; S) staircase",
                x_label: "log10 X",
                y_label: "-log10 L(X; S)",
                series: vec![plot::staircase(&lx, &ll, x_max)],
            };
            rd.write("envelope.svg", &plot::render(&chart))?;
            rd.record_step("plot_envelope", json!({}), &["envelope.svg"]);
            rd.save()?;
            println!("wrote {}", run.join("envelope.svg").display());
            Ok(())
        }
        PlotWhat::Frontier => {
            let n = n.ok_or_else(|| CliError::usage("--what frontier needs --n"))?;
            let dir = out.or(run).ok_or_else(|| CliError::usage("--what frontier needs --out or --run"))?;
            let lo = 1.0 / n as f64;
            let mut pts = Vec::new();
            for j in 0..=200 {
                let lh = lo + (1.0 - lo) * j as f64 / 200.0;
                let l = frontier(lh, n)?.to_f64();
                // the boundary runs off to infinity as lambda_hat -> 1; clip for display
                if l.is_finite() && l <= 10.0 {
                    pts.push((lh, l));
                }
            }
            let title = format!("exponent boundary, n = {n}");
            let chart = plot::Chart { title: &title, x_label: "lambda_hat", y_label: "lambda", series: vec![pts] };
            write_loose(&dir, &format!("frontier_n{n}.svg"), &plot::render(&chart))
        }
    }
}

fn log10_rational(q: &BigRational) -> f64 {
    let num = q.numer().to_string().parse::<f64>().unwrap_or(f64::NAN);
    let den = q.denom().to_string().parse::<f64>().unwrap_or(f64::NAN);
    (num / den).log10()
}
