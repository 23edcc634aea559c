//! `helix`: construct spin-helix eigenstates of anisotropic Heisenberg
//! models and verify their closed-form properties numerically.
//!
//! Exit codes: 0 on success, 1 when the input is invalid, 2 when a
//! verification check ran and failed (reports are still written).

use anyhow::{anyhow, bail, Result};
use clap::{Args, Parser, Subcommand};
use helix_cli::config::{
    parse_epsilon, parse_parameter, parse_tau, ModelConfig, Parameter, VariantName,
};
use helix_cli::report::{envelope, texture_csv, write_atomic, write_json};
use helix_cli::verify::{
    check_divergence, check_eigenstate, degeneracy_scan, trig_limit_deviations,
};
use helix_core::elliptic::{identity_suite, EllipticContext};
use helix_core::helix::{
    asymptotic_entropy, build_shs, canonical_eta, commensurability_for, shs_energy, texture,
    tower_entropy, tower_state,
};
use helix_core::model::DenseState;
use num_complex::Complex64;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "helix", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ModelArgs {
    /// Model variant.
    #[arg(long, value_enum, default_value = "xyz")]
    variant: VariantName,
    /// Twice the local spin (1 = spin-1/2).
    #[arg(long, default_value_t = 1)]
    twice_s: u32,
    /// Lattice extents, comma separated (e.g. "11" or "4,4").
    #[arg(long, default_value = "11")]
    dims: String,
    /// Modulation parameter: "p/q", "p/qt" (times tau), "re,im", or a real.
    #[arg(long)]
    eta: Option<String>,
    /// Per-axis modulation parameters (direction-dependent variant).
    #[arg(long = "eta-axis")]
    eta_axis: Vec<String>,
    /// Modular parameter: "re,im" or a bare imaginary part.
    #[arg(long)]
    tau: Option<String>,
    /// Long-range weight "k:F", repeatable.
    #[arg(long = "weight")]
    weights: Vec<String>,
    /// Boundary phase for the open chain, "re,im".
    #[arg(long)]
    u0: Option<String>,
}

#[derive(Args, Clone)]
struct OutputArgs {
    /// Write the JSON report here (atomic replace).
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the exchange couplings of the configured model.
    Couplings {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Check the theta-function identity suite at random sample points.
    Identities {
        /// Modular parameter.
        #[arg(long, default_value = "0.8")]
        tau: String,
        #[arg(long, default_value_t = 32)]
        samples: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 1e-11)]
        tolerance: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Build the spin-helix state and verify it is an eigenstate.
    VerifyShs {
        #[command(flatten)]
        model: ModelArgs,
        /// Spectral parameter "re,im".
        #[arg(long, default_value = "0,0")]
        u: String,
        /// Chirality signs, one per axis (e.g. "+1" or "+1,-1").
        #[arg(long, default_value = "+1")]
        epsilon: String,
        #[arg(long, default_value_t = 1e-10)]
        tolerance: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Emit the on-site spin expectation texture as CSV.
    Texture {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value = "0,0")]
        u: String,
        #[arg(long, default_value = "+1")]
        epsilon: String,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Dense diagonalization: eigenvalue cluster at the helix energy and
    /// the dimension spanned by the constructed tower states.
    Spectrum {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Compare the closed-form tower entanglement entropy with a Schmidt
    /// decomposition.
    Entropy {
        #[command(flatten)]
        model: ModelArgs,
        /// Excitation number.
        #[arg(long, default_value_t = 1)]
        n: usize,
        /// Subsystem size (number of leading sites).
        #[arg(long)]
        va: usize,
        #[arg(long, default_value_t = 1e-12)]
        tolerance: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Two-site divergence-condition check at one spectral point.
    Divergence {
        #[arg(long, default_value_t = 1)]
        twice_s: u32,
        #[arg(long)]
        eta: String,
        #[arg(long)]
        tau: String,
        #[arg(long, default_value = "0.3,0.1")]
        u: String,
        /// +1 or -1: which neighbor the second site is.
        #[arg(long, default_value_t = 1)]
        sign: i8,
        #[arg(long, default_value_t = 1e-11)]
        tolerance: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Verify every tower state over the helix is an eigenstate.
    Towers {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value = "+1")]
        epsilon: String,
        #[arg(long, default_value_t = 1e-10)]
        tolerance: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Tabulate convergence of helper functions to their trigonometric
    /// limits as Im(tau) grows.
    TrigLimit {
        #[arg(long, default_value = "1/3")]
        eta: String,
        /// Largest Im(tau) in the doubling sequence starting at 1.5.
        #[arg(long, default_value_t = 6.0)]
        max_im_tau: f64,
        #[arg(long, default_value_t = 1e-6)]
        tolerance: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
}

fn model_config(args: &ModelArgs) -> Result<ModelConfig> {
    let dims: Result<Vec<usize>, _> = args
        .dims
        .split(',')
        .map(|d| d.trim().parse::<usize>())
        .collect();
    let dims = dims.map_err(|e| anyhow!("dims: {e}"))?;
    let tau = args.tau.as_deref().map(parse_tau).transpose()?;
    let tau_c = tau.unwrap_or(Complex64::new(0.0, 1.0));
    let eta = args
        .eta
        .as_deref()
        .map(|t| parse_parameter(t, tau_c))
        .transpose()?;
    let eta_per_axis = if args.eta_axis.is_empty() {
        None
    } else {
        Some(
            args.eta_axis
                .iter()
                .map(|t| parse_parameter(t, tau_c))
                .collect::<Result<Vec<Parameter>>>()?,
        )
    };
    let weights = if args.weights.is_empty() {
        None
    } else {
        let mut ws = Vec::new();
        for w in &args.weights {
            let (k, f) = w
                .split_once(':')
                .ok_or_else(|| anyhow!("weight: expected \"k:F\", got {w:?}"))?;
            ws.push((
                k.trim().parse::<usize>().map_err(|e| anyhow!("weight: {e}"))?,
                f.trim().parse::<f64>().map_err(|e| anyhow!("weight: {e}"))?,
            ));
        }
        Some(ws)
    };
    let u0 = args
        .u0
        .as_deref()
        .map(|t| parse_parameter(t, tau_c).map(|p| p.value))
        .transpose()?;
    let eta_canonical = match (&eta, tau) {
        (Some(p), Some(t)) => {
            let c = canonical_eta(p.complex(), t);
            Some([c.re, c.im])
        }
        _ => None,
    };
    let boundary = if args.variant == VariantName::OpenChain {
        "open"
    } else {
        "periodic"
    };
    Ok(ModelConfig {
        variant: args.variant,
        twice_s: args.twice_s,
        dims,
        boundary: boundary.into(),
        eta,
        eta_per_axis,
        tau: tau.map(|t| [t.re, t.im]),
        long_range_weights: weights,
        u0,
        eta_canonical,
    })
}

fn emit(out: &OutputArgs, kind: &str, config: &serde_json::Value, payload: serde_json::Value) -> Result<()> {
    if let Some(path) = &out.output {
        let doc = envelope(kind, config, &payload)?;
        write_json(path, &doc)?;
    }
    Ok(())
}

/// Runs one subcommand; Ok(true) = all checks passed.
fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Couplings { model, out } => {
            let cfg = model_config(&model)?;
            let spec = cfg.to_spec()?;
            let ranges: Vec<usize> = if spec.long_range_weights.is_empty() {
                vec![1]
            } else {
                spec.long_range_weights.iter().map(|(k, _)| *k).collect()
            };
            let mut rows = Vec::new();
            for axis in 0..spec.lattice.d() {
                for &k in &ranges {
                    let c = spec.couplings(axis, k)?;
                    println!(
                        "axis {axis} range {k}: Jx = {:+.9}{:+.9}i  Jy = {:+.9}{:+.9}i  Jz = {:+.9}{:+.9}i",
                        c.jx.re, c.jx.im, c.jy.re, c.jy.im, c.jz.re, c.jz.im
                    );
                    rows.push(serde_json::json!({
                        "axis": axis,
                        "range": k,
                        "jx": [c.jx.re, c.jx.im],
                        "jy": [c.jy.re, c.jy.im],
                        "jz": [c.jz.re, c.jz.im],
                        "j_plus": [c.j_plus().re, c.j_plus().im],
                        "j_minus": [c.j_minus().re, c.j_minus().im],
                    }));
                }
            }
            emit(&out, "couplings", &serde_json::to_value(&cfg)?, serde_json::json!(rows))?;
            Ok(true)
        }
        Command::Identities { tau, samples, seed, tolerance, out } => {
            let tau = parse_tau(&tau)?;
            let ctx = EllipticContext::new(tau)?;
            let report = identity_suite(&ctx, samples, seed);
            let passed = report.all_below(tolerance);
            for c in &report.entries {
                println!(
                    "{}: max residual {:.3e} {}",
                    c.name,
                    c.max_residual,
                    if c.max_residual <= tolerance { "ok" } else { "FAIL" }
                );
            }
            let cfg = serde_json::json!({"tau": [tau.re, tau.im], "samples": samples, "seed": seed});
            let payload = serde_json::json!({
                "checks": report.entries.iter().map(|c| serde_json::json!({
                    "name": c.name, "max_residual": c.max_residual,
                })).collect::<Vec<_>>(),
                "tolerance": tolerance,
                "passed": passed,
            });
            emit(&out, "identities", &cfg, payload)?;
            Ok(passed)
        }
        Command::VerifyShs { model, u, epsilon, tolerance, out } => {
            let cfg = model_config(&model)?;
            let spec = cfg.to_spec()?;
            let u = parse_parameter(&u, tau_of(&cfg))?.complex();
            let eps = parse_epsilon(&epsilon, spec.lattice.d())?;
            let witness = commensurability_for(&spec)?;
            let state = build_shs(u, &eps, &spec)?.to_dense();
            let expected = shs_energy(&spec, &witness).ok();
            let report = check_eigenstate(
                &spec,
                &state,
                expected,
                tolerance,
                "verify-shs",
                serde_json::json!({
                    "u": [u.re, u.im],
                    "epsilon": eps.signs(),
                    "winding_p": witness.p,
                    "winding_q": witness.q,
                }),
            )?;
            println!(
                "eigenstate residual {:.3e}, energy {:+.12}{:+.12}i {}",
                report.residual,
                report.measured_energy[0],
                report.measured_energy[1],
                if report.passed { "ok" } else { "FAIL" }
            );
            let passed = report.passed;
            emit(&out, "verify-shs", &serde_json::to_value(&cfg)?, serde_json::to_value(&report)?)?;
            Ok(passed)
        }
        Command::Texture { model, u, epsilon, out } => {
            let cfg = model_config(&model)?;
            let spec = cfg.to_spec()?;
            let u = parse_parameter(&u, tau_of(&cfg))?.complex();
            let eps = parse_epsilon(&epsilon, spec.lattice.d())?;
            let state = build_shs(u, &eps, &spec)?;
            let triples = texture(&state, &spec.spin);
            let coords: Vec<Vec<usize>> = (0..spec.lattice.volume())
                .map(|s| spec.lattice.coords(s))
                .collect();
            let csv = texture_csv(spec.lattice.dims(), &coords, &triples);
            match &out.output {
                Some(path) => write_atomic(path, csv.as_bytes())?,
                None => print!("{csv}"),
            }
            Ok(true)
        }
        Command::Spectrum { model, out } => {
            let cfg = model_config(&model)?;
            let spec = cfg.to_spec()?;
            let witness = commensurability_for(&spec)?;
            let target = shs_energy(&spec, &witness)?;
            let mut family: Vec<DenseState> = Vec::new();
            let d = spec.lattice.d();
            let top = spec.spin.twice_s() as usize * spec.lattice.volume();
            for sign in [1i8, -1] {
                let eps = helix_core::lattice::ChiralityVector::uniform(d, sign);
                for n in 0..=top {
                    family.push(tower_state(n, &eps, &spec)?.amplitudes);
                }
            }
            let report = degeneracy_scan(&spec, target, &family, top + 1)?;
            println!(
                "cluster of {} eigenvalues at E = {:+.12}{:+.12}i, constructed span {}",
                report.cluster_size,
                target.re,
                target.im,
                report.span_dimension
            );
            let passed = report.cluster_size >= report.span_dimension;
            emit(&out, "spectrum", &serde_json::to_value(&cfg)?, serde_json::to_value(&report)?)?;
            Ok(passed)
        }
        Command::Entropy { model, n, va, tolerance, out } => {
            let cfg = model_config(&model)?;
            let spec = cfg.to_spec()?;
            if va == 0 || va >= spec.lattice.volume() {
                bail!("va must be between 1 and volume-1");
            }
            let formula = tower_entropy(n, va, spec.spin.twice_s(), spec.lattice.volume())?;
            let eps = helix_core::lattice::ChiralityVector::uniform(spec.lattice.d(), 1);
            let t = tower_state(n, &eps, &spec)?;
            let schmidt = helix_cli::verify::schmidt_entropy(&t.amplitudes, va);
            let asym = asymptotic_entropy(spec.spin.twice_s(), spec.lattice.volume());
            let passed = (formula - schmidt).abs() <= tolerance;
            println!(
                "entropy formula {formula:.12}, Schmidt {schmidt:.12}, half-system asymptote {asym:.12} {}",
                if passed { "ok" } else { "FAIL" }
            );
            let payload = serde_json::json!({
                "n": n, "va": va,
                "formula": formula, "schmidt": schmidt,
                "asymptotic_half_system": asym,
                "tolerance": tolerance, "passed": passed,
            });
            emit(&out, "entropy", &serde_json::to_value(&cfg)?, payload)?;
            Ok(passed)
        }
        Command::Divergence { twice_s, eta, tau, u, sign, tolerance, out } => {
            if sign != 1 && sign != -1 {
                bail!("sign must be +1 or -1");
            }
            let tau = parse_tau(&tau)?;
            let eta = parse_parameter(&eta, tau)?.complex();
            let u = parse_parameter(&u, tau)?.complex();
            let report = check_divergence(twice_s, eta, tau, u, sign, tolerance)?;
            println!(
                "divergence residual {:.3e} {}",
                report.residual,
                if report.passed { "ok" } else { "FAIL" }
            );
            let passed = report.passed;
            let cfg = serde_json::json!({
                "twice_s": twice_s, "eta": [eta.re, eta.im], "tau": [tau.re, tau.im],
            });
            emit(&out, "divergence", &cfg, serde_json::to_value(&report)?)?;
            Ok(passed)
        }
        Command::Towers { model, epsilon, tolerance, out } => {
            let cfg = model_config(&model)?;
            let spec = cfg.to_spec()?;
            let eps = parse_epsilon(&epsilon, spec.lattice.d())?;
            let top = spec.spin.twice_s() as usize * spec.lattice.volume();
            let mut rows = Vec::new();
            let mut all_ok = true;
            for n in 0..=top {
                let t = tower_state(n, &eps, &spec)?;
                let report = check_eigenstate(
                    &spec,
                    &t.amplitudes,
                    None,
                    tolerance,
                    "tower",
                    serde_json::json!({"n": n}),
                )?;
                println!(
                    "n = {n}: residual {:.3e}, energy {:+.12}{:+.12}i {}",
                    report.residual,
                    report.measured_energy[0],
                    report.measured_energy[1],
                    if report.passed { "ok" } else { "FAIL" }
                );
                all_ok &= report.passed;
                rows.push(serde_json::to_value(&report)?);
            }
            emit(&out, "towers", &serde_json::to_value(&cfg)?, serde_json::json!(rows))?;
            Ok(all_ok)
        }
        Command::TrigLimit { eta, max_im_tau, tolerance, out } => {
            let eta = parse_parameter(&eta, Complex64::new(0.0, 1.0))?.value[0];
            let mut im_taus = vec![1.5];
            while *im_taus.last().unwrap() * 2.0 <= max_im_tau {
                im_taus.push(im_taus.last().unwrap() * 2.0);
            }
            let devs = trig_limit_deviations(eta, &im_taus)?;
            for (t, d) in im_taus.iter().zip(&devs) {
                println!("Im tau = {t}: max deviation {d:.3e}");
            }
            let monotone = devs.windows(2).all(|w| w[1] < w[0]);
            let passed = monotone && *devs.last().unwrap() <= tolerance;
            println!("{}", if passed { "ok" } else { "FAIL" });
            let payload = serde_json::json!({
                "eta": eta, "im_taus": im_taus, "deviations": devs,
                "tolerance": tolerance, "passed": passed,
            });
            emit(&out, "trig-limit", &serde_json::json!({"eta": eta}), payload)?;
            Ok(passed)
        }
    }
}

fn tau_of(cfg: &ModelConfig) -> Complex64 {
    cfg.tau
        .map(|t| Complex64::new(t[0], t[1]))
        .unwrap_or(Complex64::new(0.0, 1.0))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version requests are not validation failures
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
