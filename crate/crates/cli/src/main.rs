//! Command-line surface: kernel tables, Riesz transforms, atomic
//! decomposition, and the verification suites. All outputs are CSV/JSON
//! files under --out; a fixed config and seed reproduce every byte.
//!
//! Exit codes: 0 success, 1 suite failure (reports still written),
//! 2 config/schema/domain error, 3 quadrature non-convergence.

use clap::{Parser, Subcommand, ValueEnum};
use laguerre_hardy::config::RunConfig;
use laguerre_hardy::error::Error;
use laguerre_hardy::io::{
    read_grid_function, write_decomposition_json, write_decomposition_profiles,
    write_grid_function, write_kernel_table, KernelRow,
};
use laguerre_hardy::kernels::{bessel_heat, laguerre_heat, riesz_bessel_direct, LaguerreRiesz};
use laguerre_hardy::measure::Alpha;
use laguerre_hardy::quadrature::Grid;
use laguerre_hardy::transforms::{analyze, riesz_pv, riesz_spectral_eval, GridFunction};
use laguerre_hardy::verify::run_suite;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "laguerre-hardy",
    version,
    about = "Heat kernels, Riesz transforms, and atomic decomposition on ((0,inf), x^alpha dx)"
)]
struct Cli {
    /// JSON configuration file; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Comma-separated list of alpha values (overrides the config).
    #[arg(long, global = true, value_delimiter = ',')]
    alpha: Option<Vec<f64>>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Seed of the deterministic sweeps (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum KernelKind {
    /// Laguerre heat kernel (needs --t).
    T,
    /// Bessel heat kernel (needs --t).
    TTilde,
    /// Laguerre Riesz kernel.
    R,
    /// Bessel Riesz kernel.
    RTilde,
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum Method {
    Spectral,
    Pv,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulates a kernel on an x×y grid as CSV.
    Kernel {
        #[arg(long, value_enum)]
        which: KernelKind,
        /// Time parameter of the heat kernels.
        #[arg(long)]
        t: Option<f64>,
        /// x sweep as lo:hi:count.
        #[arg(long)]
        x_range: String,
        /// y sweep as lo:hi:count.
        #[arg(long)]
        y_range: String,
    },
    /// Runs a verification suite and writes one JSON report per alpha.
    Verify {
        #[arg(long)]
        suite: String,
    },
    /// Applies the Riesz transform to a serialized function.
    Riesz {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        method: Method,
    },
    /// Decomposes a serialized function into atoms.
    Decompose {
        #[arg(long)]
        input: PathBuf,
    },
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::QuadratureNonConvergence(_) | Error::PvDivergent(_) => 3,
        _ => 2,
    }
}

fn parse_range(spec: &str) -> Result<Vec<f64>, Error> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::InvalidInput(format!(
            "range must be lo:hi:count, got {spec}"
        )));
    }
    let lo: f64 = parts[0]
        .parse()
        .map_err(|_| Error::InvalidInput(format!("bad range lo in {spec}")))?;
    let hi: f64 = parts[1]
        .parse()
        .map_err(|_| Error::InvalidInput(format!("bad range hi in {spec}")))?;
    let n: usize = parts[2]
        .parse()
        .map_err(|_| Error::InvalidInput(format!("bad range count in {spec}")))?;
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    if !(hi > lo && lo > 0.0) {
        return Err(Error::InvalidInput(format!(
            "range must satisfy 0 < lo < hi, got {spec}"
        )));
    }
    Ok((0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect())
}

fn load_config(cli: &Cli) -> Result<RunConfig, Error> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::from_json(&fs::read_to_string(path)?)?,
        None => RunConfig::default(),
    };
    if let Some(alphas) = &cli.alpha {
        cfg.alphas = alphas.clone();
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_kernel(
    cfg: &RunConfig,
    out_dir: &Path,
    which: KernelKind,
    t: Option<f64>,
    xs: &[f64],
    ys: &[f64],
) -> Result<(), Error> {
    let mut rows = Vec::new();
    for &al in &cfg.alphas {
        let alpha = Alpha::new(al)?;
        match which {
            KernelKind::T | KernelKind::TTilde => {
                let t = t.ok_or_else(|| Error::InvalidInput("heat kernels need --t".into()))?;
                for &x in xs {
                    for &y in ys {
                        // Direct stabilized evaluation: machine accuracy, no
                        // quadrature; the error column carries the exact tag 0.
                        let value = match which {
                            KernelKind::T => laguerre_heat(t, x, y, alpha)?,
                            _ => bessel_heat(t, x, y, alpha)?,
                        };
                        rows.push(KernelRow {
                            alpha: al,
                            t: Some(t),
                            x,
                            y,
                            value,
                            est_error: 0.0,
                        });
                    }
                }
            }
            KernelKind::R => {
                let lag = LaguerreRiesz::new(alpha, cfg.kernel_tol);
                for &x in xs {
                    for &y in ys {
                        if x == y {
                            return Err(Error::Domain(format!(
                                "Riesz kernel requested on the diagonal (x = y = {x})"
                            )));
                        }
                        let est = lag.eval_estimate(x, y)?;
                        rows.push(KernelRow {
                            alpha: al,
                            t: None,
                            x,
                            y,
                            value: est.value,
                            est_error: est.error,
                        });
                    }
                }
            }
            KernelKind::RTilde => {
                for &x in xs {
                    for &y in ys {
                        if x == y {
                            return Err(Error::Domain(format!(
                                "Riesz kernel requested on the diagonal (x = y = {x})"
                            )));
                        }
                        let est = riesz_bessel_direct(x, y, alpha, cfg.kernel_tol)?;
                        rows.push(KernelRow {
                            alpha: al,
                            t: None,
                            x,
                            y,
                            value: est.value,
                            est_error: est.error,
                        });
                    }
                }
            }
        }
    }
    let name = match which {
        KernelKind::T => "kernel_T.csv",
        KernelKind::TTilde => "kernel_T_tilde.csv",
        KernelKind::R => "kernel_R.csv",
        KernelKind::RTilde => "kernel_R_tilde.csv",
    };
    let file = fs::File::create(out_dir.join(name))?;
    write_kernel_table(&rows, file)?;
    Ok(())
}

fn cmd_verify(cfg: &RunConfig, out_dir: &Path, suite: &str) -> Result<bool, Error> {
    let mut all_pass = true;
    for &al in &cfg.alphas {
        let report = run_suite(suite, al, cfg)?;
        all_pass &= report.pass;
        let name = format!("verify_{}_alpha{}.json", suite, al);
        fs::write(out_dir.join(name), serde_json::to_string_pretty(&report)?)?;
    }
    Ok(all_pass)
}

fn cmd_riesz(cfg: &RunConfig, out_dir: &Path, input: &Path, method: Method) -> Result<(), Error> {
    let f = read_grid_function(fs::File::open(input)?)?;
    // The function file fixes alpha; the config's alpha list is not used here.
    let al = f.alpha().get();
    // Output nodes: a moderate grid so the PV route stays affordable.
    let out_grid = Grid::standard(f.alpha(), f.grid.x_max())?;
    let mut spectral: Option<GridFunction> = None;
    let mut pv: Option<GridFunction> = None;
    if method == Method::Spectral || method == Method::Both {
        let coeffs = analyze(&f, cfg.kmax)?;
        spectral = Some(GridFunction::from_fn(out_grid.clone(), |x| {
            riesz_spectral_eval(&coeffs, x)
        }));
    }
    if method == Method::Pv || method == Method::Both {
        let ctx = cfg.ctx(al)?;
        let coarse = coarse_grid(f.alpha(), f.grid.x_max())?;
        let vals: Vec<f64> = coarse
            .nodes()
            .iter()
            .map(|&x| riesz_pv(&f, x, &ctx))
            .collect::<Result<_, _>>()?;
        pv = Some(GridFunction {
            grid: coarse,
            values: vals,
            tail: laguerre_hardy::transforms::Tail::CompactSupport,
        });
    }
    if let Some(g) = &spectral {
        write_grid_function(g, fs::File::create(out_dir.join("riesz_spectral.dat"))?)?;
    }
    if let Some(g) = &pv {
        write_grid_function(g, fs::File::create(out_dir.join("riesz_pv.dat"))?)?;
    }
    let mut summary = serde_json::Map::new();
    summary.insert("alpha".into(), serde_json::json!(al));
    if let (Some(s), Some(p)) = (&spectral, &pv) {
        // Relative L² discrepancy on the PV grid.
        let mut num = 0.0;
        let mut den = 0.0;
        for (&x, &w) in p.grid.nodes().iter().zip(p.grid.mu_weights()) {
            let sv = s.value_at(x);
            let pv = p.value_at(x);
            num += w * (sv - pv) * (sv - pv);
            den += w * sv * sv;
        }
        summary.insert(
            "cross_method_discrepancy_rel_l2".into(),
            serde_json::json!((num / den.max(1e-300)).sqrt()),
        );
    }
    fs::write(
        out_dir.join("riesz_summary.json"),
        serde_json::to_string_pretty(&serde_json::Value::Object(summary))?,
    )?;
    Ok(())
}

/// Output grid for the PV route: 16 panels up to x_max.
fn coarse_grid(alpha: Alpha, x_max: f64) -> Result<Grid, Error> {
    let n = 16;
    let b: Vec<f64> = (0..=n).map(|i| x_max * i as f64 / n as f64).collect();
    Grid::from_boundaries(alpha, b)
}

fn cmd_decompose(cfg: &RunConfig, out_dir: &Path, input: &Path) -> Result<(), Error> {
    let f = read_grid_function(fs::File::open(input)?)?;
    let dec = laguerre_hardy::atoms::decompose(
        &f,
        laguerre_hardy::atoms::DecomposeParams {
            haar_depth: cfg.haar_depth,
        },
    )?;
    write_decomposition_json(&dec, fs::File::create(out_dir.join("decomposition.json"))?)?;
    write_decomposition_profiles(
        &dec,
        fs::File::create(out_dir.join("decomposition_profiles.csv"))?,
    )?;
    let recon = dec.reconstruction_l1_error(&f)?;
    let f_l1 = f.lp_norm(1);
    let coeffs = analyze(&f, cfg.kmax)?;
    let rf_l1 = laguerre_hardy::quadrature::integrate_mu(
        |x| riesz_spectral_eval(&coeffs, x).abs(),
        0.0,
        f.grid.x_max() + 4.0,
        f.alpha(),
        1e-8,
    )?
    .value;
    let summary = serde_json::json!({
        "alpha": f.alpha().get(),
        "atoms": dec.len(),
        "coefficient_l1": dec.coefficient_l1(),
        "f_l1": f_l1,
        "rf_l1_spectral_estimate": rf_l1,
        "norm_control_ratio": dec.coefficient_l1() / (f_l1 + rf_l1),
        "reconstruction_rel_l1": recon / f_l1.max(1e-300),
    });
    fs::write(
        out_dir.join("decompose_summary.json"),
        serde_json::to_string_pretty(&summary)?,
    )?;
    Ok(())
}

fn run() -> Result<bool, Error> {
    let cli = Cli::parse();
    let cfg = load_config(&cli)?;
    fs::create_dir_all(&cli.out)?;
    match &cli.command {
        Command::Kernel {
            which,
            t,
            x_range,
            y_range,
        } => {
            let xs = parse_range(x_range)?;
            let ys = parse_range(y_range)?;
            cmd_kernel(&cfg, &cli.out, *which, *t, &xs, &ys)?;
            Ok(true)
        }
        Command::Verify { suite } => cmd_verify(&cfg, &cli.out, suite),
        Command::Riesz { input, method } => {
            cmd_riesz(&cfg, &cli.out, input, *method)?;
            Ok(true)
        }
        Command::Decompose { input } => {
            cmd_decompose(&cfg, &cli.out, input)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
