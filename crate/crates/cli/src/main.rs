//! `loopbu`: build, transform, solve and verify loops on spheres from the shell.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use loopbu_core::coincidence::{
    default_fiber_count, family_demo, solve_bu, Embedding, OddMapProblem, SolveError, SolverConfig,
};
use loopbu_core::embeddings::{
    embed_alpha, embed_beta, embed_gamma, h_lambda, tf_sphere_embed, TfSphereParams,
};
use loopbu_core::functionals::{
    build_alpha_x, build_reduced_system, coincidence_gap, null_space, path_eval, Component,
    FunctionalSpec, DEFAULT_KERNEL_TOL,
};
use loopbu_core::io::{
    certificate_to_json, family_to_json, kernel_family_to_json, loop_to_json, paths_from_json,
    read_loop, read_spec, read_text, write_text, FormatError, KernelFamilyDocument, LoopDocument,
};
use loopbu_core::loop_core::{check_grid, node, pushoff_homotopy, Loop, Manifold, PushoffArcs};
use loopbu_core::sphere_geom::SpherePoint;

const EXIT_FAILED: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_NO_CONVERGENCE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "loopbu",
    version,
    about = "Coincidences f(α) = f(α*) on loop spaces of spheres"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Push a loop off the to-and-fro loops along two opposite quarter meridians.
    Pushoff {
        #[arg(long = "in")]
        input: PathBuf,
        /// Homotopy parameter in [0, 1].
        #[arg(long, default_value_t = 1.0)]
        s: f64,
        /// Equatorial direction of the first arc (default e_1).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        mu: Option<Vec<f64>>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write one of the equivariant embeddings as a loop.
    Embed {
        #[arg(long, value_enum)]
        kind: EmbedKind,
        /// Sphere dimension.
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Equatorial point, `n` or `n + 1` comma-separated coordinates.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x: Option<Vec<f64>>,
        /// Base-point parameter of the moving-base circles (kind beta).
        #[arg(long)]
        lambda: Option<f64>,
        /// Rotate the beta circle back to the south pole.
        #[arg(long)]
        rotate: bool,
        /// To-and-fro loop for kind gamma.
        #[arg(long)]
        omega: Option<PathBuf>,
        /// Point of S^d for kind tf.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        c: Option<Vec<f64>>,
        #[arg(long, default_value_t = 256)]
        m: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Find x on the equator with f(e(x)) = f(e(−x)) and write a certificate.
    Solve {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 256)]
        m: usize,
        #[arg(long, value_enum, default_value_t = EmbeddingKind::Alpha)]
        embedding: EmbeddingKind,
        #[arg(long)]
        omega: Option<PathBuf>,
        /// Search even when k ≥ n, where no zero is guaranteed.
        #[arg(long)]
        best_effort: bool,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value_t = 100)]
        iters: usize,
        #[arg(long, default_value_t = 4096)]
        grid: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve the γ problem on every fibre of a sphere of to-and-fro loops.
    Family {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        d: usize,
        #[arg(long)]
        fibers: Option<usize>,
        #[arg(long, default_value_t = 256)]
        m: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value_t = 4096)]
        grid: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Kernel of the reduced linear system and the loops it produces.
    LinearFamily {
        /// Path JSON: one path document or an array of them.
        #[arg(long)]
        betas: PathBuf,
        #[arg(long, default_value_t = 4)]
        basis: usize,
        #[arg(long, default_value_t = 256)]
        m: usize,
        #[arg(long, default_value_t = DEFAULT_KERNEL_TOL)]
        kernel_tol: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the coincidence gap and the tf distance of a loop.
    Verify {
        #[arg(long = "loop")]
        loop_path: PathBuf,
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Write loop samples as CSV rows `t, x_0, x_1, …`.
    ExportPlot {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum EmbedKind {
    Alpha,
    Beta,
    Gamma,
    Tf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EmbeddingKind {
    Alpha,
    Gamma,
}

enum Failure {
    Input(String),
    Unmet(String),
    NoConvergence(String),
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<loopbu_core::Error> for Failure {
    fn from(e: loopbu_core::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_INPUT);
    }
    let result = match cli.command {
        Command::Pushoff { input, s, mu, out } => cmd_pushoff(&input, s, mu, &out),
        Command::Embed {
            kind,
            n,
            x,
            lambda,
            rotate,
            omega,
            c,
            m,
            out,
        } => cmd_embed(kind, n, x, lambda, rotate, omega, c, m, &out),
        Command::Solve {
            spec,
            n,
            m,
            embedding,
            omega,
            best_effort,
            tol,
            iters,
            grid,
            out,
        } => {
            let config = SolverConfig {
                tol,
                iters,
                grid_points: grid,
                best_effort,
                ..SolverConfig::default()
            };
            cmd_solve(&spec, n, m, embedding, omega, &config, &out)
        }
        Command::Family {
            spec,
            n,
            d,
            fibers,
            m,
            tol,
            grid,
            out,
        } => {
            let config = SolverConfig {
                tol,
                grid_points: grid,
                ..SolverConfig::default()
            };
            cmd_family(&spec, n, d, fibers, m, &config, &out)
        }
        Command::LinearFamily {
            betas,
            basis,
            m,
            kernel_tol,
            out,
        } => cmd_linear_family(&betas, basis, m, kernel_tol, &out),
        Command::Verify {
            loop_path,
            spec,
            tol,
        } => cmd_verify(&loop_path, &spec, tol),
        Command::ExportPlot { input, out } => cmd_export_plot(&input, &out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
        Err(Failure::Unmet(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(EXIT_FAILED)
        }
        Err(Failure::NoConvergence(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(EXIT_NO_CONVERGENCE)
        }
    }
}

/// Honours `LOOPBU_THREADS` (0 or unset: one thread per core).
fn configure_threads() -> Result<(), String> {
    let Ok(value) = std::env::var("LOOPBU_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .map_err(|_| format!("LOOPBU_THREADS must be a non-negative integer, got {value:?}"))?;
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn check_positive(name: &str, v: f64) -> CmdResult {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Failure::Input(format!(
            "--{name} must be positive, got {v}"
        )))
    }
}

/// Accepts `n` equatorial coordinates or `n + 1` with a zero last entry.
fn equatorial_point(coords: &[f64], n: usize) -> Result<SpherePoint, Failure> {
    let point = if coords.len() == n {
        SpherePoint::on_equator(coords)?
    } else if coords.len() == n + 1 {
        let p = SpherePoint::new(coords.to_vec())?;
        if !p.is_equatorial() {
            return Err(Failure::Input(format!(
                "--x must lie on the equator, last coordinate is {}",
                p.height()
            )));
        }
        p
    } else {
        return Err(Failure::Input(format!(
            "--x needs {n} or {} coordinates, got {}",
            n + 1,
            coords.len()
        )));
    };
    Ok(point)
}

fn write_loop(path: &Path, l: &Loop) -> CmdResult {
    Ok(write_text(path, &loop_to_json(l))?)
}

fn cmd_pushoff(input: &Path, s: f64, mu: Option<Vec<f64>>, out: &Path) -> CmdResult {
    let alpha = read_loop(input)?;
    let n = match alpha.manifold() {
        Manifold::Sphere(n) => n,
        Manifold::Euclidean(_) => {
            return Err(Failure::Input("push-off needs a loop on a sphere".into()))
        }
    };
    let arcs = match mu {
        Some(dir) => PushoffArcs::meridians_through(&equatorial_point(&dir, n)?)?,
        None => PushoffArcs::quarter_meridians(n),
    };
    let pushed = pushoff_homotopy(&alpha, s, &arcs)?;
    println!("tf_distance before: {:.12e}", alpha.tf_distance());
    println!("tf_distance after:  {:.12e}", pushed.tf_distance());
    write_loop(out, &pushed)
}

#[allow(clippy::too_many_arguments)]
fn cmd_embed(
    kind: EmbedKind,
    n: usize,
    x: Option<Vec<f64>>,
    lambda: Option<f64>,
    rotate: bool,
    omega: Option<PathBuf>,
    c: Option<Vec<f64>>,
    m: usize,
    out: &Path,
) -> CmdResult {
    check_grid(m)?;
    let need_x = || -> Result<SpherePoint, Failure> {
        let coords = x
            .as_deref()
            .ok_or_else(|| Failure::Input("--x is required for this kind".into()))?;
        equatorial_point(coords, n)
    };
    let l = match kind {
        EmbedKind::Alpha => embed_alpha(&need_x()?, m)?,
        EmbedKind::Beta => match lambda {
            Some(lambda) => h_lambda(&need_x()?, lambda, m)?,
            None => embed_beta(&need_x()?, m, rotate)?,
        },
        EmbedKind::Gamma => {
            let path =
                omega.ok_or_else(|| Failure::Input("--omega is required for gamma".into()))?;
            let omega = read_loop(&path)?;
            if omega.manifold() != Manifold::Sphere(n) {
                return Err(Failure::Input(format!("--omega must be a loop on S^{n}")));
            }
            embed_gamma(&omega, &need_x()?)?
        }
        EmbedKind::Tf => {
            let c = c.ok_or_else(|| Failure::Input("--c is required for tf".into()))?;
            if c.is_empty() {
                return Err(Failure::Input("--c needs at least one coordinate".into()));
            }
            tf_sphere_embed(&c, &TfSphereParams::sine(c.len() - 1), n, m)?
        }
    };
    println!("tf_distance: {:.12e}", l.tf_distance());
    write_loop(out, &l)
}

fn cmd_solve(
    spec_path: &Path,
    n: usize,
    m: usize,
    embedding: EmbeddingKind,
    omega: Option<PathBuf>,
    config: &SolverConfig,
    out: &Path,
) -> CmdResult {
    check_positive("tol", config.tol)?;
    check_grid(m)?;
    let spec = read_spec(spec_path, m)?;
    let embedding = match (embedding, omega) {
        (EmbeddingKind::Alpha, None) => Embedding::Alpha,
        (EmbeddingKind::Alpha, Some(_)) => {
            return Err(Failure::Input(
                "--omega only applies to --embedding gamma".into(),
            ))
        }
        (EmbeddingKind::Gamma, Some(path)) => Embedding::Gamma(read_loop(&path)?),
        (EmbeddingKind::Gamma, None) => {
            Embedding::Gamma(tf_sphere_embed(&[1.0], &TfSphereParams::sine(0), n, m)?)
        }
    };
    let problem = OddMapProblem::new(spec, embedding, n, m)?;
    match solve_bu(&problem, config) {
        Ok(cert) => {
            write_text(out, &certificate_to_json(&cert))?;
            println!(
                "certified: x = {:?}, residual = {:.6e}, tf_distance = {:.6e}, method = {}",
                cert.x.coords(),
                cert.residual,
                cert.tf_distance,
                cert.method.as_str()
            );
            Ok(())
        }
        Err(SolveError::NoConvergence(cert)) => {
            write_text(out, &certificate_to_json(&cert))?;
            Err(Failure::NoConvergence(format!(
                "no convergence: best candidate has |g| = {:.6e}, residual = {:.6e}",
                cert.g_norm, cert.residual
            )))
        }
        Err(SolveError::Problem(e)) => Err(e.into()),
    }
}

fn cmd_family(
    spec_path: &Path,
    n: usize,
    d: usize,
    fibers: Option<usize>,
    m: usize,
    config: &SolverConfig,
    out: &Path,
) -> CmdResult {
    check_positive("tol", config.tol)?;
    check_grid(m)?;
    let spec = read_spec(spec_path, m)?;
    let fibers = fibers.unwrap_or_else(|| default_fiber_count(d));
    let report = family_demo(&spec, &TfSphereParams::sine(d), config, n, m, fibers)?;
    write_text(out, &family_to_json(&report))?;
    let certified = report.certified();
    println!(
        "certified {certified}/{} fibers, max residual {:.6e}",
        report.fibers.len(),
        report.max_residual()
    );
    if report.all_certified() {
        Ok(())
    } else {
        Err(Failure::Unmet(format!(
            "{} of {} fibers not certified",
            report.fibers.len() - certified,
            report.fibers.len()
        )))
    }
}

/// Resamples a path onto the grid of size `m` by linear interpolation.
fn resample(path: &[Vec<f64>], m: usize) -> Vec<Vec<f64>> {
    if path.len() == m + 1 {
        return path.to_vec();
    }
    (0..=m).map(|i| path_eval(path, node(i, m))).collect()
}

fn cmd_linear_family(
    betas_path: &Path,
    basis: usize,
    m: usize,
    kernel_tol: f64,
    out: &Path,
) -> CmdResult {
    check_positive("kernel-tol", kernel_tol)?;
    check_grid(m)?;
    if basis == 0 {
        return Err(Failure::Input("--basis must be at least 1".into()));
    }
    let betas = paths_from_json(&read_text(betas_path)?)?;
    if betas.iter().any(|b| b.len() < 2) {
        return Err(Failure::Input(
            "every path needs at least two samples".into(),
        ));
    }
    let system = build_reduced_system(&betas, basis)?;
    let kernel = null_space(&system, kernel_tol);
    let spec = FunctionalSpec::new(
        betas
            .iter()
            .map(|b| Component::SquaredDistanceToPath {
                beta: resample(b, m),
            })
            .collect(),
    )?;
    let bound = 5.0 / (m * m) as f64 * spec.scale();
    let mut loops = Vec::with_capacity(kernel.len());
    let mut residuals = Vec::with_capacity(kernel.len());
    for v in &kernel {
        let alpha = build_alpha_x(v, &system, m)?;
        let gap = coincidence_gap(&spec, &alpha)?;
        residuals.push(gap.iter().map(|g| g * g).sum::<f64>().sqrt());
        loops.push(LoopDocument::from(&alpha));
    }
    let doc = KernelFamilyDocument {
        kernel_dim: kernel.len(),
        basis: kernel,
        loops,
        residuals,
        bound,
    };
    write_text(out, &kernel_family_to_json(&doc))?;
    let worst = doc.residuals.iter().copied().fold(0.0, f64::max);
    println!(
        "kernel dimension {} of {} unknowns, max residual {worst:.6e} (bound {bound:.6e})",
        doc.kernel_dim,
        system.unknowns()
    );
    if worst <= bound {
        Ok(())
    } else {
        Err(Failure::Unmet(format!(
            "residual {worst:.6e} exceeds the bound {bound:.6e}"
        )))
    }
}

fn cmd_verify(loop_path: &Path, spec_path: &Path, tol: f64) -> CmdResult {
    check_positive("tol", tol)?;
    let alpha = read_loop(loop_path)?;
    let spec = read_spec(spec_path, alpha.m())?;
    let gap = coincidence_gap(&spec, &alpha)?;
    let gap = gap.iter().map(|g| g * g).sum::<f64>().sqrt();
    let tf = alpha.tf_distance();
    println!("gap: {gap:.12e}");
    println!("tf_distance: {tf:.12e}");
    if gap <= tol && tf > tol {
        Ok(())
    } else if gap > tol {
        Err(Failure::Unmet(format!("gap {gap:.6e} exceeds {tol:e}")))
    } else {
        Err(Failure::Unmet(format!("loop is to-and-fro within {tol:e}")))
    }
}

fn cmd_export_plot(input: &Path, out: &Path) -> CmdResult {
    let l = read_loop(input)?;
    let io_err = |e: csv::Error| Failure::Input(format!("{}: {e}", out.display()));
    let mut w = csv::Writer::from_path(out).map_err(io_err)?;
    let dim = l.base().len();
    let mut header = vec!["t".to_string()];
    header.extend((0..dim).map(|i| format!("x{i}")));
    w.write_record(&header).map_err(io_err)?;
    for (i, p) in l.samples().iter().enumerate() {
        let mut row = vec![node(i, l.m()).to_string()];
        row.extend(p.iter().map(f64::to_string));
        w.write_record(&row).map_err(io_err)?;
    }
    w.flush()
        .map_err(|e| Failure::Input(format!("{}: {e}", out.display())))?;
    println!("wrote {} rows to {}", l.m() + 1, out.display());
    Ok(())
}
