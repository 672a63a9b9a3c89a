use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use robin_sdp::experiment::{self, ExperimentConfig, TrueGamma};
use robin_sdp::Error;

#[derive(Parser)]
#[command(
    name = "robin-sdp",
    version,
    about = "Robin coefficient reconstruction by convex semidefinite programming"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the solvability criterion (sweeping m unless --m is given).
    Criterion(Overrides),
    /// Synthesize data, add noise and reconstruct.
    Reconstruct(Overrides),
    /// Run the sampled monotonicity/convexity/derivative checks.
    Properties(Overrides),
    /// Write the mesh listing.
    MeshDump(Overrides),
}

#[derive(Args, Default)]
struct Overrides {
    /// JSON config; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    interface_radius: Option<f64>,
    #[arg(long)]
    segments_per_arc: Option<usize>,
    #[arg(long)]
    mesh_size: Option<f64>,
    /// Fixed number of measurements (disables the sweep).
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    m_max: Option<usize>,
    /// Comma-separated values or "random".
    #[arg(long)]
    true_gamma: Option<String>,
    #[arg(long)]
    gamma_seed: Option<u64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    noise_seed: Option<u64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Reconstruction strategy (barrier, grid).
    #[arg(long)]
    solver: Option<String>,
    #[arg(long)]
    opt_tol: Option<f64>,
    #[arg(long)]
    feas_tol: Option<f64>,
    #[arg(long)]
    max_newton: Option<usize>,
    #[arg(long)]
    mu_factor: Option<f64>,
    #[arg(long)]
    grid_points: Option<usize>,
    #[arg(long)]
    force: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Overrides {
    fn resolve(self) -> Result<ExperimentConfig, Error> {
        let mut c = match &self.config {
            Some(p) => ExperimentConfig::from_json_file(p)?,
            None => ExperimentConfig::default(),
        };
        macro_rules! set {
            ($($flag:ident => $field:expr),* $(,)?) => {
                $(if let Some(v) = self.$flag { $field = v; })*
            };
        }
        set! {
            a => c.a,
            b => c.b,
            n => c.n,
            interface_radius => c.interface_radius,
            segments_per_arc => c.segments_per_arc,
            mesh_size => c.mesh_size,
            m_max => c.m_max,
            gamma_seed => c.gamma_seed,
            delta => c.delta,
            noise_seed => c.noise_seed,
            samples => c.samples,
            seed => c.property_seed,
            solver => c.solver,
            feas_tol => c.solver_options.feas_tol,
            max_newton => c.solver_options.max_newton,
            mu_factor => c.solver_options.mu_factor,
            grid_points => c.solver_options.grid_points,
            out => c.output_dir,
        }
        if let Some(m) = self.m {
            c.m = Some(m);
        }
        if let Some(t) = self.opt_tol {
            c.solver_options.opt_tol = Some(t);
        }
        if let Some(g) = self.true_gamma {
            c.true_gamma = g.parse::<TrueGamma>()?;
        }
        c.force |= self.force;
        Ok(c)
    }
}

fn run(command: Command) -> Result<i32, Error> {
    match command {
        Command::Criterion(o) => {
            let r = experiment::run_criterion(&o.resolve()?)?;
            println!(
                "m = {}  K = {} (closed form {})  lambda = {:e}  {}",
                r.m,
                r.k,
                r.k_closed_form,
                r.lambda,
                if r.passed {
                    "criterion met"
                } else {
                    "criterion NOT met"
                }
            );
            Ok(r.exit_code())
        }
        Command::Reconstruct(o) => {
            let r = experiment::run_reconstruct(&o.resolve()?)?;
            println!(
                "m = {}  x* = {}  true = {}  error = {:e}  radius = {}",
                r.m,
                r.result.minimizer,
                r.true_gamma,
                r.error_inf,
                r.result
                    .certified_error_radius
                    .map_or("uncertified".to_string(), |v| format!("{v:e}"))
            );
            Ok(r.exit_code())
        }
        Command::Properties(o) => {
            let r = experiment::run_properties(&o.resolve()?)?;
            for p in &r.properties {
                if p.skipped {
                    println!("{:<32} skipped", p.name);
                } else {
                    println!("{:<32} {}/{}", p.name, p.passed, p.passed + p.failed);
                }
                if let Some(f) = &p.first_failure {
                    println!("    first failure: {f}");
                }
            }
            Ok(r.exit_code())
        }
        Command::MeshDump(o) => {
            let path = experiment::run_mesh_dump(&o.resolve()?)?;
            println!("{}", path.display());
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
