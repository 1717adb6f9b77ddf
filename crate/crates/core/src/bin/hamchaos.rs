use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hamchaos::scenario::{self, catalog, catalog_entry, ScenarioReport};
use hamchaos::ChaosError;

#[derive(Parser)]
#[command(name = "hamchaos", version, about = "Hamiltonian chaos toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// Stadium straight-edge parameter(s), comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    gamma: Vec<f64>,
    /// Standard-map kick strength(s), comma separated.
    #[arg(long, value_delimiter = ',')]
    kparam: Vec<f64>,
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Directory for CSV/SVG artifacts (one subdirectory per scenario).
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Evaluate golden-number assertions; failures give exit status 1.
    #[arg(long)]
    assert: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run scenario files or catalog entries (`all` runs the whole catalog).
    Run {
        #[arg(required = true)]
        targets: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
    /// List the built-in reproduction scenarios.
    List,
    /// Phase portraits of the standard map (or stadium with --gamma).
    Sos {
        #[arg(long, default_value_t = 50)]
        orbits: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Periodic-orbit census.
    Orbits {
        #[arg(long, default_value_t = 2)]
        period: usize,
        #[arg(long, default_value_t = 200)]
        grid: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Stable and unstable manifolds of a stadium periodic orbit.
    Manifold {
        #[arg(long, default_value_t = 0.0)]
        q: f64,
        #[arg(long, default_value_t = 0.0)]
        p: f64,
        #[arg(long, default_value_t = 2)]
        period: usize,
        #[arg(long, default_value_t = 5.0)]
        budget: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Homoclinic tangle of the horizontal bounce: resonance area and turnstile flux.
    Tangle {
        #[arg(long, default_value_t = 10.0)]
        budget: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Itinerary partitions of the stadium.
    Partition {
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long, default_value_t = 2048)]
        grid: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Action diffusion under a stadium deformation.
    Perturb {
        #[arg(long, value_delimiter = ',', default_value = "0.001,0.002")]
        epsilon: Vec<f64>,
        #[arg(long, default_value_t = 10_000)]
        ensemble: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Complexified-trajectory contour map of a Gaussian state in the quartic oscillator.
    Complex {
        #[arg(long, default_value_t = 1.0)]
        time: f64,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "-2,2")]
        re: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "-2,2")]
        im: Vec<f64>,
        #[arg(long, default_value_t = 41)]
        nx: usize,
        #[arg(long, default_value_t = 41)]
        ny: usize,
        #[arg(long, default_value_t = 1e6)]
        escape_radius: f64,
        #[command(flatten)]
        common: Common,
    },
}

fn list(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ")
}

fn one(v: &[f64], default: f64) -> f64 {
    v.first().copied().unwrap_or(default)
}

fn generated(command: &Command) -> (String, Common) {
    match command {
        Command::Sos { orbits, common } => {
            let mut s = String::from("[scenario sos]\noperation = sos\n");
            if !common.gamma.is_empty() {
                s += &format!("map = stadium\ngamma = {}\n", list(&common.gamma));
            } else if !common.kparam.is_empty() {
                s += &format!("map = standard\nkparam = {}\n", list(&common.kparam));
            }
            s += &format!("orbits = {orbits}\n");
            if let Some(n) = common.iterations {
                s += &format!("iterations = {n}\n");
            }
            (s, common.clone())
        }
        Command::Orbits { period, grid, common } => {
            let map = if common.kparam.is_empty() {
                format!("map = stadium\ngamma = {:?}\n", one(&common.gamma, 1.0))
            } else {
                format!("map = standard\nkparam = {:?}\n", one(&common.kparam, 1.1))
            };
            (
                format!("[scenario orbits]\noperation = orbits\n{map}period = {period}\ngrid = {grid}\n"),
                common.clone(),
            )
        }
        Command::Manifold {
            q,
            p,
            period,
            budget,
            common,
        } => (
            format!(
                "[scenario manifold]\noperation = manifold\ngamma = {:?}\nq = {q:?}\np = {p:?}\nperiod = {period}\nbudget = {budget:?}\n",
                one(&common.gamma, 1.0)
            ),
            common.clone(),
        ),
        Command::Tangle { budget, common } => {
            let gamma = one(&common.gamma, 1.0);
            let mut s = format!("[scenario tangle]\noperation = turnstile\ngamma = {gamma:?}\nbudget = {budget:?}\n");
            if gamma == 1.0 {
                s += "assert.mmp_a = 3.36839 +- 1e-4\nassert.turnstile_mmp = 0.377248 +- 1e-5\n";
            }
            (s, common.clone())
        }
        Command::Partition { depth, grid, common } => {
            let gammas = if common.gamma.is_empty() { vec![1.0] } else { common.gamma.clone() };
            (
                format!(
                    "[scenario partition]\noperation = partition\ngamma = {}\ndepth = {depth}\ngrid = {grid}\n",
                    list(&gammas)
                ),
                common.clone(),
            )
        }
        Command::Perturb {
            epsilon,
            ensemble,
            common,
        } => {
            let mut s = format!(
                "[scenario perturb]\noperation = diffusion\ngamma = {:?}\nepsilon = {}\nensemble = {ensemble}\n",
                one(&common.gamma, 1.0),
                list(epsilon)
            );
            if let Some(n) = common.iterations {
                s += &format!("t_max = {n}\nfit_to = {n}\n");
            }
            (s, common.clone())
        }
        Command::Complex {
            time,
            re,
            im,
            nx,
            ny,
            escape_radius,
            common,
        } => (
            format!(
                "[scenario complex]\noperation = contour\ntime = {time:?}\nre = {}\nim = {}\nnx = {nx}\nny = {ny}\nescape_radius = {escape_radius:?}\n",
                list(re),
                list(im)
            ),
            common.clone(),
        ),
        Command::Run { .. } | Command::List => unreachable!(),
    }
}

fn run_targets(targets: &[String], common: &Common) -> Result<Vec<ScenarioReport>, ChaosError> {
    let mut text = String::new();
    for t in targets {
        let path = PathBuf::from(t);
        if path.exists() {
            text += &std::fs::read_to_string(&path)?;
            text.push('\n');
        } else if t == "all" {
            for e in catalog() {
                text += e.text;
            }
        } else if let Some(e) = catalog_entry(t) {
            text += e.text;
        } else {
            return Err(ChaosError::InvalidParameter(format!(
                "`{t}` is neither a file nor a catalog scenario"
            )));
        }
    }
    scenario::run_text(&text, common.out_dir.as_deref(), common.seed, common.assert)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::List => match scenario::listing() {
            Ok(s) => {
                print!("{s}");
                return ExitCode::SUCCESS;
            }
            Err(e) => Err(e),
        },
        Command::Run { targets, common } => run_targets(targets, common),
        other => {
            let (text, common) = generated(other);
            scenario::run_text(&text, common.out_dir.as_deref(), common.seed, common.assert)
        }
    };
    match result {
        Ok(reports) => {
            let mut failed = 0;
            let mut checks = 0;
            for r in &reports {
                print!("{}", r.table());
                checks += r.checks.len();
                failed += r.checks.iter().filter(|c| !c.passed).count();
            }
            println!("{} scenario(s), {checks} check(s), {failed} failed", reports.len());
            if failed > 0 {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
