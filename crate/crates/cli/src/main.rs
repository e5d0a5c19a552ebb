//! `targetzone`: closed forms, reflected Monte Carlo, Feynman-Kac sampling
//! and finite-difference solvers for the barrier-defense control problem,
//! cross-validated against each other.

mod commands;
mod config;
mod output;
mod svg;

use clap::{Parser, Subcommand};

use config::{CommonArgs, Format};

#[derive(Parser)]
#[command(
    name = "targetzone",
    version,
    about = "Numerical laboratory for the barrier-inventory trading problem",
    after_help = "Model parameters come from flags, falling back to --config key=value \
                  entries, falling back to built-in defaults (unit coefficients, c = 0, \
                  s0 = 1/2, horizon = 1)."
)]
struct Cli {
    #[command(flatten)]
    common: CommonArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Export the exact value function and optimal speed surfaces
    Value {
        /// Time rows of the grid
        #[arg(long, default_value_t = 50)]
        nt: usize,
        /// Spatial nodes of the grid
        #[arg(long, default_value_t = 121)]
        nz: usize,
        /// Far edge of the grid (default: c + 6 sigma sqrt(T))
        #[arg(long)]
        z_max: Option<f64>,
    },
    /// Tabulate a feedback strategy v(t, z)
    Strategy {
        /// zero | constant:<a> | closed-form | scaled:<f> | regularized
        #[arg(long, default_value = "closed-form")]
        kind: String,
        #[arg(long, default_value_t = 20)]
        nt: usize,
        #[arg(long, default_value_t = 41)]
        nz: usize,
        #[arg(long)]
        z_max: Option<f64>,
    },
    /// Monte Carlo payoff of one strategy on the reflected simulator
    Simulate {
        /// zero | constant:<a> | closed-form | scaled:<f> | regularized
        #[arg(long, default_value = "closed-form")]
        strategy: String,
        /// Inventory proxy: pushing | band
        #[arg(long, default_value = "pushing")]
        convention: String,
        /// Also write one CSV row per path
        #[arg(long)]
        per_path: bool,
    },
    /// Feynman-Kac estimates of the smoothed value function vs the closed form
    Ueps {
        /// Evaluation time (default: the horizon)
        #[arg(long)]
        t: Option<f64>,
        #[arg(long, default_value_t = 13)]
        nz: usize,
        #[arg(long)]
        z_max: Option<f64>,
    },
    /// Finite-difference solve of one of the value-function equations
    Pde {
        /// hjb-eps | hopf-cole | singular
        #[arg(long, default_value = "singular")]
        equation: String,
        #[arg(long, default_value_t = 500)]
        nt: usize,
        #[arg(long, default_value_t = 301)]
        nz: usize,
        #[arg(long)]
        z_max: Option<f64>,
        /// Emit an error table against the closed form
        #[arg(long)]
        compare_closed_form: bool,
    },
    /// Sweep the kernel width and tabulate convergence to the closed form
    Converge {
        /// Comma-separated decreasing kernel widths
        #[arg(long, default_value = "1e-1,1e-2,1e-3")]
        eps_list: String,
        /// Evaluation time (default: the horizon)
        #[arg(long)]
        t: Option<f64>,
        /// Comma-separated z values (default: spread over one sigma-band)
        #[arg(long)]
        z_list: Option<String>,
    },
    /// Rank strategies by Monte Carlo payoff
    Compare {
        /// Comma-separated strategy specs
        #[arg(
            long,
            default_value = "closed-form,zero,constant:-0.5,constant:0.5,scaled:1.5"
        )]
        strategies: String,
        /// Inventory proxy: pushing | band
        #[arg(long, default_value = "pushing")]
        convention: String,
    },
    /// Run the acceptance suite (exit status 0 only if every criterion passes)
    Accept {
        /// Reduced path counts and widened Monte Carlo slacks, sub-minute
        #[arg(long)]
        quick: bool,
    },
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    let defaults: &[Format] = match &cli.command {
        Command::Value { .. } => &[Format::Csv, Format::Svg],
        Command::Simulate { .. } => &[Format::Json],
        Command::Pde { .. } => &[Format::Csv, Format::Svg],
        Command::Accept { .. } => &[Format::Json],
        _ => &[Format::Csv],
    };
    let resolved = config::resolve(&cli.common, defaults)?;
    match &cli.command {
        Command::Value { nt, nz, z_max } => commands::cmd_value(&resolved, *nt, *nz, *z_max),
        Command::Strategy {
            kind,
            nt,
            nz,
            z_max,
        } => commands::cmd_strategy(&resolved, kind, *nt, *nz, *z_max),
        Command::Simulate {
            strategy,
            convention,
            per_path,
        } => commands::cmd_simulate(&resolved, strategy, convention, *per_path),
        Command::Ueps { t, nz, z_max } => commands::cmd_ueps(&resolved, *t, *nz, *z_max),
        Command::Pde {
            equation,
            nt,
            nz,
            z_max,
            compare_closed_form,
        } => commands::cmd_pde(&resolved, equation, *nt, *nz, *z_max, *compare_closed_form),
        Command::Converge {
            eps_list,
            t,
            z_list,
        } => commands::cmd_converge(&resolved, eps_list, *t, z_list.as_deref()),
        Command::Compare {
            strategies,
            convention,
        } => commands::cmd_compare(&resolved, strategies, convention),
        Command::Accept { quick } => commands::cmd_accept(&resolved, *quick),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(&cli) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
