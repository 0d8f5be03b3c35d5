use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fatou_cli::config::parse_window;
use fatou_cli::{run, Command, RunConfig};

#[derive(Parser)]
#[command(name = "fatou", version, about = "Fatou components of singularly perturbed rational maps")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Args)]
struct Shared {
    /// Flat key = value configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `out_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    resolution: Option<usize>,
    #[arg(long)]
    max_iter: Option<u32>,
    /// Global window as CX,CY,W,H.
    #[arg(long, allow_hyphen_values = true)]
    window: Option<String>,
    /// Ring window as CX,CY,W,H, or `auto`.
    #[arg(long, allow_hyphen_values = true)]
    ring_window: Option<String>,
    /// Worker threads; all cores when absent.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Sub {
    /// Escape-time images of the global and ring windows.
    Render(Shared),
    /// Critical points and zeros with their asymptotic residuals.
    Roots(Shared),
    /// Runs every check; exits 1 if any fails.
    Verify(Shared),
    /// Itinerary of the free critical point.
    Itinerary(Shared),
    /// Attainable connectivities for a capture depth.
    Enumerate {
        #[command(flatten)]
        shared: Shared,
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 2)]
        i_max: u32,
        #[arg(long, default_value_t = 2)]
        j_max: u32,
        #[arg(long, default_value_t = 4)]
        l_max: u32,
    },
    /// Finds λ realizing κ = (n+1)^i d^j n^l + 2.
    Search {
        #[command(flatten)]
        shared: Shared,
        #[arg(long)]
        i: u32,
        #[arg(long)]
        j: u32,
        #[arg(long)]
        l: u32,
    },
}

fn apply(shared: &Shared) -> Result<RunConfig, fatou_cli::CliError> {
    let mut cfg = RunConfig::load(&shared.config)?;
    let bad = |e: String| fatou_cli::CliError::Config(e);
    if let Some(o) = &shared.out {
        cfg.out_dir = o.clone();
    }
    if let Some(r) = shared.resolution {
        cfg.resolution = r;
    }
    if let Some(m) = shared.max_iter {
        cfg.max_iter = m;
    }
    if let Some(w) = &shared.window {
        cfg.window = Some(parse_window(w).map_err(bad)?);
    }
    match shared.ring_window.as_deref() {
        Some("auto") => cfg.ring_window = None,
        Some(w) => cfg.ring_window = Some(parse_window(w).map_err(bad)?),
        None => {}
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (shared, cmd) = match cli.command {
        Sub::Render(s) => (s, Command::Render),
        Sub::Roots(s) => (s, Command::Roots),
        Sub::Verify(s) => (s, Command::Verify),
        Sub::Itinerary(s) => (s, Command::Itinerary),
        Sub::Enumerate { shared, k, i_max, j_max, l_max } => {
            (shared, Command::Enumerate { k, i_max, j_max, l_max })
        }
        Sub::Search { shared, i, j, l } => (shared, Command::Search { i, j, l }),
    };
    if let Some(t) = shared.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = apply(&shared).and_then(|cfg| run(&cmd, &cfg));
    match result {
        Ok(o) => {
            println!("{}", o.report.display());
            if o.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
