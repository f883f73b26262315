use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use forcinglab::{
    parse_provider_table, replay, run, run_on, Catalog, ExperimentConfig, RunError, Suite, Tree,
};

#[derive(Parser)]
#[command(
    name = "forcinglab",
    version,
    about = "Exhaustive checks of finite forcing iterations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run suites over every generated instance.
    Run {
        #[command(flatten)]
        opts: Opts,
        /// Replay a counterexample id instead of running.
        #[arg(long, value_name = "ID")]
        replay: Option<String>,
    },
    /// Rerun the instance behind one counterexample id.
    Replay {
        id: String,
        #[command(flatten)]
        opts: Opts,
    },
}

#[derive(Args)]
struct Opts {
    /// Key-value file with the same keys as the long flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Provider table to check instead of the generated census.
    #[arg(long)]
    provider: Option<PathBuf>,
    #[arg(long)]
    suite: Option<Suite>,
    #[arg(long)]
    max_poset: Option<usize>,
    #[arg(long)]
    max_stages: Option<usize>,
    #[arg(long)]
    max_rank: Option<usize>,
    #[arg(long)]
    cap: Option<usize>,
    #[arg(long)]
    draws: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn read(path: &PathBuf) -> Result<String, RunError> {
    std::fs::read_to_string(path).map_err(|source| RunError::Io {
        path: path.clone(),
        source,
    })
}

impl Opts {
    fn config(&self) -> Result<ExperimentConfig, RunError> {
        let mut c = ExperimentConfig::default();
        if let Some(path) = &self.config {
            c.apply_text(&read(path)?)?;
        }
        if let Some(s) = self.suite {
            c.suite = s;
        }
        let overrides = [
            (&mut c.max_poset, self.max_poset),
            (&mut c.max_stages, self.max_stages),
            (&mut c.max_rank, self.max_rank),
            (&mut c.cap, self.cap),
            (&mut c.draws, self.draws),
        ];
        for (field, value) in overrides {
            if let Some(v) = value {
                *field = v;
            }
        }
        if let Some(s) = self.seed {
            c.seed = s;
        }
        if let Some(o) = &self.out {
            c.out = o.clone();
        }
        c.validate()?;
        Ok(c)
    }

    fn provider(&self) -> Result<Option<(Catalog, Tree)>, RunError> {
        match &self.provider {
            Some(path) => Ok(Some(parse_provider_table(
                &read(path)?,
                &Catalog::standard(),
            )?)),
            None => Ok(None),
        }
    }
}

fn do_run(opts: &Opts) -> Result<i32, RunError> {
    let config = opts.config()?;
    let report = match opts.provider()? {
        Some((catalog, tree)) => run_on(&config, &catalog, &[tree]),
        None => run(&config)?,
    };
    report.write(&config.out)?;
    print!("{}", report.table());
    Ok(report.exit_status)
}

fn do_replay(id: &str, opts: &Opts) -> Result<i32, RunError> {
    let config = opts.config()?;
    let catalog = match opts.provider()? {
        Some((catalog, _)) => catalog,
        None => Catalog::standard(),
    };
    let line = replay(&config, &catalog, id)?;
    let json = serde_json::to_string(&line).expect("report lines serialize");
    std::fs::write(&config.out, json + "\n").map_err(|source| RunError::Io {
        path: config.out.clone(),
        source,
    })?;
    let cx = &line.counterexamples[0];
    println!("{} {} on {}", line.suite, line.check, line.label);
    println!("  inputs:   {}", cx.inputs);
    println!("  expected: {}", cx.expected);
    println!("  got:      {}", cx.got);
    Ok(1)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run {
            opts,
            replay: Some(id),
        } => do_replay(id, opts),
        Command::Run { opts, replay: None } => do_run(opts),
        Command::Replay { id, opts } => do_replay(id, opts),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
