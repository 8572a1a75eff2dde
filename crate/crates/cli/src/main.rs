use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};

use egs_core::equivalence::{decide_equivalence, reconstruct, EquivalenceError, Method};
use egs_core::generate::{generate_random, GeneratorConfig};
use egs_core::io::{export_dot, parse_egs, parse_egs_unchecked, parse_znf, serialize_egs, serialize_znf};
use egs_core::normal_form::{normal_form, reduced_normal_form};
use egs_core::reduction::{is_minimal, minimize};
use egs_core::strategy::{enumerate_strategies, reduced_strategies};
use egs_core::transform::{coalesce, find_coalescing_sites, find_simultanizing_sites, simultanize};
use egs_core::GameStructure;

#[derive(Parser)]
#[command(name = "egs", version, about = "Extensive game structures: transformations, minimal games, behavioral equivalence")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Znf,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Minimal,
    Direct,
    Both,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Minimal => Method::Minimal,
            MethodArg::Direct => Method::Direct,
            MethodArg::Both => Method::Both,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check a game file against every structural rule
    Validate { game: PathBuf },
    /// Summary of a game
    Info { game: PathBuf },
    /// List each player's strategies
    Strategies {
        game: PathBuf,
        #[arg(long)]
        reduced: bool,
    },
    /// Print the (reduced) normal form
    NormalForm {
        game: PathBuf,
        #[arg(long)]
        reduced: bool,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// List coalescing and simultanizing sites
    Opportunities { game: PathBuf },
    /// Apply one coalescing step
    Coalesce {
        game: PathBuf,
        #[arg(long, default_value_t = 0)]
        site: usize,
    },
    /// Apply one simultanizing step
    Simultanize {
        game: PathBuf,
        #[arg(long, default_value_t = 0)]
        site: usize,
    },
    /// Reduce to the minimal game
    Minimize {
        game: PathBuf,
        /// Write the reduction steps as JSON lines
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Decide behavioral equivalence of two games
    Equiv {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_enum, default_value = "both")]
        method: MethodArg,
        /// Write the verdict with its isomorphism or traces as JSON
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Build the minimal game of a reduced normal form
    Reconstruct { znf: PathBuf },
    /// Graphviz rendering of a game
    ExportDot {
        game: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Generate a random game
    Random {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        players: usize,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long, default_value_t = 2)]
        actions: usize,
        #[arg(long, default_value_t = 0.2)]
        simultaneity: f64,
        #[arg(long, default_value_t = 0.5)]
        merge: f64,
        #[arg(long, default_value_t = 40)]
        max_nodes: usize,
    },
}

enum Failure {
    Usage(anyhow::Error),
    Input(anyhow::Error),
    Internal(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

type Outcome = Result<ExitCode, Failure>;

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load(path: &Path) -> anyhow::Result<GameStructure> {
    parse_egs(&read(path)?).with_context(|| path.display().to_string())
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(Failure::Usage)
}

fn run(cmd: Command) -> Outcome {
    match cmd {
        Command::Validate { game } => {
            let g = parse_egs_unchecked(&read(&game)?).with_context(|| game.display().to_string())?;
            let report = g.validate();
            if report.is_valid() {
                println!("valid");
                Ok(ExitCode::SUCCESS)
            } else {
                print!("{report}");
                Ok(ExitCode::from(3))
            }
        }
        Command::Info { game } => {
            let g = load(&game)?;
            if let Some(name) = g.name() {
                println!("game: {name}");
            }
            println!("players: {}", g.players().join(" "));
            println!("nodes: {}", g.node_count());
            println!("terminals: {}", g.terminals().len());
            println!("height: {}", g.height());
            for (p, name) in g.players().iter().enumerate() {
                println!(
                    "{name}: {} information sets, {} actions",
                    g.infosets_of(p).count(),
                    g.action_count(p)
                );
            }
            println!("minimal: {}", is_minimal(&g));
            Ok(ExitCode::SUCCESS)
        }
        Command::Strategies { game, reduced } => {
            let g = load(&game)?;
            for p in g.players() {
                let labels: Vec<String> = if reduced {
                    reduced_strategies(&g, p).map_err(anyhow::Error::from)?.into_iter().map(|s| s.label).collect()
                } else {
                    enumerate_strategies(&g, p).map_err(anyhow::Error::from)?.iter().map(|s| s.label()).collect()
                };
                println!("{p}: {}", labels.join(" "));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::NormalForm { game, reduced, format } => {
            let g = load(&game)?;
            let nf = if reduced { reduced_normal_form(&g) } else { normal_form(&g) };
            match format {
                Format::Table => print!("{}", nf.render_table()),
                Format::Znf => print!("{}", serialize_znf(&nf)),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Opportunities { game } => {
            let g = load(&game)?;
            let gamma = find_coalescing_sites(&g);
            let sigma = find_simultanizing_sites(&g);
            println!("coalescing: {}", gamma.len());
            for (k, s) in gamma.iter().enumerate() {
                println!("  [{k}] {}", serde_json::to_string(&s.describe(&g)).expect("serializable"));
            }
            println!("simultanizing: {}", sigma.len());
            for (k, s) in sigma.iter().enumerate() {
                println!("  [{k}] {}", serde_json::to_string(&s.describe(&g)).expect("serializable"));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Coalesce { game, site } => {
            let g = load(&game)?;
            let sites = find_coalescing_sites(&g);
            let s = sites
                .get(site)
                .ok_or_else(|| Failure::Usage(anyhow!("site {site} out of range: {} coalescing sites", sites.len())))?;
            let (out, _) = coalesce(&g, s).map_err(|e| Failure::Internal(e.into()))?;
            print!("{}", serialize_egs(&out));
            Ok(ExitCode::SUCCESS)
        }
        Command::Simultanize { game, site } => {
            let g = load(&game)?;
            let sites = find_simultanizing_sites(&g);
            let s = sites
                .get(site)
                .ok_or_else(|| Failure::Usage(anyhow!("site {site} out of range: {} simultanizing sites", sites.len())))?;
            let (out, _) = simultanize(&g, s).map_err(|e| Failure::Internal(e.into()))?;
            print!("{}", serialize_egs(&out));
            Ok(ExitCode::SUCCESS)
        }
        Command::Minimize { game, trace } => {
            let g = load(&game)?;
            let r = minimize(&g);
            if let Some(path) = trace {
                write(&path, &r.trace.to_json_lines())?;
            }
            print!("{}", serialize_egs(&r.minimal_game));
            Ok(ExitCode::SUCCESS)
        }
        Command::Equiv { a, b, method, witness } => {
            let (ga, gb) = (load(&a)?, load(&b)?);
            let verdict = match decide_equivalence(&ga, &gb, method.into()) {
                Ok(v) => v,
                Err(e @ EquivalenceError::Disagreement { .. }) => return Err(Failure::Internal(e.into())),
            };
            if let Some(path) = witness {
                write(&path, &(serde_json::to_string_pretty(&verdict).expect("serializable") + "\n"))?;
            }
            if verdict.equivalent {
                println!("equivalent");
                Ok(ExitCode::SUCCESS)
            } else {
                println!("not equivalent");
                Ok(ExitCode::from(1))
            }
        }
        Command::Reconstruct { znf } => {
            let nf = parse_znf(&read(&znf)?).with_context(|| znf.display().to_string())?;
            let g = reconstruct(&nf).map_err(anyhow::Error::from)?;
            print!("{}", serialize_egs(&g));
            Ok(ExitCode::SUCCESS)
        }
        Command::ExportDot { game, output } => {
            let dot = export_dot(&load(&game)?);
            match output {
                Some(path) => write(&path, &dot)?,
                None => print!("{dot}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Random {
            seed,
            players,
            depth,
            actions,
            simultaneity,
            merge,
            max_nodes,
        } => {
            let cfg = GeneratorConfig {
                seed,
                num_players: players,
                max_depth: depth,
                max_actions: actions,
                simultaneity_prob: simultaneity,
                infoset_merge_prob: merge,
                max_nodes,
            };
            cfg.check().map_err(|e| Failure::Usage(anyhow!(e)))?;
            print!("{}", serialize_egs(&generate_random(&cfg)));
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(args.command) {
        Ok(code) => code,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
        Err(Failure::Internal(e)) => {
            eprintln!("internal error: {e:#}");
            ExitCode::from(4)
        }
    }
}
