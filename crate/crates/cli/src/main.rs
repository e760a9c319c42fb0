use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::info;

use puppetwire_core::canonical;
use puppetwire_core::command::{load_corpus, CommandCorpus, CorpusError};
use puppetwire_core::offline::{self, Scenario, ScenarioError};
use puppetwire_core::recommend::{oracle, recommend, RecommendConfig, Recommendation};
use puppetwire_core::runtime::{MAX_TICK_RATE, MIN_TICK_RATE};

mod serve;

#[derive(Parser)]
#[command(name = "puppetwire", version, about = "Emotion-command live animation engine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the performer/audience session server.
    Serve {
        #[arg(long)]
        port: u16,
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, default_value_t = 60)]
        tick_rate: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check a corpus file and report every problem.
    Validate { path: PathBuf },
    /// Write the frames of one command as newline-delimited JSON.
    Render {
        path: PathBuf,
        #[arg(long)]
        key: String,
        #[arg(long, default_value_t = 30)]
        fps: u32,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Cross-check helpers.
    Oracle {
        #[command(subcommand)]
        command: OracleCommand,
    },
    /// Replay a scenario file through a headless session.
    Simulate {
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Compare the recommender with an exhaustive sort.
    Recommend {
        path: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        valence: f64,
        #[arg(long, allow_negative_numbers = true)]
        arousal: f64,
    },
}

/// Failure classes, mapped to exit statuses 1 and 2.
#[derive(Debug)]
enum Failure {
    Domain(Vec<String>),
    Io(String),
}

impl Failure {
    fn domain(line: impl Into<String>) -> Self {
        Failure::Domain(vec![line.into()])
    }
}

type Outcome = Result<(), Failure>;

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, bytes: &[u8]) -> Outcome {
    fs::write(path, bytes).map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))
}

fn corpus_failure(path: &Path, e: CorpusError) -> Failure {
    match e {
        CorpusError::InvalidCommand(diags) => {
            let mut lines = vec![format!("{}: {} problem(s)", path.display(), diags.len())];
            lines.extend(diags.iter().map(|d| d.to_string()));
            Failure::Domain(lines)
        }
        other => Failure::domain(format!("{}: {other}", path.display())),
    }
}

fn open_corpus(path: &Path) -> Result<CommandCorpus, Failure> {
    load_corpus(&read(path)?).map_err(|e| corpus_failure(path, e))
}

fn check_rate(name: &str, rate: u32) -> Outcome {
    if (MIN_TICK_RATE..=MAX_TICK_RATE).contains(&rate) {
        Ok(())
    } else {
        Err(Failure::domain(format!(
            "INVALID_TICK_RATE: {name} {rate} outside [{MIN_TICK_RATE}, {MAX_TICK_RATE}]"
        )))
    }
}

fn validate(path: &Path) -> Outcome {
    let corpus = open_corpus(path)?;
    println!("OK: {} commands", corpus.len());
    Ok(())
}

fn render(path: &Path, key: &str, fps: u32, out: &Path, seed: u64) -> Outcome {
    check_rate("fps", fps)?;
    let corpus = open_corpus(path)?;
    let frames = offline::render(&corpus, key, fps, seed).map_err(|e| Failure::domain(e.to_string()))?;
    write(out, &offline::to_ndjson(&frames))?;
    info!("rendered {key:?}: {} frames at {fps} fps", frames.len());
    println!("wrote {} frames to {}", frames.len(), out.display());
    Ok(())
}

fn print_ranking(label: &str, r: &Recommendation) {
    println!("{label}:");
    for (i, (key, d)) in r.keys.iter().zip(&r.distances).enumerate() {
        println!("  {}. {key} d={d:.6}", i + 1);
    }
}

fn oracle_recommend(path: &Path, valence: f64, arousal: f64) -> Outcome {
    let corpus = open_corpus(path)?;
    let cfg = RecommendConfig::default();
    let fast = recommend(&corpus, valence, arousal, &cfg).map_err(|e| Failure::domain(e.to_string()))?;
    let slow = oracle::brute_force(&corpus, valence, arousal, &cfg).map_err(|e| Failure::domain(e.to_string()))?;
    println!("query: V={valence} A={arousal} polarity={:?}", fast.polarity);
    if fast.fallback_used {
        println!("fallback: no command of matching polarity, searched the whole corpus");
    }
    print_ranking("recommend", &fast);
    print_ranking("oracle", &slow);
    if fast == slow {
        println!("MATCH");
        Ok(())
    } else {
        println!("MISMATCH");
        Err(Failure::domain("recommendation differs from the exhaustive oracle"))
    }
}

fn summary_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".summary.json");
    PathBuf::from(name)
}

fn simulate(scenario_path: &Path, out: &Path) -> Outcome {
    let text = String::from_utf8(read(scenario_path)?)
        .map_err(|_| Failure::domain(format!("{}: MALFORMED_SCENARIO: not UTF-8", scenario_path.display())))?;
    let scenario = Scenario::parse(&text).map_err(|e| Failure::domain(format!("{}: {e}", scenario_path.display())))?;
    check_rate("tick_rate", scenario.config.tick_rate)?;
    let corpus = match &scenario.config.corpus {
        Some(rel) => {
            let base = scenario_path.parent().unwrap_or(Path::new("."));
            open_corpus(&base.join(rel))?
        }
        None => CommandCorpus::default(),
    };
    let sim = offline::simulate(&scenario, corpus).map_err(|e: ScenarioError| Failure::domain(e.to_string()))?;
    write(out, &offline::to_ndjson(&sim.frames))?;
    let summary = canonical::to_pretty_bytes(&sim.summary).expect("summary serializes");
    write(&summary_path(out), &summary)?;
    std::io::stdout().write_all(&summary).ok();
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Serve {
            port,
            corpus,
            tick_rate,
            seed,
        } => {
            check_rate("tick-rate", tick_rate)?;
            let corpus = open_corpus(&corpus).map_err(|f| match f {
                // serve reports every corpus problem as a domain failure
                Failure::Io(m) => Failure::domain(m),
                other => other,
            })?;
            serve::run(port, corpus, tick_rate, seed).map_err(Failure::domain)
        }
        Command::Validate { path } => validate(&path),
        Command::Render {
            path,
            key,
            fps,
            out,
            seed,
        } => render(&path, &key, fps, &out, seed),
        Command::Oracle {
            command: OracleCommand::Recommend { path, valence, arousal },
        } => oracle_recommend(&path, valence, arousal),
        Command::Simulate { scenario, out } => simulate(&scenario, &out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let default_level = match cli.command {
        Command::Serve { .. } => "info",
        _ => "error",
    };
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("PUPPETWIRE_LOG", default_level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain(lines)) => {
            for l in lines {
                eprintln!("{l}");
            }
            ExitCode::from(1)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(2)
        }
    }
}
