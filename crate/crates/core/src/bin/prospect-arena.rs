use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use prospect_arena::engine::Matchup;
use prospect_arena::equilibria::{
    cluster_candidates, nash_2x2, pt_best_response_scan, pt_eb_candidates, DEFAULT_GRID,
};
use prospect_arena::grid::{run_grid, GridSpec, Manifest};
use prospect_arena::output::LogScope;
use prospect_arena::{games, CptParams, ExperimentConfig, GameId, ReferenceKind, Side};

#[derive(Parser)]
#[command(name = "prospect-arena", version, about = "Expected-utility and prospect-theoretic learners in repeated 2x2 games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment cell.
    Run(RunArgs),
    /// Run a grid of games, matchups, reference models and histories.
    Grid(GridArgs),
    /// Query the equilibrium oracles for one game.
    Oracle(OracleArgs),
    /// Print the game suite as JSON.
    Suite,
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = 30)]
    runs: usize,
    #[arg(long, default_value_t = 500)]
    episodes: usize,
    #[arg(long, default_value_t = 100)]
    steps_per_episode: usize,
    /// Base seed; run i uses seed + i.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Trailing steps used for converged policies.
    #[arg(long, default_value_t = 5000)]
    window: usize,
    #[arg(long)]
    out_dir: PathBuf,
    /// Keep every step in the logs (`full`) or only each run's window.
    #[arg(long)]
    log_scope: Option<LogScope>,
}

impl Common {
    fn base(&self) -> ExperimentConfig {
        ExperimentConfig {
            runs: self.runs,
            episodes: self.episodes,
            steps_per_episode: self.steps_per_episode,
            base_seed: self.seed,
            window: self.window,
            ..Default::default()
        }
    }
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    game: GameId,
    #[arg(long, default_value = "AI-AI")]
    matchup: Matchup,
    #[arg(long, default_value = "ema")]
    ref_model: ReferenceKind,
    #[arg(long, default_value_t = 0)]
    state_history: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct GridArgs {
    /// Games to include; all seven when omitted.
    #[arg(long, value_delimiter = ',')]
    game: Vec<GameId>,
    /// Matchups to include; the six standard pairings when omitted.
    #[arg(long, value_delimiter = ',')]
    matchup: Vec<Matchup>,
    /// Reference models; the three adaptive ones when omitted.
    #[arg(long, value_delimiter = ',')]
    ref_model: Vec<ReferenceKind>,
    /// History lengths; 0 and 2 when omitted.
    #[arg(long, value_delimiter = ',')]
    state_history: Vec<usize>,
    /// Do not add side-swapped matchups on asymmetric games.
    #[arg(long)]
    no_mirror: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    game: GameId,
    #[arg(long, default_value_t = DEFAULT_GRID)]
    grid: usize,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    row_reference: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    col_reference: f64,
    /// Value lotteries by expectation instead of prospect theory.
    #[arg(long)]
    expected_utility: bool,
}

fn report(manifest: &Manifest) -> ExitCode {
    for cell in &manifest.cells {
        let note = cell.error.as_deref().unwrap_or("ok");
        println!("{:<40} {note}", cell.id);
    }
    let failed = manifest.failed().count();
    if failed > 0 {
        eprintln!("{failed} of {} cells failed", manifest.cells.len());
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}

fn run(args: RunArgs) -> prospect_arena::Result<ExitCode> {
    let spec = GridSpec {
        games: vec![args.game],
        matchups: vec![args.matchup],
        references: vec![args.ref_model],
        histories: vec![args.state_history],
        mirror_asymmetric: false,
        base: args.common.base(),
        log_scope: args.common.log_scope.unwrap_or(LogScope::Full),
        out_dir: args.common.out_dir,
    };
    Ok(report(&run_grid(&spec)?))
}

fn or_default<T>(given: Vec<T>, default: Vec<T>) -> Vec<T> {
    if given.is_empty() {
        default
    } else {
        given
    }
}

fn grid(args: GridArgs) -> prospect_arena::Result<ExitCode> {
    let standard = GridSpec::standard(&args.common.out_dir);
    let spec = GridSpec {
        games: or_default(args.game, standard.games),
        matchups: or_default(args.matchup, standard.matchups),
        references: or_default(args.ref_model, standard.references),
        histories: or_default(args.state_history, standard.histories),
        mirror_asymmetric: !args.no_mirror,
        base: args.common.base(),
        log_scope: args.common.log_scope.unwrap_or(LogScope::Window),
        out_dir: args.common.out_dir,
    };
    Ok(report(&run_grid(&spec)?))
}

fn oracle(args: OracleArgs) -> prospect_arena::Result<ExitCode> {
    let game = args.game.game();
    let params = if args.expected_utility {
        CptParams::expected_utility()
    } else {
        CptParams::default()
    };
    let refs = (args.row_reference, args.col_reference);
    let candidates = pt_eb_candidates(&game, refs, &params, args.grid)?;
    let row = pt_best_response_scan(&game, Side::Row, refs.0, &params, args.grid)?;
    let col = pt_best_response_scan(&game, Side::Col, refs.1, &params, args.grid)?;
    let out = json!({
        "game": args.game,
        "nash": nash_2x2(&game)?,
        "documented": game.equilibria,
        "grid": args.grid,
        "references": [refs.0, refs.1],
        "params": params,
        "row_indifference_q": row.switch_points(),
        "col_indifference_p": col.switch_points(),
        "pt_eb_candidates": candidates,
        "pt_eb_clusters": cluster_candidates(&candidates, args.grid),
    });
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => run(a),
        Command::Grid(a) => grid(a),
        Command::Oracle(a) => oracle(a),
        Command::Suite => games::catalog_json().map(|s| {
            println!("{s}");
            ExitCode::SUCCESS
        }),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::from(2)
    })
}
