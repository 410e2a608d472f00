use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use posetmine::candidates::{GenerationMode, ModeKind};
use posetmine::evidence::episode_evidence;
use posetmine::miner::write_report;
use posetmine::oracle::max_nonoverlapped;
use posetmine::stream::RawStream;
use posetmine::synth::{extend_alphabet, generate_stream, GenConfig};
use posetmine::text::{episode_file_symbols, parse_episode_file};
use posetmine::{
    count_frequencies, mine, Alphabet, CountResult, Episode, EventSequence, EvidenceMode, Expiry,
    MiningConfig,
};

/// Mine frequent partial-order episodes from event streams.
#[derive(Parser, Debug)]
#[command(name = "posetmine", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a synthetic stream with embedded patterns.
    Generate(GenerateArgs),
    /// Mine frequent episodes level by level.
    Mine(MineArgs),
    /// Count the episodes of a file with the automaton counter.
    Count(CountArgs),
    /// Count the episodes of a file by brute force.
    Oracle(CountArgs),
    /// Print the longest-path length and path count of each episode.
    Metrics(MetricsArgs),
}

#[derive(Args, Debug)]
struct GenerateArgs {
    /// Episode file with the patterns to embed.
    #[arg(long)]
    patterns: PathBuf,
    #[arg(long)]
    eta: f64,
    #[arg(long)]
    p: f64,
    #[arg(long)]
    rho: f64,
    /// Alphabet size; filler symbols are added to reach it.
    #[arg(long)]
    alphabet: usize,
    #[arg(long)]
    ticks: u64,
    #[arg(long)]
    seed: u64,
    /// Stream output; the manifest goes next to it with a `.manifest` suffix.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct MineArgs {
    #[arg(long)]
    data: PathBuf,
    /// Frequency threshold; an episode must be counted more often than this.
    #[arg(long)]
    fth: u64,
    /// Bidirectional-evidence threshold in [0, 1].
    #[arg(long)]
    hth: Option<f64>,
    /// Defaults to `levelwise` when --hth is given and `off` otherwise.
    #[arg(long, value_parser = ["levelwise", "postfilter", "off"])]
    hmode: Option<String>,
    /// Largest allowed occurrence span in ticks; unlimited if omitted.
    #[arg(long)]
    expiry: Option<u64>,
    #[arg(long, default_value = "general", value_parser = ["general", "serial", "parallel"])]
    mode: String,
    #[arg(long)]
    lmax: Option<usize>,
    #[arg(long)]
    nmax: Option<u64>,
    #[arg(long, default_value_t = 64)]
    max_level: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct CountArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    episodes: PathBuf,
    #[arg(long)]
    expiry: Option<u64>,
}

#[derive(Args, Debug)]
struct MetricsArgs {
    #[arg(long)]
    episodes: PathBuf,
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
    let result = match cli.command {
        Command::Generate(a) => generate(a),
        Command::Mine(a) => run_mine(a),
        Command::Count(a) => count(a, false),
        Command::Oracle(a) => count(a, true),
        Command::Metrics(a) => metrics(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 2 } else { 1 })
        }
    }
}

fn create(path: &Path) -> posetmine::Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn generate(a: GenerateArgs) -> posetmine::Result<()> {
    let text = std::fs::read_to_string(&a.patterns)?;
    let alphabet = extend_alphabet(&episode_file_symbols(&text)?, a.alphabet)?;
    let cfg = GenConfig {
        patterns: parse_episode_file(&text, &alphabet)?,
        alphabet,
        eta: a.eta,
        p: a.p,
        rho: a.rho,
        horizon: a.ticks,
        seed: a.seed,
    };
    let stream = generate_stream(&cfg)?;
    let mut out = create(&a.out)?;
    stream.write_to(&cfg.alphabet, &mut out)?;
    out.flush()?;
    let mut manifest = a.out.into_os_string();
    manifest.push(".manifest");
    let mut m = create(Path::new(&manifest))?;
    cfg.write_manifest(&mut m, stream.len())?;
    m.flush()?;
    Ok(())
}

/// Reads a stream; the alphabet is its symbols plus any `extra` ones.
fn load_stream(path: &Path, extra: &[String]) -> posetmine::Result<(Alphabet, EventSequence)> {
    let raw = RawStream::read(path)?;
    let alphabet = Alphabet::new(raw.symbols().chain(extra.iter().map(String::as_str)))?;
    let stream = raw.intern(&alphabet)?;
    Ok((alphabet, stream))
}

fn run_mine(a: MineArgs) -> posetmine::Result<()> {
    let h_mode = match (&a.hmode, a.hth) {
        (Some(m), _) => m.parse()?,
        (None, Some(_)) => EvidenceMode::Levelwise,
        (None, None) => EvidenceMode::Off,
    };
    let kind: ModeKind = a.mode.parse()?;
    let cfg = MiningConfig {
        f_th: a.fth,
        h_th: a.hth,
        h_mode,
        expiry: Expiry::from(a.expiry),
        mode: GenerationMode {
            kind,
            lmax_bound: a.lmax,
            nmax_bound: a.nmax,
        },
        max_level: a.max_level,
        workers: 1,
    };
    cfg.validate()?;
    let (alphabet, stream) = load_stream(&a.data, &[])?;
    let reports = mine(&stream, &cfg)?;
    let mut out = create(&a.out)?;
    write_report(&reports, &alphabet, &mut out)?;
    out.flush()?;
    Ok(())
}

fn load_episodes(
    path: &Path,
    data: &Path,
) -> posetmine::Result<(Alphabet, EventSequence, Vec<Episode>)> {
    let text = std::fs::read_to_string(path)?;
    let (alphabet, stream) = load_stream(data, &episode_file_symbols(&text)?)?;
    let episodes = parse_episode_file(&text, &alphabet)?;
    Ok((alphabet, stream, episodes))
}

fn count(a: CountArgs, brute_force: bool) -> posetmine::Result<()> {
    let (alphabet, stream, episodes) = load_episodes(&a.episodes, &a.data)?;
    let expiry = Expiry::from(a.expiry);
    let mut out = io::stdout().lock();
    if brute_force {
        for e in &episodes {
            writeln!(
                out,
                "{}\t{}",
                e.display(&alphabet),
                max_nonoverlapped(e, &stream, expiry)
            )?;
        }
        return Ok(());
    }
    // The counter takes one size at a time; keep the file's order.
    let mut results: Vec<Option<CountResult>> = vec![None; episodes.len()];
    let mut sizes: Vec<usize> = episodes.iter().map(Episode::size).collect();
    sizes.sort_unstable();
    sizes.dedup();
    for size in sizes {
        let idx: Vec<usize> = (0..episodes.len())
            .filter(|&i| episodes[i].size() == size)
            .collect();
        let group: Vec<Episode> = idx.iter().map(|&i| episodes[i].clone()).collect();
        for (i, r) in idx
            .into_iter()
            .zip(count_frequencies(&group, &stream, expiry)?)
        {
            results[i] = Some(r);
        }
    }
    for (e, r) in episodes.iter().zip(results.into_iter().flatten()) {
        writeln!(
            out,
            "{}\t{}\t{:.6}",
            e.display(&alphabet),
            r.freq,
            episode_evidence(e, &r)
        )?;
    }
    Ok(())
}

fn metrics(a: MetricsArgs) -> posetmine::Result<()> {
    let text = std::fs::read_to_string(&a.episodes)?;
    let alphabet = Alphabet::new(episode_file_symbols(&text)?)?;
    let mut out = io::stdout().lock();
    for e in parse_episode_file(&text, &alphabet)? {
        let m = e.structural_metrics();
        writeln!(out, "{}\t{}\t{}", e.display(&alphabet), m.lmax, m.nmax)?;
    }
    Ok(())
}
