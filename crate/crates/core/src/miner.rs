//! The levelwise mining loop and its text report.

use std::fmt;
use std::io::{self, Write};

use crate::alphabet::Alphabet;
use crate::candidates::{CandidateBook, GenerationMode};
use crate::counter::{count_partitioned, CountStats, Expiry};
use crate::episode::{Episode, MAX_NODES};
use crate::error::{Error, Result};
use crate::evidence::episode_evidence;
use crate::stream::EventSequence;

/// Where the bidirectional-evidence threshold applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EvidenceMode {
    /// Evidence is computed and reported but never filters.
    #[default]
    Off,
    /// Filters only what is reported; every frequent episode still feeds
    /// the next level.
    Postfilter,
    /// Episodes below the threshold are dropped before the next level.
    Levelwise,
}

impl std::str::FromStr for EvidenceMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "off" => Ok(EvidenceMode::Off),
            "postfilter" => Ok(EvidenceMode::Postfilter),
            "levelwise" => Ok(EvidenceMode::Levelwise),
            _ => Err(Error::InvalidConfig(format!("unknown evidence mode `{s}`"))),
        }
    }
}

impl fmt::Display for EvidenceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EvidenceMode::Off => "off",
            EvidenceMode::Postfilter => "postfilter",
            EvidenceMode::Levelwise => "levelwise",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MiningConfig {
    /// An episode is frequent when its count is strictly above this.
    pub f_th: u64,
    pub h_th: Option<f64>,
    pub h_mode: EvidenceMode,
    pub expiry: Expiry,
    pub mode: GenerationMode,
    /// Largest episode size to mine.
    pub max_level: usize,
    /// Counting threads; candidates are split between them.
    pub workers: usize,
}

impl Default for MiningConfig {
    fn default() -> Self {
        MiningConfig {
            f_th: 0,
            h_th: None,
            h_mode: EvidenceMode::Off,
            expiry: Expiry::Unlimited,
            mode: GenerationMode::general(),
            max_level: MAX_NODES,
            workers: 1,
        }
    }
}

impl MiningConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_level == 0 || self.max_level > MAX_NODES {
            return Err(Error::InvalidConfig(format!(
                "max level must be in 1..={MAX_NODES}"
            )));
        }
        match (self.h_mode, self.h_th) {
            (EvidenceMode::Off, _) => {}
            (_, None) => {
                return Err(Error::InvalidConfig(
                    "evidence mode requires a threshold".into(),
                ))
            }
            (_, Some(h)) if !(0.0..=1.0).contains(&h) => {
                return Err(Error::InvalidConfig(format!(
                    "evidence threshold {h} outside [0, 1]"
                )))
            }
            _ => {}
        }
        Ok(())
    }

    fn passes_h(&self, h: f64) -> bool {
        self.h_th.is_none_or(|t| h >= t)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Survivor {
    pub episode: Episode,
    pub freq: u64,
    pub h: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelReport {
    pub level: usize,
    pub candidates: usize,
    /// Episodes with frequency above the threshold, before any evidence
    /// filtering.
    pub above_threshold: usize,
    /// Reported episodes: frequent, and passing the evidence threshold
    /// unless evidence filtering is off.
    pub survivors: Vec<Survivor>,
}

impl LevelReport {
    pub fn frequent(&self) -> usize {
        self.survivors.len()
    }
}

/// Runs the levelwise miner; see [`mine_with_stats`].
pub fn mine(stream: &EventSequence, config: &MiningConfig) -> Result<Vec<LevelReport>> {
    Ok(mine_with_stats(stream, config)?.0)
}

/// Runs the levelwise miner and also returns the merged counter statistics
/// of every level.
pub fn mine_with_stats(
    stream: &EventSequence,
    config: &MiningConfig,
) -> Result<(Vec<LevelReport>, CountStats)> {
    config.validate()?;
    let mut stats = CountStats::default();
    let mut reports = Vec::new();
    let mut book = CandidateBook::singletons(&stream.observed_types());
    let mut level = 1;
    while !book.is_empty() {
        let (results, s) =
            count_partitioned(book.episodes(), stream, config.expiry, config.workers)?;
        stats.max_live = stats.max_live.max(s.max_live);
        stats.invariant_violations += s.invariant_violations;
        stats.batches = stats.batches.max(s.batches);

        let mut next_input = vec![false; book.len()];
        let mut survivors = Vec::new();
        let mut above = 0;
        let mut hs = Vec::with_capacity(book.len());
        for (i, (e, r)) in book.episodes().iter().zip(&results).enumerate() {
            let h = episode_evidence(e, r);
            hs.push(h);
            if r.freq <= config.f_th {
                continue;
            }
            above += 1;
            let pass_h = config.passes_h(h);
            next_input[i] = match config.h_mode {
                EvidenceMode::Levelwise => pass_h,
                _ => true,
            };
            if config.h_mode == EvidenceMode::Off || pass_h {
                survivors.push(Survivor {
                    episode: e.clone(),
                    freq: r.freq,
                    h,
                });
            }
        }
        book.freq = results.iter().map(|r| r.freq).collect();
        book.h = hs;
        reports.push(LevelReport {
            level,
            candidates: book.len(),
            above_threshold: above,
            survivors,
        });
        if level >= config.max_level {
            break;
        }
        book = book.retain(&next_input).generate(&config.mode)?;
        level += 1;
    }
    Ok((reports, stats))
}

/// Writes the per-level report: a header line per level followed by one
/// `episode<TAB>freq<TAB>H` line per reported episode.
pub fn write_report<W: Write>(
    reports: &[LevelReport],
    alphabet: &Alphabet,
    mut out: W,
) -> io::Result<()> {
    for r in reports {
        writeln!(
            out,
            "# level={} candidates={} frequent={}",
            r.level,
            r.candidates,
            r.frequent()
        )?;
        for s in &r.survivors {
            writeln!(
                out,
                "{}\t{}\t{:.6}",
                s.episode.display(alphabet),
                s.freq,
                s.h
            )?;
        }
    }
    Ok(())
}
