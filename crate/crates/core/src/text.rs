//! Line-oriented episode text format.
//!
//! ```text
//! A B C | B<A B<C
//! ```
//!
//! Event types come first, then `|`, then zero or more `X<Y` edges. Parsing
//! closes the edge set; formatting emits only the edges of the transitive
//! reduction, sorted by node position.

use std::fmt;
use std::path::Path;

use crate::alphabet::Alphabet;
use crate::episode::{Episode, Relation};
use crate::error::{Error, Result};

/// An episode line split into tokens but not yet resolved against an
/// alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawEpisode<'a> {
    pub symbols: Vec<&'a str>,
    pub edges: Vec<(&'a str, &'a str)>,
}

fn syntax(line: usize, msg: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        msg: msg.into(),
    }
}

pub fn tokenize_episode(text: &str, line: usize) -> Result<RawEpisode<'_>> {
    let (nodes, edges) = text
        .split_once('|')
        .ok_or_else(|| syntax(line, "missing `|` separator"))?;
    let symbols: Vec<&str> = nodes.split_whitespace().collect();
    if symbols.is_empty() {
        return Err(syntax(line, "episode has no event types"));
    }
    if edges.contains('|') {
        return Err(syntax(line, "more than one `|` separator"));
    }
    let edges = edges
        .split_whitespace()
        .map(|tok| match tok.split_once('<') {
            Some((a, b)) if !a.is_empty() && !b.is_empty() && !b.contains('<') => Ok((a, b)),
            _ => Err(syntax(line, format!("malformed edge `{tok}`"))),
        })
        .collect::<Result<_>>()?;
    Ok(RawEpisode { symbols, edges })
}

impl RawEpisode<'_> {
    pub fn resolve(&self, alphabet: &Alphabet) -> Result<Episode> {
        let events = self
            .symbols
            .iter()
            .map(|s| alphabet.lookup(s))
            .collect::<Result<Vec<_>>>()?;
        let node = |s: &str| -> Result<usize> {
            self.symbols
                .iter()
                .position(|&x| x == s)
                .ok_or_else(|| Error::UnknownSymbol(s.to_string()))
        };
        let mut r = Relation::new(events.len());
        for &(a, b) in &self.edges {
            r.set(node(a)?, node(b)?);
        }
        match Episode::with_closure(&events, &r) {
            Err(Error::DuplicateEventType(_)) => {
                let mut seen = std::collections::HashSet::new();
                let dup = self.symbols.iter().find(|s| !seen.insert(**s)).unwrap();
                Err(Error::DuplicateEventType(dup.to_string()))
            }
            other => other,
        }
    }
}

pub fn parse_episode(text: &str, alphabet: &Alphabet) -> Result<Episode> {
    tokenize_episode(text, 1)?.resolve(alphabet)
}

pub fn format_episode(episode: &Episode, alphabet: &Alphabet) -> String {
    episode.display(alphabet).to_string()
}

pub(crate) struct EpisodeDisplay<'a> {
    pub episode: &'a Episode,
    pub alphabet: &'a Alphabet,
}

impl fmt::Display for EpisodeDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sym = |i: usize| self.alphabet.symbol(self.episode.event(i));
        for i in 0..self.episode.size() {
            write!(f, "{} ", sym(i))?;
        }
        write!(f, "|")?;
        for (i, j) in self.episode.transitive_reduction().edges() {
            write!(f, " {}<{}", sym(i), sym(j))?;
        }
        Ok(())
    }
}

/// Non-empty, non-comment lines of an episode file with their 1-based line
/// numbers.
pub fn episode_lines(content: &str) -> impl Iterator<Item = (usize, &str)> {
    content
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// All symbols mentioned by an episode file, for building an alphabet.
pub fn episode_file_symbols(content: &str) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for (line, text) in episode_lines(content) {
        let raw = tokenize_episode(text, line)?;
        out.extend(raw.symbols.iter().map(|s| s.to_string()));
    }
    Ok(out)
}

pub fn parse_episode_file(content: &str, alphabet: &Alphabet) -> Result<Vec<Episode>> {
    episode_lines(content)
        .map(|(line, text)| tokenize_episode(text, line)?.resolve(alphabet))
        .collect()
}

pub fn read_episode_file(path: &Path, alphabet: &Alphabet) -> Result<Vec<Episode>> {
    parse_episode_file(&std::fs::read_to_string(path)?, alphabet)
}
