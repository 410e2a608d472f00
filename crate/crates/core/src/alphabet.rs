//! Event-type interning.
//!
//! Symbols are sorted byte-wise before ids are handed out, so the numeric
//! order of [`EventType`] ids is the lexicographic order on symbols. Canonical
//! episodes rely on this: sorting ids sorts symbols.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::error::{Error, Result};

/// Dense id of an interned symbol. Ordering follows the symbol byte order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EventType(u32);

impl EventType {
    pub const fn new(id: u32) -> Self {
        EventType(id)
    }

    pub const fn id(self) -> u32 {
        self.0
    }

    pub const fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for EventType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// A fixed, ordered set of event-type symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<String>,
    index: HashMap<String, EventType>,
}

/// Symbols may not be empty, contain whitespace, or contain the episode
/// grammar's delimiters.
pub fn is_valid_symbol(s: &str) -> bool {
    !s.is_empty() && !s.chars().any(|c| c.is_whitespace() || c == '<' || c == '|')
}

impl Alphabet {
    pub fn new<I, S>(symbols: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut set = BTreeSet::new();
        for s in symbols {
            let s = s.as_ref();
            if !is_valid_symbol(s) {
                return Err(Error::InvalidSymbol(s.to_string()));
            }
            set.insert(s.to_string());
        }
        let symbols: Vec<String> = set.into_iter().collect();
        let index = symbols
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), EventType(i as u32)))
            .collect();
        Ok(Alphabet { symbols, index })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbol(&self, e: EventType) -> &str {
        &self.symbols[e.index()]
    }

    pub fn get(&self, symbol: &str) -> Option<EventType> {
        self.index.get(symbol).copied()
    }

    pub fn lookup(&self, symbol: &str) -> Result<EventType> {
        self.get(symbol)
            .ok_or_else(|| Error::UnknownSymbol(symbol.to_string()))
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn event_types(&self) -> impl Iterator<Item = EventType> + '_ {
        (0..self.symbols.len() as u32).map(EventType)
    }
}
