//! Discovery of frequent injective episodes with general partial orders in a
//! single long event stream.
//!
//! The crate is organised around a levelwise miner:
//!
//! * [`episode`] holds the canonical `(events, closed order)` representation
//!   together with the poset utilities (closure, reduction, path metrics).
//! * [`automaton`] is the lazily materialised automaton that tracks one
//!   occurrence of an episode.
//! * [`counter`] counts non-overlapped occurrences of a whole candidate set in
//!   one pass, honouring an expiry time.
//! * [`candidates`] joins frequent `l`-node episodes into `(l+1)`-node
//!   candidates, block by block.
//! * [`evidence`] scores unordered pairs by how evenly they occur in both
//!   orders.
//! * [`miner`] drives the levels; [`synth`] produces embedded-pattern test data;
//!   [`oracle`] is a brute-force reference used for verification.

pub mod alphabet;
pub mod automaton;
pub mod candidates;
pub mod counter;
pub mod episode;
pub mod error;
pub mod evidence;
pub mod miner;
pub mod oracle;
pub mod stream;
pub mod synth;
pub mod text;

pub use alphabet::{Alphabet, EventType};
pub use candidates::{CandidateBook, GenerationMode, ModeKind};
pub use counter::{count_frequencies, CountResult, CountStats, Expiry, FrequencyCounter};
pub use episode::{Episode, Relation, StructuralMetrics, Violation};
pub use error::{Error, Result};
pub use evidence::{bidirectional_evidence, pair_evidence, EvidenceReport};
pub use miner::{mine, EvidenceMode, LevelReport, MiningConfig};
pub use stream::{EventSequence, Tick};
