//! Pass-rush evaluation from NFL player-tracking data.
//!
//! The pipeline turns raw Big Data Bowl 2023 files (tracking weeks, plays,
//! scouting, players, games) into:
//!
//! 1. validated snap-to-throw play windows ([`ingest`]),
//! 2. per-frame STRAIN values, per-play averages, player aggregates, and
//!    positional/outcome curves ([`strain`]),
//! 3. model-ready observations with nearest-blocker matchups ([`covariates`]),
//! 4. a REML fit of a linear mixed model with four crossed random-intercept
//!    groupings — rusher, blocker, defense, offense ([`model`]),
//! 5. drive-resampling bootstrap distributions for the random effects
//!    ([`bootstrap`]),
//! 6. leaderboards, pressure-rate correlations, and report tables
//!    ([`report`]).
//!
//! [`synth`] generates synthetic plays and model data with known ground truth
//! for validation; the CLI exposes it as a `selfcheck` subcommand.

pub mod bootstrap;
pub mod covariates;
pub mod ingest;
pub mod model;
pub mod output;
pub mod report;
pub mod strain;
pub mod synth;

/// NGS game identifier (e.g. `2021101710`).
pub type GameId = u64;
/// Play identifier, unique within a game.
pub type PlayId = u32;
/// NFL player identifier (`nflId`).
pub type PlayerId = u32;

/// Composite key identifying one play across the corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
pub struct PlayKey {
    pub game_id: GameId,
    pub play_id: PlayId,
}

impl PlayKey {
    pub fn new(game_id: GameId, play_id: PlayId) -> Self {
        Self { game_id, play_id }
    }
}

impl std::fmt::Display for PlayKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.game_id, self.play_id)
    }
}
