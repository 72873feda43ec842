//! Raw row schemas for the five input file families and header validation.
//!
//! Column names follow the Big Data Bowl 2023 release. Deserialization is
//! per-row so a malformed row never aborts a file; callers collect
//! [`RowIssue`]s and enforce the error budget.

use serde::Deserialize;

use super::IngestError;

/// One problematic input row, reported with its provenance.
#[derive(Debug, Clone)]
pub struct RowIssue {
    pub file: String,
    pub line: u64,
    pub message: String,
}

impl std::fmt::Display for RowIssue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}: {}", self.file, self.line, self.message)
    }
}

/// Tracking week file row. The team column is `team` in the 2023 release;
/// `club` (2024 naming) is accepted as an alias.
#[derive(Debug, Deserialize)]
pub struct RawTrackingRow {
    #[serde(rename = "gameId")]
    pub game_id: u64,
    #[serde(rename = "playId")]
    pub play_id: u32,
    #[serde(rename = "nflId")]
    pub nfl_id: Option<u32>,
    #[serde(rename = "frameId")]
    pub frame_id: u32,
    #[serde(rename = "team", alias = "club")]
    pub team: String,
    #[serde(rename = "playDirection")]
    pub play_direction: String,
    pub x: f64,
    pub y: f64,
    pub s: f64,
    pub a: f64,
    pub dis: f64,
    pub o: Option<f64>,
    pub dir: Option<f64>,
    pub event: Option<String>,
}

#[derive(Debug, Deserialize)]
pub struct RawPlayRow {
    #[serde(rename = "gameId")]
    pub game_id: u64,
    #[serde(rename = "playId")]
    pub play_id: u32,
    pub down: Option<u8>,
    #[serde(rename = "yardsToGo")]
    pub yards_to_go: Option<f64>,
    #[serde(rename = "possessionTeam")]
    pub possession_team: String,
    #[serde(rename = "defensiveTeam")]
    pub defensive_team: String,
    #[serde(rename = "yardlineSide")]
    pub yardline_side: Option<String>,
    #[serde(rename = "yardlineNumber")]
    pub yardline_number: Option<f64>,
}

#[derive(Debug, Deserialize)]
pub struct RawScoutingRow {
    #[serde(rename = "gameId")]
    pub game_id: u64,
    #[serde(rename = "playId")]
    pub play_id: u32,
    #[serde(rename = "nflId")]
    pub nfl_id: u32,
    #[serde(rename = "pff_role")]
    pub role: String,
    #[serde(rename = "pff_positionLinedUp")]
    pub position_lined_up: Option<String>,
    #[serde(rename = "pff_hit")]
    pub hit: Option<f64>,
    #[serde(rename = "pff_hurry")]
    pub hurry: Option<f64>,
    #[serde(rename = "pff_sack")]
    pub sack: Option<f64>,
    #[serde(rename = "pff_nflIdBlockedPlayer")]
    pub blocked_player: Option<u32>,
}

#[derive(Debug, Deserialize)]
pub struct RawPlayerRow {
    #[serde(rename = "nflId")]
    pub nfl_id: u32,
    #[serde(rename = "officialPosition")]
    pub official_position: String,
    #[serde(rename = "displayName")]
    pub display_name: String,
}

#[derive(Debug, Deserialize)]
pub struct RawGameRow {
    #[serde(rename = "gameId")]
    pub game_id: u64,
    pub week: u8,
    #[serde(rename = "homeTeamAbbr")]
    pub home_team: String,
    #[serde(rename = "visitorTeamAbbr")]
    pub visitor_team: String,
}

pub const TRACKING_REQUIRED: &[&str] = &[
    "gameId", "playId", "nflId", "frameId", "playDirection", "x", "y", "s", "a", "dis", "o",
    "dir", "event",
];
pub const PLAYS_REQUIRED: &[&str] = &[
    "gameId",
    "playId",
    "down",
    "yardsToGo",
    "possessionTeam",
    "defensiveTeam",
    "yardlineSide",
    "yardlineNumber",
];
pub const SCOUTING_REQUIRED: &[&str] = &[
    "gameId",
    "playId",
    "nflId",
    "pff_role",
    "pff_positionLinedUp",
    "pff_hit",
    "pff_hurry",
    "pff_sack",
    "pff_nflIdBlockedPlayer",
];
pub const PLAYERS_REQUIRED: &[&str] = &["nflId", "officialPosition", "displayName"];
pub const GAMES_REQUIRED: &[&str] = &["gameId", "week", "homeTeamAbbr", "visitorTeamAbbr"];

/// Checks that every required column is present, naming the missing ones.
///
/// The tracking team column is special-cased: either `team` or `club`
/// satisfies it.
pub fn check_headers(
    file: &str,
    headers: &csv::StringRecord,
    required: &[&str],
    team_column: bool,
) -> Result<(), IngestError> {
    let present: Vec<&str> = headers.iter().collect();
    let mut missing: Vec<String> = required
        .iter()
        .filter(|c| !present.contains(*c))
        .map(|c| c.to_string())
        .collect();
    if team_column && !present.contains(&"team") && !present.contains(&"club") {
        missing.push("team".to_string());
    }
    if missing.is_empty() {
        Ok(())
    } else {
        Err(IngestError::Schema {
            file: file.to_string(),
            missing,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_check_names_missing_columns() {
        let headers = csv::StringRecord::from(vec!["gameId", "playId"]);
        let err = check_headers("plays.csv", &headers, PLAYS_REQUIRED, false).unwrap_err();
        match err {
            IngestError::Schema { file, missing } => {
                assert_eq!(file, "plays.csv");
                assert!(missing.contains(&"down".to_string()));
                assert!(missing.contains(&"yardsToGo".to_string()));
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn header_check_accepts_club_alias() {
        let mut cols: Vec<&str> = TRACKING_REQUIRED.to_vec();
        cols.push("club");
        let headers = csv::StringRecord::from(cols);
        assert!(check_headers("week1.csv", &headers, TRACKING_REQUIRED, true).is_ok());
    }
}
