//! Typed play, scouting, player, and game tables.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::schema::{
    check_headers, RawGameRow, RawPlayRow, RawPlayerRow, RawScoutingRow, RowIssue, GAMES_REQUIRED,
    PLAYERS_REQUIRED, PLAYS_REQUIRED, SCOUTING_REQUIRED,
};
use super::IngestError;
use crate::{GameId, PlayKey, PlayerId};

/// Down state of a play. Two-point conversion attempts carry no ordinary
/// down number in the play file (blank or 0) and get their own variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Down {
    First,
    Second,
    Third,
    Fourth,
    TwoPoint,
}

impl Down {
    pub fn label(self) -> &'static str {
        match self {
            Down::First => "1",
            Down::Second => "2",
            Down::Third => "3",
            Down::Fourth => "4",
            Down::TwoPoint => "2pt",
        }
    }
}

/// Play-level context needed by the covariate builder and the bootstrap.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlayContext {
    pub game_id: GameId,
    pub play_id: crate::PlayId,
    pub possession_team: String,
    pub defense_team: String,
    pub down: Down,
    pub yards_to_go: f64,
    /// Distance from the possession team's own goal line, 1–99.
    pub yardline: f64,
    /// Synthesized drive identifier: consecutive plays by the same
    /// possession team within a game, ordered by play id.
    pub drive_key: String,
    pub week: u8,
}

/// Scouting role, normalized to the four-way split used downstream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Role {
    PassRush,
    PassBlock,
    /// The passer (quarterback) role.
    Pass,
    /// Coverage, routes, and anything else not relevant to the rush.
    Other,
}

/// One player's scouting record for one play.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlayerPlayRole {
    pub game_id: GameId,
    pub play_id: crate::PlayId,
    pub player_id: PlayerId,
    pub role: Role,
    /// Raw lined-up position code from the scouting file.
    pub position: String,
    pub credited_hit: bool,
    pub credited_hurry: bool,
    pub credited_sack: bool,
    /// Players this record's player blocked (populated on blocker rows).
    pub blocked_player_ids: Vec<PlayerId>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlayerMeta {
    pub player_id: PlayerId,
    pub name: String,
    pub official_position: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GameMeta {
    pub game_id: GameId,
    pub week: u8,
    pub home_team: String,
    pub visitor_team: String,
}

pub struct PlaysTable {
    pub contexts: BTreeMap<PlayKey, PlayContext>,
    /// Plays excluded for an unparseable field, with the reason.
    pub excluded: Vec<(PlayKey, String)>,
    pub issues: Vec<RowIssue>,
}

pub struct ScoutingTable {
    pub roles: BTreeMap<PlayKey, Vec<PlayerPlayRole>>,
    pub record_count: usize,
    pub rush_attempts: usize,
    pub excluded: Vec<RowIssue>,
}

fn open_reader(path: &Path) -> Result<csv::Reader<std::fs::File>, IngestError> {
    if !path.exists() {
        return Err(IngestError::MissingFile {
            path: path.display().to_string(),
        });
    }
    csv::ReaderBuilder::new()
        .flexible(false)
        .from_path(path)
        .map_err(|e| IngestError::Io {
            file: path.display().to_string(),
            message: e.to_string(),
        })
}

fn file_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

pub fn parse_games(path: &Path) -> Result<BTreeMap<GameId, GameMeta>, IngestError> {
    let mut reader = open_reader(path)?;
    let name = file_name(path);
    check_headers(&name, reader.headers().map_err(io_err(&name))?, GAMES_REQUIRED, false)?;
    let mut games = BTreeMap::new();
    for row in reader.deserialize::<RawGameRow>() {
        let row = row.map_err(io_err(&name))?;
        games.insert(
            row.game_id,
            GameMeta {
                game_id: row.game_id,
                week: row.week,
                home_team: row.home_team,
                visitor_team: row.visitor_team,
            },
        );
    }
    Ok(games)
}

pub fn parse_players(path: &Path) -> Result<BTreeMap<PlayerId, PlayerMeta>, IngestError> {
    let mut reader = open_reader(path)?;
    let name = file_name(path);
    check_headers(&name, reader.headers().map_err(io_err(&name))?, PLAYERS_REQUIRED, false)?;
    let mut players = BTreeMap::new();
    for row in reader.deserialize::<RawPlayerRow>() {
        let row = row.map_err(io_err(&name))?;
        players.insert(
            row.nfl_id,
            PlayerMeta {
                player_id: row.nfl_id,
                name: row.display_name,
                official_position: row.official_position,
            },
        );
    }
    Ok(players)
}

fn io_err(name: &str) -> impl Fn(csv::Error) -> IngestError + '_ {
    move |e| IngestError::Io {
        file: name.to_string(),
        message: e.to_string(),
    }
}

/// Parses the play file and synthesizes drive keys.
///
/// The input schema has no drive id, so a drive is a maximal run of
/// consecutive plays (by play id) with the same possession team within a
/// game. The yardline is converted from the side/number split convention to
/// distance from the possession team's own goal line.
pub fn parse_plays(
    path: &Path,
    games: &BTreeMap<GameId, GameMeta>,
) -> Result<PlaysTable, IngestError> {
    let mut reader = open_reader(path)?;
    let name = file_name(path);
    check_headers(&name, reader.headers().map_err(io_err(&name))?, PLAYS_REQUIRED, false)?;

    let mut rows: Vec<RawPlayRow> = Vec::new();
    let mut issues = Vec::new();
    for row in reader.deserialize::<RawPlayRow>() {
        let line = reader.position().line();
        match row {
            Ok(r) => rows.push(r),
            Err(e) => issues.push(RowIssue {
                file: name.clone(),
                line,
                message: e.to_string(),
            }),
        }
    }
    rows.sort_by_key(|r| (r.game_id, r.play_id));

    let mut contexts = BTreeMap::new();
    let mut excluded = Vec::new();
    let mut last_cell: Option<(GameId, String)> = None;
    let mut drive_index: u32 = 0;
    for row in rows {
        let key = PlayKey::new(row.game_id, row.play_id);
        let week = match games.get(&row.game_id) {
            Some(g) => g.week,
            None => {
                excluded.push((key, "game not present in games file".to_string()));
                continue;
            }
        };
        let down = match row.down {
            Some(1) => Down::First,
            Some(2) => Down::Second,
            Some(3) => Down::Third,
            Some(4) => Down::Fourth,
            // Two-point tries carry a blank or zero down in the play file.
            Some(0) | None => Down::TwoPoint,
            Some(other) => {
                excluded.push((key, format!("unknown down code {other}")));
                continue;
            }
        };
        let yards_to_go = match row.yards_to_go {
            Some(y) if down == Down::TwoPoint || y >= 1.0 => y,
            Some(y) => {
                excluded.push((key, format!("yards to go {y} below 1 on a regular down")));
                continue;
            }
            None => {
                excluded.push((key, "missing yards to go".to_string()));
                continue;
            }
        };
        let yardline = match yardline_from_own_goal(
            row.yardline_side.as_deref(),
            row.yardline_number,
            &row.possession_team,
        ) {
            Ok(y) => y,
            Err(msg) => {
                excluded.push((key, msg));
                continue;
            }
        };

        let cell = (row.game_id, row.possession_team.clone());
        match &last_cell {
            Some(prev) if *prev == cell => {}
            _ => {
                drive_index = match &last_cell {
                    Some((g, _)) if *g == row.game_id => drive_index + 1,
                    _ => 1,
                };
                last_cell = Some(cell);
            }
        }
        let drive_key = format!("{}-{}-d{:03}", row.game_id, row.possession_team, drive_index);

        contexts.insert(
            key,
            PlayContext {
                game_id: row.game_id,
                play_id: row.play_id,
                possession_team: row.possession_team,
                defense_team: row.defensive_team,
                down,
                yards_to_go,
                yardline,
                drive_key,
                week,
            },
        );
    }
    Ok(PlaysTable {
        contexts,
        excluded,
        issues,
    })
}

/// Converts the (side, number) yardline convention to distance from the
/// possession team's own goal line (1–99). Midfield has no side and maps
/// to 50.
fn yardline_from_own_goal(
    side: Option<&str>,
    number: Option<f64>,
    possession: &str,
) -> Result<f64, String> {
    let number = number.ok_or_else(|| "missing yardline number".to_string())?;
    if !(0.0..=50.0).contains(&number) {
        return Err(format!("yardline number {number} outside 0–50"));
    }
    let own_side = match side {
        None => {
            if (number - 50.0).abs() < f64::EPSILON {
                return Ok(50.0);
            }
            return Err(format!("yardline {number} has no side and is not midfield"));
        }
        Some(s) => s == possession,
    };
    let yardline = if own_side { number } else { 100.0 - number };
    if !(1.0..=99.0).contains(&yardline) {
        return Err(format!("converted yardline {yardline} outside 1–99"));
    }
    Ok(yardline)
}

/// Parses the scouting file, normalizing roles and collecting per-play
/// credit booleans and blocked-player assignments.
pub fn parse_scouting(path: &Path) -> Result<ScoutingTable, IngestError> {
    let mut reader = open_reader(path)?;
    let name = file_name(path);
    check_headers(&name, reader.headers().map_err(io_err(&name))?, SCOUTING_REQUIRED, false)?;

    let mut roles: BTreeMap<PlayKey, Vec<PlayerPlayRole>> = BTreeMap::new();
    let mut excluded = Vec::new();
    let mut record_count = 0usize;
    let mut rush_attempts = 0usize;
    for row in reader.deserialize::<RawScoutingRow>() {
        let line = reader.position().line();
        let row = match row {
            Ok(r) => r,
            Err(e) => {
                excluded.push(RowIssue {
                    file: name.clone(),
                    line,
                    message: e.to_string(),
                });
                continue;
            }
        };
        let role = match normalize_role(&row.role) {
            Some(r) => r,
            None => {
                excluded.push(RowIssue {
                    file: name.clone(),
                    line,
                    message: format!("unrecognized role string \"{}\"", row.role),
                });
                continue;
            }
        };
        record_count += 1;
        if role == Role::PassRush {
            rush_attempts += 1;
        }
        let key = PlayKey::new(row.game_id, row.play_id);
        let entry = roles.entry(key).or_default();
        entry.push(PlayerPlayRole {
            game_id: row.game_id,
            play_id: row.play_id,
            player_id: row.nfl_id,
            role,
            position: row.position_lined_up.unwrap_or_default(),
            credited_hit: row.hit.unwrap_or(0.0) != 0.0,
            credited_hurry: row.hurry.unwrap_or(0.0) != 0.0,
            credited_sack: row.sack.unwrap_or(0.0) != 0.0,
            blocked_player_ids: row.blocked_player.into_iter().collect(),
        });
    }
    for records in roles.values_mut() {
        records.sort_by_key(|r| r.player_id);
    }
    Ok(ScoutingTable {
        roles,
        record_count,
        rush_attempts,
        excluded,
    })
}

fn normalize_role(raw: &str) -> Option<Role> {
    match raw.trim() {
        "Pass Rush" | "pass rush" => Some(Role::PassRush),
        "Pass Block" | "pass block" => Some(Role::PassBlock),
        "Pass" | "pass" => Some(Role::Pass),
        "Coverage" | "Pass Route" => Some(Role::Other),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_tmp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    const GAMES: &str = "gameId,season,week,gameDate,gameTimeEastern,homeTeamAbbr,visitorTeamAbbr\n\
         2021090900,2021,1,09/09/2021,20:20:00,TB,DAL\n";

    fn games_map() -> BTreeMap<GameId, GameMeta> {
        parse_games(write_tmp(GAMES).path()).unwrap()
    }

    #[test]
    fn parse_plays_maps_fields() {
        let plays = "gameId,playId,down,yardsToGo,possessionTeam,defensiveTeam,yardlineSide,yardlineNumber\n\
             2021090900,97,3,8,DAL,TB,DAL,25\n";
        let table = parse_plays(write_tmp(plays).path(), &games_map()).unwrap();
        let ctx = &table.contexts[&PlayKey::new(2021090900, 97)];
        assert_eq!(ctx.down, Down::Third);
        assert_eq!(ctx.yards_to_go, 8.0);
        assert_eq!(ctx.yardline, 25.0);
        assert_eq!(ctx.week, 1);
    }

    #[test]
    fn two_point_play_maps_to_two_point_down() {
        let plays = "gameId,playId,down,yardsToGo,possessionTeam,defensiveTeam,yardlineSide,yardlineNumber\n\
             2021090900,97,0,2,DAL,TB,TB,2\n\
             2021090900,98,,2,DAL,TB,TB,2\n";
        let table = parse_plays(write_tmp(plays).path(), &games_map()).unwrap();
        assert_eq!(table.contexts[&PlayKey::new(2021090900, 97)].down, Down::TwoPoint);
        assert_eq!(table.contexts[&PlayKey::new(2021090900, 98)].down, Down::TwoPoint);
    }

    #[test]
    fn unknown_down_excluded_with_reason() {
        let plays = "gameId,playId,down,yardsToGo,possessionTeam,defensiveTeam,yardlineSide,yardlineNumber\n\
             2021090900,97,7,8,DAL,TB,DAL,25\n";
        let table = parse_plays(write_tmp(plays).path(), &games_map()).unwrap();
        assert!(table.contexts.is_empty());
        assert_eq!(table.excluded.len(), 1);
        assert!(table.excluded[0].1.contains("unknown down code 7"));
    }

    #[test]
    fn yardline_converts_opponent_side_and_midfield() {
        assert_eq!(yardline_from_own_goal(Some("DAL"), Some(25.0), "DAL").unwrap(), 25.0);
        assert_eq!(yardline_from_own_goal(Some("TB"), Some(25.0), "DAL").unwrap(), 75.0);
        assert_eq!(yardline_from_own_goal(None, Some(50.0), "DAL").unwrap(), 50.0);
    }

    #[test]
    fn drive_keys_group_consecutive_possessions() {
        let plays = "gameId,playId,down,yardsToGo,possessionTeam,defensiveTeam,yardlineSide,yardlineNumber\n\
             2021090900,10,1,10,DAL,TB,DAL,25\n\
             2021090900,35,2,5,DAL,TB,DAL,30\n\
             2021090900,60,1,10,TB,DAL,TB,20\n\
             2021090900,90,1,10,DAL,TB,DAL,40\n";
        let table = parse_plays(write_tmp(plays).path(), &games_map()).unwrap();
        let k = |p| PlayKey::new(2021090900, p);
        assert_eq!(table.contexts[&k(10)].drive_key, table.contexts[&k(35)].drive_key);
        assert_ne!(table.contexts[&k(10)].drive_key, table.contexts[&k(60)].drive_key);
        // Same team again after an opponent possession starts a new drive.
        assert_ne!(table.contexts[&k(10)].drive_key, table.contexts[&k(90)].drive_key);
    }

    #[test]
    fn scouting_roles_normalized_and_credits_mapped() {
        let scouting = "gameId,playId,nflId,pff_role,pff_positionLinedUp,pff_hit,pff_hurry,pff_sack,pff_beatenByDefender,pff_hitAllowed,pff_hurryAllowed,pff_sackAllowed,pff_nflIdBlockedPlayer,pff_blockType,pff_backFieldBlock\n\
             2021090900,97,101,Pass Rush,RE,0,0,1,,,,,,,\n\
             2021090900,97,201,Pass Block,LT,,,,0,0,0,1,101,PP,0\n\
             2021090900,97,301,Pass,QB,,,,,,,,,,\n\
             2021090900,97,401,Pass Route,TE-R,,,,,,,,,,\n";
        let table = parse_scouting(write_tmp(scouting).path()).unwrap();
        assert_eq!(table.record_count, 4);
        assert_eq!(table.rush_attempts, 1);
        let records = &table.roles[&PlayKey::new(2021090900, 97)];
        let rusher = records.iter().find(|r| r.player_id == 101).unwrap();
        assert_eq!(rusher.role, Role::PassRush);
        assert!(rusher.credited_sack);
        assert!(!rusher.credited_hit);
        let blocker = records.iter().find(|r| r.player_id == 201).unwrap();
        assert_eq!(blocker.role, Role::PassBlock);
        assert_eq!(blocker.blocked_player_ids, vec![101]);
        assert_eq!(records.iter().find(|r| r.player_id == 401).unwrap().role, Role::Other);
    }

    #[test]
    fn unrecognized_role_excluded_with_reason() {
        let scouting = "gameId,playId,nflId,pff_role,pff_positionLinedUp,pff_hit,pff_hurry,pff_sack,pff_beatenByDefender,pff_hitAllowed,pff_hurryAllowed,pff_sackAllowed,pff_nflIdBlockedPlayer,pff_blockType,pff_backFieldBlock\n\
             2021090900,97,101,Quarterback Spy,RE,0,0,0,,,,,,,\n";
        let table = parse_scouting(write_tmp(scouting).path()).unwrap();
        assert_eq!(table.record_count, 0);
        assert_eq!(table.excluded.len(), 1);
        assert!(table.excluded[0].message.contains("Quarterback Spy"));
    }
}
