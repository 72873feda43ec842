//! Streaming parser for tracking week files.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::schema::{check_headers, RawTrackingRow, RowIssue, TRACKING_REQUIRED};
use super::IngestError;
use crate::{GameId, PlayId, PlayerId};

/// Field envelope in yards. Coordinates within `oob_tolerance` of the
/// envelope are clamped and flagged; rows further out are row errors.
pub const FIELD_LENGTH: f64 = 120.0;
pub const FIELD_WIDTH: f64 = 53.3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PlayDirection {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrackedEntity {
    Player(PlayerId),
    Ball,
}

/// One validated tracking observation (player or ball) at one frame.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrackingFrame {
    pub game_id: GameId,
    pub play_id: PlayId,
    pub frame_id: u32,
    pub entity: TrackedEntity,
    pub team: String,
    pub x: f64,
    pub y: f64,
    pub speed: f64,
    pub accel: f64,
    pub dist_traveled: f64,
    pub orientation: Option<f64>,
    pub direction: Option<f64>,
    pub event: Option<String>,
    pub play_direction: PlayDirection,
    /// Set when a coordinate was clamped back onto the field envelope.
    pub oob_flagged: bool,
}

/// Outcome counters for one parsed file.
#[derive(Debug, Clone, Default, Serialize)]
pub struct FileCounters {
    pub rows: usize,
    pub row_errors: usize,
    pub oob_flagged: usize,
}

/// Streaming reader over one week file. Yields one validated
/// [`TrackingFrame`] per row; malformed rows surface as [`RowIssue`]s.
pub struct TrackingReader {
    reader: csv::Reader<std::fs::File>,
    headers: csv::StringRecord,
    file: String,
    oob_tolerance: f64,
    pub counters: FileCounters,
}

impl TrackingReader {
    pub fn open(path: &Path, oob_tolerance: f64) -> Result<Self, IngestError> {
        let file = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        if !path.exists() {
            return Err(IngestError::MissingFile {
                path: path.display().to_string(),
            });
        }
        let mut reader = csv::ReaderBuilder::new()
            .flexible(false)
            .from_path(path)
            .map_err(|e| IngestError::Io {
                file: file.clone(),
                message: e.to_string(),
            })?;
        let headers = reader
            .headers()
            .map_err(|e| IngestError::Io {
                file: file.clone(),
                message: e.to_string(),
            })?
            .clone();
        check_headers(&file, &headers, TRACKING_REQUIRED, true)?;
        Ok(Self {
            reader,
            headers,
            file,
            oob_tolerance,
            counters: FileCounters::default(),
        })
    }

    pub fn file_name(&self) -> &str {
        &self.file
    }

    fn validate(&mut self, raw: RawTrackingRow, line: u64) -> Result<TrackingFrame, RowIssue> {
        let issue = |message: String| RowIssue {
            file: self.file.clone(),
            line,
            message,
        };
        for (name, v) in [("x", raw.x), ("y", raw.y)] {
            if !v.is_finite() {
                return Err(issue(format!("non-finite {name} coordinate")));
            }
        }
        let mut oob_flagged = false;
        let mut clamp = |v: f64, hi: f64, name: &str| -> Result<f64, RowIssue> {
            if (0.0..=hi).contains(&v) {
                Ok(v)
            } else if v >= -self.oob_tolerance && v <= hi + self.oob_tolerance {
                oob_flagged = true;
                Ok(v.clamp(0.0, hi))
            } else {
                Err(issue(format!("{name}={v} outside field envelope")))
            }
        };
        let x = clamp(raw.x, FIELD_LENGTH, "x")?;
        let y = clamp(raw.y, FIELD_WIDTH, "y")?;
        let play_direction = match raw.play_direction.as_str() {
            "left" => PlayDirection::Left,
            "right" => PlayDirection::Right,
            other => return Err(issue(format!("unknown play direction \"{other}\""))),
        };
        let entity = match raw.nfl_id {
            Some(id) => TrackedEntity::Player(id),
            None => TrackedEntity::Ball,
        };
        if oob_flagged {
            self.counters.oob_flagged += 1;
        }
        Ok(TrackingFrame {
            game_id: raw.game_id,
            play_id: raw.play_id,
            frame_id: raw.frame_id,
            entity,
            team: raw.team,
            x,
            y,
            speed: raw.s,
            accel: raw.a,
            dist_traveled: raw.dis,
            orientation: raw.o.map(wrap_degrees),
            direction: raw.dir.map(wrap_degrees),
            event: raw.event.filter(|e| !e.is_empty() && e != "None"),
            play_direction,
            oob_flagged,
        })
    }
}

fn wrap_degrees(v: f64) -> f64 {
    v.rem_euclid(360.0)
}

impl Iterator for TrackingReader {
    type Item = Result<TrackingFrame, RowIssue>;

    fn next(&mut self) -> Option<Self::Item> {
        let mut raw = csv::StringRecord::new();
        loop {
            let line = self.reader.position().line();
            match self.reader.read_record(&mut raw) {
                Ok(false) => return None,
                Ok(true) => {
                    self.counters.rows += 1;
                    let parsed: Result<RawTrackingRow, _> = raw.deserialize(Some(&self.headers));
                    return Some(match parsed {
                        Ok(row) => self.validate(row, line).map_err(|i| {
                            self.counters.row_errors += 1;
                            i
                        }),
                        Err(e) => {
                            self.counters.row_errors += 1;
                            Err(RowIssue {
                                file: self.file.clone(),
                                line,
                                message: e.to_string(),
                            })
                        }
                    });
                }
                Err(e) => {
                    self.counters.rows += 1;
                    self.counters.row_errors += 1;
                    return Some(Err(RowIssue {
                        file: self.file.clone(),
                        line,
                        message: e.to_string(),
                    }));
                }
            }
        }
    }
}

/// Opens a tracking file as a validated stream.
pub fn parse_tracking(path: &Path, oob_tolerance: f64) -> Result<TrackingReader, IngestError> {
    TrackingReader::open(path, oob_tolerance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    const HEADER: &str = "gameId,playId,nflId,frameId,time,jerseyNumber,team,playDirection,x,y,s,a,dis,o,dir,event\n";

    fn reader_for(rows: &str) -> TrackingReader {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(HEADER.as_bytes()).unwrap();
        f.write_all(rows.as_bytes()).unwrap();
        let (_, path) = f.keep().unwrap();
        TrackingReader::open(&path, 2.0).unwrap()
    }

    #[test]
    fn parses_snap_row() {
        let mut r = reader_for(
            "2021101710,2449,47889,7,2021-10-17T20:42:41.2,98,LV,left,67.68,29.89,0.34,1.57,0.04,124.86,88.21,ball_snap\n",
        );
        let frame = r.next().unwrap().unwrap();
        assert_eq!(frame.entity, TrackedEntity::Player(47889));
        assert_eq!(frame.frame_id, 7);
        assert_eq!(frame.x, 67.68);
        assert_eq!(frame.y, 29.89);
        assert_eq!(frame.speed, 0.34);
        assert_eq!(frame.event.as_deref(), Some("ball_snap"));
        assert!(!frame.oob_flagged);
    }

    #[test]
    fn ball_row_tagged_as_ball() {
        let mut r = reader_for(
            "2021101710,2449,,7,2021-10-17T20:42:41.2,,football,left,60.0,26.6,0.1,0.1,0.01,,,\n",
        );
        let frame = r.next().unwrap().unwrap();
        assert_eq!(frame.entity, TrackedEntity::Ball);
        assert_eq!(frame.event, None);
    }

    #[test]
    fn malformed_coordinate_is_row_error() {
        let mut r = reader_for(
            "2021101710,2449,47889,7,t,98,LV,left,,29.89,0.34,1.57,0.04,124.86,88.21,\n\
             2021101710,2449,47889,8,t,98,LV,left,67.76,29.89,0.69,2.13,0.08,124.07,89.59,\n",
        );
        let first = r.next().unwrap();
        assert!(first.is_err());
        let second = r.next().unwrap().unwrap();
        assert_eq!(second.frame_id, 8);
        assert_eq!(r.counters.row_errors, 1);
        assert_eq!(r.counters.rows, 2);
    }

    #[test]
    fn near_boundary_coordinate_clamped_and_flagged() {
        let mut r = reader_for(
            "2021101710,2449,47889,7,t,98,LV,left,67.68,53.9,0.34,1.57,0.04,124.86,88.21,\n",
        );
        let frame = r.next().unwrap().unwrap();
        assert!(frame.oob_flagged);
        assert_eq!(frame.y, FIELD_WIDTH);
        assert_eq!(r.counters.oob_flagged, 1);
    }

    #[test]
    fn far_out_of_bounds_is_row_error() {
        let mut r = reader_for(
            "2021101710,2449,47889,7,t,98,LV,left,67.68,70.0,0.34,1.57,0.04,124.86,88.21,\n",
        );
        assert!(r.next().unwrap().is_err());
    }

    #[test]
    fn missing_column_is_schema_error() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(b"gameId,playId,nflId,frameId\n").unwrap();
        let err = TrackingReader::open(f.path(), 2.0).unwrap_err();
        match err {
            IngestError::Schema { missing, .. } => assert!(missing.contains(&"x".to_string())),
            other => panic!("unexpected: {other}"),
        }
    }
}
