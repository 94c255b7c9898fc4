//! Clickstream sessions and the list-vs-visualization usage report.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::BufRead;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::folksonomy::UserId;

/// Default inactivity timeout between two clicks of one session.
pub const DEFAULT_GAP_SECS: u64 = 1800;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    List,
    Viz,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    TagSelect,
    ResourceSelect,
    Edit,
    Add,
    Remove,
    ViewSwitch,
    FilterChange,
    ModeSwitch,
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClickEvent {
    pub user: UserId,
    pub at: i64,
    pub mode: Mode,
    pub action: Action,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Session {
    pub user: UserId,
    pub mode: Mode,
    pub events: Vec<ClickEvent>,
    pub ended_by_switch: bool,
}

impl Session {
    pub fn duration_secs(&self) -> i64 {
        match (self.events.first(), self.events.last()) {
            (Some(first), Some(last)) => last.at - first.at,
            _ => 0,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ModeStats {
    pub n_sessions: usize,
    pub mean_duration_sec: f64,
    pub mean_clicks: f64,
    pub content_fraction: f64,
    pub switch_fraction: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SessionStats {
    pub list: ModeStats,
    pub viz: ModeStats,
}

impl SessionStats {
    pub fn mode(&self, mode: Mode) -> &ModeStats {
        match mode {
            Mode::List => &self.list,
            Mode::Viz => &self.viz,
        }
    }
}

/// Tag selection, resource selection and content edits count as
/// content-related clicks.
pub fn classify_click(event: &ClickEvent) -> bool {
    matches!(
        event.action,
        Action::TagSelect | Action::ResourceSelect | Action::Edit | Action::Add | Action::Remove
    )
}

/// Splits each user's clicks into sessions.
///
/// A user's clicks are ordered by time and a new session starts when more
/// than `gap_secs` pass between clicks or when the interface mode changes.
/// A `ModeSwitch` click ends the session it belongs to. Sessions closed by
/// a switch click or by a change of mode are flagged `ended_by_switch`;
/// sessions closed by the timeout are not.
///
/// Sessions are returned grouped by user id, each user's in time order.
pub fn sessionize(events: &[ClickEvent], gap_secs: u64) -> Vec<Session> {
    let mut by_user: BTreeMap<&UserId, Vec<&ClickEvent>> = BTreeMap::new();
    for e in events {
        by_user.entry(&e.user).or_default().push(e);
    }

    let gap = i64::try_from(gap_secs).unwrap_or(i64::MAX);
    let mut sessions = Vec::new();
    for (user, mut clicks) in by_user {
        clicks.sort_by_key(|e| (e.at, e.mode, e.action));
        let mut current: Option<Session> = None;
        for e in clicks {
            if let Some(mut open) = current.take() {
                let last = open.events.last().expect("sessions are never empty").at;
                let timed_out = e.at.saturating_sub(last) > gap;
                let switched = e.mode != open.mode;
                if timed_out || switched {
                    open.ended_by_switch = !timed_out;
                    sessions.push(open);
                } else {
                    current = Some(open);
                }
            }
            let open = current.get_or_insert_with(|| Session {
                user: user.clone(),
                mode: e.mode,
                events: Vec::new(),
                ended_by_switch: false,
            });
            open.events.push(e.clone());
            if e.action == Action::ModeSwitch {
                let mut closed = current.take().expect("just opened");
                closed.ended_by_switch = true;
                sessions.push(closed);
            }
        }
        sessions.extend(current);
    }
    sessions
}

pub fn compute_stats(sessions: &[Session]) -> SessionStats {
    let of_mode = |mode: Mode| {
        let picked: Vec<&Session> = sessions.iter().filter(|s| s.mode == mode).collect();
        let n = picked.len();
        if n == 0 {
            return ModeStats::default();
        }
        let clicks: usize = picked.iter().map(|s| s.events.len()).sum();
        let content = picked
            .iter()
            .flat_map(|s| &s.events)
            .filter(|e| classify_click(e))
            .count();
        let durations: i64 = picked.iter().map(|s| s.duration_secs()).sum();
        let switched = picked.iter().filter(|s| s.ended_by_switch).count();
        ModeStats {
            n_sessions: n,
            mean_duration_sec: durations as f64 / n as f64,
            mean_clicks: clicks as f64 / n as f64,
            content_fraction: if clicks == 0 {
                0.0
            } else {
                content as f64 / clicks as f64
            },
            switch_fraction: switched as f64 / n as f64,
        }
    };
    SessionStats {
        list: of_mode(Mode::List),
        viz: of_mode(Mode::Viz),
    }
}

fn with_thousands(n: usize) -> String {
    let digits = n.to_string();
    let mut out = String::with_capacity(digits.len() + digits.len() / 3);
    for (i, ch) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i).is_multiple_of(3) {
            out.push(',');
        }
        out.push(ch);
    }
    out
}

fn percent(fraction: f64) -> String {
    format!("{:.1}%", fraction * 100.0)
}

/// Two-column plain-text report, one `label | list | visualization` row per
/// metric.
pub fn render_report(stats: &SessionStats) -> String {
    type Cell = fn(&ModeStats) -> String;
    let rows: [(&str, Cell); 5] = [
        ("Number of sessions", |m| with_thousands(m.n_sessions)),
        ("Time per session (sec)", |m| {
            format!("{:.1}", m.mean_duration_sec)
        }),
        ("Clicks per session", |m| format!("{:.1}", m.mean_clicks)),
        ("Content-related clicks", |m| percent(m.content_fraction)),
        ("Switch to other mode", |m| percent(m.switch_fraction)),
    ];
    let mut out = String::from("Mode | List | Visualization\n");
    for (label, cell) in rows {
        let _ = writeln!(
            out,
            "{label} | {} | {}",
            cell(&stats.list),
            cell(&stats.viz)
        );
    }
    out
}

#[derive(Debug, Error)]
pub enum EventLogError {
    #[error("event log line {line}: {source}")]
    Parse {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("reading event log: {0}")]
    Io(#[from] std::io::Error),
}

/// Reads one JSON click event per line; blank lines are skipped.
pub fn parse_event_log(reader: impl BufRead) -> Result<Vec<ClickEvent>, EventLogError> {
    let mut events = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let event = serde_json::from_str(&line).map_err(|source| EventLogError::Parse {
            line: i + 1,
            source,
        })?;
        events.push(event);
    }
    Ok(events)
}
