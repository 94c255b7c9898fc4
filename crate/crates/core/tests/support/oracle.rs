//! Brute-force reference implementations used to check the library.
//!
//! Everything here works on plain strings and linear scans over the raw
//! triple / event lists, without the store's indexes.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::IndexedRandom;
use rand::Rng;

/// `(user, tag, resource)` with canonical strings.
pub type Raw = (String, String, String);

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum ONode {
    Tag(String),
    Res(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ONodeInfo {
    pub node: ONode,
    pub local: bool,
    pub weight: usize,
    pub center: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OGraph {
    pub nodes: Vec<ONodeInfo>,
    pub edges: Vec<(usize, usize)>,
}

pub struct OFilter {
    pub depth: usize,
    pub max_neighbors: usize,
    pub max_nodes: usize,
    pub extra_tags: Vec<String>,
}

fn dedup(raw: &[Raw]) -> Vec<Raw> {
    let set: BTreeSet<Raw> = raw.iter().cloned().collect();
    set.into_iter().collect()
}

fn active(raw: &[Raw], viewer: &str, social: bool) -> Vec<Raw> {
    dedup(raw)
        .into_iter()
        .filter(|(u, _, _)| social || u == viewer)
        .collect()
}

fn weight(active: &[Raw], node: &ONode) -> usize {
    match node {
        ONode::Tag(t) => active.iter().filter(|(_, tt, _)| tt == t).count(),
        ONode::Res(r) => {
            let mut users: Vec<&String> = active
                .iter()
                .filter(|(_, _, rr)| rr == r)
                .map(|(u, _, _)| u)
                .collect();
            users.sort();
            users.dedup();
            users.len()
        }
    }
}

fn neighbors(active: &[Raw], node: &ONode) -> Vec<ONode> {
    let mut out: Vec<ONode> = active
        .iter()
        .filter_map(|(_, t, r)| match node {
            ONode::Tag(x) if x == t => Some(ONode::Res(r.clone())),
            ONode::Res(x) if x == r => Some(ONode::Tag(t.clone())),
            _ => None,
        })
        .collect();
    out.sort();
    out.dedup();
    out
}

fn local(raw: &[Raw], viewer: &str, node: &ONode) -> bool {
    raw.iter().any(|(u, t, r)| {
        u == viewer
            && match node {
                ONode::Tag(x) => x == t,
                ONode::Res(x) => x == r,
            }
    })
}

/// One pass of capped, popularity-ranked expansion over `act`, continuing
/// from `state`: `(node, ring, admitted_so_far)` triples in admission order.
fn expand(act: &[Raw], state: &mut Vec<(ONode, usize, usize)>, filter: &OFilter) {
    let mut extras = filter.extra_tags.clone();
    extras.sort();
    extras.dedup();
    for t in extras {
        let n = ONode::Tag(t);
        if state.len() >= filter.max_nodes {
            return;
        }
        if !state.iter().any(|(m, _, _)| *m == n) && weight(act, &n) > 0 {
            state.push((n, 0, 0));
        }
    }
    for ring in 0..filter.depth {
        let frontier: Vec<usize> = (0..state.len()).filter(|&i| state[i].1 == ring).collect();
        for i in frontier {
            let mut cands: Vec<ONode> = neighbors(act, &state[i].0)
                .into_iter()
                .filter(|n| !state.iter().any(|(m, _, _)| m == n))
                .collect();
            // Selection sort by (weight desc, id asc).
            let mut ranked = Vec::new();
            while !cands.is_empty() {
                let mut best = 0;
                for j in 1..cands.len() {
                    let (wj, wb) = (weight(act, &cands[j]), weight(act, &cands[best]));
                    if wj > wb || (wj == wb && cands[j] < cands[best]) {
                        best = j;
                    }
                }
                ranked.push(cands.remove(best));
            }
            for n in ranked {
                if state[i].2 >= filter.max_neighbors {
                    break;
                }
                if state.len() >= filter.max_nodes {
                    return;
                }
                state.push((n, ring + 1, 0));
                state[i].2 += 1;
            }
        }
    }
}

/// Reference contextual map. The social view is the personal expansion
/// continued over all triples. `None` mirrors the error cases: no centers,
/// a center absent from the view, or more centers than `max_nodes`.
pub fn context_graph(
    raw: &[Raw],
    viewer: &str,
    centers: &[ONode],
    social: bool,
    filter: &OFilter,
) -> Option<OGraph> {
    let act = active(raw, viewer, social);
    let mut state: Vec<(ONode, usize, usize)> = Vec::new();
    for c in centers {
        if !state.iter().any(|(m, _, _)| m == c) {
            state.push((c.clone(), 0, 0));
        }
    }
    let n_centers = state.len();
    if n_centers == 0 || n_centers > filter.max_nodes {
        return None;
    }
    if state.iter().any(|(c, _, _)| weight(&act, c) == 0) {
        return None;
    }
    expand(&active(raw, viewer, false), &mut state, filter);
    if social {
        expand(&act, &mut state, filter);
    }
    let admitted: Vec<ONode> = state.into_iter().map(|(n, _, _)| n).collect();

    let nodes = admitted
        .iter()
        .enumerate()
        .map(|(i, n)| ONodeInfo {
            node: n.clone(),
            local: local(raw, viewer, n),
            weight: weight(&act, n),
            center: i < n_centers,
        })
        .collect();
    let mut edges = Vec::new();
    for (i, a) in admitted.iter().enumerate() {
        for (j, b) in admitted.iter().enumerate() {
            if let (ONode::Tag(t), ONode::Res(r)) = (a, b) {
                if act.iter().any(|(_, tt, rr)| tt == t && rr == r) {
                    edges.push((i, j));
                }
            }
        }
    }
    Some(OGraph { nodes, edges })
}

fn resources_of(raw: &[Raw], tag: &str) -> BTreeSet<String> {
    raw.iter()
        .filter(|(_, t, _)| t == tag)
        .map(|(_, _, r)| r.clone())
        .collect()
}

fn tags_of(raw: &[Raw], res: &str) -> BTreeSet<String> {
    raw.iter()
        .filter(|(_, _, r)| r == res)
        .map(|(_, t, _)| t.clone())
        .collect()
}

fn cosine(a: &BTreeSet<String>, b: &BTreeSet<String>) -> f64 {
    let inter = a.iter().filter(|x| b.contains(*x)).count() as f64;
    inter / ((a.len() as f64) * (b.len() as f64)).sqrt()
}

/// Cosine between two tags' resource sets.
pub fn tag_cosine(raw: &[Raw], a: &str, b: &str) -> f64 {
    cosine(&resources_of(raw, a), &resources_of(raw, b))
}

/// Cosine between two resources' tag sets.
pub fn resource_cosine(raw: &[Raw], a: &str, b: &str) -> f64 {
    cosine(&tags_of(raw, a), &tags_of(raw, b))
}

fn host_and_segments(url: &str) -> (String, Vec<String>) {
    let parsed = url::Url::parse(url).expect("canonical url");
    let host = parsed.host_str().unwrap_or("").to_string();
    let segs = parsed
        .path()
        .split('/')
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect();
    (host, segs)
}

/// Distinct-user tag tally on `url` (or on its closest same-host stand-in),
/// minus the viewer's own tags, top `k`.
pub fn recommend(raw: &[Raw], viewer: &str, url: &str, k: usize) -> Vec<(String, usize)> {
    let raw = dedup(raw);
    let source = if raw.iter().any(|(_, _, r)| r == url) {
        url.to_string()
    } else {
        let (host, segs) = host_and_segments(url);
        let mut best: Option<(usize, usize, String)> = None;
        let mut resources: Vec<&String> = raw.iter().map(|(_, _, r)| r).collect();
        resources.sort();
        resources.dedup();
        for r in resources {
            let (h, s) = host_and_segments(r);
            if h != host || r == url {
                continue;
            }
            let mut shared = 0;
            while shared < s.len() && shared < segs.len() && s[shared] == segs[shared] {
                shared += 1;
            }
            let users: BTreeSet<&String> = raw
                .iter()
                .filter(|(_, _, rr)| rr == r)
                .map(|(u, _, _)| u)
                .collect();
            let better = match &best {
                None => true,
                Some((bs, bu, _)) => (shared, users.len()) > (*bs, *bu),
            };
            if better {
                best = Some((shared, users.len(), r.clone()));
            }
        }
        match best {
            Some((_, _, r)) => r,
            None => return Vec::new(),
        }
    };
    let mut tally: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for (u, t, r) in &raw {
        if *r == source {
            tally.entry(t.clone()).or_default().insert(u.clone());
        }
    }
    let own: BTreeSet<String> = raw
        .iter()
        .filter(|(u, _, r)| u == viewer && r == url)
        .map(|(_, t, _)| t.clone())
        .collect();
    let mut out: Vec<(String, usize)> = tally
        .into_iter()
        .filter(|(t, _)| !own.contains(t))
        .map(|(t, users)| (t, users.len()))
        .collect();
    out.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    out.truncate(k);
    out
}

/// Raw click: `(user, at, is_viz, action_index)`; action index 7 is a
/// mode switch.
pub type RawClick = (String, i64, bool, u8);
pub const MODE_SWITCH: u8 = 7;

/// One session: its events (as input indices into the sorted per-user
/// list) and whether it ended by a switch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OSession {
    pub user: String,
    pub viz: bool,
    pub events: Vec<RawClick>,
    pub ended_by_switch: bool,
}

/// Session partition computed from cut points: a cut falls before click
/// `i` when it is the user's first click, follows a gap above `gap`,
/// changes mode, or follows a mode-switch click.
pub fn sessions(clicks: &[RawClick], gap: i64) -> Vec<OSession> {
    let mut users: Vec<&String> = clicks.iter().map(|c| &c.0).collect();
    users.sort();
    users.dedup();
    let mut out = Vec::new();
    for user in users {
        let mut mine: Vec<RawClick> = clicks.iter().filter(|c| &c.0 == user).cloned().collect();
        mine.sort_by_key(|c| (c.1, c.2, c.3));
        let cut = |i: usize| -> bool {
            i == 0
                || mine[i].1 - mine[i - 1].1 > gap
                || mine[i].2 != mine[i - 1].2
                || mine[i - 1].3 == MODE_SWITCH
        };
        let starts: Vec<usize> = (0..mine.len()).filter(|&i| cut(i)).collect();
        for (k, &s) in starts.iter().enumerate() {
            let e = starts.get(k + 1).copied().unwrap_or(mine.len());
            let last = &mine[e - 1];
            let ended_by_switch = last.3 == MODE_SWITCH
                || (e < mine.len() && mine[e].2 != last.2 && mine[e].1 - last.1 <= gap);
            out.push(OSession {
                user: user.clone(),
                viz: mine[s].2,
                events: mine[s..e].to_vec(),
                ended_by_switch,
            });
        }
    }
    out
}

pub fn random_click_stream<R: Rng>(rng: &mut R, max_events: usize) -> Vec<RawClick> {
    let users = ["ann", "bob", "cy"];
    let n = rng.random_range(0..=max_events);
    (0..n)
        .map(|_| {
            (
                users.choose(rng).unwrap().to_string(),
                rng.random_range(0..20_000),
                rng.random_bool(0.5),
                rng.random_range(0..9u8),
            )
        })
        .collect()
}

/// Random small folksonomy over a few users, tags and resources (some
/// sharing a host).
pub fn random_triples<R: Rng>(rng: &mut R, max_triples: usize) -> Vec<Raw> {
    let users = ["u1", "u2", "u3", "u4"];
    let tags = ["tech", "blog", "news", "gadgets", "science", "web", "art"];
    let resources = [
        "http://a.com/",
        "http://a.com/x",
        "http://a.com/x/y",
        "http://b.org/",
        "http://c.net/p",
        "http://d.io/",
        "http://e.com/q",
        "http://f.com/",
    ];
    let n = rng.random_range(1..=max_triples);
    (0..n)
        .map(|_| {
            (
                users.choose(rng).unwrap().to_string(),
                tags.choose(rng).unwrap().to_string(),
                resources.choose(rng).unwrap().to_string(),
            )
        })
        .collect()
}
