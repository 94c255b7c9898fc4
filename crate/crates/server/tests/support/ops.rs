//! Random operation sequences, applied either through the journaled service
//! or directly to an in-memory store.

use std::sync::atomic::{AtomicI64, Ordering};
use std::sync::Arc;

use rand::seq::IndexedRandom;
use rand::Rng;
use tagmap_core::{
    apply_drag, canonicalize_url, normalize_tag, Action, ClickEvent, Folksonomy, Mode, NodeRef,
    UserId,
};
use tagmap_server::service::{Clock, Service};

const USERS: [&str; 3] = ["ann", "bob", "cy"];
const TAGS: [&str; 6] = ["tech", "News", "gadgets", "blog", "web 2.0", "  "];
const URLS: [&str; 6] = [
    "http://a.com/",
    "a.com/x",
    "HTTP://B.org/#frag",
    "http://c.net/p?q=1",
    "https://d.io/",
    "not a url",
];

#[derive(Debug, Clone)]
pub enum Op {
    Add {
        user: String,
        url: String,
        title: String,
        tags: Vec<String>,
    },
    Remove {
        user: String,
        url: String,
    },
    SetTags {
        user: String,
        url: String,
        tags: Vec<String>,
    },
    SetTitle {
        user: String,
        url: String,
        title: String,
    },
    Rename {
        user: String,
        old: String,
        new: String,
    },
    Drag {
        user: String,
        url: String,
        tag: String,
    },
    Events {
        user: String,
        events: Vec<(i64, bool, usize)>,
    },
}

const ACTIONS: [Action; 9] = [
    Action::TagSelect,
    Action::ResourceSelect,
    Action::Edit,
    Action::Add,
    Action::Remove,
    Action::ViewSwitch,
    Action::FilterChange,
    Action::ModeSwitch,
    Action::Other,
];

fn pick<R: Rng>(rng: &mut R, xs: &[&str]) -> String {
    xs.choose(rng).unwrap().to_string()
}

fn tags<R: Rng>(rng: &mut R) -> Vec<String> {
    (0..rng.random_range(0..4))
        .map(|_| pick(rng, &TAGS))
        .collect()
}

pub fn random_ops<R: Rng>(rng: &mut R, n: usize) -> Vec<Op> {
    (0..n)
        .map(|_| {
            let user = pick(rng, &USERS);
            let url = pick(rng, &URLS);
            match rng.random_range(0..10) {
                0..=3 => Op::Add {
                    user,
                    url,
                    title: pick(rng, &["", "Home", "Other title"]),
                    tags: tags(rng),
                },
                4 => Op::Remove { user, url },
                5 => Op::SetTags {
                    user,
                    url,
                    tags: tags(rng),
                },
                6 => Op::SetTitle {
                    user,
                    url,
                    title: pick(rng, &["", "T1", "T2"]),
                },
                7 => Op::Rename {
                    user,
                    old: pick(rng, &TAGS),
                    new: pick(rng, &TAGS),
                },
                8 => Op::Drag {
                    user,
                    url,
                    tag: pick(rng, &TAGS),
                },
                _ => Op::Events {
                    user,
                    events: (0..rng.random_range(1..5))
                        .map(|_| {
                            (
                                rng.random_range(0..10_000),
                                rng.random_bool(0.5),
                                rng.random_range(0..9),
                            )
                        })
                        .collect(),
                },
            }
        })
        .collect()
}

fn events(user: &UserId, raw: &[(i64, bool, usize)]) -> Vec<ClickEvent> {
    raw.iter()
        .map(|&(at, viz, a)| ClickEvent {
            user: user.clone(),
            at,
            mode: if viz { Mode::Viz } else { Mode::List },
            action: ACTIONS[a],
        })
        .collect()
}

/// A clock the test advances by hand.
pub fn manual_clock() -> (Arc<AtomicI64>, Clock) {
    let t = Arc::new(AtomicI64::new(0));
    let c = t.clone();
    (t, Arc::new(move || c.load(Ordering::SeqCst)))
}

/// Applies `op` through the service. Rejected operations are ignored.
pub fn apply_service(service: &Service, op: &Op) {
    let uid = |u: &str| UserId::new(u).unwrap();
    let _ = match op {
        Op::Add {
            user,
            url,
            title,
            tags,
        } => service
            .add_annotation(&uid(user), url, title, tags)
            .map(drop),
        Op::Remove { user, url } => match canonicalize_url(url) {
            Ok(r) => service.remove_resource(&uid(user), &r).map(drop),
            Err(_) => Ok(()),
        },
        Op::SetTags { user, url, tags } => match canonicalize_url(url) {
            Ok(r) => service.set_tags(&uid(user), &r, tags).map(drop),
            Err(_) => Ok(()),
        },
        Op::SetTitle { user, url, title } => match canonicalize_url(url) {
            Ok(r) => service.set_title(&uid(user), &r, title),
            Err(_) => Ok(()),
        },
        Op::Rename { user, old, new } => match normalize_tag(old) {
            Ok(old) => service.rename_tag(&uid(user), &old, new).map(drop),
            Err(_) => Ok(()),
        },
        Op::Drag { user, url, tag } => match (canonicalize_url(url), normalize_tag(tag)) {
            (Ok(r), Ok(t)) => service
                .drag(&uid(user), &NodeRef::Resource(r), &NodeRef::Tag(t))
                .map(drop),
            _ => Ok(()),
        },
        Op::Events { user, events: raw } => {
            service.record_events(events(&uid(user), raw)).map(drop)
        }
    };
}

/// Applies `op` straight to an in-memory store and click log.
pub fn apply_direct(store: &mut Folksonomy, log: &mut Vec<ClickEvent>, op: &Op, now: i64) {
    let uid = |u: &str| UserId::new(u).unwrap();
    match op {
        Op::Add {
            user,
            url,
            title,
            tags,
        } => {
            let _ = store.add_annotation(&uid(user), url, title, tags, now);
        }
        Op::Remove { user, url } => {
            if let Ok(r) = canonicalize_url(url) {
                store.remove_resource(&uid(user), &r);
            }
        }
        Op::SetTags { user, url, tags } => {
            if let Ok(r) = canonicalize_url(url) {
                let _ = store.set_tags(&uid(user), &r, tags, now);
            }
        }
        Op::SetTitle { user, url, title } => {
            if let Ok(r) = canonicalize_url(url) {
                let _ = store.set_title(&uid(user), &r, title);
            }
        }
        Op::Rename { user, old, new } => {
            if let Ok(old) = normalize_tag(old) {
                let _ = store.rename_tag(&uid(user), &old, new, now);
            }
        }
        Op::Drag { user, url, tag } => {
            if let (Ok(r), Ok(t)) = (canonicalize_url(url), normalize_tag(tag)) {
                let _ = apply_drag(
                    store,
                    &uid(user),
                    &NodeRef::Resource(r),
                    &NodeRef::Tag(t),
                    now,
                );
            }
        }
        Op::Events { user, events: raw } => log.extend(events(&uid(user), raw)),
    }
}
