//! Annotation triples and the store that owns them.
//!
//! Every mutating operation is split in two: a `plan_*` method that reads the
//! current state and produces the primitive [`Mutation`]s it would perform,
//! and a convenience wrapper that plans and applies in one step. Callers that
//! need write-ahead durability journal the planned mutations before applying
//! them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use url::Url;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FolksonomyError {
    #[error("tag is empty after normalization")]
    EmptyTag,
    #[error("no usable tags after normalization")]
    EmptyTagSet,
    #[error("invalid url {0:?}")]
    InvalidUrl(String),
    #[error("invalid user id {0:?}")]
    InvalidUser(String),
    #[error("{resource} is not in the collection of {user}")]
    NotInCollection { user: UserId, resource: ResourceId },
    #[error("user {user} has no tag {tag:?}")]
    UnknownTag { user: UserId, tag: TagLabel },
}

pub type Result<T, E = FolksonomyError> = std::result::Result<T, E>;

/// A normalized tag: trimmed, lowercased, inner whitespace collapsed.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct TagLabel(String);

impl TagLabel {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for TagLabel {
    type Error = FolksonomyError;

    fn try_from(raw: String) -> Result<Self> {
        normalize_tag(&raw)
    }
}

impl From<TagLabel> for String {
    fn from(tag: TagLabel) -> Self {
        tag.0
    }
}

impl fmt::Display for TagLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Canonical URL of a bookmarked resource.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ResourceId(String);

impl ResourceId {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Host component; always present for a canonical id.
    pub fn host(&self) -> String {
        Url::parse(&self.0)
            .ok()
            .and_then(|u| u.host_str().map(str::to_string))
            .unwrap_or_default()
    }
}

impl TryFrom<String> for ResourceId {
    type Error = FolksonomyError;

    fn try_from(raw: String) -> Result<Self> {
        canonicalize_url(&raw)
    }
}

impl From<ResourceId> for String {
    fn from(id: ResourceId) -> Self {
        id.0
    }
}

impl fmt::Display for ResourceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Opaque user identifier: non-empty, no whitespace.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct UserId(String);

impl UserId {
    pub fn new(raw: impl Into<String>) -> Result<Self> {
        let raw = raw.into();
        if raw.is_empty() || raw.chars().any(char::is_whitespace) {
            return Err(FolksonomyError::InvalidUser(raw));
        }
        Ok(UserId(raw))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for UserId {
    type Error = FolksonomyError;

    fn try_from(raw: String) -> Result<Self> {
        UserId::new(raw)
    }
}

impl From<UserId> for String {
    fn from(id: UserId) -> Self {
        id.0
    }
}

impl fmt::Display for UserId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// One annotation: `user` tagged `resource` with `tag` at `created_at`
/// (seconds since the Unix epoch).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Triple {
    pub user: UserId,
    pub tag: TagLabel,
    pub resource: ResourceId,
    pub created_at: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceMeta {
    pub resource: ResourceId,
    pub titles: BTreeMap<UserId, String>,
    pub favicon_url: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "scope", content = "user", rename_all = "snake_case")]
pub enum PopularityScope {
    Personal(UserId),
    Global,
}

/// Primitive state change. Higher-level operations decompose into these.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mutation {
    AddTriple(Triple),
    RemoveTriple {
        user: UserId,
        tag: TagLabel,
        resource: ResourceId,
    },
    SetTitle {
        user: UserId,
        resource: ResourceId,
        title: String,
    },
}

/// The mutations an operation would perform, plus its return value.
#[derive(Debug, Clone, PartialEq)]
pub struct Plan<T> {
    pub mutations: Vec<Mutation>,
    pub output: T,
}

impl<T> Plan<T> {
    fn new(mutations: Vec<Mutation>, output: T) -> Self {
        Plan { mutations, output }
    }
}

pub fn normalize_tag(raw: &str) -> Result<TagLabel> {
    let label = raw
        .split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ");
    if label.is_empty() {
        return Err(FolksonomyError::EmptyTag);
    }
    Ok(TagLabel(label))
}

/// Canonical form of a web address. Only `http` and `https` are accepted; a
/// bare host such as `engadget.com` is read as `http://engadget.com/`.
pub fn canonicalize_url(raw: &str) -> Result<ResourceId> {
    let invalid = || FolksonomyError::InvalidUrl(raw.to_string());
    let trimmed = raw.trim();
    if trimmed.is_empty() || trimmed.chars().any(char::is_whitespace) {
        return Err(invalid());
    }
    let mut parsed = match Url::parse(trimmed) {
        Ok(u) => u,
        Err(url::ParseError::RelativeUrlWithoutBase) => {
            Url::parse(&format!("http://{trimmed}")).map_err(|_| invalid())?
        }
        Err(_) => return Err(invalid()),
    };
    if !matches!(parsed.scheme(), "http" | "https") {
        return Err(invalid());
    }
    match parsed.host_str() {
        Some(host) if !host.is_empty() && host.contains(|c: char| c.is_alphanumeric()) => {}
        _ => return Err(invalid()),
    }
    parsed.set_fragment(None);
    Ok(ResourceId(parsed.into()))
}

fn normalize_tag_set<S: AsRef<str>>(tags: &[S]) -> Result<Vec<TagLabel>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for raw in tags {
        if let Ok(label) = normalize_tag(raw.as_ref()) {
            if seen.insert(label.clone()) {
                out.push(label);
            }
        }
    }
    if out.is_empty() {
        return Err(FolksonomyError::EmptyTagSet);
    }
    Ok(out)
}

type TripleKey = (UserId, TagLabel, ResourceId);

/// In-memory folksonomy: the triple set plus the indexes every query needs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Folksonomy {
    triples: BTreeMap<TripleKey, i64>,
    by_tag: BTreeMap<TagLabel, BTreeSet<(UserId, ResourceId)>>,
    by_resource: BTreeMap<ResourceId, BTreeSet<(UserId, TagLabel)>>,
    by_user: BTreeMap<UserId, BTreeMap<ResourceId, BTreeSet<TagLabel>>>,
    titles: BTreeMap<ResourceId, BTreeMap<UserId, String>>,
    clocks: BTreeMap<UserId, i64>,
}

/// Serializable image of a [`Folksonomy`], used for snapshots.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StoreImage {
    pub triples: Vec<Triple>,
    pub titles: Vec<TitleEntry>,
    pub clocks: BTreeMap<UserId, i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TitleEntry {
    pub user: UserId,
    pub resource: ResourceId,
    pub title: String,
}

impl Folksonomy {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn triples(&self) -> impl Iterator<Item = Triple> + '_ {
        self.triples
            .iter()
            .map(|((user, tag, resource), at)| Triple {
                user: user.clone(),
                tag: tag.clone(),
                resource: resource.clone(),
                created_at: *at,
            })
    }

    pub fn contains(&self, user: &UserId, tag: &TagLabel, resource: &ResourceId) -> bool {
        self.triples
            .contains_key(&(user.clone(), tag.clone(), resource.clone()))
    }

    pub fn users(&self) -> impl Iterator<Item = &UserId> {
        self.by_user.keys()
    }

    pub fn tags(&self) -> impl Iterator<Item = &TagLabel> {
        self.by_tag.keys()
    }

    pub fn resources(&self) -> impl Iterator<Item = &ResourceId> {
        self.by_resource.keys()
    }

    /// The user's resources and the tags they put on each.
    pub fn collection(&self, user: &UserId) -> Option<&BTreeMap<ResourceId, BTreeSet<TagLabel>>> {
        self.by_user.get(user)
    }

    pub fn has_resource(&self, user: &UserId, resource: &ResourceId) -> bool {
        self.by_user
            .get(user)
            .is_some_and(|c| c.contains_key(resource))
    }

    pub fn has_tag(&self, user: &UserId, tag: &TagLabel) -> bool {
        self.by_tag
            .get(tag)
            .and_then(|pairs| pairs.range((user.clone(), min_resource())..).next())
            .is_some_and(|(u, _)| u == user)
    }

    pub fn user_tags_on(&self, user: &UserId, resource: &ResourceId) -> BTreeSet<TagLabel> {
        self.by_user
            .get(user)
            .and_then(|c| c.get(resource))
            .cloned()
            .unwrap_or_default()
    }

    /// All `(user, resource)` pairs annotated with `tag`.
    pub fn annotations_with_tag(
        &self,
        tag: &TagLabel,
    ) -> impl Iterator<Item = &(UserId, ResourceId)> {
        self.by_tag.get(tag).into_iter().flatten()
    }

    /// All `(user, tag)` pairs annotating `resource`.
    pub fn annotations_on(
        &self,
        resource: &ResourceId,
    ) -> impl Iterator<Item = &(UserId, TagLabel)> {
        self.by_resource.get(resource).into_iter().flatten()
    }

    /// Distinct resources carrying `tag`, across all users.
    pub fn resources_with_tag(&self, tag: &TagLabel) -> BTreeSet<&ResourceId> {
        self.annotations_with_tag(tag).map(|(_, r)| r).collect()
    }

    /// Distinct tags on `resource`, across all users.
    pub fn tags_on(&self, resource: &ResourceId) -> BTreeSet<&TagLabel> {
        self.annotations_on(resource).map(|(_, t)| t).collect()
    }

    /// Number of distinct users who annotated `resource`.
    pub fn resource_popularity(&self, resource: &ResourceId) -> usize {
        self.annotations_on(resource)
            .map(|(u, _)| u)
            .collect::<BTreeSet<_>>()
            .len()
    }

    pub fn title(&self, user: &UserId, resource: &ResourceId) -> Option<&str> {
        self.titles.get(resource)?.get(user).map(String::as_str)
    }

    pub fn resource_meta(&self, resource: &ResourceId) -> Option<ResourceMeta> {
        if !self.by_resource.contains_key(resource) {
            return None;
        }
        Some(ResourceMeta {
            resource: resource.clone(),
            titles: self.titles.get(resource).cloned().unwrap_or_default(),
            favicon_url: None,
        })
    }

    /// Popularity of every tag in `scope`.
    ///
    /// Personal: number of the user's resources bearing the tag. Global:
    /// number of distinct `(user, resource)` pairs annotated with the tag.
    pub fn tag_counts(&self, scope: &PopularityScope) -> BTreeMap<TagLabel, usize> {
        let mut counts = BTreeMap::new();
        match scope {
            PopularityScope::Personal(user) => {
                for tags in self.by_user.get(user).into_iter().flat_map(|c| c.values()) {
                    for tag in tags {
                        *counts.entry(tag.clone()).or_insert(0) += 1;
                    }
                }
            }
            PopularityScope::Global => {
                for (tag, pairs) in &self.by_tag {
                    counts.insert(tag.clone(), pairs.len());
                }
            }
        }
        counts
    }

    /// List-mode content: resources carrying all (`conjunctive`) or any of
    /// `tags`, heaviest first, ties by URL.
    ///
    /// Personal weight is the number of matched tags; global weight is the
    /// number of distinct users who annotated the resource.
    pub fn resources_for_tags(
        &self,
        scope: &PopularityScope,
        tags: &BTreeSet<TagLabel>,
        conjunctive: bool,
    ) -> Vec<(ResourceId, usize)> {
        if tags.is_empty() {
            return Vec::new();
        }
        let mut out: Vec<(ResourceId, usize)> = match scope {
            PopularityScope::Personal(user) => self
                .by_user
                .get(user)
                .into_iter()
                .flatten()
                .filter_map(|(resource, own)| {
                    let matched = tags.iter().filter(|t| own.contains(*t)).count();
                    let keep = if conjunctive {
                        matched == tags.len()
                    } else {
                        matched > 0
                    };
                    keep.then(|| (resource.clone(), matched))
                })
                .collect(),
            PopularityScope::Global => {
                let candidates: BTreeSet<&ResourceId> = tags
                    .iter()
                    .flat_map(|t| self.annotations_with_tag(t).map(|(_, r)| r))
                    .collect();
                candidates
                    .into_iter()
                    .filter(|r| {
                        !conjunctive || {
                            let present = self.tags_on(r);
                            tags.iter().all(|t| present.contains(t))
                        }
                    })
                    .map(|r| (r.clone(), self.resource_popularity(r)))
                    .collect()
            }
        };
        out.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        out
    }

    fn stamp(&self, user: &UserId, now: i64) -> i64 {
        self.clocks.get(user).map_or(now, |last| now.max(*last))
    }

    pub fn plan_add_annotation<S: AsRef<str>>(
        &self,
        user: &UserId,
        url: &str,
        title: &str,
        tags: &[S],
        now: i64,
    ) -> Result<Plan<Vec<Triple>>> {
        let resource = canonicalize_url(url)?;
        let labels = normalize_tag_set(tags)?;
        let created_at = self.stamp(user, now);
        let created: Vec<Triple> = labels
            .into_iter()
            .filter(|tag| !self.contains(user, tag, &resource))
            .map(|tag| Triple {
                user: user.clone(),
                tag,
                resource: resource.clone(),
                created_at,
            })
            .collect();
        let mut mutations: Vec<Mutation> =
            created.iter().cloned().map(Mutation::AddTriple).collect();
        let title = title.trim();
        if !title.is_empty() && self.title(user, &resource) != Some(title) {
            mutations.push(Mutation::SetTitle {
                user: user.clone(),
                resource,
                title: title.to_string(),
            });
        }
        Ok(Plan::new(mutations, created))
    }

    /// Adds one triple per distinct normalized tag and records the user's
    /// title. Returns only the triples that were not already present.
    pub fn add_annotation<S: AsRef<str>>(
        &mut self,
        user: &UserId,
        url: &str,
        title: &str,
        tags: &[S],
        now: i64,
    ) -> Result<Vec<Triple>> {
        let plan = self.plan_add_annotation(user, url, title, tags, now)?;
        Ok(self.commit(plan))
    }

    pub fn plan_remove_resource(&self, user: &UserId, resource: &ResourceId) -> Plan<usize> {
        let mutations: Vec<Mutation> = self
            .user_tags_on(user, resource)
            .into_iter()
            .map(|tag| Mutation::RemoveTriple {
                user: user.clone(),
                tag,
                resource: resource.clone(),
            })
            .collect();
        let n = mutations.len();
        Plan::new(mutations, n)
    }

    pub fn remove_resource(&mut self, user: &UserId, resource: &ResourceId) -> usize {
        let plan = self.plan_remove_resource(user, resource);
        self.commit(plan)
    }

    fn require_owned(&self, user: &UserId, resource: &ResourceId) -> Result<()> {
        if self.has_resource(user, resource) {
            Ok(())
        } else {
            Err(FolksonomyError::NotInCollection {
                user: user.clone(),
                resource: resource.clone(),
            })
        }
    }

    /// Replaces the user's tags on `resource`. Returns `(added, removed)`,
    /// each sorted.
    pub fn plan_set_tags<S: AsRef<str>>(
        &self,
        user: &UserId,
        resource: &ResourceId,
        tags: &[S],
        now: i64,
    ) -> Result<Plan<(Vec<TagLabel>, Vec<TagLabel>)>> {
        self.require_owned(user, resource)?;
        let wanted: BTreeSet<TagLabel> = normalize_tag_set(tags)?.into_iter().collect();
        let current = self.user_tags_on(user, resource);
        let added: Vec<TagLabel> = wanted.difference(&current).cloned().collect();
        let removed: Vec<TagLabel> = current.difference(&wanted).cloned().collect();
        let created_at = self.stamp(user, now);
        // Adds go first so the resource never drops out of the collection
        // mid-plan, which would discard the user's title.
        let mut mutations: Vec<Mutation> = added
            .iter()
            .map(|tag| {
                Mutation::AddTriple(Triple {
                    user: user.clone(),
                    tag: tag.clone(),
                    resource: resource.clone(),
                    created_at,
                })
            })
            .collect();
        mutations.extend(removed.iter().map(|tag| Mutation::RemoveTriple {
            user: user.clone(),
            tag: tag.clone(),
            resource: resource.clone(),
        }));
        Ok(Plan::new(mutations, (added, removed)))
    }

    pub fn set_tags<S: AsRef<str>>(
        &mut self,
        user: &UserId,
        resource: &ResourceId,
        tags: &[S],
        now: i64,
    ) -> Result<(Vec<TagLabel>, Vec<TagLabel>)> {
        let plan = self.plan_set_tags(user, resource, tags, now)?;
        Ok(self.commit(plan))
    }

    pub fn plan_set_title(
        &self,
        user: &UserId,
        resource: &ResourceId,
        title: &str,
    ) -> Result<Plan<()>> {
        self.require_owned(user, resource)?;
        let mutation = Mutation::SetTitle {
            user: user.clone(),
            resource: resource.clone(),
            title: title.to_string(),
        };
        Ok(Plan::new(vec![mutation], ()))
    }

    pub fn set_title(&mut self, user: &UserId, resource: &ResourceId, title: &str) -> Result<()> {
        let plan = self.plan_set_title(user, resource, title)?;
        self.commit(plan);
        Ok(())
    }

    /// Rewrites every `(user, old, r)` to `(user, new, r)`, collapsing into
    /// an existing `(user, new, r)` where present. Returns the number of
    /// triples rewritten.
    pub fn plan_rename_tag(
        &self,
        user: &UserId,
        old: &TagLabel,
        new: &str,
        now: i64,
    ) -> Result<Plan<usize>> {
        let new = normalize_tag(new)?;
        if !self.has_tag(user, old) {
            return Err(FolksonomyError::UnknownTag {
                user: user.clone(),
                tag: old.clone(),
            });
        }
        if *old == new {
            return Ok(Plan::new(Vec::new(), 0));
        }
        let created_at = self.stamp(user, now);
        let affected: Vec<&ResourceId> = self
            .annotations_with_tag(old)
            .filter(|(u, _)| u == user)
            .map(|(_, r)| r)
            .collect();
        let mut mutations = Vec::with_capacity(affected.len() * 2);
        for resource in &affected {
            if !self.contains(user, &new, resource) {
                mutations.push(Mutation::AddTriple(Triple {
                    user: user.clone(),
                    tag: new.clone(),
                    resource: (*resource).clone(),
                    created_at,
                }));
            }
            mutations.push(Mutation::RemoveTriple {
                user: user.clone(),
                tag: old.clone(),
                resource: (*resource).clone(),
            });
        }
        Ok(Plan::new(mutations, affected.len()))
    }

    pub fn rename_tag(
        &mut self,
        user: &UserId,
        old: &TagLabel,
        new: &str,
        now: i64,
    ) -> Result<usize> {
        let plan = self.plan_rename_tag(user, old, new, now)?;
        Ok(self.commit(plan))
    }

    /// Applies a plan's mutations and hands back its output.
    pub fn commit<T>(&mut self, plan: Plan<T>) -> T {
        for m in &plan.mutations {
            self.apply(m);
        }
        plan.output
    }

    /// Applies one primitive mutation. Returns whether state changed.
    ///
    /// Adding a present triple, removing an absent one, and titling a
    /// resource outside the user's collection are no-ops. Removing a user's
    /// last triple on a resource also drops their title for it.
    pub fn apply(&mut self, mutation: &Mutation) -> bool {
        match mutation {
            Mutation::AddTriple(t) => self.insert(t),
            Mutation::RemoveTriple {
                user,
                tag,
                resource,
            } => self.delete(user, tag, resource),
            Mutation::SetTitle {
                user,
                resource,
                title,
            } => {
                if !self.has_resource(user, resource) {
                    return false;
                }
                let slot = self
                    .titles
                    .entry(resource.clone())
                    .or_default()
                    .entry(user.clone())
                    .or_default();
                if slot == title {
                    return false;
                }
                *slot = title.clone();
                true
            }
        }
    }

    fn insert(&mut self, t: &Triple) -> bool {
        let key = (t.user.clone(), t.tag.clone(), t.resource.clone());
        if self.triples.contains_key(&key) {
            return false;
        }
        self.triples.insert(key, t.created_at);
        self.by_tag
            .entry(t.tag.clone())
            .or_default()
            .insert((t.user.clone(), t.resource.clone()));
        self.by_resource
            .entry(t.resource.clone())
            .or_default()
            .insert((t.user.clone(), t.tag.clone()));
        self.by_user
            .entry(t.user.clone())
            .or_default()
            .entry(t.resource.clone())
            .or_default()
            .insert(t.tag.clone());
        let clock = self.clocks.entry(t.user.clone()).or_insert(t.created_at);
        *clock = (*clock).max(t.created_at);
        true
    }

    fn delete(&mut self, user: &UserId, tag: &TagLabel, resource: &ResourceId) -> bool {
        let key = (user.clone(), tag.clone(), resource.clone());
        if self.triples.remove(&key).is_none() {
            return false;
        }
        remove_nested(&mut self.by_tag, tag, &(user.clone(), resource.clone()));
        remove_nested(
            &mut self.by_resource,
            resource,
            &(user.clone(), tag.clone()),
        );
        let collection = self.by_user.get_mut(user).expect("indexed user");
        let tags = collection.get_mut(resource).expect("indexed resource");
        tags.remove(tag);
        if tags.is_empty() {
            collection.remove(resource);
            if let Some(titles) = self.titles.get_mut(resource) {
                titles.remove(user);
                if titles.is_empty() {
                    self.titles.remove(resource);
                }
            }
        }
        if collection.is_empty() {
            self.by_user.remove(user);
        }
        true
    }

    pub fn export(&self) -> StoreImage {
        let titles = self
            .titles
            .iter()
            .flat_map(|(resource, by_user)| {
                by_user.iter().map(|(user, title)| TitleEntry {
                    user: user.clone(),
                    resource: resource.clone(),
                    title: title.clone(),
                })
            })
            .collect();
        StoreImage {
            triples: self.triples().collect(),
            titles,
            clocks: self.clocks.clone(),
        }
    }

    pub fn import(image: StoreImage) -> Self {
        let mut store = Folksonomy::new();
        for t in &image.triples {
            store.insert(t);
        }
        for entry in image.titles {
            store.apply(&Mutation::SetTitle {
                user: entry.user,
                resource: entry.resource,
                title: entry.title,
            });
        }
        store.clocks = image.clocks;
        store
    }
}

fn remove_nested<K: Ord, V: Ord>(map: &mut BTreeMap<K, BTreeSet<V>>, key: &K, value: &V) {
    if let Some(set) = map.get_mut(key) {
        set.remove(value);
        if set.is_empty() {
            map.remove(key);
        }
    }
}

fn min_resource() -> ResourceId {
    ResourceId(String::new())
}
