//! Co-occurrence similarity and tag recommendation.
//!
//! Similarity is the set cosine `|A ∩ B| / sqrt(|A| |B|)` where a tag is
//! described by the set of resources carrying it and a resource by the set
//! of tags on it, pooled over all users.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::folksonomy::{Folksonomy, ResourceId, TagLabel, UserId};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredTag {
    pub label: TagLabel,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredResource {
    pub resource: ResourceId,
    pub score: f64,
}

pub fn set_cosine<T: Ord>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let shared = a.intersection(b).count();
    shared as f64 / ((a.len() * b.len()) as f64).sqrt()
}

fn top_k<K: Ord + Clone>(mut scored: Vec<(K, f64)>, k: usize) -> Vec<(K, f64)> {
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    scored.truncate(k);
    scored
}

/// Tags sharing resources with `tag`, most similar first.
pub fn related_tags(store: &Folksonomy, tag: &TagLabel, k: usize) -> Vec<ScoredTag> {
    let own = store.resources_with_tag(tag);
    let candidates: BTreeSet<&TagLabel> = own
        .iter()
        .flat_map(|r| store.tags_on(r))
        .filter(|t| *t != tag)
        .collect();
    let scored = candidates
        .into_iter()
        .map(|other| {
            (
                other.clone(),
                set_cosine(&own, &store.resources_with_tag(other)),
            )
        })
        .filter(|(_, s)| *s > 0.0)
        .collect();
    top_k(scored, k)
        .into_iter()
        .map(|(label, score)| ScoredTag { label, score })
        .collect()
}

/// Resources sharing tags with `resource`, most similar first.
pub fn similar_resources(
    store: &Folksonomy,
    resource: &ResourceId,
    k: usize,
) -> Vec<ScoredResource> {
    let own = store.tags_on(resource);
    let candidates: BTreeSet<&ResourceId> = own
        .iter()
        .flat_map(|t| store.resources_with_tag(t))
        .filter(|r| *r != resource)
        .collect();
    let scored = candidates
        .into_iter()
        .map(|other| (other.clone(), set_cosine(&own, &store.tags_on(other))))
        .filter(|(_, s)| *s > 0.0)
        .collect();
    top_k(scored, k)
        .into_iter()
        .map(|(resource, score)| ScoredResource { resource, score })
        .collect()
}

/// Tags on `resource` with the number of distinct users who applied each.
fn tag_support(store: &Folksonomy, resource: &ResourceId) -> BTreeMap<TagLabel, usize> {
    let mut support = BTreeMap::new();
    for (_, tag) in store.annotations_on(resource) {
        *support.entry(tag.clone()).or_insert(0) += 1;
    }
    support
}

fn shared_path_segments(a: &ResourceId, b: &ResourceId) -> usize {
    let segments = |r: &ResourceId| -> Vec<String> {
        url::Url::parse(r.as_str())
            .ok()
            .and_then(|u| {
                u.path_segments()
                    .map(|s| s.filter(|p| !p.is_empty()).map(str::to_string).collect())
            })
            .unwrap_or_default()
    };
    segments(a)
        .iter()
        .zip(segments(b).iter())
        .take_while(|(x, y)| x == y)
        .count()
}

/// Annotated resource on the same host that best stands in for an
/// unannotated `url`: longest shared path prefix, then most annotating
/// users, then smallest URL.
pub fn nearest_same_host(store: &Folksonomy, url: &ResourceId) -> Option<ResourceId> {
    let host = url.host();
    store
        .resources()
        .filter(|r| *r != url && r.host() == host)
        .map(|r| {
            (
                shared_path_segments(r, url),
                store.resource_popularity(r),
                r,
            )
        })
        .max_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)).then_with(|| b.2.cmp(a.2)))
        .map(|(_, _, r)| r.clone())
}

/// Tags to suggest when `user` bookmarks `url`.
///
/// Tags already on `url` are ranked by how many distinct users applied them,
/// skipping the ones `user` has already put there. A URL nobody has tagged
/// borrows the ranking of the closest annotated page on the same host; with
/// no such page the list is empty. Scores are the user counts.
pub fn recommend_tags(
    store: &Folksonomy,
    user: &UserId,
    url: &ResourceId,
    k: usize,
) -> Vec<ScoredTag> {
    let source = if store.annotations_on(url).next().is_some() {
        url.clone()
    } else {
        match nearest_same_host(store, url) {
            Some(r) => r,
            None => return Vec::new(),
        }
    };
    let own = store.user_tags_on(user, url);
    let scored = tag_support(store, &source)
        .into_iter()
        .filter(|(tag, _)| !own.contains(tag))
        .map(|(tag, n)| (tag, n as f64))
        .collect();
    top_k(scored, k)
        .into_iter()
        .map(|(label, score)| ScoredTag { label, score })
        .collect()
}
