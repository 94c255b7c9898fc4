//! Contextual maps: bounded bipartite tag/resource graphs around a selection.
//!
//! A map is grown ring by ring from its centers. Each frontier node admits
//! its most popular unvisited neighbours (at most `max_neighbors`), until
//! `depth` rings have been expanded or the graph holds `max_nodes` nodes.
//! Edges are every tag/resource incidence between admitted nodes.
//!
//! In the personal view only the viewer's own triples are walked. The social
//! view first builds the personal map and then keeps growing it over every
//! user's triples within the same caps, so a node's fan-out counts across
//! both passes. Each node carries a locality flag telling whether it belongs
//! to the viewer's own collection.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::folksonomy::{Folksonomy, FolksonomyError, Plan, ResourceId, TagLabel, UserId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ContextError {
    #[error("at least one center is required")]
    NoCenters,
    #[error("center {0:?} has no annotations in this view")]
    UnknownCenter(NodeRef),
    #[error("invalid filter: {0}")]
    InvalidFilter(String),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "id", rename_all = "snake_case")]
pub enum NodeRef {
    Tag(TagLabel),
    Resource(ResourceId),
}

impl NodeRef {
    pub fn is_tag(&self) -> bool {
        matches!(self, NodeRef::Tag(_))
    }

    pub fn is_resource(&self) -> bool {
        matches!(self, NodeRef::Resource(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViewMode {
    Personal,
    Social,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterParams {
    /// Expansion rings around the centers.
    pub depth: usize,
    /// Fan-out cap per frontier node.
    pub max_neighbors: usize,
    /// Cap on the whole graph, centers included.
    pub max_nodes: usize,
    /// Extra tags seeded next to the centers.
    #[serde(default)]
    pub extra_tags: BTreeSet<TagLabel>,
}

impl Default for FilterParams {
    fn default() -> Self {
        FilterParams {
            depth: 2,
            max_neighbors: 10,
            max_nodes: 60,
            extra_tags: BTreeSet::new(),
        }
    }
}

impl FilterParams {
    pub fn validate(&self) -> Result<(), ContextError> {
        for (name, value) in [
            ("depth", self.depth),
            ("max_neighbors", self.max_neighbors),
            ("max_nodes", self.max_nodes),
        ] {
            if value == 0 {
                return Err(ContextError::InvalidFilter(format!(
                    "{name} must be at least 1"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Locality {
    Local,
    Global,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextNode {
    #[serde(flatten)]
    pub node: NodeRef,
    pub locality: Locality,
    pub weight: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub title: Option<String>,
    pub is_center: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextGraph {
    pub centers: Vec<NodeRef>,
    pub nodes: Vec<ContextNode>,
    /// `(tag node index, resource node index)` pairs into `nodes`.
    pub edges: Vec<(usize, usize)>,
}

impl ContextGraph {
    pub fn index_of(&self, node: &NodeRef) -> Option<usize> {
        self.nodes.iter().position(|n| n.node == *node)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum NodeAction {
    EditTitle,
    ChangeTags,
    Remove,
    AddToCollection,
    RenameTag,
    CenterHere,
    OpenUrl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DragEffect {
    Tagged,
    Unsupported,
}

/// The triples visible in one view, seen as a bipartite graph.
struct ActiveSet<'a> {
    store: &'a Folksonomy,
    viewer: &'a UserId,
    view: ViewMode,
}

impl ActiveSet<'_> {
    fn visible(&self, user: &UserId) -> bool {
        self.view == ViewMode::Social || user == self.viewer
    }

    fn neighbors(&self, node: &NodeRef) -> BTreeSet<NodeRef> {
        match node {
            NodeRef::Tag(tag) => self
                .store
                .annotations_with_tag(tag)
                .filter(|(u, _)| self.visible(u))
                .map(|(_, r)| NodeRef::Resource(r.clone()))
                .collect(),
            NodeRef::Resource(resource) => self
                .store
                .annotations_on(resource)
                .filter(|(u, _)| self.visible(u))
                .map(|(_, t)| NodeRef::Tag(t.clone()))
                .collect(),
        }
    }

    /// Resources: distinct annotating users. Tags: distinct
    /// `(user, resource)` pairs.
    fn weight(&self, node: &NodeRef) -> usize {
        match node {
            NodeRef::Tag(tag) => self
                .store
                .annotations_with_tag(tag)
                .filter(|(u, _)| self.visible(u))
                .count(),
            NodeRef::Resource(resource) => self
                .store
                .annotations_on(resource)
                .filter(|(u, _)| self.visible(u))
                .map(|(u, _)| u)
                .collect::<BTreeSet<_>>()
                .len(),
        }
    }

    fn linked(&self, tag: &TagLabel, resource: &ResourceId) -> bool {
        match self.view {
            ViewMode::Personal => self.store.contains(self.viewer, tag, resource),
            ViewMode::Social => self.store.annotations_on(resource).any(|(_, t)| t == tag),
        }
    }

    fn title(&self, resource: &ResourceId) -> Option<String> {
        if let Some(own) = self.store.title(self.viewer, resource) {
            return Some(own.to_string());
        }
        if self.view == ViewMode::Personal {
            return None;
        }
        self.store
            .resource_meta(resource)
            .and_then(|meta| meta.titles.into_values().next())
    }
}

/// Nodes admitted so far, by ring, with how many neighbours each node has
/// admitted.
struct Expansion {
    admitted: Vec<NodeRef>,
    visited: BTreeSet<NodeRef>,
    rings: Vec<Vec<usize>>,
    fanout: Vec<usize>,
}

impl Expansion {
    fn seeded(centers: &[NodeRef]) -> Self {
        Expansion {
            admitted: centers.to_vec(),
            visited: centers.iter().cloned().collect(),
            rings: vec![(0..centers.len()).collect()],
            fanout: vec![0; centers.len()],
        }
    }

    fn admit(&mut self, node: NodeRef, ring: usize) {
        if self.rings.len() <= ring {
            self.rings.resize_with(ring + 1, Vec::new);
        }
        self.rings[ring].push(self.admitted.len());
        self.visited.insert(node.clone());
        self.admitted.push(node);
        self.fanout.push(0);
    }

    /// Extra tags join ring 0; then each ring's nodes, in admission order,
    /// admit their heaviest unvisited neighbours until a node has admitted
    /// `max_neighbors` in total, the graph is full, or `depth` rings exist.
    fn grow(mut self, active: &ActiveSet<'_>, filter: &FilterParams) -> Self {
        for tag in &filter.extra_tags {
            if self.admitted.len() >= filter.max_nodes {
                return self;
            }
            let seed = NodeRef::Tag(tag.clone());
            if !self.visited.contains(&seed) && active.weight(&seed) > 0 {
                self.admit(seed, 0);
            }
        }
        for ring in 0..filter.depth {
            let Some(frontier) = self.rings.get(ring).cloned() else {
                break;
            };
            for idx in frontier {
                let budget = filter.max_neighbors.saturating_sub(self.fanout[idx]);
                let mut candidates: Vec<(usize, NodeRef)> = active
                    .neighbors(&self.admitted[idx])
                    .into_iter()
                    .filter(|n| !self.visited.contains(n))
                    .map(|n| (active.weight(&n), n))
                    .collect();
                candidates.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(&b.1)));
                for (_, neighbor) in candidates.into_iter().take(budget) {
                    if self.admitted.len() >= filter.max_nodes {
                        return self;
                    }
                    self.admit(neighbor, ring + 1);
                    self.fanout[idx] += 1;
                }
            }
        }
        self
    }
}

fn locality(store: &Folksonomy, user: &UserId, node: &NodeRef) -> Locality {
    let owned = match node {
        NodeRef::Tag(tag) => store.has_tag(user, tag),
        NodeRef::Resource(resource) => store.has_resource(user, resource),
    };
    if owned {
        Locality::Local
    } else {
        Locality::Global
    }
}

pub fn build_context(
    store: &Folksonomy,
    user: &UserId,
    centers: &[NodeRef],
    view: ViewMode,
    filter: &FilterParams,
) -> Result<ContextGraph, ContextError> {
    filter.validate()?;
    let active = ActiveSet {
        store,
        viewer: user,
        view,
    };

    let mut center_set: Vec<NodeRef> = Vec::new();
    for center in centers {
        if !center_set.contains(center) {
            center_set.push(center.clone());
        }
    }
    if center_set.is_empty() {
        return Err(ContextError::NoCenters);
    }
    if let Some(unknown) = center_set.iter().find(|c| active.weight(c) == 0) {
        return Err(ContextError::UnknownCenter(unknown.clone()));
    }
    if center_set.len() > filter.max_nodes {
        return Err(ContextError::InvalidFilter(format!(
            "{} centers exceed max_nodes {}",
            center_set.len(),
            filter.max_nodes
        )));
    }

    // The social view is the personal map grown further over everyone's
    // triples, so it always contains the personal one.
    let seeded = Expansion::seeded(&center_set);
    let expansion = match view {
        ViewMode::Personal => seeded.grow(&active, filter),
        ViewMode::Social => {
            let personal = ActiveSet {
                view: ViewMode::Personal,
                ..active
            };
            seeded.grow(&personal, filter).grow(&active, filter)
        }
    };
    let admitted = expansion.admitted;

    let nodes: Vec<ContextNode> = admitted
        .iter()
        .map(|node| ContextNode {
            node: node.clone(),
            locality: locality(store, user, node),
            weight: active.weight(node),
            title: match node {
                NodeRef::Resource(r) => active.title(r),
                NodeRef::Tag(_) => None,
            },
            is_center: center_set.contains(node),
        })
        .collect();

    let mut edges = Vec::new();
    for (i, a) in admitted.iter().enumerate() {
        let NodeRef::Tag(tag) = a else { continue };
        for (j, b) in admitted.iter().enumerate() {
            if let NodeRef::Resource(resource) = b {
                if active.linked(tag, resource) {
                    edges.push((i, j));
                }
            }
        }
    }

    Ok(ContextGraph {
        centers: center_set,
        nodes,
        edges,
    })
}

/// Contextual menu for a node. Only nodes in the viewer's own collection
/// offer editing; foreign nodes must be added to the collection first.
pub fn node_actions(node: &ContextNode) -> Vec<NodeAction> {
    use NodeAction::*;
    match (&node.node, node.locality) {
        (NodeRef::Resource(_), Locality::Local) => {
            vec![OpenUrl, EditTitle, ChangeTags, Remove, CenterHere]
        }
        (NodeRef::Resource(_), Locality::Global) => vec![OpenUrl, AddToCollection, CenterHere],
        (NodeRef::Tag(_), Locality::Local) => vec![CenterHere, RenameTag, Remove],
        (NodeRef::Tag(_), Locality::Global) => vec![CenterHere, AddToCollection],
    }
}

/// Drag-and-drop shortcut: dropping a resource on a tag (or a tag on a
/// resource) tags that resource in the user's collection. A resource the
/// user does not own yet is added, borrowing another user's title.
pub fn plan_drag(
    store: &Folksonomy,
    user: &UserId,
    dragged: &NodeRef,
    target: &NodeRef,
    now: i64,
) -> Result<Plan<DragEffect>, FolksonomyError> {
    let (tag, resource) = match (dragged, target) {
        (NodeRef::Resource(r), NodeRef::Tag(t)) | (NodeRef::Tag(t), NodeRef::Resource(r)) => (t, r),
        _ => {
            return Ok(Plan {
                mutations: Vec::new(),
                output: DragEffect::Unsupported,
            })
        }
    };
    let title = if store.has_resource(user, resource) {
        String::new()
    } else {
        store
            .resource_meta(resource)
            .and_then(|meta| meta.titles.into_values().next())
            .unwrap_or_default()
    };
    let plan = store.plan_add_annotation(user, resource.as_str(), &title, &[tag.as_str()], now)?;
    Ok(Plan {
        mutations: plan.mutations,
        output: DragEffect::Tagged,
    })
}

pub fn apply_drag(
    store: &mut Folksonomy,
    user: &UserId,
    dragged: &NodeRef,
    target: &NodeRef,
    now: i64,
) -> Result<DragEffect, FolksonomyError> {
    let plan = plan_drag(store, user, dragged, target, now)?;
    Ok(store.commit(plan))
}
