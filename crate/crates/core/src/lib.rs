//! Core model for a social bookmark manager.
//!
//! Users annotate web resources with free-form tags; every annotation is a
//! `(user, tag, resource)` triple. On top of the triple store this crate
//! provides the read models used by the interface: alphabetical tag clouds,
//! bounded tag/resource context graphs in personal or social view,
//! co-occurrence similarity and tag recommendation, and clickstream
//! session statistics for comparing list and visualization modes.

pub mod context;
pub mod folksonomy;
pub mod sessions;
pub mod similarity;
pub mod tagcloud;

pub use context::{
    apply_drag, build_context, node_actions, plan_drag, ContextError, ContextGraph, ContextNode,
    DragEffect, FilterParams, Locality, NodeAction, NodeRef, ViewMode,
};
pub use folksonomy::{
    canonicalize_url, normalize_tag, Folksonomy, FolksonomyError, Mutation, Plan, PopularityScope,
    ResourceId, ResourceMeta, StoreImage, TagLabel, TitleEntry, Triple, UserId,
};
pub use sessions::{
    classify_click, compute_stats, parse_event_log, render_report, sessionize, Action, ClickEvent,
    EventLogError, Mode, ModeStats, Session, SessionStats,
};
pub use similarity::{recommend_tags, related_tags, similar_resources, ScoredResource, ScoredTag};
pub use tagcloud::{build_cloud, CloudConfig, CloudError, SizedTag};
