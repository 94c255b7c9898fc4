//! Persistence and HTTP layer for tagmap.

pub mod http;
pub mod journal;
pub mod service;
pub mod state;
