//! Alphabetical tag clouds with font size linear in popularity.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::folksonomy::TagLabel;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CloudError {
    #[error("font sizes must be positive and finite with min <= max (got {min} .. {max})")]
    InvalidSizes { min: f64, max: f64 },
    #[error("max_tags must be at least 1")]
    NoTags,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CloudConfig {
    min_size: f64,
    max_size: f64,
    max_tags: usize,
}

impl CloudConfig {
    pub fn new(min_size: f64, max_size: f64, max_tags: usize) -> Result<Self, CloudError> {
        let valid = |x: f64| x.is_finite() && x > 0.0;
        if !valid(min_size) || !valid(max_size) || min_size > max_size {
            return Err(CloudError::InvalidSizes {
                min: min_size,
                max: max_size,
            });
        }
        if max_tags == 0 {
            return Err(CloudError::NoTags);
        }
        Ok(CloudConfig {
            min_size,
            max_size,
            max_tags,
        })
    }

    pub fn min_size(&self) -> f64 {
        self.min_size
    }

    pub fn max_size(&self) -> f64 {
        self.max_size
    }

    pub fn max_tags(&self) -> usize {
        self.max_tags
    }

    pub fn with_max_tags(self, max_tags: usize) -> Result<Self, CloudError> {
        CloudConfig::new(self.min_size, self.max_size, max_tags)
    }
}

impl Default for CloudConfig {
    fn default() -> Self {
        CloudConfig {
            min_size: 10.0,
            max_size: 32.0,
            max_tags: 60,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizedTag {
    pub label: TagLabel,
    pub count: usize,
    pub size: f64,
}

/// Keeps the `max_tags` most popular tags (ties go to the alphabetically
/// earlier label), sizes them linearly between the configured bounds over
/// the kept range, and returns them in alphabetical order.
///
/// Tags with a zero count are ignored.
pub fn build_cloud(counts: &BTreeMap<TagLabel, usize>, cfg: &CloudConfig) -> Vec<SizedTag> {
    let mut ranked: Vec<(&TagLabel, usize)> = counts
        .iter()
        .filter(|(_, c)| **c > 0)
        .map(|(t, c)| (t, *c))
        .collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    ranked.truncate(cfg.max_tags);

    let (Some(c_max), Some(c_min)) = (
        ranked.iter().map(|(_, c)| *c).max(),
        ranked.iter().map(|(_, c)| *c).min(),
    ) else {
        return Vec::new();
    };

    let span = cfg.max_size - cfg.min_size;
    let size_of = |count: usize| {
        if c_max == c_min {
            (cfg.min_size + cfg.max_size) / 2.0
        } else {
            let t = (count - c_min) as f64 / (c_max - c_min) as f64;
            (cfg.min_size + span * t).clamp(cfg.min_size, cfg.max_size)
        }
    };

    let mut cloud: Vec<SizedTag> = ranked
        .into_iter()
        .map(|(label, count)| SizedTag {
            label: label.clone(),
            count,
            size: size_of(count),
        })
        .collect();
    cloud.sort_by(|a, b| a.label.cmp(&b.label));
    cloud
}
