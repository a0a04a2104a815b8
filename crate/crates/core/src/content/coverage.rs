use serde::{Deserialize, Serialize};

use super::ContentPack;
use crate::aha::AhaTag;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageRow {
    pub tag: AhaTag,
    /// 1 when the rules themselves emit the tag.
    pub intrinsic: u32,
    /// Cards carrying the tag.
    pub cards: u32,
}

impl CoverageRow {
    pub fn total(&self) -> u32 {
        self.intrinsic + self.cards
    }
}

/// How many sources can surface each aha-moment, one row per registry entry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub rows: Vec<CoverageRow>,
}

impl CoverageReport {
    pub fn count(&self, tag: AhaTag) -> u32 {
        self.rows[tag.index()].total()
    }

    pub fn uncovered(&self) -> impl Iterator<Item = AhaTag> + '_ {
        self.rows.iter().filter(|r| r.total() == 0).map(|r| r.tag)
    }

    pub fn is_complete(&self) -> bool {
        self.uncovered().next().is_none()
    }
}

pub fn coverage_report(pack: &ContentPack) -> CoverageReport {
    let rows = AhaTag::all()
        .map(|tag| CoverageRow {
            tag,
            intrinsic: u32::from(tag.is_intrinsic()),
            cards: pack.cards().filter(|c| c.aha.contains(&tag)).count() as u32,
        })
        .collect();
    CoverageReport { rows }
}
