//! The aha-moment vocabulary: learning objectives a game event can surface.
//!
//! Every tag names one row of a fixed registry. Tags are written as
//! `Group/Variable`, e.g. `Causes/Time` or `Architecture/Hard-to-repay`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AhaGroup {
    Causes,
    Incurrence,
    Consequences,
    ViciousCycle,
    Repayment,
    Architecture,
    TdManagement,
    Business,
}

impl AhaGroup {
    pub const ALL: [AhaGroup; 8] = [
        AhaGroup::Causes,
        AhaGroup::Incurrence,
        AhaGroup::Consequences,
        AhaGroup::ViciousCycle,
        AhaGroup::Repayment,
        AhaGroup::Architecture,
        AhaGroup::TdManagement,
        AhaGroup::Business,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AhaGroup::Causes => "Causes",
            AhaGroup::Incurrence => "Incurrence",
            AhaGroup::Consequences => "Consequences",
            AhaGroup::ViciousCycle => "ViciousCycle",
            AhaGroup::Repayment => "Repayment",
            AhaGroup::Architecture => "Architecture",
            AhaGroup::TdManagement => "TdManagement",
            AhaGroup::Business => "Business",
        }
    }

    fn parse(s: &str) -> Option<AhaGroup> {
        AhaGroup::ALL.into_iter().find(|g| g.name() == s)
    }
}

/// One registry row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AhaRow {
    pub group: AhaGroup,
    pub variable: &'static str,
    pub description: &'static str,
}

const fn row(group: AhaGroup, variable: &'static str, description: &'static str) -> AhaRow {
    AhaRow {
        group,
        variable,
        description,
    }
}

use AhaGroup::*;

/// The aha-moment table.
pub const REGISTRY: [AhaRow; 32] = [
    row(Causes, "Time", "Deadlines push teams into shortcuts."),
    row(Causes, "Budget", "Money constraints, such as licence fees, lead to debt."),
    row(Causes, "Business", "Shifting requirements or strategy leave debt behind."),
    row(Causes, "Management", "Poor planning and communication by management create debt."),
    row(Causes, "Personnel", "Too few, inexperienced, unmotivated or fast-changing staff create debt."),
    row(Causes, "Technology", "An outdated technology choice produces debt."),
    row(Causes, "Decisions", "Wrong calls, architectural ones especially, produce debt."),
    row(Causes, "Awareness", "Not knowing debt exists lets more of it accumulate."),
    row(Causes, "Chains", "One cause of debt sets off another."),
    row(Incurrence, "Conscious", "Debt is sometimes taken on deliberately."),
    row(Incurrence, "Unconscious", "Debt is sometimes taken on without noticing."),
    row(Consequences, "Time", "Debt costs time: overtime, slipped dates, slower development."),
    row(Consequences, "Budget", "Debt makes projects more expensive."),
    row(Consequences, "Business", "Debt hurts the business through missed requirements, lost customers or legal trouble."),
    row(Consequences, "Management", "Debt makes projects harder to steer and riskier."),
    row(Consequences, "Personnel", "Debt strains people: stress, resignations, onboarding effort."),
    row(Consequences, "Technology", "Debt shows up as bugs, poor maintainability and dead ends."),
    row(Consequences, "Chains", "One consequence of debt sets off another."),
    row(ViciousCycle, "Inner", "Existing debt invites more debt."),
    row(ViciousCycle, "Outer", "The effects of debt turn into causes of new debt."),
    row(Repayment, "Difficult", "Getting rid of debt is hard."),
    row(Repayment, "Time-consuming", "Getting rid of debt takes time."),
    row(Repayment, "Benefits", "Paying debt back makes later work easier."),
    row(Repayment, "Simplified", "Refactoring, outside experts and good communication ease repayment."),
    row(Architecture, "Critical", "Architectural debt does the most damage."),
    row(Architecture, "Hard-to-repay", "Architectural debt is the hardest to remove."),
    row(Architecture, "Prevents-TD", "Good architecture helps keep debt under control."),
    row(TdManagement, "Identifying-TD", "Debt has to be found before it can be fixed."),
    row(TdManagement, "Prioritizing-TD", "Deciding what to fix means ranking the debt."),
    row(TdManagement, "Ignoring-TD", "Fixing every piece of debt is not always worth it."),
    row(Business, "Invisible", "Debt cannot be seen directly, only through its symptoms."),
    row(Business, "Perspective", "From a business seat, causes and effects of debt are hard to tell apart."),
];

/// A validated reference to one registry row.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AhaTag(u8);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AhaParseError {
    #[error("malformed aha tag '{0}': expected Group/Variable")]
    Malformed(String),
    #[error("unknown aha group '{0}'")]
    UnknownGroup(String),
    #[error("unknown aha variable '{variable}' in group {group}")]
    UnknownVariable { group: String, variable: String },
}

impl AhaTag {
    pub const INCURRENCE_CONSCIOUS: AhaTag = AhaTag(9);
    pub const INCURRENCE_UNCONSCIOUS: AhaTag = AhaTag(10);
    pub const VICIOUS_INNER: AhaTag = AhaTag(18);
    pub const REPAYMENT_DIFFICULT: AhaTag = AhaTag(20);
    pub const REPAYMENT_TIME_CONSUMING: AhaTag = AhaTag(21);
    pub const REPAYMENT_BENEFITS: AhaTag = AhaTag(22);
    pub const ARCHITECTURE_CRITICAL: AhaTag = AhaTag(24);
    pub const ARCHITECTURE_HARD_TO_REPAY: AhaTag = AhaTag(25);
    pub const IDENTIFYING_TD: AhaTag = AhaTag(27);

    /// Tags the rules themselves emit, independent of any card.
    pub const INTRINSIC: [AhaTag; 8] = [
        AhaTag::INCURRENCE_CONSCIOUS,
        AhaTag::INCURRENCE_UNCONSCIOUS,
        AhaTag::REPAYMENT_DIFFICULT,
        AhaTag::REPAYMENT_TIME_CONSUMING,
        AhaTag::REPAYMENT_BENEFITS,
        AhaTag::ARCHITECTURE_CRITICAL,
        AhaTag::ARCHITECTURE_HARD_TO_REPAY,
        AhaTag::VICIOUS_INNER,
    ];

    pub fn all() -> impl Iterator<Item = AhaTag> {
        (0..REGISTRY.len() as u8).map(AhaTag)
    }

    pub fn lookup(group: AhaGroup, variable: &str) -> Option<AhaTag> {
        REGISTRY
            .iter()
            .position(|r| r.group == group && r.variable == variable)
            .map(|i| AhaTag(i as u8))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn row(self) -> &'static AhaRow {
        &REGISTRY[self.0 as usize]
    }

    pub fn group(self) -> AhaGroup {
        self.row().group
    }

    pub fn variable(self) -> &'static str {
        self.row().variable
    }

    pub fn is_intrinsic(self) -> bool {
        AhaTag::INTRINSIC.contains(&self)
    }
}

impl fmt::Display for AhaTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.group().name(), self.variable())
    }
}

impl fmt::Debug for AhaTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AhaTag({self})")
    }
}

impl FromStr for AhaTag {
    type Err = AhaParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (group, variable) = s
            .split_once('/')
            .ok_or_else(|| AhaParseError::Malformed(s.to_string()))?;
        let group_id =
            AhaGroup::parse(group).ok_or_else(|| AhaParseError::UnknownGroup(group.to_string()))?;
        AhaTag::lookup(group_id, variable).ok_or_else(|| AhaParseError::UnknownVariable {
            group: group.to_string(),
            variable: variable.to_string(),
        })
    }
}

impl Serialize for AhaTag {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for AhaTag {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
