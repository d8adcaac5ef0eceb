//! Per-group modes of raw grades and the improvement recommendations
//! derived from them.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grouping::GroupAssignment;
use crate::model::{EvaluationRecord, Scale};

/// Whether `criterion` names the "overall performance" pseudo-criterion,
/// which is reported but never gets a recommendation.
pub fn is_overall(criterion: &str) -> bool {
    let c = criterion.trim();
    c.eq_ignore_ascii_case("overall") || c.eq_ignore_ascii_case("overall performance")
}

/// Compares ids so that embedded numbers sort numerically (`Cr2 < Cr10`).
pub fn natural_cmp(a: &str, b: &str) -> Ordering {
    fn chunks(s: &str) -> Vec<(bool, &str)> {
        let mut out = Vec::new();
        let mut start = 0;
        let bytes = s.as_bytes();
        for i in 1..=bytes.len() {
            if i == bytes.len() || bytes[i].is_ascii_digit() != bytes[start].is_ascii_digit() {
                out.push((bytes[start].is_ascii_digit(), &s[start..i]));
                start = i;
            }
        }
        out
    }
    let (ca, cb) = (chunks(a), chunks(b));
    for (x, y) in ca.iter().zip(&cb) {
        let ord = match (x, y) {
            ((true, nx), (true, ny)) => {
                let (tx, ty) = (nx.trim_start_matches('0'), ny.trim_start_matches('0'));
                tx.len().cmp(&ty.len()).then_with(|| tx.cmp(ty))
            }
            ((_, sx), (_, sy)) => sx.cmp(sy),
        };
        if ord != Ordering::Equal {
            return ord;
        }
    }
    ca.len().cmp(&cb.len()).then_with(|| a.cmp(b))
}

/// Most frequent value; ties go to the lowest. `None` for an empty input.
pub fn mode(grades: impl IntoIterator<Item = i64>) -> Option<i64> {
    let mut tally: BTreeMap<i64, usize> = BTreeMap::new();
    for g in grades {
        *tally.entry(g).or_default() += 1;
    }
    // BTreeMap iterates ascending, and max_by_key keeps the last maximum,
    // so iterate in reverse to keep the lowest grade on ties.
    tally
        .into_iter()
        .rev()
        .max_by_key(|&(_, count)| count)
        .map(|(grade, _)| grade)
}

/// Mode of the grades per (group, criterion). Pairs with no observation
/// are absent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupModeTable {
    groups: Vec<String>,
    criteria: Vec<String>,
    modes: BTreeMap<String, BTreeMap<String, i64>>,
}

impl GroupModeTable {
    /// Builds a table from explicit entries. Criteria are kept in natural
    /// order; groups in the given order.
    pub fn new(
        groups: Vec<String>,
        entries: impl IntoIterator<Item = (String, String, i64)>,
    ) -> Self {
        let mut modes: BTreeMap<String, BTreeMap<String, i64>> = BTreeMap::new();
        for (group, criterion, grade) in entries {
            modes.entry(group).or_default().insert(criterion, grade);
        }
        let mut criteria: Vec<String> = modes
            .values()
            .flat_map(|m| m.keys().cloned())
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect();
        criteria.sort_by(|a, b| {
            is_overall(a)
                .cmp(&is_overall(b))
                .then_with(|| natural_cmp(a, b))
        });
        GroupModeTable {
            groups,
            criteria,
            modes,
        }
    }

    pub fn groups(&self) -> &[String] {
        &self.groups
    }

    /// Criteria in natural order, the overall pseudo-criterion last.
    pub fn criteria(&self) -> &[String] {
        &self.criteria
    }

    pub fn mode(&self, group: &str, criterion: &str) -> Option<i64> {
        self.modes
            .get(group)
            .and_then(|m| m.get(criterion))
            .copied()
    }

    pub fn validate(&self, scale: &Scale) -> Result<()> {
        for (group, row) in &self.modes {
            for (criterion, &grade) in row {
                if !(scale.min_grade..=scale.max_grade).contains(&grade) {
                    return Err(Error::format(
                        grade.to_string(),
                        format!(
                            "mode for group `{group}`, criterion `{criterion}` outside the scale"
                        ),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Mode of every grade any evaluator gave any alternative of a group, per
/// criterion.
pub fn group_mode_table(
    records: &[EvaluationRecord],
    groups: &GroupAssignment,
    scale: &Scale,
) -> Result<GroupModeTable> {
    let group_of: HashMap<&str, &str> = groups
        .groups
        .iter()
        .flat_map(|(label, members)| members.iter().map(move |m| (m.as_str(), label.as_str())))
        .collect();
    let mut tallies: BTreeMap<&str, BTreeMap<&str, Vec<i64>>> = BTreeMap::new();
    for r in records {
        let group = group_of
            .get(r.alternative.as_str())
            .ok_or_else(|| Error::Ungrouped(r.alternative.clone()))?;
        let grade = r
            .grade
            .whole()
            .filter(|g| (scale.min_grade..=scale.max_grade).contains(g))
            .ok_or_else(|| Error::format(r.grade.to_string(), "grade outside the scale"))?;
        tallies
            .entry(group)
            .or_default()
            .entry(r.criterion.as_str())
            .or_default()
            .push(grade);
    }
    for label in &groups.ranking {
        if !tallies.contains_key(label.as_str()) {
            return Err(Error::EmptyGroup(label.clone()));
        }
    }
    let entries: Vec<(String, String, i64)> = tallies
        .into_iter()
        .flat_map(|(group, per_criterion)| {
            per_criterion
                .into_iter()
                .filter_map(move |(criterion, grades)| {
                    mode(grades).map(|m| (group.to_string(), criterion.to_string(), m))
                })
        })
        .collect();
    Ok(GroupModeTable::new(groups.ranking.clone(), entries))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Action {
    Maintain,
    Improve,
    Priority,
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Action::Maintain => "Maintain",
            Action::Improve => "Improve",
            Action::Priority => "Priority",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Recommendation {
    pub group: String,
    pub criterion: String,
    pub action: Action,
    pub rationale: String,
}

/// One action per (group, criterion) with an observed mode:
///
/// * `Maintain` when the mode is the top of the scale;
/// * `Priority` for the top-ranked group when the mode is at or below the
///   scale midpoint, or for any other group when its mode is below that of
///   the next better group;
/// * `Improve` otherwise.
///
/// The overall-performance pseudo-criterion is skipped.
pub fn recommend(
    table: &GroupModeTable,
    ranking: &[String],
    scale: &Scale,
) -> Result<Vec<Recommendation>> {
    for g in ranking {
        if !table.groups().contains(g) {
            return Err(Error::MissingGroupModes(g.clone()));
        }
    }
    let mut out = Vec::new();
    for (rank, group) in ranking.iter().enumerate() {
        let better = rank.checked_sub(1).map(|r| ranking[r].as_str());
        for criterion in table.criteria().iter().filter(|c| !is_overall(c)) {
            let Some(m) = table.mode(group, criterion) else {
                continue;
            };
            let (action, rationale) = if m == scale.max_grade {
                (
                    Action::Maintain,
                    format!("mode {m} is the top of the scale"),
                )
            } else {
                match better {
                    None if scale.at_or_below_midpoint(m) => (
                        Action::Priority,
                        format!("top group with mode {m}, at or below the scale midpoint"),
                    ),
                    None => (
                        Action::Improve,
                        format!("mode {m} below the top of the scale"),
                    ),
                    Some(b) => match table.mode(b, criterion) {
                        Some(bm) if m < bm => (
                            Action::Priority,
                            format!("mode {m} below group {b}'s mode {bm}"),
                        ),
                        Some(bm) => (
                            Action::Improve,
                            format!("mode {m} matches or exceeds group {b}'s mode {bm}"),
                        ),
                        None => (
                            Action::Improve,
                            format!("mode {m}; group {b} has no observations"),
                        ),
                    },
                }
            };
            out.push(Recommendation {
                group: group.clone(),
                criterion: criterion.clone(),
                action,
                rationale,
            });
        }
    }
    Ok(out)
}
