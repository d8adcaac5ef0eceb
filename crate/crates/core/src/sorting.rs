//! Pessimistic ("more exigent") assignment of alternatives to categories.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{CredibilityTable, CredibilityVector, CutLevel};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    pub alternative: String,
    pub lambda: CutLevel,
    /// 1-based category index, 1 = best.
    pub category: usize,
}

/// Assigns the best category `C_p` whose floor is outranked with credibility
/// at least `lambda`; `C_k` when no floor is.
pub fn assign_pessimistic(
    sigma: &CredibilityVector,
    lambda: CutLevel,
    categories: usize,
) -> Result<Assignment> {
    if sigma.levels() + 1 != categories {
        return Err(Error::LevelMismatch {
            alternative: sigma.alternative().to_string(),
            expected: categories.saturating_sub(1),
            found: sigma.levels(),
        });
    }
    let category = (1..categories)
        .find(|&p| sigma.reaches(p, lambda))
        .unwrap_or(categories);
    Ok(Assignment {
        alternative: sigma.alternative().to_string(),
        lambda,
        category,
    })
}

/// Assignments for every alternative, in alternative id order.
pub fn sort_all(
    table: &CredibilityTable,
    lambda: CutLevel,
    categories: usize,
) -> Result<Vec<Assignment>> {
    table
        .iter()
        .map(|sigma| assign_pessimistic(sigma, lambda, categories))
        .collect()
}
