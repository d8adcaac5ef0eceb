//! Credibility degrees of the assertion "alternative a is at least as good
//! as boundary b_p", pooled over every (evaluator, criterion) evaluation.
//!
//! Each evaluation contributes its weight to the numerator of level p when
//! its grade reaches that level's boundary, and always to the denominator.
//! There is no discordance or veto term, and pairs an evaluator skipped
//! contribute nothing at all.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{
    BoundaryProfile, CredibilityTable, CredibilityVector, Dataset, EvaluationRecord, Grade2x,
    WeightTable,
};

/// 1 when `grade` reaches `boundary`, else 0.
pub fn local_concordance(grade: Grade2x, boundary: Grade2x) -> u8 {
    u8::from(grade >= boundary)
}

/// Credibility vector of `alternative` from its evaluation records.
pub fn credibility_vector<'r>(
    alternative: &str,
    records: impl IntoIterator<Item = &'r EvaluationRecord>,
    weights: &WeightTable<'_>,
    boundaries: &BoundaryProfile,
) -> Result<CredibilityVector> {
    let levels = boundaries.level_count();
    let mut numerators = vec![0i128; levels];
    let mut denominator = 0i128;
    let mut seen = false;
    for record in records {
        seen = true;
        let weight = i128::from(weights.weight(&record.evaluator, &record.criterion).milli());
        denominator += weight;
        let floors = boundaries.levels_for(&record.criterion, &record.evaluator);
        for (num, &floor) in numerators.iter_mut().zip(floors) {
            *num += weight * i128::from(local_concordance(record.grade, floor));
        }
    }
    if !seen {
        return Err(Error::NoEvaluations(alternative.to_string()));
    }
    if denominator == 0 {
        return Err(Error::ZeroWeight(alternative.to_string()));
    }
    CredibilityVector::new(alternative, numerators, denominator)
}

/// Credibility vectors for every alternative of a validated dataset.
///
/// Below this many records the thread pool costs more than it saves.
const PARALLEL_MIN_RECORDS: usize = 20_000;

/// Alternatives are evaluated in parallel on large inputs; the result does
/// not depend on thread scheduling or record order.
pub fn credibility_table(dataset: &Dataset) -> Result<CredibilityTable> {
    let mut by_alternative: BTreeMap<&str, Vec<&EvaluationRecord>> = dataset
        .alternatives()
        .iter()
        .map(|a| (a.id.as_str(), Vec::new()))
        .collect();
    for record in dataset.records() {
        if let Some(list) = by_alternative.get_mut(record.alternative.as_str()) {
            list.push(record);
        }
    }
    let weights = dataset.weight_table();
    let boundaries = dataset.boundaries();
    let one = |(id, records): (&str, Vec<&EvaluationRecord>)| {
        credibility_vector(id, records, &weights, boundaries)
    };
    let vectors: Vec<CredibilityVector> = if dataset.records().len() < PARALLEL_MIN_RECORDS {
        by_alternative.into_iter().map(one).collect::<Result<_>>()?
    } else {
        by_alternative
            .into_par_iter()
            .map(one)
            .collect::<Result<_>>()?
    };
    CredibilityTable::from_vectors(boundaries.level_count(), vectors)
}
