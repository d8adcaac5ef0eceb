//! Property checks shared by the property suite and the acceptance run.

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

use electre_tri_me::{
    assign_pessimistic, credibility_table, mode, validate_dataset, BoundaryProfile,
    CredibilityTable, CredibilityVector, CutLevel, DatasetParts, Grade2x, Weight,
};

use super::{big_sigmas, oracle_assign, oracle_credibility, oracle_mode};

pub fn table_of(parts: &DatasetParts) -> Result<CredibilityTable, TestCaseError> {
    let ds = validate_dataset(parts.clone()).map_err(|e| TestCaseError::fail(e.to_string()))?;
    credibility_table(&ds).map_err(|e| TestCaseError::fail(e.to_string()))
}

/// Credibility is bounded, non-decreasing in the level and equal to the
/// brute-force recomputation.
pub fn sigma_bounded_monotone(parts: &DatasetParts) -> Result<(), TestCaseError> {
    let table = table_of(parts)?;
    let oracle = oracle_credibility(parts);
    for v in table.iter() {
        let sig = big_sigmas(v);
        for s in &sig {
            prop_assert!(*s >= BigRational::from_integer(0.into()));
            prop_assert!(*s <= BigRational::from_integer(1.into()));
        }
        prop_assert!(sig.windows(2).all(|w| w[0] <= w[1]));
        let (num, den) = &oracle[v.alternative()];
        for (s, n) in sig.iter().zip(num) {
            prop_assert_eq!(s.clone(), BigRational::new(n.clone(), den.clone()));
        }
    }
    Ok(())
}

pub fn lambda_pair() -> impl Strategy<Value = (u32, u32)> {
    (1u32..=1000, 1u32..=1000).prop_map(|(a, b)| (a.min(b), a.max(b)))
}

/// A stricter cut-level never yields a better category.
pub fn category_monotone_in_lambda(
    (nums, den): &(Vec<i128>, i128),
    (lo, hi): (u32, u32),
) -> Result<(), TestCaseError> {
    let v = CredibilityVector::new("x", nums.clone(), *den).unwrap();
    let k = nums.len() + 1;
    let a = assign_pessimistic(&v, CutLevel::from_milli(lo).unwrap(), k).unwrap();
    let b = assign_pessimistic(&v, CutLevel::from_milli(hi).unwrap(), k).unwrap();
    prop_assert!(
        a.category <= b.category,
        "{} at {lo} vs {} at {hi}",
        a.category,
        b.category
    );
    Ok(())
}

/// Multiplying every weight, default or specific, by one positive integer
/// leaves credibility untouched.
pub fn weight_scale_invariant(parts: &DatasetParts, factor: u64) -> Result<(), TestCaseError> {
    let mut scaled = parts.clone();
    for w in &mut scaled.weights {
        w.weight = Weight::from_milli(w.weight.milli() * factor);
    }
    for c in &mut scaled.criteria {
        c.weight = Weight::from_milli(c.weight.milli() * factor);
    }
    let (a, b) = (table_of(parts)?, table_of(&scaled)?);
    for (x, y) in a.iter().zip(b.iter()) {
        prop_assert_eq!(x.sigmas(), y.sigmas());
    }
    Ok(())
}

/// Four strictly decreasing floors on the 1-5 scale, half-grades allowed.
pub fn boundaries() -> impl Strategy<Value = BoundaryProfile> {
    proptest::sample::subsequence((2i64..=10).collect::<Vec<_>>(), 4).prop_map(|mut v| {
        v.reverse();
        BoundaryProfile::uniform(v.into_iter().map(Grade2x::from_doubled).collect())
    })
}

/// Moves every grade to another grade on the same side of every floor;
/// credibility must not move at all.
pub fn non_compensation(
    parts: &DatasetParts,
    profile: &BoundaryProfile,
    picks: &[usize],
) -> Result<(), TestCaseError> {
    let mut base = parts.clone();
    base.boundaries = profile.clone();
    let floors: Vec<i64> = profile
        .uniform_levels()
        .iter()
        .map(|b| b.doubled())
        .collect();
    let signature = |g: i64| -> Vec<bool> { floors.iter().map(|&b| 2 * g >= b).collect() };
    let mut moved = base.clone();
    for (r, pick) in moved.records.iter_mut().zip(picks.iter().cycle()) {
        let g = r.grade.whole().unwrap();
        let same: Vec<i64> = (1..=5).filter(|&h| signature(h) == signature(g)).collect();
        r.grade = Grade2x::from_grade(same[pick % same.len()]);
    }
    let (a, b) = (table_of(&base)?, table_of(&moved)?);
    for (x, y) in a.iter().zip(b.iter()) {
        prop_assert_eq!(x.numerators(), y.numerators());
        prop_assert_eq!(x.denominator(), y.denominator());
    }
    Ok(())
}

/// Assignment equals an exhaustive scan over all categories.
pub fn assignment_matches_scan(
    (nums, den): &(Vec<i128>, i128),
    lambda: u32,
) -> Result<(), TestCaseError> {
    let v = CredibilityVector::new("x", nums.clone(), *den).unwrap();
    let got =
        assign_pessimistic(&v, CutLevel::from_milli(lambda).unwrap(), nums.len() + 1).unwrap();
    prop_assert_eq!(got.category, oracle_assign(&big_sigmas(&v), lambda));
    Ok(())
}

/// Mode equals a full tally, lowest grade on ties.
pub fn mode_matches_tally(grades: &[i64]) -> Result<(), TestCaseError> {
    prop_assert_eq!(mode(grades.iter().copied()), oracle_mode(grades, 1, 5));
    Ok(())
}

/// Cut-level exactly on a credibility value counts as reached.
pub fn tie_is_reached(lambda: u32, m: i128, p: usize) -> Result<(), TestCaseError> {
    let den = 1000 * m;
    let at = i128::from(lambda) * m;
    let nums: Vec<i128> = (0..4)
        .map(|q| if q < p { at - 1 } else { at })
        .map(|n| n.max(0))
        .collect();
    let v = CredibilityVector::new("x", nums.clone(), den).unwrap();
    let got = assign_pessimistic(&v, CutLevel::from_milli(lambda).unwrap(), 5).unwrap();
    let first = nums.iter().position(|&n| n >= at).unwrap() + 1;
    prop_assert_eq!(got.category, first);
    prop_assert_eq!(
        BigRational::new(BigInt::from(nums[first - 1]), BigInt::from(den)),
        BigRational::new(BigInt::from(lambda), BigInt::from(1000))
    );
    Ok(())
}
