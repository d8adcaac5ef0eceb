//! Generators and brute-force oracles shared by the integration suites.
//!
//! Oracles here re-derive results straight from the definitions with
//! arbitrary-precision numbers and exhaustive scans; they do not call the
//! library code paths they are used to check.

#![allow(dead_code)]

pub mod props;

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use electre_tri_me::{
    Alternative, BoundaryProfile, CategorySet, CredibilityTable, CredibilityVector, Criterion,
    DatasetParts, EvaluationRecord, Evaluator, Grade2x, Scale, Weight, WeightEntry,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("fixtures")
        .join(name)
}

/// Random heterogeneous dataset on the default 1-5 scale: up to 5
/// alternatives, 6 evaluators and 8 criteria, each evaluator grading a
/// random subset, weights with up to three decimals.
pub fn dataset() -> impl Strategy<Value = DatasetParts> {
    (1usize..=5, 1usize..=6, 1usize..=8)
        .prop_flat_map(|(na, ne, nc)| {
            let cells = na * ne * nc;
            (
                Just((na, ne, nc)),
                prop::collection::vec(prop::bool::weighted(0.6), cells),
                prop::collection::vec(1i64..=5, cells),
                prop::collection::vec(1u64..=20_000, ne * nc),
            )
        })
        .prop_map(|((na, ne, nc), present, grades, weights)| {
            let idx = |a: usize, e: usize, c: usize| (a * ne + e) * nc + c;
            let forced =
                |a: usize, e: usize, c: usize| (a == 0 && c == e % nc) || (e == 0 && c == 0);
            let mut records = Vec::new();
            let mut used: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
            for a in 0..na {
                for e in 0..ne {
                    for c in 0..nc {
                        if present[idx(a, e, c)] || forced(a, e, c) {
                            used.entry(e).or_default().insert(c);
                            records.push(EvaluationRecord {
                                alternative: format!("A{a}"),
                                evaluator: format!("e{e}"),
                                criterion: format!("Cr{c}"),
                                grade: Grade2x::from_grade(grades[idx(a, e, c)]),
                            });
                        }
                    }
                }
            }
            let weights = &weights;
            let weight_entries = used
                .iter()
                .flat_map(|(&e, cs)| {
                    cs.iter().map(move |&c| WeightEntry {
                        evaluator: format!("e{e}"),
                        criterion: format!("Cr{c}"),
                        weight: Weight::from_milli(weights[e * nc + c]),
                    })
                })
                .collect();
            DatasetParts {
                scale: Scale::default(),
                categories: CategorySet::default(),
                boundaries: BoundaryProfile::default(),
                alternatives: (0..na).map(|a| Alternative::new(format!("A{a}"))).collect(),
                evaluators: used
                    .iter()
                    .map(|(&e, cs)| Evaluator {
                        id: format!("e{e}"),
                        criteria_used: cs.iter().map(|c| format!("Cr{c}")).collect(),
                    })
                    .collect(),
                criteria: (0..nc).map(|c| Criterion::new(format!("Cr{c}"))).collect(),
                weights: weight_entries,
                records,
            }
        })
}

/// Random monotone credibility vector with `levels` entries, in thousandths.
pub fn credibility_milli(levels: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(0i64..=1000, levels).prop_map(|mut v| {
        v.sort_unstable();
        v
    })
}

/// Random monotone vector over an arbitrary positive denominator.
pub fn credibility_fraction(levels: usize) -> impl Strategy<Value = (Vec<i128>, i128)> {
    (1i128..=5000).prop_flat_map(move |den| {
        (prop::collection::vec(0..=den, levels), Just(den)).prop_map(|(mut v, d)| {
            v.sort_unstable();
            (v, d)
        })
    })
}

pub fn table_from_milli(rows: &[Vec<i64>]) -> CredibilityTable {
    let levels = rows.first().map_or(4, Vec::len);
    CredibilityTable::from_vectors(
        levels,
        rows.iter()
            .enumerate()
            .map(|(i, m)| CredibilityVector::from_milli(format!("a{i:02}"), m).unwrap()),
    )
    .unwrap()
}

/// Credibility straight from the definition, one record at a time, with
/// arbitrary-precision integers: (numerators, denominator) per alternative.
pub fn oracle_credibility(parts: &DatasetParts) -> BTreeMap<String, (Vec<BigInt>, BigInt)> {
    let weight_of = |e: &str, c: &str| -> BigInt {
        let specific = parts
            .weights
            .iter()
            .find(|w| w.evaluator == e && w.criterion == c)
            .map(|w| w.weight);
        let default = parts.criteria.iter().find(|x| x.id == c).map(|x| x.weight);
        BigInt::from(specific.or(default).unwrap_or(Weight::ONE).milli())
    };
    let floors = |c: &str, e: &str| -> Vec<i64> {
        parts
            .boundaries
            .explicit_entries()
            .iter()
            .find(|x| x.criterion == c && x.evaluator == e)
            .map_or(parts.boundaries.uniform_levels(), |x| x.levels.as_slice())
            .iter()
            .map(|g| g.doubled())
            .collect()
    };
    let levels = parts.boundaries.level_count();
    let mut out = BTreeMap::new();
    for alt in &parts.alternatives {
        let mut num = vec![BigInt::zero(); levels];
        let mut den = BigInt::zero();
        for r in parts.records.iter().filter(|r| r.alternative == alt.id) {
            let w = weight_of(&r.evaluator, &r.criterion);
            den += &w;
            for (p, floor) in floors(&r.criterion, &r.evaluator).into_iter().enumerate() {
                if r.grade.doubled() >= floor {
                    num[p] += &w;
                }
            }
        }
        out.insert(alt.id.clone(), (num, den));
    }
    out
}

pub fn big_sigmas(v: &CredibilityVector) -> Vec<BigRational> {
    v.numerators()
        .iter()
        .map(|&n| BigRational::new(BigInt::from(n), BigInt::from(v.denominator())))
        .collect()
}

/// Category by exhaustive scan: C_p is correct iff no earlier floor reaches
/// lambda and (p is the last category or floor p does).
pub fn oracle_assign(sigmas: &[BigRational], lambda_milli: u32) -> usize {
    let lambda = BigRational::new(BigInt::from(lambda_milli), BigInt::from(1000));
    let k = sigmas.len() + 1;
    let matches: Vec<usize> = (1..=k)
        .filter(|&p| {
            let earlier_fail = sigmas[..p - 1].iter().all(|s| *s < lambda);
            let here = p == k || sigmas[p - 1] >= lambda;
            earlier_fail && here
        })
        .collect();
    assert_eq!(
        matches.len(),
        1,
        "assignment rule must single out one category"
    );
    matches[0]
}

/// Mode by full tally over the scale, lowest grade on ties.
pub fn oracle_mode(grades: &[i64], min: i64, max: i64) -> Option<i64> {
    let counts: Vec<usize> = (min..=max)
        .map(|g| grades.iter().filter(|&&x| x == g).count())
        .collect();
    let best = *counts.iter().max()?;
    if best == 0 {
        return None;
    }
    (min..=max)
        .zip(counts)
        .find(|&(_, c)| c == best)
        .map(|(g, _)| g)
}

/// Minimal total within-group pairwise L1 distance over every surjective
/// labelling into `k` groups, with its canonical partition (blocks ordered
/// by first member). Ties go to the lexicographically smallest canonical
/// labelling.
pub fn oracle_partition(vectors: &[Vec<BigRational>], k: usize) -> (BigRational, Vec<Vec<usize>>) {
    let n = vectors.len();
    let dist = |i: usize, j: usize| -> BigRational {
        vectors[i]
            .iter()
            .zip(&vectors[j])
            .fold(BigRational::zero(), |acc, (a, b)| acc + (a - b).abs())
    };
    let d: Vec<Vec<BigRational>> = (0..n)
        .map(|i| (0..n).map(|j| dist(i, j)).collect())
        .collect();
    let mut best: Option<(BigRational, Vec<usize>)> = None;
    let total = k.pow(n as u32);
    for code in 0..total {
        let mut labels = Vec::with_capacity(n);
        let mut c = code;
        for _ in 0..n {
            labels.push(c % k);
            c /= k;
        }
        if (0..k).any(|l| !labels.contains(&l)) {
            continue;
        }
        // each partition appears k! times; keep only the labelling that
        // numbers blocks in order of first appearance
        let mut next = 0;
        let canonical = labels.iter().all(|&l| {
            if l == next {
                next += 1;
            }
            l < next
        });
        if !canonical {
            continue;
        }
        let canon = labels;
        let mut cost = BigRational::zero();
        for i in 0..n {
            for j in i + 1..n {
                if canon[i] == canon[j] {
                    cost += &d[i][j];
                }
            }
        }
        let better = match &best {
            None => true,
            Some((b, bl)) => cost < *b || (cost == *b && canon < *bl),
        };
        if better {
            best = Some((cost, canon));
        }
    }
    let (cost, labels) = best.expect("k <= n");
    let mut blocks = vec![Vec::new(); k];
    for (i, l) in labels.into_iter().enumerate() {
        blocks[l].push(i);
    }
    (cost, blocks)
}
