//! Grouping of alternatives with similar credibility profiles, and ranking
//! of the resulting groups.
//!
//! Distances are L1 over credibility vectors, computed as exact rationals.
//! Ties anywhere are broken by alternative id so results never depend on
//! input order.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{CredibilityTable, CredibilityVector};

/// Largest input accepted by [`Linkage::ExhaustiveSmall`].
pub const EXHAUSTIVE_MAX: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Linkage {
    Single,
    Complete,
    #[default]
    Average,
    /// Optimal partition minimising total within-group pairwise distance,
    /// found by enumeration. Only for small inputs.
    ExhaustiveSmall,
}

impl FromStr for Linkage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "single" => Ok(Linkage::Single),
            "complete" => Ok(Linkage::Complete),
            "average" => Ok(Linkage::Average),
            "exhaustive-small" | "exhaustive" => Ok(Linkage::ExhaustiveSmall),
            other => Err(Error::format(
                other,
                "expected single, complete, average or exhaustive-small",
            )),
        }
    }
}

impl fmt::Display for Linkage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Linkage::Single => "single",
            Linkage::Complete => "complete",
            Linkage::Average => "average",
            Linkage::ExhaustiveSmall => "exhaustive-small",
        })
    }
}

/// Alternatives partitioned into labelled groups, plus the groups ordered
/// from best to worst.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupAssignment {
    pub groups: BTreeMap<String, Vec<String>>,
    pub ranking: Vec<String>,
}

impl GroupAssignment {
    /// Groups with a ranking supplied by the caller rather than computed.
    pub fn with_ranking(
        groups: BTreeMap<String, Vec<String>>,
        ranking: Vec<String>,
    ) -> Result<Self> {
        let labels: BTreeSet<&String> = groups.keys().collect();
        let ranked: BTreeSet<&String> = ranking.iter().collect();
        if labels != ranked || ranked.len() != ranking.len() {
            return Err(Error::Config(
                "group ranking must list every group exactly once".into(),
            ));
        }
        Ok(GroupAssignment { groups, ranking })
    }

    pub fn group_of(&self, alternative: &str) -> Option<&str> {
        self.groups
            .iter()
            .find(|(_, members)| members.iter().any(|m| m == alternative))
            .map(|(label, _)| label.as_str())
    }

    /// 1-based position of `label` in the ranking.
    pub fn rank_of(&self, label: &str) -> Option<usize> {
        self.ranking.iter().position(|l| l == label).map(|i| i + 1)
    }

    pub fn members(&self, label: &str) -> Option<&[String]> {
        self.groups.get(label).map(Vec::as_slice)
    }
}

fn to_big(sigma: &CredibilityVector, p: usize) -> BigRational {
    let (n, d) = sigma.raw(p);
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Exact L1 distance between two credibility vectors.
pub fn l1_distance(a: &CredibilityVector, b: &CredibilityVector) -> BigRational {
    let (da, db) = (BigInt::from(a.denominator()), BigInt::from(b.denominator()));
    let numerator = a
        .numerators()
        .iter()
        .zip(b.numerators())
        .map(|(&x, &y)| (BigInt::from(x) * &db - BigInt::from(y) * &da).abs())
        .fold(BigInt::zero(), |acc, v| acc + v);
    BigRational::new(numerator, da * db)
}

fn distance_matrix(vectors: &[&CredibilityVector]) -> Vec<Vec<BigRational>> {
    let n = vectors.len();
    let mut d = vec![vec![BigRational::zero(); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = l1_distance(vectors[i], vectors[j]);
            d[i][j] = v.clone();
            d[j][i] = v;
        }
    }
    d
}

fn linkage_distance(
    linkage: Linkage,
    a: &[usize],
    b: &[usize],
    d: &[Vec<BigRational>],
) -> BigRational {
    let pairs = a
        .iter()
        .flat_map(|&i| b.iter().map(move |&j| d[i][j].clone()));
    match linkage {
        Linkage::Single => pairs.min().expect("clusters are non-empty"),
        Linkage::Complete => pairs.max().expect("clusters are non-empty"),
        Linkage::Average | Linkage::ExhaustiveSmall => {
            let count = BigInt::from(a.len() * b.len());
            pairs.fold(BigRational::zero(), |acc, v| acc + v) / count
        }
    }
}

/// Agglomerative merging down to `k` clusters. Clusters are kept ordered by
/// their smallest member, so the first minimal pair found is also the
/// lexicographically smallest.
fn agglomerate(n: usize, k: usize, linkage: Linkage, d: &[Vec<BigRational>]) -> Vec<Vec<usize>> {
    let mut clusters: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    while clusters.len() > k {
        let mut best: Option<(BigRational, usize, usize)> = None;
        for i in 0..clusters.len() {
            for j in i + 1..clusters.len() {
                let dist = linkage_distance(linkage, &clusters[i], &clusters[j], d);
                if best.as_ref().is_none_or(|(b, _, _)| dist < *b) {
                    best = Some((dist, i, j));
                }
            }
        }
        let (_, i, j) = best.expect("at least two clusters remain");
        let merged = clusters.remove(j);
        clusters[i].extend(merged);
        clusters[i].sort_unstable();
    }
    clusters
}

/// Enumerates restricted growth strings with exactly `k` blocks, in
/// lexicographic order, and keeps the first partition of minimal total
/// within-group distance. Distances are brought to a common denominator so
/// partial costs are integer sums; branches whose partial cost already
/// reaches the best complete cost are cut.
fn exhaustive_partition(n: usize, k: usize, d: &[Vec<BigRational>]) -> Vec<Vec<usize>> {
    let common = d
        .iter()
        .flatten()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let scaled: Vec<Vec<BigInt>> = d
        .iter()
        .map(|row| {
            row.iter()
                .map(|v| v.numer() * (&common / v.denom()))
                .collect()
        })
        .collect();

    struct Search<'a> {
        n: usize,
        k: usize,
        d: &'a [Vec<BigInt>],
        labels: Vec<usize>,
        best: Option<(BigInt, Vec<usize>)>,
    }

    impl Search<'_> {
        fn visit(&mut self, pos: usize, used: usize, cost: BigInt) {
            if self.k - used > self.n - pos {
                return;
            }
            if self.best.as_ref().is_some_and(|(b, _)| cost >= *b) {
                return;
            }
            if pos == self.n {
                self.best = Some((cost, self.labels.clone()));
                return;
            }
            for label in 0..=used.min(self.k - 1) {
                let added = (0..pos)
                    .filter(|&j| self.labels[j] == label)
                    .fold(BigInt::zero(), |acc, j| acc + &self.d[pos][j]);
                self.labels[pos] = label;
                self.visit(pos + 1, used.max(label + 1), &cost + added);
            }
        }
    }

    let mut search = Search {
        n,
        k,
        d: &scaled,
        labels: vec![0; n],
        best: None,
    };
    search.visit(0, 0, BigInt::zero());
    let (_, labels) = search.best.expect("k <= n admits a partition");
    blocks_from_labels(&labels, k)
}

fn blocks_from_labels(labels: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut blocks = vec![Vec::new(); k];
    for (i, &l) in labels.iter().enumerate() {
        blocks[l].push(i);
    }
    blocks
}

/// Spreadsheet-style group labels: A..Z, AA, AB, ...
pub fn group_label(index: usize) -> String {
    let mut n = index + 1;
    let mut out = Vec::new();
    while n > 0 {
        let rem = (n - 1) % 26;
        out.push(b'A' + rem as u8);
        n = (n - 1) / 26;
    }
    out.reverse();
    String::from_utf8(out).expect("ASCII")
}

/// Clusters alternatives into `k_groups` groups labelled A, B, ... in
/// ranking order.
pub fn cluster_alternatives(
    table: &CredibilityTable,
    k_groups: usize,
    linkage: Linkage,
) -> Result<GroupAssignment> {
    let vectors: Vec<&CredibilityVector> = table.iter().collect();
    let n = vectors.len();
    if k_groups == 0 || k_groups > n {
        return Err(Error::GroupCount {
            requested: k_groups,
            available: n,
        });
    }
    if linkage == Linkage::ExhaustiveSmall && n > EXHAUSTIVE_MAX {
        return Err(Error::ExhaustiveTooLarge {
            max: EXHAUSTIVE_MAX,
            found: n,
        });
    }
    let d = distance_matrix(&vectors);
    let blocks = match linkage {
        Linkage::ExhaustiveSmall => exhaustive_partition(n, k_groups, &d),
        other => agglomerate(n, k_groups, other, &d),
    };
    let unlabelled: BTreeMap<String, Vec<String>> = blocks
        .iter()
        .enumerate()
        .map(|(i, block)| {
            let members = block
                .iter()
                .map(|&m| vectors[m].alternative().to_string())
                .collect();
            (format!("#{i:04}"), members)
        })
        .collect();
    let order = rank_groups(table, &unlabelled)?;
    let mut groups = BTreeMap::new();
    let mut ranking = Vec::new();
    for (rank, key) in order.iter().enumerate() {
        let label = group_label(rank);
        let mut members = unlabelled[key].clone();
        members.sort();
        groups.insert(label.clone(), members);
        ranking.push(label);
    }
    Ok(GroupAssignment { groups, ranking })
}

/// Orders group labels best to worst: by descending mean credibility at
/// level 1, ties cascading to levels 2, 3, ..., then by smallest member id.
pub fn rank_groups(
    table: &CredibilityTable,
    groups: &BTreeMap<String, Vec<String>>,
) -> Result<Vec<String>> {
    struct Key<'a> {
        label: &'a str,
        means: Vec<BigRational>,
        first: &'a str,
    }
    let mut keys = Vec::with_capacity(groups.len());
    for (label, members) in groups {
        if members.is_empty() {
            return Err(Error::EmptyGroup(label.clone()));
        }
        let vectors = members
            .iter()
            .map(|m| {
                table
                    .get(m)
                    .ok_or_else(|| Error::OverrideUnknown(vec![m.clone()]))
            })
            .collect::<Result<Vec<_>>>()?;
        let count = BigInt::from(vectors.len());
        let means = (1..=table.levels())
            .map(|p| {
                vectors
                    .iter()
                    .fold(BigRational::zero(), |acc, v| acc + to_big(v, p))
                    / count.clone()
            })
            .collect();
        let first = members.iter().min().expect("non-empty").as_str();
        keys.push(Key {
            label,
            means,
            first,
        });
    }
    keys.sort_by(|a, b| {
        b.means
            .cmp(&a.means)
            .then_with(|| a.first.cmp(b.first))
            .then_with(|| a.label.cmp(b.label))
    });
    Ok(keys.into_iter().map(|k| k.label.to_string()).collect())
}

/// Uses the caller's grouping verbatim; only the ranking is computed.
pub fn apply_group_override(
    table: &CredibilityTable,
    assignment: &BTreeMap<String, Vec<String>>,
) -> Result<GroupAssignment> {
    let mut seen = BTreeSet::new();
    let mut unknown = Vec::new();
    for (label, members) in assignment {
        if members.is_empty() {
            return Err(Error::EmptyGroup(label.clone()));
        }
        for m in members {
            if table.get(m).is_none() {
                unknown.push(m.clone());
            } else if !seen.insert(m.as_str()) {
                return Err(Error::OverrideDuplicate(m.clone()));
            }
        }
    }
    if !unknown.is_empty() {
        unknown.sort();
        return Err(Error::OverrideUnknown(unknown));
    }
    let missing: Vec<String> = table
        .ids()
        .filter(|id| !seen.contains(id))
        .map(str::to_string)
        .collect();
    if !missing.is_empty() {
        return Err(Error::OverrideMissing(missing));
    }
    let groups: BTreeMap<String, Vec<String>> = assignment
        .iter()
        .map(|(label, members)| {
            let mut members = members.clone();
            members.sort();
            (label.clone(), members)
        })
        .collect();
    let ranking = rank_groups(table, &groups)?;
    Ok(GroupAssignment { groups, ranking })
}

/// Total within-group pairwise L1 distance of a grouping.
pub fn within_group_distance(table: &CredibilityTable, groups: &GroupAssignment) -> BigRational {
    let mut total = BigRational::zero();
    for members in groups.groups.values() {
        for (x, a) in members.iter().enumerate() {
            for b in &members[x + 1..] {
                if let (Some(va), Some(vb)) = (table.get(a), table.get(b)) {
                    total += l1_distance(va, vb);
                }
            }
        }
    }
    total
}
