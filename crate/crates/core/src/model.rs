//! Domain types shared by every stage of the pipeline.
//!
//! Grades and boundaries are held in doubled units ([`Grade2x`]) and weights
//! in thousandths ([`Weight`]), so every comparison and every credibility
//! fraction is computed with integers.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::decimal::{format_milli, parse_scaled, round_half_up_milli};
use crate::error::{Error, Result, ValidationErrors, ValidationIssue};

/// Weights are stored as integers scaled by this factor.
pub const WEIGHT_SCALE: u64 = 1000;

/// A grade or boundary expressed in doubled units (grade 3 is 6, boundary
/// 2.5 is 5).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Grade2x(i64);

impl Grade2x {
    pub const fn from_doubled(doubled: i64) -> Self {
        Grade2x(doubled)
    }

    pub const fn from_grade(grade: i64) -> Self {
        Grade2x(grade * 2)
    }

    pub const fn doubled(self) -> i64 {
        self.0
    }

    /// The integer grade, if this value is not a half-integer.
    pub fn whole(self) -> Option<i64> {
        (self.0 % 2 == 0).then_some(self.0 / 2)
    }
}

impl fmt::Display for Grade2x {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let abs = self.0.unsigned_abs();
        if abs.is_multiple_of(2) {
            write!(f, "{sign}{}", abs / 2)
        } else {
            write!(f, "{sign}{}.5", abs / 2)
        }
    }
}

impl FromStr for Grade2x {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        to_doubled(s)
    }
}

/// Converts an integer or half-integer written in decimal to doubled units.
pub fn to_doubled(value: &str) -> Result<Grade2x> {
    let tenths = parse_scaled(value, 1)
        .map_err(|_| Error::format(value, "not an integer or half-integer"))?;
    if tenths % 5 != 0 {
        return Err(Error::format(value, "not an integer or half-integer"));
    }
    Ok(Grade2x(tenths / 5))
}

/// A criterion weight in thousandths. Non-negative by construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Weight(u64);

impl Weight {
    pub const ONE: Weight = Weight(WEIGHT_SCALE);

    pub const fn from_milli(milli: u64) -> Self {
        Weight(milli)
    }

    pub fn from_integer(units: u64) -> Self {
        Weight(units * WEIGHT_SCALE)
    }

    pub const fn milli(self) -> u64 {
        self.0
    }
}

impl Default for Weight {
    fn default() -> Self {
        Weight::ONE
    }
}

impl FromStr for Weight {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let milli = parse_scaled(s, 3)?;
        u64::try_from(milli)
            .map(Weight)
            .map_err(|_| Error::format(s, "weight must be non-negative"))
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_milli(self.0 as i64, 0))
    }
}

/// The evaluation scale: consecutive integer grades, each with a verbal label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scale {
    pub min_grade: i64,
    pub max_grade: i64,
    pub labels: BTreeMap<i64, String>,
}

impl Scale {
    pub fn new(min_grade: i64, max_grade: i64, labels: BTreeMap<i64, String>) -> Result<Self> {
        let scale = Scale {
            min_grade,
            max_grade,
            labels,
        };
        match scale.issues().into_iter().next() {
            Some(issue) => Err(ValidationErrors(vec![issue]).into()),
            None => Ok(scale),
        }
    }

    /// A scale whose labels are the grade numbers themselves.
    pub fn numeric(min_grade: i64, max_grade: i64) -> Result<Self> {
        let labels = (min_grade..=max_grade)
            .map(|g| (g, g.to_string()))
            .collect();
        Scale::new(min_grade, max_grade, labels)
    }

    fn issues(&self) -> Vec<ValidationIssue> {
        if self.min_grade >= self.max_grade {
            return vec![ValidationIssue::Scale(format!(
                "min grade {} must be below max grade {}",
                self.min_grade, self.max_grade
            ))];
        }
        let missing: Vec<String> = (self.min_grade..=self.max_grade)
            .filter(|g| !self.labels.contains_key(g))
            .map(|g| g.to_string())
            .collect();
        if missing.is_empty() {
            Vec::new()
        } else {
            vec![ValidationIssue::Scale(format!(
                "no label for grade(s) {}",
                missing.join(", ")
            ))]
        }
    }

    pub fn contains(&self, grade: Grade2x) -> bool {
        grade
            .whole()
            .is_some_and(|g| (self.min_grade..=self.max_grade).contains(&g))
    }

    /// Whether `grade` is at or below the midpoint of the scale.
    pub fn at_or_below_midpoint(&self, grade: i64) -> bool {
        2 * grade <= self.min_grade + self.max_grade
    }

    pub fn label(&self, grade: i64) -> Option<&str> {
        self.labels.get(&grade).map(String::as_str)
    }

    pub fn grades(&self) -> impl Iterator<Item = i64> {
        self.min_grade..=self.max_grade
    }
}

impl Default for Scale {
    fn default() -> Self {
        let labels = ["Very Bad", "Bad", "Fair", "Good", "Very Good"]
            .iter()
            .zip(1..)
            .map(|(label, g)| (g, label.to_string()))
            .collect();
        Scale {
            min_grade: 1,
            max_grade: 5,
            labels,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alternative {
    pub id: String,
    pub display_name: String,
}

impl Alternative {
    pub fn new(id: impl Into<String>) -> Self {
        let id = id.into();
        Alternative {
            display_name: id.clone(),
            id,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evaluator {
    pub id: String,
    pub criteria_used: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Criterion {
    pub id: String,
    pub description: String,
    /// Weight applied when no evaluator-specific weight is given.
    pub weight: Weight,
}

impl Criterion {
    pub fn new(id: impl Into<String>) -> Self {
        Criterion {
            id: id.into(),
            description: String::new(),
            weight: Weight::ONE,
        }
    }
}

/// Weight of one criterion as used by one evaluator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightEntry {
    pub evaluator: String,
    pub criterion: String,
    pub weight: Weight,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvaluationRecord {
    pub alternative: String,
    pub evaluator: String,
    pub criterion: String,
    pub grade: Grade2x,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Category {
    pub id: String,
    pub label: String,
}

/// Categories ordered from best (index 1) to worst (index `len()`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CategorySet(Vec<Category>);

impl CategorySet {
    pub fn new(categories: Vec<Category>) -> Result<Self> {
        let set = CategorySet(categories);
        let issues = set.issues();
        if issues.is_empty() {
            Ok(set)
        } else {
            Err(ValidationErrors(issues).into())
        }
    }

    /// Categories `C1..Ck` labelled with the given verbal values.
    pub fn from_labels<S: AsRef<str>>(labels: &[S]) -> Result<Self> {
        CategorySet::new(
            labels
                .iter()
                .enumerate()
                .map(|(i, label)| Category {
                    id: format!("C{}", i + 1),
                    label: label.as_ref().to_string(),
                })
                .collect(),
        )
    }

    fn issues(&self) -> Vec<ValidationIssue> {
        let mut issues = Vec::new();
        if self.0.len() < 2 {
            issues.push(ValidationIssue::Categories(format!(
                "at least 2 categories required, got {}",
                self.0.len()
            )));
        }
        let mut seen = HashSet::new();
        for c in &self.0 {
            if !seen.insert(c.id.as_str()) {
                issues.push(ValidationIssue::DuplicateId {
                    kind: "category",
                    id: c.id.clone(),
                });
            }
        }
        issues
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Category at 1-based index `p`.
    pub fn get(&self, p: usize) -> Option<&Category> {
        p.checked_sub(1).and_then(|i| self.0.get(i))
    }

    pub fn iter(&self) -> impl Iterator<Item = &Category> {
        self.0.iter()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.0.iter().position(|c| c.id == id).map(|i| i + 1)
    }
}

impl Default for CategorySet {
    fn default() -> Self {
        CategorySet::from_labels(&["Very Good", "Good", "Fair", "Bad", "Very Bad"])
            .expect("default categories are valid")
    }
}

/// Boundaries specific to one (criterion, evaluator) pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExplicitBoundaries {
    pub criterion: String,
    pub evaluator: String,
    pub levels: Vec<Grade2x>,
}

/// Category floors `b[p]` for p = 1..k-1, uniform by default with optional
/// per (criterion, evaluator) replacements.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryProfile {
    uniform: Vec<Grade2x>,
    #[serde(default)]
    explicit: Vec<ExplicitBoundaries>,
}

impl BoundaryProfile {
    pub fn uniform(levels: Vec<Grade2x>) -> Self {
        BoundaryProfile {
            uniform: levels,
            explicit: Vec::new(),
        }
    }

    /// Parses a comma separated list such as `4.5,3.5,2.5,1.5`.
    pub fn parse_uniform(text: &str) -> Result<Self> {
        let levels = text
            .split(',')
            .map(|v| to_doubled(v.trim()))
            .collect::<Result<Vec<_>>>()?;
        Ok(BoundaryProfile::uniform(levels))
    }

    /// Sets the boundaries used for one (criterion, evaluator) pair.
    pub fn with_explicit(
        mut self,
        criterion: impl Into<String>,
        evaluator: impl Into<String>,
        levels: Vec<Grade2x>,
    ) -> Self {
        let entry = ExplicitBoundaries {
            criterion: criterion.into(),
            evaluator: evaluator.into(),
            levels,
        };
        match self.find(&entry.criterion, &entry.evaluator) {
            Ok(i) => self.explicit[i] = entry,
            Err(i) => self.explicit.insert(i, entry),
        }
        self
    }

    fn find(&self, criterion: &str, evaluator: &str) -> std::result::Result<usize, usize> {
        self.explicit.binary_search_by(|e| {
            (e.criterion.as_str(), e.evaluator.as_str()).cmp(&(criterion, evaluator))
        })
    }

    pub fn uniform_levels(&self) -> &[Grade2x] {
        &self.uniform
    }

    pub fn explicit_entries(&self) -> &[ExplicitBoundaries] {
        &self.explicit
    }

    pub fn level_count(&self) -> usize {
        self.uniform.len()
    }

    /// Boundaries `b[1..k-1]` that apply to `criterion` as graded by `evaluator`.
    pub fn levels_for(&self, criterion: &str, evaluator: &str) -> &[Grade2x] {
        match self.find(criterion, evaluator) {
            Ok(i) => &self.explicit[i].levels,
            Err(_) => &self.uniform,
        }
    }

    /// Expands the uniform shorthand into an explicit entry for every pair.
    pub fn expand<'a>(&self, pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Self {
        pairs
            .into_iter()
            .fold(self.clone(), |profile, (criterion, evaluator)| {
                let levels = self.levels_for(criterion, evaluator).to_vec();
                profile.with_explicit(criterion, evaluator, levels)
            })
    }

    fn issues(&self, categories: usize) -> Vec<ValidationIssue> {
        let expected = categories.saturating_sub(1);
        let scoped = std::iter::once((None, &self.uniform)).chain(
            self.explicit
                .iter()
                .map(|e| (Some((e.criterion.clone(), e.evaluator.clone())), &e.levels)),
        );
        let mut issues = Vec::new();
        for (scope, levels) in scoped {
            if levels.len() != expected {
                issues.push(ValidationIssue::BoundaryCount {
                    expected,
                    found: levels.len(),
                    scope: scope.clone(),
                });
            }
            if levels.windows(2).any(|w| w[0] <= w[1]) {
                let values: Vec<String> = levels.iter().map(Grade2x::to_string).collect();
                issues.push(ValidationIssue::BoundariesNotDecreasing {
                    values: values.join(", "),
                    scope,
                });
            }
        }
        issues
    }
}

impl Default for BoundaryProfile {
    fn default() -> Self {
        BoundaryProfile::uniform(vec![
            Grade2x::from_doubled(9),
            Grade2x::from_doubled(7),
            Grade2x::from_doubled(5),
            Grade2x::from_doubled(3),
        ])
    }
}

/// Credibility degrees of one alternative against the boundaries b1..b(k-1).
///
/// Numerators share one denominator: the total scaled weight of the
/// alternative's evaluations, or 1000 for published three-decimal values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CredibilityVector {
    alternative: String,
    numerators: Vec<i128>,
    denominator: i128,
}

impl CredibilityVector {
    pub fn new(
        alternative: impl Into<String>,
        numerators: Vec<i128>,
        denominator: i128,
    ) -> Result<Self> {
        let alternative = alternative.into();
        let invalid = |reason: &str| Error::Credibility {
            alternative: alternative.clone(),
            reason: reason.to_string(),
        };
        if denominator <= 0 {
            return Err(invalid("denominator must be positive"));
        }
        if numerators.is_empty() {
            return Err(invalid("no credibility levels"));
        }
        if numerators.iter().any(|&n| n < 0 || n > denominator) {
            return Err(invalid("credibility outside [0, 1]"));
        }
        if numerators.windows(2).any(|w| w[0] > w[1]) {
            return Err(invalid("credibility not non-decreasing"));
        }
        Ok(CredibilityVector {
            alternative,
            numerators,
            denominator,
        })
    }

    /// Builds a vector from values given in thousandths (three decimals).
    pub fn from_milli(alternative: impl Into<String>, milli: &[i64]) -> Result<Self> {
        CredibilityVector::new(
            alternative,
            milli.iter().map(|&m| i128::from(m)).collect(),
            1000,
        )
    }

    pub fn alternative(&self) -> &str {
        &self.alternative
    }

    pub fn levels(&self) -> usize {
        self.numerators.len()
    }

    pub fn denominator(&self) -> i128 {
        self.denominator
    }

    pub fn numerators(&self) -> &[i128] {
        &self.numerators
    }

    /// Unreduced (numerator, denominator) at 1-based level `p`.
    pub fn raw(&self, p: usize) -> (i128, i128) {
        (self.numerators[p - 1], self.denominator)
    }

    /// Reduced credibility at 1-based level `p`.
    pub fn sigma(&self, p: usize) -> Ratio<i128> {
        Ratio::new(self.numerators[p - 1], self.denominator)
    }

    pub fn sigmas(&self) -> Vec<Ratio<i128>> {
        (1..=self.levels()).map(|p| self.sigma(p)).collect()
    }

    /// Credibility against the floor of the worst category, which every
    /// evaluation satisfies: always `denominator / denominator`.
    pub fn lowest_floor(&self) -> (i128, i128) {
        (self.denominator, self.denominator)
    }

    /// Exact test `sigma_p >= lambda`.
    pub fn reaches(&self, p: usize, lambda: CutLevel) -> bool {
        self.numerators[p - 1] * 1000 >= i128::from(lambda.milli()) * self.denominator
    }

    /// Credibility at level `p` rounded half-up to three decimals.
    pub fn display(&self, p: usize) -> String {
        let milli = round_half_up_milli(self.numerators[p - 1], self.denominator);
        format_milli(milli as i64, 3)
    }
}

/// One credibility vector per alternative, keyed by sorted alternative id.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CredibilityTable {
    levels: usize,
    rows: BTreeMap<String, CredibilityVector>,
}

impl CredibilityTable {
    pub fn new(levels: usize) -> Self {
        CredibilityTable {
            levels,
            rows: BTreeMap::new(),
        }
    }

    pub fn from_vectors(
        levels: usize,
        vectors: impl IntoIterator<Item = CredibilityVector>,
    ) -> Result<Self> {
        let mut table = CredibilityTable::new(levels);
        for v in vectors {
            table.insert(v)?;
        }
        Ok(table)
    }

    pub fn insert(&mut self, vector: CredibilityVector) -> Result<()> {
        if vector.levels() != self.levels {
            return Err(Error::LevelMismatch {
                alternative: vector.alternative.clone(),
                expected: self.levels,
                found: vector.levels(),
            });
        }
        if self.rows.contains_key(vector.alternative()) {
            return Err(ValidationErrors(vec![ValidationIssue::DuplicateId {
                kind: "alternative",
                id: vector.alternative.clone(),
            }])
            .into());
        }
        self.rows.insert(vector.alternative.clone(), vector);
        Ok(())
    }

    /// Number of boundary levels, i.e. categories - 1.
    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn get(&self, alternative: &str) -> Option<&CredibilityVector> {
        self.rows.get(alternative)
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.rows.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = &CredibilityVector> {
        self.rows.values()
    }
}

/// Minimum credibility required to accept an outranking, in (0, 1] with at
/// most three decimals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct CutLevel(u32);

impl CutLevel {
    pub fn from_milli(milli: u32) -> Result<Self> {
        if (1..=1000).contains(&milli) {
            Ok(CutLevel(milli))
        } else {
            Err(Error::format(
                format_milli(i64::from(milli), 3),
                "cut-level must lie in (0, 1]",
            ))
        }
    }

    pub fn milli(self) -> u32 {
        self.0
    }

    pub fn as_ratio(self) -> Ratio<i128> {
        Ratio::new(i128::from(self.0), 1000)
    }
}

impl TryFrom<u32> for CutLevel {
    type Error = Error;

    fn try_from(milli: u32) -> Result<Self> {
        CutLevel::from_milli(milli)
    }
}

impl From<CutLevel> for u32 {
    fn from(level: CutLevel) -> u32 {
        level.0
    }
}

impl FromStr for CutLevel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let milli = parse_scaled(s, 3)?;
        u32::try_from(milli)
            .map_err(|_| Error::format(s, "cut-level must lie in (0, 1]"))
            .and_then(CutLevel::from_milli)
    }
}

impl fmt::Display for CutLevel {
    /// Two decimals, or three when the third is significant.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_milli(i64::from(self.0), 2))
    }
}

/// Unvalidated dataset contents, as read from files or deserialized.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetParts {
    pub scale: Scale,
    pub categories: CategorySet,
    pub boundaries: BoundaryProfile,
    pub alternatives: Vec<Alternative>,
    pub evaluators: Vec<Evaluator>,
    pub criteria: Vec<Criterion>,
    #[serde(default)]
    pub weights: Vec<WeightEntry>,
    pub records: Vec<EvaluationRecord>,
}

/// A dataset whose invariants have all been checked.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "DatasetParts", into = "DatasetParts")]
pub struct Dataset(DatasetParts);

impl TryFrom<DatasetParts> for Dataset {
    type Error = ValidationErrors;

    fn try_from(parts: DatasetParts) -> std::result::Result<Self, ValidationErrors> {
        validate_dataset(parts)
    }
}

impl From<Dataset> for DatasetParts {
    fn from(dataset: Dataset) -> DatasetParts {
        dataset.0
    }
}

impl Dataset {
    pub fn scale(&self) -> &Scale {
        &self.0.scale
    }

    pub fn categories(&self) -> &CategorySet {
        &self.0.categories
    }

    pub fn boundaries(&self) -> &BoundaryProfile {
        &self.0.boundaries
    }

    pub fn alternatives(&self) -> &[Alternative] {
        &self.0.alternatives
    }

    pub fn evaluators(&self) -> &[Evaluator] {
        &self.0.evaluators
    }

    pub fn criteria(&self) -> &[Criterion] {
        &self.0.criteria
    }

    pub fn weights(&self) -> &[WeightEntry] {
        &self.0.weights
    }

    pub fn records(&self) -> &[EvaluationRecord] {
        &self.0.records
    }

    pub fn parts(&self) -> &DatasetParts {
        &self.0
    }

    pub fn weight_table(&self) -> WeightTable<'_> {
        WeightTable::new(&self.0.criteria, &self.0.weights)
    }
}

/// Resolves the weight an evaluator gives a criterion: the evaluator-specific
/// entry if any, otherwise the criterion's default weight.
#[derive(Debug, Clone)]
pub struct WeightTable<'a> {
    defaults: HashMap<&'a str, Weight>,
    specific: HashMap<(&'a str, &'a str), Weight>,
}

impl<'a> WeightTable<'a> {
    pub fn new(criteria: &'a [Criterion], weights: &'a [WeightEntry]) -> Self {
        WeightTable {
            defaults: criteria.iter().map(|c| (c.id.as_str(), c.weight)).collect(),
            specific: weights
                .iter()
                .map(|w| ((w.evaluator.as_str(), w.criterion.as_str()), w.weight))
                .collect(),
        }
    }

    pub fn weight(&self, evaluator: &str, criterion: &str) -> Weight {
        self.specific
            .get(&(evaluator, criterion))
            .or_else(|| self.defaults.get(criterion))
            .copied()
            .unwrap_or_default()
    }
}

/// Checks every dataset invariant and reports all violations at once.
pub fn validate_dataset(parts: DatasetParts) -> std::result::Result<Dataset, ValidationErrors> {
    let mut issues = parts.scale.issues();
    issues.extend(parts.categories.issues());
    issues.extend(parts.boundaries.issues(parts.categories.len()));

    fn unique_ids<'a>(
        kind: &'static str,
        ids: impl Iterator<Item = &'a str>,
        issues: &mut Vec<ValidationIssue>,
    ) -> HashSet<&'a str> {
        let mut seen = HashSet::new();
        for id in ids {
            if !seen.insert(id) {
                issues.push(ValidationIssue::DuplicateId {
                    kind,
                    id: id.to_string(),
                });
            }
        }
        seen
    }

    let alternatives = unique_ids(
        "alternative",
        parts.alternatives.iter().map(|a| a.id.as_str()),
        &mut issues,
    );
    let evaluators = unique_ids(
        "evaluator",
        parts.evaluators.iter().map(|e| e.id.as_str()),
        &mut issues,
    );
    let criteria = unique_ids(
        "criterion",
        parts.criteria.iter().map(|c| c.id.as_str()),
        &mut issues,
    );

    let mut used: HashMap<&str, &BTreeSet<String>> = HashMap::new();
    for e in &parts.evaluators {
        if e.criteria_used.is_empty() {
            issues.push(ValidationIssue::EmptyCriteriaSet(e.id.clone()));
        }
        for c in &e.criteria_used {
            if !criteria.contains(c.as_str()) {
                issues.push(ValidationIssue::EvaluatorUnknownCriterion {
                    evaluator: e.id.clone(),
                    criterion: c.clone(),
                });
            }
        }
        used.insert(e.id.as_str(), &e.criteria_used);
    }

    for w in &parts.weights {
        if !evaluators.contains(w.evaluator.as_str()) {
            issues.push(ValidationIssue::UnknownWeightReference {
                kind: "evaluator",
                id: w.evaluator.clone(),
            });
        }
        if !criteria.contains(w.criterion.as_str()) {
            issues.push(ValidationIssue::UnknownWeightReference {
                kind: "criterion",
                id: w.criterion.clone(),
            });
        }
    }

    let mut triples = HashSet::new();
    for r in &parts.records {
        let mut known = true;
        for (kind, id, set) in [
            ("alternative", &r.alternative, &alternatives),
            ("evaluator", &r.evaluator, &evaluators),
            ("criterion", &r.criterion, &criteria),
        ] {
            if !set.contains(id.as_str()) {
                known = false;
                issues.push(ValidationIssue::UnknownReference {
                    kind,
                    id: id.clone(),
                });
            }
        }
        if known && !used[r.evaluator.as_str()].contains(&r.criterion) {
            issues.push(ValidationIssue::CriterionNotUsed {
                evaluator: r.evaluator.clone(),
                criterion: r.criterion.clone(),
            });
        }
        if !parts.scale.contains(r.grade) {
            issues.push(ValidationIssue::GradeOutOfScale {
                alternative: r.alternative.clone(),
                evaluator: r.evaluator.clone(),
                criterion: r.criterion.clone(),
                grade: r.grade.to_string(),
            });
        }
        if !triples.insert((&r.alternative, &r.evaluator, &r.criterion)) {
            issues.push(ValidationIssue::DuplicateRecord {
                alternative: r.alternative.clone(),
                evaluator: r.evaluator.clone(),
                criterion: r.criterion.clone(),
            });
        }
    }

    if issues.is_empty() {
        Ok(Dataset(parts))
    } else {
        Err(ValidationErrors(issues))
    }
}


#[cfg(test)]
mod tests {
    use super::fixtures::toy_parts;
    use super::*;

    #[test]
    fn doubling() {
        assert_eq!(to_doubled("4.5").unwrap(), Grade2x::from_doubled(9));
        assert_eq!(to_doubled("3").unwrap(), Grade2x::from_doubled(6));
        assert_eq!(to_doubled("2.5").unwrap().doubled(), 5);
        let err = to_doubled("4.3").unwrap_err();
        assert!(err.to_string().contains("4.3"), "{err}");
        assert!(to_doubled("four").is_err());
    }

    #[test]
    fn doubling_inverts_through_display() {
        for doubled in -20..=20 {
            let g = Grade2x::from_doubled(doubled);
            assert_eq!(to_doubled(&g.to_string()).unwrap(), g);
        }
    }

    #[test]
    fn weight_parsing() {
        assert_eq!("10".parse::<Weight>().unwrap(), Weight::from_integer(10));
        assert_eq!("0.125".parse::<Weight>().unwrap().milli(), 125);
        assert!("0.0001".parse::<Weight>().is_err());
        assert!("-1".parse::<Weight>().is_err());
        assert_eq!(Weight::from_milli(6500).to_string(), "6.5");
    }

    #[test]
    fn cut_level_range_and_display() {
        assert_eq!("0.70".parse::<CutLevel>().unwrap().milli(), 700);
        assert_eq!("1".parse::<CutLevel>().unwrap().to_string(), "1.00");
        assert_eq!("0.125".parse::<CutLevel>().unwrap().to_string(), "0.125");
        assert!("0".parse::<CutLevel>().is_err());
        assert!("1.05".parse::<CutLevel>().is_err());
        assert!("-0.5".parse::<CutLevel>().is_err());
    }

    #[test]
    fn default_scale_and_categories() {
        let scale = Scale::default();
        assert_eq!(scale.label(1), Some("Very Bad"));
        assert_eq!(scale.label(5), Some("Very Good"));
        let cats = CategorySet::default();
        assert_eq!(cats.len(), 5);
        assert_eq!(cats.get(1).unwrap().label, "Very Good");
        assert_eq!(cats.get(5).unwrap().id, "C5");
        let b = BoundaryProfile::default();
        let shown: Vec<String> = b.uniform_levels().iter().map(|g| g.to_string()).collect();
        assert_eq!(shown, ["4.5", "3.5", "2.5", "1.5"]);
    }

    #[test]
    fn scale_invariants() {
        assert!(Scale::numeric(5, 5).is_err());
        let mut labels = Scale::default().labels;
        labels.remove(&3);
        assert!(Scale::new(1, 5, labels).is_err());
        assert!(Scale::default().at_or_below_midpoint(3));
        assert!(!Scale::default().at_or_below_midpoint(4));
    }

    #[test]
    fn toy_dataset_is_valid() {
        let ds = validate_dataset(toy_parts()).unwrap();
        assert_eq!(ds.records().len(), 8);
        assert_eq!(ds.evaluators().len(), 3);
        let w = ds.weight_table();
        assert_eq!(w.weight("e1", "Check-in"), Weight::from_integer(10));
        assert_eq!(w.weight("e3", "Check-in"), Weight::from_integer(8));
    }

    #[test]
    fn grade_out_of_scale_is_reported() {
        let mut parts = toy_parts();
        parts.records[0].grade = Grade2x::from_grade(6);
        let err = validate_dataset(parts).unwrap_err();
        assert!(err.to_string().contains("grade out of scale"), "{err}");
    }

    #[test]
    fn half_grade_is_out_of_scale() {
        let mut parts = toy_parts();
        parts.records[0].grade = Grade2x::from_doubled(7);
        assert!(matches!(
            validate_dataset(parts).unwrap_err().issues(),
            [ValidationIssue::GradeOutOfScale { .. }]
        ));
    }

    #[test]
    fn non_decreasing_boundaries_are_reported() {
        let mut parts = toy_parts();
        parts.boundaries = BoundaryProfile::parse_uniform("4.5, 3.5, 3.5, 1.5").unwrap();
        let err = validate_dataset(parts).unwrap_err();
        assert!(
            err.to_string()
                .contains("boundaries not strictly decreasing"),
            "{err}"
        );
    }

    #[test]
    fn every_violation_is_collected() {
        let mut parts = toy_parts();
        parts.boundaries = BoundaryProfile::parse_uniform("4.5, 3.5, 2.5").unwrap();
        let dup = parts.records[1].clone();
        parts.records.push(dup);
        parts.records[0].grade = Grade2x::from_grade(0);
        parts.records.push(EvaluationRecord {
            alternative: "Y".into(),
            evaluator: "e9".into(),
            criterion: "Spa".into(),
            grade: Grade2x::from_grade(3),
        });
        let issues = validate_dataset(parts).unwrap_err().0;
        let has = |pred: fn(&ValidationIssue) -> bool| issues.iter().any(pred);
        assert!(has(|i| matches!(
            i,
            ValidationIssue::BoundaryCount {
                expected: 4,
                found: 3,
                ..
            }
        )));
        assert!(has(|i| matches!(
            i,
            ValidationIssue::DuplicateRecord { .. }
        )));
        assert!(has(|i| matches!(
            i,
            ValidationIssue::GradeOutOfScale { .. }
        )));
        assert!(has(|i| matches!(
            i,
            ValidationIssue::UnknownReference {
                kind: "alternative",
                ..
            }
        )));
        assert!(has(|i| matches!(
            i,
            ValidationIssue::UnknownReference {
                kind: "evaluator",
                ..
            }
        )));
        assert!(has(|i| matches!(
            i,
            ValidationIssue::UnknownReference {
                kind: "criterion",
                ..
            }
        )));
    }

    #[test]
    fn record_outside_evaluator_criteria_set() {
        let mut parts = toy_parts();
        parts.records[0].criterion = "Gymnasium".into();
        let issues = validate_dataset(parts).unwrap_err().0;
        assert!(issues
            .iter()
            .any(|i| matches!(i, ValidationIssue::CriterionNotUsed { .. })));
    }

    #[test]
    fn explicit_boundaries_are_checked() {
        let mut parts = toy_parts();
        parts.boundaries = BoundaryProfile::default().with_explicit(
            "Check-in",
            "e1",
            vec![Grade2x::from_doubled(5), Grade2x::from_doubled(7)],
        );
        let issues = validate_dataset(parts).unwrap_err().0;
        assert_eq!(issues.len(), 2);
        assert!(issues[0].to_string().contains("`Check-in`"));
    }

    #[test]
    fn explicit_lookup_falls_back_to_uniform() {
        let b = BoundaryProfile::default().with_explicit(
            "Cr1",
            "e1",
            vec![
                Grade2x::from_grade(5),
                Grade2x::from_grade(4),
                Grade2x::from_grade(3),
                Grade2x::from_grade(2),
            ],
        );
        assert_eq!(b.levels_for("Cr1", "e1")[0], Grade2x::from_grade(5));
        assert_eq!(b.levels_for("Cr1", "e2")[0], Grade2x::from_doubled(9));
    }

    #[test]
    fn json_round_trip_revalidates() {
        let ds = validate_dataset(toy_parts()).unwrap();
        let json = serde_json::to_string(&ds).unwrap();
        let back: Dataset = serde_json::from_str(&json).unwrap();
        assert_eq!(back, ds);

        let mut parts = toy_parts();
        parts.records[0].grade = Grade2x::from_grade(9);
        let bad = serde_json::to_string(&parts).unwrap();
        assert!(serde_json::from_str::<Dataset>(&bad).is_err());
    }

    #[test]
    fn credibility_vector_invariants() {
        assert!(CredibilityVector::from_milli("X", &[250, 250, 250, 250]).is_ok());
        let e = CredibilityVector::from_milli("X", &[900, 800, 700, 600]).unwrap_err();
        assert!(e.to_string().contains("credibility not non-decreasing"));
        assert!(CredibilityVector::from_milli("X", &[100, 1001]).is_err());
        assert!(CredibilityVector::new("X", vec![1], 0).is_err());
    }

    #[test]
    fn credibility_display_rounds_half_up() {
        let v = CredibilityVector::new("X", vec![17, 17, 35, 54], 64).unwrap();
        assert_eq!(v.display(1), "0.266");
        assert_eq!(v.display(3), "0.547");
        assert_eq!(v.display(4), "0.844");
        assert_eq!(v.sigma(4), Ratio::new(27, 32));
        assert_eq!(v.lowest_floor(), (64, 64));
    }
}
