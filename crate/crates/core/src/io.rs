//! CSV and JSON readers and writers for every file the pipeline consumes or
//! emits. All output uses comma separators, LF line endings and a fixed
//! column order.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use crate::decimal::{format_milli, parse_scaled};
use crate::diagnostics::{natural_cmp, GroupModeTable, Recommendation};
use crate::error::{Error, Result};
use crate::grouping::GroupAssignment;
use crate::model::{
    to_doubled, Alternative, BoundaryProfile, CategorySet, CredibilityTable, CredibilityVector,
    Criterion, Dataset, DatasetParts, EvaluationRecord, Evaluator, Scale, Weight, WeightEntry,
};
use crate::sensitivity::{LambdaGrid, SensitivityMatrix};
use crate::sorting::Assignment;

pub const EVALUATIONS_HEADER: [&str; 4] = ["alternative", "evaluator", "criterion", "grade"];
pub const WEIGHTS_HEADER: [&str; 3] = ["evaluator", "criterion", "weight"];

/// Dataset-wide settings that do not come from the evaluations file.
#[derive(Debug, Clone, Default)]
pub struct DatasetSettings {
    pub scale: Scale,
    pub categories: CategorySet,
    pub boundaries: BoundaryProfile,
    /// When set, criteria outside this list are rejected instead of being
    /// declared on first use.
    pub declared_criteria: Option<Vec<String>>,
}

fn csv_error(path: &Path, line: u64, message: impl Into<String>) -> Error {
    Error::Csv {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn open_csv(path: &Path) -> Result<csv::Reader<fs::File>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(file))
}

fn read_header(path: &Path, reader: &mut csv::Reader<fs::File>) -> Result<Vec<String>> {
    let header = reader
        .headers()
        .map_err(|e| csv_error(path, 1, e.to_string()))?;
    Ok(header.iter().map(str::to_string).collect())
}

fn expect_header(path: &Path, found: &[String], expected: &[&str]) -> Result<()> {
    if found
        .iter()
        .map(String::as_str)
        .ne(expected.iter().copied())
    {
        return Err(csv_error(
            path,
            1,
            format!(
                "expected header `{}`, found `{}`",
                expected.join(","),
                found.join(",")
            ),
        ));
    }
    Ok(())
}

/// Iterates rows as (line number, fields), checking the field count.
fn rows(
    path: &Path,
    reader: &mut csv::Reader<fs::File>,
    width: usize,
) -> Result<Vec<(u64, Vec<String>)>> {
    let mut out = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            csv_error(path, line, e.to_string())
        })?;
        let line = row.position().map_or(0, |p| p.line());
        if row.len() == 1 && row[0].is_empty() {
            continue;
        }
        if row.len() != width {
            return Err(csv_error(
                path,
                line,
                format!(
                    "malformed row: expected {width} fields, found {}",
                    row.len()
                ),
            ));
        }
        out.push((line, row.iter().map(str::to_string).collect()));
    }
    Ok(out)
}

/// Reads `alternative,evaluator,criterion,grade` rows (and optionally
/// `evaluator,criterion,weight` rows) into a validated dataset. Each
/// evaluator's criteria set is the set of criteria it actually graded.
pub fn read_evaluations_csv(
    path: &Path,
    weights_path: Option<&Path>,
    settings: &DatasetSettings,
) -> Result<Dataset> {
    let mut reader = open_csv(path)?;
    let header = read_header(path, &mut reader)?;
    expect_header(path, &header, &EVALUATIONS_HEADER)?;
    let declared: Option<BTreeSet<&str>> = settings
        .declared_criteria
        .as_ref()
        .map(|list| list.iter().map(String::as_str).collect());

    let mut alternatives = BTreeSet::new();
    let mut evaluators: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    let mut seen_criteria = BTreeSet::new();
    let mut records = Vec::new();
    for (line, fields) in rows(path, &mut reader, 4)? {
        let [alternative, evaluator, criterion, grade] =
            <[String; 4]>::try_from(fields).expect("width checked");
        if alternative.is_empty() || evaluator.is_empty() || criterion.is_empty() {
            return Err(csv_error(path, line, "malformed row: empty identifier"));
        }
        if let Some(declared) = &declared {
            if !declared.contains(criterion.as_str()) {
                return Err(csv_error(
                    path,
                    line,
                    format!("criterion `{criterion}` is not declared"),
                ));
            }
        }
        let grade = to_doubled(&grade)
            .ok()
            .filter(|g| g.whole().is_some())
            .ok_or_else(|| csv_error(path, line, format!("malformed grade `{grade}`")))?;
        alternatives.insert(alternative.clone());
        evaluators
            .entry(evaluator.clone())
            .or_default()
            .insert(criterion.clone());
        seen_criteria.insert(criterion.clone());
        records.push(EvaluationRecord {
            alternative,
            evaluator,
            criterion,
            grade,
        });
    }
    if records.is_empty() {
        return Err(csv_error(path, 1, "no records"));
    }

    let mut criteria: Vec<Criterion> = match &settings.declared_criteria {
        Some(list) => list.iter().map(|c| Criterion::new(c.as_str())).collect(),
        None => seen_criteria
            .iter()
            .map(|c| Criterion::new(c.as_str()))
            .collect(),
    };
    criteria.sort_by(|a, b| natural_cmp(&a.id, &b.id));

    let mut weights = Vec::new();
    if let Some(wpath) = weights_path {
        let mut wreader = open_csv(wpath)?;
        let header = read_header(wpath, &mut wreader)?;
        expect_header(wpath, &header, &WEIGHTS_HEADER)?;
        for (line, fields) in rows(wpath, &mut wreader, 3)? {
            let [evaluator, criterion, weight] =
                <[String; 3]>::try_from(fields).expect("width checked");
            let weight: Weight = weight
                .parse()
                .map_err(|e: Error| csv_error(wpath, line, e.to_string()))?;
            if evaluator == "*" {
                let c = criteria
                    .iter_mut()
                    .find(|c| c.id == criterion)
                    .ok_or_else(|| {
                        csv_error(wpath, line, format!("unknown criterion `{criterion}`"))
                    })?;
                c.weight = weight;
            } else {
                weights.push(WeightEntry {
                    evaluator,
                    criterion,
                    weight,
                });
            }
        }
    }

    let parts = DatasetParts {
        scale: settings.scale.clone(),
        categories: settings.categories.clone(),
        boundaries: settings.boundaries.clone(),
        alternatives: alternatives.into_iter().map(Alternative::new).collect(),
        evaluators: evaluators
            .into_iter()
            .map(|(id, criteria_used)| Evaluator { id, criteria_used })
            .collect(),
        criteria,
        weights,
        records,
    };
    Ok(crate::model::validate_dataset(parts)?)
}

/// Reads `alternative,b1,b2,...` rows of three-decimal credibility values.
pub fn read_credibility_csv(path: &Path) -> Result<CredibilityTable> {
    let mut reader = open_csv(path)?;
    let header = read_header(path, &mut reader)?;
    let levels = header.len().saturating_sub(1);
    let expected: Vec<String> = std::iter::once("alternative".to_string())
        .chain((1..=levels).map(|p| format!("b{p}")))
        .collect();
    if levels == 0 || header != expected {
        return Err(csv_error(
            path,
            1,
            format!(
                "expected header `alternative,b1,b2,...`, found `{}`",
                header.join(",")
            ),
        ));
    }
    let mut table = CredibilityTable::new(levels);
    for (line, fields) in rows(path, &mut reader, levels + 1)? {
        let milli = fields[1..]
            .iter()
            .map(|v| parse_scaled(v, 3))
            .collect::<Result<Vec<_>>>()
            .map_err(|e| csv_error(path, line, e.to_string()))?;
        if milli.iter().any(|&m| !(0..=1000).contains(&m)) {
            return Err(csv_error(path, line, "credibility outside [0, 1]"));
        }
        let vector =
            CredibilityVector::from_milli(fields[0].as_str(), &milli).map_err(|e| match e {
                Error::Credibility { reason, .. } => csv_error(path, line, reason),
                other => other,
            })?;
        table
            .insert(vector)
            .map_err(|e| csv_error(path, line, e.to_string()))?;
    }
    Ok(table)
}

fn writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> String {
    let bytes = w.into_inner().expect("writing to memory cannot fail");
    String::from_utf8(bytes).expect("CSV output is UTF-8")
}

fn write_row<I, S>(w: &mut csv::Writer<Vec<u8>>, fields: I)
where
    I: IntoIterator<Item = S>,
    S: AsRef<[u8]>,
{
    w.write_record(fields)
        .expect("writing to memory cannot fail");
}

/// Credibility values rounded half-up to three decimals.
pub fn credibility_csv(table: &CredibilityTable) -> String {
    let mut w = writer();
    write_row(
        &mut w,
        std::iter::once("alternative".to_string())
            .chain((1..=table.levels()).map(|p| format!("b{p}"))),
    );
    for v in table.iter() {
        write_row(
            &mut w,
            std::iter::once(v.alternative().to_string())
                .chain((1..=v.levels()).map(|p| v.display(p))),
        );
    }
    finish(w)
}

/// Credibility as exact fractions in weight units, e.g. `17/64`.
pub fn credibility_fraction(v: &CredibilityVector, p: usize) -> String {
    let (n, d) = v.raw(p);
    format!(
        "{}/{}",
        format_milli(n as i64, 0),
        format_milli(d as i64, 0)
    )
}

pub fn sensitivity_csv(sm: &SensitivityMatrix, categories: &CategorySet) -> String {
    let mut w = writer();
    write_row(
        &mut w,
        std::iter::once("alternative".to_string())
            .chain(sm.grid().points().iter().map(|l| l.to_string())),
    );
    for (id, row) in sm.rows() {
        write_row(
            &mut w,
            std::iter::once(id.to_string())
                .chain(row.iter().map(|&c| category_code(categories, c))),
        );
    }
    finish(w)
}

fn category_code(categories: &CategorySet, p: usize) -> String {
    categories
        .get(p)
        .map_or_else(|| format!("C{p}"), |c| c.id.clone())
}

/// Reads a sensitivity matrix in the format written by [`sensitivity_csv`].
/// Cells may name categories by id (`C2`) or as `C_2`.
pub fn read_sensitivity_csv(path: &Path, categories: &CategorySet) -> Result<SensitivityMatrix> {
    let mut reader = open_csv(path)?;
    let header = read_header(path, &mut reader)?;
    if header.first().map(String::as_str) != Some("alternative") || header.len() < 2 {
        return Err(csv_error(
            path,
            1,
            "expected header `alternative,<cut-levels>`",
        ));
    }
    let points = header[1..]
        .iter()
        .map(|h| h.parse())
        .collect::<Result<Vec<_>>>()
        .map_err(|e| csv_error(path, 1, e.to_string()))?;
    let grid = LambdaGrid::new(points).map_err(|e| csv_error(path, 1, e.to_string()))?;
    let mut matrix = BTreeMap::new();
    for (line, fields) in rows(path, &mut reader, header.len())? {
        let row = fields[1..]
            .iter()
            .map(|cell| {
                categories
                    .index_of(&cell.replace('_', ""))
                    .ok_or_else(|| csv_error(path, line, format!("unknown category `{cell}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        matrix.insert(fields[0].clone(), row);
    }
    SensitivityMatrix::from_rows(grid, categories.len(), matrix)
}

pub fn assignments_csv(assignments: &[Assignment], categories: &CategorySet) -> String {
    let mut w = writer();
    write_row(&mut w, ["alternative", "lambda", "category", "label"]);
    for a in assignments {
        let label = categories.get(a.category).map_or("", |c| c.label.as_str());
        write_row(
            &mut w,
            [
                a.alternative.clone(),
                a.lambda.to_string(),
                category_code(categories, a.category),
                label.to_string(),
            ],
        );
    }
    finish(w)
}

/// `{"groups": {label: [ids]}, "ranking": [labels]}`, pretty printed.
pub fn groups_json(groups: &GroupAssignment) -> String {
    let mut s = serde_json::to_string_pretty(groups).expect("groups serialize");
    s.push('\n');
    s
}

pub fn read_groups_json(path: &Path) -> Result<GroupAssignment> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let parsed: GroupAssignment =
        serde_json::from_str(&text).map_err(|e| csv_error(path, e.line() as u64, e.to_string()))?;
    GroupAssignment::with_ranking(parsed.groups, parsed.ranking)
}

/// `criterion,<group>...` with one row per criterion; absent modes are empty.
pub fn modes_csv(table: &GroupModeTable) -> String {
    let mut w = writer();
    write_row(
        &mut w,
        std::iter::once("criterion".to_string()).chain(table.groups().iter().cloned()),
    );
    for c in table.criteria() {
        write_row(
            &mut w,
            std::iter::once(c.clone()).chain(
                table
                    .groups()
                    .iter()
                    .map(|g| table.mode(g, c).map_or_else(String::new, |m| m.to_string())),
            ),
        );
    }
    finish(w)
}

/// Reads a mode table written by [`modes_csv`] (or transcribed by hand).
/// Groups keep their column order.
pub fn read_modes_csv(path: &Path) -> Result<GroupModeTable> {
    let mut reader = open_csv(path)?;
    let header = read_header(path, &mut reader)?;
    if header.first().map(String::as_str) != Some("criterion") || header.len() < 2 {
        return Err(csv_error(path, 1, "expected header `criterion,<group>...`"));
    }
    let groups: Vec<String> = header[1..].to_vec();
    let mut entries = Vec::new();
    for (line, fields) in rows(path, &mut reader, header.len())? {
        for (group, cell) in groups.iter().zip(&fields[1..]) {
            if cell.is_empty() {
                continue;
            }
            let grade: i64 = cell
                .parse()
                .map_err(|_| csv_error(path, line, format!("malformed mode `{cell}`")))?;
            entries.push((group.clone(), fields[0].clone(), grade));
        }
    }
    Ok(GroupModeTable::new(groups, entries))
}

pub fn recommendations_csv(recs: &[Recommendation]) -> String {
    let mut w = writer();
    write_row(&mut w, ["group", "criterion", "action", "rationale"]);
    for r in recs {
        write_row(
            &mut w,
            [
                r.group.as_str(),
                r.criterion.as_str(),
                &r.action.to_string(),
                r.rationale.as_str(),
            ],
        );
    }
    finish(w)
}
