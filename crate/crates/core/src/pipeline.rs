//! End-to-end orchestration: ingest, credibility, sensitivity, grouping,
//! diagnostics, and report rendering.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::config::{EntryPoint, PipelineConfig};
use crate::credibility::credibility_table;
use crate::diagnostics::{group_mode_table, recommend, Action, GroupModeTable, Recommendation};
use crate::error::{Error, Result, Stage};
use crate::grouping::{apply_group_override, cluster_alternatives, GroupAssignment};
use crate::io::{
    assignments_csv, credibility_csv, credibility_fraction, groups_json, modes_csv,
    read_credibility_csv, read_evaluations_csv, read_modes_csv, read_sensitivity_csv,
    recommendations_csv, sensitivity_csv, DatasetSettings,
};
use crate::model::{CredibilityTable, Dataset};
use crate::sensitivity::{
    build_sensitivity_matrix, transition_profile, CellDiff, SensitivityMatrix,
};
use crate::sorting::{sort_all, Assignment};

/// How far to run. Each target includes the stages before it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Target {
    Credibility,
    Sort,
    Sensitivity,
    Group,
    Diagnose,
    All,
}

/// Everything a run produced, plus the rendered output files.
#[derive(Debug, Default)]
pub struct ReportBundle {
    pub dataset: Option<Dataset>,
    pub credibility: Option<CredibilityTable>,
    pub assignments: Option<Vec<Assignment>>,
    pub sensitivity: Option<SensitivityMatrix>,
    pub sensitivity_diff: Option<Vec<CellDiff>>,
    pub groups: Option<GroupAssignment>,
    pub modes: Option<GroupModeTable>,
    pub recommendations: Option<Vec<Recommendation>>,
    /// (file name, contents) in emission order.
    pub files: Vec<(String, String)>,
}

impl ReportBundle {
    pub fn file(&self, name: &str) -> Option<&str> {
        self.files
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, c)| c.as_str())
    }

    /// Writes every rendered file into `dir`, creating it if needed.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for (name, contents) in &self.files {
            let path = dir.join(name);
            fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
        }
        Ok(())
    }
}

fn staged<T>(stage: Stage, result: Result<T>) -> Result<T> {
    result.map_err(|e| e.at_stage(stage))
}

fn count(n: usize, one: &str, many: &str) -> String {
    format!("{n} {}", if n == 1 { one } else { many })
}

fn check_exists(path: &Path) -> Result<()> {
    if path.exists() {
        Ok(())
    } else {
        Err(Error::io(
            path,
            std::io::Error::new(std::io::ErrorKind::NotFound, "input file not found"),
        ))
    }
}

/// Runs every stage.
pub fn run_pipeline(config: &PipelineConfig) -> Result<ReportBundle> {
    run_until(config, Target::All)
}

/// Runs stages in order up to `target`, stopping at the first error. Errors
/// are tagged with the stage that raised them.
pub fn run_until(config: &PipelineConfig, target: Target) -> Result<ReportBundle> {
    let mut bundle = ReportBundle::default();
    staged(Stage::Config, check_inputs(config))?;

    if config.entry == EntryPoint::ModeTable {
        return run_from_modes(config, target, bundle);
    }

    let table = match config.entry {
        EntryPoint::RawRecords => {
            let path = config.evaluations.as_deref().expect("checked by config");
            let settings = DatasetSettings {
                scale: config.scale.clone(),
                categories: config.categories.clone(),
                boundaries: config.boundaries.clone(),
                declared_criteria: config.declared_criteria.clone(),
            };
            let dataset = staged(
                Stage::Ingest,
                read_evaluations_csv(path, config.weights.as_deref(), &settings),
            )?;
            let table = staged(Stage::Credibility, credibility_table(&dataset))?;
            bundle.dataset = Some(dataset);
            table
        }
        _ => {
            let path = config.credibility.as_deref().expect("checked by config");
            let table = staged(Stage::Ingest, read_credibility_csv(path))?;
            if table.levels() + 1 != config.categories.len() {
                return Err(Error::Config(format!(
                    "credibility table has {} levels but {} categories are configured",
                    table.levels(),
                    config.categories.len()
                ))
                .at_stage(Stage::Ingest));
            }
            table
        }
    };
    let k = config.categories.len();
    bundle
        .files
        .push(("credibility.csv".into(), credibility_csv(&table)));
    bundle.credibility = Some(table);
    let table = bundle.credibility.as_ref().expect("just set");

    if let Some(lambda) = config.lambda.filter(|_| target >= Target::Sort) {
        let assignments = staged(Stage::Sorting, sort_all(table, lambda, k))?;
        bundle.files.push((
            "assignments.csv".into(),
            assignments_csv(&assignments, &config.categories),
        ));
        bundle.assignments = Some(assignments);
    } else if target == Target::Sort {
        return Err(Error::Config("sorting requires a lambda".into()).at_stage(Stage::Sorting));
    }

    if target >= Target::Sensitivity {
        let sm = staged(
            Stage::Sensitivity,
            build_sensitivity_matrix(table, &config.grid, k),
        )?;
        if let Some(reference) = &config.reference_sensitivity {
            let printed = staged(
                Stage::Sensitivity,
                read_sensitivity_csv(reference, &config.categories),
            )?;
            let diff = sm.diff(&printed);
            bundle
                .files
                .push(("sensitivity_diff.csv".into(), diff_csv(&diff)));
            bundle.sensitivity_diff = Some(diff);
        }
        bundle.files.push((
            "sensitivity.csv".into(),
            sensitivity_csv(&sm, &config.categories),
        ));
        bundle.sensitivity = Some(sm);
    }

    if target >= Target::Group {
        let groups = staged(Stage::Grouping, group(config, table))?;
        bundle
            .files
            .push(("groups.json".into(), groups_json(&groups)));
        bundle.groups = Some(groups);
    }

    if target >= Target::Diagnose {
        let groups = bundle.groups.as_ref().expect("grouping ran");
        let modes = match (&bundle.dataset, &config.modes) {
            (Some(dataset), _) => Some(staged(
                Stage::Diagnostics,
                group_mode_table(dataset.records(), groups, &config.scale),
            )?),
            (None, Some(path)) => Some(staged(Stage::Diagnostics, read_modes_csv(path))?),
            (None, None) => None,
        };
        let ranking = groups.ranking.clone();
        if let Some(modes) = modes {
            diagnose(config, &mut bundle, modes, &ranking)?;
        }
    }

    if target == Target::All {
        let report = render_report(config, &bundle);
        bundle.files.push(("report.txt".into(), report));
    }
    Ok(bundle)
}

fn check_inputs(config: &PipelineConfig) -> Result<()> {
    let inputs = [
        &config.evaluations,
        &config.weights,
        &config.credibility,
        &config.modes,
        &config.override_file,
        &config.reference_sensitivity,
    ];
    for path in inputs.into_iter().flatten() {
        check_exists(path)?;
    }
    Ok(())
}

fn group(config: &PipelineConfig, table: &CredibilityTable) -> Result<GroupAssignment> {
    match config.group_override()? {
        Some(groups) => apply_group_override(table, &groups),
        None => {
            let k = config.k_groups.unwrap_or_else(|| table.len().min(4));
            cluster_alternatives(table, k, config.linkage)
        }
    }
}

fn diagnose(
    config: &PipelineConfig,
    bundle: &mut ReportBundle,
    modes: GroupModeTable,
    ranking: &[String],
) -> Result<()> {
    staged(Stage::Diagnostics, modes.validate(&config.scale))?;
    let recs = staged(
        Stage::Diagnostics,
        recommend(&modes, ranking, &config.scale),
    )?;
    bundle.files.push(("modes.csv".into(), modes_csv(&modes)));
    bundle
        .files
        .push(("recommendations.csv".into(), recommendations_csv(&recs)));
    bundle.modes = Some(modes);
    bundle.recommendations = Some(recs);
    Ok(())
}

fn run_from_modes(
    config: &PipelineConfig,
    target: Target,
    mut bundle: ReportBundle,
) -> Result<ReportBundle> {
    if target < Target::Diagnose {
        return Err(Error::Config(
            "the mode-table entry only supports diagnose and pipeline".into(),
        )
        .at_stage(Stage::Config));
    }
    let path = config.modes.as_deref().expect("checked by config");
    let modes = staged(Stage::Ingest, read_modes_csv(path))?;
    let ranking = config
        .ranking
        .clone()
        .unwrap_or_else(|| modes.groups().to_vec());
    diagnose(config, &mut bundle, modes, &ranking)?;
    if target == Target::All {
        let report = render_report(config, &bundle);
        bundle.files.push(("report.txt".into(), report));
    }
    Ok(bundle)
}

fn diff_csv(diff: &[CellDiff]) -> String {
    let mut out = String::from("alternative,lambda,computed,reference\n");
    for d in diff {
        let _ = writeln!(
            out,
            "{},{},C{},C{}",
            d.alternative, d.lambda, d.computed, d.reference
        );
    }
    out
}

fn render_report(config: &PipelineConfig, bundle: &ReportBundle) -> String {
    let mut r = String::new();
    let cats = &config.categories;
    let label = |p: usize| {
        cats.get(p)
            .map_or_else(String::new, |c| format!("{} ({})", c.id, c.label))
    };
    let _ = writeln!(r, "Level-of-satisfaction sorting report");
    let _ = writeln!(r, "entry point: {}", config.entry);
    if let Some(ds) = &bundle.dataset {
        let _ = writeln!(
            r,
            "dataset: {}, {}, {}, {}",
            count(ds.alternatives().len(), "alternative", "alternatives"),
            count(ds.evaluators().len(), "evaluator", "evaluators"),
            count(ds.criteria().len(), "criterion", "criteria"),
            count(ds.records().len(), "evaluation", "evaluations")
        );
    }

    if let Some(table) = &bundle.credibility {
        let _ = writeln!(r, "\nCredibility degrees");
        for v in table.iter() {
            let cells: Vec<String> = (1..=v.levels())
                .map(|p| {
                    if bundle.dataset.is_some() {
                        format!("b{p}={} ({})", credibility_fraction(v, p), v.display(p))
                    } else {
                        format!("b{p}={}", v.display(p))
                    }
                })
                .collect();
            let _ = writeln!(r, "  {}: {}", v.alternative(), cells.join("  "));
        }
    }

    if let Some(assignments) = &bundle.assignments {
        if let Some(first) = assignments.first() {
            let _ = writeln!(r, "\nAssignment at lambda = {}", first.lambda);
        }
        for a in assignments {
            let _ = writeln!(r, "  {}: {}", a.alternative, label(a.category));
        }
    }

    if let Some(sm) = &bundle.sensitivity {
        let grid = sm.grid().points();
        let _ = writeln!(
            r,
            "\nSensitivity over {} cut-levels ({} to {}); grid points per category",
            grid.len(),
            grid[0],
            grid[grid.len() - 1]
        );
        for (id, row) in sm.rows() {
            let profile = transition_profile(id, row, sm.categories());
            let counts: Vec<String> = profile.counts.iter().map(usize::to_string).collect();
            let _ = writeln!(r, "  {id}: {}", counts.join(" "));
        }
    }
    if let Some(diff) = &bundle.sensitivity_diff {
        let _ = writeln!(
            r,
            "\nCells differing from the reference matrix: {}",
            diff.len()
        );
        for d in diff {
            let _ = writeln!(r, "  {d}");
        }
    }

    if let Some(groups) = &bundle.groups {
        let _ = writeln!(r, "\nGroups (best to worst)");
        for (rank, g) in groups.ranking.iter().enumerate() {
            let _ = writeln!(r, "  {}. {}: {}", rank + 1, g, groups.groups[g].join(", "));
        }
    }

    if let Some(recs) = &bundle.recommendations {
        let _ = writeln!(r, "\nRecommendations");
        let ranking: Vec<&String> = match (&bundle.groups, &bundle.modes) {
            (Some(g), _) => g.ranking.iter().collect(),
            (None, Some(m)) => config
                .ranking
                .as_ref()
                .map_or_else(|| m.groups().iter().collect(), |r| r.iter().collect()),
            _ => Vec::new(),
        };
        for g in ranking {
            for action in [Action::Priority, Action::Improve] {
                let crits: Vec<&str> = recs
                    .iter()
                    .filter(|x| &x.group == g && x.action == action)
                    .map(|x| x.criterion.as_str())
                    .collect();
                let shown = if crits.is_empty() {
                    "-".to_string()
                } else {
                    crits.join(", ")
                };
                let _ = writeln!(r, "  {g} {action}: {shown}");
            }
            let maintained = recs
                .iter()
                .filter(|x| &x.group == g && x.action == Action::Maintain)
                .count();
            let _ = writeln!(
                r,
                "  {g} Maintain: {}",
                count(maintained, "criterion", "criteria")
            );
        }
    }
    r
}
