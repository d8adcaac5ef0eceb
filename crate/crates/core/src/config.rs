//! Pipeline configuration.
//!
//! Config files are plain `key = value` lines; `#` starts a comment. Relative
//! paths are resolved against the directory of the file that names them.
//!
//! ```text
//! entry       = credibility-table      # raw-records | credibility-table | mode-table
//! evaluations = evaluations.csv        # alternative,evaluator,criterion,grade
//! weights     = weights.csv            # evaluator,criterion,weight
//! credibility = table.csv              # alternative,b1,b2,...
//! modes       = modes.csv              # criterion,<group>...
//! criteria    = Cr1, Cr2, Cr3          # declared criteria; others are rejected
//! scale       = 1:5
//! scale_labels = Very Bad, Bad, Fair, Good, Very Good
//! categories  = Very Good, Good, Fair, Bad, Very Bad
//! boundaries  = 4.5, 3.5, 2.5, 1.5
//! grid        = 0.05:1.00:0.05
//! lambda      = 0.70
//! k_groups    = 4
//! linkage     = average                # single | complete | average | exhaustive-small
//! override    = groups.conf            # file of `label = id, id, ...` lines
//! group.A     = VCP, CWB               # inline override, one key per group
//! ranking     = A, B, C, D             # group order for the mode-table entry
//! reference   = printed.csv            # sensitivity matrix to diff against
//! out         = out/
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grouping::Linkage;
use crate::model::{BoundaryProfile, CategorySet, CutLevel, Scale};
use crate::sensitivity::LambdaGrid;

const PATH_KEYS: [&str; 7] = [
    "evaluations",
    "weights",
    "credibility",
    "modes",
    "override",
    "reference",
    "out",
];

const KNOWN_KEYS: [&str; 18] = [
    "entry",
    "evaluations",
    "weights",
    "credibility",
    "modes",
    "criteria",
    "scale",
    "scale_labels",
    "categories",
    "boundaries",
    "grid",
    "lambda",
    "k_groups",
    "linkage",
    "override",
    "ranking",
    "reference",
    "out",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntryPoint {
    RawRecords,
    CredibilityTable,
    ModeTable,
}

impl FromStr for EntryPoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "raw-records" => Ok(EntryPoint::RawRecords),
            "credibility-table" => Ok(EntryPoint::CredibilityTable),
            "mode-table" => Ok(EntryPoint::ModeTable),
            other => Err(Error::Config(format!(
                "unknown entry `{other}` (expected raw-records, credibility-table or mode-table)"
            ))),
        }
    }
}

impl fmt::Display for EntryPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EntryPoint::RawRecords => "raw-records",
            EntryPoint::CredibilityTable => "credibility-table",
            EntryPoint::ModeTable => "mode-table",
        })
    }
}

/// Raw key/value settings, merged from a config file and command-line flags.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConfigMap {
    values: BTreeMap<String, String>,
}

impl ConfigMap {
    pub fn parse(text: &str, base_dir: Option<&Path>) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", n + 1)))?;
            let key = key.trim().to_string();
            if !KNOWN_KEYS.contains(&key.as_str()) && !key.starts_with("group.") {
                return Err(Error::Config(format!(
                    "line {}: unknown key `{key}`",
                    n + 1
                )));
            }
            let mut value = value.trim().to_string();
            if let (true, Some(base)) = (PATH_KEYS.contains(&key.as_str()), base_dir) {
                if Path::new(&value).is_relative() {
                    value = base.join(&value).to_string_lossy().into_owned();
                }
            }
            if values.insert(key.clone(), value).is_some() {
                return Err(Error::Config(format!(
                    "line {}: duplicate key `{key}`",
                    n + 1
                )));
            }
        }
        Ok(ConfigMap { values })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        ConfigMap::parse(&text, path.parent())
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.values.insert(key.to_string(), value.into());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        self.get(key).map(PathBuf::from)
    }

    fn parsed<T: FromStr<Err = Error>>(&self, key: &str) -> Result<Option<T>> {
        self.get(key)
            .map(|v| {
                v.parse()
                    .map_err(|e: Error| Error::Config(format!("{key}: {e}")))
            })
            .transpose()
    }

    fn inline_groups(&self) -> BTreeMap<String, Vec<String>> {
        self.values
            .iter()
            .filter_map(|(k, v)| {
                k.strip_prefix("group.")
                    .map(|label| (label.to_string(), split_list(v)))
            })
            .collect()
    }
}

pub fn split_list(value: &str) -> Vec<String> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

/// Reads a group override file: one `label = id, id, ...` line per group.
pub fn read_override(path: &Path) -> Result<BTreeMap<String, Vec<String>>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut groups = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (label, ids) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!(
                "{}:{}: expected `label = id, id, ...`",
                path.display(),
                n + 1
            ))
        })?;
        let label = label.trim();
        let label = label.strip_prefix("group.").unwrap_or(label).to_string();
        if groups.insert(label.clone(), split_list(ids)).is_some() {
            return Err(Error::Config(format!(
                "{}:{}: group `{label}` defined twice",
                path.display(),
                n + 1
            )));
        }
    }
    Ok(groups)
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub entry: EntryPoint,
    pub evaluations: Option<PathBuf>,
    pub weights: Option<PathBuf>,
    pub credibility: Option<PathBuf>,
    pub modes: Option<PathBuf>,
    pub declared_criteria: Option<Vec<String>>,
    pub scale: Scale,
    pub categories: CategorySet,
    pub boundaries: BoundaryProfile,
    pub grid: LambdaGrid,
    pub lambda: Option<CutLevel>,
    pub k_groups: Option<usize>,
    pub linkage: Linkage,
    pub override_file: Option<PathBuf>,
    pub inline_override: BTreeMap<String, Vec<String>>,
    pub ranking: Option<Vec<String>>,
    pub reference_sensitivity: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

impl PipelineConfig {
    pub fn from_map(map: &ConfigMap) -> Result<Self> {
        let evaluations = map.path("evaluations");
        let credibility = map.path("credibility");
        let modes = map.path("modes");
        let entry = match map.parsed::<EntryPoint>("entry")? {
            Some(e) => e,
            None if evaluations.is_some() => EntryPoint::RawRecords,
            None if credibility.is_some() => EntryPoint::CredibilityTable,
            None if modes.is_some() => EntryPoint::ModeTable,
            None => {
                return Err(Error::Config(
                    "no input: give evaluations, credibility or modes".into(),
                ))
            }
        };
        if evaluations.is_some() && credibility.is_some() {
            return Err(Error::Config(
                "exactly one entry point: evaluations and credibility are mutually exclusive"
                    .into(),
            ));
        }
        let required = match entry {
            EntryPoint::RawRecords => ("evaluations", evaluations.is_some()),
            EntryPoint::CredibilityTable => ("credibility", credibility.is_some()),
            EntryPoint::ModeTable => ("modes", modes.is_some()),
        };
        if !required.1 {
            return Err(Error::Config(format!(
                "entry {entry} requires `{}`",
                required.0
            )));
        }
        if entry == EntryPoint::RawRecords && modes.is_some() {
            return Err(Error::Config(
                "modes are computed from the evaluations; do not also give `modes`".into(),
            ));
        }

        let scale = match map.get("scale") {
            None => Scale::default(),
            Some(range) => {
                let (lo, hi) = range
                    .split_once(':')
                    .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)))
                    .ok_or_else(|| {
                        Error::Config(format!("scale: expected min:max, got `{range}`"))
                    })?;
                match map.get("scale_labels") {
                    Some(labels) => {
                        let labels = split_list(labels);
                        let map: BTreeMap<i64, String> = (lo..).zip(labels).collect();
                        Scale::new(lo, hi, map)?
                    }
                    None if (lo, hi) == (1, 5) => Scale::default(),
                    None => Scale::numeric(lo, hi)?,
                }
            }
        };
        if map.get("scale").is_none() && map.get("scale_labels").is_some() {
            return Err(Error::Config("scale_labels requires scale".into()));
        }
        let categories = match map.get("categories") {
            Some(labels) => CategorySet::from_labels(&split_list(labels))?,
            None => CategorySet::default(),
        };
        let boundaries = match map.get("boundaries") {
            Some(b) => BoundaryProfile::parse_uniform(b)
                .map_err(|e| Error::Config(format!("boundaries: {e}")))?,
            None => BoundaryProfile::default(),
        };
        let k_groups = map
            .get("k_groups")
            .map(|v| {
                v.parse::<usize>()
                    .map_err(|_| Error::Config(format!("k_groups: `{v}` is not a count")))
            })
            .transpose()?;

        Ok(PipelineConfig {
            entry,
            evaluations,
            weights: map.path("weights"),
            credibility,
            modes,
            declared_criteria: map.get("criteria").map(split_list),
            scale,
            categories,
            boundaries,
            grid: map.parsed("grid")?.unwrap_or_default(),
            lambda: map.parsed("lambda")?,
            k_groups,
            linkage: map.parsed("linkage")?.unwrap_or_default(),
            override_file: map.path("override"),
            inline_override: map.inline_groups(),
            ranking: map.get("ranking").map(split_list),
            reference_sensitivity: map.path("reference"),
            out: map.path("out"),
        })
    }

    /// The group override, from the override file or inline `group.*` keys.
    pub fn group_override(&self) -> Result<Option<BTreeMap<String, Vec<String>>>> {
        match (&self.override_file, self.inline_override.is_empty()) {
            (Some(_), false) => Err(Error::Config(
                "give either an override file or inline group.* keys, not both".into(),
            )),
            (Some(path), true) => read_override(path).map(Some),
            (None, false) => Ok(Some(self.inline_override.clone())),
            (None, true) => Ok(None),
        }
    }
}
