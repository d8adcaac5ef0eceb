//! Sensitivity of the pessimistic sorting to the cut-level.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decimal::parse_scaled;
use crate::error::{Error, Result};
use crate::model::{CredibilityTable, CredibilityVector, CutLevel};
use crate::sorting::assign_pessimistic;

/// Strictly increasing cut-levels in (0, 1].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LambdaGrid(Vec<CutLevel>);

impl LambdaGrid {
    pub fn new(points: Vec<CutLevel>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyGrid);
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Grid("cut-levels must be strictly increasing".into()));
        }
        Ok(LambdaGrid(points))
    }

    /// `start, start + step, ...` up to and including `stop` when it falls on
    /// the grid. All arguments in thousandths.
    pub fn from_range(start: u32, stop: u32, step: u32) -> Result<Self> {
        if step == 0 {
            return Err(Error::Grid("step must be positive".into()));
        }
        if start > stop {
            return Err(Error::EmptyGrid);
        }
        let points = (start..=stop)
            .step_by(step as usize)
            .map(CutLevel::from_milli)
            .collect::<Result<Vec<_>>>()?;
        LambdaGrid::new(points)
    }

    pub fn points(&self) -> &[CutLevel] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl Default for LambdaGrid {
    /// 0.05 to 1.00 in steps of 0.05.
    fn default() -> Self {
        LambdaGrid::from_range(50, 1000, 50).expect("default grid is valid")
    }
}

impl FromStr for LambdaGrid {
    type Err = Error;

    /// Parses `start:stop:step`, e.g. `0.05:1.00:0.05`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, stop, step] = parts.as_slice() else {
            return Err(Error::format(s, "expected start:stop:step"));
        };
        let milli = |v: &str| -> Result<u32> {
            u32::try_from(parse_scaled(v, 3)?).map_err(|_| Error::format(v, "negative grid value"))
        };
        LambdaGrid::from_range(milli(start)?, milli(stop)?, milli(step)?)
    }
}

/// Category index per alternative per grid point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SensitivityMatrix {
    grid: LambdaGrid,
    categories: usize,
    rows: BTreeMap<String, Vec<usize>>,
}

impl SensitivityMatrix {
    /// Assembles a matrix from already computed rows, e.g. a published table.
    pub fn from_rows(
        grid: LambdaGrid,
        categories: usize,
        rows: BTreeMap<String, Vec<usize>>,
    ) -> Result<Self> {
        for (id, row) in &rows {
            if row.len() != grid.len() {
                return Err(Error::Grid(format!(
                    "row `{id}` has {} cells for {} cut-levels",
                    row.len(),
                    grid.len()
                )));
            }
            if row.iter().any(|&c| c == 0 || c > categories) {
                return Err(Error::Grid(format!(
                    "row `{id}` has a category outside 1..={categories}"
                )));
            }
        }
        Ok(SensitivityMatrix {
            grid,
            categories,
            rows,
        })
    }

    pub fn grid(&self) -> &LambdaGrid {
        &self.grid
    }

    pub fn categories(&self) -> usize {
        self.categories
    }

    pub fn row(&self, alternative: &str) -> Option<&[usize]> {
        self.rows.get(alternative).map(Vec::as_slice)
    }

    pub fn rows(&self) -> impl Iterator<Item = (&str, &[usize])> {
        self.rows.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    pub fn cell(&self, alternative: &str, lambda: CutLevel) -> Option<usize> {
        let col = self.grid.points().iter().position(|&l| l == lambda)?;
        self.rows.get(alternative).map(|r| r[col])
    }

    /// Cells where `self` and `reference` disagree, in alternative then
    /// cut-level order. Alternatives or cut-levels missing from either side
    /// are ignored.
    pub fn diff(&self, reference: &SensitivityMatrix) -> Vec<CellDiff> {
        let mut out = Vec::new();
        for (id, row) in &self.rows {
            let Some(other) = reference.rows.get(id) else {
                continue;
            };
            for (col, &lambda) in self.grid.points().iter().enumerate() {
                let Some(ref_col) = reference.grid.points().iter().position(|&l| l == lambda)
                else {
                    continue;
                };
                if row[col] != other[ref_col] {
                    out.push(CellDiff {
                        alternative: id.clone(),
                        lambda,
                        computed: row[col],
                        reference: other[ref_col],
                    });
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellDiff {
    pub alternative: String,
    pub lambda: CutLevel,
    pub computed: usize,
    pub reference: usize,
}

impl fmt::Display for CellDiff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}@{}: computed C{}, reference C{}",
            self.alternative, self.lambda, self.computed, self.reference
        )
    }
}

/// Below this many cells the matrix is filled on the calling thread.
const PARALLEL_MIN_CELLS: usize = 50_000;

/// Assigns every alternative at every grid point. Each cell is an
/// independent call to the single cut-level sorting rule.
pub fn build_sensitivity_matrix(
    table: &CredibilityTable,
    grid: &LambdaGrid,
    categories: usize,
) -> Result<SensitivityMatrix> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let row = |sigma: &CredibilityVector| -> Result<(String, Vec<usize>)> {
        let cells = grid
            .points()
            .iter()
            .map(|&lambda| assign_pessimistic(sigma, lambda, categories).map(|a| a.category))
            .collect::<Result<Vec<_>>>()?;
        Ok((sigma.alternative().to_string(), cells))
    };
    let rows = if table.len() * grid.len() < PARALLEL_MIN_CELLS {
        table.iter().map(row).collect::<Result<BTreeMap<_, _>>>()?
    } else {
        let sigmas: Vec<_> = table.iter().collect();
        sigmas
            .into_par_iter()
            .map(row)
            .collect::<Result<BTreeMap<_, _>>>()?
    };
    Ok(SensitivityMatrix {
        grid: grid.clone(),
        categories,
        rows,
    })
}

/// Number of grid points assigned to each category of one matrix row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionProfile {
    pub alternative: String,
    pub counts: Vec<usize>,
}

pub fn transition_profile(
    alternative: &str,
    row: &[usize],
    categories: usize,
) -> TransitionProfile {
    let mut counts = vec![0; categories];
    for &c in row {
        counts[c - 1] += 1;
    }
    TransitionProfile {
        alternative: alternative.to_string(),
        counts,
    }
}
