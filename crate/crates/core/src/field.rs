//! Sampled `(u, u_t, u_x)` on the nodes of one region.

use serde::Serialize;

use crate::geometry::Region;
use crate::problem::Grid;

/// Solution value and first derivatives at a point.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct NodeValue {
    pub u: f64,
    pub ut: f64,
    pub ux: f64,
}

/// Convergence record of one time strip.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StripReport {
    /// First and last time level solved in this strip.
    pub levels: (usize, usize),
    pub iterations: usize,
    /// Sup-norm change of `(u, u_t, u_x)` after each iteration.
    pub updates: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct PicardReport {
    pub strips: Vec<StripReport>,
}

impl PicardReport {
    pub fn max_iterations(&self) -> usize {
        self.strips.iter().map(|s| s.iterations).max().unwrap_or(0)
    }

    pub fn final_update(&self) -> f64 {
        self.strips
            .iter()
            .filter_map(|s| s.updates.last().copied())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Row {
    pub lo: i64,
    pub vals: Vec<NodeValue>,
}

impl Row {
    pub fn hi(&self) -> i64 {
        self.lo + self.vals.len() as i64 - 1
    }
}

/// Nodes of one closed region (plus the domain of dependence of the
/// window), one contiguous row per time level.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionField {
    region: Region,
    grid: Grid,
    rows: Vec<Row>,
    report: PicardReport,
}

impl RegionField {
    pub(crate) fn new(region: Region, grid: Grid, rows: Vec<Row>, report: PicardReport) -> Self {
        debug_assert_eq!(rows.len(), grid.nt + 1);
        RegionField {
            region,
            grid,
            rows,
            report,
        }
    }

    pub fn region(&self) -> Region {
        self.region
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn report(&self) -> &PicardReport {
        &self.report
    }

    /// Inclusive index range stored at level `n`.
    pub fn row_range(&self, n: usize) -> Option<(i64, i64)> {
        let row = self.rows.get(n)?;
        (!row.vals.is_empty()).then(|| (row.lo, row.hi()))
    }

    pub fn get(&self, n: usize, i: i64) -> Option<NodeValue> {
        let row = self.rows.get(n)?;
        let k = i - row.lo;
        (k >= 0).then(|| row.vals.get(k as usize).copied()).flatten()
    }

    pub fn contains(&self, n: usize, i: i64) -> bool {
        self.get(n, i).is_some()
    }

    /// All stored nodes as `(n, i, value)`.
    pub fn nodes(&self) -> impl Iterator<Item = (usize, i64, NodeValue)> + '_ {
        self.rows.iter().enumerate().flat_map(|(n, row)| {
            row.vals
                .iter()
                .enumerate()
                .map(move |(k, v)| (n, row.lo + k as i64, *v))
        })
    }

    /// Applies `edit` to every stored node. Mainly for fault injection in
    /// verification tests.
    pub fn map_nodes(&mut self, mut edit: impl FnMut(usize, i64, &mut NodeValue)) {
        for (n, row) in self.rows.iter_mut().enumerate() {
            let lo = row.lo;
            for (k, v) in row.vals.iter_mut().enumerate() {
                edit(n, lo + k as i64, v);
            }
        }
    }

    pub fn sup_abs(&self) -> f64 {
        self.nodes()
            .map(|(_, _, v)| v.u.abs().max(v.ut.abs()).max(v.ux.abs()))
            .fold(0.0, f64::max)
    }

    /// Sup-norm distance over the common nodes of two fields.
    pub fn sup_distance(&self, other: &RegionField) -> f64 {
        self.nodes()
            .filter_map(|(n, i, a)| {
                other.get(n, i).map(|b| {
                    (a.u - b.u).abs().max((a.ut - b.ut).abs()).max((a.ux - b.ux).abs())
                })
            })
            .fold(0.0, f64::max)
    }
}
