use alloc::string::String;
use alloc::vec::Vec;

use super::config::{sample_growth_rate, GrowthLaw, RootRate, SimConfig};
use super::rates::lifetime;
use crate::numerics::{splitmix64, RngStream};
use crate::{Error, Result};

const ROOT_KEY: u64 = 0x5eed_0000_0000_0001;

/// Sub-stream id of the daughter `branch` of the cell with id `parent`.
pub fn child_key(parent: u64, branch: u8) -> u64 {
    splitmix64(parent.wrapping_mul(2).wrapping_add(1 + branch as u64))
}

/// One cell of the genealogy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellRecord {
    /// Position in [`TreeResult::cells`].
    pub id: usize,
    pub parent: Option<usize>,
    /// `0` or `1`; `0` for the root.
    pub branch: u8,
    pub generation: u32,
    /// Random sub-stream of the cell, a hash of its path from the root.
    pub key: u64,
    /// Birth time.
    pub b: f64,
    /// Lifetime.
    pub zeta: f64,
    /// Size at birth.
    pub xi: f64,
    /// Growth rate.
    pub tau: f64,
    /// Division time `b + zeta`.
    pub d: f64,
}

/// Every cell born before the horizon, in breadth-first order.
///
/// Cells with `d < horizon` have both daughters recorded; the others are
/// leaves whose division lies at or beyond the horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeResult {
    pub cells: Vec<CellRecord>,
    pub horizon: f64,
    pub growth: GrowthLaw,
    pub stream: RngStream,
}

/// A cell alive at some time, with its current size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LivingCell {
    pub id: usize,
    pub size: f64,
    pub rate: f64,
}

/// Simulates a division tree up to `config.horizon`.
///
/// Each cell draws its growth rate, division size and split fraction from its
/// own sub-stream, keyed by its path from the root, so the tree is a pure
/// function of `(config, stream)`.
pub fn simulate_tree(config: &SimConfig, stream: RngStream) -> Result<TreeResult> {
    config.validate()?;
    let horizon = config.horizon;
    let mut cells: Vec<CellRecord> = Vec::new();
    // Birth sizes of the cells waiting in `cells[next..]` are final; their own
    // draws happen when they are reached.
    cells.push(CellRecord {
        id: 0,
        parent: None,
        branch: 0,
        generation: 0,
        key: ROOT_KEY,
        b: 0.0,
        zeta: 0.0,
        xi: config.x_root,
        tau: 0.0,
        d: 0.0,
    });
    let mut next = 0;
    while next < cells.len() {
        let cell = cells[next];
        let mut rng = stream.substream(cell.key);
        let tau = match (cell.parent, config.root_rate) {
            (None, RootRate::Fixed(v)) => v,
            (None, RootRate::DrawnFromKernel) => sample_growth_rate(&config.kernel, None, &mut rng)?,
            (Some(p), _) => sample_growth_rate(&config.kernel, Some(cells[p].tau), &mut rng)?,
        };
        let (s, zeta) = loop {
            let s = config.division.sample_division_size(config.growth, cell.xi, tau, &mut rng)?;
            let zeta = lifetime(config.growth, cell.xi, s, tau)?;
            if zeta > 0.0 {
                break (s, zeta);
            }
        };
        let d = cell.b + zeta;
        {
            let c = &mut cells[next];
            c.tau = tau;
            c.zeta = zeta;
            c.d = d;
        }
        if d < horizon {
            if cells.len() + 2 > config.cell_cap {
                return Err(Error::HorizonTooLarge { cells: cells.len() + 2, cap: config.cell_cap });
            }
            let (x0, x1) = config.split.split(s, &mut rng);
            for (branch, xi) in [(0u8, x0), (1u8, x1)] {
                let id = cells.len();
                cells.push(CellRecord {
                    id,
                    parent: Some(next),
                    branch,
                    generation: cell.generation + 1,
                    key: child_key(cell.key, branch),
                    b: d,
                    zeta: 0.0,
                    xi,
                    tau: 0.0,
                    d: 0.0,
                });
            }
        }
        next += 1;
    }
    Ok(TreeResult { cells, horizon, growth: config.growth, stream })
}

impl TreeResult {
    fn check_time(&self, t: f64) -> Result<()> {
        if !(t >= 0.0) || t > self.horizon {
            return Err(Error::BeyondHorizon { t, horizon: self.horizon });
        }
        Ok(())
    }

    fn alive(&self, t: f64) -> impl Iterator<Item = &CellRecord> + '_ {
        self.cells.iter().filter(move |c| c.b <= t && t < c.d)
    }

    /// Number of divisions strictly before `t`.
    pub fn divisions_before(&self, t: f64) -> usize {
        self.cells.iter().filter(|c| c.d < t && c.d < self.horizon).count()
    }

    /// `|{u : b_u <= t < d_u}|`.
    pub fn count_at(&self, t: f64) -> Result<usize> {
        self.check_time(t)?;
        Ok(self.alive(t).count())
    }

    /// Root-to-cell path as `r` followed by the branch digits.
    pub fn path(&self, id: usize) -> String {
        let mut digits = Vec::new();
        let mut cur = id;
        while let Some(p) = self.cells[cur].parent {
            digits.push(b'0' + self.cells[cur].branch);
            cur = p;
        }
        let mut out = String::with_capacity(digits.len() + 1);
        out.push('r');
        out.extend(digits.iter().rev().map(|&d| d as char));
        out
    }

    /// Number of cells with `d < horizon` (internal nodes).
    pub fn internal_nodes(&self) -> usize {
        self.cells.iter().filter(|c| c.d < self.horizon).count()
    }
}

/// Cells alive at `t` with their current sizes.
pub fn living_at(tree: &TreeResult, t: f64) -> Result<Vec<LivingCell>> {
    tree.check_time(t)?;
    Ok(tree
        .alive(t)
        .map(|c| LivingCell { id: c.id, size: tree.growth.size_at(c.xi, c.tau, t - c.b), rate: c.tau })
        .collect())
}

/// Total size of the cells alive at `t` (compensated summation).
pub fn biomass_at(tree: &TreeResult, t: f64) -> Result<f64> {
    tree.check_time(t)?;
    let (mut sum, mut comp) = (0.0_f64, 0.0_f64);
    for c in tree.alive(t) {
        let x = tree.growth.size_at(c.xi, c.tau, t - c.b);
        let s = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - s) + x;
        } else {
            comp += (x - s) + sum;
        }
        sum = s;
    }
    Ok(sum + comp)
}
