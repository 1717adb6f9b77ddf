use crate::dynamics::PhasePoint;

use super::FixedPointCensus;

/// Rectangular partition of a chart window into `nq × np` cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellGrid {
    pub q_range: (f64, f64),
    pub p_range: (f64, f64),
    pub nq: usize,
    pub np: usize,
}

impl CellGrid {
    pub fn unit_square(nq: usize, np: usize) -> Self {
        Self {
            q_range: (0.0, 1.0),
            p_range: (0.0, 1.0),
            nq,
            np,
        }
    }

    pub fn whole(q_range: (f64, f64), p_range: (f64, f64)) -> Self {
        Self {
            q_range,
            p_range,
            nq: 1,
            np: 1,
        }
    }

    pub fn cells(&self) -> usize {
        self.nq * self.np
    }

    pub fn cell_of(&self, x: PhasePoint) -> Option<usize> {
        let fq = (x.q - self.q_range.0) / (self.q_range.1 - self.q_range.0);
        let fp = (x.p - self.p_range.0) / (self.p_range.1 - self.p_range.0);
        if !(0.0..1.0).contains(&fq) || !(0.0..1.0).contains(&fp) {
            return None;
        }
        let i = ((fq * self.nq as f64) as usize).min(self.nq - 1);
        let j = ((fp * self.np as f64) as usize).min(self.np - 1);
        Some(i * self.np + j)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UniformityReport {
    pub per_cell: Vec<f64>,
    pub total: f64,
    /// `F_n(α) / (ΔV/V)` per cell.
    pub ratio: Vec<f64>,
    /// Fixed points skipped because `det(Mₙ − 1)` vanished.
    pub singular: usize,
}

impl UniformityReport {
    /// Max |ratio − 1| over cells.
    pub fn max_fluctuation(&self) -> f64 {
        self.ratio.iter().map(|r| (r - 1.0).abs()).fold(0.0, f64::max)
    }
}

/// `F_n(α) = Σ 1/|det(Mₙ − 1)|` over the census fixed points in each cell.
pub fn uniformity_sum(census: &FixedPointCensus, cells: &CellGrid) -> UniformityReport {
    let mut per_cell = vec![0.0; cells.cells()];
    let mut singular = 0;
    for (orbit, x) in census.all_fixed_points() {
        let det = orbit.monodromy.det_minus_identity();
        if det.abs() < 1e-12 {
            singular += 1;
            continue;
        }
        if let Some(c) = cells.cell_of(x) {
            per_cell[c] += 1.0 / det.abs();
        }
    }
    let total = per_cell.iter().sum();
    let frac = 1.0 / cells.cells() as f64;
    let ratio = per_cell.iter().map(|f| f / frac).collect();
    UniformityReport {
        per_cell,
        total,
        ratio,
        singular,
    }
}
