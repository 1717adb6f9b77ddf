//! Stadium itineraries and the itinerary partition of phase space.
//!
//! An itinerary of depth `n` lists the boundary pieces of `x, T x, …, Tⁿ x`.
//! Consecutive bounces on the same semicircle carry the sense of their
//! angular advance, so the alphabet is `T`, `B` and `R±`, `L±`.

use std::collections::HashMap;
use std::io::Write;

use rayon::prelude::*;

use crate::dynamics::{PhasePoint, Piece, Stadium};
use crate::error::{ChaosError, Result};

const SENSE_CCW: u64 = 0b0100;
const SENSE_CW: u64 = 0b1000;

fn piece_code(p: Piece) -> u64 {
    match p {
        Piece::RightArc => 0,
        Piece::TopEdge => 1,
        Piece::LeftArc => 2,
        Piece::BottomEdge => 3,
    }
}

fn piece_char(code: u64) -> char {
    match code & 3 {
        0 => 'R',
        1 => 'T',
        2 => 'L',
        _ => 'B',
    }
}

/// Packed itinerary: 4 bits per symbol, depth ≤ 15.
pub fn itinerary_key(st: &Stadium, x: PhasePoint, n: usize) -> Result<u64> {
    if n > 15 {
        return Err(ChaosError::InvalidParameter("itinerary depth above 15".into()));
    }
    let mut key = piece_code(st.piece_of(x.q));
    let mut cur = x;
    for _ in 0..n {
        let b = st.bounce(cur)?;
        let mut sym = piece_code(b.to_piece);
        if b.to_piece.is_arc() && b.to_piece == b.from_piece {
            sym |= if cur.p > 0.0 { SENSE_CCW } else { SENSE_CW };
        }
        key = (key << 4) | sym;
        cur = b.to;
    }
    // leading marker so that depth is recoverable
    Ok(key | (1u64 << (4 * (n + 1))))
}

pub fn render_key(key: u64) -> String {
    let mut syms = Vec::new();
    let mut k = key;
    while k > 1 {
        syms.push(k & 0xf);
        k >>= 4;
    }
    syms.reverse();
    let mut s = String::new();
    for sym in syms {
        s.push(piece_char(sym));
        if sym & SENSE_CCW != 0 {
            s.push('+');
        } else if sym & SENSE_CW != 0 {
            s.push('-');
        }
    }
    s
}

pub fn itinerary(st: &Stadium, x: PhasePoint, n: usize) -> Result<String> {
    Ok(render_key(itinerary_key(st, x, n)?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionOptions {
    pub grid_q: usize,
    pub grid_p: usize,
    /// Minimum cell area as a fraction of the chart area.
    pub area_floor: f64,
    /// Bisection depth used to resolve cells straddling sample boundaries.
    pub refine_tol: f64,
}

impl Default for PartitionOptions {
    fn default() -> Self {
        Self {
            grid_q: 2048,
            grid_p: 2048,
            area_floor: 1e-7,
            refine_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionCell {
    pub itinerary: String,
    /// Area estimate as a fraction of the chart.
    pub area: f64,
    pub representative: PhasePoint,
    /// Number of grid samples in the cell (0 for cells found only by refinement).
    pub samples: usize,
    /// Centres of grid pixels whose four neighbours share the itinerary (capped).
    pub interior: Vec<PhasePoint>,
    /// Grid pixel size `(Δq, Δp)`.
    pub pixel: (f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ItineraryPartition {
    pub n: usize,
    pub gamma: f64,
    pub cells: Vec<PartitionCell>,
    /// 4-connected same-itinerary pixel fragments on the sampling grid.
    pub fragments: usize,
    pub resolution_floor: f64,
    /// Cells found by refinement whose area could not be resolved above the floor.
    pub unresolved: usize,
    /// Grid samples whose itinerary failed (tangency); excluded.
    pub failed_samples: usize,
}

impl ItineraryPartition {
    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    pub fn write_summary_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "n,gamma,cell_count,resolution_floor,unresolved")?;
        writeln!(
            w,
            "{},{:.16e},{},{:.16e},{}",
            self.n,
            self.gamma,
            self.cell_count(),
            self.resolution_floor,
            self.unresolved
        )
    }

    pub fn write_cells_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "q,p,itinerary,area,samples")?;
        for c in &self.cells {
            writeln!(
                w,
                "{:.16e},{:.16e},{},{:.16e},{}",
                c.representative.q, c.representative.p, c.itinerary, c.area, c.samples
            )?;
        }
        Ok(())
    }
}

struct Grid {
    nq: usize,
    np: usize,
    dq: f64,
    dp: f64,
}

impl Grid {
    fn point(&self, i: usize, j: usize) -> PhasePoint {
        PhasePoint::new((i as f64 + 0.5) * self.dq, -1.0 + (j as f64 + 0.5) * self.dp)
    }
}

/// Partition of the chart into cells of constant depth-`n` itinerary.
///
/// Grid samples are labelled by itinerary and grouped into 4-connected
/// fragments (with the periodic wrap in `q`). Neighbouring samples with
/// different itineraries are bisected along their joining segment so that
/// itineraries whose cells fall between samples are still discovered; those
/// get a local fine-grid area estimate. A cell is one itinerary label; the
/// fragment count is reported separately because thin cells break into
/// several pixel fragments at any finite resolution.
pub fn stadium_partition(gamma: f64, n: usize, opts: &PartitionOptions) -> Result<ItineraryPartition> {
    let st = Stadium::new(gamma)?;
    let per = st.perimeter();
    let grid = Grid {
        nq: opts.grid_q,
        np: opts.grid_p,
        dq: per / opts.grid_q as f64,
        dp: 2.0 / opts.grid_p as f64,
    };
    let total = grid.nq * grid.np;
    let keys: Vec<u64> = (0..total)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / grid.np, idx % grid.np);
            itinerary_key(&st, grid.point(i, j), n).unwrap_or(0)
        })
        .collect();
    let failed_samples = keys.iter().filter(|k| **k == 0).count();
    let fragments = count_fragments(&grid, &keys);

    // per-itinerary sample counts and interior pixels
    let mut stats: HashMap<u64, (usize, PhasePoint, Vec<u32>)> = HashMap::new();
    for i in 0..grid.nq {
        for j in 0..grid.np {
            let idx = i * grid.np + j;
            let k = keys[idx];
            if k == 0 {
                continue;
            }
            let e = stats.entry(k).or_insert((0, grid.point(i, j), Vec::new()));
            e.0 += 1;
            let interior = j > 0
                && j + 1 < grid.np
                && keys[((i + 1) % grid.nq) * grid.np + j] == k
                && keys[((i + grid.nq - 1) % grid.nq) * grid.np + j] == k
                && keys[idx + 1] == k
                && keys[idx - 1] == k;
            if interior && e.2.len() < MAX_INTERIOR {
                e.2.push(idx as u32);
            }
        }
    }

    let mut edges = Vec::new();
    for i in 0..grid.nq {
        for j in 0..grid.np {
            let a = i * grid.np + j;
            let right = ((i + 1) % grid.nq) * grid.np + j;
            if keys[a] != keys[right] {
                edges.push((a, right, true));
            }
            if j + 1 < grid.np && keys[a] != keys[a + 1] {
                edges.push((a, a + 1, false));
            }
        }
    }
    let discovered: Vec<Vec<(u64, PhasePoint)>> = edges
        .par_iter()
        .map(|&(a, b, along_q)| {
            let pa = grid.point(a / grid.np, a % grid.np);
            let pb = if along_q {
                PhasePoint::new(pa.q + grid.dq, pa.p)
            } else {
                PhasePoint::new(pa.q, pa.p + grid.dp)
            };
            let mut found = Vec::new();
            refine_segment(&st, n, pa, keys[a], pb, keys[b], opts.refine_tol, &mut found);
            found
        })
        .collect();
    let mut extra: HashMap<u64, PhasePoint> = HashMap::new();
    for list in discovered {
        for (k, x) in list {
            if k != 0 && !stats.contains_key(&k) {
                extra.entry(k).or_insert(x);
            }
        }
    }

    let mut cells: Vec<PartitionCell> = Vec::new();
    let mut unresolved = 0;
    for (key, (count, rep, interior)) in stats {
        let area = count as f64 / total as f64;
        if area < opts.area_floor {
            unresolved += 1;
            continue;
        }
        cells.push(PartitionCell {
            itinerary: render_key(key),
            area,
            representative: rep,
            samples: count,
            interior: interior
                .into_iter()
                .map(|idx| {
                    let idx = idx as usize;
                    grid.point(idx / grid.np, idx % grid.np)
                })
                .collect(),
            pixel: (grid.dq, grid.dp),
        });
    }
    for (key, rep) in extra {
        let area = local_area(&st, n, key, rep, &grid) / (per * 2.0);
        if area < opts.area_floor || area == 0.0 {
            unresolved += 1;
            continue;
        }
        cells.push(PartitionCell {
            itinerary: render_key(key),
            area,
            representative: rep,
            samples: 0,
            interior: Vec::new(),
            pixel: (grid.dq, grid.dp),
        });
    }
    cells.sort_by(|a, b| a.itinerary.cmp(&b.itinerary));
    Ok(ItineraryPartition {
        n,
        gamma,
        cells,
        fragments,
        resolution_floor: opts.area_floor,
        unresolved,
        failed_samples,
    })
}

const MAX_INTERIOR: usize = 4096;

fn count_fragments(grid: &Grid, keys: &[u64]) -> usize {
    let total = grid.nq * grid.np;
    let mut seen = vec![false; total];
    let mut stack = Vec::new();
    let mut count = 0;
    for start in 0..total {
        if seen[start] || keys[start] == 0 {
            continue;
        }
        count += 1;
        let key = keys[start];
        seen[start] = true;
        stack.push(start);
        while let Some(idx) = stack.pop() {
            let (i, j) = (idx / grid.np, idx % grid.np);
            let mut nb = [usize::MAX; 4];
            nb[0] = ((i + 1) % grid.nq) * grid.np + j;
            nb[1] = ((i + grid.nq - 1) % grid.nq) * grid.np + j;
            if j + 1 < grid.np {
                nb[2] = idx + 1;
            }
            if j > 0 {
                nb[3] = idx - 1;
            }
            for m in nb {
                if m != usize::MAX && !seen[m] && keys[m] == key {
                    seen[m] = true;
                    stack.push(m);
                }
            }
        }
    }
    count
}

/// Area of a sub-pixel cell from a 64×64 sampling of the surrounding 3×3 pixels.
fn local_area(st: &Stadium, n: usize, key: u64, at: PhasePoint, grid: &Grid) -> f64 {
    let m = 64;
    let (wq, wp) = (3.0 * grid.dq, 3.0 * grid.dp);
    let mut hits = 0usize;
    for a in 0..m {
        for b in 0..m {
            let q = at.q - 0.5 * wq + wq * (a as f64 + 0.5) / m as f64;
            let p = at.p - 0.5 * wp + wp * (b as f64 + 0.5) / m as f64;
            if p.abs() >= 1.0 {
                continue;
            }
            if itinerary_key(st, PhasePoint::new(st.wrap(q), p), n).ok() == Some(key) {
                hits += 1;
            }
        }
    }
    hits as f64 * wq * wp / (m * m) as f64
}

#[allow(clippy::too_many_arguments)]
fn refine_segment(
    st: &Stadium,
    n: usize,
    a: PhasePoint,
    ka: u64,
    b: PhasePoint,
    kb: u64,
    tol: f64,
    out: &mut Vec<(u64, PhasePoint)>,
) {
    let len = (b.q - a.q).hypot(b.p - a.p);
    if len < tol || ka == kb {
        return;
    }
    let m = PhasePoint::new(0.5 * (a.q + b.q), 0.5 * (a.p + b.p));
    let mq = PhasePoint::new(st.wrap(m.q), m.p);
    let km = itinerary_key(st, mq, n).unwrap_or(0);
    if km != ka && km != kb {
        out.push((km, mq));
    }
    refine_segment(st, n, a, ka, m, km, tol, out);
    refine_segment(st, n, m, km, b, kb, tol, out);
}

/// Stadium itinerary of a periodic orbit: one symbol per bounce, with the
/// sense of same-arc advances.
pub fn stadium_itinerary_of_orbit(st: &Stadium, points: &[PhasePoint]) -> String {
    let n = points.len();
    let mut s = String::new();
    for i in 0..n {
        let a = st.piece_of(points[i].q);
        let b = st.piece_of(points[(i + 1) % n].q);
        s.push(piece_char(piece_code(a)));
        if a.is_arc() && a == b {
            s.push(if points[i].p > 0.0 { '+' } else { '-' });
        }
    }
    s
}

/// `ln(count(n)/count(n−1))`.
pub fn entropy_bound(counts: &[usize]) -> Vec<f64> {
    counts
        .windows(2)
        .map(|w| (w[1] as f64 / w[0] as f64).ln())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_round_trip() {
        let st = Stadium::new(1.0).unwrap();
        let s = itinerary(&st, PhasePoint::new(0.0, 0.0), 2).unwrap();
        assert_eq!(s, "RLR");
    }

    #[test]
    fn entropy_of_doubling() {
        let e = entropy_bound(&[2, 4, 8]);
        assert!(e.iter().all(|h| (h - 2f64.ln()).abs() < 1e-15));
    }
}
