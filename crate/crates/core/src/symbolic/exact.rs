//! Baker's-map symbolic dynamics, exact in rational arithmetic.

use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};

use rayon::prelude::*;

use crate::dynamics::PhasePoint;
use crate::orbits::{CellGrid, UniformityReport};
use crate::error::{ChaosError, Result};

pub type Rational = Ratio<i128>;

/// Symbol sequence with the decimal point at the present.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolSequence {
    /// Past symbols, most recent first (binary digits of `p`).
    pub past: Vec<u8>,
    /// Future symbols (binary digits of `q`).
    pub future: Vec<u8>,
}

impl SymbolSequence {
    /// `L`/`R` rendering as `past-reversed.future`.
    pub fn render(&self) -> String {
        let s = |b: &u8| if *b == 0 { 'L' } else { 'R' };
        let past: String = self.past.iter().rev().map(s).collect();
        let fut: String = self.future.iter().map(s).collect();
        format!("{past}.{fut}")
    }
}

pub fn parse_code(code: &str) -> Result<Vec<u8>> {
    code.chars()
        .map(|c| match c {
            'L' | '0' => Ok(0),
            'R' | '1' => Ok(1),
            other => Err(ChaosError::BadSymbols(format!("unknown symbol {other:?}"))),
        })
        .collect()
}

fn digits(mut x: f64, bits: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(bits);
    for _ in 0..bits {
        x *= 2.0;
        if x >= 1.0 {
            out.push(1);
            x -= 1.0;
        } else {
            out.push(0);
        }
    }
    out
}

fn value(bits: &[u8]) -> f64 {
    bits.iter()
        .rev()
        .fold(0.0, |acc, b| (acc + *b as f64) * 0.5)
}

pub fn baker_encode(x: PhasePoint, bits: usize) -> Result<SymbolSequence> {
    if !(0.0..1.0).contains(&x.q) || !(0.0..1.0).contains(&x.p) {
        return Err(ChaosError::OutOfChart {
            q: x.q,
            p: x.p,
            chart: "unit square",
        });
    }
    Ok(SymbolSequence {
        past: digits(x.p, bits),
        future: digits(x.q, bits),
    })
}

pub fn baker_decode(s: &SymbolSequence) -> PhasePoint {
    PhasePoint::new(value(&s.future), value(&s.past))
}

/// Shift the decimal point one symbol to the right (one baker step).
pub fn shift(s: &SymbolSequence) -> SymbolSequence {
    let mut past = s.past.clone();
    let mut future = s.future.clone();
    if !future.is_empty() {
        let b = future.remove(0);
        past.insert(0, b);
    }
    SymbolSequence { past, future }
}

fn code_int(bits: &[u8]) -> i128 {
    bits.iter().fold(0i128, |acc, b| acc * 2 + *b as i128)
}

/// Exact periodic point `(I(γ)/(2ⁿ−1), I(γ̃)/(2ⁿ−1))` of a code.
pub fn periodic_point_exact(code: &str) -> Result<(Rational, Rational)> {
    let bits = parse_code(code)?;
    let n = bits.len();
    if n == 0 {
        return Err(ChaosError::BadSymbols("empty code".into()));
    }
    if n > 100 {
        return Err(ChaosError::BadSymbols("code longer than 100 symbols".into()));
    }
    if bits.iter().all(|b| *b == 1) {
        return Err(ChaosError::BadSymbols(
            "all-R code aliases the origin".into(),
        ));
    }
    let den = (1i128 << n) - 1;
    let rev: Vec<u8> = bits.iter().rev().copied().collect();
    Ok((
        Rational::new(code_int(&bits), den),
        Rational::new(code_int(&rev), den),
    ))
}

pub fn periodic_point_from_code(code: &str) -> Result<PhasePoint> {
    let (q, p) = periodic_point_exact(code)?;
    Ok(PhasePoint::new(q.to_f64().unwrap(), p.to_f64().unwrap()))
}

pub fn baker_step_exact(q: Rational, p: Rational) -> (Rational, Rational) {
    let two = Rational::from_integer(2);
    let half = Rational::new(1, 2);
    let e = (q * two).floor();
    (q * two - e, p * half + e * half)
}

/// Check `Tⁿ(x) = x` exactly for the periodic point of `code`.
pub fn is_exactly_periodic(code: &str) -> Result<bool> {
    let (q0, p0) = periodic_point_exact(code)?;
    let (mut q, mut p) = (q0, p0);
    for _ in 0..code.chars().count() {
        (q, p) = baker_step_exact(q, p);
    }
    Ok(q == q0 && p == p0)
}

/// All `2ⁿ − 1` distinct fixed points of `Tⁿ`, exactly.
pub fn enumerate_fixed_points(n: usize) -> Vec<(Rational, Rational)> {
    let den = (1i128 << n) - 1;
    (0..den)
        .map(|i| {
            let bits: Vec<u8> = (0..n).map(|k| ((i >> (n - 1 - k)) & 1) as u8).collect();
            let rev: Vec<u8> = bits.iter().rev().copied().collect();
            (Rational::new(i, den), Rational::new(code_int(&rev), den))
        })
        .collect()
}

/// Exact `Σ 1/|det(Mₙ − 1)|` over the enumerated fixed points of `Tⁿ`,
/// with each monodromy multiplied out step by step along the orbit.
pub fn exact_uniformity_total(n: usize) -> Rational {
    let one = Rational::one();
    let two = Rational::from_integer(2);
    let half = Rational::new(1, 2);
    let mut total = Rational::zero();
    for (q0, p0) in enumerate_fixed_points(n) {
        let (mut q, mut p) = (q0, p0);
        let (mut a, mut d) = (one, one);
        for _ in 0..n {
            a *= two;
            d *= half;
            (q, p) = baker_step_exact(q, p);
        }
        debug_assert!(q == q0 && p == p0);
        let det = (a - one) * (d - one);
        if !det.is_zero() {
            total += one / det.abs();
        }
    }
    total
}

/// Fixed points of `Tⁿ` found by scanning every point of the lattice
/// `(i, j)/(2ⁿ−1)` in the unit square and iterating it exactly.
pub fn brute_force_fixed_points(n: usize) -> Result<Vec<(Rational, Rational)>> {
    if n == 0 || n > 14 {
        return Err(ChaosError::InvalidParameter(format!("brute-force depth {n} outside 1..=14")));
    }
    let den = (1i128 << n) - 1;
    let mut found: Vec<(Rational, Rational)> = (0..den)
        .into_par_iter()
        .flat_map_iter(|i| {
            (0..den).filter_map(move |j| {
                let (q0, p0) = (Rational::new(i, den), Rational::new(j, den));
                let (mut q, mut p) = (q0, p0);
                for _ in 0..n {
                    (q, p) = baker_step_exact(q, p);
                }
                (q == q0 && p == p0).then_some((q0, p0))
            })
        })
        .collect();
    found.sort();
    Ok(found)
}

/// `Σ 1/|det(Mₙ − 1)|` over the brute-force fixed points, with the
/// stretching factors read off as `2ⁿ` and `2⁻ⁿ`.
pub fn brute_force_uniformity_total(n: usize) -> Result<Rational> {
    let pts = brute_force_fixed_points(n)?;
    let big = Rational::from_integer(1i128 << n);
    let one = Rational::one();
    let det = ((big - one) * (one / big - one)).abs();
    Ok(pts.iter().fold(Rational::zero(), |acc, _| acc + one / det))
}

/// Exact per-cell uniformity sums of the baker's map over a grid on the unit
/// square, with ratios to the cell area.
pub fn exact_uniformity_cells(n: usize, cells: &CellGrid) -> UniformityReport {
    let one = Rational::one();
    let mut exact = vec![Rational::zero(); cells.cells()];
    let mut total = Rational::zero();
    let det = {
        let big = Rational::from_integer(1i128 << n);
        ((big - one) * (one / big - one)).abs()
    };
    for (q, p) in enumerate_fixed_points(n) {
        let x = PhasePoint::new(q.to_f64().unwrap(), p.to_f64().unwrap());
        if let Some(c) = cells.cell_of(x) {
            exact[c] += one / det;
        }
        total += one / det;
    }
    let area = 1.0 / cells.cells() as f64;
    let per_cell: Vec<f64> = exact.iter().map(|r| r.to_f64().unwrap()).collect();
    UniformityReport {
        ratio: per_cell.iter().map(|f| f / area).collect(),
        per_cell,
        total: total.to_f64().unwrap(),
        singular: 0,
    }
}

/// `…γ̄ γ̄ prefix · suffix γ̄ γ̄…` truncated to `bits` symbols on each side.
pub fn homoclinic_code(core: &str, prefix: &str, suffix: &str, bits: usize) -> Result<SymbolSequence> {
    let core = parse_code(core)?;
    if core.is_empty() {
        return Err(ChaosError::BadSymbols("empty core".into()));
    }
    let prefix = parse_code(prefix)?;
    let suffix = parse_code(suffix)?;
    let mut future: Vec<u8> = suffix.clone();
    while future.len() < bits {
        future.extend_from_slice(&core);
    }
    future.truncate(bits);
    let mut past: Vec<u8> = prefix.iter().rev().copied().collect();
    while past.len() < bits {
        past.extend(core.iter().rev());
    }
    past.truncate(bits);
    Ok(SymbolSequence { past, future })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn code_examples() {
        assert_eq!(periodic_point_from_code("L").unwrap(), PhasePoint::new(0.0, 0.0));
        let (q, p) = periodic_point_exact("LR").unwrap();
        assert_eq!((q, p), (Rational::new(1, 3), Rational::new(2, 3)));
        let (q, p) = periodic_point_exact("LLR").unwrap();
        assert_eq!((q, p), (Rational::new(1, 7), Rational::new(4, 7)));
        assert!(is_exactly_periodic("LLR").unwrap());
        assert!(periodic_point_exact("RRR").is_err());
    }

    #[test]
    fn homoclinic_example() {
        let s = homoclinic_code("L", "", "R", 40).unwrap();
        assert_eq!(baker_decode(&s), PhasePoint::new(0.5, 0.0));
    }

    #[test]
    fn uniformity_closed_form() {
        for n in 1..=10 {
            let f = exact_uniformity_total(n);
            let two_n = 1i128 << n;
            assert_eq!(f, Rational::new(two_n, two_n - 1));
        }
    }

    #[test]
    fn brute_force_agrees_small() {
        for n in 1..=6 {
            let brute = brute_force_fixed_points(n).unwrap();
            let mut coded = enumerate_fixed_points(n);
            coded.sort();
            assert_eq!(brute, coded);
            assert_eq!(brute_force_uniformity_total(n).unwrap(), exact_uniformity_total(n));
        }
    }
}
