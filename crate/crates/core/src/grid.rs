//! Finite-difference resolvent solver used as an independent oracle for the
//! closed-form and spectral kernels, and as a fallback evaluation engine.
//!
//! The kinetic term uses second-order central differences with Dirichlet
//! ends; the delta coupling becomes a single-node entry K0/Δx. The matrix
//! (E − H) has imaginary part Im E·I, positive definite whenever Im E > 0,
//! so banded elimination runs without pivoting.
//!
//! When x, x0 and the coupling point all sit on nodes of every level, the
//! discretization error expands in even powers of Δx and repeated halving
//! with Richardson extrapolation converges rapidly.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::potential::{PotentialSpec, TwoChannelSpec};

/// Boundary/peak magnitude ratio above which a domain is rejected.
pub const BOUNDARY_THRESHOLD: f64 = 1e-8;
const NODE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    x_min: f64,
    x_max: f64,
    points: usize,
}

impl GridSpec {
    pub fn new(x_min: f64, x_max: f64, points: usize) -> Result<Self> {
        if points < 3 {
            return Err(Error::domain("points", format!("grid needs at least 3 points, got {points}")));
        }
        if !(x_max > x_min) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::domain("x_max", format!("need x_min < x_max, got [{x_min}, {x_max}]")));
        }
        Ok(Self { x_min, x_max, points })
    }

    /// Uniform grid with spacing `spacing` that has a node at `anchor` and
    /// covers at least `[x_min, x_max]`.
    pub fn anchored(anchor: f64, spacing: f64, x_min: f64, x_max: f64) -> Result<Self> {
        if !(spacing > 0.0) {
            return Err(Error::domain("spacing", format!("must be positive, got {spacing}")));
        }
        let left = ((anchor - x_min) / spacing - 1e-9).ceil().max(1.0);
        let right = ((x_max - anchor) / spacing - 1e-9).ceil().max(1.0);
        Self::new(anchor - left * spacing, anchor + right * spacing, (left + right) as usize + 1)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.points - 1) as f64
    }

    pub fn coord(&self, j: usize) -> f64 {
        self.x_min + j as f64 * self.spacing()
    }

    pub fn nearest(&self, x: f64) -> usize {
        let j = ((x - self.x_min) / self.spacing()).round();
        j.clamp(0.0, (self.points - 1) as f64) as usize
    }

    /// Index of the node at `x`; errors if `x` is not (close to) a node.
    pub fn node(&self, x: f64) -> Result<usize> {
        let h = self.spacing();
        let t = (x - self.x_min) / h;
        let j = t.round();
        if (t - j).abs() > NODE_TOLERANCE || j < 0.0 || j > (self.points - 1) as f64 {
            return Err(Error::domain(
                "x0",
                format!("{x} is not a node of the grid [{}, {}] with spacing {h}", self.x_min, self.x_max),
            ));
        }
        Ok(j as usize)
    }

    /// Same interval with half the spacing.
    pub fn refined(&self) -> Self {
        Self { points: 2 * self.points - 1, ..*self }
    }
}

/// Banded LU without pivoting; half-bandwidth `b` on both sides.
#[derive(Debug, Clone)]
struct BandLu {
    n: usize,
    b: usize,
    data: Vec<Complex64>,
}

impl BandLu {
    fn idx(&self, i: usize, j: usize) -> usize {
        i * (2 * self.b + 1) + (j + self.b - i)
    }

    fn factor(mut self) -> Result<Self> {
        let (n, b) = (self.n, self.b);
        let mut max_diag = 0.0f64;
        for i in 0..n {
            max_diag = max_diag.max(self.data[self.idx(i, i)].norm());
        }
        for k in 0..n {
            let pivot = self.data[self.idx(k, k)];
            if pivot.norm() <= 1e-14 * max_diag {
                return Err(Error::NearPole { energy: Complex64::new(f64::NAN, f64::NAN), magnitude: pivot.norm() });
            }
            for i in k + 1..(k + b + 1).min(n) {
                let ik = self.idx(i, k);
                let l = self.data[ik] / pivot;
                self.data[ik] = l;
                for j in k + 1..(k + b + 1).min(n) {
                    let kj = self.data[self.idx(k, j)];
                    let ij = self.idx(i, j);
                    self.data[ij] -= l * kj;
                }
            }
        }
        Ok(self)
    }

    fn solve(&self, rhs: &[Complex64]) -> Vec<Complex64> {
        let (n, b) = (self.n, self.b);
        let mut y = rhs.to_vec();
        for i in 0..n {
            let lo = i.saturating_sub(b);
            let mut s = y[i];
            for (k, yk) in y.iter().enumerate().take(i).skip(lo) {
                s -= self.data[self.idx(i, k)] * yk;
            }
            y[i] = s;
        }
        for i in (0..n).rev() {
            let hi = (i + b + 1).min(n);
            let mut s = y[i];
            for j in i + 1..hi {
                s -= self.data[self.idx(i, j)] * y[j];
            }
            y[i] = s / self.data[self.idx(i, i)];
        }
        y
    }
}

/// The discretized operator (E − H) on a grid, for one channel or two
/// coupled channels. Two-channel vectors are interleaved: index 2j + c.
#[derive(Debug, Clone)]
pub struct GridOperator {
    grid: GridSpec,
    channels: usize,
    energy: Complex64,
    matrix: BandLu,
    lu: BandLu,
}

impl GridOperator {
    pub fn single(grid: GridSpec, potential: &PotentialSpec, energy: Complex64) -> Result<Self> {
        potential.validate()?;
        Self::build(grid, &[*potential], None, energy)
    }

    pub fn coupled(grid: GridSpec, spec: &TwoChannelSpec, energy: Complex64) -> Result<Self> {
        spec.channel1.validate()?;
        spec.channel2.validate()?;
        let node = grid.nearest(spec.coupling.position);
        Self::build(grid, &[spec.channel1, spec.channel2], Some((node, spec.coupling.strength)), energy)
    }

    fn build(
        grid: GridSpec,
        potentials: &[PotentialSpec],
        coupling: Option<(usize, f64)>,
        energy: Complex64,
    ) -> Result<Self> {
        if !(energy.im > 0.0) || !energy.re.is_finite() || !energy.im.is_finite() {
            return Err(Error::domain("energy", format!("grid oracle needs Im E > 0, got {energy}")));
        }
        let c = potentials.len();
        let h = grid.spacing();
        let n = grid.points * c;
        let b = c;
        let mut m = BandLu { n, b, data: vec![Complex64::new(0.0, 0.0); n * (2 * b + 1)] };
        for j in 0..grid.points {
            let x = grid.coord(j);
            for (ch, pot) in potentials.iter().enumerate() {
                let kin = 1.0 / (2.0 * pot.effective_mass() * h * h);
                let i = c * j + ch;
                let d = m.idx(i, i);
                m.data[d] = energy - pot.value(x) - 2.0 * kin;
                if j + 1 < grid.points {
                    let r = m.idx(i, i + c);
                    m.data[r] = Complex64::new(kin, 0.0);
                    let l = m.idx(i + c, i);
                    m.data[l] = Complex64::new(kin, 0.0);
                }
            }
        }
        if let (Some((node, k0)), 2) = (coupling, c) {
            let (i, j) = (2 * node, 2 * node + 1);
            let v = Complex64::new(-k0 / h, 0.0);
            let a = m.idx(i, j);
            m.data[a] = v;
            let a = m.idx(j, i);
            m.data[a] = v;
        }
        let lu = m.clone().factor().map_err(|e| match e {
            Error::NearPole { magnitude, .. } => Error::NearPole { energy, magnitude },
            other => other,
        })?;
        Ok(Self { grid, channels: c, energy, matrix: m, lu })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn energy(&self) -> Complex64 {
        self.energy
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn solve(&self, rhs: &[Complex64]) -> Result<Vec<Complex64>> {
        if rhs.len() != self.matrix.n {
            return Err(Error::domain("rhs", format!("expected {} entries, got {}", self.matrix.n, rhs.len())));
        }
        Ok(self.lu.solve(rhs))
    }

    /// Matrix–vector product with the unfactored operator.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let m = &self.matrix;
        (0..m.n)
            .map(|i| {
                let lo = i.saturating_sub(m.b);
                let hi = (i + m.b + 1).min(m.n);
                (lo..hi).map(|j| m.data[m.idx(i, j)] * v[j]).sum()
            })
            .collect()
    }

    /// Solves with the discrete delta e_{x0}/Δx placed in `channel`.
    pub fn column(&self, x0: f64, channel: usize) -> Result<Vec<Complex64>> {
        let j = self.grid.node(x0)?;
        let mut rhs = vec![Complex64::new(0.0, 0.0); self.matrix.n];
        rhs[self.channels * j + channel] = Complex64::new(1.0 / self.grid.spacing(), 0.0);
        self.solve(&rhs)
    }

    /// Splits an interleaved vector into per-channel vectors.
    pub fn split(&self, v: &[Complex64]) -> Vec<Vec<Complex64>> {
        (0..self.channels).map(|c| v.iter().skip(c).step_by(self.channels).copied().collect()).collect()
    }
}

/// Column G(·, x0; E) of a single-channel resolvent.
pub fn resolvent_column(grid: &GridSpec, potential: &PotentialSpec, energy: Complex64, x0: f64) -> Result<Vec<Complex64>> {
    let op = GridOperator::single(*grid, potential, energy)?;
    let col = op.column(x0, 0)?;
    check_boundary(&[&col])?;
    Ok(col)
}

/// Both channel components of the two-channel resolvent column with the
/// source in channel `source` (0 or 1).
pub fn coupled_resolvent_column(
    grid: &GridSpec,
    spec: &TwoChannelSpec,
    energy: Complex64,
    x0: f64,
    source: usize,
) -> Result<[Vec<Complex64>; 2]> {
    if source > 1 {
        return Err(Error::domain("source", format!("channel index must be 0 or 1, got {source}")));
    }
    let op = GridOperator::coupled(*grid, spec, energy)?;
    let col = op.column(x0, source)?;
    let mut parts = op.split(&col);
    let second = parts.pop().unwrap_or_default();
    let first = parts.pop().unwrap_or_default();
    check_boundary(&[&first, &second])?;
    Ok([first, second])
}

/// Largest end-point magnitude relative to the peak over all vectors;
/// errors when it exceeds [`BOUNDARY_THRESHOLD`].
pub fn check_boundary(columns: &[&[Complex64]]) -> Result<f64> {
    let ratio = boundary_ratio(columns);
    if ratio > BOUNDARY_THRESHOLD {
        return Err(Error::DomainTooSmall { ratio, threshold: BOUNDARY_THRESHOLD });
    }
    Ok(ratio)
}

pub fn boundary_ratio(columns: &[&[Complex64]]) -> f64 {
    let peak = columns.iter().flat_map(|c| c.iter()).map(|v| v.norm()).fold(0.0, f64::max);
    let edge = columns
        .iter()
        .filter(|c| !c.is_empty())
        .map(|c| c[0].norm().max(c[c.len() - 1].norm()))
        .fold(0.0, f64::max);
    if peak == 0.0 {
        0.0
    } else {
        edge / peak
    }
}

/// Richardson extrapolation of a sequence computed on spacings h, h/2, …
/// assuming an even-power error expansion. Returns the extrapolated value
/// and the magnitude of the last correction.
pub fn richardson(values: &[Complex64]) -> (Complex64, f64) {
    let n = values.len();
    assert!(n > 0, "richardson needs at least one value");
    let mut prev: Vec<Complex64> = values.to_vec();
    let mut diag = vec![values[0]];
    let mut factor = 1.0;
    for _ in 1..n {
        factor *= 4.0;
        let next: Vec<Complex64> =
            prev.windows(2).map(|w| w[1] + (w[1] - w[0]) / (factor - 1.0)).collect();
        diag.push(*next.last().unwrap());
        prev = next;
    }
    // Best estimate: fully extrapolated; change: versus the previous diagonal
    // entry, which used one level less.
    let best = diag[n - 1];
    let change = if n > 1 { (best - diag[n - 2]).norm() } else { f64::INFINITY };
    (best, change)
}

/// Domain and refinement controls for extrapolated oracle evaluations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleSettings {
    pub x_min: f64,
    pub x_max: f64,
    /// Coarsest spacing; sample points must be multiples of it away from the anchor.
    pub spacing: f64,
    /// Number of grids (each halving the spacing).
    pub levels: usize,
}

impl OracleSettings {
    pub fn grid(&self, anchor: f64) -> Result<GridSpec> {
        GridSpec::anchored(anchor, self.spacing, self.x_min, self.x_max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Extrapolated<T> {
    pub value: T,
    /// Relative size of the last Richardson correction.
    pub change: f64,
    pub boundary_ratio: f64,
}

/// Extrapolated single-channel kernel G(x, x0; E). `anchor` fixes the grid
/// lattice; x and x0 must lie on it.
pub fn refined_kernel(
    settings: &OracleSettings,
    potential: &PotentialSpec,
    energy: Complex64,
    anchor: f64,
    x: f64,
    x0: f64,
) -> Result<Extrapolated<Complex64>> {
    let mut grid = settings.grid(anchor)?;
    let mut values = Vec::with_capacity(settings.levels);
    let mut ratio: f64 = 0.0;
    for _ in 0..settings.levels.max(1) {
        let op = GridOperator::single(grid, potential, energy)?;
        let col = op.column(x0, 0)?;
        ratio = ratio.max(check_boundary(&[&col])?);
        values.push(col[grid.node(x)?]);
        grid = grid.refined();
    }
    let (value, change) = richardson(&values);
    Ok(Extrapolated { value, change: change / value.norm(), boundary_ratio: ratio })
}

/// Extrapolated 2×2 coupled kernel, grid anchored on the coupling point.
pub fn refined_coupled_kernel(
    settings: &OracleSettings,
    spec: &TwoChannelSpec,
    energy: Complex64,
    x: f64,
    x0: f64,
) -> Result<Extrapolated<[[Complex64; 2]; 2]>> {
    let mut grid = settings.grid(spec.coupling.position)?;
    let levels = settings.levels.max(1);
    let mut samples = vec![[[Complex64::new(0.0, 0.0); 2]; 2]; levels];
    let mut ratio: f64 = 0.0;
    for sample in samples.iter_mut() {
        let op = GridOperator::coupled(grid, spec, energy)?;
        let jx = grid.node(x)?;
        for source in 0..2 {
            let col = op.column(x0, source)?;
            let parts = op.split(&col);
            ratio = ratio.max(check_boundary(&[&parts[0], &parts[1]])?);
            for row in 0..2 {
                sample[row][source] = parts[row][jx];
            }
        }
        grid = grid.refined();
    }
    let mut value = [[Complex64::new(0.0, 0.0); 2]; 2];
    let mut change: f64 = 0.0;
    let scale = samples.last().unwrap().iter().flatten().map(|v| v.norm()).fold(0.0, f64::max);
    for i in 0..2 {
        for j in 0..2 {
            let seq: Vec<Complex64> = samples.iter().map(|s| s[i][j]).collect();
            let (v, c) = richardson(&seq);
            value[i][j] = v;
            change = change.max(c / scale.max(f64::MIN_POSITIVE));
        }
    }
    Ok(Extrapolated { value, change, boundary_ratio: ratio })
}

/// WKB estimate of a domain on which kernels sourced at `points` decay to
/// below `exp(-target)` at both ends, for every channel and energy.
pub fn suggest_domain(potentials: &[PotentialSpec], points: &[f64], energies: &[Complex64], target: f64) -> (f64, f64) {
    let lo0 = points.iter().copied().fold(f64::INFINITY, f64::min);
    let hi0 = points.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut lo = lo0;
    let mut hi = hi0;
    for pot in potentials {
        let mu = pot.effective_mass();
        for &e in energies {
            let walk = |start: f64, dir: f64| {
                let mut x = start;
                let mut acc = 0.0;
                while acc < target && (x - start).abs() < 500.0 {
                    let k = (2.0 * mu * (e - pot.value(x))).sqrt();
                    let k = if k.im < 0.0 { -k } else { k };
                    let dx = (0.2 / k.norm().max(1e-3)).min(0.01);
                    acc += k.im * dx;
                    x += dir * dx;
                }
                x
            };
            lo = lo.min(walk(lo0, -1.0));
            hi = hi.max(walk(hi0, 1.0));
        }
    }
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anchored_grid_contains_anchor() {
        let g = GridSpec::anchored(0.02477, 1e-3, -0.5, 0.7).unwrap();
        assert!((g.coord(g.node(0.02477).unwrap()) - 0.02477).abs() < 1e-15);
        assert!(g.x_min() <= -0.5 && g.x_max() >= 0.7);
        let r = g.refined();
        assert!(r.node(0.02477).is_ok());
        assert!((r.spacing() - 5e-4).abs() < 1e-15);
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec::new(0.0, 1.0, 2).is_err());
        assert!(GridSpec::new(1.0, 0.0, 10).is_err());
        let g = GridSpec::new(0.0, 1.0, 11).unwrap();
        assert!(g.node(0.35).is_err());
        assert_eq!(g.node(0.3).unwrap(), 3);
    }

    #[test]
    fn richardson_removes_even_powers() {
        let f = |h: f64| Complex64::new(2.0 + 3.0 * h * h - 5.0 * h.powi(4) + h.powi(6), h * h);
        let vals: Vec<_> = (0..4).map(|k| f(0.1 / 2f64.powi(k))).collect();
        let (v, _) = richardson(&vals);
        assert!((v - Complex64::new(2.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn banded_solver_residual() {
        let pot = PotentialSpec::Harmonic { mass: 35.4, frequency: 400.0, center: 0.1, min_energy: 10700.0 };
        let grid = GridSpec::new(-0.6, 0.8, 1401).unwrap();
        let op = GridOperator::single(grid, &pot, Complex64::new(11000.0, 450.0)).unwrap();
        let col = op.column(0.1, 0).unwrap();
        let back = op.apply(&col);
        let j = grid.node(0.1).unwrap();
        let target = 1.0 / grid.spacing();
        for (i, v) in back.iter().enumerate() {
            let want = if i == j { target } else { 0.0 };
            assert!((v - want).norm() <= 1e-10 * target, "{i}");
        }
    }
}
