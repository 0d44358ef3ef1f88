//! Band-limited periodic scalar fields, the magnetic potential built from a
//! field, and one-dimensional directional profiles.

use std::collections::BTreeMap;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lattice::{DualIndex, Lattice, LatticeCoords, PrimitiveDirection};
use crate::scalar::{cis_turns, dot, Real};
use crate::Vec2;

/// Grid used by [`FourierField2D::hypothesis_margin`] when the caller has no
/// preference. Raised to four times the bandwidth when needed.
pub const DEFAULT_MARGIN_GRID: usize = 64;

/// Real `L`-periodic field `mean + Σ c_β e^{2πiβ·x}` with finitely many terms.
///
/// Coefficients are kept for both `β` and `−β` and are exactly conjugate.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierField2D<T> {
    lattice: Lattice<T>,
    mean: T,
    coeffs: BTreeMap<DualIndex, Complex<T>>,
}

impl<T: Real> FourierField2D<T> {
    pub fn constant(lattice: Lattice<T>, mean: T) -> Self {
        FourierField2D {
            lattice,
            mean,
            coeffs: BTreeMap::new(),
        }
    }

    /// Builds a field from one representative of each `±β` pair; the partner
    /// is filled in by conjugation.
    pub fn from_half_plane<I>(lattice: Lattice<T>, mean: T, half: I) -> Result<Self>
    where
        I: IntoIterator<Item = (DualIndex, Complex<T>)>,
    {
        let mut coeffs = BTreeMap::new();
        for (idx, c) in half {
            if idx.is_zero() {
                return Err(Error::ZeroIndex);
            }
            let (pos, c) = if idx.is_canonical() {
                (idx, c)
            } else {
                (idx.neg(), c.conj())
            };
            if coeffs.insert(pos, c).is_some() {
                return Err(Error::DuplicateAssignment { m: pos.m, n: pos.n });
            }
            coeffs.insert(pos.neg(), c.conj());
        }
        Ok(FourierField2D { lattice, mean, coeffs })
    }

    /// Builds a field from a full coefficient map, checking that every
    /// coefficient has a conjugate partner (to `1e-12` relative).
    pub fn from_coefficients(lattice: Lattice<T>, mean: T, coeffs: BTreeMap<DualIndex, Complex<T>>) -> Result<Self> {
        let tol = T::tol(1e-12);
        let mut half = Vec::new();
        for (&idx, &c) in &coeffs {
            if idx.is_zero() {
                return Err(Error::ZeroIndex);
            }
            let partner = coeffs.get(&idx.neg()).copied().unwrap_or_default();
            if (partner - c.conj()).norm() > tol * T::one().max(c.norm()) {
                return Err(Error::NotHermitian { m: idx.m, n: idx.n });
            }
            if idx.is_canonical() {
                half.push((idx, c));
            }
        }
        Self::from_half_plane(lattice, mean, half)
    }

    pub fn lattice(&self) -> &Lattice<T> {
        &self.lattice
    }

    pub fn mean(&self) -> T {
        self.mean
    }

    pub fn coeffs(&self) -> &BTreeMap<DualIndex, Complex<T>> {
        &self.coeffs
    }

    pub fn coeff(&self, idx: DualIndex) -> Complex<T> {
        self.coeffs.get(&idx).copied().unwrap_or_default()
    }

    /// Canonical half-plane coefficients, in index order.
    pub fn half_plane(&self) -> impl Iterator<Item = (DualIndex, Complex<T>)> + '_ {
        self.coeffs
            .iter()
            .filter(|(idx, _)| idx.is_canonical())
            .map(|(&i, &c)| (i, c))
    }

    /// Largest `max(|m|,|n|)` among stored coefficients.
    pub fn bandwidth(&self) -> i64 {
        self.coeffs.keys().map(|i| i.sup_norm()).max().unwrap_or(0)
    }

    pub fn eval(&self, x: Vec2<T>) -> T {
        let [u, v] = self.lattice.to_fractional(x);
        self.eval_fractional(u, v)
    }

    /// Evaluates at `x = u·e1 + v·e2`.
    pub fn eval_fractional(&self, u: T, v: T) -> T {
        let two = T::lit(2.0);
        self.mean
            + self
                .half_plane()
                .map(|(idx, c)| {
                    let th = T::from_int(idx.m) * u + T::from_int(idx.n) * v;
                    two * (c * cis_turns(th)).re
                })
                .sum::<T>()
    }

    /// Unsymmetrized sum over every stored coefficient; its imaginary part
    /// measures the departure from a real field.
    pub fn eval_complex(&self, x: Vec2<T>) -> Complex<T> {
        let [u, v] = self.lattice.to_fractional(x);
        let mut acc = Complex::new(self.mean, T::zero());
        for (idx, &c) in &self.coeffs {
            acc += c * cis_turns(T::from_int(idx.m) * u + T::from_int(idx.n) * v);
        }
        acc
    }

    /// Coefficients surviving the average along the lattice vector `d`:
    /// those with `β·d = 0`.
    pub fn line_average_terms(&self, d: LatticeCoords) -> Vec<(DualIndex, Complex<T>)> {
        self.coeffs
            .iter()
            .filter(|(idx, _)| idx.pair(d) == 0)
            .map(|(&i, &c)| (i, c))
            .collect()
    }

    /// `∫₀¹ field(x + s·d) ds` in closed form.
    pub fn line_average(&self, x: Vec2<T>, d: LatticeCoords) -> T {
        let [u, v] = self.lattice.to_fractional(x);
        let mut acc = Complex::new(self.mean, T::zero());
        for (idx, c) in self.line_average_terms(d) {
            acc += c * cis_turns(T::from_int(idx.m) * u + T::from_int(idx.n) * v);
        }
        acc.re
    }

    /// Restriction of the Fourier series to the line `ℤδ`: the profile
    /// coefficient at `p` is the field coefficient at `p·δ`.
    pub fn project_direction(&self, delta: PrimitiveDirection) -> DirectionalProfile<T> {
        let coeffs = self
            .coeffs
            .iter()
            .filter_map(|(&idx, &c)| delta.multiple_of(idx).map(|p| (p, c)))
            .collect();
        DirectionalProfile { coeffs }
    }

    /// `|b0| − max|B(x) − b0|` over a `grid × grid` sample of the fundamental
    /// domain. The grid is raised to `4 · bandwidth` when smaller.
    pub fn hypothesis_margin(&self, grid: usize) -> T {
        self.mean.abs() - self.max_deviation(grid)
    }

    /// `max |B(x) − mean|` over a uniform sample of the fundamental domain.
    pub fn max_deviation(&self, grid: usize) -> T {
        if self.coeffs.is_empty() {
            return T::zero();
        }
        let g = grid.max(4 * self.bandwidth() as usize).max(1);
        let gi = g as i64;
        let roots: Vec<Complex<T>> = (0..g)
            .map(|j| cis_turns(T::from_int(j as i64) / T::from_int(gi)))
            .collect();
        let half: Vec<_> = self.half_plane().collect();
        let two = T::lit(2.0);
        let mut worst = T::zero();
        for i in 0..gi {
            for j in 0..gi {
                let mut s = T::zero();
                for (idx, c) in &half {
                    let k = (idx.m * i + idx.n * j).rem_euclid(gi) as usize;
                    s += two * (*c * roots[k]).re;
                }
                worst = worst.max(s.abs());
            }
        }
        worst
    }

    /// The same field viewed as periodic for `L₀ = span{q·e1, e2}`: the
    /// `L`-index `(m, n)` becomes the `L₀`-index `(q·m, n)`.
    pub fn on_sublattice(&self, q: u32) -> Result<Self> {
        let lattice = self.lattice.unit_flux_sublattice(q)?;
        let q = q as i64;
        let coeffs = self
            .coeffs
            .iter()
            .map(|(idx, &c)| (DualIndex::new(q * idx.m, idx.n), c))
            .collect();
        Ok(FourierField2D {
            lattice,
            mean: self.mean,
            coeffs,
        })
    }

    pub fn scaled(&self, factor: T) -> Self {
        FourierField2D {
            lattice: self.lattice,
            mean: self.mean,
            coeffs: self.coeffs.iter().map(|(&i, &c)| (i, c * factor)).collect(),
        }
    }
}

/// `A⁰(x) = (b0/2)(x₂, −x₁)`.
pub fn linear_potential<T: Real>(b0: T, x: Vec2<T>) -> Vec2<T> {
    let h = b0 / T::lit(2.0);
    [h * x[1], -h * x[0]]
}

/// Magnetic potential `A = A⁰ + A¹` with `∂₂A₁ − ∂₁A₂ = B`, `A⁰` linear and
/// `A¹` periodic and divergence-free.
#[derive(Clone, Debug, PartialEq)]
pub struct MagneticPotential<T> {
    lattice: Lattice<T>,
    b0: T,
    coeffs: BTreeMap<DualIndex, [Complex<T>; 2]>,
}

/// `c_β = b_β·(β₂, −β₁) / (2πi|β|²)` with `β` in Cartesian form.
pub fn build_potential<T: Real>(field: &FourierField2D<T>) -> MagneticPotential<T> {
    let lattice = *field.lattice();
    let coeffs = field
        .coeffs()
        .iter()
        .map(|(&idx, &b)| {
            let beta = lattice.dual_vector(idx);
            let denom = Complex::new(T::zero(), T::tau() * dot(beta, beta));
            (idx, [b * beta[1] / denom, -(b * beta[0]) / denom])
        })
        .collect();
    MagneticPotential {
        lattice,
        b0: field.mean(),
        coeffs,
    }
}

impl<T: Real> MagneticPotential<T> {
    pub fn lattice(&self) -> &Lattice<T> {
        &self.lattice
    }

    pub fn b0(&self) -> T {
        self.b0
    }

    pub fn coeffs(&self) -> &BTreeMap<DualIndex, [Complex<T>; 2]> {
        &self.coeffs
    }

    pub fn linear_part(&self, x: Vec2<T>) -> Vec2<T> {
        linear_potential(self.b0, x)
    }

    /// `A¹(x)`.
    pub fn periodic_part(&self, x: Vec2<T>) -> Vec2<T> {
        let [u, v] = self.lattice.to_fractional(x);
        let mut acc = [Complex::default(); 2];
        for (idx, c) in &self.coeffs {
            let e = cis_turns(T::from_int(idx.m) * u + T::from_int(idx.n) * v);
            acc[0] += c[0] * e;
            acc[1] += c[1] * e;
        }
        [acc[0].re, acc[1].re]
    }

    pub fn eval(&self, x: Vec2<T>) -> Vec2<T> {
        let a0 = self.linear_part(x);
        let a1 = self.periodic_part(x);
        [a0[0] + a1[0], a0[1] + a1[1]]
    }

    /// `∇·A¹(x)`; zero for potentials built by [`build_potential`].
    pub fn divergence(&self, x: Vec2<T>) -> T {
        let [u, v] = self.lattice.to_fractional(x);
        let mut acc = Complex::default();
        for (&idx, c) in &self.coeffs {
            let beta = self.lattice.dual_vector(idx);
            let e = cis_turns(T::from_int(idx.m) * u + T::from_int(idx.n) * v);
            acc += (c[0] * beta[0] + c[1] * beta[1]) * e * Complex::new(T::zero(), T::tau());
        }
        acc.re
    }

    /// Spectral curl `∂₂A¹₁ − ∂₁A¹₂` coefficient by coefficient.
    pub fn curl_coefficients(&self) -> BTreeMap<DualIndex, Complex<T>> {
        let i2pi = Complex::new(T::zero(), T::tau());
        self.coeffs
            .iter()
            .map(|(&idx, c)| {
                let beta = self.lattice.dual_vector(idx);
                (idx, i2pi * (c[0] * beta[1] - c[1] * beta[0]))
            })
            .collect()
    }

    /// `β·c_β` for every coefficient.
    pub fn divergence_coefficients(&self) -> BTreeMap<DualIndex, Complex<T>> {
        self.coeffs
            .iter()
            .map(|(&idx, c)| {
                let beta = self.lattice.dual_vector(idx);
                (idx, c[0] * beta[0] + c[1] * beta[1])
            })
            .collect()
    }

    /// Component `j ∈ {1, 2}` of `A¹` as a real mean-zero field.
    pub fn component_field(&self, j: usize) -> FourierField2D<T> {
        assert!(j == 1 || j == 2, "component index must be 1 or 2");
        FourierField2D {
            lattice: self.lattice,
            mean: T::zero(),
            coeffs: self.coeffs.iter().map(|(&i, c)| (i, c[j - 1])).collect(),
        }
    }

    /// `A¹ + ∇φ` for a periodic `φ`. The result leaves the divergence-free
    /// gauge; it is meant for gauge-covariance checks.
    pub fn gauge_transformed(&self, phi: &FourierField2D<T>) -> Self {
        let mut coeffs = self.coeffs.clone();
        let i2pi = Complex::new(T::zero(), T::tau());
        for (&idx, &f) in phi.coeffs() {
            let beta = self.lattice.dual_vector(idx);
            let e = coeffs.entry(idx).or_insert([Complex::default(); 2]);
            e[0] += i2pi * f * beta[0];
            e[1] += i2pi * f * beta[1];
        }
        MagneticPotential {
            lattice: self.lattice,
            b0: self.b0,
            coeffs,
        }
    }

    /// `∫₀¹ r·A¹(y + s·r) ds` in closed form.
    pub fn periodic_line_integral(&self, y: Vec2<T>, r: Vec2<T>) -> T {
        let [u, v] = self.lattice.to_fractional(y);
        let mut acc = Complex::default();
        for (&idx, c) in &self.coeffs {
            let beta = self.lattice.dual_vector(idx);
            let e = cis_turns(T::from_int(idx.m) * u + T::from_int(idx.n) * v);
            let phase = T::tau() * dot(beta, r);
            acc += (c[0] * r[0] + c[1] * r[1]) * e * segment_mean(phase);
        }
        acc.re
    }
}

/// `∫₀¹ e^{iθs} ds = e^{iθ/2}·sinc(θ/2)`.
fn segment_mean<T: Real>(theta: T) -> Complex<T> {
    let h = theta / T::lit(2.0);
    let sinc = if h.abs() < T::lit(1e-4) {
        T::one() - h * h / T::lit(6.0)
    } else {
        h.sin() / h
    };
    Complex::from_polar(sinc, h)
}

/// One-periodic profile `Σ_p c_p e^{2πips}` with Hermitian coefficients.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DirectionalProfile<T> {
    coeffs: BTreeMap<i64, Complex<T>>,
}

impl<T: Real> DirectionalProfile<T> {
    pub fn zero() -> Self {
        DirectionalProfile {
            coeffs: BTreeMap::new(),
        }
    }

    /// From coefficients at `p > 0`; negative `p` filled by conjugation.
    pub fn from_positive<I>(positive: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, Complex<T>)>,
    {
        let mut coeffs = BTreeMap::new();
        for (p, c) in positive {
            if p <= 0 {
                return Err(Error::InvalidInput(format!(
                    "expected positive harmonic index, got {p}"
                )));
            }
            coeffs.insert(p, c);
            coeffs.insert(-p, c.conj());
        }
        Ok(DirectionalProfile { coeffs })
    }

    pub fn coeffs(&self) -> &BTreeMap<i64, Complex<T>> {
        &self.coeffs
    }

    pub fn coeff(&self, p: i64) -> Complex<T> {
        self.coeffs.get(&p).copied().unwrap_or_default()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_mean_zero(&self) -> bool {
        !self.coeffs.contains_key(&0)
    }

    pub fn bandwidth(&self) -> i64 {
        self.coeffs.keys().map(|p| p.abs()).max().unwrap_or(0)
    }

    pub fn eval(&self, s: T) -> T {
        let two = T::lit(2.0);
        let mut acc = self.coeff(0).re;
        for (&p, &c) in self.coeffs.range(1..) {
            acc += two * (c * cis_turns(T::from_int(p) * s)).re;
        }
        acc
    }

    /// Spectral derivative: `c_p ↦ 2πip·c_p`.
    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .filter(|(&p, _)| p != 0)
            .map(|(&p, &c)| (p, c * Complex::new(T::zero(), T::tau() * T::from_int(p))))
            .collect();
        DirectionalProfile { coeffs }
    }

    /// Mean-zero antiderivative: `c_p ↦ c_p / (2πip)`.
    pub fn antiderivative(&self) -> Result<Self> {
        if !self.is_mean_zero() {
            return Err(Error::NonPeriodicAntiderivative);
        }
        let coeffs = self
            .coeffs
            .iter()
            .map(|(&p, &c)| (p, c / Complex::new(T::zero(), T::tau() * T::from_int(p))))
            .collect();
        Ok(DirectionalProfile { coeffs })
    }

    /// `s ↦ f(−s)`, the profile of the opposite direction.
    pub fn reflect(&self) -> Self {
        DirectionalProfile {
            coeffs: self.coeffs.iter().map(|(&p, &c)| (-p, c)).collect(),
        }
    }

    /// Values on the uniform grid `s_i = i/n`.
    pub fn sample(&self, n: usize) -> Vec<T> {
        let nf = T::from_int(n as i64);
        (0..n).map(|i| self.eval(T::from_int(i as i64) / nf)).collect()
    }

    pub fn truncated(&self, max_p: i64) -> Self {
        DirectionalProfile {
            coeffs: self
                .coeffs
                .iter()
                .filter(|(p, _)| p.abs() <= max_p)
                .map(|(&p, &c)| (p, c))
                .collect(),
        }
    }
}

fn random_half_plane<T: Real>(rng: &mut ChaCha8Rng, max_index: i64) -> Vec<(DualIndex, Complex<T>)> {
    let mut out = Vec::new();
    for n in 0..=max_index {
        for m in -max_index..=max_index {
            let idx = DualIndex::new(m, n);
            if !idx.is_canonical() {
                continue;
            }
            let decay = 1.0 / (1.0 + (m * m + n * n) as f64);
            let re: f64 = rng.gen_range(-1.0..1.0);
            let im: f64 = rng.gen_range(-1.0..1.0);
            out.push((idx, Complex::new(T::lit(re * decay), T::lit(im * decay))));
        }
    }
    out
}

/// Deterministic random field satisfying the unit-flux hypotheses:
/// `b0 = 2π/Area` and `hypothesis_margin ≥ target_margin·|b0|`.
pub fn random_admissible_field<T: Real>(
    seed: u64,
    lattice: Lattice<T>,
    max_index: i64,
    target_margin: T,
) -> Result<FourierField2D<T>> {
    if !(target_margin > T::zero() && target_margin < T::one()) {
        return Err(Error::InvalidInput(format!(
            "target margin must lie in (0,1), got {target_margin}"
        )));
    }
    let b0 = lattice.b0_for_unit_flux(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw = FourierField2D::from_half_plane(lattice, b0, random_half_plane(&mut rng, max_index))?;
    let dev = raw.max_deviation(DEFAULT_MARGIN_GRID);
    if dev == T::zero() {
        return Ok(raw);
    }
    let scale = (T::one() - target_margin) * b0.abs() / dev * (T::one() - T::tol(1e-9));
    Ok(raw.scaled(scale))
}

/// Deterministic random mean-zero potential normalized to `max|V| = 1` on
/// the default sample grid. Uses a stream independent of
/// [`random_admissible_field`] for the same seed.
pub fn random_potential_field<T: Real>(seed: u64, lattice: Lattice<T>, max_index: i64) -> Result<FourierField2D<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    let raw = FourierField2D::from_half_plane(lattice, T::zero(), random_half_plane(&mut rng, max_index))?;
    let dev = raw.max_deviation(DEFAULT_MARGIN_GRID);
    if dev == T::zero() {
        return Ok(raw);
    }
    Ok(raw.scaled(T::one() / dev))
}
