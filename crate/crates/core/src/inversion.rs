//! Inverse problem: recover `B` and `V` from the invariants.
//!
//! For each primitive direction the invariants `F_k` are the Fourier
//! coefficients of the pushforward density `s′(y)` of `ds` under the
//! monotone map `y(s) = s + A¹_δ(s)/b0`. Synthesizing `s′`, integrating it to
//! `s(y)` and inverting gives `y(s)`, hence `A¹_δ = b0·(y(s) − s)` and
//! `B_δ = dA¹_δ/ds`. With the map in hand, `G_k` are the Fourier coefficients
//! of `V_δ(s(y))·s′(y)`, which yields `V_δ`. Every coefficient `b_β`, `v_β`
//! sits on exactly one line `ℤδ`, so the directional profiles assemble into
//! the full fields.

use std::collections::BTreeMap;

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fields::{DirectionalProfile, FourierField2D, DEFAULT_MARGIN_GRID};
use crate::invariants::{compute_invariant_set, DirectionInvariants, InvariantSet};
use crate::lattice::{DualIndex, Lattice, PrimitiveDirection};
use crate::scalar::{cis_turns, Real};

const NEWTON_MAX_ITER: usize = 50;
const BISECTION_MAX_ITER: usize = 200;

/// Truncated Fourier series of a pushforward density
/// `s′(y) = 1 + Σ_{k=1..K} 2Re(c_k e^{2πiky})`, sampled on `y_j = j/M`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensitySeries<T> {
    coeffs: Vec<Complex<T>>,
    samples: Vec<T>,
}

impl<T: Real> DensitySeries<T> {
    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn samples(&self) -> &[T] {
        &self.samples
    }

    pub fn resolution(&self) -> usize {
        self.samples.len()
    }

    pub fn min_sample(&self) -> T {
        self.samples.iter().copied().fold(T::infinity(), T::min)
    }

    /// `s′(y)`.
    pub fn eval(&self, y: T) -> T {
        let two = T::lit(2.0);
        T::one()
            + self
                .coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| two * (*c * cis_turns(T::from_int(i as i64 + 1) * y)).re)
                .sum::<T>()
    }

    /// Periodic part of the antiderivative: `s(y) − y` up to a constant.
    fn periodic_antiderivative(&self, y: T) -> T {
        let two = T::lit(2.0);
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let k = T::from_int(i as i64 + 1);
                let e = cis_turns(k * y);
                // 2Re(c e^{iθ} / (2πik)) = 2Im(c e^{iθ}) / (2πk)
                two * (*c * e).im / (T::tau() * k)
            })
            .sum()
    }

    /// Bound on `|s(y) − y − C|`.
    fn excursion_bound(&self) -> T {
        let two = T::lit(2.0);
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| two * c.norm() / (T::tau() * T::from_int(i as i64 + 1)))
            .sum()
    }
}

/// Samples `s′` on `M` points; fails when any sample is non-positive, i.e.
/// when the hypothesis `|B − b0| < |b0|` fails or `K` is too small.
pub fn synthesize_sprime<T: Real>(coeffs: &[Complex<T>], m: usize) -> Result<DensitySeries<T>> {
    if m < 4 * coeffs.len() || m == 0 {
        return Err(Error::InvalidInput(format!(
            "resolution M = {m} must be at least 4K = {}",
            4 * coeffs.len()
        )));
    }
    let mut series = DensitySeries {
        coeffs: coeffs.to_vec(),
        samples: Vec::new(),
    };
    let mf = T::from_int(m as i64);
    series.samples = (0..m).map(|j| series.eval(T::from_int(j as i64) / mf)).collect();
    let min = series.min_sample();
    if !(min > T::zero()) {
        return Err(Error::NotMonotone { min: min.as_f64() });
    }
    Ok(series)
}

/// Root of an increasing function by Newton's method, falling back to
/// bisection inside the bracket `[lo, hi]` whenever a step leaves it.
fn solve_increasing<T, F>(f: F, target: T, mut lo: T, mut hi: T, x0: T, tol: T) -> Result<T>
where
    T: Real,
    F: Fn(T) -> (T, T),
{
    let mut x = x0.max(lo).min(hi);
    for _ in 0..NEWTON_MAX_ITER {
        let (fx, dfx) = f(x);
        let r = fx - target;
        if r == T::zero() {
            return Ok(x);
        }
        if r > T::zero() {
            hi = hi.min(x);
        } else {
            lo = lo.max(x);
        }
        let mut next = x - r / dfx;
        if !(next > lo && next < hi) {
            next = (lo + hi) / T::lit(2.0);
        }
        if (next - x).abs() <= tol {
            return Ok(next);
        }
        x = next;
    }
    for _ in 0..BISECTION_MAX_ITER {
        let mid = (lo + hi) / T::lit(2.0);
        if hi - lo <= tol {
            return Ok(mid);
        }
        if f(mid).0 > target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Err(Error::RootSolve {
        target: target.as_f64(),
    })
}

/// The monotone change of variables `s ↔ y` of one direction.
///
/// `s(y) = y + C + Σ 2Re(ŝ′_k/(2πik) e^{2πiky})` satisfies `s(y+1) = s(y) + 1`;
/// the constant `C` is fixed so that `y(s) − s` has zero mean.
#[derive(Clone, Debug, PartialEq)]
pub struct MonotoneMap<T> {
    density: DensitySeries<T>,
    offset: T,
    y_of_s: Vec<T>,
    s_of_y: Vec<T>,
    y_start: T,
    composition_residual: T,
}

impl<T: Real> MonotoneMap<T> {
    pub fn resolution(&self) -> usize {
        self.y_of_s.len()
    }

    pub fn density(&self) -> &DensitySeries<T> {
        &self.density
    }

    pub fn offset(&self) -> T {
        self.offset
    }

    /// `s(y)` for any real `y`.
    pub fn s_at(&self, y: T) -> T {
        y + self.offset + self.density.periodic_antiderivative(y)
    }

    /// `s′(y)`.
    pub fn sprime_at(&self, y: T) -> T {
        self.density.eval(y)
    }

    /// `y(s)` for any real `s`.
    pub fn y_at(&self, s: T) -> Result<T> {
        invert_at(&self.density, self.offset, s)
    }

    /// `y(s_i)` on `s_i = i/M`.
    pub fn y_of_s(&self) -> &[T] {
        &self.y_of_s
    }

    /// `s(y_j)` on `y_j = y(0) + j/M`, covering one period interval.
    pub fn s_of_y(&self) -> &[T] {
        &self.s_of_y
    }

    pub fn y_start(&self) -> T {
        self.y_start
    }

    /// `max_i |s(y(s_i)) − s_i|`.
    pub fn composition_residual(&self) -> T {
        self.composition_residual
    }
}

fn invert_at<T: Real>(density: &DensitySeries<T>, offset: T, s: T) -> Result<T> {
    let bound = density.excursion_bound() + T::tol(1e-12);
    let guess = s - offset;
    let f = |y: T| (y + offset + density.periodic_antiderivative(y), density.eval(y));
    solve_increasing(f, s, guess - bound, guess + bound, guess, T::tol(1e-12))
}

/// Integrates `s′` to `s(y)` and inverts it on the uniform `s`-grid.
pub fn build_monotone_map<T: Real>(density: DensitySeries<T>) -> Result<MonotoneMap<T>> {
    let min = density.min_sample();
    if !(min > T::zero()) {
        return Err(Error::NotMonotone { min: min.as_f64() });
    }
    let m = density.resolution();
    let mf = T::from_int(m as i64);
    let grid: Vec<T> = (0..m).map(|i| T::from_int(i as i64) / mf).collect();

    let unshifted = grid
        .iter()
        .map(|&s| invert_at(&density, T::zero(), s))
        .collect::<Result<Vec<_>>>()?;
    // y_C(s) = y_0(s − C), and y_0(s) − s is periodic: C = mean(y_0(s) − s)
    let offset = unshifted.iter().zip(&grid).map(|(&y, &s)| y - s).sum::<T>() / mf;

    let y_of_s = grid
        .iter()
        .map(|&s| invert_at(&density, offset, s))
        .collect::<Result<Vec<_>>>()?;
    if y_of_s.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::NotMonotone { min: min.as_f64() });
    }
    let y_start = y_of_s[0];
    let mut map = MonotoneMap {
        density,
        offset,
        y_of_s,
        s_of_y: Vec::new(),
        y_start,
        composition_residual: T::zero(),
    };
    map.s_of_y = grid.iter().map(|&t| map.s_at(y_start + t)).collect();
    map.composition_residual = map
        .y_of_s
        .iter()
        .zip(&grid)
        .map(|(&y, &s)| (map.s_at(y) - s).abs())
        .fold(T::zero(), T::max);
    Ok(map)
}

/// Coefficients `(1/M) Σ_i f_i e^{−2πipi/M}` for `p = 1..=k`.
fn discrete_coefficients<T: Real>(samples: &[T], k: usize) -> Vec<Complex<T>> {
    let m = samples.len() as i64;
    let roots: Vec<Complex<T>> = (0..m).map(|j| cis_turns(-T::from_int(j) / T::from_int(m))).collect();
    (1..=k as i64)
        .map(|p| {
            samples
                .iter()
                .enumerate()
                .map(|(i, &f)| roots[((p * i as i64) % m) as usize] * f)
                .sum::<Complex<T>>()
                / T::from_int(m)
        })
        .collect()
}

/// `A¹_δ(s) = b0·(y(s) − s)` fitted on the `s`-grid and differentiated:
/// returns `B_δ` with harmonics `|p| ≤ k`.
pub fn recover_b_delta<T: Real>(map: &MonotoneMap<T>, b0: T, k: usize) -> DirectionalProfile<T> {
    let mf = T::from_int(map.resolution() as i64);
    let a1: Vec<T> = map
        .y_of_s
        .iter()
        .enumerate()
        .map(|(i, &y)| b0 * (y - T::from_int(i as i64) / mf))
        .collect();
    let coeffs = discrete_coefficients(&a1, k).into_iter().enumerate().map(|(i, a)| {
        let p = i as i64 + 1;
        (p, a * Complex::new(T::zero(), T::tau() * T::from_int(p)))
    });
    DirectionalProfile::from_positive(coeffs).expect("positive harmonics")
}

/// Mean of the recovered `A¹_δ` samples; zero by the choice of `C`.
pub fn recovered_potential_mean<T: Real>(map: &MonotoneMap<T>, b0: T) -> T {
    let mf = T::from_int(map.resolution() as i64);
    map.y_of_s
        .iter()
        .enumerate()
        .map(|(i, &y)| b0 * (y - T::from_int(i as i64) / mf))
        .sum::<T>()
        / mf
}

/// `V_δ(s) = g(y(s))·y′(s)` with `g(y) = Σ 2Re(Ĝ_k e^{2πiky})`, where `Ĝ_k`
/// are the orientation-normalized invariants.
pub fn recover_v_delta<T: Real>(g: &[Complex<T>], map: &MonotoneMap<T>, k: usize) -> DirectionalProfile<T> {
    let two = T::lit(2.0);
    let vals: Vec<T> = map
        .y_of_s
        .iter()
        .map(|&y| {
            let gy: T = g
                .iter()
                .enumerate()
                .map(|(i, c)| two * (*c * cis_turns(T::from_int(i as i64 + 1) * y)).re)
                .sum();
            gy / map.sprime_at(y)
        })
        .collect();
    let coeffs = discrete_coefficients(&vals, k)
        .into_iter()
        .enumerate()
        .map(|(i, c)| (i as i64 + 1, c));
    DirectionalProfile::from_positive(coeffs).expect("positive harmonics")
}

/// Places profile coefficient `p` of direction `δ` at `β = p·δ`, keeping the
/// indices with `max(|m|,|n|) ≤ max_index`.
pub fn assemble_field<T: Real>(
    profiles: &[(PrimitiveDirection, DirectionalProfile<T>)],
    lattice: Lattice<T>,
    mean: T,
    max_index: i64,
) -> Result<FourierField2D<T>> {
    let mut coeffs: BTreeMap<DualIndex, Complex<T>> = BTreeMap::new();
    for (dir, prof) in profiles {
        for (&p, &c) in prof.coeffs() {
            if p <= 0 {
                continue;
            }
            let beta = dir.multiple(p);
            if beta.sup_norm() > max_index {
                continue;
            }
            for (idx, val) in [(beta, c), (beta.neg(), prof.coeff(-p))] {
                if coeffs.insert(idx, val).is_some() {
                    return Err(Error::DuplicateAssignment { m: idx.m, n: idx.n });
                }
            }
        }
    }
    FourierField2D::from_coefficients(lattice, mean, coeffs)
}

/// Per-direction outcome of the inversion.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectionReconstruction<T> {
    pub direction: PrimitiveDirection,
    pub b_profile: DirectionalProfile<T>,
    pub v_profile: DirectionalProfile<T>,
    pub min_sprime: T,
    pub composition_residual: T,
    pub map: MonotoneMap<T>,
}

/// Fields recovered from an invariant set.
#[derive(Clone, Debug, PartialEq)]
pub struct Reconstruction<T> {
    pub b: FourierField2D<T>,
    pub v: FourierField2D<T>,
    pub directions: Vec<DirectionReconstruction<T>>,
    pub k: usize,
    pub m: usize,
}

/// Inverts one direction.
pub fn reconstruct_direction<T: Real>(
    set: &InvariantSet<T>,
    inv: &DirectionInvariants<T>,
    m: usize,
) -> Result<DirectionReconstruction<T>> {
    let k = set.k_max;
    let density = synthesize_sprime(&set.density_coefficients(inv), m)?;
    let min_sprime = density.min_sample();
    let map = build_monotone_map(density)?;
    let b_profile = recover_b_delta(&map, set.b0, k);
    let v_profile = recover_v_delta(&set.weighted_coefficients(inv), &map, k);
    Ok(DirectionReconstruction {
        direction: inv.direction,
        b_profile,
        v_profile,
        min_sprime,
        composition_residual: map.composition_residual(),
        map,
    })
}

/// Runs the inversion over every direction of `set` with `M = m` samples.
pub fn reconstruct<T: Real>(set: &InvariantSet<T>, m: usize) -> Result<Reconstruction<T>> {
    let directions = set
        .directions
        .par_iter()
        .map(|inv| reconstruct_direction(set, inv, m).map_err(|e| e.at(inv.direction)))
        .collect::<Result<Vec<_>>>()?;
    let b_profiles: Vec<_> = directions.iter().map(|d| (d.direction, d.b_profile.clone())).collect();
    let v_profiles: Vec<_> = directions.iter().map(|d| (d.direction, d.v_profile.clone())).collect();
    let b = assemble_field(&b_profiles, set.lattice, set.b0, set.max_dir)?;
    let v = assemble_field(&v_profiles, set.lattice, T::zero(), set.max_dir)?;
    Ok(Reconstruction {
        b,
        v,
        directions,
        k: set.k_max,
        m,
    })
}

/// Coefficient-wise comparison of two fields.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FieldError<T> {
    /// `max |Δc_β| / max |c_β|` (absolute when the reference vanishes).
    pub rel_linf: T,
    /// `‖Δc‖₂ / ‖c‖₂` (absolute when the reference vanishes).
    pub rel_l2: T,
    pub abs_linf: T,
}

pub fn field_error<T: Real>(rec: &FourierField2D<T>, truth: &FourierField2D<T>) -> FieldError<T> {
    let keys: std::collections::BTreeSet<_> = rec.coeffs().keys().chain(truth.coeffs().keys()).copied().collect();
    let mut max_diff = (rec.mean() - truth.mean()).abs();
    let mut sum_diff = max_diff * max_diff;
    let mut max_ref = T::zero();
    let mut sum_ref = T::zero();
    for idx in keys {
        let (a, b) = (rec.coeff(idx), truth.coeff(idx));
        let d = (a - b).norm();
        max_diff = max_diff.max(d);
        sum_diff += d * d;
        max_ref = max_ref.max(b.norm());
        sum_ref += b.norm_sqr();
    }
    let linf_den = if max_ref > T::zero() { max_ref } else { T::one() };
    let l2_den = if sum_ref > T::zero() { sum_ref.sqrt() } else { T::one() };
    FieldError {
        rel_linf: max_diff / linf_den,
        rel_l2: sum_diff.sqrt() / l2_den,
        abs_linf: max_diff,
    }
}

/// Largest coefficient error on the line `ℤδ` inside the index box.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DirectionError<T> {
    pub direction: PrimitiveDirection,
    pub b_abs: T,
    pub v_abs: T,
    pub min_sprime: T,
}

/// Reconstructed fields compared against the fields that generated the
/// invariants.
#[derive(Clone, Debug, PartialEq)]
pub struct ReconstructionReport<T> {
    pub b: FourierField2D<T>,
    pub v: FourierField2D<T>,
    pub per_direction: Vec<DirectionError<T>>,
    pub b_error: FieldError<T>,
    pub v_error: FieldError<T>,
    pub margin: T,
    pub directions_used: usize,
    pub k: usize,
    pub m: usize,
}

impl<T: Real> Reconstruction<T> {
    pub fn compare(
        &self,
        b_true: &FourierField2D<T>,
        v_true: &FourierField2D<T>,
        max_index: i64,
    ) -> ReconstructionReport<T> {
        let per_direction = self
            .directions
            .iter()
            .map(|d| {
                let line_err = |rec: &FourierField2D<T>, truth: &FourierField2D<T>| {
                    let mut worst = T::zero();
                    let mut p = 1;
                    while d.direction.multiple(p).sup_norm() <= max_index {
                        for idx in [d.direction.multiple(p), d.direction.multiple(-p)] {
                            worst = worst.max((rec.coeff(idx) - truth.coeff(idx)).norm());
                        }
                        p += 1;
                    }
                    worst
                };
                DirectionError {
                    direction: d.direction,
                    b_abs: line_err(&self.b, b_true),
                    v_abs: line_err(&self.v, v_true),
                    min_sprime: d.min_sprime,
                }
            })
            .collect();
        ReconstructionReport {
            b: self.b.clone(),
            v: self.v.clone(),
            per_direction,
            b_error: field_error(&self.b, b_true),
            v_error: field_error(&self.v, v_true),
            margin: self.b.hypothesis_margin(DEFAULT_MARGIN_GRID),
            directions_used: self.directions.len(),
            k: self.k,
            m: self.m,
        }
    }
}

/// Parameters of [`roundtrip`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RoundtripParams {
    pub max_dir: i64,
    pub k: usize,
    pub m: usize,
    pub n_quad: Option<usize>,
}

impl Default for RoundtripParams {
    fn default() -> Self {
        RoundtripParams {
            max_dir: 4,
            k: 64,
            m: 512,
            n_quad: None,
        }
    }
}

/// Forward invariants followed by the inversion, compared with the inputs.
pub fn roundtrip<T: Real>(
    b: &FourierField2D<T>,
    v: &FourierField2D<T>,
    params: RoundtripParams,
) -> Result<ReconstructionReport<T>> {
    let set = compute_invariant_set(b, v, params.max_dir, params.k, params.n_quad)?;
    let rec = reconstruct(&set, params.m)?;
    Ok(rec.compare(b, v, params.max_dir))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{random_admissible_field, random_potential_field};
    use crate::invariants::{direction_invariants, f_coeff, g_coeff, y_map};

    const PI: f64 = std::f64::consts::PI;

    fn skew() -> Lattice<f64> {
        Lattice::new([1.0, 0.0], [0.3, 1.1]).unwrap()
    }

    fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    fn density_of(a1: &DirectionalProfile<f64>, b0: f64, k: usize) -> Vec<Complex<f64>> {
        (1..=k as i64).map(|j| f_coeff(a1, b0, 1, j, 2048)).collect()
    }

    #[test]
    fn flat_density() {
        let s = synthesize_sprime::<f64>(&vec![Complex::default(); 8], 64).unwrap();
        assert!(s.samples().iter().all(|&x| x == 1.0));
        let map = build_monotone_map(s).unwrap();
        for (i, &y) in map.y_of_s().iter().enumerate() {
            assert!((y - i as f64 / 64.0).abs() < 1e-15);
        }
        assert!((map.s_at(0.3) - 0.3).abs() < 1e-15);
        assert!(recover_b_delta(&map, 5.0, 8)
            .coeffs()
            .values()
            .all(|c| c.norm() < 1e-15));
    }

    #[test]
    fn density_matches_analytic_inverse_derivative() {
        let b0 = 2.0;
        let alpha = 0.05;
        let a1 = DirectionalProfile::from_positive([(1, Complex::new(0.0, -alpha * b0 / 2.0))]).unwrap();
        let s = synthesize_sprime(&density_of(&a1, b0, 32), 256).unwrap();
        let mean = s.samples().iter().sum::<f64>() / 256.0;
        assert!((mean - 1.0).abs() < 1e-12);
        for j in 0..256 {
            let y = j as f64 / 256.0;
            let sy = bisect(|t| y_map(&a1, b0, t) - y, -1.0, 2.0);
            let analytic = 1.0 / (1.0 + 2.0 * PI * alpha * (2.0 * PI * sy).cos());
            assert!((s.samples()[j] - analytic).abs() < 1e-10);
        }
    }

    #[test]
    fn inverse_map_example() {
        // y(s) = s + 0.1 sin 2πs
        let b0 = 1.0;
        let a1 = DirectionalProfile::from_positive([(1, Complex::new(0.0, -0.05))]).unwrap();
        let map = build_monotone_map(synthesize_sprime(&density_of(&a1, b0, 64), 512).unwrap()).unwrap();
        let oracle = bisect(|s| s + 0.1 * (2.0 * PI * s).sin() - 0.05, 0.0, 1.0);
        assert!((oracle - 0.0308).abs() < 1e-4);
        assert!((map.s_at(0.05) - oracle).abs() < 1e-9);
        assert!(map.composition_residual() <= 1e-9);
        for (i, &y) in map.y_of_s().iter().enumerate() {
            let s = i as f64 / 512.0;
            assert!((y - y_map(&a1, b0, s)).abs() < 1e-9);
            assert!((map.y_at(map.s_at(y)).unwrap() - y).abs() < 1e-9);
        }
        // quasi-periodicity of the extension
        for &y in &[0.1, 0.55, -0.3] {
            assert!((map.s_at(y + 1.0) - map.s_at(y) - 1.0).abs() < 1e-13);
        }
        assert!(recovered_potential_mean(&map, b0).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_positive_density() {
        let bad = [Complex::new(-0.6, 0.0)];
        assert!(matches!(
            synthesize_sprime::<f64>(&bad, 16),
            Err(Error::NotMonotone { .. })
        ));
        assert!(matches!(
            synthesize_sprime::<f64>(&[Complex::default(); 8], 16),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn single_harmonic_b_round_trip() {
        let b0 = skew().b0_for_unit_flux(1);
        let c = 0.3 * b0;
        let bd = DirectionalProfile::from_positive([(1, Complex::new(c / 2.0, 0.0))]).unwrap();
        let a1 = bd.antiderivative().unwrap();
        let map = build_monotone_map(synthesize_sprime(&density_of(&a1, b0, 64), 512).unwrap()).unwrap();
        let rec = recover_b_delta(&map, b0, 64);
        assert!((rec.coeff(1) - Complex::new(c / 2.0, 0.0)).norm() <= 1e-9 * c / 2.0);
        for (&p, &z) in rec.coeffs() {
            assert_eq!(z.conj(), rec.coeff(-p));
        }
    }

    #[test]
    fn v_recovery() {
        let b0 = 20.0;
        let zero = DirectionalProfile::<f64>::zero();
        let flat = build_monotone_map(synthesize_sprime(&[Complex::default(); 16], 128).unwrap()).unwrap();
        assert!(recover_v_delta(&[Complex::default(); 16], &flat, 16)
            .coeffs()
            .values()
            .all(|c| c.norm() == 0.0));

        let vd =
            DirectionalProfile::from_positive([(1, Complex::new(0.2, -0.1)), (2, Complex::new(0.05, 0.3))]).unwrap();
        let g: Vec<_> = (1..=16).map(|k| g_coeff(&vd, &zero, b0, 1, k, 256)).collect();
        let rec = recover_v_delta(&g, &flat, 16);
        for p in 1..=16 {
            assert!((rec.coeff(p) - vd.coeff(p)).norm() < 1e-14);
        }

        let a1 =
            DirectionalProfile::from_positive([(1, Complex::new(0.1, 0.2)), (3, Complex::new(-0.05, 0.04))]).unwrap();
        let f: Vec<_> = (1..=64).map(|k| f_coeff(&a1, b0, 1, k, 2048)).collect();
        let g: Vec<_> = (1..=64).map(|k| g_coeff(&vd, &a1, b0, 1, k, 2048)).collect();
        let map = build_monotone_map(synthesize_sprime(&f, 512).unwrap()).unwrap();
        let rec = recover_v_delta(&g, &map, 64);
        let scale = vd.coeffs().values().map(|c| c.norm()).fold(0.0, f64::max);
        for p in 1..=64 {
            assert!((rec.coeff(p) - vd.coeff(p)).norm() <= 1e-8 * scale, "p={p}");
        }
    }

    #[test]
    fn assemble_examples() {
        let lat = skew();
        let x = PrimitiveDirection::new(1, 0).unwrap();
        let y = PrimitiveDirection::new(0, 1).unwrap();
        let px = DirectionalProfile::from_positive([(1, Complex::new(0.1, 0.2))]).unwrap();
        let py = DirectionalProfile::from_positive([(1, Complex::new(-0.3, 0.0))]).unwrap();
        let f = assemble_field(&[(x, px.clone()), (y, py)], lat, 2.0, 4).unwrap();
        assert_eq!(f.coeffs().len(), 4);
        assert_eq!(f.coeff(DualIndex::new(-1, 0)), Complex::new(0.1, -0.2));

        assert!(matches!(
            assemble_field(&[(x, px.clone()), (x, px)], lat, 2.0, 4),
            Err(Error::DuplicateAssignment { .. })
        ));
        let empty = assemble_field::<f64>(&[], lat, 2.0, 4).unwrap();
        assert!(empty.coeffs().is_empty());
    }

    #[test]
    fn constant_round_trip_is_exact() {
        let lat = skew();
        let b = FourierField2D::constant(lat, lat.b0_for_unit_flux(1));
        let v = FourierField2D::constant(lat, 0.0);
        let rep = roundtrip(
            &b,
            &v,
            RoundtripParams {
                max_dir: 3,
                k: 16,
                m: 128,
                n_quad: None,
            },
        )
        .unwrap();
        assert!(rep.b_error.abs_linf < 1e-14 && rep.v_error.abs_linf < 1e-14);
    }

    #[test]
    fn inadmissible_field_is_rejected_before_inversion() {
        let lat = skew();
        let b0 = lat.b0_for_unit_flux(1);
        let b =
            FourierField2D::from_half_plane(lat, b0, [(DualIndex::new(0, 1), Complex::new(0.7 * b0, 0.0))]).unwrap();
        let v = FourierField2D::constant(lat, 0.0);
        match roundtrip(&b, &v, RoundtripParams::default()) {
            Err(Error::HypothesisViolated { margin }) => assert!((margin - (b0 - 1.4 * b0)).abs() < 1e-9),
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn random_round_trip() {
        let lat = skew();
        let b = random_admissible_field(17, lat, 3, 0.3).unwrap();
        let v = random_potential_field(17, lat, 3).unwrap();
        let rep = roundtrip(
            &b,
            &v,
            RoundtripParams {
                max_dir: 3,
                k: 48,
                m: 256,
                n_quad: None,
            },
        )
        .unwrap();
        assert!(rep.b_error.rel_linf < 1e-8, "{:?}", rep.b_error);
        assert!(rep.v_error.rel_linf < 1e-7, "{:?}", rep.v_error);
        assert!(rep.margin > 0.0);
    }

    #[test]
    fn reconstruction_is_a_fixed_point() {
        let lat = skew();
        let b = random_admissible_field(23, lat, 3, 0.3).unwrap();
        let v = random_potential_field(23, lat, 3).unwrap();
        let params = RoundtripParams {
            max_dir: 3,
            k: 48,
            m: 256,
            n_quad: None,
        };
        let first = roundtrip(&b, &v, params).unwrap();
        let second = roundtrip(&first.b, &first.v, params).unwrap();
        assert!(field_error(&second.b, &first.b).abs_linf < 1e-10);
        assert!(field_error(&second.v, &first.v).abs_linf < 1e-10);
    }

    #[test]
    fn opposite_representative_gives_same_coefficients() {
        let lat = skew();
        let b = random_admissible_field(31, lat, 3, 0.3).unwrap();
        let v = random_potential_field(31, lat, 3).unwrap();
        let dir = PrimitiveDirection::new(1, 2).unwrap();
        let k = 48;
        let inv = direction_invariants(&b, &v, dir, 1, k, 1024).unwrap();
        let map = build_monotone_map(synthesize_sprime(&inv.f, 256).unwrap()).unwrap();
        let forward = recover_b_delta(&map, b.mean(), k);

        // the same line seen from −δ: profile s ↦ B_δ(−s)
        let a1_flipped = b.project_direction(dir).reflect().antiderivative().unwrap();
        let f_flipped: Vec<_> = (1..=k as i64)
            .map(|j| f_coeff(&a1_flipped, b.mean(), 1, j, 1024))
            .collect();
        let map = build_monotone_map(synthesize_sprime(&f_flipped, 256).unwrap()).unwrap();
        let back = recover_b_delta(&map, b.mean(), k).reflect();
        for p in -3..=3 {
            assert!((forward.coeff(p) - back.coeff(p)).norm() < 1e-12);
        }
    }

    #[test]
    fn monotonicity_tracks_hypothesis() {
        let lat = skew();
        let b0 = lat.b0_for_unit_flux(1);
        let dir = PrimitiveDirection::new(1, 1).unwrap();
        let zero = FourierField2D::constant(lat, 0.0);
        for (ratio, ok) in [(0.5, true), (0.9, true), (1.05, false), (1.5, false)] {
            let c = ratio * b0 / 2.0;
            let b = FourierField2D::from_half_plane(lat, b0, [(dir.index(), Complex::new(c, 0.0))]).unwrap();
            let inv = direction_invariants(&b, &zero, dir, 1, 64, 4096).unwrap();
            let res = synthesize_sprime(&inv.f, 512);
            assert_eq!(res.is_ok(), ok, "2c/b0 = {ratio}");
        }
    }
}
