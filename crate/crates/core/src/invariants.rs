//! Forward problem: the one-dimensional invariants
//!
//! ```text
//! F_k(δ) = ∫₀¹ exp(−2πi k l y(s)) ds,          y(s) = s + A¹_δ(s)/b0
//! G_k(δ) = ∫₀¹ V_δ(s) exp(−2πi k l y(s)) ds
//! ```
//!
//! together with the two-dimensional integrals over a fundamental domain
//! they reduce from, `I(d) = Area·F_k(δ)` and (electric part of)
//! `J(d) = Area·G_k(δ)`, where `d = k·(m0, n0)` and `δ` is the reduction
//! direction of [`crate::lattice::reduction_direction`].

use std::collections::BTreeMap;

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fields::{DirectionalProfile, FourierField2D, MagneticPotential, DEFAULT_MARGIN_GRID};
use crate::lattice::{enumerate_primitive_directions, Lattice, LatticeCoords, PrimitiveDirection};
use crate::scalar::{cis_turns, dot, Real};

/// `y(s) = s + A¹_δ(s)/b0`.
pub fn y_map<T: Real>(a1: &DirectionalProfile<T>, b0: T, s: T) -> T {
    s + a1.eval(s) / b0
}

fn y_samples<T: Real>(a1: &DirectionalProfile<T>, b0: T, n: usize) -> Vec<T> {
    let nf = T::from_int(n as i64);
    (0..n)
        .map(|i| {
            let s = T::from_int(i as i64) / nf;
            y_map(a1, b0, s)
        })
        .collect()
}

fn phase_mean<T: Real>(ys: &[T], weights: Option<&[T]>, kl: i64) -> Complex<T> {
    let klf = T::from_int(kl);
    let mut acc = Complex::default();
    for (i, &y) in ys.iter().enumerate() {
        let e = cis_turns(-(klf * y));
        acc += match weights {
            Some(w) => e * w[i],
            None => e,
        };
    }
    acc / T::from_int(ys.len() as i64)
}

/// Trapezoid approximation of `∫₀¹ e^{−2πikl·y(s)} ds` on `n` nodes.
/// Accurate to round-off once `n ≥ 8·(|k·l| + bandwidth)`.
pub fn f_coeff<T: Real>(a1: &DirectionalProfile<T>, b0: T, l: i64, k: i64, n: usize) -> Complex<T> {
    phase_mean(&y_samples(a1, b0, n), None, k * l)
}

/// Trapezoid approximation of `∫₀¹ V_δ(s) e^{−2πikl·y(s)} ds`.
pub fn g_coeff<T: Real>(
    v_delta: &DirectionalProfile<T>,
    a1: &DirectionalProfile<T>,
    b0: T,
    l: i64,
    k: i64,
    n: usize,
) -> Complex<T> {
    let w = v_delta.sample(n);
    phase_mean(&y_samples(a1, b0, n), Some(&w), k * l)
}

/// `∫₀¹ f(y(s)) ds` for `f(y) = Σ_j f_j e^{2πi j l y}`, assembled from the
/// invariants: the `e^{2πijly}` term contributes `f_j·conj(F_j)`.
pub fn pushforward_functional<T: Real>(
    f: &BTreeMap<i64, Complex<T>>,
    a1: &DirectionalProfile<T>,
    b0: T,
    l: i64,
    n: usize,
) -> Complex<T> {
    f.iter()
        .map(|(&j, &c)| match j {
            0 => c,
            _ if j > 0 => c * f_coeff(a1, b0, l, j, n).conj(),
            _ => c * f_coeff(a1, b0, l, -j, n),
        })
        .sum()
}

/// `max(256, 16·K·|l|, 16·bandwidth)`.
pub fn default_quadrature_points(k_max: usize, l: i64, bandwidth: i64) -> usize {
    256.max(16 * k_max * l.unsigned_abs() as usize)
        .max(16 * bandwidth.max(0) as usize)
}

/// Default per-axis resolution for the two-dimensional cross-checks.
pub const DEFAULT_DOMAIN_GRID: usize = 128;

fn domain_integral<T, F>(lattice: &Lattice<T>, n2: usize, f: F) -> Result<Complex<T>>
where
    T: Real,
    F: Fn([T; 2]) -> Complex<T> + Sync,
{
    if n2 < 64 {
        return Err(Error::InvalidInput(format!(
            "domain grid must have at least 64 points per axis, got {n2}"
        )));
    }
    let nf = T::from_int(n2 as i64);
    let rows: Vec<Complex<T>> = (0..n2)
        .into_par_iter()
        .map(|j| {
            let v = T::from_int(j as i64) / nf;
            (0..n2)
                .map(|i| f(lattice.from_fractional(T::from_int(i as i64) / nf, v)))
                .sum()
        })
        .collect();
    Ok(rows.into_iter().sum::<Complex<T>>() * lattice.area() / (nf * nf))
}

/// Exponent `−A⁰(d)·x + ∫₀¹ d·A(x + s·d) ds` with the line integral of
/// `A¹` in closed form.
fn phase_function<T: Real>(pot: &MagneticPotential<T>, d: LatticeCoords) -> impl Fn([T; 2]) -> T + Sync + '_ {
    let lattice = *pot.lattice();
    let dv = lattice.point(d);
    let a0d = pot.linear_part(dv);
    let comps = [pot.component_field(1), pot.component_field(2)];
    let terms: Vec<_> = {
        let t1 = comps[0].line_average_terms(d);
        let t2 = comps[1].line_average_terms(d);
        t1.into_iter()
            .zip(t2)
            .map(|((idx, c1), (_, c2))| (idx, c1 * dv[0] + c2 * dv[1]))
            .collect()
    };
    move |x: [T; 2]| {
        let [u, v] = lattice.to_fractional(x);
        let mut per = Complex::default();
        for (idx, c) in &terms {
            per += *c * cis_turns(T::from_int(idx.m) * u + T::from_int(idx.n) * v);
        }
        // d·A⁰(x + s·d) = d·A⁰(x) because d·A⁰(d) = 0
        -dot(a0d, x) + dot(dv, pot.linear_part(x)) + per.re
    }
}

/// `I(d) = ∫_D exp(−iA⁰(d)·x + i∫₀¹ d·A(x+sd) ds) dx` by an `n2 × n2`
/// trapezoid rule on the fundamental domain spanned by `e1, e2`.
pub fn i_full<T: Real>(d: LatticeCoords, pot: &MagneticPotential<T>, n2: usize) -> Result<Complex<T>> {
    let phase = phase_function(pot, d);
    domain_integral(pot.lattice(), n2, |x| Complex::from_polar(T::one(), phase(x)))
}

/// Electric part of `J(d)`: the bracket carries `∫₀¹ V(x + s·d) ds` only.
pub fn j_full_vpart<T: Real>(
    d: LatticeCoords,
    v: &FourierField2D<T>,
    pot: &MagneticPotential<T>,
    n2: usize,
) -> Result<Complex<T>> {
    let phase = phase_function(pot, d);
    let lattice = *pot.lattice();
    let terms = v.line_average_terms(d);
    let mean = v.mean();
    domain_integral(pot.lattice(), n2, |x| {
        let [a, b] = lattice.to_fractional(x);
        let mut avg = Complex::new(mean, T::zero());
        for (idx, c) in &terms {
            avg += *c * cis_turns(T::from_int(idx.m) * a + T::from_int(idx.n) * b);
        }
        Complex::from_polar(T::one(), phase(x)) * avg.re
    })
}

/// Invariants of one primitive direction; `f[k-1] = F_k`, `g[k-1] = G_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectionInvariants<T> {
    pub direction: PrimitiveDirection,
    pub f: Vec<Complex<T>>,
    pub g: Vec<Complex<T>>,
}

/// `F_k(δ)`, `G_k(δ)` for `k = 1..K` over every canonical primitive
/// direction up to `max_dir`. `F_0 = 1` and `G_0 = 0` are implicit, negative
/// `k` follow by conjugation.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantSet<T> {
    pub lattice: Lattice<T>,
    pub b0: T,
    pub l: i64,
    pub k_max: usize,
    pub n_quad: usize,
    pub max_dir: i64,
    pub directions: Vec<DirectionInvariants<T>>,
}

impl<T: Real> InvariantSet<T> {
    /// Jacobian factor of the reduction, identical for every `d`.
    pub fn area(&self) -> T {
        self.lattice.area()
    }

    pub fn record_count(&self) -> usize {
        self.directions.len() * self.k_max * 2
    }

    pub fn get(&self, direction: PrimitiveDirection) -> Option<&DirectionInvariants<T>> {
        self.directions
            .binary_search_by(|d| d.direction.cmp(&direction))
            .ok()
            .map(|i| &self.directions[i])
    }

    /// The first `k` harmonics only.
    pub fn truncated(&self, k: usize) -> Self {
        let k = k.min(self.k_max);
        InvariantSet {
            k_max: k,
            directions: self
                .directions
                .iter()
                .map(|d| DirectionInvariants {
                    direction: d.direction,
                    f: d.f[..k].to_vec(),
                    g: d.g[..k].to_vec(),
                })
                .collect(),
            ..self.clone()
        }
    }

    /// Fourier coefficients `ŝ′_k = ∫ s′(y) e^{−2πiky} dy`, `k = 1..K`,
    /// which equal `F_k` for `l = 1` and `conj(F_k)` for `l = −1`.
    pub fn density_coefficients(&self, d: &DirectionInvariants<T>) -> Vec<Complex<T>> {
        orient(&d.f, self.l)
    }

    /// Same orientation rule applied to `G_k`.
    pub fn weighted_coefficients(&self, d: &DirectionInvariants<T>) -> Vec<Complex<T>> {
        orient(&d.g, self.l)
    }
}

fn orient<T: Real>(c: &[Complex<T>], l: i64) -> Vec<Complex<T>> {
    if l < 0 {
        c.iter().map(|z| z.conj()).collect()
    } else {
        c.to_vec()
    }
}

/// Computes `F_k`, `G_k` for one direction.
pub fn direction_invariants<T: Real>(
    b: &FourierField2D<T>,
    v: &FourierField2D<T>,
    direction: PrimitiveDirection,
    l: i64,
    k_max: usize,
    n: usize,
) -> Result<DirectionInvariants<T>> {
    let a1 = b.project_direction(direction).antiderivative()?;
    let vd = v.project_direction(direction);
    let ys = y_samples(&a1, b.mean(), n);
    let w = vd.sample(n);
    let vzero = vd.is_empty();
    let f = (1..=k_max as i64).map(|k| phase_mean(&ys, None, k * l)).collect();
    let g = (1..=k_max as i64)
        .map(|k| {
            if vzero {
                Complex::default()
            } else {
                phase_mean(&ys, Some(&w), k * l)
            }
        })
        .collect();
    Ok(DirectionInvariants { direction, f, g })
}

/// Checks the hypotheses under which the invariants determine the fields:
/// one flux quantum, `|B − b0| < |b0|` and a mean-zero `V` on the same
/// lattice. Returns `l`.
pub fn check_hypotheses<T: Real>(b: &FourierField2D<T>, v: &FourierField2D<T>) -> Result<i64> {
    if b.lattice() != v.lattice() {
        return Err(Error::InvalidInput("B and V live on different lattices".into()));
    }
    if v.mean() != T::zero() {
        return Err(Error::InvalidInput(format!("V must have zero mean, got {}", v.mean())));
    }
    let flux = b.lattice().flux_integer(b.mean())?;
    let l = flux.unit().ok_or_else(|| Error::FluxNotUnit(flux.to_string()))?;
    let margin = b.hypothesis_margin(DEFAULT_MARGIN_GRID);
    if margin <= T::zero() {
        return Err(Error::HypothesisViolated {
            margin: margin.as_f64(),
        });
    }
    Ok(l)
}

/// All invariants up to `max_dir` and `k_max`. `n_quad = None` selects
/// [`default_quadrature_points`].
pub fn compute_invariant_set<T: Real>(
    b: &FourierField2D<T>,
    v: &FourierField2D<T>,
    max_dir: i64,
    k_max: usize,
    n_quad: Option<usize>,
) -> Result<InvariantSet<T>> {
    let l = check_hypotheses(b, v)?;
    if max_dir < 1 || k_max < 1 {
        return Err(Error::InvalidInput("max_dir and K must be at least 1".into()));
    }
    let bw = b.bandwidth().max(v.bandwidth());
    let n = match n_quad {
        None => default_quadrature_points(k_max, l, bw),
        Some(n) if n >= 64 && n >= 8 * (k_max * l.unsigned_abs() as usize + bw as usize) => n,
        Some(n) => {
            return Err(Error::InvalidInput(format!(
                "quadrature too coarse: N = {n} for K = {k_max}, bandwidth {bw}"
            )))
        }
    };
    let directions = enumerate_primitive_directions(max_dir)
        .into_par_iter()
        .map(|dir| direction_invariants(b, v, dir, l, k_max, n).map_err(|e| e.at(dir)))
        .collect::<Result<Vec<_>>>()?;
    Ok(InvariantSet {
        lattice: *b.lattice(),
        b0: b.mean(),
        l,
        k_max,
        n_quad: n,
        max_dir,
        directions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{build_potential, random_admissible_field, random_potential_field};
    use crate::lattice::{reduction_direction, DualIndex};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const PI: f64 = std::f64::consts::PI;

    fn skew() -> Lattice<f64> {
        Lattice::new([1.0, 0.0], [0.3, 1.1]).unwrap()
    }

    fn sine_profile(alpha_b0: f64) -> DirectionalProfile<f64> {
        // A¹_δ(s) = alpha_b0 · sin(2πs)
        DirectionalProfile::from_positive([(1, Complex::new(0.0, -alpha_b0 / 2.0))]).unwrap()
    }

    /// Composite Simpson rule on `[0,1]` with `n` (even) panels; an oracle
    /// independent of the periodic trapezoid rule.
    fn simpson(n: usize, f: impl Fn(f64) -> Complex<f64>) -> Complex<f64> {
        let h = 1.0 / n as f64;
        let mut acc = f(0.0) + f(1.0);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += f(i as f64 * h) * w;
        }
        acc * (h / 3.0)
    }

    #[test]
    fn y_map_examples() {
        let zero = DirectionalProfile::<f64>::zero();
        assert_eq!(y_map(&zero, 2.0, 0.37), 0.37);
        let a = 0.13;
        let p = sine_profile(a);
        assert!((y_map(&p, 1.0, 0.25) - (0.25 + a)).abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let s: f64 = rng.gen_range(-2.0..2.0);
            assert!((y_map(&p, 1.7, s + 1.0) - y_map(&p, 1.7, s) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn f_coeff_examples() {
        let zero = DirectionalProfile::<f64>::zero();
        for k in 1..6 {
            assert!(f_coeff(&zero, 3.0, 1, k, 64).norm() < 1e-14);
        }
        // A¹_δ/b0 = α sin 2πs with α = 0.5/(2π): F_k = (−1)^k J_k(2πkα)
        let b0 = 2.0;
        let p = sine_profile(b0 * 0.5 / (2.0 * PI));
        let f1 = f_coeff(&p, b0, 1, 1, 256);
        assert!((f1.re + 0.242_268_457_674_873_9).abs() < 1e-12 && f1.im.abs() < 1e-14);
        let f2 = f_coeff(&p, b0, 1, 2, 256);
        assert!((f2.re - 0.114_903_484_931_900_47).abs() < 1e-12 && f2.im.abs() < 1e-14);
    }

    #[test]
    fn g_coeff_examples() {
        let zero = DirectionalProfile::<f64>::zero();
        let a1 = sine_profile(0.3);
        assert_eq!(g_coeff(&zero, &a1, 2.0, 1, 1, 128), Complex::default());

        // profile coefficient 1 at p = ±1: G_1 = 1, G_k = 0 for k > 1
        let single = DirectionalProfile::<f64>::from_positive([(1, Complex::new(1.0, 0.0))]).unwrap();
        assert!((g_coeff(&single, &zero, 2.0, 1, 1, 128) - Complex::new(1.0, 0.0)).norm() < 1e-15);
        for k in 2..6 {
            assert!(g_coeff(&single, &zero, 2.0, 1, k, 128).norm() < 1e-15);
        }

        let b0 = 5.0;
        let a1 =
            DirectionalProfile::from_positive([(1, Complex::new(0.3, -0.4)), (2, Complex::new(0.1, 0.05))]).unwrap();
        let vd =
            DirectionalProfile::from_positive([(1, Complex::new(-0.2, 0.7)), (3, Complex::new(0.25, 0.0))]).unwrap();
        for k in 1..5 {
            let oracle = simpson(10_000, |s| {
                Complex::from_polar(vd.eval(s), -2.0 * PI * k as f64 * y_map(&a1, b0, s))
            });
            let got = g_coeff(&vd, &a1, b0, 1, k, 256);
            assert!((got - oracle).norm() < 1e-10, "k={k}: {got} vs {oracle}");
        }
    }

    #[test]
    fn pushforward_examples() {
        let b0 = 4.0;
        let a1 =
            DirectionalProfile::from_positive([(1, Complex::new(0.2, 0.1)), (3, Complex::new(-0.05, 0.02))]).unwrap();
        let mut one = BTreeMap::new();
        one.insert(0, Complex::new(1.0, 0.0));
        assert!((pushforward_functional(&one, &a1, b0, 1, 256) - Complex::new(1.0, 0.0)).norm() < 1e-15);

        let mut f = BTreeMap::new();
        f.insert(-1, Complex::new(1.0, 0.0));
        let got = pushforward_functional(&f, &a1, b0, 1, 256);
        assert!((got - f_coeff(&a1, b0, 1, 1, 256)).norm() < 1e-15);

        let terms = [
            (-2, Complex::new(0.3, 0.1)),
            (-1, Complex::new(0.5, -0.2)),
            (0, Complex::new(0.7, 0.0)),
            (1, Complex::new(0.5, 0.2)),
            (2, Complex::new(0.3, -0.1)),
        ];
        let f: BTreeMap<_, _> = terms.into_iter().collect();
        let got = pushforward_functional(&f, &a1, b0, 1, 256);
        let oracle = simpson(10_000, |s| {
            let y = y_map(&a1, b0, s);
            f.iter()
                .map(|(&j, &c)| c * Complex::from_polar(1.0, 2.0 * PI * j as f64 * y))
                .sum()
        });
        assert!((got - oracle).norm() < 1e-10);
        assert!(got.im.abs() < 1e-14);
    }

    #[test]
    fn linear_potential_along_lattice_vectors() {
        // A⁰(d) = π k l_h δ_h with l_h = A⁰(e1)·e2/π and δ_h = −n0 e1* + m0 e2*
        let lat = skew();
        let b0 = lat.b0_for_unit_flux(1);
        let lh = dot(crate::fields::linear_potential(b0, lat.e1()), lat.e2()) / PI;
        assert!((lh + 1.0).abs() < 1e-14);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let d = (rng.gen_range(-6i64..=6), rng.gen_range(-6i64..=6));
            if d == (0, 0) {
                continue;
            }
            let (k, m0, n0) = crate::lattice::primitive_decompose(d.0, d.1).unwrap();
            let a = crate::fields::linear_potential(b0, lat.point(d));
            let delta = lat.dual_vector(DualIndex::new(-n0, m0));
            for j in 0..2 {
                assert!((a[j] - PI * k as f64 * lh * delta[j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn flat_field_has_vanishing_i() {
        let lat = skew();
        let b = FourierField2D::constant(lat, lat.b0_for_unit_flux(1));
        let pot = build_potential(&b);
        assert!(i_full((1, 0), &pot, 64).unwrap().norm() < 1e-12);
        let v = FourierField2D::constant(lat, 0.0);
        assert_eq!(j_full_vpart((1, 0), &v, &pot, 64).unwrap().norm(), 0.0);
    }

    #[test]
    fn reduction_identity_small_matrix() {
        let lat = skew();
        let b = random_admissible_field(21, lat, 3, 0.2).unwrap();
        let v = random_potential_field(21, lat, 3).unwrap();
        let pot = build_potential(&b);
        let l = lat.flux_integer(b.mean()).unwrap().unit().unwrap();
        for d in [(1, 0), (0, 1), (2, -1), (-1, 1), (2, 4), (-3, 0)] {
            let red = reduction_direction(d).unwrap();
            let inv = direction_invariants(&b, &v, red.direction, l, red.k as usize, 512).unwrap();
            let (mut f, mut g) = (inv.f[red.k as usize - 1], inv.g[red.k as usize - 1]);
            if red.conjugate {
                f = f.conj();
                g = g.conj();
            }
            let i = i_full(d, &pot, 128).unwrap();
            let j = j_full_vpart(d, &v, &pot, 128).unwrap();
            assert!((i - f * lat.area()).norm() < 1e-8, "I{d:?}: {i} vs {}", f * lat.area());
            assert!((j - g * lat.area()).norm() < 1e-8, "J{d:?}");
        }
    }

    #[test]
    fn opposite_vectors_give_conjugate_integrals() {
        let lat = skew();
        let b = random_admissible_field(5, lat, 3, 0.2).unwrap();
        let v = random_potential_field(5, lat, 3).unwrap();
        let pot = build_potential(&b);
        for d in [(1, 1), (2, 0), (1, -2)] {
            let neg = (-d.0, -d.1);
            let (ip, im) = (i_full(d, &pot, 128).unwrap(), i_full(neg, &pot, 128).unwrap());
            assert!((ip - im.conj()).norm() < 1e-12);
            let (jp, jm) = (
                j_full_vpart(d, &v, &pot, 128).unwrap(),
                j_full_vpart(neg, &v, &pot, 128).unwrap(),
            );
            assert!((jp - jm.conj()).norm() < 1e-12);
            // so I(d) + I(−d) is real
            assert!((ip + im).im.abs() < 1e-12);
        }
    }

    #[test]
    fn invariant_set_bookkeeping() {
        let lat = skew();
        let b = FourierField2D::constant(lat, lat.b0_for_unit_flux(1));
        let v = FourierField2D::constant(lat, 0.0);
        let set = compute_invariant_set(&b, &v, 2, 5, None).unwrap();
        assert_eq!(set.record_count(), 8 * 5 * 2);
        for d in &set.directions {
            assert!(d.f.iter().chain(&d.g).all(|z| z.norm() <= 1e-12));
        }
        let dirs: Vec<_> = set.directions.iter().map(|d| d.direction).collect();
        let mut sorted = dirs.clone();
        sorted.sort();
        assert_eq!(dirs, sorted);
    }

    #[test]
    fn invariant_set_preconditions() {
        let lat = skew();
        let v = FourierField2D::constant(lat, 0.0);
        let two = FourierField2D::constant(lat, 2.0 * lat.b0_for_unit_flux(1));
        assert!(matches!(
            compute_invariant_set(&two, &v, 2, 4, None),
            Err(Error::FluxNotUnit(_))
        ));
        let b0 = lat.b0_for_unit_flux(1);
        let bad =
            FourierField2D::from_half_plane(lat, b0, [(DualIndex::new(1, 0), Complex::new(0.6 * b0, 0.0))]).unwrap();
        assert!(matches!(
            compute_invariant_set(&bad, &v, 2, 4, None),
            Err(Error::HypothesisViolated { margin }) if margin < 0.0
        ));
    }

    #[test]
    fn invariant_set_is_converged_in_n() {
        let lat = skew();
        let b = random_admissible_field(8, lat, 4, 0.2).unwrap();
        let v = random_potential_field(8, lat, 4).unwrap();
        let a = compute_invariant_set(&b, &v, 3, 16, None).unwrap();
        let b2 = compute_invariant_set(&b, &v, 3, 16, Some(2 * a.n_quad)).unwrap();
        for (x, y) in a.directions.iter().zip(&b2.directions) {
            for (p, q) in x.f.iter().zip(&y.f).chain(x.g.iter().zip(&y.g)) {
                assert!((p - q).norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn trapezoid_convergence_is_spectral() {
        let b0 = 3.0;
        let a1 =
            DirectionalProfile::from_positive([(1, Complex::new(0.2, 0.1)), (2, Complex::new(0.05, -0.08))]).unwrap();
        let reference = f_coeff(&a1, b0, 1, 3, 4096);
        let errs: Vec<f64> = [8, 16, 32, 64]
            .iter()
            .map(|&n| (f_coeff(&a1, b0, 1, 3, n) - reference).norm())
            .collect();
        assert!(errs[3] < 1e-14);
        // faster than any fixed power: successive ratios grow
        assert!(errs[0] / errs[1] > 16.0 && errs[1] / errs[2] > errs[0] / errs[1]);
    }
}
