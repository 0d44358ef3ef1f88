//! Magnetic translations, flux quantization and the leading Hadamard
//! coefficient `a₀`, checked numerically against `H = (i∂ + A)² + V`.
//!
//! Nothing here is used by the forward or inverse pipeline; these routines
//! verify the operator identities the pipeline relies on.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::fields::{linear_potential, FourierField2D, MagneticPotential};
use crate::lattice::Lattice;
use crate::scalar::{dot, Real};
use crate::Vec2;

/// Complex samples on the lattice-aligned grid
/// `x_{ij} = (i/n)·e1 + (j/n)·e2`, `0 ≤ i < n·cells[0]`, `0 ≤ j < n·cells[1]`.
/// A shift by `e_j` is exactly `n` grid steps.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction<T> {
    lattice: Lattice<T>,
    n: usize,
    cells: [usize; 2],
    data: Vec<Complex<T>>,
}

impl<T: Real> GridFunction<T> {
    pub fn sample<F>(lattice: Lattice<T>, n: usize, cells: [usize; 2], f: F) -> Result<Self>
    where
        F: Fn(Vec2<T>) -> Complex<T>,
    {
        if n < 16 {
            return Err(Error::InvalidInput(format!(
                "grid resolution must be at least 16 per cell, got {n}"
            )));
        }
        if cells[0] == 0 || cells[1] == 0 {
            return Err(Error::InvalidInput("grid must cover at least one cell".into()));
        }
        let (ni, nj) = (n * cells[0], n * cells[1]);
        let mut data = Vec::with_capacity(ni * nj);
        let nf = T::from_int(n as i64);
        for j in 0..nj {
            for i in 0..ni {
                let x = lattice.from_fractional(T::from_int(i as i64) / nf, T::from_int(j as i64) / nf);
                data.push(f(x));
            }
        }
        Ok(GridFunction {
            lattice,
            n,
            cells,
            data,
        })
    }

    pub fn resolution(&self) -> usize {
        self.n
    }

    pub fn cells(&self) -> [usize; 2] {
        self.cells
    }

    pub fn dims(&self) -> [usize; 2] {
        [self.n * self.cells[0], self.n * self.cells[1]]
    }

    pub fn point(&self, i: usize, j: usize) -> Vec2<T> {
        let nf = T::from_int(self.n as i64);
        self.lattice
            .from_fractional(T::from_int(i as i64) / nf, T::from_int(j as i64) / nf)
    }

    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.data[j * self.dims()[0] + i]
    }

    /// Largest pointwise difference over the common index range.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        let [a0, a1] = self.dims();
        let [b0, b1] = other.dims();
        let mut worst = T::zero();
        for j in 0..a1.min(b1) {
            for i in 0..a0.min(b0) {
                worst = worst.max((self.get(i, j) - other.get(i, j)).norm());
            }
        }
        worst
    }
}

/// `T u(x) = e^{i v·x} u(x + e_j)`. The magnetic choice is `v = −A⁰(e_j)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MagneticTranslation<T> {
    pub j: usize,
    pub shift: Vec2<T>,
    pub phase_vector: Vec2<T>,
}

impl<T: Real> MagneticTranslation<T> {
    pub fn canonical(lattice: &Lattice<T>, b0: T, j: usize) -> Self {
        let shift = lattice.basis(j);
        let a = linear_potential(b0, shift);
        MagneticTranslation {
            j,
            shift,
            phase_vector: [-a[0], -a[1]],
        }
    }

    pub fn with_phase_vector(mut self, v: Vec2<T>) -> Self {
        self.phase_vector = v;
        self
    }

    pub fn apply_at<F>(&self, u: &F, x: Vec2<T>) -> Complex<T>
    where
        F: Fn(Vec2<T>) -> Complex<T>,
    {
        let phase = Complex::from_polar(T::one(), dot(self.phase_vector, x));
        phase * u([x[0] + self.shift[0], x[1] + self.shift[1]])
    }

    /// Applies the translation to grid samples. The output loses one cell
    /// along axis `j`.
    pub fn apply_grid(&self, u: &GridFunction<T>) -> Result<GridFunction<T>> {
        let axis = self.j - 1;
        if u.cells[axis] < 2 {
            return Err(Error::ShiftOutsideGrid { j: self.j });
        }
        let mut cells = u.cells;
        cells[axis] -= 1;
        let n = u.n;
        let [ni, nj] = [n * cells[0], n * cells[1]];
        let mut data = Vec::with_capacity(ni * nj);
        for j in 0..nj {
            for i in 0..ni {
                let (si, sj) = if axis == 0 { (i + n, j) } else { (i, j + n) };
                let x = u.point(i, j);
                let phase = Complex::from_polar(T::one(), dot(self.phase_vector, x));
                data.push(phase * u.get(si, sj));
            }
        }
        Ok(GridFunction {
            lattice: u.lattice,
            n,
            cells,
            data,
        })
    }
}

/// `e^{iv₂·e₁} − e^{iv₁·e₂}` with `v_j = −A⁰(e_j)`; equals `−2i·sin(πl)`.
pub fn commutator_phase<T: Real>(lattice: &Lattice<T>, b0: T) -> Complex<T> {
    let t1 = MagneticTranslation::canonical(lattice, b0, 1);
    let t2 = MagneticTranslation::canonical(lattice, b0, 2);
    Complex::from_polar(T::one(), dot(t2.phase_vector, lattice.e1()))
        - Complex::from_polar(T::one(), dot(t1.phase_vector, lattice.e2()))
}

struct Stencil<T> {
    grad: [Complex<T>; 2],
    laplacian: Complex<T>,
    value: Complex<T>,
}

fn fourth_order_stencil<F, T>(w: &F, x: Vec2<T>, h: T) -> Stencil<T>
where
    T: Real,
    F: Fn(Vec2<T>) -> Complex<T>,
{
    let value = w(x);
    let twelve = T::lit(12.0);
    let mut grad = [Complex::default(); 2];
    let mut laplacian = Complex::default();
    for (axis, g) in grad.iter_mut().enumerate() {
        let at = |k: i64| {
            let mut p = x;
            p[axis] += T::from_int(k) * h;
            w(p)
        };
        let (m2, m1, p1, p2) = (at(-2), at(-1), at(1), at(2));
        *g = (m2 - p2 + (p1 - m1) * T::lit(8.0)) / (twelve * h);
        laplacian += ((p1 + m1) * T::lit(16.0) - m2 - p2 - value * T::lit(30.0)) / (twelve * h * h);
    }
    Stencil { grad, laplacian, value }
}

/// `(i∂ + A)²w + V·w = −Δw + 2iA·∇w + i(∇·A)w + |A|²w + V·w` with
/// fourth-order centered differences of step `h`.
pub fn apply_hamiltonian_fd<F, T>(
    w: &F,
    pot: &MagneticPotential<T>,
    v: &FourierField2D<T>,
    x: Vec2<T>,
    h: T,
) -> Complex<T>
where
    T: Real,
    F: Fn(Vec2<T>) -> Complex<T>,
{
    let st = fourth_order_stencil(w, x, h);
    let a = pot.eval(x);
    let i = Complex::new(T::zero(), T::one());
    let a_dot_grad = st.grad[0] * a[0] + st.grad[1] * a[1];
    -st.laplacian + i * a_dot_grad * T::lit(2.0) + i * st.value * pot.divergence(x) + st.value * (dot(a, a) + v.eval(x))
}

/// `max_x |H(Tu)(x) − T(Hu)(x)|` over the probe points.
pub fn h_commutation_residual<F, T>(
    u: &F,
    pot: &MagneticPotential<T>,
    v: &FourierField2D<T>,
    translation: &MagneticTranslation<T>,
    h: T,
    probes: &[Vec2<T>],
) -> T
where
    T: Real,
    F: Fn(Vec2<T>) -> Complex<T>,
{
    let tu = |x: Vec2<T>| translation.apply_at(u, x);
    let hu = |x: Vec2<T>| apply_hamiltonian_fd(u, pot, v, x, h);
    probes
        .iter()
        .map(|&x| {
            let lhs = apply_hamiltonian_fd(&tu, pot, v, x, h);
            let rhs = translation.apply_at(&hu, x);
            (lhs - rhs).norm()
        })
        .fold(T::zero(), T::max)
}

/// Leading Hadamard coefficient `a₀(x,y) = exp(i∫₀¹ (x−y)·A(y + s(x−y)) ds)`.
pub fn a0<T: Real>(x: Vec2<T>, y: Vec2<T>, pot: &MagneticPotential<T>) -> Complex<T> {
    let r = [x[0] - y[0], x[1] - y[1]];
    let linear = pot.b0() / T::lit(2.0) * (r[0] * y[1] - r[1] * y[0]);
    Complex::from_polar(T::one(), linear + pot.periodic_line_integral(y, r))
}

/// `|r·∇ₓa₀ − i A(x)·r a₀|`, `r = x − y`, with a centered-difference gradient.
pub fn transport_residual<T: Real>(x: Vec2<T>, y: Vec2<T>, pot: &MagneticPotential<T>, h: T) -> T {
    let r = [x[0] - y[0], x[1] - y[1]];
    let mut grad = [Complex::default(); 2];
    for (axis, g) in grad.iter_mut().enumerate() {
        let (mut xp, mut xm) = (x, x);
        xp[axis] += h;
        xm[axis] -= h;
        *g = (a0(xp, y, pot) - a0(xm, y, pot)) / (T::lit(2.0) * h);
    }
    let lhs = grad[0] * r[0] + grad[1] * r[1];
    let rhs = Complex::new(T::zero(), dot(pot.eval(x), r)) * a0(x, y, pot);
    (lhs - rhs).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{build_potential, random_admissible_field, random_potential_field};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const PI: f64 = std::f64::consts::PI;

    fn skew() -> Lattice<f64> {
        Lattice::new([1.0, 0.0], [0.3, 1.1]).unwrap()
    }

    fn one(_: Vec2<f64>) -> Complex<f64> {
        Complex::new(1.0, 0.0)
    }

    fn wave_packet(x: Vec2<f64>) -> Complex<f64> {
        let (dx, dy) = (x[0] - 0.6, x[1] - 0.5);
        Complex::from_polar((-(dx * dx + dy * dy) / 0.5).exp(), 1.3 * x[0] - 0.7 * x[1])
    }

    #[test]
    fn translation_of_constant() {
        let lat = Lattice::new([1.0, 0.0], [0.0, 1.0]).unwrap();
        let u = GridFunction::sample(lat, 16, [2, 2], one).unwrap();
        let t = MagneticTranslation::canonical(&lat, 0.0, 1);
        let tu = t.apply_grid(&u).unwrap();
        assert_eq!(tu.cells(), [1, 2]);
        assert!(tu.max_abs_diff(&GridFunction::sample(lat, 16, [1, 2], one).unwrap()) < 1e-15);

        // b0 = 2π, e1 = (1,0): A⁰(e1) = (0,−π), phase e^{iπ x₂}
        let t = MagneticTranslation::canonical(&lat, 2.0 * PI, 1);
        assert!((t.phase_vector[0]).abs() < 1e-15 && (t.phase_vector[1] - PI).abs() < 1e-15);
        let tu = t.apply_grid(&u).unwrap();
        let want = GridFunction::sample(lat, 16, [1, 2], |x| Complex::from_polar(1.0, PI * x[1])).unwrap();
        assert!(tu.max_abs_diff(&want) < 1e-14);
        let t2 = MagneticTranslation::canonical(&lat, 2.0 * PI, 2);
        let tiny = GridFunction::sample(lat, 16, [2, 1], one).unwrap();
        assert!(matches!(t2.apply_grid(&tiny), Err(Error::ShiftOutsideGrid { j: 2 })));
    }

    #[test]
    fn translation_composes() {
        let lat = skew();
        let b0 = lat.b0_for_unit_flux(1);
        let u = GridFunction::sample(lat, 16, [3, 3], wave_packet).unwrap();
        for j in [1, 2] {
            let t = MagneticTranslation::canonical(&lat, b0, j);
            let twice = t.apply_grid(&t.apply_grid(&u).unwrap()).unwrap();
            let e = lat.basis(j);
            let v = t.phase_vector;
            let direct = |x: Vec2<f64>| {
                let phase = dot(v, x) + dot(v, [x[0] + e[0], x[1] + e[1]]);
                Complex::from_polar(1.0, phase) * wave_packet([x[0] + 2.0 * e[0], x[1] + 2.0 * e[1]])
            };
            let mut cells = [3, 3];
            cells[j - 1] = 1;
            let want = GridFunction::sample(lat, 16, cells, direct).unwrap();
            assert!(twice.max_abs_diff(&want) <= 1e-12);
        }
    }

    #[test]
    fn commutator_phase_examples() {
        let lat = skew();
        let unit = lat.b0_for_unit_flux(1);
        assert!(commutator_phase(&lat, unit).norm() < 1e-14);
        assert!(commutator_phase(&lat, 3.0 * unit).norm() < 1e-14);
        assert!((commutator_phase(&lat, 0.5 * unit).norm() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn grid_commutator_vanishes_iff_quantized() {
        let lat = skew();
        let unit = lat.b0_for_unit_flux(1);
        let u = GridFunction::sample(lat, 16, [3, 3], wave_packet).unwrap();
        for (scale, commutes) in [(1.0, true), (2.0, true), (0.5, false)] {
            let b0 = scale * unit;
            let t1 = MagneticTranslation::canonical(&lat, b0, 1);
            let t2 = MagneticTranslation::canonical(&lat, b0, 2);
            let t12 = t1.apply_grid(&t2.apply_grid(&u).unwrap()).unwrap();
            let t21 = t2.apply_grid(&t1.apply_grid(&u).unwrap()).unwrap();
            let diff = t12.max_abs_diff(&t21);
            assert_eq!(diff < 1e-12, commutes, "scale {scale}: diff {diff}");
        }
    }

    #[test]
    fn hamiltonian_commutation_order() {
        let lat = skew();
        let b = random_admissible_field(4, lat, 2, 0.3).unwrap();
        let pot = build_potential(&b);
        let v = random_potential_field(4, lat, 2).unwrap();
        let probes = [[0.45, 0.4], [0.7, 0.65], [0.55, 0.3]];
        for j in [1, 2] {
            let t = MagneticTranslation::canonical(&lat, b.mean(), j);
            let coarse = h_commutation_residual(&wave_packet, &pot, &v, &t, 1.0 / 128.0, &probes);
            let fine = h_commutation_residual(&wave_packet, &pot, &v, &t, 1.0 / 256.0, &probes);
            let ratio = coarse / fine;
            assert!((12.0..20.0).contains(&ratio), "j={j}: ratio {ratio}");

            let pv = t.phase_vector;
            let wrong = t.with_phase_vector([pv[0] + 0.1, pv[1]]);
            let c = h_commutation_residual(&wave_packet, &pot, &v, &wrong, 1.0 / 128.0, &probes);
            let f = h_commutation_residual(&wave_packet, &pot, &v, &wrong, 1.0 / 256.0, &probes);
            assert!(c > 1e-2 && f > 0.9 * c, "j={j}: {c} {f}");
        }
    }

    #[test]
    fn free_laplacian_commutes_with_translation() {
        let lat = skew();
        let zero = FourierField2D::constant(lat, 0.0);
        let pot = build_potential(&zero);
        let periodic = |x: Vec2<f64>| {
            let [u, v] = lat.to_fractional(x);
            Complex::from_polar(1.0, 2.0 * PI * (u + 2.0 * v))
        };
        let t = MagneticTranslation::canonical(&lat, 0.0, 1);
        let r = h_commutation_residual(&periodic, &pot, &zero, &t, 1.0 / 64.0, &[[0.3, 0.2], [0.8, 0.9]]);
        assert!(r < 1e-8, "{r}");
    }

    #[test]
    fn a0_examples() {
        let lat = skew();
        let b = random_admissible_field(8, lat, 3, 0.2).unwrap();
        let pot = build_potential(&b);
        let y = [0.3, -1.2];
        assert_eq!(a0(y, y, &pot), Complex::new(1.0, 0.0));

        let sq = Lattice::new([1.0, 0.0], [0.0, 1.0]).unwrap();
        let flat = build_potential(&FourierField2D::constant(sq, 2.0 * PI));
        let z = a0([1.0, 1.0], [0.0, 1.0], &flat);
        assert!((z - Complex::new(-1.0, 0.0)).norm() < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let x = [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)];
            let y = [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)];
            assert!((a0(x, y, &pot).norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn a0_matches_quadrature_of_the_line_integral() {
        let lat = skew();
        let b = random_admissible_field(12, lat, 3, 0.2).unwrap();
        let pot = build_potential(&b);
        let (x, y) = ([0.9, 0.4], [-0.2, 0.7]);
        let r = [x[0] - y[0], x[1] - y[1]];
        let n = 4096;
        let phase: f64 = (0..n)
            .map(|i| {
                let s = (i as f64 + 0.5) / n as f64;
                dot(r, pot.eval([y[0] + s * r[0], y[1] + s * r[1]]))
            })
            .sum::<f64>()
            / n as f64;
        assert!((a0(x, y, &pot) - Complex::from_polar(1.0, phase)).norm() < 1e-6);
    }

    #[test]
    fn a0_gauge_covariance() {
        let lat = skew();
        let b = random_admissible_field(5, lat, 2, 0.2).unwrap();
        let pot = build_potential(&b);
        let phi = random_potential_field(6, lat, 2).unwrap();
        let gauged = pot.gauge_transformed(&phi);
        for (x, y) in [([0.1, 0.2], [1.3, -0.4]), ([-0.7, 0.9], [0.2, 0.2])] {
            let want = a0(x, y, &pot) * Complex::from_polar(1.0, phi.eval(x) - phi.eval(y));
            assert!((a0(x, y, &gauged) - want).norm() < 1e-12);
        }
    }

    #[test]
    fn transport_residual_order() {
        let lat = skew();
        let pot = build_potential(&FourierField2D::constant(lat, lat.b0_for_unit_flux(1)));
        let y = [0.4, 0.1];
        assert_eq!(transport_residual(y, y, &pot, 1e-4), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10 {
            let x = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            let y = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            assert!(transport_residual(x, y, &pot, 1e-4) <= 1e-6);
        }
        let b = random_admissible_field(3, lat, 3, 0.2).unwrap();
        let pot = build_potential(&b);
        let (x, y) = ([0.8, 0.3], [-0.1, 0.6]);
        let r1 = transport_residual(x, y, &pot, 1e-3);
        let r2 = transport_residual(x, y, &pot, 5e-4);
        let ratio = r1 / r2;
        assert!((3.5..4.5).contains(&ratio), "ratio {ratio}");
    }
}
