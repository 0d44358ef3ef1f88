//! Geometry of the period lattice `L` and its dual `L*`.
//!
//! Dual vectors are indexed by integer coordinates with respect to the dual
//! basis, `β = m·e1* + n·e2*`, and lattice vectors by integer coordinates with
//! respect to `{e1, e2}`. The pairing of the two is the integer `m·p + n·q`,
//! so orthogonality questions are answered exactly.

use std::cmp::Ordering;
use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{dot, Real};
use crate::Vec2;

/// Integer coordinates `(m, n)` of a lattice vector `m·e1 + n·e2`.
pub type LatticeCoords = (i64, i64);

/// Integer coordinates of a dual vector `β = m·e1* + n·e2*`.
///
/// `(0, 0)` is reserved for the mean of a field and never appears among the
/// oscillatory coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DualIndex {
    pub m: i64,
    pub n: i64,
}

impl DualIndex {
    pub const fn new(m: i64, n: i64) -> Self {
        DualIndex { m, n }
    }

    pub fn is_zero(self) -> bool {
        self.m == 0 && self.n == 0
    }

    pub fn neg(self) -> Self {
        DualIndex::new(-self.m, -self.n)
    }

    pub fn sup_norm(self) -> i64 {
        self.m.abs().max(self.n.abs())
    }

    /// Upper half-plane representative test: `n > 0`, or `n = 0` and `m > 0`.
    pub fn is_canonical(self) -> bool {
        self.n > 0 || (self.n == 0 && self.m > 0)
    }

    /// Integer pairing `β·d` with a lattice vector.
    pub fn pair(self, d: LatticeCoords) -> i64 {
        self.m * d.0 + self.n * d.1
    }
}

impl fmt::Display for DualIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.m, self.n)
    }
}

/// A primitive dual vector `δ = a·e1* + b·e2*` with `gcd(|a|,|b|) = 1`,
/// normalized to the upper half-plane. The opposite vector `−δ` is carried by
/// negative multiples `p·δ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PrimitiveDirection {
    a: i64,
    b: i64,
}

impl PrimitiveDirection {
    /// Canonicalizes `(a, b)`; the flag reports whether the sign was flipped.
    pub fn canonicalize(a: i64, b: i64) -> Result<(Self, bool)> {
        if a == 0 && b == 0 {
            return Err(Error::ZeroIndex);
        }
        if a.gcd(&b) != 1 {
            return Err(Error::InvalidInput(format!("({a},{b}) is not primitive")));
        }
        if DualIndex::new(a, b).is_canonical() {
            Ok((PrimitiveDirection { a, b }, false))
        } else {
            Ok((PrimitiveDirection { a: -a, b: -b }, true))
        }
    }

    /// Accepts only an already canonical primitive pair.
    pub fn new(a: i64, b: i64) -> Result<Self> {
        match Self::canonicalize(a, b)? {
            (dir, false) => Ok(dir),
            (_, true) => Err(Error::InvalidInput(format!(
                "({a},{b}) is not in the canonical half-plane"
            ))),
        }
    }

    pub fn a(self) -> i64 {
        self.a
    }

    pub fn b(self) -> i64 {
        self.b
    }

    pub fn index(self) -> DualIndex {
        DualIndex::new(self.a, self.b)
    }

    /// `p·δ` as a dual index.
    pub fn multiple(self, p: i64) -> DualIndex {
        DualIndex::new(p * self.a, p * self.b)
    }

    /// If `idx = p·δ` for some integer `p`, returns `p`.
    pub fn multiple_of(self, idx: DualIndex) -> Option<i64> {
        // δ primitive: idx ∈ ℤδ iff the 2×2 determinant vanishes.
        if idx.m * self.b - idx.n * self.a != 0 {
            return None;
        }
        if self.a != 0 {
            Some(idx.m / self.a)
        } else {
            Some(idx.n / self.b)
        }
    }

    pub fn sup_norm(self) -> i64 {
        self.index().sup_norm()
    }
}

impl fmt::Display for PrimitiveDirection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.a, self.b)
    }
}

/// Rank-2 lattice `L ⊂ ℝ²` together with its dual basis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lattice<T> {
    e1: Vec2<T>,
    e2: Vec2<T>,
    e1s: Vec2<T>,
    e2s: Vec2<T>,
    det: T,
}

/// Dual basis `{e1*, e2*}` with `ei*·ej = δij`.
pub fn dual_basis<T: Real>(e1: Vec2<T>, e2: Vec2<T>) -> Result<(Vec2<T>, Vec2<T>)> {
    let det = e1[0] * e2[1] - e1[1] * e2[0];
    let scale = e1[0].hypot(e1[1]) * e2[0].hypot(e2[1]);
    if !det.is_finite() || det.abs() <= T::lit(1e-12) * scale || scale == T::zero() {
        return Err(Error::DegenerateBasis { det: det.as_f64() });
    }
    let e1s = [e2[1] / det, -e2[0] / det];
    let e2s = [-e1[1] / det, e1[0] / det];
    Ok((e1s, e2s))
}

impl<T: Real> Lattice<T> {
    pub fn new(e1: Vec2<T>, e2: Vec2<T>) -> Result<Self> {
        let (e1s, e2s) = dual_basis(e1, e2)?;
        let det = e1[0] * e2[1] - e1[1] * e2[0];
        Ok(Lattice { e1, e2, e1s, e2s, det })
    }

    pub fn e1(&self) -> Vec2<T> {
        self.e1
    }

    pub fn e2(&self) -> Vec2<T> {
        self.e2
    }

    pub fn e1s(&self) -> Vec2<T> {
        self.e1s
    }

    pub fn e2s(&self) -> Vec2<T> {
        self.e2s
    }

    pub fn basis(&self, j: usize) -> Vec2<T> {
        match j {
            1 => self.e1,
            2 => self.e2,
            _ => panic!("lattice basis index must be 1 or 2, got {j}"),
        }
    }

    /// Signed determinant `det(e1, e2)`.
    pub fn det(&self) -> T {
        self.det
    }

    /// Area of the fundamental domain.
    pub fn area(&self) -> T {
        self.det.abs()
    }

    pub fn orientation(&self) -> i64 {
        if self.det > T::zero() {
            1
        } else {
            -1
        }
    }

    pub fn point(&self, d: LatticeCoords) -> Vec2<T> {
        let (m, n) = (T::from_int(d.0), T::from_int(d.1));
        [m * self.e1[0] + n * self.e2[0], m * self.e1[1] + n * self.e2[1]]
    }

    /// Cartesian form of a dual vector.
    pub fn dual_vector(&self, idx: DualIndex) -> Vec2<T> {
        let (m, n) = (T::from_int(idx.m), T::from_int(idx.n));
        [m * self.e1s[0] + n * self.e2s[0], m * self.e1s[1] + n * self.e2s[1]]
    }

    /// Point of the fundamental domain with fractional coordinates `(u, v)`.
    pub fn from_fractional(&self, u: T, v: T) -> Vec2<T> {
        [u * self.e1[0] + v * self.e2[0], u * self.e1[1] + v * self.e2[1]]
    }

    /// Fractional coordinates `(e1*·x, e2*·x)`.
    pub fn to_fractional(&self, x: Vec2<T>) -> Vec2<T> {
        [dot(self.e1s, x), dot(self.e2s, x)]
    }

    /// Largest deviation of the pairing matrix `ei*·ej` from the identity.
    pub fn duality_defect(&self) -> T {
        let one = T::one();
        [
            (dot(self.e1s, self.e1) - one).abs(),
            dot(self.e1s, self.e2).abs(),
            dot(self.e2s, self.e1).abs(),
            (dot(self.e2s, self.e2) - one).abs(),
        ]
        .into_iter()
        .fold(T::zero(), T::max)
    }

    /// Flux integer `l = b0·det(e1,e2)/(2π)`, i.e. `sign(l) = sign(b0)·orientation`.
    pub fn flux_integer(&self, b0: T) -> Result<FluxQuantum<T>> {
        if b0 == T::zero() {
            return Err(Error::ZeroFlux);
        }
        let l = b0 * self.det / T::tau();
        Ok(match rational_approximation(l.as_f64(), 64, 1e-9) {
            Some(r) => FluxQuantum::Quantized(r),
            None => FluxQuantum::NonQuantized(l),
        })
    }

    /// `b0 = sign·2π/Area`; combined with the orientation this gives `|l| = 1`.
    pub fn b0_for_unit_flux(&self, sign: i64) -> T {
        let s = if sign < 0 { -T::one() } else { T::one() };
        s * T::tau() / self.area()
    }

    /// Checks that lattice vectors of length at most `radius` have distinct
    /// lengths up to sign. On failure returns the first colliding pair.
    pub fn is_generic(&self, radius: T) -> Genericity {
        let r2 = radius * radius;
        let mmax = (radius * self.e1s[0].hypot(self.e1s[1])).ceil().as_f64() as i64 + 1;
        let nmax = (radius * self.e2s[0].hypot(self.e2s[1])).ceil().as_f64() as i64 + 1;
        let mut pts: Vec<(T, LatticeCoords)> = Vec::new();
        for n in 0..=nmax {
            for m in -mmax..=mmax {
                if !DualIndex::new(m, n).is_canonical() {
                    continue;
                }
                let p = self.point((m, n));
                let len2 = dot(p, p);
                if len2 <= r2 {
                    pts.push((len2, (m, n)));
                }
            }
        }
        pts.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap_or(Ordering::Equal).then(x.1.cmp(&y.1)));
        let rel = T::lit(1e-10);
        for w in pts.windows(2) {
            let (l0, d0) = w[0];
            let (l1, d1) = w[1];
            if (l1 - l0).abs() <= rel * l1.max(l0) {
                return Genericity {
                    generic: false,
                    witness: Some((d0, d1)),
                };
            }
        }
        Genericity {
            generic: true,
            witness: None,
        }
    }

    /// Sublattice `L₀ = span{q·e1, e2}` on which a flux of `1/q` per cell
    /// of `L` becomes one quantum per cell.
    pub fn unit_flux_sublattice(&self, q: u32) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidInput("sublattice factor q must be >= 1".into()));
        }
        let qf = T::from_int(q as i64);
        Lattice::new([qf * self.e1[0], qf * self.e1[1]], self.e2)
    }
}

/// Result of [`Lattice::is_generic`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Genericity {
    pub generic: bool,
    pub witness: Option<(LatticeCoords, LatticeCoords)>,
}

/// Flux `b0·Area/(2π)` classified as a small rational or not.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FluxQuantum<T> {
    Quantized(Ratio<i64>),
    NonQuantized(T),
}

impl<T: Real> FluxQuantum<T> {
    /// `Some(±1)` when the flux is exactly one quantum.
    pub fn unit(&self) -> Option<i64> {
        match self {
            FluxQuantum::Quantized(r) if r.is_integer() && r.numer().abs() == 1 => Some(*r.numer()),
            _ => None,
        }
    }

    pub fn integer(&self) -> Option<i64> {
        match self {
            FluxQuantum::Quantized(r) if r.is_integer() => Some(*r.numer()),
            _ => None,
        }
    }

    pub fn value(&self) -> f64 {
        match self {
            FluxQuantum::Quantized(r) => *r.numer() as f64 / *r.denom() as f64,
            FluxQuantum::NonQuantized(x) => x.as_f64(),
        }
    }
}

impl<T: Real> fmt::Display for FluxQuantum<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FluxQuantum::Quantized(r) => write!(f, "{r}"),
            FluxQuantum::NonQuantized(x) => write!(f, "non-quantized ({x})"),
        }
    }
}

/// Continued-fraction search for `p/q` with `q ≤ max_den` and `|x − p/q| ≤ tol`.
fn rational_approximation(x: f64, max_den: i64, tol: f64) -> Option<Ratio<i64>> {
    if !x.is_finite() {
        return None;
    }
    let sign = if x < 0.0 { -1 } else { 1 };
    let target = x.abs();
    let (mut h1, mut h2) = (1i64, 0i64);
    let (mut k1, mut k2) = (0i64, 1i64);
    let mut rem = target;
    for _ in 0..64 {
        let a = rem.floor();
        if a > i64::MAX as f64 / 4.0 {
            return None;
        }
        let a = a as i64;
        let h = a.checked_mul(h1)?.checked_add(h2)?;
        let k = a.checked_mul(k1)?.checked_add(k2)?;
        if k > max_den {
            return None;
        }
        if (target - h as f64 / k as f64).abs() <= tol {
            return Some(Ratio::new(sign * h, k));
        }
        let frac = rem - a as f64;
        if frac <= f64::EPSILON {
            return None;
        }
        rem = 1.0 / frac;
        (h2, h1) = (h1, h);
        (k2, k1) = (k1, k);
    }
    None
}

/// Splits `(m, n) = k·(m0, n0)` with `k = gcd(|m|,|n|) > 0`.
pub fn primitive_decompose(m: i64, n: i64) -> Result<(i64, i64, i64)> {
    if m == 0 && n == 0 {
        return Err(Error::ZeroIndex);
    }
    let k = m.gcd(&n);
    Ok((k, m / k, n / k))
}

/// `δ = −n0·e1* + m0·e2*`, which annihilates `d = m0·e1 + n0·e2`.
/// The flag reports a flip into the canonical half-plane.
pub fn perp_primitive(m0: i64, n0: i64) -> Result<(PrimitiveDirection, bool)> {
    PrimitiveDirection::canonicalize(-n0, m0)
}

/// Reduction of a lattice vector `d = k·(m0, n0)` to the one-dimensional
/// invariants: `I(d) = Area·F_k(δ)` with `δ = n0·e1* − m0·e2*` and
/// `l = b0·det/(2π)`. When canonicalization flips `δ`, the relation holds
/// with `F_k(δ)` conjugated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Reduction {
    pub k: i64,
    pub direction: PrimitiveDirection,
    pub conjugate: bool,
}

pub fn reduction_direction(d: LatticeCoords) -> Result<Reduction> {
    let (k, m0, n0) = primitive_decompose(d.0, d.1)?;
    let (direction, conjugate) = PrimitiveDirection::canonicalize(n0, -m0)?;
    Ok(Reduction {
        k,
        direction,
        conjugate,
    })
}

/// Completion of `δ` to a basis `{δ, δ′}` of `L*` and its dual basis
/// `{γ, γ′}` of `L` (lattice coordinates).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BasisCompletion {
    pub delta: DualIndex,
    pub delta_prime: DualIndex,
    pub gamma: LatticeCoords,
    pub gamma_prime: LatticeCoords,
    pub det: i64,
}

impl BasisCompletion {
    /// Pairing matrix `[[δ·γ, δ·γ′], [δ′·γ, δ′·γ′]]`.
    pub fn pairing(&self) -> [[i64; 2]; 2] {
        [
            [self.delta.pair(self.gamma), self.delta.pair(self.gamma_prime)],
            [
                self.delta_prime.pair(self.gamma),
                self.delta_prime.pair(self.gamma_prime),
            ],
        ]
    }
}

pub fn complete_basis(delta: PrimitiveDirection) -> BasisCompletion {
    let (a, b) = (delta.a, delta.b);
    let eg = a.extended_gcd(&b);
    // a·x + b·y = ±1; normalize to +1
    let (x, y) = if eg.gcd < 0 { (-eg.x, -eg.y) } else { (eg.x, eg.y) };
    debug_assert_eq!(a * x + b * y, 1);
    let (mut c, mut d) = (-y, x);
    // shortest representative of δ′ modulo δ
    let num = c * a + d * b;
    let den = a * a + b * b;
    let t = Integer::div_floor(&(2 * num + den), &(2 * den));
    c -= t * a;
    d -= t * b;
    let det = a * d - b * c;
    BasisCompletion {
        delta: delta.index(),
        delta_prime: DualIndex::new(c, d),
        gamma: (d * det, -c * det),
        gamma_prime: (-b * det, a * det),
        det,
    }
}

/// All canonical primitive directions with `max(|a|,|b|) ≤ max_sup_norm`,
/// sorted lexicographically by `(a, b)`.
pub fn enumerate_primitive_directions(max_sup_norm: i64) -> Vec<PrimitiveDirection> {
    let mut out = Vec::new();
    for a in -max_sup_norm..=max_sup_norm {
        for b in 0..=max_sup_norm {
            let idx = DualIndex::new(a, b);
            if idx.is_canonical() && a.gcd(&b) == 1 {
                out.push(PrimitiveDirection { a, b });
            }
        }
    }
    out.sort();
    out
}
