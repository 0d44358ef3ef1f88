//! TOML persistence for fields and invariant sets, plus a plain-text
//! reconstruction report.
//!
//! Values go through `f64`, which the TOML writer prints in shortest
//! round-trip form, so `f64` data survives a write/read cycle bit-exactly.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::FourierField2D;
use crate::invariants::{DirectionInvariants, InvariantSet};
use crate::inversion::ReconstructionReport;
use crate::lattice::{enumerate_primitive_directions, DualIndex, Lattice, PrimitiveDirection};
use crate::scalar::Real;

const REDUNDANT_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub e1: [f64; 2],
    pub e2: [f64; 2],
}

impl LatticeSpec {
    pub fn of<T: Real>(lattice: &Lattice<T>) -> Self {
        let f = |v: [T; 2]| [v[0].as_f64(), v[1].as_f64()];
        LatticeSpec {
            e1: f(lattice.e1()),
            e2: f(lattice.e2()),
        }
    }

    pub fn build<T: Real>(&self) -> Result<Lattice<T>> {
        let f = |v: [f64; 2]| [T::lit(v[0]), T::lit(v[1])];
        Lattice::new(f(self.e1), f(self.e2))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
struct CoeffRecord {
    m: i64,
    n: i64,
    re: f64,
    im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct FieldFile {
    mean: f64,
    lattice: LatticeSpec,
    #[serde(default)]
    coeff: Vec<CoeffRecord>,
}

fn c64<T: Real>(z: Complex<T>) -> (f64, f64) {
    (z.re.as_f64(), z.im.as_f64())
}

fn close(a: Complex<f64>, b: Complex<f64>) -> bool {
    (a - b).norm() <= REDUNDANT_TOL * a.norm().max(b.norm()).max(1.0)
}

fn to_toml<S: Serialize>(value: &S) -> Result<String> {
    toml::to_string(value).map_err(|e| Error::Format(e.to_string()))
}

fn from_toml<D: for<'de> Deserialize<'de>>(text: &str) -> Result<D> {
    toml::from_str(text).map_err(|e| Error::Format(e.to_string()))
}

/// Serializes the mean and the canonical half of the coefficients.
pub fn field_to_toml<T: Real>(field: &FourierField2D<T>) -> Result<String> {
    let file = FieldFile {
        mean: field.mean().as_f64(),
        lattice: LatticeSpec::of(field.lattice()),
        coeff: field
            .half_plane()
            .map(|(idx, z)| {
                let (re, im) = c64(z);
                CoeffRecord {
                    m: idx.m,
                    n: idx.n,
                    re,
                    im,
                }
            })
            .collect(),
    };
    to_toml(&file)
}

/// Parses a field. Records may list either half of the spectrum or both;
/// a record whose partner disagrees with its conjugate is rejected.
pub fn field_from_toml<T: Real>(text: &str) -> Result<FourierField2D<T>> {
    let file: FieldFile = from_toml(text)?;
    let lattice = file.lattice.build::<T>()?;
    let mut half: BTreeMap<DualIndex, Complex<f64>> = BTreeMap::new();
    for (i, r) in file.coeff.iter().enumerate() {
        let idx = DualIndex::new(r.m, r.n);
        if idx.is_zero() {
            return Err(Error::Format(format!(
                "coeff record {i}: index (0,0) belongs in `mean`"
            )));
        }
        let (key, z) = if idx.is_canonical() {
            (idx, Complex::new(r.re, r.im))
        } else {
            (idx.neg(), Complex::new(r.re, -r.im))
        };
        if let Some(prev) = half.insert(key, z) {
            if !close(prev, z) {
                return Err(Error::Format(format!(
                    "coeff record {i} at {idx}: conflicts with an earlier record (not Hermitian)"
                )));
            }
        }
    }
    FourierField2D::from_half_plane(
        lattice,
        T::lit(file.mean),
        half.into_iter()
            .map(|(idx, z)| (idx, Complex::new(T::lit(z.re), T::lit(z.im)))),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
struct InvariantRecord {
    delta_a: i64,
    delta_b: i64,
    k: i64,
    f_re: f64,
    f_im: f64,
    g_re: f64,
    g_im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct InvariantFile {
    b0: f64,
    l: i64,
    k_max: usize,
    n_quad: usize,
    max_dir: i64,
    lattice: LatticeSpec,
    #[serde(default)]
    record: Vec<InvariantRecord>,
}

/// One record per canonical direction and `k = 1..K`.
pub fn invariants_to_toml<T: Real>(set: &InvariantSet<T>) -> Result<String> {
    let mut record = Vec::with_capacity(set.directions.len() * set.k_max);
    for d in &set.directions {
        for (i, (f, g)) in d.f.iter().zip(&d.g).enumerate() {
            let ((f_re, f_im), (g_re, g_im)) = (c64(*f), c64(*g));
            record.push(InvariantRecord {
                delta_a: d.direction.a(),
                delta_b: d.direction.b(),
                k: i as i64 + 1,
                f_re,
                f_im,
                g_re,
                g_im,
            });
        }
    }
    to_toml(&InvariantFile {
        b0: set.b0.as_f64(),
        l: set.l,
        k_max: set.k_max,
        n_quad: set.n_quad,
        max_dir: set.max_dir,
        lattice: LatticeSpec::of(&set.lattice),
        record,
    })
}

/// Parses an invariant set. Besides the canonical records, a file may carry
/// `k = 0` (must be `F = 1`, `G = 0`), negative `k` or the opposite
/// representative `−δ`; these are checked against the conjugation rules.
pub fn invariants_from_toml<T: Real>(text: &str) -> Result<InvariantSet<T>> {
    let file: InvariantFile = from_toml(text)?;
    let lattice = file.lattice.build::<T>()?;
    let flux = lattice.flux_integer(T::lit(file.b0))?;
    if flux.unit() != Some(file.l) {
        return Err(Error::Format(format!(
            "header: l = {} but b0 carries flux {flux}",
            file.l
        )));
    }
    if file.k_max == 0 || file.max_dir < 1 {
        return Err(Error::Format("header: k_max and max_dir must be positive".into()));
    }
    let mut table: BTreeMap<(PrimitiveDirection, i64), (Complex<f64>, Complex<f64>)> = BTreeMap::new();
    for (i, r) in file.record.iter().enumerate() {
        let name = format!("record {i} (delta = ({},{}), k = {})", r.delta_a, r.delta_b, r.k);
        let f = Complex::new(r.f_re, r.f_im);
        let g = Complex::new(r.g_re, r.g_im);
        if r.k == 0 {
            if f != Complex::new(1.0, 0.0) || g != Complex::default() {
                return Err(Error::Format(format!("{name}: k = 0 requires F = 1, G = 0")));
            }
            continue;
        }
        let (dir, flipped) = PrimitiveDirection::canonicalize(r.delta_a, r.delta_b)
            .map_err(|e| Error::Format(format!("{name}: {e}")))?;
        let (f, g) = if flipped != (r.k < 0) {
            (f.conj(), g.conj())
        } else {
            (f, g)
        };
        let k = r.k.abs();
        if k as usize > file.k_max || dir.sup_norm() > file.max_dir {
            return Err(Error::Format(format!("{name}: outside the header's K / max_dir range")));
        }
        match table.get(&(dir, k)) {
            Some(&(pf, pg)) => {
                if !close(pf, f) || !close(pg, g) {
                    return Err(Error::Format(format!(
                        "{name}: inconsistent with the conjugation rule for ({},{}), k = {k}",
                        dir.a(),
                        dir.b()
                    )));
                }
            }
            None => {
                table.insert((dir, k), (f, g));
            }
        }
    }
    let cast = |z: Complex<f64>| Complex::new(T::lit(z.re), T::lit(z.im));
    let mut directions = Vec::new();
    for dir in enumerate_primitive_directions(file.max_dir) {
        let mut inv = DirectionInvariants {
            direction: dir,
            f: Vec::with_capacity(file.k_max),
            g: Vec::with_capacity(file.k_max),
        };
        for k in 1..=file.k_max as i64 {
            let (f, g) = table.get(&(dir, k)).ok_or_else(|| {
                Error::Format(format!("missing record for delta = ({},{}), k = {k}", dir.a(), dir.b()))
            })?;
            inv.f.push(cast(*f));
            inv.g.push(cast(*g));
        }
        directions.push(inv);
    }
    Ok(InvariantSet {
        lattice,
        b0: T::lit(file.b0),
        l: file.l,
        k_max: file.k_max,
        n_quad: file.n_quad,
        max_dir: file.max_dir,
        directions,
    })
}

pub fn write_field<T: Real>(path: &Path, field: &FourierField2D<T>) -> Result<()> {
    Ok(std::fs::write(path, field_to_toml(field)?)?)
}

pub fn read_field<T: Real>(path: &Path) -> Result<FourierField2D<T>> {
    field_from_toml(&std::fs::read_to_string(path)?)
}

pub fn write_invariants<T: Real>(path: &Path, set: &InvariantSet<T>) -> Result<()> {
    Ok(std::fs::write(path, invariants_to_toml(set)?)?)
}

pub fn read_invariants<T: Real>(path: &Path) -> Result<InvariantSet<T>> {
    invariants_from_toml(&std::fs::read_to_string(path)?)
}

/// Human-readable summary of a round trip.
pub fn format_report<T: Real>(report: &ReconstructionReport<T>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "directions used: {}", report.directions_used);
    let _ = writeln!(out, "K = {}, M = {}", report.k, report.m);
    let _ = writeln!(out, "margin of reconstructed B: {:.6e}", report.margin.as_f64());
    for (name, e) in [("B", report.b_error), ("V", report.v_error)] {
        let _ = writeln!(
            out,
            "{name}: rel L2 {:.3e}, rel Linf {:.3e}, abs Linf {:.3e}",
            e.rel_l2.as_f64(),
            e.rel_linf.as_f64(),
            e.abs_linf.as_f64()
        );
    }
    let _ = writeln!(out, "per direction (abs coefficient error):");
    for d in &report.per_direction {
        let _ = writeln!(
            out,
            "  {:>8}  B {:.3e}  V {:.3e}  min s' {:.4}",
            d.direction.to_string(),
            d.b_abs.as_f64(),
            d.v_abs.as_f64(),
            d.min_sprime.as_f64()
        );
    }
    out
}
