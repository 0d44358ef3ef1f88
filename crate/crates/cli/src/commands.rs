use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use magtorus::fields::{build_potential, random_admissible_field, random_potential_field, DEFAULT_MARGIN_GRID};
use magtorus::invariants::{check_hypotheses, compute_invariant_set, i_full};
use magtorus::inversion::{reconstruct, Reconstruction};
use magtorus::lattice::reduction_direction;
use magtorus::operators::commutator_phase;
use magtorus::{io, Field64, FluxQuantum, InvariantSet64, Report64};
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::plot;

pub const B_FILE: &str = "B.toml";
pub const V_FILE: &str = "V.toml";
pub const INVARIANTS_FILE: &str = "invariants.toml";
pub const B_REC_FILE: &str = "B_rec.toml";
pub const V_REC_FILE: &str = "V_rec.toml";
pub const REPORT_FILE: &str = "report.txt";
pub const DIRECTIONS_CSV: &str = "directions.csv";
pub const SWEEP_CSV: &str = "sweep.csv";
pub const SPRIME_CSV: &str = "sprime.csv";
pub const GRID_CSV: &str = "b_grid.csv";

/// Samples `d` for the reduction spot check printed by `forward`.
const SPOT_CHECK: [(i64, i64); 4] = [(1, 0), (0, 1), (1, 1), (2, 0)];

fn write_csv<S: Serialize>(path: &Path, rows: &[S]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn flux_line(flux: &FluxQuantum<f64>) -> String {
    match flux.unit() {
        Some(l) => format!("flux integer l = {l}"),
        None => format!("flux integer l = {flux} (inversion needs l = ±1)"),
    }
}

/// Random admissible `B` and mean-zero `V`.
pub fn synth(cfg: &ExperimentConfig, log: &mut dyn Write) -> Result<(Field64, Field64)> {
    cfg.validate()?;
    let lattice = cfg.lattice()?;
    let b = random_admissible_field(cfg.seed, lattice, cfg.bandwidth, cfg.target_margin)?;
    let v = random_potential_field(cfg.seed, lattice, cfg.bandwidth)?;
    let out = cfg.prepare_out()?;
    io::write_field(&out.join(B_FILE), &b)?;
    io::write_field(&out.join(V_FILE), &v)?;
    let margin = b.hypothesis_margin(DEFAULT_MARGIN_GRID);
    writeln!(log, "b0 = {:.12}", b.mean())?;
    writeln!(log, "margin = {:.6e} ({:.4} |b0|)", margin, margin / b.mean().abs())?;
    writeln!(log, "{}", flux_line(&lattice.flux_integer(b.mean())?))?;
    writeln!(
        log,
        "wrote {} and {}",
        out.join(B_FILE).display(),
        out.join(V_FILE).display()
    )?;
    Ok((b, v))
}

/// Largest `|F_k|` over the upper half `K/2 < k ≤ K`.
pub fn tail_magnitude(f: &[num_complex::Complex<f64>]) -> f64 {
    f[f.len() / 2..].iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn forward_fields(cfg: &ExperimentConfig, b: &Field64, v: &Field64, log: &mut dyn Write) -> Result<InvariantSet64> {
    let set = compute_invariant_set(b, v, cfg.max_dir, cfg.k, cfg.n)?;
    writeln!(
        log,
        "l = {}, K = {}, N = {}, {} directions",
        set.l,
        set.k_max,
        set.n_quad,
        set.directions.len()
    )?;
    for d in &set.directions {
        let fmax = d.f.iter().map(|z| z.norm()).fold(0.0, f64::max);
        writeln!(
            log,
            "  {:>8}  max|F| {:.3e}  tail|F| {:.3e}",
            d.direction.to_string(),
            fmax,
            tail_magnitude(&d.f)
        )?;
    }
    let pot = build_potential(b);
    let mut worst = 0.0f64;
    for d in SPOT_CHECK {
        let red = reduction_direction(d)?;
        let Some(inv) = set.get(red.direction) else { continue };
        let Some(&f) = inv.f.get(red.k as usize - 1) else {
            continue;
        };
        let f = if red.conjugate { f.conj() } else { f };
        worst = worst.max((i_full(d, &pot, cfg.n2)? - f * set.area()).norm());
    }
    writeln!(
        log,
        "reduction spot check: max |I(d) - Area F_k| = {worst:.3e} (n2 = {})",
        cfg.n2
    )?;
    Ok(set)
}

/// Invariants of the fields in `b_path`, `v_path`.
pub fn forward(cfg: &ExperimentConfig, b_path: &Path, v_path: &Path, log: &mut dyn Write) -> Result<InvariantSet64> {
    cfg.validate()?;
    let b: Field64 = io::read_field(b_path).with_context(|| format!("loading {}", b_path.display()))?;
    let v: Field64 = io::read_field(v_path).with_context(|| format!("loading {}", v_path.display()))?;
    let set = forward_fields(cfg, &b, &v, log)?;
    let out = cfg.prepare_out()?.join(INVARIANTS_FILE);
    io::write_invariants(&out, &set)?;
    writeln!(log, "wrote {}", out.display())?;
    Ok(set)
}

#[derive(Serialize)]
struct DirectionRow {
    delta_a: i64,
    delta_b: i64,
    min_sprime: f64,
    composition_residual: f64,
    b_abs_err: Option<f64>,
    v_abs_err: Option<f64>,
}

fn direction_rows(rec: &Reconstruction<f64>, report: Option<&Report64>) -> Vec<DirectionRow> {
    rec.directions
        .iter()
        .enumerate()
        .map(|(i, d)| DirectionRow {
            delta_a: d.direction.a(),
            delta_b: d.direction.b(),
            min_sprime: d.min_sprime,
            composition_residual: d.composition_residual,
            b_abs_err: report.map(|r| r.per_direction[i].b_abs),
            v_abs_err: report.map(|r| r.per_direction[i].v_abs),
        })
        .collect()
}

fn invert_set(cfg: &ExperimentConfig, set: &InvariantSet64, log: &mut dyn Write) -> Result<Reconstruction<f64>> {
    let rec = reconstruct(set, cfg.m)?;
    let out = cfg.prepare_out()?;
    io::write_field(&out.join(B_REC_FILE), &rec.b)?;
    io::write_field(&out.join(V_REC_FILE), &rec.v)?;
    let min = rec
        .directions
        .iter()
        .map(|d| d.min_sprime)
        .fold(f64::INFINITY, f64::min);
    let res = rec
        .directions
        .iter()
        .map(|d| d.composition_residual)
        .fold(0.0, f64::max);
    writeln!(
        log,
        "inverted {} directions: min s' = {min:.4}, max composition residual = {res:.2e}",
        rec.directions.len()
    )?;
    writeln!(
        log,
        "margin of reconstructed B = {:.6e}",
        rec.b.hypothesis_margin(DEFAULT_MARGIN_GRID)
    )?;
    Ok(rec)
}

/// Reconstructs `B` and `V` from an invariant file.
pub fn invert(cfg: &ExperimentConfig, inv_path: &Path, log: &mut dyn Write) -> Result<Reconstruction<f64>> {
    cfg.validate()?;
    let set: InvariantSet64 =
        io::read_invariants(inv_path).with_context(|| format!("loading {}", inv_path.display()))?;
    let set = set.truncated(cfg.k);
    if cfg.m < 4 * set.k_max {
        bail!("m = {} must be at least 4K = {}", cfg.m, 4 * set.k_max);
    }
    let rec = invert_set(cfg, &set, log)?;
    let out = cfg.prepare_out()?;
    write_csv(&out.join(DIRECTIONS_CSV), &direction_rows(&rec, None))?;
    let mut text = format!("K = {}, M = {}\n", rec.k, rec.m);
    for row in direction_rows(&rec, None) {
        text += &format!(
            "  ({},{})  min s' {:.6}  residual {:.3e}\n",
            row.delta_a, row.delta_b, row.min_sprime, row.composition_residual
        );
    }
    std::fs::write(out.join(REPORT_FILE), text)?;
    writeln!(log, "wrote {}, {}, {}", B_REC_FILE, V_REC_FILE, REPORT_FILE)?;
    Ok(rec)
}

#[derive(Serialize)]
struct SweepRow {
    k: usize,
    b_rel_linf: f64,
    v_rel_linf: f64,
    b_rel_l2: f64,
    v_rel_l2: f64,
}

#[derive(Serialize)]
struct SprimeRow {
    delta_a: i64,
    delta_b: i64,
    y: f64,
    sprime: f64,
}

#[derive(Serialize)]
struct GridRow {
    i: usize,
    j: usize,
    u: f64,
    v: f64,
    b_true: f64,
    b_rec: f64,
}

/// Paths of everything `roundtrip` writes.
pub fn roundtrip_outputs(out: &Path) -> Vec<PathBuf> {
    [
        B_FILE,
        V_FILE,
        INVARIANTS_FILE,
        B_REC_FILE,
        V_REC_FILE,
        REPORT_FILE,
        DIRECTIONS_CSV,
        SWEEP_CSV,
        SPRIME_CSV,
        GRID_CSV,
        "b_true.png",
        "b_rec.png",
        "sprime.svg",
        "error_vs_k.svg",
    ]
    .iter()
    .map(|f| out.join(f))
    .collect()
}

/// synth, forward and invert in one process, followed by a sweep over `K`
/// and the plots.
pub fn roundtrip(cfg: &ExperimentConfig, log: &mut dyn Write) -> Result<Report64> {
    let start = Instant::now();
    let (b, v) = synth(cfg, log).context("synth stage")?;
    check_hypotheses(&b, &v).context("synth stage")?;
    let set = forward_fields(cfg, &b, &v, log).context("forward stage")?;
    let out = cfg.prepare_out()?.to_path_buf();
    io::write_invariants(&out.join(INVARIANTS_FILE), &set)?;
    let rec = invert_set(cfg, &set, log).context("invert stage")?;
    let report = rec.compare(&b, &v, cfg.max_dir);
    std::fs::write(out.join(REPORT_FILE), io::format_report(&report))?;
    write_csv(&out.join(DIRECTIONS_CSV), &direction_rows(&rec, Some(&report)))?;

    let mut sweep = Vec::new();
    for k in cfg.sweep_ks() {
        let row = match reconstruct(&set.truncated(k), cfg.m) {
            Ok(r) => {
                let rep = r.compare(&b, &v, cfg.max_dir);
                SweepRow {
                    k,
                    b_rel_linf: rep.b_error.rel_linf,
                    v_rel_linf: rep.v_error.rel_linf,
                    b_rel_l2: rep.b_error.rel_l2,
                    v_rel_l2: rep.v_error.rel_l2,
                }
            }
            Err(e) => {
                writeln!(log, "sweep K = {k}: {e}")?;
                SweepRow {
                    k,
                    b_rel_linf: f64::NAN,
                    v_rel_linf: f64::NAN,
                    b_rel_l2: f64::NAN,
                    v_rel_l2: f64::NAN,
                }
            }
        };
        sweep.push(row);
    }
    write_csv(&out.join(SWEEP_CSV), &sweep)?;

    let mut sprime = Vec::new();
    for d in &rec.directions {
        let m = d.map.density().resolution();
        for (j, &s) in d.map.density().samples().iter().enumerate() {
            sprime.push(SprimeRow {
                delta_a: d.direction.a(),
                delta_b: d.direction.b(),
                y: j as f64 / m as f64,
                sprime: s,
            });
        }
    }
    write_csv(&out.join(SPRIME_CSV), &sprime)?;

    let g = cfg.plot_grid;
    let mut grid = Vec::with_capacity(g * g);
    for j in 0..g {
        for i in 0..g {
            let (u, w) = (i as f64 / g as f64, j as f64 / g as f64);
            grid.push(GridRow {
                i,
                j,
                u,
                v: w,
                b_true: b.eval_fractional(u, w),
                b_rec: rec.b.eval_fractional(u, w),
            });
        }
    }
    write_csv(&out.join(GRID_CSV), &grid)?;

    plot::heatmaps_png(
        &out.join(GRID_CSV),
        &[("b_true", &out.join("b_true.png")), ("b_rec", &out.join("b_rec.png"))],
    )
    .context("plot stage")?;
    plot::sprime_svg(&out.join(SPRIME_CSV), &out.join("sprime.svg")).context("plot stage")?;
    plot::error_svg(&out.join(SWEEP_CSV), &out.join("error_vs_k.svg")).context("plot stage")?;

    write!(log, "{}", io::format_report(&report))?;
    writeln!(log, "roundtrip finished in {:.2} s", start.elapsed().as_secs_f64())?;
    Ok(report)
}

/// Lattice diagnostics: genericity, flux, commutator of the magnetic
/// translations and, for flux `1/q`, the sublattice carrying one quantum.
pub fn check(cfg: &ExperimentConfig, log: &mut dyn Write) -> Result<()> {
    let lattice = cfg.lattice()?;
    let b0 = cfg.b0.unwrap_or_else(|| lattice.b0_for_unit_flux(1));
    writeln!(
        log,
        "lattice e1 = {:?}, e2 = {:?}, area = {:.12}",
        lattice.e1(),
        lattice.e2(),
        lattice.area()
    )?;
    let gen = lattice.is_generic(cfg.radius);
    match gen.witness {
        None => writeln!(log, "generic: yes (radius {})", cfg.radius)?,
        Some((p, q)) => writeln!(log, "generic: no (radius {}): |{:?}| = |{:?}|", cfg.radius, p, q)?,
    }
    let flux = lattice.flux_integer(b0)?;
    writeln!(log, "b0 = {b0:.12}, {}", flux_line(&flux))?;
    writeln!(
        log,
        "commutator |phase| = {:.3e}",
        commutator_phase(&lattice, b0).norm()
    )?;
    if let FluxQuantum::Quantized(r) = flux {
        if !r.is_integer() && r.numer().abs() == 1 {
            let q = *r.denom() as u32;
            let sub = lattice.unit_flux_sublattice(q)?;
            writeln!(
                log,
                "flux 1/{q} per cell: use sublattice {{{q} e1, e2}} = {{{:?}, {:?}}}, l = {}",
                sub.e1(),
                sub.e2(),
                sub.flux_integer(b0)?
            )?;
        }
    }
    Ok(())
}
