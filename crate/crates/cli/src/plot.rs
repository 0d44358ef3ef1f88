//! Static plots rendered from the CSV tables written by the commands.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};
use image::{ImageBuffer, Rgb};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const PAD: f64 = 56.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
];

type Table = Vec<BTreeMap<String, String>>;

fn read_table(path: &Path) -> Result<Table> {
    let mut rdr = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    let headers = rdr.headers()?.clone();
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        rows.push(
            headers
                .iter()
                .zip(rec.iter())
                .map(|(h, v)| (h.to_string(), v.to_string()))
                .collect(),
        );
    }
    Ok(rows)
}

fn num(row: &BTreeMap<String, String>, key: &str) -> Result<f64> {
    let raw = row.get(key).with_context(|| format!("missing column {key}"))?;
    raw.parse().with_context(|| format!("column {key}: bad number {raw}"))
}

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// Line chart; with `log_y` non-positive and non-finite values are dropped.
pub fn line_svg(series: &[Series], log_y: bool, title: &str, xlabel: &str, ylabel: &str) -> String {
    let ty = |y: f64| if log_y { y.log10() } else { y };
    let pts: Vec<Vec<(f64, f64)>> = series
        .iter()
        .map(|s| {
            s.points
                .iter()
                .filter(|(x, y)| x.is_finite() && y.is_finite() && (!log_y || *y > 0.0))
                .map(|&(x, y)| (x, ty(y)))
                .collect()
        })
        .collect();
    let all = pts.iter().flatten();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 == x0 {
        x1 = x0 + 1.0;
    }
    if y1 == y0 {
        y1 = y0 + 1.0;
    }
    let sx = |x: f64| PAD + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * PAD);
    let sy = |y: f64| HEIGHT - PAD - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * PAD);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{title}</text>"#,
        WIDTH / 2.0
    );
    let _ = writeln!(
        svg,
        r#"<path d="M{PAD} {PAD} V{b} H{r}" fill="none" stroke="black"/>"#,
        b = HEIGHT - PAD,
        r = WIDTH - PAD
    );
    let fmt_y = |y: f64| if log_y { format!("1e{y:.1}") } else { format!("{y:.3}") };
    for (v, anchor) in [(y0, HEIGHT - PAD), (y1, PAD)] {
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{anchor:.2}" text-anchor="end">{}</text>"#,
            PAD - 4.0,
            fmt_y(v)
        );
    }
    for v in [x0, x1] {
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{}" text-anchor="middle">{v:.3}</text>"#,
            sx(v),
            HEIGHT - PAD + 16.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">{xlabel}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="14" y="{}" text-anchor="middle" transform="rotate(-90 14 {})">{ylabel}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );
    for (i, (s, p)) in series.iter().zip(&pts).enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        if p.is_empty() {
            continue;
        }
        let coords: Vec<String> = p.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.2"/>"#,
            coords.join(" ")
        );
        if series.len() <= PALETTE.len() {
            let ly = PAD + 14.0 * i as f64;
            let _ = writeln!(
                svg,
                r#"<text x="{}" y="{ly:.2}" fill="{color}" text-anchor="end">{}</text>"#,
                WIDTH - PAD - 4.0,
                s.label
            );
        }
    }
    svg.push_str("</svg>\n");
    svg
}

fn diverging(t: f64) -> Rgb<u8> {
    let t = t.clamp(0.0, 1.0);
    let lerp = |a: f64, b: f64, s: f64| (a + (b - a) * s).round() as u8;
    if t < 0.5 {
        let s = t / 0.5;
        Rgb([lerp(33.0, 247.0, s), lerp(102.0, 247.0, s), lerp(172.0, 247.0, s)])
    } else {
        let s = (t - 0.5) / 0.5;
        Rgb([lerp(247.0, 178.0, s), lerp(247.0, 24.0, s), lerp(247.0, 43.0, s)])
    }
}

const PIXELS_PER_CELL: u32 = 4;

/// Heatmaps of the given columns of a grid table (`i`, `j` integer cell
/// coordinates) on a shared color scale.
pub fn heatmaps_png(grid_csv: &Path, columns: &[(&str, &Path)]) -> Result<()> {
    let rows = read_table(grid_csv)?;
    if rows.is_empty() {
        bail!("{} is empty", grid_csv.display());
    }
    let mut n = 0usize;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for r in &rows {
        n = n.max(num(r, "i")? as usize + 1).max(num(r, "j")? as usize + 1);
        for (c, _) in columns {
            let v = num(r, c)?;
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    let span = if hi > lo { hi - lo } else { 1.0 };
    let size = n as u32 * PIXELS_PER_CELL;
    for (c, out) in columns {
        let mut img = ImageBuffer::from_pixel(size, size, Rgb([0u8, 0, 0]));
        for r in &rows {
            let (i, j) = (num(r, "i")? as u32, num(r, "j")? as u32);
            let px = diverging((num(r, c)? - lo) / span);
            for dx in 0..PIXELS_PER_CELL {
                for dy in 0..PIXELS_PER_CELL {
                    img.put_pixel(i * PIXELS_PER_CELL + dx, size - 1 - (j * PIXELS_PER_CELL + dy), px);
                }
            }
        }
        img.save(out).with_context(|| format!("writing {}", out.display()))?;
    }
    Ok(())
}

/// `s′(y)` per direction from `sprime.csv`.
pub fn sprime_svg(csv_path: &Path, out: &Path) -> Result<()> {
    let mut by_dir: BTreeMap<(i64, i64), Vec<(f64, f64)>> = BTreeMap::new();
    for r in read_table(csv_path)? {
        let key = (num(&r, "delta_a")? as i64, num(&r, "delta_b")? as i64);
        by_dir.entry(key).or_default().push((num(&r, "y")?, num(&r, "sprime")?));
    }
    let series: Vec<Series> = by_dir
        .into_iter()
        .map(|((a, b), points)| Series {
            label: format!("({a},{b})"),
            points,
        })
        .collect();
    std::fs::write(
        out,
        line_svg(&series, false, "pushforward density per direction", "y", "s'(y)"),
    )?;
    Ok(())
}

/// Coefficient errors against `K` from `sweep.csv`.
pub fn error_svg(csv_path: &Path, out: &Path) -> Result<()> {
    let rows = read_table(csv_path)?;
    let mut series = Vec::new();
    for (col, label) in [("b_rel_linf", "B rel Linf"), ("v_rel_linf", "V rel Linf")] {
        let points = rows
            .iter()
            .map(|r| Ok((num(r, "k")?, num(r, col)?)))
            .collect::<Result<Vec<_>>>()?;
        series.push(Series {
            label: label.into(),
            points,
        });
    }
    std::fs::write(
        out,
        line_svg(&series, true, "reconstruction error vs K", "K", "relative error"),
    )?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn svg_is_deterministic_and_skips_bad_points() {
        let s = [Series {
            label: "a".into(),
            points: vec![(1.0, 1e-3), (2.0, 0.0), (3.0, f64::NAN), (4.0, 1e-9)],
        }];
        let a = line_svg(&s, true, "t", "x", "y");
        assert_eq!(a, line_svg(&s, true, "t", "x", "y"));
        assert_eq!(a.matches("<polyline").count(), 1);
        assert!(a.contains("1e-3.0") && a.contains("1e-9.0"));
    }

    #[test]
    fn colormap_ends() {
        assert_eq!(diverging(0.5), Rgb([247, 247, 247]));
        assert_eq!(diverging(-1.0), Rgb([33, 102, 172]));
        assert_eq!(diverging(2.0), Rgb([178, 24, 43]));
    }
}
