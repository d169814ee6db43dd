use std::io::{self, Write};

use super::PointwiseGeometry;
use crate::csv::fmt_f64;

/// Writes one surface snapshot: `grid_coordinate, r, kappa_1[, kappa_2], u, sigma_k`.
pub fn write_snapshot_csv<W: Write>(geo: &PointwiseGeometry, k: usize, mut out: W) -> io::Result<()> {
    let curvature_cols: Vec<String> = (1..=geo.n).map(|i| format!("kappa_{i}")).collect();
    writeln!(out, "grid_coordinate,r,{},u,sigma_k", curvature_cols.join(","))?;
    for i in 0..geo.len() {
        let kappas: Vec<String> = geo.kappa(i).iter().map(|&k| fmt_f64(k)).collect();
        writeln!(
            out,
            "{},{},{},{},{}",
            fmt_f64(geo.coord[i]),
            fmt_f64(geo.r[i]),
            kappas.join(","),
            fmt_f64(geo.u[i]),
            fmt_f64(geo.sigma(i, k))
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{compute_geometry, make_shape, ShapeSpec};

    #[test]
    fn header_and_row_shape() {
        let g = make_shape(&ShapeSpec::EllipsoidOfRevolution { a: 1.2, c: 1.0 }, 2, 16).unwrap();
        let geo = compute_geometry(&g).unwrap();
        let mut buf = Vec::new();
        write_snapshot_csv(&geo, 2, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "grid_coordinate,r,kappa_1,kappa_2,u,sigma_k");
        assert_eq!(lines.len(), 18);
        assert!(lines.iter().all(|l| l.split(',').count() == 6));
        assert!(text.ends_with('\n'));
    }
}
