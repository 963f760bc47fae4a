//! CSV and JSON encodings of densities. Layouts are described in `docs/formats.md`.

use std::io::{Read, Write};

use super::grid::Grid1D;
use super::gridded::GridDensity1D;
use super::samples::SampleCloud;
use crate::error::{Error, Result};
use crate::scalar::{to_f64, Real};

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

/// Writes `x,f` rows at cell centers.
pub fn write_density_csv<T: Real, W: Write>(f: &GridDensity1D<T>, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "f"]).map_err(csv_err)?;
    for (x, v) in f.grid().centers().into_iter().zip(f.values()) {
        w.write_record([to_f64(x).to_string(), to_f64(*v).to_string()])
            .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads `x,f` rows; the grid is recovered from the equally spaced centers.
pub fn read_density_csv<R: Read>(input: R) -> Result<GridDensity1D<f64>> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers().map_err(csv_err)?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::Parse(format!("missing column `{name}`")))
    };
    let (ix, iv) = (col("x")?, col("f")?);
    let mut xs = Vec::new();
    let mut fs = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        let num = |i: usize| -> Result<f64> {
            rec.get(i)
                .unwrap_or("")
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("line {}: {e}", rec.position().map_or(0, |p| p.line()))))
        };
        xs.push(num(ix)?);
        fs.push(num(iv)?);
    }
    if xs.len() < Grid1D::<f64>::MIN_CELLS {
        return Err(Error::InvalidGrid(format!("only {} rows", xs.len())));
    }
    let n = xs.len();
    let h = (xs[n - 1] - xs[0]) / (n - 1) as f64;
    for (i, &x) in xs.iter().enumerate() {
        let expect = xs[0] + h * i as f64;
        if (x - expect).abs() > 1e-9 * (1.0 + x.abs()) {
            return Err(Error::InvalidGrid(format!("row {i}: centers are not equally spaced")));
        }
    }
    let grid = Grid1D::new(xs[0] - 0.5 * h, xs[n - 1] + 0.5 * h, n)?;
    GridDensity1D::new(grid, fs)
}

/// Writes one row per point: `x0,...,x{n-1},w`.
pub fn write_samples_csv<T: Real, W: Write>(c: &SampleCloud<T>, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = (0..c.dim()).map(|k| format!("x{k}")).collect();
    header.push("w".into());
    w.write_record(&header).map_err(csv_err)?;
    for (p, wt) in c.points().zip(c.weights()) {
        let mut row: Vec<String> = p.iter().map(|&x| to_f64(x).to_string()).collect();
        row.push(to_f64(*wt).to_string());
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a sample cloud; a missing `w` column means equal weights.
pub fn read_samples_csv<R: Read>(input: R) -> Result<SampleCloud<f64>> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers().map_err(csv_err)?.clone();
    let w_col = headers.iter().position(|h| h.trim() == "w");
    let coord_cols: Vec<usize> = (0..headers.len()).filter(|&i| Some(i) != w_col).collect();
    if coord_cols.is_empty() {
        return Err(Error::Parse("no coordinate columns".into()));
    }
    let mut points = Vec::new();
    let mut weights = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        let parse = |i: usize| -> Result<f64> {
            rec.get(i)
                .unwrap_or("")
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(e.to_string()))
        };
        points.push(coord_cols.iter().map(|&i| parse(i)).collect::<Result<Vec<_>>>()?);
        if let Some(i) = w_col {
            weights.push(parse(i)?);
        }
    }
    let dim = coord_cols.len();
    if w_col.is_some() {
        SampleCloud::new(dim, points, weights)
    } else {
        SampleCloud::uniform(dim, points)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::AnalyticDensity;

    #[test]
    fn density_csv_round_trip_is_exact() {
        let g = Grid1D::new(-8.0, 8.0, 256).unwrap();
        let f = AnalyticDensity::gaussian_1d(0.3, 1.1).unwrap().rasterize(&g).unwrap();
        let mut buf = Vec::new();
        write_density_csv(&f, &mut buf).unwrap();
        let back = read_density_csv(buf.as_slice()).unwrap();
        assert_eq!(back.values(), f.values());
        assert!((back.grid().h() - g.h()).abs() < 1e-12);
        let mut buf2 = Vec::new();
        write_density_csv(&back, &mut buf2).unwrap();
        assert!(buf2.len() > 100);
    }

    #[test]
    fn samples_csv_round_trip() {
        let c = SampleCloud::new(2, vec![vec![0.0, 1.5], vec![-2.0, 0.25]], vec![0.3, 0.7]).unwrap();
        let mut buf = Vec::new();
        write_samples_csv(&c, &mut buf).unwrap();
        assert_eq!(read_samples_csv(buf.as_slice()).unwrap(), c);
        let plain = "x\n1\n2\n";
        let u = read_samples_csv(plain.as_bytes()).unwrap();
        assert_eq!(u.weights(), &[0.5, 0.5]);
    }

    #[test]
    fn rejects_uneven_spacing() {
        let mut s = String::from("x,f\n");
        for i in 0..10 {
            let x = if i == 5 { 5.3 } else { i as f64 };
            s.push_str(&format!("{x},0.1\n"));
        }
        assert!(matches!(read_density_csv(s.as_bytes()), Err(Error::InvalidGrid(_))));
    }
}
