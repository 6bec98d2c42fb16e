//! CSV exchange format.
//!
//! Every file starts with `#` comment lines (`# key = value`), then a header
//! row and data rows. Numbers are written with 17 significant digits so that
//! a write/read round trip is exact.
//!
//! | content          | columns            |
//! |------------------|--------------------|
//! | one-photon       | `x,re,im`          |
//! | two-photon       | `x1,x2,re,im`, row-major with `x1` outer |
//! | correlation      | `tau,value`        |
//! | excitation trace | `t,value`          |

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex;

use crate::correlations::CorrelationCurve;
use crate::error::{Error, Result};
use crate::model::{Grid1D, Wavefunction1, Wavefunction2};
use crate::scalar::{lit, Scalar};

/// Comment lines written above the header row.
pub type Meta = [(String, String)];

fn write_meta(w: &mut impl Write, meta: &Meta) -> Result<()> {
    for (k, v) in meta {
        writeln!(w, "# {k} = {v}")?;
    }
    Ok(())
}

fn num<T: Scalar>(v: T) -> String {
    format!("{:.16e}", v.to_f64().unwrap_or(f64::NAN))
}

fn write_rows<T: Scalar>(
    w: &mut impl Write,
    meta: &Meta,
    header: &str,
    rows: impl Iterator<Item = Vec<T>>,
) -> Result<()> {
    write_meta(w, meta)?;
    writeln!(w, "{header}")?;
    for r in rows {
        let line: Vec<String> = r.into_iter().map(num).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_wavefunction1<T: Scalar>(w: &mut impl Write, psi: &Wavefunction1<T>, meta: &Meta) -> Result<()> {
    let g = psi.grid();
    let rows = psi.amp().iter().enumerate().map(|(i, v)| vec![g.x(i), v.re, v.im]);
    write_rows(w, meta, "x,re,im", rows)
}

pub fn write_wavefunction2<T: Scalar>(w: &mut impl Write, psi: &Wavefunction2<T>, meta: &Meta) -> Result<()> {
    let g = psi.grid();
    let n = g.len();
    let rows = (0..n * n).map(|p| {
        let v = psi.amp()[p];
        vec![g.x(p / n), g.x(p % n), v.re, v.im]
    });
    write_rows(w, meta, "x1,x2,re,im", rows)
}

pub fn write_curve<T: Scalar>(w: &mut impl Write, curve: &CorrelationCurve<T>, meta: &Meta) -> Result<()> {
    let rows = curve.tau.iter().zip(&curve.values).map(|(&t, &v)| vec![t, v]);
    write_rows(w, meta, "tau,value", rows)
}

pub fn write_trace<T: Scalar>(w: &mut impl Write, trace: &[(T, T)], meta: &Meta) -> Result<()> {
    write_rows(w, meta, "t,value", trace.iter().map(|&(t, v)| vec![t, v]))
}

/// Creates `path` and hands a buffered writer to `f`.
pub fn to_file(path: impl AsRef<Path>, f: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    f(&mut w)
}

/// Parsed numeric table with its comment metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub meta: Vec<(String, String)>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

pub fn read_table(r: impl Read) -> Result<Table> {
    let mut text = String::new();
    let mut r = r;
    r.read_to_string(&mut text)?;
    let meta = text
        .lines()
        .filter_map(|l| l.strip_prefix('#'))
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .collect();
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = rdr.headers()?.iter().map(str::to_string).collect::<Vec<_>>();
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|s| s.parse::<f64>().map_err(|e| Error::Format(format!("`{s}`: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        if row.len() != header.len() {
            return Err(Error::Format(format!("row with {} fields under a {}-column header", row.len(), header.len())));
        }
        rows.push(row);
    }
    Ok(Table { meta, header, rows })
}

fn expect_header(t: &Table, want: &[&str]) -> Result<()> {
    if t.header.iter().map(String::as_str).ne(want.iter().copied()) {
        return Err(Error::Format(format!("expected columns {}, found {}", want.join(","), t.header.join(","))));
    }
    Ok(())
}

/// Rebuilds a uniform grid from its listed nodes.
fn grid_from_nodes<T: Scalar>(xs: &[f64]) -> Result<Grid1D<T>> {
    if xs.len() < 2 {
        return Err(Error::Format("need at least two grid points".into()));
    }
    let n = xs.len();
    let g = Grid1D::uniform(lit::<T>(xs[0]), lit::<T>(xs[n - 1]), n)?;
    let tol = 1e-9 * (xs[n - 1] - xs[0]).abs().max(1.0);
    for (i, &x) in xs.iter().enumerate() {
        if (g.x(i).to_f64().unwrap_or(f64::NAN) - x).abs() > tol {
            return Err(Error::Format(format!("grid is not uniform near x = {x}")));
        }
    }
    Ok(g)
}

pub fn read_wavefunction1<T: Scalar>(r: impl Read) -> Result<Wavefunction1<T>> {
    let t = read_table(r)?;
    expect_header(&t, &["x", "re", "im"])?;
    let xs: Vec<f64> = t.rows.iter().map(|r| r[0]).collect();
    let g = grid_from_nodes(&xs)?;
    let amp = t.rows.iter().map(|r| Complex::new(lit(r[1]), lit(r[2]))).collect();
    Wavefunction1::sampled(g, amp)
}

/// Reads a two-photon table. The array is stored exactly as written; use
/// [`Wavefunction2::symmetrized`] on the amplitudes to enforce symmetry.
pub fn read_wavefunction2<T: Scalar>(r: impl Read) -> Result<Wavefunction2<T>> {
    let t = read_table(r)?;
    expect_header(&t, &["x1", "x2", "re", "im"])?;
    let total = t.rows.len();
    let n = (total as f64).sqrt().round() as usize;
    if n * n != total || n < 2 {
        return Err(Error::Format(format!("{total} rows do not form a square grid")));
    }
    let xs: Vec<f64> = (0..n).map(|j| t.rows[j][1]).collect();
    let g = grid_from_nodes::<T>(&xs)?;
    for (p, row) in t.rows.iter().enumerate() {
        if row[0] != t.rows[(p / n) * n][0] || row[1] != xs[p % n] {
            return Err(Error::Format(format!("row {p} is out of row-major order")));
        }
    }
    let amp = t.rows.iter().map(|r| Complex::new(lit(r[2]), lit(r[3]))).collect();
    Wavefunction2::from_raw_unchecked(g, amp)
}

pub fn read_curve(r: impl Read) -> Result<(Vec<f64>, Vec<f64>)> {
    let t = read_table(r)?;
    expect_header(&t, &["tau", "value"])?;
    Ok(t.rows.iter().map(|r| (r[0], r[1])).unzip())
}
