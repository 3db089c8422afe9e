//! File formats: sampled functions as a JSON header plus CSV body, atomic
//! decompositions as JSON with CSV profiles, and plain CSV tables. All
//! numbers use '.' as the decimal separator regardless of locale; floats are
//! written with Rust's shortest round-trip formatting, which makes outputs
//! byte-reproducible.

use crate::atoms::AtomicDecomposition;
use crate::error::{Error, Result};
use crate::measure::Alpha;
use crate::quadrature::Grid;
use crate::transforms::{GridFunction, Tail};
use serde::{Deserialize, Serialize};
use std::io::{BufRead, BufReader, Read, Write};

#[derive(Debug, Serialize, Deserialize)]
struct GridFunctionHeader {
    alpha: f64,
    x_max: f64,
    tail: Tail,
    boundaries: Vec<f64>,
}

/// Writes a sampled function: one JSON header line, a `x,value` column header,
/// then one CSV row per node.
pub fn write_grid_function<W: Write>(f: &GridFunction, mut out: W) -> Result<()> {
    let header = GridFunctionHeader {
        alpha: f.alpha().get(),
        x_max: f.grid.x_max(),
        tail: f.tail,
        boundaries: f.grid.boundaries.clone(),
    };
    writeln!(out, "{}", serde_json::to_string(&header)?)?;
    writeln!(out, "x,value")?;
    for (x, v) in f.grid.nodes().iter().zip(&f.values) {
        writeln!(out, "{x},{v}")?;
    }
    Ok(())
}

/// Reads the format produced by [`write_grid_function`].
pub fn read_grid_function<R: Read>(input: R) -> Result<GridFunction> {
    let mut lines = BufReader::new(input).lines();
    let header_line = lines
        .next()
        .ok_or_else(|| Error::InvalidInput("empty function file".into()))??;
    let header: GridFunctionHeader = serde_json::from_str(&header_line)
        .map_err(|e| Error::InvalidInput(format!("bad function header: {e}")))?;
    let alpha = Alpha::new(header.alpha)?;
    let grid = Grid::from_boundaries(alpha, header.boundaries)?;
    let column_line = lines
        .next()
        .ok_or_else(|| Error::InvalidInput("missing column header".into()))??;
    if column_line.trim() != "x,value" {
        return Err(Error::InvalidInput(format!(
            "unexpected column header: {column_line}"
        )));
    }
    let mut values = Vec::with_capacity(grid.node_count());
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let (_, v) = line
            .split_once(',')
            .ok_or_else(|| Error::InvalidInput(format!("bad row: {line}")))?;
        values.push(
            v.trim()
                .parse::<f64>()
                .map_err(|e| Error::InvalidInput(format!("bad value {v}: {e}")))?,
        );
    }
    if values.len() != grid.node_count() {
        return Err(Error::InvalidInput(format!(
            "value count {} does not match grid ({} nodes)",
            values.len(),
            grid.node_count()
        )));
    }
    Ok(GridFunction {
        grid,
        values,
        tail: header.tail,
    })
}

/// Serializable summary of one decomposition term.
#[derive(Debug, Serialize, Deserialize)]
struct TermMeta {
    lambda: f64,
    center: f64,
    radius: f64,
    kind: crate::atoms::AtomKind,
}

#[derive(Debug, Serialize, Deserialize)]
struct DecompositionDoc {
    alpha: f64,
    coefficient_l1: f64,
    terms: Vec<TermMeta>,
}

/// Writes the decomposition metadata as JSON (intervals, kinds, coefficients).
pub fn write_decomposition_json<W: Write>(dec: &AtomicDecomposition, mut out: W) -> Result<()> {
    let doc = DecompositionDoc {
        alpha: dec.alpha.get(),
        coefficient_l1: dec.coefficient_l1(),
        terms: dec
            .terms
            .iter()
            .map(|(lambda, atom)| TermMeta {
                lambda: *lambda,
                center: atom.interval.center,
                radius: atom.interval.radius,
                kind: atom.kind,
            })
            .collect(),
    };
    writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
    Ok(())
}

/// Writes every atom profile as CSV rows (atom_index, x, value).
pub fn write_decomposition_profiles<W: Write>(dec: &AtomicDecomposition, mut out: W) -> Result<()> {
    writeln!(out, "atom_index,x,value")?;
    for (i, (_, atom)) in dec.terms.iter().enumerate() {
        for (x, v) in atom.profile.grid.nodes().iter().zip(&atom.profile.values) {
            writeln!(out, "{i},{x},{v}")?;
        }
    }
    Ok(())
}

/// Kernel-table CSV row.
#[derive(Debug, Clone, Copy)]
pub struct KernelRow {
    pub alpha: f64,
    pub t: Option<f64>,
    pub x: f64,
    pub y: f64,
    pub value: f64,
    pub est_error: f64,
}

/// Writes a kernel table with the fixed column set
/// `alpha,t,x,y,value,est_error` (t left empty for time-independent kernels).
pub fn write_kernel_table<W: Write>(rows: &[KernelRow], mut out: W) -> Result<()> {
    writeln!(out, "alpha,t,x,y,value,est_error")?;
    for r in rows {
        match r.t {
            Some(t) => writeln!(
                out,
                "{},{},{},{},{},{}",
                r.alpha, t, r.x, r.y, r.value, r.est_error
            )?,
            None => writeln!(
                out,
                "{},,{},{},{},{}",
                r.alpha, r.x, r.y, r.value, r.est_error
            )?,
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample_fn() -> GridFunction {
        let alpha = Alpha::new(1.5).unwrap();
        let grid = Grid::standard(alpha, 5.0).unwrap();
        GridFunction::from_fn(grid, |x| (-(x - 1.0) * (x - 1.0)).exp())
            .with_tail(Tail::CompactSupport)
    }

    #[test]
    fn grid_function_roundtrip() {
        let f = sample_fn();
        let mut buf = Vec::new();
        write_grid_function(&f, &mut buf).unwrap();
        let g = read_grid_function(buf.as_slice()).unwrap();
        assert_eq!(f.grid.boundaries, g.grid.boundaries);
        assert_eq!(f.values, g.values);
        assert_eq!(f.tail, g.tail);
    }

    #[test]
    fn rejects_malformed() {
        assert!(read_grid_function("".as_bytes()).is_err());
        assert!(read_grid_function("{not json}\nx,value\n".as_bytes()).is_err());
        let mut buf = Vec::new();
        write_grid_function(&sample_fn(), &mut buf).unwrap();
        // truncate one value row
        let text = String::from_utf8(buf).unwrap();
        let truncated: Vec<&str> = text.lines().take(10).collect();
        assert!(read_grid_function(truncated.join("\n").as_bytes()).is_err());
    }

    #[test]
    fn kernel_table_columns() {
        let rows = vec![
            KernelRow {
                alpha: 1.0,
                t: Some(0.5),
                x: 1.0,
                y: 2.0,
                value: 3.0,
                est_error: 1e-12,
            },
            KernelRow {
                alpha: 1.0,
                t: None,
                x: 1.0,
                y: 2.0,
                value: -0.5,
                est_error: 0.0,
            },
        ];
        let mut buf = Vec::new();
        write_kernel_table(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "alpha,t,x,y,value,est_error");
        assert_eq!(lines.next().unwrap(), "1,0.5,1,2,3,0.000000000001");
        assert_eq!(lines.next().unwrap(), "1,,1,2,-0.5,0");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn roundtrip_preserves_tail(coeff in 0.1f64..5.0, exponent in 2.5f64..8.0) {
            let mut f = sample_fn();
            f.tail = Tail::PowerDecay { coeff, exponent };
            let mut buf = Vec::new();
            write_grid_function(&f, &mut buf).unwrap();
            let g = read_grid_function(buf.as_slice()).unwrap();
            prop_assert_eq!(f.tail, g.tail);
            prop_assert_eq!(f.values, g.values);
        }
    }
}
