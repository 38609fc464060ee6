//! CSV and JSON file formats. Floating point fields are written with 17
//! significant digits so values survive a text round trip bit for bit.

use std::collections::HashMap;
use std::io::{Read, Write};

use serde_json::json;

use crate::analysis::{MEstimate, Verdict};
use crate::bound::BoundCurve;
use crate::error::{Error, Result};
use crate::sim::{Combo, CoincidenceTable};

pub const CURVE_HEADER: [&str; 2] = ["beta", "beta_t_min"];
pub const COINCIDENCE_HEADER: [&str; 3] = ["bin_center_s", "combo", "count"];
pub const M_SERIES_HEADER: [&str; 4] = ["bin_center_s", "M", "sigma_M", "verdict"];

/// `x` with 17 significant digits in scientific notation.
pub fn fmt17(x: f64) -> String {
    format!("{:.16e}", x)
}

fn csv_err(e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line()).unwrap_or(0);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Parse {
            line,
            message: format!("{:?}", other),
        },
    }
}

pub fn write_curve_csv<W: Write>(curve: &BoundCurve<f64>, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CURVE_HEADER).map_err(csv_err)?;
    for &(beta, bound) in &curve.points {
        w.write_record([fmt17(beta), fmt17(bound)]).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// JSON form of a curve, echoing the parameters it was computed from.
pub fn curve_json(curve: &BoundCurve<f64>) -> serde_json::Value {
    let i = &curve.inputs;
    json!({
        "label": curve.label,
        "inputs": {
            "rho_bar": i.rho_bar,
            "delta_t_acq_s": i.delta_t_acq,
            "sidereal_period_s": i.sidereal_period,
            "chi_rad": i.chi,
        },
        "points": curve
            .points
            .iter()
            .map(|&(beta, b)| json!({ "beta": beta, "beta_t_min": b }))
            .collect::<Vec<_>>(),
    })
}

pub fn read_curve_csv<R: Read>(input: R) -> Result<Vec<(f64, f64)>> {
    let mut r = csv::Reader::from_reader(input);
    check_header(&mut r, &CURVE_HEADER)?;
    let mut points = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        points.push((parse_f64(&rec[0], line)?, parse_f64(&rec[1], line)?));
    }
    Ok(points)
}

/// Writes one row per bin and combination, grouped by pass (combination) in
/// measurement order, bins ascending within a pass.
pub fn write_coincidence_csv<W: Write>(tables: &[CoincidenceTable], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COINCIDENCE_HEADER).map_err(csv_err)?;
    for combo in Combo::ALL {
        for t in tables {
            w.write_record([fmt17(t.bin_center), combo.label().to_string(), t.count(combo).to_string()])
                .map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn check_header<R: Read>(r: &mut csv::Reader<R>, expected: &[&str]) -> Result<()> {
    let header = r.headers().map_err(csv_err)?;
    if header.iter().map(str::trim).ne(expected.iter().copied()) {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header '{}', found '{}'", expected.join(","), header.iter().collect::<Vec<_>>().join(",")),
        });
    }
    Ok(())
}

fn parse_f64(s: &str, line: u64) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|_| Error::Parse {
        line,
        message: format!("not a number: '{}'", s),
    })
}

/// Reads coincidence rows and assembles one table per bin centre. Bins are
/// aligned across passes by exact equality of their centres; every bin must
/// carry all seven combinations exactly once.
pub fn read_coincidence_csv<R: Read>(input: R) -> Result<Vec<CoincidenceTable>> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    check_header(&mut r, &COINCIDENCE_HEADER)?;

    let mut index: HashMap<u64, usize> = HashMap::new();
    let mut bins: Vec<(f64, [Option<u64>; 7], u64)> = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        if rec.len() != 3 {
            return Err(Error::Parse {
                line,
                message: format!("expected 3 fields, found {}", rec.len()),
            });
        }
        let center = parse_f64(&rec[0], line)?;
        if !center.is_finite() {
            return Err(Error::Parse {
                line,
                message: "bin centre must be finite".into(),
            });
        }
        let combo: Combo = rec[1].parse().map_err(|_| Error::Parse {
            line,
            message: format!("unknown combination '{}'", &rec[1]),
        })?;
        let count: u64 = rec[2].trim().parse().map_err(|_| Error::Parse {
            line,
            message: format!("count is not a non-negative integer: '{}'", &rec[2]),
        })?;
        let slot = *index.entry(center.to_bits()).or_insert_with(|| {
            bins.push((center, [None; 7], line));
            bins.len() - 1
        });
        let cell = &mut bins[slot].1[combo.index()];
        if cell.is_some() {
            return Err(Error::Parse {
                line,
                message: format!("duplicate row for bin {} combination {}", center, combo),
            });
        }
        *cell = Some(count);
    }

    let mut tables = bins
        .into_iter()
        .map(|(center, cells, line)| {
            let mut counts = [0u64; 7];
            for (combo, (dst, src)) in Combo::ALL.iter().zip(counts.iter_mut().zip(cells)) {
                *dst = src.ok_or_else(|| Error::Parse {
                    line,
                    message: format!("bin at {} s has no row for combination {}", center, combo),
                })?;
            }
            Ok(CoincidenceTable {
                bin_center: center,
                counts,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    tables.sort_by(|a, b| a.bin_center.total_cmp(&b.bin_center));
    Ok(tables)
}

pub fn write_m_series_csv<W: Write>(series: &[(MEstimate, Verdict)], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(M_SERIES_HEADER).map_err(csv_err)?;
    for (e, v) in series {
        w.write_record([fmt17(e.bin_center), fmt17(e.m), fmt17(e.sigma_m), v.label().to_string()])
            .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}
