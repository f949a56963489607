//! CSV and JSON emitters. Every float leaves here rounded to 12 significant
//! digits, so the two formats carry identical values.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use entdist::analysis::{ConjectureTrial, Conjecture2Point, SweepRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub param1: f64,
    pub param2: f64,
    pub grid_min_pt_eig: f64,
    pub sdp_bound: f64,
    pub opt_c: f64,
    pub opt_s1: f64,
    pub opt_s2: f64,
    pub tight: bool,
    pub is_ea: bool,
}

impl From<&SweepRecord> for SweepRow {
    fn from(r: &SweepRecord) -> Self {
        Self {
            param1: round12(r.params[0].1),
            param2: round12(r.params[1].1),
            grid_min_pt_eig: round12(r.grid_min_pt_eig),
            sdp_bound: round12(r.sdp_bound),
            opt_c: round12(r.optimal_input.c),
            opt_s1: round12(r.optimal_input.s1),
            opt_s2: round12(r.optimal_input.s2),
            tight: r.tight,
            is_ea: r.is_ea,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub seed: u64,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl From<&ConjectureTrial> for TrialRow {
    fn from(t: &ConjectureTrial) -> Self {
        Self {
            seed: t.seed,
            lhs: round12(t.lhs),
            rhs: round12(t.rhs),
            holds: t.holds,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub n: f64,
    pub gamma: f64,
    pub sdp_bound: f64,
}

impl From<&Conjecture2Point> for CurveRow {
    fn from(p: &Conjecture2Point) -> Self {
        Self {
            n: round12(p.n),
            gamma: round12(p.gamma),
            sdp_bound: round12(p.sdp_bound),
        }
    }
}

pub fn to_csv<T: Serialize>(rows: &[T], header: &[&str]) -> io::Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.into_inner().map_err(|e| e.into_error())
}

pub fn to_json<T: Serialize>(rows: &[T]) -> io::Result<Vec<u8>> {
    let mut buf = serde_json::to_vec_pretty(rows)?;
    buf.push(b'\n');
    Ok(buf)
}

pub fn encode<T: Serialize>(rows: &[T], header: &[&str], format: Format) -> io::Result<Vec<u8>> {
    match format {
        Format::Csv => to_csv(rows, header),
        Format::Json => to_json(rows),
    }
}

/// Writes to `path`, or to stdout when absent.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> io::Result<()> {
    match path {
        Some(p) => File::create(p)?.write_all(bytes),
        None => io::stdout().lock().write_all(bytes),
    }
}

pub const SWEEP_HEADER: [&str; 9] = [
    "param1",
    "param2",
    "grid_min_pt_eig",
    "sdp_bound",
    "opt_c",
    "opt_s1",
    "opt_s2",
    "tight",
    "is_ea",
];
pub const TRIAL_HEADER: [&str; 4] = ["seed", "lhs", "rhs", "holds"];
pub const CURVE_HEADER: [&str; 3] = ["n", "gamma", "sdp_bound"];

#[cfg(test)]
mod tests {
    use super::*;

    fn from_csv<T: for<'de> Deserialize<'de>>(bytes: &[u8]) -> Vec<T> {
        csv::Reader::from_reader(bytes)
            .deserialize()
            .collect::<Result<_, _>>()
            .unwrap()
    }

    #[test]
    fn round12_keeps_twelve_digits() {
        assert_eq!(round12(0.1 + 0.2), 0.3);
        assert_eq!(round12(2.0 / 3.0), 0.666666666667);
        assert_eq!(round12(-1.234567890123456e-9), -1.23456789012e-9);
        assert_eq!(round12(-0.0), 0.0);
        assert!(round12(f64::NAN).is_nan());
    }

    #[test]
    fn sweep_csv_round_trips_through_json() {
        let rows = vec![
            SweepRow {
                param1: 0.67,
                param2: round12(0.1 * 3.0),
                grid_min_pt_eig: round12(-1.0 / 7.0),
                sdp_bound: round12(-1.0 / 7.0 - 3e-9),
                opt_c: 0.5,
                opt_s1: 0.0,
                opt_s2: 1.0,
                tight: true,
                is_ea: false,
            },
            SweepRow {
                param1: 1e-13,
                param2: 0.99,
                grid_min_pt_eig: 2.5e-11,
                sdp_bound: round12(std::f64::consts::PI),
                opt_c: 0.01,
                opt_s1: 0.37,
                opt_s2: 0.0,
                tight: false,
                is_ea: true,
            },
        ];
        let csv_bytes = to_csv(&rows, &SWEEP_HEADER).unwrap();
        let text = String::from_utf8(csv_bytes.clone()).unwrap();
        assert!(text.starts_with(
            "param1,param2,grid_min_pt_eig,sdp_bound,opt_c,opt_s1,opt_s2,tight,is_ea\n"
        ));
        let parsed: Vec<SweepRow> = from_csv(&csv_bytes);
        assert_eq!(parsed, rows);
        let json = to_json(&parsed).unwrap();
        let back: Vec<SweepRow> = serde_json::from_slice(&json).unwrap();
        assert_eq!(to_csv(&back, &SWEEP_HEADER).unwrap(), csv_bytes);
    }

    #[test]
    fn trial_and_curve_headers() {
        let t = to_csv(
            &[TrialRow {
                seed: 42,
                lhs: -0.25,
                rhs: -0.3,
                holds: true,
            }],
            &TRIAL_HEADER,
        )
        .unwrap();
        assert_eq!(String::from_utf8(t).unwrap(), "seed,lhs,rhs,holds\n42,-0.25,-0.3,true\n");
        let c = to_csv(
            &[CurveRow {
                n: 0.5,
                gamma: round12(2.0 - 2f64.sqrt()),
                sdp_bound: 1e-10,
            }],
            &CURVE_HEADER,
        )
        .unwrap();
        let text = String::from_utf8(c).unwrap();
        assert!(text.starts_with("n,gamma,sdp_bound\n0.5,0.585786437627,"), "{text}");
        let parsed: Vec<CurveRow> = from_csv(text.as_bytes());
        let json = to_json(&parsed).unwrap();
        let back: Vec<CurveRow> = serde_json::from_slice(&json).unwrap();
        assert_eq!(back, parsed);
    }
}
