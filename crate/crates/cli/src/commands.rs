use std::fmt;
use std::path::Path;

use serde_json::{json, Value};

use entdist::analysis::{
    conjecture1_batch, conjecture2_scan, default_form, optimal_input_search, parse_grid,
    strategy_compare, sweep, PairFamily,
};
use entdist::channels::{choi, find_transpose_simulator, is_eb, parse_channel, ChannelFamily, QubitChannel};
use entdist::entanglement::StateForm;
use entdist::linalg::ComplexMatrix;
use entdist::sdp::{certify_gap, sdp_bound, SdpStatus, SOLVER_TOL};

use crate::output::{
    emit, encode, round12, CurveRow, SweepRow, TrialRow, CURVE_HEADER, SWEEP_HEADER, TRIAL_HEADER,
};
use crate::{Command, Common, FormArg, Pair};

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Solver(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Solver(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) | CliError::Solver(m) => f.write_str(m),
        }
    }
}

impl From<entdist::Error> for CliError {
    fn from(e: entdist::Error) -> Self {
        match e {
            entdist::Error::SolverFailed(_) => CliError::Solver(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn family_of(ch: &QubitChannel) -> Option<ChannelFamily> {
    ch.name().parse().ok()
}

fn resolve_form(form: FormArg, f1: Option<ChannelFamily>, f2: Option<ChannelFamily>) -> StateForm {
    match (form, f1, f2) {
        (FormArg::Schmidt, _, _) => StateForm::SchmidtS1,
        (FormArg::TwoSided, _, _) => StateForm::TwoSided,
        (FormArg::Auto, Some(a), Some(b)) => default_form(a, b),
        (FormArg::Auto, _, _) => StateForm::TwoSided,
    }
}

fn form_name(form: StateForm) -> &'static str {
    match form {
        StateForm::SchmidtS1 => "schmidt",
        StateForm::TwoSided => "two-sided",
    }
}

/// Single-result commands print JSON to stdout and mirror it to `--out`.
fn report(common: &Common, value: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("json value");
    text.push('\n');
    print!("{text}");
    if let Some(p) = &common.out {
        emit(Some(p), text.as_bytes())?;
    }
    Ok(())
}

/// Table commands write rows to `--out` (summary on stdout) or, without
/// `--out`, rows to stdout and the summary to stderr.
fn table(common: &Common, rows: Vec<u8>, summary: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(summary).expect("json value");
    match &common.out {
        Some(p) => {
            emit(Some(p.as_path()), &rows)?;
            println!("{text}");
        }
        None => {
            emit(None::<&Path>, &rows)?;
            eprintln!("{text}");
        }
    }
    Ok(())
}

fn matrix_json(m: &ComplexMatrix) -> Value {
    let rows: Vec<Value> = (0..m.nrows())
        .map(|i| {
            Value::Array(
                (0..m.ncols())
                    .map(|j| json!([round12(m[(i, j)].re), round12(m[(i, j)].im)]))
                    .collect(),
            )
        })
        .collect();
    Value::Array(rows)
}

fn channels(pair: &Pair) -> Result<(QubitChannel, QubitChannel)> {
    Ok((parse_channel(&pair.left)?, parse_channel(&pair.right)?))
}

pub fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::EbCheck { channel, common } => {
            let ch = parse_channel(&channel)?;
            let (eb, lmin) = is_eb(&choi(&ch))?;
            report(
                &common,
                &json!({ "channel": channel, "eb": eb, "lambda_min": round12(lmin / 2.0) }),
            )
        }
        Command::EaSdp { pair, common } => {
            let (a, b) = channels(&pair)?;
            let res = sdp_bound(&a, &b);
            let mut out = json!({
                "left": pair.left,
                "right": pair.right,
                "bound": round12(res.bound),
                "status": res.status.to_string(),
                "solver_gap": round12(res.solver_gap),
                "iterations": res.iterations,
                "is_ea": res.bound >= -SOLVER_TOL,
            });
            if let Ok((fires, norm)) = certify_gap(&res) {
                out["witness_fires"] = json!(fires);
                out["realigned_trace_norm"] = json!(round12(norm));
            }
            report(&common, &out)?;
            if res.status == SdpStatus::Failed {
                return Err(CliError::Solver(format!(
                    "SDP solver failed (gap {:.3e})",
                    res.solver_gap
                )));
            }
            Ok(())
        }
        Command::OptimalInput {
            pair,
            step,
            form,
            common,
        } => {
            let (a, b) = channels(&pair)?;
            let form = resolve_form(form, family_of(&a), family_of(&b));
            let (best, value) = optimal_input_search(&a, &b, step, form)?;
            report(
                &common,
                &json!({
                    "c": round12(best.c),
                    "s1": round12(best.s1),
                    "s2": round12(best.s2),
                    "min_pt_eig": round12(value),
                    "form": form_name(form),
                }),
            )
        }
        Command::Sweep {
            left,
            right,
            param1,
            param2,
            step,
            form,
            common,
        } => {
            let f1: ChannelFamily = left.parse()?;
            let f2: ChannelFamily = right.parse()?;
            let pair = PairFamily::new(f1, f2)?;
            let form = match form {
                FormArg::Auto => pair.default_form(),
                other => resolve_form(other, None, None),
            };
            let (g1, g2) = (parse_grid(&param1)?, parse_grid(&param2)?);
            let records = sweep(pair, &g1, &g2, step, form)?;
            let rows: Vec<SweepRow> = records.iter().map(SweepRow::from).collect();
            let failed = records
                .iter()
                .filter(|r| r.sdp_status == SdpStatus::Failed)
                .count();
            let (n1, n2) = pair.param_names();
            let summary = json!({
                "param1": n1,
                "param2": n2,
                "form": form_name(form),
                "points": records.len(),
                "ea": records.iter().filter(|r| r.is_ea).count(),
                "tight": records.iter().filter(|r| r.tight).count(),
                "failed": failed,
            });
            table(&common, encode(&rows, &SWEEP_HEADER, common.format)?, &summary)?;
            if failed > 0 {
                return Err(CliError::Solver(format!("SDP solver failed at {failed} points")));
            }
            Ok(())
        }
        Command::Compare { pair, common } => {
            let (a, b) = channels(&pair)?;
            let cmp = strategy_compare(&a, &b)?;
            report(
                &common,
                &json!({
                    "left": pair.left,
                    "right": pair.right,
                    "edge_eb": cmp.edge_eb,
                    "edge_lambda": round12(cmp.edge_lambda),
                    "midway_bound": round12(cmp.midway_bound),
                    "midway_status": cmp.midway_status.to_string(),
                    "midway_ea_consistent": cmp.midway_ea_consistent,
                }),
            )
        }
        Command::Conjecture1 {
            trials,
            seed,
            common,
        } => {
            let results = conjecture1_batch(seed, trials)?;
            let rows: Vec<TrialRow> = results.iter().map(TrialRow::from).collect();
            let summary = json!({
                "trials": results.len(),
                "violations": results.iter().filter(|t| t.violated()).count(),
                "inconclusive": results.iter().filter(|t| t.inconclusive()).count(),
            });
            table(&common, encode(&rows, &TRIAL_HEADER, common.format)?, &summary)
        }
        Command::Conjecture2 { n_step, common } => {
            let points = conjecture2_scan(n_step)?;
            let rows: Vec<CurveRow> = points.iter().map(CurveRow::from).collect();
            let failed = points
                .iter()
                .filter(|p| p.status == SdpStatus::Failed)
                .count();
            let max_abs = |f: fn(&entdist::analysis::Conjecture2Point) -> f64| {
                points.iter().map(|p| f(p).abs()).fold(0.0, f64::max)
            };
            let summary = json!({
                "points": points.len(),
                "max_abs_sdp_bound": round12(max_abs(|p| p.sdp_bound)),
                "max_abs_singlet_lambda": round12(max_abs(|p| p.singlet_lambda)),
                "failed": failed,
            });
            table(&common, encode(&rows, &CURVE_HEADER, common.format)?, &summary)?;
            if failed > 0 {
                return Err(CliError::Solver(format!("SDP solver failed at {failed} points")));
            }
            Ok(())
        }
        Command::TransposeSim { channel, common } => {
            let ch = parse_channel(&channel)?;
            let sim = find_transpose_simulator(&ch)?;
            report(
                &common,
                &json!({
                    "channel": channel,
                    "method": format!("{:?}", sim.method),
                    "residual": round12(sim.residual),
                    "success": sim.is_success(),
                    "a": matrix_json(&sim.a),
                    "b": matrix_json(&sim.b),
                }),
            )
        }
    }
}
