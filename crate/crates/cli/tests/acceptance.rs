//! One pass/fail line per acceptance criterion.
//!
//! Run with `cargo test -p entdist-cli --test acceptance -- --nocapture` to
//! see the verdict lines.

use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use entdist::analysis::{
    ad_pf_det_s1s2_zero, ad_pf_ea_check, conjecture1_batch, conjecture2_scan, depol_ad_threshold,
    depol_pf_boundary, grid, optimal_input_search, sweep, OutputPt, PairFamily, SweepRecord,
    TIGHT_TOL,
};
use entdist::channels::{
    choi, choi_of_composition, find_transpose_simulator, is_eb, make_channel, random_channel,
    random_pauli_channel, random_pure_state, ChannelFamily, CpMap, KrausMap, QubitChannel,
};
use entdist::entanglement::{amplitudes, density, pt_second, PureInputState, StateForm};
use entdist::linalg::{max_abs, max_abs_diff, min_eigenvalue, ComplexMatrix};
use entdist::sdp::{certify_gap, sdp_bound, SOLVER_TOL};
use entdist::channels::apply_product;

fn verdict(id: &str, pass: bool, detail: String) {
    println!("criterion {id}: {} | {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {id} failed: {detail}");
}

fn ch(f: ChannelFamily, p: &[f64]) -> QubitChannel {
    make_channel(f, p).unwrap()
}

/// Two channels with independently drawn Kraus ranks 1..=4.
fn random_pair(rng: &mut ChaCha8Rng) -> (QubitChannel, QubitChannel) {
    let d1 = rng.random_range(1..=4);
    let c1 = random_channel(rng, d1);
    let d2 = rng.random_range(1..=4);
    (c1, random_channel(rng, d2))
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

#[test]
fn criterion_01_depolarizing_eb_boundary() {
    let t0 = Instant::now();
    let f = |p: f64| is_eb(&choi(&ch(ChannelFamily::Depolarizing, &[p]))).unwrap().1 / 2.0;
    let (mut lo, mut hi) = (0.0, 1.0);
    assert!(f(lo) < 0.0 && f(hi) > 0.0);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let root = 0.5 * (lo + hi);
    let err = (root - 2.0 / 3.0).abs();
    let elapsed = t0.elapsed();
    verdict(
        "1",
        err <= 1e-9 && elapsed < Duration::from_secs(1),
        format!("root {root:.15}, |root − 2/3| = {err:.2e}, {:.3} s", secs(elapsed)),
    );
}

#[test]
fn criterion_02_choi_composition_oracle() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let (c1, c2) = random_pair(&mut rng);
        let linked = choi_of_composition(&choi(&c1), &choi(&c2)).unwrap();
        let products: Vec<ComplexMatrix> = c2
            .kraus()
            .iter()
            .flat_map(|l| c1.kraus().iter().map(move |k| l * k))
            .collect();
        let direct = choi(&CpMap::new(products));
        worst = worst.max(max_abs_diff(&linked.matrix, &direct.matrix));
    }
    let elapsed = t0.elapsed();
    verdict(
        "2",
        worst <= 1e-12 && elapsed < Duration::from_secs(10),
        format!("1000 pairs, max entry error {worst:.2e}, {:.2} s", secs(elapsed)),
    );
}

#[test]
fn criterion_03_sdp_soundness() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut violations, mut worst) = (0usize, f64::NEG_INFINITY);
    for _ in 0..500 {
        let (c1, c2) = random_pair(&mut rng);
        let bound = sdp_bound(&c1, &c2).bound;
        for _ in 0..50 {
            let psi = random_pure_state(&mut rng, 4);
            let out = apply_product(&c1, &c2, &density(&psi)).unwrap();
            let lmin = min_eigenvalue(&pt_second(&out)).unwrap();
            worst = worst.max(bound - lmin);
            if bound > lmin + SOLVER_TOL {
                violations += 1;
            }
        }
    }
    let elapsed = t0.elapsed();
    verdict(
        "3",
        violations == 0 && elapsed < Duration::from_secs(1800),
        format!(
            "25000 inputs, {violations} violations, max(bound − λ_min) = {worst:.2e}, {:.1} s",
            secs(elapsed)
        ),
    );
}

#[test]
fn criterion_04_conjecture1_scaled() {
    let t0 = Instant::now();
    let trials = conjecture1_batch(0, 10_000).unwrap();
    let violations = trials.iter().filter(|t| t.violated()).count();
    let inconclusive = trials.iter().filter(|t| t.inconclusive()).count();
    let margin = trials
        .iter()
        .filter(|t| !t.inconclusive())
        .map(|t| t.lhs - t.rhs)
        .fold(f64::INFINITY, f64::min);
    let elapsed = t0.elapsed();
    verdict(
        "4",
        violations == 0 && elapsed < Duration::from_secs(3600),
        format!(
            "10000 trials, {violations} violations, {inconclusive} inconclusive, \
             min(lhs − rhs) = {margin:.3e}, {:.1} s",
            secs(elapsed)
        ),
    );
}

fn sweep_grid(pair: PairFamily, g1: &[f64], g2: &[f64], form: StateForm) -> Vec<SweepRecord> {
    let recs = sweep(pair, g1, g2, 0.01, form).unwrap();
    for r in &recs {
        assert!(
            r.grid_min_pt_eig >= r.sdp_bound - SOLVER_TOL,
            "soundness broken at {:?}",
            r.params
        );
    }
    recs
}

#[test]
fn criterion_05_depol_ad_optimal_form() {
    let t0 = Instant::now();
    let ps: Vec<f64> = (0..=67).map(|n| n as f64 * 0.01).collect();
    let gs: Vec<f64> = (0..=99).map(|n| n as f64 * 0.01).collect();
    let pair = PairFamily::new(ChannelFamily::Depolarizing, ChannelFamily::AmplitudeDamping).unwrap();
    let recs = sweep_grid(pair, &ps, &gs, StateForm::SchmidtS1);
    let non_ea: Vec<&SweepRecord> = recs.iter().filter(|r| !r.is_ea).collect();
    let off_form = non_ea.iter().filter(|r| r.optimal_input.s1 != 0.0).count();
    let loose = recs.iter().filter(|r| !r.tight).count();
    let worst = recs.iter().map(|r| r.gap().abs()).fold(0.0, f64::max);
    let eb_ok = recs
        .iter()
        .filter(|r| r.param("p_s").unwrap() >= 2.0 / 3.0)
        .all(|r| r.is_ea);
    verdict(
        "5",
        recs.len() == 6800 && off_form == 0 && loose == 0 && eb_ok,
        format!(
            "{} points, {} non-EA, {off_form} with s1 ≠ 0, {loose} not tight, \
             max |grid − bound| = {worst:.2e} (tol {TIGHT_TOL:e}), p_s ≥ 2/3 EA: {eb_ok}, {:.1} s",
            recs.len(),
            non_ea.len(),
            secs(t0.elapsed())
        ),
    );
}

#[test]
fn criterion_06_depol_ad_threshold() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let cs = grid(0.0, 0.5, 0.01).unwrap();
    let ss = grid(0.0, 1.0, 0.01).unwrap();
    let (mut above_bad, mut below_missing, mut below_checked) = (0usize, 0usize, 0usize);
    let mut above_checked = 0usize;
    for _ in 0..20 {
        // below p_s = 1/2 the threshold exceeds 1/2 and the upper check is vacuous
        let p: f64 = rng.random_range(0.5..2.0 / 3.0);
        let g: f64 = rng.random_range(0.0..=1.0);
        let t = depol_ad_threshold(p, g).unwrap();
        let eval = OutputPt::new(
            &ch(ChannelFamily::Depolarizing, &[p]),
            &ch(ChannelFamily::AmplitudeDamping, &[g]),
        );
        let det = |c: f64, s1: f64| {
            eval.determinant(&amplitudes(&PureInputState { c, s1, s2: 0.0 }, StateForm::SchmidtS1))
        };
        for &c in cs.iter().filter(|&&c| c >= t + 0.01) {
            above_checked += 1;
            if ss.iter().any(|&s1| det(c, s1) < -1e-10) {
                above_bad += 1;
            }
        }
        if t > 0.01 {
            below_checked += 1;
            let found = cs
                .iter()
                .filter(|&&c| c <= t - 0.01)
                .any(|&c| ss.iter().any(|&s1| det(c, s1) < 0.0));
            if !found {
                below_missing += 1;
            }
        }
    }
    verdict(
        "6",
        above_bad == 0 && below_missing == 0,
        format!(
            "20 points: {above_bad}/{above_checked} grid c ≥ t + 0.01 with det < −1e-10; \
             {below_missing}/{below_checked} points lacking a negative det below t − 0.01"
        ),
    );
}

#[test]
fn criterion_07_depol_pf() {
    let t0 = Instant::now();
    let ps = grid(0.0, 0.99, 0.03).unwrap();
    let rs = grid(0.0, 1.0, 0.01).unwrap();
    let pair = PairFamily::new(ChannelFamily::Depolarizing, ChannelFamily::PhaseFlip).unwrap();
    let recs = sweep_grid(pair, &ps, &rs, StateForm::SchmidtS1);
    let (mut off_c, mut loose, mut misplaced) = (0usize, 0usize, 0usize);
    for r in &recs {
        let (p, x) = (r.param("p_s").unwrap(), r.param("r").unwrap());
        if !r.is_ea && (r.optimal_input.c - 0.5).abs() > 1e-12 {
            off_c += 1;
        }
        if !r.tight {
            loose += 1;
        }
        let (lo, hi) = depol_pf_boundary(p).unwrap();
        let far = (x - lo).abs() > 0.01 + 1e-12 && (x - hi).abs() > 0.01 + 1e-12;
        if far && r.is_ea != (lo < x && x < hi) {
            misplaced += 1;
        }
    }
    verdict(
        "7",
        off_c == 0 && loose == 0 && misplaced == 0,
        format!(
            "{} points: {off_c} non-EA with c ≠ 1/2, {loose} not tight, \
             {misplaced} EA flags off the boundary lines by more than 0.01, {:.1} s",
            recs.len(),
            secs(t0.elapsed())
        ),
    );
}

#[test]
fn criterion_08a_ad_pf_ea_region_and_tightness() {
    let t0 = Instant::now();
    let gs = grid(0.0, 1.0, 0.05).unwrap();
    let rs = grid(0.0, 1.0, 0.05).unwrap();
    let pair = PairFamily::new(ChannelFamily::AmplitudeDamping, ChannelFamily::PhaseFlip).unwrap();
    let recs = sweep_grid(pair, &gs, &rs, StateForm::TwoSided);
    let (mut region_bad, mut det_bad, mut loose_low) = (0usize, 0usize, 0usize);
    for r in &recs {
        let (g, x) = (r.param("gamma").unwrap(), r.param("r").unwrap());
        let ea = ad_pf_ea_check(g, x);
        if r.is_ea != ea {
            region_bad += 1;
        }
        if (ad_pf_det_s1s2_zero(0.3, g, x) < 0.0) == ea {
            det_bad += 1;
        }
        if g < 0.8 && !r.tight {
            loose_low += 1;
        }
    }
    verdict(
        "8a",
        region_bad == 0 && det_bad == 0 && loose_low == 0,
        format!(
            "{} points: {region_bad} EA flags off {{γ=1}}∪{{r=1/2}}, {det_bad} determinant-sign \
             mismatches, {loose_low} non-tight points with γ < 0.8, {:.1} s",
            recs.len(),
            secs(t0.elapsed())
        ),
    );
}

#[test]
fn criterion_08b_ad_pf_gap_with_witness() {
    let t0 = Instant::now();
    let gs = grid(0.81, 0.99, 0.02).unwrap();
    let rs = grid(0.0, 1.0, 0.04).unwrap();
    let pair = PairFamily::new(ChannelFamily::AmplitudeDamping, ChannelFamily::PhaseFlip).unwrap();
    let recs = sweep_grid(pair, &gs, &rs, StateForm::TwoSided);
    let (mut hits, mut best) = (0usize, (0.0f64, 0.0f64, 0.0f64, false, 0.0f64));
    for r in &recs {
        let (g, x) = (r.param("gamma").unwrap(), r.param("r").unwrap());
        let gap = r.gap();
        let res = sdp_bound(&ch(ChannelFamily::AmplitudeDamping, &[g]), &ch(ChannelFamily::PhaseFlip, &[x]));
        let (fires, norm) = certify_gap(&res).unwrap();
        if gap > 1e-3 && fires {
            hits += 1;
        }
        if gap > best.0 {
            best = (gap, g, x, fires, norm);
        }
    }
    let not_tight = recs.iter().filter(|r| !r.tight).count();
    verdict(
        "8b",
        hits > 0,
        format!(
            "{} points with γ ≥ 0.81: {not_tight} not tight, {hits} with gap > 1e-3 and witness; \
             largest gap {:.3e} at γ = {:.2}, r = {:.2} (witness fires: {}, trace norm {:.6}), {:.1} s",
            recs.len(),
            best.0,
            best.1,
            best.2,
            best.3,
            best.4,
            secs(t0.elapsed())
        ),
    );
}

#[test]
fn criterion_09_gad_conjecture2() {
    let t0 = Instant::now();
    let pts = conjecture2_scan(0.001).unwrap();
    let max_bound = pts.iter().map(|p| p.sdp_bound.abs()).fold(0.0, f64::max);
    let max_lambda = pts.iter().map(|p| p.singlet_lambda.abs()).fold(0.0, f64::max);
    let elapsed = t0.elapsed();
    verdict(
        "9",
        pts.len() == 999 && max_bound <= 1e-6 && max_lambda <= 1e-9 && elapsed < Duration::from_secs(3600),
        format!(
            "{} points, max |bound| = {max_bound:.2e}, max |λ_min(singlet)| = {max_lambda:.2e}, {:.1} s",
            pts.len(),
            secs(elapsed)
        ),
    );
}

fn non_eb_pauli(rng: &mut ChaCha8Rng) -> QubitChannel {
    loop {
        let c = random_pauli_channel(rng);
        if !is_eb(&choi(&c)).unwrap().0 {
            return c;
        }
    }
}

#[test]
fn criterion_10_pauli_pairs() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (mut non_ea, mut off) = (0usize, 0usize);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let a = non_eb_pauli(&mut rng);
        let b = non_eb_pauli(&mut rng);
        if sdp_bound(&a, &b).bound >= -SOLVER_TOL {
            continue;
        }
        non_ea += 1;
        let (best, _) = optimal_input_search(&a, &b, 0.01, StateForm::TwoSided).unwrap();
        let dev = (best.c - 0.5).abs();
        worst = worst.max(dev);
        if dev > 0.01 + 1e-12 {
            off += 1;
        }
    }
    verdict(
        "10",
        non_ea > 0 && off == 0,
        format!(
            "100 pairs of non-EB Pauli channels, {non_ea} non-EA, {off} with |c − 1/2| > 0.01 \
             (max {worst:.3}), {:.1} s",
            secs(t0.elapsed())
        ),
    );
}

#[test]
fn criterion_11_transpose_simulator() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut ok, mut mismatched) = (0usize, 0usize);
    for _ in 0..1000 {
        let c = random_channel(&mut rng, 3);
        let sim = find_transpose_simulator(&c).unwrap();
        let direct = c
            .kraus()
            .iter()
            .map(|k| max_abs(&(&sim.a * k * &sim.b - k.transpose())))
            .fold(0.0, f64::max);
        if (direct - sim.residual).abs() > 1e-12 {
            mismatched += 1;
        }
        if direct <= 1e-6 {
            ok += 1;
        }
    }
    verdict(
        "11",
        ok >= 950 && mismatched == 0,
        format!(
            "{ok}/1000 rank-3 channels with residual ≤ 1e-6, {mismatched} reported residuals \
             disagreeing with direct substitution, {:.1} s",
            secs(t0.elapsed())
        ),
    );
}

#[test]
fn criterion_12_determinism_across_workers() {
    let dir = tempfile::tempdir().unwrap();
    let run = |workers: &str| {
        let path = dir.path().join(format!("c1_{workers}.csv"));
        let status = Command::new(env!("CARGO_BIN_EXE_entdist"))
            .args(["conjecture1", "--trials", "100", "--seed", "42", "--workers", workers, "--out"])
            .arg(&path)
            .output()
            .unwrap();
        assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
        std::fs::read(path).unwrap()
    };
    let one = run("1");
    let eight = run("8");
    let header_ok = one.starts_with(b"seed,lhs,rhs,holds\n");
    let rows = one.iter().filter(|&&b| b == b'\n').count() - 1;
    verdict(
        "12",
        one == eight && header_ok && rows == 100,
        format!(
            "{rows} rows, {} bytes, identical for --workers 1 and 8: {}",
            one.len(),
            one == eight
        ),
    );
}
