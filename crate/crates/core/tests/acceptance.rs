//! Acceptance checks, one line per criterion.
//!
//! Run with `cargo test -p dce-core --test acceptance`. The process exits
//! with status 1 if any criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use dce_core::effective::{
    classify_roots, dispersion_polynomial, leff_matrix, polynomial_roots, solve_modes,
};
use dce_core::oracle::{
    build_lattice_with, fit_rate, floquet_matrix_range, propagate, CouplingNorm, LatticeModel,
};
use dce_core::phenom::{phenom_eigs_closed, phenom_eigs_numeric, PhenomParams};
use dce_core::selfenergy::{quadrature_prefactor, sigma, sigma_quadrature};
use dce_core::sweep::{
    detect_bifurcations, multimode_pump_window, sweep_omega0, BifurcationEvent, EventKind,
};
use dce_core::{Complex64, ModelParams, Sheet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const OMEGA_B: f64 = 4.0;

fn fig3() -> ModelParams {
    ModelParams {
        cavity: 3.5,
        band_center: OMEGA_B,
        half_width: 1.0,
        pump_amp: 0.2,
        pump_phase: 0.0,
        pump_freq: 2.0 * OMEGA_B,
        coupling: 1.0 / PI,
    }
}

fn fig5() -> ModelParams {
    ModelParams {
        pump_freq: 2.0 * OMEGA_B - 1.5,
        ..fig3()
    }
}

fn random_params(rng: &mut ChaCha8Rng) -> ModelParams {
    ModelParams {
        cavity: rng.random_range(2.5..5.5),
        band_center: OMEGA_B,
        half_width: 1.0,
        pump_amp: rng.random_range(0.05..0.3),
        pump_phase: rng.random_range(0.0..2.0 * PI),
        pump_freq: rng.random_range(6.5..9.5),
        coupling: rng.random_range(0.05..0.4),
    }
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

struct Fig3Run {
    events: Vec<BifurcationEvent>,
    elapsed: Duration,
}

fn fig3_run() -> Result<Fig3Run, String> {
    let start = Instant::now();
    let p = fig3();
    let table = sweep_omega0(&p, OMEGA_B - 1.5, OMEGA_B, 401).map_err(|e| e.to_string())?;
    let events = detect_bifurcations(&table);
    Ok(Fig3Run {
        events,
        elapsed: start.elapsed(),
    })
}

fn first(events: &[BifurcationEvent], kind: EventKind) -> Option<&BifurcationEvent> {
    events.iter().find(|e| e.kind == kind)
}

fn ac1(run: &Result<Fig3Run, String>) -> Outcome {
    let run = match run {
        Ok(r) => r,
        Err(e) => return outcome(false, format!("sweep failed: {e}")),
    };
    let secs = run.elapsed.as_secs_f64();
    match first(&run.events, EventKind::ResonanceEp) {
        Some(e) => {
            let d = e.omega0_loc - OMEGA_B;
            outcome(
                (-1.0..=-0.8).contains(&d) && secs < 10.0,
                format!(
                    "resonance-EP at omega0-omegaB = {d:.6} (gap {:.1e}), sweep {secs:.2} s",
                    e.defect
                ),
            )
        }
        None => outcome(false, "no resonance-EP detected"),
    }
}

fn ac2(run: &Result<Fig3Run, String>) -> Outcome {
    let Ok(run) = run else {
        return outcome(false, "sweep failed");
    };
    match first(&run.events, EventKind::ParametricEp) {
        Some(e) => {
            let d = e.omega0_loc - OMEGA_B;
            outcome(
                (d + 0.2).abs() <= 0.05,
                format!("parametric-EP at omega0-omegaB = {d:.6} (gap {:.1e})", e.defect),
            )
        }
        None => outcome(false, "no parametric-EP detected"),
    }
}

fn ac3(run: &Result<Fig3Run, String>) -> Outcome {
    let Ok(run) = run else {
        return outcome(false, "sweep failed");
    };
    let stationary: Vec<_> = run.events.iter().filter(|e| e.kind.is_stationary()).collect();
    if stationary.len() != 1 {
        return outcome(false, format!("{} stationary events", stationary.len()));
    }
    let e = stationary[0];
    let d = e.omega0_loc - OMEGA_B;
    let after_ep = first(&run.events, EventKind::ParametricEp).is_some_and(|p| e.omega0_loc > p.omega0_loc);
    outcome(
        e.defect < 1e-10 && d > -0.2 && after_ep,
        format!(
            "one stationary event at omega0-omegaB = {d:.7}, |Im z| = {:.1e}",
            e.defect
        ),
    )
}

fn ac4() -> Outcome {
    let start = Instant::now();
    let p = fig5();
    let table = match sweep_omega0(&p, OMEGA_B - 1.5, OMEGA_B, 401) {
        Ok(t) => t,
        Err(e) => return outcome(false, format!("sweep failed: {e}")),
    };
    let events = detect_bifurcations(&table);
    let secs = start.elapsed().as_secs_f64();
    let edge = p.band_center - p.half_width;
    let hit = events.iter().find(|e| {
        e.kind == EventKind::MultimodeStationary && e.defect < 1e-10 && (e.omega0_loc - edge).abs() <= 0.5
    });
    match hit {
        Some(e) => outcome(
            secs < 15.0,
            format!(
                "multimode-stationary at omega0-(omegaB-B) = {:.6}, |Im z| = {:.1e}, {secs:.2} s",
                e.omega0_loc - edge,
                e.defect
            ),
        ),
        None => outcome(
            false,
            format!("no multimode-stationary event among {} events", events.len()),
        ),
    }
}

fn ac5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    let mut eig_worst: f64 = 0.0;
    for i in 0..20 {
        let p = random_params(&mut rng);
        let base = match solve_modes(&ModelParams { pump_phase: 0.0, ..p }) {
            Ok(m) => m,
            Err(e) => return outcome(false, format!("point {i}: {e}")),
        };
        for theta in [0.0, PI / 4.0, PI / 2.0, PI] {
            let q = ModelParams {
                pump_phase: theta,
                ..p
            };
            let modes = match solve_modes(&q) {
                Ok(m) => m,
                Err(e) => return outcome(false, format!("point {i}, theta {theta}: {e}")),
            };
            for (a, b) in modes.branches.iter().zip(&base.branches) {
                worst = worst.max((a.z - b.z).norm());
                // z must stay an eigenvalue of the phase-dependent matrix
                let m = leff_matrix(a.z, &q, a.sheets).unwrap();
                let tr = m[0][0] + m[1][1];
                let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
                let disc = (tr * tr - 4.0 * det).sqrt();
                let gap = ((tr + disc) / 2.0 - a.z)
                    .norm()
                    .min(((tr - disc) / 2.0 - a.z).norm());
                eig_worst = eig_worst.max(gap);
            }
        }
    }
    outcome(
        worst < 1e-10 && eig_worst < 1e-8,
        format!("max |z(theta) - z(0)| = {worst:.1e}, max eigenvalue defect {eig_worst:.1e}"),
    )
}

fn ac6() -> Outcome {
    let start = Instant::now();
    let base = PhenomParams {
        cavity: 4.0,
        pump_freq: 8.0,
        pump_amp: 0.2,
        pump_phase: 0.0,
        gamma: 0.2,
    };
    let mut agree: f64 = 0.0;
    for i in 0..10 {
        for j in 0..100 {
            let pp = base
                .with_phase(2.0 * PI * i as f64 / 10.0)
                .with_cavity(3.0 + 2.0 * j as f64 / 99.0);
            let a = phenom_eigs_closed(&pp);
            let b = match phenom_eigs_numeric(&pp) {
                Ok(b) => b,
                Err(e) => return outcome(false, format!("numeric eigensolve failed: {e}")),
            };
            for (x, y) in a.iter().zip(&b) {
                agree = agree.max((x.z - y.z).norm());
            }
        }
    }
    let touch = phenom_eigs_closed(&base.with_phase(PI));
    let touch_im = touch.iter().map(|b| b.z.im.abs()).fold(f64::MAX, f64::min);
    let min_im = (0..1001)
        .map(|j| {
            base.with_phase(PI / 2.0)
                .with_cavity(3.0 + 2.0 * j as f64 / 1000.0)
        })
        .flat_map(|pp| phenom_eigs_closed(&pp).map(|b| b.z.im))
        .fold(f64::MAX, f64::min);
    let secs = start.elapsed().as_secs_f64();
    outcome(
        agree < 1e-12 && touch_im < 1e-12 && min_im > 0.0 && secs < 1.0,
        format!(
            "closed vs numeric {agree:.1e}; theta=pi touch |Im z| = {touch_im:.1e}; \
             theta=pi/2 min Im z = {min_im:.6} (needs > 0); {secs:.3} s"
        ),
    )
}

fn ac7() -> Outcome {
    let start = Instant::now();
    let p = ModelParams {
        coupling: 1e-8,
        ..fig3()
    };
    let half = p.pump_freq / 2.0;
    let f0 = p.pump_amp;
    let lo = half - 0.99 * f0;
    let hi = half + 0.99 * f0;
    let table = match sweep_omega0(&p, lo, hi, 101) {
        Ok(t) => t,
        Err(e) => return outcome(false, format!("sweep failed: {e}")),
    };
    let mut worst: f64 = 0.0;
    for (w, row) in table.axis.iter().zip(&table.rows) {
        let Some(row) = row else {
            return outcome(false, format!("gap at omega0 = {w}"));
        };
        let s = (f0 * f0 - (w - half).powi(2)).sqrt();
        for b in row {
            worst = worst.max((b.z.im.abs() - s).abs());
        }
        let top = row.iter().map(|b| b.z.im).fold(f64::MIN, f64::max);
        let bottom = row.iter().map(|b| b.z.im).fold(f64::MAX, f64::min);
        worst = worst.max((top - s).abs()).max((bottom + s).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst < 1e-6 && secs < 2.0,
        format!("max ||Im z| - sqrt(f0^2 - d^2)| = {worst:.1e} over 101 points, {secs:.2} s"),
    )
}

fn ac8() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let b = rng.random_range(0.5..2.0);
        let im = rng.random_range(0.05..2.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let x = c(rng.random_range(-3.0..3.0), im);
        let closed = quadrature_prefactor(b) * sigma(x, b, Sheet::First).unwrap();
        let quad = match sigma_quadrature(x, b) {
            Ok(q) => q,
            Err(e) => return outcome(false, format!("quadrature failed at {x}: {e}")),
        };
        worst = worst.max((quad - closed).norm() / closed.norm());
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst < 1e-8 && secs < 5.0,
        format!("max relative error {worst:.1e} at 100 points, {secs:.2} s"),
    )
}

fn ac9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut forward: f64 = 0.0;
    let mut validated = 0;
    let mut unmatched = 0;
    let mut farthest: f64 = 0.0;
    let mut own_sheet: f64 = 0.0;
    for i in 0..50 {
        let p = random_params(&mut rng);
        let modes = match solve_modes(&p) {
            Ok(m) => m,
            Err(e) => return outcome(false, format!("point {i}: {e}")),
        };
        let poly = dispersion_polynomial(&p).unwrap();
        let scale = poly.max_coeff();
        for b in &modes.branches {
            forward = forward.max(poly.eval(b.z).norm() / scale);
        }
        let roots = polynomial_roots(&poly).unwrap();
        let tagged = classify_roots(&roots, &p).tagged;
        validated += tagged.len();
        for t in &tagged {
            let d = modes
                .branches
                .iter()
                .map(|b| (b.z - t.z).norm())
                .fold(f64::MAX, f64::min);
            if d > 1e-8 {
                unmatched += 1;
                farthest = farthest.max(d);
            }
        }
        for b in &modes.branches {
            let d = tagged
                .iter()
                .filter(|t| t.accepted.iter().any(|(s, _)| *s == b.sheets))
                .map(|t| (t.z - b.z).norm())
                .fold(f64::MAX, f64::min);
            own_sheet = own_sheet.max(d);
        }
    }
    outcome(
        forward < 1e-9 && unmatched == 0,
        format!(
            "max |P(z)|/max|c| = {forward:.1e}; {validated} of 400 roots validate on some sheet pair, \
             {unmatched} farther than 1e-8 from every branch (max {farthest:.1e}); \
             every branch is a root tagged with its own sheets within {own_sheet:.1e}"
        ),
    )
}

fn ac10(run: &Result<Fig3Run, String>) -> Outcome {
    let start = Instant::now();
    let Ok(run) = run else {
        return outcome(false, "sweep failed");
    };
    let Some(stationary) = run.events.iter().find(|e| e.kind == EventKind::Stationary) else {
        return outcome(false, "no stationary event to test");
    };
    let points = [
        ("below resonance EP", OMEGA_B - 0.95),
        ("amplified", OMEGA_B - 0.1),
        ("stationary", stationary.omega0_loc),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, w) in points {
        let p = fig3().with_cavity(w);
        let modes = match solve_modes(&p) {
            Ok(m) => m,
            Err(e) => return outcome(false, format!("{name}: {e}")),
        };
        // the slowest-decaying retarded branch dominates at late times
        let im = modes
            .branches
            .iter()
            .filter(|b| b.label.is_resonance())
            .map(|b| b.z.im)
            .fold(f64::MAX, f64::min);
        let m = build_lattice_with(&p, 400, CouplingNorm::MatchEffective).unwrap();
        let fit = match propagate(&m, &m.unit(0), 200.0, 1e-3).and_then(|t| fit_rate(&t, 0, (0.0, 200.0))) {
            Ok(f) => f,
            Err(e) => return outcome(false, format!("{name}: {e}")),
        };
        let ok = if im.abs() < 0.02 {
            (fit.rate + im).abs() <= 0.005 * p.half_width
        } else {
            (fit.rate + im).abs() <= 0.1 * im.abs()
        };
        pass &= ok;
        parts.push(format!(
            "{name}: rate {:.5} vs -Im z {:.5} {}",
            fit.rate,
            -im,
            if ok { "ok" } else { "MISS" }
        ));
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(pass && secs < 120.0, format!("{}; {secs:.1} s", parts.join("; ")))
}

fn ac11() -> Outcome {
    let cases = [
        (3.7, 8.0, 0.3, 0.9, 0.45, 4.6),
        (2.0, 7.5, 0.2, PI, -0.3, 3.1),
        (4.4, 9.0, 0.05, -2.3, 0.12, 4.95),
    ];
    for (w0, om, f0, theta, gk, wk) in cases {
        let p = ModelParams {
            cavity: w0,
            band_center: OMEGA_B,
            half_width: 1.0,
            pump_amp: f0,
            pump_phase: theta,
            pump_freq: om,
            coupling: 0.3,
        };
        let m = LatticeModel::from_modes(p, vec![gk], vec![wk]).unwrap();
        let got = floquet_matrix_range(&m, 1, 0).unwrap();
        let e = Complex64::from_polar(1.0, theta);
        let up = Complex64::new(0.0, -f0) * e;
        let down = Complex64::new(0.0, f0) * e.conj();
        let r = |x: f64| c(x, 0.0);
        let o = r(0.0);
        #[rustfmt::skip]
        let expected = [
            [r(w0 - om), o, r(gk), o, up, up, o, o],
            [o, r(-w0 - om), o, r(-gk), -up, -up, o, o],
            [r(gk), o, r(wk - om), o, o, o, o, o],
            [o, r(-gk), o, r(-wk - om), o, o, o, o],
            [down, down, o, o, r(w0), o, r(gk), o],
            [-down, -down, o, o, o, r(-w0), o, r(-gk)],
            [o, o, o, o, r(gk), o, r(wk), o],
            [o, o, o, o, o, r(-gk), o, r(-wk)],
        ];
        if (got.nrows(), got.ncols()) != (8, 8) {
            return outcome(false, format!("shape {}x{}", got.nrows(), got.ncols()));
        }
        for i in 0..8 {
            for j in 0..8 {
                if got[(i, j)] != expected[i][j] {
                    return outcome(
                        false,
                        format!("entry ({i}, {j}): {} vs {}", got[(i, j)], expected[i][j]),
                    );
                }
            }
        }
    }
    outcome(true, "3 parameter sets, all 64 entries identical")
}

fn ac12() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut flagged = 0;
    let mut margin = f64::MAX;
    for _ in 0..100 {
        let b = rng.random_range(0.1..2.0);
        let omega_b = rng.random_range(1.0..10.0);
        let omega0 = omega_b + b + rng.random_range(1e-3..5.0);
        let w = multimode_pump_window(omega0, omega_b, b);
        if !w.condition {
            return outcome(
                false,
                format!("flag false at omega0 = {omega0}, omegaB = {omega_b}, B = {b}"),
            );
        }
        flagged += 1;
        margin = margin.min(2.0 * omega0 - 2.0 * b - w.suggested);
    }
    outcome(
        margin > 0.0,
        format!("{flagged} flagged points, min (2 omega0 - 2B) - suggested = {margin:.3e}"),
    )
}

fn main() -> ExitCode {
    let run = fig3_run();
    let checks: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("AC1", Box::new(|| ac1(&run))),
        ("AC2", Box::new(|| ac2(&run))),
        ("AC3", Box::new(|| ac3(&run))),
        ("AC4", Box::new(ac4)),
        ("AC5", Box::new(ac5)),
        ("AC6", Box::new(ac6)),
        ("AC7", Box::new(ac7)),
        ("AC8", Box::new(ac8)),
        ("AC9", Box::new(ac9)),
        ("AC10", Box::new(|| ac10(&run))),
        ("AC11", Box::new(ac11)),
        ("AC12", Box::new(ac12)),
    ];
    let mut failed = Vec::new();
    for (name, check) in &checks {
        let start = Instant::now();
        let o = check();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!(
            "{name:<5} {verdict}  {}  [{:.2} s]",
            o.detail,
            start.elapsed().as_secs_f64()
        );
        if !o.pass {
            failed.push(*name);
        }
    }
    if failed.is_empty() {
        println!("all {} criteria pass", checks.len());
        ExitCode::SUCCESS
    } else {
        println!(
            "{} of {} criteria fail: {}",
            failed.len(),
            checks.len(),
            failed.join(", ")
        );
        ExitCode::FAILURE
    }
}
