//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::time::Instant;

use num_complex::Complex64;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qrw::fixtures;
use qrw::geometry::{alphas, chi_envelope_real, curvature_poly_2d, ks_distance, pair_alphas, solve_z_1d};
use qrw::kernel::{build_kernel, display_scale, taylor_check_all};
use qrw::pipelines::{
    boundary_2d, cloud_on_curve_fraction, eval_rs, feasible_uniform, numeric_boundary_trace, peaks_1d, relative_residual,
    stage_soundness, Frame, TowerConfig,
};
use qrw::simulator::{evolve_from, peak_heights, window_distribution, AmplitudeField, Backend, SimConfig};
use qrw::torus::{torus_fibers, NumericKernel};
use qrw::walkmodel::{cayley_orthogonal, random_skew, validate_spec, WalkSpec};
use qrw::Tolerances;
use qrw_poly::sturm::isolate_in;
use qrw_poly::{resultant, squarefree, sturm_count, vars, QPoly, SqfScope};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> qrw::Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// `Σ c·x^a·y^b` from `(c, a, b)` triples.
fn xy(terms: &[(i64, u32, u32)]) -> QPoly {
    QPoly::from_terms(vars(&["x", "y"]), terms.iter().map(|&(c, a, b)| (vec![a, b], q(c))))
}

fn c1_golden() -> qrw::Result<Outcome> {
    let t0 = Instant::now();
    let b = build_kernel(&fixtures::running_example())?;
    let q_shown = xy(&[
        (-17, 2, 3), (9, 0, 2), (27, 1, 0), (-12, 0, 1), (12, 3, 2), (8, 2, 2), (-15, 3, 1), (-4, 3, 3),
        (-15, 1, 3), (12, 1, 2), (-4, 1, 1), (-17, 2, 1), (9, 4, 2), (-12, 4, 3), (27, 3, 4),
    ]);
    let x = QPoly::var(b.vars.clone(), "x").unwrap();
    let p11_shown = xy(&[(27, 1, 0), (-15, 3, 1), (-4, 1, 1), (12, 3, 2), (-12, 0, 1), (4, 2, 2), (9, 0, 2), (-17, 2, 3)]).mul(&x);
    let ok_q = b.q.scale(&q(27)) == q_shown;
    let ok_p = b.numerator(0, 0).mul(&x).scale(&q(27)) == p11_shown;
    let secs = t0.elapsed().as_secs_f64();
    let ok = display_scale(&b) == 27.into() && ok_q && ok_p && secs < 1.0;
    outcome(ok, format!("27·Q matches: {ok_q}; 27·x·P11 matches: {ok_p} ({secs:.2}s)"))
}

fn c2_series() -> qrw::Result<Outcome> {
    let t0 = Instant::now();
    let mut specs = vec![fixtures::running_example()];
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for k in [2, 3, 3, 4, 4] {
        let coin = cayley_orthogonal(&random_skew(k, 3, &mut rng))?;
        let steps = (0..k as i64).map(|s| vec![s - 1]).collect();
        specs.push(WalkSpec::new(1, steps, coin)?);
    }
    let mut worst = q(0);
    for s in &specs {
        let dev = taylor_check_all(&build_kernel(s)?, 8)?;
        if dev > worst {
            worst = dev;
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    outcome(worst == q(0) && secs < 30.0, format!("max deviation {worst} over 6 specs, all (i,j), n ≤ 8 ({secs:.1}s)"))
}

fn c3_peaks() -> qrw::Result<Outcome> {
    let t0 = Instant::now();
    let rep = peaks_1d(&build_kernel(&fixtures::running_example())?, 512, &Tolerances::default())?;
    let mut dirs = rep.directions();
    dirs.sort_by(f64::total_cmp);
    let err = dirs.iter().zip(fixtures::RUNNING_PEAKS).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let ok = dirs.len() == 6 && rep.circle_roots == 6 && err <= 1e-5;
    outcome(ok, format!("{} peaks, sturm count {}, max error {err:.1e} ({:.1}s)", dirs.len(), rep.circle_roots, t0.elapsed().as_secs_f64()))
}

fn c4_fibers() -> qrw::Result<Outcome> {
    let k = NumericKernel::from_bundle(&build_kernel(&fixtures::running_example())?);
    let rep = torus_fibers(&k, 512, &Tolerances::default())?;
    let kinds: Vec<(usize, i64)> = rep.components.iter().map(|c| (c.degree, c.y_winding)).collect();
    outcome(kinds == [(2, -1), (2, -1)], format!("components (x-degree, y-winding): {kinds:?}"))
}

fn c5_scaling() -> qrw::Result<Outcome> {
    let t0 = Instant::now();
    let hs = peak_heights(&fixtures::running_example(), 0, 0, &[0.7, 1.362766], &[1000, 10000], 0.01, Backend::Float)?;
    let e: Vec<f64> = hs.iter().map(|h| (h[1] / h[0]).log10()).collect();
    let ok = (e[0] + 1.0).abs() <= 0.15 && (e[1] + 2.0 / 3.0).abs() <= 0.15;
    outcome(ok, format!("exponents {:.3} at 0.7 and {:.3} at 1.362766 ({:.0}s)", e[0], e[1], t0.elapsed().as_secs_f64()))
}

fn c6_envelope() -> qrw::Result<Outcome> {
    let tol = Tolerances::default();
    let spec = fixtures::running_example();
    let k = NumericKernel::from_bundle(&build_kernel(&spec)?);
    let set = solve_z_1d(&k, &torus_fibers(&k, 512, &tol)?, 0.3, &tol)?;
    let vals = window_distribution(&spec, 0, 0, &[0.3], 4000, 64, Backend::Float)?;
    let chi = chi_envelope_real(&pair_alphas(&set, &alphas(&k, 0, 0, &set)), 20000, 0);
    let d = ks_distance(&vals, &chi);
    outcome(d <= 0.15, format!("KS distance {d:.4} at r/n = 0.3 (M = 64, n = 4000, {} critical points)", set.points.len()))
}

/// Least-squares slope and R² of `ys` against `xs`.
fn fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    (sxy / sxx, sxy * sxy / (sxx * syy))
}

fn c7_decay() -> qrw::Result<Outcome> {
    let spec = fixtures::running_example();
    let k = NumericKernel::from_bundle(&build_kernel(&spec)?);
    let edge = torus_fibers(&k, 512, &Tolerances::default())?
        .components
        .iter()
        .map(|c| c.mu_range.1)
        .fold(f64::NEG_INFINITY, f64::max);
    let outside = spec.step_range(0).1 as f64;
    let theta = 0.95 * edge + 0.05 * outside;
    let (mut ns, mut site, mut single) = (Vec::new(), Vec::new(), Vec::new());
    let start = AmplitudeField::elementary(&spec, 0, Backend::Float)?;
    evolve_from(start, &spec, 1000, &SimConfig::default(), |f| {
        if f.n >= 200 && f.n % 10 == 0 {
            let r = [(theta * f.n as f64).round() as i64];
            let norm: f64 = (0..spec.k).map(|j| f.amplitude(&r, j).norm_sqr()).sum();
            ns.push(f.n as f64);
            site.push(0.5 * norm.ln());
            single.push(f.amplitude(&r, 0).norm().ln());
        }
    })?;
    let (slope, r2) = fit(&ns, &site);
    let (slope11, _) = fit(&ns, &single);
    let ok = slope < 0.0 && slope11 < 0.0 && r2 >= 0.8;
    outcome(
        ok,
        format!("r/n = {theta:.4}: slope of log|ψ(r)| {slope:.2e} (R² {r2:.2}), of log|a11| {slope11:.2e}, n = 200..1000"),
    )
}

fn c8_trace() -> qrw::Result<Outcome> {
    let t0 = Instant::now();
    let tol = Tolerances::default();
    let frame = Frame::square();
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, spec, p) in [("U1", fixtures::u1(), fixtures::p1()), ("U2", fixtures::u2(), fixtures::p2())] {
        let k = NumericKernel::from_spec(&spec);
        let cloud: Vec<[f64; 2]> = numeric_boundary_trace(&k, 256, &tol)?.into_iter().map(|q| frame.apply(q)).collect();
        let refs = feasible_uniform(&k, &frame, 20000, 128, 0, &tol);
        let (frac, _) = cloud_on_curve_fraction(&p, &cloud, &refs, 1e-3);
        let l1 = cloud.iter().map(|q| q[0].abs() + q[1].abs()).fold(0.0, f64::max);
        let linf = cloud.iter().map(|q| q[0].abs().max(q[1].abs())).fold(0.0, f64::max);
        let bound_ok = if name == "U1" { linf <= 2.0 / 3.0 + 0.01 } else { l1 <= 0.75 + 0.01 };
        ok &= frac >= 0.95 && bound_ok && !cloud.is_empty();
        parts.push(format!("{name}: {} points, on-curve {frac:.3}, max |r|+|s| {l1:.4}, max(|r|,|s|) {linf:.4}", cloud.len()));
    }
    outcome(ok, format!("{} ({:.1}s)", parts.join("; "), t0.elapsed().as_secs_f64()))
}

/// Points of the real zero set of `p(r, s)` found by bisection along
/// horizontal lines.
fn zero_set_samples(p: &QPoly, count: usize) -> Vec<[f64; 2]> {
    let mut pts = Vec::new();
    let lines = 100;
    for a in 0..lines {
        let s = -0.74 + 1.48 * (a as f64 + 0.5) / lines as f64;
        let grid = 400;
        let r_at = |i: usize| -1.0 + 2.0 * i as f64 / grid as f64;
        for i in 0..grid {
            let (mut lo, mut hi) = (r_at(i), r_at(i + 1));
            let (flo, fhi) = (eval_rs(p, [lo, s]), eval_rs(p, [hi, s]));
            if flo == 0.0 || flo.signum() == fhi.signum() {
                continue;
            }
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if eval_rs(p, [mid, s]).signum() == flo.signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            pts.push([0.5 * (lo + hi), s]);
        }
    }
    let step = (pts.len() / count).max(1);
    pts.into_iter().step_by(step).take(count).collect()
}

fn c9_tower() -> qrw::Result<Outcome> {
    let t0 = Instant::now();
    let b = build_kernel(&fixtures::u2())?;
    let cfg = TowerConfig {
        symmetric: true,
        ..TowerConfig::default()
    };
    let curve = boundary_2d(&b, &Frame::square(), &cfg)?;
    if let Some(f) = &curve.candidate {
        let pts = zero_set_samples(&fixtures::p2(), 200);
        let worst = pts
            .iter()
            .map(|p| relative_residual(f, &[Complex64::new(p[0], 0.0), Complex64::new(p[1], 0.0)]))
            .fold(0.0, f64::max);
        return outcome(
            pts.len() == 200 && worst <= 1e-6,
            format!("full tower; candidate residual {worst:.1e} on {} points of P2 ({:.0}s)", pts.len(), t0.elapsed().as_secs_f64()),
        );
    }
    let c2 = curvature_poly_2d(&b)?;
    let mut worst = 0.0f64;
    let mut have = 0;
    for (name, f, g) in [("R12", &c2.q, &c2.l), ("R13", &c2.q, &c2.h1), ("R14", &c2.q, &c2.h2)] {
        if let Some(out) = curve.polys.get(name) {
            worst = worst.max(stage_soundness(f, g, "x", out, 20, 7)?);
            have += 1;
        }
    }
    let reason = curve.exhausted.clone().unwrap_or_default();
    outcome(
        have == 3 && worst <= 1e-6,
        format!(
            "DOWNGRADED: tower stopped ({reason}); R12, R13, R14 pass stage soundness, worst residual {worst:.1e} ({:.0}s)",
            t0.elapsed().as_secs_f64()
        ),
    )
}

fn c10_algebra() -> qrw::Result<Outcome> {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let v = vars(&["x", "y"]);
    let rand_xy = |rng: &mut ChaCha8Rng, deg: u32| {
        QPoly::from_terms(
            v.clone(),
            (0..=deg).flat_map(|a| (0..=deg - a).map(move |b| (a, b))).map(|(a, b)| (vec![a, b], q(rng.gen_range(-4..=4)))).collect::<Vec<_>>(),
        )
    };
    let x = QPoly::var(v.clone(), "x").unwrap();
    let y = QPoly::var(v.clone(), "y").unwrap();
    let mut fails = [0usize; 4];
    let cases = 1000;
    for _ in 0..cases {
        // Common root at (a, b) forces the resultant to vanish at y = b.
        let (a, b) = (rng.gen_range(-3..=3), rng.gen_range(-3..=3));
        let lx = x.sub(&QPoly::constant(v.clone(), q(a)));
        let ly = y.sub(&QPoly::constant(v.clone(), q(b)));
        let f = lx.mul(&rand_xy(&mut rng, 2)).add(&ly.mul(&rand_xy(&mut rng, 2)));
        let g = lx.mul(&rand_xy(&mut rng, 2)).add(&ly.mul(&rand_xy(&mut rng, 2)));
        if f.degree_in(0) > 0 && g.degree_in(0) > 0 {
            match resultant(&f, &g, "x") {
                Ok(r) if r.eval_var(1, &q(b)).is_zero() => {}
                _ => fails[0] += 1,
            }
        }

        let p = rand_xy(&mut rng, 2);
        let s = squarefree(&p.mul(&p).mul(&rand_xy(&mut rng, 1)), SqfScope::All);
        if !squarefree(&s, SqfScope::All).is_scalar_multiple_of(&s) {
            fails[1] += 1;
        }

        let deg = rng.gen_range(1..=7);
        let mut u = QPoly::from_terms(vars(&["x"]), (0..=deg).map(|e| (vec![e], q(rng.gen_range(-6..=6)))).collect::<Vec<_>>());
        u = u.add(&QPoly::monomial(vars(&["x"]), &[deg + 1], q(1)));
        let (lo, hi) = (q(-64), q(64));
        let agree = match (sturm_count(&u, &lo, &hi), isolate_in(&u, &lo, &hi)) {
            (Ok(n), Ok(boxes)) => n == boxes.len() && boxes.iter().all(|bx| sturm_count(&u, &bx.lo, &bx.hi).ok() == Some(1)),
            _ => false,
        };
        if !agree {
            fails[2] += 1;
        }

        let kk = rng.gen_range(2..=6);
        let coin = cayley_orthogonal(&random_skew(kk, 5, &mut rng))?;
        let spec = WalkSpec::new(1, (0..kk as i64).map(|s| vec![s]).collect(), coin)?;
        let rep = validate_spec(&spec, 0.0);
        if !(rep.unitary && rep.max_deviation == 0.0) {
            fails[3] += 1;
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    outcome(
        fails == [0; 4] && secs < 300.0,
        format!("{cases} cases each; failures: common-root {}, squarefree {}, Sturm/isolation {}, Cayley {} ({secs:.1}s)", fails[0], fails[1], fails[2], fails[3]),
    )
}

fn main() {
    let criteria: [(&str, fn() -> qrw::Result<Outcome>); 10] = [
        ("kernel golden", c1_golden),
        ("series consistency", c2_series),
        ("peak reproduction", c3_peaks),
        ("topology probe", c4_fibers),
        ("peak scaling", c5_scaling),
        ("envelope law", c6_envelope),
        ("shape decay", c7_decay),
        ("2-D trace vs published curves", c8_trace),
        ("2-D tower", c9_tower),
        ("algebra properties", c10_algebra),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let (pass, detail) = match run() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!("criterion {:>2} {}: {name}: {detail}", i + 1, if pass { "PASS" } else { "FAIL" });
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
