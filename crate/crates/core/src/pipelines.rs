//! End-to-end elimination pipelines: peak directions in one dimension and
//! the boundary curve of the feasible region in two.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::f64::consts::PI;
use std::time::Instant;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::One;
use qrw_poly::exchange::{self, PolyJson};
use qrw_poly::gcd::content_in;
use qrw_poly::resultant::resultant_with;
use qrw_poly::sturm::{isolate_in, refine};
use qrw_poly::{gcd, ratio_to_f64, squarefree, sturm_count, unit_circle_transform, vars, PolyError, QPoly, ResultantLimits, SqfScope};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{QrwError, Result};
use crate::geometry::{curvature_poly_1d, curvature_poly_2d, gauss_map, phase_hessian, solve_z_2d};
use crate::kernel::KernelBundle;
use crate::tolerances::Tolerances;
use crate::torus::{grid_angles, smoothness_probe, to_point, wrap, NumericKernel};

// ------------------------------------------------------------ 1-D peaks

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Peak {
    /// Direction `r/n` of the peak.
    pub mu: f64,
    /// Root `x + 1/x` of `q` it came from.
    pub z: f64,
    pub x_angle: f64,
    pub y_angle: f64,
    /// `|Q|` and `|K|` relative to their coefficient sizes.
    pub q_residual: f64,
    pub k_residual: f64,
}

#[derive(Clone, Debug)]
pub struct PeakReport {
    pub spec_id: String,
    /// Squarefree part of `result(Q, K, y)`.
    pub p: QPoly,
    /// Unit-circle transform of `p`.
    pub q: QPoly,
    /// Real roots of `q` in `[−2, 2]`.
    pub circle_roots: usize,
    /// Sorted by direction.
    pub peaks: Vec<Peak>,
}

#[derive(Serialize, Deserialize)]
struct PeakJson {
    spec_id: String,
    p: PolyJson,
    q: PolyJson,
    circle_roots: usize,
    peaks: Vec<Peak>,
}

impl PeakReport {
    pub fn directions(&self) -> Vec<f64> {
        self.peaks.iter().map(|p| p.mu).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&PeakJson {
            spec_id: self.spec_id.clone(),
            p: PolyJson::from(&self.p),
            q: PolyJson::from(&self.q),
            circle_roots: self.circle_roots,
            peaks: self.peaks.clone(),
        })
        .expect("serialisable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: PeakJson = serde_json::from_str(s)?;
        Ok(Self {
            spec_id: j.spec_id,
            p: QPoly::try_from(&j.p)?,
            q: QPoly::try_from(&j.q)?,
            circle_roots: j.circle_roots,
            peaks: j.peaks,
        })
    }
}

/// `|p(z)|` divided by `Σ |c_m z^m|`.
pub fn relative_residual<C: qrw_poly::Coeff>(p: &qrw_poly::MultiPoly<C>, z: &[Complex64]) -> f64 {
    let mut val = Complex64::new(0.0, 0.0);
    let mut scale = 0.0;
    for (e, c) in p.iter_exps() {
        let mut t = c.to_complex();
        for (a, &k) in e.iter().enumerate() {
            if k > 0 {
                t *= z[a].powu(k);
            }
        }
        val += t;
        scale += t.norm();
    }
    if scale == 0.0 {
        0.0
    } else {
        val.norm() / scale
    }
}

/// Directions where the curvature of the 1-D log-variety vanishes:
/// `p = Rad(result(Q, K, y))`, `q(z)` its unit-circle transform, the real
/// roots of `q` in `[−2, 2]` by Sturm sequences, then for each root the
/// unit-modulus `y` with `K = 0` and the value of `μ` there.
pub fn peaks_1d(bundle: &KernelBundle, probe_grid: usize, tol: &Tolerances) -> Result<PeakReport> {
    if bundle.d() != 1 {
        return Err(QrwError::Dimension {
            expected: "1",
            got: bundle.d(),
        });
    }
    let kernel = NumericKernel::from_bundle(bundle);
    let probe = smoothness_probe(&kernel, Some(bundle), probe_grid, tol)?;
    if !probe.smooth() {
        return Err(QrwError::SmoothnessFailed(format!(
            "{} singular point(s) on the torus, squarefree = {:?}, min |grad Q| = {:e}",
            probe.singular.len(),
            probe.squarefree,
            probe.refined_min_gradient
        )));
    }
    let k = curvature_poly_1d(bundle)?;
    let r = resultant_with(&bundle.q, &k, "y", &ResultantLimits::UNLIMITED)?;
    let p = squarefree(&r, SqfScope::All);
    let q = unit_circle_transform(&p)?;
    let two = BigRational::from_integer(2.into());
    let lo = -two.clone();
    let circle_roots = sturm_count(&q, &lo, &two)?;
    // Isolate on a slightly larger interval so that roots at ±2 are seen.
    let eps = BigRational::new(1.into(), BigInt::from(1u64 << 40));
    let boxes = isolate_in(&q, &(&lo - &eps), &(&two + &eps))?;
    let width = BigRational::new(1.into(), BigInt::one() << 120usize);
    let kc = k.map_coeffs(|c| Complex64::new(ratio_to_f64(c), 0.0));
    let mut peaks = Vec::new();
    for b in boxes {
        let b = refine(&q, &b, &width)?;
        let z0 = b.approx();
        if z0.abs() > 2.0 + 1e-12 {
            continue;
        }
        let theta = (z0 / 2.0).clamp(-1.0, 1.0).acos();
        let fiber = kernel.torus_fiber(&[theta], tol.unit_modulus.max(1e-6));
        for phi in fiber {
            let pt = to_point(&[theta, phi]);
            let kr = relative_residual(&kc, &pt);
            if kr > 1e-8 {
                continue;
            }
            let mu = gauss_map(&kernel, &pt, tol)?[0];
            peaks.push(Peak {
                mu,
                z: z0,
                x_angle: theta,
                y_angle: phi,
                q_residual: relative_residual(&kernel.q, &pt),
                k_residual: kr,
            });
        }
    }
    peaks.sort_by(|a, b| a.mu.total_cmp(&b.mu));
    Ok(PeakReport {
        spec_id: bundle.spec.id(),
        p,
        q,
        circle_roots,
        peaks,
    })
}

// --------------------------------------------------------- 2-D frames

/// Affine change of direction coordinates `display = A·native + b`.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame {
    pub a: [[BigRational; 2]; 2],
    pub b: [BigRational; 2],
}

fn qi(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

impl Frame {
    pub fn identity() -> Self {
        Self {
            a: [[qi(1), qi(0)], [qi(0), qi(1)]],
            b: [qi(0), qi(0)],
        }
    }

    /// `r = u + v − 1`, `s = u − v`: the frame in which the published
    /// boundary polynomials of the square-step walks are written.
    pub fn square() -> Self {
        Self {
            a: [[qi(1), qi(1)], [qi(1), qi(-1)]],
            b: [qi(-1), qi(0)],
        }
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "native" => Ok(Self::identity()),
            "square" => Ok(Self::square()),
            _ => Err(QrwError::Config(format!("unknown frame {name:?}"))),
        }
    }

    pub fn apply(&self, u: [f64; 2]) -> [f64; 2] {
        let f = |r: &BigRational| ratio_to_f64(r);
        [
            f(&self.a[0][0]) * u[0] + f(&self.a[0][1]) * u[1] + f(&self.b[0]),
            f(&self.a[1][0]) * u[0] + f(&self.a[1][1]) * u[1] + f(&self.b[1]),
        ]
    }

    fn inverse_parts(&self) -> ([[BigRational; 2]; 2], [BigRational; 2]) {
        let a = &self.a;
        let det = &a[0][0] * &a[1][1] - &a[0][1] * &a[1][0];
        let inv = [
            [&a[1][1] / &det, -&a[0][1] / &det],
            [-&a[1][0] / &det, &a[0][0] / &det],
        ];
        let c = [
            -(&inv[0][0] * &self.b[0] + &inv[0][1] * &self.b[1]),
            -(&inv[1][0] * &self.b[0] + &inv[1][1] * &self.b[1]),
        ];
        (inv, c)
    }

    pub fn invert(&self, d: [f64; 2]) -> [f64; 2] {
        let (inv, c) = self.inverse_parts();
        let f = |r: &BigRational| ratio_to_f64(r);
        [
            f(&inv[0][0]) * d[0] + f(&inv[0][1]) * d[1] + f(&c[0]),
            f(&inv[1][0]) * d[0] + f(&inv[1][1]) * d[1] + f(&c[1]),
        ]
    }

    /// Rewrites `f(u, v)` (native, over variables `r, s`) as a polynomial
    /// in the display coordinates.
    pub fn to_display(&self, f: &QPoly) -> QPoly {
        let (inv, c) = self.inverse_parts();
        let v = f.vars().clone();
        let r = f.var_index("r").expect("variable r");
        let s = f.var_index("s").expect("variable s");
        let rv = QPoly::var(v.clone(), "r").expect("r");
        let sv = QPoly::var(v.clone(), "s").expect("s");
        let lin = |row: usize| {
            rv.scale(&inv[row][0])
                .add(&sv.scale(&inv[row][1]))
                .add(&QPoly::constant(v.clone(), c[row].clone()))
        };
        let subs: Vec<QPoly> = (0..f.nvars())
            .map(|i| {
                if i == r {
                    lin(0)
                } else if i == s {
                    lin(1)
                } else {
                    QPoly::var(v.clone(), &v[i]).expect("own variable")
                }
            })
            .collect();
        f.compose(&subs)
    }
}

// -------------------------------------------------------- 2-D tower

#[derive(Clone, Debug)]
pub struct TowerConfig {
    pub limits: ResultantLimits,
    /// Where finished stages are written; `QRW_STAGE_DIR` overrides it.
    pub stage_dir: Option<PathBuf>,
    /// Reuse stages already on disk.
    pub resume: bool,
    /// Stop after the first three resultants.
    pub first_level_only: bool,
    /// Keep only the factor invariant under `r ↦ −r`, `s ↦ −s`, `r ↔ s`
    /// (walks with the symmetries of the square).
    pub symmetric: bool,
}

impl Default for TowerConfig {
    fn default() -> Self {
        Self {
            limits: ResultantLimits::default(),
            stage_dir: None,
            resume: false,
            first_level_only: false,
            symmetric: false,
        }
    }
}

impl TowerConfig {
    fn dir(&self) -> Option<PathBuf> {
        std::env::var_os("QRW_STAGE_DIR")
            .map(PathBuf::from)
            .or_else(|| self.stage_dir.clone())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StageSummary {
    pub name: String,
    pub terms: usize,
    pub degrees: BTreeMap<String, u32>,
    pub seconds: f64,
    pub resumed: bool,
}

#[derive(Clone, Debug)]
pub struct BoundaryCurve {
    pub spec_id: String,
    pub stages: Vec<StageSummary>,
    /// Stage polynomials over `(x, y, z, r, s)`.
    pub polys: BTreeMap<String, QPoly>,
    /// Set when a stage hit the resource caps; later stages are missing.
    pub exhausted: Option<String>,
    /// Factors of the last stage in a single variable, discarded.
    pub discarded: Vec<QPoly>,
    /// Surviving candidate, over `(r, s)` in the display frame.
    pub candidate: Option<QPoly>,
}

impl BoundaryCurve {
    pub fn completed(&self) -> bool {
        self.candidate.is_some()
    }
}

#[derive(Serialize, Deserialize)]
struct StageFile {
    name: String,
    spec_id: String,
    seconds: f64,
    poly: PolyJson,
}

/// Serialised summary of a [`BoundaryCurve`]; stage polynomials live in
/// the stage directory.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CurveJson {
    pub spec_id: String,
    pub stages: Vec<StageSummary>,
    pub exhausted: Option<String>,
    pub discarded: Vec<PolyJson>,
    pub candidate: Option<PolyJson>,
}

impl BoundaryCurve {
    pub fn summary(&self) -> CurveJson {
        CurveJson {
            spec_id: self.spec_id.clone(),
            stages: self.stages.clone(),
            exhausted: self.exhausted.clone(),
            discarded: self.discarded.iter().map(PolyJson::from).collect(),
            candidate: self.candidate.as_ref().map(PolyJson::from),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.summary()).expect("serialisable")
    }
}

fn stage_path(dir: &Path, spec_id: &str, name: &str) -> PathBuf {
    dir.join(format!("{spec_id}-{name}.json"))
}

fn summarize(name: &str, p: &QPoly, seconds: f64, resumed: bool) -> StageSummary {
    StageSummary {
        name: name.to_string(),
        terms: p.len(),
        degrees: p
            .vars()
            .iter()
            .enumerate()
            .filter(|(i, _)| p.involves(*i))
            .map(|(i, v)| (v.clone(), p.degree_in(i)))
            .collect(),
        seconds,
        resumed,
    }
}

struct Tower<'a> {
    cfg: &'a TowerConfig,
    spec_id: String,
}

impl Tower<'_> {
    fn load(&self, name: &str) -> Result<Option<(QPoly, f64)>> {
        let Some(dir) = self.cfg.dir() else { return Ok(None) };
        if !self.cfg.resume {
            return Ok(None);
        }
        let path = stage_path(&dir, &self.spec_id, name);
        if !path.exists() {
            return Ok(None);
        }
        let f: StageFile = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        if f.spec_id != self.spec_id {
            return Err(QrwError::SpecMismatch(f.spec_id, self.spec_id.clone()));
        }
        Ok(Some((QPoly::try_from(&f.poly)?, f.seconds)))
    }

    fn save(&self, name: &str, p: &QPoly, seconds: f64) -> Result<()> {
        let Some(dir) = self.cfg.dir() else { return Ok(()) };
        std::fs::create_dir_all(&dir)?;
        let f = StageFile {
            name: name.to_string(),
            spec_id: self.spec_id.clone(),
            seconds,
            poly: PolyJson::from(p),
        };
        std::fs::write(stage_path(&dir, &self.spec_id, name), serde_json::to_string(&f)?)?;
        Ok(())
    }

    /// `Rad(result(f, g, var))`, from disk when resuming.
    fn stage(&self, name: &str, f: &QPoly, g: &QPoly, var: &str) -> Result<(QPoly, StageSummary)> {
        if let Some((p, secs)) = self.load(name)? {
            let s = summarize(name, &p, secs, true);
            return Ok((p, s));
        }
        let t0 = Instant::now();
        // A shared factor involving `var` makes the resultant vanish
        // identically; it carries no information about the direction.
        let common = gcd(f, g);
        let (f, g) = if common.involves(f.var_index(var)?) {
            let (cf, cg) = (f.primitive_integer(), g.primitive_integer());
            let cz = common.primitive_integer();
            (
                cf.div_exact(&cz).expect("gcd divides").to_rational(),
                cg.div_exact(&cz).expect("gcd divides").to_rational(),
            )
        } else {
            (f.clone(), g.clone())
        };
        let r = resultant_with(&f, &g, var, &self.cfg.limits)?;
        let p = squarefree(&r, SqfScope::All);
        let secs = t0.elapsed().as_secs_f64();
        self.save(name, &p, secs)?;
        Ok((p.clone(), summarize(name, &p, secs, false)))
    }
}

/// Removes the content of `p` with respect to `var`: factors free of `var`.
fn drop_content(p: &QPoly, var: usize) -> (QPoly, QPoly) {
    let z = p.primitive_integer();
    let c = content_in(&z, var);
    if c.is_constant() {
        return (p.clone(), QPoly::one(p.vars().clone()));
    }
    let rest = z.div_exact(&c).expect("content divides");
    (rest.to_rational(), c.to_rational())
}

/// Part of `p` left after removing factors free of `var` and factors in
/// `var` alone; the removed pieces are returned alongside.
pub fn large_factor(p: &QPoly, var: usize) -> (QPoly, Vec<QPoly>) {
    let mut dropped = Vec::new();
    let (mut f, c) = drop_content(p, var);
    if !c.is_constant() {
        dropped.push(c);
    }
    // Factors in `var` alone divide the content with respect to every
    // other variable.
    let mut only = f.primitive_integer();
    for w in 0..f.nvars() {
        if w != var && only.involves(w) {
            only = content_in(&only, w);
        }
    }
    if only.involves(var) {
        let rest = f.primitive_integer().div_exact(&only).expect("content divides");
        dropped.push(only.to_rational());
        f = rest.to_rational();
    }
    (f, dropped)
}

/// The iterated-resultant tower
/// `R₁₂ = Rad res(Q, L, x)`, `R₁₃ = Rad res(Q, H₁, x)`, `R₁₄ = Rad res(Q, H₂, x)`,
/// `R₁₂₄ = Rad res(R₁₂, R₁₄, y)`, `R₁₃₄ = Rad res(R₁₃, R₁₄, y)`,
/// `R₁₂₃₄ = Rad res(f₁₂₄, f₁₃₄, z)` with `f` the parts involving `z`,
/// followed by removal of one-variable factors and the symmetry filter in
/// the display frame.
pub fn boundary_2d(bundle: &KernelBundle, frame: &Frame, cfg: &TowerConfig) -> Result<BoundaryCurve> {
    let c2 = curvature_poly_2d(bundle)?;
    let tower = Tower {
        cfg,
        spec_id: bundle.spec.id(),
    };
    let mut curve = BoundaryCurve {
        spec_id: tower.spec_id.clone(),
        stages: Vec::new(),
        polys: BTreeMap::new(),
        exhausted: None,
        discarded: Vec::new(),
        candidate: None,
    };
    let (a, (b, c)) = rayon::join(
        || tower.stage("R12", &c2.q, &c2.l, "x"),
        || {
            rayon::join(
                || tower.stage("R13", &c2.q, &c2.h1, "x"),
                || tower.stage("R14", &c2.q, &c2.h2, "x"),
            )
        },
    );
    let record = |curve: &mut BoundaryCurve, name: &str, r: Result<(QPoly, StageSummary)>| -> Result<Option<QPoly>> {
        match r {
            Ok((p, s)) => {
                curve.stages.push(s);
                curve.polys.insert(name.to_string(), p.clone());
                Ok(Some(p))
            }
            Err(QrwError::Poly(PolyError::ResourceExhausted(m))) => {
                curve.exhausted.get_or_insert(format!("{name}: {m}"));
                Ok(None)
            }
            Err(e) => Err(e),
        }
    };
    let r12 = record(&mut curve, "R12", a)?;
    let r13 = record(&mut curve, "R13", b)?;
    let r14 = record(&mut curve, "R14", c)?;
    let (Some(r12), Some(r13), Some(r14)) = (r12, r13, r14) else {
        return Ok(curve);
    };
    if cfg.first_level_only {
        return Ok(curve);
    }
    let (a, b) = rayon::join(
        || tower.stage("R124", &r12, &r14, "y"),
        || tower.stage("R134", &r13, &r14, "y"),
    );
    let r124 = record(&mut curve, "R124", a)?;
    let r134 = record(&mut curve, "R134", b)?;
    let (Some(r124), Some(r134)) = (r124, r134) else {
        return Ok(curve);
    };
    let zi = r124.var_index("z")?;
    let (f124, d124) = large_factor(&r124, zi);
    let (f134, d134) = large_factor(&r134, zi);
    curve.discarded.extend(d124.into_iter().chain(d134));
    let r1234 = record(&mut curve, "R1234", tower.stage("R1234", &f124, &f134, "z"))?;
    let Some(r1234) = r1234 else {
        return Ok(curve);
    };
    let ri = r1234.var_index("r")?;
    let si = r1234.var_index("s")?;
    let (main, cr) = drop_content(&r1234, ri);
    let (main, cs) = drop_content(&main, si);
    for c in [cr, cs] {
        if !c.is_constant() {
            curve.discarded.push(c);
        }
    }
    let rs = vars(&["r", "s"]);
    let main = main.embed(rs)?;
    let shown = frame.to_display(&main);
    curve.candidate = Some(if cfg.symmetric {
        symmetry_filter(&shown)
    } else {
        qrw_poly::gcd::normalize(&shown)
    });
    Ok(curve)
}

/// Largest factor of `f(r, s)` whose zero set is invariant under
/// `r ↦ −r`, `s ↦ −s` and `r ↔ s`.
pub fn symmetry_filter(f: &QPoly) -> QPoly {
    let v = f.vars().clone();
    let r = QPoly::var(v.clone(), "r").expect("r");
    let s = QPoly::var(v, "s").expect("s");
    let mut g = f.clone();
    // Iterate: the gcd with one image may break invariance under another.
    loop {
        let mut next = g.clone();
        for img in [
            g.compose(&[s.clone(), r.clone()]),
            g.compose(&[r.neg(), s.clone()]),
            g.compose(&[r.clone(), s.neg()]),
        ] {
            next = gcd(&next, &img);
        }
        if next.is_scalar_multiple_of(&g) {
            break;
        }
        g = next;
    }
    qrw_poly::gcd::normalize(&g)
}

/// Residual-based soundness probe for one resultant stage: numeric common
/// zeros of `f` and `g` must be zeros of `out`. Returns the worst relative
/// residual over `count` witnesses.
pub fn stage_soundness(f: &QPoly, g: &QPoly, var: &str, out: &QPoly, count: usize, seed: u64) -> Result<f64> {
    let vi = f.var_index(var)?;
    let fc = f.map_coeffs(|c| Complex64::new(ratio_to_f64(c), 0.0));
    let gc = g.map_coeffs(|c| Complex64::new(ratio_to_f64(c), 0.0));
    let oc = out.map_coeffs(|c| Complex64::new(ratio_to_f64(c), 0.0));
    // Second unknown: a variable both inputs involve, else any of g's.
    let partner = (0..f.nvars())
        .filter(|&w| w != vi)
        .find(|&w| f.involves(w) && g.involves(w))
        .or_else(|| (0..f.nvars()).find(|&w| w != vi && g.involves(w)))
        .ok_or_else(|| QrwError::Config("stage inputs share no variable".into()))?;
    let (fv, fp) = (fc.partial(vi), fc.partial(partner));
    let (gv, gp) = (gc.partial(vi), gc.partial(partner));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0f64;
    let mut found = 0;
    let mut attempts = 0;
    while found < count {
        attempts += 1;
        if attempts > 200 * count {
            return Err(QrwError::Config(format!("found only {found} witnesses for {var}")));
        }
        let mut pt: Vec<Complex64> = (0..f.nvars())
            .map(|_| Complex64::from_polar(rng.gen_range(0.5..1.5), rng.gen_range(-3.1..3.1)))
            .collect();
        let mut ok = false;
        for _ in 0..80 {
            let (a, b) = (fc.eval_complex(&pt), gc.eval_complex(&pt));
            let j = [
                [fv.eval_complex(&pt), fp.eval_complex(&pt)],
                [gv.eval_complex(&pt), gp.eval_complex(&pt)],
            ];
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            if det.norm() < 1e-300 {
                break;
            }
            let dv = (a * j[1][1] - b * j[0][1]) / det;
            let dp = (j[0][0] * b - j[1][0] * a) / det;
            pt[vi] -= dv;
            pt[partner] -= dp;
            if !(pt[vi].is_finite() && pt[partner].is_finite()) || pt[vi].norm() > 1e6 || pt[partner].norm() > 1e6 {
                break;
            }
            if dv.norm() + dp.norm() < 1e-14 * (1.0 + pt[vi].norm() + pt[partner].norm()) {
                ok = relative_residual(&fc, &pt) < 1e-12 && relative_residual(&gc, &pt) < 1e-12;
                break;
            }
        }
        if ok {
            found += 1;
            worst = worst.max(relative_residual(&oc, &pt));
        }
    }
    Ok(worst)
}

// -------------------------------------------------------- numeric trace

struct Node {
    phis: Vec<f64>,
    dets: Vec<f64>,
    mus: Vec<[f64; 2]>,
}

fn node(kernel: &NumericKernel, a: f64, b: f64, tol: f64) -> Node {
    let phis = kernel.torus_fiber(&[a, b], tol);
    let mut dets = Vec::with_capacity(phis.len());
    let mut mus = Vec::with_capacity(phis.len());
    for &p in &phis {
        let z = to_point(&[a, b, p]);
        let h = phase_hessian(kernel, &z);
        dets.push(h[0][0] * h[1][1] - h[0][1] * h[1][0]);
        let m = kernel.mu_raw(&z);
        mus.push([m[0].re, m[1].re]);
    }
    Node { phis, dets, mus }
}

/// Bisects `det Z''` along an edge between two torus nodes.
#[allow(clippy::too_many_arguments)]
fn edge_zero(kernel: &NumericKernel, a0: [f64; 2], p0: f64, d0: f64, a1: [f64; 2], p1: f64) -> Option<TracePoint> {
    let at = |s: f64| {
        let th = [a0[0] + s * (a1[0] - a0[0]), a0[1] + s * (a1[1] - a0[1])];
        let ph = kernel.polish_angle(&th, p0 + s * wrap(p1 - p0));
        let z = to_point(&[th[0], th[1], ph]);
        let h = phase_hessian(kernel, &z);
        (z, h[0][0] * h[1][1] - h[0][1] * h[1][0])
    };
    let (mut lo, mut hi, mut dlo) = (0.0, 1.0, d0);
    for _ in 0..50 {
        let mid = 0.5 * (lo + hi);
        let (_, dm) = at(mid);
        if dm.signum() == dlo.signum() {
            lo = mid;
            dlo = dm;
        } else {
            hi = mid;
        }
    }
    let s = 0.5 * (lo + hi);
    let (z, _) = at(s);
    if kernel.eval(&z).norm() > 1e-8 {
        return None;
    }
    let m = kernel.mu_raw(&z);
    Some(TracePoint {
        angles: [z[0].arg(), z[1].arg(), z[2].arg()],
        mu: [m[0].re, m[1].re],
    })
}

/// A zero-curvature torus point and its direction.
#[derive(Clone, Copy, Debug)]
pub struct TracePoint {
    pub angles: [f64; 3],
    pub mu: [f64; 2],
}

/// Images under `μ` of the zero-curvature points of `V₁`, located by sign
/// changes of `det Z''` along the edges of a `grid × grid` torus lattice.
/// Native frame.
pub fn numeric_boundary_trace(kernel: &NumericKernel, grid: usize, tol: &Tolerances) -> Result<Vec<[f64; 2]>> {
    Ok(trace_points(kernel, grid, tol)?.into_iter().map(|p| p.mu).collect())
}

/// The torus points behind [`numeric_boundary_trace`].
pub fn trace_points(kernel: &NumericKernel, grid: usize, tol: &Tolerances) -> Result<Vec<TracePoint>> {
    if kernel.d != 2 {
        return Err(QrwError::Dimension {
            expected: "2",
            got: kernel.d,
        });
    }
    let th = grid_angles(grid);
    let utol = tol.unit_modulus.max(1e-6);
    let nodes: Vec<Node> = (0..grid * grid)
        .into_par_iter()
        .map(|idx| node(kernel, th[idx / grid], th[idx % grid], utol))
        .collect();
    let step = std::f64::consts::TAU / grid as f64;
    let cloud: Vec<TracePoint> = (0..grid * grid)
        .into_par_iter()
        .flat_map_iter(|idx| {
            let (i, j) = (idx / grid, idx % grid);
            let n0 = &nodes[idx];
            let a0 = [th[i], th[j]];
            let mut out = Vec::new();
            for (di, dj) in [(1usize, 0usize), (0, 1)] {
                let (i1, j1) = ((i + di) % grid, (j + dj) % grid);
                let n1 = &nodes[i1 * grid + j1];
                let a1 = [a0[0] + di as f64 * step, a0[1] + dj as f64 * step];
                if n0.phis.len() != n1.phis.len() {
                    continue;
                }
                for c in 0..n0.phis.len() {
                    // Predict along the edge with ∇Z = −μ and match.
                    let m = n0.mus[c];
                    let pred = n0.phis[c] - m[0] * (a1[0] - a0[0]) - m[1] * (a1[1] - a0[1]);
                    let mut ds: Vec<(f64, usize)> =
                        n1.phis.iter().enumerate().map(|(e, p)| (wrap(p - pred).abs(), e)).collect();
                    ds.sort_by(|x, y| x.0.total_cmp(&y.0));
                    if ds.len() > 1 && ds[0].0 > 0.25 * ds[1].0 {
                        continue;
                    }
                    let e = ds[0].1;
                    if n0.dets[c].signum() != n1.dets[e].signum() {
                        if let Some(p) = edge_zero(kernel, a0, n0.phis[c], n0.dets[c], a1, n1.phis[e]) {
                            out.push(p);
                        }
                    }
                }
            }
            out
        })
        .collect();
    Ok(cloud)
}

/// Directions `μ(z)` (display frame) of random torus points of `V₁`:
/// random `(x, y)` angles and one of the unit-modulus `z` roots.
pub fn feasible_samples(kernel: &NumericKernel, frame: &Frame, count: usize, seed: u64, tol: &Tolerances) -> Vec<[f64; 2]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let utol = tol.unit_modulus.max(1e-6);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let (a, b) = (rng.gen_range(-PI..PI), rng.gen_range(-PI..PI));
        let roots = kernel.torus_fiber(&[a, b], utol);
        if roots.is_empty() {
            continue;
        }
        let phi = roots[rng.gen_range(0..roots.len())];
        let m = kernel.mu_raw(&to_point(&[a, b, phi]));
        out.push(frame.apply([m[0].re, m[1].re]));
    }
    out
}

/// Points spread uniformly by area over the feasible region: the image of
/// `count · 10` pushforward samples is rasterised on a `cells × cells`
/// grid and occupied cells are drawn uniformly.
pub fn feasible_uniform(
    kernel: &NumericKernel,
    frame: &Frame,
    count: usize,
    cells: usize,
    seed: u64,
    tol: &Tolerances,
) -> Vec<[f64; 2]> {
    let push = feasible_samples(kernel, frame, count * 10, seed, tol);
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for q in &push {
        for a in 0..2 {
            lo[a] = lo[a].min(q[a]);
            hi[a] = hi[a].max(q[a]);
        }
    }
    let size = [(hi[0] - lo[0]) / cells as f64, (hi[1] - lo[1]) / cells as f64];
    let cell = |q: &[f64; 2]| {
        let i = (((q[0] - lo[0]) / size[0]) as usize).min(cells - 1);
        let j = (((q[1] - lo[1]) / size[1]) as usize).min(cells - 1);
        i * cells + j
    };
    let mut occupied: Vec<usize> = push.iter().map(cell).collect();
    occupied.sort_unstable();
    occupied.dedup();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    (0..count)
        .map(|_| {
            let c = occupied[rng.gen_range(0..occupied.len())];
            let (i, j) = (c / cells, c % cells);
            [
                lo[0] + (i as f64 + rng.gen::<f64>()) * size[0],
                lo[1] + (j as f64 + rng.gen::<f64>()) * size[1],
            ]
        })
        .collect()
}

/// Fraction of `cloud` points where `|P|` is below the `quantile` of `|P|`
/// over the reference points, and that threshold.
pub fn cloud_on_curve_fraction(p: &QPoly, cloud: &[[f64; 2]], reference: &[[f64; 2]], quantile: f64) -> (f64, f64) {
    let eval = |q: [f64; 2]| eval_rs(p, q).abs();
    let mut vals: Vec<f64> = reference.iter().map(|q| eval(*q)).collect();
    vals.sort_by(f64::total_cmp);
    let idx = ((vals.len() as f64 * quantile) as usize).min(vals.len().saturating_sub(1));
    let thr = vals.get(idx).copied().unwrap_or(0.0);
    let below = cloud.iter().filter(|q| eval(**q) < thr).count();
    (below as f64 / cloud.len().max(1) as f64, thr)
}

// ---------------------------------------------------- feasibility filter

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    On,
    Off,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComponentVerdict {
    pub id: usize,
    pub cells: usize,
    /// `[r_min, r_max, s_min, s_max]` over the component's cells.
    pub bbox: [f64; 4],
    pub sample: [f64; 2],
    pub verdict: Verdict,
}

/// Traces the real zero set of `f(r, s)` on a grid over `[−1.1, 1.1]²`,
/// labels connected components and decides for each whether it carries
/// images of zero-curvature torus points: first from a numeric trace of
/// the fold, then by solving at up to eight sample points.
pub fn feasibility_filter(
    f: &QPoly,
    kernel: &NumericKernel,
    frame: &Frame,
    grid: usize,
    tol: &Tolerances,
) -> Result<Vec<ComponentVerdict>> {
    let fc = f.map_coeffs(|c| Complex64::new(ratio_to_f64(c), 0.0));
    let eval = |r: f64, s: f64| fc.eval_complex(&[Complex64::new(r, 0.0), Complex64::new(s, 0.0)]).re;
    let n = grid + 1;
    let coord = |i: usize| -1.1 + 2.2 * i as f64 / grid as f64;
    let vals: Vec<f64> = (0..n * n)
        .into_par_iter()
        .map(|k| eval(coord(k / n), coord(k % n)))
        .collect();
    let sign = |i: usize, j: usize| vals[i * n + j] > 0.0;
    let cell_hit = |i: usize, j: usize| {
        let s = [sign(i, j), sign(i + 1, j), sign(i, j + 1), sign(i + 1, j + 1)];
        s.iter().any(|v| *v != s[0])
    };
    let mut label = vec![usize::MAX; grid * grid];
    let mut comps: Vec<Vec<(usize, usize)>> = Vec::new();
    for i in 0..grid {
        for j in 0..grid {
            if label[i * grid + j] != usize::MAX || !cell_hit(i, j) {
                continue;
            }
            let id = comps.len();
            let mut stack = vec![(i, j)];
            label[i * grid + j] = id;
            let mut cells = Vec::new();
            while let Some((a, b)) = stack.pop() {
                cells.push((a, b));
                for da in -1i64..=1 {
                    for db in -1i64..=1 {
                        let (na, nb) = (a as i64 + da, b as i64 + db);
                        if na < 0 || nb < 0 || na >= grid as i64 || nb >= grid as i64 {
                            continue;
                        }
                        let (na, nb) = (na as usize, nb as usize);
                        if label[na * grid + nb] == usize::MAX && cell_hit(na, nb) {
                            label[na * grid + nb] = id;
                            stack.push((na, nb));
                        }
                    }
                }
            }
            comps.push(cells);
        }
    }
    let mut loose = *tol;
    loose.degenerate_curvature = 1e-4;
    let cell_of = |x: f64| ((x + 1.1) / 2.2 * grid as f64).floor();
    let mut traced: HashMap<usize, [f64; 2]> = HashMap::new();
    for q in numeric_boundary_trace(kernel, 128, tol)? {
        let p = frame.apply(q);
        let (a, b) = (cell_of(p[0]), cell_of(p[1]));
        if a < 0.0 || b < 0.0 || a >= grid as f64 || b >= grid as f64 {
            continue;
        }
        traced.entry(a as usize * grid + b as usize).or_insert(p);
    }
    let out = comps
        .par_iter()
        .enumerate()
        .map(|(id, cells)| {
            let mut bbox = [f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY];
            for &(i, j) in cells {
                bbox[0] = bbox[0].min(coord(i));
                bbox[1] = bbox[1].max(coord(i + 1));
                bbox[2] = bbox[2].min(coord(j));
                bbox[3] = bbox[3].max(coord(j + 1));
            }
            // Up to eight representatives spread along the component; one
            // degenerate direction makes it part of the boundary.
            let hit = cells.iter().find_map(|&(i, j)| {
                (i.saturating_sub(1)..=(i + 1).min(grid - 1))
                    .flat_map(|a| (j.saturating_sub(1)..=(j + 1).min(grid - 1)).map(move |b| (a, b)))
                    .find_map(|(a, b)| traced.get(&(a * grid + b)).copied())
            });
            let picks = if hit.is_some() { 0 } else { cells.len().min(8) };
            let mut verdict = if hit.is_some() { Verdict::On } else { Verdict::Off };
            let mut sample = hit.unwrap_or([f64::NAN; 2]);
            for t in 0..picks {
                let (i, j) = cells[t * cells.len() / picks];
                let p = cell_point(&eval, coord(i), coord(i + 1), coord(j), coord(j + 1));
                if t == 0 {
                    sample = p;
                }
                match solve_z_2d(kernel, &frame.invert(p), 96, &loose) {
                    Err(QrwError::DegenerateDirection(_)) => {
                        verdict = Verdict::On;
                        sample = p;
                        break;
                    }
                    Ok(_) => {}
                    Err(_) => verdict = Verdict::Inconclusive,
                }
            }
            ComponentVerdict {
                id,
                cells: cells.len(),
                bbox,
                sample,
                verdict,
            }
        })
        .collect();
    Ok(out)
}

fn cell_point<F: Fn(f64, f64) -> f64>(eval: &F, r0: f64, r1: f64, s0: f64, s1: f64) -> [f64; 2] {
    let corners = [[r0, s0], [r1, s0], [r1, s1], [r0, s1]];
    for e in 0..4 {
        let (a, b) = (corners[e], corners[(e + 1) % 4]);
        let (fa, fb) = (eval(a[0], a[1]), eval(b[0], b[1]));
        if (fa > 0.0) != (fb > 0.0) {
            let (mut lo, mut hi, mut flo) = (0.0, 1.0, fa);
            for _ in 0..60 {
                let m = 0.5 * (lo + hi);
                let fm = eval(a[0] + m * (b[0] - a[0]), a[1] + m * (b[1] - a[1]));
                if (fm > 0.0) == (flo > 0.0) {
                    lo = m;
                    flo = fm;
                } else {
                    hi = m;
                }
            }
            let m = 0.5 * (lo + hi);
            return [a[0] + m * (b[0] - a[0]), a[1] + m * (b[1] - a[1])];
        }
    }
    [0.5 * (r0 + r1), 0.5 * (s0 + s1)]
}

/// `true` when the real zero set of a `(r, s)` polynomial passes within
/// `eps` of `q`: the relative residual at `q` is negligible or `f` changes
/// sign on the circle of radius `eps` around it.
pub fn near_curve(f: &QPoly, q: [f64; 2], eps: f64) -> bool {
    let at = |p: [f64; 2]| [Complex64::new(p[0], 0.0), Complex64::new(p[1], 0.0)];
    let scale = f.terms().iter().map(|(_, c)| ratio_to_f64(c).abs()).fold(0.0, f64::max);
    if relative_residual(f, &at(q)) < 1e-12 || eval_rs(f, q).abs() < 1e-12 * scale {
        return true;
    }
    let first = eval_rs(f, [q[0] + eps, q[1]]).signum();
    (1..32).any(|k| {
        let t = std::f64::consts::TAU * k as f64 / 32.0;
        eval_rs(f, [q[0] + eps * t.cos(), q[1] + eps * t.sin()]).signum() != first
    })
}

/// Loads a polynomial fixture in the exchange format.
pub fn load_poly(path: &Path) -> Result<QPoly> {
    Ok(exchange::from_json(&std::fs::read_to_string(path)?)?)
}

/// Value of a `(r, s)` polynomial at a real point.
pub fn eval_rs(p: &QPoly, q: [f64; 2]) -> f64 {
    p.eval_complex(&[Complex64::new(q[0], 0.0), Complex64::new(q[1], 0.0)]).re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::kernel::build_kernel;

    #[test]
    fn cayley2_peaks_are_the_edges() {
        let b = build_kernel(&fixtures::cayley2()).unwrap();
        let rep = peaks_1d(&b, 256, &Tolerances::default()).unwrap();
        assert_eq!(rep.peaks.len(), 2, "{:?}", rep.peaks);
        let k = NumericKernel::from_bundle(&b);
        let f = crate::torus::torus_fibers(&k, 256, &Tolerances::default()).unwrap();
        let (lo, hi) = f.components.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |a, c| {
            (a.0.min(c.mu_range.0), a.1.max(c.mu_range.1))
        });
        assert!((rep.peaks[0].mu - lo).abs() < 1e-4);
        assert!((rep.peaks[1].mu - hi).abs() < 1e-4);
    }

    #[test]
    fn deterministic_walk_is_not_smooth() {
        let b = build_kernel(&fixtures::deterministic()).unwrap();
        assert!(matches!(
            peaks_1d(&b, 256, &Tolerances::default()),
            Err(QrwError::SmoothnessFailed(_))
        ));
    }

    #[test]
    fn square_frame_round_trip() {
        let f = Frame::square();
        let p = f.invert(f.apply([0.3, -0.2]));
        assert!((p[0] - 0.3).abs() < 1e-15 && (p[1] + 0.2).abs() < 1e-15);
        let v = vars(&["r", "s"]);
        let r = QPoly::var(v.clone(), "r").unwrap();
        // u = (r + s + 1)/2 in the display frame.
        let shown = f.to_display(&r);
        assert!((eval_rs(&shown, [0.1, 0.3]) - 0.7).abs() < 1e-15);
    }

    #[test]
    fn symmetric_part() {
        let v = vars(&["r", "s"]);
        let r = QPoly::var(v.clone(), "r").unwrap();
        let s = QPoly::var(v.clone(), "s").unwrap();
        let one = QPoly::one(v);
        let circle = r.pow(2).add(&s.pow(2)).sub(&one);
        let line = r.sub(&s.scale(&BigRational::from_integer(2.into())));
        let f = circle.mul(&line);
        assert!(symmetry_filter(&f).is_scalar_multiple_of(&circle));
    }
}
