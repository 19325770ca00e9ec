//! Logarithmic Gauss map, curvature and the leading-order asymptotics of
//! the amplitudes.
//!
//! On `V₁` write `x_a = e^{iθ_a}` and `y = e^{iZ(θ)}`. Then `μ = −∇Z`, and
//! the Hessian of `Z` plays the role of the curvature: it is singular
//! exactly where the Gaussian curvature of the log-variety vanishes.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use qrw_poly::resultant::poly_det;
use qrw_poly::{vars, MultiPoly, QPoly};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{QrwError, Result};
use crate::kernel::KernelBundle;
use crate::tolerances::Tolerances;
use crate::torus::{grid_angles, solve_small, to_point, wrap, FiberReport, NumericKernel, TorusPoint};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn coeff_scale(kernel: &NumericKernel) -> f64 {
    kernel.q.terms().iter().map(|(_, c)| c.norm()).sum::<f64>().max(1.0)
}

/// `μ(z) = (x_a Q_{x_a} / y Q_y)_a` at a point of `V₁`.
pub fn gauss_map(kernel: &NumericKernel, z: &[Complex64], tol: &Tolerances) -> Result<Vec<f64>> {
    let q = kernel.eval(z).norm();
    if q > tol.on_variety * coeff_scale(kernel) {
        return Err(QrwError::NotOnVariety(q));
    }
    let g = kernel.gradient(z);
    let t = kernel.d;
    let den = z[t] * g[t];
    if den.norm() <= tol.singular_gradient {
        return Err(QrwError::NearSingularFiber(den.norm()));
    }
    let mu: Vec<Complex64> = (0..t).map(|a| z[a] * g[a] / den).collect();
    let im = mu.iter().map(|m| m.im.abs()).fold(0.0, f64::max);
    if im > 1e-6 {
        return Err(QrwError::NotOnVariety(im));
    }
    Ok(mu.iter().map(|m| m.re).collect())
}

/// Entries of the log-coordinate derivatives `F_a = z_a Q_a` and
/// `F_ab = δ_ab z_a Q_a + z_a z_b Q_ab` as polynomials.
fn log_derivatives(q: &QPoly) -> (Vec<QPoly>, Vec<Vec<QPoly>>) {
    let m = q.nvars();
    let f1: Vec<QPoly> = (0..m).map(|a| q.euler(a)).collect();
    let f2 = (0..m)
        .map(|a| (0..m).map(|b| f1[a].euler(b)).collect())
        .collect();
    (f1, f2)
}

/// Determinant of the bordered Hessian of `Q(e^{X_1}, …, e^{X_m})`.
fn bordered_log_hessian(q: &QPoly) -> QPoly {
    let m = q.nvars();
    let (f1, f2) = log_derivatives(q);
    let zero = QPoly::zero(q.vars().clone());
    let mat: Vec<Vec<QPoly>> = (0..=m)
        .map(|r| {
            (0..=m)
                .map(|c| match (r, c) {
                    (0, 0) => zero.clone(),
                    (0, c) => f1[c - 1].clone(),
                    (r, 0) => f1[r - 1].clone(),
                    (r, c) => f2[r - 1][c - 1].clone(),
                })
                .collect()
        })
        .collect();
    poly_det(&mat)
}

/// The curvature polynomial
/// `K = Q_x Q_y (x Q_x + y Q_y) + x y (Q_y² Q_xx − 2 Q_x Q_y Q_xy + Q_x² Q_yy)`:
/// on `V₁`, `Z'' = i x y K / (y Q_y)³`, so `K` vanishes exactly where the
/// curvature does.
pub fn curvature_poly_1d(bundle: &KernelBundle) -> Result<QPoly> {
    if bundle.d() != 1 {
        return Err(QrwError::Dimension {
            expected: "1",
            got: bundle.d(),
        });
    }
    // The bordered determinant is −x y K.
    Ok(bordered_log_hessian(&bundle.q).neg().strip_monomial().1)
}

/// The 2-D curvature polynomial `L` and the direction polynomials
/// `H₁ = x Q_x − r z Q_z`, `H₂ = y Q_y − s z Q_z`, all over
/// `(x, y, z, r, s)`.
#[derive(Clone, Debug)]
pub struct Curvature2d {
    pub l: QPoly,
    pub h1: QPoly,
    pub h2: QPoly,
    /// `Q` re-expressed over `(x, y, z, r, s)`.
    pub q: QPoly,
}

pub fn curvature_poly_2d(bundle: &KernelBundle) -> Result<Curvature2d> {
    if bundle.d() != 2 {
        return Err(QrwError::Dimension {
            expected: "2",
            got: bundle.d(),
        });
    }
    let l = bordered_log_hessian(&bundle.q).strip_monomial().1;
    let v = vars(&["x", "y", "z", "r", "s"]);
    let q = bundle.q.embed(v.clone())?;
    let r = QPoly::var(v.clone(), "r")?;
    let s = QPoly::var(v.clone(), "s")?;
    let zqz = q.euler(2);
    Ok(Curvature2d {
        l: l.embed(v)?,
        h1: q.euler(0).sub(&r.mul(&zqz)),
        h2: q.euler(1).sub(&s.mul(&zqz)),
        q,
    })
}

/// Hessian of `Z(θ)` at a point of `V₁` (real up to rounding).
pub fn phase_hessian(kernel: &NumericKernel, z: &[Complex64]) -> Vec<Vec<f64>> {
    let d = kernel.d;
    let t = d;
    let g = kernel.gradient(z);
    let h = kernel.hessian(z);
    let f1 = |a: usize| I * z[a] * g[a];
    let f2 = |a: usize, b: usize| {
        let diag = if a == b { z[a] * g[a] } else { Complex64::new(0.0, 0.0) };
        -(diag + z[a] * z[b] * h[a][b])
    };
    let ft = f1(t);
    let zd: Vec<Complex64> = (0..d).map(|a| -f1(a) / ft).collect();
    (0..d)
        .map(|a| {
            (0..d)
                .map(|b| {
                    let num = f2(a, b) + f2(a, t) * zd[b] + f2(b, t) * zd[a] + f2(t, t) * zd[a] * zd[b];
                    (-num / ft).re
                })
                .collect()
        })
        .collect()
}

fn det_small(m: &[Vec<f64>]) -> f64 {
    match m.len() {
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        _ => unimplemented!("phase Hessians are at most 2×2"),
    }
}

fn eigen_signs(m: &[Vec<f64>]) -> Vec<f64> {
    match m.len() {
        1 => vec![m[0][0]],
        2 => {
            let tr = m[0][0] + m[1][1];
            let det = det_small(m);
            let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
            vec![tr / 2.0 + disc, tr / 2.0 - disc]
        }
        _ => unimplemented!(),
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub point: TorusPoint,
    pub mu: Vec<f64>,
    /// Hessian of `Z` in the torus angles.
    pub hessian: Vec<Vec<f64>>,
    pub hessian_det: f64,
    /// Number of negative eigenvalues.
    pub tau: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CriticalSet {
    pub direction: Vec<f64>,
    pub points: Vec<CriticalPoint>,
}

fn critical_point(kernel: &NumericKernel, angles: Vec<f64>, tol: &Tolerances) -> Result<CriticalPoint> {
    let z = to_point(&angles);
    let mu = gauss_map(kernel, &z, tol)?;
    let hessian = phase_hessian(kernel, &z);
    let hessian_det = det_small(&hessian);
    let eig = eigen_signs(&hessian);
    Ok(CriticalPoint {
        point: TorusPoint::new(kernel, angles),
        mu,
        tau: eig.iter().filter(|e| **e < 0.0).count(),
        hessian,
        hessian_det,
    })
}

/// `μ` along a track between two grid angles, with `φ` re-solved near the
/// linear interpolation.
fn track_mu(kernel: &NumericKernel, th0: f64, ph0: f64, th1: f64, ph1: f64, s: f64) -> (f64, f64, f64) {
    let th = th0 + s * (th1 - th0);
    let ph = kernel.polish_angle(&[th], ph0 + s * (ph1 - ph0));
    let mu = kernel.mu_raw(&to_point(&[th, ph]))[0].re;
    (th, ph, mu)
}

fn same_point(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| wrap(x - y).abs() < 1e-7)
}

/// All torus points with `μ = r` in one dimension, from a fiber report.
pub fn solve_z_1d(
    kernel: &NumericKernel,
    fibers: &FiberReport,
    r: f64,
    tol: &Tolerances,
) -> Result<CriticalSet> {
    let g = fibers.thetas.len();
    let n = fibers.wrap_perm.len();
    let mut found: Vec<Vec<f64>> = Vec::new();
    let seg = |c: usize, t: usize| -> (f64, f64, f64, f64, f64, f64) {
        let (th0, ph0, mu0) = (fibers.thetas[t], fibers.roots[t][c], fibers.mu[t][c]);
        let (th1, ph1, mu1) = if t + 1 < g {
            (fibers.thetas[t + 1], fibers.roots[t + 1][c], fibers.mu[t + 1][c])
        } else {
            let c2 = fibers.wrap_perm[c];
            (fibers.thetas[0] + TAU, fibers.roots[0][c2], fibers.mu[0][c2])
        };
        let ph1 = ph0 + wrap(ph1 - ph0);
        (th0, ph0, mu0 - r, th1, ph1, mu1 - r)
    };
    for c in 0..n {
        for t in 0..g {
            let (th0, ph0, f0, th1, ph1, f1) = seg(c, t);
            if f0 == 0.0 || f0.signum() != f1.signum() {
                // Bisection in the segment parameter.
                let (mut lo, mut hi, mut flo) = (0.0, 1.0, f0);
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    let (_, _, m) = track_mu(kernel, th0, ph0, th1, ph1, mid);
                    let fm = m - r;
                    if fm.signum() == flo.signum() {
                        lo = mid;
                        flo = fm;
                    } else {
                        hi = mid;
                    }
                }
                let (th, ph, _) = track_mu(kernel, th0, ph0, th1, ph1, 0.5 * (lo + hi));
                found.push(vec![wrap(th), wrap(ph)]);
            } else {
                // Tangency: a local minimum of |μ − r| close to zero.
                if t == 0 {
                    continue;
                }
                let (pth0, pph0, fp, _, _, _) = seg(c, t - 1);
                if fp.signum() == f0.signum() && f0.abs() <= fp.abs() && f0.abs() <= f1.abs() && f0.abs() < 1e-2 {
                    let eval = |th: f64| {
                        let guess = if th < th0 {
                            pph0 + (th - pth0) / (th0 - pth0) * wrap(ph0 - pph0)
                        } else {
                            ph0 + (th - th0) / (th1 - th0) * (ph1 - ph0)
                        };
                        let ph = kernel.polish_angle(&[th], guess);
                        (ph, (kernel.mu_raw(&to_point(&[th, ph]))[0].re - r).abs())
                    };
                    // Golden-section search over the two adjacent segments.
                    let (mut a, mut b) = (pth0, th1);
                    let gr = 0.5 * (5f64.sqrt() - 1.0);
                    for _ in 0..80 {
                        let c1 = b - gr * (b - a);
                        let c2 = a + gr * (b - a);
                        if eval(c1).1 < eval(c2).1 {
                            b = c2;
                        } else {
                            a = c1;
                        }
                    }
                    let th = 0.5 * (a + b);
                    let (ph, v) = eval(th);
                    if v < 1e-8 {
                        // μ − r touches zero without crossing: a fold of μ,
                        // where the curvature vanishes.
                        let cp = critical_point(kernel, vec![wrap(th), wrap(ph)], tol)?;
                        return Err(QrwError::DegenerateDirection(cp.hessian_det));
                    }
                }
            }
        }
    }
    finish(kernel, vec![r], found, tol)
}

fn finish(kernel: &NumericKernel, direction: Vec<f64>, found: Vec<Vec<f64>>, tol: &Tolerances) -> Result<CriticalSet> {
    let mut pts: Vec<Vec<f64>> = Vec::new();
    for a in found {
        let c: Vec<f64> = a.iter().map(|v| wrap(-v)).collect();
        for p in [a, c] {
            if !pts.iter().any(|q| same_point(q, &p)) {
                pts.push(p);
            }
        }
    }
    pts.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let mut points = Vec::with_capacity(pts.len());
    for p in pts {
        let cp = critical_point(kernel, p, tol)?;
        if cp.hessian_det.abs() <= tol.degenerate_curvature {
            return Err(QrwError::DegenerateDirection(cp.hessian_det));
        }
        points.push(cp);
    }
    Ok(CriticalSet { direction, points })
}

/// All torus points with `μ = (r, s)` in two dimensions: Newton from the
/// best grid samples.
pub fn solve_z_2d(kernel: &NumericKernel, r: &[f64], grid: usize, tol: &Tolerances) -> Result<CriticalSet> {
    if kernel.d != 2 || r.len() != 2 {
        return Err(QrwError::Dimension {
            expected: "2",
            got: kernel.d,
        });
    }
    let th = grid_angles(grid);
    let cells: Vec<(f64, f64)> = th.iter().flat_map(|a| th.iter().map(move |b| (*a, *b))).collect();
    let mut samples: Vec<(Vec<f64>, f64)> = cells
        .par_iter()
        .flat_map_iter(|&(a, b)| {
            kernel.torus_fiber(&[a, b], tol.unit_modulus.max(1e-6)).into_iter().map(move |ph| {
                let mu = kernel.mu_raw(&to_point(&[a, b, ph]));
                let dist = ((mu[0].re - r[0]).powi(2) + (mu[1].re - r[1]).powi(2)).sqrt();
                (vec![a, b, ph], dist)
            })
        })
        .collect();
    samples.sort_by(|a, b| a.1.total_cmp(&b.1));
    let spacing = 2.0 * TAU / grid as f64;
    let mut seeds: Vec<Vec<f64>> = Vec::new();
    for (s, _) in samples.iter().take(4096) {
        if seeds.len() >= 64 {
            break;
        }
        if seeds
            .iter()
            .all(|q| q.iter().zip(s).take(2).map(|(x, y)| wrap(x - y).abs()).fold(0.0, f64::max) > spacing)
        {
            seeds.push(s.clone());
        }
    }
    let found: Vec<Vec<f64>> = seeds
        .into_par_iter()
        .filter_map(|mut a| {
            for _ in 0..50 {
                let z = to_point(&a);
                let mu = kernel.mu_raw(&z);
                let f = [mu[0].re - r[0], mu[1].re - r[1]];
                if f[0].abs().max(f[1].abs()) < 1e-12 {
                    return Some(a);
                }
                let h = phase_hessian(kernel, &z);
                // μ = −∇Z, so ∂μ/∂θ = −H.
                let step = solve_small(h.clone(), f.to_vec())?;
                let norm = step.iter().map(|s| s * s).sum::<f64>().sqrt();
                let sc = if norm > 0.2 { 0.2 / norm } else { 1.0 };
                let dth = [sc * step[0], sc * step[1]];
                let zx: Vec<f64> = mu.iter().map(|m| -m.re).collect();
                let guess = a[2] + zx[0] * dth[0] + zx[1] * dth[1];
                let na = [a[0] + dth[0], a[1] + dth[1]];
                let ph = kernel.polish_angle(&na, guess);
                a = vec![wrap(na[0]), wrap(na[1]), wrap(ph)];
            }
            let mu = kernel.mu_raw(&to_point(&a));
            ((mu[0].re - r[0]).abs().max((mu[1].re - r[1]).abs()) < 1e-9).then_some(a)
        })
        .collect();
    finish(kernel, r.to_vec(), found, tol)
}

/// Leading-order amplitude at one lattice site.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AsymptoticEstimate {
    pub n: usize,
    pub site: Vec<i64>,
    /// Sum of the critical-point contributions.
    pub re: f64,
    pub im: f64,
    /// `n^{−d/2} Σ α`: the phases-aligned upper envelope of `|a|`.
    pub envelope: f64,
    /// `α_z = |P_ij / (y Q_y)| (2π)^{−d/2} |det Z''|^{−1/2}` per point.
    pub alphas: Vec<f64>,
}

impl AsymptoticEstimate {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// Per-point magnitudes `α_z` (independent of `n`).
pub fn alphas(kernel: &NumericKernel, i: usize, j: usize, set: &CriticalSet) -> Vec<f64> {
    let d = kernel.d as i32;
    set.points
        .iter()
        .map(|cp| {
            let z = cp.point.point();
            let g = kernel.gradient(&z);
            let p = kernel.p[i][j].eval_complex(&z);
            (p / (z[kernel.d] * g[kernel.d])).norm() * (TAU).powf(-d as f64 / 2.0) / cp.hessian_det.abs().sqrt()
        })
        .collect()
}

/// Stationary-phase estimate of `a(i, j, n, site)`.
pub fn asymptotic_amplitude(
    kernel: &NumericKernel,
    i: usize,
    j: usize,
    set: &CriticalSet,
    n: usize,
    site: &[i64],
    tol: &Tolerances,
) -> Result<AsymptoticEstimate> {
    let d = kernel.d;
    for cp in &set.points {
        if cp.hessian_det.abs() <= tol.degenerate_curvature {
            return Err(QrwError::DegenerateDirection(cp.hessian_det));
        }
    }
    let al = alphas(kernel, i, j, set);
    let nf = n as f64;
    let scale = nf.powf(-(d as f64) / 2.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for cp in &set.points {
        let z = cp.point.point();
        let g = kernel.gradient(&z);
        let p = kernel.p[i][j].eval_complex(&z);
        let sig = cp.hessian.len() as f64 - 2.0 * cp.tau as f64;
        let mut phase = -nf * cp.point.angles[d] - PI * sig / 4.0;
        for a in 0..d {
            phase -= site[a] as f64 * cp.point.angles[a];
        }
        let mag = (TAU * nf).powf(-(d as f64) / 2.0) / cp.hessian_det.abs().sqrt();
        sum += -p / (z[d] * g[d]) * mag * Complex64::from_polar(1.0, phase);
    }
    Ok(AsymptoticEstimate {
        n,
        site: site.to_vec(),
        re: sum.re,
        im: sum.im,
        envelope: scale * al.iter().sum::<f64>(),
        alphas: al,
    })
}

/// Samples of `|Σ α_j e^{iφ_j}|²` with independent uniform phases.
pub fn chi_envelope(alphas: &[f64], samples: usize, seed: u64) -> Vec<f64> {
    sample_chunks(samples, seed, |rng| {
        let mut s = Complex64::new(0.0, 0.0);
        for a in alphas {
            s += Complex64::from_polar(*a, rng.gen_range(-PI..PI));
        }
        s.norm_sqr()
    })
}

/// Samples for a real amplitude: critical points come in conjugate pairs
/// whose phases are locked, so each pair contributes `2α cos ψ` with one
/// uniform `ψ`. `pair_alphas` has one entry per pair; a self-conjugate
/// point contributes `α cos ψ` with `ψ ∈ {0, π}` and is passed separately.
pub fn chi_envelope_real(pair_alphas: &[f64], samples: usize, seed: u64) -> Vec<f64> {
    sample_chunks(samples, seed, |rng| {
        let s: f64 = pair_alphas.iter().map(|a| 2.0 * a * rng.gen_range(-PI..PI).cos()).sum();
        s * s
    })
}

fn sample_chunks<F>(samples: usize, seed: u64, f: F) -> Vec<f64>
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    const CHUNK: usize = 4096;
    let chunks = samples.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .flat_map_iter(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let len = CHUNK.min(samples - c * CHUNK);
            (0..len).map(|_| f(&mut rng)).collect::<Vec<_>>()
        })
        .collect()
}

/// Splits a conjugate-closed critical set into one `α` per conjugate pair.
pub fn pair_alphas(set: &CriticalSet, alphas: &[f64]) -> Vec<f64> {
    let mut used = vec![false; set.points.len()];
    let mut out = Vec::new();
    for a in 0..set.points.len() {
        if used[a] {
            continue;
        }
        used[a] = true;
        let conj = set.points[a].point.conj();
        if let Some(b) = (0..set.points.len()).find(|&b| !used[b] && same_point(&set.points[b].point.angles, &conj.angles)) {
            used[b] = true;
        }
        out.push(alphas[a]);
    }
    out
}

/// Two-sample Kolmogorov–Smirnov statistic.
pub fn ks_distance(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut best) = (0usize, 0usize, 0f64);
    while i < a.len() && j < b.len() {
        let v = a[i].min(b[j]);
        while i < a.len() && a[i] <= v {
            i += 1;
        }
        while j < b.len() && b[j] <= v {
            j += 1;
        }
        best = best.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    best
}

/// Evaluates a polynomial given over `(x, y)` numerically at a torus point.
pub fn eval_at(p: &MultiPoly<num_rational::BigRational>, z: &[Complex64]) -> Complex64 {
    p.eval_complex(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::kernel::build_kernel;
    use crate::torus::torus_fibers;

    #[test]
    fn hadamard_gauss_map_endpoints() {
        let k = NumericKernel::from_spec(&fixtures::hadamard());
        let tol = Tolerances::default();
        let s2 = 2f64.sqrt();
        let one = Complex64::new(1.0, 0.0);
        let mu = gauss_map(&k, &[one, one], &tol).unwrap()[0];
        assert!((mu - (0.5 - s2 / 4.0)).abs() < 1e-12);
        let mu = gauss_map(&k, &[one, -one], &tol).unwrap()[0];
        assert!((mu - (0.5 + s2 / 4.0)).abs() < 1e-12);
    }

    #[test]
    fn hadamard_critical_sets() {
        let k = NumericKernel::from_spec(&fixtures::hadamard());
        let tol = Tolerances::default();
        let f = torus_fibers(&k, 512, &tol).unwrap();
        let set = solve_z_1d(&k, &f, 0.5, &tol).unwrap();
        assert!(!set.points.is_empty());
        let edge = 0.5 + 2f64.sqrt() / 4.0;
        assert!(matches!(solve_z_1d(&k, &f, edge, &tol), Err(QrwError::DegenerateDirection(_))));
    }

    #[test]
    fn curvature_zero_at_hadamard_analogue_edges() {
        let b = build_kernel(&fixtures::cayley2()).unwrap();
        let kpoly = curvature_poly_1d(&b).unwrap();
        let k = NumericKernel::from_bundle(&b);
        let tol = Tolerances::default();
        let f = torus_fibers(&k, 512, &tol).unwrap();
        let (lo, hi) = f.components.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |acc, c| {
            (acc.0.min(c.mu_range.0), acc.1.max(c.mu_range.1))
        });
        assert!(lo < hi);
        let _ = kpoly;
    }

    #[test]
    fn ks_basics() {
        assert_eq!(ks_distance(&[1.0, 2.0], &[1.0, 2.0]), 0.0);
        assert_eq!(ks_distance(&[0.0], &[1.0]), 1.0);
        let s = chi_envelope(&[2.0], 100, 0);
        assert!(s.iter().all(|v| (v - 4.0).abs() < 1e-12));
    }
}
