//! Numeric view of the kernel on the unit torus: fibers, tracking and
//! smoothness probes.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use qrw_poly::roots::complex_roots;
use qrw_poly::{MultiPoly, SqfScope};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{QrwError, Result};
use crate::kernel::{kernel_polys, KernelBundle};
use crate::tolerances::Tolerances;
use crate::walkmodel::WalkSpec;

pub type CPoly = MultiPoly<Complex64>;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// `Q`, its partials and the numerators with complex coefficients.
#[derive(Clone, Debug)]
pub struct NumericKernel {
    pub d: usize,
    pub k: usize,
    pub q: CPoly,
    pub grad: Vec<CPoly>,
    pub hess: Vec<Vec<CPoly>>,
    pub p: Vec<Vec<CPoly>>,
}

impl NumericKernel {
    fn assemble(d: usize, k: usize, q: CPoly, p: Vec<Vec<CPoly>>) -> Self {
        let grad: Vec<CPoly> = (0..=d).map(|a| q.partial(a)).collect();
        let hess = (0..=d)
            .map(|a| (0..=d).map(|b| grad[a].partial(b)).collect())
            .collect();
        Self { d, k, q, grad, hess, p }
    }

    pub fn from_bundle(b: &KernelBundle) -> Self {
        let c = |p: &qrw_poly::QPoly| p.map_coeffs(|r| Complex64::new(qrw_poly::ratio_to_f64(r), 0.0));
        Self::assemble(
            b.d(),
            b.spec.k,
            c(&b.q),
            b.p.iter().map(|r| r.iter().map(c).collect()).collect(),
        )
    }

    /// Works for any coin, including floating and complex ones.
    pub fn from_spec(spec: &WalkSpec) -> Self {
        let (q, p, _) = kernel_polys(spec, &spec.coin.to_complex());
        Self::assemble(spec.d, spec.k, q, p)
    }

    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        self.q.eval_complex(z)
    }

    pub fn gradient(&self, z: &[Complex64]) -> Vec<Complex64> {
        self.grad.iter().map(|g| g.eval_complex(z)).collect()
    }

    pub fn hessian(&self, z: &[Complex64]) -> Vec<Vec<Complex64>> {
        self.hess
            .iter()
            .map(|r| r.iter().map(|h| h.eval_complex(z)).collect())
            .collect()
    }

    /// Logarithmic Gauss map `x_a Q_{x_a} / (y Q_y)`, unchecked.
    pub fn mu_raw(&self, z: &[Complex64]) -> Vec<Complex64> {
        let g = self.gradient(z);
        let t = self.d;
        let den = z[t] * g[t];
        (0..t).map(|a| z[a] * g[a] / den).collect()
    }

    /// All roots in the time variable with the space variables fixed.
    pub fn fiber(&self, space: &[Complex64]) -> Vec<Complex64> {
        let mut pt = space.to_vec();
        pt.push(Complex64::new(0.0, 0.0));
        complex_roots(&self.q.univariate_at(self.d, &pt))
    }

    /// Angles of the unit-modulus roots of `Q(e^{iθ}, ·)`, polished by
    /// Newton's method and sorted.
    pub fn torus_fiber(&self, thetas: &[f64], tol: f64) -> Vec<f64> {
        let space: Vec<Complex64> = thetas.iter().map(|t| Complex64::from_polar(1.0, *t)).collect();
        let mut pt = space.clone();
        pt.push(Complex64::new(0.0, 0.0));
        let coeffs = self.q.univariate_at(self.d, &pt);
        let mut out: Vec<f64> = complex_roots(&coeffs)
            .into_iter()
            .map(|r| polish(&coeffs, r))
            .filter(|r| (r.norm() - 1.0).abs() <= tol)
            .map(|r| r.arg())
            .collect();
        out.sort_by(f64::total_cmp);
        out
    }

    /// `φ` at which `Q(e^{iθ}, e^{iφ}) = 0` near `guess`, by Newton in `φ`.
    pub fn polish_angle(&self, thetas: &[f64], guess: f64) -> f64 {
        let mut pt: Vec<Complex64> = thetas.iter().map(|t| Complex64::from_polar(1.0, *t)).collect();
        pt.push(Complex64::new(0.0, 0.0));
        let coeffs = self.q.univariate_at(self.d, &pt);
        polish(&coeffs, Complex64::from_polar(1.0, guess)).arg()
    }
}

fn polish(coeffs: &[Complex64], mut r: Complex64) -> Complex64 {
    for _ in 0..3 {
        let mut v = Complex64::new(0.0, 0.0);
        let mut dv = Complex64::new(0.0, 0.0);
        for c in coeffs.iter().rev() {
            dv = dv * r + v;
            v = v * r + c;
        }
        if dv.norm() == 0.0 {
            break;
        }
        let step = v / dv;
        r -= step;
        if step.norm() < 1e-16 {
            break;
        }
    }
    r
}

/// A point `(e^{iθ_1}, …, e^{iθ_d}, e^{iφ})` on the unit torus.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusPoint {
    /// Angles, time coordinate last.
    pub angles: Vec<f64>,
    /// `|Q|` at the point.
    pub residual: f64,
}

impl TorusPoint {
    pub fn new(kernel: &NumericKernel, angles: Vec<f64>) -> Self {
        let z = to_point(&angles);
        let residual = kernel.eval(&z).norm();
        Self { angles, residual }
    }

    pub fn point(&self) -> Vec<Complex64> {
        to_point(&self.angles)
    }

    pub fn conj(&self) -> TorusPoint {
        TorusPoint {
            angles: self.angles.iter().map(|a| wrap(-a)).collect(),
            residual: self.residual,
        }
    }
}

pub fn to_point(angles: &[f64]) -> Vec<Complex64> {
    angles.iter().map(|a| Complex64::from_polar(1.0, *a)).collect()
}

/// Angle in `(−π, π]`.
pub fn wrap(a: f64) -> f64 {
    let mut b = a.rem_euclid(TAU);
    if b > PI {
        b -= TAU;
    }
    b
}

/// Grid angles `2π(t + 1/2)/G`, offset so that `x = 1` is never sampled.
pub fn grid_angles(g: usize) -> Vec<f64> {
    (0..g).map(|t| TAU * (t as f64 + 0.5) / g as f64 - PI).collect()
}

// ---------------------------------------------------------------- fibers

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FiberComponent {
    pub id: usize,
    /// Degree of the projection to `x` (the loop's winding in `x`).
    pub degree: usize,
    /// Winding of the loop in `y`.
    pub y_winding: i64,
    /// Range of `μ` over the loop.
    pub mu_range: (f64, f64),
    /// Tracks (root slots at the first grid angle) making up the loop.
    pub tracks: Vec<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FiberReport {
    pub thetas: Vec<f64>,
    /// `roots[t][c]`: angle of track `c` at `thetas[t]`.
    pub roots: Vec<Vec<f64>>,
    /// `mu[t][c]`: Gauss map along each track.
    pub mu: Vec<Vec<f64>>,
    /// Component id of each track.
    pub track_component: Vec<usize>,
    /// Slot at the first angle reached by each track after one full turn.
    pub wrap_perm: Vec<usize>,
    pub components: Vec<FiberComponent>,
}

impl FiberReport {
    /// Component count `s`.
    pub fn count(&self) -> usize {
        self.components.len()
    }

    /// Rows `(θ, φ, component)` for plotting.
    pub fn rows(&self) -> Vec<(f64, f64, usize)> {
        let mut out = Vec::new();
        for (t, th) in self.thetas.iter().enumerate() {
            for (c, phi) in self.roots[t].iter().enumerate() {
                out.push((*th, *phi, self.track_component[c]));
            }
        }
        out
    }
}

fn mu_at(kernel: &NumericKernel, theta: f64, phi: f64) -> f64 {
    kernel.mu_raw(&to_point(&[theta, phi]))[0].re
}

/// Assigns each prediction its nearest root when the choice is clear.
fn match_roots(roots: &[f64], pred: &[f64], phis: &[f64]) -> Option<Vec<f64>> {
    if roots.len() != pred.len() {
        return None;
    }
    let mut used = vec![false; roots.len()];
    let mut out = Vec::with_capacity(pred.len());
    for (p, old) in pred.iter().zip(phis) {
        let mut ds: Vec<(f64, usize)> =
            roots.iter().enumerate().map(|(i, r)| (wrap(r - p).abs(), i)).collect();
        ds.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (best, idx) = ds[0];
        let second = ds.get(1).map(|d| d.0).unwrap_or(f64::INFINITY);
        if used[idx] || best > 0.25 * second {
            return None;
        }
        used[idx] = true;
        out.push(old + wrap(roots[idx] - old));
    }
    Some(out)
}

/// Matches the roots at `theta1` to tracks at `theta0` by first-order
/// prediction `φ' = −μ`, subdividing the step when a match is ambiguous.
fn advance(
    kernel: &NumericKernel,
    theta0: f64,
    phis: &[f64],
    theta1: f64,
    tol: f64,
    depth: usize,
) -> Result<Vec<f64>> {
    let h = theta1 - theta0;
    let pred: Vec<f64> = phis.iter().map(|&p| p - mu_at(kernel, theta0, p) * h).collect();
    let roots = kernel.torus_fiber(&[theta1], tol);
    if let Some(next) = match_roots(&roots, &pred, phis) {
        return Ok(next);
    }
    if depth == 0 {
        return Err(QrwError::TrackingAmbiguity(format!(
            "roots collide between θ = {theta0:.9} and θ = {theta1:.9}"
        )));
    }
    let mid = 0.5 * (theta0 + theta1);
    let m = advance(kernel, theta0, phis, mid, tol, depth - 1)?;
    advance(kernel, mid, &m, theta1, tol, depth - 1)
}

/// Tracks the unit-modulus `y`-roots around the circle `|x| = 1` and
/// groups them into closed loops.
pub fn torus_fibers(kernel: &NumericKernel, grid: usize, tol: &Tolerances) -> Result<FiberReport> {
    if kernel.d != 1 {
        return Err(QrwError::Dimension {
            expected: "1",
            got: kernel.d,
        });
    }
    let thetas = grid_angles(grid);
    let start = kernel.torus_fiber(&[thetas[0]], tol.unit_modulus);
    if start.is_empty() {
        return Err(QrwError::TrackingAmbiguity("no unit-modulus roots at the first grid angle".into()));
    }
    // Unwrapped angles along each track.
    let mut roots = vec![start.clone()];
    let mut cur = start.clone();
    for t in 1..=grid {
        let th1 = if t < grid { thetas[t] } else { thetas[0] + TAU };
        cur = advance(kernel, thetas[t - 1], &cur, th1, tol.unit_modulus, 16)?;
        if t < grid {
            roots.push(cur.clone());
        }
    }
    // cur now holds the tracks after one full turn; match to start slots.
    let n = start.len();
    let perm: Vec<usize> = cur
        .iter()
        .map(|p| {
            (0..n)
                .min_by(|&a, &b| wrap(start[a] - p).abs().total_cmp(&wrap(start[b] - p).abs()))
                .expect("nonempty")
        })
        .collect();
    let lap: Vec<f64> = (0..n).map(|c| cur[c] - start[c]).collect();
    let mu: Vec<Vec<f64>> = thetas
        .par_iter()
        .zip(roots.par_iter())
        .map(|(th, rs)| rs.iter().map(|p| mu_at(kernel, *th, *p)).collect())
        .collect();
    let mut track_component = vec![usize::MAX; n];
    let mut components = Vec::new();
    for c0 in 0..n {
        if track_component[c0] != usize::MAX {
            continue;
        }
        let id = components.len();
        let mut tracks = Vec::new();
        let mut c = c0;
        let mut total = 0.0;
        while track_component[c] == usize::MAX {
            track_component[c] = id;
            tracks.push(c);
            total += lap[c] + wrap(start[perm[c]] - cur[c]);
            c = perm[c];
        }
        if c != c0 {
            return Err(QrwError::TrackingAmbiguity("tracks do not close into loops".into()));
        }
        let (lo, hi) = tracks
            .iter()
            .flat_map(|&c| mu.iter().map(move |row| row[c]))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(v), h.max(v)));
        components.push(FiberComponent {
            id,
            degree: tracks.len(),
            y_winding: (total / TAU).round() as i64,
            mu_range: (lo, hi),
            tracks,
        });
    }
    for r in roots.iter_mut() {
        for p in r.iter_mut() {
            *p = wrap(*p);
        }
    }
    Ok(FiberReport {
        thetas,
        roots,
        mu,
        track_component,
        wrap_perm: perm,
        components,
    })
}

// ------------------------------------------------------------ smoothness

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SingularPoint {
    pub angles: Vec<f64>,
    pub q_abs: f64,
    pub grad_norm: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SmoothnessReport {
    /// Torus samples examined.
    pub samples: usize,
    /// Smallest `|∇Q|` over the samples.
    pub min_gradient: f64,
    /// Smallest `|∇Q|` after local refinement of the worst samples.
    pub refined_min_gradient: f64,
    /// Refined points where `Q` and `∇Q` vanish within tolerance.
    pub singular: Vec<SingularPoint>,
    /// Whether `Q` equals its squarefree part; `None` when not checked.
    pub squarefree: Option<bool>,
}

impl SmoothnessReport {
    pub fn smooth(&self) -> bool {
        self.singular.is_empty() && self.squarefree != Some(false)
    }
}

fn grad_norm(g: &[Complex64]) -> f64 {
    g.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Gauss–Newton on `(Q, ∇Q) = 0` in torus angles.
fn refine_singular(kernel: &NumericKernel, mut ang: Vec<f64>) -> (Vec<f64>, f64, f64) {
    let m = kernel.d + 1;
    for _ in 0..60 {
        let z = to_point(&ang);
        let q = kernel.eval(&z);
        let g = kernel.gradient(&z);
        let h = kernel.hessian(&z);
        // Residuals r_0 = Q, r_{1+b} = Q_b. ∂/∂θ_a = i z_a ∂/∂z_a.
        let mut res = vec![q];
        res.extend(g.iter().copied());
        let mut jac = vec![vec![Complex64::new(0.0, 0.0); m]; m + 1];
        for a in 0..m {
            jac[0][a] = I * z[a] * g[a];
            for b in 0..m {
                jac[1 + b][a] = I * z[a] * h[b][a];
            }
        }
        // Real normal equations.
        let mut jtj = vec![vec![0.0; m]; m];
        let mut jtr = vec![0.0; m];
        for row in 0..=m {
            for a in 0..m {
                jtr[a] += jac[row][a].re * res[row].re + jac[row][a].im * res[row].im;
                for b in 0..m {
                    jtj[a][b] += jac[row][a].re * jac[row][b].re + jac[row][a].im * jac[row][b].im;
                }
            }
        }
        let Some(step) = solve_small(jtj, jtr) else { break };
        let norm: f64 = step.iter().map(|s| s * s).sum::<f64>().sqrt();
        let scale = if norm > 0.1 { 0.1 / norm } else { 1.0 };
        for a in 0..m {
            ang[a] = wrap(ang[a] - scale * step[a]);
        }
        if norm < 1e-15 {
            break;
        }
    }
    let z = to_point(&ang);
    (ang.clone(), kernel.eval(&z).norm(), grad_norm(&kernel.gradient(&z)))
}

/// Gaussian elimination with partial pivoting for tiny dense systems.
pub(crate) fn solve_small(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[p][c].abs() < 1e-300 {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= f * a[c][k];
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

/// All torus samples `(angles, |∇Q|)` on a `grid^d` lattice of space
/// angles.
fn torus_samples(kernel: &NumericKernel, grid: usize, tol: f64) -> Vec<(Vec<f64>, f64)> {
    let th = grid_angles(grid);
    let cells: Vec<Vec<f64>> = match kernel.d {
        1 => th.iter().map(|a| vec![*a]).collect(),
        2 => th.iter().flat_map(|a| th.iter().map(move |b| vec![*a, *b])).collect(),
        _ => Vec::new(),
    };
    cells
        .par_iter()
        .flat_map_iter(|space| {
            kernel.torus_fiber(space, tol).into_iter().map(move |phi| {
                let mut ang = space.clone();
                ang.push(phi);
                let g = grad_norm(&kernel.gradient(&to_point(&ang)));
                (ang, g)
            })
        })
        .collect()
}

/// Scans `V₁` on a grid, refines the lowest-gradient samples and reports
/// singular points. `bundle` adds the exact squarefree check.
pub fn smoothness_probe(
    kernel: &NumericKernel,
    bundle: Option<&KernelBundle>,
    grid: usize,
    tol: &Tolerances,
) -> Result<SmoothnessReport> {
    if !(1..=2).contains(&kernel.d) {
        return Err(QrwError::Dimension {
            expected: "1 or 2",
            got: kernel.d,
        });
    }
    let mut samples = torus_samples(kernel, grid, tol.unit_modulus.max(1e-6));
    let count = samples.len();
    samples.sort_by(|a, b| a.1.total_cmp(&b.1));
    let min_gradient = samples.first().map(|s| s.1).unwrap_or(f64::INFINITY);
    let spacing = 3.0 * TAU / grid as f64;
    let mut seeds: Vec<Vec<f64>> = Vec::new();
    for (ang, _) in &samples {
        if seeds.len() >= 48 {
            break;
        }
        let far = seeds.iter().all(|s| {
            s.iter().zip(ang).map(|(a, b)| wrap(a - b).abs()).fold(0.0, f64::max) > spacing
        });
        if far {
            seeds.push(ang.clone());
        }
    }
    let refined: Vec<(Vec<f64>, f64, f64)> =
        seeds.into_par_iter().map(|s| refine_singular(kernel, s)).collect();
    let refined_min_gradient = refined.iter().map(|r| r.2).fold(min_gradient, f64::min);
    let mut singular: Vec<SingularPoint> = Vec::new();
    for (ang, q, g) in refined {
        if q < tol.singular_gradient && g < tol.singular_gradient {
            let dup = singular.iter().any(|s| {
                s.angles.iter().zip(&ang).map(|(a, b)| wrap(a - b).abs()).fold(0.0, f64::max) < 1e-6
            });
            if !dup {
                singular.push(SingularPoint {
                    angles: ang,
                    q_abs: q,
                    grad_norm: g,
                });
            }
        }
    }
    let squarefree = bundle.map(|b| {
        qrw_poly::squarefree(&b.q, SqfScope::All).is_scalar_multiple_of(&b.q)
    });
    Ok(SmoothnessReport {
        samples: count,
        min_gradient,
        refined_min_gradient,
        singular,
        squarefree,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::kernel::build_kernel;

    #[test]
    fn deterministic_fibers_and_singularity() {
        let b = build_kernel(&fixtures::deterministic()).unwrap();
        let k = NumericKernel::from_bundle(&b);
        let tol = Tolerances::default();
        let f = torus_fibers(&k, 256, &tol).unwrap();
        assert_eq!(f.count(), 2);
        assert!(f.components.iter().all(|c| c.degree == 1));
        let s = smoothness_probe(&k, Some(&b), 256, &tol).unwrap();
        assert!(!s.smooth());
        let p = &s.singular[0];
        assert!(p.angles.iter().all(|a| a.abs() < 1e-6), "{p:?}");
    }

    #[test]
    fn running_fibers() {
        let b = build_kernel(&fixtures::running_example()).unwrap();
        let k = NumericKernel::from_bundle(&b);
        let f = torus_fibers(&k, 512, &Tolerances::default()).unwrap();
        assert_eq!(f.count(), 2);
        for c in &f.components {
            assert_eq!((c.degree, c.y_winding), (2, -1));
        }
    }
}
