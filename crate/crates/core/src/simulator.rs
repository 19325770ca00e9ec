//! Time evolution of the walk, exact or in floating point.
//!
//! Exact amplitudes are stored as Gaussian-integer numerators over one
//! shared denominator `D^n`, where `D` is the least common denominator of
//! the coin entries. One step multiplies the denominator by `D` and the
//! numerators by the integer matrix `D·U`, so no gcds are ever taken.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use qrw_poly::{ratio_to_f64, ExactScalar};
use rayon::prelude::*;

use crate::error::{QrwError, Result};
use crate::walkmodel::{common_denominator, CoinMatrix, WalkSpec};

const MAX_D: usize = 3;
type Point = [i64; MAX_D];

fn point(r: &[i64]) -> Point {
    assert!(r.len() <= MAX_D, "at most {MAX_D} dimensions");
    let mut p = [0; MAX_D];
    p[..r.len()].copy_from_slice(r);
    p
}

fn add(a: &Point, b: &Point) -> Point {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn sub(a: &Point, b: &Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

/// Numeric backend for simulation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    Exact,
    Float,
}

impl std::str::FromStr for Backend {
    type Err = QrwError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Backend::Exact),
            "float" => Ok(Backend::Float),
            _ => Err(QrwError::Config(format!("unknown mode {s:?}"))),
        }
    }
}

/// Resource limits for evolution.
#[derive(Clone, Copy, Debug)]
pub struct SimConfig {
    /// Largest number of stored amplitudes (sites × chiralities).
    pub max_amplitudes: usize,
    /// Largest estimated size of exact numerators, in bytes.
    pub max_exact_bytes: u64,
    /// Switch to floating point instead of failing when the exact budget
    /// runs out.
    pub float_fallback: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            max_amplitudes: 200_000_000,
            max_exact_bytes: 4 << 30,
            float_fallback: false,
        }
    }
}

#[derive(Clone, Debug)]
enum Layout {
    /// Contiguous interval `[lo, lo + len)` of a 1-D lattice.
    Line { lo: i64, len: usize },
    /// Arbitrary finite site set, kept sorted for deterministic output.
    Sparse {
        pts: Vec<Point>,
        index: HashMap<Point, usize>,
    },
}

impl Layout {
    fn len(&self) -> usize {
        match self {
            Layout::Line { len, .. } => *len,
            Layout::Sparse { pts, .. } => pts.len(),
        }
    }

    fn point(&self, s: usize) -> Point {
        match self {
            Layout::Line { lo, .. } => [lo + s as i64, 0, 0],
            Layout::Sparse { pts, .. } => pts[s],
        }
    }

    fn find(&self, p: &Point) -> Option<usize> {
        match self {
            Layout::Line { lo, len } => {
                let off = p[0] - lo;
                (off >= 0 && (off as usize) < *len).then_some(off as usize)
            }
            Layout::Sparse { index, .. } => index.get(p).copied(),
        }
    }

    fn sparse(mut pts: Vec<Point>) -> Layout {
        pts.sort_unstable();
        pts.dedup();
        let index = pts.iter().enumerate().map(|(i, p)| (*p, i)).collect();
        Layout::Sparse { pts, index }
    }

    fn grow(&self, steps: &[Point]) -> Layout {
        match self {
            Layout::Line { lo, len } => {
                let mn = steps.iter().map(|s| s[0]).min().unwrap_or(0);
                let mx = steps.iter().map(|s| s[0]).max().unwrap_or(0);
                Layout::Line {
                    lo: lo + mn,
                    len: len + (mx - mn) as usize,
                }
            }
            Layout::Sparse { pts, .. } => {
                let mut next = Vec::with_capacity(pts.len() * 2);
                for p in pts {
                    for s in steps {
                        next.push(add(p, s));
                    }
                }
                Layout::sparse(next)
            }
        }
    }
}

#[derive(Clone, Debug)]
enum Values {
    Float(Vec<Complex64>),
    /// Amplitude = (re + i·im) / denom; `im` is absent for real evolutions.
    Exact {
        re: Vec<BigInt>,
        im: Option<Vec<BigInt>>,
        denom: BigInt,
    },
}

/// Amplitudes of all `(site, chirality)` pairs at one time.
#[derive(Clone, Debug)]
pub struct AmplitudeField {
    pub d: usize,
    pub k: usize,
    /// Time step.
    pub n: usize,
    /// Chirality of the initial elementary state, when there is one.
    pub origin: Option<usize>,
    /// Set once an exact evolution has switched to floating point.
    pub fell_back: bool,
    layout: Layout,
    values: Values,
}

/// Coin prepared for repeated application.
enum Prepared {
    Float(Vec<Vec<Complex64>>),
    Exact {
        re: Vec<Vec<BigInt>>,
        im: Option<Vec<Vec<BigInt>>>,
        scale: BigInt,
    },
}

fn prepare(coin: &CoinMatrix, backend: Backend) -> Prepared {
    match (coin, backend) {
        (CoinMatrix::Exact(m), Backend::Exact) => {
            let den = common_denominator(m);
            let to_int = |r: &BigRational| (r * BigRational::from_integer(den.clone())).to_integer();
            let re = m.iter().map(|r| r.iter().map(|e| to_int(&e.re)).collect()).collect();
            let real = m.iter().flatten().all(|e| e.is_real());
            let im = (!real).then(|| m.iter().map(|r| r.iter().map(|e| to_int(&e.im)).collect()).collect());
            Prepared::Exact { re, im, scale: den }
        }
        _ => Prepared::Float(coin.to_complex()),
    }
}

impl AmplitudeField {
    /// Elementary state `(0, i)` at time zero.
    pub fn elementary(spec: &WalkSpec, i: usize, backend: Backend) -> Result<Self> {
        if i >= spec.k {
            return Err(QrwError::Config(format!(
                "chirality {} out of range 1..={}",
                i + 1,
                spec.k
            )));
        }
        let zero = vec![0i64; spec.d];
        let mut f = match backend {
            Backend::Exact => Self::from_exact(spec, &[(zero, i, ExactScalar::one())])?,
            Backend::Float => Self::from_float(spec, &[(zero, i, Complex64::new(1.0, 0.0))]),
        };
        f.origin = Some(i);
        Ok(f)
    }

    fn initial_layout(d: usize, pts: Vec<Point>) -> Layout {
        if d == 1 {
            let lo = pts.iter().map(|p| p[0]).min().unwrap_or(0);
            let hi = pts.iter().map(|p| p[0]).max().unwrap_or(0);
            Layout::Line {
                lo,
                len: (hi - lo + 1) as usize,
            }
        } else {
            Layout::sparse(pts)
        }
    }

    /// Arbitrary exact initial state (not necessarily normalised).
    pub fn from_exact(spec: &WalkSpec, state: &[(Vec<i64>, usize, ExactScalar)]) -> Result<Self> {
        if spec.d > MAX_D {
            return Err(QrwError::Dimension {
                expected: "at most 3",
                got: spec.d,
            });
        }
        let layout = Self::initial_layout(spec.d, state.iter().map(|(r, _, _)| point(r)).collect());
        let k = spec.k;
        let den = state.iter().fold(BigInt::one(), |acc, (_, _, a)| {
            acc.lcm(a.re.denom()).lcm(a.im.denom())
        });
        let mut re = vec![BigInt::zero(); layout.len() * k];
        let mut im = vec![BigInt::zero(); layout.len() * k];
        let dr = BigRational::from_integer(den.clone());
        for (r, j, a) in state {
            let s = layout.find(&point(r)).expect("laid out") * k + j;
            re[s] += (&a.re * &dr).to_integer();
            im[s] += (&a.im * &dr).to_integer();
        }
        let real = im.iter().all(|v| v.is_zero());
        Ok(Self {
            d: spec.d,
            k,
            n: 0,
            origin: None,
            fell_back: false,
            layout,
            values: Values::Exact {
                re,
                im: (!real).then_some(im),
                denom: den,
            },
        })
    }

    /// Arbitrary floating initial state.
    pub fn from_float(spec: &WalkSpec, state: &[(Vec<i64>, usize, Complex64)]) -> Self {
        let layout = Self::initial_layout(spec.d, state.iter().map(|(r, _, _)| point(r)).collect());
        let k = spec.k;
        let mut v = vec![Complex64::new(0.0, 0.0); layout.len() * k];
        for (r, j, a) in state {
            v[layout.find(&point(r)).expect("laid out") * k + j] += a;
        }
        Self {
            d: spec.d,
            k,
            n: 0,
            origin: None,
            fell_back: false,
            layout,
            values: Values::Float(v),
        }
    }

    pub fn backend(&self) -> Backend {
        match self.values {
            Values::Float(_) => Backend::Float,
            Values::Exact { .. } => Backend::Exact,
        }
    }

    /// Number of stored lattice sites.
    pub fn num_sites(&self) -> usize {
        self.layout.len()
    }

    /// Site coordinates in storage order.
    pub fn sites(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        (0..self.layout.len()).map(move |s| self.layout.point(s)[..self.d].to_vec())
    }

    fn slot(&self, r: &[i64], j: usize) -> Option<usize> {
        assert_eq!(r.len(), self.d);
        assert!(j < self.k);
        self.layout.find(&point(r)).map(|s| s * self.k + j)
    }

    fn value_at(&self, idx: usize) -> Complex64 {
        match &self.values {
            Values::Float(v) => v[idx],
            Values::Exact { re, im, denom } => {
                let r = frac_f64(&re[idx], denom);
                let i = im.as_ref().map(|im| frac_f64(&im[idx], denom)).unwrap_or(0.0);
                Complex64::new(r, i)
            }
        }
    }

    /// Amplitude at `(r, j)` (0-based chirality), zero off the support.
    pub fn amplitude(&self, r: &[i64], j: usize) -> Complex64 {
        self.slot(r, j)
            .map(|i| self.value_at(i))
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Exact amplitude, or `None` for floating fields.
    pub fn amplitude_exact(&self, r: &[i64], j: usize) -> Option<ExactScalar> {
        let Values::Exact { re, im, denom } = &self.values else {
            return None;
        };
        let Some(i) = self.slot(r, j) else {
            return Some(ExactScalar::zero());
        };
        let re_q = BigRational::new(re[i].clone(), denom.clone());
        let im_q = im
            .as_ref()
            .map(|im| BigRational::new(im[i].clone(), denom.clone()))
            .unwrap_or_else(BigRational::zero);
        Some(ExactScalar::new(re_q, im_q))
    }

    /// `|a(r, j)|²` for every stored site, for one chirality.
    pub fn probabilities(&self, j: usize) -> Vec<f64> {
        let k = self.k;
        match &self.values {
            Values::Float(v) => (0..self.layout.len()).map(|s| v[s * k + j].norm_sqr()).collect(),
            Values::Exact { re, im, denom } => {
                let d2 = denom * denom;
                (0..self.layout.len())
                    .into_par_iter()
                    .map(|s| {
                        let i = s * k + j;
                        let mut n2 = &re[i] * &re[i];
                        if let Some(im) = im {
                            n2 += &im[i] * &im[i];
                        }
                        frac_f64(&n2, &d2)
                    })
                    .collect()
            }
        }
    }

    /// Total probability `Σ |a|²`.
    pub fn norm_sqr(&self) -> f64 {
        match &self.values {
            Values::Float(v) => v.iter().map(|c| c.norm_sqr()).sum(),
            Values::Exact { .. } => ratio_to_f64(&self.norm_sqr_exact().expect("exact")),
        }
    }

    /// Exact total probability, or `None` for floating fields.
    pub fn norm_sqr_exact(&self) -> Option<BigRational> {
        let Values::Exact { re, im, denom } = &self.values else {
            return None;
        };
        let mut s: BigInt = re.par_iter().map(|v| v * v).sum();
        if let Some(im) = im {
            s += im.par_iter().map(|v| v * v).sum::<BigInt>();
        }
        Some(BigRational::new(s, denom * denom))
    }

    /// Sites carrying a nonzero amplitude in some chirality.
    pub fn support(&self) -> Vec<Vec<i64>> {
        let k = self.k;
        (0..self.layout.len())
            .filter(|&s| match &self.values {
                Values::Float(v) => (0..k).any(|j| v[s * k + j] != Complex64::new(0.0, 0.0)),
                Values::Exact { re, im, .. } => (0..k).any(|j| {
                    !re[s * k + j].is_zero() || im.as_ref().is_some_and(|im| !im[s * k + j].is_zero())
                }),
            })
            .map(|s| self.layout.point(s)[..self.d].to_vec())
            .collect()
    }

    /// Floating copy of the field.
    pub fn to_float(&self) -> AmplitudeField {
        let v = (0..self.layout.len() * self.k).map(|i| self.value_at(i)).collect();
        AmplitudeField {
            values: Values::Float(v),
            ..self.clone()
        }
    }

    fn exact_bytes(&self) -> u64 {
        match &self.values {
            Values::Float(_) => 0,
            Values::Exact { denom, im, .. } => {
                let per = denom.bits() / 8 + 16;
                let mult = if im.is_some() { 2 } else { 1 };
                per * mult * (self.layout.len() * self.k) as u64
            }
        }
    }
}

/// Applies one step `S = T·(I ⊗ U)` to the field.
pub fn step(field: &AmplitudeField, spec: &WalkSpec) -> AmplitudeField {
    let prepared = prepare(&spec.coin, field.backend());
    step_prepared(field, spec, &prepared)
}

fn step_prepared(field: &AmplitudeField, spec: &WalkSpec, coin: &Prepared) -> AmplitudeField {
    let k = spec.k;
    let steps: Vec<Point> = spec.steps.iter().map(|s| point(s)).collect();
    let layout = field.layout.grow(&steps);
    let old = &field.layout;
    // Gather: the new amplitude at (p, i) reads chiralities of site p − v_i.
    let sources: Vec<Vec<Option<usize>>> = (0..layout.len())
        .into_par_iter()
        .map(|s| {
            let p = layout.point(s);
            steps.iter().map(|v| old.find(&sub(&p, v))).collect()
        })
        .collect();
    let values = match (&field.values, coin) {
        (Values::Float(v), Prepared::Float(u)) => {
            let mut out = vec![Complex64::new(0.0, 0.0); layout.len() * k];
            out.par_chunks_mut(k).zip(sources.par_iter()).for_each(|(chunk, src)| {
                for (i, slot) in chunk.iter_mut().enumerate() {
                    if let Some(o) = src[i] {
                        let base = o * k;
                        let mut acc = Complex64::new(0.0, 0.0);
                        for j in 0..k {
                            acc += u[i][j] * v[base + j];
                        }
                        *slot = acc;
                    }
                }
            });
            Values::Float(out)
        }
        (Values::Exact { re, im, denom }, Prepared::Exact { re: ure, im: uim, scale }) => {
            let n = layout.len() * k;
            let complex = im.is_some() || uim.is_some();
            let mut out_re = vec![BigInt::zero(); n];
            let mut out_im = if complex { vec![BigInt::zero(); n] } else { Vec::new() };
            let gather = |s: usize, i: usize| -> (BigInt, BigInt) {
                let mut ar = BigInt::zero();
                let mut ai = BigInt::zero();
                if let Some(o) = sources[s][i] {
                    let base = o * k;
                    for j in 0..k {
                        let (xr, xi) = (&re[base + j], im.as_ref().map(|v| &v[base + j]));
                        let cr = &ure[i][j];
                        if !cr.is_zero() && !xr.is_zero() {
                            ar += cr * xr;
                        }
                        if let Some(xi) = xi {
                            if !cr.is_zero() && !xi.is_zero() {
                                ai += cr * xi;
                            }
                        }
                        if let Some(uim) = uim {
                            let ci = &uim[i][j];
                            if !ci.is_zero() {
                                ai += ci * xr;
                                if let Some(xi) = xi {
                                    ar -= ci * xi;
                                }
                            }
                        }
                    }
                }
                (ar, ai)
            };
            if complex {
                out_re
                    .par_chunks_mut(k)
                    .zip(out_im.par_chunks_mut(k))
                    .enumerate()
                    .for_each(|(s, (cr, ci))| {
                        for i in 0..k {
                            let (a, b) = gather(s, i);
                            cr[i] = a;
                            ci[i] = b;
                        }
                    });
            } else {
                out_re.par_chunks_mut(k).enumerate().for_each(|(s, cr)| {
                    for (i, slot) in cr.iter_mut().enumerate() {
                        *slot = gather(s, i).0;
                    }
                });
            }
            Values::Exact {
                re: out_re,
                im: complex.then_some(out_im),
                denom: denom * scale,
            }
        }
        _ => unreachable!("coin prepared for the field's backend"),
    };
    AmplitudeField {
        d: field.d,
        k,
        n: field.n + 1,
        origin: field.origin,
        fell_back: field.fell_back,
        layout,
        values,
    }
}

/// Evolves `field` for `steps` more steps, calling `visit` after each one.
pub fn evolve_from<F>(
    mut field: AmplitudeField,
    spec: &WalkSpec,
    steps: usize,
    cfg: &SimConfig,
    mut visit: F,
) -> Result<AmplitudeField>
where
    F: FnMut(&AmplitudeField),
{
    let mut prepared = prepare(&spec.coin, field.backend());
    for _ in 0..steps {
        let next_sites = estimate_sites(&field, spec);
        if next_sites.saturating_mul(spec.k) > cfg.max_amplitudes {
            return Err(QrwError::ResourceGuard(format!(
                "{next_sites} sites x {} chiralities exceeds the amplitude cap {}",
                spec.k, cfg.max_amplitudes
            )));
        }
        if field.exact_bytes() > cfg.max_exact_bytes {
            if cfg.float_fallback {
                field = field.to_float();
                field.fell_back = true;
                prepared = prepare(&spec.coin, Backend::Float);
            } else {
                return Err(QrwError::ResourceGuard(format!(
                    "exact amplitudes need about {} bytes at n = {}, over the cap {}",
                    field.exact_bytes(),
                    field.n,
                    cfg.max_exact_bytes
                )));
            }
        }
        field = step_prepared(&field, spec, &prepared);
        visit(&field);
    }
    Ok(field)
}

fn estimate_sites(field: &AmplitudeField, spec: &WalkSpec) -> usize {
    match &field.layout {
        Layout::Line { len, .. } => {
            let (mn, mx) = spec.step_range(0);
            len + (mx - mn) as usize
        }
        Layout::Sparse { pts, .. } => pts.len().saturating_mul(spec.k).min(usize::MAX / 2),
    }
}

/// Evolves the elementary state `(0, i)` for `n` steps.
pub fn evolve(spec: &WalkSpec, i: usize, n: usize, backend: Backend) -> Result<AmplitudeField> {
    evolve_with(spec, i, n, backend, &SimConfig::default())
}

pub fn evolve_with(
    spec: &WalkSpec,
    i: usize,
    n: usize,
    backend: Backend,
    cfg: &SimConfig,
) -> Result<AmplitudeField> {
    let start = AmplitudeField::elementary(spec, i, backend)?;
    evolve_from(start, spec, n, cfg, |_| {})
}

/// `|a(i, j, n, r)|²` over every stored site.
#[derive(Clone, Debug)]
pub struct ProfileSlice {
    pub n: usize,
    pub i: Option<usize>,
    pub j: usize,
    pub points: Vec<(Vec<i64>, f64)>,
}

pub fn profile(field: &AmplitudeField, j: usize) -> ProfileSlice {
    let probs = field.probabilities(j);
    ProfileSlice {
        n: field.n,
        i: field.origin,
        j,
        points: field.sites().zip(probs).collect(),
    }
}

/// Mean and standard deviation of `r/n` under the slice's renormalised
/// probability measure, per coordinate.
#[derive(Clone, Debug, PartialEq)]
pub struct BallisticStats {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

pub fn ballistic_stats(slice: &ProfileSlice) -> Result<BallisticStats> {
    let total: f64 = slice.points.iter().map(|(_, p)| p).sum();
    if slice.n == 0 || total <= 0.0 {
        return Err(QrwError::EmptyProfile);
    }
    let d = slice.points.first().map(|(r, _)| r.len()).unwrap_or(0);
    let n = slice.n as f64;
    let mut mean = vec![0.0; d];
    let mut sq = vec![0.0; d];
    for (r, p) in &slice.points {
        for a in 0..d {
            let v = r[a] as f64 / n;
            mean[a] += p * v;
            sq[a] += p * v * v;
        }
    }
    for a in 0..d {
        mean[a] /= total;
        sq[a] /= total;
    }
    let std = (0..d).map(|a| (sq[a] - mean[a] * mean[a]).max(0.0).sqrt()).collect();
    Ok(BallisticStats { mean, std })
}

/// Classical control: the Markov chain with transition weights `|U_ij|²`
/// run through the same gather step, in probability space.
pub fn classical_profile(spec: &WalkSpec, i: usize, j: usize, n: usize) -> Result<ProfileSlice> {
    if spec.d != 1 {
        return Err(QrwError::Dimension {
            expected: "1",
            got: spec.d,
        });
    }
    let k = spec.k;
    let u = spec.coin.to_complex();
    let t: Vec<Vec<f64>> = u.iter().map(|r| r.iter().map(|c| c.norm_sqr()).collect()).collect();
    let (mn, mx) = spec.step_range(0);
    let mut lo = 0i64;
    let mut p = vec![0.0; k];
    p[i] = 1.0;
    for _ in 0..n {
        let len = p.len() / k;
        let new_len = len + (mx - mn) as usize;
        let new_lo = lo + mn;
        let mut q = vec![0.0; new_len * k];
        q.par_chunks_mut(k).enumerate().for_each(|(s, chunk)| {
            let site = new_lo + s as i64;
            for (a, slot) in chunk.iter_mut().enumerate() {
                let src = site - spec.steps[a][0] - lo;
                if src >= 0 && (src as usize) < len {
                    let base = src as usize * k;
                    *slot = (0..k).map(|b| t[a][b] * p[base + b]).sum();
                }
            }
        });
        p = q;
        lo = new_lo;
    }
    let sites = p.len() / k;
    Ok(ProfileSlice {
        n,
        i: Some(i),
        j,
        points: (0..sites).map(|s| (vec![lo + s as i64], p[s * k + j])).collect(),
    })
}

/// Peak heights in a rescaled window at two times.
#[derive(Clone, Debug, PartialEq)]
pub struct PeakScaling {
    pub h1: f64,
    pub h2: f64,
    pub exponent: f64,
}

/// Largest `|a(i,j,n,r)|²` with `|r/n − θ| ≤ window`, at `n1` and `n2`,
/// and the fitted exponent `log(h2/h1)/log(n2/n1)`.
#[allow(clippy::too_many_arguments)]
pub fn peak_scaling(
    spec: &WalkSpec,
    i: usize,
    j: usize,
    theta: f64,
    n1: usize,
    n2: usize,
    window: f64,
    backend: Backend,
) -> Result<PeakScaling> {
    let hs = peak_heights(spec, i, j, &[theta], &[n1, n2], window, backend)?;
    let (h1, h2) = (hs[0][0], hs[0][1]);
    Ok(PeakScaling {
        h1,
        h2,
        exponent: (h2 / h1).ln() / (n2 as f64 / n1 as f64).ln(),
    })
}

/// Window maxima for several directions and times from one evolution:
/// `out[θ][t]`.
pub fn peak_heights(
    spec: &WalkSpec,
    i: usize,
    j: usize,
    thetas: &[f64],
    times: &[usize],
    window: f64,
    backend: Backend,
) -> Result<Vec<Vec<f64>>> {
    if spec.d != 1 {
        return Err(QrwError::Dimension {
            expected: "1",
            got: spec.d,
        });
    }
    if window <= 0.0 || times.windows(2).any(|w| w[0] >= w[1]) || times.is_empty() {
        return Err(QrwError::Config("need window > 0 and increasing times".into()));
    }
    let mut out = vec![vec![f64::NAN; times.len()]; thetas.len()];
    let capture = |f: &AmplitudeField, out: &mut Vec<Vec<f64>>| -> Result<()> {
        if let Some(t) = times.iter().position(|&t| t == f.n) {
            let probs = f.probabilities(j);
            let n = f.n as f64;
            for (a, &th) in thetas.iter().enumerate() {
                let best = f
                    .sites()
                    .zip(&probs)
                    .filter(|(r, _)| (r[0] as f64 / n - th).abs() <= window)
                    .map(|(_, &p)| p)
                    .fold(None, |m: Option<f64>, p| Some(m.map_or(p, |m| m.max(p))));
                out[a][t] = best.ok_or(QrwError::EmptyWindow)?;
            }
        }
        Ok(())
    };
    let start = AmplitudeField::elementary(spec, i, backend)?;
    let mut err = None;
    evolve_from(start, spec, *times.last().expect("nonempty"), &SimConfig::default(), |f| {
        if err.is_none() {
            if let Err(e) = capture(f, &mut out) {
                err = Some(e);
            }
        }
    })?;
    if let Some(e) = err {
        return Err(e);
    }
    Ok(out)
}

/// The values `m^d·|a(i, j, m, r)|²` over the window of times
/// `m ∈ [n, n + M)` and sites `r` in the side-`M` box starting at
/// `⌊direction·m⌋ − M/2`.
pub fn window_distribution(
    spec: &WalkSpec,
    i: usize,
    j: usize,
    direction: &[f64],
    n: usize,
    m: usize,
    backend: Backend,
) -> Result<Vec<f64>> {
    if direction.len() != spec.d {
        return Err(QrwError::Config("direction has the wrong dimension".into()));
    }
    let d = spec.d;
    let mut values = Vec::with_capacity(m.pow(d as u32 + 1));
    let mut collect = |f: &AmplitudeField| {
        if f.n < n || f.n >= n + m {
            return;
        }
        let scale = (f.n as f64).powi(d as i32);
        let base: Vec<i64> = direction
            .iter()
            .map(|c| (c * f.n as f64).floor() as i64 - (m / 2) as i64)
            .collect();
        let mut idx = vec![0usize; d];
        loop {
            let r: Vec<i64> = (0..d).map(|a| base[a] + idx[a] as i64).collect();
            values.push(scale * f.amplitude(&r, j).norm_sqr());
            let mut a = 0;
            while a < d {
                idx[a] += 1;
                if idx[a] < m {
                    break;
                }
                idx[a] = 0;
                a += 1;
            }
            if a == d {
                break;
            }
        }
    };
    let start = AmplitudeField::elementary(spec, i, backend)?;
    if n == 0 {
        collect(&start);
    }
    evolve_from(start, spec, n + m - 1, &SimConfig::default(), |f| collect(f))?;
    Ok(values)
}

/// `num/den` as a float without reducing the fraction.
fn frac_f64(num: &BigInt, den: &BigInt) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    let shift = 60 - (num.bits() as i64 - den.bits() as i64);
    let q = if shift >= 0 {
        (num << shift as usize) / den
    } else {
        num / (den << (-shift) as usize)
    };
    q.to_f64().unwrap_or(f64::NAN) * 2f64.powi(-shift as i32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn hadamard_one_step_convention() {
        let h = fixtures::hadamard();
        let f = evolve(&h, 0, 1, Backend::Float).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        // From (0, chirality 1): U_11 stays at 0, U_21 moves to r = 1.
        assert!((f.amplitude(&[0], 0).re - s).abs() < 1e-15);
        assert!((f.amplitude(&[1], 1).re - s).abs() < 1e-15);
        assert_eq!(f.amplitude(&[1], 0).norm(), 0.0);
        assert_eq!(f.amplitude(&[0], 1).norm(), 0.0);
    }

    #[test]
    fn exact_norm_is_one() {
        let spec = fixtures::running_example();
        let f = evolve(&spec, 0, 40, Backend::Exact).unwrap();
        assert_eq!(f.norm_sqr_exact().unwrap(), BigRational::one());
    }

    #[test]
    fn deterministic_walk_is_a_point_mass() {
        let spec = fixtures::deterministic();
        let f = evolve(&spec, 1, 7, Backend::Exact).unwrap();
        assert_eq!(f.amplitude_exact(&[7], 1).unwrap(), ExactScalar::one());
        let st = ballistic_stats(&profile(&f, 1)).unwrap();
        assert_eq!(st.mean, vec![1.0]);
        assert_eq!(st.std, vec![0.0]);
    }

    #[test]
    fn two_dimensional_support() {
        let spec = fixtures::u2();
        let f = evolve(&spec, 0, 5, Backend::Exact).unwrap();
        assert_eq!(f.norm_sqr_exact().unwrap(), BigRational::one());
        for r in f.support() {
            assert!((0..=5).contains(&r[0]) && (0..=5).contains(&r[1]));
        }
    }
}
