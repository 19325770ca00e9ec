//! Generating-function kernel of a walk.
//!
//! With `A = I − y·M(x)·U`, `M(x) = diag(x^v_i)`, the series
//! `Σ a(i,j,n,r) x^r y^n` equals `(A⁻¹)_ji`. Negative steps make `A` a
//! Laurent matrix, so every row is multiplied by `x^s` with `s` the largest
//! negative step per axis, and the common monomial factor of the resulting
//! determinant and cofactors is stripped. The bundle stores
//!
//! * `Q = x^c · det A` and
//! * `P_ij = x^c · cof_ij(A)`,
//!
//! with the same monomial `x^c`, so `F_ij = P_ij / Q` and `Q(x, 0) = x^c`.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use qrw_poly::exchange::PolyJson;
use qrw_poly::resultant::{cofactors, poly_det};
use qrw_poly::{vars, ExactScalar, Mono, MultiPoly, QPoly, SqfScope, Vars};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{QrwError, Result};
use crate::simulator::{evolve, Backend};
use crate::walkmodel::{SpecJson, WalkSpec};

/// Variable names: space coordinates first, time last.
pub fn var_names(d: usize) -> Vec<&'static str> {
    match d {
        1 => vec!["x", "y"],
        2 => vec!["x", "y", "z"],
        3 => vec!["x", "y", "z", "w"],
        _ => panic!("dimension {d} not supported"),
    }
}

#[derive(Clone, Debug)]
pub struct KernelBundle {
    pub spec: WalkSpec,
    pub vars: Vars,
    /// `Q = x^c det(I − yM(x)U)`.
    pub q: QPoly,
    /// `p[i][j]` is the numerator of the series from chirality `i` to `j`.
    pub p: Vec<Vec<QPoly>>,
    /// The exponent vector `c`: `Q(x, 0) = x^c`.
    pub shift: Vec<u32>,
}

/// Per-axis row multiplier making every entry of `A` polynomial.
fn row_shift(spec: &WalkSpec) -> Vec<u32> {
    (0..spec.d)
        .map(|a| spec.step_range(a).0.min(0).unsigned_abs() as u32)
        .collect()
}

/// Kernel polynomials over any coefficient ring. Returns `(Q, P, c)`.
pub(crate) fn kernel_polys<C: qrw_poly::Coeff>(
    spec: &WalkSpec,
    coin: &[Vec<C>],
) -> (MultiPoly<C>, Vec<Vec<MultiPoly<C>>>, Vec<u32>) {
    let d = spec.d;
    let k = spec.k;
    let v = vars(&var_names(d));
    let s = row_shift(spec);
    let mono = |extra: &[i64], t: u32| {
        let mut e: Vec<u32> = (0..d).map(|a| (s[a] as i64 + extra[a]) as u32).collect();
        e.push(t);
        Mono::from_exps(&e)
    };
    let zero = vec![0i64; d];
    // B = diag(x^s) · (I − y M(x) U).
    let b: Vec<Vec<MultiPoly<C>>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    let mut terms: Vec<(Vec<u32>, C)> = Vec::new();
                    if i == j {
                        terms.push((mono(&zero, 0).exps(d + 1), C::one()));
                    }
                    if !coin[i][j].is_zero() {
                        terms.push((mono(&spec.steps[i], 1).exps(d + 1), coin[i][j].neg_ref()));
                    }
                    MultiPoly::from_terms(v.clone(), terms)
                })
                .collect()
        })
        .collect();
    let det = poly_det(&b);
    let xs = MultiPoly::monomial(v.clone(), &mono(&zero, 0).exps(d + 1), C::one());
    let cof: Vec<Vec<MultiPoly<C>>> = cofactors(&b)
        .into_iter()
        .map(|row| row.into_iter().map(|c| c.mul(&xs)).collect())
        .collect();
    let mut content = det.monomial_content();
    for c in cof.iter().flatten().filter(|c| !c.is_zero()) {
        content = content.gcd(c.monomial_content(), d + 1);
    }
    let q = det.div_monomial(content);
    let p = cof
        .into_iter()
        .map(|row| row.into_iter().map(|c| c.div_monomial(content)).collect())
        .collect();
    let shift = q
        .to_univariate(d)
        .first()
        .and_then(|c0| c0.leading().map(|(m, _)| m.exps(d + 1)[..d].to_vec()))
        .unwrap_or_else(|| vec![0; d]);
    (q, p, shift)
}

/// Builds `Q` and every `P_ij` exactly. Needs a real rational coin.
pub fn build_kernel(spec: &WalkSpec) -> Result<KernelBundle> {
    let coin = spec.coin.real_rational()?;
    let (q, p, shift) = kernel_polys(spec, &coin);
    Ok(KernelBundle {
        spec: spec.clone(),
        vars: q.vars().clone(),
        q,
        p,
        shift,
    })
}

#[derive(Serialize, Deserialize)]
struct BundleJson {
    spec: SpecJson,
    spec_id: String,
    vars: Vec<String>,
    shift: Vec<u32>,
    q: PolyJson,
    p: Vec<Vec<PolyJson>>,
}

impl KernelBundle {
    pub fn d(&self) -> usize {
        self.spec.d
    }

    /// Index of the time variable.
    pub fn time_var(&self) -> usize {
        self.spec.d
    }

    /// Human-readable statement of the normalisation.
    pub fn normalization_note(&self) -> String {
        let mono: Vec<String> = self
            .shift
            .iter()
            .zip(self.vars.iter())
            .filter(|(e, _)| **e > 0)
            .map(|(e, v)| if *e == 1 { v.clone() } else { format!("{v}^{e}") })
            .collect();
        let lead = if mono.is_empty() { "1".to_string() } else { mono.join("*") };
        format!(
            "Q = {lead} * det(I - {t} M U); constant term in {t} is {lead}",
            t = self.vars[self.spec.d]
        )
    }

    pub fn to_json(&self) -> String {
        let j = BundleJson {
            spec: SpecJson::from(&self.spec),
            spec_id: self.spec.id(),
            vars: self.vars.to_vec(),
            shift: self.shift.clone(),
            q: PolyJson::from(&self.q),
            p: self.p.iter().map(|r| r.iter().map(PolyJson::from).collect()).collect(),
        };
        serde_json::to_string_pretty(&j).expect("serialisable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: BundleJson = serde_json::from_str(s)?;
        let spec = WalkSpec::try_from(j.spec)?;
        if spec.id() != j.spec_id {
            return Err(QrwError::SpecMismatch(spec.id(), j.spec_id));
        }
        let q = QPoly::try_from(&j.q)?;
        let p = j
            .p
            .iter()
            .map(|r| r.iter().map(QPoly::try_from).collect::<std::result::Result<Vec<_>, _>>())
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(Self {
            vars: q.vars().clone(),
            spec,
            q,
            p,
            shift: j.shift,
        })
    }

    /// `Q` is squarefree up to a constant factor.
    pub fn q_is_squarefree(&self) -> bool {
        qrw_poly::squarefree(&self.q, SqfScope::All).is_scalar_multiple_of(&self.q)
    }

    /// Checks `Pᵀ·A = Q·I` at a rational point, where `A = I − yM(x)U`.
    /// Needs every space coordinate nonzero.
    pub fn adjugate_identity_at(&self, point: &[BigRational]) -> bool {
        let d = self.d();
        let k = self.spec.k;
        let coin = self.spec.coin.real_rational().expect("bundle coin is real");
        let xpow = |a: usize, e: i64| -> BigRational {
            let b = &point[a];
            if e >= 0 {
                num_traits::pow(b.clone(), e as usize)
            } else {
                num_traits::pow(b.recip(), (-e) as usize)
            }
        };
        let y = &point[d];
        let a: Vec<Vec<BigRational>> = (0..k)
            .map(|i| {
                let mut m = BigRational::one();
                for ax in 0..d {
                    m *= xpow(ax, self.spec.steps[i][ax]);
                }
                (0..k)
                    .map(|j| {
                        let delta = if i == j { BigRational::one() } else { BigRational::zero() };
                        delta - y * &m * &coin[i][j]
                    })
                    .collect()
            })
            .collect();
        let pv: Vec<Vec<BigRational>> = self
            .p
            .iter()
            .map(|r| r.iter().map(|c| c.eval_rational(point)).collect())
            .collect();
        let qv = self.q.eval_rational(point);
        (0..k).all(|r| {
            (0..k).all(|c| {
                let s: BigRational = (0..k).map(|m| &pv[m][r] * &a[m][c]).sum();
                s == if r == c { qv.clone() } else { BigRational::zero() }
            })
        })
    }

    /// Runs the adjugate identity at `count` random rational points.
    pub fn sample_identity(&self, count: usize, seed: u64) -> bool {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count).all(|_| {
            let pt: Vec<BigRational> = (0..=self.d())
                .map(|_| {
                    let mut n: i64 = rng.gen_range(-9..=9);
                    if n == 0 {
                        n = 1;
                    }
                    BigRational::new(n.into(), rng.gen_range(1i64..=7).into())
                })
                .collect();
            self.adjugate_identity_at(&pt)
        })
    }

    /// Numerator `P_ij` (0-based chiralities).
    pub fn numerator(&self, i: usize, j: usize) -> &QPoly {
        &self.p[i][j]
    }
}

/// Series coefficients of `P_ij / Q` up to `y^n_max`, as maps from lattice
/// point `r` to the exact coefficient of `x^r y^n`.
pub fn series_coefficients(
    bundle: &KernelBundle,
    i: usize,
    j: usize,
    n_max: usize,
) -> Vec<Vec<(Vec<i64>, BigRational)>> {
    let d = bundle.d();
    let t = d;
    let qs = bundle.q.to_univariate(t);
    let ps = bundle.p[i][j].to_univariate(t);
    let c = &bundle.shift;
    let xc = |e: usize| {
        let mut exps: Vec<u32> = c.iter().map(|ci| ci * e as u32).collect();
        exps.push(0);
        Mono::from_exps(&exps)
    };
    let one = BigRational::one();
    let zero_poly = QPoly::zero(bundle.vars.clone());
    // H_n = x^{c(n+1)} F_n, computed without division:
    // H_n = x^{cn} P_n − Σ_{m≥1} A_m x^{c(m−1)} H_{n−m}.
    let mut h: Vec<QPoly> = Vec::with_capacity(n_max + 1);
    let mut out = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let pn = ps.get(n).unwrap_or(&zero_poly);
        let mut acc = pn.mul_monomial(xc(n), &one);
        for m in 1..=n.min(qs.len().saturating_sub(1)) {
            if qs[m].is_zero() {
                continue;
            }
            let term = qs[m].mul(&h[n - m]).mul_monomial(xc(m - 1), &one);
            acc = acc.sub(&term);
        }
        let coeffs = acc
            .iter_exps()
            .map(|(e, v)| {
                let r = (0..d).map(|a| e[a] as i64 - (c[a] as i64) * (n as i64 + 1)).collect();
                (r, v.clone())
            })
            .collect();
        out.push(coeffs);
        h.push(acc);
    }
    out
}

/// Largest `|series − simulated amplitude|` over all `n ≤ n_max` and all
/// lattice points, for the pair `(i, j)`. Exactly zero when the kernel and
/// the simulator agree.
pub fn taylor_check(bundle: &KernelBundle, i: usize, j: usize, n_max: usize) -> Result<BigRational> {
    let series = series_coefficients(bundle, i, j, n_max);
    let mut worst = BigRational::zero();
    let mut field = crate::simulator::AmplitudeField::elementary(&bundle.spec, i, Backend::Exact)?;
    for (n, coeffs) in series.iter().enumerate() {
        if n > 0 {
            field = crate::simulator::step(&field, &bundle.spec);
        }
        let mut seen = std::collections::HashSet::new();
        for (r, v) in coeffs {
            let a = field.amplitude_exact(r, j).expect("exact field");
            let diff = (&a - &ExactScalar::real(v.clone())).l1_norm();
            worst = worst.max(diff);
            seen.insert(r.clone());
        }
        for r in field.support() {
            if !seen.contains(&r) {
                let a = field.amplitude_exact(&r, j).expect("exact field");
                worst = worst.max(a.l1_norm());
            }
        }
    }
    Ok(worst)
}

/// Maximum deviation over every chirality pair.
pub fn taylor_check_all(bundle: &KernelBundle, n_max: usize) -> Result<BigRational> {
    let k = bundle.spec.k;
    let mut worst = BigRational::zero();
    for i in 0..k {
        for j in 0..k {
            worst = worst.max(taylor_check(bundle, i, j, n_max)?);
        }
    }
    Ok(worst)
}

/// Same comparison against an independent evolution per `n`, useful when
/// the caller wants a float deviation.
pub fn taylor_check_f64(bundle: &KernelBundle, i: usize, j: usize, n_max: usize) -> Result<f64> {
    let series = series_coefficients(bundle, i, j, n_max);
    let mut worst = 0f64;
    for (n, coeffs) in series.iter().enumerate() {
        let f = evolve(&bundle.spec, i, n, Backend::Float)?;
        for (r, v) in coeffs {
            let a = f.amplitude(r, j);
            worst = worst.max((a - Complex64::new(qrw_poly::ratio_to_f64(v), 0.0)).norm());
        }
    }
    Ok(worst)
}

/// Integer content of `Q` after clearing denominators (the display scale).
pub fn display_scale(bundle: &KernelBundle) -> BigInt {
    let (z, den) = bundle.q.clear_denominators();
    let c = z.integer_content();
    (den / c).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn deterministic_kernel() {
        let b = build_kernel(&fixtures::deterministic()).unwrap();
        let v = b.vars.clone();
        let x = QPoly::var(v.clone(), "x").unwrap();
        let y = QPoly::var(v.clone(), "y").unwrap();
        let one = QPoly::one(v);
        assert_eq!(b.q, one.sub(&y).mul(&one.sub(&x.mul(&y))));
        assert_eq!(b.shift, vec![0]);
    }

    #[test]
    fn float_coin_is_rejected() {
        assert!(matches!(build_kernel(&fixtures::hadamard()), Err(QrwError::NonExactCoin)));
    }

    #[test]
    fn series_matches_walk() {
        let b = build_kernel(&fixtures::running_example()).unwrap();
        assert!(taylor_check_all(&b, 6).unwrap().is_zero());
        let b = build_kernel(&fixtures::toy2d()).unwrap();
        assert!(taylor_check_all(&b, 4).unwrap().is_zero());
    }

    #[test]
    fn identity_holds() {
        let b = build_kernel(&fixtures::running_example()).unwrap();
        assert!(b.sample_identity(5, 1));
    }

    #[test]
    fn json_round_trip() {
        let b = build_kernel(&fixtures::cayley2()).unwrap();
        let s = b.to_json();
        let c = KernelBundle::from_json(&s).unwrap();
        assert_eq!(c.q, b.q);
        assert_eq!(c.to_json(), s);
    }
}
