//! Sturm sequences, exact real root isolation and unit-circle counting.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::coeff::ratio_to_f64;
use crate::error::PolyError;
use crate::gcd::{squarefree, SqfScope};
use crate::poly::{vars, QPoly};
use crate::resultant::resultant;

/// Dense integer polynomial, ascending coefficients, no trailing zeros.
type Dense = Vec<BigInt>;

fn trim(p: &mut Dense) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn primitive(mut p: Dense) -> Dense {
    trim(&mut p);
    let g = p.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
    if !g.is_zero() && !g.is_one() {
        for c in p.iter_mut() {
            *c /= &g;
        }
    }
    p
}

fn derivative(p: &Dense) -> Dense {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigInt::from(i))
        .collect()
}

/// Remainder of `a` by `b` up to a positive constant factor.
fn positive_rem(a: &Dense, b: &Dense) -> Dense {
    let db = b.len() - 1;
    let lb = &b[db];
    let lb_abs = lb.abs();
    let mut r = a.clone();
    while r.len() > db {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        // r ← |lb|·r − sign(lb)·lr·x^(dr−db)·b keeps the multiplier positive.
        let f = if lb.is_negative() { -&lr } else { lr };
        for c in r.iter_mut() {
            *c *= &lb_abs;
        }
        for (i, bc) in b.iter().enumerate() {
            r[i + dr - db] -= bc * &f;
        }
        r.pop();
        trim(&mut r);
        r = primitive(r);
    }
    r
}

/// Sign of `p(t)` for rational `t`, exactly.
fn sign_at(p: &Dense, t: &BigRational) -> i32 {
    // Σ a_i n^i d^(k−i) has the sign of p(n/d) since d > 0.
    let (n, d) = (t.numer(), t.denom());
    let k = p.len();
    if k == 0 {
        return 0;
    }
    let mut acc = BigInt::zero();
    let mut dpow = BigInt::one();
    for c in p.iter().rev() {
        acc = acc * n + c * &dpow;
        dpow *= d;
    }
    // Horner above accumulates Σ a_i n^i d^(k−1−i) up to a positive factor.
    if acc.is_positive() {
        1
    } else if acc.is_negative() {
        -1
    } else {
        0
    }
}

/// Sturm chain of a univariate rational polynomial.
#[derive(Clone, Debug)]
pub struct SturmChain {
    chain: Vec<Dense>,
}

impl SturmChain {
    pub fn new(p: &QPoly) -> Result<Self, PolyError> {
        let d = to_dense(p)?;
        Ok(Self::from_dense(d))
    }

    fn from_dense(p: Dense) -> Self {
        let p = primitive(p);
        let mut chain = vec![p.clone()];
        let dp = primitive(derivative(&p));
        if dp.is_empty() {
            return Self { chain };
        }
        chain.push(dp);
        loop {
            let n = chain.len();
            let r = positive_rem(&chain[n - 2], &chain[n - 1]);
            if r.is_empty() {
                break;
            }
            chain.push(r.into_iter().map(|c| -c).collect());
        }
        Self { chain }
    }

    pub fn len(&self) -> usize {
        self.chain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chain.is_empty()
    }

    /// Sign variations at `t`, zeros skipped.
    pub fn variations(&self, t: &BigRational) -> usize {
        let mut last = 0;
        let mut v = 0;
        for p in &self.chain {
            let s = sign_at(p, t);
            if s != 0 {
                if last != 0 && s != last {
                    v += 1;
                }
                last = s;
            }
        }
        v
    }

    /// Sign variations at `+∞` or `−∞`.
    fn variations_inf(&self, positive: bool) -> usize {
        let mut last = 0;
        let mut v = 0;
        for p in &self.chain {
            let lc = p.last().expect("nonzero");
            let odd = (p.len() - 1) % 2 == 1;
            let mut s = if lc.is_positive() { 1 } else { -1 };
            if !positive && odd {
                s = -s;
            }
            if last != 0 && s != last {
                v += 1;
            }
            last = s;
        }
        v
    }

    fn value_sign(&self, t: &BigRational) -> i32 {
        sign_at(&self.chain[0], t)
    }

    /// Distinct roots in `(a, b]`.
    pub fn count(&self, a: &BigRational, b: &BigRational) -> Result<usize, PolyError> {
        let a = self.perturb(a)?;
        let b = self.perturb(b)?;
        Ok(self.variations(&a).saturating_sub(self.variations(&b)))
    }

    /// Total number of distinct real roots.
    pub fn count_all(&self) -> usize {
        self.variations_inf(false)
            .saturating_sub(self.variations_inf(true))
    }

    /// If `t` is a root, moves it to `t + 1/N` with `N` doubling until the
    /// value is nonzero and no root was crossed, so `(t, ·]` semantics hold.
    fn perturb(&self, t: &BigRational) -> Result<BigRational, PolyError> {
        if self.value_sign(t) != 0 {
            return Ok(t.clone());
        }
        let v = self.variations(t);
        let mut n = BigInt::from(2);
        for _ in 0..256 {
            let tp = t + BigRational::new(BigInt::one(), n.clone());
            if self.value_sign(&tp) != 0 && self.variations(&tp) == v {
                return Ok(tp);
            }
            n *= 2;
        }
        Err(PolyError::EndpointRoot(t.to_string()))
    }
}

/// Converts a polynomial in at most one variable to dense integer form.
fn to_dense(p: &QPoly) -> Result<Dense, PolyError> {
    if p.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    let support = p.support_vars();
    if support.len() > 1 {
        return Err(PolyError::VariableMismatch(format!(
            "expected a univariate polynomial, found variables {:?}",
            support.iter().map(|&i| p.vars()[i].clone()).collect::<Vec<_>>()
        )));
    }
    let z = p.primitive_integer();
    let v = support.first().copied().unwrap_or(0);
    let mut d = vec![BigInt::zero(); z.degree_in(v) as usize + 1];
    for (m, c) in z.terms() {
        d[m.exp(v) as usize] = c.clone();
    }
    Ok(d)
}

/// Number of distinct real roots of `p` in `(a, b]`. `p` is reduced to its
/// squarefree part first.
pub fn sturm_count(p: &QPoly, a: &BigRational, b: &BigRational) -> Result<usize, PolyError> {
    if p.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    let sf = squarefree(p, SqfScope::All);
    SturmChain::new(&sf)?.count(a, b)
}

/// Isolating interval `(lo, hi]` holding exactly one real root; neither
/// endpoint is a root.
#[derive(Clone, Debug, PartialEq)]
pub struct RootBox {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl RootBox {
    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from_integer(2.into())
    }

    pub fn approx(&self) -> f64 {
        ratio_to_f64(&self.midpoint())
    }
}

/// Isolates every real root of `p` (squarefree part taken internally).
pub fn isolate_real_roots(p: &QPoly) -> Result<Vec<RootBox>, PolyError> {
    let sf = squarefree(p, SqfScope::All);
    let d = to_dense(&sf)?;
    let bound = cauchy_bound(&d);
    isolate_dense(d, &(-bound.clone()), &bound)
}

/// Isolates the real roots of `p` lying in `(a, b]`.
pub fn isolate_in(p: &QPoly, a: &BigRational, b: &BigRational) -> Result<Vec<RootBox>, PolyError> {
    let sf = squarefree(p, SqfScope::All);
    let d = to_dense(&sf)?;
    isolate_dense(d, a, b)
}

fn cauchy_bound(p: &Dense) -> BigRational {
    let lc = p.last().expect("nonzero").abs();
    let m = p[..p.len() - 1]
        .iter()
        .map(|c| c.abs())
        .max()
        .unwrap_or_else(BigInt::zero);
    BigRational::one() + BigRational::new(m, lc)
}

fn isolate_dense(p: Dense, a: &BigRational, b: &BigRational) -> Result<Vec<RootBox>, PolyError> {
    let chain = SturmChain::from_dense(p);
    if chain.chain[0].len() <= 1 {
        return Ok(Vec::new());
    }
    let lo = chain.perturb(a)?;
    let hi = chain.perturb(b)?;
    let mut out = Vec::new();
    let mut stack = vec![(lo, hi)];
    while let Some((l, h)) = stack.pop() {
        let n = chain.variations(&l).saturating_sub(chain.variations(&h));
        match n {
            0 => {}
            1 => out.push(RootBox { lo: l, hi: h }),
            _ => {
                let mid = split_point(&chain, &l, &h);
                stack.push((mid.clone(), h));
                stack.push((l, mid));
            }
        }
    }
    out.sort_by(|x, y| x.lo.cmp(&y.lo));
    Ok(out)
}

/// A point strictly inside `(l, h)` that is not a root.
fn split_point(chain: &SturmChain, l: &BigRational, h: &BigRational) -> BigRational {
    let two = BigRational::from_integer(2.into());
    let mid = (l + h) / &two;
    if chain.value_sign(&mid) != 0 {
        return mid;
    }
    let mut step = (h - l) / BigRational::from_integer(8.into());
    loop {
        let t = &mid + &step;
        if chain.value_sign(&t) != 0 {
            return t;
        }
        step /= &two;
    }
}

/// Shrinks an isolating interval by bisection until its width is at most
/// `width`.
pub fn refine(p: &QPoly, rb: &RootBox, width: &BigRational) -> Result<RootBox, PolyError> {
    let sf = squarefree(p, SqfScope::All);
    let chain = SturmChain::new(&sf)?;
    let mut b = rb.clone();
    while &b.width() > width {
        let mid = split_point(&chain, &b.lo, &b.hi);
        let left = chain.variations(&b.lo).saturating_sub(chain.variations(&mid));
        if left == 1 {
            b.hi = mid;
        } else {
            b.lo = mid;
        }
    }
    Ok(b)
}

/// `q(z)`: squarefree part of `result(p, x² − z·x + 1, x)`. Its roots in
/// `[−2, 2]` are the values `x + 1/x` of the unit-circle roots of `p`.
pub fn unit_circle_transform(p: &QPoly) -> Result<QPoly, PolyError> {
    let d = to_dense(p)?;
    let v = vars(&["x", "z"]);
    let x = QPoly::var(v.clone(), "x")?;
    let z = QPoly::var(v.clone(), "z")?;
    let one = QPoly::one(v.clone());
    let px = QPoly::from_terms(
        v.clone(),
        d.iter()
            .enumerate()
            .map(|(i, c)| (vec![i as u32, 0], BigRational::from_integer(c.clone()))),
    );
    let w = x.pow(2).sub(&z.mul(&x)).add(&one);
    let r = resultant(&px, &w, "x")?;
    let r = r.embed(vars(&["z"]))?;
    Ok(squarefree(&r, SqfScope::All))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn poly(coeffs: &[i64]) -> QPoly {
        let v = vars(&["x"]);
        QPoly::from_terms(
            v,
            coeffs
                .iter()
                .enumerate()
                .map(|(i, &c)| (vec![i as u32], q(c))),
        )
    }

    #[test]
    fn simple_counts() {
        assert_eq!(sturm_count(&poly(&[-1, 0, 1]), &q(0), &q(2)).unwrap(), 1);
        assert_eq!(sturm_count(&poly(&[1, 0, 1]), &q(-2), &q(2)).unwrap(), 0);
        // Root at the right endpoint is included, at the left excluded.
        assert_eq!(sturm_count(&poly(&[-1, 0, 1]), &q(-1), &q(1)).unwrap(), 1);
    }

    #[test]
    fn sqrt_two_isolated() {
        let p = poly(&[-2, 0, 1]);
        let boxes = isolate_real_roots(&p).unwrap();
        assert_eq!(boxes.len(), 2);
        let w = BigRational::new(1.into(), 10_000_000.into());
        let r = refine(&p, &boxes[1], &w).unwrap();
        assert!((r.approx() - 2f64.sqrt()).abs() < 1e-6);
        assert!((refine(&p, &boxes[0], &w).unwrap().approx() + 2f64.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn repeated_roots_counted_once() {
        // (x-1)^2 (x+2)
        let p = poly(&[2, -3, 0, 1]);
        assert_eq!(isolate_real_roots(&p).unwrap().len(), 2);
        assert_eq!(SturmChain::new(&squarefree(&p, SqfScope::All)).unwrap().count_all(), 2);
    }

    #[test]
    fn circle_transform_examples() {
        let q1 = unit_circle_transform(&poly(&[1, 0, 1])).unwrap();
        assert_eq!(q1.eval_rational(&[q(0)]), q(0));
        let q2 = unit_circle_transform(&poly(&[-2, 1])).unwrap();
        let z = BigRational::new(5.into(), 2.into());
        assert!(q2.eval_rational(&[z]).is_zero());
        assert_eq!(sturm_count(&q2, &q(-2), &q(2)).unwrap(), 0);
    }
}
