//! Sparse multivariate polynomials.

use std::collections::HashMap;
use std::fmt;
use std::hash::{BuildHasherDefault, Hasher};
use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::coeff::{Coeff, FieldCoeff};
use crate::error::PolyError;
use crate::mono::{Mono, MAX_VARS};

/// Multiply-shift hasher for packed monomials; SipHash dominates product
/// accumulation otherwise.
#[derive(Default)]
pub(crate) struct MonoHasher(u64);

impl Hasher for MonoHasher {
    fn finish(&self) -> u64 {
        self.0
    }
    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 = (self.0.rotate_left(5) ^ b as u64).wrapping_mul(0x51_7c_c1_b7_27_22_0a_95);
        }
    }
    fn write_u128(&mut self, v: u128) {
        let folded = (v as u64) ^ ((v >> 64) as u64).rotate_left(29);
        self.0 = (self.0 ^ folded).wrapping_mul(0x9e37_79b9_7f4a_7c15);
        self.0 ^= self.0 >> 31;
    }
}

pub(crate) type MonoMap<C> = HashMap<Mono, C, BuildHasherDefault<MonoHasher>>;

/// Ordered variable names shared between polynomials of one computation.
pub type Vars = Arc<[String]>;

pub fn vars(names: &[&str]) -> Vars {
    assert!(names.len() <= MAX_VARS, "at most {MAX_VARS} variables");
    names.iter().map(|s| s.to_string()).collect::<Vec<_>>().into()
}

/// Sparse polynomial: terms sorted by descending graded-lex monomial, no
/// zero coefficients stored.
#[derive(Clone, PartialEq)]
pub struct MultiPoly<C> {
    vars: Vars,
    terms: Vec<(Mono, C)>,
}

impl<C: Coeff> MultiPoly<C> {
    pub fn zero(vars: Vars) -> Self {
        Self {
            vars,
            terms: Vec::new(),
        }
    }

    pub fn constant(vars: Vars, c: C) -> Self {
        let terms = if c.is_zero() {
            Vec::new()
        } else {
            vec![(Mono::ONE, c)]
        };
        Self { vars, terms }
    }

    pub fn one(vars: Vars) -> Self {
        Self::constant(vars, C::one())
    }

    /// The polynomial consisting of variable `name`.
    pub fn var(vars: Vars, name: &str) -> Result<Self, PolyError> {
        let i = index_of(&vars, name)?;
        Ok(Self {
            vars,
            terms: vec![(Mono::var(i, 1), C::one())],
        })
    }

    pub fn monomial(vars: Vars, exps: &[u32], c: C) -> Self {
        assert!(exps.len() <= vars.len());
        let terms = if c.is_zero() {
            Vec::new()
        } else {
            vec![(Mono::from_exps(exps), c)]
        };
        Self { vars, terms }
    }

    /// Builds a polynomial from possibly repeated, possibly zero terms.
    pub fn from_terms<I>(vars: Vars, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<u32>, C)>,
    {
        let mut acc: MonoMap<C> = MonoMap::default();
        for (e, c) in terms {
            assert!(e.len() <= vars.len(), "exponent vector longer than variable list");
            let m = Mono::from_exps(&e);
            match acc.get_mut(&m) {
                Some(v) => v.add_assign_ref(&c),
                None => {
                    acc.insert(m, c);
                }
            }
        }
        Self::from_map(vars, acc)
    }

    /// Builds from `(monomial, coefficient)` pairs, merging repeats.
    pub fn from_mono_terms<I>(vars: Vars, terms: I) -> Self
    where
        I: IntoIterator<Item = (Mono, C)>,
    {
        let mut acc: MonoMap<C> = MonoMap::default();
        for (m, c) in terms {
            match acc.get_mut(&m) {
                Some(v) => v.add_assign_ref(&c),
                None => {
                    acc.insert(m, c);
                }
            }
        }
        Self::from_map(vars, acc)
    }

    /// Coefficient of a monomial.
    pub fn coeff_mono(&self, m: Mono) -> C {
        self.terms
            .binary_search_by(|t| m.cmp(&t.0))
            .map(|i| self.terms[i].1.clone())
            .unwrap_or_else(|_| C::zero())
    }

    pub(crate) fn from_map(vars: Vars, acc: MonoMap<C>) -> Self {
        let mut terms: Vec<(Mono, C)> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        Self { vars, terms }
    }

    /// Caller guarantees descending order and no zeros.
    pub(crate) fn from_sorted(vars: Vars, terms: Vec<(Mono, C)>) -> Self {
        debug_assert!(terms.windows(2).all(|w| w[0].0 > w[1].0));
        debug_assert!(terms.iter().all(|(_, c)| !c.is_zero()));
        Self { vars, terms }
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn var_index(&self, name: &str) -> Result<usize, PolyError> {
        index_of(&self.vars, name)
    }

    pub fn terms(&self) -> &[(Mono, C)] {
        &self.terms
    }

    /// Terms as `(exponent vector, coefficient)` pairs.
    pub fn iter_exps(&self) -> impl Iterator<Item = (Vec<u32>, &C)> + '_ {
        let n = self.nvars();
        self.terms.iter().map(move |(m, c)| (m.exps(n), c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0 == Mono::ONE)
    }

    pub fn coeff(&self, exps: &[u32]) -> C {
        let m = Mono::from_exps(exps);
        self.terms
            .binary_search_by(|(t, _)| m.cmp(t))
            .map(|i| self.terms[i].1.clone())
            .unwrap_or_else(|_| C::zero())
    }

    pub fn constant_term(&self) -> C {
        match self.terms.last() {
            Some((m, c)) if *m == Mono::ONE => c.clone(),
            _ => C::zero(),
        }
    }

    pub fn leading(&self) -> Option<&(Mono, C)> {
        self.terms.first()
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.iter().map(|(m, _)| m.exp(var)).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.first().map(|(m, _)| m.total()).unwrap_or(0)
    }

    /// `true` if variable `var` occurs with positive exponent.
    pub fn involves(&self, var: usize) -> bool {
        self.terms.iter().any(|(m, _)| m.exp(var) > 0)
    }

    /// Indices of variables that actually occur.
    pub fn support_vars(&self) -> Vec<usize> {
        (0..self.nvars()).filter(|&i| self.involves(i)).collect()
    }

    fn check_vars(&self, other: &Self) {
        assert!(
            Arc::ptr_eq(&self.vars, &other.vars) || self.vars == other.vars,
            "variable lists differ: {:?} vs {:?}",
            self.vars,
            other.vars
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_vars(other);
        self.merge(other, false)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check_vars(other);
        self.merge(other, true)
    }

    fn merge(&self, other: &Self, negate: bool) -> Self {
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Less => {
                    let c = if negate { b[j].1.neg_ref() } else { b[j].1.clone() };
                    out.push((b[j].0, c));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = if negate {
                        a[i].1.sub_ref(&b[j].1)
                    } else {
                        a[i].1.add_ref(&b[j].1)
                    };
                    if !c.is_zero() {
                        out.push((a[i].0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        out.extend(b[j..].iter().map(|(m, c)| {
            (*m, if negate { c.neg_ref() } else { c.clone() })
        }));
        Self::from_sorted(self.vars.clone(), out)
    }

    pub fn neg(&self) -> Self {
        Self::from_sorted(
            self.vars.clone(),
            self.terms.iter().map(|(m, c)| (*m, c.neg_ref())).collect(),
        )
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero(self.vars.clone());
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, a)| (*m, a.mul_ref(c)))
            .filter(|(_, a)| !a.is_zero())
            .collect();
        Self::from_sorted(self.vars.clone(), terms)
    }

    pub fn mul_monomial(&self, m: Mono, c: &C) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(t, a)| (t.mul(m), a.mul_ref(c)))
            .filter(|(_, a)| !a.is_zero())
            .collect();
        Self::from_sorted(self.vars.clone(), terms)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_vars(other);
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.vars.clone());
        }
        if self.terms.len() == 1 {
            let (m, c) = &self.terms[0];
            return other.mul_monomial(*m, c);
        }
        if other.terms.len() == 1 {
            let (m, c) = &other.terms[0];
            return self.mul_monomial(*m, c);
        }
        let (small, large) = if self.terms.len() <= other.terms.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut acc: MonoMap<C> = MonoMap::default();
        acc.reserve(large.terms.len() * 2);
        for (ma, ca) in &small.terms {
            for (mb, cb) in &large.terms {
                let m = ma.mul(*mb);
                let p = ca.mul_ref(cb);
                match acc.get_mut(&m) {
                    Some(v) => v.add_assign_ref(&p),
                    None => {
                        acc.insert(m, p);
                    }
                }
            }
        }
        Self::from_map(self.vars.clone(), acc)
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.vars.clone());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Substitutes `subs[i]` for variable `i`. All substitutes share one
    /// variable list, which becomes the result's.
    pub fn compose(&self, subs: &[Self]) -> Self {
        assert_eq!(subs.len(), self.nvars(), "one substitute per variable");
        let vars = subs[0].vars.clone();
        let n = self.nvars();
        // Powers are cached per variable up to the needed degree.
        let pows: Vec<Vec<Self>> = (0..n)
            .map(|i| {
                let deg = self.degree_in(i) as usize;
                let mut p = vec![Self::one(vars.clone())];
                for k in 1..=deg {
                    let next = p[k - 1].mul(&subs[i]);
                    p.push(next);
                }
                p
            })
            .collect();
        let mut acc: MonoMap<C> = MonoMap::default();
        for (m, c) in &self.terms {
            let mut t = Self::constant(vars.clone(), c.clone());
            for (i, p) in pows.iter().enumerate() {
                let e = m.exp(i) as usize;
                if e > 0 {
                    t = t.mul(&p[e]);
                }
            }
            for (tm, tc) in t.terms {
                match acc.get_mut(&tm) {
                    Some(a) => a.add_assign_ref(&tc),
                    None => {
                        acc.insert(tm, tc);
                    }
                }
            }
        }
        Self::from_map(vars, acc)
    }

    /// Formal partial derivative with respect to variable index `var`.
    pub fn partial(&self, var: usize) -> Self {
        assert!(var < self.nvars());
        let mut acc: MonoMap<C> = MonoMap::default();
        for (m, c) in &self.terms {
            let e = m.exp(var);
            if e == 0 {
                continue;
            }
            acc.insert(m.with_exp(var, e - 1), c.mul_ref(&C::from_i64(e as i64)));
        }
        Self::from_map(self.vars.clone(), acc)
    }

    /// Formal partial derivative by variable name.
    pub fn derivative(&self, name: &str) -> Result<Self, PolyError> {
        Ok(self.partial(self.var_index(name)?))
    }

    /// Euler operator `v ∂/∂v`: multiplies each term by its exponent in `v`.
    pub fn euler(&self, var: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.exp(var) > 0)
            .map(|(m, c)| (*m, c.mul_ref(&C::from_i64(m.exp(var) as i64))))
            .collect();
        Self::from_sorted(self.vars.clone(), terms)
    }

    /// Gcd of all monomials occurring in the polynomial.
    pub fn monomial_content(&self) -> Mono {
        let n = self.nvars();
        let mut it = self.terms.iter();
        let Some((first, _)) = it.next() else {
            return Mono::ONE;
        };
        it.fold(*first, |g, (m, _)| g.gcd(*m, n))
    }

    /// Divides every term by monomial `m`; caller guarantees divisibility.
    pub fn div_monomial(&self, m: Mono) -> Self {
        let n = self.nvars();
        let terms = self
            .terms
            .iter()
            .map(|(t, c)| {
                assert!(m.divides(*t, n), "monomial does not divide");
                (m.quotient_of(*t), c.clone())
            })
            .collect();
        // Dividing by a common monomial preserves the order.
        Self::from_sorted(self.vars.clone(), terms)
    }

    /// Removes the largest monomial factor, returning it alongside.
    pub fn strip_monomial(&self) -> (Mono, Self) {
        let m = self.monomial_content();
        (m, self.div_monomial(m))
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> MultiPoly<D> {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (*m, f(c)))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        MultiPoly::from_sorted(self.vars.clone(), terms)
    }

    /// Coefficients with respect to `var`: entry `k` multiplies `var^k`. The
    /// coefficient polynomials keep the full variable list.
    pub fn to_univariate(&self, var: usize) -> Vec<Self> {
        let deg = self.degree_in(var) as usize;
        let mut buckets: Vec<Vec<(Mono, C)>> = vec![Vec::new(); deg + 1];
        for (m, c) in &self.terms {
            let e = m.exp(var) as usize;
            buckets[e].push((m.with_exp(var, 0), c.clone()));
        }
        buckets
            .into_iter()
            .map(|mut t| {
                // Zeroing one exponent can reorder terms under graded order.
                t.sort_unstable_by(|a, b| b.0.cmp(&a.0));
                Self::from_sorted(self.vars.clone(), t)
            })
            .collect()
    }

    pub fn from_univariate(vars: Vars, var: usize, coeffs: &[Self]) -> Self {
        let mut acc: MonoMap<C> = MonoMap::default();
        for (k, c) in coeffs.iter().enumerate() {
            for (m, a) in &c.terms {
                debug_assert_eq!(m.exp(var), 0);
                acc.insert(m.with_exp(var, k as u32), a.clone());
            }
        }
        Self::from_map(vars, acc)
    }

    /// Re-expresses the polynomial over `new_vars`, which must contain every
    /// variable that actually occurs.
    pub fn embed(&self, new_vars: Vars) -> Result<Self, PolyError> {
        let n = self.nvars();
        let mut map = Vec::with_capacity(n);
        for (i, name) in self.vars.iter().enumerate() {
            match new_vars.iter().position(|v| v == name) {
                Some(j) => map.push(Some(j)),
                None if !self.involves(i) => map.push(None),
                None => return Err(PolyError::UnknownVariable(name.clone())),
            }
        }
        let m = new_vars.len();
        let terms = self.terms.iter().map(|(mono, c)| {
            let mut e = vec![0u32; m];
            for i in 0..n {
                if let Some(j) = map[i] {
                    e[j] = mono.exp(i);
                }
            }
            (e, c.clone())
        });
        Ok(Self::from_terms(new_vars, terms.collect::<Vec<_>>()))
    }

    /// Numeric evaluation at a complex point (one value per variable).
    pub fn eval_complex(&self, point: &[Complex64]) -> Complex64 {
        assert_eq!(point.len(), self.nvars(), "point dimension");
        let n = self.nvars();
        let pows: Vec<Vec<Complex64>> = (0..n)
            .map(|i| power_table(point[i], self.degree_in(i)))
            .collect();
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut t = c.to_complex();
            for (i, p) in pows.iter().enumerate() {
                let e = m.exp(i) as usize;
                if e > 0 {
                    t *= p[e];
                }
            }
            acc += t;
        }
        acc
    }

    /// Collapses all variables except `main` to the given values, returning
    /// the numeric coefficients in ascending powers of `main`.
    pub fn univariate_at(&self, main: usize, point: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(point.len(), self.nvars());
        let n = self.nvars();
        let pows: Vec<Vec<Complex64>> = (0..n)
            .map(|i| {
                if i == main {
                    Vec::new()
                } else {
                    power_table(point[i], self.degree_in(i))
                }
            })
            .collect();
        let mut out = vec![Complex64::new(0.0, 0.0); self.degree_in(main) as usize + 1];
        for (m, c) in &self.terms {
            let mut t = c.to_complex();
            for (i, p) in pows.iter().enumerate() {
                let e = m.exp(i) as usize;
                if i != main && e > 0 {
                    t *= p[e];
                }
            }
            out[m.exp(main) as usize] += t;
        }
        out
    }

    /// Substitutes a constant for variable `var`, keeping the variable list.
    pub fn eval_var(&self, var: usize, value: &C) -> Self {
        let deg = self.degree_in(var);
        let mut pows = vec![C::one()];
        for k in 1..=deg as usize {
            let next = pows[k - 1].mul_ref(value);
            pows.push(next);
        }
        let mut acc: MonoMap<C> = MonoMap::default();
        for (m, c) in &self.terms {
            let key = m.with_exp(var, 0);
            let v = c.mul_ref(&pows[m.exp(var) as usize]);
            match acc.get_mut(&key) {
                Some(a) => a.add_assign_ref(&v),
                None => {
                    acc.insert(key, v);
                }
            }
        }
        Self::from_map(self.vars.clone(), acc)
    }
}

fn power_table(z: Complex64, deg: u32) -> Vec<Complex64> {
    let mut p = Vec::with_capacity(deg as usize + 1);
    p.push(Complex64::new(1.0, 0.0));
    for k in 1..=deg as usize {
        p.push(p[k - 1] * z);
    }
    p
}

pub(crate) fn index_of(vars: &Vars, name: &str) -> Result<usize, PolyError> {
    vars.iter()
        .position(|v| v == name)
        .ok_or_else(|| PolyError::UnknownVariable(name.to_string()))
}

impl<C: FieldCoeff> MultiPoly<C> {
    /// Scales so that the leading coefficient is one.
    pub fn monic(&self) -> Self {
        match self.terms.first() {
            Some((_, c)) => self.scale(&c.inv()),
            None => self.clone(),
        }
    }
}

/// Rational polynomials.
pub type QPoly = MultiPoly<BigRational>;
/// Integer polynomials.
pub type ZPoly = MultiPoly<BigInt>;

impl MultiPoly<BigRational> {
    /// Writes `self = z / den` with `z` integral, `den > 0` minimal.
    pub fn clear_denominators(&self) -> (ZPoly, BigInt) {
        let den = self
            .terms
            .iter()
            .fold(<BigInt as One>::one(), |acc, (_, c)| acc.lcm(c.denom()));
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (*m, c.numer() * (&den / c.denom())))
            .collect();
        (ZPoly::from_sorted(self.vars.clone(), terms), den)
    }

    /// Primitive integer polynomial with positive leading coefficient and the
    /// same zero set.
    pub fn primitive_integer(&self) -> ZPoly {
        self.clear_denominators().0.primitive()
    }

    /// `true` if all coefficients are integers.
    pub fn is_integral(&self) -> bool {
        self.terms.iter().all(|(_, c)| c.is_integer())
    }

    /// Exact evaluation at a rational point.
    pub fn eval_rational(&self, point: &[BigRational]) -> BigRational {
        assert_eq!(point.len(), self.nvars());
        let mut acc = <BigRational as Zero>::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, v) in point.iter().enumerate() {
                let e = m.exp(i);
                if e > 0 {
                    t *= num_traits::pow(v.clone(), e as usize);
                }
            }
            acc += t;
        }
        acc
    }
}

impl MultiPoly<BigInt> {
    pub fn to_rational(&self) -> QPoly {
        self.map_coeffs(|c| BigRational::from_integer(c.clone()))
    }

    /// Gcd of the integer coefficients (non-negative).
    pub fn integer_content(&self) -> BigInt {
        let mut g = <BigInt as Zero>::zero();
        for (_, c) in &self.terms {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Divides by the integer content and fixes the sign so the leading
    /// coefficient is positive.
    pub fn primitive(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut g = self.integer_content();
        if self.terms[0].1.is_negative() {
            g = -g;
        }
        if g.is_one() {
            return self.clone();
        }
        let terms = self.terms.iter().map(|(m, c)| (*m, c / &g)).collect();
        Self::from_sorted(self.vars.clone(), terms)
    }

    /// Largest coefficient size in bits.
    pub fn max_coeff_bits(&self) -> u64 {
        self.terms.iter().map(|(_, c)| c.bits()).max().unwrap_or(0)
    }
}

impl<C: Coeff + fmt::Display> fmt::Display for MultiPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            for (i, v) in self.vars.iter().enumerate() {
                match m.exp(i) {
                    0 => {}
                    1 => write!(f, "*{v}")?,
                    e => write!(f, "*{v}^{e}")?,
                }
            }
        }
        Ok(())
    }
}

impl<C: Coeff> fmt::Debug for MultiPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiPoly[{:?}]{{", self.vars)?;
        for (m, c) in &self.terms {
            write!(f, " {:?}:{:?}", m.exps(self.nvars()), c)?;
        }
        write!(f, " }}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn xy() -> (Vars, QPoly, QPoly) {
        let v = vars(&["x", "y"]);
        let x = QPoly::var(v.clone(), "x").unwrap();
        let y = QPoly::var(v.clone(), "y").unwrap();
        (v, x, y)
    }

    #[test]
    fn compose_swaps_and_shifts() {
        let (v, x, y) = xy();
        let p = x.pow(2).mul(&y).add(&y);
        let one = QPoly::one(v);
        let swapped = p.compose(&[y.clone(), x.clone()]);
        assert_eq!(swapped, y.pow(2).mul(&x).add(&x));
        let shifted = p.compose(&[x.add(&one), y.clone()]);
        assert_eq!(shifted, x.add(&one).pow(2).mul(&y).add(&y));
    }

    #[test]
    fn derivative_of_x2y() {
        let (_, x, y) = xy();
        let p = x.mul(&x).mul(&y);
        let d = p.derivative("x").unwrap();
        assert_eq!(d, x.mul(&y).scale(&q(2)));
        assert!(matches!(p.derivative("w"), Err(PolyError::UnknownVariable(_))));
    }

    #[test]
    fn difference_of_squares() {
        let (_, x, y) = xy();
        let p = x.add(&y).mul(&x.sub(&y));
        assert_eq!(p, x.mul(&x).sub(&y.mul(&y)));
    }

    #[test]
    fn univariate_round_trip() {
        let (v, x, y) = xy();
        let p = x.pow(3).mul(&y).add(&y.pow(2)).sub(&x.scale(&q(5)));
        let coeffs = p.to_univariate(1);
        assert_eq!(coeffs.len(), 3);
        assert_eq!(QPoly::from_univariate(v, 1, &coeffs), p);
    }

    #[test]
    fn monomial_content_strip() {
        let (_, x, y) = xy();
        let p = x.pow(2).mul(&y).add(&x.pow(3).mul(&y.pow(2)));
        let (m, r) = p.strip_monomial();
        assert_eq!(m.exps(2), vec![2, 1]);
        assert_eq!(r, QPoly::one(x.vars().clone()).add(&x.mul(&y)));
    }

    #[test]
    fn eval_at_zero_is_constant_term() {
        let (_, x, y) = xy();
        let p = x.mul(&y).add(&QPoly::constant(x.vars().clone(), q(7)));
        let z = Complex64::new(0.0, 0.0);
        assert_eq!(p.eval_complex(&[z, z]), Complex64::new(7.0, 0.0));
    }

    #[test]
    fn embed_reorders() {
        let (_, x, y) = xy();
        let p = x.pow(2).mul(&y);
        let w = vars(&["y", "z", "x"]);
        let e = p.embed(w.clone()).unwrap();
        assert_eq!(e.coeff(&[1, 0, 2]), q(1));
        assert!(e.embed(vars(&["x"])).is_err());
    }
}
