//! Polynomial gcds over ℤ and squarefree parts.
//!
//! Gcds are computed recursively: content and primitive part with respect to
//! a main variable, then a subresultant remainder sequence on the primitive
//! parts. A modular image test short-circuits the common case of coprime
//! inputs.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::division::{prem, trim, Dense};
use crate::mono::Mono;
use crate::poly::{MultiPoly, QPoly, ZPoly};

/// Which variables a squarefree reduction acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SqfScope {
    /// Remove repeated factors in every variable.
    All,
    /// `p / gcd(p, ∂p/∂v)`: repeated factors involving `v` are reduced and
    /// factors free of `v` (the content in `v`) are dropped.
    Var(usize),
}

/// Gcd of two rational polynomials, returned as a primitive integer
/// polynomial with positive leading coefficient (embedded in ℚ).
pub fn gcd(a: &QPoly, b: &QPoly) -> QPoly {
    gcd_z(&a.primitive_integer(), &b.primitive_integer()).to_rational()
}

/// Gcd over ℤ, normalised to positive leading coefficient.
pub fn gcd_z(a: &ZPoly, b: &ZPoly) -> ZPoly {
    if a.is_zero() {
        return b.sign_normal();
    }
    if b.is_zero() {
        return a.sign_normal();
    }
    let n = a.nvars();
    // Monomial factors are cheap to split off and would otherwise cost a
    // full remainder sequence.
    let ma = a.monomial_content();
    let mb = b.monomial_content();
    let mg = ma.gcd(mb, n);
    let a = a.div_monomial(ma);
    let b = b.div_monomial(mb);
    let g = gcd_rec(&a, &b);
    if mg == Mono::ONE {
        g
    } else {
        g.mul_monomial(mg, &BigInt::one())
    }
}

fn gcd_rec(a: &ZPoly, b: &ZPoly) -> ZPoly {
    if a.is_zero() {
        return b.sign_normal();
    }
    if b.is_zero() {
        return a.sign_normal();
    }
    if a.is_constant() || b.is_constant() {
        let g = a.integer_content().gcd(&b.integer_content());
        return ZPoly::constant(a.vars().clone(), g);
    }
    // Main variable: the last one occurring in either input.
    let v = (0..a.nvars())
        .rev()
        .find(|&i| a.involves(i) || b.involves(i))
        .expect("non-constant");
    match (a.involves(v), b.involves(v)) {
        (true, false) => return gcd_rec(&content_in(a, v), b),
        (false, true) => return gcd_rec(a, &content_in(b, v)),
        _ => {}
    }
    let ca = content_in(a, v);
    let cb = content_in(b, v);
    let cg = gcd_rec(&ca, &cb);
    let pa = a.div_exact(&ca).expect("content divides");
    let pb = b.div_exact(&cb).expect("content divides");
    if coprime_image(&pa, &pb, v) {
        return cg;
    }
    let pg = gcd_bivariate(&pa, &pb, v).unwrap_or_else(|| primitive_prs(&pa, &pb, v));
    cg.mul(&pg)
}

/// Gcd of the coefficients of `p` viewed as a polynomial in variable `v`.
pub fn content_in(p: &ZPoly, v: usize) -> ZPoly {
    let coeffs = p.to_univariate(v);
    let mut nonzero: Vec<&ZPoly> = coeffs.iter().filter(|c| !c.is_zero()).collect();
    // Cheapest coefficient first keeps the running gcd small.
    nonzero.sort_by_key(|c| c.len());
    let mut g = ZPoly::zero(p.vars().clone());
    for c in nonzero {
        g = gcd_rec(&g, c);
        if g.is_constant() && g.constant_term().is_one() {
            break;
        }
    }
    g
}

/// Gcd of primitive polynomials in exactly two variables by evaluating the
/// other variable at small integers, taking univariate gcds and
/// interpolating (Brown's scheme over ℚ). The candidate is verified by
/// exact division; `None` hands the inputs back to the remainder sequence.
fn gcd_bivariate(a: &ZPoly, b: &ZPoly, v: usize) -> Option<ZPoly> {
    let others: Vec<usize> = (0..a.nvars())
        .filter(|&i| i != v && (a.involves(i) || b.involves(i)))
        .collect();
    let [w] = others[..] else { return None };
    let lca = a.to_univariate(v).pop().expect("nonzero");
    let lcb = b.to_univariate(v).pop().expect("nonzero");
    let gamma = gcd_rec(&lca, &lcb);
    let bound = (gamma.degree_in(w) + a.degree_in(w).min(b.degree_in(w))) as usize;
    let mut pts: Vec<BigRational> = Vec::new();
    let mut imgs: Vec<Vec<BigRational>> = Vec::new();
    let mut best = usize::MAX;
    let mut k = 0i64;
    let mut tries = 0;
    while tries < 4 {
        let t = if k % 2 == 1 { (k + 1) / 2 } else { -k / 2 };
        k += 1;
        if k > 4 * bound as i64 + 64 {
            return None;
        }
        let tz = BigInt::from(t);
        let (ga, gb) = (gamma.eval_var(w, &tz).constant_term(), lca.eval_var(w, &tz));
        if ga.is_zero() || gb.is_zero() || lcb.eval_var(w, &tz).is_zero() {
            continue;
        }
        let g = gcd_rec(&a.eval_var(w, &tz), &b.eval_var(w, &tz));
        let coeffs: Vec<BigInt> = g.to_univariate(v).iter().map(|c| c.constant_term()).collect();
        let deg = coeffs.len() - 1;
        if deg == 0 {
            return Some(ZPoly::one(a.vars().clone()));
        }
        if deg > best {
            continue;
        }
        if deg < best {
            best = deg;
            pts.clear();
            imgs.clear();
        }
        let scale = BigRational::new(ga, coeffs[deg].clone());
        pts.push(BigRational::from_integer(tz));
        imgs.push(coeffs.iter().map(|c| &scale * c).collect());
        if pts.len() <= bound {
            continue;
        }
        let mut terms = Vec::new();
        for d in 0..=best {
            let ys: Vec<BigRational> = imgs.iter().map(|im| im[d].clone()).collect();
            for (e, c) in crate::resultant::newton_coeffs(&pts, ys).into_iter().enumerate() {
                if !c.is_zero() {
                    terms.push((Mono::var(v, d as u32).mul(Mono::var(w, e as u32)), c));
                }
            }
        }
        let cand = QPoly::from_mono_terms(a.vars().clone(), terms).primitive_integer();
        let c = content_in(&cand, v);
        let cand = cand.div_exact(&c).expect("content divides").primitive_sign();
        if a.div_exact(&cand).is_ok() && b.div_exact(&cand).is_ok() {
            return Some(cand);
        }
        // Unlucky evaluations: collect a few more points and retry.
        tries += 1;
        pts.drain(..1);
        imgs.drain(..1);
    }
    None
}

/// Primitive part of the gcd of two primitive polynomials in variable `v`,
/// by the subresultant remainder sequence.
fn primitive_prs(a: &ZPoly, b: &ZPoly, v: usize) -> ZPoly {
    let vars = a.vars().clone();
    let mut f: Dense<BigInt> = a.to_univariate(v);
    let mut g: Dense<BigInt> = b.to_univariate(v);
    if f.len() < g.len() {
        std::mem::swap(&mut f, &mut g);
    }
    let mut gg = ZPoly::one(vars.clone());
    let mut h = ZPoly::one(vars.clone());
    loop {
        let d = (f.len() - g.len()) as u32;
        let mut r = prem(&f, &g);
        trim(&mut r);
        if r.is_empty() {
            break;
        }
        if r.len() == 1 {
            // Constant remainder in v: primitive gcd is trivial.
            return ZPoly::one(vars);
        }
        let div = gg.mul(&h.pow(d));
        for c in r.iter_mut() {
            *c = c.div_exact(&div).expect("subresultant division is exact");
        }
        f = std::mem::replace(&mut g, r);
        gg = f.last().expect("nonempty").clone();
        h = if d == 0 {
            h
        } else {
            gg.pow(d).div_exact(&h.pow(d - 1)).expect("subresultant h is exact")
        };
    }
    let last = ZPoly::from_univariate(vars, v, &g);
    let c = content_in(&last, v);
    last.div_exact(&c).expect("content divides").primitive_sign()
}

const P: u64 = (1 << 61) - 1;

fn mulmod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % P as u128) as u64
}

fn powmod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a);
        }
        a = mulmod(a, a);
        e >>= 1;
    }
    r
}

fn to_mod(c: &BigInt) -> u64 {
    let m = c.mod_floor(&BigInt::from(P));
    m.to_u64_digits().1.first().copied().unwrap_or(0)
}

/// Image of `p` in `F_P[v]` with the other variables set to `pt`.
fn image(p: &ZPoly, v: usize, pt: &[u64]) -> Vec<u64> {
    let n = p.nvars();
    let mut out = vec![0u64; p.degree_in(v) as usize + 1];
    for (m, c) in p.terms() {
        let mut t = to_mod(c);
        for i in 0..n {
            if i != v && m.exp(i) > 0 {
                t = mulmod(t, powmod(pt[i], m.exp(i) as u64));
            }
        }
        let k = m.exp(v) as usize;
        out[k] = (out[k] + t) % P;
    }
    out
}

fn deg_mod(p: &[u64]) -> Option<usize> {
    p.iter().rposition(|&c| c != 0)
}

fn gcd_degree_mod(mut a: Vec<u64>, mut b: Vec<u64>) -> usize {
    loop {
        let Some(db) = deg_mod(&b) else {
            return deg_mod(&a).unwrap_or(0);
        };
        b.truncate(db + 1);
        let inv = powmod(b[db], P - 2);
        while let Some(da) = deg_mod(&a) {
            if da < db {
                break;
            }
            let q = mulmod(a[da], inv);
            for i in 0..=db {
                let s = mulmod(q, b[i]);
                a[i + da - db] = (a[i + da - db] + P - s) % P;
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
}

/// Sound shortcut: if at a point that preserves both degrees in `v` the
/// modular images are coprime, the true gcd has degree zero in `v`.
fn coprime_image(a: &ZPoly, b: &ZPoly, v: usize) -> bool {
    let n = a.nvars();
    let (da, db) = (a.degree_in(v) as usize, b.degree_in(v) as usize);
    let mut seed = 0x2545_f491_4f6c_dd1d_u64;
    for _ in 0..3 {
        let pt: Vec<u64> = (0..n)
            .map(|_| {
                seed ^= seed << 13;
                seed ^= seed >> 7;
                seed ^= seed << 17;
                seed % P
            })
            .collect();
        let ia = image(a, v, &pt);
        let ib = image(b, v, &pt);
        if deg_mod(&ia) != Some(da) || deg_mod(&ib) != Some(db) {
            continue;
        }
        return gcd_degree_mod(ia, ib) == 0;
    }
    false
}

impl ZPoly {
    /// Negates if needed so the leading coefficient is positive.
    pub fn sign_normal(&self) -> ZPoly {
        match self.leading() {
            Some((_, c)) if c.is_negative() => self.neg(),
            _ => self.clone(),
        }
    }

    /// Primitive part with positive leading coefficient; zero stays zero.
    pub fn primitive_sign(&self) -> ZPoly {
        let p = self.primitive();
        match p.leading() {
            Some((_, c)) if c.is_negative() => p.neg(),
            _ => p,
        }
    }
}

/// Squarefree part, as a primitive integer polynomial embedded in ℚ.
/// Monomial factors are kept to multiplicity one.
pub fn squarefree(p: &QPoly, scope: SqfScope) -> QPoly {
    squarefree_z(&p.primitive_integer(), scope).to_rational()
}

pub fn squarefree_z(p: &ZPoly, scope: SqfScope) -> ZPoly {
    if p.is_zero() || p.is_constant() {
        return p.primitive_sign();
    }
    let n = p.nvars();
    let (m, core) = p.strip_monomial();
    let radical_mono = Mono::from_exps(
        &(0..n)
            .map(|i| match scope {
                SqfScope::Var(v) if v != i => 0,
                _ => m.exp(i).min(1),
            })
            .collect::<Vec<_>>(),
    );
    let vs: Vec<usize> = match scope {
        SqfScope::All => core.support_vars(),
        SqfScope::Var(v) if core.involves(v) => vec![v],
        SqfScope::Var(_) => {
            return ZPoly::one(p.vars().clone()).mul_monomial(radical_mono, &BigInt::one())
        }
    };
    let mut g = core.clone();
    for v in vs {
        if g.is_constant() {
            break;
        }
        g = gcd_z(&g, &core.partial(v));
    }
    let sqf = if g.is_constant() {
        core.primitive_sign()
    } else {
        core.div_exact(&g).expect("gcd divides").primitive_sign()
    };
    sqf.mul_monomial(radical_mono, &BigInt::one())
}

impl<C: crate::coeff::Coeff> MultiPoly<C> {
    /// `true` if the polynomial equals a nonzero scalar times `other`.
    pub fn is_scalar_multiple_of(&self, other: &Self) -> bool
    where
        C: crate::coeff::FieldCoeff,
    {
        match (self.leading(), other.leading()) {
            (None, None) => true,
            (Some((ma, ca)), Some((mb, cb))) if ma == mb => {
                other.scale(&ca.div_ref(cb)) == *self
            }
            _ => false,
        }
    }
}

/// Rational polynomial with the same zero set and integer, primitive
/// coefficients.
pub fn normalize(p: &QPoly) -> QPoly {
    p.primitive_integer().to_rational()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::vars;

    fn setup() -> (ZPoly, ZPoly, ZPoly) {
        let v = vars(&["x", "y", "z"]);
        (
            ZPoly::var(v.clone(), "x").unwrap(),
            ZPoly::var(v.clone(), "y").unwrap(),
            ZPoly::var(v, "z").unwrap(),
        )
    }

    #[test]
    fn common_factor_found() {
        let (x, y, z) = setup();
        let one = ZPoly::one(x.vars().clone());
        let f = x.mul(&y).add(&z).sub(&one);
        let a = f.mul(&x.add(&one)).mul(&z.pow(2).add(&y));
        let b = f.mul(&y.sub(&x).pow(2));
        let g = gcd_z(&a, &b);
        assert_eq!(g, f.primitive_sign());
    }

    #[test]
    fn coprime_inputs() {
        let (x, y, _) = setup();
        let one = ZPoly::one(x.vars().clone());
        let g = gcd_z(&x.add(&one), &y.add(&x).add(&one));
        assert!(g.is_constant());
    }

    #[test]
    fn integer_content_gcd() {
        let (x, _, _) = setup();
        let a = x.scale(&BigInt::from(6)).add(&ZPoly::constant(x.vars().clone(), 12.into()));
        let b = ZPoly::constant(x.vars().clone(), 9.into());
        assert_eq!(gcd_z(&a, &b), ZPoly::constant(x.vars().clone(), 3.into()));
    }

    #[test]
    fn squarefree_removes_powers() {
        let (x, y, _) = setup();
        let one = ZPoly::one(x.vars().clone());
        let f = x.mul(&y).sub(&one);
        let h = x.add(&y).add(&one);
        let p = f.pow(3).mul(&h).mul(&x.pow(2));
        let s = squarefree_z(&p, SqfScope::All);
        assert_eq!(s, f.mul(&h).mul(&x).primitive_sign());
    }

    #[test]
    fn scoped_squarefree_drops_content() {
        let (x, y, _) = setup();
        let one = ZPoly::one(x.vars().clone());
        // (y+1)^2 does not involve x, so an x-scoped reduction drops it.
        let p = x.sub(&y).pow(2).mul(&y.add(&one).pow(2));
        let s = squarefree_z(&p, SqfScope::Var(0));
        assert_eq!(s, x.sub(&y).primitive_sign());
    }
}
