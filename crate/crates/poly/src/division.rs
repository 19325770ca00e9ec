//! Exact multivariate division and univariate pseudo-remainders.

use std::collections::BTreeMap;

use crate::coeff::{Coeff, ExactDiv};
use crate::error::PolyError;
use crate::mono::Mono;
use crate::poly::MultiPoly;

impl<C: ExactDiv> MultiPoly<C> {
    /// `self / d` when the quotient is a polynomial, `NotExact` otherwise.
    pub fn div_exact(&self, d: &Self) -> Result<Self, PolyError> {
        if d.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        if self.is_zero() {
            return Ok(self.clone());
        }
        let n = self.nvars();
        let (dm, dc) = d.leading().expect("nonzero").clone();
        if d.len() == 1 {
            let mut terms = Vec::with_capacity(self.len());
            for (m, c) in self.terms() {
                if !dm.divides(*m, n) {
                    return Err(PolyError::NotExact);
                }
                let q = c.div_exact(&dc).ok_or(PolyError::NotExact)?;
                terms.push((dm.quotient_of(*m), q));
            }
            return Ok(Self::from_sorted(self.vars().clone(), terms));
        }
        let mut rem: BTreeMap<Mono, C> = self.terms().iter().cloned().collect();
        let mut quot: Vec<(Mono, C)> = Vec::new();
        let tail = &d.terms()[1..];
        while let Some((&m, _)) = rem.last_key_value() {
            let c = rem.remove(&m).expect("present");
            if !dm.divides(m, n) {
                return Err(PolyError::NotExact);
            }
            let qm = dm.quotient_of(m);
            let qc = c.div_exact(&dc).ok_or(PolyError::NotExact)?;
            for (tm, tc) in tail {
                let key = qm.mul(*tm);
                let v = qc.mul_ref(tc);
                match rem.entry(key) {
                    std::collections::btree_map::Entry::Occupied(mut e) => {
                        e.get_mut().sub_assign_ref(&v);
                        if e.get().is_zero() {
                            e.remove();
                        }
                    }
                    std::collections::btree_map::Entry::Vacant(e) => {
                        e.insert(v.neg_ref());
                    }
                }
            }
            quot.push((qm, qc));
        }
        // Quotient terms come out in strictly descending order.
        Ok(Self::from_sorted(self.vars().clone(), quot))
    }

    /// Divides every coefficient by the scalar `c` exactly.
    pub fn div_scalar_exact(&self, c: &C) -> Result<Self, PolyError> {
        let mut terms = Vec::with_capacity(self.len());
        for (m, a) in self.terms() {
            terms.push((*m, a.div_exact(c).ok_or(PolyError::NotExact)?));
        }
        Ok(Self::from_sorted(self.vars().clone(), terms))
    }
}

/// Dense univariate polynomial whose coefficients live in the full ring.
pub(crate) type Dense<C> = Vec<MultiPoly<C>>;

pub(crate) fn trim<C: Coeff>(p: &mut Dense<C>) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

/// Pseudo-remainder `lc(b)^(deg a - deg b + 1) · a mod b`.
pub(crate) fn prem<C: Coeff>(a: &Dense<C>, b: &Dense<C>) -> Dense<C> {
    let db = b.len() - 1;
    let lb = &b[db];
    let mut r = a.clone();
    trim(&mut r);
    let mut k = (r.len() as isize - db as isize).max(0) as u32;
    while r.len() > db && !r.is_empty() {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        let shift = dr - db;
        for c in r.iter_mut() {
            *c = c.mul(lb);
        }
        for (i, bc) in b.iter().enumerate() {
            let t = bc.mul(&lr);
            r[i + shift] = r[i + shift].sub(&t);
        }
        debug_assert!(r[dr].is_zero());
        r.pop();
        trim(&mut r);
        k = k.saturating_sub(1);
    }
    if k > 0 {
        let f = lb.pow(k);
        for c in r.iter_mut() {
            *c = c.mul(&f);
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{vars, QPoly, ZPoly};
    use num_bigint::BigInt;

    #[test]
    fn exact_quotient_recovered() {
        let v = vars(&["x", "y"]);
        let x = ZPoly::var(v.clone(), "x").unwrap();
        let y = ZPoly::var(v.clone(), "y").unwrap();
        let one = ZPoly::one(v);
        let a = x.pow(3).sub(&y.mul(&x).scale(&BigInt::from(2))).add(&one);
        let b = x.add(&y.pow(2)).sub(&one);
        let p = a.mul(&b);
        assert_eq!(p.div_exact(&b).unwrap(), a);
        assert_eq!(p.div_exact(&a).unwrap(), b);
        assert_eq!(p.add(&one).div_exact(&b), Err(PolyError::NotExact));
    }

    #[test]
    fn integer_division_rejects_fractions() {
        let v = vars(&["x"]);
        let x = ZPoly::var(v.clone(), "x").unwrap();
        let two = ZPoly::constant(v.clone(), BigInt::from(2));
        assert!(x.div_exact(&two).is_err());
        let xq = QPoly::var(v, "x").unwrap();
        assert!(xq.div_exact(&xq.scale(&num_rational::BigRational::from_integer(2.into()))).is_ok());
    }
}
