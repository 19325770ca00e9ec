//! Packed monomials.
//!
//! A monomial in up to [`MAX_VARS`] variables is stored in one `u128`: the top
//! 16 bits hold the total degree and each variable owns a 16-bit field below
//! it, variable 0 most significant. Integer comparison of the packed words is
//! then graded lexicographic order, and monomial multiplication is integer
//! addition.

pub const MAX_VARS: usize = 7;
const FIELD: u32 = 16;
const MASK: u128 = 0xffff;
const DEG_SHIFT: u32 = 112;
/// Largest exponent (and total degree) a packed monomial can hold.
pub const MAX_EXP: u32 = 0xffff;

#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Mono(u128);

#[inline]
fn shift(i: usize) -> u32 {
    debug_assert!(i < MAX_VARS);
    FIELD * (MAX_VARS as u32 - 1 - i as u32)
}

impl Mono {
    pub const ONE: Mono = Mono(0);

    pub fn from_exps(exps: &[u32]) -> Mono {
        assert!(exps.len() <= MAX_VARS, "at most {MAX_VARS} variables");
        let mut w = 0u128;
        let mut total = 0u32;
        for (i, &e) in exps.iter().enumerate() {
            assert!(e <= MAX_EXP, "exponent {e} overflows packed monomial");
            w |= (e as u128) << shift(i);
            total += e;
        }
        assert!(total <= MAX_EXP, "total degree {total} overflows packed monomial");
        Mono(w | ((total as u128) << DEG_SHIFT))
    }

    /// The monomial `x_i^e`.
    pub fn var(i: usize, e: u32) -> Mono {
        let mut exps = [0u32; MAX_VARS];
        exps[i] = e;
        Mono::from_exps(&exps[..=i])
    }

    #[inline]
    pub fn exp(self, i: usize) -> u32 {
        ((self.0 >> shift(i)) & MASK) as u32
    }

    #[inline]
    pub fn total(self) -> u32 {
        (self.0 >> DEG_SHIFT) as u32
    }

    #[inline]
    pub fn mul(self, other: Mono) -> Mono {
        debug_assert!(self.total() + other.total() <= MAX_EXP);
        Mono(self.0 + other.0)
    }

    /// `true` if `self` divides `other` (componentwise `≤`).
    #[inline]
    pub fn divides(self, other: Mono, nvars: usize) -> bool {
        (0..nvars).all(|i| self.exp(i) <= other.exp(i))
    }

    /// `other / self`; caller guarantees divisibility.
    #[inline]
    pub fn quotient_of(self, other: Mono) -> Mono {
        Mono(other.0 - self.0)
    }

    pub fn exps(self, nvars: usize) -> Vec<u32> {
        (0..nvars).map(|i| self.exp(i)).collect()
    }

    /// Same monomial with the exponent of variable `i` replaced by `e`.
    pub fn with_exp(self, i: usize, e: u32) -> Mono {
        let old = self.exp(i) as u128;
        let total = self.total() as u128 - old + e as u128;
        assert!(total <= MAX_EXP as u128);
        let cleared = self.0 & !(MASK << shift(i)) & !(MASK << DEG_SHIFT);
        Mono(cleared | ((e as u128) << shift(i)) | (total << DEG_SHIFT))
    }

    /// Componentwise minimum (monomial gcd).
    pub fn gcd(self, other: Mono, nvars: usize) -> Mono {
        let e: Vec<u32> = (0..nvars)
            .map(|i| self.exp(i).min(other.exp(i)))
            .collect();
        Mono::from_exps(&e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_lex_order() {
        let x2 = Mono::from_exps(&[2, 0]);
        let xy = Mono::from_exps(&[1, 1]);
        let y3 = Mono::from_exps(&[0, 3]);
        assert!(y3 > x2, "higher total degree wins");
        assert!(x2 > xy, "ties broken lexicographically");
    }

    #[test]
    fn multiply_and_divide() {
        let a = Mono::from_exps(&[1, 2, 3]);
        let b = Mono::from_exps(&[4, 0, 1]);
        let p = a.mul(b);
        assert_eq!(p.exps(3), vec![5, 2, 4]);
        assert_eq!(p.total(), 11);
        assert!(a.divides(p, 3));
        assert!(!p.divides(a, 3));
        assert_eq!(a.quotient_of(p), b);
        assert_eq!(p.with_exp(1, 0).exps(3), vec![5, 0, 4]);
        assert_eq!(p.with_exp(1, 0).total(), 9);
    }
}
