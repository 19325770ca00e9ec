//! Sylvester resultants and small symbolic determinants.
//!
//! The Sylvester matrix is laid out with ascending coefficients running down
//! the columns: column `j < deg g` holds the coefficients of `x^j·f`, the
//! remaining columns those of `x^j·g`. With that layout
//! `result(x − 1, x + 1, x) = −2`; it differs from the row-descending
//! convention by the sign `(−1)^(deg f · deg g)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::coeff::Coeff;
use crate::error::PolyError;
use crate::mono::Mono;
use crate::poly::{MultiPoly, QPoly, ZPoly};

/// Caps guarding resultant computations.
#[derive(Clone, Copy, Debug)]
pub struct ResultantLimits {
    /// Largest number of terms any intermediate entry may reach.
    pub max_terms: usize,
    /// Largest predicted degree of the result in any remaining variable.
    pub max_degree: u32,
}

impl Default for ResultantLimits {
    fn default() -> Self {
        Self {
            max_terms: 2_000_000,
            max_degree: 200,
        }
    }
}

impl ResultantLimits {
    pub const UNLIMITED: ResultantLimits = ResultantLimits {
        max_terms: usize::MAX,
        max_degree: u32::MAX,
    };
}

/// Resultant with the default caps.
pub fn resultant(f: &QPoly, g: &QPoly, var: &str) -> Result<QPoly, PolyError> {
    resultant_with(f, g, var, &ResultantLimits::default())
}

/// Upper bounds on the degree of `result(f, g, var)` in each variable
/// (zero for `var` itself).
pub fn degree_bounds<C: Coeff>(f: &MultiPoly<C>, g: &MultiPoly<C>, var: usize) -> Vec<u32> {
    let (l, m) = (f.degree_in(var), g.degree_in(var));
    (0..f.nvars())
        .map(|w| {
            if w == var {
                0
            } else {
                m * f.degree_in(w) + l * g.degree_in(w)
            }
        })
        .collect()
}

pub fn resultant_with(
    f: &QPoly,
    g: &QPoly,
    var: &str,
    limits: &ResultantLimits,
) -> Result<QPoly, PolyError> {
    if f.vars() != g.vars() {
        return Err(PolyError::VariableMismatch(format!(
            "{:?} vs {:?}",
            f.vars(),
            g.vars()
        )));
    }
    let v = f.var_index(var)?;
    if f.is_zero() || g.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    let (l, m) = (f.degree_in(v), g.degree_in(v));
    match (l, m) {
        (0, 0) => return Err(PolyError::ZeroDegree(var.to_string())),
        (0, _) => return Ok(f.pow(m)),
        (_, 0) => return Ok(g.pow(l)),
        _ => {}
    }
    let bounds = degree_bounds(f, g, v);
    if let Some((w, &d)) = bounds.iter().enumerate().find(|(_, &d)| d > limits.max_degree) {
        return Err(PolyError::ResourceExhausted(format!(
            "predicted degree {d} in `{}` exceeds cap {}",
            f.vars()[w],
            limits.max_degree
        )));
    }
    let (zf, df) = f.clear_denominators();
    let (zg, dg) = g.clear_denominators();
    let r = sylvester_det(&zf, &zg, v, limits)?;
    let scale = num_traits::pow(df, m as usize) * num_traits::pow(dg, l as usize);
    let r = r.to_rational();
    if scale.is_one() {
        Ok(r)
    } else {
        let inv = num_rational::BigRational::new(<BigInt as One>::one(), scale);
        Ok(r.scale(&inv))
    }
}

/// Resultant over ℤ in the documented layout.
pub fn resultant_z(
    f: &ZPoly,
    g: &ZPoly,
    var: usize,
    limits: &ResultantLimits,
) -> Result<ZPoly, PolyError> {
    let (l, m) = (f.degree_in(var), g.degree_in(var));
    match (l, m) {
        (0, 0) => Err(PolyError::ZeroDegree(f.vars()[var].clone())),
        (0, _) => Ok(f.pow(m)),
        (_, 0) => Ok(g.pow(l)),
        _ => sylvester_det(f, g, var, limits),
    }
}

fn sylvester_det(
    f: &ZPoly,
    g: &ZPoly,
    v: usize,
    limits: &ResultantLimits,
) -> Result<ZPoly, PolyError> {
    let fc = f.to_univariate(v);
    let gc = g.to_univariate(v);
    let (l, m) = (fc.len() - 1, gc.len() - 1);
    let n = l + m;
    let zero = ZPoly::zero(f.vars().clone());
    // Build with rows = columns of the documented layout; the determinant
    // is transpose invariant.
    let mut rows: Vec<Vec<ZPoly>> = Vec::with_capacity(n);
    for j in 0..m {
        let mut row = vec![zero.clone(); n];
        for (k, c) in fc.iter().enumerate() {
            row[j + k] = c.clone();
        }
        rows.push(row);
    }
    for j in 0..l {
        let mut row = vec![zero.clone(); n];
        for (k, c) in gc.iter().enumerate() {
            row[j + k] = c.clone();
        }
        rows.push(row);
    }
    let bounds = degree_bounds(f, g, v);
    let det = interp_det(&rows, &bounds);
    if det.len() > limits.max_terms {
        return Err(PolyError::ResourceExhausted(format!(
            "resultant with {} terms exceeds cap {}",
            det.len(),
            limits.max_terms
        )));
    }
    Ok(det)
}

/// Determinant of a matrix over `ℤ[vars]` by evaluation at small integers
/// and Newton interpolation, one variable at a time. `bounds[w]` must bound
/// the determinant's degree in variable `w`.
pub fn interp_det(a: &[Vec<ZPoly>], bounds: &[u32]) -> ZPoly {
    let vars = a[0][0].vars().clone();
    let w = (0..vars.len()).rev().find(|&w| a.iter().flatten().any(|e| e.involves(w)));
    let Some(w) = w else {
        let m: Vec<Vec<BigInt>> = a
            .iter()
            .map(|row| row.iter().map(|e| e.constant_term()).collect())
            .collect();
        return ZPoly::constant(vars, int_bareiss(m));
    };
    let pts: Vec<i64> = (0..=bounds[w] as i64)
        .map(|k| if k % 2 == 1 { (k + 1) / 2 } else { -k / 2 })
        .collect();
    let values: Vec<ZPoly> = pts
        .par_iter()
        .map(|&t| {
            let t = BigInt::from(t);
            let m: Vec<Vec<ZPoly>> = a
                .iter()
                .map(|row| row.iter().map(|e| e.eval_var(w, &t)).collect())
                .collect();
            interp_det(&m, bounds)
        })
        .collect();
    // Interpolate each coefficient (a monomial free of `w`) separately.
    let mut keys: Vec<Mono> = values.iter().flat_map(|p| p.terms().iter().map(|(m, _)| *m)).collect();
    keys.sort_unstable();
    keys.dedup();
    let xs: Vec<BigRational> = pts.iter().map(|&t| BigRational::from_integer(t.into())).collect();
    let terms: Vec<(Mono, BigInt)> = keys
        .par_iter()
        .flat_map_iter(|&key| {
            let ys: Vec<BigRational> = values
                .iter()
                .map(|p| BigRational::from_integer(p.coeff_mono(key)))
                .collect();
            newton_coeffs(&xs, ys)
                .into_iter()
                .enumerate()
                .filter(|(_, c)| !Zero::is_zero(c))
                .map(move |(k, c)| {
                    assert!(c.is_integer(), "interpolated determinant is integral");
                    (key.with_exp(w, k as u32), c.to_integer())
                })
                .collect::<Vec<_>>()
        })
        .collect();
    ZPoly::from_mono_terms(vars, terms)
}

/// Monomial-basis coefficients of the interpolant through `(xs, ys)`.
pub(crate) fn newton_coeffs(xs: &[BigRational], mut dd: Vec<BigRational>) -> Vec<BigRational> {
    let n = xs.len();
    for j in 1..n {
        for i in (j..n).rev() {
            dd[i] = (&dd[i] - &dd[i - 1]) / (&xs[i] - &xs[i - j]);
        }
    }
    // Horner expansion of the Newton form.
    let mut c = vec![<BigRational as Zero>::zero(); n];
    for i in (0..n).rev() {
        // c ← c·(x − xs[i]) + dd[i]
        let mut next = vec![<BigRational as Zero>::zero(); n];
        for k in 0..n {
            if Zero::is_zero(&c[k]) {
                continue;
            }
            if k + 1 < n {
                next[k + 1] += &c[k];
            }
            next[k] -= &c[k] * &xs[i];
        }
        next[0] += &dd[i];
        c = next;
    }
    c
}

/// Fraction-free determinant of an integer matrix.
pub fn int_bareiss(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    let mut sign = false;
    let mut prev = <BigInt as One>::one();
    for k in 0..n.saturating_sub(1) {
        let Some(p) = (k..n).find(|&i| !Zero::is_zero(&a[i][k])) else {
            return <BigInt as Zero>::zero();
        };
        if p != k {
            a.swap(p, k);
            sign = !sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &a[k][k] * &a[i][j] - &a[i][k] * &a[k][j];
                a[i][j] = t / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if sign {
        -d
    } else {
        d
    }
}

/// Fraction-free determinant of a square matrix over `ℤ[vars]`.
pub fn bareiss(mut a: Vec<Vec<ZPoly>>, limits: &ResultantLimits) -> Result<ZPoly, PolyError> {
    let n = a.len();
    if n == 0 {
        return Err(PolyError::ZeroPolynomial);
    }
    let vars = a[0][0].vars().clone();
    let mut sign_flip = false;
    let mut prev = ZPoly::one(vars.clone());
    for k in 0..n.saturating_sub(1) {
        // Smallest nonzero pivot keeps intermediate products small.
        let piv = (k..n)
            .filter(|&i| !a[i][k].is_zero())
            .min_by_key(|&i| a[i][k].len());
        let Some(p) = piv else {
            return Ok(ZPoly::zero(vars));
        };
        if p != k {
            a.swap(p, k);
            sign_flip = !sign_flip;
        }
        let (top, rest) = a.split_at_mut(k + 1);
        let pivot_row = &top[k];
        let pivot = &pivot_row[k];
        let prev_ref = &prev;
        rest.par_iter_mut().try_for_each(|row| {
            let lead = row[k].clone();
            for j in (k + 1)..n {
                let t = pivot.mul(&row[j]).sub(&lead.mul(&pivot_row[j]));
                let t = if prev_ref.is_constant() && prev_ref.constant_term().is_one() {
                    t
                } else {
                    t.div_exact(prev_ref)
                        .expect("Bareiss division is exact")
                };
                if t.len() > limits.max_terms {
                    return Err(PolyError::ResourceExhausted(format!(
                        "intermediate entry with {} terms exceeds cap {}",
                        t.len(),
                        limits.max_terms
                    )));
                }
                row[j] = t;
            }
            row[k] = ZPoly::zero(pivot.vars().clone());
            Ok(())
        })?;
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    Ok(if sign_flip { det.neg() } else { det })
}

/// Determinant of a small square matrix by expansion over column subsets,
/// exact in any coefficient ring.
pub fn poly_det<C: Coeff>(m: &[Vec<MultiPoly<C>>]) -> MultiPoly<C> {
    let n = m.len();
    assert!(n > 0 && m.iter().all(|r| r.len() == n), "square matrix");
    assert!(n <= 16, "subset expansion is for small matrices");
    let vars = m[0][0].vars().clone();
    // dp[mask]: determinant of the minor on rows 0..popcount(mask) and the
    // columns in mask.
    let mut dp: Vec<Option<MultiPoly<C>>> = vec![None; 1 << n];
    dp[0] = Some(MultiPoly::one(vars.clone()));
    for mask in 1usize..(1 << n) {
        let row = mask.count_ones() as usize - 1;
        let mut acc = MultiPoly::zero(vars.clone());
        for col in 0..n {
            if mask & (1 << col) == 0 {
                continue;
            }
            // Sign from the position of `col` among the chosen columns.
            let higher = (mask >> (col + 1)).count_ones() as usize;
            let minor = dp[mask ^ (1 << col)].as_ref().expect("filled");
            if m[row][col].is_zero() || minor.is_zero() {
                continue;
            }
            let t = m[row][col].mul(minor);
            acc = if higher % 2 == 0 { acc.add(&t) } else { acc.sub(&t) };
        }
        dp[mask] = Some(acc);
    }
    dp[(1 << n) - 1].take().expect("filled")
}

/// Matrix of cofactors `C_ij = (−1)^(i+j) det(minor_ij)`.
pub fn cofactors<C: Coeff>(m: &[Vec<MultiPoly<C>>]) -> Vec<Vec<MultiPoly<C>>> {
    let n = m.len();
    let vars = m[0][0].vars().clone();
    if n == 1 {
        return vec![vec![MultiPoly::one(vars)]];
    }
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let minor: Vec<Vec<MultiPoly<C>>> = (0..n)
                        .filter(|&r| r != i)
                        .map(|r| {
                            (0..n)
                                .filter(|&c| c != j)
                                .map(|c| m[r][c].clone())
                                .collect()
                        })
                        .collect();
                    let d = poly_det(&minor);
                    if (i + j) % 2 == 0 {
                        d
                    } else {
                        d.neg()
                    }
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::vars;
    use num_rational::BigRational;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn linear_pair_sign_convention() {
        let v = vars(&["x"]);
        let x = QPoly::var(v.clone(), "x").unwrap();
        let one = QPoly::one(v);
        let r = resultant(&x.sub(&one), &x.add(&one), "x").unwrap();
        assert_eq!(r.constant_term(), q(-2));
        let z = resultant(&x.sub(&one), &x.sub(&one), "x").unwrap();
        assert!(z.is_zero());
    }

    #[test]
    fn degenerate_degrees() {
        let v = vars(&["x", "y"]);
        let x = QPoly::var(v.clone(), "x").unwrap();
        let y = QPoly::var(v.clone(), "y").unwrap();
        let r = resultant(&y, &x.pow(3), "x").unwrap();
        assert_eq!(r, y.pow(3));
        assert!(matches!(resultant(&y, &y, "x"), Err(PolyError::ZeroDegree(_))));
        assert!(matches!(
            resultant(&QPoly::zero(v), &x, "x"),
            Err(PolyError::ZeroPolynomial)
        ));
    }

    #[test]
    fn eliminates_to_known_curve() {
        // x^2 + y^2 - 1 and x - y: eliminating x leaves 2y^2 - 1 up to sign.
        let v = vars(&["x", "y"]);
        let x = QPoly::var(v.clone(), "x").unwrap();
        let y = QPoly::var(v.clone(), "y").unwrap();
        let one = QPoly::one(v);
        let r = resultant(&x.pow(2).add(&y.pow(2)).sub(&one), &x.sub(&y), "x").unwrap();
        let expect = y.pow(2).scale(&q(2)).sub(&one);
        assert!(r == expect || r == expect.neg(), "{r}");
    }

    #[test]
    fn rational_denominators_rescaled() {
        let v = vars(&["x"]);
        let x = QPoly::var(v.clone(), "x").unwrap();
        let half = BigRational::new(1.into(), 2.into());
        let one = QPoly::one(v);
        // (x/2 - 1) vs (x + 1): standard res = (1/2)·(2 + 1)... evaluate directly.
        let f = x.scale(&half).sub(&one);
        let g = x.add(&one);
        let r = resultant(&f, &g, "x").unwrap().constant_term();
        // Layout sign (−1)^1 times lc(f)^1 · g(2) = 1/2 · 3.
        assert_eq!(r, -BigRational::new(3.into(), 2.into()));
    }

    #[test]
    fn degree_cap_predicted() {
        let v = vars(&["x", "y"]);
        let x = QPoly::var(v.clone(), "x").unwrap();
        let y = QPoly::var(v.clone(), "y").unwrap();
        let f = x.pow(10).add(&y.pow(30));
        let lim = ResultantLimits {
            max_terms: 1000,
            max_degree: 100,
        };
        assert!(matches!(
            resultant_with(&f, &f.add(&x), "x", &lim),
            Err(PolyError::ResourceExhausted(_))
        ));
    }

    #[test]
    fn small_determinants() {
        let v = vars(&["x", "y"]);
        let x = QPoly::var(v.clone(), "x").unwrap();
        let y = QPoly::var(v.clone(), "y").unwrap();
        let one = QPoly::one(v.clone());
        let zero = QPoly::zero(v.clone());
        let id = vec![vec![one.clone(), zero.clone()], vec![zero.clone(), one.clone()]];
        assert_eq!(poly_det(&id), one);
        let d = vec![
            vec![one.sub(&y), zero.clone()],
            vec![zero.clone(), one.sub(&x.mul(&y))],
        ];
        assert_eq!(poly_det(&d), one.sub(&y).mul(&one.sub(&x.mul(&y))));
        // 3x3 against a hand expansion.
        let m = vec![
            vec![x.clone(), one.clone(), zero.clone()],
            vec![y.clone(), x.clone(), one.clone()],
            vec![one.clone(), y.clone(), x.clone()],
        ];
        let expect = x.pow(3).sub(&x.mul(&y).scale(&q(2))).add(&one);
        assert_eq!(poly_det(&m), expect);
        let c = cofactors(&m);
        // Row expansion with cofactors reproduces the determinant.
        let row0 = (0..3).fold(QPoly::zero(v), |acc, j| acc.add(&m[0][j].mul(&c[0][j])));
        assert_eq!(row0, expect);
    }
}
