//! Simultaneous complex root finding (Aberth–Ehrlich) for numeric fibers.

use num_complex::Complex64;

fn horner_with_derivative(p: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut v = Complex64::new(0.0, 0.0);
    let mut d = Complex64::new(0.0, 0.0);
    for c in p.iter().rev() {
        d = d * z + v;
        v = v * z + c;
    }
    (v, d)
}

/// All complex roots of `Σ p[k] z^k`, with multiplicity. Leading zero
/// coefficients are dropped; an identically zero input yields no roots.
pub fn complex_roots(p: &[Complex64]) -> Vec<Complex64> {
    let scale = p.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Vec::new();
    }
    let tiny = scale * 1e-300;
    let Some(deg) = p.iter().rposition(|c| c.norm() > tiny) else {
        return Vec::new();
    };
    // Zero roots are exact when low coefficients vanish identically.
    let low = p.iter().position(|c| c.norm() > tiny).unwrap_or(0);
    let mut roots = vec![Complex64::new(0.0, 0.0); low];
    let q: Vec<Complex64> = p[low..=deg].iter().map(|c| c / p[deg]).collect();
    let n = q.len() - 1;
    if n == 0 {
        return roots;
    }
    if n == 1 {
        roots.push(-q[0]);
        return roots;
    }
    // Initial guesses on a circle of the Cauchy-type radius, offset to
    // break symmetry.
    let radius = q[..n]
        .iter()
        .enumerate()
        .map(|(k, c)| c.norm().powf(1.0 / (n - k) as f64))
        .fold(0.0, f64::max)
        .max(1e-3);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let th = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            Complex64::from_polar(radius, th)
        })
        .collect();
    let mut done = vec![false; n];
    for _ in 0..500 {
        let mut all = true;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (v, d) = horner_with_derivative(&q, z[i]);
            if v.norm() == 0.0 {
                done[i] = true;
                continue;
            }
            let ratio = v / d;
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    s += 1.0 / (z[i] - z[j]);
                }
            }
            let w = ratio / (1.0 - ratio * s);
            if !w.is_finite() {
                continue;
            }
            z[i] -= w;
            if w.norm() <= 1e-15 * z[i].norm().max(1.0) {
                done[i] = true;
            } else {
                all = false;
            }
        }
        if all {
            break;
        }
    }
    // Newton polish against the original scaling.
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let (v, d) = horner_with_derivative(&q, *zi);
            if d.norm() == 0.0 {
                break;
            }
            let step = v / d;
            if !step.is_finite() || step.norm() > 1e-6 * zi.norm().max(1.0) {
                break;
            }
            *zi -= step;
        }
    }
    roots.extend(z);
    roots
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn cubic_roots() {
        // (z-1)(z+2)(z-3) = z^3 - 2z^2 - 5z + 6
        let mut r = complex_roots(&[c(6.0), c(-5.0), c(-2.0), c(1.0)]);
        r.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        for (got, want) in r.iter().zip([-2.0, 1.0, 3.0]) {
            assert!((got - c(want)).norm() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn unit_circle_roots() {
        // z^2 + 1
        let r = complex_roots(&[c(1.0), c(0.0), c(1.0)]);
        assert_eq!(r.len(), 2);
        for z in r {
            assert!((z.norm() - 1.0).abs() < 1e-12 && z.re.abs() < 1e-12);
        }
    }

    #[test]
    fn zero_roots_and_leading_zeros() {
        let r = complex_roots(&[c(0.0), c(-1.0), c(1.0), c(0.0)]);
        assert_eq!(r.len(), 2);
        assert!(r.iter().any(|z| z.norm() < 1e-15));
        assert!(r.iter().any(|z| (z - c(1.0)).norm() < 1e-12));
    }
}
