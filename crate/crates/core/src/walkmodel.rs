//! Walk specifications, exact coin arithmetic and the Cayley transform.
//!
//! A walk on `Z^d` has `k` chiralities; chirality `j` moves by `steps[j]`.
//! One time step applies the coin and then shifts: the amplitude at `(r, j)`
//! contributes `U[i][j]` times itself to `(r + steps[i], i)`.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use qrw_poly::ExactScalar;
use serde::{Deserialize, Serialize};

use crate::error::{QrwError, Result};

pub type ExactMatrix = Vec<Vec<ExactScalar>>;
pub type FloatMatrix = Vec<Vec<Complex64>>;

/// The unitary acting on the chirality space.
#[derive(Clone, Debug, PartialEq)]
pub enum CoinMatrix {
    Exact(ExactMatrix),
    Float(FloatMatrix),
}

impl CoinMatrix {
    pub fn k(&self) -> usize {
        match self {
            CoinMatrix::Exact(m) => m.len(),
            CoinMatrix::Float(m) => m.len(),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, CoinMatrix::Exact(_))
    }

    pub fn exact(&self) -> Option<&ExactMatrix> {
        match self {
            CoinMatrix::Exact(m) => Some(m),
            CoinMatrix::Float(_) => None,
        }
    }

    pub fn to_complex(&self) -> FloatMatrix {
        match self {
            CoinMatrix::Exact(m) => m
                .iter()
                .map(|row| row.iter().map(|e| e.to_complex()).collect())
                .collect(),
            CoinMatrix::Float(m) => m.clone(),
        }
    }

    /// Exact real entries as rationals; errors for float or complex coins.
    pub fn real_rational(&self) -> Result<Vec<Vec<BigRational>>> {
        let m = self.exact().ok_or(QrwError::NonExactCoin)?;
        m.iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .map(|(j, e)| {
                        if e.is_real() {
                            Ok(e.re.clone())
                        } else {
                            Err(QrwError::ComplexCoin(i, j))
                        }
                    })
                    .collect()
            })
            .collect()
    }

    pub fn scale(&self, c: i64) -> CoinMatrix {
        match self {
            CoinMatrix::Exact(m) => {
                let s = ExactScalar::from_integer(c);
                CoinMatrix::Exact(
                    m.iter()
                        .map(|r| r.iter().map(|e| e * &s).collect())
                        .collect(),
                )
            }
            CoinMatrix::Float(m) => CoinMatrix::Float(
                m.iter()
                    .map(|r| r.iter().map(|e| e * c as f64).collect())
                    .collect(),
            ),
        }
    }
}

/// A walk: dimension, chirality count, step vectors and coin.
#[derive(Clone, Debug, PartialEq)]
pub struct WalkSpec {
    pub d: usize,
    pub k: usize,
    pub steps: Vec<Vec<i64>>,
    pub coin: CoinMatrix,
}

impl WalkSpec {
    /// Checks shapes only; unitarity and `k ≥ d + 1` are reported by
    /// [`validate_spec`].
    pub fn new(d: usize, steps: Vec<Vec<i64>>, coin: CoinMatrix) -> Result<Self> {
        let k = steps.len();
        if d == 0 {
            return Err(QrwError::Config("dimension must be positive".into()));
        }
        if let Some(s) = steps.iter().find(|s| s.len() != d) {
            return Err(QrwError::Config(format!("step {s:?} is not {d}-dimensional")));
        }
        if coin.k() != k {
            return Err(QrwError::Config(format!(
                "coin is {}x{}, but there are {k} steps",
                coin.k(),
                coin.k()
            )));
        }
        let square = match &coin {
            CoinMatrix::Exact(m) => m.iter().all(|r| r.len() == k),
            CoinMatrix::Float(m) => m.iter().all(|r| r.len() == k),
        };
        if !square {
            return Err(QrwError::Config("coin matrix is not square".into()));
        }
        Ok(Self { d, k, steps, coin })
    }

    /// Short stable identifier derived from the canonical JSON form.
    pub fn id(&self) -> String {
        let json = serde_json::to_string(&SpecJson::from(self)).expect("serialisable");
        // FNV-1a: stable across platforms and releases.
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in json.bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
        format!("{h:016x}")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&SpecJson::from(self)).expect("serialisable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: SpecJson = serde_json::from_str(s)?;
        WalkSpec::try_from(j)
    }

    /// Per-axis range of step components, `(min, max)`.
    pub fn step_range(&self, axis: usize) -> (i64, i64) {
        let it = self.steps.iter().map(|s| s[axis]);
        (it.clone().min().unwrap_or(0), it.max().unwrap_or(0))
    }
}

/// Outcome of [`validate_spec`]; failures are data, not errors.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ValidationReport {
    pub unitary: bool,
    /// Largest `|(U·U* − I)_ij|`; exactly zero for exact unitary coins.
    pub max_deviation: f64,
    /// Offending entry `(i, j, value of (U·U* − I)_ij)`, if any.
    pub offending: Option<(usize, usize, String)>,
    pub chirality_ok: bool,
    pub messages: Vec<String>,
}

impl ValidationReport {
    pub fn valid(&self) -> bool {
        self.unitary && self.chirality_ok
    }
}

/// Checks `U·U* = I` (exactly, or to `float_tol` for float coins) and
/// `k ≥ d + 1`.
pub fn validate_spec(spec: &WalkSpec, float_tol: f64) -> ValidationReport {
    let k = spec.k;
    let mut messages = Vec::new();
    let (unitary, max_dev, offending) = match &spec.coin {
        CoinMatrix::Exact(u) => {
            let p = mat_mul(u, &conj_transpose(u));
            let mut worst: Option<(usize, usize, ExactScalar)> = None;
            let mut max_dev = 0.0f64;
            for i in 0..k {
                for j in 0..k {
                    let target = if i == j { ExactScalar::one() } else { ExactScalar::zero() };
                    let diff = &p[i][j] - &target;
                    if !diff.is_zero() {
                        let dv = diff.to_complex().norm();
                        if dv > max_dev || worst.is_none() {
                            max_dev = max_dev.max(dv);
                            worst = Some((i, j, diff));
                        }
                    }
                }
            }
            let off = worst.map(|(i, j, v)| (i, j, v.to_string()));
            (off.is_none(), max_dev, off)
        }
        CoinMatrix::Float(u) => {
            let mut max_dev = 0.0f64;
            let mut off = None;
            for i in 0..k {
                for j in 0..k {
                    let s: Complex64 = (0..k).map(|m| u[i][m] * u[j][m].conj()).sum();
                    let t = if i == j { 1.0 } else { 0.0 };
                    let dv = (s - t).norm();
                    if dv > max_dev {
                        max_dev = dv;
                        if dv > float_tol {
                            off = Some((i, j, format!("{:e}", s - t)));
                        }
                    }
                }
            }
            (max_dev <= float_tol, max_dev, off)
        }
    };
    if let Some((i, j, v)) = &offending {
        messages.push(format!(
            "coin is not unitary: (U U* - I)[{}][{}] = {v}",
            i + 1,
            j + 1
        ));
    }
    let chirality_ok = k >= spec.d + 1;
    if !chirality_ok {
        messages.push(format!("k = {k} chiralities is below d + 1 = {}", spec.d + 1));
    }
    ValidationReport {
        unitary,
        max_deviation: max_dev,
        offending,
        chirality_ok,
        messages,
    }
}

pub fn identity(k: usize) -> ExactMatrix {
    (0..k)
        .map(|i| {
            (0..k)
                .map(|j| if i == j { ExactScalar::one() } else { ExactScalar::zero() })
                .collect()
        })
        .collect()
}

pub fn mat_mul(a: &ExactMatrix, b: &ExactMatrix) -> ExactMatrix {
    let n = a.len();
    let m = b[0].len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut s = ExactScalar::zero();
                    for (t, bt) in b.iter().enumerate() {
                        if !a[i][t].is_zero() && !bt[j].is_zero() {
                            s = &s + &(&a[i][t] * &bt[j]);
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

pub fn conj_transpose(a: &ExactMatrix) -> ExactMatrix {
    let n = a.len();
    let m = a[0].len();
    (0..m).map(|j| (0..n).map(|i| a[i][j].conj()).collect()).collect()
}

/// Exact inverse by Gauss–Jordan elimination over ℚ(i).
pub fn exact_inverse(m: &ExactMatrix) -> Result<ExactMatrix> {
    let n = m.len();
    if m.iter().any(|r| r.len() != n) {
        return Err(QrwError::Config("matrix is not square".into()));
    }
    let mut a: Vec<Vec<ExactScalar>> = m
        .iter()
        .zip(identity(n))
        .map(|(r, e)| r.iter().cloned().chain(e).collect())
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero()).ok_or(QrwError::Singular)?;
        a.swap(col, piv);
        let inv = a[col][col].recip();
        for e in a[col].iter_mut() {
            *e = &*e * &inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in 0..2 * n {
                    let t = &f * &a[col][c];
                    a[r][c] = &a[r][c] - &t;
                }
            }
        }
    }
    Ok(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// `(I + S)(I − S)⁻¹` for skew-symmetric (or skew-Hermitian) `S`: an exactly
/// orthogonal (or unitary) matrix with rational entries.
pub fn cayley_orthogonal(s: &ExactMatrix) -> Result<CoinMatrix> {
    let n = s.len();
    if s.iter().any(|r| r.len() != n) {
        return Err(QrwError::Config("skew input is not square".into()));
    }
    for i in 0..n {
        for j in 0..n {
            if s[i][j] != -&s[j][i].conj() {
                return Err(QrwError::NotSkew(format!(
                    "S[{i}][{j}] = {} but -conj(S[{j}][{i}]) = {}",
                    s[i][j],
                    -&s[j][i].conj()
                )));
            }
        }
    }
    let id = identity(n);
    let plus: ExactMatrix = (0..n)
        .map(|i| (0..n).map(|j| &id[i][j] + &s[i][j]).collect())
        .collect();
    let minus: ExactMatrix = (0..n)
        .map(|i| (0..n).map(|j| &id[i][j] - &s[i][j]).collect())
        .collect();
    let inv = exact_inverse(&minus).map_err(|_| QrwError::SingularCayley)?;
    Ok(CoinMatrix::Exact(mat_mul(&plus, &inv)))
}

/// Matrix of small integers as exact scalars.
pub fn int_matrix(rows: &[&[i64]]) -> ExactMatrix {
    rows.iter()
        .map(|r| r.iter().map(|&v| ExactScalar::from_integer(v)).collect())
        .collect()
}

/// Random skew-symmetric integer matrix with entries in `{−b, …, b}`.
pub fn random_skew<R: rand::Rng>(k: usize, b: i64, rng: &mut R) -> ExactMatrix {
    let mut m = vec![vec![ExactScalar::zero(); k]; k];
    for i in 0..k {
        for j in (i + 1)..k {
            let v = rng.gen_range(-b..=b);
            m[i][j] = ExactScalar::from_integer(v);
            m[j][i] = ExactScalar::from_integer(-v);
        }
    }
    m
}

// ---- JSON ----

/// One coin entry in the walk-spec file. Exact entries are decimal strings:
/// a real entry is `["num","den"]`, a complex one `[["num","den"],["num","den"]]`
/// (real part, imaginary part). Float entries are `[re, im]` numbers.
#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(untagged)]
pub enum EntryJson {
    Real([String; 2]),
    Complex([[String; 2]; 2]),
    Float([f64; 2]),
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct CoinJson {
    pub mode: String,
    pub entries: Vec<Vec<EntryJson>>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct SpecJson {
    pub d: usize,
    pub k: usize,
    pub steps: Vec<Vec<i64>>,
    pub coin: CoinJson,
}

fn ratio_strings(r: &BigRational) -> [String; 2] {
    [r.numer().to_string(), r.denom().to_string()]
}

fn parse_ratio(p: &[String; 2]) -> Result<BigRational> {
    let n: BigInt = p[0]
        .trim()
        .parse()
        .map_err(|_| QrwError::Config(format!("bad numerator {:?}", p[0])))?;
    let d: BigInt = p[1]
        .trim()
        .parse()
        .map_err(|_| QrwError::Config(format!("bad denominator {:?}", p[1])))?;
    if d.is_zero() {
        return Err(QrwError::Config("zero denominator in coin entry".into()));
    }
    Ok(BigRational::new(n, d))
}

impl From<&WalkSpec> for SpecJson {
    fn from(s: &WalkSpec) -> Self {
        let (mode, entries) = match &s.coin {
            CoinMatrix::Exact(m) => (
                "exact",
                m.iter()
                    .map(|r| {
                        r.iter()
                            .map(|e| {
                                if e.is_real() {
                                    EntryJson::Real(ratio_strings(&e.re))
                                } else {
                                    EntryJson::Complex([ratio_strings(&e.re), ratio_strings(&e.im)])
                                }
                            })
                            .collect()
                    })
                    .collect(),
            ),
            CoinMatrix::Float(m) => (
                "float",
                m.iter()
                    .map(|r| r.iter().map(|e| EntryJson::Float([e.re, e.im])).collect())
                    .collect(),
            ),
        };
        SpecJson {
            d: s.d,
            k: s.k,
            steps: s.steps.clone(),
            coin: CoinJson {
                mode: mode.into(),
                entries,
            },
        }
    }
}

impl TryFrom<SpecJson> for WalkSpec {
    type Error = QrwError;

    fn try_from(j: SpecJson) -> Result<Self> {
        if j.k != j.steps.len() {
            return Err(QrwError::Config(format!(
                "k = {} but {} steps given",
                j.k,
                j.steps.len()
            )));
        }
        let coin = match j.coin.mode.as_str() {
            "exact" => {
                let mut m = Vec::new();
                for row in &j.coin.entries {
                    let mut r = Vec::new();
                    for e in row {
                        r.push(match e {
                            EntryJson::Real(p) => ExactScalar::real(parse_ratio(p)?),
                            EntryJson::Complex([a, b]) => {
                                ExactScalar::new(parse_ratio(a)?, parse_ratio(b)?)
                            }
                            EntryJson::Float(_) => {
                                return Err(QrwError::Config(
                                    "exact coin entries must be decimal strings".into(),
                                ))
                            }
                        });
                    }
                    m.push(r);
                }
                CoinMatrix::Exact(m)
            }
            "float" => {
                let mut m = Vec::new();
                for row in &j.coin.entries {
                    let mut r = Vec::new();
                    for e in row {
                        r.push(match e {
                            EntryJson::Float([a, b]) => Complex64::new(*a, *b),
                            EntryJson::Real(p) => {
                                Complex64::new(qrw_poly::ratio_to_f64(&parse_ratio(p)?), 0.0)
                            }
                            EntryJson::Complex([a, b]) => Complex64::new(
                                qrw_poly::ratio_to_f64(&parse_ratio(a)?),
                                qrw_poly::ratio_to_f64(&parse_ratio(b)?),
                            ),
                        });
                    }
                    m.push(r);
                }
                CoinMatrix::Float(m)
            }
            other => return Err(QrwError::Config(format!("unknown coin mode {other:?}"))),
        };
        WalkSpec::new(j.d, j.steps, coin)
    }
}

/// `true` if every entry is a real rational (the elimination pipelines'
/// requirement).
pub fn is_real_exact(coin: &CoinMatrix) -> bool {
    coin.exact()
        .is_some_and(|m| m.iter().flatten().all(|e| e.is_real()))
}

/// Least common multiple of all entry denominators (real and imaginary).
pub fn common_denominator(m: &ExactMatrix) -> BigInt {
    use num_integer::Integer;
    m.iter().flatten().fold(BigInt::one(), |acc, e| {
        acc.lcm(e.re.denom()).lcm(e.im.denom())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_two_by_two() {
        let m = int_matrix(&[&[1, -1], &[1, 1]]);
        let inv = exact_inverse(&m).unwrap();
        let half = ExactScalar::from_ratio(1, 2);
        assert_eq!(inv, vec![vec![half.clone(), half.clone()], vec![-&half, half]]);
        assert!(matches!(
            exact_inverse(&int_matrix(&[&[1, 1], &[1, 1]])),
            Err(QrwError::Singular)
        ));
    }

    #[test]
    fn cayley_small_cases() {
        let z = int_matrix(&[&[0, 0], &[0, 0]]);
        assert_eq!(cayley_orthogonal(&z).unwrap(), CoinMatrix::Exact(identity(2)));
        let s = int_matrix(&[&[0, 1], &[-1, 0]]);
        assert_eq!(cayley_orthogonal(&s).unwrap(), CoinMatrix::Exact(s.clone()));
        assert!(matches!(
            cayley_orthogonal(&int_matrix(&[&[0, 1], &[1, 0]])),
            Err(QrwError::NotSkew(_))
        ));
    }

    #[test]
    fn json_round_trip() {
        let s = int_matrix(&[&[0, 1, 2], &[-1, 0, 1], &[-2, -1, 0]]);
        let spec = WalkSpec::new(
            1,
            vec![vec![-1], vec![0], vec![1]],
            cayley_orthogonal(&s).unwrap(),
        )
        .unwrap();
        let back = WalkSpec::from_json(&spec.to_json()).unwrap();
        assert_eq!(back, spec);
        assert_eq!(back.id(), spec.id());
    }
}
