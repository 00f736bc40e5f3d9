//! Exact coefficient rings.
//!
//! Scalars are Gaussian rationals `a + b i` with arbitrary-precision rational
//! parts. Functions on the n-torus are finite Fourier sums
//! `Σ c_k exp(i k·x)` with coordinates of period 2π, so differentiation
//! multiplies a coefficient by `i k_axis` and never leaves ℚ(i).

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Arbitrary-precision rational number, always in lowest terms.
pub type Rational = BigRational;

/// Integer mode vector `k ∈ ℤⁿ` of a Fourier term.
pub type Mode = Vec<i64>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoeffError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("axis {axis} out of range 1..={dim}")]
    AxisOutOfRange { axis: usize, dim: usize },
    #[error("evaluation point has length {got}, expected {expected}")]
    PointLength { got: usize, expected: usize },
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

fn rat_to_f64(r: &Rational) -> f64 {
    // Exact-enough for test oracles; numerators in this crate stay small.
    let n: f64 = r.numer().to_string().parse().unwrap_or(f64::NAN);
    let d: f64 = r.denom().to_string().parse().unwrap_or(f64::NAN);
    n / d
}

/// Element of ℚ(i).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GaussianRational {
    pub re: Rational,
    pub im: Rational,
}

impl GaussianRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        Self { re, im }
    }

    pub fn real(re: Rational) -> Self {
        Self { re, im: Rational::zero() }
    }

    pub fn from_int(n: i64) -> Self {
        Self::real(rat_int(n))
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        Self::real(rat(n, d))
    }

    pub fn i() -> Self {
        Self { re: Rational::zero(), im: Rational::one() }
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn norm_sqr(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(Self { re: &self.re / &n, im: -(&self.im / &n) })
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (rat_to_f64(&self.re), rat_to_f64(&self.im))
    }
}

impl Zero for GaussianRational {
    fn zero() -> Self {
        Self { re: Rational::zero(), im: Rational::zero() }
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussianRational {
    fn one() -> Self {
        Self::real(Rational::one())
    }
}

impl From<Rational> for GaussianRational {
    fn from(r: Rational) -> Self {
        Self::real(r)
    }
}

impl<'a> Add<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn add(self, o: &GaussianRational) -> GaussianRational {
        GaussianRational { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}

impl Add for GaussianRational {
    type Output = GaussianRational;
    fn add(self, o: GaussianRational) -> GaussianRational {
        GaussianRational { re: self.re + o.re, im: self.im + o.im }
    }
}

impl AddAssign<&GaussianRational> for GaussianRational {
    fn add_assign(&mut self, o: &GaussianRational) {
        self.re += &o.re;
        self.im += &o.im;
    }
}

impl<'a> Sub<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn sub(self, o: &GaussianRational) -> GaussianRational {
        GaussianRational { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}

impl Sub for GaussianRational {
    type Output = GaussianRational;
    fn sub(self, o: GaussianRational) -> GaussianRational {
        GaussianRational { re: self.re - o.re, im: self.im - o.im }
    }
}

impl<'a> Mul<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn mul(self, o: &GaussianRational) -> GaussianRational {
        if self.im.is_zero() && o.im.is_zero() {
            return GaussianRational::real(&self.re * &o.re);
        }
        GaussianRational {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl Mul for GaussianRational {
    type Output = GaussianRational;
    fn mul(self, o: GaussianRational) -> GaussianRational {
        &self * &o
    }
}

impl<'a> Div<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn div(self, o: &GaussianRational) -> GaussianRational {
        self * &o.inv().expect("division by zero in ℚ(i)")
    }
}

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational { re: -self.re, im: -self.im }
    }
}

impl<'a> Neg for &'a GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational { re: -self.re.clone(), im: -self.im.clone() }
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "{}*i", self.im),
            (false, false) => {
                if self.im.is_negative() {
                    write!(f, "({} - {}*i)", self.re, -self.im.clone())
                } else {
                    write!(f, "({} + {}*i)", self.re, self.im)
                }
            }
        }
    }
}

/// Finite Fourier sum `Σ c_k exp(i k·x)` on the n-torus.
///
/// Canonical form: no stored coefficient is zero and modes are kept in
/// lexicographic order. `reality` records that the value is real-valued,
/// i.e. `c_{-k} = conj(c_k)`; it is tracked through arithmetic rather than
/// recomputed.
#[derive(Clone, Debug)]
pub struct TrigPoly {
    dim: usize,
    terms: BTreeMap<Mode, GaussianRational>,
    reality: bool,
}

impl PartialEq for TrigPoly {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.terms == other.terms
    }
}

impl Eq for TrigPoly {}

impl TrigPoly {
    pub fn zero(dim: usize) -> Self {
        Self { dim, terms: BTreeMap::new(), reality: true }
    }

    pub fn constant(dim: usize, c: GaussianRational) -> Self {
        let reality = c.is_real();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(vec![0; dim], c);
        }
        Self { dim, terms, reality }
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, GaussianRational::one())
    }

    pub fn from_rational(dim: usize, r: Rational) -> Self {
        Self::constant(dim, GaussianRational::real(r))
    }

    /// Single complex exponential `c · exp(i k·x)`; not real unless `k = 0`
    /// and `c` is real.
    pub fn monomial(mode: Mode, c: GaussianRational) -> Self {
        let dim = mode.len();
        let reality = c.is_real() && mode.iter().all(|&m| m == 0);
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(mode, c);
        }
        Self { dim, terms, reality }
    }

    /// Builds from raw terms, dropping zeros. The reality flag is computed.
    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (Mode, GaussianRational)>) -> Self {
        let mut map: BTreeMap<Mode, GaussianRational> = BTreeMap::new();
        for (k, c) in terms {
            assert_eq!(k.len(), dim, "mode length must equal dimension");
            *map.entry(k).or_insert_with(GaussianRational::zero) += &c;
        }
        map.retain(|_, c| !c.is_zero());
        let mut p = Self { dim, terms: map, reality: false };
        p.reality = p.is_conjugate_symmetric();
        p
    }

    /// `cos(k·x)`.
    pub fn cos_mode(mode: Mode) -> Self {
        let dim = mode.len();
        if mode.iter().all(|&m| m == 0) {
            return Self::one(dim);
        }
        let neg: Mode = mode.iter().map(|m| -m).collect();
        let half = GaussianRational::from_ratio(1, 2);
        let mut p = Self::from_terms(dim, [(mode, half.clone()), (neg, half)]);
        p.reality = true;
        p
    }

    /// `sin(k·x)`.
    pub fn sin_mode(mode: Mode) -> Self {
        let dim = mode.len();
        if mode.iter().all(|&m| m == 0) {
            return Self::zero(dim);
        }
        let neg: Mode = mode.iter().map(|m| -m).collect();
        let c = GaussianRational::new(Rational::zero(), rat(-1, 2));
        let mut p = Self::from_terms(dim, [(mode, c.clone()), (neg, c.conj())]);
        p.reality = true;
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn reality(&self) -> bool {
        self.reality
    }

    pub fn terms(&self) -> &BTreeMap<Mode, GaussianRational> {
        &self.terms
    }

    pub fn coefficient(&self, mode: &[i64]) -> GaussianRational {
        self.terms.get(mode).cloned().unwrap_or_else(GaussianRational::zero)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|k| k.iter().all(|&m| m == 0))
    }

    /// Constant term if the polynomial has no oscillating part.
    pub fn as_constant(&self) -> Option<GaussianRational> {
        if self.is_constant() {
            Some(self.coefficient(&vec![0; self.dim]))
        } else {
            None
        }
    }

    /// Largest sup-norm of any mode present (0 for constants and zero).
    pub fn max_mode_norm(&self) -> i64 {
        self.terms.keys().map(|k| k.iter().map(|m| m.abs()).max().unwrap_or(0)).max().unwrap_or(0)
    }

    /// Checks the conjugate-symmetry constraint directly from the terms.
    pub fn is_conjugate_symmetric(&self) -> bool {
        self.terms.iter().all(|(k, c)| {
            let neg: Mode = k.iter().map(|m| -m).collect();
            self.terms.get(&neg).map(|d| *d == c.conj()).unwrap_or(false)
        })
    }

    /// True when the variable with 0-based index `axis` does not occur.
    pub fn independent_of(&self, axis: usize) -> bool {
        self.terms.keys().all(|k| k[axis] == 0)
    }

    pub fn conj(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(k, c)| (k.iter().map(|m| -m).collect::<Mode>(), c.conj()))
            .collect();
        Self { dim: self.dim, terms, reality: self.reality }
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.dim);
        }
        let terms = self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect();
        Self::with_reality(self.dim, terms, self.reality && c.is_real())
    }

    /// Uses `hint` when it already proves reality, else checks symmetry.
    fn with_reality(dim: usize, terms: BTreeMap<Mode, GaussianRational>, hint: bool) -> Self {
        let mut p = Self { dim, terms, reality: hint };
        if !hint {
            p.reality = p.is_conjugate_symmetric();
        }
        p
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, CoeffError> {
        self.check_dim(other)?;
        let mut terms = self.terms.clone();
        for (k, c) in &other.terms {
            match terms.get_mut(k) {
                Some(v) => {
                    *v += c;
                    if v.is_zero() {
                        terms.remove(k);
                    }
                }
                None => {
                    terms.insert(k.clone(), c.clone());
                }
            }
        }
        Ok(Self::with_reality(self.dim, terms, self.reality && other.reality))
    }

    /// Exact product (convolution of mode maps).
    pub fn try_mul(&self, other: &Self) -> Result<Self, CoeffError> {
        self.check_dim(other)?;
        let mut terms: BTreeMap<Mode, GaussianRational> = BTreeMap::new();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let k: Mode = ka.iter().zip(kb).map(|(a, b)| a + b).collect();
                let c = ca * cb;
                *terms.entry(k).or_insert_with(GaussianRational::zero) += &c;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Ok(Self::with_reality(self.dim, terms, self.reality && other.reality))
    }

    /// `∂/∂x_axis` with a 1-based axis.
    pub fn try_partial(&self, axis: usize) -> Result<Self, CoeffError> {
        if axis == 0 || axis > self.dim {
            return Err(CoeffError::AxisOutOfRange { axis, dim: self.dim });
        }
        Ok(self.partial0(axis - 1))
    }

    /// `∂/∂x` along the 0-based coordinate `axis`.
    pub(crate) fn partial0(&self, axis: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(k, _)| k[axis] != 0)
            .map(|(k, c)| (k.clone(), c * &GaussianRational::new(Rational::zero(), rat_int(k[axis]))))
            .collect();
        Self { dim: self.dim, terms, reality: self.reality }
    }

    /// Numeric value at `point` (test oracle only).
    pub fn eval(&self, point: &[f64]) -> Result<(f64, f64), CoeffError> {
        if point.len() != self.dim {
            return Err(CoeffError::PointLength { got: point.len(), expected: self.dim });
        }
        let mut re = 0.0;
        let mut im = 0.0;
        for (k, c) in &self.terms {
            let phase: f64 = k.iter().zip(point).map(|(m, x)| *m as f64 * x).sum();
            let (a, b) = c.to_f64_pair();
            let (s, co) = phase.sin_cos();
            re += a * co - b * s;
            im += a * s + b * co;
        }
        Ok((re, im))
    }

    fn check_dim(&self, other: &Self) -> Result<(), CoeffError> {
        if self.dim != other.dim {
            Err(CoeffError::DimensionMismatch(self.dim, other.dim))
        } else {
            Ok(())
        }
    }
}

impl<'a> Add<&'a TrigPoly> for &'a TrigPoly {
    type Output = TrigPoly;
    fn add(self, o: &TrigPoly) -> TrigPoly {
        self.try_add(o).expect("trig poly dimension mismatch")
    }
}

impl<'a> Sub<&'a TrigPoly> for &'a TrigPoly {
    type Output = TrigPoly;
    fn sub(self, o: &TrigPoly) -> TrigPoly {
        self + &(-o)
    }
}

impl<'a> Mul<&'a TrigPoly> for &'a TrigPoly {
    type Output = TrigPoly;
    fn mul(self, o: &TrigPoly) -> TrigPoly {
        self.try_mul(o).expect("trig poly dimension mismatch")
    }
}

impl<'a> Neg for &'a TrigPoly {
    type Output = TrigPoly;
    fn neg(self) -> TrigPoly {
        let terms = self.terms.iter().map(|(k, c)| (k.clone(), -c)).collect();
        TrigPoly { dim: self.dim, terms, reality: self.reality }
    }
}

impl Neg for TrigPoly {
    type Output = TrigPoly;
    fn neg(self) -> TrigPoly {
        -&self
    }
}

pub(crate) fn fmt_linear(mode: &[i64]) -> String {
    let mut out = String::new();
    for (idx, &m) in mode.iter().enumerate() {
        if m == 0 {
            continue;
        }
        let var = format!("x{}", idx + 1);
        let mag = m.abs();
        let body = if mag == 1 { var } else { format!("{mag}*{var}") };
        if out.is_empty() {
            if m < 0 {
                out.push('-');
            }
            out.push_str(&body);
        } else {
            out.push_str(if m < 0 { " - " } else { " + " });
            out.push_str(&body);
        }
    }
    out
}

fn is_positive_mode(k: &[i64]) -> bool {
    k.iter().find(|&&m| m != 0).map(|&m| m > 0).unwrap_or(false)
}

impl TrigPoly {
    /// Real sin/cos rendering accepted by the expression parser; `None`
    /// when the coefficients are not conjugate-symmetric.
    pub fn to_real_string(&self) -> Option<String> {
        if !self.is_conjugate_symmetric() {
            return None;
        }
        let mut pieces: Vec<(Rational, String)> = Vec::new();
        let zero_mode = vec![0; self.dim];
        if let Some(c) = self.terms.get(&zero_mode) {
            pieces.push((c.re.clone(), String::new()));
        }
        for (k, c) in &self.terms {
            if !is_positive_mode(k) {
                continue;
            }
            let lin = fmt_linear(k);
            let two = rat_int(2);
            if !c.re.is_zero() {
                pieces.push((&c.re * &two, format!("cos({lin})")));
            }
            if !c.im.is_zero() {
                pieces.push((-(&c.im * &two), format!("sin({lin})")));
            }
        }
        if pieces.is_empty() {
            return Some("0".to_string());
        }
        let mut out = String::new();
        for (i, (coef, func)) in pieces.iter().enumerate() {
            let neg = coef.is_negative();
            let mag = coef.abs();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            if func.is_empty() {
                out.push_str(&mag.to_string());
            } else if mag.is_one() {
                out.push_str(func);
            } else {
                out.push_str(&format!("{mag}*{func}"));
            }
        }
        Some(out)
    }
}

impl fmt::Display for TrigPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(s) = self.to_real_string() {
            return write!(f, "{s}");
        }
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(k, c)| {
                if k.iter().all(|&m| m == 0) {
                    format!("{c}")
                } else {
                    format!("{c}*exp(i*({}))", fmt_linear(k))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}
