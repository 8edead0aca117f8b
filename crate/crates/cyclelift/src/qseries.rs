//! Truncated formal `q`-expansions with coefficients in a `Q`-module, the
//! Shimura lift, and the operators `U_d`, `B_d`, `φ_d`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Debug;

use num_bigint::BigInt;
use num_complex::Complex;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::numth::{factorize, kronecker};
use crate::quadfield::QuadField;

/// An element of a `Q`-vector space.
pub trait Coefficient: Clone + PartialEq + Debug {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn add_assign(&mut self, other: &Self);
    fn scale(&self, c: &BigRational) -> Self;

    fn neg(&self) -> Self {
        self.scale(&-BigRational::one())
    }

    fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(&other.neg());
        out
    }
}

impl Coefficient for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }

    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }

    fn add_assign(&mut self, other: &Self) {
        *self += other;
    }

    fn scale(&self, c: &BigRational) -> Self {
        self * c
    }
}

/// Coefficients with a JSON representation for series files.
pub trait JsonCoefficient: Coefficient + Sized {
    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> Result<Self>;
}

/// `"p/q"`, or `"p"` for integers.
pub fn rational_to_string(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::invalid(format!("not a rational: {s:?}"));
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

impl JsonCoefficient for BigRational {
    fn to_json(&self) -> Value {
        Value::String(rational_to_string(self))
    }

    fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::String(s) => parse_rational(s),
            Value::Number(n) => n
                .as_i64()
                .map(|n| BigRational::from_integer(n.into()))
                .ok_or_else(|| Error::invalid(format!("not an integer coefficient: {n}"))),
            _ => Err(Error::invalid(format!("bad rational coefficient {v}"))),
        }
    }
}

/// `Σ_{n ≤ max_exponent} a(n) q^n`, stored sparsely.
#[derive(Debug, Clone, PartialEq)]
pub struct FormalSeries<C> {
    coeffs: BTreeMap<u64, C>,
    max_exponent: u64,
}

impl<C: Coefficient> FormalSeries<C> {
    pub fn zero(max_exponent: u64) -> Self {
        FormalSeries { coeffs: BTreeMap::new(), max_exponent }
    }

    /// `c · q^n`.
    pub fn monomial(n: u64, c: C, max_exponent: u64) -> Result<Self> {
        let mut f = Self::zero(max_exponent);
        f.set(n, c)?;
        Ok(f)
    }

    pub fn max_exponent(&self) -> u64 {
        self.max_exponent
    }

    /// Nonzero coefficients in increasing order of exponent.
    pub fn iter(&self) -> impl Iterator<Item = (u64, &C)> {
        self.coeffs.iter().map(|(n, c)| (*n, c))
    }

    /// `a(n)`, failing beyond the truncation bound.
    pub fn get(&self, n: u64) -> Result<C> {
        if n > self.max_exponent {
            return Err(Error::TruncationInsufficient {
                needed: n,
                available: self.max_exponent,
            });
        }
        Ok(self.coeffs.get(&n).cloned().unwrap_or_else(C::zero))
    }

    pub fn set(&mut self, n: u64, c: C) -> Result<()> {
        if n > self.max_exponent {
            return Err(Error::TruncationInsufficient {
                needed: n,
                available: self.max_exponent,
            });
        }
        if c.is_zero() {
            self.coeffs.remove(&n);
        } else {
            self.coeffs.insert(n, c);
        }
        Ok(())
    }

    /// Add `c` to `a(n)`.
    pub fn add_at(&mut self, n: u64, c: &C) -> Result<()> {
        let mut cur = self.get(n)?;
        cur.add_assign(c);
        self.set(n, cur)
    }

    /// Drop everything above `max_exponent`.
    pub fn truncate(&self, max_exponent: u64) -> Self {
        let max_exponent = max_exponent.min(self.max_exponent);
        FormalSeries {
            coeffs: self.coeffs.range(..=max_exponent).map(|(n, c)| (*n, c.clone())).collect(),
            max_exponent,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.truncate(other.max_exponent);
        for (n, c) in other.coeffs.range(..=out.max_exponent) {
            out.add_at(*n, c).expect("within bound");
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-BigRational::one()))
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut out = Self::zero(self.max_exponent);
        for (n, a) in &self.coeffs {
            out.set(*n, a.scale(c)).expect("within bound");
        }
        out
    }

    /// Exponents up to `max_exponent` where the two series differ.
    pub fn differences(&self, other: &Self, max_exponent: u64) -> Result<Vec<u64>> {
        let mut out = Vec::new();
        let keys: std::collections::BTreeSet<u64> = self
            .coeffs
            .keys()
            .chain(other.coeffs.keys())
            .copied()
            .filter(|&n| n <= max_exponent)
            .collect();
        if max_exponent > self.max_exponent.min(other.max_exponent) {
            return Err(Error::TruncationInsufficient {
                needed: max_exponent,
                available: self.max_exponent.min(other.max_exponent),
            });
        }
        for n in keys {
            if self.get(n)? != other.get(n)? {
                out.push(n);
            }
        }
        Ok(out)
    }
}

impl<C: JsonCoefficient> FormalSeries<C> {
    /// `{"max_exponent": M, "coeffs": [{"n": n, "c": ...}]}`.
    pub fn to_json(&self) -> Value {
        json!({
            "max_exponent": self.max_exponent,
            "coeffs": self
                .coeffs
                .iter()
                .map(|(n, c)| json!({"n": n, "c": c.to_json()}))
                .collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let max = v["max_exponent"]
            .as_u64()
            .ok_or_else(|| Error::invalid("series: missing max_exponent"))?;
        let coeffs = v["coeffs"]
            .as_array()
            .ok_or_else(|| Error::invalid("series: missing coeffs"))?;
        let mut f = Self::zero(max);
        for entry in coeffs {
            let n = entry["n"]
                .as_u64()
                .ok_or_else(|| Error::invalid(format!("series: bad exponent in {entry}")))?;
            f.add_at(n, &C::from_json(&entry["c"])?)?;
        }
        Ok(f)
    }
}

/// A real Dirichlet character.
pub trait RealCharacter {
    fn modulus(&self) -> u64;
    fn value(&self, n: u64) -> i8;
}

/// The nebentypus `χ` of the input form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Character {
    /// Principal character modulo `4N`.
    Principal,
    /// `n ↦ (disc / n)`.
    Kronecker(i64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShimuraParams {
    kappa: u32,
    level: u64,
    t: u64,
    chi: Character,
}

impl ShimuraParams {
    pub fn new(kappa: u32, level: u64, t: u64, chi: Character) -> Result<Self> {
        if kappa < 3 || kappa % 2 == 0 {
            return Err(Error::invalid(format!("kappa = {kappa} must be odd and at least 3")));
        }
        if level == 0 {
            return Err(Error::invalid("level must be positive"));
        }
        if t == 0 || !factorize(t)?.is_squarefree() {
            return Err(Error::invalid(format!("t = {t} must be positive and squarefree")));
        }
        if let Character::Kronecker(d) = chi {
            if d == 0 || d.rem_euclid(4) > 1 || (4 * level) % d.unsigned_abs() != 0 {
                return Err(Error::invalid(format!(
                    "Kronecker character {d} is not a character modulo {}",
                    4 * level
                )));
            }
        }
        Ok(ShimuraParams { kappa, level, t, chi })
    }

    pub fn kappa(&self) -> u32 {
        self.kappa
    }

    pub fn lambda(&self) -> u32 {
        (self.kappa - 1) / 2
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn chi(&self) -> Character {
        self.chi
    }

    fn chi_value(&self, n: u64) -> i8 {
        match self.chi {
            Character::Principal => i8::from(n.gcd(&(4 * self.level)) == 1),
            Character::Kronecker(d) => kronecker(d, n as i64),
        }
    }
}

/// `χ_t(n) = χ(n) (-1/n)^λ (t/n)`.
pub fn chi_t(params: &ShimuraParams, n: u64) -> Result<i8> {
    if n == 0 {
        return Err(Error::invalid("chi_t(0)"));
    }
    let minus_one = kronecker(-1, n as i64).pow(params.lambda());
    Ok(params.chi_value(n) * minus_one * kronecker(params.t as i64, n as i64))
}

impl RealCharacter for ShimuraParams {
    /// `χ_t` is periodic modulo `4Nt`.
    fn modulus(&self) -> u64 {
        4 * self.level * self.t
    }

    fn value(&self, n: u64) -> i8 {
        if n == 0 {
            return i8::from(self.modulus() == 1);
        }
        chi_t(self, n).expect("n >= 1")
    }
}

/// How `b(0)` was obtained.
#[derive(Debug, Clone, PartialEq)]
pub enum ConstantTerm<C> {
    /// Closed form, stored in the series at exponent 0.
    Exact,
    /// `b(0) = κ · a(0)` for a constant `κ` given by a conditionally
    /// convergent series; `a(0)` is kept and exponent 0 is left empty.
    Deferred { a0: C },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lift<C> {
    pub series: FormalSeries<C>,
    pub constant: ConstantTerm<C>,
}

/// `b(m) = Σ_{n | m} χ_t(n) n^{(κ-3)/2} a(t m²/n²)`, placed at exponent `t m`.
///
/// The output is known up to `t(M+1) - 1` where `M` is the largest index with
/// `t M² ≤ F.max_exponent`.
pub fn shimura_lift<C: Coefficient>(f: &FormalSeries<C>, params: &ShimuraParams) -> Result<Lift<C>> {
    let t = params.t;
    let m_top = (f.max_exponent() / t).isqrt();
    shimura_lift_to(f, params, t * (m_top + 1) - 1)
}

/// The lift known up to exponent `max_exponent`.
pub fn shimura_lift_to<C: Coefficient>(
    f: &FormalSeries<C>,
    params: &ShimuraParams,
    max_exponent: u64,
) -> Result<Lift<C>> {
    let t = params.t;
    let m_top = max_exponent / t;
    if t * m_top * m_top > f.max_exponent() {
        return Err(Error::TruncationInsufficient {
            needed: t * m_top * m_top,
            available: f.max_exponent(),
        });
    }
    let weight = (params.kappa - 3) / 2;
    let mut out = FormalSeries::zero(max_exponent);
    for m in 1..=m_top {
        let mut b = C::zero();
        for n in factorize(m)?.divisors() {
            let chi = chi_t(params, n)?;
            if chi == 0 {
                continue;
            }
            let a = f.get(t * (m / n) * (m / n))?;
            if a.is_zero() {
                continue;
            }
            let scalar = BigInt::from(chi) * BigInt::from(n).pow(weight);
            b.add_assign(&a.scale(&BigRational::from_integer(scalar)));
        }
        out.set(t * m, b)?;
    }
    let a0 = f.get(0)?;
    let constant = match constant_factor(params)? {
        Some(factor) => {
            out.set(0, a0.scale(&factor))?;
            ConstantTerm::Exact
        }
        None => ConstantTerm::Deferred { a0 },
    };
    Ok(Lift { series: out, constant })
}

/// `b(0)/a(0)` when it has a closed form: weight 3/2, principal character,
/// `t = |Δ|` for an admissible field and `N` an admissible quaternion
/// discriminant. Then `b(0) = -a(0) · (i/2π) L(1, χ̌_t)`.
fn constant_factor(params: &ShimuraParams) -> Result<Option<BigRational>> {
    if params.kappa != 3 || params.chi != Character::Principal || params.t % 4 != 2 {
        return Ok(None);
    }
    let field = QuadField::new(-(params.t as i64))?;
    match field.lvalue_closed_form(params.level) {
        Ok(l) => Ok(Some(-l)),
        Err(Error::Hypothesis(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// `U_d(F) = Σ a(dn) q^n`, known up to `⌊max/d⌋`.
pub fn op_u<C: Coefficient>(d: u64, f: &FormalSeries<C>) -> Result<FormalSeries<C>> {
    if d == 0 {
        return Err(Error::invalid("U_0"));
    }
    op_u_to(d, f, f.max_exponent() / d)
}

/// `U_d(F)` up to exponent `max_exponent`.
pub fn op_u_to<C: Coefficient>(d: u64, f: &FormalSeries<C>, max_exponent: u64) -> Result<FormalSeries<C>> {
    if d == 0 {
        return Err(Error::invalid("U_0"));
    }
    if d * max_exponent > f.max_exponent() {
        return Err(Error::TruncationInsufficient {
            needed: d * max_exponent,
            available: f.max_exponent(),
        });
    }
    let mut out = FormalSeries::zero(max_exponent);
    for (n, c) in f.iter() {
        if n % d == 0 && n / d <= max_exponent {
            out.set(n / d, c.clone())?;
        }
    }
    Ok(out)
}

/// `B_d(F) = Σ a(n) q^{dn}`, known up to `d(max + 1) - 1`.
pub fn op_b<C: Coefficient>(d: u64, f: &FormalSeries<C>) -> Result<FormalSeries<C>> {
    if d == 0 {
        return Err(Error::invalid("B_0"));
    }
    let mut out = FormalSeries::zero(d * (f.max_exponent() + 1) - 1);
    for (n, c) in f.iter() {
        out.set(d * n, c.clone())?;
    }
    Ok(out)
}

/// `φ_d = B_d ∘ (1 - U_d)`: the coefficient at `dn` is `a(n) - a(dn)`.
pub fn op_phi<C: Coefficient>(d: u64, f: &FormalSeries<C>) -> Result<FormalSeries<C>> {
    let u = op_u(d, f)?;
    op_b(d, &f.truncate(u.max_exponent()).sub(&u))
}

/// `φ_I = φ_{p1} ∘ ... ∘ φ_{pn}` for distinct primes.
pub fn op_phi_set<C: Coefficient>(primes: &[u64], f: &FormalSeries<C>) -> Result<FormalSeries<C>> {
    let mut seen = primes.to_vec();
    seen.sort_unstable();
    seen.dedup();
    if seen.len() != primes.len() || primes.iter().any(|&p| !crate::numth::is_prime(p)) {
        return Err(Error::invalid(format!("{primes:?} is not a set of distinct primes")));
    }
    let mut out = f.clone();
    for &p in primes.iter().rev() {
        out = op_phi(p, &out)?;
    }
    Ok(out)
}

/// `χ̌(a) = Σ_{h mod M} χ(h) e^{2πi a h / M}`.
pub fn gauss_sum(chi: &impl RealCharacter, a: i64) -> Complex<f64> {
    let m = chi.modulus();
    let a = a.rem_euclid(m as i64) as u64;
    (0..m)
        .filter_map(|h| {
            let v = chi.value(h);
            (v != 0).then(|| {
                let angle = 2.0 * PI * ((a * h) % m) as f64 / m as f64;
                Complex::from_polar(f64::from(v), angle)
            })
        })
        .sum()
}

/// Partial sums of `Σ m^{-s} χ̌(m)`.
///
/// For `s = 1` the series converges only conditionally; the value returned is
/// the mean of the partial sums over the last full period of the character,
/// which cancels the periodic oscillation of the partial sums.
pub fn lvalue_numeric(chi: &impl RealCharacter, s: u32, terms: u64) -> Result<Complex<f64>> {
    if terms == 0 || s == 0 {
        return Err(Error::invalid("lvalue_numeric needs s >= 1 and terms >= 1"));
    }
    let period = chi.modulus();
    let table: Vec<Complex<f64>> = (0..period).map(|a| gauss_sum(chi, a as i64)).collect();
    let term = |m: u64| table[(m % period) as usize] / (m as f64).powi(s as i32);
    if s > 1 || terms < period {
        return Ok((1..=terms).map(term).sum());
    }
    let end = terms - terms % period;
    let mut partial = Complex::new(0.0, 0.0);
    let mut window = Complex::new(0.0, 0.0);
    for m in 1..=end {
        partial += term(m);
        if m > end - period {
            window += partial;
        }
    }
    Ok(window / period as f64)
}

/// `(i/2π) L(1, χ̌)` from [`lvalue_numeric`].
pub fn normalized_lvalue_numeric(chi: &impl RealCharacter, terms: u64) -> Result<f64> {
    let l = lvalue_numeric(chi, 1, terms)?;
    let v = Complex::new(0.0, 1.0) * l / (2.0 * PI);
    Ok(v.re)
}
