//! Truncated arithmetic in the unramified quadratic extension `o_{k,p} = Z_p[δ]`,
//! `δ² = Δ`, and in the hermitian plane `C = k_p v0 ⊕ k_p v1`.
//!
//! Elements carry their own absolute precision: `x + yδ` is known modulo
//! `p^prec`. Sums keep the smaller precision, products gain the valuation of
//! the other factor, and any valuation that cannot be decided raises
//! [`Error::PrecisionExhausted`] instead of guessing.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::numth::{is_prime, kronecker};

/// Prime, non-residue `Δ` and working precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LocalContext {
    p: u64,
    delta: i64,
    precision: u32,
}

/// Smallest precision accepted by [`LocalContext::new`].
pub const MIN_PRECISION: u32 = 8;

impl LocalContext {
    pub fn new(p: u64, delta: i64, precision: u32) -> Result<Self> {
        if p == 2 || !is_prime(p) {
            return Err(Error::invalid(format!("{p} is not an odd prime")));
        }
        if kronecker(delta, p as i64) != -1 {
            return Err(Error::hypothesis(format!("{p} is not inert in Q(sqrt({delta}))")));
        }
        if precision < MIN_PRECISION {
            return Err(Error::invalid(format!(
                "precision {precision} below the minimum {MIN_PRECISION}"
            )));
        }
        let max = Self::max_precision(p);
        if precision > max {
            return Err(Error::invalid(format!(
                "precision {precision} exceeds {max}, the largest with p^N < 2^63"
            )));
        }
        Ok(LocalContext { p, delta, precision })
    }

    /// Context with the default precision `2 (t_max + radius) + 8`, capped at
    /// [`LocalContext::max_precision`].
    pub fn with_default_precision(p: u64, delta: i64, t_max: u32, radius: u32) -> Result<Self> {
        if p == 2 || !is_prime(p) {
            return Err(Error::invalid(format!("{p} is not an odd prime")));
        }
        let wanted = 2 * (t_max + radius) + 8;
        Self::new(p, delta, wanted.min(Self::max_precision(p)))
    }

    /// Largest `N` with `p^N < 2^63`.
    pub fn max_precision(p: u64) -> u32 {
        let mut n = 0;
        let mut pk: u128 = 1;
        while pk * u128::from(p) < 1u128 << 63 {
            pk *= u128::from(p);
            n += 1;
        }
        n
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn delta(&self) -> i64 {
        self.delta
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// `p^k` for `k ≤ precision`.
    pub fn pow(&self, k: u32) -> u64 {
        debug_assert!(k <= self.precision);
        self.p.pow(k)
    }

    pub fn zero(&self) -> QuadLocalElem {
        self.elem(0, 0)
    }

    pub fn one(&self) -> QuadLocalElem {
        self.elem(1, 0)
    }

    /// The element `δ`.
    pub fn delta_elem(&self) -> QuadLocalElem {
        self.elem(0, 1)
    }

    /// The exact element `x + yδ`.
    pub fn elem(&self, x: i64, y: i64) -> QuadLocalElem {
        let m = self.pow(self.precision);
        QuadLocalElem {
            ctx: *self,
            x: reduce_i128(i128::from(x), m),
            y: reduce_i128(i128::from(y), m),
            prec: self.precision,
        }
    }

    pub fn int(&self, x: i64) -> QuadLocalElem {
        self.elem(x, 0)
    }

    /// `num / den` for `p ∤ den`.
    pub fn ratio(&self, num: i64, den: i64) -> Result<QuadLocalElem> {
        if den == 0 || den.unsigned_abs() % self.p == 0 {
            return Err(Error::invalid(format!("{num}/{den} is not p-integral")));
        }
        Ok(self.int(num) * self.int(den).inv()?)
    }

    fn exhausted(&self) -> Error {
        Error::PrecisionExhausted {
            needed: self.precision + 1,
            available: self.precision,
        }
    }
}

fn reduce_i128(v: i128, m: u64) -> u64 {
    v.rem_euclid(i128::from(m)) as u64
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((u128::from(a) * u128::from(b)) % u128::from(m)) as u64
}

fn ord(mut n: u64, p: u64) -> u32 {
    debug_assert!(n != 0);
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// A valuation that is either known or only bounded below by the precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Valuation {
    Exact(u32),
    AtLeast(u32),
}

/// `x + yδ ∈ o_{k,p}`, known modulo `p^prec`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct QuadLocalElem {
    ctx: LocalContext,
    x: u64,
    y: u64,
    prec: u32,
}

impl fmt::Debug for QuadLocalElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}d (mod {}^{})", self.x, self.y, self.ctx.p, self.prec)
    }
}

impl fmt::Display for QuadLocalElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (x, y) = self.signed();
        match (x, y) {
            (x, 0) => write!(f, "{x}"),
            (0, y) => write!(f, "{y}d"),
            (x, y) if y < 0 => write!(f, "{x}{y}d"),
            (x, y) => write!(f, "{x}+{y}d"),
        }
    }
}

impl QuadLocalElem {
    pub fn ctx(&self) -> &LocalContext {
        &self.ctx
    }

    /// Residues `(x, y)` in `[0, p^prec)`.
    pub fn coords(&self) -> (u64, u64) {
        (self.x, self.y)
    }

    /// Representatives of `(x, y)` in `(-p^prec/2, p^prec/2]`.
    pub fn signed(&self) -> (i64, i64) {
        let m = self.ctx.p.pow(self.prec);
        let s = |v: u64| if v > m / 2 { v as i64 - m as i64 } else { v as i64 };
        (s(self.x), s(self.y))
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    fn modulus(&self) -> u64 {
        self.ctx.p.pow(self.prec)
    }

    fn with(&self, x: u64, y: u64, prec: u32) -> Self {
        let m = self.ctx.p.pow(prec);
        QuadLocalElem {
            ctx: self.ctx,
            x: x % m,
            y: y % m,
            prec,
        }
    }

    pub fn valuation(&self) -> Valuation {
        match (self.x, self.y) {
            (0, 0) => Valuation::AtLeast(self.prec),
            (0, y) => Valuation::Exact(ord(y, self.ctx.p)),
            (x, 0) => Valuation::Exact(ord(x, self.ctx.p)),
            (x, y) => Valuation::Exact(ord(x, self.ctx.p).min(ord(y, self.ctx.p))),
        }
    }

    /// The valuation, or `PrecisionExhausted` if the element is zero modulo
    /// its precision.
    pub fn val(&self) -> Result<u32> {
        match self.valuation() {
            Valuation::Exact(v) => Ok(v),
            Valuation::AtLeast(_) => Err(self.ctx.exhausted()),
        }
    }

    /// A lower bound for the valuation that is always correct.
    pub fn val_lower(&self) -> u32 {
        match self.valuation() {
            Valuation::Exact(v) | Valuation::AtLeast(v) => v,
        }
    }

    /// Zero modulo the precision of the element.
    pub fn is_zero(&self) -> bool {
        self.x == 0 && self.y == 0
    }

    pub fn is_unit(&self) -> bool {
        self.valuation() == Valuation::Exact(0)
    }

    /// Galois conjugate `x - yδ`.
    pub fn conj(&self) -> Self {
        let m = self.modulus();
        self.with(self.x, (m - self.y) % m, self.prec)
    }

    /// `x² - Δy²`, an element of `Z_p`.
    pub fn norm(&self) -> Self {
        *self * self.conj()
    }

    /// `2x`, an element of `Z_p`.
    pub fn trace(&self) -> Self {
        *self + self.conj()
    }

    /// Whether `y ≡ 0` modulo the precision, i.e. the element lies in `Z_p`.
    pub fn is_rational(&self) -> bool {
        self.y == 0
    }

    /// `(x mod p, y mod p)`, the image in `F_{p²}`.
    pub fn residue(&self) -> (u64, u64) {
        if self.prec == 0 {
            return (0, 0);
        }
        (self.x % self.ctx.p, self.y % self.ctx.p)
    }

    /// Truncate to precision `k`.
    pub fn truncate(&self, k: u32) -> Self {
        let k = k.min(self.prec);
        self.with(self.x, self.y, k)
    }

    /// Multiplicative inverse of a unit.
    pub fn inv(&self) -> Result<Self> {
        match self.valuation() {
            Valuation::Exact(0) => {}
            Valuation::Exact(_) => return Err(Error::invalid("inverse of a non-unit")),
            Valuation::AtLeast(_) => return Err(self.ctx.exhausted()),
        }
        let n = self.norm();
        let m = self.modulus();
        let ninv = inv_mod(n.x, m, self.ctx.p);
        let c = self.conj();
        Ok(self.with(mulmod(c.x, ninv, m), mulmod(c.y, ninv, m), self.prec))
    }

    /// `self / p^k`; requires `p^k | self`.
    pub fn div_p_pow(&self, k: u32) -> Result<Self> {
        if k == 0 {
            return Ok(*self);
        }
        match self.valuation() {
            Valuation::Exact(v) if v < k => {
                Err(Error::invalid(format!("element of valuation {v} not divisible by p^{k}")))
            }
            Valuation::AtLeast(v) if v < k => Err(Error::PrecisionExhausted {
                needed: self.ctx.precision + (k - v),
                available: self.ctx.precision,
            }),
            _ => {
                let pk = self.ctx.p.pow(k);
                Ok(self.with(self.x / pk, self.y / pk, self.prec - k))
            }
        }
    }

    /// `self · p^k`.
    pub fn mul_p_pow(&self, k: u32) -> Self {
        let prec = (self.prec + k).min(self.ctx.precision);
        let m = self.ctx.p.pow(prec);
        let pk = self.ctx.p.pow(k.min(prec));
        if k > prec {
            return self.with(0, 0, prec);
        }
        self.with(mulmod(self.x, pk, m), mulmod(self.y, pk, m), prec)
    }

    /// Multiply by a rational integer.
    pub fn scale_int(&self, c: i64) -> Self {
        *self * self.ctx.int(c)
    }
}

/// Inverse of `a` modulo `m = p^k` for `p ∤ a`.
fn inv_mod(a: u64, m: u64, p: u64) -> u64 {
    debug_assert!(a % p != 0);
    let (mut old_r, mut r) = (i128::from(a), i128::from(m));
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    debug_assert_eq!(old_r, 1);
    old_s.rem_euclid(i128::from(m)) as u64
}

impl Add for QuadLocalElem {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        debug_assert_eq!(self.ctx, rhs.ctx);
        let prec = self.prec.min(rhs.prec);
        let m = self.ctx.p.pow(prec);
        self.with(
            ((self.x % m) + (rhs.x % m)) % m,
            ((self.y % m) + (rhs.y % m)) % m,
            prec,
        )
    }
}

impl Neg for QuadLocalElem {
    type Output = Self;
    fn neg(self) -> Self {
        let m = self.modulus();
        self.with((m - self.x) % m, (m - self.y) % m, self.prec)
    }
}

impl Sub for QuadLocalElem {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Mul for QuadLocalElem {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        debug_assert_eq!(self.ctx, rhs.ctx);
        let prec = (self.prec + rhs.val_lower())
            .min(rhs.prec + self.val_lower())
            .min(self.ctx.precision);
        let m = self.ctx.p.pow(prec);
        let d = reduce_i128(i128::from(self.ctx.delta), m);
        let (a, b) = (self.x % m, self.y % m);
        let (c, e) = (rhs.x % m, rhs.y % m);
        let x = (mulmod(a, c, m) + mulmod(mulmod(b, e, m), d, m)) % m;
        let y = (mulmod(a, e, m) + mulmod(b, c, m)) % m;
        self.with(x, y, prec)
    }
}

/// `p^exp · value`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Scaled {
    pub value: QuadLocalElem,
    pub exp: i32,
}

/// Result of evaluating the quadratic form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QForm {
    /// `q(b) = 0` within precision.
    Isotropic,
    /// `q(b) = p^valuation · u` with `u ≡ unit_residue (mod p)`.
    Anisotropic { valuation: i32, unit_residue: u64 },
}

impl QForm {
    /// The valuation, or `DegenerateVector` for isotropic vectors.
    pub fn ord(&self) -> Result<i32> {
        match self {
            QForm::Anisotropic { valuation, .. } => Ok(*valuation),
            QForm::Isotropic => Err(Error::DegenerateVector),
        }
    }
}

/// `p^{-e} (a0 v0 + a1 v1)` with `min(val a0, val a1) = 0` unless zero.
///
/// The basis satisfies `h(v0, v1) = δ` and `h(v0, v0) = h(v1, v1) = 0`, and
/// `ε` acts by conjugating coordinates.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct VectorC {
    a0: QuadLocalElem,
    a1: QuadLocalElem,
    denom_exp: i32,
}

impl fmt::Debug for VectorC {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p^-{} ({:?}, {:?})", self.denom_exp, self.a0, self.a1)
    }
}

impl fmt::Display for VectorC {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.a0, self.a1)?;
        if self.denom_exp != 0 {
            write!(f, "/p^{}", self.denom_exp)?;
        }
        Ok(())
    }
}

impl VectorC {
    /// `p^{-denom_exp} (a0, a1)`, normalized.
    pub fn new(a0: QuadLocalElem, a1: QuadLocalElem, denom_exp: i32) -> Result<Self> {
        let v0 = a0.valuation();
        let v1 = a1.valuation();
        let k = match (v0, v1) {
            (Valuation::AtLeast(_), Valuation::AtLeast(_)) => {
                let z = a0.ctx.zero();
                return Ok(VectorC { a0: z, a1: z, denom_exp: 0 });
            }
            (Valuation::Exact(x), Valuation::Exact(y)) => x.min(y),
            (Valuation::Exact(x), Valuation::AtLeast(b))
            | (Valuation::AtLeast(b), Valuation::Exact(x)) => {
                if x > b {
                    return Err(Error::PrecisionExhausted {
                        needed: a0.ctx.precision + (x - b),
                        available: a0.ctx.precision,
                    });
                }
                x
            }
        };
        Ok(VectorC {
            a0: a0.div_p_pow(k)?,
            a1: a1.div_p_pow(k)?,
            denom_exp: denom_exp - k as i32,
        })
    }

    /// `p^{-denom_exp} (x0 + y0 δ, x1 + y1 δ)` with integer entries.
    pub fn from_ints(
        ctx: &LocalContext,
        (x0, y0): (i64, i64),
        (x1, y1): (i64, i64),
        denom_exp: i32,
    ) -> Result<Self> {
        Self::new(ctx.elem(x0, y0), ctx.elem(x1, y1), denom_exp)
    }

    pub fn v0(ctx: &LocalContext) -> Self {
        VectorC { a0: ctx.one(), a1: ctx.zero(), denom_exp: 0 }
    }

    pub fn v1(ctx: &LocalContext) -> Self {
        VectorC { a0: ctx.zero(), a1: ctx.one(), denom_exp: 0 }
    }

    pub fn ctx(&self) -> &LocalContext {
        self.a0.ctx()
    }

    pub fn a0(&self) -> QuadLocalElem {
        self.a0
    }

    pub fn a1(&self) -> QuadLocalElem {
        self.a1
    }

    pub fn denom_exp(&self) -> i32 {
        self.denom_exp
    }

    pub fn is_zero(&self) -> bool {
        self.a0.is_zero() && self.a1.is_zero()
    }

    /// `ε(b)`: conjugate both coordinates.
    pub fn epsilon(&self) -> Self {
        VectorC { a0: self.a0.conj(), a1: self.a1.conj(), denom_exp: self.denom_exp }
    }

    /// `p^k · b`.
    pub fn mul_p_pow(&self, k: i32) -> Self {
        if self.is_zero() {
            return *self;
        }
        VectorC { denom_exp: self.denom_exp - k, ..*self }
    }

    /// `λ · b` for `λ ∈ o_{k,p}`.
    pub fn scale(&self, lambda: QuadLocalElem) -> Result<Self> {
        Self::new(lambda * self.a0, lambda * self.a1, self.denom_exp)
    }

    /// `self + other`.
    pub fn add(&self, other: &VectorC) -> Result<Self> {
        if self.is_zero() {
            return Ok(*other);
        }
        if other.is_zero() {
            return Ok(*self);
        }
        let e = self.denom_exp.max(other.denom_exp);
        let (x0, x1) = self.coords_at(e);
        let (y0, y1) = other.coords_at(e);
        Self::new(x0 + y0, x1 + y1, e)
    }

    /// Coordinates brought to the common exponent `e ≥ denom_exp`:
    /// `b = p^{-e} (c0, c1)`.
    pub fn coords_at(&self, e: i32) -> (QuadLocalElem, QuadLocalElem) {
        debug_assert!(e >= self.denom_exp || self.is_zero());
        let k = (e - self.denom_exp).max(0) as u32;
        (self.a0.mul_p_pow(k), self.a1.mul_p_pow(k))
    }

    /// The `ε`-fixed vectors `re = (b + εb)/2` and `im = (b - εb)/2δ`, so
    /// that `b = re + δ·im`.
    pub fn real_imag(&self) -> Result<(VectorC, VectorC)> {
        let (x0, y0) = split(self.a0);
        let (x1, y1) = split(self.a1);
        Ok((
            VectorC::new(x0, x1, self.denom_exp)?,
            VectorC::new(y0, y1, self.denom_exp)?,
        ))
    }

    /// Whether both coordinates lie in `Z_p`.
    pub fn is_rational(&self) -> bool {
        self.a0.is_rational() && self.a1.is_rational()
    }

    /// `q(b) = h(b, b)`.
    pub fn qform(&self) -> QForm {
        qform(self)
    }
}

fn split(a: QuadLocalElem) -> (QuadLocalElem, QuadLocalElem) {
    let (x, y) = a.coords();
    (a.with(x, 0, a.prec), a.with(y, 0, a.prec))
}

/// `h(u, v) = δ (u0 v1' - u1 v0')`, returned as `p^exp · value`.
pub fn herm(u: &VectorC, v: &VectorC) -> Scaled {
    let d = u.ctx().delta_elem();
    let value = d * (u.a0 * v.a1.conj() - u.a1 * v.a0.conj());
    Scaled { value, exp: -(u.denom_exp + v.denom_exp) }
}

/// `ord_p q(b)` and the residue of its unit part.
///
/// `q(b) = 2Δ · y(b0 b1')` lies in `Q_p`, so only the `δ`-coordinate of
/// `b0 b1'` is needed.
pub fn qform(b: &VectorC) -> QForm {
    let w = b.a0 * b.a1.conj();
    let (_, y) = w.coords();
    let z = w.with(y, 0, w.prec);
    match z.valuation() {
        Valuation::AtLeast(_) => QForm::Isotropic,
        Valuation::Exact(v) => {
            let p = b.ctx().p;
            let unit = (z.coords().0 / p.pow(v)) % p;
            let two_delta = (2 * b.ctx().delta).rem_euclid(p as i64) as u64;
            QForm::Anisotropic {
                valuation: v as i32 - 2 * b.denom_exp,
                unit_residue: unit * two_delta % p,
            }
        }
    }
}

/// Free-function form of [`VectorC::epsilon`].
pub fn epsilon(b: &VectorC) -> VectorC {
    b.epsilon()
}
