//! Formal divisors on the Shimura curve and the verifiers comparing the
//! orthogonal and unitary generating series.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::numth::{factorize, is_prime};
use crate::qseries::{
    op_phi_set, parse_rational, rational_to_string, shimura_lift_to, Character, Coefficient,
    ConstantTerm, FormalSeries, JsonCoefficient, ShimuraParams,
};
use crate::quadfield::QuadField;

/// A named divisor class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    /// `Z°(n)`.
    Zo(u64),
    /// `Z(m, φ_i)` for the `i`-th embedding class.
    Zplus(u64, u32),
    /// The auxiliary divisor `K`.
    K,
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Zo(n) => write!(f, "Zo({n})"),
            Symbol::Zplus(m, i) => write!(f, "Zplus({m},{i})"),
            Symbol::K => f.write_str("K"),
        }
    }
}

impl FromStr for Symbol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::invalid(format!("unknown symbol {s:?}"));
        let s = s.trim();
        if s == "K" {
            return Ok(Symbol::K);
        }
        let (name, args) = s.strip_suffix(')').and_then(|s| s.split_once('(')).ok_or_else(bad)?;
        let args: Vec<&str> = args.split(',').map(str::trim).collect();
        match (name, args.as_slice()) {
            ("Zo", [n]) => Ok(Symbol::Zo(n.parse().map_err(|_| bad())?)),
            ("Zplus", [m, i]) => Ok(Symbol::Zplus(
                m.parse().map_err(|_| bad())?,
                i.parse().map_err(|_| bad())?,
            )),
            _ => Err(bad()),
        }
    }
}

/// A finite `Q`-linear combination of symbols.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SymbolicDivisor {
    terms: BTreeMap<Symbol, BigRational>,
}

impl SymbolicDivisor {
    pub fn symbol(s: Symbol) -> Self {
        Self::term(s, BigRational::one())
    }

    pub fn term(s: Symbol, w: BigRational) -> Self {
        let mut d = SymbolicDivisor::default();
        d.add_term(s, &w);
        d
    }

    pub fn add_term(&mut self, s: Symbol, w: &BigRational) {
        let entry = self.terms.entry(s).or_insert_with(<BigRational as Zero>::zero);
        *entry += w;
        if Zero::is_zero(&*entry) {
            self.terms.remove(&s);
        }
    }

    pub fn weight(&self, s: Symbol) -> BigRational {
        self.terms.get(&s).cloned().unwrap_or_else(<BigRational as Zero>::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (Symbol, &BigRational)> {
        self.terms.iter().map(|(s, w)| (*s, w))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

impl fmt::Display for SymbolicDivisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (s, w)) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            if w.is_one() {
                write!(f, "{s}")?;
            } else {
                write!(f, "{}*{s}", rational_to_string(w))?;
            }
        }
        Ok(())
    }
}

impl Coefficient for SymbolicDivisor {
    fn zero() -> Self {
        SymbolicDivisor::default()
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_assign(&mut self, other: &Self) {
        for (s, w) in &other.terms {
            self.add_term(*s, w);
        }
    }

    fn scale(&self, c: &BigRational) -> Self {
        if Zero::is_zero(c) {
            return SymbolicDivisor::default();
        }
        SymbolicDivisor {
            terms: self.terms.iter().map(|(s, w)| (*s, w * c)).collect(),
        }
    }
}

impl JsonCoefficient for SymbolicDivisor {
    /// `[{"sym": "Zo(7)", "w": "1/2"}, ...]`.
    fn to_json(&self) -> Value {
        Value::Array(
            self.terms
                .iter()
                .map(|(s, w)| json!({"sym": s.to_string(), "w": rational_to_string(w)}))
                .collect(),
        )
    }

    fn from_json(v: &Value) -> Result<Self> {
        let items = v
            .as_array()
            .ok_or_else(|| Error::invalid(format!("symbolic coefficient must be a list: {v}")))?;
        let mut d = SymbolicDivisor::default();
        for item in items {
            let sym = item["sym"]
                .as_str()
                .ok_or_else(|| Error::invalid(format!("missing sym in {item}")))?;
            let w = match &item["w"] {
                Value::String(s) => parse_rational(s)?,
                Value::Number(n) => BigRational::from_integer(
                    n.as_i64().ok_or_else(|| Error::invalid(format!("bad weight {n}")))?.into(),
                ),
                other => return Err(Error::invalid(format!("bad weight {other}"))),
            };
            d.add_term(sym.parse()?, &w);
        }
        Ok(d)
    }
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `Φ° = -K + Σ_{0 < n ≤ m_max} Z°(n) q^n`.
pub fn build_phi_o(field: &QuadField, d_b: u64, m_max: u64) -> Result<FormalSeries<SymbolicDivisor>> {
    field.check_quaternion_disc(d_b)?;
    let mut f = FormalSeries::zero(m_max);
    f.set(0, SymbolicDivisor::term(Symbol::K, rat(-1)))?;
    for n in 1..=m_max {
        f.set(n, SymbolicDivisor::symbol(Symbol::Zo(n)))?;
    }
    Ok(f)
}

/// `Φ^u` with coefficients rewritten through the bad-fiber relations: zero
/// unless `|Δ| | m`, and `Σ_{α | m', (α, D_B) = 1} χ_k(α) Z°(|Δ| m'²/α²)` at
/// `m = |Δ| m'`. The constant term is `(i/2π) L(1, χ̌'_k) K`.
pub fn build_phi_u(field: &QuadField, d_b: u64, m_max: u64) -> Result<FormalSeries<SymbolicDivisor>> {
    let t = field.delta().unsigned_abs();
    let mut f = FormalSeries::zero(m_max);
    f.set(0, SymbolicDivisor::term(Symbol::K, field.lvalue_closed_form(d_b)?))?;
    for m in (t..=m_max).step_by(t as usize) {
        let mp = m / t;
        let mut c = SymbolicDivisor::default();
        for alpha in factorize(mp)?.divisors() {
            if alpha.gcd(&d_b) != 1 {
                continue;
            }
            let chi = field.chi_k(alpha as i64)?;
            if chi != 0 {
                let k = mp / alpha;
                c.add_term(Symbol::Zo(t * k * k), &rat(chi.into()));
            }
        }
        f.set(m, c)?;
    }
    Ok(f)
}

/// A coefficient where the two sides disagree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub m: u64,
    pub lhs: SymbolicDivisor,
    pub rhs: SymbolicDivisor,
}

/// Outcome of a coefficientwise comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub params: Value,
    pub checked: u64,
    pub mismatches: Vec<Mismatch>,
    /// The constant `C'` of the operator identity, when applicable.
    pub c_prime: Option<SymbolicDivisor>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty() && self.c_prime.as_ref().is_none_or(|c| c.is_zero())
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "params": self.params,
            "checked": self.checked,
            "mismatches": self
                .mismatches
                .iter()
                .map(|x| json!({"m": x.m, "lhs": x.lhs.to_json(), "rhs": x.rhs.to_json()}))
                .collect::<Vec<_>>(),
        });
        if let Some(c) = &self.c_prime {
            v["c_prime"] = c.to_json();
        }
        v
    }
}

fn compare(
    lhs: &FormalSeries<SymbolicDivisor>,
    rhs: &FormalSeries<SymbolicDivisor>,
    m_max: u64,
) -> Result<Vec<Mismatch>> {
    lhs.differences(rhs, m_max)?
        .into_iter()
        .map(|m| Ok(Mismatch { m, lhs: lhs.get(m)?, rhs: rhs.get(m)? }))
        .collect()
}

/// Compare `Sh(Φ°)` for `κ = 3`, `N = D_B`, `t = |Δ|`, `χ = 1` with `Φ^u`
/// on the exponents `0..=m_max`.
pub fn verify_main_theorem(field: &QuadField, d_b: u64, m_max: u64) -> Result<Report> {
    field.check_quaternion_disc(d_b)?;
    let t = field.delta().unsigned_abs();
    let params = ShimuraParams::new(3, d_b, t, Character::Principal)?;
    let top = m_max / t;
    let phi_o = build_phi_o(field, d_b, t * top * top)?;
    let lift = shimura_lift_to(&phi_o, &params, m_max)?;
    if lift.constant != ConstantTerm::Exact {
        return Err(Error::hypothesis("constant term of the lift has no closed form"));
    }
    let phi_u = build_phi_u(field, d_b, m_max)?;
    Ok(Report {
        params: json!({"delta": field.delta(), "d_b": d_b, "m_max": m_max}),
        checked: m_max + 1,
        mismatches: compare(&lift.series, &phi_u, m_max)?,
        c_prime: None,
    })
}

/// `#f^{-1}(ξ) = |o_k^×| ρ(m / (c |Δ| ν_p ν^p))`, zero when the argument is
/// not an integer.
pub fn fiber_count(field: &QuadField, m: u64, c: u64, nu_p: u64, nu_away: u64) -> Result<u64> {
    if m == 0 || c == 0 || nu_p == 0 || nu_away == 0 {
        return Err(Error::invalid("fiber_count arguments must be positive"));
    }
    if nu_p != 1 && !is_prime(nu_p) {
        return Err(Error::invalid(format!("nu_p = {nu_p} must be 1 or a prime")));
    }
    if !factorize(nu_away)?.is_squarefree() {
        return Err(Error::invalid(format!("nu_away = {nu_away} must be squarefree")));
    }
    let den = c as u128 * u128::from(field.delta().unsigned_abs()) * nu_p as u128 * nu_away as u128;
    if u128::from(m) % den != 0 {
        return Ok(0);
    }
    Ok(field.unit_order() * field.rho((u128::from(m) / den) as u64)?)
}

/// Check `Φ^u = C' + Σ_{[φ]} (2 + Σ_{I ≠ ∅} φ_I)(Φ^naive_φ)` with free
/// symbols `Z(n, φ_i)`, where `Φ^naive_φ = C + (1/2h) Σ Z(n, φ) q^n` and
/// `C = (i/4π) L(1, χ̌'_k) / #Opt · K`, so that `C'` should vanish.
pub fn verify_remark_identity(
    field: &QuadField,
    d_b: u64,
    m_max: u64,
    num_embedding_classes: u64,
) -> Result<Report> {
    let opt = field.optimal_embedding_count(d_b)?;
    if num_embedding_classes != opt {
        return Err(Error::invalid(format!(
            "expected {opt} embedding classes, got {num_embedding_classes}"
        )));
    }
    let primes: Vec<u64> = factorize(d_b)?.primes().collect();
    let lvalue = field.lvalue_closed_form(d_b)?;
    let half_h = BigRational::new(BigInt::one(), BigInt::from(2 * field.class_number()));
    let c = SymbolicDivisor::term(Symbol::K, &lvalue / BigInt::from(2 * opt));

    let mut rhs = FormalSeries::zero(m_max);
    let mut constants = SymbolicDivisor::default();
    for i in 1..=opt as u32 {
        let mut naive = FormalSeries::zero(m_max);
        naive.set(0, c.clone())?;
        for n in 1..=m_max {
            naive.set(n, SymbolicDivisor::term(Symbol::Zplus(n, i), half_h.clone()))?;
        }
        constants.add_assign(&c.scale(&rat(2)));
        rhs = rhs.add(&naive.scale(&rat(2)));
        for mask in 1u32..(1 << primes.len()) {
            let subset: Vec<u64> = (0..primes.len())
                .filter(|k| mask & (1 << k) != 0)
                .map(|k| primes[k])
                .collect();
            rhs = rhs.add(&op_phi_set(&subset, &naive)?.truncate(m_max));
        }
    }
    let total = SymbolicDivisor::term(Symbol::K, lvalue.clone());
    let c_prime = total.sub(&constants);
    rhs.add_at(0, &c_prime)?;

    let mut lhs = FormalSeries::zero(m_max);
    lhs.set(0, total)?;
    for m in 1..=m_max {
        let star = m / m.gcd(&d_b);
        let mut coeff = SymbolicDivisor::default();
        for i in 1..=opt as u32 {
            coeff.add_term(Symbol::Zplus(m, i), &half_h);
            coeff.add_term(Symbol::Zplus(star, i), &half_h);
        }
        lhs.set(m, coeff)?;
    }
    Ok(Report {
        params: json!({"delta": field.delta(), "d_b": d_b, "m_max": m_max, "classes": opt}),
        checked: m_max + 1,
        mismatches: compare(&lhs, &rhs, m_max)?,
        c_prime: Some(c_prime),
    })
}
