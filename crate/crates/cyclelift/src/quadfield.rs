//! Invariants of `k = Q(√Δ)` for squarefree even `Δ < 0`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};

use crate::error::{Error, Result};
use crate::numth::{self, factorize, hilbert_support, hilbert_symbol, is_prime, Factorization, Place};

/// Default search bound for [`QuadField::auxiliary_split_prime`].
pub const AUX_PRIME_BOUND: u64 = 100_000;

/// The imaginary quadratic field `Q(√Δ)` with its ring of integers `Z[√Δ]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadField {
    delta: i64,
    disc: i64,
    class_number: u64,
    unit_order: u64,
}

/// Build the field record, computing the class number from reduced forms.
pub fn make_field(delta: i64) -> Result<QuadField> {
    QuadField::new(delta)
}

impl QuadField {
    pub fn new(delta: i64) -> Result<Self> {
        if delta >= 0 {
            return Err(Error::invalid(format!("delta = {delta} must be negative")));
        }
        if delta % 2 != 0 {
            return Err(Error::invalid(format!("delta = {delta} must be even")));
        }
        if !factorize(-i128::from(delta))?.is_squarefree() {
            return Err(Error::invalid(format!("delta = {delta} must be squarefree")));
        }
        let disc = 4 * delta;
        let class_number = reduced_forms(disc).len() as u64;
        Ok(QuadField {
            delta,
            disc,
            class_number,
            unit_order: 2,
        })
    }

    pub fn delta(&self) -> i64 {
        self.delta
    }

    pub fn disc(&self) -> i64 {
        self.disc
    }

    pub fn class_number(&self) -> u64 {
        self.class_number
    }

    pub fn unit_order(&self) -> u64 {
        self.unit_order
    }

    /// The quadratic character `χ_k(n) = (4Δ / n)`.
    pub fn chi_k(&self, n: i64) -> Result<i8> {
        if n <= 0 {
            return Err(Error::invalid(format!("chi_k({n}): need n >= 1")));
        }
        Ok(numth::kronecker(self.disc, n))
    }

    fn chi_prime(&self, p: u64) -> i8 {
        numth::kronecker(self.disc, p as i64)
    }

    /// Number of integral ideals of norm `n`, from the local factors.
    pub fn rho(&self, n: u64) -> Result<u64> {
        if n == 0 {
            return Err(Error::invalid("rho(0)"));
        }
        let mut count = 1u64;
        for &(p, e) in factorize(n)?.factors() {
            count *= match self.chi_prime(p) {
                1 => u64::from(e) + 1,
                -1 => u64::from(e % 2 == 0),
                _ => 1,
            };
        }
        Ok(count)
    }

    /// `Σ_{a | n} χ_k(a)`.
    pub fn rho_divisor_sum(&self, n: u64) -> Result<u64> {
        if n == 0 {
            return Err(Error::invalid("rho_divisor_sum(0)"));
        }
        let sum: i64 = factorize(n)?
            .divisors()
            .into_iter()
            .map(|a| i64::from(numth::kronecker(self.disc, a as i64)))
            .sum();
        Ok(sum as u64)
    }

    /// Check that `d_b` is a product of an even number (at least two) of
    /// distinct primes, all inert in `k`.
    pub fn check_quaternion_disc(&self, d_b: u64) -> Result<Factorization> {
        let f = factorize(d_b)?;
        if !f.is_squarefree() {
            return Err(Error::hypothesis(format!("D_B = {d_b} is not squarefree")));
        }
        if f.omega() == 0 || f.omega() % 2 == 1 {
            return Err(Error::hypothesis(format!(
                "D_B = {d_b} must have a positive even number of prime factors"
            )));
        }
        if let Some(l) = f.primes().find(|&l| self.chi_prime(l) != -1) {
            return Err(Error::hypothesis(format!(
                "prime {l} | D_B is not inert in Q(sqrt({}))",
                self.delta
            )));
        }
        Ok(f)
    }

    /// Number of optimal embeddings of `o_k` into a maximal order of
    /// discriminant `d_b`, up to conjugation: `h(k) · 2^{o(D_B)}`.
    pub fn optimal_embedding_count(&self, d_b: u64) -> Result<u64> {
        let f = self.check_quaternion_disc(d_b)?;
        Ok(self.class_number << f.omega())
    }

    /// The exact value of `(i/2π) L(1, χ̌'_k)`, where `χ'_k` is `χ_k` induced
    /// to modulus `4 D_B |Δ|`.
    ///
    /// The Gauss-sum series sums to `B_{1,χ'}/2`, and inducing multiplies the
    /// Bernoulli number by `(1 - χ_k(ℓ))` for each new prime, so the value is
    /// `-(h/|o_k^×|) ∏_{ℓ | D_B} (1 - χ_k(ℓ)) = -(h/|o_k^×|) 2^{o(D_B)}`.
    pub fn lvalue_closed_form(&self, d_b: u64) -> Result<BigRational> {
        let f = self.check_quaternion_disc(d_b)?;
        let mut value = Ratio::new(
            -BigInt::from(self.class_number),
            BigInt::from(self.unit_order),
        );
        for l in f.primes() {
            value *= BigInt::from(1 - i64::from(self.chi_prime(l)));
        }
        Ok(value)
    }

    /// Smallest prime `q`, split in `k`, such that `(-pq, Δ)_ℓ = -1` exactly
    /// for `ℓ ∈ {∞, p}`.
    pub fn auxiliary_split_prime(&self, p: u64) -> Result<u64> {
        self.auxiliary_split_prime_bounded(p, AUX_PRIME_BOUND)
    }

    pub fn auxiliary_split_prime_bounded(&self, p: u64, bound: u64) -> Result<u64> {
        if p == 2 || !is_prime(p) {
            return Err(Error::invalid(format!("{p} is not an odd prime")));
        }
        if self.chi_prime(p) != -1 {
            return Err(Error::hypothesis(format!(
                "{p} is not inert in Q(sqrt({}))",
                self.delta
            )));
        }
        for q in 3..=bound {
            if q == p || !is_prime(q) || self.chi_prime(q) != 1 {
                continue;
            }
            if self.has_aux_profile(p, q)? {
                return Ok(q);
            }
        }
        Err(Error::SearchBoundExhausted { bound })
    }

    /// Whether `(-pq, Δ)_ℓ` is -1 exactly at `ℓ ∈ {∞, p}`.
    pub fn has_aux_profile(&self, p: u64, q: u64) -> Result<bool> {
        let a = Ratio::from_integer(-(p as i64) * (q as i64));
        let b = Ratio::from_integer(self.delta);
        for place in hilbert_support(a, b)? {
            let expected = if place == Place::Infinity || place == Place::Prime(p) {
                -1
            } else {
                1
            };
            if hilbert_symbol(a, b, place)? != expected {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Reduced primitive positive definite forms `(a, b, c)` of discriminant `disc`:
/// `|b| ≤ a ≤ c`, with `b ≥ 0` whenever `|b| = a` or `a = c`.
pub fn reduced_forms(disc: i64) -> Vec<(i64, i64, i64)> {
    assert!(disc < 0 && disc.rem_euclid(4) <= 1, "not a negative discriminant");
    let mut forms = Vec::new();
    let mut a = 1i64;
    while 3 * a * a <= -disc {
        for b in -a..=a {
            let num = b * b - disc;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a {
                continue;
            }
            if b < 0 && (-b == a || a == c) {
                continue;
            }
            if a.gcd(&b).gcd(&c) != 1 {
                continue;
            }
            forms.push((a, b, c));
        }
        a += 1;
    }
    forms
}
