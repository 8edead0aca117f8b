//! Factorization, Kronecker symbols and Hilbert symbols over `Q`.

use std::fmt;

use num_rational::Ratio;

use crate::error::{Error, Result};

/// Prime factorization `n = ∏ p^e` with primes strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Factorization {
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    /// Number of distinct prime factors.
    pub fn omega(&self) -> usize {
        self.factors.len()
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    /// Multiplicity of `p` (zero if `p` does not divide).
    pub fn multiplicity(&self, p: u64) -> u32 {
        self.factors
            .iter()
            .find(|&&(q, _)| q == p)
            .map_or(0, |&(_, e)| e)
    }

    /// The product of the prime powers, i.e. the number that was factored.
    pub fn value(&self) -> u128 {
        self.factors
            .iter()
            .map(|&(p, e)| u128::from(p).pow(e))
            .product()
    }

    /// All positive divisors in increasing order.
    pub fn divisors(&self) -> Vec<u64> {
        let mut divs = vec![1u64];
        for &(p, e) in &self.factors {
            let mut next = Vec::with_capacity(divs.len() * (e as usize + 1));
            for &d in &divs {
                let mut pk = d;
                next.push(pk);
                for _ in 0..e {
                    pk *= p;
                    next.push(pk);
                }
            }
            divs = next;
        }
        divs.sort_unstable();
        divs
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("1");
        }
        for (i, &(p, e)) in self.factors.iter().enumerate() {
            if i > 0 {
                f.write_str(" * ")?;
            }
            if e == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Factor `1 ≤ n ≤ 2^63` by trial division.
pub fn factorize(n: impl Into<i128>) -> Result<Factorization> {
    let n = n.into();
    if n <= 0 {
        return Err(Error::invalid(format!("cannot factor {n}: need n >= 1")));
    }
    if n > 1i128 << 63 {
        return Err(Error::invalid(format!("cannot factor {n}: exceeds 2^63")));
    }
    let mut n = n as u64;
    let mut factors = Vec::new();
    let mut push = |n: &mut u64, p: u64| {
        let mut e = 0;
        while *n % p == 0 {
            *n /= p;
            e += 1;
        }
        if e > 0 {
            factors.push((p, e));
        }
    };
    push(&mut n, 2);
    let mut p = 3u64;
    while p.saturating_mul(p) <= n {
        push(&mut n, p);
        p += 2;
    }
    if n > 1 {
        factors.push((n, 1));
    }
    Ok(Factorization { factors })
}

/// Trial-division primality test.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Exponent of the prime `p` in `n` (`n != 0`).
pub fn valuation(n: i128, p: u64) -> u32 {
    debug_assert!(n != 0);
    let p = i128::from(p);
    let mut n = n;
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// Kronecker symbol `(a/n)`.
///
/// `(a/2)` is 0 for even `a`, +1 for `a ≡ ±1 mod 8` and -1 for `a ≡ ±3 mod 8`;
/// `(a/-1)` is the sign of `a`; `(a/1) = 1` and `(a/0) = [a = ±1]`.
pub fn kronecker(a: i64, n: i64) -> i8 {
    let mut a = i128::from(a);
    let mut n = i128::from(n);
    if n == 0 {
        return i8::from(a == 1 || a == -1);
    }
    if a % 2 == 0 && n % 2 == 0 {
        return 0;
    }
    let mut k = 1i8;
    let v = n.trailing_zeros();
    n >>= v;
    if v % 2 == 1 {
        let r = a.rem_euclid(8);
        if r == 3 || r == 5 {
            k = -k;
        }
    }
    if n < 0 {
        n = -n;
        if a < 0 {
            k = -k;
        }
    }
    // n is now odd and positive: Jacobi symbol with quadratic reciprocity.
    a = a.rem_euclid(n);
    while a != 0 {
        let v = a.trailing_zeros();
        a >>= v;
        let r = n % 8;
        if v % 2 == 1 && (r == 3 || r == 5) {
            k = -k;
        }
        if a % 4 == 3 && n % 4 == 3 {
            k = -k;
        }
        std::mem::swap(&mut a, &mut n);
        a %= n;
    }
    if n == 1 {
        k
    } else {
        0
    }
}

/// A place of `Q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Place {
    Prime(u64),
    Infinity,
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Prime(p) => write!(f, "{p}"),
            Place::Infinity => f.write_str("inf"),
        }
    }
}

/// Integer in the same square class as `a`.
fn square_class_rep(a: Ratio<i64>) -> i128 {
    i128::from(*a.numer()) * i128::from(*a.denom())
}

/// Hilbert symbol `(a, b)_v` for nonzero rationals.
pub fn hilbert_symbol(a: Ratio<i64>, b: Ratio<i64>, place: Place) -> Result<i8> {
    if *a.numer() == 0 || *b.numer() == 0 {
        return Err(Error::invalid("hilbert symbol of zero"));
    }
    let (a, b) = (square_class_rep(a), square_class_rep(b));
    match place {
        Place::Infinity => Ok(if a < 0 && b < 0 { -1 } else { 1 }),
        Place::Prime(2) => {
            let (al, u) = split_power(a, 2);
            let (be, v) = split_power(b, 2);
            let eps = |x: i128| ((x.rem_euclid(8) - 1) / 2) % 2;
            let omega = |x: i128| {
                let r = x.rem_euclid(8);
                i128::from(r == 3 || r == 5)
            };
            let e = eps(u) * eps(v) + i128::from(al) * omega(v) + i128::from(be) * omega(u);
            Ok(if e % 2 == 0 { 1 } else { -1 })
        }
        Place::Prime(l) => {
            if !is_prime(l) {
                return Err(Error::invalid(format!("{l} is not a prime")));
            }
            let (al, u) = split_power(a, l);
            let (be, v) = split_power(b, l);
            let li = i128::from(l);
            let legendre = |x: i128| kronecker(x.rem_euclid(li) as i64, l as i64);
            let mut s: i8 = 1;
            if al % 2 == 1 && be % 2 == 1 && l % 4 == 3 {
                s = -s;
            }
            if be % 2 == 1 {
                s *= legendre(u);
            }
            if al % 2 == 1 {
                s *= legendre(v);
            }
            Ok(s)
        }
    }
}

fn split_power(a: i128, p: u64) -> (u32, i128) {
    let v = valuation(a, p);
    (v, a / i128::from(p).pow(v))
}

/// Places at which `(a, b)_v` can be -1: infinity, 2, and the primes dividing
/// the numerators and denominators.
pub fn hilbert_support(a: Ratio<i64>, b: Ratio<i64>) -> Result<Vec<Place>> {
    let mut places = vec![Place::Infinity, Place::Prime(2)];
    for x in [*a.numer(), *a.denom(), *b.numer(), *b.denom()] {
        if x == 0 {
            return Err(Error::invalid("hilbert symbol of zero"));
        }
        for p in factorize(i128::from(x).abs())?.primes() {
            places.push(Place::Prime(p));
        }
    }
    places.sort();
    places.dedup();
    Ok(places)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Ratio<i64> {
        Ratio::from_integer(n)
    }

    #[test]
    fn factor_examples() {
        assert!(factorize(1u64).unwrap().factors().is_empty());
        assert_eq!(factorize(12u64).unwrap().factors(), &[(2, 2), (3, 1)]);
        assert_eq!(factorize(35u64).unwrap().factors(), &[(5, 1), (7, 1)]);
        assert!(factorize(0u64).is_err());
        assert!(factorize(-4i64).is_err());
        assert_eq!(factorize(1i128 << 63).unwrap().factors(), &[(2, 63)]);
    }

    #[test]
    fn divisors_of_12() {
        assert_eq!(factorize(12u64).unwrap().divisors(), vec![1, 2, 3, 4, 6, 12]);
    }

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker(-8, 3), 1);
        assert_eq!(kronecker(-8, 5), -1);
        assert_eq!(kronecker(-8, 2), 0);
        assert_eq!(kronecker(5, 2), -1);
        assert_eq!(kronecker(7, 2), 1);
        assert_eq!(kronecker(-3, -1), -1);
        assert_eq!(kronecker(3, -1), 1);
        assert_eq!(kronecker(1, 0), 1);
        assert_eq!(kronecker(2, 0), 0);
    }

    #[test]
    fn hilbert_examples() {
        assert_eq!(hilbert_symbol(r(1), r(-7), Place::Prime(7)).unwrap(), 1);
        assert_eq!(hilbert_symbol(r(-1), r(-1), Place::Infinity).unwrap(), -1);
        assert_eq!(hilbert_symbol(r(-1), r(-1), Place::Prime(2)).unwrap(), -1);
        assert_eq!(hilbert_symbol(r(-15), r(-2), Place::Prime(5)).unwrap(), -1);
        assert!(hilbert_symbol(r(0), r(3), Place::Prime(3)).is_err());
        assert!(hilbert_symbol(r(2), r(3), Place::Prime(9)).is_err());
    }
}
