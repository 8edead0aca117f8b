mod common;

use common::{bernoulli_half, class_number_oracle, hilbert_oracle};
use cyclelift::numth::{factorize, hilbert_symbol, is_prime, kronecker, Place};
use cyclelift::quadfield::make_field;
use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use proptest::prelude::*;

const DELTAS: [i64; 6] = [-2, -6, -10, -14, -22, -26];

fn legendre_euler(a: i64, p: i64) -> i8 {
    let a = a.rem_euclid(p);
    if a == 0 {
        return 0;
    }
    let mut r: i128 = 1;
    let mut base = a as i128;
    let mut e = (p - 1) / 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * base % p as i128;
        }
        base = base * base % p as i128;
        e >>= 1;
    }
    if r == 1 { 1 } else { -1 }
}

#[test]
fn kronecker_matches_euler_criterion() {
    for p in (3..200).filter(|&p| is_prime(p as u64)) {
        for a in -50..50 {
            assert_eq!(kronecker(a, p), legendre_euler(a, p), "({a}/{p})");
        }
    }
    // (a/2) via the residue of a mod 8
    for a in -40i64..40 {
        let expected = match a.rem_euclid(8) {
            1 | 7 => 1,
            3 | 5 => -1,
            _ => 0,
        };
        assert_eq!(kronecker(a, 2), expected);
    }
}

#[test]
fn hilbert_symbol_matches_solvability() {
    let values = [-30, -15, -10, -7, -6, -5, -3, -2, -1, 1, 2, 3, 5, 6, 7, 10, 14, 15, 21];
    for l in [2u64, 3, 5, 7] {
        for &a in &values {
            for &b in &values {
                let got = hilbert_symbol(Ratio::from_integer(a), Ratio::from_integer(b), Place::Prime(l)).unwrap();
                assert_eq!(got, hilbert_oracle(a, b, l), "({a}, {b})_{l}");
            }
        }
    }
}

#[test]
fn hilbert_symbol_on_rationals() {
    let a = Ratio::new(3, 4);
    let b = Ratio::new(-5, 9);
    for l in [2u64, 3, 5] {
        let got = hilbert_symbol(a, b, Place::Prime(l)).unwrap();
        assert_eq!(got, hilbert_oracle(3, -5, l));
    }
    assert_eq!(hilbert_symbol(Ratio::from_integer(-1), Ratio::from_integer(-1), Place::Infinity).unwrap(), -1);
    assert!(hilbert_symbol(Ratio::from_integer(1), Ratio::from_integer(1), Place::Prime(4)).is_err());
}

#[test]
fn class_numbers_match_ideal_enumeration() {
    for delta in DELTAS {
        let k = make_field(delta).unwrap();
        assert_eq!(k.class_number() as usize, class_number_oracle(delta), "delta = {delta}");
    }
    assert_eq!(make_field(-14).unwrap().class_number(), 4);
    assert_eq!(make_field(-26).unwrap().class_number(), 6);
}

#[test]
fn rho_identity() {
    for delta in DELTAS {
        let k = make_field(delta).unwrap();
        for n in 1..=2000 {
            assert_eq!(k.rho(n).unwrap(), k.rho_divisor_sum(n).unwrap());
        }
    }
}

#[test]
fn lvalue_matches_bernoulli_number() {
    for (delta, d_b) in [(-2, 35), (-10, 51), (-2, 65), (-2, 5 * 7 * 13 * 29)] {
        let k = make_field(delta).unwrap();
        let exact = k.lvalue_closed_form(d_b).unwrap();
        let oracle = bernoulli_half(delta, d_b);
        let oracle = BigRational::new(BigInt::from(*oracle.numer()), BigInt::from(*oracle.denom()));
        assert_eq!(exact, oracle, "({delta}, {d_b})");
    }
}

#[test]
fn embedding_counts() {
    let k = make_field(-2).unwrap();
    assert_eq!(k.optimal_embedding_count(65).unwrap(), 4);
    assert!(k.chi_k(13).unwrap() == -1 && k.chi_k(5).unwrap() == -1);
    let k = make_field(-10).unwrap();
    assert_eq!(k.optimal_embedding_count(51).unwrap(), 8);
}

#[test]
fn auxiliary_primes_pass_the_oracle() {
    for delta in [-2i64, -10] {
        let k = make_field(delta).unwrap();
        for p in (3..=50u64).filter(|&p| is_prime(p) && k.chi_k(p as i64).unwrap() == -1) {
            let q = k.auxiliary_split_prime(p).unwrap();
            assert_eq!(k.chi_k(q as i64).unwrap(), 1);
            let a = -((p * q) as i64);
            let mut places: Vec<u64> = vec![2, p, q];
            places.extend(factorize(-i128::from(delta)).unwrap().primes());
            for l in places {
                let expected = if l == p { -1 } else { 1 };
                assert_eq!(hilbert_oracle(a, delta, l), expected, "p = {p}, q = {q}, l = {l}");
            }
        }
    }
}

proptest! {
    #[test]
    fn kronecker_is_multiplicative(a in -200i64..200, m in 1i64..300, n in 1i64..300) {
        prop_assert_eq!(kronecker(a, m * n), kronecker(a, m) * kronecker(a, n));
    }

    #[test]
    fn hilbert_symbol_is_symmetric_and_bimultiplicative(a in -60i64..60, b in -60i64..60, c in -60i64..60, li in 0usize..4) {
        prop_assume!(a != 0 && b != 0 && c != 0);
        let place = [Place::Prime(2), Place::Prime(3), Place::Prime(5), Place::Infinity][li];
        let h = |x: i64, y: i64| hilbert_symbol(Ratio::from_integer(x), Ratio::from_integer(y), place).unwrap();
        prop_assert_eq!(h(a, b), h(b, a));
        prop_assert_eq!(h(a, b * c), h(a, b) * h(a, c));
        prop_assert_eq!(h(a, -a), 1);
    }

    #[test]
    fn hilbert_product_formula(a in -500i64..500, b in -500i64..500) {
        prop_assume!(a != 0 && b != 0);
        let (a, b) = (Ratio::from_integer(a), Ratio::from_integer(b));
        let product: i8 = cyclelift::numth::hilbert_support(a, b)
            .unwrap()
            .into_iter()
            .map(|v| hilbert_symbol(a, b, v).unwrap())
            .product();
        prop_assert_eq!(product, 1);
    }

    #[test]
    fn rho_is_multiplicative(m in 1u64..400, n in 1u64..400) {
        prop_assume!(num_integer::gcd(m, n) == 1);
        let k = make_field(-10).unwrap();
        prop_assert_eq!(k.rho(m * n).unwrap(), k.rho(m).unwrap() * k.rho(n).unwrap());
    }
}
