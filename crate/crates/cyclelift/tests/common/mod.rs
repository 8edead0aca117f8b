#![allow(dead_code)]

use cyclelift::bttree::VType;
use cyclelift::localcycles::{primitive_coordinates, OrthEndo};
use cyclelift::padic::{LocalContext, QuadLocalElem, VectorC};
use rand::Rng;

pub fn contexts() -> Vec<LocalContext> {
    vec![
        LocalContext::new(3, -10, 20).unwrap(),
        LocalContext::new(5, -2, 20).unwrap(),
    ]
}

/// A random anisotropic vector with `ord q` in `range`.
pub fn random_vector(
    ctx: &LocalContext,
    rng: &mut impl Rng,
    range: std::ops::RangeInclusive<i32>,
) -> VectorC {
    loop {
        let mut c = || rng.random_range(-60i64..=60);
        let v = VectorC::from_ints(ctx, (c(), c()), (c(), c()), rng.random_range(-1..=1));
        let Ok(v) = v else { continue };
        if v.is_zero() {
            continue;
        }
        if let Ok(ord) = v.qform().ord() {
            if range.contains(&ord) {
                return v;
            }
        }
    }
}

/// Whether two polynomials over `F_{p²}` (coefficient lists of residues)
/// agree up to a nonzero scalar.
pub fn proportional_mod_p(p: u64, delta: i64, f: &[(u64, u64)], g: &[(u64, u64)]) -> bool {
    let d = delta.rem_euclid(p as i64) as u64;
    let mul = |(a, b): (u64, u64), (c, e): (u64, u64)| {
        ((a * c + d * (b * e % p)) % p, (a * e + b * c) % p)
    };
    let nonzero = |v: &[(u64, u64)]| v.iter().any(|&x| x != (0, 0));
    if f.len() != g.len() || !nonzero(f) || !nonzero(g) {
        return false;
    }
    for i in 0..f.len() {
        for j in 0..f.len() {
            let l = mul(f[i], g[j]);
            let r = mul(f[j], g[i]);
            if l != r {
                return false;
            }
        }
    }
    true
}

fn squarefree_part(mut n: i64) -> i64 {
    let sign = n.signum();
    n = n.abs();
    let mut out = 1;
    let mut d = 2;
    while d * d <= n {
        while n % (d * d) == 0 {
            n /= d * d;
        }
        if n % d == 0 {
            out *= d;
            n /= d;
        }
        d += 1;
    }
    sign * out * n
}

/// Whether `a x² + b y² = z²` has a primitive solution modulo `l^k`, with
/// `k = 3` for odd `l` and `k = 6` for `l = 2`. Solutions are normalized to
/// `x = 1` or `(x, y) = (l x', 1)`.
pub fn hilbert_oracle(a: i64, b: i64, l: u64) -> i8 {
    let (a, b) = (squarefree_part(a), squarefree_part(b));
    let k = if l == 2 { 6 } else { 3 };
    let m = l.pow(k) as i128;
    let mut square = vec![false; m as usize];
    for z in 0..m {
        square[(z * z % m) as usize] = true;
    }
    let q = |x: i128, y: i128| (((a as i128) * x * x + (b as i128) * y * y) % m + m) % m;
    let hit = (0..m).any(|y| square[q(1, y) as usize])
        || (0..m).step_by(l as usize).any(|x| square[q(x, 1) as usize]);
    if hit { 1 } else { -1 }
}

/// Number of classes of primitive ideals `[a, b + √Δ]` of norm up to the
/// Minkowski bound, up to equivalence detected by Gauss reduction of the
/// associated forms.
pub fn class_number_oracle(delta: i64) -> usize {
    let disc = 4 * delta;
    let bound = ((2.0 / std::f64::consts::PI) * (-disc as f64).sqrt()).floor() as i64 + 1;
    let mut classes = std::collections::BTreeSet::new();
    for a in 1..=bound {
        for b in 0..a {
            let n = b * b - delta;
            if n % a != 0 {
                continue;
            }
            classes.insert(gauss_reduce(a, 2 * b, n / a));
        }
    }
    classes.len()
}

fn gauss_reduce(mut a: i64, mut b: i64, mut c: i64) -> (i64, i64, i64) {
    loop {
        if b > a || b <= -a {
            let k = (a - b).div_euclid(2 * a);
            let nb = b + 2 * k * a;
            c = (nb * nb - (b * b - 4 * a * c)) / (4 * a);
            b = nb;
        }
        if a > c {
            (a, b, c) = (c, -b, a);
            continue;
        }
        if a == c && b < 0 {
            b = -b;
        }
        return (a, b, c);
    }
}

/// `B_{1,χ}/2` for `χ = χ_k` induced to modulus `4 D_B |Δ|`.
pub fn bernoulli_half(delta: i64, d_b: u64) -> num_rational::Ratio<i64> {
    let m = 4 * d_b as i64 * delta.abs();
    let sum: i64 = (1..=m)
        .filter(|&a| num_integer::gcd(a, d_b as i64) == 1)
        .map(|a| i64::from(cyclelift::numth::kronecker(4 * delta, a)) * a)
        .sum();
    num_rational::Ratio::new(sum, 2 * m)
}

pub fn poly_residues(c: &[QuadLocalElem]) -> Vec<(u64, u64)> {
    c.iter().map(|x| x.residue()).collect()
}

/// Coefficients `(T², T, 1)` of the product of two residual linear factors.
pub fn product_of_factors(vtype: VType, f: (QuadLocalElem, QuadLocalElem), g: (QuadLocalElem, QuadLocalElem)) -> Vec<QuadLocalElem> {
    let ((c0, c1), (d0, d1)) = (f, g);
    match vtype {
        VType::Zero => vec![c0 * d0, c0 * d1 + c1 * d0, c1 * d1],
        VType::Two => vec![c1 * d1, c0 * d1 + c1 * d0, c0 * d0],
    }
}

/// The quadratic cut out by `j` on the central line, read off from the
/// matrix of `j` in a hyperbolic basis.
pub fn orthogonal_quadratic(j: &OrthEndo) -> (VType, Vec<QuadLocalElem>) {
    let center = j.central().unwrap();
    let (_, a0, a1) = primitive_coordinates(j.eigvec(), &center).unwrap();
    let delta = a0.ctx().delta_elem();
    let det = a0 * a1.conj() - a0.conj() * a1;
    let s = delta * det.inv().unwrap();
    let x = s * (a0 * a1.conj()).trace();
    let y = -(s * a0.norm().scale_int(2));
    let z = s * a1.norm().scale_int(2);
    let coeffs = match center.vtype() {
        VType::Zero => vec![-y, x.scale_int(2), z],
        VType::Two => vec![z, x.scale_int(2), -y],
    };
    (center.vtype(), coeffs)
}
