use cyclelift::bttree::{ball, central_exponent, central_lattice};
use cyclelift::localcycles::{multiplicity, orthogonal_cycle, split_pair, unitary_cycle, OrthEndo};
use cyclelift::numth::{hilbert_symbol, is_prime, Place};
use cyclelift::padic::{LocalContext, VectorC};
use cyclelift::quadfield::QuadField;
use cyclelift::Result;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

/// A verification sweep in the report format shared with the identity
/// checks.
pub struct Outcome {
    pub params: Value,
    pub checked: u64,
    pub mismatches: Vec<Value>,
}

impl Outcome {
    pub fn to_json(&self) -> Value {
        json!({"params": self.params, "checked": self.checked, "mismatches": self.mismatches})
    }
}

pub fn rho(delta: i64, max: u64) -> Result<Outcome> {
    let field = QuadField::new(delta)?;
    let mut mismatches = Vec::new();
    for n in 1..=max {
        let (a, b) = (field.rho(n)?, field.rho_divisor_sum(n)?);
        if a != b {
            mismatches.push(json!({"n": n, "rho": a, "divisor_sum": b}));
        }
    }
    Ok(Outcome { params: json!({"delta": delta, "max": max}), checked: max, mismatches })
}

fn random_vector(ctx: &LocalContext, rng: &mut ChaCha8Rng, lo: i32, hi: i32) -> VectorC {
    loop {
        let mut c = || rng.random_range(-60i64..=60);
        let Ok(v) = VectorC::from_ints(ctx, (c(), c()), (c(), c()), rng.random_range(-1..=1)) else {
            continue;
        };
        if let Ok(ord) = v.qform().ord() {
            if (lo..=hi).contains(&ord) {
                return v;
            }
        }
    }
}

pub fn r_formula(ctx: &LocalContext, count: u32, radius: u32, seed: u64) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checked = 0;
    let mut mismatches = Vec::new();
    for _ in 0..count {
        let b = random_vector(ctx, &mut rng, -1, 6);
        let ord = b.qform().ord()?;
        let t = central_exponent(&b)?;
        for (l, d) in ball(&central_lattice(&b)?, radius)? {
            let d = d as i32;
            let formula = if ord % 2 == 0 { t - d / 2 } else { t - (d + 1) / 2 };
            let direct = l.r_invariant(&b)?;
            checked += 1;
            if formula != direct {
                mismatches.push(json!({
                    "vector": b.to_string(), "distance": d, "formula": formula, "direct": direct
                }));
            }
        }
    }
    Ok(Outcome {
        params: json!({"p": ctx.p(), "delta": ctx.delta(), "count": count, "radius": radius, "seed": seed}),
        checked,
        mismatches,
    })
}

pub fn local_compare(ctx: &LocalContext, alpha_max: u32, count: u32, seed: u64) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checked = 0;
    let mut mismatches = Vec::new();
    for ord in [-1, 0] {
        for _ in 0..count {
            let b0 = random_vector(ctx, &mut rng, ord, ord);
            for alpha in 0..=alpha_max {
                let j = OrthEndo::new(alpha, b0)?;
                let (bp, bm) = split_pair(&j)?;
                let center = j.central()?;
                for (l, d) in ball(&center, alpha + 2)? {
                    let sum = multiplicity(&bp, &l)? + multiplicity(&bm, &l)?;
                    checked += 1;
                    if sum != alpha.saturating_sub(d) {
                        mismatches.push(json!({
                            "vector": b0.to_string(), "alpha": alpha, "distance": d, "sum": sum
                        }));
                    }
                }
                let hor = unitary_cycle(&bp)?.horizontal_count() + unitary_cycle(&bm)?.horizontal_count();
                checked += 1;
                if hor != orthogonal_cycle(&j)?.horizontal_count() {
                    mismatches.push(json!({"vector": b0.to_string(), "alpha": alpha, "horizontal": hor}));
                }
            }
        }
    }
    Ok(Outcome {
        params: json!({"p": ctx.p(), "delta": ctx.delta(), "alpha_max": alpha_max, "count": count, "seed": seed}),
        checked,
        mismatches,
    })
}

/// For each inert odd prime `p ≤ max`, recheck the auxiliary prime place by
/// place.
pub fn hilbert(delta: i64, max: u64) -> Result<Outcome> {
    let field = QuadField::new(delta)?;
    let mut checked = 0;
    let mut mismatches = Vec::new();
    for p in (3..=max).filter(|&p| is_prime(p)) {
        if field.chi_k(p as i64)? != -1 {
            continue;
        }
        let q = field.auxiliary_split_prime(p)?;
        checked += 1;
        if field.chi_k(q as i64)? != 1 {
            mismatches.push(json!({"p": p, "q": q, "reason": "q does not split"}));
        }
        let a = Ratio::from_integer(-((p * q) as i64));
        let b = Ratio::from_integer(delta);
        let mut places = vec![Place::Infinity, Place::Prime(2), Place::Prime(p), Place::Prime(q)];
        places.extend(
            cyclelift::numth::factorize(-i128::from(delta))?
                .primes()
                .map(Place::Prime),
        );
        places.dedup();
        for place in places {
            let expected = if place == Place::Infinity || place == Place::Prime(p) { -1 } else { 1 };
            let got = hilbert_symbol(a, b, place)?;
            if got != expected {
                let name = match place {
                    Place::Infinity => "inf".to_string(),
                    Place::Prime(l) => l.to_string(),
                };
                mismatches.push(json!({"p": p, "q": q, "place": name, "symbol": got}));
            }
        }
    }
    Ok(Outcome { params: json!({"delta": delta, "max": max}), checked, mismatches })
}
