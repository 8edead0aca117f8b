mod common;

use common::{contexts, orthogonal_quadratic, poly_residues, product_of_factors, proportional_mod_p, random_vector};
use cyclelift::bttree::{ball, central_lattice, distance_fast, VType};
use cyclelift::localcycles::{
    fiber_points, multiplicity, ordinary_equation, orthogonal_cycle,
    split_pair, superspecial_exponents, unitary_cycle, FiberPoints, OrthEndo, Sign, SpecialHom,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn comparison_theorem() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for ctx in contexts() {
        for ord in [-1, 0] {
            for _ in 0..2 {
                let b0 = random_vector(&ctx, &mut rng, ord..=ord);
                for alpha in 0..=4u32 {
                    let j = OrthEndo::new(alpha, b0).unwrap();
                    assert_eq!(j.nu_p(), if ord == -1 { 1 } else { ctx.p() });
                    let (bp, bm) = split_pair(&j).unwrap();
                    if alpha > 0 {
                        let mut norms = [bp.ord_qpm(), bm.ord_qpm()];
                        norms.sort();
                        assert_eq!(norms, [alpha as i32 - 1, alpha as i32]);
                    }
                    let zo = orthogonal_cycle(&j).unwrap();
                    let zu = unitary_cycle(&bp).unwrap().add(&unitary_cycle(&bm).unwrap());
                    assert_eq!(zo, zu);
                    let center = j.central().unwrap();
                    for (l, d) in ball(&center, alpha + 2).unwrap() {
                        let m = multiplicity(&bp, &l).unwrap() + multiplicity(&bm, &l).unwrap();
                        assert_eq!(m, alpha.saturating_sub(d));
                    }
                    assert_eq!(zo.horizontal_count(), 2);
                }
            }
        }
    }
}

#[test]
fn horizontal_quadratic_matches_linear_factors() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for ctx in contexts() {
        for ord in [-1, 0] {
            for _ in 0..4 {
                let b0 = random_vector(&ctx, &mut rng, ord..=ord);
                for alpha in 0..=3u32 {
                    let j = OrthEndo::new(alpha, b0).unwrap();
                    let center = j.central().unwrap();
                    let (bp, bm) = split_pair(&j).unwrap();
                    let ep = ordinary_equation(&bp, &center).unwrap();
                    let em = ordinary_equation(&bm, &center).unwrap();
                    assert!(ep.has_ordinary_zero() && em.has_ordinary_zero());
                    let prod = product_of_factors(center.vtype(), (ep.c0, ep.c1), (em.c0, em.c1));
                    let (vtype, quad) = orthogonal_quadratic(&j);
                    assert_eq!(vtype, center.vtype());
                    assert!(proportional_mod_p(
                        ctx.p(),
                        ctx.delta(),
                        &poly_residues(&prod),
                        &poly_residues(&quad)
                    ));
                }
            }
        }
    }
}

#[test]
fn charts_reproduce_multiplicities() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for ctx in contexts() {
        for _ in 0..3 {
            let v = random_vector(&ctx, &mut rng, -1..=4);
            for sign in [Sign::Plus, Sign::Minus] {
                let Ok(h) = SpecialHom::new(sign, v) else { continue };
                let vertices = ball(h.central(), 4).unwrap();
                for (l, d) in &vertices {
                    let m = multiplicity(&h, l).unwrap();
                    if *d as i32 > h.ord_qpm() {
                        assert_eq!(m, 0);
                    }
                    match ordinary_equation(&h, l) {
                        Ok(eq) => {
                            assert_eq!(eq.p_exp, m);
                            assert_eq!(eq.has_ordinary_zero(), *d == 0);
                        }
                        Err(_) => assert_eq!(m, 0),
                    }
                    let fp = fiber_points(&h, l).unwrap();
                    assert_eq!(fp == FiberPoints::FullLine, m > 0);
                    if *d >= 3 || l.vtype() != VType::Zero {
                        continue;
                    }
                    for n in l.neighbors().unwrap() {
                        let (e0, e1) = superspecial_exponents(&h, l, &n).unwrap();
                        if l.contains(h.vec()).unwrap() {
                            assert_eq!((e0, e1), (multiplicity(&h, &n).unwrap(), m));
                        } else {
                            assert_eq!((e0, e1), (0, 0));
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn central_lattice_parity() {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    for ctx in contexts() {
        for _ in 0..20 {
            let v = random_vector(&ctx, &mut rng, -1..=6);
            let ord = v.qform().ord().unwrap();
            let expected = if ord % 2 == 0 { VType::Zero } else { VType::Two };
            assert_eq!(central_lattice(&v).unwrap().vtype(), expected);
        }
    }
}

#[test]
fn cycle_json_shape() {
    let ctx = &contexts()[1];
    let b = cyclelift::padic::VectorC::from_ints(ctx, (0, 5), (5, 0), 0).unwrap();
    let z = unitary_cycle(&SpecialHom::new(Sign::Minus, b).unwrap()).unwrap();
    let v = z.to_json().unwrap();
    assert_eq!(v["horizontal"][0]["vertex"], ".");
    assert_eq!(v["horizontal"][0]["count"], 1);
    let vertical = v["vertical"].as_array().unwrap();
    assert_eq!(vertical.len(), 7);
    assert_eq!(vertical[0]["vertex"], ".");
    assert!(vertical.iter().all(|e| e["mult"] == 1));
}

proptest! {
    #[test]
    fn support_stays_in_the_ball(x0 in -30i64..30, y0 in -30i64..30, x1 in -30i64..30, y1 in -30i64..30, k in 0i32..3) {
        let ctx = &contexts()[0];
        let b = cyclelift::padic::VectorC::from_ints(ctx, (x0, y0), (x1, y1), 0).unwrap();
        prop_assume!(!b.is_zero() && b.qform().ord().is_ok());
        let h = SpecialHom::new(Sign::Minus, b.mul_p_pow(k));
        prop_assume!(h.is_ok());
        let h = h.unwrap();
        let z = unitary_cycle(&h).unwrap();
        for (l, m) in &z.vertical {
            prop_assert!(*m >= 1);
            prop_assert!(distance_fast(l, h.central()) as i32 <= h.ord_qpm());
        }
    }
}
