//! Local unitary and orthogonal special cycles as divisors on the tree.
//!
//! Cycles only depend on valuations and on the line through the vector, so
//! units of `Z_p` are dropped throughout.

use std::collections::BTreeMap;
use std::fmt;

use serde_json::{json, Value};

use crate::bttree::{
    ball, central_exponent, central_lattice, distance_fast, format_path_word, path_word, VType,
    VertexLattice,
};
use crate::error::{Error, Result};
use crate::padic::{QuadLocalElem, VectorC};

/// Which of the two spaces of special homomorphisms a vector comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "plus",
            Sign::Minus => "minus",
        })
    }
}

impl std::str::FromStr for Sign {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plus" | "+" => Ok(Sign::Plus),
            "minus" | "-" => Ok(Sign::Minus),
            _ => Err(Error::invalid(format!("unknown sign {s:?}"))),
        }
    }
}

/// A special homomorphism, identified with its image vector in `C`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpecialHom {
    sign: Sign,
    vec: VectorC,
    ord_qpm: i32,
    central: VertexLattice,
}

impl SpecialHom {
    /// `ord q^± = ord q(vec) + 1` for plus and `ord q(vec)` for minus; it must
    /// be nonnegative.
    pub fn new(sign: Sign, vec: VectorC) -> Result<Self> {
        let ord = vec.qform().ord()?;
        let ord_qpm = match sign {
            Sign::Plus => ord + 1,
            Sign::Minus => ord,
        };
        if ord_qpm < 0 {
            return Err(Error::invalid(format!(
                "ord q^{sign} = {ord_qpm} is negative"
            )));
        }
        Ok(SpecialHom {
            sign,
            vec,
            ord_qpm,
            central: central_lattice(&vec)?,
        })
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn vec(&self) -> &VectorC {
        &self.vec
    }

    pub fn ord_qpm(&self) -> i32 {
        self.ord_qpm
    }

    pub fn central(&self) -> &VertexLattice {
        &self.central
    }
}

/// `m(b, Λ)`: 0 if `b ∉ Λ`, else `t - ⌊d/2⌋` for `ord q^± = 2t` and
/// `t - ⌊(d+1)/2⌋` for `ord q^± = 2t - 1`, with `d = d(Λ, Λ_⊙)`.
pub fn multiplicity(h: &SpecialHom, lattice: &VertexLattice) -> Result<u32> {
    if lattice.r_invariant(&h.vec)? < 0 {
        return Ok(0);
    }
    let d = distance_fast(lattice, &h.central) as i32;
    let t = (h.ord_qpm + 1).div_euclid(2);
    let m = if h.ord_qpm % 2 == 0 {
        t - d.div_euclid(2)
    } else {
        t - (d + 1).div_euclid(2)
    };
    Ok(m.max(0) as u32)
}

/// A horizontal component, recorded by the vertex whose line it meets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Horizontal {
    pub central: VertexLattice,
    pub count: u32,
}

/// Vertical multiplicities plus horizontal descriptors.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LocalCycle {
    pub vertical: BTreeMap<VertexLattice, u32>,
    pub horizontal: Vec<Horizontal>,
}

impl LocalCycle {
    /// Multiplicity of `P_Λ` (zero off the support).
    pub fn mult(&self, lattice: &VertexLattice) -> u32 {
        self.vertical.get(lattice).copied().unwrap_or(0)
    }

    pub fn horizontal_count(&self) -> u32 {
        self.horizontal.iter().map(|h| h.count).sum()
    }

    /// Sum of two cycles.
    pub fn add(&self, other: &LocalCycle) -> LocalCycle {
        let mut vertical = self.vertical.clone();
        for (v, m) in &other.vertical {
            *vertical.entry(*v).or_insert(0) += m;
        }
        let mut horizontal = self.horizontal.clone();
        for h in &other.horizontal {
            match horizontal.iter_mut().find(|x| x.central == h.central) {
                Some(x) => x.count += h.count,
                None => horizontal.push(*h),
            }
        }
        LocalCycle { vertical, horizontal }
    }

    /// `{"horizontal": [{"vertex", "count"}], "vertical": [{"vertex", "mult"}]}`
    /// with vertices labelled by path words from `Λ0`.
    pub fn to_json(&self) -> Result<Value> {
        let mut vertical = Vec::with_capacity(self.vertical.len());
        for (v, m) in &self.vertical {
            vertical.push((path_word(v)?, *m));
        }
        vertical.sort();
        let mut horizontal = Vec::with_capacity(self.horizontal.len());
        for h in &self.horizontal {
            horizontal.push((path_word(&h.central)?, h.count));
        }
        horizontal.sort();
        Ok(json!({
            "horizontal": horizontal
                .iter()
                .map(|(w, c)| json!({"count": c, "vertex": format_path_word(w)}))
                .collect::<Vec<_>>(),
            "vertical": vertical
                .iter()
                .map(|(w, m)| json!({"mult": m, "vertex": format_path_word(w)}))
                .collect::<Vec<_>>(),
        }))
    }
}

/// `Z(b) = Z(b)^{hor} + Σ m(b, Λ) P_Λ`.
pub fn unitary_cycle(h: &SpecialHom) -> Result<LocalCycle> {
    let mut vertical = BTreeMap::new();
    for (lattice, _) in ball(&h.central, h.ord_qpm as u32)? {
        let m = multiplicity(h, &lattice)?;
        if m > 0 {
            vertical.insert(lattice, m);
        }
    }
    Ok(LocalCycle {
        vertical,
        horizontal: vec![Horizontal { central: h.central, count: 1 }],
    })
}

/// A traceless endomorphism `j` with `j² = u² p^{2α} δ²`, stored through an
/// eigenvector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrthEndo {
    alpha: u32,
    eigvec: VectorC,
    nu_p: u64,
}

impl OrthEndo {
    /// Rescales `eigvec` so that `ord q ∈ {0, -1}`; `ν_p = 1` for odd and
    /// `ν_p = p` for even norm valuation.
    pub fn new(alpha: u32, eigvec: VectorC) -> Result<Self> {
        let t = central_exponent(&eigvec)?;
        let eigvec = eigvec.mul_p_pow(-t);
        let ord = eigvec.qform().ord()?;
        let nu_p = if ord == -1 { 1 } else { eigvec.ctx().p() };
        Ok(OrthEndo { alpha, eigvec, nu_p })
    }

    pub fn alpha(&self) -> u32 {
        self.alpha
    }

    pub fn eigvec(&self) -> &VectorC {
        &self.eigvec
    }

    pub fn nu_p(&self) -> u64 {
        self.nu_p
    }

    pub fn central(&self) -> Result<VertexLattice> {
        central_lattice(&self.eigvec)
    }
}

/// `Z°(j) = Z°(j)^{hor} + Σ max(α - d(Λ, Λ_⊙), 0) P_Λ`, with two horizontal
/// components through the central lattice.
pub fn orthogonal_cycle(j: &OrthEndo) -> Result<LocalCycle> {
    let central = j.central()?;
    let mut vertical = BTreeMap::new();
    for (lattice, d) in ball(&central, j.alpha)? {
        if j.alpha > d {
            vertical.insert(lattice, j.alpha - d);
        }
    }
    Ok(LocalCycle {
        vertical,
        horizontal: vec![Horizontal { central, count: 2 }],
    })
}

/// The pair of special homomorphisms with `Z°(j) = Z(b⁺) + Z(b⁻)` (first
/// entry plus, second minus); for `α = 0` both share a sign and the vectors
/// are `b0` and `ε(b0)`.
pub fn split_pair(j: &OrthEndo) -> Result<(SpecialHom, SpecialHom)> {
    let b0 = j.eigvec;
    let nu = if j.nu_p == 1 { 0 } else { 1 };
    let a = j.alpha as i32;
    if a == 0 {
        let sign = if nu == 0 { Sign::Plus } else { Sign::Minus };
        return Ok((SpecialHom::new(sign, b0)?, SpecialHom::new(sign, b0.epsilon())?));
    }
    let (plus, minus) = if a % 2 == 0 {
        (b0.mul_p_pow(a / 2 - nu), b0.mul_p_pow(a / 2))
    } else {
        (b0.mul_p_pow((a - 1) / 2), b0.mul_p_pow((a + 1) / 2 - nu))
    };
    Ok((SpecialHom::new(Sign::Plus, plus)?, SpecialHom::new(Sign::Minus, minus)?))
}

/// `Z(b)(F) ∩ P_Λ(F)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FiberPoints {
    Empty,
    SinglePoint { superspecial: bool },
    FullLine,
}

pub fn fiber_points(h: &SpecialHom, lattice: &VertexLattice) -> Result<FiberPoints> {
    let r = lattice.r_invariant(&h.vec)?;
    let single = FiberPoints::SinglePoint { superspecial: h.ord_qpm > 0 };
    Ok(match (r, h.sign, lattice.vtype()) {
        (r, _, _) if r < 0 => FiberPoints::Empty,
        (r, _, _) if r >= 1 => FiberPoints::FullLine,
        (_, Sign::Minus, VType::Zero) => single,
        (_, Sign::Minus, VType::Two) => FiberPoints::Empty,
        (_, Sign::Plus, VType::Zero) => FiberPoints::FullLine,
        (_, Sign::Plus, VType::Two) => single,
    })
}

/// Local equation of `Z(b)` on the ordinary locus of `P_Λ`:
/// `p^{p_exp} (c0 T + c1)` on type 0 lattices and `p^{p_exp} (c0 + c1 T)` on
/// type 2 lattices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrdinaryEquation {
    pub p_exp: u32,
    pub c0: QuadLocalElem,
    pub c1: QuadLocalElem,
    pub vtype: VType,
}

impl OrdinaryEquation {
    /// Whether the linear factor vanishes at an ordinary point, i.e. its root
    /// in `P^1(F_{p²})` is not `F_p`-rational.
    pub fn has_ordinary_zero(&self) -> bool {
        let w = self.c0 * self.c1.conj();
        let (_, y) = w.residue();
        y != 0
    }
}

/// Coordinates of `vec` in the hyperbolic basis of `lattice`, divided by
/// `p^r`, together with `r`.
pub fn primitive_coordinates(
    vec: &VectorC,
    lattice: &VertexLattice,
) -> Result<(i32, QuadLocalElem, QuadLocalElem)> {
    let r = lattice.r_invariant(vec)?;
    let f = *lattice.form();
    let c = lattice.ctx().elem(f.cx as i64, f.cy as i64);
    let z = vec.a0().mul_p_pow(f.b) - c * vec.a1();
    let shift = |x: QuadLocalElem, k: i32| {
        if k >= 0 {
            Ok(x.mul_p_pow(k as u32))
        } else {
            x.div_p_pow((-k) as u32)
        }
    };
    let base = f.e - vec.denom_exp() - r;
    let alpha0 = shift(z, base - f.a as i32 - f.b as i32)?;
    let alpha1 = shift(vec.a1(), base - f.b as i32)?;
    Ok((r, alpha0, alpha1))
}

pub fn ordinary_equation(h: &SpecialHom, lattice: &VertexLattice) -> Result<OrdinaryEquation> {
    let (r, a0, a1) = primitive_coordinates(&h.vec, lattice)?;
    if r < 0 {
        return Err(Error::EmptyIntersection);
    }
    let r = r as u32;
    let (p_exp, c0, c1) = match (lattice.vtype(), h.sign) {
        (VType::Zero, Sign::Minus) => (r, a0, a1),
        (VType::Zero, Sign::Plus) => (r + 1, a0.conj(), a1.conj()),
        (VType::Two, Sign::Plus) => (r, a0, a1),
        (VType::Two, Sign::Minus) => (r, a0.conj(), a1.conj()),
    };
    Ok(OrdinaryEquation { p_exp, c0, c1, vtype: lattice.vtype() })
}

/// Exponents `(e_{T0}, e_{T1})` of the equation `T0^{e_{T0}} T1^{e_{T1}} = 0`
/// at the superspecial point where `P_{L0}` and `P_{L2}` meet.
pub fn superspecial_exponents(
    h: &SpecialHom,
    l0: &VertexLattice,
    l2: &VertexLattice,
) -> Result<(u32, u32)> {
    if l0.vtype() != VType::Zero || l2.vtype() != VType::Two || distance_fast(l0, l2) != 1 {
        return Err(Error::NotAdjacent);
    }
    let r = l0.r_invariant(&h.vec)?;
    let r2 = l2.r_invariant(&h.vec)?;
    if r < 0 {
        return Ok((0, 0));
    }
    Ok(match h.sign {
        Sign::Minus => (r2 as u32, r as u32),
        Sign::Plus => (r2 as u32, r as u32 + 1),
    })
}
