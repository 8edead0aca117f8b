//! Vertex lattices in `C` and the Bruhat-Tits tree they form.
//!
//! Every lattice is stored through its canonical column form
//! `p^{-e} · span{(p^a, 0), (c, p^b)}` with `c` reduced modulo `p^a` and
//! `min(a, b, v(c)) = 0`, so equality and hashing are exact.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::hash::{Hash, Hasher};

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::padic::{herm, LocalContext, QuadLocalElem, Valuation, VectorC};

/// Default cap for [`distance`].
pub const DEFAULT_SEARCH_CAP: u32 = 40;

/// Canonical form `p^{-e} · span{(p^a, 0), (c, p^b)}`, `c = cx + cy δ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalForm {
    pub e: i32,
    pub a: u32,
    pub b: u32,
    pub cx: u64,
    pub cy: u64,
}

/// An `o_{k,p}`-lattice of rank two in `C`.
#[derive(Clone, Copy)]
pub struct Lattice {
    ctx: LocalContext,
    form: CanonicalForm,
}

impl PartialEq for Lattice {
    fn eq(&self, other: &Self) -> bool {
        self.form == other.form
    }
}

impl Eq for Lattice {}

impl Hash for Lattice {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.form.hash(state);
    }
}

impl fmt::Debug for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let CanonicalForm { e, a, b, cx, cy } = self.form;
        write!(f, "p^{}<(p^{a},0),({cx}+{cy}d,p^{b})>", -e)
    }
}

/// Which of the two exact valuations (or bounds) is smaller; `None` if it
/// cannot be decided.
fn pick_smaller(u: Valuation, w: Valuation) -> Option<bool> {
    match (u, w) {
        (Valuation::Exact(x), Valuation::Exact(y)) => Some(x < y),
        (Valuation::Exact(x), Valuation::AtLeast(y)) if x <= y => Some(true),
        (Valuation::AtLeast(x), Valuation::Exact(y)) if y <= x => Some(false),
        _ => None,
    }
}

impl Lattice {
    /// The lattice spanned by two vectors, in canonical form.
    pub fn from_basis(u: &VectorC, w: &VectorC) -> Result<Self> {
        let ctx = *u.ctx();
        if u.is_zero() || w.is_zero() {
            return Err(Error::DegenerateVector);
        }
        let exhausted = |needed: u32| Error::PrecisionExhausted {
            needed: needed.max(ctx.precision() + 1),
            available: ctx.precision(),
        };
        let big_e = u.denom_exp().max(w.denom_exp());
        let (mut u0, mut u1) = u.coords_at(big_e);
        let (mut w0, mut w1) = w.coords_at(big_e);

        // Second row: the entry of least valuation becomes the pivot p^b.
        let u_smaller =
            pick_smaller(u1.valuation(), w1.valuation()).ok_or_else(|| exhausted(0))?;
        if u_smaller {
            std::mem::swap(&mut u0, &mut w0);
            std::mem::swap(&mut u1, &mut w1);
        }
        let b = w1.val()?;
        let unit_w = w1.div_p_pow(b)?.inv()?;
        w0 = w0 * unit_w;
        let t = u1.div_p_pow(b)?;
        u0 = u0 - t * w0;

        // First row of the other column: p^a after a unit rescaling.
        let a = u0.val().map_err(|_| exhausted(0))?;
        if w0.precision() < a {
            return Err(exhausted(a + 1));
        }
        let modulus = ctx.p().pow(a);
        let (cx, cy) = w0.coords();
        let (mut cx, mut cy) = (cx % modulus, cy % modulus);
        let vc = if cx == 0 && cy == 0 {
            a
        } else {
            ctx.elem(cx as i64, cy as i64).val()?.min(a)
        };
        let k = a.min(b).min(vc);
        let pk = ctx.p().pow(k);
        cx /= pk;
        cy /= pk;
        let form = CanonicalForm {
            e: big_e - k as i32,
            a: a - k,
            b: b - k,
            cx,
            cy,
        };
        if ctx.precision() < form.a.max(form.b) + 4 {
            return Err(exhausted(form.a.max(form.b) + 4));
        }
        Ok(Lattice { ctx, form })
    }

    pub fn from_form(ctx: &LocalContext, form: CanonicalForm) -> Self {
        Lattice { ctx: *ctx, form }
    }

    pub fn ctx(&self) -> &LocalContext {
        &self.ctx
    }

    pub fn form(&self) -> &CanonicalForm {
        &self.form
    }

    fn c(&self) -> QuadLocalElem {
        self.ctx.elem(self.form.cx as i64, self.form.cy as i64)
    }

    /// The canonical basis `p^{-e}(p^a, 0)`, `p^{-e}(c, p^b)`.
    pub fn basis(&self) -> (VectorC, VectorC) {
        let CanonicalForm { e, a, b, .. } = self.form;
        let pa = self.ctx.int(1).mul_p_pow(a);
        let pb = self.ctx.int(1).mul_p_pow(b);
        let u = VectorC::new(pa, self.ctx.zero(), e).expect("canonical basis");
        let w = VectorC::new(self.c(), pb, e).expect("canonical basis");
        (u, w)
    }

    /// `p^k · L`.
    pub fn scale_p(&self, k: i32) -> Self {
        let mut form = self.form;
        form.e -= k;
        Lattice { ctx: self.ctx, form }
    }

    /// `L^♯ = {v : h(v, L) ⊂ o_{k,p}}`.
    ///
    /// For the canonical basis the Gram matrix is triangular and the dual is
    /// `p^{e-a-b} · span{(p^a, 0), (c', p^b)}`.
    pub fn dual(&self) -> Self {
        let CanonicalForm { e, a, b, cx, cy } = self.form;
        let m = self.ctx.p().pow(a);
        let form = CanonicalForm {
            e: a as i32 + b as i32 - e,
            a,
            b,
            cx,
            cy: (m - cy) % m,
        };
        Lattice { ctx: self.ctx, form }
    }

    /// Largest `r` with `p^{-r} b ∈ L`.
    pub fn r_invariant(&self, vec: &VectorC) -> Result<i32> {
        if vec.is_zero() {
            return Err(Error::invalid("r-invariant of the zero vector"));
        }
        let CanonicalForm { e, a, b, .. } = self.form;
        let (w0, w1) = (vec.a0(), vec.a1());
        let z = w0.mul_p_pow(b) - self.c() * w1;
        // p^s w ∈ span{(p^a,0),(c,p^b)} iff s ≥ b - v(w1) and s ≥ a + b - v(z).
        let bound = |k: i32, v: Valuation| match v {
            Valuation::Exact(v) => (k - v as i32, true),
            Valuation::AtLeast(v) => (k - v as i32, false),
        };
        let t1 = bound(b as i32, w1.valuation());
        let t2 = bound(a as i32 + b as i32, z.valuation());
        let s_min = match (t1, t2) {
            ((x, true), (y, true)) => x.max(y),
            ((x, true), (y, false)) if x >= y => x,
            ((x, false), (y, true)) if y >= x => y,
            _ => {
                return Err(Error::PrecisionExhausted {
                    needed: self.ctx.precision() + 1,
                    available: self.ctx.precision(),
                })
            }
        };
        Ok(e - vec.denom_exp() - s_min)
    }

    pub fn contains(&self, vec: &VectorC) -> Result<bool> {
        if vec.is_zero() {
            return Ok(true);
        }
        Ok(self.r_invariant(vec)? >= 0)
    }

    /// Whether the lattice is `ε`-stable, i.e. spanned by `ε`-fixed vectors.
    pub fn is_epsilon_stable(&self) -> bool {
        self.form.cy == 0
    }
}

/// Type of a vertex lattice: `Λ^♯ = Λ` or `Λ^♯ = pΛ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VType {
    Zero,
    Two,
}

impl VType {
    pub fn as_u8(self) -> u8 {
        match self {
            VType::Zero => 0,
            VType::Two => 2,
        }
    }

    pub fn other(self) -> Self {
        match self {
            VType::Zero => VType::Two,
            VType::Two => VType::Zero,
        }
    }
}

impl fmt::Display for VType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_u8())
    }
}

/// A vertex of the Bruhat-Tits tree.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct VertexLattice {
    lattice: Lattice,
    vtype: VType,
}

impl fmt::Debug for VertexLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "V{}{:?}", self.vtype, self.lattice)
    }
}

impl PartialOrd for VertexLattice {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for VertexLattice {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.lattice.form.cmp(&other.lattice.form)
    }
}

impl VertexLattice {
    /// Classify `L`; fails unless `L^♯ = L` or `L^♯ = pL`.
    pub fn new(lattice: Lattice) -> Result<Self> {
        let dual = lattice.dual();
        let vtype = if dual == lattice {
            VType::Zero
        } else if dual == lattice.scale_p(1) {
            VType::Two
        } else {
            return Err(Error::invalid(format!("{lattice:?} is not a vertex lattice")));
        };
        Ok(VertexLattice { lattice, vtype })
    }

    pub fn from_basis(u: &VectorC, w: &VectorC) -> Result<Self> {
        Self::new(Lattice::from_basis(u, w)?)
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn form(&self) -> &CanonicalForm {
        &self.lattice.form
    }

    pub fn ctx(&self) -> &LocalContext {
        &self.lattice.ctx
    }

    pub fn vtype(&self) -> VType {
        self.vtype
    }

    pub fn dual(&self) -> Lattice {
        self.lattice.dual()
    }

    pub fn r_invariant(&self, vec: &VectorC) -> Result<i32> {
        self.lattice.r_invariant(vec)
    }

    pub fn contains(&self, vec: &VectorC) -> Result<bool> {
        self.lattice.contains(vec)
    }

    /// Isotropic basis `(w0, w1)` with `h(w0, w1) = δ` (type 0) or `p^{-1}δ`
    /// (type 2).
    ///
    /// Vertex lattices are spanned by `ε`-fixed vectors, which are all
    /// isotropic, so the canonical basis already has this shape.
    pub fn hyperbolic_basis(&self) -> (VectorC, VectorC) {
        self.lattice.basis()
    }

    /// The `p + 1` neighbours: index 0 is the one through `p^{-1} w0`
    /// (type 0) or `p w1` (type 2), index `1 + α` the one through `α w0 + w1`.
    pub fn neighbors(&self) -> Result<Vec<VertexLattice>> {
        let (w0, w1) = self.hyperbolic_basis();
        let ctx = *self.ctx();
        let p = ctx.p();
        let mut out = Vec::with_capacity(p as usize + 1);
        match self.vtype {
            VType::Zero => {
                out.push(Self::from_basis(&w0.mul_p_pow(-1), &w1)?);
                for alpha in 0..p {
                    let v = w0.scale(ctx.int(alpha as i64))?.add(&w1)?.mul_p_pow(-1);
                    out.push(Self::from_basis(&w0, &v)?);
                }
            }
            VType::Two => {
                out.push(Self::from_basis(&w0, &w1.mul_p_pow(1))?);
                for alpha in 0..p {
                    let v = w0.scale(ctx.int(alpha as i64))?.add(&w1)?;
                    out.push(Self::from_basis(&w0.mul_p_pow(1), &v)?);
                }
            }
        }
        debug_assert!(out.iter().all(|m| m.vtype == self.vtype.other()));
        Ok(out)
    }
}

/// `Λ0 = span{v0, v1}` (type 0) and `Λ0' = span{p^{-1} v0, v1}` (type 2).
pub fn standard_lattices(ctx: &LocalContext) -> (VertexLattice, VertexLattice) {
    let v0 = VectorC::v0(ctx);
    let v1 = VectorC::v1(ctx);
    let l0 = VertexLattice::from_basis(&v0, &v1).expect("standard lattice");
    let l2 = VertexLattice::from_basis(&v0.mul_p_pow(-1), &v1).expect("standard lattice");
    (l0, l2)
}

/// The central lattice of an anisotropic vector: rescale `b` so that
/// `ord q(b) ∈ {0, -1}` and take `span{b, ε(b)}`.
pub fn central_lattice(vec: &VectorC) -> Result<VertexLattice> {
    let ord = vec.qform().ord()?;
    let t = (ord + 1).div_euclid(2);
    let scaled = vec.mul_p_pow(-t);
    let (re, im) = scaled.real_imag()?;
    let lat = VertexLattice::from_basis(&re, &im)?;
    debug_assert_eq!(lat.vtype == VType::Zero, ord % 2 == 0);
    Ok(lat)
}

/// `ceil(ord q(b) / 2)`: the power of `p` dividing `b` at its central lattice.
pub fn central_exponent(vec: &VectorC) -> Result<i32> {
    Ok((vec.qform().ord()? + 1).div_euclid(2))
}

/// Tree distance by breadth-first search from `l`, giving up beyond `cap`.
pub fn distance_capped(l: &VertexLattice, m: &VertexLattice, cap: u32) -> Result<u32> {
    if l == m {
        return Ok(0);
    }
    let mut seen = HashSet::from([*l.form()]);
    let mut frontier = vec![*l];
    for d in 1..=cap {
        let mut next = Vec::new();
        for v in &frontier {
            for n in v.neighbors()? {
                if n == *m {
                    return Ok(d);
                }
                if seen.insert(*n.form()) {
                    next.push(n);
                }
            }
        }
        frontier = next;
    }
    Err(Error::SearchRadiusExceeded { cap })
}

/// Tree distance by breadth-first search with the default cap.
pub fn distance(l: &VertexLattice, m: &VertexLattice) -> Result<u32> {
    distance_capped(l, m, DEFAULT_SEARCH_CAP)
}

/// Tree distance from the elementary divisors of `L^{-1} M`:
/// `d = v(det X) - 2 min v(X_ij)`.
pub fn distance_fast(l: &VertexLattice, m: &VertexLattice) -> u32 {
    let (f, g) = (l.form(), m.form());
    let p = l.ctx().p();
    let x00 = g.a as i64 - f.a as i64;
    let x11 = g.b as i64 - f.b as i64;
    // X_01 = p^{-a} (c' - c p^{b'-b}), up to the common scalar p^{e-e'}.
    let k = x11;
    let (c, c2) = (BigInt::from(f.cx), BigInt::from(g.cx));
    let pb = |n: i64| BigInt::from(p).pow(n as u32);
    let (num, shift) = if k >= 0 {
        (c2 - c * pb(k), 0)
    } else {
        (c2 * pb(-k) - c, k)
    };
    let mut min = x00.min(x11);
    if !num.is_zero() {
        let mut v = 0i64;
        let mut n = num;
        let pp = BigInt::from(p);
        while (&n % &pp).is_zero() {
            n /= &pp;
            v += 1;
        }
        min = min.min(v + shift - f.a as i64);
    }
    (x00 + x11 - 2 * min) as u32
}

/// All vertices within `radius` of `center`, with their distances, in
/// breadth-first order.
pub fn ball(center: &VertexLattice, radius: u32) -> Result<Vec<(VertexLattice, u32)>> {
    let mut seen = HashSet::from([*center.form()]);
    let mut out = vec![(*center, 0)];
    let mut queue = VecDeque::from([(*center, 0u32)]);
    while let Some((v, d)) = queue.pop_front() {
        if d == radius {
            continue;
        }
        for n in v.neighbors()? {
            if seen.insert(*n.form()) {
                out.push((n, d + 1));
                queue.push_back((n, d + 1));
            }
        }
    }
    Ok(out)
}

/// Neighbour indices along the geodesic from `Λ0` to `target`.
pub fn path_word(target: &VertexLattice) -> Result<Vec<u32>> {
    let (mut cur, _) = standard_lattices(target.ctx());
    let mut d = distance_fast(&cur, target);
    let mut word = Vec::with_capacity(d as usize);
    while d > 0 {
        let (i, next) = cur
            .neighbors()?
            .into_iter()
            .enumerate()
            .find(|(_, n)| distance_fast(n, target) == d - 1)
            .expect("a tree has a neighbour one step closer");
        word.push(i as u32);
        cur = next;
        d -= 1;
    }
    Ok(word)
}

/// Render a path word as dot-separated indices; the root is `"."`.
pub fn format_path_word(word: &[u32]) -> String {
    if word.is_empty() {
        return ".".to_string();
    }
    word.iter().map(u32::to_string).collect::<Vec<_>>().join(".")
}

/// `h(w0, w1)` for the hyperbolic basis, as a check on the type.
pub fn hyperbolic_pairing(l: &VertexLattice) -> (QuadLocalElem, i32) {
    let (w0, w1) = l.hyperbolic_basis();
    let s = herm(&w0, &w1);
    (s.value, s.exp)
}
