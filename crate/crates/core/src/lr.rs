//! Littlewood–Richardson products in the determinant-one Schur basis.
//!
//! S_κ · S_κ' = Σ_ξ d^ξ_{κκ'} S_ξ. The coefficients are obtained by counting
//! LR skew tableaux on shapes with at most n rows and then removing full
//! columns, so every d^ξ is an exact integer.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::schur::{dimension, dimension_bound, eval_schur, EvalPoint};
use crate::weights::{Partition, WeightVector};

/// Cap on |κ| + |κ'| for a single product.
pub const PRODUCT_GUARD: u32 = 20;

/// A class function Σ_ξ c_ξ S_ξ with positive integer coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchurExpansion {
    n: usize,
    terms: BTreeMap<WeightVector, BigUint>,
}

impl SchurExpansion {
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            terms: BTreeMap::new(),
        }
    }

    /// The constant function 1 = S_0.
    pub fn unit(n: usize) -> Result<Self> {
        let mut e = Self::empty(n);
        e.add_term(WeightVector::zero(n)?, BigUint::one())?;
        Ok(e)
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn add_term(&mut self, xi: WeightVector, coeff: BigUint) -> Result<()> {
        xi.ensure_rank(self.n)?;
        if !coeff.is_zero() {
            *self.terms.entry(xi).or_default() += coeff;
        }
        Ok(())
    }

    fn add_scaled(&mut self, other: &SchurExpansion, factor: &BigUint) {
        for (xi, c) in &other.terms {
            *self.terms.entry(xi.clone()).or_default() += c * factor;
        }
    }

    pub fn coefficient(&self, xi: &WeightVector) -> BigUint {
        self.terms.get(xi).cloned().unwrap_or_default()
    }

    /// Coefficient of S_0.
    pub fn constant(&self) -> BigUint {
        self.terms
            .iter()
            .find(|(xi, _)| xi.is_zero())
            .map(|(_, c)| c.clone())
            .unwrap_or_default()
    }

    pub fn without_constant(&self) -> SchurExpansion {
        Self {
            n: self.n,
            terms: self
                .terms
                .iter()
                .filter(|(xi, _)| !xi.is_zero())
                .map(|(xi, c)| (xi.clone(), c.clone()))
                .collect(),
        }
    }

    /// Terms in lexicographic order of ξ.
    pub fn iter(&self) -> impl Iterator<Item = (&WeightVector, &BigUint)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Σ c_ξ S_ξ(x).
    pub fn evaluate(&self, x: &EvalPoint) -> Result<Complex64> {
        let mut acc = Complex64::zero();
        for (xi, c) in &self.terms {
            acc += eval_schur(xi, x)? * c.to_f64().unwrap_or(f64::INFINITY);
        }
        Ok(acc)
    }

    /// Σ c_ξ · dim(ξ), i.e. the expansion evaluated at the identity.
    pub fn dimension_sum(&self) -> BigUint {
        self.terms.iter().map(|(xi, c)| c * dimension(xi)).sum()
    }

    pub fn sum_of_squares(&self) -> BigUint {
        self.terms.values().map(|c| c * c).sum()
    }

    /// Multiplies by S_κ.
    fn times(&self, kappa: &WeightVector) -> SchurExpansion {
        let mut out = SchurExpansion::empty(self.n);
        for (xi, c) in &self.terms {
            out.add_scaled(&lr_product_unchecked(xi, kappa), c);
        }
        out
    }
}

/// Coefficients serialise as JSON integers when they fit in 64 bits and as
/// decimal strings otherwise.
fn coeff_json(c: &BigUint) -> serde_json::Value {
    match c.to_u64() {
        Some(v) => serde_json::Value::from(v),
        None => serde_json::Value::from(c.to_string()),
    }
}

impl Serialize for SchurExpansion {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Term<'a> {
            xi: &'a WeightVector,
            coeff: serde_json::Value,
        }
        let terms: Vec<Term<'_>> = self
            .terms
            .iter()
            .map(|(xi, c)| Term {
                xi,
                coeff: coeff_json(c),
            })
            .collect();
        let mut st = s.serialize_struct("SchurExpansion", 2)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("terms", &terms)?;
        st.end()
    }
}

fn check_pair(kappa: &WeightVector, kappa2: &WeightVector) -> Result<()> {
    kappa2.ensure_rank(kappa.rank())
}

/// d^ξ_{κκ'} for all ξ.
pub fn lr_product(kappa: &WeightVector, kappa2: &WeightVector) -> Result<SchurExpansion> {
    check_pair(kappa, kappa2)?;
    let size = kappa.abs() + kappa2.abs();
    if size > PRODUCT_GUARD {
        return Err(Error::GuardExceeded(format!(
            "LR product needs |kappa| + |kappa2| <= {PRODUCT_GUARD}, got {size}"
        )));
    }
    Ok(lr_product_unchecked(kappa, kappa2))
}

pub(crate) fn lr_product_unchecked(kappa: &WeightVector, kappa2: &WeightVector) -> SchurExpansion {
    let n = kappa.rank();
    let (a, b) = (kappa.to_partition(), kappa2.to_partition());
    // Fill the smaller shape as content; the product is commutative.
    let (outer_base, content) = if (a.size(), a.parts()) >= (b.size(), b.parts()) {
        (a, b)
    } else {
        (b, a)
    };
    let mut shapes = HashMap::new();
    lr_tableaux(outer_base.parts(), content.parts(), None, &mut shapes);
    let mut out = SchurExpansion::empty(n);
    for (nu, count) in shapes {
        let (reduced, _) = Partition::new(nu).expect("LR shapes are partitions").reduce();
        let xi = WeightVector::from_partition(&reduced).expect("rank already validated");
        out.add_term(xi, BigUint::from(count)).expect("same rank");
    }
    out
}

/// The single coefficient d^ξ_{κκ'}; zero unless ‖ξ‖ ≡ ‖κ‖ + ‖κ'‖ (mod n)
/// and ‖ξ‖ ≤ ‖κ‖ + ‖κ'‖.
pub fn lr_coefficient(kappa: &WeightVector, kappa2: &WeightVector, xi: &WeightVector) -> Result<u64> {
    check_pair(kappa, kappa2)?;
    xi.ensure_rank(kappa.rank())?;
    let n = kappa.rank() as u32;
    let total = kappa.wnorm() + kappa2.wnorm();
    if xi.wnorm() > total || !(total - xi.wnorm()).is_multiple_of(n) {
        return Ok(0);
    }
    let cols = (total - xi.wnorm()) / n;
    let outer: Vec<u32> = xi.to_partition().parts().iter().map(|&p| p + cols).collect();
    let (a, b) = (kappa.to_partition(), kappa2.to_partition());
    let (inner, content) = if a.size() >= b.size() { (a, b) } else { (b, a) };
    if inner.parts().iter().zip(&outer).any(|(i, o)| i > o) {
        return Ok(0);
    }
    let mut shapes = HashMap::new();
    lr_tableaux(inner.parts(), content.parts(), Some(&outer), &mut shapes);
    Ok(shapes.get(&outer).copied().unwrap_or(0))
}

/// Counts LR tableaux of shape ν/λ with content μ, for every ν with at most
/// `λ.len()` rows (or only inside `cap`). Letters are placed one horizontal
/// strip at a time; the reverse reading word is a lattice word iff, for every
/// row r, #(i+1 in rows ≤ r) ≤ #(i in rows < r).
fn lr_tableaux(lambda: &[u32], mu: &[u32], cap: Option<&[u32]>, out: &mut HashMap<Vec<u32>, u64>) {
    let rows = lambda.len();
    let letters: Vec<u32> = mu.iter().copied().take_while(|&m| m > 0).collect();

    struct Ctx<'a> {
        letters: &'a [u32],
        cap: Option<&'a [u32]>,
        rows: usize,
    }

    fn place_letter(
        ctx: &Ctx<'_>,
        letter: usize,
        shape: &mut Vec<u32>,
        prev: &[u32],
        out: &mut HashMap<Vec<u32>, u64>,
    ) {
        if letter == ctx.letters.len() {
            if ctx.cap.is_none_or(|c| c == shape.as_slice()) {
                *out.entry(shape.clone()).or_insert(0) += 1;
            }
            return;
        }
        let old = shape.clone();
        let mut counts = vec![0u32; ctx.rows];
        strip(ctx, letter, 0, ctx.letters[letter], 0, 0, &old, prev, shape, &mut counts, out);
    }

    #[allow(clippy::too_many_arguments)]
    fn strip(
        ctx: &Ctx<'_>,
        letter: usize,
        row: usize,
        remaining: u32,
        placed_through: u32,
        prev_above: u32,
        old: &[u32],
        prev: &[u32],
        shape: &mut Vec<u32>,
        counts: &mut Vec<u32>,
        out: &mut HashMap<Vec<u32>, u64>,
    ) {
        if remaining == 0 {
            place_letter(ctx, letter + 1, shape, counts, out);
            return;
        }
        if row == ctx.rows {
            return;
        }
        let mut max = remaining;
        if row > 0 {
            max = max.min(old[row - 1] - old[row]);
        }
        if let Some(cap) = ctx.cap {
            max = max.min(cap[row].saturating_sub(old[row]));
        }
        if letter > 0 {
            // lattice: placed_through + a ≤ #(letter−1 in rows < row)
            let allowed = prev_above.saturating_sub(placed_through);
            max = max.min(allowed);
        }
        for a in (0..=max).rev() {
            shape[row] = old[row] + a;
            counts[row] = a;
            let next_prev = if letter > 0 { prev_above + prev[row] } else { 0 };
            strip(
                ctx,
                letter,
                row + 1,
                remaining - a,
                placed_through + a,
                next_prev,
                old,
                prev,
                shape,
                counts,
                out,
            );
        }
        shape[row] = old[row];
        counts[row] = 0;
    }

    let ctx = Ctx {
        letters: &letters,
        cap,
        rows,
    };
    let mut shape = lambda.to_vec();
    place_letter(&ctx, 0, &mut shape, &vec![0; rows], out);
}

/// Expansion of S_κ^u · S_{κ^ι}^v; on the torus S_{κ^ι} = conj(S_κ).
pub fn expand_power(kappa: &WeightVector, u: u32, v: u32) -> Result<SchurExpansion> {
    let size = (u + v) * kappa.abs();
    if size > PRODUCT_GUARD {
        return Err(Error::GuardExceeded(format!(
            "power expansion needs (u+v)|kappa| <= {PRODUCT_GUARD}, got {size}"
        )));
    }
    let dual = kappa.involute();
    let mut acc = SchurExpansion::unit(kappa.rank())?;
    for _ in 0..u {
        acc = acc.times(kappa);
    }
    for _ in 0..v {
        acc = acc.times(&dual);
    }
    Ok(acc)
}

fn require_nonzero(kappa: &WeightVector) -> Result<()> {
    if kappa.is_zero() {
        Err(Error::InvalidArgument("kappa must be nonzero".into()))
    } else {
        Ok(())
    }
}

/// S_κ · S_{κ^ι} = |S_κ|² on tempered points.
pub fn key_identity_expansion(kappa: &WeightVector) -> Result<SchurExpansion> {
    require_nonzero(kappa)?;
    lr_product(kappa, &kappa.involute())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetrizedSquare {
    /// 2(1 + δ_{κ,κ^ι}).
    pub constant: BigUint,
    /// Σ_{ξ≠0} (d^ξ_{κκ} + 2 d^ξ_{κκ^ι} + d^ξ_{κ^ικ^ι}) S_ξ.
    pub rest: SchurExpansion,
}

/// Expansion of |S_κ + S_{κ^ι}|² = S_κ² + 2 S_κ S_{κ^ι} + S_{κ^ι}².
pub fn symmetrized_square(kappa: &WeightVector) -> Result<SymmetrizedSquare> {
    require_nonzero(kappa)?;
    let dual = kappa.involute();
    let mut total = lr_product(kappa, kappa)?;
    total.add_scaled(&lr_product(kappa, &dual)?, &BigUint::from(2u32));
    total.add_scaled(&lr_product(&dual, &dual)?, &BigUint::one());
    Ok(SymmetrizedSquare {
        constant: total.constant(),
        rest: total.without_constant(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct L2Check {
    pub sum_squares: BigUint,
    pub bound: BigUint,
    pub ok: bool,
}

/// Σ_ξ (d^ξ_{κκ'})² against c_κ c_κ'.
pub fn coefficient_l2_bound_check(kappa: &WeightVector, kappa2: &WeightVector) -> Result<L2Check> {
    let sum_squares = lr_product(kappa, kappa2)?.sum_of_squares();
    let bound = dimension_bound(kappa) * dimension_bound(kappa2);
    Ok(L2Check {
        ok: sum_squares <= bound,
        sum_squares,
        bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::weights_up_to;

    fn w(parts: &[u32]) -> WeightVector {
        WeightVector::new(parts.len() + 1, parts.to_vec()).unwrap()
    }

    fn terms(e: &SchurExpansion) -> Vec<(String, u64)> {
        e.iter().map(|(x, c)| (x.to_string(), c.to_u64().unwrap())).collect()
    }

    fn s(v: &[(&str, u64)]) -> Vec<(String, u64)> {
        v.iter().map(|(a, b)| (a.to_string(), *b)).collect()
    }

    #[test]
    fn identity_element() {
        for k in weights_up_to(3, 3).unwrap() {
            assert_eq!(terms(&lr_product(&k, &w(&[0, 0])).unwrap()), vec![(k.to_string(), 1)]);
        }
    }

    #[test]
    fn product_examples() {
        assert_eq!(
            terms(&lr_product(&w(&[1, 0]), &w(&[0, 1])).unwrap()),
            s(&[("0,0", 1), ("1,1", 1)])
        );
        assert_eq!(terms(&lr_product(&w(&[1]), &w(&[1])).unwrap()), s(&[("0", 1), ("2", 1)]));
        // 8 ⊗ 8 = 1 + 8 + 8 + 10 + 10̄ + 27 for SL3.
        assert_eq!(
            terms(&lr_product(&w(&[1, 1]), &w(&[1, 1])).unwrap()),
            s(&[("0,0", 1), ("0,3", 1), ("1,1", 2), ("2,2", 1), ("3,0", 1)])
        );
    }

    #[test]
    fn power_examples() {
        assert_eq!(terms(&expand_power(&w(&[1, 0]), 0, 0).unwrap()), s(&[("0,0", 1)]));
        assert_eq!(
            terms(&expand_power(&w(&[1, 0]), 1, 1).unwrap()),
            s(&[("0,0", 1), ("1,1", 1)])
        );
        assert_eq!(terms(&expand_power(&w(&[1]), 2, 0).unwrap()), s(&[("0", 1), ("2", 1)]));
        // (S₁)^4 for SL2: 2 S₀ + 3 S₂ + S₄.
        assert_eq!(
            terms(&expand_power(&w(&[1]), 2, 2).unwrap()),
            s(&[("0", 2), ("2", 3), ("4", 1)])
        );
    }

    #[test]
    fn key_identity_examples() {
        assert_eq!(
            terms(&key_identity_expansion(&w(&[1, 0])).unwrap()),
            s(&[("0,0", 1), ("1,1", 1)])
        );
        assert_eq!(terms(&key_identity_expansion(&w(&[1])).unwrap()), s(&[("0", 1), ("2", 1)]));
        let e = key_identity_expansion(&w(&[1, 1])).unwrap();
        assert_eq!(e.constant(), BigUint::one());
        assert!(key_identity_expansion(&w(&[0, 0])).is_err());
    }

    #[test]
    fn symmetrized_square_examples() {
        let r = symmetrized_square(&w(&[1])).unwrap();
        assert_eq!(r.constant, BigUint::from(4u32));
        assert_eq!(terms(&r.rest), s(&[("2", 4)]));
        let r = symmetrized_square(&w(&[1, 0])).unwrap();
        assert_eq!(r.constant, BigUint::from(2u32));
        assert_eq!(
            terms(&r.rest),
            s(&[("0,1", 1), ("0,2", 1), ("1,0", 1), ("1,1", 2), ("2,0", 1)])
        );
        assert_eq!(symmetrized_square(&w(&[1, 1])).unwrap().constant, BigUint::from(4u32));
    }

    #[test]
    fn l2_examples() {
        let r = coefficient_l2_bound_check(&w(&[2, 1]), &w(&[0, 0])).unwrap();
        assert_eq!(r.sum_squares, BigUint::one());
        assert!(r.ok);
        let r = coefficient_l2_bound_check(&w(&[1, 0]), &w(&[0, 1])).unwrap();
        assert_eq!(r.sum_squares, BigUint::from(2u32));
        assert_eq!(r.bound, BigUint::from(4096u32));
        assert!(r.ok);
        let r = coefficient_l2_bound_check(&w(&[1, 1]), &w(&[1, 1])).unwrap();
        // 1 + 1 + 4 + 1 + 1 from 8 ⊗ 8.
        assert_eq!(r.sum_squares, BigUint::from(8u32));
        assert_eq!(r.bound, BigUint::from(3u32).pow(12));
    }

    #[test]
    fn guards_and_rank_checks() {
        let big = WeightVector::new(3, vec![6, 5]).unwrap();
        assert!(matches!(lr_product(&big, &big), Err(Error::GuardExceeded(_))));
        assert!(matches!(expand_power(&w(&[3, 0]), 4, 3), Err(Error::GuardExceeded(_))));
        assert!(matches!(lr_product(&w(&[1]), &w(&[1, 0])), Err(Error::RankMismatch { .. })));
    }

    #[test]
    fn structural_invariants() {
        for n in 2..=4 {
            let ws = weights_up_to(n, if n == 4 { 2 } else { 3 }).unwrap();
            for a in &ws {
                for b in &ws {
                    let ab = lr_product(a, b).unwrap();
                    assert_eq!(ab, lr_product(b, a).unwrap(), "{a} x {b}");
                    assert_eq!(dimension(a) * dimension(b), ab.dimension_sum());
                    let total = a.wnorm() + b.wnorm();
                    for (xi, c) in ab.iter() {
                        assert!(xi.wnorm() <= total);
                        assert_eq!((total - xi.wnorm()) % n as u32, 0);
                        assert_eq!(lr_coefficient(a, b, xi).unwrap(), c.to_u64().unwrap());
                    }
                    let d = usize::from(*a == b.involute());
                    assert_eq!(ab.constant(), BigUint::from(d));
                }
            }
        }
    }

    #[test]
    fn serialises_in_lexicographic_order() {
        let e = lr_product(&w(&[0, 1]), &w(&[1, 0])).unwrap();
        let json = serde_json::to_string(&e).unwrap();
        assert_eq!(
            json,
            r#"{"n":3,"terms":[{"xi":"0,0","coeff":1},{"xi":"1,1","coeff":1}]}"#
        );
    }
}
