//! GF(2^u) field arithmetic and the affine hash family `h(x) = [ax + b]_v`.
//!
//! Field elements are unsigned integers read as coefficient bitmasks with the
//! most significant bit holding the highest-degree coefficient. `[y]_v` takes
//! the `v` most significant bits of the `u`-bit representation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerances;

/// One fixed irreducible modulus per degree `u ∈ [1, 16]`: the lowest-weight,
/// numerically-first irreducible polynomial (bitmask includes the `x^u` term).
/// Re-verified by [`GFContext::new`].
const MODULUS_TABLE: [u32; 16] = [
    0x00002, // u=1:  x
    0x00007, // u=2:  x^2+x+1
    0x0000B, // u=3:  x^3+x+1
    0x00013, // u=4:  x^4+x+1
    0x00025, // u=5:  x^5+x^2+1
    0x00043, // u=6:  x^6+x+1
    0x00083, // u=7:  x^7+x+1
    0x0011B, // u=8:  x^8+x^4+x^3+x+1
    0x00203, // u=9:  x^9+x+1
    0x00409, // u=10: x^10+x^3+1
    0x00805, // u=11: x^11+x^2+1
    0x01009, // u=12: x^12+x^3+1
    0x0201B, // u=13: x^13+x^4+x^3+x+1
    0x04021, // u=14: x^14+x^5+1
    0x08003, // u=15: x^15+x+1
    0x1002B, // u=16: x^16+x^5+x^3+x+1
];

fn poly_degree(p: u64) -> i32 {
    63 - p.leading_zeros() as i32
}

fn poly_mod(mut a: u64, b: u64) -> u64 {
    let db = poly_degree(b);
    while a != 0 && poly_degree(a) >= db {
        a ^= b << (poly_degree(a) - db);
    }
    a
}

/// Exhaustive trial division over all polynomials of degree 1..=u/2.
fn poly_is_irreducible(p: u64, degree: u32) -> bool {
    if degree == 1 {
        return true;
    }
    for d in 1..=degree / 2 {
        for q in (1u64 << d)..(1u64 << (d + 1)) {
            if poly_mod(p, q) == 0 {
                return false;
            }
        }
    }
    true
}

/// The field GF(2^u) with its pinned irreducible modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GFContext {
    u: u32,
    modulus: u32,
}

impl GFContext {
    /// Builds the field with the table modulus, re-verifying irreducibility.
    pub fn new(u: u32) -> Result<Self> {
        if !(1..=16).contains(&u) {
            return Err(Error::validation(format!(
                "field exponent u must lie in [1,16], got {u}"
            )));
        }
        let modulus = MODULUS_TABLE[(u - 1) as usize];
        Self::with_modulus(u, modulus)
    }

    /// Builds the field with a caller-supplied modulus of degree `u`,
    /// verifying irreducibility exhaustively.
    pub fn with_modulus(u: u32, modulus: u32) -> Result<Self> {
        if !(1..=16).contains(&u) {
            return Err(Error::validation(format!(
                "field exponent u must lie in [1,16], got {u}"
            )));
        }
        if poly_degree(modulus as u64) != u as i32 {
            return Err(Error::validation(format!(
                "modulus {modulus:#x} does not have degree {u}"
            )));
        }
        if !poly_is_irreducible(modulus as u64, u) {
            return Err(Error::validation(format!(
                "modulus {modulus:#x} is reducible over GF(2)"
            )));
        }
        Ok(GFContext { u, modulus })
    }

    pub fn u(&self) -> u32 {
        self.u
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    /// Number of field elements, `2^u`.
    pub fn order(&self) -> u64 {
        1u64 << self.u
    }

    fn check_operand(&self, x: u64) -> Result<()> {
        if x >= self.order() {
            return Err(Error::validation(format!(
                "field element {x} out of range for GF(2^{})",
                self.u
            )));
        }
        Ok(())
    }

    /// Carry-less polynomial multiplication reduced modulo the context polynomial.
    pub fn mul(&self, x: u64, y: u64) -> Result<u64> {
        self.check_operand(x)?;
        self.check_operand(y)?;
        Ok(self.mul_unchecked(x, y))
    }

    #[inline]
    pub(crate) fn mul_unchecked(&self, x: u64, y: u64) -> u64 {
        let mut acc: u64 = 0;
        let mut a = x;
        let mut b = y;
        while b != 0 {
            if b & 1 == 1 {
                acc ^= a;
            }
            a <<= 1;
            if a >> self.u != 0 {
                a ^= self.modulus as u64;
            }
            b >>= 1;
        }
        acc
    }

    /// Field addition: bitwise XOR.
    pub fn add(&self, x: u64, y: u64) -> Result<u64> {
        self.check_operand(x)?;
        self.check_operand(y)?;
        Ok(x ^ y)
    }

    /// Multiplicative inverse of a nonzero element (by exponentiation to
    /// `2^u - 2`).
    pub fn inv(&self, x: u64) -> Result<u64> {
        self.check_operand(x)?;
        if x == 0 {
            return Err(Error::domain("0 has no multiplicative inverse"));
        }
        let mut result = 1u64;
        let mut base = x;
        let mut e = self.order() - 2;
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul_unchecked(result, base);
            }
            base = self.mul_unchecked(base, base);
            e >>= 1;
        }
        Ok(result)
    }
}

/// One member `(a, b)` of the affine family `h(x) = [ax + b]_v` over GF(2^u).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AffineHash {
    pub ctx: GFContext,
    pub v: u32,
    pub a: u64,
    pub b: u64,
}

/// Bit-exact hash description: `{"u", "v", "modulus", "a", "b"}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HashSpec {
    pub u: u32,
    pub v: u32,
    pub modulus: u32,
    pub a: u64,
    pub b: u64,
}

impl AffineHash {
    pub fn new(ctx: GFContext, v: u32, a: u64, b: u64) -> Result<Self> {
        if v == 0 || v > ctx.u() {
            return Err(Error::validation(format!(
                "output width v={v} must satisfy 1 ≤ v ≤ u={}",
                ctx.u()
            )));
        }
        ctx.check_operand(a)?;
        ctx.check_operand(b)?;
        Ok(AffineHash { ctx, v, a, b })
    }

    pub fn to_spec(&self) -> HashSpec {
        HashSpec {
            u: self.ctx.u(),
            v: self.v,
            modulus: self.ctx.modulus(),
            a: self.a,
            b: self.b,
        }
    }

    pub fn from_spec(spec: &HashSpec) -> Result<Self> {
        let ctx = GFContext::with_modulus(spec.u, spec.modulus)?;
        AffineHash::new(ctx, spec.v, spec.a, spec.b)
    }

    /// Number of outputs, `2^v`.
    pub fn output_size(&self) -> u64 {
        1u64 << self.v
    }

    /// `h(x)`: the `v` most significant bits of `ax + b`.
    pub fn eval(&self, x: u64) -> Result<u64> {
        self.ctx.check_operand(x)?;
        Ok(self.eval_unchecked(x))
    }

    #[inline]
    pub(crate) fn eval_unchecked(&self, x: u64) -> u64 {
        let y = self.ctx.mul_unchecked(self.a, x) ^ self.b;
        y >> (self.ctx.u() - self.v)
    }

    /// True iff every output has preimage size exactly `2^{u-v}`; for this
    /// family that holds exactly when `a ≠ 0` (x ↦ ax+b is then a bijection).
    pub fn is_balanced(&self) -> bool {
        self.a != 0
    }
}

/// The full affine family over GF(2^u): all `2^{2u}` pairs `(a, b)` in
/// a-major, b-minor order, with deterministic per-index access.
#[derive(Debug, Clone)]
pub struct HashFamily {
    ctx: GFContext,
    v: u32,
}

impl HashFamily {
    pub fn ctx(&self) -> GFContext {
        self.ctx
    }

    pub fn v(&self) -> u32 {
        self.v
    }

    pub fn len(&self) -> u64 {
        1u64 << (2 * self.ctx.u())
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Member at position `i = a·2^u + b`.
    pub fn member(&self, i: u64) -> AffineHash {
        let order = self.ctx.order();
        AffineHash {
            ctx: self.ctx,
            v: self.v,
            a: i / order,
            b: i % order,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = AffineHash> + '_ {
        (0..self.len()).map(|i| self.member(i))
    }
}

/// Enumerates the whole family. Capped at `u ≤ 12` (family size `2^24`).
pub fn enumerate_family(ctx: GFContext, v: u32) -> Result<HashFamily> {
    if ctx.u() > tolerances::FAMILY_ENUM_MAX_U {
        return Err(Error::capacity(format!(
            "family enumeration needs u ≤ {}, got {} (use sample_hash instead)",
            tolerances::FAMILY_ENUM_MAX_U,
            ctx.u()
        )));
    }
    if v == 0 || v > ctx.u() {
        return Err(Error::validation(format!(
            "output width v={v} must satisfy 1 ≤ v ≤ u={}",
            ctx.u()
        )));
    }
    Ok(HashFamily { ctx, v })
}

/// Uniformly random family member, deterministic per seed.
pub fn sample_hash(ctx: GFContext, v: u32, seed: u64) -> Result<AffineHash> {
    use rand::Rng;
    use rand::SeedableRng;
    if v == 0 || v > ctx.u() {
        return Err(Error::validation(format!(
            "output width v={v} must satisfy 1 ≤ v ≤ u={}",
            ctx.u()
        )));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let a = rng.gen_range(0..ctx.order());
    let b = rng.gen_range(0..ctx.order());
    Ok(AffineHash { ctx, v, a, b })
}

/// Exact pair-collision counts over the whole family.
///
/// `count(x, x', z, z')` is the number of members with `h(x)=z ∧ h(x')=z'`;
/// strong 2-universality requires every off-diagonal cell to equal
/// `2^{2u} / 2^{2v}`. Counts are exact integers.
#[derive(Debug, Clone)]
pub struct UniversalityTable {
    pub u: u32,
    pub v: u32,
    /// `2^{2u} / 2^{2v}`, the value every cell must take.
    pub expected: u64,
    alphabet: usize,
    outputs: usize,
    counts: Vec<u32>,
}

impl UniversalityTable {
    /// Count for inputs `x ≠ x'` and outputs `(z, z')`. The diagonal `x = x'`
    /// is excluded by the definition and reads 0.
    pub fn count(&self, x: usize, x2: usize, z: usize, z2: usize) -> u64 {
        let idx = ((x * self.alphabet + x2) * self.outputs + z) * self.outputs + z2;
        self.counts[idx] as u64
    }

    /// True iff every off-diagonal cell equals `expected`.
    pub fn is_uniform(&self) -> bool {
        for x in 0..self.alphabet {
            for x2 in 0..self.alphabet {
                if x == x2 {
                    continue;
                }
                for z in 0..self.outputs {
                    for z2 in 0..self.outputs {
                        if self.count(x, x2, z, z2) != self.expected {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
}

/// Builds the exact pair-collision table by exhaustive enumeration.
/// Capped at `u ≤ 6`.
pub fn universality_check(ctx: GFContext, v: u32) -> Result<UniversalityTable> {
    if ctx.u() > tolerances::UNIVERSALITY_MAX_U {
        return Err(Error::capacity(format!(
            "universality_check needs u ≤ {}, got {}",
            tolerances::UNIVERSALITY_MAX_U,
            ctx.u()
        )));
    }
    let family = enumerate_family(ctx, v)?;
    let alphabet = ctx.order() as usize;
    let outputs = 1usize << v;
    let mut counts = vec![0u32; alphabet * alphabet * outputs * outputs];
    let mut images = vec![0u64; alphabet];
    for h in family.iter() {
        for (x, img) in images.iter_mut().enumerate() {
            *img = h.eval_unchecked(x as u64);
        }
        for x in 0..alphabet {
            for x2 in 0..alphabet {
                if x == x2 {
                    continue;
                }
                let idx = ((x * alphabet + x2) * outputs + images[x] as usize) * outputs
                    + images[x2] as usize;
                counts[idx] += 1;
            }
        }
    }
    Ok(UniversalityTable {
        u: ctx.u(),
        v,
        expected: 1u64 << (2 * (ctx.u() - v)),
        alphabet,
        outputs,
        counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn modulus_table_is_irreducible() {
        for u in 1..=16 {
            let ctx = GFContext::new(u).unwrap();
            assert_eq!(poly_degree(ctx.modulus() as u64), u as i32);
        }
    }

    #[test]
    fn rejects_reducible_modulus() {
        // x^2 + 1 = (x+1)^2 over GF(2)
        assert!(GFContext::with_modulus(2, 0b101).is_err());
    }

    #[test]
    fn mul_identity_and_characteristic_two() {
        let ctx = GFContext::new(4).unwrap();
        for x in 0..16 {
            assert_eq!(ctx.mul(x, 1).unwrap(), x);
            assert_eq!(ctx.add(x, x).unwrap(), 0);
        }
    }

    #[test]
    fn mul_reduction_by_hand() {
        // u=2, modulus x^2+x+1: x·x = x+1, i.e. 2·2 = 3
        let ctx = GFContext::new(2).unwrap();
        assert_eq!(ctx.mul(2, 2).unwrap(), 3);
    }

    #[test]
    fn operand_range_checked() {
        let ctx = GFContext::new(2).unwrap();
        assert!(ctx.mul(4, 1).is_err());
        assert!(ctx.add(1, 7).is_err());
    }

    #[test]
    fn field_axioms_random_triples() {
        for u in [2u32, 3, 4, 8] {
            let ctx = GFContext::new(u).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(u as u64);
            for _ in 0..10_000 {
                let x = rng.gen_range(0..ctx.order());
                let y = rng.gen_range(0..ctx.order());
                let z = rng.gen_range(0..ctx.order());
                let assoc_l = ctx.mul(ctx.mul(x, y).unwrap(), z).unwrap();
                let assoc_r = ctx.mul(x, ctx.mul(y, z).unwrap()).unwrap();
                assert_eq!(assoc_l, assoc_r);
                let dist_l = ctx.mul(x, y ^ z).unwrap();
                let dist_r = ctx.mul(x, y).unwrap() ^ ctx.mul(x, z).unwrap();
                assert_eq!(dist_l, dist_r);
            }
        }
    }

    #[test]
    fn every_nonzero_element_invertible() {
        for u in [2u32, 3, 4, 8] {
            let ctx = GFContext::new(u).unwrap();
            for x in 1..ctx.order() {
                let inv = ctx.inv(x).unwrap();
                assert_eq!(ctx.mul(x, inv).unwrap(), 1, "u={u}, x={x}");
            }
        }
    }

    #[test]
    fn eval_hash_cases() {
        let ctx = GFContext::new(2).unwrap();
        // a=0: constant [b]_v
        let h = AffineHash::new(ctx, 1, 0, 2).unwrap();
        for x in 0..4 {
            assert_eq!(h.eval(x).unwrap(), 1);
        }
        // u=v, a=1, b=0: identity
        let h = AffineHash::new(ctx, 2, 1, 0).unwrap();
        for x in 0..4 {
            assert_eq!(h.eval(x).unwrap(), x);
        }
        // u=2, v=1, a=1, b=0: top bit
        let h = AffineHash::new(ctx, 1, 1, 0).unwrap();
        assert_eq!(h.eval(0).unwrap(), 0);
        assert_eq!(h.eval(1).unwrap(), 0);
        assert_eq!(h.eval(2).unwrap(), 1);
        assert_eq!(h.eval(3).unwrap(), 1);
    }

    #[test]
    fn family_sizes() {
        assert_eq!(enumerate_family(GFContext::new(1).unwrap(), 1).unwrap().len(), 4);
        assert_eq!(enumerate_family(GFContext::new(2).unwrap(), 1).unwrap().len(), 16);
        assert_eq!(enumerate_family(GFContext::new(3).unwrap(), 2).unwrap().len(), 64);
        assert!(matches!(
            enumerate_family(GFContext::new(13).unwrap(), 1),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn balancedness_matches_exhaustive_preimage_count() {
        for u in 1..=4u32 {
            let ctx = GFContext::new(u).unwrap();
            for v in 1..=u {
                let family = enumerate_family(ctx, v).unwrap();
                let mut balanced = 0u64;
                for h in family.iter() {
                    let mut sizes = vec![0u64; 1 << v];
                    for x in 0..ctx.order() {
                        sizes[h.eval_unchecked(x) as usize] += 1;
                    }
                    let expected = 1u64 << (u - v);
                    let exhaustive = sizes.iter().all(|&s| s == expected);
                    assert_eq!(exhaustive, h.is_balanced(), "u={u} v={v} a={} b={}", h.a, h.b);
                    if exhaustive {
                        balanced += 1;
                    }
                }
                // balanced fraction is exactly 1 - 2^{-u}
                assert_eq!(balanced, family.len() - (1 << u));
            }
        }
    }

    #[test]
    fn affine_map_bijective_for_nonzero_a() {
        for u in 1..=8u32 {
            let ctx = GFContext::new(u).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(100 + u as u64);
            for _ in 0..8 {
                let a = rng.gen_range(1..ctx.order());
                let b = rng.gen_range(0..ctx.order());
                let mut seen = vec![false; ctx.order() as usize];
                for x in 0..ctx.order() {
                    let y = ctx.mul_unchecked(a, x) ^ b;
                    assert!(!seen[y as usize]);
                    seen[y as usize] = true;
                }
            }
        }
    }

    #[test]
    fn universality_exact_small_fields() {
        // u=1, v=1: every cell = 1; u=2, v=1: every cell = 4
        let t = universality_check(GFContext::new(1).unwrap(), 1).unwrap();
        assert_eq!(t.expected, 1);
        assert!(t.is_uniform());
        let t = universality_check(GFContext::new(2).unwrap(), 1).unwrap();
        assert_eq!(t.expected, 4);
        assert!(t.is_uniform());
        assert_eq!(t.count(0, 1, 0, 1), 4);
        // diagonal excluded by contract
        assert_eq!(t.count(1, 1, 0, 0), 0);
    }

    #[test]
    fn sample_hash_deterministic_and_unbiased() {
        let ctx = GFContext::new(3).unwrap();
        let h1 = sample_hash(ctx, 2, 42).unwrap();
        let h2 = sample_hash(ctx, 2, 42).unwrap();
        assert_eq!((h1.a, h1.b), (h2.a, h2.b));

        // empirical balancedness over many draws ≈ 1 - 2^{-u} within 3σ
        let trials = 100_000u64;
        let mut balanced = 0u64;
        for seed in 0..trials {
            if sample_hash(ctx, 2, seed).unwrap().is_balanced() {
                balanced += 1;
            }
        }
        let p = 1.0 - 2f64.powi(-3);
        let sigma = (trials as f64 * p * (1.0 - p)).sqrt();
        assert!((balanced as f64 - trials as f64 * p).abs() < 3.0 * sigma);
    }

    #[test]
    fn sampled_pair_collisions_match_exact_table() {
        let ctx = GFContext::new(2).unwrap();
        let v = 1;
        let trials = 100_000u64;
        let (x, x2) = (1u64, 2u64);
        let mut hits = vec![0u64; 4];
        for seed in 0..trials {
            let h = sample_hash(ctx, v, seed).unwrap();
            let idx = (h.eval_unchecked(x) * 2 + h.eval_unchecked(x2)) as usize;
            hits[idx] += 1;
        }
        let p = 0.25;
        let sigma = (trials as f64 * p * (1.0 - p)).sqrt();
        for &h in &hits {
            assert!((h as f64 - trials as f64 * p).abs() < 3.0 * sigma);
        }
    }
}
