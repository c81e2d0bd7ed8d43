//! Pair partitions of `{1, …, 2t}`: the Brauer diagram basis.
//!
//! Points `1..=t` form the top row of a diagram (the output tensor factors)
//! and `t+1..=2t` the bottom row (the input factors). All points are
//! 1-indexed, in memory and on the wire.

use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest `t` for which the full basis may be enumerated; `(2·8−1)!! = 2,027,025`.
pub const MAX_ENUM_T: usize = 8;

/// Largest `t` a single diagram may have (points must fit in a `u16`).
const MAX_DIAGRAM_T: usize = u16::MAX as usize / 2;

/// A perfect matching of `{1, …, 2t}` in canonical form.
///
/// Each pair is stored with its smaller point first and the pairs are sorted
/// by their first point, so the derived ordering is lexicographic on the
/// canonical pair list.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairPartition {
    t: usize,
    pairs: Vec<(u16, u16)>,
}

/// Product of two diagrams together with the number of closed loops removed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompositionResult {
    pub product: PairPartition,
    pub loops: usize,
}

impl PairPartition {
    /// Builds a pair partition from any list of pairs covering `{1, …, 2t}`
    /// exactly once, canonicalizing order within and across pairs.
    pub fn new(t: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if t == 0 || t > MAX_DIAGRAM_T {
            return Err(Error::Size(format!("t must lie in 1..={MAX_DIAGRAM_T}, got {t}")));
        }
        let mut seen = vec![false; 2 * t + 1];
        let mut out = Vec::with_capacity(t);
        for (a, b) in pairs {
            let (a, b) = if a < b { (a, b) } else { (b, a) };
            if a == 0 || b > 2 * t || a == b {
                return Err(Error::Size(format!("pair ({a}, {b}) is not a pair of distinct points in 1..={}", 2 * t)));
            }
            if seen[a] || seen[b] {
                return Err(Error::Size(format!("pair ({a}, {b}) reuses a point")));
            }
            seen[a] = true;
            seen[b] = true;
            out.push((a as u16, b as u16));
        }
        if out.len() != t {
            return Err(Error::Size(format!("expected {t} pairs, got {}", out.len())));
        }
        out.sort_unstable();
        Ok(Self { t, pairs: out })
    }

    /// Builds from a 0-indexed involution without fixed points. Callers
    /// guarantee validity.
    fn from_partner(partner: &[usize]) -> Self {
        let t = partner.len() / 2;
        let pairs = partner
            .iter()
            .enumerate()
            .filter(|&(a, &b)| a < b)
            .map(|(a, &b)| ((a + 1) as u16, (b + 1) as u16))
            .collect();
        Self { t, pairs }
    }

    /// The diagram `{{1, t+1}, {2, t+2}, …}` acting as the identity operator.
    pub fn identity(t: usize) -> Result<Self> {
        Self::new(t, (1..=t).map(|i| (i, t + i)))
    }

    /// Embeds a permutation of `[t]` as the diagram `{{i, t + σ⁻¹(i)}}`, so
    /// that the embedding is multiplicative under [`PairPartition::compose`].
    pub fn from_permutation(sigma: &Permutation) -> Self {
        let t = sigma.degree();
        let inv = sigma.inverse();
        let pairs = (1..=t).map(|i| (i as u16, (t + inv.apply(i)) as u16)).collect();
        Self { t, pairs }
    }

    pub fn t(&self) -> usize {
        self.t
    }

    /// Canonical pairs, 1-indexed.
    pub fn pairs(&self) -> impl ExactSizeIterator<Item = (usize, usize)> + '_ {
        self.pairs.iter().map(|&(a, b)| (a as usize, b as usize))
    }

    /// 0-indexed partner table: `partner[p]` is the point matched with `p`.
    pub(crate) fn partner(&self) -> Vec<usize> {
        let mut partner = vec![0; 2 * self.t];
        for &(a, b) in &self.pairs {
            partner[a as usize - 1] = b as usize - 1;
            partner[b as usize - 1] = a as usize - 1;
        }
        partner
    }

    /// Number of pairs joining the top row to the bottom row.
    pub fn propagating_number(&self) -> usize {
        let t = self.t as u16;
        self.pairs.iter().filter(|&&(a, b)| a <= t && b > t).count()
    }

    /// Whether every pair crosses the bipartition, i.e. the diagram is an
    /// element of the symmetric group.
    pub fn is_permutation(&self) -> bool {
        self.propagating_number() == self.t
    }

    /// The permutation `σ` with `self == from_permutation(σ)`, if any.
    pub fn to_permutation(&self) -> Option<Permutation> {
        if !self.is_permutation() {
            return None;
        }
        // pair (i, t + σ⁻¹(i)) gives σ(σ⁻¹(i)) = i
        let mut images = vec![0; self.t];
        for (a, b) in self.pairs() {
            images[b - self.t - 1] = a;
        }
        Some(Permutation { images })
    }

    /// Swaps the top and bottom rows. Represents the transpose of the
    /// diagram's operator.
    pub fn transpose(&self) -> Self {
        let t = self.t as u16;
        let flip = |p: u16| if p <= t { p + t } else { p - t };
        let mut pairs: Vec<(u16, u16)> = self
            .pairs
            .iter()
            .map(|&(a, b)| {
                let (a, b) = (flip(a), flip(b));
                (a.min(b), a.max(b))
            })
            .collect();
        pairs.sort_unstable();
        Self { t: self.t, pairs }
    }

    fn check_same_t(&self, other: &Self) -> Result<()> {
        if self.t == other.t {
            Ok(())
        } else {
            Err(Error::Size(format!("diagrams on t={} and t={} cannot be combined", self.t, other.t)))
        }
    }

    /// Brauer composition `self ∘ other`: the bottom row of `self` is glued
    /// to the top row of `other`, matching the operator product
    /// `rep(self) · rep(other)`.
    pub fn compose(&self, other: &Self) -> Result<CompositionResult> {
        self.check_same_t(other)?;
        let t = self.t;
        let upper = self.partner();
        let lower = other.partner();
        let mut product = vec![usize::MAX; 2 * t];
        let mut middle_seen = vec![false; t];

        // Follow a path that has just entered the middle row at `k`, heading
        // into `lower` (down) or `upper` (up). Returns the product point where
        // it leaves.
        let walk = |mut k: usize, mut down: bool, seen: &mut [bool]| -> usize {
            loop {
                seen[k] = true;
                if down {
                    let r = lower[k];
                    if r >= t {
                        return r;
                    }
                    k = r;
                    down = false;
                } else {
                    let q = upper[t + k];
                    if q < t {
                        return q;
                    }
                    k = q - t;
                    down = true;
                }
            }
        };

        for p in 0..t {
            if product[p] != usize::MAX {
                continue;
            }
            let q = upper[p];
            let end = if q < t { q } else { walk(q - t, true, &mut middle_seen) };
            product[p] = end;
            product[end] = p;
        }
        for p in t..2 * t {
            if product[p] != usize::MAX {
                continue;
            }
            let r = lower[p];
            let end = if r >= t { r } else { walk(r, false, &mut middle_seen) };
            product[p] = end;
            product[end] = p;
        }

        let mut loops = 0;
        for start in 0..t {
            if middle_seen[start] {
                continue;
            }
            loops += 1;
            let mut k = start;
            loop {
                middle_seen[k] = true;
                // every middle point left unvisited lies on a closed cycle
                let next = lower[k];
                middle_seen[next] = true;
                k = upper[t + next] - t;
                if k == start {
                    break;
                }
            }
        }

        Ok(CompositionResult { product: Self::from_partner(&product), loops })
    }

    /// Number of cycles in the union of the two matchings as a 2-regular
    /// multigraph on `{1, …, 2t}`; `Tr[rep(self)ᵀ rep(other)] = d^cycles`.
    pub fn union_cycle_count(&self, other: &Self) -> Result<usize> {
        self.check_same_t(other)?;
        Ok(cycle_count(&self.partner(), &other.partner()))
    }
}

pub(crate) fn cycle_count(a: &[usize], b: &[usize]) -> usize {
    let mut seen = vec![false; a.len()];
    let mut cycles = 0;
    for start in 0..a.len() {
        if seen[start] {
            continue;
        }
        cycles += 1;
        let mut p = start;
        loop {
            seen[p] = true;
            let q = a[p];
            seen[q] = true;
            p = b[q];
            if p == start {
                break;
            }
        }
    }
    cycles
}

impl fmt::Debug for PairPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for PairPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (a, b)) in self.pairs().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{{{a},{b}}}")?;
        }
        f.write_str("}")
    }
}

impl Serialize for PairPartition {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.pairs().map(|(a, b)| [a, b]))
    }
}

impl<'de> Deserialize<'de> for PairPartition {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<[usize; 2]>::deserialize(deserializer)?;
        let t = raw.len();
        Self::new(t, raw.into_iter().map(|[a, b]| (a, b))).map_err(D::Error::custom)
    }
}

/// All `(2t−1)!!` pair partitions of `[2t]`, lexicographic by pair list.
pub fn enumerate_pairings(t: usize) -> Result<Vec<PairPartition>> {
    if t == 0 || t > MAX_ENUM_T {
        return Err(Error::Size(format!("pairings can be enumerated for t in 1..={MAX_ENUM_T}, got {t}")));
    }
    let mut out = Vec::with_capacity(double_factorial(2 * t - 1) as usize);
    let mut used = vec![false; 2 * t];
    let mut current = Vec::with_capacity(t);
    extend_pairings(t, &mut used, &mut current, &mut out);
    Ok(out)
}

fn extend_pairings(t: usize, used: &mut [bool], current: &mut Vec<(u16, u16)>, out: &mut Vec<PairPartition>) {
    let Some(first) = used.iter().position(|u| !u) else {
        out.push(PairPartition { t, pairs: current.clone() });
        return;
    };
    used[first] = true;
    for second in first + 1..2 * t {
        if used[second] {
            continue;
        }
        used[second] = true;
        current.push(((first + 1) as u16, (second + 1) as u16));
        extend_pairings(t, used, current, out);
        current.pop();
        used[second] = false;
    }
    used[first] = false;
}

/// `n!! = n·(n−2)·…`, with `0!! = (−1)!! = 1`.
pub fn double_factorial(n: usize) -> u64 {
    (1..=n as u64).rev().step_by(2).product()
}

/// The enumerated diagram basis for a fixed `t`, with index lookup.
///
/// Index order is the global order used by every matrix in the crate.
#[derive(Clone, Debug)]
pub struct PairingBasis {
    t: usize,
    elements: Vec<PairPartition>,
}

impl PairingBasis {
    pub fn new(t: usize) -> Result<Self> {
        Ok(Self { t, elements: enumerate_pairings(t)? })
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<&PairPartition> {
        self.elements.get(index)
    }

    pub fn index_of(&self, m: &PairPartition) -> Option<usize> {
        self.elements.binary_search(m).ok()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, PairPartition> {
        self.elements.iter()
    }

    pub fn as_slice(&self) -> &[PairPartition] {
        &self.elements
    }
}

impl<'a> IntoIterator for &'a PairingBasis {
    type Item = &'a PairPartition;
    type IntoIter = std::slice::Iter<'a, PairPartition>;

    fn into_iter(self) -> Self::IntoIter {
        self.elements.iter()
    }
}

/// A permutation of `{1, …, t}` stored by its images.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    /// `images[i-1] = σ(i)`, 1-indexed.
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let t = images.len();
        let mut seen = vec![false; t + 1];
        for &x in &images {
            if x == 0 || x > t || seen[x] {
                return Err(Error::Size(format!("{images:?} is not a permutation of 1..={t}")));
            }
            seen[x] = true;
        }
        if t == 0 {
            return Err(Error::Size("permutation of an empty set".into()));
        }
        Ok(Self { images })
    }

    pub fn identity(t: usize) -> Self {
        Self { images: (1..=t).collect() }
    }

    /// All `t!` permutations in lexicographic order of their image lists.
    pub fn all(t: usize) -> Vec<Self> {
        let mut out = Vec::new();
        let mut images: Vec<usize> = (1..=t).collect();
        loop {
            out.push(Self { images: images.clone() });
            // next lexicographic permutation
            let Some(i) = (0..t.saturating_sub(1)).rev().find(|&i| images[i] < images[i + 1]) else {
                break;
            };
            let j = (i + 1..t).rev().find(|&j| images[j] > images[i]).unwrap();
            images.swap(i, j);
            images[i + 1..].reverse();
        }
        out
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i - 1]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn inverse(&self) -> Self {
        let mut images = vec![0; self.images.len()];
        for (i, &x) in self.images.iter().enumerate() {
            images[x - 1] = i + 1;
        }
        Self { images }
    }

    /// `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.degree() != other.degree() {
            return Err(Error::Size("permutations of different degree".into()));
        }
        Ok(Self { images: other.images.iter().map(|&i| self.images[i - 1]).collect() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pp(t: usize, pairs: &[(usize, usize)]) -> PairPartition {
        PairPartition::new(t, pairs.iter().copied()).unwrap()
    }

    #[test]
    fn counts_are_double_factorials() {
        for (t, n) in [(1, 1), (2, 3), (3, 15), (4, 105), (5, 945), (6, 10395)] {
            assert_eq!(enumerate_pairings(t).unwrap().len(), n);
        }
    }

    #[test]
    fn enumeration_bounds() {
        assert!(matches!(enumerate_pairings(0), Err(Error::Size(_))));
        assert!(matches!(enumerate_pairings(MAX_ENUM_T + 1), Err(Error::Size(_))));
    }

    #[test]
    fn enumeration_is_sorted_and_canonical() {
        let all = enumerate_pairings(4).unwrap();
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(all[0], pp(4, &[(1, 2), (3, 4), (5, 6), (7, 8)]));
        let t2 = enumerate_pairings(2).unwrap();
        assert_eq!(t2, vec![pp(2, &[(1, 2), (3, 4)]), pp(2, &[(1, 3), (2, 4)]), pp(2, &[(1, 4), (2, 3)])]);
        assert_eq!(enumerate_pairings(1).unwrap(), vec![pp(1, &[(1, 2)])]);
    }

    #[test]
    fn new_canonicalizes_and_rejects() {
        assert_eq!(pp(2, &[(4, 2), (3, 1)]), pp(2, &[(1, 3), (2, 4)]));
        assert!(PairPartition::new(2, [(1, 2), (2, 3)]).is_err());
        assert!(PairPartition::new(2, [(1, 5), (2, 3)]).is_err());
        assert!(PairPartition::new(2, [(1, 2)]).is_err());
        assert!(PairPartition::new(0, []).is_err());
    }

    #[test]
    fn propagating_numbers_of_t2_diagrams() {
        assert_eq!(pp(2, &[(1, 3), (2, 4)]).propagating_number(), 2);
        assert_eq!(pp(2, &[(1, 2), (3, 4)]).propagating_number(), 0);
        assert_eq!(pp(2, &[(1, 4), (2, 3)]).propagating_number(), 2);
    }

    #[test]
    fn composition_examples() {
        let id = PairPartition::identity(2).unwrap();
        let swap = pp(2, &[(1, 4), (2, 3)]);
        let gamma = pp(2, &[(1, 2), (3, 4)]);
        assert_eq!(id.compose(&id).unwrap(), CompositionResult { product: id.clone(), loops: 0 });
        assert_eq!(gamma.compose(&gamma).unwrap(), CompositionResult { product: gamma.clone(), loops: 1 });
        assert_eq!(swap.compose(&swap).unwrap(), CompositionResult { product: id.clone(), loops: 0 });
        assert!(id.compose(&PairPartition::identity(3).unwrap()).is_err());
    }

    #[test]
    fn composition_with_two_loops() {
        // γ⊗γ composed with itself closes one loop per factor
        let gg = pp(4, &[(1, 2), (3, 4), (5, 6), (7, 8)]);
        let r = gg.compose(&gg).unwrap();
        assert_eq!(r.product, gg);
        assert_eq!(r.loops, 2);
    }

    #[test]
    fn transpose_examples() {
        assert_eq!(PairPartition::identity(2).unwrap().transpose(), PairPartition::identity(2).unwrap());
        let gamma = pp(2, &[(1, 2), (3, 4)]);
        assert_eq!(gamma.transpose(), gamma);
        let m = pp(3, &[(1, 2), (3, 4), (5, 6)]);
        assert_eq!(m.transpose(), pp(3, &[(1, 6), (2, 3), (4, 5)]));
    }

    #[test]
    fn union_cycle_examples() {
        let id = PairPartition::identity(2).unwrap();
        let swap = pp(2, &[(1, 4), (2, 3)]);
        let gamma = pp(2, &[(1, 2), (3, 4)]);
        assert_eq!(id.union_cycle_count(&id).unwrap(), 2);
        assert_eq!(id.union_cycle_count(&swap).unwrap(), 1);
        assert_eq!(id.union_cycle_count(&gamma).unwrap(), 1);
    }

    #[test]
    fn permutations_embed_homomorphically() {
        for t in 1..=4 {
            let perms = Permutation::all(t);
            assert_eq!(perms.len(), (1..=t).product::<usize>());
            let basis = PairingBasis::new(t).unwrap();
            assert_eq!(basis.iter().filter(|m| m.is_permutation()).count(), perms.len());
            for s in &perms {
                let ms = PairPartition::from_permutation(s);
                assert_eq!(ms.to_permutation().as_ref(), Some(s));
                for u in &perms {
                    let mu = PairPartition::from_permutation(u);
                    let r = ms.compose(&mu).unwrap();
                    assert_eq!(r.loops, 0);
                    assert_eq!(r.product, PairPartition::from_permutation(&s.compose(u).unwrap()));
                }
            }
        }
    }

    #[test]
    fn basis_lookup() {
        let basis = PairingBasis::new(3).unwrap();
        for (i, m) in basis.iter().enumerate() {
            assert_eq!(basis.index_of(m), Some(i));
        }
    }

    #[test]
    fn json_shape() {
        let m = pp(2, &[(2, 4), (1, 3)]);
        assert_eq!(serde_json::to_string(&m).unwrap(), "[[1,3],[2,4]]");
        let back: PairPartition = serde_json::from_str("[[2,4],[3,1]]").unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<PairPartition>("[[1,2],[2,3]]").is_err());
    }

    fn arb_pairing(t: usize) -> impl Strategy<Value = PairPartition> {
        let n = double_factorial(2 * t - 1) as usize;
        (0..n).prop_map(move |i| enumerate_pairings(t).unwrap()[i].clone())
    }

    proptest! {
        #[test]
        fn composition_is_associative(
            (a, b, c) in (1usize..=3).prop_flat_map(|t| (arb_pairing(t), arb_pairing(t), arb_pairing(t)))
        ) {
            let ab = a.compose(&b).unwrap();
            let ab_c = ab.product.compose(&c).unwrap();
            let bc = b.compose(&c).unwrap();
            let a_bc = a.compose(&bc.product).unwrap();
            prop_assert_eq!(&ab_c.product, &a_bc.product);
            prop_assert_eq!(ab.loops + ab_c.loops, bc.loops + a_bc.loops);
        }

        #[test]
        fn transpose_is_involutive_and_keeps_pr(m in (1usize..=5).prop_flat_map(arb_pairing)) {
            let tt = m.transpose();
            prop_assert_eq!(tt.propagating_number(), m.propagating_number());
            prop_assert_eq!(tt.transpose(), m);
        }

        #[test]
        fn cycle_count_symmetric(
            (a, b) in (1usize..=5).prop_flat_map(|t| (arb_pairing(t), arb_pairing(t)))
        ) {
            prop_assert_eq!(a.union_cycle_count(&b).unwrap(), b.union_cycle_count(&a).unwrap());
            prop_assert_eq!(a.union_cycle_count(&a).unwrap(), a.t());
            let loops = a.compose(&b).unwrap().loops;
            prop_assert!(loops <= a.t());
            let pr = a.propagating_number();
            prop_assert_eq!(pr % 2, a.t() % 2);
        }
    }
}
