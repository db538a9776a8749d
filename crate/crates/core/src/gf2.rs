//! Exact linear algebra over GF(2) and coordinatewise arithmetic over Z₆.
//!
//! Every vector carries an explicit [`Universe`], an ordered list of
//! coordinate labels. The same machinery then serves `Z₂^I`, `Z₂^{Z₆^I}`
//! and truncated function spaces on group windows without reindexing
//! by hand.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::Add;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Default bound on the number of elements enumerated in a coset.
pub const DEFAULT_COSET_BUDGET: u64 = 1 << 20;

/// Ordered coordinate index set.
#[derive(Clone)]
pub struct Universe {
    labels: Arc<[String]>,
}

impl Universe {
    pub fn new<I, S>(labels: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Universe {
            labels: labels.into_iter().map(Into::into).collect(),
        }
    }

    /// Coordinates labelled `0..n`.
    pub fn indexed(n: usize) -> Self {
        Universe::new((0..n).map(|i| i.to_string()))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

impl PartialEq for Universe {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.labels, &other.labels) || self.labels == other.labels
    }
}

impl Eq for Universe {}

impl fmt::Debug for Universe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.labels.len() <= 8 {
            write!(f, "Universe{:?}", &self.labels[..])
        } else {
            write!(f, "Universe(len={})", self.labels.len())
        }
    }
}

fn check_same(a: &Universe, b: &Universe) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(format!(
            "universes of length {} and {} differ",
            a.len(),
            b.len()
        )))
    }
}

fn word_count(n: usize) -> usize {
    n.div_ceil(64)
}

/// A vector in `GF(2)^universe`, bit-packed.
#[derive(Clone)]
pub struct Gf2Vec {
    universe: Universe,
    words: Vec<u64>,
}

impl Gf2Vec {
    pub fn zero(universe: &Universe) -> Self {
        Gf2Vec {
            words: vec![0; word_count(universe.len())],
            universe: universe.clone(),
        }
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(universe: &Universe, ones: I) -> Self {
        let mut v = Gf2Vec::zero(universe);
        for i in ones {
            v.flip(i);
        }
        v
    }

    pub fn from_bits(universe: &Universe, bits: &[bool]) -> Result<Self> {
        if bits.len() != universe.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} bits for a universe of length {}",
                bits.len(),
                universe.len()
            )));
        }
        Ok(Gf2Vec::from_indices(
            universe,
            bits.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i),
        ))
    }

    /// Parses a `0`/`1` string, coordinate 0 first.
    pub fn parse(universe: &Universe, s: &str) -> Result<Self> {
        let bits = s
            .trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidInput(format!("unexpected character {other:?} in bit string"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Gf2Vec::from_bits(universe, &bits)
    }

    /// The all-ones vector.
    pub fn ones(universe: &Universe) -> Self {
        Gf2Vec::from_indices(universe, 0..universe.len())
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn len(&self) -> usize {
        self.universe.len()
    }

    pub fn is_empty(&self) -> bool {
        self.universe.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len(), "coordinate {i} out of range");
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        if self.get(i) != value {
            self.flip(i);
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len(), "coordinate {i} out of range");
        self.words[i / 64] ^= 1 << (i % 64);
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    /// Indices of the nonzero coordinates, ascending.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(k * 64 + t)
                }
            })
        })
    }

    pub fn try_add(&self, other: &Gf2Vec) -> Result<Gf2Vec> {
        check_same(&self.universe, &other.universe)?;
        let mut out = self.clone();
        out.add_assign_unchecked(other);
        Ok(out)
    }

    pub(crate) fn add_assign_unchecked(&mut self, other: &Gf2Vec) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    /// `Σ aᵢbᵢ mod 2`.
    pub fn dot(&self, other: &Gf2Vec) -> Result<bool> {
        check_same(&self.universe, &other.universe)?;
        Ok(self.dot_unchecked(other))
    }

    pub(crate) fn dot_unchecked(&self, other: &Gf2Vec) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum::<u32>()
            % 2
            == 1
    }

    pub fn to_bit_string(&self) -> String {
        (0..self.len()).map(|i| if self.get(i) { '1' } else { '0' }).collect()
    }

    /// Lexicographic order over coordinates, coordinate 0 most significant, `0 < 1`.
    pub fn lex_cmp(&self, other: &Gf2Vec) -> Ordering {
        for (a, b) in self.words.iter().zip(&other.words) {
            let x = a ^ b;
            if x != 0 {
                let i = x.trailing_zeros();
                return if (a >> i) & 1 == 1 {
                    Ordering::Greater
                } else {
                    Ordering::Less
                };
            }
        }
        Ordering::Equal
    }

    fn lowest_set_bit(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, w)| **w != 0)
            .map(|(k, w)| k * 64 + w.trailing_zeros() as usize)
    }
}

impl PartialEq for Gf2Vec {
    fn eq(&self, other: &Self) -> bool {
        self.universe == other.universe && self.words == other.words
    }
}

impl Eq for Gf2Vec {}

impl Hash for Gf2Vec {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.universe.len().hash(state);
        self.words.hash(state);
    }
}

impl PartialOrd for Gf2Vec {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Gf2Vec {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.lex_cmp(other))
    }
}

impl fmt::Debug for Gf2Vec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gf2Vec({})", self.to_bit_string())
    }
}

impl fmt::Display for Gf2Vec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bit_string())
    }
}

/// Coordinatewise XOR. Panics if the universes differ; use [`Gf2Vec::try_add`]
/// to get an error instead.
impl Add for &Gf2Vec {
    type Output = Gf2Vec;

    fn add(self, rhs: &Gf2Vec) -> Gf2Vec {
        self.try_add(rhs).expect("adding vectors over different universes")
    }
}

/// A subspace of `GF(2)^universe` held as a reduced row-echelon basis.
#[derive(Clone, Debug)]
pub struct Gf2Subspace {
    universe: Universe,
    basis: Vec<Gf2Vec>,
    pivots: Vec<usize>,
}

/// Row-reduces `vectors` into an echelon basis of their span.
pub fn rref(universe: &Universe, vectors: &[Gf2Vec]) -> Result<Gf2Subspace> {
    Gf2Subspace::span(universe, vectors.iter().cloned())
}

impl Gf2Subspace {
    pub fn zero(universe: &Universe) -> Self {
        Gf2Subspace {
            universe: universe.clone(),
            basis: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(universe: &Universe) -> Self {
        let basis = (0..universe.len())
            .map(|i| Gf2Vec::from_indices(universe, [i]))
            .collect();
        Gf2Subspace {
            universe: universe.clone(),
            basis,
            pivots: (0..universe.len()).collect(),
        }
    }

    pub fn span<I: IntoIterator<Item = Gf2Vec>>(universe: &Universe, vectors: I) -> Result<Self> {
        let mut space = Gf2Subspace::zero(universe);
        for v in vectors {
            check_same(universe, v.universe())?;
            space.insert_unchecked(v);
        }
        Ok(space)
    }

    /// Adds `v` to the spanning set, keeping the basis fully reduced.
    /// Returns `true` when the dimension grew.
    pub fn insert(&mut self, v: Gf2Vec) -> Result<bool> {
        check_same(&self.universe, v.universe())?;
        Ok(self.insert_unchecked(v))
    }

    fn insert_unchecked(&mut self, v: Gf2Vec) -> bool {
        let r = self.reduce_unchecked(v);
        let Some(p) = r.lowest_set_bit() else {
            return false;
        };
        for row in &mut self.basis {
            if row.get(p) {
                row.add_assign_unchecked(&r);
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.pivots.insert(at, p);
        self.basis.insert(at, r);
        true
    }

    fn reduce_unchecked(&self, mut v: Gf2Vec) -> Gf2Vec {
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            if v.get(p) {
                v.add_assign_unchecked(row);
            }
        }
        v
    }

    /// Residual of `v` after clearing every pivot coordinate.
    pub fn reduce(&self, v: &Gf2Vec) -> Result<Gf2Vec> {
        check_same(&self.universe, v.universe())?;
        Ok(self.reduce_unchecked(v.clone()))
    }

    pub fn contains(&self, v: &Gf2Vec) -> Result<bool> {
        Ok(self.reduce(v)?.is_zero())
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn basis(&self) -> &[Gf2Vec] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// `{w : ⟨w, v⟩ = 0 for all v in self}`.
    pub fn dual(&self) -> Gf2Subspace {
        let n = self.universe.len();
        let mut is_pivot = vec![false; n];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        let vectors = (0..n).filter(|&f| !is_pivot[f]).map(|f| {
            let mut v = Gf2Vec::from_indices(&self.universe, [f]);
            for (row, &p) in self.basis.iter().zip(&self.pivots) {
                if row.get(f) {
                    v.flip(p);
                }
            }
            v
        });
        Gf2Subspace::span(&self.universe, vectors.collect::<Vec<_>>())
            .expect("dual vectors share the universe")
    }

    pub fn sum(&self, other: &Gf2Subspace) -> Result<Gf2Subspace> {
        check_same(&self.universe, &other.universe)?;
        let mut out = self.clone();
        for v in &other.basis {
            out.insert_unchecked(v.clone());
        }
        Ok(out)
    }

    pub fn is_subspace_of(&self, other: &Gf2Subspace) -> Result<bool> {
        check_same(&self.universe, &other.universe)?;
        Ok(self.basis.iter().all(|v| other.reduce_unchecked(v.clone()).is_zero()))
    }

    /// Reduced echelon bases are unique, so equality is basis equality.
    pub fn same_space(&self, other: &Gf2Subspace) -> bool {
        self.universe == other.universe && self.basis == other.basis
    }

    /// Every element, if there are at most `budget` of them.
    pub fn elements(&self, budget: u64) -> Result<Vec<Gf2Vec>> {
        self.check_enumerable(budget)?;
        let mut out = Vec::with_capacity(1 << self.dim());
        let mut cur = Gf2Vec::zero(&self.universe);
        out.push(cur.clone());
        for k in 1u64..(1u64 << self.dim()) {
            cur.add_assign_unchecked(&self.basis[k.trailing_zeros() as usize]);
            out.push(cur.clone());
        }
        Ok(out)
    }

    fn check_enumerable(&self, budget: u64) -> Result<()> {
        if self.dim() >= 63 || (1u64 << self.dim()) > budget {
            return Err(Error::capacity(
                "coset",
                budget,
                format!("subspace of dimension {} has 2^{} elements", self.dim(), self.dim()),
            ));
        }
        Ok(())
    }

    /// Minimum-weight element of `v + self`, ties broken lexicographically.
    pub fn coset_leader(&self, v: &Gf2Vec, budget: u64) -> Result<Gf2Vec> {
        check_same(&self.universe, v.universe())?;
        self.check_enumerable(budget)?;
        let mut cur = v.clone();
        let mut best = cur.clone();
        let mut best_w = best.weight();
        for k in 1u64..(1u64 << self.dim()) {
            cur.add_assign_unchecked(&self.basis[k.trailing_zeros() as usize]);
            let w = cur.weight();
            if w < best_w || (w == best_w && cur.lex_cmp(&best) == Ordering::Less) {
                best_w = w;
                best = cur.clone();
            }
        }
        Ok(best)
    }

    /// Minimum Hamming weight over `v + self`, i.e. the quotient Hamming
    /// distance from the zero coset to `v + self`.
    pub fn coset_min_weight(&self, v: &Gf2Vec, budget: u64) -> Result<usize> {
        check_same(&self.universe, v.universe())?;
        self.check_enumerable(budget)?;
        let mut cur = v.clone();
        let mut best = cur.weight();
        for k in 1u64..(1u64 << self.dim()) {
            if best == 0 {
                break;
            }
            cur.add_assign_unchecked(&self.basis[k.trailing_zeros() as usize]);
            best = best.min(cur.weight());
        }
        Ok(best)
    }

    /// Text form: `d=<n>` followed by one basis row per line.
    pub fn to_text(&self) -> String {
        let mut s = format!("d={}\n", self.universe.len());
        for row in &self.basis {
            s.push_str(&row.to_bit_string());
            s.push('\n');
        }
        s
    }

    /// Parses [`Gf2Subspace::to_text`] output. Rows need not be reduced; the
    /// universe is `0..d`.
    pub fn from_text(text: &str) -> Result<Gf2Subspace> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hl, header) = lines.next().ok_or_else(|| Error::parse(1, "missing `d=<n>` header"))?;
        let d: usize = header
            .strip_prefix("d=")
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| Error::parse(hl, format!("expected `d=<n>`, found {header:?}")))?;
        let universe = Universe::indexed(d);
        let mut rows = Vec::new();
        for (ln, line) in lines {
            let v = Gf2Vec::parse(&universe, line).map_err(|e| Error::parse(ln, e.to_string()))?;
            rows.push(v);
        }
        Gf2Subspace::span(&universe, rows)
    }
}

/// A vector in `Z₆^universe`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Z6Vec {
    entries: Vec<u8>,
}

impl Z6Vec {
    pub fn zero(n: usize) -> Self {
        Z6Vec { entries: vec![0; n] }
    }

    /// Entries are reduced mod 6.
    pub fn new<I: IntoIterator<Item = u8>>(entries: I) -> Self {
        Z6Vec {
            entries: entries.into_iter().map(|e| e % 6).collect(),
        }
    }

    /// The standard generator `e_i`.
    pub fn basis(n: usize, i: usize) -> Self {
        let mut v = Z6Vec::zero(n);
        v.entries[i] = 1;
        v
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[u8] {
        &self.entries
    }

    pub fn get(&self, i: usize) -> u8 {
        self.entries[i]
    }

    pub fn set(&mut self, i: usize, value: u8) {
        self.entries[i] = value % 6;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| *e == 0)
    }

    pub fn try_add(&self, other: &Z6Vec) -> Result<Z6Vec> {
        self.zip_with(other, |a, b| (a + b) % 6)
    }

    pub fn try_sub(&self, other: &Z6Vec) -> Result<Z6Vec> {
        self.zip_with(other, |a, b| (a + 6 - b) % 6)
    }

    fn zip_with(&self, other: &Z6Vec, f: impl Fn(u8, u8) -> u8) -> Result<Z6Vec> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch(format!(
                "Z6 vectors of length {} and {}",
                self.len(),
                other.len()
            )));
        }
        Ok(Z6Vec::new(self.entries.iter().zip(&other.entries).map(|(a, b)| f(*a, *b))))
    }

    pub fn neg(&self) -> Z6Vec {
        Z6Vec::new(self.entries.iter().map(|e| (6 - e) % 6))
    }

    /// Per-coordinate cyclic word length `min(k, 6-k)`, summed.
    pub fn word_length(&self) -> u32 {
        self.entries.iter().map(|&k| z6_weight(k)).sum()
    }

    /// Hamming metric on `Z₆^I` with the cycle metric on each factor.
    pub fn hamming_distance(&self, other: &Z6Vec) -> u32 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| z6_weight((a + 6 - b) % 6))
            .sum()
    }

    /// Parity pattern `w̄` as a vector over `universe`.
    pub fn reduce_mod2(&self, universe: &Universe) -> Result<Gf2Vec> {
        if universe.len() != self.len() {
            return Err(Error::DimensionMismatch(format!(
                "Z6 vector of length {} reduced into universe of length {}",
                self.len(),
                universe.len()
            )));
        }
        Ok(Gf2Vec::from_indices(
            universe,
            self.entries.iter().enumerate().filter(|(_, e)| *e % 2 == 1).map(|(i, _)| i),
        ))
    }

    /// Parity pattern as a bitmask, coordinate `i` at bit `i`. Requires `len <= 64`.
    pub fn parity_mask(&self) -> u64 {
        debug_assert!(self.len() <= 64);
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, e)| *e % 2 == 1)
            .fold(0, |m, (i, _)| m | (1 << i))
    }

    /// Mixed-radix index, coordinate 0 most significant.
    pub fn index(&self) -> usize {
        self.entries.iter().fold(0, |acc, &e| acc * 6 + e as usize)
    }

    pub fn from_index(n: usize, mut index: usize) -> Z6Vec {
        let mut entries = vec![0u8; n];
        for slot in entries.iter_mut().rev() {
            *slot = (index % 6) as u8;
            index /= 6;
        }
        Z6Vec { entries }
    }

    /// All of `Z₆^n` in index order.
    pub fn enumerate_all(n: usize) -> impl Iterator<Item = Z6Vec> {
        (0..6usize.pow(n as u32)).map(move |i| Z6Vec::from_index(n, i))
    }
}

impl fmt::Debug for Z6Vec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z6{}", self)
    }
}

impl fmt::Display for Z6Vec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str(")")
    }
}

/// Word length of `k` in `Z₆` with generators `±1`.
pub fn z6_weight(k: u8) -> u32 {
    let k = (k % 6) as u32;
    k.min(6 - k)
}

/// Coordinatewise parity map `Z₆^I → Z₂^I`.
pub fn z6_reduce_mod2(w: &Z6Vec, universe: &Universe) -> Result<Gf2Vec> {
    w.reduce_mod2(universe)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn v(u: &Universe, s: &str) -> Gf2Vec {
        Gf2Vec::parse(u, s).unwrap()
    }

    fn brute_span(u: &Universe, gens: &[Gf2Vec]) -> Vec<Gf2Vec> {
        let mut out = Vec::new();
        for mask in 0u32..(1 << gens.len()) {
            let mut acc = Gf2Vec::zero(u);
            for (i, g) in gens.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    acc = &acc + g;
                }
            }
            if !out.contains(&acc) {
                out.push(acc);
            }
        }
        out.sort();
        out
    }

    fn all_vectors(u: &Universe) -> Vec<Gf2Vec> {
        (0u64..(1 << u.len()))
            .map(|m| Gf2Vec::from_indices(u, (0..u.len()).filter(|i| m >> i & 1 == 1)))
            .collect()
    }

    fn random_space(rng: &mut ChaCha8Rng, u: &Universe) -> Gf2Subspace {
        let k = rng.random_range(0..=u.len());
        let gens: Vec<_> = (0..k)
            .map(|_| Gf2Vec::from_indices(u, (0..u.len()).filter(|_| rng.random_bool(0.5))))
            .collect();
        rref(u, &gens).unwrap()
    }

    #[test]
    fn rref_of_zero_vector_is_zero_space() {
        let u = Universe::indexed(3);
        assert_eq!(rref(&u, &[v(&u, "000")]).unwrap().dim(), 0);
    }

    #[test]
    fn rref_drops_dependent_row() {
        let u = Universe::indexed(3);
        let gens = [v(&u, "110"), v(&u, "011"), v(&u, "101")];
        let s = rref(&u, &gens).unwrap();
        // brute force: the span has 4 elements
        assert_eq!(brute_span(&u, &gens).len(), 4);
        assert_eq!(s.dim(), 2);
    }

    #[test]
    fn rref_is_idempotent() {
        let u = Universe::indexed(5);
        let gens = [v(&u, "11010"), v(&u, "01101"), v(&u, "10111")];
        let s = rref(&u, &gens).unwrap();
        let t = rref(&u, s.basis()).unwrap();
        assert!(s.same_space(&t));
        assert_eq!(s.basis(), t.basis());
    }

    #[test]
    fn rref_rejects_mixed_universes() {
        let a = Universe::indexed(3);
        let b = Universe::indexed(4);
        let err = rref(&a, &[v(&a, "110"), v(&b, "1100")]).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch(_)));
    }

    #[test]
    fn dual_of_full_space_is_zero() {
        let u = Universe::indexed(3);
        assert_eq!(Gf2Subspace::full(&u).dual().dim(), 0);
    }

    #[test]
    fn dual_of_all_ones_is_even_weight_code() {
        let u = Universe::indexed(3);
        let s = rref(&u, &[v(&u, "111")]).unwrap();
        let dual = s.dual();
        let expected: Vec<_> = all_vectors(&u)
            .into_iter()
            .filter(|w| !w.dot(&v(&u, "111")).unwrap())
            .collect();
        let mut expected = expected;
        expected.sort();
        let mut got = dual.elements(16).unwrap();
        got.sort();
        assert_eq!(got, expected);
        assert_eq!(
            got.iter().map(|g| g.to_bit_string()).collect::<Vec<_>>(),
            ["000", "011", "101", "110"]
        );
    }

    #[test]
    fn rank_nullity_and_involution_on_random_spaces() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let d = rng.random_range(1..=12);
            let u = Universe::indexed(d);
            let s = random_space(&mut rng, &u);
            let dual = s.dual();
            assert_eq!(s.dim() + dual.dim(), d);
            assert!(dual.dual().same_space(&s));
            for b in dual.basis() {
                for a in s.basis() {
                    assert!(!a.dot(b).unwrap());
                }
            }
        }
    }

    #[test]
    fn membership_matches_span_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..30 {
            let d = rng.random_range(1..=8);
            let u = Universe::indexed(d);
            let gens: Vec<_> = (0..rng.random_range(0..4))
                .map(|_| Gf2Vec::from_indices(&u, (0..d).filter(|_| rng.random_bool(0.5))))
                .collect();
            let s = rref(&u, &gens).unwrap();
            let span = brute_span(&u, &gens);
            for w in all_vectors(&u) {
                assert_eq!(s.contains(&w).unwrap(), span.contains(&w));
            }
        }
    }

    #[test]
    fn coset_min_weight_examples() {
        let u3 = Universe::indexed(3);
        assert_eq!(Gf2Subspace::zero(&u3).coset_min_weight(&v(&u3, "101"), 16).unwrap(), 2);
        let u2 = Universe::indexed(2);
        let s = rref(&u2, &[v(&u2, "11")]).unwrap();
        // coset {10, 01}
        assert_eq!(s.coset_min_weight(&v(&u2, "10"), 16).unwrap(), 1);
        assert_eq!(s.coset_min_weight(&v(&u2, "11"), 16).unwrap(), 0);
        assert_eq!(s.coset_leader(&v(&u2, "10"), 16).unwrap().to_bit_string(), "01");
    }

    #[test]
    fn coset_enumeration_respects_budget() {
        let u = Universe::indexed(6);
        let err = Gf2Subspace::full(&u).coset_min_weight(&Gf2Vec::zero(&u), 32).unwrap_err();
        match err {
            Error::Capacity { budget, limit, .. } => {
                assert_eq!(budget, "coset");
                assert_eq!(limit, 32);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn coset_min_weight_is_class_function() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..40 {
            let d = rng.random_range(1..=10);
            let u = Universe::indexed(d);
            let s = random_space(&mut rng, &u);
            let w = Gf2Vec::from_indices(&u, (0..d).filter(|_| rng.random_bool(0.5)));
            let base = s.coset_min_weight(&w, DEFAULT_COSET_BUDGET).unwrap();
            for b in s.basis() {
                assert_eq!(s.coset_min_weight(&(&w + b), DEFAULT_COSET_BUDGET).unwrap(), base);
            }
        }
    }

    #[test]
    fn z6_parity_examples_and_homomorphism() {
        let u = Universe::indexed(2);
        assert_eq!(Z6Vec::new([0, 3]).reduce_mod2(&u).unwrap().to_bit_string(), "01");
        assert_eq!(Z6Vec::new([2, 5]).reduce_mod2(&u).unwrap().to_bit_string(), "01");
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let u5 = Universe::indexed(5);
        for _ in 0..100 {
            let a = Z6Vec::new((0..5).map(|_| rng.random_range(0..6u8)));
            let b = Z6Vec::new((0..5).map(|_| rng.random_range(0..6u8)));
            let lhs = a.try_add(&b).unwrap().reduce_mod2(&u5).unwrap();
            let rhs = &a.reduce_mod2(&u5).unwrap() + &b.reduce_mod2(&u5).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn z6_word_length_is_cycle_metric() {
        for k in 0..6u8 {
            assert_eq!(Z6Vec::new([k]).word_length(), (k as u32).min(6 - k as u32));
        }
        assert_eq!(Z6Vec::new([1, 3, 5]).hamming_distance(&Z6Vec::new([0, 0, 0])), 5);
    }

    #[test]
    fn z6_index_round_trip() {
        for i in 0..216 {
            assert_eq!(Z6Vec::from_index(3, i).index(), i);
        }
    }

    #[test]
    fn text_format_round_trips() {
        let u = Universe::indexed(5);
        let s = rref(&u, &[v(&u, "11111"), v(&u, "11000")]).unwrap();
        let text = s.to_text();
        assert!(text.starts_with("d=5\n"));
        let back = Gf2Subspace::from_text(&text).unwrap();
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn text_format_reports_line_of_bad_row() {
        let err = Gf2Subspace::from_text("d=3\n110\n1x0\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err:?}");
    }

    #[test]
    fn lex_order_puts_low_coordinates_first() {
        let u = Universe::indexed(3);
        assert_eq!(v(&u, "011").lex_cmp(&v(&u, "100")), Ordering::Less);
        assert_eq!(v(&u, "110").lex_cmp(&v(&u, "101")), Ordering::Greater);
    }
}
