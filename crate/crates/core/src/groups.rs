//! Finitely generated groups with fixed symmetric generating sets.
//!
//! Wreath products `K ≀ H` use the multiplication rule
//! `(k₁, h₁)·(k₂, h₂) = (k₁(· h₂⁻¹) + k₂, h₁h₂)`: the first lamp
//! configuration is shifted by the second cursor. Under this rule a lamp
//! generator multiplied on the left toggles the lamp under the cursor, so
//! words read right-to-left are lamplighter walks.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use indexmap::IndexMap;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::gf2::{Gf2Subspace, Gf2Vec, DEFAULT_COSET_BUDGET};

/// Default bound on the number of elements a BFS ball may hold.
pub const DEFAULT_BFS_BUDGET: usize = 2_000_000;

#[derive(Clone, Debug)]
pub enum GroupKind {
    /// `Z` with generators `±1`.
    Integers,
    /// `Z_n` with generators `±1`.
    Cyclic { order: u32 },
    /// `Z_k ≀ Z` with the lamp generator(s) `±δ₀` and cursor moves `±1`.
    LamplighterLine { lamp_order: u8 },
    /// `(Z_k^{Z_m} / V) ⋊ Z_m`. A quotient is only supported for `k = 2`, and
    /// lamp parts are then canonical coset representatives of `V`.
    LamplighterCycle {
        lamp_order: u8,
        base_order: u32,
        quotient: Option<Gf2Subspace>,
    },
}

/// Canonical payload of a group element.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum ElemPayload {
    Int(i64),
    Cyclic(u32),
    /// Nonzero lamp values keyed by position, and the cursor.
    Lamps { lamps: BTreeMap<i64, u8>, cursor: i64 },
    /// Lamp values over `Z_m` (index = position), and the cursor.
    CycleLamps { lamps: Vec<u8>, cursor: u32 },
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct GroupElem {
    group: u64,
    payload: ElemPayload,
}

impl GroupElem {
    pub fn payload(&self) -> &ElemPayload {
        &self.payload
    }

    pub fn into_payload(self) -> ElemPayload {
        self.payload
    }
}

impl fmt::Display for GroupElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.payload {
            ElemPayload::Int(n) => write!(f, "{n}"),
            ElemPayload::Cyclic(n) => write!(f, "{n}"),
            ElemPayload::Lamps { lamps, cursor } => {
                f.write_str("[")?;
                for (i, (pos, val)) in lamps.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{pos}:{val}")?;
                }
                write!(f, "]@{cursor}")
            }
            ElemPayload::CycleLamps { lamps, cursor } => {
                f.write_str("[")?;
                for v in lamps {
                    write!(f, "{v}")?;
                }
                write!(f, "]@{cursor}")
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct GroupPresentation {
    name: String,
    id: u64,
    kind: GroupKind,
}

fn name_id(name: &str) -> u64 {
    let digest = Sha256::digest(name.as_bytes());
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

fn modulo(a: i64, m: u32) -> u32 {
    a.rem_euclid(m as i64) as u32
}

impl GroupPresentation {
    pub fn integers() -> Self {
        Self::from_kind("Z".into(), GroupKind::Integers)
    }

    pub fn cyclic(order: u32) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidInput("cyclic group of order 0".into()));
        }
        Ok(Self::from_kind(format!("Z{order}"), GroupKind::Cyclic { order }))
    }

    /// `Z_k ≀ Z`.
    pub fn lamplighter(lamp_order: u8) -> Result<Self> {
        if lamp_order < 2 {
            return Err(Error::InvalidInput("lamp group must have order at least 2".into()));
        }
        Ok(Self::from_kind(
            format!("Z{lamp_order}wrZ"),
            GroupKind::LamplighterLine { lamp_order },
        ))
    }

    /// `Z_k ≀ Z_m`.
    pub fn lamplighter_cycle(lamp_order: u8, base_order: u32) -> Result<Self> {
        if lamp_order < 2 || base_order == 0 {
            return Err(Error::InvalidInput("invalid lamp or base order".into()));
        }
        Ok(Self::from_kind(
            format!("Z{lamp_order}wrZ{base_order}"),
            GroupKind::LamplighterCycle {
                lamp_order,
                base_order,
                quotient: None,
            },
        ))
    }

    /// `(Z₂^{Z_m} / V) ⋊ Z_m` for a translation-invariant `V`.
    pub fn lamplighter_cycle_quotient(base_order: u32, v: Gf2Subspace) -> Result<Self> {
        if v.universe().len() != base_order as usize {
            return Err(Error::DimensionMismatch(format!(
                "quotient subspace over {} coordinates for base Z{base_order}",
                v.universe().len()
            )));
        }
        let m = base_order as usize;
        for b in v.basis() {
            let shifted = Gf2Vec::from_indices(v.universe(), b.support().map(|i| (i + 1) % m));
            if !v.contains(&shifted)? {
                return Err(Error::InvalidInput(
                    "quotient subspace is not translation invariant".into(),
                ));
            }
        }
        let tag: String = v.basis().iter().map(|b| b.to_bit_string()).collect::<Vec<_>>().join(",");
        Ok(Self::from_kind(
            format!("(Z2^Z{base_order}/<{tag}>)xZ{base_order}"),
            GroupKind::LamplighterCycle {
                lamp_order: 2,
                base_order,
                quotient: Some(v),
            },
        ))
    }

    fn from_kind(name: String, kind: GroupKind) -> Self {
        GroupPresentation {
            id: name_id(&name),
            name,
            kind,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &GroupKind {
        &self.kind
    }

    fn wrap(&self, payload: ElemPayload) -> GroupElem {
        GroupElem {
            group: self.id,
            payload,
        }
    }

    fn check(&self, a: &GroupElem) -> Result<()> {
        if a.group != self.id {
            return Err(Error::CrossPresentation {
                left: self.name.clone(),
                right: format!("element {a}"),
            });
        }
        Ok(())
    }

    pub fn identity(&self) -> GroupElem {
        let payload = match &self.kind {
            GroupKind::Integers => ElemPayload::Int(0),
            GroupKind::Cyclic { .. } => ElemPayload::Cyclic(0),
            GroupKind::LamplighterLine { .. } => ElemPayload::Lamps {
                lamps: BTreeMap::new(),
                cursor: 0,
            },
            GroupKind::LamplighterCycle { base_order, .. } => ElemPayload::CycleLamps {
                lamps: vec![0; *base_order as usize],
                cursor: 0,
            },
        };
        self.wrap(payload)
    }

    /// Builds an element of `Z` or `Z_n`.
    pub fn base_elem(&self, n: i64) -> Result<GroupElem> {
        match &self.kind {
            GroupKind::Integers => Ok(self.wrap(ElemPayload::Int(n))),
            GroupKind::Cyclic { order } => Ok(self.wrap(ElemPayload::Cyclic(modulo(n, *order)))),
            _ => Err(Error::InvalidInput(format!("{} is not a cyclic group", self.name))),
        }
    }

    /// Builds a lamplighter element from lamp values and a cursor.
    pub fn lamp_elem<I: IntoIterator<Item = (i64, i64)>>(&self, lamps: I, cursor: i64) -> Result<GroupElem> {
        match &self.kind {
            GroupKind::LamplighterLine { lamp_order } => {
                let k = *lamp_order as u32;
                let mut map = BTreeMap::new();
                for (pos, val) in lamps {
                    let e: &mut u8 = map.entry(pos).or_insert(0);
                    *e = ((*e as u32 + modulo(val, k)) % k) as u8;
                }
                map.retain(|_, v| *v != 0);
                Ok(self.wrap(ElemPayload::Lamps { lamps: map, cursor }))
            }
            GroupKind::LamplighterCycle {
                lamp_order, base_order, ..
            } => {
                let k = *lamp_order as u32;
                let mut v = vec![0u8; *base_order as usize];
                for (pos, val) in lamps {
                    let slot = &mut v[modulo(pos, *base_order) as usize];
                    *slot = ((*slot as u32 + modulo(val, k)) % k) as u8;
                }
                let lamps = self.canonical_lamps(v)?;
                Ok(self.wrap(ElemPayload::CycleLamps {
                    lamps,
                    cursor: modulo(cursor, *base_order),
                }))
            }
            _ => Err(Error::InvalidInput(format!("{} has no lamps", self.name))),
        }
    }

    fn canonical_lamps(&self, lamps: Vec<u8>) -> Result<Vec<u8>> {
        let GroupKind::LamplighterCycle {
            quotient: Some(v), ..
        } = &self.kind
        else {
            return Ok(lamps);
        };
        let u = v.universe();
        let raw = Gf2Vec::from_indices(u, lamps.iter().enumerate().filter(|(_, x)| **x == 1).map(|(i, _)| i));
        let leader = v.coset_leader(&raw, DEFAULT_COSET_BUDGET)?;
        let mut out = vec![0u8; lamps.len()];
        for i in leader.support() {
            out[i] = 1;
        }
        Ok(out)
    }

    /// Symmetric generating set, closed under inverses and without duplicates.
    pub fn generators(&self) -> Vec<GroupElem> {
        let mut gens = match &self.kind {
            GroupKind::Integers => vec![ElemPayload::Int(1), ElemPayload::Int(-1)],
            GroupKind::Cyclic { order } => {
                vec![ElemPayload::Cyclic(1 % order), ElemPayload::Cyclic(modulo(-1, *order))]
            }
            GroupKind::LamplighterLine { lamp_order } => {
                let mut g = vec![ElemPayload::Lamps {
                    lamps: BTreeMap::from([(0, 1)]),
                    cursor: 0,
                }];
                if *lamp_order > 2 {
                    g.push(ElemPayload::Lamps {
                        lamps: BTreeMap::from([(0, lamp_order - 1)]),
                        cursor: 0,
                    });
                }
                g.push(ElemPayload::Lamps {
                    lamps: BTreeMap::new(),
                    cursor: 1,
                });
                g.push(ElemPayload::Lamps {
                    lamps: BTreeMap::new(),
                    cursor: -1,
                });
                g
            }
            GroupKind::LamplighterCycle {
                lamp_order, base_order, ..
            } => {
                let m = *base_order as usize;
                let mut g = Vec::new();
                let mut delta = vec![0u8; m];
                delta[0] = 1;
                g.push(ElemPayload::CycleLamps {
                    lamps: self.canonical_lamps(delta.clone()).expect("generator canonicalizes"),
                    cursor: 0,
                });
                if *lamp_order > 2 {
                    delta[0] = lamp_order - 1;
                    g.push(ElemPayload::CycleLamps {
                        lamps: delta,
                        cursor: 0,
                    });
                }
                for c in [1 % base_order, modulo(-1, *base_order)] {
                    g.push(ElemPayload::CycleLamps {
                        lamps: vec![0; m],
                        cursor: c,
                    });
                }
                g
            }
        };
        let mut seen = Vec::new();
        gens.retain(|g| {
            if seen.contains(g) {
                false
            } else {
                seen.push(g.clone());
                true
            }
        });
        gens.into_iter().map(|p| self.wrap(p)).collect()
    }

    /// Stable fingerprint of the generating set.
    pub fn generator_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.name.as_bytes());
        for g in self.generators() {
            h.update(b"|");
            h.update(g.to_string().as_bytes());
        }
        h.finalize().iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    pub fn multiply(&self, a: &GroupElem, b: &GroupElem) -> Result<GroupElem> {
        self.check(a)?;
        self.check(b)?;
        let payload = match (&self.kind, &a.payload, &b.payload) {
            (GroupKind::Integers, ElemPayload::Int(x), ElemPayload::Int(y)) => ElemPayload::Int(x + y),
            (GroupKind::Cyclic { order }, ElemPayload::Cyclic(x), ElemPayload::Cyclic(y)) => {
                ElemPayload::Cyclic((x + y) % order)
            }
            (
                GroupKind::LamplighterLine { lamp_order },
                ElemPayload::Lamps { lamps: l1, cursor: h1 },
                ElemPayload::Lamps { lamps: l2, cursor: h2 },
            ) => {
                let k = *lamp_order;
                let mut out: BTreeMap<i64, u8> = l2.clone();
                // (k₁ shifted by h₂)[h] = k₁[h - h₂]
                for (&pos, &val) in l1 {
                    let e = out.entry(pos + h2).or_insert(0);
                    *e = (*e + val) % k;
                }
                out.retain(|_, v| *v != 0);
                ElemPayload::Lamps {
                    lamps: out,
                    cursor: h1 + h2,
                }
            }
            (
                GroupKind::LamplighterCycle {
                    lamp_order, base_order, ..
                },
                ElemPayload::CycleLamps { lamps: l1, cursor: h1 },
                ElemPayload::CycleLamps { lamps: l2, cursor: h2 },
            ) => {
                let m = *base_order as usize;
                let mut out = l2.clone();
                for (pos, &val) in l1.iter().enumerate() {
                    let slot = &mut out[(pos + *h2 as usize) % m];
                    *slot = (*slot + val) % lamp_order;
                }
                ElemPayload::CycleLamps {
                    lamps: self.canonical_lamps(out)?,
                    cursor: (h1 + h2) % base_order,
                }
            }
            _ => {
                return Err(Error::InvalidInput(format!("malformed element for {}", self.name)));
            }
        };
        Ok(self.wrap(payload))
    }

    pub fn inverse(&self, a: &GroupElem) -> Result<GroupElem> {
        self.check(a)?;
        let payload = match (&self.kind, &a.payload) {
            (GroupKind::Integers, ElemPayload::Int(x)) => ElemPayload::Int(-x),
            (GroupKind::Cyclic { order }, ElemPayload::Cyclic(x)) => ElemPayload::Cyclic((order - x) % order),
            (GroupKind::LamplighterLine { lamp_order }, ElemPayload::Lamps { lamps, cursor }) => {
                // (k, h)⁻¹ = (-k(· + h), -h)
                let k = *lamp_order;
                ElemPayload::Lamps {
                    lamps: lamps.iter().map(|(&p, &v)| (p - cursor, (k - v) % k)).collect(),
                    cursor: -cursor,
                }
            }
            (
                GroupKind::LamplighterCycle {
                    lamp_order, base_order, ..
                },
                ElemPayload::CycleLamps { lamps, cursor },
            ) => {
                let m = *base_order as usize;
                let mut out = vec![0u8; m];
                for (pos, &v) in lamps.iter().enumerate() {
                    out[(pos + m - *cursor as usize) % m] = (lamp_order - v) % lamp_order;
                }
                ElemPayload::CycleLamps {
                    lamps: self.canonical_lamps(out)?,
                    cursor: (base_order - cursor) % base_order,
                }
            }
            _ => return Err(Error::InvalidInput(format!("malformed element for {}", self.name))),
        };
        Ok(self.wrap(payload))
    }

    /// Word length by closed form, when one is known for this presentation.
    pub fn closed_form_length(&self, a: &GroupElem) -> Option<u64> {
        if a.group != self.id {
            return None;
        }
        match (&self.kind, &a.payload) {
            (GroupKind::Integers, ElemPayload::Int(x)) => Some(x.unsigned_abs()),
            (GroupKind::Cyclic { order }, ElemPayload::Cyclic(x)) => Some((*x).min(order - x) as u64),
            (GroupKind::LamplighterLine { lamp_order }, ElemPayload::Lamps { lamps, cursor }) => Some(
                lamplighter_distance(
                    lamps.iter().map(|(&p, &v)| (p, cyclic_weight(v, *lamp_order))),
                    *cursor,
                ),
            ),
            _ => None,
        }
    }

    /// Parses the [`fmt::Display`] encoding of an element.
    pub fn parse_elem(&self, s: &str) -> Result<GroupElem> {
        let s = s.trim();
        let bad = || Error::InvalidInput(format!("cannot parse {s:?} as an element of {}", self.name));
        match &self.kind {
            GroupKind::Integers | GroupKind::Cyclic { .. } => self.base_elem(s.parse().map_err(|_| bad())?),
            GroupKind::LamplighterLine { .. } => {
                let (body, cursor) = split_lamp_encoding(s).ok_or_else(bad)?;
                let mut lamps = Vec::new();
                for part in body.split(',').filter(|p| !p.is_empty()) {
                    let (p, v) = part.split_once(':').ok_or_else(bad)?;
                    lamps.push((p.trim().parse().map_err(|_| bad())?, v.trim().parse().map_err(|_| bad())?));
                }
                self.lamp_elem(lamps, cursor)
            }
            GroupKind::LamplighterCycle { base_order, .. } => {
                let (body, cursor) = split_lamp_encoding(s).ok_or_else(bad)?;
                if body.chars().count() != *base_order as usize {
                    return Err(bad());
                }
                let lamps = body
                    .chars()
                    .enumerate()
                    .map(|(i, c)| c.to_digit(10).map(|d| (i as i64, d as i64)).ok_or_else(bad))
                    .collect::<Result<Vec<_>>>()?;
                self.lamp_elem(lamps, cursor)
            }
        }
    }

    /// Word distance `|a⁻¹ b|` by closed form, if available.
    pub fn closed_form_distance(&self, a: &GroupElem, b: &GroupElem) -> Result<Option<u64>> {
        let g = self.multiply(&self.inverse(a)?, b)?;
        Ok(self.closed_form_length(&g))
    }
}

fn split_lamp_encoding(s: &str) -> Option<(&str, i64)> {
    let rest = s.strip_prefix('[')?;
    let (body, tail) = rest.split_once(']')?;
    let cursor = tail.strip_prefix('@')?.trim().parse().ok()?;
    Some((body, cursor))
}

/// Word length of `v` in `Z_k` with generators `±1`.
pub fn cyclic_weight(v: u8, k: u8) -> u32 {
    let v = (v % k) as u32;
    v.min(k as u32 - v)
}

/// Word length of `(lamps, target)` in `K ≀ Z`: total lamp weight plus the
/// shortest walk from 0 covering every lit position and ending at `target`.
pub fn lamplighter_distance<I: IntoIterator<Item = (i64, u32)>>(lamps: I, target: i64) -> u64 {
    let mut lo = 0i64.min(target);
    let mut hi = 0i64.max(target);
    let mut weight = 0u64;
    for (pos, w) in lamps {
        if w == 0 {
            continue;
        }
        weight += w as u64;
        lo = lo.min(pos);
        hi = hi.max(pos);
    }
    let left_first = (0 - lo) + (hi - target);
    let right_first = (hi - 0) + (target - lo);
    weight + ((hi - lo) + left_first.min(right_first)) as u64
}

/// Exact word-metric ball around the identity.
#[derive(Clone, Debug)]
pub struct WordBall {
    center: GroupElem,
    radius: u32,
    dist: IndexMap<GroupElem, u32>,
}

impl WordBall {
    pub fn center(&self) -> &GroupElem {
        &self.center
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }

    pub fn distance(&self, g: &GroupElem) -> Option<u32> {
        self.dist.get(g).copied()
    }

    /// Elements in BFS discovery order.
    pub fn iter(&self) -> impl Iterator<Item = (&GroupElem, u32)> {
        self.dist.iter().map(|(g, d)| (g, *d))
    }

    pub fn count_within(&self, r: u32) -> usize {
        self.dist.values().filter(|&&d| d <= r).count()
    }
}

/// Breadth-first search from the identity, stepping by left multiplication
/// with each generator in order.
pub fn word_ball(g: &GroupPresentation, radius: u32, budget: usize) -> Result<WordBall> {
    let gens = g.generators();
    let e = g.identity();
    let mut dist = IndexMap::new();
    dist.insert(e.clone(), 0u32);
    let mut frontier_start = 0;
    for level in 0..radius {
        let frontier_end = dist.len();
        if frontier_start == frontier_end {
            break;
        }
        for idx in frontier_start..frontier_end {
            let x = dist.get_index(idx).expect("index in range").0.clone();
            for s in &gens {
                let y = g.multiply(s, &x)?;
                if !dist.contains_key(&y) {
                    if dist.len() >= budget {
                        return Err(Error::capacity(
                            "bfs",
                            budget as u64,
                            format!("ball of {} exceeded the element budget while completing radius {}", g.name(), level + 1),
                        ));
                    }
                    dist.insert(y, level + 1);
                }
            }
        }
        frontier_start = frontier_end;
    }
    Ok(WordBall {
        center: e,
        radius,
        dist,
    })
}

/// Distance oracle for one presentation: closed form when available,
/// otherwise lookup of `a⁻¹b` in a precomputed ball.
pub struct WordMetric<'a> {
    group: &'a GroupPresentation,
    ball: Option<&'a WordBall>,
}

impl<'a> WordMetric<'a> {
    pub fn new(group: &'a GroupPresentation, ball: Option<&'a WordBall>) -> Self {
        WordMetric { group, ball }
    }

    pub fn distance(&self, a: &GroupElem, b: &GroupElem) -> Result<u64> {
        let diff = self.group.multiply(&self.group.inverse(a)?, b)?;
        if let Some(d) = self.group.closed_form_length(&diff) {
            return Ok(d);
        }
        match self.ball.and_then(|ball| ball.distance(&diff)) {
            Some(d) => Ok(d as u64),
            None => Err(Error::capacity(
                "bfs",
                self.ball.map_or(0, |b| b.radius() as u64),
                format!("distance from {a} to {b} is outside the computed ball"),
            )),
        }
    }
}

/// Greedy packing inside the annulus `r ≤ |x| ≤ Mr`.
#[derive(Clone, Debug)]
pub struct EquidistantSet {
    pub points: Vec<GroupElem>,
    pub requested: usize,
    /// `false` when fewer than `requested` points exist in the greedy packing.
    pub complete: bool,
}

fn annulus_greedy(
    g: &GroupPresentation,
    ball: &WordBall,
    r: u32,
    m: u32,
    limit: Option<usize>,
) -> Result<(usize, Vec<GroupElem>)> {
    let metric = WordMetric::new(g, Some(ball));
    let mut annulus = 0;
    let mut chosen: Vec<GroupElem> = Vec::new();
    for (x, d) in ball.iter() {
        if d < r || d > m * r {
            continue;
        }
        annulus += 1;
        if limit.is_some_and(|l| chosen.len() >= l) {
            continue;
        }
        let mut ok = true;
        for y in &chosen {
            if metric.distance(y, x)? < r as u64 {
                ok = false;
                break;
            }
        }
        if ok {
            chosen.push(x.clone());
        }
    }
    Ok((annulus, chosen))
}

/// Up to `want` points with pairwise distances and distances to the identity
/// in `[r, 2Mr]`, found by greedy packing in BFS order.
pub fn equidistant_set(g: &GroupPresentation, r: u32, m: u32, want: usize, budget: usize) -> Result<EquidistantSet> {
    check_window_params(r, m)?;
    let ball = word_ball(g, 2 * m * r, budget)?;
    equidistant_set_in(g, &ball, r, m, want)
}

fn check_window_params(r: u32, m: u32) -> Result<()> {
    if r == 0 || m == 0 {
        return Err(Error::InvalidInput("r and M must be positive".into()));
    }
    Ok(())
}

fn check_ball(ball: &WordBall, r: u32, m: u32) -> Result<()> {
    check_window_params(r, m)?;
    if ball.radius() < 2 * m * r {
        return Err(Error::InvalidInput(format!("ball of radius {} is smaller than 2Mr = {}", ball.radius(), 2 * m * r)));
    }
    Ok(())
}

/// [`equidistant_set`] over a precomputed ball of radius at least `2Mr`.
pub fn equidistant_set_in(g: &GroupPresentation, ball: &WordBall, r: u32, m: u32, want: usize) -> Result<EquidistantSet> {
    check_ball(ball, r, m)?;
    if want == 0 {
        return Err(Error::InvalidInput("want must be positive".into()));
    }
    let (_, points) = annulus_greedy(g, ball, r, m, Some(want))?;
    Ok(EquidistantSet {
        complete: points.len() >= want,
        points,
        requested: want,
    })
}

/// Exhaustive check that all pairwise distances and all distances to the
/// identity lie in `[r, 2Mr]`.
pub fn check_equidistant_window(g: &GroupPresentation, points: &[GroupElem], r: u32, m: u32, budget: usize) -> Result<bool> {
    check_window_params(r, m)?;
    let ball = word_ball(g, 2 * m * r, budget)?;
    check_equidistant_window_in(g, &ball, points, r, m)
}

pub fn check_equidistant_window_in(g: &GroupPresentation, ball: &WordBall, points: &[GroupElem], r: u32, m: u32) -> Result<bool> {
    check_ball(ball, r, m)?;
    let metric = WordMetric::new(g, Some(ball));
    let lo = r as u64;
    let hi = 2 * m as u64 * r as u64;
    let e = g.identity();
    for (i, x) in points.iter().enumerate() {
        let d0 = metric.distance(&e, x)?;
        if d0 < lo || d0 > hi {
            return Ok(false);
        }
        for y in &points[i + 1..] {
            let d = metric.distance(x, y)?;
            if d < lo || d > hi {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PackingProfile {
    pub annulus_size: usize,
    pub packing_size: usize,
    pub ball_r_size: usize,
    /// `packing_size^(1/r)`.
    pub growth_constant: f64,
}

pub fn annulus_packing_profile(g: &GroupPresentation, r: u32, m: u32, budget: usize) -> Result<PackingProfile> {
    check_window_params(r, m)?;
    let ball = word_ball(g, 2 * m * r, budget)?;
    annulus_packing_profile_in(g, &ball, r, m)
}

pub fn annulus_packing_profile_in(g: &GroupPresentation, ball: &WordBall, r: u32, m: u32) -> Result<PackingProfile> {
    check_ball(ball, r, m)?;
    let (annulus_size, points) = annulus_greedy(g, ball, r, m, None)?;
    Ok(PackingProfile {
        annulus_size,
        packing_size: points.len(),
        ball_r_size: ball.count_within(r),
        growth_constant: (points.len() as f64).powf(1.0 / r as f64),
    })
}

/// On-disk cache of word balls, one text file per (presentation, generators,
/// radius, tool version).
pub struct BallCache {
    dir: PathBuf,
}

const CACHE_MAGIC: &str = "# wreathbench ball cache";

impl BallCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        BallCache { dir: dir.into() }
    }

    fn key(g: &GroupPresentation, radius: u32) -> String {
        let mut h = Sha256::new();
        h.update(env!("CARGO_PKG_VERSION").as_bytes());
        h.update(g.name().as_bytes());
        h.update(g.generator_hash().as_bytes());
        h.update(radius.to_le_bytes());
        h.finalize().iter().take(12).map(|b| format!("{b:02x}")).collect()
    }

    pub fn path_for(&self, g: &GroupPresentation, radius: u32) -> PathBuf {
        self.dir.join(format!("ball-{}.txt", Self::key(g, radius)))
    }

    /// Returns the cached ball, or computes and stores it. Unreadable or stale
    /// files are recomputed.
    pub fn get_or_compute(&self, g: &GroupPresentation, radius: u32, budget: usize) -> Result<WordBall> {
        let path = self.path_for(g, radius);
        if let Some(ball) = Self::load(&path, g, radius) {
            return Ok(ball);
        }
        let ball = word_ball(g, radius, budget)?;
        fs::create_dir_all(&self.dir).map_err(|e| Error::InvalidInput(format!("cache dir: {e}")))?;
        fs::write(&path, Self::render(g, &ball)).map_err(|e| Error::InvalidInput(format!("cache write: {e}")))?;
        Ok(ball)
    }

    pub fn render(g: &GroupPresentation, ball: &WordBall) -> String {
        let mut s = format!(
            "{CACHE_MAGIC}\nversion={}\npresentation={}\ngenerators={}\nradius={}\n",
            env!("CARGO_PKG_VERSION"),
            g.name(),
            g.generator_hash(),
            ball.radius()
        );
        for (x, d) in ball.iter() {
            s.push_str(&format!("{x}\t{d}\n"));
        }
        s
    }

    fn load(path: &Path, g: &GroupPresentation, radius: u32) -> Option<WordBall> {
        let text = fs::read_to_string(path).ok()?;
        let mut lines = text.lines();
        if lines.next()? != CACHE_MAGIC {
            return None;
        }
        let expect = [
            format!("version={}", env!("CARGO_PKG_VERSION")),
            format!("presentation={}", g.name()),
            format!("generators={}", g.generator_hash()),
            format!("radius={radius}"),
        ];
        for e in &expect {
            if lines.next()? != e {
                return None;
            }
        }
        let mut dist = IndexMap::new();
        for line in lines {
            let (enc, d) = line.split_once('\t')?;
            dist.insert(g.parse_elem(enc).ok()?, d.parse().ok()?);
        }
        Some(WordBall {
            center: g.identity(),
            radius,
            dist,
        })
    }
}

/// Distances of a whole finite group from the identity, keyed by element.
pub fn full_distance_table(g: &GroupPresentation, budget: usize) -> Result<HashMap<GroupElem, u32>> {
    let mut radius = 1;
    loop {
        let ball = word_ball(g, radius, budget)?;
        let grew = ball.iter().any(|(_, d)| d == radius);
        if !grew {
            return Ok(ball.iter().map(|(x, d)| (x.clone(), d)).collect());
        }
        radius *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::Universe;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_lamp_elem(g: &GroupPresentation, rng: &mut ChaCha8Rng, k: i64) -> GroupElem {
        let lamps: Vec<(i64, i64)> = (0..rng.random_range(0..4))
            .map(|_| (rng.random_range(-4..5), rng.random_range(0..k)))
            .collect();
        g.lamp_elem(lamps, rng.random_range(-4..5)).unwrap()
    }

    #[test]
    fn identity_products() {
        let g = GroupPresentation::lamplighter(2).unwrap();
        let e = g.identity();
        assert_eq!(g.multiply(&e, &e).unwrap(), e);
    }

    #[test]
    fn lamp_is_self_inverse_in_z2_wreath() {
        let g = GroupPresentation::lamplighter(2).unwrap();
        let a = g.lamp_elem([(0, 1)], 0).unwrap();
        assert_eq!(g.multiply(&a, &a).unwrap(), g.identity());
    }

    #[test]
    fn semidirect_rule_shifts_first_factor_by_second_cursor() {
        let g = GroupPresentation::lamplighter(6).unwrap();
        // (e₀,1)·(e₀,0): the first factor is shifted by h₂ = 0.
        let a = g.lamp_elem([(0, 1)], 1).unwrap();
        let b = g.lamp_elem([(0, 1)], 0).unwrap();
        assert_eq!(g.multiply(&a, &b).unwrap(), g.lamp_elem([(0, 2)], 1).unwrap());
        // (e₀,0)·(e₀,1): shifted by h₂ = 1, giving e₁ + e₀.
        assert_eq!(g.multiply(&b, &a).unwrap(), g.lamp_elem([(0, 1), (1, 1)], 1).unwrap());
    }

    /// Independent model: `(k, h)` acts on functions `f: Z_N → Z_K` by
    /// `f ↦ f(· - h) + k`, and the product acts as the composite `T_b ∘ T_a`.
    fn affine_action(k: &BTreeMap<i64, u8>, h: i64, f: &[u8], n: i64, lamp: u8) -> Vec<u8> {
        (0..n)
            .map(|x| {
                let shifted = f[(x - h).rem_euclid(n) as usize];
                let add = k
                    .iter()
                    .filter(|(p, _)| p.rem_euclid(n) == x)
                    .map(|(_, v)| *v)
                    .sum::<u8>();
                (shifted + add) % lamp
            })
            .collect()
    }

    #[test]
    fn multiplication_matches_affine_action_model() {
        let g = GroupPresentation::lamplighter(6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let n = 64;
        for _ in 0..200 {
            let a = random_lamp_elem(&g, &mut rng, 6);
            let b = random_lamp_elem(&g, &mut rng, 6);
            let ab = g.multiply(&a, &b).unwrap();
            let f: Vec<u8> = (0..n).map(|_| rng.random_range(0..6)).collect();
            let unpack = |x: &GroupElem| match x.payload() {
                ElemPayload::Lamps { lamps, cursor } => (lamps.clone(), *cursor),
                _ => unreachable!(),
            };
            let (ka, ha) = unpack(&a);
            let (kb, hb) = unpack(&b);
            let (kab, hab) = unpack(&ab);
            let composed = affine_action(&kb, hb, &affine_action(&ka, ha, &f, n, 6), n, 6);
            assert_eq!(composed, affine_action(&kab, hab, &f, n, 6));
        }
    }

    #[test]
    fn group_axioms_on_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for g in [
            GroupPresentation::lamplighter(2).unwrap(),
            GroupPresentation::lamplighter(6).unwrap(),
        ] {
            let e = g.identity();
            for _ in 0..100 {
                let k = if g.name().starts_with("Z6") { 6 } else { 2 };
                let a = random_lamp_elem(&g, &mut rng, k);
                let b = random_lamp_elem(&g, &mut rng, k);
                let c = random_lamp_elem(&g, &mut rng, k);
                let ab_c = g.multiply(&g.multiply(&a, &b).unwrap(), &c).unwrap();
                let a_bc = g.multiply(&a, &g.multiply(&b, &c).unwrap()).unwrap();
                assert_eq!(ab_c, a_bc);
                assert_eq!(g.multiply(&e, &a).unwrap(), a);
                assert_eq!(g.multiply(&a, &e).unwrap(), a);
                assert_eq!(g.multiply(&a, &g.inverse(&a).unwrap()).unwrap(), e);
            }
        }
    }

    #[test]
    fn generators_are_closed_under_inverse() {
        let v = Gf2Subspace::span(&Universe::indexed(4), [Gf2Vec::ones(&Universe::indexed(4))]).unwrap();
        for g in [
            GroupPresentation::integers(),
            GroupPresentation::cyclic(6).unwrap(),
            GroupPresentation::cyclic(2).unwrap(),
            GroupPresentation::lamplighter(2).unwrap(),
            GroupPresentation::lamplighter(6).unwrap(),
            GroupPresentation::lamplighter_cycle(2, 4).unwrap(),
            GroupPresentation::lamplighter_cycle_quotient(4, v.clone()).unwrap(),
        ] {
            let gens = g.generators();
            for s in &gens {
                assert!(gens.contains(&g.inverse(s).unwrap()), "{}: {s}", g.name());
            }
        }
    }

    #[test]
    fn cross_presentation_multiply_is_an_error() {
        let a = GroupPresentation::cyclic(4).unwrap();
        let b = GroupPresentation::cyclic(6).unwrap();
        let err = a.multiply(&a.identity(), &b.identity()).unwrap_err();
        assert!(matches!(err, Error::CrossPresentation { .. }));
    }

    #[test]
    fn ball_of_integers() {
        let z = GroupPresentation::integers();
        assert_eq!(word_ball(&z, 1, 100).unwrap().len(), 3);
    }

    #[test]
    fn cyclic_six_is_cycle_metric() {
        let g = GroupPresentation::cyclic(6).unwrap();
        let ball = word_ball(&g, 6, 100).unwrap();
        for k in 0..6i64 {
            assert_eq!(ball.distance(&g.base_elem(k).unwrap()), Some(k.min(6 - k) as u32));
        }
    }

    #[test]
    fn lamplighter_ball_radius_four_regression() {
        let g = GroupPresentation::lamplighter(2).unwrap();
        let ball = word_ball(&g, 4, 10_000).unwrap();
        // Oracle: enumerate all elements with lamps and cursor in [-4, 4] and
        // count those whose closed-form length is at most 4.
        let mut count = 0;
        for mask in 0u32..(1 << 9) {
            for cursor in -4..=4 {
                let lamps: Vec<_> = (0..9).filter(|i| mask >> i & 1 == 1).map(|i| (i as i64 - 4, 1)).collect();
                let x = g.lamp_elem(lamps, cursor).unwrap();
                if g.closed_form_length(&x).unwrap() <= 4 {
                    count += 1;
                }
            }
        }
        assert_eq!(ball.len(), count);
        assert_eq!(ball.len(), 44);
    }

    #[test]
    fn lamplighter_distance_examples() {
        assert_eq!(lamplighter_distance([], 0), 0);
        assert_eq!(lamplighter_distance([(0, 1)], 0), 1);
        let g = GroupPresentation::lamplighter(2).unwrap();
        let ball = word_ball(&g, 12, 1_000_000).unwrap();
        let x = g.lamp_elem([(-1, 1), (2, 1)], 0).unwrap();
        let bfs = ball.distance(&x).unwrap();
        assert_eq!(bfs as u64, lamplighter_distance([(-1, 1), (2, 1)], 0));
        assert_eq!(bfs, 8);
    }

    #[test]
    fn closed_form_matches_bfs_on_radius_six() {
        for k in [2u8, 6] {
            let g = GroupPresentation::lamplighter(k).unwrap();
            let ball = word_ball(&g, 6, 1_000_000).unwrap();
            for (x, d) in ball.iter() {
                assert_eq!(g.closed_form_length(x), Some(d as u64), "{x}");
            }
        }
    }

    #[test]
    fn bfs_distances_are_one_lipschitz_along_generators() {
        let g = GroupPresentation::lamplighter(6).unwrap();
        let ball = word_ball(&g, 5, 1_000_000).unwrap();
        let gens = g.generators();
        for (x, d) in ball.iter() {
            for s in &gens {
                for y in [g.multiply(x, s).unwrap(), g.multiply(s, x).unwrap()] {
                    if let Some(dy) = ball.distance(&y) {
                        assert!(d.abs_diff(dy) <= 1);
                    }
                }
            }
        }
    }

    #[test]
    fn ball_budget_reports_radius() {
        let g = GroupPresentation::lamplighter(2).unwrap();
        let err = word_ball(&g, 10, 50).unwrap_err();
        match err {
            Error::Capacity { budget, detail, .. } => {
                assert_eq!(budget, "bfs");
                assert!(detail.contains("radius"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn equidistant_set_in_integers() {
        let z = GroupPresentation::integers();
        let set = equidistant_set(&z, 2, 2, 10, 1000).unwrap();
        assert!(set.points.len() >= 2);
        assert!(!set.complete);
        assert!(check_equidistant_window(&z, &set.points, 2, 2, 1000).unwrap());
        let one = equidistant_set(&z, 2, 2, 1, 1000).unwrap();
        assert_eq!(one.points.len(), 1);
        assert!(one.complete);
    }

    #[test]
    fn integers_have_subexponential_packing() {
        let z = GroupPresentation::integers();
        let c4 = annulus_packing_profile(&z, 4, 3, 1000).unwrap().growth_constant;
        let c16 = annulus_packing_profile(&z, 16, 3, 1000).unwrap().growth_constant;
        assert!(c16 < c4);
        assert!(c16 < 1.2);
    }

    #[test]
    fn packing_meets_covering_bound() {
        for g in [GroupPresentation::integers(), GroupPresentation::lamplighter(2).unwrap()] {
            for r in 2..=3 {
                let p = annulus_packing_profile(&g, r, 2, 1_000_000).unwrap();
                assert!(p.packing_size * p.ball_r_size >= p.annulus_size, "{p:?}");
            }
        }
    }

    #[test]
    fn element_encoding_round_trips() {
        let g = GroupPresentation::lamplighter(6).unwrap();
        let x = g.lamp_elem([(-3, 5), (2, 1)], -1).unwrap();
        assert_eq!(x.to_string(), "[-3:5,2:1]@-1");
        assert_eq!(g.parse_elem(&x.to_string()).unwrap(), x);
        let c = GroupPresentation::lamplighter_cycle(2, 4).unwrap();
        let y = c.lamp_elem([(1, 1), (3, 1)], 2).unwrap();
        assert_eq!(c.parse_elem(&y.to_string()).unwrap(), y);
    }

    #[test]
    fn quotient_lamps_are_canonical() {
        let u = Universe::indexed(4);
        let v = Gf2Subspace::span(&u, [Gf2Vec::ones(&u)]).unwrap();
        let g = GroupPresentation::lamplighter_cycle_quotient(4, v).unwrap();
        let a = g.lamp_elem([(0, 1), (1, 1), (2, 1)], 0).unwrap();
        let b = g.lamp_elem([(3, 1)], 0).unwrap();
        assert_eq!(a, b);
        let table = full_distance_table(&g, 1000).unwrap();
        assert_eq!(table.len(), 32);
    }

    #[test]
    fn non_invariant_quotient_is_rejected() {
        let u = Universe::indexed(4);
        let v = Gf2Subspace::span(&u, [Gf2Vec::parse(&u, "1100").unwrap()]).unwrap();
        assert!(GroupPresentation::lamplighter_cycle_quotient(4, v).is_err());
    }

    #[test]
    fn ball_cache_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let cache = BallCache::new(dir.path());
        let g = GroupPresentation::lamplighter(2).unwrap();
        let fresh = cache.get_or_compute(&g, 4, 10_000).unwrap();
        assert!(cache.path_for(&g, 4).exists());
        let again = cache.get_or_compute(&g, 4, 10_000).unwrap();
        assert_eq!(fresh.len(), again.len());
        for (x, d) in fresh.iter() {
            assert_eq!(again.distance(x), Some(d));
        }
        // a corrupted file is recomputed rather than trusted
        std::fs::write(cache.path_for(&g, 4), "garbage").unwrap();
        assert_eq!(cache.get_or_compute(&g, 4, 10_000).unwrap().len(), fresh.len());
    }
}
