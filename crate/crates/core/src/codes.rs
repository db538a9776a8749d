//! Binary codes containing the all-ones word, cube quotients `Z₂^d / C^⊥`,
//! and the subspace `D` of functions on `Z₆^I` built from a code.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gf2::{Gf2Subspace, Gf2Vec, Universe, Z6Vec, DEFAULT_COSET_BUDGET};
use crate::tsmetric::{
    basis_indicator, ts_quotient, CubeFn, FiniteMetricSpace, HammingZ6, PinnedSpace, QuotientBound, SearchBudget,
};

/// Default number of resampling attempts in [`make_code`].
pub const DEFAULT_CODE_ATTEMPTS: u32 = 10_000;

#[derive(Clone, Debug)]
pub struct Code {
    c: Gf2Subspace,
    c_perp: Gf2Subspace,
    min_distance: usize,
}

/// Minimum weight over the nonzero elements; `0` for the zero space.
pub fn min_weight(space: &Gf2Subspace) -> Result<usize> {
    Ok(space
        .elements(DEFAULT_COSET_BUDGET)?
        .iter()
        .map(Gf2Vec::weight)
        .filter(|w| *w > 0)
        .min()
        .unwrap_or(0))
}

impl Code {
    pub fn new(c: Gf2Subspace) -> Result<Code> {
        let ones = Gf2Vec::ones(c.universe());
        if !c.contains(&ones)? {
            return Err(Error::InvalidInput("code must contain the all-ones word".into()));
        }
        Ok(Code {
            min_distance: min_weight(&c)?,
            c_perp: c.dual(),
            c,
        })
    }

    pub fn d(&self) -> usize {
        self.c.universe().len()
    }

    pub fn universe(&self) -> &Universe {
        self.c.universe()
    }

    pub fn c(&self) -> &Gf2Subspace {
        &self.c
    }

    pub fn c_perp(&self) -> &Gf2Subspace {
        &self.c_perp
    }

    pub fn min_distance(&self) -> usize {
        self.min_distance
    }

    /// Coset leaders of `C^⊥`, one per coset, sorted.
    pub fn coset_representatives(&self) -> Result<Vec<Gf2Vec>> {
        let u = self.universe();
        let mut is_pivot = vec![false; u.len()];
        for &p in self.c_perp.pivots() {
            is_pivot[p] = true;
        }
        let free: Vec<usize> = (0..u.len()).filter(|&i| !is_pivot[i]).collect();
        if free.len() > 24 {
            return Err(Error::capacity("coset", 1 << 24, format!("{} cosets", 1u64 << free.len())));
        }
        let mut reps = Vec::with_capacity(1 << free.len());
        for mask in 0u64..(1 << free.len()) {
            let v = Gf2Vec::from_indices(u, free.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &i)| i));
            reps.push(self.c_perp.coset_leader(&v, DEFAULT_COSET_BUDGET)?);
        }
        reps.sort();
        Ok(reps)
    }

    /// `d_Ham / C^⊥` between two words.
    pub fn quotient_distance(&self, a: &Gf2Vec, b: &Gf2Vec) -> Result<usize> {
        self.c_perp.coset_min_weight(&a.try_add(b)?, DEFAULT_COSET_BUDGET)
    }

    pub fn to_text(&self) -> String {
        self.c.to_text()
    }

    pub fn from_text(text: &str) -> Result<Code> {
        Code::new(Gf2Subspace::from_text(text)?)
    }
}

/// Seeded random code of dimension `dim_c` containing the all-ones word,
/// resampled until its minimum distance reaches `floor`.
pub fn make_code(d: usize, dim_c: usize, seed: u64, floor: usize, attempts: u32) -> Result<Code> {
    if d == 0 || dim_c == 0 || dim_c > d {
        return Err(Error::InvalidInput(format!("need 1 <= dimC <= d, got d={d}, dimC={dim_c}")));
    }
    let u = Universe::indexed(d);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0;
    for _ in 0..attempts.max(1) {
        let mut c = Gf2Subspace::span(&u, [Gf2Vec::ones(&u)])?;
        while c.dim() < dim_c {
            let bits: Vec<bool> = (0..d).map(|_| rng.random_bool(0.5)).collect();
            c.insert(Gf2Vec::from_bits(&u, &bits)?)?;
        }
        let code = Code::new(c)?;
        if code.min_distance >= floor {
            return Ok(code);
        }
        best = best.max(code.min_distance);
    }
    Err(Error::CodeSearchExhausted {
        attempts: attempts.max(1),
        best_distance: best,
    })
}

/// `Z₂^d / C^⊥` with the quotient Hamming metric; points are labeled by coset
/// leaders.
pub fn cube_quotient_space(code: &Code, point_budget: usize) -> Result<FiniteMetricSpace> {
    let count = 1u64 << code.c.dim();
    if count > point_budget as u64 {
        return Err(Error::capacity("sdp", point_budget as u64, format!("quotient with {count} points")));
    }
    let reps = code.coset_representatives()?;
    let n = reps.len();
    let mut rows = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let d = code.quotient_distance(&reps[i], &reps[j])? as f64;
            rows[i][j] = d;
            rows[j][i] = d;
        }
    }
    FiniteMetricSpace::new(reps.iter().map(Gf2Vec::to_bit_string).collect(), rows, Some(1.0))
}

/// `L_a(v) = ⟨v̄, a⟩`.
pub fn functional_l(a: &Gf2Vec, v: &Z6Vec) -> Result<bool> {
    a.dot(&v.reduce_mod2(a.universe())?)
}

/// The subspace `D` spanned by the constant-one function and `L_a` for `a` in
/// a basis of `C`, described through its generators.
#[derive(Clone, Debug)]
pub struct DnSubspace {
    code: Code,
    masks: Vec<u64>,
}

impl DnSubspace {
    pub fn new(code: Code) -> Result<Self> {
        if code.d() > 64 {
            return Err(Error::InvalidInput("index sets above 64 coordinates are not supported".into()));
        }
        let masks = code
            .c
            .basis()
            .iter()
            .map(|a| a.support().fold(0u64, |m, i| m | 1 << i))
            .collect();
        Ok(DnSubspace { code, masks })
    }

    pub fn code(&self) -> &Code {
        &self.code
    }

    pub fn index_len(&self) -> usize {
        self.code.d()
    }

    /// Number of generating functionals.
    pub fn generator_count(&self) -> usize {
        self.masks.len() + 1
    }

    /// Values of the generating functionals at one point, packed: bit 0 is
    /// the constant-one function, bit `k+1` is `L_{a_k}`.
    pub fn point_signature(&self, w: &Z6Vec) -> u64 {
        let p = w.parity_mask();
        let mut s = 1u64;
        for (k, m) in self.masks.iter().enumerate() {
            if (p & m).count_ones() % 2 == 1 {
                s |= 1 << (k + 1);
            }
        }
        s
    }

    /// `⟨⟨W, f⟩⟩` for every generating functional `f`.
    pub fn signature(&self, w: &CubeFn<Z6Vec>) -> u64 {
        w.support().iter().fold(0, |acc, p| acc ^ self.point_signature(p))
    }

    /// Membership in `D^⊥`.
    pub fn dn_membership(&self, w: &CubeFn<Z6Vec>) -> bool {
        self.signature(w) == 0
    }

    /// `R(W)(e_x) = Σ_{w ∈ spt W} w̄_x`.
    pub fn reduce_r(&self, w: &CubeFn<Z6Vec>) -> CubeFn<Z6Vec> {
        reduce_r(self.index_len(), w)
    }

    /// Indicator of `{e_x : a_x = 1}`.
    pub fn kappa(&self, a: &Gf2Vec) -> CubeFn<Z6Vec> {
        basis_indicator(a)
    }
}

pub fn reduce_r(n: usize, w: &CubeFn<Z6Vec>) -> CubeFn<Z6Vec> {
    let parity = w.support().iter().fold(0u64, |acc, p| acc ^ p.parity_mask());
    CubeFn::from_points((0..n).filter(|x| parity >> x & 1 == 1).map(|x| Z6Vec::basis(n, x)))
}

/// `⟨⟨W, L_a⟩⟩`.
pub fn pair_with_l(a: &Gf2Vec, w: &CubeFn<Z6Vec>) -> Result<bool> {
    let mut acc = false;
    for p in w.support() {
        acc ^= functional_l(a, p)?;
    }
    Ok(acc)
}

/// Translate of `W` by `u`: the support is shifted by `u`.
pub fn translate(w: &CubeFn<Z6Vec>, u: &Z6Vec) -> Result<CubeFn<Z6Vec>> {
    let pts = w.support().iter().map(|p| p.try_add(u)).collect::<Result<Vec<_>>>()?;
    Ok(CubeFn::from_points(pts))
}

/// One row of the κ identity check.
#[derive(Clone, Debug, PartialEq)]
pub struct KappaRow {
    pub a: Gf2Vec,
    pub b: Gf2Vec,
    /// Quotient TS by exhaustive search over the derived region.
    pub lhs: f64,
    /// The same minimum restricted to shifts supported on the basis vectors.
    pub lhs_basis: f64,
    /// `2·d_Ham/C^⊥(a, b) + 1`.
    pub rhs: f64,
    pub region_size: usize,
    pub bound: QuotientBound,
}

impl KappaRow {
    pub fn pass(&self) -> bool {
        self.lhs == self.rhs && self.lhs_basis == self.lhs
    }
}

/// Compares `TS_Ham/D^⊥(κ(a), κ(b))` with `2·d_Ham/C^⊥(a, b) + 1` over all
/// pairs of distinct cosets. The quotient TS is searched over shifts with at
/// most `2|B|` points within radius `2|B| + 1` of the origin.
pub fn kappa_identity_check(dn: &DnSubspace, budget: SearchBudget) -> Result<Vec<KappaRow>> {
    let n = dn.index_len();
    let ps = PinnedSpace::new(HammingZ6, Z6Vec::zero(n));
    if n > 6 {
        return Err(Error::capacity("search", 6, format!("Z6^{n} region enumeration")));
    }
    let region: Vec<Z6Vec> = Z6Vec::enumerate_all(n).collect();
    let basis: Vec<Z6Vec> = (0..n).map(|x| Z6Vec::basis(n, x)).collect();
    let bound = QuotientBound {
        max_support: 2 * n,
        radius: (2 * n + 1) as f64,
    };
    let hints: Vec<CubeFn<Z6Vec>> = dn
        .code
        .c_perp
        .elements(DEFAULT_COSET_BUDGET)?
        .iter()
        .map(|c| dn.kappa(c))
        .collect();
    let member = |w: &CubeFn<Z6Vec>| dn.dn_membership(w);
    let reps = dn.code.coset_representatives()?;
    let mut rows = Vec::new();
    for (i, a) in reps.iter().enumerate() {
        for b in &reps[i + 1..] {
            let ka = dn.kappa(a);
            let kb = dn.kappa(b);
            let full = ts_quotient(&ps, &region, member, &ka, &kb, &bound, &hints, budget)?;
            let restricted = ts_quotient(&ps, &basis, member, &ka, &kb, &bound, &hints, budget)?;
            rows.push(KappaRow {
                a: a.clone(),
                b: b.clone(),
                lhs: full.value,
                lhs_basis: restricted.value,
                rhs: 2.0 * dn.code.quotient_distance(a, b)? as f64 + 1.0,
                region_size: full.region_size,
                bound: bound.clone(),
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tsmetric::ts_pinned;
    use rand::Rng;

    fn gv(u: &Universe, s: &str) -> Gf2Vec {
        Gf2Vec::parse(u, s).unwrap()
    }

    fn brute_min_weight(gens: &[Gf2Vec]) -> usize {
        let mut best = usize::MAX;
        for mask in 1u32..(1 << gens.len()) {
            let mut acc = Gf2Vec::zero(gens[0].universe());
            for (i, g) in gens.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    acc = &acc + g;
                }
            }
            if !acc.is_zero() {
                best = best.min(acc.weight());
            }
        }
        best
    }

    #[test]
    fn forced_code_in_three_dimensions() {
        let c = make_code(3, 1, 0, 1, 10).unwrap();
        let u = Universe::indexed(3);
        assert!(c.c().same_space(&Gf2Subspace::span(&u, [gv(&u, "111")]).unwrap()));
        assert_eq!(c.min_distance(), 3);
    }

    #[test]
    fn generated_codes_meet_the_floor_and_contain_ones() {
        for seed in 0..20 {
            let c = make_code(4, 2, seed, 2, 1000).unwrap();
            assert!(c.c().contains(&Gf2Vec::ones(c.universe())).unwrap());
            assert_eq!(c.c().dim(), 2);
            assert_eq!(c.min_distance(), brute_min_weight(c.c().basis()));
            assert!(c.min_distance() >= 2);
            assert!(c.c_perp().same_space(&c.c().dual()));
        }
        let again = make_code(4, 2, 3, 2, 1000).unwrap();
        assert!(again.c().same_space(make_code(4, 2, 3, 2, 1000).unwrap().c()));
    }

    #[test]
    fn impossible_floor_reports_best_distance() {
        let err = make_code(4, 4, 1, 2, 5).unwrap_err();
        assert_eq!(
            err,
            Error::CodeSearchExhausted {
                attempts: 5,
                best_distance: 1
            }
        );
    }

    #[test]
    fn code_must_contain_ones() {
        let u = Universe::indexed(3);
        assert!(Code::new(Gf2Subspace::span(&u, [gv(&u, "110")]).unwrap()).is_err());
    }

    #[test]
    fn cube_quotient_examples() {
        let u2 = Universe::indexed(2);
        let full = Code::new(Gf2Subspace::full(&u2)).unwrap();
        let cube = cube_quotient_space(&full, 64).unwrap();
        assert_eq!(cube.len(), 4);
        assert_eq!(cube.diameter(), 2.0);
        let small = Code::new(Gf2Subspace::span(&u2, [gv(&u2, "11")]).unwrap()).unwrap();
        let q = cube_quotient_space(&small, 64).unwrap();
        assert_eq!(q.len(), 2);
        assert_eq!(q.dist(0, 1), 1.0);
        for seed in 0..5 {
            let c = make_code(5, 3, seed, 2, 1000).unwrap();
            let s = cube_quotient_space(&c, 64).unwrap();
            assert_eq!(s.len(), 8);
            assert!(s.diameter() <= 5.0);
        }
        assert!(matches!(cube_quotient_space(&full, 2), Err(Error::Capacity { .. })));
    }

    #[test]
    fn functional_examples_and_translation_rule() {
        let u = Universe::indexed(3);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let v = Z6Vec::new([1, 1, 1]);
        assert!(!functional_l(&Gf2Vec::zero(&u), &v).unwrap());
        assert!(functional_l(&Gf2Vec::ones(&u), &v).unwrap());
        for _ in 0..100 {
            let a = Gf2Vec::from_bits(&u, &[rng.random_bool(0.5), rng.random_bool(0.5), rng.random_bool(0.5)]).unwrap();
            let w = Z6Vec::new((0..3).map(|_| rng.random_range(0..6u8)));
            let t = Z6Vec::new((0..3).map(|_| rng.random_range(0..6u8)));
            // (Trans_t L_a)(w) = L_a(w - t) = L_a(w) - ⟨t̄, a⟩
            let lhs = functional_l(&a, &w.try_sub(&t).unwrap()).unwrap();
            let rhs = functional_l(&a, &w).unwrap() ^ a.dot(&t.reduce_mod2(&u).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    fn dn_for(d: usize, dim_c: usize, seed: u64) -> DnSubspace {
        DnSubspace::new(make_code(d, dim_c, seed, 1, 1000).unwrap()).unwrap()
    }

    #[test]
    fn membership_examples() {
        let dn = dn_for(3, 2, 1);
        assert!(dn.dn_membership(&CubeFn::zero()));
        assert!(!dn.dn_membership(&CubeFn::delta(Z6Vec::zero(3))));
    }

    #[test]
    fn membership_on_basis_supported_functions_is_the_dual_code() {
        for d in 2..=4 {
            for seed in 0..3 {
                let dn = dn_for(d, (d - 1).max(1), seed);
                let u = dn.code().universe().clone();
                for bits in 0u32..(1 << d) {
                    let a = Gf2Vec::from_indices(&u, (0..d).filter(|i| bits >> i & 1 == 1));
                    assert_eq!(dn.dn_membership(&dn.kappa(&a)), dn.code().c_perp().contains(&a).unwrap());
                }
            }
        }
    }

    #[test]
    fn membership_is_translation_invariant() {
        let dn = dn_for(3, 2, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..200 {
            let w = CubeFn::from_points((0..rng.random_range(0..5)).map(|_| Z6Vec::new((0..3).map(|_| rng.random_range(0..6u8)))));
            let t = Z6Vec::new((0..3).map(|_| rng.random_range(0..6u8)));
            assert_eq!(dn.dn_membership(&w), dn.dn_membership(&translate(&w, &t).unwrap()));
        }
    }

    #[test]
    fn r_map_examples() {
        let n = 3;
        let w = CubeFn::from_points([Z6Vec::basis(n, 0), Z6Vec::basis(n, 2)]);
        assert_eq!(reduce_r(n, &w), w);
        let two = Z6Vec::new([1, 3, 0]);
        assert_eq!(
            reduce_r(n, &CubeFn::delta(two)),
            CubeFn::from_points([Z6Vec::basis(n, 0), Z6Vec::basis(n, 1)])
        );
    }

    #[test]
    fn r_map_preserves_l_pairings_and_shortens_tours() {
        let n = 2;
        let u = Universe::indexed(n);
        let ps = PinnedSpace::new(HammingZ6, Z6Vec::zero(n));
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..200 {
            let w = CubeFn::from_points((0..rng.random_range(0..=4)).map(|_| Z6Vec::new((0..n).map(|_| rng.random_range(0..6u8)))));
            let r = reduce_r(n, &w);
            for bits in 0u32..4 {
                let a = Gf2Vec::from_indices(&u, (0..n).filter(|i| bits >> i & 1 == 1));
                assert_eq!(pair_with_l(&a, &r).unwrap(), pair_with_l(&a, &w).unwrap());
            }
            let zero = CubeFn::zero();
            assert!(ts_pinned(&ps, &zero, &w, 14).unwrap() >= ts_pinned(&ps, &zero, &r, 14).unwrap());
        }
    }

    #[test]
    fn kappa_kernel_is_dual_code() {
        let dn = dn_for(4, 2, 3);
        assert!(dn.kappa(&Gf2Vec::zero(dn.code().universe())).is_zero());
        for c in dn.code().c_perp().elements(64).unwrap() {
            assert!(dn.dn_membership(&dn.kappa(&c)));
        }
    }

    #[test]
    fn kappa_identity_on_small_code() {
        let dn = dn_for(3, 2, 5);
        let rows = kappa_identity_check(&dn, SearchBudget::default()).unwrap();
        assert_eq!(rows.len(), 6);
        for r in &rows {
            assert!(r.pass(), "{r:?}");
        }
    }

    #[test]
    fn code_text_round_trip() {
        let c = make_code(5, 3, 2, 2, 1000).unwrap();
        let back = Code::from_text(&c.to_text()).unwrap();
        assert!(back.c().same_space(c.c()));
    }
}
