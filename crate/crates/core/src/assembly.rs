//! Finite truncations of the scale-by-scale construction over `G = Z`: scale
//! schedules, the function `A`, the maps `Q_n`, the spans `U_n` and `U_n⁺`,
//! the one-stage `λ_n` sandwich, the composed maps `φ_n = λ_n ∘ κ_n` and the
//! compression bound calculator.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use crate::codes::{Code, DnSubspace};
use crate::error::{Error, Result};
use crate::gf2::{Gf2Subspace, Gf2Vec, Universe, Z6Vec};
use crate::tsmetric::{held_karp, ts_pinned, ts_quotient, CubeFn, HammingZ6, PinnedSpace, QuotientBound, SearchBudget, ZeroSectionZ};

/// Support of `A` inside `Z₆`.
pub const A_SUPPORT: [u8; 4] = [0, 1, 3, 4];
/// Hard cap on the truncation window.
pub const MAX_WINDOW: usize = 4;
/// Default growth factor between consecutive scales.
pub const DEFAULT_GROWTH_FACTOR: f64 = 4.0;

/// `A(v)` for `v ∈ Z₆`.
pub fn a_value(v: i64) -> bool {
    A_SUPPORT.contains(&(v.rem_euclid(6) as u8))
}

/// Values of `A(· − shift)` on `0..6`.
pub fn a_translate(shift: i64) -> [bool; 6] {
    std::array::from_fn(|v| a_value(v as i64 - shift))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ACombination {
    /// Bit `k` selects the translate `A(· − k)`.
    pub mask: u8,
    pub values: [bool; 6],
    pub equals_ones: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct APropertyReport {
    pub period_three: bool,
    pub distinct_translates: usize,
    pub rows: Vec<ACombination>,
}

impl APropertyReport {
    pub fn holds(&self) -> bool {
        self.period_three && self.distinct_translates == 3 && self.rows.len() == 8 && self.rows.iter().all(|r| !r.equals_ones)
    }

    pub fn to_table(&self) -> String {
        let mut out = String::from("mask\tvalues\tequals_ones\n");
        for r in &self.rows {
            let bits: String = r.values.iter().map(|&b| if b { '1' } else { '0' }).collect();
            let _ = writeln!(out, "{:03b}\t{bits}\t{}", r.mask, r.equals_ones);
        }
        out
    }
}

/// All `GF(2)` combinations of `A`, `A(· − 1)`, `A(· − 2)`, compared with the
/// all-ones function.
pub fn check_a_property() -> APropertyReport {
    let translates: Vec<[bool; 6]> = (0..3).map(a_translate).collect();
    let distinct: BTreeSet<[bool; 6]> = (0..6).map(a_translate).collect();
    let rows = (0u8..8)
        .map(|mask| {
            let mut values = [false; 6];
            for (k, t) in translates.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    for v in 0..6 {
                        values[v] ^= t[v];
                    }
                }
            }
            ACombination {
                mask,
                values,
                equals_ones: values.iter().all(|&b| b),
            }
        })
        .collect();
    APropertyReport {
        period_three: a_translate(3) == a_translate(0),
        distinct_translates: distinct.len(),
        rows,
    }
}

/// One scale: the cluster `I_n ⊂ Z`, the marker point `y_n` and `r_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Stage {
    pub points: Vec<i64>,
    pub y: i64,
    pub r: f64,
}

/// Distances of a cluster: pairwise and to the identity.
fn cluster_distances(points: &[i64]) -> Vec<f64> {
    let mut d: Vec<f64> = points.iter().map(|x| x.unsigned_abs() as f64).collect();
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            d.push(a.abs_diff(*b) as f64);
        }
    }
    d
}

/// Sequence of scales over `G = Z` with the word metric `|x − y|`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaleSchedule {
    stages: Vec<Stage>,
    m: f64,
}

impl ScaleSchedule {
    /// Each stage is `(I_n, y_n, r_n)`; a missing `r_n` is taken as the
    /// smallest distance among `I_n ∪ {e}`.
    pub fn new(stages: Vec<(Vec<i64>, i64, Option<f64>)>) -> Result<Self> {
        let mut out = Vec::new();
        let mut m: f64 = 1.0;
        for (k, (mut points, y, r)) in stages.into_iter().enumerate() {
            points.sort_unstable();
            points.dedup();
            if points.is_empty() || points.contains(&0) {
                return Err(Error::InvalidInput(format!("stage {}: cluster must be nonempty and avoid the identity", k + 1)));
            }
            let dists = cluster_distances(&points);
            let dmin = dists.iter().copied().fold(f64::INFINITY, f64::min);
            let dmax = dists.iter().copied().fold(0.0, f64::max);
            let r = r.unwrap_or(dmin);
            if !(r > 0.0) || r > dmin {
                return Err(Error::InvalidInput(format!("stage {}: r = {r} exceeds the smallest cluster distance {dmin}", k + 1)));
            }
            m = m.max(dmax / (2.0 * r));
            out.push(Stage { points, y, r });
        }
        let all: Vec<i64> = out.iter().flat_map(|s| s.points.iter().copied()).collect();
        let distinct: BTreeSet<i64> = all.iter().copied().collect();
        if distinct.len() != all.len() {
            return Err(Error::InvalidInput("clusters are not pairwise disjoint".into()));
        }
        if let Some(s) = out.iter().find(|s| distinct.contains(&s.y)) {
            return Err(Error::InvalidInput(format!("marker {} lies in a cluster", s.y)));
        }
        let mut last = 0.0;
        for (k, s) in out.iter().enumerate() {
            let ry = s.y.unsigned_abs() as f64;
            if !(last < s.r && s.r < ry) {
                return Err(Error::InvalidInput(format!("stage {}: scales do not interleave", k + 1)));
            }
            last = ry;
        }
        Ok(ScaleSchedule { stages: out, m })
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    pub fn stage(&self, n: usize) -> Result<&Stage> {
        n.checked_sub(1)
            .and_then(|k| self.stages.get(k))
            .ok_or_else(|| Error::InvalidInput(format!("no stage {n}")))
    }

    /// Smallest `M ≥ 1` with every cluster distance in `[r_n, 2M r_n]`.
    pub fn m(&self) -> f64 {
        self.m
    }

    /// `r_{n+1} ≥ factor · (2M r_n + ρ(y_n, e) + slack)` for every `n`.
    pub fn growth_ok(&self, factor: f64, slack: f64) -> bool {
        self.stages
            .windows(2)
            .all(|w| w[1].r >= factor * (2.0 * self.m * w[0].r + w[0].y.unsigned_abs() as f64 + slack))
    }

    /// All cluster points and markers, ascending.
    pub fn window(&self) -> Vec<i64> {
        let mut w: Vec<i64> = self.stages.iter().flat_map(|s| s.points.iter().copied().chain([s.y])).collect();
        w.sort_unstable();
        w
    }

    /// Window coordinates of `I_n`, of `y_n`, and of the complement of
    /// `I_1 ∪ … ∪ I_n ∪ {y_1, …, y_n}`.
    fn coordinates(&self, n: usize) -> Result<(Vec<usize>, usize, Vec<usize>)> {
        let stage = self.stage(n)?;
        let window = self.window();
        let pos = |x: i64| window.binary_search(&x).expect("window contains stage points");
        let used: BTreeSet<i64> = self.stages[..n].iter().flat_map(|s| s.points.iter().copied().chain([s.y])).collect();
        let complement = (0..window.len()).filter(|&i| !used.contains(&window[i])).collect();
        Ok((stage.points.iter().map(|&x| pos(x)).collect(), pos(stage.y), complement))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("group=Z\n");
        for s in &self.stages {
            let pts: Vec<String> = s.points.iter().map(i64::to_string).collect();
            let _ = writeln!(out, "stage I={} y={} r={}", pts.join(","), s.y, s.r);
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut stages = Vec::new();
        let mut group = false;
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(g) = line.strip_prefix("group=") {
                if g.trim() != "Z" {
                    return Err(Error::parse(k + 1, format!("unsupported base group {g:?}")));
                }
                group = true;
                continue;
            }
            let Some(rest) = line.strip_prefix("stage") else {
                return Err(Error::parse(k + 1, format!("unexpected line {line:?}")));
            };
            let (mut pts, mut y, mut r) = (None, None, None);
            for field in rest.split_whitespace() {
                let (key, val) = field.split_once('=').ok_or_else(|| Error::parse(k + 1, format!("bad field {field:?}")))?;
                let bad = |_| Error::parse(k + 1, format!("bad value in {field:?}"));
                match key {
                    "I" => pts = Some(val.split(',').map(|v| v.trim().parse::<i64>().map_err(bad)).collect::<Result<Vec<_>>>()?),
                    "y" => y = Some(val.parse::<i64>().map_err(bad)?),
                    "r" => r = Some(val.parse::<f64>().map_err(|_| Error::parse(k + 1, format!("bad value in {field:?}")))?),
                    _ => return Err(Error::parse(k + 1, format!("unknown key {key:?}"))),
                }
            }
            match (pts, y) {
                (Some(p), Some(y)) => stages.push((p, y, r)),
                _ => return Err(Error::parse(k + 1, "stage needs I= and y=")),
            }
        }
        if !group {
            return Err(Error::parse(1, "missing group= line"));
        }
        ScaleSchedule::new(stages)
    }
}

/// `Q_n(u, W, u₀)(w)`. `u` lists the complement coordinates of the window in
/// window order, `W` lives on `Z₆^{I_n}` and `w` on the whole window.
pub fn eval_q(schedule: &ScaleSchedule, n: usize, u: &Z6Vec, w_fn: &CubeFn<Z6Vec>, u_scalar: u8, w: &Z6Vec) -> Result<bool> {
    let (ic, yc, cc) = schedule.coordinates(n)?;
    if w.len() != schedule.window().len() || u.len() != cc.len() {
        return Err(Error::DimensionMismatch(format!(
            "window has {} coordinates and complement {}, got {} and {}",
            schedule.window().len(),
            cc.len(),
            w.len(),
            u.len()
        )));
    }
    if w_fn.support().iter().any(|p| p.len() != ic.len()) {
        return Err(Error::DimensionMismatch("W does not live on the stage cluster".into()));
    }
    if cc.iter().enumerate().any(|(k, &c)| w.get(c) != u.get(k)) {
        return Ok(false);
    }
    let restricted = Z6Vec::new(ic.iter().map(|&c| w.get(c)));
    Ok(w_fn.value(&restricted) && a_value(w.get(yc) as i64 - u_scalar as i64))
}

/// Dense `GF(2)` functions on `Z₆^J` for a window `J` of at most four points.
#[derive(Clone, Debug)]
pub struct TruncatedFunctionSpace {
    window: Vec<i64>,
    universe: Universe,
}

impl TruncatedFunctionSpace {
    pub fn new(window: Vec<i64>) -> Result<Self> {
        if window.len() > MAX_WINDOW {
            return Err(Error::capacity("window", MAX_WINDOW as u64, format!("window of {} points", window.len())));
        }
        let len = 6usize.pow(window.len() as u32);
        Ok(TruncatedFunctionSpace {
            window,
            universe: Universe::indexed(len),
        })
    }

    pub fn for_schedule(schedule: &ScaleSchedule) -> Result<Self> {
        Self::new(schedule.window())
    }

    pub fn window(&self) -> &[i64] {
        &self.window
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

    pub fn point(&self, index: usize) -> Z6Vec {
        Z6Vec::from_index(self.window.len(), index)
    }

    pub fn vector(&self, f: impl Fn(&Z6Vec) -> bool) -> Gf2Vec {
        Gf2Vec::from_indices(&self.universe, (0..self.len()).filter(|&i| f(&self.point(i))))
    }

    pub fn all_ones(&self) -> Gf2Vec {
        Gf2Vec::ones(&self.universe)
    }

    /// `f(· − v)`.
    pub fn translate(&self, f: &Gf2Vec, v: &Z6Vec) -> Result<Gf2Vec> {
        let mut idx = Vec::with_capacity(f.weight());
        for i in f.support() {
            idx.push(self.point(i).try_add(v)?.index());
        }
        Ok(Gf2Vec::from_indices(&self.universe, idx))
    }
}

/// `Q_n(0, W, u₀)` as a dense vector.
pub fn q_vector(space: &TruncatedFunctionSpace, schedule: &ScaleSchedule, n: usize, w_fn: &CubeFn<Z6Vec>, u_scalar: u8) -> Result<Gf2Vec> {
    if space.window() != schedule.window() {
        return Err(Error::DimensionMismatch("function space window differs from the schedule window".into()));
    }
    let (ic, yc, cc) = schedule.coordinates(n)?;
    let mut idx = Vec::new();
    for p in w_fn.support() {
        if p.len() != ic.len() {
            return Err(Error::DimensionMismatch("W does not live on the stage cluster".into()));
        }
        for i in 0..space.len() {
            let w = space.point(i);
            if cc.iter().all(|&c| w.get(c) == 0)
                && ic.iter().enumerate().all(|(k, &c)| w.get(c) == p.get(k))
                && a_value(w.get(yc) as i64 - u_scalar as i64)
            {
                idx.push(i);
            }
        }
    }
    Ok(Gf2Vec::from_indices(space.universe(), idx))
}

/// Span of `Q_n(0, W, u₀)` over the given `W` and all `u₀ ∈ Z₆`.
pub fn span_q(space: &TruncatedFunctionSpace, schedule: &ScaleSchedule, n: usize, generators: &[CubeFn<Z6Vec>]) -> Result<Gf2Subspace> {
    let mut vs = Vec::new();
    for w in generators {
        for u0 in 0..6 {
            vs.push(q_vector(space, schedule, n, w, u0)?);
        }
    }
    Gf2Subspace::span(space.universe(), vs)
}

/// A basis of `D^⊥` inside `Z₂^{Z₆^I}`, as functions.
pub fn dn_perp_basis(dn: &DnSubspace) -> Result<Vec<CubeFn<Z6Vec>>> {
    let k = dn.index_len();
    let n = 6usize.pow(k as u32);
    let u = Universe::indexed(n);
    let sigs: Vec<u64> = (0..n).map(|i| dn.point_signature(&Z6Vec::from_index(k, i))).collect();
    let gens = (0..dn.generator_count()).map(|g| Gf2Vec::from_indices(&u, (0..n).filter(|&i| sigs[i] >> g & 1 == 1)));
    let d = Gf2Subspace::span(&u, gens)?;
    Ok(d.dual()
        .basis()
        .iter()
        .map(|v| CubeFn::from_points(v.support().map(|i| Z6Vec::from_index(k, i))))
        .collect())
}

/// Truncated `U_n` (generators from `D_n^⊥`) or `U_n⁺` (all of `Z₂^{Z₆^{I_n}}`)
/// with the complement block fixed to zero.
pub fn build_truncated_un(space: &TruncatedFunctionSpace, schedule: &ScaleSchedule, n: usize, dn: Option<&DnSubspace>, plus: bool) -> Result<Gf2Subspace> {
    let k = schedule.stage(n)?.points.len();
    let generators: Vec<CubeFn<Z6Vec>> = if plus {
        Z6Vec::enumerate_all(k).map(CubeFn::delta).collect()
    } else {
        let dn = dn.ok_or_else(|| Error::InvalidInput("U_n needs the subspace D_n".into()))?;
        if dn.index_len() != k {
            return Err(Error::DimensionMismatch(format!("code length {} for a cluster of {k} points", dn.index_len())));
        }
        dn_perp_basis(dn)?
    };
    span_q(space, schedule, n, &generators)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinIndepReport {
    pub dims: Vec<usize>,
    pub sum_dim: usize,
    pub independent: bool,
    pub ones_in_sum: bool,
}

impl LinIndepReport {
    pub fn pass(&self) -> bool {
        self.independent && !self.ones_in_sum
    }
}

pub fn verify_lin_indep(space: &TruncatedFunctionSpace, subspaces: &[Gf2Subspace]) -> Result<LinIndepReport> {
    let mut sum = Gf2Subspace::zero(space.universe());
    for s in subspaces {
        sum = sum.sum(s)?;
    }
    let dims: Vec<usize> = subspaces.iter().map(Gf2Subspace::dim).collect();
    Ok(LinIndepReport {
        sum_dim: sum.dim(),
        independent: sum.dim() == dims.iter().sum::<usize>(),
        ones_in_sum: sum.contains(&space.all_ones())?,
        dims,
    })
}

/// For every signature reachable by one or two points of `Z₆^I`, a
/// representative with the smallest support. The zero signature maps to `𝟘`.
pub fn coset_representatives(dn: &DnSubspace) -> BTreeMap<u64, CubeFn<Z6Vec>> {
    let pts: Vec<Z6Vec> = Z6Vec::enumerate_all(dn.index_len()).collect();
    let mut reps = BTreeMap::new();
    reps.insert(0, CubeFn::zero());
    for p in &pts {
        reps.entry(dn.point_signature(p)).or_insert_with(|| CubeFn::delta(p.clone()));
    }
    for (i, p) in pts.iter().enumerate() {
        for q in &pts[i + 1..] {
            let s = dn.point_signature(p) ^ dn.point_signature(q);
            reps.entry(s).or_insert_with(|| CubeFn::from_points([p.clone(), q.clone()]));
        }
    }
    reps
}

/// All unordered pairs of distinct cosets of `D^⊥`.
pub fn coset_pairs(dn: &DnSubspace) -> Vec<(CubeFn<Z6Vec>, CubeFn<Z6Vec>)> {
    let reps: Vec<CubeFn<Z6Vec>> = coset_representatives(dn).into_values().collect();
    let mut out = Vec::new();
    for (i, a) in reps.iter().enumerate() {
        for b in &reps[i + 1..] {
            out.push((a.clone(), b.clone()));
        }
    }
    out
}

/// Shifts `X ∈ Q(Z) + U_1` decompose over the cluster points `p`: on
/// `{p} × Z₆` they equal `A`, `A(· − 1)`, `A(· − 2)` or vanish. Slice type
/// bit 0 carries the `A` coefficient and bit 1 the `A(· − 1)` one.
const SLICE_VALUES: [[u8; 4]; 4] = [[0; 4], [0, 1, 3, 4], [1, 2, 4, 5], [0, 2, 3, 5]];

#[derive(Clone, Debug, PartialEq)]
pub struct SliceMinimum {
    pub value: f64,
    /// Active cluster points and their slice types.
    pub slices: Vec<(Z6Vec, u8)>,
}

/// Minimal zero-section TS over one stage, by slice enumeration.
pub struct LambdaSolver {
    schedule: ScaleSchedule,
    dn: DnSubspace,
    window_points: Vec<Z6Vec>,
    dist: Vec<f64>,
    cluster: Vec<Z6Vec>,
    slice_index: Vec<[[usize; 4]; 4]>,
    pub max_slices: usize,
    /// Smallest distance between distinct window points.
    pub delta: f64,
    minima: HashMap<u64, SliceMinimum>,
}

impl LambdaSolver {
    /// Requires a one-stage schedule. `scale` multiplies every zero-section
    /// distance.
    pub fn new(schedule: &ScaleSchedule, dn: &DnSubspace, scale: f64, tsp_cap: usize) -> Result<Self> {
        if schedule.stages().len() != 1 {
            return Err(Error::InvalidInput("slice enumeration needs a one-stage schedule".into()));
        }
        let stage = schedule.stage(1)?;
        let k = stage.points.len();
        if dn.index_len() != k {
            return Err(Error::DimensionMismatch(format!("code length {} for a cluster of {k} points", dn.index_len())));
        }
        let window = schedule.window();
        if window.len() > MAX_WINDOW {
            return Err(Error::capacity("window", MAX_WINDOW as u64, format!("window of {} points", window.len())));
        }
        let (ic, yc, _) = schedule.coordinates(1)?;
        let metric = ZeroSectionZ::new(window.clone()).scaled(scale);
        let window_points: Vec<Z6Vec> = Z6Vec::enumerate_all(window.len()).collect();
        let wn = window_points.len();
        let mut dist = vec![0.0; wn * wn];
        let mut delta = f64::INFINITY;
        for i in 0..wn {
            for j in 0..wn {
                let d = crate::tsmetric::PointMetric::dist(&metric, &window_points[i], &window_points[j]);
                dist[i * wn + j] = d;
                if i != j {
                    delta = delta.min(d);
                }
            }
        }
        let cluster: Vec<Z6Vec> = Z6Vec::enumerate_all(k).collect();
        let slice_index = cluster
            .iter()
            .map(|p| {
                std::array::from_fn(|t| {
                    std::array::from_fn(|s| {
                        let mut w = Z6Vec::zero(window.len());
                        for (kk, &c) in ic.iter().enumerate() {
                            w.set(c, p.get(kk));
                        }
                        w.set(yc, SLICE_VALUES[t][s]);
                        w.index()
                    })
                })
            })
            .collect();
        let mut solver = LambdaSolver {
            schedule: schedule.clone(),
            dn: dn.clone(),
            window_points,
            dist,
            cluster,
            slice_index,
            max_slices: (tsp_cap / 4).min(3),
            delta,
            minima: HashMap::new(),
        };
        solver.enumerate();
        Ok(solver)
    }

    fn d(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.window_points.len() + j]
    }

    fn enumerate(&mut self) {
        let sigs: Vec<u64> = self.cluster.iter().map(|p| self.dn.point_signature(p)).collect();
        let mut best: HashMap<u64, (f64, Vec<(usize, u8)>)> = HashMap::new();
        let mut chosen: Vec<(usize, u8)> = Vec::new();
        // Growing the slice count level by level lets small configurations
        // prune the large ones.
        for size in 1..=self.max_slices {
            self.recurse(size, 0, 0, 0, &sigs, &mut chosen, &mut best);
        }
        self.minima = best
            .into_iter()
            .map(|(s, (v, sl))| {
                let slices = sl.into_iter().map(|(i, t)| (self.cluster[i].clone(), t)).collect();
                (s, SliceMinimum { value: v, slices })
            })
            .collect();
        self.minima.insert(0, SliceMinimum { value: 0.0, slices: Vec::new() });
    }

    #[allow(clippy::too_many_arguments)]
    fn recurse(&self, size: usize, start: usize, alpha: u64, beta: u64, sigs: &[u64], chosen: &mut Vec<(usize, u8)>, best: &mut HashMap<u64, (f64, Vec<(usize, u8)>)>) {
        if chosen.len() == size {
            if beta == 0 && alpha != 0 {
                self.evaluate(alpha, chosen, best);
            }
            return;
        }
        for i in start..self.cluster.len() {
            for t in 1u8..4 {
                chosen.push((i, t));
                let a = if t & 1 == 1 { alpha ^ sigs[i] } else { alpha };
                let b = if t & 2 == 2 { beta ^ sigs[i] } else { beta };
                self.recurse(size, i + 1, a, b, sigs, chosen, best);
                chosen.pop();
            }
        }
    }

    fn evaluate(&self, alpha: u64, chosen: &[(usize, u8)], best: &mut HashMap<u64, (f64, Vec<(usize, u8)>)>) {
        let mut nodes = vec![0usize];
        for &(i, t) in chosen {
            nodes.extend(self.slice_index[i][t as usize].iter().copied().filter(|&q| q != 0));
        }
        let current = best.get(&alpha).map_or(f64::INFINITY, |(v, _)| *v);
        // Any tour through a and b is at least as long as the triangle pin, a, b.
        let mut lb: f64 = 0.0;
        for (k, &a) in nodes.iter().enumerate() {
            for &b in &nodes[k..] {
                lb = lb.max(self.d(0, a) + self.d(a, b) + self.d(b, 0));
            }
        }
        if current <= lb + 1.0 {
            return;
        }
        let table: Vec<Vec<f64>> = nodes.iter().map(|&a| nodes.iter().map(|&b| self.d(a, b)).collect()).collect();
        let value = held_karp(&table) + 1.0;
        if value < current {
            best.insert(alpha, (value, chosen.to_vec()));
        }
    }

    /// Minimum over `X ∈ Q(Z) + U_1` with at most `max_slices` active slices,
    /// for any `Z` of signature `sig`.
    pub fn minimum(&self, sig: u64) -> Option<&SliceMinimum> {
        self.minima.get(&sig)
    }

    /// Any shift with more active slices covers at least `4(max_slices + 1) − 1`
    /// points off the pin, so its tour is at least this long.
    pub fn certified_floor(&self) -> f64 {
        4.0 * (self.max_slices as f64 + 1.0) * self.delta + 1.0
    }

    /// The minimizer as a dense function on the window.
    pub fn minimizer_vector(&self, space: &TruncatedFunctionSpace, min: &SliceMinimum) -> Result<Gf2Vec> {
        let mut f = Gf2Vec::zero(space.universe());
        for (p, t) in &min.slices {
            let i = self.cluster.iter().position(|c| c == p).expect("cluster point");
            for q in self.slice_index[i][*t as usize] {
                f.flip(q);
            }
        }
        Ok(f)
    }

    pub fn schedule(&self) -> &ScaleSchedule {
        &self.schedule
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LambdaRow {
    pub left: CubeFn<Z6Vec>,
    pub right: CubeFn<Z6Vec>,
    /// Zero-section quotient TS between the images.
    pub lhs: f64,
    /// `TS_Ham/D^⊥` between the cosets.
    pub rhs: f64,
    /// `lhs / (r_n · rhs)`; `1` when both vanish.
    pub ratio: f64,
    pub slices: usize,
    /// The dense rank test agrees that the minimizer lies in `Q(Z) + U_1`.
    pub member_check: bool,
    pub inconclusive: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LambdaReport {
    pub r: f64,
    pub m: f64,
    pub certified_floor: f64,
    pub rows: Vec<LambdaRow>,
}

impl LambdaRow {
    pub fn sandwich_holds(&self, r: f64, m: f64) -> bool {
        r * self.rhs <= self.lhs + 1e-9 && self.lhs <= 4.0 * m * r * self.rhs + 1e-9
    }
}

impl LambdaReport {
    pub fn inconclusive(&self) -> usize {
        self.rows.iter().filter(|r| r.inconclusive).count()
    }

    pub fn pass(&self) -> bool {
        self.rows.iter().all(|row| !row.inconclusive && row.member_check && row.sandwich_holds(self.r, self.m))
    }

    pub fn min_ratio(&self) -> f64 {
        self.rows.iter().filter(|r| !r.rhs.eq(&0.0)).map(|r| r.ratio).fold(f64::INFINITY, f64::min)
    }

    pub fn max_ratio(&self) -> f64 {
        self.rows.iter().filter(|r| !r.rhs.eq(&0.0)).map(|r| r.ratio).fold(0.0, f64::max)
    }
}

/// Exact `TS_Ham/D^⊥(𝟘, Z)` on `Z₆^I`.
pub fn ts_ham_quotient(dn: &DnSubspace, z: &CubeFn<Z6Vec>, budget: SearchBudget) -> Result<f64> {
    let k = dn.index_len();
    let ps = PinnedSpace::new(HammingZ6, Z6Vec::zero(k));
    let t0 = ts_pinned(&ps, &CubeFn::zero(), z, budget.tsp_cap)?;
    if t0 == 0.0 {
        return Ok(0.0);
    }
    // A minimizer X and Z both have tours of length at most t0 − 1, so the
    // shift X + Z has at most 2(t0 − 1) points, all within (t0 − 1)/2.
    let bound = QuotientBound {
        max_support: 2 * t0 as usize,
        radius: t0 / 2.0,
    };
    let region: Vec<Z6Vec> = Z6Vec::enumerate_all(k).collect();
    let res = ts_quotient(&ps, &region, |w| dn.dn_membership(w), z, &CubeFn::zero(), &bound, &[], budget)?;
    Ok(res.value)
}

/// Checks `r_n·rhs ≤ lhs ≤ 4M·r_n·rhs` for each coset pair at stage `n`.
pub fn lambda_embedding_check(schedule: &ScaleSchedule, n: usize, dn: &DnSubspace, pairs: &[(CubeFn<Z6Vec>, CubeFn<Z6Vec>)], budget: SearchBudget) -> Result<LambdaReport> {
    let stage = schedule.stage(n)?;
    let r = stage.r;
    if n != 1 || schedule.stages().len() != 1 {
        // Lower stages add cylinders the slice enumeration does not model.
        let rows = pairs
            .iter()
            .map(|(a, b)| LambdaRow {
                left: a.clone(),
                right: b.clone(),
                lhs: f64::NAN,
                rhs: f64::NAN,
                ratio: f64::NAN,
                slices: 0,
                member_check: false,
                inconclusive: true,
            })
            .collect();
        return Ok(LambdaReport {
            r,
            m: schedule.m(),
            certified_floor: f64::NAN,
            rows,
        });
    }
    let solver = LambdaSolver::new(schedule, dn, 1.0, budget.tsp_cap)?;
    let space = TruncatedFunctionSpace::for_schedule(schedule)?;
    let u1 = build_truncated_un(&space, schedule, 1, Some(dn), false)?;
    let floor = solver.certified_floor();
    let mut rows = Vec::new();
    for (a, b) in pairs {
        let z = a.add(b);
        let sig = dn.signature(&z);
        let rhs = ts_ham_quotient(dn, &z, budget)?;
        let row = match solver.minimum(sig) {
            Some(min) => {
                let x = solver.minimizer_vector(&space, min)?;
                let qz = q_vector(&space, schedule, 1, &z, 0)?;
                let member_check = u1.contains(&x.try_add(&qz)?)?;
                LambdaRow {
                    left: a.clone(),
                    right: b.clone(),
                    lhs: min.value,
                    rhs,
                    ratio: if rhs == 0.0 && min.value == 0.0 { 1.0 } else { min.value / (r * rhs) },
                    slices: min.slices.len(),
                    member_check,
                    inconclusive: min.value > floor,
                }
            }
            None => LambdaRow {
                left: a.clone(),
                right: b.clone(),
                lhs: f64::NAN,
                rhs,
                ratio: f64::NAN,
                slices: 0,
                member_check: false,
                inconclusive: true,
            },
        };
        rows.push(row);
    }
    Ok(LambdaReport {
        r,
        m: schedule.m(),
        certified_floor: floor,
        rows,
    })
}

/// `(lhs, lhs')` per signature, with `lhs'` computed after multiplying every
/// zero-section distance by `factor`.
pub fn lambda_scaling_check(schedule: &ScaleSchedule, dn: &DnSubspace, factor: f64, tsp_cap: usize) -> Result<Vec<(u64, f64, f64)>> {
    let base = LambdaSolver::new(schedule, dn, 1.0, tsp_cap)?;
    let scaled = LambdaSolver::new(schedule, dn, factor, tsp_cap)?;
    let mut out: Vec<(u64, f64, f64)> = base
        .minima
        .iter()
        .map(|(s, m)| (*s, m.value, scaled.minimum(*s).map_or(f64::NAN, |x| x.value)))
        .collect();
    out.sort_by_key(|e| e.0);
    Ok(out)
}

/// One stage of `φ_n = λ_n ∘ κ_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Main2Row {
    pub stage: usize,
    pub points: usize,
    pub r: f64,
    pub distortion: f64,
    /// Smallest ratio of image distance to cube-quotient distance, over `r_n`.
    pub expansion_over_r: f64,
    pub bound: f64,
    pub inconclusive: bool,
}

impl Main2Row {
    pub fn pass(&self) -> bool {
        !self.inconclusive && self.distortion <= self.bound && self.expansion_over_r >= 1.0 && self.expansion_over_r <= self.bound
    }
}

/// Composes `κ_n` with the one-stage `λ_n` check. `codes[k]` belongs to stage
/// `k + 1`.
pub fn build_main2_instance(schedule: &ScaleSchedule, codes: &[Code], budget: SearchBudget) -> Result<Vec<Main2Row>> {
    let mut rows = Vec::new();
    for (k, code) in codes.iter().enumerate().take(schedule.stages().len()) {
        let n = k + 1;
        let stage = schedule.stage(n)?;
        let dn = DnSubspace::new(code.clone())?;
        let reps = code.coset_representatives()?;
        let bound = 8.0 * schedule.m();
        if schedule.stages().len() != 1 {
            rows.push(Main2Row {
                stage: n,
                points: reps.len(),
                r: stage.r,
                distortion: f64::NAN,
                expansion_over_r: f64::NAN,
                bound,
                inconclusive: true,
            });
            continue;
        }
        let solver = LambdaSolver::new(schedule, &dn, 1.0, budget.tsp_cap)?;
        let floor = solver.certified_floor();
        let (mut lo, mut hi, mut inconclusive) = (f64::INFINITY, 0.0f64, false);
        for (i, a) in reps.iter().enumerate() {
            for b in &reps[i + 1..] {
                let sig = dn.signature(&dn.kappa(a).add(&dn.kappa(b)));
                let d = code.quotient_distance(a, b)? as f64;
                match solver.minimum(sig) {
                    Some(m) if m.value <= floor => {
                        lo = lo.min(m.value / d);
                        hi = hi.max(m.value / d);
                    }
                    _ => inconclusive = true,
                }
            }
        }
        rows.push(Main2Row {
            stage: n,
            points: reps.len(),
            r: stage.r,
            distortion: if reps.len() < 2 { 1.0 } else { hi / lo },
            expansion_over_r: if reps.len() < 2 { 1.0 } else { lo / stage.r },
            bound,
            inconclusive,
        });
    }
    Ok(rows)
}

/// `(diam_n, r_n)` per stage, the distortion exponent `η` and the
/// bi-Lipschitz constant `L`.
#[derive(Clone, Debug, PartialEq)]
pub struct CompressionBoundInput {
    pub stages: Vec<(f64, f64)>,
    pub eta: f64,
    pub lipschitz: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompressionBound {
    /// Estimated growth exponent of `r_n` against `diam_n`.
    pub eps_hat: f64,
    pub power_sse: f64,
    pub polylog_sse: f64,
    pub bound: f64,
}

fn fit_sse(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let sse = xs.iter().zip(ys).map(|(x, y)| (y - my - slope * (x - mx)).powi(2)).sum();
    (slope, sse)
}

/// Upper bound on the compression exponent from a finite stage table.
///
/// `ln r_n` is fitted against `ln diam_n` and against `ln ln diam_n`. When the
/// polylogarithmic model fits at least as well, `ε̂ = 0`; otherwise `ε̂` is
/// the power-law slope. The bound is `1 − η/(1 + ε̂)`.
pub fn compression_upper_bound(input: &CompressionBoundInput) -> Result<CompressionBound> {
    if input.stages.len() < 2 {
        return Err(Error::InvalidInput("at least two stages are needed".into()));
    }
    if !(0.0..=1.0).contains(&input.eta) || !(input.lipschitz >= 1.0) {
        return Err(Error::InvalidInput("need 0 ≤ η ≤ 1 and L ≥ 1".into()));
    }
    for w in input.stages.windows(2) {
        if !(w[1].0 > w[0].0) {
            return Err(Error::InvalidInput("diameters must increase".into()));
        }
    }
    if input.stages.iter().any(|&(d, r)| !(d > 1.0) || !(r >= 1.0)) {
        return Err(Error::InvalidInput("need diam_n > 1 and r_n ≥ 1".into()));
    }
    let ly: Vec<f64> = input.stages.iter().map(|s| s.1.ln()).collect();
    let lx: Vec<f64> = input.stages.iter().map(|s| s.0.ln()).collect();
    let llx: Vec<f64> = lx.iter().map(|x| x.ln()).collect();
    let (slope, power_sse) = fit_sse(&lx, &ly);
    let (_, polylog_sse) = fit_sse(&llx, &ly);
    let eps_hat = if polylog_sse <= power_sse + 1e-12 { 0.0 } else { slope.max(0.0) };
    let bound = (1.0 - input.eta / (1.0 + eps_hat)).clamp(0.0, 1.0);
    Ok(CompressionBound {
        eps_hat,
        power_sse,
        polylog_sse,
        bound,
    })
}

impl CompressionBoundInput {
    /// `eta=`, `L=` lines and `diam,r` rows; `#` starts a comment.
    pub fn from_text(text: &str) -> Result<Self> {
        let (mut eta, mut l, mut stages) = (None, 1.0, Vec::new());
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let num = |s: &str| s.trim().parse::<f64>().map_err(|_| Error::parse(k + 1, format!("bad number {s:?}")));
            if let Some(v) = line.strip_prefix("eta=") {
                eta = Some(num(v)?);
            } else if let Some(v) = line.strip_prefix("L=") {
                l = num(v)?;
            } else if let Some((d, r)) = line.split_once(',') {
                stages.push((num(d)?, num(r)?));
            } else {
                return Err(Error::parse(k + 1, format!("unexpected line {line:?}")));
            }
        }
        let eta = eta.ok_or_else(|| Error::parse(1, "missing eta= line"))?;
        Ok(CompressionBoundInput { stages, eta, lipschitz: l })
    }
}
