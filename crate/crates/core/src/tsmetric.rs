//! Finite metric spaces, quotient metrics and the pinned traveling-salesman
//! metric on finitely supported `Z₂`-valued functions.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::gf2::{Gf2Subspace, Gf2Vec, Universe, Z6Vec};
use crate::groups::{self, ElemPayload, GroupPresentation, WordBall, WordMetric};

/// Default cap on the number of support points handed to exact TSP.
pub const DEFAULT_TSP_CAP: usize = 14;
/// Default cap on search nodes for [`ts_quotient`].
pub const DEFAULT_SEARCH_NODES: u64 = 50_000_000;

const EPS: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct FiniteMetricSpace {
    labels: Vec<String>,
    dist: Vec<f64>,
    d_min: Option<f64>,
}

impl FiniteMetricSpace {
    /// Validates symmetry, zero diagonal, nonnegativity, the triangle
    /// inequality and, if given, the `d_min` separation.
    pub fn new(labels: Vec<String>, rows: Vec<Vec<f64>>, d_min: Option<f64>) -> Result<Self> {
        let n = labels.len();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch(format!("{n} labels but distance matrix is not {n}x{n}")));
        }
        let dist: Vec<f64> = rows.into_iter().flatten().collect();
        let space = FiniteMetricSpace { labels, dist, d_min };
        space.validate()?;
        Ok(space)
    }

    pub fn from_fn(labels: Vec<String>, d_min: Option<f64>, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let n = labels.len();
        let rows = (0..n).map(|i| (0..n).map(|j| f(i, j)).collect()).collect();
        Self::new(labels, rows, d_min)
    }

    fn validate(&self) -> Result<()> {
        let n = self.len();
        for i in 0..n {
            if self.dist(i, i).abs() > EPS {
                return Err(Error::InvalidInput(format!("nonzero diagonal at {i}")));
            }
            for j in 0..n {
                let d = self.dist(i, j);
                if !d.is_finite() || d < 0.0 {
                    return Err(Error::InvalidInput(format!("bad distance {d} at ({i},{j})")));
                }
                if (d - self.dist(j, i)).abs() > EPS {
                    return Err(Error::InvalidInput(format!("asymmetric at ({i},{j})")));
                }
                if i != j {
                    if d <= EPS {
                        return Err(Error::InvalidInput(format!("distinct points {i},{j} at distance 0")));
                    }
                    if let Some(m) = self.d_min {
                        if d < m - EPS {
                            return Err(Error::InvalidInput(format!("distance {d} at ({i},{j}) below d_min {m}")));
                        }
                    }
                }
            }
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if self.dist(i, j) > self.dist(i, k) + self.dist(k, j) + EPS * (1.0 + self.dist(i, j)) {
                        return Err(Error::InvalidInput(format!("triangle inequality fails for ({i},{k},{j})")));
                    }
                }
            }
        }
        Ok(())
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

    pub fn d_min(&self) -> Option<f64> {
        self.d_min
    }

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.len() + j]
    }

    pub fn diameter(&self) -> f64 {
        self.dist.iter().copied().fold(0.0, f64::max)
    }

    /// Smallest distance between distinct points, or `None` for fewer than two points.
    pub fn min_separation(&self) -> Option<f64> {
        let n = self.len();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| self.dist(i, j))
            .min_by(f64::total_cmp)
    }

    pub fn rescaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0) {
            return Err(Error::InvalidInput("scale factor must be positive".into()));
        }
        Ok(FiniteMetricSpace {
            labels: self.labels.clone(),
            dist: self.dist.iter().map(|d| d * factor).collect(),
            d_min: self.d_min.map(|m| m * factor),
        })
    }

    /// Text format: optional `#` comments, a `n=<points>` header, an optional
    /// `labels=` line of whitespace-separated names, then `n` rows of distances.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines.next().ok_or_else(|| Error::parse(1, "missing `n=<points>` header"))?;
        let n: usize = header
            .strip_prefix("n=")
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Error::parse(hline, format!("expected `n=<points>`, found {header:?}")))?;
        let mut labels: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let mut rows = Vec::with_capacity(n);
        let mut last = hline;
        for (lineno, line) in lines {
            last = lineno;
            if let Some(rest) = line.strip_prefix("labels=") {
                if !rows.is_empty() {
                    return Err(Error::parse(lineno, "labels must precede distance rows"));
                }
                labels = rest.split_whitespace().map(str::to_string).collect();
                if labels.len() != n {
                    return Err(Error::parse(lineno, format!("expected {n} labels, found {}", labels.len())));
                }
                continue;
            }
            let row = line
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<f64>().map_err(|_| Error::parse(lineno, format!("not a number: {s:?}"))))
                .collect::<Result<Vec<_>>>()?;
            if row.len() != n {
                return Err(Error::parse(lineno, format!("expected {n} entries, found {}", row.len())));
            }
            if rows.len() == n {
                return Err(Error::parse(lineno, format!("more than {n} rows")));
            }
            rows.push(row);
        }
        if rows.len() != n {
            return Err(Error::parse(last, format!("expected {n} rows, found {}", rows.len())));
        }
        Self::new(labels, rows, None).map_err(|e| match e {
            Error::InvalidInput(m) | Error::DimensionMismatch(m) => Error::parse(last, m),
            other => other,
        })
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("n={}\nlabels={}\n", self.len(), self.labels.join(" "));
        for i in 0..self.len() {
            let row: Vec<String> = (0..self.len()).map(|j| format!("{}", self.dist(i, j))).collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        s
    }
}

/// Quotient by a partition whose block distances are realized from every
/// starting point.
pub fn quotient_metric(space: &FiniteMetricSpace, partition: &[Vec<usize>]) -> Result<FiniteMetricSpace> {
    let n = space.len();
    let mut seen = vec![false; n];
    for block in partition {
        if block.is_empty() {
            return Err(Error::InvalidInput("empty block".into()));
        }
        for &x in block {
            if x >= n || seen[x] {
                return Err(Error::InvalidInput(format!("point {x} missing or repeated in partition")));
            }
            seen[x] = true;
        }
    }
    if let Some(x) = seen.iter().position(|s| !s) {
        return Err(Error::InvalidInput(format!("point {x} is not covered by the partition")));
    }
    let k = partition.len();
    let mut rows = vec![vec![0.0; k]; k];
    for p in 0..k {
        for q in 0..k {
            if p == q {
                continue;
            }
            let block_min = partition[p]
                .iter()
                .flat_map(|&x| partition[q].iter().map(move |&y| (x, y)))
                .map(|(x, y)| space.dist(x, y))
                .fold(f64::INFINITY, f64::min);
            for &x in &partition[p] {
                let from_x = partition[q].iter().map(|&y| space.dist(x, y)).fold(f64::INFINITY, f64::min);
                if (from_x - block_min).abs() > EPS * (1.0 + block_min) {
                    return Err(Error::NotRealizable {
                        from_block: p,
                        to_block: q,
                        point: x,
                    });
                }
            }
            rows[p][q] = block_min;
        }
    }
    let labels = partition
        .iter()
        .map(|b| {
            let names: Vec<&str> = b.iter().map(|&x| space.labels()[x].as_str()).collect();
            format!("{{{}}}", names.join(","))
        })
        .collect();
    FiniteMetricSpace::new(labels, rows, None)
}

/// A metric on an arbitrary point type.
pub trait PointMetric {
    type Point: Clone + Ord + fmt::Debug;
    fn dist(&self, a: &Self::Point, b: &Self::Point) -> f64;
}

impl PointMetric for FiniteMetricSpace {
    type Point = usize;
    fn dist(&self, a: &usize, b: &usize) -> f64 {
        FiniteMetricSpace::dist(self, *a, *b)
    }
}

/// `Z₆^I` with the sum of per-coordinate cycle distances.
#[derive(Clone, Copy, Debug, Default)]
pub struct HammingZ6;

impl PointMetric for HammingZ6 {
    type Point = Z6Vec;
    fn dist(&self, a: &Z6Vec, b: &Z6Vec) -> f64 {
        a.hamming_distance(b) as f64
    }
}

/// The zero section of `Z₆ ≀ Z` restricted to lamp configurations on a
/// window of positions; coordinate `i` of a point is the lamp at `positions[i]`.
#[derive(Clone, Debug)]
pub struct ZeroSectionZ {
    positions: Vec<i64>,
    scale: f64,
}

impl ZeroSectionZ {
    pub fn new(positions: Vec<i64>) -> Self {
        ZeroSectionZ { positions, scale: 1.0 }
    }

    /// The same metric multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        ZeroSectionZ {
            positions: self.positions.clone(),
            scale: self.scale * factor,
        }
    }

    pub fn positions(&self) -> &[i64] {
        &self.positions
    }

    pub fn unscaled_dist(&self, a: &Z6Vec, b: &Z6Vec) -> u64 {
        let diff = b.try_sub(a).expect("points share the window");
        groups::lamplighter_distance(
            self.positions.iter().zip(diff.entries()).map(|(&p, &v)| (p, groups::cyclic_weight(v, 6))),
            0,
        )
    }
}

impl PointMetric for ZeroSectionZ {
    type Point = Z6Vec;
    fn dist(&self, a: &Z6Vec, b: &Z6Vec) -> f64 {
        self.scale * self.unscaled_dist(a, b) as f64
    }
}

/// Finitely supported `Z₂`-valued function, stored as its support.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CubeFn<P: Ord> {
    support: BTreeSet<P>,
}

impl<P: Ord> Default for CubeFn<P> {
    fn default() -> Self {
        CubeFn {
            support: BTreeSet::new(),
        }
    }
}

impl<P: Ord + Clone> CubeFn<P> {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Points listed an even number of times cancel.
    pub fn from_points<I: IntoIterator<Item = P>>(points: I) -> Self {
        let mut f = Self::zero();
        for p in points {
            f.toggle(p);
        }
        f
    }

    pub fn delta(p: P) -> Self {
        Self::from_points([p])
    }

    pub fn toggle(&mut self, p: P) {
        if !self.support.remove(&p) {
            self.support.insert(p);
        }
    }

    pub fn value(&self, p: &P) -> bool {
        self.support.contains(p)
    }

    pub fn support(&self) -> &BTreeSet<P> {
        &self.support
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_empty()
    }

    pub fn add(&self, other: &CubeFn<P>) -> CubeFn<P> {
        CubeFn {
            support: self.support.symmetric_difference(&other.support).cloned().collect(),
        }
    }
}

impl<P: Ord + fmt::Display> fmt::Display for CubeFn<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, p) in self.support.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str("}")
    }
}

/// A point metric with a distinguished pin.
#[derive(Clone, Debug)]
pub struct PinnedSpace<M: PointMetric> {
    pub metric: M,
    pub pin: M::Point,
}

impl<M: PointMetric> PinnedSpace<M> {
    pub fn new(metric: M, pin: M::Point) -> Self {
        PinnedSpace { metric, pin }
    }
}

/// Length of the shortest closed walk from `d`'s index 0 through every other
/// index, by Held-Karp dynamic programming.
pub fn held_karp(d: &[Vec<f64>]) -> f64 {
    let m = d.len().saturating_sub(1);
    match m {
        0 => return 0.0,
        1 => return d[0][1] + d[1][0],
        _ => {}
    }
    let full = 1usize << m;
    let mut dp = vec![f64::INFINITY; full * m];
    for j in 0..m {
        dp[(1 << j) * m + j] = d[0][j + 1];
    }
    for mask in 1..full {
        for j in 0..m {
            let cur = dp[mask * m + j];
            if mask >> j & 1 == 0 || !cur.is_finite() {
                continue;
            }
            for k in 0..m {
                if mask >> k & 1 == 1 {
                    continue;
                }
                let next = (mask | 1 << k) * m + k;
                let cand = cur + d[j + 1][k + 1];
                if cand < dp[next] {
                    dp[next] = cand;
                }
            }
        }
    }
    (0..m)
        .map(|j| dp[(full - 1) * m + j] + d[j + 1][0])
        .fold(f64::INFINITY, f64::min)
}

/// Shortest closed tour from the pin covering `points`. The pin itself is
/// free to cover.
pub fn pinned_tour<M: PointMetric>(ps: &PinnedSpace<M>, points: &BTreeSet<M::Point>, cap: usize) -> Result<f64> {
    let mut nodes = vec![ps.pin.clone()];
    nodes.extend(points.iter().filter(|p| **p != ps.pin).cloned());
    if nodes.len() - 1 > cap {
        return Err(Error::capacity(
            "tsp",
            cap as u64,
            format!("tour over {} support points", nodes.len() - 1),
        ));
    }
    let d: Vec<Vec<f64>> = nodes.iter().map(|a| nodes.iter().map(|b| ps.metric.dist(a, b)).collect()).collect();
    Ok(held_karp(&d))
}

/// `0` if `A = B`, else the shortest pinned tour covering `spt(A + B)`, plus one.
pub fn ts_pinned<M: PointMetric>(ps: &PinnedSpace<M>, a: &CubeFn<M::Point>, b: &CubeFn<M::Point>, cap: usize) -> Result<f64> {
    let diff = a.add(b);
    if diff.is_zero() {
        return Ok(0.0);
    }
    Ok(pinned_tour(ps, diff.support(), cap)? + 1.0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct InvarianceReport {
    pub checked: usize,
    pub counterexample: Option<String>,
}

impl InvarianceReport {
    pub fn pass(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// For each triple `(V, W, C)` checks `ts(V + C, W + C) = ts(V, W)`, and
/// monotonicity against `(V, W + C')` where `C'` is `C` off `spt(V + W)`.
pub fn ts_addition_invariance_check<M: PointMetric>(
    ps: &PinnedSpace<M>,
    samples: &[(CubeFn<M::Point>, CubeFn<M::Point>, CubeFn<M::Point>)],
    cap: usize,
) -> Result<InvarianceReport> {
    for (i, (v, w, c)) in samples.iter().enumerate() {
        let base = ts_pinned(ps, v, w, cap)?;
        let shifted = ts_pinned(ps, &v.add(c), &w.add(c), cap)?;
        if (base - shifted).abs() > EPS {
            return Ok(InvarianceReport {
                checked: i,
                counterexample: Some(format!("sample {i}: ts = {base} but shifted ts = {shifted}")),
            });
        }
        let diff = v.add(w);
        let extra = CubeFn::from_points(c.support().iter().filter(|p| !diff.value(p)).cloned());
        let bigger = ts_pinned(ps, v, &w.add(&extra), cap)?;
        if bigger < base - EPS {
            return Ok(InvarianceReport {
                checked: i,
                counterexample: Some(format!("sample {i}: larger support gives {bigger} < {base}")),
            });
        }
    }
    Ok(InvarianceReport {
        checked: samples.len(),
        counterexample: None,
    })
}

/// Search region for [`ts_quotient`]: shifts `W` must have at most
/// `max_support` points, all within `radius` of the pin.
#[derive(Clone, Debug, PartialEq)]
pub struct QuotientBound {
    pub max_support: usize,
    pub radius: f64,
}

#[derive(Clone, Debug)]
pub struct QuotientResult<P: Ord> {
    pub value: f64,
    /// The minimizing shift `W`.
    pub witness: CubeFn<P>,
    pub bound: QuotientBound,
    /// Candidate points of the region that lie within the bound's radius.
    pub region_size: usize,
    pub nodes: u64,
}

#[derive(Clone, Copy, Debug)]
pub struct SearchBudget {
    pub tsp_cap: usize,
    pub nodes: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            tsp_cap: DEFAULT_TSP_CAP,
            nodes: DEFAULT_SEARCH_NODES,
        }
    }
}

/// Minimum of `ts(A, B + W)` over all `W` with `member(W)` whose support
/// lies in `region`, within `bound`.
///
/// Exhaustive branch and bound over `X = A + B + W`: tours are monotone in
/// their point set, so a partial `X` whose tour already reaches the best value
/// is never extended. `hints` are extra candidate shifts tried first.
#[allow(clippy::too_many_arguments)]
pub fn ts_quotient<M, F>(
    ps: &PinnedSpace<M>,
    region: &[M::Point],
    member: F,
    a: &CubeFn<M::Point>,
    b: &CubeFn<M::Point>,
    bound: &QuotientBound,
    hints: &[CubeFn<M::Point>],
    budget: SearchBudget,
) -> Result<QuotientResult<M::Point>>
where
    M: PointMetric,
    F: Fn(&CubeFn<M::Point>) -> bool,
{
    let target = a.add(b);
    let mut allowed: BTreeSet<M::Point> = BTreeSet::new();
    for p in region {
        if ps.metric.dist(&ps.pin, p) <= bound.radius + EPS {
            allowed.insert(p.clone());
        }
    }
    let in_bound = |w: &CubeFn<M::Point>| w.len() <= bound.max_support && w.support().iter().all(|p| allowed.contains(p));

    let ts_of = |x: &CubeFn<M::Point>| -> Result<f64> {
        if x.is_zero() {
            Ok(0.0)
        } else {
            Ok(pinned_tour(ps, x.support(), budget.tsp_cap)? + 1.0)
        }
    };

    let mut best = f64::INFINITY;
    let mut best_w = CubeFn::zero();
    if target.len() <= budget.tsp_cap + 1 {
        best = ts_of(&target)?;
    }
    for w in hints {
        if in_bound(w) && member(w) {
            let v = ts_of(&target.add(w))?;
            if v < best - EPS {
                best = v;
                best_w = w.clone();
            }
        }
    }
    let mut nodes = 0u64;
    let result = |best: f64, best_w: CubeFn<M::Point>, nodes: u64| -> Result<QuotientResult<M::Point>> {
        if !best.is_finite() {
            return Err(Error::capacity(
                "tsp",
                budget.tsp_cap as u64,
                "no candidate within the tour cap".to_string(),
            ));
        }
        Ok(QuotientResult {
            value: best,
            witness: best_w,
            bound: bound.clone(),
            region_size: allowed.len(),
            nodes,
        })
    };
    if best == 0.0 {
        return result(best, best_w, nodes);
    }

    // A point p can sit in an improving X only if its round trip from the pin
    // is shorter than the best tour so far.
    let usable = |p: &M::Point, best: f64| 2.0 * ps.metric.dist(&ps.pin, p) < best - 1.0 - EPS;
    let mut pool: Vec<M::Point> = allowed
        .iter()
        .chain(target.support().iter())
        .filter(|p| usable(p, best))
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    pool.sort_by(|x, y| ps.metric.dist(&ps.pin, x).total_cmp(&ps.metric.dist(&ps.pin, y)).then_with(|| x.cmp(y)));
    let forced: Vec<&M::Point> = target.support().iter().filter(|p| !pool.contains(p)).collect();
    if forced.iter().any(|p| !allowed.contains(*p)) || forced.len() > bound.max_support {
        return result(best, best_w, nodes);
    }

    struct Frame {
        next: usize,
        chosen: Vec<usize>,
    }
    let mut stack = vec![Frame {
        next: 0,
        chosen: Vec::new(),
    }];
    let pool_in_target: Vec<bool> = pool.iter().map(|p| target.value(p)).collect();
    while let Some(frame) = stack.pop() {
        nodes += 1;
        if nodes > budget.nodes {
            return Err(Error::capacity(
                "search",
                budget.nodes,
                format!("quotient search over {} candidate points", pool.len()),
            ));
        }
        let x = CubeFn::from_points(frame.chosen.iter().map(|&i| pool[i].clone()));
        let w = target.add(&x);
        if w.len() <= bound.max_support && w.support().iter().all(|p| allowed.contains(p)) && member(&w) {
            let v = ts_of(&x)?;
            if v < best - EPS {
                best = v;
                best_w = w;
            }
        }
        let outside = frame.chosen.iter().filter(|&&i| !pool_in_target[i]).count();
        for j in (frame.next..pool.len()).rev() {
            if !usable(&pool[j], best) {
                continue;
            }
            if !pool_in_target[j] && forced.len() + outside + 1 > bound.max_support {
                continue;
            }
            let mut chosen = frame.chosen.clone();
            chosen.push(j);
            let pts: BTreeSet<M::Point> = chosen.iter().map(|&i| pool[i].clone()).collect();
            if pts.iter().filter(|p| **p != ps.pin).count() > budget.tsp_cap {
                return Err(Error::capacity(
                    "tsp",
                    budget.tsp_cap as u64,
                    "quotient search needs a larger tour".to_string(),
                ));
            }
            if pinned_tour(ps, &pts, budget.tsp_cap)? + 1.0 >= best - EPS {
                continue;
            }
            stack.push(Frame { next: j + 1, chosen });
        }
    }
    result(best, best_w, nodes)
}

/// Word distance between `(v, e)` and `(w, e)` in a lamplighter group, by
/// closed form when available and otherwise by lookup in `ball`.
pub fn zero_section_distance(
    g: &GroupPresentation,
    ball: Option<&WordBall>,
    v: &[(i64, i64)],
    w: &[(i64, i64)],
) -> Result<u64> {
    let a = g.lamp_elem(v.iter().copied(), 0)?;
    let b = g.lamp_elem(w.iter().copied(), 0)?;
    WordMetric::new(g, ball).distance(&a, &b)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SandwichReport {
    pub group: String,
    pub elements: usize,
    pub pairs: usize,
    /// Extremes of word distance divided by quotient TS over distinct pairs.
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub violations: Vec<String>,
}

impl SandwichReport {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Exhaustive check of `TS/V ≤ d ≤ 2·TS/V` on the zero section of
/// `(Z₂^{Z_m}/V) ⋊ Z_m`, with TS pinned at the identity of the cycle `Z_m`.
pub fn approx_by_ts_sandwich(base_order: u32, v: Option<Gf2Subspace>, budget: usize) -> Result<SandwichReport> {
    let m = base_order as usize;
    let u = Universe::indexed(m);
    let v = v.unwrap_or_else(|| Gf2Subspace::zero(&u));
    let g = if v.dim() == 0 {
        GroupPresentation::lamplighter_cycle(2, base_order)?
    } else {
        GroupPresentation::lamplighter_cycle_quotient(base_order, v.clone())?
    };
    let table = groups::full_distance_table(&g, budget)?;
    let cycle = FiniteMetricSpace::from_fn((0..m).map(|i| i.to_string()).collect(), Some(1.0), |i, j| {
        let k = i.abs_diff(j);
        k.min(m - k) as f64
    })?;
    let ps = PinnedSpace::new(cycle, 0usize);
    let shifts: Vec<CubeFn<usize>> = v
        .elements(1 << 20)?
        .into_iter()
        .map(|s| CubeFn::from_points(s.support()))
        .collect();

    let mut zero_section: Vec<_> = table
        .keys()
        .filter(|x| matches!(x.payload(), ElemPayload::CycleLamps { cursor: 0, .. }))
        .cloned()
        .collect();
    zero_section.sort();
    let lamps_of = |x: &groups::GroupElem| -> CubeFn<usize> {
        match x.payload() {
            ElemPayload::CycleLamps { lamps, .. } => {
                CubeFn::from_points(lamps.iter().enumerate().filter(|(_, l)| **l == 1).map(|(i, _)| i))
            }
            _ => unreachable!("lamplighter cycle elements"),
        }
    };

    let mut report = SandwichReport {
        group: g.name().to_string(),
        elements: table.len(),
        pairs: 0,
        min_ratio: f64::INFINITY,
        max_ratio: 0.0,
        violations: Vec::new(),
    };
    for x in &zero_section {
        let fx = lamps_of(x);
        let x_inv = g.inverse(x)?;
        for y in &zero_section {
            let fy = lamps_of(y);
            let d = *table.get(&g.multiply(&x_inv, y)?).expect("full table covers the group") as f64;
            let mut ts = f64::INFINITY;
            for s in &shifts {
                ts = ts.min(ts_pinned(&ps, &fx, &fy.add(s), DEFAULT_TSP_CAP)?);
            }
            report.pairs += 1;
            if x != y {
                let ratio = d / ts;
                report.min_ratio = report.min_ratio.min(ratio);
                report.max_ratio = report.max_ratio.max(ratio);
            }
            if !(ts <= d + EPS && d <= 2.0 * ts + EPS) && report.violations.len() < 16 {
                report.violations.push(format!("{x} -> {y}: ts/V = {ts}, d = {d}"));
            }
        }
    }
    Ok(report)
}

/// Parses a CubeFn over `Z₆^n`, one point per line written as digits
/// (`0130`) or a comma list (`(0,1,3,0)`).
pub fn parse_z6_cubefn(text: &str, n: usize) -> Result<CubeFn<Z6Vec>> {
    let mut f = CubeFn::zero();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let body = line.trim_start_matches('(').trim_end_matches(')');
        let digits: Vec<u8> = if body.contains(',') {
            body.split(',')
                .map(|s| s.trim().parse::<u8>().map_err(|_| Error::parse(i + 1, format!("bad entry in {line:?}"))))
                .collect::<Result<_>>()?
        } else {
            body.chars()
                .map(|c| c.to_digit(6).map(|d| d as u8).ok_or_else(|| Error::parse(i + 1, format!("bad digit in {line:?}"))))
                .collect::<Result<_>>()?
        };
        if digits.len() != n || digits.iter().any(|d| *d > 5) {
            return Err(Error::parse(i + 1, format!("expected {n} entries in 0..6, found {line:?}")));
        }
        f.toggle(Z6Vec::new(digits));
    }
    Ok(f)
}

/// Helper: indicator of `{e_x : a_x = 1}` inside `Z₆^n`.
pub fn basis_indicator(a: &Gf2Vec) -> CubeFn<Z6Vec> {
    CubeFn::from_points(a.support().map(|x| Z6Vec::basis(a.len(), x)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn brute_tour(d: &[Vec<f64>]) -> f64 {
        fn rec(d: &[Vec<f64>], cur: usize, left: &mut Vec<usize>, acc: f64, best: &mut f64) {
            if left.is_empty() {
                *best = best.min(acc + d[cur][0]);
                return;
            }
            for i in 0..left.len() {
                let nxt = left.remove(i);
                rec(d, nxt, left, acc + d[cur][nxt], best);
                left.insert(i, nxt);
            }
        }
        let mut best = f64::INFINITY;
        let mut left: Vec<usize> = (1..d.len()).collect();
        rec(d, 0, &mut left, 0.0, &mut best);
        best
    }

    fn random_points(rng: &mut ChaCha8Rng, k: usize) -> Vec<(f64, f64)> {
        (0..k).map(|_| (rng.random_range(0.0..10.0), rng.random_range(0.0..10.0))).collect()
    }

    #[test]
    fn held_karp_matches_permutations() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for k in 1..=8 {
            for _ in 0..5 {
                let pts = random_points(&mut rng, k + 1);
                let d: Vec<Vec<f64>> = pts
                    .iter()
                    .map(|a| pts.iter().map(|b| ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()).collect())
                    .collect();
                assert!((held_karp(&d) - brute_tour(&d)).abs() < 1e-9);
            }
        }
    }

    fn hamming_space() -> PinnedSpace<HammingZ6> {
        PinnedSpace::new(HammingZ6, Z6Vec::zero(4))
    }

    #[test]
    fn ts_trivial_cases() {
        let ps = hamming_space();
        let a = CubeFn::from_points([Z6Vec::new([1, 2, 0, 0])]);
        assert_eq!(ts_pinned(&ps, &a, &a, 14).unwrap(), 0.0);
        let x = Z6Vec::new([0, 3, 1, 0]);
        assert_eq!(ts_pinned(&ps, &CubeFn::zero(), &CubeFn::delta(x.clone()), 14).unwrap(), 2.0 * 4.0 + 1.0);
        // the pin alone costs nothing to visit
        assert_eq!(ts_pinned(&ps, &CubeFn::zero(), &CubeFn::delta(Z6Vec::zero(4)), 14).unwrap(), 1.0);
    }

    #[test]
    fn basis_supported_closed_form() {
        let ps = hamming_space();
        for mask in 1u32..16 {
            let u = CubeFn::from_points((0..4).filter(|i| mask >> i & 1 == 1).map(|i| Z6Vec::basis(4, i)));
            let ts = ts_pinned(&ps, &CubeFn::zero(), &u, 14).unwrap();
            assert_eq!(ts, 2.0 * u.len() as f64 + 1.0);
        }
    }

    #[test]
    fn tsp_cap_is_enforced() {
        let ps = PinnedSpace::new(HammingZ6, Z6Vec::zero(2));
        let big = CubeFn::from_points(Z6Vec::enumerate_all(2).take(20));
        assert!(matches!(ts_pinned(&ps, &CubeFn::zero(), &big, 14), Err(Error::Capacity { .. })));
    }

    fn random_fn(rng: &mut ChaCha8Rng, n: usize, max: usize) -> CubeFn<Z6Vec> {
        CubeFn::from_points((0..rng.random_range(0..=max)).map(|_| Z6Vec::new((0..n).map(|_| rng.random_range(0..6u8)))))
    }

    #[test]
    fn addition_invariance_on_random_triples() {
        let ps = PinnedSpace::new(HammingZ6, Z6Vec::zero(2));
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let samples: Vec<_> = (0..100)
            .map(|_| (random_fn(&mut rng, 2, 3), random_fn(&mut rng, 2, 3), random_fn(&mut rng, 2, 3)))
            .collect();
        let report = ts_addition_invariance_check(&ps, &samples, 14).unwrap();
        assert!(report.pass(), "{report:?}");
        assert_eq!(report.checked, 100);
        let zero = vec![(samples[0].0.clone(), samples[0].1.clone(), CubeFn::zero())];
        assert!(ts_addition_invariance_check(&ps, &zero, 14).unwrap().pass());
    }

    #[test]
    fn ts_is_a_metric_on_small_supports() {
        let ps = PinnedSpace::new(HammingZ6, Z6Vec::zero(2));
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let fns: Vec<_> = (0..30).map(|_| random_fn(&mut rng, 2, 3)).collect();
        for a in &fns {
            for b in &fns {
                let ab = ts_pinned(&ps, a, b, 14).unwrap();
                assert_eq!(ab, ts_pinned(&ps, b, a, 14).unwrap());
                assert_eq!(ab == 0.0, a == b);
                for c in fns.iter().take(10) {
                    let via = ts_pinned(&ps, a, c, 14).unwrap() + ts_pinned(&ps, c, b, 14).unwrap();
                    assert!(ab <= via + 1e-9);
                }
            }
        }
    }

    #[test]
    fn quotient_by_zero_is_pinned_ts() {
        let ps = PinnedSpace::new(HammingZ6, Z6Vec::zero(2));
        let region: Vec<_> = Z6Vec::enumerate_all(2).collect();
        let a = CubeFn::from_points([Z6Vec::new([1, 0]), Z6Vec::new([2, 3])]);
        let b = CubeFn::delta(Z6Vec::new([0, 5]));
        let bound = QuotientBound {
            max_support: 4,
            radius: 6.0,
        };
        let r = ts_quotient(&ps, &region, |w| w.is_zero(), &a, &b, &bound, &[], SearchBudget::default()).unwrap();
        assert_eq!(r.value, ts_pinned(&ps, &a, &b, 14).unwrap());
        let same = ts_quotient(&ps, &region, |_| true, &a, &a, &bound, &[], SearchBudget::default()).unwrap();
        assert_eq!(same.value, 0.0);
    }

    #[test]
    fn quotient_search_matches_exhaustive_enumeration() {
        // Oracle: every W with |spt W| <= 2 over Z₆^1 tried directly.
        let ps = PinnedSpace::new(HammingZ6, Z6Vec::zero(1));
        let region: Vec<_> = Z6Vec::enumerate_all(1).collect();
        let member = |w: &CubeFn<Z6Vec>| w.len() % 2 == 0;
        let bound = QuotientBound {
            max_support: 2,
            radius: 3.0,
        };
        for t in 0..6u8 {
            let a = CubeFn::delta(Z6Vec::new([t]));
            let b = CubeFn::zero();
            let got = ts_quotient(&ps, &region, member, &a, &b, &bound, &[], SearchBudget::default()).unwrap();
            let mut best = ts_pinned(&ps, &a, &b, 14).unwrap();
            for i in 0..6u8 {
                for j in i + 1..6 {
                    let w = CubeFn::from_points([Z6Vec::new([i]), Z6Vec::new([j])]);
                    best = best.min(ts_pinned(&ps, &a, &w, 14).unwrap());
                }
            }
            assert_eq!(got.value, best, "t = {t}");
        }
    }

    #[test]
    fn quotient_metric_examples() {
        let sq = FiniteMetricSpace::from_fn(vec!["00".into(), "01".into(), "10".into(), "11".into()], Some(1.0), |i, j| {
            (i ^ j).count_ones() as f64
        })
        .unwrap();
        let singles: Vec<Vec<usize>> = (0..4).map(|i| vec![i]).collect();
        let same = quotient_metric(&sq, &singles).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(same.dist(i, j), sq.dist(i, j));
            }
        }
        let q = quotient_metric(&sq, &[vec![0, 3], vec![1, 2]]).unwrap();
        assert_eq!(q.len(), 2);
        assert_eq!(q.dist(0, 1), 1.0);
    }

    #[test]
    fn unrealizable_partition_names_the_offender() {
        let path = FiniteMetricSpace::from_fn((0..3).map(|i| i.to_string()).collect(), None, |i, j| i.abs_diff(j) as f64).unwrap();
        let err = quotient_metric(&path, &[vec![0, 1], vec![2]]).unwrap_err();
        assert_eq!(
            err,
            Error::NotRealizable {
                from_block: 0,
                to_block: 1,
                point: 0
            }
        );
    }

    #[test]
    fn coset_partitions_of_cubes_are_realizable() {
        // Every subspace of Z₂^d for d <= 4 gives a realizable partition.
        for d in 1..=4usize {
            let u = Universe::indexed(d);
            let cube = FiniteMetricSpace::from_fn((0..1 << d).map(|i| i.to_string()).collect(), Some(1.0), |i, j| {
                (i ^ j).count_ones() as f64
            })
            .unwrap();
            for mask in 0u32..(1 << (1 << d)).min(1 << 12) {
                let gens: Vec<Gf2Vec> = (0..1usize << d)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| Gf2Vec::from_indices(&u, (0..d).filter(|b| i >> b & 1 == 1)))
                    .collect();
                let v = Gf2Subspace::span(&u, gens).unwrap();
                let mut blocks: Vec<Vec<usize>> = Vec::new();
                let mut seen = vec![false; 1 << d];
                for i in 0..1usize << d {
                    if seen[i] {
                        continue;
                    }
                    let block: Vec<usize> = v
                        .elements(1 << 10)
                        .unwrap()
                        .iter()
                        .map(|s| i ^ s.support().map(|b| 1 << b).sum::<usize>())
                        .collect();
                    for &x in &block {
                        seen[x] = true;
                    }
                    blocks.push(block);
                }
                quotient_metric(&cube, &blocks).unwrap();
            }
        }
    }

    #[test]
    fn metric_text_round_trip_and_errors() {
        let text = "# square\nn=4\n0 1 2 1\n1 0 1 2\n2 1 0 1\n1 2 1 0\n";
        let s = FiniteMetricSpace::from_text(text).unwrap();
        assert_eq!(s.diameter(), 2.0);
        assert_eq!(FiniteMetricSpace::from_text(&s.to_text()).unwrap(), s);
        let bad = "n=2\n0 1\n1 x\n";
        assert!(matches!(FiniteMetricSpace::from_text(bad), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(FiniteMetricSpace::from_text("n=2\n0 1\n2 0\n"), Err(Error::Parse { .. })));
        assert!(matches!(FiniteMetricSpace::from_text("0 1"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn zero_section_examples() {
        let g = GroupPresentation::lamplighter(2).unwrap();
        assert_eq!(zero_section_distance(&g, None, &[(1, 1)], &[(1, 1)]).unwrap(), 0);
        let ball = groups::word_ball(&g, 11, 1_000_000).unwrap();
        for k in 1..=5i64 {
            let closed = zero_section_distance(&g, None, &[], &[(k, 1)]).unwrap();
            let x = g.lamp_elem([(k, 1)], 0).unwrap();
            assert_eq!(ball.distance(&x).unwrap() as u64, closed);
            assert_eq!(closed, 2 * k as u64 + 1);
        }
    }

    #[test]
    fn sandwich_on_small_cycle_quotients() {
        let r = approx_by_ts_sandwich(4, None, 1000).unwrap();
        assert_eq!(r.elements, 64);
        assert!(r.pass(), "{:?}", r.violations);
        let u = Universe::indexed(4);
        let ones = Gf2Subspace::span(&u, [Gf2Vec::ones(&u)]).unwrap();
        let q = approx_by_ts_sandwich(4, Some(ones), 1000).unwrap();
        assert_eq!(q.elements, 32);
        assert!(q.pass(), "{:?}", q.violations);
    }

    #[test]
    fn z6_cubefn_parsing() {
        let f = parse_z6_cubefn("0130\n(1,0,0,5)\n# c\n0130\n", 4).unwrap();
        assert_eq!(f, CubeFn::delta(Z6Vec::new([1, 0, 0, 5])));
        assert!(matches!(parse_z6_cubefn("017", 3), Err(Error::Parse { line: 1, .. })));
    }

    proptest! {
        #[test]
        fn zero_section_metric_is_symmetric_and_translation_invariant(
            a in proptest::collection::vec(0u8..6, 3),
            b in proptest::collection::vec(0u8..6, 3),
            c in proptest::collection::vec(0u8..6, 3),
        ) {
            let m = ZeroSectionZ::new(vec![-3, 2, 5]);
            let (a, b, c) = (Z6Vec::new(a), Z6Vec::new(b), Z6Vec::new(c));
            prop_assert_eq!(m.dist(&a, &b), m.dist(&b, &a));
            prop_assert_eq!(m.dist(&a, &b), m.dist(&a.try_add(&c).unwrap(), &b.try_add(&c).unwrap()));
            prop_assert!(m.dist(&a, &c) <= m.dist(&a, &b) + m.dist(&b, &c));
        }
    }
}
