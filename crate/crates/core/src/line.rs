//! Closed-form solution of the game on a line `0 - 1 - ... - n-1`.
//!
//! The seeker mixes uniformly over `w` efficient strategies whose covered
//! intervals are laid end to end modulo `n - 1`; the hider spreads mass over
//! `1..=n-2` so that every efficient strategy captures at most `h / w`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{GameError, Result};
use crate::game::{HiderDistribution, LineInstance, ModInterval};
use crate::rational::{common_denominator, from_u64, scaled_numerators};
use crate::strategy::{SearchTree, SeekerMixedStrategy, SeekerStrategy, VertexSet};
use crate::Rational;

/// `(h, w)` of the greedy seeker family together with `gcd(c, n - 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BezoutResult {
    pub n: u64,
    pub k: u32,
    pub c: u64,
    pub h: u64,
    pub w: u64,
    pub gcd: u64,
    /// Division steps taken by the extended Euclidean algorithm.
    pub ops: u32,
}

impl BezoutResult {
    pub fn value(&self) -> Rational {
        Rational::new(self.h.into(), self.w.into())
    }

    pub fn is_coprime(&self) -> bool {
        self.gcd == 1
    }

    pub fn line(&self) -> LineInstance {
        LineInstance {
            n: self.n,
            k: self.k,
        }
    }
}

/// Returns `(g, x, y, steps)` with `a x + b y = g = gcd(a, b)`.
pub fn extended_gcd(a: i128, b: i128) -> (i128, i128, i128, u32) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    let mut steps = 0;
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
        steps += 1;
    }
    (r0, s0, t0, steps)
}

fn require_closed_form(n: u64, k: u32) -> Result<LineInstance> {
    let line = LineInstance::new(n, k)?;
    if k < 2 {
        return Err(GameError::NotApplicable(format!(
            "closed form needs k >= 2, got k = {k}"
        )));
    }
    if line.is_trivial() {
        return Err(GameError::NotApplicable(format!(
            "n = {n} <= 2^k = {}: binary search finds every vertex",
            line.leaf_capacity()
        )));
    }
    Ok(line)
}

/// Computes `h` and `w` with `h (n-1) - w c = 1` (coprime, `w` minimal) or
/// `h = c / g`, `w = (n-1) / g` otherwise.
pub fn compute_hw(n: u64, k: u32) -> Result<BezoutResult> {
    let line = require_closed_form(n, k)?;
    let c = line.capacity();
    let m = n - 1;
    let (g, x, _, ops) = extended_gcd(i128::from(m), i128::from(c));
    let g = g as u64;
    let (h, w) = if g == 1 {
        let h = x.rem_euclid(i128::from(c)) as u64;
        let w = ((u128::from(h) * u128::from(m) - 1) / u128::from(c)) as u64;
        (h, w)
    } else {
        (c / g, m / g)
    };
    Ok(BezoutResult {
        n,
        k,
        c,
        h,
        w,
        gcd: g,
        ops,
    })
}

/// Start vertex of the `t`-th strategy inserted by the greedy loop.
pub fn sample_seeker(n: u64, k: u32, t: u64) -> Result<u64> {
    let bz = compute_hw(n, k)?;
    start_of(&bz, t)
}

pub(crate) fn start_of(bz: &BezoutResult, t: u64) -> Result<u64> {
    if t >= bz.w {
        return Err(GameError::InvalidArgument(format!(
            "strategy index {t} outside 0..{}",
            bz.w
        )));
    }
    if t == 0 {
        return Ok(0);
    }
    let m = u128::from(bz.n - 1);
    Ok(((u128::from(t) * u128::from(bz.c)) % m) as u64 + 1)
}

/// All `w` start vertices in insertion order.
pub fn seeker_starts(bz: &BezoutResult) -> Vec<u64> {
    (0..bz.w)
        .map(|t| start_of(bz, t).expect("index in range"))
        .collect()
}

/// Uniform mixture over the greedy family of efficient strategies.
pub fn greedy_seeker(n: u64, k: u32) -> Result<SeekerMixedStrategy> {
    let bz = compute_hw(n, k)?;
    let line = bz.line();
    let support = seeker_starts(&bz)
        .into_iter()
        .map(|start| SeekerStrategy::Efficient { line, start })
        .collect();
    SeekerMixedStrategy::uniform(support)
}

/// Covered interval of `T_v`: length `c + 1` when it reaches 0 or `n - 1`, else `c`.
pub fn efficient_interval(v: u64, n: u64, k: u32) -> Result<ModInterval> {
    let line = require_closed_form(n, k)?;
    if v >= n {
        return Err(GameError::InvalidArgument(format!("vertex {v} outside 0..{n}")));
    }
    if v == 1 {
        return Err(GameError::InvalidArgument(
            "no efficient strategy covers an interval starting at 1".into(),
        ));
    }
    let c = line.capacity();
    let long = ModInterval::new(v, c + 1, n)?;
    if long.contains(0) || long.contains(n - 1) {
        Ok(long)
    } else {
        ModInterval::new(v, c, n)
    }
}

/// The efficient strategy `T_v` as an explicit query tree.
pub fn efficient_strategy(v: u64, n: u64, k: u32) -> Result<SearchTree> {
    let interval = efficient_interval(v, n, k)?;
    let boundaries = partition_from_covered(&[interval], n)?;
    build_strategy_from_partition(&boundaries, k)
}

/// Interval partition `p_0 = 0 < ... < p_j = n` whose singleton parts are
/// exactly the vertices of the given maximal intervals.
pub fn partition_from_covered(intervals: &[ModInterval], n: u64) -> Result<Vec<u64>> {
    let mut points = vec![0];
    for iv in intervals {
        if iv.modulus() != n {
            return Err(GameError::InvalidArgument(format!(
                "interval modulus {} differs from n = {n}",
                iv.modulus()
            )));
        }
        points.extend(
            (0..=iv.len())
                .map(|i| (iv.start() + i) % n)
                .filter(|&p| p != 0),
        );
    }
    points.sort_unstable();
    points.dedup();
    points.push(n);
    Ok(points)
}

/// Realizes an interval partition as a query tree of height at most `k`.
pub fn build_strategy_from_partition(boundaries: &[u64], k: u32) -> Result<SearchTree> {
    if boundaries.len() < 2 || boundaries[0] != 0 {
        return Err(GameError::InvalidArgument(
            "partition must start at 0 and contain at least two boundaries".into(),
        ));
    }
    if boundaries.windows(2).any(|w| w[0] >= w[1]) {
        return Err(GameError::InvalidArgument(
            "partition boundaries must be strictly increasing".into(),
        ));
    }
    let j = boundaries.len() - 1;
    let leaves = 1u64.checked_shl(k).unwrap_or(u64::MAX);
    if j as u64 > leaves {
        return Err(GameError::InvalidArgument(format!(
            "{j} intervals exceed the 2^{k} leaves available"
        )));
    }
    let bounds: Vec<usize> = boundaries
        .iter()
        .map(|&b| usize::try_from(b))
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| GameError::GuardExceeded("vertex index exceeds usize".into()))?;
    Ok(build_range(&bounds, k))
}

fn build_range(bounds: &[usize], budget: u32) -> SearchTree {
    let j = bounds.len() - 1;
    let vertices = VertexSet::Interval {
        start: bounds[0],
        len: bounds[j] - bounds[0],
    };
    if j == 1 {
        return SearchTree::leaf(vertices);
    }
    let half = budget
        .checked_sub(1)
        .and_then(|b| 1usize.checked_shl(b))
        .unwrap_or(usize::MAX);
    let i = if j > half { half } else { j.div_ceil(2) };
    let p = bounds[i];
    SearchTree::node(
        vertices,
        (p - 1, p),
        build_range(&bounds[..=i], budget.saturating_sub(1)),
        build_range(&bounds[i..], budget.saturating_sub(1)),
    )
}

/// Merges touching intervals modulo `n` and orders them by start.
/// Errors on overlap.
pub fn normalize_intervals(intervals: &[ModInterval], n: u64) -> Result<Vec<ModInterval>> {
    let mut ivs: Vec<ModInterval> = intervals.iter().copied().filter(|iv| !iv.is_empty()).collect();
    for iv in &ivs {
        if iv.modulus() != n {
            return Err(GameError::InvalidArgument("interval modulus differs from n".into()));
        }
    }
    for (a, x) in ivs.iter().enumerate() {
        for y in &ivs[a + 1..] {
            if !x.is_disjoint(y) {
                return Err(GameError::InvalidArgument(format!(
                    "intervals [{}⊕{}] and [{}⊕{}] overlap",
                    x.start(),
                    x.len(),
                    y.start(),
                    y.len()
                )));
            }
        }
    }
    ivs.sort();
    let mut merged: Vec<ModInterval> = Vec::with_capacity(ivs.len());
    for iv in ivs {
        match merged.last_mut() {
            Some(last) if last.start() + last.len() == iv.start() => {
                *last = ModInterval::new(last.start(), last.len() + iv.len(), n)?;
            }
            _ => merged.push(iv),
        }
    }
    if merged.len() > 1 {
        let last = merged[merged.len() - 1];
        let first = merged[0];
        if (last.start() + last.len()) % n == first.start() {
            merged.remove(0);
            let len = last.len() + first.len();
            *merged.last_mut().expect("non-empty") = ModInterval::new(last.start(), len, n)?;
        }
    }
    Ok(merged)
}

/// Whether the union of `intervals` is a maximal covered set on the line.
pub fn is_maximal_covered_set(intervals: &[ModInterval], n: u64, k: u32) -> Result<bool> {
    let line = LineInstance::new(n, k)?;
    let ivs = normalize_intervals(intervals, n)?;
    let total: u64 = ivs.iter().map(ModInterval::len).sum();
    if line.is_trivial() {
        return Ok(total == n);
    }
    let s = ivs.len() as u64;
    if s == 0 {
        return Ok(false);
    }
    let c = line.capacity();

    // (i) no maximal interval starts at 1 or ends at n-2.
    if ivs
        .iter()
        .any(|iv| iv.start() == 1 || iv.unwrapped_end() % n == n - 2)
    {
        return Ok(false);
    }
    // (ii) at least two uncovered vertices between consecutive intervals, cyclically.
    for pair in ivs.windows(2) {
        if pair[1].start() < pair[0].start() + pair[0].len() + 2 {
            return Ok(false);
        }
    }
    let first = ivs[0];
    let last = ivs[ivs.len() - 1];
    if first.start() + n < last.start() + last.len() + 2 {
        return Ok(false);
    }
    // (iii) total length.
    let touches_ends = ivs.iter().any(|iv| iv.contains(0) || iv.contains(n - 1));
    let expected = if touches_ends { c + 2 } else { c + 1 };
    Ok(s <= expected && total == expected - s)
}

/// The hider for `gcd(c, n-1) = d > 1`: zero on multiples of `d`, uniform elsewhere.
pub fn hider_noncoprime(n: u64, k: u32) -> Result<HiderDistribution> {
    let bz = compute_hw(n, k)?;
    if bz.is_coprime() {
        return Err(GameError::NotApplicable(format!(
            "gcd(c, n-1) = 1 for n = {n}, k = {k}; use the segment rule"
        )));
    }
    let d = bz.gcd;
    let n_us = usize::try_from(n).map_err(|_| GameError::GuardExceeded("n exceeds usize".into()))?;
    let mass = Rational::new(BigInt::one(), BigInt::from(bz.w) * BigInt::from(d - 1));
    let probs = (0..n_us as u64)
        .map(|v| if v % d == 0 { Rational::zero() } else { mass.clone() })
        .collect();
    Ok(HiderDistribution::new_unchecked(probs))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub start: u64,
    pub len: u64,
    /// Mass of each vertex in the segment, `1 / (len w)`.
    pub mass: Rational,
}

impl Segment {
    pub fn end(&self) -> u64 {
        self.start + self.len - 1
    }
}

/// Segment decomposition of `1..=n-2` produced by the segment rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentLayout {
    pub r: u64,
    pub t: u64,
    pub segments: Vec<Segment>,
}

impl SegmentLayout {
    /// `(start, len)` pairs.
    pub fn lengths(&self) -> Vec<(u64, u64)> {
        self.segments.iter().map(|s| (s.start, s.len)).collect()
    }
}

/// The hider for `gcd(c, n-1) = 1`, built segment by segment.
pub fn hider_coprime(n: u64, k: u32) -> Result<(HiderDistribution, SegmentLayout)> {
    let bz = compute_hw(n, k)?;
    if !bz.is_coprime() {
        return Err(GameError::NotApplicable(format!(
            "gcd(c, n-1) = {} for n = {n}, k = {k}; use the non-coprime hider",
            bz.gcd
        )));
    }
    let n_us = usize::try_from(n).map_err(|_| GameError::GuardExceeded("n exceeds usize".into()))?;
    let (c, h, w) = (u128::from(bz.c), u128::from(bz.h), u128::from(bz.w));
    let r = bz.c / bz.h;
    let t = (n - 1) % bz.c;
    let mut segments = Vec::with_capacity(bz.w as usize);
    let mut v = 1u64;
    while v <= n - 2 {
        let placed = segments.len() as u128;
        // g(v + r* - 1) <= y([1, v-1]) + 1/w, scaled by w c.
        let fits = |len: u64| u128::from(v + len - 1) * h <= (placed + 1) * c;
        let len = [r + 1, r].into_iter().find(|&len| fits(len)).ok_or_else(|| {
            GameError::InvalidArgument(format!("segment rule admits no length at vertex {v}"))
        })?;
        segments.push(Segment {
            start: v,
            len,
            mass: Rational::new(BigInt::one(), BigInt::from(len) * BigInt::from(bz.w)),
        });
        v += len;
    }
    if segments.len() as u128 != w || v != n - 1 {
        return Err(GameError::InvalidArgument(format!(
            "segment rule produced {} segments ending at {} (expected {} ending at {})",
            segments.len(),
            v - 1,
            bz.w,
            n - 2
        )));
    }
    let mut probs = vec![Rational::zero(); n_us];
    for seg in &segments {
        for u in seg.start..=seg.end() {
            probs[u as usize] = seg.mass.clone();
        }
    }
    Ok((HiderDistribution::new_unchecked(probs), SegmentLayout { r, t, segments }))
}

/// The optimal hider for either case.
pub fn hider_line(n: u64, k: u32) -> Result<(HiderDistribution, Option<SegmentLayout>)> {
    let bz = compute_hw(n, k)?;
    if bz.is_coprime() {
        hider_coprime(n, k).map(|(y, layout)| (y, Some(layout)))
    } else {
        hider_noncoprime(n, k).map(|y| (y, None))
    }
}

/// Value and equilibrium pair for the line.
#[derive(Debug, Clone)]
pub struct LineSolution {
    pub value: Rational,
    /// `None` when `n <= 2^k`.
    pub bezout: Option<BezoutResult>,
    pub seeker: SeekerMixedStrategy,
    pub hider: HiderDistribution,
    pub layout: Option<SegmentLayout>,
}

/// Solves the line game with unit profit.
pub fn game_value_line(n: u64, k: u32) -> Result<LineSolution> {
    let line = LineInstance::new(n, k)?;
    if line.is_trivial() {
        let n_us = n as usize;
        let boundaries: Vec<u64> = (0..=n).collect();
        let tree = build_strategy_from_partition(&boundaries, k)?;
        return Ok(LineSolution {
            value: Rational::one(),
            bezout: None,
            seeker: SeekerMixedStrategy::pure(SeekerStrategy::Explicit(tree)),
            hider: HiderDistribution::uniform(n_us),
            layout: None,
        });
    }
    let bz = compute_hw(n, k)?;
    let (hider, layout) = hider_line(n, k)?;
    Ok(LineSolution {
        value: bz.value(),
        bezout: Some(bz),
        seeker: greedy_seeker(n, k)?,
        hider,
        layout,
    })
}

/// How many greedy strategies cover each vertex.
pub fn coverage_counts(bz: &BezoutResult) -> Result<Vec<u64>> {
    let n = usize::try_from(bz.n).map_err(|_| GameError::GuardExceeded("n exceeds usize".into()))?;
    let mut diff = vec![0i64; n + 1];
    for start in seeker_starts(bz) {
        let iv = efficient_interval(start, bz.n, bz.k)?;
        let (s, e) = (iv.start() as usize, iv.unwrapped_end() as usize);
        if e < n {
            diff[s] += 1;
            diff[e + 1] -= 1;
        } else {
            diff[s] += 1;
            diff[n] -= 1;
            diff[0] += 1;
            diff[e - n + 1] -= 1;
        }
    }
    let mut acc = 0i64;
    Ok(diff[..n]
        .iter()
        .map(|d| {
            acc += d;
            acc as u64
        })
        .collect())
}

/// Objective values certifying a line solution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineCertificate {
    /// `min_v` of the probability that the seeker covers `v`.
    pub seeker_guarantee: Rational,
    /// `max_v y(C(T_v))` over all efficient strategies.
    pub hider_cap: Rational,
}

impl LineCertificate {
    pub fn is_tight(&self) -> bool {
        self.seeker_guarantee == self.hider_cap
    }
}

/// Evaluates both sides of a non-trivial line solution.
pub fn line_certificate(sol: &LineSolution) -> Result<LineCertificate> {
    let Some(bz) = sol.bezout else {
        return Ok(LineCertificate {
            seeker_guarantee: Rational::one(),
            hider_cap: Rational::one(),
        });
    };
    let counts = coverage_counts(&bz)?;
    let min = counts.iter().min().copied().unwrap_or(0);
    let seeker_guarantee = Rational::new(min.into(), bz.w.into());
    let prefix = prefix_masses(sol.hider.probs());
    let mut hider_cap = Rational::zero();
    for v in (0..bz.n).filter(|&v| v != 1) {
        let iv = efficient_interval(v, bz.n, bz.k)?;
        let m = window(&prefix, iv.start(), iv.len(), bz.n);
        if m > hider_cap {
            hider_cap = m;
        }
    }
    Ok(LineCertificate {
        seeker_guarantee,
        hider_cap,
    })
}

/// `prefix[i] = y_0 + ... + y_{i-1}`.
fn prefix_masses(probs: &[Rational]) -> Vec<Rational> {
    let mut out = Vec::with_capacity(probs.len() + 1);
    let mut acc = Rational::zero();
    out.push(acc.clone());
    for p in probs {
        acc += p;
        out.push(acc.clone());
    }
    out
}

fn window(prefix: &[Rational], start: u64, len: u64, modulus: u64) -> Rational {
    let (s, e) = (start as usize, (start + len) as usize);
    let m = modulus as usize;
    if e <= m {
        &prefix[e] - &prefix[s]
    } else {
        (&prefix[m] - &prefix[s]) + &prefix[e - m]
    }
}

/// Outcome of one verifier check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HiderCheck {
    pub name: &'static str,
    pub passed: bool,
    /// First violation found, if any.
    pub witness: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HiderReport {
    pub n: u64,
    pub k: u32,
    pub coprime: bool,
    pub checks: Vec<HiderCheck>,
}

impl HiderReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&HiderCheck> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

/// Integer view of a hider: every mass scaled by a common denominator `D`
/// that is also a multiple of `w c`.
struct Scaled {
    n: u64,
    c: i128,
    h: i128,
    w: i128,
    d: i128,
    y: Vec<i128>,
    /// `pre[i] = Y_0 + ... + Y_{i-1}`.
    pre: Vec<i128>,
}

impl Scaled {
    fn new(y: &HiderDistribution, bz: &BezoutResult) -> Result<Self> {
        let wc = BigInt::from(bz.w) * BigInt::from(bz.c);
        let den = common_denominator(y.probs()).lcm(&wc);
        let to_i128 = |b: &BigInt| {
            i128::try_from(b).map_err(|_| GameError::GuardExceeded("scaled hider exceeds i128".into()))
        };
        let y_scaled = scaled_numerators(y.probs(), &den)
            .iter()
            .map(to_i128)
            .collect::<Result<Vec<_>>>()?;
        let d = to_i128(&den)?;
        let mut pre = Vec::with_capacity(y_scaled.len() + 1);
        let mut acc = 0i128;
        pre.push(0);
        for &v in &y_scaled {
            acc = acc
                .checked_add(v)
                .ok_or_else(|| GameError::GuardExceeded("scaled prefix overflow".into()))?;
            pre.push(acc);
        }
        Ok(Scaled {
            n: bz.n,
            c: i128::from(bz.c),
            h: i128::from(bz.h),
            w: i128::from(bz.w),
            d,
            y: y_scaled,
            pre,
        })
    }

    /// `D y([1, v])`.
    fn cum(&self, v: u64) -> i128 {
        self.pre[v as usize + 1] - self.pre[1]
    }

    /// `D g(v) = v h D / (w c)`.
    fn ideal(&self, v: u64) -> i128 {
        i128::from(v) * self.h * (self.d / (self.w * self.c))
    }

    /// `D y([start ⊕ len]_modulus)`.
    fn window(&self, start: u64, len: u64, modulus: u64) -> i128 {
        let (s, e, m) = (start as usize, (start + len) as usize, modulus as usize);
        if e <= m {
            self.pre[e] - self.pre[s]
        } else {
            self.pre[m] - self.pre[s] + self.pre[e - m]
        }
    }
}

fn check(name: &'static str, witness: Option<String>) -> HiderCheck {
    HiderCheck {
        name,
        passed: witness.is_none(),
        witness,
    }
}

/// Checks the structural properties that make a hider distribution optimal.
pub fn verify_hider(y: &HiderDistribution, n: u64, k: u32) -> Result<HiderReport> {
    let bz = compute_hw(n, k)?;
    if y.len() as u64 != n {
        return Err(GameError::InvalidDistribution(format!(
            "hider has {} entries for n = {n}",
            y.len()
        )));
    }
    let s = Scaled::new(y, &bz)?;
    let c = bz.c;
    let mut checks = vec![check("distribution", distribution_witness(&s))];
    if bz.is_coprime() {
        checks.push(check("bracket", bracket_witness(&s)));
        checks.push(check("segment-index", segment_index_witness(&s)));
        checks.push(check("ideal-equality", ideal_equality_witness(&s)));
        checks.push(check("periodicity", periodicity_witness(&s)));
        checks.push(check("segment-count", segment_count_witness(&s)));
        checks.push(check("extrema", extrema_witness(&s, (n - 1) % c)));
        checks.push(check("spread", spread_witness(&s, (n - 1) % c)));
    } else {
        checks.push(check("shift", shift_witness(&s, bz.gcd)));
    }
    checks.push(check("merge", merge_witness(&s)));
    checks.push(check("efficient-cap", efficient_cap_witness(&s, &bz)?));
    Ok(HiderReport {
        n,
        k,
        coprime: bz.is_coprime(),
        checks,
    })
}

fn distribution_witness(s: &Scaled) -> Option<String> {
    if let Some(v) = s.y.iter().position(|&m| m < 0) {
        return Some(format!("negative mass at vertex {v}"));
    }
    let total = s.pre[s.y.len()];
    if total != s.d {
        return Some(format!("total mass {total}/{} is not 1", s.d));
    }
    if s.y[0] != 0 || s.y[s.n as usize - 1] != 0 {
        return Some("endpoints 0 and n-1 carry mass".into());
    }
    None
}

fn bracket_witness(s: &Scaled) -> Option<String> {
    (1..=s.n - 2)
        .find(|&v| !(s.ideal(v) <= s.cum(v) && s.cum(v) < s.ideal(v + 1)))
        .map(|v| format!("g(v) <= y([1,v]) < g(v+1) fails at v = {v}"))
}

fn segment_index_witness(s: &Scaled) -> Option<String> {
    (1..=s.n - 2)
        .find(|&v| {
            let lhs = Integer::div_ceil(&(s.w * s.cum(v)), &s.d);
            let rhs = Integer::div_ceil(&(i128::from(v) * s.h), &s.c);
            lhs != rhs
        })
        .map(|v| format!("segment index of v = {v} differs from ceil(v h / c)"))
}

fn ideal_equality_witness(s: &Scaled) -> Option<String> {
    // With h = 1 every segment has length c and the hider tracks g exactly.
    (1..=s.n - 2)
        .find(|&v| (s.cum(v) == s.ideal(v)) != (s.h == 1 || i128::from(v) % s.c == 0))
        .map(|v| format!("y([1,v]) = g(v) disagrees with c | v at v = {v}"))
}

fn periodicity_witness(s: &Scaled) -> Option<String> {
    let c = s.c as u64;
    (1..=(s.n - 2).saturating_sub(c))
        .find(|&v| s.y[v as usize] != s.y[(v + c) as usize])
        .map(|v| format!("y_v != y_(v+c) at v = {v}"))
}

fn segment_count_witness(s: &Scaled) -> Option<String> {
    if s.cum(s.n - 2) != s.d {
        return Some("y([1, n-2]) != 1".into());
    }
    let ends = (1..=s.n - 2)
        .filter(|&v| (s.w * s.cum(v)) % s.d == 0)
        .count() as i128;
    (ends != s.w).then(|| format!("{ends} segment boundaries, expected {}", s.w))
}

fn extrema_witness(s: &Scaled, t: u64) -> Option<String> {
    let c = s.c as u64;
    let n = s.n;
    for len in 1..=c {
        let hi = s.window(1, len, n);
        let lo = s.window(t, len, n);
        // Only windows inside [1, n-2]; past n-2 the lower bound fails (e.g. n = 12, k = 3, [6⊕6]).
        for v in (1..=c).filter(|&v| v + len <= n - 1) {
            let m = s.window(v, len, n);
            if m > hi || m < lo {
                return Some(format!("window [{v}⊕{len}] outside [y([t⊕ℓ]), y([1⊕ℓ])]"));
            }
        }
    }
    None
}

fn spread_witness(s: &Scaled, t: u64) -> Option<String> {
    let c = s.c as u64;
    (1..=c)
        .find(|&len| s.window(1, len, s.n) > s.window(t, len + 1, s.n))
        .map(|len| format!("y([1⊕{len}]) > y([t⊕{}])", len + 1))
}

fn shift_witness(s: &Scaled, d: u64) -> Option<String> {
    let m = s.n - 1;
    let unit = s.d / (s.w * (d as i128 - 1));
    for len in 1..=m {
        let floor = (len - len / d) as i128 * unit;
        let ceil = (len - len.div_ceil(d)) as i128 * unit;
        for v in 0..m {
            let mass = s.window(v, len, m);
            if mass != floor && mass != ceil {
                return Some(format!("window [{v}⊕{len}] mod n-1 has unexpected mass"));
            }
        }
    }
    None
}

fn merge_witness(s: &Scaled) -> Option<String> {
    let m = s.n - 1;
    let c = s.c as u64;
    let mu = m as usize;
    for len_b in 1..c {
        // Sparse table of window masses over two laps, so cyclic ranges are contiguous.
        let base: Vec<i128> = (0..2 * m).map(|v| s.window(v % m, len_b, m)).collect();
        let mut table = vec![base];
        let mut span = 1;
        while 2 * span <= mu {
            let prev = table.last().expect("non-empty");
            let next: Vec<i128> = (0..prev.len() - span).map(|i| prev[i].max(prev[i + span])).collect();
            table.push(next);
            span *= 2;
        }
        let range_max = |lo: usize, len: usize| {
            let level = (usize::BITS - 1 - len.leading_zeros()) as usize;
            table[level][lo].max(table[level][lo + len - (1 << level)])
        };
        for len_a in 1..=c - len_b {
            if len_a + len_b + 1 > m {
                continue;
            }
            // b = [v ⊕ len_b] misses a = [u ⊕ len_a] iff v ∈ [u + len_a, u + m - len_b].
            let free = (m - len_a - len_b + 1) as usize;
            for u in 0..m {
                let merged = s.window(u, len_a + len_b + 1, m);
                let best = range_max((u + len_a) as usize, free);
                if s.window(u, len_a, m) + best > merged {
                    return Some(format!(
                        "y([{u}⊕{len_a}]) plus a disjoint [·⊕{len_b}] exceeds y([{u}⊕{}]) mod n-1",
                        len_a + len_b + 1
                    ));
                }
            }
        }
    }
    None
}

fn efficient_cap_witness(s: &Scaled, bz: &BezoutResult) -> Result<Option<String>> {
    // h/w scaled by D.
    let cap = s.h * (s.d / s.w);
    for v in (0..bz.n).filter(|&v| v != 1) {
        let iv = efficient_interval(v, bz.n, bz.k)?;
        if s.window(iv.start(), iv.len(), bz.n) > cap {
            return Ok(Some(format!("y(C(T_{v})) exceeds h/w")));
        }
    }
    Ok(None)
}

/// Exact value of a line game with unit profit (trivial case included).
pub fn line_value(n: u64, k: u32) -> Result<Rational> {
    let line = LineInstance::new(n, k)?;
    if line.is_trivial() {
        return Ok(Rational::one());
    }
    compute_hw(n, k).map(|bz| bz.value())
}

/// Rational `v h / (w c)`.
pub fn ideal_mass(bz: &BezoutResult, v: u64) -> Rational {
    from_u64(v) * Rational::new(bz.h.into(), (BigInt::from(bz.w) * BigInt::from(bz.c)).into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn iv(start: u64, len: u64, n: u64) -> ModInterval {
        ModInterval::new(start, len, n).unwrap()
    }

    #[test]
    fn bezout_examples() {
        let cases = [(11, 3, 2, 3, 5), (12, 3, 1, 5, 9), (38, 4, 1, 11, 29), (9, 3, 2, 3, 4)];
        for (n, k, g, h, w) in cases {
            let bz = compute_hw(n, k).unwrap();
            assert_eq!((bz.gcd, bz.h, bz.w), (g, h, w), "n={n} k={k}");
        }
        assert_eq!(compute_hw(11, 3).unwrap().value(), ratio(3, 5));
        assert!(compute_hw(8, 3).is_err());
        assert!(compute_hw(11, 1).is_err());
    }

    #[test]
    fn bezout_identity_holds_on_huge_lines() {
        let n = 1_000_000_000_000_000_007u64;
        let bz = compute_hw(n, 40).unwrap();
        let lhs = u128::from(bz.h) * u128::from(n - 1);
        let rhs = u128::from(bz.w) * u128::from(bz.c);
        if bz.gcd == 1 {
            assert_eq!(lhs, rhs + 1);
        } else {
            assert_eq!(lhs, rhs);
        }
        assert!(bz.ops <= 2 * 64);
    }

    #[test]
    fn starts_for_small_lines() {
        let bz = compute_hw(11, 3).unwrap();
        assert_eq!(seeker_starts(&bz), vec![0, 7, 3, 9, 5]);
        let bz = compute_hw(12, 3).unwrap();
        assert_eq!(seeker_starts(&bz), vec![0, 7, 2, 8, 3, 9, 4, 10, 5]);
        assert_eq!(sample_seeker(12, 3, 4).unwrap(), 3);
        assert!(sample_seeker(12, 3, 9).is_err());
    }

    #[test]
    fn efficient_intervals() {
        let covered = |v, n, k| efficient_strategy(v, n, k).unwrap().covered_set();
        assert_eq!(covered(0, 11, 3), (0..=6).collect::<Vec<_>>());
        assert_eq!(covered(7, 11, 3), vec![0, 1, 2, 7, 8, 9, 10]);
        assert_eq!(covered(3, 12, 3), (3..=8).collect::<Vec<_>>());
        assert!(efficient_strategy(1, 12, 3).is_err());
        for v in (0..12).filter(|&v| v != 1) {
            let t = efficient_strategy(v, 12, 3).unwrap();
            assert!(t.height() <= 3);
            assert_eq!(t.leaf_count(), 8);
        }
    }

    #[test]
    fn partition_trees_on_ten_vertex_line() {
        let a = partition_from_covered(&[iv(6, 2, 11), iv(10, 4, 11)], 11).unwrap();
        assert_eq!(a, vec![0, 1, 2, 3, 6, 7, 8, 10, 11]);
        let ta = build_strategy_from_partition(&a, 3).unwrap();
        assert_eq!(ta.covered_set(), vec![0, 1, 2, 6, 7, 10]);
        let h = ta.discovery_times(11, 3);
        for v in [3, 4, 5, 8, 9] {
            assert_eq!(h[v], 4);
        }

        let b = vec![0, 2, 3, 4, 6, 7, 8, 9, 11];
        let tb = build_strategy_from_partition(&b, 3).unwrap();
        assert_eq!(tb.query.as_ref().unwrap().edge, (5, 6));
        assert_eq!(tb.covered_set(), vec![2, 3, 6, 7, 8]);
        assert_eq!(partition_from_covered(&[iv(2, 2, 11), iv(6, 3, 11)], 11).unwrap(), b);
    }

    #[test]
    fn partition_builder_edge_cases() {
        let t = build_strategy_from_partition(&[0, 7], 3).unwrap();
        assert!(t.is_leaf() && t.covered_set().is_empty());
        let t = build_strategy_from_partition(&[0, 1, 2, 3, 4], 2).unwrap();
        assert_eq!(t.covered_set(), vec![0, 1, 2, 3]);
        assert!(build_strategy_from_partition(&[0, 1, 2, 3, 4, 5], 2).is_err());
        assert!(build_strategy_from_partition(&[0, 2, 2, 5], 2).is_err());
    }

    #[test]
    fn maximal_covered_set_examples() {
        assert!(is_maximal_covered_set(&[iv(6, 2, 11), iv(10, 4, 11)], 11, 3).unwrap());
        assert!(is_maximal_covered_set(&[iv(2, 2, 11), iv(6, 3, 11)], 11, 3).unwrap());
        assert!(!is_maximal_covered_set(&[iv(1, 6, 11)], 11, 3).unwrap());
        assert!(is_maximal_covered_set(&[iv(0, 7, 11)], 11, 3).unwrap());
        assert!(is_maximal_covered_set(&[iv(3, 6, 11)], 11, 3).unwrap());
        assert!(is_maximal_covered_set(&[iv(10, 1, 11), iv(0, 6, 11)], 11, 3).unwrap());
        assert!(is_maximal_covered_set(&[iv(2, 3, 11), iv(4, 1, 11)], 11, 3).is_err());
    }

    #[test]
    fn noncoprime_hider() {
        let y = hider_noncoprime(11, 3).unwrap();
        let expected: Vec<_> = (0..11).map(|v| if v % 2 == 1 { ratio(1, 5) } else { ratio(0, 1) }).collect();
        assert_eq!(y.probs(), &expected[..]);
        let y = hider_noncoprime(9, 3).unwrap();
        assert_eq!(*y.get(1), ratio(1, 4));
        assert!(hider_noncoprime(12, 3).is_err());
    }

    #[test]
    fn coprime_hider_layouts() {
        let (y, layout) = hider_coprime(12, 3).unwrap();
        let expected: Vec<_> = [0, 2, 2, 2, 2, 1, 1, 2, 2, 2, 2, 0]
            .iter()
            .map(|&m| ratio(m, 18))
            .collect();
        assert_eq!(y.probs(), &expected[..]);
        assert_eq!(layout.segments.len(), 9);

        let (y, layout) = hider_coprime(38, 4).unwrap();
        let head: Vec<_> = layout.lengths().into_iter().take(11).collect();
        assert_eq!(
            head,
            vec![(1, 1), (2, 1), (3, 1), (4, 2), (6, 1), (7, 1), (8, 1), (9, 2), (11, 1), (12, 1), (13, 2)]
        );
        assert_eq!(*y.get(1), ratio(1, 29));
        assert_eq!(*y.get(4), ratio(1, 58));
        assert_eq!(y.get(1), y.get(15));
        assert_eq!(layout.segments.last().unwrap().end(), 36);
        assert!(hider_coprime(11, 3).is_err());
    }

    #[test]
    fn verifier_accepts_constructions() {
        for (n, k) in [(11, 3), (12, 3), (38, 4), (9, 3), (5, 2), (13, 2)] {
            let (y, _) = hider_line(n, k).unwrap();
            let report = verify_hider(&y, n, k).unwrap();
            assert!(report.passed(), "n={n} k={k}: {:?}", report.failures());
        }
    }

    #[test]
    fn verifier_rejects_moved_mass() {
        let (y, _) = hider_coprime(12, 3).unwrap();
        let mut probs = y.probs().to_vec();
        let delta = ratio(1, 2 * 9 * 6);
        probs[1] -= &delta;
        probs[5] += &delta;
        let moved = HiderDistribution::new(probs).unwrap();
        let report = verify_hider(&moved, 12, 3).unwrap();
        assert!(!report.passed());
        // 1/(2wc) stays inside the bracket at v = 1; periodicity catches it.
        let bracket = report.checks.iter().find(|c| c.name == "bracket").unwrap();
        assert!(bracket.passed);
        let period = report.checks.iter().find(|c| c.name == "periodicity").unwrap();
        assert!(period.witness.as_ref().unwrap().contains("v = 1"));

        let mut probs = y.probs().to_vec();
        probs[1] -= ratio(1, 36);
        probs[5] += ratio(1, 36);
        let report = verify_hider(&HiderDistribution::new(probs).unwrap(), 12, 3).unwrap();
        let bracket = report.checks.iter().find(|c| c.name == "bracket").unwrap();
        assert!(bracket.witness.as_ref().unwrap().contains("v = 1"));
    }

    #[test]
    fn solutions_are_tight() {
        for (n, k) in [(11, 3), (12, 3), (38, 4), (20, 2), (17, 4)] {
            let sol = game_value_line(n, k).unwrap();
            let cert = line_certificate(&sol).unwrap();
            assert!(cert.is_tight(), "n={n} k={k}: {cert:?}");
            assert_eq!(cert.seeker_guarantee, sol.value);
        }
        let trivial = game_value_line(8, 3).unwrap();
        assert_eq!(trivial.value, Rational::one());
        assert_eq!(
            trivial.seeker.support()[0].tree().unwrap().covered_set(),
            (0..8).collect::<Vec<_>>()
        );
    }

    #[test]
    fn coverage_is_balanced() {
        for (n, k) in [(11, 3), (12, 3), (38, 4), (25, 3)] {
            let bz = compute_hw(n, k).unwrap();
            let counts = coverage_counts(&bz).unwrap();
            assert!(counts[1..].iter().all(|&c| c == bz.h));
            assert!(counts[0] >= bz.h);
        }
    }

    #[test]
    fn ideal_mass_matches_definition() {
        let bz = compute_hw(12, 3).unwrap();
        assert_eq!(ideal_mass(&bz, 6), ratio(5, 9));
    }
}
