//! Cyclic products `Δ`, the partition sums `V_n(π)` and their limits.
//!
//! `V_n(π) = n^{-(k/2+1)} Σ_{a ∈ L_n(π)} Δ(a(0), …, a(k-1))` where `L_n(π)`
//! are the maps `[k] → [n]` whose level sets are exactly the blocks of `π`.
//! Two evaluators are provided: direct enumeration of block injections
//! ([`vn_exact`]) and Möbius inversion over coarsenings of `π` combined with
//! tensor contraction of the quotient graph ([`InclusionExclusion`]). They
//! share nothing beyond the matrix itself and are tested against each other.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::dyck::even_cactus_cycles;
use super::partition::{all_partitions, SetPartition};
use crate::conference::ConferenceMatrix;
use crate::error::{invalid, Error, Result};
use crate::km::catalan_number;

/// Maximum number of block injections [`vn_exact`] will enumerate.
pub const INJECTION_LIMIT: u128 = 100_000_000;

/// `Δ(a_1, …, a_k) = S[a_1,a_2] S[a_2,a_3] ⋯ S[a_k,a_1]`.
pub fn delta(s: &ConferenceMatrix, tuple: &[usize]) -> Result<i8> {
    let k = tuple.len();
    if k < 2 {
        return Err(invalid("Δ needs a tuple of length >= 2"));
    }
    let n = s.order();
    if let Some(&bad) = tuple.iter().find(|&&a| a >= n) {
        return Err(Error::IndexOutOfRange { index: bad, order: n });
    }
    let mut acc = 1i8;
    for j in 0..k {
        acc *= s.get(tuple[j], tuple[(j + 1) % k]);
        if acc == 0 {
            break;
        }
    }
    Ok(acc)
}

/// Limit of `V_n(π)` as `n → ∞`: zero unless `π ∈ EC(k,t)`, otherwise
/// `(-1)^{k/2-m} ∏ C_{s_i-1}` over the `m` simple cycles of sizes `2s_i`.
pub fn vn_limit(pi: &SetPartition) -> i128 {
    let Some(cycles) = even_cactus_cycles(pi) else {
        return 0;
    };
    let k = pi.k();
    let m = cycles.len();
    assert_eq!(m, k + 1 - pi.t(), "even cactus with m != k - t + 1: {pi}");
    let mut prod: i128 = 1;
    for c in &cycles {
        let s = (c.len() / 2) as u64;
        let cat = catalan_number(s - 1).expect("cycle length within exact range");
        prod *= cat as i128;
    }
    if (k / 2 - m) % 2 == 1 {
        -prod
    } else {
        prod
    }
}

/// An exact integer sum of `Δ` values together with its normalisation
/// `n^{k/2+1}`. For odd `k` the normaliser is irrational, so the value is
/// kept as the pair rather than as a single rational.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NormalizedSum {
    pub sum: i128,
    pub n: u64,
    pub k: u64,
}

impl NormalizedSum {
    pub fn to_f64(&self) -> f64 {
        self.sum as f64 / (self.n as f64).powf(self.k as f64 / 2.0 + 1.0)
    }

    /// Exact value when `k` is even.
    pub fn to_rational(&self) -> Option<BigRational> {
        if self.k % 2 == 1 {
            return None;
        }
        let denom = BigInt::from(self.n).pow((self.k / 2 + 1) as u32);
        Some(BigRational::new(BigInt::from(self.sum), denom))
    }

    /// `(value - limit)²` as an exact rational. Requires `limit = 0` for odd
    /// `k`, which is the only limit odd orders have.
    pub fn squared_error(&self, limit: i128) -> BigRational {
        let sum = BigInt::from(self.sum);
        let n = BigInt::from(self.n);
        if self.k % 2 == 1 {
            assert_eq!(limit, 0, "odd-order sums have limit 0");
            return BigRational::new(&sum * &sum, n.pow((self.k + 2) as u32));
        }
        let v = self.to_rational().expect("even k");
        let d = v - BigRational::from_integer(BigInt::from(limit));
        &d * &d
    }
}

fn falling_factorial(n: u64, t: u64) -> u128 {
    (0..t).fold(1u128, |acc, i| acc.saturating_mul(n.saturating_sub(i) as u128))
}

/// `V_n(π)` by enumerating every injection of the blocks of `π` into `[n]`.
pub fn vn_exact(pi: &SetPartition, s: &ConferenceMatrix) -> Result<NormalizedSum> {
    let n = s.order();
    let k = pi.k();
    let t = pi.t();
    let required = falling_factorial(n as u64, t as u64);
    if required > INJECTION_LIMIT {
        return Err(Error::Infeasible {
            required,
            limit: INJECTION_LIMIT,
        });
    }
    // edge j is evaluated once both of its blocks have values; group the
    // edges by the later block in assignment order
    let mut closing: Vec<Vec<(usize, usize)>> = vec![Vec::new(); t];
    for j in 0..k {
        let (u, v) = (pi.block_of(j), pi.block_of((j + 1) % k));
        closing[u.max(v)].push((u, v));
    }
    let mut values = vec![0usize; t];
    let mut used = vec![false; n];
    let sum = enumerate_injections(s, &closing, 0, 1, &mut values, &mut used);
    Ok(NormalizedSum {
        sum,
        n: n as u64,
        k: k as u64,
    })
}

fn enumerate_injections(
    s: &ConferenceMatrix,
    closing: &[Vec<(usize, usize)>],
    block: usize,
    partial: i64,
    values: &mut [usize],
    used: &mut [bool],
) -> i128 {
    if block == closing.len() {
        return partial as i128;
    }
    let n = s.order();
    let mut acc: i128 = 0;
    for a in 0..n {
        if used[a] {
            continue;
        }
        values[block] = a;
        let mut prod = partial;
        for &(u, v) in &closing[block] {
            prod *= s.get(values[u], values[v]) as i64;
        }
        if prod == 0 {
            continue;
        }
        used[a] = true;
        acc += enumerate_injections(s, closing, block + 1, prod, values, used);
        used[a] = false;
    }
    acc
}

/// Coefficients of `n^{-(k/2+1)} E tr(X^k) = Σ_t c_t p^t`, with
/// `c_t = Σ_{π ∈ Π(k,t)} V_n(π)` evaluated by [`vn_exact`].
pub fn expected_trace_polynomial(s: &ConferenceMatrix, k: usize) -> Result<BTreeMap<u64, NormalizedSum>> {
    if k == 0 {
        return Err(invalid("k must be >= 1"));
    }
    let n = s.order() as u64;
    let mut out: BTreeMap<u64, NormalizedSum> = (1..=k as u64)
        .map(|t| (t, NormalizedSum { sum: 0, n, k: k as u64 }))
        .collect();
    for pi in all_partitions(k) {
        let v = vn_exact(&pi, s)?;
        out.get_mut(&(pi.t() as u64)).expect("t in 1..=k").sum += v.sum;
    }
    Ok(out)
}

/// `Σ_t c_t p^t` in floating point.
pub fn evaluate_trace_polynomial(coeffs: &BTreeMap<u64, NormalizedSum>, p: f64) -> f64 {
    coeffs.iter().map(|(&t, c)| c.to_f64() * p.powi(t as i32)).sum()
}

/// `V_n(π)` for every partition of `[k]` by inclusion–exclusion.
///
/// With `hom(σ) = Σ_{a: blocks(σ) → [n]} ∏_j S[a(σ(j)), a(σ(j+1))]` over
/// all (not necessarily injective) maps, Möbius inversion on the partition
/// lattice gives `Σ_{a ∈ L_n(π)} Δ = Σ_{σ ≥ π} μ(π, σ) hom(σ)`. Each `hom`
/// is a contraction of one copy of `S` per edge of `G_σ`, done by variable
/// elimination, so cost is polynomial in `n` rather than `n^t`.
#[derive(Debug, Clone)]
pub struct InclusionExclusion {
    n: usize,
    k: usize,
    hom: HashMap<Vec<u8>, i64>,
    // for each t, every grouping of t blocks with its Möbius weight
    groupings: Vec<Vec<(Vec<u8>, i64)>>,
}

impl InclusionExclusion {
    pub fn new(s: &ConferenceMatrix, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(invalid("k must be >= 1"));
        }
        let n = s.order();
        if (n as f64).powi(k as i32) >= 2f64.powi(62) {
            return Err(Error::Overflow(format!("n^k = {n}^{k} exceeds 64-bit range")));
        }
        let dense: Vec<i64> = s.entries().iter().map(|&v| v as i64).collect();
        let mut hom = HashMap::new();
        for sigma in all_partitions(k) {
            let value = if sigma.has_loop() {
                0
            } else {
                let g = super::graph::quotient_graph(&sigma);
                contract(n, &dense, sigma.t(), g.edges())
            };
            hom.insert(sigma.assignment().to_vec(), value);
        }
        let groupings = (0..=k)
            .map(|t| {
                if t == 0 {
                    return Vec::new();
                }
                all_partitions(t)
                    .map(|rho| {
                        let mu = rho
                            .blocks()
                            .iter()
                            .map(|b| {
                                let g = b.len() as i64;
                                let fact: i64 = (1..g).product();
                                if (g - 1) % 2 == 1 {
                                    -fact
                                } else {
                                    fact
                                }
                            })
                            .product();
                        (rho.assignment().to_vec(), mu)
                    })
                    .collect()
            })
            .collect();
        Ok(Self { n, k, hom, groupings })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `hom(σ)` over all maps of blocks into `[n]`.
    pub fn hom(&self, sigma: &SetPartition) -> i64 {
        self.hom[sigma.assignment()]
    }

    pub fn vn(&self, pi: &SetPartition) -> Result<NormalizedSum> {
        if pi.k() != self.k {
            return Err(invalid(format!("partition of {} positions, table built for {}", pi.k(), self.k)));
        }
        let mut acc: i128 = 0;
        for (grouping, mu) in &self.groupings[pi.t()] {
            let sigma = pi.coarsen(grouping);
            acc += *mu as i128 * self.hom[sigma.assignment()] as i128;
        }
        Ok(NormalizedSum {
            sum: acc,
            n: self.n as u64,
            k: self.k as u64,
        })
    }

    /// Same coefficients as [`expected_trace_polynomial`].
    pub fn expected_trace_polynomial(&self) -> Result<BTreeMap<u64, NormalizedSum>> {
        let mut out: BTreeMap<u64, NormalizedSum> = (1..=self.k as u64)
            .map(|t| {
                (
                    t,
                    NormalizedSum {
                        sum: 0,
                        n: self.n as u64,
                        k: self.k as u64,
                    },
                )
            })
            .collect();
        for pi in all_partitions(self.k) {
            let v = self.vn(&pi)?;
            out.get_mut(&(pi.t() as u64)).expect("t in 1..=k").sum += v.sum;
        }
        Ok(out)
    }
}

/// Dense factor over a sorted list of variables; the first variable varies
/// fastest in `data`.
struct Factor {
    vars: Vec<usize>,
    data: Vec<i64>,
}

/// `Σ_{a ∈ [n]^vertices} ∏_{(u,v) ∈ edges} S[a_u, a_v]` for a loop-free
/// multigraph, by greedy variable elimination.
fn contract(n: usize, s: &[i64], vertices: usize, edges: &[(usize, usize)]) -> i64 {
    let mut factors: Vec<Factor> = Vec::with_capacity(edges.len());
    for &(u, v) in edges {
        if u == v {
            return 0;
        }
        let (a, b) = (u.min(v), u.max(v));
        // data[x + n*y] = S[x, y] for (a, b) = (x, y)
        let mut data = vec![0i64; n * n];
        for y in 0..n {
            for x in 0..n {
                data[x + n * y] = s[x * n + y];
            }
        }
        factors.push(Factor { vars: vec![a, b], data });
    }
    let mut scalar: i64 = 1;
    let mut remaining: Vec<usize> = (0..vertices).collect();
    while !remaining.is_empty() {
        // pick the variable whose elimination touches the fewest variables
        let (pos, var) = remaining
            .iter()
            .enumerate()
            .min_by_key(|(_, &v)| {
                let mut scope: Vec<usize> = factors
                    .iter()
                    .filter(|f| f.vars.contains(&v))
                    .flat_map(|f| f.vars.iter().copied())
                    .collect();
                scope.sort_unstable();
                scope.dedup();
                (scope.len(), v)
            })
            .map(|(i, &v)| (i, v))
            .expect("non-empty");
        remaining.remove(pos);

        let (touching, rest): (Vec<Factor>, Vec<Factor>) =
            factors.into_iter().partition(|f| f.vars.contains(&var));
        factors = rest;
        if touching.is_empty() {
            scalar *= n as i64;
            continue;
        }
        let eliminated = eliminate(n, var, &touching);
        if eliminated.vars.is_empty() {
            scalar *= eliminated.data[0];
            if scalar == 0 {
                return 0;
            }
        } else {
            factors.push(eliminated);
        }
    }
    for f in factors {
        scalar *= f.data[0];
    }
    scalar
}

fn eliminate(n: usize, var: usize, touching: &[Factor]) -> Factor {
    let mut scope: Vec<usize> = touching.iter().flat_map(|f| f.vars.iter().copied()).collect();
    scope.sort_unstable();
    scope.dedup();
    let out_vars: Vec<usize> = scope.iter().copied().filter(|&v| v != var).collect();
    let out_len = n.pow(out_vars.len() as u32);

    // strides of each output variable and of `var` inside each factor
    let stride_in = |f: &Factor, v: usize| -> usize {
        f.vars
            .iter()
            .position(|&x| x == v)
            .map_or(0, |p| n.pow(p as u32))
    };
    let out_strides: Vec<Vec<usize>> = touching
        .iter()
        .map(|f| out_vars.iter().map(|&v| stride_in(f, v)).collect())
        .collect();
    let var_strides: Vec<usize> = touching.iter().map(|f| stride_in(f, var)).collect();

    let mut data = vec![0i64; out_len];
    let mut assign = vec![0usize; out_vars.len()];
    let mut base = vec![0usize; touching.len()];
    for slot in data.iter_mut() {
        for (fi, b) in base.iter_mut().enumerate() {
            *b = assign
                .iter()
                .zip(&out_strides[fi])
                .map(|(a, st)| a * st)
                .sum();
        }
        let mut acc = 0i64;
        'values: for x in 0..n {
            let mut prod = 1i64;
            for (fi, f) in touching.iter().enumerate() {
                let val = f.data[base[fi] + x * var_strides[fi]];
                if val == 0 {
                    continue 'values;
                }
                prod *= val;
            }
            acc += prod;
        }
        *slot = acc;
        // odometer, first variable fastest
        for a in assign.iter_mut() {
            *a += 1;
            if *a < n {
                break;
            }
            *a = 0;
        }
    }
    Factor { vars: out_vars, data }
}

/// Reference `Σ Δ` over all tuples in `[n]^k` with exactly `t` distinct
/// entries, for small cases only.
pub fn brute_force_coefficients(s: &ConferenceMatrix, k: usize) -> BTreeMap<u64, i128> {
    let n = s.order();
    let mut out: BTreeMap<u64, i128> = (1..=k as u64).map(|t| (t, 0)).collect();
    let mut tuple = vec![0usize; k];
    loop {
        let d: i128 = (0..k).map(|j| s.get(tuple[j], tuple[(j + 1) % k]) as i128).product();
        if d != 0 {
            let mut distinct = tuple.clone();
            distinct.sort_unstable();
            distinct.dedup();
            *out.get_mut(&(distinct.len() as u64)).expect("t in range") += d;
        }
        let mut i = 0;
        loop {
            if i == k {
                return out;
            }
            tuple[i] += 1;
            if tuple[i] < n {
                break;
            }
            tuple[i] = 0;
            i += 1;
        }
    }
}

/// Exact `Σ_t c_t p^t` for even `k` at rational `p`.
pub fn evaluate_trace_polynomial_exact(
    coeffs: &BTreeMap<u64, NormalizedSum>,
    p: &BigRational,
) -> Option<BigRational> {
    let mut acc = BigRational::zero();
    for (&t, c) in coeffs {
        let mut pt = BigRational::one();
        for _ in 0..t {
            pt *= p;
        }
        acc += c.to_rational()? * pt;
    }
    Some(acc)
}
