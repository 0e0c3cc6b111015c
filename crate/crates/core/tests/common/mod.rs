//! Reference implementations used as oracles by the integration tests. None
//! of these call into the library beyond its plain data accessors.
#![allow(dead_code)]

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub fn primes_up_to(limit: usize) -> Vec<u64> {
    let mut sieve = vec![true; limit + 1];
    sieve[0] = false;
    if limit >= 1 {
        sieve[1] = false;
    }
    let mut i = 2;
    while i * i <= limit {
        if sieve[i] {
            let mut j = i * i;
            while j <= limit {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    (0..=limit).filter(|&i| sieve[i]).map(|i| i as u64).collect()
}

/// Quadratic character from the set of nonzero squares mod `q`.
pub fn quadratic_character(q: u64) -> Vec<i8> {
    let squares: BTreeSet<u64> = (1..q).map(|y| y * y % q).collect();
    (0..q)
        .map(|x| {
            if x == 0 {
                0
            } else if squares.contains(&x) {
                1
            } else {
                -1
            }
        })
        .collect()
}

/// Bordered circulant built directly from the character table.
pub fn paley_reference(q: u64) -> Vec<Vec<i8>> {
    let chi = quadratic_character(q);
    let n = q as usize + 1;
    let mut m = vec![vec![1i8; n]; n];
    m[0][0] = 0;
    for a in 0..q as usize {
        for b in 0..q as usize {
            m[1 + a][1 + b] = chi[(b + q as usize - a) % q as usize];
        }
    }
    m
}

/// `S·S == (n-1) I` with `i32` row dot products, using symmetry.
pub fn squares_to_scaled_identity(rows: &[Vec<i8>]) -> bool {
    let n = rows.len();
    let wide: Vec<Vec<i32>> = rows.iter().map(|r| r.iter().map(|&v| v as i32).collect()).collect();
    for i in 0..n {
        if wide[i][i] != 0 {
            return false;
        }
        for j in 0..n {
            if wide[i][j] != wide[j][i] || (i != j && wide[i][j].abs() != 1) {
                return false;
            }
        }
    }
    for i in 0..n {
        for j in i..n {
            let dot: i32 = wide[i].iter().zip(&wide[j]).map(|(a, b)| a * b).sum();
            let want = if i == j { n as i32 - 1 } else { 0 };
            if dot != want {
                return false;
            }
        }
    }
    true
}

pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let mut row = vec![1u128];
    for _ in 0..n {
        let mut next = vec![1u128; row.len() + 1];
        for i in 1..row.len() {
            next[i] = row[i - 1] + row[i];
        }
        row = next;
    }
    row[k as usize]
}

/// Ballot numbers by the recurrence `C(n,k) = C(n,k-1) + C(n-1,k)`.
pub fn catalan_triangle_rows(n_max: usize) -> Vec<Vec<u128>> {
    let mut rows: Vec<Vec<u128>> = Vec::new();
    for n in 0..=n_max {
        let mut row = vec![0u128; n + 1];
        row[0] = 1;
        for k in 1..=n {
            let above = if k <= n - 1 { rows[n - 1][k] } else { 0 };
            row[k] = row[k - 1] + above;
        }
        rows.push(row);
    }
    rows
}

pub fn borel(n: usize, k: usize) -> u128 {
    let cat = catalan_triangle_rows(n);
    (k..=n).map(|j| binomial(j as u64, k as u64) * cat[n][j]).sum()
}

/// `(-1)^{t-k/2-1} B(k/2-1, t-k/2-1)` in range, zero otherwise.
pub fn signed_borel(k: usize, t: usize) -> i128 {
    if k == 0 || k % 2 == 1 || t < k / 2 + 1 || t > k {
        return 0;
    }
    let idx = t - k / 2 - 1;
    let b = borel(k / 2 - 1, idx) as i128;
    if idx % 2 == 0 {
        b
    } else {
        -b
    }
}

pub fn bell_numbers(k_max: usize) -> Vec<u64> {
    // Bell triangle
    let mut out = vec![1u64];
    let mut row = vec![1u64];
    for _ in 1..=k_max {
        let mut next = vec![*row.last().unwrap()];
        for &x in &row {
            let v = next.last().unwrap() + x;
            next.push(v);
        }
        out.push(next[0]);
        row = next;
    }
    out
}

pub fn catalan(s: usize) -> u128 {
    binomial(2 * s as u64, s as u64) / (s as u128 + 1)
}

/// Weighted count of closed walks of length `k` from the root of the tree
/// in which the root has `v` children and every other vertex `v - 1`.
pub fn tree_walk_moment(v: &BigRational, k: usize) -> BigRational {
    let one = BigRational::one();
    let mut dist = vec![BigRational::zero(); k + 2];
    dist[0] = one.clone();
    for _ in 0..k {
        let mut next = vec![BigRational::zero(); k + 2];
        for d in 0..=k {
            if dist[d].is_zero() {
                continue;
            }
            let down = if d == 0 { v.clone() } else { v - &one };
            next[d + 1] += &dist[d] * down;
            if d > 0 {
                next[d - 1] += &dist[d];
            }
        }
        dist = next;
    }
    dist[0].clone()
}

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// `∫ x^k` against the Kesten–McKay density, by the trapezoid rule after
/// `x = R sin φ`. The transformed integrand is smooth and vanishes with all
/// odd derivatives at the ends, so the rule converges very fast.
pub fn km_moment_quadrature(v: f64, k: u32, steps: usize) -> f64 {
    let r = 2.0 * (v - 1.0).sqrt();
    let h = std::f64::consts::PI / steps as f64;
    let mut acc = 0.0;
    for i in 0..=steps {
        let phi = -std::f64::consts::FRAC_PI_2 + i as f64 * h;
        let w = if i == 0 || i == steps { 0.5 } else { 1.0 };
        acc += w * km_phi_integrand(v, r, phi) * (r * phi.sin()).powi(k as i32);
    }
    acc * h
}

fn km_phi_integrand(v: f64, r: f64, phi: f64) -> f64 {
    let c = phi.cos();
    // v² - x² = (v-2)² + R² cos²φ
    v * r * r * c * c / (2.0 * std::f64::consts::PI * ((v - 2.0).powi(2) + r * r * c * c))
}

/// Tabulated Kesten–McKay CDF: cumulative trapezoid in `φ` on a fine grid,
/// linearly interpolated.
pub struct TabulatedCdf {
    r: f64,
    h: f64,
    cumulative: Vec<f64>,
}

impl TabulatedCdf {
    pub fn new(v: f64, steps: usize) -> Self {
        let r = 2.0 * (v - 1.0).sqrt();
        let h = std::f64::consts::PI / steps as f64;
        let f = |i: usize| km_phi_integrand(v, r, -std::f64::consts::FRAC_PI_2 + i as f64 * h);
        let mut cumulative = vec![0.0; steps + 1];
        for i in 1..=steps {
            cumulative[i] = cumulative[i - 1] + 0.5 * h * (f(i - 1) + f(i));
        }
        Self { r, h, cumulative }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= -self.r {
            return 0.0;
        }
        if x >= self.r {
            return 1.0;
        }
        let phi = (x / self.r).asin() + std::f64::consts::FRAC_PI_2;
        let pos = phi / self.h;
        let i = (pos.floor() as usize).min(self.cumulative.len() - 2);
        let frac = pos - i as f64;
        self.cumulative[i] * (1.0 - frac) + self.cumulative[i + 1] * frac
    }
}

/// Kolmogorov–Smirnov distance with both one-sided limits.
pub fn ks_reference(values: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = values.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    for &x in &xs {
        let f = cdf(x);
        let lower = xs.partition_point(|&y| y < x) as f64 / n;
        let upper = xs.partition_point(|&y| y <= x) as f64 / n;
        d = d.max((f - lower).abs()).max((upper - f).abs());
    }
    d
}

/// Dense integer matrix power trace.
pub fn trace_of_power(m: &[Vec<i64>], k: u32) -> i128 {
    let n = m.len();
    if n == 0 {
        return 0;
    }
    let mut acc: Vec<Vec<i128>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1 } else { 0 }).collect())
        .collect();
    for _ in 0..k {
        let mut next = vec![vec![0i128; n]; n];
        for i in 0..n {
            for l in 0..n {
                if acc[i][l] == 0 {
                    continue;
                }
                for j in 0..n {
                    next[i][j] += acc[i][l] * m[l][j] as i128;
                }
            }
        }
        acc = next;
    }
    (0..n).map(|i| acc[i][i]).sum()
}

/// Every simple cycle of a multigraph given as an edge list, as a sorted
/// set of edge indices. Brute force over edge subsets.
pub fn simple_cycles(vertices: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let m = edges.len();
    assert!(m <= 16);
    let mut out = Vec::new();
    for mask in 1u32..(1 << m) {
        let chosen: Vec<usize> = (0..m).filter(|&e| mask >> e & 1 == 1).collect();
        if chosen.len() < 2 {
            continue;
        }
        let mut degree = vec![0usize; vertices];
        for &e in &chosen {
            let (u, v) = edges[e];
            if u == v {
                degree[u] = usize::MAX / 2;
            } else {
                degree[u] += 1;
                degree[v] += 1;
            }
        }
        if degree.iter().any(|&d| d != 0 && d != 2) {
            continue;
        }
        // connected through the chosen edges
        let start = edges[chosen[0]].0;
        let mut seen = vec![false; vertices];
        seen[start] = true;
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            for &e in &chosen {
                let (a, b) = edges[e];
                for (x, y) in [(a, b), (b, a)] {
                    if x == u && !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        if (0..vertices).all(|v| degree[v] == 0 || seen[v]) {
            out.push(chosen);
        }
    }
    out
}

/// `{U, U', D}` words of length `k` with `marks` marked ups that are Dyck
/// paths and have no marked up leaving height 0, by brute force.
pub fn marked_dyck_brute(k: usize, marks: usize) -> usize {
    let mut count = 0;
    let total = 3usize.pow(k as u32);
    for code in 0..total {
        let mut c = code;
        let mut h: i64 = 0;
        let mut ok = true;
        let mut m = 0;
        for _ in 0..k {
            match c % 3 {
                0 => h += 1,
                1 => {
                    if h == 0 {
                        ok = false;
                        break;
                    }
                    m += 1;
                    h += 1;
                }
                _ => {
                    h -= 1;
                    if h < 0 {
                        ok = false;
                        break;
                    }
                }
            }
            c /= 3;
        }
        if ok && h == 0 && m == marks {
            count += 1;
        }
    }
    count
}

/// `tr(M^j)` for `j = 1..=k_max` in `i64`.
pub fn traces_up_to(m: &[Vec<i64>], k_max: u32) -> Vec<i64> {
    let n = m.len();
    let mut out = Vec::with_capacity(k_max as usize);
    if n == 0 {
        return vec![0; k_max as usize];
    }
    let mut pow = m.to_vec();
    out.push((0..n).map(|i| pow[i][i]).sum());
    for _ in 1..k_max {
        let mut next = vec![vec![0i64; n]; n];
        for i in 0..n {
            for l in 0..n {
                let a = pow[i][l];
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    next[i][j] += a * m[l][j];
                }
            }
        }
        pow = next;
        out.push((0..n).map(|i| pow[i][i]).sum());
    }
    out
}

/// `Σ Δ` over all of `[n]^k`, split by the number of distinct entries.
pub fn brute_trace_coefficients(rows: &[Vec<i8>], k: usize) -> Vec<i128> {
    let n = rows.len();
    let mut out = vec![0i128; k + 1];
    let mut tuple = vec![0usize; k];
    loop {
        let mut prod = 1i64;
        for j in 0..k {
            prod *= rows[tuple[j]][tuple[(j + 1) % k]] as i64;
            if prod == 0 {
                break;
            }
        }
        if prod != 0 {
            let distinct: BTreeSet<usize> = tuple.iter().copied().collect();
            out[distinct.len()] += prod as i128;
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

/// Block id per position, positions 0-based.
pub fn has_adjacent_repeat(labels: &[u8]) -> bool {
    let k = labels.len();
    (0..k).any(|j| labels[j] == labels[(j + 1) % k])
}

pub fn crosses(labels: &[u8]) -> bool {
    let k = labels.len();
    for a1 in 0..k {
        for b1 in a1 + 1..k {
            for a2 in b1 + 1..k {
                for b2 in a2 + 1..k {
                    if labels[a1] != labels[b1] && labels[a1] == labels[a2] && labels[b1] == labels[b2] {
                        return true;
                    }
                }
            }
        }
    }
    false
}
