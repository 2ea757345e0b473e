//! Independent reference computations used as test oracles. Nothing here
//! calls into the estimators under test.
#![allow(dead_code)]

/// Expected `n(n-1)` of the positive count in a bin of `m` ticks of a
/// stationary two-state sign chain with stay probability `p`, by enumerating
/// all `2^m` sign sequences. Feasible for `m <= 20`.
pub fn markov_pair_moment_enumerated(p: f64, m: usize) -> f64 {
    let mut total = 0.0;
    for bits in 0u32..(1 << m) {
        let mut weight = 0.5;
        for i in 1..m {
            let same = ((bits >> i) & 1) == ((bits >> (i - 1)) & 1);
            weight *= if same { p } else { 1.0 - p };
        }
        let n = bits.count_ones() as f64;
        total += weight * n * (n - 1.0);
    }
    total
}

/// Same quantity by summing pair coincidence probabilities
/// `P(s_i = +, s_j = +)` over all ordered pairs `i != j`, each from an explicit
/// power of the 2x2 transition matrix.
pub fn markov_pair_moment_pairwise(p: f64, m: usize) -> f64 {
    // powers[d] = P(+ at t+d | + at t)
    let mut powers = Vec::with_capacity(m);
    let mut mat = [[1.0, 0.0], [0.0, 1.0]];
    let step = [[p, 1.0 - p], [1.0 - p, p]];
    for _ in 0..m {
        powers.push(mat[0][0]);
        let mut next = [[0.0; 2]; 2];
        for (r, row) in next.iter_mut().enumerate() {
            for (c, cell) in row.iter_mut().enumerate() {
                *cell = mat[r][0] * step[0][c] + mat[r][1] * step[1][c];
            }
        }
        mat = next;
    }
    let mut total = 0.0;
    for i in 0..m {
        for j in 0..m {
            if i != j {
                total += 0.5 * powers[i.abs_diff(j)];
            }
        }
    }
    total
}

/// Expected like-sign `F_2` for a window cut into bins of `m` ticks of the
/// Markov chain. The mean positive occupancy of a bin is `m/2`.
pub fn markov_f2_oracle(p: f64, m: usize) -> f64 {
    markov_pair_moment_pairwise(p, m) / (m as f64 / 2.0).powi(2)
}

/// Deterministic p-model cell weights (the first factor always goes left).
/// The sum of squared block masses at any level does not depend on the
/// left/right assignment, so this is the exact reference for every seed.
pub fn cascade_weights(levels: u32, w: f64) -> Vec<f64> {
    let mut cells = vec![1.0];
    for _ in 0..levels {
        cells = cells.iter().flat_map(|&c| [c * w, c * (1.0 - w)]).collect();
    }
    cells
}

/// Exact `F_2(M)` of the cascade intensity for a window of all `2^levels`
/// cells cut into `m` bins: `M * sum_k mass_k^2 / total^2`.
pub fn cascade_f2_exact(levels: u32, w: f64, m: usize) -> f64 {
    let cells = cascade_weights(levels, w);
    let block = cells.len() / m;
    let total: f64 = cells.iter().sum();
    let sq: f64 = cells.chunks(block).map(|b| b.iter().sum::<f64>().powi(2)).sum();
    m as f64 * sq / (total * total)
}

/// Ordinary least-squares slope of `ln y` on `ln x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Expected number of complete positive runs of length `g` in `n` iid signs
/// with `P(+) = p`, by enumerating all `2^n` sequences.
pub fn iid_run_counts_enumerated(p: f64, n: usize) -> Vec<f64> {
    let mut expected = vec![0.0; n + 1];
    for bits in 0u32..(1 << n) {
        let ones = bits.count_ones() as i32;
        let weight = p.powi(ones) * (1.0 - p).powi(n as i32 - ones);
        let mut i = 0;
        while i < n {
            if (bits >> i) & 1 == 0 {
                i += 1;
                continue;
            }
            let start = i;
            while i < n && (bits >> i) & 1 == 1 {
                i += 1;
            }
            if start > 0 && i < n {
                expected[i - start] += weight;
            }
        }
    }
    expected
}

/// Closed form of [`iid_run_counts_enumerated`]: `(n-g-1)(1-p)^2 p^g`.
pub fn iid_run_count_closed(p: f64, n: usize, g: usize) -> f64 {
    if g + 2 > n {
        return 0.0;
    }
    (n - g - 1) as f64 * (1.0 - p).powi(2) * p.powi(g as i32)
}

/// Taylor coefficients of `G(z) = sum_n P_n (1+z)^n`, expanded by Pascal's rule.
pub fn gf_taylor_coefficients(probs: &[f64]) -> Vec<f64> {
    let mut coeffs = vec![0.0; probs.len()];
    let mut row = vec![1.0];
    for (n, &p) in probs.iter().enumerate() {
        for (k, c) in row.iter().enumerate() {
            coeffs[k] += p * c;
        }
        if n + 1 < probs.len() {
            let mut next = vec![1.0; row.len() + 1];
            for k in 1..row.len() {
                next[k] = row[k - 1] + row[k];
            }
            row = next;
        }
    }
    coeffs
}

pub fn factorial(q: usize) -> f64 {
    (1..=q).map(|k| k as f64).product()
}
