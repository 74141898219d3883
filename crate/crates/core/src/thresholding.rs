//! Pointwise and blockwise operators for l1-2 regularization.
//!
//! The star of the module is the l1-2 thresholding operator
//! `T_lambda = E_lambda ∘ S_lambda`: soft-threshold, then rescale the
//! survivors outward by `1 + lambda/||.||_2`. The enlargement step restores
//! the magnitude that plain soft thresholding shaves off large components,
//! which is exactly how the l1-2 penalty avoids over-penalizing them. The
//! module also provides the exact proximal map of
//! `lambda*(||x||_1 - ||x||_2)` (which coincides with `T_lambda` whenever
//! `||y||_inf > lambda`), the top-s truncation operator used by the
//! truncated solver, and the index-block machinery used by the regularity
//! analysis.
//!
//! Tie-breaking is uniform across the module: whenever magnitudes tie, the
//! lowest index wins. This makes every operator deterministic.

use nalgebra::DVector;

use crate::core::{ensure_finite, Error, Result};

/// A sorted, duplicate-free set of vector indices.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IndexSet {
    indices: Vec<usize>,
}

impl IndexSet {
    /// Builds a set from arbitrary indices; sorts and removes duplicates.
    pub fn new(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        IndexSet { indices }
    }

    pub fn empty() -> Self {
        IndexSet::default()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    /// Largest index plus one that this set can address, for range checks.
    fn max_index(&self) -> Option<usize> {
        self.indices.last().copied()
    }

    /// The complement within `0..n`.
    pub fn complement(&self, n: usize) -> IndexSet {
        IndexSet { indices: (0..n).filter(|&i| !self.contains(i)).collect() }
    }

    pub fn union(&self, other: &IndexSet) -> IndexSet {
        let mut merged = self.indices.clone();
        merged.extend_from_slice(&other.indices);
        IndexSet::new(merged)
    }
}

impl std::fmt::Display for IndexSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.indices.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !lambda.is_finite() || lambda < 0.0 {
        return Err(Error::Domain("lambda must be finite and nonnegative".into()));
    }
    Ok(())
}

/// Componentwise soft thresholding `(|x_i| - lambda)_+ * sign(x_i)`.
///
/// `sign(0) = 0`, and killed components are exactly `+0.0` (never `-0.0`).
pub fn soft_threshold(x: &DVector<f64>, lambda: f64) -> Result<DVector<f64>> {
    check_lambda(lambda)?;
    ensure_finite(x, "input")?;
    Ok(x.map(|xi| {
        let mag = xi.abs() - lambda;
        if mag > 0.0 {
            mag.copysign(xi)
        } else {
            0.0
        }
    }))
}

/// The enlargement `(1 + lambda/||x||_2) * x`.
///
/// Scales `x` outward so its norm grows by exactly `lambda`; the direction
/// is unchanged. Undefined at the zero vector — callers that can hit that
/// case should use [`l12_threshold`], which resolves it to zero.
pub fn enlarge(x: &DVector<f64>, lambda: f64) -> Result<DVector<f64>> {
    check_lambda(lambda)?;
    ensure_finite(x, "input")?;
    let norm = x.norm();
    if norm == 0.0 {
        return Err(Error::Domain("enlargement is undefined at the zero vector".into()));
    }
    Ok(x * (1.0 + lambda / norm))
}

/// The l1-2 thresholding operator `T_lambda(x) = enlarge(soft_threshold(x))`.
///
/// By convention `T_lambda(x) = 0` when soft thresholding kills everything
/// (`||x||_inf <= lambda`), where the enlargement is undefined. Two
/// properties hold for every input:
///
/// * thresholding: `|x_i| <= lambda` implies `T_lambda(x)_i = 0`;
/// * shrinkage: `||T_lambda(x) - x||_inf <= lambda`.
pub fn l12_threshold(x: &DVector<f64>, lambda: f64) -> Result<DVector<f64>> {
    check_lambda(lambda)?;
    ensure_finite(x, "input")?;
    let z = x.map(|xi| {
        let mag = xi.abs() - lambda;
        if mag > 0.0 {
            mag.copysign(xi)
        } else {
            0.0
        }
    });
    let norm = z.norm();
    if norm == 0.0 {
        return Ok(z);
    }
    Ok(z * (1.0 + lambda / norm))
}

/// The exact proximal map of `lambda*(||x||_1 - ||x||_2)`, i.e. a minimizer
/// of `lambda*(||x||_1 - ||x||_2) + 0.5*||x - y||_2^2`, selected
/// deterministically:
///
/// * `||y||_inf > lambda`: `(1 + lambda/||z||_2)*z` with
///   `z = soft_threshold(y, lambda)` — identical to [`l12_threshold`];
/// * `||y||_inf = lambda`: one nonzero of magnitude `lambda` at the lowest
///   index attaining the max, with the sign of `y` there;
/// * `0 < ||y||_inf < lambda`: one nonzero of magnitude `||y||_inf` at the
///   lowest index attaining the max, with the sign of `y` there;
/// * `y = 0`: zero.
///
/// In the boundary and sub-threshold cases the minimizer set contains every
/// point supported on the argmax set with the right norm; the lowest-index
/// choice is a selection rule, not a claim of uniqueness. The boundary case
/// `||y||_inf == lambda` is detected by exact floating comparison.
pub fn prox_l12(y: &DVector<f64>, lambda: f64) -> Result<DVector<f64>> {
    if !lambda.is_finite() || lambda <= 0.0 {
        return Err(Error::Domain("prox requires a positive finite lambda".into()));
    }
    ensure_finite(y, "input")?;
    let ymax = y.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if ymax > lambda {
        return l12_threshold(y, lambda);
    }
    let mut out = DVector::zeros(y.len());
    if ymax == 0.0 {
        return Ok(out);
    }
    // Boundary (||y||_inf == lambda) and interior (< lambda) cases coincide:
    // a single spike of magnitude min(||y||_inf, lambda) = ||y||_inf.
    let i = (0..y.len())
        .find(|&i| y[i].abs() == ymax)
        .expect("a nonzero vector attains its max magnitude");
    out[i] = ymax.copysign(y[i]);
    Ok(out)
}

/// Keeps the `s` entries of largest magnitude (ties: lowest index) and zeros
/// the rest.
pub fn truncate_top_s(z: &DVector<f64>, s: usize) -> Result<DVector<f64>> {
    let n = z.len();
    if s > n {
        return Err(Error::Domain(format!("cannot keep {s} entries of a length-{n} vector")));
    }
    ensure_finite(z, "input")?;
    if s == n {
        return Ok(z.clone());
    }
    let keep = indices_by_magnitude(z, (0..n).collect());
    let mut out = DVector::zeros(n);
    for &i in keep.iter().take(s) {
        out[i] = z[i];
    }
    Ok(out)
}

/// Sorts candidate indices by `|x_i|` descending, ties broken by lowest
/// index first.
fn indices_by_magnitude(x: &DVector<f64>, mut candidates: Vec<usize>) -> Vec<usize> {
    candidates.sort_by(|&a, &b| x[b].abs().total_cmp(&x[a].abs()).then(a.cmp(&b)));
    candidates
}

/// The `t` indices outside `exclude` with largest `|x_i|` (ties: lowest
/// index).
pub fn top_t_indices(x: &DVector<f64>, exclude: &IndexSet, t: usize) -> Result<IndexSet> {
    let n = x.len();
    ensure_finite(x, "input")?;
    if let Some(max) = exclude.max_index() {
        if max >= n {
            return Err(Error::Domain(format!(
                "exclude contains index {max}, out of range for length {n}"
            )));
        }
    }
    let candidates: Vec<usize> = (0..n).filter(|&i| !exclude.contains(i)).collect();
    if t > candidates.len() {
        return Err(Error::Domain(format!(
            "asked for {t} indices but only {} are outside the excluded set",
            candidates.len()
        )));
    }
    let ranked = indices_by_magnitude(x, candidates);
    Ok(IndexSet::new(ranked[..t].to_vec()))
}

/// Partitions the complement of `base` into blocks of size `t` (the last
/// possibly smaller) in decreasing magnitude order of `|x_i]`.
///
/// Block 0 always equals `top_t_indices(x, base, min(t, |base^c|))`; the
/// blocks are pairwise disjoint and cover `base^c` exactly.
pub fn partition_blocks(x: &DVector<f64>, base: &IndexSet, t: usize) -> Result<Vec<IndexSet>> {
    if t == 0 {
        return Err(Error::Domain("block size t must be at least 1".into()));
    }
    let n = x.len();
    ensure_finite(x, "input")?;
    if let Some(max) = base.max_index() {
        if max >= n {
            return Err(Error::Domain(format!(
                "base contains index {max}, out of range for length {n}"
            )));
        }
    }
    let rest: Vec<usize> = (0..n).filter(|&i| !base.contains(i)).collect();
    let ranked = indices_by_magnitude(x, rest);
    Ok(ranked.chunks(t).map(|chunk| IndexSet::new(chunk.to_vec())).collect())
}
