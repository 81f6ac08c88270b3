//! Minkowski metric computations: p-power distances, the weighted two-exponent
//! dissimilarity, per-coordinate Minkowski centers, cluster dispersions and
//! the inverse-dispersion feature-weight update.
//!
//! All clustering criteria use p-th *powers* of coordinate gaps, never the
//! rooted metric. The rooted form exists only as a Silhouette option in the
//! evaluation module.

use crate::error::{Error, Result};
use crate::matrix::DataMatrix;
use crate::partition::Partition;

/// |d|^p with a fast path for the ubiquitous p = 2 case.
#[inline]
pub(crate) fn pow_abs(d: f64, p: f64) -> f64 {
    if p == 2.0 {
        d * d
    } else {
        d.abs().powf(p)
    }
}

fn check_exponent(name: &str, value: f64) -> Result<()> {
    if !(value > 1.0) || !value.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "{name} must be finite and > 1, got {value}"
        )));
    }
    Ok(())
}

/// Sum of p-th powers of coordinate gaps, `sum_v |x_v - y_v|^p` (no root).
pub fn minkowski_power_distance(x: &[f64], y: &[f64], p: f64) -> Result<f64> {
    check_exponent("p", p)?;
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "vectors of length {} and {}",
            x.len(),
            y.len()
        )));
    }
    Ok(x.iter()
        .zip(y)
        .map(|(&a, &b)| pow_abs(a - b, p))
        .sum())
}

/// The weighted dissimilarity `sum_v w_v^beta |x_v - c_v|^p` with decoupled
/// weight exponent `beta` and distance exponent `p`.
pub fn weighted_distance_pb(x: &[f64], c: &[f64], w: &[f64], p: f64, beta: f64) -> Result<f64> {
    check_exponent("p", p)?;
    check_exponent("beta", beta)?;
    if x.len() != c.len() || x.len() != w.len() {
        return Err(Error::DimensionMismatch(format!(
            "x: {}, c: {}, w: {}",
            x.len(),
            c.len(),
            w.len()
        )));
    }
    if let Some(&bad) = w.iter().find(|&&wv| wv < 0.0) {
        return Err(Error::InvalidParameter(format!("negative weight {bad}")));
    }
    let total: f64 = w.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "weights sum to {total}, expected 1"
        )));
    }
    Ok(dpb_preweighted(
        x,
        c,
        &w.iter().map(|&wv| wv.powf(beta)).collect::<Vec<_>>(),
        p,
    ))
}

/// Hot-path form of the two-exponent dissimilarity: the caller has already
/// raised the weights to beta.
#[inline]
pub(crate) fn dpb_preweighted(x: &[f64], c: &[f64], w_beta: &[f64], p: f64) -> f64 {
    let mut acc = 0.0;
    if p == 2.0 {
        for ((&xv, &cv), &wv) in x.iter().zip(c).zip(w_beta) {
            let d = xv - cv;
            acc += wv * d * d;
        }
    } else {
        for ((&xv, &cv), &wv) in x.iter().zip(c).zip(w_beta) {
            acc += wv * (xv - cv).abs().powf(p);
        }
    }
    acc
}

/// Plain squared Euclidean distance.
#[inline]
pub(crate) fn sq_euclidean(x: &[f64], y: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        let d = a - b;
        acc += d * d;
    }
    acc
}

/// Squared Euclidean distance that may stop accumulating once the partial
/// sum exceeds `bound`. Terms are non-negative, so the result is exact
/// whenever it is <= `bound`. The bound is only checked between 8-lane
/// chunks, which keeps the inner loop branch-free and vectorisable.
#[inline]
pub(crate) fn sq_euclidean_bounded(x: &[f64], y: &[f64], bound: f64) -> f64 {
    let mut acc = 0.0;
    let mut xc = x.chunks_exact(8);
    let mut yc = y.chunks_exact(8);
    for (xs, ys) in (&mut xc).zip(&mut yc) {
        let mut part = 0.0;
        for (&a, &b) in xs.iter().zip(ys) {
            let d = a - b;
            part += d * d;
        }
        acc += part;
        if acc > bound {
            return acc;
        }
    }
    for (&a, &b) in xc.remainder().iter().zip(yc.remainder()) {
        let d = a - b;
        acc += d * d;
    }
    acc
}

/// As [`dpb_preweighted`], stopping early once the partial sum exceeds
/// `bound`; exact whenever the result is <= `bound`.
#[inline]
pub(crate) fn dpb_preweighted_bounded(
    x: &[f64],
    c: &[f64],
    w_beta: &[f64],
    p: f64,
    bound: f64,
) -> f64 {
    let mut acc = 0.0;
    if p == 2.0 {
        let mut xc = x.chunks_exact(8);
        let mut cc = c.chunks_exact(8);
        let mut wc = w_beta.chunks_exact(8);
        for ((xs, cs), ws) in (&mut xc).zip(&mut cc).zip(&mut wc) {
            let mut part = 0.0;
            for ((&xv, &cv), &wv) in xs.iter().zip(cs).zip(ws) {
                let d = xv - cv;
                part += wv * d * d;
            }
            acc += part;
            if acc > bound {
                return acc;
            }
        }
        for ((&xv, &cv), &wv) in xc
            .remainder()
            .iter()
            .zip(cc.remainder())
            .zip(wc.remainder())
        {
            let d = xv - cv;
            acc += wv * d * d;
        }
    } else {
        // powf dominates here, so a per-term bound check costs nothing
        for ((&xv, &cv), &wv) in x.iter().zip(c).zip(w_beta) {
            acc += wv * (xv - cv).abs().powf(p);
            if acc > bound {
                return acc;
            }
        }
    }
    acc
}

/// Minimiser of `sum_i |values_i - c|^p` over one coordinate.
///
/// The objective is strictly convex for p > 1, so its derivative has a single
/// sign change inside `[min, max]`; we locate it with a Newton iteration
/// safeguarded by the shrinking bracket (the derivative's curvature is
/// unbounded near data points for p < 2, so pure Newton is not safe). At
/// p = 2 the minimiser is the arithmetic mean, returned in closed form.
pub(crate) fn center_coordinate(values: &[f64], p: f64) -> f64 {
    debug_assert!(!values.is_empty());
    if p == 2.0 {
        return values.iter().sum::<f64>() / values.len() as f64;
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in values {
        if v < lo {
            lo = v;
        }
        if v > hi {
            hi = v;
        }
    }
    if lo == hi {
        return lo;
    }
    // Derivative and second derivative of the objective divided by p:
    // g = sum_i sign(c - v_i) |c - v_i|^(p-1),  h = (p-1) sum_i |c - v_i|^(p-2).
    let q = p - 2.0;
    let grad_curv = |c: f64| -> (f64, f64) {
        let mut g = 0.0;
        let mut h = 0.0;
        for &v in values {
            let d = c - v;
            let a = d.abs();
            if a == 0.0 {
                continue;
            }
            let t = a.powf(q); // |d|^(p-2)
            g += d.signum() * t * a;
            h += t;
        }
        (g, h * (p - 1.0))
    };
    let tol = 1e-11 * (hi - lo).max(1.0);
    let mut c = 0.5 * (lo + hi);
    for _ in 0..128 {
        let (g, h) = grad_curv(c);
        if g == 0.0 {
            break;
        }
        if g < 0.0 {
            lo = c;
        } else {
            hi = c;
        }
        if hi - lo <= tol {
            c = 0.5 * (lo + hi);
            break;
        }
        let newton = c - g / h;
        let next = if h.is_finite() && h > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        let step = (next - c).abs();
        c = next;
        if step <= tol {
            break;
        }
    }
    c
}

/// Component-wise Minkowski center of a point set: per feature, the value
/// minimising the sum of p-th powers of gaps. Each component lies within the
/// coordinate range of the input.
pub fn minkowski_center<R: AsRef<[f64]>>(points: &[R], p: f64) -> Result<Vec<f64>> {
    check_exponent("p", p)?;
    if points.is_empty() {
        return Err(Error::EmptyInput("point set for minkowski center"));
    }
    let v = points[0].as_ref().len();
    if points.iter().any(|r| r.as_ref().len() != v) {
        return Err(Error::DimensionMismatch("ragged point set".into()));
    }
    let mut column = Vec::with_capacity(points.len());
    let mut center = Vec::with_capacity(v);
    for feature in 0..v {
        column.clear();
        column.extend(points.iter().map(|r| r.as_ref()[feature]));
        center.push(center_coordinate(&column, p));
    }
    Ok(center)
}

/// Minkowski center of the given member rows of a matrix; `column` is reusable
/// scratch space.
pub(crate) fn center_of_members(
    m: &DataMatrix,
    members: &[usize],
    p: f64,
    column: &mut Vec<f64>,
) -> Vec<f64> {
    debug_assert!(!members.is_empty());
    let v = m.n_features();
    let mut center = Vec::with_capacity(v);
    for feature in 0..v {
        column.clear();
        column.extend(members.iter().map(|&i| m.get(i, feature)));
        center.push(center_coordinate(column, p));
    }
    center
}

/// Per-cluster, per-feature spreads `D_kv = sum_{i in S_k} |y_iv - c_kv|^p`.
#[derive(Debug, Clone)]
pub struct Dispersions {
    pub d: Vec<Vec<f64>>,
    pub p: f64,
}

/// Computes the dispersion of every feature inside every cluster around the
/// given centroids.
pub fn dispersions(
    m: &DataMatrix,
    s: &Partition,
    centroids: &[Vec<f64>],
    p: f64,
) -> Result<Dispersions> {
    check_exponent("p", p)?;
    if s.len() != m.n_entities() {
        return Err(Error::DimensionMismatch(format!(
            "partition over {} entities for a matrix with {}",
            s.len(),
            m.n_entities()
        )));
    }
    if centroids.len() != s.k() {
        return Err(Error::DimensionMismatch(format!(
            "{} centroids for {} clusters",
            centroids.len(),
            s.k()
        )));
    }
    let v = m.n_features();
    if centroids.iter().any(|c| c.len() != v) {
        return Err(Error::DimensionMismatch("centroid width".into()));
    }
    let mut d = vec![vec![0.0; v]; s.k()];
    for (i, row) in m.rows().enumerate() {
        let k = s.label(i);
        let c = &centroids[k];
        let dk = &mut d[k];
        for feature in 0..v {
            dk[feature] += pow_abs(row[feature] - c[feature], p);
        }
    }
    Ok(Dispersions { d, p })
}

/// One row of the inverse-dispersion weight update:
/// `w_v = 1 / sum_u (D_v / D_u)^(1/(p-1))`.
///
/// If any feature has zero dispersion, the weight mass is split equally over
/// the zero-dispersion features (the limit of the formula concentrates all
/// weight there; the equal split resolves ties deterministically).
pub(crate) fn weights_from_dispersion_row(row: &[f64], p: f64) -> Vec<f64> {
    let zeros = row.iter().filter(|&&d| d == 0.0).count();
    if zeros > 0 {
        let share = 1.0 / zeros as f64;
        return row
            .iter()
            .map(|&d| if d == 0.0 { share } else { 0.0 })
            .collect();
    }
    let e = 1.0 / (p - 1.0);
    row.iter()
        .map(|&dv| {
            let denom: f64 = row.iter().map(|&du| (dv / du).powf(e)).sum();
            if denom.is_finite() {
                1.0 / denom
            } else {
                0.0
            }
        })
        .collect()
}

/// The first-order weight update: rows of weights, one per cluster, summing
/// to 1, inversely related to dispersion.
pub fn update_weights(d: &Dispersions, p: f64) -> Result<Vec<Vec<f64>>> {
    check_exponent("p", p)?;
    Ok(d.d
        .iter()
        .map(|row| weights_from_dispersion_row(row, p))
        .collect())
}
