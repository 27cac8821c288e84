//! Extremal eigenpairs of sparse symmetric matrices and the commutator norm.
//!
//! Matrices arrive as `(i, j, value)` triplets (`i <= j`, symmetric
//! completion implied). Dense diagonalization handles `n <= 512`; larger
//! problems go through a Lanczos iteration with full reorthogonalization.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::seeds::splitmix64;

/// Dimension threshold between the dense and Lanczos paths.
pub const DENSE_EIGEN_CAP: usize = 512;
/// Acceptable residual `||A v - lambda v||` per returned eigenpair.
pub const RESIDUAL_TOL: f64 = 1e-6;

/// A relaxed solution: unit-norm eigenvector with its eigenvalue.
#[derive(Debug, Clone)]
pub struct RelaxedVector {
    pub coords: Vec<f64>,
    pub eigenvalue: f64,
}

/// Dense symmetric matrix from sparse triplets.
pub fn dense_from_entries(n: usize, entries: &[(u32, u32, f64)]) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    for &(i, j, v) in entries {
        m[(i as usize, j as usize)] = v;
        m[(j as usize, i as usize)] = v;
    }
    m
}

fn rows_from_entries(n: usize, entries: &[(u32, u32, f64)]) -> Vec<Vec<(u32, f64)>> {
    let mut rows: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n];
    for &(i, j, v) in entries {
        rows[i as usize].push((j, v));
        if i != j {
            rows[j as usize].push((i, v));
        }
    }
    rows
}

fn matvec(rows: &[Vec<(u32, f64)>], x: &[f64], out: &mut [f64]) {
    for (i, row) in rows.iter().enumerate() {
        let mut acc = 0.0;
        for &(j, v) in row {
            acc += v * x[j as usize];
        }
        out[i] = acc;
    }
}

/// Flip so the largest-magnitude coordinate is positive; deterministic under
/// positive rescaling of the matrix.
fn canonicalize_sign(v: &mut [f64]) {
    let mut idx = 0;
    let mut best = 0.0;
    for (i, &x) in v.iter().enumerate() {
        if x.abs() > best {
            best = x.abs();
            idx = i;
        }
    }
    if v[idx] < 0.0 {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
}

/// `k` eigenpairs from the two spectrum ends: the `k - k/2` smallest
/// algebraic eigenvalues (ascending) followed by the `k/2` largest
/// (descending). The ground-state end leads so that downstream tie-breaks
/// prefer it.
pub fn extremal_eigenpairs(
    n: usize,
    entries: &[(u32, u32, f64)],
    k: usize,
) -> Result<Vec<RelaxedVector>> {
    if k == 0 || k > n {
        return Err(Error::invalid(format!("k = {k} outside 1..={n}")));
    }
    let mut pairs = if n <= DENSE_EIGEN_CAP {
        dense_extremal(n, entries, k)
    } else {
        lanczos_extremal(n, entries, k)?
    };
    for p in &mut pairs {
        canonicalize_sign(&mut p.coords);
        let norm = p.coords.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-8 {
            for x in &mut p.coords {
                *x /= norm;
            }
        }
    }
    // Certify residuals on the way out.
    let rows = rows_from_entries(n, entries);
    let mut tmp = vec![0.0; n];
    for p in &pairs {
        matvec(&rows, &p.coords, &mut tmp);
        let res: f64 = tmp
            .iter()
            .zip(&p.coords)
            .map(|(av, v)| (av - p.eigenvalue * v).powi(2))
            .sum::<f64>()
            .sqrt();
        if res > RESIDUAL_TOL {
            return Err(Error::numerical(format!(
                "eigenpair residual {res:.3e} exceeds {RESIDUAL_TOL:.0e}"
            )));
        }
    }
    Ok(pairs)
}

fn select_ends(mut order: Vec<(f64, Vec<f64>)>, k: usize) -> Vec<RelaxedVector> {
    // order is ascending by eigenvalue.
    let hi = k / 2;
    let lo = k - hi;
    let n = order.len();
    let mut out = Vec::with_capacity(k);
    for item in order.iter_mut().take(lo) {
        let (eigenvalue, coords) = std::mem::take(item);
        out.push(RelaxedVector { coords, eigenvalue });
    }
    for idx in (n - hi..n).rev() {
        let (eigenvalue, coords) = std::mem::take(&mut order[idx]);
        out.push(RelaxedVector { coords, eigenvalue });
    }
    out
}

fn dense_extremal(n: usize, entries: &[(u32, u32, f64)], k: usize) -> Vec<RelaxedVector> {
    let m = dense_from_entries(n, entries);
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<(f64, Vec<f64>)> = (0..n)
        .map(|c| {
            (
                eig.eigenvalues[c],
                eig.eigenvectors.column(c).iter().copied().collect(),
            )
        })
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out = select_ends(order, k);
    for pair in &mut out {
        refine_dense(&m, pair);
    }
    out
}

/// Shifted inverse iteration with Rayleigh-quotient updates; tightens the
/// residual of a nearly-converged pair well below the certificate tolerance.
fn refine_dense(a: &DMatrix<f64>, pair: &mut RelaxedVector) {
    use nalgebra::DVector;
    let n = a.nrows();
    let mut v = DVector::from_column_slice(&pair.coords);
    let mut lambda = pair.eigenvalue;
    for _ in 0..3 {
        let r = (a * &v) - lambda * &v;
        if r.norm() <= RESIDUAL_TOL * 0.01 {
            break;
        }
        // Offset the shift by the residual scale so the solve stays
        // well-conditioned even when lambda is nearly exact.
        let shift = lambda + r.norm().max(1e-12);
        let mut shifted = a.clone();
        for i in 0..n {
            shifted[(i, i)] -= shift;
        }
        match nalgebra::LU::new(shifted).solve(&v) {
            Some(x) if x.norm() > 0.0 => {
                v = x.normalize();
                lambda = (a * &v).dot(&v);
            }
            _ => break,
        }
    }
    pair.coords = v.iter().copied().collect();
    pair.eigenvalue = lambda;
}

fn lanczos_extremal(n: usize, entries: &[(u32, u32, f64)], k: usize) -> Result<Vec<RelaxedVector>> {
    let rows = rows_from_entries(n, entries);
    let hi = k / 2;
    let lo = k - hi;
    // Deterministic pseudo-random start vector.
    let mut v: Vec<f64> = (0..n)
        .map(|i| (splitmix64(0x51ab_c0de ^ i as u64) as f64 / u64::MAX as f64) - 0.5)
        .collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);

    let max_iter = (4 * k + 20).max(600).min(n);
    let mut basis: Vec<Vec<f64>> = vec![v];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut w = vec![0.0; n];

    for j in 0..max_iter {
        matvec(&rows, &basis[j], &mut w);
        let alpha: f64 = w.iter().zip(&basis[j]).map(|(a, b)| a * b).sum();
        alphas.push(alpha);
        // Full reorthogonalization, twice for stability.
        for _ in 0..2 {
            for q in &basis {
                let dot: f64 = w.iter().zip(q).map(|(a, b)| a * b).sum();
                w.iter_mut().zip(q).for_each(|(a, b)| *a -= dot * b);
            }
        }
        let beta = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        let exhausted = beta < 1e-12 || j + 1 == max_iter;
        let should_check = exhausted || (j + 1 >= k + 2 && (j + 1) % 8 == 0);
        if should_check {
            if let Some(pairs) = ritz_if_converged(&basis, &alphas, &betas, beta, hi, lo, exhausted)
            {
                return Ok(pairs);
            }
            if exhausted && beta < 1e-12 {
                // Invariant subspace smaller than requested accuracy allows.
                return Err(Error::numerical(
                    "Lanczos basis exhausted before extremal pairs converged".to_string(),
                ));
            }
        }
        if j + 1 < max_iter {
            betas.push(beta);
            let next: Vec<f64> = w.iter().map(|x| x / beta).collect();
            basis.push(next);
        }
    }
    Err(Error::numerical(format!(
        "Lanczos failed to converge within {max_iter} iterations"
    )))
}

/// Solve the current tridiagonal system; return Ritz pairs when every wanted
/// extremal pair has an estimated residual below tolerance.
fn ritz_if_converged(
    basis: &[Vec<f64>],
    alphas: &[f64],
    betas: &[f64],
    beta_next: f64,
    hi: usize,
    lo: usize,
    force: bool,
) -> Option<Vec<RelaxedVector>> {
    let m = alphas.len();
    if m < hi + lo {
        return None;
    }
    let mut t = DMatrix::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alphas[i];
        if i + 1 < m {
            t[(i, i + 1)] = betas[i];
            t[(i + 1, i)] = betas[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let wanted: Vec<usize> = order[..lo]
        .iter()
        .chain(order[m - hi..].iter().rev())
        .copied()
        .collect();
    if !force {
        for &c in &wanted {
            let resid = (beta_next * eig.eigenvectors[(m - 1, c)]).abs();
            if resid > RESIDUAL_TOL * 0.1 {
                return None;
            }
        }
    }
    let n = basis[0].len();
    let mut out = Vec::with_capacity(hi + lo);
    for &c in &wanted {
        let mut coords = vec![0.0; n];
        for (j, q) in basis.iter().enumerate().take(m) {
            let s = eig.eigenvectors[(j, c)];
            coords.iter_mut().zip(q).for_each(|(x, b)| *x += s * b);
        }
        out.push(RelaxedVector {
            coords,
            eigenvalue: eig.eigenvalues[c],
        });
    }
    Some(out)
}

/// Spectral norm of the commutator `A B - B A` (its largest singular value),
/// via power iteration on the Gram matrix. The estimate converges to the top
/// singular value even for clustered spectra; relative tolerance 1e-9.
pub fn commutator_norm(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    use nalgebra::DVector;
    debug_assert_eq!(a.nrows(), b.nrows());
    let c = a * b - b * a;
    let n = c.nrows();
    let mut v = DVector::from_fn(n, |i, _| {
        (splitmix64(0xc033_u64 ^ i as u64) as f64 / u64::MAX as f64) - 0.5
    });
    if v.norm() == 0.0 {
        return 0.0;
    }
    v /= v.norm();
    let mut sigma = 0.0f64;
    for _ in 0..500 {
        let w = &c * &v;
        let mut u = c.tr_mul(&w);
        let norm = u.norm();
        if norm == 0.0 {
            return w.norm();
        }
        u /= norm;
        let next = (&c * &u).norm();
        if (next - sigma).abs() <= 1e-9 * next.max(1.0) {
            return next;
        }
        sigma = next;
        v = u;
    }
    sigma
}
