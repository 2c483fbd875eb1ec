use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Rank-k factors of a matrix: `A ≈ U diag(S) V'`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSvd {
    pub u: DMatrix<f64>,
    pub s: DVector<f64>,
    pub v: DMatrix<f64>,
}

/// Computes the leading `k` singular triplets of `a`.
///
/// Singular values are sorted non-increasing and must all be numerically
/// positive. Column signs follow [`apply_sign_convention`].
pub fn truncated_svd(a: &DMatrix<f64>, k: usize) -> Result<TruncatedSvd> {
    let (n, m) = a.shape();
    if k == 0 {
        return Err(Error::Validation("rank k must be at least 1".into()));
    }
    let max = n.min(m);
    if k > max {
        return Err(Error::RankTooLarge { k, max });
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("matrix passed to SVD"));
    }
    let svd = a.clone().svd(true, true);
    let u_full = svd.u.expect("requested U");
    let vt_full = svd.v_t.expect("requested V'");
    let sv = svd.singular_values;

    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&i, &j| sv[j].total_cmp(&sv[i]).then(i.cmp(&j)));

    let largest = sv[order[0]];
    let tol = (n.max(m) as f64) * f64::EPSILON * largest;
    let mut u = DMatrix::zeros(n, k);
    let mut v = DMatrix::zeros(m, k);
    let mut s = DVector::zeros(k);
    for (col, &idx) in order.iter().take(k).enumerate() {
        let value = sv[idx];
        if !(value > tol) {
            return Err(Error::RankDeficient { k, index: col, value });
        }
        s[col] = value;
        u.set_column(col, &u_full.column(idx));
        v.set_column(col, &vt_full.row(idx).transpose());
    }
    let mut out = TruncatedSvd { u, s, v };
    apply_sign_convention(&mut out.u, &mut out.v);
    Ok(out)
}

/// Flips column pairs so that the largest-magnitude entry of every column of
/// `v` is nonnegative; the matching column of `u` flips with it. The first
/// entry wins a magnitude tie. Idempotent.
pub fn apply_sign_convention(u: &mut DMatrix<f64>, v: &mut DMatrix<f64>) {
    for j in 0..v.ncols() {
        let mut best = 0.0f64;
        let mut sign = 1.0;
        for &x in v.column(j).iter() {
            if x.abs() > best {
                best = x.abs();
                sign = if x < 0.0 { -1.0 } else { 1.0 };
            }
        }
        if sign < 0.0 {
            v.column_mut(j).neg_mut();
            u.column_mut(j).neg_mut();
        }
    }
}

/// Largest absolute deviation of `Q'Q` from the identity.
pub fn orthonormality_error(q: &DMatrix<f64>) -> f64 {
    let gram = q.transpose() * q;
    let k = gram.nrows();
    (gram - DMatrix::<f64>::identity(k, k)).amax()
}
