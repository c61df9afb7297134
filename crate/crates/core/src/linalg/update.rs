use super::{dot, mat_vec, rank_one, vec_mat, UltraMat, UltraVec};
use crate::cost::OpCounter;
use crate::error::{Error, Result};
use crate::field::{UltraScalar, Valuation};

/// Update vector `u = s_l^{-1} e_l` and the index it was taken at.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UpdateChoice {
    pub u: UltraVec,
    /// 1-based.
    pub l: usize,
    /// Set when the first index of minimal valuation was rejected.
    pub fallback: bool,
}

/// Picks the smallest index `l` with `val(s_l) = val(s)` whose entry of
/// `check` is not zero-like, and returns `u = s_l^{-1} e_l`.
pub fn choose_update_vector(s: &UltraVec, check: &UltraVec) -> Result<UpdateChoice> {
    if s.len() != check.len() {
        return Err(Error::DimensionMismatch { expected: s.len(), got: check.len() });
    }
    let Valuation::Finite(v) = s.val() else {
        return Err(Error::DivisionByApparentZero { precision: s.abs_prec() });
    };
    let candidates: Vec<usize> = (0..s.len()).filter(|&i| s.get(i).valuation() == Valuation::Finite(v)).collect();
    let pick = candidates.iter().position(|&i| !check.get(i).is_zero_like()).ok_or_else(|| {
        Error::BasinViolation(format!("every index of minimal valuation {v} has a vanishing check entry"))
    })?;
    let l = candidates[pick];
    let ctx = *s.get(0).context();
    let mut u = UltraVec::zeros(&ctx, s.len());
    u.set(l, s.get(l).inv()?);
    Ok(UpdateChoice { u, l: l + 1, fallback: pick > 0 })
}

/// `Binv - (Binv f)(u^t Binv) / (u^t Binv y)`.
pub fn sherman_morrison_update(
    binv: &UltraMat,
    f_next: &UltraVec,
    u: &UltraVec,
    y: &UltraVec,
    ctr: &mut OpCounter,
) -> Result<UltraMat> {
    let h = mat_vec(binv, f_next, ctr)?;
    sherman_morrison_from_parts(binv, &h, u, y, ctr)
}

/// [`sherman_morrison_update`] with `h = Binv f_next` already computed.
pub(crate) fn sherman_morrison_from_parts(
    binv: &UltraMat,
    h: &UltraVec,
    u: &UltraVec,
    y: &UltraVec,
    ctr: &mut OpCounter,
) -> Result<UltraMat> {
    let r = vec_mat(u, binv, ctr)?;
    let den = dot(&r, y, ctr)?;
    if den.is_zero_like() {
        return Err(Error::InvertibilityFailure { precision: den.abs_prec().unwrap_or(i64::MAX) });
    }
    if h.entries().iter().all(UltraScalar::is_exact_zero) {
        return Ok(binv.clone());
    }
    let num = rank_one(h, &r, ctr)?;
    binv.sub(&num.div_scalar(&den, ctr)?)
}

fn mat_mul(a: &UltraMat, b: &UltraMat, ctr: &mut OpCounter) -> Result<UltraMat> {
    if a.cols() != b.rows() {
        return Err(Error::DimensionMismatch { expected: a.cols(), got: b.rows() });
    }
    ctr.mat_mat += 1;
    let cols: Vec<UltraVec> = (0..b.cols()).map(|j| mat_vec(a, &b.column(j), ctr)).collect::<Result<_>>()?;
    let rows = (0..a.rows()).map(|i| cols.iter().map(|c| c.get(i).clone()).collect()).collect();
    UltraMat::from_rows(rows)
}

/// Lifts an approximate inverse `x0` of `j` to absolute precision `prec`
/// by the matrix Newton iteration `X <- X + X (I - J X)`.
///
/// Each step costs two matrix products, recorded in `ctr.mat_mat`.
pub fn lift_inverse(j: &UltraMat, x0: &UltraMat, prec: i64, ctr: &mut OpCounter) -> Result<UltraMat> {
    let ctx = *j.get(0, 0).context();
    let id = UltraMat::identity(&ctx, j.rows());
    let mut x = x0.change_prec(prec);
    let mut last = None;
    loop {
        let e = id.sub(&mat_mul(j, &x, ctr)?)?;
        let v = e.val();
        if v.is_at_least(prec) {
            return Ok(x);
        }
        let lb = v.lower_bound().expect("nonzero residual");
        if lb < 1 {
            return Err(Error::SingularResidue);
        }
        if last.is_some_and(|l| lb <= l) {
            // `j` itself is not known well enough to go further.
            return Ok(x);
        }
        last = Some(lb);
        x = x.add(&mat_mul(&x, &e, ctr)?)?;
    }
}
