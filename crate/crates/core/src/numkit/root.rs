use super::{NumError, Tolerance};

/// Final bracket of a sign change, `f(lo)` and `f(hi)` of opposite sign
/// (or one of them zero).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
    pub f_lo: f64,
    pub f_hi: f64,
}

impl Bracket {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// The end point with the smaller residual.
    pub fn best(&self) -> f64 {
        if self.f_lo.abs() <= self.f_hi.abs() {
            self.lo
        } else {
            self.hi
        }
    }
}

/// Shrinks a sign-change bracket until its width is at most `abs_tol` or an
/// end point has `|f| <= abs_tol`.
///
/// Iterations alternate a secant proposal with plain bisection, so the
/// width at least halves every second step.
pub fn refine_bracket<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    tol: &Tolerance,
) -> Result<Bracket, NumError> {
    tol.validate()?;
    let (mut lo, mut hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut f_lo = f(lo);
    let mut f_hi = f(hi);
    if !(f_lo.is_finite() && f_hi.is_finite()) || f_lo * f_hi > 0.0 {
        return Err(NumError::InvalidBracket {
            lo,
            hi,
            flo: f_lo,
            fhi: f_hi,
        });
    }
    for iter in 0..tol.max_steps {
        if hi - lo <= tol.abs_tol || f_lo.abs() <= tol.abs_tol || f_hi.abs() <= tol.abs_tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let x = if iter % 2 == 0 && f_hi != f_lo {
            let s = hi - f_hi * (hi - lo) / (f_hi - f_lo);
            let guard = 1e-3 * (hi - lo);
            if s > lo + guard && s < hi - guard {
                s
            } else {
                mid
            }
        } else {
            mid
        };
        if x <= lo || x >= hi {
            break;
        }
        let fx = f(x);
        if !fx.is_finite() {
            return Err(NumError::NonFinite { t: x });
        }
        if (fx < 0.0) == (f_lo < 0.0) && fx != 0.0 {
            lo = x;
            f_lo = fx;
        } else {
            hi = x;
            f_hi = fx;
        }
    }
    Ok(Bracket { lo, hi, f_lo, f_hi })
}

/// Root of `f` inside a sign-change bracket.
pub fn find_root_bracketed<F: FnMut(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    tol: &Tolerance,
) -> Result<f64, NumError> {
    refine_bracket(f, lo, hi, tol).map(|b| b.best())
}

/// Bisection on a monotone predicate: `pred(lo)` false, `pred(hi)` true.
/// Returns the final `(lo, hi)` with `hi - lo <= width`.
pub fn bisect_predicate<P: FnMut(f64) -> Result<bool, E>, E>(
    mut pred: P,
    mut lo: f64,
    mut hi: f64,
    width: f64,
    max_iter: usize,
) -> Result<(f64, f64), E> {
    for _ in 0..max_iter {
        if hi - lo <= width {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((lo, hi))
}
