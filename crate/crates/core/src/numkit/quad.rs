use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;
use std::sync::OnceLock;

use super::{NumError, Tolerance};

const MAX_DEPTH: u32 = 40;
const INITIAL_PANELS: usize = 8;

/// Integral value with its a-posteriori error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadEstimate {
    pub value: f64,
    pub error: f64,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    fl: f64,
    fr: f64,
    depth: u32,
    value: f64,
    error: f64,
    seq: usize,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

fn checked<F: Fn(f64) -> f64>(f: &F, x: f64) -> Result<f64, NumError> {
    let v = f(x);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(NumError::NonFinite { t: x })
    }
}

#[allow(clippy::too_many_arguments)]
fn make_panel(
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    fl: f64,
    fr: f64,
    depth: u32,
    seq: usize,
) -> Panel {
    let h = b - a;
    let whole = h / 6.0 * (fa + 4.0 * fm + fb);
    let left = h / 12.0 * (fa + 4.0 * fl + fm);
    let right = h / 12.0 * (fm + 4.0 * fr + fb);
    let delta = left + right - whole;
    Panel {
        a,
        b,
        fa,
        fm,
        fb,
        fl,
        fr,
        depth,
        value: left + right + delta / 15.0,
        error: delta.abs() / 15.0,
        seq,
    }
}

/// Globally adaptive Simpson quadrature of `f` over `[a, b]`.
///
/// Panels are bisected in order of decreasing local error until the summed
/// estimate satisfies `max(abs_tol, rel_tol * |value|)`. Panels at depth 40
/// are frozen.
pub fn quad_adaptive<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: &Tolerance,
) -> Result<QuadEstimate, NumError> {
    tol.validate()?;
    if !(a.is_finite() && b.is_finite()) {
        return Err(NumError::Domain(format!("non-finite limits [{a}, {b}]")));
    }
    if a > b {
        return Err(NumError::Domain(format!("need a <= b, got [{a}, {b}]")));
    }
    if a == b {
        return Ok(QuadEstimate {
            value: 0.0,
            error: 0.0,
        });
    }

    let width = (b - a) / INITIAL_PANELS as f64;
    let mut heap = BinaryHeap::new();
    let mut frozen: Vec<Panel> = Vec::new();
    let mut seq = 0usize;
    let mut f_left = checked(&f, a)?;
    for i in 0..INITIAL_PANELS {
        let pa = a + width * i as f64;
        let pb = if i + 1 == INITIAL_PANELS {
            b
        } else {
            a + width * (i + 1) as f64
        };
        let pm = 0.5 * (pa + pb);
        let fb = checked(&f, pb)?;
        let fm = checked(&f, pm)?;
        let fl = checked(&f, 0.5 * (pa + pm))?;
        let fr = checked(&f, 0.5 * (pm + pb))?;
        heap.push(make_panel(pa, pb, f_left, fm, fb, fl, fr, 0, seq));
        seq += 1;
        f_left = fb;
    }

    let mut total_value: f64 = heap.iter().map(|p| p.value).sum();
    let mut total_error: f64 = heap.iter().map(|p| p.error).sum();
    let mut subdivisions = 0usize;

    loop {
        let target = tol.abs_tol.max(tol.rel_tol * total_value.abs());
        if total_error <= target {
            break;
        }
        let Some(panel) = heap.pop() else {
            break;
        };
        if panel.depth >= MAX_DEPTH {
            frozen.push(panel);
            continue;
        }
        if subdivisions >= tol.max_steps {
            heap.push(panel);
            let est = summarize(&heap, &frozen);
            return Err(NumError::QuadratureLimit {
                value: est.value,
                err: est.error,
            });
        }
        subdivisions += 1;

        let m = 0.5 * (panel.a + panel.b);
        let lm = 0.5 * (panel.a + m);
        let rm = 0.5 * (m + panel.b);
        let l_fl = checked(&f, 0.5 * (panel.a + lm))?;
        let l_fr = checked(&f, 0.5 * (lm + m))?;
        let r_fl = checked(&f, 0.5 * (m + rm))?;
        let r_fr = checked(&f, 0.5 * (rm + panel.b))?;
        let left = make_panel(
            panel.a,
            m,
            panel.fa,
            panel.fl,
            panel.fm,
            l_fl,
            l_fr,
            panel.depth + 1,
            seq,
        );
        let right = make_panel(
            m,
            panel.b,
            panel.fm,
            panel.fr,
            panel.fb,
            r_fl,
            r_fr,
            panel.depth + 1,
            seq + 1,
        );
        seq += 2;
        total_value += left.value + right.value - panel.value;
        total_error += left.error + right.error - panel.error;
        heap.push(left);
        heap.push(right);
    }

    let est = summarize(&heap, &frozen);
    let target = tol.abs_tol.max(tol.rel_tol * est.value.abs());
    if est.error > target {
        return Err(NumError::QuadratureLimit {
            value: est.value,
            err: est.error,
        });
    }
    Ok(est)
}

fn summarize(heap: &BinaryHeap<Panel>, frozen: &[Panel]) -> QuadEstimate {
    let mut panels: Vec<&Panel> = heap.iter().chain(frozen.iter()).collect();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let mut value = 0.0;
    let mut comp = 0.0;
    let mut error = 0.0;
    for p in panels {
        let y = p.value - comp;
        let t = value + y;
        comp = (t - value) - y;
        value = t;
        error += p.error;
    }
    QuadEstimate { value, error }
}

/// Number of nodes of [`quad_gauss_legendre`].
pub const GAUSS_LEGENDRE_NODES: usize = 64;

fn gauss_legendre_rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = GAUSS_LEGENDRE_NODES;
        let mut rule = Vec::with_capacity(n);
        for i in 0..n {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let k = k as f64;
                    let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let step = p1 / dp;
                x -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            rule.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
        }
        rule
    })
}

/// Fixed 64-point Gauss-Legendre rule on `[a, b]`. Exact for polynomials of
/// degree 127; no error estimate.
pub fn quad_gauss_legendre<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    half * gauss_legendre_rule()
        .iter()
        .map(|&(x, w)| w * f(mid + half * x))
        .sum::<f64>()
}

/// Running integrals `∫_{grid[0]}^{grid[i]} f` for an increasing grid.
pub fn cumulative_quad<F: Fn(f64) -> f64>(
    f: F,
    grid: &[f64],
    tol: &Tolerance,
) -> Result<Vec<f64>, NumError> {
    let mut out = Vec::with_capacity(grid.len());
    let mut acc = 0.0;
    for (i, &x) in grid.iter().enumerate() {
        if i > 0 {
            acc += quad_adaptive(&f, grid[i - 1], x, tol)?.value;
        }
        out.push(acc);
    }
    Ok(out)
}
