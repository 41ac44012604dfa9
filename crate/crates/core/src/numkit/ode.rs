use super::{NumError, Tolerance};

const C2: f64 = 0.2;
const C3: f64 = 0.3;
const C4: f64 = 0.8;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 0.2;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Accepted nodes of an integration together with per-step dense output.
#[derive(Debug, Clone)]
pub struct OdeTrajectory {
    times: Vec<f64>,
    states: Vec<Vec<f64>>,
    errors: Vec<f64>,
    // Five coefficient vectors per step, flattened.
    dense: Vec<Vec<f64>>,
    dim: usize,
    stopped_early: bool,
}

impl OdeTrajectory {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[Vec<f64>] {
        &self.states
    }

    /// Error norm of the step that produced each node (0 for the initial node).
    pub fn error_estimates(&self) -> &[f64] {
        &self.errors
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn t_start(&self) -> f64 {
        self.times[0]
    }

    pub fn t_end(&self) -> f64 {
        *self.times.last().expect("trajectory has an initial node")
    }

    pub fn terminal(&self) -> &[f64] {
        self.states.last().expect("trajectory has an initial node")
    }

    /// True when a stop predicate ended the integration before `t1`.
    pub fn stopped_early(&self) -> bool {
        self.stopped_early
    }

    /// Dense evaluation at `t`, clamped to the integrated interval.
    pub fn eval(&self, t: f64) -> Vec<f64> {
        let n = self.times.len();
        if n == 1 || t <= self.times[0] {
            return self.states[0].clone();
        }
        if t >= self.times[n - 1] {
            return self.states[n - 1].clone();
        }
        let i = match self
            .times
            .binary_search_by(|probe| probe.partial_cmp(&t).expect("finite node times"))
        {
            Ok(i) => return self.states[i].clone(),
            Err(i) => i - 1,
        };
        let h = self.times[i + 1] - self.times[i];
        let s = (t - self.times[i]) / h;
        let s1 = 1.0 - s;
        let c = &self.dense[i];
        let d = self.dim;
        (0..d)
            .map(|j| {
                c[j] + (c[d + j] + (c[2 * d + j] + (c[3 * d + j] + c[4 * d + j] * s1) * s) * s1) * s
            })
            .collect()
    }

    /// Dense evaluation of a single component.
    pub fn eval_component(&self, t: f64, component: usize) -> f64 {
        self.eval(t)[component]
    }
}

/// Integrates `y' = rhs(t, y)` from `t0` to `t1` with the Dormand-Prince
/// 5(4) pair and step-size control on the mixed error norm.
pub fn integrate_ode<F>(
    rhs: F,
    t0: f64,
    y0: &[f64],
    t1: f64,
    tol: &Tolerance,
) -> Result<OdeTrajectory, NumError>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    integrate_ode_until(rhs, t0, y0, t1, tol, |_, _| false)
}

/// Like [`integrate_ode`], but ends after the first accepted step at which
/// `stop(t, y)` returns true.
pub fn integrate_ode_until<F, S>(
    rhs: F,
    t0: f64,
    y0: &[f64],
    t1: f64,
    tol: &Tolerance,
    mut stop: S,
) -> Result<OdeTrajectory, NumError>
where
    F: Fn(f64, &[f64], &mut [f64]),
    S: FnMut(f64, &[f64]) -> bool,
{
    tol.validate()?;
    if !(t1 > t0) {
        return Err(NumError::Domain(format!("need t1 > t0, got [{t0}, {t1}]")));
    }
    let dim = y0.len();
    if y0.iter().any(|v| !v.is_finite()) {
        return Err(NumError::NonFinite { t: t0 });
    }

    let mut traj = OdeTrajectory {
        times: vec![t0],
        states: vec![y0.to_vec()],
        errors: vec![0.0],
        dense: Vec::new(),
        dim,
        stopped_early: false,
    };

    let mut k1 = vec![0.0; dim];
    let mut k2 = vec![0.0; dim];
    let mut k3 = vec![0.0; dim];
    let mut k4 = vec![0.0; dim];
    let mut k5 = vec![0.0; dim];
    let mut k6 = vec![0.0; dim];
    let mut k7 = vec![0.0; dim];
    let mut ytmp = vec![0.0; dim];
    let mut ynew = vec![0.0; dim];

    let mut t = t0;
    let mut y = y0.to_vec();
    rhs(t, &y, &mut k1);
    if k1.iter().any(|v| !v.is_finite()) {
        return Err(NumError::NonFinite { t });
    }

    let span = t1 - t0;
    let mut h = initial_step(&rhs, t, &y, &k1, span, tol);
    let mut steps = 0usize;
    let mut last_rejected = false;

    while t < t1 {
        if steps >= tol.max_steps {
            return Err(NumError::StepLimit {
                t,
                max_steps: tol.max_steps,
            });
        }
        steps += 1;
        let min_step = 1e-14 * t.abs().max(span);
        if h < min_step {
            return Err(NumError::NonFinite { t });
        }
        let last = t + h >= t1;
        if last {
            h = t1 - t;
        }

        for i in 0..dim {
            ytmp[i] = y[i] + h * A21 * k1[i];
        }
        rhs(t + C2 * h, &ytmp, &mut k2);
        for i in 0..dim {
            ytmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        }
        rhs(t + C3 * h, &ytmp, &mut k3);
        for i in 0..dim {
            ytmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        rhs(t + C4 * h, &ytmp, &mut k4);
        for i in 0..dim {
            ytmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        rhs(t + C5 * h, &ytmp, &mut k5);
        for i in 0..dim {
            ytmp[i] =
                y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        rhs(t + h, &ytmp, &mut k6);
        for i in 0..dim {
            ynew[i] =
                y[i] + h * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
        }
        rhs(t + h, &ynew, &mut k7);

        let finite = [&k2, &k3, &k4, &k5, &k6, &k7]
            .iter()
            .all(|k| k.iter().all(|v| v.is_finite()))
            && ynew.iter().all(|v| v.is_finite());
        if !finite {
            h *= 0.25;
            last_rejected = true;
            continue;
        }

        let mut err_sq = 0.0;
        for i in 0..dim {
            let e =
                h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sk = tol.abs_tol + tol.rel_tol * y[i].abs().max(ynew[i].abs());
            err_sq += (e / sk) * (e / sk);
        }
        let err = if dim == 0 {
            0.0
        } else {
            (err_sq / dim as f64).sqrt()
        };

        if err <= 1.0 {
            let mut cont = vec![0.0; 5 * dim];
            for i in 0..dim {
                let ydiff = ynew[i] - y[i];
                let bspl = h * k1[i] - ydiff;
                cont[i] = y[i];
                cont[dim + i] = ydiff;
                cont[2 * dim + i] = bspl;
                cont[3 * dim + i] = ydiff - h * k7[i] - bspl;
                cont[4 * dim + i] = h
                    * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
            }
            t = if last { t1 } else { t + h };
            y.copy_from_slice(&ynew);
            k1.copy_from_slice(&k7);
            traj.times.push(t);
            traj.states.push(y.clone());
            traj.errors.push(err);
            traj.dense.push(cont);

            if stop(t, &y) {
                traj.stopped_early = t < t1;
                break;
            }

            let mut fac = if err == 0.0 {
                10.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 10.0)
            };
            if last_rejected {
                fac = fac.min(1.0);
            }
            h *= fac;
            last_rejected = false;
        } else {
            h *= (0.9 * err.powf(-0.2)).max(0.2);
            last_rejected = true;
        }
    }

    Ok(traj)
}

fn initial_step<F>(rhs: &F, t: f64, y: &[f64], f0: &[f64], span: f64, tol: &Tolerance) -> f64
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    let dim = y.len();
    if dim == 0 {
        return span;
    }
    let scale: Vec<f64> = y
        .iter()
        .map(|v| tol.abs_tol + tol.rel_tol * v.abs())
        .collect();
    let norm = |v: &[f64]| -> f64 {
        (v.iter()
            .zip(&scale)
            .map(|(x, s)| (x / s) * (x / s))
            .sum::<f64>()
            / dim as f64)
            .sqrt()
    };
    let d0 = norm(y);
    let d1 = norm(f0);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6 * span
    } else {
        (0.01 * d0 / d1).min(span)
    };
    let y1: Vec<f64> = y.iter().zip(f0).map(|(a, b)| a + h0 * b).collect();
    let mut f1 = vec![0.0; dim];
    rhs(t + h0, &y1, &mut f1);
    let diff: Vec<f64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
    let d2 = norm(&diff) / h0;
    let h1 = if !d2.is_finite() {
        h0 * 1e-3
    } else if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6 * span)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(span)
}
