//! Dormand–Prince 5(4) integration with fourth-order dense output.

use super::cmatrix::C64;
use crate::error::{Error, Result};

pub const DEFAULT_RTOL: f64 = 1e-10;
pub const DEFAULT_ATOL: f64 = 1e-12;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
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

/// Right-hand side plus tolerances for an ODE y′ = f(t, y) in ℂⁿ.
pub struct OdeSetup<F>
where
    F: FnMut(f64, &[C64], &mut [C64]),
{
    pub dimension: usize,
    pub rhs: F,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub max_steps: usize,
}

impl<F> OdeSetup<F>
where
    F: FnMut(f64, &[C64], &mut [C64]),
{
    pub fn new(dimension: usize, rhs: F) -> Self {
        OdeSetup {
            dimension,
            rhs,
            rel_tol: DEFAULT_RTOL,
            abs_tol: DEFAULT_ATOL,
            max_step: f64::INFINITY,
            max_steps: 2_000_000,
        }
    }

    pub fn tolerances(mut self, rel_tol: f64, abs_tol: f64) -> Self {
        assert!(rel_tol > 0.0 && rel_tol < 1.0 && abs_tol > 0.0 && abs_tol < 1.0);
        self.rel_tol = rel_tol;
        self.abs_tol = abs_tol;
        self
    }

    pub fn max_step(mut self, h: f64) -> Self {
        assert!(h > 0.0);
        self.max_step = h;
        self
    }

    /// Integrate from `t_span.0` to `t_span.1` (either direction).
    pub fn integrate(&mut self, y0: &[C64], t_span: (f64, f64)) -> Result<Trajectory> {
        assert_eq!(y0.len(), self.dimension, "initial state has wrong dimension");
        let (t0, t1) = t_span;
        assert!(t0.is_finite() && t1.is_finite());
        if t0 == t1 {
            return Ok(Trajectory::single(t0, y0.to_vec()));
        }
        let steps = self.run(y0, t0, t1)?;
        Ok(Trajectory::from_steps(t0, y0.to_vec(), steps, t1 < t0))
    }

    /// Integrate from `t0` both backwards to `span.0` and forwards to `span.1`.
    pub fn integrate_two_sided(&mut self, y0: &[C64], t0: f64, span: (f64, f64)) -> Result<Trajectory> {
        assert!(span.0 <= t0 && t0 <= span.1);
        let back = self.integrate(y0, (t0, span.0))?;
        let fwd = self.integrate(y0, (t0, span.1))?;
        Ok(Trajectory::join(back, fwd))
    }

    fn run(&mut self, y0: &[C64], t0: f64, t1: f64) -> Result<Vec<Step>> {
        let n = self.dimension;
        let dir = (t1 - t0).signum();
        let zero = C64::new(0.0, 0.0);
        let mut k = vec![vec![zero; n]; 7];
        let mut ytmp = vec![zero; n];
        let mut ynew = vec![zero; n];
        let mut y = y0.to_vec();
        let mut t = t0;
        (self.rhs)(t, &y, &mut k[0]);
        let mut h = dir * self.initial_step(t, &y, &k[0].clone(), (t1 - t0).abs());
        let mut steps = Vec::new();
        let mut reject = false;
        let mut nsteps = 0usize;
        loop {
            if (t1 - t).abs() <= 1e-15 * t1.abs().max(1.0) {
                break;
            }
            nsteps += 1;
            if nsteps > self.max_steps {
                return Err(Error::StepSizeUnderflow(t));
            }
            if h.abs() > self.max_step {
                h = dir * self.max_step;
            }
            let last = (t + h - t1) * dir >= 0.0;
            if last {
                h = t1 - t;
            }
            if h.abs() < 1e-14 * t.abs().max(1.0) {
                return Err(Error::StepSizeUnderflow(t));
            }
            let stage = |k: &[Vec<C64>], coef: &[(usize, f64)], out: &mut [C64]| {
                for i in 0..n {
                    let mut s = y[i];
                    for &(j, a) in coef {
                        s += k[j][i] * (h * a);
                    }
                    out[i] = s;
                }
            };
            stage(&k, &[(0, A21)], &mut ytmp);
            (self.rhs)(t + C2 * h, &ytmp, &mut k[1]);
            stage(&k, &[(0, A31), (1, A32)], &mut ytmp);
            (self.rhs)(t + C3 * h, &ytmp, &mut k[2]);
            stage(&k, &[(0, A41), (1, A42), (2, A43)], &mut ytmp);
            (self.rhs)(t + C4 * h, &ytmp, &mut k[3]);
            stage(&k, &[(0, A51), (1, A52), (2, A53), (3, A54)], &mut ytmp);
            (self.rhs)(t + C5 * h, &ytmp, &mut k[4]);
            stage(&k, &[(0, A61), (1, A62), (2, A63), (3, A64), (4, A65)], &mut ytmp);
            (self.rhs)(t + h, &ytmp, &mut k[5]);
            stage(&k, &[(0, A71), (2, A73), (3, A74), (4, A75), (5, A76)], &mut ynew);
            (self.rhs)(t + h, &ynew, &mut k[6]);
            let mut err = 0.0;
            for i in 0..n {
                let e = (k[0][i] * E1 + k[2][i] * E3 + k[3][i] * E4 + k[4][i] * E5 + k[5][i] * E6 + k[6][i] * E7) * h;
                let sc = self.abs_tol + self.rel_tol * y[i].norm().max(ynew[i].norm());
                err += (e.norm() / sc).powi(2);
            }
            let err = (err / n as f64).sqrt();
            if !err.is_finite() {
                h *= 0.2;
                reject = true;
                continue;
            }
            if err <= 1.0 {
                let mut rc = Vec::with_capacity(5 * n);
                for i in 0..n {
                    let ydiff = ynew[i] - y[i];
                    let bspl = k[0][i] * h - ydiff;
                    rc.push(y[i]);
                    rc.push(ydiff);
                    rc.push(bspl);
                    rc.push(ydiff - k[6][i] * h - bspl);
                    rc.push((k[0][i] * D1 + k[2][i] * D3 + k[3][i] * D4 + k[4][i] * D5 + k[5][i] * D6 + k[6][i] * D7) * h);
                }
                let t_new = if last { t1 } else { t + h };
                steps.push(Step { t0: t, h: t_new - t, rc, y1: ynew.clone() });
                t = t_new;
                std::mem::swap(&mut y, &mut ynew);
                let k6 = k[6].clone();
                k[0].copy_from_slice(&k6);
                let mut fac = 0.9 * err.max(1e-10).powf(-0.2);
                fac = fac.clamp(0.2, 10.0);
                if reject {
                    fac = fac.min(1.0);
                }
                reject = false;
                h *= fac;
                if last {
                    break;
                }
            } else {
                let fac = (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
                h *= fac;
                reject = true;
            }
        }
        Ok(steps)
    }

    fn initial_step(&mut self, t: f64, y: &[C64], f0: &[C64], span: f64) -> f64 {
        let n = self.dimension;
        let sc: Vec<f64> = y.iter().map(|v| self.abs_tol + self.rel_tol * v.norm()).collect();
        let nrm = |v: &[C64]| (v.iter().zip(&sc).map(|(a, s)| (a.norm() / s).powi(2)).sum::<f64>() / n as f64).sqrt();
        let d0 = nrm(y);
        let d1 = nrm(f0);
        let mut h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        h0 = h0.min(span).min(self.max_step);
        let y1: Vec<C64> = y.iter().zip(f0).map(|(a, b)| a + b * h0).collect();
        let mut f1 = vec![C64::new(0.0, 0.0); n];
        (self.rhs)(t + h0, &y1, &mut f1);
        let diff: Vec<C64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
        let d2 = nrm(&diff) / h0;
        let h1 = if d1.max(d2) <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / d1.max(d2)).powf(0.2) };
        (100.0 * h0).min(h1).min(span).min(self.max_step)
    }
}

/// One accepted step with its dense-output coefficients.
#[derive(Clone, Debug)]
struct Step {
    t0: f64,
    h: f64,
    rc: Vec<C64>,
    y1: Vec<C64>,
}

impl Step {
    fn eval(&self, t: f64, out: &mut [C64]) {
        let th = (t - self.t0) / self.h;
        let th1 = 1.0 - th;
        for (i, o) in out.iter_mut().enumerate() {
            let r = &self.rc[5 * i..5 * i + 5];
            *o = r[0] + (r[1] + (r[2] + (r[3] + r[4] * th1) * th) * th1) * th;
        }
    }

    fn deriv(&self, t: f64, out: &mut [C64]) {
        let th = (t - self.t0) / self.h;
        let th1 = 1.0 - th;
        for (i, o) in out.iter_mut().enumerate() {
            let r = &self.rc[5 * i..5 * i + 5];
            let q = r[2] + (r[3] + r[4] * th1) * th;
            let dq = r[3] + r[4] * (1.0 - 2.0 * th);
            let s = r[1] + q * th1;
            let ds = -q + dq * th1;
            *o = (s + ds * th) / self.h;
        }
    }
}

/// Dense solution of an ODE on a closed interval.
#[derive(Clone, Debug)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<Vec<C64>>,
    steps: Vec<Step>,
}

impl Trajectory {
    fn single(t: f64, y: Vec<C64>) -> Self {
        Trajectory { times: vec![t], states: vec![y], steps: Vec::new() }
    }

    fn from_steps(t0: f64, y0: Vec<C64>, steps: Vec<Step>, backward: bool) -> Self {
        let mut times = vec![t0];
        let mut states = vec![y0];
        for s in &steps {
            times.push(s.t0 + s.h);
            states.push(s.y1.clone());
        }
        let mut tr = Trajectory { times, states, steps };
        if backward {
            tr.times.reverse();
            tr.states.reverse();
            tr.steps.reverse();
        }
        tr
    }

    /// Concatenate a backward piece ending at t0 and a forward piece starting there.
    fn join(back: Trajectory, fwd: Trajectory) -> Self {
        let mut times = back.times;
        let mut states = back.states;
        let mut steps = back.steps;
        times.extend_from_slice(&fwd.times[1..]);
        states.extend(fwd.states.into_iter().skip(1));
        steps.extend(fwd.steps);
        Trajectory { times, states, steps }
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[Vec<C64>] {
        &self.states
    }

    pub fn dim(&self) -> usize {
        self.states[0].len()
    }

    pub fn t_start(&self) -> f64 {
        self.times[0]
    }

    pub fn t_end(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> &[C64] {
        self.states.last().unwrap()
    }

    /// Interpolation order of the dense output.
    pub fn interpolation_order(&self) -> usize {
        4
    }

    fn locate(&self, t: f64) -> usize {
        let n = self.steps.len();
        assert!(n > 0, "trajectory has a single point");
        let lo = self.t_start();
        let hi = self.t_end();
        let tol = 1e-12 * (hi - lo).abs().max(1.0);
        assert!(t >= lo - tol && t <= hi + tol, "t = {t} outside [{lo}, {hi}]");
        match self.times.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
            Ok(i) => i.min(n - 1),
            Err(i) => i.saturating_sub(1).min(n - 1),
        }
    }

    /// State at `t` from the dense output.
    pub fn eval(&self, t: f64) -> Vec<C64> {
        if self.steps.is_empty() {
            return self.states[0].clone();
        }
        let mut out = vec![C64::new(0.0, 0.0); self.dim()];
        self.steps[self.locate(t)].eval(t, &mut out);
        out
    }

    /// Time derivative of the dense-output interpolant at `t`.
    pub fn deriv(&self, t: f64) -> Vec<C64> {
        if self.steps.is_empty() {
            return vec![C64::new(0.0, 0.0); self.dim()];
        }
        let mut out = vec![C64::new(0.0, 0.0); self.dim()];
        self.steps[self.locate(t)].deriv(t, &mut out);
        out
    }

    /// `n` equally spaced sample times spanning the trajectory.
    pub fn sample_times(&self, n: usize) -> Vec<f64> {
        let (a, b) = (self.t_start(), self.t_end());
        if n < 2 {
            return vec![a];
        }
        (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
    }
}

/// A single uncontrolled Dormand–Prince step of size `h` (fifth-order
/// solution), split into substeps no longer than `hmax`.
pub fn rk_step<F>(rhs: &mut F, t: f64, y: &[C64], h: f64, hmax: f64) -> Vec<C64>
where
    F: FnMut(f64, &[C64], &mut [C64]),
{
    let n = y.len();
    let m = ((h.abs() / hmax).ceil() as usize).max(1);
    let hs = h / m as f64;
    let zero = C64::new(0.0, 0.0);
    let mut k = vec![vec![zero; n]; 6];
    let mut yt = vec![zero; n];
    let mut y = y.to_vec();
    let mut t = t;
    let table: [(f64, &[(usize, f64)]); 6] = [
        (0.0, &[]),
        (C2, &[(0, A21)]),
        (C3, &[(0, A31), (1, A32)]),
        (C4, &[(0, A41), (1, A42), (2, A43)]),
        (C5, &[(0, A51), (1, A52), (2, A53), (3, A54)]),
        (1.0, &[(0, A61), (1, A62), (2, A63), (3, A64), (4, A65)]),
    ];
    for _ in 0..m {
        for (s, (cs, coef)) in table.iter().enumerate() {
            for i in 0..n {
                let mut v = y[i];
                for &(j, a) in coef.iter() {
                    v += k[j][i] * (hs * a);
                }
                yt[i] = v;
            }
            let (_, rest) = k.split_at_mut(s);
            rhs(t + cs * hs, &yt, &mut rest[0]);
        }
        for i in 0..n {
            y[i] += (k[0][i] * A71 + k[2][i] * A73 + k[3][i] * A74 + k[4][i] * A75 + k[5][i] * A76) * hs;
        }
        t += hs;
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::cmatrix::c;

    #[test]
    fn constant_solution() {
        let mut s = OdeSetup::new(2, |_t, _y: &[C64], dy: &mut [C64]| {
            dy.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
        });
        let tr = s.integrate(&[c(1.0, 2.0), c(-3.0, 0.0)], (0.0, 5.0)).unwrap();
        assert_eq!(tr.eval(3.3), vec![c(1.0, 2.0), c(-3.0, 0.0)]);
    }

    #[test]
    fn rotation_full_turn() {
        let mut s = OdeSetup::new(1, |_t, y: &[C64], dy: &mut [C64]| dy[0] = c(0.0, 1.0) * y[0]);
        let tr = s.integrate(&[c(1.0, 0.0)], (0.0, 2.0 * std::f64::consts::PI)).unwrap();
        assert!((tr.last()[0] - c(1.0, 0.0)).norm() < 1e-8);
        for &t in &[0.3, 1.7, 4.1, 6.0] {
            assert!((tr.eval(t)[0] - C64::from_polar(1.0, t)).norm() < 1e-9);
            assert!((tr.deriv(t)[0] - c(0.0, 1.0) * C64::from_polar(1.0, t)).norm() < 1e-7);
        }
    }

    #[test]
    fn backward_and_two_sided() {
        let mut s = OdeSetup::new(1, |_t, y: &[C64], dy: &mut [C64]| dy[0] = y[0]);
        let tr = s.integrate(&[c(1.0, 0.0)], (0.0, -2.0)).unwrap();
        assert!(tr.times().windows(2).all(|w| w[0] < w[1]));
        assert!((tr.eval(-1.5)[0].re - (-1.5f64).exp()).abs() < 1e-9);
        let tr = s.integrate_two_sided(&[c(1.0, 0.0)], 0.5, (-1.0, 2.0)).unwrap();
        assert!(tr.times().windows(2).all(|w| w[0] < w[1]));
        for &t in &[-1.0, -0.2, 0.5, 1.1, 2.0] {
            assert!((tr.eval(t)[0].re - (t - 0.5f64).exp()).abs() < 1e-8 * (t - 0.5f64).exp());
        }
    }

    #[test]
    fn tolerance_scaling_consistent_with_order_five() {
        let err = |tol: f64| {
            let mut s = OdeSetup::new(1, |_t, y: &[C64], dy: &mut [C64]| dy[0] = c(0.0, 1.0) * y[0]).tolerances(tol, tol);
            let tr = s.integrate(&[c(1.0, 0.0)], (0.0, 20.0)).unwrap();
            ((tr.last()[0] - C64::from_polar(1.0, 20.0)).norm(), tr.len())
        };
        let (e1, n1) = err(1e-6);
        let (e2, n2) = err(1e-8);
        assert!(e2 < e1);
        // Step count grows like tol^(-1/5): factor 100 in tolerance ≈ 2.5× steps.
        let ratio = n2 as f64 / n1 as f64;
        assert!(ratio > 1.8 && ratio < 3.5, "step ratio {ratio}");
    }

    #[test]
    fn single_step_accuracy() {
        let mut f = |_t: f64, y: &[C64], dy: &mut [C64]| dy[0] = -y[0];
        let y = rk_step(&mut f, 0.0, &[c(1.0, 0.0)], 0.01, 1.0);
        assert!((y[0].re - (-0.01f64).exp()).abs() < 1e-15);
    }
}
