//! Matrix potentials x ↦ U(x), given in closed form or generated by an ODE.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numerics::{CMatrix, OdeSetup, Trajectory, C64};

/// Tolerance for the period check.
pub const PERIOD_TOL: f64 = 1e-8;

/// An autonomous or non-autonomous ODE whose state determines U pointwise.
pub trait GeneratingOde: Send + Sync {
    /// State dimension.
    fn state_dim(&self) -> usize;
    /// Matrix size d of U.
    fn potential_dim(&self) -> usize;
    fn x0(&self) -> f64;
    fn y0(&self) -> Vec<C64>;
    fn rhs(&self, x: f64, y: &[C64], dy: &mut [C64]);
    fn potential(&self, x: f64, y: &[C64]) -> CMatrix;
    /// Tolerances for integrating the generating system.
    fn tolerances(&self) -> (f64, f64) {
        (1e-12, 1e-14)
    }
}

#[derive(Clone)]
enum Source {
    Closed(Arc<dyn Fn(f64) -> CMatrix + Send + Sync>),
    Generated { ode: Arc<dyn GeneratingOde>, traj: Arc<Trajectory> },
}

/// Symmetry flags, detected by probing.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SymmetryFlags {
    pub symmetric: bool,
    pub hermitian: bool,
    pub real: bool,
}

/// A d×d potential with an optional period.
#[derive(Clone)]
pub struct PotentialEvaluator {
    d: usize,
    period: Option<f64>,
    source: Source,
    flags: SymmetryFlags,
}

impl fmt::Debug for PotentialEvaluator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.source {
            Source::Closed(_) => "closed",
            Source::Generated { .. } => "generated",
        };
        f.debug_struct("PotentialEvaluator")
            .field("d", &self.d)
            .field("period", &self.period)
            .field("kind", &kind)
            .field("flags", &self.flags)
            .finish()
    }
}

fn probe_points(x0: f64, span: f64) -> Vec<f64> {
    [0.0, 0.137, 0.291, 0.503, 0.662, 0.818, 0.951].iter().map(|t| x0 + t * span).collect()
}

impl PotentialEvaluator {
    /// Closed-form potential. The period, if given, is not checked here; see
    /// [`PotentialEvaluator::periodic`].
    pub fn closed<F>(d: usize, period: Option<f64>, f: F) -> Self
    where
        F: Fn(f64) -> CMatrix + Send + Sync + 'static,
    {
        let mut p = PotentialEvaluator { d, period, source: Source::Closed(Arc::new(f)), flags: SymmetryFlags::default() };
        p.flags = p.detect_flags();
        p
    }

    /// Closed-form potential with a verified period T.
    pub fn periodic<F>(d: usize, period: f64, f: F) -> Result<Self>
    where
        F: Fn(f64) -> CMatrix + Send + Sync + 'static,
    {
        let p = Self::closed(d, Some(period), f);
        p.check_period()?;
        Ok(p)
    }

    /// Potential generated by an ODE, integrated over `span` (which must
    /// contain x0). With a period, the state must return within 1e−8 after T.
    pub fn generated(ode: Arc<dyn GeneratingOde>, period: Option<f64>, span: (f64, f64)) -> Result<Self> {
        let x0 = ode.x0();
        let mut span = span;
        if let Some(t) = period {
            if !(t > 0.0) {
                return Err(Error::Domain("period must be positive".into()));
            }
            span = (span.0.min(x0), span.1.max(x0 + t));
        }
        let traj = integrate_generating(ode.as_ref(), x0, span)?;
        if let Some(t) = period {
            let y0 = ode.y0();
            let y1 = traj.eval(x0 + t);
            let scale = y0.iter().map(|z| z.norm()).fold(1.0, f64::max);
            let gap = y0.iter().zip(&y1).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            if gap > PERIOD_TOL * scale {
                return Err(Error::Domain(format!("state does not return after one period (defect {gap:.3e})")));
            }
        }
        let d = ode.potential_dim();
        let mut p = PotentialEvaluator { d, period, source: Source::Generated { ode, traj: Arc::new(traj) }, flags: SymmetryFlags::default() };
        p.flags = p.detect_flags();
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn period(&self) -> Option<f64> {
        self.period
    }

    pub fn flags(&self) -> SymmetryFlags {
        self.flags
    }

    /// Start of the natural domain (x0 of the generating ODE, 0 otherwise).
    pub fn origin(&self) -> f64 {
        match &self.source {
            Source::Closed(_) => 0.0,
            Source::Generated { ode, .. } => ode.x0(),
        }
    }

    /// U(x); generated potentials use the dense output of their trajectory.
    pub fn eval(&self, x: f64) -> CMatrix {
        match &self.source {
            Source::Closed(f) => f(x),
            Source::Generated { ode, traj } => ode.potential(x, &traj.eval(x)),
        }
    }

    pub(crate) fn generating(&self) -> Option<&Arc<dyn GeneratingOde>> {
        match &self.source {
            Source::Closed(_) => None,
            Source::Generated { ode, .. } => Some(ode),
        }
    }

    /// ‖U(x+T) − U(x)‖ ≤ 1e−8 (relative to max(1, ‖U‖)) at probe points.
    pub fn check_period(&self) -> Result<()> {
        let t = self.period.ok_or(Error::PeriodMissing)?;
        for x in probe_points(self.origin(), t) {
            let u = self.eval(x);
            let defect = (&self.eval(x + t) - &u).norm() / u.norm().max(1.0);
            if defect > PERIOD_TOL {
                return Err(Error::Domain(format!("U(x+T) differs from U(x) by {defect:.3e} at x = {x}")));
            }
        }
        Ok(())
    }

    fn detect_flags(&self) -> SymmetryFlags {
        let span = self.period.unwrap_or(1.0);
        let pts = probe_points(self.origin(), span);
        let tol = 1e-9;
        let mut flags = SymmetryFlags { symmetric: true, hermitian: true, real: true };
        for x in pts {
            let u = self.eval(x);
            flags.symmetric &= u.is_symmetric(tol);
            flags.hermitian &= u.is_hermitian(tol);
            flags.real &= u.is_real(tol);
        }
        flags
    }
}

fn integrate_generating(ode: &dyn GeneratingOde, x0: f64, span: (f64, f64)) -> Result<Trajectory> {
    let (rt, at) = ode.tolerances();
    let mut setup = OdeSetup::new(ode.state_dim(), |x, y: &[C64], dy: &mut [C64]| ode.rhs(x, y, dy)).tolerances(rt, at);
    setup.integrate_two_sided(&ode.y0(), x0, span)
}
