//! Closed-form job-satisfaction probabilities for the two-stage tandem queue
//! (air interface, then compute) and the service capacity they imply.
//!
//! Both stages are M/M/1 under FCFS, so a tagged job's sojourn times are
//! independent exponentials with rates `mu1 - lambda` and `mu2 - lambda`.
//! Joint management needs their sum to fit inside `b_total - t_wireline`.
//! Disjoint management additionally caps each stage with its own budget.
//!
//! Time is in seconds and rates are in jobs per second throughout.

use alloc::vec::Vec;

use crate::error::{finite, non_negative, positive, Error, Result};
use crate::quadrature;

/// Relative rate gap below which the hypoexponential CDF switches to the
/// Erlang-2 limit.
pub const ERLANG_SWITCH: f64 = 1e-9;

/// Absolute tolerance of the numeric disjoint evaluation.
pub const DISJOINT_QUAD_TOL: f64 = 1e-9;

/// Relative tolerance of the capacity bisection.
pub const CAPACITY_REL_TOL: f64 = 1e-6;

/// Arrival and service rates of the tandem queue.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SystemRates {
    pub lambda: f64,
    pub mu1: f64,
    pub mu2: f64,
}

impl SystemRates {
    pub fn new(lambda: f64, mu1: f64, mu2: f64) -> Result<Self> {
        non_negative("lambda", lambda)?;
        positive("mu1", mu1)?;
        positive("mu2", mu2)?;
        Ok(Self { lambda, mu1, mu2 })
    }

    /// Largest arrival rate the pair of queues can carry.
    pub fn stability_limit(&self) -> f64 {
        self.mu1.min(self.mu2)
    }

    fn check(&self) -> Result<()> {
        Self::new(self.lambda, self.mu1, self.mu2)?;
        if self.lambda >= self.stability_limit() {
            return Err(Error::Unstable {
                lambda: self.lambda,
                limit: self.stability_limit(),
            });
        }
        Ok(())
    }
}

/// Latency budgets and the fixed wireline delay.
///
/// `b_comm` and `b_comp` are only consulted under [`ManagementPolicy::Disjoint`].
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BudgetSplit {
    pub b_total: f64,
    pub b_comm: f64,
    pub b_comp: f64,
    pub t_wireline: f64,
}

impl BudgetSplit {
    pub fn joint(b_total: f64, t_wireline: f64) -> Result<Self> {
        Self::new(b_total, 0.0, 0.0, t_wireline)
    }

    pub fn new(b_total: f64, b_comm: f64, b_comp: f64, t_wireline: f64) -> Result<Self> {
        positive("b_total", b_total)?;
        non_negative("b_comm", b_comm)?;
        non_negative("b_comp", b_comp)?;
        non_negative("t_wireline", t_wireline)?;
        Ok(Self {
            b_total,
            b_comm,
            b_comp,
            t_wireline,
        })
    }

    fn check(&self) -> Result<()> {
        Self::new(self.b_total, self.b_comm, self.b_comp, self.t_wireline).map(|_| ())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum ManagementPolicy {
    /// One end-to-end budget shared by communication and computing.
    Joint,
    /// Separate communication and computing budgets, each enforced.
    Disjoint,
}

/// A satisfaction probability, flagged when the budget left no room at all.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Satisfaction {
    pub probability: f64,
    /// Set when the relevant budget is consumed by the wireline delay alone,
    /// which forces the probability to zero.
    pub budget_exhausted: bool,
}

impl Satisfaction {
    fn exhausted() -> Self {
        Self {
            probability: 0.0,
            budget_exhausted: true,
        }
    }

    fn of(probability: f64) -> Self {
        Self {
            probability: probability.clamp(0.0, 1.0),
            budget_exhausted: false,
        }
    }
}

/// CDF of an exponential sojourn time with the given rate.
pub fn exp_sojourn_cdf(rate: f64, t: f64) -> Result<f64> {
    positive("rate", rate)?;
    finite("t", t)?;
    if t <= 0.0 {
        return Ok(0.0);
    }
    Ok(-libm::expm1(-rate * t))
}

/// CDF of the sum of two independent exponentials with rates `a` and `b`.
pub fn hypoexp_sum_cdf(a: f64, b: f64, t: f64) -> Result<f64> {
    positive("a", a)?;
    positive("b", b)?;
    finite("t", t)?;
    if t <= 0.0 {
        return Ok(0.0);
    }
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    let gap = hi - lo;
    let survival = if gap / hi < ERLANG_SWITCH {
        libm::exp(-lo * t) * (1.0 + lo * t)
    } else {
        // (hi e^{-lo t} - lo e^{-hi t}) / (hi - lo), rearranged so that the
        // difference of exponentials goes through expm1 and never cancels.
        let spread = -libm::expm1(-gap * t) / gap;
        libm::exp(-lo * t) * (1.0 + lo * spread)
    };
    Ok((1.0 - survival).clamp(0.0, 1.0))
}

/// Probability that a job meets `b_total` under joint latency management.
pub fn joint_satisfaction(rates: &SystemRates, budget: &BudgetSplit) -> Result<Satisfaction> {
    rates.check()?;
    budget.check()?;
    let remaining = budget.b_total - budget.t_wireline;
    if remaining <= 0.0 {
        return Ok(Satisfaction::exhausted());
    }
    let p = hypoexp_sum_cdf(rates.mu1 - rates.lambda, rates.mu2 - rates.lambda, remaining)?;
    Ok(Satisfaction::of(p))
}

/// Probability that a job meets every budget under disjoint latency management.
pub fn disjoint_satisfaction(rates: &SystemRates, budget: &BudgetSplit) -> Result<Satisfaction> {
    rates.check()?;
    budget.check()?;
    let air_budget = budget.b_comm - budget.t_wireline;
    let total_budget = budget.b_total - budget.t_wireline;
    if air_budget <= 0.0 || total_budget <= 0.0 {
        return Ok(Satisfaction::exhausted());
    }
    let a = rates.mu1 - rates.lambda;
    let b = rates.mu2 - rates.lambda;
    if budget.b_comm + budget.b_comp <= budget.b_total {
        let p = exp_sojourn_cdf(a, air_budget)? * exp_sojourn_cdf(b, budget.b_comp)?;
        return Ok(Satisfaction::of(p));
    }
    Ok(Satisfaction::of(disjoint_region_probability(
        a,
        b,
        air_budget,
        budget.b_comp,
        total_budget,
    )))
}

/// P(T1 <= air, T2 <= comp, T1 + T2 <= total) for independent exponentials,
/// integrating the joint density over the region. The inner integral over
/// `t2` is the exponential CDF; the outer one is numeric, split at the kink
/// where the diagonal constraint starts to bind.
fn disjoint_region_probability(a: f64, b: f64, air: f64, comp: f64, total: f64) -> f64 {
    if comp <= 0.0 {
        return 0.0;
    }
    let upper = air.min(total);
    let inner = |t1: f64| {
        let cap = comp.min(total - t1);
        a * libm::exp(-a * t1) * -libm::expm1(-b * cap)
    };
    let kink = total - comp;
    let tol = 0.1 * DISJOINT_QUAD_TOL;
    if kink > 0.0 && kink < upper {
        quadrature::integrate(inner, 0.0, kink, 0.5 * tol) + quadrature::integrate(inner, kink, upper, 0.5 * tol)
    } else {
        quadrature::integrate(inner, 0.0, upper, tol)
    }
}

/// Satisfaction probability for the chosen policy.
pub fn satisfaction(policy: ManagementPolicy, rates: &SystemRates, budget: &BudgetSplit) -> Result<Satisfaction> {
    match policy {
        ManagementPolicy::Joint => joint_satisfaction(rates, budget),
        ManagementPolicy::Disjoint => disjoint_satisfaction(rates, budget),
    }
}

/// Satisfaction on `[0, min(mu1, mu2)]`, with the stability boundary itself
/// mapped to zero.
fn satisfaction_to_boundary(policy: ManagementPolicy, lambda: f64, mu1: f64, mu2: f64, budget: &BudgetSplit) -> Result<f64> {
    if lambda >= mu1.min(mu2) {
        return Ok(0.0);
    }
    Ok(satisfaction(policy, &SystemRates::new(lambda, mu1, mu2)?, budget)?.probability)
}

/// Largest arrival rate whose satisfaction probability stays at or above
/// `alpha`, found by bisection on `[0, min(mu1, mu2))`.
///
/// Returns 0 when even an idle system misses `alpha`.
pub fn service_capacity(policy: ManagementPolicy, mu1: f64, mu2: f64, budget: &BudgetSplit, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidAlpha(alpha));
    }
    positive("mu1", mu1)?;
    positive("mu2", mu2)?;
    budget.check()?;

    let mut lo = 0.0;
    let mut hi = mu1.min(mu2);
    if satisfaction_to_boundary(policy, lo, mu1, mu2, budget)? < alpha {
        return Ok(0.0);
    }
    let floor = hi * f64::EPSILON * 16.0;
    while hi - lo > (CAPACITY_REL_TOL * lo).max(floor) {
        let mid = 0.5 * (lo + hi);
        if satisfaction_to_boundary(policy, mid, mu1, mu2, budget)? >= alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// A grid point left out of a curve.
#[derive(Debug, Clone, PartialEq)]
pub struct SkippedPoint {
    pub lambda: f64,
    pub reason: Error,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SatisfactionCurve {
    pub points: Vec<(f64, f64)>,
    pub skipped: Vec<SkippedPoint>,
}

/// Evaluates the policy's satisfaction at every grid point. Points outside
/// the stable region are recorded in `skipped` rather than failing the curve.
pub fn satisfaction_curve(policy: ManagementPolicy, mu1: f64, mu2: f64, budget: &BudgetSplit, grid: &[f64]) -> SatisfactionCurve {
    let mut curve = SatisfactionCurve::default();
    for &lambda in grid {
        let point = SystemRates::new(lambda, mu1, mu2).and_then(|r| satisfaction(policy, &r, budget));
        match point {
            Ok(s) => curve.points.push((lambda, s.probability)),
            Err(reason) => curve.skipped.push(SkippedPoint { lambda, reason }),
        }
    }
    curve
}
