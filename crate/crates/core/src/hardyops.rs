//! The weighted functionals forming each side of every inequality: forward
//! and cumulative Hardy integrals, dual tail integrals, power-weighted Haar
//! norms, target-weighted right-hand sides, and the logarithmic pair.
//!
//! Sign convention: forward (lower-interval) inequalities carry x^{-alpha},
//! dual (upper-interval) ones x^{+alpha}; nothing here negates alpha
//! implicitly. Divergent functionals are reported as errors, never truncated.

use crate::error::{Error, Result};
use crate::funcspace::{Domain, DomainKind, FuncExpr, FuncKind};
use crate::quad::{integrate, Integrand, Measure, QuadOpts};
use crate::special::trunc_beta;

/// Which reading of the logarithmic weight to use. The corrected weight
/// log(e*ell/x) makes the p = 1 case an exact identity; the as-printed
/// log(ell/x) is kept selectable for comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LogVariant {
    Corrected,
    AsPrinted,
}

/// Optimal target weights inserted on the dominating side.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TargetWeight {
    One,
    /// 1 - x/ell
    OneMinusLinear,
    /// 1 - (x/ell)^kappa
    OneMinusPower { kappa: f64 },
    /// 1 - (ell/x)^kappa
    DualOneMinusPower { kappa: f64 },
    /// T(x) = alpha * beta_{x/ell}(alpha - p + 1, p)
    TruncBetaT { p: f64, alpha: f64 },
    /// T0(x) = alpha * beta_{ell/x}(alpha, p)
    TruncBetaT0 { p: f64, alpha: f64 },
    /// [log weight]^exponent (forward weight on (0, ell), dual on (ell, inf))
    LogBennett { variant: LogVariant, exponent: f64 },
}

impl TargetWeight {
    /// Weight value at x for a domain with endpoint `ell` on side `side`.
    pub fn value(&self, x: f64, ell: f64, side: Side) -> f64 {
        match self {
            TargetWeight::One => 1.0,
            TargetWeight::OneMinusLinear => {
                if ell.is_infinite() {
                    1.0
                } else {
                    1.0 - x / ell
                }
            }
            TargetWeight::OneMinusPower { kappa } => {
                if ell.is_infinite() {
                    1.0
                } else {
                    1.0 - (x / ell).powf(*kappa)
                }
            }
            TargetWeight::DualOneMinusPower { kappa } => {
                if ell == 0.0 {
                    1.0
                } else {
                    1.0 - (ell / x).powf(*kappa)
                }
            }
            TargetWeight::TruncBetaT { p, alpha } => {
                let a0 = if ell.is_infinite() { 0.0 } else { (x / ell).min(1.0) };
                alpha * trunc_beta(a0, *alpha - *p + 1.0, *p).unwrap_or(f64::NAN)
            }
            TargetWeight::TruncBetaT0 { p, alpha } => {
                let a0 = if ell == 0.0 { 0.0 } else { (ell / x).min(1.0) };
                alpha * trunc_beta(a0, *alpha, *p).unwrap_or(f64::NAN)
            }
            TargetWeight::LogBennett { variant, exponent } => {
                let w = log_weight(*variant, ell, x, side);
                if w <= 0.0 && *exponent < 0.0 {
                    return f64::NAN;
                }
                w.max(0.0).powf(*exponent)
            }
        }
    }

    fn validate(&self, ell: f64, side: Side) -> Result<()> {
        match (self, side) {
            (TargetWeight::TruncBetaT { p, alpha }, _) => {
                if !(*p > 0.0) || !(*alpha - *p + 1.0 > 0.0) {
                    return Err(Error::Parameter(format!(
                        "trunc-beta target needs p > 0 and alpha - p + 1 > 0, got p = {p}, alpha = {alpha}"
                    )));
                }
            }
            (TargetWeight::TruncBetaT0 { p, alpha }, _) => {
                if !(*p > 0.0) || !(*alpha > 0.0) {
                    return Err(Error::Parameter(format!(
                        "dual trunc-beta target needs p > 0 and alpha > 0, got p = {p}, alpha = {alpha}"
                    )));
                }
            }
            (TargetWeight::OneMinusLinear | TargetWeight::OneMinusPower { .. }, Side::Upper) => {
                return Err(Error::Parameter("forward target weight used on an upper interval".into()));
            }
            (TargetWeight::DualOneMinusPower { .. }, Side::Lower) => {
                return Err(Error::Parameter("dual target weight used on a lower interval".into()));
            }
            (TargetWeight::LogBennett { .. }, _) if !ell.is_finite() || ell <= 0.0 => {
                return Err(Error::Parameter("log weights require 0 < ell < inf".into()));
            }
            _ => {}
        }
        Ok(())
    }
}

/// Which side of the real line the domain sits on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Lower,
    Upper,
}

fn side_of(dom: &Domain) -> Side {
    match dom.kind {
        DomainKind::Lower { .. } => Side::Lower,
        DomainKind::Upper { .. } => Side::Upper,
    }
}

fn log_weight(variant: LogVariant, ell: f64, x: f64, side: Side) -> f64 {
    match (side, variant) {
        (Side::Lower, LogVariant::Corrected) => 1.0 + (ell / x).ln(),
        (Side::Lower, LogVariant::AsPrinted) => (ell / x).ln(),
        (Side::Upper, LogVariant::Corrected) => 1.0 + (x / ell).ln(),
        (Side::Upper, LogVariant::AsPrinted) => (x / ell).ln(),
    }
}


/// b1^e1 * b2^e2 for positive bases, evaluated in log space so that an
/// underflowing factor times an overflowing one never produces 0 * inf.
#[inline]
fn pow2(b1: f64, e1: f64, b2: f64, e2: f64) -> f64 {
    (e1 * b1.ln() + e2 * b2.ln()).exp()
}

/// One functional template with its exponent bindings.
#[derive(Clone, Copy, Debug)]
pub enum FunctionalKind {
    /// ∫ ((1/x)∫_0^x f)^p x^a dμ over the domain
    LhsAvg { p: f64, weight_a: f64 },
    /// ∫_0^ell (∫_0^x f)^p x^{-alpha} dx/x
    LhsCum { p: f64, alpha: f64 },
    /// ∫_ell^inf (∫_x^inf f)^p x^{+alpha} dx/x
    LhsDual { p: f64, alpha: f64 },
    /// ∫ (x f)^p x^{∓alpha} target dx/x (sign from the domain side)
    RhsWeighted { p: f64, alpha: f64, target: TargetWeight },
    /// ∫ f^p x^a target dx
    RhsLebesgue { p: f64, weight_a: f64, target: TargetWeight },
    /// (alpha^{p-1} (∫ f)^p, alpha^p ∫ w^{alpha p - 1} (inner)^p dx/x)
    BennettLhsPair { p: f64, alpha: f64, variant: LogVariant },
    /// ∫ x^p w^{(1+alpha)p - 1} f^p dx/x
    BennettRhs { p: f64, alpha: f64, variant: LogVariant },
}

/// Evaluated functional value with its quadrature error estimate; `pair`
/// carries the two terms of the logarithmic left-hand side.
#[derive(Clone, Copy, Debug)]
pub struct Functional {
    pub value: f64,
    pub pair: Option<(f64, f64)>,
    pub quad_error: f64,
    pub evaluations: u64,
}

impl Functional {
    fn scalar(value: f64, quad_error: f64, evaluations: u64) -> Self {
        Functional { value, pair: None, quad_error, evaluations }
    }
}

#[allow(dead_code)]
fn has_closed_primitive(kind: &FuncKind) -> bool {
    match kind {
        FuncKind::LogPower { .. } => false,
        FuncKind::Sum(parts) => parts.iter().all(|p| has_closed_primitive(&p.kind)),
        FuncKind::Windowed { inner, .. } => has_closed_primitive(&inner.kind),
        _ => true,
    }
}

/// x ↦ (1/x) ∫_0^x f, with the closed-form cumulative when available.
pub fn hardy_avg<'f>(f: &'f FuncExpr) -> impl Fn(f64) -> f64 + 'f {
    move |x: f64| {
        if !x.is_finite() {
            return 0.0;
        }
        match f.cumulative(x) {
            Ok(c) => c / x,
            Err(_) => f64::NAN,
        }
    }
}

/// x ↦ ∫_x^inf f.
pub fn dual_hardy<'f>(f: &'f FuncExpr) -> impl Fn(f64) -> f64 + 'f {
    move |x: f64| {
        if !x.is_finite() {
            return 0.0;
        }
        f.tail(x).unwrap_or(f64::NAN)
    }
}

fn quad_opts() -> QuadOpts {
    QuadOpts::default()
}

fn check_exponent(cond: bool, what: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Divergence(what.to_string()))
    }
}

// Effective exponent of F(x) = ∫_0^x f near 0. `inf` encodes "vanishes
// identically near 0", in which case no constraint applies for p > 0.
fn cum_exp_at_zero(f: &FuncExpr) -> f64 {
    let e0 = f.exponent_at_zero();
    if e0.is_infinite() {
        f64::INFINITY
    } else {
        e0 + 1.0
    }
}

fn tail_exp_at_inf(f: &FuncExpr) -> f64 {
    let ei = f.exponent_at_inf();
    if ei == f64::NEG_INFINITY {
        f64::NEG_INFINITY
    } else {
        ei + 1.0
    }
}

// F(x) ~ x^0 (a constant) as x -> inf whenever the tail of f is integrable.
fn cum_exp_at_inf(f: &FuncExpr) -> f64 {
    let ei = f.exponent_at_inf();
    if ei <= -1.0 {
        0.0
    } else {
        ei + 1.0
    }
}

/// Evaluate one functional of `f` over `dom`.
pub fn weighted_functional(kind: &FunctionalKind, f: &FuncExpr, dom: &Domain) -> Result<Functional> {
    let (lo, hi) = dom.bounds();
    let ell = dom.ell();
    let side = side_of(dom);
    let bps = f.breakpoints();
    match *kind {
        FunctionalKind::LhsAvg { p, weight_a } => {
            if p < 0.0 && !f.positive {
                return Err(Error::Parameter("p < 0 requires a strictly positive function".into()));
            }
            let e0 = f.exponent_at_zero();
            let haar = if dom.measure == Measure::Haar { -1.0 } else { 0.0 };
            if e0.is_finite() {
                check_exponent(p * e0 + weight_a + haar > -1.0, "averaging functional diverges near 0")?;
            } else if p < 0.0 {
                return Err(Error::Divergence("averaging functional of a vanishing function with p < 0".into()));
            }
            if hi.is_infinite() {
                let ecu = cum_exp_at_inf(f);
                check_exponent(
                    p * (ecu - 1.0) + weight_a + haar < -1.0,
                    "averaging functional diverges at infinity",
                )?;
            }
            let avg = hardy_avg(f);
            let g = move |x: f64| {
                if !x.is_finite() {
                    return 0.0;
                }
                let v = avg(x);
                if v == 0.0 {
                    return 0.0;
                }
                pow2(v, p, x, weight_a)
            };
            let spec = Integrand {
                f: &g,
                breakpoints: &bps,
                gamma_lo: if lo == 0.0 && e0.is_finite() { Some(p * e0 + weight_a + haar) } else { None },
                gamma_hi: None,
            };
            let r = integrate(&spec, lo, hi, dom.measure, &quad_opts())?;
            Ok(Functional::scalar(r.value, r.abs_error_estimate, r.evaluations))
        }
        FunctionalKind::LhsCum { p, alpha } => {
            if !matches!(dom.kind, DomainKind::Lower { .. }) {
                return Err(Error::Parameter("cumulative functional requires a lower interval (0, ell)".into()));
            }
            if p < 0.0 && !f.positive {
                return Err(Error::Parameter("p < 0 requires a strictly positive function".into()));
            }
            let ec0 = cum_exp_at_zero(f);
            if ec0.is_finite() {
                check_exponent(p * ec0 - alpha > 0.0, "cumulative functional diverges near 0")?;
            } else if p < 0.0 {
                return Err(Error::Divergence("cumulative functional of a vanishing function with p < 0".into()));
            }
            if hi.is_infinite() {
                let ecu = cum_exp_at_inf(f);
                check_exponent(p * ecu - alpha < 0.0, "cumulative functional diverges at infinity")?;
            }
            let g = move |x: f64| {
                if !x.is_finite() {
                    return 0.0;
                }
                let c = f.cumulative(x).unwrap_or(f64::NAN);
                if c == 0.0 {
                    return 0.0;
                }
                pow2(c, p, x, -alpha)
            };
            let spec = Integrand {
                f: &g,
                breakpoints: &bps,
                gamma_lo: if ec0.is_finite() { Some(p * ec0 - alpha - 1.0) } else { None },
                gamma_hi: None,
            };
            let r = integrate(&spec, lo, hi, Measure::Haar, &quad_opts())?;
            Ok(Functional::scalar(r.value, r.abs_error_estimate, r.evaluations))
        }
        FunctionalKind::LhsDual { p, alpha } => {
            if !matches!(dom.kind, DomainKind::Upper { .. }) {
                return Err(Error::Parameter("dual functional requires an upper interval (ell, inf)".into()));
            }
            if p < 0.0 && !f.positive {
                return Err(Error::Parameter("p < 0 requires a strictly positive function".into()));
            }
            let ei = f.exponent_at_inf();
            if ei >= -1.0 {
                return Err(Error::Divergence("the tail integral of f diverges at infinity".into()));
            }
            let et = tail_exp_at_inf(f);
            if et.is_finite() {
                check_exponent(p * et + alpha < 0.0, "dual functional diverges at infinity")?;
            } else if p < 0.0 {
                return Err(Error::Divergence("dual functional of a compactly supported f with p < 0".into()));
            }
            if lo == 0.0 {
                let e0 = f.exponent_at_zero();
                let t0_exp = if e0 > -1.0 || e0.is_infinite() { 0.0 } else { e0 + 1.0 };
                check_exponent(p * t0_exp + alpha > 0.0, "dual functional diverges near 0")?;
            }
            let g = move |x: f64| {
                if !x.is_finite() {
                    return 0.0;
                }
                let t = f.tail(x).unwrap_or(f64::NAN);
                if t == 0.0 {
                    return 0.0;
                }
                pow2(t, p, x, alpha)
            };
            let spec = Integrand { f: &g, breakpoints: &bps, gamma_lo: None, gamma_hi: None };
            let r = integrate(&spec, lo, hi, Measure::Haar, &quad_opts())?;
            Ok(Functional::scalar(r.value, r.abs_error_estimate, r.evaluations))
        }
        FunctionalKind::RhsWeighted { p, alpha, target } => {
            if p < 0.0 && !f.positive {
                return Err(Error::Parameter("p < 0 requires a strictly positive function".into()));
            }
            target.validate(ell, side)?;
            let s = match side {
                Side::Lower => -1.0,
                Side::Upper => 1.0,
            };
            let e0 = f.exponent_at_zero();
            if lo == 0.0 && e0.is_finite() {
                check_exponent(p * (1.0 + e0) + s * alpha > 0.0, "weighted right-hand side diverges near 0")?;
            }
            if hi.is_infinite() {
                let ei = f.exponent_at_inf();
                if ei.is_finite() {
                    check_exponent(p * (1.0 + ei) + s * alpha < 0.0, "weighted right-hand side diverges at infinity")?;
                }
            }
            let g = move |x: f64| {
                if !x.is_finite() {
                    return 0.0;
                }
                let lf = f.ln_eval_or_nan(x);
                if lf == f64::NEG_INFINITY {
                    return 0.0;
                }
                (p * lf + (p + s * alpha) * x.ln()).exp() * target.value(x, ell, side)
            };
            let spec = Integrand {
                f: &g,
                breakpoints: &bps,
                gamma_lo: if lo == 0.0 && e0.is_finite() { Some(p * (1.0 + e0) + s * alpha - 1.0) } else { None },
                gamma_hi: None,
            };
            let r = integrate(&spec, lo, hi, Measure::Haar, &quad_opts())?;
            Ok(Functional::scalar(r.value, r.abs_error_estimate, r.evaluations))
        }
        FunctionalKind::RhsLebesgue { p, weight_a, target } => {
            if p < 0.0 && !f.positive {
                return Err(Error::Parameter("p < 0 requires a strictly positive function".into()));
            }
            target.validate(ell, side)?;
            let e0 = f.exponent_at_zero();
            if lo == 0.0 && e0.is_finite() {
                check_exponent(p * e0 + weight_a > -1.0, "Lebesgue right-hand side diverges near 0")?;
            }
            if hi.is_infinite() {
                let ei = f.exponent_at_inf();
                if ei.is_finite() {
                    check_exponent(p * ei + weight_a < -1.0, "Lebesgue right-hand side diverges at infinity")?;
                }
            }
            let g = move |x: f64| {
                if !x.is_finite() {
                    return 0.0;
                }
                let lf = f.ln_eval_or_nan(x);
                if lf == f64::NEG_INFINITY {
                    return 0.0;
                }
                (p * lf + weight_a * x.ln()).exp() * target.value(x, ell, side)
            };
            let spec = Integrand {
                f: &g,
                breakpoints: &bps,
                gamma_lo: if lo == 0.0 && e0.is_finite() { Some(p * e0 + weight_a) } else { None },
                gamma_hi: None,
            };
            let r = integrate(&spec, lo, hi, Measure::Lebesgue, &quad_opts())?;
            Ok(Functional::scalar(r.value, r.abs_error_estimate, r.evaluations))
        }
        FunctionalKind::BennettLhsPair { p, alpha, variant } => {
            if !(alpha > 0.0) || !(p > 0.0) {
                return Err(Error::Parameter(format!(
                    "logarithmic pair requires p > 0 and alpha > 0, got p = {p}, alpha = {alpha}"
                )));
            }
            if !ell.is_finite() || ell <= 0.0 {
                return Err(Error::Parameter("logarithmic pair requires 0 < ell < inf".into()));
            }
            let total = f.integral_between(lo, hi)?;
            let term1 = alpha.powf(p - 1.0) * total.powf(p);
            let we = alpha * p - 1.0;
            let g: Box<dyn Fn(f64) -> f64> = match side {
                Side::Lower => Box::new(move |x: f64| {
                    if !x.is_finite() {
                        return 0.0;
                    }
                    let c = f.cumulative(x).unwrap_or(f64::NAN);
                    if c == 0.0 {
                        return 0.0;
                    }
                    let w = log_weight(variant, ell, x, Side::Lower);
                    if w <= 0.0 {
                        return if we >= 0.0 { 0.0 } else { f64::NAN };
                    }
                    pow2(c, p, w, we)
                }),
                Side::Upper => Box::new(move |x: f64| {
                    if !x.is_finite() {
                        return 0.0;
                    }
                    let t = f.tail(x).unwrap_or(f64::NAN);
                    if t == 0.0 {
                        return 0.0;
                    }
                    let w = log_weight(variant, ell, x, Side::Upper);
                    if w <= 0.0 {
                        return if we >= 0.0 { 0.0 } else { f64::NAN };
                    }
                    pow2(t, p, w, we)
                }),
            };
            let spec = Integrand { f: &g, breakpoints: &bps, gamma_lo: None, gamma_hi: None };
            let r = integrate(&spec, lo, hi, Measure::Haar, &quad_opts())?;
            let term2 = alpha.powf(p) * r.value;
            Ok(Functional {
                value: term1 + term2,
                pair: Some((term1, term2)),
                quad_error: alpha.powf(p) * r.abs_error_estimate,
                evaluations: r.evaluations,
            })
        }
        FunctionalKind::BennettRhs { p, alpha, variant } => {
            if !(alpha > 0.0) || !(p > 0.0) {
                return Err(Error::Parameter(format!(
                    "logarithmic right-hand side requires p > 0 and alpha > 0, got p = {p}, alpha = {alpha}"
                )));
            }
            if !ell.is_finite() || ell <= 0.0 {
                return Err(Error::Parameter("logarithmic right-hand side requires 0 < ell < inf".into()));
            }
            let we = (1.0 + alpha) * p - 1.0;
            let g = move |x: f64| {
                if !x.is_finite() {
                    return 0.0;
                }
                let lf = f.ln_eval_or_nan(x);
                if lf == f64::NEG_INFINITY {
                    return 0.0;
                }
                let w = log_weight(variant, ell, x, side);
                if w <= 0.0 {
                    return if we >= 0.0 { 0.0 } else { f64::NAN };
                }
                (p * lf + p * x.ln() + we * w.ln()).exp()
            };
            let spec = Integrand { f: &g, breakpoints: &bps, gamma_lo: None, gamma_hi: None };
            let r = integrate(&spec, lo, hi, Measure::Haar, &quad_opts())?;
            Ok(Functional::scalar(r.value, r.abs_error_estimate, r.evaluations))
        }
    }
}

/// Left side (∫_0^b f)^p of the monotone-function lemma.
pub fn lemma_lhs(f: &FuncExpr, p: f64, b: f64) -> Result<f64> {
    Ok(f.integral_between(0.0, b)?.powf(p))
}

/// ∫_0^b y^{p-1} f(y)^p dy — the non-increasing branch of the lemma.
pub fn lemma_rhs_lower(f: &FuncExpr, p: f64, b: f64) -> Result<Functional> {
    let bps = f.breakpoints();
    let g = move |y: f64| {
        let lf = f.ln_eval_or_nan(y);
        if lf == f64::NEG_INFINITY {
            return 0.0;
        }
        ((p - 1.0) * y.ln() + p * lf).exp()
    };
    let spec = Integrand {
        f: &g,
        breakpoints: &bps,
        gamma_lo: if p < 1.0 { Some(p - 1.0) } else { None },
        gamma_hi: None,
    };
    let r = integrate(&spec, 0.0, b, Measure::Lebesgue, &quad_opts())?;
    Ok(Functional::scalar(r.value, r.abs_error_estimate, r.evaluations))
}

/// ∫_0^b (b-y)^{p-1} f(y)^p dy — the non-decreasing branch, integrated in the
/// shifted variable w = b - y so the singular factor is computed from the
/// exact distance to its endpoint.
pub fn lemma_rhs_upper(f: &FuncExpr, p: f64, b: f64) -> Result<Functional> {
    let bps: Vec<f64> = f.breakpoints().iter().map(|&c| b - c).filter(|w| *w > 0.0 && *w < b).collect();
    let g = move |w: f64| {
        let lf = f.ln_eval_or_nan(b - w);
        if lf == f64::NEG_INFINITY {
            return 0.0;
        }
        ((p - 1.0) * w.ln() + p * lf).exp()
    };
    let spec = Integrand {
        f: &g,
        breakpoints: &bps,
        gamma_lo: if p < 1.0 { Some(p - 1.0) } else { None },
        gamma_hi: None,
    };
    let r = integrate(&spec, 0.0, b, Measure::Lebesgue, &quad_opts())?;
    Ok(Functional::scalar(r.value, r.abs_error_estimate, r.evaluations))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::{Domain, FuncExpr};
    use crate::quad::riemann_oracle;

    fn lower(ell: f64) -> Domain {
        Domain::lower(ell, Measure::Haar).unwrap()
    }

    fn upper(ell: f64) -> Domain {
        Domain::upper(ell, Measure::Haar).unwrap()
    }

    fn ind(lo: f64, hi: f64, amp: f64) -> FuncExpr {
        FuncExpr::indicator(lo, hi, amp).unwrap()
    }

    #[test]
    fn avg_of_power_on_unit_haar() {
        // (1/x ∫_0^x y dy)^2 = x^2/4; ∫_0^1 x^2/4 dx/x = 1/8
        let f = FuncExpr::power(1.0, 1.0).unwrap();
        let r = weighted_functional(&FunctionalKind::LhsAvg { p: 2.0, weight_a: 0.0 }, &f, &lower(1.0)).unwrap();
        assert!((r.value - 0.125).abs() < 1e-10, "got {}", r.value);
    }

    #[test]
    fn cum_of_indicator_closed_form() {
        // ∫_0^1 (∫_0^x χ_(0,1/2))^2 x^{-1} dx/x = 0.5 + 0.25 (1/0.5 - 1) = 0.75
        let f = ind(0.0, 0.5, 1.0);
        let r = weighted_functional(&FunctionalKind::LhsCum { p: 2.0, alpha: 1.0 }, &f, &lower(1.0)).unwrap();
        assert!((r.value - 0.75).abs() < 1e-10, "got {}", r.value);
    }

    #[test]
    fn dual_of_indicator() {
        // ∫_0^1 (1-x)^2 dx = 1/3 with alpha = 1, ell = 0
        let f = ind(0.0, 1.0, 1.0);
        let r = weighted_functional(&FunctionalKind::LhsDual { p: 2.0, alpha: 1.0 }, &f, &upper(0.0)).unwrap();
        assert!((r.value - 1.0 / 3.0).abs() < 1e-10, "got {}", r.value);
    }

    #[test]
    fn rhs_weighted_with_power_target() {
        // alpha = p makes (xf)^p x^{-alpha} collapse to f^p, so for f = x,
        // p = 2 this is ∫_0^1 x (1-x) dx = 1/6
        let f = FuncExpr::power(1.0, 1.0).unwrap();
        let kind =
            FunctionalKind::RhsWeighted { p: 2.0, alpha: 2.0, target: TargetWeight::OneMinusPower { kappa: 1.0 } };
        let r = weighted_functional(&kind, &f, &lower(1.0)).unwrap();
        assert!((r.value - 1.0 / 6.0).abs() < 1e-10, "got {}", r.value);
    }

    #[test]
    fn hardy_avg_integrand_examples() {
        let f = ind(0.0, 0.5, 1.0);
        let avg = hardy_avg(&f);
        assert!((avg(1e-9) - 1.0).abs() < 1e-9); // averaging an indicator near 0
        assert!((avg(1.0) - 0.5).abs() < 1e-12); // min(x, c)/x
        let g = FuncExpr::power(1.0, 2.0).unwrap();
        let avg = hardy_avg(&g);
        assert!((avg(2.0) - 4.0 / 3.0).abs() < 1e-12); // x^a/(a+1) at x = 2, a = 2
    }

    #[test]
    fn dual_hardy_integrand_examples() {
        let f = FuncExpr::power(1.0, -2.0).unwrap();
        let t = dual_hardy(&f);
        assert!((t(2.0) - 0.5).abs() < 1e-12);
        let g = ind(0.0, 1.0, 1.0);
        let t = dual_hardy(&g);
        assert!((t(0.25) - 0.75).abs() < 1e-12);
        assert_eq!(t(2.0), 0.0);
    }

    #[test]
    fn homogeneity_in_f() {
        // functional(λ f) = λ^p functional(f) at λ = 3
        for p in [0.5, 2.0] {
            let f = ind(0.0, 0.5, 1.0);
            let g = ind(0.0, 0.5, 3.0);
            let kind = FunctionalKind::LhsCum { p, alpha: 0.25 };
            let a = weighted_functional(&kind, &f, &lower(1.0)).unwrap().value;
            let b = weighted_functional(&kind, &g, &lower(1.0)).unwrap().value;
            assert!((b - 3f64.powf(p) * a).abs() <= 1e-8 * b.abs(), "p = {p}");
        }
    }

    #[test]
    fn monotone_in_f() {
        // f <= g pointwise implies functional(f) <= functional(g)
        let f = ind(0.0, 0.5, 1.0);
        let g = ind(0.0, 0.75, 1.0);
        for kind in [
            FunctionalKind::LhsCum { p: 2.0, alpha: 1.0 },
            FunctionalKind::RhsWeighted { p: 2.0, alpha: 1.0, target: TargetWeight::OneMinusPower { kappa: 1.0 } },
        ] {
            let a = weighted_functional(&kind, &f, &lower(1.0)).unwrap().value;
            let b = weighted_functional(&kind, &g, &lower(1.0)).unwrap().value;
            assert!(a <= b + 1e-12);
        }
    }

    #[test]
    fn target_sandwich_strict_for_finite_ell() {
        let f = ind(0.0, 0.8, 1.0);
        let with_target = weighted_functional(
            &FunctionalKind::RhsWeighted { p: 2.0, alpha: 1.0, target: TargetWeight::OneMinusPower { kappa: 0.5 } },
            &f,
            &lower(1.0),
        )
        .unwrap()
        .value;
        let plain = weighted_functional(
            &FunctionalKind::RhsWeighted { p: 2.0, alpha: 1.0, target: TargetWeight::One },
            &f,
            &lower(1.0),
        )
        .unwrap()
        .value;
        assert!(with_target < plain);
    }

    #[test]
    fn fubini_interchange_identity() {
        // (p/alpha) ∫ (yf)^p y^{-alpha} (1-(y/ell)^alpha) dy/y
        //   = p ∫ (∫_0^x y^{p-1} f^p dy) x^{-alpha} dx/x
        let f = ind(0.0, 0.5, 1.0);
        let (p, alpha) = (2.0, 1.0);
        let left = (p / alpha)
            * weighted_functional(
                &FunctionalKind::RhsWeighted { p, alpha, target: TargetWeight::OneMinusPower { kappa: alpha } },
                &f,
                &lower(1.0),
            )
            .unwrap()
            .value;
        let inner = |x: f64| {
            let hi = x.min(0.5);
            if hi <= 0.0 {
                0.0
            } else {
                hi.powf(p) / p
            }
        };
        let g = |x: f64| {
            if !x.is_finite() {
                return 0.0;
            }
            inner(x) * x.powf(-alpha)
        };
        let bps = [0.5];
        let right = p * integrate(&Integrand::with_breakpoints(&g, &bps), 0.0, 1.0, Measure::Haar, &QuadOpts::default())
            .unwrap()
            .value;
        assert!((left - right).abs() <= 1e-9 * left.abs(), "{left} vs {right}");
    }

    #[test]
    fn divergent_functionals_error() {
        // averaging an indicator against dx/x diverges near 0
        let f = ind(0.0, 0.5, 1.0);
        let r = weighted_functional(&FunctionalKind::LhsAvg { p: 2.0, weight_a: 0.0 }, &f, &lower(1.0));
        assert!(matches!(r, Err(Error::Divergence(_))));
        // cumulative against x^{-alpha} with alpha too large
        let r = weighted_functional(&FunctionalKind::LhsCum { p: 1.0, alpha: 3.0 }, &f, &lower(1.0));
        assert!(matches!(r, Err(Error::Divergence(_))));
    }

    #[test]
    fn p_negative_requires_positivity() {
        let f = ind(0.0, 0.5, 1.0);
        let r = weighted_functional(&FunctionalKind::LhsCum { p: -1.0, alpha: -3.0 }, &f, &lower(1.0));
        assert!(matches!(r, Err(Error::Parameter(_))));
    }

    #[test]
    fn negative_p_regime_value() {
        // f = 1: (∫_0^x)^{-1} x^{3} dx/x integrated over (0,1) is 1/2;
        // right side 3/10 with target, constant (p/alpha)^p = 3
        let f = FuncExpr::new(FuncKind::Power { coeff: 1.0, exponent: 0.0 }, crate::funcspace::Cone::NonIncreasing, true)
            .unwrap();
        let lhs = weighted_functional(&FunctionalKind::LhsCum { p: -1.0, alpha: -3.0 }, &f, &lower(1.0)).unwrap();
        assert!((lhs.value - 0.5).abs() < 1e-9, "got {}", lhs.value);
        let rhs = weighted_functional(
            &FunctionalKind::RhsWeighted { p: -1.0, alpha: -3.0, target: TargetWeight::OneMinusPower { kappa: 3.0 } },
            &f,
            &lower(1.0),
        )
        .unwrap();
        assert!((rhs.value - 0.3).abs() < 1e-9, "got {}", rhs.value);
    }

    #[test]
    fn bennett_pair_terms_at_p1() {
        // corrected weight, f = χ_(0,1), alpha = 1, ell = 1: terms (1, 1), rhs 2
        let f = ind(0.0, 1.0, 1.0);
        let d = lower(1.0);
        let lhs = weighted_functional(
            &FunctionalKind::BennettLhsPair { p: 1.0, alpha: 1.0, variant: LogVariant::Corrected },
            &f,
            &d,
        )
        .unwrap();
        let (t1, t2) = lhs.pair.unwrap();
        assert!((t1 - 1.0).abs() < 1e-10 && (t2 - 1.0).abs() < 1e-9, "({t1}, {t2})");
        let rhs = weighted_functional(
            &FunctionalKind::BennettRhs { p: 1.0, alpha: 1.0, variant: LogVariant::Corrected },
            &f,
            &d,
        )
        .unwrap();
        assert!((rhs.value - 2.0).abs() < 1e-9, "got {}", rhs.value);
        // as-printed weight loses the ∫f term: rhs becomes 1
        let rhs = weighted_functional(
            &FunctionalKind::BennettRhs { p: 1.0, alpha: 1.0, variant: LogVariant::AsPrinted },
            &f,
            &d,
        )
        .unwrap();
        assert!((rhs.value - 1.0).abs() < 1e-9, "got {}", rhs.value);
    }

    #[test]
    fn lemma_sides_and_equality_family() {
        // equality for f = A χ_(0,c) in the non-increasing branch
        let f = ind(0.0, 0.3, 2.0);
        for p in [0.5, 1.0, 2.0, 3.0] {
            let lhs = lemma_lhs(&f, p, 1.0).unwrap();
            let rhs = p * lemma_rhs_lower(&f, p, 1.0).unwrap().value;
            assert!((lhs - rhs).abs() <= 1e-9 * lhs.abs(), "p = {p}: {lhs} vs {rhs}");
        }
        // equality for f = A χ_(c,b) in the non-decreasing branch
        let f = ind(0.4, f64::INFINITY, 1.5);
        for p in [0.5, 2.0] {
            let lhs = lemma_lhs(&f, p, 1.0).unwrap();
            let rhs = p * lemma_rhs_upper(&f, p, 1.0).unwrap().value;
            assert!((lhs - rhs).abs() <= 1e-9 * lhs.abs(), "p = {p}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn functional_matches_midpoint_oracle() {
        let f = ind(0.0, 0.5, 1.0);
        let kind = FunctionalKind::LhsCum { p: 2.0, alpha: 1.0 };
        let adaptive = weighted_functional(&kind, &f, &lower(1.0)).unwrap().value;
        let g = |x: f64| f.cumulative(x).unwrap().powi(2) * x.powi(-1);
        let oracle = riemann_oracle(&g, 1e-9, 1.0, Measure::Haar, 1_000_000).unwrap();
        assert!((adaptive - oracle).abs() <= 1e-4 * adaptive.abs());
    }
}
