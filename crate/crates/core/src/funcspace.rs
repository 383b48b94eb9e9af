//! Representation and algebra of the non-negative test functions: symbolic
//! powers, indicators, log-power weights, sampled step functions and sums,
//! with exact antiderivatives where they exist, cone (monotonicity) metadata,
//! and the substitution transforms that link the inequality families.
//!
//! Sampled functions are piecewise constant and left-continuous, so
//! rearrangement and cone checks stay exact. `ell = inf` is an explicit
//! extended-real value, never a large-number surrogate.

use crate::error::{Error, Result};
use crate::quad::{integrate, Integrand, Measure, QuadOpts};

/// An interval of (0, ∞) together with the measure integrals run against.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Domain {
    pub kind: DomainKind,
    pub measure: Measure,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DomainKind {
    /// (0, ell) with 0 < ell <= inf
    Lower { ell: f64 },
    /// (ell, inf) with 0 <= ell < inf
    Upper { ell: f64 },
}

impl Domain {
    pub fn lower(ell: f64, measure: Measure) -> Result<Self> {
        if !(ell > 0.0) {
            return Err(Error::Domain(format!("lower domain (0, ell) requires ell > 0, got {ell}")));
        }
        Ok(Self { kind: DomainKind::Lower { ell }, measure })
    }

    pub fn upper(ell: f64, measure: Measure) -> Result<Self> {
        if !(ell >= 0.0) || ell.is_infinite() {
            return Err(Error::Domain(format!("upper domain (ell, inf) requires 0 <= ell < inf, got {ell}")));
        }
        Ok(Self { kind: DomainKind::Upper { ell }, measure })
    }

    pub fn bounds(&self) -> (f64, f64) {
        match self.kind {
            DomainKind::Lower { ell } => (0.0, ell),
            DomainKind::Upper { ell } => (ell, f64::INFINITY),
        }
    }

    pub fn ell(&self) -> f64 {
        match self.kind {
            DomainKind::Lower { ell } | DomainKind::Upper { ell } => ell,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        let (lo, hi) = self.bounds();
        x > lo && x < hi
    }
}

/// Monotonicity cone a function is declared to live in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cone {
    NonIncreasing,
    NonDecreasing,
    Unrestricted,
}

/// Which logarithmic weight a `LogPower` carries. `ell` is stored on the
/// expression; the grammar tokens are `el`, `l`, `dual` and `duall`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LogForm {
    /// log(e*ell/x) on (0, ell)
    UpperE,
    /// log(ell/x) on (0, ell)
    Upper,
    /// log(x*e/ell) on (ell, inf)
    DualE,
    /// log(x/ell) on (ell, inf)
    Dual,
}

#[derive(Clone, Debug)]
pub enum FuncKind {
    /// A x^a
    Power { coeff: f64, exponent: f64 },
    /// A χ_(lo, hi), hi may be inf
    Indicator { lo: f64, hi: f64, amp: f64 },
    /// A x^a [log form(x)]^b
    LogPower { coeff: f64, exponent: f64, log_exponent: f64, form: LogForm, ell: f64 },
    /// piecewise constant, left-continuous: value[i] on (grid[i-1], grid[i]], 0 beyond
    Sampled { grid: Vec<f64>, values: Vec<f64> },
    Sum(Vec<FuncExpr>),
    /// inner restricted to (lo, hi), zero outside; produced by the transforms
    Windowed { inner: Box<FuncExpr>, lo: f64, hi: f64 },
}

/// A non-negative function on (0, ∞) with cone and positivity metadata.
///
/// `positive` is a strict-positivity claim (needed wherever p < 0); it is
/// validated on construction against the variant's structure.
#[derive(Clone, Debug)]
pub struct FuncExpr {
    pub kind: FuncKind,
    pub cone: Cone,
    pub positive: bool,
}

impl FuncExpr {
    /// Construct with a declared cone and positivity claim; both are checked.
    pub fn new(kind: FuncKind, cone: Cone, positive: bool) -> Result<Self> {
        validate_kind(&kind)?;
        let f = FuncExpr { kind, cone, positive };
        if !cone_check(&f, cone) {
            return Err(Error::Domain(format!("declared cone {cone:?} fails the monotonicity check")));
        }
        if positive && !structurally_positive(&f.kind) {
            return Err(Error::Domain(
                "positivity=true requires a function that is strictly positive on the domain interior".into(),
            ));
        }
        Ok(f)
    }

    /// Construct inferring the tightest cone that verifies, positivity where
    /// structurally guaranteed.
    pub fn auto(kind: FuncKind) -> Result<Self> {
        validate_kind(&kind)?;
        let probe = FuncExpr { kind, cone: Cone::Unrestricted, positive: false };
        let cone = if cone_check(&probe, Cone::NonIncreasing) {
            Cone::NonIncreasing
        } else if cone_check(&probe, Cone::NonDecreasing) {
            Cone::NonDecreasing
        } else {
            Cone::Unrestricted
        };
        let positive = structurally_positive(&probe.kind);
        Ok(FuncExpr { kind: probe.kind, cone, positive })
    }

    pub fn power(coeff: f64, exponent: f64) -> Result<Self> {
        Self::auto(FuncKind::Power { coeff, exponent })
    }

    pub fn indicator(lo: f64, hi: f64, amp: f64) -> Result<Self> {
        Self::auto(FuncKind::Indicator { lo, hi, amp })
    }

    pub fn log_power(coeff: f64, exponent: f64, log_exponent: f64, form: LogForm, ell: f64) -> Result<Self> {
        Self::auto(FuncKind::LogPower { coeff, exponent, log_exponent, form, ell })
    }

    pub fn sampled(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Self::auto(FuncKind::Sampled { grid, values })
    }

    pub fn sum(parts: Vec<FuncExpr>) -> Result<Self> {
        Self::auto(FuncKind::Sum(parts))
    }

    pub fn windowed(inner: FuncExpr, lo: f64, hi: f64) -> Result<Self> {
        Self::auto(FuncKind::Windowed { inner: Box::new(inner), lo, hi })
    }

    /// Pointwise value at x > 0.
    pub fn evaluate(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::Domain(format!("evaluate requires x > 0, got {x}")));
        }
        eval_kind(&self.kind, x)
    }

    /// `evaluate` with errors mapped to NaN, for use inside integrand closures.
    pub fn eval_or_nan(&self, x: f64) -> f64 {
        self.evaluate(x).unwrap_or(f64::NAN)
    }

    /// ln f(x), with -inf where f vanishes. Power laws are evaluated in log
    /// scale directly, so values far beyond the f64 underflow range remain
    /// exact; integrand builders combine this with weight exponents before
    /// a single exp.
    pub fn ln_evaluate(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::Domain(format!("evaluate requires x > 0, got {x}")));
        }
        ln_eval_kind(&self.kind, x)
    }

    pub fn ln_eval_or_nan(&self, x: f64) -> f64 {
        self.ln_evaluate(x).unwrap_or(f64::NAN)
    }

    /// F(x) = ∫_0^x f(y) dy, exact when a closed form exists, quadrature
    /// otherwise. Errors if f is not integrable near 0.
    pub fn cumulative(&self, x: f64) -> Result<f64> {
        self.integral_between(0.0, x)
    }

    /// ∫_x^∞ f(y) dy, exact when a closed form exists. Errors on a
    /// divergent tail.
    pub fn tail(&self, x: f64) -> Result<f64> {
        self.integral_between(x, f64::INFINITY)
    }

    /// ∫_a^b f with closed forms per variant; quadrature fallback only for
    /// log-power factors.
    pub fn integral_between(&self, a: f64, b: f64) -> Result<f64> {
        if !(a >= 0.0) || !(b >= a) {
            return Err(Error::Domain(format!("bad integration bounds ({a}, {b})")));
        }
        if a == b {
            return Ok(0.0);
        }
        integral_kind(&self.kind, a, b)
    }

    /// Finite interior breakpoints (jump/kink locations).
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = Vec::new();
        collect_breakpoints(&self.kind, &mut out);
        out.retain(|x| x.is_finite() && *x > 0.0);
        out.sort_by(|x, y| x.partial_cmp(y).unwrap());
        out.dedup();
        out
    }

    /// Local power exponent near 0: f(x) ~ C x^e. `inf` means f vanishes
    /// identically near 0. Log factors are ignored (they are o(x^δ)).
    pub fn exponent_at_zero(&self) -> f64 {
        exp_at_zero(&self.kind)
    }

    /// Local power exponent as x → ∞; `-inf` means compactly supported.
    pub fn exponent_at_inf(&self) -> f64 {
        exp_at_inf(&self.kind)
    }

    /// Decompose into (length, value) pieces when the function is a finite
    /// step function on (0, ∞); `None` for genuinely non-step variants.
    pub fn step_pieces(&self) -> Option<Vec<(f64, f64)>> {
        if !is_step(&self.kind) {
            return None;
        }
        let mut edges = vec![0.0];
        edges.extend(self.breakpoints());
        let mut pieces = Vec::new();
        for w in edges.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            let v = self.evaluate(mid).ok()?;
            pieces.push((w[1] - w[0], v));
        }
        Some(pieces)
    }
}

fn validate_kind(kind: &FuncKind) -> Result<()> {
    match kind {
        FuncKind::Power { coeff, exponent } => {
            if !(*coeff >= 0.0) || !exponent.is_finite() {
                return Err(Error::Domain(format!("power requires coeff >= 0 and finite exponent, got ({coeff}, {exponent})")));
            }
        }
        FuncKind::Indicator { lo, hi, amp } => {
            if !(*lo >= 0.0) || !(hi > lo) || !(*amp > 0.0) {
                return Err(Error::Domain(format!("indicator requires 0 <= c1 < c2 and A > 0, got ({lo}, {hi}, {amp})")));
            }
            if lo.is_infinite() {
                return Err(Error::Domain("indicator lower endpoint must be finite".into()));
            }
        }
        FuncKind::LogPower { coeff, ell, .. } => {
            if !(*coeff >= 0.0) {
                return Err(Error::Domain("log-power requires coeff >= 0".into()));
            }
            if !(*ell > 0.0) || ell.is_infinite() {
                return Err(Error::Domain(format!("log-power requires finite ell > 0, got {ell}")));
            }
        }
        FuncKind::Sampled { grid, values } => {
            if grid.is_empty() || grid.len() != values.len() {
                return Err(Error::Domain("sampled requires equal-length non-empty grid and values".into()));
            }
            let mut prev = 0.0;
            for &x in grid {
                if !(x > prev) || !x.is_finite() {
                    return Err(Error::Domain("sampled grid must be strictly increasing, positive and finite".into()));
                }
                prev = x;
            }
            if values.iter().any(|v| !(*v >= 0.0)) {
                return Err(Error::Domain("sampled values must be non-negative".into()));
            }
        }
        FuncKind::Sum(parts) => {
            if parts.is_empty() {
                return Err(Error::Domain("sum requires at least one part".into()));
            }
        }
        FuncKind::Windowed { lo, hi, .. } => {
            if !(*lo >= 0.0) || !(hi > lo) {
                return Err(Error::Domain(format!("window requires 0 <= lo < hi, got ({lo}, {hi})")));
            }
        }
    }
    Ok(())
}

fn structurally_positive(kind: &FuncKind) -> bool {
    match kind {
        FuncKind::Power { coeff, .. } => *coeff > 0.0,
        FuncKind::LogPower { coeff, .. } => *coeff > 0.0,
        FuncKind::Indicator { lo, hi, .. } => *lo == 0.0 && hi.is_infinite(),
        FuncKind::Sampled { values, .. } => values.iter().all(|v| *v > 0.0),
        FuncKind::Sum(parts) => parts.iter().any(|p| structurally_positive(&p.kind)),
        FuncKind::Windowed { inner, lo, hi } => {
            *lo == 0.0 && hi.is_infinite() && structurally_positive(&inner.kind)
        }
    }
}

fn eval_kind(kind: &FuncKind, x: f64) -> Result<f64> {
    Ok(match kind {
        FuncKind::Power { coeff, exponent } => coeff * x.powf(*exponent),
        FuncKind::Indicator { lo, hi, amp } => {
            if x > *lo && x < *hi {
                *amp
            } else {
                0.0
            }
        }
        FuncKind::LogPower { coeff, exponent, log_exponent, form, ell } => {
            let l = log_factor(*form, *ell, x);
            if l < 0.0 {
                return Err(Error::Domain(format!("log weight is negative at x = {x} (outside its natural domain)")));
            }
            coeff * x.powf(*exponent) * l.powf(*log_exponent)
        }
        FuncKind::Sampled { grid, values } => {
            // left-continuous: value i on (grid[i-1], grid[i]]
            match grid.binary_search_by(|g| g.partial_cmp(&x).unwrap()) {
                Ok(i) => values[i],
                Err(i) => {
                    if i < grid.len() {
                        values[i]
                    } else {
                        0.0
                    }
                }
            }
        }
        FuncKind::Sum(parts) => {
            let mut acc = 0.0;
            for p in parts {
                acc += p.evaluate(x)?;
            }
            acc
        }
        FuncKind::Windowed { inner, lo, hi } => {
            if x > *lo && x < *hi {
                inner.evaluate(x)?
            } else {
                0.0
            }
        }
    })
}

fn ln_eval_kind(kind: &FuncKind, x: f64) -> Result<f64> {
    Ok(match kind {
        FuncKind::Power { coeff, exponent } => {
            if *coeff == 0.0 {
                f64::NEG_INFINITY
            } else {
                coeff.ln() + exponent * x.ln()
            }
        }
        FuncKind::Indicator { lo, hi, amp } => {
            if x > *lo && x < *hi {
                amp.ln()
            } else {
                f64::NEG_INFINITY
            }
        }
        FuncKind::LogPower { coeff, exponent, log_exponent, form, ell } => {
            if *coeff == 0.0 {
                return Ok(f64::NEG_INFINITY);
            }
            let l = log_factor(*form, *ell, x);
            if l < 0.0 {
                return Err(Error::Domain(format!("log weight is negative at x = {x} (outside its natural domain)")));
            }
            coeff.ln() + exponent * x.ln() + log_exponent * l.ln()
        }
        FuncKind::Sampled { .. } => {
            let v = eval_kind(kind, x)?;
            if v > 0.0 {
                v.ln()
            } else {
                f64::NEG_INFINITY
            }
        }
        FuncKind::Sum(parts) => {
            // log-sum-exp over the parts
            let mut lns = Vec::with_capacity(parts.len());
            let mut top = f64::NEG_INFINITY;
            for p in parts {
                let l = p.ln_evaluate(x)?;
                if l > top {
                    top = l;
                }
                lns.push(l);
            }
            if top == f64::NEG_INFINITY {
                f64::NEG_INFINITY
            } else {
                top + lns.iter().map(|l| (l - top).exp()).sum::<f64>().ln()
            }
        }
        FuncKind::Windowed { inner, lo, hi } => {
            if x > *lo && x < *hi {
                inner.ln_evaluate(x)?
            } else {
                f64::NEG_INFINITY
            }
        }
    })
}

fn log_factor(form: LogForm, ell: f64, x: f64) -> f64 {
    match form {
        LogForm::UpperE => 1.0 + (ell / x).ln(),
        LogForm::Upper => (ell / x).ln(),
        LogForm::DualE => 1.0 + (x / ell).ln(),
        LogForm::Dual => (x / ell).ln(),
    }
}

fn power_antideriv(coeff: f64, e: f64, x: f64) -> f64 {
    if e == -1.0 {
        coeff * x.ln()
    } else {
        coeff * x.powf(e + 1.0) / (e + 1.0)
    }
}

fn integral_kind(kind: &FuncKind, a: f64, b: f64) -> Result<f64> {
    match kind {
        FuncKind::Power { coeff, exponent } => {
            let (cf, e) = (*coeff, *exponent);
            if cf == 0.0 {
                return Ok(0.0);
            }
            if a == 0.0 && e <= -1.0 {
                return Err(Error::Divergence(format!("x^{e} is not integrable near 0")));
            }
            if b.is_infinite() {
                if e >= -1.0 {
                    return Err(Error::Divergence(format!("x^{e} is not integrable at infinity")));
                }
                return Ok(-power_antideriv(cf, e, a));
            }
            let upper = power_antideriv(cf, e, b);
            let lower = if a == 0.0 { 0.0 } else { power_antideriv(cf, e, a) };
            Ok(upper - lower)
        }
        FuncKind::Indicator { lo, hi, amp } => {
            let l = a.max(*lo);
            let h = b.min(*hi);
            if h <= l {
                return Ok(0.0);
            }
            if h.is_infinite() {
                return Err(Error::Divergence("indicator with infinite support has a divergent integral".into()));
            }
            Ok(amp * (h - l))
        }
        FuncKind::Sampled { grid, values } => {
            let mut acc = 0.0;
            let mut prev = 0.0;
            for (i, &g) in grid.iter().enumerate() {
                let l = a.max(prev);
                let h = b.min(g);
                if h > l {
                    acc += values[i] * (h - l);
                }
                prev = g;
            }
            Ok(acc)
        }
        FuncKind::Sum(parts) => {
            let mut acc = 0.0;
            for p in parts {
                acc += p.integral_between(a, b)?;
            }
            Ok(acc)
        }
        FuncKind::Windowed { inner, lo, hi } => {
            let l = a.max(*lo);
            let h = b.min(*hi);
            if h <= l {
                return Ok(0.0);
            }
            inner.integral_between(l, h)
        }
        FuncKind::LogPower { coeff, exponent, log_exponent, form, ell } => {
            let (cf, e, be) = (*coeff, *exponent, *log_exponent);
            if cf == 0.0 {
                return Ok(0.0);
            }
            if a == 0.0 && !(e > -1.0 || (e == -1.0 && be < -1.0)) {
                return Err(Error::Divergence(format!("x^{e} log^{be} is not integrable near 0")));
            }
            if b.is_infinite() && !(e < -1.0 || (e == -1.0 && be < -1.0)) {
                return Err(Error::Divergence(format!("x^{e} log^{be} is not integrable at infinity")));
            }
            // quadrature fallback; the log factor's zero is an endpoint of the
            // natural domain, declare a mild power there when it is singular
            let me = FuncExpr { kind: kind.clone(), cone: Cone::Unrestricted, positive: false };
            let f = |x: f64| me.eval_or_nan(x);
            let singular_at_ell = be < 0.0 && matches!(form, LogForm::Upper | LogForm::Dual);
            let spec = Integrand {
                f: &f,
                breakpoints: &[],
                gamma_lo: if a == 0.0 { Some(e) } else if singular_at_ell && a == *ell { Some(-0.5) } else { None },
                gamma_hi: if b == *ell && singular_at_ell { Some(-0.5) } else { None },
            };
            let opts = QuadOpts { rtol: Some(1e-11), ..QuadOpts::default() };
            Ok(integrate(&spec, a, b, Measure::Lebesgue, &opts)?.value)
        }
    }
}

fn collect_breakpoints(kind: &FuncKind, out: &mut Vec<f64>) {
    match kind {
        FuncKind::Power { .. } => {}
        FuncKind::Indicator { lo, hi, .. } => {
            out.push(*lo);
            out.push(*hi);
        }
        FuncKind::LogPower { form, ell, .. } => {
            if matches!(form, LogForm::Upper | LogForm::Dual) {
                out.push(*ell);
            }
        }
        FuncKind::Sampled { grid, .. } => out.extend_from_slice(grid),
        FuncKind::Sum(parts) => {
            for p in parts {
                collect_breakpoints(&p.kind, out);
            }
        }
        FuncKind::Windowed { inner, lo, hi } => {
            out.push(*lo);
            out.push(*hi);
            collect_breakpoints(&inner.kind, out);
        }
    }
}

fn exp_at_zero(kind: &FuncKind) -> f64 {
    match kind {
        FuncKind::Power { coeff, exponent } => {
            if *coeff == 0.0 {
                f64::INFINITY
            } else {
                *exponent
            }
        }
        FuncKind::Indicator { lo, .. } => {
            if *lo == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        }
        FuncKind::LogPower { coeff, exponent, .. } => {
            if *coeff == 0.0 {
                f64::INFINITY
            } else {
                *exponent
            }
        }
        FuncKind::Sampled { values, .. } => {
            if values.first().map(|v| *v > 0.0).unwrap_or(false) {
                0.0
            } else {
                f64::INFINITY
            }
        }
        FuncKind::Sum(parts) => parts.iter().map(|p| exp_at_zero(&p.kind)).fold(f64::INFINITY, f64::min),
        FuncKind::Windowed { inner, lo, .. } => {
            if *lo > 0.0 {
                f64::INFINITY
            } else {
                exp_at_zero(&inner.kind)
            }
        }
    }
}

fn exp_at_inf(kind: &FuncKind) -> f64 {
    match kind {
        FuncKind::Power { coeff, exponent } => {
            if *coeff == 0.0 {
                f64::NEG_INFINITY
            } else {
                *exponent
            }
        }
        FuncKind::Indicator { hi, .. } => {
            if hi.is_infinite() {
                0.0
            } else {
                f64::NEG_INFINITY
            }
        }
        FuncKind::LogPower { coeff, exponent, .. } => {
            if *coeff == 0.0 {
                f64::NEG_INFINITY
            } else {
                *exponent
            }
        }
        FuncKind::Sampled { .. } => f64::NEG_INFINITY,
        FuncKind::Sum(parts) => parts.iter().map(|p| exp_at_inf(&p.kind)).fold(f64::NEG_INFINITY, f64::max),
        FuncKind::Windowed { inner, hi, .. } => {
            if hi.is_finite() {
                f64::NEG_INFINITY
            } else {
                exp_at_inf(&inner.kind)
            }
        }
    }
}

fn is_step(kind: &FuncKind) -> bool {
    match kind {
        FuncKind::Indicator { hi, .. } => hi.is_finite(),
        FuncKind::Sampled { .. } => true,
        FuncKind::Sum(parts) => parts.iter().all(|p| is_step(&p.kind)),
        FuncKind::Windowed { inner, hi, .. } => {
            hi.is_finite()
                && match &inner.kind {
                    FuncKind::Power { exponent, .. } => *exponent == 0.0,
                    k => is_step(k),
                }
        }
        _ => false,
    }
}

// ---------------------------------------------------------------------------
// cone checks
// ---------------------------------------------------------------------------

/// True iff the declared monotonicity holds: exact for powers, indicators,
/// windows of powers and step functions; a deterministic 512-point log-spaced
/// sample (plus all breakpoints) decides the remaining variants.
pub fn cone_check(f: &FuncExpr, cone: Cone) -> bool {
    cone_check_weighted(f, 0.0, cone)
}

/// Cone check for the quasi-monotone product x^w f(x). `w = 0` is the plain
/// check; `w = 2` is the cone required by the dual transformed inequality.
pub fn cone_check_weighted(f: &FuncExpr, w: f64, cone: Cone) -> bool {
    if cone == Cone::Unrestricted {
        return true;
    }
    match exact_weighted_cone(&f.kind, w, cone) {
        Some(ans) => ans,
        None => sampled_cone_check(f, w, cone),
    }
}

fn exact_weighted_cone(kind: &FuncKind, w: f64, cone: Cone) -> Option<bool> {
    match kind {
        FuncKind::Power { coeff, exponent } => {
            if *coeff == 0.0 {
                return Some(true);
            }
            let e = exponent + w;
            Some(match cone {
                Cone::NonIncreasing => e <= 0.0,
                Cone::NonDecreasing => e >= 0.0,
                Cone::Unrestricted => true,
            })
        }
        FuncKind::Indicator { lo, hi, .. } => Some(match cone {
            // x^w χ_(lo,hi): monotone on the support only when the power
            // agrees and the jump is at the right end
            Cone::NonIncreasing => *lo == 0.0 && w <= 0.0,
            Cone::NonDecreasing => hi.is_infinite() && w >= 0.0,
            Cone::Unrestricted => true,
        }),
        FuncKind::Sampled { values, .. } => {
            if w != 0.0 {
                return None;
            }
            // within the support hull (0, grid.last()]
            let ok = match cone {
                Cone::NonIncreasing => values.windows(2).all(|p| p[1] <= p[0]),
                Cone::NonDecreasing => values.windows(2).all(|p| p[1] >= p[0]),
                Cone::Unrestricted => true,
            };
            Some(ok)
        }
        FuncKind::Windowed { inner, lo, hi } => {
            let inner_ok = exact_weighted_cone(&inner.kind, w, cone)?;
            Some(match cone {
                Cone::NonIncreasing => *lo == 0.0 && inner_ok,
                Cone::NonDecreasing => hi.is_infinite() && inner_ok,
                Cone::Unrestricted => true,
            })
        }
        FuncKind::Sum(parts) => {
            let mut all = true;
            for p in parts {
                match exact_weighted_cone(&p.kind, w, cone) {
                    Some(true) => {}
                    Some(false) => all = false,
                    None => return None,
                }
            }
            if all {
                Some(true)
            } else {
                None // a failing part does not prove the sum fails
            }
        }
        FuncKind::LogPower { .. } => None,
    }
}

fn sample_hull(kind: &FuncKind) -> (f64, f64) {
    match kind {
        FuncKind::LogPower { form, ell, .. } => match form {
            LogForm::UpperE | LogForm::Upper => (ell * 1e-6, ell * (1.0 - 1e-9)),
            LogForm::DualE | LogForm::Dual => (ell * (1.0 + 1e-9), ell * 1e6),
        },
        FuncKind::Sum(parts) => {
            let hulls: Vec<(f64, f64)> = parts.iter().map(|p| sample_hull(&p.kind)).collect();
            let lo = hulls.iter().map(|h| h.0).fold(f64::INFINITY, f64::min);
            let hi = hulls.iter().map(|h| h.1).fold(0.0f64, f64::max);
            (lo, hi)
        }
        other => {
            let mut bps = Vec::new();
            collect_breakpoints(other, &mut bps);
            bps.retain(|x| x.is_finite() && *x > 0.0);
            if bps.is_empty() {
                (1e-3, 1e3)
            } else {
                let lo = bps.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = bps.iter().copied().fold(0.0f64, f64::max);
                (lo * 0.5, hi * 2.0)
            }
        }
    }
}

fn sampled_cone_check(f: &FuncExpr, w: f64, cone: Cone) -> bool {
    let (lo, hi) = sample_hull(&f.kind);
    if !(hi > lo) || !lo.is_finite() {
        return true;
    }
    let mut xs: Vec<f64> = (0..512).map(|i| lo * (hi / lo).powf(i as f64 / 511.0)).collect();
    for b in f.breakpoints() {
        if b > lo && b < hi {
            // straddle each breakpoint so one-sided limits are both sampled
            xs.push(b * (1.0 - 1e-9));
            xs.push(b * (1.0 + 1e-9));
        }
    }
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut prev: Option<f64> = None;
    for x in xs {
        let v = match f.evaluate(x) {
            Ok(v) => v * x.powf(w),
            Err(_) => continue,
        };
        if let Some(pv) = prev {
            let slack = 1e-12 * pv.abs().max(v.abs()).max(1e-300);
            let ok = match cone {
                Cone::NonIncreasing => v <= pv + slack,
                Cone::NonDecreasing => v + slack >= pv,
                Cone::Unrestricted => true,
            };
            if !ok {
                return false;
            }
        }
        prev = Some(v);
    }
    true
}

// ---------------------------------------------------------------------------
// substitution transforms
// ---------------------------------------------------------------------------

/// The averaging-form substitution f(x) = g(x^{1-1/p}) x^{-1/p}, p > 1.
///
/// It carries ∫_0^∞ f^p dx onto p' ∫_0^∞ g^p dx/x, and the Lebesgue averaging
/// functional onto (p')^{p+1} times its Haar counterpart.
pub fn transform_obs21(g: &FuncExpr, p: f64) -> Result<FuncExpr> {
    if !(p > 1.0) {
        return Err(Error::Parameter(format!("the substitution requires p > 1, got p = {p}")));
    }
    let sigma = 1.0 - 1.0 / p;
    let kind = obs21_kind(&g.kind, p, sigma)?;
    let cone = if g.cone == Cone::NonIncreasing { Cone::NonIncreasing } else { Cone::Unrestricted };
    let positive = g.positive && structurally_positive(&kind);
    FuncExpr::new(kind, cone, positive)
}

fn obs21_kind(kind: &FuncKind, p: f64, sigma: f64) -> Result<FuncKind> {
    let map_edge = |c: f64| if c == 0.0 { 0.0 } else { c.powf(1.0 / sigma) };
    Ok(match kind {
        FuncKind::Power { coeff, exponent } => {
            FuncKind::Power { coeff: *coeff, exponent: exponent * sigma - 1.0 / p }
        }
        FuncKind::Indicator { lo, hi, amp } => FuncKind::Windowed {
            inner: Box::new(FuncExpr::power(*amp, -1.0 / p)?),
            lo: map_edge(*lo),
            hi: map_edge(*hi),
        },
        FuncKind::Windowed { inner, lo, hi } => FuncKind::Windowed {
            inner: Box::new(FuncExpr {
                kind: obs21_kind(&inner.kind, p, sigma)?,
                cone: Cone::Unrestricted,
                positive: false,
            }),
            lo: map_edge(*lo),
            hi: map_edge(*hi),
        },
        FuncKind::Sampled { grid, values } => {
            let mut parts = Vec::new();
            let mut prev = 0.0;
            for (i, &gx) in grid.iter().enumerate() {
                if values[i] > 0.0 {
                    parts.push(FuncExpr::windowed(
                        FuncExpr::power(values[i], -1.0 / p)?,
                        map_edge(prev),
                        map_edge(gx),
                    )?);
                }
                prev = gx;
            }
            if parts.is_empty() {
                FuncKind::Power { coeff: 0.0, exponent: 0.0 }
            } else {
                FuncKind::Sum(parts)
            }
        }
        FuncKind::Sum(parts) => {
            let mapped: Result<Vec<FuncExpr>> = parts
                .iter()
                .map(|q| {
                    Ok(FuncExpr {
                        kind: obs21_kind(&q.kind, p, sigma)?,
                        cone: Cone::Unrestricted,
                        positive: false,
                    })
                })
                .collect();
            FuncKind::Sum(mapped?)
        }
        FuncKind::LogPower { .. } => {
            return Err(Error::Unsupported("the averaging substitution is not available for log-weight functions".into()))
        }
    })
}

/// The inversion g(x) = f(1/x) x^{-2}. An involution that preserves the total
/// integral and maps (0, ell) statements onto (1/ell, ∞) statements.
pub fn transform_inverse(f: &FuncExpr) -> Result<FuncExpr> {
    let kind = inverse_kind(&f.kind)?;
    let positive = f.positive && structurally_positive(&kind);
    FuncExpr::new(kind, Cone::Unrestricted, positive)
}

fn inv_edge(c: f64) -> f64 {
    if c == 0.0 {
        f64::INFINITY
    } else if c.is_infinite() {
        0.0
    } else {
        1.0 / c
    }
}

fn inverse_kind(kind: &FuncKind) -> Result<FuncKind> {
    Ok(match kind {
        FuncKind::Power { coeff, exponent } => FuncKind::Power { coeff: *coeff, exponent: -exponent - 2.0 },
        FuncKind::Indicator { lo, hi, amp } => FuncKind::Windowed {
            inner: Box::new(FuncExpr::power(*amp, -2.0)?),
            lo: inv_edge(*hi),
            hi: inv_edge(*lo),
        },
        FuncKind::Windowed { inner, lo, hi } => FuncKind::Windowed {
            inner: Box::new(FuncExpr {
                kind: inverse_kind(&inner.kind)?,
                cone: Cone::Unrestricted,
                positive: false,
            }),
            lo: inv_edge(*hi),
            hi: inv_edge(*lo),
        },
        FuncKind::Sampled { grid, values } => {
            let mut parts = Vec::new();
            let mut prev = 0.0;
            for (i, &gx) in grid.iter().enumerate() {
                if values[i] > 0.0 {
                    parts.push(FuncExpr::windowed(FuncExpr::power(values[i], -2.0)?, inv_edge(gx), inv_edge(prev))?);
                }
                prev = gx;
            }
            if parts.is_empty() {
                FuncKind::Power { coeff: 0.0, exponent: 0.0 }
            } else {
                FuncKind::Sum(parts)
            }
        }
        FuncKind::Sum(parts) => {
            let mapped: Result<Vec<FuncExpr>> = parts
                .iter()
                .map(|q| {
                    Ok(FuncExpr { kind: inverse_kind(&q.kind)?, cone: Cone::Unrestricted, positive: false })
                })
                .collect();
            FuncKind::Sum(mapped?)
        }
        FuncKind::LogPower { coeff, exponent, log_exponent, form, ell } => {
            let new_form = match form {
                LogForm::UpperE => LogForm::DualE,
                LogForm::Upper => LogForm::Dual,
                LogForm::DualE => LogForm::UpperE,
                LogForm::Dual => LogForm::Upper,
            };
            FuncKind::LogPower {
                coeff: *coeff,
                exponent: -exponent - 2.0,
                log_exponent: *log_exponent,
                form: new_form,
                ell: 1.0 / ell,
            }
        }
    })
}

// ---------------------------------------------------------------------------
// grammar
// ---------------------------------------------------------------------------

/// Parse a function literal:
/// `pow:A,a` | `ind:c1,c2,A` | `logpow:A,a,b,form` (form in el/l/dual/duall) |
/// `sum:[expr;expr;...]` | `sampled:[x1:v1;x2:v2;...]` | `win:lo,hi,[expr]`.
///
/// `ell` supplies the scale for `logpow`. File-based `sampled:@path` specs
/// must be resolved by the caller (the CLI reads the file and substitutes the
/// inline form).
pub fn parse_func(spec: &str, ell: f64) -> Result<FuncExpr> {
    let (head, rest) = spec
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("function spec '{spec}' is missing a ':'")))?;
    match head {
        "pow" => {
            let v = parse_numbers(rest, 2)?;
            FuncExpr::power(v[0], v[1])
        }
        "ind" => {
            let v = parse_numbers(rest, 3)?;
            FuncExpr::indicator(v[0], v[1], v[2])
        }
        "logpow" => {
            let parts: Vec<&str> = rest.split(',').collect();
            if parts.len() != 4 {
                return Err(Error::Parse(format!("logpow expects A,a,b,form; got '{rest}'")));
            }
            let a = parse_number(parts[0])?;
            let e = parse_number(parts[1])?;
            let b = parse_number(parts[2])?;
            let form = match parts[3] {
                "el" => LogForm::UpperE,
                "l" => LogForm::Upper,
                "dual" => LogForm::DualE,
                "duall" => LogForm::Dual,
                other => return Err(Error::Parse(format!("unknown log form '{other}' (expected el, l, dual or duall)"))),
            };
            if !ell.is_finite() {
                return Err(Error::Parse("logpow requires a finite ell".into()));
            }
            FuncExpr::log_power(a, e, b, form, ell)
        }
        "sum" => {
            let inner = strip_brackets(rest)?;
            let parts: Result<Vec<FuncExpr>> = split_top(inner, ';').map(|s| parse_func(s, ell)).collect();
            FuncExpr::sum(parts?)
        }
        "sampled" => {
            if let Some(path) = rest.strip_prefix('@') {
                return Err(Error::Parse(format!(
                    "file-based sampled spec '@{path}' must be resolved by the caller"
                )));
            }
            let inner = strip_brackets(rest)?;
            let mut grid = Vec::new();
            let mut values = Vec::new();
            for pair in split_top(inner, ';') {
                let (x, v) = pair
                    .split_once(':')
                    .ok_or_else(|| Error::Parse(format!("sampled entry '{pair}' must be x:value")))?;
                grid.push(parse_number(x)?);
                values.push(parse_number(v)?);
            }
            FuncExpr::sampled(grid, values)
        }
        "win" => {
            let first = rest
                .find(",[")
                .ok_or_else(|| Error::Parse(format!("win expects lo,hi,[expr]; got '{rest}'")))?;
            let nums = parse_numbers(&rest[..first], 2)?;
            let inner = strip_brackets(&rest[first + 1..])?;
            FuncExpr::windowed(parse_func(inner, ell)?, nums[0], nums[1])
        }
        other => Err(Error::Parse(format!("unknown function kind '{other}'"))),
    }
}

/// Parse the two-column CSV body of a `sampled:@file` spec.
pub fn sampled_from_csv(body: &str) -> Result<FuncExpr> {
    let mut grid = Vec::new();
    let mut values = Vec::new();
    for (lineno, line) in body.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut cols = line.split(',');
        let x = cols
            .next()
            .ok_or_else(|| Error::Parse(format!("line {}: missing x column", lineno + 1)))?;
        let v = cols
            .next()
            .ok_or_else(|| Error::Parse(format!("line {}: missing value column", lineno + 1)))?;
        grid.push(parse_number(x.trim())?);
        values.push(parse_number(v.trim())?);
    }
    FuncExpr::sampled(grid, values)
}

/// Canonical grammar form of an expression; `parse_func` round-trips it.
pub fn fmt_spec(f: &FuncExpr) -> String {
    fmt_kind(&f.kind)
}

fn fmt_kind(kind: &FuncKind) -> String {
    match kind {
        FuncKind::Power { coeff, exponent } => format!("pow:{},{}", fmt_num(*coeff), fmt_num(*exponent)),
        FuncKind::Indicator { lo, hi, amp } => {
            format!("ind:{},{},{}", fmt_num(*lo), fmt_num(*hi), fmt_num(*amp))
        }
        FuncKind::LogPower { coeff, exponent, log_exponent, form, .. } => {
            let tok = match form {
                LogForm::UpperE => "el",
                LogForm::Upper => "l",
                LogForm::DualE => "dual",
                LogForm::Dual => "duall",
            };
            format!("logpow:{},{},{},{tok}", fmt_num(*coeff), fmt_num(*exponent), fmt_num(*log_exponent))
        }
        FuncKind::Sampled { grid, values } => {
            let body: Vec<String> =
                grid.iter().zip(values).map(|(x, v)| format!("{}:{}", fmt_num(*x), fmt_num(*v))).collect();
            format!("sampled:[{}]", body.join(";"))
        }
        FuncKind::Sum(parts) => {
            let body: Vec<String> = parts.iter().map(|p| fmt_kind(&p.kind)).collect();
            format!("sum:[{}]", body.join(";"))
        }
        FuncKind::Windowed { inner, lo, hi } => {
            format!("win:{},{},[{}]", fmt_num(*lo), fmt_num(*hi), fmt_kind(&inner.kind))
        }
    }
}

fn fmt_num(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x}")
    }
}

fn parse_number(s: &str) -> Result<f64> {
    match s.trim() {
        "inf" => Ok(f64::INFINITY),
        t => t.parse::<f64>().map_err(|_| Error::Parse(format!("bad number '{t}'"))),
    }
}

fn parse_numbers(s: &str, n: usize) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != n {
        return Err(Error::Parse(format!("expected {n} comma-separated numbers, got '{s}'")));
    }
    parts.iter().map(|t| parse_number(t)).collect()
}

fn strip_brackets(s: &str) -> Result<&str> {
    let t = s.trim();
    if t.starts_with('[') && t.ends_with(']') {
        Ok(&t[1..t.len() - 1])
    } else {
        Err(Error::Parse(format!("expected a [...] list, got '{s}'")))
    }
}

/// Split on `sep` at bracket depth zero.
fn split_top(s: &str, sep: char) -> impl Iterator<Item = &str> {
    let mut depth = 0i32;
    let mut start = 0usize;
    let mut out = Vec::new();
    for (i, c) in s.char_indices() {
        match c {
            '[' => depth += 1,
            ']' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out.into_iter().filter(|t| !t.trim().is_empty())
}
