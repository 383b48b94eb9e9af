//! Non-increasing rearrangement and Lorentz quasi-norms for step functions,
//! with the sharp two-sided comparisons between the plain quasi-norm and its
//! Hardy-averaged (or dual tail) companion, including the finite-interval
//! target-weighted refinement.
//!
//! Step functions only: rearrangement is exact by sorting and the extremal
//! cases of the comparisons are indicators. An infinite-measure space is
//! represented by a trailing zero-value piece of infinite measure.

use crate::error::{Error, Result};
use crate::funcspace::FuncExpr;
use crate::params::conjugate;
use crate::quad::{integrate, Integrand, Measure, QuadOpts};
use crate::report::{Direction, ReportParams, VerificationReport};
use crate::special::beta;

/// A finitely-valued measurable function given as (measure, value) pieces.
/// Order matters only as a layout on (0, total measure); all norms go
/// through the rearrangement.
#[derive(Clone, Debug, PartialEq)]
pub struct StepFunction {
    pieces: Vec<(f64, f64)>,
}

impl StepFunction {
    pub fn new(pieces: Vec<(f64, f64)>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::Domain("a step function needs at least one piece".into()));
        }
        for &(m, v) in &pieces {
            if !(m > 0.0) {
                return Err(Error::Domain(format!("piece measures must be positive, got {m}")));
            }
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::Domain(format!("piece values must be finite and non-negative, got {v}")));
            }
            if m.is_infinite() && v != 0.0 {
                return Err(Error::Domain("an infinite-measure piece must carry the value 0".into()));
            }
        }
        Ok(StepFunction { pieces: canonicalize(pieces) })
    }

    /// Convert a step-like symbolic function on (0, ∞) into pieces.
    pub fn from_func(f: &FuncExpr) -> Result<Self> {
        let pieces = f
            .step_pieces()
            .ok_or_else(|| Error::Parameter("function is not a finite step function".into()))?;
        let mut pieces: Vec<(f64, f64)> = pieces.into_iter().filter(|&(m, _)| m > 0.0).collect();
        pieces.push((f64::INFINITY, 0.0));
        StepFunction::new(pieces)
    }

    pub fn pieces(&self) -> &[(f64, f64)] {
        &self.pieces
    }

    pub fn total_measure(&self) -> f64 {
        self.pieces.iter().map(|p| p.0).sum()
    }

    /// Measure of the level set {f > lambda}.
    pub fn level_measure(&self, lambda: f64) -> f64 {
        self.pieces.iter().filter(|(_, v)| *v > lambda).map(|(m, _)| m).sum()
    }

    pub fn is_non_increasing(&self) -> bool {
        self.pieces.windows(2).all(|w| w[1].1 <= w[0].1)
    }

    /// Support measure: total measure of the set where the value is nonzero.
    pub fn support_measure(&self) -> f64 {
        self.pieces.iter().filter(|(_, v)| *v > 0.0).map(|(m, _)| m).sum()
    }

    /// Scale values by a non-negative factor.
    pub fn scale(&self, lambda: f64) -> Result<StepFunction> {
        StepFunction::new(self.pieces.iter().map(|&(m, v)| (m, lambda * v)).collect())
    }
}

fn canonicalize(pieces: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(pieces.len());
    for (m, v) in pieces {
        match out.last_mut() {
            Some((lm, lv)) if *lv == v => *lm += m,
            _ => out.push((m, v)),
        }
    }
    out
}

/// Non-increasing rearrangement f*: values sorted descending, equimeasurable
/// with the input; an infinite zero tail sorts last.
pub fn rearrange(f: &StepFunction) -> StepFunction {
    let mut pieces = f.pieces.clone();
    pieces.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
    StepFunction { pieces: canonicalize(pieces) }
}

/// Parameters (p, q, ell) of a quasi-norm comparison.
#[derive(Clone, Copy, Debug)]
pub struct LorentzParams {
    pub p: f64,
    pub q: f64,
    pub ell: f64,
}

impl LorentzParams {
    pub fn new(p: f64, q: f64, ell: f64) -> Result<Self> {
        if !(p > 0.0) || !(q > 0.0) {
            return Err(Error::Parameter(format!("Lorentz parameters require p, q > 0, got p = {p}, q = {q}")));
        }
        if !(ell > 0.0) {
            return Err(Error::Parameter(format!("Lorentz comparisons require ell > 0, got {ell}")));
        }
        Ok(LorentzParams { p, q, ell })
    }

    pub fn p_conj(&self) -> Result<f64> {
        conjugate(self.p)
    }
}

/// The plain quasi-norm (∫_0^ell (f*(t) t^{1/p})^q dt/t)^{1/q}; with
/// `with_target` the factor 1 - (t/ell)^{q/p'} is inserted (the finite-ell
/// refinement; it degenerates to 1 at ell = inf). Exact closed-form sums.
pub fn norm_star(fstar: &StepFunction, params: &LorentzParams, with_target: bool) -> Result<f64> {
    if !fstar.is_non_increasing() {
        return Err(Error::Parameter("norm_star expects a non-increasing rearrangement".into()));
    }
    let (p, q, ell) = (params.p, params.q, params.ell);
    let target = with_target && ell.is_finite();
    let qc_over_pc = if target { q / params.p_conj()? } else { 0.0 };
    let mut acc = 0.0;
    let mut t = 0.0;
    for &(m, v) in &fstar.pieces {
        let t_next = t + m;
        if v > 0.0 {
            let (a, b) = (t.min(ell), t_next.min(ell));
            if b > a {
                if b.is_infinite() {
                    return Err(Error::Divergence("positive value on an infinite-measure piece".into()));
                }
                // ∫ t^{q/p - 1} dt and, for the target, ∫ t^{q - 1} dt
                let main = (p / q) * (b.powf(q / p) - a.powf(q / p));
                let corr = if target { ell.powf(-qc_over_pc) / q * (b.powf(q) - a.powf(q)) } else { 0.0 };
                acc += v.powf(q) * (main - corr);
            }
        }
        t = t_next;
        if t >= ell {
            break;
        }
    }
    Ok(acc.powf(1.0 / q))
}

/// Which averaged companion norm to take.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DoubleStarVariant {
    /// (∫_0^ell (∫_0^t f*)^q t^{-q/p'} dt/t)^{1/q} — the p > 1 companion
    Forward,
    /// same with ∫_t^inf f* — the 0 < p < 1 companion (p' < 0)
    Dual,
}

/// The averaged quasi-norm. Piecewise-linear inner integral, quadrature per
/// piece, closed form on the constant tail.
pub fn norm_doublestar(
    fstar: &StepFunction,
    params: &LorentzParams,
    variant: DoubleStarVariant,
    ell: f64,
) -> Result<f64> {
    if !fstar.is_non_increasing() {
        return Err(Error::Parameter("norm_doublestar expects a non-increasing rearrangement".into()));
    }
    let q = params.q;
    let pc = params.p_conj()?;
    let w = -q / pc; // weight exponent of t (additional to dt/t)
    let support = fstar.support_measure();
    if support == 0.0 {
        return Ok(0.0);
    }
    // Breakpoints and cumulative sums of f* over its support.
    let mut edges = vec![0.0];
    let mut cums = vec![0.0];
    let mut t = 0.0;
    let mut c = 0.0;
    for &(m, v) in &fstar.pieces {
        if v <= 0.0 {
            break;
        }
        t += m;
        c += m * v;
        edges.push(t);
        cums.push(c);
    }
    let total = c;
    let cum_at = |x: f64| -> f64 {
        if x >= support {
            return total;
        }
        let i = edges.partition_point(|e| *e <= x).saturating_sub(1);
        cums[i] + (x - edges[i]) * fstar.pieces[i].1
    };

    match variant {
        DoubleStarVariant::Forward => {
            let hi = ell.min(support);
            let g = |x: f64| {
                if !x.is_finite() {
                    return 0.0;
                }
                let c = cum_at(x);
                if c == 0.0 {
                    return 0.0;
                }
                (q * c.ln() + w * x.ln()).exp()
            };
            // near 0 the integrand behaves like t^{q + w - 1} dt
            let gamma0 = q + w - 1.0;
            if gamma0 <= -1.0 {
                return Err(Error::Divergence("averaged quasi-norm diverges near 0".into()));
            }
            let ibps: Vec<f64> = edges.iter().copied().filter(|e| *e > 0.0 && *e < hi).collect();
            let spec = Integrand {
                f: &g,
                breakpoints: &ibps,
                gamma_lo: if gamma0 < 0.0 { Some(gamma0) } else { None },
                gamma_hi: None,
            };
            let mut acc = integrate(&spec, 0.0, hi, Measure::Haar, &QuadOpts::default())?.value;
            // constant-cumulative tail (support, ell): ∫ total^q t^{w-1} dt
            if ell > support {
                if w >= 0.0 && ell.is_infinite() {
                    return Err(Error::Divergence("averaged quasi-norm diverges at infinity".into()));
                }
                let tail = if ell.is_infinite() {
                    -total.powf(q) * support.powf(w) / w
                } else {
                    total.powf(q) * (ell.powf(w) - support.powf(w)) / w
                };
                acc += tail;
            }
            Ok(acc.powf(1.0 / q))
        }
        DoubleStarVariant::Dual => {
            // G(t) = total - F(t) vanishes beyond the support
            let hi = ell.min(support);
            let g = |x: f64| {
                if !x.is_finite() {
                    return 0.0;
                }
                let tail = total - cum_at(x);
                if tail <= 0.0 {
                    return 0.0;
                }
                (q * tail.ln() + w * x.ln()).exp()
            };
            // near 0: G -> total, integrand ~ t^{w-1}
            if w <= 0.0 {
                return Err(Error::Divergence(
                    "dual averaged quasi-norm needs -q/p' > 0 (that is, 0 < p < 1)".into(),
                ));
            }
            let ibps: Vec<f64> = edges.iter().copied().filter(|e| *e > 0.0 && *e < hi).collect();
            let spec = Integrand { f: &g, breakpoints: &ibps, gamma_lo: Some(w - 1.0), gamma_hi: None };
            let acc = integrate(&spec, 0.0, hi, Measure::Haar, &QuadOpts::default())?.value;
            Ok(acc.powf(1.0 / q))
        }
    }
}

/// Which two-sided comparison to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CompareKind {
    /// plain vs forward-averaged norm on (0, ∞), p > 1
    Eq43,
    /// target-refined vs forward-averaged norm on (0, ell), p > 1
    Eq44,
    /// plain vs dual-averaged norm, 0 < p < 1
    Eq45,
}

impl CompareKind {
    pub fn case_id(&self) -> &'static str {
        match self {
            CompareKind::Eq43 => "LZ1",
            CompareKind::Eq44 => "LZ2",
            CompareKind::Eq45 => "LZ3",
        }
    }
}

/// Check the two-sided comparison for `f` (rearranged internally). Returns
/// one report per bound, or a single EQ report when the two constants
/// coincide (q = 1).
pub fn compare(f: &StepFunction, params: &LorentzParams, which: CompareKind, tol: f64) -> Result<Vec<VerificationReport>> {
    let fstar = rearrange(f);
    let (p, q) = (params.p, params.q);
    let (star, dstar, c_low, c_high) = match which {
        CompareKind::Eq43 => {
            if !(p > 1.0) {
                return Err(Error::Parameter(format!("this comparison requires p > 1, got p = {p}")));
            }
            let free = LorentzParams { ell: f64::INFINITY, ..*params };
            let star = norm_star(&fstar, &free, false)?;
            let dstar = norm_doublestar(&fstar, &free, DoubleStarVariant::Forward, f64::INFINITY)?;
            let pc = params.p_conj()?;
            (star, dstar, pc.powf(1.0 / q), pc)
        }
        CompareKind::Eq44 => {
            // at ell = inf the target degenerates and this is the plain path
            if !(p > 1.0) {
                return Err(Error::Parameter(format!("this comparison requires p > 1, got p = {p}")));
            }
            let star = norm_star(&fstar, params, true)?;
            let dstar = norm_doublestar(&fstar, params, DoubleStarVariant::Forward, params.ell)?;
            let pc = params.p_conj()?;
            (star, dstar, pc.powf(1.0 / q), pc)
        }
        CompareKind::Eq45 => {
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::Parameter(format!("the dual comparison requires 0 < p < 1, got p = {p}")));
            }
            let free = LorentzParams { ell: f64::INFINITY, ..*params };
            let star = norm_star(&fstar, &free, false)?;
            let dstar = norm_doublestar(&fstar, &free, DoubleStarVariant::Dual, f64::INFINITY)?;
            let pc = params.p_conj()?; // negative
            let low = (q * beta(q, -q / pc)?).powf(1.0 / q);
            (star, dstar, low, -pc)
        }
    };

    let rp = |dir: Direction, c: f64| {
        let params_echo = ReportParams {
            p,
            q: Some(q),
            alpha: None,
            beta: None,
            a: None,
            ell: crate::report::fmt_ell(params.ell),
            function: fmt_step(f),
        };
        VerificationReport::from_sides(which.case_id(), params_echo, dir, dstar, star, c, tol, 0.0)
    };

    // direction of the sandwich flips at q = 1
    let reports = if (c_low - c_high).abs() <= 1e-12 * c_high.abs() {
        vec![rp(Direction::Eq, c_high)]
    } else if q > 1.0 {
        vec![rp(Direction::Geq, c_low), rp(Direction::Leq, c_high)]
    } else {
        vec![rp(Direction::Leq, c_low), rp(Direction::Geq, c_high)]
    };
    Ok(reports)
}

/// Parse the step-function literal `step:[m1:v1;m2:v2;...]`; `m = inf` is
/// allowed on a zero-value tail piece.
pub fn parse_step(spec: &str) -> Result<StepFunction> {
    let rest = spec
        .strip_prefix("step:")
        .ok_or_else(|| Error::Parse(format!("step literal must start with 'step:', got '{spec}'")))?;
    let rest = rest.trim();
    if !(rest.starts_with('[') && rest.ends_with(']')) {
        return Err(Error::Parse("step literal expects [m:v;...]".into()));
    }
    let mut pieces = Vec::new();
    for part in rest[1..rest.len() - 1].split(';') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (m, v) = part
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("step piece '{part}' must be measure:value")))?;
        let parse = |s: &str| -> Result<f64> {
            match s.trim() {
                "inf" => Ok(f64::INFINITY),
                t => t.parse::<f64>().map_err(|_| Error::Parse(format!("bad number '{t}'"))),
            }
        };
        pieces.push((parse(m)?, parse(v)?));
    }
    StepFunction::new(pieces)
}

/// Canonical literal form; `parse_step` round-trips it.
pub fn fmt_step(f: &StepFunction) -> String {
    let body: Vec<String> = f
        .pieces
        .iter()
        .map(|(m, v)| {
            let ms = if m.is_infinite() { "inf".into() } else { format!("{m}") };
            format!("{ms}:{v}")
        })
        .collect();
    format!("step:[{}]", body.join(";"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn step(pieces: &[(f64, f64)]) -> StepFunction {
        StepFunction::new(pieces.to_vec()).unwrap()
    }

    fn chi01() -> StepFunction {
        step(&[(1.0, 1.0), (f64::INFINITY, 0.0)])
    }

    #[test]
    fn rearrange_sorts_and_preserves_level_sets() {
        let f = step(&[(2.0, 1.0), (1.0, 3.0)]);
        let fs = rearrange(&f);
        assert_eq!(fs.pieces(), &[(1.0, 3.0), (2.0, 1.0)]);
        for lam in [0.0, 0.5, 1.0, 2.0, 3.5] {
            assert_eq!(f.level_measure(lam), fs.level_measure(lam), "lambda = {lam}");
        }
        // idempotence
        assert_eq!(rearrange(&fs), fs);
        // equimeasurability of the p-th moment: 9 + 2 = 11 both ways
        let moment = |g: &StepFunction| -> f64 { g.pieces().iter().map(|(m, v)| m * v * v).sum() };
        assert_eq!(moment(&f), moment(&fs));
        assert_eq!(moment(&f), 11.0);
    }

    #[test]
    fn norm_star_reference_values() {
        let p22 = LorentzParams::new(2.0, 2.0, f64::INFINITY).unwrap();
        assert!((norm_star(&chi01(), &p22, false).unwrap() - 1.0).abs() < 1e-14);
        let p21 = LorentzParams::new(2.0, 1.0, f64::INFINITY).unwrap();
        assert!((norm_star(&chi01(), &p21, false).unwrap() - 2.0).abs() < 1e-14);
        let p22l = LorentzParams::new(2.0, 2.0, 1.0).unwrap();
        let v = norm_star(&chi01(), &p22l, true).unwrap();
        assert!((v - 0.5f64.sqrt()).abs() < 1e-14, "got {v}");
    }

    #[test]
    fn norm_star_divergence() {
        let bad = step(&[(f64::INFINITY, 0.0)]);
        assert_eq!(norm_star(&bad, &LorentzParams::new(2.0, 2.0, f64::INFINITY).unwrap(), false).unwrap(), 0.0);
        let r = StepFunction::new(vec![(f64::INFINITY, 1.0)]);
        assert!(r.is_err());
    }

    #[test]
    fn norm_doublestar_reference_values() {
        let p22 = LorentzParams::new(2.0, 2.0, f64::INFINITY).unwrap();
        let v = norm_doublestar(&chi01(), &p22, DoubleStarVariant::Forward, f64::INFINITY).unwrap();
        assert!((v - 2f64.sqrt()).abs() < 1e-10, "got {v}");
        // dual: p = 1/2, q = 1 -> 1/2
        let ph = LorentzParams::new(0.5, 1.0, f64::INFINITY).unwrap();
        let v = norm_doublestar(&chi01(), &ph, DoubleStarVariant::Dual, f64::INFINITY).unwrap();
        assert!((v - 0.5).abs() < 1e-10, "got {v}");
        // zero function
        let z = step(&[(1.0, 0.0)]);
        assert_eq!(norm_doublestar(&z, &p22, DoubleStarVariant::Forward, f64::INFINITY).unwrap(), 0.0);
    }

    #[test]
    fn norm_depends_only_on_rearrangement() {
        let f = step(&[(0.5, 1.0), (1.0, 3.0), (2.0, 0.5)]);
        let fs = rearrange(&f);
        let params = LorentzParams::new(2.0, 1.5, f64::INFINITY).unwrap();
        let a = norm_star(&fs, &params, false).unwrap();
        let b = norm_star(&rearrange(&fs), &params, false).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn scaling_of_all_norms() {
        let f = rearrange(&step(&[(1.0, 2.0), (0.5, 1.0)]));
        let params = LorentzParams::new(2.0, 2.0, f64::INFINITY).unwrap();
        let lam = 3.0;
        let a = norm_star(&f, &params, false).unwrap();
        let b = norm_star(&f.scale(lam).unwrap(), &params, false).unwrap();
        assert!((b - lam * a).abs() <= 1e-10 * b.abs());
        let a = norm_doublestar(&f, &params, DoubleStarVariant::Forward, f64::INFINITY).unwrap();
        let b = norm_doublestar(&f.scale(lam).unwrap(), &params, DoubleStarVariant::Forward, f64::INFINITY).unwrap();
        assert!((b - lam * a).abs() <= 1e-10 * b.abs());
    }

    #[test]
    fn eq43_lower_bound_is_tight_for_indicator() {
        let params = LorentzParams::new(2.0, 2.0, f64::INFINITY).unwrap();
        let reports = compare(&chi01(), &params, CompareKind::Eq43, 1e-8).unwrap();
        assert_eq!(reports.len(), 2);
        // lower bound: sqrt(2) * 1 = dstar exactly
        let low = &reports[0];
        assert_eq!(low.direction, Direction::Geq);
        assert!(low.pass, "margin {}", low.margin);
        assert!(low.margin.abs() < 1e-9, "lower bound should be tight, margin {}", low.margin);
        let high = &reports[1];
        assert!(high.pass);
    }

    #[test]
    fn eq44_sandwich_for_indicator() {
        let params = LorentzParams::new(2.0, 2.0, 1.0).unwrap();
        let reports = compare(&chi01(), &params, CompareKind::Eq44, 1e-8).unwrap();
        for r in &reports {
            assert!(r.pass, "{:?} margin {}", r.direction, r.margin);
        }
        // I** = 1, I* = 1/sqrt(2): lower bound touches
        assert!((reports[0].lhs - 1.0).abs() < 1e-10);
        assert!((reports[0].rhs - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn eq45_forced_equality_at_q1() {
        let params = LorentzParams::new(0.5, 1.0, f64::INFINITY).unwrap();
        let reports = compare(&chi01(), &params, CompareKind::Eq45, 1e-8).unwrap();
        assert_eq!(reports.len(), 1);
        assert_eq!(reports[0].direction, Direction::Eq);
        assert!(reports[0].pass, "margin {}", reports[0].margin);
        assert!((reports[0].lhs - 0.5).abs() < 1e-10);
        assert!((reports[0].rhs - 0.5).abs() < 1e-12);
        assert!((reports[0].constant - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reversed_sandwich_below_q1() {
        let params = LorentzParams::new(2.0, 0.5, f64::INFINITY).unwrap();
        let f = rearrange(&step(&[(1.0, 2.0), (2.0, 1.0)]));
        let reports = compare(&f, &params, CompareKind::Eq43, 1e-8).unwrap();
        assert_eq!(reports[0].direction, Direction::Leq);
        assert_eq!(reports[1].direction, Direction::Geq);
        for r in &reports {
            assert!(r.pass, "{:?} margin {}", r.direction, r.margin);
        }
    }

    #[test]
    fn finite_ell_path_agrees_with_free_path_at_infinity() {
        // the finite-interval comparison at ell = inf is the plain one
        let f = rearrange(&step(&[(0.7, 1.5), (1.3, 0.4)]));
        let params = LorentzParams::new(2.5, 1.7, f64::INFINITY).unwrap();
        let star_free = norm_star(&f, &params, false).unwrap();
        let star_tgt = norm_star(&f, &params, true).unwrap();
        assert!((star_free - star_tgt).abs() <= 1e-8 * star_free.abs());
    }

    #[test]
    fn step_literal_round_trip() {
        let f = parse_step("step:[1:3;2:1;inf:0]").unwrap();
        let printed = fmt_step(&f);
        let g = parse_step(&printed).unwrap();
        assert_eq!(f, g);
        assert!(parse_step("step:[1:-2]").is_err());
        assert!(parse_step("step:[inf:1]").is_err());
        assert!(parse_step("nope").is_err());
    }

    #[test]
    fn from_func_conversion() {
        let f = FuncExpr::indicator(1.0, 2.0, 2.0).unwrap();
        let s = StepFunction::from_func(&f).unwrap();
        // rearranged: value 2 on measure 1
        let fs = rearrange(&s);
        assert_eq!(fs.pieces()[0], (1.0, 2.0));
        assert!(StepFunction::from_func(&FuncExpr::power(1.0, 1.0).unwrap()).is_err());
    }
}
