//! The verification report schema shared by the catalog, the Lorentz
//! comparisons and the CLI emitters. Field order here is the stable JSON and
//! CSV column order.

use serde::Serialize;

/// Direction of an inequality check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Direction {
    #[serde(rename = "LEQ")]
    Leq,
    #[serde(rename = "GEQ")]
    Geq,
    #[serde(rename = "EQ")]
    Eq,
}

impl Direction {
    pub fn as_str(&self) -> &'static str {
        match self {
            Direction::Leq => "LEQ",
            Direction::Geq => "GEQ",
            Direction::Eq => "EQ",
        }
    }

    pub fn flipped(&self) -> Direction {
        match self {
            Direction::Leq => Direction::Geq,
            Direction::Geq => Direction::Leq,
            Direction::Eq => Direction::Eq,
        }
    }
}

/// Parameter echo carried in every report. `ell` is a string so that the
/// extended real "inf" survives JSON round-trips.
#[derive(Clone, Debug, Serialize, Default)]
pub struct ReportParams {
    pub p: f64,
    pub q: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub a: Option<f64>,
    pub ell: String,
    pub function: String,
}

pub fn fmt_ell(ell: f64) -> String {
    if ell.is_infinite() {
        "inf".into()
    } else {
        format!("{ell}")
    }
}

/// Outcome of one inequality check.
///
/// `ratio` is lhs / (constant * rhs); `margin` is the signed relative slack
/// in the declared direction, so `pass == (margin >= -tol)`.
#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub case_id: String,
    pub params: ReportParams,
    pub direction: Direction,
    pub lhs: f64,
    pub rhs: f64,
    pub constant: f64,
    pub ratio: f64,
    pub margin: f64,
    pub pass: bool,
    pub tol: f64,
    pub quad_error: f64,
}

impl VerificationReport {
    /// Assemble a report from evaluated sides; margin convention:
    /// LEQ: (C·rhs − lhs)/scale, GEQ: (lhs − C·rhs)/scale,
    /// EQ: −|lhs − C·rhs|/scale, with scale = max(|lhs|, |C·rhs|).
    #[allow(clippy::too_many_arguments)]
    pub fn from_sides(
        case_id: &str,
        params: ReportParams,
        direction: Direction,
        lhs: f64,
        rhs: f64,
        constant: f64,
        tol: f64,
        quad_error: f64,
    ) -> Self {
        let bound = constant * rhs;
        let scale = lhs.abs().max(bound.abs()).max(1e-300);
        let margin = match direction {
            Direction::Leq => (bound - lhs) / scale,
            Direction::Geq => (lhs - bound) / scale,
            Direction::Eq => -((lhs - bound).abs()) / scale,
        };
        VerificationReport {
            case_id: case_id.to_string(),
            params,
            direction,
            lhs,
            rhs,
            constant,
            ratio: lhs / bound,
            margin,
            pass: margin >= -tol,
            tol,
            quad_error,
        }
    }
}
