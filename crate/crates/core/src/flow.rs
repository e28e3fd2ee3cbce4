//! Periodic shear profiles `v(y)` and the canonical form of the cell problem.
//!
//! A flow is a truncated Fourier series
//!
//! ```text
//! v(y) = offset + sum_k ( cos[k-1] * cos(2 pi k y) + sin[k-1] * sin(2 pi k y) )
//! ```
//!
//! so `v`, `v'` and `v''` are evaluated exactly. [`normalize`] reduces any momentum
//! `p = (gamma, mu)` with `gamma != 0` to the form `gamma > 0`, `mu >= 0`, `max v = 0`
//! using three identities of the curvature cell problem:
//!
//! * `H_d((-gamma, mu); -v) = H_d((gamma, mu); v)` (same corrector `w`),
//! * `H_d((gamma, -mu); v(-.)) = H_d((gamma, mu); v)` (corrector `w(-y)`),
//! * `H_d(p; v + c) = H_d(p; v) + gamma c`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const TWO_PI: f64 = 2.0 * PI;

/// Number of samples used by the dense extremum scan.
pub const SCAN_POINTS: usize = 4096;
/// Membership tolerance `|v(x) - max v|` for the maximum set.
pub const MEMBERSHIP_TOL: f64 = 1e-10;
/// Relative tolerance under which two maximum curvatures count as tied.
pub const DISTINCT_REL_TOL: f64 = 1e-6;
/// A maximum with `-v'' <= DEGENERACY_REL_TOL * (bound on |v''|)` is degenerate.
pub const DEGENERACY_REL_TOL: f64 = 1e-8;

/// Names accepted by [`FlowSpec::preset`].
pub const PRESETS: &[&str] = &[
    "single-well",
    "two-max-distinct",
    "two-max-tied",
    "cosine",
    "two-mode",
    "gentle-well",
    "constant",
];

/// Coefficients of a truncated Fourier series, as read from a config file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowSpec {
    #[serde(default)]
    pub cos: Vec<f64>,
    #[serde(default)]
    pub sin: Vec<f64>,
    #[serde(default)]
    pub offset: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
}

impl FlowSpec {
    pub fn new(cos: Vec<f64>, sin: Vec<f64>, offset: f64) -> Self {
        FlowSpec {
            cos,
            sin,
            offset,
            preset: None,
        }
    }

    pub fn constant(offset: f64) -> Self {
        FlowSpec::new(Vec::new(), Vec::new(), offset)
    }

    /// Named flows used by the examples and the acceptance suite.
    ///
    /// * `single-well`: `cos 2 pi y - 1`
    /// * `two-max-distinct`: `-sin^2(2 pi y) (1 + cos(2 pi y) / 2)`, maxima at 0 and 1/2
    ///   with `-v''` equal to `12 pi^2` and `4 pi^2`
    /// * `two-max-tied`: `-sin^2(2 pi y)`, both maxima with `-v'' = 8 pi^2`
    /// * `cosine`: `cos 2 pi y`
    /// * `two-mode`: `cos 2 pi y + cos(4 pi y) / 2`
    /// * `gentle-well`: `(cos 2 pi y - 1) / 4`
    /// * `constant`: `0`
    pub fn preset(name: &str) -> Result<FlowSpec> {
        let mut spec: FlowSpec = match name {
            "single-well" => FlowSpec::new(vec![1.0], vec![], -1.0),
            "two-max-distinct" => FlowSpec::new(vec![-0.125, 0.5, 0.125], vec![], -0.5),
            "two-max-tied" => FlowSpec::new(vec![0.0, 0.5], vec![], -0.5),
            "cosine" => FlowSpec::new(vec![1.0], vec![], 0.0),
            "two-mode" => FlowSpec::new(vec![1.0, 0.5], vec![], 0.0),
            "gentle-well" => FlowSpec::new(vec![0.25], vec![], -0.25),
            "constant" => FlowSpec::constant(0.0),
            other => {
                return Err(Error::InvalidInput(format!(
                    "unknown flow preset {other:?} (known: {})",
                    PRESETS.join(", ")
                )))
            }
        };
        spec.preset = Some(name.to_string());
        Ok(spec)
    }

    /// Parses a standalone flow file with top-level `cos`, `sin`, `offset` or `preset` keys.
    pub fn from_toml_str(text: &str) -> Result<FlowSpec> {
        let spec: FlowSpec =
            toml::from_str(text).map_err(|e| Error::InvalidInput(format!("flow spec: {e}")))?;
        spec.resolve()
    }

    /// Expands a preset into coefficients and checks that every coefficient is finite.
    pub fn resolve(&self) -> Result<FlowSpec> {
        let spec = match &self.preset {
            Some(name) => {
                let expanded = FlowSpec::preset(name)?;
                let bare = self.cos.is_empty() && self.sin.is_empty() && self.offset == 0.0;
                let same = self.cos == expanded.cos && self.sin == expanded.sin && self.offset == expanded.offset;
                if !bare && !same {
                    return Err(Error::InvalidInput(
                        "flow spec gives both a preset and explicit coefficients".into(),
                    ));
                }
                expanded
            }
            None => self.clone(),
        };
        let finite = spec.cos.iter().chain(&spec.sin).all(|c| c.is_finite()) && spec.offset.is_finite();
        if !finite {
            return Err(Error::InvalidInput("flow coefficients must be finite".into()));
        }
        Ok(spec)
    }

    pub fn modes(&self) -> usize {
        self.cos.len().max(self.sin.len())
    }

    pub fn is_constant(&self) -> bool {
        self.cos.iter().chain(&self.sin).all(|&c| c == 0.0)
    }

    /// `-v`
    pub fn negated(&self) -> FlowSpec {
        FlowSpec::new(
            self.cos.iter().map(|c| -c).collect(),
            self.sin.iter().map(|c| -c).collect(),
            -self.offset,
        )
    }

    /// `v(-y)`
    pub fn reflected(&self) -> FlowSpec {
        FlowSpec::new(self.cos.clone(), self.sin.iter().map(|c| -c).collect(), self.offset)
    }

    /// `v + c`
    pub fn shifted(&self, c: f64) -> FlowSpec {
        FlowSpec::new(self.cos.clone(), self.sin.clone(), self.offset + c)
    }

    /// `s v`
    pub fn scaled(&self, s: f64) -> FlowSpec {
        FlowSpec::new(
            self.cos.iter().map(|c| s * c).collect(),
            self.sin.iter().map(|c| s * c).collect(),
            s * self.offset,
        )
    }

    /// `(v, v', v'')` at `y`.
    pub fn eval(&self, y: f64) -> (f64, f64, f64) {
        let (s1, c1) = (TWO_PI * y).sin_cos();
        let (mut ck, mut sk) = (c1, s1);
        let (mut v, mut d1, mut d2) = (self.offset, 0.0, 0.0);
        for k in 1..=self.modes() {
            let a = self.cos.get(k - 1).copied().unwrap_or(0.0);
            let b = self.sin.get(k - 1).copied().unwrap_or(0.0);
            let w = TWO_PI * k as f64;
            v += a * ck + b * sk;
            d1 += w * (b * ck - a * sk);
            d2 -= w * w * (a * ck + b * sk);
            let next_c = ck * c1 - sk * s1;
            sk = sk * c1 + ck * s1;
            ck = next_c;
        }
        (v, d1, d2)
    }

    /// Upper bound on `|v''|`.
    pub fn curvature_bound(&self) -> f64 {
        (1..=self.modes())
            .map(|k| {
                let a = self.cos.get(k - 1).copied().unwrap_or(0.0);
                let b = self.sin.get(k - 1).copied().unwrap_or(0.0);
                (TWO_PI * k as f64).powi(2) * (a.abs() + b.abs())
            })
            .sum()
    }
}

/// A flow together with its mean and extreme values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowProfile {
    pub spec: FlowSpec,
    pub mean: f64,
    pub max_value: f64,
    pub min_value: f64,
    pub argmax: f64,
    pub argmin: f64,
    pub constant: bool,
}

/// Builds the evaluator for a spec. An all-zero spec is accepted and flagged constant.
pub fn build_flow(spec: &FlowSpec) -> Result<FlowProfile> {
    let spec = spec.resolve()?;
    if spec.is_constant() {
        return Ok(FlowProfile {
            mean: spec.offset,
            max_value: spec.offset,
            min_value: spec.offset,
            argmax: 0.0,
            argmin: 0.0,
            constant: true,
            spec,
        });
    }
    let maxima = refined_extrema(&spec, 1.0);
    let minima = refined_extrema(&spec, -1.0);
    let (argmax, max_value) = maxima
        .iter()
        .copied()
        .fold((0.0, f64::NEG_INFINITY), |acc, (x, v)| if v > acc.1 { (x, v) } else { acc });
    let (argmin, min_value) = minima
        .iter()
        .copied()
        .fold((0.0, f64::INFINITY), |acc, (x, v)| if v < acc.1 { (x, v) } else { acc });
    Ok(FlowProfile {
        mean: spec.offset,
        max_value,
        min_value,
        argmax,
        argmin,
        constant: false,
        spec,
    })
}

impl FlowProfile {
    pub fn value(&self, y: f64) -> f64 {
        self.spec.eval(y).0
    }

    pub fn derivative(&self, y: f64) -> f64 {
        self.spec.eval(y).1
    }

    pub fn second_derivative(&self, y: f64) -> f64 {
        self.spec.eval(y).2
    }

    pub fn eval(&self, y: f64) -> (f64, f64, f64) {
        self.spec.eval(y)
    }

    /// `v(j / n)` for `j = 0..n`.
    pub fn sample(&self, n: usize) -> Vec<f64> {
        (0..n).map(|j| self.value(j as f64 / n as f64)).collect()
    }

    /// `max v - min v`
    pub fn oscillation(&self) -> f64 {
        self.max_value - self.min_value
    }
}

/// Local extrema of `sign * v` from the dense scan, refined on `v' = 0`.
/// Returns `(x, v(x))` pairs with `x` in `[0, 1)`.
fn refined_extrema(spec: &FlowSpec, sign: f64) -> Vec<(f64, f64)> {
    let n = SCAN_POINTS;
    let h = 1.0 / n as f64;
    let samples: Vec<f64> = (0..n).map(|j| sign * spec.eval(j as f64 * h).0).collect();
    let mut out: Vec<(f64, f64)> = Vec::new();
    for j in 0..n {
        let prev = samples[(j + n - 1) % n];
        let next = samples[(j + 1) % n];
        if samples[j] >= prev && samples[j] >= next {
            let y = j as f64 * h;
            let x = refine_critical_point(spec, y - h, y + h).rem_euclid(1.0);
            let x = if x >= 1.0 { 0.0 } else { x };
            let value = spec.eval(x).0;
            if !out.iter().any(|&(z, _)| periodic_distance(z, x) < 1e-9) {
                out.push((x, value));
            }
        }
    }
    out
}

/// Safeguarded Newton iteration for a root of `v'` on `[lo, hi]`.
fn refine_critical_point(spec: &FlowSpec, lo: f64, hi: f64) -> f64 {
    let (mut a, mut b) = (lo, hi);
    let fa = spec.eval(a).1;
    let fb = spec.eval(b).1;
    if fa == 0.0 {
        return a;
    }
    if fb == 0.0 {
        return b;
    }
    if fa.signum() == fb.signum() {
        // No sign change: keep the scan point.
        return 0.5 * (lo + hi);
    }
    let mut y = 0.5 * (a + b);
    for _ in 0..200 {
        let (_, d1, d2) = spec.eval(y);
        if d1 == 0.0 {
            break;
        }
        if d1.signum() == fa.signum() {
            a = y;
        } else {
            b = y;
        }
        let newton = if d2 != 0.0 { y - d1 / d2 } else { f64::NAN };
        let next = if newton > a && newton < b { newton } else { 0.5 * (a + b) };
        if (next - y).abs() < 1e-15 || (b - a) < 1e-15 {
            y = next;
            break;
        }
        y = next;
    }
    y
}

pub fn periodic_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

/// One global maximum point of the flow.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaxPoint {
    pub x: f64,
    /// `-v''(x)`
    pub neg_curvature: f64,
}

/// The set `M0 = { x in [0, 1) : v(x) = max v }` with the flags needed by selection.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaximaSet {
    pub points: Vec<MaxPoint>,
    pub is_finite: bool,
    pub curvatures_distinct: bool,
    /// Smallest pairwise relative gap between curvatures; `None` with fewer than two points.
    pub distinctness_margin: Option<f64>,
    /// Some maximum has `v'' = 0` within tolerance.
    pub degenerate: bool,
}

impl MaximaSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Finds all global maxima in `[0, 1)`. `tol` is the membership tolerance on
/// `|v - max v|`; [`MEMBERSHIP_TOL`] is the usual choice.
///
/// A non-constant trigonometric polynomial is analytic, so its maximum set is
/// always finite; only a constant flow reports `is_finite = false`.
pub fn locate_maxima(flow: &FlowProfile, tol: f64) -> MaximaSet {
    if flow.constant {
        return MaximaSet {
            points: Vec::new(),
            is_finite: false,
            curvatures_distinct: false,
            distinctness_margin: None,
            degenerate: true,
        };
    }
    let bound = flow.spec.curvature_bound();
    let mut points: Vec<MaxPoint> = refined_extrema(&flow.spec, 1.0)
        .into_iter()
        .filter(|&(_, v)| (v - flow.max_value).abs() < tol)
        .map(|(x, _)| MaxPoint {
            x,
            neg_curvature: -flow.second_derivative(x),
        })
        .collect();
    points.sort_by(|a, b| a.x.total_cmp(&b.x));
    let degenerate = points
        .iter()
        .any(|p| p.neg_curvature <= DEGENERACY_REL_TOL * bound);
    let mut margin: Option<f64> = None;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            let scale = a.neg_curvature.abs().max(b.neg_curvature.abs());
            let rel = if scale > 0.0 {
                (a.neg_curvature - b.neg_curvature).abs() / scale
            } else {
                0.0
            };
            margin = Some(margin.map_or(rel, |m: f64| m.min(rel)));
        }
    }
    MaximaSet {
        curvatures_distinct: margin.map_or(true, |m| m > DISTINCT_REL_TOL),
        distinctness_margin: margin,
        is_finite: true,
        degenerate,
        points,
    }
}

/// The momentum `p = (gamma, mu)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Momentum {
    pub gamma: f64,
    pub mu: f64,
}

impl Momentum {
    pub fn new(gamma: f64, mu: f64) -> Self {
        Momentum { gamma, mu }
    }

    pub fn norm(&self) -> f64 {
        self.gamma.hypot(self.mu)
    }
}

/// Canonical cell problem: `gamma > 0`, `mu >= 0`, `max v = 0`, plus the
/// bookkeeping needed to map results back to the original momentum and flow.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalizedProblem {
    pub original: Momentum,
    pub original_flow: FlowProfile,
    pub gamma: f64,
    pub mu: f64,
    /// Effective flow, shifted so that its maximum is zero.
    pub flow: FlowProfile,
    /// `(gamma, v) -> (-gamma, -v)` was applied.
    pub negated: bool,
    /// `(mu, v(y)) -> (-mu, v(-y))` was applied.
    pub reflected: bool,
    /// Constant removed from the (negated, reflected) flow; `H = H_norm + gamma * shift`.
    pub shift: f64,
}

/// Reduces `(flow, p)` to canonical form. `gamma = 0` is rejected.
pub fn normalize(flow: &FlowProfile, p: Momentum) -> Result<NormalizedProblem> {
    if !(p.gamma.is_finite() && p.mu.is_finite()) {
        return Err(Error::InvalidInput("momentum must be finite".into()));
    }
    if p.gamma == 0.0 {
        return Err(Error::DegenerateDirection);
    }
    let negated = p.gamma < 0.0;
    let reflected = p.mu < 0.0;
    let mut spec = flow.spec.clone();
    let mut top = flow.max_value;
    if negated {
        spec = spec.negated();
        top = -flow.min_value;
    }
    if reflected {
        spec = spec.reflected();
    }
    let shift = if flow.constant { spec.offset } else { top };
    let spec = spec.shifted(-shift);
    Ok(NormalizedProblem {
        original: p,
        original_flow: flow.clone(),
        gamma: p.gamma.abs(),
        mu: p.mu.abs(),
        flow: build_flow(&spec)?,
        negated,
        reflected,
        shift,
    })
}

impl NormalizedProblem {
    /// Prescribed mean of `phi = (mu + w') / gamma`.
    pub fn slope_ratio(&self) -> f64 {
        self.mu / self.gamma
    }

    /// Effective Hamiltonian of the original problem from the normalized one.
    pub fn h_to_original(&self, h_normalized: f64) -> f64 {
        h_normalized + self.gamma * self.shift
    }

    /// Effective Hamiltonian of the original problem from the eigenvalue `E = H_norm / gamma`.
    pub fn eigenvalue_to_h(&self, e: f64) -> f64 {
        self.h_to_original(self.gamma * e)
    }

    /// A point of the normalized period mapped back to the original coordinates.
    pub fn point_to_original(&self, x: f64) -> f64 {
        if self.reflected {
            let y = (-x).rem_euclid(1.0);
            if y >= 1.0 {
                0.0
            } else {
                y
            }
        } else {
            x
        }
    }

    /// Grid values of `phi` on `j / n` mapped back to the original problem.
    pub fn phi_to_original(&self, phi: &[f64]) -> Vec<f64> {
        let mut out = reflect_grid(phi, self.reflected);
        if self.reflected {
            out.iter_mut().for_each(|x| *x = -*x);
        }
        if self.negated {
            out.iter_mut().for_each(|x| *x = -*x);
        }
        out
    }

    /// Grid values of the corrector `w` on `j / n` mapped back to the original problem.
    pub fn profile_to_original(&self, w: &[f64]) -> Vec<f64> {
        reflect_grid(w, self.reflected)
    }
}

/// `u(-x_j)` on the uniform grid `x_j = j / n`.
fn reflect_grid(u: &[f64], reflect: bool) -> Vec<f64> {
    let n = u.len();
    if !reflect || n == 0 {
        return u.to_vec();
    }
    (0..n).map(|j| u[(n - j) % n]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile(name: &str) -> FlowProfile {
        build_flow(&FlowSpec::preset(name).unwrap()).unwrap()
    }

    #[test]
    fn single_well_statistics() {
        let flow = profile("single-well");
        assert_eq!(flow.mean, -1.0);
        assert!(flow.max_value.abs() < 1e-14);
        assert!((flow.min_value + 2.0).abs() < 1e-14);
        assert!(flow.argmax.abs() < 1e-12 || (1.0 - flow.argmax) < 1e-12);
    }

    #[test]
    fn zero_spec_is_constant() {
        let flow = build_flow(&FlowSpec::constant(0.0)).unwrap();
        assert!(flow.constant);
        assert_eq!(flow.mean, 0.0);
        assert_eq!(flow.max_value, 0.0);
        let m = locate_maxima(&flow, MEMBERSHIP_TOL);
        assert!(!m.is_finite);
    }

    #[test]
    fn two_max_expansion_matches_product_form() {
        let flow = profile("two-max-distinct");
        for j in 0..200 {
            let y = j as f64 / 200.0 + 0.0013;
            let s = (TWO_PI * y).sin();
            let exact = -s * s * (1.0 + 0.5 * (TWO_PI * y).cos());
            assert!((flow.value(y) - exact).abs() < 1e-14);
        }
        assert!(flow.max_value.abs() < 1e-14);
    }

    #[test]
    fn maxima_of_single_well() {
        let m = locate_maxima(&profile("single-well"), MEMBERSHIP_TOL);
        assert_eq!(m.len(), 1);
        assert!(periodic_distance(m.points[0].x, 0.0) < 1e-12);
        assert!((m.points[0].neg_curvature - 4.0 * PI * PI).abs() < 1e-9);
        assert!(m.curvatures_distinct);
        assert!(!m.degenerate);
    }

    #[test]
    fn maxima_of_two_max_distinct() {
        let m = locate_maxima(&profile("two-max-distinct"), MEMBERSHIP_TOL);
        assert_eq!(m.len(), 2);
        assert!(periodic_distance(m.points[0].x, 0.0) < 1e-12);
        assert!((m.points[1].x - 0.5).abs() < 1e-12);
        assert!((m.points[0].neg_curvature - 12.0 * PI * PI).abs() < 1e-8);
        assert!((m.points[1].neg_curvature - 4.0 * PI * PI).abs() < 1e-8);
        assert!(m.curvatures_distinct);
    }

    #[test]
    fn tied_curvatures_are_flagged() {
        let m = locate_maxima(&profile("two-max-tied"), MEMBERSHIP_TOL);
        assert_eq!(m.len(), 2);
        assert!((m.points[0].neg_curvature - 8.0 * PI * PI).abs() < 1e-8);
        assert!(!m.curvatures_distinct);
    }

    #[test]
    fn quartic_maximum_is_degenerate() {
        // -sin^4(pi y) = -(3 - 4 cos 2 pi y + cos 4 pi y) / 8
        let spec = FlowSpec::new(vec![0.5, -0.125], vec![], -0.375);
        let m = locate_maxima(&build_flow(&spec).unwrap(), MEMBERSHIP_TOL);
        assert!(m.degenerate);
    }

    #[test]
    fn preset_and_coefficients_conflict() {
        let spec = FlowSpec {
            cos: vec![2.0],
            preset: Some("cosine".into()),
            ..Default::default()
        };
        assert!(spec.resolve().is_err());
        assert!(FlowSpec::preset("nope").is_err());
    }

    #[test]
    fn parse_flow_file() {
        let spec = FlowSpec::from_toml_str("cos = [1.0, 0.5]\nsin = [0.25]\noffset = -1.0\n").unwrap();
        assert_eq!(spec.cos, vec![1.0, 0.5]);
        assert_eq!(spec.sin, vec![0.25]);
        let spec = FlowSpec::from_toml_str("preset = \"single-well\"").unwrap();
        assert_eq!(spec.offset, -1.0);
        assert!(FlowSpec::from_toml_str("cos = [1.0]\nbogus = 3").is_err());
    }

    #[test]
    fn normalize_canonical_is_identity() {
        let flow = profile("single-well");
        let np = normalize(&flow, Momentum::new(1.0, 0.3)).unwrap();
        assert!(!np.negated && !np.reflected);
        assert!(np.shift.abs() < 1e-14);
        assert_eq!(np.gamma, 1.0);
    }

    #[test]
    fn normalize_negative_gamma() {
        let flow = profile("single-well");
        let np = normalize(&flow, Momentum::new(-1.0, 0.3)).unwrap();
        assert!(np.negated);
        assert_eq!((np.gamma, np.mu), (1.0, 0.3));
        // -v = 1 - cos, max 2 at y = 1/2
        assert!((np.shift - 2.0).abs() < 1e-14);
        assert!(np.flow.max_value.abs() < 1e-14);
    }

    #[test]
    fn normalize_shift_identity() {
        let flow = profile("cosine");
        let np = normalize(&flow, Momentum::new(2.0, 0.3)).unwrap();
        assert!((np.shift - 1.0).abs() < 1e-14);
        assert!((np.flow.spec.offset + 1.0).abs() < 1e-14);
        assert!((np.h_to_original(5.0) - 7.0).abs() < 1e-13);
    }

    #[test]
    fn gamma_zero_rejected() {
        let flow = profile("cosine");
        assert!(matches!(
            normalize(&flow, Momentum::new(0.0, 1.0)),
            Err(Error::DegenerateDirection)
        ));
    }

    #[test]
    fn reflection_maps_grid() {
        let flow = profile("cosine");
        let np = normalize(&flow, Momentum::new(1.0, -0.5)).unwrap();
        assert!(np.reflected);
        let w = vec![0.0, 1.0, 2.0, 3.0];
        assert_eq!(np.profile_to_original(&w), vec![0.0, 3.0, 2.0, 1.0]);
        assert_eq!(np.phi_to_original(&w), vec![-0.0, -3.0, -2.0, -1.0]);
        assert!((np.point_to_original(0.25) - 0.75).abs() < 1e-15);
    }
}
