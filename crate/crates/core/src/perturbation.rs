//! Weak-flow expansion `H = |p| + delta alpha1 + delta^2 alpha2 + O(delta^3)` for a flow
//! `delta V` on the n-torus, with `V = sum_k lambda_k exp(2 pi i k.x)`.
//!
//! For unit `p`, `w1` has Fourier coefficients
//! `c_k = -p.lambda_k / (4 pi^2 d (|k|^2 - (p.k)^2) + 2 pi i p.k)`, and averaging the
//! second-order equation gives `alpha2 = (1/2) int (|Dw1|^2 - (p.Dw1)^2)`, since the
//! curvature correction and `V.Dw1` average to zero for divergence-free `V`:
//!
//! `alpha2 = (1/2) sum_{k != 0} (|k|^2 - (p.k)^2) |p.lambda_k|^2 / (4 pi^2 d^2 (|k|^2 - (p.k)^2)^2 + (p.k)^2)`.
//!
//! [`Alpha2Form::Literal`] keeps `|k|^2` in the numerator instead, i.e. drops the
//! `(p.Dw1)^2` term; it is offered only for comparison.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cell::{flame_speed, SolverOptions};
use crate::error::{Error, Result};
use crate::flow::{build_flow, FlowSpec, Momentum};

/// Default truncation `max_i |k_i| <= K`.
pub const DEFAULT_TRUNCATION: i64 = 32;

/// Fourier data of a real vector field on the n-torus.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VectorFieldFourier {
    pub dimension: usize,
    /// `lambda_k` for every stored `k`, including both `k` and `-k`.
    #[serde(serialize_with = "serialize_coefficients")]
    pub coefficients: BTreeMap<Vec<i64>, Vec<Complex64>>,
    /// Largest `|k . lambda_k|` over the stored modes.
    pub divergence_defect: f64,
}

fn serialize_coefficients<S: serde::Serializer>(
    map: &BTreeMap<Vec<i64>, Vec<Complex64>>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(map.len()))?;
    for (k, v) in map {
        let parts: Vec<[f64; 2]> = v.iter().map(|c| [c.re, c.im]).collect();
        seq.serialize_element(&(k, parts))?;
    }
    seq.end()
}

/// Tolerance on the reality and divergence conditions, relative to the largest coefficient.
const STRUCTURE_TOL: f64 = 1e-12;

fn neumaier(values: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

fn dot_k(p: &[f64], k: &[i64]) -> f64 {
    neumaier(p.iter().zip(k).map(|(a, b)| a * *b as f64))
}

fn norm2_k(k: &[i64]) -> f64 {
    k.iter().map(|x| (x * x) as f64).sum()
}

impl VectorFieldFourier {
    /// Builds a field from `(k, lambda_k)` pairs. Missing conjugate partners are filled in;
    /// inconsistent ones, duplicates and compressible modes are rejected.
    pub fn new(dimension: usize, modes: Vec<(Vec<i64>, Vec<Complex64>)>) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidInput("dimension must be at least 1".into()));
        }
        let scale = modes
            .iter()
            .flat_map(|(_, v)| v.iter().map(|c| c.norm()))
            .fold(0.0, f64::max)
            .max(1.0);
        let mut map: BTreeMap<Vec<i64>, Vec<Complex64>> = BTreeMap::new();
        for (k, lam) in modes {
            if k.len() != dimension || lam.len() != dimension {
                return Err(Error::InvalidInput(format!(
                    "mode {k:?} does not match dimension {dimension}"
                )));
            }
            if lam.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
                return Err(Error::InvalidInput(format!("non-finite coefficient at {k:?}")));
            }
            if map.insert(k.clone(), lam).is_some() {
                return Err(Error::InvalidInput(format!("mode {k:?} given twice")));
            }
        }
        let keys: Vec<Vec<i64>> = map.keys().cloned().collect();
        for k in keys {
            let minus: Vec<i64> = k.iter().map(|x| -x).collect();
            let conj: Vec<Complex64> = map[&k].iter().map(|c| c.conj()).collect();
            match map.get(&minus) {
                Some(other) => {
                    let bad = other.iter().zip(&conj).any(|(a, b)| (a - b).norm() > STRUCTURE_TOL * scale);
                    if bad {
                        return Err(Error::InvalidInput(format!(
                            "coefficients at {k:?} and {minus:?} are not complex conjugates"
                        )));
                    }
                }
                None => {
                    map.insert(minus, conj);
                }
            }
        }
        let mut defect: f64 = 0.0;
        for (k, lam) in &map {
            let div: Complex64 = k.iter().zip(lam).map(|(ki, l)| l * *ki as f64).sum();
            defect = defect.max(div.norm());
        }
        if defect > STRUCTURE_TOL * scale {
            return Err(Error::InvalidInput(format!(
                "field is not divergence-free: max |k . lambda_k| = {defect:e}"
            )));
        }
        Ok(VectorFieldFourier {
            dimension,
            coefficients: map,
            divergence_defect: defect,
        })
    }

    /// Parses lines `k1 .. kn  re(l1) im(l1) .. re(ln) im(ln)`; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut dimension: Option<usize> = None;
        let mut modes = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if tokens.len() % 3 != 0 {
                return Err(Error::Parse {
                    line: idx + 1,
                    msg: format!("expected 3n fields, found {}", tokens.len()),
                });
            }
            let n = tokens.len() / 3;
            if *dimension.get_or_insert(n) != n {
                return Err(Error::Parse {
                    line: idx + 1,
                    msg: format!("dimension {n} differs from earlier lines"),
                });
            }
            let k = tokens[..n]
                .iter()
                .map(|t| t.parse::<i64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Parse {
                    line: idx + 1,
                    msg: format!("wave vector: {e}"),
                })?;
            let nums = tokens[n..]
                .iter()
                .map(|t| t.parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Parse {
                    line: idx + 1,
                    msg: format!("coefficient: {e}"),
                })?;
            let lam = nums.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect();
            modes.push((k, lam));
        }
        let dimension = dimension.ok_or(Error::Parse {
            line: 0,
            msg: "no modes found".into(),
        })?;
        VectorFieldFourier::new(dimension, modes)
    }

    /// The 2-D shear field `(v(x2), 0)`.
    pub fn from_shear(spec: &FlowSpec) -> Result<Self> {
        let spec = spec.resolve()?;
        let zero = Complex64::new(0.0, 0.0);
        let mut modes = vec![(vec![0, 0], vec![Complex64::new(spec.offset, 0.0), zero])];
        for m in 1..=spec.modes() {
            let a = spec.cos.get(m - 1).copied().unwrap_or(0.0);
            let b = spec.sin.get(m - 1).copied().unwrap_or(0.0);
            if a != 0.0 || b != 0.0 {
                modes.push((vec![0, m as i64], vec![Complex64::new(0.5 * a, -0.5 * b), zero]));
            }
        }
        VectorFieldFourier::new(2, modes)
    }

    pub fn mean(&self) -> Vec<Complex64> {
        self.coefficients
            .get(&vec![0; self.dimension])
            .cloned()
            .unwrap_or_else(|| vec![Complex64::new(0.0, 0.0); self.dimension])
    }

    fn project(&self, p: &[f64], lam: &[Complex64]) -> Complex64 {
        lam.iter().zip(p).map(|(l, x)| l * *x).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiophantineReport {
    pub ok: bool,
    /// `min |p.k| |k|^beta` over `0 < |k| <= K`.
    pub margin: f64,
    pub worst_k: Vec<i64>,
    /// A lattice vector with `p.k = 0`, if any.
    pub offending_k: Option<Vec<i64>>,
}

fn unit_check(p: &[f64]) -> Result<()> {
    let norm = p.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !((norm - 1.0).abs() <= 1e-12) {
        return Err(Error::InvalidInput(format!(
            "direction must be a unit vector (|p| = {norm}); divide p by |p| and scale H by |p|"
        )));
    }
    Ok(())
}

fn lattice_ball(n: usize, k_max: i64, mut visit: impl FnMut(&[i64])) {
    let mut k = vec![-k_max; n];
    let limit = (k_max * k_max) as f64;
    loop {
        let r2 = norm2_k(&k);
        if r2 > 0.0 && r2 <= limit {
            visit(&k);
        }
        let mut i = 0;
        loop {
            if i == n {
                return;
            }
            if k[i] < k_max {
                k[i] += 1;
                break;
            }
            k[i] = -k_max;
            i += 1;
        }
    }
}

/// Finite check of `|p.k| >= C / |k|^beta` over the lattice ball `0 < |k| <= K`.
pub fn diophantine_check(p: &[f64], k_max: i64, beta: f64, c: f64) -> Result<DiophantineReport> {
    unit_check(p)?;
    if k_max < 1 {
        return Err(Error::InvalidInput(format!("K must be at least 1, got {k_max}")));
    }
    let mut margin = f64::INFINITY;
    let mut worst = Vec::new();
    let mut offending = None;
    lattice_ball(p.len(), k_max, |k| {
        let pk = dot_k(p, k).abs();
        let m = pk * norm2_k(k).sqrt().powf(beta);
        if m < margin {
            margin = m;
            worst = k.to_vec();
        }
        if pk == 0.0 && offending.is_none() {
            offending = Some(k.to_vec());
        }
    });
    Ok(DiophantineReport {
        ok: margin >= c && offending.is_none(),
        margin,
        worst_k: worst,
        offending_k: offending,
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Alpha2Form {
    /// Numerator `|k|^2 - (p.k)^2`.
    #[default]
    Corrected,
    /// Numerator `|k|^2`.
    Literal,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerturbationResult {
    pub alpha1: f64,
    pub alpha2: f64,
    #[serde(rename = "H_approx")]
    pub h_approx: f64,
    pub truncation_k: i64,
    /// `min |p.k| |k|` over the modes that enter `alpha2`.
    pub diophantine_margin: f64,
    /// `sum |lambda_k|^2` over stored modes beyond the truncation.
    pub tail_energy: f64,
    pub form: Alpha2Form,
}

/// `alpha1 = p . lambda_0`, `alpha2` by direct summation, and `|p| + delta alpha1 + delta^2 alpha2`.
pub fn effective_speed_expansion(
    field: &VectorFieldFourier,
    p: &[f64],
    d: f64,
    delta: f64,
    k_max: i64,
    form: Alpha2Form,
) -> Result<PerturbationResult> {
    if p.len() != field.dimension {
        return Err(Error::InvalidInput(format!(
            "direction has {} components, field has dimension {}",
            p.len(),
            field.dimension
        )));
    }
    unit_check(p)?;
    if !(d >= 0.0 && d.is_finite()) || !delta.is_finite() {
        return Err(Error::InvalidInput(format!("need finite d >= 0 and delta, got d = {d}, delta = {delta}")));
    }
    let alpha1 = field.project(p, &field.mean()).re;
    let mut terms = Vec::new();
    let mut tail = Vec::new();
    let mut margin = f64::INFINITY;
    for (k, lam) in &field.coefficients {
        if k.iter().all(|x| *x == 0) {
            continue;
        }
        if k.iter().any(|x| x.abs() > k_max) {
            tail.push(lam.iter().map(|c| c.norm_sqr()).sum::<f64>());
            continue;
        }
        let pl = field.project(p, lam).norm_sqr();
        if pl == 0.0 {
            continue;
        }
        let pk = dot_k(p, k);
        let k2 = norm2_k(k);
        let perp = (k2 - pk * pk).max(0.0);
        margin = margin.min(pk.abs() * k2.sqrt());
        let denom = 4.0 * PI * PI * d * d * perp * perp + pk * pk;
        let num = match form {
            Alpha2Form::Corrected => perp,
            Alpha2Form::Literal => k2,
        };
        if num == 0.0 {
            continue;
        }
        if denom == 0.0 {
            return Err(Error::SingularTerm { k: k.clone() });
        }
        terms.push(0.5 * num * pl / denom);
    }
    let alpha2 = neumaier(terms);
    Ok(PerturbationResult {
        alpha1,
        alpha2,
        h_approx: 1.0 + delta * alpha1 + delta * delta * alpha2,
        truncation_k: k_max,
        diophantine_margin: margin,
        tail_energy: neumaier(tail),
        form,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShearCrossCheck {
    pub delta: f64,
    #[serde(rename = "H_solver")]
    pub h_solver: f64,
    #[serde(rename = "H_expansion")]
    pub h_expansion: f64,
    pub error: f64,
    pub alpha1: f64,
    pub alpha2: f64,
}

/// Solves the 1-D cell problem for the flow `delta v` and compares with the expansion
/// `|p| (1 + delta alpha1 + delta^2 alpha2)` evaluated at `p / |p|`.
pub fn cross_check_shear(
    v: &FlowSpec,
    p: Momentum,
    d: f64,
    delta: f64,
    opts: &SolverOptions,
    form: Alpha2Form,
) -> Result<ShearCrossCheck> {
    if p.gamma == 0.0 {
        return Err(Error::DegenerateDirection);
    }
    let norm = p.norm();
    let unit = [p.gamma / norm, p.mu / norm];
    let field = VectorFieldFourier::from_shear(v)?;
    let exp = effective_speed_expansion(&field, &unit, d, delta, DEFAULT_TRUNCATION, form)?;
    let flow = build_flow(&v.resolve()?.scaled(delta))?;
    let h_solver = flame_speed(&flow, p, d, opts)?.h();
    let h_expansion = norm * exp.h_approx;
    Ok(ShearCrossCheck {
        delta,
        h_solver,
        h_expansion,
        error: (h_solver - h_expansion).abs(),
        alpha1: norm * exp.alpha1,
        alpha2: norm * exp.alpha2,
    })
}

/// Observed order `log(error_coarse / error_fine) / log(delta_coarse / delta_fine)`.
pub fn remainder_order(coarse: &ShearCrossCheck, fine: &ShearCrossCheck) -> f64 {
    (coarse.error / fine.error).ln() / (coarse.delta / fine.delta).ln()
}
