//! Signed margins for each inequality and identity under test. A margin is
//! nonnegative exactly when the claim held on the instance.

use std::cell::{OnceCell, RefCell};
use std::f64::consts::{FRAC_PI_2, TAU};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::matrix::{
    cartesian_parts, cis, hermitian_eigenvalues, hermitize, inverse, lambda_max_unchecked, lambda_min_unchecked,
    spectral_norm, CartesianPair, ComplexMatrix, PD_TOL,
};
use crate::power::{fractional_power_with, hermitian_power, matrix_power_int, PowerMode, QuadratureOptions};
use crate::range::{numerical_radius_with, rotated_real_norm, sector_angle, RadiusOptions, RadiusReport};

/// Number of probe angles for the supremum identity.
pub const SUP_PROBE_ANGLES: usize = 512;
/// Fractional offset of the probe grid from the radius grid.
const SUP_PROBE_OFFSET: f64 = 0.37;
/// Relative match for the inverse formulas, scaled by the condition number.
pub const INVERSE_MATCH_RTOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pid {
    P1,
    P2,
    P3,
    P4,
    P5,
    P6,
    P7,
    P8,
    P9,
    P10,
    P11,
    P12,
    P13,
    P14,
}

impl Pid {
    pub const ALL: [Pid; 14] = [
        Pid::P1,
        Pid::P2,
        Pid::P3,
        Pid::P4,
        Pid::P5,
        Pid::P6,
        Pid::P7,
        Pid::P8,
        Pid::P9,
        Pid::P10,
        Pid::P11,
        Pid::P12,
        Pid::P13,
        Pid::P14,
    ];

    pub fn index(self) -> usize {
        self as usize + 1
    }

    pub fn describe(self) -> &'static str {
        match self {
            Pid::P1 => "power inequality w(A^k) <= w(A)^k",
            Pid::P2 => "reversed inequality for reciprocal powers",
            Pid::P3 => "w(A^t) >= w(A)^t for accretive-dissipative A",
            Pid::P4 => "w(A^t) >= w(A)^t for accretive A, t < 1/2",
            Pid::P5 => "Re(A)^t <= Re(A^t)",
            Pid::P6 => "sector shrink W(A^t) in S_{t alpha}",
            Pid::P7 => "A^t accretive-dissipative",
            Pid::P8 => "real and imaginary parts of the inverse",
            Pid::P9 => "w(A^t) = ||A^t|| = ||A||^t = w(A)^t for A > 0",
            Pid::P10 => "w(A) = ||Re(e^{-i gamma} A)||",
            Pid::P11 => "(e^{i theta} A)^t = e^{i t theta} A^t",
            Pid::P12 => "w(A) = sup ||Re(e^{i theta} A)||",
            Pid::P13 => "w(A^m) <= w(A)^m when A^k is accretive",
            Pid::P14 => "w(A^t) >= w(A)^t for accretive A, any t",
        }
    }
}

impl fmt::Display for Pid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P{}", self.index())
    }
}

impl FromStr for Pid {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let digits = s.strip_prefix('P').or_else(|| s.strip_prefix('p')).unwrap_or(s);
        digits
            .parse::<usize>()
            .ok()
            .and_then(|k| Pid::ALL.get(k.wrapping_sub(1)).copied())
            .ok_or_else(|| Error::InvalidConfig(format!("unknown property id {s:?}")))
    }
}

impl Serialize for Pid {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Pid {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PropertyParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
}

impl PropertyParams {
    pub fn t(t: f64) -> Self {
        Self {
            t: Some(t),
            ..Self::default()
        }
    }

    pub fn k(k: u32) -> Self {
        Self {
            k: Some(k),
            ..Self::default()
        }
    }

    pub fn rotation(t: f64, theta: f64) -> Self {
        Self {
            t: Some(t),
            theta: Some(theta),
            ..Self::default()
        }
    }

    pub fn root(k: u32, m: f64) -> Self {
        Self {
            k: Some(k),
            m: Some(m),
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PropertyMargin {
    pub pid: Pid,
    pub margin: f64,
    /// `margin / max(1, w(A))`; violations are judged on this value.
    pub normalized: f64,
    pub params: PropertyParams,
    pub instance_digest: String,
    pub detail: String,
}

/// Whether a violation of `pid` at `params` counts against the build. The
/// open conjecture is only asserted where a proof covers it.
pub fn is_asserted(pid: Pid, params: &PropertyParams) -> bool {
    match pid {
        Pid::P14 => params.t.is_some_and(|t| t < 0.5),
        _ => true,
    }
}

/// SHA-256 of the dimension and the little-endian bytes of every entry.
pub fn matrix_digest(a: &ComplexMatrix) -> String {
    let mut hasher = Sha256::new();
    hasher.update((a.n() as u64).to_le_bytes());
    for z in a.as_slice() {
        hasher.update(z.re.to_le_bytes());
        hasher.update(z.im.to_le_bytes());
    }
    hasher.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalOptions {
    pub radius: RadiusOptions,
    pub power_mode: PowerMode,
    pub quadrature: QuadratureOptions,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            radius: RadiusOptions::default(),
            power_mode: PowerMode::SpectralFirst,
            quadrature: QuadratureOptions::default(),
        }
    }
}

/// Per-instance evaluator caching the quantities several properties share.
pub struct Evaluator<'a> {
    a: &'a ComplexMatrix,
    opts: EvalOptions,
    parts: CartesianPair,
    digest: OnceCell<String>,
    radius: OnceCell<RadiusReport>,
    min_re: OnceCell<f64>,
    min_im: OnceCell<f64>,
    powers: RefCell<Vec<(f64, ComplexMatrix)>>,
    power_radii: RefCell<Vec<(f64, f64)>>,
}

fn floor_of(h: &ComplexMatrix) -> f64 {
    PD_TOL * h.norm_inf().max(1.0)
}

impl<'a> Evaluator<'a> {
    pub fn new(a: &'a ComplexMatrix) -> Self {
        Self::with_options(a, EvalOptions::default())
    }

    pub fn with_options(a: &'a ComplexMatrix, opts: EvalOptions) -> Self {
        Self {
            a,
            opts,
            parts: cartesian_parts(a),
            digest: OnceCell::new(),
            radius: OnceCell::new(),
            min_re: OnceCell::new(),
            min_im: OnceCell::new(),
            powers: RefCell::new(Vec::new()),
            power_radii: RefCell::new(Vec::new()),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.a
    }

    pub fn digest(&self) -> &str {
        self.digest.get_or_init(|| matrix_digest(self.a))
    }

    pub fn radius(&self) -> Result<&RadiusReport> {
        if let Some(r) = self.radius.get() {
            return Ok(r);
        }
        let r = numerical_radius_with(self.a, &self.opts.radius)?;
        Ok(self.radius.get_or_init(|| r))
    }

    pub fn omega(&self) -> Result<f64> {
        Ok(self.radius()?.omega)
    }

    fn omega_of(&self, m: &ComplexMatrix) -> Result<f64> {
        Ok(numerical_radius_with(m, &self.opts.radius)?.omega)
    }

    fn min_re(&self) -> Result<f64> {
        if let Some(&v) = self.min_re.get() {
            return Ok(v);
        }
        let v = hermitian_eigenvalues(&self.parts.h)?[0];
        Ok(*self.min_re.get_or_init(|| v))
    }

    fn min_im(&self) -> Result<f64> {
        if let Some(&v) = self.min_im.get() {
            return Ok(v);
        }
        let v = hermitian_eigenvalues(&self.parts.k)?[0];
        Ok(*self.min_im.get_or_init(|| v))
    }

    /// `A^t`, cached per exponent.
    pub fn power(&self, t: f64) -> Result<ComplexMatrix> {
        if let Some((_, p)) = self.powers.borrow().iter().find(|(s, _)| *s == t) {
            return Ok(p.clone());
        }
        let p = fractional_power_with(self.a, t, self.opts.power_mode, &self.opts.quadrature)?.value;
        self.powers.borrow_mut().push((t, p.clone()));
        Ok(p)
    }

    fn power_omega(&self, t: f64) -> Result<f64> {
        if let Some(&(_, w)) = self.power_radii.borrow().iter().find(|(s, _)| *s == t) {
            return Ok(w);
        }
        let w = self.omega_of(&self.power(t)?)?;
        self.power_radii.borrow_mut().push((t, w));
        Ok(w)
    }

    fn mismatch(&self, pid: Pid, reason: impl Into<String>) -> Error {
        Error::ClassMismatch {
            pid: pid.to_string(),
            reason: reason.into(),
        }
    }

    fn require_accretive(&self, pid: Pid) -> Result<()> {
        let min_re = self.min_re()?;
        if min_re > floor_of(&self.parts.h) {
            Ok(())
        } else {
            Err(self.mismatch(pid, format!("not accretive: lambda_min(Re A) = {min_re:.6e}")))
        }
    }

    fn require_ad(&self, pid: Pid) -> Result<()> {
        self.require_accretive(pid)?;
        let min_im = self.min_im()?;
        if min_im > floor_of(&self.parts.k) {
            Ok(())
        } else {
            Err(self.mismatch(pid, format!("not dissipative: lambda_min(Im A) = {min_im:.6e}")))
        }
    }

    fn require_hpd(&self, pid: Pid) -> Result<()> {
        if hermitize(self.a).is_err() {
            return Err(self.mismatch(pid, format!("not Hermitian: ||A - A*|| = {:.3e}", self.a.asymmetry())));
        }
        self.require_accretive(pid)
    }

    /// Evaluates `pid` on the instance after certifying its class precondition.
    pub fn evaluate(&self, pid: Pid, params: &PropertyParams) -> Result<PropertyMargin> {
        let (margin, detail) = self.margin(pid, params)?;
        if !margin.is_finite() {
            return Err(Error::NoConvergence);
        }
        let scale = self.omega()?.max(1.0);
        Ok(PropertyMargin {
            pid,
            margin,
            normalized: margin / scale,
            params: *params,
            instance_digest: self.digest().to_owned(),
            detail,
        })
    }

    fn margin(&self, pid: Pid, params: &PropertyParams) -> Result<(f64, String)> {
        match pid {
            Pid::P1 => {
                let k = need_k(pid, params)?;
                let w = self.omega()?;
                let wk = self.omega_of(&matrix_power_int(self.a, k)?)?;
                Ok((w.powi(k as i32) - wk, format!("w(A) = {w:.17e}, w(A^k) = {wk:.17e}")))
            }
            Pid::P2 => {
                let k = need_k(pid, params)?;
                self.require_accretive(pid)?;
                let t = 1.0 / k as f64;
                let w = self.omega()?;
                let wt = self.power_omega(t)?;
                Ok((wt - w.powf(t), format!("w(A) = {w:.17e}, w(A^(1/k)) = {wt:.17e}")))
            }
            Pid::P3 | Pid::P4 | Pid::P14 => {
                let t = need_t(pid, params)?;
                match pid {
                    Pid::P3 => self.require_ad(pid)?,
                    Pid::P4 if t >= 0.5 => {
                        return Err(Error::InvalidConfig(format!("P4 needs t in (0, 1/2), got {t}")));
                    }
                    _ => self.require_accretive(pid)?,
                }
                if t >= 1.0 {
                    return Err(Error::InvalidConfig(format!("{pid} needs t in (0, 1), got {t}")));
                }
                let w = self.omega()?;
                let wt = self.power_omega(t)?;
                Ok((wt - w.powf(t), format!("w(A) = {w:.17e}, w(A^t) = {wt:.17e}")))
            }
            Pid::P5 => {
                let t = need_t(pid, params)?;
                self.require_accretive(pid)?;
                let re_pow = cartesian_parts(&self.power(t)?).h;
                let pow_re = hermitian_power(&self.parts.h, t)?;
                let diff = (&re_pow - &pow_re).hermitian_part();
                let gap = lambda_min_unchecked(&diff);
                Ok((gap, format!("lambda_min(Re(A^t) - Re(A)^t) = {gap:.17e}")))
            }
            Pid::P6 => {
                let t = need_t(pid, params)?;
                self.require_accretive(pid)?;
                let alpha = sector_angle(self.a)?;
                let alpha_t = sector_angle(&self.power(t)?)?;
                Ok((
                    t * alpha - alpha_t,
                    format!("alpha(A) = {alpha:.17e}, alpha(A^t) = {alpha_t:.17e}"),
                ))
            }
            Pid::P7 => {
                let t = need_t(pid, params)?;
                self.require_ad(pid)?;
                let p = cartesian_parts(&self.power(t)?);
                let re = lambda_min_unchecked(&p.h);
                let im = lambda_min_unchecked(&p.k);
                Ok((re.min(im), format!("lambda_min(Re A^t) = {re:.17e}, lambda_min(Im A^t) = {im:.17e}")))
            }
            Pid::P8 => {
                self.require_ad(pid)?;
                self.inverse_margin()
            }
            Pid::P9 => {
                let t = need_t(pid, params)?;
                self.require_hpd(pid)?;
                let p = self.power(t)?;
                let values = [
                    self.power_omega(t)?,
                    spectral_norm(&p),
                    spectral_norm(self.a).powf(t),
                    self.omega()?.powf(t),
                ];
                let hi = values.iter().copied().fold(f64::MIN, f64::max);
                let lo = values.iter().copied().fold(f64::MAX, f64::min);
                Ok((
                    -(hi - lo),
                    format!(
                        "w(A^t) = {:.17e}, ||A^t|| = {:.17e}, ||A||^t = {:.17e}, w(A)^t = {:.17e}",
                        values[0], values[1], values[2], values[3]
                    ),
                ))
            }
            Pid::P10 => {
                let r = self.radius()?;
                let attained = rotated_real_norm(&self.parts, -r.gamma);
                Ok((
                    -(r.omega - attained).abs(),
                    format!("w(A) = {:.17e}, ||Re(e^(-i gamma) A)|| = {attained:.17e}", r.omega),
                ))
            }
            Pid::P11 => {
                let t = need_t(pid, params)?;
                let theta = params
                    .theta
                    .ok_or_else(|| Error::InvalidConfig("P11 needs theta".into()))?;
                if !(theta.abs() < FRAC_PI_2) {
                    return Err(Error::InvalidConfig(format!("P11 needs theta in (-pi/2, pi/2), got {theta}")));
                }
                self.require_accretive(pid)?;
                let rotated = fractional_power_with(
                    &self.a.scale(cis(theta)),
                    t,
                    self.opts.power_mode,
                    &self.opts.quadrature,
                )?
                .value;
                let expect = self.power(t)?.scale(cis(t * theta));
                let gap = spectral_norm(&(&rotated - &expect));
                Ok((-gap, format!("||(e^(i theta) A)^t - e^(i t theta) A^t|| = {gap:.3e}")))
            }
            Pid::P12 => {
                let w = self.omega()?;
                let step = TAU / SUP_PROBE_ANGLES as f64;
                let probe = (0..SUP_PROBE_ANGLES)
                    .map(|j| rotated_real_norm(&self.parts, (j as f64 + SUP_PROBE_OFFSET) * step))
                    .fold(f64::MIN, f64::max);
                Ok((w - probe, format!("w(A) = {w:.17e}, probe max = {probe:.17e}")))
            }
            Pid::P13 => self.root_margin(params),
        }
    }

    fn inverse_margin(&self) -> Result<(f64, String)> {
        let (h, k) = (&self.parts.h, &self.parts.k);
        let inv = inverse(self.a)?;
        let ip = cartesian_parts(&inv);
        let hinv = inverse(h)?;
        let kinv = inverse(k)?;
        let e_re = inverse(&(h + &(&(k * &hinv) * k)))?;
        let e_im = inverse(&(k + &(&(h * &kinv) * h)))?;
        let gap_re = spectral_norm(&(&ip.h - &e_re));
        let gap_im = spectral_norm(&(&ip.k + &e_im));
        let cond = spectral_norm(self.a) * spectral_norm(&inv);
        let allowed = INVERSE_MATCH_RTOL * cond;
        let re_min = lambda_min_unchecked(&ip.h);
        let im_max = lambda_max_unchecked(&ip.k);
        let margin = (allowed - gap_re).min(allowed - gap_im).min(re_min).min(-im_max);
        Ok((
            margin,
            format!(
                "gap Re = {gap_re:.3e}, gap Im = {gap_im:.3e}, cond = {cond:.3e}, \
                 lambda_min(Re A^-1) = {re_min:.6e}, lambda_max(Im A^-1) = {im_max:.6e}"
            ),
        ))
    }

    fn root_margin(&self, params: &PropertyParams) -> Result<(f64, String)> {
        let pid = Pid::P13;
        let k = need_k(pid, params)?;
        let m = params.m.ok_or_else(|| Error::InvalidConfig("P13 needs m".into()))?;
        if !(m >= 2.0 && m <= k as f64) {
            return Err(Error::InvalidConfig(format!("P13 needs 2 <= m <= k, got m = {m}, k = {k}")));
        }
        self.require_accretive(pid)?;
        let ak = matrix_power_int(self.a, k)?;
        let ak_parts = cartesian_parts(&ak);
        let ak_min = hermitian_eigenvalues(&ak_parts.h)?[0];
        if ak_min <= floor_of(&ak_parts.h) {
            return Err(self.mismatch(pid, format!("A^k not accretive: lambda_min(Re A^k) = {ak_min:.6e}")));
        }
        let root_route = |k: u32| -> Result<ComplexMatrix> {
            Ok(fractional_power_with(&ak, m / k as f64, self.opts.power_mode, &self.opts.quadrature)?.value)
        };
        let (am, detail) = if m.fract() == 0.0 {
            let am = matrix_power_int(self.a, m as u32)?;
            let detail = match root_route(k) {
                Ok(r) => format!("route gap = {:.3e}", spectral_norm(&(&r - &am))),
                Err(e) => format!("root route failed: {e}"),
            };
            (am, detail)
        } else {
            (root_route(k)?, "via (A^k)^(m/k)".to_owned())
        };
        let w = self.omega()?;
        let wm = self.omega_of(&am)?;
        Ok((
            w.powf(m) - wm,
            format!("w(A) = {w:.17e}, w(A^m) = {wm:.17e}, {detail}"),
        ))
    }
}

fn need_t(pid: Pid, params: &PropertyParams) -> Result<f64> {
    match params.t {
        Some(t) if t > 0.0 && t <= 1.0 => Ok(t),
        Some(t) => Err(Error::InvalidConfig(format!("{pid} needs t in (0, 1], got {t}"))),
        None => Err(Error::InvalidConfig(format!("{pid} needs t"))),
    }
}

fn need_k(pid: Pid, params: &PropertyParams) -> Result<u32> {
    match params.k {
        Some(k) if k >= 1 => Ok(k),
        _ => Err(Error::InvalidConfig(format!("{pid} needs an integer k >= 1"))),
    }
}

/// One-shot evaluation without sharing a cache.
pub fn evaluate_property(pid: Pid, a: &ComplexMatrix, params: &PropertyParams) -> Result<PropertyMargin> {
    Evaluator::new(a).evaluate(pid, params)
}
