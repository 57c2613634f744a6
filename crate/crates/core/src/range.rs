//! Numerical range boundary, numerical radius, sectorial angle and the
//! accretive/dissipative classification.
//!
//! Everything here is driven by the support function of `W(A)`: for a
//! direction `e^{i phi}` the largest eigenvalue of `Re(e^{-i phi} A)` is the
//! support value, and its top eigenvector `x` gives the support point
//! `<A x, x>` on the boundary.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{
    cartesian_parts, hermitian_eigenvalues, hermitian_spectrum, lambda_max_unchecked,
    lambda_min_unchecked, CartesianPair, ComplexMatrix, C64, PD_TOL,
};

pub const DEFAULT_THETA_GRID: usize = 2048;
pub const DEFAULT_BRACKETS: usize = 3;
pub const DEFAULT_GOLDEN_ITERS: usize = 60;
pub const DEFAULT_SECTOR_POINTS: usize = 4096;
pub const DEFAULT_CLASSIFY_POINTS: usize = 1024;
const SECTOR_BISECTION_ITERS: usize = 64;
/// Distance below which the origin is too close to the inner polygon to
/// decide membership.
pub const HULL_INCONCLUSIVE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadiusOptions {
    pub grid: usize,
    pub brackets: usize,
    pub golden_iters: usize,
}

impl Default for RadiusOptions {
    fn default() -> Self {
        Self {
            grid: DEFAULT_THETA_GRID,
            brackets: DEFAULT_BRACKETS,
            golden_iters: DEFAULT_GOLDEN_ITERS,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RadiusReport {
    pub omega: f64,
    /// `Arg <A x0, x0>` in `(-pi, pi]`.
    pub gamma: f64,
    #[serde(serialize_with = "crate::io::serialize_complex_vec")]
    pub witness: Vec<C64>,
    /// Angle maximizing `lambda_max(Re(e^{i theta} A))`, in `(-pi, pi]`;
    /// equals `-gamma` modulo `2 pi`.
    pub theta_star: f64,
    pub grid_size: usize,
    pub refinement_iters: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SectorReport {
    pub accretive: bool,
    pub dissipative: bool,
    pub accretive_dissipative: bool,
    pub alpha: Option<f64>,
    pub min_re: f64,
    pub min_im: f64,
    pub zero_in_range: bool,
    /// The origin sits outside the inner boundary polygon but within
    /// `HULL_INCONCLUSIVE_TOL` of it, so `zero_in_range = false` is not certified.
    pub zero_in_range_inconclusive: bool,
    pub crosses_negative_axis: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryPoint {
    pub theta: f64,
    pub z: C64,
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_angle(theta: f64) -> f64 {
    let mut t = theta.rem_euclid(TAU);
    if t > PI {
        t -= TAU;
    }
    t
}

/// Principal argument in `(-pi, pi]`.
pub fn principal_arg(z: C64) -> f64 {
    let a = z.im.atan2(z.re);
    if a <= -PI {
        PI
    } else {
        a
    }
}

fn golden_max(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, iters: usize) -> (f64, f64) {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iters {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Maximizes a `2 pi`-periodic function by an equispaced grid followed by
/// golden-section refinement of the best local maxima. Grid points win ties.
fn periodic_max(f: impl Fn(f64) -> f64, opts: &RadiusOptions) -> (f64, f64) {
    let m = opts.grid.max(3);
    let step = TAU / m as f64;
    let values: Vec<f64> = (0..m).map(|j| f(j as f64 * step)).collect();
    let mut peaks: Vec<usize> = (0..m)
        .filter(|&j| {
            let prev = values[(j + m - 1) % m];
            let next = values[(j + 1) % m];
            values[j] >= prev && values[j] >= next
        })
        .collect();
    peaks.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let mut best_theta = peaks.first().map_or(0.0, |&j| j as f64 * step);
    let mut best = peaks.first().map_or(values[0], |&j| values[j]);
    for &j in peaks.iter().take(opts.brackets.max(1)) {
        let center = j as f64 * step;
        let (theta, value) = golden_max(&f, center - step, center + step, opts.golden_iters);
        if value > best {
            best = value;
            best_theta = theta;
        }
    }
    (best_theta, best)
}

/// Numerical radius with the default grid.
pub fn numerical_radius(a: &ComplexMatrix) -> Result<RadiusReport> {
    numerical_radius_with(a, &RadiusOptions::default())
}

/// `omega(A) = max_theta lambda_max(Re(e^{i theta} A))`, with the attaining
/// angle and a witness vector.
pub fn numerical_radius_with(a: &ComplexMatrix, opts: &RadiusOptions) -> Result<RadiusReport> {
    let parts = cartesian_parts(a);
    let (theta, lam) = periodic_max(|t| lambda_max_unchecked(&parts.rotated_real_part(t)), opts);
    let spectrum = hermitian_spectrum(&parts.rotated_real_part(theta))?;
    let witness = spectrum.eigenvector(top_cluster_start(&spectrum.eigenvalues));
    let q = a.quadratic_form(&witness);
    Ok(RadiusReport {
        omega: lam.max(q.norm()),
        gamma: principal_arg(q),
        witness,
        theta_star: wrap_angle(theta),
        grid_size: opts.grid,
        refinement_iters: opts.golden_iters,
    })
}

fn top_cluster_start(values: &[f64]) -> usize {
    let n = values.len();
    let top = values[n - 1];
    let tol = 1e-12 * values.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    (0..n).find(|&j| top - values[j] <= tol).unwrap_or(n - 1)
}

/// Outer bound `max_j lambda_max(Re(e^{i theta_j} A)) / cos(pi / m)` on
/// `omega(A)` from an `m`-point angular grid.
pub fn radius_upper_bound(a: &ComplexMatrix, m: usize) -> f64 {
    let m = m.max(3);
    let parts = cartesian_parts(a);
    let best = (0..m)
        .map(|j| lambda_max_unchecked(&parts.rotated_real_part(TAU * j as f64 / m as f64)))
        .fold(f64::MIN, f64::max);
    best.max(0.0) / (PI / m as f64).cos()
}

/// `||Re(e^{i theta} A)||` for Hermitian real part; the larger of
/// `|lambda_min|` and `|lambda_max|`.
pub fn rotated_real_norm(parts: &CartesianPair, theta: f64) -> f64 {
    let r = parts.rotated_real_part(theta);
    lambda_max_unchecked(&r).abs().max(lambda_min_unchecked(&r).abs())
}

/// `m` support points of `W(A)`, one per direction `e^{i theta_j}`,
/// `theta_j = 2 pi j / m`.
pub fn range_boundary(a: &ComplexMatrix, m: usize) -> Result<Vec<BoundaryPoint>> {
    if m < 4 {
        return Err(Error::InvalidConfig(format!("boundary needs at least 4 points, got {m}")));
    }
    let parts = cartesian_parts(a);
    (0..m)
        .map(|j| {
            let theta = TAU * j as f64 / m as f64;
            let s = hermitian_spectrum(&parts.rotated_real_part(-theta))?;
            let x = s.eigenvector(top_cluster_start(&s.eigenvalues));
            Ok(BoundaryPoint {
                theta,
                z: a.quadratic_form(&x),
            })
        })
        .collect()
}

fn accretivity_floor(h: &ComplexMatrix) -> f64 {
    PD_TOL * h.norm_inf().max(1.0)
}

/// Smallest half-angle `alpha` with `W(A) ⊆ S_alpha`.
///
/// The upper edge is the least `phi` in `[0, pi/2)` with
/// `lambda_max(Im(e^{-i phi} A)) <= 0` (all of `W(A)` at argument `<= phi`),
/// found by bisection; the lower edge likewise with `-Im(e^{i phi} A)`.
pub fn sector_angle(a: &ComplexMatrix) -> Result<f64> {
    let parts = cartesian_parts(a);
    let min_re = hermitian_eigenvalues(&parts.h)?[0];
    if min_re <= accretivity_floor(&parts.h) {
        return Err(Error::NotAccretive { min_re });
    }
    // Im(e^{-i phi} A) = cos(phi) K - sin(phi) H
    let upper = sector_edge(|phi| lambda_max_unchecked(&parts.k.lincomb(phi.cos(), &parts.h, -phi.sin())));
    // -Im(e^{i phi} A) = -cos(phi) K - sin(phi) H
    let lower = sector_edge(|phi| lambda_max_unchecked(&parts.k.lincomb(-phi.cos(), &parts.h, -phi.sin())));
    Ok(upper.max(lower))
}

fn sector_edge(support: impl Fn(f64) -> f64) -> f64 {
    if support(0.0) <= 0.0 {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0, FRAC_PI_2);
    for _ in 0..SECTOR_BISECTION_ITERS {
        let mid = 0.5 * (lo + hi);
        if support(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Sector angle read off `m` boundary support points: the largest
/// `atan(|Im z| / Re z)`. A lower bound on `sector_angle` that converges as
/// `m` grows.
pub fn sector_angle_from_boundary(a: &ComplexMatrix, m: usize) -> Result<f64> {
    let parts = cartesian_parts(a);
    let min_re = hermitian_eigenvalues(&parts.h)?[0];
    if min_re <= accretivity_floor(&parts.h) {
        return Err(Error::NotAccretive { min_re });
    }
    Ok(range_boundary(a, m)?
        .iter()
        .map(|p| (p.z.im.abs() / p.z.re).atan())
        .fold(0.0, f64::max))
}

pub fn classify(a: &ComplexMatrix) -> Result<SectorReport> {
    classify_with(a, DEFAULT_CLASSIFY_POINTS)
}

pub fn classify_with(a: &ComplexMatrix, m: usize) -> Result<SectorReport> {
    let parts = cartesian_parts(a);
    let min_re = hermitian_eigenvalues(&parts.h)?[0];
    let min_im = hermitian_eigenvalues(&parts.k)?[0];
    let accretive = min_re > accretivity_floor(&parts.h);
    let dissipative = min_im > accretivity_floor(&parts.k);
    let alpha = if accretive { Some(sector_angle(a)?) } else { None };
    let points: Vec<(f64, f64)> = range_boundary(a, m)?.iter().map(|p| (p.z.re, p.z.im)).collect();
    let hull = convex_hull(points);
    let scale = hull.iter().fold(1.0f64, |s, p| s.max(p.0.abs()).max(p.1.abs()));
    let (inside, distance) = origin_vs_hull(&hull);
    let zero_in_range = inside;
    let inconclusive = !inside && distance <= HULL_INCONCLUSIVE_TOL * scale;
    let crosses_negative_axis = zero_in_range || hull_meets_negative_axis(&hull);
    Ok(SectorReport {
        accretive,
        dissipative,
        accretive_dissipative: accretive && dissipative,
        alpha,
        min_re,
        min_im,
        zero_in_range,
        zero_in_range_inconclusive: inconclusive,
        crosses_negative_axis,
    })
}

/// Finds `theta` with `Re(e^{i theta} A)` positive definite by maximizing
/// `lambda_min(Re(e^{i theta} A))` over angles.
pub fn accretive_rotation(a: &ComplexMatrix) -> Result<f64> {
    let parts = cartesian_parts(a);
    let (theta, best) = periodic_max(
        |t| lambda_min_unchecked(&parts.rotated_real_part(t)),
        &RadiusOptions::default(),
    );
    let floor = PD_TOL * parts.h.norm_inf().max(parts.k.norm_inf()).max(1.0);
    if best > floor {
        Ok(wrap_angle(theta))
    } else {
        Err(Error::ZeroInRange { best })
    }
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Andrew's monotone chain; counter-clockwise, collinear points dropped.
pub(crate) fn convex_hull(mut pts: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(pts.len() * 2);
    for &p in pts.iter().chain(pts.iter().rev().skip(1)) {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    if hull.len() < 2 {
        // all points collinear: keep the two extremes
        return vec![pts[0], pts[pts.len() - 1]];
    }
    hull
}

fn segment_distance(p: (f64, f64), q: (f64, f64)) -> f64 {
    let d = (q.0 - p.0, q.1 - p.1);
    let len2 = d.0 * d.0 + d.1 * d.1;
    let s = if len2 == 0.0 {
        0.0
    } else {
        (-(p.0 * d.0 + p.1 * d.1) / len2).clamp(0.0, 1.0)
    };
    (p.0 + s * d.0).hypot(p.1 + s * d.1)
}

/// Whether the origin lies in the closed hull, and its distance to the hull boundary.
fn origin_vs_hull(hull: &[(f64, f64)]) -> (bool, f64) {
    match hull.len() {
        0 => (false, f64::INFINITY),
        1 => {
            let d = hull[0].0.hypot(hull[0].1);
            (d == 0.0, d)
        }
        2 => {
            let d = segment_distance(hull[0], hull[1]);
            (d <= f64::EPSILON * 4.0 * hull[0].0.hypot(hull[0].1).max(hull[1].0.hypot(hull[1].1)), d)
        }
        k => {
            let mut inside = true;
            let mut dist = f64::INFINITY;
            for i in 0..k {
                let p = hull[i];
                let q = hull[(i + 1) % k];
                if cross(p, q, (0.0, 0.0)) < 0.0 {
                    inside = false;
                }
                dist = dist.min(segment_distance(p, q));
            }
            (inside, dist)
        }
    }
}

fn hull_meets_negative_axis(hull: &[(f64, f64)]) -> bool {
    let k = hull.len();
    if k == 1 {
        return hull[0].1 == 0.0 && hull[0].0 <= 0.0;
    }
    let edges = if k == 2 { 1 } else { k };
    (0..edges).any(|i| {
        let p = hull[i];
        let q = hull[(i + 1) % k];
        if p.1 == 0.0 && q.1 == 0.0 {
            return p.0.min(q.0) <= 0.0;
        }
        if p.1 * q.1 > 0.0 {
            return false;
        }
        let x = p.0 + (q.0 - p.0) * (-p.1) / (q.1 - p.1);
        x <= 0.0
    })
}
