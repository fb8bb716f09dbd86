//! Double-precision period matrices of elliptic curves in short Weierstrass
//! form, via the complex AGM and nome series for the quasi-periods.

use std::f64::consts::PI;

use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};

use crate::polyring::Q;
use crate::symmat::{permutation_matrix, PermSpec};

pub type CMat2 = [[C; 2]; 2];
pub type CMat4 = [[C; 4]; 4];

const AGM_MAX_ITER: usize = 64;
const SERIES_MAX_TERMS: usize = 200_000;
/// Agreement required between the input invariants and those recomputed
/// from a candidate lattice.
const LATTICE_CHECK_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PeriodError {
    #[error("AGM branch degeneracy: {0}")]
    Degenerate(String),
    #[error("discriminant g2^3 - 27 g3^2 is zero")]
    SingularCurve,
    #[error("normalization mismatch: {0:?} vs {1:?}")]
    NormalizationMismatch(Normalization, Normalization),
    #[error("no convergence: {0}")]
    NoConvergence(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    Raw,
    /// Every entry divided by `2 pi i`.
    Scaled,
}

/// `y^2 = 4x^3 - g2 x - g3`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSpec {
    pub g2: Q,
    pub g3: Q,
}

impl CurveSpec {
    pub fn new(g2: Q, g3: Q) -> Result<Self, PeriodError> {
        let c = CurveSpec { g2, g3 };
        if c.discriminant().is_zero() {
            return Err(PeriodError::SingularCurve);
        }
        Ok(c)
    }

    pub fn lemniscatic() -> Self {
        CurveSpec { g2: Q::from_i64(4), g3: Q::zero() }
    }

    /// `g2^3 - 27 g3^2`.
    pub fn discriminant(&self) -> Q {
        &self.g2.pow(3) - &(&Q::from_i64(27) * &self.g3.pow(2))
    }

    /// `(lambda^4 g2, lambda^6 g3)`, whose periods are those of `self` divided by `lambda`.
    pub fn scaled(&self, lambda: &Q) -> Self {
        CurveSpec { g2: &self.g2 * &lambda.pow(4), g3: &self.g3 * &lambda.pow(6) }
    }
}

/// Periods of `dx/y` and `x dx/y` over a lattice basis with `Im(omega2/omega1) > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodBasis {
    pub omega1: C,
    pub omega2: C,
    pub eta1: C,
    pub eta2: C,
    pub normalization: Normalization,
}

impl PeriodBasis {
    /// Rows are the forms `dx/y`, `x dx/y`; columns the cycles.
    pub fn matrix(&self) -> CMat2 {
        [[self.omega1, self.omega2], [self.eta1, self.eta2]]
    }

    pub fn det(&self) -> C {
        self.omega1 * self.eta2 - self.omega2 * self.eta1
    }

    pub fn tau(&self) -> C {
        self.omega2 / self.omega1
    }

    pub fn to_scaled(&self) -> PeriodBasis {
        match self.normalization {
            Normalization::Scaled => *self,
            Normalization::Raw => {
                let s = two_pi_i().inv();
                PeriodBasis {
                    omega1: self.omega1 * s,
                    omega2: self.omega2 * s,
                    eta1: self.eta1 * s,
                    eta2: self.eta2 * s,
                    normalization: Normalization::Scaled,
                }
            }
        }
    }
}

fn two_pi_i() -> C {
    C::new(0.0, 2.0 * PI)
}

fn agm_step(a: C, b: C) -> (C, C) {
    let a1 = (a + b) * 0.5;
    let r = (a * b).sqrt();
    let (dm, dp) = ((a1 - r).norm(), (a1 + r).norm());
    let b1 = if dm < dp || (dm == dp && r.re >= 0.0) { r } else { -r };
    (a1, b1)
}

/// The AGM with the optimal square-root branch, plus `|a_n - b_n|` per step.
pub fn agm_trace(a: C, b: C) -> Result<(C, Vec<f64>), PeriodError> {
    if a == C::new(0.0, 0.0) || b == C::new(0.0, 0.0) {
        return Err(PeriodError::Degenerate("zero argument".into()));
    }
    if (a + b).norm() <= f64::EPSILON * a.norm() {
        return Err(PeriodError::Degenerate("a = -b".into()));
    }
    let (mut a, mut b) = (a, b);
    let mut gaps = vec![(a - b).norm()];
    for _ in 0..AGM_MAX_ITER {
        if (a - b).norm() <= 1e-16 * a.norm() {
            return Ok((a, gaps));
        }
        let (a1, b1) = agm_step(a, b);
        if (a1 - b1).norm() >= (a - b).norm() && gaps.len() > 8 {
            // rounding floor reached
            return Ok((a1, gaps));
        }
        a = a1;
        b = b1;
        gaps.push((a - b).norm());
    }
    Err(PeriodError::NoConvergence(format!("AGM after {AGM_MAX_ITER} steps")))
}

pub fn agm(a: C, b: C) -> Result<C, PeriodError> {
    Ok(agm_trace(a, b)?.0)
}

/// Roots of `4x^3 - g2 x - g3` by Durand-Kerner iteration with Newton polishing.
pub fn cubic_roots(g2: f64, g3: f64) -> [C; 3] {
    let f = |x: C| x * x * x * 4.0 - x * g2 - g3;
    let df = |x: C| x * x * 12.0 - g2;
    let scale = 1.0 + g2.abs().sqrt() + g3.abs().cbrt();
    let seed = C::new(0.4, 0.9) * scale;
    let mut z = [seed, seed * seed / scale, seed * seed * seed / (scale * scale)];
    for _ in 0..500 {
        let mut delta = 0.0f64;
        for i in 0..3 {
            let mut den = C::new(4.0, 0.0);
            for j in 0..3 {
                if i != j {
                    den *= z[i] - z[j];
                }
            }
            let step = f(z[i]) / den;
            z[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta <= 1e-17 * scale {
            break;
        }
    }
    for r in &mut z {
        for _ in 0..3 {
            let d = df(*r);
            if d.norm() > 0.0 {
                *r -= f(*r) / d;
            }
        }
    }
    z
}

/// `sum_{n >= 1} n^k q^n / (1 - q^n)`.
fn lambert(k: i32, q: C) -> Result<C, PeriodError> {
    let mut sum = C::new(0.0, 0.0);
    let mut qn = C::new(1.0, 0.0);
    for n in 1..=SERIES_MAX_TERMS {
        qn *= q;
        let term = qn / (C::new(1.0, 0.0) - qn) * (n as f64).powi(k);
        sum += term;
        if term.norm() <= 1e-18 * (1.0 + sum.norm()) && n > 2 {
            return Ok(sum);
        }
    }
    Err(PeriodError::NoConvergence(format!("nome series with |q| = {}", q.norm())))
}

fn nome(tau: C) -> C {
    (two_pi_i() * tau).exp()
}

fn e2(tau: C) -> Result<C, PeriodError> {
    Ok(C::new(1.0, 0.0) - lambert(1, nome(tau))? * 24.0)
}

/// `(g2, g3)` of the lattice `Z w1 + Z w2`, with `Im(w2/w1) > 0`.
fn invariants(w1: C, w2: C) -> Result<(C, C), PeriodError> {
    let q = nome(w2 / w1);
    let e4 = C::new(1.0, 0.0) + lambert(3, q)? * 240.0;
    let e6 = C::new(1.0, 0.0) - lambert(5, q)? * 504.0;
    let k = C::new(2.0 * PI, 0.0) / w1;
    Ok((k.powi(4) * e4 / 12.0, k.powi(6) * e6 / 216.0))
}

/// Moves `w2/w1` into the standard fundamental domain by unimodular changes of basis.
fn reduce_basis(mut w1: C, mut w2: C) -> (C, C) {
    if (w2 / w1).im < 0.0 {
        w2 = -w2;
    }
    for _ in 0..1000 {
        let tau = w2 / w1;
        let n = tau.re.round();
        w2 -= w1 * n;
        if (w2 / w1).norm() < 1.0 - 1e-15 {
            let t = w1;
            w1 = w2;
            w2 = -t;
        } else {
            break;
        }
    }
    if (w2 / w1).re < -0.5 + 1e-12 {
        w2 += w1;
    }
    // among the shortest equivalent first vectors, prefer the one closest to the positive real axis
    let tau = w2 / w1;
    let mut options = vec![(w1, w2), (-w1, -w2)];
    if (tau.norm() - 1.0).abs() < 1e-12 {
        options.extend([(w2, -w1), (-w2, w1)]);
    }
    if ((tau - 1.0).norm() - 1.0).abs() < 1e-12 {
        options.extend([(w2 - w1, -w1), (w1 - w2, w1)]);
    }
    if ((tau + 1.0).norm() - 1.0).abs() < 1e-12 {
        options.extend([(w2 + w1, -w1), (-w2 - w1, w1)]);
    }
    options
        .into_iter()
        .filter(|(a, b)| (b / a).im > 0.0)
        .min_by(|x, y| {
            let (ax, ay) = (x.0.arg(), y.0.arg());
            if (ax.abs() - ay.abs()).abs() < 1e-12 {
                ay.total_cmp(&ax)
            } else {
                ax.abs().total_cmp(&ay.abs())
            }
        })
        .unwrap_or((w1, w2))
}

fn close(x: C, y: C, scale: f64) -> bool {
    (x - y).norm() <= LATTICE_CHECK_TOL * scale.max(1.0)
}

pub fn elliptic_periods(curve: &CurveSpec) -> Result<PeriodBasis, PeriodError> {
    if curve.discriminant().is_zero() {
        return Err(PeriodError::SingularCurve);
    }
    let (g2, g3) = (curve.g2.to_f64(), curve.g3.to_f64());
    let e = cubic_roots(g2, g3);
    let mut cands = Vec::with_capacity(3);
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        cands.push(C::new(PI, 0.0) / agm((e[i] - e[j]).sqrt(), (e[i] - e[k]).sqrt())?);
    }
    let scale = g2.abs().max(g3.abs());
    for (a, b) in [(0, 1), (0, 2), (1, 2)] {
        if (cands[b] / cands[a]).im.abs() < 1e-9 {
            continue;
        }
        let (w1, w2) = reduce_basis(cands[a], cands[b]);
        let (h2, h3) = invariants(w1, w2)?;
        if !(close(h2, C::new(g2, 0.0), scale) && close(h3, C::new(g3, 0.0), scale)) {
            continue;
        }
        // de Rham periods of x dx/y are minus the zeta quasi-periods
        let eta1 = -e2(w2 / w1)? * (PI * PI / 3.0) / w1;
        let eta2 = -e2(-w1 / w2)? * (PI * PI / 3.0) / w2;
        return Ok(PeriodBasis { omega1: w1, omega2: w2, eta1, eta2, normalization: Normalization::Raw });
    }
    Err(PeriodError::NoConvergence("no AGM period pair generates the lattice".into()))
}

/// `|omega1 eta2 - omega2 eta1 - 2 pi i|` for raw bases, `|det - 1/(2 pi i)|` for scaled ones.
pub fn legendre_residual(basis: &PeriodBasis) -> f64 {
    match basis.normalization {
        Normalization::Raw => (basis.det() - two_pi_i()).norm(),
        Normalization::Scaled => (basis.det() - two_pi_i().inv()).norm(),
    }
}

fn mat_mul4(a: &CMat4, b: &CMat4) -> CMat4 {
    let mut out = [[C::new(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

fn swap_matrix() -> CMat4 {
    let j = permutation_matrix(PermSpec::BlockSwap { h: 1, g: 2 }).expect("J(1,2) is valid");
    let mut out = [[C::new(0.0, 0.0); 4]; 4];
    for (r, row) in out.iter_mut().enumerate() {
        for (c, v) in row.iter_mut().enumerate() {
            *v = C::new(*j.get(r, c) as f64, 0.0);
        }
    }
    out
}

/// Conjugation of a 4x4 matrix by the interleaving permutation.
pub fn conjugate_by_swap(m: &CMat4) -> CMat4 {
    let j = swap_matrix();
    mat_mul4(&mat_mul4(&j, m), &j)
}

/// `J diag(Pi, Pi') J` for the period matrices of a product of two curves.
pub fn assemble_split_period(p: &PeriodBasis, pp: &PeriodBasis) -> Result<CMat4, PeriodError> {
    if p.normalization != pp.normalization {
        return Err(PeriodError::NormalizationMismatch(p.normalization, pp.normalization));
    }
    Ok(assemble_from_blocks(&p.matrix(), &pp.matrix()))
}

pub fn assemble_from_blocks(a: &CMat2, b: &CMat2) -> CMat4 {
    let mut d = [[C::new(0.0, 0.0); 4]; 4];
    for i in 0..2 {
        for j in 0..2 {
            d[i][j] = a[i][j];
            d[i + 2][j + 2] = b[i][j];
        }
    }
    conjugate_by_swap(&d)
}

pub fn det4(m: &CMat4) -> C {
    let mut a = *m;
    let mut det = C::new(1.0, 0.0);
    for c in 0..4 {
        let p = (c..4).max_by(|&x, &y| a[x][c].norm().total_cmp(&a[y][c].norm())).expect("nonempty");
        if a[p][c].norm() == 0.0 {
            return C::new(0.0, 0.0);
        }
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= a[c][c];
        for r in c + 1..4 {
            let f = a[r][c] / a[c][c];
            let pivot = a[c];
            for (x, v) in a[r].iter_mut().zip(pivot).skip(c) {
                *x -= f * v;
            }
        }
    }
    det
}

fn mat_mul2(a: &CMat2, b: &CMat2) -> CMat2 {
    let mut out = [[C::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// Frobenius norm of `theta_dR Pi - Pi' theta_B`.
pub fn isogeny_residual(theta_dr: &CMat2, p: &PeriodBasis, pp: &PeriodBasis, theta_b: &CMat2) -> f64 {
    let l = mat_mul2(theta_dr, &p.matrix());
    let r = mat_mul2(&pp.matrix(), theta_b);
    let mut s = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            s += (l[i][j] - r[i][j]).norm_sqr();
        }
    }
    s.sqrt()
}

/// `x + y i` as a complex matrix entry from exact Gaussian rational parts.
pub fn gaussian(re: &Q, im: &Q) -> C {
    C::new(re.to_f64(), im.to_f64())
}

pub fn scalar2(v: C) -> CMat2 {
    let z = C::new(0.0, 0.0);
    [[v, z], [z, v]]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PeriodCheck {
    Legendre,
    Split,
    Isogeny,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckLine {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
}

impl CheckLine {
    pub fn passed(&self) -> bool {
        self.residual.is_finite() && self.residual < self.tolerance
    }
}

pub const LEGENDRE_TOL: f64 = 1e-9;
pub const SPLIT_DET_TOL: f64 = 1e-12;
pub const ISOGENY_TOL: f64 = 1e-10;

/// Residuals of the requested identities for `curve`.
pub fn check_curve(curve: &CurveSpec, checks: &[PeriodCheck]) -> Result<(PeriodBasis, Vec<CheckLine>), PeriodError> {
    let raw = elliptic_periods(curve)?;
    let scaled = raw.to_scaled();
    let mut out = Vec::new();
    for c in checks {
        match c {
            PeriodCheck::Legendre => {
                out.push(CheckLine { name: "legendre raw".into(), residual: legendre_residual(&raw), tolerance: LEGENDRE_TOL });
                out.push(CheckLine { name: "legendre scaled".into(), residual: legendre_residual(&scaled), tolerance: LEGENDRE_TOL });
            }
            PeriodCheck::Split => {
                let m = assemble_split_period(&scaled, &scaled)?;
                let want = scaled.det() * scaled.det();
                out.push(CheckLine {
                    name: "split det product".into(),
                    residual: (det4(&m) - want).norm() / want.norm().max(1.0),
                    tolerance: SPLIT_DET_TOL,
                });
                let back = conjugate_by_swap(&m);
                let orig = assemble_from_blocks(&scaled.matrix(), &scaled.matrix());
                let diff = (0..4).flat_map(|i| (0..4).map(move |j| (i, j))).map(|(i, j)| (conjugate_by_swap(&back)[i][j] - orig[i][j]).norm()).fold(0.0, f64::max);
                out.push(CheckLine { name: "split involution".into(), residual: diff, tolerance: SPLIT_DET_TOL });
            }
            PeriodCheck::Isogeny => {
                for n in [2i64, 3] {
                    let t = scalar2(C::new(n as f64, 0.0));
                    out.push(CheckLine { name: format!("isogeny [{n}]"), residual: isogeny_residual(&t, &raw, &raw, &t), tolerance: ISOGENY_TOL });
                }
            }
        }
    }
    Ok((raw, out))
}
