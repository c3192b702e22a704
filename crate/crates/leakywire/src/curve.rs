//! Curvature profiles, curve reconstruction and tube geometry.
//!
//! A planar curve is specified *curvature-first*: the signed curvature
//! `gamma(s)` determines the curve in the rotated frame through
//!
//! ```text
//! Gamma_1(s) = int_0^s cos(-int_0^t gamma(u) du) dt
//! Gamma_2(s) = int_0^s sin(-int_0^t gamma(u) du) dt
//! ```
//!
//! so that `Gamma(0) = (0, 0)` and `Gamma'(0) = (1, 0)`. The running
//! turning angle `int_0^t gamma` is accumulated once per profile on a fine
//! uniform grid with Gauss-Legendre panels and interpolated by quintic
//! Hermite polynomials (gamma and gamma' are available everywhere, so the
//! interpolant is exact to machine precision for the smooth profiles this
//! crate works with). Note that the choice of the initial point `s = 0`
//! matters for the tube conditions; use [`CurvatureProfile::rebased`] to
//! move it.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::GaussLegendre;

/// Signed curvature profile of the curve.
///
/// Periodic kinds (`Fourier`, `Constant`) describe one period of length `L`;
/// decaying kinds (`Sech`, `Algebraic`) describe asymptotically straight
/// curves on the whole line. Fourier profiles have no constant term, which
/// makes the zero-mean assumption structural.
#[derive(Debug, Clone, PartialEq)]
pub enum CurvatureProfile {
    /// `gamma(s) = sum_k cos[k-1] cos(2 pi k s / L) + sin[k-1] sin(2 pi k s / L)`
    Fourier {
        period: f64,
        cos: Vec<f64>,
        sin: Vec<f64>,
    },
    /// Constant curvature (violates zero mean; kept for circle tests).
    Constant { value: f64, period: f64 },
    /// `gamma(s) = c sech(s / w)`
    Sech { amplitude: f64, width: f64 },
    /// `gamma(s) = c (1 + (s/w)^2)^(-tau/2)`, power tail `|s|^
    /// {-tau}`
    Algebraic {
        amplitude: f64,
        tail_exponent: f64,
        width: f64,
    },
}

impl CurvatureProfile {
    pub fn fourier(period: f64, cos: Vec<f64>, sin: Vec<f64>) -> Self {
        CurvatureProfile::Fourier { period, cos, sin }
    }

    /// Single-harmonic sine profile `amp * sin(2 pi k s / L)`.
    pub fn sine(period: f64, amplitude: f64, harmonic: usize) -> Self {
        let mut sin = vec![0.0; harmonic];
        sin[harmonic - 1] = amplitude;
        CurvatureProfile::Fourier {
            period,
            cos: Vec::new(),
            sin,
        }
    }

    pub fn zero(period: f64) -> Self {
        CurvatureProfile::Fourier {
            period,
            cos: Vec::new(),
            sin: Vec::new(),
        }
    }

    pub fn is_periodic(&self) -> bool {
        matches!(
            self,
            CurvatureProfile::Fourier { .. } | CurvatureProfile::Constant { .. }
        )
    }

    pub fn period(&self) -> Option<f64> {
        match self {
            CurvatureProfile::Fourier { period, .. } => Some(*period),
            CurvatureProfile::Constant { period, .. } => Some(*period),
            _ => None,
        }
    }

    pub fn gamma(&self, s: f64) -> f64 {
        match self {
            CurvatureProfile::Fourier { period, cos, sin } => {
                let w = 2.0 * std::f64::consts::PI / period;
                let mut acc = 0.0;
                for (k, a) in cos.iter().enumerate() {
                    acc += a * ((k + 1) as f64 * w * s).cos();
                }
                for (k, b) in sin.iter().enumerate() {
                    acc += b * ((k + 1) as f64 * w * s).sin();
                }
                acc
            }
            CurvatureProfile::Constant { value, .. } => *value,
            CurvatureProfile::Sech { amplitude, width } => {
                let x = s / width;
                amplitude / x.cosh()
            }
            CurvatureProfile::Algebraic {
                amplitude,
                tail_exponent,
                width,
            } => {
                let x = s / width;
                amplitude * (1.0 + x * x).powf(-tail_exponent / 2.0)
            }
        }
    }

    pub fn gamma_d1(&self, s: f64) -> f64 {
        match self {
            CurvatureProfile::Fourier { period, cos, sin } => {
                let w = 2.0 * std::f64::consts::PI / period;
                let mut acc = 0.0;
                for (k, a) in cos.iter().enumerate() {
                    let wk = (k + 1) as f64 * w;
                    acc -= a * wk * (wk * s).sin();
                }
                for (k, b) in sin.iter().enumerate() {
                    let wk = (k + 1) as f64 * w;
                    acc += b * wk * (wk * s).cos();
                }
                acc
            }
            CurvatureProfile::Constant { .. } => 0.0,
            CurvatureProfile::Sech { amplitude, width } => {
                let x = s / width;
                -amplitude / width * x.tanh() / x.cosh()
            }
            CurvatureProfile::Algebraic {
                amplitude,
                tail_exponent,
                width,
            } => {
                let x = s / width;
                -amplitude * tail_exponent / width * x * (1.0 + x * x).powf(-tail_exponent / 2.0 - 1.0)
            }
        }
    }

    pub fn gamma_d2(&self, s: f64) -> f64 {
        match self {
            CurvatureProfile::Fourier { period, cos, sin } => {
                let w = 2.0 * std::f64::consts::PI / period;
                let mut acc = 0.0;
                for (k, a) in cos.iter().enumerate() {
                    let wk = (k + 1) as f64 * w;
                    acc -= a * wk * wk * (wk * s).cos();
                }
                for (k, b) in sin.iter().enumerate() {
                    let wk = (k + 1) as f64 * w;
                    acc -= b * wk * wk * (wk * s).sin();
                }
                acc
            }
            CurvatureProfile::Constant { .. } => 0.0,
            CurvatureProfile::Sech { amplitude, width } => {
                let x = s / width;
                let sech = 1.0 / x.cosh();
                let tanh = x.tanh();
                amplitude / (width * width) * (sech * tanh * tanh - sech * sech * sech)
            }
            CurvatureProfile::Algebraic {
                amplitude,
                tail_exponent,
                width,
            } => {
                let x = s / width;
                let q = 1.0 + x * x;
                -amplitude * tail_exponent / (width * width)
                    * q.powf(-tail_exponent / 2.0 - 2.0)
                    * (q - (tail_exponent + 2.0) * x * x)
            }
        }
    }

    /// Largest harmonic index of a Fourier profile (0 for gamma = 0).
    pub fn max_harmonic(&self) -> usize {
        match self {
            CurvatureProfile::Fourier { cos, sin, .. } => cos.len().max(sin.len()),
            _ => 0,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            CurvatureProfile::Fourier { cos, sin, .. } => {
                cos.iter().all(|&v| v == 0.0) && sin.iter().all(|&v| v == 0.0)
            }
            CurvatureProfile::Constant { value, .. } => *value == 0.0,
            _ => false,
        }
    }

    /// Move the initial point: returns the profile of `s -> gamma(s + shift)`.
    /// Only meaningful for periodic kinds, where the choice of `s = 0`
    /// affects the tube assumptions.
    pub fn rebased(&self, shift: f64) -> CurvatureProfile {
        match self {
            CurvatureProfile::Fourier { period, cos, sin } => {
                let w = 2.0 * std::f64::consts::PI / period;
                let kmax = cos.len().max(sin.len());
                let mut new_cos = vec![0.0; kmax];
                let mut new_sin = vec![0.0; kmax];
                for k in 0..kmax {
                    let a = cos.get(k).copied().unwrap_or(0.0);
                    let b = sin.get(k).copied().unwrap_or(0.0);
                    let phi = (k + 1) as f64 * w * shift;
                    new_cos[k] = a * phi.cos() + b * phi.sin();
                    new_sin[k] = b * phi.cos() - a * phi.sin();
                }
                CurvatureProfile::Fourier {
                    period: *period,
                    cos: new_cos,
                    sin: new_sin,
                }
            }
            other => other.clone(),
        }
    }

    /// Sup norms (gamma_+, gamma'_+, gamma''_+) over one period (periodic
    /// kinds) by a dense scan with one local quadratic polish per
    /// candidate extremum.
    pub fn sup_norms(&self) -> (f64, f64, f64) {
        let span = match self.period() {
            Some(l) => (0.0, l),
            None => (-60.0, 60.0),
        };
        (
            scan_max(span, |s| self.gamma(s)),
            scan_max(span, |s| self.gamma_d1(s)),
            scan_max(span, |s| self.gamma_d2(s)),
        )
    }
}

/// Dense scan of |f| with a single parabolic polish around each local
/// maximum of the sampled values.
fn scan_max((lo, hi): (f64, f64), f: impl Fn(f64) -> f64) -> f64 {
    let n = 4096usize;
    let h = (hi - lo) / n as f64;
    let vals: Vec<f64> = (0..=n).map(|i| f(lo + i as f64 * h).abs()).collect();
    let mut best = 0.0f64;
    for i in 0..=n {
        best = best.max(vals[i]);
        if i > 0 && i < n && vals[i] >= vals[i - 1] && vals[i] >= vals[i + 1] {
            // parabola through the three samples; evaluate f at its vertex
            let denom = vals[i - 1] - 2.0 * vals[i] + vals[i + 1];
            if denom.abs() > 1e-300 {
                let delta = 0.5 * (vals[i - 1] - vals[i + 1]) / denom;
                if delta.abs() <= 1.0 {
                    let s = lo + (i as f64 + delta) * h;
                    best = best.max(f(s).abs());
                }
            }
        }
    }
    best
}

// ---------------------------------------------------------------------------
// JSON document form
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileDoc {
    kind: String,
    #[serde(rename = "L")]
    l: Option<f64>,
    sin: Option<Vec<f64>>,
    cos: Option<Vec<f64>>,
    shift: Option<f64>,
    name: Option<String>,
    c: Option<f64>,
    tau: Option<f64>,
    w: Option<f64>,
}

fn de_err<E: serde::de::Error>(msg: String) -> E {
    E::custom(msg)
}

impl<'de> Deserialize<'de> for CurvatureProfile {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = ProfileDoc::deserialize(d)?;
        let forbid = |cond: bool, field: &str, kind: &str| {
            if cond {
                Err(de_err(format!(
                    "profile field `{field}` is not allowed for kind `{kind}`"
                )))
            } else {
                Ok(())
            }
        };
        match doc.kind.as_str() {
            "fourier" => {
                forbid(doc.name.is_some(), "name", "fourier")?;
                forbid(doc.c.is_some(), "c", "fourier")?;
                forbid(doc.tau.is_some(), "tau", "fourier")?;
                forbid(doc.w.is_some(), "w", "fourier")?;
                let period = doc
                    .l
                    .ok_or_else(|| de_err::<D::Error>("fourier profile requires `L`".into()))?;
                if !(period > 0.0) {
                    return Err(de_err("fourier profile requires L > 0".into()));
                }
                // the cosine array carries the constant term at index 0,
                // which the zero-mean assumption forbids
                let mut cos = doc.cos.unwrap_or_default();
                if let Some(&dc) = cos.first() {
                    if dc != 0.0 {
                        return Err(de_err(format!(
                            "index-0 cosine coefficient (constant term) must be 0, got {dc}; \
                             a nonzero mean violates the zero-mean assumption"
                        )));
                    }
                    cos.remove(0);
                }
                let sin = doc.sin.unwrap_or_default();
                let profile = CurvatureProfile::Fourier { period, cos, sin };
                Ok(match doc.shift {
                    Some(delta) => profile.rebased(delta),
                    None => profile,
                })
            }
            "preset" => {
                forbid(doc.sin.is_some(), "sin", "preset")?;
                forbid(doc.cos.is_some(), "cos", "preset")?;
                forbid(doc.shift.is_some(), "shift", "preset")?;
                let name = doc
                    .name
                    .ok_or_else(|| de_err::<D::Error>("preset profile requires `name`".into()))?;
                let c = doc
                    .c
                    .ok_or_else(|| de_err::<D::Error>("preset profile requires `c`".into()))?;
                match name.as_str() {
                    "sech" => {
                        forbid(doc.tau.is_some(), "tau", "preset sech")?;
                        forbid(doc.l.is_some(), "L", "preset sech")?;
                        Ok(CurvatureProfile::Sech {
                            amplitude: c,
                            width: doc.w.unwrap_or(1.0),
                        })
                    }
                    "algebraic" => {
                        forbid(doc.l.is_some(), "L", "preset algebraic")?;
                        let tau = doc.tau.ok_or_else(|| {
                            de_err::<D::Error>("preset `algebraic` requires `tau`".into())
                        })?;
                        Ok(CurvatureProfile::Algebraic {
                            amplitude: c,
                            tail_exponent: tau,
                            width: doc.w.unwrap_or(1.0),
                        })
                    }
                    "constant" => {
                        forbid(doc.tau.is_some(), "tau", "preset constant")?;
                        forbid(doc.w.is_some(), "w", "preset constant")?;
                        let period = doc.l.ok_or_else(|| {
                            de_err::<D::Error>("preset `constant` requires `L`".into())
                        })?;
                        Ok(CurvatureProfile::Constant { value: c, period })
                    }
                    other => Err(de_err(format!("unknown preset name `{other}`"))),
                }
            }
            other => Err(de_err(format!("unknown profile kind `{other}`"))),
        }
    }
}

impl Serialize for CurvatureProfile {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(None)?;
        match self {
            CurvatureProfile::Fourier { period, cos, sin } => {
                m.serialize_entry("kind", "fourier")?;
                m.serialize_entry("L", period)?;
                m.serialize_entry("sin", sin)?;
                // re-emit with the leading constant-term slot
                let mut cos_doc = Vec::with_capacity(cos.len() + 1);
                if !cos.is_empty() {
                    cos_doc.push(0.0);
                    cos_doc.extend_from_slice(cos);
                }
                m.serialize_entry("cos", &cos_doc)?;
            }
            CurvatureProfile::Constant { value, period } => {
                m.serialize_entry("kind", "preset")?;
                m.serialize_entry("name", "constant")?;
                m.serialize_entry("c", value)?;
                m.serialize_entry("L", period)?;
            }
            CurvatureProfile::Sech { amplitude, width } => {
                m.serialize_entry("kind", "preset")?;
                m.serialize_entry("name", "sech")?;
                m.serialize_entry("c", amplitude)?;
                if *width != 1.0 {
                    m.serialize_entry("w", width)?;
                }
            }
            CurvatureProfile::Algebraic {
                amplitude,
                tail_exponent,
                width,
            } => {
                m.serialize_entry("kind", "preset")?;
                m.serialize_entry("name", "algebraic")?;
                m.serialize_entry("c", amplitude)?;
                m.serialize_entry("tau", tail_exponent)?;
                if *width != 1.0 {
                    m.serialize_entry("w", width)?;
                }
            }
        }
        m.end()
    }
}

// ---------------------------------------------------------------------------
// Curve reconstruction
// ---------------------------------------------------------------------------

const GL_ORDER: usize = 16;
const PHASE_PANELS: usize = 4096;

/// Quintic Hermite value on [0, 1] from endpoint values and first/second
/// derivatives (already scaled by the interval length).
#[inline]
fn quintic(u: f64, f0: f64, d0: f64, c0: f64, f1: f64, d1: f64, c1: f64) -> f64 {
    let u2 = u * u;
    let u3 = u2 * u;
    let u4 = u3 * u;
    let u5 = u4 * u;
    let h0 = 1.0 - 10.0 * u3 + 15.0 * u4 - 6.0 * u5;
    let h1 = u - 6.0 * u3 + 8.0 * u4 - 3.0 * u5;
    let h2 = 0.5 * u2 - 1.5 * u3 + 1.5 * u4 - 0.5 * u5;
    let h3 = 10.0 * u3 - 15.0 * u4 + 6.0 * u5;
    let h4 = -4.0 * u3 + 7.0 * u4 - 3.0 * u5;
    let h5 = 0.5 * u3 - u4 + 0.5 * u5;
    f0 * h0 + d0 * h1 + c0 * h2 + f1 * h3 + d1 * h4 + c1 * h5
}

/// Reconstructed curve with its cached turning angle and arclength-prefix
/// integrals. All evaluations are read-only after construction.
#[derive(Debug, Clone)]
pub struct CurveModel {
    pub profile: CurvatureProfile,
    t_lo: f64,
    h: f64,
    panels: usize,
    phase_nodes: Vec<f64>,
    prefix: Vec<(f64, f64)>,
    total_phase: f64,
    gl: GaussLegendre,
    period: Option<f64>,
    origin: (f64, f64),
    origin_phase: f64,
}

impl CurveModel {
    /// Build the model. For periodic profiles the cache covers one period
    /// starting at 0 and evaluation anywhere on the line uses the exact
    /// period-translation law; for decaying profiles `span` must cover all
    /// later evaluation points and must contain 0.
    pub fn new(profile: &CurvatureProfile, span: Option<(f64, f64)>) -> Result<Self> {
        let gl = GaussLegendre::new(GL_ORDER);
        let (t_lo, t_hi, panels) = match profile.period() {
            Some(l) => {
                let p = PHASE_PANELS.max(64 * profile.max_harmonic());
                (0.0, l, p)
            }
            None => {
                let (a, b) = span.ok_or_else(|| Error::InvalidParameter {
                    name: "span".into(),
                    message: "decaying profiles need an explicit span".into(),
                })?;
                if !(a <= 0.0 && b >= 0.0 && b > a) {
                    return Err(Error::InvalidParameter {
                        name: "span".into(),
                        message: format!("span ({a}, {b}) must contain 0"),
                    });
                }
                let p = PHASE_PANELS.max((16.0 * (b - a)).ceil() as usize);
                (a, b, p)
            }
        };
        let h = (t_hi - t_lo) / panels as f64;

        // turning angle at panel nodes, with a refinement-based error check
        let mut phase_nodes = vec![0.0; panels + 1];
        let mut quad_err = 0.0f64;
        for i in 0..panels {
            let a = t_lo + i as f64 * h;
            let b = a + h;
            let coarse = gl.integrate(a, b, |t| profile.gamma(t));
            let mid = 0.5 * (a + b);
            let fine =
                gl.integrate(a, mid, |t| profile.gamma(t)) + gl.integrate(mid, b, |t| profile.gamma(t));
            quad_err += (coarse - fine).abs();
            phase_nodes[i + 1] = phase_nodes[i] + fine;
        }
        let total_phase = phase_nodes[panels];
        if quad_err > 1e-9 * (1.0 + total_phase.abs()) {
            return Err(Error::Quadrature(format!(
                "turning-angle panels did not converge (estimated error {quad_err:.3e}); \
                 the profile is too rough for the internal subdivision"
            )));
        }

        let mut model = CurveModel {
            profile: profile.clone(),
            t_lo,
            h,
            panels,
            phase_nodes,
            prefix: Vec::new(),
            total_phase,
            gl,
            period: profile.period(),
            origin: (0.0, 0.0),
            origin_phase: 0.0,
        };

        // anchor the turning angle so that phase(0) = 0
        model.origin_phase = model.phase_raw(0.0);
        for v in model.phase_nodes.iter_mut() {
            *v -= model.origin_phase;
        }
        model.total_phase = model.phase_nodes[model.panels] - model.phase_nodes[0];
        model.origin_phase = 0.0;

        // prefix integrals of the unit tangent over the panels
        let mut prefix = Vec::with_capacity(panels + 1);
        prefix.push((0.0, 0.0));
        let mut acc = (0.0, 0.0);
        for i in 0..panels {
            let a = model.t_lo + i as f64 * model.h;
            let b = a + model.h;
            let cx = model.gl.integrate(a, b, |t| model.phase_local(t).map(|p| (-p).cos()).unwrap());
            let cy = model.gl.integrate(a, b, |t| model.phase_local(t).map(|p| (-p).sin()).unwrap());
            acc = (acc.0 + cx, acc.1 + cy);
            prefix.push(acc);
        }
        model.prefix = prefix;

        // anchor Gamma(0) = (0, 0)
        model.origin = model.point_local(0.0)?;
        Ok(model)
    }

    fn phase_raw(&self, t: f64) -> f64 {
        // quintic Hermite within the owning panel
        let idx = (((t - self.t_lo) / self.h).floor() as isize).clamp(0, self.panels as isize - 1)
            as usize;
        let a = self.t_lo + idx as f64 * self.h;
        let u = (t - a) / self.h;
        let b = a + self.h;
        quintic(
            u,
            self.phase_nodes[idx],
            self.h * self.profile.gamma(a),
            self.h * self.h * self.profile.gamma_d1(a),
            self.phase_nodes[idx + 1],
            self.h * self.profile.gamma(b),
            self.h * self.h * self.profile.gamma_d1(b),
        )
    }

    fn in_span(&self, t: f64) -> bool {
        t >= self.t_lo - 1e-12 && t <= self.t_lo + self.h * self.panels as f64 + 1e-12
    }

    fn phase_local(&self, t: f64) -> Result<f64> {
        if !self.in_span(t) {
            return Err(Error::InvalidParameter {
                name: "s".into(),
                message: format!("evaluation point {t} outside the cached span"),
            });
        }
        Ok(self.phase_raw(t))
    }

    fn point_local(&self, t: f64) -> Result<(f64, f64)> {
        if !self.in_span(t) {
            return Err(Error::InvalidParameter {
                name: "s".into(),
                message: format!("evaluation point {t} outside the cached span"),
            });
        }
        let rel = (t - self.t_lo) / self.h;
        let idx = (rel.floor() as isize).clamp(0, self.panels as isize - 1) as usize;
        let a = self.t_lo + idx as f64 * self.h;
        let base = self.prefix[idx];
        let cx = self.gl.integrate(a, t, |x| (-self.phase_raw(x)).cos());
        let cy = self.gl.integrate(a, t, |x| (-self.phase_raw(x)).sin());
        Ok((base.0 + cx, base.1 + cy))
    }

    /// Running turning angle `int_0^s gamma`.
    pub fn phase(&self, s: f64) -> Result<f64> {
        match self.period {
            None => self.phase_local(s),
            Some(l) => {
                let q = (s / l).floor();
                let r = s - q * l;
                Ok(q * self.total_phase + self.phase_local(r.clamp(0.0, l))?)
            }
        }
    }

    /// Curve point in the rotated frame; `Gamma(0) = (0,0)`.
    pub fn point(&self, s: f64) -> Result<(f64, f64)> {
        match self.period {
            None => {
                let p = self.point_local(s)?;
                Ok((p.0 - self.origin.0, p.1 - self.origin.1))
            }
            Some(l) => {
                let mut q = (s / l).floor() as i64;
                let mut r = s - q as f64 * l;
                if r < 0.0 {
                    r += l;
                    q -= 1;
                }
                // Gamma(qL + r) = Gamma(qL) + R(-q * total) Gamma(r)
                let (kx, ky) = (self.prefix[self.panels].0, self.prefix[self.panels].1);
                let (mut gx, mut gy) = (0.0, 0.0);
                let step = self.total_phase;
                if q >= 0 {
                    for p in 0..q {
                        let ang = -(p as f64) * step;
                        gx += ang.cos() * kx - ang.sin() * ky;
                        gy += ang.sin() * kx + ang.cos() * ky;
                    }
                } else {
                    for p in q..0 {
                        let ang = -(p as f64) * step;
                        gx -= ang.cos() * kx - ang.sin() * ky;
                        gy -= ang.sin() * kx + ang.cos() * ky;
                    }
                }
                let local = self.point_local(r)?;
                let ang = -(q as f64) * step;
                Ok((
                    gx + ang.cos() * local.0 - ang.sin() * local.1,
                    gy + ang.sin() * local.0 + ang.cos() * local.1,
                ))
            }
        }
    }

    /// Unit tangent `Gamma'(s) = (cos(-phase), sin(-phase))`.
    pub fn tangent(&self, s: f64) -> Result<(f64, f64)> {
        let p = self.phase(s)?;
        Ok(((-p).cos(), (-p).sin()))
    }

    /// Tube map `Phi(s, u) = (Gamma_1 - u Gamma_2', Gamma_2 + u Gamma_1')`.
    pub fn tube_point(&self, s: f64, u: f64) -> Result<(f64, f64)> {
        let g = self.point(s)?;
        let t = self.tangent(s)?;
        Ok((g.0 - u * t.1, g.1 + u * t.0))
    }

    pub fn total_phase(&self) -> f64 {
        self.total_phase
    }
}

/// One reconstructed curve sample.
#[derive(Debug, Clone, Serialize)]
pub struct CurveSample {
    pub s: f64,
    pub point: (f64, f64),
    pub tangent: (f64, f64),
    pub phase: f64,
}

/// Lattice vector `(K_1, K_2) = Gamma(L) - Gamma(0)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PeriodVector {
    pub k1: f64,
    pub k2: f64,
}

/// Tube of halfwidth `a` around the curve.
#[derive(Debug, Clone)]
pub struct TubeMap {
    pub curve: CurveModel,
    pub halfwidth: f64,
}

impl TubeMap {
    pub fn new(profile: &CurvatureProfile, halfwidth: f64) -> Result<Self> {
        if !(halfwidth > 0.0) {
            return Err(Error::InvalidParameter {
                name: "a".into(),
                message: "tube halfwidth must be positive".into(),
            });
        }
        Ok(TubeMap {
            curve: CurveModel::new(profile, None)?,
            halfwidth,
        })
    }

    pub fn eval(&self, s: f64, u: f64) -> Result<(f64, f64)> {
        self.curve.tube_point(s, u)
    }

    /// Metric factor `1 + u gamma(s)`; must stay positive on the tube.
    pub fn jacobian_factor(&self, s: f64, u: f64) -> f64 {
        1.0 + u * self.curve.profile.gamma(s)
    }
}

/// Reconstruct curve samples on the given arclength grid.
pub fn reconstruct_curve(
    profile: &CurvatureProfile,
    s_grid: &[f64],
) -> Result<Vec<CurveSample>> {
    if s_grid.is_empty() {
        return Err(Error::InvalidParameter {
            name: "s_grid".into(),
            message: "grid must be nonempty".into(),
        });
    }
    let span = if profile.is_periodic() {
        None
    } else {
        let lo = s_grid.iter().cloned().fold(0.0f64, f64::min);
        let hi = s_grid.iter().cloned().fold(0.0f64, f64::max);
        Some((lo.min(0.0) - 1.0, hi.max(0.0) + 1.0))
    };
    let model = CurveModel::new(profile, span)?;
    s_grid
        .iter()
        .map(|&s| {
            Ok(CurveSample {
                s,
                point: model.point(s)?,
                tangent: model.tangent(s)?,
                phase: model.phase(s)?,
            })
        })
        .collect()
}

/// `(K_1, K_2)` of a periodic profile.
pub fn period_vector(profile: &CurvatureProfile) -> Result<PeriodVector> {
    let l = profile.period().ok_or_else(|| Error::InvalidParameter {
        name: "profile".into(),
        message: "period vector requires a periodic profile".into(),
    })?;
    let model = CurveModel::new(profile, None)?;
    let p = model.point(l)?;
    Ok(PeriodVector { k1: p.0, k2: p.1 })
}

// ---------------------------------------------------------------------------
// Assumption checks
// ---------------------------------------------------------------------------

/// One pass/fail entry of the assumption report.
#[derive(Debug, Clone, Serialize)]
pub struct CheckItem {
    pub pass: bool,
    pub value: f64,
    pub threshold: f64,
    pub detail: String,
}

/// Numerical status of the tube assumptions for a periodic profile. The
/// injectivity entry is decided by sampling and is labeled accordingly; it
/// is never a certificate.
#[derive(Debug, Clone, Serialize)]
pub struct AssumptionReport {
    pub halfwidth: f64,
    /// zero mean of gamma over one period
    pub zero_mean: CheckItem,
    /// K_1 > 0
    pub k1_positive: CheckItem,
    /// sampled injectivity of the tube map on one period
    pub injectivity_sampled: CheckItem,
    /// tube stays inside the strip (0, K_1) x R
    pub strip_containment: CheckItem,
    /// sufficient condition max |int gamma| < pi/2
    pub phase_sufficient: CheckItem,
    /// metric factor margin a * gamma_+ < 1
    pub metric_margin: CheckItem,
    /// sampled estimate of the largest admissible halfwidth; None when the
    /// curve is straight and every halfwidth works
    pub a0_estimate: Option<f64>,
}

impl AssumptionReport {
    /// (A.3)-(A.5) combined verdict at the requested halfwidth.
    pub fn all_pass(&self) -> bool {
        self.zero_mean.pass
            && self.k1_positive.pass
            && self.injectivity_sampled.pass
            && self.strip_containment.pass
            && self.metric_margin.pass
    }
}

fn segment_distance(a1: (f64, f64), b1: (f64, f64), a2: (f64, f64), b2: (f64, f64)) -> f64 {
    // closest distance between two 2D segments
    fn point_seg(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
        let ab = (b.0 - a.0, b.1 - a.1);
        let ap = (p.0 - a.0, p.1 - a.1);
        let len2 = ab.0 * ab.0 + ab.1 * ab.1;
        let t = if len2 > 0.0 {
            ((ap.0 * ab.0 + ap.1 * ab.1) / len2).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let d = (ap.0 - t * ab.0, ap.1 - t * ab.1);
        (d.0 * d.0 + d.1 * d.1).sqrt()
    }
    fn orient(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> f64 {
        (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)
    }
    let d1 = orient(a1, b1, a2);
    let d2 = orient(a1, b1, b2);
    let d3 = orient(a2, b2, a1);
    let d4 = orient(a2, b2, b1);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return 0.0; // proper intersection
    }
    point_seg(a2, a1, b1)
        .min(point_seg(b2, a1, b1))
        .min(point_seg(a1, a2, b2))
        .min(point_seg(b1, a2, b2))
}

/// Sampled injectivity sweep: normal segments at `n` arclength midpoints
/// must stay pairwise separated in proportion to their arclength distance.
/// Returns (pass, worst ratio of observed distance to the locally expected
/// separation).
fn injectivity_sweep(model: &CurveModel, a: f64, gamma_plus: f64, n: usize) -> Result<(bool, f64)> {
    let l = model.period.expect("periodic profile");
    let margin = (1.0 - a * gamma_plus).max(0.0);
    if margin <= 0.0 {
        return Ok((false, 0.0));
    }
    let mut segs = Vec::with_capacity(n);
    for i in 0..n {
        let s = (i as f64 + 0.5) * l / n as f64;
        segs.push((
            s,
            model.tube_point(s, -a)?,
            model.tube_point(s, a)?,
        ));
    }
    let mut worst = f64::INFINITY;
    for i in 0..n {
        for j in (i + 2)..n {
            if i == 0 && j == n - 1 {
                continue; // wrap-adjacent
            }
            let ds = (segs[j].0 - segs[i].0).min(l - (segs[j].0 - segs[i].0));
            let expected = margin * ds;
            let dist = segment_distance(segs[i].1, segs[i].2, segs[j].1, segs[j].2);
            let ratio = dist / expected;
            if ratio < worst {
                worst = ratio;
            }
            if worst <= 0.0 {
                return Ok((false, 0.0));
            }
        }
    }
    Ok((worst > 0.5, worst))
}

fn strip_sweep(model: &CurveModel, a: f64, k1: f64, n: usize) -> Result<(bool, f64)> {
    let l = model.period.expect("periodic profile");
    let mut min_x = f64::INFINITY;
    let mut max_x = f64::NEG_INFINITY;
    for i in 0..n {
        let s = (i as f64 + 0.5) * l / n as f64;
        for u in [-a, a] {
            let p = model.tube_point(s, u)?;
            min_x = min_x.min(p.0);
            max_x = max_x.max(p.0);
        }
    }
    let pass = min_x > 0.0 && max_x < k1;
    Ok((pass, min_x.min(k1 - max_x)))
}

const INJECTIVITY_SAMPLES: usize = 400;

/// Check assumptions (A.1)-(A.5) for a periodic profile at tube halfwidth
/// `a`. All failures are report entries, not errors.
pub fn check_assumptions(profile: &CurvatureProfile, a: f64) -> Result<AssumptionReport> {
    let l = profile.period().ok_or_else(|| Error::InvalidParameter {
        name: "profile".into(),
        message: "assumption report requires a periodic profile".into(),
    })?;
    let model = CurveModel::new(profile, None)?;
    let (gamma_plus, _, _) = profile.sup_norms();

    let mean = model.total_phase() / l;
    let zero_mean = CheckItem {
        pass: model.total_phase().abs() <= 1e-10,
        value: model.total_phase(),
        threshold: 1e-10,
        detail: format!("integral of gamma over one period (mean {mean:.3e})"),
    };

    let pv = period_vector(profile)?;
    let k1_positive = CheckItem {
        pass: pv.k1 > 0.0,
        value: pv.k1,
        threshold: 0.0,
        detail: "K_1 must be positive".into(),
    };

    // sufficient condition for (A.4)-(A.5): max |int_0^t gamma| < pi / 2
    let mut max_phase = 0.0f64;
    for i in 0..=2048 {
        let t = i as f64 * l / 2048.0;
        max_phase = max_phase.max(model.phase(t)?.abs());
    }
    let phase_sufficient = CheckItem {
        pass: max_phase < std::f64::consts::FRAC_PI_2,
        value: max_phase,
        threshold: std::f64::consts::FRAC_PI_2,
        detail: "sufficient (not necessary) condition on the turning angle".into(),
    };

    let metric_margin = CheckItem {
        pass: a * gamma_plus < 1.0,
        value: a * gamma_plus,
        threshold: 1.0,
        detail: "a * gamma_+ < 1 keeps the tube metric positive".into(),
    };

    let (inj_pass, inj_ratio) = if metric_margin.pass && zero_mean.pass && k1_positive.pass {
        injectivity_sweep(&model, a, gamma_plus, INJECTIVITY_SAMPLES)?
    } else {
        (false, 0.0)
    };
    let injectivity_sampled = CheckItem {
        pass: inj_pass,
        value: inj_ratio,
        threshold: 0.5,
        detail: format!(
            "sampled ({INJECTIVITY_SAMPLES} normal segments); ratio of observed to expected separation"
        ),
    };

    let (strip_pass, strip_margin) = if k1_positive.pass {
        strip_sweep(&model, a, pv.k1, 2048)?
    } else {
        (false, 0.0)
    };
    let strip_containment = CheckItem {
        pass: strip_pass,
        value: strip_margin,
        threshold: 0.0,
        detail: "tube inside the strip (0, K_1) x R (sampled)".into(),
    };

    // sampled estimate of a_0 by bisection on the combined tube checks
    let a0_estimate = if profile.is_zero() {
        None
    } else if !(zero_mean.pass && k1_positive.pass) {
        Some(0.0)
    } else {
        let admissible = |cand: f64| -> Result<bool> {
            if cand * gamma_plus >= 1.0 {
                return Ok(false);
            }
            let (ok_inj, _) = injectivity_sweep(&model, cand, gamma_plus, 200)?;
            if !ok_inj {
                return Ok(false);
            }
            let (ok_strip, _) = strip_sweep(&model, cand, pv.k1, 512)?;
            Ok(ok_inj && ok_strip)
        };
        let mut hi = if gamma_plus > 0.0 { 1.0 / gamma_plus } else { 4.0 * l };
        let mut lo = 0.0;
        if admissible(hi * (1.0 - 1e-9))? {
            lo = hi;
        } else {
            for _ in 0..40 {
                let mid = 0.5 * (lo + hi);
                if admissible(mid)? {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo < 1e-6 * hi.max(1e-12) {
                    break;
                }
            }
        }
        Some(lo)
    };

    Ok(AssumptionReport {
        halfwidth: a,
        zero_mean,
        k1_positive,
        injectivity_sampled,
        strip_containment,
        phase_sufficient,
        metric_margin,
        a0_estimate,
    })
}

/// Sup norms (gamma_+, gamma'_+, gamma''_+) of a periodic profile.
pub fn sup_norms(profile: &CurvatureProfile) -> (f64, f64, f64) {
    profile.sup_norms()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn straight_line_samples() {
        let p = CurvatureProfile::zero(1.0);
        let samples = reconstruct_curve(&p, &[0.0, 0.5, 1.0]).unwrap();
        for (s, expected) in samples.iter().zip([0.0, 0.5, 1.0]) {
            assert!((s.point.0 - expected).abs() < 1e-12);
            assert!(s.point.1.abs() < 1e-12);
            assert!((s.tangent.0 - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_curvature_closes_circle() {
        let l = 1.0;
        let p = CurvatureProfile::Constant {
            value: 2.0 * PI / l,
            period: l,
        };
        let samples = reconstruct_curve(&p, &[0.0, l]).unwrap();
        assert!((samples[1].point.0 - samples[0].point.0).abs() < 1e-10);
        assert!((samples[1].point.1 - samples[0].point.1).abs() < 1e-10);
        // radius L / 2 pi: the circle's center is at (0, -L/2pi) or (0, +L/2pi)
        let mid = reconstruct_curve(&p, &[l / 2.0]).unwrap();
        assert!((mid[0].point.1.abs() - l / PI).abs() < 1e-10);
    }

    #[test]
    fn sup_norms_single_harmonic() {
        let p = CurvatureProfile::sine(1.0, 0.3, 1);
        let (g0, g1, g2) = sup_norms(&p);
        assert!((g0 - 0.3).abs() < 1e-10);
        assert!((g1 - 0.6 * PI).abs() < 1e-9);
        assert!((g2 - 1.2 * PI * PI).abs() < 1e-8);
    }

    #[test]
    fn sup_norms_zero() {
        let p = CurvatureProfile::zero(2.0);
        assert_eq!(sup_norms(&p), (0.0, 0.0, 0.0));
    }

    #[test]
    fn periodicity_of_period_vector() {
        let p = CurvatureProfile::sine(1.0, 0.3, 1);
        let model = CurveModel::new(&p, None).unwrap();
        let pv = period_vector(&p).unwrap();
        for s in [0.0, 0.25, 0.8, 1.7] {
            let a = model.point(s).unwrap();
            let b = model.point(s + 1.0).unwrap();
            assert!((b.0 - a.0 - pv.k1).abs() < 1e-9, "s={s}");
            assert!((b.1 - a.1 - pv.k2).abs() < 1e-9, "s={s}");
        }
    }

    #[test]
    fn tangent_is_unit() {
        let p = CurvatureProfile::fourier(1.0, vec![0.1], vec![0.3, 0.0, 0.05]);
        let model = CurveModel::new(&p, None).unwrap();
        for i in 0..50 {
            let s = i as f64 * 0.02;
            let t = model.tangent(s).unwrap();
            assert!((t.0 * t.0 + t.1 * t.1 - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn mirror_covariance() {
        let p = CurvatureProfile::sine(1.0, 0.4, 2);
        let m = CurvatureProfile::sine(1.0, -0.4, 2);
        let sp = reconstruct_curve(&p, &[0.3, 0.7, 1.0]).unwrap();
        let sm = reconstruct_curve(&m, &[0.3, 0.7, 1.0]).unwrap();
        for (a, b) in sp.iter().zip(&sm) {
            assert!((a.point.0 - b.point.0).abs() < 1e-11);
            assert!((a.point.1 + b.point.1).abs() < 1e-11);
        }
        let pa = period_vector(&p).unwrap();
        let pb = period_vector(&m).unwrap();
        assert!((pa.k1 - pb.k1).abs() < 1e-11);
        assert!((pa.k2 + pb.k2).abs() < 1e-11);
    }

    #[test]
    fn assumptions_gentle_profile() {
        let p = CurvatureProfile::sine(1.0, 0.3, 1);
        let rep = check_assumptions(&p, 0.05).unwrap();
        assert!(rep.all_pass());
        assert!(rep.phase_sufficient.pass);
        assert!(rep.a0_estimate.unwrap() > 0.05);
    }

    #[test]
    fn assumptions_zero_profile_unbounded_a0() {
        let p = CurvatureProfile::zero(1.0);
        let rep = check_assumptions(&p, 0.1).unwrap();
        assert!(rep.all_pass());
        assert!(rep.a0_estimate.is_none());
    }

    #[test]
    fn assumptions_overlapping_tube_fails() {
        let p = CurvatureProfile::sine(1.0, 4.0 * PI, 1);
        let rep = check_assumptions(&p, 0.2).unwrap();
        assert!(!rep.injectivity_sampled.pass || !rep.metric_margin.pass);
        assert!(!rep.all_pass());
    }

    #[test]
    fn constant_profile_fails_zero_mean() {
        let p = CurvatureProfile::Constant {
            value: 2.0 * PI,
            period: 1.0,
        };
        let rep = check_assumptions(&p, 0.01).unwrap();
        assert!(!rep.zero_mean.pass);
    }

    #[test]
    fn profile_json_round_trip() {
        let text = r#"{"kind":"fourier","L":1.0,"sin":[0.3],"cos":[]}"#;
        let p: CurvatureProfile = serde_json::from_str(text).unwrap();
        assert_eq!(p, CurvatureProfile::sine(1.0, 0.3, 1));
        let back = serde_json::to_string(&p).unwrap();
        let p2: CurvatureProfile = serde_json::from_str(&back).unwrap();
        assert_eq!(p, p2);

        let sech: CurvatureProfile =
            serde_json::from_str(r#"{"kind":"preset","name":"sech","c":0.8}"#).unwrap();
        assert_eq!(
            sech,
            CurvatureProfile::Sech {
                amplitude: 0.8,
                width: 1.0
            }
        );
    }

    #[test]
    fn profile_json_rejects_dc_cosine() {
        let text = r#"{"kind":"fourier","L":1.0,"sin":[],"cos":[0.1]}"#;
        let err = serde_json::from_str::<CurvatureProfile>(text).unwrap_err();
        assert!(err.to_string().contains("index-0 cosine"));
    }

    #[test]
    fn profile_json_rejects_unknown_field() {
        let text = r#"{"kind":"fourier","L":1.0,"sin":[0.3],"cos":[],"amp":2.0}"#;
        assert!(serde_json::from_str::<CurvatureProfile>(text).is_err());
    }

    #[test]
    fn rebase_shifts_evaluation() {
        let p = CurvatureProfile::fourier(2.0, vec![0.2, 0.1], vec![0.3]);
        let q = p.rebased(0.37);
        for i in 0..20 {
            let s = i as f64 * 0.1;
            assert!((q.gamma(s) - p.gamma(s + 0.37)).abs() < 1e-13);
        }
    }
}
