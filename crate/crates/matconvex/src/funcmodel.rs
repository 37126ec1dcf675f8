//! Closed-form function models: the shipped families, Moebius
//! reparametrizations of the argument and affine maps of the value.
//!
//! Derivatives are closed-form only. Plain families use their textbook
//! derivative formulas; an affine inner map contributes a `slope^k`
//! factor; a full Moebius inner map goes through truncated Taylor jets,
//! whose composition reproduces the chain rule exactly up to the
//! requested order.

use serde::{Deserialize, Serialize};

use crate::curve::Curve;
use crate::dd::DoubleDouble;
use crate::error::{Error, Result};
use crate::interval::Interval;

/// Relative slack absorbed when checking that a computed Moebius image
/// sits inside a target domain; endpoint images round by a few ulps.
const CONTAINMENT_SLACK: f64 = 1e-12;

/// Fractional-linear map `t -> (a t + b)/(c t + d)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MobiusMap {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl MobiusMap {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let m = MobiusMap { a, b, c, d };
        if m.determinant() == 0.0 {
            return Err(Error::DegenerateMobius);
        }
        Ok(m)
    }

    pub fn identity() -> Self {
        MobiusMap {
            a: 1.0,
            b: 0.0,
            c: 0.0,
            d: 1.0,
        }
    }

    pub fn determinant(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn is_affine(&self) -> bool {
        self.c == 0.0
    }

    pub fn apply(&self, t: f64) -> f64 {
        (self.a * t + self.b) / (self.c * t + self.d)
    }

    fn apply_dd(&self, t: f64) -> DoubleDouble {
        let t = DoubleDouble::from_f64(t);
        let num = t.mul_f64(self.a).add(DoubleDouble::from_f64(self.b));
        let den = t.mul_f64(self.c).add(DoubleDouble::from_f64(self.d));
        num.div(den)
    }

    pub fn inverse(&self) -> MobiusMap {
        MobiusMap {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    /// `self . other`, i.e. `t -> self(other(t))`.
    pub fn compose(&self, other: &MobiusMap) -> MobiusMap {
        MobiusMap {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
    }

    /// Image of an interval that contains no pole of the map. The map is
    /// monotone there, so the image is again an interval.
    pub fn image(&self, interval: &Interval) -> Result<Interval> {
        let escape = |what: String| Error::ImageEscapesDomain {
            image: what,
            domain: String::new(),
        };
        // Endpoint images as extended reals, plus their closedness.
        let map_endpoint = |t: f64, closed: bool| -> Result<(f64, bool)> {
            if t.is_infinite() {
                if self.c == 0.0 {
                    let slope = self.a / self.d;
                    Ok((if slope > 0.0 { t } else { -t }, false))
                } else {
                    Ok((self.a / self.c, false))
                }
            } else {
                let den = self.c * t + self.d;
                if den == 0.0 {
                    if closed {
                        return Err(escape(format!("pole at member point {t}")));
                    }
                    // open endpoint at the pole: the image runs to infinity
                    let sign = self.determinant().signum();
                    // approaching the pole from inside the interval
                    Ok((f64::INFINITY * sign, false))
                } else {
                    Ok(((self.a * t + self.b) / den, closed))
                }
            }
        };
        if self.c != 0.0 {
            let pole = -self.d / self.c;
            if interval.interior_contains(pole) {
                return Err(escape(format!("pole {pole} inside the interval")));
            }
        }
        let (lo_img, lo_closed) = map_endpoint(interval.lower(), interval.lower_closed())?;
        let (hi_img, hi_closed) = map_endpoint(interval.upper(), interval.upper_closed())?;
        let (l, lc, u, uc) = if lo_img <= hi_img {
            (lo_img, lo_closed, hi_img, hi_closed)
        } else {
            (hi_img, hi_closed, lo_img, lo_closed)
        };
        // pole-at-open-endpoint cases produce +-inf with matching sign
        let (l, u) = if l == f64::NEG_INFINITY && u == f64::NEG_INFINITY {
            (f64::NEG_INFINITY, f64::INFINITY)
        } else {
            (l, u)
        };
        Interval::new(l, u, lc, uc)
    }
}

/// Closed function families with derivatives of every order.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// Coefficients `b_0..b_m` of `b_0 + b_1 t + ... + b_m t^m`.
    Polynomial(Vec<f64>),
    Exponential,
    /// Natural logarithm on `(0, inf)`.
    Logarithm,
    /// `1/t` on `(0, inf)`.
    Reciprocal,
    /// `t^p` on `(0, inf)` for real `p`.
    Power(f64),
    Affine { slope: f64, intercept: f64 },
}

impl Family {
    pub fn natural_domain(&self) -> Interval {
        match self {
            Family::Polynomial(_) | Family::Exponential | Family::Affine { .. } => {
                Interval::real_line()
            }
            Family::Logarithm | Family::Reciprocal | Family::Power(_) => Interval::positive_axis(),
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            Family::Polynomial(_) => "polynomial",
            Family::Exponential => "exponential",
            Family::Logarithm => "logarithm",
            Family::Reciprocal => "reciprocal",
            Family::Power(_) => "power",
            Family::Affine { .. } => "affine",
        }
    }

    fn value(&self, u: f64) -> f64 {
        match self {
            Family::Polynomial(b) => horner(b, u),
            Family::Exponential => u.exp(),
            Family::Logarithm => u.ln(),
            Family::Reciprocal => 1.0 / u,
            Family::Power(p) => u.powf(*p),
            Family::Affine { slope, intercept } => slope * u + intercept,
        }
    }

    fn derivative(&self, u: f64, k: u32) -> f64 {
        if k == 0 {
            return self.value(u);
        }
        match self {
            Family::Polynomial(b) => horner(&poly_derivative_coeffs(b, k), u),
            Family::Exponential => u.exp(),
            Family::Logarithm => {
                // (ln u)^(k) = (-1)^(k-1) (k-1)! / u^k
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                sign * factorial(k - 1) / u.powi(k as i32)
            }
            Family::Reciprocal => {
                // (1/u)^(k) = (-1)^k k! / u^(k+1)
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                sign * factorial(k) / u.powi(k as i32 + 1)
            }
            Family::Power(p) => {
                let mut coeff = 1.0;
                for j in 0..k {
                    coeff *= p - j as f64;
                }
                coeff * u.powf(p - k as f64)
            }
            Family::Affine { slope, .. } => {
                if k == 1 {
                    *slope
                } else {
                    0.0
                }
            }
        }
    }

    /// Taylor coefficients `f^(j)(u0)/j!` for `j = 0..=order`.
    fn jet(&self, u0: f64, order: usize) -> Vec<f64> {
        (0..=order)
            .map(|j| self.derivative(u0, j as u32) / factorial(j as u32))
            .collect()
    }
}

fn factorial(k: u32) -> f64 {
    (1..=k as u64).map(|j| j as f64).product()
}

fn horner(coeffs: &[f64], u: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * u + c)
}

fn horner_dd(coeffs: &[f64], u: DoubleDouble) -> DoubleDouble {
    coeffs
        .iter()
        .rev()
        .fold(DoubleDouble::ZERO, |acc, &c| {
            acc.mul(u).add(DoubleDouble::from_f64(c))
        })
}

/// Coefficients of the k-th derivative of a polynomial.
fn poly_derivative_coeffs(b: &[f64], k: u32) -> Vec<f64> {
    let k = k as usize;
    if k >= b.len() {
        return vec![0.0];
    }
    b[k..]
        .iter()
        .enumerate()
        .map(|(j, &bj)| {
            // (j + k)! / j! as an exact small-integer product
            let mut ff = 1.0;
            for i in 1..=k {
                ff *= (j + i) as f64;
            }
            bj * ff
        })
        .collect()
}

/// Truncated product of two Taylor series.
fn series_mul(a: &[f64], b: &[f64], order: usize) -> Vec<f64> {
    let mut out = vec![0.0; order + 1];
    for (i, &ai) in a.iter().enumerate().take(order + 1) {
        if ai == 0.0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate().take(order + 1 - i) {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// Composition `outer(inner(t))` of truncated Taylor series, where
/// `outer` is expanded at `inner[0]`. Horner on series.
fn series_compose(outer: &[f64], inner: &[f64], order: usize) -> Vec<f64> {
    let mut shifted = inner.to_vec();
    shifted[0] = 0.0;
    let mut r = vec![0.0; order + 1];
    for &g in outer.iter().rev() {
        r = series_mul(&r, &shifted, order);
        r[0] += g;
    }
    r
}

/// A smooth function on an interval: an inner Moebius reparametrization,
/// a closed family and an affine map of the value. Immutable after
/// construction.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionModel {
    family: Family,
    pre_map: Option<MobiusMap>,
    post_affine: Option<(f64, f64)>,
    domain: Interval,
}

impl FunctionModel {
    pub fn new(
        family: Family,
        pre_map: Option<MobiusMap>,
        post_affine: Option<(f64, f64)>,
        domain: Interval,
    ) -> Result<Self> {
        if let Some(m) = &pre_map {
            if m.determinant() == 0.0 {
                return Err(Error::DegenerateMobius);
            }
            let image = m.image(&domain)?;
            let inner = family.natural_domain();
            if !inner.contains_interval_approx(&image, CONTAINMENT_SLACK) {
                return Err(Error::ImageEscapesDomain {
                    image: image.to_string(),
                    domain: inner.to_string(),
                });
            }
        } else if !family.natural_domain().contains_interval(&domain) {
            return Err(Error::ImageEscapesDomain {
                image: domain.to_string(),
                domain: family.natural_domain().to_string(),
            });
        }
        if let Some((s, _)) = post_affine {
            if s == 0.0 {
                return Err(Error::InvalidArgument(
                    "post-affine scale must be nonzero".into(),
                ));
            }
        }
        Ok(FunctionModel {
            family,
            pre_map,
            post_affine,
            domain,
        })
    }

    pub fn plain(family: Family) -> Self {
        let domain = family.natural_domain();
        FunctionModel {
            family,
            pre_map: None,
            post_affine: None,
            domain,
        }
    }

    pub fn polynomial(coeffs: Vec<f64>) -> Self {
        Self::plain(Family::Polynomial(coeffs))
    }

    pub fn exponential() -> Self {
        Self::plain(Family::Exponential)
    }

    pub fn logarithm() -> Self {
        Self::plain(Family::Logarithm)
    }

    pub fn reciprocal() -> Self {
        Self::plain(Family::Reciprocal)
    }

    pub fn power(p: f64) -> Self {
        Self::plain(Family::Power(p))
    }

    pub fn affine(slope: f64, intercept: f64) -> Self {
        Self::plain(Family::Affine { slope, intercept })
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn pre_map(&self) -> Option<&MobiusMap> {
        self.pre_map.as_ref()
    }

    pub fn post_affine(&self) -> Option<(f64, f64)> {
        self.post_affine
    }

    /// Restricts the model to a subinterval of its current domain.
    pub fn with_domain(&self, domain: Interval) -> Result<Self> {
        if !self.domain.contains_interval(&domain) {
            return Err(Error::InvalidArgument(format!(
                "{domain} is not contained in the current domain {}",
                self.domain
            )));
        }
        let mut out = self.clone();
        out.domain = domain;
        Ok(out)
    }

    /// The model of `t -> scale * f(t) + shift`.
    pub fn scale_shift(&self, scale: f64, shift: f64) -> Result<Self> {
        if scale == 0.0 {
            return Err(Error::InvalidArgument(
                "post-affine scale must be nonzero".into(),
            ));
        }
        let mut out = self.clone();
        out.post_affine = match self.post_affine {
            None => Some((scale, shift)),
            Some((s, c)) => Some((scale * s, scale * c + shift)),
        };
        if out.post_affine == Some((1.0, 0.0)) {
            out.post_affine = None;
        }
        Ok(out)
    }

    pub fn negate(&self) -> Self {
        self.scale_shift(-1.0, 0.0).expect("scale -1 is nonzero")
    }

    /// The model of `t -> f((a t + b)/(c t + d))` on `new_domain`.
    pub fn compose_mobius(&self, map: MobiusMap, new_domain: Interval) -> Result<Self> {
        if map.determinant() == 0.0 {
            return Err(Error::DegenerateMobius);
        }
        let image = map.image(&new_domain)?;
        if !self.domain.contains_interval_approx(&image, CONTAINMENT_SLACK) {
            return Err(Error::ImageEscapesDomain {
                image: image.to_string(),
                domain: self.domain.to_string(),
            });
        }
        let pre = match &self.pre_map {
            None => map,
            Some(p) => p.compose(&map),
        };
        let pre = if pre == MobiusMap::identity() {
            None
        } else {
            Some(pre)
        };
        Ok(FunctionModel {
            family: self.family.clone(),
            pre_map: pre,
            post_affine: self.post_affine,
            domain: new_domain,
        })
    }

    fn check_domain(&self, t: f64) -> Result<()> {
        if !self.domain.contains(t) {
            return Err(Error::DomainViolation {
                point: t,
                domain: self.domain.to_string(),
            });
        }
        Ok(())
    }

    fn apply_post(&self, v: f64, k: u32) -> f64 {
        match self.post_affine {
            None => v,
            Some((s, c)) => {
                if k == 0 {
                    s * v + c
                } else {
                    s * v
                }
            }
        }
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        self.check_domain(t)?;
        let u = match &self.pre_map {
            None => t,
            Some(m) => m.apply(t),
        };
        Ok(self.apply_post(self.family.value(u), 0))
    }

    pub fn eval_derivative(&self, t: f64, k: u32) -> Result<f64> {
        if k == 0 {
            return self.eval(t);
        }
        self.check_domain(t)?;
        let v = match &self.pre_map {
            None => self.family.derivative(t, k),
            Some(m) if m.is_affine() => {
                let slope = m.a / m.d;
                let u = m.apply(t);
                slope.powi(k as i32) * self.family.derivative(u, k)
            }
            Some(m) => {
                let order = k as usize;
                let inner = mobius_jet(m, t, order);
                let outer = self.family.jet(inner[0], order);
                let composed = series_compose(&outer, &inner, order);
                composed[order] * factorial(k)
            }
        };
        Ok(self.apply_post(v, k))
    }

    /// Whether the double-double evaluation path is exact for this model
    /// (pure recurrence stabilization needs seeds beyond f64 accuracy).
    fn dd_capable(&self) -> bool {
        let pre_ok = match &self.pre_map {
            None => true,
            Some(m) => m.is_affine(),
        };
        pre_ok
            && matches!(
                self.family,
                Family::Polynomial(_) | Family::Reciprocal | Family::Affine { .. }
            )
    }

    fn inner_dd(&self, t: f64) -> DoubleDouble {
        match &self.pre_map {
            None => DoubleDouble::from_f64(t),
            Some(m) => m.apply_dd(t),
        }
    }

    fn post_dd(&self, v: DoubleDouble, k: u32) -> DoubleDouble {
        match self.post_affine {
            None => v,
            Some((s, c)) => {
                let scaled = v.mul_f64(s);
                if k == 0 {
                    scaled.add(DoubleDouble::from_f64(c))
                } else {
                    scaled
                }
            }
        }
    }
}

fn mobius_jet(m: &MobiusMap, t0: f64, order: usize) -> Vec<f64> {
    let mut out = vec![0.0; order + 1];
    out[0] = m.apply(t0);
    if m.c == 0.0 {
        if order >= 1 {
            out[1] = m.a / m.d;
        }
        return out;
    }
    // m(t) = a/c + beta/(c t + d) with beta = (bc - ad)/c
    let beta = (m.b * m.c - m.a * m.d) / m.c;
    let den = m.c * t0 + m.d;
    let mut pow = den;
    for j in 1..=order {
        pow *= den;
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        out[j] = beta * sign * m.c.powi(j as i32) / pow;
    }
    out
}

impl Curve for FunctionModel {
    fn domain(&self) -> Interval {
        self.domain
    }

    fn value(&self, t: f64) -> Result<f64> {
        self.eval(t)
    }

    fn derivative(&self, t: f64, k: u32) -> Result<f64> {
        self.eval_derivative(t, k)
    }

    fn describe(&self) -> String {
        self.spec_string()
    }

    fn value_dd(&self, t: f64) -> Result<DoubleDouble> {
        if !self.dd_capable() {
            return Ok(DoubleDouble::from_f64(self.value(t)?));
        }
        self.check_domain(t)?;
        let u = self.inner_dd(t);
        let v = match &self.family {
            Family::Polynomial(b) => horner_dd(b, u),
            Family::Reciprocal => DoubleDouble::ONE.div(u),
            Family::Affine { slope, intercept } => {
                u.mul_f64(*slope).add(DoubleDouble::from_f64(*intercept))
            }
            _ => unreachable!(),
        };
        Ok(self.post_dd(v, 0))
    }

    fn derivative_dd(&self, t: f64, k: u32) -> Result<DoubleDouble> {
        if k == 0 {
            return self.value_dd(t);
        }
        if !self.dd_capable() {
            return Ok(DoubleDouble::from_f64(self.derivative(t, k)?));
        }
        self.check_domain(t)?;
        let slope = match &self.pre_map {
            None => 1.0,
            Some(m) => m.a / m.d,
        };
        let u = self.inner_dd(t);
        let v = match &self.family {
            Family::Polynomial(b) => horner_dd(&poly_derivative_coeffs(b, k), u),
            Family::Reciprocal => {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                let den = {
                    let mut acc = DoubleDouble::ONE;
                    for _ in 0..=k {
                        acc = acc.mul(u);
                    }
                    acc
                };
                DoubleDouble::from_f64(sign * factorial(k)).div(den)
            }
            Family::Affine { slope: s, .. } => {
                if k == 1 {
                    DoubleDouble::from_f64(*s)
                } else {
                    DoubleDouble::ZERO
                }
            }
            _ => unreachable!(),
        };
        Ok(self.post_dd(v.mul_f64(slope.powi(k as i32)), k))
    }
}

// ---------------------------------------------------------------------
// Mini-language and canonical JSON form
// ---------------------------------------------------------------------

impl FunctionModel {
    /// Parses the function mini-language:
    /// `poly:b0,b1,...`, `exp`, `log`, `recip`, `pow:p`, wrapped as
    /// `mobius(a,b,c,d)@<spec>` and `affine(s,c)@<spec>`.
    ///
    /// A `mobius` wrap re-domains the model to the preimage of the inner
    /// domain under the map.
    pub fn parse(spec: &str) -> Result<Self> {
        let s = spec.trim();
        let err = || Error::ParseError {
            what: "function spec",
            input: spec.to_string(),
        };
        if let Some(rest) = s.strip_prefix("mobius(") {
            let (args, tail) = rest.split_once(')').ok_or_else(err)?;
            let tail = tail.strip_prefix('@').ok_or_else(err)?;
            let v = parse_numbers(args, 4, spec)?;
            let map = MobiusMap::new(v[0], v[1], v[2], v[3])?;
            let inner = Self::parse(tail)?;
            // The preimage of the inner domain can be cut by the pole of
            // the map. Try each pole-free component, preferring the one
            // to the right of the pole.
            let components = if map.c == 0.0 {
                vec![Interval::real_line()]
            } else {
                let pole = -map.d / map.c;
                vec![
                    Interval::new(pole, f64::INFINITY, false, false)?,
                    Interval::new(f64::NEG_INFINITY, pole, false, false)?,
                ]
            };
            for component in components {
                let image = match map.image(&component) {
                    Ok(i) => i,
                    Err(_) => continue,
                };
                if let Some(reachable) = image.intersect(&inner.domain) {
                    if let Ok(outer) = map.inverse().image(&reachable) {
                        if let Ok(model) = inner.compose_mobius(map, outer) {
                            return Ok(model);
                        }
                    }
                }
            }
            return Err(err());
        }
        if let Some(rest) = s.strip_prefix("affine(") {
            let (args, tail) = rest.split_once(')').ok_or_else(err)?;
            let tail = tail.strip_prefix('@').ok_or_else(err)?;
            let v = parse_numbers(args, 2, spec)?;
            return Self::parse(tail)?.scale_shift(v[0], v[1]);
        }
        if let Some(args) = s.strip_prefix("poly:") {
            let coeffs: Result<Vec<f64>> = args
                .split(',')
                .map(|c| c.trim().parse::<f64>().map_err(|_| err()))
                .collect();
            let coeffs = coeffs?;
            if coeffs.is_empty() {
                return Err(err());
            }
            return Ok(Self::polynomial(coeffs));
        }
        if let Some(p) = s.strip_prefix("pow:") {
            let p: f64 = p.trim().parse().map_err(|_| err())?;
            return Ok(Self::power(p));
        }
        match s {
            "exp" => Ok(Self::exponential()),
            "log" => Ok(Self::logarithm()),
            "recip" => Ok(Self::reciprocal()),
            _ => Err(err()),
        }
    }

    /// The mini-language spec of this model.
    pub fn spec_string(&self) -> String {
        let base = match &self.family {
            Family::Polynomial(b) => format!(
                "poly:{}",
                b.iter()
                    .map(|c| c.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            ),
            Family::Exponential => "exp".into(),
            Family::Logarithm => "log".into(),
            Family::Reciprocal => "recip".into(),
            Family::Power(p) => format!("pow:{p}"),
            Family::Affine { slope, intercept } => format!("poly:{intercept},{slope}"),
        };
        let with_pre = match &self.pre_map {
            None => base,
            Some(m) => format!("mobius({},{},{},{})@{}", m.a, m.b, m.c, m.d, base),
        };
        match self.post_affine {
            None => with_pre,
            Some((s, c)) => format!("affine({s},{c})@{with_pre}"),
        }
    }
}

fn parse_numbers(args: &str, expect: usize, spec: &str) -> Result<Vec<f64>> {
    let v: Result<Vec<f64>> = args
        .split(',')
        .map(|x| {
            x.trim().parse::<f64>().map_err(|_| Error::ParseError {
                what: "function spec",
                input: spec.to_string(),
            })
        })
        .collect();
    let v = v?;
    if v.len() != expect {
        return Err(Error::ParseError {
            what: "function spec",
            input: spec.to_string(),
        });
    }
    Ok(v)
}

#[derive(Serialize, Deserialize)]
struct ModelRepr {
    family: String,
    parameters: Vec<f64>,
    pre_map: Option<[f64; 4]>,
    post_affine: Option<[f64; 2]>,
    domain: Interval,
}

impl Serialize for FunctionModel {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let parameters = match &self.family {
            Family::Polynomial(b) => b.clone(),
            Family::Power(p) => vec![*p],
            Family::Affine { slope, intercept } => vec![*slope, *intercept],
            _ => Vec::new(),
        };
        ModelRepr {
            family: self.family.tag().to_string(),
            parameters,
            pre_map: self.pre_map.map(|m| [m.a, m.b, m.c, m.d]),
            post_affine: self.post_affine.map(|(s, c)| [s, c]),
            domain: self.domain,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for FunctionModel {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let repr = ModelRepr::deserialize(deserializer)?;
        let family = match repr.family.as_str() {
            "polynomial" => Family::Polynomial(repr.parameters.clone()),
            "exponential" => Family::Exponential,
            "logarithm" => Family::Logarithm,
            "reciprocal" => Family::Reciprocal,
            "power" => Family::Power(repr.parameters.first().copied().unwrap_or(1.0)),
            "affine" => Family::Affine {
                slope: repr.parameters.first().copied().unwrap_or(1.0),
                intercept: repr.parameters.get(1).copied().unwrap_or(0.0),
            },
            other => {
                return Err(serde::de::Error::custom(format!("unknown family {other:?}")))
            }
        };
        let pre_map = match repr.pre_map {
            None => None,
            Some([a, b, c, d]) => Some(MobiusMap::new(a, b, c, d).map_err(serde::de::Error::custom)?),
        };
        FunctionModel::new(
            family,
            pre_map,
            repr.post_affine.map(|[s, c]| (s, c)),
            repr.domain,
        )
        .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn eval_examples() {
        assert_eq!(FunctionModel::exponential().eval(0.0).unwrap(), 1.0);
        assert_eq!(FunctionModel::reciprocal().eval(2.0).unwrap(), 0.5);
        let p = FunctionModel::polynomial(vec![0.0, 1.0, -0.5, 1.0 / 3.0, -0.25]);
        assert_relative_eq!(p.eval(1.0).unwrap(), 7.0 / 12.0, max_relative = 1e-14);
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(
            FunctionModel::exponential().eval_derivative(0.0, 5).unwrap(),
            1.0
        );
        assert_eq!(
            FunctionModel::reciprocal().eval_derivative(1.0, 3).unwrap(),
            -6.0
        );
        let p = FunctionModel::polynomial(vec![0.0, 1.0, -0.5, 1.0 / 3.0, -0.25]);
        // k! * b_k is exact in coefficient arithmetic
        assert_eq!(p.eval_derivative(0.0, 4).unwrap(), -6.0);
        assert_eq!(p.eval_derivative(0.0, 2).unwrap(), -1.0);
        assert_eq!(p.eval_derivative(0.0, 7).unwrap(), 0.0);
    }

    #[test]
    fn derivative_rejects_points_outside_domain() {
        let r = FunctionModel::reciprocal();
        assert!(matches!(
            r.eval(-1.0),
            Err(Error::DomainViolation { .. })
        ));
        assert!(r.eval_derivative(0.0, 1).is_err());
    }

    #[test]
    fn identity_mobius_is_a_no_op() {
        let f = FunctionModel::exponential();
        let g = f
            .compose_mobius(MobiusMap::identity(), Interval::open(-2.0, 2.0).unwrap())
            .unwrap();
        for t in [-1.5, 0.0, 0.7] {
            assert_eq!(g.eval(t).unwrap(), f.eval(t).unwrap());
            assert_eq!(
                g.eval_derivative(t, 3).unwrap(),
                f.eval_derivative(t, 3).unwrap()
            );
        }
    }

    #[test]
    fn halfline_reparametrization() {
        // g(t) = f(t/(1+t)) carries [0, inf) into [0, 1)
        let f = FunctionModel::polynomial(vec![1.0, 2.0, 3.0])
            .with_domain(Interval::half_open(0.0, 1.0).unwrap())
            .unwrap();
        let map = MobiusMap::new(1.0, 0.0, 1.0, 1.0).unwrap();
        let g = f
            .compose_mobius(map, Interval::new(0.0, f64::INFINITY, true, false).unwrap())
            .unwrap();
        for t in [0.0, 0.5, 3.0, 1e6] {
            let h = t / (1.0 + t);
            assert_relative_eq!(g.eval(t).unwrap(), f.eval(h).unwrap(), max_relative = 1e-14);
        }
    }

    #[test]
    fn shifted_reciprocal_derivative() {
        // 1/(t+1) on (-1, inf); derivative at 0 is -1
        let map = MobiusMap::new(1.0, 1.0, 0.0, 1.0).unwrap();
        let g = FunctionModel::reciprocal()
            .compose_mobius(map, Interval::new(-1.0, f64::INFINITY, false, false).unwrap())
            .unwrap();
        assert_relative_eq!(g.eval_derivative(0.0, 1).unwrap(), -1.0, max_relative = 1e-14);
        assert_relative_eq!(g.eval_derivative(1.0, 2).unwrap(), 2.0 / 8.0, max_relative = 1e-13);
    }

    #[test]
    fn mobius_then_inverse_reproduces_values() {
        let f = FunctionModel::logarithm();
        let map = MobiusMap::new(2.0, 1.0, 1.0, 3.0).unwrap();
        let dom = Interval::open(0.5, 4.0).unwrap();
        let g = f.compose_mobius(map, dom).unwrap();
        let back = g
            .compose_mobius(map.inverse(), map.image(&dom).unwrap())
            .unwrap();
        for t in map.image(&dom).unwrap().interior_grid(17).unwrap() {
            assert_relative_eq!(back.eval(t).unwrap(), f.eval(t).unwrap(), max_relative = 1e-12);
        }
    }

    #[test]
    fn finite_differences_agree_with_closed_forms() {
        // central difference of order k with the classical optimal step
        let models: Vec<FunctionModel> = vec![
            FunctionModel::exponential(),
            FunctionModel::logarithm(),
            FunctionModel::reciprocal(),
            FunctionModel::power(2.5),
            FunctionModel::polynomial(vec![0.3, -1.0, 0.25, 2.0, -0.125]),
            FunctionModel::reciprocal()
                .compose_mobius(
                    MobiusMap::new(1.0, 2.0, 0.25, 1.0).unwrap(),
                    Interval::open(0.5, 4.0).unwrap(),
                )
                .unwrap(),
            FunctionModel::exponential()
                .compose_mobius(
                    MobiusMap::new(1.0, 0.0, 1.0, 1.0).unwrap(),
                    Interval::open(0.5, 4.0).unwrap(),
                )
                .unwrap(),
        ];
        for f in &models {
            let t0 = 1.2345;
            for k in 1..=6u32 {
                let exact = f.eval_derivative(t0, k).unwrap();
                let fd = extrapolated_central_difference(f, t0, k);
                assert_relative_eq!(fd, exact, max_relative = 1e-5, epsilon = 1e-7);
            }
        }
    }

    fn central_difference(f: &FunctionModel, t: f64, k: u32, h: f64) -> f64 {
        // k-th iterated central difference with step h
        let n = k as i64;
        let mut sum = 0.0;
        for j in 0..=n {
            let c = binomial(n, j) * if (n - j) % 2 == 0 { 1.0 } else { -1.0 };
            sum += c * f.eval(t + (j as f64 - n as f64 / 2.0) * h).unwrap();
        }
        sum / h.powi(k as i32)
    }

    /// Central difference with Ridders-style Richardson extrapolation in
    /// h^2: walk a Neville tableau over halved steps and return the
    /// diagonal entry whose successive differences are smallest, which
    /// self-selects the optimal step for the function at hand.
    fn extrapolated_central_difference(f: &FunctionModel, t: f64, k: u32) -> f64 {
        let dom = f.domain();
        let room = (t - dom.lower()).min(dom.upper() - t).min(1.0);
        let h0 = 0.9 * room * 2.0 / k as f64;
        let levels = 9;
        let mut rows: Vec<Vec<f64>> = Vec::new();
        let mut best = f64::NAN;
        let mut best_err = f64::INFINITY;
        for j in 0..levels {
            let h = h0 / (1u64 << j) as f64;
            let mut row = vec![central_difference(f, t, k, h)];
            for m in 1..=j {
                let factor = 4f64.powi(m as i32);
                let prev = rows[j - 1][m - 1];
                let cur = row[m - 1];
                row.push((factor * cur - prev) / (factor - 1.0));
            }
            if j > 0 {
                let diag = row[j];
                let err = (diag - row[j - 1]).abs() + (diag - rows[j - 1][j - 1]).abs();
                if err < best_err {
                    best_err = err;
                    best = diag;
                }
            }
            rows.push(row);
        }
        best
    }

    fn binomial(n: i64, k: i64) -> f64 {
        let mut r = 1.0;
        for j in 0..k {
            r = r * (n - j) as f64 / (j + 1) as f64;
        }
        r
    }

    #[test]
    fn parse_and_spec_string_roundtrip() {
        for spec in [
            "exp",
            "recip",
            "log",
            "pow:2.5",
            "poly:0,1,-0.5",
            "affine(-1,0)@log",
            "mobius(1,0,1,1)@recip",
        ] {
            let f = FunctionModel::parse(spec).unwrap();
            let g = FunctionModel::parse(&f.spec_string()).unwrap();
            let grid = match f.domain().is_finite() {
                true => f.domain().interior_grid(9).unwrap(),
                false => vec![1.0, 2.0, 3.5],
            };
            for t in grid {
                assert_eq!(f.eval(t).unwrap(), g.eval(t).unwrap());
            }
        }
        assert!(FunctionModel::parse("nope").is_err());
        assert!(FunctionModel::parse("poly:").is_err());
        assert!(FunctionModel::parse("mobius(1,0,0)@exp").is_err());
    }

    #[test]
    fn degenerate_mobius_is_rejected() {
        assert!(MobiusMap::new(1.0, 2.0, 2.0, 4.0).is_err());
        let f = FunctionModel::exponential();
        assert!(f
            .compose_mobius(
                MobiusMap {
                    a: 1.0,
                    b: 2.0,
                    c: 2.0,
                    d: 4.0
                },
                Interval::open(0.0, 1.0).unwrap()
            )
            .is_err());
    }

    #[test]
    fn image_escape_is_rejected() {
        // log needs a positive argument
        let f = FunctionModel::logarithm();
        let map = MobiusMap::new(1.0, -5.0, 0.0, 1.0).unwrap();
        assert!(f
            .compose_mobius(map, Interval::open(0.0, 1.0).unwrap())
            .is_err());
    }

    #[test]
    fn json_roundtrip() {
        let f = FunctionModel::parse("affine(-1,0)@mobius(1,1,0,2)@recip").unwrap();
        let s = serde_json::to_string(&f).unwrap();
        let g: FunctionModel = serde_json::from_str(&s).unwrap();
        assert_eq!(f, g);
        assert!(s.contains("\"family\""));
    }

    #[test]
    fn dd_value_matches_f64_for_reciprocal() {
        let f = FunctionModel::reciprocal();
        let v = f.value_dd(3.0).unwrap();
        assert!((v.to_f64() - 1.0 / 3.0).abs() < 1e-16);
        let d = f.derivative_dd(2.0, 2).unwrap();
        assert_relative_eq!(d.to_f64(), 2.0 / 8.0, max_relative = 1e-15);
    }
}
