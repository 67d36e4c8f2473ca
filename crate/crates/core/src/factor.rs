//! Finite-dimensional Cartan factors of types 1-4 and their triple product.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{max_abs, singular_values, CMat, CVec, RVec, C64, ZERO};
use crate::tol;

/// Which Cartan factor an element lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FactorDescriptor {
    /// Rectangular `rows x cols` complex matrices.
    Type1 { rows: usize, cols: usize },
    /// Skew-symmetric `n x n` complex matrices, `n >= 2`.
    Type2 { n: usize },
    /// Symmetric `n x n` complex matrices.
    Type3 { n: usize },
    /// Spin factor `C^dim` with componentwise conjugation, `dim >= 2`.
    Spin { dim: usize },
}

impl FactorDescriptor {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            FactorDescriptor::Type1 { rows, cols } => rows >= 1 && cols >= 1,
            FactorDescriptor::Type2 { n } => n >= 2,
            FactorDescriptor::Type3 { n } => n >= 1,
            FactorDescriptor::Spin { dim } => dim >= 2,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidFactor(self.to_string()))
        }
    }

    /// Storage shape; spin vectors are kept as `dim x 1` columns.
    pub fn shape(&self) -> (usize, usize) {
        match *self {
            FactorDescriptor::Type1 { rows, cols } => (rows, cols),
            FactorDescriptor::Type2 { n } | FactorDescriptor::Type3 { n } => (n, n),
            FactorDescriptor::Spin { dim } => (dim, 1),
        }
    }

    /// Complex dimension of the factor as a vector space.
    pub fn complex_dim(&self) -> usize {
        match *self {
            FactorDescriptor::Type1 { rows, cols } => rows * cols,
            FactorDescriptor::Type2 { n } => n * (n - 1) / 2,
            FactorDescriptor::Type3 { n } => n * (n + 1) / 2,
            FactorDescriptor::Spin { dim } => dim,
        }
    }

    /// Maximal number of mutually orthogonal minimal tripotents.
    pub fn rank(&self) -> usize {
        match *self {
            FactorDescriptor::Type1 { rows, cols } => rows.min(cols),
            FactorDescriptor::Type2 { n } => n / 2,
            FactorDescriptor::Type3 { n } => n,
            FactorDescriptor::Spin { .. } => 2,
        }
    }

    pub fn is_spin(&self) -> bool {
        matches!(self, FactorDescriptor::Spin { .. })
    }

    /// Coordinates in an orthonormal basis for the trace inner product.
    /// Off-diagonal basis vectors of types 2 and 3 are `(E_ij -+ E_ji)/sqrt 2`.
    pub fn coords(&self, m: &CMat) -> CVec {
        let s2 = std::f64::consts::SQRT_2;
        match *self {
            FactorDescriptor::Type1 { rows, cols } => {
                CVec::from_fn(rows * cols, |k, _| m[(k / cols, k % cols)])
            }
            FactorDescriptor::Type2 { n } => {
                let mut v = Vec::with_capacity(self.complex_dim());
                for i in 0..n {
                    for j in i + 1..n {
                        v.push(m[(i, j)] * s2);
                    }
                }
                CVec::from_vec(v)
            }
            FactorDescriptor::Type3 { n } => {
                let mut v = Vec::with_capacity(self.complex_dim());
                for i in 0..n {
                    v.push(m[(i, i)]);
                    for j in i + 1..n {
                        v.push(m[(i, j)] * s2);
                    }
                }
                CVec::from_vec(v)
            }
            FactorDescriptor::Spin { dim } => CVec::from_fn(dim, |k, _| m[(k, 0)]),
        }
    }

    /// Inverse of [`coords`](Self::coords).
    pub fn from_coords(&self, c: &CVec) -> CMat {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let (r, cc) = self.shape();
        let mut m = CMat::zeros(r, cc);
        match *self {
            FactorDescriptor::Type1 { cols, .. } => {
                for k in 0..c.len() {
                    m[(k / cols, k % cols)] = c[k];
                }
            }
            FactorDescriptor::Type2 { n } => {
                let mut k = 0;
                for i in 0..n {
                    for j in i + 1..n {
                        m[(i, j)] = c[k] * h;
                        m[(j, i)] = -c[k] * h;
                        k += 1;
                    }
                }
            }
            FactorDescriptor::Type3 { n } => {
                let mut k = 0;
                for i in 0..n {
                    m[(i, i)] = c[k];
                    k += 1;
                    for j in i + 1..n {
                        m[(i, j)] = c[k] * h;
                        m[(j, i)] = c[k] * h;
                        k += 1;
                    }
                }
            }
            FactorDescriptor::Spin { .. } => {
                for k in 0..c.len() {
                    m[(k, 0)] = c[k];
                }
            }
        }
        m
    }
}

impl fmt::Display for FactorDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            FactorDescriptor::Type1 { rows, cols } => write!(f, "type1:{rows}x{cols}"),
            FactorDescriptor::Type2 { n } => write!(f, "type2:{n}"),
            FactorDescriptor::Type3 { n } => write!(f, "type3:{n}"),
            FactorDescriptor::Spin { dim } => write!(f, "spin:{dim}"),
        }
    }
}

impl FromStr for FactorDescriptor {
    type Err = Error;

    /// Grammar: `type1:PxQ | type2:N | type3:N | spin:D`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidFactor(s.to_string());
        let (kind, arg) = s.trim().split_once(':').ok_or_else(bad)?;
        let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
        let fd = match kind.trim().to_ascii_lowercase().as_str() {
            "type1" => {
                let (p, q) = arg.split_once(['x', 'X']).ok_or_else(bad)?;
                FactorDescriptor::Type1 { rows: num(p)?, cols: num(q)? }
            }
            "type2" => FactorDescriptor::Type2 { n: num(arg)? },
            "type3" => FactorDescriptor::Type3 { n: num(arg)? },
            "spin" => FactorDescriptor::Spin { dim: num(arg)? },
            _ => return Err(bad()),
        };
        fd.validate()?;
        Ok(fd)
    }
}

/// A point of a Cartan factor.
#[derive(Clone, Debug, PartialEq)]
pub struct Element {
    factor: FactorDescriptor,
    data: CMat,
}

impl Element {
    /// Validate shape and the skew/symmetric membership constraint.
    pub fn new(factor: FactorDescriptor, data: CMat) -> Result<Self> {
        factor.validate()?;
        let (r, c) = factor.shape();
        if data.shape() != (r, c) {
            return Err(Error::ShapeMismatch {
                expected: format!("{r}x{c}"),
                got: format!("{}x{}", data.nrows(), data.ncols()),
            });
        }
        let defect = match factor {
            FactorDescriptor::Type2 { .. } => max_abs(&(&data + data.transpose())),
            FactorDescriptor::Type3 { .. } => max_abs(&(&data - data.transpose())),
            _ => 0.0,
        };
        let tolerance = tol::membership(max_abs(&data));
        if defect > tolerance {
            return Err(Error::MembershipViolation { defect, tolerance });
        }
        Ok(Element { factor, data })
    }

    /// Validate a raw row-major array of `(re, im)` pairs.
    pub fn from_pairs(factor: FactorDescriptor, rows: &[Vec<[f64; 2]>]) -> Result<Self> {
        let (r, c) = factor.shape();
        let got_r = rows.len();
        let got_c = rows.first().map_or(0, |x| x.len());
        if got_r != r || rows.iter().any(|row| row.len() != c) {
            return Err(Error::ShapeMismatch {
                expected: format!("{r}x{c}"),
                got: format!("{got_r}x{got_c}"),
            });
        }
        let data = CMat::from_fn(r, c, |i, j| C64::new(rows[i][j][0], rows[i][j][1]));
        Element::new(factor, data)
    }

    /// Real-entried convenience constructor (row major).
    pub fn from_real(factor: FactorDescriptor, entries: &[f64]) -> Result<Self> {
        let (r, c) = factor.shape();
        if entries.len() != r * c {
            return Err(Error::ShapeMismatch {
                expected: format!("{} entries", r * c),
                got: format!("{} entries", entries.len()),
            });
        }
        Element::new(factor, CMat::from_fn(r, c, |i, j| C64::new(entries[i * c + j], 0.0)))
    }

    /// Complex convenience constructor (row major).
    pub fn from_complex(factor: FactorDescriptor, entries: &[C64]) -> Result<Self> {
        let (r, c) = factor.shape();
        if entries.len() != r * c {
            return Err(Error::ShapeMismatch {
                expected: format!("{} entries", r * c),
                got: format!("{} entries", entries.len()),
            });
        }
        Element::new(factor, CMat::from_fn(r, c, |i, j| entries[i * c + j]))
    }

    /// Build from orthonormal coordinates (always a member of the factor).
    pub fn from_coords(factor: FactorDescriptor, c: &CVec) -> Self {
        Element { factor, data: factor.from_coords(c) }
    }

    /// Wrap a matrix without validation; callers guarantee membership.
    pub(crate) fn raw(factor: FactorDescriptor, data: CMat) -> Self {
        Element { factor, data }
    }

    pub fn zero(factor: FactorDescriptor) -> Self {
        let (r, c) = factor.shape();
        Element { factor, data: CMat::zeros(r, c) }
    }

    /// Matrix unit `E_ij` (type 1 and 3; for type 3 the symmetrised unit
    /// `E_ij + E_ji` when `i != j`). For spin, `i` selects the basis vector.
    pub fn unit(factor: FactorDescriptor, i: usize, j: usize) -> Self {
        let mut z = Element::zero(factor);
        let one = C64::new(1.0, 0.0);
        match factor {
            FactorDescriptor::Type1 { .. } => z.data[(i, j)] = one,
            FactorDescriptor::Type2 { .. } => {
                z.data[(i, j)] = one;
                z.data[(j, i)] = -one;
            }
            FactorDescriptor::Type3 { .. } => {
                z.data[(i, j)] = one;
                z.data[(j, i)] = one;
            }
            FactorDescriptor::Spin { .. } => z.data[(i, 0)] = one,
        }
        z
    }

    pub fn factor(&self) -> FactorDescriptor {
        self.factor
    }

    pub fn data(&self) -> &CMat {
        &self.data
    }

    pub fn coords(&self) -> CVec {
        self.factor.coords(&self.data)
    }

    /// Realified coordinates `[Re c; Im c]`.
    pub fn to_real(&self) -> RVec {
        let c = self.coords();
        let n = c.len();
        RVec::from_fn(2 * n, |k, _| if k < n { c[k].re } else { c[k - n].im })
    }

    pub fn from_real_coords(factor: FactorDescriptor, v: &RVec) -> Self {
        let n = v.len() / 2;
        let c = CVec::from_fn(n, |k, _| C64::new(v[k], v[k + n]));
        Element::from_coords(factor, &c)
    }

    /// Entry access for spin vectors.
    pub fn spin_vector(&self) -> CVec {
        self.data.column(0).into_owned()
    }

    pub fn same_factor(&self, other: &Element) -> Result<()> {
        if self.factor == other.factor {
            Ok(())
        } else {
            Err(Error::FactorMismatch)
        }
    }

    pub fn scale(&self, s: C64) -> Element {
        Element { factor: self.factor, data: &self.data * s }
    }

    pub fn scale_re(&self, s: f64) -> Element {
        self.scale(C64::new(s, 0.0))
    }

    /// Trace inner product `tr(x y*)` (spin: `(x|y)`), linear in `self`.
    pub fn inner(&self, other: &Element) -> C64 {
        self.data
            .iter()
            .zip(other.data.iter())
            .fold(ZERO, |acc, (a, b)| acc + a * b.conj())
    }

    /// Norm of the trace inner product (Hilbert-Schmidt norm).
    pub fn hs_norm(&self) -> f64 {
        self.coords().norm()
    }

    /// Spin conjugation; entrywise conjugate for matrix types.
    pub fn conj(&self) -> Element {
        Element { factor: self.factor, data: self.data.map(|z| z.conj()) }
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.data)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|z| *z == ZERO)
    }

    /// The triple norm.
    pub fn norm(&self) -> f64 {
        match self.factor {
            FactorDescriptor::Spin { .. } => {
                // (‖x‖⁴ − |x·x|²)^{1/2} = 2‖Re x ∧ Im x‖, summed without cancellation.
                let v = self.spin_vector();
                let xx = v.norm_squared();
                let mut wedge = 0.0;
                for i in 0..v.len() {
                    for j in i + 1..v.len() {
                        let m = v[i].re * v[j].im - v[j].re * v[i].im;
                        wedge += m * m;
                    }
                }
                (xx + 2.0 * wedge.sqrt()).sqrt()
            }
            _ => singular_values(&self.data).first().copied().unwrap_or(0.0),
        }
    }

    /// Triple-norm distance.
    pub fn dist(&self, other: &Element) -> f64 {
        (self - other).norm()
    }

    /// `{x, y, z}`.
    pub fn triple(x: &Element, y: &Element, z: &Element) -> Element {
        match x.factor {
            FactorDescriptor::Spin { .. } => {
                let xv = x.spin_vector();
                let yv = y.spin_vector();
                let zv = z.spin_vector();
                let xy = yv.dotc(&xv);
                let zy = yv.dotc(&zv);
                let xzbar = xv.iter().zip(zv.iter()).fold(ZERO, |a, (p, q)| a + p * q);
                let out = &zv * xy + &xv * zy - yv.map(|t| t.conj()) * xzbar;
                Element::raw(x.factor, CMat::from_column_slice(out.len(), 1, out.as_slice()))
            }
            _ => {
                let ys = y.data.adjoint();
                let out = (&x.data * &ys * &z.data + &z.data * &ys * &x.data) * C64::new(0.5, 0.0);
                Element::raw(x.factor, out)
            }
        }
    }

    /// `x^[2k+1]`.
    pub fn odd_power(&self, k: usize) -> Element {
        let mut p = self.clone();
        for _ in 0..k {
            p = Element::triple(self, self, &p);
        }
        p
    }

    /// Element JSON value `{"factor": ..., "data": ...}`.
    pub fn to_json(&self) -> serde_json::Value {
        let pair = |z: &C64| serde_json::json!([z.re, z.im]);
        let data = if self.factor.is_spin() {
            serde_json::Value::Array(self.data.column(0).iter().map(pair).collect())
        } else {
            serde_json::Value::Array(
                (0..self.data.nrows())
                    .map(|i| serde_json::Value::Array(self.data.row(i).iter().map(pair).collect()))
                    .collect(),
            )
        };
        serde_json::json!({ "factor": self.factor, "data": data })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        #[derive(Deserialize)]
        struct Raw {
            factor: FactorDescriptor,
            data: serde_json::Value,
        }
        let raw: Raw = serde_json::from_value(v.clone())?;
        raw.factor.validate()?;
        let rows: Vec<Vec<[f64; 2]>> = if raw.factor.is_spin() {
            let flat: Vec<[f64; 2]> = serde_json::from_value(raw.data)?;
            flat.into_iter().map(|p| vec![p]).collect()
        } else {
            serde_json::from_value(raw.data)?
        };
        Element::from_pairs(raw.factor, &rows)
    }
}

impl Serialize for Element {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Element {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        Element::from_json(&v).map_err(serde::de::Error::custom)
    }
}

impl Add for &Element {
    type Output = Element;
    fn add(self, rhs: &Element) -> Element {
        debug_assert_eq!(self.factor, rhs.factor);
        Element::raw(self.factor, &self.data + &rhs.data)
    }
}

impl Sub for &Element {
    type Output = Element;
    fn sub(self, rhs: &Element) -> Element {
        debug_assert_eq!(self.factor, rhs.factor);
        Element::raw(self.factor, &self.data - &rhs.data)
    }
}

impl Add for Element {
    type Output = Element;
    fn add(self, rhs: Element) -> Element {
        &self + &rhs
    }
}

impl Sub for Element {
    type Output = Element;
    fn sub(self, rhs: Element) -> Element {
        &self - &rhs
    }
}

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        self.scale_re(-1.0)
    }
}

impl Mul<&Element> for f64 {
    type Output = Element;
    fn mul(self, rhs: &Element) -> Element {
        rhs.scale_re(self)
    }
}

impl Mul<&Element> for C64 {
    type Output = Element;
    fn mul(self, rhs: &Element) -> Element {
        rhs.scale(self)
    }
}

/// Validated raw construction.
pub fn validate_element(factor: FactorDescriptor, data: CMat) -> Result<Element> {
    Element::new(factor, data)
}

/// `{x, y, z}` with a shared-factor check.
pub fn triple_product(x: &Element, y: &Element, z: &Element) -> Result<Element> {
    x.same_factor(y)?;
    x.same_factor(z)?;
    Ok(Element::triple(x, y, z))
}

pub fn odd_power(x: &Element, k: usize) -> Element {
    x.odd_power(k)
}

pub fn norm(x: &Element) -> f64 {
    x.norm()
}

/// Sum of a list of elements of one factor.
pub fn sum(factor: FactorDescriptor, xs: &[Element]) -> Element {
    xs.iter().fold(Element::zero(factor), |acc, x| &acc + x)
}
