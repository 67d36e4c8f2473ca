//! Seeded random instances: elements with prescribed singular-value profiles,
//! Haar unitaries and samplers for tripotents and frames.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::factor::{Element, FactorDescriptor};
use crate::linalg::{CMat, CVec, C64};
use crate::peirce::{project, Tripotent};
use crate::spectral::{atomic_decompose, Frame};
use crate::tol;

pub type Substream = ChaCha20Rng;

/// Independent stream for `(master_seed, suite, index)`.
pub fn substream(master_seed: u64, suite: &str, index: u64) -> Substream {
    let mut h = Sha256::new();
    h.update(master_seed.to_le_bytes());
    h.update((suite.len() as u64).to_le_bytes());
    h.update(suite.as_bytes());
    h.update(index.to_le_bytes());
    ChaCha20Rng::from_seed(h.finalize().into())
}

/// Singular-value law for [`random_element`]; the isometry part is Haar.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum RandomModel {
    /// Full rank, consecutive singular values (and the last one from 0)
    /// separated by at least `min_gap`.
    UniformGap { min_gap: f64 },
    /// The top `k` singular values coincide; the rest are separated by `gap`.
    Clustered { k: usize, gap: f64 },
}

impl Default for RandomModel {
    fn default() -> Self {
        RandomModel::UniformGap { min_gap: 0.1 }
    }
}

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(normal(rng), normal(rng)) * std::f64::consts::FRAC_1_SQRT_2
}

/// Standard complex Gaussian in the factor's orthonormal coordinates.
pub fn gaussian_element<R: Rng + ?Sized>(factor: FactorDescriptor, rng: &mut R) -> Element {
    let c = CVec::from_fn(factor.complex_dim(), |_, _| complex_normal(rng));
    Element::from_coords(factor, &c)
}

/// Haar-distributed unitary via QR of a complex Ginibre matrix.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMat {
    let g = CMat::from_fn(n, n, |_, _| complex_normal(rng));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= ph;
        }
    }
    q
}

/// Random orthonormal pair of real unit vectors in `R^d`.
fn real_orthonormal_pair<R: Rng + ?Sized>(d: usize, rng: &mut R) -> (Vec<f64>, Vec<f64>) {
    loop {
        let a: Vec<f64> = (0..d).map(|_| normal(rng)).collect();
        let mut b: Vec<f64> = (0..d).map(|_| normal(rng)).collect();
        let na = a.iter().map(|t| t * t).sum::<f64>().sqrt();
        let a: Vec<f64> = a.iter().map(|t| t / na).collect();
        let ab: f64 = a.iter().zip(&b).map(|(s, t)| s * t).sum();
        b.iter_mut().zip(&a).for_each(|(t, s)| *t -= ab * s);
        let nb = b.iter().map(|t| t * t).sum::<f64>().sqrt();
        if na > 1e-8 && nb > 1e-8 {
            return (a, b.iter().map(|t| t / nb).collect());
        }
    }
}

fn profile<R: Rng + ?Sized>(rank: usize, model: RandomModel, rng: &mut R) -> Result<Vec<f64>> {
    match model {
        RandomModel::UniformGap { min_gap } => {
            if !(min_gap > 0.0) {
                return Err(Error::UnsatisfiableModel(format!("min_gap {min_gap} must be positive")));
            }
            let mut v = vec![0.0; rank];
            let mut acc = 0.0;
            for i in (0..rank).rev() {
                acc += min_gap * (1.0 + rng.random::<f64>());
                v[i] = acc;
            }
            Ok(v)
        }
        RandomModel::Clustered { k, gap } => {
            if k == 0 || k > rank {
                return Err(Error::UnsatisfiableModel(format!("cluster of {k} in a factor of rank {rank}")));
            }
            if !(gap > 0.0) {
                return Err(Error::UnsatisfiableModel(format!("gap {gap} must be positive")));
            }
            let tail = rank - k;
            let mut v = vec![0.0; rank];
            let mut acc = 0.0;
            for i in (k..rank).rev() {
                acc += gap * (1.0 + rng.random::<f64>());
                v[i] = acc;
            }
            let top = acc + gap * (1.0 + rng.random::<f64>());
            v[..k].iter_mut().for_each(|t| *t = top);
            debug_assert_eq!(v.len(), k + tail);
            Ok(v)
        }
    }
}

/// `Σ λ_i v_i` over a Haar-random frame with the requested singular values.
pub fn random_element<R: Rng + ?Sized>(factor: FactorDescriptor, model: RandomModel, rng: &mut R) -> Result<Element> {
    factor.validate()?;
    let lambdas = profile(factor.rank(), model, rng)?;
    Ok(element_with_values(factor, &lambdas, rng))
}

/// Element with singular values `lambdas` (at most the factor rank) on a
/// Haar-random frame.
pub fn element_with_values<R: Rng + ?Sized>(factor: FactorDescriptor, lambdas: &[f64], rng: &mut R) -> Element {
    let frame = random_full_frame(factor, rng);
    frame
        .iter()
        .zip(lambdas)
        .fold(Element::zero(factor), |acc, (v, l)| &acc + &v.scale_re(*l))
}

/// A Haar-random maximal family of orthogonal minimal tripotents of the factor.
fn random_full_frame<R: Rng + ?Sized>(factor: FactorDescriptor, rng: &mut R) -> Vec<Element> {
    match factor {
        FactorDescriptor::Type1 { rows, cols } => {
            let u = haar_unitary(rows, rng);
            let v = haar_unitary(cols, rng);
            (0..rows.min(cols))
                .map(|k| Element::raw(factor, u.column(k) * v.column(k).adjoint()))
                .collect()
        }
        FactorDescriptor::Type2 { n } => {
            let u = haar_unitary(n, rng);
            (0..n / 2)
                .map(|k| {
                    let (a, b) = (u.column(2 * k), u.column(2 * k + 1));
                    Element::raw(factor, a * b.transpose() - b * a.transpose())
                })
                .collect()
        }
        FactorDescriptor::Type3 { n } => {
            let u = haar_unitary(n, rng);
            (0..n).map(|k| Element::raw(factor, u.column(k) * u.column(k).transpose())).collect()
        }
        FactorDescriptor::Spin { dim } => {
            let (a, b) = real_orthonormal_pair(dim, rng);
            let ph = C64::from_polar(1.0, rng.random::<f64>() * std::f64::consts::TAU);
            let w = CMat::from_fn(dim, 1, |i, _| C64::new(a[i], b[i]) * 0.5 * ph);
            let wbar = CMat::from_fn(dim, 1, |i, _| C64::new(a[i], -b[i]) * 0.5 * ph);
            vec![Element::raw(factor, w), Element::raw(factor, wbar)]
        }
    }
}

/// Rejection loop: up to this many draws per sample.
const MAX_DRAWS: usize = 32;

fn verified(x: Element, rank: usize) -> Option<Tripotent> {
    Tripotent::new(x).ok().filter(|t| t.rank() == rank)
}

/// Random minimal tripotent in `U_k(e)` (`k` = 2 or 0): the leading atom of a
/// Gaussian element compressed to that Peirce space.
pub fn random_minimal_in<R: Rng + ?Sized>(e: &Tripotent, k: usize, rng: &mut R) -> Option<Tripotent> {
    let f = e.factor();
    for _ in 0..MAX_DRAWS {
        let z = project(k, e.element(), &gaussian_element(f, rng));
        if z.norm() <= tol::EQ {
            return None;
        }
        let dec = atomic_decompose(&z);
        if let Some(t) = dec.atoms.into_iter().next().and_then(|a| verified(a.into_element(), 1)) {
            return Some(t);
        }
    }
    None
}

/// Random minimal tripotent anywhere in the factor.
pub fn random_minimal<R: Rng + ?Sized>(factor: FactorDescriptor, rng: &mut R) -> Tripotent {
    random_minimal_in(&Tripotent::zero(factor), 0, rng).expect("a factor always has minimal tripotents")
}

/// Random frame of `U2(e)`: the atoms of a Gaussian element of `U2(e)`.
pub fn random_frame_in<R: Rng + ?Sized>(e: &Tripotent, rng: &mut R) -> Option<Frame> {
    let f = e.factor();
    for _ in 0..MAX_DRAWS {
        let z = project(2, e.element(), &gaussian_element(f, rng));
        let dec = atomic_decompose(&z);
        if dec.len() != e.rank() {
            continue;
        }
        let top = dec.lambda(1);
        if dec.lambdas.iter().any(|&l| l < 1e-3 * top) {
            continue;
        }
        let ts: Option<Vec<Tripotent>> = dec.atoms.into_iter().map(|a| verified(a.into_element(), 1)).collect();
        if let Some(tripotents) = ts {
            return Some(Frame { tripotents });
        }
    }
    None
}

/// Random tripotent of rank `k` (sum of the `k` leading atoms of a Gaussian
/// element), or `None` when `k` exceeds the factor rank.
pub fn random_tripotent<R: Rng + ?Sized>(factor: FactorDescriptor, k: usize, rng: &mut R) -> Option<Tripotent> {
    if k > factor.rank() {
        return None;
    }
    if k == 0 {
        return Some(Tripotent::zero(factor));
    }
    for _ in 0..MAX_DRAWS {
        let dec = atomic_decompose(&gaussian_element(factor, rng));
        if dec.len() < k {
            continue;
        }
        let t = dec.head_tripotent(factor, k);
        if let Some(t) = verified(t.into_element(), k) {
            return Some(t);
        }
    }
    None
}

/// Uniform draw from the unit sphere of the Hilbert-Schmidt norm, scaled to
/// triple norm `r`.
pub fn perturbation<R: Rng + ?Sized>(factor: FactorDescriptor, r: f64, rng: &mut R) -> Element {
    loop {
        let g = gaussian_element(factor, rng);
        let n = g.norm();
        if n > 0.0 {
            return g.scale_re(r / n);
        }
    }
}
