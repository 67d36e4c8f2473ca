use super::{Audit, CheckResult};
use crate::error::{Error, Result};
use crate::factor::{Element, FactorDescriptor};
use crate::linalg::{herm_eigen, sym_eigen, CMat, RMat, C64};
use crate::peirce::{p0, p1, p2, peirce, tripotent_defect, Tripotent};
use crate::spectral::{spectral_resolution, support_tripotent};
use crate::tol;

const SQRT2: f64 = std::f64::consts::SQRT_2;

fn require_tripotent(e: &Tripotent) -> Result<()> {
    let d = tripotent_defect(e.element());
    if d > tol::membership(e.element().max_abs()) {
        return Err(Error::NotATripotent(d));
    }
    Ok(())
}

/// Distance bounds between two tripotents in terms of `δ = ‖e − P2(e)f‖`.
pub fn check_tripotent_distance(e: &Tripotent, f: &Tripotent) -> Result<CheckResult> {
    e.element().same_factor(f.element())?;
    require_tripotent(e)?;
    require_tripotent(f)?;
    let (ee, fe) = (e.element(), f.element());
    let delta = ee.dist(&p2(ee, fe));
    let delta_t = fe.dist(&p2(fe, ee));
    let dist = ee.dist(fe);
    let mut a = Audit::new("tripotent_distance");
    a.digest_element(ee);
    a.digest_element(fe);
    a.record("delta", delta);
    a.record("delta_tilde", delta_t);
    a.le("p1_part", p1(ee, fe).norm(), 2.0 * SQRT2 * delta.sqrt());
    a.le("p0_part", p0(fe, ee).norm(), 8.0 * delta + 16.0 * SQRT2 * delta.sqrt());
    let both = delta + 2.0 * SQRT2 * delta.sqrt() + 8.0 * delta_t + 16.0 * SQRT2 * delta_t.sqrt();
    a.le("distance", dist, both);
    if e.rank() == f.rank() {
        let m = e.rank() as f64;
        a.le("distance_same_rank", dist, (m + 1.0) * delta + 2.0 * SQRT2 * delta.sqrt());
    }
    a.add_samples(1);
    Ok(a.finish())
}

/// Operator-norm continuity of the Peirce projections in `δ = ‖e − f‖`, and
/// the three estimates for a norm-one `x = e + P0(e)x`.
pub fn check_peirce_continuity(e: &Tripotent, f: &Tripotent, x: Option<&Element>) -> Result<CheckResult> {
    e.element().same_factor(f.element())?;
    require_tripotent(e)?;
    require_tripotent(f)?;
    let (ee, fe) = (e.element(), f.element());
    let delta = ee.dist(fe);
    let (pe, pf) = (peirce(e)?, peirce(f)?);
    let mut a = Audit::new("peirce_continuity");
    a.digest_element(ee);
    a.digest_element(fe);
    a.record("delta", delta);
    for (k, c) in [(2usize, 4.0), (1, 12.0), (0, 8.0)] {
        let d = (pe.projection(k) - pf.projection(k)).op_norm();
        a.le(&format!("p{k}_difference"), d, c * delta);
    }
    for (u, v) in [(&pe, &pf), (&pf, &pe)] {
        for k in 0..3 {
            for j in (0..3).filter(|&j| j != k) {
                let d = u.projection(k).compose(v.projection(j)).op_norm();
                a.le("cross_term", d, 8.0 * delta);
            }
        }
    }
    if let Some(x) = x {
        x.same_factor(ee)?;
        let n = x.norm();
        if (n - 1.0).abs() > tol::EQ {
            return Err(Error::NotNormOne(n));
        }
        let defect = x.dist(&(ee + &p0(ee, x)));
        if defect > tol::eq(1.0) {
            return Err(Error::MembershipViolation { defect, tolerance: tol::eq(1.0) });
        }
        a.digest_element(x);
        a.le("x.p1", p1(fe, x).norm(), 9.0 * delta);
        a.le("x.p2", p2(fe, x).dist(fe), 9.0 * delta);
        a.le("x.face", x.dist(&(fe + &p0(fe, x))), 9.0 * delta);
    }
    a.add_samples(1);
    Ok(a.finish())
}

/// Selfadjoint part: real symmetric for type 3, Hermitian for square type 1.
fn selfadjoint_defect(a: &Element) -> Result<f64> {
    let m = a.data();
    match a.factor() {
        FactorDescriptor::Type3 { .. } => Ok(m.iter().map(|z| z.im.abs()).fold(0.0, f64::max)),
        FactorDescriptor::Type1 { rows, cols } if rows == cols => Ok((m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)),
        f => Err(Error::UnsupportedFactor(format!("{f} is not a JB*-algebra factor"))),
    }
}

/// Spectral projection of a selfadjoint element onto eigenvalues in `[lo, hi]`.
fn eigen_projection(a: &Element, lo: f64, hi: f64) -> (Element, usize, Vec<f64>) {
    let m = a.data();
    let n = m.nrows();
    let (vals, vecs) = if matches!(a.factor(), FactorDescriptor::Type3 { .. }) {
        // Real symmetric input: keep the eigenbasis real so p stays symmetric.
        let (v, w) = sym_eigen(&RMat::from_fn(n, n, |i, j| m[(i, j)].re));
        (v, w.map(|t| C64::new(t, 0.0)))
    } else {
        herm_eigen(&((m + m.adjoint()) * C64::new(0.5, 0.0)))
    };
    let mut p = CMat::zeros(n, n);
    let mut rank = 0;
    for (i, &v) in vals.iter().enumerate() {
        if v >= lo && v <= hi {
            let w = vecs.column(i);
            p += w * w.adjoint();
            rank += 1;
        }
    }
    (Element::raw(a.factor(), p), rank, vals)
}

/// Davis-type bound `‖p − P2(p)q‖ ≤ (β+δ)²/(β+γ−δ)²` for spectral projections
/// `p` of `a` on `[ν, μ]` and `q` of `b` on `[ν − δ, μ + δ]`.
pub fn davis_pair(a: &Element, b: &Element, nu: f64, mu: f64, gamma: f64) -> Result<CheckResult> {
    a.same_factor(b)?;
    for z in [a, b] {
        let d = selfadjoint_defect(z)?;
        if d > tol::membership(z.max_abs()) {
            return Err(Error::MembershipViolation { defect: d, tolerance: tol::membership(z.max_abs()) });
        }
    }
    if !(gamma > 0.0) || mu < nu {
        return Err(Error::Config(format!("need ν ≤ μ and γ > 0, got [{nu}, {mu}], γ = {gamma}")));
    }
    let (p, m, vals) = eigen_projection(a, nu, mu);
    for v in vals {
        if (v > nu - gamma && v < nu) || (v > mu && v < mu + gamma) {
            return Err(Error::MarginViolation(v));
        }
    }
    let delta = a.dist(b);
    if delta >= gamma / 2.0 {
        return Err(Error::DeltaTooLarge { delta, limit: gamma / 2.0 });
    }
    // Eigenvalues of b sit within δ of those of a, so the window [ν − γ/2, μ + γ/2]
    // selects the same set as [ν − δ, μ + δ] without boundary ties.
    let (q, _, _) = eigen_projection(b, nu - gamma / 2.0, mu + gamma / 2.0);
    let beta = (mu - nu) / 2.0;
    let alpha = (beta + delta).powi(2) / (beta + gamma - delta).powi(2);
    let unit = Element::raw(a.factor(), CMat::identity(p.data().nrows(), p.data().ncols()));
    let mut au = Audit::new("davis");
    au.digest_element(a);
    au.digest_element(b);
    au.digest_f64(nu);
    au.digest_f64(mu);
    au.digest_f64(gamma);
    let lhs = p.dist(&p2(&p, &q));
    au.eq("identity", lhs, p2(&p, &(&unit - &q)).norm(), tol::eq(1.0));
    au.le("p_minus_p2q", lhs, alpha);
    let dist = p.dist(&q);
    au.le("p_minus_q", dist, (m as f64 + 1.0) * alpha + 2.0 * SQRT2 * alpha.sqrt());
    au.record("delta", delta);
    au.record("tightness", if alpha > 0.0 { lhs / alpha } else { 0.0 });
    au.add_samples(1);
    Ok(au.finish())
}

/// `2δ + 4√2·√(δ² + 4δ)/(√3·γ)`.
pub fn support_bound_b(delta: f64, gamma: f64) -> f64 {
    2.0 * delta + 4.0 * SQRT2 * (delta * delta + 4.0 * delta).sqrt() / (3f64.sqrt() * gamma)
}

/// `(m + 1)·B + 2√2·√B`.
pub fn support_bound(delta: f64, gamma: f64, m: usize) -> f64 {
    let b = support_bound_b(delta, gamma);
    (m as f64 + 1.0) * b + 2.0 * SQRT2 * b.sqrt()
}

/// Perturbation of the support tripotent of a norm-one `x`.
pub fn support_perturbation_bound(x: &Element, y: &Element) -> Result<CheckResult> {
    x.same_factor(y)?;
    let e = support_tripotent(x, true)?;
    let gamma = 1.0 - x.dist(e.element());
    let delta = x.dist(y);
    if delta >= gamma / 4.0 {
        return Err(Error::DeltaTooLarge { delta, limit: gamma / 4.0 });
    }
    // Singular values of y near 1 lie in [1 − δ, 1 + δ]; the rest lie below
    // 1 − γ + δ < 1 − γ/2, so the wider window picks the same atoms.
    let f = spectral_resolution(y, 1.0 - gamma / 2.0, 1.0 + gamma / 2.0)?;
    let bound = support_bound(delta, gamma, e.rank());
    let measured = e.element().dist(f.element());
    let mut a = Audit::new("support_perturbation");
    a.digest_element(x);
    a.digest_element(y);
    a.record("delta", delta);
    a.record("gamma", gamma);
    a.record("tightness", if bound > 0.0 { measured / bound } else { 0.0 });
    a.le("support_distance", measured, bound);
    a.le("rank_change", (f.rank() as f64 - e.rank() as f64).abs(), 0.0);
    a.add_samples(1);
    Ok(a.finish())
}
