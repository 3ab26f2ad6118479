//! q-Racah parametrization of the eigenvalue sequences, and the split
//! bases, split sequences and module scalar `r` of each thin irreducible
//! module.

use crate::error::{Error, Result};
use crate::linalg::{frob, intersect, lagrange_projector, left_inverse, lstsq, normalize_phase, orth, projector};
use crate::qtet::local_generators;
use crate::scalar::{arg, csqrt, from_real, modulus, one, powi, real, to_f64, zero, CMat, CVec, Cx, Real};

/// `θ_i = η + u q^{2i−D} + v q^{D−2i}` and the dual analogue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QRacahParams<T: Real> {
    pub q: Cx<T>,
    pub eta: Cx<T>,
    pub u: Cx<T>,
    pub v: Cx<T>,
    pub eta_star: Cx<T>,
    pub u_star: Cx<T>,
    pub v_star: Cx<T>,
    pub diameter: usize,
    /// `q² + q⁻²`.
    pub beta: Cx<T>,
    /// Largest relative reproduction error of the primal sequence.
    pub fit_residual: f64,
    pub dual_fit_residual: f64,
}

impl<T: Real> QRacahParams<T> {
    /// Parameters given outright; the fit residuals are zero.
    #[allow(clippy::too_many_arguments)]
    pub fn new(q: Cx<T>, diameter: usize, eta: Cx<T>, u: Cx<T>, v: Cx<T>, eta_star: Cx<T>, u_star: Cx<T>, v_star: Cx<T>) -> Self {
        QRacahParams {
            q,
            eta,
            u,
            v,
            eta_star,
            u_star,
            v_star,
            diameter,
            beta: q * q + powi(q, -2),
            fit_residual: 0.0,
            dual_fit_residual: 0.0,
        }
    }

    pub fn theta(&self, i: i64) -> Cx<T> {
        let big = self.diameter as i64;
        self.eta + self.u * powi(self.q, 2 * i - big) + self.v * powi(self.q, big - 2 * i)
    }

    pub fn theta_star(&self, i: i64) -> Cx<T> {
        let big = self.diameter as i64;
        self.eta_star + self.u_star * powi(self.q, 2 * i - big) + self.v_star * powi(self.q, big - 2 * i)
    }
}

/// The common value of `(θ_{i−2} − θ_{i+1}) / (θ_{i−1} − θ_i) − 1`.
pub fn beta_of<T: Real>(seq: &[Cx<T>], tol: f64) -> Result<Cx<T>> {
    if seq.len() < 4 {
        return Err(Error::NotQRacahType(format!("sequence of length {} is too short", seq.len())));
    }
    let ratios: Vec<Cx<T>> = (2..seq.len() - 1)
        .map(|i| (seq[i - 2] - seq[i + 1]) / (seq[i - 1] - seq[i]))
        .collect();
    let first = ratios[0];
    for (k, r) in ratios.iter().enumerate() {
        if !(to_f64(modulus(*r - first)) <= tol * to_f64(modulus(first)).max(1.0)) {
            return Err(Error::NotQRacahType(format!(
                "ratio at i = {} is {:?}, differs from {:?} at i = 2",
                k + 2,
                r,
                first
            )));
        }
    }
    let mean = ratios.iter().fold(zero::<T>(), |a, r| a + r) / from_real(real::<T>(ratios.len() as f64));
    Ok(mean - one())
}

/// Among `±q, ±q⁻¹` with `q⁴ − βq² + 1 = 0`, the root with argument in
/// `(0, π]` of least argument; ties go to modulus `≥ 1`.
pub fn canonical_q<T: Real>(beta: Cx<T>) -> Cx<T> {
    let two = from_real(real::<T>(2.0));
    let disc = csqrt(beta * beta - two * two);
    let q2 = (beta + disc) / two;
    let root = csqrt(q2);
    let cands = [root, -root, one::<T>() / root, -one::<T>() / root];
    let pi = to_f64(T::pi());
    let key = |z: &Cx<T>| {
        let mut a = to_f64(arg(*z));
        if a <= 1e-12 {
            a += 2.0 * pi;
        }
        if (a - 2.0 * pi).abs() <= 1e-12 || a > pi + 1e-12 {
            // Outside (0, π]: rank after every admissible candidate.
            a += 10.0;
        }
        a
    };
    let mut best = cands[0];
    for c in cands.iter().skip(1) {
        let (kb, kc) = (key(&best), key(c));
        if kc < kb - 1e-12 || ((kc - kb).abs() <= 1e-12 && modulus(*c) > modulus(best)) {
            best = *c;
        }
    }
    best
}

/// Least-squares fit of `(η, u, v)` for a fixed `q`; returns the
/// coefficients and the relative reproduction error.
fn fit_coefficients<T: Real>(seq: &[Cx<T>], q: Cx<T>) -> Result<([Cx<T>; 3], f64)> {
    let big = seq.len() as i64 - 1;
    let m = CMat::<T>::from_fn(seq.len(), 3, |i, c| match c {
        0 => one(),
        1 => powi(q, 2 * i as i64 - big),
        _ => powi(q, big - 2 * i as i64),
    });
    let b = CVec::<T>::from_column_slice(seq);
    let x = lstsq(&m, &b).ok_or_else(|| Error::NotQRacahType("basis {1, q^(2i-D), q^(D-2i)} is degenerate".into()))?;
    let fitted = &m * &x;
    let scale = seq.iter().fold(1.0f64, |s, z| s.max(to_f64(modulus(*z))));
    let err = (0..seq.len()).fold(0.0f64, |e, i| e.max(to_f64(modulus(fitted[i] - seq[i])))) / scale;
    Ok(([x[0], x[1], x[2]], err))
}

/// Fits both sequences with one shared `q`, chosen on the canonical branch.
pub fn fit_qracah<T: Real>(theta: &[Cx<T>], theta_star: &[Cx<T>], tol_fit: f64) -> Result<QRacahParams<T>> {
    if theta.len() != theta_star.len() {
        return Err(Error::NotQRacahType("eigenvalue and dual eigenvalue sequences differ in length".into()));
    }
    let big = theta.len().saturating_sub(1);
    if big < 3 {
        return Err(Error::DiameterTooSmall(big));
    }
    let beta = beta_of(theta, tol_fit)?;
    let beta_star = beta_of(theta_star, tol_fit)?;
    if !(to_f64(modulus(beta - beta_star)) <= tol_fit * to_f64(modulus(beta)).max(1.0)) {
        return Err(Error::NotQRacahType(format!(
            "eigenvalues give β = {beta:?} but dual eigenvalues give β = {beta_star:?}"
        )));
    }
    excluded_beta(beta, big, tol_fit)?;
    fit_with_q(theta, theta_star, canonical_q(beta), tol_fit)
}

/// `q^{2i} = 1` exactly when `β = 2cos(2πk/i)`. Testing `β` directly avoids
/// the square-root loss in recovering `q` near a double root.
fn excluded_beta<T: Real>(beta: Cx<T>, big: usize, tol_fit: f64) -> Result<()> {
    let scale = to_f64(modulus(beta)).max(1.0);
    for i in 1..=big {
        for k in 0..i {
            if gcd(k, i) != 1 && !(k == 0 && i == 1) {
                continue;
            }
            let c = 2.0 * (std::f64::consts::TAU * k as f64 / i as f64).cos();
            if to_f64(modulus(beta - from_real(real::<T>(c)))) <= tol_fit * scale {
                let msg = if i == 1 {
                    "β = 2 ⇒ q² = 1, which the parametrization excludes".to_string()
                } else if i == 2 {
                    "β = -2 ⇒ q⁴ = 1, which the parametrization excludes".to_string()
                } else {
                    format!("β = 2cos(2π·{k}/{i}) ⇒ q^{} = 1 with {i} ≤ D, which the parametrization excludes", 2 * i)
                };
                return Err(Error::NotQRacahType(msg));
            }
        }
    }
    Ok(())
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 { a } else { gcd(b, a % b) }
}

/// Fits both sequences for a given `q`, enforcing every admissibility
/// condition of the parametrization.
pub fn fit_with_q<T: Real>(theta: &[Cx<T>], theta_star: &[Cx<T>], q: Cx<T>, tol_fit: f64) -> Result<QRacahParams<T>> {
    let big = theta.len() - 1;
    for i in 1..=big as i64 {
        if to_f64(modulus(powi(q, 2 * i) - one())) <= tol_fit {
            return Err(Error::NotQRacahType(format!("q^{} = 1 for q = {q:?}", 2 * i)));
        }
    }
    let ([eta, u, v], fit_residual) = fit_coefficients(theta, q)?;
    let ([eta_star, u_star, v_star], dual_fit_residual) = fit_coefficients(theta_star, q)?;
    if !(fit_residual < tol_fit && dual_fit_residual < tol_fit) {
        return Err(Error::NotQRacahType(format!(
            "reproduction errors {fit_residual:e} (primal) and {dual_fit_residual:e} (dual) exceed {tol_fit:e}"
        )));
    }
    let scale = |seq: &[Cx<T>]| seq.iter().fold(1.0f64, |s, z| s.max(to_f64(modulus(*z))));
    for (name, c, s) in [
        ("u", u, scale(theta)),
        ("v", v, scale(theta)),
        ("u*", u_star, scale(theta_star)),
        ("v*", v_star, scale(theta_star)),
    ] {
        if to_f64(modulus(c)) <= tol_fit * s {
            return Err(Error::NotQRacahType(format!("coefficient {name} vanishes")));
        }
    }
    let beta = q * q + one::<T>() / (q * q);
    Ok(QRacahParams {
        q,
        eta,
        u,
        v,
        eta_star,
        u_star,
        v_star,
        diameter: big,
        beta,
        fit_residual,
        dual_fit_residual,
    })
}

/// Position of a thin module: endpoint, dual endpoint, diameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Shape {
    pub rho: usize,
    pub tau: usize,
    pub d: usize,
}

/// The split basis `v_0, …, v_d` of a module and its second split sequence.
#[derive(Debug, Clone)]
pub struct SplitBasis<T: Real> {
    /// Columns `v_i` in ambient coordinates.
    pub vectors: CMat<T>,
    /// `ϕ_1, …, ϕ_d`.
    pub phi2: Vec<Cx<T>>,
    /// Largest relative defect of the two recurrences.
    pub residual: f64,
}

/// Builds the split basis of the module spanned by `w` on which `a`, `astar`
/// act with eigenvalues `theta_loc[i] = θ_{τ+i}` and dual eigenvalues
/// `theta_star_loc[i] = θ*_{ρ+i}`.
pub fn split_basis<T: Real>(
    a: &CMat<T>,
    astar: &CMat<T>,
    w: &CMat<T>,
    theta_loc: &[Cx<T>],
    theta_star_loc: &[Cx<T>],
    tol: f64,
) -> Result<SplitBasis<T>> {
    let d = w.ncols() - 1;
    if theta_loc.len() != d + 1 || theta_star_loc.len() != d + 1 {
        return Err(Error::numerical("split_basis", "eigenvalue count does not match module dimension"));
    }
    let left = left_inverse(w).ok_or_else(|| Error::numerical("split_basis", "module basis is singular"))?;
    let aw = &left * a * w;
    let sw = &left * astar * w;
    let n = d + 1;
    let p: Vec<CMat<T>> = (0..n).map(|h| lagrange_projector(&aw, theta_loc, h)).collect();
    let ps: Vec<CMat<T>> = (0..n).map(|h| lagrange_projector(&sw, theta_star_loc, h)).collect();
    let sum = |ms: &[CMat<T>]| ms.iter().fold(CMat::<T>::zeros(n, n), |acc, m| acc + m);
    let mut flags = Vec::with_capacity(n);
    for i in 0..n {
        let lower = orth(&sum(&ps[..=i]), 1e-6);
        let upper = orth(&sum(&p[..=d - i]), 1e-6);
        let f = intersect(&lower, &upper, 1e-8);
        if f.ncols() != 1 {
            return Err(Error::ThinnessViolation(format!("split flag space {i} has dimension {}", f.ncols())));
        }
        flags.push(f);
    }

    let start = normalize_phase(&(w * flags[0].column(0)), 1e-8);
    let mut vs: Vec<CVec<T>> = vec![&left * start];
    let mut residual = 0.0f64;
    let rel = |x: &CVec<T>, scale: T| to_f64(x.norm() / scale.max(real(1e-300)));
    for i in 0..d {
        let next = &aw * &vs[i] - &vs[i] * theta_loc[d - i];
        let pf = projector(&flags[i + 1]);
        let leak = rel(&(&next - &pf * &next), next.norm());
        if !(leak < tol) {
            return Err(Error::numerical("split_basis", format!("v_{} leaves its flag space by {leak:e}", i + 1)));
        }
        vs.push(next);
    }
    let last = &aw * &vs[d] - &vs[d] * theta_loc[0];
    let scale_a = frob(&aw).max(T::one());
    residual = residual.max(rel(&last, scale_a * vs[d].norm()));
    let first = &sw * &vs[0] - &vs[0] * theta_star_loc[0];
    let scale_s = frob(&sw).max(T::one());
    residual = residual.max(rel(&first, scale_s * vs[0].norm()));
    let mut phi2 = Vec::with_capacity(d);
    for i in 1..=d {
        let image = &sw * &vs[i] - &vs[i] * theta_star_loc[i];
        let prev = &vs[i - 1];
        let coeff = prev.dotc(&image) / prev.dotc(prev);
        residual = residual.max(rel(&(&image - prev * coeff), scale_s * vs[i].norm()));
        phi2.push(coeff);
    }
    if !(residual < tol) {
        return Err(Error::numerical("split_basis", format!("split recurrences hold only to {residual:e}")));
    }
    let local = CMat::<T>::from_fn(n, n, |r, c| vs[c][r]);
    Ok(SplitBasis { vectors: w * local, phi2, residual })
}

/// `(q^i − q^{−i})(q^{d−i+1} − q^{i−d−1})`.
fn shared_factor<T: Real>(q: Cx<T>, d: i64, i: i64) -> Cx<T> {
    (powi(q, i) - powi(q, -i)) * (powi(q, d - i + 1) - powi(q, i - d - 1))
}

/// The second split sequence predicted by `r`.
pub fn predicted_phi2<T: Real>(p: &QRacahParams<T>, s: Shape, r: Cx<T>) -> Vec<Cx<T>> {
    let (q, big) = (p.q, p.diameter as i64);
    let (rho, tau, d) = (s.rho as i64, s.tau as i64, s.d as i64);
    (1..=d)
        .map(|i| {
            shared_factor(q, d, i)
                * (p.u * r * powi(q, 2 * tau + d - big + 1 - i) - p.v * powi(q, big - 2 * d - 2 * tau + i))
                * (p.u_star * powi(q, 2 * rho + d - big + i - 1) - p.v_star / r * powi(q, big - 2 * rho - i))
        })
        .collect()
}

/// The first split sequence predicted by `r`.
pub fn predicted_phi1<T: Real>(p: &QRacahParams<T>, s: Shape, r: Cx<T>) -> Vec<Cx<T>> {
    let (q, big) = (p.q, p.diameter as i64);
    let (rho, tau, d) = (s.rho as i64, s.tau as i64, s.d as i64);
    (1..=d)
        .map(|i| {
            shared_factor(q, d, i)
                * (powi(q, d - i) - powi(q, i - 1) / r)
                * (p.u * p.u_star * r * powi(q, 2 * tau + 2 * rho + d + i - 2 * big)
                    - p.v * p.v_star * powi(q, 2 * big - 2 * d - 2 * tau - 2 * rho + 1 - i))
        })
        .collect()
}

/// `γ_i = (q^i − q^{−i})(u r q^{2τ+d−D+1−i} − v q^{D−2d−2τ+i})`.
pub fn gammas<T: Real>(p: &QRacahParams<T>, s: Shape, r: Cx<T>) -> Vec<Cx<T>> {
    let (q, big) = (p.q, p.diameter as i64);
    let (tau, d) = (s.tau as i64, s.d as i64);
    (1..=d)
        .map(|i| (powi(q, i) - powi(q, -i)) * (p.u * r * powi(q, 2 * tau + d - big + 1 - i) - p.v * powi(q, big - 2 * d - 2 * tau + i)))
        .collect()
}

/// The accepted module scalar with its diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct RChoice<T: Real> {
    pub r: Cx<T>,
    /// Every root that passed validation, the accepted one first.
    pub valid_roots: Vec<Cx<T>>,
    pub ambiguous: bool,
    /// Largest relative gap between measured and predicted `ϕ_i`.
    pub phi2_residual: f64,
    pub phi1: Vec<Cx<T>>,
}

fn validate_root<T: Real>(p: &QRacahParams<T>, s: Shape, phi2: &[Cx<T>], r: Cx<T>, tol: f64) -> Option<(f64, Vec<Cx<T>>)> {
    let d = s.d as i64;
    let rm = to_f64(modulus(r));
    if !(rm > tol) || !rm.is_finite() {
        return None;
    }
    for e in (1 - d..=d - 1).step_by(2) {
        if to_f64(modulus(r - powi(p.q, e))) <= tol * rm.max(1.0) {
            return None;
        }
    }
    let predicted = predicted_phi2(p, s, r);
    let gap = predicted
        .iter()
        .zip(phi2)
        .fold(0.0f64, |g, (a, b)| g.max(to_f64(modulus(*a - *b)) / to_f64(modulus(*b)).max(1.0)));
    if !(gap < tol) {
        return None;
    }
    let phi1 = predicted_phi1(p, s, r);
    let scale = phi2.iter().fold(1.0f64, |m, z| m.max(to_f64(modulus(*z))));
    if phi1.iter().any(|z| to_f64(modulus(*z)) <= tol * scale) {
        return None;
    }
    Some((gap, phi1))
}

/// Solves the `ϕ_1` identity for `r` and keeps the roots that reproduce
/// every measured `ϕ_i` and satisfy the nonvanishing conditions.
///
/// Both `ϕ_i` and `φ_i` depend on `r` only through `αr + γr⁻¹` with the
/// same `α = uu*q^{2τ+2ρ+2d−2D}` and `γ = vv*q^{2D−2d−2τ−2ρ}`, so `r` and
/// `γ/(αr)` always validate together unless they coincide. The report
/// carries both; the canonical pick is the smaller principal argument, then
/// the larger modulus.
pub fn recover_r<T: Real>(p: &QRacahParams<T>, s: Shape, phi2: &[Cx<T>], tol: f64) -> Result<RChoice<T>> {
    if s.d == 0 {
        return Ok(RChoice { r: one(), valid_roots: vec![one()], ambiguous: false, phi2_residual: 0.0, phi1: Vec::new() });
    }
    if phi2.len() != s.d {
        return Err(Error::numerical("recover_r", "second split sequence has the wrong length"));
    }
    let (q, big) = (p.q, p.diameter as i64);
    let (rho, tau, d) = (s.rho as i64, s.tau as i64, s.d as i64);
    let a = p.u * powi(q, 2 * tau + d - big);
    let b = p.v * powi(q, big - 2 * d - 2 * tau + 1);
    let c = p.u_star * powi(q, 2 * rho + d - big);
    let e = p.v_star * powi(q, big - 2 * rho - 1);
    let target = phi2[0] / shared_factor(q, d, 1);
    let (qa, qb, qc) = (a * c, -(a * e + b * c + target), b * e);
    let two = from_real(real::<T>(2.0));
    let disc = csqrt(qb * qb - from_real(real::<T>(4.0)) * qa * qc);
    let roots = if to_f64(modulus(qa)) == 0.0 { vec![-qc / qb] } else { vec![(-qb + disc) / (two * qa), (-qb - disc) / (two * qa)] };
    let mut valid: Vec<(Cx<T>, f64, Vec<Cx<T>>)> = Vec::new();
    for r in roots {
        if let Some((gap, phi1)) = validate_root(p, s, phi2, r, tol) {
            let dup = valid.iter().any(|(o, _, _)| to_f64(modulus(*o - r)) <= tol * to_f64(modulus(r)).max(1.0));
            if !dup {
                valid.push((r, gap, phi1));
            }
        }
    }
    if valid.is_empty() {
        return Err(Error::NotQRacahType(format!(
            "no admissible module scalar for module (ρ={}, τ={}, d={}); measured ϕ = {:?}",
            s.rho, s.tau, s.d, phi2
        )));
    }
    valid.sort_by(|x, y| {
        let (ax, ay) = (to_f64(arg(x.0)), to_f64(arg(y.0)));
        if (ax - ay).abs() > 1e-12 {
            ax.partial_cmp(&ay).unwrap_or(std::cmp::Ordering::Equal)
        } else {
            to_f64(modulus(y.0)).partial_cmp(&to_f64(modulus(x.0))).unwrap_or(std::cmp::Ordering::Equal)
        }
    });
    let ambiguous = valid.len() > 1;
    let valid_roots = valid.iter().map(|v| v.0).collect();
    let (r, phi2_residual, phi1) = valid.swap_remove(0);
    Ok(RChoice { r, valid_roots, ambiguous, phi2_residual, phi1 })
}

/// Everything the generator action needs about one module.
#[derive(Debug, Clone)]
pub struct LocalModuleData<T: Real> {
    pub shape: Shape,
    pub split: SplitBasis<T>,
    pub r: RChoice<T>,
    pub gamma: Vec<Cx<T>>,
    /// Columns `u_i = (γ_1 ⋯ γ_i)⁻¹ v_i` in ambient coordinates.
    pub u_basis: CMat<T>,
    /// Largest relative defect of the `u`-basis recurrences.
    pub residual: f64,
}

/// Rescales the split basis to the `u`-basis and checks the recurrences of
/// `A` and `A*` on it.
pub fn gamma_and_u_basis<T: Real>(
    p: &QRacahParams<T>,
    s: Shape,
    a: &CMat<T>,
    astar: &CMat<T>,
    split: SplitBasis<T>,
    r: RChoice<T>,
    tol: f64,
) -> Result<LocalModuleData<T>> {
    let d = s.d;
    let gamma = gammas(p, s, r.r);
    let scale = split.phi2.iter().fold(1.0f64, |m, z| m.max(to_f64(modulus(*z))));
    if let Some(i) = gamma.iter().position(|g| to_f64(modulus(*g)) <= tol * scale) {
        return Err(Error::NotQRacahType(format!("γ_{} vanishes for r = {:?}", i + 1, r.r)));
    }
    let mut u_basis = split.vectors.clone();
    let mut acc = one::<T>();
    for i in 1..=d {
        acc *= gamma[i - 1];
        let col = u_basis.column(i) / acc;
        u_basis.set_column(i, &col);
    }
    let (rho, tau) = (s.rho as i64, s.tau as i64);
    let mut residual = 0.0f64;
    let norm_a = frob(a).max(T::one());
    let norm_s = frob(astar).max(T::one());
    for i in 0..=d {
        let ui = u_basis.column(i).into_owned();
        let mut expect_a = &ui * p.theta(tau + d as i64 - i as i64);
        if i < d {
            expect_a += u_basis.column(i + 1) * gamma[i];
        }
        let mut expect_s = &ui * p.theta_star(rho + i as i64);
        if i > 0 {
            expect_s += u_basis.column(i - 1) * (split.phi2[i - 1] / gamma[i - 1]);
        }
        let denom = ui.norm().max(real(1e-300));
        residual = residual.max(to_f64((a * &ui - expect_a).norm() / (norm_a * denom)));
        residual = residual.max(to_f64((astar * &ui - expect_s).norm() / (norm_s * denom)));
    }
    if !(residual < tol) {
        return Err(Error::numerical("gamma_and_u_basis", format!("u-basis recurrences hold only to {residual:e}")));
    }
    Ok(LocalModuleData { shape: s, split, r, gamma, u_basis, residual })
}

/// `θ_{τ+i}` and `θ*_{ρ+i}` for `0 ≤ i ≤ d`.
pub fn local_sequences<T: Real>(p: &QRacahParams<T>, s: Shape) -> (Vec<Cx<T>>, Vec<Cx<T>>) {
    let theta = (0..=s.d as i64).map(|i| p.theta(s.tau as i64 + i)).collect();
    let theta_star = (0..=s.d as i64).map(|i| p.theta_star(s.rho as i64 + i)).collect();
    (theta, theta_star)
}

/// The whole per-module pipeline: split basis, `r`, `γ`, `u`-basis.
pub fn analyze_module<T: Real>(
    p: &QRacahParams<T>,
    s: Shape,
    a: &CMat<T>,
    astar: &CMat<T>,
    w: &CMat<T>,
    tol: f64,
) -> Result<LocalModuleData<T>> {
    let (theta, theta_star) = local_sequences(p, s);
    let split = split_basis(a, astar, w, &theta, &theta_star, tol)?;
    let r = recover_r(p, s, &split.phi2, tol)?;
    gamma_and_u_basis(p, s, a, astar, split, r, tol)
}

/// Matrices of `A` and `A*` on a module of the given shape with scalar `r`,
/// in its `u`-basis, built from the generator action:
/// `A = ηI + u q^{2τ+d−D} x01 + v q^{D−d−2τ} x12` and
/// `A* = η*I + u* q^{2ρ+d−D} x23 + v* q^{D−d−2ρ} x30`.
pub fn planted_pair<T: Real>(p: &QRacahParams<T>, s: Shape, r: Cx<T>) -> Result<(CMat<T>, CMat<T>)> {
    let imgs = local_generators(s.d, r, p.q)?;
    let (q, big) = (p.q, p.diameter as i64);
    let (rho, tau, d) = (s.rho as i64, s.tau as i64, s.d as i64);
    let id = CMat::<T>::identity(s.d + 1, s.d + 1);
    let a = &id * p.eta + imgs.x(0, 1) * (p.u * powi(q, 2 * tau + d - big)) + imgs.x(1, 2) * (p.v * powi(q, big - d - 2 * tau));
    let astar = &id * p.eta_star
        + imgs.x(2, 3) * (p.u_star * powi(q, 2 * rho + d - big))
        + imgs.x(3, 0) * (p.v_star * powi(q, big - d - 2 * rho));
    Ok((a, astar))
}
