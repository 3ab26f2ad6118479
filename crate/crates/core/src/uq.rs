//! Matrix images of `U_q(ŝl₂)` in its equitable and Chevalley
//! presentations, obtained from `⊠_q` images through the four embeddings.

use crate::linalg::{frob, identity, max_abs, rel_residual};
use crate::qtet::BoxImages;
use crate::scalar::{one, qint, to_f64, CMat, Cx, Real};

/// Images of `x_i^{±1}, y_i, z_i` for `i ∈ {0, 1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Equitable<T: Real> {
    pub x: [CMat<T>; 2],
    pub x_inv: [CMat<T>; 2],
    pub y: [CMat<T>; 2],
    pub z: [CMat<T>; 2],
}

/// Images of `K_i^{±1}, e_i^+, e_i^-` for `i ∈ {0, 1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Chevalley<T: Real> {
    pub k: [CMat<T>; 2],
    pub k_inv: [CMat<T>; 2],
    pub e_plus: [CMat<T>; 2],
    pub e_minus: [CMat<T>; 2],
}

/// Normalized residuals of one presentation's defining relations.
#[derive(Debug, Clone, PartialEq)]
pub struct UqReport {
    pub relations: Vec<(String, f64)>,
}

impl UqReport {
    pub fn max_residual(&self) -> f64 {
        self.relations.iter().fold(0.0, |m, (_, r)| if r.is_nan() { f64::NAN } else { m.max(*r) })
    }

    pub fn passes(&self, tol: f64) -> bool {
        let m = self.max_residual();
        m.is_finite() && m < tol
    }
}

/// The homomorphism indexed by `i ∈ ℤ₄`, applied to `⊠_q` images.
pub fn embed_uq<T: Real>(i: i64, images: &BoxImages<T>) -> Equitable<T> {
    let x = |a: i64, b: i64| images.x(i + a, i + b).clone();
    Equitable {
        x: [x(2, 0), x(0, 2)],
        x_inv: [x(0, 2), x(2, 0)],
        y: [x(0, 1), x(2, 3)],
        z: [x(1, 2), x(3, 0)],
    }
}

fn sq_gap<T: Real>(q: Cx<T>) -> Cx<T> {
    let g = q - one::<T>() / q;
    g * g
}

/// `K_i^{±1} = x_i^{±1}`, `e_i^- = y_i − x_i^{-1}`,
/// `e_i^+ = (1 − x_i z_i) q^{-1} (q − q^{-1})^{-2}`.
pub fn equitable_to_chevalley<T: Real>(eq: &Equitable<T>, q: Cx<T>) -> Chevalley<T> {
    let n = eq.x[0].nrows();
    let id = identity::<T>(n);
    let factor = one::<T>() / (q * sq_gap(q));
    let e_plus = [0, 1].map(|i| (&id - &eq.x[i] * &eq.z[i]) * factor);
    let e_minus = [0, 1].map(|i| &eq.y[i] - &eq.x_inv[i]);
    Chevalley { k: eq.x.clone(), k_inv: eq.x_inv.clone(), e_plus, e_minus }
}

/// `x_i^{±1} = K_i^{±1}`, `y_i = K_i^{-1} + e_i^-`,
/// `z_i = K_i^{-1} − K_i^{-1} e_i^+ q (q − q^{-1})^2`.
pub fn chevalley_to_equitable<T: Real>(ch: &Chevalley<T>, q: Cx<T>) -> Equitable<T> {
    let factor = q * sq_gap(q);
    let y = [0, 1].map(|i| &ch.k_inv[i] + &ch.e_minus[i]);
    let z = [0, 1].map(|i| &ch.k_inv[i] - &ch.k_inv[i] * &ch.e_plus[i] * factor);
    Equitable { x: ch.k.clone(), x_inv: ch.k_inv.clone(), y, z }
}

fn qweyl<T: Real>(a: &CMat<T>, b: &CMat<T>, q: Cx<T>) -> CMat<T> {
    let qi = one::<T>() / q;
    (a * b * q - b * a * qi) / (q - qi)
}

/// `‖a³b − [3]a²ba + [3]aba² − ba³‖` over the sum of the term norms.
fn serre<T: Real>(a: &CMat<T>, b: &CMat<T>, q: Cx<T>) -> f64 {
    let q3 = qint(q, 3);
    let a2 = a * a;
    let a3 = &a2 * a;
    let terms = [&a3 * b, &a2 * b * a * q3, a * b * &a2 * q3, b * &a3];
    let total = &terms[0] - &terms[1] + &terms[2] - &terms[3];
    let scale = terms.iter().fold(T::zero(), |s, t| s + frob(t)).max(T::one());
    to_f64(frob(&total) / scale)
}

fn comm_residual<T: Real>(a: &CMat<T>, b: &CMat<T>) -> f64 {
    to_f64(rel_residual(&(a * b), &(b * a)))
}

/// Every relation of the equitable presentation.
pub fn verify_equitable<T: Real>(eq: &Equitable<T>, q: Cx<T>) -> UqReport {
    let n = eq.x[0].nrows();
    let id = identity::<T>(n);
    let mut rel = Vec::new();
    let mut push = |name: String, r: f64| rel.push((name, r));
    for i in 0..2 {
        push(format!("x{i} x{i}^-1 = 1"), to_f64(rel_residual(&(&eq.x[i] * &eq.x_inv[i]), &id)));
        push(format!("x{i}^-1 x{i} = 1"), to_f64(rel_residual(&(&eq.x_inv[i] * &eq.x[i]), &id)));
    }
    let center = &eq.x[0] * &eq.x[1];
    let gens: [(&str, &CMat<T>); 8] = [
        ("x0", &eq.x[0]),
        ("x1", &eq.x[1]),
        ("x0^-1", &eq.x_inv[0]),
        ("x1^-1", &eq.x_inv[1]),
        ("y0", &eq.y[0]),
        ("y1", &eq.y[1]),
        ("z0", &eq.z[0]),
        ("z1", &eq.z[1]),
    ];
    for (name, g) in gens {
        push(format!("x0 x1 commutes with {name}"), comm_residual(&center, g));
    }
    for i in 0..2 {
        push(format!("q-Weyl(x{i}, y{i})"), to_f64(rel_residual(&qweyl(&eq.x[i], &eq.y[i], q), &id)));
        push(format!("q-Weyl(y{i}, z{i})"), to_f64(rel_residual(&qweyl(&eq.y[i], &eq.z[i], q), &id)));
        push(format!("q-Weyl(z{i}, x{i})"), to_f64(rel_residual(&qweyl(&eq.z[i], &eq.x[i], q), &id)));
    }
    let inv_center = &eq.x_inv[0] * &eq.x_inv[1];
    for (i, j) in [(0, 1), (1, 0)] {
        push(format!("q-Weyl(z{i}, y{j}) = x0^-1 x1^-1"), to_f64(rel_residual(&qweyl(&eq.z[i], &eq.y[j], q), &inv_center)));
    }
    for (i, j) in [(0, 1), (1, 0)] {
        push(format!("q-Serre(y{i}, y{j})"), serre(&eq.y[i], &eq.y[j], q));
        push(format!("q-Serre(z{i}, z{j})"), serre(&eq.z[i], &eq.z[j], q));
    }
    UqReport { relations: rel }
}

/// The twenty-one relations of the Chevalley presentation.
pub fn verify_chevalley<T: Real>(ch: &Chevalley<T>, q: Cx<T>) -> UqReport {
    let n = ch.k[0].nrows();
    let id = identity::<T>(n);
    let q2 = q * q;
    let qi2 = one::<T>() / q2;
    let mut rel = Vec::new();
    let mut push = |name: String, r: f64| rel.push((name, r));
    for i in 0..2 {
        push(format!("K{i} K{i}^-1 = 1"), to_f64(rel_residual(&(&ch.k[i] * &ch.k_inv[i]), &id)));
        push(format!("K{i}^-1 K{i} = 1"), to_f64(rel_residual(&(&ch.k_inv[i] * &ch.k[i]), &id)));
    }
    push("K0 K1 = K1 K0".into(), comm_residual(&ch.k[0], &ch.k[1]));
    for i in 0..2 {
        for j in 0..2 {
            let (sp, sm) = if i == j { (q2, qi2) } else { (qi2, q2) };
            let conj = |e: &CMat<T>| &ch.k[i] * e * &ch.k_inv[i];
            push(format!("K{i} e{j}+ K{i}^-1"), to_f64(rel_residual(&conj(&ch.e_plus[j]), &(&ch.e_plus[j] * sp))));
            push(format!("K{i} e{j}- K{i}^-1"), to_f64(rel_residual(&conj(&ch.e_minus[j]), &(&ch.e_minus[j] * sm))));
        }
    }
    let gap = q - one::<T>() / q;
    for i in 0..2 {
        let lhs = &ch.e_plus[i] * &ch.e_minus[i] - &ch.e_minus[i] * &ch.e_plus[i];
        let rhs = (&ch.k[i] - &ch.k_inv[i]) / gap;
        push(format!("[e{i}+, e{i}-]"), to_f64(rel_residual(&lhs, &rhs)));
    }
    push("[e0+, e1-] = 0".into(), comm_residual(&ch.e_plus[0], &ch.e_minus[1]));
    push("[e0-, e1+] = 0".into(), comm_residual(&ch.e_minus[0], &ch.e_plus[1]));
    for (i, j) in [(0, 1), (1, 0)] {
        push(format!("q-Serre(e{i}+, e{j}+)"), serre(&ch.e_plus[i], &ch.e_plus[j], q));
        push(format!("q-Serre(e{i}-, e{j}-)"), serre(&ch.e_minus[i], &ch.e_minus[j], q));
    }
    UqReport { relations: rel }
}

/// Both reports for one embedding, plus the explicit `[e0+, e1-]` norm.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingReport {
    pub index: i64,
    pub equitable: UqReport,
    pub chevalley: UqReport,
    pub cross_commutator: f64,
}

impl EmbeddingReport {
    pub fn max_residual(&self) -> f64 {
        self.equitable.max_residual().max(self.chevalley.max_residual())
    }
}

/// Largest entrywise change after equitable → Chevalley → equitable.
pub fn round_trip_residual<T: Real>(eq: &Equitable<T>, q: Cx<T>) -> f64 {
    let back = chevalley_to_equitable(&equitable_to_chevalley(eq, q), q);
    let mut worst = 0.0f64;
    for i in 0..2 {
        for (b, e) in [(&back.x[i], &eq.x[i]), (&back.x_inv[i], &eq.x_inv[i]), (&back.y[i], &eq.y[i]), (&back.z[i], &eq.z[i])] {
            worst = worst.max(to_f64(max_abs(&(b - e))));
        }
    }
    worst
}

pub fn certify_embeddings<T: Real>(images: &BoxImages<T>, q: Cx<T>) -> Vec<EmbeddingReport> {
    (0..4)
        .map(|i| {
            let eq = embed_uq(i, images);
            let ch = equitable_to_chevalley(&eq, q);
            let cross = &ch.e_plus[0] * &ch.e_minus[1] - &ch.e_minus[1] * &ch.e_plus[0];
            EmbeddingReport {
                index: i,
                equitable: verify_equitable(&eq, q),
                chevalley: verify_chevalley(&ch, q),
                cross_commutator: to_f64(frob(&cross)),
            }
        })
        .collect()
}
