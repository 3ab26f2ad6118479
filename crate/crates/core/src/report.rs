//! Serializable certification report. Floats are written with 17
//! significant digits so reports diff cleanly and round-trip exactly.

use num_complex::Complex;
use serde::ser::Error as _;
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

/// A float serialized as `d.dddddddddddddddde±x`, or `null` when not finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        let text = if self.0 == 0.0 { "0.0".to_string() } else { format!("{:.16e}", self.0) };
        let raw = RawValue::from_string(text).map_err(S::Error::custom)?;
        raw.serialize(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cplx {
    pub re: Num,
    pub im: Num,
}

impl From<Complex<f64>> for Cplx {
    fn from(z: Complex<f64>) -> Self {
        Cplx { re: Num(z.re), im: Num(z.im) }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GraphSection {
    pub source: String,
    pub n: usize,
    pub edges: usize,
    #[serde(rename = "D")]
    pub diameter: Option<usize>,
    /// `{b_0, …, b_{D−1}; c_1, …, c_D}`.
    pub intersection_array: Option<(Vec<usize>, Vec<usize>)>,
    pub base_vertex: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct QPolySection {
    /// Primitive idempotent indices (by descending eigenvalue) in Q-order.
    pub ordering: Vec<usize>,
    pub orderings_found: usize,
    pub theta: Vec<Num>,
    pub theta_star: Vec<Num>,
    pub multiplicities: Vec<usize>,
    pub triple_products_checked: usize,
    pub triple_product_violations: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct QRacahSection {
    pub q: Cplx,
    pub beta: Cplx,
    pub eta: Cplx,
    pub u: Cplx,
    pub v: Cplx,
    pub eta_star: Cplx,
    pub u_star: Cplx,
    pub v_star: Cplx,
    pub fit_residual: Num,
    pub dual_fit_residual: Num,
}

#[derive(Debug, Clone, Serialize)]
pub struct ModuleEntry {
    pub rho: usize,
    pub tau: usize,
    pub d: usize,
    pub dim: usize,
    /// Number of modules in the same isomorphism class.
    pub mult: usize,
    pub iso_class: usize,
    pub thin: bool,
    pub disp1: i64,
    pub disp2: i64,
    pub estar_dims: Vec<usize>,
    pub e_dims: Vec<usize>,
    pub r: Option<Cplx>,
    pub r_ambiguous: Option<bool>,
    pub r_roots: Option<Vec<Cplx>>,
    pub phi1: Option<Vec<Cplx>>,
    pub phi2: Option<Vec<Cplx>>,
    pub gamma: Option<Vec<Cplx>>,
    pub recurrence_residual: Option<Num>,
    pub local_theorem_residual: Option<(Num, Num)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecompositionSection {
    pub commutant_dim: usize,
    pub attempts: usize,
    pub modules: Vec<ModuleEntry>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SplitKindSection {
    pub dims: Vec<Vec<usize>>,
    pub total_dim: usize,
    pub min_singular: Num,
    pub condition: Num,
    /// `(δ, module span dim, tilde layer dim, residual)` per displacement.
    pub coincidence: Vec<(i64, usize, usize, Num)>,
    pub max_coincidence_residual: Num,
}

#[derive(Debug, Clone, Serialize)]
pub struct SplitSection {
    pub down_down: SplitKindSection,
    pub down_up: SplitKindSection,
}

#[derive(Debug, Clone, Serialize)]
pub struct PhiPsiSection {
    pub construction_agreement: Num,
    pub centrality_residual: Num,
    pub phi_in_t: bool,
    pub psi_in_t: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct RelationEntry {
    pub name: String,
    pub residual: Num,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoxTimesSection {
    pub max_relation_residual: Num,
    pub per_relation: Vec<RelationEntry>,
    pub generators_in_t: bool,
    pub max_r_class_spread: Num,
}

#[derive(Debug, Clone, Serialize)]
pub struct MainTheoremSection {
    #[serde(rename = "residual_A")]
    pub residual_a: Num,
    #[serde(rename = "residual_Astar")]
    pub residual_astar: Num,
    pub max_local_residual: Num,
}

#[derive(Debug, Clone, Serialize)]
pub struct EmbeddingEntry {
    pub index: i64,
    pub equitable_max: Num,
    pub chevalley_max: Num,
    pub cross_commutator: Num,
    pub round_trip: Num,
}

#[derive(Debug, Clone, Serialize)]
pub struct UqSection {
    pub embeddings: Vec<EmbeddingEntry>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConfigSection {
    pub tol_group: Num,
    pub tol_zero: Num,
    pub tol_rel: Num,
    pub tol_fit: Num,
    pub seed: u64,
    pub ordering: usize,
    pub allow_nonthin: bool,
    pub version: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: Num,
    pub threshold: Num,
    pub pass: bool,
    /// Whether a failure here turns the exit code nonzero. Diagnostic checks
    /// are reported but do not decide certification.
    pub gating: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Status {
    pub exit_code: i32,
    /// Stage that stopped the run, or `"complete"`.
    pub stage: String,
    pub message: Option<String>,
    pub checks: Vec<Check>,
}

/// Output of the standalone relations lab.
#[derive(Debug, Clone, Serialize)]
pub struct LabReport {
    pub d: usize,
    pub q: Cplx,
    pub r: Cplx,
    pub max_relation_residual: Option<Num>,
    pub per_relation: Vec<RelationEntry>,
    pub rho_twist_residual: Option<Num>,
    pub flip_twist_residual: Option<Num>,
    pub rho_order_four: Option<bool>,
    pub embeddings: Vec<EmbeddingEntry>,
    pub status: Status,
}

impl LabReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub graph: Option<GraphSection>,
    pub qpoly: Option<QPolySection>,
    pub qracah: Option<QRacahSection>,
    pub decomposition: Option<DecompositionSection>,
    pub split: Option<SplitSection>,
    pub phi_psi: Option<PhiPsiSection>,
    pub boxtimes: Option<BoxTimesSection>,
    pub main_theorem: Option<MainTheoremSection>,
    pub uq: Option<UqSection>,
    pub config: ConfigSection,
    pub status: Status,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
