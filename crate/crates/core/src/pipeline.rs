//! End-to-end analysis of a graph: every stage from distance-regularity to
//! the `U_q(ŝl₂)` embeddings, collected into a [`Report`].

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bose_mesner::{find_qpoly_orderings, SpectralData};
use crate::error::{Error, Result};
use crate::graph::{check_distance_regular, distances, Graph};
use crate::linalg::left_inverse;
use crate::qracah::{analyze_module, fit_qracah, LocalModuleData, QRacahParams, Shape};
use crate::qtet::{
    assemble_theta, flip_twist, local_generators, rho_twist, local_theorem_residuals, main_theorem_residuals, verify_relations, BoxImages,
    Coefficients, Gen, LocalBlock,
};
use crate::report::*;
use crate::scalar::{from_real, modulus, to_c64, to_f64, CMat, Real};
use crate::split::{build_phi_psi, tilde_spaces, verify_displacement_coincidence, CoincidenceReport, PhiPsi, SplitFamily, SplitKind};
use crate::subconstituent::{
    commutant_basis, decompose, dual_data, t_membership, triple_product_checks, DecomposeOptions, DualData, TDecomposition,
};
use crate::uq::{certify_embeddings, embed_uq, round_trip_residual};

/// Displacement-coincidence projector residual bound.
pub const COINCIDENCE_TOL: f64 = 1e-8;
/// Entrywise agreement of the two constructions of `Φ`, `Ψ`.
pub const PHI_PSI_TOL: f64 = 1e-9;
/// `‖[Φ, A]‖_F / ‖A‖_F` and its siblings.
pub const CENTRALITY_TOL: f64 = 1e-8;
/// Reconstruction residuals of `A` and `A*`.
pub const MAIN_THEOREM_TOL: f64 = 1e-8;
/// Equitable → Chevalley → equitable, largest entrywise deviation.
pub const ROUND_TRIP_TOL: f64 = 1e-12;
/// Double-commutant membership.
pub const MEMBERSHIP_TOL: f64 = 1e-8;

/// How far the pipeline runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Until {
    /// Stop after the q-Racah fit.
    Fit,
    /// Skip the fit and stop after the module decomposition.
    Decompose,
    Full,
}

#[derive(Debug, Clone)]
pub struct Config {
    pub source: String,
    pub base_vertex: usize,
    pub ordering: usize,
    pub seed: u64,
    pub tol_group: f64,
    pub tol_zero: f64,
    pub tol_rel: f64,
    pub tol_fit: f64,
    pub allow_nonthin: bool,
    pub until: Until,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            source: String::new(),
            base_vertex: 0,
            ordering: 0,
            seed: 42,
            tol_group: 1e-9,
            tol_zero: 1e-8,
            tol_rel: 1e-7,
            tol_fit: 1e-8,
            allow_nonthin: false,
            until: Until::Full,
        }
    }
}

impl Config {
    fn section(&self) -> ConfigSection {
        ConfigSection {
            tol_group: Num(self.tol_group),
            tol_zero: Num(self.tol_zero),
            tol_rel: Num(self.tol_rel),
            tol_fit: Num(self.tol_fit),
            seed: self.seed,
            ordering: self.ordering,
            allow_nonthin: self.allow_nonthin,
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

/// Process exit code for a stage error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Parse(_) | Error::InvalidGraph(_) => 1,
        Error::Disconnected(_) | Error::NotDistanceRegular(_) | Error::DiameterTooSmall(_) => 2,
        Error::NotQPolynomial(_) => 3,
        Error::NotQRacahType(_) => 4,
        Error::ThinnessViolation(_) => 5,
        Error::Numerical { .. } => 6,
        Error::ExcludedLocus(_) => 7,
    }
}

fn stage_name(err: &Error) -> &'static str {
    match err {
        Error::Parse(_) | Error::InvalidGraph(_) => "input",
        Error::Disconnected(_) | Error::NotDistanceRegular(_) | Error::DiameterTooSmall(_) => "distance_regularity",
        Error::NotQPolynomial(_) => "q_polynomial",
        Error::NotQRacahType(_) => "q_racah",
        Error::ThinnessViolation(_) => "thinness",
        Error::Numerical { stage, .. } => stage,
        Error::ExcludedLocus(_) => "excluded_locus",
    }
}

/// Matrices produced by a full run, for callers that want more than the
/// report.
#[derive(Debug, Clone)]
pub struct Artifacts<T: Real> {
    pub spectral: SpectralData<T>,
    pub dual: DualData<T>,
    pub params: QRacahParams<T>,
    pub decomposition: TDecomposition<T>,
    pub locals: Vec<LocalModuleData<T>>,
    pub down_down: SplitFamily<T>,
    pub down_up: SplitFamily<T>,
    pub phi_psi: PhiPsi<T>,
    pub images: BoxImages<T>,
}

pub struct Outcome<T: Real> {
    pub report: Report,
    pub artifacts: Option<Artifacts<T>>,
}

impl<T: Real> Outcome<T> {
    pub fn exit_code(&self) -> i32 {
        self.report.status.exit_code
    }
}

struct Run<'a> {
    cfg: &'a Config,
    report: Report,
}

impl Run<'_> {
    fn push(&mut self, name: &str, value: f64, threshold: f64, gating: bool) {
        let pass = value.is_finite() && value < threshold;
        self.report.status.checks.push(Check { name: name.into(), value: Num(value), threshold: Num(threshold), pass, gating });
    }

    fn check(&mut self, name: &str, value: f64, threshold: f64) {
        self.push(name, value, threshold, true);
    }

    /// The equitable/Chevalley round trip is `x⁻¹x·z` in place of `z`, so it
    /// measures the inverse relation scaled by `‖z‖` rather than anything
    /// the representation could still get wrong.
    fn diagnostic(&mut self, name: &str, value: f64, threshold: f64) {
        self.push(name, value, threshold, false);
    }

    fn flag(&mut self, name: &str, ok: bool) {
        let value = if ok { 0.0 } else { 1.0 };
        self.check(name, value, 0.5);
    }
}

/// Runs the pipeline on `graph`; never panics on mathematical failure,
/// recording the failing stage in the report instead.
pub fn analyze<T: Real>(graph: &Graph, cfg: &Config) -> Outcome<T> {
    let mut run = Run {
        cfg,
        report: Report {
            graph: Some(GraphSection {
                source: cfg.source.clone(),
                n: graph.n(),
                edges: graph.edge_count(),
                diameter: None,
                intersection_array: None,
                base_vertex: cfg.base_vertex,
            }),
            qpoly: None,
            qracah: None,
            decomposition: None,
            split: None,
            phi_psi: None,
            boxtimes: None,
            main_theorem: None,
            uq: None,
            config: cfg.section(),
            status: Status { exit_code: 0, stage: "complete".into(), message: None, checks: Vec::new() },
        },
    };
    let artifacts = match stages::<T>(graph, &mut run) {
        Ok(a) => a,
        Err(e) => {
            run.report.status.exit_code = exit_code(&e);
            run.report.status.stage = stage_name(&e).into();
            run.report.status.message = Some(e.to_string());
            None
        }
    };
    if run.report.status.exit_code == 0 {
        if let Some(bad) = run.report.status.checks.iter().find(|c| c.gating && !c.pass) {
            run.report.status.exit_code = 6;
            run.report.status.stage = "certification".into();
            run.report.status.message = Some(format!("check {} failed", bad.name));
        }
    }
    Outcome { report: run.report, artifacts }
}

/// Parses `source` (a generator like `cycle:9` or an edge list) and runs.
pub fn analyze_source<T: Real>(text: &str, cfg: &Config) -> Outcome<T> {
    match crate::graph::load_graph(text) {
        Ok(g) => analyze(&g, cfg),
        Err(e) => Outcome {
            report: Report {
                graph: None,
                qpoly: None,
                qracah: None,
                decomposition: None,
                split: None,
                phi_psi: None,
                boxtimes: None,
                main_theorem: None,
                uq: None,
                config: cfg.section(),
                status: Status {
                    exit_code: exit_code(&e),
                    stage: stage_name(&e).into(),
                    message: Some(e.to_string()),
                    checks: Vec::new(),
                },
            },
            artifacts: None,
        },
    }
}

fn c(z: crate::scalar::Cx<impl Real>) -> Cplx {
    Cplx::from(to_c64(z))
}

fn coincidence_section<T: Real>(fam: &SplitFamily<T>, rep: &CoincidenceReport) -> SplitKindSection {
    let dims = fam.dims();
    SplitKindSection {
        total_dim: dims.iter().flatten().sum(),
        dims,
        min_singular: Num(fam.min_singular),
        condition: Num(fam.condition),
        coincidence: rep.layers.iter().map(|l| (l.delta, l.module_dim, l.layer_dim, Num(l.residual))).collect(),
        max_coincidence_residual: Num(rep.max_residual()),
    }
}

fn stages<T: Real>(graph: &Graph, run: &mut Run<'_>) -> Result<Option<Artifacts<T>>> {
    let cfg = run.cfg;
    let data = check_distance_regular(graph)?;
    let big = data.diameter;
    if let Some(g) = run.report.graph.as_mut() {
        g.diameter = Some(big);
        g.intersection_array = Some(data.intersection_array());
    }
    if big < 3 {
        return Err(Error::DiameterTooSmall(big));
    }
    if cfg.base_vertex >= graph.n() {
        return Err(Error::Parse(format!("base vertex {} out of range for n = {}", cfg.base_vertex, graph.n())));
    }
    let dist = distances(graph);
    let raw = SpectralData::<T>::build(&dist, &data, cfg.tol_group, cfg.tol_zero)?;
    let orderings = find_qpoly_orderings(&raw.krein, &raw.theta, cfg.tol_zero);
    if orderings.is_empty() {
        return Err(Error::NotQPolynomial("no ordering of the primitive idempotents satisfies the Krein triangle rule".into()));
    }
    let ordering = orderings.get(cfg.ordering).ok_or_else(|| {
        Error::Parse(format!("ordering index {} requested but only {} Q-polynomial orderings exist", cfg.ordering, orderings.len()))
    })?;
    let spectral = raw.reordered(ordering);
    let dual = dual_data(&dist, &spectral, cfg.base_vertex, cfg.tol_zero)?;
    let triples = triple_product_checks(&spectral, &dual, &data, cfg.tol_zero);
    run.report.qpoly = Some(QPolySection {
        ordering: ordering.perm.clone(),
        orderings_found: orderings.len(),
        theta: spectral.theta.iter().map(|t| Num(to_f64(*t))).collect(),
        theta_star: dual.theta_star.iter().map(|t| Num(to_f64(*t))).collect(),
        multiplicities: spectral.mult.clone(),
        triple_products_checked: triples.checked,
        triple_product_violations: triples.violations.len(),
    });
    run.flag("triple_product_vanishing", triples.passed());

    let params = if cfg.until == Until::Decompose {
        None
    } else {
        let theta: Vec<_> = spectral.theta.iter().map(|t| from_real(*t)).collect();
        let theta_star: Vec<_> = dual.theta_star.iter().map(|t| from_real(*t)).collect();
        let p = fit_qracah(&theta, &theta_star, cfg.tol_fit)?;
        run.report.qracah = Some(QRacahSection {
            q: c(p.q),
            beta: c(p.beta),
            eta: c(p.eta),
            u: c(p.u),
            v: c(p.v),
            eta_star: c(p.eta_star),
            u_star: c(p.u_star),
            v_star: c(p.v_star),
            fit_residual: Num(p.fit_residual),
            dual_fit_residual: Num(p.dual_fit_residual),
        });
        Some(p)
    };
    if cfg.until == Until::Fit {
        return Ok(None);
    }

    let a = spectral.adjacency().clone();
    let astar = dual.astar().clone();
    let commutant = commutant_basis(&a, &astar);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let opts = DecomposeOptions { tol_zero: cfg.tol_zero, max_attempts: 25, allow_nonthin: cfg.allow_nonthin };
    let dec = decompose(&spectral, &dual, commutant, &mut rng, opts)?;
    let class_size = |k: usize| dec.iso_classes.iter().find(|c| c.contains(&k)).map_or(1, |c| c.len());
    let mut entries: Vec<ModuleEntry> = dec
        .modules
        .iter()
        .enumerate()
        .map(|(k, m)| ModuleEntry {
            rho: m.rho,
            tau: m.tau,
            d: m.d,
            dim: m.dim(),
            mult: class_size(k),
            iso_class: m.iso_class,
            thin: m.thin,
            disp1: m.disp1,
            disp2: m.disp2,
            estar_dims: m.estar_dims.clone(),
            e_dims: m.e_dims.clone(),
            r: None,
            r_ambiguous: None,
            r_roots: None,
            phi1: None,
            phi2: None,
            gamma: None,
            recurrence_residual: None,
            local_theorem_residual: None,
        })
        .collect();
    let set_modules = |run: &mut Run<'_>, entries: &[ModuleEntry]| {
        run.report.decomposition =
            Some(DecompositionSection { commutant_dim: dec.commutant.len(), attempts: dec.attempts, modules: entries.to_vec() });
    };
    set_modules(run, &entries);
    if let Some(m) = dec.modules.iter().find(|m| !m.thin) {
        return Err(Error::ThinnessViolation(format!(
            "module with endpoint {}, dual endpoint {}, diameter {} has dim E*_i W = {:?}",
            m.rho, m.tau, m.d, m.estar_dims
        )));
    }
    let params = match (cfg.until, params) {
        (Until::Decompose, _) => return Ok(None),
        (_, Some(p)) => p,
        (_, None) => unreachable!("the fit runs unless stopping after decomposition"),
    };

    // Per-module split data; r must agree across each isomorphism class.
    let mut locals = Vec::with_capacity(dec.modules.len());
    for m in &dec.modules {
        let shape = Shape { rho: m.rho, tau: m.tau, d: m.d };
        locals.push(analyze_module(&params, shape, &a, &astar, &m.basis, cfg.tol_rel)?);
    }
    let mut spread = 0.0f64;
    let mut class_images: Vec<BoxImages<T>> = Vec::with_capacity(dec.iso_classes.len());
    for cls in &dec.iso_classes {
        let rep = &locals[cls[0]];
        for &k in cls {
            let gap = to_f64(modulus(locals[k].r.r - rep.r.r)) / to_f64(modulus(rep.r.r)).max(1.0);
            spread = spread.max(gap);
        }
        class_images.push(local_generators(rep.shape.d, rep.r.r, params.q)?);
    }
    run.check("module_scalar_class_spread", spread, cfg.tol_rel);
    let coeffs = Coefficients {
        eta: params.eta,
        u: params.u,
        v: params.v,
        eta_star: params.eta_star,
        u_star: params.u_star,
        v_star: params.v_star,
    };
    let mut max_local = 0.0f64;
    for (k, (m, local)) in dec.modules.iter().zip(&locals).enumerate() {
        let imgs = &class_images[m.iso_class];
        let left = left_inverse(&local.u_basis).ok_or_else(|| Error::numerical("local_theorem", "u-basis is singular"))?;
        let a_loc = &left * &a * &local.u_basis;
        let s_loc = &left * &astar * &local.u_basis;
        let res = local_theorem_residuals(&a_loc, &s_loc, imgs, params.q, &coeffs, m.rho, m.tau, big);
        max_local = max_local.max(res.0).max(res.1);
        let e = &mut entries[k];
        e.r = Some(c(local.r.r));
        e.r_ambiguous = Some(local.r.ambiguous);
        e.r_roots = Some(local.r.valid_roots.iter().map(|z| c(*z)).collect());
        e.phi1 = Some(local.r.phi1.iter().map(|z| c(*z)).collect());
        e.phi2 = Some(local.split.phi2.iter().map(|z| c(*z)).collect());
        e.gamma = Some(local.gamma.iter().map(|z| c(*z)).collect());
        e.recurrence_residual = Some(Num(local.residual.max(local.split.residual)));
        e.local_theorem_residual = Some((Num(res.0), Num(res.1)));
    }
    set_modules(run, &entries);
    run.check("local_reconstruction", max_local, MAIN_THEOREM_TOL);

    let down_down = tilde_spaces(&spectral, &dual, SplitKind::DownDown)?;
    let down_up = tilde_spaces(&spectral, &dual, SplitKind::DownUp)?;
    let n = graph.n();
    run.check("split_down_down_dimension_gap", (down_down.dims().iter().flatten().sum::<usize>() as f64 - n as f64).abs(), 0.5);
    run.check("split_down_up_dimension_gap", (down_up.dims().iter().flatten().sum::<usize>() as f64 - n as f64).abs(), 0.5);
    let co_dd = verify_displacement_coincidence(&down_down, &dec.modules, COINCIDENCE_TOL)?;
    let co_du = verify_displacement_coincidence(&down_up, &dec.modules, COINCIDENCE_TOL)?;
    run.check("displacement_coincidence_first_kind", co_dd.max_residual(), COINCIDENCE_TOL);
    run.check("displacement_coincidence_second_kind", co_du.max_residual(), COINCIDENCE_TOL);
    run.report.split = Some(SplitSection {
        down_down: coincidence_section(&down_down, &co_dd),
        down_up: coincidence_section(&down_up, &co_du),
    });

    let phi_psi = build_phi_psi(&down_down, &down_up, &dec.modules, &dec.commutant, &a, &astar, params.q, PHI_PSI_TOL)?;
    run.check("phi_psi_construction_agreement", phi_psi.agreement, PHI_PSI_TOL);
    run.check("phi_psi_centrality", phi_psi.commutator, CENTRALITY_TOL);
    run.flag("phi_in_T", phi_psi.phi_in_t);
    run.flag("psi_in_T", phi_psi.psi_in_t);
    run.report.phi_psi = Some(PhiPsiSection {
        construction_agreement: Num(phi_psi.agreement),
        centrality_residual: Num(phi_psi.commutator),
        phi_in_t: phi_psi.phi_in_t,
        psi_in_t: phi_psi.psi_in_t,
    });

    let blocks: Vec<LocalBlock<'_, T>> = dec
        .modules
        .iter()
        .zip(&locals)
        .map(|(m, l)| LocalBlock { u_basis: &l.u_basis, images: &class_images[m.iso_class] })
        .collect();
    let images = assemble_theta(n, &blocks)?;
    let relations = verify_relations(&images, params.q);
    run.check("boxtimes_relations", relations.max_residual(), cfg.tol_rel);
    let in_t = Gen::ALL.iter().all(|&g| t_membership(images.get(g), &dec.commutant, MEMBERSHIP_TOL));
    run.flag("generators_in_T", in_t);
    run.report.boxtimes = Some(BoxTimesSection {
        max_relation_residual: Num(relations.max_residual()),
        per_relation: relations
            .relations
            .iter()
            .map(|r| RelationEntry { name: r.name.clone(), residual: Num(r.residual) })
            .collect(),
        generators_in_t: in_t,
        max_r_class_spread: Num(spread),
    });

    let (ra, rs) = main_theorem_residuals(&a, &astar, &phi_psi.phi, &phi_psi.psi, &images, &coeffs)?;
    run.check("main_theorem_A", ra, MAIN_THEOREM_TOL);
    run.check("main_theorem_Astar", rs, MAIN_THEOREM_TOL);
    run.report.main_theorem =
        Some(MainTheoremSection { residual_a: Num(ra), residual_astar: Num(rs), max_local_residual: Num(max_local) });

    let mut embeddings = Vec::with_capacity(4);
    for rep in certify_embeddings(&images, params.q) {
        let round_trip = round_trip_residual(&embed_uq(rep.index, &images), params.q);
        run.check(&format!("uq_embedding_{}_chevalley", rep.index), rep.chevalley.max_residual(), cfg.tol_rel);
        run.check(&format!("uq_embedding_{}_equitable", rep.index), rep.equitable.max_residual(), cfg.tol_rel);
        run.diagnostic(&format!("uq_embedding_{}_round_trip", rep.index), round_trip, ROUND_TRIP_TOL);
        embeddings.push(EmbeddingEntry {
            index: rep.index,
            equitable_max: Num(rep.equitable.max_residual()),
            chevalley_max: Num(rep.chevalley.max_residual()),
            cross_commutator: Num(rep.cross_commutator),
            round_trip: Num(round_trip),
        });
    }
    run.report.uq = Some(UqSection { embeddings });

    Ok(Some(Artifacts {
        spectral,
        dual,
        params,
        decomposition: dec,
        locals,
        down_down,
        down_up,
        phi_psi,
        images,
    }))
}

/// Standalone check of the local generators for one `(d, q, r)`: the 20
/// relations, both twists, and the four `U_q(ŝl₂)` embeddings on the
/// `(d+1)`-dimensional module.
pub fn relations_lab(d: usize, q: Complex<f64>, r: Complex<f64>, tol: f64) -> LabReport {
    let mut report = LabReport {
        d,
        q: q.into(),
        r: r.into(),
        max_relation_residual: None,
        per_relation: Vec::new(),
        rho_twist_residual: None,
        flip_twist_residual: None,
        rho_order_four: None,
        embeddings: Vec::new(),
        status: Status { exit_code: 0, stage: "complete".into(), message: None, checks: Vec::new() },
    };
    let images = match local_generators(d, r, q) {
        Ok(images) => images,
        Err(e) => {
            report.status.exit_code = exit_code(&e);
            report.status.stage = stage_name(&e).into();
            report.status.message = Some(e.to_string());
            return report;
        }
    };
    let mut checks = Vec::new();
    let mut push = |name: String, value: f64, threshold: f64, gating: bool| {
        let pass = value.is_finite() && value < threshold;
        checks.push(Check { name, value: Num(value), threshold: Num(threshold), pass, gating });
    };
    let rel = verify_relations(&images, q);
    let rho = verify_relations(&rho_twist(&images), q).max_residual();
    let flip = verify_relations(&flip_twist(&images), q).max_residual();
    let order_four = rho_twist(&rho_twist(&rho_twist(&rho_twist(&images)))) == images;
    push("relations".into(), rel.max_residual(), tol, true);
    push("rho_twist_relations".into(), rho, tol, true);
    push("flip_twist_relations".into(), flip, tol, true);
    push("rho_twist_order_four".into(), if order_four { 0.0 } else { 1.0 }, 0.5, true);
    for rep in certify_embeddings(&images, q) {
        let round_trip = round_trip_residual(&embed_uq(rep.index, &images), q);
        push(format!("uq_embedding_{}_chevalley", rep.index), rep.chevalley.max_residual(), tol, true);
        push(format!("uq_embedding_{}_equitable", rep.index), rep.equitable.max_residual(), tol, true);
        push(format!("uq_embedding_{}_round_trip", rep.index), round_trip, ROUND_TRIP_TOL, false);
        report.embeddings.push(EmbeddingEntry {
            index: rep.index,
            equitable_max: Num(rep.equitable.max_residual()),
            chevalley_max: Num(rep.chevalley.max_residual()),
            cross_commutator: Num(rep.cross_commutator),
            round_trip: Num(round_trip),
        });
    }
    report.max_relation_residual = Some(Num(rel.max_residual()));
    report.per_relation =
        rel.relations.iter().map(|r| RelationEntry { name: r.name.clone(), residual: Num(r.residual) }).collect();
    report.rho_twist_residual = Some(Num(rho));
    report.flip_twist_residual = Some(Num(flip));
    report.rho_order_four = Some(order_four);
    report.status.checks = checks;
    if let Some(bad) = report.status.checks.iter().find(|c| c.gating && !c.pass) {
        report.status.exit_code = 6;
        report.status.stage = "certification".into();
        report.status.message = Some(format!("check {} failed", bad.name));
    }
    report
}

/// The global images on `V` as plain matrices, for inspection.
pub fn global_matrix<T: Real>(art: &Artifacts<T>, g: Gen) -> &CMat<T> {
    art.images.get(g)
}
