//! Essential horizontal deformation spaces and the unobstructedness
//! recursion: order-by-order solutions of `∂̄ψ_ν = ½ Σ [ψ_μ, ψ_{ν−μ}]`
//! with exact certificates, termination detection, and formal
//! Maurer–Cartan verification.
//!
//! The recursion works entirely in the invariant complex; ∂̄-exactness
//! there is decidable and sufficient for the certificates. A failure is
//! reported as an obstruction at the invariant level with a witness, never
//! extrapolated to the manifold.

use std::sync::Arc;

use serde::Serialize;

use crate::algebra::AlgebraSpec;
use crate::cohomology;
use crate::dsl;
use crate::error::CoreError;
use crate::exterior::{basis_monos, vector_basis, Form, VectorForm};
use crate::geometry::{self, cy_form, predicates, INVARIANT_QUALIFIER};
use crate::linalg::{Matrix, SolveOutcome, Subspace};
use crate::maps;
use crate::scalar::GaussRat;

/// The invariant essential horizontal deformation space: classes of
/// ∂̄-closed θ with `θ⌟Γ = 0` and `θ⌟∂Γ` E₂-closed, modulo ∂̄ of invariant
/// F-valued fields.
#[derive(Clone, Debug)]
pub struct EssentialSpace {
    pub qualifier: String,
    pub dim: usize,
    pub basis: Vec<VectorForm>,
}

pub fn essential_horizontal_space(gamma: &Form) -> Result<EssentialSpace, CoreError> {
    let a = Arc::clone(gamma.algebra());
    if !a.parallelisable() {
        return Err(CoreError::NotParallelisable(a.name.clone()));
    }
    let p = match gamma.bidegree() {
        crate::exterior::Bidegree::Pure(p, 0) => p,
        other => {
            return Err(CoreError::Precondition(format!("expected a (p,0)-form, got {other:?}")))
        }
    };
    let n = a.n;
    let vb1 = vector_basis(n, 1);
    let dg = gamma.del();

    let ker_dbar = crate::linalg::kernel(&maps::vec_delbar_matrix(&a, 1));
    let horiz = geometry::annihilator_space(gamma, 1);
    let z2 = cohomology::z2_subspace(&a, p, 1);
    let contract_dg =
        maps::vec_to_form_matrix(&a, &vb1, &basis_monos(n, p, 1), |t| t.contract(&dg));
    let candidates = ker_dbar.intersect(&horiz).intersect(&z2.preimage(&contract_dg));

    // Quotient by ∂̄ of invariant F-valued fields (zero for invariant
    // fields, but computed rather than assumed).
    let f_fields = geometry::annihilator_space(gamma, 0);
    let dbar0 = maps::vec_delbar_matrix(&a, 0);
    let exact_vecs: Vec<Vec<GaussRat>> =
        f_fields.basis().iter().map(|v| dbar0.mul_vec(v)).collect();
    let exact = Subspace::from_spanning(&exact_vecs, vb1.len());
    let reps = candidates.quotient_representatives(&exact);
    let basis =
        reps.iter().map(|v| VectorForm::from_coeffs(&a, 1, &vb1, v)).collect::<Vec<_>>();
    Ok(EssentialSpace { qualifier: INVARIANT_QUALIFIER.to_string(), dim: basis.len(), basis })
}

/// Finds the constantly horizontal representative `ψ = θ − ∂̄ξ` of an
/// essential class by solving `∂(θ⌟∂Γ) = ∂∂̄(ξ⌟∂Γ)` over invariant
/// F-valued fields ξ. Infeasibility is reported with the solver's witness;
/// it means the invariant-level directional page-1 hypothesis fails, not
/// that the manifold-level one does.
pub fn horizontal_representative(
    theta: &VectorForm,
    gamma: &Form,
) -> Result<(VectorForm, VectorForm), CoreError> {
    let a = Arc::clone(gamma.algebra());
    let n = a.n;
    let p = match gamma.bidegree() {
        crate::exterior::Bidegree::Pure(p, 0) => p,
        _ => return Err(CoreError::Precondition("Γ must be a (p,0)-form".into())),
    };
    let dg = gamma.del();
    let vb0 = vector_basis(n, 0);
    let cod = basis_monos(n, p + 1, 1);
    let rhs = theta.contract(&dg).del().coeffs_on(&cod);
    let f_fields = geometry::annihilator_space(gamma, 0);
    let l2 = maps::vec_to_form_matrix(&a, &vb0, &cod, |t| {
        t.delbar().expect("parallelisable").contract(&dg).del()
    });
    // Parametrise ξ by the F-field basis.
    let cols: Vec<Vec<GaussRat>> = f_fields.basis().iter().map(|b| l2.mul_vec(b)).collect();
    let sys = Matrix::from_cols(&cols, cod.len());
    let y = crate::linalg::solve_particular(&sys, &rhs).map_err(|e| {
        CoreError::Infeasible(format!(
            "no invariant ∂∂̄-potential for ∂(θ⌟∂Γ): {e} (invariant-level hypothesis fails)"
        ))
    })?;
    let mut xi_coeffs = vec![GaussRat::zero(); vb0.len()];
    for (j, b) in f_fields.basis().iter().enumerate() {
        for (l, v) in b.iter().enumerate() {
            xi_coeffs[l] = &xi_coeffs[l] + &(&y[j] * v);
        }
    }
    let xi = VectorForm::from_coeffs(&a, 0, &vb0, &xi_coeffs);
    let psi = theta.sub(&xi.delbar()?);
    debug_assert!(psi.contract(&dg).del().is_zero());
    Ok((psi, xi))
}

/// Per-order certificate of the recursion, re-verifiable from the stored
/// forms.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct StepCertificate {
    pub order: usize,
    pub parity: String,
    /// `∂̄ψ_ν − ½ Σ [ψ_μ, ψ_{ν−μ}] = 0` exactly.
    pub residual_zero: bool,
    /// Odd orders: the right-hand side itself vanished.
    pub rhs_zero: Option<bool>,
    pub vertical: bool,
    pub constantly_vertical: bool,
    /// `ψ_ν⌟u_Γ ∈ Im ∂` (implies the ker ∂ membership, also recorded).
    pub cy_contraction_in_im_del: bool,
    pub cy_contraction_in_ker_del: bool,
    /// `ψ⌟u_Γ = ∂(−(ψ⌟Γ)∧Γ)` when constantly vertical.
    pub verticality_cy_identity: Option<bool>,
}

/// The recursion's outcome: the forms ψ₁..ψ_N, their certificates, and
/// whether every later order is provably zero.
#[derive(Clone, Debug)]
pub struct DeformationSeries {
    pub algebra: Arc<AlgebraSpec>,
    pub gamma: Form,
    pub psi: Vec<VectorForm>,
    pub certificates: Vec<StepCertificate>,
    pub terminated: bool,
    pub max_order: usize,
    /// `∂([ψ₁,ψ₁]⌟Γ) = 0`, the key identity behind the order-2 step.
    pub step2_key_identity: bool,
}

/// Right-hand side `½ Σ_{μ=1}^{ν−1} [ψ_μ, ψ_{ν−μ}]`, with the paired form
/// (exploiting bracket symmetry) asserted equal along the way.
fn recursion_rhs(prior: &[VectorForm], nu: usize) -> Result<VectorForm, CoreError> {
    let a = prior[0].algebra();
    let mut full = VectorForm::zero(a, 2);
    for mu in 1..nu {
        full = full.add(&prior[mu - 1].bracket(&prior[nu - mu - 1])?);
    }
    let full = full.scale(&GaussRat::from_frac(1, 2));
    // Paired form: Σ_{s < ν/2} [ψ_s, ψ_{ν−s}] (+ ½[ψ_{ν/2}, ψ_{ν/2}]).
    let mut paired = VectorForm::zero(a, 2);
    for s in 1..=(nu - 1) / 2 {
        paired = paired.add(&prior[s - 1].bracket(&prior[nu - s - 1])?);
    }
    if nu % 2 == 0 {
        let half =
            prior[nu / 2 - 1].bracket(&prior[nu / 2 - 1])?.scale(&GaussRat::from_frac(1, 2));
        paired = paired.add(&half);
    }
    debug_assert_eq!(full, paired, "bracket symmetry in the paired right-hand side");
    Ok(full)
}

fn certify(nu: usize, psi: &VectorForm, rhs: &VectorForm, gamma: &Form) -> StepCertificate {
    let residual = psi.delbar().expect("parallelisable").sub(rhs);
    let flags = predicates(psi, gamma);
    let u = cy_form(gamma);
    let w = psi.contract(&u);
    let a = gamma.algebra();
    let n = a.n;
    let cod = basis_monos(n, n - 1, 1);
    let in_im_del = maps::im_del(a, n - 1, 1).contains(&w.coeffs_on(&cod));
    let in_ker_del = w.del().is_zero();
    let lemma = if flags.constantly_vertical {
        let rhs_form = psi.contract(gamma).wedge(gamma).neg().del();
        Some(w == rhs_form)
    } else {
        None
    };
    StepCertificate {
        order: nu,
        parity: if nu % 2 == 0 { "even".into() } else { "odd".into() },
        residual_zero: residual.is_zero(),
        rhs_zero: if nu % 2 == 1 { Some(rhs.is_zero()) } else { None },
        vertical: flags.vertical,
        constantly_vertical: flags.constantly_vertical,
        cy_contraction_in_im_del: in_im_del,
        cy_contraction_in_ker_del: in_ker_del,
        verticality_cy_identity: lemma,
    }
}

/// One order of the recursion. Odd orders ν ≥ 3 verify that the right-hand
/// side vanishes and return ψ_ν = 0; even orders solve the constrained
/// system for a constantly vertical solution (the vertical solve plus the
/// ∂∂̄-correction of the order-2 step, imposed as one exact linear system
/// because ∂̄ of an invariant field vanishes). Infeasibility stops the run
/// with the solver's witness.
pub fn kuranishi_step(
    nu: usize,
    prior: &[VectorForm],
    gamma: &Form,
) -> Result<(VectorForm, StepCertificate), CoreError> {
    if nu < 2 || prior.len() != nu - 1 {
        return Err(CoreError::Precondition(format!(
            "order {nu} needs exactly the {} previous forms",
            nu.saturating_sub(1)
        )));
    }
    let a = Arc::clone(gamma.algebra());
    let rhs = recursion_rhs(prior, nu)?;

    if nu % 2 == 1 {
        if !rhs.is_zero() {
            return Err(CoreError::Infeasible(format!(
                "odd-order right-hand side R_{nu} = {rhs} is nonzero; the structural \
                 vanishing of the unobstructedness theorem fails for this input"
            )));
        }
        let psi = VectorForm::zero(&a, 1);
        let cert = certify(nu, &psi, &rhs, gamma);
        return Ok((psi, cert));
    }

    let n = a.n;
    let vb1 = vector_basis(n, 1);
    let vb2 = vector_basis(n, 2);
    let dg = gamma.del();
    let p = match gamma.bidegree() {
        crate::exterior::Bidegree::Pure(p, 0) => p,
        _ => return Err(CoreError::Precondition("Γ must be a (p,0)-form".into())),
    };

    let dbar = maps::vec_delbar_matrix(&a, 1);
    let rhs_coeffs = rhs.coeffs_on(&vb2);

    // Stage 1: is the right-hand side ∂̄-exact at all?
    if let SolveOutcome::Infeasible { witness } = dbar.particular(&rhs_coeffs) {
        let w: Vec<String> = witness.iter().map(|v| v.to_literal()).collect();
        return Err(CoreError::Infeasible(format!(
            "R_{nu} is not ∂̄-exact in the invariant complex; left-null witness [{}]",
            w.join(", ")
        )));
    }

    // Stage 2: vertical solution ψ′ (ψ′⌟∂Γ = 0).
    let vert_cod = basis_monos(n, p, 1);
    let vert = maps::vec_to_form_matrix(&a, &vb1, &vert_cod, |t| t.contract(&dg));
    let stage2 = dbar.vcat(&vert);
    let mut rhs2 = rhs_coeffs.clone();
    rhs2.extend(vec![GaussRat::zero(); vert_cod.len()]);
    if let SolveOutcome::Infeasible { witness } = stage2.particular(&rhs2) {
        let w: Vec<String> = witness.iter().map(|v| v.to_literal()).collect();
        return Err(CoreError::Infeasible(format!(
            "no vertical solution of the order-{nu} equation; left-null witness [{}]",
            w.join(", ")
        )));
    }

    // Stage 3: constant verticality ∂(ψ⌟Γ) = 0 on top.
    let cv_cod = basis_monos(n, p, 1);
    let cv = maps::vec_to_form_matrix(&a, &vb1, &cv_cod, |t| t.contract(gamma).del());
    let stage3 = stage2.vcat(&cv);
    let mut rhs3 = rhs2.clone();
    rhs3.extend(vec![GaussRat::zero(); cv_cod.len()]);
    match stage3.particular(&rhs3) {
        SolveOutcome::Infeasible { witness } => {
            let w: Vec<String> = witness.iter().map(|v| v.to_literal()).collect();
            Err(CoreError::Infeasible(format!(
                "vertical solutions of the order-{nu} equation exist but none is constantly vertical at \
                 the invariant level; left-null witness [{}]",
                w.join(", ")
            )))
        }
        SolveOutcome::Solution(x) => {
            let psi = VectorForm::from_coeffs(&a, 1, &vb1, &x);
            let cert = certify(nu, &psi, &rhs, gamma);
            Ok((psi, cert))
        }
    }
}

/// Runs the recursion from a constantly horizontal ψ₁ to `max_order` or to
/// provable termination: once every pairwise bracket of the stored nonzero
/// forms with total order beyond the current one vanishes, all later
/// right-hand sides are identically zero.
pub fn run_recursion(
    psi1: &VectorForm,
    max_order: usize,
    gamma: &Form,
) -> Result<DeformationSeries, CoreError> {
    let a = Arc::clone(gamma.algebra());
    if !a.parallelisable() {
        return Err(CoreError::NotParallelisable(a.name.clone()));
    }
    if psi1.q() != 1 && !psi1.is_zero() {
        return Err(CoreError::Precondition("ψ₁ must be a (0,1) vector form".into()));
    }
    let psi1 = if psi1.is_zero() { VectorForm::zero(&a, 1) } else { psi1.clone() };
    if !psi1.delbar()?.is_zero() {
        return Err(CoreError::Precondition("ψ₁ must be ∂̄-closed".into()));
    }
    let flags = predicates(&psi1, gamma);
    if !flags.constantly_horizontal {
        return Err(CoreError::Precondition(
            "ψ₁ must be constantly horizontal (ψ₁⌟Γ = 0 and ∂(ψ₁⌟∂Γ) = 0)".into(),
        ));
    }
    if max_order < 1 {
        return Err(CoreError::Precondition("max_order must be at least 1".into()));
    }

    let self_bracket = psi1.bracket(&psi1)?;
    let step2_key_identity = self_bracket.contract(gamma).del().is_zero();

    let mut psi = vec![psi1.clone()];
    let mut certificates = Vec::new();
    let mut terminated = all_later_brackets_vanish(&psi, 1)?;
    let mut nu = 2;
    while nu <= max_order && !terminated {
        let (next, cert) = kuranishi_step(nu, &psi, gamma)?;
        psi.push(next);
        certificates.push(cert);
        terminated = all_later_brackets_vanish(&psi, nu)?;
        nu += 1;
    }
    Ok(DeformationSeries {
        algebra: a,
        gamma: gamma.clone(),
        psi,
        certificates,
        terminated,
        max_order,
        step2_key_identity,
    })
}

/// True when `[ψ_a, ψ_b] = 0` for every pair of stored nonzero forms with
/// `a + b > order`; all later right-hand sides are then zero by induction.
fn all_later_brackets_vanish(psi: &[VectorForm], order: usize) -> Result<bool, CoreError> {
    let nonzero: Vec<usize> = (1..=psi.len()).filter(|&k| !psi[k - 1].is_zero()).collect();
    for &i in &nonzero {
        for &j in &nonzero {
            if j < i || i + j <= order {
                continue;
            }
            if !psi[i - 1].bracket(&psi[j - 1])?.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Per-order residual of the formal Maurer–Cartan identity.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct McOrder {
    pub order: usize,
    pub residual_zero: bool,
    /// First offending coefficient in vector DSL syntax, if any.
    pub offending: Option<String>,
}

/// Report of `∂̄ψ(t) = ½[ψ(t), ψ(t)]` expanded as a formal power series in
/// t. When the series terminated, equality of every t-coefficient is
/// genuine integrability (beyond twice the series length every coefficient
/// vanishes identically); otherwise the report is labelled truncated.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct McReport {
    pub exact: bool,
    pub truncated: bool,
    pub orders_checked: usize,
    pub orders: Vec<McOrder>,
}

pub fn verify_maurer_cartan(series: &DeformationSeries) -> Result<McReport, CoreError> {
    let a = &series.algebra;
    let n_terms = series.psi.len();
    let top = if series.terminated { 2 * n_terms } else { n_terms };
    let zero = VectorForm::zero(a, 1);
    let at = |k: usize| -> &VectorForm {
        if k >= 1 && k <= n_terms {
            &series.psi[k - 1]
        } else {
            &zero
        }
    };
    let mut orders = Vec::new();
    let mut exact = true;
    for nu in 1..=top {
        let mut rhs = VectorForm::zero(a, 2);
        for mu in 1..nu {
            rhs = rhs.add(&at(mu).bracket(at(nu - mu))?);
        }
        let rhs = rhs.scale(&GaussRat::from_frac(1, 2));
        let residual = at(nu).delbar()?.sub(&rhs);
        let ok = residual.is_zero();
        exact &= ok;
        orders.push(McOrder {
            order: nu,
            residual_zero: ok,
            offending: if ok { None } else { Some(dsl::serialize_vector_expr(&residual)) },
        });
    }
    Ok(McReport {
        exact: exact && series.terminated,
        truncated: !series.terminated,
        orders_checked: top,
        orders,
    })
}
