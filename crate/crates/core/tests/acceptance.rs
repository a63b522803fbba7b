//! Acceptance suite: one test per shipping criterion, every comparison
//! exact (tolerance zero). Each test prints a single pass/fail line; run
//! with `cargo test --test acceptance -- --nocapture` to see them.

use std::path::PathBuf;

use pcontact_core::algebra::AlgebraSpec;
use pcontact_core::cohomology;
use pcontact_core::deformation;
use pcontact_core::dsl;
use pcontact_core::exterior::{Form, VectorForm};
use pcontact_core::geometry::{self, NonExistenceVerdict};
use pcontact_core::poly::Poly;
use pcontact_core::scalar::GaussRat;
use pcontact_core::structure::{self, ClassIMatrix};
use pcontact_core::suites;

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn corpus_file(name: &str) -> dsl::ParsedFile {
    let path = corpus_dir().join(name);
    let text = std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("cannot read {}: {e}", path.display()));
    dsl::parse_file(&text).unwrap_or_else(|e| panic!("cannot parse {name}: {e}"))
}

fn rat(n: i64) -> GaussRat {
    GaussRat::from_int(n)
}

struct Criterion {
    label: &'static str,
}

impl Criterion {
    fn new(label: &'static str) -> Self {
        Criterion { label }
    }

    fn check(&self, cond: bool, what: &str) {
        if !cond {
            println!("[acceptance] {}: FAIL ({what})", self.label);
            panic!("{}: {what}", self.label);
        }
    }

    fn pass(&self) {
        println!("[acceptance] {}: PASS", self.label);
    }
}

#[test]
fn criterion_01_class_i_certificates_and_induction() {
    let c = Criterion::new("criterion 1 (class I certificates + induction identity)");
    // l = 1, A = identity: c = −2.
    let (a, gamma) = structure::gen_class_i(1, &ClassIMatrix::Identity).unwrap();
    let cert = geometry::check_p_contact(&a, &gamma).unwrap();
    c.check(cert.valid && cert.top_coefficient == rat(-2), "l=1 identity matrix gives c = -2");

    // l = 1, 2 with identity and all-ones matrices: valid with c ≠ 0.
    for l in 1..=2usize {
        for m in [ClassIMatrix::Identity, ClassIMatrix::Ones] {
            let (a, gamma) = structure::gen_class_i(l, &m).unwrap();
            c.check(a.validate().valid, "generated algebra validates");
            let cert = geometry::check_p_contact(&a, &gamma).unwrap();
            c.check(cert.valid && !cert.top_coefficient.is_zero(), "valid nonzero certificate");
        }
    }

    // Induction identity, two-sided: Γ_{l+1}∧∂Γ_{l+1} equals
    // 2·a_{4l+4,4l+4}···a_{4l+7,4l+7}·(Γ_l∧∂Γ_l)∧φ_{4l+4}∧…∧φ_{4l+7},
    // the right-hand side built from the smaller instance by embedding.
    for m in [ClassIMatrix::Identity, ClassIMatrix::Ones] {
        let l = 1usize;
        let (a_small, g_small) = structure::gen_class_i(l, &m).unwrap();
        let (a_big, g_big) = structure::gen_class_i(l + 1, &m).unwrap();
        let lhs = g_big.wedge(&g_big.del());
        let small_top = g_small.wedge(&g_small.del());
        let mut rhs = structure::embed_form(&small_top, &a_big, 0);
        for k in (4 * l + 4)..=(4 * l + 7) {
            rhs = rhs.wedge(&Form::generator(&a_big, k));
        }
        // Diagonal entries a_{uu} are 1 for both matrix choices.
        rhs = rhs.scale(&rat(2));
        c.check(lhs == rhs, "two-sided induction identity at l = 1");
        let _ = a_small;
    }
    // Higher steps with the identity matrix (dimensions 11 → 15 → 19).
    for l in 2..=3usize {
        let (a_small, g_small) = structure::gen_class_i(l, &ClassIMatrix::Identity).unwrap();
        let (a_big, g_big) = structure::gen_class_i(l + 1, &ClassIMatrix::Identity).unwrap();
        let lhs = g_big.wedge(&g_big.del());
        let mut rhs = structure::embed_form(&g_small.wedge(&g_small.del()), &a_big, 0);
        for k in (4 * l + 4)..=(4 * l + 7) {
            rhs = rhs.wedge(&Form::generator(&a_big, k));
        }
        rhs = rhs.scale(&rat(2));
        c.check(lhs == rhs, "two-sided induction identity at higher l");
        let _ = a_small;
    }
    c.pass();
}

#[test]
fn criterion_02_class_ii_factorial_certificates() {
    let c = Criterion::new("criterion 2 (class II certificates c = p!)");
    for l in 1..=3usize {
        let p = 2 * l + 1;
        let (a, gamma) = structure::gen_class_ii(l).unwrap();
        let cert = geometry::check_p_contact(&a, &gamma).unwrap();
        // Independent multinomial oracle: a sum of p commuting two-forms
        // whose squares vanish has p-th power p!·(product), so c = p!.
        let factorial: i64 = (1..=p as i64).product();
        c.check(cert.valid, "valid certificate");
        c.check(cert.top_coefficient == rat(factorial), "c equals the multinomial count p!");
    }
    c.pass();
}

#[test]
fn criterion_03_triple_symplectic_analogue() {
    let c = Criterion::new("criterion 3 (dimension-7 analogue: c = 12 and ω-relations)");
    let file = corpus_file("g2_analogue.cnil");
    let a = file.algebras["g2-analogue"].clone();
    let gamma = file.forms["gamma"].clone();
    let cert = geometry::check_p_contact(&a, &gamma).unwrap();
    c.check(cert.valid && cert.top_coefficient == rat(12), "c = 12 exactly");
    // The corpus form agrees with the generator construction.
    let (a2, gamma2) = structure::gen_g2_analogue().unwrap();
    c.check(a.same_structure(&a2) && structure::embed_form(&gamma2, &a, 0) == gamma, "corpus matches generator");
    // ω-relations.
    let w: Vec<Form> = (1..=3).map(|k| Form::generator(&a, k + 4).del()).collect();
    let vol4 = Form::generator(&a, 1)
        .wedge(&Form::generator(&a, 2))
        .wedge(&Form::generator(&a, 3))
        .wedge(&Form::generator(&a, 4))
        .scale(&rat(2));
    for (i, wi) in w.iter().enumerate() {
        c.check(wi.wedge(wi) == vol4, "ω_i² = 2 φ1∧φ2∧φ3∧φ4");
        for wj in w.iter().skip(i + 1) {
            c.check(wi.wedge(wj).is_zero(), "ω_i∧ω_j = 0 for i ≠ j");
        }
    }
    c.pass();
}

#[test]
fn criterion_04_fibration_construction_certificates() {
    let c = Criterion::new("criterion 4 (torus-base fibration: c = 2 for both σ)");
    let base = AlgebraSpec::torus("t4", 4);
    let omega = structure::half_volume_symplectic(&base);
    for sigma in [Form::zero(&base), Form::generator(&base, 1).wedge(&Form::generator(&base, 2))] {
        let inst = structure::build_fibred_contact(&base, &omega, &sigma).unwrap();
        let cert = geometry::check_p_contact(&inst.total, &inst.gamma).unwrap();
        c.check(cert.valid && cert.top_coefficient == rat(2), "c = 2 exactly");
    }
    c.pass();
}

#[test]
fn criterion_05_non_existence_proofs() {
    let c = Criterion::new("criterion 5 (symbolic non-existence proofs)");
    // Class I, l = 1, 2: (∂γ)² ≡ 0.
    for l in 1..=2usize {
        let (a, _) = structure::gen_class_i(l, &ClassIMatrix::Identity).unwrap();
        let rep = geometry::no_invariant_contact(&a).unwrap();
        c.check(rep.verdict == NonExistenceVerdict::NoInvariantStructure, "no contact structure");
        c.check(rep.intermediates[0].1 == "0", "(∂γ)² identically zero");
    }
    // The dimension-7 analogue: ∂γ∧∂γ = 2(λ₅²+λ₆²+λ₇²)·φ₁∧φ₂∧φ₃∧φ₄ and
    // γ∧(∂γ)³ ≡ 0.
    {
        let (a, _) = structure::gen_g2_analogue().unwrap();
        let rep = geometry::no_invariant_contact(&a).unwrap();
        c.check(rep.verdict == NonExistenceVerdict::NoInvariantStructure, "no contact structure");
        // Recompute the intermediate independently and compare term by term.
        let mut gamma: Form<Poly> = Form::zero(&a);
        for i in 1..=7 {
            gamma = gamma.add(&Form::<Poly>::generator(&a, i).scale(&Poly::var(&format!("l{i}"))));
        }
        let dg2 = gamma.del().wedge(&gamma.del());
        let vol4 = Form::<Poly>::generator(&a, 1)
            .wedge(&Form::<Poly>::generator(&a, 2))
            .wedge(&Form::<Poly>::generator(&a, 3))
            .wedge(&Form::<Poly>::generator(&a, 4));
        let sq = |k: usize| Poly::var(&format!("l{k}")).mul(&Poly::var(&format!("l{k}")));
        let coeff = sq(5).add(&sq(6)).add(&sq(7)).scale(&rat(2));
        c.check(dg2 == vol4.scale(&coeff), "∂γ∧∂γ = 2(λ₅²+λ₆²+λ₇²)·φ₁∧φ₂∧φ₃∧φ₄");
        c.check(gamma.wedge(&gamma.del().wedge_pow(3)).is_zero(), "γ∧(∂γ)³ ≡ 0");
    }
    // The dimension-8 entry: every closed invariant (2,0)-form ω̃ has
    // ω̃⁴ ≡ 0 on the re-parametrised solution space.
    {
        let (a, _) = structure::gen_heisenberg_c(2).unwrap();
        let rep = geometry::no_invariant_symplectic(&a).unwrap();
        c.check(
            rep.verdict == NonExistenceVerdict::NoInvariantStructure,
            "no symplectic structure at l = 2",
        );
    }
    c.pass();
}

#[test]
fn criterion_06_kernels() {
    let c = Criterion::new("criterion 6 (kernel ranks and direct sums)");
    let file = corpus_file("iwasawa.cnil");
    let a = file.algebras["iwasawa"].clone();
    let gamma = file.forms["gamma"].clone();
    let f = geometry::kernel_f(&gamma);
    let g = geometry::kernel_g(&gamma);
    c.check(f.rank() == 2 && g.rank() == 1, "ranks (2, 1)");
    c.check(
        g.contains(&pcontact_core::exterior::VectorField::frame(&a, 3)) && {
            let fields = g.basis_fields();
            fields.len() == 1 && fields[0].coeffs()[2] == rat(1)
        },
        "G = span(e₃)",
    );
    // F ∩ G = 0 on every corpus p-contact entry.
    let entries = suites::load_corpus_dir(&corpus_dir()).unwrap();
    let mut seen = 0;
    for e in entries.iter().filter(|e| e.p_contact) {
        let gamma = e.gamma.as_ref().unwrap();
        let inter = geometry::kernel_f(gamma).intersect(&geometry::kernel_g(gamma));
        c.check(inter.rank() == 0, "F ∩ G = 0 on every p-contact corpus entry");
        seen += 1;
    }
    c.check(seen >= 6, "at least six p-contact corpus entries exercised");
    c.pass();
}

#[test]
fn criterion_07_non_degeneration_and_torus_controls() {
    let c = Criterion::new("criterion 7 (d₁[Γ] ≠ 0; torus pages degenerate)");
    let entries = suites::load_corpus_dir(&corpus_dir()).unwrap();
    for e in entries.iter().filter(|e| e.p_contact) {
        let rep = cohomology::check_obs_non_e1(&e.algebra, e.gamma.as_ref().unwrap()).unwrap();
        c.check(rep.applicable && rep.d1_class_nonzero, "d₁[Γ] ≠ 0 in invariant E₁^{p+1,0}");
    }
    for name in ["torus2", "torus4"] {
        let a = entries.iter().find(|e| e.algebra.name == name).unwrap().algebra.clone();
        let e1 = cohomology::e1_dims(&a);
        let e2 = cohomology::e2_dims(&a);
        c.check(e1 == e2, "torus control: E₂ = E₁ dimensionwise");
    }
    c.pass();
}

#[test]
fn criterion_08_identity_suites() {
    let c = Criterion::new("criterion 8 (identity suites, 200 seeded samples each)");
    let entries = suites::load_corpus_dir(&corpus_dir()).unwrap();
    for e in &entries {
        if !e.algebra.parallelisable() {
            continue;
        }
        let top = suites::volume_form(&e.algebra);
        for result in suites::run_identity_suites(&e.algebra, &top, 0xACCE97, 200) {
            c.check(result.passed, &format!("{} on {}", result.suite, result.algebra));
        }
    }
    c.pass();
}

#[test]
fn criterion_09_structure_theorem() {
    let c = Criterion::new("criterion 9 (structure theorem on the σ = 0 instance)");
    let file = corpus_file("fibration_sigma0.cnil");
    let a = file.algebras["torus-fib-sigma0"].clone();
    let gamma = file.forms["gamma"].clone();
    let fib = structure::FibrationSpec::from_block(&file.fibrations["fib"], &a).unwrap();
    let rep = structure::verify_structure_theorem(&fib, &gamma).unwrap();
    c.check(rep.passed, "all hypothesis and lemma checks pass");
    c.check(
        rep.omega_tilde.as_deref() == Some("phi1^phi2 + phi3^phi4"),
        "Ω̃ = φ₁∧φ₂ + φ₃∧φ₄",
    );
    let base_cert = rep.base_certificate.as_ref().unwrap();
    c.check(
        base_cert.valid && base_cert.top_coefficient == rat(2),
        "extracted Ω passes with c = 2",
    );
    // Γ = Ω̃∧ψ₃ is among the named checks.
    c.check(
        rep.checks.iter().any(|ch| ch.name.contains("Γ = Ω̃ ∧ ψ₃") && ch.passed),
        "Γ = Ω̃∧ψ₃ exactly",
    );
    // Negative control: a dually-paired but wrong ψ₃ fails by name.
    let bad_psi3 = Form::generator(&a, 7).add(&Form::generator(&a, 1));
    let bad_fib =
        structure::FibrationSpec::new(&a, &[1, 2, 3, 4], fib.h_frame.clone(), bad_psi3).unwrap();
    let bad = structure::verify_structure_theorem(&bad_fib, &gamma).unwrap();
    c.check(!bad.passed, "negative control fails");
    let first_fail = bad.checks.iter().find(|ch| !ch.passed).unwrap();
    c.check(first_fail.name.contains("ψ₃ ∧ Γ = 0"), "failure names the ψ₃∧Γ hypothesis");
    c.pass();
}

#[test]
fn criterion_10_deformation_series() {
    let c = Criterion::new("criterion 10 (certified unobstructedness instance)");
    let file = corpus_file("iwasawa.cnil");
    let a = file.algebras["iwasawa"].clone();
    let gamma = file.forms["gamma"].clone();
    let psi1 = file.vectors["psi1"].clone();
    let series = deformation::run_recursion(&psi1, 8, &gamma).unwrap();
    c.check(series.terminated && series.psi.len() == 2, "terminates at order 2");
    // ψ₂ ∝ φ̄³⊗e₃ (the canonical solution has the constant 1).
    let expect = VectorForm::simple(&Form::anti_generator(&a, 3), 3);
    c.check(series.psi[1] == expect, "ψ₂ = φ̄³⊗e₃");
    c.check(series.step2_key_identity, "∂([ψ₁,ψ₁]⌟Γ) = 0");
    // ψ₃ = 0 because ψ₁ is constantly horizontal and ψ₂ constantly
    // vertical, so their bracket vanishes.
    let flags1 = geometry::predicates(&series.psi[0], &gamma);
    let flags2 = geometry::predicates(&series.psi[1], &gamma);
    c.check(flags1.constantly_horizontal && flags2.constantly_vertical, "predicate structure");
    let (psi3, cert3) =
        deformation::kuranishi_step(3, &series.psi, &gamma).unwrap();
    c.check(psi3.is_zero() && cert3.rhs_zero == Some(true), "ψ₃ = 0 with vanishing bracket RHS");
    c.check(
        series.psi[0].bracket(&series.psi[1]).unwrap().is_zero(),
        "[ψ₁,ψ₂] = 0 (horizontal × vertical)",
    );
    // Per-order certificates match the theorem's structure.
    for cert in &series.certificates {
        c.check(cert.residual_zero, "equation residual zero");
        if cert.parity == "even" {
            c.check(cert.constantly_vertical, "even orders constantly vertical");
            c.check(cert.cy_contraction_in_im_del, "ψ_ν⌟u_Γ ∈ Im ∂");
            c.check(cert.cy_contraction_in_ker_del, "ψ_ν⌟u_Γ ∈ ker ∂");
            c.check(cert.verticality_cy_identity == Some(true), "∂-potential identity");
        } else {
            c.check(cert.rhs_zero == Some(true), "odd orders vanish");
        }
    }
    // Exact Maurer–Cartan identity at every formal order.
    let mc = deformation::verify_maurer_cartan(&series).unwrap();
    c.check(mc.exact && !mc.truncated, "exact Maurer–Cartan identity");
    c.check(mc.orders.iter().all(|o| o.residual_zero), "all t-coefficients vanish");
    // Companion run: the simple seed terminates at order 1.
    let simple = file.vectors["psi1_simple"].clone();
    let s2 = deformation::run_recursion(&simple, 8, &gamma).unwrap();
    c.check(s2.terminated && s2.psi.len() == 1, "simple seed terminates at order 1");
    c.pass();
}

#[test]
fn corpus_certificates_match_printed_constants() {
    // Cross-file sanity used by several criteria: every corpus p-contact
    // form verifies with its frozen constant.
    let c = Criterion::new("corpus certificates (frozen constants)");
    let expected: &[(&str, i64)] = &[
        ("iwasawa", 1),
        ("class-I-l1", -2),
        ("class-II-l1", 6),
        ("g2-analogue", 12),
        ("torus-fib-sigma0", 2),
        ("torus-fib-sigma12", 2),
    ];
    let entries = suites::load_corpus_dir(&corpus_dir()).unwrap();
    for (name, value) in expected {
        let e = entries.iter().find(|e| &e.algebra.name == name).unwrap();
        let gamma = e.gamma.as_ref().unwrap();
        let cert = geometry::check_p_contact(&e.algebra, gamma).unwrap();
        assert!(cert.valid, "{name}");
        assert_eq!(cert.top_coefficient, rat(*value), "{name}");
        // Independent wedge path: the opposite product order must give the
        // same constant (the interleaving sign (−1)^{p(p+1)} is +1).
        let other = geometry::top_coefficient(&gamma.del().wedge(gamma));
        assert_eq!(other, cert.top_coefficient, "{name}: both wedge orders");
    }
    c.pass();
}

#[test]
fn corpus_structural_suites_all_pass() {
    // The full selftest family over the corpus: validation, identity
    // suites (lighter sampling here; criterion 8 runs them at 200), page
    // monotonicity, the ∂∂̄ inclusion, kernel direct sums with
    // integrability, the non-degeneration class, predicate consistency,
    // the horizontal×vertical bracket vanishing, and the verticality
    // ∂-potential identity.
    let c = Criterion::new("corpus structural suites");
    let entries = suites::load_corpus_dir(&corpus_dir()).unwrap();
    for r in suites::run_corpus_suites(&entries, 0xC0FFEE, 50) {
        c.check(r.passed, &format!("{} on {}: {}", r.suite, r.algebra, r.detail));
    }
    c.pass();
}

#[test]
fn corpus_round_trips_through_the_grammar() {
    let c = Criterion::new("corpus serialization round trip");
    let entries = suites::load_corpus_dir(&corpus_dir()).unwrap();
    for e in &entries {
        let text = dsl::serialize_algebra(&e.algebra);
        let back = dsl::parse_algebra(&text).unwrap();
        assert!(back.same_structure(&e.algebra), "{}", e.algebra.name);
        if let Some(g) = &e.gamma {
            let expr = dsl::serialize_form_expr(g);
            let back = dsl::parse_form_expr(&e.algebra, &expr).unwrap();
            assert_eq!(&back, g);
        }
    }
    c.pass();
}
