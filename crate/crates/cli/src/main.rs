//! Command-line front end: parse inputs, dispatch verifications, and emit
//! deterministic text or JSON reports.
//!
//! Exit status: 0 when every check passed, 1 on a verification failure
//! (with certificates in the report), 2 on input errors.

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use pcontact_core::algebra::AlgebraSpec;
use pcontact_core::cohomology;
use pcontact_core::deformation;
use pcontact_core::dsl::{self, ParsedFile};
use pcontact_core::error::CoreError;
use pcontact_core::exterior::{Form, VectorForm};
use pcontact_core::geometry;
use pcontact_core::report::Report;
use pcontact_core::scalar::GaussRat;
use pcontact_core::structure::{self, ClassIMatrix, FibrationSpec};
use pcontact_core::suites;

#[derive(Parser)]
#[command(
    name = "pcontact",
    version,
    about = "Exact verifier for invariant holomorphic p-contact geometry on nilpotent complex Lie algebras"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyKind {
    #[value(name = "p-contact")]
    PContact,
    #[value(name = "s-symplectic")]
    SSymplectic,
}

#[derive(Clone, Copy, ValueEnum)]
enum NoStructureKind {
    Contact,
    Symplectic,
}

#[derive(Args)]
struct InputArgs {
    /// DSL file defining the algebra (and named forms); stdin when omitted
    #[arg(long)]
    algebra: Option<PathBuf>,
    /// Named form from the file, or an inline form expression
    #[arg(long)]
    form: Option<String>,
    /// Named vector from the file, or an inline vector expression
    #[arg(long)]
    vector: Option<String>,
    /// Report format
    #[arg(long, value_enum, default_value = "text")]
    output: OutputFormat,
}

#[derive(Subcommand)]
enum Command {
    /// Verify a p-contact or s-symplectic certificate
    Verify {
        kind: VerifyKind,
        #[command(flatten)]
        input: InputArgs,
    },
    /// Kernels F and G, their splitting, and integrability
    Kernels {
        #[command(flatten)]
        input: InputArgs,
        /// Also run the directional ddbar property checks
        #[arg(long)]
        directional: bool,
    },
    /// Invariant Frölicher pages E₁ and E₂
    Froelicher {
        #[command(flatten)]
        input: InputArgs,
    },
    /// Run the unobstructedness recursion from a seed
    Deform {
        #[command(flatten)]
        input: InputArgs,
        /// Maximum recursion order
        #[arg(long, default_value_t = 8)]
        order: usize,
    },
    /// Verify the fibration structure theorem on a declared fibration
    #[command(name = "structure-theorem")]
    StructureTheorem {
        #[command(flatten)]
        input: InputArgs,
        /// Named fibration block (default: the only one in the file)
        #[arg(long)]
        fibration: Option<String>,
    },
    /// Emit a generated example family as DSL text
    Example {
        family: String,
        #[arg(long, default_value_t = 1)]
        l: usize,
        /// identity | ones | path to a matrix file
        #[arg(long, default_value = "identity")]
        matrix: String,
        /// zero | phi12 (for the fibration family)
        #[arg(long, default_value = "zero")]
        sigma: String,
    },
    /// Symbolic non-existence proofs over generic invariant forms
    #[command(name = "no-structure")]
    NoStructure {
        kind: NoStructureKind,
        #[command(flatten)]
        input: InputArgs,
    },
    /// Run every property suite over the corpus
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "corpus")]
        corpus: PathBuf,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, value_enum, default_value = "text")]
        output: OutputFormat,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

struct LoadedInput {
    file: ParsedFile,
    algebra: Arc<AlgebraSpec>,
    source_name: String,
}

fn load_input(input: &InputArgs) -> Result<LoadedInput, CoreError> {
    let (text, source_name) = match &input.algebra {
        Some(path) => (
            std::fs::read_to_string(path)
                .map_err(|e| CoreError::Io(format!("{}: {e}", path.display())))?,
            path.display().to_string(),
        ),
        None => {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| CoreError::Io(format!("stdin: {e}")))?;
            (buf, "<stdin>".to_string())
        }
    };
    let file = dsl::parse_file(&text)?;
    if file.algebra_order.len() != 1 {
        return Err(CoreError::Semantic(format!(
            "input must define exactly one algebra, found {}",
            file.algebra_order.len()
        )));
    }
    let algebra = file.algebras[&file.algebra_order[0]].clone();
    let cert = algebra.validate();
    if !cert.valid {
        let bad: Vec<String> =
            cert.checks.iter().filter(|c| !c.passed).map(|c| c.detail.clone()).collect();
        return Err(CoreError::Semantic(format!(
            "algebra '{}' failed validation: {}",
            algebra.name,
            bad.join("; ")
        )));
    }
    Ok(LoadedInput { file, algebra, source_name })
}

fn pick_form(loaded: &LoadedInput, wanted: &Option<String>) -> Result<(String, Form), CoreError> {
    match wanted {
        Some(name) => {
            if let Some(f) = loaded.file.forms.get(name) {
                Ok((name.clone(), f.clone()))
            } else {
                let f = dsl::parse_form_expr(&loaded.algebra, name)?;
                Ok((name.clone(), f))
            }
        }
        None => match loaded.file.form_order.len() {
            1 => {
                let name = loaded.file.form_order[0].clone();
                Ok((name.clone(), loaded.file.forms[&name].clone()))
            }
            0 => Err(CoreError::Precondition("no form defined in the input; pass --form".into())),
            k => Err(CoreError::Precondition(format!(
                "{k} forms defined in the input; pass --form to choose one"
            ))),
        },
    }
}

fn pick_vector(
    loaded: &LoadedInput,
    wanted: &Option<String>,
) -> Result<(String, VectorForm), CoreError> {
    match wanted {
        Some(name) => {
            if let Some(v) = loaded.file.vectors.get(name) {
                Ok((name.clone(), v.clone()))
            } else {
                let v = dsl::parse_vector_expr(&loaded.algebra, name)?;
                Ok((name.clone(), v))
            }
        }
        None => {
            if let Some(v) = loaded.file.vectors.get("psi1") {
                return Ok(("psi1".to_string(), v.clone()));
            }
            match loaded.file.vectors.len() {
                1 => {
                    let (name, v) = loaded.file.vectors.iter().next().unwrap();
                    Ok((name.clone(), v.clone()))
                }
                0 => Err(CoreError::Precondition(
                    "no vector defined in the input; pass --vector".into(),
                )),
                k => Err(CoreError::Precondition(format!(
                    "{k} vectors defined; pass --vector to choose one"
                ))),
            }
        }
    }
}

fn emit(report: &Report, output: OutputFormat) -> ExitCode {
    match output {
        OutputFormat::Text => print!("{}", report.to_text()),
        OutputFormat::Json => println!("{}", report.to_json()),
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn run(cli: Cli) -> Result<ExitCode, CoreError> {
    match cli.command {
        Command::Verify { kind, input } => {
            let loaded = load_input(&input)?;
            let (form_name, form) = pick_form(&loaded, &input.form)?;
            let mut report = Report::new(match kind {
                VerifyKind::PContact => "verify p-contact",
                VerifyKind::SSymplectic => "verify s-symplectic",
            })
            .input("algebra", &loaded.source_name)
            .input("form", &form_name);
            match kind {
                VerifyKind::PContact => {
                    let cert = geometry::check_p_contact(&loaded.algebra, &form)?;
                    report.set_dim("p", cert.p);
                    report.set_dim("top_coefficient", cert.top_coefficient.to_literal());
                    if !cert.valid {
                        for f in &cert.failures {
                            report.fail(f);
                        }
                    }
                    report.push_certificate(&cert);
                }
                VerifyKind::SSymplectic => {
                    let cert = geometry::check_s_symplectic(&loaded.algebra, &form)?;
                    report.set_dim("s", cert.s);
                    report.set_dim("top_coefficient", cert.top_coefficient.to_literal());
                    if !cert.valid {
                        for f in &cert.failures {
                            report.fail(f);
                        }
                    }
                    report.push_certificate(&cert);
                }
            }
            Ok(emit(&report, input.output))
        }

        Command::Kernels { input, directional } => {
            let loaded = load_input(&input)?;
            let (form_name, form) = pick_form(&loaded, &input.form)?;
            let mut report =
                Report::new("kernels").input("algebra", &loaded.source_name).input("form", &form_name);
            let f = geometry::kernel_f(&form);
            let g = geometry::kernel_g(&form);
            report.set_dim("rank_f", f.rank());
            report.set_dim("rank_g", g.rank());
            report.set_dim(
                "basis_f",
                f.basis_fields().iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            );
            report.set_dim(
                "basis_g",
                g.basis_fields().iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            );
            let (split, _) = geometry::splitting_checks(&form);
            // The direct-sum property is a theorem for valid p-contact
            // forms; a non-splitting F ⊕ G ⊊ g is a finding, not a failure.
            if split.intersection_rank != 0 {
                report.fail("F ∩ G ≠ 0");
            }
            report.push_certificate(&split);
            if loaded.algebra.parallelisable() {
                let integ = geometry::g_integrability(&form)?;
                if !integ.integrable {
                    report.fail("G is not bracket-closed");
                }
                report.push_certificate(&integ);
            }
            if directional {
                let dir = geometry::directional_properties(&form)?;
                for c in &dir.checks {
                    if !c.passed {
                        report.fail(&format!("{}: {}", c.name, c.detail));
                    }
                }
                report.push_certificate(&dir);
            }
            Ok(emit(&report, input.output))
        }

        Command::Froelicher { input } => {
            let loaded = load_input(&input)?;
            let mut report = Report::new("froelicher").input("algebra", &loaded.source_name);
            let pages = cohomology::froelicher_report(&loaded.algebra);
            report.set_dim("e1", &pages.e1);
            report.set_dim("e2", &pages.e2);
            if !pages.pagewise_monotone || !pages.total_degree_monotone {
                report.fail("page monotonicity violated");
            }
            report.push_certificate(&pages);
            if input.form.is_some() {
                let (_, form) = pick_form(&loaded, &input.form)?;
                let obs = cohomology::check_obs_non_e1(&loaded.algebra, &form)?;
                if obs.applicable && !obs.d1_class_nonzero {
                    report.fail("d₁[Γ] vanished for a valid p-contact structure");
                }
                report.push_certificate(&obs);
            }
            Ok(emit(&report, input.output))
        }

        Command::Deform { input, order } => {
            let loaded = load_input(&input)?;
            let (form_name, gamma) = pick_form(&loaded, &input.form)?;
            let (vec_name, seed) = pick_vector(&loaded, &input.vector)?;
            let mut report = Report::new("deform")
                .input("algebra", &loaded.source_name)
                .input("form", &form_name)
                .input("vector", &vec_name)
                .input("order", &order.to_string());
            let space = deformation::essential_horizontal_space(&gamma)?;
            report.set_dim("essential_horizontal_dim", space.dim);
            report.set_dim(
                "essential_basis",
                space.basis.iter().map(dsl::serialize_vector_expr).collect::<Vec<_>>(),
            );
            // Move to a constantly horizontal representative when needed.
            let flags = geometry::predicates(&seed, &gamma);
            let psi1 = if flags.constantly_horizontal {
                seed
            } else {
                let (psi, _) = deformation::horizontal_representative(&seed, &gamma)?;
                psi
            };
            let series = deformation::run_recursion(&psi1, order, &gamma)?;
            report.set_dim("terminated", series.terminated);
            report.set_dim("orders_computed", series.psi.len());
            report.set_dim("step2_key_identity", series.step2_key_identity);
            for (k, psi) in series.psi.iter().enumerate() {
                report.push_series(&serde_json::json!({
                    "order": k + 1,
                    "psi": dsl::serialize_vector_expr(psi),
                }));
            }
            for cert in &series.certificates {
                if !cert.residual_zero {
                    report.fail(&format!("order {} residual nonzero", cert.order));
                }
                report.push_certificate(cert);
            }
            let mc = deformation::verify_maurer_cartan(&series)?;
            if series.terminated && !mc.exact {
                report.fail("Maurer–Cartan identity failed for a terminated series");
            }
            report.push_certificate(&mc);
            Ok(emit(&report, input.output))
        }

        Command::StructureTheorem { input, fibration } => {
            let loaded = load_input(&input)?;
            let (form_name, gamma) = pick_form(&loaded, &input.form)?;
            let block = match &fibration {
                Some(name) => loaded
                    .file
                    .fibrations
                    .get(name)
                    .ok_or_else(|| CoreError::Precondition(format!("no fibration '{name}'")))?,
                None => {
                    if loaded.file.fibrations.len() == 1 {
                        loaded.file.fibrations.values().next().unwrap()
                    } else {
                        return Err(CoreError::Precondition(
                            "pass --fibration to choose a fibration block".into(),
                        ));
                    }
                }
            };
            let fib = FibrationSpec::from_block(block, &loaded.algebra)?;
            let mut report = Report::new("structure-theorem")
                .input("algebra", &loaded.source_name)
                .input("form", &form_name)
                .input("fibration", &block.name);
            let rep = structure::verify_structure_theorem(&fib, &gamma)?;
            for c in &rep.checks {
                if !c.passed {
                    report.fail(&format!("{}: {}", c.name, c.detail));
                }
            }
            if let Some(o) = &rep.omega_tilde {
                report.set_dim("omega_tilde", o.clone());
            }
            if let Some(o) = &rep.extracted_omega {
                report.set_dim("extracted_omega", o.clone());
            }
            report.push_certificate(&rep);
            Ok(emit(&report, input.output))
        }

        Command::Example { family, l, matrix, sigma } => {
            let text = generate_example(&family, l, &matrix, &sigma)?;
            print!("{text}");
            Ok(ExitCode::SUCCESS)
        }

        Command::NoStructure { kind, input } => {
            let loaded = load_input(&input)?;
            let mut report = Report::new(match kind {
                NoStructureKind::Contact => "no-structure contact",
                NoStructureKind::Symplectic => "no-structure symplectic",
            })
            .input("algebra", &loaded.source_name);
            let rep = match kind {
                NoStructureKind::Contact => geometry::no_invariant_contact(&loaded.algebra)?,
                NoStructureKind::Symplectic => geometry::no_invariant_symplectic(&loaded.algebra)?,
            };
            report.set_dim("verdict", format!("{:?}", rep.verdict));
            if rep.verdict == geometry::NonExistenceVerdict::Inconclusive {
                report.fail("inconclusive: the generic power is not identically zero");
            }
            report.push_certificate(&rep);
            Ok(emit(&report, input.output))
        }

        Command::Selftest { seed, corpus, samples, output } => {
            let mut report = Report::new("selftest")
                .input("seed", &seed.to_string())
                .input("corpus", &corpus.display().to_string())
                .input("samples", &samples.to_string());
            let entries = suites::load_corpus_dir(&corpus)?;
            report.set_dim("corpus_files", entries.len());
            let results = suites::run_corpus_suites(&entries, seed, samples);
            let mut pass_count = 0usize;
            for r in &results {
                if r.passed {
                    pass_count += 1;
                } else {
                    report.fail(&format!("suite '{}' on {}: {}", r.suite, r.algebra, r.detail));
                }
                report.push_certificate(r);
            }
            report.set_dim("suites_passed", pass_count);
            report.set_dim("suites_total", results.len());
            Ok(emit(&report, output))
        }
    }
}

fn generate_example(family: &str, l: usize, matrix: &str, sigma: &str) -> Result<String, CoreError> {
    let mut out = String::new();
    match family {
        "class-I" => {
            let m = parse_matrix_choice(matrix, 4 * l + 1)?;
            let (a, gamma) = structure::gen_class_i(l, &m)?;
            out.push_str(&dsl::serialize_algebra(&a));
            out.push_str(&format!(
                "form gamma on {} ({},0) = {}\n",
                a.name,
                2 * l + 1,
                dsl::serialize_form_expr(&gamma)
            ));
        }
        "class-II" => {
            let (a, gamma) = structure::gen_class_ii(l)?;
            out.push_str(&dsl::serialize_algebra(&a));
            out.push_str(&format!(
                "form gamma on {} ({},0) = {}\n",
                a.name,
                2 * l + 1,
                dsl::serialize_form_expr(&gamma)
            ));
        }
        "g2-analogue" => {
            let (a, gamma) = structure::gen_g2_analogue()?;
            out.push_str(&dsl::serialize_algebra(&a));
            out.push_str(&format!(
                "form gamma on {} (3,0) = {}\n",
                a.name,
                dsl::serialize_form_expr(&gamma)
            ));
        }
        "heisenberg-c" => {
            let want = if l < 2 { 2 } else { l };
            let (a, omega) = structure::gen_heisenberg_c(want)?;
            out.push_str(&dsl::serialize_algebra(&a));
            out.push_str(&format!(
                "form omega on {} ({},0) = {}\n",
                a.name,
                2 * want,
                dsl::serialize_form_expr(&omega)
            ));
        }
        "iwasawa" => {
            let a = dsl::parse_algebra("algebra iwasawa { dim 3; d phi3 = phi1^phi2 }")?;
            out.push_str(&dsl::serialize_algebra(&a));
            out.push_str("form gamma on iwasawa (1,0) = phi3\n");
            out.push_str("vector psi1 on iwasawa = phi~1 * e2 + phi~2 * e1\n");
        }
        "torus-fibration" => {
            let base = AlgebraSpec::torus("torus-base", 4 * l);
            let omega = structure::half_volume_symplectic(&base);
            let sig = match sigma {
                "zero" => Form::zero(&base),
                "phi12" => Form::generator(&base, 1).wedge(&Form::generator(&base, 2)),
                other => {
                    return Err(CoreError::Precondition(format!(
                        "unknown sigma choice '{other}' (zero | phi12)"
                    )))
                }
            };
            let inst = structure::build_fibred_contact(&base, &omega, &sig)?;
            out.push_str(&dsl::serialize_algebra(&inst.total));
            out.push_str(&format!(
                "form gamma on {} ({},0) = {}\n",
                inst.total.name,
                2 * l + 1,
                dsl::serialize_form_expr(&inst.gamma)
            ));
            let nb = 4 * l;
            out.push_str(&format!(
                "fibration fib on {} {{ base = 1..{nb}; eta = e{}, e{}, e{}; psi3 = phi{} }}\n",
                inst.total.name,
                nb + 2,
                nb + 1,
                nb + 3,
                nb + 3
            ));
        }
        other => {
            return Err(CoreError::Precondition(format!(
                "unknown example family '{other}' (class-I, class-II, g2-analogue, \
                 heisenberg-c, iwasawa, torus-fibration)"
            )))
        }
    }
    Ok(out)
}

fn parse_matrix_choice(choice: &str, size: usize) -> Result<ClassIMatrix, CoreError> {
    match choice {
        "identity" => Ok(ClassIMatrix::Identity),
        "ones" => Ok(ClassIMatrix::Ones),
        path => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CoreError::Io(format!("matrix file {path}: {e}")))?;
            let mut rows = Vec::new();
            for line in text.lines() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let row: Result<Vec<GaussRat>, CoreError> =
                    line.split_whitespace().map(GaussRat::parse_literal).collect();
                rows.push(row?);
            }
            if rows.len() != size {
                return Err(CoreError::Precondition(format!(
                    "matrix file must have {size} rows for this l"
                )));
            }
            Ok(ClassIMatrix::Custom(rows))
        }
    }
}
