//! `neckcert`: command-line front end for the verification toolkit.
//!
//! Exit codes: 0 — all checks pass; 1 — a mathematical check failed
//! (counterexample or unverified certificate); 2 — invalid input or I/O
//! failure. Reports go to stdout (or `--out`); identical invocations with
//! the same flags and seed produce byte-identical output.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use neckcert_core::decay;
use neckcert_core::gram;
use neckcert_core::jets;
use neckcert_core::modes;
use neckcert_core::operator_poly;
use neckcert_core::sphere;
use neckcert_core::three_circle;
use neckcert_core::Error as CoreError;

#[derive(Parser)]
#[command(name = "neckcert", version, about = "Certificates for polyharmonic neck analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Operator polynomial coefficients and structure checks.
    Poly {
        #[arg(long)]
        m: u32,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Killing-field reproduction and decomposition residuals at random points.
    Sphere {
        #[arg(long)]
        m: u32,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Mode spectrum, indicial-root annihilation, and optional field energies.
    Modes {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        n: u32,
        /// Mode-expansion JSON; when given, annulus energies are reported.
        #[arg(long)]
        field: Option<PathBuf>,
        /// Annulus width used for the energies.
        #[arg(long = "L", default_value_t = 1.0)]
        big_l: f64,
        /// Number of annuli F_1..F_levels to evaluate.
        #[arg(long, default_value_t = 3)]
        levels: u32,
    },
    /// Three-circle PSD certificates: per-mode minimal L sweep, or a fixed-L check.
    ThreeCircle {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        n_max: u32,
        /// Certify every mode at this fixed L instead of sweeping min_L.
        #[arg(long = "L")]
        big_l: Option<f64>,
        /// Bisection tolerance for the min_L sweep.
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        /// Also run this many random multi-mode field checks.
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Weak-orthogonality certificates for the growing-exponential Gram matrices.
    Gram {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        n_max: u32,
        #[arg(long = "L")]
        big_l: f64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Exact jet-algebra identities, including the radial Pohozaev form.
    Jets {
        #[arg(long)]
        n_max: u32,
        #[arg(long)]
        m_max: u32,
    },
    /// Discrete decay certificates.
    Decay {
        #[command(subcommand)]
        action: DecayAction,
    },
}

#[derive(Subcommand)]
enum DecayAction {
    /// Check and certify an instance from a JSON file.
    Check {
        #[arg(long)]
        file: PathBuf,
    },
    /// Generate admissible instances and certify each.
    Fuzz {
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        c1: f64,
        #[arg(long, default_value_t = 1.0)]
        c2: f64,
        #[arg(long, default_value_t = 0.5)]
        sigma: f64,
        #[arg(long, default_value_t = 64)]
        n0: usize,
    },
}

/// 0 = pass, 1 = a check failed.
struct Outcome {
    report: String,
    pass: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli.command) {
        Ok(outcome) => {
            if let Err(e) = emit(&cli.out, &outcome.report) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if outcome.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn emit(out: &Option<PathBuf>, report: &str) -> std::io::Result<()> {
    match out {
        Some(path) => fs::write(path, report),
        None => {
            println!("{report}");
            Ok(())
        }
    }
}

fn json<T: Serialize>(value: &T) -> Result<String, CoreError> {
    serde_json::to_string_pretty(value)
        .map_err(|e| CoreError::InvalidParameter(format!("serialization failed: {e}")))
}

fn dispatch(cmd: &Command) -> Result<Outcome, CoreError> {
    match cmd {
        Command::Poly { m, format } => run_poly(*m, *format),
        Command::Sphere { m, trials, seed } => run_sphere(*m, *trials, *seed),
        Command::Modes {
            m,
            n,
            field,
            big_l,
            levels,
        } => run_modes(*m, *n, field.as_deref(), *big_l, *levels),
        Command::ThreeCircle {
            m,
            n_max,
            big_l,
            tol,
            trials,
            seed,
            format,
        } => run_three_circle(*m, *n_max, *big_l, *tol, *trials, *seed, *format),
        Command::Gram {
            m,
            n_max,
            big_l,
            format,
        } => run_gram(*m, *n_max, *big_l, *format),
        Command::Jets { n_max, m_max } => run_jets(*n_max, *m_max),
        Command::Decay { action } => match action {
            DecayAction::Check { file } => run_decay_check(file),
            DecayAction::Fuzz {
                trials,
                seed,
                c1,
                c2,
                sigma,
                n0,
            } => run_decay_fuzz(*trials, *seed, *c1, *c2, *sigma, *n0),
        },
    }
}

#[derive(Serialize)]
struct PolyCoeff {
    p: u32,
    q: u32,
    a: String,
}

#[derive(Serialize)]
struct PolyChecks {
    no_odd_p: bool,
    signs: bool,
    factorization: bool,
}

#[derive(Serialize)]
struct PolyReport {
    m: u32,
    coeffs: Vec<PolyCoeff>,
    checks: PolyChecks,
}

fn run_poly(m: u32, format: Format) -> Result<Outcome, CoreError> {
    let poly = operator_poly::build_operator_polynomial(m)?;
    let structure = operator_poly::verify_structure(&poly);
    let coeffs: Vec<PolyCoeff> = poly
        .coeffs()
        .iter()
        .map(|(&(p, q), a)| PolyCoeff {
            p,
            q,
            a: a.to_string(),
        })
        .collect();
    let report = PolyReport {
        m,
        coeffs,
        checks: PolyChecks {
            no_odd_p: structure.no_odd_p,
            signs: structure.signs,
            factorization: structure.factorization,
        },
    };
    let text = match format {
        Format::Json => json(&report)?,
        Format::Csv => {
            let mut s = String::from("m,p,q,a\n");
            for c in &report.coeffs {
                s.push_str(&format!("{m},{},{},{}\n", c.p, c.q, c.a));
            }
            s.pop();
            s
        }
    };
    Ok(Outcome {
        report: text,
        pass: structure.all_pass(),
    })
}

#[derive(Serialize)]
struct SphereReport {
    m: u32,
    trials: u64,
    seed: u64,
    generators: usize,
    max_reproduction_residual: f64,
    max_decomposition_residual: f64,
    max_outer_identity_residual: f64,
    pass: bool,
}

fn run_sphere(m: u32, trials: u64, seed: u64) -> Result<Outcome, CoreError> {
    let basis = sphere::build_killing_basis(m)?;
    let dim = 2 * m as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = |rng: &mut ChaCha8Rng| -> f64 {
        let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
        let u2: f64 = rng.random();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    };
    let mut max_rep = 0.0f64;
    let mut max_dec = 0.0f64;
    let mut max_outer = 0.0f64;
    for _ in 0..trials {
        let mut x: Vec<f64> = (0..dim).map(|_| normal(&mut rng)).collect();
        let r: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r < 1e-6 {
            continue;
        }
        let radius: f64 = rng.random_range(0.5..2.0);
        for xi in &mut x {
            *xi *= radius / r;
        }
        let v: Vec<f64> = (0..dim).map(|_| normal(&mut rng)).collect();
        // tangential part of v at x
        let xv: f64 = x.iter().zip(&v).map(|(a, b)| a * b).sum();
        let r2 = radius * radius;
        let vt: Vec<f64> = v.iter().zip(&x).map(|(vi, xi)| vi - xv * xi / r2).collect();
        let rep = sphere::tangential_reproduce(&basis, &x, &vt)?;
        for i in 0..dim {
            max_rep = max_rep.max((rep[i] - vt[i]).abs());
        }
        let (radial, coeffs) = sphere::decompose_vector(&basis, &x, &v)?;
        let rec = sphere::reconstruct(&basis, &x, radial, &coeffs);
        for i in 0..dim {
            max_dec = max_dec.max((rec[i] - v[i]).abs());
        }
        max_outer = max_outer.max(sphere::outer_identity_residual(&basis, &x));
    }
    let pass = max_rep < 1e-10 && max_dec < 1e-10 && max_outer < 1e-10;
    let report = SphereReport {
        m,
        trials,
        seed,
        generators: basis.len(),
        max_reproduction_residual: max_rep,
        max_decomposition_residual: max_dec,
        max_outer_identity_residual: max_outer,
        pass,
    };
    Ok(Outcome {
        report: json(&report)?,
        pass,
    })
}

#[derive(Serialize)]
struct ModesReport {
    m: u32,
    n: u32,
    mu: i64,
    multiplicity: u64,
    exponents: Vec<i64>,
    annihilation: modes::AnnihilationReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    energies: Option<EnergyReport>,
}

#[derive(Serialize)]
struct EnergyReport {
    #[serde(rename = "L")]
    big_l: f64,
    zero_average: bool,
    /// `F_i` for `i = 1..=levels`.
    #[serde(rename = "F")]
    f: Vec<f64>,
}

fn run_modes(
    m: u32,
    n: u32,
    field: Option<&std::path::Path>,
    big_l: f64,
    levels: u32,
) -> Result<Outcome, CoreError> {
    let spec = modes::mode_spectrum(m, n)?;
    let annihilation = modes::verify_mode_annihilation(m, n)?;
    let pass = annihilation.pass;
    let energies = match field {
        None => None,
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CoreError::InvalidParameter(format!("cannot read field file: {e}")))?;
            let field: modes::AnnulusField = serde_json::from_str(&text)
                .map_err(|e| CoreError::InvalidParameter(format!("bad field JSON: {e}")))?;
            field.validate()?;
            let f = (1..=levels)
                .map(|i| modes::annulus_energy(&field, i, big_l))
                .collect::<Result<Vec<_>, _>>()?;
            Some(EnergyReport {
                big_l,
                zero_average: field.zero_average(),
                f,
            })
        }
    };
    let report = ModesReport {
        m,
        n,
        mu: spec.mu,
        multiplicity: spec.multiplicity,
        exponents: spec.exponents,
        annihilation,
        energies,
    };
    Ok(Outcome {
        report: json(&report)?,
        pass,
    })
}

#[derive(Serialize)]
struct ThreeCircleFixedReport {
    m: u32,
    #[serde(rename = "L")]
    big_l: f64,
    n_max: u32,
    certificates: Vec<three_circle::ThreeCircleCertificate>,
    all_certified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    random_fields: Option<three_circle::RandomFieldReport>,
}

#[derive(Serialize)]
struct ThreeCircleSweepReport {
    #[serde(flatten)]
    sweep: three_circle::UniformLReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    random_fields: Option<three_circle::RandomFieldReport>,
}

fn run_three_circle(
    m: u32,
    n_max: u32,
    big_l: Option<f64>,
    tol: f64,
    trials: Option<u64>,
    seed: u64,
    format: Format,
) -> Result<Outcome, CoreError> {
    let _ = tol; // sweep tolerance is fixed inside the report builder
    match big_l {
        Some(l) => {
            let certificates = (1..=n_max)
                .map(|n| three_circle::three_circle_certificate(m, n, l))
                .collect::<Result<Vec<_>, _>>()?;
            let all_certified = certificates.iter().all(|c| c.certified);
            let random_fields = trials
                .map(|t| three_circle::random_field_check(m, l, t, seed, n_max.max(1)))
                .transpose()?;
            let pass = all_certified && random_fields.as_ref().is_none_or(|r| r.pass);
            let report = ThreeCircleFixedReport {
                m,
                big_l: l,
                n_max,
                certificates,
                all_certified,
                random_fields,
            };
            let text = match format {
                Format::Json => json(&report)?,
                Format::Csv => {
                    let mut s = String::from("m,n,L,margin,certified\n");
                    for c in &report.certificates {
                        s.push_str(&format!(
                            "{m},{},{},{},{}\n",
                            c.n, c.big_l, c.margin, c.certified
                        ));
                    }
                    s.pop();
                    s
                }
            };
            Ok(Outcome { report: text, pass })
        }
        None => {
            let sweep = three_circle::uniform_l_report(m, n_max)?;
            let random_fields = trials
                .map(|t| three_circle::random_field_check(m, sweep.l_star, t, seed, n_max.max(1)))
                .transpose()?;
            let pass = sweep.all_certified && random_fields.as_ref().is_none_or(|r| r.pass);
            let text = match format {
                Format::Json => json(&ThreeCircleSweepReport {
                    sweep,
                    random_fields,
                })?,
                Format::Csv => {
                    let mut s = String::from("m,n,min_L,margin_at_Lstar\n");
                    for row in &sweep.rows {
                        s.push_str(&format!(
                            "{m},{},{},{}\n",
                            row.n, row.min_l, row.margin_at_l_star
                        ));
                    }
                    s.pop();
                    s
                }
            };
            Ok(Outcome { report: text, pass })
        }
    }
}

#[derive(Serialize)]
struct GramReport {
    m: u32,
    #[serde(rename = "L")]
    big_l: f64,
    n_max: u32,
    certificates: Vec<gram::WeakOrthogonalityCertificate>,
    c_tilde_emp: f64,
    all_valid: bool,
}

fn run_gram(m: u32, n_max: u32, big_l: f64, format: Format) -> Result<Outcome, CoreError> {
    let certificates = (1..=n_max)
        .map(|n| gram::weak_orthogonality_certificate(m, n, big_l))
        .collect::<Result<Vec<_>, _>>()?;
    let all_valid = certificates.iter().all(|c| c.valid);
    let c_tilde_emp = gram::empirical_c_tilde(&certificates);
    let text = match format {
        Format::Json => json(&GramReport {
            m,
            big_l,
            n_max,
            certificates: certificates.clone(),
            c_tilde_emp,
            all_valid,
        })?,
        Format::Csv => {
            let mut s = String::from("m,n,L,lambda1,lambda1bar,lambdaE_bound,det_exact,delta\n");
            for c in &certificates {
                s.push_str(&format!(
                    "{m},{},{},{},{},{},{},{}\n",
                    c.n, c.big_l, c.lambda1, c.lambda1_bar, c.lambda_e_bound, c.cauchy_det, c.delta
                ));
            }
            s.pop();
            s
        }
    };
    Ok(Outcome {
        report: text,
        pass: all_valid,
    })
}

#[derive(Serialize)]
struct JetsReport {
    n_max: u32,
    m_max: u32,
    identity_one: bool,
    identity_two: bool,
    radial_pohozaev: bool,
    failures: Vec<String>,
}

fn run_jets(n_max: u32, m_max: u32) -> Result<Outcome, CoreError> {
    if n_max < 1 || m_max < 1 {
        return Err(CoreError::InvalidParameter(
            "n_max and m_max must be at least 1".into(),
        ));
    }
    let mut failures = Vec::new();
    let mut identity_one = true;
    for n in 1..=n_max {
        if !jets::verify_identity_one(n)? {
            identity_one = false;
            failures.push(format!("identity_one fails at n={n}"));
        }
    }
    let mut identity_two = true;
    for n in 2..=n_max.max(2) {
        for k in 1..n {
            if !jets::verify_identity_two(n, k)? {
                identity_two = false;
                failures.push(format!("identity_two fails at n={n}, k={k}"));
            }
        }
    }
    let mut radial_pohozaev = true;
    for m in 1..=m_max {
        if !jets::verify_radial_pohozaev(m)? {
            radial_pohozaev = false;
            failures.push(format!("radial_pohozaev fails at m={m}"));
        }
    }
    let pass = identity_one && identity_two && radial_pohozaev;
    let report = JetsReport {
        n_max,
        m_max,
        identity_one,
        identity_two,
        radial_pohozaev,
        failures,
    };
    Ok(Outcome {
        report: json(&report)?,
        pass,
    })
}

#[derive(Serialize)]
struct DecayCheckReport {
    hypotheses: decay::HypothesesReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate: Option<decay::DecayCertificate>,
}

fn run_decay_check(file: &PathBuf) -> Result<Outcome, CoreError> {
    let text = fs::read_to_string(file)
        .map_err(|e| CoreError::InvalidParameter(format!("cannot read instance file: {e}")))?;
    let problem: decay::DecayProblem = serde_json::from_str(&text)
        .map_err(|e| CoreError::InvalidParameter(format!("bad instance JSON: {e}")))?;
    let hypotheses = decay::check_hypotheses(&problem)?;
    if !hypotheses.pass() {
        let report = DecayCheckReport {
            hypotheses,
            certificate: None,
        };
        return Ok(Outcome {
            report: json(&report)?,
            pass: false,
        });
    }
    let certificate = decay::certify_decay(&problem)?;
    let pass = certificate.verified;
    let report = DecayCheckReport {
        hypotheses,
        certificate: Some(certificate),
    };
    Ok(Outcome {
        report: json(&report)?,
        pass,
    })
}

#[derive(Serialize)]
struct DecayFuzzReport {
    trials: u64,
    seed: u64,
    #[serde(rename = "C1")]
    c1: f64,
    #[serde(rename = "C2")]
    c2: f64,
    sigma: f64,
    n0: usize,
    sigma_tilde: f64,
    max_c_prime: f64,
    all_verified: bool,
}

fn run_decay_fuzz(
    trials: u64,
    seed: u64,
    c1: f64,
    c2: f64,
    sigma: f64,
    n0: usize,
) -> Result<Outcome, CoreError> {
    let mut all_verified = true;
    let mut max_c_prime = 0.0f64;
    let mut sigma_tilde = 0.0;
    for t in 0..trials {
        let instance = decay::generate_admissible(n0, c1, c2, sigma, 1.0, seed.wrapping_add(t))?;
        let cert = decay::certify_decay(&instance)?;
        all_verified &= cert.verified;
        max_c_prime = max_c_prime.max(cert.c_prime);
        sigma_tilde = cert.sigma_tilde;
    }
    let report = DecayFuzzReport {
        trials,
        seed,
        c1,
        c2,
        sigma,
        n0,
        sigma_tilde,
        max_c_prime,
        all_verified,
    };
    Ok(Outcome {
        report: json(&report)?,
        pass: all_verified,
    })
}
