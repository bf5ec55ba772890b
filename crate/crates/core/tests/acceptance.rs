//! End-to-end acceptance checks. Runs without the libtest harness so that
//! every criterion prints one PASS/FAIL line; exits nonzero on any failure.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use asep_core::ensemble::{
    duchi_top_marginal, path_law, phi_table, push_forward_top, two_layer_law,
};
use asep_core::qcalc::{poly_eval, q_factorial, q_number};
use asep_core::rational::{int, parse_rational, pow};
use asep_core::recursions::{
    check_basic_weight_equations, check_bulk, check_left_boundary, check_right_boundary,
};
use asep_core::sampler::{empirical_compare, sample_two_layer};
use asep_core::{
    build_generator, composition_of, is_motzkin, path_of, q_weight, rates_from_params,
    stationary_exact, stationary_mu, tilde_q_weight, w_sigma_operator, w_sigma_series, Composition,
    Error, ModelParams, Occupation, Rational,
};
use num_traits::{One, Signed, Zero};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn r(s: &str) -> Rational {
    parse_rational(s).expect("literal rational")
}

fn params(q: &str, a: &str, b: &str) -> ModelParams {
    ModelParams::new(r(q), r(a), r(b)).expect("valid parameters")
}

const QS: [&str; 4] = ["0", "1/3", "1/2", "9/10"];
const ABS: [(&str, &str); 7] = [
    ("1/2", "1/3"),
    ("2", "3"),
    ("1", "1"),
    ("0", "2"),
    ("3", "0"),
    ("0", "0"),
    ("1", "2"),
];

fn grid() -> impl Iterator<Item = ModelParams> {
    QS.iter()
        .flat_map(|q| ABS.iter().map(move |(a, b)| params(q, a, b)))
}

fn describe(p: &ModelParams) -> String {
    format!("q={} A={} B={}", p.q(), p.a(), p.b())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn stationary_measure_equals_oracle() -> Outcome {
    let mut cases = 0;
    for p in grid() {
        let rates = rates_from_params(&p);
        for l in 1..=6 {
            let mu = stationary_mu(l, &p).map_err(|e| format!("{}: {e}", describe(&p)))?;
            let g = build_generator(l, &rates).map_err(|e| e.to_string())?;
            let exact = stationary_exact(&g).map_err(|e| format!("{} L={l}: {e}", describe(&p)))?;
            ensure(mu == exact, || {
                format!("mismatch at {} L={l}", describe(&p))
            })?;
            cases += 1;
        }
    }
    Ok(format!("{cases} cases"))
}

fn weight_polynomial_routes_agree() -> Outcome {
    let mut cases = 0;
    for q in ["0", "1/3", "1/2"].map(r) {
        for l in 0..=8u32 {
            for sigma in Composition::all_of(l + 1) {
                let w = w_sigma_operator(&sigma, &q);
                ensure(w == w_sigma_series(&sigma, &q), || {
                    format!("routes differ at {sigma} q={q}")
                })?;
                ensure(w.has_nonnegative_coeffs(), || {
                    format!("negative coefficient at {sigma} q={q}")
                })?;
                let bound = (l - sigma.r()) as usize;
                let deg = w.degree().unwrap_or(0);
                ensure(deg <= bound, || {
                    format!("degree {deg} > {bound} at {sigma}")
                })?;
                if !q.is_zero() {
                    ensure(deg == bound, || {
                        format!("degree {deg} != {bound} at {sigma} q={q}")
                    })?;
                }
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} compositions"))
}

fn known_weight_values() -> Outcome {
    let mut cases = 0;
    for q in ["1/3", "1/2"].map(r) {
        for l in 0..=6u32 {
            let fact = q_factorial(l + 1, &q);
            let ones = w_sigma_operator(&Composition::all_ones(l), &q);
            ensure(
                ones.degree().unwrap_or(0) == 0 && ones.coeff(0) == fact,
                || format!("all-ones weight at L={l}"),
            )?;
            for sigma in Composition::all_of(l + 1) {
                let w = w_sigma_operator(&sigma, &q);
                ensure(poly_eval(&w, &Rational::one()) == fact, || {
                    format!("w(1) at {sigma} q={q}")
                })?;
                let at_zero: Rational = sigma
                    .parts()
                    .iter()
                    .enumerate()
                    .map(|(j, &s)| pow(&q_number(j as u32 + 1, &q), s))
                    .product();
                ensure(poly_eval(&w, &Rational::zero()) == at_zero, || {
                    format!("w(0) at {sigma} q={q}")
                })?;
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} compositions"))
}

/// Grid points where every rescaling factor up to five sites is finite
/// (`AB` not of the form `q^-j`).
fn nonsingular_grid() -> impl Iterator<Item = ModelParams> {
    grid().filter(|p| p.tilde_factor(5).is_ok())
}

fn recursion_identities() -> Outcome {
    let (mut instances, mut sets) = (0, 0);
    for p in nonsingular_grid() {
        let mut reports = Vec::new();
        for l in 0..=4 {
            reports.push(check_left_boundary(l, &p));
            reports.push(check_right_boundary(l, &p));
        }
        for total in 0..=3 {
            for l1 in 0..=total {
                reports.push(check_bulk(l1, total - l1, &p));
            }
        }
        for rep in reports {
            let rep = rep.map_err(|e| format!("{}: {e}", describe(&p)))?;
            ensure(rep.passed(), || rep.to_string())?;
            instances += rep.instances;
        }
        sets += 1;
    }
    // AB = 1 at every q, and ABq = 1 at q = 1/2, A = 1, B = 2
    ensure(sets == 23, || {
        format!("expected 23 nonsingular points, found {sets}")
    })?;
    Ok(format!("{sets} parameter points, {instances} instances"))
}

fn basic_weight_equations() -> Outcome {
    let mut sets = 0;
    for p in nonsingular_grid() {
        let rep =
            check_basic_weight_equations(4, &p).map_err(|e| format!("{}: {e}", describe(&p)))?;
        ensure(rep.passed(), || rep.to_string())?;
        ensure(
            phi_table(0, &p)
                .map_err(|e| e.to_string())?
                .get(&Occupation::EMPTY)
                .is_one(),
            || "Phi(empty) != 1".into(),
        )?;
        for l in 1..=4 {
            let phi = phi_table(l, &p).map_err(|e| e.to_string())?;
            let norm = phi.normalized().map_err(|e| e.to_string())?;
            let mu = stationary_mu(l, &p).map_err(|e| e.to_string())?;
            ensure(norm == mu, || {
                format!("normalized Phi differs from mu at {} L={l}", describe(&p))
            })?;
        }
        sets += 1;
    }
    Ok(format!("{sets} parameter points"))
}

fn single_site_tables() -> Outcome {
    let points = [
        ("1/2", "1/3", "2/5"),
        ("1/3", "2", "3"),
        ("0", "1", "3"),
        ("9/10", "1/2", "1/7"),
        ("1/4", "0", "5"),
        ("2/3", "3/2", "1/3"),
    ];
    let (o, i) = (Occupation::from_sites(&[0]), Occupation::from_sites(&[1]));
    for (q, a, b) in points {
        let p = params(q, a, b);
        let (q, a, b) = (p.q().clone(), p.a().clone(), p.b().clone());
        let one = Rational::one();
        let diag = &one + &q * &a * &b;
        let expected = [
            ((o, o), diag.clone()),
            ((o, i), &a * (&one + &q)),
            ((i, o), &b * (&one + &q)),
            ((i, i), diag.clone()),
        ];
        let den = &one - &a * &b * &q * &q;
        for ((t, x), v) in expected {
            let got = q_weight(&t, &x, &p).map_err(|e| e.to_string())?;
            ensure(got == v, || {
                format!("Q({t}|{x}) = {got}, expected {v} at {}", describe(&p))
            })?;
            let tilde = tilde_q_weight(&t, &x, &p).map_err(|e| e.to_string())?;
            ensure(tilde == &v / &den, || {
                format!("Q~({t}|{x}) = {tilde} at {}", describe(&p))
            })?;
        }
    }
    Ok(format!("{} parameter points", points.len()))
}

fn special_supports() -> Outcome {
    for l in 1..=5 {
        for q in ["0", "1/3", "1/2"] {
            for (a, b) in [("0", "2"), ("3", "0"), ("0", "0")] {
                let p = params(q, a, b);
                let law = two_layer_law(l, &p).map_err(|e| e.to_string())?;
                let mut motzkin_weights = Vec::new();
                for ((t, x), pr) in law.iter() {
                    let g = path_of(t, x).map_err(|e| e.to_string())?;
                    if pr.is_positive() {
                        if p.a().is_zero() {
                            ensure(g.min() >= 0, || {
                                format!("negative path {g} at {}", describe(&p))
                            })?;
                        }
                        if p.b().is_zero() {
                            ensure(g.end() == g.min(), || {
                                format!("path {g} does not end at its minimum")
                            })?;
                        }
                    }
                    if p.a().is_zero() && p.b().is_zero() {
                        let w = if is_motzkin(&g) {
                            let sigma = composition_of(&g);
                            sigma
                                .parts()
                                .iter()
                                .enumerate()
                                .skip(1)
                                .map(|(j, &s)| pow(&q_number(j as u32 + 1, p.q()), s))
                                .product()
                        } else {
                            Rational::zero()
                        };
                        motzkin_weights.push(w);
                    }
                }
                if !motzkin_weights.is_empty() {
                    let z: Rational = motzkin_weights.iter().sum();
                    for (w, pr) in motzkin_weights.iter().zip(law.probabilities()) {
                        ensure(&(w / &z) == pr, || {
                            format!("Motzkin formula differs at L={l} q={q}")
                        })?;
                    }
                }
            }
        }
    }
    Ok("L<=5, q in {0,1/3,1/2}".into())
}

fn duchi_cross_check() -> Outcome {
    for (a, b) in [("0", "0"), ("1", "2"), ("1/2", "1/2")] {
        let p = params("0", a, b);
        for l in 1..=5 {
            let duchi = duchi_top_marginal(l, p.a(), p.b()).map_err(|e| e.to_string())?;
            let mu = stationary_mu(l, &p).map_err(|e| e.to_string())?;
            ensure(duchi == mu, || {
                format!("Duchi marginal differs at A={a} B={b} L={l}")
            })?;
        }
    }
    Ok("3 parameter points, L<=5".into())
}

fn sampler_statistics() -> Outcome {
    let p = params("1/2", "1", "2");
    let mu = stationary_mu(3, &p).map_err(|e| e.to_string())?;
    let batch = sample_two_layer(3, &p, 100_000, 20_241_015).map_err(|e| e.to_string())?;
    let report = empirical_compare(&batch, &mu).map_err(|e| e.to_string())?;
    ensure(report.within(4.0), || {
        format!("max |z| = {:.3}", report.max_abs_z)
    })?;
    for (q, a, b) in [
        ("1/2", "1", "2"),
        ("1/3", "2", "3"),
        ("0", "0", "0"),
        ("9/10", "3", "0"),
        ("1/2", "4", "1"),
    ] {
        let p = params(q, a, b);
        for l in 1..=5 {
            let pushed = push_forward_top(&path_law(l, &p).map_err(|e| e.to_string())?)
                .map_err(|e| e.to_string())?;
            ensure(
                pushed == stationary_mu(l, &p).map_err(|e| e.to_string())?,
                || format!("pushforward differs at {} L={l}", describe(&p)),
            )?;
        }
    }
    Ok(format!(
        "max |z| = {:.3}, cells beyond 3: {}",
        report.max_abs_z, report.beyond_three
    ))
}

fn large_system_timing() -> Outcome {
    let p = params("1/2", "1", "2");
    let limit = Duration::from_secs(60);
    let t = Instant::now();
    let mu = stationary_mu(10, &p).map_err(|e| e.to_string())?;
    let mu_time = t.elapsed();
    let t = Instant::now();
    let exact =
        stationary_exact(&build_generator(10, &rates_from_params(&p)).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
    let oracle_time = t.elapsed();
    ensure(mu_time < limit, || {
        format!("stationary_mu took {mu_time:.1?}")
    })?;
    ensure(oracle_time < limit, || {
        format!("oracle took {oracle_time:.1?}")
    })?;
    ensure(mu == exact, || "L=10 results differ".into())?;
    Ok(format!("mu {mu_time:.2?}, oracle {oracle_time:.2?}, equal"))
}

fn singular_parameters() -> Outcome {
    let p = params("1/2", "4", "1");
    ensure(p.ab() * pow(p.q(), 2) == int(1), || {
        "not on the singular line".into()
    })?;
    for l in 1..=4 {
        let (t, x) = (Occupation::zeros(l), Occupation::zeros(l));
        ensure(
            matches!(
                tilde_q_weight(&t, &x, &p),
                Err(Error::SingularParameter { .. })
            ),
            || format!("Q~ accepted at L={l}"),
        )?;
        ensure(
            matches!(phi_table(l, &p), Err(Error::SingularParameter { .. })),
            || format!("Phi accepted at L={l}"),
        )?;
        let mu = stationary_mu(l, &p).map_err(|e| e.to_string())?;
        let exact = stationary_exact(
            &build_generator(l, &rates_from_params(&p)).map_err(|e| e.to_string())?,
        )
        .map_err(|e| e.to_string())?;
        ensure(mu == exact, || format!("mu differs from oracle at L={l}"))?;
    }
    Ok("L=1..4".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        (
            "stationary measure equals Markov-chain oracle",
            stationary_measure_equals_oracle,
        ),
        (
            "weight polynomial: operator and series routes agree",
            weight_polynomial_routes_agree,
        ),
        ("weight polynomial known values", known_weight_values),
        ("boundary and bulk recursions", recursion_identities),
        ("basic weight equations", basic_weight_equations),
        ("single-site weight tables", single_site_tables),
        ("supports at zero boundary parameters", special_supports),
        (
            "q=0 cross-check with the Duchi-Schaeffer weights",
            duchi_cross_check,
        ),
        ("sampler statistics and pushforward", sampler_statistics),
        ("L=10 timing", large_system_timing),
        ("singular parameter handling", singular_parameters),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        match outcome {
            Ok(detail) => println!(
                "criterion {:>2} PASS  {name} [{detail}; {elapsed:.2?}]",
                i + 1
            ),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name} [{why}; {elapsed:.2?}]", i + 1);
            }
        }
    }
    if failed == 0 {
        println!("acceptance: all {} criteria passed", criteria.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of {} criteria failed", criteria.len());
        ExitCode::FAILURE
    }
}
