//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use interp_scales::approx_spaces::{lorentz_marcinkiewicz_norm, phi_type_norm};
use interp_scales::boyd::{
    boyd_indices, check_submultiplicativity, dilation, power_weights, validate_weight_sequence,
    BoydFunction, DilationGrid,
};
use interp_scales::kfunc::{interpolation_norm, k_convex, k_exact_l1_linf, k_truncation, KMethod, SequenceCouple};
use interp_scales::numeric::log_grid;
use interp_scales::operators::{approximation_numbers, DenseMatrix};
use interp_scales::sequences::DecreasingSequence;
use interp_scales::snorm::{check_sandwich, check_snorm_axioms, random_samples, SymmetricNormingFunction};
use interp_scales::verify::{
    sample_sequences, verify_convexified_reiteration, verify_embeddings, verify_lm_reiteration, verify_lp_couple,
    DecayProfile, EquivalenceReport, SampleSpec, VerifyOptions,
};
use interp_scales::Error;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

/// Samples of length `n` mixing geometric and polynomial decay.
fn batch(seed: u64, count: usize, n: usize) -> Vec<DecreasingSequence> {
    sample_sequences(&SampleSpec::new(seed, count, n, DecayProfile::Mixed).unwrap()).unwrap()
}

fn exact_identity() -> Outcome {
    let start = Instant::now();
    let samples = batch(1, 1000, 256);
    let mut worst: f64 = 0.0;
    for a in [0.25, 0.5, 0.75] {
        let alpha = power_weights(a, 256).unwrap();
        for p in [1.0, 2.0, 4.0] {
            let snf = SymmetricNormingFunction::convexified(alpha.clone(), p).unwrap();
            let phi = BoydFunction::phi_alpha_p(alpha.clone(), p).unwrap();
            for x in &samples {
                let lhs = phi_type_norm(x, &snf).unwrap();
                let rhs = lorentz_marcinkiewicz_norm(x, &phi, p).unwrap();
                worst = worst.max((lhs - rhs).abs() / lhs);
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        worst <= 1e-12 && elapsed < Duration::from_secs(10),
        format!("max relative error {worst:.2e} over 9000 evaluations in {:.2}s", elapsed.as_secs_f64()),
    )
}

fn k_oracle() -> Outcome {
    let start = Instant::now();
    let couple = SequenceCouple::l1_linf();
    let ts = log_grid(2f64.powi(-10), 2f64.powi(10), 20);
    let mut worst: f64 = 0.0;
    let mut errors = 0;
    for x in batch(2, 200, 64) {
        for &t in &ts {
            let exact = k_exact_l1_linf(t, &x).unwrap();
            match k_convex(t, &x, &couple) {
                Ok(k) => worst = worst.max((exact - k).abs() / exact.max(k)),
                Err(_) => errors += 1,
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        worst <= 1e-8 && errors == 0 && elapsed < Duration::from_secs(60),
        format!("max relative gap {worst:.2e}, solver failures {errors}, {:.1}s", elapsed.as_secs_f64()),
    )
}

fn truncation_calibration() -> Outcome {
    let ts = log_grid(2f64.powi(-8), 2f64.powi(8), 16);
    let samples = batch(3, 100, 64);
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, couple) in [
        ("(l1,linf)", SequenceCouple::l1_linf()),
        ("(l1,l2)", SequenceCouple::lp(1.0, 2.0).unwrap()),
        ("(l2,l4)", SequenceCouple::lp(2.0, 4.0).unwrap()),
    ] {
        let (mut lo, mut hi) = (f64::INFINITY, 0.0_f64);
        for x in &samples {
            for &t in &ts {
                let r = k_truncation(t, x, &couple).unwrap() / k_convex(t, x, &couple).unwrap();
                lo = lo.min(r);
                hi = hi.max(r);
            }
        }
        pass &= lo >= 1.0 && hi <= 4.0;
        parts.push(format!("{name} C_emp = {hi:.4} (min ratio {lo:.6})"));
    }
    outcome(pass, parts.join(", "))
}

fn closed_form_quadrature() -> Outcome {
    let e1 = DecreasingSequence::unit(16);
    let couple = SequenceCouple::l1_linf();
    let mut worst: f64 = 0.0;
    for theta in [0.25f64, 0.5, 0.75] {
        for q in [1.0f64, 2.0] {
            let expected = (1.0 / ((1.0 - theta) * q) + 1.0 / (theta * q)).powf(1.0 / q);
            let got = interpolation_norm(&e1, &couple, &BoydFunction::power(theta), q, KMethod::Truncation)
                .unwrap()
                .value;
            worst = worst.max((got / expected - 1.0).abs());
        }
    }
    outcome(worst <= 1e-6, format!("max relative error {worst:.2e} over 6 (θ, q) pairs"))
}

fn opts_128() -> VerifyOptions {
    VerifyOptions {
        n2: Some(256),
        ..VerifyOptions::default()
    }
}

fn spec_128(seed: u64) -> SampleSpec {
    SampleSpec::new(seed, 100, 128, DecayProfile::Mixed).unwrap()
}

fn summarize(label: &str, r: &EquivalenceReport) -> String {
    format!(
        "{label}: spread {:.3}/{:.3} ({:+.1}%), drift {:+.2}",
        r.spread,
        r.spread_n2,
        100.0 * r.spread_change,
        r.drift_correlation_n2
    )
}

fn equivalence_pass(r: &EquivalenceReport) -> bool {
    r.spread <= 16.0 && r.spread_n2 <= 16.0 && r.spread_change.abs() <= 0.2 && r.failures.is_empty()
}

fn lp_couples() -> Outcome {
    let start = Instant::now();
    let mut pass = true;
    let mut parts = Vec::new();
    for (p0, p1, theta) in [(1.0, f64::INFINITY, 0.5), (1.0, 2.0, 0.75), (2.0, 4.0, 0.375)] {
        for q in [1.0, 2.0] {
            let r = verify_lp_couple(&BoydFunction::power(theta), p0, p1, q, &spec_128(5), &opts_128()).unwrap();
            pass &= equivalence_pass(&r);
            parts.push(summarize(&format!("({p0},{p1}) q={q}"), &r));
        }
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(300);
    parts.push(format!("{:.1}s", elapsed.as_secs_f64()));
    outcome(pass, parts.join("; "))
}

fn lm_reiteration() -> Outcome {
    let chi = BoydFunction::power(0.5);
    let power = verify_lm_reiteration(
        &chi,
        &BoydFunction::power(0.6),
        &BoydFunction::power(0.2),
        2.0,
        2.0,
        2.0,
        &spec_128(6),
        &opts_128(),
    )
    .unwrap();
    let phi0 = BoydFunction::phi_alpha_p(power_weights(0.5, 1024).unwrap(), 2.0).unwrap();
    let non_power =
        verify_lm_reiteration(&chi, &phi0, &BoydFunction::power(0.1), 2.0, 2.0, 2.0, &spec_128(6), &opts_128())
            .unwrap();
    outcome(
        equivalence_pass(&power) && equivalence_pass(&non_power),
        format!("{}; {}", summarize("power case", &power), summarize("weighted φ0", &non_power)),
    )
}

fn convexified_reiteration() -> Outcome {
    let alpha = power_weights(0.5, 1024).unwrap();
    let beta = power_weights(0.75, 1024).unwrap();
    let a = verify_convexified_reiteration(&alpha, &beta, 2.0, 2.0, 2.0, &spec_128(7), &opts_128()).unwrap();
    let b = verify_convexified_reiteration(&alpha, &beta, 1.0, 2.0, 2.0, &spec_128(7), &opts_128()).unwrap();
    let harmonic = power_weights(1.0, 1024).unwrap();
    let rejected = matches!(
        verify_convexified_reiteration(&harmonic, &harmonic, 2.0, 2.0, 2.0, &spec_128(7), &opts_128()),
        Err(Error::InvalidParameter(_))
    );
    outcome(
        equivalence_pass(&a) && equivalence_pass(&b) && rejected,
        format!(
            "{}; {}; harmonic weights rejected: {rejected}",
            summarize("p=q=2", &a),
            summarize("p=1,q=2", &b)
        ),
    )
}

fn embeddings() -> Outcome {
    let r = verify_embeddings(&SequenceCouple::l1_linf(), &BoydFunction::power(0.5), 2.0, &spec_128(8), &opts_128())
        .unwrap();
    outcome(
        r.pass,
        format!(
            "Σ/interp max {:.4} -> {:.4}, interp/Δ max {:.4} -> {:.4}",
            r.sum_ratio_max, r.sum_ratio_max_n2, r.intersection_ratio_max, r.intersection_ratio_max_n2
        ),
    )
}

fn boyd_machinery() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    let grid = DilationGrid::default();
    let ss = log_grid(grid.lo, grid.hi, grid.points);
    for theta in [-0.5f64, 0.3, 0.99] {
        let idx = boyd_indices(&BoydFunction::power(theta)).unwrap();
        // independent: grid supremum of (ts)^θ / s^θ at t = 2^{±20}
        let probe = |t: f64| ss.iter().map(|s| (t * s).powf(theta) / s.powf(theta)).fold(0.0, f64::max).ln() / t.ln();
        let err = [idx.upper - theta, idx.lower - theta, probe(2f64.powi(20)) - theta, probe(2f64.powi(-20)) - theta]
            .iter()
            .fold(0.0_f64, |m, e| m.max(e.abs()));
        pass &= err <= 1e-6;
        parts.push(format!("θ={theta} index error {err:.1e}"));
    }
    let phi_alpha = BoydFunction::phi_alpha_p(power_weights(0.5, 1024).unwrap(), 2.0).unwrap();
    for (name, f) in [
        ("power", BoydFunction::power(0.4)),
        ("phialphap", phi_alpha.clone()),
        ("quotient", BoydFunction::quotient(phi_alpha.clone(), BoydFunction::power(0.1))),
    ] {
        let c = check_submultiplicativity(&f, 50, &grid).unwrap();
        pass &= c.passed;
        parts.push(format!("submultiplicative {name}: {}", c.passed));
    }
    let alpha = power_weights(0.5, 4096).unwrap();
    let validated = validate_weight_sequence(&alpha, &[1.5, 2.0, 4.0]).unwrap().passed;
    let mut finite = validated;
    for p in [1.0, 2.0, 4.0] {
        let f = BoydFunction::phi_alpha_p(alpha.clone(), p).unwrap();
        for t in log_grid(1e-4, 1e4, 33) {
            finite &= dilation(&f, t).map(|d| d.value.is_finite()).unwrap_or(false);
        }
    }
    pass &= finite;
    parts.push(format!("φ_(α,p) dilation finite: {finite}"));
    outcome(pass, parts.join(", "))
}

fn norming_axioms() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    let mut functions = vec![
        ("Φ1".to_string(), SymmetricNormingFunction::ExtremalOne),
        ("Φ∞".to_string(), SymmetricNormingFunction::ExtremalInfinity),
    ];
    for a in [0.25, 0.5, 0.9] {
        functions.push((format!("Φ^ε a={a}"), SymmetricNormingFunction::weighted(power_weights(a, 64).unwrap())));
    }
    let samples = random_samples(1000, 64, 10);
    for (name, f) in &functions {
        let axioms = check_snorm_axioms(f, 1000, 11).unwrap();
        let sandwich = check_sandwich(f, &samples).unwrap();
        pass &= axioms.passed && sandwich.passed;
        if !(axioms.passed && sandwich.passed) {
            parts.push(format!("{name} failed"));
        }
    }
    let ratio = |n: usize| {
        let ones = DecreasingSequence::new(vec![1.0; n]).unwrap();
        let eps = SymmetricNormingFunction::weighted(power_weights(0.5, n).unwrap());
        SymmetricNormingFunction::ExtremalOne.apply_decreasing(&ones).unwrap() / eps.apply_decreasing(&ones).unwrap()
    };
    let growth = ratio(4096) / ratio(16);
    pass &= growth >= 4.0 && ratio(256) > ratio(16);
    parts.push(format!("5 functions × 1000 samples, Φ1/Φ^ε growth 16 -> 4096: {growth:.2}×"));
    outcome(pass, parts.join(", "))
}

fn random_orthogonal(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    g.qr().q()
}

fn to_dense(m: &DMatrix<f64>) -> DenseMatrix {
    let rows: Vec<Vec<f64>> = (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect();
    DenseMatrix::from_rows(&rows).unwrap()
}

fn svd() -> Outcome {
    let d = approximation_numbers(&DenseMatrix::diagonal(&[3.0, 1.0, 2.0]).unwrap()).unwrap();
    let p = approximation_numbers(&DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap()).unwrap();
    let exact = d.values() == [3.0, 2.0, 1.0] && p.values() == [1.0, 1.0];

    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut worst_2x2: f64 = 0.0;
    for _ in 0..100 {
        let (a, b, c, e) = (
            rng.random_range(-5.0..5.0),
            rng.random_range(-5.0..5.0),
            rng.random_range(-5.0..5.0),
            rng.random_range(-5.0..5.0),
        );
        let s = approximation_numbers(&DenseMatrix::from_rows(&[vec![a, b], vec![c, e]]).unwrap()).unwrap();
        // eigenvalues of TᵀT from its trace and determinant
        let tr = a * a + b * b + c * c + e * e;
        let det = (a * e - b * c).powi(2);
        let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
        let s1 = (tr / 2.0 + disc).sqrt();
        let s2 = ((a * e - b * c).abs()) / s1;
        worst_2x2 = worst_2x2.max(((s.get(1) - s1).abs() + (s.get(2) - s2).abs()) / s1);
    }

    let mut worst_inv: f64 = 0.0;
    for _ in 0..100 {
        let t = DMatrix::from_fn(8, 8, |_, _| rng.random_range(-1.0..1.0));
        let (u, v) = (random_orthogonal(&mut rng, 8), random_orthogonal(&mut rng, 8));
        let a = approximation_numbers(&to_dense(&t)).unwrap();
        let b = approximation_numbers(&to_dense(&(&u * &t * &v))).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            worst_inv = worst_inv.max((x - y).abs() / a.first());
        }
    }
    outcome(
        exact && worst_2x2 <= 1e-8 && worst_inv <= 1e-8,
        format!("diag/permutation exact: {exact}, 2×2 max error {worst_2x2:.1e}, orthogonal invariance {worst_inv:.1e}"),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let _ = env_logger::builder().is_test(true).try_init();
    let criteria: [Criterion; 11] = [
        ("exact norm identity", exact_identity),
        ("K oracle agreement", k_oracle),
        ("truncation-K calibration", truncation_calibration),
        ("closed-form quadrature", closed_form_quadrature),
        ("l_p couple reiteration", lp_couples),
        ("Lorentz-Marcinkiewicz reiteration", lm_reiteration),
        ("convexified reiteration", convexified_reiteration),
        ("embeddings", embeddings),
        ("Boyd machinery", boyd_machinery),
        ("symmetric norming axioms", norming_axioms),
        ("approximation numbers", svd),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let id = i + 1;
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str()) || *f == id.to_string()) {
            continue;
        }
        let o = run();
        println!("criterion {id:>2} {:<4} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
