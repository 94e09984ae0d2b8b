use nalgebra::DMatrix;
use quatode::io::problem_from_parts;
use quatode::oracle::{integrate, stack, unstack, IntegratorConfig};
use quatode::solver::{companion_real, solve, specialize, ClosedFormSolution};
use quatode::{Error, LinearityClass, Quaternion};

const I: Quaternion = Quaternion::I;
const J: Quaternion = Quaternion::J;
const K: Quaternion = Quaternion::K;
const ONE: Quaternion = Quaternion::ONE;

fn solve_eq(eq: &str, initial: Vec<Quaternion>) -> ClosedFormSolution {
    solve(&problem_from_parts(eq, 0.0, initial).unwrap()).unwrap()
}

fn pair_vector(cos: Quaternion, sin: Quaternion) -> Vec<f64> {
    cos.to_array().into_iter().chain(sin.to_array()).collect()
}

fn rank(rows: &[Vec<f64>]) -> usize {
    let m = DMatrix::from_fn(rows.len(), 8, |r, c| rows[r][c]);
    m.svd(false, false).singular_values.iter().filter(|s| **s > 1e-9).count()
}

#[test]
fn rotating_mode_spans_two_documented_solutions() {
    // For z = 1 + i the cos/sin coefficient pairs must span exactly
    // (j cos x − i sin x)e^x and (i cos x + j sin x)e^x.
    let sol = solve_eq("D^2 - (L_i*R_i + L_j*R_j)*D + R_k - L_k", vec![J, K]);
    let found: Vec<Vec<f64>> = sol
        .terms
        .iter()
        .filter(|t| (t.a - 1.0).abs() < 1e-9 && (t.b - 1.0).abs() < 1e-9)
        .map(|t| pair_vector(t.coeff_cos, t.coeff_sin))
        .collect();
    let documented = vec![pair_vector(J, I), pair_vector(I, -J)];
    assert_eq!(rank(&found), 2);
    let mut all = found.clone();
    all.extend(documented);
    assert_eq!(rank(&all), 2);
}

#[test]
fn rotating_system_against_oracle_at_one() {
    let sol = solve_eq("D^2 - L_j*R_i", vec![J, K]);
    let y = integrate(&sol.matrix, &stack(&[J, K]), 0.0, 1.0, &IntegratorConfig::default()).unwrap();
    let e = Quaternion::complex(1f64.cos(), -1f64.sin());
    let reference = ((J - I) * 1f64.cosh() + (K - ONE) * 1f64.sinh() + (I + J) * e) * 0.5;
    assert!(unstack(&y)[0].max_abs_diff(reference) < 1e-8);
    assert!(sol.evaluate(1.0).max_abs_diff(reference) < 1e-12);
}

#[test]
fn oracle_converges_at_fourth_order() {
    let sol = solve_eq("D^2 - L_i*R_j*D - L_j*R_i", vec![J, K]);
    let m = companion_real(&sol.problem);
    let y0 = stack(&sol.problem.initial);
    let exact = sol.state(1.0).unwrap();
    let err = |h| {
        let y = integrate(&m, &y0, 0.0, 1.0, &IntegratorConfig::with_step(h).unwrap()).unwrap();
        (y - &exact).amax()
    };
    let ratio = err(1e-2) / err(5e-3);
    assert!((ratio - 16.0).abs() < 1.5, "ratio {ratio}");
}

#[test]
fn nilpotent_part_gives_linear_growth() {
    let sol = solve_eq("D^2 - (L_i*R_j + L_j*R_i)", vec![J, K]);
    assert!(sol.terms.iter().any(|t| t.k == 1 && t.a.abs() < 1e-12 && t.b == 0.0));
    assert!(sol.terms.iter().all(|t| t.k <= 1));
    let jd = &sol.jordan;
    assert!((&jd.n * &jd.n).amax() == 0.0);
}

#[test]
fn complex_form_of_rotating_system() {
    let sol = solve_eq("D^2 - L_j*R_i", vec![J, K]);
    let sp = specialize(&sol, LinearityClass::CLinear).unwrap();
    // Exponents ±1 and ±i, each carried by one complex constant.
    let mut exps: Vec<(f64, f64)> = sp.terms.iter().map(|t| (t.exponent.q0, t.exponent.q1)).collect();
    exps.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let expected = [(-1.0, 0.0), (0.0, -1.0), (0.0, 1.0), (1.0, 0.0)];
    for (e, x) in exps.iter().zip(expected) {
        assert!((e.0 - x.0).abs() < 1e-12 && (e.1 - x.1).abs() < 1e-12, "{exps:?}");
    }
    // Coefficients are real multiples of k − 1 (real exponents) and 1 + k
    // (imaginary exponents).
    for t in &sp.terms {
        let basis = if t.exponent.q1 == 0.0 { K - ONE } else { ONE + K };
        let c = t.coeff.dot(basis) / basis.norm_sqr();
        assert!(t.coeff.max_abs_diff(basis * c) < 1e-12, "{:?}", t.coeff);
    }
    assert!(matches!(specialize(&solve_eq("D^2 - L_i*R_j*D - L_j*R_i", vec![J, K]), LinearityClass::CLinear), Err(Error::Domain(_))));
}

#[test]
fn shifted_initial_point() {
    let p = problem_from_parts("D^2 - L_i*R_j*D - L_j*R_i", 1.5, vec![J, K]).unwrap();
    let shifted = solve(&p).unwrap();
    let base = solve_eq("D^2 - L_i*R_j*D - L_j*R_i", vec![J, K]);
    for x in [0.0, 0.3, 1.0] {
        assert!(shifted.evaluate(1.5 + x).max_abs_diff(base.evaluate(x)) < 1e-12);
        assert!(shifted.evaluate_terms(1.5 + x).max_abs_diff(base.evaluate(x)) < 1e-12);
    }
}

#[test]
fn higher_order_equation() {
    let sol = solve_eq("D^3 - L_i*D^2 + R_j*D - L_k*R_k", vec![ONE, I, J]);
    assert_eq!(sol.fitted_constants.len(), 12);
    let y = integrate(&sol.matrix, &stack(&[ONE, I, J]), 0.0, 1.0, &IntegratorConfig::default()).unwrap();
    assert!(unstack(&y)[0].max_abs_diff(sol.evaluate(1.0)) < 1e-9);
    for x in [0.0, 0.5, 1.0, 2.0] {
        assert!(sol.residual(x) < 1e-9);
    }
}
