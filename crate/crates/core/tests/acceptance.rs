//! End-to-end acceptance suite.
//!
//! Each test prints one PASS/FAIL line (visible with `--nocapture`) and
//! asserts the stated tolerance. Together they pin down the contract of the
//! construction pipeline: spectrum reproduction, the closed-form potential,
//! level-split constancy, the two equivalent perturbation formulations, the
//! ν-shift closure of the `2/g` generator, the constant-mass degeneration,
//! second-order convergence of the oracle, the ordering-parameter contract,
//! and orthogonality of analytic and numeric states.

use pdmforge_core::field::{make_exp_map, Interval, MassProfile, SmoothMap1D};
use pdmforge_core::pct::{
    construct_hermite_harmonic, construct_laguerre_exponential, delta_q_two_over_g,
    delta_rhs_from_generator, delta_rhs_from_h, grid_inner, hermite_harmonic_inputs,
    laguerre_exponential_inputs, registered_solvable_triples, rhs_solvable, split_energy_potential,
    DeltaQ, Grid1D, PctError, PctInputs,
};
use pdmforge_core::specfam::dressed_laguerre_family;
use pdmforge_core::vonroos::{
    discretize, eigs_lowest, veff_from_von_roos, verify_system, SolverOptions, VerifyOptions,
    VonRoosParams,
};

fn criterion(name: &str, pass: bool, detail: &str) {
    println!("{name}: {} ({detail})", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "{name} failed: {detail}");
}

fn reference_grid() -> Grid1D {
    Grid1D::new(-10.0, 25.0, 8000).unwrap()
}

fn exponential_potential(beta: f64, nu: f64, x: f64) -> f64 {
    0.25 * beta * beta * ((nu * nu - 1.0) * (beta * x).exp() + (-beta * x).exp())
}

#[test]
fn a1_spectrum_reproduction() {
    let sys = construct_laguerre_exponential(1.0, 2.0, 3, reference_grid()).unwrap();
    let report = verify_system(&sys, 4, &VerifyOptions::default()).unwrap();
    let mut worst = 0.0f64;
    for level in &report.levels {
        let expected = level.n as f64 + 1.5;
        let gap = (level.numeric_energy - expected).abs() / expected;
        worst = worst.max(gap);
    }
    criterion(
        "A1 spectrum reproduction",
        worst <= 1e-3 && report.all_pass,
        &format!("max relative energy gap {worst:.3e} (tolerance 1e-3)"),
    );
}

#[test]
fn a2_potential_identity() {
    let mut worst = 0.0f64;
    for &beta in &[0.5, 1.0, 2.0] {
        for &nu in &[1.0, 2.0, 3.0] {
            let grid = Grid1D::new(-4.0 / beta, 4.0 / beta, 1001).unwrap();
            let sys = construct_laguerre_exponential(beta, nu, 0, grid).unwrap();
            for (i, x) in grid.points().enumerate() {
                let expected = exponential_potential(beta, nu, x);
                let rel = (sys.potential()[i] - expected).abs() / expected.abs();
                worst = worst.max(rel);
            }
        }
    }
    criterion(
        "A2 potential identity",
        worst <= 1e-10,
        &format!("max pointwise relative deviation {worst:.3e} (tolerance 1e-10)"),
    );
}

#[test]
fn a3_level_split_constancy() {
    let mut worst = 0.0f64;
    for triple in registered_solvable_triples() {
        let grid = triple.inputs.grid();
        let mut w = Vec::new();
        for n in 0..=3usize {
            let row: Vec<f64> = grid
                .points()
                .map(|x| rhs_solvable(&triple.inputs, n, x).unwrap())
                .collect();
            w.push(row);
        }
        let e: Vec<f64> = (0..=3).map(|n| triple.rule.eval(n)).collect();
        for n in 1..=3usize {
            let gap = e[n] - e[0];
            for (wn, w0) in w[n].iter().zip(&w[0]) {
                worst = worst.max(((wn - w0) - gap).abs());
            }
        }
    }

    // The deliberately broken triple must fail loudly.
    let grid = Grid1D::new(0.5, 8.0, 501).unwrap();
    let window = grid.interval();
    let mass = MassProfile::new(make_exp_map(-1.0, 0.0), window).unwrap();
    let gmap = pdmforge_core::field::CoordinateMap::new(SmoothMap1D::identity(), window).unwrap();
    let family = dressed_laguerre_family(2.0).unwrap();
    let inputs = PctInputs::new(mass, gmap, family, grid).unwrap();
    let mut w = Vec::new();
    for n in 0..=1usize {
        let row: Vec<f64> = grid
            .points()
            .map(|x| rhs_solvable(&inputs, n, x).unwrap())
            .collect();
        w.push(row);
    }
    let mean: f64 = w[1].iter().zip(&w[0]).map(|(a, b)| a - b).sum::<f64>() / grid.len() as f64;
    let broken_deviation = w[1]
        .iter()
        .zip(&w[0])
        .map(|(a, b)| ((a - b) - mean).abs())
        .fold(0.0f64, f64::max);
    let rejected = matches!(
        split_energy_potential(&w, None, 1e-8),
        Err(PctError::SplitInconsistency { .. })
    );

    criterion(
        "A3 level-split constancy",
        worst <= 1e-8 && broken_deviation >= 1e-2 && rejected,
        &format!(
            "max |(W_n - W_0) - (E_n - E_0)| = {worst:.3e} over registered triples \
             (tolerance 1e-8); broken triple deviates by {broken_deviation:.3e} and is rejected: {rejected}"
        ),
    );
}

#[test]
fn a4_cross_formulation_agreement() {
    let generators = [
        DeltaQ::Zero,
        DeltaQ::Constant(0.5),
        DeltaQ::TwoOverG,
        DeltaQ::LinearInG(0.1),
    ];
    let exp_grid = Grid1D::new(-5.0, 10.0, 3001).unwrap();
    let (exp_inputs, _, _) = laguerre_exponential_inputs(1.0, 2.0, exp_grid).unwrap();
    let harm_grid = Grid1D::new(-8.0, 8.0, 2000).unwrap();
    let (harm_inputs, _, _) = hermite_harmonic_inputs(harm_grid).unwrap();

    let mut worst = 0.0f64;
    let mut compared = 0usize;
    for (inputs, name) in [(&exp_inputs, "exponential"), (&harm_inputs, "harmonic")] {
        for dq in &generators {
            // Any positive reference works: the moderating factor enters
            // only through h'/h and h''/h.
            let g_ref = match name {
                "exponential" => inputs.gmap().eval(inputs.grid().midpoint()),
                _ => 1.0,
            };
            let hmap = dq.moderating_map(inputs.gmap(), g_ref).unwrap();
            for x in inputs.grid().points() {
                let d10 = delta_rhs_from_generator(inputs, 0, dq, x).unwrap();
                let d13 = delta_rhs_from_h(inputs, 0, &hmap, x).unwrap();
                let scale = d10.abs().max(d13.abs());
                if scale > 1e-12 {
                    worst = worst.max((d10 - d13).abs() / scale);
                    compared += 1;
                }
            }
        }
    }
    criterion(
        "A4 cross-formulation agreement",
        worst <= 1e-8 && compared > 0,
        &format!("max relative disagreement {worst:.3e} over {compared} points (tolerance 1e-8)"),
    );
}

#[test]
fn a5_nu_shift_closure() {
    let grid = reference_grid();
    let sys = construct_laguerre_exponential(1.0, 2.0, 0, grid).unwrap();
    let res = delta_q_two_over_g(&sys, 0, false).unwrap();
    let exact_shift = res.delta_e == 1.0 && !res.delta_e_is_gauge;

    let shifted = construct_laguerre_exponential(1.0, 4.0, 0, grid).unwrap();
    let mut worst_v = 0.0f64;
    for i in 0..grid.len() {
        let lhs = sys.potential()[i] + res.delta_v[i];
        let rhs = shifted.potential()[i];
        worst_v = worst_v.max((lhs - rhs).abs() / rhs.abs());
    }

    let veff: Vec<f64> = (0..grid.len())
        .map(|i| sys.potential()[i] + res.delta_v[i])
        .collect();
    let t = discretize(sys.inputs().mass(), &veff, grid).unwrap();
    let eig = eigs_lowest(&t, 1, &SolverOptions::default()).unwrap();
    let lambda0 = eig.values[0];
    let overlap = grid_inner(&res.psi_ext, &eig.padded(0), grid.dx()).abs();

    criterion(
        "A5 nu-shift closure",
        exact_shift && worst_v <= 1e-10 && (lambda0 - 2.5).abs() <= 2.5e-3 && overlap >= 0.9999,
        &format!(
            "deltaE = {} (exact), max relative potential deviation {worst_v:.3e}, \
             lambda_0 = {lambda0:.6} (target 2.5 +- 2.5e-3), overlap {overlap:.6}",
            res.delta_e
        ),
    );
}

#[test]
fn a6_constant_mass_degeneration() {
    let grid = Grid1D::new(-8.0, 8.0, 2000).unwrap();
    let sys = construct_hermite_harmonic(3, grid).unwrap();

    let mut worst_v = 0.0f64;
    for (i, x) in grid.points().enumerate() {
        let expected = x * x;
        worst_v = worst_v.max((sys.potential()[i] - expected).abs() / expected.max(1.0));
    }
    let energies_exact = (0..=3).all(|n| sys.energies()[n] == 2.0 * n as f64 + 1.0);

    let report = verify_system(&sys, 4, &VerifyOptions::default()).unwrap();
    let worst_gap = report
        .levels
        .iter()
        .map(|l| l.rel_gap)
        .fold(0.0f64, f64::max);

    criterion(
        "A6 constant-mass degeneration",
        worst_v <= 1e-12 && energies_exact && worst_gap <= 1e-3 && report.all_pass,
        &format!(
            "max potential deviation {worst_v:.3e} (tolerance 1e-12), energies exact: \
             {energies_exact}, max numeric gap {worst_gap:.3e} (tolerance 1e-3)"
        ),
    );
}

#[test]
fn a7_convergence_order() {
    let e0 = 1.5;
    let mut errors = Vec::new();
    for n_points in [8000usize, 15999] {
        let grid = Grid1D::new(-10.0, 25.0, n_points).unwrap();
        let sys = construct_laguerre_exponential(1.0, 2.0, 0, grid).unwrap();
        let t = discretize(sys.inputs().mass(), sys.potential(), grid).unwrap();
        let eig = eigs_lowest(&t, 1, &SolverOptions::default()).unwrap();
        errors.push((eig.values[0] - e0).abs());
    }
    let ratio = errors[0] / errors[1];
    criterion(
        "A7 convergence order",
        (3.0..=5.0).contains(&ratio),
        &format!(
            "halving the step shrinks the ground-level error by {ratio:.3} \
             (errors {:.3e} -> {:.3e}; expected 4 +- 25%)",
            errors[0], errors[1]
        ),
    );
}

#[test]
fn a8_ambiguity_parameter_contract() {
    let window = Interval::new(-3.0, 3.0).unwrap();
    let v = SmoothMap1D::poly(&[0.5, 0.0, 1.0]);
    let rational = SmoothMap1D::product(
        SmoothMap1D::poly(&[2.0, 0.0, 1.0]),
        SmoothMap1D::recip(SmoothMap1D::poly(&[1.0, 0.0, 1.0])),
    )
    .unwrap();
    let masses = vec![
        MassProfile::new(SmoothMap1D::constant(1.0), window).unwrap(),
        MassProfile::new(SmoothMap1D::constant(2.5), window).unwrap(),
        MassProfile::new(make_exp_map(-1.0, 0.0), window).unwrap(),
        MassProfile::new(rational, window).unwrap(),
    ];
    let bdd = VonRoosParams::ben_daniel_duke();
    let orderings = [
        VonRoosParams::new(0.0, -1.0, 0.0).unwrap(),
        VonRoosParams::new(-1.0, 0.0, 0.0).unwrap(),
        VonRoosParams::new(0.25, -1.0, -0.25).unwrap(),
        VonRoosParams::new(-0.5, -0.75, 0.25).unwrap(),
    ];

    let xs: Vec<f64> = (0..61).map(|i| -3.0 + 0.1 * i as f64).collect();
    let mut bdd_exact = true;
    for mass in &masses {
        for &x in &xs {
            bdd_exact &= veff_from_von_roos(&v, mass, &bdd, x) == v.eval(x);
        }
    }
    let mut const_exact = true;
    for p in &orderings {
        for &x in &xs {
            const_exact &= veff_from_von_roos(&v, &masses[0], p, x) == v.eval(x);
            const_exact &= veff_from_von_roos(&v, &masses[1], p, x) == v.eval(x);
        }
    }
    criterion(
        "A8 ambiguity-parameter contract",
        bdd_exact && const_exact,
        &format!(
            "BenDaniel-Duke equals bare V for every registry mass: {bdd_exact}; \
             constant mass equals bare V for all orderings: {const_exact}"
        ),
    );
}

#[test]
fn a9_orthogonality() {
    let sys = construct_laguerre_exponential(1.0, 2.0, 3, reference_grid()).unwrap();
    let grid = sys.grid();
    let dx = grid.dx();
    let mut worst_analytic = 0.0f64;
    for m in 0..=3usize {
        for n in (m + 1)..=3usize {
            worst_analytic = worst_analytic.max(grid_inner(sys.psi(m), sys.psi(n), dx).abs());
        }
    }

    let t = discretize(sys.inputs().mass(), sys.potential(), grid).unwrap();
    let eig = eigs_lowest(&t, 4, &SolverOptions::default()).unwrap();
    let mut worst_gram = 0.0f64;
    for a in 0..4usize {
        for b in 0..4usize {
            let ip = grid_inner(&eig.padded(a), &eig.padded(b), dx);
            let expected = if a == b { 1.0 } else { 0.0 };
            worst_gram = worst_gram.max((ip.abs() - expected).abs());
        }
    }

    criterion(
        "A9 orthogonality",
        worst_analytic <= 1e-6 && worst_gram <= 1e-8,
        &format!(
            "max analytic cross inner product {worst_analytic:.3e} (tolerance 1e-6); \
             numeric Gram deviation {worst_gram:.3e} (tolerance 1e-8)"
        ),
    );
}
