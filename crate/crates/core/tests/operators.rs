use std::sync::Arc;

use shellflow::boundary::{BoundaryConditions, ZeroVelocity};
use shellflow::grid::{FieldSet, MacGrid, Variable};
use shellflow::operators::{apply_explicit_d, apply_explicit_dm, CoefficientState};
use shellflow::thermo::{Environment, GasParams};
use shellflow::timestepper::{build_rhs, picard_step, Model, PicardConfig};
use shellflow::verification::jet::{Jet, Scalar};
use shellflow::verification::manufactured::pde_terms;
use shellflow::verification::ManufacturedCase;

/// Smooth state with every variable varying in every direction.
fn smooth<S: Scalar>(r: S, th: S, ph: S) -> [S; 5] {
    let p = S::cst(6250.0) + (r * 2.0).sin() * th.cos() * ph.sin() * 100.0;
    let t = p / 0.6 + (r + ph).cos() * 20.0;
    let a = r.sin() * th.sin() * (ph * 0.7).cos() * 10.0 + 3.0;
    let b = (r * th).cos() * 4.0 - ph.sin() * 2.0;
    let c = (th + ph * 1.3).sin() * r * 5.0;
    [p, a, b, c, t]
}

/// RMS error over entries at least two cells from every wall, per variable.
fn interior_error(grid: &MacGrid, num: &FieldSet, exact: impl Fn(Variable, [f64; 3]) -> f64) -> [f64; 5] {
    Variable::ALL.map(|v| {
        let f = num.get(v);
        let loc = v.location();
        let (mut e, mut count) = (0.0f64, 0usize);
        f.for_each_interior(|i, j, k| {
            let idx = [i, j, k];
            if (0..3).any(|d| idx[d] < 2 || idx[d] > f.n[d] as isize - 3) {
                return;
            }
            let x = grid.coords(loc, i, j, k);
            e += (f.get(i, j, k) - exact(v, x)).powi(2);
            count += 1;
        });
        (e / count as f64).sqrt()
    })
}

fn operator_error(n: usize, mu: f64, env: Environment) -> [f64; 5] {
    let gas = GasParams::from_gamma(1.6, 1.0, mu, 1.0, 0.0).unwrap();
    let grid = MacGrid::cube(ManufacturedCase::sector(), n).unwrap();
    let u = FieldSet::from_fn(&grid, |v, r, th, ph| smooth(r, th, ph)[v as usize]);
    let cs = CoefficientState::new(&u, &grid, &gas).unwrap();
    let mut out = apply_explicit_d(&cs, &u, &grid, &gas);
    out.axpy(1.0, &apply_explicit_dm(&cs, &u, &grid, &gas, &env));
    interior_error(&grid, &out, |v, x| {
        let j = smooth(Jet::var(x[0], 0), Jet::var(x[1], 1), Jet::var(x[2], 2));
        pde_terms(&gas, &env, x, &j).spatial[v as usize]
    })
}

fn assert_second_order(mu: f64, env: Environment) {
    let coarse = operator_error(16, mu, env);
    let fine = operator_error(32, mu, env);
    for v in Variable::ALL {
        let i = v as usize;
        let order = (coarse[i] / fine[i]).log2();
        assert!(order > 1.8, "{} order {order:.3} ({:.3e} -> {:.3e})", v.name(), coarse[i], fine[i]);
    }
}

#[test]
fn inviscid_operators_are_second_order() {
    assert_second_order(0.0, Environment::NONE);
}

#[test]
fn viscous_operators_are_second_order() {
    assert_second_order(1.0, Environment::NONE);
}

#[test]
fn rotating_operators_are_second_order() {
    assert_second_order(1.0, Environment::rotating(0.0, 0.5));
}

fn rest_model(grid: &MacGrid) -> (Model, FieldSet) {
    let gas = GasParams::from_gamma(1.4, 1.0, 0.1, 0.7, 0.0).unwrap();
    let bc = BoundaryConditions::no_slip(Arc::new(ZeroVelocity));
    let model = Model::new(grid.clone(), gas, Environment::NONE, bc, 1e5);
    let mut u = FieldSet::from_fn(grid, |v, _, _, _| match v {
        Variable::Pressure => 1e5,
        Variable::Temperature => 300.0,
        _ => 0.0,
    });
    model.bc.apply(grid, &mut u, 0.0);
    (model, u)
}

#[test]
fn uniform_rest_state_is_a_fixed_point() {
    let grid = MacGrid::cube(ManufacturedCase::sector(), 6).unwrap();
    let (model, u) = rest_model(&grid);
    let cfg = PicardConfig::new(1e-2).with_iterations(3);
    let (next, inc) = picard_step(&model, &cfg, &u, 0.0, 1, None).unwrap();
    let diff = FieldSet::difference(&next, &u).max_norms();
    // Only round-off of the 1e5 pressure may move the state.
    assert!(diff.iter().all(|&d| d <= 1e-12), "{diff:?}");
    assert!(inc.iter().all(|&i| i <= 1e-15), "{inc:?}");
}

#[test]
fn rhs_at_first_iterate_is_minus_tau_times_operator() {
    let grid = MacGrid::cube(ManufacturedCase::sector(), 6).unwrap();
    let (model, _) = rest_model(&grid);
    let mut u = FieldSet::from_fn(&grid, |v, r, th, ph| smooth(r, th, ph)[v as usize]);
    model.bc.apply(&grid, &mut u, 0.0);
    let cs = CoefficientState::new(&u, &grid, &model.gas).unwrap();
    let tau = 1e-3;
    let rhs = build_rhs(&u, &u, &cs, tau, &model, None);
    let mut op = apply_explicit_d(&cs, &u, &grid, &model.gas);
    op.axpy(1.0, &apply_explicit_dm(&cs, &u, &grid, &model.gas, &model.env));
    op.get_mut(Variable::VelR).axpy(1.0, &model.gravity);
    op.scale(-tau);
    let diff = FieldSet::difference(&rhs, &op).max_norms();
    let scale = op.max_norms();
    for v in 0..5 {
        assert!(diff[v] <= 1e-12 * (1.0 + scale[v]), "variable {v}: {} vs scale {}", diff[v], scale[v]);
    }
}
