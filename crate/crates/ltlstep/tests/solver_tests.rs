mod support;

use ltlstep::solver::{
    branch_and_bound, solve_relaxation, AdmmSettings, BnbSettings, ModelIR, RelaxStatus, Sense,
    SolveStatus,
};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn admm() -> AdmmSettings {
    AdmmSettings::default()
}

#[test]
fn clamped_parabola() {
    // minimize (x−1)² over [0, 0.5]: optimum at the upper bound
    let mut m = ModelIR::new();
    let x = m.add_continuous("x", 0.0, 0.5);
    m.objective.quad.push((x, x, 1.0));
    m.objective.lin.push((x, -2.0));
    m.objective.constant = 1.0;
    let sol = solve_relaxation(&m, &admm()).unwrap();
    assert_eq!(sol.status, RelaxStatus::Solved);
    assert!((sol.x[x.0] - 0.5).abs() < 1e-6, "x = {}", sol.x[x.0]);
    assert!((sol.objective - 0.25).abs() < 1e-6);
    assert!(sol.primal_residual <= 1e-6 && sol.dual_residual <= 1e-6);
}

#[test]
fn tight_vertex_lp() {
    // minimize x+y s.t. x+y >= 2, x,y in [0,1]
    let mut m = ModelIR::new();
    let x = m.add_continuous("x", 0.0, 1.0);
    let y = m.add_continuous("y", 0.0, 1.0);
    m.add_row("r", vec![(x, 1.0), (y, 1.0)], Sense::Ge, 2.0);
    m.objective.lin = vec![(x, 1.0), (y, 1.0)];
    let sol = solve_relaxation(&m, &admm()).unwrap();
    assert_eq!(sol.status, RelaxStatus::Solved);
    assert!((sol.objective - 2.0).abs() < 1e-6);
}

#[test]
fn infeasible_row_is_detected() {
    let mut m = ModelIR::new();
    let x = m.add_continuous("x", 0.0, 1.0);
    m.add_row("lo", vec![(x, 1.0)], Sense::Ge, 0.8);
    m.add_row("hi", vec![(x, 1.0)], Sense::Le, 0.2);
    let res = branch_and_bound(&m, &BnbSettings::default()).unwrap();
    assert_eq!(res.status, SolveStatus::Infeasible);
}

#[test]
fn constant_false_row_is_infeasible() {
    // the encoder's `X` at the horizon emits an empty row `0 = 1`
    let mut m = ModelIR::new();
    let _x = m.add_continuous("x", 0.0, 1.0);
    m.add_row("false", vec![], Sense::Eq, 1.0);
    let res = branch_and_bound(&m, &BnbSettings::default()).unwrap();
    assert_eq!(res.status, SolveStatus::Infeasible);
}

#[test]
fn soc_row_projects_onto_circle() {
    // minimize (x−2)² subject to ‖(x, y)‖ <= 1: optimum x = 1
    use ltlstep::solver::LinExpr;
    let mut m = ModelIR::new();
    let x = m.add_continuous("x", -2.0, 2.0);
    let y = m.add_continuous("y", -2.0, 2.0);
    m.add_norm_row(
        "ball",
        [LinExpr::term(x, 1.0), LinExpr::term(y, 1.0)],
        LinExpr::constant(1.0),
    );
    m.objective.quad.push((x, x, 1.0));
    m.objective.lin.push((x, -4.0));
    m.objective.constant = 4.0;
    let sol = solve_relaxation(&m, &admm()).unwrap();
    assert_eq!(sol.status, RelaxStatus::Solved);
    assert!((sol.x[x.0] - 1.0).abs() < 1e-5, "x = {}", sol.x[x.0]);
    assert!((sol.objective - 1.0).abs() < 1e-5);
}

#[test]
fn fully_fixed_binaries_need_no_branching() {
    let mut m = ModelIR::new();
    let b = m.add_binary("b");
    let x = m.add_continuous("x", 0.0, 4.0);
    m.fix(b, 1.0);
    m.add_row("link", vec![(x, 1.0), (b, -3.0)], Sense::Ge, 0.0);
    m.objective.quad.push((x, x, 1.0));
    let res = branch_and_bound(&m, &BnbSettings::default()).unwrap();
    assert_eq!(res.status, SolveStatus::Optimal);
    assert_eq!(res.nodes, 1);
    let relax = solve_relaxation(&m, &admm()).unwrap();
    assert!((res.objective.unwrap() - relax.objective).abs() < 1e-6);
}

/// Random strictly convex QPs against the dense active-set reference.
#[test]
fn relaxation_matches_active_set_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for trial in 0..100 {
        let n = rng.gen_range(2..=20);
        let m_extra = rng.gen_range(0..=10);
        let l = DMatrix::<f64>::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
        let p = &l.transpose() * &l + DMatrix::<f64>::identity(n, n) * 0.5;
        let q = DVector::<f64>::from_fn(n, |_, _| rng.gen_range(-2.0..2.0));
        let x0 = DVector::<f64>::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));

        let mut model = ModelIR::new();
        let vars: Vec<_> = (0..n)
            .map(|i| model.add_continuous(format!("x{i}"), -3.0, 3.0))
            .collect();
        // extra inequality rows, strictly feasible at x0
        let mut a_rows: Vec<Vec<f64>> = Vec::new();
        let mut b_vals: Vec<f64> = Vec::new();
        for r in 0..m_extra {
            let row: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let ax0: f64 = row.iter().zip(x0.iter()).map(|(a, b)| a * b).sum();
            let b = ax0 + rng.gen_range(0.1..2.0);
            model.add_row(
                format!("r{r}"),
                row.iter()
                    .enumerate()
                    .map(|(i, &c)| (vars[i], c))
                    .collect(),
                Sense::Le,
                b,
            );
            a_rows.push(row);
            b_vals.push(b);
        }
        for i in 0..n {
            for j in 0..n {
                let c = p[(i, j)];
                if c != 0.0 && i <= j {
                    let coef = if i == j { c / 2.0 } else { c };
                    model.objective.quad.push((vars[i], vars[j], coef));
                }
            }
            model.objective.lin.push((vars[i], q[i]));
        }

        // reference: same feasible set with the boxes as explicit rows
        let m_total = a_rows.len() + 2 * n;
        let mut a_ref = DMatrix::<f64>::zeros(m_total, n);
        let mut b_ref = DVector::<f64>::zeros(m_total);
        for (r, row) in a_rows.iter().enumerate() {
            for (i, &c) in row.iter().enumerate() {
                a_ref[(r, i)] = c;
            }
            b_ref[r] = b_vals[r];
        }
        for i in 0..n {
            a_ref[(a_rows.len() + 2 * i, i)] = 1.0;
            b_ref[a_rows.len() + 2 * i] = 3.0;
            a_ref[(a_rows.len() + 2 * i + 1, i)] = -1.0;
            b_ref[a_rows.len() + 2 * i + 1] = 3.0;
        }
        let (_, ref_obj) = support::active_set_qp(&p, &q, &a_ref, &b_ref, x0.clone());

        let sol = solve_relaxation(&model, &admm()).unwrap();
        assert_eq!(sol.status, RelaxStatus::Solved, "trial {trial}");
        let scale = ref_obj.abs().max(1.0);
        assert!(
            (sol.objective - ref_obj).abs() <= 1e-5 * scale,
            "trial {trial}: admm {} vs reference {}",
            sol.objective,
            ref_obj
        );
    }
}

fn random_mixed_instance(rng: &mut ChaCha8Rng, free_binaries: usize) -> ModelIR {
    let n_c = rng.gen_range(2..=5);
    let mut model = ModelIR::new();
    let xs: Vec<_> = (0..n_c)
        .map(|i| model.add_continuous(format!("x{i}"), -5.0, 5.0))
        .collect();
    let bs: Vec<_> = (0..free_binaries)
        .map(|i| model.add_binary(format!("b{i}")))
        .collect();

    // a sum-to-one group over the first three binaries exercises group branching
    if free_binaries >= 3 {
        let group = vec![bs[0], bs[1], bs[2]];
        model.add_row(
            "sos",
            group.iter().map(|&v| (v, 1.0)).collect(),
            Sense::Eq,
            1.0,
        );
        model.add_sos1_group(group);
    }

    // feasibility anchor
    let x0: Vec<f64> = (0..n_c).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let b0: Vec<f64> = (0..free_binaries)
        .map(|i| {
            if free_binaries >= 3 && i < 3 {
                if i == 0 {
                    1.0
                } else {
                    0.0
                }
            } else {
                f64::from(u32::from(rng.gen_bool(0.5)))
            }
        })
        .collect();
    let m_rows = rng.gen_range(2..=6);
    for r in 0..m_rows {
        let mut terms = Vec::new();
        let mut a_dot = 0.0;
        for (i, &v) in xs.iter().enumerate() {
            let c: f64 = rng.gen_range(-1.0..1.0);
            terms.push((v, c));
            a_dot += c * x0[i];
        }
        for (i, &v) in bs.iter().enumerate() {
            if rng.gen_bool(0.5) {
                let c: f64 = rng.gen_range(-2.0..2.0);
                terms.push((v, c));
                a_dot += c * b0[i];
            }
        }
        model.add_row(format!("m{r}"), terms, Sense::Le, a_dot + rng.gen_range(0.05..1.5));
    }

    // strictly convex in the continuous block, linear binary costs
    for (i, &v) in xs.iter().enumerate() {
        model.objective.quad.push((v, v, rng.gen_range(0.5..2.0)));
        model.objective.lin.push((v, rng.gen_range(-2.0..2.0)));
        let _ = i;
    }
    for &v in &bs {
        model.objective.lin.push((v, rng.gen_range(-2.0..2.0)));
    }
    model
}

/// Branch-and-bound against brute-force enumeration over the binaries.
#[test]
fn bnb_matches_enumeration_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut violations = 0u64;
    for trial in 0..50 {
        let free = rng.gen_range(4..=12);
        let model = random_mixed_instance(&mut rng, free);
        let oracle = support::enumerate_mip(&model, &admm());
        let res = branch_and_bound(&model, &BnbSettings::default()).unwrap();
        violations += res.bound_violations;
        match oracle {
            Some(best) => {
                assert_eq!(res.status, SolveStatus::Optimal, "trial {trial}");
                let got = res.objective.unwrap();
                assert!(
                    (got - best).abs() <= 1e-5 * best.abs().max(1.0),
                    "trial {trial}: bnb {got} vs enumeration {best}"
                );
            }
            None => {
                assert_eq!(res.status, SolveStatus::Infeasible, "trial {trial}");
            }
        }
    }
    assert_eq!(violations, 0, "child bounds must not drop below parents");
}

#[test]
fn bnb_is_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let model = random_mixed_instance(&mut rng, 8);
    let a = branch_and_bound(&model, &BnbSettings::default()).unwrap();
    let b = branch_and_bound(&model, &BnbSettings::default()).unwrap();
    assert_eq!(a.status, b.status);
    assert_eq!(a.nodes, b.nodes);
    assert_eq!(a.objective, b.objective);
    assert_eq!(a.x, b.x);
}

#[test]
fn incumbents_are_integral_and_feasible() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..10 {
        let model = random_mixed_instance(&mut rng, 10);
        let res = branch_and_bound(&model, &BnbSettings::default()).unwrap();
        if res.status != SolveStatus::Optimal {
            continue;
        }
        let x = res.x.unwrap();
        for (i, v) in model.vars.iter().enumerate() {
            if v.kind == ltlstep::solver::VarKind::Binary {
                assert!(
                    (x[i] - x[i].round()).abs() <= 1e-9,
                    "binary {} = {}",
                    v.name,
                    x[i]
                );
            }
        }
        for row in &model.rows {
            let lhs: f64 = row.terms.iter().map(|&(v, c)| c * x[v.0]).sum();
            let ok = match row.sense {
                Sense::Le => lhs <= row.rhs + 1e-6,
                Sense::Ge => lhs >= row.rhs - 1e-6,
                Sense::Eq => (lhs - row.rhs).abs() <= 1e-6,
            };
            assert!(ok, "row {} violated: {} vs {}", row.name, lhs, row.rhs);
        }
    }
}
