//! Values frozen from extended-precision evaluation (40 digits) and hand
//! arithmetic, checked through the public API.

use smooth_margin::boost::{ada_step, alg2_step};
use smooth_margin::dynamics::scripted_recursion;
use smooth_margin::learners::{goal_edge_select, optimal_select, weight_map_check, BoundedEdgeParams};
use smooth_margin::margin::{update_weights, upsilon};
use smooth_margin::matrix::cyclic_3x3;
use smooth_margin::{Column, GameMatrix, ModelState, WeightDist};

fn close(a: f64, b: f64, tol: f64) {
    assert!((a - b).abs() <= tol, "{a} vs {b}");
}

#[test]
fn upsilon_values() {
    close(upsilon(0.3).unwrap(), 0.15235009057673961, 1e-15);
    close(upsilon(0.4).unwrap(), 0.20577579065890786, 1e-15);
    close(upsilon(0.5).unwrap(), 0.2618595071429149, 1e-15);
}

#[test]
fn step_closed_forms() {
    close(ada_step(1.0 / 3.0).unwrap(), 0.5 * 2f64.ln(), 1e-15);
    close(ada_step(0.5).unwrap(), 0.5493061443340548, 1e-15);
    close(alg2_step(0.5, 0.2).unwrap(), 0.5 * 2f64.ln(), 1e-15);
    close(alg2_step(0.5, 0.0).unwrap(), ada_step(0.5).unwrap(), 0.0);
}

#[test]
fn one_recursion_step_from_g_point_one() {
    let step = scripted_recursion(0.5, 0.1, 1.0, 1).unwrap()[0];
    close(step.s - 1.0, 0.4489707966029793, 1e-14);
    close(step.g, 0.16481758559870806, 1e-14);
}

#[test]
fn two_term_loss() {
    let m = GameMatrix::from_rows(&[vec![1], vec![-1]]).unwrap();
    let st = ModelState::from_lambda(&m, vec![1.0]).unwrap();
    close(st.log_loss(), 1.1269280110429725, 1e-15);
    close(st.smooth_margin().unwrap(), -1.1269280110429725, 1e-15);
    close(st.margin().unwrap(), -1.0, 0.0);
}

#[test]
fn cyclic_margin_and_selection() {
    let m = cyclic_3x3();
    let st = ModelState::from_lambda(&m, vec![2.0, 2.0, 2.0]).unwrap();
    close(st.margin().unwrap(), 1.0 / 3.0, 1e-15);
    assert_eq!(st.support_vectors(1e-12).unwrap(), vec![0, 1, 2]);
    let d = WeightDist::new(vec![0.25, 0.5, 0.25]).unwrap();
    assert_eq!(optimal_select(&m, &d).unwrap().column, Column::Index(1));
    let goal = goal_edge_select(&m, &d, 0.4).unwrap();
    assert_eq!((goal.column, goal.r), (Column::Index(1), 0.5));
}

#[test]
fn weight_updates_by_hand() {
    let d = WeightDist::uniform(3);
    let next = update_weights(&d, &[1, 1, -1], 0.5 * 2f64.ln());
    for (a, b) in next.as_slice().iter().zip([0.25, 0.25, 0.5]) {
        close(*a, b, 1e-15);
    }
    let mapped = weight_map_check(&[0.5, 1.0 / 3.0, 1.0 / 6.0], 2, 2.0 / 3.0).unwrap();
    for (a, b) in mapped.iter().zip([0.3, 0.2, 0.5]) {
        close(*a, b, 1e-15);
    }
}

#[test]
fn bounded_edge_parameters() {
    let p = BoundedEdgeParams::with_min_phi(0.3, 0.1, 60).unwrap();
    close(p.phi(), 7.0 / 3.0, 1e-12);
    assert_eq!(p.cap(), 39);
    assert!(BoundedEdgeParams::new(0.3, 0.1, 7.0 / 3.0, 40).is_err());
}
