mod common;

use common::{lift, mat4_vec, max_abs_diff, project, rate_matrix_oracle};
use projrot::linalg::Vec3;
use projrot::{h_matrix, patch_delta, patch_rhs, quat_rhs, scale_factor, skew, w_column};
use projrot::{AngularVelocity, PatchRotation, UnitQuaternion};
use proptest::prelude::*;

fn vec3(bound: f64) -> impl Strategy<Value = Vec3> {
    [-bound..=bound, -bound..=bound, -bound..=bound]
}

fn omega(bound: f64) -> impl Strategy<Value = AngularVelocity> {
    vec3(bound).prop_map(|w| AngularVelocity::new(w).unwrap())
}

fn patch_point(bound: f64) -> impl Strategy<Value = PatchRotation> {
    (0usize..4, vec3(bound)).prop_map(|(i, x)| PatchRotation::new(i, x).unwrap())
}

fn unit_quat() -> impl Strategy<Value = UnitQuaternion> {
    [-1.0..=1.0f64, -1.0..=1.0f64, -1.0..=1.0f64, -1.0..=1.0f64]
        .prop_filter("away from zero", |q| q.iter().map(|c| c * c).sum::<f64>() > 1e-2)
        .prop_map(|q| UnitQuaternion::new(q).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn patch_rhs_is_the_quotient_rule_projection(p in patch_point(2.0), w in omega(10.0)) {
        let i = p.patch();
        let z = lift(&p.x(), i);
        let zdot = mat4_vec(&rate_matrix_oracle(&w.components()), &z).map(|c| 0.5 * c);
        // d/dt (z_j / z_i) with z_i = 1
        let mut expected = Vec::new();
        for j in (0..4).filter(|&j| j != i) {
            expected.push(zdot[j] - z[j] * zdot[i]);
        }
        prop_assert!(max_abs_diff(&patch_rhs(&p, &w), &expected) <= 1e-10);
    }

    #[test]
    fn patch_euler_increment_reproduces_the_projected_quaternion_step(
        q in unit_quat(),
        w in omega(10.0),
        dt in 1e-4..=0.1f64,
    ) {
        let p = q.to_patch();
        let i = p.patch();
        let c = q.coords();
        let qdot = mat4_vec(&rate_matrix_oracle(&w.components()), &c);
        let stepped = [0, 1, 2, 3].map(|k| c[k] + 0.5 * qdot[k] * dt);
        let expected = project(&stepped, i);
        let d = patch_delta(&p, &w, dt).unwrap();
        let x = p.x();
        let got = [x[0] + d[0], x[1] + d[1], x[2] + d[2]];
        let scale = expected.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        prop_assert!(max_abs_diff(&got, &expected) <= 1e-13 * scale, "{:?} vs {:?}", got, expected);
    }

    #[test]
    fn increment_over_dt_is_rhs_over_scale_factor(
        p in patch_point(2.0),
        w in omega(10.0),
        dt in 1e-4..=0.1f64,
    ) {
        let sf = scale_factor(&p, &w, dt);
        prop_assume!(sf.abs() > 1e-6);
        let d = patch_delta(&p, &w, dt).unwrap();
        let r = patch_rhs(&p, &w);
        for j in 0..3 {
            let lhs = d[j] / dt;
            let rhs = r[j] / sf;
            prop_assert!((lhs - rhs).abs() <= 1e-14 * rhs.abs().max(lhs.abs()), "{} vs {}", lhs, rhs);
        }
    }

    #[test]
    fn deleting_row_and_column_i_leaves_a_signed_skew_matrix(w in omega(10.0)) {
        let h = h_matrix(&w);
        for i in 0..4 {
            let keep: Vec<usize> = (0..4).filter(|&r| r != i).collect();
            let wi = w_column(&w, i).unwrap();
            let m = skew(&wi);
            let sign = if i % 2 == 0 { -1.0 } else { 1.0 };
            for (a, &r) in keep.iter().enumerate() {
                for (b, &c) in keep.iter().enumerate() {
                    prop_assert_eq!(h[r][c], sign * m[a][b]);
                }
            }
        }
    }

    #[test]
    fn rate_matrix_matches_the_quaternion_product(w in omega(10.0), q in unit_quat()) {
        let c = q.coords();
        let oracle = mat4_vec(&rate_matrix_oracle(&w.components()), &c).map(|v| 0.5 * v);
        let pure = [0.0, w.components()[0], w.components()[1], w.components()[2]];
        let product = projrot::hamilton(&c, &pure).map(|v| 0.5 * v);
        prop_assert!(max_abs_diff(&quat_rhs(&c, &w), &oracle) <= 1e-13);
        prop_assert!(max_abs_diff(&oracle, &product) <= 1e-13);
        prop_assert_eq!(h_matrix(&w), rate_matrix_oracle(&w.components()));
    }

    #[test]
    fn quaternion_flow_preserves_norm_to_first_order(w in omega(10.0), q in unit_quat()) {
        let c = q.coords();
        let d = quat_rhs(&c, &w);
        let radial: f64 = c.iter().zip(&d).map(|(a, b)| a * b).sum();
        prop_assert!(radial.abs() <= 1e-13);
    }
}
