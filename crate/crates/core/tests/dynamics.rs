mod common;

use effortvib::body_model::{compute_cog_positions, default_body_model};
use effortvib::dynamics::{inverse_dynamics_tree, segment_accelerations, KinematicsTrace, SavGolSpec};
use effortvib::trace_io::parse_landmark_trace;
use effortvib::{ErrorKind, Vec3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{fixture, synthetic_trace, SQUAT_AMPLITUDE};

const G: f64 = 9.81;

fn random_kinematics(rng: &mut ChaCha8Rng, segments: usize, frames: usize) -> KinematicsTrace {
    KinematicsTrace {
        valid: 0..frames,
        timestamps: (0..frames).map(|k| k as f64 / 30.0).collect(),
        accelerations: (0..segments)
            .map(|_| {
                (0..frames)
                    .map(|_| Vec3::new(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)))
                    .collect()
            })
            .collect(),
    }
}

#[test]
fn joint_forces_are_affine_in_accelerations() {
    let model = default_body_model();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let a = random_kinematics(&mut rng, model.len(), 8);
    let b = random_kinematics(&mut rng, model.len(), 8);
    let mut sum = a.clone();
    for (s, t) in sum.accelerations.iter_mut().zip(&b.accelerations) {
        for (x, y) in s.iter_mut().zip(t) {
            *x += y;
        }
    }
    // with gravity removed the map is linear
    let fa = inverse_dynamics_tree(&a, &model, 70.0, 0.0).unwrap();
    let fb = inverse_dynamics_tree(&b, &model, 70.0, 0.0).unwrap();
    let fs = inverse_dynamics_tree(&sum, &model, 70.0, 0.0).unwrap();
    for seg in 0..model.len() {
        for k in 0..8 {
            let want = fa.forces[seg][k] + fb.forces[seg][k];
            assert!((fs.forces[seg][k] - want).norm() <= 1e-12 * (1.0 + want.norm()));
        }
    }
}

#[test]
fn leaf_force_is_its_own_inertia() {
    let model = default_body_model();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let kin = random_kinematics(&mut rng, model.len(), 5);
    let forces = inverse_dynamics_tree(&kin, &model, 80.0, G).unwrap();
    let g = Vec3::new(0.0, -G, 0.0);
    for (i, seg) in model.segments().iter().enumerate() {
        if model.children(i).is_empty() {
            for k in 0..5 {
                let want = (kin.accelerations[i][k] - g) * (seg.mass_ratio * 80.0);
                assert!((forces.forces[i][k] - want).norm() <= 1e-12 * want.norm(), "{}", seg.name);
            }
        }
    }
}

#[test]
fn joint_names_describe_parent_and_child() {
    let model = default_body_model();
    let kin = random_kinematics(&mut ChaCha8Rng::seed_from_u64(13), model.len(), 1);
    let forces = inverse_dynamics_tree(&kin, &model, 60.0, G).unwrap();
    assert_eq!(forces.joint_names[model.root()], "ground->Hip");
    for name in ["Chest->Head", "LThigh->LShin", "RFArm->RHand"] {
        assert!(forces.joint(name).is_some(), "{name} in {:?}", forces.joint_names);
    }
}

#[test]
fn static_fixture_gives_gravity_only_accelerations() {
    let model = default_body_model();
    let trace = parse_landmark_trace(fixture("static_stance_30fps.json")).unwrap();
    let cogs = compute_cog_positions(&trace, &model).unwrap();
    let kin = segment_accelerations(&cogs, 1.0 / 30.0, &SavGolSpec::default()).unwrap();
    assert_eq!(kin.valid, 4..56);
    for track in &kin.accelerations {
        assert!(track.iter().all(|a| a.norm() < 1e-9));
    }
}

#[test]
fn knee_force_converges_with_frame_rate() {
    // the squat fixture moves the skeleton rigidly, so every segment
    // shares the analytic acceleration -A w^2 sin(w t)
    let model = default_body_model();
    let knee = model.index_of("LShin").unwrap();
    let shin_mass = 60.0 * model.subtree_mass_ratio(knee);
    let w = std::f64::consts::TAU;
    let mut errors = Vec::new();
    for rate in [30, 60, 120] {
        let trace = parse_landmark_trace(fixture(&format!("squat_{rate}fps.json"))).unwrap();
        let cogs = compute_cog_positions(&trace, &model).unwrap();
        let kin = segment_accelerations(&cogs, 1.0 / rate as f64, &SavGolSpec::default()).unwrap();
        let forces = inverse_dynamics_tree(&kin, &model, 60.0, G).unwrap();
        let worst = kin
            .timestamps
            .iter()
            .zip(&forces.forces[knee])
            .map(|(t, f)| {
                let a = -SQUAT_AMPLITUDE * w * w * (w * t).sin();
                (f.y - shin_mass * (a + G)).abs()
            })
            .fold(0.0, f64::max);
        errors.push(worst);
    }
    assert!(errors[0] > errors[1] && errors[1] > errors[2], "{errors:?}");
}

#[test]
fn too_short_a_trace_is_a_numerical_error() {
    let model = default_body_model();
    let trace = synthetic_trace(30.0, 5, |_, _| Vec3::zeros());
    let cogs = compute_cog_positions(&trace, &model).unwrap();
    let err = segment_accelerations(&cogs, 1.0 / 30.0, &SavGolSpec::default()).unwrap_err();
    assert_eq!(err.kind(), ErrorKind::Numerical);
}

#[test]
fn nonpositive_mass_is_rejected() {
    let model = default_body_model();
    let kin = random_kinematics(&mut ChaCha8Rng::seed_from_u64(14), model.len(), 1);
    for mass in [0.0, -1.0, f64::NAN] {
        let err = inverse_dynamics_tree(&kin, &model, mass, G).unwrap_err();
        assert_eq!(err.kind(), ErrorKind::Validation);
    }
}
