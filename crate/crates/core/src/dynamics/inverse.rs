//! Translational inverse dynamics over the segment tree.
//!
//! For segment `i` with mass `m_i` and CoG acceleration `a_i`, the force
//! transmitted through the joint at its proximal end is
//!
//! ```text
//! f_i = m_i (a_i - g) + sum over children c of f_c
//! ```
//!
//! Terminal segments (hands, feet, head) carry no distal load, so the
//! recursion starts there and runs toward the root. The root's joint force
//! is the net external force on the body.

use std::ops::Range;

use crate::body_model::{BodyModel, SegmentCogTrace};
use crate::error::{Error, Result};
use crate::Vec3;

use super::savgol::{smooth_differentiate, SavGolSpec};

/// Segment CoG accelerations over the frames where the filter window fits.
#[derive(Debug, Clone, PartialEq)]
pub struct KinematicsTrace {
    /// Frame indices of the source trace covered by `accelerations`.
    pub valid: Range<usize>,
    pub timestamps: Vec<f64>,
    /// `[segment][valid frame]`, m/s².
    pub accelerations: Vec<Vec<Vec3>>,
}

/// Force at the proximal joint of every segment, in Newtons.
#[derive(Debug, Clone, PartialEq)]
pub struct JointForceTrace {
    pub valid: Range<usize>,
    pub timestamps: Vec<f64>,
    pub joint_names: Vec<String>,
    /// `[segment][valid frame]`.
    pub forces: Vec<Vec<Vec3>>,
}

impl JointForceTrace {
    pub fn joint(&self, name: &str) -> Option<&[Vec3]> {
        self.joint_names
            .iter()
            .position(|n| n == name)
            .map(|i| self.forces[i].as_slice())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrfTrace {
    pub forces: Vec<Vec3>,
}

pub fn gravity_vector(gravity_magnitude: f64) -> Vec3 {
    Vec3::new(0.0, -gravity_magnitude, 0.0)
}

fn check_physical(subject_mass_kg: f64, gravity_magnitude: f64) -> Result<()> {
    if !(subject_mass_kg.is_finite() && subject_mass_kg > 0.0) {
        return Err(Error::param("subject_mass_kg", "must be positive"));
    }
    if !(gravity_magnitude.is_finite() && gravity_magnitude >= 0.0) {
        return Err(Error::param("gravity_magnitude", "must be non-negative"));
    }
    Ok(())
}

/// Second derivative of every segment CoG track.
pub fn segment_accelerations(
    cogs: &SegmentCogTrace,
    dt: f64,
    spec: &SavGolSpec,
) -> Result<KinematicsTrace> {
    if spec.derivative_order != 2 {
        return Err(Error::InvalidSavGol(format!(
            "accelerations need derivative_order 2, got {}",
            spec.derivative_order
        )));
    }
    let frames = cogs.frame_count();
    if frames < spec.window {
        return Err(Error::EmptyValidRange {
            frames,
            window: spec.window,
        });
    }
    let half = spec.half_width();
    let valid = half..frames - half;
    let accelerations = cogs
        .positions
        .iter()
        .map(|track| smooth_differentiate(track, dt, spec))
        .collect::<Result<Vec<_>>>()?;
    Ok(KinematicsTrace {
        timestamps: cogs.timestamps[valid.clone()].to_vec(),
        valid,
        accelerations,
    })
}

pub fn inverse_dynamics_tree(
    accels: &KinematicsTrace,
    model: &BodyModel,
    subject_mass_kg: f64,
    gravity_magnitude: f64,
) -> Result<JointForceTrace> {
    check_physical(subject_mass_kg, gravity_magnitude)?;
    if accels.accelerations.len() != model.len() {
        return Err(Error::Model(format!(
            "accelerations cover {} segments, model has {}",
            accels.accelerations.len(),
            model.len()
        )));
    }
    let g = gravity_vector(gravity_magnitude);
    let masses: Vec<f64> = model
        .segments()
        .iter()
        .map(|s| s.mass_ratio * subject_mass_kg)
        .collect();
    let frames = accels.valid.len();

    let mut forces = vec![vec![Vec3::zeros(); frames]; model.len()];
    #[allow(clippy::needless_range_loop)] // indexes every segment's track
    for frame in 0..frames {
        for &seg in model.root_first().iter().rev() {
            let mut f = (accels.accelerations[seg][frame] - g) * masses[seg];
            for &child in model.children(seg) {
                f += forces[child][frame];
            }
            forces[seg][frame] = f;
        }
    }

    Ok(JointForceTrace {
        valid: accels.valid.clone(),
        timestamps: accels.timestamps.clone(),
        joint_names: (0..model.len()).map(|i| model.joint_name(i)).collect(),
        forces,
    })
}

/// Whole-body ground reaction force `M (a_com - g)` per frame.
pub fn ground_reaction_force(
    com_accel: &[Vec3],
    subject_mass_kg: f64,
    gravity_magnitude: f64,
) -> Result<GrfTrace> {
    check_physical(subject_mass_kg, gravity_magnitude)?;
    let g = gravity_vector(gravity_magnitude);
    Ok(GrfTrace {
        forces: com_accel.iter().map(|a| (a - g) * subject_mass_kg).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::body_model::{default_body_model, Endpoint, SegmentDef};

    fn chain(masses: &[f64]) -> BodyModel {
        let segs = masses
            .iter()
            .enumerate()
            .map(|(i, &m)| SegmentDef {
                name: format!("S{i}"),
                parent: (i > 0).then(|| format!("S{}", i - 1)),
                mass_ratio: m,
                proximal: Endpoint::Landmark("a".into()),
                distal: Endpoint::Landmark("a".into()),
                cog_ratio: 0.0,
            })
            .collect();
        BodyModel::new(segs).unwrap()
    }

    fn kin(accels: Vec<Vec3>) -> KinematicsTrace {
        KinematicsTrace {
            valid: 0..1,
            timestamps: vec![0.0],
            accelerations: accels.into_iter().map(|a| vec![a]).collect(),
        }
    }

    #[test]
    fn static_terminal_segment_supports_weight() {
        let f = inverse_dynamics_tree(&kin(vec![Vec3::zeros()]), &chain(&[1.0]), 1.0, 9.81).unwrap();
        assert_eq!(f.forces[0][0], Vec3::new(0.0, 9.81, 0.0));
    }

    #[test]
    fn free_fall_is_weightless() {
        let f = inverse_dynamics_tree(&kin(vec![Vec3::new(0.0, -9.81, 0.0)]), &chain(&[1.0]), 1.0, 9.81)
            .unwrap();
        assert_eq!(f.forces[0][0], Vec3::zeros());
    }

    #[test]
    fn two_segment_static_chain() {
        let f = inverse_dynamics_tree(&kin(vec![Vec3::zeros(); 2]), &chain(&[0.5, 0.5]), 2.0, 9.81).unwrap();
        assert!((f.forces[0][0] - Vec3::new(0.0, 19.62, 0.0)).norm() < 1e-12);
        assert_eq!(f.forces[1][0], Vec3::new(0.0, 9.81, 0.0));
        assert_eq!(f.joint_names, ["ground->S0", "S0->S1"]);
    }

    #[test]
    fn default_model_static_subtrees() {
        let model = default_body_model();
        let f = inverse_dynamics_tree(&kin(vec![Vec3::zeros(); model.len()]), &model, 60.0, 9.81).unwrap();
        for seg in 0..model.len() {
            let want = 9.81 * 60.0 * model.subtree_mass_ratio(seg);
            let got = f.forces[seg][0];
            assert!(((got.y - want) / want).abs() < 1e-12);
            assert_eq!((got.x, got.z), (0.0, 0.0));
        }
    }

    #[test]
    fn grf_cases() {
        let grf = ground_reaction_force(&[Vec3::zeros(), Vec3::new(0.0, -9.81, 0.0)], 60.0, 9.81).unwrap();
        assert!((grf.forces[0] - Vec3::new(0.0, 588.6, 0.0)).norm() < 1e-9);
        assert_eq!(grf.forces[1], Vec3::zeros());
        assert!(ground_reaction_force(&[], 0.0, 9.81).is_err());
    }

    #[test]
    fn accelerations_need_second_derivative() {
        let cogs = SegmentCogTrace {
            timestamps: (0..10).map(|k| k as f64).collect(),
            positions: vec![vec![Vec3::zeros(); 10]],
        };
        let spec = SavGolSpec::new(9, 3, 1).unwrap();
        assert!(segment_accelerations(&cogs, 1.0, &spec).is_err());
        let short = SegmentCogTrace {
            timestamps: vec![0.0; 5],
            positions: vec![vec![Vec3::zeros(); 5]],
        };
        assert!(matches!(
            segment_accelerations(&short, 1.0, &SavGolSpec::default()),
            Err(Error::EmptyValidRange { frames: 5, window: 9 })
        ));
        let k = segment_accelerations(&cogs, 1.0, &SavGolSpec::default()).unwrap();
        assert_eq!(k.valid, 4..6);
        assert_eq!(k.timestamps, [4.0, 5.0]);
    }
}
