//! Part-guided 6-DoF grasp synthesis for parallel-jaw grippers.
//!
//! Grasp poses are sampled by annealed Langevin dynamics on SE(3) over an
//! energy field conditioned on an object point cloud. Each step is guided by
//! the larger of the energies against the whole object and against a target
//! part, which keeps candidates on the part while staying valid for the
//! object. Single-arm planning keeps the lowest-energy candidate; dual-arm
//! planning splits the target into two regions, samples per arm, filters by
//! energy, rejects colliding pairs and pairs without force closure, and
//! picks the most widely separated survivor.
//!
//! The crate is `no_std` with `alloc`. The `std` feature adds `std::error`
//! integration and `parallel` evaluates candidates on a rayon pool with
//! results identical to serial execution.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod cloud;
pub mod collision;
pub mod diffusion;
pub mod dual;
pub mod energy;
pub mod error;
pub mod gripper;
pub mod hull;
pub mod math;
pub mod metrics;
pub mod objects;
pub mod scene;
pub mod se3;
pub mod single;
pub mod wrench;

pub use cloud::{estimate_normals, farthest_point_sample, knn, pca_major_axis, PointCloud};
pub use collision::{extract_contacts, gripper_gripper_collision, gripper_object_collision, Contact};
pub use diffusion::{guided_energy, guided_score, sample_grasps, Branch, GraspCandidate, SamplerConfig};
pub use dual::{
    filter_candidates, plan_dual, plan_dual_regions, select_pair, DualConfig, DualPlan, GraspPair, SurvivorCounts,
};
pub use energy::{
    default_schedule, make_schedule, surrogate_energy, surrogate_score, EnergyField, EnergyWeights, NoiseSchedule,
    SurrogateEnergy,
};
pub use error::{Error, Result};
pub use gripper::{Arm, GripperModel};
pub use math::Vec3;
pub use metrics::{compute_metrics, MetricsConfig, MetricsRow, TrialResult};
pub use objects::{gen_object, ObjectKind};
pub use scene::{
    baseline_fps_knn_regions, determine_target_regions, geometric_split, ground_target, GroundingResult, Mode,
    ModeHint, SceneDescription, TargetRegions,
};
pub use se3::{se3_exp, se3_log, Pose, Quat, Twist};
pub use single::{plan_single, SinglePlan};
pub use wrench::force_closure_epsilon;
