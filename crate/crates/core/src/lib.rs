//! Edge-consistency perturbation detection pipeline.
//!
//! The library is organized around a small multi-task network (depth +
//! semantic segmentation) evaluated on procedurally generated scenes:
//!
//! - [`arraycore`]: dense image/depth/segmentation containers, seeded RNG,
//!   and bit-exact file I/O.
//! - [`edgeops`]: per-modality edge extraction (forward differences).
//! - [`similarity`]: SSIM in a differentiable 3x3-patch form and a global
//!   windowed detector form, plus an MAE ablation metric.
//! - [`synthscenes`]: deterministic synthetic scene generator.
//! - [`toymodel`]: the trainable network with hand-derived backprop, task
//!   losses, and the edge-consistency loss.
//! - [`perturb`]: random noises and white-box attacks (FGSM/BIM/PGD).
//! - [`detector`]: consistency scoring, FPR-targeted threshold calibration,
//!   and majority-vote detection.
//! - [`evalharness`]: task metrics, ROC/TPR machinery, and sweep
//!   orchestration with CSV emission.
//! - [`selfcheck`]: finite-difference gradient certification and brute-force
//!   metric oracles, runnable at runtime.

pub mod arraycore;
pub mod detector;
pub mod edgeops;
pub mod evalharness;
pub mod perturb;
pub mod selfcheck;
pub mod similarity;
pub mod synthscenes;
pub mod toymodel;
