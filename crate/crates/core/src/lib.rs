//! Generalised Morrey spaces `M_{φ,p}` and Besov-type Morrey sequence spaces.
//!
//! The crate covers admissibility of weight functions `φ`, exact dyadic norms,
//! extremal families, embedding criteria and growth-envelope classification.

// `!(x > 0.0)` guards are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classifier;
pub mod constructions;
pub mod envelope;
pub mod error;
pub mod ext;
pub mod morrey;
pub mod phi;
pub mod rearrangement;
pub mod seq_decide;
pub mod seq_space;

pub use classifier::{
    classify_morrey_envelope, classify_nb_envelope, delta_in_nb, morrey_embedding, morrey_linfty,
    morrey_nontrivial, nb_embedding, nb_l1loc, nb_linfty, EmbeddingVerdict, EnvelopeClass, EnvelopeKind,
    Form, L1Loc, SpaceParams,
};
pub use constructions::{
    build_case3_family, build_case4_family, build_flat_family, build_infinite_witness, gap_positions,
    lattice_flat_norm, lattice_gap, spread_simple_function, GapRule, SpreadLevel, SpreadPlan,
};
pub use envelope::{
    envelope_index_functional, envelope_index_functional_log, estimate_morrey_envelope, export_csv,
    staircase_steps, write_csv, EnvelopeEstimate, FamilyMember, LogStep,
};
pub use error::{Error, Result};
pub use ext::ExtReal;
pub use morrey::{cube_term, morrey_lower_bound, morrey_norm_dyadic};
pub use phi::{
    check_gp, phi_asymptotics, phi_eval, phi_inverse, Asymptotics, ExpPair, GpReport, GpViolation, PhiSpec,
    Segment, ViolationKind,
};
pub use rearrangement::{
    distribution, lp_norm, ratio_to_f64, rearrange, Cube, DyadicCube, GeneralCube, Mode, Part,
    SimpleFunction, Step, StepRearrangement,
};
pub use seq_decide::{conjugate, lq_membership, lq_partial_norm, q_star, Membership, SeqAsym};
pub use seq_space::{n_norm, CoeffArray};
