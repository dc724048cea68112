//! Exact and Monte-Carlo computation of the tree-isomorphism quantities:
//! extinction probability, tree probabilities, `γ_λ`, `α_λ`, `g_r`, `𝔭_r`,
//! `𝔭_{r,L}`, the threshold depth and the decay diagnostics.

mod decay;
mod exact;
mod mc;

pub use decay::{decay_diagnostics, DecayRow, DecayTable};
pub use exact::{
    alpha, class_probs, enumerate_tree_classes, extinction_q, gamma_series, p1_closed_form, prob_a_exact, threshold_r,
    tree_prob, SeriesEstimate, TreeClass,
};
pub use mc::{
    depth_profile_conditional, g_r_conditional, g_r_mc, gamma_mc, p_r_conditional, p_r_l_conditional, p_r_l_mc,
    p_r_mc, prob_a_mc, DepthProfile, McConfig, McEstimate, Moments, SpineProfile,
};
