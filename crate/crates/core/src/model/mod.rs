//! Analytic two-photon interference: homogeneous and inhomogeneous
//! broadening, wave packets, and visibility conventions.

mod coherence;
mod homogeneous;
mod inhomogeneous;
mod kernel;
mod params;
mod wavepacket;

pub use coherence::{
    coherence_integral, michelson_contrast, sigma_from_coherence, visibility_from_g2,
    FineStructureLines, VisibilityEstimate,
};
pub use homogeneous::{
    central_peak_area_hom, central_peak_area_hom_quadrature, coherence_time, dephasing_time,
    g2_hom_peak, visibility_hom,
};
pub use inhomogeneous::{
    delta_distribution, opposite_port_probability_quadrature, p_inhom, p_inhom_quadrature,
    solve_sigma_g, visibility_inhom_closed, visibility_inhom_direct, visibility_inhom_quadrature,
    VisibilityConvention,
};
pub(crate) use kernel::interval_weight;
pub use kernel::{laplace_gauss, InterferenceKernel};
pub use params::{EmitterParams, PairSpec, UEV_TO_RAD_PER_NS};
pub use wavepacket::{g2_tl, PairMember, PhotonWavePacket};
