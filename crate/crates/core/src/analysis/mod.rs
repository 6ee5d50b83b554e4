//! Extraction of physical quantities from histograms and measured curves.

mod fits;
mod nlls;
mod peaks;

pub use fits::{
    fit_exponential_decay, fit_exponential_decay_weighted, fit_hom_dip, fit_hom_dip_weighted,
    fit_michelson, fit_michelson_weighted, hom_dip_model,
};
pub use nlls::{nlls, Data, FitResult, NllsOptions};
pub use peaks::{default_window, peak_areas, peak_areas_with, PeakAreaOptions, PeakAreaReport};
