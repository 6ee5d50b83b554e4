//! Where photons of one repetition can arrive at the final beam splitter.

use super::scenario::{InterferenceScenario, Mode};

/// One route of a photon to the final beam splitter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Arrival {
    /// Nominal onset of the wave packet relative to the repetition start (ns).
    pub delay: f64,
    pub input: u8,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Photon {
    /// Probability that the photon is emitted at all in a repetition.
    pub presence: f64,
    /// Alternative routes; weights sum to one.
    pub arrivals: Vec<Arrival>,
}

impl Photon {
    fn certain(arrivals: Vec<Arrival>) -> Self {
        Self {
            presence: 1.0,
            arrivals,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Layout {
    pub photons: Vec<Photon>,
}

impl Layout {
    pub fn for_scenario(s: &InterferenceScenario) -> Self {
        let dt = s.pair.delta_tau;
        let photons = match s.mode {
            Mode::DoublePulseSameEmitter => {
                let long = s.long_arm();
                let routes = |emitted: f64| {
                    vec![
                        Arrival {
                            delay: emitted,
                            input: 0,
                            weight: 0.5,
                        },
                        Arrival {
                            delay: emitted + long,
                            input: 1,
                            weight: 0.5,
                        },
                    ]
                };
                vec![
                    Photon::certain(routes(0.0)),
                    Photon::certain(routes(s.intra_delay)),
                ]
            }
            _ => vec![
                Photon::certain(vec![Arrival {
                    delay: 0.5 * dt,
                    input: 0,
                    weight: 1.0,
                }]),
                Photon::certain(vec![Arrival {
                    delay: -0.5 * dt,
                    input: 1,
                    weight: 1.0,
                }]),
            ],
        };
        Self { photons }
    }

    /// A single input port with an optional second photon, as in an
    /// autocorrelation measurement.
    pub fn hbt(multi_photon_prob: f64) -> Self {
        let arrival = vec![Arrival {
            delay: 0.0,
            input: 0,
            weight: 1.0,
        }];
        Self {
            photons: vec![
                Photon::certain(arrival.clone()),
                Photon {
                    presence: multi_photon_prob,
                    arrivals: arrival,
                },
            ],
        }
    }

    /// Expected number of photons per repetition.
    pub fn mean_photons(&self) -> f64 {
        self.photons.iter().map(|p| p.presence).sum()
    }

    /// Every ordered pair of routes of two distinct photons with its joint
    /// probability.
    pub fn route_pairs(&self) -> impl Iterator<Item = (usize, Arrival, usize, Arrival, f64)> + '_ {
        self.photons.iter().enumerate().flat_map(move |(i, pi)| {
            self.photons
                .iter()
                .enumerate()
                .filter(move |(j, _)| *j != i)
                .flat_map(move |(j, pj)| {
                    pi.arrivals.iter().flat_map(move |a| {
                        pj.arrivals.iter().map(move |b| {
                            (
                                i,
                                *a,
                                j,
                                *b,
                                pi.presence * pj.presence * a.weight * b.weight,
                            )
                        })
                    })
                })
        })
    }
}
