//! Synthetic vital-sign streams and the transmit decision.
//!
//! Each (patient, sensor kind) pair owns an independent bounded random walk
//! seeded from the run seed, so two runs with the same configuration produce
//! identical readings regardless of what the network does with them.
//!
//! Threshold kinds (temperature, glucose) walk inside their critical band and
//! jump strictly outside it with a configurable per-round excursion
//! probability; continuous kinds simply walk within their plausible range.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::types::{SensorKind, PATIENT_COUNT, SENSORS_PER_PATIENT};

/// Critical band for a threshold-driven sensor. Values strictly below `low`
/// or strictly above `high` trigger a transmission; the bounds themselves do
/// not.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdBand {
    pub low: f64,
    pub high: f64,
}

impl ThresholdBand {
    pub fn validate(&self, kind: SensorKind) -> Result<(), ConfigError> {
        if self.low < self.high {
            Ok(())
        } else {
            Err(ConfigError::InvalidBand {
                kind: kind.name().to_string(),
                low: self.low,
                high: self.high,
            })
        }
    }
}

/// Threshold bands for the two threshold-driven kinds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bands {
    pub temperature: ThresholdBand,
    pub glucose: ThresholdBand,
}

impl Default for Bands {
    fn default() -> Self {
        Bands {
            temperature: ThresholdBand { low: 35.0, high: 40.0 },
            glucose: ThresholdBand { low: 110.0, high: 125.0 },
        }
    }
}

impl Bands {
    /// Band for a threshold kind; None for continuous kinds.
    pub fn for_kind(&self, kind: SensorKind) -> Option<&ThresholdBand> {
        match kind {
            SensorKind::Temperature => Some(&self.temperature),
            SensorKind::Glucose => Some(&self.glucose),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.temperature.validate(SensorKind::Temperature)?;
        self.glucose.validate(SensorKind::Glucose)
    }
}

/// One sampled vital-sign value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reading {
    pub kind: SensorKind,
    pub value: f64,
    pub round: u64,
}

/// Random-walk parameters for one sensor kind.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignalModel {
    /// Starting value of the walk.
    pub mean: f64,
    /// Standard deviation of the per-round Gaussian step.
    pub step: f64,
    /// Hard clamp range; every sample stays inside it.
    pub clamp: (f64, f64),
    /// Per-round probability that a threshold kind jumps strictly outside its
    /// band (ignored for continuous kinds).
    pub excursion_prob: f64,
}

/// Per-kind signal models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VitalsConfig {
    pub models: [SignalModel; SENSORS_PER_PATIENT],
}

impl VitalsConfig {
    pub fn model(&self, kind: SensorKind) -> &SignalModel {
        &self.models[kind.index()]
    }

    pub fn model_mut(&mut self, kind: SensorKind) -> &mut SignalModel {
        &mut self.models[kind.index()]
    }
}

impl Default for VitalsConfig {
    fn default() -> Self {
        // Excursion probability 0.1 makes threshold sensors fire in roughly
        // a tenth of rounds.
        let m = |mean, step, lo, hi, exc| SignalModel {
            mean,
            step,
            clamp: (lo, hi),
            excursion_prob: exc,
        };
        VitalsConfig {
            models: [
                m(1.0, 0.05, 0.5, 1.5, 0.0),      // ecg envelope, mV
                m(75.0, 1.5, 50.0, 120.0, 0.0),   // pulse rate, bpm
                m(72.0, 1.2, 45.0, 130.0, 0.0),   // heart rate, bpm
                m(37.0, 0.08, 34.0, 42.0, 0.10),  // temperature, C
                m(117.0, 0.8, 100.0, 135.0, 0.10), // glucose, mg/dL
                m(4.0, 0.15, 0.0, 10.0, 0.0),     // toxins, ppm
                m(0.3, 0.05, 0.0, 2.0, 0.0),      // motion, g
            ],
        }
    }
}

/// Whether a reading triggers a transmission.
///
/// Continuous kinds always transmit. Threshold kinds transmit only when the
/// value falls strictly below the band's low bound or rises strictly above
/// its high bound; a value exactly on a bound does not fire.
pub fn should_transmit(reading: &Reading, band: Option<&ThresholdBand>) -> Result<bool, ConfigError> {
    match (reading.kind.is_threshold(), band) {
        (false, None) => Ok(true),
        (false, Some(_)) => Err(ConfigError::UnexpectedBand(reading.kind.name().to_string())),
        (true, None) => Err(ConfigError::MissingBand(reading.kind.name().to_string())),
        (true, Some(band)) => Ok(reading.value < band.low || reading.value > band.high),
    }
}

/// State of one (patient, kind) walk.
struct WalkState {
    value: f64,
    rng: ChaCha8Rng,
}

/// Deterministic per-stream seed derived from (run seed, patient, kind).
fn stream_seed(run_seed: u64, patient: usize, kind: SensorKind) -> [u8; 32] {
    let mut seed = [0u8; 32];
    seed[..8].copy_from_slice(&run_seed.to_le_bytes());
    seed[8] = patient as u8;
    seed[9] = kind.index() as u8;
    seed[10..16].copy_from_slice(b"vitals");
    seed
}

/// All vital-sign walks for a ward, advanced once per round.
pub struct VitalStreams {
    config: VitalsConfig,
    bands: Bands,
    states: Vec<WalkState>,
    round: u64,
}

impl VitalStreams {
    pub fn new(run_seed: u64, config: VitalsConfig, bands: Bands) -> Self {
        let mut states = Vec::with_capacity(PATIENT_COUNT * SENSORS_PER_PATIENT);
        for patient in 0..PATIENT_COUNT {
            for kind in SensorKind::ALL {
                let model = config.model(kind);
                states.push(WalkState {
                    value: model.mean,
                    rng: ChaCha8Rng::from_seed(stream_seed(run_seed, patient, kind)),
                });
            }
        }
        VitalStreams {
            config,
            bands,
            states,
            round: 0,
        }
    }

    /// Advance every stream by one round and return all readings in
    /// (patient-major, polling-order) layout.
    pub fn advance_round(&mut self, round: u64) -> Vec<Reading> {
        self.round = round;
        let mut readings = Vec::with_capacity(self.states.len());
        for patient in 0..PATIENT_COUNT {
            for kind in SensorKind::ALL {
                let idx = patient * SENSORS_PER_PATIENT + kind.index();
                let model = self.config.models[kind.index()];
                let band = self.bands.for_kind(kind).copied();
                let state = &mut self.states[idx];
                let value = sample_step(state, &model, band.as_ref(), kind);
                readings.push(Reading { kind, value, round });
            }
        }
        readings
    }

    pub fn bands(&self) -> &Bands {
        &self.bands
    }
}

/// Draw the next value for one walk.
///
/// Threshold kinds: with probability `excursion_prob` the value jumps
/// uniformly into the region strictly outside the band (but inside the
/// clamp); otherwise the walk steps and is clamped back inside the band.
/// Continuous kinds walk within the clamp range.
fn sample_step(
    state: &mut WalkState,
    model: &SignalModel,
    band: Option<&ThresholdBand>,
    kind: SensorKind,
) -> f64 {
    let rng = &mut state.rng;
    if kind.is_threshold() {
        let band = band.expect("threshold kind without band");
        let excursion: f64 = rng.random();
        if excursion < model.excursion_prob {
            // (0, 1] so the drawn value is strictly outside the band.
            let f = 1.0 - rng.random::<f64>();
            let above: bool = rng.random();
            state.value = if above && model.clamp.1 > band.high {
                band.high + f * (model.clamp.1 - band.high)
            } else if model.clamp.0 < band.low {
                band.low - f * (band.low - model.clamp.0)
            } else {
                band.high + f * (model.clamp.1 - band.high)
            };
        } else {
            let step = Normal::new(0.0, model.step).unwrap().sample(rng);
            state.value = (state.value + step).clamp(band.low, band.high);
        }
    } else {
        let step = Normal::new(0.0, model.step).unwrap().sample(rng);
        state.value = (state.value + step).clamp(model.clamp.0, model.clamp.1);
    }
    state.value
}
