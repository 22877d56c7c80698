//! Domain types and ward geometry shared by every other module.
//!
//! Positions live in the ward coordinate frame: a 40 x 20 ft rectangle with
//! the origin at a corner. Distances are Euclidean and stay in feet; the
//! radio model consumes them directly without unit conversion.

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;

/// Ward width in feet (x axis).
pub const WARD_WIDTH: f64 = 40.0;
/// Ward depth in feet (y axis).
pub const WARD_HEIGHT: f64 = 20.0;

/// Number of patients in the ward.
pub const PATIENT_COUNT: usize = 8;
/// Body sensors per patient.
pub const SENSORS_PER_PATIENT: usize = 7;

/// A point in the ward coordinate frame, in feet.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub const fn new(x: f64, y: f64) -> Self {
        Position { x, y }
    }

    /// True when the point lies inside or on the ward boundary.
    pub fn in_ward(&self) -> bool {
        self.x >= 0.0 && self.x <= WARD_WIDTH && self.y >= 0.0 && self.y <= WARD_HEIGHT
    }
}

/// Euclidean distance between two ward positions, in feet.
pub fn distance(a: Position, b: Position) -> f64 {
    let dx = a.x - b.x;
    let dy = a.y - b.y;
    (dx * dx + dy * dy).sqrt()
}

/// The seven vital-sign sensors carried by each patient, in polling order.
///
/// Temperature and glucose are threshold-driven (they transmit only on an
/// excursion outside their critical band); the other five report every round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SensorKind {
    Ecg,
    PulseRate,
    HeartRate,
    Temperature,
    Glucose,
    Toxins,
    Motion,
}

impl SensorKind {
    /// All kinds in the fixed per-patient polling order.
    pub const ALL: [SensorKind; SENSORS_PER_PATIENT] = [
        SensorKind::Ecg,
        SensorKind::PulseRate,
        SensorKind::HeartRate,
        SensorKind::Temperature,
        SensorKind::Glucose,
        SensorKind::Toxins,
        SensorKind::Motion,
    ];

    /// Index of this kind within [`SensorKind::ALL`].
    pub fn index(self) -> usize {
        Self::ALL.iter().position(|k| *k == self).unwrap()
    }

    /// Threshold-driven kinds transmit only outside their critical band.
    pub fn is_threshold(self) -> bool {
        matches!(self, SensorKind::Temperature | SensorKind::Glucose)
    }

    pub fn name(self) -> &'static str {
        match self {
            SensorKind::Ecg => "ecg",
            SensorKind::PulseRate => "pulse_rate",
            SensorKind::HeartRate => "heart_rate",
            SensorKind::Temperature => "temperature",
            SensorKind::Glucose => "glucose",
            SensorKind::Toxins => "toxins",
            SensorKind::Motion => "motion",
        }
    }
}

/// Role of a node in the ward network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NodeRole {
    /// Energy-constrained on-body sensor measuring one vital sign.
    BodySensor(SensorKind),
    /// Chest-mounted relay that aggregates its patient's sensor packets.
    BodyRelay,
    /// Bed-mounted forwarding device with effectively unlimited energy.
    MainSensor,
    /// Data destination bridging the ward to the external network.
    Sink,
}

impl NodeRole {
    /// Sinks and main sensors are never debited and never die.
    pub fn unlimited_energy(self) -> bool {
        matches!(self, NodeRole::MainSensor | NodeRole::Sink)
    }
}

/// Stable node identifier, unique within one topology.
pub type NodeId = u32;

/// A network node: on-body sensor, relay, main sensor or sink.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    /// Patient index 0..7 for on-body nodes and main sensors; None for sinks.
    pub patient: Option<usize>,
    pub role: NodeRole,
    pub position: Position,
    /// Joules remaining. Not decremented for unlimited-energy roles.
    pub energy: f64,
    pub initial_energy: f64,
    pub alive: bool,
}

impl Node {
    pub fn new(
        id: NodeId,
        patient: Option<usize>,
        role: NodeRole,
        position: Position,
        initial_energy: f64,
    ) -> Self {
        Node {
            id,
            patient,
            role,
            position,
            energy: initial_energy,
            initial_energy,
            alive: true,
        }
    }
}

/// What a packet carries: one vital-sign reading or a relay's fused batch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PayloadKind {
    Vital(SensorKind),
    Aggregate,
}

/// A fixed-size data unit tracked from source to sink.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Packet {
    pub source: NodeId,
    pub origin_patient: usize,
    /// Payload size in bits; every packet in a run uses the configured size.
    pub size_bits: u32,
    pub round: u64,
    /// Node ids traversed so far, beginning with the source.
    pub hops: Vec<NodeId>,
    pub payload_kind: PayloadKind,
}

impl Packet {
    pub fn new(
        source: NodeId,
        origin_patient: usize,
        size_bits: u32,
        round: u64,
        payload_kind: PayloadKind,
    ) -> Self {
        Packet {
            source,
            origin_patient,
            size_bits,
            round,
            hops: vec![source],
            payload_kind,
        }
    }
}

/// Id of the sink nearest to `p`, ties broken by the lowest sink index.
///
/// `sinks` must yield the candidate sinks in index order.
pub fn nearest_sink<'a, I>(p: Position, sinks: I) -> Result<NodeId, ConfigError>
where
    I: IntoIterator<Item = &'a Node>,
{
    let mut best: Option<(NodeId, f64)> = None;
    for sink in sinks {
        let d = distance(p, sink.position);
        match best {
            Some((_, bd)) if d >= bd => {}
            _ => best = Some((sink.id, d)),
        }
    }
    best.map(|(id, _)| id).ok_or(ConfigError::NoSinks)
}
