//! Ward topology construction and per-round sink placement.
//!
//! Five stock scenarios share one bed layout and differ only in how data
//! leaves the relays:
//!
//! 1. one static sink at the ward center
//! 2. four static sinks at the wall midpoints
//! 3. one static center sink plus a bed-mounted main sensor per patient
//! 4. one sink oscillating along the ward's center line
//! 5. the four wall sinks circling the ward perimeter together
//!
//! Mobile trajectories advance a fixed number of feet per round: the center
//! line sink reflects at the side walls (wrap-around is available via the
//! layout override), the perimeter sinks move clockwise and keep their
//! initial arc spacing forever.

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::types::{
    Node, NodeId, NodeRole, Packet, Position, SensorKind, PATIENT_COUNT, SENSORS_PER_PATIENT,
    WARD_HEIGHT, WARD_WIDTH,
};

/// Initial energy for body sensors, joules.
pub const BS_INITIAL_ENERGY: f64 = 0.3;
/// Initial energy for body relays, joules.
pub const BR_INITIAL_ENERGY: f64 = 1.0;

/// Ward center, where the single-sink scenarios place their sink.
pub const WARD_CENTER: Position = Position::new(WARD_WIDTH / 2.0, WARD_HEIGHT / 2.0);

/// Perimeter length of the ward rectangle.
const PERIMETER: f64 = 2.0 * (WARD_WIDTH + WARD_HEIGHT);

/// The four wall sink positions used by scenarios 2 and 5.
pub const WALL_SINKS: [Position; 4] = [
    Position::new(0.0, 10.0),
    Position::new(20.0, 20.0),
    Position::new(40.0, 10.0),
    Position::new(20.0, 0.0),
];

/// How a sink moves between rounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Mobility {
    Static,
    /// Oscillates along the y = 10 center line, reflecting at the side walls
    /// (or wrapping when configured), at `speed` feet per round.
    CenterLine { speed: f64, wrap: bool },
    /// Advances clockwise along the ward boundary at `speed` feet per round.
    Perimeter { speed: f64 },
}

/// One sink's starting point and motion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SinkSpec {
    pub initial: Position,
    pub mobility: Mobility,
}

impl SinkSpec {
    fn validate(&self) -> Result<(), ConfigError> {
        match self.mobility {
            Mobility::Static => Ok(()),
            Mobility::CenterLine { speed, .. } | Mobility::Perimeter { speed } => {
                if speed > 0.0 {
                    Ok(())
                } else {
                    Err(ConfigError::InvalidSpeed(speed))
                }
            }
        }
    }
}

/// Bed anchors, on-body offsets and sink speeds; everything overridable from
/// a layout file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WardLayout {
    /// One anchor per bed; the relay sits here (patient's chest).
    pub bed_anchors: Vec<(f64, f64)>,
    /// Per-kind sensor offsets from the bed anchor, polling order.
    pub bs_offsets: Vec<(f64, f64)>,
    /// Relay offset from the bed anchor.
    pub br_offset: (f64, f64),
    /// Main-sensor offset from the bed anchor (scenario 3).
    pub ms_offset: (f64, f64),
    /// Feet per round for the scenario 4 center-line sink.
    pub center_speed: f64,
    /// Feet per round for the scenario 5 perimeter sinks.
    pub perimeter_speed: f64,
    /// Wrap the center-line sink around instead of reflecting.
    pub center_wrap: bool,
}

impl Default for WardLayout {
    fn default() -> Self {
        // Beds line the right side of the ward in two wall-adjacent rows,
        // leaving the left half as the working corridor. The arrangement is
        // deliberately asymmetric about the ward center: it keeps the four
        // wall sinks and the mobile trajectories from degenerating into the
        // same effective distances, so the scenarios remain distinguishable.
        WardLayout {
            bed_anchors: vec![
                (29.0, 2.0),
                (32.0, 2.0),
                (35.0, 2.0),
                (38.0, 2.0),
                (29.0, 18.0),
                (32.0, 18.0),
                (35.0, 18.0),
                (38.0, 18.0),
            ],
            // head, left wrist, chest, forehead, right wrist, left ankle,
            // right ankle -- all within 1.5 ft of the chest relay
            bs_offsets: vec![
                (0.2, 0.8),   // ecg
                (-1.0, 0.1),  // pulse rate
                (0.1, 0.4),   // heart rate
                (0.0, 1.2),   // temperature
                (1.0, 0.1),   // glucose
                (-0.4, -1.0), // toxins
                (0.5, -1.2),  // motion
            ],
            br_offset: (0.0, 0.0),
            // The bedside forwarding station sits across the aisle from the
            // bed rather than on the mattress; scenario 3 trades distance on
            // the relay hop for an extra hop of delay.
            ms_offset: (-10.5, 0.0),
            center_speed: 1.0,
            perimeter_speed: 1.0,
            center_wrap: false,
        }
    }
}

impl WardLayout {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.bed_anchors.len() != PATIENT_COUNT {
            return Err(ConfigError::BadBedCount(self.bed_anchors.len()));
        }
        if self.bs_offsets.len() != SENSORS_PER_PATIENT {
            return Err(ConfigError::BadOffsetCount(self.bs_offsets.len()));
        }
        if self.center_speed <= 0.0 {
            return Err(ConfigError::InvalidSpeed(self.center_speed));
        }
        if self.perimeter_speed <= 0.0 {
            return Err(ConfigError::InvalidSpeed(self.perimeter_speed));
        }
        for &(ax, ay) in &self.bed_anchors {
            let anchor = Position::new(ax, ay);
            for &(dx, dy) in self
                .bs_offsets
                .iter()
                .chain([&self.br_offset, &self.ms_offset])
            {
                let p = Position::new(anchor.x + dx, anchor.y + dy);
                if !p.in_ward() {
                    return Err(ConfigError::OutOfWard { x: p.x, y: p.y });
                }
            }
        }
        Ok(())
    }

    fn offset_position(&self, bed: usize, offset: (f64, f64)) -> Position {
        let (ax, ay) = self.bed_anchors[bed];
        Position::new(ax + offset.0, ay + offset.1)
    }
}

/// A fully-resolved topology: bed geometry plus sink placement and mobility
/// for one of the five scenarios.
#[derive(Debug, Clone, PartialEq)]
pub struct WardScenario {
    pub id: u8,
    pub layout: WardLayout,
    pub sinks: Vec<SinkSpec>,
    pub uses_main_sensor: bool,
}

/// Instantiate one of the five stock scenarios over a bed layout.
pub fn build_scenario(id: u8, layout: Option<WardLayout>) -> Result<WardScenario, ConfigError> {
    let layout = layout.unwrap_or_default();
    layout.validate()?;
    let sinks = match id {
        1 | 3 => vec![SinkSpec {
            initial: WARD_CENTER,
            mobility: Mobility::Static,
        }],
        2 => WALL_SINKS
            .iter()
            .map(|&p| SinkSpec {
                initial: p,
                mobility: Mobility::Static,
            })
            .collect(),
        4 => vec![SinkSpec {
            initial: WARD_CENTER,
            mobility: Mobility::CenterLine {
                speed: layout.center_speed,
                wrap: layout.center_wrap,
            },
        }],
        5 => WALL_SINKS
            .iter()
            .map(|&p| SinkSpec {
                initial: p,
                mobility: Mobility::Perimeter {
                    speed: layout.perimeter_speed,
                },
            })
            .collect(),
        other => return Err(ConfigError::UnknownScenario(other)),
    };
    for sink in &sinks {
        sink.validate()?;
    }
    Ok(WardScenario {
        id,
        layout,
        sinks,
        uses_main_sensor: id == 3,
    })
}

/// Sink positions at a given round index (round 0 = initial placement).
pub fn sink_positions(scenario: &WardScenario, round: u64) -> Vec<Position> {
    scenario
        .sinks
        .iter()
        .map(|spec| sink_position(spec, round))
        .collect()
}

fn sink_position(spec: &SinkSpec, round: u64) -> Position {
    match spec.mobility {
        Mobility::Static => spec.initial,
        Mobility::CenterLine { speed, wrap } => {
            let travelled = spec.initial.x + speed * round as f64;
            let x = if wrap {
                travelled.rem_euclid(WARD_WIDTH)
            } else {
                // triangle wave over [0, WARD_WIDTH], initial direction +x
                let phase = travelled.rem_euclid(2.0 * WARD_WIDTH);
                if phase <= WARD_WIDTH {
                    phase
                } else {
                    2.0 * WARD_WIDTH - phase
                }
            };
            Position::new(x, WARD_HEIGHT / 2.0)
        }
        Mobility::Perimeter { speed } => {
            let arc = (perimeter_arc(spec.initial) + speed * round as f64).rem_euclid(PERIMETER);
            perimeter_point(arc)
        }
    }
}

/// Arc length of a boundary point, measured clockwise from (0, 10) going up
/// the left wall.
fn perimeter_arc(p: Position) -> f64 {
    if p.x == 0.0 && p.y >= 10.0 {
        p.y - 10.0
    } else if p.y == WARD_HEIGHT {
        10.0 + p.x
    } else if p.x == WARD_WIDTH {
        10.0 + WARD_WIDTH + (WARD_HEIGHT - p.y)
    } else if p.y == 0.0 {
        10.0 + WARD_WIDTH + WARD_HEIGHT + (WARD_WIDTH - p.x)
    } else {
        // left wall below the start point
        PERIMETER - (10.0 - p.y)
    }
}

/// Boundary point at clockwise arc length `arc` from (0, 10).
fn perimeter_point(arc: f64) -> Position {
    let arc = arc.rem_euclid(PERIMETER);
    if arc <= 10.0 {
        Position::new(0.0, 10.0 + arc)
    } else if arc <= 10.0 + WARD_WIDTH {
        Position::new(arc - 10.0, WARD_HEIGHT)
    } else if arc <= 10.0 + WARD_WIDTH + WARD_HEIGHT {
        Position::new(WARD_WIDTH, WARD_HEIGHT - (arc - 10.0 - WARD_WIDTH))
    } else if arc <= 10.0 + 2.0 * WARD_WIDTH + WARD_HEIGHT {
        Position::new(WARD_WIDTH - (arc - 10.0 - WARD_WIDTH - WARD_HEIGHT), 0.0)
    } else {
        Position::new(0.0, arc - 10.0 - 2.0 * WARD_WIDTH - WARD_HEIGHT)
    }
}

/// Node id layout: body nodes pack 8 per patient (7 sensors + relay),
/// main sensors and sinks follow.
pub fn body_sensor_id(patient: usize, kind: SensorKind) -> NodeId {
    (patient * 8 + kind.index()) as NodeId
}

pub fn body_relay_id(patient: usize) -> NodeId {
    (patient * 8 + SENSORS_PER_PATIENT) as NodeId
}

pub fn main_sensor_id(patient: usize) -> NodeId {
    (PATIENT_COUNT * 8 + patient) as NodeId
}

pub fn sink_id(index: usize) -> NodeId {
    (PATIENT_COUNT * 8 + PATIENT_COUNT + index) as NodeId
}

/// One patient's node ids, polling order.
#[derive(Debug, Clone, PartialEq)]
pub struct PatientGroup {
    pub sensors: Vec<NodeId>,
    /// None under the baseline protocol (no relays).
    pub relay: Option<NodeId>,
    /// Present only when the scenario deploys main sensors.
    pub main_sensor: Option<NodeId>,
}

/// A materialized network: nodes plus the patient/sink index structure.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    pub nodes: Vec<Node>,
    pub patients: Vec<PatientGroup>,
    pub sink_ids: Vec<NodeId>,
}

impl Network {
    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id as usize]
    }

    pub fn node_mut(&mut self, id: NodeId) -> &mut Node {
        &mut self.nodes[id as usize]
    }

    /// Sink nodes in index order (tie-break order for nearest-sink).
    pub fn sinks(&self) -> impl Iterator<Item = &Node> {
        self.sink_ids.iter().map(|id| &self.nodes[*id as usize])
    }

    pub fn alive_body_sensors(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n.role, NodeRole::BodySensor(_)) && n.alive)
            .count()
    }

    pub fn alive_body_nodes(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| {
                matches!(n.role, NodeRole::BodySensor(_) | NodeRole::BodyRelay) && n.alive
            })
            .count()
    }

    pub fn residual_bs_energy(&self) -> f64 {
        self.nodes
            .iter()
            .filter(|n| matches!(n.role, NodeRole::BodySensor(_)))
            .map(|n| n.energy)
            .sum()
    }

    pub fn residual_body_energy(&self) -> f64 {
        self.nodes
            .iter()
            .filter(|n| matches!(n.role, NodeRole::BodySensor(_) | NodeRole::BodyRelay))
            .map(|n| n.energy)
            .sum()
    }

    /// Move every sink to its position for the given round.
    pub fn update_sinks(&mut self, scenario: &WardScenario, round: u64) {
        let positions = sink_positions(scenario, round);
        for (id, pos) in self.sink_ids.clone().into_iter().zip(positions) {
            self.node_mut(id).position = pos;
        }
    }
}

/// Build the multi-hop network for a scenario: 7 sensors + 1 relay per
/// patient, main sensors when the scenario uses them, and the sinks.
pub fn build_network(scenario: &WardScenario) -> Network {
    let layout = &scenario.layout;
    let mut nodes = Vec::new();
    let mut patients = Vec::with_capacity(PATIENT_COUNT);

    for patient in 0..PATIENT_COUNT {
        let mut sensors = Vec::with_capacity(SENSORS_PER_PATIENT);
        for kind in SensorKind::ALL {
            let id = body_sensor_id(patient, kind);
            sensors.push(id);
            nodes.push(Node::new(
                id,
                Some(patient),
                NodeRole::BodySensor(kind),
                layout.offset_position(patient, layout.bs_offsets[kind.index()]),
                BS_INITIAL_ENERGY,
            ));
        }
        let relay = body_relay_id(patient);
        nodes.push(Node::new(
            relay,
            Some(patient),
            NodeRole::BodyRelay,
            layout.offset_position(patient, layout.br_offset),
            BR_INITIAL_ENERGY,
        ));
        patients.push(PatientGroup {
            sensors,
            relay: Some(relay),
            main_sensor: None,
        });
    }

    if scenario.uses_main_sensor {
        for patient in 0..PATIENT_COUNT {
            let id = main_sensor_id(patient);
            patients[patient].main_sensor = Some(id);
            nodes.push(Node::new(
                id,
                Some(patient),
                NodeRole::MainSensor,
                layout.offset_position(patient, layout.ms_offset),
                f64::INFINITY,
            ));
        }
    }

    let mut sink_ids = Vec::with_capacity(scenario.sinks.len());
    for (index, spec) in scenario.sinks.iter().enumerate() {
        let id = sink_id(index);
        sink_ids.push(id);
        nodes.push(Node::new(id, None, NodeRole::Sink, spec.initial, f64::INFINITY));
    }

    // Dense id -> index lookup relies on ids being assigned in order.
    nodes.sort_by_key(|n| n.id);
    debug_assert!(nodes.iter().enumerate().all(|(i, n)| n.id as usize == i));

    Network {
        nodes,
        patients,
        sink_ids,
    }
}

/// Build the single-hop baseline network: the same 56 sensors with no relays
/// and one static sink at the ward center.
pub fn build_baseline_network(layout: &WardLayout) -> Network {
    let mut nodes = Vec::new();
    let mut patients = Vec::with_capacity(PATIENT_COUNT);
    for patient in 0..PATIENT_COUNT {
        let mut sensors = Vec::with_capacity(SENSORS_PER_PATIENT);
        for kind in SensorKind::ALL {
            let id = body_sensor_id(patient, kind);
            sensors.push(id);
            nodes.push(Node::new(
                id,
                Some(patient),
                NodeRole::BodySensor(kind),
                layout.offset_position(patient, layout.bs_offsets[kind.index()]),
                BS_INITIAL_ENERGY,
            ));
        }
        patients.push(PatientGroup {
            sensors,
            relay: None,
            main_sensor: None,
        });
    }
    let sink = sink_id(0);
    nodes.push(Node::new(sink, None, NodeRole::Sink, WARD_CENTER, f64::INFINITY));

    // Leave relay id slots unoccupied: index nodes sparsely by id.
    let max_id = sink as usize;
    let mut dense: Vec<Node> = Vec::with_capacity(max_id + 1);
    for id in 0..=max_id as NodeId {
        if let Some(node) = nodes.iter().find(|n| n.id == id) {
            dense.push(node.clone());
        } else {
            // placeholder for unused relay/main-sensor slots; never alive
            let mut filler = Node::new(id, None, NodeRole::MainSensor, WARD_CENTER, 0.0);
            filler.alive = false;
            dense.push(filler);
        }
    }

    Network {
        nodes: dense,
        patients,
        sink_ids: vec![sink],
    }
}

/// Tracks what a packet of each payload kind should look like when it reaches
/// a sink under each scenario; used by conservation-of-custody checks.
pub fn expected_aggregate_hop_count(scenario: &WardScenario) -> usize {
    if scenario.uses_main_sensor {
        3 // relay -> main sensor -> sink
    } else {
        2 // relay -> sink
    }
}

/// True when a delivered packet's hop list matches the scenario's declared
/// flow.
pub fn custody_matches(scenario: &WardScenario, packet: &Packet) -> bool {
    match packet.payload_kind {
        crate::types::PayloadKind::Vital(_) => packet.hops.len() == 2,
        crate::types::PayloadKind::Aggregate => {
            packet.hops.len() == expected_aggregate_hop_count(scenario)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn scenario_2_sinks_sit_at_wall_midpoints() {
        let s = build_scenario(2, None).unwrap();
        let got: Vec<Position> = s.sinks.iter().map(|k| k.initial).collect();
        assert_eq!(
            got,
            vec![
                Position::new(0.0, 10.0),
                Position::new(20.0, 20.0),
                Position::new(40.0, 10.0),
                Position::new(20.0, 0.0),
            ]
        );
        assert!(s.sinks.iter().all(|k| k.mobility == Mobility::Static));
    }

    #[test]
    fn scenario_1_single_center_sink() {
        let s = build_scenario(1, None).unwrap();
        assert_eq!(s.sinks.len(), 1);
        assert_eq!(s.sinks[0].initial, Position::new(20.0, 10.0));
        assert_eq!(s.sinks[0].mobility, Mobility::Static);
    }

    #[test]
    fn scenario_3_node_census() {
        let s = build_scenario(3, None).unwrap();
        let net = build_network(&s);
        assert_eq!(net.nodes.len(), 73); // 64 body nodes + 8 main sensors + 1 sink
        assert_eq!(net.sink_ids.len(), 1);
        assert!(net.patients.iter().all(|p| p.main_sensor.is_some()));
    }

    #[test]
    fn invalid_scenario_id_rejected() {
        assert!(matches!(
            build_scenario(9, None).unwrap_err(),
            ConfigError::UnknownScenario(9)
        ));
        assert!(matches!(
            build_scenario(0, None).unwrap_err(),
            ConfigError::UnknownScenario(0)
        ));
    }

    #[test]
    fn static_sink_never_moves() {
        let s = build_scenario(2, None).unwrap();
        for round in [0, 1, 10, 999] {
            assert_eq!(
                sink_positions(&s, round),
                WALL_SINKS.to_vec(),
                "round {round}"
            );
        }
    }

    #[test]
    fn center_line_sink_reflects_at_walls() {
        let s = build_scenario(4, None).unwrap();
        assert_eq!(sink_positions(&s, 0)[0], Position::new(20.0, 10.0));
        assert_eq!(sink_positions(&s, 20)[0], Position::new(40.0, 10.0));
        assert_eq!(sink_positions(&s, 21)[0], Position::new(39.0, 10.0));
        assert_eq!(sink_positions(&s, 60)[0], Position::new(0.0, 10.0));
        assert_eq!(sink_positions(&s, 61)[0], Position::new(1.0, 10.0));
    }

    #[test]
    fn center_line_sink_wraps_when_configured() {
        let layout = WardLayout {
            center_wrap: true,
            ..WardLayout::default()
        };
        let s = build_scenario(4, Some(layout)).unwrap();
        assert_eq!(sink_positions(&s, 20)[0], Position::new(0.0, 10.0));
        assert_eq!(sink_positions(&s, 21)[0], Position::new(1.0, 10.0));
    }

    #[test]
    fn perimeter_sink_turns_the_corner() {
        let s = build_scenario(5, None).unwrap();
        // first sink starts at (0, 10) heading up the left wall
        assert_eq!(sink_positions(&s, 10)[0], Position::new(0.0, 20.0));
        assert_eq!(sink_positions(&s, 11)[0], Position::new(1.0, 20.0));
    }

    #[test]
    fn build_is_deterministic() {
        let a = build_scenario(5, None).unwrap();
        let b = build_scenario(5, None).unwrap();
        assert_eq!(a, b);
        assert_eq!(build_network(&a), build_network(&b));
    }

    #[test]
    fn default_layout_stays_in_ward() {
        WardLayout::default().validate().unwrap();
    }

    #[test]
    fn out_of_ward_layout_rejected() {
        let layout = WardLayout {
            bed_anchors: vec![
                (39.5, 2.0),
                (32.0, 2.0),
                (35.0, 2.0),
                (38.0, 2.0),
                (29.0, 18.0),
                (32.0, 18.0),
                (35.0, 18.0),
                (38.0, 18.0),
            ],
            ..WardLayout::default()
        };
        // glucose offset (+1.0, +0.1) pushes past x = 40
        assert!(matches!(
            build_scenario(1, Some(layout)).unwrap_err(),
            ConfigError::OutOfWard { .. }
        ));
    }

    #[test]
    fn baseline_network_has_no_relays() {
        let net = build_baseline_network(&WardLayout::default());
        assert_eq!(net.alive_body_sensors(), 56);
        assert_eq!(net.alive_body_nodes(), 56);
        assert!(net.patients.iter().all(|p| p.relay.is_none()));
        assert_eq!(net.sink_ids.len(), 1);
        assert_eq!(net.node(net.sink_ids[0]).position, WARD_CENTER);
    }

    fn arc_distance(a: f64, b: f64) -> f64 {
        let d = (a - b).rem_euclid(PERIMETER);
        d.min(PERIMETER - d)
    }

    proptest! {
        #[test]
        fn sink_positions_stay_on_or_inside_ward(id in 1u8..=5, round in 0u64..10_000) {
            let s = build_scenario(id, None).unwrap();
            for p in sink_positions(&s, round) {
                prop_assert!(p.in_ward(), "scenario {id} round {round}: {p:?}");
            }
        }

        /// The four perimeter sinks move together: pairwise arc spacing is
        /// preserved forever.
        #[test]
        fn perimeter_sinks_keep_their_spacing(round in 0u64..10_000) {
            let s = build_scenario(5, None).unwrap();
            let initial: Vec<f64> =
                WALL_SINKS.iter().map(|p| perimeter_arc(*p)).collect();
            let arcs: Vec<f64> = sink_positions(&s, round)
                .into_iter()
                .map(perimeter_arc)
                .collect();
            for i in 0..arcs.len() {
                for j in (i + 1)..arcs.len() {
                    let want = arc_distance(initial[i], initial[j]);
                    let got = arc_distance(arcs[i], arcs[j]);
                    prop_assert!((want - got).abs() < 1e-6);
                }
            }
        }

        #[test]
        fn perimeter_arc_roundtrips(arc in 0.0f64..120.0) {
            let p = perimeter_point(arc);
            prop_assert!((perimeter_arc(p) - arc).abs() < 1e-9);
        }
    }
}
