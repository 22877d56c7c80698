//! Per-round communication flow for the relayed protocol and the single-hop
//! baseline.
//!
//! Relayed flow, per patient: each alive sensor (fixed polling order) whose
//! reading fires transmits one packet to the patient's chest relay, paying
//! transmit energy over the sensor-relay distance while the relay pays
//! receive energy. Once every sensor is checked, the relay fuses whatever it
//! received into a single fixed-size packet and forwards it to its
//! scenario-determined destination. A dead relay silences its whole patient.
//!
//! Packet accounting: a packet is "sent" the moment a node commits to a
//! transmission, including the final attempt a dying node cannot afford. A
//! sent packet is "received" once its data reaches a sink (directly or fused
//! into a delivered aggregate) and "dropped" otherwise; every packet resolves
//! within its round.

use serde::{Deserialize, Serialize};

use crate::energy::{debit, rx_energy, tx_energy, DebitOutcome, EnergyReport, RadioParams};
use crate::scenario::Network;
use crate::types::{distance, NodeId, Packet, PayloadKind, SensorKind};

/// Which protocol drives a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProtocolKind {
    /// Multi-hop: sensors -> relay -> (main sensor ->) sink.
    Dare,
    /// Single-hop comparison baseline: every sensor straight to one sink.
    BaselineDirect,
}

impl ProtocolKind {
    pub fn name(self) -> &'static str {
        match self {
            ProtocolKind::Dare => "dare",
            ProtocolKind::BaselineDirect => "baseline-direct",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "dare" => Some(ProtocolKind::Dare),
            "baseline-direct" => Some(ProtocolKind::BaselineDirect),
            _ => None,
        }
    }
}

/// Record of one transmission attempt.
#[derive(Debug, Clone, PartialEq)]
pub struct HopOutcome {
    pub packet: Packet,
    /// Joules debited from the sender (0 when it died attempting).
    pub tx_cost: f64,
    /// Joules debited from the receiver (0 for exempt or dead receivers).
    pub rx_cost: f64,
    /// False when the sender or receiver died (or was already dead).
    pub delivered: bool,
    /// Links actually traversed by this attempt.
    pub hop_delay: u32,
}

/// Where a relay's fused packet goes this round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForwardRoute {
    /// Straight to a sink.
    Direct(NodeId),
    /// Through the patient's bed-mounted main sensor, then to a sink.
    ViaMainSensor(NodeId, NodeId),
}

/// Mutable per-round bookkeeping shared by the protocol operations.
#[derive(Debug, Default)]
pub struct RoundLog {
    pub outcomes: Vec<HopOutcome>,
    pub reports: Vec<EnergyReport>,
    /// Node ids that died this round, in event order.
    pub deaths: Vec<NodeId>,
    pub packets_sent: u64,
    pub packets_received_at_sink: u64,
    pub packets_dropped: u64,
    pub hop_delay: u64,
}

impl RoundLog {
    fn record_death(&mut self, id: NodeId) {
        self.deaths.push(id);
    }
}

/// Poll one patient's sensors and deliver firing readings to the relay.
///
/// Returns the packets now held by the relay for aggregation. Sensors whose
/// relay is dead are skipped entirely for the round; a sensor that cannot
/// afford its transmission dies and the remaining sensors are still polled.
pub fn run_patient_round(
    net: &mut Network,
    patient: usize,
    fires: &[bool],
    radio: &RadioParams,
    packet_bits: u32,
    round: u64,
    log: &mut RoundLog,
) -> Vec<Packet> {
    let mut received = Vec::new();
    let Some(relay_id) = net.patients[patient].relay else {
        return received;
    };
    let sensor_ids: Vec<NodeId> = net.patients[patient].sensors.clone();
    let n = radio.default_n;

    for (slot, sensor_id) in sensor_ids.into_iter().enumerate() {
        if !net.node(sensor_id).alive {
            continue;
        }
        // A dead relay silences the rest of the patient for this round.
        if !net.node(relay_id).alive {
            break;
        }
        if !fires[slot] {
            continue;
        }

        let kind = SensorKind::ALL[slot];
        let d = distance(net.node(sensor_id).position, net.node(relay_id).position);
        let cost = tx_energy(radio, packet_bits, d, n).expect("validated exponent");
        let mut packet = Packet::new(
            sensor_id,
            patient,
            packet_bits,
            round,
            PayloadKind::Vital(kind),
        );
        log.packets_sent += 1;

        match debit(net.node_mut(sensor_id), cost) {
            DebitOutcome::Died => {
                // The transmission it was about to make never leaves the body.
                log.packets_dropped += 1;
                log.record_death(sensor_id);
                log.outcomes.push(HopOutcome {
                    packet,
                    tx_cost: 0.0,
                    rx_cost: 0.0,
                    delivered: false,
                    hop_delay: 0,
                });
                continue;
            }
            DebitOutcome::Charged => {
                log.reports.push(EnergyReport {
                    node: sensor_id,
                    round,
                    tx_energy: cost,
                    rx_energy: 0.0,
                });
                if !net.node(sensor_id).alive {
                    log.record_death(sensor_id);
                }
            }
            DebitOutcome::Exempt => unreachable!("sensors are energy-constrained"),
        }

        let rx = rx_energy(radio, packet_bits);
        match debit(net.node_mut(relay_id), rx) {
            DebitOutcome::Died => {
                // Receiver died mid-round; the packet is lost.
                log.packets_dropped += 1;
                log.record_death(relay_id);
                log.hop_delay += 1;
                log.outcomes.push(HopOutcome {
                    packet,
                    tx_cost: cost,
                    rx_cost: 0.0,
                    delivered: false,
                    hop_delay: 1,
                });
            }
            DebitOutcome::Charged => {
                log.reports.push(EnergyReport {
                    node: relay_id,
                    round,
                    tx_energy: 0.0,
                    rx_energy: rx,
                });
                if !net.node(relay_id).alive {
                    log.record_death(relay_id);
                }
                packet.hops.push(relay_id);
                log.hop_delay += 1;
                log.outcomes.push(HopOutcome {
                    packet: packet.clone(),
                    tx_cost: cost,
                    rx_cost: rx,
                    delivered: true,
                    hop_delay: 1,
                });
                received.push(packet);
            }
            DebitOutcome::Exempt => unreachable!("relays are energy-constrained"),
        }
    }
    received
}

/// Fuse the packets a relay received this round and forward one fixed-size
/// packet along the scenario's route.
///
/// An empty batch keeps the relay silent. If the relay died while receiving,
/// or dies attempting the forward, the pending packets are dropped; a relay
/// never forwards posthumously.
pub fn aggregate_and_forward(
    net: &mut Network,
    patient: usize,
    received: Vec<Packet>,
    route: ForwardRoute,
    radio: &RadioParams,
    packet_bits: u32,
    round: u64,
    log: &mut RoundLog,
) -> Option<HopOutcome> {
    let relay_id = net.patients[patient].relay?;
    let pending = received.len() as u64;

    if !net.node(relay_id).alive {
        // Death during the receive phase orphans everything it accepted.
        log.packets_dropped += pending;
        return None;
    }
    if received.is_empty() {
        return None;
    }

    let first_stop = match route {
        ForwardRoute::Direct(sink) => sink,
        ForwardRoute::ViaMainSensor(ms, _) => ms,
    };
    let d = distance(net.node(relay_id).position, net.node(first_stop).position);
    let cost = tx_energy(radio, packet_bits, d, radio.default_n).expect("validated exponent");
    let mut packet = Packet::new(relay_id, patient, packet_bits, round, PayloadKind::Aggregate);
    log.packets_sent += 1;

    match debit(net.node_mut(relay_id), cost) {
        DebitOutcome::Died => {
            log.packets_dropped += 1 + pending;
            log.record_death(relay_id);
            let outcome = HopOutcome {
                packet,
                tx_cost: 0.0,
                rx_cost: 0.0,
                delivered: false,
                hop_delay: 0,
            };
            log.outcomes.push(outcome.clone());
            return Some(outcome);
        }
        DebitOutcome::Charged => {
            log.reports.push(EnergyReport {
                node: relay_id,
                round,
                tx_energy: cost,
                rx_energy: 0.0,
            });
            if !net.node(relay_id).alive {
                log.record_death(relay_id);
            }
        }
        DebitOutcome::Exempt => unreachable!("relays are energy-constrained"),
    }

    let (rx_cost, hop_delay) = match route {
        ForwardRoute::Direct(sink) => {
            // Sinks absorb packets for free.
            debit(net.node_mut(sink), rx_energy(radio, packet_bits));
            packet.hops.push(sink);
            (0.0, 1)
        }
        ForwardRoute::ViaMainSensor(ms, sink) => {
            // The bed station forwards at no energy cost but adds a hop of
            // delay.
            debit(net.node_mut(ms), rx_energy(radio, packet_bits));
            packet.hops.push(ms);
            packet.hops.push(sink);
            (0.0, 2)
        }
    };

    log.hop_delay += u64::from(hop_delay);
    // The fused batch and the aggregate itself all reach the sink.
    log.packets_received_at_sink += 1 + pending;
    let outcome = HopOutcome {
        packet,
        tx_cost: cost,
        rx_cost,
        delivered: true,
        hop_delay,
    };
    log.outcomes.push(outcome.clone());
    Some(outcome)
}

/// One full baseline round: every alive sensor whose reading fires transmits
/// straight to the single sink, with no aggregation.
pub fn run_baseline_round(
    net: &mut Network,
    fires: &[bool],
    radio: &RadioParams,
    packet_bits: u32,
    round: u64,
    log: &mut RoundLog,
) {
    let sink = net.sink_ids[0];
    let sink_pos = net.node(sink).position;
    let n = radio.default_n;
    for patient in 0..net.patients.len() {
        let sensor_ids: Vec<NodeId> = net.patients[patient].sensors.clone();
        for (slot, sensor_id) in sensor_ids.into_iter().enumerate() {
            if !net.node(sensor_id).alive {
                continue;
            }
            if !fires[patient * crate::types::SENSORS_PER_PATIENT + slot] {
                continue;
            }
            let kind = SensorKind::ALL[slot];
            let d = distance(net.node(sensor_id).position, sink_pos);
            let cost = tx_energy(radio, packet_bits, d, n).expect("validated exponent");
            let mut packet = Packet::new(
                sensor_id,
                patient,
                packet_bits,
                round,
                PayloadKind::Vital(kind),
            );
            log.packets_sent += 1;
            match debit(net.node_mut(sensor_id), cost) {
                DebitOutcome::Died => {
                    log.packets_dropped += 1;
                    log.record_death(sensor_id);
                    log.outcomes.push(HopOutcome {
                        packet,
                        tx_cost: 0.0,
                        rx_cost: 0.0,
                        delivered: false,
                        hop_delay: 0,
                    });
                }
                DebitOutcome::Charged => {
                    log.reports.push(EnergyReport {
                        node: sensor_id,
                        round,
                        tx_energy: cost,
                        rx_energy: 0.0,
                    });
                    if !net.node(sensor_id).alive {
                        log.record_death(sensor_id);
                    }
                    debit(net.node_mut(sink), rx_energy(radio, packet_bits));
                    packet.hops.push(sink);
                    log.hop_delay += 1;
                    log.packets_received_at_sink += 1;
                    log.outcomes.push(HopOutcome {
                        packet,
                        tx_cost: cost,
                        rx_cost: 0.0,
                        delivered: true,
                        hop_delay: 1,
                    });
                }
                DebitOutcome::Exempt => unreachable!("sensors are energy-constrained"),
            }
        }
    }
}
