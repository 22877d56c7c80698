//! Round loop and metrics accumulation for one full run.
//!
//! Each round: resolve sink positions, advance every vital-sign stream,
//! drive the protocol over all eight patients in order, then append one
//! cumulative metrics snapshot. The loop short-circuits only when every
//! body node is dead, in which case the remaining snapshots repeat the
//! final state.

use serde::{Deserialize, Serialize};

use crate::energy::{RadioParams, EnergyReport};
use crate::error::ConfigError;
use crate::protocol::{
    aggregate_and_forward, run_baseline_round, run_patient_round, ForwardRoute, HopOutcome,
    ProtocolKind, RoundLog,
};
use crate::scenario::{
    build_baseline_network, build_network, build_scenario, Network, WardLayout, WardScenario,
};
use crate::types::{nearest_sink, NodeId, PATIENT_COUNT, SENSORS_PER_PATIENT};
use crate::vitals::{should_transmit, Bands, VitalsConfig, VitalStreams};

/// Everything that defines one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub scenario: u8,
    pub protocol: ProtocolKind,
    pub rounds: u64,
    pub seed: u64,
    pub radio: RadioParams,
    pub bands: Bands,
    pub vitals: VitalsConfig,
    pub layout: Option<WardLayout>,
    /// Fixed packet size in bits, shared by readings and aggregates.
    pub packet_bits: u32,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            scenario: 1,
            protocol: ProtocolKind::Dare,
            rounds: 5000,
            seed: 42,
            radio: RadioParams::default(),
            bands: Bands::default(),
            vitals: VitalsConfig::default(),
            layout: None,
            packet_bits: 4000,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.rounds == 0 {
            return Err(ConfigError::ZeroRounds);
        }
        if self.packet_bits == 0 {
            return Err(ConfigError::ZeroPacketBits);
        }
        if !(1..=5).contains(&self.scenario) {
            return Err(ConfigError::UnknownScenario(self.scenario));
        }
        self.radio.validate()?;
        self.bands.validate()?;
        if let Some(layout) = &self.layout {
            layout.validate()?;
        }
        Ok(())
    }
}

/// Cumulative per-round counters. Counter fields never decrease; alive
/// counts and residual energies never increase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsSnapshot {
    /// 1-based round number.
    pub round: u64,
    pub alive_bs: u64,
    pub alive_bs_br: u64,
    pub residual_bs_j: f64,
    pub residual_total_j: f64,
    pub packets_sent: u64,
    pub packets_received_at_sink: u64,
    pub packets_dropped: u64,
    pub total_hop_delay: u64,
}

/// Outcome of a full run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub config_scenario: u8,
    pub protocol: ProtocolKind,
    pub seed: u64,
    pub rounds: u64,
    /// Round of the first body-node death; `rounds` when nothing died.
    pub stability_period: u64,
    /// Round of the last body-node death; `rounds` when nothing died.
    pub last_death_round: u64,
    /// Last round with at least one alive body sensor.
    pub lifetime: u64,
    pub throughput_pct: f64,
    /// Total joules debited from body nodes over the run.
    pub total_energy_debited: f64,
    pub initial_body_energy: f64,
    pub final_body_energy: f64,
    pub snapshots: Vec<MetricsSnapshot>,
}

/// Packet delivery ratio in percent. A run that never sent anything scores
/// zero rather than dividing by zero.
pub fn throughput_pct(received: u64, sent: u64) -> Result<f64, ConfigError> {
    if received > sent {
        return Err(ConfigError::ReceivedExceedsSent { received, sent });
    }
    if sent == 0 {
        return Ok(0.0);
    }
    Ok(100.0 * received as f64 / sent as f64)
}

/// First round at which any body node had died, judged against the initial
/// census; total rounds when none did.
pub fn stability_period(snapshots: &[MetricsSnapshot], initial_alive: u64) -> u64 {
    for s in snapshots {
        if s.alive_bs_br < initial_alive {
            return s.round;
        }
    }
    snapshots.last().map_or(0, |s| s.round)
}

/// Observer hooks for the per-event stream; tests use these to audit runs.
pub trait Observer {
    fn on_hop(&mut self, _outcome: &HopOutcome) {}
    fn on_death(&mut self, _node: NodeId, _round: u64) {}
    fn on_report(&mut self, _report: &EnergyReport) {}
}

/// Observer that ignores everything.
pub struct NullObserver;
impl Observer for NullObserver {}

/// A run in progress; step it manually or drive it to completion with
/// [`Engine::run`].
pub struct Engine {
    config: SimConfig,
    scenario: WardScenario,
    network: Network,
    streams: VitalStreams,
    round: u64,
    sent: u64,
    received: u64,
    dropped: u64,
    hop_delay: u64,
    total_debited: f64,
    initial_body_energy: f64,
    first_death: Option<u64>,
    last_death: Option<u64>,
    last_alive_bs_round: u64,
    snapshots: Vec<MetricsSnapshot>,
}

impl Engine {
    pub fn new(config: SimConfig) -> Result<Self, ConfigError> {
        config.validate()?;
        let scenario = build_scenario(config.scenario, config.layout.clone())?;
        let network = match config.protocol {
            ProtocolKind::Dare => build_network(&scenario),
            ProtocolKind::BaselineDirect => build_baseline_network(&scenario.layout),
        };
        let streams = VitalStreams::new(config.seed, config.vitals.clone(), config.bands);
        let initial_body_energy = network.residual_body_energy();
        Ok(Engine {
            config,
            scenario,
            network,
            streams,
            round: 0,
            sent: 0,
            received: 0,
            dropped: 0,
            hop_delay: 0,
            total_debited: 0.0,
            initial_body_energy,
            first_death: None,
            last_death: None,
            last_alive_bs_round: 0,
            snapshots: Vec::new(),
        })
    }

    pub fn network(&self) -> &Network {
        &self.network
    }

    pub fn snapshots(&self) -> &[MetricsSnapshot] {
        &self.snapshots
    }

    pub fn current_round(&self) -> u64 {
        self.round
    }

    /// Execute one round and append its snapshot.
    pub fn step(&mut self, observer: &mut dyn Observer) -> MetricsSnapshot {
        self.round += 1;
        let round = self.round;

        // Sink positions are a pure function of the round index; round 1
        // runs against the initial placement.
        self.network.update_sinks(&self.scenario, round - 1);

        let readings = self.streams.advance_round(round);
        let bands = *self.streams.bands();
        let fires: Vec<bool> = readings
            .iter()
            .map(|r| {
                should_transmit(r, bands.for_kind(r.kind)).expect("bands validated at build time")
            })
            .collect();

        let mut log = RoundLog::default();
        match self.config.protocol {
            ProtocolKind::Dare => {
                for patient in 0..PATIENT_COUNT {
                    let base = patient * SENSORS_PER_PATIENT;
                    let received = run_patient_round(
                        &mut self.network,
                        patient,
                        &fires[base..base + SENSORS_PER_PATIENT],
                        &self.config.radio,
                        self.config.packet_bits,
                        round,
                        &mut log,
                    );
                    let route = self.resolve_route(patient);
                    aggregate_and_forward(
                        &mut self.network,
                        patient,
                        received,
                        route,
                        &self.config.radio,
                        self.config.packet_bits,
                        round,
                        &mut log,
                    );
                }
            }
            ProtocolKind::BaselineDirect => {
                run_baseline_round(
                    &mut self.network,
                    &fires,
                    &self.config.radio,
                    self.config.packet_bits,
                    round,
                    &mut log,
                );
            }
        }

        for outcome in &log.outcomes {
            observer.on_hop(outcome);
        }
        for report in &log.reports {
            self.total_debited += report.tx_energy + report.rx_energy;
            observer.on_report(report);
        }
        for &node in &log.deaths {
            if self.first_death.is_none() {
                self.first_death = Some(round);
            }
            self.last_death = Some(round);
            observer.on_death(node, round);
        }

        self.sent += log.packets_sent;
        self.received += log.packets_received_at_sink;
        self.dropped += log.packets_dropped;
        self.hop_delay += log.hop_delay;

        let alive_bs = self.network.alive_body_sensors() as u64;
        if alive_bs > 0 {
            self.last_alive_bs_round = round;
        }
        let snapshot = MetricsSnapshot {
            round,
            alive_bs,
            alive_bs_br: self.network.alive_body_nodes() as u64,
            residual_bs_j: self.network.residual_bs_energy(),
            residual_total_j: self.network.residual_body_energy(),
            packets_sent: self.sent,
            packets_received_at_sink: self.received,
            packets_dropped: self.dropped,
            total_hop_delay: self.hop_delay,
        };
        self.snapshots.push(snapshot);
        snapshot
    }

    fn resolve_route(&self, patient: usize) -> ForwardRoute {
        match self.scenario.id {
            2 | 5 => {
                let relay = self.network.patients[patient]
                    .relay
                    .expect("relayed protocol has relays");
                let pos = self.network.node(relay).position;
                let sink =
                    nearest_sink(pos, self.network.sinks()).expect("scenario defines sinks");
                ForwardRoute::Direct(sink)
            }
            3 => {
                let ms = self.network.patients[patient]
                    .main_sensor
                    .expect("scenario 3 deploys main sensors");
                ForwardRoute::ViaMainSensor(ms, self.network.sink_ids[0])
            }
            _ => ForwardRoute::Direct(self.network.sink_ids[0]),
        }
    }

    /// Drive the remaining rounds to completion.
    pub fn run(mut self, observer: &mut dyn Observer) -> RunSummary {
        while self.round < self.config.rounds {
            self.step(observer);
            if self.network.alive_body_nodes() == 0 {
                break;
            }
        }
        // A fully-dead network changes nothing; extrapolate the tail.
        if let Some(&last) = self.snapshots.last() {
            for round in (last.round + 1)..=self.config.rounds {
                self.snapshots.push(MetricsSnapshot { round, ..last });
            }
        }
        self.finish()
    }

    fn finish(self) -> RunSummary {
        let rounds = self.config.rounds;
        let throughput = throughput_pct(self.received, self.sent)
            .expect("received never exceeds sent");
        RunSummary {
            config_scenario: self.config.scenario,
            protocol: self.config.protocol,
            seed: self.config.seed,
            rounds,
            stability_period: self.first_death.unwrap_or(rounds),
            last_death_round: self.last_death.unwrap_or(rounds),
            lifetime: if self.network.alive_body_sensors() > 0 {
                rounds
            } else {
                self.last_alive_bs_round
            },
            throughput_pct: throughput,
            total_energy_debited: self.total_debited,
            initial_body_energy: self.initial_body_energy,
            final_body_energy: self.network.residual_body_energy(),
            snapshots: self.snapshots,
        }
    }
}

/// Run one configuration to completion.
pub fn run(config: SimConfig) -> Result<RunSummary, ConfigError> {
    Ok(Engine::new(config)?.run(&mut NullObserver))
}

/// Run one configuration with an event observer attached.
pub fn run_observed(config: SimConfig, observer: &mut dyn Observer) -> Result<RunSummary, ConfigError> {
    Ok(Engine::new(config)?.run(observer))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::NodeRole;

    fn config(scenario: u8, protocol: ProtocolKind, rounds: u64, seed: u64) -> SimConfig {
        SimConfig {
            scenario,
            protocol,
            rounds,
            seed,
            ..SimConfig::default()
        }
    }

    #[test]
    fn one_fresh_round_census_and_traffic() {
        let summary = run(config(1, ProtocolKind::Dare, 1, 42)).unwrap();
        assert_eq!(summary.snapshots.len(), 1);
        let snap = summary.snapshots[0];
        assert_eq!(snap.alive_bs, 56);
        assert_eq!(snap.alive_bs_br, 64);
        // five continuous sensors per patient plus eight aggregates, and
        // whatever threshold excursions fired on top
        assert!(snap.packets_sent >= 48, "sent {}", snap.packets_sent);
        assert_eq!(snap.packets_sent, snap.packets_received_at_sink + snap.packets_dropped);
    }

    #[test]
    fn zero_rounds_is_a_config_error() {
        let err = run(config(1, ProtocolKind::Dare, 0, 42)).unwrap_err();
        assert!(matches!(err, ConfigError::ZeroRounds));
    }

    #[test]
    fn same_seed_same_summary() {
        let a = run(config(2, ProtocolKind::Dare, 120, 7)).unwrap();
        let b = run(config(2, ProtocolKind::Dare, 120, 7)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn throughput_examples() {
        assert_eq!(throughput_pct(91, 100).unwrap(), 91.0);
        assert_eq!(throughput_pct(500, 500).unwrap(), 100.0);
        assert_eq!(throughput_pct(0, 0).unwrap(), 0.0);
        assert!(matches!(
            throughput_pct(5, 4),
            Err(ConfigError::ReceivedExceedsSent { .. })
        ));
    }

    #[test]
    fn stability_period_examples() {
        let snap = |round, alive| MetricsSnapshot {
            round,
            alive_bs: alive,
            alive_bs_br: alive,
            residual_bs_j: 0.0,
            residual_total_j: 0.0,
            packets_sent: 0,
            packets_received_at_sink: 0,
            packets_dropped: 0,
            total_hop_delay: 0,
        };
        // no deaths over the whole run
        let series: Vec<_> = (1..=5000).map(|r| snap(r, 64)).collect();
        assert_eq!(stability_period(&series, 64), 5000);
        // first death at round 858
        let series: Vec<_> = (1..=5000)
            .map(|r| snap(r, if r < 858 { 64 } else { 63 }))
            .collect();
        assert_eq!(stability_period(&series, 64), 858);
        // death in the very first round
        let series: Vec<_> = (1..=10).map(|r| snap(r, 63)).collect();
        assert_eq!(stability_period(&series, 64), 1);
    }

    #[test]
    fn counters_monotone_and_alive_counts_non_increasing() {
        let summary = run(config(1, ProtocolKind::Dare, 200, 3)).unwrap();
        for pair in summary.snapshots.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            assert!(b.packets_sent >= a.packets_sent);
            assert!(b.packets_received_at_sink >= a.packets_received_at_sink);
            assert!(b.packets_dropped >= a.packets_dropped);
            assert!(b.total_hop_delay >= a.total_hop_delay);
            assert!(b.alive_bs <= a.alive_bs);
            assert!(b.alive_bs_br <= a.alive_bs_br);
            assert!(b.residual_bs_j <= a.residual_bs_j + 1e-12);
            assert!(b.residual_total_j <= a.residual_total_j + 1e-12);
        }
    }

    #[test]
    fn sent_equals_received_plus_dropped_every_round() {
        for protocol in [ProtocolKind::Dare, ProtocolKind::BaselineDirect] {
            let summary = run(config(4, protocol, 300, 11)).unwrap();
            for s in &summary.snapshots {
                assert_eq!(
                    s.packets_sent,
                    s.packets_received_at_sink + s.packets_dropped,
                    "round {} under {:?}",
                    s.round,
                    protocol
                );
            }
        }
    }

    #[test]
    fn ledger_closes_over_a_run() {
        let summary = run(config(2, ProtocolKind::Dare, 400, 5)).unwrap();
        let spent = summary.initial_body_energy - summary.final_body_energy;
        assert!(
            (spent - summary.total_energy_debited).abs() < 1e-9,
            "spent {spent}, debited {}",
            summary.total_energy_debited
        );
    }

    #[test]
    fn node_energy_never_increases_and_unlimited_roles_hold_steady() {
        let mut engine = Engine::new(config(3, ProtocolKind::Dare, 60, 9)).unwrap();
        let mut previous: Vec<f64> = engine.network().nodes.iter().map(|n| n.energy).collect();
        for _ in 0..60 {
            engine.step(&mut NullObserver);
            for (node, prev) in engine.network().nodes.iter().zip(&previous) {
                match node.role {
                    NodeRole::MainSensor | NodeRole::Sink => assert_eq!(node.energy, *prev),
                    _ => assert!(node.energy <= *prev),
                }
            }
            previous = engine.network().nodes.iter().map(|n| n.energy).collect();
        }
    }

    #[test]
    fn death_events_reconcile_with_alive_counts() {
        struct Deaths(Vec<(NodeId, u64)>);
        impl Observer for Deaths {
            fn on_death(&mut self, node: NodeId, round: u64) {
                self.0.push((node, round));
            }
        }
        let mut deaths = Deaths(Vec::new());
        let summary = run_observed(config(1, ProtocolKind::Dare, 400, 13), &mut deaths).unwrap();
        for snap in &summary.snapshots {
            let dead_by_now = deaths.0.iter().filter(|(_, r)| *r <= snap.round).count() as u64;
            assert_eq!(snap.alive_bs_br, 64 - dead_by_now, "round {}", snap.round);
        }
    }

    #[test]
    fn closer_sinks_never_shorten_stability() {
        // Identical seeds and layouts; only the single sink's distance to the
        // beds differs. The farther sink must not outlast the nearer one.
        let mut near_layout = WardLayout::default();
        near_layout.center_speed = 1.0;
        let near = run(SimConfig {
            scenario: 1,
            ..config(1, ProtocolKind::Dare, 600, 21)
        })
        .unwrap();

        // scale every relay->sink distance up by pushing beds to the far wall
        let mut far_anchors = WardLayout::default().bed_anchors;
        for (x, _) in far_anchors.iter_mut() {
            *x = *x - 27.0; // beds now hug the left wall, far from (20,10)...
        }
        let far_layout = WardLayout {
            bed_anchors: far_anchors,
            ms_offset: (10.5, 0.0),
            ..WardLayout::default()
        };
        let far = run(SimConfig {
            layout: Some(far_layout),
            ..config(1, ProtocolKind::Dare, 600, 21)
        })
        .unwrap();
        // beds at x in {2,5,8,11} sit farther from the center sink than the
        // defaults at {29,32,35,38}
        assert!(near.stability_period >= far.stability_period);
    }

    #[test]
    fn extrapolated_tail_after_total_death() {
        // tiny budgets so everything dies fast
        let mut cfg = config(1, ProtocolKind::BaselineDirect, 50, 2);
        cfg.rounds = 50;
        let summary = run(cfg).unwrap();
        assert_eq!(summary.snapshots.len(), 50);
        assert_eq!(summary.snapshots.last().unwrap().round, 50);
    }
}
