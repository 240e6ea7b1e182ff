//! Seeded agent-based forwarding simulation.
//!
//! Nodes sit at random positions on a plane and exchange packets through
//! one-hop relays chosen uniformly among radio neighbors. Every relay
//! decision updates the relay's reputation ledger; class shares follow the
//! replicator trajectory, so the per-epoch forwarding rate can be compared
//! directly against the population dynamics.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamics::{self, Method, StrategyMode, Trajectory};
use crate::error::{Error, Result};
use crate::game::{check_share, DoveStrategy, GameParams};

/// Node placement and radio parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TopologyConfig {
    pub n_nodes: usize,
    pub area_width: f64,
    pub area_height: f64,
    pub tx_range: f64,
    pub rng_seed: u64,
}

impl TopologyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_nodes < 2 {
            return Err(Error::InvalidTopology(format!(
                "n_nodes must be >= 2, got {}",
                self.n_nodes
            )));
        }
        for (name, v) in [
            ("area_width", self.area_width),
            ("area_height", self.area_height),
            ("tx_range", self.tx_range),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidTopology(format!(
                    "{name} must be finite and > 0, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Static node positions with the induced radio adjacency.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    pub positions: Vec<(f64, f64)>,
    /// Sorted neighbor lists; `neighbors[i]` never contains `i`.
    pub neighbors: Vec<Vec<usize>>,
}

impl Topology {
    /// Builds the adjacency for explicit positions: nodes are neighbors iff
    /// their Euclidean distance is at most `tx_range`.
    pub fn from_positions(positions: Vec<(f64, f64)>, tx_range: f64) -> Self {
        let n = positions.len();
        let mut neighbors = vec![Vec::new(); n];
        for i in 0..n {
            for j in (i + 1)..n {
                let dx = positions[i].0 - positions[j].0;
                let dy = positions[i].1 - positions[j].1;
                if (dx * dx + dy * dy).sqrt() <= tx_range {
                    neighbors[i].push(j);
                    neighbors[j].push(i);
                }
            }
        }
        Self {
            positions,
            neighbors,
        }
    }

    pub fn isolated_count(&self) -> usize {
        self.neighbors.iter().filter(|n| n.is_empty()).count()
    }
}

/// Places nodes i.i.d. uniformly over the rectangle using the seeded
/// generator; deterministic for a fixed config. Isolated nodes are
/// permitted and surface as unreachable attempts during traffic.
pub fn generate_topology(cfg: &TopologyConfig) -> Result<Topology> {
    cfg.validate()?;
    let mut rng = stream_rng(cfg.rng_seed, STREAM_TOPOLOGY);
    let positions = (0..cfg.n_nodes)
        .map(|_| {
            (
                rng.gen_range(0.0..=cfg.area_width),
                rng.gen_range(0.0..=cfg.area_height),
            )
        })
        .collect();
    Ok(Topology::from_positions(positions, cfg.tx_range))
}

/// Behavioral class of a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeClass {
    Dove,
    Hawk,
}

/// Per-node simulation state: reputation ledger plus traffic counters.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeState {
    pub id: usize,
    pub position: (f64, f64),
    pub class: NodeClass,
    pub reputation: f64,
    pub pending_packets: u64,
    pub forwarded_count: u64,
    pub refused_count: u64,
    pub delivered_count: u64,
}

/// Reputation ledger update for one relay decision: forwarding gains
/// `delta_r`; refusing costs `delta_g` against a well-reputed requester and
/// `delta_b` against a badly reputed one. A requester at exactly zero
/// counts as badly reputed.
pub fn reputation_update(r_i: f64, forwarded: bool, r_j: f64, params: &GameParams) -> f64 {
    if forwarded {
        r_i + params.delta_r()
    } else if r_j > 0.0 {
        r_i - params.delta_g()
    } else {
        r_i - params.delta_b()
    }
}

/// Whether `relay` grants a forwarding request from a node with reputation
/// `source_reputation`. Hawks always refuse; doves forward with probability
/// `s_d` or `s_h` depending on the requester's reputation class.
pub fn relay_decision<R: Rng>(
    relay: &NodeState,
    source_reputation: f64,
    strat: DoveStrategy,
    rng: &mut R,
) -> bool {
    match relay.class {
        NodeClass::Hawk => false,
        NodeClass::Dove => {
            let prob = if source_reputation > 0.0 {
                strat.s_d()
            } else {
                strat.s_h()
            };
            rng.gen_bool(prob)
        }
    }
}

/// Traffic and strategy-mode settings of one simulation run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    /// Packets replenished per node at the start of every epoch.
    pub packets_per_node: u64,
    pub epochs: usize,
    pub rounds_per_epoch: usize,
    pub mode: StrategyMode,
    pub p0: f64,
    /// Replicator settings; epoch `k` maps to time `k * horizon / epochs`.
    pub dt: f64,
    pub horizon: f64,
    pub method: Method,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.packets_per_node == 0 || self.epochs == 0 || self.rounds_per_epoch == 0 {
            return Err(Error::InvalidSimConfig(
                "packets_per_node, epochs and rounds_per_epoch must be positive".into(),
            ));
        }
        check_share(self.p0)?;
        if !self.dt.is_finite()
            || self.dt <= 0.0
            || !self.horizon.is_finite()
            || self.horizon < self.dt
        {
            return Err(Error::InvalidSimConfig(format!(
                "bad replicator step: dt = {}, horizon = {}",
                self.dt, self.horizon
            )));
        }
        Ok(())
    }
}

/// Aggregated outcome of one epoch of traffic.
///
/// `requests` counts only requests that reached a relay; attempts by
/// isolated nodes are tallied in `unreachable` instead, so
/// `normalized_forwarded` can reach 1 on topologies with isolated nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    pub epoch: usize,
    /// Replicator time the epoch corresponds to.
    pub t: f64,
    /// Dove share driving this epoch's classes and strategy.
    pub p: f64,
    pub s_d: f64,
    pub s_h: f64,
    pub dove_count: usize,
    pub requests: u64,
    pub forwards: u64,
    pub refusals: u64,
    pub unreachable: u64,
    /// forwards / requests, 0 when no requests were made.
    pub normalized_forwarded: f64,
    /// Running forwards / requests over all epochs so far.
    pub cumulative_normalized: f64,
    /// None when the class is empty this epoch.
    pub mean_dove_reputation: Option<f64>,
    pub mean_hawk_reputation: Option<f64>,
    /// Dove relay decisions by outcome, for empirical drift checks.
    pub dove_forwards: u64,
    pub dove_refusals_good: u64,
    pub dove_refusals_bad: u64,
}

/// Runs `rounds_per_epoch` rounds of traffic: in every round each node with
/// pending packets asks one uniformly chosen neighbor to relay. A granted
/// request delivers one packet (source pending decreases) and pays the
/// relay `delta_r`; a refusal costs the relay reputation against the
/// requester's current class. Node classes must already be assigned.
///
/// `epoch`, `t` and `cumulative_normalized` are filled by the caller; this
/// function reports them as the per-epoch values.
pub fn run_epoch<R: Rng>(
    nodes: &mut [NodeState],
    topo: &Topology,
    p: f64,
    strat: DoveStrategy,
    params: &GameParams,
    cfg: &SimConfig,
    rng: &mut R,
) -> RoundRecord {
    let mut requests = 0u64;
    let mut forwards = 0u64;
    let mut refusals = 0u64;
    let mut unreachable = 0u64;
    let mut dove_forwards = 0u64;
    let mut dove_refusals_good = 0u64;
    let mut dove_refusals_bad = 0u64;

    for _ in 0..cfg.rounds_per_epoch {
        for source in 0..nodes.len() {
            if nodes[source].pending_packets == 0 {
                continue;
            }
            let candidates = &topo.neighbors[source];
            if candidates.is_empty() {
                unreachable += 1;
                continue;
            }
            let relay = candidates[rng.gen_range(0..candidates.len())];
            requests += 1;
            let source_reputation = nodes[source].reputation;
            let granted = relay_decision(&nodes[relay], source_reputation, strat, rng);
            let relay_is_dove = nodes[relay].class == NodeClass::Dove;
            nodes[relay].reputation =
                reputation_update(nodes[relay].reputation, granted, source_reputation, params);
            if granted {
                forwards += 1;
                nodes[relay].forwarded_count += 1;
                nodes[source].delivered_count += 1;
                nodes[source].pending_packets -= 1;
                if relay_is_dove {
                    dove_forwards += 1;
                }
            } else {
                refusals += 1;
                nodes[relay].refused_count += 1;
                if relay_is_dove {
                    if source_reputation > 0.0 {
                        dove_refusals_good += 1;
                    } else {
                        dove_refusals_bad += 1;
                    }
                }
            }
        }
    }

    let normalized = if requests > 0 {
        forwards as f64 / requests as f64
    } else {
        0.0
    };
    RoundRecord {
        epoch: 0,
        t: 0.0,
        p,
        s_d: strat.s_d(),
        s_h: strat.s_h(),
        dove_count: nodes.iter().filter(|n| n.class == NodeClass::Dove).count(),
        requests,
        forwards,
        refusals,
        unreachable,
        normalized_forwarded: normalized,
        cumulative_normalized: normalized,
        mean_dove_reputation: class_mean(nodes, NodeClass::Dove),
        mean_hawk_reputation: class_mean(nodes, NodeClass::Hawk),
        dove_forwards,
        dove_refusals_good,
        dove_refusals_bad,
    }
}

fn class_mean(nodes: &[NodeState], class: NodeClass) -> Option<f64> {
    let mut sum = 0.0;
    let mut count = 0usize;
    for node in nodes.iter().filter(|n| n.class == class) {
        sum += node.reputation;
        count += 1;
    }
    (count > 0).then(|| sum / count as f64)
}

/// Full simulation output: per-epoch records, final node states, and the
/// trajectory that drove the class shares.
#[derive(Debug, Clone, PartialEq)]
pub struct SimOutput {
    pub records: Vec<RoundRecord>,
    pub nodes: Vec<NodeState>,
    pub trajectory: Trajectory,
}

/// Number of doves tracking share `p` over `n` nodes: largest-remainder
/// rounding, which for two classes is plain rounding with the half case
/// going to the doves.
pub fn dove_count_for_share(p: f64, n: usize) -> usize {
    ((p * n as f64).round() as usize).min(n)
}

/// Runs the full coupled simulation: the dove share follows the replicator
/// trajectory of the configured mode, the class counts track the share
/// with flips chosen by local imitation, and the dove strategy is
/// re-derived every epoch. Fully deterministic for a fixed seed.
///
/// Two design points keep the per-node ledger consistent with the class
/// definitions while the shares move:
///
/// - a node that changes class re-enters at that class's cold-start
///   reputation (`+delta_r` for doves, `-delta_b` for hawks). Carrying a
///   hawk's accumulated debt into the dove class instead leaves the
///   population wedged in a partial-cooperation state: the debtors are
///   refused as badly reputed and bleed their neighbors `delta_b` per
///   refusal, so the cooperative region stops growing.
/// - flips are ordered by neighborhood evidence, mirroring imitation of
///   visibly successful neighbors: hawks with the most well-reputed
///   neighbors convert first, doves with the fewest defect first (node id
///   breaks ties). Growing the cooperative region as a connected front
///   keeps badly-mixed pockets from freezing mid-transition.
pub fn run_simulation(
    topo_cfg: &TopologyConfig,
    sim_cfg: &SimConfig,
    params: &GameParams,
) -> Result<SimOutput> {
    sim_cfg.validate()?;
    let topo = generate_topology(topo_cfg)?;
    let trajectory = match sim_cfg.mode {
        StrategyMode::Constrained => dynamics::integrate(
            params,
            sim_cfg.p0,
            sim_cfg.dt,
            sim_cfg.horizon,
            sim_cfg.method,
        )?,
        StrategyMode::Baseline => dynamics::integrate_baseline(
            params,
            sim_cfg.p0,
            sim_cfg.dt,
            sim_cfg.horizon,
            sim_cfg.method,
        )?,
    };

    let n = topo_cfg.n_nodes;
    let mut initial_order: Vec<usize> = (0..n).collect();
    initial_order.shuffle(&mut stream_rng(topo_cfg.rng_seed, STREAM_CLASSES));
    let mut decision_rng = stream_rng(topo_cfg.rng_seed, STREAM_DECISIONS);

    let initial_doves = dove_count_for_share(sim_cfg.p0, n);
    let mut nodes: Vec<NodeState> = (0..n)
        .map(|id| NodeState {
            id,
            position: topo.positions[id],
            class: NodeClass::Hawk,
            reputation: -params.delta_b(),
            pending_packets: 0,
            forwarded_count: 0,
            refused_count: 0,
            delivered_count: 0,
        })
        .collect();
    for &id in initial_order.iter().take(initial_doves) {
        nodes[id].class = NodeClass::Dove;
        nodes[id].reputation = params.delta_r();
    }

    let delta = sim_cfg.horizon / sim_cfg.epochs as f64;
    let mut records = Vec::with_capacity(sim_cfg.epochs);
    let mut total_requests = 0u64;
    let mut total_forwards = 0u64;
    for epoch in 0..sim_cfg.epochs {
        let t = epoch as f64 * delta;
        let idx = ((t / sim_cfg.dt).round() as usize).min(trajectory.samples.len() - 1);
        let p = trajectory.samples[idx].p;

        adjust_classes(&mut nodes, &topo, params, dove_count_for_share(p, n));
        for node in nodes.iter_mut() {
            node.pending_packets = sim_cfg.packets_per_node;
        }

        let strat = sim_cfg.mode.dove_strategy(params, p)?;
        let mut record = run_epoch(
            &mut nodes,
            &topo,
            p,
            strat,
            params,
            sim_cfg,
            &mut decision_rng,
        );
        record.epoch = epoch;
        record.t = t;
        total_requests += record.requests;
        total_forwards += record.forwards;
        record.cumulative_normalized = if total_requests > 0 {
            total_forwards as f64 / total_requests as f64
        } else {
            0.0
        };
        records.push(record);
    }

    Ok(SimOutput {
        records,
        nodes,
        trajectory,
    })
}

fn good_neighbor_count(node: usize, nodes: &[NodeState], topo: &Topology) -> usize {
    topo.neighbors[node]
        .iter()
        .filter(|&&j| nodes[j].reputation > 0.0)
        .count()
}

/// Flips nodes until exactly `target` doves remain. Hawks with the most
/// well-reputed neighbors convert first; doves with the fewest defect
/// first. Flipped nodes take the class's cold-start reputation.
fn adjust_classes(nodes: &mut [NodeState], topo: &Topology, params: &GameParams, target: usize) {
    let current = nodes.iter().filter(|n| n.class == NodeClass::Dove).count();
    if target > current {
        let mut hawks: Vec<(usize, usize)> = nodes
            .iter()
            .filter(|n| n.class == NodeClass::Hawk)
            .map(|n| (good_neighbor_count(n.id, nodes, topo), n.id))
            .collect();
        hawks.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        for &(_, id) in hawks.iter().take(target - current) {
            nodes[id].class = NodeClass::Dove;
            nodes[id].reputation = params.delta_r();
        }
    } else if target < current {
        let mut doves: Vec<(usize, usize)> = nodes
            .iter()
            .filter(|n| n.class == NodeClass::Dove)
            .map(|n| (good_neighbor_count(n.id, nodes, topo), n.id))
            .collect();
        doves.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
        for &(_, id) in doves.iter().take(current - target) {
            nodes[id].class = NodeClass::Hawk;
            nodes[id].reputation = -params.delta_b();
        }
    }
}

const STREAM_TOPOLOGY: u64 = 0;
const STREAM_CLASSES: u64 = 1;
const STREAM_DECISIONS: u64 = 2;

// One independent generator stream per concern, all derived from the single
// user-facing seed.
fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_params() -> GameParams {
        GameParams::new(3.0, 3.0, 3.0, 1.0).unwrap()
    }

    fn base_sim_config() -> SimConfig {
        SimConfig {
            packets_per_node: 10,
            epochs: 50,
            rounds_per_epoch: 10,
            mode: StrategyMode::Constrained,
            p0: 0.5,
            dt: 0.01,
            horizon: 10.0,
            method: Method::Rk4,
        }
    }

    fn node(id: usize, class: NodeClass, reputation: f64) -> NodeState {
        NodeState {
            id,
            position: (0.0, 0.0),
            class,
            reputation,
            pending_packets: 0,
            forwarded_count: 0,
            refused_count: 0,
            delivered_count: 0,
        }
    }

    #[test]
    fn adjacency_follows_tx_range() {
        let near = Topology::from_positions(vec![(0.0, 0.0), (100.0, 0.0)], 150.0);
        assert_eq!(near.neighbors[0], vec![1]);
        assert_eq!(near.neighbors[1], vec![0]);

        let far = Topology::from_positions(vec![(0.0, 0.0), (200.0, 0.0)], 150.0);
        assert!(far.neighbors[0].is_empty());
        assert_eq!(far.isolated_count(), 2);
    }

    #[test]
    fn topology_is_deterministic_per_seed() {
        let cfg = TopologyConfig {
            n_nodes: 50,
            area_width: 1000.0,
            area_height: 1000.0,
            tx_range: 150.0,
            rng_seed: 7,
        };
        let a = generate_topology(&cfg).unwrap();
        let b = generate_topology(&cfg).unwrap();
        assert_eq!(a, b);

        let other = generate_topology(&TopologyConfig { rng_seed: 8, ..cfg }).unwrap();
        assert_ne!(a.positions, other.positions);
    }

    #[test]
    fn topology_positions_inside_area() {
        let cfg = TopologyConfig {
            n_nodes: 200,
            area_width: 40.0,
            area_height: 90.0,
            tx_range: 10.0,
            rng_seed: 3,
        };
        let topo = generate_topology(&cfg).unwrap();
        for (x, y) in topo.positions {
            assert!((0.0..=40.0).contains(&x) && (0.0..=90.0).contains(&y));
        }
    }

    #[test]
    fn topology_validation() {
        let cfg = TopologyConfig {
            n_nodes: 1,
            area_width: 10.0,
            area_height: 10.0,
            tx_range: 1.0,
            rng_seed: 0,
        };
        assert!(generate_topology(&cfg).is_err());
        let cfg = TopologyConfig {
            n_nodes: 5,
            area_width: -10.0,
            area_height: 10.0,
            tx_range: 1.0,
            rng_seed: 0,
        };
        assert!(generate_topology(&cfg).is_err());
    }

    #[test]
    fn reputation_update_examples() {
        let params = base_params();
        assert_eq!(reputation_update(0.0, true, -5.0, &params), 3.0);
        assert_eq!(reputation_update(5.0, false, 2.0, &params), 2.0);
        // A requester at exactly zero is treated as badly reputed.
        assert_eq!(reputation_update(5.0, false, 0.0, &params), 4.0);
    }

    #[test]
    fn relay_decision_branches() {
        let mut rng = stream_rng(1, 0);
        let strat = DoveStrategy::new(1.0, 0.0).unwrap();
        let hawk = node(0, NodeClass::Hawk, -1.0);
        for _ in 0..20 {
            assert!(!relay_decision(&hawk, 5.0, strat, &mut rng));
        }
        let dove = node(1, NodeClass::Dove, 3.0);
        for _ in 0..20 {
            assert!(relay_decision(&dove, 2.0, strat, &mut rng));
            assert!(!relay_decision(&dove, -1.0, strat, &mut rng));
        }
    }

    fn clique_fixture() -> (Vec<NodeState>, Topology) {
        let positions = vec![(0.0, 0.0), (10.0, 0.0), (0.0, 10.0), (10.0, 10.0)];
        let topo = Topology::from_positions(positions.clone(), 150.0);
        let nodes = vec![
            node(0, NodeClass::Dove, 3.0),
            node(1, NodeClass::Dove, 3.0),
            node(2, NodeClass::Hawk, -1.0),
            node(3, NodeClass::Hawk, -1.0),
        ];
        (nodes, topo)
    }

    #[test]
    fn epoch_all_hawks_forwards_nothing() {
        let params = base_params();
        let cfg = base_sim_config();
        let topo = Topology::from_positions(vec![(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)], 5.0);
        let mut nodes: Vec<NodeState> = (0..3).map(|i| node(i, NodeClass::Hawk, -1.0)).collect();
        for n in nodes.iter_mut() {
            n.pending_packets = cfg.packets_per_node;
        }
        let strat = DoveStrategy::always_forward();
        let mut rng = stream_rng(5, 0);
        let rec = run_epoch(&mut nodes, &topo, 0.0, strat, &params, &cfg, &mut rng);
        assert_eq!(rec.forwards, 0);
        assert_eq!(rec.normalized_forwarded, 0.0);
        assert!(rec.requests > 0);
        assert!(nodes.iter().all(|n| n.forwarded_count == 0));
    }

    #[test]
    fn epoch_all_good_doves_forward_everything() {
        let params = base_params();
        let cfg = base_sim_config();
        let topo = Topology::from_positions(vec![(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)], 5.0);
        let mut nodes: Vec<NodeState> = (0..3).map(|i| node(i, NodeClass::Dove, 3.0)).collect();
        for n in nodes.iter_mut() {
            n.pending_packets = cfg.packets_per_node;
        }
        let strat = DoveStrategy::new(1.0, 0.0).unwrap();
        let mut rng = stream_rng(5, 0);
        let rec = run_epoch(&mut nodes, &topo, 1.0, strat, &params, &cfg, &mut rng);
        assert_eq!(rec.normalized_forwarded, 1.0);
        assert_eq!(rec.forwards, rec.requests);
    }

    #[test]
    fn epoch_rate_matches_enumerated_expectation_on_clique() {
        // Uniform relay choice on the 4-clique with two good doves and two
        // bad hawks, s = (1, 0): a request is granted iff the source is a
        // dove (good, probability 1/2 of requests) and the chosen relay is
        // the other dove (1 of 3 neighbors), so E[normalized] = 1/6.
        let params = base_params();
        let mut cfg = base_sim_config();
        cfg.rounds_per_epoch = 1;
        let strat = params.optimal_dove_strategy(0.5).unwrap();
        assert_eq!(strat.s_h(), 0.0);

        let mut rng = stream_rng(1234, 0);
        let mut requests = 0u64;
        let mut forwards = 0u64;
        for _ in 0..10_000 {
            let (mut nodes, topo) = clique_fixture();
            for n in nodes.iter_mut() {
                n.pending_packets = 1;
            }
            let rec = run_epoch(&mut nodes, &topo, 0.5, strat, &params, &cfg, &mut rng);
            requests += rec.requests;
            forwards += rec.forwards;
        }
        let rate = forwards as f64 / requests as f64;
        assert!(
            (rate - 1.0 / 6.0).abs() < 0.01,
            "empirical {rate} vs enumerated 1/6"
        );
    }

    #[test]
    fn epoch_conserves_attempts() {
        // Three connected nodes plus one isolated: every isolated attempt
        // is unreachable, everything else is granted or refused.
        let params = base_params();
        let cfg = base_sim_config();
        let positions = vec![(0.0, 0.0), (10.0, 0.0), (0.0, 10.0), (500.0, 500.0)];
        let topo = Topology::from_positions(positions, 50.0);
        let mut nodes = vec![
            node(0, NodeClass::Dove, 3.0),
            node(1, NodeClass::Dove, 3.0),
            node(2, NodeClass::Hawk, -1.0),
            node(3, NodeClass::Dove, 3.0),
        ];
        for n in nodes.iter_mut() {
            n.pending_packets = cfg.packets_per_node;
        }
        let strat = params.optimal_dove_strategy(0.5).unwrap();
        let mut rng = stream_rng(77, 0);
        let rec = run_epoch(&mut nodes, &topo, 0.5, strat, &params, &cfg, &mut rng);
        assert_eq!(rec.forwards + rec.refusals, rec.requests);
        assert_eq!(rec.unreachable, cfg.rounds_per_epoch as u64);
        assert!(rec.unreachable > 0);
    }

    #[test]
    fn simulation_without_doves_forwards_nothing() {
        let params = base_params();
        let topo_cfg = TopologyConfig {
            n_nodes: 10,
            area_width: 100.0,
            area_height: 100.0,
            tx_range: 200.0,
            rng_seed: 21,
        };
        let sim_cfg = SimConfig {
            p0: 0.0,
            epochs: 20,
            ..base_sim_config()
        };
        let out = run_simulation(&topo_cfg, &sim_cfg, &params).unwrap();
        assert!(out
            .records
            .iter()
            .all(|r| r.forwards == 0 && r.normalized_forwarded == 0.0 && r.dove_count == 0));
        assert!(out.records.iter().all(|r| r.mean_dove_reputation.is_none()));
    }

    #[test]
    fn simulation_is_deterministic_per_seed() {
        let params = base_params();
        let topo_cfg = TopologyConfig {
            n_nodes: 20,
            area_width: 500.0,
            area_height: 500.0,
            tx_range: 150.0,
            rng_seed: 99,
        };
        let sim_cfg = SimConfig {
            epochs: 30,
            p0: 0.4,
            ..base_sim_config()
        };
        let a = run_simulation(&topo_cfg, &sim_cfg, &params).unwrap();
        let b = run_simulation(&topo_cfg, &sim_cfg, &params).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn simulation_tracks_rounded_share_exactly() {
        let params = base_params();
        let topo_cfg = TopologyConfig {
            n_nodes: 50,
            area_width: 1000.0,
            area_height: 1000.0,
            tx_range: 150.0,
            rng_seed: 42,
        };
        let sim_cfg = SimConfig {
            epochs: 40,
            p0: 0.3,
            ..base_sim_config()
        };
        let out = run_simulation(&topo_cfg, &sim_cfg, &params).unwrap();
        for rec in &out.records {
            assert_eq!(rec.dove_count, dove_count_for_share(rec.p, 50));
        }
    }

    #[test]
    fn hawks_only_lose_reputation_and_stay_negative() {
        let params = base_params();
        let cfg = base_sim_config();
        let topo_cfg = TopologyConfig {
            n_nodes: 20,
            area_width: 300.0,
            area_height: 300.0,
            tx_range: 200.0,
            rng_seed: 5,
        };
        let topo = generate_topology(&topo_cfg).unwrap();
        let mut nodes: Vec<NodeState> = (0..20)
            .map(|i| {
                let class = if i < 10 {
                    NodeClass::Dove
                } else {
                    NodeClass::Hawk
                };
                let rep = if i < 10 {
                    params.delta_r()
                } else {
                    -params.delta_b()
                };
                let mut n = node(i, class, rep);
                n.position = topo.positions[i];
                n
            })
            .collect();
        let strat = params.optimal_dove_strategy(0.5).unwrap();
        let mut rng = stream_rng(5, 2);
        let mut previous: Vec<f64> = nodes.iter().map(|n| n.reputation).collect();
        for _ in 0..30 {
            for n in nodes.iter_mut() {
                n.pending_packets = cfg.packets_per_node;
            }
            run_epoch(&mut nodes, &topo, 0.5, strat, &params, &cfg, &mut rng);
            for n in &nodes {
                if n.class == NodeClass::Hawk {
                    assert!(n.reputation <= previous[n.id]);
                    assert!(n.reputation < 0.0);
                }
            }
            previous = nodes.iter().map(|n| n.reputation).collect();
        }
        // Every hawk that handled at least one request strictly lost.
        for n in &nodes {
            if n.class == NodeClass::Hawk && n.refused_count > 0 {
                assert!(n.reputation < -params.delta_b());
            }
        }
    }

    #[test]
    fn simulation_config_validation() {
        let params = base_params();
        let topo_cfg = TopologyConfig {
            n_nodes: 5,
            area_width: 100.0,
            area_height: 100.0,
            tx_range: 100.0,
            rng_seed: 1,
        };
        let bad = SimConfig {
            packets_per_node: 0,
            ..base_sim_config()
        };
        assert!(run_simulation(&topo_cfg, &bad, &params).is_err());
        let bad = SimConfig {
            p0: 1.3,
            ..base_sim_config()
        };
        assert!(run_simulation(&topo_cfg, &bad, &params).is_err());
    }

    #[test]
    fn dove_count_rounding() {
        assert_eq!(dove_count_for_share(0.0, 50), 0);
        assert_eq!(dove_count_for_share(1.0, 50), 50);
        assert_eq!(dove_count_for_share(0.5, 51), 26); // half rounds to doves
        assert_eq!(dove_count_for_share(0.3, 50), 15);
        assert_eq!(dove_count_for_share(0.999, 50), 50);
    }
}
