//! In-process federated round: clients compute gradients on private shards,
//! the server aggregates, and an adversary taps one client's share exactly
//! as transmitted (after any privacy noise).

use crate::datasets::Dataset;
use crate::error::{Error, Result};
use crate::model::{GradientKind, GradientVector, SupervisedModel};
use crate::privacy::NoiseConfig;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Aggregation {
    Sum,
    Mean,
}

#[derive(Debug, Clone)]
pub struct FlClient<M> {
    pub model: M,
    pub shard: Vec<(Vec<f64>, f64)>,
}

#[derive(Debug, Clone)]
pub struct FlRound<M> {
    pub clients: Vec<FlClient<M>>,
    pub aggregation: Aggregation,
    pub round_index: u64,
    /// Which client's transmission the adversary observes.
    pub intercepted_client: usize,
    /// Gradient convention shared by every client this round.
    pub kind: GradientKind,
}

impl<M: SupervisedModel> FlRound<M> {
    /// A one-client round over the given rows; the degenerate setup used by
    /// the single-victim attack experiments.
    pub fn single(model: M, shard: Vec<(Vec<f64>, f64)>, kind: GradientKind) -> Self {
        FlRound {
            clients: vec![FlClient { model, shard }],
            aggregation: Aggregation::Sum,
            round_index: 0,
            intercepted_client: 0,
            kind,
        }
    }

    /// Split a dataset into disjoint contiguous shards, one per client, all
    /// starting from the same model state.
    pub fn split(
        model: M,
        data: &Dataset,
        client_count: usize,
        aggregation: Aggregation,
        kind: GradientKind,
    ) -> Result<Self> {
        if client_count == 0 || data.rows.len() < client_count {
            return Err(Error::Config(format!(
                "cannot shard {} rows across {} clients",
                data.rows.len(),
                client_count
            )));
        }
        let rows = data.batch_rows();
        let per = rows.len() / client_count;
        let clients = (0..client_count)
            .map(|c| {
                let end = if c == client_count - 1 { rows.len() } else { (c + 1) * per };
                FlClient { model: model.clone(), shard: rows[c * per..end].to_vec() }
            })
            .collect();
        Ok(FlRound { clients, aggregation, round_index: 0, intercepted_client: 0, kind })
    }

    fn validate(&self) -> Result<()> {
        if self.clients.is_empty() {
            return Err(Error::Config("federated round needs at least one client".into()));
        }
        if self.intercepted_client >= self.clients.len() {
            return Err(Error::Config(format!(
                "intercepted client {} out of range for {} clients",
                self.intercepted_client,
                self.clients.len()
            )));
        }
        if self.clients.iter().any(|c| c.shard.is_empty()) {
            return Err(Error::Config("every client shard must be non-empty".into()));
        }
        let reference = self.clients[0].model.fingerprint();
        if self.clients.iter().any(|c| c.model.fingerprint() != reference) {
            return Err(Error::Config(
                "clients must share identical architecture and weights at round start".into(),
            ));
        }
        Ok(())
    }
}

/// What one round produces: the server-side aggregate and exactly what the
/// adversary saw on the wire. The attacker path receives no shard data.
#[derive(Debug, Clone)]
pub struct RoundOutput {
    pub aggregated: GradientVector,
    pub intercepted: GradientVector,
}

/// Each client computes its shard's batch gradient, noise is applied to the
/// transmission, and the server reduces the shares in fixed client order.
pub fn run_round<M: SupervisedModel>(round: &FlRound<M>, noise: &NoiseConfig) -> Result<RoundOutput> {
    round.validate()?;
    noise.validate()?;

    let mut shares = Vec::with_capacity(round.clients.len());
    for (index, client) in round.clients.iter().enumerate() {
        let mut share = client.model.shared_gradient(&client.shard, round.kind)?;
        let mut rng = rng::substream(noise.seed, "client-noise", index as u64);
        noise.perturb(share.values_mut(), &mut rng);
        shares.push(share);
    }

    let intercepted = shares[round.intercepted_client].clone();
    let mut values = vec![0.0; intercepted.len()];
    for share in &shares {
        intercepted.check_comparable(share)?;
        for (acc, v) in values.iter_mut().zip(share.values()) {
            *acc += v;
        }
    }
    if round.aggregation == Aggregation::Mean {
        let scale = 1.0 / shares.len() as f64;
        for v in &mut values {
            *v *= scale;
        }
    }
    let total_rows: usize = round.clients.iter().map(|c| c.shard.len()).sum();
    let aggregated = GradientVector::new(values, total_rows, round.kind, intercepted.fingerprint());
    Ok(RoundOutput { aggregated, intercepted })
}

/// Multi-round accumulator G_i = G_{i−1} + Σ, kept for training realism;
/// the attack consumes a single round's intercepted share.
#[derive(Debug, Clone, Default)]
pub struct GradientAccumulator {
    total: Option<GradientVector>,
}

impl GradientAccumulator {
    pub fn add(&mut self, aggregated: &GradientVector) -> Result<()> {
        match &mut self.total {
            None => self.total = Some(aggregated.clone()),
            Some(total) => {
                total.check_comparable(aggregated)?;
                for (acc, v) in total.values_mut().iter_mut().zip(aggregated.values()) {
                    *acc += v;
                }
            }
        }
        Ok(())
    }

    pub fn total(&self) -> Option<&GradientVector> {
        self.total.as_ref()
    }
}
