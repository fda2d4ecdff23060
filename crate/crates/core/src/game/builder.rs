use std::collections::HashMap;

use super::{
    AugmentedInfoSet, Edge, GameError, GameTree, HistoryNode, InfoSet, Owner, Player, PublicState,
    LOAD_TOLERANCE,
};

/// What a game definition reports about a state.
#[derive(Debug, Clone, PartialEq)]
pub enum NodeSpec {
    /// Player-one utility.
    Terminal(f64),
    /// Outcome names with probabilities.
    Chance(Vec<(String, f64)>),
    /// Acting player and action names.
    Decision(Player, Vec<String>),
}

/// Rules of a game, expanded into a [`GameTree`] by [`GameTree::build`].
///
/// Observations drive the partitions: two histories belong to the same
/// (augmented) information set of a player iff the player's observation
/// strings are equal, and to the same public state iff their public
/// observations are equal.
pub trait GameDefinition {
    type State: Clone;

    fn name(&self) -> String;
    fn root(&self) -> Self::State;
    fn spec(&self, state: &Self::State) -> NodeSpec;
    fn apply(&self, state: &Self::State, action: usize) -> Self::State;
    /// Everything `player` knows at `state`, including their own past actions.
    fn observation(&self, state: &Self::State, player: Player) -> String;
    fn public_observation(&self, state: &Self::State) -> String;
}

#[derive(Default)]
struct Builder {
    nodes: Vec<HistoryNode>,
    edges: Vec<Edge>,
    action_names: Vec<String>,
    label_ids: HashMap<String, usize>,
    infoset_ids: HashMap<(Player, String), usize>,
    infosets: Vec<InfoSet>,
    aug_ids: HashMap<(Player, String), usize>,
    augmented: Vec<AugmentedInfoSet>,
    public_ids: HashMap<String, usize>,
    public_states: Vec<PublicState>,
}

impl Builder {
    fn label(&mut self, name: &str) -> usize {
        if let Some(&id) = self.label_ids.get(name) {
            return id;
        }
        let id = self.action_names.len();
        self.action_names.push(name.to_string());
        self.label_ids.insert(name.to_string(), id);
        id
    }

    fn public_state(&mut self, key: String, owner: Owner) -> Result<usize, GameError> {
        if let Some(&id) = self.public_ids.get(&key) {
            if self.public_states[id].owner != owner {
                return Err(GameError::MixedPublicOwner { key });
            }
            return Ok(id);
        }
        let id = self.public_states.len();
        self.public_states.push(PublicState {
            id,
            key: key.clone(),
            members: Vec::new(),
            successors: Vec::new(),
            predecessor: None,
            owner,
            infosets: Vec::new(),
            augmented: [Vec::new(), Vec::new()],
            depth: 0,
        });
        self.public_ids.insert(key, id);
        Ok(id)
    }

    fn add<G: GameDefinition>(
        &mut self,
        game: &G,
        state: &G::State,
        parent: Option<usize>,
        depth: usize,
    ) -> Result<usize, GameError> {
        let id = self.nodes.len();
        let spec = game.spec(state);
        let (owner, names, probs, utility) = match spec {
            NodeSpec::Terminal(u) => (Owner::Terminal, Vec::new(), Vec::new(), Some(u)),
            NodeSpec::Chance(outcomes) => {
                let sum: f64 = outcomes.iter().map(|(_, p)| p).sum();
                if (sum - 1.0).abs() > LOAD_TOLERANCE {
                    return Err(GameError::ChanceDistribution { node: id, sum });
                }
                if outcomes.iter().any(|(_, p)| *p <= 0.0) {
                    return Err(GameError::ChanceSupport { node: id });
                }
                let (names, probs) = outcomes.into_iter().unzip();
                (Owner::Chance, names, probs, None)
            }
            NodeSpec::Decision(player, actions) => {
                if actions.is_empty() {
                    return Err(GameError::NoActions { node: id });
                }
                let n = actions.len();
                (Owner::Player(player), actions, vec![0.0; n], None)
            }
        };

        let public_state = self.public_state(game.public_observation(state), owner)?;
        self.public_states[public_state].members.push(id);

        let first_edge = self.edges.len();
        for (name, &p) in names.iter().zip(&probs) {
            let label = self.label(name);
            self.edges.push(Edge {
                label,
                child: usize::MAX,
                chance_prob: p,
            });
        }

        let infoset = match owner {
            Owner::Player(player) => {
                let key = (player, game.observation(state, player));
                let next = self.infosets.len();
                let iid = *self.infoset_ids.entry(key.clone()).or_insert(next);
                if iid == next {
                    self.infosets.push(InfoSet {
                        id: iid,
                        owner: player,
                        key: format!("{}:{}", player, key.1),
                        members: Vec::new(),
                        num_actions: names.len(),
                        labels: self.edges[first_edge..].iter().map(|e| e.label).collect(),
                        offset: 0,
                    });
                }
                self.infosets[iid].members.push(id);
                Some(iid)
            }
            _ => None,
        };

        let augmented = if utility.is_none() {
            let mut ids = [0; 2];
            for player in Player::BOTH {
                let key = (player, game.observation(state, player));
                let next = self.augmented.len();
                let aid = *self.aug_ids.entry(key.clone()).or_insert(next);
                if aid == next {
                    self.augmented.push(AugmentedInfoSet {
                        id: aid,
                        player,
                        key: format!("{}:{}", player, key.1),
                        members: Vec::new(),
                        labels: Vec::new(),
                        slot_offset: 0,
                    });
                }
                self.augmented[aid].members.push(id);
                ids[player.index()] = aid;
            }
            Some(ids)
        } else {
            None
        };

        self.nodes.push(HistoryNode {
            parent,
            owner,
            first_edge,
            num_actions: names.len(),
            infoset,
            augmented,
            public_state,
            utility,
            depth,
        });

        for a in 0..names.len() {
            let next = game.apply(state, a);
            let child = self.add(game, &next, Some(id), depth + 1)?;
            self.edges[first_edge + a].child = child;
        }
        Ok(id)
    }
}

impl GameTree {
    /// Expands a game definition and validates every structural invariant:
    /// normalized chance distributions, consistent action sets, perfect
    /// recall, single-owner public states closed under every information
    /// set relation, and timeability of the public partition.
    pub fn build<G: GameDefinition>(game: &G) -> Result<GameTree, GameError> {
        let mut b = Builder::default();
        b.add(game, &game.root(), None, 0)?;

        let mut offset = 0;
        for info in &mut b.infosets {
            info.offset = offset;
            offset += info.num_actions;
        }
        let num_infoset_actions = offset;

        // Augmented slots keyed by action label.
        let mut aug_slots = [vec![usize::MAX; b.edges.len()], vec![usize::MAX; b.edges.len()]];
        let mut slot_offset = 0;
        for aug in &mut b.augmented {
            let mut labels: Vec<usize> = Vec::new();
            for &m in &aug.members {
                let n = &b.nodes[m];
                for e in n.first_edge..n.first_edge + n.num_actions {
                    let l = b.edges[e].label;
                    let k = match labels.iter().position(|&x| x == l) {
                        Some(k) => k,
                        None => {
                            labels.push(l);
                            labels.len() - 1
                        }
                    };
                    aug_slots[aug.player.index()][e] = slot_offset + k;
                }
            }
            aug.slot_offset = slot_offset;
            slot_offset += labels.len();
            aug.labels = labels;
        }

        let mut member_position = vec![0; b.nodes.len()];
        for s in &b.public_states {
            for (k, &m) in s.members.iter().enumerate() {
                member_position[m] = k;
            }
        }

        let mut tree = GameTree {
            name: game.name(),
            nodes: b.nodes,
            edges: b.edges,
            infosets: b.infosets,
            augmented: b.augmented,
            public_states: b.public_states,
            action_names: b.action_names,
            aug_slots,
            num_infoset_actions,
            num_aug_slots: slot_offset,
            member_position,
        };
        tree.link_public_states()?;
        tree.validate()?;
        Ok(tree)
    }

    fn link_public_states(&mut self) -> Result<(), GameError> {
        let n = self.public_states.len();
        for sid in 0..n {
            let members = self.public_states[sid].members.clone();
            let parents: Vec<Option<usize>> = members
                .iter()
                .map(|&m| self.nodes[m].parent.map(|p| self.nodes[p].public_state))
                .collect();
            let pred = parents[0];
            if parents.iter().any(|&p| p != pred) || pred == Some(sid) {
                return Err(GameError::NotTimeable {
                    key: self.public_states[sid].key.clone(),
                });
            }
            self.public_states[sid].predecessor = pred;
            let mut infosets: Vec<usize> = members.iter().filter_map(|&m| self.nodes[m].infoset).collect();
            infosets.sort_unstable();
            infosets.dedup();
            self.public_states[sid].infosets = infosets;
            for player in Player::BOTH {
                let mut aug: Vec<usize> = members
                    .iter()
                    .filter_map(|&m| self.nodes[m].augmented.map(|a| a[player.index()]))
                    .collect();
                aug.sort_unstable();
                aug.dedup();
                self.public_states[sid].augmented[player.index()] = aug;
            }
        }
        // Successors in order of first appearance along member edges, so that
        // successor order follows action order when actions are public.
        for sid in 0..n {
            let mut order = Vec::new();
            for &m in &self.public_states[sid].members {
                for e in self.nodes[m].edge_range() {
                    let s = self.nodes[self.edges[e].child].public_state;
                    if !order.contains(&s) {
                        order.push(s);
                    }
                }
            }
            self.public_states[sid].successors = order;
        }
        // Depth along the public tree; predecessors always have smaller ids.
        for sid in 0..n {
            let d = self.public_states[sid]
                .predecessor
                .map(|p| self.public_states[p].depth + 1)
                .unwrap_or(0);
            self.public_states[sid].depth = d;
        }
        Ok(())
    }

    /// Sequence of (infoset, action) pairs `player` took on the way to `node`.
    fn own_sequence(&self, node: usize, player: Player) -> Vec<(usize, usize)> {
        let path = self.path(node);
        path.windows(2)
            .filter_map(|w| {
                let n = &self.nodes[w[0]];
                match n.owner {
                    Owner::Player(p) if p == player => {
                        Some((n.infoset.unwrap(), self.action_to(w[0], w[1]).unwrap()))
                    }
                    _ => None,
                }
            })
            .collect()
    }

    fn validate(&self) -> Result<(), GameError> {
        for info in &self.infosets {
            let seq = self.own_sequence(info.members[0], info.owner);
            for &m in &info.members {
                let labels: Vec<usize> = self.edges(m).iter().map(|e| e.label).collect();
                if labels != info.labels {
                    return Err(GameError::InconsistentActions {
                        key: info.key.clone(),
                    });
                }
                if self.own_sequence(m, info.owner) != seq {
                    return Err(GameError::ImperfectRecall {
                        key: info.key.clone(),
                    });
                }
            }
        }
        let closed = |key: &str, members: &[usize]| {
            let s = self.nodes[members[0]].public_state;
            if members.iter().all(|&m| self.nodes[m].public_state == s) {
                Ok(())
            } else {
                Err(GameError::PublicClosure { key: key.to_string() })
            }
        };
        for info in &self.infosets {
            closed(&info.key, &info.members)?;
        }
        for aug in &self.augmented {
            closed(&aug.key, &aug.members)?;
        }
        Ok(())
    }
}
