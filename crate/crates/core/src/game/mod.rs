//! Materialized two-player zero-sum extensive-form games.
//!
//! A [`GameTree`] stores every history of a game in preorder, so a parent
//! always has a smaller index than its children and a reverse scan over the
//! node array visits the tree bottom-up. Player-one utilities are stored at
//! terminals; player two receives the negation.
//!
//! Besides the acting player's information sets the tree materializes
//! *augmented* information sets for both players at every non-terminal
//! history, and the public-state partition used by public outcome sampling.

mod builder;
mod eval;
mod profile;

pub use builder::{GameDefinition, NodeSpec};
pub use eval::{
    best_response_value, expected_utilities, expected_utility, exploitability, reach_probabilities,
    reaches, Reach,
};
pub use profile::{ProfileError, StrategyProfile};

use thiserror::Error;

/// Distribution tolerance applied when a tree is built.
pub const LOAD_TOLERANCE: f64 = 1e-12;
/// Distribution tolerance applied to strategies at runtime.
pub const RUNTIME_TOLERANCE: f64 = 1e-9;

/// One of the two strategic players.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Player {
    One,
    Two,
}

impl Player {
    pub const BOTH: [Player; 2] = [Player::One, Player::Two];

    pub fn index(self) -> usize {
        match self {
            Player::One => 0,
            Player::Two => 1,
        }
    }

    pub fn from_index(index: usize) -> Player {
        if index == 0 {
            Player::One
        } else {
            Player::Two
        }
    }

    pub fn opponent(self) -> Player {
        match self {
            Player::One => Player::Two,
            Player::Two => Player::One,
        }
    }

    /// Converts a player-one utility into this player's utility.
    pub fn sign(self) -> f64 {
        match self {
            Player::One => 1.0,
            Player::Two => -1.0,
        }
    }
}

impl std::fmt::Display for Player {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Player::One => write!(f, "P1"),
            Player::Two => write!(f, "P2"),
        }
    }
}

/// Who moves at a history.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Owner {
    Player(Player),
    Chance,
    Terminal,
}

/// An action edge. `label` indexes [`GameTree::action_name`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub label: usize,
    pub child: usize,
    /// Outcome probability at chance nodes, zero elsewhere.
    pub chance_prob: f64,
}

#[derive(Debug, Clone)]
pub struct HistoryNode {
    pub parent: Option<usize>,
    pub owner: Owner,
    pub first_edge: usize,
    pub num_actions: usize,
    /// Information set of the acting player.
    pub infoset: Option<usize>,
    /// Augmented information sets of both players, present at non-terminals.
    pub augmented: Option<[usize; 2]>,
    pub public_state: usize,
    /// Player-one utility, present iff terminal.
    pub utility: Option<f64>,
    pub depth: usize,
}

impl HistoryNode {
    pub fn is_terminal(&self) -> bool {
        matches!(self.owner, Owner::Terminal)
    }

    pub fn edge_range(&self) -> std::ops::Range<usize> {
        self.first_edge..self.first_edge + self.num_actions
    }
}

#[derive(Debug, Clone)]
pub struct InfoSet {
    pub id: usize,
    pub owner: Player,
    pub key: String,
    pub members: Vec<usize>,
    pub num_actions: usize,
    /// Action labels shared by every member.
    pub labels: Vec<usize>,
    /// Offset of this infoset's first action in per-(infoset, action) arrays.
    pub offset: usize,
}

impl InfoSet {
    pub fn range(&self) -> std::ops::Range<usize> {
        self.offset..self.offset + self.num_actions
    }
}

/// Histories a player cannot tell apart, whether or not the player acts there.
#[derive(Debug, Clone)]
pub struct AugmentedInfoSet {
    pub id: usize,
    pub player: Player,
    pub key: String,
    pub members: Vec<usize>,
    /// Union of action labels over members; slot `k` is `slot_offset + k`.
    pub labels: Vec<usize>,
    pub slot_offset: usize,
}

#[derive(Debug, Clone)]
pub struct PublicState {
    pub id: usize,
    pub key: String,
    pub members: Vec<usize>,
    pub successors: Vec<usize>,
    pub predecessor: Option<usize>,
    pub owner: Owner,
    /// Information sets of the acting player contained in this state.
    pub infosets: Vec<usize>,
    /// Augmented information sets of each player contained in this state.
    pub augmented: [Vec<usize>; 2],
    pub depth: usize,
}

impl PublicState {
    pub fn is_terminal(&self) -> bool {
        matches!(self.owner, Owner::Terminal)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GameError {
    #[error("decision node {node} has no actions")]
    NoActions { node: usize },
    #[error("chance node {node} has a distribution summing to {sum}")]
    ChanceDistribution { node: usize, sum: f64 },
    #[error("chance node {node} has a non-positive outcome probability")]
    ChanceSupport { node: usize },
    #[error("information set {key} mixes action sets")]
    InconsistentActions { key: String },
    #[error("information set {key} violates perfect recall")]
    ImperfectRecall { key: String },
    #[error("public state {key} mixes acting owners")]
    MixedPublicOwner { key: String },
    #[error("information set {key} spans several public states")]
    PublicClosure { key: String },
    #[error("public state {key} is not timeable")]
    NotTimeable { key: String },
    #[error("unknown game '{0}'")]
    UnknownGame(String),
    #[error("decision node {node} has no call/check action")]
    NoCallAction { node: usize },
}

/// An immutable, fully expanded game tree.
#[derive(Debug, Clone)]
pub struct GameTree {
    pub(crate) name: String,
    pub(crate) nodes: Vec<HistoryNode>,
    pub(crate) edges: Vec<Edge>,
    pub(crate) infosets: Vec<InfoSet>,
    pub(crate) augmented: Vec<AugmentedInfoSet>,
    pub(crate) public_states: Vec<PublicState>,
    pub(crate) action_names: Vec<String>,
    /// Per player, per edge: slot in the augmented-infoset value space.
    pub(crate) aug_slots: [Vec<usize>; 2],
    pub(crate) num_infoset_actions: usize,
    pub(crate) num_aug_slots: usize,
    /// Index of each node within its public state's member list.
    pub(crate) member_position: Vec<usize>,
}

impl GameTree {
    pub const ROOT: usize = 0;

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn nodes(&self) -> &[HistoryNode] {
        &self.nodes
    }

    pub fn node(&self, node: usize) -> &HistoryNode {
        &self.nodes[node]
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edge(&self, edge: usize) -> &Edge {
        &self.edges[edge]
    }

    /// Outgoing edges of a node, in action order.
    pub fn edges(&self, node: usize) -> &[Edge] {
        let n = &self.nodes[node];
        &self.edges[n.edge_range()]
    }

    pub fn child(&self, node: usize, action: usize) -> usize {
        self.edges[self.nodes[node].first_edge + action].child
    }

    pub fn infosets(&self) -> &[InfoSet] {
        &self.infosets
    }

    pub fn infoset(&self, id: usize) -> &InfoSet {
        &self.infosets[id]
    }

    pub fn augmented_infosets(&self) -> &[AugmentedInfoSet] {
        &self.augmented
    }

    pub fn public_states(&self) -> &[PublicState] {
        &self.public_states
    }

    pub fn public_state(&self, id: usize) -> &PublicState {
        &self.public_states[id]
    }

    pub fn action_name(&self, label: usize) -> &str {
        &self.action_names[label]
    }

    pub fn action_names(&self) -> &[String] {
        &self.action_names
    }

    pub fn label_id(&self, name: &str) -> Option<usize> {
        self.action_names.iter().position(|n| n == name)
    }

    /// Total number of (infoset, action) pairs.
    pub fn num_infoset_actions(&self) -> usize {
        self.num_infoset_actions
    }

    pub fn num_aug_slots(&self) -> usize {
        self.num_aug_slots
    }

    /// Slot of `edge` in `player`'s augmented-infoset value space.
    pub fn aug_slot(&self, player: Player, edge: usize) -> usize {
        self.aug_slots[player.index()][edge]
    }

    pub fn member_position(&self, node: usize) -> usize {
        self.member_position[node]
    }

    pub fn terminals(&self) -> impl Iterator<Item = usize> + '_ {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| n.is_terminal())
            .map(|(i, _)| i)
    }

    pub fn num_terminals(&self) -> usize {
        self.terminals().count()
    }

    /// Root-to-node path, root first.
    pub fn path(&self, node: usize) -> Vec<usize> {
        let mut path = vec![node];
        let mut cur = node;
        while let Some(p) = self.nodes[cur].parent {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }

    /// Action index at `parent` leading to `child`.
    pub fn action_to(&self, parent: usize, child: usize) -> Option<usize> {
        self.edges(parent).iter().position(|e| e.child == child)
    }

    pub fn max_actions(&self) -> usize {
        self.nodes.iter().map(|n| n.num_actions).max().unwrap_or(0)
    }
}
