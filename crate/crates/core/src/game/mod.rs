//! Explicit trees for finite zero-sum perfect-recall extensive-form games.
//!
//! A [`GameSpec`] owns the full node table (chance, decision and terminal
//! nodes), one infoset table per player, and the dense sequence index that
//! the sequence-form machinery is built on. Specs are immutable after
//! construction and safe to share across threads.

mod builder;
mod kuhn;
mod leduc;
mod liars_dice;
mod sampling;
mod textfmt;

pub use builder::GameBuilder;
pub use kuhn::build_kuhn;
pub use leduc::build_leduc;
pub use liars_dice::{build_liars_dice, build_liars_dice_with_budget};
pub use sampling::{sample_episode, sample_episode_seeded, DecisionRecord, Trajectory};
pub use textfmt::{load_game, parse_game, serialize_game};

use std::collections::HashMap;

/// Default cap on the number of nodes a single game may hold.
pub const DEFAULT_NODE_BUDGET: usize = 10_000_000;

/// Tolerance used when checking that probability vectors sum to one.
pub const SIMPLEX_TOL: f64 = 1e-12;

/// The two players of a zero-sum game. `Min` pays the terminal loss,
/// `Max` receives it (equivalently, pays one minus the loss).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Player {
    Min,
    Max,
}

impl Player {
    pub const BOTH: [Player; 2] = [Player::Min, Player::Max];

    pub fn opponent(self) -> Player {
        match self {
            Player::Min => Player::Max,
            Player::Max => Player::Min,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Player::Min => 0,
            Player::Max => 1,
        }
    }

    pub fn from_index(i: usize) -> Player {
        match i {
            0 => Player::Min,
            1 => Player::Max,
            _ => panic!("player index out of range: {i}"),
        }
    }
}

impl std::fmt::Display for Player {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Player::Min => write!(f, "min"),
            Player::Max => write!(f, "max"),
        }
    }
}

/// Index into the node table of a [`GameSpec`].
pub type NodeId = usize;
/// Index into one player's infoset table.
pub type InfosetId = usize;

/// Payload of a single tree node.
#[derive(Clone, Debug)]
pub enum NodeKind {
    /// Nature moves; outcomes carry strictly positive probabilities summing to one.
    Chance { outcomes: Vec<(NodeId, f64)> },
    /// One player moves. `edges` is aligned with the owning infoset's
    /// ordered action list: `edges[pos]` is `(action id, child)`.
    Decision {
        player: Player,
        infoset: InfosetId,
        edges: Vec<(u32, NodeId)>,
    },
    /// The episode ends with the given min-player loss in `[0, 1]`.
    Terminal { loss: f64 },
}

#[derive(Clone, Debug)]
pub struct GameNode {
    pub kind: NodeKind,
}

/// The sequence leading into an infoset: the owner's previous
/// (infoset, action) pair, or the root if the owner has not acted yet.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParentSeq {
    Root,
    Seq {
        infoset: InfosetId,
        action_pos: usize,
    },
}

/// A perfect-recall information set of one player.
#[derive(Clone, Debug)]
pub struct InfoSet {
    pub id: InfosetId,
    pub owner: Player,
    /// Human-readable label; unique within the owner's table.
    pub label: String,
    /// Ordered action ids offered at every member node.
    pub actions: Vec<u32>,
    /// Decision nodes grouped into this infoset.
    pub members: Vec<NodeId>,
    pub parent: ParentSeq,
    /// 1-based number of owner decisions up to and including this one.
    pub depth: usize,
    /// Dense sequence index of `(self, actions[0])`; action `pos` maps to
    /// `seq_offset + pos`.
    pub seq_offset: usize,
    /// Per action position: infosets that directly follow `(self, action)`.
    pub children: Vec<Vec<InfosetId>>,
}

impl InfoSet {
    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn seq_index(&self, action_pos: usize) -> usize {
        debug_assert!(action_pos < self.actions.len());
        self.seq_offset + action_pos
    }
}

/// A validated extensive-form game.
#[derive(Clone, Debug)]
pub struct GameSpec {
    pub(crate) name: String,
    pub(crate) nodes: Vec<GameNode>,
    pub(crate) root: NodeId,
    pub(crate) infosets: [Vec<InfoSet>; 2],
    pub(crate) root_infosets: [Vec<InfosetId>; 2],
    /// Total action counts per player (`A_X` for min, `B_Y` for max).
    pub(crate) seq_counts: [usize; 2],
    /// Per player: maximum number of own decisions along any path.
    pub(crate) depths: [usize; 2],
    /// Per player: largest action count over own infosets.
    pub(crate) max_actions: [usize; 2],
    pub(crate) labels: [HashMap<String, InfosetId>; 2],
}

impl GameSpec {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn node(&self, id: NodeId) -> &GameNode {
        &self.nodes[id]
    }

    pub fn infosets(&self, player: Player) -> &[InfoSet] {
        &self.infosets[player.index()]
    }

    pub fn infoset(&self, player: Player, id: InfosetId) -> &InfoSet {
        &self.infosets[player.index()][id]
    }

    /// Infosets of depth 1 (parent sequence is the root).
    pub fn root_infosets(&self, player: Player) -> &[InfosetId] {
        &self.root_infosets[player.index()]
    }

    /// Total number of (infoset, action) sequences of the player.
    pub fn seq_count(&self, player: Player) -> usize {
        self.seq_counts[player.index()]
    }

    /// Maximum number of the player's decisions along any root-to-terminal path.
    pub fn player_depth(&self, player: Player) -> usize {
        self.depths[player.index()]
    }

    /// Largest number of legal actions over the player's infosets.
    pub fn max_actions(&self, player: Player) -> usize {
        self.max_actions[player.index()]
    }

    pub fn infoset_by_label(&self, player: Player, label: &str) -> Option<InfosetId> {
        self.labels[player.index()].get(label).copied()
    }

    pub fn seq_index(&self, player: Player, infoset: InfosetId, action_pos: usize) -> usize {
        self.infosets[player.index()][infoset].seq_index(action_pos)
    }

    /// Iterates infoset ids of the player in an order where every parent
    /// precedes its children (construction order is a DFS preorder).
    pub fn infoset_ids_topological(&self, player: Player) -> impl Iterator<Item = InfosetId> + '_ {
        // Ids are assigned in first-visit DFS order, so the parent of an
        // infoset always carries a smaller id.
        0..self.infosets[player.index()].len()
    }
}
