use std::collections::HashMap;

use super::{
    GameNode, GameSpec, InfoSet, InfosetId, NodeId, NodeKind, ParentSeq, Player,
    DEFAULT_NODE_BUDGET, SIMPLEX_TOL,
};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub(crate) enum ProtoNode {
    Chance {
        outcomes: Vec<(NodeId, f64)>,
    },
    Decision {
        player: Player,
        label: String,
        edges: Vec<(u32, NodeId)>,
    },
    Terminal {
        loss: f64,
    },
}

/// Incremental construction of a [`GameSpec`].
///
/// Nodes are added bottom-up (children before parents) or reserved first and
/// filled in later; `finalize` runs every structural check: single-rooted
/// tree, chance probabilities, terminal losses, infoset consistency and
/// perfect recall.
pub struct GameBuilder {
    name: String,
    nodes: Vec<Option<ProtoNode>>,
    display: Vec<Option<String>>,
    budget: usize,
}

impl GameBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        GameBuilder {
            name: name.into(),
            nodes: Vec::new(),
            display: Vec::new(),
            budget: DEFAULT_NODE_BUDGET,
        }
    }

    pub fn with_node_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    fn push(&mut self, node: ProtoNode) -> NodeId {
        self.nodes.push(Some(node));
        self.display.push(None);
        self.nodes.len() - 1
    }

    pub fn chance(&mut self, outcomes: Vec<(NodeId, f64)>) -> NodeId {
        self.push(ProtoNode::Chance { outcomes })
    }

    pub fn decision(
        &mut self,
        player: Player,
        label: impl Into<String>,
        edges: Vec<(u32, NodeId)>,
    ) -> NodeId {
        self.push(ProtoNode::Decision {
            player,
            label: label.into(),
            edges,
        })
    }

    pub fn terminal(&mut self, loss: f64) -> NodeId {
        self.push(ProtoNode::Terminal { loss })
    }

    /// Reserves a node id to be filled in later, enabling top-down
    /// construction with forward references.
    pub fn reserve(&mut self) -> NodeId {
        self.nodes.push(None);
        self.display.push(None);
        self.nodes.len() - 1
    }

    pub fn set_chance(&mut self, id: NodeId, outcomes: Vec<(NodeId, f64)>) {
        self.nodes[id] = Some(ProtoNode::Chance { outcomes });
    }

    pub fn set_decision(
        &mut self,
        id: NodeId,
        player: Player,
        label: impl Into<String>,
        edges: Vec<(u32, NodeId)>,
    ) {
        self.nodes[id] = Some(ProtoNode::Decision {
            player,
            label: label.into(),
            edges,
        });
    }

    pub fn set_terminal(&mut self, id: NodeId, loss: f64) {
        self.nodes[id] = Some(ProtoNode::Terminal { loss });
    }

    pub(crate) fn set_display_name(&mut self, id: NodeId, name: String) {
        self.display[id] = Some(name);
    }

    fn node_name(&self, id: NodeId) -> String {
        self.display[id]
            .clone()
            .unwrap_or_else(|| format!("n{id}"))
    }

    fn invalid(&self, id: NodeId, message: impl Into<String>) -> Error {
        Error::InvalidGame {
            node: self.node_name(id),
            message: message.into(),
        }
    }

    /// Validates the tree and produces the finished [`GameSpec`].
    pub fn finalize(self, root: NodeId) -> Result<GameSpec> {
        if self.nodes.len() > self.budget {
            return Err(Error::NodeBudget {
                nodes: self.nodes.len(),
                budget: self.budget,
            });
        }
        for (id, node) in self.nodes.iter().enumerate() {
            if node.is_none() {
                return Err(self.invalid(id, "reserved node was never filled in"));
            }
        }

        self.check_local(root)?;
        let (infosets, depths) = self.assign_infosets(root)?;
        self.assemble(root, infosets, depths)
    }

    /// Per-node checks that need no traversal context.
    fn check_local(&self, root: NodeId) -> Result<()> {
        if root >= self.nodes.len() {
            return Err(Error::InvalidGame {
                node: format!("n{root}"),
                message: "root id out of range".into(),
            });
        }
        for (id, node) in self.nodes.iter().enumerate() {
            match node.as_ref().unwrap() {
                ProtoNode::Chance { outcomes } => {
                    if outcomes.is_empty() {
                        return Err(self.invalid(id, "chance node has no outcomes"));
                    }
                    let mut sum = 0.0;
                    for &(child, p) in outcomes {
                        if child >= self.nodes.len() {
                            return Err(self.invalid(id, format!("child {child} out of range")));
                        }
                        if !p.is_finite() || p <= 0.0 {
                            return Err(
                                self.invalid(id, format!("chance probability {p} not positive"))
                            );
                        }
                        sum += p;
                    }
                    if (sum - 1.0).abs() > SIMPLEX_TOL {
                        return Err(self.invalid(id, format!("probabilities sum to {sum}")));
                    }
                }
                ProtoNode::Decision { edges, .. } => {
                    if edges.is_empty() {
                        return Err(self.invalid(id, "decision node has no actions"));
                    }
                    let mut seen = std::collections::HashSet::new();
                    for &(action, child) in edges {
                        if child >= self.nodes.len() {
                            return Err(self.invalid(id, format!("child {child} out of range")));
                        }
                        if !seen.insert(action) {
                            return Err(self.invalid(id, format!("duplicate action id {action}")));
                        }
                    }
                }
                ProtoNode::Terminal { loss } => {
                    if !loss.is_finite() || *loss < 0.0 || *loss > 1.0 {
                        return Err(self.invalid(id, format!("terminal loss {loss} outside [0, 1]")));
                    }
                }
            }
        }
        Ok(())
    }

    /// Walks the tree, groups decision nodes into infosets by (player, label),
    /// verifies the rooted-tree property and perfect recall, and measures the
    /// per-player decision depth.
    #[allow(clippy::type_complexity)]
    fn assign_infosets(&self, root: NodeId) -> Result<(Vec<ProtoInfoset>, [usize; 2])> {
        // (player, label) -> index into protos
        let mut by_key: HashMap<(usize, String), usize> = HashMap::new();
        let mut protos: Vec<ProtoInfoset> = Vec::new();
        let mut visited = vec![false; self.nodes.len()];
        let mut depths = [0usize; 2];
        // Own (infoset proto index, action position) history per player.
        let mut hist: [Vec<(usize, usize)>; 2] = [Vec::new(), Vec::new()];

        enum Ev {
            Visit(NodeId),
            Push(usize, usize, usize),
            Pop(usize),
        }
        let mut stack = vec![Ev::Visit(root)];
        while let Some(ev) = stack.pop() {
            match ev {
                Ev::Push(pi, proto, pos) => hist[pi].push((proto, pos)),
                Ev::Pop(pi) => {
                    hist[pi].pop();
                }
                Ev::Visit(id) => {
                    if visited[id] {
                        return Err(self.invalid(id, "node has more than one parent"));
                    }
                    visited[id] = true;
                    match self.nodes[id].as_ref().unwrap() {
                        ProtoNode::Chance { outcomes } => {
                            for &(child, _) in outcomes.iter().rev() {
                                stack.push(Ev::Visit(child));
                            }
                        }
                        ProtoNode::Terminal { .. } => {
                            depths[0] = depths[0].max(hist[0].len());
                            depths[1] = depths[1].max(hist[1].len());
                        }
                        ProtoNode::Decision {
                            player,
                            label,
                            edges,
                        } => {
                            let pi = player.index();
                            let actions: Vec<u32> = edges.iter().map(|&(a, _)| a).collect();
                            let proto = match by_key.get(&(pi, label.clone())) {
                                Some(&proto) => {
                                    let existing = &protos[proto];
                                    if existing.actions != actions {
                                        return Err(self.invalid(
                                            id,
                                            format!(
                                                "action list differs within infoset {label}"
                                            ),
                                        ));
                                    }
                                    if existing.history != hist[pi] {
                                        return Err(self.invalid(
                                            id,
                                            format!(
                                                "perfect recall violated in infoset {label}: \
                                                 owner histories differ"
                                            ),
                                        ));
                                    }
                                    proto
                                }
                                None => {
                                    // Reject a label shared across players.
                                    if by_key.contains_key(&(1 - pi, label.clone())) {
                                        return Err(self.invalid(
                                            id,
                                            format!("infoset label {label} used by both players"),
                                        ));
                                    }
                                    let proto = protos.len();
                                    protos.push(ProtoInfoset {
                                        owner: *player,
                                        label: label.clone(),
                                        actions: actions.clone(),
                                        members: Vec::new(),
                                        history: hist[pi].clone(),
                                    });
                                    by_key.insert((pi, label.clone()), proto);
                                    proto
                                }
                            };
                            protos[proto].members.push(id);
                            for (pos, &(_, child)) in edges.iter().enumerate().rev() {
                                stack.push(Ev::Pop(pi));
                                stack.push(Ev::Visit(child));
                                stack.push(Ev::Push(pi, proto, pos));
                            }
                        }
                    }
                }
            }
        }

        if let Some(id) = visited.iter().position(|v| !v) {
            return Err(self.invalid(id, "node is unreachable from the root"));
        }
        Ok((protos, depths))
    }

    fn assemble(
        self,
        root: NodeId,
        protos: Vec<ProtoInfoset>,
        depths: [usize; 2],
    ) -> Result<GameSpec> {
        // Per-player infoset ids in proto (first-visit) order, so parents
        // always get smaller ids than their children.
        let mut proto_to_id: Vec<InfosetId> = vec![0; protos.len()];
        let mut per_player: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
        for (i, p) in protos.iter().enumerate() {
            let pi = p.owner.index();
            proto_to_id[i] = per_player[pi].len();
            per_player[pi].push(i);
        }

        let mut infosets: [Vec<InfoSet>; 2] = [Vec::new(), Vec::new()];
        let mut labels: [HashMap<String, InfosetId>; 2] = [HashMap::new(), HashMap::new()];
        let mut seq_counts = [0usize; 2];
        let mut max_actions = [0usize; 2];
        for pi in 0..2 {
            for (id, &proto_idx) in per_player[pi].iter().enumerate() {
                let p = &protos[proto_idx];
                let parent = match p.history.last() {
                    None => ParentSeq::Root,
                    Some(&(parent_proto, pos)) => ParentSeq::Seq {
                        infoset: proto_to_id[parent_proto],
                        action_pos: pos,
                    },
                };
                let num_actions = p.actions.len();
                infosets[pi].push(InfoSet {
                    id,
                    owner: p.owner,
                    label: p.label.clone(),
                    actions: p.actions.clone(),
                    members: p.members.clone(),
                    parent,
                    depth: p.history.len() + 1,
                    seq_offset: seq_counts[pi],
                    children: vec![Vec::new(); num_actions],
                });
                labels[pi].insert(p.label.clone(), id);
                seq_counts[pi] += num_actions;
                max_actions[pi] = max_actions[pi].max(num_actions);
            }
        }

        let mut root_infosets: [Vec<InfosetId>; 2] = [Vec::new(), Vec::new()];
        for pi in 0..2 {
            let parents: Vec<(InfosetId, ParentSeq)> = infosets[pi]
                .iter()
                .map(|x| (x.id, x.parent))
                .collect();
            for (id, parent) in parents {
                match parent {
                    ParentSeq::Root => root_infosets[pi].push(id),
                    ParentSeq::Seq {
                        infoset,
                        action_pos,
                    } => infosets[pi][infoset].children[action_pos].push(id),
                }
            }
        }

        // Rewrite nodes with resolved infoset ids.
        let mut nodes = Vec::with_capacity(self.nodes.len());
        let mut proto_lookup: HashMap<(usize, String), InfosetId> = HashMap::new();
        for (i, p) in protos.iter().enumerate() {
            proto_lookup.insert((p.owner.index(), p.label.clone()), proto_to_id[i]);
        }
        for node in self.nodes.iter() {
            let kind = match node.as_ref().unwrap() {
                ProtoNode::Chance { outcomes } => NodeKind::Chance {
                    outcomes: outcomes.clone(),
                },
                ProtoNode::Terminal { loss } => NodeKind::Terminal { loss: *loss },
                ProtoNode::Decision {
                    player,
                    label,
                    edges,
                } => NodeKind::Decision {
                    player: *player,
                    infoset: proto_lookup[&(player.index(), label.clone())],
                    edges: edges.clone(),
                },
            };
            nodes.push(GameNode { kind });
        }

        Ok(GameSpec {
            name: self.name,
            nodes,
            root,
            infosets,
            root_infosets,
            seq_counts,
            depths,
            max_actions,
            labels,
        })
    }
}

struct ProtoInfoset {
    owner: Player,
    label: String,
    actions: Vec<u32>,
    members: Vec<NodeId>,
    history: Vec<(usize, usize)>,
}
