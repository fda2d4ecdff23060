use super::{GameTree, Owner, Player, StrategyProfile};

/// Reach probability of a history, split by contributor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reach {
    pub player: [f64; 2],
    pub chance: f64,
}

impl Reach {
    pub const ROOT: Reach = Reach {
        player: [1.0, 1.0],
        chance: 1.0,
    };

    pub fn total(&self) -> f64 {
        self.player[0] * self.player[1] * self.chance
    }

    /// Contribution of `player`'s own actions.
    pub fn own(&self, player: Player) -> f64 {
        self.player[player.index()]
    }

    /// Contribution of everyone except `player`, chance included.
    pub fn others(&self, player: Player) -> f64 {
        self.player[player.opponent().index()] * self.chance
    }

    /// Extends the reach by an action of `owner` taken with probability `p`.
    pub fn extend(mut self, owner: Owner, p: f64) -> Reach {
        match owner {
            Owner::Player(pl) => self.player[pl.index()] *= p,
            Owner::Chance => self.chance *= p,
            Owner::Terminal => unreachable!("terminal histories have no actions"),
        }
        self
    }
}

/// Reach of a single history, computed along its root path.
pub fn reach_probabilities(tree: &GameTree, profile: &StrategyProfile, node: usize) -> Reach {
    let path = tree.path(node);
    path.windows(2).fold(Reach::ROOT, |r, w| {
        let a = tree.action_to(w[0], w[1]).unwrap();
        r.extend(tree.node(w[0]).owner, profile.action_prob(tree, w[0], a))
    })
}

/// Reaches of every history in one top-down pass.
pub fn reaches(tree: &GameTree, profile: &StrategyProfile) -> Vec<Reach> {
    let mut out = vec![Reach::ROOT; tree.num_nodes()];
    for (i, n) in tree.nodes().iter().enumerate() {
        for (a, e) in tree.edges(i).iter().enumerate() {
            out[e.child] = out[i].extend(n.owner, profile.action_prob(tree, i, a));
        }
    }
    out
}

/// Player-one expected utility of every history in one bottom-up pass.
pub fn expected_utilities(tree: &GameTree, profile: &StrategyProfile) -> Vec<f64> {
    let mut values = vec![0.0; tree.num_nodes()];
    for i in (0..tree.num_nodes()).rev() {
        let n = tree.node(i);
        values[i] = match n.utility {
            Some(u) => u,
            None => tree
                .edges(i)
                .iter()
                .enumerate()
                .map(|(a, e)| profile.action_prob(tree, i, a) * values[e.child])
                .sum(),
        };
    }
    values
}

/// Player-one expected utility of the subtree rooted at `node`.
pub fn expected_utility(tree: &GameTree, profile: &StrategyProfile, node: usize) -> f64 {
    expected_utilities(tree, profile)[node]
}

struct BestResponse<'a> {
    tree: &'a GameTree,
    profile: &'a StrategyProfile,
    responder: Player,
    others_reach: Vec<f64>,
    values: Vec<Option<f64>>,
    choices: Vec<Option<usize>>,
}

impl BestResponse<'_> {
    fn value(&mut self, node: usize) -> f64 {
        if let Some(v) = self.values[node] {
            return v;
        }
        let n = self.tree.node(node);
        let v = match n.owner {
            Owner::Terminal => self.responder.sign() * n.utility.unwrap(),
            Owner::Player(p) if p == self.responder => {
                let a = self.choose(n.infoset.unwrap());
                self.value(self.tree.child(node, a))
            }
            _ => {
                let mut v = 0.0;
                for a in 0..n.num_actions {
                    let p = self.profile.action_prob(self.tree, node, a);
                    v += p * self.value(self.tree.child(node, a));
                }
                v
            }
        };
        self.values[node] = Some(v);
        v
    }

    fn choose(&mut self, infoset: usize) -> usize {
        if let Some(a) = self.choices[infoset] {
            return a;
        }
        let info = self.tree.infoset(infoset);
        let members = info.members.clone();
        let mut best = (0, f64::NEG_INFINITY);
        for a in 0..info.num_actions {
            let mut cfv = 0.0;
            for &h in &members {
                cfv += self.others_reach[h] * self.value(self.tree.child(h, a));
            }
            if cfv > best.1 {
                best = (a, cfv);
            }
        }
        self.choices[infoset] = Some(best.0);
        best.0
    }
}

/// Expected utility `responder` obtains by best-responding to the other
/// player's strategy in `profile`.
pub fn best_response_value(tree: &GameTree, profile: &StrategyProfile, responder: Player) -> f64 {
    let others_reach = reaches(tree, profile)
        .iter()
        .map(|r| r.others(responder))
        .collect();
    let mut br = BestResponse {
        tree,
        profile,
        responder,
        others_reach,
        values: vec![None; tree.num_nodes()],
        choices: vec![None; tree.infosets().len()],
    };
    br.value(GameTree::ROOT)
}

/// Average gain of the two best responses, in player-one utility units.
pub fn exploitability(tree: &GameTree, profile: &StrategyProfile) -> f64 {
    0.5 * (best_response_value(tree, profile, Player::One)
        + best_response_value(tree, profile, Player::Two))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games;

    #[test]
    fn root_reach_is_one() {
        let tree = games::kuhn();
        let r = reach_probabilities(&tree, &StrategyProfile::uniform(&tree), GameTree::ROOT);
        assert_eq!((r.total(), r.own(Player::One), r.others(Player::One)), (1.0, 1.0, 1.0));
    }

    #[test]
    fn kuhn_deal_reach_is_chance_only() {
        let tree = games::kuhn();
        let profile = StrategyProfile::uniform(&tree);
        let deal = tree.child(GameTree::ROOT, 0);
        let r = reach_probabilities(&tree, &profile, deal);
        assert!((r.total() - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(r.own(Player::One), 1.0);
        assert!((r.others(Player::One) - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn zero_action_on_path_gives_zero_reach() {
        let tree = games::kuhn();
        let mut profile = StrategyProfile::uniform(&tree);
        let deal = tree.child(GameTree::ROOT, 0);
        let info = tree.node(deal).infoset.unwrap();
        profile.infoset_mut(&tree, info).copy_from_slice(&[1.0, 0.0]);
        let below = tree.child(deal, 1);
        assert_eq!(reach_probabilities(&tree, &profile, below).total(), 0.0);
        assert_eq!(reaches(&tree, &profile)[below].total(), 0.0);
    }

    #[test]
    fn pass_reaches_match_path_reaches() {
        let tree = games::leduc(0.0);
        let profile = StrategyProfile::uniform(&tree);
        let all = reaches(&tree, &profile);
        for node in (0..tree.num_nodes()).step_by(37) {
            let r = reach_probabilities(&tree, &profile, node);
            assert!((r.total() - all[node].total()).abs() < 1e-15);
            assert!((r.total() - r.own(Player::One) * r.others(Player::One)).abs() < 1e-15);
        }
    }

    #[test]
    fn terminal_value_is_utility() {
        let tree = games::kuhn();
        let profile = StrategyProfile::uniform(&tree);
        for z in tree.terminals() {
            assert_eq!(expected_utility(&tree, &profile, z), tree.node(z).utility.unwrap());
        }
    }

    #[test]
    fn symmetric_chance_game_is_zero() {
        let tree = games::coin_flip();
        let profile = StrategyProfile::uniform(&tree);
        assert_eq!(expected_utility(&tree, &profile, GameTree::ROOT), 0.0);
    }

    #[test]
    fn matching_pennies_equilibrium() {
        let tree = games::matching_pennies();
        let profile = StrategyProfile::uniform(&tree);
        assert!(best_response_value(&tree, &profile, Player::One).abs() < 1e-15);
        assert!(best_response_value(&tree, &profile, Player::Two).abs() < 1e-15);
        assert!(exploitability(&tree, &profile).abs() < 1e-9);
    }

    #[test]
    fn single_terminal_best_response() {
        let tree = games::chain(3.0);
        let profile = StrategyProfile::uniform(&tree);
        assert_eq!(best_response_value(&tree, &profile, Player::One), 3.0);
        assert_eq!(best_response_value(&tree, &profile, Player::Two), -3.0);
    }
}
