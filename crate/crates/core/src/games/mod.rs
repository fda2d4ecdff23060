//! Concrete games and the static "always call" baseline table.

mod kuhn;
mod leduc;
mod toy;

pub use kuhn::Kuhn;
pub use leduc::Leduc;
pub use toy::{Chain, CoinFlip, MatchingPennies, PerfectInfo, Tiny};

use crate::game::{expected_utilities, GameError, GameTree, Owner, StrategyProfile};

/// Names accepted by [`by_name`].
pub const GAME_NAMES: [&str; 4] = ["kuhn", "leduc", "leduc_shift100", "tiny"];

fn build<G: crate::game::GameDefinition>(game: &G) -> GameTree {
    GameTree::build(game).expect("built-in games are well formed")
}

pub fn kuhn() -> GameTree {
    build(&Kuhn)
}

/// Leduc hold'em with every player-one utility shifted by `shift`.
pub fn leduc(shift: f64) -> GameTree {
    build(&Leduc { shift })
}

pub fn tiny() -> GameTree {
    build(&Tiny)
}

pub fn coin_flip() -> GameTree {
    build(&CoinFlip)
}

pub fn matching_pennies() -> GameTree {
    build(&MatchingPennies)
}

pub fn chain(utility: f64) -> GameTree {
    build(&Chain { utility })
}

pub fn perfect_info() -> GameTree {
    build(&PerfectInfo)
}

/// Looks up a game by its configuration name.
pub fn by_name(name: &str) -> Result<GameTree, GameError> {
    match name {
        "kuhn" => Ok(kuhn()),
        "leduc" => Ok(leduc(0.0)),
        "leduc_shift100" => Ok(leduc(100.0)),
        "tiny" => Ok(tiny()),
        "matching_pennies" => Ok(matching_pennies()),
        "perfect_info" => Ok(perfect_info()),
        _ => Err(GameError::UnknownGame(name.to_string())),
    }
}

/// Profile in which both players check or call whenever possible and never raise.
pub fn always_call_profile(tree: &GameTree) -> Result<StrategyProfile, GameError> {
    let call = tree.label_id("call");
    let mut probs = vec![0.0; tree.num_infoset_actions()];
    for info in tree.infosets() {
        let a = call
            .and_then(|c| info.labels.iter().position(|&l| l == c))
            .ok_or(GameError::NoCallAction {
                node: info.members[0],
            })?;
        probs[info.offset + a] = 1.0;
    }
    Ok(StrategyProfile::from_vec(tree, probs).expect("one-hot distributions"))
}

/// Expected utility of every child `(h, a)` under the always-call profile,
/// indexed by edge.
pub fn always_call_values(tree: &GameTree) -> Result<Vec<f64>, GameError> {
    let profile = always_call_profile(tree)?;
    let values = expected_utilities(tree, &profile);
    Ok((0..tree.num_edges()).map(|e| values[tree.edge(e).child]).collect())
}

/// Counts used as regression constants: (histories, terminals, infosets, public states).
pub fn shape(tree: &GameTree) -> (usize, usize, usize, usize) {
    (
        tree.num_nodes(),
        tree.num_terminals(),
        tree.infosets().len(),
        tree.public_states().len(),
    )
}

/// Largest action count at any decision node.
pub fn max_player_actions(tree: &GameTree) -> usize {
    tree.nodes()
        .iter()
        .filter(|n| matches!(n.owner, Owner::Player(_)))
        .map(|n| n.num_actions)
        .max()
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{expected_utility, Player};

    #[test]
    fn kuhn_has_thirty_terminals() {
        let tree = kuhn();
        assert_eq!(tree.num_terminals(), 30);
        for z in tree.terminals() {
            let u = tree.node(z).utility.unwrap();
            assert!([-2.0, -1.0, 1.0, 2.0].contains(&u));
        }
        assert_eq!(tree.infosets().len(), 12);
    }

    #[test]
    fn leduc_actions_bounded() {
        for tree in [leduc(0.0), leduc(100.0)] {
            assert!(max_player_actions(&tree) <= 3);
        }
    }

    #[test]
    fn shifted_leduc_adds_constant() {
        let plain = leduc(0.0);
        let shifted = leduc(100.0);
        let p = StrategyProfile::uniform(&plain);
        let q = StrategyProfile::uniform(&shifted);
        let a = expected_utility(&plain, &p, GameTree::ROOT);
        let b = expected_utility(&shifted, &q, GameTree::ROOT);
        assert!((b - a - 100.0).abs() < 1e-9);
    }

    #[test]
    fn always_call_terminal_children_are_utilities() {
        let tree = leduc(0.0);
        let values = always_call_values(&tree).unwrap();
        for e in 0..tree.num_edges() {
            let child = tree.edge(e).child;
            if let Some(u) = tree.node(child).utility {
                assert_eq!(values[e], u);
            }
        }
    }

    #[test]
    fn always_call_shift_is_constant() {
        let a = always_call_values(&leduc(0.0)).unwrap();
        let b = always_call_values(&leduc(100.0)).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((y - x - 100.0).abs() < 1e-9);
        }
    }

    #[test]
    fn always_call_requires_call_action() {
        assert!(matches!(
            always_call_values(&tiny()),
            Err(GameError::NoCallAction { .. })
        ));
    }

    #[test]
    fn always_call_never_raises() {
        let tree = kuhn();
        let profile = always_call_profile(&tree).unwrap();
        let raise = tree.label_id("raise").unwrap();
        for info in tree.infosets() {
            for (k, &l) in info.labels.iter().enumerate() {
                let p = profile.infoset(&tree, info.id)[k];
                assert_eq!(p, if tree.action_name(l) == "call" { 1.0 } else { 0.0 });
                assert!(l != raise || p == 0.0);
            }
        }
    }

    #[test]
    fn unknown_game_is_rejected() {
        assert!(by_name("texas").is_err());
        for name in GAME_NAMES {
            assert!(by_name(name).is_ok());
        }
    }

    #[test]
    fn tiny_shape() {
        let tree = tiny();
        assert_eq!(shape(&tree), (15, 8, 4, 8));
        assert_eq!(tree.node(GameTree::ROOT).owner, Owner::Chance);
        let p2 = tree.infosets().iter().filter(|i| i.owner == Player::Two).count();
        assert_eq!(p2, 2);
    }
}
