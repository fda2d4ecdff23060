use crate::game::{GameDefinition, NodeSpec, Player};

const RANKS: [char; 3] = ['J', 'Q', 'K'];

/// Three-card Kuhn poker: ante 1, a single bet of 1, one betting round.
///
/// Betting is encoded as `k` check, `b` bet, `c` call, `f` fold. Checks and
/// calls share the `call` label so that passive play is uniform across games.
pub struct Kuhn;

#[derive(Debug, Clone)]
pub struct KuhnState {
    cards: Option<[usize; 2]>,
    history: String,
}

impl GameDefinition for Kuhn {
    type State = KuhnState;

    fn name(&self) -> String {
        "kuhn".into()
    }

    fn root(&self) -> KuhnState {
        KuhnState {
            cards: None,
            history: String::new(),
        }
    }

    fn spec(&self, s: &KuhnState) -> NodeSpec {
        let Some(cards) = s.cards else {
            let deals = deals()
                .map(|[a, b]| (format!("{}{}", RANKS[a], RANKS[b]), 1.0 / 6.0))
                .collect();
            return NodeSpec::Chance(deals);
        };
        let showdown = if cards[0] > cards[1] { 1.0 } else { -1.0 };
        match s.history.as_str() {
            "kk" => NodeSpec::Terminal(showdown),
            "kbf" => NodeSpec::Terminal(-1.0),
            "bf" => NodeSpec::Terminal(1.0),
            "kbc" | "bc" => NodeSpec::Terminal(2.0 * showdown),
            "" => NodeSpec::Decision(Player::One, vec!["call".into(), "raise".into()]),
            "k" => NodeSpec::Decision(Player::Two, vec!["call".into(), "raise".into()]),
            "b" => NodeSpec::Decision(Player::Two, vec!["fold".into(), "call".into()]),
            "kb" => NodeSpec::Decision(Player::One, vec!["fold".into(), "call".into()]),
            h => unreachable!("invalid kuhn history {h}"),
        }
    }

    fn apply(&self, s: &KuhnState, action: usize) -> KuhnState {
        let mut next = s.clone();
        match s.cards {
            None => next.cards = deals().nth(action),
            Some(_) => {
                let facing_bet = s.history.ends_with('b');
                next.history.push(match (facing_bet, action) {
                    (false, 0) => 'k',
                    (false, _) => 'b',
                    (true, 0) => 'f',
                    (true, _) => 'c',
                });
            }
        }
        next
    }

    fn observation(&self, s: &KuhnState, player: Player) -> String {
        match s.cards {
            None => "deal".into(),
            Some(c) => format!("{}|{}", RANKS[c[player.index()]], s.history),
        }
    }

    fn public_observation(&self, s: &KuhnState) -> String {
        match s.cards {
            None => "deal".into(),
            Some(_) => format!("/{}", s.history),
        }
    }
}

fn deals() -> impl Iterator<Item = [usize; 2]> {
    (0..3).flat_map(|a| (0..3).filter(move |&b| b != a).map(move |b| [a, b]))
}
