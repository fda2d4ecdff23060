//! Leduc hold'em.
//!
//! Rules used throughout the crate:
//!
//! * a deck of six cards, two suits of the ranks J < Q < K;
//! * both players ante 1 and receive one private card;
//! * two betting rounds, player one acting first in each; the bet/raise
//!   size is 2 in the first round and 4 in the second;
//! * at most two raises (the opening bet counts) per round;
//! * one public board card is dealt between the rounds;
//! * at showdown a player pairing the board wins, otherwise the higher
//!   rank wins, equal ranks split.
//!
//! Suits never affect the outcome, so cards are dealt by rank with the
//! multiplicities of the six-card deck. Every terminal utility of player
//! one is increased by `shift`.

use crate::game::{GameDefinition, NodeSpec, Player};

const RANKS: [char; 3] = ['J', 'Q', 'K'];
const BET_SIZES: [u32; 2] = [2, 4];
const MAX_RAISES: usize = 2;

pub struct Leduc {
    pub shift: f64,
}

#[derive(Debug, Clone)]
pub struct LeducState {
    private: Option<[usize; 2]>,
    board: Option<usize>,
    rounds: [String; 2],
    contributed: [u32; 2],
}

impl LeducState {
    fn round(&self) -> usize {
        usize::from(self.board.is_some())
    }

    fn raises(&self) -> usize {
        self.rounds[self.round()].matches('r').count()
    }

    fn facing_raise(&self) -> bool {
        self.rounds[self.round()].ends_with('r')
    }

    fn round_closed(&self, round: usize) -> bool {
        let seq = &self.rounds[round];
        seq == "kk" || seq.ends_with('c')
    }

    fn folded(&self) -> Option<Player> {
        let seq = &self.rounds[self.round()];
        let folder = if seq.len() % 2 == 1 { Player::One } else { Player::Two };
        seq.ends_with('f').then_some(folder)
    }

    fn to_act(&self) -> Player {
        if self.rounds[self.round()].len().is_multiple_of(2) {
            Player::One
        } else {
            Player::Two
        }
    }

    fn public(&self) -> String {
        match self.board {
            None => format!("/{}", self.rounds[0]),
            Some(b) => format!("/{}/{}/{}", self.rounds[0], RANKS[b], self.rounds[1]),
        }
    }
}

fn remaining(taken: &[usize], rank: usize) -> usize {
    2 - taken.iter().filter(|&&r| r == rank).count()
}

fn private_deals() -> Vec<([usize; 2], f64)> {
    let mut out = Vec::new();
    for a in 0..3 {
        for b in 0..3 {
            let p = 2.0 / 6.0 * remaining(&[a], b) as f64 / 5.0;
            out.push(([a, b], p));
        }
    }
    out
}

fn board_deals(private: [usize; 2]) -> Vec<(usize, f64)> {
    (0..3)
        .map(|r| (r, remaining(&private, r) as f64 / 4.0))
        .filter(|&(_, p)| p > 0.0)
        .collect()
}

fn strength(card: usize, board: usize) -> usize {
    if card == board {
        10 + card
    } else {
        card
    }
}

impl GameDefinition for Leduc {
    type State = LeducState;

    fn name(&self) -> String {
        if self.shift == 0.0 {
            "leduc".into()
        } else {
            format!("leduc_shift{}", self.shift)
        }
    }

    fn root(&self) -> LeducState {
        LeducState {
            private: None,
            board: None,
            rounds: [String::new(), String::new()],
            contributed: [1, 1],
        }
    }

    fn spec(&self, s: &LeducState) -> NodeSpec {
        let Some(private) = s.private else {
            return NodeSpec::Chance(
                private_deals()
                    .into_iter()
                    .map(|([a, b], p)| (format!("{}{}", RANKS[a], RANKS[b]), p))
                    .collect(),
            );
        };
        if let Some(folder) = s.folded() {
            let u = match folder {
                Player::One => -(s.contributed[0] as f64),
                Player::Two => s.contributed[1] as f64,
            };
            return NodeSpec::Terminal(u + self.shift);
        }
        let round = s.round();
        if s.round_closed(round) {
            if round == 0 {
                return NodeSpec::Chance(
                    board_deals(private)
                        .into_iter()
                        .map(|(r, p)| (RANKS[r].to_string(), p))
                        .collect(),
                );
            }
            let board = s.board.unwrap();
            let (a, b) = (strength(private[0], board), strength(private[1], board));
            let pot = s.contributed[1] as f64;
            let u = match a.cmp(&b) {
                std::cmp::Ordering::Greater => pot,
                std::cmp::Ordering::Less => -pot,
                std::cmp::Ordering::Equal => 0.0,
            };
            return NodeSpec::Terminal(u + self.shift);
        }
        let mut actions = Vec::new();
        if s.facing_raise() {
            actions.push("fold".to_string());
        }
        actions.push("call".to_string());
        if s.raises() < MAX_RAISES {
            actions.push("raise".to_string());
        }
        NodeSpec::Decision(s.to_act(), actions)
    }

    fn apply(&self, s: &LeducState, action: usize) -> LeducState {
        let mut next = s.clone();
        let Some(private) = s.private else {
            next.private = Some(private_deals()[action].0);
            return next;
        };
        let round = s.round();
        if s.round_closed(round) {
            next.board = Some(board_deals(private)[action].0);
            return next;
        }
        let actor = s.to_act().index();
        let facing = s.facing_raise();
        let label = if facing { action } else { action + 1 };
        match label {
            0 => next.rounds[round].push('f'),
            1 => {
                next.rounds[round].push(if facing { 'c' } else { 'k' });
                next.contributed[actor] = s.contributed[1 - actor];
            }
            _ => {
                next.rounds[round].push('r');
                next.contributed[actor] = s.contributed[1 - actor] + BET_SIZES[round];
            }
        }
        next
    }

    fn observation(&self, s: &LeducState, player: Player) -> String {
        match s.private {
            None => "deal".into(),
            Some(p) => format!("{}|{}", RANKS[p[player.index()]], s.public()),
        }
    }

    fn public_observation(&self, s: &LeducState) -> String {
        match s.private {
            None => "deal".into(),
            Some(_) => s.public(),
        }
    }
}
