//! Small fixture games whose sampling distributions can be enumerated.

use crate::game::{GameDefinition, NodeSpec, Player};

/// Sequence-of-choices state shared by the fixtures.
pub type Path = Vec<usize>;

fn push(s: &Path, a: usize) -> Path {
    let mut n = s.clone();
    n.push(a);
    n
}

fn lr() -> Vec<String> {
    vec!["l".into(), "r".into()]
}

/// A private chance draw for player one (`H` with 0.6, `L` with 0.4), one
/// public decision by player one, then one decision by player two, who
/// never sees the draw. Eight terminals, depth three.
pub struct Tiny;

const TINY_UTILITIES: [[[f64; 2]; 2]; 2] = [[[2.0, -1.0], [3.0, -2.0]], [[-1.0, 1.0], [-3.0, 2.0]]];

impl GameDefinition for Tiny {
    type State = Path;

    fn name(&self) -> String {
        "tiny".into()
    }

    fn root(&self) -> Path {
        Vec::new()
    }

    fn spec(&self, s: &Path) -> NodeSpec {
        match s.len() {
            0 => NodeSpec::Chance(vec![("H".into(), 0.6), ("L".into(), 0.4)]),
            1 => NodeSpec::Decision(Player::One, lr()),
            2 => NodeSpec::Decision(Player::Two, lr()),
            _ => NodeSpec::Terminal(TINY_UTILITIES[s[0]][s[1]][s[2]]),
        }
    }

    fn apply(&self, s: &Path, a: usize) -> Path {
        push(s, a)
    }

    fn observation(&self, s: &Path, player: Player) -> String {
        if s.is_empty() {
            return "deal".into();
        }
        let public: String = s[1..].iter().map(|a| a.to_string()).collect();
        match player {
            Player::One => format!("{}|{}", s[0], public),
            Player::Two => format!("?|{}", public),
        }
    }

    fn public_observation(&self, s: &Path) -> String {
        if s.is_empty() {
            return "deal".into();
        }
        let public: String = s[1..].iter().map(|a| a.to_string()).collect();
        format!("/{public}")
    }
}

/// A public coin flip paying +1 or -1.
pub struct CoinFlip;

impl GameDefinition for CoinFlip {
    type State = Path;

    fn name(&self) -> String {
        "coin_flip".into()
    }

    fn root(&self) -> Path {
        Vec::new()
    }

    fn spec(&self, s: &Path) -> NodeSpec {
        match s.first() {
            None => NodeSpec::Chance(vec![("heads".into(), 0.5), ("tails".into(), 0.5)]),
            Some(0) => NodeSpec::Terminal(1.0),
            Some(_) => NodeSpec::Terminal(-1.0),
        }
    }

    fn apply(&self, s: &Path, a: usize) -> Path {
        push(s, a)
    }

    fn observation(&self, s: &Path, _: Player) -> String {
        format!("{s:?}")
    }

    fn public_observation(&self, s: &Path) -> String {
        format!("{s:?}")
    }
}

/// Player one hides heads or tails, player two guesses; player one wins 1
/// on a match and loses 1 otherwise.
pub struct MatchingPennies;

impl GameDefinition for MatchingPennies {
    type State = Path;

    fn name(&self) -> String {
        "matching_pennies".into()
    }

    fn root(&self) -> Path {
        Vec::new()
    }

    fn spec(&self, s: &Path) -> NodeSpec {
        let ht = vec!["heads".into(), "tails".into()];
        match s.len() {
            0 => NodeSpec::Decision(Player::One, ht),
            1 => NodeSpec::Decision(Player::Two, ht),
            _ => NodeSpec::Terminal(if s[0] == s[1] { 1.0 } else { -1.0 }),
        }
    }

    fn apply(&self, s: &Path, a: usize) -> Path {
        push(s, a)
    }

    fn observation(&self, s: &Path, player: Player) -> String {
        match (player, s.len()) {
            (Player::One, _) => format!("{s:?}"),
            (Player::Two, 0) => "start".into(),
            (Player::Two, 1) => "hidden".into(),
            (Player::Two, _) => format!("{s:?}"),
        }
    }

    fn public_observation(&self, s: &Path) -> String {
        match s.len() {
            0 => "start".into(),
            1 => "hidden".into(),
            _ => format!("end{}", s[1]),
        }
    }
}

/// Player one, player two and chance each have a single move; the only
/// terminal pays `utility`.
pub struct Chain {
    pub utility: f64,
}

impl GameDefinition for Chain {
    type State = Path;

    fn name(&self) -> String {
        "chain".into()
    }

    fn root(&self) -> Path {
        Vec::new()
    }

    fn spec(&self, s: &Path) -> NodeSpec {
        match s.len() {
            0 => NodeSpec::Decision(Player::One, vec!["go".into()]),
            1 => NodeSpec::Decision(Player::Two, vec!["go".into()]),
            2 => NodeSpec::Chance(vec![("go".into(), 1.0)]),
            _ => NodeSpec::Terminal(self.utility),
        }
    }

    fn apply(&self, s: &Path, a: usize) -> Path {
        push(s, a)
    }

    fn observation(&self, s: &Path, _: Player) -> String {
        format!("{}", s.len())
    }

    fn public_observation(&self, s: &Path) -> String {
        format!("{}", s.len())
    }
}

/// A perfect-information game: player one moves, a fair public coin is
/// flipped, player two moves. Every public state holds one history.
pub struct PerfectInfo;

impl GameDefinition for PerfectInfo {
    type State = Path;

    fn name(&self) -> String {
        "perfect_info".into()
    }

    fn root(&self) -> Path {
        Vec::new()
    }

    fn spec(&self, s: &Path) -> NodeSpec {
        match s.len() {
            0 => NodeSpec::Decision(Player::One, lr()),
            1 => NodeSpec::Chance(vec![("x".into(), 0.5), ("y".into(), 0.5)]),
            2 => NodeSpec::Decision(Player::Two, lr()),
            _ => NodeSpec::Terminal((4 * s[0] + 2 * s[1] + s[2]) as f64 - 3.5),
        }
    }

    fn apply(&self, s: &Path, a: usize) -> Path {
        push(s, a)
    }

    fn observation(&self, s: &Path, _: Player) -> String {
        format!("{s:?}")
    }

    fn public_observation(&self, s: &Path) -> String {
        format!("{s:?}")
    }
}
