//! Events and the token lists built from them.

use std::collections::BTreeMap;
use std::fmt;

use crate::net::{PlaceIdx, SwpnNet, TransIdx};

/// A single occurrence in a scenario.
///
/// `Firing(t, j)` is the `j`-th firing of transition `t` on the branch that
/// produced it. Enrichment events inject hypothetical tokens, sink events close
/// the maximal elements of an extracted partial order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EventId {
    Initial,
    Firing { transition: TransIdx, occurrence: u32 },
    Enrichment(u32),
    Sink(u32),
}

impl EventId {
    pub fn firing(transition: TransIdx, occurrence: u32) -> Self {
        EventId::Firing { transition, occurrence }
    }

    pub fn transition(&self) -> Option<TransIdx> {
        match self {
            EventId::Firing { transition, .. } => Some(*transition),
            _ => None,
        }
    }

    pub fn is_sink(&self) -> bool {
        matches!(self, EventId::Sink(_))
    }

    pub fn is_enrichment(&self) -> bool {
        matches!(self, EventId::Enrichment(_))
    }

    /// `i`, `t11`, `t11#2`, `e1`, `f2`.
    pub fn render(&self, net: &SwpnNet) -> String {
        match self {
            EventId::Initial => "i".to_string(),
            EventId::Firing { transition, occurrence } => {
                let name = net.transition(*transition).display_name();
                if *occurrence > 1 {
                    format!("{name}#{occurrence}")
                } else {
                    name.to_string()
                }
            }
            EventId::Enrichment(k) => format!("e{k}"),
            EventId::Sink(n) => format!("f{n}"),
        }
    }
}

/// A token `(producer, place)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Token {
    pub producer: EventId,
    pub place: PlaceIdx,
}

impl Token {
    pub fn new(producer: EventId, place: PlaceIdx) -> Self {
        Self { producer, place }
    }

    pub fn render(&self, net: &SwpnNet) -> String {
        format!("({}, {})", self.producer.render(net), net.place(self.place).id)
    }
}

/// A 1-safe token list: at most one token per place.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct TokenSet {
    tokens: BTreeMap<PlaceIdx, EventId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlaceOccupied(pub PlaceIdx);

impl TokenSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_tokens(tokens: impl IntoIterator<Item = Token>) -> Result<Self, PlaceOccupied> {
        let mut set = Self::new();
        for token in tokens {
            set.insert(token)?;
        }
        Ok(set)
    }

    pub fn insert(&mut self, token: Token) -> Result<(), PlaceOccupied> {
        if self.tokens.contains_key(&token.place) {
            return Err(PlaceOccupied(token.place));
        }
        self.tokens.insert(token.place, token.producer);
        Ok(())
    }

    pub fn remove(&mut self, place: PlaceIdx) -> Option<Token> {
        self.tokens.remove(&place).map(|producer| Token::new(producer, place))
    }

    pub fn get(&self, place: PlaceIdx) -> Option<Token> {
        self.tokens.get(&place).map(|producer| Token::new(*producer, place))
    }

    pub fn is_marked(&self, place: PlaceIdx) -> bool {
        self.tokens.contains_key(&place)
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn places(&self) -> impl Iterator<Item = PlaceIdx> + '_ {
        self.tokens.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = Token> + '_ {
        self.tokens.iter().map(|(place, producer)| Token::new(*producer, *place))
    }

    pub fn render(&self, net: &SwpnNet) -> String {
        let inner: Vec<String> = self.iter().map(|t| t.render(net)).collect();
        format!("{{{}}}", inner.join(", "))
    }
}

impl fmt::Display for EventId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EventId::Initial => f.write_str("i"),
            EventId::Firing { transition, occurrence } => write!(f, "t[{}]#{}", transition.0, occurrence),
            EventId::Enrichment(k) => write!(f, "e{k}"),
            EventId::Sink(n) => write!(f, "f{n}"),
        }
    }
}
