//! Morality annotations: per-category ordinal degrees attached to game events.

use std::fmt;

use serde::{Deserialize, Serialize};

/// One of the four annotation categories (valence x focal point).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Category {
    NegativeOthers,
    NegativeSelf,
    PositiveOthers,
    PositiveSelf,
}

impl Category {
    pub const ALL: [Category; 4] = [
        Category::NegativeOthers,
        Category::NegativeSelf,
        Category::PositiveOthers,
        Category::PositiveSelf,
    ];

    /// Position of this category in a degree vector.
    pub fn index(self) -> usize {
        match self {
            Category::NegativeOthers => 0,
            Category::NegativeSelf => 1,
            Category::PositiveOthers => 2,
            Category::PositiveSelf => 3,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Category::NegativeOthers => "negative-others",
            Category::NegativeSelf => "negative-self",
            Category::PositiveOthers => "positive-others",
            Category::PositiveSelf => "positive-self",
        }
    }

    pub fn parse(s: &str) -> Option<Category> {
        Category::ALL.into_iter().find(|c| c.label() == s)
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

pub const MAX_DEGREE: u8 = 3;

/// Degree vector `<neg-others, neg-self, pos-others, pos-self>`, each in 0..=3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Degrees(pub [u8; 4]);

impl Degrees {
    /// Returns `None` if any component exceeds [`MAX_DEGREE`].
    pub fn new(components: [u8; 4]) -> Option<Degrees> {
        components
            .iter()
            .all(|&d| d <= MAX_DEGREE)
            .then_some(Degrees(components))
    }

    pub fn get(&self, category: Category) -> u8 {
        self.0[category.index()]
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&d| d == 0)
    }

    pub fn total(&self) -> u32 {
        self.0.iter().map(|&d| u32::from(d)).sum()
    }

    /// Degrees recorded when the action was intended but did not happen:
    /// each nonzero component `d` becomes `max(1, d - 1)`.
    pub fn attempted(&self) -> Degrees {
        Degrees(self.0.map(|d| if d == 0 { 0 } else { d.saturating_sub(1).max(1) }))
    }
}

impl fmt::Display for Degrees {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.0;
        write!(f, "<{a},{b},{c},{d}>")
    }
}

/// An emitted annotation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MoralAnnotation {
    pub degrees: Degrees,
    pub description: String,
    pub source_rule: String,
    /// True when emitted for an intended action whose preconditions failed.
    #[serde(default)]
    pub attempt: bool,
}

impl MoralAnnotation {
    pub fn is_harm_to_others(&self) -> bool {
        self.degrees.get(Category::NegativeOthers) >= 1
    }
}

/// Sum of annotation vectors, as consumed by the metrics.
pub fn sum_degrees<'a>(annotations: impl IntoIterator<Item = &'a Degrees>) -> [u32; 4] {
    let mut total = [0u32; 4];
    for d in annotations {
        for (t, &c) in total.iter_mut().zip(d.0.iter()) {
            *t += u32::from(c);
        }
    }
    total
}
