use std::cmp::Ordering;
use std::fmt;

/// A leg label. Ordinary markings come from the user; auxiliary ones are
/// created when a node is cut open and always sort after ordinary ones.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Marking {
    Point(String),
    Aux(u32),
}

pub const AUX_Q: u32 = 0;
pub const AUX_R: u32 = 1;
pub const AUX_S: u32 = 2;
pub const AUX_T: u32 = 3;

impl Marking {
    pub fn point(s: impl Into<String>) -> Self {
        Marking::Point(s.into())
    }

    pub fn q() -> Self {
        Marking::Aux(AUX_Q)
    }
    pub fn r() -> Self {
        Marking::Aux(AUX_R)
    }
    pub fn s() -> Self {
        Marking::Aux(AUX_S)
    }
    pub fn t() -> Self {
        Marking::Aux(AUX_T)
    }

    pub fn is_aux(&self) -> bool {
        matches!(self, Marking::Aux(_))
    }

    /// Parses the text form: `@q`, `@r`, `@s`, `@t`, `@q1`, ... are auxiliary,
    /// anything else is an ordinary marking.
    pub fn parse(text: &str) -> Option<Self> {
        let text = text.trim();
        if text.is_empty() {
            return None;
        }
        match text.strip_prefix('@') {
            None => Some(Marking::Point(text.to_string())),
            Some(rest) => {
                let mut chars = rest.chars();
                let base = match chars.next()? {
                    'q' => 0,
                    'r' => 1,
                    's' => 2,
                    't' => 3,
                    _ => return None,
                };
                let tail: String = chars.collect();
                let round: u32 = if tail.is_empty() { 0 } else { tail.parse().ok()? };
                if round == 0 && !tail.is_empty() {
                    return None;
                }
                Some(Marking::Aux(round * 4 + base))
            }
        }
    }

    fn aux_name(i: u32) -> String {
        let c = ['q', 'r', 's', 't'][(i % 4) as usize];
        if i < 4 {
            c.to_string()
        } else {
            format!("{}{}", c, i / 4)
        }
    }

    /// Name without the `@` prefix, used in human readable class names.
    pub fn short(&self) -> String {
        match self {
            Marking::Point(s) => s.clone(),
            Marking::Aux(i) => Self::aux_name(*i),
        }
    }
}

fn cmp_points(a: &str, b: &str) -> Ordering {
    match (a.parse::<u64>(), b.parse::<u64>()) {
        (Ok(x), Ok(y)) => x.cmp(&y),
        (Ok(_), Err(_)) => Ordering::Less,
        (Err(_), Ok(_)) => Ordering::Greater,
        _ => a.cmp(b),
    }
}

impl Ord for Marking {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Marking::Point(a), Marking::Point(b)) => cmp_points(a, b),
            (Marking::Point(_), Marking::Aux(_)) => Ordering::Less,
            (Marking::Aux(_), Marking::Point(_)) => Ordering::Greater,
            (Marking::Aux(a), Marking::Aux(b)) => a.cmp(b),
        }
    }
}

impl PartialOrd for Marking {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Marking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Marking::Point(s) => write!(f, "{}", s),
            Marking::Aux(i) => write!(f, "@{}", Self::aux_name(*i)),
        }
    }
}

/// Returns the first auxiliary markings not already used in `taken`.
pub fn fresh_aux(taken: &[Marking], count: usize, prefer: u32) -> Vec<Marking> {
    let mut out = Vec::with_capacity(count);
    let mut i = prefer;
    while out.len() < count {
        let m = Marking::Aux(i);
        if !taken.contains(&m) && !out.contains(&m) {
            out.push(m);
        }
        i += 1;
    }
    out
}

pub fn markings(labels: &[&str]) -> Vec<Marking> {
    labels.iter().map(|s| Marking::point(*s)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aux_round_trip() {
        for i in 0..12 {
            let m = Marking::Aux(i);
            assert_eq!(Marking::parse(&m.to_string()), Some(m));
        }
        assert_eq!(Marking::parse("q"), Some(Marking::point("q")));
    }

    #[test]
    fn numeric_labels_sort_numerically() {
        let mut v = markings(&["10", "2", "a", "1"]);
        v.push(Marking::q());
        v.sort();
        let names: Vec<String> = v.iter().map(|m| m.to_string()).collect();
        assert_eq!(names, ["1", "2", "10", "a", "@q"]);
    }
}
