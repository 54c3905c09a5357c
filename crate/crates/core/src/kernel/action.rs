use std::fmt;
use std::sync::Arc;

/// Shared, immutable identifier.
pub type Name = Arc<str>;

/// An action constant.
///
/// Process creation is modelled with two families of actions indexed by a
/// datum: `cr(d)` asks for the process bound to `d` to be started, and
/// `rcr(d)` records that the request was carried out.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Action {
    Plain(Name),
    CreateRequest(Name),
    CreateAct(Name),
}

impl Action {
    pub fn plain(name: &str) -> Self {
        Action::Plain(name.into())
    }

    pub fn request(datum: &str) -> Self {
        Action::CreateRequest(datum.into())
    }

    pub fn create(datum: &str) -> Self {
        Action::CreateAct(datum.into())
    }

    pub fn is_request(&self) -> bool {
        matches!(self, Action::CreateRequest(_))
    }

    /// The datum of a `cr(d)` action.
    pub fn requested(&self) -> Option<&Name> {
        match self {
            Action::CreateRequest(d) => Some(d),
            _ => None,
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Plain(n) => f.write_str(n),
            Action::CreateRequest(d) => write!(f, "cr({d})"),
            Action::CreateAct(d) => write!(f, "rcr({d})"),
        }
    }
}

/// Returns true for identifiers usable as plain action names.
pub fn is_action_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
        && !matches!(s, "delta" | "si" | "posm" | "encap" | "cr" | "rcr")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_kinds() {
        assert_eq!(Action::plain("a").to_string(), "a");
        assert_eq!(Action::request("d").to_string(), "cr(d)");
        assert_eq!(Action::create("d").to_string(), "rcr(d)");
    }

    #[test]
    fn reserved_words_are_not_actions() {
        assert!(is_action_name("a1"));
        assert!(!is_action_name("delta"));
        assert!(!is_action_name("X"));
        assert!(!is_action_name(""));
    }
}
