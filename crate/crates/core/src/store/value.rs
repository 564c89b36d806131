use std::fmt;
use std::hash::{Hash, Hasher};

/// A scalar property value.
///
/// Float equality is bitwise so values can key hash maps; floats are only
/// ever compared for equality filters, never used in arithmetic.
#[derive(Debug, Clone)]
pub enum PropertyValue {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl PropertyValue {
    pub fn kind(&self) -> &'static str {
        match self {
            PropertyValue::Int(_) => "integer",
            PropertyValue::Float(_) => "float",
            PropertyValue::Text(_) => "text",
            PropertyValue::Bool(_) => "boolean",
        }
    }

    /// Parses a bare CSV cell: integer, then float, then boolean, else text.
    pub fn infer(raw: &str) -> PropertyValue {
        if let Ok(i) = raw.parse::<i64>() {
            return PropertyValue::Int(i);
        }
        if raw.contains(['.', 'e', 'E']) {
            if let Ok(f) = raw.parse::<f64>() {
                if f.is_finite() {
                    return PropertyValue::Float(f);
                }
            }
        }
        match raw {
            "true" => PropertyValue::Bool(true),
            "false" => PropertyValue::Bool(false),
            _ => PropertyValue::Text(raw.to_string()),
        }
    }

    /// Renders the value the way a CSV cell would hold it (no quoting).
    pub fn to_cell(&self) -> String {
        match self {
            PropertyValue::Int(i) => i.to_string(),
            PropertyValue::Float(f) => format!("{f:?}"),
            PropertyValue::Text(s) => s.clone(),
            PropertyValue::Bool(b) => b.to_string(),
        }
    }
}

impl PartialEq for PropertyValue {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (PropertyValue::Int(a), PropertyValue::Int(b)) => a == b,
            (PropertyValue::Float(a), PropertyValue::Float(b)) => a.to_bits() == b.to_bits(),
            (PropertyValue::Text(a), PropertyValue::Text(b)) => a == b,
            (PropertyValue::Bool(a), PropertyValue::Bool(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for PropertyValue {}

impl Hash for PropertyValue {
    fn hash<H: Hasher>(&self, state: &mut H) {
        std::mem::discriminant(self).hash(state);
        match self {
            PropertyValue::Int(i) => i.hash(state),
            PropertyValue::Float(f) => f.to_bits().hash(state),
            PropertyValue::Text(s) => s.hash(state),
            PropertyValue::Bool(b) => b.hash(state),
        }
    }
}

impl PartialOrd for PropertyValue {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

// Total order used only for deterministic output (sorted maps, goldens).
impl Ord for PropertyValue {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use PropertyValue::*;
        fn rank(v: &PropertyValue) -> u8 {
            match v {
                Int(_) => 0,
                Float(_) => 1,
                Text(_) => 2,
                Bool(_) => 3,
            }
        }
        match (self, other) {
            (Int(a), Int(b)) => a.cmp(b),
            (Float(a), Float(b)) => a.total_cmp(b),
            (Text(a), Text(b)) => a.cmp(b),
            (Bool(a), Bool(b)) => a.cmp(b),
            _ => rank(self).cmp(&rank(other)),
        }
    }
}

/// Literal syntax as accepted by the statement language.
impl fmt::Display for PropertyValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PropertyValue::Int(i) => write!(f, "{i}"),
            PropertyValue::Float(x) => write!(f, "{x:?}"),
            PropertyValue::Text(s) => {
                f.write_str("'")?;
                for c in s.chars() {
                    match c {
                        '\'' => f.write_str("\\'")?,
                        '\\' => f.write_str("\\\\")?,
                        '\n' => f.write_str("\\n")?,
                        '\t' => f.write_str("\\t")?,
                        _ => write!(f, "{c}")?,
                    }
                }
                f.write_str("'")
            }
            PropertyValue::Bool(b) => write!(f, "{b}"),
        }
    }
}

impl From<i64> for PropertyValue {
    fn from(v: i64) -> Self {
        PropertyValue::Int(v)
    }
}

impl From<f64> for PropertyValue {
    fn from(v: f64) -> Self {
        PropertyValue::Float(v)
    }
}

impl From<bool> for PropertyValue {
    fn from(v: bool) -> Self {
        PropertyValue::Bool(v)
    }
}

impl From<&str> for PropertyValue {
    fn from(v: &str) -> Self {
        PropertyValue::Text(v.to_string())
    }
}

impl From<String> for PropertyValue {
    fn from(v: String) -> Self {
        PropertyValue::Text(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_equality_is_bitwise() {
        assert_eq!(PropertyValue::Float(1.5), PropertyValue::Float(1.5));
        assert_ne!(PropertyValue::Float(0.0), PropertyValue::Float(-0.0));
        assert_eq!(PropertyValue::Float(f64::NAN), PropertyValue::Float(f64::NAN));
        assert_ne!(PropertyValue::Int(1), PropertyValue::Float(1.0));
    }

    #[test]
    fn infer_cells() {
        assert_eq!(PropertyValue::infer("42"), PropertyValue::Int(42));
        assert_eq!(PropertyValue::infer("-3"), PropertyValue::Int(-3));
        assert_eq!(PropertyValue::infer("2.5"), PropertyValue::Float(2.5));
        assert_eq!(PropertyValue::infer("true"), PropertyValue::Bool(true));
        assert_eq!(PropertyValue::infer("alice"), PropertyValue::Text("alice".into()));
        assert_eq!(PropertyValue::infer("inf"), PropertyValue::Text("inf".into()));
    }

    #[test]
    fn display_escapes_text() {
        assert_eq!(PropertyValue::from("it's").to_string(), "'it\\'s'");
        assert_eq!(PropertyValue::Float(3.0).to_string(), "3.0");
    }
}
