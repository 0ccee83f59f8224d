//! Canonical JSON: object keys sorted, two-space indentation, trailing
//! newline. Rationals are already strings by the time they get here.

use serde::Serialize;

use crate::error::Result;

pub fn to_value<T: Serialize>(value: &T) -> Result<serde_json::Value> {
    // serde_json's default map is ordered by key, so the round-trip sorts
    Ok(serde_json::to_value(value)?)
}

pub fn to_string<T: Serialize>(value: &T) -> Result<String> {
    let mut out = serde_json::to_string_pretty(&to_value(value)?)?;
    out.push('\n');
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Unsorted {
        zeta: u8,
        alpha: u8,
    }

    #[test]
    fn keys_are_sorted() {
        let s = to_string(&Unsorted { zeta: 1, alpha: 2 }).unwrap();
        assert!(s.find("alpha").unwrap() < s.find("zeta").unwrap());
        assert!(s.ends_with('\n'));
    }
}
