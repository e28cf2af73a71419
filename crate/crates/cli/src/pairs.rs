//! Pair-list arguments: `0-15`, `13,14,15`, `48-63,2`, or a channel name
//! (`t`, `x`, `y`) resolved against the active allocation.

use ropelab::{Channel, DimensionAllocation};

use crate::error::CliError;

pub fn parse_pair_list(src: &str, alloc: &DimensionAllocation) -> Result<Vec<usize>, CliError> {
    let src = src.trim();
    let channel = match src {
        "t" => Some(Channel::T),
        "x" => Some(Channel::X),
        "y" => Some(Channel::Y),
        _ => None,
    };
    if let Some(ch) = channel {
        let pairs = alloc.pairs(ch);
        if pairs.is_empty() {
            return Err(CliError::Usage(format!("allocation has no {src} pairs")));
        }
        return Ok(pairs.to_vec());
    }

    let bad = |part: &str| CliError::Usage(format!("bad pair list element `{part}` in `{src}`"));
    let limit = alloc.head_dim() / 2;
    let mut out = Vec::new();
    for part in src.split(',') {
        let part = part.trim();
        let (lo, hi) = match part.split_once('-') {
            Some((a, b)) => (a.trim().parse::<usize>(), b.trim().parse::<usize>()),
            None => (part.parse::<usize>(), part.parse::<usize>()),
        };
        let (lo, hi) = match (lo, hi) {
            (Ok(lo), Ok(hi)) if lo <= hi => (lo, hi),
            _ => return Err(bad(part)),
        };
        if hi >= limit {
            return Err(CliError::Usage(format!(
                "pair {hi} out of range for {limit} pairs"
            )));
        }
        out.extend(lo..=hi);
    }
    Ok(out)
}
