//! Membership timing over growing inputs.
//!
//! Inputs are product listings shaped like the product-code benchmarks, so a
//! matching scan has to read every character.

use std::time::{Duration, Instant};

use super::CompiledPattern;

const DESCRIPTIONS: [&str; 5] = ["bottle", "jar", "crate", "box", "tin"];

/// A listing of exactly `len` characters, `C:{code} L:{lot} D:{description}`
/// repeated, that every product-code pattern with `code.len()` code
/// characters accepts. `None` when `len` is too short for two items or
/// `code` has whitespace or non-ASCII characters.
pub fn product_text(code: &str, lot: char, len: usize) -> Option<String> {
    if !code.is_ascii() || code.contains(char::is_whitespace) || !lot.is_ascii() || lot.is_whitespace() {
        return None;
    }
    let head = format!("C:{code} L:{lot} D:");
    // Two items with one-character descriptions and a separating space.
    if len < 2 * (head.len() + 1) + 1 {
        return None;
    }
    let mut s = String::with_capacity(len);
    let mut items = 0;
    loop {
        let word = DESCRIPTIONS[items % DESCRIPTIONS.len()];
        let sep = usize::from(items > 0);
        // Keep room for one more minimal item after this one.
        if items >= 1 && s.len() + sep + head.len() + word.len() + 1 + head.len() + 1 > len {
            break;
        }
        if items > 0 {
            s.push(' ');
        }
        s.push_str(&head);
        s.push_str(word);
        items += 1;
    }
    s.push(' ');
    s.push_str(&head);
    // The last description absorbs the remaining length.
    let pad = len - s.len();
    s.extend(std::iter::repeat('x').take(pad));
    debug_assert_eq!(s.len(), len);
    Some(s)
}

/// Mean time of one membership check on `input`, over as many runs as fit in
/// `min_total` (at least one). Returns the time and the verdict.
pub fn time_membership(pattern: &CompiledPattern, input: &str, min_total: Duration) -> (Duration, bool) {
    let mut runs = 0u32;
    let start = Instant::now();
    loop {
        let verdict = std::hint::black_box(pattern.is_match(std::hint::black_box(input)));
        runs += 1;
        let elapsed = start.elapsed();
        if elapsed >= min_total {
            return (elapsed / runs, verdict);
        }
    }
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let cov: f64 = logs.iter().map(|&(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = logs.iter().map(|&(x, _)| (x - mx) * (x - mx)).sum();
    cov / var
}
