//! The benchmark family: product codes with and without lot numbers, IP
//! address prefixes, name initials and XML tags.
//!
//! In `IPn`, `Pr-Cn` and `Pr-CLn` the parameter `n` is the number of
//! characters that must repeat.

use super::CompiledPattern;

pub const BENCHMARK_NAMES: [&str; 19] = [
    "IP2", "IP3", "IP4", "IP6", "IP9", "Name-F", "Name-L", "Name", "XML", "Pr-C2", "Pr-C3", "Pr-C4", "Pr-C6", "Pr-C9",
    "Pr-CL2", "Pr-CL3", "Pr-CL4", "Pr-CL6", "Pr-CL9",
];

#[derive(Clone, Debug)]
pub struct Benchmark {
    pub name: &'static str,
    pub pattern: String,
    pub compiled: CompiledPattern,
}

/// Product descriptions whose `n`-character codes all agree; the lot
/// number is free.
fn product_code(n: usize) -> String {
    format!(r"C:(.{{{n}}}) L:. D:[^\s]+( C:\1 L:. D:[^\s]+)+")
}

/// As [`product_code`], and the one-character lot numbers agree too.
fn product_code_lot(n: usize) -> String {
    format!(r"C:(.{{{n}}}) L:(.) D:[^\s]+( C:\1 L:\2 D:[^\s]+)+")
}

/// Two dotted quads of three-digit octets whose first `n` digits agree.
fn ip(n: usize) -> String {
    assert!((1..=9).contains(&n));
    let quad = |digit: &dyn Fn(usize) -> String| {
        (0..4).map(|o| (0..3).map(|d| digit(o * 3 + d)).collect::<String>()).collect::<Vec<_>>().join(r"\.")
    };
    let src = quad(&|i| if i < n { r"(\d)".to_string() } else { r"\d".to_string() });
    let dst = quad(&|i| if i < n { format!(r"\{}", i + 1) } else { r"\d".to_string() });
    format!(r"src:\s+{src}\s+dst:\s+{dst}")
}

pub fn pattern_source(name: &str) -> Option<String> {
    let param = |prefix: &str| name.strip_prefix(prefix).and_then(|n| n.parse::<usize>().ok());
    Some(match name {
        "Name-F" => r"([A-Z])[a-z]*[A-Z][a-z]* \1".to_string(),
        "Name-L" => r"[A-Z][a-z]*([A-Z])[a-z]* \1".to_string(),
        "Name" => r"([A-Z])[a-z]*([A-Z])[a-z]* \1\2".to_string(),
        "XML" => r"<([a-zA-Z])([a-zA-Z])([a-zA-Z])>[^<]*</\1\2\3>".to_string(),
        _ if name.starts_with("Pr-CL") => product_code_lot(param("Pr-CL")?),
        _ if name.starts_with("Pr-C") => product_code(param("Pr-C")?),
        _ if name.starts_with("IP") => ip(param("IP").filter(|n| (1..=9).contains(n))?),
        _ => return None,
    })
}

/// Compiles one named benchmark; `None` for unknown names.
pub fn benchmark(name: &str) -> Option<Benchmark> {
    let name = *BENCHMARK_NAMES.iter().find(|n| **n == name)?;
    let pattern = pattern_source(name)?;
    let compiled = CompiledPattern::new(&pattern).expect("benchmark patterns compile");
    Some(Benchmark { name, pattern, compiled })
}

pub fn benchmark_patterns() -> Vec<Benchmark> {
    BENCHMARK_NAMES.iter().map(|n| benchmark(n).expect("listed")).collect()
}
