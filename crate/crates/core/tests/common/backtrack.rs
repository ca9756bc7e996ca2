//! A deliberately naive backtracking matcher, used as ground truth for the
//! compiled patterns at tiny scale. It has its own parser and shares no code
//! with the library. A back-reference to a group that has not matched fails.

#[derive(Debug)]
enum Re {
    /// Inclusive ranges, possibly negated.
    Set(Vec<(char, char)>, bool),
    Any,
    Cat(Vec<Re>),
    Alt(Vec<Re>),
    Rep(Box<Re>, usize, Option<usize>),
    Group(usize, Box<Re>),
    Back(usize),
}

const DIGIT: &[(char, char)] = &[('0', '9')];
const SPACE: &[(char, char)] = &[('\t', '\r'), (' ', ' ')];
const WORD: &[(char, char)] = &[('0', '9'), ('A', 'Z'), ('_', '_'), ('a', 'z')];

struct P<'a> {
    s: &'a [char],
    i: usize,
    groups: usize,
}

impl P<'_> {
    fn alt(&mut self) -> Re {
        let mut v = vec![self.cat()];
        while self.s.get(self.i) == Some(&'|') {
            self.i += 1;
            v.push(self.cat());
        }
        if v.len() == 1 { v.pop().unwrap() } else { Re::Alt(v) }
    }

    fn cat(&mut self) -> Re {
        let mut v = Vec::new();
        while let Some(&c) = self.s.get(self.i) {
            if c == '|' || c == ')' {
                break;
            }
            let mut a = self.atom();
            loop {
                match self.s.get(self.i) {
                    Some('*') => a = Re::Rep(Box::new(a), 0, None),
                    Some('+') => a = Re::Rep(Box::new(a), 1, None),
                    Some('?') => a = Re::Rep(Box::new(a), 0, Some(1)),
                    Some('{') => {
                        let close = self.i + self.s[self.i..].iter().position(|&c| c == '}').unwrap();
                        let body: String = self.s[self.i + 1..close].iter().collect();
                        let (lo, hi) = match body.split_once(',') {
                            None => (body.parse().unwrap(), Some(body.parse().unwrap())),
                            Some((l, "")) => (l.parse().unwrap(), None),
                            Some((l, h)) => (l.parse().unwrap(), Some(h.parse().unwrap())),
                        };
                        a = Re::Rep(Box::new(a), lo, hi);
                        self.i = close;
                    }
                    _ => break,
                }
                self.i += 1;
            }
            v.push(a);
        }
        Re::Cat(v)
    }

    fn escape_set(c: char) -> Option<Re> {
        let (set, neg) = match c {
            'd' => (DIGIT, false),
            'D' => (DIGIT, true),
            's' => (SPACE, false),
            'S' => (SPACE, true),
            'w' => (WORD, false),
            'W' => (WORD, true),
            _ => return None,
        };
        Some(Re::Set(set.to_vec(), neg))
    }

    fn escape_char(c: char) -> char {
        match c {
            'n' => '\n',
            't' => '\t',
            'r' => '\r',
            'f' => '\x0c',
            'v' => '\x0b',
            c => c,
        }
    }

    fn atom(&mut self) -> Re {
        let c = self.s[self.i];
        self.i += 1;
        match c {
            '.' => Re::Any,
            '(' => {
                let g = if self.s[self.i..].starts_with(&['?', ':']) {
                    self.i += 2;
                    None
                } else {
                    self.groups += 1;
                    Some(self.groups)
                };
                let inner = self.alt();
                assert_eq!(self.s[self.i], ')');
                self.i += 1;
                match g {
                    Some(g) => Re::Group(g, Box::new(inner)),
                    None => inner,
                }
            }
            '\\' => {
                let e = self.s[self.i];
                self.i += 1;
                if let Some(d) = e.to_digit(10) {
                    return Re::Back(d as usize);
                }
                Self::escape_set(e).unwrap_or_else(|| {
                    let c = Self::escape_char(e);
                    Re::Set(vec![(c, c)], false)
                })
            }
            '[' => self.class(),
            c => Re::Set(vec![(c, c)], false),
        }
    }

    fn class(&mut self) -> Re {
        let neg = self.s[self.i] == '^';
        if neg {
            self.i += 1;
        }
        let mut ranges = Vec::new();
        let mut first = true;
        loop {
            let c = self.s[self.i];
            self.i += 1;
            if c == ']' && !first {
                break;
            }
            first = false;
            let lo = if c == '\\' {
                let e = self.s[self.i];
                self.i += 1;
                if let Some(Re::Set(set, n)) = Self::escape_set(e) {
                    if n {
                        // Complement of the escape's ranges within the class.
                        let mut prev = '\0';
                        for (a, b) in set {
                            if a > prev {
                                ranges.push((prev, char::from_u32(a as u32 - 1).unwrap()));
                            }
                            prev = char::from_u32(b as u32 + 1).unwrap();
                        }
                        ranges.push((prev, char::MAX));
                    } else {
                        ranges.extend(set);
                    }
                    continue;
                }
                Self::escape_char(e)
            } else {
                c
            };
            if self.s[self.i] == '-' && self.s[self.i + 1] != ']' {
                self.i += 1;
                let mut hi = self.s[self.i];
                self.i += 1;
                if hi == '\\' {
                    hi = Self::escape_char(self.s[self.i]);
                    self.i += 1;
                }
                ranges.push((lo, hi));
            } else {
                ranges.push((lo, lo));
            }
        }
        Re::Set(ranges, neg)
    }
}

type Caps = Vec<Option<(usize, usize)>>;

fn m(re: &Re, s: &[char], i: usize, caps: &mut Caps, k: &mut dyn FnMut(usize, &mut Caps) -> bool) -> bool {
    match re {
        Re::Any => i < s.len() && k(i + 1, caps),
        Re::Set(ranges, neg) => {
            i < s.len() && ranges.iter().any(|&(a, b)| a <= s[i] && s[i] <= b) != *neg && k(i + 1, caps)
        }
        Re::Cat(v) => cat(v, s, i, caps, k),
        Re::Alt(v) => v.iter().any(|r| m(r, s, i, caps, k)),
        Re::Rep(r, lo, hi) => rep(r, *lo, *hi, 0, s, i, caps, k),
        Re::Group(g, r) => {
            let g = *g;
            m(r, s, i, caps, &mut |j, caps: &mut Caps| {
                let saved = caps[g];
                caps[g] = Some((i, j));
                let ok = k(j, caps);
                caps[g] = saved;
                ok
            })
        }
        Re::Back(g) => match caps[*g] {
            None => false,
            Some((a, b)) => {
                let len = b - a;
                i + len <= s.len() && s[a..b] == s[i..i + len] && k(i + len, caps)
            }
        },
    }
}

fn cat(v: &[Re], s: &[char], i: usize, caps: &mut Caps, k: &mut dyn FnMut(usize, &mut Caps) -> bool) -> bool {
    match v.split_first() {
        None => k(i, caps),
        Some((h, t)) => m(h, s, i, caps, &mut |j, caps: &mut Caps| cat(t, s, j, caps, k)),
    }
}

#[allow(clippy::too_many_arguments)]
fn rep(
    r: &Re,
    lo: usize,
    hi: Option<usize>,
    n: usize,
    s: &[char],
    i: usize,
    caps: &mut Caps,
    k: &mut dyn FnMut(usize, &mut Caps) -> bool,
) -> bool {
    if n >= lo && k(i, caps) {
        return true;
    }
    if hi.is_some_and(|h| n >= h) {
        return false;
    }
    m(r, s, i, caps, &mut |j, caps: &mut Caps| {
        // Optional iterations must consume input, or the loop never ends.
        (j > i || n < lo) && rep(r, lo, hi, n + 1, s, j, caps, k)
    })
}

/// Whole-input match of `pattern` against `input`.
pub fn backtrack_match(pattern: &str, input: &str) -> bool {
    let pat: Vec<char> = pattern.chars().collect();
    let mut p = P { s: &pat, i: 0, groups: 0 };
    let re = p.alt();
    assert_eq!(p.i, pat.len(), "oracle could not parse {pattern}");
    let s: Vec<char> = input.chars().collect();
    let mut caps = vec![None; p.groups + 1];
    m(&re, &s, 0, &mut caps, &mut |j, _| j == s.len())
}
