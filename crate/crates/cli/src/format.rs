//! Human-readable rendering: 12 significant digits, constant tags.

use quatode::solver::Mode;
use quatode::Quaternion;

const DIGITS: usize = 12;

/// `v` with 12 significant digits, trailing zeros trimmed.
pub fn number(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v == 0.0 { "0".into() } else { v.to_string() };
    }
    let exp = v.abs().log10().floor() as i32;
    if !(-5..12).contains(&exp) {
        let s = format!("{:.*e}", DIGITS - 1, v);
        let (mantissa, e) = s.split_once('e').expect("exponent form");
        return format!("{}e{e}", trim(mantissa));
    }
    let decimals = (DIGITS as i32 - 1 - exp).max(0) as usize;
    let s = trim(&format!("{v:.decimals$}"));
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

fn trim(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// Zeroes components below `floor`, which keeps round-off out of the
/// printed form.
pub fn clean(v: f64, floor: f64) -> f64 {
    if v.abs() < floor {
        0.0
    } else {
        v
    }
}

/// `0.5i - 0.5j`, `1`, `-k`.
pub fn quaternion(q: Quaternion, floor: f64) -> String {
    let mut out = String::new();
    for (c, unit) in q.to_array().into_iter().zip(["", "i", "j", "k"]) {
        let c = clean(c, floor);
        if c == 0.0 {
            continue;
        }
        let mag = match (number(c.abs()).as_str(), unit) {
            ("1", u) if !u.is_empty() => String::new(),
            (m, _) => m.to_string(),
        };
        if out.is_empty() {
            if c < 0.0 {
                out.push('-');
            }
        } else {
            out.push_str(if c < 0.0 { " - " } else { " + " });
        }
        out.push_str(&mag);
        out.push_str(unit);
    }
    if out.is_empty() {
        "0".into()
    } else {
        out
    }
}

/// Symbolic name for `v` if it is `p/q·s` with small `p`, `q` and
/// `s ∈ {√2, √3, √5, √6, √10, √15, (1±√5)/2}`.
pub fn recognize(v: f64) -> Option<String> {
    let s5 = 5f64.sqrt();
    let surds: [(f64, &str); 8] = [
        (2f64.sqrt(), "√2"),
        (3f64.sqrt(), "√3"),
        (s5, "√5"),
        (6f64.sqrt(), "√6"),
        (10f64.sqrt(), "√10"),
        (15f64.sqrt(), "√15"),
        ((1.0 + s5) / 2.0, "(1+√5)/2"),
        ((1.0 - s5) / 2.0, "(1-√5)/2"),
    ];
    if v == 0.0 || !v.is_finite() {
        return None;
    }
    for q in 1..=20u32 {
        for (s, name) in surds {
            let p = v * q as f64 / s;
            let r = p.round();
            if r == 0.0 || r.abs() > 40.0 || (p - r).abs() > 1e-10 * p.abs().max(1.0) {
                continue;
            }
            let sign = if r < 0.0 { "-" } else { "" };
            let num = match r.abs() as i64 {
                1 => name.to_string(),
                n => format!("{n}·{name}"),
            };
            return Some(if q == 1 { format!("{sign}{num}") } else { format!("{sign}{num}/{q}") });
        }
    }
    None
}

/// Collects `value = symbol` notes for every recognizable number, in
/// first-seen order without duplicates.
#[derive(Debug, Default)]
pub struct Tags {
    notes: Vec<String>,
}

impl Tags {
    pub fn note(&mut self, v: f64) {
        if let Some(sym) = recognize(v) {
            let line = format!("{} = {sym}", number(v));
            if !self.notes.contains(&line) {
                self.notes.push(line);
            }
        }
    }

    pub fn note_quaternion(&mut self, q: Quaternion, floor: f64) {
        for c in q.to_array() {
            let c = clean(c, floor);
            if c != 0.0 {
                self.note(c.abs());
            }
        }
    }

    pub fn into_vec(self) -> Vec<String> {
        self.notes
    }
}

/// The shifted variable: `x` or `(x - x0)`.
pub fn variable(x0: f64) -> String {
    if x0 == 0.0 {
        "x".into()
    } else if x0 < 0.0 {
        format!("(x + {})", number(-x0))
    } else {
        format!("(x - {})", number(x0))
    }
}

fn scaled(f: &str, rate: f64, var: &str) -> String {
    match number(rate).as_str() {
        "1" if var.starts_with('(') => format!("{f}{var}"),
        "1" => format!("{f}({var})"),
        "-1" => format!("{f}(-{var})"),
        r => format!("{f}({r}·{var})"),
    }
}

/// One printable summand: a quaternion times a product of factors.
struct Piece {
    coeff: Quaternion,
    factors: Vec<String>,
}

/// Real envelopes `c₁e^{at} + c₂e^{−at}` are shown as cosh/sinh.
fn pieces(modes: &[Mode], floor: f64, var: &str, tags: &mut Tags) -> Vec<Piece> {
    let mut out = Vec::new();
    let mut used = vec![false; modes.len()];
    for (i, m) in modes.iter().enumerate() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let a = clean(m.a, floor);
        let b = clean(m.b, floor);
        let mut poly = Vec::new();
        if m.k == 1 {
            poly.push(var.to_string());
        } else if m.k > 1 {
            poly.push(format!("{var}^{}/{}", m.k, (1..=m.k).product::<usize>()));
        }
        if b == 0.0 && a > 0.0 && m.cos.norm() >= floor {
            if let Some(j) = (i + 1..modes.len()).find(|&j| {
                !used[j]
                    && modes[j].k == m.k
                    && clean(modes[j].b, floor) == 0.0
                    && (modes[j].a + m.a).abs() <= floor.max(1e-12 * a)
                    && modes[j].cos.norm() >= floor
            }) {
                used[j] = true;
                tags.note(a);
                let (p, n) = (m.cos, modes[j].cos);
                for (coeff, f) in [(p + n, "cosh"), (p - n, "sinh")] {
                    let mut factors = poly.clone();
                    factors.push(scaled(f, a, var));
                    out.push(Piece { coeff, factors });
                }
                continue;
            }
        }
        let mut envelope = poly;
        if a != 0.0 {
            tags.note(a.abs());
            envelope.push(scaled("exp", a, var));
        }
        if b == 0.0 {
            out.push(Piece { coeff: m.cos, factors: envelope });
        } else {
            tags.note(b);
            let mut cos = vec![scaled("cos", b, var)];
            cos.extend(envelope.iter().cloned());
            let mut sin = vec![scaled("sin", b, var)];
            sin.extend(envelope);
            out.push(Piece { coeff: m.cos, factors: cos });
            out.push(Piece { coeff: -m.sin, factors: sin });
        }
    }
    out
}

/// `φ(x) = (…)·cosh(√2·x) + …`, one summand per line.
pub fn solution(modes: &[Mode], x0: f64, floor: f64, tags: &mut Tags) -> Vec<String> {
    let var = variable(x0);
    let mut lines = Vec::new();
    for piece in pieces(modes, floor, &var, tags) {
        let q = piece.coeff;
        let scale = q.norm();
        if scale < floor {
            continue;
        }
        tags.note_quaternion(q, floor);
        let body = quaternion(q, floor);
        let term = if piece.factors.is_empty() {
            format!("({body})")
        } else {
            format!("({body})·{}", piece.factors.join("·"))
        };
        lines.push(term);
    }
    if lines.is_empty() {
        lines.push("0".into());
    }
    lines
}
