//! Finitely presented groups and their abelianized invariants.
//!
//! Presentations are read from a small line-oriented format: the first
//! non-comment line lists the generators, every later line is a relator
//! word or an equation `lhs = rhs` (stored as the relator `lhs rhs^-1`).
//! Words are juxtapositions of powers `g^k`, commutators `[u, v]` meaning
//! `u v u^-1 v^-1`, parenthesized groups, and the literal `1` for the empty
//! word. `#` starts a comment.
//!
//! The only group theory performed here is abelianization: the relation
//! matrix of exponent sums is put into Smith normal form, giving the free
//! rank and the torsion coefficients in divisibility order. Words are kept
//! freely reduced only as far as merging adjacent letters of the same
//! generator, which is all the exponent-sum computation needs.

use crate::linalg::{smith_normal_form, ZMatrix};
use crate::Z;
use num::One;
use std::fmt;
use thiserror::Error;

/// The flat four-manifold group: four commuting translations and two glide
/// classes acting on them by inversion, with the glides squaring into the
/// translation lattice.
pub const F_GRP: &str = include_str!("../../../fixtures/F.grp");

/// The same group times the integers: one central generator added.
pub const G_GRP: &str = include_str!("../../../fixtures/G.grp");

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}, column {column}: unknown generator \"{name}\"")]
    UnknownGenerator {
        line: usize,
        column: usize,
        name: String,
    },
    #[error("the file contains no generator line")]
    Empty,
}

/// A word in the free group on indexed generators. Adjacent letters with
/// the same generator are merged and zero exponents dropped, so the letter
/// list is a canonical form for the purposes of printing and exponent sums.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Word {
    letters: Vec<(usize, i64)>,
}

impl Word {
    pub fn identity() -> Self {
        Word::default()
    }

    pub fn letter(gen: usize, exp: i64) -> Self {
        let mut w = Word::identity();
        w.push(gen, exp);
        w
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[(usize, i64)] {
        &self.letters
    }

    /// Appends one letter, merging with the tail and cancelling as needed.
    pub fn push(&mut self, gen: usize, exp: i64) {
        if exp == 0 {
            return;
        }
        if let Some(last) = self.letters.last_mut() {
            if last.0 == gen {
                last.1 += exp;
                if last.1 == 0 {
                    self.letters.pop();
                }
                return;
            }
        }
        self.letters.push((gen, exp));
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut out = self.clone();
        for &(g, e) in &other.letters {
            out.push(g, e);
        }
        out
    }

    pub fn inverse(&self) -> Word {
        let mut out = Word::identity();
        for &(g, e) in self.letters.iter().rev() {
            out.push(g, -e);
        }
        out
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity();
        for _ in 0..k.unsigned_abs() {
            out = out.concat(&base);
        }
        out
    }

    /// `u v u^-1 v^-1`.
    pub fn commutator(u: &Word, v: &Word) -> Word {
        u.concat(v).concat(&u.inverse()).concat(&v.inverse())
    }

    pub fn exponent_sum(&self, gen: usize) -> i64 {
        self.letters
            .iter()
            .filter(|&&(g, _)| g == gen)
            .map(|&(_, e)| e)
            .sum()
    }

    fn to_text(&self, names: &[String]) -> String {
        if self.letters.is_empty() {
            return "1".to_string();
        }
        self.letters
            .iter()
            .map(|&(g, e)| {
                if e == 1 {
                    names[g].clone()
                } else {
                    format!("{}^{}", names[g], e)
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Free rank and torsion coefficients of an abelian group, torsion in the
/// divisibility chain order the Smith normal form produces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianInvariants {
    pub free_rank: usize,
    pub torsion: Vec<Z>,
}

impl fmt::Display for AbelianInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rank {}", self.free_rank)?;
        if self.torsion.is_empty() {
            write!(f, ", no torsion")
        } else {
            let parts: Vec<String> = self.torsion.iter().map(Z::to_string).collect();
            write!(f, ", torsion {}", parts.join(","))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupPresentation {
    generators: Vec<String>,
    relators: Vec<Word>,
}

impl GroupPresentation {
    /// Wraps explicit parts; every letter must index a listed generator.
    pub fn new(generators: Vec<String>, relators: Vec<Word>) -> Self {
        for w in &relators {
            for &(g, _) in w.letters() {
                assert!(g < generators.len(), "relator letter outside generator list");
            }
        }
        GroupPresentation {
            generators,
            relators,
        }
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    /// Exponent-sum matrix: one row per relator, one column per generator.
    /// Commutator relators contribute zero rows, which the Smith normal
    /// form ignores harmlessly.
    pub fn relation_matrix(&self) -> ZMatrix {
        let mut m = ZMatrix::zeros(self.relators.len(), self.generators.len());
        for (i, w) in self.relators.iter().enumerate() {
            for j in 0..self.generators.len() {
                m.set(i, j, Z::from(w.exponent_sum(j)));
            }
        }
        m
    }

    pub fn abelian_invariants(&self) -> AbelianInvariants {
        let snf = smith_normal_form(&self.relation_matrix(), false);
        AbelianInvariants {
            free_rank: self.generators.len() - snf.rank,
            torsion: snf
                .diagonal
                .into_iter()
                .filter(|d| d > &Z::one())
                .collect(),
        }
    }

    /// Dimension of the rationalized abelianization, the first rational
    /// Betti number of any space with this fundamental group.
    pub fn rational_rank(&self) -> usize {
        self.abelian_invariants().free_rank
    }

    /// Prints in the same format `parse` accepts; parse of the output
    /// gives back an equal presentation.
    pub fn to_text(&self) -> String {
        let mut out = self.generators.join(", ");
        out.push('\n');
        for w in &self.relators {
            out.push_str(&w.to_text(&self.generators));
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Name(String),
    Int(i64),
    Caret,
    Comma,
    Equals,
    LBracket,
    RBracket,
    LParen,
    RParen,
}

fn tokenize(line: &str, line_no: usize) -> Result<Vec<(Tok, usize)>, ParseError> {
    let mut toks = Vec::new();
    let chars: Vec<char> = line.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let col = i + 1;
        let c = chars[i];
        match c {
            '#' => break,
            c if c.is_whitespace() => i += 1,
            '^' => {
                toks.push((Tok::Caret, col));
                i += 1;
            }
            ',' => {
                toks.push((Tok::Comma, col));
                i += 1;
            }
            '=' => {
                toks.push((Tok::Equals, col));
                i += 1;
            }
            '[' => {
                toks.push((Tok::LBracket, col));
                i += 1;
            }
            ']' => {
                toks.push((Tok::RBracket, col));
                i += 1;
            }
            '(' => {
                toks.push((Tok::LParen, col));
                i += 1;
            }
            ')' => {
                toks.push((Tok::RParen, col));
                i += 1;
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                toks.push((Tok::Name(chars[start..i].iter().collect()), col));
            }
            c if c.is_ascii_digit() || c == '-' => {
                let start = i;
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                let value = text.parse::<i64>().map_err(|_| ParseError::Syntax {
                    line: line_no,
                    column: col,
                    message: format!("cannot read \"{text}\" as an integer"),
                })?;
                toks.push((Tok::Int(value), col));
            }
            c => {
                return Err(ParseError::Syntax {
                    line: line_no,
                    column: col,
                    message: format!("unexpected character '{c}'"),
                })
            }
        }
    }
    Ok(toks)
}

struct LineParser<'a> {
    toks: &'a [(Tok, usize)],
    pos: usize,
    line: usize,
    generators: &'a [String],
}

impl<'a> LineParser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn column(&self) -> usize {
        self.toks
            .get(self.pos)
            .map_or_else(|| self.toks.last().map_or(1, |(_, c)| c + 1), |(_, c)| *c)
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            line: self.line,
            column: self.column(),
            message: message.into(),
        }
    }

    fn advance(&mut self) -> Option<&Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t);
        self.pos += 1;
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected {what}")))
        }
    }

    fn lookup(&self, name: &str, column: usize) -> Result<usize, ParseError> {
        self.generators
            .iter()
            .position(|g| g == name)
            .ok_or_else(|| ParseError::UnknownGenerator {
                line: self.line,
                column,
                name: name.to_string(),
            })
    }

    /// One or more factors, stopping before `=`, `,`, `]`, `)` or the end.
    fn word(&mut self) -> Result<Word, ParseError> {
        let mut out = Word::identity();
        let mut any = false;
        loop {
            match self.peek() {
                None | Some(Tok::Equals) | Some(Tok::Comma) | Some(Tok::RBracket)
                | Some(Tok::RParen) => break,
                _ => {
                    out = out.concat(&self.factor()?);
                    any = true;
                }
            }
        }
        if any {
            Ok(out)
        } else {
            Err(self.error("expected a word"))
        }
    }

    fn factor(&mut self) -> Result<Word, ParseError> {
        let column = self.column();
        let atom = match self.advance() {
            Some(Tok::Name(n)) => {
                let n = n.clone();
                Word::letter(self.lookup(&n, column)?, 1)
            }
            Some(Tok::Int(1)) => Word::identity(),
            Some(Tok::LBracket) => {
                let u = self.word()?;
                self.expect(Tok::Comma, "',' between commutator entries")?;
                let v = self.word()?;
                self.expect(Tok::RBracket, "']' closing the commutator")?;
                Word::commutator(&u, &v)
            }
            Some(Tok::LParen) => {
                let w = self.word()?;
                self.expect(Tok::RParen, "')' closing the group")?;
                w
            }
            _ => {
                return Err(ParseError::Syntax {
                    line: self.line,
                    column,
                    message: "expected a generator, '[', '(', or '1'".to_string(),
                })
            }
        };
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            let column = self.column();
            match self.advance() {
                Some(&Tok::Int(k)) if k != 0 => Ok(atom.pow(k)),
                Some(&Tok::Int(0)) => Err(ParseError::Syntax {
                    line: self.line,
                    column,
                    message: "exponent must be nonzero".to_string(),
                }),
                _ => Err(ParseError::Syntax {
                    line: self.line,
                    column,
                    message: "expected an integer exponent".to_string(),
                }),
            }
        } else {
            Ok(atom)
        }
    }
}

/// Parses the presentation format described in the module documentation.
pub fn parse(text: &str) -> Result<GroupPresentation, ParseError> {
    let mut generators: Option<Vec<String>> = None;
    let mut relators = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let toks = tokenize(raw, line_no)?;
        if toks.is_empty() {
            continue;
        }
        match &generators {
            None => {
                let mut names = Vec::new();
                let mut expect_name = true;
                for (t, c) in &toks {
                    match (expect_name, t) {
                        (true, Tok::Name(n)) => {
                            if names.contains(n) {
                                return Err(ParseError::Syntax {
                                    line: line_no,
                                    column: *c,
                                    message: format!("generator \"{n}\" listed twice"),
                                });
                            }
                            names.push(n.clone());
                            expect_name = false;
                        }
                        (false, Tok::Comma) => expect_name = true,
                        _ => {
                            return Err(ParseError::Syntax {
                                line: line_no,
                                column: *c,
                                message: "generator line must be comma-separated names"
                                    .to_string(),
                            })
                        }
                    }
                }
                if expect_name {
                    return Err(ParseError::Syntax {
                        line: line_no,
                        column: toks.last().map_or(1, |(_, c)| c + 1),
                        message: "expected a generator name".to_string(),
                    });
                }
                generators = Some(names);
            }
            Some(names) => {
                let mut p = LineParser {
                    toks: &toks,
                    pos: 0,
                    line: line_no,
                    generators: names,
                };
                let lhs = p.word()?;
                let relator = if p.peek() == Some(&Tok::Equals) {
                    p.pos += 1;
                    let rhs = p.word()?;
                    lhs.concat(&rhs.inverse())
                } else {
                    lhs
                };
                if p.peek().is_some() {
                    return Err(p.error("trailing tokens after the relator"));
                }
                relators.push(relator);
            }
        }
    }
    match generators {
        Some(generators) => Ok(GroupPresentation {
            generators,
            relators,
        }),
        None => Err(ParseError::Empty),
    }
}
