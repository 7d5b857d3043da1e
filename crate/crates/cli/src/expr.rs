//! Surface syntax for sums of classes.
//!
//! ```text
//! expr    := term { ("+" | "-") term }
//! term    := [ integer "*" ] atom
//! atom    := class | "dual" "(" expr ")"
//! class   := "[" nat ";" degspec "]"
//! degspec := rational | kernel
//! rational:= nat [ "/" nat ]
//! kernel  := "{" pair { "," pair } "}"
//! pair    := ("zp" | "mup" | "alphap" | "coprime") ":" nat
//! ```

use std::fmt;

use k0_core::k0::{k0_add, k0_dual, k0_of_object, k0_scale, Degree};
use k0_core::{FactoredRational, IsogenyContext, K0Element, KernelMultiset};
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    /// Nonzero integer coefficients on sub-expressions.
    Sum(Vec<(BigInt, Expr)>),
    Dual(Box<Expr>),
    Class { n: BigUint, deg: DegSpec },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DegSpec {
    Rational { num: BigUint, den: BigUint },
    Kernel(KernelLiteral),
}

/// Unset fields count as zero (or one for `coprime`).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KernelLiteral {
    pub zp: Option<BigUint>,
    pub mup: Option<BigUint>,
    pub alphap: Option<BigUint>,
    pub coprime: Option<BigUint>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("parse error at offset {pos}: expected {expected}, found {found}")]
pub struct ParseError {
    pub pos: usize,
    pub expected: String,
    pub found: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Tok<'a> {
    Num(&'a str),
    Ident(&'a str),
    Sym(char),
    End,
}

impl fmt::Display for Tok<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(s) | Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Sym(c) => write!(f, "`{c}`"),
            Tok::End => write!(f, "end of input"),
        }
    }
}

struct Lexer<'a> {
    toks: Vec<(usize, Tok<'a>)>,
    at: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Result<Self, ParseError> {
        let bytes = src.as_bytes();
        let mut toks = Vec::new();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i];
            if c.is_ascii_whitespace() {
                i += 1;
            } else if c.is_ascii_digit() {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                toks.push((start, Tok::Num(&src[start..i])));
            } else if c.is_ascii_alphabetic() {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                toks.push((start, Tok::Ident(&src[start..i])));
            } else if b"+-*()[];/{},:".contains(&c) {
                toks.push((i, Tok::Sym(c as char)));
                i += 1;
            } else {
                let ch = src[i..].chars().next().unwrap_or('?');
                return Err(ParseError {
                    pos: i,
                    expected: "a number, name or one of + - * ( ) [ ] ; / { } , :".into(),
                    found: format!("`{ch}`"),
                });
            }
        }
        toks.push((src.len(), Tok::End));
        Ok(Self { toks, at: 0 })
    }

    fn peek(&self) -> Tok<'a> {
        self.toks[self.at].1
    }

    fn pos(&self) -> usize {
        self.toks[self.at].0
    }

    fn bump(&mut self) -> Tok<'a> {
        let t = self.peek();
        if t != Tok::End {
            self.at += 1;
        }
        t
    }

    fn fail<T>(&self, expected: &str) -> Result<T, ParseError> {
        Err(ParseError {
            pos: self.pos(),
            expected: expected.into(),
            found: self.peek().to_string(),
        })
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.peek() == Tok::Sym(c) {
            self.bump();
            Ok(())
        } else {
            self.fail(&format!("`{c}`"))
        }
    }

    fn nat(&mut self, what: &str) -> Result<BigUint, ParseError> {
        match self.peek() {
            Tok::Num(s) => {
                self.bump();
                Ok(s.parse().expect("lexer yields digit runs"))
            }
            _ => self.fail(what),
        }
    }

    fn positive(&mut self, what: &str) -> Result<BigUint, ParseError> {
        let pos = self.pos();
        let n = self.nat(what)?;
        if n.is_zero() {
            return Err(ParseError {
                pos,
                expected: what.into(),
                found: "`0`".into(),
            });
        }
        Ok(n)
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut terms = vec![self.term(false)?];
        loop {
            let negate = match self.peek() {
                Tok::Sym('+') => false,
                Tok::Sym('-') => true,
                _ => break,
            };
            self.bump();
            let (c, e) = self.term(true)?;
            terms.push((if negate { -c } else { c }, e));
        }
        Ok(Expr::Sum(terms))
    }

    fn term(&mut self, after_op: bool) -> Result<(BigInt, Expr), ParseError> {
        let start = self.pos();
        let negative = !after_op && self.peek() == Tok::Sym('-');
        if negative {
            self.bump();
        }
        let coef = match self.peek() {
            Tok::Num(_) => {
                let n = BigInt::from(self.nat("a coefficient")?);
                self.expect('*')?;
                if n.is_zero() {
                    return Err(ParseError {
                        pos: start,
                        expected: "a nonzero coefficient".into(),
                        found: "`0`".into(),
                    });
                }
                n
            }
            _ if negative => return self.fail("a coefficient"),
            _ => BigInt::one(),
        };
        let coef = if negative { -coef } else { coef };
        Ok((coef, self.atom()?))
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Tok::Ident("dual") => {
                self.bump();
                self.expect('(')?;
                let inner = self.expr()?;
                self.expect(')')?;
                Ok(Expr::Dual(Box::new(inner)))
            }
            Tok::Sym('[') => {
                self.bump();
                let n = self.positive("a positive multiplicity")?;
                self.expect(';')?;
                let deg = self.degspec()?;
                self.expect(']')?;
                Ok(Expr::Class { n, deg })
            }
            _ => self.fail("`[` or `dual`"),
        }
    }

    fn degspec(&mut self) -> Result<DegSpec, ParseError> {
        if self.peek() == Tok::Sym('{') {
            return Ok(DegSpec::Kernel(self.kernel()?));
        }
        let num = self.positive("a positive degree or `{`")?;
        let den = if self.peek() == Tok::Sym('/') {
            self.bump();
            self.positive("a positive denominator")?
        } else {
            BigUint::one()
        };
        Ok(DegSpec::Rational { num, den })
    }

    fn kernel(&mut self) -> Result<KernelLiteral, ParseError> {
        self.expect('{')?;
        let mut k = KernelLiteral::default();
        loop {
            let pos = self.pos();
            let slot = match self.peek() {
                Tok::Ident("zp") => &mut k.zp,
                Tok::Ident("mup") => &mut k.mup,
                Tok::Ident("alphap") => &mut k.alphap,
                Tok::Ident("coprime") => &mut k.coprime,
                _ => return self.fail("one of zp, mup, alphap, coprime"),
            };
            if slot.is_some() {
                return Err(ParseError {
                    pos,
                    expected: "a field not given before".into(),
                    found: self.peek().to_string(),
                });
            }
            self.bump();
            self.expect(':')?;
            let v = self.nat("a count")?;
            *slot = Some(v);
            match self.bump() {
                Tok::Sym(',') => continue,
                Tok::Sym('}') => break,
                _ => {
                    self.at -= 1;
                    return self.fail("`,` or `}`");
                }
            }
        }
        Ok(k)
    }
}

pub fn parse_expression(text: &str) -> Result<Expr, ParseError> {
    let mut lx = Lexer::new(text)?;
    let e = lx.expr()?;
    if lx.peek() != Tok::End {
        return lx.fail("`+`, `-` or end of input");
    }
    Ok(e)
}

/// A positive rational `n` or `n/d`.
pub fn parse_rational(text: &str) -> Result<(BigUint, BigUint), ParseError> {
    let mut lx = Lexer::new(text)?;
    match lx.degspec()? {
        DegSpec::Rational { num, den } if lx.peek() == Tok::End => Ok((num, den)),
        DegSpec::Rational { .. } => lx.fail("end of input"),
        DegSpec::Kernel(_) => Err(ParseError {
            pos: 0,
            expected: "a rational".into(),
            found: "`{`".into(),
        }),
    }
}

pub fn parse_kernel(text: &str) -> Result<KernelLiteral, ParseError> {
    let mut lx = Lexer::new(text)?;
    let k = lx.kernel()?;
    if lx.peek() != Tok::End {
        return lx.fail("end of input");
    }
    Ok(k)
}

impl fmt::Display for KernelLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fields = [
            ("zp", &self.zp),
            ("mup", &self.mup),
            ("alphap", &self.alphap),
            ("coprime", &self.coprime),
        ];
        let set: Vec<String> = fields
            .iter()
            .filter_map(|(name, v)| v.as_ref().map(|v| format!("{name}:{v}")))
            .collect();
        if set.is_empty() {
            // the grammar needs at least one pair
            return write!(f, "{{zp:0}}");
        }
        write!(f, "{{{}}}", set.join(", "))
    }
}

impl fmt::Display for DegSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DegSpec::Rational { num, den } if den.is_one() => write!(f, "{num}"),
            DegSpec::Rational { num, den } => write!(f, "{num}/{den}"),
            DegSpec::Kernel(k) => write!(f, "{k}"),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Class { n, deg } => write!(f, "[{n}; {deg}]"),
            Expr::Dual(inner) => write!(f, "dual({inner})"),
            Expr::Sum(terms) => {
                for (i, (c, e)) in terms.iter().enumerate() {
                    // a nested sum as a term must be wrapped; only dual() can hold one
                    let body = match e {
                        Expr::Sum(_) => format!("dual(dual({e}))"),
                        _ => e.to_string(),
                    };
                    if i == 0 {
                        if c.is_one() {
                            write!(f, "{body}")?;
                        } else {
                            write!(f, "{c}*{body}")?;
                        }
                    } else {
                        let op = if c.is_negative() { '-' } else { '+' };
                        let m = c.abs();
                        if m.is_one() {
                            write!(f, " {op} {body}")?;
                        } else {
                            write!(f, " {op} {m}*{body}")?;
                        }
                    }
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("kernel literals need a characteristic p context, got {0}")]
    KernelInCharZero(String),
    #[error("kernel count {0} is too large")]
    CountOverflow(BigUint),
    #[error(transparent)]
    Core(#[from] k0_core::Error),
}

fn count(v: &Option<BigUint>) -> Result<u64, EvalError> {
    match v {
        None => Ok(0),
        Some(v) => v.to_u64().ok_or_else(|| EvalError::CountOverflow(v.clone())),
    }
}

/// The kernel named by a literal, in the characteristic of `ctx`.
pub fn kernel_of_literal(ctx: &IsogenyContext, k: &KernelLiteral) -> Result<KernelMultiset, EvalError> {
    let p = ctx
        .characteristic()
        .ok_or_else(|| EvalError::KernelInCharZero(ctx.to_string()))?;
    let coprime = match &k.coprime {
        None => FactoredRational::one(),
        Some(n) if n.is_zero() => {
            return Err(k0_core::Error::InvalidKernel {
                p: p.clone(),
                coprime: "0".into(),
            }
            .into())
        }
        Some(n) => FactoredRational::from_integer(n),
    };
    Ok(KernelMultiset::new(
        p.clone(),
        count(&k.zp)?,
        count(&k.mup)?,
        count(&k.alphap)?,
        coprime,
    )?)
}

pub fn degree_of(ctx: &IsogenyContext, deg: &DegSpec) -> Result<Degree, EvalError> {
    Ok(match deg {
        DegSpec::Rational { num, den } => Degree::Rational(FactoredRational::from_ratio(num, den)),
        DegSpec::Kernel(k) => Degree::Kernel(kernel_of_literal(ctx, k)?),
    })
}

pub fn eval_expression(ctx: &IsogenyContext, e: &Expr) -> Result<K0Element, EvalError> {
    match e {
        Expr::Class { n, deg } => Ok(k0_of_object(ctx, n, &degree_of(ctx, deg)?)?),
        Expr::Dual(inner) => Ok(k0_dual(ctx, &eval_expression(ctx, inner)?)?),
        Expr::Sum(terms) => {
            let mut acc = K0Element::zero(ctx);
            for (c, t) in terms {
                let x = k0_scale(ctx, &eval_expression(ctx, t)?, c)?;
                acc = k0_add(ctx, &acc, &x)?;
            }
            Ok(acc)
        }
    }
}
