//! The structure-equation DSL: algebras, named forms, named vectors and
//! fibration blocks, with `#` comments. Serialization round-trips through
//! the same grammar.
//!
//! ```text
//! file      := (algebra | form | vector | fibration)*
//! algebra   := "algebra" IDENT "{" "dim" INT (sep deq)* "}"
//! deq       := "d" GEN "=" expr | "d" GEN "=" "0"
//! expr      := term (("+" | "-") term)*
//! term      := [scalar "*"] GEN ("^" GEN)* | scalar
//! GEN       := "phi" INT | "phi~" INT
//! form      := "form" IDENT "on" IDENT "(" INT "," INT ")" "=" expr
//! vector    := "vector" IDENT "on" IDENT "=" vexpr
//! vexpr     := vterm (("+" | "-") vterm)*
//! vterm     := [scalar "*"] [GEN ("^" GEN)* "*"] "e" INT
//! fibration := "fibration" IDENT "on" IDENT "{" "base" "=" INT ".." INT ";"
//!              "eta" "=" vexpr "," vexpr "," vexpr ";" "psi3" "=" expr "}"
//! ```
//!
//! Statements inside a block are separated by `;` or newlines. A bare
//! algebra body (`dim 3; d phi3 = phi1^phi2`) is accepted by
//! `parse_algebra`. Scalars use the shared literal syntax (`-3/2+1/4i`);
//! a compound literal inside an expression must be parenthesised.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::algebra::AlgebraSpec;
use crate::error::CoreError;
use crate::exterior::{Bidegree, Form, VectorField, VectorForm};
use crate::scalar::GaussRat;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Word(String),
    Int(String),
    Sym(char),
    DotDot,
    Newline,
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(src: &str) -> Result<Vec<Spanned>, CoreError> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = src.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (l, co) = (line, col);
        match c {
            '\n' => {
                chars.next();
                out.push(Spanned { tok: Tok::Newline, line: l, col: co });
                line += 1;
                col = 1;
            }
            ' ' | '\t' | '\r' => {
                chars.next();
                col += 1;
            }
            '#' => {
                while let Some(&c2) = chars.peek() {
                    if c2 == '\n' {
                        break;
                    }
                    chars.next();
                    col += 1;
                }
            }
            c if c.is_ascii_digit() => {
                let mut s = String::new();
                while let Some(&c2) = chars.peek() {
                    if c2.is_ascii_digit() {
                        s.push(c2);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                out.push(Spanned { tok: Tok::Int(s), line: l, col: co });
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut s = String::new();
                while let Some(&c2) = chars.peek() {
                    if c2.is_ascii_alphanumeric() || c2 == '_' || c2 == '~' || c2 == '-' {
                        s.push(c2);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                out.push(Spanned { tok: Tok::Word(s), line: l, col: co });
            }
            '.' => {
                chars.next();
                col += 1;
                if chars.peek() == Some(&'.') {
                    chars.next();
                    col += 1;
                    out.push(Spanned { tok: Tok::DotDot, line: l, col: co });
                } else {
                    return Err(CoreError::Syntax {
                        line: l,
                        col: co,
                        msg: "stray '.'".into(),
                    });
                }
            }
            '+' | '-' | '*' | '^' | '/' | '(' | ')' | '{' | '}' | '=' | ',' | ';' => {
                chars.next();
                col += 1;
                out.push(Spanned { tok: Tok::Sym(c), line: l, col: co });
            }
            other => {
                return Err(CoreError::Syntax {
                    line: l,
                    col: co,
                    msg: format!("unexpected character '{other}'"),
                });
            }
        }
    }
    Ok(out)
}

/// A generator reference in an expression.
#[derive(Clone, Copy, Debug, PartialEq)]
enum Gen {
    Hol(usize),
    Anti(usize),
}

/// A fibration block as written: coframe split, η-frame, and ψ₃.
#[derive(Clone, Debug)]
pub struct FibrationBlock {
    pub name: String,
    pub algebra: String,
    pub base: Vec<usize>,
    pub eta: [VectorField; 3],
    pub psi3: Form,
}

/// Everything a DSL file defines.
#[derive(Clone, Debug, Default)]
pub struct ParsedFile {
    pub algebras: BTreeMap<String, Arc<AlgebraSpec>>,
    pub forms: BTreeMap<String, Form>,
    pub vectors: BTreeMap<String, VectorForm>,
    pub fibrations: BTreeMap<String, FibrationBlock>,
    /// Declaration order of forms, for "the only form in the file" defaults.
    pub form_order: Vec<String>,
    pub algebra_order: Vec<String>,
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn err<T>(&self, msg: &str) -> Result<T, CoreError> {
        let (line, col) = self
            .toks
            .get(self.pos.min(self.toks.len().saturating_sub(1)))
            .map(|s| (s.line, s.col))
            .unwrap_or((0, 0));
        Err(CoreError::Syntax { line, col, msg: msg.to_string() })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|s| s.tok.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }


    fn skip_separators(&mut self) {
        while matches!(self.peek(), Some(Tok::Newline) | Some(Tok::Sym(';'))) {
            self.pos += 1;
        }
    }

    fn expect_sym(&mut self, c: char) -> Result<(), CoreError> {
        match self.next() {
            Some(Tok::Sym(s)) if s == c => Ok(()),
            _ => {
                self.pos = self.pos.saturating_sub(1);
                self.err(&format!("expected '{c}'"))
            }
        }
    }

    fn expect_word(&mut self, w: &str) -> Result<(), CoreError> {
        match self.next() {
            Some(Tok::Word(s)) if s == w => Ok(()),
            _ => {
                self.pos = self.pos.saturating_sub(1);
                self.err(&format!("expected '{w}'"))
            }
        }
    }

    fn ident(&mut self) -> Result<String, CoreError> {
        match self.next() {
            Some(Tok::Word(s)) => Ok(s),
            _ => {
                self.pos = self.pos.saturating_sub(1);
                self.err("expected identifier")
            }
        }
    }

    fn int(&mut self) -> Result<usize, CoreError> {
        match self.next() {
            Some(Tok::Int(s)) => s.parse().map_err(|_| CoreError::Semantic(format!(
                "integer '{s}' out of range"
            ))),
            _ => {
                self.pos = self.pos.saturating_sub(1);
                self.err("expected integer")
            }
        }
    }

    fn gen_ref(&mut self, n: usize) -> Result<Gen, CoreError> {
        match self.next() {
            Some(Tok::Word(w)) => {
                let g = parse_gen_word(&w, n);
                match g {
                    Some(g) => Ok(g),
                    None => {
                        self.pos -= 1;
                        self.err(&format!("expected generator phi<k> or phi~<k>, got '{w}'"))
                    }
                }
            }
            _ => {
                self.pos = self.pos.saturating_sub(1);
                self.err("expected generator")
            }
        }
    }

    /// Scalar at the current position: `INT [/ INT] [i]`, bare `i`, or a
    /// parenthesised full literal.
    fn scalar(&mut self) -> Result<GaussRat, CoreError> {
        match self.peek() {
            Some(Tok::Sym('(')) => {
                self.next();
                let mut text = String::new();
                loop {
                    match self.next() {
                        Some(Tok::Sym(')')) => break,
                        Some(Tok::Sym(c)) => text.push(c),
                        Some(Tok::Int(s)) => text.push_str(&s),
                        Some(Tok::Word(s)) => text.push_str(&s),
                        Some(Tok::DotDot) | Some(Tok::Newline) | None => {
                            return self.err("unterminated scalar literal");
                        }
                    }
                }
                GaussRat::parse_literal(&text)
            }
            Some(Tok::Word(w)) if w == "i" => {
                self.next();
                Ok(GaussRat::i())
            }
            Some(Tok::Int(_)) => {
                let num = self.int()? as i64;
                let mut r = GaussRat::from_int(num);
                if self.peek() == Some(&Tok::Sym('/')) {
                    self.next();
                    let den = self.int()? as i64;
                    if den == 0 {
                        return Err(CoreError::ScalarSyntax(format!("{num}/0")));
                    }
                    r = GaussRat::from_frac(num, den);
                }
                if let Some(Tok::Word(w)) = self.peek() {
                    if w == "i" {
                        self.next();
                        r = &r * &GaussRat::i();
                    }
                }
                Ok(r)
            }
            _ => self.err("expected scalar"),
        }
    }

    fn starts_scalar(&self) -> bool {
        matches!(self.peek(), Some(Tok::Int(_)) | Some(Tok::Sym('(')))
            || matches!(self.peek(), Some(Tok::Word(w)) if w == "i")
    }

    /// Form expression on a fixed algebra.
    fn expr(&mut self, algebra: &Arc<AlgebraSpec>) -> Result<Form, CoreError> {
        let mut acc = Form::zero(algebra);
        let mut sign = GaussRat::one();
        if self.peek() == Some(&Tok::Sym('-')) {
            self.next();
            sign = -&sign;
        } else if self.peek() == Some(&Tok::Sym('+')) {
            self.next();
        }
        loop {
            let term = self.term(algebra)?;
            acc = acc.add(&term.scale(&sign));
            match self.peek() {
                Some(Tok::Sym('+')) => {
                    self.next();
                    sign = GaussRat::one();
                }
                Some(Tok::Sym('-')) => {
                    self.next();
                    sign = GaussRat::from_int(-1);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self, algebra: &Arc<AlgebraSpec>) -> Result<Form, CoreError> {
        let mut coeff = GaussRat::one();
        let mut saw_scalar = false;
        if self.starts_scalar() {
            coeff = self.scalar()?;
            saw_scalar = true;
            if self.peek() == Some(&Tok::Sym('*')) {
                self.next();
            } else {
                // A bare scalar term (degree (0,0)).
                return Ok(Form::constant(algebra, coeff));
            }
        }
        let mut form = match self.gen_form(algebra) {
            Ok(f) => f,
            Err(e) => {
                if saw_scalar {
                    return Err(e);
                }
                return Err(e);
            }
        };
        while self.peek() == Some(&Tok::Sym('^')) {
            self.next();
            let g = self.gen_form(algebra)?;
            form = form.wedge(&g);
        }
        Ok(form.scale(&coeff))
    }

    fn gen_form(&mut self, algebra: &Arc<AlgebraSpec>) -> Result<Form, CoreError> {
        match self.gen_ref(algebra.n)? {
            Gen::Hol(k) => {
                if k == 0 || k > algebra.n {
                    return Err(CoreError::Semantic(format!(
                        "generator phi{k} out of range 1..={}",
                        algebra.n
                    )));
                }
                Ok(Form::generator(algebra, k))
            }
            Gen::Anti(k) => {
                if k == 0 || k > algebra.n {
                    return Err(CoreError::Semantic(format!(
                        "generator phi~{k} out of range 1..={}",
                        algebra.n
                    )));
                }
                Ok(Form::anti_generator(algebra, k))
            }
        }
    }

    /// Vector expression: linear combination of `e<k>` and `form * e<k>`.
    fn vexpr(&mut self, algebra: &Arc<AlgebraSpec>) -> Result<VectorForm, CoreError> {
        let mut parts: Vec<VectorForm> = Vec::new();
        let mut sign = GaussRat::one();
        if self.peek() == Some(&Tok::Sym('-')) {
            self.next();
            sign = -&sign;
        }
        loop {
            let vt = self.vterm(algebra)?;
            parts.push(vt.scale(&sign));
            match self.peek() {
                Some(Tok::Sym('+')) => {
                    self.next();
                    sign = GaussRat::one();
                }
                Some(Tok::Sym('-')) => {
                    self.next();
                    sign = GaussRat::from_int(-1);
                }
                _ => break,
            }
        }
        let q = parts
            .iter()
            .find(|p| !p.is_zero())
            .map(|p| p.q())
            .unwrap_or(0);
        let mut acc = VectorForm::zero(algebra, q);
        for p in parts {
            if p.q() != q && !p.is_zero() {
                return Err(CoreError::Semantic(
                    "vector terms of mixed antiholomorphic degree".into(),
                ));
            }
            if p.q() == q {
                acc = acc.add(&p);
            }
        }
        Ok(acc)
    }

    fn vterm(&mut self, algebra: &Arc<AlgebraSpec>) -> Result<VectorForm, CoreError> {
        let mut coeff = GaussRat::one();
        if self.starts_scalar() {
            coeff = self.scalar()?;
            self.expect_sym('*')?;
        }
        // Optional (0,q)-form factor before the frame vector.
        let mut factor: Option<Form> = None;
        if let Some(Tok::Word(w)) = self.peek() {
            if parse_gen_word(w, algebra.n).is_some() {
                let mut f = self.gen_form(algebra)?;
                while self.peek() == Some(&Tok::Sym('^')) {
                    self.next();
                    f = f.wedge(&self.gen_form(algebra)?);
                }
                match f.bidegree() {
                    Bidegree::Zero | Bidegree::Pure(0, _) => {}
                    other => {
                        return Err(CoreError::Semantic(format!(
                            "vector coefficient must be a (0,q)-form, got {other:?}"
                        )))
                    }
                }
                factor = Some(f);
                self.expect_sym('*')?;
            }
        }
        let lambda = match self.next() {
            Some(Tok::Word(w)) => match parse_frame_word(&w) {
                Some(k) if k >= 1 && k <= algebra.n => k,
                _ => {
                    self.pos -= 1;
                    return self.err(&format!("expected frame vector e<1..{}>", algebra.n));
                }
            },
            _ => {
                self.pos = self.pos.saturating_sub(1);
                return self.err("expected frame vector");
            }
        };
        let comp = match factor {
            Some(f) => f.scale(&coeff),
            None => Form::constant(algebra, coeff),
        };
        Ok(VectorForm::simple(&comp, lambda))
    }

    /// `dim INT (sep deq)*` — the body of an algebra block.
    fn algebra_body(&mut self, name: &str, closing: Option<char>) -> Result<Arc<AlgebraSpec>, CoreError> {
        self.skip_separators();
        self.expect_word("dim")?;
        let n = self.int()?;
        if n == 0 || n > crate::exterior::MAX_DIM {
            return Err(CoreError::Semantic(format!(
                "dimension must be in 1..={}, got {n}",
                crate::exterior::MAX_DIM
            )));
        }
        // Differentials are evaluated as forms on a scratch abelian algebra
        // of the right dimension; only wedge structure matters here.
        let scratch = AlgebraSpec::torus("scratch", n);
        let mut a = vec![BTreeMap::new(); n];
        let mut b = vec![BTreeMap::new(); n];
        loop {
            self.skip_separators();
            match self.peek() {
                Some(Tok::Sym(c)) if Some(*c) == closing => {
                    self.next();
                    break;
                }
                None => {
                    if closing.is_some() {
                        return self.err("unterminated algebra block");
                    }
                    break;
                }
                Some(Tok::Word(w)) if w == "d" => {
                    self.next();
                    let gen = self.gen_ref(n)?;
                    let k = match gen {
                        Gen::Hol(k) if k >= 1 && k <= n => k,
                        Gen::Hol(k) => {
                            return Err(CoreError::Semantic(format!(
                                "generator phi{k} out of range 1..={n}"
                            )))
                        }
                        Gen::Anti(_) => {
                            return Err(CoreError::Semantic(
                                "d phi~k is derived by conjugation and cannot be declared".into(),
                            ))
                        }
                    };
                    self.expect_sym('=')?;
                    let rhs = if matches!(self.peek(), Some(Tok::Int(s)) if s == "0")
                        && !matches!(self.toks.get(self.pos + 1).map(|s| &s.tok), Some(Tok::Sym('/')) | Some(Tok::Sym('*')))
                    {
                        self.next();
                        Form::zero(&scratch)
                    } else {
                        self.expr(&scratch)?
                    };
                    accumulate_deq(&mut a, &mut b, k, &rhs)?;
                }
                _ => {
                    return self.err("expected 'd phi<k> = ...' or end of block");
                }
            }
        }
        let spec = AlgebraSpec::from_constants(name, n, a, b)?;
        Ok(Arc::new(spec))
    }

    fn file(&mut self) -> Result<ParsedFile, CoreError> {
        let mut out = ParsedFile::default();
        loop {
            self.skip_separators();
            let Some(tok) = self.peek().cloned() else {
                break;
            };
            match tok {
                Tok::Word(w) if w == "algebra" => {
                    self.next();
                    let name = self.ident()?;
                    self.expect_sym('{')?;
                    let alg = self.algebra_body(&name, Some('}'))?;
                    out.algebra_order.push(name.clone());
                    out.algebras.insert(name, alg);
                }
                Tok::Word(w) if w == "form" => {
                    self.next();
                    let name = self.ident()?;
                    self.expect_word("on")?;
                    let alg_name = self.ident()?;
                    let algebra = out
                        .algebras
                        .get(&alg_name)
                        .ok_or_else(|| CoreError::Semantic(format!("unknown algebra '{alg_name}'")))?
                        .clone();
                    self.expect_sym('(')?;
                    let p = self.int()?;
                    self.expect_sym(',')?;
                    let q = self.int()?;
                    self.expect_sym(')')?;
                    self.expect_sym('=')?;
                    let f = self.expr(&algebra)?;
                    if !f.is_homogeneous(p, q) {
                        return Err(CoreError::Semantic(format!(
                            "form '{name}' declared ({p},{q}) but has bidegree {:?}",
                            f.bidegree()
                        )));
                    }
                    out.form_order.push(name.clone());
                    out.forms.insert(name, f);
                }
                Tok::Word(w) if w == "vector" => {
                    self.next();
                    let name = self.ident()?;
                    self.expect_word("on")?;
                    let alg_name = self.ident()?;
                    let algebra = out
                        .algebras
                        .get(&alg_name)
                        .ok_or_else(|| CoreError::Semantic(format!("unknown algebra '{alg_name}'")))?
                        .clone();
                    self.expect_sym('=')?;
                    let v = self.vexpr(&algebra)?;
                    out.vectors.insert(name, v);
                }
                Tok::Word(w) if w == "fibration" => {
                    self.next();
                    let name = self.ident()?;
                    self.expect_word("on")?;
                    let alg_name = self.ident()?;
                    let algebra = out
                        .algebras
                        .get(&alg_name)
                        .ok_or_else(|| CoreError::Semantic(format!("unknown algebra '{alg_name}'")))?
                        .clone();
                    self.expect_sym('{')?;
                    self.skip_separators();
                    self.expect_word("base")?;
                    self.expect_sym('=')?;
                    let lo = self.int()?;
                    match self.next() {
                        Some(Tok::DotDot) => {}
                        _ => return self.err("expected '..' in base range"),
                    }
                    let hi = self.int()?;
                    if lo == 0 || hi < lo || hi > algebra.n {
                        return Err(CoreError::Semantic(format!(
                            "base range {lo}..{hi} out of bounds for dim {}",
                            algebra.n
                        )));
                    }
                    self.skip_separators();
                    self.expect_word("eta")?;
                    self.expect_sym('=')?;
                    let mut etas = Vec::new();
                    for k in 0..3 {
                        let v = self.vexpr(&algebra)?;
                        if v.q() != 0 {
                            return Err(CoreError::Semantic(
                                "eta frame entries must be plain vector fields".into(),
                            ));
                        }
                        etas.push(v.to_field());
                        if k < 2 {
                            self.expect_sym(',')?;
                        }
                    }
                    self.skip_separators();
                    self.expect_word("psi3")?;
                    self.expect_sym('=')?;
                    let psi3 = self.expr(&algebra)?;
                    self.skip_separators();
                    self.expect_sym('}')?;
                    let eta: [VectorField; 3] = [
                        etas[0].clone(),
                        etas[1].clone(),
                        etas[2].clone(),
                    ];
                    out.fibrations.insert(
                        name.clone(),
                        FibrationBlock { name, algebra: alg_name, base: (lo..=hi).collect(), eta, psi3 },
                    );
                }
                Tok::Word(w) if w == "dim" => {
                    // Bare algebra body: treat the rest as one anonymous algebra.
                    let alg = self.algebra_body("anonymous", None)?;
                    out.algebra_order.push(alg.name.clone());
                    out.algebras.insert(alg.name.clone(), alg);
                }
                _ => {
                    return self.err("expected 'algebra', 'form', 'vector', 'fibration' or 'dim'");
                }
            }
        }
        Ok(out)
    }
}

fn parse_gen_word(w: &str, _n: usize) -> Option<Gen> {
    if let Some(rest) = w.strip_prefix("phi~") {
        rest.parse().ok().map(Gen::Anti)
    } else if let Some(rest) = w.strip_prefix("phi") {
        rest.parse().ok().map(Gen::Hol)
    } else {
        None
    }
}

fn parse_frame_word(w: &str) -> Option<usize> {
    w.strip_prefix('e').and_then(|rest| rest.parse().ok())
}

/// Distributes an evaluated `dφ^k` right-hand side into the structure
/// constant tables, rejecting anything that is not a (2,0)+(1,1) form.
fn accumulate_deq(
    a: &mut [BTreeMap<(usize, usize), GaussRat>],
    b: &mut [BTreeMap<(usize, usize), GaussRat>],
    k: usize,
    rhs: &Form,
) -> Result<(), CoreError> {
    for (m, c) in rhs.terms() {
        match m.bidegree() {
            (2, 0) => {
                let idx: Vec<usize> = m.hol_indices().collect();
                let slot = a[k - 1].entry((idx[0], idx[1])).or_insert_with(GaussRat::zero);
                *slot += c;
            }
            (1, 1) => {
                let i = m.hol_indices().next().unwrap();
                let j = m.anti_indices().next().unwrap();
                let slot = b[k - 1].entry((i, j)).or_insert_with(GaussRat::zero);
                *slot += c;
            }
            (0, 2) => {
                return Err(CoreError::Semantic(format!(
                    "d phi{k} has a (0,2) component; the complex structure would not be integrable"
                )));
            }
            other => {
                return Err(CoreError::Semantic(format!(
                    "d phi{k} must be a 2-form; found a component of bidegree {other:?}"
                )));
            }
        }
    }
    a[k - 1].retain(|_, c| !c.is_zero());
    b[k - 1].retain(|_, c| !c.is_zero());
    Ok(())
}

/// Parses a whole DSL file.
pub fn parse_file(src: &str) -> Result<ParsedFile, CoreError> {
    let toks = lex(src)?;
    Parser { toks, pos: 0 }.file()
}

/// Parses a source that must define exactly one algebra (either a bare body
/// or a single `algebra` block) and returns it.
pub fn parse_algebra(src: &str) -> Result<Arc<AlgebraSpec>, CoreError> {
    let file = parse_file(src)?;
    match file.algebra_order.len() {
        1 => Ok(file.algebras[&file.algebra_order[0]].clone()),
        0 => Err(CoreError::Semantic("source defines no algebra".into())),
        k => Err(CoreError::Semantic(format!("source defines {k} algebras, expected one"))),
    }
}

/// Parses a form expression against a given algebra.
pub fn parse_form_expr(algebra: &Arc<AlgebraSpec>, src: &str) -> Result<Form, CoreError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0 };
    p.skip_separators();
    let f = p.expr(algebra)?;
    p.skip_separators();
    if p.peek().is_some() {
        return p.err("trailing input after form expression");
    }
    Ok(f)
}

/// Parses a vector expression against a given algebra.
pub fn parse_vector_expr(algebra: &Arc<AlgebraSpec>, src: &str) -> Result<VectorForm, CoreError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0 };
    p.skip_separators();
    let v = p.vexpr(algebra)?;
    p.skip_separators();
    if p.peek().is_some() {
        return p.err("trailing input after vector expression");
    }
    Ok(v)
}

fn write_scalar_factor(out: &mut String, c: &GaussRat) {
    let lit = c.to_literal();
    let needs_parens = lit.contains('+') || lit[1..].contains('-');
    if needs_parens {
        let _ = write!(out, "({lit})*");
    } else {
        let _ = write!(out, "{lit}*");
    }
}

/// Serializes a form in the expression grammar.
pub fn serialize_form_expr(f: &Form) -> String {
    if f.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    let mut first = true;
    for (m, c) in f.terms() {
        let mut factors: Vec<String> = m.hol_indices().map(|i| format!("phi{i}")).collect();
        factors.extend(m.anti_indices().map(|j| format!("phi~{j}")));
        let mono = factors.join("^");
        let mut piece = String::new();
        if mono.is_empty() {
            let _ = write!(piece, "{}", c.to_literal());
        } else if c.is_one() {
            piece = mono;
        } else if c.to_literal() == "-1" {
            let _ = write!(piece, "-{mono}");
        } else {
            write_scalar_factor(&mut piece, c);
            piece.push_str(&mono);
        }
        if first {
            out.push_str(&piece);
            first = false;
        } else if let Some(rest) = piece.strip_prefix('-') {
            let _ = write!(out, " - {rest}");
        } else {
            let _ = write!(out, " + {piece}");
        }
    }
    out
}

/// Serializes a vector form in the vector grammar.
pub fn serialize_vector_expr(v: &VectorForm) -> String {
    if v.is_zero() {
        return "0*e1".to_string();
    }
    let mut out = String::new();
    let mut first = true;
    for lambda in 1..=v.algebra().n {
        let comp = v.component(lambda);
        if comp.is_zero() {
            continue;
        }
        for (m, c) in comp.terms() {
            let mono: Vec<String> = m.anti_indices().map(|j| format!("phi~{j}")).collect();
            let mut piece = String::new();
            if !c.is_one() || mono.is_empty() {
                if c.to_literal() == "-1" && !mono.is_empty() {
                    piece.push('-');
                } else {
                    write_scalar_factor(&mut piece, c);
                }
            }
            if !mono.is_empty() {
                let _ = write!(piece, "{}*", mono.join("^"));
            }
            let _ = write!(piece, "e{lambda}");
            if first {
                out.push_str(&piece);
                first = false;
            } else if let Some(rest) = piece.strip_prefix('-') {
                let _ = write!(out, " - {rest}");
            } else {
                let _ = write!(out, " + {piece}");
            }
        }
    }
    out
}

/// Serializes an algebra as an `algebra` block.
pub fn serialize_algebra(a: &Arc<AlgebraSpec>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "algebra {} {{", a.name);
    let _ = writeln!(out, "  dim {}", a.n);
    for k in 1..=a.n {
        let mut d = Form::zero(a);
        for (&(i, j), c) in a.hol_constants(k) {
            let m = Form::generator(a, i).wedge(&Form::generator(a, j)).scale(c);
            d = d.add(&m);
        }
        for (&(i, j), c) in a.mixed_constants(k) {
            let m = Form::generator(a, i).wedge(&Form::anti_generator(a, j)).scale(c);
            d = d.add(&m);
        }
        if !d.is_zero() {
            let _ = writeln!(out, "  d phi{k} = {}", serialize_form_expr(&d));
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bare_body_and_block_forms() {
        let a = parse_algebra("dim 3; d phi3 = phi1^phi2").unwrap();
        let b = parse_algebra("algebra iwasawa {\n  dim 3\n  d phi3 = phi1^phi2\n}").unwrap();
        assert!(a.same_structure(&b));
        assert_eq!(b.name, "iwasawa");
    }

    #[test]
    fn comments_and_scalars() {
        let src = "# the Iwasawa algebra\nalgebra x { dim 3; d phi3 = 2*phi1^phi2 - phi2^phi1 }";
        let a = parse_algebra(src).unwrap();
        // 2 φ1∧φ2 − φ2∧φ1 = 3 φ1∧φ2
        assert_eq!(a.hol_constants(3).get(&(1, 2)), Some(&GaussRat::from_int(3)));
    }

    #[test]
    fn named_forms_and_vectors() {
        let src = "algebra iw { dim 3; d phi3 = phi1^phi2 }\n\
                   form gamma on iw (1,0) = phi3\n\
                   form omega on iw (2,0) = (1/2)*phi1^phi2 + 3i*phi1^phi3\n\
                   vector psi1 on iw = phi~1 * e2 + phi~2 * e1\n\
                   vector xi on iw = e3 - 2*e1\n";
        let f = parse_file(src).unwrap();
        assert_eq!(f.form_order, vec!["gamma", "omega"]);
        let psi1 = &f.vectors["psi1"];
        assert_eq!(psi1.q(), 1);
        let xi = &f.vectors["xi"];
        assert_eq!(xi.q(), 0);
        assert_eq!(xi.to_field().coeffs()[0], GaussRat::from_int(-2));
    }

    #[test]
    fn declared_bidegree_checked() {
        let src = "algebra iw { dim 3; d phi3 = phi1^phi2 }\nform g on iw (2,0) = phi3\n";
        assert!(matches!(parse_file(src), Err(CoreError::Semantic(_))));
    }

    #[test]
    fn syntax_error_carries_position() {
        let err = parse_algebra("dim 3; d phi3 = ^phi2").unwrap_err();
        match err {
            CoreError::Syntax { line, col, .. } => {
                assert_eq!(line, 1);
                assert!(col > 0);
            }
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn algebra_round_trip() {
        let src = "algebra g2t { dim 7; d phi5 = phi1^phi2 + phi3^phi4; \
                   d phi6 = phi1^phi3 - phi2^phi4; d phi7 = phi1^phi4 + phi2^phi3 }";
        let a = parse_algebra(src).unwrap();
        let text = serialize_algebra(&a);
        let b = parse_algebra(&text).unwrap();
        assert!(a.same_structure(&b));
        assert_eq!(a.name, b.name);
    }

    #[test]
    fn form_and_vector_round_trip() {
        let a = parse_algebra("dim 3; d phi3 = phi1^phi2").unwrap();
        let f = parse_form_expr(&a, "(1/2-3i)*phi1^phi2 - phi3^phi~1").unwrap();
        let f2 = parse_form_expr(&a, &serialize_form_expr(&f)).unwrap();
        assert_eq!(f, f2);
        let v = parse_vector_expr(&a, "phi~1^phi~2 * e3 - 1/2*phi~1^phi~3 * e1").unwrap();
        let v2 = parse_vector_expr(&a, &serialize_vector_expr(&v)).unwrap();
        assert_eq!(v, v2);
    }

    #[test]
    fn fibration_block() {
        let src = "algebra t { dim 7; d phi7 = phi5^phi6 }\n\
                   form gamma on t (3,0) = phi1^phi2^phi7 + phi3^phi4^phi7\n\
                   fibration fib on t { base = 1..4; eta = e6, e5, e7; psi3 = phi7 }\n";
        let f = parse_file(src).unwrap();
        let fib = &f.fibrations["fib"];
        assert_eq!(fib.base, vec![1, 2, 3, 4]);
        assert_eq!(fib.eta[0].coeffs()[5], GaussRat::from_int(1));
        assert_eq!(serialize_form_expr(&fib.psi3), "phi7");
    }
}
