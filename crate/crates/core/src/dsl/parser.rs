//! Recursive descent parser for module definitions, axiom files and
//! standalone formulas.

use std::collections::{BTreeMap, BTreeSet};

use super::ast::*;
use super::lexer::{tokenize, Pos, Tok, Token};
use super::ParseError;

pub type ParseResult<T> = Result<T, ParseError>;

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn new(src: &str) -> ParseResult<Self> {
        Ok(Parser {
            toks: tokenize(src)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let i = (self.pos + n).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn here(&self) -> Pos {
        self.toks[self.pos].pos
    }

    fn advance(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, msg: impl Into<String>) -> ParseResult<T> {
        let p = self.here();
        Err(ParseError::Syntax {
            line: p.line,
            col: p.col,
            msg: msg.into(),
        })
    }

    fn unexpected<T>(&self, expected: &str) -> ParseResult<T> {
        self.error(format!("expected {expected}, found {}", self.peek()))
    }

    fn expect(&mut self, tok: Tok) -> ParseResult<()> {
        if *self.peek() == tok {
            self.advance();
            Ok(())
        } else {
            self.unexpected(&tok.to_string())
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.advance();
            true
        } else {
            false
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn expect_keyword(&mut self, kw: &str) -> ParseResult<()> {
        if self.is_keyword(kw) {
            self.advance();
            Ok(())
        } else {
            self.unexpected(&format!("`{kw}`"))
        }
    }

    fn ident(&mut self) -> ParseResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.advance();
                Ok(s)
            }
            _ => self.unexpected("identifier"),
        }
    }

    fn string(&mut self) -> ParseResult<String> {
        match self.peek().clone() {
            Tok::Str(s) => {
                self.advance();
                Ok(s)
            }
            _ => self.unexpected("string literal"),
        }
    }

    fn int(&mut self) -> ParseResult<i64> {
        match self.peek().clone() {
            Tok::Int(v) => {
                self.advance();
                Ok(v)
            }
            _ => self.unexpected("integer"),
        }
    }

    fn expect_eof(&mut self) -> ParseResult<()> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            self.error(format!("unexpected trailing input: {}", self.peek()))
        }
    }

    // ---------------------------------------------------------------
    // Formulas
    // ---------------------------------------------------------------

    fn formula(&mut self) -> ParseResult<Formula> {
        if self.is_keyword("forall") || self.is_keyword("exists") {
            return self.quantifier();
        }
        let lhs = self.disjunction()?;
        match self.peek() {
            Tok::Implies => {
                self.advance();
                let rhs = self.formula()?;
                Ok(Formula::Implies(Box::new(lhs), Box::new(rhs)))
            }
            Tok::Iff => {
                self.advance();
                let rhs = self.formula()?;
                Ok(Formula::Iff(Box::new(lhs), Box::new(rhs)))
            }
            _ => Ok(lhs),
        }
    }

    fn quantifier(&mut self) -> ParseResult<Formula> {
        let kind = if self.ident()? == "forall" {
            QuantKind::Forall
        } else {
            QuantKind::Exists
        };
        let op_type = self.ident()?;
        let var = self.string()?;
        let domain = if self.is_keyword("in") {
            self.advance();
            let text = self.string()?;
            let names: Vec<String> = text
                .split(';')
                .map(|s| s.trim().to_string())
                .filter(|s| !s.is_empty())
                .collect();
            if names.is_empty() {
                return self.error("empty quantifier domain");
            }
            Some(names)
        } else {
            None
        };
        self.expect(Tok::Comma)?;
        let body = self.formula()?;
        Ok(Formula::Quant(Quantifier {
            kind,
            op_type,
            var,
            domain,
            body: Box::new(body),
        }))
    }

    fn disjunction(&mut self) -> ParseResult<Formula> {
        let mut lhs = self.conjunction()?;
        while self.eat(&Tok::Or) {
            let rhs = self.conjunction()?;
            lhs = Formula::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> ParseResult<Formula> {
        let mut lhs = self.unary()?;
        while self.eat(&Tok::And) {
            let rhs = self.unary()?;
            lhs = Formula::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> ParseResult<Formula> {
        if self.eat(&Tok::Not) {
            return Ok(Formula::Not(Box::new(self.unary()?)));
        }
        if self.is_keyword("forall") || self.is_keyword("exists") {
            // A quantifier in operand position extends as far right as possible.
            return self.quantifier();
        }
        self.atom()
    }

    fn node_ref(&mut self) -> ParseResult<NodeRef> {
        self.expect(Tok::LParen)?;
        let op = self.ident()?;
        self.expect(Tok::Comma)?;
        let event = self.ident()?;
        self.expect(Tok::RParen)?;
        Ok(NodeRef { op, event })
    }

    fn edge_term(&mut self) -> ParseResult<EdgeTerm> {
        self.expect(Tok::LParen)?;
        let src = self.node_ref()?;
        self.expect(Tok::Comma)?;
        let dst = self.node_ref()?;
        let label = if self.eat(&Tok::Comma) {
            self.string()?
        } else {
            String::new()
        };
        self.expect(Tok::RParen)?;
        Ok(EdgeTerm { src, dst, label })
    }

    fn list<T>(&mut self, mut item: impl FnMut(&mut Self) -> ParseResult<T>) -> ParseResult<Vec<T>> {
        self.expect(Tok::LBracket)?;
        let mut out = vec![item(self)?];
        while self.eat(&Tok::Semi) {
            out.push(item(self)?);
        }
        self.expect(Tok::RBracket)?;
        Ok(out)
    }

    fn atom(&mut self) -> ParseResult<Formula> {
        if self.eat(&Tok::LParen) {
            let f = self.formula()?;
            self.expect(Tok::RParen)?;
            return Ok(f);
        }
        let start = self.here();
        let name = match self.peek().clone() {
            Tok::Ident(s) => s,
            _ => return self.unexpected("formula"),
        };
        if *self.peek_at(1) == Tok::Eq {
            self.advance();
            self.advance();
            let v = self.int()?;
            return Ok(Formula::ParamEq(name, v));
        }
        self.advance();
        match name.as_str() {
            "True" => Ok(Formula::Const(true)),
            "False" => Ok(Formula::Const(false)),
            "NodeExists" => Ok(Formula::NodeExists(self.node_ref()?)),
            "NodesExist" => {
                let nodes = self.list(Self::node_ref)?;
                Ok(Formula::conj(nodes.into_iter().map(Formula::NodeExists).collect()))
            }
            "AddEdge" => Ok(Formula::AddEdge(self.edge_term()?)),
            "AddEdges" => {
                let edges = self.list(Self::edge_term)?;
                Ok(Formula::conj(edges.into_iter().map(Formula::AddEdge).collect()))
            }
            "EdgeExists" => Ok(Formula::EdgeExists(self.edge_term()?)),
            "EdgesExist" => {
                let edges = self.list(Self::edge_term)?;
                Ok(Formula::conj(edges.into_iter().map(Formula::EdgeExists).collect()))
            }
            "SameNode" => {
                let a = self.node_ref()?;
                let b = self.node_ref()?;
                Ok(Formula::SameNode(a, b))
            }
            other => match Predicate::from_name(other) {
                Some(p) => {
                    let mut args = Vec::with_capacity(p.arity());
                    for _ in 0..p.arity() {
                        args.push(self.ident()?);
                    }
                    Ok(Formula::Pred(p, args))
                }
                None => Err(ParseError::Syntax {
                    line: start.line,
                    col: start.col,
                    msg: format!("unknown predicate `{other}`"),
                }),
            },
        }
    }

    fn axiom(&mut self) -> ParseResult<Axiom> {
        self.expect_keyword("Axiom")?;
        let name = self.string()?;
        self.expect(Tok::Colon)?;
        let body = self.formula()?;
        self.expect(Tok::Dot)?;
        Ok(Axiom { name, body })
    }

    // ---------------------------------------------------------------
    // Files
    // ---------------------------------------------------------------

    fn axiom_file(&mut self) -> ParseResult<AxiomFile> {
        self.expect_keyword("ModuleID")?;
        let module_type = self.string()?;
        self.expect(Tok::Dot)?;
        let mut events: Vec<EventDecl> = Vec::new();
        let mut axioms = Vec::new();
        loop {
            if self.is_keyword("DefineEvent") {
                let at = self.here();
                self.advance();
                let external = if self.is_keyword("External") {
                    self.advance();
                    true
                } else {
                    false
                };
                let index = self.int()?;
                let name = self.string()?;
                self.expect(Tok::Dot)?;
                if index < 0 {
                    return Err(ParseError::Syntax {
                        line: at.line,
                        col: at.col,
                        msg: format!("negative event index {index}"),
                    });
                }
                if events.iter().any(|e| e.name == name) {
                    return Err(ParseError::DuplicateEvent {
                        module: module_type,
                        event: name,
                    });
                }
                events.push(EventDecl {
                    index: index as u32,
                    name,
                    external,
                });
            } else if self.is_keyword("Axiom") {
                axioms.push(self.axiom()?);
            } else if *self.peek() == Tok::Eof {
                break;
            } else {
                return self.unexpected("`DefineEvent`, `Axiom` or end of file");
            }
        }
        let indices: BTreeSet<u32> = events.iter().map(|e| e.index).collect();
        if indices.len() != events.len() || indices.iter().copied().ne(0..events.len() as u32) {
            return Err(ParseError::NonContiguousEvents {
                module: module_type,
                indices: events.iter().map(|e| e.index).collect(),
            });
        }
        Ok(AxiomFile {
            module_type,
            events,
            axioms,
        })
    }

    fn module_def(&mut self) -> ParseResult<ModuleDef> {
        let is_interface = if self.is_keyword("Interface") {
            true
        } else if self.is_keyword("Module") {
            false
        } else {
            return self.unexpected("`Module` or `Interface`");
        };
        self.advance();
        let name = self.ident()?;
        self.expect(Tok::LParen)?;
        let mut param_names = Vec::new();
        if *self.peek() != Tok::RParen {
            param_names.push(self.ident()?);
            while self.eat(&Tok::Comma) {
                param_names.push(self.ident()?);
            }
        }
        self.expect(Tok::RParen)?;
        self.expect(Tok::LBrace)?;

        self.expect_keyword("OperationType")?;
        let ty = self.ident()?;
        let operation_type = (ty != "none").then_some(ty);

        let mut properties = BTreeMap::new();
        if self.is_keyword("Properties") {
            self.advance();
            self.expect(Tok::LBrace)?;
            while *self.peek() != Tok::RBrace {
                let key = self.ident()?;
                let value = match self.advance() {
                    Tok::Ident(s) => PropValue::Ident(s),
                    Tok::Int(v) => PropValue::Int(v),
                    _ => {
                        self.pos -= 1;
                        return self.unexpected("property value");
                    }
                };
                properties.insert(key, value);
            }
            self.expect(Tok::RBrace)?;
        }

        let mut submodules: Vec<SubmoduleInst> = Vec::new();
        if self.is_keyword("Submodules") {
            self.advance();
            self.expect(Tok::LBrace)?;
            while *self.peek() != Tok::RBrace {
                let module_type = self.ident()?;
                let inst = self.ident()?;
                self.expect(Tok::LParen)?;
                let mut params = BTreeMap::new();
                if *self.peek() != Tok::RParen {
                    loop {
                        let p = self.ident()?;
                        self.expect(Tok::Colon)?;
                        let v = self.int()?;
                        if params.insert(p.clone(), v).is_some() {
                            return self.error(format!("parameter `{p}` bound twice"));
                        }
                        if !self.eat(&Tok::Comma) {
                            break;
                        }
                    }
                }
                self.expect(Tok::RParen)?;
                if inst == "this" {
                    return self.error("`this` cannot name a submodule instance");
                }
                if submodules.iter().any(|s| s.name == inst) {
                    return Err(ParseError::DuplicateInstance { module: name, instance: inst });
                }
                submodules.push(SubmoduleInst {
                    module_type,
                    name: inst,
                    params,
                });
            }
            self.expect(Tok::RBrace)?;
        }

        let mut connection_axioms = Vec::new();
        if self.is_keyword("ConnectionAxioms") {
            self.advance();
            self.expect(Tok::LBrace)?;
            while *self.peek() != Tok::RBrace {
                connection_axioms.push(self.axiom()?);
            }
            self.expect(Tok::RBrace)?;
        }
        self.expect(Tok::RBrace)?;

        if is_interface && (!submodules.is_empty() || !connection_axioms.is_empty()) {
            return Err(ParseError::InterfaceStructure { module: name });
        }
        Ok(ModuleDef {
            name,
            param_names,
            operation_type,
            properties,
            submodules,
            connection_axioms,
            implementation_axioms: Vec::new(),
            event_decls: Vec::new(),
            is_interface,
        })
    }
    fn pair_files(&mut self) -> ParseResult<Vec<PairDecl>> {
        let mut out = Vec::new();
        while *self.peek() != Tok::Eof {
            self.expect_keyword("Implementation")?;
            let implementation = self.string()?;
            self.expect(Tok::Dot)?;
            self.expect_keyword("Interface")?;
            let interface = self.string()?;
            self.expect(Tok::Dot)?;
            let mut mappings = Vec::new();
            while self.is_keyword("Map") {
                self.advance();
                let from = self.string()?;
                self.expect(Tok::Arrow)?;
                let to = self.string()?;
                self.expect(Tok::Dot)?;
                mappings.push(EventMapping {
                    implementation_event: from,
                    interface_event: to,
                });
            }
            out.push(PairDecl {
                implementation,
                interface,
                mappings,
            });
        }
        Ok(out)
    }
}

/// Parses a `.mdef` file.
pub fn parse_module_definition(text: &str) -> ParseResult<ModuleDef> {
    let mut p = Parser::new(text)?;
    let def = p.module_def()?;
    p.expect_eof()?;
    Ok(def)
}

/// Parses a `.uax` or `.iface` file.
pub fn parse_axiom_file(text: &str) -> ParseResult<AxiomFile> {
    let mut p = Parser::new(text)?;
    let file = p.axiom_file()?;
    p.expect_eof()?;
    Ok(file)
}

/// Parses an implementation/interface pair file:
///
/// ```text
/// Implementation "proc/mem". Interface "AtomicMemory".
/// Map "Req" -> "Req".
/// ```
pub fn parse_pair_file(text: &str) -> ParseResult<Vec<PairDecl>> {
    let mut p = Parser::new(text)?;
    p.pair_files()
}

/// Parses a single formula. A trailing `.` is accepted.
pub fn parse_formula(text: &str) -> ParseResult<Formula> {
    let mut p = Parser::new(text)?;
    let f = p.formula()?;
    p.eat(&Tok::Dot);
    p.expect_eof()?;
    Ok(f)
}
