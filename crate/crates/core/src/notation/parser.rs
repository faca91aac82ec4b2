use crate::exactalg::Mat2;
use crate::manifolds::{
    BaseSurface, Block, ChainBuilder, CuspCounts, FiberPair, FilledBlock, FillingTuple, Gluing, GraphManifold,
    Manifold, Port, SeifertBlock, Slope,
};

use super::ParseError;

const RESERVED: [&str; 8] = ["SFS", "L", "TB", "S3", "S2xS1", "PxS1", "AxS1", "DxS1"];

pub(super) struct Parser<'a> {
    text: &'a str,
    pos: usize,
    families: &'a dyn CuspCounts,
}

type PResult<T> = Result<T, ParseError>;

impl<'a> Parser<'a> {
    pub(super) fn new(text: &'a str, families: &'a dyn CuspCounts) -> Self {
        Parser { text, pos: 0, families }
    }

    fn error<T>(&self, pos: usize, message: impl Into<String>) -> PResult<T> {
        Err(ParseError { pos, message: message.into() })
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.text[self.pos..].chars().next() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.text[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> PResult<()> {
        if self.eat(c) {
            Ok(())
        } else {
            let found = self.describe_next();
            self.error(self.pos, format!("expected '{c}', found {found}"))
        }
    }

    fn describe_next(&mut self) -> String {
        match self.peek() {
            Some(c) => format!("'{c}'"),
            None => "end of input".to_string(),
        }
    }

    pub(super) fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    pub(super) fn finish(&mut self) -> PResult<()> {
        if self.at_end() {
            Ok(())
        } else {
            let found = self.describe_next();
            self.error(self.pos, format!("unexpected {found} after expression"))
        }
    }

    fn ident(&mut self) -> Option<(usize, &'a str)> {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.text[start..];
        let len = rest
            .char_indices()
            .find(|(i, c)| !(c.is_ascii_alphanumeric() || (*i > 0 && *c == '_')))
            .map_or(rest.len(), |(i, _)| i);
        if len == 0 || !rest.as_bytes()[0].is_ascii_alphabetic() {
            return None;
        }
        self.pos += len;
        Some((start, &rest[..len]))
    }

    fn int(&mut self) -> PResult<i64> {
        self.skip_ws();
        let start = self.pos;
        let bytes = self.text.as_bytes();
        let mut end = start;
        if end < bytes.len() && (bytes[end] == b'-' || bytes[end] == b'+') {
            end += 1;
        }
        let digits = end;
        while end < bytes.len() && bytes[end].is_ascii_digit() {
            end += 1;
        }
        if end == digits {
            let found = self.describe_next();
            return self.error(start, format!("expected an integer, found {found}"));
        }
        match self.text[start..end].parse::<i64>() {
            Ok(v) => {
                self.pos = end;
                Ok(v)
            }
            Err(_) => self.error(start, "integer out of range"),
        }
    }

    fn matrix_body(&mut self) -> PResult<Mat2> {
        let a = self.int()?;
        self.expect(',')?;
        let b = self.int()?;
        self.expect(';')?;
        let c = self.int()?;
        self.expect(',')?;
        let d = self.int()?;
        Ok(Mat2::new(a, b, c, d))
    }

    fn bracket_matrix(&mut self) -> PResult<Mat2> {
        self.expect('[')?;
        let m = self.matrix_body()?;
        self.expect(']')?;
        Ok(m)
    }

    pub(super) fn expr(&mut self) -> PResult<Manifold> {
        let first = self.summand()?;
        if self.peek() != Some('#') {
            return Ok(first);
        }
        let mut parts = vec![first];
        while self.eat('#') {
            parts.push(self.summand()?);
        }
        Ok(Manifold::Sum(parts))
    }

    fn summand(&mut self) -> PResult<Manifold> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(')')?;
                return Ok(inner);
            }
            Some('{') => return self.graph_form(),
            None => return self.error(start, "expected a manifold, found end of input"),
            _ => {}
        }
        let save = self.pos;
        if let Some((_, word)) = self.ident() {
            match word {
                "L" => {
                    self.expect('(')?;
                    let p = self.int()?;
                    self.expect(',')?;
                    let q = self.int()?;
                    self.expect(')')?;
                    return Ok(Manifold::Lens { p, q });
                }
                "TB" => return Ok(Manifold::TorusBundle(self.bracket_matrix()?)),
                "S3" => return Ok(Manifold::S3),
                "S2xS1" => return Ok(Manifold::S2XS1),
                _ => {}
            }
        }
        self.pos = save;
        self.chain()
    }

    fn chain(&mut self) -> PResult<Manifold> {
        let (first, solid_alias) = self.piece()?;
        let mut builder = ChainBuilder::default();
        let mut prev = builder.push(first);
        let mut bare = true;
        bare &= !self.suffixes(&mut builder, prev)?;
        while self.peek() == Some('=') {
            bare = false;
            let mats = self.glue_matrices()?;
            let (piece, _) = self.piece()?;
            let next = builder.push(piece);
            for m in mats {
                if let Err(e) = builder.glue(prev, next, m) {
                    return self.error(self.pos, e);
                }
            }
            self.suffixes(&mut builder, next)?;
            prev = next;
        }
        let graph = builder.finish();
        if bare && graph.blocks.len() == 1 {
            if solid_alias {
                return Ok(Manifold::SolidTorus);
            }
            if let Block::Cusped(fb) = &graph.blocks[0] {
                return Ok(Manifold::Filled(fb.clone()));
            }
        }
        Ok(Manifold::Graph(graph))
    }

    /// Self-gluing suffixes `/[..]`; returns whether any were present.
    fn suffixes(&mut self, builder: &mut ChainBuilder, block: usize) -> PResult<bool> {
        let mut any = false;
        while self.peek() == Some('/') {
            self.pos += 1;
            let at = self.pos;
            let m = self.bracket_matrix()?;
            if let Err(e) = builder.self_glue(block, m) {
                return self.error(at, e);
            }
            any = true;
        }
        Ok(any)
    }

    /// `=[A]=` or `=[A]=[B]=…`.
    fn glue_matrices(&mut self) -> PResult<Vec<Mat2>> {
        self.expect('=')?;
        let mut mats = vec![self.bracket_matrix()?];
        self.expect('=')?;
        while self.peek() == Some('[') {
            mats.push(self.bracket_matrix()?);
            self.expect('=')?;
        }
        Ok(mats)
    }

    /// A block; the flag records the `DxS1` spelling.
    fn piece(&mut self) -> PResult<(Block, bool)> {
        self.skip_ws();
        let start = self.pos;
        let Some((_, word)) = self.ident() else {
            let found = self.describe_next();
            return self.error(start, format!("expected a block, found {found}"));
        };
        let circle_bundle = |base| Block::Seifert(SeifertBlock::new(base, Vec::new()));
        match word {
            "SFS" => Ok((Block::Seifert(self.sfs_body()?), false)),
            "PxS1" => Ok((circle_bundle(BaseSurface::PANTS), false)),
            "AxS1" => Ok((circle_bundle(BaseSurface::ANNULUS), false)),
            "DxS1" => Ok((circle_bundle(BaseSurface::DISK), true)),
            w if RESERVED.contains(&w) => {
                self.error(start, format!("{w} cannot be glued; only blocks can"))
            }
            family => {
                let Some(cusps) = self.families.cusp_count(family) else {
                    return self.error(start, format!("unknown block {family}"));
                };
                let slopes = if self.peek() == Some('(') {
                    self.pos += 1;
                    let at = self.pos;
                    let t = self.slope_list(')')?;
                    self.expect(')')?;
                    if t.len() > cusps {
                        return self.error(at, format!("{family} has {cusps} cusps, {} slopes given", t.len()));
                    }
                    t
                } else {
                    FillingTuple::default()
                };
                Ok((Block::Cusped(FilledBlock::new(family, cusps, slopes)), false))
            }
        }
    }

    fn sfs_body(&mut self) -> PResult<SeifertBlock> {
        self.expect('(')?;
        let base = self.base()?;
        self.expect(';')?;
        let mut fibers = Vec::new();
        if self.peek() == Some('(') {
            loop {
                self.expect('(')?;
                let p = self.int()?;
                self.expect(',')?;
                let q = self.int()?;
                self.expect(')')?;
                fibers.push(FiberPair::new(p, q));
                if !self.eat(',') {
                    break;
                }
            }
        }
        self.expect(')')?;
        Ok(SeifertBlock::new(base, fibers))
    }

    fn base(&mut self) -> PResult<BaseSurface> {
        self.skip_ws();
        let start = self.pos;
        if self.eat('(') {
            let genus = self.int()?;
            self.expect(',')?;
            let kind_at = self.pos;
            let orientable = match self.ident() {
                Some((_, "or")) => true,
                Some((_, "nonor")) => false,
                _ => return self.error(kind_at, "expected 'or' or 'nonor'"),
            };
            self.expect(',')?;
            let boundary = self.int()?;
            self.expect(')')?;
            let (Ok(genus), Ok(boundary)) = (u32::try_from(genus), u32::try_from(boundary)) else {
                return self.error(start, "genus and boundary count must be nonnegative");
            };
            if !orientable && genus == 0 {
                return self.error(start, "a non-orientable base needs at least one crosscap");
            }
            return Ok(BaseSurface { orientable, genus, boundary });
        }
        match self.ident() {
            Some((_, name)) => match BaseSurface::from_alias(name) {
                Some(b) => Ok(b),
                None => self.error(start, format!("unknown base surface {name}")),
            },
            None => self.error(start, "expected a base surface"),
        }
    }

    /// `{ piece; piece; … | i.p =[..]= j.q; … }`.
    fn graph_form(&mut self) -> PResult<Manifold> {
        self.expect('{')?;
        let mut blocks = Vec::new();
        loop {
            blocks.push(self.piece()?.0);
            if !self.eat(';') {
                break;
            }
        }
        self.expect('|')?;
        let mut gluings = Vec::new();
        if self.peek() != Some('}') {
            loop {
                let from = self.port()?;
                let mats = self.glue_matrices()?;
                if mats.len() != 1 {
                    return self.error(self.pos, "graph edges carry exactly one matrix");
                }
                let to = self.port()?;
                gluings.push(Gluing::new(from, to, mats[0]));
                if !self.eat(';') {
                    break;
                }
            }
        }
        self.expect('}')?;
        Ok(Manifold::Graph(GraphManifold { blocks, gluings }))
    }

    fn port(&mut self) -> PResult<Port> {
        let at = self.pos;
        let b = self.int()?;
        self.expect('.')?;
        let p = self.int()?;
        match (usize::try_from(b), usize::try_from(p)) {
            (Ok(block), Ok(port)) => Ok(Port { block, port }),
            _ => self.error(at, "port indices must be nonnegative"),
        }
    }

    /// Comma-separated slopes up to (not including) `close`.
    pub(super) fn slope_list(&mut self, close: char) -> PResult<FillingTuple> {
        let mut out = Vec::new();
        if self.peek() == Some(close) || self.peek().is_none() {
            return Ok(FillingTuple(out));
        }
        loop {
            out.push(self.slope()?);
            if !self.eat(',') {
                break;
            }
        }
        Ok(FillingTuple(out))
    }

    fn slope(&mut self) -> PResult<Option<Slope>> {
        self.skip_ws();
        let start = self.pos;
        if self.eat('.') {
            return Ok(None);
        }
        if self.text[self.pos..].starts_with("inf") {
            self.pos += 3;
            return Ok(Some(Slope::INFINITY));
        }
        let p = self.int()?;
        let q = if self.eat('/') { self.int()? } else { 1 };
        match Slope::new(p, q) {
            Ok(s) => Ok(Some(s)),
            Err(_) => self.error(start, "0/0 is not a slope"),
        }
    }
}
