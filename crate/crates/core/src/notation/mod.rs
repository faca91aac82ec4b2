//! Parser and printer for the human-readable manifold notation.
//!
//! ```text
//! expr    := summand ('#' summand)*
//! summand := 'L(' int ',' int ')' | 'S3' | 'S2xS1' | 'TB[' mat ']'
//!          | '(' expr ')' | chain | graph
//! chain   := term (glue term)*
//! glue    := '=[' mat ']=' ('[' mat ']=')*
//! term    := piece ('/[' mat ']')*
//! piece   := 'SFS(' base ';' [pair (',' pair)*] ')' | 'PxS1' | 'AxS1' | 'DxS1'
//!          | family ['(' slopes ')']
//! base    := S2 | D | A | P | RP2 | Mb | K | '(' int ',' ('or'|'nonor') ',' int ')'
//! mat     := int ',' int ';' int ',' int
//! graph   := '{' piece (';' piece)* '|' [edge (';' edge)*] '}'
//! edge    := int '.' int glue int '.' int
//! ```
//!
//! Each gluing takes the next unused port of each block it touches, in the
//! order the gluings are read. A glue with several matrices joins the two
//! neighbouring blocks along several tori.

mod parser;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::chains::Registry;
use crate::exactalg::Mat2;
use crate::manifolds::{
    validate, Block, ChainBuilder, CuspCounts, FilledBlock, FillingTuple, GraphManifold, Manifold,
    SeifertBlock, Violation,
};

use parser::Parser;

/// Syntax error at a byte offset of the input.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[error("at offset {pos}: {message}")]
pub struct ParseError {
    pub pos: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NotationError {
    #[error(transparent)]
    Syntax(#[from] ParseError),
    #[error("invalid expression: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
}

/// Parses and validates an expression against the built-in registry.
pub fn parse_expr(text: &str) -> Result<Manifold, NotationError> {
    parse_expr_in(Registry::builtin(), text)
}

/// Parses and validates an expression; named blocks resolve in `families`.
pub fn parse_expr_in(families: &dyn CuspCounts, text: &str) -> Result<Manifold, NotationError> {
    let expr = parse_unchecked(families, text)?;
    let violations = validate(families, &expr);
    if violations.is_empty() {
        Ok(expr)
    } else {
        Err(NotationError::Invalid(violations))
    }
}

/// Parses without running [`validate`].
pub fn parse_unchecked(families: &dyn CuspCounts, text: &str) -> Result<Manifold, ParseError> {
    let mut p = Parser::new(text, families);
    let expr = p.expr()?;
    p.finish()?;
    Ok(expr)
}

/// Parses `p/q`, `p`, `inf` and `.` entries separated by commas.
pub fn parse_slopes(text: &str) -> Result<FillingTuple, ParseError> {
    struct NoFamilies;
    impl CuspCounts for NoFamilies {
        fn cusp_count(&self, _: &str) -> Option<usize> {
            None
        }
    }
    let mut p = Parser::new(text, &NoFamilies);
    if p.at_end() {
        return Err(ParseError { pos: 0, message: "empty slope list".into() });
    }
    let t = p.slope_list('\0')?;
    p.finish()?;
    Ok(t)
}

/// Canonical text of an expression; parsing it back gives an equal value.
pub fn print_expr(expr: &Manifold) -> String {
    let mut out = String::new();
    write_expr(&mut out, expr, false);
    out
}

fn write_expr(out: &mut String, expr: &Manifold, in_sum: bool) {
    match expr {
        Manifold::Graph(g) => write_graph(out, g),
        Manifold::TorusBundle(m) => out.push_str(&format!("TB{m}")),
        Manifold::Lens { p: 1, q: 0 } => out.push_str("S3"),
        Manifold::Lens { p: 0, q: 1 } => out.push_str("S2xS1"),
        Manifold::Lens { p, q } => out.push_str(&format!("L({p},{q})")),
        Manifold::Sum(parts) => {
            if in_sum {
                out.push('(');
            }
            for (i, part) in parts.iter().enumerate() {
                if i > 0 {
                    out.push_str(" # ");
                }
                write_expr(out, part, true);
            }
            if in_sum {
                out.push(')');
            }
        }
        Manifold::SolidTorus => out.push_str("DxS1"),
        Manifold::Filled(fb) => write_filled(out, fb),
    }
}

fn write_filled(out: &mut String, fb: &FilledBlock) {
    out.push_str(&fb.family);
    let t = fb.slopes.trimmed();
    if !t.is_empty() {
        out.push_str(&format!("({t})"));
    }
}

fn write_piece(out: &mut String, block: &Block) {
    match block {
        Block::Seifert(s) => write_seifert(out, s),
        Block::Cusped(fb) => write_filled(out, fb),
    }
}

fn write_seifert(out: &mut String, s: &SeifertBlock) {
    if s.fibers.is_empty() {
        match s.base.alias() {
            Some("P") => return out.push_str("PxS1"),
            Some("A") => return out.push_str("AxS1"),
            _ => {}
        }
    }
    out.push_str(&format!("SFS({};", s.base));
    for (i, f) in s.fibers.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&f.to_string());
    }
    out.push(')');
}

fn write_matrices(out: &mut String, mats: &[Mat2]) {
    out.push_str(" =");
    for m in mats {
        out.push_str(&format!("{m}="));
    }
    out.push(' ');
}

fn write_graph(out: &mut String, g: &GraphManifold) {
    if let Some(shape) = chain_shape(g) {
        for (b, block) in g.blocks.iter().enumerate() {
            if b > 0 {
                write_matrices(out, &shape.links[b - 1]);
            }
            write_piece(out, block);
            for m in &shape.selfs[b] {
                out.push_str(&format!(" /{m}"));
            }
        }
        return;
    }
    out.push('{');
    for (b, block) in g.blocks.iter().enumerate() {
        if b > 0 {
            out.push_str("; ");
        }
        write_piece(out, block);
    }
    out.push_str(" |");
    for (i, gl) in g.gluings.iter().enumerate() {
        if i > 0 {
            out.push(';');
        }
        out.push_str(&format!(" {} ={}= {}", gl.from, gl.matrix, gl.to));
    }
    out.push_str(" }");
}

struct ChainShape {
    selfs: Vec<Vec<Mat2>>,
    links: Vec<Vec<Mat2>>,
}

/// Reads `g` as a linear chain, if replaying the chain through
/// [`ChainBuilder`] reproduces it exactly.
fn chain_shape(g: &GraphManifold) -> Option<ChainShape> {
    let n = g.blocks.len();
    if n == 1 && g.gluings.is_empty() && matches!(g.blocks[0], Block::Cusped(_)) {
        // Would read back as a bare filled block.
        return None;
    }
    let mut selfs = vec![Vec::new(); n];
    let mut links = vec![Vec::new(); n.saturating_sub(1)];
    let mut cur = 0;
    for gl in &g.gluings {
        let b = gl.from.block;
        let advance = b == cur + 1 && b < n && !links[cur].is_empty();
        if b != cur && !advance {
            return None;
        }
        if advance {
            cur = b;
        }
        if gl.to.block == b {
            selfs[b].push(gl.matrix);
        } else if gl.to.block == b + 1 && b + 1 < n {
            links[b].push(gl.matrix);
        } else {
            return None;
        }
    }
    if links.iter().any(Vec::is_empty) {
        return None;
    }
    let mut builder = ChainBuilder::new();
    for (b, block) in g.blocks.iter().enumerate() {
        let idx = builder.push(block.clone());
        if b > 0 {
            for m in &links[b - 1] {
                builder.glue(b - 1, idx, *m).ok()?;
            }
        }
        for m in &selfs[b] {
            builder.self_glue(idx, *m).ok()?;
        }
    }
    (builder.finish() == *g).then_some(ChainShape { selfs, links })
}

/// Display adapter printing an expression in notation form.
pub struct Notation<'a>(pub &'a Manifold);

impl fmt::Display for Notation<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_expr(self.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifolds::{BaseSurface, FiberPair, Port, Slope};

    fn round_trip(text: &str) -> Manifold {
        let e = parse_expr(text).unwrap_or_else(|err| panic!("{text}: {err}"));
        let printed = print_expr(&e);
        assert_eq!(parse_expr(&printed).unwrap(), e, "{text} printed as {printed}");
        e
    }

    #[test]
    fn seifert_over_sphere() {
        let e = round_trip("SFS(S2;(2,1),(3,1),(7,-6))");
        let expected = SeifertBlock::pairs(BaseSurface::SPHERE, &[(2, 1), (3, 1), (7, -6)]);
        assert_eq!(e, Manifold::seifert(expected));
        assert_eq!(print_expr(&e), "SFS(S2;(2,1),(3,1),(7,-6))");
    }

    #[test]
    fn self_gluing_suffix() {
        let e = round_trip("SFS(A;(2,1)) /[0,1;1,0]");
        let g = e.as_graph().unwrap();
        assert_eq!(g.gluings.len(), 1);
        assert_eq!(g.gluings[0].from, Port::new(0, 0));
        assert_eq!(g.gluings[0].to, Port::new(0, 1));
    }

    #[test]
    fn aliases() {
        assert_eq!(round_trip("L(0,1)"), Manifold::S2XS1);
        assert_eq!(print_expr(&Manifold::S2XS1), "S2xS1");
        assert_eq!(round_trip("DxS1"), Manifold::SolidTorus);
        assert_eq!(print_expr(&Manifold::SolidTorus), "DxS1");
        let tb = round_trip("TB[3,1;-1,0]");
        assert_eq!(print_expr(&tb), "TB[3,1;-1,0]");
        assert_eq!(print_expr(&round_trip("SFS(P;)")), "PxS1");
    }

    #[test]
    fn chains_and_double_gluings() {
        let e = round_trip("PxS1 =[0,1;1,0]= PxS1 =[0,1;1,0]= PxS1");
        assert_eq!(crate::manifolds::free_boundary_count(&e), 5);
        let d = round_trip("PxS1 =[0,1;1,0]=[0,1;1,0]= PxS1");
        assert_eq!(crate::manifolds::free_boundary_count(&d), 2);
        assert_eq!(print_expr(&d), "PxS1 =[0,1;1,0]=[0,1;1,0]= PxS1");
    }

    #[test]
    fn named_pieces() {
        let e = round_trip("M2(-2) =[-1,0;1,1]= SFS(D;(2,1),(2,1))");
        let g = e.as_graph().unwrap();
        assert!(matches!(&g.blocks[0], Block::Cusped(fb) if fb.cusps == 2));
        let filled = round_trip("M6(-2,-1/2,.,1/2,2)");
        let Manifold::Filled(fb) = filled else { panic!() };
        assert_eq!(fb.open_cusps(), vec![2, 5]);
    }

    #[test]
    fn connected_sums_nest() {
        round_trip("L(2,1) # L(3,1)");
        let nested = round_trip("L(2,1) # (L(3,1) # S2xS1)");
        assert_eq!(print_expr(&nested), "L(2,1) # (L(3,1) # S2xS1)");
    }

    #[test]
    fn general_graph_form() {
        let block = Block::Seifert(SeifertBlock::new(BaseSurface::PANTS, vec![FiberPair::new(2, 1)]));
        let g = GraphManifold {
            blocks: vec![block.clone(), block],
            gluings: vec![crate::manifolds::Gluing::new(Port::new(0, 2), Port::new(1, 1), Mat2::SWAP)],
        };
        let e = Manifold::Graph(g);
        let text = print_expr(&e);
        assert!(text.starts_with('{'), "{text}");
        assert_eq!(parse_expr(&text).unwrap(), e);
    }

    #[test]
    fn slopes() {
        let t = parse_slopes("-2,-1/2,.,1/2,2").unwrap();
        assert_eq!(t.len(), 5);
        assert_eq!(t.get(2), None);
        assert_eq!(parse_slopes("inf").unwrap().get(0), Some(Slope::INFINITY));
        assert_eq!(parse_slopes("4/6").unwrap().get(0), Some(Slope::new(2, 3).unwrap()));
        assert!(parse_slopes("0/0").is_err());
        assert!(parse_slopes("").is_err());
    }

    #[test]
    fn positioned_errors() {
        let err = parse_unchecked(Registry::builtin(), "SFS(D;(2,1) =").unwrap_err();
        assert_eq!(err.pos, 12);
        let err = parse_unchecked(Registry::builtin(), "Q7(1)").unwrap_err();
        assert_eq!(err.pos, 0);
        assert!(err.message.contains("unknown block"));
        let err = parse_unchecked(Registry::builtin(), "SFS(D;) /[0,1;1,0]").unwrap_err();
        assert!(err.message.contains("no free port"));
    }

    #[test]
    fn validation_is_forwarded() {
        let err = parse_expr("SFS(A;(2,4)) /[1,1;0,1]").unwrap_err();
        let NotationError::Invalid(v) = err else { panic!() };
        assert_eq!(v.len(), 2);
    }
}
