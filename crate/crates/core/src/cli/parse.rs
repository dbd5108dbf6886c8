//! Text formats for manifold specs and webs.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::groups::{validate_manifold, Circle, GroupPresentation, GroupoidPath, Letter, MarkedManifoldSpec, Word};
use crate::skein::{Component, Edge, EdgeEnd, FramedKnot, StatedArc, Vertex, VertexKind, Web};

struct Cursor {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    col: usize,
}

#[derive(Clone, Copy, Debug)]
struct Loc {
    line: usize,
    col: usize,
}

impl Cursor {
    fn new(text: &str) -> Self {
        Cursor { chars: text.chars().collect(), pos: 0, line: 1, col: 1 }
    }

    fn loc(&self) -> Loc {
        Loc { line: self.line, col: self.col }
    }

    fn err_at(loc: Loc, msg: impl Into<String>) -> Error {
        Error::Parse { line: loc.line, column: loc.col, message: msg.into() }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Cursor::err_at(self.loc(), msg)
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    /// Skip whitespace and `//` comments.
    fn ws(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('/') if self.chars.get(self.pos + 1) == Some(&'/') => {
                    while !matches!(self.peek(), None | Some('\n')) {
                        self.bump();
                    }
                }
                _ => return,
            }
        }
    }

    fn at_end(&mut self) -> bool {
        self.ws();
        self.peek().is_none()
    }

    fn eat(&mut self, s: &str) -> bool {
        self.ws();
        let n = s.chars().count();
        if self.chars.len() >= self.pos + n && self.chars[self.pos..self.pos + n].iter().copied().eq(s.chars()) {
            for _ in 0..n {
                self.bump();
            }
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<()> {
        if self.eat(s) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{s}`, found {}", self.describe())))
        }
    }

    fn describe(&self) -> String {
        match self.peek() {
            Some(c) => format!("`{c}`"),
            None => "end of input".into(),
        }
    }

    fn ident(&mut self) -> Option<String> {
        self.ws();
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '_' {
                s.push(c);
                self.bump();
            } else {
                break;
            }
        }
        (!s.is_empty()).then_some(s)
    }

    fn uint(&mut self) -> Result<usize> {
        self.ws();
        let start = self.loc();
        let mut s = String::new();
        while let Some(c) = self.peek().filter(|c| c.is_ascii_digit()) {
            s.push(c);
            self.bump();
        }
        if s.is_empty() {
            return Err(Cursor::err_at(start, format!("expected a number, found {}", self.describe())));
        }
        s.parse().map_err(|_| Cursor::err_at(start, "number too large"))
    }

    fn string(&mut self) -> Result<String> {
        self.ws();
        if self.peek() != Some('"') {
            return Err(self.err(format!("expected a string, found {}", self.describe())));
        }
        self.bump();
        let mut s = String::new();
        loop {
            match self.bump() {
                None => return Err(self.err("unterminated string")),
                Some('"') => return Ok(s),
                Some('\\') => match self.bump() {
                    Some(c @ ('"' | '\\')) => s.push(c),
                    _ => return Err(self.err("bad escape")),
                },
                Some(c) => s.push(c),
            }
        }
    }

    /// `gen ("*" gen)*` with `gen := "g" int ["^" ["-"] int]`; may be empty.
    fn word(&mut self) -> Result<Word> {
        self.ws();
        let mut letters = Vec::new();
        if self.peek() != Some('g') {
            return Ok(Word::empty());
        }
        loop {
            self.ws();
            let at = self.loc();
            if !self.eat("g") {
                return Err(self.err(format!("expected a generator like g1, found {}", self.describe())));
            }
            let gen = self.uint()?;
            if gen == 0 {
                return Err(Cursor::err_at(at, "generators are numbered from g1"));
            }
            let mut exp: i64 = 1;
            if self.eat("^") {
                let neg = self.eat("-");
                let e = self.uint()? as i64;
                if e == 0 {
                    return Err(Cursor::err_at(at, "zero exponent"));
                }
                exp = if neg { -e } else { e };
            }
            for _ in 0..exp.unsigned_abs() {
                letters.push(Letter { gen, inverse: exp < 0 });
            }
            if !self.eat("*") {
                break;
            }
        }
        Ok(Word::from_letters(letters))
    }

    /// A quoted word; errors point into the string.
    fn word_from_string(&mut self) -> Result<Word> {
        self.ws();
        let at = self.loc();
        let text = self.string()?;
        let mut inner = Cursor::new(&text);
        let shift = |e: Error| match e {
            Error::Parse { column, message, .. } => {
                Cursor::err_at(Loc { line: at.line, col: at.col + column }, format!("{message} in word \"{text}\""))
            }
            e => e,
        };
        let w = inner.word().map_err(shift)?;
        if !inner.at_end() {
            return Err(shift(inner.err(format!("unexpected {}", inner.describe()))));
        }
        Ok(w)
    }
}

/// Parse a spec document such as
/// `{n: 2, generators: 1, markings: 1, relators: ["g1*g1"], circles: [{w: "g1", h: 0}]}`.
pub fn parse_manifold(text: &str) -> Result<MarkedManifoldSpec> {
    let mut c = Cursor::new(text);
    let (mut n, mut gens, mut markings) = (None, None, None);
    let mut relators = Vec::new();
    let mut circles = Vec::new();
    let start = c.loc();
    c.expect("{")?;
    while !c.eat("}") {
        c.ws();
        let at = c.loc();
        let key = match c.peek() {
            Some('"') => c.string()?,
            _ => c.ident().ok_or_else(|| c.err(format!("expected a key, found {}", c.describe())))?,
        };
        c.expect(":")?;
        match key.as_str() {
            "n" => n = Some(c.uint()?),
            "generators" => gens = Some(c.uint()?),
            "markings" => markings = Some(c.uint()?),
            "relators" => {
                c.expect("[")?;
                while !c.eat("]") {
                    relators.push(c.word_from_string()?);
                    if !c.eat(",") {
                        c.expect("]")?;
                        break;
                    }
                }
            }
            "circles" => {
                c.expect("[")?;
                while !c.eat("]") {
                    circles.push(circle(&mut c)?);
                    if !c.eat(",") {
                        c.expect("]")?;
                        break;
                    }
                }
            }
            other => return Err(Cursor::err_at(at, format!("unknown key `{other}`"))),
        }
        if !c.eat(",") {
            c.expect("}")?;
            break;
        }
    }
    if !c.at_end() {
        return Err(c.err("trailing input after the spec"));
    }
    let missing = |k: &str| Cursor::err_at(start, format!("missing key `{k}`"));
    let spec = MarkedManifoldSpec {
        n: n.ok_or_else(|| missing("n"))?,
        group: GroupPresentation { generators: gens.ok_or_else(|| missing("generators"))?, relators },
        markings: markings.ok_or_else(|| missing("markings"))?,
        circles,
    };
    let report = validate_manifold(&spec);
    if !report.ok {
        return Err(Error::InvalidSpec(report.errors.join("; ")));
    }
    Ok(spec)
}

fn circle(c: &mut Cursor) -> Result<Circle> {
    let start = c.loc();
    c.expect("{")?;
    let mut word = None;
    let mut spin = 0u8;
    while !c.eat("}") {
        c.ws();
        let at = c.loc();
        let key = match c.peek() {
            Some('"') => c.string()?,
            _ => c.ident().ok_or_else(|| c.err("expected `w` or `h`"))?,
        };
        c.expect(":")?;
        match key.as_str() {
            "w" => word = Some(c.word_from_string()?),
            "h" => spin = bit(c)?,
            other => return Err(Cursor::err_at(at, format!("unknown circle key `{other}`"))),
        }
        if !c.eat(",") {
            c.expect("}")?;
            break;
        }
    }
    Ok(Circle { word: word.ok_or_else(|| Cursor::err_at(start, "circle needs a word `w`"))?, spin })
}

fn bit(c: &mut Cursor) -> Result<u8> {
    c.ws();
    let at = c.loc();
    match c.uint()? {
        b @ (0 | 1) => Ok(b as u8),
        _ => Err(Cursor::err_at(at, "spin bit must be 0 or 1")),
    }
}

fn quoted(w: &Word) -> String {
    format!("\"{w}\"")
}

pub fn print_manifold(spec: &MarkedManifoldSpec) -> String {
    let mut s = format!("{{n: {}, generators: {}, markings: {}", spec.n, spec.generators(), spec.markings);
    if !spec.group.relators.is_empty() {
        let rs: Vec<String> = spec.group.relators.iter().map(quoted).collect();
        let _ = write!(s, ", relators: [{}]", rs.join(", "));
    }
    if !spec.circles.is_empty() {
        let cs: Vec<String> = spec.circles.iter().map(|c| format!("{{w: {}, h: {}}}", quoted(&c.word), c.spin)).collect();
        let _ = write!(s, ", circles: [{}]", cs.join(", "));
    }
    s.push('}');
    s
}

/// Parse a web expression and check it against `spec`.
pub fn parse_web(text: &str, spec: &MarkedManifoldSpec) -> Result<Web> {
    let mut c = Cursor::new(text);
    let mut comps = Vec::new();
    let mut next_vertex = 0;
    loop {
        comps.push(component(&mut c, spec.n, &mut next_vertex)?);
        if !c.eat(",") {
            break;
        }
    }
    if !c.at_end() {
        return Err(c.err(format!("expected `,` or end of web, found {}", c.describe())));
    }
    let web = Web::new(comps);
    web.validate(spec)?;
    Ok(web)
}

fn state(c: &mut Cursor, n: usize) -> Result<usize> {
    c.ws();
    let at = c.loc();
    let s = c.uint()?;
    if (1..=n).contains(&s) {
        Ok(s)
    } else {
        Err(Cursor::err_at(at, format!("state {s} out of range 1..={n}")))
    }
}

fn marking(c: &mut Cursor) -> Result<usize> {
    c.expect("e")?;
    c.uint()
}

fn component(c: &mut Cursor, n: usize, next_vertex: &mut usize) -> Result<Component> {
    c.ws();
    let at = c.loc();
    let head = c.ident().ok_or_else(|| c.err(format!("expected a component, found {}", c.describe())))?;
    match head.as_str() {
        "arc" => {
            c.expect("(")?;
            let src = marking(c)?;
            c.expect("->")?;
            let dst = marking(c)?;
            c.expect(";")?;
            c.expect("w=")?;
            let word = c.word()?;
            c.expect(";")?;
            c.expect("s=(")?;
            let end = state(c, n)?;
            c.expect(",")?;
            let start = state(c, n)?;
            c.expect(")")?;
            let spin = if c.eat(";") {
                c.expect("h=")?;
                bit(c)?
            } else {
                0
            };
            c.expect(")")?;
            Ok(Component::Arc(StatedArc::new(GroupoidPath::new(src, dst, word), end, start, spin)))
        }
        "knot" => {
            c.expect("(")?;
            c.expect("w=")?;
            let word = c.word()?;
            let spin = if c.eat(";") {
                c.expect("h=")?;
                bit(c)?
            } else {
                0
            };
            c.expect(")")?;
            Ok(Component::Knot(FramedKnot::new(word, spin)))
        }
        "sink" | "source" => {
            let kind = if head == "sink" { VertexKind::Sink } else { VertexKind::Source };
            let id = if c.eat("#") { c.uint()? } else { *next_vertex };
            *next_vertex = id + 1;
            c.expect("(")?;
            let mut edges = Vec::new();
            loop {
                edges.push(edge(c, n)?);
                if !c.eat(",") {
                    break;
                }
            }
            let mut drag = Word::empty();
            if c.eat(";") {
                c.expect("drag=")?;
                drag = c.word()?;
            }
            c.expect(")")?;
            if edges.len() != n {
                return Err(Cursor::err_at(at, format!("{head} has {} edges, expected n = {n}", edges.len())));
            }
            Ok(Component::Vertex(Vertex { id, kind, edges, drag }))
        }
        other => Err(Cursor::err_at(at, format!("unknown component `{other}`"))),
    }
}

fn edge(c: &mut Cursor, n: usize) -> Result<Edge> {
    c.expect("(")?;
    c.expect("w=")?;
    let word = c.word()?;
    c.expect("->")?;
    c.ws();
    let far = if c.eat("v") {
        EdgeEnd::Vertex(c.uint()?)
    } else {
        let m = marking(c)?;
        c.expect(":")?;
        EdgeEnd::Marking { marking: m, state: state(c, n)? }
    };
    c.expect(")")?;
    Ok(Edge { word, far })
}

fn print_component(c: &Component) -> String {
    let spin = |h: u8| if h == 1 { "; h=1".to_string() } else { String::new() };
    match c {
        Component::Arc(a) => format!(
            "arc(e{}->e{}; w={}; s=({},{}){})",
            a.path.src,
            a.path.dst,
            a.path.core,
            a.end_state,
            a.start_state,
            spin(a.spin)
        ),
        Component::Knot(k) => format!("knot(w={}{})", k.word, spin(k.spin)),
        Component::Vertex(v) => {
            let head = match v.kind {
                VertexKind::Sink => "sink",
                VertexKind::Source => "source",
            };
            let edges: Vec<String> = v
                .edges
                .iter()
                .map(|e| match e.far {
                    EdgeEnd::Marking { marking, state } => format!("(w={} -> e{marking}:{state})", e.word),
                    EdgeEnd::Vertex(id) => format!("(w={} -> v{id})", e.word),
                })
                .collect();
            let drag = if v.drag.is_empty() { String::new() } else { format!("; drag={}", v.drag) };
            format!("{head}#{}({}{drag})", v.id, edges.join(", "))
        }
    }
}

pub fn print_web(web: &Web) -> String {
    web.components.iter().map(print_component).collect::<Vec<_>>().join(", ")
}
