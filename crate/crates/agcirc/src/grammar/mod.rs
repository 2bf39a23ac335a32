//! The attribute-grammar model: symbols carrying inherited and synthesized
//! attributes, productions with dependency edges over attribute occurrences,
//! and the immutable [`Grammar`] container.
//!
//! Grammars come from three places: the text format (see [`Grammar::parse`]),
//! the [`GrammarBuilder`], and the generators in [`crate::generate`]. A parsed
//! or built grammar is structurally sound (all names resolve) but may still
//! violate the semantic rules checked by [`Grammar::validate`]; the checkers
//! reject any grammar whose validation report contains errors.

use std::collections::HashMap;
use std::fmt;

mod parse;
mod text;
mod validate;

pub use parse::ParseError;
pub use validate::{Issue, IssueCode, ValidationReport};

/// Index of a symbol in declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymbolId(pub(crate) u32);

impl SymbolId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Index of a production in declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProdId(pub(crate) u32);

impl ProdId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SymbolKind {
    Nonterminal,
    Terminal,
}

/// Whether an attribute is inherited (flows down the tree) or synthesized
/// (flows up).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AttrClass {
    Inh,
    Syn,
}

/// An attribute of some symbol, identified by class and position in the
/// symbol's declaration-order attribute list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AttrRef {
    pub class: AttrClass,
    pub index: u32,
}

/// An attribute occurrence inside a production: position 0 is the left-hand
/// side, position `i >= 1` the i-th right-hand-side symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Occurrence {
    pub pos: u32,
    pub attr: AttrRef,
}

/// A dependency edge of a production: `dst` depends on `src`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DepEdge {
    pub src: Occurrence,
    pub dst: Occurrence,
}

/// A grammar symbol. Terminals carry no attributes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Symbol {
    name: String,
    kind: SymbolKind,
    inh: Vec<String>,
    syn: Vec<String>,
}

impl Symbol {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> SymbolKind {
        self.kind
    }

    pub fn is_nonterminal(&self) -> bool {
        self.kind == SymbolKind::Nonterminal
    }

    pub fn inh(&self) -> &[String] {
        &self.inh
    }

    pub fn syn(&self) -> &[String] {
        &self.syn
    }

    pub fn attr_count(&self) -> usize {
        self.inh.len() + self.syn.len()
    }

    /// Number of possible (inherited, synthesized) pairs; the bit width of an
    /// io-graph owned by this symbol.
    pub fn io_width(&self) -> usize {
        self.inh.len() * self.syn.len()
    }

    /// Looks an attribute up by name, inherited attributes first.
    pub fn find_attr(&self, name: &str) -> Option<AttrRef> {
        if let Some(i) = self.inh.iter().position(|a| a == name) {
            return Some(AttrRef { class: AttrClass::Inh, index: i as u32 });
        }
        self.syn
            .iter()
            .position(|a| a == name)
            .map(|i| AttrRef { class: AttrClass::Syn, index: i as u32 })
    }

    /// Resolves an [`AttrRef`] back to its name. Panics if out of range.
    pub fn attr_name(&self, attr: AttrRef) -> &str {
        match attr.class {
            AttrClass::Inh => &self.inh[attr.index as usize],
            AttrClass::Syn => &self.syn[attr.index as usize],
        }
    }

    pub fn attr_in_range(&self, attr: AttrRef) -> bool {
        let limit = match attr.class {
            AttrClass::Inh => self.inh.len(),
            AttrClass::Syn => self.syn.len(),
        };
        (attr.index as usize) < limit
    }
}

/// A production rule together with its dependency graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Production {
    name: String,
    lhs: SymbolId,
    rhs: Vec<SymbolId>,
    edges: Vec<DepEdge>,
    /// Right-hand-side positions (1-based) holding nonterminals. These are the
    /// positions that get a derivation-tree child and a summary graph during
    /// composition; terminal positions are skipped throughout.
    nt_slots: Vec<u32>,
}

impl Production {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn lhs(&self) -> SymbolId {
        self.lhs
    }

    pub fn rhs(&self) -> &[SymbolId] {
        &self.rhs
    }

    pub fn edges(&self) -> &[DepEdge] {
        &self.edges
    }

    pub fn nt_slots(&self) -> &[u32] {
        &self.nt_slots
    }

    pub fn arity(&self) -> u32 {
        self.rhs.len() as u32
    }

    pub fn is_epsilon(&self) -> bool {
        self.rhs.is_empty()
    }

    /// Index into `nt_slots` for a right-hand-side position, if it holds a
    /// nonterminal.
    pub fn slot_of_pos(&self, pos: u32) -> Option<usize> {
        self.nt_slots.binary_search(&pos).ok()
    }
}

/// An immutable attribute grammar. Values are safe to share across threads;
/// every analysis in this crate is a pure function of the grammar.
#[derive(Debug, Clone)]
pub struct Grammar {
    symbols: Vec<Symbol>,
    productions: Vec<Production>,
    start: SymbolId,
    by_name: HashMap<String, SymbolId>,
    by_prod_name: HashMap<String, ProdId>,
    prods_by_lhs: Vec<Vec<ProdId>>,
}

impl PartialEq for Grammar {
    fn eq(&self, other: &Self) -> bool {
        self.symbols == other.symbols
            && self.productions == other.productions
            && self.start == other.start
    }
}

impl Eq for Grammar {}

impl Grammar {
    pub(crate) fn from_parts(
        symbols: Vec<Symbol>,
        productions: Vec<Production>,
        start: SymbolId,
    ) -> Grammar {
        let by_name = symbols
            .iter()
            .enumerate()
            .map(|(i, s)| (s.name.clone(), SymbolId(i as u32)))
            .collect();
        let mut by_prod_name = HashMap::new();
        for (i, p) in productions.iter().enumerate() {
            // First declaration wins; duplicates are reported by validate().
            by_prod_name.entry(p.name.clone()).or_insert(ProdId(i as u32));
        }
        let mut prods_by_lhs = vec![Vec::new(); symbols.len()];
        for (i, p) in productions.iter().enumerate() {
            prods_by_lhs[p.lhs.index()].push(ProdId(i as u32));
        }
        Grammar { symbols, productions, start, by_name, by_prod_name, prods_by_lhs }
    }

    pub fn symbol(&self, id: SymbolId) -> &Symbol {
        &self.symbols[id.index()]
    }

    pub fn production(&self, id: ProdId) -> &Production {
        &self.productions[id.index()]
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn productions(&self) -> &[Production] {
        &self.productions
    }

    pub fn symbol_ids(&self) -> impl Iterator<Item = SymbolId> {
        (0..self.symbols.len() as u32).map(SymbolId)
    }

    pub fn production_ids(&self) -> impl Iterator<Item = ProdId> {
        (0..self.productions.len() as u32).map(ProdId)
    }

    pub fn nonterminal_ids(&self) -> impl Iterator<Item = SymbolId> + '_ {
        self.symbol_ids().filter(|id| self.symbol(*id).is_nonterminal())
    }

    pub fn start(&self) -> SymbolId {
        self.start
    }

    pub fn symbol_by_name(&self, name: &str) -> Option<SymbolId> {
        self.by_name.get(name).copied()
    }

    pub fn production_by_name(&self, name: &str) -> Option<ProdId> {
        self.by_prod_name.get(name).copied()
    }

    /// Productions whose left-hand side is `nt`, in declaration order.
    pub fn productions_of(&self, nt: SymbolId) -> &[ProdId] {
        &self.prods_by_lhs[nt.index()]
    }

    /// The symbol at a production position: 0 is the left-hand side.
    pub fn occurrence_symbol(&self, p: ProdId, pos: u32) -> SymbolId {
        let prod = self.production(p);
        if pos == 0 {
            prod.lhs
        } else {
            prod.rhs[pos as usize - 1]
        }
    }

    pub fn occurrence_attr_name(&self, p: ProdId, occ: Occurrence) -> &str {
        let sym = self.occurrence_symbol(p, occ.pos);
        self.symbol(sym).attr_name(occ.attr)
    }

    /// Parses the text format and rejects grammars whose validation report
    /// contains errors.
    pub fn parse(source: &str) -> Result<Grammar, ParseError> {
        let g = Grammar::parse_unvalidated(source)?;
        let report = g.validate();
        if report.has_errors() {
            return Err(ParseError::Invalid(report));
        }
        Ok(g)
    }

    /// Parses the text format without the validation gate. All names must
    /// still resolve; the result may violate the semantic rules that
    /// [`Grammar::validate`] reports.
    pub fn parse_unvalidated(source: &str) -> Result<Grammar, ParseError> {
        parse::parse_source(source)
    }

    pub fn validate(&self) -> ValidationReport {
        validate::validate(self)
    }

    pub fn to_source(&self) -> String {
        self.to_string()
    }

    /// The sub-grammar containing only productions whose left-hand side is
    /// reachable from the start symbol. Symbol declarations are kept, so ids
    /// remain stable; unreachable nonterminals simply lose their productions.
    pub fn restrict_to_reachable(&self) -> Grammar {
        let mut reachable = vec![false; self.symbols.len()];
        reachable[self.start.index()] = true;
        let mut stack = vec![self.start];
        while let Some(x) = stack.pop() {
            for &p in self.productions_of(x) {
                for &s in self.production(p).rhs() {
                    if self.symbol(s).is_nonterminal() && !reachable[s.index()] {
                        reachable[s.index()] = true;
                        stack.push(s);
                    }
                }
            }
        }
        let productions = self
            .productions
            .iter()
            .filter(|p| reachable[p.lhs.index()])
            .cloned()
            .collect();
        Grammar::from_parts(self.symbols.clone(), productions, self.start)
    }
}

impl fmt::Display for Grammar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        text::write_grammar(self, f)
    }
}

/// Builds grammars programmatically. Symbol and production names are resolved
/// eagerly; semantic rules (edge discipline, duplicate ids, ...) are left to
/// [`Grammar::validate`] so that invalid grammars can be constructed for
/// testing.
pub struct GrammarBuilder {
    symbols: Vec<Symbol>,
    by_name: HashMap<String, SymbolId>,
    productions: Vec<Production>,
    start: Option<SymbolId>,
}

impl GrammarBuilder {
    pub fn new() -> GrammarBuilder {
        GrammarBuilder {
            symbols: Vec::new(),
            by_name: HashMap::new(),
            productions: Vec::new(),
            start: None,
        }
    }

    fn add_symbol(&mut self, sym: Symbol) -> SymbolId {
        assert!(
            !self.by_name.contains_key(&sym.name),
            "symbol `{}` declared twice",
            sym.name
        );
        let id = SymbolId(self.symbols.len() as u32);
        self.by_name.insert(sym.name.clone(), id);
        self.symbols.push(sym);
        id
    }

    pub fn nonterminal(&mut self, name: &str, inh: &[&str], syn: &[&str]) -> SymbolId {
        self.add_symbol(Symbol {
            name: name.to_string(),
            kind: SymbolKind::Nonterminal,
            inh: inh.iter().map(|s| s.to_string()).collect(),
            syn: syn.iter().map(|s| s.to_string()).collect(),
        })
    }

    pub fn terminal(&mut self, name: &str) -> SymbolId {
        self.add_symbol(Symbol {
            name: name.to_string(),
            kind: SymbolKind::Terminal,
            inh: Vec::new(),
            syn: Vec::new(),
        })
    }

    /// Adds a production with edges given as `((pos, attr), (pos, attr))`
    /// pairs. Panics if an attribute does not resolve; use
    /// [`GrammarBuilder::production_raw`] to build intentionally broken edges.
    pub fn production(
        &mut self,
        name: &str,
        lhs: SymbolId,
        rhs: &[SymbolId],
        edges: &[((u32, &str), (u32, &str))],
    ) -> ProdId {
        let resolve = |b: &GrammarBuilder, pos: u32, attr: &str| -> Occurrence {
            assert!((pos as usize) <= rhs.len(), "position {pos} out of range");
            let sym = if pos == 0 { lhs } else { rhs[pos as usize - 1] };
            let sym = &b.symbols[sym.index()];
            let attr_ref = sym
                .find_attr(attr)
                .unwrap_or_else(|| panic!("symbol `{}` has no attribute `{attr}`", sym.name));
            Occurrence { pos, attr: attr_ref }
        };
        let edges = edges
            .iter()
            .map(|&((sp, sa), (dp, da))| DepEdge {
                src: resolve(self, sp, sa),
                dst: resolve(self, dp, da),
            })
            .collect();
        self.production_raw(name, lhs, rhs, edges)
    }

    /// Adds a production with pre-resolved edges, without any checking.
    pub fn production_raw(
        &mut self,
        name: &str,
        lhs: SymbolId,
        rhs: &[SymbolId],
        edges: Vec<DepEdge>,
    ) -> ProdId {
        let id = ProdId(self.productions.len() as u32);
        let nt_slots = rhs
            .iter()
            .enumerate()
            .filter(|(_, s)| self.symbols[s.index()].is_nonterminal())
            .map(|(i, _)| i as u32 + 1)
            .collect();
        self.productions.push(Production {
            name: name.to_string(),
            lhs,
            rhs: rhs.to_vec(),
            edges,
            nt_slots,
        });
        id
    }

    pub fn start(&mut self, sym: SymbolId) {
        self.start = Some(sym);
    }

    pub fn finish(self) -> Grammar {
        let start = self.start.expect("start symbol not set");
        Grammar::from_parts(self.symbols, self.productions, start)
    }
}

impl Default for GrammarBuilder {
    fn default() -> Self {
        GrammarBuilder::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g1() -> Grammar {
        Grammar::parse(crate::generate::Fixture::G1.source()).unwrap()
    }

    #[test]
    fn builder_matches_parsed_fixture() {
        let mut b = GrammarBuilder::new();
        let s = b.nonterminal("S", &[], &["v"]);
        let a = b.nonterminal("A", &["i"], &["s"]);
        b.production("p1", s, &[a], &[((1, "s"), (1, "i")), ((1, "s"), (0, "v"))]);
        b.production("p2", a, &[], &[((0, "i"), (0, "s"))]);
        b.start(s);
        assert_eq!(b.finish(), g1());
    }

    #[test]
    fn occurrence_lookup() {
        let g = g1();
        let p1 = g.production_by_name("p1").unwrap();
        let a = g.symbol_by_name("A").unwrap();
        assert_eq!(g.occurrence_symbol(p1, 1), a);
        assert_eq!(g.production(p1).nt_slots(), &[1]);
        assert!(g.production(p1).slot_of_pos(1).is_some());
        assert!(g.production(p1).slot_of_pos(0).is_none());
    }

    #[test]
    fn reachable_restriction_drops_orphan_productions() {
        let src = "\
nonterminal S syn(v)
nonterminal A inh(i) syn(s)
nonterminal B syn(w)
start S
production p1: S -> A { A.s -> A.i; A.s -> S.v; }
production p2: A -> ; { A.i -> A.s; }
production p3: B -> ; { B.w -> B.w; }
";
        let g = Grammar::parse(src).unwrap();
        let r = g.restrict_to_reachable();
        assert_eq!(r.productions().len(), 2);
        assert!(r.production_by_name("p3").is_none());
        // Symbol ids survive the restriction.
        assert_eq!(r.symbol_by_name("B"), g.symbol_by_name("B"));
    }
}
