"""Datalog-style full conjunctive queries.

Syntax::

    T(x,y,z) <- E(x,y), E(x,z), E(y,z).
    order x,y,z.

``:-`` is accepted for ``<-``.  A body may also carry a chain such as
``x < y < z``; it is recorded as a declared constraint (a hint for box
skipping) and is *not* evaluated as a filter.  ``Eq`` is the builtin
equality relation.  ``#`` and ``%`` start comments.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

EQ = "Eq"


class QueryError(ValueError):
    """Semantically invalid query (unknown relation, arity mismatch, ...)."""


class QuerySyntaxError(QueryError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Atom:
    relation: str
    vars: tuple[str, ...]
    # Column order of the backing index: attribute j of this atom is column
    # permutation[j] of the stored relation. None means not yet planned.
    permutation: tuple[int, ...] | None = None

    @property
    def builtin(self) -> bool:
        return self.relation == EQ

    def __str__(self) -> str:
        return f"{self.relation}({','.join(self.vars)})"


@dataclass(frozen=True)
class Query:
    head_name: str
    head: tuple[str, ...]
    atoms: tuple[Atom, ...]
    order: tuple[str, ...]
    less_than: tuple[tuple[str, str], ...] = ()

    @property
    def variables(self) -> tuple[str, ...]:
        return self.order

    @property
    def n(self) -> int:
        return len(self.order)

    def dim(self, var: str) -> int:
        return self.order.index(var)

    def preds(self) -> list[list[int]]:
        """Atom indexes grouped by the key-order position of their first variable."""
        out: list[list[int]] = [[] for _ in self.order]
        pos = {v: i for i, v in enumerate(self.order)}
        for a_i, atom in enumerate(self.atoms):
            out[min(pos[v] for v in atom.vars)].append(a_i)
        return out

    @property
    def rank(self) -> int:
        return compute_rank(self, self.order)

    def __str__(self) -> str:
        body = ", ".join(str(a) for a in self.atoms)
        return f"{self.head_name}({','.join(self.head)}) <- {body}.\norder {','.join(self.order)}."


# -- parsing -----------------------------------------------------------------

_TOKEN = re.compile(
    r"(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<comment>[#%][^\n]*)"
    r"|(?P<arrow><-|:-)|(?P<ident>[A-Za-z_][A-Za-z0-9_']*)"
    r"|(?P<punct>[(),.<])|(?P<bad>.)"
)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    line, line_start = 1, 0
    for m in _TOKEN.finditer(text):
        kind = m.lastgroup
        col = m.start() - line_start + 1
        if kind == "nl":
            line += 1
            line_start = m.end()
            continue
        if kind in ("ws", "comment"):
            continue
        if kind == "bad":
            raise QuerySyntaxError(f"unexpected character {m.group()!r}", line, col)
        toks.append(_Tok(kind if kind != "punct" else m.group(), m.group(), line, col))
    toks.append(_Tok("eof", "", line, len(text) - line_start + 1))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self, k: int = 0) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def take(self, kind: str) -> _Tok:
        t = self.peek()
        if t.kind != kind:
            want = "identifier" if kind == "ident" else repr(kind)
            got = "end of input" if t.kind == "eof" else repr(t.text)
            raise QuerySyntaxError(f"expected {want}, got {got}", t.line, t.col)
        self.i += 1
        return t

    def var_list(self) -> list[str]:
        self.take("(")
        out = [self.take("ident").text]
        while self.peek().kind == ",":
            self.take(",")
            out.append(self.take("ident").text)
        self.take(")")
        return out

    def statement(self):
        t = self.peek()
        if t.kind == "ident" and t.text == "order" and self.peek(1).kind == "ident":
            self.take("ident")
            names = [self.take("ident").text]
            while self.peek().kind == ",":
                self.take(",")
                names.append(self.take("ident").text)
            self.take(".")
            return ("order", names, t)
        name = self.take("ident")
        head = self.var_list()
        self.take("arrow")
        atoms, chains = [], []
        while True:
            first = self.take("ident")
            if self.peek().kind == "(":
                atoms.append((first.text, self.var_list(), first))
            elif self.peek().kind == "<":
                chain = [first.text]
                while self.peek().kind == "<":
                    self.take("<")
                    chain.append(self.take("ident").text)
                chains.append(chain)
            else:
                nt = self.peek()
                raise QuerySyntaxError(f"expected '(' or '<' after {first.text!r}", nt.line, nt.col)
            if self.peek().kind == ",":
                self.take(",")
                continue
            self.take(".")
            break
        return ("rule", (name, head, atoms, chains), name)


def parse(text: str, arities: Mapping[str, int] | None = None,
          order: Sequence[str] | None = None) -> Query:
    """Parse one rule (plus optional ``order`` directive) into a Query.

    ``arities`` enables unknown-relation and arity checks; ``order``
    overrides any directive in the text.
    """
    p = _Parser(text)
    rule = None
    directive = None
    while p.peek().kind != "eof":
        kind, payload, tok = p.statement()
        if kind == "order":
            if directive is not None:
                raise QuerySyntaxError("duplicate order directive", tok.line, tok.col)
            directive = (payload, tok)
        else:
            if rule is not None:
                raise QuerySyntaxError("only one rule per query", tok.line, tok.col)
            rule = payload
            rule_tok = tok
    if rule is None:
        raise QuerySyntaxError("no rule found", 1, 1)
    name, head, raw_atoms, chains = rule

    atoms = []
    for rel, vs, tok in raw_atoms:
        if rel == EQ:
            if len(vs) != 2:
                raise QueryError(f"{tok.line}:{tok.col}: Eq takes two arguments")
        elif arities is not None:
            if rel not in arities:
                raise QueryError(f"{tok.line}:{tok.col}: unknown relation {rel!r}")
            if arities[rel] != len(vs):
                raise QueryError(
                    f"{tok.line}:{tok.col}: arity mismatch for {rel}: "
                    f"expected {arities[rel]}, got {len(vs)}"
                )
        atoms.append(Atom(rel, tuple(vs)))

    body_vars: list[str] = []
    for a in atoms:
        for v in a.vars:
            if v not in body_vars:
                body_vars.append(v)
    if len(set(head)) != len(head):
        raise QueryError(f"{rule_tok.line}:{rule_tok.col}: repeated head variable")
    missing = [v for v in head if v not in body_vars]
    if missing:
        raise QueryError(f"{rule_tok.line}:{rule_tok.col}: head variable {missing[0]!r} not in body")
    projected = [v for v in body_vars if v not in head]
    if projected:
        raise QueryError(
            f"{rule_tok.line}:{rule_tok.col}: projection unsupported "
            f"(body variable {projected[0]!r} missing from head)"
        )

    less_than = []
    for chain in chains:
        for v in chain:
            if v not in body_vars:
                raise QueryError(f"constraint variable {v!r} not in body")
        less_than.extend(zip(chain, chain[1:]))

    if order is None and directive is not None:
        order = directive[0]
    if order is None:
        order = body_vars
    order = tuple(order)
    if sorted(order) != sorted(body_vars) or len(set(order)) != len(order):
        raise QueryError(f"key order {','.join(order)} must list each body variable exactly once")
    return Query(name.text, tuple(head), tuple(atoms), order, tuple(less_than))


# -- rewrites ----------------------------------------------------------------

def rewrite_repeated_vars(q: Query) -> Query:
    """Replace repeats inside an atom by fresh variables joined through Eq.

    R(x,y,x) becomes R(x,y,x'), Eq(x,x'); the fresh variable is placed right
    after its original in the key order.
    """
    taken = set(q.order)
    order = list(q.order)
    atoms: list[Atom] = []
    for atom in q.atoms:
        seen: dict[str, str] = {}
        new_vars = []
        eqs = []
        for v in atom.vars:
            if v not in seen:
                seen[v] = v
                new_vars.append(v)
                continue
            fresh = v + "'"
            while fresh in taken:
                fresh += "'"
            taken.add(fresh)
            # after the original and any earlier copies of it
            prev = seen[v]
            order.insert(order.index(prev) + 1, fresh)
            seen[v] = fresh
            new_vars.append(fresh)
            eqs.append(Atom(EQ, (v, fresh)))
        atoms.append(replace(atom, vars=tuple(new_vars)))
        atoms.extend(eqs)
    if len(atoms) == len(q.atoms):
        return q
    less_than = tuple(pair for pair in q.less_than)
    return Query(q.head_name, q.head, tuple(atoms), tuple(order), less_than)


def _sorting_permutation(atom: Atom, pos: Mapping[str, int]) -> tuple[int, ...]:
    return tuple(sorted(range(len(atom.vars)), key=lambda j: pos[atom.vars[j]]))


def plan_indexes(q: Query) -> set[tuple[str, tuple[int, ...]]]:
    """(relation, 0-based permutation) pairs for every atom whose variables are
    not a subsequence of the key order."""
    pos = {v: i for i, v in enumerate(q.order)}
    out = set()
    for atom in q.atoms:
        if atom.builtin:
            continue
        perm = _sorting_permutation(atom, pos)
        if perm != tuple(range(len(perm))):
            out.add((atom.relation, perm))
    return out


def apply_indexes(q: Query) -> Query:
    """Rewrite every atom over the index whose columns follow the key order."""
    pos = {v: i for i, v in enumerate(q.order)}
    atoms = []
    for atom in q.atoms:
        if len(set(atom.vars)) != len(atom.vars):
            raise QueryError(f"{atom}: repeated variable; run rewrite_repeated_vars first")
        perm = _sorting_permutation(atom, pos)
        atoms.append(Atom(atom.relation, tuple(atom.vars[j] for j in perm), perm))
    return replace(q, atoms=tuple(atoms))


def normalize(q: Query) -> Query:
    return apply_indexes(rewrite_repeated_vars(q))


def compute_rank(q: Query, order: Sequence[str] | None = None) -> int:
    """Largest 1-based key-order position that is the first variable of an atom."""
    order = tuple(order) if order is not None else q.order
    pos = {v: i for i, v in enumerate(order)}
    return max(min(pos[v] for v in atom.vars) for atom in q.atoms) + 1


def min_rank(q: Query, max_vars: int = 6) -> tuple[int, tuple[str, ...]]:
    """Diagnostic: the smallest rank over all key orders (n <= max_vars)."""
    if q.n > max_vars:
        raise QueryError(f"refusing to enumerate {q.n}! key orders")
    best = None
    for order in itertools.permutations(q.order):
        r = compute_rank(q, order)
        if best is None or r < best[0]:
            best = (r, order)
    return best
