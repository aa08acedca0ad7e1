"""Newick reading and writing for multifurcating phylogenies.

The grammar accepted is the usual one: nested parenthesized groups, comma
separators, optional branch lengths (":1.5", parsed and discarded),
optional internal-node labels (discarded), single-quoted labels, and
bracketed comments "[...]".  Whether the text denotes a rooted or an
unrooted tree is the caller's decision; "(A,(B,C));" is ambiguous on its
own, so no arity-based guessing is done here.
"""

from __future__ import annotations

from polydist.trees import Kind, Phylogeny, TaxonSet, TreeError


class NewickError(ValueError):
    """Malformed Newick text; carries the 0-based offset of the problem."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


_LABEL_STOP = set("(),;:[]'")


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_trivia(self):
        while self.pos < len(self.text):
            ch = self.text[self.pos]
            if ch.isspace():
                self.pos += 1
            elif ch == "[":
                end = self.text.find("]", self.pos)
                if end < 0:
                    raise NewickError("unterminated comment", self.pos)
                self.pos = end + 1
            else:
                return

    def peek(self) -> str:
        self.skip_trivia()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str):
        if self.peek() != ch:
            raise NewickError(f"expected {ch!r}", self.pos)
        self.pos += 1

    def label(self) -> str:
        """Read a (possibly quoted, possibly empty) label."""
        self.skip_trivia()
        if self.pos < len(self.text) and self.text[self.pos] == "'":
            start = self.pos
            self.pos += 1
            out = []
            while True:
                if self.pos >= len(self.text):
                    raise NewickError("unterminated quoted label", start)
                ch = self.text[self.pos]
                if ch == "'":
                    if self.text[self.pos + 1 : self.pos + 2] == "'":
                        out.append("'")
                        self.pos += 2
                        continue
                    self.pos += 1
                    return "".join(out)
                out.append(ch)
                self.pos += 1
        start = self.pos
        while self.pos < len(self.text) and not self.text[self.pos].isspace() \
                and self.text[self.pos] not in _LABEL_STOP:
            self.pos += 1
        return self.text[start:self.pos]

    def skip_branch_length(self):
        if self.peek() == ":":
            self.pos += 1
            self.skip_trivia()
            start = self.pos
            while self.pos < len(self.text) and (self.text[self.pos].isdigit()
                                                 or self.text[self.pos] in ".+-eE"):
                self.pos += 1
            if self.pos == start:
                raise NewickError("expected branch length after ':'", start)


def parse_newick(text: str, kind: Kind) -> Phylogeny:
    """Parse one ';'-terminated Newick statement into a Phylogeny."""
    sc = _Scanner(text)
    labels: list[str] = []
    children: list[list[int]] = []
    leaf_label: list[str | None] = []

    def node() -> int:
        vid = len(children)
        children.append([])
        leaf_label.append(None)
        if sc.peek() == "(":
            sc.expect("(")
            children[vid].append(node())
            while sc.peek() == ",":
                sc.expect(",")
                children[vid].append(node())
            sc.expect(")")
            sc.label()  # internal label, discarded
        else:
            start = sc.pos
            lab = sc.label()
            if not lab:
                raise NewickError("empty leaf label", start)
            leaf_label[vid] = lab
            labels.append(lab)
        sc.skip_branch_length()
        return vid

    root = node()
    sc.expect(";")
    sc.skip_trivia()
    if sc.pos != len(sc.text):
        raise NewickError("trailing text after ';'", sc.pos)

    if len(set(labels)) != len(labels):
        dup = next(l for l in labels if labels.count(l) > 1)
        raise NewickError(f"duplicate leaf label {dup!r}", 0)
    if not labels:
        raise NewickError("tree has no leaves", 0)
    taxa = TaxonSet(tuple(sorted(labels)))
    leaf_taxon = [taxa.index(l) if l is not None else None for l in leaf_label]
    if kind is Kind.UNROOTED and leaf_label[root] is None and len(children[root]) < 3 \
            and taxa.n > 2:
        raise NewickError("unrooted tree must have top-level degree >= 3", 0)
    try:
        tree = Phylogeny(kind, taxa, children, root, leaf_taxon)
        problems = tree.validate()
    except TreeError as exc:
        raise NewickError(str(exc), 0) from exc
    if problems:
        raise NewickError("; ".join(problems), 0)
    return tree


def parse_newick_many(text: str, kind: Kind) -> list[Phylogeny]:
    """Parse a multi-tree document (statements separated by ';')."""
    trees = []
    chunks = text.split(";")
    for chunk in chunks[:-1]:
        trees.append(parse_newick(chunk + ";", kind))
    tail = chunks[-1]
    if tail.strip():
        raise NewickError("trailing text after last ';'", len(text) - len(tail))
    if not trees:
        raise NewickError("no trees in input", 0)
    return trees


def write_newick(tree: Phylogeny) -> str:
    """Serialize deterministically: children sorted by their smallest leaf."""

    def needs_quotes(lab: str) -> bool:
        return any(ch.isspace() or ch in _LABEL_STOP for ch in lab)

    def emit_label(t: int) -> str:
        lab = tree.taxa.label(t)
        return "'" + lab.replace("'", "''") + "'" if needs_quotes(lab) else lab

    def emit(v: int) -> tuple[int, str]:
        t = tree.leaf_taxon[v]
        if t is not None:
            return t, emit_label(t)
        parts = sorted(emit(c) for c in tree.children[v])
        return parts[0][0], "(" + ",".join(s for _, s in parts) + ")"

    return emit(tree.root)[1] + ";"
