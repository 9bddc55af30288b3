"""Constituent-to-dependency conversion with a replaceable head-rule table."""

from dataclasses import dataclass, field
from importlib import resources
from typing import Dict, List, Optional, Tuple

from .types import ROOT, ConstituentNode, DependencyTree, ValidationError

LEFT_TO_RIGHT = "left-to-right"
RIGHT_TO_LEFT = "right-to-left"
WILDCARD = "*"


@dataclass(frozen=True)
class HeadRule:
    direction: str = LEFT_TO_RIGHT
    priorities: Tuple[str, ...] = (WILDCARD,)

    def __post_init__(self):
        if self.direction not in (LEFT_TO_RIGHT, RIGHT_TO_LEFT):
            raise ValueError("bad scan direction %r" % self.direction)
        # a rule without patterns falls back to the first child in scan order
        object.__setattr__(self, "priorities", tuple(self.priorities) or (WILDCARD,))

    def scan(self, n):
        return range(n) if self.direction == LEFT_TO_RIGHT else range(n - 1, -1, -1)

    def match(self, labels) -> Optional[int]:
        for pat in self.priorities:
            for i in self.scan(len(labels)):
                if pat == WILDCARD or labels[i] == pat:
                    return i
        return None


@dataclass(frozen=True)
class HeadRuleTable:
    rules: Dict[str, HeadRule] = field(default_factory=dict)
    default: HeadRule = HeadRule()

    def lookup(self, label: str) -> HeadRule:
        return self.rules.get(label, self.default)

    @classmethod
    def from_text(cls, text: str) -> "HeadRuleTable":
        rules = {}
        default = None
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) < 2:
                raise ValueError("head rules line %d: expected LABEL direction patterns..." % lineno)
            label, direction, pats = parts[0], parts[1], tuple(parts[2:])
            try:
                rule = HeadRule(direction, pats)
            except ValueError as e:
                raise ValueError("head rules line %d: %s" % (lineno, e)) from None
            if label == "default":
                default = rule
            else:
                rules[label] = rule
        if default is None:
            raise ValueError("head rules: a 'default' line is required")
        return cls(rules, default)

    @classmethod
    def load(cls, path) -> "HeadRuleTable":
        with open(path, encoding="utf-8") as f:
            return cls.from_text(f.read())

    @classmethod
    def default_table(cls) -> "HeadRuleTable":
        text = resources.files("srlu").joinpath("data/head_rules.txt").read_text(encoding="utf-8")
        return cls.from_text(text)


def find_head_child(node: ConstituentNode, table: HeadRuleTable) -> int:
    """Index of the head child of ``node``.

    The node's own rule is tried first, then the table default; if neither
    matches, the first child in the default rule's scan order is chosen.
    """
    if len(node.children) == 1:
        return 0
    labels = [c.label for c in node.children]
    i = table.lookup(node.label).match(labels)
    if i is None:
        i = table.default.match(labels)
    if i is None:
        i = next(iter(table.default.scan(len(labels))))
    return i


def convert_tree(ctree: ConstituentNode, table: HeadRuleTable) -> DependencyTree:
    ctree.validate()
    if ctree.start != 0:
        raise ValidationError("tree does not start at token 0")
    n = ctree.end + 1
    heads: List[int] = [ROOT] * n
    rels: List[str] = ["ROOT"] * n

    def visit(node):
        if node.is_preterminal:
            return node.start
        lex = [visit(c) for c in node.children]
        h = find_head_child(node, table)
        for i, (child, dep) in enumerate(zip(node.children, lex)):
            if i != h:
                heads[dep] = lex[h]
                rels[dep] = child.label
        return lex[h]

    root = visit(ctree)
    heads[root] = ROOT
    rels[root] = "ROOT"
    tree = DependencyTree(tuple(heads), tuple(rels))
    tree.validate(n)
    return tree


def is_projective(dtree: DependencyTree) -> bool:
    """True iff every token strictly inside an arc is dominated by the arc's head."""
    heads = dtree.heads

    def dominated(t, h):
        while t != ROOT:
            if t == h:
                return True
            t = heads[t]
        return False

    for d, h in enumerate(heads):
        if h == ROOT:
            continue
        lo, hi = (h, d) if h < d else (d, h)
        for t in range(lo + 1, hi):
            if not dominated(t, h):
                return False
    return True
